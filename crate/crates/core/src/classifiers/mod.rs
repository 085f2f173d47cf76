//! Supervised severity classifiers over 80-dimensional feature vectors.
//!
//! All models are trained from scratch and are deterministic given their
//! parameters (including seeds); training that parallelizes does so over
//! independently seeded units, so results do not depend on the thread count.

mod ensemble;
mod ert;
mod gboost;
mod knn;
mod logreg;
mod persist;
mod svm;
mod tree;

use std::fmt;
use std::str::FromStr;

pub use ensemble::{hard_vote, train_ensemble, Ensemble, EnsembleParams, Member};
pub use ert::{train_ert, ErtModel, ErtParams};
pub use gboost::{train_gboost, GbModel, GbParams};
pub use knn::{train_knn, KnnModel};
pub use logreg::{loss_and_gradient, train_logreg, LogRegModel, LogRegParams};
pub use persist::{load_model, model_bytes, model_from_bytes, save_model, MAGIC};
pub use svm::{resolve_votes, train_svm, train_svm_with_report, BinarySvm, Kernel, KktReport, SvmModel, SvmParams};
pub use tree::{Node, Tree};

use crate::error::{Error, Result};
use crate::features::{FeatureRow, FEATURE_DIM};
use crate::wam::SeverityClass;

pub const N_CLASSES: usize = 4;

/// Feature rows with aligned labels.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: Vec<Vec<f64>>,
    y: Vec<SeverityClass>,
}

impl Dataset {
    /// Rows must all be `FEATURE_DIM` long and finite.
    pub fn new(x: Vec<Vec<f64>>, y: Vec<SeverityClass>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if x.len() != y.len() {
            return Err(Error::InvalidParameter(format!("{} rows but {} labels", x.len(), y.len())));
        }
        for row in &x {
            check_input(row)?;
        }
        Ok(Self { x, y })
    }

    /// Labeled rows of a feature CSV.
    pub fn from_rows(rows: &[FeatureRow]) -> Result<Self> {
        let mut x = Vec::with_capacity(rows.len());
        let mut y = Vec::with_capacity(rows.len());
        for r in rows {
            let label = r
                .label
                .ok_or_else(|| Error::InvalidParameter(format!("row {} has no label", r.id)))?;
            x.push(r.features.as_slice().to_vec());
            y.push(label);
        }
        Self::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[Vec<f64>] {
        &self.x
    }

    pub fn y(&self) -> &[SeverityClass] {
        &self.y
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            indices.iter().map(|&i| self.x[i].clone()).collect(),
            indices.iter().map(|&i| self.y[i]).collect(),
        )
    }

    pub fn class_counts(&self) -> [usize; N_CLASSES] {
        let mut c = [0; N_CLASSES];
        for y in &self.y {
            c[y.index()] += 1;
        }
        c
    }

    /// Per-sample weights: all 1, or inverse class frequency scaled so the
    /// weights sum to the sample count.
    pub fn sample_weights(&self, balanced: bool) -> Vec<f64> {
        if !balanced {
            return vec![1.0; self.len()];
        }
        let counts = self.class_counts();
        let present = counts.iter().filter(|&&c| c > 0).count() as f64;
        let n = self.len() as f64;
        self.y
            .iter()
            .map(|y| n / (present * counts[y.index()] as f64))
            .collect()
    }
}

pub(crate) fn check_input(x: &[f64]) -> Result<()> {
    if x.len() != FEATURE_DIM {
        return Err(Error::DimensionMismatch {
            expected: FEATURE_DIM,
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::OutOfRange("non-finite feature value".into()));
    }
    Ok(())
}

/// What the four per-class scores of a [`Prediction`] mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScoreKind {
    /// Class probabilities summing to 1.
    Probability,
    /// Fractions of member votes (trees, neighbors, ensemble members).
    VoteFraction,
    /// One-vs-one vote counts.
    Votes,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub class: SeverityClass,
    /// Indexed by class, Mild first.
    pub scores: [f64; N_CLASSES],
    pub kind: ScoreKind,
}

/// Highest score; ties go to the smaller class.
pub(crate) fn argmax_class(scores: &[f64; N_CLASSES]) -> SeverityClass {
    let mut best = 0;
    for k in 1..N_CLASSES {
        if scores[k] > scores[best] {
            best = k;
        }
    }
    SeverityClass::ALL[best]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Ert,
    GBoost,
    Svm,
    Knn,
    LogReg,
    Ensemble,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        Self::Ert,
        Self::GBoost,
        Self::Svm,
        Self::Knn,
        Self::LogReg,
        Self::Ensemble,
    ];

    pub fn tag(self) -> u8 {
        match self {
            Self::Ert => 1,
            Self::GBoost => 2,
            Self::Svm => 3,
            Self::Knn => 4,
            Self::LogReg => 5,
            Self::Ensemble => 6,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ert => "ert",
            Self::GBoost => "gboost",
            Self::Svm => "svm",
            Self::Knn => "knn",
            Self::LogReg => "logreg",
            Self::Ensemble => "ensemble",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown model kind {s:?} (expected ert, gboost, svm, knn, logreg or ensemble)"
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainedModel {
    Ert(ErtModel),
    GBoost(GbModel),
    Svm(SvmModel),
    Knn(KnnModel),
    LogReg(LogRegModel),
    Ensemble(Ensemble),
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::Ert(_) => ModelKind::Ert,
            Self::GBoost(_) => ModelKind::GBoost,
            Self::Svm(_) => ModelKind::Svm,
            Self::Knn(_) => ModelKind::Knn,
            Self::LogReg(_) => ModelKind::LogReg,
            Self::Ensemble(_) => ModelKind::Ensemble,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        check_input(x)?;
        Ok(match self {
            Self::Ert(m) => m.predict(x),
            Self::GBoost(m) => m.predict(x),
            Self::Svm(m) => m.predict(x),
            Self::Knn(m) => m.predict(x),
            Self::LogReg(m) => m.predict(x),
            Self::Ensemble(m) => m.predict(x)?,
        })
    }

    pub fn predict_class(&self, x: &[f64]) -> Result<SeverityClass> {
        Ok(self.predict(x)?.class)
    }

    /// Fraction of rows of `data` predicted correctly.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let mut hits = 0;
        for (x, y) in data.x().iter().zip(data.y()) {
            if self.predict_class(x)? == *y {
                hits += 1;
            }
        }
        Ok(hits as f64 / data.len() as f64)
    }
}

/// Hyperparameters of every model kind; `train` picks the relevant block.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ClassifierParams {
    pub ert: ErtParams,
    pub gboost: GbParams,
    pub svm: SvmParams,
    pub knn_k: KnnK,
    pub logreg: LogRegParams,
    pub ensemble: EnsembleParams,
}

/// Neighbor count for k-NN.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KnnK(pub usize);

impl Default for KnnK {
    fn default() -> Self {
        KnnK(3)
    }
}

pub fn train(kind: ModelKind, data: &Dataset, params: &ClassifierParams) -> Result<TrainedModel> {
    Ok(match kind {
        ModelKind::Ert => TrainedModel::Ert(train_ert(data, &params.ert)?),
        ModelKind::GBoost => TrainedModel::GBoost(train_gboost(data, &params.gboost)?),
        ModelKind::Svm => TrainedModel::Svm(train_svm(data, &params.svm)?),
        ModelKind::Knn => TrainedModel::Knn(train_knn(data, params.knn_k.0)?),
        ModelKind::LogReg => TrainedModel::LogReg(train_logreg(data, &params.logreg)?),
        ModelKind::Ensemble => TrainedModel::Ensemble(train_ensemble(data, params)?),
    })
}
