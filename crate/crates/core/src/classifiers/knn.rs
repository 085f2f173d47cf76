//! k-nearest neighbors with Euclidean distance.

use super::{argmax_class, Dataset, Prediction, ScoreKind, N_CLASSES};
use crate::error::{Error, Result};
use crate::wam::SeverityClass;

#[derive(Clone, Debug, PartialEq)]
pub struct KnnModel {
    pub(crate) k: usize,
    pub(crate) x: Vec<Vec<f64>>,
    pub(crate) y: Vec<SeverityClass>,
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Indices of the `k` nearest stored samples; equal distances keep the
    /// lower index first.
    pub fn neighbors(&self, x: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, s)| (s.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(), i))
            .collect();
        d.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        d.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    /// Majority among the neighbors; vote ties go to the smaller class.
    pub(crate) fn predict(&self, x: &[f64]) -> Prediction {
        let mut scores = [0.0; N_CLASSES];
        for i in self.neighbors(x) {
            scores[self.y[i].index()] += 1.0;
        }
        scores.iter_mut().for_each(|s| *s /= self.k as f64);
        Prediction {
            class: argmax_class(&scores),
            scores,
            kind: ScoreKind::VoteFraction,
        }
    }
}

pub fn train_knn(data: &Dataset, k: usize) -> Result<KnnModel> {
    if k == 0 || k > data.len() {
        return Err(Error::InvalidParameter(format!(
            "k must lie in 1..={} for this dataset, got {k}",
            data.len()
        )));
    }
    Ok(KnnModel {
        k,
        x: data.x().to_vec(),
        y: data.y().to_vec(),
    })
}
