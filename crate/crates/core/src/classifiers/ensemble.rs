//! Hard-voting ensemble of gradient boosting, extremely randomized trees
//! and an SVM.

use log::info;

use super::{
    train_ert, train_gboost, train_svm, ClassifierParams, Dataset, Prediction, ScoreKind, TrainedModel,
    N_CLASSES,
};
use crate::error::{Error, Result};
use crate::wam::SeverityClass;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Member {
    GBoost,
    Ert,
    Svm,
}

impl Member {
    pub fn name(self) -> &'static str {
        match self {
            Member::GBoost => "gboost",
            Member::Ert => "ert",
            Member::Svm => "svm",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gboost" => Ok(Member::GBoost),
            "ert" => Ok(Member::Ert),
            "svm" => Ok(Member::Svm),
            _ => Err(Error::InvalidParameter(format!("unknown ensemble member {s:?}"))),
        }
    }
}

/// Member order used when all three members disagree; the first wins.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnsembleParams {
    pub priority: [Member; 3],
}

impl Default for EnsembleParams {
    fn default() -> Self {
        Self {
            priority: [Member::GBoost, Member::Ert, Member::Svm],
        }
    }
}

impl EnsembleParams {
    pub fn validate(&self) -> Result<()> {
        let [a, b, c] = self.priority;
        if a == b || b == c || a == c {
            return Err(Error::InvalidParameter(format!(
                "ensemble priority must name each member once, got {:?}",
                self.priority
            )));
        }
        Ok(())
    }
}

/// Votes in priority order: a class named by at least two votes wins,
/// otherwise the first vote.
pub fn hard_vote(votes: [SeverityClass; 3]) -> SeverityClass {
    let [a, b, c] = votes;
    if a == b || a == c {
        a
    } else if b == c {
        b
    } else {
        a
    }
}

/// Members stored in priority order.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    pub(crate) members: Vec<(Member, TrainedModel)>,
}

impl Ensemble {
    pub fn new(members: Vec<(Member, TrainedModel)>) -> Result<Self> {
        if members.len() != 3 {
            return Err(Error::InvalidParameter(format!(
                "an ensemble needs exactly 3 members, got {}",
                members.len()
            )));
        }
        EnsembleParams {
            priority: [members[0].0, members[1].0, members[2].0],
        }
        .validate()?;
        if members.iter().any(|(_, m)| matches!(m, TrainedModel::Ensemble(_))) {
            return Err(Error::InvalidParameter("ensembles cannot be nested".into()));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(Member, TrainedModel)] {
        &self.members
    }

    pub fn member_votes(&self, x: &[f64]) -> Result<[SeverityClass; 3]> {
        let mut votes = [SeverityClass::Mild; 3];
        for (v, (_, m)) in votes.iter_mut().zip(&self.members) {
            *v = m.predict_class(x)?;
        }
        Ok(votes)
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Result<Prediction> {
        let votes = self.member_votes(x)?;
        let mut scores = [0.0; N_CLASSES];
        for v in votes {
            scores[v.index()] += 1.0 / 3.0;
        }
        Ok(Prediction {
            class: hard_vote(votes),
            scores,
            kind: ScoreKind::VoteFraction,
        })
    }
}

pub fn train_ensemble(data: &Dataset, params: &ClassifierParams) -> Result<Ensemble> {
    params.ensemble.validate()?;
    info!(
        "ensemble tie-break priority: {}",
        params.ensemble.priority.map(Member::name).join(" > ")
    );
    let mut members = Vec::with_capacity(3);
    for m in params.ensemble.priority {
        let model = match m {
            Member::GBoost => TrainedModel::GBoost(train_gboost(data, &params.gboost)?),
            Member::Ert => TrainedModel::Ert(train_ert(data, &params.ert)?),
            Member::Svm => TrainedModel::Svm(train_svm(data, &params.svm)?),
        };
        members.push((m, model));
    }
    Ensemble::new(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use SeverityClass::*;

    #[test]
    fn votes() {
        assert_eq!(hard_vote([Moderate, Moderate, Severe]), Moderate);
        assert_eq!(hard_vote([Mild, Mild, Mild]), Mild);
        assert_eq!(hard_vote([Mild, Moderate, Severe]), Mild);
        assert_eq!(hard_vote([Mild, Severe, Severe]), Severe);
    }

    #[test]
    fn priority_must_be_a_permutation() {
        let p = EnsembleParams {
            priority: [Member::Ert, Member::Ert, Member::Svm],
        };
        assert!(p.validate().is_err());
        assert_eq!(Member::from_name("SVM").unwrap(), Member::Svm);
    }
}
