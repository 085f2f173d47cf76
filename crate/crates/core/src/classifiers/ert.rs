//! Extremely randomized trees.
//!
//! Each node draws up to `k` features among those not constant on its
//! samples, one uniform cut-point per feature inside the observed range,
//! and keeps the candidate with the largest Gini decrease. Trees are grown
//! until nodes are pure or smaller than `min_samples_split`.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::tree::{build, Tree};
use super::{argmax_class, Dataset, Prediction, ScoreKind, N_CLASSES};
use crate::error::{Error, Result};
use crate::features::FEATURE_DIM;
use crate::wam::SeverityClass;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErtParams {
    pub n_trees: usize,
    /// Features tried per split.
    pub k: usize,
    pub min_samples_split: usize,
    pub balanced: bool,
    pub seed: u64,
}

impl Default for ErtParams {
    fn default() -> Self {
        Self {
            n_trees: 300,
            k: 9,
            min_samples_split: 2,
            balanced: false,
            seed: 1,
        }
    }
}

impl ErtParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 || self.k == 0 || self.k > FEATURE_DIM || self.min_samples_split < 2 {
            return Err(Error::InvalidParameter(format!(
                "ERT needs n_trees >= 1, 1 <= k <= {FEATURE_DIM}, min_samples_split >= 2; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErtModel {
    pub(crate) trees: Vec<Tree<SeverityClass>>,
}

impl ErtModel {
    pub fn trees(&self) -> &[Tree<SeverityClass>] {
        &self.trees
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Prediction {
        let mut scores = [0.0; N_CLASSES];
        for t in &self.trees {
            scores[t.leaf(x).index()] += 1.0;
        }
        let n = self.trees.len() as f64;
        scores.iter_mut().for_each(|s| *s /= n);
        Prediction {
            class: argmax_class(&scores),
            scores,
            kind: ScoreKind::VoteFraction,
        }
    }
}

fn class_weights(samples: &[usize], y: &[SeverityClass], w: &[f64]) -> [f64; N_CLASSES] {
    let mut c = [0.0; N_CLASSES];
    for &i in samples {
        c[y[i].index()] += w[i];
    }
    c
}

fn gini(c: &[f64; N_CLASSES]) -> f64 {
    let total: f64 = c.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - c.iter().map(|v| (v / total) * (v / total)).sum::<f64>()
}

fn grow_tree(data: &Dataset, weights: &[f64], p: &ErtParams, rng: &mut ChaCha8Rng) -> Tree<SeverityClass> {
    let x = data.x();
    let y = data.y();
    build((0..data.len()).collect(), x, |samples, _| {
        let counts = class_weights(samples, y, weights);
        let leaf = argmax_class(&counts);
        let pure = counts.iter().filter(|&&c| c > 0.0).count() <= 1;
        if samples.len() < p.min_samples_split || pure {
            return Err(leaf);
        }
        let mut ranges = Vec::new();
        for f in 0..FEATURE_DIM {
            let (lo, hi) = samples
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(x[i][f]), hi.max(x[i][f])));
            if hi > lo {
                ranges.push((f, lo, hi));
            }
        }
        if ranges.is_empty() {
            return Err(leaf);
        }
        let parent = gini(&counts);
        let total: f64 = counts.iter().sum();
        let mut best: Option<(f64, usize, f64)> = None;
        for pick in sample(rng, ranges.len(), p.k.min(ranges.len())) {
            let (f, lo, hi) = ranges[pick];
            let mut cut = lo + (hi - lo) * rng.random::<f64>();
            if cut >= hi {
                cut = lo;
            }
            let mut left = [0.0; N_CLASSES];
            for &i in samples {
                if x[i][f] <= cut {
                    left[y[i].index()] += weights[i];
                }
            }
            let mut right = counts;
            for k in 0..N_CLASSES {
                right[k] -= left[k];
            }
            let (wl, wr) = (left.iter().sum::<f64>(), right.iter().sum::<f64>());
            let gain = parent - (wl * gini(&left) + wr * gini(&right)) / total;
            if best.is_none_or(|(g, _, _)| gain > g) {
                best = Some((gain, f, cut));
            }
        }
        let (_, f, cut) = best.expect("at least one candidate");
        Ok((f, cut))
    })
}

pub fn train_ert(data: &Dataset, p: &ErtParams) -> Result<ErtModel> {
    p.validate()?;
    let weights = data.sample_weights(p.balanced);
    let trees = (0..p.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
            rng.set_stream(t as u64);
            grow_tree(data, &weights, p, &mut rng)
        })
        .collect();
    Ok(ErtModel { trees })
}
