//! Multiclass gradient-boosted regression trees (softmax cross-entropy).
//!
//! Every round fits one depth-limited least-squares tree per class to the
//! negative gradient `onehot - softmax(F)` and adds `learning_rate` times
//! the leaf means to that class's score. Scores start at the log of the
//! Laplace-smoothed class priors. Splits are exhaustive over all features
//! and midpoints between consecutive distinct values.

use rayon::prelude::*;

use super::tree::{build, Tree};
use super::{argmax_class, Dataset, Prediction, ScoreKind, N_CLASSES};
use crate::error::{Error, Result};
use crate::features::FEATURE_DIM;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GbParams {
    pub n_rounds: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
    /// Nodes with fewer samples become leaves.
    pub min_samples_split: usize,
    pub balanced: bool,
    /// Recorded for reproducibility; training itself draws no randomness.
    pub seed: u64,
}

impl Default for GbParams {
    fn default() -> Self {
        Self {
            n_rounds: 200,
            learning_rate: 0.1,
            max_depth: 3,
            min_samples_split: 2,
            balanced: false,
            seed: 1,
        }
    }
}

impl GbParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) || self.max_depth == 0 || self.n_rounds == 0 {
            return Err(Error::InvalidParameter(format!(
                "gradient boosting needs learning rate in (0, 1], max depth >= 1, rounds >= 1; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GbModel {
    pub(crate) init: [f64; N_CLASSES],
    pub(crate) learning_rate: f64,
    /// `rounds[r][k]` is the class-`k` tree of round `r`.
    pub(crate) rounds: Vec<[Tree<f64>; N_CLASSES]>,
    /// Mean training loss before the first round and after each round.
    pub(crate) loss_trace: Vec<f64>,
}

impl GbModel {
    pub fn loss_trace(&self) -> &[f64] {
        &self.loss_trace
    }

    pub fn n_rounds(&self) -> usize {
        self.rounds.len()
    }

    pub fn raw_scores(&self, x: &[f64]) -> [f64; N_CLASSES] {
        let mut f = self.init;
        for round in &self.rounds {
            for k in 0..N_CLASSES {
                f[k] += self.learning_rate * round[k].leaf(x);
            }
        }
        f
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Prediction {
        let scores = softmax(&self.raw_scores(x));
        Prediction {
            class: argmax_class(&scores),
            scores,
            kind: ScoreKind::Probability,
        }
    }
}

pub(crate) fn softmax(f: &[f64; N_CLASSES]) -> [f64; N_CLASSES] {
    let m = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut e = f.map(|v| (v - m).exp());
    let s: f64 = e.iter().sum();
    e.iter_mut().for_each(|v| *v /= s);
    e
}

/// Weighted mean cross-entropy of raw scores.
fn mean_loss(scores: &[[f64; N_CLASSES]], labels: &[usize], w: &[f64]) -> f64 {
    let mut total = 0.0;
    for ((f, &y), &wi) in scores.iter().zip(labels).zip(w) {
        let m = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + f.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        total += wi * (lse - f[y]);
    }
    total / w.iter().sum::<f64>()
}

fn fit_tree(x: &[Vec<f64>], r: &[f64], w: &[f64], p: &GbParams) -> Tree<f64> {
    let leaf_value = |s: &[usize]| {
        let sw: f64 = s.iter().map(|&i| w[i]).sum();
        if sw > 0.0 {
            s.iter().map(|&i| w[i] * r[i]).sum::<f64>() / sw
        } else {
            0.0
        }
    };
    build((0..x.len()).collect(), x, |samples, depth| {
        if depth >= p.max_depth || samples.len() < p.min_samples_split {
            return Err(leaf_value(samples));
        }
        let (sw, swr) = samples
            .iter()
            .fold((0.0, 0.0), |(a, b), &i| (a + w[i], b + w[i] * r[i]));
        let base = swr * swr / sw;
        let mut best: Option<(f64, usize, f64)> = None;
        let mut order = samples.to_vec();
        for f in 0..FEATURE_DIM {
            order.sort_by(|&a, &b| x[a][f].total_cmp(&x[b][f]).then(a.cmp(&b)));
            let (mut lw, mut lwr) = (0.0, 0.0);
            for j in 0..order.len() - 1 {
                let i = order[j];
                lw += w[i];
                lwr += w[i] * r[i];
                let (v, next) = (x[i][f], x[order[j + 1]][f]);
                if next <= v {
                    continue;
                }
                let (rw, rwr) = (sw - lw, swr - lwr);
                if lw <= 0.0 || rw <= 0.0 {
                    continue;
                }
                let gain = lwr * lwr / lw + rwr * rwr / rw - base;
                if best.is_none_or(|(g, _, _)| gain > g) {
                    let mid = v + (next - v) / 2.0;
                    best = Some((gain, f, if mid < next { mid } else { v }));
                }
            }
        }
        match best {
            Some((gain, f, t)) if gain > 1e-12 => Ok((f, t)),
            _ => Err(leaf_value(samples)),
        }
    })
}

pub fn train_gboost(data: &Dataset, p: &GbParams) -> Result<GbModel> {
    p.validate()?;
    let x = data.x();
    let labels: Vec<usize> = data.y().iter().map(|c| c.index()).collect();
    let w = data.sample_weights(p.balanced);
    let sw: f64 = w.iter().sum();
    let mut prior = [1.0; N_CLASSES];
    for (&y, &wi) in labels.iter().zip(&w) {
        prior[y] += wi;
    }
    let init = prior.map(|c| (c / (sw + N_CLASSES as f64)).ln());

    let n = data.len();
    let mut scores = vec![init; n];
    let mut loss_trace = vec![mean_loss(&scores, &labels, &w)];
    let mut rounds = Vec::with_capacity(p.n_rounds);
    for _ in 0..p.n_rounds {
        let probs: Vec<[f64; N_CLASSES]> = scores.iter().map(softmax).collect();
        let trees: Vec<Tree<f64>> = (0..N_CLASSES)
            .into_par_iter()
            .map(|k| {
                let r: Vec<f64> = (0..n)
                    .map(|i| f64::from(u8::from(labels[i] == k)) - probs[i][k])
                    .collect();
                fit_tree(x, &r, &w, p)
            })
            .collect();
        let trees: [Tree<f64>; N_CLASSES] = trees.try_into().expect("one tree per class");
        for (i, s) in scores.iter_mut().enumerate() {
            for k in 0..N_CLASSES {
                s[k] += p.learning_rate * trees[k].leaf(&x[i]);
            }
        }
        loss_trace.push(mean_loss(&scores, &labels, &w));
        rounds.push(trees);
    }
    Ok(GbModel {
        init,
        learning_rate: p.learning_rate,
        rounds,
        loss_trace,
    })
}
