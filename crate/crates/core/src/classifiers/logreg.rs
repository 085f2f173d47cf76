//! Multinomial logistic regression fitted by full-batch gradient descent.
//!
//! Parameters are a `4 x 81` matrix (weights plus bias per class), stored
//! row-major; the loss is the weighted mean cross-entropy plus
//! `l2 / 2 * |W|^2` (bias excluded).

use super::gboost::softmax;
use super::{argmax_class, Dataset, Prediction, ScoreKind, N_CLASSES};
use crate::error::{Error, Result};
use crate::features::FEATURE_DIM;

pub const N_PARAMS: usize = N_CLASSES * (FEATURE_DIM + 1);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogRegParams {
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub balanced: bool,
}

impl Default for LogRegParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.5,
            epochs: 2000,
            l2: 1e-4,
            balanced: false,
        }
    }
}

impl LogRegParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) || !(self.l2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "logistic regression needs learning rate > 0 and l2 >= 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogRegModel {
    pub(crate) params: Vec<f64>,
}

fn logits(params: &[f64], x: &[f64]) -> [f64; N_CLASSES] {
    let mut z = [0.0; N_CLASSES];
    for (k, zk) in z.iter_mut().enumerate() {
        let row = &params[k * (FEATURE_DIM + 1)..(k + 1) * (FEATURE_DIM + 1)];
        *zk = row[FEATURE_DIM] + row[..FEATURE_DIM].iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
    }
    z
}

impl LogRegModel {
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Prediction {
        let scores = softmax(&logits(&self.params, x));
        Prediction {
            class: argmax_class(&scores),
            scores,
            kind: ScoreKind::Probability,
        }
    }
}

/// Loss and its gradient with respect to `params` (length [`N_PARAMS`]).
pub fn loss_and_gradient(params: &[f64], data: &Dataset, weights: &[f64], l2: f64) -> (f64, Vec<f64>) {
    let stride = FEATURE_DIM + 1;
    let mut grad = vec![0.0; N_PARAMS];
    let mut loss = 0.0;
    let total: f64 = weights.iter().sum();
    for ((x, y), &w) in data.x().iter().zip(data.y()).zip(weights) {
        let z = logits(params, x);
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
        loss += w * (lse - z[y.index()]);
        let p = softmax(&z);
        for k in 0..N_CLASSES {
            let g = w * (p[k] - f64::from(u8::from(k == y.index())));
            let row = &mut grad[k * stride..(k + 1) * stride];
            for (gj, xj) in row[..FEATURE_DIM].iter_mut().zip(x) {
                *gj += g * xj;
            }
            row[FEATURE_DIM] += g;
        }
    }
    loss /= total;
    grad.iter_mut().for_each(|g| *g /= total);
    for k in 0..N_CLASSES {
        for j in 0..FEATURE_DIM {
            let w = params[k * stride + j];
            loss += 0.5 * l2 * w * w;
            grad[k * stride + j] += l2 * w;
        }
    }
    (loss, grad)
}

pub fn train_logreg(data: &Dataset, p: &LogRegParams) -> Result<LogRegModel> {
    p.validate()?;
    let weights = data.sample_weights(p.balanced);
    let mut params = vec![0.0; N_PARAMS];
    for _ in 0..p.epochs {
        let (_, g) = loss_and_gradient(&params, data, &weights, p.l2);
        for (w, gi) in params.iter_mut().zip(&g) {
            *w -= p.learning_rate * gi;
        }
    }
    Ok(LogRegModel { params })
}
