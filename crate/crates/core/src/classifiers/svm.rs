//! Kernel support vector machines trained by SMO, one-vs-one for multiclass.
//!
//! The binary solver works on the dual
//! `min 1/2 a'Qa - e'a` s.t. `0 <= a_i <= C_i`, `y'a = 0`, picking the
//! maximal-violating pair with second-order working-set selection and
//! stopping once the duality gap measure drops below the tolerance.

use log::warn;
use rayon::prelude::*;

use super::{Dataset, Prediction, ScoreKind, N_CLASSES};
use crate::error::{Error, Result};
use crate::wam::SeverityClass;

const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Linear,
    Rbf { gamma: f64 },
}

impl Kernel {
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            Kernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
            Kernel::Rbf { gamma } => {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * d2).exp()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmParams {
    pub kernel: Kernel,
    pub c: f64,
    pub tolerance: f64,
    /// Cap on SMO pair updates per binary problem.
    pub max_iter: usize,
    pub balanced: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            kernel: Kernel::Rbf { gamma: 0.1 },
            c: 1.0,
            tolerance: 1e-3,
            max_iter: 1_000_000,
            balanced: false,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        let gamma_ok = match self.kernel {
            Kernel::Linear => true,
            Kernel::Rbf { gamma } => gamma > 0.0 && gamma.is_finite(),
        };
        if !(self.c > 0.0 && self.c.is_finite()) || !gamma_ok || !(self.tolerance > 0.0) || self.max_iter == 0 {
            return Err(Error::InvalidParameter(format!(
                "SVM needs C > 0, gamma > 0, tolerance > 0; got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Trained binary machine; positive decision values vote for `positive`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinarySvm {
    pub positive: SeverityClass,
    pub negative: SeverityClass,
    pub(crate) support: Vec<Vec<f64>>,
    /// `alpha_i * y_i` per support vector.
    pub(crate) coef: Vec<f64>,
    pub(crate) rho: f64,
    pub(crate) iterations: usize,
    pub(crate) converged: bool,
}

impl BinarySvm {
    pub fn decision(&self, kernel: &Kernel, x: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(s, c)| c * kernel.eval(s, x))
            .sum::<f64>()
            - self.rho
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }

    pub fn converged(&self) -> bool {
        self.converged
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub(crate) kernel: Kernel,
    pub(crate) machines: Vec<BinarySvm>,
    /// Set when training saw a single class; every prediction is that class.
    pub(crate) constant: Option<SeverityClass>,
}

impl SvmModel {
    pub fn machines(&self) -> &[BinarySvm] {
        &self.machines
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    /// Pairwise votes per class and the summed margins in each class's favor.
    pub fn votes(&self, x: &[f64]) -> ([f64; N_CLASSES], [f64; N_CLASSES]) {
        let mut votes = [0.0; N_CLASSES];
        let mut margins = [0.0; N_CLASSES];
        for m in &self.machines {
            let d = m.decision(&self.kernel, x);
            let (p, n) = (m.positive.index(), m.negative.index());
            if d > 0.0 {
                votes[p] += 1.0;
            } else {
                votes[n] += 1.0;
            }
            margins[p] += d;
            margins[n] -= d;
        }
        (votes, margins)
    }

    pub(crate) fn predict(&self, x: &[f64]) -> Prediction {
        if let Some(c) = self.constant {
            let mut scores = [0.0; N_CLASSES];
            scores[c.index()] = 1.0;
            return Prediction {
                class: c,
                scores,
                kind: ScoreKind::Votes,
            };
        }
        let (votes, margins) = self.votes(x);
        Prediction {
            class: resolve_votes(&votes, &margins),
            scores: votes,
            kind: ScoreKind::Votes,
        }
    }
}

/// Most votes; ties broken by larger summed margin, then by smaller class.
pub fn resolve_votes(votes: &[f64; N_CLASSES], margins: &[f64; N_CLASSES]) -> SeverityClass {
    let mut best = 0;
    for k in 1..N_CLASSES {
        if votes[k] > votes[best] || (votes[k] == votes[best] && margins[k] > margins[best]) {
            best = k;
        }
    }
    SeverityClass::ALL[best]
}

/// Largest KKT violation of a solved binary problem, by condition.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KktReport {
    /// `max(1 - y f(x))` over samples with `alpha = 0`.
    pub at_zero: f64,
    /// `max |y f(x) - 1|` over free samples.
    pub free: f64,
    /// `max(y f(x) - 1)` over samples at the upper bound.
    pub at_bound: f64,
    /// `|sum alpha_i y_i|`.
    pub equality: f64,
}

impl KktReport {
    pub fn worst(&self) -> f64 {
        self.at_zero.max(self.free).max(self.at_bound).max(self.equality)
    }
}

pub(crate) struct Solution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// SMO on a precomputed kernel matrix `k` (row-major, `n x n`).
pub(crate) fn smo(k: &[f64], y: &[f64], c: &[f64], tol: f64, max_iter: usize) -> Solution {
    let n = y.len();
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let in_up = |a: f64, yi: f64, ci: f64| (yi > 0.0 && a < ci) || (yi < 0.0 && a > 0.0);
    let in_low = |a: f64, yi: f64, ci: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < ci);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            if in_up(alpha[t], y[t], c[t]) && -y[t] * grad[t] > gmax {
                gmax = -y[t] * grad[t];
                i_sel = Some(t);
            }
        }
        let mut gmin = f64::INFINITY;
        let mut j_sel = None;
        let mut obj_min = f64::INFINITY;
        if let Some(i) = i_sel {
            for t in 0..n {
                if !in_low(alpha[t], y[t], c[t]) {
                    continue;
                }
                let v = -y[t] * grad[t];
                gmin = gmin.min(v);
                let b = gmax - v;
                if b > 0.0 {
                    let a = k[i * n + i] + k[t * n + t] - 2.0 * k[i * n + t];
                    let a = if a > 0.0 { a } else { TAU };
                    let obj = -(b * b) / a;
                    if obj < obj_min {
                        obj_min = obj;
                        j_sel = Some(t);
                    }
                }
            }
        }
        let (Some(i), Some(j)) = (i_sel, j_sel) else {
            converged = true;
            break;
        };
        if gmax - gmin < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let (old_ai, old_aj) = (alpha[i], alpha[j]);
        let (ci, cj) = (c[i], c[j]);
        if y[i] != y[j] {
            let quad = (q(i, i) + q(j, j) + 2.0 * q(i, j)).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > ci - cj {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = ci - diff;
                }
            } else if alpha[j] > cj {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            let quad = (q(i, i) + q(j, j) - 2.0 * q(i, j)).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > ci {
                if alpha[i] > ci {
                    alpha[i] = ci;
                    alpha[j] = sum - ci;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > cj {
                if alpha[j] > cj {
                    alpha[j] = cj;
                    alpha[i] = sum - cj;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (dai, daj) = (alpha[i] - old_ai, alpha[j] - old_aj);
        for t in 0..n {
            grad[t] += q(t, i) * dai + q(t, j) * daj;
        }
    }

    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if alpha[t] >= c[t] {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 { sum_free / n_free as f64 } else { (ub + lb) / 2.0 };
    Solution {
        alpha,
        rho,
        iterations,
        converged,
    }
}

/// KKT residuals of `alpha`, `rho` on the problem `(k, y, c)`.
pub(crate) fn kkt(k: &[f64], y: &[f64], c: &[f64], alpha: &[f64], rho: f64) -> KktReport {
    let n = y.len();
    let mut r = KktReport::default();
    for i in 0..n {
        let f: f64 = (0..n).map(|j| alpha[j] * y[j] * k[j * n + i]).sum::<f64>() - rho;
        let m = y[i] * f;
        if alpha[i] <= 0.0 {
            r.at_zero = r.at_zero.max(1.0 - m);
        } else if alpha[i] >= c[i] {
            r.at_bound = r.at_bound.max(m - 1.0);
        } else {
            r.free = r.free.max((m - 1.0).abs());
        }
    }
    r.equality = alpha.iter().zip(y).map(|(a, yi)| a * yi).sum::<f64>().abs();
    r
}

fn gram(kernel: &Kernel, x: &[&Vec<f64>]) -> Vec<f64> {
    let n = x.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel.eval(x[i], x[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

/// Trains the machine for `positive` vs `negative`; also returns its KKT residuals.
pub(crate) fn train_pair(
    data: &Dataset,
    weights: &[f64],
    positive: SeverityClass,
    negative: SeverityClass,
    p: &SvmParams,
) -> (BinarySvm, KktReport) {
    let idx: Vec<usize> = (0..data.len())
        .filter(|&i| data.y()[i] == positive || data.y()[i] == negative)
        .collect();
    let x: Vec<&Vec<f64>> = idx.iter().map(|&i| &data.x()[i]).collect();
    let y: Vec<f64> = idx
        .iter()
        .map(|&i| if data.y()[i] == positive { 1.0 } else { -1.0 })
        .collect();
    let c: Vec<f64> = idx.iter().map(|&i| p.c * weights[i]).collect();
    let k = gram(&p.kernel, &x);
    let sol = smo(&k, &y, &c, p.tolerance, p.max_iter);
    if !sol.converged {
        warn!("SMO for {positive} vs {negative} stopped after {} iterations without converging", sol.iterations);
    }
    let report = kkt(&k, &y, &c, &sol.alpha, sol.rho);
    let mut support = Vec::new();
    let mut coef = Vec::new();
    for (t, &a) in sol.alpha.iter().enumerate() {
        if a > 0.0 {
            support.push(x[t].clone());
            coef.push(a * y[t]);
        }
    }
    let machine = BinarySvm {
        positive,
        negative,
        support,
        coef,
        rho: sol.rho,
        iterations: sol.iterations,
        converged: sol.converged,
    };
    (machine, report)
}

/// Trains one machine per pair of classes present, in class order, and
/// returns the KKT residuals of each.
pub fn train_svm_with_report(data: &Dataset, p: &SvmParams) -> Result<(SvmModel, Vec<KktReport>)> {
    p.validate()?;
    let counts = data.class_counts();
    let present: Vec<SeverityClass> = SeverityClass::ALL
        .into_iter()
        .filter(|c| counts[c.index()] > 0)
        .collect();
    if present.len() < 2 {
        warn!("SVM training data has a single class; the model predicts it for every input");
        return Ok((
            SvmModel {
                kernel: p.kernel,
                machines: Vec::new(),
                constant: Some(present[0]),
            },
            Vec::new(),
        ));
    }
    let weights = data.sample_weights(p.balanced);
    let mut pairs = Vec::new();
    for (a, &pc) in present.iter().enumerate() {
        for &nc in &present[a + 1..] {
            pairs.push((pc, nc));
        }
    }
    let trained: Vec<(BinarySvm, KktReport)> = pairs
        .par_iter()
        .map(|&(pc, nc)| train_pair(data, &weights, pc, nc, p))
        .collect();
    let (machines, reports) = trained.into_iter().unzip();
    Ok((
        SvmModel {
            kernel: p.kernel,
            machines,
            constant: None,
        },
        reports,
    ))
}

pub fn train_svm(data: &Dataset, p: &SvmParams) -> Result<SvmModel> {
    Ok(train_svm_with_report(data, p)?.0)
}
