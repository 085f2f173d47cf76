//! Run configuration: every tunable of the pipeline and the classifiers in
//! one flat `key = value` namespace.
//!
//! A configuration file holds one `key = value` pair per line; `#` starts a
//! comment. Command-line overrides are applied afterwards with
//! [`RunConfig::set`], so flags win over the file.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::classifiers::{ClassifierParams, Kernel, KnnK, Member};
use crate::error::{Error, Result};
use crate::imaging::{HyperbolizationParams, StructuringElement};
use crate::infection::InfectionParams;
use crate::lung::{ClassicalLungParams, GateParams};
use crate::wam::WamWeights;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub infection: InfectionParams,
    pub lung: ClassicalLungParams,
    pub gate: GateParams,
    pub wam: WamWeights,
    pub classifiers: ClassifierParams,
    /// Worker cap; `None` lets rayon decide. Never affects results.
    pub threads: Option<usize>,
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::InvalidParameter(format!("{key} = {value:?}: {e}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::InvalidParameter(format!("{key} = {value:?}: expected true or false"))),
    }
}

fn parse_fraction(key: &str, value: &str) -> Result<(usize, usize)> {
    let (n, d) = value
        .split_once('/')
        .ok_or_else(|| Error::InvalidParameter(format!("{key} = {value:?}: expected a fraction like 1/3")))?;
    Ok((num(key, n)?, num(key, d)?))
}

fn parse_kernel_size(key: &str, value: &str) -> Result<StructuringElement> {
    let (w, h) = value
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::InvalidParameter(format!("{key} = {value:?}: expected WxH")))?;
    StructuringElement::rect(num(key, w)?, num(key, h)?)
}

impl RunConfig {
    /// Sets one key; unknown keys and malformed values are usage errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let inf = &mut self.infection;
        let cls = &mut self.classifiers;
        match key {
            "hyperbolization.c" => inf.hyperbolization = HyperbolizationParams::new(num(key, value)?)?,
            "infection.sigma" => inf.sigma = num(key, value)?,
            "infection.band_lo" => inf.band_lo = num(key, value)?,
            "infection.band_hi" => inf.band_hi = num(key, value)?,
            "infection.noise_min_area" => inf.noise_min_area = num(key, value)?,
            "infection.vessel_min_area" => inf.vessel_min_area = num(key, value)?,
            "infection.kernel" => inf.kernel = parse_kernel_size(key, value)?,
            "infection.otsu_min_variance" => inf.otsu_min_variance = num(key, value)?,
            "lung.air_threshold" => self.lung.air_threshold = num(key, value)?,
            "gate.min_mask_area" => self.gate.min_mask_area = num(key, value)?,
            "gate.band_start" => self.gate.band_start = parse_fraction(key, value)?,
            "gate.band_end" => self.gate.band_end = parse_fraction(key, value)?,
            "gate.large_area_fraction" => self.gate.large_area_fraction = num(key, value)?,
            "gate.reference_area" => self.gate.reference_area = num(key, value)?,
            "wam.right" => self.wam.right = num(key, value)?,
            "wam.left" => self.wam.left = num(key, value)?,
            "seed" => {
                let s = num(key, value)?;
                cls.ert.seed = s;
                cls.gboost.seed = s;
            }
            "balanced" => {
                let b = parse_bool(key, value)?;
                cls.ert.balanced = b;
                cls.gboost.balanced = b;
                cls.svm.balanced = b;
                cls.logreg.balanced = b;
            }
            "ert.n_trees" => cls.ert.n_trees = num(key, value)?,
            "ert.k" => cls.ert.k = num(key, value)?,
            "ert.min_samples_split" => cls.ert.min_samples_split = num(key, value)?,
            "ert.balanced" => cls.ert.balanced = parse_bool(key, value)?,
            "ert.seed" => cls.ert.seed = num(key, value)?,
            "gboost.n_rounds" => cls.gboost.n_rounds = num(key, value)?,
            "gboost.learning_rate" => cls.gboost.learning_rate = num(key, value)?,
            "gboost.max_depth" => cls.gboost.max_depth = num(key, value)?,
            "gboost.min_samples_split" => cls.gboost.min_samples_split = num(key, value)?,
            "gboost.balanced" => cls.gboost.balanced = parse_bool(key, value)?,
            "gboost.seed" => cls.gboost.seed = num(key, value)?,
            "svm.kernel" => {
                cls.svm.kernel = match value.trim().to_ascii_lowercase().as_str() {
                    "linear" => Kernel::Linear,
                    "rbf" => match cls.svm.kernel {
                        Kernel::Rbf { gamma } => Kernel::Rbf { gamma },
                        Kernel::Linear => Kernel::Rbf { gamma: 0.1 },
                    },
                    _ => return Err(Error::InvalidParameter(format!("{key} = {value:?}: expected linear or rbf"))),
                }
            }
            "svm.gamma" => cls.svm.kernel = Kernel::Rbf { gamma: num(key, value)? },
            "svm.c" => cls.svm.c = num(key, value)?,
            "svm.tolerance" => cls.svm.tolerance = num(key, value)?,
            "svm.max_iter" => cls.svm.max_iter = num(key, value)?,
            "svm.balanced" => cls.svm.balanced = parse_bool(key, value)?,
            "knn.k" => cls.knn_k = KnnK(num(key, value)?),
            "logreg.learning_rate" => cls.logreg.learning_rate = num(key, value)?,
            "logreg.epochs" => cls.logreg.epochs = num(key, value)?,
            "logreg.l2" => cls.logreg.l2 = num(key, value)?,
            "logreg.balanced" => cls.logreg.balanced = parse_bool(key, value)?,
            "ensemble.priority" => {
                let names: Vec<&str> = value.split(',').collect();
                if names.len() != 3 {
                    return Err(Error::InvalidParameter(format!(
                        "{key} = {value:?}: expected three comma-separated members"
                    )));
                }
                cls.ensemble.priority = [
                    Member::from_name(names[0])?,
                    Member::from_name(names[1])?,
                    Member::from_name(names[2])?,
                ];
            }
            "threads" => self.threads = Some(num(key, value)?),
            _ => return Err(Error::InvalidParameter(format!("unknown configuration key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` assignments in order.
    pub fn apply<'a>(&mut self, assignments: impl IntoIterator<Item = &'a str>) -> Result<()> {
        for a in assignments {
            let (k, v) = a
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got {a:?}")))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_kv_str(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected key = value", n + 1)))?;
            cfg.set(k, v)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::from_kv_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.infection.validate()?;
        self.gate.validate()?;
        self.wam.validate()?;
        self.classifiers.ensemble.validate()?;
        if !(self.lung.air_threshold > 0.0 && self.lung.air_threshold < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lung.air_threshold must lie in (0, 1), got {}",
                self.lung.air_threshold
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter("threads must be at least 1".into()));
        }
        Ok(())
    }

    /// Every result-affecting key with its resolved value, one per line, in
    /// a form [`RunConfig::from_kv_str`] reads back. The thread cap is left
    /// out since it never changes outputs.
    pub fn to_kv_string(&self) -> String {
        let inf = &self.infection;
        let c = &self.classifiers;
        let g = &self.gate;
        let (kernel, gamma) = match c.svm.kernel {
            Kernel::Linear => ("linear", None),
            Kernel::Rbf { gamma } => ("rbf", Some(gamma)),
        };
        let mut pairs: Vec<(&str, String)> = vec![
            ("hyperbolization.c", inf.hyperbolization.c().to_string()),
            ("infection.sigma", inf.sigma.to_string()),
            ("infection.band_lo", inf.band_lo.to_string()),
            ("infection.band_hi", inf.band_hi.to_string()),
            ("infection.noise_min_area", inf.noise_min_area.to_string()),
            ("infection.vessel_min_area", inf.vessel_min_area.to_string()),
            ("infection.kernel", format!("{}x{}", inf.kernel.width(), inf.kernel.height())),
            ("infection.otsu_min_variance", inf.otsu_min_variance.to_string()),
            ("lung.air_threshold", self.lung.air_threshold.to_string()),
            ("gate.min_mask_area", g.min_mask_area.to_string()),
            ("gate.band_start", format!("{}/{}", g.band_start.0, g.band_start.1)),
            ("gate.band_end", format!("{}/{}", g.band_end.0, g.band_end.1)),
            ("gate.large_area_fraction", g.large_area_fraction.to_string()),
            ("gate.reference_area", g.reference_area.to_string()),
            ("wam.right", self.wam.right.to_string()),
            ("wam.left", self.wam.left.to_string()),
            ("ert.n_trees", c.ert.n_trees.to_string()),
            ("ert.k", c.ert.k.to_string()),
            ("ert.min_samples_split", c.ert.min_samples_split.to_string()),
            ("ert.balanced", c.ert.balanced.to_string()),
            ("ert.seed", c.ert.seed.to_string()),
            ("gboost.n_rounds", c.gboost.n_rounds.to_string()),
            ("gboost.learning_rate", c.gboost.learning_rate.to_string()),
            ("gboost.max_depth", c.gboost.max_depth.to_string()),
            ("gboost.min_samples_split", c.gboost.min_samples_split.to_string()),
            ("gboost.balanced", c.gboost.balanced.to_string()),
            ("gboost.seed", c.gboost.seed.to_string()),
            ("svm.kernel", kernel.to_string()),
        ];
        if let Some(gamma) = gamma {
            pairs.push(("svm.gamma", gamma.to_string()));
        }
        pairs.extend([
            ("svm.c", c.svm.c.to_string()),
            ("svm.tolerance", c.svm.tolerance.to_string()),
            ("svm.max_iter", c.svm.max_iter.to_string()),
            ("svm.balanced", c.svm.balanced.to_string()),
            ("knn.k", c.knn_k.0.to_string()),
            ("logreg.learning_rate", c.logreg.learning_rate.to_string()),
            ("logreg.epochs", c.logreg.epochs.to_string()),
            ("logreg.l2", c.logreg.l2.to_string()),
            ("logreg.balanced", c.logreg.balanced.to_string()),
            ("ensemble.priority", c.ensemble.priority.map(Member::name).join(",")),
        ]);
        let mut s = String::new();
        for (k, v) in pairs {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}
