//! Fixed-length per-scan feature vectors built from per-slice side rates,
//! plus the feature CSV format shared by the featurize/train/predict stages.
//!
//! A scan contributes 40 `(left, right)` pairs. Long scans are split into 40
//! contiguous regions and the lower-median slice of each region is taken;
//! short scans keep every slice and pad the tail with the mean pair.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::infection::SliceResult;
use crate::wam::SeverityClass;

pub const N_REGIONS: usize = 40;
pub const FEATURE_DIM: usize = 2 * N_REGIONS;

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    values: [f64; FEATURE_DIM],
}

impl FeatureVector {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.len() != FEATURE_DIM {
            return Err(Error::DimensionMismatch {
                expected: FEATURE_DIM,
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::OutOfRange(format!("feature value {v} not in [0, 1]")));
        }
        let mut out = [0.0; FEATURE_DIM];
        out.copy_from_slice(values);
        Ok(Self { values: out })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// The 40 `(left, right)` pairs in order.
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.chunks_exact(2).map(|p| (p[0], p[1]))
    }
}

/// Positions (into the retained sequence of length `m`) that feed the
/// feature vector: all of them when `m <= 40`, else one lower median per region.
pub fn sample_positions(m: usize) -> Vec<usize> {
    if m <= N_REGIONS {
        return (0..m).collect();
    }
    (0..N_REGIONS)
        .map(|r| {
            let start = r * m / N_REGIONS;
            let end = (r + 1) * m / N_REGIONS;
            start + (end - start - 1) / 2
        })
        .collect()
}

/// Feature vector from the `(left, right)` rates of retained slices, in slice order.
pub fn features_from_rates(rates: &[(f64, f64)]) -> Result<FeatureVector> {
    if rates.is_empty() {
        return Err(Error::EmptyScan);
    }
    if let Some(&(l, r)) = rates
        .iter()
        .find(|(l, r)| !(0.0..=1.0).contains(l) || !(0.0..=1.0).contains(r))
    {
        return Err(Error::OutOfRange(format!("rate pair ({l}, {r}) not in [0, 1]")));
    }
    let mut values = Vec::with_capacity(FEATURE_DIM);
    for p in sample_positions(rates.len()) {
        values.extend([rates[p].0, rates[p].1]);
    }
    if rates.len() < N_REGIONS {
        let n = rates.len() as f64;
        let avg_l = (rates.iter().map(|p| p.0).sum::<f64>() / n).clamp(0.0, 1.0);
        let avg_r = (rates.iter().map(|p| p.1).sum::<f64>() / n).clamp(0.0, 1.0);
        while values.len() < FEATURE_DIM {
            values.extend([avg_l, avg_r]);
        }
    }
    FeatureVector::new(&values)
}

/// `(left, right)` rates of the retained slices.
pub fn retained_rates(results: &[SliceResult]) -> Vec<(f64, f64)> {
    results
        .iter()
        .filter(|r| r.retained)
        .map(|r| (r.left_rate, r.right_rate))
        .collect()
}

pub fn build_feature_vector(results: &[SliceResult]) -> Result<FeatureVector> {
    features_from_rates(&retained_rates(results))
}

/// One row of the feature CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub features: FeatureVector,
    pub label: Option<SeverityClass>,
}

pub fn feature_header(with_label: bool) -> Vec<String> {
    let mut h = vec!["id".to_string()];
    for i in 0..N_REGIONS {
        h.push(format!("l{i}"));
        h.push(format!("r{i}"));
    }
    if with_label {
        h.push("label".into());
    }
    h
}

fn csv_err(e: csv::Error) -> Error {
    Error::parse("CSV", e.to_string())
}

/// Writes a header and one row per scan. The label column is present iff
/// every row carries a label.
pub fn write_feature_csv<W: Write>(out: W, rows: &[FeatureRow]) -> Result<()> {
    let with_label = !rows.is_empty() && rows.iter().all(|r| r.label.is_some());
    if !with_label && rows.iter().any(|r| r.label.is_some()) {
        return Err(Error::InvalidParameter("either all feature rows carry a label or none does".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(feature_header(with_label)).map_err(csv_err)?;
    for row in rows {
        let mut rec = vec![row.id.clone()];
        rec.extend(row.features.as_slice().iter().map(f64::to_string));
        if let Some(label) = row.label {
            rec.push(label.value().to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("writing feature CSV", e))
}

pub fn read_feature_csv<R: Read>(input: R) -> Result<Vec<FeatureRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let with_label = if header == feature_header(true) {
        true
    } else if header == feature_header(false) {
        false
    } else {
        return Err(Error::parse(
            "feature CSV",
            format!("expected id, l0, r0, ..., l39, r39[, label]; got {} columns", header.len()),
        ));
    };
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let bad = |reason: String| Error::parse("feature CSV", format!("row {}: {reason}", line + 1));
        let values = (1..=FEATURE_DIM)
            .map(|i| rec[i].trim().parse::<f64>().map_err(|e| bad(format!("column {}: {e}", header[i]))))
            .collect::<Result<Vec<f64>>>()?;
        let label = if with_label {
            Some(rec[FEATURE_DIM + 1].parse::<SeverityClass>().map_err(|e| bad(e.to_string()))?)
        } else {
            None
        };
        rows.push(FeatureRow {
            id: rec[0].to_string(),
            features: FeatureVector::new(&values).map_err(|e| bad(e.to_string()))?,
            label,
        });
    }
    Ok(rows)
}
