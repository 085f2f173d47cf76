//! Confusion matrices, macro-averaged metrics, stratified splits and the
//! report formats.

use std::fmt::Write as _;

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::wam::SeverityClass;

const K: usize = 4;

/// Rows are true classes, columns predicted classes, both Mild first.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfusionMatrix {
    pub counts: [[u64; K]; K],
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn get(&self, truth: SeverityClass, predicted: SeverityClass) -> u64 {
        self.counts[truth.index()][predicted.index()]
    }

    /// CSV grid with a header row of predicted classes.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("true\\pred");
        for c in SeverityClass::ALL {
            let _ = write!(s, ",{}", c.short_name());
        }
        s.push('\n');
        for t in SeverityClass::ALL {
            s.push_str(t.short_name());
            for p in SeverityClass::ALL {
                let _ = write!(s, ",{}", self.get(t, p));
            }
            s.push('\n');
        }
        s
    }
}

pub fn confusion_matrix(y_true: &[SeverityClass], y_pred: &[SeverityClass]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::InvalidParameter(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut cm = ConfusionMatrix::default();
    for (t, p) in y_true.iter().zip(y_pred) {
        cm.counts[t.index()][p.index()] += 1;
    }
    Ok(cm)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of true samples of the class.
    pub support: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub per_class: [ClassMetrics; K],
    pub macro_precision: f64,
    pub macro_recall: f64,
    /// Mean of the per-class F1 scores.
    pub macro_f1: f64,
    /// Harmonic mean of macro precision and macro recall.
    pub macro_f1_of_means: f64,
    pub accuracy: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn f1(p: f64, r: f64) -> f64 {
    ratio(2.0 * p * r, p + r)
}

/// Per-class and macro metrics; every 0/0 is taken as 0 and all four
/// classes enter the macro averages.
pub fn macro_metrics(cm: &ConfusionMatrix) -> MetricsReport {
    let mut per_class = [ClassMetrics::default(); K];
    for (k, m) in per_class.iter_mut().enumerate() {
        let tp = cm.counts[k][k] as f64;
        let col: u64 = (0..K).map(|t| cm.counts[t][k]).sum();
        let row: u64 = cm.counts[k].iter().sum();
        m.precision = ratio(tp, col as f64);
        m.recall = ratio(tp, row as f64);
        m.f1 = f1(m.precision, m.recall);
        m.support = row;
    }
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / K as f64;
    let macro_precision = mean(|m| m.precision);
    let macro_recall = mean(|m| m.recall);
    let diag: u64 = (0..K).map(|k| cm.counts[k][k]).sum();
    MetricsReport {
        per_class,
        macro_precision,
        macro_recall,
        macro_f1: mean(|m| m.f1),
        macro_f1_of_means: f1(macro_precision, macro_recall),
        accuracy: ratio(diag as f64, cm.total() as f64),
    }
}

pub fn evaluate(y_true: &[SeverityClass], y_pred: &[SeverityClass]) -> Result<(ConfusionMatrix, MetricsReport)> {
    let cm = confusion_matrix(y_true, y_pred)?;
    let report = macro_metrics(&cm);
    Ok((cm, report))
}

fn shuffled_by_class(y: &[SeverityClass], seed: u64) -> [Vec<usize>; K] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: [Vec<usize>; K] = Default::default();
    for (i, c) in y.iter().enumerate() {
        by_class[c.index()].push(i);
    }
    for idx in &mut by_class {
        idx.shuffle(&mut rng);
    }
    by_class
}

/// `k` (train, test) splits whose test folds partition the samples; each
/// class is dealt across folds in turn so per-fold class counts differ by
/// at most one.
pub fn stratified_k_fold(y: &[SeverityClass], k: usize, seed: u64) -> Result<Vec<(Vec<usize>, Vec<usize>)>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!("k-fold needs k >= 2, got {k}")));
    }
    if k > y.len() {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the {} samples", y.len())));
    }
    let by_class = shuffled_by_class(y, seed);
    for (c, idx) in SeverityClass::ALL.iter().zip(&by_class) {
        if !idx.is_empty() && idx.len() < k {
            warn!("class {c} has {} samples, fewer than {k} folds; stratification is best-effort", idx.len());
        }
    }
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut next = 0;
    for idx in &by_class {
        for &i in idx {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    Ok((0..k)
        .map(|f| {
            let mut test = folds[f].clone();
            test.sort_unstable();
            let mut train: Vec<usize> = (0..k).filter(|&g| g != f).flat_map(|g| folds[g].iter().copied()).collect();
            train.sort_unstable();
            (train, test)
        })
        .collect())
}

/// Stratified hold-out with `test_size` samples. Per-class test counts are
/// the proportional shares rounded by largest remainder (ties to the
/// smaller class).
pub fn stratified_split(y: &[SeverityClass], test_size: usize, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if test_size == 0 || test_size >= y.len() {
        return Err(Error::InvalidParameter(format!(
            "test size must lie in 1..{}, got {test_size}",
            y.len()
        )));
    }
    let by_class = shuffled_by_class(y, seed);
    let n = y.len();
    let mut quota = [0usize; K];
    let mut remainders = Vec::new();
    for k in 0..K {
        let exact = by_class[k].len() * test_size;
        quota[k] = exact / n;
        remainders.push((exact % n, k));
    }
    let assigned: usize = quota.iter().sum();
    remainders.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, k) in remainders.iter().take(test_size - assigned) {
        quota[k] += 1;
    }
    let mut train = Vec::new();
    let mut test = Vec::new();
    for k in 0..K {
        test.extend_from_slice(&by_class[k][..quota[k]]);
        train.extend_from_slice(&by_class[k][quota[k]..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Text table with one column per model and Precision / Recall / F1 score
/// rows (macro averages).
pub fn format_report_table(columns: &[(&str, &MetricsReport)]) -> String {
    let width = columns.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(8);
    let mut s = format!("{:<10}", "");
    for (name, _) in columns {
        let _ = write!(s, " {name:>width$}");
    }
    s.push('\n');
    let rows: [(&str, fn(&MetricsReport) -> f64); 3] = [
        ("Precision", |r| r.macro_precision),
        ("Recall", |r| r.macro_recall),
        ("F1 score", |r| r.macro_f1),
    ];
    for (label, get) in rows {
        let _ = write!(s, "{label:<10}");
        for (_, r) in columns {
            let _ = write!(s, " {:>width$.2}", get(r));
        }
        s.push('\n');
    }
    s
}

/// CSV form of [`format_report_table`], with the alternative macro-F1 and
/// accuracy as extra rows.
pub fn report_csv(columns: &[(&str, &MetricsReport)]) -> String {
    let mut s = String::from("metric");
    for (name, _) in columns {
        let _ = write!(s, ",{name}");
    }
    s.push('\n');
    let rows: [(&str, fn(&MetricsReport) -> f64); 5] = [
        ("Precision", |r| r.macro_precision),
        ("Recall", |r| r.macro_recall),
        ("F1 score", |r| r.macro_f1),
        ("F1 of macro P/R", |r| r.macro_f1_of_means),
        ("Accuracy", |r| r.accuracy),
    ];
    for (label, get) in rows {
        s.push_str(label);
        for (_, r) in columns {
            let _ = write!(s, ",{:.6}", get(r));
        }
        s.push('\n');
    }
    s
}

/// Per-class precision / recall / F1 / support as CSV.
pub fn per_class_csv(report: &MetricsReport) -> String {
    let mut s = String::from("class,precision,recall,f1,support\n");
    for (c, m) in SeverityClass::ALL.iter().zip(&report.per_class) {
        let _ = writeln!(s, "{},{:.6},{:.6},{:.6},{}", c.value(), m.precision, m.recall, m.f1, m.support);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use SeverityClass::*;

    #[test]
    fn perfect_predictions() {
        let y = [Mild, Moderate, Severe, Critical, Mild];
        let (cm, r) = evaluate(&y, &y).unwrap();
        assert_eq!(cm.total(), 5);
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.macro_precision, 1.0);
    }

    #[test]
    fn single_off_diagonal_sample() {
        let (cm, r) = evaluate(&[Moderate], &[Severe]).unwrap();
        assert_eq!(cm.get(Moderate, Severe), 1);
        assert_eq!(cm.total(), 1);
        assert_eq!(r.macro_f1, 0.0);
    }

    #[test]
    fn absent_classes_count_as_zero() {
        let (_, r) = evaluate(&[Mild, Mild], &[Mild, Mild]).unwrap();
        assert_eq!(r.per_class[0].f1, 1.0);
        assert_eq!(r.macro_f1, 0.25);
    }

    #[test]
    fn mismatched_lengths() {
        assert!(confusion_matrix(&[Mild], &[]).is_err());
    }

    #[test]
    fn five_folds_of_balanced_data() {
        let y: Vec<SeverityClass> = (0..100).map(|i| SeverityClass::ALL[i % 4]).collect();
        let folds = stratified_k_fold(&y, 5, 3).unwrap();
        for (train, test) in &folds {
            assert_eq!(test.len(), 20);
            assert_eq!(train.len(), 80);
            for c in SeverityClass::ALL {
                assert_eq!(test.iter().filter(|&&i| y[i] == c).count(), 5);
            }
        }
        assert_eq!(folds, stratified_k_fold(&y, 5, 3).unwrap());
    }

    #[test]
    fn holdout_shares() {
        let y: Vec<SeverityClass> = (0..200).map(|i| SeverityClass::ALL[i / 50]).collect();
        let (train, test) = stratified_split(&y, 50, 1).unwrap();
        assert_eq!((train.len(), test.len()), (150, 50));
        let per: Vec<usize> = SeverityClass::ALL
            .iter()
            .map(|&c| test.iter().filter(|&&i| y[i] == c).count())
            .collect();
        assert_eq!(per, vec![13, 13, 12, 12]);
    }

    #[test]
    fn table_has_paper_rows() {
        let (_, r) = evaluate(&[Mild], &[Mild]).unwrap();
        let t = format_report_table(&[("Ensemble", &r)]);
        let labels: Vec<&str> = t.lines().skip(1).map(|l| l[..10].trim()).collect();
        assert_eq!(labels, vec!["Precision", "Recall", "F1 score"]);
    }
}
