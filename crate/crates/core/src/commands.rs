//! The command implementations behind the `ctsev` binary.
//!
//! Each command reads its inputs, writes its outputs plus a `config.txt`
//! echo of the resolved configuration, and returns a small summary. Outputs
//! depend only on inputs, configuration and seeds, never on the thread
//! count.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use crate::classifiers::{load_model, save_model, train, Dataset, ModelKind, TrainedModel};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::eval::{evaluate, format_report_table, per_class_csv, report_csv, stratified_k_fold, stratified_split};
use crate::features::{features_from_rates, read_feature_csv, write_feature_csv, FeatureRow};
use crate::imaging::io::{write_gray_png, write_mask_png};
use crate::infection::{process_scan_with_masks, SliceResult};
use crate::lung::{load_scan, natural_cmp, MaskSource};
use crate::phantom::{write_corpus, CorpusParams};
use crate::wam::{wam_from_rates, SeverityClass};

/// Runs `f` on a pool of `threads` workers, or on the global pool.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start {n} worker threads: {e}")))?
            .install(f),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

fn create_file(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let f = fs::File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    Ok(BufWriter::new(f))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut w = create_file(path)?;
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

fn open_file(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))
}

/// Writes the configuration echo into `dir`.
fn echo_config(cfg: &RunConfig, dir: &Path) -> Result<()> {
    info!("effective configuration:\n{}", cfg.to_kv_string());
    write_text(&dir.join("config.txt"), &cfg.to_kv_string())
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent()
        .filter(|p| !p.as_os_str().is_empty())
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn csv_err(what: &str) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::parse(what, e.to_string())
}

/// Per-slice outcome as stored in a rates CSV.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateRow {
    pub slice_index: usize,
    pub retained: bool,
    pub left_rate: f64,
    pub right_rate: f64,
}

impl From<&SliceResult> for RateRow {
    fn from(r: &SliceResult) -> Self {
        Self {
            slice_index: r.index,
            retained: r.retained,
            left_rate: r.left_rate,
            right_rate: r.right_rate,
        }
    }
}

/// Columns `slice_index,retained,left_rate,right_rate`; rates are written
/// with round-trip precision.
pub fn write_rates_csv<W: Write>(out: W, rows: &[RateRow]) -> Result<()> {
    let err = csv_err("rates CSV");
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["slice_index", "retained", "left_rate", "right_rate"]).map_err(&err)?;
    for r in rows {
        w.write_record([
            r.slice_index.to_string(),
            r.retained.to_string(),
            r.left_rate.to_string(),
            r.right_rate.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io("writing rates CSV", e))
}

pub fn read_rates_csv<R: std::io::Read>(input: R) -> Result<Vec<RateRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err("rates CSV"))?.iter().map(str::to_string).collect();
    if header != ["slice_index", "retained", "left_rate", "right_rate"] {
        return Err(Error::parse("rates CSV", format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err("rates CSV"))?;
        let bad = |e: String| Error::parse("rates CSV", format!("row {}: {e}", line + 1));
        let rate = |i: usize| -> Result<f64> {
            let v: f64 = rec[i].trim().parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?;
            if !(0.0..=1.0).contains(&v) {
                return Err(bad(format!("rate {v} outside [0, 1]")));
            }
            Ok(v)
        };
        rows.push(RateRow {
            slice_index: rec[0].trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            retained: rec[1].trim().parse().map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
            left_rate: rate(2)?,
            right_rate: rate(3)?,
        });
    }
    Ok(rows)
}

/// Where per-scan slice rates come from.
#[derive(Clone, Debug, PartialEq)]
pub enum ScanSource {
    /// Every subdirectory of `root` is one scan, named by the directory.
    /// Lung masks come from `mask_root/<id>/` when given, otherwise from
    /// the classical segmenter.
    ScanRoot { root: PathBuf, mask_root: Option<PathBuf> },
    /// Rates CSVs written by `segment`; the scan id is the parent directory
    /// name.
    Rates(Vec<PathBuf>),
}

/// Slice rates of one scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanRates {
    pub id: String,
    pub rows: Vec<RateRow>,
}

impl ScanRates {
    pub fn retained(&self) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.retained)
            .map(|r| (r.left_rate, r.right_rate))
            .collect()
    }
}

fn list_subdirs(root: &Path) -> Result<Vec<PathBuf>> {
    if !root.is_dir() {
        return Err(Error::ScanNotFound(root.to_path_buf()));
    }
    let mut dirs: Vec<PathBuf> = fs::read_dir(root)
        .map_err(|e| Error::io(format!("listing {}", root.display()), e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort_by(|a, b| natural_cmp(&a.file_name().unwrap().to_string_lossy(), &b.file_name().unwrap().to_string_lossy()));
    if dirs.is_empty() {
        return Err(Error::EmptyDirectory(root.to_path_buf()));
    }
    Ok(dirs)
}

fn dir_name(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.display().to_string())
}

fn segment_dir(scan_dir: &Path, masks: &MaskSource, cfg: &RunConfig) -> Result<Vec<SliceResult>> {
    let scan = load_scan(scan_dir)?;
    let lung = masks.lung_masks(&scan)?;
    Ok(process_scan_with_masks(&scan, &lung, &cfg.gate, &cfg.infection, false)?
        .into_iter()
        .map(|(r, _)| r)
        .collect())
}

/// Slice rates of every scan of `source`, in scan order.
pub fn collect_rates(source: &ScanSource, cfg: &RunConfig) -> Result<Vec<ScanRates>> {
    match source {
        ScanSource::ScanRoot { root, mask_root } => list_subdirs(root)?
            .par_iter()
            .map(|dir| {
                let id = dir_name(dir);
                let masks = match mask_root {
                    Some(m) => MaskSource::ExternalDirectory(m.join(&id)),
                    None => MaskSource::Classical(cfg.lung),
                };
                let results = segment_dir(dir, &masks, cfg)?;
                Ok(ScanRates {
                    id,
                    rows: results.iter().map(RateRow::from).collect(),
                })
            })
            .collect(),
        ScanSource::Rates(files) => files
            .iter()
            .map(|f| {
                Ok(ScanRates {
                    id: dir_name(&parent_dir(f).canonicalize().unwrap_or_else(|_| parent_dir(f))),
                    rows: read_rates_csv(open_file(f)?)?,
                })
            })
            .collect(),
    }
}

/// Reads `id` and `class` (or `label`) columns from a CSV such as a phantom
/// manifest.
pub fn read_labels(path: &Path) -> Result<HashMap<String, SeverityClass>> {
    let mut r = csv::Reader::from_reader(open_file(path)?);
    let header = r.headers().map_err(csv_err("labels CSV"))?.clone();
    let col = |names: &[&str]| header.iter().position(|h| names.contains(&h.trim()));
    let (id_col, class_col) = match (col(&["id"]), col(&["class", "label"])) {
        (Some(i), Some(c)) => (i, c),
        _ => return Err(Error::parse("labels CSV", "needs an id and a class column")),
    };
    let mut labels = HashMap::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err("labels CSV"))?;
        labels.insert(rec[id_col].to_string(), rec[class_col].parse()?);
    }
    Ok(labels)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentArgs {
    pub scan: PathBuf,
    /// External lung masks; classical segmentation when absent.
    pub masks: Option<PathBuf>,
    pub out: PathBuf,
    pub write_masks: bool,
    pub debug_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentSummary {
    pub slices: usize,
    pub retained: usize,
}

fn stem(name: &str) -> &str {
    Path::new(name).file_stem().and_then(|s| s.to_str()).unwrap_or(name)
}

/// Writes `rates.csv`, optionally `infection_masks/<slice>` and debug PNGs.
pub fn cmd_segment(args: &SegmentArgs, cfg: &RunConfig) -> Result<SegmentSummary> {
    cfg.validate()?;
    let scan = load_scan(&args.scan)?;
    let source = match &args.masks {
        Some(d) => MaskSource::ExternalDirectory(d.clone()),
        None => MaskSource::Classical(cfg.lung),
    };
    let lung = source.lung_masks(&scan)?;
    let traced = process_scan_with_masks(&scan, &lung, &cfg.gate, &cfg.infection, args.debug_dir.is_some())?;
    create_dir(&args.out)?;
    let rows: Vec<RateRow> = traced.iter().map(|(r, _)| RateRow::from(r)).collect();
    write_rates_csv(create_file(&args.out.join("rates.csv"))?, &rows)?;
    if args.write_masks {
        let dir = args.out.join("infection_masks");
        create_dir(&dir)?;
        for ((r, _), name) in traced.iter().zip(&scan.names) {
            write_mask_png(&r.infection_mask, &dir.join(stem(name)).with_extension("png"))?;
        }
    }
    if let Some(debug) = &args.debug_dir {
        create_dir(debug)?;
        for ((_, trace), name) in traced.iter().zip(&scan.names) {
            if let Some(t) = trace {
                let s = stem(name);
                write_gray_png(&t.seg_img, &debug.join(format!("{s}_seg_img.png")))?;
                write_gray_png(&t.ct_hyper, &debug.join(format!("{s}_ct_hyper.png")))?;
                write_mask_png(&t.vessel_mask, &debug.join(format!("{s}_vessel_mask.png")))?;
                write_mask_png(&t.infection_mask, &debug.join(format!("{s}_infection_mask.png")))?;
            }
        }
    }
    echo_config(cfg, &args.out)?;
    let retained = rows.iter().filter(|r| r.retained).count();
    if retained == 0 {
        warn!("{}: no slice passed the gate", scan.patient_id);
    }
    Ok(SegmentSummary {
        slices: rows.len(),
        retained,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeaturizeArgs {
    pub source: ScanSource,
    /// CSV with `id` and `class` columns; adds a label column.
    pub labels: Option<PathBuf>,
    pub out: PathBuf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeaturizeSummary {
    pub rows: usize,
    /// `(scan id, reason)` of scans left out of the CSV.
    pub excluded: Vec<(String, String)>,
}

/// Path of the exclusions report written next to a feature CSV.
pub fn exclusions_path(features: &Path) -> PathBuf {
    let stem = features.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    parent_dir(features).join(format!("{stem}_exclusions.csv"))
}

/// Writes the feature CSV and its exclusions report.
pub fn cmd_featurize(args: &FeaturizeArgs, cfg: &RunConfig) -> Result<FeaturizeSummary> {
    cfg.validate()?;
    let labels = args.labels.as_deref().map(read_labels).transpose()?;
    let scans = collect_rates(&args.source, cfg)?;
    let mut rows = Vec::new();
    let mut excluded = Vec::new();
    for s in &scans {
        let label = match &labels {
            Some(l) => Some(
                *l.get(&s.id)
                    .ok_or_else(|| Error::parse("labels CSV", format!("no label for scan {}", s.id)))?,
            ),
            None => None,
        };
        let retained = s.retained();
        if retained.is_empty() {
            warn!("{}: no retained slices, excluded", s.id);
            excluded.push((s.id.clone(), "no retained slices".to_string()));
            continue;
        }
        rows.push(FeatureRow {
            id: s.id.clone(),
            features: features_from_rates(&retained)?,
            label,
        });
    }
    write_feature_csv(create_file(&args.out)?, &rows)?;
    let mut w = csv::Writer::from_writer(create_file(&exclusions_path(&args.out))?);
    let err = csv_err("exclusions CSV");
    w.write_record(["id", "reason"]).map_err(&err)?;
    for (id, reason) in &excluded {
        w.write_record([id, reason]).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io("writing exclusions CSV", e))?;
    echo_config(cfg, &parent_dir(&args.out))?;
    info!("{} feature rows, {} scans excluded", rows.len(), excluded.len());
    Ok(FeaturizeSummary {
        rows: rows.len(),
        excluded,
    })
}

pub fn load_features(path: &Path) -> Result<Vec<FeatureRow>> {
    read_feature_csv(open_file(path)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainArgs {
    pub features: PathBuf,
    pub kind: ModelKind,
    pub out: PathBuf,
}

/// Trains on every labeled row and writes the model file.
pub fn cmd_train(args: &TrainArgs, cfg: &RunConfig) -> Result<TrainedModel> {
    cfg.validate()?;
    let data = Dataset::from_rows(&load_features(&args.features)?)?;
    info!("training {} on {} rows, class counts {:?}", args.kind, data.len(), data.class_counts());
    let model = train(args.kind, &data, &cfg.classifiers)?;
    create_dir(&parent_dir(&args.out))?;
    save_model(&model, &args.out)?;
    echo_config(cfg, &parent_dir(&args.out))?;
    Ok(model)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictArgs {
    pub model: PathBuf,
    pub features: PathBuf,
    pub out: PathBuf,
}

/// Writes `id,class,score_1..score_4`; returns the predicted classes.
pub fn cmd_predict(args: &PredictArgs) -> Result<Vec<(String, SeverityClass)>> {
    let model = load_model(&args.model)?;
    let rows = load_features(&args.features)?;
    let preds = rows
        .par_iter()
        .map(|r| model.predict(r.features.as_slice()))
        .collect::<Result<Vec<_>>>()?;
    let err = csv_err("predictions CSV");
    let mut w = csv::Writer::from_writer(create_file(&args.out)?);
    w.write_record(["id", "class", "score_1", "score_2", "score_3", "score_4"])
        .map_err(&err)?;
    for (r, p) in rows.iter().zip(&preds) {
        let mut rec = vec![r.id.clone(), p.class.value().to_string()];
        rec.extend(p.scores.iter().map(|s| format!("{s:.6}")));
        w.write_record(&rec).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io("writing predictions CSV", e))?;
    Ok(rows.iter().map(|r| r.id.clone()).zip(preds.iter().map(|p| p.class)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    /// Stratified hold-out of `test_size` rows.
    Holdout { test_size: usize },
    /// Stratified k-fold with pooled out-of-fold predictions.
    KFold { k: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvaluateArgs {
    pub features: PathBuf,
    pub models: Vec<ModelKind>,
    pub protocol: Protocol,
    pub split_seed: u64,
    /// `wam` output to score as an extra column on the same rows.
    pub wam: Option<PathBuf>,
    pub out_dir: PathBuf,
}

/// Macro metrics per column, in output order.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluateSummary {
    pub columns: Vec<(String, crate::eval::MetricsReport)>,
}

fn display_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Ert => "ERT",
        ModelKind::GBoost => "GBoost",
        ModelKind::Svm => "SVM",
        ModelKind::Knn => "kNN",
        ModelKind::LogReg => "LogReg",
        ModelKind::Ensemble => "Ensemble",
    }
}

fn read_wam_classes(path: &Path) -> Result<HashMap<String, SeverityClass>> {
    read_labels(path)
}

/// Trains and scores each model under the protocol. Writes `report.txt`,
/// `report.csv`, `confusion_<name>.csv`, `per_class_<name>.csv`,
/// `test_ids.csv` and, for hold-out, the trained models under `models/`.
pub fn cmd_evaluate(args: &EvaluateArgs, cfg: &RunConfig) -> Result<EvaluateSummary> {
    cfg.validate()?;
    if args.models.is_empty() && args.wam.is_none() {
        return Err(Error::InvalidParameter("nothing to evaluate: no models and no WAM file".into()));
    }
    let rows = load_features(&args.features)?;
    let data = Dataset::from_rows(&rows)?;
    let y = data.y().to_vec();
    let splits = match args.protocol {
        Protocol::Holdout { test_size } => vec![stratified_split(&y, test_size, args.split_seed)?],
        Protocol::KFold { k } => stratified_k_fold(&y, k, args.split_seed)?,
    };
    create_dir(&args.out_dir)?;
    let tested: Vec<usize> = {
        let mut t: Vec<usize> = splits.iter().flat_map(|(_, te)| te.iter().copied()).collect();
        t.sort_unstable();
        t
    };
    let truth: Vec<SeverityClass> = tested.iter().map(|&i| y[i]).collect();
    let mut ids = String::from("id,class\n");
    for &i in &tested {
        ids.push_str(&format!("{},{}\n", rows[i].id, y[i].value()));
    }
    write_text(&args.out_dir.join("test_ids.csv"), &ids)?;

    let mut columns = Vec::new();
    for &kind in &args.models {
        let mut pred = vec![SeverityClass::Mild; y.len()];
        for (train_idx, test_idx) in &splits {
            let model = train(kind, &data.subset(train_idx)?, &cfg.classifiers)?;
            for &i in test_idx {
                pred[i] = model.predict_class(&data.x()[i])?;
            }
            if matches!(args.protocol, Protocol::Holdout { .. }) {
                let dir = args.out_dir.join("models");
                create_dir(&dir)?;
                save_model(&model, &dir.join(format!("{}.model", kind.name())))?;
            }
        }
        let pred: Vec<SeverityClass> = tested.iter().map(|&i| pred[i]).collect();
        columns.push((display_name(kind).to_string(), evaluate(&truth, &pred)?));
    }
    if let Some(path) = &args.wam {
        let wam = read_wam_classes(path)?;
        let pred = tested
            .iter()
            .map(|&i| {
                wam.get(&rows[i].id)
                    .copied()
                    .ok_or_else(|| Error::parse("WAM CSV", format!("no WAM class for scan {}", rows[i].id)))
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push(("WAM".to_string(), evaluate(&truth, &pred)?));
    }

    let reports: Vec<(&str, &crate::eval::MetricsReport)> = columns.iter().map(|(n, (_, r))| (n.as_str(), r)).collect();
    let mut text = format_report_table(&reports);
    text.push_str("\nF1 of macro precision and recall:\n");
    for (n, r) in &reports {
        text.push_str(&format!("  {n}: {:.4}\n", r.macro_f1_of_means));
    }
    write_text(&args.out_dir.join("report.txt"), &text)?;
    write_text(&args.out_dir.join("report.csv"), &report_csv(&reports))?;
    for (name, (cm, r)) in &columns {
        let file = name.to_ascii_lowercase();
        write_text(&args.out_dir.join(format!("confusion_{file}.csv")), &cm.to_csv())?;
        write_text(&args.out_dir.join(format!("per_class_{file}.csv")), &per_class_csv(r))?;
    }
    echo_config(cfg, &args.out_dir)?;
    info!("\n{text}");
    Ok(EvaluateSummary {
        columns: columns.into_iter().map(|(n, (_, r))| (n, r)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WamArgs {
    pub source: ScanSource,
    pub out: PathBuf,
}

/// Writes `id,mean_score,class` for every scan with retained slices.
pub fn cmd_wam(args: &WamArgs, cfg: &RunConfig) -> Result<Vec<(String, f64, SeverityClass)>> {
    cfg.validate()?;
    let scans = collect_rates(&args.source, cfg)?;
    let mut out = Vec::new();
    for s in &scans {
        let retained = s.retained();
        if retained.is_empty() {
            warn!("{}: no retained slices, no WAM class", s.id);
            continue;
        }
        let (score, class) = wam_from_rates(&retained, &cfg.wam)?;
        out.push((s.id.clone(), score, class));
    }
    let err = csv_err("WAM CSV");
    let mut w = csv::Writer::from_writer(create_file(&args.out)?);
    w.write_record(["id", "mean_score", "class"]).map_err(&err)?;
    for (id, score, class) in &out {
        w.write_record([id.clone(), score.to_string(), class.value().to_string()])
            .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io("writing WAM CSV", e))?;
    echo_config(cfg, &parent_dir(&args.out))?;
    Ok(out)
}

/// Generates a labeled corpus under `out`: `scans/`, `lung_masks/`,
/// `infection_masks/`, `manifest.csv` and `phantom.txt`.
pub fn cmd_phantom(params: &CorpusParams, out: &Path) -> Result<usize> {
    let entries = write_corpus(params, out)?;
    let echo = format!(
        "per_class = {}\nseed = {}\nn_slices = {}\nsize = {}\nvessels_per_lung = {}\nnoise = {}\n",
        params.per_class, params.seed, params.n_slices, params.size, params.vessels_per_lung, params.noise
    );
    write_text(&out.join("phantom.txt"), &echo)?;
    info!("wrote {} phantom scans to {}", entries.len(), out.display());
    Ok(entries.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rates_round_trip() {
        let rows = vec![
            RateRow {
                slice_index: 0,
                retained: false,
                left_rate: 0.0,
                right_rate: 0.0,
            },
            RateRow {
                slice_index: 1,
                retained: true,
                left_rate: 0.1 + 0.2,
                right_rate: 1.0 / 3.0,
            },
        ];
        let mut buf = Vec::new();
        write_rates_csv(&mut buf, &rows).unwrap();
        assert_eq!(read_rates_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn rates_outside_unit_interval_rejected() {
        let text = "slice_index,retained,left_rate,right_rate\n0,true,1.5,0\n";
        assert!(read_rates_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn exclusions_next_to_features() {
        assert_eq!(exclusions_path(Path::new("out/f.csv")), PathBuf::from("out/f_exclusions.csv"));
        assert_eq!(exclusions_path(Path::new("f.csv")), PathBuf::from("./f_exclusions.csv"));
    }
}
