//! Phantom corpus, stratified hold-out, ensemble against the WAM baseline.
//!
//! cargo run --release --example evaluate_holdout -- [per_class]

use ctsev::classifiers::{train, ClassifierParams, Dataset, ModelKind};
use ctsev::eval::{evaluate, format_report_table, stratified_split};
use ctsev::features::build_feature_vector;
use ctsev::infection::{process_scan_with_masks, InfectionParams};
use ctsev::lung::GateParams;
use ctsev::phantom::{corpus_specs, generate_phantom, CorpusParams};
use ctsev::wam::{scan_wam, WamWeights};

fn main() -> ctsev::Result<()> {
    let per_class = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut wam = Vec::new();
    for e in corpus_specs(&CorpusParams::new(per_class, 7))? {
        let p = generate_phantom(&e.spec)?;
        let results: Vec<_> = process_scan_with_masks(&p.scan, &p.lung_masks, &GateParams::default(), &InfectionParams::default(), false)?
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        x.push(build_feature_vector(&results)?.as_slice().to_vec());
        y.push(e.spec.class);
        wam.push(scan_wam(&results, &WamWeights::default())?.1);
    }
    let data = Dataset::new(x, y.clone())?;
    let (train_idx, test_idx) = stratified_split(&y, y.len() / 4, 1)?;
    let model = train(ModelKind::Ensemble, &data.subset(&train_idx)?, &ClassifierParams::default())?;

    let truth: Vec<_> = test_idx.iter().map(|&i| y[i]).collect();
    let ens: Vec<_> = test_idx
        .iter()
        .map(|&i| model.predict_class(&data.x()[i]))
        .collect::<ctsev::Result<_>>()?;
    let base: Vec<_> = test_idx.iter().map(|&i| wam[i]).collect();
    let (cm, ens_report) = evaluate(&truth, &ens)?;
    let (_, wam_report) = evaluate(&truth, &base)?;
    print!("{}", format_report_table(&[("Ensemble", &ens_report), ("WAM", &wam_report)]));
    print!("\nensemble confusion matrix\n{}", cm.to_csv());
    Ok(())
}
