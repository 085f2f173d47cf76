//! Trains every classifier on a small phantom corpus and reports training
//! accuracy.

use ctsev::classifiers::{train, ClassifierParams, Dataset, ModelKind};
use ctsev::features::build_feature_vector;
use ctsev::infection::{process_scan_with_masks, InfectionParams};
use ctsev::lung::GateParams;
use ctsev::phantom::{corpus_specs, generate_phantom, CorpusParams};

fn main() -> ctsev::Result<()> {
    let mut corpus = CorpusParams::new(10, 5);
    corpus.size = 128;
    corpus.n_slices = 15;
    let mut x = Vec::new();
    let mut y = Vec::new();
    for e in corpus_specs(&corpus)? {
        let p = generate_phantom(&e.spec)?;
        let results: Vec<_> = process_scan_with_masks(&p.scan, &p.lung_masks, &GateParams::default(), &InfectionParams::default(), false)?
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        x.push(build_feature_vector(&results)?.as_slice().to_vec());
        y.push(e.spec.class);
    }
    let data = Dataset::new(x, y)?;
    let params = ClassifierParams::default();
    for kind in ModelKind::ALL {
        let model = train(kind, &data, &params)?;
        println!("{kind:<9} training accuracy {:.3}", model.accuracy(&data)?);
    }
    Ok(())
}
