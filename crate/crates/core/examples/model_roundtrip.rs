//! Saves a trained model, loads it back, and shows that a damaged file is
//! rejected.

use ctsev::classifiers::{model_bytes, model_from_bytes, train, ClassifierParams, Dataset, ModelKind};
use ctsev::wam::SeverityClass;

fn main() -> ctsev::Result<()> {
    let x: Vec<Vec<f64>> = (0..40)
        .map(|i| {
            let mut v = vec![0.0; 80];
            v.iter_mut().for_each(|f| *f = (i / 10) as f64 * 0.25 + 0.01 * (i % 10) as f64);
            v
        })
        .collect();
    let y: Vec<SeverityClass> = (0..40).map(|i| SeverityClass::ALL[i / 10]).collect();
    let data = Dataset::new(x, y)?;
    let model = train(ModelKind::GBoost, &data, &ClassifierParams::default())?;

    let bytes = model_bytes(&model);
    println!("model file: {} bytes, magic {:?}", bytes.len(), String::from_utf8_lossy(&bytes[..7]));
    let back = model_from_bytes(&bytes)?;
    println!("round trip identical: {}", back == model);

    let mut damaged = bytes.clone();
    damaged[20] ^= 0xff;
    match model_from_bytes(&damaged) {
        Ok(_) => println!("damaged file accepted"),
        Err(e) => println!("damaged file rejected: {e}"),
    }
    Ok(())
}
