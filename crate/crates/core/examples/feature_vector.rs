//! Builds 80-dimensional feature vectors from rate sequences of several
//! lengths and prints which slices were sampled.

use ctsev::features::{features_from_rates, sample_positions};

fn main() -> ctsev::Result<()> {
    for m in [3, 40, 41, 100] {
        let rates: Vec<(f64, f64)> = (0..m)
            .map(|i| {
                let t = i as f64 / m as f64;
                (0.2 + 0.3 * t, 0.4 * t)
            })
            .collect();
        let v = features_from_rates(&rates)?;
        let pos = sample_positions(m);
        println!("M = {m:>3}: {} sampled, first {:?}", pos.len(), &pos[..pos.len().min(6)]);
        let head: Vec<String> = v.pairs().take(3).map(|(l, r)| format!("({l:.3}, {r:.3})")).collect();
        println!("         pairs {} ...", head.join(" "));
    }
    Ok(())
}
