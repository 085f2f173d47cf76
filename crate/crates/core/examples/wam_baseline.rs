//! Scores a few phantoms with the weighted average method.

use ctsev::infection::{process_scan_with_masks, InfectionParams};
use ctsev::lung::GateParams;
use ctsev::phantom::{generate_phantom, PhantomSpec};
use ctsev::wam::{scan_wam, slice_wam, SeverityClass, WamWeights};

fn main() -> ctsev::Result<()> {
    let w = WamWeights::default();
    println!("slice_wam(left 0.30, right 0.60) = {}", slice_wam(0.30, 0.60, &w)?);
    for (class, f) in [
        (SeverityClass::Mild, 0.15),
        (SeverityClass::Moderate, 0.35),
        (SeverityClass::Severe, 0.60),
        (SeverityClass::Critical, 0.85),
    ] {
        let p = generate_phantom(&PhantomSpec::new(class, f, 11))?;
        let results: Vec<_> = process_scan_with_masks(&p.scan, &p.lung_masks, &GateParams::default(), &InfectionParams::default(), false)?
            .into_iter()
            .map(|(r, _)| r)
            .collect();
        let (score, predicted) = scan_wam(&results, &w)?;
        println!("{class:<9} f={f:.2}  mean score {score:.3}  WAM class {predicted}");
    }
    Ok(())
}
