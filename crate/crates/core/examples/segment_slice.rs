//! Runs the infection pipeline on the middle slice of a phantom and compares
//! the result with the planted lesion mask.

use ctsev::infection::{segment_infection_traced, InfectionParams};
use ctsev::phantom::{generate_phantom, PhantomSpec};
use ctsev::wam::SeverityClass;

fn main() -> ctsev::Result<()> {
    let scan = generate_phantom(&PhantomSpec::new(SeverityClass::Moderate, 0.40, 3))?;
    let i = scan.scan.len() / 2;
    let lung = &scan.lung_masks[i];
    let trace = segment_infection_traced(&scan.scan.slices[i], lung, &InfectionParams::default())?;

    let planted = &scan.infection_masks[i];
    let found = &trace.infection_mask;
    let overlap = found.intersection(planted)?.count();
    println!("lung pixels        {}", lung.count());
    println!("band pixels        {}", trace.band_mask.count());
    println!("candidates         {}", trace.candidates.count());
    println!("vessel pixels      {}", trace.vessel_mask.count());
    println!("infection pixels   {} (planted {})", found.count(), planted.count());
    println!("dice               {:.3}", 2.0 * overlap as f64 / (found.count() + planted.count()) as f64);
    Ok(())
}
