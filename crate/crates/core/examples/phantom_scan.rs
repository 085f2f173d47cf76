//! Generates one phantom scan, writes it to disk and reports the planted
//! involvement.
//!
//! cargo run --release --example phantom_scan -- [out_dir]

use ctsev::phantom::{generate_phantom, PhantomSpec};
use ctsev::wam::SeverityClass;

fn main() -> ctsev::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("ctsev_phantom"));
    let spec = PhantomSpec::new(SeverityClass::Severe, 0.62, 42);
    let scan = generate_phantom(&spec)?;
    let dir = scan.write(&out, "severe")?;
    println!("class        {}", scan.label);
    println!("target f     {:.3}", spec.involvement);
    println!("planted f    {:.3}", scan.planted_fraction());
    println!("slices       {} of {}x{}", scan.scan.len(), spec.size, spec.size);
    println!("written to   {}", dir.display());
    Ok(())
}
