//! Shows which slices of a phantom pass the slice gate, with both external
//! and classical lung masks.

use ctsev::lung::{slice_gate, ClassicalLungParams, GateParams, MaskSource};
use ctsev::phantom::{generate_phantom, PhantomSpec};
use ctsev::wam::SeverityClass;

fn main() -> ctsev::Result<()> {
    let scan = generate_phantom(&PhantomSpec::new(SeverityClass::Mild, 0.1, 9))?;
    let gate = GateParams::default();
    let classical = MaskSource::Classical(ClassicalLungParams::default()).lung_masks(&scan.scan)?;
    let n = scan.scan.len();
    println!("min area for {0}x{0}: {1:.0}", scan.spec.size, gate.scaled_min_area(scan.spec.size * scan.spec.size));
    println!("slice  truth_area  truth_kept  classical_area  classical_kept");
    for i in 0..n {
        let t = &scan.lung_masks[i];
        let c = &classical[i];
        println!(
            "{i:>5}  {:>10}  {:>10}  {:>14}  {:>14}",
            t.count(),
            slice_gate(t, i, n, &gate),
            c.count(),
            slice_gate(c, i, n, &gate)
        );
    }
    Ok(())
}
