//! Regular versus singular curves through the variational endpoint Jacobian.

use microreg::endpoint::{classify_curve, ClassifyOptions, ControlCurve};
use microreg::models;

fn main() -> microreg::Result<()> {
    let opts = ClassifyOptions::default();
    let cases = [
        ("heisenberg", ["t", "0"]),
        ("martinet", ["t", "0"]),
        ("martinet", ["t", "t"]),
        ("engel", ["0", "t"]),
        ("engel", ["t", "t"]),
    ];
    for (name, controls) in cases {
        let dist = models::bundled(name)?.dist;
        let curve = ControlCurve::polynomial(&controls)?;
        let report = classify_curve(&dist, &curve, &vec![0.0; dist.dim()], &opts)?;
        println!(
            "{name:>10} ({}, {}): {:?}  sigma_min = {:.3e}, scale = {:.3e}",
            controls[0], controls[1], report.verdict, report.sigma_min, report.scale
        );
    }
    Ok(())
}
