//! Deforming a regular curve while Newton keeps its endpoint fixed.

use microreg::endpoint::{deform_fixed_endpoints, endpoint, Bump, ClassifyOptions, ControlCurve};
use microreg::models;

fn main() -> microreg::Result<()> {
    let dist = models::heisenberg();
    let curve = ControlCurve::polynomial(&["t", "0"])?;
    let bump = Bump { channel: 1, frequency: 1.0 };
    let family = deform_fixed_endpoints(&dist, &curve, &[0.0; 3], bump, 0.3, 6, &ClassifyOptions::default())?;
    for ((s, v), path) in family.s.iter().zip(&family.parameters).zip(&family.paths) {
        println!("s = {s:.2}  correction {v:?}  endpoint {:?}", endpoint(path));
    }
    println!("endpoint drift {:e}", family.endpoint_drift);

    // The abnormal line of the Martinet model admits no such family.
    match deform_fixed_endpoints(&models::martinet(), &curve, &[0.0; 3], bump, 0.3, 6, &ClassifyOptions::default()) {
        Err(e) => println!("martinet line: {e}"),
        Ok(_) => println!("martinet line unexpectedly deformed"),
    }
    Ok(())
}
