//! Numerical horizontal lift of a polynomial control curve.

use microreg::endpoint::{endpoint, lift_curve, ControlCurve, DEFAULT_STEP};
use microreg::models;

fn main() -> microreg::Result<()> {
    let dist = models::heisenberg();
    let circle_ish = ControlCurve::polynomial(&["t - t^3", "t^2"])?;
    let path = lift_curve(&dist, &circle_ish, &[0.0, 0.0, 0.0], DEFAULT_STEP)?;
    println!("{} samples, endpoint {:?}", path.times.len(), endpoint(&path));
    println!("worst horizontality residual {:e}", path.max_residual_overall());

    let back = lift_curve(&dist, &circle_ish.reversed(), &endpoint(&path), DEFAULT_STEP)?;
    println!("reversed lift returns to {:?}", endpoint(&back));
    Ok(())
}
