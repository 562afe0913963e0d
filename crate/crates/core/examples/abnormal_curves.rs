//! Integrating the characteristic line field over a stratum of Z1.

use microreg::annih::{characteristic_kernel, integrate_characteristic, CovectorPoint};
use microreg::{models, Rational};

fn main() -> microreg::Result<()> {
    let model = models::bundled("martinet")?;
    let stratum = model.stratum("martinet-x2zero")?;
    let q = Rational::integer;
    let cp = CovectorPoint::new(vec![q(0), q(0), q(0)], vec![q(1)]);
    let kernel = characteristic_kernel(&model.dist, &cp)?;
    println!("kernel of dλ at {:?}: rank {}", cp.base, kernel.rank);

    let traj = integrate_characteristic(&model.dist, &cp, stratum, 1.0, 1e-2)?;
    let last = traj.states.last().unwrap();
    println!("{} samples, final point {last:?}", traj.times.len());
    println!("worst projected residual {:e}", traj.residuals.iter().cloned().fold(0.0, f64::max));
    Ok(())
}
