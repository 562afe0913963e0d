//! Both sides of the lifting identity at sample covectors of the Engel Z2 stratum.

use microreg::annih::{verify_lifting_identity, CovectorPoint};
use microreg::models;

fn main() -> microreg::Result<()> {
    let model = models::bundled("engel")?;
    let stratum = model.stratum("engel-z2")?;
    for sample in &stratum.samples {
        let cp = CovectorPoint::from_z1(sample, model.dist.dim());
        let report = verify_lifting_identity(&model.dist, &cp, stratum)?;
        println!(
            "{:?}: ambient side rank {}, restricted side rank {}, equal {}",
            sample.iter().map(ToString::to_string).collect::<Vec<_>>(),
            report.ambient_side.rank,
            report.restricted_side.rank,
            report.holds
        );
    }
    Ok(())
}
