//! Membership of horizontal jets in the declared inadmissible families.

use microreg::jets::{ehresmann_jet_lift, microregularity, CurveJet, JetAmbient};
use microreg::{models, Rational};

fn main() -> microreg::Result<()> {
    let model = models::bundled("martinet")?;
    let q = Rational::integer;
    let jets = [
        ("along x2 = 0", vec![vec![q(1), q(0)], vec![q(0), q(0)], vec![q(0), q(0)]]),
        ("transverse", vec![vec![q(1), q(1)], vec![q(0), q(1)], vec![q(1), q(0)]]),
    ];
    for (label, taylor) in jets {
        let control = CurveJet::new(JetAmbient::Controls, vec![q(0), q(0)], taylor)?;
        let jet = ehresmann_jet_lift(&model.dist, &control, &[q(0)])?;
        let report = microregularity(&model, &jet)?;
        let hits: Vec<&str> = report.memberships.iter().filter(|m| m.member).map(|m| m.stratum.as_str()).collect();
        println!("{label}: microregular {} (member of {:?})", report.microregular, hits);
    }
    Ok(())
}
