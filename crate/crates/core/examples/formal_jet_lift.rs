//! Exact Ehresmann lift of a control jet and the reparametrization action.

use microreg::jets::{ehresmann_jet_lift, is_horizontal_jet, jet_project, rho_act, CurveJet, JetAmbient};
use microreg::{models, Rational};

fn main() -> microreg::Result<()> {
    let dist = models::engel();
    let q = |n: i64| Rational::integer(n);
    // x1 = t, x2 = t^2 as an order-4 control jet.
    let taylor = vec![vec![q(1), q(0)], vec![q(0), q(1)], vec![q(0), q(0)], vec![q(0), q(0)]];
    let control = CurveJet::new(JetAmbient::Controls, vec![q(0), q(0)], taylor)?;
    let lift = ehresmann_jet_lift(&dist, &control, &[q(0), q(0)])?;
    for (i, row) in lift.taylor().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
        println!("order {}: [{}]", i + 1, cells.join(", "));
    }
    println!("horizontal: {}", is_horizontal_jet(&dist, &lift)?.horizontal);
    println!("projects back: {}", jet_project(&dist, &lift)? == control);

    let a = Rational::new(1, 3);
    let lhs = ehresmann_jet_lift(&dist, &rho_act(&a, &control)?, &[q(0), q(0)])?;
    println!("lift commutes with t -> t/3: {}", lhs == rho_act(&a, &lift)?);
    Ok(())
}
