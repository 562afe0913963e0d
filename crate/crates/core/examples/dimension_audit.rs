//! Codimension of the declared families of non-microregular jets.

use microreg::jets::dimension_audit;
use microreg::models;

fn main() -> microreg::Result<()> {
    let model = models::bundled("martinet")?;
    for row in dimension_audit(&model, 2, 10)? {
        let codims: Vec<String> = row.strata.iter().map(|s| format!("{}={}", s.name, s.codim)).collect();
        println!(
            "r = {:>2}: dim J^r = {:>2}, lower bound {:>3}, {}",
            row.r,
            row.dim_horizontal,
            row.codim_lower_bound,
            codims.join(", ")
        );
    }
    Ok(())
}
