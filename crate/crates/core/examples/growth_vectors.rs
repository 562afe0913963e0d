//! Fast Lie flag and growth vectors of the bundled models.
//!
//! ```text
//! cargo run --example growth_vectors
//! ```

use microreg::dist::{growth_vector_at, lie_flag};
use microreg::{models, Rational};

fn main() -> microreg::Result<()> {
    for name in ["heisenberg", "martinet", "engel"] {
        let dist = models::bundled(name)?.dist;
        let flag = lie_flag(&dist, dist.dim())?;
        println!("{name}: {} coordinates, rank {}", dist.dim(), dist.rank());
        for n in 1..=flag.depth() {
            let words: Vec<String> = flag.level(n).iter().map(|g| g.word.clone()).collect();
            println!("  level {n}: {}", words.join(" "));
        }
        let origin = vec![Rational::zero(); dist.dim()];
        let mut off = origin.clone();
        off[1] = Rational::one();
        println!("  growth at origin {:?}, at x2 = 1 {:?}", growth_vector_at(&dist, &origin)?.0, growth_vector_at(&dist, &off)?.0);
    }
    Ok(())
}
