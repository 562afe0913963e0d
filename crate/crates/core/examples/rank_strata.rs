//! Rank partition of a flag level over a rational grid.

use microreg::dist::lie_flag;
use microreg::models;
use microreg::strata::{partition_grid, FunctionMatrix, Grid};

fn main() -> microreg::Result<()> {
    let dist = models::martinet();
    let flag = lie_flag(&dist, 3)?;
    let level2 = FunctionMatrix::flag_level(&flag, 2)?;
    let grid = Grid::parse("x1={-1,0,1}; x2={-1,-1/2,0,1/2,1}", dist.coords())?;
    let report = partition_grid(&level2, &grid)?;
    println!("histogram {:?}", report.histogram);
    println!("grid-maximal rank {}", report.grid_maximal_rank);
    println!("rank drops where {:?}", report.locus_fixed_coordinates);
    Ok(())
}
