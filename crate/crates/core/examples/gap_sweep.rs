//! Yields against the cis-trans gap, written as CSV.
//!
//! cargo run --example gap_sweep > sweep.csv

use thermoyield::sweep::{default_gap_grid, gap_sweep, gap_sweep_csv};
use thermoyield::ThermalContext;

fn main() -> thermoyield::Result<()> {
    let ctx = ThermalContext::new(1.0)?;
    let rows = gap_sweep(2.48, 0.7, 0.2, 0.02, &default_gap_grid(), ctx)?;
    print!("{}", gap_sweep_csv(&rows));

    let above = rows.iter().filter(|r| r.qy_any_hi > r.qy_single).count();
    eprintln!("{above} of {} gaps where coherent QY_any beats a single molecule", rows.len());
    Ok(())
}
