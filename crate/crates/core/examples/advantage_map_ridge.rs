//! Coherence advantage over (p, beta ΔE), its ridge and the exponential fit.

use thermoyield::sweep::{advantage_map, default_gap_grid, default_p_grid, fit_ridge, ridge_extract};
use thermoyield::ThermalContext;

fn main() -> thermoyield::Result<()> {
    let ctx = ThermalContext::new(1.0)?;
    let map = advantage_map(2.48, &default_p_grid(), &default_gap_grid(), ctx)?;
    let points = ridge_extract(&map)?;
    for pt in &points {
        println!("p = {:.2}  ridge at beta dE = {:.3}", pt.p, pt.beta_delta_e);
    }
    let fit = fit_ridge(&points)?;
    println!("p = p0 (e^(beta dE) - 1) with p0 = {:.4}, rms residual {:.4}", fit.p0, fit.residual);
    println!("{}", fit.summary_json());
    Ok(())
}
