//! Thermal populations of the one- and two-molecule photoswitch models.
//!
//! cargo run --example gibbs -- 1.0

use thermoyield::model::{single_molecule_model, two_molecule_model, RHODOPSIN_DELTA_E, RHODOPSIN_E1};
use thermoyield::{gibbs_state, partition_function, ThermalContext};

fn main() -> thermoyield::Result<()> {
    let beta = std::env::args().nth(1).map_or(Ok(1.0), |s| s.parse()).expect("beta must be a number");
    let ctx = ThermalContext::new(beta)?;

    for spectrum in [
        single_molecule_model(RHODOPSIN_E1, RHODOPSIN_DELTA_E)?,
        two_molecule_model(RHODOPSIN_E1, RHODOPSIN_DELTA_E)?,
    ] {
        println!("Z = {:.6}", partition_function(&spectrum, ctx));
        let g = gibbs_state(&spectrum, ctx);
        for (level, p) in spectrum.levels().iter().zip(g.as_slice()) {
            println!("  {:>3}  E = {:5.2}  p = {p:.6}", level.label, level.energy);
        }
    }
    Ok(())
}
