//! Compare the exact optimizer with the exhaustive grid search.

use std::time::Instant;

use thermoyield::model::PhotoswitchParams;
use thermoyield::yields::{max_subset_mass, two_molecule_setup, BruteForce, YieldDefinition};
use thermoyield::{build_curve, EnergySpectrum, PopulationVector, ThermalContext};

fn main() -> thermoyield::Result<()> {
    let ctx = ThermalContext::new(1.0)?;

    let spectrum = EnergySpectrum::from_energies(&[0.0, 0.6, 1.5, 2.1])?;
    let initial = PopulationVector::new(vec![0.1, 0.2, 0.6, 0.1])?;
    let curve = build_curve(&initial, &spectrum, ctx)?;
    let exact = max_subset_mass(&curve, &spectrum, ctx, &[1, 3])?;
    for resolution in [0.1, 0.05, 0.02, 0.01] {
        let grid = BruteForce::new(resolution)?.run(&initial, &spectrum, ctx, &[1, 3])?;
        println!("resolution {resolution:<5} grid {:.4}  exact {:.4}", grid.value, exact.value);
    }

    // Nine levels need the symmetric reduction to stay under the default cap.
    let params = PhotoswitchParams::rhodopsin(0.7, 0.2)?;
    let (spectrum, initial, _) = two_molecule_setup(&params, ctx)?;
    let start = Instant::now();
    let both = BruteForce::new(0.01)?
        .with_symmetry(true)
        .run(&initial, &spectrum, ctx, YieldDefinition::Both.subset())?;
    println!("QY_both on the grid: {:.4} ({:.1?})", both.value, start.elapsed());

    match BruteForce::new(0.01)?.run(&initial, &spectrum, ctx, YieldDefinition::Both.subset()) {
        Ok(r) => println!("full grid: {:.4}", r.value),
        Err(e) => println!("full grid refused: {e}"),
    }
    Ok(())
}
