//! Build Lorenz curves and decide thermomajorization between states.

use thermoyield::model::{single_molecule_initial, single_molecule_model};
use thermoyield::{build_curve, gibbs_state, thermomajorizes, PopulationVector, ThermalContext};

fn main() -> thermoyield::Result<()> {
    let ctx = ThermalContext::new(1.0)?;
    let spectrum = single_molecule_model(2.48, 1.39)?;

    let excited = single_molecule_initial(0.7)?;
    let curve = build_curve(&excited, &spectrum, ctx)?;
    print!("{}", curve.to_csv());
    println!("L(0.5) = {:.4}", curve.evaluate(0.5)?);

    let thermal = build_curve(&gibbs_state(&spectrum, ctx), &spectrum, ctx)?;
    let trans_heavy = build_curve(&PopulationVector::new(vec![0.2, 0.0, 0.8])?, &spectrum, ctx)?;

    println!("excited -> thermal:     {}", thermomajorizes(&curve, &thermal)?);
    println!("thermal -> excited:     {}", thermomajorizes(&thermal, &curve)?);
    println!("excited -> trans heavy: {}", thermomajorizes(&curve, &trans_heavy)?);
    Ok(())
}
