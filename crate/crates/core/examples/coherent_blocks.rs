//! Zero-mode coherence: diagonalize a degenerate block, then rotate a final
//! diagonal state back into the original basis.

use num_complex::Complex64;
use thermoyield::model::{general_two_molecule_initial, two_molecule_model};
use thermoyield::modes::{diagonalize_block, rotate_back};

fn main() -> thermoyield::Result<()> {
    let eig = diagonalize_block(0.35, 0.35, Complex64::from_polar(0.2, 0.7))?;
    println!(
        "p+ = {:.4}, p- = {:.4}, angle = {:.4}, phase = {:.4}",
        eig.p_plus, eig.p_minus, eig.angle, eig.phase
    );

    let spectrum = two_molecule_model(2.48, 1.39)?;
    let state = general_two_molecule_initial(&spectrum, [0.3, 0.4, 0.3, 0.0], Complex64::new(0.1, 0.25))?;
    println!("purity = {:.4}", state.purity());

    let (populations, rotation) = state.diagonalize_blocks()?;
    println!("eigen-populations: {:?}", populations.as_slice());

    let back = rotate_back(&populations, &rotation)?;
    println!("round trip error = {:.2e}", state.max_abs_diff(&back));
    println!("{}", back.to_json());
    Ok(())
}
