//! One- and two-molecule photoswitch models.
//!
//! A single molecule has three levels: cis ground `g` at 0, cis excited `e`
//! at `E1` and trans ground `t` at `ΔE`. Two molecules live on the nine
//! product levels of the non-interacting Hamiltonian `H_A + H_B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{Block, CoherentBlockState, PSD_TOL};
use crate::thermo::{EnergySpectrum, Level, PopulationVector};

/// Photoexcitation energy of rhodopsin, eV.
pub const RHODOPSIN_E1: f64 = 2.48;
/// Cis to trans energy gap of rhodopsin, eV.
pub const RHODOPSIN_DELTA_E: f64 = 1.39;

pub const LOCAL_LABELS: [&str; 3] = ["g", "e", "t"];
pub const PAIR_LABELS: [&str; 9] = ["gg", "ge", "eg", "ee", "gt", "tg", "et", "te", "tt"];

/// Level indices of the single-molecule spectrum.
pub mod single {
    pub const G: usize = 0;
    pub const E: usize = 1;
    pub const T: usize = 2;
}

/// Level indices of the two-molecule spectrum.
pub mod pair {
    pub const GG: usize = 0;
    pub const GE: usize = 1;
    pub const EG: usize = 2;
    pub const EE: usize = 3;
    pub const GT: usize = 4;
    pub const TG: usize = 5;
    pub const ET: usize = 6;
    pub const TE: usize = 7;
    pub const TT: usize = 8;

    /// At least one molecule in trans.
    pub const ANY_TRANS: [usize; 5] = [GT, TG, ET, TE, TT];
    /// Both molecules in trans.
    pub const BOTH_TRANS: [usize; 1] = [TT];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotoswitchParams {
    /// Photoexcitation energy, eV.
    pub e1: f64,
    /// Cis to trans gap, eV.
    pub delta_e: f64,
    /// Excitation probability.
    pub p: f64,
    /// Magnitude of the coherence between `ge` and `eg`.
    pub lam: f64,
}

fn check_energies(e1: f64, delta_e: f64) -> Result<()> {
    if !(e1.is_finite() && e1 > 0.0) {
        return Err(Error::InvalidParams(format!("e1 must be positive, got {e1}")));
    }
    if !(delta_e.is_finite() && delta_e >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "delta_e must be nonnegative, got {delta_e}"
        )));
    }
    Ok(())
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("p must lie in [0, 1], got {p}")))
    }
}

impl PhotoswitchParams {
    pub fn new(e1: f64, delta_e: f64, p: f64, lam: f64) -> Result<Self> {
        check_energies(e1, delta_e)?;
        check_probability(p)?;
        if !(lam >= 0.0) {
            return Err(Error::InvalidParams(format!("lambda must be nonnegative, got {lam}")));
        }
        if lam * lam > (p / 2.0) * (p / 2.0) + PSD_TOL {
            // same condition and slack as the block's positivity check
            return Err(Error::Positivity {
                i: pair::GE,
                j: pair::EG,
                lam_sq: lam * lam,
                bound: (p / 2.0) * (p / 2.0),
            });
        }
        Ok(Self { e1, delta_e, p, lam })
    }

    /// Rhodopsin energies with the given excitation and coherence.
    pub fn rhodopsin(p: f64, lam: f64) -> Result<Self> {
        Self::new(RHODOPSIN_E1, RHODOPSIN_DELTA_E, p, lam)
    }

    pub fn with_lambda(self, lam: f64) -> Result<Self> {
        Self::new(self.e1, self.delta_e, self.p, lam)
    }

    pub fn with_delta_e(self, delta_e: f64) -> Result<Self> {
        Self::new(self.e1, delta_e, self.p, self.lam)
    }

    /// Largest admissible coherence, `p / 2`.
    pub fn max_lambda(&self) -> f64 {
        self.p / 2.0
    }
}

fn local_energies(e1: f64, delta_e: f64) -> [f64; 3] {
    [0.0, e1, delta_e]
}

/// Levels `g, e, t` at `0, e1, delta_e`.
pub fn single_molecule_model(e1: f64, delta_e: f64) -> Result<EnergySpectrum> {
    check_energies(e1, delta_e)?;
    let local = local_energies(e1, delta_e);
    EnergySpectrum::new(
        LOCAL_LABELS
            .iter()
            .zip(local)
            .map(|(l, e)| Level::new(*l, e))
            .collect(),
    )
}

/// Product levels in the order `gg, ge, eg, ee, gt, tg, et, te, tt`.
///
/// Each energy is the sum of the two local energies. Floating-point
/// addition is commutative, so swapped labels (`ge`/`eg`, `gt`/`tg`,
/// `et`/`te`) get bit-identical energies.
pub fn two_molecule_model(e1: f64, delta_e: f64) -> Result<EnergySpectrum> {
    check_energies(e1, delta_e)?;
    let local = local_energies(e1, delta_e);
    let index = |c: char| LOCAL_LABELS.iter().position(|l| l.starts_with(c)).unwrap();
    EnergySpectrum::new(
        PAIR_LABELS
            .iter()
            .map(|label| {
                let mut chars = label.chars();
                let a = index(chars.next().unwrap());
                let b = index(chars.next().unwrap());
                Level::new(*label, local[a] + local[b])
            })
            .collect(),
    )
}

/// `(1 - p, p, 0)`: a photoexcited cis molecule.
pub fn single_molecule_initial(p: f64) -> Result<PopulationVector> {
    check_probability(p)?;
    PopulationVector::new(vec![1.0 - p, p, 0.0])
}

/// One excitation shared coherently between two molecules:
/// diagonal `(1-p, p/2, p/2, 0, ...)` with coherence `lam` between `ge` and `eg`.
pub fn superposition_initial_state(params: &PhotoswitchParams) -> Result<CoherentBlockState> {
    let spectrum = two_molecule_model(params.e1, params.delta_e)?;
    let p = params.p;
    general_two_molecule_initial(
        &spectrum,
        [1.0 - p, p / 2.0, p / 2.0, 0.0],
        Complex64::new(params.lam, 0.0),
    )
}

/// Arbitrary cis-subspace populations `[gg, ge, eg, ee]` with coherence
/// `lam` in the degenerate `ge`/`eg` block. Trans levels start empty.
pub fn general_two_molecule_initial(
    spectrum: &EnergySpectrum,
    cis: [f64; 4],
    lam: Complex64,
) -> Result<CoherentBlockState> {
    if spectrum.len() != PAIR_LABELS.len() {
        return Err(Error::Usage(format!(
            "two-molecule states need the 9-level spectrum, got {} levels",
            spectrum.len()
        )));
    }
    let mut diag = vec![0.0; 9];
    diag[..4].copy_from_slice(&cis);
    let diag = PopulationVector::for_spectrum(diag, spectrum)?;
    CoherentBlockState::new(spectrum.clone(), diag, vec![Block::new(pair::GE, pair::EG, lam)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_molecule_levels() {
        let s = single_molecule_model(2.48, 1.39).unwrap();
        assert_eq!(s.energies().collect::<Vec<_>>(), vec![0.0, 2.48, 1.39]);
        assert_eq!(s.label(single::T), "t");
        let s = single_molecule_model(1.0, 0.0).unwrap();
        assert_eq!(s.energies().collect::<Vec<_>>(), vec![0.0, 1.0, 0.0]);
        assert!(single_molecule_model(2.48, 4.96).is_ok());
        assert!(single_molecule_model(0.0, 1.0).is_err());
        assert!(single_molecule_model(1.0, -0.1).is_err());
    }

    #[test]
    fn two_molecule_levels() {
        let s = two_molecule_model(2.48, 1.39).unwrap();
        let want = [0.0, 2.48, 2.48, 4.96, 1.39, 1.39, 3.87, 3.87, 2.78];
        for (e, w) in s.energies().zip(want) {
            assert_abs_diff_eq!(e, w, epsilon = 1e-12);
        }
        assert_eq!(s.energy(pair::GE).to_bits(), s.energy(pair::EG).to_bits());
        assert_eq!(s.energy(pair::GT).to_bits(), s.energy(pair::TG).to_bits());
        assert_eq!(s.energy(pair::ET).to_bits(), s.energy(pair::TE).to_bits());
        let labels: Vec<_> = s.levels().iter().map(|l| l.label.as_str()).collect();
        assert_eq!(labels, PAIR_LABELS);

        let s = two_molecule_model(1.0, 1.0).unwrap();
        assert_eq!(s.energy(pair::GT), s.energy(pair::GE));
        assert_eq!(s.energies().collect::<Vec<_>>(), vec![0.0, 1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 2.0, 2.0]);
    }

    #[test]
    fn local_additivity() {
        let one = single_molecule_model(2.3, 0.7).unwrap();
        let two = two_molecule_model(2.3, 0.7).unwrap();
        for (k, label) in PAIR_LABELS.iter().enumerate() {
            let (a, b) = label.split_at(1);
            let e = one.energy(one.index_of(a).unwrap()) + one.energy(one.index_of(b).unwrap());
            assert_eq!(two.energy(k), e);
        }
    }

    #[test]
    fn single_initial_states() {
        assert_eq!(single_molecule_initial(0.0).unwrap().as_slice(), &[1.0, 0.0, 0.0]);
        assert_eq!(single_molecule_initial(1.0).unwrap().as_slice(), &[0.0, 1.0, 0.0]);
        let v = single_molecule_initial(0.7).unwrap();
        assert_abs_diff_eq!(v.get(0), 0.3, epsilon = 1e-15);
        assert_eq!(v.get(1), 0.7);
        assert!(single_molecule_initial(1.2).is_err());
    }

    #[test]
    fn superposition_diagonalizes_to_p_sup() {
        let cases = [(0.2, [0.3, 0.55, 0.15]), (0.0, [0.3, 0.35, 0.35]), (0.35, [0.3, 0.7, 0.0])];
        for (lam, want) in cases {
            let params = PhotoswitchParams::rhodopsin(0.7, lam).unwrap();
            let (v, _) = superposition_initial_state(&params).unwrap().diagonalize_blocks().unwrap();
            for k in 0..3 {
                assert_abs_diff_eq!(v.get(k), want[k], epsilon = 1e-12);
            }
            assert!(v.as_slice()[3..].iter().all(|&x| x == 0.0));
            assert_abs_diff_eq!(v.total(), 1.0, epsilon = 1e-12);
        }
        assert!(matches!(
            PhotoswitchParams::rhodopsin(0.7, 0.36),
            Err(Error::Positivity { .. })
        ));
    }

    #[test]
    fn general_constructor() {
        let s = two_molecule_model(RHODOPSIN_E1, RHODOPSIN_DELTA_E).unwrap();
        let a = general_two_molecule_initial(&s, [0.3, 0.35, 0.35, 0.0], Complex64::new(0.2, 0.0)).unwrap();
        let b = superposition_initial_state(&PhotoswitchParams::rhodopsin(0.7, 0.2).unwrap()).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-15);
        let both = general_two_molecule_initial(&s, [0.0, 0.0, 0.0, 1.0], Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(both.diag().get(pair::EE), 1.0);
        assert!(matches!(
            general_two_molecule_initial(&s, [0.25; 4], Complex64::new(0.3, 0.0)),
            Err(Error::Positivity { .. })
        ));
        assert!(general_two_molecule_initial(&s, [0.5, 0.5, 0.5, 0.0], Complex64::new(0.0, 0.0)).is_err());
    }
}
