//! Zero-mode coherences inside degenerate energy subspaces.
//!
//! Thermal operations act independently on each ω-mode of a density matrix.
//! Only the ω = 0 part, i.e. the diagonal plus coherences between
//! degenerate levels, can influence final populations. A state is stored as
//! its diagonal plus disjoint 2×2 coherent blocks; diagonalizing those blocks
//! with an energy-preserving unitary gives the population vector that enters
//! thermomajorization, and [`rotate_back`] undoes the rotation on a final
//! diagonal state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::{validate_population, EnergySpectrum, PopulationVector, ENTRY_TOL};

/// Slack on `|lambda|^2 <= p_i p_j`.
pub const PSD_TOL: f64 = 1e-12;

/// Off-diagonal element `rho_ij` between two degenerate levels, `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub i: usize,
    pub j: usize,
    pub offdiag: Complex64,
}

impl Block {
    pub fn new(i: usize, j: usize, offdiag: Complex64) -> Self {
        Self { i, j, offdiag }
    }

    pub fn real(i: usize, j: usize, offdiag: f64) -> Self {
        Self::new(i, j, Complex64::new(offdiag, 0.0))
    }

    // i < j, with rho_ji = conj(rho_ij)
    fn normalized(self) -> Self {
        if self.i > self.j {
            Self::new(self.j, self.i, self.offdiag.conj())
        } else {
            self
        }
    }
}

/// Density matrix restricted to its zero mode.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentBlockState {
    spectrum: EnergySpectrum,
    diag: PopulationVector,
    blocks: Vec<Block>,
}

fn check_blocks(spectrum: &EnergySpectrum, diag: &[f64], blocks: &[Block]) -> Result<()> {
    let mut used = vec![false; spectrum.len()];
    for b in blocks {
        let (i, j) = (b.i, b.j);
        let bad = |reason: &str| Error::InvalidBlock {
            i,
            j,
            reason: reason.to_string(),
        };
        if i >= spectrum.len() || j >= spectrum.len() {
            return Err(bad("level index out of range"));
        }
        if i == j {
            return Err(bad("a block needs two distinct levels"));
        }
        if spectrum.energy(i) != spectrum.energy(j) {
            return Err(bad("levels are not degenerate"));
        }
        if !b.offdiag.re.is_finite() || !b.offdiag.im.is_finite() {
            return Err(bad("non-finite off-diagonal element"));
        }
        if used[i] || used[j] {
            return Err(bad("level already belongs to another block"));
        }
        used[i] = true;
        used[j] = true;
        let lam_sq = b.offdiag.norm_sqr();
        let bound = diag[i] * diag[j];
        if lam_sq > bound + PSD_TOL {
            return Err(Error::Positivity { i, j, lam_sq, bound });
        }
    }
    Ok(())
}

impl CoherentBlockState {
    pub fn new(spectrum: EnergySpectrum, diag: PopulationVector, blocks: Vec<Block>) -> Result<Self> {
        validate_population(diag.as_slice(), &spectrum)?;
        let blocks: Vec<Block> = blocks.into_iter().map(Block::normalized).collect();
        check_blocks(&spectrum, diag.as_slice(), &blocks)?;
        Ok(Self {
            spectrum,
            diag,
            blocks,
        })
    }

    /// A state without coherences.
    pub fn diagonal(spectrum: EnergySpectrum, diag: PopulationVector) -> Result<Self> {
        Self::new(spectrum, diag, Vec::new())
    }

    /// Zero-mode part of a full density matrix given row by row.
    ///
    /// Elements between non-degenerate levels belong to ω ≠ 0 modes and are
    /// dropped. The degenerate coherences that remain must form disjoint
    /// pairs of levels.
    pub fn from_density_matrix(spectrum: EnergySpectrum, rows: &[Vec<Complex64>]) -> Result<Self> {
        let d = spectrum.len();
        if rows.len() != d || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Usage(format!("density matrix must be {d}x{d}")));
        }
        let mut diag = Vec::with_capacity(d);
        for (k, row) in rows.iter().enumerate() {
            if row[k].im.abs() > ENTRY_TOL {
                return Err(Error::Usage(format!("diagonal element {k} is not real")));
            }
            diag.push(row[k].re);
        }
        let mut blocks = Vec::new();
        for i in 0..d {
            for j in i + 1..d {
                if (rows[i][j] - rows[j][i].conj()).norm() > ENTRY_TOL {
                    return Err(Error::Usage(format!("density matrix is not Hermitian at ({i}, {j})")));
                }
                if spectrum.energy(i) == spectrum.energy(j) && rows[i][j] != Complex64::new(0.0, 0.0) {
                    blocks.push(Block::new(i, j, rows[i][j]));
                }
            }
        }
        let diag = PopulationVector::for_spectrum(diag, &spectrum)?;
        Self::new(spectrum, diag, blocks)
    }

    pub fn spectrum(&self) -> &EnergySpectrum {
        &self.spectrum
    }

    pub fn diag(&self) -> &PopulationVector {
        &self.diag
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// The state restricted to its zero mode.
    ///
    /// Stored blocks only ever connect degenerate levels, so on a valid
    /// state the result equals the input.
    pub fn extract_zero_mode(&self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .copied()
            .filter(|b| self.spectrum.energy(b.i) == self.spectrum.energy(b.j))
            .collect();
        Self {
            spectrum: self.spectrum.clone(),
            diag: self.diag.clone(),
            blocks,
        }
    }

    /// `Tr rho^2 = sum p_k^2 + 2 sum |lambda|^2`.
    pub fn purity(&self) -> f64 {
        let diag: f64 = self.diag.as_slice().iter().map(|p| p * p).sum();
        let coh: f64 = self.blocks.iter().map(|b| b.offdiag.norm_sqr()).sum();
        diag + 2.0 * coh
    }

    /// Eigen-populations of every block together with the rotation that
    /// produced them.
    pub fn diagonalize_blocks(&self) -> Result<(PopulationVector, BasisRotation)> {
        let mut probs = self.diag.as_slice().to_vec();
        let mut rotations = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let eig = diagonalize_block(probs[b.i], probs[b.j], b.offdiag).map_err(|e| match e {
                Error::Positivity { lam_sq, bound, .. } => Error::Positivity {
                    i: b.i,
                    j: b.j,
                    lam_sq,
                    bound,
                },
                other => other,
            })?;
            probs[b.i] = eig.p_plus;
            probs[b.j] = eig.p_minus;
            rotations.push(BlockRotation {
                i: b.i,
                j: b.j,
                angle: eig.angle,
                phase: eig.phase,
            });
        }
        let v = PopulationVector::for_spectrum(probs, &self.spectrum)?;
        Ok((
            v,
            BasisRotation {
                spectrum: self.spectrum.clone(),
                rotations,
            },
        ))
    }

    /// Largest element-wise distance to `other` (diagonal and blocks),
    /// treating missing blocks as zero coherence.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = self
            .diag
            .as_slice()
            .iter()
            .zip(other.diag.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let coh = |s: &Self, i: usize, j: usize| {
            s.blocks
                .iter()
                .find(|b| b.i == i && b.j == j)
                .map_or(Complex64::new(0.0, 0.0), |b| b.offdiag)
        };
        for b in self.blocks.iter().chain(&other.blocks) {
            worst = worst.max((coh(self, b.i, b.j) - coh(other, b.i, b.j)).norm());
        }
        worst
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&StateJson::from(self)).expect("state serializes")
    }
}

/// Closed-form eigendecomposition of `[[a, lam], [conj(lam), b]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigen {
    pub p_plus: f64,
    pub p_minus: f64,
    /// Mixing angle θ with `tan 2θ = 2|lam| / (a - b)`.
    pub angle: f64,
    /// `arg(lam)`.
    pub phase: f64,
}

/// `p± = (a+b)/2 ± sqrt(((a-b)/2)^2 + |lam|^2)`.
///
/// `p_minus` is computed as `(a + b) - p_plus`; since `p_plus` lies in
/// `[(a+b)/2, a+b]` the subtraction is exact, so `p_plus + p_minus`
/// reproduces `a + b` bit for bit.
pub fn diagonalize_block(a: f64, b: f64, lam: Complex64) -> Result<BlockEigen> {
    let m = lam.norm();
    let lam_sq = lam.norm_sqr();
    if lam_sq > a * b + PSD_TOL {
        return Err(Error::Positivity {
            i: 0,
            j: 1,
            lam_sq,
            bound: a * b,
        });
    }
    if m == 0.0 {
        // already diagonal; only reorder so the larger value sits first
        let (p_plus, p_minus, angle) = if a >= b {
            (a, b, 0.0)
        } else {
            (b, a, std::f64::consts::FRAC_PI_2)
        };
        return Ok(BlockEigen {
            p_plus,
            p_minus,
            angle,
            phase: 0.0,
        });
    }
    let sum = a + b;
    let half_diff = (a - b) / 2.0;
    let r = half_diff.hypot(m);
    let p_plus = (sum / 2.0 + r).min(sum);
    let p_minus = sum - p_plus;
    Ok(BlockEigen {
        p_plus,
        p_minus,
        angle: 0.5 * (2.0 * m).atan2(a - b),
        phase: lam.arg(),
    })
}

/// Unitary on one 2×2 block; its first column is the `p_plus` eigenvector
/// `(cos θ, e^{-iφ} sin θ)`, its second `(-sin θ, e^{-iφ} cos θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockRotation {
    pub i: usize,
    pub j: usize,
    pub angle: f64,
    pub phase: f64,
}

impl BlockRotation {
    pub fn is_identity(&self) -> bool {
        self.angle == 0.0
    }
}

/// Product of the block rotations applied by
/// [`CoherentBlockState::diagonalize_blocks`].
#[derive(Debug, Clone, PartialEq)]
pub struct BasisRotation {
    spectrum: EnergySpectrum,
    rotations: Vec<BlockRotation>,
}

impl BasisRotation {
    pub fn identity(spectrum: EnergySpectrum) -> Self {
        Self {
            spectrum,
            rotations: Vec::new(),
        }
    }

    pub fn rotations(&self) -> &[BlockRotation] {
        &self.rotations
    }

    pub fn spectrum(&self) -> &EnergySpectrum {
        &self.spectrum
    }

    pub fn is_identity(&self) -> bool {
        self.rotations.iter().all(BlockRotation::is_identity)
    }
}

/// Maps a diagonal state of the rotated basis back to the original basis,
/// `sigma = U† sigma* U`, block by block.
pub fn rotate_back(final_diag: &PopulationVector, rot: &BasisRotation) -> Result<CoherentBlockState> {
    if final_diag.len() != rot.spectrum.len() {
        return Err(Error::Usage(format!(
            "rotation acts on {} levels but the state has {}",
            rot.spectrum.len(),
            final_diag.len()
        )));
    }
    let mut diag = final_diag.as_slice().to_vec();
    let mut blocks = Vec::with_capacity(rot.rotations.len());
    for r in &rot.rotations {
        let (x, y) = (final_diag.get(r.i), final_diag.get(r.j));
        let (s, c) = r.angle.sin_cos();
        diag[r.i] = x * c * c + y * s * s;
        diag[r.j] = x * s * s + y * c * c;
        let off = Complex64::from_polar((x - y) * c * s, r.phase);
        blocks.push(Block::new(r.i, r.j, off));
    }
    let diag = PopulationVector::for_spectrum(diag, &rot.spectrum)?;
    CoherentBlockState::new(rot.spectrum.clone(), diag, blocks)
}

/// On-disk form: `{"diag":[...], "blocks":[{"i":1,"j":2,"re":0.2,"im":0.0}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub diag: Vec<f64>,
    #[serde(default)]
    pub blocks: Vec<BlockJson>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub i: usize,
    pub j: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<&CoherentBlockState> for StateJson {
    fn from(s: &CoherentBlockState) -> Self {
        Self {
            diag: s.diag.as_slice().to_vec(),
            blocks: s
                .blocks
                .iter()
                .map(|b| BlockJson {
                    i: b.i,
                    j: b.j,
                    re: b.offdiag.re,
                    im: b.offdiag.im,
                })
                .collect(),
        }
    }
}

impl StateJson {
    pub fn into_state(self, spectrum: &EnergySpectrum) -> Result<CoherentBlockState> {
        let diag = PopulationVector::for_spectrum(self.diag, spectrum)?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| Block::new(b.i, b.j, Complex64::new(b.re, b.im)))
            .collect();
        CoherentBlockState::new(spectrum.clone(), diag, blocks)
    }
}
