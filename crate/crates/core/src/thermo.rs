//! Energy spectra, thermal context and population vectors.
//!
//! Energies are in eV and the inverse temperature in 1/eV. Degeneracy is
//! exact equality of the stored energies; model builders produce
//! bit-identical values for levels that are meant to be degenerate.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on individual probabilities lying in `[0, 1]`.
pub const ENTRY_TOL: f64 = 1e-12;
/// Tolerance on the total probability.
pub const SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub label: String,
    pub energy: f64,
}

impl Level {
    pub fn new(label: impl Into<String>, energy: f64) -> Self {
        Self {
            label: label.into(),
            energy,
        }
    }
}

/// Labelled energy levels of a diagonal Hamiltonian, in a fixed order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct EnergySpectrum {
    levels: Vec<Level>,
}

#[derive(Deserialize)]
struct RawSpectrum {
    levels: Vec<Level>,
}

impl TryFrom<RawSpectrum> for EnergySpectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        EnergySpectrum::new(raw.levels)
    }
}

impl EnergySpectrum {
    pub fn new(levels: Vec<Level>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidSpectrum("at least one level is required".into()));
        }
        let mut seen = HashSet::new();
        for level in &levels {
            if !level.energy.is_finite() {
                return Err(Error::InvalidSpectrum(format!(
                    "level {:?} has non-finite energy {}",
                    level.label, level.energy
                )));
            }
            if !seen.insert(level.label.as_str()) {
                return Err(Error::InvalidSpectrum(format!(
                    "duplicate label {:?}",
                    level.label
                )));
            }
        }
        Ok(Self { levels })
    }

    /// Convenience constructor from `(label, energy)` pairs.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Result<Self> {
        Self::new(pairs.into_iter().map(|(l, e)| Level::new(l, e)).collect())
    }

    /// Unlabelled spectrum; levels are named `0`, `1`, ...
    pub fn from_energies(energies: &[f64]) -> Result<Self> {
        Self::new(
            energies
                .iter()
                .enumerate()
                .map(|(i, &e)| Level::new(i.to_string(), e))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn energy(&self, i: usize) -> f64 {
        self.levels[i].energy
    }

    pub fn label(&self, i: usize) -> &str {
        &self.levels[i].label
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.iter().map(|l| l.energy)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.levels.iter().position(|l| l.label == label)
    }

    /// `e^{-beta E_j}` for every level, in level order.
    pub fn boltzmann_weights(&self, ctx: ThermalContext) -> Vec<f64> {
        self.energies().map(|e| (-ctx.beta() * e).exp()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spectrum serializes")
    }
}

/// Inverse temperature `beta = 1 / k_B T`, in 1/eV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalContext {
    beta: f64,
}

impl ThermalContext {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_finite() && beta > 0.0 {
            Ok(Self { beta })
        } else {
            Err(Error::InvalidBeta(beta))
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// First violated constraint of a candidate population vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    LengthMismatch { expected: usize, got: usize },
    OutOfRange { index: usize, value: f64 },
    NotNormalized { sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected} entries, got {got}")
            }
            Violation::OutOfRange { index, value } => {
                write!(f, "entry {index} = {value} is outside [0, 1]")
            }
            Violation::NotNormalized { sum } => {
                let side = if *sum > 1.0 { "sum > 1" } else { "sum < 1" };
                write!(f, "{side} (sum = {sum})")
            }
        }
    }
}

impl std::error::Error for Violation {}

fn check_entries(probs: &[f64]) -> std::result::Result<(), Violation> {
    for (index, &value) in probs.iter().enumerate() {
        if !(value >= -ENTRY_TOL && value <= 1.0 + ENTRY_TOL) {
            return Err(Violation::OutOfRange { index, value });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Violation::NotNormalized { sum });
    }
    Ok(())
}

/// Checks length, entry bounds and normalization, in that order.
pub fn validate_population(probs: &[f64], spectrum: &EnergySpectrum) -> std::result::Result<(), Violation> {
    if probs.len() != spectrum.len() {
        return Err(Violation::LengthMismatch {
            expected: spectrum.len(),
            got: probs.len(),
        });
    }
    check_entries(probs)
}

/// Occupation probabilities of the energy eigenlevels.
///
/// The vector carries no spectrum; operations that pair it with one check
/// the lengths agree.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct PopulationVector(Vec<f64>);

impl PopulationVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        check_entries(&probs)?;
        Ok(Self(probs))
    }

    /// Builds the vector and checks it against `spectrum` as well.
    pub fn for_spectrum(probs: Vec<f64>, spectrum: &EnergySpectrum) -> Result<Self> {
        validate_population(&probs, spectrum)?;
        Ok(Self(probs))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Total probability on the given level indices.
    pub fn mass(&self, subset: &[usize]) -> f64 {
        subset.iter().map(|&i| self.0[i]).sum()
    }
}

impl<'de> Deserialize<'de> for PopulationVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let probs = Vec::<f64>::deserialize(d)?;
        PopulationVector::new(probs).map_err(serde::de::Error::custom)
    }
}

/// `Z = sum_j e^{-beta E_j}`.
pub fn partition_function(spectrum: &EnergySpectrum, ctx: ThermalContext) -> f64 {
    spectrum.boltzmann_weights(ctx).iter().sum()
}

/// Thermal populations `e^{-beta E_j} / Z`.
pub fn gibbs_state(spectrum: &EnergySpectrum, ctx: ThermalContext) -> PopulationVector {
    let weights = spectrum.boltzmann_weights(ctx);
    let z: f64 = weights.iter().sum();
    PopulationVector(weights.into_iter().map(|w| w / z).collect())
}
