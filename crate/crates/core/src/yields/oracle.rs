//! Exhaustive simplex-grid search for the best reachable subset mass.
//!
//! Every final population vector whose entries are multiples of
//! `resolution` is a candidate; candidates whose Lorenz curve leaves the
//! initial curve are discarded and the largest subset mass among the rest
//! wins. The search is exact on its grid. Two cuts skip candidates that
//! cannot win without changing the result:
//!
//! - an entry `q_j` larger than `L(p)(e^{-beta E_j})` is never reachable;
//! - a branch whose subset mass cannot beat the incumbent even if all
//!   remaining mass lands in the subset is skipped.
//!
//! With `symmetric` set, levels sharing an energy and subset membership are
//! merged into one column with their combined width. Permuting such levels
//! is an energy-preserving unitary, so averaging any reachable final state
//! over those permutations stays reachable and keeps its subset mass; the
//! optimum over the reduced grid therefore equals the optimum over
//! permutation-symmetric grid points.
//!
//! Chunks over the first column's value are searched in parallel. Each
//! chunk keeps its lexicographically smallest winner and chunks are merged
//! in order, so the result does not depend on scheduling.

use rayon::prelude::*;

use super::{check_subset, Optimum};
use crate::error::{Error, Result};
use crate::lorenz::{build_curve, column_order, Column, LorenzCurve, COMPARE_TOL};
use crate::thermo::{EnergySpectrum, PopulationVector, ThermalContext};

/// Default limit on the number of grid points.
pub const DEFAULT_CAP: f64 = 1e8;
/// Largest spectrum the oracle accepts.
pub const MAX_LEVELS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForce {
    resolution: f64,
    steps: u32,
    cap: f64,
    symmetric: bool,
}

#[derive(Debug, Clone)]
struct Group {
    members: Vec<usize>,
    width: f64,
    energy: f64,
    in_subset: bool,
    max_count: u32,
}

impl BruteForce {
    /// `resolution` must be `1/n` for a positive integer `n`.
    pub fn new(resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution < 1.0) {
            return Err(Error::Usage(format!("resolution must lie in (0, 1), got {resolution}")));
        }
        let inv = 1.0 / resolution;
        let steps = inv.round();
        if (inv - steps).abs() > 1e-9 * steps || steps > u32::MAX as f64 {
            return Err(Error::Usage(format!(
                "1/resolution must be an integer, got {inv}"
            )));
        }
        Ok(Self {
            resolution,
            steps: steps as u32,
            cap: DEFAULT_CAP,
            symmetric: false,
        })
    }

    pub fn with_cap(mut self, cap: f64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_symmetry(mut self, symmetric: bool) -> Self {
        self.symmetric = symmetric;
        self
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Number of grid points for `columns` free columns, `C(n + d - 1, d - 1)`.
    pub fn grid_size(&self, columns: usize) -> f64 {
        let n = self.steps as f64;
        (1..columns).fold(1.0, |acc, k| acc * (n + k as f64) / k as f64)
    }

    fn groups(
        &self,
        spectrum: &EnergySpectrum,
        ctx: ThermalContext,
        subset: &[usize],
        curve: &LorenzCurve,
    ) -> Vec<Group> {
        let weights = spectrum.boltzmann_weights(ctx);
        let mut groups: Vec<Group> = Vec::new();
        for k in 0..spectrum.len() {
            let energy = spectrum.energy(k);
            let in_subset = subset.contains(&k);
            let slot = if self.symmetric {
                groups
                    .iter()
                    .position(|g| g.energy == energy && g.in_subset == in_subset)
            } else {
                None
            };
            match slot {
                Some(i) => {
                    groups[i].members.push(k);
                    groups[i].width += weights[k];
                }
                None => groups.push(Group {
                    members: vec![k],
                    width: weights[k],
                    energy,
                    in_subset,
                    max_count: 0,
                }),
            }
        }
        let n = self.steps as f64;
        for g in &mut groups {
            let bound = ((curve.value_at(g.width) + COMPARE_TOL) * n).floor();
            g.max_count = bound.clamp(0.0, n) as u32;
        }
        groups
    }

    /// Largest grid-reachable mass on `subset` starting from `initial`.
    pub fn run(
        &self,
        initial: &PopulationVector,
        spectrum: &EnergySpectrum,
        ctx: ThermalContext,
        subset: &[usize],
    ) -> Result<Optimum> {
        if spectrum.len() > MAX_LEVELS {
            return Err(Error::Usage(format!(
                "brute force supports at most {MAX_LEVELS} levels, got {}",
                spectrum.len()
            )));
        }
        check_subset(subset, spectrum.len())?;
        let curve = build_curve(initial, spectrum, ctx)?;
        let groups = self.groups(spectrum, ctx, subset, &curve);
        let candidates = self.grid_size(groups.len());
        if candidates > self.cap {
            return Err(Error::Resource {
                candidates,
                cap: self.cap,
            });
        }

        let search = Search::new(&groups, &curve, self.steps);
        let first_max = groups[0].max_count.min(self.steps);
        let chunks: Vec<Option<(u32, Vec<u32>)>> = (0..=first_max)
            .into_par_iter()
            .map(|c0| search.chunk(c0))
            .collect();
        let mut best: Option<(u32, Vec<u32>)> = None;
        for found in chunks.into_iter().flatten() {
            if best.as_ref().map_or(true, |b| found.0 > b.0) {
                best = Some(found);
            }
        }
        let (score, counts) = best.ok_or(Error::NoFeasiblePoint(self.resolution))?;

        let n = self.steps as f64;
        let weights = spectrum.boltzmann_weights(ctx);
        let mut probs = vec![0.0; spectrum.len()];
        for (g, &c) in groups.iter().zip(&counts) {
            let mass = c as f64 / n;
            for &k in &g.members {
                probs[k] = mass * weights[k] / g.width;
            }
        }
        Ok(Optimum {
            value: score as f64 / n,
            achiever: PopulationVector::for_spectrum(probs, spectrum)?,
        })
    }
}

/// Full-grid search without symmetry reduction.
pub fn brute_force_yield(
    initial: &PopulationVector,
    spectrum: &EnergySpectrum,
    ctx: ThermalContext,
    subset: &[usize],
    resolution: f64,
) -> Result<Optimum> {
    BruteForce::new(resolution)?.run(initial, spectrum, ctx, subset)
}

struct Search<'a> {
    groups: &'a [Group],
    curve: &'a LorenzCurve,
    steps: u32,
    // whether any group at index >= k counts towards the subset
    subset_ahead: Vec<bool>,
}

struct Best {
    score: Option<u32>,
    counts: Vec<u32>,
}

impl<'a> Search<'a> {
    fn new(groups: &'a [Group], curve: &'a LorenzCurve, steps: u32) -> Self {
        let mut subset_ahead = vec![false; groups.len() + 1];
        for k in (0..groups.len()).rev() {
            subset_ahead[k] = subset_ahead[k + 1] || groups[k].in_subset;
        }
        Self {
            groups,
            curve,
            steps,
            subset_ahead,
        }
    }

    fn chunk(&self, c0: u32) -> Option<(u32, Vec<u32>)> {
        let mut counts = vec![0; self.groups.len()];
        let mut best = Best {
            score: None,
            counts: Vec::new(),
        };
        self.descend(0, c0, self.steps, 0, &mut counts, &mut best, true);
        best.score.map(|s| (s, best.counts))
    }

    fn beats(best: &Best, bound: u32) -> bool {
        best.score.map_or(true, |s| bound > s)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        k: usize,
        fixed: u32,
        remaining: u32,
        score: u32,
        counts: &mut [u32],
        best: &mut Best,
        pinned: bool,
    ) {
        let g = &self.groups[k];
        let last = k + 1 == self.groups.len();
        let range = if pinned {
            fixed..=fixed
        } else if last {
            remaining..=remaining
        } else {
            0..=remaining.min(g.max_count)
        };
        for c in range {
            if c > remaining || c > g.max_count {
                continue;
            }
            let score_here = score + if g.in_subset { c } else { 0 };
            let rest = remaining - c;
            if last {
                if rest != 0 || !Self::beats(best, score_here) {
                    continue;
                }
                counts[k] = c;
                if self.feasible(counts) {
                    best.score = Some(score_here);
                    best.counts = counts.to_vec();
                }
                continue;
            }
            let bound = score_here + if self.subset_ahead[k + 1] { rest } else { 0 };
            if !Self::beats(best, bound) {
                continue;
            }
            counts[k] = c;
            self.descend(k + 1, 0, rest, score_here, counts, best, false);
        }
    }

    /// Every knot of the candidate's curve lies on or under the initial
    /// curve. The initial curve is concave, so this covers the segments too.
    fn feasible(&self, counts: &[u32]) -> bool {
        let n = self.steps as f64;
        let mut cols = [Column {
            key: 0.0,
            mass: 0.0,
            width: 0.0,
            energy: 0.0,
        }; MAX_LEVELS];
        let d = counts.len();
        for (slot, (g, &c)) in cols.iter_mut().zip(self.groups.iter().zip(counts)) {
            let mass = c as f64 / n;
            *slot = Column {
                key: mass / g.width,
                mass,
                width: g.width,
                energy: g.energy,
            };
        }
        let cols = &mut cols[..d];
        cols.sort_by(column_order);
        let (mut x, mut y) = (0.0, 0.0);
        for c in cols.iter() {
            if c.mass == 0.0 {
                break;
            }
            x += c.width;
            y += c.mass;
            if y > self.curve.value_at(x) + COMPARE_TOL {
                return false;
            }
        }
        true
    }
}
