//! Lorenz curves and the thermomajorization order.
//!
//! A curve is built by sorting levels by the rescaled key `p_j e^{beta E_j}`
//! in decreasing order and accumulating `(e^{-beta E_j}, p_j)` from the
//! origin. The result is concave and ends at `(Z, 1)`. One state
//! thermomajorizes another iff its curve lies on or above the other's.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::fmt_sig;
use crate::thermo::{validate_population, EnergySpectrum, PopulationVector, ThermalContext};

/// Absolute tolerance on curve heights when comparing two curves.
pub const COMPARE_TOL: f64 = 1e-9;
/// Slack allowed below zero and above `Z` when evaluating.
pub const DOMAIN_TOL_LOW: f64 = 1e-12;
pub const DOMAIN_TOL_HIGH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Knot {
    pub x: f64,
    pub y: f64,
}

/// Piecewise-linear concave curve through `(0, 0)` and `(Z, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorenzCurve {
    knots: Vec<Knot>,
    #[serde(skip)]
    beta: f64,
}

/// One column of a curve: probability `mass` spread over Gibbs width
/// `width`. `energy` only breaks ties between equal keys.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Column {
    pub key: f64,
    pub mass: f64,
    pub width: f64,
    pub energy: f64,
}

/// Descending key, then ascending energy. Used with a stable sort, so fully
/// tied columns keep their input order.
pub(crate) fn column_order(a: &Column, b: &Column) -> Ordering {
    b.key
        .total_cmp(&a.key)
        .then_with(|| a.energy.total_cmp(&b.energy))
}

impl LorenzCurve {
    pub(crate) fn from_columns(mut columns: Vec<Column>, beta: f64) -> Self {
        columns.sort_by(column_order);
        let mut knots = Vec::with_capacity(columns.len() + 1);
        let (mut x, mut y) = (0.0, 0.0);
        knots.push(Knot { x, y });
        for c in &columns {
            x += c.width;
            y += c.mass;
            knots.push(Knot { x, y });
        }
        Self { knots, beta }
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Right end of the domain, equal to the partition function.
    pub fn partition_function(&self) -> f64 {
        self.knots.last().map_or(0.0, |k| k.x)
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.knots
            .windows(2)
            .map(|w| (w[1].y - w[0].y) / (w[1].x - w[0].x))
            .collect()
    }

    /// Nonincreasing segment slopes, up to rounding.
    pub fn is_concave(&self) -> bool {
        self.slopes()
            .windows(2)
            .all(|s| s[1] <= s[0] + 1e-9 * s[0].abs().max(1.0))
    }

    /// Height of the curve at `x`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let z = self.partition_function();
        if !(x >= -DOMAIN_TOL_LOW && x <= z + DOMAIN_TOL_HIGH) {
            return Err(Error::Domain { x, z });
        }
        Ok(self.value_at(x))
    }

    /// Like [`evaluate`](Self::evaluate) but total: zero left of the origin
    /// and flat at the final height right of `Z`.
    pub fn value_at(&self, x: f64) -> f64 {
        let knots = &self.knots;
        if x <= 0.0 {
            return 0.0;
        }
        let last = knots[knots.len() - 1];
        if x >= last.x {
            return last.y;
        }
        // first knot with k.x >= x; never 0 because x > 0 = knots[0].x
        let hi = knots.partition_point(|k| k.x < x);
        let (a, b) = (knots[hi - 1], knots[hi]);
        if b.x == x {
            return b.y;
        }
        a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)
    }

    /// Knots as `x,y` CSV rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for k in &self.knots {
            out.push_str(&fmt_sig(k.x));
            out.push(',');
            out.push_str(&fmt_sig(k.y));
            out.push('\n');
        }
        out
    }
}

/// Lorenz curve of `v` relative to the Gibbs state of `spectrum` at `ctx`.
pub fn build_curve(
    v: &PopulationVector,
    spectrum: &EnergySpectrum,
    ctx: ThermalContext,
) -> Result<LorenzCurve> {
    validate_population(v.as_slice(), spectrum)?;
    let beta = ctx.beta();
    let columns = v
        .as_slice()
        .iter()
        .zip(spectrum.energies())
        .map(|(&p, e)| Column {
            key: p * (beta * e).exp(),
            mass: p,
            width: (-beta * e).exp(),
            energy: e,
        })
        .collect();
    Ok(LorenzCurve::from_columns(columns, beta))
}

fn same_beta(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// True iff `p_curve` lies on or above `q_curve` everywhere.
///
/// Both curves are piecewise linear, so it is enough to compare at the
/// union of their knot abscissae. A curve shorter than the other is
/// continued flat at its final height.
pub fn thermomajorizes(p_curve: &LorenzCurve, q_curve: &LorenzCurve) -> Result<bool> {
    if !same_beta(p_curve.beta, q_curve.beta) {
        return Err(Error::BetaMismatch(p_curve.beta, q_curve.beta));
    }
    let dominated = |x: f64| p_curve.value_at(x) >= q_curve.value_at(x) - COMPARE_TOL;
    Ok(p_curve.knots.iter().all(|k| dominated(k.x)) && q_curve.knots.iter().all(|k| dominated(k.x)))
}
