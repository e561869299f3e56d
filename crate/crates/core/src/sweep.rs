//! Parameter sweeps over the energy gap and the excitation probability.
//!
//! Gaps are given in units of `beta ΔE`; the physical gap handed to the
//! model is `beta ΔE / beta`. All yields come from the exact optimizer, and
//! grid cells are evaluated in parallel with results collected in grid
//! order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{fmt_sig, round_sig};
use crate::model::PhotoswitchParams;
use crate::thermo::ThermalContext;
use crate::yields::{YieldDefinition, YieldEngine};

pub const DEFAULT_GAP_MIN: f64 = 0.0;
pub const DEFAULT_GAP_MAX: f64 = 6.0;
pub const DEFAULT_GAP_STEP: f64 = 0.05;
pub const DEFAULT_P_MIN: f64 = 0.05;
pub const DEFAULT_P_MAX: f64 = 0.95;
pub const DEFAULT_P_STEP: f64 = 0.05;
/// Rows whose largest advantage is below this carry no ridge point.
pub const RIDGE_THRESHOLD: f64 = 1e-6;
/// Cells within this of the row maximum count as maximal.
pub const RIDGE_TIE_TOL: f64 = 1e-9;

/// `min, min + step, ...` up to `max` inclusive (with a small slack for
/// accumulated rounding). Values are computed as `min + k step` and rounded
/// to 12 significant digits so grids print cleanly.
pub fn grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(min.is_finite() && max.is_finite() && step.is_finite()) || step <= 0.0 || max < min {
        return Err(Error::Usage(format!(
            "invalid grid: min {min}, max {max}, step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| round_sig(min + k as f64 * step)).collect())
}

pub fn default_gap_grid() -> Vec<f64> {
    grid(DEFAULT_GAP_MIN, DEFAULT_GAP_MAX, DEFAULT_GAP_STEP).expect("default grid is valid")
}

pub fn default_p_grid() -> Vec<f64> {
    grid(DEFAULT_P_MIN, DEFAULT_P_MAX, DEFAULT_P_STEP).expect("default grid is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSweepRow {
    pub beta_delta_e: f64,
    pub qy_any_hi: f64,
    pub qy_any_lo: f64,
    pub qy_both_hi: f64,
    pub qy_both_lo: f64,
    pub qy_single: f64,
}

pub const GAP_SWEEP_HEADER: &str = "beta_delta_e,qy_any_hi,qy_any_lo,qy_both_hi,qy_both_lo,qy_single";

impl GapSweepRow {
    fn values(&self) -> [f64; 6] {
        [
            self.beta_delta_e,
            self.qy_any_hi,
            self.qy_any_lo,
            self.qy_both_hi,
            self.qy_both_lo,
            self.qy_single,
        ]
    }
}

fn csv_line(values: &[f64]) -> String {
    let mut line = values.iter().map(|&v| fmt_sig(v)).collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

pub fn gap_sweep_csv(rows: &[GapSweepRow]) -> String {
    let mut out = format!("{GAP_SWEEP_HEADER}\n");
    for r in rows {
        out.push_str(&csv_line(&r.values()));
    }
    out
}

pub fn gap_sweep_json(rows: &[GapSweepRow]) -> String {
    let rounded: Vec<_> = rows
        .iter()
        .map(|r| {
            let v = r.values().map(round_sig);
            GapSweepRow {
                beta_delta_e: v[0],
                qy_any_hi: v[1],
                qy_any_lo: v[2],
                qy_both_hi: v[3],
                qy_both_lo: v[4],
                qy_single: v[5],
            }
        })
        .collect();
    serde_json::to_string(&rounded).expect("rows serialize")
}

fn gap_row(
    engine: &YieldEngine,
    e1: f64,
    p: f64,
    lam_hi: f64,
    lam_lo: f64,
    beta_delta_e: f64,
    ctx: ThermalContext,
) -> Result<GapSweepRow> {
    let delta_e = beta_delta_e / ctx.beta();
    let hi = PhotoswitchParams::new(e1, delta_e, p, lam_hi)?;
    let lo = PhotoswitchParams::new(e1, delta_e, p, lam_lo)?;
    let value = |def, params: &PhotoswitchParams| engine.evaluate(def, params, ctx).map(|r| r.value);
    Ok(GapSweepRow {
        beta_delta_e,
        qy_any_hi: value(YieldDefinition::Any, &hi)?,
        qy_any_lo: value(YieldDefinition::Any, &lo)?,
        qy_both_hi: value(YieldDefinition::Both, &hi)?,
        qy_both_lo: value(YieldDefinition::Both, &lo)?,
        qy_single: value(YieldDefinition::Single, &hi)?,
    })
}

/// Two-molecule yields at a high and a low coherence plus the
/// single-molecule yield, one row per `beta ΔE`.
pub fn gap_sweep(
    e1: f64,
    p: f64,
    lam_hi: f64,
    lam_lo: f64,
    gap_grid: &[f64],
    ctx: ThermalContext,
) -> Result<Vec<GapSweepRow>> {
    gap_sweep_with(&YieldEngine::Analytic, e1, p, lam_hi, lam_lo, gap_grid, ctx)
}

/// [`gap_sweep`] with an explicit yield engine, e.g. the grid oracle.
pub fn gap_sweep_with(
    engine: &YieldEngine,
    e1: f64,
    p: f64,
    lam_hi: f64,
    lam_lo: f64,
    gap_grid: &[f64],
    ctx: ThermalContext,
) -> Result<Vec<GapSweepRow>> {
    if gap_grid.is_empty() {
        return Err(Error::Usage("gap grid is empty".into()));
    }
    gap_grid
        .par_iter()
        .map(|&g| gap_row(engine, e1, p, lam_hi, lam_lo, g, ctx))
        .collect()
}

/// `QY_any(lambda = p/2) - QY_any(lambda = 0)` over a `(p, beta ΔE)` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageMap {
    pub p_grid: Vec<f64>,
    pub gap_grid: Vec<f64>,
    /// `delta[i][j]` pairs `p_grid[i]` with `gap_grid[j]`.
    pub delta: Vec<Vec<f64>>,
}

pub const MAP_HEADER: &str = "p,beta_delta_e,delta";

impl AdvantageMap {
    pub fn new(p_grid: Vec<f64>, gap_grid: Vec<f64>, delta: Vec<Vec<f64>>) -> Result<Self> {
        if delta.len() != p_grid.len() || delta.iter().any(|row| row.len() != gap_grid.len()) {
            return Err(Error::Usage(format!(
                "map shape does not match grids of {} x {}",
                p_grid.len(),
                gap_grid.len()
            )));
        }
        Ok(Self {
            p_grid,
            gap_grid,
            delta,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.p_grid.is_empty() || self.gap_grid.is_empty()
    }

    /// Long form, one `p,beta_delta_e,delta` row per cell, `p` major.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{MAP_HEADER}\n");
        for (p, row) in self.p_grid.iter().zip(&self.delta) {
            for (g, d) in self.gap_grid.iter().zip(row) {
                out.push_str(&csv_line(&[*p, *g, *d]));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rounded = AdvantageMap {
            p_grid: self.p_grid.iter().map(|&x| round_sig(x)).collect(),
            gap_grid: self.gap_grid.iter().map(|&x| round_sig(x)).collect(),
            delta: self
                .delta
                .iter()
                .map(|row| row.iter().map(|&x| round_sig(x)).collect())
                .collect(),
        };
        serde_json::to_string(&rounded).expect("map serializes")
    }

    /// Parses the long-form CSV written by [`to_csv`](Self::to_csv). Rows
    /// may come in any order but must cover the full grid.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| Error::Schema {
                path: "header".into(),
                message: e.to_string(),
            })?
            .clone();
        let expected: Vec<&str> = MAP_HEADER.split(',').collect();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(Error::Schema {
                path: "header".into(),
                message: format!("expected `{MAP_HEADER}`"),
            });
        }
        let mut cells = Vec::new();
        for (n, record) in reader.records().enumerate() {
            let line = n + 2;
            let record = record.map_err(|e| Error::Schema {
                path: format!("line {line}"),
                message: e.to_string(),
            })?;
            let mut vals = [0.0; 3];
            for (k, v) in vals.iter_mut().enumerate() {
                let field = record.get(k).unwrap_or("");
                *v = field.parse().map_err(|_| Error::Schema {
                    path: format!("line {line}, column {}", expected[k]),
                    message: format!("not a number: {field:?}"),
                })?;
            }
            cells.push(vals);
        }
        let mut p_grid: Vec<f64> = cells.iter().map(|c| c[0]).collect();
        let mut gap_grid: Vec<f64> = cells.iter().map(|c| c[1]).collect();
        for g in [&mut p_grid, &mut gap_grid] {
            g.sort_by(f64::total_cmp);
            g.dedup();
        }
        let mut delta = vec![vec![f64::NAN; gap_grid.len()]; p_grid.len()];
        for c in &cells {
            let i = p_grid.partition_point(|&x| x < c[0]);
            let j = gap_grid.partition_point(|&x| x < c[1]);
            delta[i][j] = c[2];
        }
        if delta.iter().flatten().any(|d| d.is_nan()) || cells.len() != p_grid.len() * gap_grid.len() {
            return Err(Error::Schema {
                path: "map".into(),
                message: "cells do not form a complete p x gap grid".into(),
            });
        }
        Self::new(p_grid, gap_grid, delta)
    }
}

/// Coherence advantage of the maximally coherent over the incoherent
/// superposition state, cell by cell.
pub fn advantage_map(e1: f64, p_grid: &[f64], gap_grid: &[f64], ctx: ThermalContext) -> Result<AdvantageMap> {
    advantage_map_with(&YieldEngine::Analytic, e1, p_grid, gap_grid, ctx)
}

/// [`advantage_map`] with an explicit yield engine.
pub fn advantage_map_with(
    engine: &YieldEngine,
    e1: f64,
    p_grid: &[f64],
    gap_grid: &[f64],
    ctx: ThermalContext,
) -> Result<AdvantageMap> {
    if p_grid.is_empty() || gap_grid.is_empty() {
        return Err(Error::Usage("advantage map grids must be nonempty".into()));
    }
    let cells: Vec<(f64, f64)> = p_grid
        .iter()
        .flat_map(|&p| gap_grid.iter().map(move |&g| (p, g)))
        .collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(p, g)| {
            let coherent = PhotoswitchParams::new(e1, g / ctx.beta(), p, p / 2.0)?;
            let incoherent = coherent.with_lambda(0.0)?;
            let any = |params: &PhotoswitchParams| engine.evaluate(YieldDefinition::Any, params, ctx);
            Ok(any(&coherent)?.value - any(&incoherent)?.value)
        })
        .collect::<Result<_>>()?;
    let delta = values.chunks(gap_grid.len()).map(<[f64]>::to_vec).collect();
    AdvantageMap::new(p_grid.to_vec(), gap_grid.to_vec(), delta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgePoint {
    pub beta_delta_e: f64,
    pub p: f64,
}

pub fn ridge_csv(points: &[RidgePoint]) -> String {
    let mut out = String::from("p,beta_delta_e_star\n");
    for pt in points {
        out.push_str(&csv_line(&[pt.p, pt.beta_delta_e]));
    }
    out
}

/// For each `p` row, the mean `beta ΔE` over the cells attaining the row
/// maximum. Rows with a negligible maximum are skipped.
pub fn ridge_extract(map: &AdvantageMap) -> Result<Vec<RidgePoint>> {
    if map.is_empty() {
        return Err(Error::Usage("advantage map is empty".into()));
    }
    let mut points = Vec::new();
    for (&p, row) in map.p_grid.iter().zip(&map.delta) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max < RIDGE_THRESHOLD {
            continue;
        }
        let (sum, count) = row
            .iter()
            .zip(&map.gap_grid)
            .filter(|(d, _)| max - **d <= RIDGE_TIE_TOL)
            .fold((0.0, 0usize), |(s, c), (_, g)| (s + g, c + 1));
        points.push(RidgePoint {
            beta_delta_e: sum / count as f64,
            p,
        });
    }
    Ok(points)
}

/// Least-squares `p0` of `p = p0 (e^{beta ΔE} - 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeFit {
    pub points: Vec<RidgePoint>,
    pub p0: f64,
    /// Root-mean-square error of the fitted model.
    pub residual: f64,
}

impl RidgeFit {
    /// `{"p0":...,"residual":...}`.
    pub fn summary_json(&self) -> String {
        serde_json::json!({ "p0": round_sig(self.p0), "residual": round_sig(self.residual) }).to_string()
    }
}

/// The model is linear in `p0`, so `p0 = sum f_i p_i / sum f_i^2` with
/// `f_i = e^{beta ΔE_i} - 1`.
pub fn fit_ridge(points: &[RidgePoint]) -> Result<RidgeFit> {
    if points.len() < 2 {
        return Err(Error::Usage(format!(
            "ridge fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    let f: Vec<f64> = points.iter().map(|pt| pt.beta_delta_e.exp_m1()).collect();
    let ff: f64 = f.iter().map(|x| x * x).sum();
    if ff == 0.0 {
        return Err(Error::DegenerateFit);
    }
    let fp: f64 = f.iter().zip(points).map(|(x, pt)| x * pt.p).sum();
    let p0 = fp / ff;
    let sq: f64 = f
        .iter()
        .zip(points)
        .map(|(x, pt)| (pt.p - p0 * x).powi(2))
        .sum();
    Ok(RidgeFit {
        points: points.to_vec(),
        p0,
        residual: (sq / points.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn beta1() -> ThermalContext {
        ThermalContext::new(1.0).unwrap()
    }

    #[test]
    fn grids() {
        let g = default_gap_grid();
        assert_eq!(g.len(), 121);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[28], 1.4);
        assert_eq!(*g.last().unwrap(), 6.0);
        let p = default_p_grid();
        assert_eq!(p.len(), 19);
        assert_eq!(p[0], 0.05);
        assert_eq!(*p.last().unwrap(), 0.95);
        assert_eq!(grid(1.0, 1.0, 0.1).unwrap(), vec![1.0]);
        assert!(grid(1.0, 0.0, 0.1).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rhodopsin_row() {
        let rows = gap_sweep(2.48, 0.7, 0.2, 0.02, &[1.39], beta1()).unwrap();
        let r = rows[0];
        assert_abs_diff_eq!(r.qy_any_hi, 0.8303, epsilon = 1e-4);
        assert_abs_diff_eq!(r.qy_any_lo, 0.8303, epsilon = 1e-4);
        assert_abs_diff_eq!(r.qy_both_hi, 0.4075, epsilon = 1e-4);
        assert_abs_diff_eq!(r.qy_both_lo, 0.2741, epsilon = 1e-4);
        assert_abs_diff_eq!(r.qy_single, 0.7496, epsilon = 1e-4);
    }

    #[test]
    fn sweep_is_order_independent() {
        let grid = [0.0, 2.0, 0.5, 4.0];
        let rows = gap_sweep(2.48, 0.7, 0.2, 0.02, &grid, beta1()).unwrap();
        let mut rev = grid;
        rev.reverse();
        let rows_rev = gap_sweep(2.48, 0.7, 0.2, 0.02, &rev, beta1()).unwrap();
        for r in &rows {
            assert!(rows_rev.contains(r));
        }
        assert!(gap_sweep(2.48, 0.7, 0.2, 0.02, &[], beta1()).is_err());
    }

    #[test]
    fn map_zero_row_and_nonnegativity() {
        let map = advantage_map(2.48, &[0.0, 0.3], &[0.0, 1.0, 3.0], beta1()).unwrap();
        assert!(map.delta[0].iter().all(|&d| d == 0.0));
        assert!(map.delta.iter().flatten().all(|&d| d >= -1e-9));
    }

    #[test]
    fn ridge_rules() {
        let single = AdvantageMap::new(vec![0.1, 0.2], vec![1.5], vec![vec![0.01], vec![0.02]]).unwrap();
        let pts = ridge_extract(&single).unwrap();
        assert_eq!(pts.len(), 2);
        assert!(pts.iter().all(|pt| pt.beta_delta_e == 1.5));

        let plateau = AdvantageMap::new(
            vec![0.1, 0.2],
            vec![1.0, 1.5, 2.0, 2.5],
            vec![vec![0.0, 0.03, 0.03, 0.01], vec![0.0, 0.0, 0.0, 0.0]],
        )
        .unwrap();
        let pts = ridge_extract(&plateau).unwrap();
        assert_eq!(pts, vec![RidgePoint { beta_delta_e: 1.75, p: 0.1 }]);

        let empty = AdvantageMap::new(vec![], vec![], vec![]).unwrap();
        assert!(ridge_extract(&empty).is_err());
        assert!(AdvantageMap::new(vec![0.1], vec![1.0, 2.0], vec![vec![0.0]]).is_err());
    }

    #[test]
    fn fit_recovers_exact_model() {
        let pts: Vec<_> = [0.5, 1.0, 2.0, 3.5]
            .iter()
            .map(|&g: &f64| RidgePoint {
                beta_delta_e: g,
                p: 0.025 * g.exp_m1(),
            })
            .collect();
        let fit = fit_ridge(&pts).unwrap();
        assert_abs_diff_eq!(fit.p0, 0.025, epsilon = 1e-12);
        assert!(fit.residual < 1e-12);

        let two = [
            RidgePoint { beta_delta_e: 2f64.ln(), p: 0.025 },
            RidgePoint { beta_delta_e: 3f64.ln(), p: 0.05 },
        ];
        // f = (1, 2): p0 = (0.025 + 0.1) / 5
        assert_abs_diff_eq!(fit_ridge(&two).unwrap().p0, 0.025, epsilon = 1e-15);
    }

    #[test]
    fn fit_errors() {
        let zero = [RidgePoint { beta_delta_e: 0.0, p: 0.1 }, RidgePoint { beta_delta_e: 0.0, p: 0.2 }];
        assert_eq!(fit_ridge(&zero).unwrap_err(), Error::DegenerateFit);
        assert!(matches!(fit_ridge(&zero[..1]), Err(Error::Usage(_))));
    }

    #[test]
    fn map_csv_round_trip() {
        let map = advantage_map(2.48, &[0.2, 0.4], &[0.5, 1.0, 3.25], beta1()).unwrap();
        let back = AdvantageMap::from_csv(&map.to_csv()).unwrap();
        assert_eq!(back.p_grid, map.p_grid);
        assert_eq!(back.gap_grid, map.gap_grid);
        for (a, b) in back.delta.iter().flatten().zip(map.delta.iter().flatten()) {
            assert!((a - b).abs() <= 1e-11 * b.abs() + 1e-15);
        }
        assert!(AdvantageMap::from_csv("p,gap\n").is_err());
        assert!(AdvantageMap::from_csv("p,beta_delta_e,delta\n0.1,1,x\n").is_err());
        assert!(AdvantageMap::from_csv("p,beta_delta_e,delta\n0.1,1,0\n0.2,2,0\n").is_err());
    }
}
