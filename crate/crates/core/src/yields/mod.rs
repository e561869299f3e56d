//! Optimal quantum yields under the thermomajorization constraint.
//!
//! The largest probability a thermal operation can place on a set of levels
//! `S` is the initial Lorenz curve evaluated at `W_S = sum_{j in S} e^{-beta E_j}`.
//! Any final state `q` has `L(q)(W_S) >= q_S`, and `L(q) <= L(p)` for every
//! reachable `q`, so the value is an upper bound. It is attained by putting
//! that mass Gibbs-proportionally on `S` and the rest Gibbs-proportionally on
//! the complement: the resulting two-chord curve sits under the concave
//! initial curve.
//!
//! [`oracle`] holds the exhaustive grid search used to cross-check this.

pub mod oracle;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::round_sig;
use crate::lorenz::{build_curve, LorenzCurve};
use crate::model::{
    pair, single, single_molecule_initial, single_molecule_model, superposition_initial_state,
    two_molecule_model, PhotoswitchParams,
};
use crate::thermo::{partition_function, EnergySpectrum, PopulationVector, ThermalContext};

pub use oracle::{brute_force_yield, BruteForce};

/// Tolerance when comparing yields against quoted two-decimal values.
pub const YIELD_TOL: f64 = 5e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum YieldDefinition {
    /// At least one of two molecules in trans.
    Any,
    /// Both molecules in trans.
    Both,
    /// A lone molecule in trans.
    Single,
}

impl YieldDefinition {
    /// Levels counted by the definition, in the matching model's order.
    pub fn subset(self) -> &'static [usize] {
        match self {
            YieldDefinition::Any => &pair::ANY_TRANS,
            YieldDefinition::Both => &pair::BOTH_TRANS,
            YieldDefinition::Single => &[single::T],
        }
    }
}

impl fmt::Display for YieldDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            YieldDefinition::Any => "any",
            YieldDefinition::Both => "both",
            YieldDefinition::Single => "single",
        })
    }
}

/// Best subset mass and a final state reaching it.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub value: f64,
    pub achiever: PopulationVector,
}

impl Optimum {
    pub fn into_report(self, definition: YieldDefinition) -> YieldReport {
        YieldReport {
            definition,
            value: self.value,
            achiever: self.achiever,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YieldReport {
    pub definition: YieldDefinition,
    pub value: f64,
    pub achiever: PopulationVector,
}

impl YieldReport {
    /// `{"definition":"both","value":...,"achiever":[...]}`, numbers at 12
    /// significant digits.
    pub fn to_json(&self) -> String {
        let rounded = serde_json::json!({
            "definition": self.definition,
            "value": round_sig(self.value),
            "achiever": self.achiever.as_slice().iter().map(|&x| round_sig(x)).collect::<Vec<_>>(),
        });
        serde_json::to_string(&rounded).expect("report serializes")
    }
}

pub(crate) fn check_subset(subset: &[usize], levels: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::Usage("subset of levels must not be empty".into()));
    }
    let mut seen = HashSet::new();
    for &k in subset {
        if k >= levels {
            return Err(Error::Usage(format!("level index {k} out of range for {levels} levels")));
        }
        if !seen.insert(k) {
            return Err(Error::Usage(format!("level index {k} listed twice")));
        }
    }
    Ok(())
}

/// Largest total probability reachable on `subset` from the state whose
/// curve is `initial_curve`, with a final state that attains it.
pub fn max_subset_mass(
    initial_curve: &LorenzCurve,
    spectrum: &EnergySpectrum,
    ctx: ThermalContext,
    subset: &[usize],
) -> Result<Optimum> {
    check_subset(subset, spectrum.len())?;
    if initial_curve.knots().len() != spectrum.len() + 1 {
        return Err(Error::Usage("curve and spectrum have different level counts".into()));
    }
    if initial_curve.beta() != ctx.beta() {
        return Err(Error::BetaMismatch(initial_curve.beta(), ctx.beta()));
    }
    let weights = spectrum.boltzmann_weights(ctx);
    let z = partition_function(spectrum, ctx);
    if (initial_curve.partition_function() - z).abs() > 1e-9 * z.max(1.0) {
        return Err(Error::Usage("curve was built on a different spectrum".into()));
    }

    let mut in_subset = vec![false; spectrum.len()];
    for &k in subset {
        in_subset[k] = true;
    }
    let w_in: f64 = subset.iter().map(|&k| weights[k]).sum();
    let w_out: f64 = weights
        .iter()
        .zip(&in_subset)
        .filter(|(_, &s)| !s)
        .map(|(w, _)| w)
        .sum();

    let total = initial_curve.knots().last().map_or(1.0, |k| k.y);
    let value = if w_out == 0.0 {
        total
    } else {
        initial_curve.value_at(w_in).min(total)
    };
    let rest = total - value;
    let achiever = weights
        .iter()
        .zip(&in_subset)
        .map(|(&w, &s)| if s { value * w / w_in } else { rest * w / w_out })
        .collect();
    Ok(Optimum {
        value,
        achiever: PopulationVector::for_spectrum(achiever, spectrum)?,
    })
}

/// Spectrum, diagonalized initial populations and their Lorenz curve for
/// the two-molecule superposition state.
pub fn two_molecule_setup(
    params: &PhotoswitchParams,
    ctx: ThermalContext,
) -> Result<(EnergySpectrum, PopulationVector, LorenzCurve)> {
    let state = superposition_initial_state(params)?;
    let (diag, _rotation) = state.diagonalize_blocks()?;
    let spectrum = two_molecule_model(params.e1, params.delta_e)?;
    let curve = build_curve(&diag, &spectrum, ctx)?;
    Ok((spectrum, diag, curve))
}

fn two_molecule_yield(
    params: &PhotoswitchParams,
    ctx: ThermalContext,
    definition: YieldDefinition,
) -> Result<YieldReport> {
    let (spectrum, _, curve) = two_molecule_setup(params, ctx)?;
    Ok(max_subset_mass(&curve, &spectrum, ctx, definition.subset())?.into_report(definition))
}

/// Best probability that both molecules end in trans.
pub fn qy_both(params: &PhotoswitchParams, ctx: ThermalContext) -> Result<YieldReport> {
    two_molecule_yield(params, ctx, YieldDefinition::Both)
}

/// Best probability that at least one molecule ends in trans.
pub fn qy_any(params: &PhotoswitchParams, ctx: ThermalContext) -> Result<YieldReport> {
    two_molecule_yield(params, ctx, YieldDefinition::Any)
}

/// Best trans probability for one molecule excited with probability `p`.
pub fn qy_single(e1: f64, delta_e: f64, p: f64, ctx: ThermalContext) -> Result<YieldReport> {
    let spectrum = single_molecule_model(e1, delta_e)?;
    let initial = single_molecule_initial(p)?;
    let curve = build_curve(&initial, &spectrum, ctx)?;
    Ok(max_subset_mass(&curve, &spectrum, ctx, YieldDefinition::Single.subset())?
        .into_report(YieldDefinition::Single))
}

/// How a yield is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YieldEngine {
    /// Exact curve evaluation.
    Analytic,
    /// Exhaustive grid search at the given settings.
    Oracle(BruteForce),
}

impl YieldEngine {
    pub fn evaluate(
        &self,
        definition: YieldDefinition,
        params: &PhotoswitchParams,
        ctx: ThermalContext,
    ) -> Result<YieldReport> {
        match self {
            YieldEngine::Analytic => optimal_yield(definition, params, ctx),
            YieldEngine::Oracle(bf) => {
                let (spectrum, initial) = match definition {
                    YieldDefinition::Single => (
                        single_molecule_model(params.e1, params.delta_e)?,
                        single_molecule_initial(params.p)?,
                    ),
                    _ => {
                        let (spectrum, initial, _) = two_molecule_setup(params, ctx)?;
                        (spectrum, initial)
                    }
                };
                Ok(bf
                    .run(&initial, &spectrum, ctx, definition.subset())?
                    .into_report(definition))
            }
        }
    }
}

/// Dispatch on `definition`; `Single` ignores `params.lam`.
pub fn optimal_yield(
    definition: YieldDefinition,
    params: &PhotoswitchParams,
    ctx: ThermalContext,
) -> Result<YieldReport> {
    match definition {
        YieldDefinition::Any => qy_any(params, ctx),
        YieldDefinition::Both => qy_both(params, ctx),
        YieldDefinition::Single => qy_single(params.e1, params.delta_e, params.p, ctx),
    }
}
