//! Command-line front end.
//!
//! [`run`] turns a parsed [`RunConfig`] into the text of the requested
//! artifact; the binary only writes that text out and maps errors to exit
//! codes. Output depends on nothing but the configuration and input files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::format::{fmt_sig, round_sig};
use crate::lorenz::{build_curve, thermomajorizes};
use crate::model::{single_molecule_model, two_molecule_model, PhotoswitchParams, RHODOPSIN_DELTA_E, RHODOPSIN_E1};
use crate::modes::{BlockJson, CoherentBlockState, StateJson};
use crate::sweep::{
    advantage_map_with, fit_ridge, gap_sweep_csv, gap_sweep_json, gap_sweep_with, grid, ridge_csv,
    ridge_extract, AdvantageMap, DEFAULT_GAP_MAX, DEFAULT_GAP_MIN, DEFAULT_GAP_STEP, DEFAULT_P_MAX,
    DEFAULT_P_MIN, DEFAULT_P_STEP,
};
use crate::thermo::{gibbs_state, EnergySpectrum, PopulationVector, ThermalContext};
use crate::yields::{BruteForce, YieldDefinition, YieldEngine};

/// Oracle step used for spectra of up to four levels.
pub const ORACLE_RESOLUTION_SMALL: f64 = 0.01;
/// Oracle step used for larger spectra.
pub const ORACLE_RESOLUTION_LARGE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "thermoyield", version, about = "Thermomajorization and photoswitch quantum yields")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub shared: SharedArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SharedArgs {
    /// Photoexcitation energy in eV
    #[arg(long, global = true, default_value_t = RHODOPSIN_E1)]
    pub e1: f64,
    /// Cis to trans energy gap in eV
    #[arg(long = "delta-e", global = true, default_value_t = RHODOPSIN_DELTA_E)]
    pub delta_e: f64,
    /// Excitation probability
    #[arg(long, global = true, default_value_t = 0.7)]
    pub p: f64,
    /// Coherence magnitude between the singly excited levels, at most p/2
    #[arg(long = "lambda", global = true, default_value_t = 0.2)]
    pub lambda: f64,
    /// Inverse temperature in 1/eV
    #[arg(long, global = true, default_value_t = 1.0)]
    pub beta: f64,
    /// Output format; each command has its own default
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the artifact here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Compute yields with the brute-force grid search
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Grid step of the brute-force search (default 0.01, or 0.05 above 4 levels)
    #[arg(long, global = true)]
    pub resolution: Option<f64>,
    /// Merge degenerate levels in the brute-force search
    #[arg(long, global = true)]
    pub symmetric: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Lorenz curve knots of a state file
    Lorenz {
        #[arg(long)]
        state: PathBuf,
        /// Spectrum JSON; inferred from the state length (3 or 9) when absent
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Whether the initial state thermomajorizes the final state
    Check {
        #[arg(long)]
        initial: PathBuf,
        #[arg(long = "final")]
        final_state: PathBuf,
        #[arg(long)]
        spectrum: Option<PathBuf>,
    },
    /// Optimal quantum yield
    Yield {
        #[arg(long = "def", value_enum, default_value_t = Definition::Both)]
        definition: Definition,
    },
    /// Yields as a function of beta * delta_e
    SweepGap {
        #[arg(long, default_value_t = DEFAULT_GAP_MIN)]
        gap_min: f64,
        #[arg(long, default_value_t = DEFAULT_GAP_MAX)]
        gap_max: f64,
        #[arg(long, default_value_t = DEFAULT_GAP_STEP)]
        gap_step: f64,
        #[arg(long = "lambda-hi", default_value_t = 0.2)]
        lambda_hi: f64,
        #[arg(long = "lambda-lo", default_value_t = 0.02)]
        lambda_lo: f64,
    },
    /// Coherence advantage of QY_any over (p, beta * delta_e)
    Map2d {
        #[arg(long, default_value_t = DEFAULT_P_MIN)]
        p_min: f64,
        #[arg(long, default_value_t = DEFAULT_P_MAX)]
        p_max: f64,
        #[arg(long, default_value_t = DEFAULT_P_STEP)]
        p_step: f64,
        #[arg(long, default_value_t = DEFAULT_GAP_MIN)]
        gap_min: f64,
        #[arg(long, default_value_t = DEFAULT_GAP_MAX)]
        gap_max: f64,
        #[arg(long, default_value_t = DEFAULT_GAP_STEP)]
        gap_step: f64,
    },
    /// Ridge of an advantage map and its exponential fit
    FitRidge {
        /// Long-form map CSV written by `map2d`
        #[arg(long)]
        map: PathBuf,
    },
    /// Thermal populations of the one- or two-molecule model
    Gibbs {
        #[arg(long)]
        two_molecule: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Definition {
    Any,
    Both,
    Single,
}

impl From<Definition> for YieldDefinition {
    fn from(d: Definition) -> Self {
        match d {
            Definition::Any => YieldDefinition::Any,
            Definition::Both => YieldDefinition::Both,
            Definition::Single => YieldDefinition::Single,
        }
    }
}

/// A state file, either a plain population vector or a coherent state.
#[derive(Debug, Clone, PartialEq)]
pub enum StateFile {
    Diagonal(Vec<f64>),
    Coherent(StateJson),
}

impl StateFile {
    pub fn len(&self) -> usize {
        match self {
            StateFile::Diagonal(v) => v.len(),
            StateFile::Coherent(s) => s.diag.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks the file against `spectrum`.
    pub fn into_state(self, spectrum: &EnergySpectrum) -> Result<ParsedState> {
        match self {
            StateFile::Diagonal(v) => Ok(ParsedState::Diagonal(PopulationVector::for_spectrum(v, spectrum)?)),
            StateFile::Coherent(s) => Ok(ParsedState::Coherent(s.into_state(spectrum)?)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedState {
    Diagonal(PopulationVector),
    Coherent(CoherentBlockState),
}

impl ParsedState {
    /// Populations that enter thermomajorization: coherent blocks are
    /// diagonalized first.
    pub fn populations(&self) -> Result<PopulationVector> {
        match self {
            ParsedState::Diagonal(v) => Ok(v.clone()),
            ParsedState::Coherent(s) => Ok(s.diagonalize_blocks()?.0),
        }
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn number_array(value: &Value, path: &str) -> Result<Vec<f64>> {
    let items = value
        .as_array()
        .ok_or_else(|| schema(path, "expected an array of numbers"))?;
    items
        .iter()
        .enumerate()
        .map(|(k, x)| x.as_f64().ok_or_else(|| schema(format!("{path}[{k}]"), "expected a number")))
        .collect()
}

fn index_field(obj: &serde_json::Map<String, Value>, key: &str, path: &str) -> Result<usize> {
    obj.get(key)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| schema(format!("{path}.{key}"), "expected a nonnegative integer"))
}

fn number_field(obj: &serde_json::Map<String, Value>, key: &str, path: &str, default: Option<f64>) -> Result<f64> {
    match (obj.get(key), default) {
        (None, Some(d)) => Ok(d),
        (v, _) => v
            .and_then(Value::as_f64)
            .ok_or_else(|| schema(format!("{path}.{key}"), "expected a number")),
    }
}

/// Parses state JSON text: `[p0, p1, ...]` or
/// `{"diag":[...], "blocks":[{"i":..,"j":..,"re":..,"im":..}]}`.
pub fn parse_state_json(text: &str) -> Result<StateFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| schema("$", format!("malformed JSON: {e}")))?;
    match &value {
        Value::Array(_) => Ok(StateFile::Diagonal(number_array(&value, "$")?)),
        Value::Object(obj) => {
            let diag = obj.get("diag").ok_or_else(|| schema("$.diag", "missing field"))?;
            let diag = number_array(diag, "$.diag")?;
            let mut blocks = Vec::new();
            if let Some(raw) = obj.get("blocks") {
                let raw = raw.as_array().ok_or_else(|| schema("$.blocks", "expected an array"))?;
                for (k, b) in raw.iter().enumerate() {
                    let path = format!("$.blocks[{k}]");
                    let b = b.as_object().ok_or_else(|| schema(&path, "expected an object"))?;
                    blocks.push(BlockJson {
                        i: index_field(b, "i", &path)?,
                        j: index_field(b, "j", &path)?,
                        re: number_field(b, "re", &path, None)?,
                        im: number_field(b, "im", &path, Some(0.0))?,
                    });
                }
            }
            Ok(StateFile::Coherent(StateJson { diag, blocks }))
        }
        _ => Err(schema("$", "expected an array or an object")),
    }
}

/// Reads a state file without checking it against a spectrum.
pub fn read_state_file(path: &Path) -> Result<StateFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_state_json(&text).map_err(|e| match e {
        Error::Schema { path: p, message } => schema(format!("{}: {p}", path.display()), message),
        other => other,
    })
}

/// Reads and validates a state file against `spectrum`. Block errors name
/// the offending level pair.
pub fn parse_state_file(path: &Path, spectrum: &EnergySpectrum) -> Result<ParsedState> {
    read_state_file(path)?.into_state(spectrum)
}

fn read_spectrum(path: &Path) -> Result<EnergySpectrum> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| schema(path.display().to_string(), e.to_string()))
}

fn spectrum_for(file: &StateFile, explicit: Option<&Path>, shared: &SharedArgs) -> Result<EnergySpectrum> {
    if let Some(path) = explicit {
        return read_spectrum(path);
    }
    match file.len() {
        3 => single_molecule_model(shared.e1, shared.delta_e),
        9 => two_molecule_model(shared.e1, shared.delta_e),
        n => Err(Error::Usage(format!(
            "cannot infer a spectrum for {n} levels; pass --spectrum"
        ))),
    }
}

fn engine(shared: &SharedArgs, levels: usize) -> Result<YieldEngine> {
    if !shared.oracle {
        return Ok(YieldEngine::Analytic);
    }
    let resolution = shared.resolution.unwrap_or(if levels <= 4 {
        ORACLE_RESOLUTION_SMALL
    } else {
        ORACLE_RESOLUTION_LARGE
    });
    Ok(YieldEngine::Oracle(
        BruteForce::new(resolution)?.with_symmetry(shared.symmetric),
    ))
}

fn json_numbers(values: &[f64]) -> String {
    let rounded: Vec<f64> = values.iter().map(|&x| round_sig(x)).collect();
    serde_json::to_string(&rounded).expect("numbers serialize")
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Executes the command and returns the artifact text.
pub fn run(config: &RunConfig) -> Result<String> {
    let shared = &config.shared;
    let ctx = ThermalContext::new(shared.beta)?;
    let format = |default| shared.format.unwrap_or(default);

    let out = match &config.command {
        Command::Lorenz { state, spectrum } => {
            let file = read_state_file(state)?;
            let spec = spectrum_for(&file, spectrum.as_deref(), shared)?;
            let v = file.into_state(&spec)?.populations()?;
            let curve = build_curve(&v, &spec, ctx)?;
            match format(OutputFormat::Csv) {
                OutputFormat::Csv => curve.to_csv(),
                OutputFormat::Json => {
                    let knots: Vec<[f64; 2]> =
                        curve.knots().iter().map(|k| [round_sig(k.x), round_sig(k.y)]).collect();
                    serde_json::json!({ "knots": knots }).to_string()
                }
            }
        }
        Command::Check {
            initial,
            final_state,
            spectrum,
        } => {
            let init = read_state_file(initial)?;
            let fin = read_state_file(final_state)?;
            let spec_p = spectrum_for(&init, spectrum.as_deref(), shared)?;
            let spec_q = spectrum_for(&fin, spectrum.as_deref(), shared)?;
            let p = build_curve(&init.into_state(&spec_p)?.populations()?, &spec_p, ctx)?;
            let q = build_curve(&fin.into_state(&spec_q)?.populations()?, &spec_q, ctx)?;
            thermomajorizes(&p, &q)?.to_string()
        }
        Command::Yield { definition } => {
            let def = YieldDefinition::from(*definition);
            let params = PhotoswitchParams::new(shared.e1, shared.delta_e, shared.p, shared.lambda)?;
            let levels = if def == YieldDefinition::Single { 3 } else { 9 };
            let report = engine(shared, levels)?.evaluate(def, &params, ctx)?;
            match format(OutputFormat::Json) {
                OutputFormat::Json => report.to_json(),
                OutputFormat::Csv => format!("definition,value\n{},{}", def, fmt_sig(report.value)),
            }
        }
        Command::SweepGap {
            gap_min,
            gap_max,
            gap_step,
            lambda_hi,
            lambda_lo,
        } => {
            let gaps = grid(*gap_min, *gap_max, *gap_step)?;
            let rows = gap_sweep_with(&engine(shared, 9)?, shared.e1, shared.p, *lambda_hi, *lambda_lo, &gaps, ctx)?;
            match format(OutputFormat::Csv) {
                OutputFormat::Csv => gap_sweep_csv(&rows),
                OutputFormat::Json => gap_sweep_json(&rows),
            }
        }
        Command::Map2d {
            p_min,
            p_max,
            p_step,
            gap_min,
            gap_max,
            gap_step,
        } => {
            let ps = grid(*p_min, *p_max, *p_step)?;
            let gaps = grid(*gap_min, *gap_max, *gap_step)?;
            let map = advantage_map_with(&engine(shared, 9)?, shared.e1, &ps, &gaps, ctx)?;
            match format(OutputFormat::Csv) {
                OutputFormat::Csv => map.to_csv(),
                OutputFormat::Json => map.to_json(),
            }
        }
        Command::FitRidge { map } => {
            let text = fs::read_to_string(map).map_err(|e| Error::Io(format!("{}: {e}", map.display())))?;
            let map = AdvantageMap::from_csv(&text)?;
            let points = ridge_extract(&map)?;
            match format(OutputFormat::Json) {
                OutputFormat::Json => fit_ridge(&points)?.summary_json(),
                OutputFormat::Csv => ridge_csv(&points),
            }
        }
        Command::Gibbs { two_molecule } => {
            let spec = if *two_molecule {
                two_molecule_model(shared.e1, shared.delta_e)?
            } else {
                single_molecule_model(shared.e1, shared.delta_e)?
            };
            let g = gibbs_state(&spec, ctx);
            match format(OutputFormat::Json) {
                OutputFormat::Json => json_numbers(g.as_slice()),
                OutputFormat::Csv => {
                    let mut out = String::from("label,probability\n");
                    for (level, p) in spec.levels().iter().zip(g.as_slice()) {
                        out.push_str(&format!("{},{}\n", level.label, fmt_sig(*p)));
                    }
                    out
                }
            }
        }
    };
    Ok(with_newline(out))
}

/// Exit status for an error: 2 for usage problems, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) => 2,
        _ => 1,
    }
}
