//! Command-line front end: spectra, splittings, widths, coefficient tables,
//! the acceptance suite and parameter sweeps.
//!
//! Exit status: 0 success, 1 invalid request, 2 outside the asymptotic
//! regime, 3 verification failure.

pub mod verify;

use crate::error::Error;
use crate::model::{Case, Convention, Landmarks, PotentialSpec};
use crate::oracle::{self, GridConfig};
use crate::series::{self, QPolynomial};
use crate::specfun::EllipticData;
use crate::tunneling::{self, BenderWuParameters};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Environment variable overriding the grid-oracle bisection tolerance.
pub const PRECISION_ENV: &str = "ANHARMONIC_PRECISION";

/// Header of every CSV table.
pub const CSV_HEADER: [&str; 7] =
    ["sweep_value", "q0", "E0", "q_deviation", "delta_E_formula", "delta_E_numeric", "rel_dev"];

/// Below this tunneling exponent the exponential is not small.
const SMALL_EXPONENT: f64 = 3.0;

#[derive(Debug, Parser)]
#[command(name = "anharmonic", version, about = "Asymptotic spectra and tunneling of quartic oscillators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Truncated-series eigenvalues, optionally against the grid solver.
    Spectrum(SpectrumArgs),
    /// Double-well level splitting.
    Splitting(TunnelingArgs),
    /// Inverted-well decay width, Im E.
    Width(TunnelingArgs),
    /// Exact-rational series and recurrence tables.
    Coefficients(CoefficientsArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
    /// Repeat spectrum, splitting or width over a parameter axis.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Bounded,
    Double,
    Inverted,
}

impl From<CaseArg> for Case {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Bounded => Case::BoundedQuartic,
            CaseArg::Double => Case::DoubleWell,
            CaseArg::Inverted => Case::InvertedDoubleWell,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ConventionArg {
    #[default]
    Half,
    One,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Half => Convention::Half,
            ConventionArg::One => Convention::One,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    Json,
    Csv,
    #[default]
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Harmonic strength h⁴ (> 0).
    #[arg(long)]
    pub h4: Option<f64>,
    /// Quartic strength c² (> 0).
    #[arg(long)]
    pub c2: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    pub convention: ConventionArg,
}

#[derive(Debug, Clone, Args)]
pub struct LevelArgs {
    /// Level indices n (comma separated).
    #[arg(long, value_delimiter = ',', conflicts_with = "q0")]
    pub n: Vec<u32>,
    /// Odd level parameters q₀ = 2n + 1 (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub q0: Vec<u32>,
}

impl LevelArgs {
    fn levels(&self) -> Result<Vec<u32>, CliError> {
        if !self.q0.is_empty() {
            self.q0
                .iter()
                .map(|&q| {
                    if q % 2 == 1 {
                        Ok((q - 1) / 2)
                    } else {
                        Err(CliError::Validation(format!("q0 must be odd, got {q}")))
                    }
                })
                .collect()
        } else if self.n.is_empty() {
            Ok(vec![0])
        } else {
            Ok(self.n.clone())
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NumericArgs {
    /// Compare with the finite-difference grid solver.
    #[arg(long)]
    pub numeric: bool,
    /// Grid points for the numerical comparison.
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub levels: LevelArgs,
    /// Number of series terms.
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TunnelingArgs {
    /// Optional; must match the command when given.
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub levels: LevelArgs,
    /// Series terms used for E₀ and dE/dq.
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CoefficientsArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Run only this criterion (1 to 10).
    #[arg(long)]
    pub criterion: Option<u8>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    Spectrum,
    Splitting,
    Width,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// vary h⁴ at fixed c²
    H4,
    /// vary c² at fixed h⁴
    C2,
    /// vary h⁶/c² at fixed c²
    H6OverC2,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Quantity computed at each point.
    #[arg(long = "of", value_enum, default_value = "splitting")]
    pub target: SweepTarget,
    #[arg(long, value_enum, default_value = "h6-over-c2")]
    pub axis: SweepAxis,
    /// Axis values (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    pub values: Vec<f64>,
    /// Case for spectrum sweeps; implied by splitting and width.
    #[arg(long, value_enum)]
    pub case: Option<CaseArg>,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub levels: LevelArgs,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[command(flatten)]
    pub numeric: NumericArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Library(#[from] Error),
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialise report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Invalid = 1,
    OutOfRegime = 2,
    VerificationFailed = 3,
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Library(Error::OutOfRegime(_)) => ExitStatus::OutOfRegime,
            _ => ExitStatus::Invalid,
        }
    }
}

/// Echo of the request parameters and derived scales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PotentialEcho {
    pub case: Case,
    pub convention: Convention,
    pub h4: f64,
    pub c2: f64,
    pub h2: f64,
    pub h6_over_c2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub landmarks: Option<Landmarks>,
}

impl PotentialEcho {
    fn new(spec: &PotentialSpec) -> Self {
        Self {
            case: spec.case,
            convention: spec.convention,
            h4: spec.h4,
            c2: spec.c2,
            h2: spec.h2(),
            h6_over_c2: spec.h6_over_c2(),
            landmarks: spec.landmarks().ok(),
        }
    }
}

/// One level at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct LevelRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_value: Option<f64>,
    pub n: u32,
    pub q0: u32,
    #[serde(rename = "E0")]
    pub e0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    /// splitting, or `|Im E|` for the inverted well
    #[serde(rename = "delta_E_formula", skip_serializing_if = "Option::is_none")]
    pub delta_e_formula: Option<f64>,
    #[serde(rename = "delta_E_numeric", skip_serializing_if = "Option::is_none")]
    pub delta_e_numeric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_dev: Option<f64>,
    #[serde(rename = "delta_E_mass_one", skip_serializing_if = "Option::is_none")]
    pub mass_one: Option<f64>,
    #[serde(rename = "delta_E_mu_lambda", skip_serializing_if = "Option::is_none")]
    pub mu_lambda: Option<f64>,
    #[serde(rename = "im_E", skip_serializing_if = "Option::is_none")]
    pub imaginary_part: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bender_wu: Option<BenderWuParameters>,
    pub truncation_order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEcho {
    pub target: &'static str,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialEcho>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Vec<verify::CriterionReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Self {
            command,
            potential: None,
            warnings: Vec::new(),
            levels: Vec::new(),
            sweep: None,
            coefficients: None,
            verification: None,
            passed: None,
        }
    }

    pub fn status(&self) -> ExitStatus {
        match self.passed {
            Some(false) => ExitStatus::VerificationFailed,
            _ => ExitStatus::Success,
        }
    }
}

/// Grid tolerance from [`PRECISION_ENV`], or the default.
pub fn grid_tolerance() -> Result<f64, CliError> {
    match std::env::var(PRECISION_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(CliError::Validation(format!("{PRECISION_ENV} must be a positive number, got {s:?}"))),
        },
        Err(_) => Ok(verify::DEFAULT_GRID_TOLERANCE),
    }
}

fn spec_from(case: Case, params: &ParamArgs) -> Result<PotentialSpec, CliError> {
    let h4 = params.h4.ok_or_else(|| CliError::Validation("--h4 is required".into()))?;
    let c2 = params.c2.ok_or_else(|| CliError::Validation("--c2 is required".into()))?;
    Ok(PotentialSpec::new(case, h4, c2, params.convention.into())?)
}

fn require_order(order: usize) -> Result<(), CliError> {
    if order == 0 {
        Err(CliError::Validation("--order must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn require_case(given: Option<CaseArg>, needed: Case, command: &str) -> Result<(), CliError> {
    match given.map(Case::from) {
        Some(c) if c != needed => Err(CliError::Validation(format!("{command} requires case {needed}, got {c}"))),
        _ => Ok(()),
    }
}

/// Executes a parsed request.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Spectrum(a) => {
            require_order(a.order)?;
            let spec = spec_from(a.case.into(), &a.params)?;
            spectrum(&spec, &a.levels.levels()?, a.order, &a.numeric)
        }
        Command::Splitting(a) => {
            require_case(a.case, Case::DoubleWell, "splitting")?;
            require_order(a.order)?;
            let spec = spec_from(Case::DoubleWell, &a.params)?;
            splitting(&spec, &a.levels.levels()?, a.order, &a.numeric)
        }
        Command::Width(a) => {
            require_case(a.case, Case::InvertedDoubleWell, "width")?;
            require_order(a.order)?;
            if a.numeric.numeric {
                return Err(CliError::Validation("no grid comparison exists for resonance widths".into()));
            }
            let spec = spec_from(Case::InvertedDoubleWell, &a.params)?;
            width(&spec, &a.levels.levels()?, a.order)
        }
        Command::Coefficients(a) => {
            require_order(a.order)?;
            if a.output.format == Format::Csv {
                return Err(CliError::Validation("coefficients support json and text output".into()));
            }
            coefficients(a.case.into(), a.order)
        }
        Command::Verify(a) => {
            if a.output.format == Format::Csv {
                return Err(CliError::Validation("verify supports json and text output".into()));
            }
            run_verify(a.criterion)
        }
        Command::Sweep(a) => sweep(a),
    }
}

fn output_of(cli: &Cli) -> &OutputArgs {
    match &cli.command {
        Command::Spectrum(a) => &a.output,
        Command::Splitting(a) | Command::Width(a) => &a.output,
        Command::Coefficients(a) => &a.output,
        Command::Verify(a) => &a.output,
        Command::Sweep(a) => &a.output,
    }
}

fn grid_config(spec: &PotentialSpec, levels: usize, numeric: &NumericArgs) -> Result<GridConfig, CliError> {
    Ok(GridConfig::for_spec(spec, levels, numeric.points)?.with_tolerance(grid_tolerance()?))
}

fn spectrum(spec: &PotentialSpec, levels: &[u32], order: usize, numeric: &NumericArgs) -> Result<Report, CliError> {
    let mut report = Report::new("spectrum");
    report.potential = Some(PotentialEcho::new(spec));
    let (half, back) = spec.to_half();
    let series = series::energy_series(spec.case, order)?;
    let grid = if numeric.numeric {
        if spec.case == Case::InvertedDoubleWell {
            return Err(CliError::Validation("the inverted well has no bound states to compare with".into()));
        }
        let k = *levels.iter().max().expect("at least one level") as usize + 1;
        Some(oracle::eig_lowest(spec, &grid_config(spec, k, numeric)?, k)?)
    } else {
        None
    };
    for &n in levels {
        let q0 = 2 * n + 1;
        let q = f64::from(q0);
        if let Some(w) = regime_warning(&half, q) {
            report.warnings.push(format!("n = {n}: {w}"));
        }
        let e0 = series.value(q, half.h2(), half.c2) * back;
        let numeric_value = grid.as_ref().map(|g| g.best()[n as usize]);
        report.levels.push(LevelRow {
            n,
            q0,
            e0,
            delta_e_numeric: numeric_value,
            rel_dev: numeric_value.map(|v| ((e0 - v) / v).abs()),
            truncation_order: order,
            ..LevelRow::default()
        });
    }
    Ok(report)
}

/// Warning text when a series is evaluated outside its asymptotic regime.
fn regime_warning(half: &PotentialSpec, q: f64) -> Option<String> {
    match half.case {
        Case::DoubleWell => EllipticData::new(half, q).err().map(|e| e.to_string()),
        Case::InvertedDoubleWell => tunneling::turning_points(half, q).err().map(|e| e.to_string()),
        Case::BoundedQuartic => (half.h6_over_c2() < 16.0 * q)
            .then(|| format!("h^6/c^2 = {} is not large compared with 16 q", half.h6_over_c2())),
    }
}

fn splitting(spec: &PotentialSpec, levels: &[u32], order: usize, numeric: &NumericArgs) -> Result<Report, CliError> {
    let mut report = Report::new("splitting");
    report.potential = Some(PotentialEcho::new(spec));
    let (half, _) = spec.to_half();
    let config = if numeric.numeric {
        let k = 2 * *levels.iter().max().expect("at least one level") as usize + 2;
        Some(grid_config(spec, k, numeric)?)
    } else {
        None
    };
    for &n in levels {
        let q0 = 2 * n + 1;
        EllipticData::new(&half, f64::from(q0))?;
        let r = tunneling::level_splitting_with_order(spec, q0, order)?;
        if r.exponent < SMALL_EXPONENT {
            report.warnings.push(format!("n = {n}: tunneling exponent {:.3} is not large", r.exponent));
        }
        let formula = r.splitting.expect("double well splitting");
        let numeric_value = match &config {
            Some(c) => match oracle::splitting_numeric(spec, c, n as usize) {
                Ok(v) => Some(v),
                Err(e) => {
                    report.warnings.push(format!("n = {n}: numerical splitting unavailable: {e}"));
                    None
                }
            },
            None => None,
        };
        let (mass_one, mu_lambda) = if spec.convention == Convention::One {
            let mu = (0.5 * spec.h4).sqrt();
            let lambda = 2.0 * spec.c2;
            (Some(tunneling::splitting_mass_one(spec, q0)?), Some(tunneling::splitting_mu_lambda(mu, lambda, q0)?))
        } else {
            (None, None)
        };
        report.levels.push(LevelRow {
            n,
            q0,
            e0: r.e0,
            q_deviation: Some(r.q_deviation),
            exponent: Some(r.exponent),
            delta_e_formula: Some(formula),
            delta_e_numeric: numeric_value,
            rel_dev: numeric_value.map(|v| ((formula - v) / v).abs()),
            mass_one,
            mu_lambda,
            truncation_order: r.truncation_order,
            ..LevelRow::default()
        });
    }
    Ok(report)
}

fn width(spec: &PotentialSpec, levels: &[u32], order: usize) -> Result<Report, CliError> {
    let mut report = Report::new("width");
    report.potential = Some(PotentialEcho::new(spec));
    let (half, _) = spec.to_half();
    for &n in levels {
        let q0 = 2 * n + 1;
        tunneling::turning_points(&half, f64::from(q0))?;
        let r = tunneling::complex_eigenvalue(spec, q0, order)?;
        if r.exponent < SMALL_EXPONENT {
            report.warnings.push(format!("n = {n}: tunneling exponent h^6/6c^2 = {:.3} is not large", r.exponent));
        }
        report.levels.push(LevelRow {
            n,
            q0,
            e0: r.e0,
            q_deviation: Some(r.q_deviation),
            exponent: Some(r.exponent),
            delta_e_formula: r.imaginary_part,
            imaginary_part: r.imaginary_part,
            bender_wu: r.bender_wu,
            truncation_order: order,
            ..LevelRow::default()
        });
    }
    Ok(report)
}

fn table_json(table: &BTreeMap<i64, QPolynomial>) -> Value {
    let map: Map<String, Value> =
        table.iter().map(|(j, p)| (j.to_string(), json!(p.to_rational_strings()))).collect();
    Value::Object(map)
}

fn coefficients(case: Case, order: usize) -> Result<Report, CliError> {
    let mut report = Report::new("coefficients");
    let energy = series::energy_series(case, order)?;
    let mut tables = Map::new();
    let delta = match case {
        Case::DoubleWell => {
            let band = series::a_coeff_table_double();
            tables.insert("a_band".into(), table_json(&band.entries));
            series::delta_series_double(order)?
        }
        _ => {
            for i in 1..=2u32 {
                tables.insert(format!("S_{}", 2 * i), table_json(&series::s_coeffs(i)?));
            }
            for i in 1..order {
                tables.insert(format!("P_{i}"), table_json(&series::p_coeffs(i)));
            }
            series::delta_series_inverted(order)?
        }
    };
    report.coefficients = Some(json!({
        "case": case,
        "order": order,
        "energy": energy.to_json(),
        "energy_text": energy.render("E"),
        "delta": delta.to_json(),
        "delta_text": delta.render("Delta"),
        "tables": tables,
    }));
    Ok(report)
}

fn run_verify(criterion: Option<u8>) -> Result<Report, CliError> {
    let options = verify::SuiteOptions { grid_tolerance: grid_tolerance()? };
    let results = match criterion {
        Some(id) => vec![verify::run_one(id, &options)
            .ok_or_else(|| CliError::Validation(format!("criterion must be 1 to 10, got {id}")))?],
        None => verify::run_all(&options),
    };
    let mut report = Report::new("verify");
    report.passed = Some(results.iter().all(|r| r.passed));
    report.verification = Some(results);
    Ok(report)
}

fn sweep_spec(a: &SweepArgs, case: Case, value: f64) -> Result<PotentialSpec, CliError> {
    let mut params = a.params.clone();
    match a.axis {
        SweepAxis::H4 => params.h4 = Some(value),
        SweepAxis::C2 => params.c2 = Some(value),
        SweepAxis::H6OverC2 => {
            let c2 = params.c2.unwrap_or(1.0);
            params.c2 = Some(c2);
            params.h4 = Some((value * c2).powf(2.0 / 3.0));
        }
    }
    spec_from(case, &params)
}

fn sweep(a: &SweepArgs) -> Result<Report, CliError> {
    require_order(a.order)?;
    if a.values.is_empty() {
        return Err(CliError::Validation("--values must not be empty".into()));
    }
    let (case, name) = match a.target {
        SweepTarget::Splitting => {
            require_case(a.case, Case::DoubleWell, "splitting")?;
            (Case::DoubleWell, "splitting")
        }
        SweepTarget::Width => {
            require_case(a.case, Case::InvertedDoubleWell, "width")?;
            (Case::InvertedDoubleWell, "width")
        }
        SweepTarget::Spectrum => {
            let case = a.case.ok_or_else(|| CliError::Validation("spectrum sweeps need --case".into()))?;
            (case.into(), "spectrum")
        }
    };
    let levels = a.levels.levels()?;
    let specs = a.values.iter().map(|&v| sweep_spec(a, case, v)).collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<Result<Report, CliError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = specs
            .iter()
            .map(|spec| {
                let levels = &levels;
                scope.spawn(move || match a.target {
                    SweepTarget::Spectrum => spectrum(spec, levels, a.order, &a.numeric),
                    SweepTarget::Splitting => splitting(spec, levels, a.order, &a.numeric),
                    SweepTarget::Width => {
                        if a.numeric.numeric {
                            Err(CliError::Validation("no grid comparison exists for resonance widths".into()))
                        } else {
                            width(spec, levels, a.order)
                        }
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut report = Report::new("sweep");
    report.sweep = Some(SweepEcho { target: name, axis: a.axis, values: a.values.clone() });
    for (value, point) in a.values.iter().zip(reports) {
        let point = point?;
        report.warnings.extend(point.warnings.into_iter().map(|w| format!("at {value}: {w}")));
        report.levels.extend(point.levels.into_iter().map(|row| LevelRow { sweep_value: Some(*value), ..row }));
    }
    Ok(report)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

/// CSV with the fixed [`CSV_HEADER`].
pub fn render_csv(report: &Report) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in &report.levels {
        w.write_record([
            row.sweep_value.map(|v| v.to_string()).unwrap_or_default(),
            row.q0.to_string(),
            format!("{:e}", row.e0),
            fmt_opt(row.q_deviation),
            fmt_opt(row.delta_e_formula),
            fmt_opt(row.delta_e_numeric),
            fmt_opt(row.rel_dev),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

pub fn render_json(report: &Report) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(report)?;
    s.push('\n');
    Ok(s)
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    if let Some(p) = &report.potential {
        let _ = writeln!(
            out,
            "{} well, {:?} convention: h^4 = {}, c^2 = {}, h^6/c^2 = {}",
            p.case, p.convention, p.h4, p.c2, p.h6_over_c2
        );
    }
    if let Some(s) = &report.sweep {
        let _ = writeln!(out, "sweep of {} over {:?}", s.target, s.axis);
    }
    if !report.levels.is_empty() {
        let _ = writeln!(
            out,
            "{:>12} {:>4} {:>22} {:>12} {:>12} {:>12} {:>12}",
            "sweep", "q0", "E0", "q-q0", "delta/ImE", "numeric", "rel_dev"
        );
        for r in &report.levels {
            let cell = |v: Option<f64>| v.map(|x| format!("{x:.5e}")).unwrap_or_else(|| "-".into());
            let sweep = r.sweep_value.map(|v| v.to_string()).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{:>12} {:>4} {:>22.12} {:>12} {:>12} {:>12} {:>12}",
                sweep,
                r.q0,
                r.e0,
                cell(r.q_deviation),
                cell(r.delta_e_formula),
                cell(r.delta_e_numeric),
                cell(r.rel_dev)
            );
            if let (Some(a), Some(b)) = (r.mass_one, r.mu_lambda) {
                let _ = writeln!(out, "{:>17} mass-1 splitting {a:.10e}, (mu, lambda) form {b:.10e}", "");
            }
            if let Some(bw) = r.bender_wu {
                let _ = writeln!(out, "{:>17} K = {}, epsilon = {}", "", bw.k, bw.epsilon);
            }
        }
    }
    if let Some(c) = &report.coefficients {
        for key in ["energy_text", "delta_text"] {
            if let Some(s) = c[key].as_str() {
                let _ = writeln!(out, "{s}");
            }
        }
        if let Some(tables) = c["tables"].as_object() {
            for (name, table) in tables {
                let _ = writeln!(out, "{name}:");
                let mut rows: Vec<(i64, &Value)> = table
                    .as_object()
                    .into_iter()
                    .flatten()
                    .filter_map(|(j, v)| j.parse().ok().map(|j| (j, v)))
                    .collect();
                rows.sort_by_key(|&(j, _)| j);
                for (j, coeffs) in rows {
                    let _ = writeln!(out, "  {j:>3}: {}", coefficient_list(coeffs));
                }
            }
        }
    }
    if let Some(v) = &report.verification {
        for r in v {
            let _ = writeln!(out, "{r}");
        }
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

fn coefficient_list(v: &Value) -> String {
    let parts: Vec<&str> = v.as_array().into_iter().flatten().filter_map(Value::as_str).collect();
    format!("[{}]", parts.join(", "))
}

pub fn render(report: &Report, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => render_json(report),
        Format::Csv => render_csv(report),
        Format::Text => Ok(render_text(report)),
    }
}

/// Parses `args`, runs the request, writes the report and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::Invalid as i32 } else { ExitStatus::Success as i32 };
        }
    };
    let output = output_of(&cli).clone();
    let result = execute(&cli).and_then(|report| {
        let text = render(&report, output.format)?;
        match &output.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        if output.format != Format::Text {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
        }
        Ok(report.status())
    });
    match result {
        Ok(status) => status as i32,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_status() as i32
        }
    }
}
