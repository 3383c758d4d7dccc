//! Command-line front end.
//!
//! Six subcommands drive the library: `precision` (single working points),
//! `scan` (dense (t, μ) grids), `optimize` (per-N minimisation), `figure`
//! (canned figure-data regenerators), `bounds` (analytic bound reports),
//! and `check` (the randomized oracle cross-check). Output is CSV (default)
//! or JSON, always preceded by an echo of the fully resolved configuration
//! so every file regenerates bit-for-bit from its own header.
//!
//! Parameters resolve in three layers: built-in defaults (an alkali-vapour
//! magnetometry working point: N = 10¹¹, γ = 67, ω = 3.6·10⁻³, t = 1 ms,
//! −8 dB squeezing), then a `key = value` config file, then command-line
//! flags. Numbers are printed in shortest round-trip form, so identical
//! configs produce bitwise-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{self, MixedNoiseSpec};
use crate::channel::NoiseModel;
use crate::error::{Error, Result};
use crate::ghz;
use crate::metrology::{self, Geometry, ProbeSpec};
use crate::optimizer::{self, SearchDomain};
use crate::oracle;
use crate::probes;

/// Default random seed for oracle draws ("magf" in ASCII).
pub const DEFAULT_SEED: u64 = 0x6D61_6766;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

/// Noisy-frequency-estimation precision engine.
#[derive(Debug, Parser)]
#[command(name = "magfreq", version, about, max_term_width = 100)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate Δ²ω·T and the gain over the coherent benchmark at one or
    /// more probe sizes.
    Precision(CommonArgs),
    /// Dense (t, μ) grid of Δ²ω·T values; degenerate points are kept as
    /// `error` markers. --t and --mu/--db accept value, list, or
    /// lo:hi:count log-range syntax here.
    Scan(CommonArgs),
    /// Minimise Δ²ω·T over (t, μ) for each probe size.
    Optimize(CommonArgs),
    /// Regenerate the data behind a named figure.
    Figure {
        /// One of: fig2-squeezing, fig2-time, fig3, fig4.
        name: FigureName,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Report the analytic bound quantities for the configured noise.
    Bounds(CommonArgs),
    /// Cross-check every closed form against the dense oracle.
    Check {
        /// fast: N ≤ 5, 12 draws; full: N ≤ 8, 50 draws.
        #[arg(long, value_enum, default_value_t = CheckDepth::Fast)]
        depth: CheckDepth,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FigureName {
    /// Precision vs squeezing strength at fixed interrogation time.
    Fig2Squeezing,
    /// Precision vs interrogation time at fixed squeezing.
    Fig2Time,
    /// Optimised precision vs N under mixed noise, with asymptotes.
    Fig3,
    /// Minimised M quantity vs N for three noise/signal pairs.
    Fig4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckDepth {
    Fast,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GeometryArg {
    /// Scenario (a): probe along x, measure Ĵ_y.
    A,
    /// Scenario (b): probe along y, measure Ĵ_x.
    B,
    CssX,
    CssY,
    Ghz,
}

impl From<GeometryArg> for Geometry {
    fn from(g: GeometryArg) -> Self {
        match g {
            GeometryArg::A => Geometry::ScenarioA,
            GeometryArg::B => Geometry::ScenarioB,
            GeometryArg::CssX => Geometry::CssX,
            GeometryArg::CssY => Geometry::CssY,
            GeometryArg::Ghz => Geometry::Ghz,
        }
    }
}

/// Flags shared by every subcommand. All optional; unset values fall back
/// to the config file and then to the built-in defaults.
#[derive(Debug, Clone, Args, Default)]
struct CommonArgs {
    /// Total dephasing rate γ (1/s).
    #[arg(long)]
    gamma: Option<f64>,
    /// Signal frequency ω (1/s).
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Spin relaxation time T₁ (s); requires --t2, excludes --gamma.
    #[arg(long)]
    t1: Option<f64>,
    /// Coherence time T₂ (s); requires --t1, excludes --gamma.
    #[arg(long)]
    t2: Option<f64>,
    /// Parallel noise fraction ε ∈ [0, 1] (with --gamma).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Probe size: value (1e11), list (1e2,1e4), or log-range lo:hi:count.
    #[arg(long, short)]
    n: Option<String>,
    /// Probe geometry.
    #[arg(long, value_enum)]
    geometry: Option<GeometryArg>,
    /// Twist strength μ (excludes --db and --schedule).
    #[arg(long)]
    mu: Option<String>,
    /// Squeezing in dB, negative = squeezed (excludes --mu and --schedule).
    #[arg(long, allow_hyphen_values = true)]
    db: Option<String>,
    /// Interrogation time t (s) (excludes --schedule).
    #[arg(long, short)]
    t: Option<String>,
    /// Analytic schedule: `b`, or `a:<s>` with exponent s > 1. Sets both
    /// t and μ from N.
    #[arg(long)]
    schedule: Option<String>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// key = value config file, overridden by explicit flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Random seed for oracle draws.
    #[arg(long)]
    seed: Option<u64>,
}

// ---------------------------------------------------------------------------
// Configuration resolution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum NoiseInput {
    Weights { gamma: f64, alpha_x: f64, alpha_y: f64, alpha_z: f64 },
    Mixed { gamma: f64, epsilon: f64 },
    Relaxation { t1: f64, t2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SqueezeSpec {
    Mu(f64),
    Db(f64),
    /// Geometry carries no squeezing parameter.
    None,
}

#[derive(Debug, Clone, PartialEq)]
enum TimeSpec {
    Value(f64),
    ScheduleB,
    ScheduleA(f64),
}

#[derive(Debug, Clone)]
struct RunConfig {
    noise_input: NoiseInput,
    omega: f64,
    n_values: Vec<f64>,
    geometry: Geometry,
    squeeze: SqueezeSpec,
    time: TimeSpec,
    /// Grid axes (scan only): full lists behind the scalar time/squeeze.
    t_list: Vec<f64>,
    mu_is_db: bool,
    mu_list: Vec<f64>,
    format: OutputFormat,
    out: Option<PathBuf>,
    seed: u64,
}

impl RunConfig {
    fn noise(&self) -> Result<NoiseModel> {
        match self.noise_input {
            NoiseInput::Weights { gamma, alpha_x, alpha_y, alpha_z } => {
                NoiseModel::new(gamma, alpha_x, alpha_y, alpha_z)
            }
            NoiseInput::Mixed { gamma, epsilon } => NoiseModel::mixed(gamma, epsilon),
            NoiseInput::Relaxation { t1, t2 } => {
                bounds::depolarization_mapping(t1, t2)?.noise_model()
            }
        }
    }

    fn mixed_spec(&self) -> Result<MixedNoiseSpec> {
        match self.noise_input {
            NoiseInput::Weights { gamma, alpha_z, .. } => MixedNoiseSpec::new(gamma, alpha_z),
            NoiseInput::Mixed { gamma, epsilon } => MixedNoiseSpec::new(gamma, epsilon),
            NoiseInput::Relaxation { t1, t2 } => bounds::depolarization_mapping(t1, t2),
        }
    }

    /// Resolved (t, μ) for one probe size.
    fn working_point(&self, n: f64) -> Result<(f64, f64)> {
        let gamma = self.noise()?.gamma();
        match self.time {
            TimeSpec::ScheduleB => optimizer::schedule_b(n, gamma, self.omega),
            TimeSpec::ScheduleA(s) => optimizer::schedule_a(n, s, 1.0 / gamma, 1.0),
            TimeSpec::Value(t) => {
                let mu = match self.squeeze {
                    SqueezeSpec::None => 0.0,
                    SqueezeSpec::Mu(mu) => mu,
                    SqueezeSpec::Db(db) => probes::mu_from_db(n, db)?,
                };
                Ok((t, mu))
            }
        }
    }

    /// Key/value echo of every resolved field, in stable order.
    fn echo(&self) -> Vec<(String, String)> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        match &self.noise_input {
            NoiseInput::Weights { gamma, alpha_x, alpha_y, alpha_z } => {
                pairs.push(("gamma".into(), fmt(*gamma)));
                pairs.push(("alpha_x".into(), fmt(*alpha_x)));
                pairs.push(("alpha_y".into(), fmt(*alpha_y)));
                pairs.push(("alpha_z".into(), fmt(*alpha_z)));
            }
            NoiseInput::Mixed { gamma, epsilon } => {
                pairs.push(("gamma".into(), fmt(*gamma)));
                pairs.push(("epsilon".into(), fmt(*epsilon)));
            }
            NoiseInput::Relaxation { t1, t2 } => {
                pairs.push(("t1".into(), fmt(*t1)));
                pairs.push(("t2".into(), fmt(*t2)));
            }
        }
        pairs.push(("omega".into(), fmt(self.omega)));
        pairs.push((
            "n".into(),
            self.n_values.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(","),
        ));
        pairs.push((
            "geometry".into(),
            match self.geometry {
                Geometry::ScenarioA => "a",
                Geometry::ScenarioB => "b",
                Geometry::CssX => "css-x",
                Geometry::CssY => "css-y",
                Geometry::Ghz => "ghz",
            }
            .into(),
        ));
        let join = |values: &[f64]| values.iter().map(|v| fmt(*v)).collect::<Vec<_>>().join(",");
        match self.squeeze {
            SqueezeSpec::Mu(_) => pairs.push(("mu".into(), join(&self.mu_list))),
            SqueezeSpec::Db(_) => pairs.push(("db".into(), join(&self.mu_list))),
            SqueezeSpec::None => {}
        }
        match self.time {
            TimeSpec::Value(_) => pairs.push(("t".into(), join(&self.t_list))),
            TimeSpec::ScheduleB => pairs.push(("schedule".into(), "b".into())),
            TimeSpec::ScheduleA(s) => pairs.push(("schedule".into(), format!("a:{}", fmt(s)))),
        }
        pairs.push(("seed".into(), self.seed.to_string()));
        pairs
    }
}

/// Parse `value`, `v1,v2,...`, or `lo:hi:count` (log-spaced).
fn parse_value_list(text: &str, name: &str) -> Result<Vec<f64>> {
    let bad = |detail: &str| Error::InvalidParameter(format!("--{name} `{text}`: {detail}"));
    let parse_one = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| bad(&format!("`{s}` is not a number")))
    };
    if let Some((lo_hi, count)) = text.rsplit_once(':') {
        if let Some((lo, hi)) = lo_hi.split_once(':') {
            let (lo, hi) = (parse_one(lo)?, parse_one(hi)?);
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| bad("log-range count must be an integer"))?;
            if !(lo > 0.0 && hi > lo && count >= 2) {
                return Err(bad("log-range needs 0 < lo < hi and count >= 2"));
            }
            let (llo, lhi) = (lo.ln(), hi.ln());
            return Ok((0..count)
                .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
                .collect());
        }
    }
    text.split(',').map(parse_one).collect()
}

/// Parse a probe-size list, rounding each entry to the nearest integer:
/// particle numbers are counts, and log-range grid points land between
/// them. Above 2⁵³ every representable float is already integral.
fn parse_n_list(text: &str) -> Result<Vec<f64>> {
    let values = parse_value_list(text, "n")?;
    values
        .into_iter()
        .map(|v| {
            let n = v.round();
            if !(n.is_finite() && n >= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "probe sizes must be >= 1, got {v}"
                )));
            }
            Ok(n)
        })
        .collect()
}

/// Minimal `key = value` config format: blank lines and `#` comments are
/// skipped, `[section]` headers are allowed (keys stay flat), later keys
/// win.
fn parse_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
    })?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || (line.starts_with('[') && line.ends_with(']')) {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidParameter(format!(
                "config {}:{}: expected key = value, got `{raw}`",
                path.display(),
                lineno + 1
            )));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Merge defaults ← config file ← flags into a validated RunConfig.
/// `scan_grids` allows --t/--mu/--db to stay full lists; otherwise they
/// must resolve to single values.
fn resolve(args: &CommonArgs, scan_grids: bool) -> Result<RunConfig> {
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let file_f64 = |key: &str| -> Result<Option<f64>> {
        match file.get(key) {
            Some(v) => v.parse::<f64>().map(Some).map_err(|_| {
                Error::InvalidParameter(format!("config {key} = `{v}` is not a number"))
            }),
            None => Ok(None),
        }
    };

    // --- noise: exactly one of (gamma [+ epsilon | alpha weights], T1/T2) ---
    let gamma = args.gamma.map(Ok).or_else(|| file_f64("gamma").transpose()).transpose()?;
    let epsilon = args.epsilon.map(Ok).or_else(|| file_f64("epsilon").transpose()).transpose()?;
    let t1 = args.t1.map(Ok).or_else(|| file_f64("t1").transpose()).transpose()?;
    let t2 = args.t2.map(Ok).or_else(|| file_f64("t2").transpose()).transpose()?;
    let alpha_x = file_f64("alpha_x")?;
    let alpha_y = file_f64("alpha_y")?;
    let alpha_z = file_f64("alpha_z")?;
    let have_alphas = alpha_x.is_some() || alpha_y.is_some() || alpha_z.is_some();
    let noise_input = match (t1, t2) {
        (Some(t1), Some(t2)) => {
            if gamma.is_some() || epsilon.is_some() || have_alphas {
                return Err(Error::InvalidParameter(
                    "give either T1/T2 or gamma-based noise, not both".into(),
                ));
            }
            NoiseInput::Relaxation { t1, t2 }
        }
        (None, None) => {
            let gamma = gamma.unwrap_or(67.0);
            if have_alphas {
                if epsilon.is_some() {
                    return Err(Error::InvalidParameter(
                        "give either epsilon or explicit alpha weights, not both".into(),
                    ));
                }
                NoiseInput::Weights {
                    gamma,
                    alpha_x: alpha_x.unwrap_or(0.0),
                    alpha_y: alpha_y.unwrap_or(0.0),
                    alpha_z: alpha_z.unwrap_or(0.0),
                }
            } else if let Some(epsilon) = epsilon {
                NoiseInput::Mixed { gamma, epsilon }
            } else {
                NoiseInput::Weights { gamma, alpha_x: 1.0, alpha_y: 0.0, alpha_z: 0.0 }
            }
        }
        _ => {
            return Err(Error::InvalidParameter("T1 and T2 must be given together".into()));
        }
    };

    let omega = args
        .omega
        .map(Ok)
        .or_else(|| file_f64("omega").transpose())
        .transpose()?
        .unwrap_or(3.6e-3);

    let n_text = args
        .n
        .clone()
        .or_else(|| file.get("n").cloned())
        .unwrap_or_else(|| "1e11".into());
    let n_values = parse_n_list(&n_text)?;

    let geometry: Geometry = match args.geometry {
        Some(g) => g.into(),
        None => match file.get("geometry").map(String::as_str) {
            Some("a") | Some("scenario-a") => Geometry::ScenarioA,
            Some("b") | Some("scenario-b") => Geometry::ScenarioB,
            Some("css-x") => Geometry::CssX,
            Some("css-y") => Geometry::CssY,
            Some("ghz") => Geometry::Ghz,
            Some(other) => {
                return Err(Error::InvalidParameter(format!("unknown geometry `{other}`")));
            }
            None => Geometry::ScenarioB,
        },
    };

    // --- squeezing and time: exactly one of (mu, db); a schedule excludes
    // both plus --t ---
    let mu_text = args.mu.clone().or_else(|| file.get("mu").cloned());
    let db_text = args.db.clone().or_else(|| file.get("db").cloned());
    let t_text = args.t.clone().or_else(|| file.get("t").cloned());
    let schedule_text = args.schedule.clone().or_else(|| file.get("schedule").cloned());
    if mu_text.is_some() && db_text.is_some() {
        return Err(Error::InvalidParameter("give either --mu or --db, not both".into()));
    }
    if schedule_text.is_some() && (mu_text.is_some() || db_text.is_some() || t_text.is_some()) {
        return Err(Error::InvalidParameter(
            "--schedule sets both t and mu; it excludes --t, --mu, and --db".into(),
        ));
    }
    let squeezed_geometry = matches!(geometry, Geometry::ScenarioA | Geometry::ScenarioB);

    let (mu_list, mu_is_db) = if let Some(text) = &mu_text {
        (parse_value_list(text, "mu")?, false)
    } else if let Some(text) = &db_text {
        (parse_value_list(text, "db")?, true)
    } else if squeezed_geometry {
        (vec![-8.0], true)
    } else {
        // Coherent/GHZ probes: μ pinned to 0. An explicit nonzero μ for
        // these geometries is rejected later by the probe constructor.
        (vec![0.0], false)
    };
    let t_list = parse_value_list(t_text.as_deref().unwrap_or("1e-3"), "t")?;

    let time = match schedule_text.as_deref() {
        Some("b") => TimeSpec::ScheduleB,
        Some(text) if text.starts_with("a:") => {
            let s: f64 = text[2..].parse().map_err(|_| {
                Error::InvalidParameter(format!("bad schedule exponent in `{text}`"))
            })?;
            TimeSpec::ScheduleA(s)
        }
        Some(other) => {
            return Err(Error::InvalidParameter(format!(
                "unknown schedule `{other}` (expected `b` or `a:<s>`)"
            )));
        }
        None => {
            if !scan_grids && t_list.len() != 1 {
                return Err(Error::InvalidParameter(
                    "this command takes a single --t value".into(),
                ));
            }
            TimeSpec::Value(t_list[0])
        }
    };
    if !scan_grids && mu_list.len() != 1 {
        return Err(Error::InvalidParameter(
            "this command takes a single --mu/--db value".into(),
        ));
    }
    let squeeze = if mu_is_db {
        SqueezeSpec::Db(mu_list[0])
    } else if !squeezed_geometry && mu_list[0] == 0.0 {
        SqueezeSpec::None
    } else {
        SqueezeSpec::Mu(mu_list[0])
    };

    let format = args
        .format
        .or(match file.get("format").map(String::as_str) {
            Some("csv") => Some(OutputFormat::Csv),
            Some("json") => Some(OutputFormat::Json),
            Some(other) => {
                return Err(Error::InvalidParameter(format!("unknown format `{other}`")));
            }
            None => None,
        })
        .unwrap_or(OutputFormat::Csv);
    let out = args.out.clone().or_else(|| file.get("out").map(PathBuf::from));
    let seed = match args.seed {
        Some(s) => s,
        None => match file.get("seed") {
            Some(v) => v.parse().map_err(|_| {
                Error::InvalidParameter(format!("config seed = `{v}` is not an integer"))
            })?,
            None => DEFAULT_SEED,
        },
    };

    Ok(RunConfig {
        noise_input,
        omega,
        n_values,
        geometry,
        squeeze,
        time,
        t_list,
        mu_is_db,
        mu_list,
        format,
        out,
        seed,
    })
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// Shortest round-trip decimal representation.
fn fmt(v: f64) -> String {
    format!("{v}")
}

/// One table cell: a number, a fixed label, or a degenerate-point marker
/// (CSV `error`, JSON `null`).
#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Text(&'static str),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(x) => Cell::Num(x),
            None => Cell::Missing,
        }
    }
}

struct Table {
    echo: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    /// Extra annotation lines (CSV comments / JSON config extras).
    notes: Vec<(String, String)>,
}

impl Table {
    fn new(echo: Vec<(String, String)>, columns: Vec<&'static str>) -> Self {
        Self { echo, columns, rows: Vec::new(), notes: Vec::new() }
    }

    fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut out = String::new();
                for (k, v) in self.echo.iter().chain(&self.notes) {
                    let _ = writeln!(out, "# {k} = {v}");
                }
                let _ = writeln!(out, "{}", self.columns.join(","));
                for row in &self.rows {
                    let cells: Vec<String> = row
                        .iter()
                        .map(|c| match c {
                            Cell::Num(v) => fmt(*v),
                            Cell::Text(s) => (*s).to_string(),
                            Cell::Missing => "error".into(),
                        })
                        .collect();
                    let _ = writeln!(out, "{}", cells.join(","));
                }
                out
            }
            OutputFormat::Json => {
                let config: serde_json::Map<String, serde_json::Value> = self
                    .echo
                    .iter()
                    .chain(&self.notes)
                    .map(|(k, v)| {
                        let value = v
                            .parse::<u64>()
                            .map(|x| serde_json::json!(x))
                            .or_else(|_| v.parse::<f64>().map(|x| serde_json::json!(x)))
                            .unwrap_or_else(|_| serde_json::json!(v));
                        (k.clone(), value)
                    })
                    .collect();
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let record: serde_json::Map<String, serde_json::Value> = self
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(col, cell)| {
                                let value = match cell {
                                    Cell::Num(v) => serde_json::json!(v),
                                    Cell::Text(s) => serde_json::json!(s),
                                    Cell::Missing => serde_json::Value::Null,
                                };
                                (col.to_string(), value)
                            })
                            .collect();
                        serde_json::Value::Object(record)
                    })
                    .collect();
                let doc = serde_json::json!({ "config": config, "rows": rows });
                let mut text = serde_json::to_string_pretty(&doc).expect("static structure");
                text.push('\n');
                text
            }
        }
    }
}

fn emit(table: &Table, config: &RunConfig) -> Result<()> {
    let text = table.render(config.format);
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn msqe_at(config: &RunConfig, noise: &NoiseModel, n: f64, t: f64, mu: f64) -> Result<f64> {
    match config.geometry {
        Geometry::Ghz => ghz::ghz_precision(n, noise, config.omega, t),
        geometry => {
            let spec = ProbeSpec::new(n, geometry, mu)?;
            Ok(metrology::precision(&spec, noise, config.omega, t)?.msqe_times_t)
        }
    }
}

fn cmd_precision(config: &RunConfig) -> Result<()> {
    let noise = config.noise()?;
    let mut table = Table::new(
        config.echo(),
        vec![
            "n",
            "t",
            "mu",
            "squeezing_db",
            "msqe_times_t",
            "signal_derivative",
            "variance",
            "gain_vs_css",
        ],
    );
    for &n in &config.n_values {
        let (t, mu) = config.working_point(n)?;
        let db = if matches!(config.geometry, Geometry::ScenarioA | Geometry::ScenarioB) {
            Some(probes::squeezing_db(n, mu)?)
        } else {
            None
        };
        let row = match config.geometry {
            Geometry::Ghz => {
                let c = crate::channel::channel_coefficients(&noise, config.omega, t)?;
                let stats = ghz::parity_stats(n, &c)?;
                let msqe = ghz::ghz_precision(n, &noise, config.omega, t)?;
                let css = ProbeSpec::new(n, Geometry::CssX, 0.0)
                    .and_then(|s| metrology::precision(&s, &noise, config.omega, t))
                    .map(|r| r.msqe_times_t)
                    .ok();
                vec![
                    n.into(),
                    t.into(),
                    mu.into(),
                    db.into(),
                    msqe.into(),
                    stats.derivative.into(),
                    (1.0 - stats.mean * stats.mean).into(),
                    css.map(|c| c / msqe).into(),
                ]
            }
            geometry => {
                let spec = ProbeSpec::new(n, geometry, mu)?;
                let result = metrology::precision(&spec, &noise, config.omega, t)?;
                vec![
                    n.into(),
                    t.into(),
                    mu.into(),
                    db.into(),
                    result.msqe_times_t.into(),
                    result.signal_derivative.into(),
                    result.variance.into(),
                    result.gain_vs_css.into(),
                ]
            }
        };
        table.rows.push(row);
    }
    emit(&table, config)
}

fn cmd_scan(config: &RunConfig) -> Result<()> {
    if !matches!(config.time, TimeSpec::Value(_)) {
        return Err(Error::InvalidParameter(
            "scan takes explicit --t/--mu/--db grids, not --schedule".into(),
        ));
    }
    let noise = config.noise()?;
    let mut table = Table::new(config.echo(), vec!["n", "t", "mu", "msqe_times_t"]);
    for &n in &config.n_values {
        // Resolve the squeezing grid (dB grids are n-dependent).
        let mus: Vec<f64> = if config.mu_is_db {
            config
                .mu_list
                .iter()
                .map(|&db| probes::mu_from_db(n, db))
                .collect::<Result<_>>()?
        } else {
            config.mu_list.clone()
        };
        let objective = |t: f64, mu: f64| -> Result<f64> { msqe_at(config, &noise, n, t, mu) };
        for point in optimizer::scan(objective, &config.t_list, &mus) {
            table
                .rows
                .push(vec![n.into(), point.t.into(), point.mu.into(), point.value.into()]);
        }
    }
    emit(&table, config)
}

fn cmd_optimize(config: &RunConfig) -> Result<()> {
    let noise = config.noise()?;
    let domain = SearchDomain::default_for(noise.gamma())?;
    let mut table = Table::new(
        config.echo(),
        vec!["n", "t_star", "mu_star", "msqe_times_t", "evaluations", "converged"],
    );
    for &n in &config.n_values {
        let opt = optimizer::optimize(n, config.geometry, &noise, config.omega, &domain)?;
        table.rows.push(vec![
            n.into(),
            opt.t_star.into(),
            opt.mu_star.into(),
            opt.msqe_times_t.into(),
            (opt.evaluations as f64).into(),
            Cell::Text(if opt.converged { "true" } else { "false" }),
        ]);
    }
    emit(&table, config)
}

fn cmd_bounds(config: &RunConfig) -> Result<()> {
    let spec = config.mixed_spec()?;
    let n = *config.n_values.first().expect("validated non-empty");
    let (t, _) = config.working_point(n)?;
    let kappa = ghz::kappa_opt();
    let mut table = Table::new(config.echo(), vec!["quantity", "value"]);
    let mut push = |name: &'static str, value: f64| {
        table.rows.push(vec![Cell::Text(name), value.into()]);
    };
    push("gamma", spec.gamma);
    push("epsilon", spec.epsilon);
    push("mixed_noise_floor", bounds::mixed_noise_floor(&spec));
    push("scenario_a_asymptote", bounds::scenario_a_mixed_asymptote(n, &spec));
    push("scenario_b_asymptote", bounds::scenario_b_mixed_asymptote(n, &spec));
    push("c_z", bounds::c_z(spec.gamma, t));
    push("c_x", bounds::c_x(spec.gamma, config.omega, t));
    push("ghz_qfi_bound", bounds::ghz_qfi_bound(n, spec.gamma, config.omega));
    push("kappa", kappa);
    push("ghz_t_opt", kappa / spec.gamma);
    if spec.epsilon > 0.0 {
        push(
            "crossover_estimate",
            bounds::crossover_estimate(spec.gamma, config.omega, spec.epsilon)?,
        );
    }
    emit(&table, config)
}

fn cmd_check(depth: CheckDepth, config: &RunConfig) -> Result<()> {
    let (max_n, draws) = match depth {
        CheckDepth::Fast => (5, 12),
        CheckDepth::Full => (8, 50),
    };
    let report = oracle::equivalence_suite(max_n, draws, config.seed, true)?;
    println!(
        "oracle cross-check: {} draws, N <= {max_n}, seed {} ({} degenerate draws skipped)",
        report.draws, config.seed, report.skipped_degenerate
    );
    let mut all_ok = true;
    for (name, value, tolerance) in report.checks() {
        let ok = value <= tolerance;
        all_ok &= ok;
        println!(
            "  {:24} {:>12.3e}  (tolerance {:.0e})  {}",
            name,
            value,
            tolerance,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if all_ok {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Error::Verification("oracle cross-check failed".into()))
    }
}

// ---------------------------------------------------------------------------
// Figures
// ---------------------------------------------------------------------------

fn db_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize + 1;
    (0..count).map(|i| lo + step * i as f64).collect()
}

/// Precision vs squeezing at fixed t for both squeezed scenarios and the
/// coherent benchmark.
fn figure_squeezing(config: &RunConfig) -> Result<Table> {
    let noise = config.noise()?;
    let n = config.n_values[0];
    let (t, _) = config.working_point(n)?;
    let mut table =
        Table::new(config.echo(), vec!["squeezing_db", "msqe_a", "msqe_b", "msqe_css"]);
    let css_spec = ProbeSpec::new(n, Geometry::CssX, 0.0)?;
    let css = metrology::precision(&css_spec, &noise, config.omega, t)?.msqe_times_t;
    for db in db_grid(-80.0, 0.0, 0.25) {
        let mu = match probes::mu_from_db(n, db) {
            Ok(mu) => mu,
            Err(Error::Unachievable(_)) => {
                table.rows.push(vec![db.into(), Cell::Missing, Cell::Missing, Cell::Missing]);
                continue;
            }
            Err(e) => return Err(e),
        };
        let msqe_for = |geometry: Geometry| -> Option<f64> {
            ProbeSpec::new(n, geometry, mu)
                .and_then(|spec| metrology::precision(&spec, &noise, config.omega, t))
                .map(|r| r.msqe_times_t)
                .ok()
        };
        table.rows.push(vec![
            db.into(),
            msqe_for(Geometry::ScenarioA).into(),
            msqe_for(Geometry::ScenarioB).into(),
            css.into(),
        ]);
    }
    Ok(table)
}

/// Precision vs interrogation time at fixed squeezing.
fn figure_time(config: &RunConfig) -> Result<Table> {
    let noise = config.noise()?;
    let n = config.n_values[0];
    let mu = match config.squeeze {
        SqueezeSpec::Mu(mu) => mu,
        SqueezeSpec::Db(db) => probes::mu_from_db(n, db)?,
        SqueezeSpec::None => 0.0,
    };
    let mut table = Table::new(config.echo(), vec!["t", "msqe_a", "msqe_b", "msqe_css"]);
    for &t in &parse_value_list("1e-5:1:301", "t")? {
        let msqe_for = |geometry: Geometry, mu: f64| -> Option<f64> {
            ProbeSpec::new(n, geometry, mu)
                .and_then(|spec| metrology::precision(&spec, &noise, config.omega, t))
                .map(|r| r.msqe_times_t)
                .ok()
        };
        table.rows.push(vec![
            t.into(),
            msqe_for(Geometry::ScenarioA, mu).into(),
            msqe_for(Geometry::ScenarioB, mu).into(),
            msqe_for(Geometry::CssX, 0.0).into(),
        ]);
    }
    Ok(table)
}

/// Optimised precision vs N under mixed noise, with asymptotes and
/// 90%-crossover markers.
fn figure_mixed(config: &RunConfig) -> Result<Table> {
    let spec = config.mixed_spec()?;
    let (gamma, epsilon) = (spec.gamma, spec.epsilon);
    let mixed = spec.noise_model()?;
    let transversal = NoiseModel::transversal(gamma)?;
    let domain = SearchDomain::default_for(gamma)?;
    let mut table = Table::new(
        config.echo(),
        vec![
            "n",
            "msqe_a",
            "msqe_b",
            "msqe_b_transversal",
            "msqe_css",
            "asymptote_a",
            "asymptote_b",
        ],
    );
    let ns = parse_n_list("1e2:1e10:33")?;
    let mut ratio_a: Vec<(f64, f64)> = Vec::new();
    let mut ratio_b: Vec<(f64, f64)> = Vec::new();
    for &n in &ns {
        let opt_for = |geometry: Geometry, noise: &NoiseModel| -> Result<f64> {
            Ok(optimizer::optimize(n, geometry, noise, config.omega, &domain)?.msqe_times_t)
        };
        let a = opt_for(Geometry::ScenarioA, &mixed)?;
        let b = opt_for(Geometry::ScenarioB, &mixed)?;
        let bt = opt_for(Geometry::ScenarioB, &transversal)?;
        let css = opt_for(Geometry::CssY, &mixed)?;
        let asym_a = bounds::scenario_a_mixed_asymptote(n, &spec);
        let asym_b = bounds::scenario_b_mixed_asymptote(n, &spec);
        ratio_a.push((n, a / asym_a));
        ratio_b.push((n, b / asym_b));
        table.rows.push(vec![
            n.into(),
            a.into(),
            b.into(),
            bt.into(),
            css.into(),
            asym_a.into(),
            asym_b.into(),
        ]);
    }
    // 90%-of-asymptote crossovers: first grid N with msqe within 1/0.9 of
    // the asymptote.
    let n90 = |ratios: &[(f64, f64)]| {
        ratios.iter().find(|(_, r)| *r <= 1.0 / 0.9).map(|(n, _)| *n)
    };
    if let Some(n) = n90(&ratio_a) {
        table.notes.push(("n90_a".into(), fmt(n)));
    }
    if let Some(n) = n90(&ratio_b) {
        table.notes.push(("n90_b".into(), fmt(n)));
    }
    if epsilon > 0.0 {
        table.notes.push((
            "crossover_estimate".into(),
            fmt(bounds::crossover_estimate(gamma, config.omega, epsilon)?),
        ));
    }
    Ok(table)
}

/// Minimised M quantity vs N for the three reference noise/signal pairs.
fn figure_m_floor(config: &RunConfig) -> Result<Table> {
    let mut table = Table::new(config.echo(), vec!["gamma", "omega", "n", "min_m", "floor"]);
    let ns = parse_n_list("10:1e4:13")?;
    for (gamma, omega) in [(10.0, 0.03), (1.0, 0.3), (0.1, 0.03)] {
        let domain = SearchDomain::default_for(gamma)?;
        for &n in &ns {
            let opt = optimizer::optimize_objective(
                |t, mu| bounds::m_quantity(n, gamma, omega, t, mu),
                &domain,
            )?;
            table.rows.push(vec![
                gamma.into(),
                omega.into(),
                n.into(),
                opt.msqe_times_t.into(),
                (2.0 * gamma / n).into(),
            ]);
        }
    }
    Ok(table)
}

fn cmd_figure(name: FigureName, args: &CommonArgs) -> Result<()> {
    // Figure-specific defaults, overridable by flags or config file.
    let mut args = args.clone();
    if name == FigureName::Fig3 && args.config.is_none() && args.t1.is_none() {
        args.gamma = args.gamma.or(Some(1.0));
        args.epsilon = args.epsilon.or(Some(0.05));
        args.omega = args.omega.or(Some(0.45));
    }
    let config = resolve(&args, false)?;
    let table = match name {
        FigureName::Fig2Squeezing => figure_squeezing(&config)?,
        FigureName::Fig2Time => figure_time(&config)?,
        FigureName::Fig3 => figure_mixed(&config)?,
        FigureName::Fig4 => figure_m_floor(&config)?,
    };
    emit(&table, &config)
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parse arguments, run, and map errors onto the documented exit codes
/// (0 ok, 2 invalid configuration, 3 degenerate signal, 4 verification or
/// positivity failure, 5 unachievable request).
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let run = || -> Result<()> {
        match &cli.command {
            Command::Precision(args) => cmd_precision(&resolve(args, false)?),
            Command::Scan(args) => cmd_scan(&resolve(args, true)?),
            Command::Optimize(args) => cmd_optimize(&resolve(args, false)?),
            Command::Figure { name, common } => cmd_figure(*name, common),
            Command::Bounds(args) => cmd_bounds(&resolve(args, false)?),
            Command::Check { depth, common } => cmd_check(*depth, &resolve(common, false)?),
        }
    };
    match run() {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.code()
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
