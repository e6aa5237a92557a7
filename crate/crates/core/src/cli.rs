//! Command-line front end.
//!
//! Every option can also be given in a flat `key = value` file passed with
//! `--config`; keys are the long option names with `-` replaced by `_`.
//! Command-line values take precedence over the file.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    detect_breakdown, evolve, write_trajectory_csv, DriveSpec, DEFAULT_THRESHOLD, DEFAULT_WINDOW,
};
use crate::effective::{gap_closing_search, FixedParam};
use crate::error::{Error, Result};
use crate::model::{KPoint, ModelParams, TWO_PI};
use crate::response::{phase_diagram, pumped_charge, validate_labels, Axis, PhaseDiagram, SpotCheck};
use crate::spectrum::degeneracy::{classify_degeneracies, DegenerateKind, DegeneratePoint};
use crate::spectrum::surface::{band_surface, fmt_f64, RegionSummary};
use crate::spectrum::{select_branch, Band};

#[derive(Debug, Parser)]
#[command(name = "nlchern", version, about = "Bands, degeneracies, dynamics and response of the Kerr-nonlinear QWZ model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Stationary branches on a uniform zone grid.
    Bands,
    /// Degenerate points and critical Kerr strengths.
    Degeneracies,
    /// Gap-closing point of the effective model.
    Gap,
    /// Driven trajectory along a straight sweep.
    Dynamics,
    /// Pumped charge of one band.
    Response,
    /// Adiabatic / non-adiabatic labels over a (u, U) grid.
    PhaseDiagram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Options {
    /// Flat key = value file with defaults for any option below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u: Option<f64>,
    /// Kerr strength.
    #[arg(long = "U", global = true, allow_hyphen_values = true)]
    pub kerr: Option<f64>,
    /// Nodes per axis.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Drive force.
    #[arg(long = "F", global = true, allow_hyphen_values = true)]
    pub force: Option<f64>,
    #[arg(long, global = true)]
    pub dt: Option<f64>,
    /// Total drive time.
    #[arg(long = "T", global = true)]
    pub total_time: Option<f64>,
    /// ground, excited or a branch index.
    #[arg(long, global = true)]
    pub band: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Parameter held fixed by `gap`: u or U.
    #[arg(long, global = true)]
    pub fixed: Option<String>,
    /// Lower end of the `gap` bracket.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lo: Option<f64>,
    /// Upper end of the `gap` bracket.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub hi: Option<f64>,
    /// Starting kx of a `dynamics` sweep.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub kx: Option<f64>,
    /// Starting ky of a `dynamics` sweep.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub ky: Option<f64>,
    /// Record every n-th step of a trajectory.
    #[arg(long, global = true)]
    pub sample_every: Option<usize>,
    /// kx columns of the pump.
    #[arg(long, global = true)]
    pub columns: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u_max: Option<f64>,
    #[arg(long = "U-min", global = true, allow_hyphen_values = true)]
    pub kerr_min: Option<f64>,
    #[arg(long = "U-max", global = true, allow_hyphen_values = true)]
    pub kerr_max: Option<f64>,
    /// Number of phase-diagram cells checked by trajectories.
    #[arg(long, global = true)]
    pub validate: Option<usize>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {key} = {value:?}")))
}

fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, value: &str) -> Result<()> {
    if slot.is_none() {
        *slot = Some(parse_value(key, value)?);
    }
    Ok(())
}

impl Options {
    /// Fills unset options from `key = value` lines. Blank lines and lines
    /// starting with `#` are skipped; unknown keys are rejected.
    pub fn merge_config(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "u" => fill(&mut self.u, key, value)?,
                "U" => fill(&mut self.kerr, key, value)?,
                "grid" => fill(&mut self.grid, key, value)?,
                "F" => fill(&mut self.force, key, value)?,
                "dt" => fill(&mut self.dt, key, value)?,
                "T" => fill(&mut self.total_time, key, value)?,
                "band" => fill(&mut self.band, key, value)?,
                "out" => fill(&mut self.out, key, value)?,
                "format" => {
                    if self.format.is_none() {
                        self.format = Some(
                            Format::from_str(value, false)
                                .map_err(|_| Error::Config(format!("format must be csv or json, got {value:?}")))?,
                        );
                    }
                }
                "fixed" => fill(&mut self.fixed, key, value)?,
                "lo" => fill(&mut self.lo, key, value)?,
                "hi" => fill(&mut self.hi, key, value)?,
                "kx" => fill(&mut self.kx, key, value)?,
                "ky" => fill(&mut self.ky, key, value)?,
                "sample_every" => fill(&mut self.sample_every, key, value)?,
                "columns" => fill(&mut self.columns, key, value)?,
                "u_min" => fill(&mut self.u_min, key, value)?,
                "u_max" => fill(&mut self.u_max, key, value)?,
                "U_min" => fill(&mut self.kerr_min, key, value)?,
                "U_max" => fill(&mut self.kerr_max, key, value)?,
                "validate" => fill(&mut self.validate, key, value)?,
                other => return Err(Error::Config(format!("unknown config key {other:?}"))),
            }
        }
        Ok(())
    }

    fn require<T: Copy>(value: Option<T>, name: &str) -> Result<T> {
        value.ok_or_else(|| Error::Config(format!("--{name} is required")))
    }

    fn params(&self) -> Result<ModelParams> {
        ModelParams::new(Self::require(self.u, "u")?, Self::require(self.kerr, "U")?)
    }

    fn band(&self) -> Result<Band> {
        self.band.as_deref().unwrap_or("ground").parse()
    }

    fn format(&self, default: Format, allowed: &[Format], command: &str) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if !allowed.contains(&f) {
            return Err(Error::Config(format!("{command} does not support --format {f:?}")));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandsSummary {
    pub params: ModelParams,
    pub regions: RegionSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    pub params: ModelParams,
    pub grid: usize,
    /// I-type critical strengths in the order (0,0), (0,π), (π,0), (π,π).
    pub critical_strengths: Vec<f64>,
    pub points: Vec<DegeneratePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsReport {
    pub params: ModelParams,
    pub band: String,
    pub k0: KPoint,
    #[serde(rename = "F")]
    pub force: f64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub total_time: f64,
    pub breakdown_time: Option<f64>,
    pub max_norm_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagramReport {
    #[serde(flatten)]
    pub diagram: PhaseDiagram,
    /// Describes how the A / nA boundary was obtained.
    pub boundary: String,
    pub spot_checks: Vec<SpotCheck>,
}

const BOUNDARY_NOTE: &str = "reconstruction: ground nA iff U exceeds the smallest I-type critical strength; \
excited nA iff the tube exists and the excited branch ends at a fold on the sweep across it";

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut buf = serde_json::to_vec_pretty(value).expect("reports serialize");
    buf.push(b'\n');
    buf
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> csv::Result<()>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf).map_err(|source| Error::Csv {
        path: PathBuf::from("<buffer>"),
        source,
    })?;
    Ok(buf)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the primary output to `--out` or `stdout`. The sidecar goes next
/// to `--out` and is skipped when writing to `stdout`.
fn emit(opts: &Options, stdout: &mut dyn Write, bytes: &[u8], sidecar: Option<(&str, Vec<u8>)>) -> Result<()> {
    match &opts.out {
        Some(path) => {
            write_file(path, bytes)?;
            if let Some((ext, side)) = sidecar {
                write_file(&path.with_extension(ext), &side)?;
            }
            Ok(())
        }
        None => stdout.write_all(bytes).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn cmd_bands(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    let params = opts.params()?;
    let surface = band_surface(&params, opts.grid.unwrap_or(81))?;
    let summary = to_json(&BandsSummary {
        params,
        regions: surface.summary(),
    });
    match opts.format(Format::Csv, &[Format::Csv, Format::Json], "bands")? {
        Format::Csv => {
            let table = csv_bytes(|b| surface.write_csv(b))?;
            emit(opts, stdout, &table, Some(("summary.json", summary)))
        }
        Format::Json => emit(opts, stdout, &summary, None),
    }
}

fn cmd_degeneracies(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    let params = opts.params()?;
    let grid = opts.grid.unwrap_or(64);
    let points = classify_degeneracies(&params, grid)?;
    let critical_strengths = points
        .iter()
        .filter(|p| p.kind == DegenerateKind::I)
        .filter_map(|p| p.critical_u)
        .collect();
    let bytes = match opts.format(Format::Json, &[Format::Csv, Format::Json], "degeneracies")? {
        Format::Json => to_json(&DegeneracyReport {
            params,
            grid,
            critical_strengths,
            points,
        }),
        Format::Csv => csv_bytes(|b| {
            let mut w = csv::Writer::from_writer(b);
            w.write_record(["kind", "kx", "ky", "epsilon", "critical_U"])?;
            for p in &points {
                w.write_record([
                    format!("{:?}", p.kind),
                    fmt_f64(p.k.kx),
                    fmt_f64(p.k.ky),
                    fmt_f64(p.epsilon),
                    p.critical_u.map(fmt_f64).unwrap_or_default(),
                ])?;
            }
            w.flush()?;
            Ok(())
        })?,
    };
    emit(opts, stdout, &bytes, None)
}

fn cmd_gap(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    opts.format(Format::Json, &[Format::Json], "gap")?;
    let (fixed, value) = match opts.fixed.as_deref() {
        Some("u") => (FixedParam::Mass, Options::require(opts.u, "u")?),
        Some("U") => (FixedParam::Kerr, Options::require(opts.kerr, "U")?),
        Some(other) => return Err(Error::Config(format!("--fixed must be u or U, got {other:?}"))),
        None => return Err(Error::Config("--fixed is required".into())),
    };
    let bracket = [Options::require(opts.lo, "lo")?, Options::require(opts.hi, "hi")?];
    let report = gap_closing_search(fixed, value, bracket)?;
    emit(opts, stdout, &to_json(&report), None)
}

fn cmd_dynamics(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    let params = opts.params()?;
    let band = opts.band()?;
    let force = opts.force.unwrap_or(0.01);
    let dt = opts.dt.unwrap_or(0.01);
    let total_time = opts.total_time.unwrap_or(TWO_PI / force.abs());
    let k0 = KPoint::new(opts.kx.unwrap_or(0.0), opts.ky.unwrap_or(0.0));
    let drive = DriveSpec::new(k0, (force, force), total_time, dt)?;
    let psi0 = select_branch(&params, &k0, band)?.state;
    let records = evolve(&params, &drive, &psi0, opts.sample_every.unwrap_or(10))?;
    let bytes = match opts.format(Format::Csv, &[Format::Csv, Format::Json], "dynamics")? {
        Format::Csv => csv_bytes(|b| write_trajectory_csv(&records, b))?,
        Format::Json => to_json(&DynamicsReport {
            params,
            band: band.to_string(),
            k0,
            force,
            dt,
            total_time,
            breakdown_time: detect_breakdown(&records, DEFAULT_WINDOW, DEFAULT_THRESHOLD)?,
            max_norm_drift: records.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max),
        }),
    };
    emit(opts, stdout, &bytes, None)
}

fn cmd_response(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    opts.format(Format::Json, &[Format::Json], "response")?;
    let summary = pumped_charge(
        &opts.params()?,
        opts.band()?,
        opts.force.unwrap_or(0.01),
        opts.columns.unwrap_or(50),
        opts.dt.unwrap_or(0.01),
    )?;
    emit(opts, stdout, &to_json(&summary), None)
}

fn cmd_phase_diagram(opts: &Options, stdout: &mut dyn Write) -> Result<()> {
    let band = opts.band()?;
    let n = opts.grid.unwrap_or(41);
    let u_axis = Axis::new(opts.u_min.unwrap_or(-3.0), opts.u_max.unwrap_or(3.0), n)?;
    let kerr_axis = Axis::new(opts.kerr_min.unwrap_or(0.0), opts.kerr_max.unwrap_or(6.0), n)?;
    let diagram = phase_diagram(u_axis, kerr_axis, band)?;
    let spot_checks = validate_labels(&diagram, band, opts.validate.unwrap_or(0), 0.25)?;
    let table = csv_bytes(|b| diagram.write_csv(b))?;
    let report = PhaseDiagramReport {
        diagram,
        boundary: BOUNDARY_NOTE.into(),
        spot_checks,
    };
    match opts.format(Format::Csv, &[Format::Csv, Format::Json], "phase-diagram")? {
        Format::Csv => {
            let mut meta = report;
            meta.diagram.cells.clear();
            emit(opts, stdout, &table, Some(("meta.json", to_json(&meta))))
        }
        Format::Json => emit(opts, stdout, &to_json(&report), None),
    }
}

/// Runs one parsed invocation, writing to `--out` or `stdout`.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut opts = cli.opts;
    if let Some(path) = opts.config.clone() {
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io { path, source })?;
        opts.merge_config(&text)?;
    }
    match cli.command {
        Command::Bands => cmd_bands(&opts, stdout),
        Command::Degeneracies => cmd_degeneracies(&opts, stdout),
        Command::Gap => cmd_gap(&opts, stdout),
        Command::Dynamics => cmd_dynamics(&opts, stdout),
        Command::Response => cmd_response(&opts, stdout),
        Command::PhaseDiagram => cmd_phase_diagram(&opts, stdout),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
