//! The `shearball` command line: argument parsing, dispatch and report output.
//!
//! Exit status is 0 on success, 1 when a scan finds a violation and 2 on
//! configuration, parse or domain errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::counterexample::{self, counterexample_map, divergence_scan, DivergenceRecord};
use crate::error::{Error, Result};
use crate::growth::{growth_conformance_scan, shear_opnorm, DiskGrid, GrowthRecord};
use crate::report::fmt_real;
use crate::sampling::{Sampler, DEFAULT_SEED};
use crate::series::{BallPoint, CoeffSum, SeriesSpec};
use crate::shear::{
    embed_certificate, starlike_certificate, starshapelike_certificate, Certificate, ShearingMap,
};
use crate::starlike::{eq1_scan, starlike_quantity, starlike_scan_traced, ScanReport, TraceRow};

#[derive(Parser, Debug)]
#[command(
    name = "shearball",
    version,
    about = "Certificates, scans and growth checks for shearing maps (z1, z2) -> (z1 + g(z2), z2) of the unit ball"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Coefficient certificates: starlike, starshapelike, embeddable.
    Certify(Args),
    /// Minimum of Re<[df]^-1 f(z), z> over the ball.
    StarlikeScan(Args),
    /// Minimum residual of the starlike-image inequality (necessary condition).
    Eq1Scan(Args),
    /// Sampled sup ||df|| against the S0 growth bound.
    GrowthScan(Args),
    /// Divergence of ||df(0,r)|| (1-r)^3 for the builtin counterexample.
    Counterexample(Args),
    /// Minimal N with sum_{k>N} k|a_k| <= 1, with the tail sums.
    Embed(Args),
    /// Evaluate f, df and the starlike functional at probe points.
    Eval(Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Builtin {
    Counterexample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Args {
    /// Series spec file (JSON: start, coeffs, tail_bound).
    #[arg(long, conflicts_with = "builtin")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Scan radius, in (0, 1).
    #[arg(long, default_value_t = 0.99)]
    pub radius: f64,
    /// Radius grid A:B[:N] (growth-scan, counterexample).
    #[arg(long)]
    pub grid: Option<String>,
    /// Alpha grid A:B[:N] for eq1-scan.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Probe points as re,im;re,im;... taken pairwise as (z1, z2).
    #[arg(long, allow_hyphen_values = true)]
    pub probe: Option<String>,
    #[arg(long, default_value_t = counterexample::DEFAULT_C_REPORT)]
    pub c_report: f64,
    /// Spheres in the scan grid.
    #[arg(long, default_value_t = 25)]
    pub radial: usize,
    /// Values of |z2|^2/||z||^2 in the scan grid.
    #[arg(long, default_value_t = 25)]
    pub split: usize,
    /// Phases per coordinate in the scan grid.
    #[arg(long, default_value_t = 12)]
    pub phases: usize,
    /// Seeded uniform random samples.
    #[arg(long, default_value_t = 10_000)]
    pub random: usize,
    /// Skip the local refinement of the best sample.
    #[arg(long)]
    pub no_polish: bool,
    /// Angular resolution of the growth-scan disk grid.
    #[arg(long, default_value_t = 2048)]
    pub angular: usize,
    /// Radial resolution of the growth-scan disk grid.
    #[arg(long, default_value_t = 256)]
    pub disk_radial: usize,
    /// Largest degree N tried by embed.
    #[arg(long, default_value_t = crate::shear::DEFAULT_EMBED_MAX_DEGREE)]
    pub max_degree: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-sample trace file for starlike-scan.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CommandKind {
    Certify,
    StarlikeScan,
    Eq1Scan,
    GrowthScan,
    Counterexample,
    Embed,
    Eval,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Certify => "certify",
            CommandKind::StarlikeScan => "starlike-scan",
            CommandKind::Eq1Scan => "eq1-scan",
            CommandKind::GrowthScan => "growth-scan",
            CommandKind::Counterexample => "counterexample",
            CommandKind::Embed => "embed",
            CommandKind::Eval => "eval",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    File(PathBuf),
    Builtin(Builtin),
}

/// A validated command invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: Option<Source>,
    pub radius: f64,
    pub grid: Option<Vec<f64>>,
    pub alphas: Vec<f64>,
    pub sampler: Sampler,
    pub c_report: f64,
    pub disk_grid: DiskGrid,
    pub max_degree: usize,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

/// Default number of points for `A:B` grids.
pub const DEFAULT_GRID_POINTS: usize = 10;

/// Parse `A:B[:N]` into `N` evenly spaced values from `A` to `B`.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(Error::Config(format!(
            "grid '{}' is not of the form A:B[:N]",
            text
        )));
    }
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("grid '{}': '{}' is not a number", text, s)))
    };
    let (a, b) = (num(parts[0])?, num(parts[1])?);
    let n = match parts.get(2) {
        Some(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("grid '{}': '{}' is not a count", text, s)))?,
        None => DEFAULT_GRID_POINTS,
    };
    if n == 0 {
        return Err(Error::Config(format!("grid '{}' has no points", text)));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect())
}

/// Parse `re,im;re,im;...` and pair consecutive entries as `(z1, z2)`.
pub fn parse_probes(text: &str) -> Result<Vec<BallPoint>> {
    let values = text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let xs: Vec<&str> = pair.split(',').collect();
            if xs.len() != 2 {
                return Err(Error::Config(format!(
                    "probe entry '{}' is not re,im",
                    pair
                )));
            }
            let p = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("probe entry '{}' is not numeric", pair)))
            };
            Ok(Complex64::new(p(xs[0])?, p(xs[1])?))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() % 2 != 0 {
        return Err(Error::Config(
            "probe list must contain an even number of complex entries (z1;z2 pairs)".into(),
        ));
    }
    values
        .chunks(2)
        .map(|c| BallPoint::new(c[0], c[1]))
        .collect()
}

impl RunConfig {
    pub fn from_command(command: &Command) -> Result<Self> {
        let (kind, args) = match command {
            Command::Certify(a) => (CommandKind::Certify, a),
            Command::StarlikeScan(a) => (CommandKind::StarlikeScan, a),
            Command::Eq1Scan(a) => (CommandKind::Eq1Scan, a),
            Command::GrowthScan(a) => (CommandKind::GrowthScan, a),
            Command::Counterexample(a) => (CommandKind::Counterexample, a),
            Command::Embed(a) => (CommandKind::Embed, a),
            Command::Eval(a) => (CommandKind::Eval, a),
        };
        Self::from_args(kind, args)
    }

    pub fn from_args(command: CommandKind, a: &Args) -> Result<Self> {
        let source = match (&a.input, a.builtin) {
            (Some(p), None) => Some(Source::File(p.clone())),
            (None, Some(b)) => Some(Source::Builtin(b)),
            (None, None) => None,
            (Some(_), Some(_)) => {
                return Err(Error::Config("--input and --builtin are exclusive".into()))
            }
        };
        if !(a.radius > 0.0 && a.radius < 1.0) {
            return Err(Error::Config(format!(
                "--radius {} must lie in (0, 1)",
                a.radius
            )));
        }
        if a.radial == 0 || a.split == 0 || a.phases == 0 || a.angular == 0 || a.disk_radial == 0 {
            return Err(Error::Config("grid sizes must be at least 1".into()));
        }
        if a.threads == Some(0) {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        let grid = a.grid.as_deref().map(parse_grid).transpose()?;
        let alphas = match a.alpha.as_deref() {
            Some(s) => parse_grid(s)?,
            None => (1..=10).map(|i| i as f64 / 10.0).collect(),
        };
        let probes = a
            .probe
            .as_deref()
            .map(parse_probes)
            .transpose()?
            .unwrap_or_default();
        Ok(RunConfig {
            command,
            source,
            radius: a.radius,
            grid,
            alphas,
            sampler: Sampler {
                radial: a.radial,
                split: a.split,
                phases: a.phases,
                random: a.random,
                seed: a.seed,
                probes,
                polish: !a.no_polish,
                shell: false,
            },
            c_report: a.c_report,
            disk_grid: DiskGrid {
                angular: a.angular,
                radial: a.disk_radial,
            },
            max_degree: a.max_degree,
            out: a.out.clone(),
            trace: a.trace.clone(),
            format: a.format,
            threads: a.threads,
        })
    }

    /// Every setting that can change the output. The thread count is left
    /// out on purpose: it never changes results.
    pub fn digest(&self) -> String {
        let source = match &self.source {
            Some(Source::File(p)) => format!("input={}", p.display()),
            Some(Source::Builtin(_)) => "builtin=counterexample".to_string(),
            None => "source=none".to_string(),
        };
        let grid = self
            .grid
            .as_ref()
            .map(|g| {
                g.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_else(|| "default".into());
        let alphas: Vec<String> = self.alphas.iter().map(|x| x.to_string()).collect();
        format!(
            "{} {} grid=[{}] alphas=[{}] c_report={} disk={}x{} max_degree={} {}",
            self.command.name(),
            source,
            grid,
            alphas.join(" "),
            self.c_report,
            self.disk_grid.angular,
            self.disk_grid.radial,
            self.max_degree,
            self.sampler.digest(self.radius)
        )
    }

    fn load_map(&self) -> Result<ShearingMap> {
        match &self.source {
            Some(Source::File(p)) => Ok(ShearingMap::from_series(SeriesSpec::load(p)?)),
            Some(Source::Builtin(Builtin::Counterexample)) => Ok(counterexample_map()),
            None => Err(Error::Config(format!(
                "{} needs --input PATH or --builtin counterexample",
                self.command.name()
            ))),
        }
    }
}

/// Outcome of a successful run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    ViolationFound,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::ViolationFound => 1,
        }
    }
}

/// Everything a run produces; `trace` is written to its own file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub status: Status,
    pub report: String,
    pub trace: Option<String>,
}

fn config_header(out: &mut String, cfg: &RunConfig) {
    let _ = writeln!(out, "# shearball {}", cfg.command.name());
    let _ = writeln!(out, "# config: {}", cfg.digest());
}

fn json_report(cfg: &RunConfig, payload: serde_json::Value) -> String {
    let mut v = json!({
        "command": cfg.command.name(),
        "config": cfg.digest(),
    });
    if let (Some(obj), serde_json::Value::Object(extra)) = (v.as_object_mut(), payload) {
        obj.extend(extra);
    }
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serializes")
}

fn certify(cfg: &RunConfig) -> Result<RunOutput> {
    let f = cfg.load_map()?;
    let certs = [
        starlike_certificate(&f),
        starshapelike_certificate(&f),
        embed_certificate(&f, cfg.max_degree),
    ];
    let report = match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            config_header(&mut out, cfg);
            let _ = writeln!(out, "{}", Certificate::CSV_HEADER);
            for c in &certs {
                let _ = writeln!(out, "{}", c.csv_row());
            }
            out
        }
        Format::Json => json_report(cfg, json!({ "certificates": to_json(&certs) })),
    };
    Ok(RunOutput {
        status: Status::Success,
        report,
        trace: None,
    })
}

#[derive(Debug, Serialize)]
struct TailRow {
    n: usize,
    tail_sum: f64,
    admissible: bool,
}

fn embed(cfg: &RunConfig) -> Result<RunOutput> {
    let f = cfg.load_map()?;
    let series = f.coefficients().ok_or(Error::Unsupported("embed"))?;
    let cert = embed_certificate(&f, cfg.max_degree);
    let last = cert
        .degree
        .unwrap_or_else(|| cfg.max_degree.min(series.degree()));
    let mut rows = Vec::new();
    for n in 1..=last {
        let tail_sum = match series.tail_sum(n) {
            CoeffSum::Finite(v) => v,
            CoeffSum::NotFinite => f64::INFINITY,
        };
        rows.push(TailRow {
            n,
            tail_sum,
            admissible: tail_sum <= crate::shear::EMBED_TAIL_LIMIT,
        });
    }
    let report = match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            config_header(&mut out, cfg);
            let _ = writeln!(out, "n,tail_sum,admissible");
            for r in &rows {
                let _ = writeln!(out, "{},{},{}", r.n, fmt_real(r.tail_sum), r.admissible);
            }
            let _ = writeln!(out, "# certificate: {}", cert.csv_row());
            out
        }
        Format::Json => json_report(
            cfg,
            json!({ "tail_sums": to_json(&rows), "certificate": to_json(&cert) }),
        ),
    };
    Ok(RunOutput {
        status: Status::Success,
        report,
        trace: None,
    })
}

fn scan_output(
    cfg: &RunConfig,
    report: &ScanReport,
    trace_rows: Option<Vec<TraceRow>>,
) -> RunOutput {
    let text = match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            config_header(&mut out, cfg);
            let _ = writeln!(out, "{}", ScanReport::CSV_HEADER);
            let _ = writeln!(out, "{}", report.csv_row());
            out
        }
        Format::Json => json_report(cfg, json!({ "scan": to_json(report) })),
    };
    let trace = trace_rows.map(|rows| {
        let mut out = String::new();
        let _ = writeln!(out, "{}", TraceRow::CSV_HEADER);
        for r in rows {
            let _ = writeln!(out, "{}", r.csv_row());
        }
        out
    });
    RunOutput {
        status: if report.violation {
            Status::ViolationFound
        } else {
            Status::Success
        },
        report: text,
        trace,
    }
}

fn starlike_scan_cmd(cfg: &RunConfig) -> Result<RunOutput> {
    let f = cfg.load_map()?;
    let (report, rows) = starlike_scan_traced(&f, cfg.radius, &cfg.sampler, cfg.trace.is_some())?;
    Ok(scan_output(cfg, &report, rows))
}

fn eq1_scan_cmd(cfg: &RunConfig) -> Result<RunOutput> {
    let f = cfg.load_map()?;
    let report = eq1_scan(&f, &cfg.alphas, cfg.radius, &cfg.sampler)?;
    Ok(scan_output(cfg, &report, None))
}

fn growth_scan_cmd(cfg: &RunConfig) -> Result<RunOutput> {
    let f = cfg.load_map()?;
    let radii = cfg
        .grid
        .clone()
        .unwrap_or_else(|| (1..=9).map(|i| i as f64 / 10.0).collect());
    let records = growth_conformance_scan(&f, &radii, cfg.disk_grid)?;
    let report = match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            config_header(&mut out, cfg);
            let _ = writeln!(out, "{}", GrowthRecord::CSV_HEADER);
            for r in &records {
                let _ = writeln!(out, "{}", r.csv_row());
            }
            out
        }
        Format::Json => json_report(cfg, json!({ "records": to_json(&records) })),
    };
    let all_conform = records.iter().all(|r| r.conforms);
    Ok(RunOutput {
        status: if all_conform {
            Status::Success
        } else {
            Status::ViolationFound
        },
        report,
        trace: None,
    })
}

fn counterexample_cmd(cfg: &RunConfig) -> Result<RunOutput> {
    if let Some(Source::File(_)) = cfg.source {
        return Err(Error::Config(
            "counterexample always uses the builtin map; drop --input".into(),
        ));
    }
    let radii = cfg
        .grid
        .clone()
        .unwrap_or_else(|| counterexample::DEFAULT_GRID.to_vec());
    let scan = divergence_scan(&radii, cfg.c_report)?;
    let report = match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            config_header(&mut out, cfg);
            let _ = writeln!(out, "{}", DivergenceRecord::CSV_HEADER);
            for r in &scan.records {
                let _ = writeln!(out, "{}", r.csv_row());
            }
            let _ = writeln!(out, "{}", scan.verdict_row());
            out
        }
        Format::Json => json_report(cfg, json!({ "divergence": to_json(&scan) })),
    };
    Ok(RunOutput {
        status: Status::Success,
        report,
        trace: None,
    })
}

#[derive(Debug, Serialize)]
struct EvalRow {
    z: [Complex64; 2],
    f: [Complex64; 2],
    jacobian_12: Complex64,
    opnorm: f64,
    starlike_quantity: f64,
}

fn eval_cmd(cfg: &RunConfig) -> Result<RunOutput> {
    let f = cfg.load_map()?;
    if cfg.sampler.probes.is_empty() {
        return Err(Error::Config("eval needs --probe points".into()));
    }
    let rows = cfg
        .sampler
        .probes
        .iter()
        .map(|z| {
            Ok(EvalRow {
                z: z.as_pair(),
                f: f.eval(z)?,
                jacobian_12: f.jacobian(z)?.a12,
                opnorm: shear_opnorm(&f, z)?,
                starlike_quantity: starlike_quantity(&f, z)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            config_header(&mut out, cfg);
            let _ = writeln!(
                out,
                "z1_re,z1_im,z2_re,z2_im,f1_re,f1_im,f2_re,f2_im,j12_re,j12_im,opnorm,starlike_quantity"
            );
            for r in &rows {
                let cols: Vec<String> =
                    r.z.iter()
                        .chain(r.f.iter())
                        .chain(std::iter::once(&r.jacobian_12))
                        .flat_map(|c| [fmt_real(c.re), fmt_real(c.im)])
                        .chain([fmt_real(r.opnorm), fmt_real(r.starlike_quantity)])
                        .collect();
                let _ = writeln!(out, "{}", cols.join(","));
            }
            out
        }
        Format::Json => json_report(cfg, json!({ "points": to_json(&rows) })),
    };
    Ok(RunOutput {
        status: Status::Success,
        report,
        trace: None,
    })
}

fn dispatch(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.command {
        CommandKind::Certify => certify(cfg),
        CommandKind::StarlikeScan => starlike_scan_cmd(cfg),
        CommandKind::Eq1Scan => eq1_scan_cmd(cfg),
        CommandKind::GrowthScan => growth_scan_cmd(cfg),
        CommandKind::Counterexample => counterexample_cmd(cfg),
        CommandKind::Embed => embed(cfg),
        CommandKind::Eval => eval_cmd(cfg),
    }
}

/// Produce the report in memory, on a dedicated pool when `threads` is set.
pub fn run_report(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {}", e)))?
            .install(|| dispatch(cfg)),
        None => dispatch(cfg),
    }
}

/// Run and write the report to `--out` (or `stdout`) and the trace to `--trace`.
pub fn run(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<Status> {
    let output = run_report(cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &output.report)
            .map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?,
        None => stdout.write_all(output.report.as_bytes())?,
    }
    if let (Some(path), Some(trace)) = (&cfg.trace, &output.trace) {
        std::fs::write(path, trace).map_err(|e| Error::Io(format!("{}: {}", path.display(), e)))?;
    }
    Ok(output.status)
}

/// Entry point shared by the binary: returns the process exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e);
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match RunConfig::from_command(&cli.command).and_then(|cfg| run(&cfg, stdout)) {
        Ok(status) => status.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e);
            2
        }
    }
}
