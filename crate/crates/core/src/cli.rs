//! `qdt` command-line front end.
//!
//! Exit status: 0 success, 1 validation failure, 2 degenerate weights,
//! 3 I/O, parse or usage error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::character::WeightTriple;
use crate::dtinv::{
    localization_oracle, quadratic_dt_series, select_weights, DtError, EmbeddingParams, TauClass, DEFAULT_SEARCH_BOUND,
};
use crate::fan::{orientation_check, sigma_orbits, star_subdivide, validate_fan, Fan, FanError};
use crate::series::{format_rational, series_to_strings, PowerSeries};
use crate::vertex::{gamma, vertex_measure_classical, vertex_measure_quadratic, VertexError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Extra certification rounds tried by `--auto` after a degenerate hit.
const AUTO_RETRIES: usize = 3;

#[derive(Debug, Parser)]
#[command(name = "qdt", version, about = "Quadratic DT series of oriented toric threefolds")]
pub struct Cli {
    /// Worker threads for parallel sections (default: available cores).
    #[arg(long, global = true, env = "QDT_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Include elapsed wall time in the manifest (breaks byte-identical output).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
#[group(required = false, multiple = false)]
pub struct WeightChoice {
    /// Embedding exponents: three odd, pairwise-coprime-as-a-triple positive integers.
    #[arg(long, num_args = 3, value_names = ["A", "B", "C"])]
    pub weights: Option<Vec<i64>>,
    /// Search for the smallest generic embedding (the default).
    #[arg(long)]
    pub auto: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a fan file and run the orientation criterion.
    Check {
        fan: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compute the quadratic DT series of a fan.
    Invariants {
        fan: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        #[command(flatten)]
        choice: WeightChoice,
        /// Restrict --auto to a class such as 1,3,3.
        #[arg(long, value_parser = parse_tau)]
        tau: Option<TauClass>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Expand a single vertex measure at coordinate weights.
    Vertex {
        #[arg(long, num_args = 3, allow_negative_numbers = true, value_names = ["S1", "S2", "S3"], required = true)]
        weights: Vec<i64>,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
        /// Sign-free measure `W'` in `q` instead of the quadratic one in `q^2`.
        #[arg(long)]
        classical: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Blow up a sigma-orbit of fixed points (star subdivision of both cones).
    Blowup {
        fan: PathBuf,
        #[arg(long)]
        cone_orbit: usize,
        /// Output file; standard out when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Direct fixed-point sum for one coefficient, compared with the series.
    Oracle {
        fan: PathBuf,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        choice: WeightChoice,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_tau(s: &str) -> Result<TauClass, String> {
    TauClass::parse(s).ok_or_else(|| format!("'{s}' is not a class of odd residues like 1,3,3"))
}

/// A failed command: exit status plus message, optionally with a structured body.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub detail: Option<serde_json::Value>,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            detail: None,
        }
    }
}

impl From<FanError> for Failure {
    fn from(e: FanError) -> Self {
        let code = match e {
            FanError::Io(_) | FanError::Parse(_) => EXIT_IO,
            _ => EXIT_VALIDATION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<DtError> for Failure {
    fn from(e: DtError) -> Self {
        match e {
            DtError::Fan(f) => f.into(),
            DtError::DegenerateWeights {
                cone,
                weights,
                colength,
                ref partition,
            } => Failure {
                code: EXIT_DEGENERATE,
                message: e.to_string(),
                detail: Some(serde_json::json!({
                    "kind": "degenerate_weights",
                    "cone": cone,
                    "weights": weights,
                    "colength": colength,
                    "partition": partition.boxes(),
                })),
            },
            DtError::VanishingWeight { cone, weights } => Failure {
                code: EXIT_DEGENERATE,
                message: e.to_string(),
                detail: Some(serde_json::json!({
                    "kind": "vanishing_weight",
                    "cone": cone,
                    "weights": weights,
                })),
            },
            DtError::SearchExhausted { .. } => Failure::new(EXIT_DEGENERATE, e.to_string()),
            _ => Failure::new(EXIT_VALIDATION, e.to_string()),
        }
    }
}

impl From<VertexError> for Failure {
    fn from(e: VertexError) -> Self {
        match e {
            VertexError::DegenerateWeights {
                weights,
                colength,
                ref partition,
            } => Failure {
                code: EXIT_DEGENERATE,
                message: e.to_string(),
                detail: Some(serde_json::json!({
                    "kind": "degenerate_weights",
                    "weights": weights,
                    "colength": colength,
                    "partition": partition.boxes(),
                })),
            },
            VertexError::ZeroCoordinateWeight(_) => Failure::new(EXIT_DEGENERATE, e.to_string()),
            _ => Failure::new(EXIT_VALIDATION, e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
struct Manifest {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    fan_sha256: Option<String>,
    params: serde_json::Value,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    elapsed_ms: Option<u128>,
}

struct LoadedFan {
    fan: Fan,
    digest: String,
}

fn load_fan(path: &Path) -> Result<LoadedFan, Failure> {
    let bytes =
        std::fs::read(path).map_err(|e| Failure::new(EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure::new(EXIT_IO, format!("{} is not UTF-8", path.display())))?;
    let fan = Fan::from_json(&text).map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    Ok(LoadedFan {
        fan,
        digest: format!("{:x}", Sha256::digest(&bytes)),
    })
}

struct Context<'a> {
    out: &'a mut (dyn Write + Send),
    err: &'a mut (dyn Write + Send),
    started: Instant,
}

impl Context<'_> {
    fn manifest(
        &self,
        command: &'static str,
        digest: Option<&str>,
        params: serde_json::Value,
        timings: bool,
    ) -> Manifest {
        Manifest {
            command,
            fan_sha256: digest.map(str::to_owned),
            params,
            version: env!("CARGO_PKG_VERSION"),
            elapsed_ms: timings.then(|| self.started.elapsed().as_millis()),
        }
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(value).expect("output is serializable");
        writeln!(self.out, "{text}").map_err(io_failure)
    }

    fn line(&mut self, text: impl AsRef<str>) -> Result<(), Failure> {
        writeln!(self.out, "{}", text.as_ref()).map_err(io_failure)
    }

    fn warn(&mut self, text: impl AsRef<str>) {
        let _ = writeln!(self.err, "warning: {}", text.as_ref());
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::new(EXIT_IO, format!("write failed: {e}"))
}

fn series_lines(ctx: &mut Context<'_>, s: &PowerSeries) -> Result<(), Failure> {
    for (n, c) in s.coeffs().iter().enumerate() {
        ctx.line(format!("{n} → {}", format_rational(c)))?;
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_IO
                }
            };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = cli.jobs {
        builder = builder.num_threads(jobs.max(1));
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return EXIT_IO;
        }
    };
    let structured = match &cli.command {
        Command::Check { output, .. }
        | Command::Invariants { output, .. }
        | Command::Vertex { output, .. }
        | Command::Oracle { output, .. } => output.format == Format::Structured,
        Command::Blowup { .. } => false,
    };
    let mut ctx = Context {
        out,
        err,
        started: Instant::now(),
    };
    let result = pool.install(|| dispatch(&cli.command, &mut ctx));
    match result {
        Ok(code) => code,
        Err(f) => {
            if structured {
                let body = serde_json::json!({
                    "error": {
                        "exit_code": f.code,
                        "message": f.message,
                        "detail": f.detail,
                    }
                });
                let _ = ctx.emit_json(&body);
            }
            let _ = writeln!(ctx.err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Context<'_>) -> Result<i32, Failure> {
    match cmd {
        Command::Check { fan, output } => cmd_check(ctx, fan, output),
        Command::Invariants {
            fan,
            max_order,
            choice,
            tau,
            output,
        } => cmd_invariants(ctx, fan, *max_order, choice, *tau, output),
        Command::Vertex {
            weights,
            max_order,
            classical,
            output,
        } => cmd_vertex(ctx, weights, *max_order, *classical, output),
        Command::Blowup { fan, cone_orbit, out } => cmd_blowup(ctx, fan, *cone_orbit, out.as_deref()),
        Command::Oracle { fan, n, choice, output } => cmd_oracle(ctx, fan, *n, choice, output),
    }
}

fn cmd_check(ctx: &mut Context<'_>, path: &Path, output: &OutputArgs) -> Result<i32, Failure> {
    let loaded = load_fan(path)?;
    let validation = validate_fan(&loaded.fan);
    let orientation = orientation_check(&loaded.fan);
    let passed = validation.passed() && orientation.passed;
    let code = if passed { EXIT_OK } else { EXIT_VALIDATION };
    match output.format {
        Format::Structured => {
            #[derive(Serialize)]
            struct Body<'a> {
                passed: bool,
                rays: usize,
                cones: usize,
                checks: &'a [crate::fan::CheckResult],
                orientation: &'a crate::fan::OrientationReport,
                manifest: Manifest,
            }
            let manifest = ctx.manifest("check", Some(&loaded.digest), serde_json::json!({}), output.timings);
            ctx.emit_json(&Body {
                passed,
                rays: loaded.fan.rays().len(),
                cones: loaded.fan.cones().len(),
                checks: &validation.checks,
                orientation: &orientation,
                manifest,
            })?;
        }
        Format::Table => {
            ctx.line(format!(
                "fan: {} ({} rays, {} cones, sha256 {})",
                path.display(),
                loaded.fan.rays().len(),
                loaded.fan.cones().len(),
                loaded.digest
            ))?;
            for c in &validation.checks {
                let mark = if c.passed { "PASS" } else { "FAIL" };
                match &c.detail {
                    Some(d) => ctx.line(format!("{mark} {}: {d}", c.name))?,
                    None => ctx.line(format!("{mark} {}", c.name))?,
                }
            }
            if orientation.passed {
                ctx.line("PASS orientation")?;
            } else {
                for v in &orientation.violations {
                    ctx.line(format!("FAIL orientation: {v}"))?;
                }
            }
            if passed {
                ctx.line("PASS")?;
            } else {
                let mut failed: Vec<&str> = validation.failures().iter().map(|c| c.name).collect();
                if !orientation.passed {
                    failed.push("orientation");
                }
                ctx.line(format!("FAIL: {}", failed.join(", ")))?;
            }
        }
    }
    Ok(code)
}

fn explicit_params(weights: &[i64]) -> Result<EmbeddingParams, Failure> {
    EmbeddingParams::new(weights[0], weights[1], weights[2]).map_err(|e| Failure::new(EXIT_VALIDATION, e.to_string()))
}

/// Explicit triple, or the smallest one certified through colength
/// `max_colength`.
fn choose_params(
    fan: &Fan,
    choice: &WeightChoice,
    max_colength: usize,
    tau: Option<TauClass>,
) -> Result<EmbeddingParams, Failure> {
    match &choice.weights {
        Some(w) => {
            if tau.is_some() {
                return Err(Failure::new(EXIT_VALIDATION, "--tau only applies to --auto"));
            }
            explicit_params(w)
        }
        None => Ok(select_weights(fan, max_colength, tau, DEFAULT_SEARCH_BOUND)?),
    }
}

#[derive(Serialize)]
struct WeightsBlock {
    embedding: [i64; 3],
    tau: String,
    auto: bool,
    cones: Vec<crate::dtinv::ConeWeight>,
}

fn cmd_invariants(
    ctx: &mut Context<'_>,
    path: &Path,
    max_order: usize,
    choice: &WeightChoice,
    tau: Option<TauClass>,
    output: &OutputArgs,
) -> Result<i32, Failure> {
    let loaded = load_fan(path)?;
    let auto = choice.weights.is_none();
    let mut colength = max_order / 2;
    let mut params = choose_params(&loaded.fan, choice, colength, tau)?;
    let mut attempt = 0;
    let report = loop {
        match quadratic_dt_series(&loaded.fan, params, max_order) {
            Ok(r) => break r,
            Err(DtError::DegenerateWeights { .. }) if auto && attempt < AUTO_RETRIES => {
                attempt += 1;
                colength += 1;
                ctx.warn(format!(
                    "weights {params} degenerate; reselecting with colength bound {colength}"
                ));
                params = select_weights(&loaded.fan, colength, tau, DEFAULT_SEARCH_BOUND)?;
            }
            Err(e) => return Err(e.into()),
        }
    };
    let p = report.params;
    match output.format {
        Format::Structured => {
            #[derive(Serialize)]
            struct Body {
                series: Vec<String>,
                exponent: String,
                bott_c3: String,
                weights: WeightsBlock,
                manifest: Manifest,
            }
            let manifest = ctx.manifest(
                "invariants",
                Some(&loaded.digest),
                serde_json::json!({
                    "max_order": max_order,
                    "embedding": [p.a, p.b, p.c],
                    "tau": p.tau_class().to_string(),
                    "auto": auto,
                }),
                output.timings,
            );
            ctx.emit_json(&Body {
                series: series_to_strings(&report.series),
                exponent: format_rational(&report.exponent),
                bott_c3: format_rational(&report.bott_c3),
                weights: WeightsBlock {
                    embedding: [p.a, p.b, p.c],
                    tau: p.tau_class().to_string(),
                    auto,
                    cones: report.cone_weights.clone(),
                },
                manifest,
            })?;
        }
        Format::Table => {
            ctx.line(format!("fan: {} (sha256 {})", path.display(), loaded.digest))?;
            ctx.line(format!("embedding: {p}  tau: {}", p.tau_class()))?;
            ctx.line(format!("series: {}", report.series))?;
            ctx.line(format!("exponent: {}", format_rational(&report.exponent)))?;
            ctx.line(format!("bott_c3: {}", format_rational(&report.bott_c3)))?;
            series_lines(ctx, &report.series)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_vertex(
    ctx: &mut Context<'_>,
    weights: &[i64],
    max_order: usize,
    classical: bool,
    output: &OutputArgs,
) -> Result<i32, Failure> {
    let s = WeightTriple::new(weights[0], weights[1], weights[2]);
    let series = if classical {
        vertex_measure_classical(s, max_order)?
    } else {
        let mut order = max_order;
        if order % 2 == 1 {
            order -= 1;
            ctx.warn(format!(
                "quadratic measure lives in even degrees; using max order {order}"
            ));
        }
        vertex_measure_quadratic(s, order)?
    };
    let g = gamma(s)?;
    match output.format {
        Format::Structured => {
            #[derive(Serialize)]
            struct Body {
                series: Vec<String>,
                gamma: String,
                weights: WeightTriple,
                classical: bool,
                manifest: Manifest,
            }
            let manifest = ctx.manifest(
                "vertex",
                None,
                serde_json::json!({ "max_order": max_order, "classical": classical }),
                output.timings,
            );
            ctx.emit_json(&Body {
                series: series_to_strings(&series),
                gamma: format_rational(&g),
                weights: s,
                classical,
                manifest,
            })?;
        }
        Format::Table => {
            let kind = if classical { "classical" } else { "quadratic" };
            ctx.line(format!("weights: {s}  measure: {kind}  gamma: {}", format_rational(&g)))?;
            series_lines(ctx, &series)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_blowup(ctx: &mut Context<'_>, path: &Path, orbit: usize, out: Option<&Path>) -> Result<i32, Failure> {
    let loaded = load_fan(path)?;
    let orbits = sigma_orbits(&loaded.fan)?;
    let Some(&(rep, partner)) = orbits.get(orbit) else {
        return Err(FanError::NoSuchOrbit {
            index: orbit,
            count: orbits.len(),
        }
        .into());
    };
    let blown = star_subdivide(&loaded.fan, rep)?;
    let text = blown.to_json();
    match out {
        Some(dest) => {
            std::fs::write(dest, &text)
                .map_err(|e| Failure::new(EXIT_IO, format!("cannot write {}: {e}", dest.display())))?;
            ctx.line(format!(
                "blew up orbit {orbit} (cones {rep}, {partner}): {} rays, {} cones -> {}",
                blown.rays().len(),
                blown.cones().len(),
                dest.display()
            ))?;
        }
        None => ctx.line(text.trim_end())?,
    }
    Ok(EXIT_OK)
}

fn cmd_oracle(
    ctx: &mut Context<'_>,
    path: &Path,
    n: usize,
    choice: &WeightChoice,
    output: &OutputArgs,
) -> Result<i32, Failure> {
    let loaded = load_fan(path)?;
    let params = choose_params(&loaded.fan, choice, (n / 2).max(1), None)?;
    let direct = localization_oracle(&loaded.fan, params, n)?;
    let report = quadratic_dt_series(&loaded.fan, params, n)?;
    let from_series = report.series.coeff(n).clone();
    let matched = direct == from_series;
    match output.format {
        Format::Structured => {
            #[derive(Serialize)]
            struct Body {
                n: usize,
                oracle: String,
                series: String,
                matched: bool,
                weights: WeightsBlock,
                manifest: Manifest,
            }
            let manifest = ctx.manifest(
                "oracle",
                Some(&loaded.digest),
                serde_json::json!({ "n": n, "embedding": [params.a, params.b, params.c] }),
                output.timings,
            );
            ctx.emit_json(&Body {
                n,
                oracle: format_rational(&direct),
                series: format_rational(&from_series),
                matched,
                weights: WeightsBlock {
                    embedding: [params.a, params.b, params.c],
                    tau: params.tau_class().to_string(),
                    auto: choice.weights.is_none(),
                    cones: report.cone_weights,
                },
                manifest,
            })?;
        }
        Format::Table => {
            ctx.line(format!("embedding: {params}"))?;
            ctx.line(format!("oracle q^{n}: {}", format_rational(&direct)))?;
            ctx.line(format!("series q^{n}: {}", format_rational(&from_series)))?;
            ctx.line(if matched { "MATCH" } else { "MISMATCH" })?;
        }
    }
    Ok(if matched { EXIT_OK } else { EXIT_VALIDATION })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("qdt").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn vertex_table() {
        let (code, out, _) = run_args(&["vertex", "--weights", "-2", "-6", "-10", "--max-order", "4"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("2 → -64/5"), "{out}");
    }

    #[test]
    fn odd_vertex_order_is_rounded_down() {
        let (code, out, err) = run_args(&["vertex", "--weights", "-2", "-6", "-10", "--max-order", "3"]);
        assert_eq!(code, EXIT_OK);
        assert!(err.contains("warning"));
        assert!(!out.contains("3 →"));
    }

    #[test]
    fn inadmissible_vertex_weights() {
        let (code, _, err) = run_args(&["vertex", "--weights", "1", "2", "3"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(err.contains("admissible"));
        let (code, out, _) = run_args(&["vertex", "--weights", "1", "2", "3", "--max-order", "1", "--classical"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("1 → 10"), "{out}");
    }

    #[test]
    fn usage_errors_exit_three() {
        assert_eq!(run_args(&["frobnicate"]).0, EXIT_IO);
        assert_eq!(run_args(&["vertex", "--weights", "1", "2"]).0, EXIT_IO);
        assert_eq!(run_args(&["check", "/nonexistent/fan.json"]).0, EXIT_IO);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }
}
