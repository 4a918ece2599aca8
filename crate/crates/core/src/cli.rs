//! The `betazeta` command line: `eval`, `find-zeros` and `figure`.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage or parse error,
//! 3 numeric singularity or failed scan, 4 verification failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::complex::{format_complex, format_real, parse_complex, Complex};
use crate::config::{Overrides, RunConfig};
use crate::error::{Error, Result};
use crate::figures::{
    real_axis_scan, write_panels_csv, write_real_axis_csv, zero_panels, FigureId,
};
use crate::meta::MetaMode;
use crate::primes::PrimeTable;
use crate::series::{Acceleration, Evaluator, SeriesValue};
use crate::zerofinder::{verify_against_table, ReferenceZeroTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "betazeta",
    version,
    about = "Prime-series zeta, beta coincidence zero finder and figure data"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` config file; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Number of primes K in the truncated prime series.
    #[arg(long, global = true, value_name = "K")]
    pub primes: Option<usize>,

    /// Number of terms N in the accelerated eta series.
    #[arg(long, global = true, value_name = "N")]
    pub eta_terms: Option<usize>,

    /// euler_transform or direct_partial_sum.
    #[arg(long, global = true)]
    pub acceleration: Option<Acceleration>,

    /// Magnitude below which a denominator counts as singular.
    #[arg(long, global = true)]
    pub pole_guard: Option<f64>,

    /// Worker threads for grid evaluation (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Prime table cache file, read if present and written otherwise.
    #[arg(long, global = true, value_name = "PATH")]
    pub prime_cache: Option<PathBuf>,

    /// Reference zero table (one ordinate per line).
    #[arg(long, global = true, value_name = "PATH")]
    pub table: Option<PathBuf>,

    /// Directory for relative output paths.
    #[arg(long, global = true, value_name = "DIR")]
    pub output_dir: Option<PathBuf>,

    /// with_b_zeta, with_b_m or fixed:<complex>.
    #[arg(long, global = true)]
    pub meta_mode: Option<MetaMode>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one function at a complex point.
    Eval(EvalArgs),
    /// Locate zeros on the critical line and verify them against the reference table.
    FindZeros(FindZerosArgs),
    /// Emit the CSV dataset behind a figure.
    Figure(FigureArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// zeta, prime-zeta, alt-prime-zeta, euler-product, remainder, meta, b-zeta or b-m.
    pub function: Function,

    /// Complex point such as `0.5+14.134725i`.
    #[arg(allow_hyphen_values = true)]
    pub s: String,

    /// Explicit base for `meta`; overrides the meta mode.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
}

#[derive(Debug, Args)]
pub struct FindZerosArgs {
    pub t_min: f64,
    pub t_max: f64,

    /// Residual grid step.
    #[arg(long)]
    pub step: Option<f64>,

    /// Bracket width for the final golden-section refinement.
    #[arg(long)]
    pub tol: Option<f64>,

    /// Distance within which a candidate matches a reference zero.
    #[arg(long)]
    pub match_tol: Option<f64>,

    /// Grid minima at or above this residual are ignored.
    #[arg(long)]
    pub detect_threshold: Option<f64>,

    /// Screened minima must fall below this residual.
    #[arg(long)]
    pub confirm_threshold: Option<f64>,

    /// JSON-lines output file (default: standard output).
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    /// fig1, fig2, appendixA or appendixB.
    pub id: String,

    /// Reference zero indices for the appendix figures, `a..b` or `n`.
    #[arg(long, value_name = "RANGE")]
    pub zeros: Option<String>,

    /// Output CSV file (default: standard output).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long)]
    pub alpha_min: Option<f64>,

    #[arg(long)]
    pub alpha_max: Option<f64>,

    #[arg(long)]
    pub alpha_step: Option<f64>,

    /// Relative beta residual marking the real-axis crossover.
    #[arg(long)]
    pub divergence_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Function {
    Zeta,
    PrimeZeta,
    AltPrimeZeta,
    EulerProduct,
    Remainder,
    Meta,
    BZeta,
    #[value(name = "b-m")]
    BM,
}

impl Function {
    fn name(self) -> &'static str {
        match self {
            Function::Zeta => "zeta",
            Function::PrimeZeta => "prime-zeta",
            Function::AltPrimeZeta => "alt-prime-zeta",
            Function::EulerProduct => "euler-product",
            Function::Remainder => "remainder",
            Function::Meta => "meta",
            Function::BZeta => "b-zeta",
            Function::BM => "b-m",
        }
    }
}

/// Parses `a..b` (inclusive) or a single index.
pub fn parse_zero_range(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::Parse(format!("zero range {text:?}: expected a..b or n"));
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let (first, last) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let n = parse(text)?;
            (n, n)
        }
    };
    if first == 0 || first > last {
        return Err(bad());
    }
    Ok((first, last))
}

fn overrides(global: &GlobalArgs) -> Overrides {
    Overrides {
        prime_count: global.primes,
        eta_terms: global.eta_terms,
        acceleration: global.acceleration,
        pole_guard: global.pole_guard,
        meta_mode: global.meta_mode,
        reference_table: global.table.clone(),
        output_dir: global.output_dir.clone(),
        prime_cache: global.prime_cache.clone(),
        workers: global.workers,
        ..Overrides::default()
    }
}

/// Defaults, then the config file, then the flags.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.global.config {
        cfg.apply_file(&std::fs::read_to_string(path)?)?;
    }
    let mut o = overrides(&cli.global);
    match &cli.command {
        Command::FindZeros(a) => {
            o.scan_step = a.step;
            o.refine_tol = a.tol;
            o.match_tol = a.match_tol;
            o.detect_threshold = a.detect_threshold;
            o.confirm_threshold = a.confirm_threshold;
        }
        Command::Figure(a) => o.divergence_threshold = a.divergence_threshold,
        Command::Eval(_) => {}
    }
    cfg.apply_overrides(&o);
    cfg.validate()?;
    Ok(cfg)
}

fn evaluator(cfg: &RunConfig) -> Result<Evaluator> {
    match &cfg.prime_cache {
        Some(path) => {
            let table = PrimeTable::load_or_create(path, cfg.eval.prime_count)?;
            Evaluator::with_primes(cfg.eval, Arc::new(table))
        }
        None => Evaluator::new(cfg.eval),
    }
}

fn reference_table(cfg: &RunConfig) -> Result<ReferenceZeroTable> {
    match &cfg.reference_table {
        Some(path) => ReferenceZeroTable::from_file(path).map_err(|e| match e {
            Error::Io(io) => Error::Io(std::io::Error::new(
                io.kind(),
                format!("reference zero table {}: {io}", path.display()),
            )),
            other => other,
        }),
        None => Ok(ReferenceZeroTable::standard()),
    }
}

fn output_path(cfg: &RunConfig, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        cfg.output_dir.join(path)
    }
}

fn create(cfg: &RunConfig, path: &Path) -> Result<BufWriter<File>> {
    let path = output_path(cfg, path);
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn echo_config<W: Write + ?Sized>(out: &mut W, cfg: &RunConfig) -> std::io::Result<()> {
    writeln!(out, "prime_count = {}", cfg.eval.prime_count)?;
    writeln!(out, "eta_terms = {}", cfg.eval.eta_terms)?;
    writeln!(out, "acceleration = {}", cfg.eval.acceleration)?;
    writeln!(out, "pole_guard = {:e}", cfg.eval.pole_guard)
}

/// One evaluated function: value, estimate, terms.
struct Record {
    value: Complex,
    truncation_estimate: Option<f64>,
    terms_used: usize,
}

impl From<SeriesValue> for Record {
    fn from(v: SeriesValue) -> Self {
        Record {
            value: v.value,
            truncation_estimate: Some(v.truncation_estimate),
            terms_used: v.terms_used,
        }
    }
}

fn composite(eval: &Evaluator, f: Function, s: Complex, mode: MetaMode) -> Result<Complex> {
    match f {
        Function::Meta => eval.meta_auto(s, mode),
        Function::BZeta => eval.b_zeta(s),
        Function::BM => eval.b_m(s),
        _ => unreachable!("series functions carry their own estimate"),
    }
}

/// `cmd_eval`: evaluates `function` at `s`.
///
/// The beta and meta functions have no tail bound of their own; their
/// estimate is the change between `K` and `ceil(K/2)` primes.
pub fn cmd_eval<W: Write + ?Sized>(args: &EvalArgs, cfg: &RunConfig, out: &mut W) -> Result<()> {
    let s = parse_complex(&args.s)?;
    let mode = match &args.b {
        Some(b) => MetaMode::Fixed(parse_complex(b)?),
        None => cfg.meta_mode,
    };
    mode.validate()?;
    let eval = evaluator(cfg)?;
    let record = match args.function {
        Function::Zeta => eval.eta_zeta(s)?.into(),
        Function::PrimeZeta => eval.prime_zeta_trunc(s)?.into(),
        Function::AltPrimeZeta => eval.alt_prime_zeta_trunc(s)?.into(),
        Function::EulerProduct => eval.euler_product_trunc(s)?.into(),
        Function::Remainder => eval.remainder_trunc(s)?.into(),
        f @ (Function::Meta | Function::BZeta | Function::BM) => {
            let value = composite(&eval, f, s, mode)?;
            let k = cfg.eval.prime_count;
            let truncation_estimate = if k >= 2 {
                let half = k.div_ceil(2);
                let coarse = Evaluator::with_primes(
                    cfg.eval.with_primes(half),
                    Arc::new(eval.primes().prefix(half)?),
                )?;
                composite(&coarse, f, s, mode)
                    .ok()
                    .map(|v| (value - v).norm())
            } else {
                None
            };
            Record {
                value,
                truncation_estimate,
                terms_used: k,
            }
        }
    };
    writeln!(out, "function = {}", args.function.name())?;
    writeln!(out, "s = {}", format_complex(s))?;
    writeln!(out, "value = {}", format_complex(record.value))?;
    writeln!(
        out,
        "truncation_estimate = {}",
        record
            .truncation_estimate
            .map(format_real)
            .unwrap_or_else(|| "none".into())
    )?;
    writeln!(out, "terms_used = {}", record.terms_used)?;
    if args.function == Function::Meta {
        writeln!(out, "meta_mode = {mode}")?;
    }
    echo_config(out, cfg)?;
    Ok(())
}

/// `cmd_find_zeros`: scans, refines, writes one JSON line per candidate and
/// a verification summary. Returns the exit status.
pub fn cmd_find_zeros(
    args: &FindZerosArgs,
    cfg: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let table = reference_table(cfg)?;
    let eval = evaluator(cfg)?;
    let found = eval.find_zeros(args.t_min, args.t_max, &cfg.scan, cfg.refine_tol)?;
    let report = verify_against_table(&found, &table, cfg.match_tol, (args.t_min, args.t_max))?;

    let mut lines = String::new();
    for cand in &report.candidates {
        lines.push_str(&serde_json::to_string(cand).map_err(|e| Error::Parse(e.to_string()))?);
        lines.push('\n');
    }
    // the summary goes wherever the JSON lines do not
    let summary: &mut dyn Write = match &args.report {
        Some(path) => {
            let mut file = create(cfg, path)?;
            file.write_all(lines.as_bytes())?;
            file.flush()?;
            out
        }
        None => {
            out.write_all(lines.as_bytes())?;
            err
        }
    };
    for m in &report.matches {
        writeln!(
            summary,
            "zero {:>3}  t = {:.9}  reference = {:.9}  |error| = {:.3e}",
            m.reference_index, m.candidate_t, m.reference_t, m.error
        )?;
    }
    for m in &report.misses {
        writeln!(
            summary,
            "miss       t = {:.9}  nearest reference #{} = {:.9}",
            m.candidate_t, m.reference_index, m.reference_t
        )?;
    }
    for m in &report.duplicates {
        writeln!(
            summary,
            "duplicate  t = {:.9}  of reference #{}",
            m.candidate_t, m.reference_index
        )?;
    }
    for (index, t) in &report.false_negatives {
        writeln!(summary, "not found  reference #{index} = {t:.9}")?;
    }
    writeln!(summary, "{}", report.summary())?;
    Ok(if report.is_clean() {
        EXIT_OK
    } else {
        EXIT_VERIFICATION
    })
}

/// `cmd_figure`: writes the CSV for `args.id`.
pub fn cmd_figure<W: Write + ?Sized>(
    args: &FigureArgs,
    cfg: &RunConfig,
    out: &mut W,
) -> Result<()> {
    let id: FigureId = args.id.parse()?;
    let (dmin, dmax, dstep) = id.default_alpha_grid();
    let alpha_min = args.alpha_min.unwrap_or(dmin);
    let alpha_max = args.alpha_max.unwrap_or(dmax);
    let step = args.alpha_step.unwrap_or(dstep);
    let eval = evaluator(cfg)?;

    let mut buf: Vec<u8> = Vec::new();
    if id.is_panel() {
        let zeros = match &args.zeros {
            Some(z) => parse_zero_range(z)?,
            None => (1, 10),
        };
        let table = reference_table(cfg)?;
        let panels = zero_panels(
            &eval,
            &table,
            zeros,
            alpha_min,
            alpha_max,
            step,
            cfg.meta_mode,
        )?;
        write_panels_csv(&mut buf, id, &eval, cfg.meta_mode, &panels)?;
    } else {
        if args.zeros.is_some() {
            return Err(Error::InvalidArgument(format!(
                "--zeros does not apply to {id}"
            )));
        }
        let scan = real_axis_scan(&eval, alpha_min, alpha_max, step, cfg.divergence_threshold)?;
        write_real_axis_csv(&mut buf, id, &eval, &scan)?;
    }
    match &args.out {
        Some(path) if path.as_os_str() != "-" => {
            let mut file = create(cfg, path)?;
            file.write_all(&buf)?;
            file.flush()?;
        }
        _ => out.write_all(&buf)?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = resolve_config(cli)?;
    // output is buffered so the work closure can move onto the worker pool
    let work = || {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        let code = match &cli.command {
            Command::Eval(a) => cmd_eval(a, &cfg, &mut o).map(|_| EXIT_OK),
            Command::FindZeros(a) => cmd_find_zeros(a, &cfg, &mut o, &mut e),
            Command::Figure(a) => cmd_figure(a, &cfg, &mut o).map(|_| EXIT_OK),
        };
        (code, o, e)
    };
    let (code, o, e) = match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("worker pool: {e}")))?
            .install(work),
        None => work(),
    };
    out.write_all(&o)?;
    err.write_all(&e)?;
    code
}

/// Parses `argv`, runs the command and returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let code = match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    };
    if out.flush().is_err() {
        return EXIT_IO;
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut argv = vec!["betazeta"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn zero_ranges() {
        assert_eq!(parse_zero_range("1..4").unwrap(), (1, 4));
        assert_eq!(parse_zero_range("2..=3").unwrap(), (2, 3));
        assert_eq!(parse_zero_range("7").unwrap(), (7, 7));
        assert!(parse_zero_range("0..3").is_err());
        assert!(parse_zero_range("4..1").is_err());
        assert!(parse_zero_range("a..b").is_err());
    }

    #[test]
    fn eval_basel() {
        let (code, out, _) = run_str(&["eval", "zeta", "2+0i"]);
        assert_eq!(code, 0);
        assert!(out.contains("value = 1.64493406"), "{out}");
        assert!(out.contains("prime_count = 1000"));
    }

    #[test]
    fn eval_b_m_single_prime() {
        let (code, out, _) = run_str(&["eval", "b-m", "2+0i", "--primes", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("value = 1.26491106"), "{out}");
        assert!(out.contains("truncation_estimate = none"));
    }

    #[test]
    fn eval_negative_imaginary_and_meta_b() {
        let (code, out, _) = run_str(&["eval", "meta", "2-1i", "--b", "-2+0.5i"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("meta_mode = fixed:"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["eval", "zeta", "1+0i"]).0, 3);
        assert_eq!(run_str(&["eval", "zeta", "x+yi"]).0, 2);
        assert_eq!(run_str(&["eval", "nonsense", "2"]).0, 2);
        assert_eq!(run_str(&["eval", "zeta", "-1"]).0, 2);
        assert_eq!(run_str(&["figure", "bogus"]).0, 2);
        assert_eq!(run_str(&["find-zeros", "20", "10"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }

    #[test]
    fn find_zeros_first() {
        let (code, out, err) = run_str(&["find-zeros", "10", "15"]);
        assert_eq!(code, 0, "{err}");
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 1);
        let cand: crate::zerofinder::ZeroCandidate = serde_json::from_str(lines[0]).unwrap();
        assert!((cand.t - 14.134725).abs() < 1e-3);
        assert!(err.contains("1 matched"));
    }

    #[test]
    fn find_zeros_gap() {
        let (code, out, err) = run_str(&["find-zeros", "15", "20"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.is_empty());
        assert!(err.contains("0 matched"));
    }

    #[test]
    fn figure_needs_table_file() {
        let (code, _, err) = run_str(&[
            "figure",
            "appendixB",
            "--zeros",
            "1..2",
            "--table",
            "/nonexistent/zeros.txt",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("reference zero table"), "{err}");
    }
}
