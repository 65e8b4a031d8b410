use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use tfkit::ambiguity::{ambiguity_from_wvd, apply_kernel};
use tfkit::io::{self, Format};
use tfkit::moments::{self, covariance, CovarianceMatrix};
use tfkit::signal::{analytic, generate};
use tfkit::symplectic::{act_word, factor, pushforward, SupportPolicy};
use tfkit::tfd::compute_tfd;
use tfkit::wigner::wvd;
use tfkit::{
    GeneratorWord, KernelSpec, Result, SampledSignal, SignalKind, SignalSpec, Sl2Matrix, TfError,
};

const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tfkit",
    version,
    about = "Time-frequency distributions, uncertainty reports and SL(2,R) actions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a test signal.
    Gen(GenArgs),
    /// Compute a kernel time-frequency distribution.
    Tfd(GridArgs),
    /// Compute the (kernel-weighted) ambiguity function.
    Amb(GridArgs),
    /// Emit the uncertainty report for a signal and kernel.
    Report(ReportArgs),
    /// Apply a symplectic transformation to a signal.
    Sl2(Sl2Args),
}

#[derive(Args)]
struct Output {
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "csv", value_parser = parse_format)]
    format: Format,
}

#[derive(Args)]
struct GenArgs {
    /// gaussian, lfm_chirp, tone, two_tone, two_component or from_file:<path>
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    fs: f64,
    #[arg(long)]
    width: Option<f64>,
    /// Chirp rate in Hz/s.
    #[arg(long)]
    rate: Option<f64>,
    #[arg(long)]
    tc: Option<f64>,
    #[arg(long)]
    fc: Option<f64>,
    #[arg(long)]
    f1: Option<f64>,
    #[arg(long)]
    f2: Option<f64>,
    #[arg(long)]
    sep_t: Option<f64>,
    #[arg(long)]
    sep_f: Option<f64>,
    /// Time of the first sample; the grid is centered when omitted.
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct GridArgs {
    input: PathBuf,
    /// name[:key=value,...], e.g. gaussian:alpha=0.6,beta=0.5
    #[arg(long, default_value = "wigner")]
    kernel: String,
    /// Replace a real input by its analytic signal first.
    #[arg(long)]
    analytic: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct ReportArgs {
    input: PathBuf,
    #[arg(long, default_value = "wigner")]
    kernel: String,
    /// Center of the Relation 1 moments; the measured means when omitted.
    #[arg(long, requires = "f0", allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, requires = "t0", allow_hyphen_values = true)]
    f0: Option<f64>,
    /// Relative tolerance of the checks; overrides TFKIT_TOL.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_format)]
    format: Format,
}

#[derive(Args)]
struct Sl2Args {
    input: PathBuf,
    /// Generator word, e.g. "J,T(2.0),M(0.5)".
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    word: Option<String>,
    /// Matrix entries a,b,c,d of [[a, b], [c, d]].
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// Print a covariance verification block as JSON on stdout.
    #[arg(long)]
    verify: bool,
    /// Fail instead of warning when a dilation leaves the grid.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    out: Output,
}

fn parse_format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: TfError| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Tfd(a) => cmd_tfd(a),
        Command::Amb(a) => cmd_amb(a),
        Command::Report(a) => cmd_report(a),
        Command::Sl2(a) => cmd_sl2(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_USAGE
            })
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let kind: SignalKind = a.kind.parse()?;
    let mut spec = SignalSpec::new(kind, a.n, a.fs);
    let given = [
        ("width", a.width),
        ("rate", a.rate),
        ("tc", a.tc),
        ("fc", a.fc),
        ("f1", a.f1),
        ("f2", a.f2),
        ("sep_t", a.sep_t),
        ("sep_f", a.sep_f),
        ("t0", a.t0),
    ];
    for (k, v) in given {
        if let Some(v) = v {
            spec = spec.param(k, v);
        }
    }
    if spec.kind.required_keys().contains(&"width") && a.width.is_none() {
        spec = spec.param("width", 1.0);
    }
    let sig = generate(&spec)?;
    emit(
        a.out.output.as_deref(),
        &io::signal_to_string(&sig, a.out.format)?,
    )
}

fn load(path: &Path, make_analytic: bool) -> Result<SampledSignal> {
    let sig = io::read_signal_path(path)?;
    if make_analytic {
        analytic(&sig)
    } else {
        Ok(sig)
    }
}

fn cmd_tfd(a: GridArgs) -> Result<()> {
    let spec = KernelSpec::parse(&a.kernel)?;
    let sig = load(&a.input, a.analytic)?;
    let rho = compute_tfd(&sig, &spec.build_for(&sig)?)?;
    if !rho.time_marginal || !rho.freq_marginal {
        log::info!("kernel {} is not marginal-preserving", rho.kernel_name);
    }
    emit(
        a.out.output.as_deref(),
        &io::tfgrid_to_string(&rho.grid, a.out.format)?,
    )
}

fn cmd_amb(a: GridArgs) -> Result<()> {
    let spec = KernelSpec::parse(&a.kernel)?;
    let sig = load(&a.input, a.analytic)?;
    let g = spec.build_for(&sig)?;
    let amb = apply_kernel(&ambiguity_from_wvd(&wvd(&sig)?), &g)?;
    emit(
        a.out.output.as_deref(),
        &io::ambgrid_to_string(&amb, a.out.format)?,
    )
}

fn tolerance(flag: Option<f64>) -> Result<f64> {
    let tol = match (flag, std::env::var("TFKIT_TOL")) {
        (Some(t), _) => t,
        (None, Ok(s)) => s
            .trim()
            .parse()
            .map_err(|_| TfError::InvalidParameter(format!("TFKIT_TOL is not a number: `{s}`")))?,
        (None, Err(_)) => moments::DEFAULT_TOL,
    };
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(TfError::InvalidParameter(format!(
            "tolerance must be finite and >= 0, got {tol}"
        )));
    }
    Ok(tol)
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let spec = KernelSpec::parse(&a.kernel)?;
    let tol = tolerance(a.tol)?;
    let sig = io::read_signal_path(&a.input)?;
    let rho = compute_tfd(&sig, &spec.build_for(&sig)?)?;
    let center = a.t0.zip(a.f0);
    let rep = moments::report(&sig, &rho, center, tol)?;
    emit(a.output.as_deref(), &structured(&rep, a.format)?)
}

/// JSON as is, or CSV as `key,value` lines with dotted keys.
fn structured<T: Serialize>(v: &T, format: Format) -> Result<String> {
    let json = io::to_json(v)?;
    if format == Format::Json {
        return Ok(json);
    }
    let value: Value = serde_json::from_str(&json)?;
    let mut out = String::from("key,value\n");
    flatten("", &value, &mut out);
    Ok(out)
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix},{s}\n")),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => out.push_str(&format!("{prefix},{f:.16e}\n")),
            _ => out.push_str(&format!("{prefix},{n}\n")),
        },
        other => out.push_str(&format!("{prefix},{other}\n")),
    }
}

fn parse_matrix(s: &str) -> Result<Sl2Matrix> {
    let v = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| TfError::Parse(format!("matrix must be four numbers a,b,c,d, got `{s}`")))?;
    match v[..] {
        [a, b, c, d] => Sl2Matrix::new(a, b, c, d),
        _ => Err(TfError::Parse(format!(
            "matrix must be four numbers a,b,c,d, got `{s}`"
        ))),
    }
}

#[derive(Serialize)]
struct Verification {
    schema: &'static str,
    word: String,
    matrix: Sl2Matrix,
    c_input: CovarianceMatrix,
    c_measured: CovarianceMatrix,
    c_pushforward: CovarianceMatrix,
    max_rel_deviation: f64,
    strong_det_input: f64,
    strong_det_output: f64,
}

fn cmd_sl2(a: Sl2Args) -> Result<()> {
    let word: GeneratorWord = match (&a.word, &a.matrix) {
        (Some(w), _) => w.parse()?,
        (None, Some(m)) => factor(&parse_matrix(m)?)?,
        (None, None) => unreachable!("clap requires --word or --matrix"),
    };
    let s = word.product();
    let sig = io::read_signal_path(&a.input)?;
    let policy = if a.strict {
        SupportPolicy::Fail
    } else {
        SupportPolicy::Warn
    };
    let out = act_word(&sig, &word, policy)?;
    log::info!("applied word `{word}`");

    let text = io::signal_to_string(&out, a.out.format)?;
    match (&a.out.output, a.verify) {
        (Some(p), _) => std::fs::write(p, text)?,
        (None, false) => print!("{text}"),
        (None, true) => {}
    }
    if a.verify {
        let c_input = covariance(&wvd(&sig)?)?;
        let c_measured = covariance(&wvd(&out)?)?;
        let c_pushforward = pushforward(&c_input, &s)?;
        let v = Verification {
            schema: "tfkit-sl2-verify/1",
            word: word.to_string(),
            matrix: s,
            c_input,
            c_measured,
            c_pushforward,
            max_rel_deviation: c_pushforward.max_rel_deviation(&c_measured),
            strong_det_input: c_input.strong_det(),
            strong_det_output: c_measured.strong_det(),
        };
        print!("{}", io::to_json(&v)?);
    }
    Ok(())
}
