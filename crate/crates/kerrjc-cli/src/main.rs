//! `kerrjc`: parameter sweeps for the coupled qubit-resonator model.
//!
//! Exit codes: 0 on success, 2 on spec validation failure, 3 on a numerical
//! precondition failure (truncation, degenerate parameters).

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kerrjc::sweep::{self, Command as SweepCommand, Format, Method, SweepSpec};
use kerrjc::{model::SystemParams, Error as KerrError};

const EXIT_SPEC: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(
    name = "kerrjc",
    version,
    about = "Sweeps of transfer probability, coherence revival, and the decoherence factor for a qubit coupled to a Kerr resonator",
    after_help = "Frequencies are in units of omega (hbar = 1); the time axis is omega*t.\n\
                  The environment variable KERRJC_THREADS caps grid parallelism; 1 forces\n\
                  the serial (bitwise-reproducible) path, same as --serial."
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Information-transfer probability: closed form vs exact propagation.
    Transfer(SweepArgs),
    /// Qubit purity and |C01| over time; revival times in the summary.
    Revival(SweepArgs),
    /// Decoherence factor D(t) by the requested methods.
    Decoherence(SweepArgs),
    /// Trace distance between full and rotating-wave qubit dynamics.
    RwaCheck(SweepArgs),
    /// Truncation-convergence scan of D(t) at the grid midpoint over --dims.
    Convergence(SweepArgs),
    /// Decoherence audit: numeric vs printed series vs rederived series.
    Audit(SweepArgs),
}

impl CliCommand {
    fn split(&self) -> (SweepCommand, &SweepArgs) {
        match self {
            Self::Transfer(a) => (SweepCommand::Transfer, a),
            Self::Revival(a) => (SweepCommand::Revival, a),
            Self::Decoherence(a) => (SweepCommand::Decoherence, a),
            Self::RwaCheck(a) => (SweepCommand::RwaCheck, a),
            Self::Convergence(a) => (SweepCommand::Convergence, a),
            Self::Audit(a) => (SweepCommand::Audit, a),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// Resonator frequency.
    #[arg(long)]
    omega: Option<f64>,
    /// Qubit splitting; recorded in the metadata echo. Sweep dynamics pin
    /// the qubit on resonance (omega_q = omega).
    #[arg(long = "omega-q")]
    omega_q: Option<f64>,
    /// Coupling constant.
    #[arg(long)]
    g: Option<f64>,
    /// Kerr strength.
    #[arg(long)]
    chi: Option<f64>,
    #[arg(long = "alpha-re")]
    alpha_re: Option<f64>,
    #[arg(long = "alpha-im")]
    alpha_im: Option<f64>,
    #[arg(long = "beta-re")]
    beta_re: Option<f64>,
    #[arg(long = "beta-im")]
    beta_im: Option<f64>,
    /// Grid start, in units of omega*t.
    #[arg(long = "t-min")]
    t_min: Option<f64>,
    /// Grid end, in units of omega*t.
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    #[arg(long = "t-steps")]
    t_steps: Option<usize>,
    /// Fock truncation dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated decoherence methods:
    /// numeric,printed-series,rederived-series,chi0,short-time.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Comma-separated dims for the convergence scan, e.g. 16,32,64.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Output path; stdout when omitted.
    #[arg(long = "out")]
    out: Option<String>,
    /// Output format: csv (curves) or json (run summary).
    #[arg(long)]
    format: Option<String>,
    /// Flat key=value config file; flags override config keys, config keys
    /// override built-in defaults.
    #[arg(long)]
    config: Option<String>,
    /// Force single-threaded, bitwise-reproducible evaluation.
    #[arg(long)]
    serial: bool,
}

/// Built-in defaults, overridden by config file, overridden by flags.
#[derive(Debug, Clone)]
struct Settings {
    omega: f64,
    omega_q: Option<f64>,
    g: f64,
    chi: f64,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    t_min: f64,
    t_max: f64,
    t_steps: usize,
    dim: usize,
    methods: Vec<String>,
    dims: Vec<usize>,
    out: Option<String>,
    format: String,
    serial: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            omega: 1.0,
            omega_q: None,
            g: 0.1,
            chi: 0.01,
            alpha_re: std::f64::consts::FRAC_1_SQRT_2,
            alpha_im: 0.0,
            beta_re: std::f64::consts::FRAC_1_SQRT_2,
            beta_im: 0.0,
            t_min: 0.0,
            t_max: 8.0 * std::f64::consts::PI,
            t_steps: 1000,
            dim: 64,
            methods: vec!["numeric".into()],
            dims: vec![16, 32, 64],
            out: None,
            format: "csv".into(),
            serial: false,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { EXIT_SPEC } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &KerrError) -> u8 {
    match err {
        KerrError::InvalidParams(_)
        | KerrError::UnnormalizedInput(_)
        | KerrError::InvalidBranch(_) => EXIT_SPEC,
        KerrError::Truncation(_)
        | KerrError::DegenerateInput(_)
        | KerrError::DimensionMismatch(_) => EXIT_NUMERIC,
    }
}

fn run(cli: &Cli) -> Result<(), KerrError> {
    let (command, args) = cli.command.split();
    let spec = build_spec(command, args)?;
    apply_thread_env()?;

    let result = sweep::run(&spec)?;

    match spec.format {
        Format::Csv => {
            let csv = result.to_csv();
            match &spec.output_path {
                Some(path) => {
                    write_file(path, csv.as_bytes())?;
                    // Curves went to the file; the run summary goes to
                    // stdout for scripting.
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&result.summary_json())
                            .expect("summary serializes")
                    );
                }
                None => print!("{csv}"),
            }
        }
        Format::Json => {
            let mut text =
                serde_json::to_string_pretty(&result.summary_json()).expect("summary serializes");
            text.push('\n');
            match &spec.output_path {
                Some(path) => write_file(path, text.as_bytes())?,
                None => print!("{text}"),
            }
        }
    }
    Ok(())
}

fn write_file(path: &str, bytes: &[u8]) -> Result<(), KerrError> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| KerrError::InvalidParams(format!("cannot write {path}: {e}")))
}

/// KERRJC_THREADS caps the pool size; 1 additionally forces serial mode in
/// [`build_spec`].
fn apply_thread_env() -> Result<(), KerrError> {
    if let Ok(raw) = std::env::var("KERRJC_THREADS") {
        let n: usize = raw.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| {
            KerrError::InvalidParams(format!(
                "KERRJC_THREADS = {raw:?} must be a positive integer"
            ))
        })?;
        sweep::configure_threads(n);
    }
    Ok(())
}

fn build_spec(command: SweepCommand, args: &SweepArgs) -> Result<SweepSpec, KerrError> {
    let mut settings = Settings::default();
    if let Some(path) = &args.config {
        apply_config_file(&mut settings, path)?;
    }
    apply_flags(&mut settings, args);

    let omega = settings.omega;
    let params = SystemParams::new(
        omega,
        settings.omega_q.unwrap_or(omega),
        settings.g,
        settings.chi,
    )?;
    let methods = settings
        .methods
        .iter()
        .map(|m| Method::parse(m))
        .collect::<Result<Vec<_>, _>>()?;
    let serial = settings.serial
        || std::env::var("KERRJC_THREADS")
            .map(|v| v.trim() == "1")
            .unwrap_or(false);
    let spec = SweepSpec {
        command,
        params,
        alpha_re: settings.alpha_re,
        alpha_im: settings.alpha_im,
        beta_re: settings.beta_re,
        beta_im: settings.beta_im,
        t_min: settings.t_min,
        t_max: settings.t_max,
        t_steps: settings.t_steps,
        dim: settings.dim,
        methods,
        dims: settings.dims.clone(),
        output_path: settings.out.clone(),
        format: Format::parse(&settings.format)?,
        serial,
    };
    spec.validate()?;
    Ok(spec)
}

fn apply_flags(settings: &mut Settings, args: &SweepArgs) {
    if let Some(v) = args.omega {
        settings.omega = v;
    }
    if let Some(v) = args.omega_q {
        settings.omega_q = Some(v);
    }
    if let Some(v) = args.g {
        settings.g = v;
    }
    if let Some(v) = args.chi {
        settings.chi = v;
    }
    if let Some(v) = args.alpha_re {
        settings.alpha_re = v;
    }
    if let Some(v) = args.alpha_im {
        settings.alpha_im = v;
    }
    if let Some(v) = args.beta_re {
        settings.beta_re = v;
    }
    if let Some(v) = args.beta_im {
        settings.beta_im = v;
    }
    if let Some(v) = args.t_min {
        settings.t_min = v;
    }
    if let Some(v) = args.t_max {
        settings.t_max = v;
    }
    if let Some(v) = args.t_steps {
        settings.t_steps = v;
    }
    if let Some(v) = args.dim {
        settings.dim = v;
    }
    if let Some(v) = &args.methods {
        settings.methods = v.clone();
    }
    if let Some(v) = &args.dims {
        settings.dims = v.clone();
    }
    if let Some(v) = &args.out {
        settings.out = Some(v.clone());
    }
    if let Some(v) = &args.format {
        settings.format = v.clone();
    }
    if args.serial {
        settings.serial = true;
    }
}

/// Flat key=value config file; keys mirror the long flag names, `#` starts
/// a comment.
fn apply_config_file(settings: &mut Settings, path: &str) -> Result<(), KerrError> {
    let text = fs::read_to_string(path)
        .map_err(|e| KerrError::InvalidParams(format!("cannot read config {path}: {e}")))?;
    let entries = parse_config(&text)?;
    for (key, value) in entries {
        apply_config_entry(settings, &key, &value)
            .map_err(|e| KerrError::InvalidParams(format!("config key `{key}`: {e}")))?;
    }
    Ok(())
}

fn parse_config(text: &str) -> Result<Vec<(String, String)>, KerrError> {
    let mut entries = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            KerrError::InvalidParams(format!("config line {}: expected key=value", lineno + 1))
        })?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

fn apply_config_entry(settings: &mut Settings, key: &str, value: &str) -> Result<(), String> {
    fn float(v: &str) -> Result<f64, String> {
        v.parse().map_err(|_| format!("not a float: {v:?}"))
    }
    fn integer(v: &str) -> Result<usize, String> {
        v.parse().map_err(|_| format!("not an integer: {v:?}"))
    }
    match key {
        "omega" => settings.omega = float(value)?,
        "omega-q" => settings.omega_q = Some(float(value)?),
        "g" => settings.g = float(value)?,
        "chi" => settings.chi = float(value)?,
        "alpha-re" => settings.alpha_re = float(value)?,
        "alpha-im" => settings.alpha_im = float(value)?,
        "beta-re" => settings.beta_re = float(value)?,
        "beta-im" => settings.beta_im = float(value)?,
        "t-min" => settings.t_min = float(value)?,
        "t-max" => settings.t_max = float(value)?,
        "t-steps" => settings.t_steps = integer(value)?,
        "dim" => settings.dim = integer(value)?,
        "methods" => settings.methods = value.split(',').map(|s| s.trim().to_string()).collect(),
        "dims" => {
            settings.dims = value
                .split(',')
                .map(|s| integer(s.trim()))
                .collect::<Result<_, _>>()?
        }
        "out" => settings.out = Some(value.to_string()),
        "format" => settings.format = value.to_string(),
        "serial" => {
            settings.serial = value
                .parse()
                .map_err(|_| format!("not a bool: {value:?}"))?
        }
        other => return Err(format!("unknown key `{other}`")),
    }
    Ok(())
}
