//! `lrvkit` command-line interface.
//!
//! Exit codes: 0 on success, 2 for usage, configuration and input-file
//! errors, 3 for numerical failures.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lrvkit::montecarlo::{run_config, write_outputs, Config};
use lrvkit::record::Record;
use lrvkit::spectral::{bandwidth_from_exponent, LrvPath};
use lrvkit::whittle::WhittleOptions;
use lrvkit::{
    fit_local_whittle_with, lrd_test_with, lrv_smoothed_periodogram, read_series, simulate, write_series, LrvError,
    ProcessSpec, Series,
};

#[derive(Parser)]
#[command(name = "lrvkit", version, about = "Long-run variance, local Whittle and change-in-mean vs long memory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smoothed-periodogram estimate of f(0) and the long-run variance.
    Lrv {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = PathArg::Freq)]
        path: PathArg,
    },
    /// Local Whittle estimate of the Hurst parameter.
    LwFit {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Residual-based test of a change in mean against long memory.
    LrdTest {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        bounds: BoundArgs,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
    /// Simulate a sample path in the one-value-per-line format.
    Simulate(SimulateArgs),
    /// Run Monte Carlo experiments from a config file.
    Mc(McArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Series file: one value per line or CSV with a `value` column.
    #[arg(long)]
    input: PathBuf,
    /// Bandwidth exponent β, giving m = ⌊n^β⌋.
    #[arg(long, default_value_t = 0.65, conflicts_with = "m")]
    m_exponent: f64,
    /// Explicit bandwidth.
    #[arg(long)]
    m: Option<usize>,
    /// Print a flat JSON object instead of `key = value` lines.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value_t = 0.05)]
    lower: f64,
    #[arg(long, default_value_t = 0.95)]
    upper: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Freq,
    Acov,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Iid,
    Linear,
    Garch11,
    Sv,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Innovation variance (iid, linear).
    #[arg(long, default_value_t = 1.0)]
    variance: f64,
    /// Decay exponent of ψ_j = (j+1)^{-d} (linear).
    #[arg(long)]
    d: Option<f64>,
    /// Explicit filter coefficients ψ_0, ψ_1, ... (linear).
    #[arg(long, value_delimiter = ',')]
    coefficients: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.5)]
    alpha0: f64,
    #[arg(long, default_value_t = 0.2)]
    alpha1: f64,
    #[arg(long, default_value_t = 0.4)]
    beta1: f64,
    /// Intercept of the log-volatility recursion (sv).
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    phi: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma_w2: f64,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    config: PathBuf,
    /// Run only this experiment, even if it is marked `full_only`.
    #[arg(long)]
    experiment: Option<String>,
    /// Include experiments marked `full_only`.
    #[arg(long)]
    full: bool,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the replication count of every selected experiment.
    #[arg(long)]
    reps: Option<usize>,
    /// Override the master seed of every experiment.
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Config(String),
    Numeric(String),
}

impl From<LrvError> for Failure {
    fn from(e: LrvError) -> Self {
        if e.is_config_error() {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Lrv { input, path } => {
            let (x, m) = load(&input)?;
            let path = match path {
                PathArg::Freq => LrvPath::FrequencyAverage,
                PathArg::Acov => LrvPath::AutocovarianceWeights,
            };
            emit(&Record::from(&lrv_smoothed_periodogram(&x, m, path)?), input.json);
        }
        Command::LwFit { input, bounds } => {
            let (x, m) = load(&input)?;
            let fit = fit_local_whittle_with(&x, m, &options(&bounds))?;
            emit(&Record::from(&fit), input.json);
        }
        Command::LrdTest { input, bounds, alpha } => {
            let (x, m) = load(&input)?;
            let out = lrd_test_with(&x, m, alpha, &options(&bounds))?;
            emit(&Record::from(&out), input.json);
        }
        Command::Simulate(args) => simulate_cmd(&args)?,
        Command::Mc(args) => mc(&args)?,
    }
    Ok(())
}

fn load(input: &InputArgs) -> Result<(Series, usize), Failure> {
    let x = read_series(&input.input).map_err(|e| match e {
        LrvError::Io(io) => Failure::Config(format!("cannot read {}: {io}", input.input.display())),
        other => other.into(),
    })?;
    let m = match input.m {
        Some(m) => m,
        None => bandwidth_from_exponent(x.len(), input.m_exponent),
    };
    Ok((x, m))
}

fn options(b: &BoundArgs) -> WhittleOptions {
    WhittleOptions::with_bounds(b.lower, b.upper)
}

fn emit(record: &Record, json: bool) {
    if json {
        println!("{}", record.to_json());
    } else {
        print!("{}", record.to_kv());
    }
}

fn spec_of(a: &SimulateArgs) -> Result<ProcessSpec, Failure> {
    Ok(match a.model {
        Model::Iid => ProcessSpec::iid(a.variance),
        Model::Linear => match (a.d, &a.coefficients) {
            (Some(d), None) => ProcessSpec::power_decay(d, a.variance),
            (None, Some(c)) => ProcessSpec::moving_average(c.clone(), a.variance),
            _ => return Err(Failure::Config("linear model needs exactly one of --d and --coefficients".into())),
        },
        Model::Garch11 => ProcessSpec::garch11(a.alpha0, a.alpha1, a.beta1),
        Model::Sv => ProcessSpec::stoch_vol(a.alpha, a.phi, a.sigma_w2),
    })
}

fn simulate_cmd(args: &SimulateArgs) -> Result<(), Failure> {
    let spec = spec_of(args)?;
    let x = simulate(&spec, args.n, args.seed)?;
    let header = vec![format!("model = {}", spec.describe()), format!("n = {}", args.n), format!("seed = {}", args.seed)];
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path).map_err(LrvError::from)?;
            write_series(std::io::BufWriter::new(file), x.values(), &header)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_series(&mut lock, x.values(), &header)?;
            lock.flush().map_err(LrvError::from)?;
        }
    }
    Ok(())
}

fn mc(args: &McArgs) -> Result<(), Failure> {
    if let Some(k) = args.threads {
        if k == 0 {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    let mut config = Config::load(&args.config).map_err(|e| match e {
        LrvError::Io(io) => Failure::Config(format!("cannot read {}: {io}", args.config.display())),
        other => other.into(),
    })?;
    for e in &mut config.experiments {
        if let Some(reps) = args.reps {
            e.reps = reps;
        }
        if let Some(seed) = args.seed {
            e.master_seed = seed;
        }
        e.validate()?;
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    let outputs = run_config(&config, args.experiment.as_deref(), args.full)?;
    for out in &outputs {
        for w in &out.warnings {
            eprintln!("warning [{}]: {w}", out.name);
        }
    }
    for path in write_outputs(&outputs, &args.out)? {
        println!("{}", path.display());
    }
    Ok(())
}
