use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use gnscap::bounds::{self, peripheral_capacities, EntropicConstants};
use gnscap::channel::{ChannelFile, MatrixFile};
use gnscap::pauli::PauliChannel;
use gnscap::scenario::{self, format_significant, ScenarioConfig};
use gnscap::spectral::{self, DEFAULT_SEED};
use gnscap::stabilizer::five_qubit_code;
use gnscap::{ChannelDense, DensityMatrix, Error, Execution, Tolerances};

#[derive(Parser)]
#[command(name = "gnscap", version, about = "Capacity bounds for iterated GNS-symmetric quantum channels")]
struct Cli {
    /// Seed for the randomized block decomposition.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Peripheral structure and entropic constants of a channel.
    Analyze(AnalyzeArgs),
    /// Passive vs active capacity bounds for an iterated Pauli channel.
    PauliCrossover(CrossoverArgs),
    /// Logical channel of the (concatenated) five-qubit code.
    CodeLogical(LogicalArgs),
    /// Iteration count beyond which zero-error capacities are stationary.
    ZeroError(ZeroErrorArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Channel JSON: {"dim": d, "kraus": [[[re, im], ...], ...]}.
    channel_file: PathBuf,
    /// Reference state JSON: {"matrix": [[[re, im], ...], ...]}; defaults to
    /// an invariant state of the channel.
    #[arg(long)]
    sigma: Option<PathBuf>,
    /// Tolerances JSON; missing fields keep their defaults.
    #[arg(long)]
    tolerances: Option<PathBuf>,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CrossoverArgs {
    /// Pauli probabilities p0,px,py,pz.
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 20_000)]
    t_max: u64,
    #[arg(long, default_value_t = 1)]
    stride: u64,
    /// Adds one-shot upper-bound columns with this error δ.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    levels: Vec<u32>,
    #[arg(long)]
    out: PathBuf,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct LogicalArgs {
    #[arg(long)]
    p: String,
    #[arg(long, default_value_t = 1)]
    level: u32,
    /// Print JSON instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ZeroErrorArgs {
    #[arg(long, conflicts_with = "channel", required_unless_present = "channel")]
    p: Option<String>,
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long, requires = "channel")]
    sigma: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    n_copies: u32,
}

/// Exit status 1: unreadable or malformed input. Exit status 2: input parsed
/// but failed a mathematical precondition.
enum Failure {
    Input(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::InvalidInput(_) => Failure::Input(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn num(x: f64) -> String {
    format_significant(x, 12)
}

/// JSON number, with non-finite values as the strings "inf" / "nan".
fn jnum(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(num(x))
    }
}

fn load_tolerances(path: Option<&Path>) -> Result<Tolerances, Failure> {
    let tol = match path {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?,
        None => Tolerances::default(),
    };
    tol.validate()?;
    Ok(tol)
}

fn load_channel(path: &Path, tol: &Tolerances) -> Result<ChannelDense, Failure> {
    Ok(ChannelFile::parse(&read(path)?)?.into_channel(tol)?)
}

fn load_sigma(path: Option<&Path>, channel: &ChannelDense, tol: &Tolerances) -> Result<DensityMatrix, Failure> {
    match path {
        Some(p) => Ok(MatrixFile::parse(&read(p)?)?.into_state(tol)?),
        None => Ok(channel.find_invariant_state(tol)?),
    }
}

fn run_analyze(args: &AnalyzeArgs, seed: u64) -> Outcome {
    let tol = load_tolerances(args.tolerances.as_deref())?;
    let channel = load_channel(&args.channel_file, &tol)?;
    let sigma = load_sigma(args.sigma.as_deref(), &channel, &tol)?;
    let gns = channel.check_gns_symmetric(&sigma, &tol)?;
    let verdict = if gns.symmetric { "yes" } else { "no" };
    println!("GNS-symmetric: {verdict} (max deviation {:.3e})", gns.deviation);
    let mut report = json!({
        "gns": { "symmetric": gns.symmetric, "deviation": gns.deviation },
    });
    if !gns.symmetric {
        println!("bounds: inapplicable");
        if let Some(path) = &args.json {
            report["bounds"] = json!("inapplicable");
            write(path, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
        }
        return Err(Failure::Domain(Error::NotGnsSymmetric { deviation: gns.deviation }.to_string()));
    }

    let projection = spectral::peripheral_projection(&channel, &sigma, &tol)?;
    let structure = spectral::extract_structure(&channel, &projection.superop, &sigma, &tol, seed)?;
    let lambda = bounds::lambda_gap(&channel, &projection, &sigma, &tol)?;
    let constants = EntropicConstants::new(lambda, sigma)?;
    let (chi, ic) = peripheral_capacities(&structure.dims());
    let threshold = bounds::zero_error_threshold(&constants, 1)?;

    println!("K = {}", structure.k());
    for (k, b) in structure.blocks.iter().enumerate() {
        println!("block {k}: d = {}, m = {}", b.d, b.m);
    }
    println!("h0_dim = {}", structure.h0_dim);
    println!("chi(P) = {} bits", num(chi));
    println!("I_c(P) = {} bits", num(ic));
    println!("lambda = {}", num(constants.lambda_gap));
    println!("Lambda = {}", num(constants.lambda_pp));
    println!("Lambda_c_ub = {}", num(constants.lambda_c_ub));
    println!("alpha_c_lb = {}", num(constants.alpha_c_lb));
    println!("zero-error threshold (n = 1) = {}", num(threshold));

    if let Some(path) = &args.json {
        report["structure"] = serde_json::to_value(structure.report()).expect("structure serializes");
        report["chi"] = jnum(chi);
        report["ic"] = jnum(ic);
        report["lambda"] = jnum(constants.lambda_gap);
        report["Lambda"] = jnum(constants.lambda_pp);
        report["Lambda_c_ub"] = jnum(constants.lambda_c_ub);
        report["alpha_c_lb"] = jnum(constants.alpha_c_lb);
        report["zero_error_threshold"] = jnum(threshold);
        write(path, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
    }
    Ok(())
}

fn run_crossover(args: &CrossoverArgs) -> Outcome {
    let mut cfg = ScenarioConfig::new(PauliChannel::parse(&args.p)?, args.t_max);
    cfg.t_stride = args.stride;
    cfg.delta = args.delta;
    cfg.levels = args.levels.clone();
    let curve = scenario::full_curve(&cfg, Execution::default())?;
    scenario::emit_csv(&curve, &args.out)?;
    println!("wrote {} ({} rows)", args.out.display(), curve.grid.len());
    if args.gnuplot {
        let script_path = args.out.with_extension("gp");
        let csv_name = args.out.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        write(&script_path, &scenario::gnuplot_script(&curve, &csv_name))?;
        println!("wrote {}", script_path.display());
    }
    for &level in &cfg.levels {
        let name = scenario::active_series_name(level);
        match scenario::find_crossover(&curve, &name, scenario::PASSIVE_Q_UB)? {
            Some(t) => println!("level {level}: crossover at t = {t}"),
            None => println!("level {level}: none within grid"),
        }
    }
    Ok(())
}

fn run_logical(args: &LogicalArgs) -> Outcome {
    let p = PauliChannel::parse(&args.p)?;
    let q = five_qubit_code().concatenated_logical_channel(&p, args.level)?.q.probabilities();
    if args.json {
        let out = json!({ "level": args.level, "p": p.probabilities(), "q": q });
        println!("{}", serde_json::to_string_pretty(&out).expect("result serializes"));
    } else {
        for (label, v) in ["I", "X", "Y", "Z"].iter().zip(q) {
            println!("q_{label} = {}", num(v));
        }
    }
    Ok(())
}

fn run_zero_error(args: &ZeroErrorArgs, seed: u64) -> Outcome {
    let constants = match (&args.p, &args.channel) {
        (Some(text), _) => {
            let p = PauliChannel::parse(text)?;
            EntropicConstants::new(p.lambda_gap(), DensityMatrix::maximally_mixed(2))?
        }
        (None, Some(path)) => {
            let tol = Tolerances::default();
            let channel = load_channel(path, &tol)?;
            let sigma = load_sigma(args.sigma.as_deref(), &channel, &tol)?;
            let projection = spectral::peripheral_projection(&channel, &sigma, &tol)?;
            // The block structure is not needed here, but extraction validates
            // the projection.
            spectral::extract_structure(&channel, &projection.superop, &sigma, &tol, seed)?;
            let lambda = bounds::lambda_gap(&channel, &projection, &sigma, &tol)?;
            EntropicConstants::new(lambda, sigma)?
        }
        (None, None) => return Err(Failure::Input("either --p or --channel is required".into())),
    };
    let threshold = bounds::zero_error_threshold(&constants, args.n_copies)?;
    println!("threshold(n = {}) = {}", args.n_copies, num(threshold));
    println!(
        "formula: (n ln Lambda_c + ln 10) / lambda with ln Lambda_c = {}, lambda = {}",
        num(constants.lambda_c_ub.ln()),
        num(constants.lambda_gap)
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Analyze(a) => run_analyze(a, cli.seed),
        Command::PauliCrossover(a) => run_crossover(a),
        Command::CodeLogical(a) => run_logical(a),
        Command::ZeroError(a) => run_zero_error(a, cli.seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
