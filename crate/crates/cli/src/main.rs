use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use msqi::{Mode, Params, SchemeChoice, TestFunction};
use msqi_cli::config::{ConfigOverrides, Experiment, ExperimentConfig};
use msqi_cli::fit::{fit_and_eval, EvalTarget, FitRequest};
use msqi_cli::{experiments, CliError};

#[derive(Parser)]
#[command(name = "msqi", version, about = "Shepard quasi-interpolation of data with jump discontinuities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximum error on nested evaluation grids (f1-f4).
    Exp1(ExpArgs),
    /// L1 error against the number of nodes (f1-f4).
    Exp2(ExpArgs),
    /// Least-squares reconstruction of noisy f1 samples.
    Exp3(ExpArgs),
    /// Maximum error for the smooth functions f5, f6.
    Exp4(ExpArgs),
    /// Fit x,y samples from a CSV file and evaluate the interpolant.
    Fit(FitArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Auto,
    General,
    Equispaced,
}

impl From<SchemeArg> for SchemeChoice {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Auto => SchemeChoice::Auto,
            SchemeArg::General => SchemeChoice::General,
            SchemeArg::Equispaced => SchemeChoice::Equispaced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Interpolating,
    LeastSquares,
}

fn mode_of(mode: Option<ModeArg>, degree: Option<usize>) -> Result<Option<Mode>, CliError> {
    match (mode, degree) {
        (None, None) => Ok(None),
        (Some(ModeArg::Interpolating), None) => Ok(Some(Mode::Interpolating)),
        (Some(ModeArg::Interpolating), Some(_)) => Err(CliError::Config(
            "--degree applies to --mode least-squares only".into(),
        )),
        (Some(ModeArg::LeastSquares) | None, Some(degree)) => Ok(Some(Mode::LeastSquares { degree })),
        (Some(ModeArg::LeastSquares), None) => Err(CliError::Config(
            "--mode least-squares needs --degree".into(),
        )),
    }
}

#[derive(Args)]
struct ExpArgs {
    /// JSON file with experiment parameters; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Test functions, e.g. f1,f3.
    #[arg(long, value_delimiter = ',')]
    functions: Option<Vec<TestFunction>>,
    /// Grid sizes (n + 1 nodes each).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,
    #[arg(long)]
    mu: Option<u32>,
    /// Blend points per cover interval.
    #[arg(long = "K", value_delimiter = ',')]
    k: Option<Vec<usize>>,
    /// Evaluation grid sizes.
    #[arg(long, value_delimiter = ',')]
    ne: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    seed: Option<Vec<u64>>,
    /// Standard deviation of the Gaussian noise.
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Least-squares degree.
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Input CSV with x,y columns; `-` reads stdin.
    #[arg(long)]
    input: PathBuf,
    /// Gap indices: a jump lies in (x_i, x_{i+1}).
    #[arg(long, value_delimiter = ',', default_value = "")]
    gaps: Vec<String>,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 4)]
    mu: u32,
    #[arg(long = "K", default_value_t = 10)]
    k: usize,
    #[arg(long, value_enum, default_value = "auto")]
    scheme: SchemeArg,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    degree: Option<usize>,
    /// Share blend points on overlapping cover intervals (default: general scheme only).
    #[arg(long)]
    share_overlaps: Option<bool>,
    /// Evaluate on a uniform grid with this many steps.
    #[arg(long, conflicts_with_all = ["points", "at_nodes"])]
    ne: Option<usize>,
    /// File of evaluation abscissas.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Evaluate at the sample abscissas.
    #[arg(long)]
    at_nodes: bool,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the covering as JSON.
    #[arg(long)]
    dump_covering: Option<PathBuf>,
    /// Write the whole interpolant as JSON.
    #[arg(long)]
    dump_interpolant: Option<PathBuf>,
}

fn run_experiment(experiment: Experiment, args: ExpArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => ConfigOverrides::from_json(&std::fs::read_to_string(path)?)?,
        None => ConfigOverrides::default(),
    };
    if file.experiment.is_some_and(|e| e != experiment) {
        return Err(CliError::Config(format!(
            "config file is for a different experiment than '{}'",
            experiment.name()
        )));
    }
    let flags = ConfigOverrides {
        experiment: Some(experiment),
        functions: args.functions,
        n: args.n,
        d: args.d,
        mu: args.mu,
        k: args.k,
        n_e: args.ne,
        amplitude: args.amplitude,
        seeds: args.seed,
        scheme: args.scheme.map(Into::into),
        mode: mode_of(args.mode, args.degree)?,
        out_dir: args.out_dir,
    };
    let cfg = ExperimentConfig::resolve(file.merge(flags))?;
    let written = experiments::run(&cfg)?;
    let mut out = io::stdout().lock();
    for f in written.files {
        // a closed pipe is not worth failing a finished run over
        if writeln!(out, "{}", f.display()).is_err() {
            break;
        }
    }
    Ok(())
}

fn run_fit(args: FitArgs) -> Result<(), CliError> {
    let gaps = args
        .gaps
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("invalid gap index '{s}'")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let target = match (args.ne, args.points, args.at_nodes) {
        (_, Some(p), _) => EvalTarget::File(p),
        (_, None, true) => EvalTarget::Nodes,
        (Some(n_e), None, false) => EvalTarget::Uniform(n_e),
        (None, None, false) => EvalTarget::Uniform(1000),
    };
    let request = FitRequest {
        gaps,
        params: Params {
            d: args.d,
            mu: args.mu,
            k: args.k,
            scheme: args.scheme.into(),
            mode: mode_of(args.mode, args.degree)?.unwrap_or_default(),
            share_overlaps: args.share_overlaps,
        },
        target,
        dump_covering: args.dump_covering,
        dump_interpolant: args.dump_interpolant,
    };
    let input: Box<dyn io::Read> = if args.input.as_os_str() == "-" {
        Box::new(io::stdin().lock())
    } else {
        Box::new(BufReader::new(File::open(&args.input)?))
    };
    match args.out {
        Some(path) => fit_and_eval(input, &request, File::create(path)?)?,
        None => fit_and_eval(input, &request, io::stdout().lock())?,
    };
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exp1(a) => run_experiment(Experiment::Exp1, a),
        Command::Exp2(a) => run_experiment(Experiment::Exp2, a),
        Command::Exp3(a) => run_experiment(Experiment::Exp3, a),
        Command::Exp4(a) => run_experiment(Experiment::Exp4, a),
        Command::Fit(a) => run_fit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("msqi: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
