use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use stabforge::runner::{
    read_json, run_experiment, CodeSpec, Experiment, ExperimentConfig, GameSpec, ModeSpec, OutputFormat, PresSpec, RunError,
    SuiteName,
};

#[derive(Parser)]
#[command(name = "stabforge", version, about = "Codes, presentations and nonlocal games with numerical checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON); replaces the command's flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by --config.
    Run,
    /// Run a module's invariant battery.
    Verify { suite: String },
    #[command(subcommand)]
    Code(CodeCmd),
    #[command(subcommand)]
    Pres(PresCmd),
    #[command(subcommand)]
    Stab(StabCmd),
    #[command(subcommand)]
    Game(GameCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hadamard,
    Rm,
    Brm,
}

#[derive(Args, Clone)]
struct CodeArgs {
    #[arg(long, value_enum, default_value = "hadamard")]
    family: Family,
    #[arg(long, default_value_t = 2)]
    t: u32,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
}

impl CodeArgs {
    fn spec(&self) -> CodeSpec {
        let (t, m, d) = (self.t, self.m, self.d);
        match self.family {
            Family::Hadamard => CodeSpec::Hadamard { t },
            Family::Rm => CodeSpec::Rm { t, m, d },
            Family::Brm => CodeSpec::Brm { t, m, d },
        }
    }
}

#[derive(Subcommand)]
enum CodeCmd {
    Build(CodeArgs),
    Soundness {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        budget: Option<u64>,
        /// Sample instead of enumerating; needs --seed.
        #[arg(long)]
        samples: Option<usize>,
    },
    Distance {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresFamily {
    Std,
    PauliSmall,
    PauliMultLike,
    Z2kEff,
    ParityCheck,
}

#[derive(Args, Clone)]
struct PresArgs {
    #[arg(long = "pres", value_enum, default_value = "std")]
    family: PresFamily,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[command(flatten)]
    code: CodeArgs,
}

impl PresArgs {
    fn spec(&self) -> PresSpec {
        let (k, c) = (self.k, &self.code);
        match self.family {
            PresFamily::Std => PresSpec::StdZ2k { k },
            PresFamily::PauliSmall => PresSpec::PauliSmall { k },
            PresFamily::PauliMultLike => PresSpec::PauliMultLike { k },
            PresFamily::Z2kEff => PresSpec::Z2kEff { t: c.t, m: c.m, d: c.d },
            PresFamily::ParityCheck => PresSpec::ParityCheck { code: c.spec() },
        }
    }
}

#[derive(Subcommand)]
enum PresCmd {
    Build(PresArgs),
    Length(PresArgs),
    Sample {
        #[command(flatten)]
        pres: PresArgs,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Sampled,
}

fn parse_edges(s: &str) -> Result<Vec<(usize, usize)>, RunError> {
    s.split(',')
        .filter(|e| !e.is_empty())
        .map(|e| {
            let bad = || RunError::Invalid(format!("edge {e:?} is not of the form i-j"));
            let (a, b) = e.split_once('-').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>, RunError> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| RunError::Invalid(format!("bad number {x:?}")))).collect()
}

fn thetas_or_default(s: Option<String>) -> Result<Vec<f64>, RunError> {
    match s {
        Some(s) => parse_floats(&s),
        None => Ok((1..=10).map(|i| 0.005 * i as f64).collect()),
    }
}

#[derive(Subcommand)]
enum StabCmd {
    Defect {
        #[arg(long)]
        pres: PathBuf,
        #[arg(long)]
        assign: PathBuf,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// The permutation construction for a graph, e.g. --edges 0-1,2-3.
    GraphRep {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "")]
        edges: String,
    },
    /// Orbit amplification under Sym(k).
    Amplify {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "")]
        edges: String,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Inverse spectral gap of a distribution on F_2^k, listed in index order.
    Kappa {
        #[arg(long)]
        mu: String,
    },
    /// Randomized inequality trials.
    Battery {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GameKind {
    Code,
    Braiding,
    Qld,
    Dls,
    Commutation,
    Anticommutation,
}

#[derive(Args, Clone)]
struct GameArgs {
    #[arg(long, value_enum)]
    kind: GameKind,
    #[command(flatten)]
    code: CodeArgs,
    /// Rows of E for the dls game, e.g. --e 101,011.
    #[arg(long, value_delimiter = ',')]
    e: Vec<String>,
}

impl GameArgs {
    fn spec(&self) -> GameSpec {
        let c = &self.code;
        match self.kind {
            GameKind::Code => GameSpec::Code { code: c.spec() },
            GameKind::Braiding => GameSpec::Braiding { code: c.spec() },
            GameKind::Qld => GameSpec::Qld { t: c.t, m: c.m, d: c.d },
            GameKind::Dls => GameSpec::Dls { e: self.e.clone() },
            GameKind::Commutation => GameSpec::Commutation,
            GameKind::Anticommutation => GameSpec::Anticommutation,
        }
    }
}

#[derive(Subcommand)]
enum GameCmd {
    Build(GameArgs),
    Value {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
    },
    /// Value of the reference perfect strategy.
    Perfect(GameArgs),
    Dimbound {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Value gap of the perfect strategy under perturbations, one row per theta.
    Sweep {
        #[command(flatten)]
        game: GameArgs,
        #[arg(long)]
        thetas: Option<String>,
    },
    /// Extracted-observable defect against the code-game deficit along a perturbation path.
    Extract {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        thetas: Option<String>,
    },
}

fn experiment(cmd: Command) -> Result<Experiment, RunError> {
    Ok(match cmd {
        Command::Run => return Err(RunError::Invalid("run needs --config".into())),
        Command::Verify { suite } => Experiment::Verify { suite: suite.parse::<SuiteName>()? },
        Command::Code(c) => match c {
            CodeCmd::Build(a) => Experiment::CodeBuild { code: a.spec() },
            CodeCmd::Soundness { code, budget, samples } => Experiment::CodeSoundness { code: code.spec(), budget, samples },
            CodeCmd::Distance { code, budget } => Experiment::CodeDistance { code: code.spec(), budget },
        },
        Command::Pres(p) => match p {
            PresCmd::Build(a) => Experiment::PresBuild { pres: a.spec() },
            PresCmd::Length(a) => Experiment::PresLength { pres: a.spec() },
            PresCmd::Sample { pres, count } => Experiment::PresSample { pres: pres.spec(), count },
        },
        Command::Stab(s) => match s {
            StabCmd::Defect { pres, assign, mode, samples } => Experiment::StabDefect {
                presentation: pres,
                assignment: assign,
                mode: match mode {
                    Mode::Exhaustive => ModeSpec::Exhaustive,
                    Mode::Sampled => ModeSpec::Sampled { samples },
                },
            },
            StabCmd::GraphRep { k, edges } => Experiment::GraphDefect { k, edges: parse_edges(&edges)? },
            StabCmd::Amplify { k, edges, budget } => {
                Experiment::Amplify { k, edges: parse_edges(&edges)?, generators: None, budget }
            }
            StabCmd::Kappa { mu } => Experiment::Kappa { mu: parse_floats(&mu)? },
            StabCmd::Battery { trials, max_dim } => Experiment::InequalityBattery { trials, max_dim },
        },
        Command::Game(g) => match g {
            GameCmd::Build(a) => Experiment::GameBuild { game: a.spec() },
            GameCmd::Value { game, strategy } => Experiment::GameValue { game, strategy },
            GameCmd::Perfect(a) => Experiment::GamePerfect { game: a.spec() },
            GameCmd::Dimbound { k, delta, c } => Experiment::DimBound { k, delta, c },
            GameCmd::Sweep { game, thetas } => {
                Experiment::PerturbationSweep { game: game.spec(), thetas: thetas_or_default(thetas)? }
            }
            GameCmd::Extract { code, thetas } => {
                Experiment::ExtractionSweep { code: code.spec(), thetas: thetas_or_default(thetas)? }
            }
        },
    })
}

fn run(cli: Cli) -> Result<bool, RunError> {
    let mut cfg = match &cli.config {
        Some(path) => read_json::<ExperimentConfig>(path)?,
        None => ExperimentConfig::new(experiment(cli.command)?, None),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if let Some(f) = cli.format {
        cfg.format = match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        };
    }
    let report = run_experiment(&cfg)?;
    report.write(cli.out.as_deref())?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!("{}", c.line());
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
