use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use propeff::corpus::{Distribution, InstanceSpec};
use propeff::io::{self, Format};
use propeff::report::{analyze, plot_data, AnalysisMode, AnalyzeOptions};
use propeff::{Error, Tolerance};

#[derive(Parser)]
#[command(name = "propeff", version, about = "Efficient and properly efficient points of finite point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a point cloud and print (or write) a JSON report.
    Analyze(AnalyzeArgs),
    /// Write a plot table (planar clouds only).
    PlotData(PlotArgs),
    /// Corpus instances.
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
}

#[derive(Args)]
struct Common {
    /// Coordinate tolerance.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Input format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Gmin)]
    mode: ModeArg,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Direction of certificate functionals, comma separated; all ones by default.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Option<Vec<f64>>,
    /// Cone parameter p of C^p.
    #[arg(long)]
    p: Option<f64>,
    /// Reference point for `--mode existence`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    u: Option<Vec<f64>>,
}

#[derive(Args)]
struct PlotArgs {
    input: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Generate an instance and write it as a point cloud.
    Gen(GenArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(value_enum)]
    kind: KindArg,
    /// Range bound T (hyperbola).
    #[arg(long = "T", default_value_t = 10.0)]
    t_range: f64,
    /// Grid step (boxes, staircase, sqrt-boxes).
    #[arg(long, default_value_t = 0.05)]
    h: f64,
    /// Depth of the sampled ray (staircase).
    #[arg(long, default_value_t = 5.0)]
    tail: f64,
    /// Number of points (hyperbola, random).
    #[arg(long, default_value_t = 21)]
    n: usize,
    /// Dimension (random).
    #[arg(long, default_value_t = 2)]
    ell: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = DistArg::Gaussian)]
    distribution: DistArg,
    /// Output format; guessed from `--out` when omitted, CSV on stdout.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Min,
    Wmin,
    Gmin,
    Certify,
    Benson,
    Existence,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Hyperbola,
    BoxesE521,
    StaircaseE522,
    SqrtBoxesE523,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    SphereShell,
    Gaussian,
    ConvexFrontier,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

impl From<ModeArg> for AnalysisMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Min => AnalysisMode::Min,
            ModeArg::Wmin => AnalysisMode::Wmin,
            ModeArg::Gmin => AnalysisMode::Gmin,
            ModeArg::Certify => AnalysisMode::Certify,
            ModeArg::Benson => AnalysisMode::Benson,
            ModeArg::Existence => AnalysisMode::Existence,
        }
    }
}

impl From<DistArg> for Distribution {
    fn from(d: DistArg) -> Self {
        match d {
            DistArg::SphereShell => Distribution::SphereShell,
            DistArg::Gaussian => Distribution::Gaussian,
            DistArg::ConvexFrontier => Distribution::ConvexFrontier,
        }
    }
}

enum Failure {
    Input(Error),
    Tripwire(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_tripwire() {
            Failure::Tripwire(e.to_string())
        } else {
            Failure::Input(e)
        }
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(input: &Path, common: &Common, tol: Tolerance) -> Result<propeff::efficiency::PointCloud, Failure> {
    let format = common.format.map_or_else(|| Format::from_path(input), Format::from);
    Ok(io::ingest(input, format, tol)?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze(a) => {
            let tol = Tolerance::new(a.common.tol)?;
            let cloud = load(&a.input, &a.common, tol)?;
            let options = AnalyzeOptions {
                mode: a.mode.into(),
                tol,
                seed: a.seed,
                k: a.k,
                p: a.p,
                u: a.u,
            };
            let report = analyze(&cloud, &options)?;
            write_out(a.common.out.as_deref(), &report.to_json()?)?;
            if !report.all_passed() {
                let failed: Vec<&String> = report
                    .cross_checks
                    .iter()
                    .filter(|(_, c)| c.status != propeff::report::CheckStatus::Pass)
                    .map(|(n, _)| n)
                    .collect();
                return Err(Failure::Tripwire(format!("cross-checks failed: {failed:?}")));
            }
        }
        Command::PlotData(a) => {
            let tol = Tolerance::new(a.common.tol)?;
            let cloud = load(&a.input, &a.common, tol)?;
            write_out(a.common.out.as_deref(), &plot_data(&cloud, tol)?)?;
        }
        Command::Corpus {
            command: CorpusCommand::Gen(g),
        } => {
            let spec = match g.kind {
                KindArg::Hyperbola => InstanceSpec::Hyperbola {
                    t_range: g.t_range,
                    n: g.n,
                },
                KindArg::BoxesE521 => InstanceSpec::BoxesE521 { h: g.h },
                KindArg::StaircaseE522 => InstanceSpec::StaircaseE522 { h: g.h, tail: g.tail },
                KindArg::SqrtBoxesE523 => InstanceSpec::SqrtBoxesE523 { h: g.h },
                KindArg::Random => InstanceSpec::Random {
                    n: g.n,
                    ell: g.ell,
                    seed: g.seed,
                    distribution: g.distribution.into(),
                },
            };
            let cloud = spec.generate()?;
            let format = match (g.format, &g.out) {
                (Some(f), _) => f.into(),
                (None, Some(p)) => Format::from_path(p),
                (None, None) => Format::Csv,
            };
            let mut buf = Vec::new();
            io::emit_writer(&cloud, &mut buf, format)?;
            let text = String::from_utf8(buf).expect("emitted text is UTF-8");
            write_out(g.out.as_deref(), &text)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Tripwire(msg)) => {
            eprintln!("internal verification failed: {msg}");
            ExitCode::from(3)
        }
    }
}
