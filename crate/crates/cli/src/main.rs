//! snaplab: simulate computations over memory regions, acquire snapshots of
//! them under different strategies, and judge the snapshots against the
//! consistency and integrity criteria.

mod manifest;
mod render;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use manifest::RunManifest;
use snaplab_core::acquisition::{acquire, AcquisitionPlan};
use snaplab_core::causality::{build_causal_order, CausalityError};
use snaplab_core::evaluator::campaign::{
    verify_implications, CampaignConfig, CampaignError, CaseShape, StrategyKind,
};
use snaplab_core::evaluator::{evaluate_snapshot, EvaluatorError, WitnessWindow};
use snaplab_core::model::{replay, Computation, Cut, EventId, RegionId, Snapshot, Time};
use snaplab_core::trace::{self, TraceError};
use snaplab_core::workload::{generate, KindRegime, WorkloadConfig, WorkloadShape};

const SEED_ENV: &str = "SNAPLAB_SEED";

#[derive(Parser)]
#[command(
    name = "snaplab",
    version,
    about = "Snapshot consistency lab: simulate, acquire, classify, verify"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a computation and write it as a trace file.
    Simulate(SimulateArgs),
    /// Take a snapshot of a trace under an acquisition strategy.
    Acquire(AcquireArgs),
    /// Classify a snapshot against all quality criteria.
    Evaluate(EvaluateArgs),
    /// Emit the lattice of consistent cuts as a DOT graph.
    Lattice(LatticeArgs),
    /// Emit a space/time diagram of a trace as a DOT graph.
    Diagram(DiagramArgs),
    /// Run a randomized campaign verifying the criteria implication graph.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    AllUniquelyModifying,
    AllModifying,
    MixedWithReads,
}

#[derive(Clone, Copy, ValueEnum)]
enum WorkloadArg {
    Random,
    LinkedList,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Frozen,
    Sequential,
    Cow,
    Priority,
}

#[derive(Args)]
struct SimulateArgs {
    /// Number of memory regions.
    #[arg(long)]
    regions: usize,
    /// Number of processes.
    #[arg(long)]
    processes: usize,
    /// Number of events to generate.
    #[arg(long)]
    events: usize,
    /// Event-kind regime.
    #[arg(long, value_enum, default_value = "all-uniquely-modifying")]
    regime: RegimeArg,
    /// Fraction of reads under the mixed-with-reads regime.
    #[arg(long, default_value_t = 0.2)]
    read_fraction: f64,
    /// Generator seed; defaults to $SNAPLAB_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Access pattern.
    #[arg(long, value_enum, default_value = "random")]
    workload: WorkloadArg,
    /// Trace file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AcquireArgs {
    /// Trace file to snapshot.
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    /// Copy instant for the frozen strategy.
    #[arg(long)]
    at: Option<u64>,
    /// Acquisition start for the scanning strategies.
    #[arg(long)]
    start: Option<u64>,
    /// Ticks between consecutive region copies.
    #[arg(long, default_value_t = 1)]
    delay: u64,
    /// Scan order as comma-separated region indices (default: index order).
    #[arg(long)]
    order: Option<String>,
    /// Regions to copy first under the priority strategy.
    #[arg(long)]
    priority: Option<String>,
    /// Snapshot file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    snapshot: PathBuf,
    /// Reference time for the integrity checks.
    #[arg(long)]
    tau: u64,
    /// Only search the acquisition window for a witness time.
    #[arg(long)]
    window: bool,
}

#[derive(Args)]
struct LatticeArgs {
    #[arg(long)]
    trace: PathBuf,
    /// DOT file to write (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagramArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Snapshot whose cut line to draw.
    #[arg(long)]
    snapshot: Option<PathBuf>,
    /// Cut to draw, as comma-separated event ids (ignored with --snapshot).
    #[arg(long)]
    cut: Option<String>,
    /// DOT file to write (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Number of randomized cases.
    #[arg(long, default_value_t = 10_000)]
    cases: u64,
    /// Campaign seed; defaults to $SNAPLAB_SEED, then 7.
    #[arg(long)]
    seed: Option<u64>,
    /// Restrict the campaign to one event-kind regime.
    #[arg(long, value_enum)]
    regime: Option<RegimeArg>,
    /// Restrict the campaign to one acquisition strategy.
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Fraction of reads when the mixed-with-reads regime is in play.
    #[arg(long, default_value_t = 0.3)]
    read_fraction: f64,
    /// Report file to write.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Io(std::io::Error),
    Counterexample(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Data(_) => 65,
            CliError::Io(_) => 74,
            CliError::Counterexample(_) => 2,
            CliError::Internal(_) => 70,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg)
            | CliError::Data(msg)
            | CliError::Counterexample(msg)
            | CliError::Internal(msg) => write!(f, "{msg}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Io(e)
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> CliError {
        match e {
            TraceError::Io(io) => CliError::Io(io),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<CausalityError> for CliError {
    fn from(e: CausalityError) -> CliError {
        CliError::Data(e.to_string())
    }
}

impl From<EvaluatorError> for CliError {
    fn from(e: EvaluatorError) -> CliError {
        CliError::Internal(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("snaplab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Acquire(args) => acquire_cmd(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Lattice(args) => lattice(args),
        Command::Diagram(args) => diagram(args),
        Command::Verify(args) => verify(args),
    }
}

fn resolve_seed(flag: Option<u64>, default: u64) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}={text} is not a valid seed"))),
        Err(_) => Ok(default),
    }
}

fn read_trace(path: &Path) -> Result<Computation, CliError> {
    Ok(trace::read_computation(BufReader::new(File::open(path)?))?)
}

fn read_snap(path: &Path) -> Result<Snapshot, CliError> {
    Ok(trace::read_snapshot(BufReader::new(File::open(path)?))?)
}

fn parse_regions(text: &str, comp: &Computation) -> Result<Vec<RegionId>, CliError> {
    text.split(',')
        .map(|part| {
            let idx: u32 = part
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("'{part}' is not a region index")))?;
            if (idx as usize) < comp.region_count() {
                Ok(RegionId(idx))
            } else {
                Err(CliError::Usage(format!(
                    "region {idx} out of range (trace has {} regions)",
                    comp.region_count()
                )))
            }
        })
        .collect()
}

fn simulate(args: SimulateArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, 0)?;
    let kind_regime = match args.regime {
        RegimeArg::AllUniquelyModifying => KindRegime::AllUniquelyModifying,
        RegimeArg::AllModifying => KindRegime::AllModifying,
        RegimeArg::MixedWithReads => KindRegime::MixedWithReads {
            read_fraction: args.read_fraction,
        },
    };
    let config = WorkloadConfig {
        region_count: args.regions,
        process_count: args.processes,
        event_count: args.events,
        kind_regime,
        seed,
        workload: match args.workload {
            WorkloadArg::Random => WorkloadShape::Random,
            WorkloadArg::LinkedList => WorkloadShape::LinkedList {
                node_count: args.regions,
            },
        },
    };
    let comp = generate(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut w = BufWriter::new(File::create(&args.out)?);
    trace::write_computation(&mut w, &comp)?;
    drop(w);
    RunManifest::new("simulate")
        .arg("regions", args.regions)
        .arg("processes", args.processes)
        .arg("events", args.events)
        .arg("regime", regime_name(args.regime))
        .arg("read_fraction", args.read_fraction)
        .arg("workload", workload_name(args.workload))
        .seed(seed)
        .output(&args.out)
        .write_alongside(&args.out)?;
    Ok(())
}

fn regime_name(r: RegimeArg) -> &'static str {
    match r {
        RegimeArg::AllUniquelyModifying => "all-uniquely-modifying",
        RegimeArg::AllModifying => "all-modifying",
        RegimeArg::MixedWithReads => "mixed-with-reads",
    }
}

fn workload_name(w: WorkloadArg) -> &'static str {
    match w {
        WorkloadArg::Random => "random",
        WorkloadArg::LinkedList => "linked-list",
    }
}

fn strategy_name(s: StrategyArg) -> &'static str {
    match s {
        StrategyArg::Frozen => "frozen",
        StrategyArg::Sequential => "sequential",
        StrategyArg::Cow => "cow",
        StrategyArg::Priority => "priority",
    }
}

fn acquire_cmd(args: AcquireArgs) -> Result<(), CliError> {
    let comp = read_trace(&args.trace)?;
    let gt = replay(&comp).map_err(|e| CliError::Data(e.to_string()))?;
    let index_order: Vec<RegionId> = comp.regions().collect();
    let plan = match args.strategy {
        StrategyArg::Frozen => {
            let at = args.at.ok_or_else(|| {
                CliError::Usage("--at is required for the frozen strategy".into())
            })?;
            AcquisitionPlan::Frozen { at: Time(at) }
        }
        StrategyArg::Sequential => AcquisitionPlan::Sequential {
            start: Time(args.start.unwrap_or(0)),
            order: match &args.order {
                Some(text) => parse_regions(text, &comp)?,
                None => index_order,
            },
            delay: args.delay,
        },
        StrategyArg::Cow => AcquisitionPlan::CopyOnWrite {
            start: Time(args.start.unwrap_or(0)),
            background_order: match &args.order {
                Some(text) => parse_regions(text, &comp)?,
                None => index_order,
            },
            delay: args.delay,
        },
        StrategyArg::Priority => AcquisitionPlan::PriorityScan {
            start: Time(args.start.unwrap_or(0)),
            priority_regions: match &args.priority {
                Some(text) => parse_regions(text, &comp)?,
                None => Vec::new(),
            },
            delay: args.delay,
        },
    };
    let snapshot = acquire(&comp, &gt, &plan).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut w = BufWriter::new(File::create(&args.out)?);
    trace::write_snapshot(&mut w, &snapshot)?;
    drop(w);
    RunManifest::new("acquire")
        .arg("strategy", strategy_name(args.strategy))
        .arg_opt("at", args.at)
        .arg_opt("start", args.start)
        .arg("delay", args.delay)
        .arg_opt("order", args.order.as_deref())
        .arg_opt("priority", args.priority.as_deref())
        .input(&args.trace)
        .output(&args.out)
        .write_alongside(&args.out)?;
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let comp = read_trace(&args.trace)?;
    let snapshot = read_snap(&args.snapshot)?;
    if snapshot.region_count() != comp.region_count() {
        return Err(CliError::Data(format!(
            "snapshot covers {} regions, trace has {}",
            snapshot.region_count(),
            comp.region_count()
        )));
    }
    let gt = replay(&comp).map_err(|e| CliError::Data(e.to_string()))?;
    let order = build_causal_order(&comp);
    let window = if args.window {
        WitnessWindow::Acquisition
    } else {
        WitnessWindow::FullTimeline
    };
    let report = evaluate_snapshot(&comp, &gt, &order, &snapshot, Time(args.tau), window)?;
    #[derive(serde::Serialize)]
    struct VersionedReport {
        format_version: u32,
        #[serde(flatten)]
        report: snaplab_core::evaluator::EvaluationReport,
    }
    let record = VersionedReport {
        format_version: trace::FORMAT_VERSION,
        report,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&record).expect("report serializes")
    );
    Ok(())
}

fn write_text_output(
    text: &str,
    out: Option<&Path>,
    manifest: RunManifest,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            manifest.output(path).write_alongside(path)?;
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn lattice(args: LatticeArgs) -> Result<(), CliError> {
    let comp = read_trace(&args.trace)?;
    let dot = render::lattice_dot(&comp)?;
    let manifest = RunManifest::new("lattice").input(&args.trace);
    write_text_output(&dot, args.out.as_deref(), manifest)
}

fn diagram(args: DiagramArgs) -> Result<(), CliError> {
    let comp = read_trace(&args.trace)?;
    let snapshot = match &args.snapshot {
        Some(path) => {
            let s = read_snap(path)?;
            if s.region_count() != comp.region_count() {
                return Err(CliError::Data(format!(
                    "snapshot covers {} regions, trace has {}",
                    s.region_count(),
                    comp.region_count()
                )));
            }
            Some(s)
        }
        None => None,
    };
    let cut = match &args.cut {
        Some(text) => {
            let ids: Result<Cut, CliError> =
                text.split(',')
                    .map(|part| {
                        let id =
                            part.trim().parse::<u32>().map(EventId).map_err(|_| {
                                CliError::Usage(format!("'{part}' is not an event id"))
                            })?;
                        if comp.event(id).is_none() {
                            return Err(CliError::Usage(format!("{id} is not in the trace")));
                        }
                        Ok(id)
                    })
                    .collect();
            Some(ids?)
        }
        None => None,
    };
    let dot = render::spacetime_dot(&comp, snapshot.as_ref(), cut.as_ref());
    let manifest = RunManifest::new("diagram")
        .input(&args.trace)
        .arg_opt("cut", args.cut.as_deref());
    write_text_output(&dot, args.out.as_deref(), manifest)
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let seed = resolve_seed(args.seed, 7)?;
    let mut config = CampaignConfig {
        cases: args.cases,
        seed,
        ..CampaignConfig::default()
    };
    if let Some(regime) = args.regime {
        config.regimes = vec![match regime {
            RegimeArg::AllUniquelyModifying => KindRegime::AllUniquelyModifying,
            RegimeArg::AllModifying => KindRegime::AllModifying,
            RegimeArg::MixedWithReads => KindRegime::MixedWithReads {
                read_fraction: args.read_fraction,
            },
        }];
    }
    if let Some(strategy) = args.strategy {
        config.strategies = vec![match strategy {
            StrategyArg::Frozen => StrategyKind::Frozen,
            StrategyArg::Sequential => StrategyKind::Sequential,
            StrategyArg::Cow => StrategyKind::CopyOnWrite,
            StrategyArg::Priority => StrategyKind::PriorityScan,
        }];
        // A pure linked-list campaign would never cover single-region cases;
        // keep both shapes in play regardless of restrictions.
        config.shapes = vec![CaseShape::Random, CaseShape::LinkedList];
    }
    let manifest = RunManifest::new("verify")
        .arg("cases", args.cases)
        .arg_opt("regime", args.regime.map(regime_name))
        .arg_opt("strategy", args.strategy.map(strategy_name))
        .arg("read_fraction", args.read_fraction)
        .seed(seed)
        .output(&args.out);
    match verify_implications(&config) {
        Ok(report) => {
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            std::fs::write(&args.out, text + "\n")?;
            manifest.write_alongside(&args.out)?;
            let violations: u64 = report.implications.iter().map(|i| i.violations).sum();
            eprintln!(
                "verified {} implications over {} cases, {} violations",
                report.implications.len(),
                report.cases,
                violations
            );
            Ok(())
        }
        Err(CampaignError::CounterexampleFound(counterexample)) => {
            let text = serde_json::to_string_pretty(&counterexample).expect("bundle serializes");
            std::fs::write(&args.out, text + "\n")?;
            manifest.write_alongside(&args.out)?;
            Err(CliError::Counterexample(format!(
                "counterexample to {} (reproduction bundle written to {})",
                counterexample.implication,
                args.out.display()
            )))
        }
        Err(CampaignError::InvalidConfig(msg)) => Err(CliError::Usage(msg)),
        Err(CampaignError::CaseFailed(msg)) => Err(CliError::Internal(msg)),
    }
}
