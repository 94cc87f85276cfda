//! `otm` — experiments, hyperparameter search, booleanization and benchmarks
//! for the online-learning Tsetlin Machine.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use otm_cli::bench::bench;
use otm_cli::{
    build_use_case, hyperparam_search, run_experiment, search_csv, summary_csv, write_outputs,
    ExperimentSpec, RunParams, SearchGrid, UseCase,
};
use otm_core::data::{
    booleanize_dataset, factorial, load_dataset, load_raw_csv, save_dataset, SetAllocation,
};
use otm_core::fault::{FaultPlan, MachineDims, StuckAtKind};
use otm_core::manager::{Event, EventAction};
use otm_core::tm::TmConfig;

#[derive(Parser)]
#[command(
    name = "otm",
    version,
    about = "Online-learning Tsetlin Machine simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a use-case experiment over block orderings and emit curves.
    Run(RunArgs),
    /// Grid-search (clauses, T, s) on the baseline experiment.
    Search(SearchArgs),
    /// Convert a raw CSV of reals into the canonical boolean dataset file.
    Booleanize(BooleanizeArgs),
    /// Report train/classify throughput for a machine configuration.
    Bench(BenchArgs),
}

#[derive(Args)]
struct DatasetArgs {
    /// Canonical dataset file (header `F=<int> C=<int>`).
    #[arg(long)]
    dataset: PathBuf,
    /// Block length; defaults to the greatest common divisor of the set sizes.
    #[arg(long)]
    block_len: Option<usize>,
    /// Set sizes as `offline,validation,online`; defaults to a 1/5,2/5,2/5 split.
    #[arg(long)]
    alloc: Option<String>,
}

#[derive(Args)]
struct MachineArgs {
    /// Active clauses per class.
    #[arg(long, default_value_t = 16)]
    clauses: usize,
    /// Synthesized (over-provisioned) clauses per class.
    #[arg(long)]
    clauses_max: Option<usize>,
    #[arg(long, default_value_t = 1.375)]
    s_offline: f64,
    #[arg(long, default_value_t = 1.0)]
    s_online: f64,
    /// Feedback threshold T.
    #[arg(long, default_value_t = 15)]
    threshold: u32,
    /// TA half-states N (states run 0..2N-1).
    #[arg(long, default_value_t = 128)]
    ta_states: u32,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    machine: MachineArgs,
    /// baseline | limited-data | new-class | faults | custom
    #[arg(long, default_value = "limited-data")]
    use_case: String,
    /// Block orderings to run (max: number-of-blocks factorial).
    #[arg(long, default_value_t = 120)]
    orderings: usize,
    /// Master seed; per-ordering sub-seeds derive from it.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    offline_epochs: usize,
    /// Truncate the offline set to its first n points.
    #[arg(long)]
    offline_points: Option<usize>,
    #[arg(long, default_value_t = 16)]
    online_iterations: usize,
    /// Enable or disable online learning (`on`/`off`).
    #[arg(long, default_value = "on")]
    online: String,
    /// Class withheld by the new-class use case.
    #[arg(long, default_value_t = 0)]
    filter_class: usize,
    /// Intervention lands after this many online iterations.
    #[arg(long)]
    introduce_after: Option<usize>,
    /// Keep the withheld class out for the whole run (new-class baseline).
    #[arg(long, default_value_t = false)]
    no_introduction: bool,
    /// Fraction of TAs faulted by the faults use case.
    #[arg(long, default_value_t = 0.2)]
    fault_fraction: f64,
    /// stuck0 | stuck1
    #[arg(long, default_value = "stuck0")]
    fault_kind: String,
    /// Extra timed event, `<iteration>:<action>`; repeatable. Actions:
    /// enable-class=<id>, disable-class-filter, inject-faults=<frac>:<kind>[:<seed>],
    /// set-clauses=<k>, set-s=<v>, set-t=<v>, online-learning=<on|off>.
    #[arg(long = "event")]
    events: Vec<String>,
    /// Declarative schedule file replacing the use-case preset
    /// (implies --use-case custom).
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Write summary.csv and per-ordering raw files here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    /// Comma-separated clause counts.
    #[arg(long, default_value = "8,16,32")]
    clauses_grid: String,
    /// Comma-separated T values.
    #[arg(long, default_value = "10,15,20")]
    t_grid: String,
    /// Comma-separated offline s values.
    #[arg(long, default_value = "1.375,2.0,3.0")]
    s_grid: String,
    #[arg(long, default_value_t = 24)]
    orderings: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 10)]
    offline_epochs: usize,
    #[arg(long)]
    offline_points: Option<usize>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Write the ranked table here as CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BooleanizeArgs {
    /// Raw CSV: real-valued features, decimal label last.
    #[arg(long)]
    input: PathBuf,
    /// Thermometer thresholds per feature.
    #[arg(long, default_value_t = 4)]
    bins: usize,
    /// Canonical dataset file to write.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    dataset: DatasetArgs,
    #[command(flatten)]
    machine: MachineArgs,
    /// Operations per timed phase.
    #[arg(long, default_value_t = 200_000)]
    steps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() {
    if let Err(err) = dispatch(Cli::parse()) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Search(args) => cmd_search(args),
        Command::Booleanize(args) => cmd_booleanize(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn layout(args: &DatasetArgs, dataset_len: usize) -> Result<(usize, SetAllocation)> {
    let alloc = match &args.alloc {
        Some(spec) => {
            let parts: Vec<usize> = spec
                .split(',')
                .map(|p| p.trim().parse().context("parsing --alloc"))
                .collect::<Result<_>>()?;
            if parts.len() != 3 {
                bail!("--alloc needs three comma-separated sizes");
            }
            SetAllocation {
                offline: parts[0],
                validation: parts[1],
                online: parts[2],
            }
        }
        None => {
            if !dataset_len.is_multiple_of(5) {
                bail!("dataset size {dataset_len} has no default 1/5,2/5,2/5 split; pass --alloc");
            }
            SetAllocation {
                offline: dataset_len / 5,
                validation: 2 * dataset_len / 5,
                online: 2 * dataset_len / 5,
            }
        }
    };
    if alloc.total() != dataset_len {
        bail!(
            "allocation {}+{}+{} does not cover the {} datapoints",
            alloc.offline,
            alloc.validation,
            alloc.online,
            dataset_len
        );
    }
    let block_len = args
        .block_len
        .unwrap_or_else(|| gcd(gcd(alloc.offline, alloc.validation), alloc.online));
    Ok((block_len, alloc))
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn on_off(value: &str) -> Result<bool> {
    match value {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        other => bail!("expected on/off, got '{other}'"),
    }
}

fn parse_event(spec: &str, config: &TmConfig) -> Result<Event> {
    let (iteration, action) = spec
        .split_once(':')
        .with_context(|| format!("event '{spec}' needs '<iteration>:<action>'"))?;
    let at_online_iteration: usize = iteration
        .trim()
        .parse()
        .with_context(|| format!("event iteration in '{spec}'"))?;
    let (name, arg) = match action.split_once('=') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (action.trim(), None),
    };
    let need = || arg.with_context(|| format!("action '{name}' needs an argument"));
    let action = match name {
        "enable-class" => EventAction::EnableClass(need()?.parse()?),
        "disable-class-filter" => EventAction::DisableClassFilter,
        "inject-faults" => {
            let parts: Vec<&str> = need()?.split(':').collect();
            if parts.len() < 2 || parts.len() > 3 {
                bail!("inject-faults needs <fraction>:<kind>[:<seed>]");
            }
            let fraction: f64 = parts[0].parse().context("fault fraction")?;
            let kind: StuckAtKind = parts[1].parse()?;
            let seed: u64 = parts.get(2).map_or(Ok(0xFA17), |s| s.parse())?;
            EventAction::InjectFaultPlan(FaultPlan::generate_even_spread(
                fraction,
                kind,
                MachineDims::of(config),
                seed,
            )?)
        }
        "set-clauses" => EventAction::SetActiveClauses(need()?.parse()?),
        "set-s" => EventAction::SetS(need()?.parse()?),
        "set-t" => EventAction::SetThreshold(need()?.parse()?),
        "online-learning" => EventAction::EnableOnlineLearning(on_off(need()?)?),
        other => bail!("unknown event action '{other}'"),
    };
    Ok(Event {
        at_online_iteration,
        action,
    })
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let use_case: UseCase = args.use_case.parse()?;
    let (dataset, _) = load_dataset(&args.dataset.dataset)
        .with_context(|| format!("loading dataset {}", args.dataset.dataset.display()))?;
    let (block_len, allocation) = layout(&args.dataset, dataset.len())?;

    let defaults = RunParams::default();
    let params = RunParams {
        clauses: args.machine.clauses,
        clauses_max: args.machine.clauses_max.unwrap_or(args.machine.clauses),
        s_offline: args.machine.s_offline,
        s_online: args.machine.s_online,
        threshold: args.machine.threshold,
        ta_half_states: args.machine.ta_states,
        offline_epochs: args.offline_epochs,
        offline_points: args.offline_points.or(match use_case {
            // The limited-data experiments train on 20 of the 30 offline rows.
            UseCase::Baseline | UseCase::LimitedData | UseCase::Faults => defaults.offline_points,
            UseCase::NewClass | UseCase::Custom => None,
        }),
        online_iterations: args.online_iterations,
        online_learning: on_off(&args.online)?,
        filter_class: args.filter_class,
        introduce_after: if args.no_introduction {
            None
        } else {
            args.introduce_after.or(defaults.introduce_after)
        },
        fault_fraction: args.fault_fraction,
        fault_kind: args.fault_kind.parse()?,
        extra_events: Vec::new(),
    };

    let (config, mut schedule) = build_use_case(use_case, &dataset, &params)?;
    if let Some(path) = &args.schedule {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading schedule {}", path.display()))?;
        schedule = otm_core::manager::Schedule::parse(&text, &config)?;
    }
    for spec in &args.events {
        schedule.events.push(parse_event(spec, &config)?);
    }

    let spec = ExperimentSpec {
        dataset,
        config,
        schedule,
        block_len,
        allocation,
        orderings: args.orderings,
        master_seed: args.seed,
    };
    let result = run_experiment(&spec, args.workers)?;
    print!("{}", summary_csv(&result.summary));
    if let Some(out_dir) = &args.out_dir {
        write_outputs(&result, out_dir)?;
        eprintln!(
            "wrote {} orderings to {}",
            result.histories.len(),
            out_dir.display()
        );
    }
    Ok(())
}

fn cmd_search(args: SearchArgs) -> Result<()> {
    let (dataset, _) = load_dataset(&args.dataset.dataset)
        .with_context(|| format!("loading dataset {}", args.dataset.dataset.display()))?;
    let (block_len, _) = layout(&args.dataset, dataset.len())?;
    let num_blocks = dataset.len() / block_len;
    if let Some(max) = factorial(num_blocks) {
        if (args.orderings as u128) > max {
            bail!(
                "--orderings {} exceeds {num_blocks}! = {max}",
                args.orderings
            );
        }
    }
    let grid = SearchGrid {
        clauses: parse_list(&args.clauses_grid)?,
        thresholds: parse_list(&args.t_grid)?,
        s_offline: parse_list(&args.s_grid)?,
    };
    let base = RunParams {
        offline_epochs: args.offline_epochs,
        offline_points: args.offline_points.or(RunParams::default().offline_points),
        ..RunParams::default()
    };
    let rows = hyperparam_search(
        &dataset,
        &grid,
        &base,
        args.orderings,
        args.seed,
        args.workers,
    )?;
    let csv = search_csv(&rows);
    print!("{csv}");
    if let Some(out) = &args.out {
        std::fs::write(out, csv)?;
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(spec: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    spec.split(',')
        .map(|p| p.trim().parse::<T>().context("parsing grid list"))
        .collect()
}

fn cmd_booleanize(args: BooleanizeArgs) -> Result<()> {
    let (raw, labels) = load_raw_csv(&args.input)?;
    let dataset = booleanize_dataset(&raw, &labels, args.bins)?;
    save_dataset(&dataset, &args.output)?;
    eprintln!(
        "wrote {} datapoints, F={} C={} to {}",
        dataset.len(),
        dataset.num_features,
        dataset.num_classes,
        args.output.display()
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let (dataset, _) = load_dataset(&args.dataset.dataset)
        .with_context(|| format!("loading dataset {}", args.dataset.dataset.display()))?;
    let config = TmConfig {
        num_classes_max: dataset.num_classes,
        num_clauses_max: args.machine.clauses_max.unwrap_or(args.machine.clauses),
        num_clauses_active: args.machine.clauses,
        num_features: dataset.num_features,
        ta_half_states: args.machine.ta_states,
        s_offline: args.machine.s_offline,
        s_online: args.machine.s_online,
        threshold: args.machine.threshold,
        class_active_mask: otm_core::tm::ClassMask::all(dataset.num_classes),
        rng_seed: args.seed,
    };
    let report = bench(&config, &dataset, args.steps, args.seed)?;
    println!("{report}");
    Ok(())
}
