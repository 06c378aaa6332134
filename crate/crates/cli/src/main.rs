use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use parcel_alloc::generator::{
    gen_adversarial, gen_bounded, gen_synthetic, load_instance, load_instance_with_order,
    random_order, read_order_file, save_instance_csv, save_instance_json, BoundedConfig,
    SyntheticConfig,
};
use parcel_alloc::harness::exec::with_jobs;
use parcel_alloc::harness::{
    ratio_study, run_against, run_sweep, summarize, write_ratio_csv, write_runs_jsonl,
    write_sweep_csv, OnlineAlgorithm, RatioStudyConfig, RunReport, SweepConfig, SweepParameter,
    TimedOffline,
};
use parcel_alloc::offline::solve_offline;
use parcel_alloc::online::{BundleMode, DualUpdate, OnlineRun};
use parcel_alloc::{Instance, WorkerId};

#[derive(Parser)]
#[command(
    name = "parcel-alloc",
    version,
    about = "Online parcel allocation to crowd workers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance (`.json` path: JSON file, otherwise a CSV directory).
    Gen(GenArgs),
    /// Solve an instance offline and print the optimal allocation.
    SolveOffline(SolveArgs),
    /// Replay one arrival order with an online algorithm and print its report.
    RunOnline(RunArgs),
    /// Measure empirical competitive ratios against the exact optimum.
    RatioStudy(RatioArgs),
    /// Sweep one synthetic-workload parameter and write aggregated CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    /// JSON file with synthetic workload parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    parcels: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Emit the dyadic stress instance with this many workers instead.
    #[arg(long, value_name = "K", conflicts_with_all = ["config", "parcels", "workers"])]
    adversarial: Option<u32>,
    #[arg(long, default_value_t = 1.0, requires = "adversarial")]
    base_time: f64,
    /// Also store a random arrival order drawn from this seed (JSON only).
    #[arg(long)]
    order_seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoName {
    Greedy,
    PrimalDual,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeName {
    Paper,
    Exact,
}

#[derive(Clone, Debug)]
enum OrderSpec {
    Seed(u64),
    File(PathBuf),
}

impl FromStr for OrderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(seed) = s.strip_prefix("seed:") {
            seed.parse()
                .map(OrderSpec::Seed)
                .map_err(|e| format!("bad seed {seed:?}: {e}"))
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(OrderSpec::File(PathBuf::from(path)))
        } else {
            Err("expected seed:<int> or file:<path>".into())
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: AlgoName,
    /// `seed:<int>` or `file:<path>`; defaults to the instance's stored order, else seed:0.
    #[arg(long)]
    order: Option<OrderSpec>,
    /// Bundle rule for greedy.
    #[arg(long, value_enum, default_value = "paper")]
    mode: ModeName,
    /// Primal-dual only: reset duals with the literal assignment rule.
    #[arg(long)]
    literal_duals: bool,
    /// Skip the offline comparison.
    #[arg(long)]
    no_offline: bool,
    /// Leave wall-clock fields out of the output.
    #[arg(long)]
    no_timings: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RatioArgs {
    /// Study these instance files instead of random bounded ones.
    #[arg(long, conflicts_with = "adversarial")]
    instance: Vec<PathBuf>,
    /// Study the dyadic stress family for k = 1..=K.
    #[arg(long, value_name = "K")]
    adversarial: Option<u32>,
    /// Number of random bounded instances.
    #[arg(long, default_value_t = 100)]
    instances: usize,
    #[arg(long, default_value_t = 8)]
    parcels: usize,
    #[arg(long, default_value_t = 3)]
    workers: usize,
    /// Largest budget-to-time ratio of the random instances.
    #[arg(long, default_value_t = 4.0)]
    mu: f64,
    #[arg(long, default_value_t = 20)]
    orders: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "primal-dual", value_parser = OnlineAlgorithm::from_str)]
    algo: OnlineAlgorithm,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = SweepParameter::from_str)]
    param: SweepParameter,
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    orders: usize,
    /// Overrides the base config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// JSON file with base synthetic workload parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = OnlineAlgorithm::from_str)]
    algos: Vec<OnlineAlgorithm>,
    /// Run the offline oracle only up to this many parcel-worker cells.
    #[arg(long)]
    offline_max_cells: Option<usize>,
    /// Aggregated CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-run JSON lines.
    #[arg(long)]
    raw: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Drop wall-clock metrics so output is byte-reproducible.
    #[arg(long)]
    no_timings: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli.command, &mut out).and_then(|()| out.flush().map_err(Into::into)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.downcast_ref::<io::Error>()
                .is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, out: &mut impl Write) -> Result<()> {
    match command {
        Command::Gen(args) => gen(args, out),
        Command::SolveOffline(args) => solve(args, out),
        Command::RunOnline(args) => run_online(args, out),
        Command::RatioStudy(args) => ratio(args, out),
        Command::Sweep(args) => sweep(args, out),
    }
}

fn read_config(path: Option<&Path>) -> Result<SyntheticConfig> {
    let Some(path) = path else {
        return Ok(SyntheticConfig::default());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: SyntheticConfig = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    Ok(cfg)
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn gen(args: GenArgs, out: &mut impl Write) -> Result<()> {
    let instance = match args.adversarial {
        Some(k) => gen_adversarial(k, args.base_time)?,
        None => {
            let mut cfg = read_config(args.config.as_deref())?;
            if let Some(seed) = args.seed {
                cfg.seed = seed;
            }
            if let Some(n) = args.parcels {
                cfg.n_parcels = n;
            }
            if let Some(m) = args.workers {
                cfg.n_workers = m;
            }
            gen_synthetic(&cfg)?
        }
    };
    let is_json = args.out.extension().is_some_and(|e| e == "json");
    if is_json {
        let order = args
            .order_seed
            .map(|s| random_order(instance.n_workers(), s));
        save_instance_json(&args.out, &instance, order.as_deref())?;
    } else {
        if args.order_seed.is_some() {
            bail!("--order-seed needs a .json output");
        }
        save_instance_csv(&args.out, &instance)?;
    }
    writeln!(
        out,
        "wrote {} ({} parcels, {} workers)",
        args.out.display(),
        instance.n_parcels(),
        instance.n_workers()
    )?;
    Ok(())
}

fn solve(args: SolveArgs, out: &mut impl Write) -> Result<()> {
    let instance = load_instance(&args.instance)?;
    let sol = solve_offline(&instance);
    let pairs = sol.allocation.sorted_pairs();
    if args.json {
        let doc = serde_json::json!({
            "method": sol.method,
            "exact": sol.exact(),
            "utility": sol.utility(),
            "pairs": pairs,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        return Ok(());
    }
    writeln!(out, "method: {}", sol.method.as_str())?;
    writeln!(out, "exact: {}", sol.exact())?;
    writeln!(out, "utility: {:.6}", sol.utility())?;
    writeln!(out, "pairs: {}", pairs.len())?;
    for (i, j) in pairs {
        writeln!(out, "{i} {j} {:.6}", instance.utility(i, j))?;
    }
    Ok(())
}

fn resolve_order(
    instance: &Instance,
    spec: Option<OrderSpec>,
    stored: Option<Vec<WorkerId>>,
) -> Result<(Vec<WorkerId>, Option<u64>)> {
    Ok(match (spec, stored) {
        (Some(OrderSpec::Seed(s)), _) => (random_order(instance.n_workers(), s), Some(s)),
        (Some(OrderSpec::File(p)), _) => (read_order_file(&p)?, None),
        (None, Some(order)) => (order, None),
        (None, None) => (random_order(instance.n_workers(), 0), Some(0)),
    })
}

fn run_online(args: RunArgs, out: &mut impl Write) -> Result<()> {
    let algorithm = match (args.algo, args.mode, args.literal_duals) {
        (AlgoName::Greedy, _, true) => bail!("--literal-duals applies to primal-dual only"),
        (AlgoName::Greedy, ModeName::Paper, _) => OnlineAlgorithm::Greedy(BundleMode::PaperGreedy),
        (AlgoName::Greedy, ModeName::Exact, _) => {
            OnlineAlgorithm::Greedy(BundleMode::ExactKnapsack)
        }
        (AlgoName::PrimalDual, _, false) => OnlineAlgorithm::PrimalDual(DualUpdate::Additive),
        (AlgoName::PrimalDual, _, true) => OnlineAlgorithm::PrimalDual(DualUpdate::Literal),
    };
    let (instance, stored) = load_instance_with_order(&args.instance)?;
    let (order, order_seed) = resolve_order(&instance, args.order, stored)?;
    let offline = (!args.no_offline).then(|| TimedOffline::solve(&instance));
    let label = label_of(&args.instance);
    let (mut report, run) = run_against(
        &instance,
        &label,
        algorithm,
        &order,
        order_seed,
        offline.as_ref(),
    )?;
    if args.no_timings {
        report = report.without_timings();
    }
    if args.json {
        let doc = serde_json::json!({
            "report": report,
            "order": order,
            "pairs": run.allocation.sorted_pairs(),
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        return Ok(());
    }
    print_report(out, &report, &order, &run, !args.no_timings)
}

fn print_report(
    out: &mut impl Write,
    r: &RunReport,
    order: &[WorkerId],
    run: &OnlineRun,
    timings: bool,
) -> Result<()> {
    let opt = |x: Option<f64>| x.map_or_else(|| "-".to_owned(), |v| format!("{v:.6}"));
    let ids: Vec<String> = order.iter().map(ToString::to_string).collect();
    writeln!(out, "algorithm: {}", r.algorithm)?;
    writeln!(out, "instance: {}", r.instance_label)?;
    writeln!(out, "order: {}", ids.join(" "))?;
    writeln!(
        out,
        "order_seed: {}",
        r.arrival_order_seed
            .map_or_else(|| "-".to_owned(), |s| s.to_string())
    )?;
    writeln!(out, "online_utility: {:.6}", r.online_utility)?;
    writeln!(out, "assigned: {}", r.assigned)?;
    writeln!(out, "offline_utility: {}", opt(r.offline_utility))?;
    writeln!(
        out,
        "offline_method: {}",
        r.offline_method.map_or("-", |m| m.as_str())
    )?;
    writeln!(
        out,
        "offline_exact: {}",
        r.offline_exact
            .map_or_else(|| "-".to_owned(), |b| b.to_string())
    )?;
    writeln!(out, "ratio: {}", opt(r.ratio))?;
    if timings {
        writeln!(out, "wall_time_ms: {:.6}", r.wall_time_ms)?;
        writeln!(out, "offline_wall_time_ms: {}", opt(r.offline_wall_time_ms))?;
    }
    writeln!(out, "peak_memory_bytes: {}", r.peak_memory_bytes)?;
    let by_worker = run.allocation.by_worker(order.len());
    for &w in order {
        write!(out, "bundle {w}:")?;
        for i in &by_worker[w.0] {
            write!(out, " {i}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn ratio(args: RatioArgs, out: &mut impl Write) -> Result<()> {
    let instances: Vec<(String, Instance)> = if let Some(k) = args.adversarial {
        (1..=k)
            .map(|k| Ok((format!("adversarial-k{k}"), gen_adversarial(k, 1.0)?)))
            .collect::<Result<_>>()?
    } else if !args.instance.is_empty() {
        args.instance
            .iter()
            .map(|p| Ok((label_of(p), load_instance(p)?)))
            .collect::<Result<_>>()?
    } else {
        (0..args.instances)
            .map(|k| {
                let cfg = BoundedConfig {
                    n_parcels: args.parcels,
                    n_workers: args.workers,
                    mu: args.mu,
                    seed: parcel_alloc::generator::rng::derive_seed(args.seed, k as u64),
                    ..Default::default()
                };
                Ok((format!("bounded-{k}"), gen_bounded(&cfg)?))
            })
            .collect::<Result<_>>()?
    };
    let config = RatioStudyConfig {
        orders_per_instance: args.orders,
        seed: args.seed,
        algorithm: args.algo,
        ..Default::default()
    };
    let rows = with_jobs(args.jobs, || ratio_study(&instances, &config));
    let summary = summarize(&rows);
    match &args.out {
        Some(path) => {
            let mut file = create(path)?;
            write_ratio_csv(&mut file, &rows)?;
            file.flush()?;
        }
        None => write_ratio_csv(&mut *out, &rows)?,
    }
    let line = format!(
        "evaluated {} skipped {} bound_respected {} fraction {:.6}",
        summary.evaluated,
        summary.skipped,
        summary.respected,
        summary.fraction_respected()
    );
    if args.out.is_some() {
        writeln!(out, "{line}")?;
    } else {
        eprintln!("{line}");
    }
    Ok(())
}

fn sweep(args: SweepArgs, out: &mut impl Write) -> Result<()> {
    let mut config = SweepConfig::new(args.param, args.values);
    if let Some(path) = &args.config {
        let workers = config.base.n_workers;
        config.base = read_config(Some(path))?;
        if args.param == SweepParameter::Scalability && !config_sets_workers(path)? {
            config.base.n_workers = workers;
        }
    }
    if let Some(seed) = args.seed {
        config.base.seed = seed;
    }
    config.trials = args.trials;
    config.orders_per_trial = args.orders;
    if !args.algos.is_empty() {
        config.algorithms = args.algos;
    }
    if let Some(cells) = args.offline_max_cells {
        config.offline_max_cells = cells;
    }
    let result = with_jobs(args.jobs, || run_sweep(&config))?;
    let timings = !args.no_timings;
    match &args.out {
        Some(path) => {
            let mut file = create(path)?;
            write_sweep_csv(&mut file, &result.rows, timings)?;
            file.flush()?;
            writeln!(
                out,
                "wrote {} rows to {}",
                result.rows.len(),
                path.display()
            )?;
        }
        None => write_sweep_csv(&mut *out, &result.rows, timings)?,
    }
    if let Some(path) = &args.raw {
        let mut file = create(path)?;
        write_runs_jsonl(&mut file, &result.runs, timings)?;
        file.flush()?;
    }
    Ok(())
}

fn config_sets_workers(path: &Path) -> Result<bool> {
    let text = fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    Ok(value.get("n_workers").is_some())
}
