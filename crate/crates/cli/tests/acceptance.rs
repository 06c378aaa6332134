//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure.

use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use parcel_alloc::generator::rng::{derive_seed, Sampler};
use parcel_alloc::generator::{
    gen_bounded, gen_synthetic, random_order, BoundedConfig, SyntheticConfig,
};
use parcel_alloc::harness::{
    ratio_study, run_sweep, summarize, OnlineAlgorithm, RatioStudyConfig, SweepConfig,
};
use parcel_alloc::harness::{SweepParameter, OFFLINE};
use parcel_alloc::offline::{
    build_flow_network, enumerate_optima, solve_exhaustive, solve_min_cost_flow,
};
use parcel_alloc::online::{
    greedy_run, greedy_run_observed, primal_dual_run_observed, BundleMode, DualUpdate,
};
use parcel_alloc::{
    allocation_utility, check_feasible, Allocation, Instance, Pair, ParcelId, Worker, WorkerId,
    TOLERANCE,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("worked example offline optimum", worked_offline),
        ("worked example greedy trace", worked_greedy_trace),
        (
            "flow equals exhaustive on 200 instances",
            oracle_equivalence,
        ),
        (
            "feasibility and irrevocability on 1000 runs",
            feasibility_suite,
        ),
        (
            "primal-dual mean ratio clears the bound",
            competitive_bound_check,
        ),
        ("offline utility monotone in |W| and |P|", monotone_trends),
        ("greedy scales near-linearly to 50k parcels", scalability),
        ("CLI output is byte-identical across reruns", determinism),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name} ({secs:.2}s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name} ({secs:.2}s): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parcel-alloc"))
        .args(args)
        .output()
        .expect("spawn parcel-alloc")
}

fn stdout_of(args: &[&str]) -> Result<String, String> {
    let out = cli(args);
    ensure!(
        out.status.success(),
        "{args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

/// 1-based (parcel, worker) labels to 0-based pairs.
fn pairs(labels: &[(usize, usize)]) -> Vec<Pair> {
    let mut v: Vec<Pair> = labels
        .iter()
        .map(|&(i, j)| (ParcelId(i - 1), WorkerId(j - 1)))
        .collect();
    v.sort();
    v
}

fn worked_offline() -> Outcome {
    let start = Instant::now();
    let path = data("worked_example.json");
    let path = path.to_str().unwrap();
    let instance = parcel_alloc::generator::load_instance(path).map_err(|e| e.to_string())?;
    let example = pairs(&[
        (1, 1),
        (2, 4),
        (3, 2),
        (4, 1),
        (5, 4),
        (6, 2),
        (7, 2),
        (8, 3),
    ]);

    // exhaustive first
    let exhaustive = solve_exhaustive(&instance).map_err(|e| e.to_string())?;
    ensure!(
        (exhaustive.total_utility() - 6.3).abs() <= TOLERANCE,
        "exhaustive optimum {}",
        exhaustive.total_utility()
    );
    let example_alloc =
        Allocation::from_pairs(&instance, example.clone()).map_err(|e| e.to_string())?;
    ensure!(
        check_feasible(&instance, &example_alloc).unwrap(),
        "example pair set infeasible"
    );
    let example_utility = allocation_utility(&instance, &example).unwrap();
    ensure!(
        (example_utility - exhaustive.total_utility()).abs() <= TOLERANCE,
        "example pair set utility {example_utility}"
    );
    let (_, optima) = enumerate_optima(&instance);
    ensure!(
        optima.contains(&example),
        "example pair set is not among the optima"
    );

    let flow = solve_min_cost_flow(&build_flow_network(&instance));
    ensure!(
        (flow.total_utility() - exhaustive.total_utility()).abs() <= TOLERANCE,
        "flow {} vs exhaustive {}",
        flow.total_utility(),
        exhaustive.total_utility()
    );

    let text = stdout_of(&["solve-offline", "--instance", path, "--json"])?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let utility = doc["utility"].as_f64().ok_or("no utility")?;
    ensure!((utility - 6.3).abs() <= TOLERANCE, "CLI utility {utility}");
    ensure!(doc["exact"] == true, "CLI result not exact");
    let got: Vec<Pair> = serde_json::from_value(doc["pairs"].clone()).map_err(|e| e.to_string())?;
    ensure!(got == example, "CLI pairs {got:?}");

    let plain = stdout_of(&["solve-offline", "--instance", path])?;
    ensure!(
        plain.contains("utility: 6.300000") && plain.contains("pairs: 8"),
        "plain output:\n{plain}"
    );
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!(
        "utility 6.3, {} tied optima, CLI returns the example set",
        optima.len()
    ))
}

fn worked_greedy_trace() -> Outcome {
    let path = data("worked_example.json");
    let instance = parcel_alloc::generator::load_instance(&path).map_err(|e| e.to_string())?;
    let order = [WorkerId(1), WorkerId(3), WorkerId(2), WorkerId(0)];
    let mut trace: Vec<(WorkerId, Vec<ParcelId>)> = Vec::new();
    let run = greedy_run_observed(&instance, &order, BundleMode::PaperGreedy, |w, state| {
        trace.push((w, state.bundle_of(w).to_vec()));
    })
    .map_err(|e| e.to_string())?;
    let p = |ids: &[usize]| ids.iter().map(|&i| ParcelId(i - 1)).collect::<Vec<_>>();
    let expected = vec![
        (WorkerId(1), p(&[3, 4, 6, 7])),
        (WorkerId(3), p(&[2, 5])),
        (WorkerId(2), p(&[1, 8])),
    ];
    // every parcel is gone once w3 leaves, so w1 is never offered any
    ensure!(trace == expected, "trace {trace:?}");
    ensure!(
        run.allocation.by_worker(4)[0].is_empty(),
        "w1 received parcels"
    );
    let w4: f64 = trace[1]
        .1
        .iter()
        .map(|&i| instance.utility(i, WorkerId(3)))
        .sum();
    ensure!((w4 - 1.5).abs() <= TOLERANCE, "w4 bundle utility {w4}");
    ensure!(
        (run.allocation.total_utility() - 5.2).abs() <= TOLERANCE,
        "total {}",
        run.allocation.total_utility()
    );

    let order_file = data("order1.txt");
    let text = stdout_of(&[
        "run-online",
        "--instance",
        path.to_str().unwrap(),
        "--algo",
        "greedy",
        "--order",
        &format!("file:{}", order_file.display()),
        "--no-timings",
    ])?;
    ensure!(
        text.contains("online_utility: 5.200000"),
        "CLI output:\n{text}"
    );
    ensure!(
        text.contains("bundle w1: p2 p3 p5 p6"),
        "CLI output:\n{text}"
    );
    Ok("w2 {p3,p4,p6,p7}, w4 {p2,p5} = 1.5, w3 {p1,p8}, w1 {}; total 5.2".into())
}

/// Random instance on a small grid; budgets either cover the `capacity`
/// slowest parcels (`unbound`) or are drawn freely.
fn random_instance(rng: &mut Sampler, max_n: u64, max_m: u64, unbound: bool) -> Instance {
    let n = rng.int_inclusive(0, max_n) as usize;
    let m = rng.int_inclusive(1, max_m) as usize;
    let mut workers = Vec::with_capacity(m);
    let mut utility = Vec::with_capacity(n * m);
    let mut time = Vec::with_capacity(n * m);
    for _ in 0..m {
        let capacity = rng.int_inclusive(1, 4) as u32;
        let u: Vec<f64> = (0..n)
            .map(|_| rng.int_inclusive(0, 10) as f64 / 10.0)
            .collect();
        let t: Vec<f64> = (0..n).map(|_| rng.uniform(0.1, 2.0)).collect();
        let budget = if unbound {
            let mut sorted = t.clone();
            sorted.sort_by(|a, b| b.total_cmp(a));
            sorted.iter().take(capacity as usize).sum::<f64>() + 1e-6
        } else {
            rng.uniform(0.0, 4.0)
        };
        workers.push(Worker::new(capacity, budget));
        utility.extend(u);
        time.extend(t);
    }
    Instance::from_worker_major(n, workers, utility, time).unwrap()
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = Sampler::new(0xACCE_0003);
    let mut agree = 0;
    for k in 0..200 {
        let instance = random_instance(&mut rng, 6, 3, true);
        ensure!(
            instance.budgets_non_binding(),
            "instance {k} has a binding budget"
        );
        let flow = solve_min_cost_flow(&build_flow_network(&instance));
        let exact = solve_exhaustive(&instance).map_err(|e| e.to_string())?;
        ensure!(
            (flow.total_utility() - exact.total_utility()).abs() <= TOLERANCE,
            "instance {k}: flow {} vs exhaustive {}",
            flow.total_utility(),
            exact.total_utility()
        );
        agree += 1;
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    Ok(format!("{agree}/200 agree"))
}

fn feasibility_suite() -> Outcome {
    let algorithms = [
        OnlineAlgorithm::Greedy(BundleMode::PaperGreedy),
        OnlineAlgorithm::Greedy(BundleMode::ExactKnapsack),
        OnlineAlgorithm::PrimalDual(DualUpdate::Additive),
        OnlineAlgorithm::PrimalDual(DualUpdate::Literal),
    ];
    let mut rng = Sampler::new(0xACCE_0004);
    let mut violations = Vec::new();
    for k in 0..1000 {
        let instance = random_instance(&mut rng, 30, 8, k % 5 == 0);
        let order = random_order(instance.n_workers(), rng.next_u64());
        let alg = algorithms[k % algorithms.len()];
        let mut seen: Vec<Pair> = Vec::new();
        let mut ok = true;
        let mut check = |worker: WorkerId,
                         committed: &Allocation,
                         owner: &dyn Fn(ParcelId) -> Option<WorkerId>| {
            let now = committed.pairs();
            ok &= now.len() >= seen.len() && now[..seen.len()] == seen[..];
            ok &= now[seen.len()..].iter().all(|&(_, j)| j == worker);
            ok &= now.iter().all(|&(i, j)| owner(i) == Some(j));
            ok &= check_feasible(&instance, committed).unwrap_or(false);
            seen = now.to_vec();
        };
        let run = match alg {
            OnlineAlgorithm::Greedy(mode) => {
                greedy_run_observed(&instance, &order, mode, |w, s| {
                    check(w, s.committed(), &|i| s.owner(i));
                })
            }
            OnlineAlgorithm::PrimalDual(update) => {
                primal_dual_run_observed(&instance, &order, update, |w, s, _| {
                    check(w, s.committed(), &|i| s.owner(i));
                })
            }
        };
        let run = run.map_err(|e| e.to_string())?;
        if !ok || !check_feasible(&instance, &run.allocation).unwrap_or(false) {
            violations.push(format!("triple {k} ({alg})"));
        }
    }
    ensure!(
        violations.is_empty(),
        "{} violations: {:?}",
        violations.len(),
        violations
    );
    Ok("1000 triples, 0 violations".into())
}

fn competitive_bound_check() -> Outcome {
    let mus = [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0];
    let instances: Vec<(String, Instance)> = (0..100u64)
        .map(|k| {
            let cfg = BoundedConfig {
                n_parcels: 8,
                n_workers: 3,
                mu: mus[k as usize % mus.len()],
                seed: derive_seed(0xACCE_0005, k),
                ..Default::default()
            };
            (format!("bounded-{k}"), gen_bounded(&cfg).unwrap())
        })
        .collect();
    let rows = ratio_study(
        &instances,
        &RatioStudyConfig {
            orders_per_instance: 20,
            seed: 0xACCE_0005,
            ..Default::default()
        },
    );
    let summary = summarize(&rows);
    ensure!(
        summary.skipped == 0,
        "{} instances skipped",
        summary.skipped
    );
    for (row, (_, inst)) in rows.iter().zip(&instances) {
        for j in inst.worker_ids() {
            let w = inst.worker(j);
            ensure!(
                inst.time_column(j)
                    .iter()
                    .all(|&t| t <= w.time_budget && w.time_budget <= row.mu * t * (1.0 + 1e-12)),
                "{}: budget outside [t, mu t]",
                row.instance
            );
        }
    }
    let fraction = summary.fraction_respected();
    let worst = rows
        .iter()
        .filter_map(|r| r.mean_ratio.map(|m| m / r.bound))
        .fold(f64::INFINITY, f64::min);
    ensure!(
        fraction >= 0.95,
        "bound respected on {fraction:.3} of instances"
    );
    Ok(format!(
        "bound respected on {}/{} instances; smallest mean-ratio / bound = {worst:.3}",
        summary.respected, summary.evaluated
    ))
}

fn offline_means(config: &SweepConfig) -> Result<Vec<f64>, String> {
    let result = run_sweep(config).map_err(|e| e.to_string())?;
    Ok(result
        .rows
        .iter()
        .filter(|r| r.algorithm == OFFLINE && r.metric == "utility")
        .map(|r| r.mean)
        .collect())
}

fn monotone_trends() -> Outcome {
    let start = Instant::now();
    let mut workers = SweepConfig::new(
        SweepParameter::NWorkers,
        vec![20.0, 40.0, 60.0, 80.0, 100.0],
    );
    workers.base.n_parcels = 200;
    workers.trials = 3;
    let mut parcels = SweepConfig::new(
        SweepParameter::NParcels,
        vec![100.0, 200.0, 300.0, 400.0, 500.0],
    );
    parcels.base.n_workers = 40;
    parcels.trials = 3;
    let mut detail = Vec::new();
    for (name, cfg) in [("|W|", &workers), ("|P|", &parcels)] {
        let means = offline_means(cfg)?;
        ensure!(
            means.len() == cfg.values.len(),
            "{name}: {} offline rows",
            means.len()
        );
        for (k, w) in means.windows(2).enumerate() {
            ensure!(
                w[1] + TOLERANCE >= w[0],
                "{name}: offline mean drops from {} to {} between {} and {}",
                w[0],
                w[1],
                cfg.values[k],
                cfg.values[k + 1]
            );
        }
        detail.push(format!(
            "{name}: {}",
            means
                .iter()
                .map(|m| format!("{m:.1}"))
                .collect::<Vec<_>>()
                .join(" <= ")
        ));
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(detail.join("; "))
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn scalability() -> Outcome {
    let sizes = [10_000usize, 20_000, 30_000, 40_000, 50_000];
    let mut points = Vec::new();
    for &n in &sizes {
        let instance = gen_synthetic(&SyntheticConfig {
            n_parcels: n,
            n_workers: 200,
            seed: 7,
            ..Default::default()
        })
        .map_err(|e| e.to_string())?;
        let order = random_order(200, 7);
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = Instant::now();
            let run = greedy_run(&instance, &order, BundleMode::PaperGreedy)
                .map_err(|e| e.to_string())?;
            best = best.min(start.elapsed().as_secs_f64());
            ensure!(!run.allocation.is_empty(), "empty allocation at n={n}");
        }
        points.push((n as f64, best));
    }
    let slope = log_log_slope(&points);
    let largest = points.last().unwrap().1;
    ensure!(largest < 60.0, "50k parcels took {largest:.1}s");
    ensure!(slope <= 1.3, "log-log slope {slope:.3}; times {points:?}");
    Ok(format!(
        "50k x 200 in {:.1} ms, slope {slope:.3}",
        largest * 1e3
    ))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    let example = data("worked_example.json");
    let example = example.to_str().unwrap();
    let mut compared = 0;

    for tag in ["a", "b"] {
        let gen = p(&format!("gen-{tag}.json"));
        stdout_of(&[
            "gen",
            "--seed",
            "11",
            "--parcels",
            "40",
            "--workers",
            "6",
            "--order-seed",
            "3",
            "--out",
            &gen,
        ])?;
    }
    ensure!(
        read(&p("gen-a.json"))? == read(&p("gen-b.json"))?,
        "gen output differs"
    );
    compared += 1;

    let commands: Vec<Vec<String>> = vec![
        vec!["solve-offline".into(), "--instance".into(), example.into()],
        vec!["solve-offline".into(), "--instance".into(), p("gen-a.json")],
        vec![
            "run-online".into(),
            "--instance".into(),
            p("gen-a.json"),
            "--algo".into(),
            "greedy".into(),
            "--order".into(),
            "seed:5".into(),
            "--no-timings".into(),
        ],
        vec![
            "run-online".into(),
            "--instance".into(),
            example.into(),
            "--algo".into(),
            "primal-dual".into(),
            "--order".into(),
            "seed:9".into(),
            "--no-timings".into(),
            "--json".into(),
        ],
    ];
    for args in &commands {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = stdout_of(&args)?;
        let b = stdout_of(&args)?;
        ensure!(a == b, "{args:?} output differs");
        compared += 1;
    }

    for (tag, jobs) in [("a", "1"), ("b", "4")] {
        stdout_of(&[
            "ratio-study",
            "--instances",
            "12",
            "--orders",
            "5",
            "--seed",
            "21",
            "--jobs",
            jobs,
            "--out",
            &p(&format!("ratio-{tag}.csv")),
        ])?;
        stdout_of(&[
            "sweep",
            "--param",
            "n_workers",
            "--values",
            "5,10",
            "--trials",
            "2",
            "--orders",
            "2",
            "--seed",
            "4",
            "--config",
            &cfg_file(dir.path())?,
            "--jobs",
            jobs,
            "--no-timings",
            "--out",
            &p(&format!("sweep-{tag}.csv")),
            "--raw",
            &p(&format!("raw-{tag}.jsonl")),
        ])?;
    }
    for stem in ["ratio-{}.csv", "sweep-{}.csv", "raw-{}.jsonl"] {
        let a = read(&p(&stem.replace("{}", "a")))?;
        let b = read(&p(&stem.replace("{}", "b")))?;
        ensure!(!a.is_empty() && a == b, "{stem} differs between reruns");
        compared += 1;
    }
    Ok(format!(
        "{compared} outputs byte-identical (sweeps and studies across --jobs 1 and 4)"
    ))
}

fn cfg_file(dir: &Path) -> Result<String, String> {
    let path = dir.join("base.json");
    std::fs::write(&path, r#"{"n_parcels": 30, "hours_mean": 3.0}"#).map_err(|e| e.to_string())?;
    Ok(path.to_str().unwrap().to_owned())
}

fn read(path: &str) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{path}: {e}"))
}
