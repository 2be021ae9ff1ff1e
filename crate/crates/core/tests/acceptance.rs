//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion failed.

mod common;

use std::time::{Duration, Instant};

use common::*;
use scps::generator::{generate, Availability, GenConfig, Layout};
use scps::instance::{ActionSpace, Instance, SearchPlan, Variant};
use scps::labeling::{self, DominanceMode, LabelingConfig};
use scps::mdp::{closed_form_cost, decompose, expected_cost, recovery_probability, recursive_cost, trace_plan};
use scps::oracle::{enumerate_optimal, enumerate_outcomes};
use scps::reduction::{q_lower_bound, reduce_tsp};
use scps::simulation::run_experiment;
use scps::solver::{solve, with_action_space, Algorithm, SolveOptions};

const ALPHA_TOL: f64 = 1e-9;
const RECOVERY_TOL: f64 = 1e-12;
const ORACLE_INSTANCES: u64 = 200;
const ORACLE_BUDGET: Duration = Duration::from_secs(60);
const EVAL_PLANS: u64 = 500;
const EVAL_MAX_VISITS: usize = 10;
const NEIGHBOUR_INSTANCES: u64 = 100;
const SHARPENED_LABEL_SHARE: f64 = 0.90;
const MC_PLANS: u64 = 20;
const MC_RUNS: u64 = 100_000;
const MC_SEED: u64 = 20_240_601;
const MC_SIGMAS: f64 = 3.0;
const TSP_CASES: u64 = 50;
const SCALE_SEEDS: u64 = 10;
const SCALE_CHARGERS: usize = 20;
const SCALE_RUNS: u64 = 1000;
const SCALE_MIN_SEEDS: usize = 8;

type Verdict = (bool, String);

fn le(inst: &Instance, mode: DominanceMode) -> labeling::LabelingOutcome {
    labeling::solve(inst, &LabelingConfig::with_mode(mode)).expect("labeling")
}

fn criterion_1() -> Verdict {
    let mut le_time = Duration::ZERO;
    let mut failures = Vec::new();
    let mut plans_differ = 0;
    for s in 0..ORACLE_INSTANCES {
        let inst = oracle_family(s);
        let t0 = Instant::now();
        let out = le(&inst, DominanceMode::Exact);
        le_time += t0.elapsed();
        let best = enumerate_optimal(&inst, 8).expect("oracle");
        let gap = (out.cost.alpha - best.best_alpha).abs();
        let re = expected_cost(&inst, &out.plan).expect("plan evaluates").alpha;
        if gap > ALPHA_TOL || (re - out.cost.alpha).abs() > ALPHA_TOL {
            failures.push(format!("seed {s}: le {} oracle {}", out.cost.alpha, best.best_alpha));
        }
        if out.plan != best.best_plan {
            plans_differ += 1;
        }
    }
    let ok = failures.is_empty() && le_time < ORACLE_BUDGET;
    (
        ok,
        format!(
            "{ORACLE_INSTANCES} instances, le total {:.2}s, {plans_differ} ties with a different plan, mismatches {:?}",
            le_time.as_secs_f64(),
            failures
        ),
    )
}

/// The plans shared by the two evaluation criteria.
fn evaluation_plans() -> Vec<(Instance, SearchPlan)> {
    (0..EVAL_PLANS)
        .map(|i| {
            let inst = evaluation_family(i / 10);
            let plan = random_plan(&inst, &mut rng(i), EVAL_MAX_VISITS);
            (inst, plan)
        })
        .collect()
}

fn criterion_2(plans: &[(Instance, SearchPlan)]) -> Verdict {
    let mut worst: f64 = 0.0;
    for (inst, plan) in plans {
        let rec = recursive_cost(inst, plan).expect("recursive");
        let closed = closed_form_cost(inst, plan).expect("closed form");
        let outcomes = enumerate_outcomes(inst, plan).expect("outcomes");
        worst = worst.max((rec - closed).abs()).max((rec - outcomes).abs());
    }
    (worst <= ALPHA_TOL, format!("{} plans, worst gap {worst:.3e}", plans.len()))
}

fn criterion_3(plans: &[(Instance, SearchPlan)]) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut defined = 0;
    for (inst, plan) in plans {
        let steps = trace_plan(inst, plan).expect("trace");
        let cb = expected_cost(inst, plan).expect("cost");
        let last = steps.last().expect("start step");
        let beta = last.beta;
        let t: f64 = steps.iter().map(|s| s.travel).sum();
        let rhs = match decompose(inst, plan) {
            Ok(d) => {
                defined += 1;
                d.success_time.unwrap() * d.rho + d.rho_bar * (t + beta)
            }
            Err(_) => t + beta,
        };
        worst = worst.max((cb.alpha - rhs).abs());
    }
    (
        worst <= ALPHA_TOL,
        format!("{} plans ({defined} with success possible), worst gap {worst:.3e}", plans.len()),
    )
}

fn criterion_4() -> Verdict {
    let mut failures = Vec::new();
    let mut differ = 0;
    for s in 0..NEIGHBOUR_INSTANCES {
        let co = neighbour_family(s);
        let dn = with_action_space(&co, ActionSpace::DirectNeighbors);
        let a = le(&co, DominanceMode::Exact);
        let b = le(&dn, DominanceMode::Exact);
        if (a.cost.alpha - b.cost.alpha).abs() > ALPHA_TOL {
            failures.push(format!("seed {s} ({:?}): co {} dn {}", co.variant, a.cost.alpha, b.cost.alpha));
        }
        if a.plan.visits != b.plan.visits {
            differ += 1;
        }
    }
    (
        failures.is_empty(),
        format!("{NEIGHBOUR_INSTANCES} instances, {differ} with a different visit order, mismatches {failures:?}"),
    )
}

fn criterion_5() -> Verdict {
    let mut failures = Vec::new();
    let mut fewer = 0;
    for s in 0..ORACLE_INSTANCES {
        let inst = oracle_family(s);
        let exact = le(&inst, DominanceMode::Exact);
        let sharp = le(&inst, DominanceMode::Sharpened);
        if (exact.cost.alpha - sharp.cost.alpha).abs() > ALPHA_TOL {
            failures.push(format!("seed {s}: exact {} sharpened {}", exact.cost.alpha, sharp.cost.alpha));
        }
        if sharp.stats.labels_created <= exact.stats.labels_created {
            fewer += 1;
        }
    }
    let share = fewer as f64 / ORACLE_INSTANCES as f64;
    (
        failures.is_empty() && share >= SHARPENED_LABEL_SHARE,
        format!("label counts not larger on {:.1}% of instances, alpha mismatches {failures:?}", share * 100.0),
    )
}

fn criterion_6() -> Verdict {
    let mut failures = Vec::new();
    let opts = SolveOptions::default();
    for s in 0..ORACLE_INSTANCES {
        let inst = oracle_family(s);
        let best = solve(&inst, Algorithm::Le, &opts).expect("le").cost.alpha;
        for algo in [Algorithm::Lh, Algorithm::Ro, Algorithm::Greedy, Algorithm::Naive] {
            let alpha = solve(&inst, algo, &opts).expect("heuristic").cost.alpha;
            if best > alpha + ALPHA_TOL {
                failures.push(format!("seed {s}: le {best} > {} {alpha}", algo.name()));
            }
        }
    }
    (failures.is_empty(), format!("{ORACLE_INSTANCES} instances, violations {failures:?}"))
}

fn criterion_7() -> Verdict {
    let mut failures = Vec::new();
    let mut waiting = 0;
    let mut worst_z: f64 = 0.0;
    for i in 0..MC_PLANS {
        let inst = evaluation_family(i);
        let plan = random_plan(&inst, &mut rng(7000 + i), EVAL_MAX_VISITS);
        let alpha = expected_cost(&inst, &plan).unwrap().alpha;
        let report = run_experiment(&inst, &[("plan".into(), plan.clone())], MC_RUNS, MC_SEED + i).unwrap();
        let m = &report.algorithms[0];
        let bound = MC_SIGMAS * m.std_realized_cost / (MC_RUNS as f64).sqrt();
        let err = (m.mean_realized_cost - alpha).abs();
        if m.std_realized_cost > 0.0 {
            worst_z = worst_z.max(err / (m.std_realized_cost / (MC_RUNS as f64).sqrt()));
        }
        if err > bound + ALPHA_TOL {
            failures.push(format!("plan {i}: mean {} alpha {alpha}", m.mean_realized_cost));
        }
        if inst.variant.waits() && plan.visits.len() > 1 {
            waiting += 1;
            if m.success_rate != 1.0 {
                failures.push(format!("plan {i}: waiting plan succeeded in {}", m.success_rate));
            }
        }
    }
    (
        failures.is_empty(),
        format!("{MC_PLANS} plans x {MC_RUNS} runs, {waiting} waiting plans, worst |z| {worst_z:.2}, failures {failures:?}"),
    )
}

fn criterion_8() -> Verdict {
    let mut failures = Vec::new();
    for i in 0..TSP_CASES {
        let n = 4 + (i % 2) as usize;
        let d = random_metric(n, &mut rng(8000 + i));
        let opt = shortest_tour(&d);
        let delta = d.iter().flatten().copied().fold(0.0, f64::max);
        let q = (q_lower_bound(delta, n) + 1.0) / 2.0;
        for theta in [opt, opt - 1.0] {
            let red = reduce_tsp(&d, 0, q, theta).expect("reduction");
            let alpha = enumerate_optimal(&red.instance, 8).expect("oracle").best_alpha;
            let tour_exists = opt <= theta;
            let below = alpha <= red.scaled_threshold * (1.0 + ALPHA_TOL);
            if tour_exists != below {
                failures.push(format!(
                    "case {i} theta {theta}: tour {tour_exists}, alpha {alpha} vs {}",
                    red.scaled_threshold
                ));
            }
        }
    }
    (failures.is_empty(), format!("{TSP_CASES} metric TSPs, two thresholds each, failures {failures:?}"))
}

fn criterion_9() -> Verdict {
    let mut notes = Vec::new();
    for &(p, mu_inv) in &[(0.5, 120.0), (0.15, 30.0), (0.9, 600.0), (0.6, 5.0)] {
        if recovery_probability(p, mu_inv, 0.0) != 0.0 {
            notes.push(format!("r(0) != 0 for p={p}"));
        }
        let mut prev = 0.0;
        for k in 1..=2000 {
            let r = recovery_probability(p, mu_inv, k as f64 * 0.5);
            if r < prev {
                notes.push(format!("not monotone at p={p} delta={}", k as f64 * 0.5));
                break;
            }
            prev = r;
        }
        let far = recovery_probability(p, mu_inv, 1e6);
        if (far - p).abs() > RECOVERY_TOL {
            notes.push(format!("r(1e6) = {far} for p={p}"));
        }
    }
    // 0 -> 1 -> 2 -> 1 returns to station 1 exactly 120 minutes after seeing it
    let mut inst = scps::fixtures::tri_station(Variant::A);
    inst.travel = vec![
        vec![0.0, 2.0, 61.0],
        vec![2.0, 0.0, 60.0],
        vec![61.0, 60.0, 0.0],
    ];
    inst.t_max = 400.0;
    inst.recovery = true;
    for s in inst.stations.iter_mut().skip(1) {
        s.mu_inv = Some(120.0);
    }
    let plan = SearchPlan::new(vec![0, 1, 2, 1], false);
    let want = 0.5 * (1.0 - (-2.0f64).exp());
    let steps = trace_plan(&inst, &plan).expect("recovery plan");
    let got = steps[3].p_eff;
    if (got - want).abs() > RECOVERY_TOL {
        notes.push(format!("revisit availability {got}, want {want}"));
    }
    // alpha by hand: 2 + 0.5*60 + 0.25*60 + 0.25*(1-want)*beta
    let hand = 2.0 + 0.5 * 60.0 + 0.25 * 60.0 + 0.25 * (1.0 - want) * inst.beta_bar;
    let alpha = expected_cost(&inst, &plan).unwrap().alpha;
    if (alpha - hand).abs() > ALPHA_TOL {
        notes.push(format!("alpha {alpha}, by hand {hand}"));
    }
    (notes.is_empty(), format!("revisit availability {got:.12}, issues {notes:?}"))
}

fn criterion_10() -> Verdict {
    let mut notes = Vec::new();
    let mut summary = Vec::new();
    for variant in Variant::ALL {
        let mut pooled = [0.0; 4];
        let mut lh_ahead = 0;
        for seed in 0..SCALE_SEEDS {
            let cfg = GenConfig {
                n_stations: SCALE_CHARGERS,
                layout: Layout::UniformSquare { side_m: 5000.0 },
                availability: Availability::Low,
                seed: 100 + seed,
                ..GenConfig::default()
            };
            let inst = generate(&cfg, variant).expect("instance");
            let mut plans = Vec::new();
            for algo in [Algorithm::Lh, Algorithm::Ro, Algorithm::Greedy, Algorithm::Naive] {
                let target = algo
                    .preferred_action_space(variant)
                    .map_or_else(|| inst.clone(), |s| with_action_space(&inst, s));
                let out = solve(&target, algo, &SolveOptions::default()).expect("solve");
                plans.push((algo.name().to_string(), out.plan));
            }
            let report = run_experiment(&inst, &plans, SCALE_RUNS, 900 + seed).expect("simulate");
            for (j, m) in report.algorithms.iter().enumerate() {
                pooled[j] += m.mean_realized_cost / SCALE_SEEDS as f64;
            }
            if report.algorithms[0].success_rate >= report.algorithms[3].success_rate {
                lh_ahead += 1;
            }
        }
        let [lh, ro, g, n] = pooled;
        if lh > g || lh > n || ro > g || ro > n {
            notes.push(format!("{}: lh {lh:.2} ro {ro:.2} g {g:.2} n {n:.2}", format!("{variant:?}")));
        }
        if !variant.waits() && lh_ahead < SCALE_MIN_SEEDS {
            notes.push(format!("{}: lh success >= naive on {lh_ahead} seeds", format!("{variant:?}")));
        }
        summary.push(format!(
            "{} lh {lh:.1} ro {ro:.1} g {g:.1} n {n:.1} (lh success ahead {lh_ahead}/{SCALE_SEEDS})",
            format!("{variant:?}")
        ));
    }
    (notes.is_empty(), format!("{}; issues {notes:?}", summary.join(", ")))
}

fn solve_bytes(inst: &Instance, algo: Algorithm) -> String {
    let mut out = solve(inst, algo, &SolveOptions::default()).expect("solve");
    out.stats.clear_runtime();
    serde_json::to_string(&out).unwrap()
}

fn criterion_11() -> Verdict {
    let mut notes = Vec::new();
    for s in [0u64, 5, 17, 42, 101, 199] {
        let inst = oracle_family(s);
        for algo in Algorithm::ALL {
            if solve_bytes(&inst, algo) != solve_bytes(&inst, algo) {
                notes.push(format!("{} on seed {s}", algo.name()));
            }
        }
        let plans: Vec<(String, SearchPlan)> = [Algorithm::Le, Algorithm::Greedy]
            .iter()
            .map(|&a| (a.name().to_string(), solve(&inst, a, &SolveOptions::default()).unwrap().plan))
            .collect();
        let once = serde_json::to_string(&run_experiment(&inst, &plans, 2000, s).unwrap()).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let single = pool.install(|| serde_json::to_string(&run_experiment(&inst, &plans, 2000, s).unwrap()).unwrap());
        if once != single {
            notes.push(format!("simulate on seed {s}"));
        }
    }
    let a = generate(&GenConfig::default(), Variant::D).unwrap().to_json_string();
    let b = generate(&GenConfig::default(), Variant::D).unwrap().to_json_string();
    if a != b {
        notes.push("generator".into());
    }
    (notes.is_empty(), format!("solvers, simulation and generator repeat exactly; differences {notes:?}"))
}

fn main() {
    let plans = evaluation_plans();
    let results: Vec<(u32, Verdict)> = vec![
        (1, criterion_1()),
        (2, criterion_2(&plans)),
        (3, criterion_3(&plans)),
        (4, criterion_4()),
        (5, criterion_5()),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, criterion_8()),
        (9, criterion_9()),
        (10, criterion_10()),
        (11, criterion_11()),
    ];
    let mut failed = Vec::new();
    for (id, (ok, detail)) in &results {
        println!("criterion {id:>2}: {} {detail}", if *ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(*id);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
