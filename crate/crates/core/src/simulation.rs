//! Monte-Carlo evaluation of plans on sampled availability realizations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpsError};
use crate::instance::{ActionSpace, Instance, SearchPlan, SCHEMA_VERSION};
use crate::mdp::trace_plan;

/// Name of the generator behind realizations, recorded in reports.
pub const RNG_NAME: &str = "ChaCha8Rng";

/// Per-run seed: SplitMix64 finalizer over the master seed offset by the run index.
pub fn run_seed(master_seed: u64, run_index: u64) -> u64 {
    let mut z = master_seed.wrapping_add(run_index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    /// Availability per vertex; the start is never available.
    pub available: Vec<bool>,
    pub seed: u64,
}

impl Realization {
    pub fn sample(inst: &Instance, master_seed: u64, run_index: u64) -> Realization {
        let seed = run_seed(master_seed, run_index);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut available = vec![false; inst.n()];
        for c in inst.chargers() {
            available[c] = rng.random::<f64>() < inst.stations[c].p;
        }
        Realization { available, seed }
    }
}

/// Drive the plan under one realization: stop at the first free station.
/// Returns the realized cost and whether the search succeeded.
pub fn execute(plan: &SearchPlan, realization: &Realization, inst: &Instance) -> (f64, bool) {
    let mut cost = 0.0;
    let mut prev = 0;
    let mut soc = inst.initial_soc();
    let mut seen = vec![false; inst.n()];
    for &c in plan.visits.iter().skip(1) {
        cost += inst.travel(prev, c);
        soc -= inst.arc_energy(prev, c);
        // a station found occupied stays occupied for the rest of the search
        if !seen[c] && realization.available[c] {
            return (cost + inst.gamma_at(c, inst.initial_soc() - soc), true);
        }
        seen[c] = true;
        prev = c;
    }
    let penalty = inst.beta_at(prev, inst.initial_soc() - soc);
    (cost + penalty, prev != 0 && inst.variant.waits())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmMetrics {
    pub algorithm: String,
    pub mean_realized_cost: f64,
    pub std_realized_cost: f64,
    pub avg_deviation: f64,
    pub success_rate: f64,
    pub max_cost: f64,
    pub max_deviation: f64,
    pub runs: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema: u32,
    pub master_seed: u64,
    pub rng: String,
    pub runs: u64,
    pub algorithms: Vec<AlgorithmMetrics>,
}

impl MetricsReport {
    pub const CSV_HEADER: &'static str =
        "algorithm,runs,mean_realized_cost,std_realized_cost,avg_deviation,success_rate,max_cost,max_deviation";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for m in &self.algorithms {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                m.algorithm,
                m.runs,
                m.mean_realized_cost,
                m.std_realized_cost,
                m.avg_deviation,
                m.success_rate,
                m.max_cost,
                m.max_deviation
            ));
        }
        out
    }

    pub fn get(&self, name: &str) -> Option<&AlgorithmMetrics> {
        self.algorithms.iter().find(|m| m.algorithm == name)
    }
}

/// Relative gap to a reference cost. A zero reference falls back to a
/// one-minute denominator so the gap stays finite.
fn relative_gap(cost: f64, reference: f64) -> f64 {
    if reference > 0.0 {
        (cost - reference) / reference
    } else {
        cost - reference
    }
}

/// Simulate every named plan on the same `n_runs` realizations.
pub fn run_experiment(
    inst: &Instance,
    plans: &[(String, SearchPlan)],
    n_runs: u64,
    master_seed: u64,
) -> Result<MetricsReport> {
    if plans.is_empty() {
        return Err(ScpsError::InvalidParameter("no algorithms to simulate".into()));
    }
    if n_runs == 0 {
        return Err(ScpsError::InvalidParameter("runs must be at least 1".into()));
    }
    if inst.recovery {
        return Err(ScpsError::InvalidParameter(
            "simulation of recovering stations is not supported".into(),
        ));
    }
    // plans may come from different action spaces; only budget, energy and
    // the no-return rule matter when driving them, and DN allows transits
    let driving = Instance {
        action_space: ActionSpace::DirectNeighbors,
        ..inst.clone()
    };
    for (_, plan) in plans {
        trace_plan(&driving, plan)?;
    }
    let outcomes: Vec<Vec<(f64, bool)>> = (0..n_runs)
        .into_par_iter()
        .map(|i| {
            let r = Realization::sample(inst, master_seed, i);
            plans.iter().map(|(_, p)| execute(p, &r, inst)).collect()
        })
        .collect();
    let k = plans.len();
    let n = n_runs as f64;
    let mut sum = vec![0.0; k];
    let mut sum_sq = vec![0.0; k];
    let mut dev = vec![0.0; k];
    let mut wins = vec![0u64; k];
    let mut max_cost = vec![f64::NEG_INFINITY; k];
    for run in &outcomes {
        let best = run.iter().map(|o| o.0).fold(f64::INFINITY, f64::min);
        for (j, &(cost, ok)) in run.iter().enumerate() {
            sum[j] += cost;
            sum_sq[j] += cost * cost;
            dev[j] += relative_gap(cost, best);
            wins[j] += ok as u64;
            max_cost[j] = max_cost[j].max(cost);
        }
    }
    let best_max = max_cost.iter().copied().fold(f64::INFINITY, f64::min);
    let algorithms = plans
        .iter()
        .enumerate()
        .map(|(j, (name, _))| {
            let mean = sum[j] / n;
            let var = if n_runs > 1 {
                ((sum_sq[j] - n * mean * mean) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            AlgorithmMetrics {
                algorithm: name.clone(),
                mean_realized_cost: mean,
                std_realized_cost: var.sqrt(),
                avg_deviation: dev[j] / n,
                success_rate: wins[j] as f64 / n,
                max_cost: max_cost[j],
                max_deviation: 1.0 + relative_gap(max_cost[j], best_max),
                runs: n_runs,
            }
        })
        .collect();
    Ok(MetricsReport {
        schema: SCHEMA_VERSION,
        master_seed,
        rng: RNG_NAME.to_string(),
        runs: n_runs,
        algorithms,
    })
}
