//! One entry point over all algorithms, with uniform JSON output.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::baselines::{greedy_solve, naive_solve};
use crate::error::{Result, ScpsError};
use crate::instance::{ActionSpace, Instance, SearchPlan, Variant, DEFAULT_TR_MINUTES, SCHEMA_VERSION};
use crate::labeling::{self, DominanceMode, LabelingConfig, LabelingStats};
use crate::mdp::{expected_cost, CostBreakdown};
use crate::rollout::{self, RolloutConfig, RolloutStats};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Le,
    Lh,
    Ro,
    Greedy,
    Naive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Le,
        Algorithm::Lh,
        Algorithm::Ro,
        Algorithm::Greedy,
        Algorithm::Naive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Le => "le",
            Algorithm::Lh => "lh",
            Algorithm::Ro => "ro",
            Algorithm::Greedy => "greedy",
            Algorithm::Naive => "naive",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        match s.to_ascii_lowercase().as_str() {
            "le" => Some(Algorithm::Le),
            "lh" => Some(Algorithm::Lh),
            "ro" => Some(Algorithm::Ro),
            "greedy" | "g" => Some(Algorithm::Greedy),
            "naive" | "n" => Some(Algorithm::Naive),
            _ => None,
        }
    }

    /// Action space each heuristic performs best with per variant; `None`
    /// keeps the instance's own.
    pub fn preferred_action_space(self, variant: Variant) -> Option<ActionSpace> {
        let tr = ActionSpace::TimeRestricted { t_r: DEFAULT_TR_MINUTES };
        match (self, variant) {
            (Algorithm::Lh, Variant::A | Variant::B) => Some(ActionSpace::DirectNeighbors),
            (Algorithm::Lh, Variant::C) => Some(tr),
            (Algorithm::Lh, Variant::D) => Some(ActionSpace::Complete),
            (Algorithm::Ro, Variant::B) => Some(ActionSpace::DirectNeighbors),
            (Algorithm::Ro, _) => Some(ActionSpace::Complete),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    /// Overrides the algorithm's default dominance (LE: exact, LH: heuristic).
    pub dominance: Option<DominanceMode>,
    pub time_limit: Option<Duration>,
    pub max_labels: Option<u64>,
    pub rollout: RolloutConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SolverStats {
    Labeling(LabelingStats),
    Rollout(RolloutStats),
    Baseline { runtime_ms: f64 },
}

impl SolverStats {
    pub fn runtime_ms(&self) -> f64 {
        match self {
            SolverStats::Labeling(s) => s.runtime_ms,
            SolverStats::Rollout(s) => s.runtime_ms,
            SolverStats::Baseline { runtime_ms } => *runtime_ms,
        }
    }

    pub fn clear_runtime(&mut self) {
        match self {
            SolverStats::Labeling(s) => s.runtime_ms = 0.0,
            SolverStats::Rollout(s) => s.runtime_ms = 0.0,
            SolverStats::Baseline { runtime_ms } => *runtime_ms = 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub schema: u32,
    pub algorithm: Algorithm,
    pub action_space: ActionSpace,
    pub plan: SearchPlan,
    pub cost: CostBreakdown,
    pub stats: SolverStats,
}

/// Run `algo` on the instance as given (its action space included).
pub fn solve(inst: &Instance, algo: Algorithm, opts: &SolveOptions) -> Result<SolveOutput> {
    let started = Instant::now();
    let labeling = |default: DominanceMode| -> Result<(SearchPlan, CostBreakdown, SolverStats)> {
        let cfg = LabelingConfig {
            mode: opts.dominance.unwrap_or(default),
            time_limit: opts.time_limit,
            max_labels: opts.max_labels,
        };
        let out = labeling::solve(inst, &cfg)?;
        Ok((out.plan, out.cost, SolverStats::Labeling(out.stats)))
    };
    let baseline = |plan: SearchPlan| -> Result<(SearchPlan, CostBreakdown, SolverStats)> {
        let cost = expected_cost(inst, &plan)?;
        let runtime_ms = started.elapsed().as_secs_f64() * 1e3;
        Ok((plan, cost, SolverStats::Baseline { runtime_ms }))
    };
    let (plan, cost, stats) = match algo {
        Algorithm::Le => {
            if opts.dominance.is_some_and(|m| !m.is_exact()) {
                return Err(ScpsError::InvalidParameter(
                    "le needs an exact dominance mode; use lh for heuristic pruning".into(),
                ));
            }
            labeling(DominanceMode::Exact)?
        }
        Algorithm::Lh => labeling(DominanceMode::Heuristic)?,
        Algorithm::Ro => {
            let out = rollout::solve(inst, &opts.rollout)?;
            (out.plan, out.cost, SolverStats::Rollout(out.stats))
        }
        Algorithm::Greedy => baseline(greedy_solve(inst)?)?,
        Algorithm::Naive => baseline(naive_solve(inst)?)?,
    };
    Ok(SolveOutput {
        schema: SCHEMA_VERSION,
        algorithm: algo,
        action_space: inst.action_space,
        plan,
        cost,
        stats,
    })
}

/// Copy of the instance using another action space.
pub fn with_action_space(inst: &Instance, space: ActionSpace) -> Instance {
    Instance {
        action_space: space,
        ..inst.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::tri_station;

    #[test]
    fn all_algorithms_on_fixture() {
        let inst = tri_station(Variant::A);
        for algo in Algorithm::ALL {
            let out = solve(&inst, algo, &SolveOptions::default()).unwrap();
            assert!((out.cost.alpha - 6.0).abs() < 1e-12, "{algo:?}");
        }
    }

    #[test]
    fn le_rejects_heuristic_pruning() {
        let inst = tri_station(Variant::A);
        let opts = SolveOptions {
            dominance: Some(DominanceMode::Heuristic),
            ..SolveOptions::default()
        };
        assert!(solve(&inst, Algorithm::Le, &opts).is_err());
    }

    #[test]
    fn output_json_shape() {
        let out = solve(&tri_station(Variant::A), Algorithm::Le, &SolveOptions::default()).unwrap();
        let v = serde_json::to_value(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["cost"]["alpha"], 6.0);
        assert_eq!(v["algorithm"], "le");
        assert!(v["stats"]["labels_created"].as_u64().unwrap() > 0);
    }
}
