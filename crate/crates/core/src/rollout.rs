//! One-step lookahead rollout with the greedy policy as base heuristic.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::baselines::{greedy_choice, greedy_score, moves};
use crate::error::Result;
use crate::instance::{Instance, SearchPlan, StationId, Topology};
use crate::mdp::{expected_cost, CostBreakdown, Walk};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasePolicy {
    #[default]
    GreedyScore,
    Nearest,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RolloutConfig {
    /// Epochs the base policy is expanded for; `None` runs to forced termination.
    pub lookahead: Option<usize>,
    pub base_policy: BasePolicy,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RolloutStats {
    pub epochs: u64,
    pub candidate_evaluations: u64,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RolloutOutcome {
    pub plan: SearchPlan,
    pub cost: CostBreakdown,
    pub stats: RolloutStats,
}

fn base_choice(inst: &Instance, topo: &Topology, walk: &Walk, policy: BasePolicy) -> Option<StationId> {
    match policy {
        BasePolicy::GreedyScore => greedy_choice(inst, topo, walk).map(|(c, _)| c),
        BasePolicy::Nearest => {
            let cur = walk.current();
            moves(inst, topo, walk).into_iter().min_by(|&a, &b| {
                let fresh = |c| walk.visited.contains(c);
                fresh(a)
                    .cmp(&fresh(b))
                    .then(inst.travel(cur, a).total_cmp(&inst.travel(cur, b)))
                    .then(a.cmp(&b))
            })
        }
    }
}

/// Cost-to-go of the base policy from `walk`, given the current station is occupied.
pub fn greedy_cost(inst: &Instance, topo: &Topology, walk: &Walk, cfg: &RolloutConfig) -> f64 {
    let mut w = walk.clone();
    let mut steps = Vec::new();
    let limit = cfg.lookahead.unwrap_or(usize::MAX);
    while steps.len() < limit {
        let Some(c) = base_choice(inst, topo, &w, cfg.base_policy) else {
            break;
        };
        // the greedy base stops exactly where the greedy baseline would
        if cfg.base_policy == BasePolicy::GreedyScore && stop_value(inst, &w).is_some_and(|b| b < greedy_score(&w.peek(inst, c))) {
            break;
        }
        steps.push(w.advance(inst, c));
    }
    let mut v = match steps.last() {
        Some(s) => s.beta,
        None => inst.beta_at(walk.current(), walk.depleted(inst)),
    };
    for s in steps.iter().rev() {
        v = s.travel + s.p_eff * s.gamma + (1.0 - s.p_eff) * v;
    }
    v
}

/// Cost of waiting where the walk stands, when waiting is allowed.
fn stop_value(inst: &Instance, walk: &Walk) -> Option<f64> {
    (inst.variant.waits() && walk.current() != 0).then(|| inst.beta_at(walk.current(), walk.depleted(inst)))
}

/// Q-factor of moving to `c`: arc cost plus the base policy's value afterwards.
pub fn q_value(inst: &Instance, topo: &Topology, walk: &Walk, c: StationId, cfg: &RolloutConfig) -> f64 {
    let step = walk.peek(inst, c);
    let mut next = walk.clone();
    next.advance(inst, c);
    step.travel + step.p_eff * step.gamma + (1.0 - step.p_eff) * greedy_cost(inst, topo, &next, cfg)
}

/// Cut a finished visit sequence at the first stage where waiting beats going on.
pub fn refine_policy(inst: &Instance, visits: &[StationId]) -> SearchPlan {
    if visits.len() < 2 {
        return SearchPlan::new(visits.to_vec(), false);
    }
    let mut walk = Walk::start(inst);
    let steps: Vec<_> = visits[1..].iter().map(|&c| walk.advance(inst, c)).collect();
    let n = steps.len();
    let mut v = steps[n - 1].beta;
    let mut cut = n;
    for k in (0..n - 1).rev() {
        let s = &steps[k + 1];
        let go_on = s.travel + s.p_eff * s.gamma + (1.0 - s.p_eff) * v;
        if steps[k].beta < go_on {
            v = steps[k].beta;
            cut = k + 1;
        } else {
            v = go_on;
        }
    }
    SearchPlan::new(visits[..=cut].to_vec(), true)
}

pub fn solve(inst: &Instance, cfg: &RolloutConfig) -> Result<RolloutOutcome> {
    let started = Instant::now();
    inst.ensure_valid()?;
    let topo = inst.topology();
    let mut stats = RolloutStats::default();
    let mut walk = Walk::start(inst);
    loop {
        let options = moves(inst, &topo, &walk);
        let mut best: Option<(StationId, f64)> = None;
        for c in options {
            stats.candidate_evaluations += 1;
            let q = q_value(inst, &topo, &walk, c, cfg);
            if best.is_none_or(|(_, b)| q < b) {
                best = Some((c, q));
            }
        }
        let Some((c, q)) = best else { break };
        if stop_value(inst, &walk).is_some_and(|b| b <= q) {
            break;
        }
        walk.advance(inst, c);
        stats.epochs += 1;
    }
    let plan = if inst.variant.waits() {
        refine_policy(inst, &walk.visits)
    } else {
        SearchPlan::new(walk.visits, false)
    };
    let cost = expected_cost(inst, &plan)?;
    stats.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(RolloutOutcome { plan, cost, stats })
}
