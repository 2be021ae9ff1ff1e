//! Brute-force references: optimal plan by exhaustive enumeration, and exact
//! expectation by summing over every availability outcome.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpsError};
use crate::instance::{Instance, SearchPlan, StationId, Topology};
use crate::mdp::{expected_cost, Walk};
use crate::simulation::{execute, Realization};

pub const DEFAULT_MAX_CHARGERS: usize = 8;
pub const MAX_OUTCOME_CHARGERS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best_plan: SearchPlan,
    pub best_alpha: f64,
    pub plans_enumerated: u64,
}

struct Search<'a> {
    inst: &'a Instance,
    topo: Topology,
    max_depth: usize,
    best: Option<(f64, SearchPlan)>,
    count: u64,
}

impl Search<'_> {
    fn record(&mut self, plan: SearchPlan) -> Result<()> {
        let alpha = expected_cost(self.inst, &plan)?.alpha;
        self.count += 1;
        if self.best.as_ref().is_none_or(|(b, _)| alpha < *b) {
            self.best = Some((alpha, plan));
        }
        Ok(())
    }

    fn dfs(&mut self, walk: &mut Walk) -> Result<()> {
        if walk.visits.len() > self.max_depth {
            return Err(ScpsError::ContractViolation("plan longer than the depth bound".into()));
        }
        let actions = self.inst.successors(&self.topo, &walk.view());
        if actions.is_empty() {
            return self.record(SearchPlan::new(walk.visits.clone(), false));
        }
        for a in actions {
            if a.wait {
                let mut visits = walk.visits.clone();
                if a.station != walk.current() {
                    visits.push(a.station);
                }
                self.record(SearchPlan::new(visits, true))?;
            } else {
                let saved = walk.clone();
                walk.advance(self.inst, a.station);
                self.dfs(walk)?;
                *walk = saved;
            }
        }
        Ok(())
    }
}

/// Minimum expected cost over every plan the instance's action space allows.
pub fn enumerate_optimal(inst: &Instance, max_chargers: usize) -> Result<OracleResult> {
    inst.ensure_valid()?;
    if inst.charger_count() > max_chargers {
        return Err(ScpsError::CapExceeded {
            what: "chargers",
            actual: inst.charger_count(),
            cap: max_chargers,
        });
    }
    // no plan outlasts the budget divided by the shortest arc
    let t_lo = inst.min_travel();
    let revisits = inst.recovery || inst.action_space.is_direct();
    let max_depth = match (revisits, t_lo > 0.0) {
        (false, _) => inst.n() + 1,
        (true, true) => (inst.t_max / t_lo).floor() as usize + 2,
        (true, false) => 4 * inst.n() + 8,
    };
    let mut s = Search {
        inst,
        topo: inst.topology(),
        max_depth,
        best: None,
        count: 0,
    };
    s.dfs(&mut Walk::start(inst))?;
    let (best_alpha, best_plan) = s.best.expect("the root always yields a plan");
    Ok(OracleResult {
        best_plan,
        best_alpha,
        plans_enumerated: s.count,
    })
}

/// Exact expected cost of `plan` as a probability-weighted sum of realized costs.
pub fn enumerate_outcomes(inst: &Instance, plan: &SearchPlan) -> Result<f64> {
    if inst.recovery {
        return Err(ScpsError::InvalidParameter(
            "outcome enumeration assumes static availabilities".into(),
        ));
    }
    crate::mdp::trace_plan(inst, plan)?;
    let mut distinct: Vec<StationId> = Vec::new();
    for &c in plan.visits.iter().skip(1) {
        if !distinct.contains(&c) {
            distinct.push(c);
        }
    }
    if distinct.len() > MAX_OUTCOME_CHARGERS {
        return Err(ScpsError::CapExceeded {
            what: "distinct chargers in plan",
            actual: distinct.len(),
            cap: MAX_OUTCOME_CHARGERS,
        });
    }
    let mut total = 0.0;
    for mask in 0u32..(1 << distinct.len()) {
        let mut available = vec![false; inst.n()];
        let mut prob = 1.0;
        for (bit, &c) in distinct.iter().enumerate() {
            let p = inst.stations[c].p;
            if mask >> bit & 1 == 1 {
                available[c] = true;
                prob *= p;
            } else {
                prob *= 1.0 - p;
            }
        }
        if prob == 0.0 {
            continue;
        }
        let (cost, _) = execute(plan, &Realization { available, seed: 0 }, inst);
        total += prob * cost;
    }
    Ok(total)
}
