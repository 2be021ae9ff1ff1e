//! Expected-cost evaluation of search plans. Everything that reports an
//! alpha for a finished plan goes through [`expected_cost`].

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpsError};
use crate::instance::{
    Action, ActionSpace, Instance, SearchPlan, StateView, StationId, SOC_EPS,
};
use crate::station_set::StationSet;

/// Recursive and closed-form evaluations must agree this closely.
pub const EVAL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub alpha: f64,
    #[serde(rename = "A")]
    pub partial_cost: f64,
    pub rho: f64,
    pub rho_bar: f64,
    #[serde(rename = "t")]
    pub travel: f64,
    /// Expected time to success given that some station is free; undefined when rho = 0.
    #[serde(rename = "t_s")]
    pub success_time: Option<f64>,
}

/// MDP state: the visit sequence and whether the last station was free.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub visits: Vec<StationId>,
    pub available: bool,
    pub elapsed: f64,
    pub soc: Option<f64>,
}

/// Probability that an occupied station is free again `delta` minutes after it was seen.
pub fn recovery_probability(p: f64, mu_inv: f64, delta: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    p * (1.0 - (-(delta / mu_inv) / p).exp())
}

fn revisit_probability(inst: &Instance, c: StationId, last_arrival: f64, arrival: f64) -> f64 {
    if inst.recovery {
        let s = &inst.stations[c];
        recovery_probability(s.p, s.mu_inv.unwrap_or(f64::INFINITY), arrival - last_arrival)
    } else {
        0.0
    }
}

/// Availability of `candidate` when reached at `arrival_time` after `prefix`.
pub fn effective_probability(
    inst: &Instance,
    prefix: &[StationId],
    candidate: StationId,
    arrival_time: f64,
) -> Result<f64> {
    if candidate == 0 || candidate >= inst.n() {
        return Err(ScpsError::ContractViolation(format!("{candidate} is not a charger")));
    }
    let mut t = 0.0;
    let mut last = None;
    for (i, w) in prefix.windows(2).enumerate() {
        t += inst.travel(w[0], w[1]);
        if w[1] == candidate {
            last = Some((i + 1, t));
        }
    }
    match last {
        None => Ok(inst.stations[candidate].p),
        Some((_, seen)) if inst.recovery => Ok(revisit_probability(inst, candidate, seen, arrival_time)),
        Some(_) if !inst.variant.waits() && !inst.action_space.is_direct() => Err(
            ScpsError::ContractViolation(format!("revisit of {candidate} without recovery")),
        ),
        Some(_) => Ok(0.0),
    }
}

/// d(x, u): cost incurred when taking `action` in `state`.
pub fn immediate_cost(state: &State, action: Action, inst: &Instance) -> f64 {
    let ck = *state.visits.last().unwrap_or(&0);
    let depleted = state.soc.map_or(0.0, |b| inst.initial_soc() - b);
    let a = if state.available { 1.0 } else { 0.0 };
    let w = if action.wait { 1.0 } else { 0.0 };
    (1.0 - a) * w * inst.beta_at(ck, depleted)
        + a * inst.gamma_at(ck, depleted)
        + (1.0 - w) * (1.0 - a) * inst.travel(ck, action.station)
}

/// Charging time after `depleted` SoC, prorated on a linear charge curve.
pub fn adjusted_charge_time(inst: &Instance, depleted: f64, station: StationId) -> Result<f64> {
    let e = inst
        .energy
        .as_ref()
        .ok_or_else(|| ScpsError::ContractViolation("energy model disabled".into()))?;
    if depleted < 0.0 || depleted > e.b0 - e.b_min + SOC_EPS {
        return Err(ScpsError::InfeasibleArc(format!(
            "depletion {depleted} crosses the SoC floor {}",
            e.b_min
        )));
    }
    Ok(inst.charge_time(station, depleted))
}

/// One visited vertex of a plan, with everything the cost formulas need.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub station: StationId,
    /// Travel of the arc into this station (0 at the start).
    pub travel: f64,
    pub arrival: f64,
    pub p_eff: f64,
    pub gamma: f64,
    pub beta: f64,
    pub soc: f64,
}

/// Incremental walk along a visit sequence.
#[derive(Clone, Debug)]
pub struct Walk {
    pub visits: Vec<StationId>,
    pub elapsed: f64,
    pub soc: f64,
    pub visited: StationSet,
    pub last_arrival: Vec<f64>,
}

impl Walk {
    pub fn start(inst: &Instance) -> Walk {
        Walk {
            visits: vec![0],
            elapsed: 0.0,
            soc: inst.initial_soc(),
            visited: StationSet::empty(),
            last_arrival: vec![f64::NAN; inst.n()],
        }
    }

    pub fn current(&self) -> StationId {
        *self.visits.last().unwrap()
    }

    pub fn view(&self) -> StateView<'_> {
        StateView {
            current: self.current(),
            elapsed: self.elapsed,
            soc: self.soc,
            visited: &self.visited,
        }
    }

    pub fn depleted(&self, inst: &Instance) -> f64 {
        inst.initial_soc() - self.soc
    }

    /// Outcome of moving to `c` next, without moving.
    pub fn peek(&self, inst: &Instance, c: StationId) -> Step {
        let cur = self.current();
        let travel = inst.travel(cur, c);
        let arrival = self.elapsed + travel;
        let soc = self.soc - inst.arc_energy(cur, c);
        let depleted = inst.initial_soc() - soc;
        let p_eff = if self.visited.contains(c) {
            revisit_probability(inst, c, self.last_arrival[c], arrival)
        } else {
            inst.stations[c].p
        };
        Step {
            station: c,
            travel,
            arrival,
            p_eff,
            gamma: inst.gamma_at(c, depleted),
            beta: inst.beta_at(c, depleted),
            soc,
        }
    }

    pub fn advance(&mut self, inst: &Instance, c: StationId) -> Step {
        let step = self.peek(inst, c);
        self.visits.push(c);
        self.elapsed = step.arrival;
        self.soc = step.soc;
        self.visited.insert(c);
        self.last_arrival[c] = step.arrival;
        step
    }
}

fn check_revisits(inst: &Instance, plan: &SearchPlan) -> Result<()> {
    let v = &plan.visits;
    let mut seen = StationSet::empty();
    for (i, &c) in v.iter().enumerate().skip(1) {
        if c == 0 {
            return Err(ScpsError::InfeasiblePlan("plan returns to the start".into()));
        }
        if seen.contains(c) {
            let last = i + 1 == v.len();
            let ok = (inst.recovery && inst.action_space != ActionSpace::DirectNeighborsRestricted)
                || inst.action_space == ActionSpace::DirectNeighbors
                || (inst.variant.waits() && last && plan.wait_at_end);
            if !ok {
                return Err(ScpsError::InfeasiblePlan(format!("illegal revisit of station {c}")));
            }
        }
        seen.insert(c);
    }
    Ok(())
}

/// Per-vertex data of a plan after checking its feasibility.
pub fn trace_plan(inst: &Instance, plan: &SearchPlan) -> Result<Vec<Step>> {
    if plan.visits.first() != Some(&0) {
        return Err(ScpsError::InfeasiblePlan("visits must start at station 0".into()));
    }
    if let Some(&bad) = plan.visits.iter().find(|&&c| c >= inst.n()) {
        return Err(ScpsError::InfeasiblePlan(format!("unknown station {bad}")));
    }
    if plan.wait_at_end && (!inst.variant.waits() || plan.visits.len() < 2) {
        return Err(ScpsError::InfeasiblePlan("wait at end needs a waiting variant and a charger".into()));
    }
    check_revisits(inst, plan)?;
    let mut walk = Walk::start(inst);
    let mut steps = vec![Step {
        station: 0,
        travel: 0.0,
        arrival: 0.0,
        p_eff: 0.0,
        gamma: 0.0,
        beta: inst.beta_at(0, 0.0),
        soc: walk.soc,
    }];
    for &c in &plan.visits[1..] {
        steps.push(walk.advance(inst, c));
    }
    if walk.elapsed > inst.t_max {
        return Err(ScpsError::InfeasiblePlan(format!(
            "travel {} exceeds budget {}",
            walk.elapsed, inst.t_max
        )));
    }
    if inst.energy.is_some() && walk.soc < inst.soc_floor() - SOC_EPS {
        return Err(ScpsError::InfeasiblePlan("state of charge drops below floor".into()));
    }
    Ok(steps)
}

/// Forward accumulation of A, rho_bar and the success-time numerator.
fn forward(steps: &[Step]) -> CostBreakdown {
    let mut a = 0.0;
    let mut rho_bar = 1.0;
    let mut ts_num = 0.0;
    for s in steps {
        a += rho_bar * (s.travel + s.p_eff * s.gamma);
        ts_num += rho_bar * s.p_eff * (s.arrival + s.gamma);
        rho_bar *= 1.0 - s.p_eff;
    }
    let last = steps.last().expect("plan has a start");
    let rho = 1.0 - rho_bar;
    CostBreakdown {
        alpha: a + rho_bar * last.beta,
        partial_cost: a,
        rho,
        rho_bar,
        travel: last.arrival,
        success_time: (rho > 0.0).then(|| ts_num / rho),
    }
}

/// Backward recursion V_k = t + p~ gamma + (1 - p~) V_{k+1}, V_n = beta.
fn backward(steps: &[Step]) -> f64 {
    let last = steps.last().expect("plan has a start");
    let mut v = last.beta;
    for s in steps.iter().rev() {
        v = s.p_eff * s.gamma + (1.0 - s.p_eff) * v;
        v += s.travel;
    }
    v
}

pub fn closed_form_cost(inst: &Instance, plan: &SearchPlan) -> Result<f64> {
    Ok(forward(&trace_plan(inst, plan)?).alpha)
}

pub fn recursive_cost(inst: &Instance, plan: &SearchPlan) -> Result<f64> {
    Ok(backward(&trace_plan(inst, plan)?))
}

/// Expected cost of a plan with its A / rho / t breakdown.
pub fn expected_cost(inst: &Instance, plan: &SearchPlan) -> Result<CostBreakdown> {
    let steps = trace_plan(inst, plan)?;
    let cb = forward(&steps);
    let rec = backward(&steps);
    if (rec - cb.alpha).abs() > EVAL_TOL * cb.alpha.abs().max(1.0) {
        return Err(ScpsError::ContractViolation(format!(
            "recursive {rec} and closed-form {} evaluations disagree",
            cb.alpha
        )));
    }
    Ok(cb)
}

/// Cost breakdown with the success time required to be defined.
pub fn decompose(inst: &Instance, plan: &SearchPlan) -> Result<CostBreakdown> {
    let cb = expected_cost(inst, plan)?;
    if cb.success_time.is_none() {
        return Err(ScpsError::Undefined(
            "t_s needs a plan with positive success probability".into(),
        ));
    }
    Ok(cb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::tri_station;
    use crate::instance::{EnergyModel, Variant};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn tri_station_variant_a() {
        let inst = tri_station(Variant::A);
        let cb = expected_cost(&inst, &SearchPlan::new(vec![0, 1, 2], false)).unwrap();
        assert!(close(cb.alpha, 6.0), "{cb:?}");
        assert!(close(cb.partial_cost, 3.5));
        assert!(close(cb.rho_bar, 0.25));
        assert!(close(cb.travel, 5.0));
        assert!(close(cb.success_time.unwrap(), 3.0));
        let id = cb.success_time.unwrap() * cb.rho + cb.rho_bar * (cb.travel + 10.0);
        assert!(close(id, cb.alpha));
    }

    #[test]
    fn tri_station_variant_c() {
        let inst = tri_station(Variant::C);
        let cb = expected_cost(&inst, &SearchPlan::new(vec![0, 1, 2], false)).unwrap();
        assert!(close(cb.alpha, 83.5), "{cb:?}");
    }

    #[test]
    fn tri_station_variant_b_plans() {
        let inst = tri_station(Variant::B);
        let cases = [
            (vec![0, 1, 2], true, 3.75),
            (vec![0, 1], true, 6.0),
            (vec![0, 2], true, 4.5),
            (vec![0, 2, 1], true, 7.5),
        ];
        for (visits, wait, want) in cases {
            let plan = SearchPlan::new(visits, wait);
            let cb = expected_cost(&inst, &plan).unwrap();
            assert!(close(cb.alpha, want), "{plan:?} -> {}", cb.alpha);
        }
    }

    #[test]
    fn immediate_success_costs_nothing() {
        let mut inst = tri_station(Variant::A);
        inst.stations[1].p = 1.0;
        inst.travel[0][1] = 0.0;
        inst.travel[1][0] = 0.0;
        let cb = expected_cost(&inst, &SearchPlan::new(vec![0, 1], false)).unwrap();
        assert_eq!(cb.alpha, 0.0);
    }

    #[test]
    fn certain_station_decomposes() {
        let mut inst = tri_station(Variant::A);
        inst.stations[1].p = 1.0;
        inst.travel[0][1] = 4.0;
        let cb = decompose(&inst, &SearchPlan::new(vec![0, 1], false)).unwrap();
        assert_eq!((cb.success_time, cb.rho, cb.alpha), (Some(4.0), 1.0, 4.0));
        let cb = decompose(&inst, &SearchPlan::new(vec![0, 1, 2], false)).unwrap();
        assert_eq!(cb.rho_bar, 0.0);
        assert_eq!(cb.alpha, cb.success_time.unwrap());
    }

    #[test]
    fn zero_rho_has_no_success_time() {
        let mut inst = tri_station(Variant::A);
        inst.stations[1].p = 0.0;
        assert!(matches!(
            decompose(&inst, &SearchPlan::new(vec![0, 1], false)),
            Err(ScpsError::Undefined(_))
        ));
        assert!(matches!(decompose(&inst, &SearchPlan::degenerate()), Err(ScpsError::Undefined(_))));
    }

    #[test]
    fn infeasible_plans_rejected() {
        let inst = tri_station(Variant::A);
        let over = SearchPlan::new(vec![0, 1, 2, 1], false);
        assert!(matches!(expected_cost(&inst, &over), Err(ScpsError::InfeasiblePlan(_))));
        let mut tight = inst.clone();
        tight.t_max = 4.0;
        let plan = SearchPlan::new(vec![0, 1, 2], false);
        assert!(matches!(expected_cost(&tight, &plan), Err(ScpsError::InfeasiblePlan(_))));
        let wait = SearchPlan::new(vec![0, 1], true);
        assert!(expected_cost(&inst, &wait).is_err());
    }

    #[test]
    fn recovery_fixture() {
        let want = 0.5 * (1.0 - (-2.0f64).exp());
        assert!((recovery_probability(0.5, 120.0, 120.0) - want).abs() < 1e-15);
        assert!((want - 0.432332).abs() < 1e-6);
        assert_eq!(recovery_probability(0.5, 120.0, 0.0), 0.0);
    }

    #[test]
    fn effective_probability_cases() {
        let mut inst = tri_station(Variant::A);
        assert_eq!(effective_probability(&inst, &[0], 1, 2.0).unwrap(), 0.5);
        assert!(effective_probability(&inst, &[0, 1, 2], 1, 8.0).is_err());
        inst.recovery = true;
        for s in inst.stations.iter_mut().skip(1) {
            s.mu_inv = Some(120.0);
        }
        assert_eq!(effective_probability(&inst, &[0, 1], 1, 2.0).unwrap(), 0.0);
        let p = effective_probability(&inst, &[0, 1], 1, 122.0).unwrap();
        assert!((p - 0.5 * (1.0 - (-2.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn immediate_cost_cases() {
        let mut inst = tri_station(Variant::C);
        inst.stations[1].charge = 30.0;
        let at1 = |available| State { visits: vec![0, 1], available, elapsed: 2.0, soc: None };
        let go = Action { station: 2, wait: false };
        assert_eq!(immediate_cost(&at1(true), go, &inst), 30.0);
        assert_eq!(immediate_cost(&at1(false), go, &inst), 3.0);
        inst.variant = Variant::B;
        inst.stations[1].wait = 15.0;
        let stay = Action { station: 1, wait: true };
        assert_eq!(immediate_cost(&at1(false), stay, &inst), 15.0);
    }

    #[test]
    fn charge_time_proration() {
        let mut inst = tri_station(Variant::C);
        inst.stations[1].charge = 60.0;
        let mut e = EnergyModel::zoe(&inst.travel, 0.5);
        e.b_min = 0.2;
        inst.energy = Some(e);
        assert_eq!(adjusted_charge_time(&inst, 0.0, 1).unwrap(), 60.0);
        assert!((adjusted_charge_time(&inst, 0.1, 1).unwrap() - 72.0).abs() < 1e-12);
        assert!(adjusted_charge_time(&inst, 0.3, 1).is_ok());
        assert!(matches!(adjusted_charge_time(&inst, 0.31, 1), Err(ScpsError::InfeasibleArc(_))));
    }
}
