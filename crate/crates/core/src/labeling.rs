//! Label-setting search over partial plans. With exact dominance the result is
//! optimal (LE); with cost-only dominance it is the fast heuristic (LH).

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::baselines::greedy_complete;
use crate::error::{Result, ScpsError};
use crate::instance::{Action, Instance, SearchPlan, StateView, StationId, Topology, SOC_EPS};
use crate::mdp::{expected_cost, recovery_probability, CostBreakdown, Walk, EVAL_TOL};
use crate::station_set::StationSet;

/// Which of the five base conditions a custom rule checks: rho_bar, A, t,
/// unvisited-reach inclusion, and the variant-specific extra condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceToggles {
    pub rho_bar: bool,
    pub cost: bool,
    pub time: bool,
    pub reach: bool,
    pub extra: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DominanceMode {
    Exact,
    Heuristic,
    Sharpened,
    Recovery,
    Energy,
    Toggles(DominanceToggles),
}

impl DominanceMode {
    pub fn parse(s: &str) -> Option<DominanceMode> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Some(DominanceMode::Exact),
            "heuristic" => Some(DominanceMode::Heuristic),
            "sharpened" => Some(DominanceMode::Sharpened),
            "recovery" => Some(DominanceMode::Recovery),
            "energy" => Some(DominanceMode::Energy),
            other => {
                let bits = other.strip_prefix("toggles:")?.as_bytes();
                if bits.len() != 5 || bits.iter().any(|b| *b != b'0' && *b != b'1') {
                    return None;
                }
                let on = |i: usize| bits[i] == b'1';
                Some(DominanceMode::Toggles(DominanceToggles {
                    rho_bar: on(0),
                    cost: on(1),
                    time: on(2),
                    reach: on(3),
                    extra: on(4),
                }))
            }
        }
    }

    /// Whether the mode keeps every optimal completion alive.
    pub fn is_exact(self) -> bool {
        !matches!(self, DominanceMode::Heuristic | DominanceMode::Toggles(_))
    }
}

#[derive(Debug)]
pub struct PathNode {
    pub station: StationId,
    pub prev: Option<Rc<PathNode>>,
}

/// Resources of one partial plan.
#[derive(Clone, Debug)]
pub struct Label {
    pub station: StationId,
    pub path: Rc<PathNode>,
    /// The plan ends here by waiting.
    pub wait: bool,
    pub t: f64,
    pub partial_cost: f64,
    pub rho_bar: f64,
    pub alpha: f64,
    pub soc: f64,
    pub visited: StationSet,
    /// Unvisited chargers still reachable (S).
    pub reach_unvisited: StationSet,
    /// Visited chargers still reachable (R).
    pub reach_visited: StationSet,
    /// Arrival time of the latest visit per station, kept only under recovery.
    pub last_arrival: Option<Rc<[f64]>>,
    pub terminal: bool,
}

impl Label {
    pub fn path(&self) -> Vec<StationId> {
        let mut out = Vec::new();
        let mut node = Some(&self.path);
        while let Some(n) = node {
            out.push(n.station);
            node = n.prev.as_ref();
        }
        out.reverse();
        out
    }

    pub fn plan(&self) -> SearchPlan {
        SearchPlan::new(self.path(), self.wait)
    }
}

/// Instance-wide constants used by the dominance tests.
#[derive(Clone, Copy, Debug)]
struct Bounds {
    t_lo: f64,
    p_hi: f64,
    sharpened_rhs: f64,
}

/// Everything a labeling run needs besides the labels themselves.
pub struct LabelContext<'a> {
    pub inst: &'a Instance,
    pub topo: Topology,
    pub mode: DominanceMode,
    track_sets: bool,
    gamma_positive: bool,
    /// Per charger: worst cost change of forcing one more visit, without the T - t part.
    forced_step: Vec<f64>,
    bounds: Bounds,
}

impl<'a> LabelContext<'a> {
    pub fn new(inst: &'a Instance, mode: DominanceMode) -> Result<LabelContext<'a>> {
        inst.ensure_valid()?;
        match mode {
            DominanceMode::Sharpened => {
                let v = inst.sharpened_violations();
                if !v.is_empty() {
                    return Err(ScpsError::InvalidParameter(v.join("; ")));
                }
            }
            DominanceMode::Recovery if !inst.recovery => {
                return Err(ScpsError::InvalidParameter(
                    "recovery dominance needs an instance with recovery enabled".into(),
                ))
            }
            DominanceMode::Energy if inst.energy.is_none() => {
                return Err(ScpsError::InvalidParameter(
                    "energy dominance needs an instance with an energy model".into(),
                ))
            }
            _ => {}
        }
        let max_dep = inst.max_depletion();
        let chargers: Vec<StationId> = inst.chargers().collect();
        let gamma_hi = |c| inst.gamma_at(c, max_dep);
        let beta_hi = |c| inst.beta_at(c, max_dep);
        let beta_lo = (0..inst.n()).map(|c| inst.beta_at(c, 0.0)).fold(f64::INFINITY, f64::min);
        let mut forced_step = vec![0.0; inst.n()];
        for &c in &chargers {
            let p = inst.stations[c].p;
            forced_step[c] = p * gamma_hi(c) + (1.0 - p) * beta_hi(c) - beta_lo;
        }
        let gamma_positive = chargers.iter().any(|&c| gamma_hi(c) > 0.0);
        let fold = |f: &dyn Fn(StationId) -> f64, min: bool| {
            chargers.iter().map(|&c| f(c)).fold(
                if min { f64::INFINITY } else { f64::NEG_INFINITY },
                |a, b| if min { a.min(b) } else { a.max(b) },
            )
        };
        let t_lo = inst.min_travel();
        let p_hi = inst.max_p();
        let gamma_min = fold(&|c| inst.gamma_at(c, 0.0), true);
        let beta_min = fold(&|c| inst.beta_at(c, 0.0), true);
        let beta_max = fold(&beta_hi, false);
        // The printed bound only holds while it does not exceed the value of an
        // empty completion, so it is clamped there.
        let sharpened_rhs =
            (t_lo + p_hi * (gamma_min - beta_max)).min(p_hi * (beta_min - beta_max));
        Ok(LabelContext {
            inst,
            topo: inst.topology(),
            mode,
            track_sets: mode != DominanceMode::Heuristic,
            gamma_positive,
            forced_step,
            bounds: Bounds {
                t_lo,
                p_hi,
                sharpened_rhs,
            },
        })
    }

    fn uses_recovery_rule(&self) -> bool {
        self.inst.recovery && self.mode.is_exact()
    }

    pub fn root(&self) -> Label {
        let mut l = Label {
            station: 0,
            path: Rc::new(PathNode { station: 0, prev: None }),
            wait: false,
            t: 0.0,
            partial_cost: 0.0,
            rho_bar: 1.0,
            alpha: self.inst.beta_at(0, 0.0),
            soc: self.inst.initial_soc(),
            visited: StationSet::empty(),
            reach_unvisited: StationSet::empty(),
            reach_visited: StationSet::empty(),
            last_arrival: self
                .inst
                .recovery
                .then(|| vec![f64::NAN; self.inst.n()].into()),
            terminal: false,
        };
        self.fill_sets(&mut l);
        l.terminal = self.successors(&l).is_empty();
        l
    }

    fn fill_sets(&self, l: &mut Label) {
        if !self.track_sets {
            return;
        }
        let inst = self.inst;
        let c = l.station;
        let slack = l.soc - inst.soc_floor() + SOC_EPS;
        for x in inst.chargers() {
            if x == c || l.t + self.topo.dist[c][x] > inst.t_max {
                continue;
            }
            if let Some(ed) = &self.topo.energy_dist {
                if ed[c][x] > slack {
                    continue;
                }
            }
            if l.visited.contains(x) {
                l.reach_visited.insert(x);
            } else {
                l.reach_unvisited.insert(x);
            }
        }
    }

    pub fn successors(&self, l: &Label) -> Vec<Action> {
        if l.wait {
            return Vec::new();
        }
        let view = StateView {
            current: l.station,
            elapsed: l.t,
            soc: l.soc,
            visited: &l.visited,
        };
        self.inst.successors(&self.topo, &view)
    }

    /// Apply the resource extension functions along `action`.
    pub fn extend(&self, l: &Label, action: Action) -> Result<Label> {
        let inst = self.inst;
        if action.wait && action.station == l.station {
            if l.station == 0 || !inst.variant.waits() {
                return Err(ScpsError::ContractViolation("wait needs a charger in a waiting variant".into()));
            }
            return Ok(Label {
                wait: true,
                terminal: true,
                ..l.clone()
            });
        }
        let c = action.station;
        let tau = inst.travel(l.station, c);
        let t = l.t + tau;
        if t > inst.t_max {
            return Err(ScpsError::InfeasibleArc(format!("arc to {c} exceeds the budget")));
        }
        let soc = l.soc - inst.arc_energy(l.station, c);
        if inst.energy.is_some() && soc < inst.soc_floor() - SOC_EPS {
            return Err(ScpsError::InfeasibleArc(format!("arc to {c} crosses the SoC floor")));
        }
        let depleted = inst.initial_soc() - soc;
        let p = if !l.visited.contains(c) {
            inst.stations[c].p
        } else if let Some(last) = &l.last_arrival {
            let s = &inst.stations[c];
            recovery_probability(s.p, s.mu_inv.unwrap_or(f64::INFINITY), t - last[c])
        } else {
            0.0
        };
        let gamma = inst.gamma_at(c, depleted);
        let beta = inst.beta_at(c, depleted);
        let partial_cost = l.partial_cost + l.rho_bar * (tau + p * gamma);
        let rho_bar = l.rho_bar * (1.0 - p);
        let mut visited = l.visited;
        visited.insert(c);
        let last_arrival = l.last_arrival.as_ref().map(|last| {
            let mut v = last.to_vec();
            v[c] = t;
            Rc::from(v)
        });
        let mut next = Label {
            station: c,
            path: Rc::new(PathNode {
                station: c,
                prev: Some(l.path.clone()),
            }),
            wait: action.wait,
            t,
            partial_cost,
            rho_bar,
            alpha: partial_cost + rho_bar * beta,
            soc,
            visited,
            reach_unvisited: StationSet::empty(),
            reach_visited: StationSet::empty(),
            last_arrival,
            terminal: false,
        };
        self.fill_sets(&mut next);
        next.terminal = action.wait || self.successors(&next).is_empty();
        Ok(next)
    }

    /// Does `l1` dominate `l2` under the context's mode?
    pub fn dominates(&self, l1: &Label, l2: &Label) -> Result<bool> {
        if l1.station != l2.station {
            return Err(ScpsError::ContractViolation(format!(
                "labels at stations {} and {} are not comparable",
                l1.station, l2.station
            )));
        }
        if l1.terminal || l2.terminal {
            return Ok(false);
        }
        let waits = self.inst.variant.waits();
        let energy_ok = self.inst.energy.is_none() || l1.soc >= l2.soc;
        match self.mode {
            DominanceMode::Heuristic => {
                return Ok(l1.rho_bar <= l2.rho_bar && l1.partial_cost <= l2.partial_cost)
            }
            DominanceMode::Toggles(tg) => {
                return Ok((!tg.rho_bar || l1.rho_bar <= l2.rho_bar)
                    && (!tg.cost || l1.partial_cost <= l2.partial_cost)
                    && (!tg.time || l1.t <= l2.t)
                    && (!tg.reach || l2.reach_unvisited.is_subset(&l1.reach_unvisited))
                    && (!tg.extra
                        || if waits {
                            self.revisit_cover(l1, l2)
                        } else {
                            self.forced_extension_harmless(l1, l2)
                        }))
            }
            _ => {}
        }
        if l1.rho_bar > l2.rho_bar || l1.t > l2.t || !energy_ok {
            return Ok(false);
        }
        let cost_ok = l1.partial_cost <= l2.partial_cost
            || (self.mode == DominanceMode::Sharpened && self.sharpened_cost(l1, l2));
        if !cost_ok {
            return Ok(false);
        }
        if self.uses_recovery_rule() {
            return Ok(self.recovery_history_ok(l1, l2));
        }
        if !l2.reach_unvisited.is_subset(&l1.reach_unvisited) {
            return Ok(false);
        }
        if (waits || self.inst.action_space.is_direct()) && !self.revisit_cover(l1, l2) {
            return Ok(false);
        }
        Ok(waits || self.forced_extension_harmless(l1, l2))
    }

    /// Every visited station l2 may still return to is available to l1 too.
    fn revisit_cover(&self, l1: &Label, l2: &Label) -> bool {
        if self.gamma_positive && self.inst.action_space.is_direct() {
            // passing a station l1 has not seen adds a chance of paying gamma early
            l2.reach_visited.is_subset(&l1.reach_visited)
        } else {
            l2.reach_visited
                .is_subset(&l1.reach_visited.union(&l1.reach_unvisited))
        }
    }

    /// Without waiting, l1 may be forced to keep driving where l2 stops; that
    /// must never raise its cost. With equal time and charge only stations l2
    /// cannot reach can force such a detour.
    fn forced_extension_harmless(&self, l1: &Label, l2: &Label) -> bool {
        let spare = self.inst.t_max - l1.t;
        let extra = if l1.t == l2.t && l1.soc == l2.soc {
            l1.reach_unvisited.difference(&l2.reach_unvisited)
        } else {
            l1.reach_unvisited
        };
        let harmless = extra.iter().all(|c| spare + self.forced_step[c] <= 0.0);
        harmless
    }

    fn sharpened_cost(&self, l1: &Label, l2: &Label) -> bool {
        let d_alpha = l1.alpha - l2.alpha;
        let d_rho = l1.rho_bar - l2.rho_bar;
        self.bounds.p_hi * d_alpha <= -d_rho * self.bounds.sharpened_rhs
    }

    /// With recovery, l1 must face availabilities no worse than l2 at every
    /// station l2 can still reach.
    fn recovery_history_ok(&self, l1: &Label, l2: &Label) -> bool {
        let inst = self.inst;
        if !inst.variant.waits() && l1.t != l2.t {
            return false;
        }
        let (Some(h1), Some(h2)) = (&l1.last_arrival, &l2.last_arrival) else {
            return false;
        };
        let c = l2.station;
        let slack = l2.soc - inst.soc_floor() + SOC_EPS;
        for x in inst.chargers() {
            if l2.t + self.topo.dist[c][x] > inst.t_max {
                continue;
            }
            if let Some(ed) = &self.topo.energy_dist {
                if ed[c][x] > slack {
                    continue;
                }
            }
            let ok = match (l1.visited.contains(x), l2.visited.contains(x)) {
                (false, false) => true,
                (false, true) => !self.gamma_positive,
                (true, false) => false,
                (true, true) => {
                    let e1 = l1.t - h1[x];
                    let e2 = l2.t - h2[x];
                    if self.gamma_positive {
                        e1 == e2
                    } else {
                        e1 >= e2
                    }
                }
            };
            if !ok {
                return false;
            }
        }
        true
    }

    /// Lower bound on travel between distinct vertices, as used by the sharpened rule.
    pub fn min_travel(&self) -> f64 {
        self.bounds.t_lo
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LabelingStats {
    pub labels_created: u64,
    pub labels_dominated: u64,
    pub peak_frontier: u64,
    pub runtime_ms: f64,
    pub truncated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabelingConfig {
    pub mode: DominanceMode,
    pub time_limit: Option<Duration>,
    /// Deterministic alternative to the time limit.
    pub max_labels: Option<u64>,
}

impl LabelingConfig {
    pub fn exact() -> LabelingConfig {
        LabelingConfig {
            mode: DominanceMode::Exact,
            time_limit: None,
            max_labels: None,
        }
    }

    pub fn heuristic() -> LabelingConfig {
        LabelingConfig {
            mode: DominanceMode::Heuristic,
            ..LabelingConfig::exact()
        }
    }

    pub fn with_mode(mode: DominanceMode) -> LabelingConfig {
        LabelingConfig {
            mode,
            ..LabelingConfig::exact()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelingOutcome {
    pub plan: SearchPlan,
    pub cost: CostBreakdown,
    pub stats: LabelingStats,
}

#[derive(Clone, Copy, PartialEq)]
struct Key(f64, u64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

struct Slot {
    label: Label,
    alive: bool,
}

pub fn solve(inst: &Instance, cfg: &LabelingConfig) -> Result<LabelingOutcome> {
    let started = Instant::now();
    let ctx = LabelContext::new(inst, cfg.mode)?;
    let mut stats = LabelingStats::default();
    let root = ctx.root();
    stats.labels_created = 1;
    let mut incumbent: Option<Label> = None;
    let mut slots: Vec<Slot> = Vec::new();
    let mut active: Vec<Vec<usize>> = vec![Vec::new(); inst.n()];
    let mut heap = BinaryHeap::new();
    let mut live: u64 = 0;
    let mut seq: u64 = 0;
    if root.terminal {
        incumbent = Some(root);
    } else {
        heap.push(Reverse((Key(root.alpha, seq), 0usize)));
        slots.push(Slot { label: root, alive: true });
        active[0].push(0);
        live = 1;
        stats.peak_frontier = 1;
    }
    let mut pops: u64 = 0;
    while let Some(Reverse((_, idx))) = heap.pop() {
        if !slots[idx].alive {
            continue;
        }
        pops += 1;
        let over_time = cfg.time_limit.is_some_and(|lim| pops.is_multiple_of(64) && started.elapsed() > lim);
        let over_count = cfg.max_labels.is_some_and(|m| stats.labels_created >= m);
        if over_time || over_count {
            stats.truncated = true;
            heap.push(Reverse((Key(slots[idx].label.alpha, 0), idx)));
            break;
        }
        slots[idx].alive = false;
        live -= 1;
        let station = slots[idx].label.station;
        active[station].retain(|&i| i != idx);
        let parent = slots[idx].label.clone();
        for action in ctx.successors(&parent) {
            let child = ctx.extend(&parent, action)?;
            stats.labels_created += 1;
            if child.terminal {
                if incumbent.as_ref().is_none_or(|b| child.alpha < b.alpha) {
                    incumbent = Some(child);
                }
                continue;
            }
            let here = &active[child.station];
            let mut dominated = false;
            for &i in here {
                if ctx.dominates(&slots[i].label, &child)? {
                    dominated = true;
                    break;
                }
            }
            if dominated {
                stats.labels_dominated += 1;
                continue;
            }
            let mut keep = Vec::with_capacity(here.len() + 1);
            for &i in here {
                if ctx.dominates(&child, &slots[i].label)? {
                    slots[i].alive = false;
                    live -= 1;
                    stats.labels_dominated += 1;
                } else {
                    keep.push(i);
                }
            }
            seq += 1;
            let id = slots.len();
            heap.push(Reverse((Key(child.alpha, seq), id)));
            keep.push(id);
            active[child.station] = keep;
            slots.push(Slot { label: child, alive: true });
            live += 1;
            stats.peak_frontier = stats.peak_frontier.max(live);
        }
    }
    let plan = match incumbent {
        Some(best) => {
            let plan = best.plan();
            let cost = expected_cost(inst, &plan)?;
            if (cost.alpha - best.alpha).abs() > EVAL_TOL * cost.alpha.abs().max(1.0) {
                return Err(ScpsError::ContractViolation(format!(
                    "label cost {} disagrees with plan evaluation {}",
                    best.alpha, cost.alpha
                )));
            }
            plan
        }
        None => {
            // cut short before any plan finished: complete the best open label greedily
            let open = heap
                .into_sorted_vec()
                .into_iter()
                .rev()
                .map(|Reverse((_, i))| i)
                .find(|&i| slots[i].alive)
                .ok_or_else(|| ScpsError::ContractViolation("search ended without a plan".into()))?;
            let mut walk = Walk::start(inst);
            for &c in &slots[open].label.path()[1..] {
                walk.advance(inst, c);
            }
            greedy_complete(inst, &ctx.topo, walk)?
        }
    };
    let cost = expected_cost(inst, &plan)?;
    stats.runtime_ms = started.elapsed().as_secs_f64() * 1e3;
    Ok(LabelingOutcome { plan, cost, stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::tri_station;
    use crate::instance::Variant;

    fn run(inst: &Instance) -> LabelingOutcome {
        solve(inst, &LabelingConfig::exact()).unwrap()
    }

    #[test]
    fn tri_station_a() {
        let out = run(&tri_station(Variant::A));
        assert_eq!(out.plan, SearchPlan::new(vec![0, 1, 2], false));
        assert!((out.cost.alpha - 6.0).abs() < 1e-12);
    }

    #[test]
    fn tri_station_b_waits_at_last() {
        let out = run(&tri_station(Variant::B));
        assert_eq!(out.plan, SearchPlan::new(vec![0, 1, 2], true));
        assert!((out.cost.alpha - 3.75).abs() < 1e-12);
    }

    #[test]
    fn single_certain_charger() {
        let mut inst = tri_station(Variant::C);
        inst.stations.truncate(2);
        inst.travel = vec![vec![0.0, 2.0], vec![2.0, 0.0]];
        inst.stations[1].p = 1.0;
        let out = run(&inst);
        assert_eq!(out.plan.visits, vec![0, 1]);
        assert_eq!(out.cost.alpha, 2.0 + 30.0);
    }

    #[test]
    fn unreachable_chargers_give_degenerate_plan() {
        let mut inst = tri_station(Variant::A);
        inst.t_max = 1.0;
        let out = run(&inst);
        assert_eq!(out.plan, SearchPlan::degenerate());
        assert_eq!(out.cost.alpha, 10.0);
    }

    #[test]
    fn extend_root() {
        let mut inst = tri_station(Variant::A);
        let ctx = LabelContext::new(&inst, DominanceMode::Exact).unwrap();
        let l = ctx.extend(&ctx.root(), Action { station: 1, wait: false }).unwrap();
        assert_eq!((l.partial_cost, l.rho_bar, l.t, l.alpha), (2.0, 0.5, 2.0, 7.0));
        let l2 = ctx.extend(&l, Action { station: 2, wait: false }).unwrap();
        assert!((l2.alpha - 6.0).abs() < 1e-12);
        assert!(l2.terminal);
        inst.variant = Variant::C;
        inst.stations[1].charge = 30.0;
        let ctx = LabelContext::new(&inst, DominanceMode::Exact).unwrap();
        let l = ctx.extend(&ctx.root(), Action { station: 1, wait: false }).unwrap();
        assert_eq!(l.partial_cost, 17.0);
    }

    #[test]
    fn dominance_examples() {
        let inst = tri_station(Variant::A);
        let ctx = LabelContext::new(&inst, DominanceMode::Exact).unwrap();
        let l = ctx.extend(&ctx.root(), Action { station: 1, wait: false }).unwrap();
        assert!(ctx.dominates(&l, &l).unwrap());
        let mut better = l.clone();
        let mut worse = l.clone();
        better.t = 1.0;
        better.partial_cost = 1.0;
        better.rho_bar = 0.4;
        worse.t = 2.0;
        worse.partial_cost = 2.0;
        worse.rho_bar = 0.5;
        better.reach_unvisited = StationSet::empty();
        worse.reach_unvisited = StationSet::empty();
        assert!(ctx.dominates(&better, &worse).unwrap());
        let h = LabelContext::new(&inst, DominanceMode::Heuristic).unwrap();
        let mut a = l.clone();
        a.partial_cost = 1.0;
        a.rho_bar = 0.6;
        assert!(!h.dominates(&a, &l).unwrap());
        assert!(ctx.dominates(&ctx.root(), &l).is_err());
    }

    #[test]
    fn child_alpha_may_undercut_parent() {
        // popped alphas are not monotone: extending can lower the stop-now cost
        let inst = tri_station(Variant::A);
        let ctx = LabelContext::new(&inst, DominanceMode::Exact).unwrap();
        let root = ctx.root();
        let child = ctx.extend(&root, Action { station: 1, wait: false }).unwrap();
        assert!(child.alpha < root.alpha);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(DominanceMode::parse("exact"), Some(DominanceMode::Exact));
        let t = DominanceMode::parse("toggles:11000").unwrap();
        assert_eq!(
            t,
            DominanceMode::Toggles(DominanceToggles {
                rho_bar: true,
                cost: true,
                time: false,
                reach: false,
                extra: false
            })
        );
        assert_eq!(DominanceMode::parse("toggles:2"), None);
    }
}
