//! Myopic reference policies: greedy score (G) and nearest station (N).

use crate::error::{Result, ScpsError};
use crate::instance::{Instance, SearchPlan, StationId, Topology};
use crate::mdp::{Step, Walk};

/// Safety net against zero-length cycles; real plans are far shorter.
const MAX_STEPS: usize = 100_000;

/// One-step score: expected cost if the search stopped right after `step`.
pub fn greedy_score(step: &Step) -> f64 {
    step.travel + step.p_eff * step.gamma + (1.0 - step.p_eff) * step.beta
}

/// Stations reachable by a plain move (no wait) from the walk's position.
pub fn moves(inst: &Instance, topo: &Topology, walk: &Walk) -> Vec<StationId> {
    inst.successors(topo, &walk.view())
        .into_iter()
        .filter(|a| !a.wait)
        .map(|a| a.station)
        .collect()
}

/// Lowest greedy score among plain moves, ties to the lowest id.
pub fn greedy_choice(inst: &Instance, topo: &Topology, walk: &Walk) -> Option<(StationId, f64)> {
    let mut best: Option<(StationId, f64)> = None;
    for c in moves(inst, topo, walk) {
        let s = greedy_score(&walk.peek(inst, c));
        if best.is_none_or(|(_, b)| s < b) {
            best = Some((c, s));
        }
    }
    best
}

fn finish(inst: &Instance, walk: Walk) -> SearchPlan {
    let wait = inst.variant.waits() && walk.current() != 0;
    SearchPlan::new(walk.visits, wait)
}

fn guard(steps: usize) -> Result<()> {
    if steps > MAX_STEPS {
        return Err(ScpsError::ContractViolation("policy did not terminate".into()));
    }
    Ok(())
}

/// Follow the greedy policy from `walk` until it stops.
pub fn greedy_complete(inst: &Instance, topo: &Topology, mut walk: Walk) -> Result<SearchPlan> {
    let mut steps = 0;
    while let Some((c, score)) = greedy_choice(inst, topo, &walk) {
        let cur = walk.current();
        if inst.variant.waits() && cur != 0 && inst.beta_at(cur, walk.depleted(inst)) < score {
            break;
        }
        walk.advance(inst, c);
        steps += 1;
        guard(steps)?;
    }
    Ok(finish(inst, walk))
}

pub fn greedy_solve(inst: &Instance) -> Result<SearchPlan> {
    inst.ensure_valid()?;
    greedy_complete(inst, &inst.topology(), Walk::start(inst))
}

pub fn naive_solve(inst: &Instance) -> Result<SearchPlan> {
    inst.ensure_valid()?;
    let topo = inst.topology();
    let mut walk = Walk::start(inst);
    let mut steps = 0;
    loop {
        let cur = walk.current();
        let options = moves(inst, &topo, &walk);
        let fresh = options
            .iter()
            .copied()
            .filter(|&c| !walk.visited.contains(c))
            .min_by(|&a, &b| {
                let (ta, tb) = (inst.travel(cur, a), inst.travel(cur, b));
                ta.total_cmp(&tb)
                    .then(inst.stations[b].p.total_cmp(&inst.stations[a].p))
                    .then(a.cmp(&b))
            });
        let next = fresh.or_else(|| {
            options
                .iter()
                .copied()
                .min_by(|&a, &b| inst.travel(cur, a).total_cmp(&inst.travel(cur, b)).then(a.cmp(&b)))
        });
        match next {
            Some(c) => {
                walk.advance(inst, c);
                steps += 1;
                guard(steps)?;
            }
            None => break,
        }
    }
    Ok(finish(inst, walk))
}
