#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scps::generator::{generate, Availability, GenConfig, Layout};
use scps::instance::{ActionSpace, Instance, SearchPlan, Variant};
use scps::mdp::Walk;

pub const TR_MINUTES: f64 = 3.0;

pub fn grid() -> Layout {
    Layout::ManhattanGrid { blocks: 6, block_m: 400.0 }
}

pub fn square() -> Layout {
    Layout::UniformSquare { side_m: 2500.0 }
}

/// The oracle family: up to 8 chargers, every variant, CO / DN / TR, all
/// availability levels. DN instances sit on a street grid so the restriction bites.
pub fn oracle_family(seed: u64) -> Instance {
    let s = seed as usize;
    let variant = Variant::ALL[s % 4];
    let space = [
        ActionSpace::Complete,
        ActionSpace::DirectNeighbors,
        ActionSpace::TimeRestricted { t_r: TR_MINUTES },
    ][(s / 4) % 3];
    let availability = Availability::ALL[(s / 12) % 3];
    let layout = if space == ActionSpace::DirectNeighbors || s % 2 == 1 { grid() } else { square() };
    let cfg = GenConfig {
        n_stations: 3 + (s * 7) % 6,
        layout,
        availability,
        seed,
        t_max: 12.0,
        action_space: space,
        ..GenConfig::default()
    };
    generate(&cfg, variant).expect("family instance")
}

/// Grid instances for comparing DN against CO in the zero-usage-cost variants.
pub fn neighbour_family(seed: u64) -> Instance {
    let s = seed as usize;
    let variant = if s.is_multiple_of(2) { Variant::A } else { Variant::B };
    let cfg = GenConfig {
        n_stations: 3 + s % 5,
        layout: Layout::ManhattanGrid { blocks: 4 + s % 3, block_m: 500.0 },
        availability: Availability::ALL[(s / 2) % 3],
        seed: 1000 + seed,
        t_max: 10.0 + (s % 4) as f64 * 2.0,
        action_space: ActionSpace::Complete,
        ..GenConfig::default()
    };
    generate(&cfg, variant).expect("family instance")
}

/// Instances for plan evaluation checks; some carry the energy model.
pub fn evaluation_family(seed: u64) -> Instance {
    let s = seed as usize;
    let cfg = GenConfig {
        n_stations: 4 + s % 7,
        layout: if s.is_multiple_of(3) { grid() } else { square() },
        availability: Availability::ALL[s % 3],
        seed: 5000 + seed,
        t_max: 25.0,
        energy_b0: s.is_multiple_of(5).then_some(0.3),
        ..GenConfig::default()
    };
    generate(&cfg, Variant::ALL[(s / 3) % 4]).expect("family instance")
}

/// A random feasible plan of at most `max_visits` stations after the start.
pub fn random_plan(inst: &Instance, rng: &mut ChaCha8Rng, max_visits: usize) -> SearchPlan {
    let topo = inst.topology();
    let mut walk = Walk::start(inst);
    while walk.visits.len() <= max_visits {
        let actions = inst.successors(&topo, &walk.view());
        if actions.is_empty() {
            break;
        }
        let a = actions[rng.random_range(0..actions.len())];
        if a.wait {
            if a.station != walk.current() {
                walk.visits.push(a.station);
            }
            return SearchPlan::new(walk.visits, true);
        }
        if walk.visits.len() == max_visits + 1 {
            break;
        }
        walk.advance(inst, a.station);
    }
    let wait = inst.variant.waits() && walk.visits.len() > 1;
    SearchPlan::new(walk.visits, wait)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer metric distances: shortest-path closure of random weights in 1..=9.
pub fn random_metric(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.random_range(1..=9) as f64;
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Length of the shortest Hamiltonian tour from city 0, by permutation.
pub fn shortest_tour(d: &[Vec<f64>]) -> f64 {
    fn go(d: &[Vec<f64>], cur: usize, left: &mut Vec<usize>, acc: f64, best: &mut f64) {
        if left.is_empty() {
            *best = best.min(acc + d[cur][0]);
            return;
        }
        for i in 0..left.len() {
            let c = left.remove(i);
            go(d, c, left, acc + d[cur][c], best);
            left.insert(i, c);
        }
    }
    let mut best = f64::INFINITY;
    let mut left: Vec<usize> = (1..d.len()).collect();
    go(d, 0, &mut left, 0.0, &mut best);
    best
}
