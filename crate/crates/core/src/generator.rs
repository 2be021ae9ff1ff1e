//! Synthetic instances: Beta-distributed availabilities, discrete waiting and
//! charging menus, and planar layouts with travel time = distance / speed.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpsError};
use crate::instance::{ActionSpace, EnergyModel, Instance, Station, Variant, SCHEMA_VERSION};

pub const WAIT_MENU: [f64; 4] = [3.0, 15.0, 60.0, 120.0];
pub const CHARGE_MENU: [f64; 3] = [30.0, 60.0, 120.0];
pub const DEFAULT_CONCENTRATION: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Availability {
    Low,
    Med,
    High,
}

impl Availability {
    pub const ALL: [Availability; 3] = [Availability::Low, Availability::Med, Availability::High];

    pub fn mean(self) -> f64 {
        match self {
            Availability::Low => 0.15,
            Availability::Med => 0.60,
            Availability::High => 0.90,
        }
    }

    pub fn parse(s: &str) -> Option<Availability> {
        match s.to_ascii_lowercase().as_str() {
            "low" => Some(Availability::Low),
            "med" | "medium" => Some(Availability::Med),
            "high" => Some(Availability::High),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Layout {
    /// Uniform points in a square; the start sits at its center.
    UniformSquare { side_m: f64 },
    /// Stations scattered normally around uniformly placed cluster centers.
    Clustered { clusters: usize, side_m: f64, spread_m: f64 },
    /// Distinct intersections of a street grid, Manhattan distances. Many
    /// shortest paths pass through other stations, which is where the
    /// direct-neighbour action space prunes.
    ManhattanGrid { blocks: usize, block_m: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    /// Number of chargers; the start vertex is added on top.
    pub n_stations: usize,
    pub layout: Layout,
    pub speed_kmh: f64,
    pub availability: Availability,
    pub concentration: f64,
    pub seed: u64,
    pub t_max: f64,
    /// Defaults to 120 (200 for variant C).
    pub beta_bar: Option<f64>,
    pub action_space: ActionSpace,
    /// Enables recovery with this mean occupied duration at every charger.
    pub recovery_mu_inv: Option<f64>,
    /// Enables the Zoe energy profile starting at this SoC.
    pub energy_b0: Option<f64>,
    pub radius_m: Option<f64>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_stations: 10,
            layout: Layout::UniformSquare { side_m: 5000.0 },
            speed_kmh: 30.0,
            availability: Availability::Med,
            concentration: DEFAULT_CONCENTRATION,
            seed: 0,
            t_max: 20.0,
            beta_bar: None,
            action_space: ActionSpace::Complete,
            recovery_mu_inv: None,
            energy_b0: None,
            radius_m: None,
        }
    }
}

/// Beta shape parameters with the given mean and total concentration a + b.
pub fn availability_params(mean: f64, concentration: f64) -> Result<(f64, f64)> {
    if !(mean > 0.0 && mean < 1.0) {
        return Err(ScpsError::InvalidParameter(format!("mean {mean} must lie in (0,1)")));
    }
    if !(concentration.is_finite() && concentration > 0.0) {
        return Err(ScpsError::InvalidParameter("concentration must be positive".into()));
    }
    Ok((mean * concentration, (1.0 - mean) * concentration))
}

fn positions(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Result<Vec<[f64; 2]>> {
    let n = cfg.n_stations;
    let mut pts = Vec::with_capacity(n + 1);
    match cfg.layout {
        Layout::UniformSquare { side_m } => {
            pts.push([side_m / 2.0, side_m / 2.0]);
            for _ in 0..n {
                pts.push([rng.random::<f64>() * side_m, rng.random::<f64>() * side_m]);
            }
        }
        Layout::Clustered { clusters, side_m, spread_m } => {
            if clusters == 0 {
                return Err(ScpsError::InvalidParameter("clusters must be at least 1".into()));
            }
            let spread = Normal::new(0.0, spread_m)
                .map_err(|e| ScpsError::InvalidParameter(format!("spread: {e}")))?;
            let centers: Vec<[f64; 2]> = (0..clusters)
                .map(|_| [rng.random::<f64>() * side_m, rng.random::<f64>() * side_m])
                .collect();
            pts.push([side_m / 2.0, side_m / 2.0]);
            for _ in 0..n {
                let c = centers.choose(rng).expect("clusters exist");
                let x = (c[0] + spread.sample(rng)).clamp(0.0, side_m);
                let y = (c[1] + spread.sample(rng)).clamp(0.0, side_m);
                pts.push([x, y]);
            }
        }
        Layout::ManhattanGrid { blocks, block_m } => {
            let side = blocks + 1;
            if side * side < n + 1 {
                return Err(ScpsError::InvalidParameter(format!(
                    "a {blocks}-block grid has fewer than {} intersections",
                    n + 1
                )));
            }
            let mid = (blocks / 2) as f64 * block_m;
            pts.push([mid, mid]);
            let mut taken = vec![false; side * side];
            taken[(blocks / 2) * side + blocks / 2] = true;
            while pts.len() < n + 1 {
                let cell = rng.random_range(0..side * side);
                if !taken[cell] {
                    taken[cell] = true;
                    pts.push([(cell % side) as f64 * block_m, (cell / side) as f64 * block_m]);
                }
            }
        }
    }
    Ok(pts)
}

pub fn generate(cfg: &GenConfig, variant: Variant) -> Result<Instance> {
    if cfg.n_stations == 0 {
        return Err(ScpsError::InvalidParameter("n_stations must be at least 1".into()));
    }
    if !(cfg.speed_kmh.is_finite() && cfg.speed_kmh > 0.0) {
        return Err(ScpsError::InvalidParameter("speed must be positive".into()));
    }
    let (a, b) = availability_params(cfg.availability.mean(), cfg.concentration)?;
    let beta = Beta::new(a, b).map_err(|e| ScpsError::InvalidParameter(format!("beta: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let pts = positions(cfg, &mut rng)?;
    let mut stations = vec![Station {
        pos: Some(pts[0]),
        ..Station::start()
    }];
    for (i, &pos) in pts.iter().enumerate().skip(1) {
        let p = beta.sample(&mut rng);
        let wait = *WAIT_MENU.choose(&mut rng).expect("menu");
        let charge = *CHARGE_MENU.choose(&mut rng).expect("menu");
        stations.push(Station {
            wait,
            charge,
            mu_inv: cfg.recovery_mu_inv,
            pos: Some(pos),
            ..Station::charger(i, p)
        });
    }
    let meters_per_min = cfg.speed_kmh * 1000.0 / 60.0;
    let manhattan = matches!(cfg.layout, Layout::ManhattanGrid { .. });
    let travel: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| {
            pts.iter()
                .map(|q| {
                    let (dx, dy) = ((p[0] - q[0]).abs(), (p[1] - q[1]).abs());
                    let d = if manhattan { dx + dy } else { dx.hypot(dy) };
                    d / meters_per_min
                })
                .collect()
        })
        .collect();
    let energy = cfg.energy_b0.map(|b0| EnergyModel::zoe(&travel, b0));
    let provenance = serde_json::json!({
        "generator": "scps-gen",
        "rng": "ChaCha8Rng",
        "seed": cfg.seed,
        "variant": variant,
        "config": cfg,
    });
    let inst = Instance {
        schema: SCHEMA_VERSION,
        t_max: cfg.t_max,
        variant,
        beta_bar: cfg.beta_bar.unwrap_or(variant.default_beta_bar()),
        action_space: cfg.action_space,
        recovery: cfg.recovery_mu_inv.is_some(),
        energy,
        radius_filter: None,
        stations,
        travel,
        provenance: Some(provenance),
    };
    let inst = match cfg.radius_m {
        Some(r) => inst.with_radius_filter(r)?,
        None => inst,
    };
    inst.ensure_valid()?;
    Ok(inst)
}
