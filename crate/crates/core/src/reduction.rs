//! Decision-TSP to charging-station search: a tour of length at most theta
//! exists iff the built instance has a plan below the returned threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpsError};
use crate::instance::{ActionSpace, Instance, Station, Variant, SCHEMA_VERSION};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TspReduction {
    pub instance: Instance,
    /// q theta + q^(n+1) beta_{s'}: the bound when every vertex, the start
    /// included, is free with probability 1 - q.
    pub threshold: f64,
    /// The same bound in this crate's cost units, where the start is never free
    /// and so every cost is smaller by the factor q.
    pub scaled_threshold: f64,
    pub beta_s_prime: f64,
    pub beta_other: f64,
    /// Vertex id of the start duplicate.
    pub s_prime: usize,
    /// Original city of each vertex (the duplicate maps to the start city).
    pub city_of: Vec<usize>,
    pub q: f64,
    pub delta: f64,
}

/// Smallest admissible q for largest distance `delta` and `n` cities.
pub fn q_lower_bound(delta: f64, n: usize) -> f64 {
    (1.0 - 1.0 / (delta * (n as f64 + 1.0))).powf(1.0 / (n as f64 - 1.0))
}

pub fn reduce_tsp(cities: &[Vec<f64>], start: usize, q: f64, theta: f64) -> Result<TspReduction> {
    let n = cities.len();
    if n < 2 {
        return Err(ScpsError::InvalidParameter("need at least two cities".into()));
    }
    if start >= n {
        return Err(ScpsError::InvalidParameter(format!("start city {start} out of range")));
    }
    let mut delta: f64 = 0.0;
    for (i, row) in cities.iter().enumerate() {
        if row.len() != n {
            return Err(ScpsError::InvalidParameter(format!("row {i} is not of length {n}")));
        }
        for (j, &d) in row.iter().enumerate() {
            if d.fract() != 0.0 || !d.is_finite() {
                return Err(ScpsError::InvalidParameter(format!("distance ({i},{j}) is not an integer")));
            }
            if i == j {
                if d != 0.0 {
                    return Err(ScpsError::InvalidParameter(format!("distance ({i},{i}) must be 0")));
                }
            } else if d < 1.0 {
                return Err(ScpsError::InvalidParameter(format!("distance ({i},{j}) below 1")));
            }
            delta = delta.max(d);
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if cities[i][j] > cities[i][k] + cities[k][j] {
                    return Err(ScpsError::InvalidParameter(format!(
                        "distances are not metric: ({i},{j}) exceeds the route via {k}"
                    )));
                }
            }
        }
    }
    let q_lo = q_lower_bound(delta, n);
    if !(q >= q_lo && q < 1.0) {
        return Err(ScpsError::InvalidParameter(format!("q = {q} outside [{q_lo}, 1)")));
    }
    let nf = n as f64;
    let beta_s_prime = 2.0 * delta / (q * (1.0 - q)) + 1.0;
    let beta_other = (beta_s_prime + nf * delta) / q.powi(n as i32 + 1) + 1.0;
    // vertex 0 is the start city, then the other cities in order, then s'
    let mut city_of: Vec<usize> = vec![start];
    city_of.extend((0..n).filter(|&c| c != start));
    city_of.push(start);
    let s_prime = n;
    let travel: Vec<Vec<f64>> = (0..=n)
        .map(|i| {
            (0..=n)
                .map(|j| {
                    let same_start = (i == 0 && j == s_prime) || (i == s_prime && j == 0);
                    if i == j || same_start {
                        0.0
                    } else {
                        cities[city_of[i]][city_of[j]]
                    }
                })
                .collect()
        })
        .collect();
    let stations: Vec<Station> = (0..=n)
        .map(|v| {
            let mut s = if v == 0 { Station::start() } else { Station::charger(v, 1.0 - q) };
            s.beta = Some(if v == s_prime { beta_s_prime } else { beta_other });
            s.gamma = Some(0.0);
            s
        })
        .collect();
    let instance = Instance {
        schema: SCHEMA_VERSION,
        t_max: nf * delta,
        variant: Variant::A,
        beta_bar: beta_other,
        action_space: ActionSpace::Complete,
        recovery: false,
        energy: None,
        radius_filter: None,
        stations,
        travel,
        provenance: None,
    };
    instance.ensure_valid()?;
    let threshold = q * theta + q.powi(n as i32 + 1) * beta_s_prime;
    Ok(TspReduction {
        instance,
        threshold,
        scaled_threshold: threshold / q,
        beta_s_prime,
        beta_other,
        s_prime,
        city_of,
        q,
        delta,
    })
}
