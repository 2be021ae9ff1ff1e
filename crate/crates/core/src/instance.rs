//! Instance model: stations, travel matrix, variant parameters and the
//! action-space rules that decide which moves a search may take next.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpsError};
use crate::station_set::{StationSet, MAX_STATIONS};

pub type StationId = usize;

/// Tolerance of the triangle-equality test behind direct neighbours.
pub const DN_EPS: f64 = 1e-9;
/// Slack on state-of-charge comparisons, which accumulate float sums.
pub const SOC_EPS: f64 = 1e-12;
pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TR_MINUTES: f64 = 5.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    A,
    B,
    C,
    D,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::A, Variant::B, Variant::C, Variant::D];

    /// Waiting at the final station is an allowed decision.
    pub fn waits(self) -> bool {
        matches!(self, Variant::B | Variant::D)
    }

    /// Charging duration enters the cost.
    pub fn charge_sensitive(self) -> bool {
        matches!(self, Variant::C | Variant::D)
    }

    pub fn default_beta_bar(self) -> f64 {
        match self {
            Variant::C => 200.0,
            _ => 120.0,
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Some(Variant::A),
            "B" => Some(Variant::B),
            "C" => Some(Variant::C),
            "D" => Some(Variant::D),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ActionSpace {
    #[serde(rename = "CO")]
    Complete,
    #[serde(rename = "DN")]
    DirectNeighbors,
    #[serde(rename = "DN_R")]
    DirectNeighborsRestricted,
    #[serde(rename = "TR")]
    TimeRestricted { t_r: f64 },
}

impl ActionSpace {
    pub fn is_direct(self) -> bool {
        matches!(
            self,
            ActionSpace::DirectNeighbors | ActionSpace::DirectNeighborsRestricted
        )
    }

    /// `co`, `dn`, `dn-r` (or `dn_r`) and `tr`, case-insensitive; `t_r` only matters for `tr`.
    pub fn parse(s: &str, t_r: f64) -> Option<ActionSpace> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "co" => Some(ActionSpace::Complete),
            "dn" => Some(ActionSpace::DirectNeighbors),
            "dn-r" => Some(ActionSpace::DirectNeighborsRestricted),
            "tr" => Some(ActionSpace::TimeRestricted { t_r }),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionSpace::Complete => "CO",
            ActionSpace::DirectNeighbors => "DN",
            ActionSpace::DirectNeighborsRestricted => "DN_R",
            ActionSpace::TimeRestricted { .. } => "TR",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub id: StationId,
    pub p: f64,
    #[serde(default)]
    pub wait: f64,
    #[serde(default)]
    pub charge: f64,
    /// Explicit usage cost, overriding the value the variant would derive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Explicit termination penalty, overriding the variant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Mean occupied duration 1/mu in minutes, used by the recovery model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_inv: Option<f64>,
    /// Planar position in meters; only needed for radius filtering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<[f64; 2]>,
}

impl Station {
    pub fn start() -> Station {
        Station::charger(0, 0.0)
    }

    pub fn charger(id: StationId, p: f64) -> Station {
        Station {
            id,
            p,
            wait: 0.0,
            charge: 0.0,
            gamma: None,
            beta: None,
            mu_inv: None,
            pos: None,
        }
    }
}

/// Battery model. State of charge is a fraction of full capacity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub b0: f64,
    pub b_min: f64,
    pub capacity_kwh: f64,
    /// SoC fraction consumed on each arc.
    pub consumption: Vec<Vec<f64>>,
}

impl EnergyModel {
    /// Renault Zoe profile: 52 kWh, 395 km range driven at a constant 50 km/h,
    /// 20 % reserve. Consumption is proportional to travel time.
    pub fn zoe(travel: &[Vec<f64>], b0: f64) -> EnergyModel {
        let autonomy_min = 395.0 / 50.0 * 60.0;
        EnergyModel {
            b0,
            b_min: 0.2,
            capacity_kwh: 52.0,
            consumption: travel
                .iter()
                .map(|row| row.iter().map(|t| t / autonomy_min).collect())
                .collect(),
        }
    }
}

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(default = "schema_version")]
    pub schema: u32,
    pub t_max: f64,
    pub variant: Variant,
    pub beta_bar: f64,
    pub action_space: ActionSpace,
    #[serde(default)]
    pub recovery: bool,
    #[serde(default)]
    pub energy: Option<EnergyModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_filter: Option<f64>,
    pub stations: Vec<Station>,
    pub travel: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchPlan {
    pub visits: Vec<StationId>,
    #[serde(default)]
    pub wait_at_end: bool,
}

impl SearchPlan {
    pub fn degenerate() -> SearchPlan {
        SearchPlan {
            visits: vec![0],
            wait_at_end: false,
        }
    }

    pub fn new(visits: Vec<StationId>, wait_at_end: bool) -> SearchPlan {
        SearchPlan { visits, wait_at_end }
    }

    pub fn last(&self) -> StationId {
        *self.visits.last().unwrap_or(&0)
    }
}

/// A move `(c, w)`: drive to `station`, and terminate by waiting there if `wait`.
/// `station == current` with `wait` is the wait self-arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Action {
    pub station: StationId,
    pub wait: bool,
}

/// Where a search currently stands, as far as successor generation cares.
#[derive(Clone, Copy, Debug)]
pub struct StateView<'a> {
    pub current: StationId,
    pub elapsed: f64,
    pub soc: f64,
    pub visited: &'a StationSet,
}

/// Precomputed graph data shared by all solvers on one instance.
#[derive(Clone, Debug)]
pub struct Topology {
    /// Shortest-path closure of the travel matrix.
    pub dist: Vec<Vec<f64>>,
    /// Shortest-path closure of arc energy, if the energy model is on.
    pub energy_dist: Option<Vec<Vec<f64>>>,
    /// `direct[i][j]`: no charger lies on a shortest i-j path.
    pub direct: Vec<Vec<bool>>,
}

fn closure(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut d = m.to_vec();
    let n = d.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

impl Instance {
    pub fn n(&self) -> usize {
        self.stations.len()
    }

    pub fn chargers(&self) -> impl Iterator<Item = StationId> {
        1..self.stations.len()
    }

    pub fn charger_count(&self) -> usize {
        self.stations.len().saturating_sub(1)
    }

    pub fn travel(&self, i: StationId, j: StationId) -> f64 {
        self.travel[i][j]
    }

    pub fn arc_energy(&self, i: StationId, j: StationId) -> f64 {
        self.energy.as_ref().map_or(0.0, |e| e.consumption[i][j])
    }

    pub fn initial_soc(&self) -> f64 {
        self.energy.as_ref().map_or(1.0, |e| e.b0)
    }

    pub fn soc_floor(&self) -> f64 {
        self.energy.as_ref().map_or(0.0, |e| e.b_min)
    }

    /// Charging time at `c` after `depleted` SoC has been used, prorated linearly.
    pub fn charge_time(&self, c: StationId, depleted: f64) -> f64 {
        let l = self.stations[c].charge;
        match &self.energy {
            Some(e) if e.b0 < 1.0 => l + depleted * l / (1.0 - e.b0),
            _ => l,
        }
    }

    /// Usage cost gamma of station `c` when reached with `depleted` SoC used.
    pub fn gamma_at(&self, c: StationId, depleted: f64) -> f64 {
        if let Some(g) = self.stations[c].gamma {
            return g;
        }
        if c == 0 {
            return 0.0;
        }
        match self.variant {
            Variant::A | Variant::B => 0.0,
            Variant::C | Variant::D => self.charge_time(c, depleted),
        }
    }

    /// Termination penalty beta of station `c`.
    pub fn beta_at(&self, c: StationId, depleted: f64) -> f64 {
        if let Some(b) = self.stations[c].beta {
            return b;
        }
        if c == 0 {
            return self.beta_bar;
        }
        match self.variant {
            Variant::A | Variant::C => self.beta_bar,
            Variant::B => self.stations[c].wait,
            Variant::D => self.stations[c].wait + self.charge_time(c, depleted),
        }
    }

    pub fn gamma(&self, c: StationId) -> f64 {
        self.gamma_at(c, 0.0)
    }

    pub fn beta(&self, c: StationId) -> f64 {
        self.beta_at(c, 0.0)
    }

    /// Largest SoC drop any feasible path can accumulate.
    pub fn max_depletion(&self) -> f64 {
        self.energy.as_ref().map_or(0.0, |e| (e.b0 - e.b_min).max(0.0))
    }

    /// Smallest travel time between distinct vertices.
    pub fn min_travel(&self) -> f64 {
        let mut m = f64::INFINITY;
        for (i, row) in self.travel.iter().enumerate() {
            for (j, &t) in row.iter().enumerate() {
                if i != j && t < m {
                    m = t;
                }
            }
        }
        m
    }

    /// Largest charger availability.
    pub fn max_p(&self) -> f64 {
        self.chargers().map(|c| self.stations[c].p).fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        let n = self.stations.len();
        if n == 0 {
            v.push("stations: at least the start vertex is required".to_string());
            return v;
        }
        if n > MAX_STATIONS {
            v.push(format!("stations: {n} vertices exceed the limit of {MAX_STATIONS}"));
        }
        if self.schema != SCHEMA_VERSION {
            v.push(format!("schema: unsupported version {}", self.schema));
        }
        if !(self.t_max.is_finite() && self.t_max >= 0.0) {
            v.push("t_max: must be finite and >= 0".to_string());
        }
        if !(self.beta_bar.is_finite() && self.beta_bar >= 0.0) {
            v.push("beta_bar: must be finite and >= 0".to_string());
        }
        if let ActionSpace::TimeRestricted { t_r } = self.action_space {
            if !(t_r.is_finite() && t_r > 0.0) {
                v.push("action_space: t_r must be positive".to_string());
            }
        }
        if let Some(r) = self.radius_filter {
            if !(r.is_finite() && r >= 0.0) {
                v.push("radius_filter: must be finite and >= 0".to_string());
            }
        }
        for (i, s) in self.stations.iter().enumerate() {
            if s.id != i {
                v.push(format!("station {i}: id {} breaks dense numbering", s.id));
            }
            if !(s.p.is_finite() && (0.0..=1.0).contains(&s.p)) {
                v.push(format!("station {i}: p out of [0,1]"));
            }
            let durations = [
                ("wait", Some(s.wait)),
                ("charge", Some(s.charge)),
                ("gamma", s.gamma),
                ("beta", s.beta),
            ];
            for (name, val) in durations {
                if let Some(x) = val {
                    if !(x.is_finite() && x >= 0.0) {
                        v.push(format!("station {i}: {name} must be finite and >= 0"));
                    }
                }
            }
            if let Some(m) = s.mu_inv {
                if !(m.is_finite() && m > 0.0) {
                    v.push(format!("station {i}: mu_inv must be positive"));
                }
            } else if self.recovery && i > 0 {
                v.push(format!("station {i}: recovery enabled but mu_inv missing"));
            }
        }
        let start = &self.stations[0];
        if start.p != 0.0 {
            v.push("station 0: start vertex must have p = 0".to_string());
        }
        if start.gamma.unwrap_or(0.0) != 0.0 {
            v.push("station 0: start vertex must have gamma = 0".to_string());
        }
        let matrix_ok = check_matrix("travel", &self.travel, n, &mut v);
        if matrix_ok {
            for i in 0..n {
                for j in 0..n {
                    let t = self.travel[i][j];
                    if !t.is_finite() {
                        v.push(format!("arc ({i},{j}): travel time not finite"));
                    } else if i == j && t != 0.0 {
                        v.push(format!("arc ({i},{i}): nonzero self travel"));
                    } else if t < 0.0 {
                        v.push(format!("arc ({i},{j}): negative travel time"));
                    }
                }
            }
            if self.recovery && n > 1 && !(self.min_travel() > 0.0) {
                v.push("travel: recovery requires a positive minimum travel time".to_string());
            }
        }
        if let Some(e) = &self.energy {
            if !(0.0..=1.0).contains(&e.b0) || !(0.0..=1.0).contains(&e.b_min) || e.b_min > e.b0 {
                v.push("energy: need 0 <= b_min <= b0 <= 1".to_string());
            }
            if self.variant.charge_sensitive() && e.b0 >= 1.0 {
                v.push("energy: b0 must be below 1 to prorate charging time".to_string());
            }
            if !(e.capacity_kwh.is_finite() && e.capacity_kwh > 0.0) {
                v.push("energy: capacity_kwh must be positive".to_string());
            }
            if check_matrix("energy.consumption", &e.consumption, n, &mut v) {
                for (i, row) in e.consumption.iter().enumerate() {
                    for (j, &k) in row.iter().enumerate() {
                        if !(k.is_finite() && k >= 0.0) {
                            v.push(format!("energy arc ({i},{j}): consumption must be >= 0"));
                        }
                    }
                }
            }
        }
        v
    }

    /// Extra requirements of the sharpened dominance rule.
    pub fn sharpened_violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        if self.n() > 1 && !(self.min_travel() > 0.0) {
            v.push("travel: sharpened dominance needs a positive minimum travel time".to_string());
        }
        if self.max_p() >= 1.0 {
            v.push("stations: sharpened dominance needs every p < 1".to_string());
        }
        v
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ScpsError::InvalidInstance(v))
        }
    }

    pub fn from_json_str(s: &str) -> Result<Instance> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Instance> {
        let text = std::fs::read_to_string(path)?;
        Instance::from_json_str(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string() + "\n")?;
        Ok(())
    }

    /// Drop every station farther than `radius` meters from the start and renumber.
    pub fn with_radius_filter(mut self, radius: f64) -> Result<Instance> {
        let origin = self.stations[0]
            .pos
            .ok_or_else(|| ScpsError::InvalidParameter("radius filter needs station positions".into()))?;
        let mut keep = Vec::new();
        for (i, s) in self.stations.iter().enumerate() {
            let pos = s.pos.ok_or_else(|| {
                ScpsError::InvalidParameter(format!("station {i}: radius filter needs a position"))
            })?;
            let d = ((pos[0] - origin[0]).powi(2) + (pos[1] - origin[1]).powi(2)).sqrt();
            if i == 0 || d <= radius {
                keep.push(i);
            }
        }
        let pick = |m: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            keep.iter().map(|&i| keep.iter().map(|&j| m[i][j]).collect()).collect()
        };
        self.travel = pick(&self.travel);
        if let Some(e) = self.energy.as_mut() {
            e.consumption = pick(&e.consumption);
        }
        self.stations = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| Station { id: new, ..self.stations[old].clone() })
            .collect();
        self.radius_filter = Some(radius);
        Ok(self)
    }

    pub fn topology(&self) -> Topology {
        let n = self.n();
        let dist = closure(&self.travel);
        let energy_dist = self.energy.as_ref().map(|e| closure(&e.consumption));
        let mut direct = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let t = self.travel[i][j];
                direct[i][j] = !(1..n).any(|d| {
                    d != i && d != j && t >= self.travel[i][d] + self.travel[d][j] - DN_EPS
                });
            }
        }
        Topology {
            dist,
            energy_dist,
            direct,
        }
    }

    fn energy_ok(&self, soc_after: f64) -> bool {
        self.energy.is_none() || soc_after >= self.soc_floor() - SOC_EPS
    }

    /// Every action allowed from `view` under the variant and the action space.
    /// An empty result is a forced termination state.
    pub fn successors(&self, topo: &Topology, view: &StateView) -> Vec<Action> {
        let n = self.n();
        let cur = view.current;
        let waits = self.variant.waits();
        let remaining = self.t_max - view.elapsed;
        let mut out = Vec::new();
        for c in 1..n {
            if c == cur {
                if waits {
                    out.push(Action { station: c, wait: true });
                }
                continue;
            }
            let t = self.travel[cur][c];
            if t > remaining || !self.energy_ok(view.soc - self.arc_energy(cur, c)) {
                continue;
            }
            if let ActionSpace::TimeRestricted { t_r } = self.action_space {
                if t > t_r {
                    continue;
                }
            }
            if self.action_space.is_direct() && !topo.direct[cur][c] {
                continue;
            }
            let visited = view.visited.contains(c);
            let revisit_ok = self.recovery && self.action_space != ActionSpace::DirectNeighborsRestricted;
            if !visited
                || revisit_ok
                || (self.action_space == ActionSpace::DirectNeighbors && self.is_waypoint(view, c))
            {
                out.push(Action { station: c, wait: false });
            }
            if waits {
                out.push(Action { station: c, wait: true });
            }
        }
        out
    }

    /// A visited station may be passed through in DN only on its way to a target:
    /// an unvisited charger, or for waiting variants any other charger.
    fn is_waypoint(&self, view: &StateView, c: StationId) -> bool {
        let cur = view.current;
        let t_cc = self.travel[cur][c];
        let soc_c = view.soc - self.arc_energy(cur, c);
        let remaining = self.t_max - view.elapsed;
        (1..self.n()).any(|d| {
            d != c
                && d != cur
                && (self.variant.waits() || !view.visited.contains(d))
                && t_cc + self.travel[c][d] <= remaining
                && t_cc + self.travel[c][d] <= self.travel[cur][d] + DN_EPS
                && self.energy_ok(soc_c - self.arc_energy(c, d))
        })
    }

    /// Successors after following `prefix` from the start.
    pub fn feasible_successors(&self, prefix: &[StationId]) -> Result<Vec<Action>> {
        let (elapsed, soc, visited) = self.replay(prefix)?;
        let topo = self.topology();
        let view = StateView {
            current: *prefix.last().unwrap(),
            elapsed,
            soc,
            visited: &visited,
        };
        Ok(self.successors(&topo, &view))
    }

    /// Walk a visit prefix, returning elapsed time, SoC and visited set.
    pub fn replay(&self, prefix: &[StationId]) -> Result<(f64, f64, StationSet)> {
        if prefix.first() != Some(&0) {
            return Err(ScpsError::InfeasiblePlan("visits must start at station 0".into()));
        }
        let mut elapsed = 0.0;
        let mut soc = self.initial_soc();
        let mut visited = StationSet::empty();
        for w in prefix.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b >= self.n() {
                return Err(ScpsError::InfeasiblePlan(format!("unknown station {b}")));
            }
            elapsed += self.travel[a][b];
            soc -= self.arc_energy(a, b);
            visited.insert(b);
        }
        if elapsed > self.t_max {
            return Err(ScpsError::InfeasiblePlan(format!(
                "travel {elapsed} exceeds budget {}",
                self.t_max
            )));
        }
        if !self.energy_ok(soc) {
            return Err(ScpsError::InfeasiblePlan("state of charge drops below floor".into()));
        }
        Ok((elapsed, soc, visited))
    }
}

fn check_matrix(name: &str, m: &[Vec<f64>], n: usize, v: &mut Vec<String>) -> bool {
    if m.len() != n {
        v.push(format!("{name}: expected {n} rows, found {}", m.len()));
        return false;
    }
    let mut ok = true;
    for (i, row) in m.iter().enumerate() {
        if row.len() != n {
            v.push(format!("{name}: row {i} has {} entries, expected {n}", row.len()));
            ok = false;
        }
    }
    ok
}
