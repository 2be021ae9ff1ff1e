//! Stochastic charging-station search.
//!
//! A driver visits charging stations in some order until one is free. Each
//! station is free with some probability, driving costs time, and when every
//! visited station is occupied a penalty is due. A [`SearchPlan`] fixes the
//! order; [`mdp::expected_cost`] prices it, and the solvers look for cheap ones:
//!
//! - [`labeling`]: label-setting dynamic program, exact or heuristic
//! - [`rollout`]: one-step lookahead over a greedy base policy
//! - [`baselines`]: greedy and nearest-station policies
//! - [`oracle`]: exhaustive enumeration for small instances
//!
//! [`simulation`] replays plans on sampled availabilities.
//!
//! ```
//! use scps::fixtures::tri_station;
//! use scps::instance::Variant;
//! use scps::labeling::{solve, LabelingConfig};
//!
//! let inst = tri_station(Variant::A);
//! let out = solve(&inst, &LabelingConfig::exact()).unwrap();
//! assert_eq!(out.plan.visits, vec![0, 1, 2]);
//! assert!((out.cost.alpha - 6.0).abs() < 1e-12);
//! ```

pub mod baselines;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod instance;
pub mod labeling;
pub mod mdp;
pub mod oracle;
pub mod reduction;
pub mod rollout;
pub mod simulation;
pub mod solver;
pub mod station_set;

pub use error::{Result, ScpsError};
pub use instance::{Action, ActionSpace, Instance, SearchPlan, Station, Variant};
pub use mdp::CostBreakdown;
pub use solver::{solve, Algorithm, SolveOptions, SolveOutput};
