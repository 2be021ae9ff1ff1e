//! Small hand-checkable instances shared by tests, docs and the bindings.

use crate::instance::{ActionSpace, Instance, Station, Variant};

/// Start plus two chargers: t(0,1)=2, t(0,2)=4, t(1,2)=3, both p = 0.5.
///
/// Per variant: A uses beta_bar 10; B has W = (8, 1); C has L = (30, 60) and
/// beta_bar 200; D carries both menus with beta_bar 200.
pub fn tri_station(variant: Variant) -> Instance {
    let mut c1 = Station::charger(1, 0.5);
    let mut c2 = Station::charger(2, 0.5);
    let beta_bar = match variant {
        Variant::A | Variant::B => 10.0,
        Variant::C | Variant::D => 200.0,
    };
    if variant.waits() {
        c1.wait = 8.0;
        c2.wait = 1.0;
    }
    if variant.charge_sensitive() {
        c1.charge = 30.0;
        c2.charge = 60.0;
    }
    Instance {
        schema: 1,
        t_max: 100.0,
        variant,
        beta_bar,
        action_space: ActionSpace::Complete,
        recovery: false,
        energy: None,
        radius_filter: None,
        stations: vec![Station::start(), c1, c2],
        travel: vec![
            vec![0.0, 2.0, 4.0],
            vec![2.0, 0.0, 3.0],
            vec![4.0, 3.0, 0.0],
        ],
        provenance: None,
    }
}
