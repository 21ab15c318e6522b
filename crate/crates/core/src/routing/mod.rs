//! Routes in duplicated-node encoding, time windows, service feasibility and
//! push-back propagation.
//!
//! A route is `0, o1, d1, o2, d2, ..., 0`: odd positions load, even positions
//! unload. A terminal that unloads and then loads appears twice in a row.

mod cuts;
mod enumerate;
mod simulate;

pub use cuts::{detect_incompatibilities, IncompatiblePair};
pub use enumerate::{enumerate_routes, EnumerateOptions};
pub use simulate::{round_robin_loads, simulate_schedule, SimulationReport, SimViolation};

use std::fmt;

use crate::instance::{Commodity, Instance, Km, Minutes, Network, DEPOT};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Route {
    nodes: Vec<usize>,
    distance: Km,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum RoutingError {
    #[error("route must start and end at the depot")]
    NotDepotBound,
    #[error("route length {0} is odd")]
    OddLength(usize),
    #[error("node {0} is not in the network")]
    UnknownNode(usize),
    #[error("index {index} out of range for a route of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("enumeration budget exhausted after {0} routes")]
    BudgetExceeded(usize),
}

impl Route {
    /// Builds a route and sums its arc distances. Structure is not checked;
    /// see [`Route::check`].
    pub fn new(nodes: Vec<usize>, net: &Network) -> Self {
        let distance = nodes.windows(2).map(|w| net.dist(w[0], w[1])).sum();
        Self { nodes, distance }
    }

    pub fn from_legs(legs: &[(usize, usize)], net: &Network) -> Self {
        let mut nodes = Vec::with_capacity(2 * legs.len() + 2);
        nodes.push(DEPOT);
        for &(o, d) in legs {
            nodes.push(o);
            nodes.push(d);
        }
        nodes.push(DEPOT);
        Self::new(nodes, net)
    }

    pub fn check(&self, net: &Network) -> Result<(), RoutingError> {
        let n = &self.nodes;
        if n.len() < 2 || n[0] != DEPOT || n[n.len() - 1] != DEPOT {
            return Err(RoutingError::NotDepotBound);
        }
        if n.len() % 2 != 0 {
            return Err(RoutingError::OddLength(n.len()));
        }
        if let Some(&bad) = n.iter().find(|&&v| v >= net.node_count()) {
            return Err(RoutingError::UnknownNode(bad));
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn distance(&self) -> Km {
        self.distance
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 2
    }

    pub fn leg_count(&self) -> usize {
        self.nodes.len().saturating_sub(2) / 2
    }

    /// Loaded legs as (origin, destination) pairs.
    pub fn legs(&self) -> Vec<(usize, usize)> {
        self.nodes[1..self.nodes.len() - 1].chunks(2).map(|c| (c[0], c[1])).collect()
    }

    /// Loading positions 1, 3, 5, ...
    pub fn service_positions(&self) -> impl Iterator<Item = usize> {
        (1..self.nodes.len().saturating_sub(1)).step_by(2)
    }

    /// Minutes from leaving the depot to returning, ignoring commodity windows.
    pub fn duration(&self, net: &Network) -> Minutes {
        self.nodes
            .windows(2)
            .map(|w| net.service(w[0]) + net.travel(w[0], w[1]))
            .sum()
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.nodes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteTiming {
    pub shift: usize,
    /// Earliest service start per index.
    pub e: Vec<Minutes>,
    /// Latest departure per index.
    pub l: Vec<Minutes>,
}

pub fn compute_time_windows(route: &Route, shift: usize, inst: &Instance) -> RouteTiming {
    let net = &inst.network;
    let r = route.nodes();
    let len = r.len();
    let mut e = vec![0; len];
    let mut l = vec![0; len];
    if len == 0 {
        return RouteTiming { shift, e, l };
    }
    e[0] = inst.shifts.start(shift);
    for i in 1..len {
        e[i] = e[i - 1] + net.service(r[i - 1]) + net.travel(r[i - 1], r[i]);
    }
    l[len - 1] = inst.shifts.end(shift);
    for i in (0..len - 1).rev() {
        l[i] = l[i + 1] - net.service(r[i + 1]) - net.travel(r[i], r[i + 1]);
    }
    RouteTiming { shift, e, l }
}

pub fn is_distance_feasible(route: &Route, shift: usize, inst: &Instance) -> bool {
    let _ = shift;
    route.duration(&inst.network) <= inst.shifts.duration
}

/// The indicator that commodity `k` may be loaded at index `i`.
pub fn service_feasible(
    route: &Route,
    i: usize,
    k: &Commodity,
    timing: &RouteTiming,
    inst: &Instance,
) -> Result<bool, RoutingError> {
    let len = route.len();
    if i >= len {
        return Err(RoutingError::IndexOutOfRange { index: i, len });
    }
    Ok(delta(route.nodes(), i, k, timing, &inst.network))
}

pub(crate) fn delta(r: &[usize], i: usize, k: &Commodity, timing: &RouteTiming, net: &Network) -> bool {
    i % 2 == 1
        && i + 1 < r.len()
        && r[i] == k.origin
        && r[i + 1] == k.dest
        && timing.l[i] >= k.available + net.service(r[i])
        && timing.e[i + 1] <= k.deadline
}

/// Units of commodity `commodity` loaded at route index `index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Flow {
    pub index: usize,
    pub commodity: usize,
    pub units: u32,
}

/// Service starts after availability delays, each delay carried in full to
/// every later index.
pub fn propagate_push_back(route: &Route, timing: &RouteTiming, flows: &[Flow], inst: &Instance) -> Vec<Minutes> {
    let net = &inst.network;
    let r = route.nodes();
    let mut ep = timing.e.clone();
    for i in 0..r.len() {
        if i > 0 {
            ep[i] = ep[i - 1] + net.service(r[i - 1]) + net.travel(r[i - 1], r[i]);
        }
        for f in flows.iter().filter(|f| f.index == i && f.units > 0) {
            ep[i] = ep[i].max(inst.commodities[f.commodity].available);
        }
    }
    ep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::worked_example;

    fn hm(h: i64, m: i64) -> Minutes {
        h * 60 + m
    }

    #[test]
    fn time_windows_of_the_worked_example() {
        let inst = worked_example();
        let r1 = Route::new(vec![0, 1, 2, 3, 4, 0], &inst.network);
        let t = compute_time_windows(&r1, 0, &inst);
        assert_eq!(t.e, vec![hm(8, 0), hm(8, 15), hm(9, 35), hm(10, 5), hm(11, 25), hm(13, 5)]);
        assert_eq!(t.l, vec![895, 940, 1020, 1060, 1160, 1200]);
        let r2 = Route::new(vec![0, 3, 4, 1, 2, 0], &inst.network);
        let t = compute_time_windows(&r2, 0, &inst);
        assert_eq!(t.e, vec![hm(8, 0), hm(8, 50), hm(10, 10), hm(11, 50), hm(13, 10), hm(14, 30)]);
    }

    #[test]
    fn degenerate_route() {
        let inst = worked_example();
        let r = Route::new(vec![0, 0], &inst.network);
        let t = compute_time_windows(&r, 0, &inst);
        assert_eq!(t.e, vec![480, 480]);
        assert!(is_distance_feasible(&r, 0, &inst));
        assert_eq!(r.distance(), 0);
        assert!(r.check(&inst.network).is_ok());
    }

    #[test]
    fn short_shift_rejects_long_route() {
        let mut inst = worked_example();
        let r = Route::new(vec![0, 1, 2, 3, 4, 0], &inst.network);
        assert!(is_distance_feasible(&r, 0, &inst));
        inst.shifts.duration = 240;
        assert!(!is_distance_feasible(&r, 0, &inst));
    }

    #[test]
    fn delta_conditions() {
        let inst = worked_example();
        let r = Route::new(vec![0, 1, 2, 3, 4, 0], &inst.network);
        let t = compute_time_windows(&r, 0, &inst);
        let k1 = &inst.commodities[0];
        let v1 = &inst.commodities[2];
        assert_eq!(service_feasible(&r, 1, k1, &t, &inst), Ok(true));
        assert_eq!(service_feasible(&r, 2, k1, &t, &inst), Ok(false));
        assert_eq!(service_feasible(&r, 1, v1, &t, &inst), Ok(false));
        assert_eq!(service_feasible(&r, 3, v1, &t, &inst), Ok(true));
        assert!(service_feasible(&r, 9, v1, &t, &inst).is_err());
    }

    #[test]
    fn push_back_rows() {
        let inst = worked_example();
        let r1 = Route::new(vec![0, 1, 2, 3, 4, 0], &inst.network);
        let t = compute_time_windows(&r1, 0, &inst);
        let k1 = Flow { index: 1, commodity: 0, units: 1 };
        let ep = propagate_push_back(&r1, &t, &[k1], &inst);
        assert_eq!(ep, vec![hm(8, 0), hm(13, 40), hm(15, 0), hm(15, 30), hm(16, 50), hm(18, 30)]);
        assert_eq!(ep[1] - t.e[1], 325);
        let r2 = Route::new(vec![0, 3, 4, 1, 2, 0], &inst.network);
        let t = compute_time_windows(&r2, 0, &inst);
        let ep = propagate_push_back(&r2, &t, &[Flow { index: 3, ..k1 }], &inst);
        assert_eq!(ep, vec![hm(8, 0), hm(8, 50), hm(10, 10), hm(13, 40), hm(15, 0), hm(16, 20)]);
        assert_eq!(propagate_push_back(&r2, &t, &[], &inst), t.e);
    }

    #[test]
    fn distances_of_the_four_routes() {
        let net = worked_example().network;
        let d = |v: Vec<usize>| Route::new(v, &net).distance();
        assert_eq!(d(vec![0, 1, 2, 3, 4, 0]), 79);
        assert_eq!(d(vec![0, 3, 4, 1, 2, 0]), 129);
        assert_eq!(d(vec![0, 1, 2, 0]), 64);
        assert_eq!(d(vec![0, 3, 4, 0]), 75);
    }
}
