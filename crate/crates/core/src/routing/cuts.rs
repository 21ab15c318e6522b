//! Incompatible commodity pairs caused by availability push-back.

use super::{compute_time_windows, propagate_push_back, Flow, Route};
use crate::instance::{Instance, Minutes};

/// Loading `k` at `i` delays the route by more than `v`, loaded at `j >= i`,
/// can absorb.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IncompatiblePair {
    pub route: Route,
    pub shift: usize,
    pub i: usize,
    pub k: usize,
    pub j: usize,
    pub v: usize,
    pub k_push_back: Minutes,
    pub v_acceptable_push_back: Minutes,
}

impl IncompatiblePair {
    /// Identity used for de-duplication; the minute fields are diagnostic.
    pub fn key(&self) -> (&Route, usize, usize, usize, usize, usize) {
        (&self.route, self.shift, self.i, self.k, self.j, self.v)
    }
}

/// `flows` are the aggregate flows of one route instance, treated as if a
/// single truck carried all of them.
pub fn detect_incompatibilities(route: &Route, flows: &[Flow], shift: usize, inst: &Instance) -> Vec<IncompatiblePair> {
    let timing = compute_time_windows(route, shift, inst);
    let e = &timing.e;
    let ep = propagate_push_back(route, &timing, flows, inst);
    let mut loaded: Vec<(usize, usize)> = flows
        .iter()
        .filter(|f| f.units > 0 && f.index % 2 == 1 && f.index + 1 < route.len())
        .map(|f| (f.index, f.commodity))
        .collect();
    loaded.sort_unstable();
    loaded.dedup();

    let mut pushers = Vec::new();
    let mut victims = Vec::new();
    for &(i, k) in &loaded {
        let c = &inst.commodities[k];
        if c.available > e[i] {
            let accu = ep[i - 1] - e[i - 1];
            pushers.push((i, k, (c.available - e[i] - accu).max(0)));
        }
        if c.deadline < ep[i + 1] {
            victims.push((i, k, c.deadline - e[i + 1]));
        }
    }

    let mut out = Vec::new();
    for &(i, k, push) in &pushers {
        for &(j, v, acceptable) in &victims {
            if i <= j && (i, k) != (j, v) && push > acceptable {
                out.push(IncompatiblePair {
                    route: route.clone(),
                    shift,
                    i,
                    k,
                    j,
                    v,
                    k_push_back: push,
                    v_acceptable_push_back: acceptable,
                });
            }
        }
    }
    out.sort_by_key(|p| (p.i, p.k, p.j, p.v));
    out
}
