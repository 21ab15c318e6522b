//! Reduced costs of candidate routes: exact per assignment, and the two
//! per-position price averages used to rank routes cheaply.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::master::{ColumnPool, DualValues};
use crate::routing::{compute_time_windows, delta, Route, RouteTiming};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PricingMode {
    /// Best assignment per route and shift, evaluated exactly.
    #[serde(rename = "enum")]
    Enumeration,
    /// Plain average of candidate prices per loading position.
    P1,
    /// Quantity-weighted average of candidate prices per loading position.
    P2,
    /// Uniform sampling of enumerated routes, prices ignored.
    Random,
}

impl std::str::FromStr for PricingMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "enum" | "enumeration" => Ok(Self::Enumeration),
            "p1" => Ok(Self::P1),
            "p2" => Ok(Self::P2),
            "random" => Ok(Self::Random),
            _ => Err(format!("unknown pricing mode {s:?}")),
        }
    }
}

impl std::fmt::Display for PricingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Enumeration => "enum",
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::Random => "random",
        })
    }
}

/// One commodity per loading index: `(index, commodity)`.
pub type Assignment = Vec<(usize, usize)>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PricingError {
    #[error("commodity {commodity} cannot be loaded at index {index} in shift {shift}")]
    Infeasible { index: usize, commodity: usize, shift: usize },
    #[error("index {0} carries more than one commodity")]
    Overlap(usize),
}

fn unchecked_exact(route: &Route, w: &[(usize, usize)], duals: &DualValues, shift: usize, timing: &RouteTiming, inst: &Instance) -> f64 {
    let nodes = route.nodes();
    let mut v = route.distance() as f64 + duals.alpha.get(shift).copied().unwrap_or(0.0);
    for i in route.service_positions() {
        v -= duals.beta_at(route, i, shift);
        for (k, c) in inst.commodities.iter().enumerate() {
            if delta(nodes, i, c, timing, &inst.network) {
                v -= duals.gamma_at(route, i, k, shift);
            }
        }
    }
    for &(i, k) in w {
        v += duals.beta_at(route, i, shift) + duals.gamma_at(route, i, k, shift) - duals.pi[k];
    }
    v
}

/// Reduced cost of the column "one truck on `route` in `shift` carrying one
/// unit of each commodity in `w`".
pub fn reduced_cost_exact(
    route: &Route,
    w: &[(usize, usize)],
    duals: &DualValues,
    shift: usize,
    inst: &Instance,
) -> Result<f64, PricingError> {
    let timing = compute_time_windows(route, shift, inst);
    let mut seen = Vec::with_capacity(w.len());
    for &(i, k) in w {
        if seen.contains(&i) {
            return Err(PricingError::Overlap(i));
        }
        seen.push(i);
        if i >= route.len() || !delta(route.nodes(), i, &inst.commodities[k], &timing, &inst.network) {
            return Err(PricingError::Infeasible { index: i, commodity: k, shift });
        }
    }
    Ok(unchecked_exact(route, w, duals, shift, &timing, inst))
}

/// Mean over shifts of the per-shift value; the assignment is not checked
/// against any particular shift.
pub fn reduced_cost_shift_avg(route: &Route, w: &[(usize, usize)], duals: &DualValues, inst: &Instance) -> f64 {
    let s_count = inst.shifts.count.max(1);
    (0..inst.shifts.count)
        .map(|s| unchecked_exact(route, w, duals, s, &compute_time_windows(route, s, inst), inst))
        .sum::<f64>()
        / s_count as f64
}

/// Most negative assignment for one shift; positions are independent, so the
/// best choice per position is the candidate with the largest net price.
pub fn best_assignment(route: &Route, duals: &DualValues, shift: usize, inst: &Instance) -> (f64, Assignment) {
    let timing = compute_time_windows(route, shift, inst);
    let mut w = Vec::new();
    for i in route.service_positions() {
        let mut best: Option<(f64, usize)> = None;
        for (k, c) in inst.commodities.iter().enumerate() {
            if delta(route.nodes(), i, c, &timing, &inst.network) {
                let gain = duals.pi[k] - duals.beta_at(route, i, shift) - duals.gamma_at(route, i, k, shift);
                if gain > 0.0 && best.map_or(true, |(g, _)| gain > g) {
                    best = Some((gain, k));
                }
            }
        }
        if let Some((_, k)) = best {
            w.push((i, k));
        }
    }
    (unchecked_exact(route, &w, duals, shift, &timing, inst), w)
}

/// Commodities that may be loaded at each loading position in some shift.
pub fn candidate_sets(route: &Route, inst: &Instance, by_od: &HashMap<(usize, usize), Vec<usize>>) -> Vec<(usize, Vec<usize>)> {
    let nodes = route.nodes();
    let net = &inst.network;
    let base = compute_time_windows(route, 0, inst);
    let mut out = Vec::new();
    for j in route.service_positions() {
        let mut set = Vec::new();
        if let Some(ks) = by_od.get(&(nodes[j], nodes[j + 1])) {
            for &k in ks {
                let c = &inst.commodities[k];
                let ok = (0..inst.shifts.count).any(|s| {
                    let off = inst.shifts.start(s) - inst.shifts.start(0);
                    base.l[j] + off >= c.available + net.service(nodes[j]) && base.e[j + 1] + off <= c.deadline
                });
                if ok {
                    set.push(k);
                }
            }
        }
        out.push((j, set));
    }
    out
}

pub fn commodities_by_od(inst: &Instance) -> HashMap<(usize, usize), Vec<usize>> {
    let mut m: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, c) in inst.commodities.iter().enumerate() {
        m.entry((c.origin, c.dest)).or_default().push(k);
    }
    m
}

pub fn reduced_cost_avg(route: &Route, duals: &DualValues, inst: &Instance) -> f64 {
    Estimator::new(inst, duals, PricingMode::P1).estimate(route)
}

pub fn reduced_cost_weighted(route: &Route, duals: &DualValues, inst: &Instance) -> f64 {
    Estimator::new(inst, duals, PricingMode::P2).estimate(route)
}

/// Route scorer shared by the pricing pass and the metaheuristics.
pub struct Estimator<'a> {
    pub inst: &'a Instance,
    pub duals: &'a DualValues,
    pub mode: PricingMode,
    by_od: HashMap<(usize, usize), Vec<usize>>,
}

impl<'a> Estimator<'a> {
    pub fn new(inst: &'a Instance, duals: &'a DualValues, mode: PricingMode) -> Self {
        Self { inst, duals, mode, by_od: commodities_by_od(inst) }
    }

    pub fn estimate(&self, route: &Route) -> f64 {
        let d = route.distance() as f64;
        match self.mode {
            PricingMode::P1 | PricingMode::Random => {
                let mut c = d;
                for (_, set) in candidate_sets(route, self.inst, &self.by_od) {
                    if !set.is_empty() {
                        c -= set.iter().map(|&k| self.duals.pi[k]).sum::<f64>() / set.len() as f64;
                    }
                }
                c
            }
            PricingMode::P2 => {
                let mut c = d;
                for (_, set) in candidate_sets(route, self.inst, &self.by_od) {
                    let q = |k: usize| self.inst.commodities[k].quantity;
                    let total: f64 = set.iter().map(|&k| q(k) as f64).sum();
                    if set.iter().all(|&k| q(k) == q(set[0])) {
                        if !set.is_empty() {
                            c -= set.iter().map(|&k| self.duals.pi[k]).sum::<f64>() / set.len() as f64;
                        }
                    } else if total > 0.0 {
                        c -= set
                            .iter()
                            .map(|&k| self.inst.commodities[k].quantity as f64 / total * self.duals.pi[k])
                            .sum::<f64>();
                    }
                }
                c
            }
            PricingMode::Enumeration => (0..self.inst.shifts.count)
                .map(|s| best_assignment(route, self.duals, s, self.inst).0)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PricedColumn {
    pub route: Route,
    pub shift: usize,
    pub assignment: Assignment,
    pub reduced_cost: f64,
}

pub const NEGATIVE_TOL: f64 = 1e-9;

/// Exact pricing over a route list: the best assignment of every route and
/// shift is evaluated, and the `max_columns` most negative routes that are
/// not already in `exclude` are returned, most negative first.
pub fn price_by_enumeration(
    routes: &[Route],
    duals: &DualValues,
    max_columns: usize,
    inst: &Instance,
    exclude: Option<&ColumnPool>,
) -> Vec<PricedColumn> {
    let mut found = Vec::new();
    for route in routes {
        if exclude.is_some_and(|p| p.contains(route)) {
            continue;
        }
        let mut best: Option<PricedColumn> = None;
        for s in 0..inst.shifts.count {
            let (rc, w) = best_assignment(route, duals, s, inst);
            if rc < -NEGATIVE_TOL && best.as_ref().map_or(true, |b| rc < b.reduced_cost) {
                best = Some(PricedColumn { route: route.clone(), shift: s, assignment: w, reduced_cost: rc });
            }
        }
        found.extend(best);
    }
    found.sort_by(|a, b| a.reduced_cost.total_cmp(&b.reduced_cost).then(a.route.cmp(&b.route)));
    found.truncate(max_columns);
    found
}

/// Ranks routes by an estimate and keeps the `max_columns` most negative.
pub fn price_by_estimate(
    routes: &[Route],
    est: &Estimator,
    max_columns: usize,
    exclude: Option<&ColumnPool>,
) -> Vec<(Route, f64)> {
    let mut found: Vec<(Route, f64)> = routes
        .iter()
        .filter(|r| !exclude.is_some_and(|p| p.contains(r)))
        .map(|r| (r.clone(), est.estimate(r)))
        .filter(|(_, c)| *c < -NEGATIVE_TOL)
        .collect();
    found.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    found.truncate(max_columns);
    found
}

/// Uniform sample without replacement, in sampled order.
pub fn price_random_ablation<R: Rng>(routes: &[Route], rng: &mut R, max_columns: usize) -> Vec<Route> {
    let m = max_columns.min(routes.len());
    rand::seq::index::sample(rng, routes.len(), m).into_iter().map(|i| routes[i].clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::worked_example;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn route(inst: &Instance, v: &[usize]) -> Route {
        Route::new(v.to_vec(), &inst.network)
    }

    #[test]
    fn p1_and_p2_by_hand() {
        let mut inst = worked_example();
        let r3 = route(&inst, &[0, 1, 2, 0]);
        let d = DualValues::with_pi(&inst, vec![100.0, 20.0, 0.0, 0.0]);
        assert_eq!(reduced_cost_avg(&r3, &d, &inst), 4.0);
        inst.commodities[0].quantity = 3;
        assert_eq!(reduced_cost_weighted(&r3, &d, &inst), -16.0);

        let inst = worked_example();
        let r1 = route(&inst, &[0, 1, 2, 3, 4, 0]);
        let d = DualValues::with_pi(&inst, vec![79.0; 4]);
        assert_eq!(reduced_cost_avg(&r1, &d, &inst), -79.0);
        assert_eq!(reduced_cost_weighted(&r1, &d, &inst), -79.0);
    }

    #[test]
    fn zero_duals_give_distance() {
        let inst = worked_example();
        let d = DualValues::zeros(&inst);
        let r1 = route(&inst, &[0, 1, 2, 3, 4, 0]);
        assert_eq!(reduced_cost_avg(&r1, &d, &inst), 79.0);
        assert_eq!(reduced_cost_weighted(&r1, &d, &inst), 79.0);
        assert_eq!(reduced_cost_exact(&r1, &[], &d, 0, &inst), Ok(79.0));
        assert_eq!(reduced_cost_shift_avg(&r1, &[], &d, &inst), 79.0);
    }

    #[test]
    fn exact_rejects_infeasible_assignment() {
        let inst = worked_example();
        let d = DualValues::zeros(&inst);
        let r1 = route(&inst, &[0, 1, 2, 3, 4, 0]);
        assert!(reduced_cost_exact(&r1, &[(1, 2)], &d, 0, &inst).is_err());
        assert!(reduced_cost_exact(&r1, &[(1, 0), (1, 1)], &d, 0, &inst).is_err());
        assert_eq!(reduced_cost_exact(&r1, &[(1, 0), (3, 2)], &DualValues::with_pi(&inst, vec![50.0, 0.0, 10.0, 0.0]), 0, &inst), Ok(19.0));
    }

    #[test]
    fn enumeration_admits_all_routes_under_high_prices() {
        let inst = worked_example();
        let routes: Vec<Route> = [vec![0, 1, 2, 3, 4, 0], vec![0, 3, 4, 1, 2, 0], vec![0, 1, 2, 0], vec![0, 3, 4, 0]]
            .iter()
            .map(|v| route(&inst, v))
            .collect();
        let d = DualValues::with_pi(&inst, vec![200.0; 4]);
        assert_eq!(price_by_enumeration(&routes, &d, 10, &inst, None).len(), 4);
        assert!(price_by_enumeration(&routes, &DualValues::zeros(&inst), 10, &inst, None).is_empty());
        assert_eq!(price_by_enumeration(&routes, &d, 2, &inst, None).len(), 2);
    }

    #[test]
    fn random_sample_is_reproducible() {
        let inst = worked_example();
        let routes: Vec<Route> = (1..5).map(|n| route(&inst, &[0, n, if n == 4 { 1 } else { n + 1 }, 0])).collect();
        let a = price_random_ablation(&routes, &mut ChaCha8Rng::seed_from_u64(3), 2);
        let b = price_random_ablation(&routes, &mut ChaCha8Rng::seed_from_u64(3), 2);
        assert_eq!(a, b);
        assert_eq!(price_random_ablation(&routes, &mut ChaCha8Rng::seed_from_u64(3), 10).len(), 4);
    }
}
