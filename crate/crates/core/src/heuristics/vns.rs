use crate::instance::Instance;
use crate::master::ColumnPool;
use crate::pricing::{Estimator, NEGATIVE_TOL};
use crate::routing::{is_distance_feasible, Route};

use super::moves::{relocate_moves, swap_moves, two_opt_moves, Legs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct VnsParams {
    pub max_columns: usize,
    /// Number of times the search may return to the first neighbourhood.
    pub max_resets: usize,
    pub max_legs: usize,
}

impl Default for VnsParams {
    fn default() -> Self {
        Self { max_columns: 1000, max_resets: 50, max_legs: 12 }
    }
}

#[derive(Clone, Debug)]
pub struct VnsOutcome {
    /// The best negative routes met during the search, plus the start routes.
    pub pool: ColumnPool,
    /// Best estimate in the working set after each reset.
    pub resets: Vec<f64>,
    pub evaluations: usize,
}

struct Search<'a, 'b> {
    inst: &'a Instance,
    est: &'a Estimator<'b>,
    params: VnsParams,
    pool: ColumnPool,
    evaluations: usize,
}

impl Search<'_, '_> {
    /// `None` for routes that do not fit in a shift.
    fn score(&mut self, legs: &[(usize, usize)]) -> Option<(Route, f64)> {
        if legs.is_empty() || legs.len() > self.params.max_legs {
            return None;
        }
        let r = Route::from_legs(legs, &self.inst.network);
        if !is_distance_feasible(&r, 0, self.inst) {
            return None;
        }
        self.evaluations += 1;
        let c = self.est.estimate(&r);
        if c < -NEGATIVE_TOL {
            self.pool.offer(r.clone(), c, 0);
        }
        Some((r, c))
    }

    /// Best route produced by neighbourhood `k` over the working set.
    fn explore(&mut self, k: usize, work: &[Legs]) -> Option<(Legs, f64)> {
        let mut best: Option<(Legs, f64)> = None;
        let consider = |s: &mut Self, legs: Legs, best: &mut Option<(Legs, f64)>| {
            if let Some((_, c)) = s.score(&legs) {
                if best.as_ref().map_or(true, |b| c < b.1 || (c == b.1 && legs < b.0)) {
                    *best = Some((legs, c));
                }
            }
        };
        match k {
            0 => {
                for p in 0..work.len() {
                    for q in p + 1..work.len() {
                        for (a, b) in swap_moves(&work[p], &work[q]) {
                            consider(self, a, &mut best);
                            consider(self, b, &mut best);
                        }
                    }
                }
            }
            1 => {
                for w in work {
                    for a in two_opt_moves(w) {
                        consider(self, a, &mut best);
                    }
                }
            }
            _ => {
                for p in 0..work.len() {
                    for q in 0..work.len() {
                        if p == q {
                            continue;
                        }
                        for (a, b) in relocate_moves(&work[p], &work[q]) {
                            consider(self, a, &mut best);
                            consider(self, b, &mut best);
                        }
                    }
                }
            }
        }
        best
    }
}

/// Variable neighbourhood search seeded with the routes used by the current
/// master solution. Neighbourhoods are tried in order: leg swap between two
/// routes, leg exchange within a route, leg relocation. A strict improvement
/// of the best estimate adds the improving route to the working set and
/// restarts from the first neighbourhood.
pub fn vns_generate(z: &[Route], est: &Estimator, params: VnsParams) -> VnsOutcome {
    let inst = est.inst;
    let mut s = Search { inst, est, params, pool: ColumnPool::with_capacity(params.max_columns), evaluations: 0 };
    let mut work: Vec<Legs> = Vec::new();
    let mut best = f64::INFINITY;
    for r in z {
        let legs = r.legs();
        if work.contains(&legs) {
            continue;
        }
        if let Some((_, c)) = s.score(&legs) {
            best = best.min(c);
        }
        work.push(legs);
    }
    let mut resets = Vec::new();
    let mut k = 0;
    while k < 3 && resets.len() < params.max_resets {
        match s.explore(k, &work) {
            Some((legs, c)) if c < best - NEGATIVE_TOL => {
                best = c;
                if !work.contains(&legs) {
                    work.push(legs);
                }
                resets.push(best);
                k = 0;
            }
            _ => k += 1,
        }
    }
    let mut pool = s.pool;
    for r in z {
        pool.force(r.clone(), est.estimate(r), 0);
    }
    VnsOutcome { pool, resets, evaluations: s.evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::worked_example;
    use crate::master::DualValues;
    use crate::pricing::PricingMode;

    fn dedicated(inst: &Instance) -> Vec<Route> {
        vec![Route::new(vec![0, 1, 2, 0], &inst.network), Route::new(vec![0, 3, 4, 0], &inst.network)]
    }

    #[test]
    fn zero_duals_yield_only_the_start_routes() {
        let inst = worked_example();
        let d = DualValues::zeros(&inst);
        let est = Estimator::new(&inst, &d, PricingMode::P2);
        let out = vns_generate(&dedicated(&inst), &est, VnsParams::default());
        let mut got = out.pool.routes();
        got.sort();
        assert_eq!(got, dedicated(&inst));
        assert!(out.resets.is_empty());
    }

    #[test]
    fn high_duals_find_the_combined_route() {
        let inst = worked_example();
        let d = DualValues::with_pi(&inst, vec![100.0; 4]);
        let est = Estimator::new(&inst, &d, PricingMode::P2);
        let out = vns_generate(&dedicated(&inst), &est, VnsParams::default());
        let combined = Route::new(vec![0, 1, 2, 3, 4, 0], &inst.network);
        assert!(out.pool.contains(&combined));
        for e in out.pool.entries() {
            assert!(e.route.duration(&inst.network) <= inst.shifts.duration);
        }
        assert!(out.resets.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn pool_respects_the_cap() {
        let inst = worked_example();
        let d = DualValues::with_pi(&inst, vec![100.0; 4]);
        let est = Estimator::new(&inst, &d, PricingMode::P1);
        let params = VnsParams { max_columns: 1, ..VnsParams::default() };
        let out = vns_generate(&dedicated(&inst), &est, params);
        assert!(out.pool.len() <= 1 + 2);
    }
}
