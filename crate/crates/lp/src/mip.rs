use std::cmp::Ordering;
use std::collections::BinaryHeap;

use web_time::{Duration, Instant};

use crate::model::LinearModel;
use crate::simplex::{package, run_simplex, Basis, LpSolution, LpStatus, SimplexOptions, StdForm};

#[derive(Clone, Debug)]
pub struct MipConfig {
    /// Relative gap at which the search stops.
    pub gap_tolerance: f64,
    pub node_limit: usize,
    pub time_limit: Option<Duration>,
    pub integrality_tol: f64,
    /// Run a rounding dive at the root when no incumbent is known.
    pub dive: bool,
    pub simplex: SimplexOptions,
}

impl Default for MipConfig {
    fn default() -> Self {
        Self {
            gap_tolerance: 1e-9,
            node_limit: 200_000,
            time_limit: None,
            integrality_tol: 1e-6,
            dive: true,
            simplex: SimplexOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Node or time limit hit; `x` holds the incumbent if one was found.
    LimitReached,
}

#[derive(Clone, Debug)]
pub struct MipSolution {
    pub status: MipStatus,
    /// Incumbent values; empty when no integral point is known.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Proven lower bound on the optimum.
    pub bound: f64,
    pub root_bound: f64,
    pub nodes: usize,
    pub lp_iterations: usize,
}

impl MipSolution {
    pub fn has_incumbent(&self) -> bool {
        !self.x.is_empty()
    }

    pub fn gap(&self) -> f64 {
        if !self.has_incumbent() {
            return f64::INFINITY;
        }
        (self.objective - self.bound).max(0.0) / self.objective.abs().max(1.0)
    }
}

struct Node {
    bound: f64,
    seq: usize,
    changes: Vec<(usize, f64, f64)>,
    basis: Option<Basis>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // Max-heap: smallest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Fractional diving from the root: the integer variables nearest to
/// integrality are rounded in batches and the LP is re-solved warm, until it
/// comes out integral or infeasible. A failed batch is halved until a single
/// variable remains, which is then rounded the other way.
fn dive(
    sf: &mut StdForm,
    ints: &[usize],
    root: &LpSolution,
    lp_opts: &SimplexOptions,
    cfg: &MipConfig,
    model: &LinearModel,
    t0: Instant,
) -> (Option<(f64, Vec<f64>)>, usize) {
    let itol = cfg.integrality_tol;
    let saved = (sf.lower.clone(), sf.upper.clone());
    let mut x = root.x.clone();
    let mut basis = root.basis.clone();
    let mut iters = 0;
    let mut found = None;
    for _ in 0..ints.len().max(1) {
        if cfg.time_limit.is_some_and(|t| t0.elapsed() >= t) {
            break;
        }
        let mut frac: Vec<(f64, usize)> = ints
            .iter()
            .filter_map(|&j| {
                let f = x[j] - x[j].floor();
                (f > itol && f < 1.0 - itol).then_some((f.min(1.0 - f), j))
            })
            .collect();
        if frac.is_empty() {
            let mut xr = x.clone();
            for &j in ints {
                xr[j] = xr[j].round();
            }
            if model.max_violation(&xr) <= 1e-6 {
                found = Some((model.objective_value(&xr), xr));
            }
            break;
        }
        frac.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let before = (sf.lower.clone(), sf.upper.clone());
        let round = |sf: &mut StdForm, j: usize, v: f64, flip: bool| {
            let up = (v - v.floor() >= 0.5) != flip;
            if up {
                sf.lower[j] = v.ceil();
            } else {
                sf.upper[j] = v.floor();
            }
        };
        let mut batch = (frac.len() / 8).max(1);
        let mut flip = false;
        let raw = loop {
            for &(_, j) in &frac[..batch] {
                round(sf, j, x[j], flip);
            }
            let raw = run_simplex(sf, lp_opts, basis.as_ref());
            iters += raw.iterations;
            if raw.status == LpStatus::Optimal {
                break Some(raw);
            }
            sf.lower.clone_from(&before.0);
            sf.upper.clone_from(&before.1);
            if batch > 1 {
                batch /= 2;
            } else if !flip {
                flip = true;
            } else {
                break None;
            }
        };
        let Some(raw) = raw else { break };
        let sol = package(sf, raw);
        x = sol.x;
        basis = sol.basis;
    }
    sf.lower = saved.0;
    sf.upper = saved.1;
    (found, iters)
}

pub fn solve_mip(model: &LinearModel, cfg: &MipConfig) -> MipSolution {
    solve_mip_with_start(model, cfg, None)
}

/// Branch-and-bound: best-first node selection with depth-first plunging,
/// most-fractional branching with ties broken by the lowest variable index.
/// A feasible `start` point seeds the incumbent.
pub fn solve_mip_with_start(
    model: &LinearModel,
    cfg: &MipConfig,
    start: Option<&[f64]>,
) -> MipSolution {
    let t0 = Instant::now();
    let mut sf = StdForm::from_model(model);
    let base_lower = sf.lower.clone();
    let base_upper = sf.upper.clone();
    let ints: Vec<usize> = (0..sf.n).filter(|&j| model.vars()[j].integer).collect();
    for &j in &ints {
        sf.lower[j] = sf.lower[j].ceil();
        sf.upper[j] = sf.upper[j].floor();
    }
    let int_lower = sf.lower.clone();
    let int_upper = sf.upper.clone();
    let integral_objective = model
        .vars()
        .iter()
        .all(|v| v.cost == 0.0 || (v.integer && v.cost.fract() == 0.0));
    let itol = cfg.integrality_tol;

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    if let Some(x) = start {
        if x.len() == sf.n
            && model.max_violation(x) <= 1e-6
            && ints.iter().all(|&j| (x[j] - x[j].round()).abs() <= itol)
        {
            let mut x = x.to_vec();
            for &j in &ints {
                x[j] = x[j].round();
            }
            incumbent = Some((model.objective_value(&x), x));
        }
    }

    let prune = |lp_obj: f64, inc: &Option<(f64, Vec<f64>)>| -> bool {
        match inc {
            None => false,
            Some((u, _)) => {
                if integral_objective {
                    lp_obj > u - 1.0 + 1e-6
                } else {
                    lp_obj >= u - (cfg.gap_tolerance * u.abs()).max(1e-9)
                }
            }
        }
    };

    let deadline = cfg.time_limit.map(|t| t0 + t);
    let lp_opts = SimplexOptions { deadline, ..cfg.simplex.clone() };
    let mut heap: BinaryHeap<Node> = BinaryHeap::new();
    let mut seq = 0usize;
    let mut nodes = 0usize;
    let mut lp_iterations = 0usize;
    let mut root_bound = f64::NEG_INFINITY;
    let mut current = Some(Node {
        bound: f64::NEG_INFINITY,
        seq,
        changes: Vec::new(),
        basis: None,
    });
    let mut limit_hit = false;
    let mut unbounded = false;

    while let Some(node) = current.take().or_else(|| heap.pop()) {
        if prune(node.bound, &incumbent) {
            continue;
        }
        if nodes >= cfg.node_limit || cfg.time_limit.is_some_and(|t| t0.elapsed() >= t) {
            heap.push(node);
            limit_hit = true;
            break;
        }
        nodes += 1;

        sf.lower.copy_from_slice(&int_lower);
        sf.upper.copy_from_slice(&int_upper);
        for &(j, lo, hi) in &node.changes {
            sf.lower[j] = sf.lower[j].max(lo);
            sf.upper[j] = sf.upper[j].min(hi);
        }
        if node.changes.iter().any(|&(j, _, _)| sf.lower[j] > sf.upper[j]) {
            continue;
        }
        let raw = run_simplex(&sf, &lp_opts, node.basis.as_ref());
        lp_iterations += raw.iterations;
        let status = raw.status;
        let sol = package(&sf, raw);
        match status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if nodes == 1 {
                    unbounded = true;
                    break;
                }
                continue;
            }
            LpStatus::IterationLimit => {
                limit_hit = true;
                if deadline.is_some_and(|d| Instant::now() >= d) {
                    heap.push(node);
                    break;
                }
                // Cannot bound this subtree reliably; keep exploring others.
                continue;
            }
        }
        let obj = sol.objective;
        if nodes == 1 {
            root_bound = obj;
            if incumbent.is_none() && cfg.dive {
                let (found, iters) = dive(&mut sf, &ints, &sol, &lp_opts, cfg, model, t0);
                lp_iterations += iters;
                incumbent = found;
            }
        }
        if prune(obj, &incumbent) {
            continue;
        }
        let mut branch: Option<(usize, f64)> = None;
        let mut best_dist = f64::INFINITY;
        for &j in &ints {
            let v = sol.x[j];
            let frac = v - v.floor();
            if frac > itol && frac < 1.0 - itol {
                let dist = (frac - 0.5).abs();
                if dist < best_dist - 1e-12 {
                    best_dist = dist;
                    branch = Some((j, v));
                }
            }
        }
        let Some((j, v)) = branch else {
            let mut x = sol.x.clone();
            for &k in &ints {
                x[k] = x[k].round();
            }
            let val = model.objective_value(&x);
            if incumbent.as_ref().map_or(true, |(u, _)| val < *u) {
                incumbent = Some((val, x));
            }
            continue;
        };
        let down = {
            let mut c = node.changes.clone();
            c.push((j, f64::NEG_INFINITY, v.floor()));
            c
        };
        let up = {
            let mut c = node.changes.clone();
            c.push((j, v.ceil(), f64::INFINITY));
            c
        };
        let (first, second) = if v - v.floor() >= 0.5 { (up, down) } else { (down, up) };
        seq += 1;
        heap.push(Node {
            bound: obj,
            seq,
            changes: second,
            basis: sol.basis.clone(),
        });
        seq += 1;
        current = Some(Node {
            bound: obj,
            seq,
            changes: first,
            basis: sol.basis,
        });
    }

    sf.lower = base_lower;
    sf.upper = base_upper;

    if unbounded {
        return MipSolution {
            status: MipStatus::Unbounded,
            x: Vec::new(),
            objective: f64::NEG_INFINITY,
            bound: f64::NEG_INFINITY,
            root_bound: f64::NEG_INFINITY,
            nodes,
            lp_iterations,
        };
    }
    let open_bound = heap
        .iter()
        .map(|n| n.bound)
        .chain(current.iter().map(|n| n.bound))
        .fold(f64::INFINITY, f64::min);
    match incumbent {
        Some((obj, x)) => {
            let bound = if limit_hit { open_bound.min(obj) } else { obj };
            MipSolution {
                status: if limit_hit { MipStatus::LimitReached } else { MipStatus::Optimal },
                x,
                objective: obj,
                bound,
                root_bound,
                nodes,
                lp_iterations,
            }
        }
        None => MipSolution {
            status: if limit_hit { MipStatus::LimitReached } else { MipStatus::Infeasible },
            x: Vec::new(),
            objective: f64::INFINITY,
            bound: if limit_hit { open_bound } else { f64::INFINITY },
            root_bound,
            nodes,
            lp_iterations,
        },
    }
}
