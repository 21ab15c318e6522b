//! Restricted master problem over a column pool, dual extraction,
//! incompatibility cuts and schedule extraction.

use std::collections::{HashMap, HashSet};

use ftl_lp::{ConId, LinearModel, LpSolution, LpStatus, Sense, VarId};

use crate::instance::{Instance, Km};
use crate::routing::{compute_time_windows, delta, Flow, IncompatiblePair, Route};

#[derive(Clone, Debug, PartialEq)]
pub struct PoolEntry {
    pub route: Route,
    /// Estimated reduced cost when admitted.
    pub estimate: f64,
    pub iteration: usize,
}

/// Distinct routes, optionally capped to the best `capacity` by estimate.
#[derive(Clone, Debug, Default)]
pub struct ColumnPool {
    entries: Vec<PoolEntry>,
    seen: HashSet<Route>,
    capacity: Option<usize>,
}

impl ColumnPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self { capacity: Some(capacity), ..Self::default() }
    }

    pub fn from_routes(routes: impl IntoIterator<Item = Route>) -> Self {
        let mut pool = Self::new();
        for r in routes {
            pool.offer(r, 0.0, 0);
        }
        pool
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    /// Admits a route unless it is a duplicate or the pool is full of better
    /// routes; the worst entry is evicted when a better one arrives.
    pub fn offer(&mut self, route: Route, estimate: f64, iteration: usize) -> bool {
        if self.seen.contains(&route) {
            return false;
        }
        if let Some(cap) = self.capacity {
            if cap == 0 {
                return false;
            }
            if self.entries.len() >= cap {
                let (worst, _) = self
                    .entries
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.estimate.total_cmp(&b.1.estimate).then(a.1.route.cmp(&b.1.route)))
                    .unwrap();
                let w = &self.entries[worst];
                if (estimate, &route) >= (w.estimate, &w.route) {
                    return false;
                }
                let old = self.entries.swap_remove(worst);
                self.seen.remove(&old.route);
            }
        }
        self.seen.insert(route.clone());
        self.entries.push(PoolEntry { route, estimate, iteration });
        true
    }

    /// Adds without respecting the cap; used for routes that must stay.
    pub fn force(&mut self, route: Route, estimate: f64, iteration: usize) -> bool {
        if !self.seen.insert(route.clone()) {
            return false;
        }
        self.entries.push(PoolEntry { route, estimate, iteration });
        true
    }

    pub fn contains(&self, route: &Route) -> bool {
        self.seen.contains(route)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    /// Entries by ascending estimate, ties by node sequence.
    pub fn sorted(&self) -> Vec<&PoolEntry> {
        let mut v: Vec<&PoolEntry> = self.entries.iter().collect();
        v.sort_by(|a, b| a.estimate.total_cmp(&b.estimate).then(a.route.cmp(&b.route)));
        v
    }

    pub fn routes(&self) -> Vec<Route> {
        self.entries.iter().map(|e| e.route.clone()).collect()
    }
}

/// Constraint prices under the sign convention where every price of a
/// `<=` row is reported non-negative.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DualValues {
    /// Per shift; zero when the fleet row is absent.
    pub alpha: Vec<f64>,
    /// Per commodity.
    pub pi: Vec<f64>,
    /// Per (route, index, shift) capacity row.
    pub beta: HashMap<(Route, usize, usize), f64>,
    /// Per (route, index, commodity, shift) flow-feasibility row.
    pub gamma: HashMap<(Route, usize, usize, usize), f64>,
}

impl DualValues {
    pub fn zeros(inst: &Instance) -> Self {
        Self {
            alpha: vec![0.0; inst.shifts.count],
            pi: vec![0.0; inst.commodities.len()],
            ..Self::default()
        }
    }

    pub fn with_pi(inst: &Instance, pi: Vec<f64>) -> Self {
        Self { pi, ..Self::zeros(inst) }
    }

    pub fn beta_at(&self, route: &Route, i: usize, s: usize) -> f64 {
        self.beta.get(&(route.clone(), i, s)).copied().unwrap_or(0.0)
    }

    pub fn gamma_at(&self, route: &Route, i: usize, k: usize, s: usize) -> f64 {
        self.gamma.get(&(route.clone(), i, k, s)).copied().unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RouteUse {
    pub route: Route,
    pub shift: usize,
    pub count: u32,
    pub flows: Vec<Flow>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    pub uses: Vec<RouteUse>,
    pub objective: Km,
    pub cuts: usize,
}

impl Schedule {
    pub fn distance(&self) -> Km {
        self.uses.iter().map(|u| u.route.distance() * u.count as Km).sum()
    }

    pub fn trucks_in_shift(&self, s: usize) -> u64 {
        self.uses.iter().filter(|u| u.shift == s).map(|u| u.count as u64).sum()
    }

    pub fn distinct_routes(&self) -> Vec<Route> {
        let mut v: Vec<Route> = self.uses.iter().map(|u| u.route.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Demand, capacity, fleet and objective invariants; empty when all hold.
    pub fn check(&self, inst: &Instance, fleet_active: bool) -> Vec<String> {
        let mut out = Vec::new();
        let mut served = vec![0u64; inst.commodities.len()];
        for (u, ru) in self.uses.iter().enumerate() {
            let mut per_index: HashMap<usize, u64> = HashMap::new();
            for f in &ru.flows {
                if f.commodity >= served.len() {
                    out.push(format!("use {u}: unknown commodity {}", f.commodity));
                    continue;
                }
                served[f.commodity] += f.units as u64;
                *per_index.entry(f.index).or_default() += f.units as u64;
            }
            for (i, units) in per_index {
                if units > ru.count as u64 {
                    out.push(format!("use {u}: {units} units at index {i} exceed {} trucks", ru.count));
                }
            }
        }
        for (k, c) in inst.commodities.iter().enumerate() {
            if served[k] != c.quantity as u64 {
                out.push(format!("{}: {} of {} units served", c.id, served[k], c.quantity));
            }
        }
        if fleet_active {
            for s in 0..inst.shifts.count {
                let t = self.trucks_in_shift(s);
                if t > inst.fleet as u64 {
                    out.push(format!("shift {s}: {t} trucks exceed fleet {}", inst.fleet));
                }
            }
        }
        if self.objective != self.distance() {
            out.push(format!("objective {} differs from route distance {}", self.objective, self.distance()));
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RmpOptions {
    pub relaxed: bool,
    pub fleet_active: bool,
    /// Makes each fleet row elastic: trucks beyond the fleet are allowed at
    /// this cost each.
    pub fleet_overflow_cost: Option<f64>,
    /// Keep flow variables whose feasibility flag is zero and add explicit
    /// `x <= delta * y` rows for every flow variable.
    pub materialize_delta_rows: bool,
    /// Declare flow variables integer when the model is not relaxed. With
    /// integral route counts and cut indicators the flow block is a bipartite
    /// incidence system, so its vertices are integral anyway; leaving this
    /// off restricts branching to route counts and cut indicators.
    pub integer_flows: bool,
}

impl Default for RmpOptions {
    fn default() -> Self {
        Self {
            relaxed: true,
            fleet_active: false,
            fleet_overflow_cost: None,
            materialize_delta_rows: false,
            integer_flows: false,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MasterError {
    #[error("no pool route can serve: {}", .0.join(", "))]
    Uncoverable(Vec<String>),
    #[error("LP is not optimal ({0:?})")]
    NotOptimal(LpStatus),
    #[error("variable {0} is fractional")]
    Fractional(String),
    #[error("cut references a flow that is not in the model")]
    UnknownFlow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YVar {
    pub route: usize,
    pub shift: usize,
    pub var: VarId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct XVar {
    pub route: usize,
    pub shift: usize,
    pub index: usize,
    pub commodity: usize,
    pub var: VarId,
}

/// A built master model together with the maps from model rows and columns
/// back to routes, shifts and commodities.
#[derive(Clone, Debug)]
pub struct Rmp {
    pub model: LinearModel,
    pub options: RmpOptions,
    pub routes: Vec<Route>,
    pub ys: Vec<YVar>,
    pub xs: Vec<XVar>,
    y_of: HashMap<(usize, usize), usize>,
    x_of: HashMap<(usize, usize, usize, usize), usize>,
    route_of: HashMap<Route, usize>,
    pub fleet_rows: Vec<Option<ConId>>,
    pub demand_rows: Vec<ConId>,
    pub cap_rows: Vec<((usize, usize, usize), ConId)>,
    pub delta_rows: Vec<((usize, usize, usize, usize), ConId)>,
    pub big_m: f64,
    pub cuts: Vec<IncompatiblePair>,
    cut_keys: HashSet<(Route, usize, usize, usize, usize, usize)>,
    pub thetas: Vec<VarId>,
}

pub fn build_rmp(pool: &[Route], inst: &Instance, opts: RmpOptions) -> Result<Rmp, MasterError> {
    let net = &inst.network;
    let mut model = LinearModel::new();
    let mut rmp = Rmp {
        model: LinearModel::new(),
        options: opts,
        routes: pool.to_vec(),
        ys: Vec::new(),
        xs: Vec::new(),
        y_of: HashMap::new(),
        x_of: HashMap::new(),
        route_of: pool.iter().enumerate().map(|(i, r)| (r.clone(), i)).collect(),
        fleet_rows: Vec::new(),
        demand_rows: Vec::new(),
        cap_rows: Vec::new(),
        delta_rows: Vec::new(),
        big_m: inst.max_quantity() as f64,
        cuts: Vec::new(),
        cut_keys: HashSet::new(),
        thetas: Vec::new(),
    };
    let integer = !opts.relaxed;
    let mut by_od: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (k, c) in inst.commodities.iter().enumerate() {
        by_od.entry((c.origin, c.dest)).or_default().push(k);
    }
    let mut demand_terms: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); inst.commodities.len()];
    let mut fleet_terms: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); inst.shifts.count];
    let mut pending_rows: Vec<(String, Vec<(VarId, f64)>, Sense, f64, RowTag)> = Vec::new();

    for (ri, route) in pool.iter().enumerate() {
        let nodes = route.nodes();
        for s in 0..inst.shifts.count {
            let timing = compute_time_windows(route, s, inst);
            // (index, commodity, delta)
            let mut cand: Vec<(usize, usize, bool)> = Vec::new();
            for i in route.service_positions() {
                if let Some(ks) = by_od.get(&(nodes[i], nodes[i + 1])) {
                    for &k in ks {
                        let d = delta(nodes, i, &inst.commodities[k], &timing, net);
                        if d || opts.materialize_delta_rows {
                            cand.push((i, k, d));
                        }
                    }
                }
            }
            let any_delta = cand.iter().any(|c| c.2);
            if !any_delta && !opts.materialize_delta_rows {
                continue;
            }
            if route.duration(net) > inst.shifts.duration {
                continue;
            }
            let y = model.add_var(format!("y_{ri}_{s}"), 0.0, f64::INFINITY, integer, route.distance() as f64);
            rmp.y_of.insert((ri, s), rmp.ys.len());
            rmp.ys.push(YVar { route: ri, shift: s, var: y });
            fleet_terms[s].push((y, 1.0));
            let mut cap: Vec<(usize, Vec<(VarId, f64)>)> = Vec::new();
            for (i, k, d) in cand {
                let q = inst.commodities[k].quantity as f64;
                let x = model.add_var(format!("x_{ri}_{i}_{k}_{s}"), 0.0, q, integer && opts.integer_flows, 0.0);
                rmp.x_of.insert((ri, s, i, k), rmp.xs.len());
                rmp.xs.push(XVar { route: ri, shift: s, index: i, commodity: k, var: x });
                demand_terms[k].push((x, 1.0));
                match cap.last_mut() {
                    Some((ci, terms)) if *ci == i => terms.push((x, 1.0)),
                    _ => cap.push((i, vec![(x, 1.0)])),
                }
                if opts.materialize_delta_rows {
                    let coef = if d { -1.0 } else { 0.0 };
                    pending_rows.push((format!("feas_{ri}_{i}_{k}_{s}"), vec![(x, 1.0), (y, coef)], Sense::Le, 0.0, RowTag::Delta(ri, i, k, s)));
                }
            }
            for (i, mut terms) in cap {
                terms.push((y, -1.0));
                pending_rows.push((format!("cap_{ri}_{i}_{s}"), terms, Sense::Le, 0.0, RowTag::Cap(ri, i, s)));
            }
        }
    }

    let missing: Vec<String> = inst
        .commodities
        .iter()
        .enumerate()
        .filter(|(k, _)| demand_terms[*k].is_empty())
        .map(|(_, c)| c.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(MasterError::Uncoverable(missing));
    }

    for s in 0..inst.shifts.count {
        if opts.fleet_active {
            let mut terms = std::mem::take(&mut fleet_terms[s]);
            if let Some(c) = opts.fleet_overflow_cost {
                let over = model.add_var(format!("over_{s}"), 0.0, f64::INFINITY, integer, c);
                terms.push((over, -1.0));
            }
            let row = model.add_constraint(format!("fleet_{s}"), terms, Sense::Le, inst.fleet as f64);
            rmp.fleet_rows.push(Some(row));
        } else {
            rmp.fleet_rows.push(None);
        }
    }
    for (k, c) in inst.commodities.iter().enumerate() {
        let terms = std::mem::take(&mut demand_terms[k]);
        let row = model.add_constraint(format!("demand_{}", c.id), terms, Sense::Eq, c.quantity as f64);
        rmp.demand_rows.push(row);
    }
    for (name, terms, sense, rhs, tag) in pending_rows {
        let row = model.add_constraint(name, terms, sense, rhs);
        match tag {
            RowTag::Cap(r, i, s) => rmp.cap_rows.push(((r, i, s), row)),
            RowTag::Delta(r, i, k, s) => rmp.delta_rows.push(((r, i, k, s), row)),
        }
    }
    rmp.model = model;
    Ok(rmp)
}

enum RowTag {
    Cap(usize, usize, usize),
    Delta(usize, usize, usize, usize),
}

impl Rmp {
    pub fn route_index(&self, route: &Route) -> Option<usize> {
        self.route_of.get(route).copied()
    }

    pub fn y_var(&self, route: usize, shift: usize) -> Option<VarId> {
        self.y_of.get(&(route, shift)).map(|&i| self.ys[i].var)
    }

    pub fn x_var(&self, route: usize, shift: usize, index: usize, commodity: usize) -> Option<VarId> {
        self.x_of.get(&(route, shift, index, commodity)).map(|&i| self.xs[i].var)
    }

    pub fn cut_count(&self) -> usize {
        self.cuts.len()
    }

    /// Maps a schedule onto model variables, setting every cut indicator
    /// consistently. `None` when the schedule uses a column the model lacks
    /// or violates a cut.
    pub fn start_vector(&self, schedule: &Schedule) -> Option<Vec<f64>> {
        let mut x = vec![0.0; self.model.num_vars()];
        for u in &schedule.uses {
            let r = self.route_index(&u.route)?;
            x[self.y_var(r, u.shift)?.0] += u.count as f64;
            for f in &u.flows {
                x[self.x_var(r, u.shift, f.index, f.commodity)?.0] += f.units as f64;
            }
        }
        for (p, &theta) in self.cuts.iter().zip(&self.thetas) {
            let r = self.route_index(&p.route)?;
            let xk = x[self.x_var(r, p.shift, p.i, p.k)?.0];
            let xv = x[self.x_var(r, p.shift, p.j, p.v)?.0];
            if xk > 0.0 && xv > 0.0 {
                return None;
            }
            x[theta.0] = if xk > 0.0 { 1.0 } else { 0.0 };
        }
        Some(x)
    }
}

pub fn extract_duals(lp: &LpSolution, rmp: &Rmp, inst: &Instance) -> Result<DualValues, MasterError> {
    if lp.status != LpStatus::Optimal {
        return Err(MasterError::NotOptimal(lp.status));
    }
    let mut d = DualValues::zeros(inst);
    for (s, row) in rmp.fleet_rows.iter().enumerate() {
        if let Some(row) = row {
            d.alpha[s] = -lp.duals[row.0];
        }
    }
    for (k, row) in rmp.demand_rows.iter().enumerate() {
        d.pi[k] = lp.duals[row.0];
    }
    for &((r, i, s), row) in &rmp.cap_rows {
        let v = -lp.duals[row.0];
        if v != 0.0 {
            d.beta.insert((rmp.routes[r].clone(), i, s), v);
        }
    }
    for &((r, i, k, s), row) in &rmp.delta_rows {
        let v = -lp.duals[row.0];
        if v != 0.0 {
            d.gamma.insert((rmp.routes[r].clone(), i, k, s), v);
        }
    }
    Ok(d)
}

/// Adds `x_k <= M theta` and `x_v <= M (1 - theta)` for every new pair and
/// returns how many pairs were new.
pub fn add_incompatibility_cuts(rmp: &mut Rmp, pairs: &[IncompatiblePair]) -> Result<usize, MasterError> {
    let mut added = 0;
    for p in pairs {
        let key = (p.route.clone(), p.shift, p.i, p.k, p.j, p.v);
        if rmp.cut_keys.contains(&key) {
            continue;
        }
        let r = rmp.route_index(&p.route).ok_or(MasterError::UnknownFlow)?;
        let xk = rmp.x_var(r, p.shift, p.i, p.k).ok_or(MasterError::UnknownFlow)?;
        let xv = rmp.x_var(r, p.shift, p.j, p.v).ok_or(MasterError::UnknownFlow)?;
        let m = rmp.big_m;
        let n = rmp.cuts.len();
        let theta = rmp.model.add_var(format!("theta_{n}"), 0.0, 1.0, !rmp.options.relaxed, 0.0);
        rmp.model.add_constraint(format!("cut_{n}_k"), vec![(xk, 1.0), (theta, -m)], Sense::Le, 0.0);
        rmp.model.add_constraint(format!("cut_{n}_v"), vec![(xv, 1.0), (theta, m)], Sense::Le, m);
        rmp.cut_keys.insert(key);
        rmp.cuts.push(p.clone());
        rmp.thetas.push(theta);
        added += 1;
    }
    Ok(added)
}

pub fn extract_solution(x: &[f64], rmp: &Rmp, inst: &Instance) -> Result<Schedule, MasterError> {
    let _ = inst;
    let tol = 1e-6;
    let round = |v: f64, name: &str| -> Result<u32, MasterError> {
        let r = v.round();
        if (v - r).abs() > tol {
            return Err(MasterError::Fractional(name.to_string()));
        }
        Ok(r.max(0.0) as u32)
    };
    let mut uses: Vec<RouteUse> = Vec::new();
    let mut use_of: HashMap<(usize, usize), usize> = HashMap::new();
    for y in &rmp.ys {
        let count = round(x[y.var.0], &rmp.model.var(y.var).name)?;
        if count > 0 {
            use_of.insert((y.route, y.shift), uses.len());
            uses.push(RouteUse { route: rmp.routes[y.route].clone(), shift: y.shift, count, flows: Vec::new() });
        }
    }
    for xv in &rmp.xs {
        let units = round(x[xv.var.0], &rmp.model.var(xv.var).name)?;
        if units > 0 {
            let &u = use_of
                .get(&(xv.route, xv.shift))
                .ok_or_else(|| MasterError::Fractional(rmp.model.var(xv.var).name.clone()))?;
            uses[u].flows.push(Flow { index: xv.index, commodity: xv.commodity, units });
        }
    }
    uses.sort_by(|a, b| (a.shift, &a.route).cmp(&(b.shift, &b.route)));
    for u in &mut uses {
        u.flows.sort();
    }
    let mut s = Schedule { uses, objective: 0, cuts: rmp.cuts.len() };
    s.objective = s.distance();
    Ok(s)
}
