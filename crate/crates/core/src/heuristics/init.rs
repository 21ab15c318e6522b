use crate::instance::{Instance, Minutes, DEPOT};
use crate::master::{RouteUse, Schedule};
use crate::routing::{is_distance_feasible, Flow, Route};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum InitError {
    #[error("commodity {0} has no feasible dedicated route")]
    NoDedicatedRoute(String),
    #[error("no single truck can serve {}", .0.join(", "))]
    Unservable(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleInit {
    pub routes: Vec<Route>,
    pub warnings: Vec<String>,
}

/// One dedicated route `0, o, d, 0` per distinct origin-destination pair.
pub fn simple_init(inst: &Instance) -> Result<SimpleInit, InitError> {
    let net = &inst.network;
    let mut routes = Vec::new();
    for (o, d) in inst.od_pairs() {
        let r = Route::new(vec![DEPOT, o, d, DEPOT], net);
        if !is_distance_feasible(&r, 0, inst) {
            let c = inst.commodities.iter().find(|c| (c.origin, c.dest) == (o, d)).unwrap();
            return Err(InitError::NoDedicatedRoute(c.id.clone()));
        }
        routes.push(r);
    }
    for (k, c) in inst.commodities.iter().enumerate() {
        if !inst.dedicated_service_possible(k) {
            return Err(InitError::NoDedicatedRoute(c.id.clone()));
        }
    }
    let mut warnings = Vec::new();
    let capacity = inst.fleet as u64 * inst.shifts.count as u64;
    if inst.total_units() > capacity {
        warnings.push(format!(
            "{} units exceed {} dedicated trips ({} trucks x {} shifts); the fleet-constrained problem may need longer routes",
            inst.total_units(),
            capacity,
            inst.fleet,
            inst.shifts.count
        ));
    }
    Ok(SimpleInit { routes, warnings })
}

/// Commodities that need more trips than the fleet can make. One truck can
/// carry a single unit per trip, so a commodity is lost when, summed over
/// shifts, the fleet times the number of back-to-back trips one truck fits
/// in the window falls short of its quantity. Empty moves take the fastest
/// path through any terminals, since travel times need not be metric.
pub fn trip_shortfalls(inst: &Instance) -> Vec<String> {
    let net = &inst.network;
    let n = net.node_count();
    let mut fast: Vec<Vec<Minutes>> =
        (0..n).map(|a| (0..n).map(|b| if a == b { 0 } else { net.service(a) + net.travel(a, b) }).collect()).collect();
    for w in 0..n {
        for a in 0..n {
            for b in 0..n {
                fast[a][b] = fast[a][b].min(fast[a][w] + fast[w][b]);
            }
        }
    }
    let mut out = Vec::new();
    for c in &inst.commodities {
        let mut trips = 0u64;
        for s in 0..inst.shifts.count {
            let end = inst.shifts.end(s);
            let mut at = inst.shifts.start(s);
            let mut cur = DEPOT;
            loop {
                let start = (at + fast[cur][c.origin]).max(c.available);
                let arrive = start + net.service(c.origin) + net.travel(c.origin, c.dest);
                if arrive > c.deadline || arrive + fast[c.dest][DEPOT] > end {
                    break;
                }
                trips += 1;
                at = arrive;
                cur = c.dest;
                if trips >= c.quantity as u64 {
                    break;
                }
            }
        }
        let most = trips.min(c.quantity as u64) * inst.fleet as u64;
        if most < c.quantity as u64 {
            out.push(format!("{}: {} units but the fleet fits at most {} trips in its window", c.id, c.quantity, most));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InsertionResult {
    /// One route use per truck.
    pub schedule: Schedule,
    pub routes: Vec<Route>,
    /// Trucks used beyond the fleet size, summed over shifts.
    pub virtual_trucks: u32,
}

/// Greedy truck-by-truck construction. Each truck repeatedly takes the unit
/// that cannot wait for the next shift, then the one with the shortest empty
/// approach (ties: earlier deadline, earlier availability, lower index) that
/// it can still deliver on time and return within the shift. Trucks beyond
/// the fleet are opened only when units are left after the whole fleet has
/// been used and cheapest insertion into the existing tours has placed what
/// it can. If that happens the pass is
/// repeated with earliest deadline ahead of the approach distance and the
/// better of the two is kept.
pub fn insertion_init(inst: &Instance) -> Result<InsertionResult, InitError> {
    let nearest = insertion_pass(inst, false)?;
    if nearest.virtual_trucks == 0 {
        return Ok(nearest);
    }
    let urgent = insertion_pass(inst, true)?;
    Ok(if (urgent.virtual_trucks, urgent.schedule.objective) < (nearest.virtual_trucks, nearest.schedule.objective) {
        urgent
    } else {
        nearest
    })
}

fn insertion_pass(inst: &Instance, by_deadline: bool) -> Result<InsertionResult, InitError> {
    let mut remaining: Vec<u32> = inst.commodities.iter().map(|c| c.quantity).collect();
    let mut trucks: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut virtual_trucks = 0;

    for s in 0..inst.shifts.count {
        for _ in 0..inst.fleet {
            match build_truck(inst, s, &mut remaining, by_deadline) {
                Some(loads) => trucks.push((s, loads)),
                None => break,
            }
        }
    }
    let mut left: Vec<usize> = (0..remaining.len()).filter(|&k| remaining[k] > 0).collect();
    left.sort_by_key(|&k| (inst.commodities[k].deadline, k));
    for k in left {
        while remaining[k] > 0 && (insert_cheapest(inst, &mut trucks, k) || insert_ejecting(inst, &mut trucks, k)) {
            remaining[k] -= 1;
        }
    }
    while remaining.iter().any(|&q| q > 0) {
        let mut progress = false;
        for s in 0..inst.shifts.count {
            if let Some(loads) = build_truck(inst, s, &mut remaining, by_deadline) {
                trucks.push((s, loads));
                virtual_trucks += 1;
                progress = true;
            }
        }
        if !progress {
            let ids = remaining
                .iter()
                .enumerate()
                .filter(|(_, &q)| q > 0)
                .map(|(k, _)| inst.commodities[k].id.clone())
                .collect();
            return Err(InitError::Unservable(ids));
        }
    }

    let uses = trucks.iter().map(|(s, loads)| truck_use(inst, *s, loads)).collect();
    let mut schedule = Schedule { uses, objective: 0, cuts: 0 };
    schedule.objective = schedule.distance();
    let routes = schedule.distinct_routes();
    Ok(InsertionResult { schedule, routes, virtual_trucks })
}

/// One truck carrying `loads` in order, each as its own leg.
fn truck_use(inst: &Instance, shift: usize, loads: &[usize]) -> RouteUse {
    let legs: Vec<(usize, usize)> = loads.iter().map(|&k| (inst.commodities[k].origin, inst.commodities[k].dest)).collect();
    let flows = loads.iter().enumerate().map(|(p, &k)| Flow { index: 2 * p + 1, commodity: k, units: 1 }).collect();
    RouteUse { route: Route::from_legs(&legs, &inst.network), shift, count: 1, flows }
}

/// Distance of the truck's tour if every delivery is on time and it is back
/// before the shift ends.
fn truck_tour(inst: &Instance, shift: usize, loads: &[usize]) -> Option<i64> {
    let net = &inst.network;
    let mut at = inst.shifts.start(shift);
    let mut cur = DEPOT;
    let mut dist = 0;
    for &k in loads {
        let c = &inst.commodities[k];
        let start = (at + net.service(cur) + net.travel(cur, c.origin)).max(c.available);
        at = start + net.service(c.origin) + net.travel(c.origin, c.dest);
        if at > c.deadline {
            return None;
        }
        dist += net.dist(cur, c.origin) + net.dist(c.origin, c.dest);
        cur = c.dest;
    }
    (at + net.service(cur) + net.travel(cur, DEPOT) <= inst.shifts.end(shift)).then(|| dist + net.dist(cur, DEPOT))
}

/// Puts one unit of `k` where it adds the least distance without breaking
/// any deadline or shift end.
fn insert_cheapest(inst: &Instance, trucks: &mut [(usize, Vec<usize>)], k: usize) -> bool {
    let mut best: Option<(i64, usize, usize)> = None;
    for (t, (s, loads)) in trucks.iter().enumerate() {
        let Some(before) = truck_tour(inst, *s, loads) else { continue };
        let mut trial = loads.clone();
        for p in 0..=loads.len() {
            trial.insert(p, k);
            if let Some(after) = truck_tour(inst, *s, &trial) {
                if best.map_or(true, |b| (after - before, t, p) < b) {
                    best = Some((after - before, t, p));
                }
            }
            trial.remove(p);
        }
    }
    match best {
        Some((_, t, p)) => {
            trucks[t].1.insert(p, k);
            true
        }
        None => false,
    }
}

/// Puts one unit of `k` into a tour in place of another unit that then
/// moves to its cheapest position elsewhere.
fn insert_ejecting(inst: &Instance, trucks: &mut [(usize, Vec<usize>)], k: usize) -> bool {
    for t in 0..trucks.len() {
        let (s, loads) = trucks[t].clone();
        for e in 0..loads.len() {
            let out = loads[e];
            if out == k {
                continue;
            }
            let mut rest = loads.clone();
            rest.remove(e);
            for p in 0..=rest.len() {
                let mut trial = rest.clone();
                trial.insert(p, k);
                if truck_tour(inst, s, &trial).is_none() {
                    continue;
                }
                trucks[t].1 = trial;
                if insert_cheapest(inst, trucks, out) {
                    return true;
                }
                trucks[t].1.clone_from(&loads);
            }
        }
    }
    false
}

fn build_truck(inst: &Instance, shift: usize, remaining: &mut [u32], by_deadline: bool) -> Option<Vec<usize>> {
    let net = &inst.network;
    let end = inst.shifts.end(shift);
    let mut at: Minutes = inst.shifts.start(shift);
    let mut cur = DEPOT;
    let mut loads = Vec::new();
    loop {
        let mut best: Option<(bool, (i64, Minutes), Minutes, usize, Minutes)> = None;
        for (k, c) in inst.commodities.iter().enumerate() {
            if remaining[k] == 0 {
                continue;
            }
            let start = (at + net.service(cur) + net.travel(cur, c.origin)).max(c.available);
            let arrive = start + net.service(c.origin) + net.travel(c.origin, c.dest);
            if arrive > c.deadline || arrive + net.service(c.dest) + net.travel(c.dest, DEPOT) > end {
                continue;
            }
            let later = shift + 1 < inst.shifts.count && {
                let next = inst.shifts.start(shift + 1);
                let start = (next + net.service(DEPOT) + net.travel(DEPOT, c.origin)).max(c.available);
                start + net.service(c.origin) + net.travel(c.origin, c.dest) <= c.deadline
            };
            let (d, dl) = (net.dist(cur, c.origin), c.deadline);
            let first = if by_deadline { (dl, d) } else { (d, dl) };
            let key = (later, first, c.available, k, arrive);
            if best.map_or(true, |b| key < b) {
                best = Some(key);
            }
        }
        let Some((_, _, _, k, arrive)) = best else { break };
        remaining[k] -= 1;
        loads.push(k);
        at = arrive;
        cur = inst.commodities[k].dest;
    }
    (!loads.is_empty()).then_some(loads)
}
