//! Problem data: network, commodities, shift calendar and fleet size.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::routing::{compute_time_windows, is_distance_feasible, service_feasible, Route};

/// Minutes from the start of the planning horizon.
pub type Minutes = i64;
/// Kilometres.
pub type Km = i64;

pub const DEPOT: usize = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub distance: Vec<Vec<Km>>,
    pub travel_time: Vec<Vec<Minutes>>,
    pub service_time: Vec<Minutes>,
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.service_time.len()
    }

    pub fn dist(&self, a: usize, b: usize) -> Km {
        self.distance[a][b]
    }

    pub fn travel(&self, a: usize, b: usize) -> Minutes {
        self.travel_time[a][b]
    }

    pub fn service(&self, a: usize) -> Minutes {
        self.service_time[a]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Commodity {
    pub id: String,
    pub origin: usize,
    pub dest: usize,
    pub quantity: u32,
    pub available: Minutes,
    pub deadline: Minutes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftCalendar {
    pub count: usize,
    /// Start of the first shift.
    pub first_start: Minutes,
    pub duration: Minutes,
}

impl ShiftCalendar {
    pub fn start(&self, s: usize) -> Minutes {
        self.first_start + s as Minutes * self.duration
    }

    pub fn end(&self, s: usize) -> Minutes {
        self.start(s) + self.duration
    }

    pub fn horizon_end(&self) -> Minutes {
        self.start(self.count)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub network: Network,
    pub commodities: Vec<Commodity>,
    pub shifts: ShiftCalendar,
    pub fleet: u32,
}

impl Instance {
    pub fn total_units(&self) -> u64 {
        self.commodities.iter().map(|c| c.quantity as u64).sum()
    }

    pub fn commodity_index(&self, id: &str) -> Option<usize> {
        self.commodities.iter().position(|c| c.id == id)
    }

    pub fn max_quantity(&self) -> u32 {
        self.commodities.iter().map(|c| c.quantity).max().unwrap_or(0)
    }

    /// Distinct origin-destination pairs in order of first appearance.
    pub fn od_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        for c in &self.commodities {
            if !out.contains(&(c.origin, c.dest)) {
                out.push((c.origin, c.dest));
            }
        }
        out
    }

    /// Whether commodity `k` can ride alone on its dedicated route in some shift.
    pub fn dedicated_service_possible(&self, k: usize) -> bool {
        let c = &self.commodities[k];
        let route = Route::new(vec![DEPOT, c.origin, c.dest, DEPOT], &self.network);
        let net = &self.network;
        if c.available + net.service(c.origin) + net.travel(c.origin, c.dest) > c.deadline {
            return false;
        }
        (0..self.shifts.count).any(|s| {
            let timing = compute_time_windows(&route, s, self);
            is_distance_feasible(&route, s, self) && service_feasible(&route, 1, c, &timing, self) == Ok(true)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationCode {
    NoNodes,
    MatrixShape,
    NonZeroDiagonal,
    NegativeEntry,
    NoShifts,
    BadShiftDuration,
    ZeroFleet,
    DuplicateId,
    NodeOutOfRange,
    SelfLoop,
    ZeroQuantity,
    WindowEmpty,
    OutsideHorizon,
    Unserviceable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

pub fn validate_instance(inst: &Instance) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = Vec::new();
    let net = &inst.network;
    let n = net.node_count();
    if n == 0 {
        out.push(Violation::new(NoNodes, "network has no nodes"));
        return out;
    }
    let mut shape_ok = true;
    for (name, m) in [("distance", &net.distance), ("travel_time", &net.travel_time)] {
        if m.len() != n || m.iter().any(|row| row.len() != n) {
            out.push(Violation::new(MatrixShape, format!("{name} matrix is not {n}x{n}")));
            shape_ok = false;
            continue;
        }
        for (i, row) in m.iter().enumerate() {
            if row[i] != 0 {
                out.push(Violation::new(NonZeroDiagonal, format!("{name}[{i}][{i}] = {}", row[i])));
            }
            if let Some(j) = row.iter().position(|&v| v < 0) {
                out.push(Violation::new(NegativeEntry, format!("{name}[{i}][{j}] is negative")));
            }
        }
    }
    if let Some(i) = net.service_time.iter().position(|&t| t < 0) {
        out.push(Violation::new(NegativeEntry, format!("service_time[{i}] is negative")));
    }
    if inst.shifts.count == 0 {
        out.push(Violation::new(NoShifts, "calendar has no shifts"));
    }
    if inst.shifts.duration < 0 || inst.shifts.first_start < 0 {
        out.push(Violation::new(BadShiftDuration, "shift start and duration must be non-negative"));
    }
    if inst.fleet == 0 {
        out.push(Violation::new(ZeroFleet, "fleet size must be positive"));
    }
    let horizon_end = inst.shifts.horizon_end();
    for (k, c) in inst.commodities.iter().enumerate() {
        if inst.commodities[..k].iter().any(|o| o.id == c.id) {
            out.push(Violation::new(DuplicateId, format!("commodity id {} repeats", c.id)));
        }
        let mut local_ok = true;
        if c.origin >= n || c.dest >= n {
            out.push(Violation::new(NodeOutOfRange, format!("{}: node index out of range", c.id)));
            local_ok = false;
        } else if c.origin == c.dest {
            out.push(Violation::new(SelfLoop, format!("{}: origin equals destination", c.id)));
            local_ok = false;
        }
        if c.quantity == 0 {
            out.push(Violation::new(ZeroQuantity, format!("{}: zero quantity", c.id)));
            local_ok = false;
        }
        if c.available >= c.deadline {
            out.push(Violation::new(WindowEmpty, format!("{}: available >= deadline", c.id)));
            local_ok = false;
        }
        if c.available < 0 || c.deadline > horizon_end {
            out.push(Violation::new(OutsideHorizon, format!("{}: window outside [0, {horizon_end}]", c.id)));
            local_ok = false;
        }
        if local_ok && shape_ok && inst.shifts.count > 0 && !inst.dedicated_service_possible(k) {
            out.push(Violation::new(Unserviceable, format!("{}: no shift admits a dedicated route", c.id)));
        }
    }
    out
}

/// The four-commodity worked example on a five-node network.
pub fn worked_example() -> Instance {
    let n = 5;
    let mut distance = vec![vec![0; n]; n];
    let mut travel_time = vec![vec![0; n]; n];
    let arcs: [(usize, usize, Km, Minutes); 20] = [
        (0, 1, 10, 15),
        (1, 2, 30, 50),
        (2, 3, 5, 0),
        (3, 4, 20, 40),
        (4, 0, 14, 40),
        (0, 3, 41, 50),
        (4, 1, 14, 40),
        (2, 0, 24, 50),
        (1, 0, 10, 15),
        (2, 1, 30, 50),
        (3, 2, 5, 0),
        (4, 3, 20, 40),
        (0, 4, 14, 40),
        (3, 0, 41, 50),
        (1, 4, 14, 40),
        (0, 2, 24, 50),
        (1, 3, 35, 45),
        (3, 1, 35, 45),
        (2, 4, 25, 45),
        (4, 2, 25, 45),
    ];
    for (a, b, d, t) in arcs {
        distance[a][b] = d;
        travel_time[a][b] = t;
    }
    let c = |id: &str, o, d, avail, dl| Commodity {
        id: id.to_string(),
        origin: o,
        dest: d,
        quantity: 1,
        available: avail,
        deadline: dl,
    };
    Instance {
        network: Network { distance, travel_time, service_time: vec![0, 30, 30, 40, 60] },
        commodities: vec![
            c("k1", 1, 2, 820, 905),
            c("k2", 1, 2, 480, 790),
            c("v1", 3, 4, 480, 960),
            c("v2", 3, 4, 540, 950),
        ],
        shifts: ShiftCalendar { count: 1, first_start: 480, duration: 720 },
        fleet: 2,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub node_count: usize,
    pub shift_count: usize,
    pub shift_start: Minutes,
    pub shift_duration: Minutes,
    /// Inclusive range.
    pub commodity_count: (usize, usize),
    /// Inclusive range for the total number of truckload units.
    pub units: (u64, u64),
    pub fraction_available_at_start: f64,
    pub emergency_fraction: f64,
    pub distance: (Km, Km),
    pub speed_km_per_min: f64,
    pub service_time: (Minutes, Minutes),
    /// Shortest commodity window in minutes.
    pub min_window: Minutes,
    /// Windows shorter than this count as emergencies.
    pub emergency_window: Minutes,
    /// Derived from units when absent.
    pub fleet: Option<u32>,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            node_count: 7,
            shift_count: 4,
            shift_start: 480,
            shift_duration: 720,
            commodity_count: (50, 90),
            units: (260, 630),
            fraction_available_at_start: 0.30,
            emergency_fraction: 0.20,
            distance: (10, 60),
            speed_km_per_min: 0.5,
            service_time: (20, 60),
            min_window: 60,
            emergency_window: 600,
            fleet: None,
            seed: 1,
        }
    }
}

impl GeneratorConfig {
    /// 7-node presets for 4, 6 or 8 shifts; commodity and unit ranges grow
    /// with the horizon.
    pub fn preset(shifts: usize, seed: u64) -> Result<Self, GenerateError> {
        let (commodity_count, units) = match shifts {
            4 => ((50, 90), (260, 630)),
            6 => ((75, 105), (480, 820)),
            8 => ((105, 130), (800, 1100)),
            _ => return Err(GenerateError::Config(format!("no preset for {shifts} shifts"))),
        };
        Ok(Self { shift_count: shifts, commodity_count, units, seed, ..Self::default() })
    }

    fn check(&self) -> Result<(), GenerateError> {
        let bad = |m: &str| Err(GenerateError::Config(m.to_string()));
        if self.node_count < 3 {
            return bad("need at least 3 nodes (depot plus two terminals)");
        }
        if self.shift_count == 0 || self.shift_duration <= 0 || self.shift_start < 0 {
            return bad("shift calendar must be non-empty");
        }
        if self.commodity_count.0 > self.commodity_count.1
            || self.units.0 > self.units.1
            || self.distance.0 > self.distance.1
            || self.service_time.0 > self.service_time.1
        {
            return bad("empty range");
        }
        if self.units.1 < self.commodity_count.0 as u64 {
            return bad("unit range cannot give every commodity one unit");
        }
        if self.distance.0 < 0 || self.service_time.0 < 0 || self.min_window <= 0 {
            return bad("negative distance, service time or window");
        }
        for f in [self.fraction_available_at_start, self.emergency_fraction] {
            if !(0.0..=1.0).contains(&f) {
                return bad("fractions must lie in [0, 1]");
            }
        }
        if !(self.speed_km_per_min > 0.0) {
            return bad("speed must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GenerateError {
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("commodity {0}: no window fits any shift")]
    NoWindow(usize),
}

pub fn generate_instance(cfg: &GeneratorConfig) -> Result<Instance, GenerateError> {
    cfg.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.node_count;

    let mut distance = vec![vec![0; n]; n];
    let mut travel_time = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                let d = rng.gen_range(cfg.distance.0..=cfg.distance.1);
                distance[a][b] = d;
                travel_time[a][b] = (d as f64 / cfg.speed_km_per_min).round() as Minutes;
            }
        }
    }
    let mut service_time = vec![0; n];
    for t in service_time.iter_mut().skip(1) {
        *t = rng.gen_range(cfg.service_time.0..=cfg.service_time.1);
    }
    let network = Network { distance, travel_time, service_time };

    let count = rng.gen_range(cfg.commodity_count.0..=cfg.commodity_count.1);
    let total = rng.gen_range(cfg.units.0.max(count as u64)..=cfg.units.1);
    let quantities = split_units(&mut rng, count, total);

    let at_start = ((cfg.fraction_available_at_start * count as f64).round() as usize).min(count);
    let lo = (0.1 * count as f64).ceil() as usize;
    let hi = (0.3 * count as f64).floor() as usize;
    let emergencies = ((cfg.emergency_fraction * count as f64).round() as usize).clamp(lo.min(hi), hi.max(lo));
    let start_flags = pick_flags(&mut rng, count, at_start);
    let emergency_flags = pick_flags(&mut rng, count, emergencies);

    let shifts = ShiftCalendar { count: cfg.shift_count, first_start: cfg.shift_start, duration: cfg.shift_duration };
    let h0 = shifts.first_start;
    let h1 = shifts.horizon_end();
    let fleet = cfg
        .fleet
        .unwrap_or_else(|| total.div_ceil(2 * cfg.shift_count as u64).max(1) as u32);
    let mut inst = Instance { network, commodities: Vec::with_capacity(count), shifts, fleet };

    for k in 0..count {
        let origin = rng.gen_range(1..n);
        let mut dest = rng.gen_range(1..n - 1);
        if dest >= origin {
            dest += 1;
        }
        let emergency = emergency_flags[k];
        let (wlo, whi) = if emergency {
            (cfg.min_window, (cfg.emergency_window - 1).min(h1 - h0))
        } else {
            (cfg.emergency_window.min(h1 - h0), h1 - h0)
        };
        if wlo > whi {
            return Err(GenerateError::NoWindow(k));
        }
        inst.commodities.push(Commodity {
            id: format!("c{k}"),
            origin,
            dest,
            quantity: quantities[k],
            available: h0,
            deadline: h1,
        });
        let mut placed = false;
        for _ in 0..1000 {
            let len = rng.gen_range(wlo..=whi);
            let available = if start_flags[k] {
                h0
            } else if h1 - len > h0 {
                rng.gen_range(h0 + 1..=h1 - len)
            } else {
                continue;
            };
            let c = inst.commodities.last_mut().unwrap();
            c.available = available;
            c.deadline = available + len;
            if inst.dedicated_service_possible(k) {
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(GenerateError::NoWindow(k));
        }
    }
    Ok(inst)
}

/// Random subset of exactly `m` of `n` positions.
fn pick_flags<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<bool> {
    let mut flags = vec![false; n];
    for i in rand::seq::index::sample(rng, n, m.min(n)) {
        flags[i] = true;
    }
    flags
}

/// Every commodity gets one unit; the remainder follows exponential weights,
/// which yields a long tail of large commodities. Largest-remainder rounding
/// keeps the total exact.
fn split_units<R: Rng>(rng: &mut R, count: usize, total: u64) -> Vec<u32> {
    if count == 0 {
        return Vec::new();
    }
    let extra = total - count as u64;
    let weights: Vec<f64> = (0..count).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let sum: f64 = weights.iter().sum();
    let shares: Vec<f64> = weights.iter().map(|w| w / sum * extra as f64).collect();
    let mut q: Vec<u64> = shares.iter().map(|s| s.floor() as u64).collect();
    let mut left = extra - q.iter().sum::<u64>();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        q[i] += 1;
        left -= 1;
    }
    q.into_iter().map(|x| x as u32 + 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example_is_valid() {
        assert_eq!(validate_instance(&worked_example()), vec![]);
    }

    #[test]
    fn empty_window_and_self_loop_are_reported() {
        let mut inst = worked_example();
        inst.commodities[0].deadline = inst.commodities[0].available;
        inst.commodities[1].dest = inst.commodities[1].origin;
        let codes: Vec<_> = validate_instance(&inst).into_iter().map(|v| v.code).collect();
        assert!(codes.contains(&ViolationCode::WindowEmpty));
        assert!(codes.contains(&ViolationCode::SelfLoop));
    }

    #[test]
    fn generator_is_deterministic() {
        let cfg = GeneratorConfig { seed: 1, ..GeneratorConfig::default() };
        assert_eq!(generate_instance(&cfg), generate_instance(&cfg));
    }

    #[test]
    fn eight_shift_preset_hits_unit_range() {
        let cfg = GeneratorConfig::preset(8, 3).unwrap();
        let inst = generate_instance(&cfg).unwrap();
        let units = inst.total_units();
        assert!((800..=1100).contains(&units), "{units}");
        assert!((105..=130).contains(&inst.commodities.len()));
        assert!(validate_instance(&inst).is_empty());
    }

    #[test]
    fn all_available_at_start() {
        let cfg = GeneratorConfig {
            fraction_available_at_start: 1.0,
            commodity_count: (20, 20),
            units: (40, 60),
            ..GeneratorConfig::default()
        };
        let inst = generate_instance(&cfg).unwrap();
        assert!(inst.commodities.iter().all(|c| c.available == cfg.shift_start));
    }

    #[test]
    fn split_units_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let q = split_units(&mut rng, 17, 300);
        assert_eq!(q.iter().map(|&x| x as u64).sum::<u64>(), 300);
        assert!(q.iter().all(|&x| x >= 1));
    }
}
