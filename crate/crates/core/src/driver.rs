//! Column generation over the restricted master, the final integer solve and
//! the incompatibility cut loop.

use std::collections::HashSet;

use ftl_lp::{solve_lp_with, solve_mip_with_start, Basis, LinearModel, LpStatus, MipConfig, MipStatus, SimplexOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use web_time::{Duration, Instant};

use crate::heuristics::{ga_generate, insertion_init, simple_init, trip_shortfalls, vns_generate, GaParams, InitError, InsertionResult, VnsParams};
use crate::instance::{Instance, Km, Minutes};
use crate::master::{
    add_incompatibility_cuts, build_rmp, extract_duals, extract_solution, ColumnPool, DualValues, MasterError, Rmp,
    RmpOptions, RouteUse, Schedule,
};
use crate::pricing::{price_by_enumeration, price_by_estimate, price_random_ablation, Estimator, PricingMode};
use crate::routing::{
    detect_incompatibilities, enumerate_routes, round_robin_loads, simulate_schedule, EnumerateOptions,
    IncompatiblePair, Route, RoutingError, SimViolation, SimulationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Enumerated,
    Vns,
    Ga,
}

impl std::str::FromStr for GeneratorKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "enumerated" | "enum" => Ok(Self::Enumerated),
            "vns" => Ok(Self::Vns),
            "ga" => Ok(Self::Ga),
            _ => Err(format!("unknown generator {s:?}")),
        }
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Enumerated => "enumerated",
            Self::Vns => "vns",
            Self::Ga => "ga",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitKind {
    Simple,
    Insertion,
}

impl std::str::FromStr for InitKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "simple" => Ok(Self::Simple),
            "insertion" => Ok(Self::Insertion),
            _ => Err(format!("unknown initialisation {s:?}")),
        }
    }
}

impl std::fmt::Display for InitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Simple => "simple",
            Self::Insertion => "insertion",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColGenConfig {
    pub pricing: PricingMode,
    pub generator: GeneratorKind,
    pub init: InitKind,
    pub max_columns: usize,
    pub max_iterations: usize,
    pub seed: u64,
    /// Keep the fleet rows in the master while generating columns. The rows
    /// are elastic there, so an initial pool that needs too many trucks
    /// still gives a feasible relaxation.
    pub fleet_in_colgen: bool,
    /// Further iterations with elastic fleet rows when the integer master
    /// over the pool finds no schedule within the fleet.
    pub fleet_repair_iterations: usize,
    /// Rounds of cuts after the first integer solve.
    pub cut_rounds: usize,
    pub mip_node_limit: usize,
    pub mip_time_limit_secs: Option<f64>,
    /// Relative gap at which each integer solve stops.
    pub mip_gap: f64,
    /// Wall-clock limit on the column generation phase.
    pub colgen_time_limit_secs: Option<f64>,
    pub max_legs: usize,
    /// Route enumeration gives up beyond this many routes.
    pub route_budget: usize,
    pub vns: VnsParams,
    pub ga: GaParams,
    /// Candidate routes for the enumerated generator; enumerated from the
    /// instance when absent.
    #[serde(skip)]
    pub routes: Option<Vec<Route>>,
}

impl Default for ColGenConfig {
    fn default() -> Self {
        Self {
            pricing: PricingMode::P2,
            generator: GeneratorKind::Vns,
            init: InitKind::Insertion,
            max_columns: 1000,
            max_iterations: 30,
            seed: 0,
            fleet_in_colgen: false,
            fleet_repair_iterations: 5,
            cut_rounds: 20,
            mip_node_limit: 20_000,
            mip_time_limit_secs: Some(60.0),
            mip_gap: 1e-4,
            colgen_time_limit_secs: None,
            max_legs: 12,
            route_budget: 2_000_000,
            vns: VnsParams::default(),
            ga: GaParams::default(),
            routes: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// Exact pricing over all candidates found nothing negative.
    NoNegativeColumns,
    /// The generator returned only routes already in the pool.
    NoNewColumns,
    IterationLimit,
    TimeLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Clean schedule, optimal for the final pool and cuts.
    Optimal,
    /// Clean schedule without an optimality proof.
    Feasible,
    /// Limits stopped the run before a clean schedule was certified.
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub lp_objective: f64,
    pub pool_size: usize,
    pub columns_added: usize,
    /// Most negative value reported by the generator.
    pub best_estimate: Option<f64>,
    pub elapsed_secs: f64,
    /// The relaxed master carried (elastic) fleet rows.
    pub fleet_rows: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunStats {
    pub iterations: Vec<IterationStats>,
    pub stop_reason: Option<StopReason>,
    pub initial_columns: usize,
    pub columns_generated: usize,
    pub lp_bound: Option<f64>,
    pub pre_cut_objective: Option<Km>,
    pub mip_nodes: usize,
    pub mip_gap: Option<f64>,
    pub cut_rounds: usize,
    pub cuts: usize,
    /// Cuts that came from the truck-level fallback rather than the
    /// aggregate detector.
    pub fallback_cuts: usize,
    pub used_insertion_fallback: bool,
    pub colgen_secs: f64,
    pub ip_secs: f64,
    pub total_secs: f64,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: RunStatus,
    pub schedule: Schedule,
    pub stats: RunStats,
    pub pool: Vec<Route>,
    /// Cuts in force at the final integer solve.
    pub cuts: Vec<IncompatiblePair>,
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("infeasible: {}", .0.join("; "))]
    Infeasible(Vec<String>),
    #[error("incomplete: {0}")]
    NoSchedule(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Master(#[from] MasterError),
}

impl From<InitError> for SolveError {
    fn from(e: InitError) -> Self {
        SolveError::Infeasible(vec![e.to_string()])
    }
}

/// What the observer sees after each pricing round.
pub struct IterationEvent<'a> {
    pub stats: &'a IterationStats,
    pub duals: &'a DualValues,
    /// Routes with positive use in the master solution.
    pub z: &'a [Route],
    /// Generator output with the estimate each route had when emitted.
    pub generated: &'a [(Route, f64)],
}

pub fn solve(inst: &Instance, cfg: &ColGenConfig) -> Result<SolveOutcome, SolveError> {
    solve_observed(inst, cfg, &mut |_| {})
}

pub fn solve_observed(
    inst: &Instance,
    cfg: &ColGenConfig,
    observer: &mut dyn FnMut(&IterationEvent),
) -> Result<SolveOutcome, SolveError> {
    let cg = column_generation(inst, cfg, observer)?;
    finish(inst, cfg, cg, observer)
}

/// State handed from column generation to the integer phase.
#[derive(Clone, Debug)]
pub struct ColGenResult {
    pub pool: Vec<Route>,
    pub stats: RunStats,
    pub insertion: Option<InsertionResult>,
}

pub fn column_generation(
    inst: &Instance,
    cfg: &ColGenConfig,
    observer: &mut dyn FnMut(&IterationEvent),
) -> Result<ColGenResult, SolveError> {
    let t0 = Instant::now();
    if cfg.pricing == PricingMode::Random && cfg.generator != GeneratorKind::Enumerated {
        return Err(SolveError::Config("random pricing needs the enumerated generator".into()));
    }
    let short = trip_shortfalls(inst);
    if !short.is_empty() {
        return Err(SolveError::Infeasible(short));
    }
    let mut stats = RunStats::default();
    let insertion = insertion_init(inst).ok();
    let initial = match cfg.init {
        InitKind::Simple => {
            let s = simple_init(inst)?;
            stats.warnings.extend(s.warnings);
            s.routes
        }
        InitKind::Insertion => match &insertion {
            Some(ins) => ins.routes.clone(),
            None => insertion_init(inst)?.routes,
        },
    };
    if let Some(ins) = &insertion {
        if ins.virtual_trucks > 0 {
            stats.warnings.push(format!("insertion needed {} trucks beyond the fleet", ins.virtual_trucks));
        }
    }

    let mut pool: Vec<Route> = Vec::new();
    let mut in_pool: HashSet<Route> = HashSet::new();
    for r in initial {
        if in_pool.insert(r.clone()) {
            pool.push(r);
        }
    }
    stats.initial_columns = pool.len();

    let phase = Phase { fleet: cfg.fleet_in_colgen, iterations: cfg.max_iterations };
    colgen(inst, cfg, phase, &mut pool, &mut in_pool, &mut stats, observer)?;
    stats.colgen_secs = t0.elapsed().as_secs_f64();
    Ok(ColGenResult { pool, stats, insertion })
}

/// Integer solve over the pool with the fleet rows, then cut rounds until
/// the replay is clean. If no schedule fits the fleet and the columns were
/// generated without fleet rows, a few more iterations are run with them.
pub fn finish(
    inst: &Instance,
    cfg: &ColGenConfig,
    cg: ColGenResult,
    observer: &mut dyn FnMut(&IterationEvent),
) -> Result<SolveOutcome, SolveError> {
    let ColGenResult { mut pool, mut stats, insertion } = cg;
    let t1 = Instant::now();
    let mut cuts = Vec::new();
    let mut result = final_ip(inst, cfg, &pool, insertion.as_ref(), &mut stats, &mut cuts);
    let mut repair_secs = 0.0;
    if matches!(result, Err(SolveError::Infeasible(_) | SolveError::NoSchedule(_)))
        && !cfg.fleet_in_colgen
        && cfg.fleet_repair_iterations > 0
    {
        stats.warnings.push("no schedule within the fleet over the pool; generating columns against fleet rows".into());
        let t2 = Instant::now();
        let mut in_pool: HashSet<Route> = pool.iter().cloned().collect();
        let phase = Phase { fleet: true, iterations: cfg.fleet_repair_iterations };
        colgen(inst, cfg, phase, &mut pool, &mut in_pool, &mut stats, observer)?;
        repair_secs = t2.elapsed().as_secs_f64();
        result = final_ip(inst, cfg, &pool, insertion.as_ref(), &mut stats, &mut cuts);
    }
    stats.colgen_secs += repair_secs;
    stats.ip_secs = t1.elapsed().as_secs_f64() - repair_secs;
    stats.total_secs = stats.colgen_secs + stats.ip_secs;
    let (status, schedule) = result?;
    Ok(SolveOutcome { status, schedule, stats, pool, cuts })
}

#[derive(Clone, Copy)]
struct Phase {
    fleet: bool,
    iterations: usize,
}

fn colgen(
    inst: &Instance,
    cfg: &ColGenConfig,
    phase: Phase,
    pool: &mut Vec<Route>,
    in_pool: &mut HashSet<Route>,
    stats: &mut RunStats,
    observer: &mut dyn FnMut(&IterationEvent),
) -> Result<(), SolveError> {
    let t0 = Instant::now();
    let candidates = match cfg.generator {
        GeneratorKind::Enumerated => Some(match &cfg.routes {
            Some(r) => r.clone(),
            None => enumerate_routes(inst, &EnumerateOptions { max_legs: cfg.max_legs, budget: cfg.route_budget })?,
        }),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let longest = pool.iter().map(Route::distance).max().unwrap_or(1).max(1);
    let opts = RmpOptions {
        relaxed: true,
        fleet_active: phase.fleet,
        fleet_overflow_cost: phase.fleet.then_some(10.0 * longest as f64),
        ..RmpOptions::default()
    };

    let mut prev: Option<(LinearModel, Basis)> = None;
    for it in 0..phase.iterations {
        if cfg.colgen_time_limit_secs.is_some_and(|l| t0.elapsed().as_secs_f64() > l) {
            stats.stop_reason = Some(StopReason::TimeLimit);
            return Ok(());
        }
        let rmp = build_rmp(pool, inst, opts).map_err(uncoverable)?;
        let warm = prev.as_ref().map(|(m, b): &(LinearModel, Basis)| b.remap(m, &rmp.model));
        let lp = solve_lp_with(&rmp.model, &SimplexOptions::default(), warm.as_ref());
        if lp.status == LpStatus::Infeasible {
            return Err(SolveError::Infeasible(vec!["restricted master relaxation is infeasible".into()]));
        }
        let duals = extract_duals(&lp, &rmp, inst)?;
        prev = lp.basis.clone().map(|b| (rmp.model.clone(), b));
        stats.lp_bound = Some(lp.objective);
        let z = used_routes(&rmp, &lp.x);

        let est = Estimator::new(inst, &duals, cfg.pricing);
        let generated: Vec<(Route, f64)> = match (cfg.generator, cfg.pricing) {
            (GeneratorKind::Enumerated, PricingMode::Enumeration) => {
                let exclude = ColumnPool::from_routes(pool.iter().cloned());
                price_by_enumeration(candidates.as_deref().unwrap(), &duals, cfg.max_columns, inst, Some(&exclude))
                    .into_iter()
                    .map(|c| (c.route, c.reduced_cost))
                    .collect()
            }
            (GeneratorKind::Enumerated, PricingMode::Random) => {
                let fresh: Vec<Route> =
                    candidates.as_deref().unwrap().iter().filter(|r| !in_pool.contains(*r)).cloned().collect();
                price_random_ablation(&fresh, &mut rng, cfg.max_columns)
                    .into_iter()
                    .map(|r| {
                        let c = est.estimate(&r);
                        (r, c)
                    })
                    .collect()
            }
            (GeneratorKind::Enumerated, _) => {
                let exclude = ColumnPool::from_routes(pool.iter().cloned());
                price_by_estimate(candidates.as_deref().unwrap(), &est, cfg.max_columns, Some(&exclude))
            }
            (GeneratorKind::Vns, _) => {
                let params = VnsParams { max_columns: cfg.max_columns, max_legs: cfg.max_legs, ..cfg.vns };
                let out = vns_generate(&z, &est, params);
                out.pool.sorted().into_iter().map(|e| (e.route.clone(), e.estimate)).collect()
            }
            (GeneratorKind::Ga, _) => {
                let params = GaParams {
                    max_columns: cfg.max_columns,
                    max_legs: cfg.max_legs,
                    seed: cfg.seed.wrapping_mul(1_000_003).wrapping_add(it as u64),
                    ..cfg.ga
                };
                let out = ga_generate(&z, &est, params);
                out.pool.sorted().into_iter().map(|e| (e.route.clone(), e.estimate)).collect()
            }
        };

        let mut added = 0;
        for (r, _) in &generated {
            if in_pool.insert(r.clone()) {
                pool.push(r.clone());
                added += 1;
            }
        }
        stats.columns_generated += added;
        let it_stats = IterationStats {
            iteration: stats.iterations.len(),
            lp_objective: lp.objective,
            pool_size: pool.len(),
            columns_added: added,
            best_estimate: generated.iter().map(|g| g.1).reduce(f64::min),
            elapsed_secs: t0.elapsed().as_secs_f64(),
            fleet_rows: phase.fleet,
        };
        observer(&IterationEvent { stats: &it_stats, duals: &duals, z: &z, generated: &generated });
        stats.iterations.push(it_stats);
        if added == 0 {
            stats.stop_reason = Some(if cfg.generator == GeneratorKind::Enumerated && cfg.pricing == PricingMode::Enumeration {
                StopReason::NoNegativeColumns
            } else {
                StopReason::NoNewColumns
            });
            return Ok(());
        }
    }
    stats.stop_reason = Some(StopReason::IterationLimit);
    Ok(())
}

fn uncoverable(e: MasterError) -> SolveError {
    match e {
        MasterError::Uncoverable(ids) => {
            SolveError::Infeasible(ids.into_iter().map(|id| format!("{id}: no route in the pool can serve it")).collect())
        }
        other => other.into(),
    }
}

fn used_routes(rmp: &Rmp, x: &[f64]) -> Vec<Route> {
    let mut seen = vec![false; rmp.routes.len()];
    for y in &rmp.ys {
        if x[y.var.0] > 1e-9 {
            seen[y.route] = true;
        }
    }
    rmp.routes.iter().zip(seen).filter(|(_, s)| *s).map(|(r, _)| r.clone()).collect()
}

fn final_ip(
    inst: &Instance,
    cfg: &ColGenConfig,
    pool: &[Route],
    insertion: Option<&InsertionResult>,
    stats: &mut RunStats,
    cuts: &mut Vec<IncompatiblePair>,
) -> Result<(RunStatus, Schedule), SolveError> {
    let opts = RmpOptions { relaxed: false, fleet_active: true, ..RmpOptions::default() };
    let mut rmp = build_rmp(pool, inst, opts).map_err(uncoverable)?;
    let res = cut_loop(inst, cfg, pool, &mut rmp, insertion, stats);
    *cuts = rmp.cuts.clone();
    res
}

fn cut_loop(
    inst: &Instance,
    cfg: &ColGenConfig,
    pool: &[Route],
    rmp: &mut Rmp,
    insertion: Option<&InsertionResult>,
    stats: &mut RunStats,
) -> Result<(RunStatus, Schedule), SolveError> {
    let mip_cfg = MipConfig {
        node_limit: cfg.mip_node_limit,
        gap_tolerance: cfg.mip_gap,
        time_limit: cfg.mip_time_limit_secs.map(Duration::from_secs_f64),
        ..MipConfig::default()
    };
    let fallback = insertion.filter(|ins| ins.virtual_trucks == 0).map(|ins| &ins.schedule);

    let mut round = 0;
    loop {
        let start = fallback.and_then(|s| rmp.start_vector(s));
        let mip = solve_mip_with_start(&rmp.model, &mip_cfg, start.as_deref());
        stats.mip_nodes += mip.nodes;
        if !mip.has_incumbent() {
            if let Some(s) = fallback {
                stats.used_insertion_fallback = true;
                stats.warnings.push("integer master found no schedule; returning the insertion schedule".into());
                return Ok((RunStatus::Feasible, s.clone()));
            }
            return match mip.status {
                MipStatus::Infeasible => Err(SolveError::Infeasible(vec![format!(
                    "no schedule over {} pool routes fits a fleet of {} trucks",
                    pool.len(),
                    inst.fleet
                )])),
                _ => Err(SolveError::NoSchedule("integer master hit its limits without a schedule".into())),
            };
        }
        stats.mip_gap = Some(mip.gap());
        let sched = extract_solution(&mip.x, rmp, inst)?;
        if round == 0 {
            stats.pre_cut_objective = Some(sched.objective);
        }
        let report = simulate_schedule(&sched, inst);
        if report.is_clean() {
            let status = if mip.status == MipStatus::Optimal { RunStatus::Optimal } else { RunStatus::Feasible };
            return Ok((status, sched));
        }
        if round == cfg.cut_rounds {
            stats.warnings.push(format!("cut round limit {} reached with violations", cfg.cut_rounds));
            return Ok(give_up(sched, fallback, stats));
        }
        let mut pairs: Vec<IncompatiblePair> = Vec::new();
        for u in &sched.uses {
            pairs.extend(detect_incompatibilities(&u.route, &u.flows, u.shift, inst));
        }
        let mut added = add_incompatibility_cuts(rmp, &pairs)?;
        if added == 0 {
            let extra = truck_level_pairs(&sched, &report, rmp, inst);
            added = add_incompatibility_cuts(rmp, &extra)?;
            stats.fallback_cuts += added;
        }
        stats.cuts = rmp.cut_count();
        if added == 0 {
            stats.warnings.push("violations remain but no new cut could be derived".into());
            return Ok(give_up(sched, fallback, stats));
        }
        round += 1;
        stats.cut_rounds = round;
    }
}

fn give_up(sched: Schedule, fallback: Option<&Schedule>, stats: &mut RunStats) -> (RunStatus, Schedule) {
    match fallback {
        Some(s) => {
            stats.used_insertion_fallback = true;
            (RunStatus::Incomplete, s.clone())
        }
        None => (RunStatus::Incomplete, sched),
    }
}

/// Pairs read off the truck-level replay when the aggregate detector finds
/// nothing new. For each late unit, the loading that pushed its truck back
/// the most is paired with it; for a truck that overruns its shift, the two
/// largest push-backs are paired.
fn truck_level_pairs(sched: &Schedule, report: &SimulationReport, rmp: &Rmp, inst: &Instance) -> Vec<IncompatiblePair> {
    let mut out = Vec::new();
    for v in &report.violations {
        let (use_index, truck, victim) = match *v {
            SimViolation::Late { use_index, truck, index, commodity, .. } => (use_index, truck, Some((index, commodity))),
            SimViolation::ShiftOverrun { use_index, truck, .. } => (use_index, truck, None),
            _ => continue,
        };
        let ru = &sched.uses[use_index];
        let pushes = truck_pushes(ru, truck as usize, inst);
        let limit = victim.map_or(usize::MAX, |(j, _)| j);
        let mut ranked: Vec<(Minutes, usize, usize)> =
            pushes.iter().filter(|p| p.1 <= limit && p.0 > 0).copied().collect();
        ranked.sort_by(|a, b| b.0.cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));
        let pair = |(pi, pk): (usize, usize), (j, v): (usize, usize), push: Minutes| IncompatiblePair {
            route: ru.route.clone(),
            shift: ru.shift,
            i: pi,
            k: pk,
            j,
            v,
            k_push_back: push,
            v_acceptable_push_back: 0,
        };
        let fresh = |p: &IncompatiblePair| !rmp.cuts.iter().any(|c| c.key() == p.key()) && !out.contains(p);
        let chosen = match victim {
            Some(vict) => ranked
                .iter()
                .filter(|p| (p.1, p.2) != vict)
                .map(|p| pair((p.1, p.2), vict, p.0))
                .find(|p| fresh(p))
                .or_else(|| Some(pair(vict, vict, 0)).filter(|p| fresh(p))),
            None => {
                let mut found = None;
                'outer: for a in 0..ranked.len() {
                    for b in a + 1..ranked.len() {
                        let (x, y) = if (ranked[a].1, ranked[a].2) <= (ranked[b].1, ranked[b].2) {
                            (ranked[a], ranked[b])
                        } else {
                            (ranked[b], ranked[a])
                        };
                        let p = pair((x.1, x.2), (y.1, y.2), x.0);
                        if fresh(&p) {
                            found = Some(p);
                            break 'outer;
                        }
                    }
                }
                found
            }
        };
        out.extend(chosen);
    }
    out
}

/// Net push-back caused by each loading on one truck: `(push, index, commodity)`.
fn truck_pushes(ru: &RouteUse, truck: usize, inst: &Instance) -> Vec<(Minutes, usize, usize)> {
    let net = &inst.network;
    let r = ru.route.nodes();
    let loads = round_robin_loads(ru);
    let Some(load) = loads.get(truck) else { return Vec::new() };
    let mut out = Vec::new();
    let mut clock = inst.shifts.start(ru.shift);
    for idx in 0..r.len() {
        if idx > 0 {
            clock += net.service(r[idx - 1]) + net.travel(r[idx - 1], r[idx]);
        }
        let before = clock;
        for &k in &load[idx] {
            out.push(((inst.commodities[k].available - before).max(0), idx, k));
            clock = clock.max(inst.commodities[k].available);
        }
    }
    out
}
