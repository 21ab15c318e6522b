//! Browser bindings: generate an instance, solve it, and inspect the time
//! windows of a single route.

use std::fmt::Write as _;

use ftl_core::driver::{solve, ColGenConfig, GeneratorKind, InitKind};
use ftl_core::instance::{generate_instance, worked_example, GeneratorConfig, Minutes};
use ftl_core::io::{parse_instance, write_instance, write_schedule};
use ftl_core::pricing::PricingMode;
use ftl_core::routing::{compute_time_windows, propagate_push_back, simulate_schedule, Flow, Route};
use wasm_bindgen::prelude::*;

fn fail(e: impl ToString) -> JsError {
    JsError::new(&e.to_string())
}

fn clock(m: Minutes) -> String {
    format!("{}:{:02}", m / 60, m % 60)
}

/// Instance text of the small five-node example.
#[wasm_bindgen]
pub fn example_instance() -> String {
    write_instance(&worked_example())
}

/// A random instance; `commodities` and `units` are upper bounds, the lower
/// bounds are half of them.
#[wasm_bindgen]
pub fn generate(seed: u64, nodes: usize, shifts: usize, commodities: usize, units: u64) -> Result<String, JsError> {
    let cfg = GeneratorConfig {
        node_count: nodes,
        shift_count: shifts,
        commodity_count: (commodities.div_ceil(2), commodities),
        units: (units.div_ceil(2), units),
        seed,
        ..GeneratorConfig::default()
    };
    generate_instance(&cfg).map(|i| write_instance(&i)).map_err(fail)
}

/// Solves an instance and returns a short report followed by the schedule.
#[wasm_bindgen]
pub fn solve_text(instance: &str, pricing: &str, generator: &str, max_iterations: usize) -> Result<String, JsError> {
    let inst = parse_instance(instance).map_err(fail)?;
    let cfg = ColGenConfig {
        pricing: pricing.parse::<PricingMode>().map_err(fail)?,
        generator: generator.parse::<GeneratorKind>().map_err(fail)?,
        init: if inst.commodities.len() <= 8 { InitKind::Simple } else { InitKind::Insertion },
        max_iterations,
        mip_time_limit_secs: Some(10.0),
        ga: ftl_core::heuristics::GaParams { population_size: 60, generations: 30, ..Default::default() },
        ..ColGenConfig::default()
    };
    let out = solve(&inst, &cfg).map_err(fail)?;
    let s = &out.stats;
    let replay = simulate_schedule(&out.schedule, &inst);
    let mut text = String::new();
    let _ = writeln!(text, "status     {:?}", out.status);
    let _ = writeln!(text, "distance   {} km", out.schedule.objective);
    if let (Some(pre), Some(lp)) = (s.pre_cut_objective, s.lp_bound) {
        let _ = writeln!(text, "relaxation {lp:.1}, before cuts {pre}");
    }
    let _ = writeln!(text, "iterations {}, columns {}, cuts {}", s.iterations.len(), s.columns_generated, s.cuts);
    let _ = writeln!(text, "replay     {} violations", replay.violations.len());
    let _ = writeln!(text, "time       {:.2}s", s.total_secs);
    for w in &s.warnings {
        let _ = writeln!(text, "warning    {w}");
    }
    text.push('\n');
    text.push_str(&write_schedule(&out.schedule, &inst));
    Ok(text)
}

/// Earliest and latest times along a route such as `0,1,2,3,4,0`, before
/// and after the listed commodities (`k1@1 v2@3`, id at loading index) push
/// the service starts back.
#[wasm_bindgen]
pub fn time_windows(instance: &str, route: &str, shift: usize, loads: &str) -> Result<String, JsError> {
    let inst = parse_instance(instance).map_err(fail)?;
    if shift >= inst.shifts.count {
        return Err(fail(format!("shift {shift} does not exist")));
    }
    let nodes = route
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(fail)?;
    let r = Route::new(nodes, &inst.network);
    r.check(&inst.network).map_err(fail)?;
    let mut flows = Vec::new();
    for tok in loads.split_whitespace() {
        let (id, idx) = tok.split_once('@').ok_or_else(|| fail(format!("expected id@index, found {tok}")))?;
        let commodity = inst.commodity_index(id).ok_or_else(|| fail(format!("unknown commodity {id}")))?;
        let index = idx.parse().map_err(fail)?;
        flows.push(Flow { index, commodity, units: 1 });
    }
    let t = compute_time_windows(&r, shift, &inst);
    let ep = propagate_push_back(&r, &t, &flows, &inst);
    let mut text = String::new();
    let row = |text: &mut String, name: &str, v: &[Minutes]| {
        let _ = write!(text, "{name:<6}");
        for &m in v {
            let _ = write!(text, "{:>7}", clock(m));
        }
        text.push('\n');
    };
    let _ = write!(text, "{:<6}", "node");
    for n in r.nodes() {
        let _ = write!(text, "{n:>7}");
    }
    text.push('\n');
    row(&mut text, "e", &t.e);
    row(&mut text, "l", &t.l);
    row(&mut text, "e'", &ep);
    for f in &flows {
        let c = &inst.commodities[f.commodity];
        if f.index + 1 < ep.len() && ep[f.index + 1] > c.deadline {
            let _ = writeln!(text, "{} arrives {} after its deadline {}", c.id, clock(ep[f.index + 1]), clock(c.deadline));
        }
    }
    Ok(text)
}
