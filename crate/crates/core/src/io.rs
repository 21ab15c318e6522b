//! Plain-text formats: instance files, route caches and schedules.
//!
//! Instance files are sectioned. `#` starts a comment anywhere on a line.
//!
//! ```text
//! [meta]
//! nodes = 5
//! shifts = 1
//! shift_start = 480
//! shift_duration = 720
//! fleet = 2
//! [distance]          # one row per node
//! [travel_time]       # one row per node
//! [service_time]      # one row
//! [commodities]       # id origin destination quantity available deadline
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::instance::{Commodity, Instance, Km, Minutes, Network, ShiftCalendar};
use crate::master::{RouteUse, Schedule};
use crate::routing::{Flow, Route};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct FormatError {
    /// 1-based; 0 when the problem is not tied to a line.
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError { line, message: message.into() }
}

/// Non-empty lines with comments stripped, paired with their line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, FormatError> {
    tok.parse().map_err(|_| err(line, format!("{what}: cannot parse {tok:?}")))
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut section = String::new();
    let mut meta: HashMap<String, (usize, String)> = HashMap::new();
    let mut rows: HashMap<&'static str, Vec<(usize, Vec<i64>)>> = HashMap::new();
    let mut commodities = Vec::new();
    let mut seen_sections = Vec::new();

    for (ln, line) in content_lines(text) {
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| err(ln, "unterminated section header"))?.trim();
            if !["meta", "distance", "travel_time", "service_time", "commodities"].contains(&name) {
                return Err(err(ln, format!("unknown section [{name}]")));
            }
            if seen_sections.iter().any(|s| s == name) {
                return Err(err(ln, format!("section [{name}] appears twice")));
            }
            seen_sections.push(name.to_string());
            section = name.to_string();
            continue;
        }
        match section.as_str() {
            "" => return Err(err(ln, "content before the first section")),
            "meta" => {
                let (k, v) = line.split_once('=').ok_or_else(|| err(ln, "expected key = value"))?;
                let k = k.trim().to_string();
                if meta.insert(k.clone(), (ln, v.trim().to_string())).is_some() {
                    return Err(err(ln, format!("duplicate key {k}")));
                }
            }
            "commodities" => {
                let t: Vec<&str> = line.split_whitespace().collect();
                if t.len() != 6 {
                    return Err(err(ln, format!("commodity needs 6 fields, found {}", t.len())));
                }
                commodities.push((
                    ln,
                    Commodity {
                        id: t[0].to_string(),
                        origin: parse_num(t[1], ln, "origin")?,
                        dest: parse_num(t[2], ln, "destination")?,
                        quantity: parse_num(t[3], ln, "quantity")?,
                        available: parse_num(t[4], ln, "available")?,
                        deadline: parse_num(t[5], ln, "deadline")?,
                    },
                ));
            }
            s => {
                let key = match s {
                    "distance" => "distance",
                    "travel_time" => "travel_time",
                    _ => "service_time",
                };
                let vals = line
                    .split_whitespace()
                    .map(|t| parse_num::<i64>(t, ln, s))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.entry(key).or_default().push((ln, vals));
            }
        }
    }

    let get = |k: &str| -> Result<(usize, i64), FormatError> {
        let (ln, v) = meta.get(k).ok_or_else(|| err(0, format!("[meta] lacks {k}")))?;
        Ok((*ln, parse_num(v, *ln, k)?))
    };
    if let Some((k, (ln, _))) =
        meta.iter().find(|(k, _)| !["nodes", "shifts", "shift_start", "shift_duration", "fleet"].contains(&k.as_str()))
    {
        return Err(err(*ln, format!("unknown key {k}")));
    }
    let (ln_n, n) = get("nodes")?;
    if n < 1 {
        return Err(err(ln_n, "nodes must be at least 1"));
    }
    let n = n as usize;
    let (ln_s, shifts) = get("shifts")?;
    let (_, shift_start) = get("shift_start")?;
    let (ln_d, shift_duration) = get("shift_duration")?;
    let (ln_f, fleet) = get("fleet")?;
    if shifts < 0 {
        return Err(err(ln_s, "shifts must be non-negative"));
    }
    if shift_duration < 0 {
        return Err(err(ln_d, "shift_duration must be non-negative"));
    }
    let fleet = u32::try_from(fleet).map_err(|_| err(ln_f, "fleet out of range"))?;

    let matrix = |name: &'static str| -> Result<Vec<Vec<i64>>, FormatError> {
        let r = rows.get(name).ok_or_else(|| err(0, format!("missing section [{name}]")))?;
        if r.len() != n {
            let ln = r.last().map_or(0, |x| x.0);
            return Err(err(ln, format!("[{name}] has {} rows, expected {n}", r.len())));
        }
        r.iter()
            .map(|(ln, v)| {
                if v.len() != n {
                    Err(err(*ln, format!("[{name}] row has {} entries, expected {n}", v.len())))
                } else {
                    Ok(v.clone())
                }
            })
            .collect()
    };
    let distance: Vec<Vec<Km>> = matrix("distance")?;
    let travel_time: Vec<Vec<Minutes>> = matrix("travel_time")?;
    let service = rows.get("service_time").ok_or_else(|| err(0, "missing section [service_time]"))?;
    let service_time: Vec<Minutes> = service.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    if service_time.len() != n {
        return Err(err(service[0].0, format!("[service_time] has {} entries, expected {n}", service_time.len())));
    }
    let mut ids = HashMap::new();
    for (ln, c) in &commodities {
        if c.origin >= n || c.dest >= n {
            return Err(err(*ln, format!("{}: node out of range", c.id)));
        }
        if ids.insert(c.id.clone(), *ln).is_some() {
            return Err(err(*ln, format!("duplicate commodity id {}", c.id)));
        }
    }
    Ok(Instance {
        network: Network { distance, travel_time, service_time },
        commodities: commodities.into_iter().map(|(_, c)| c).collect(),
        shifts: ShiftCalendar { count: shifts as usize, first_start: shift_start, duration: shift_duration },
        fleet,
    })
}

pub fn write_instance(inst: &Instance) -> String {
    let mut s = String::new();
    let n = inst.network.node_count();
    let _ = writeln!(s, "[meta]");
    let _ = writeln!(s, "nodes = {n}");
    let _ = writeln!(s, "shifts = {}", inst.shifts.count);
    let _ = writeln!(s, "shift_start = {}", inst.shifts.first_start);
    let _ = writeln!(s, "shift_duration = {}", inst.shifts.duration);
    let _ = writeln!(s, "fleet = {}", inst.fleet);
    let row = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    for (name, m) in [("distance", &inst.network.distance), ("travel_time", &inst.network.travel_time)] {
        let _ = writeln!(s, "\n[{name}]");
        for r in m {
            let _ = writeln!(s, "{}", row(r));
        }
    }
    let _ = writeln!(s, "\n[service_time]\n{}", row(&inst.network.service_time));
    let _ = writeln!(s, "\n[commodities]\n# id origin destination quantity available deadline");
    for c in &inst.commodities {
        let _ = writeln!(s, "{} {} {} {} {} {}", c.id, c.origin, c.dest, c.quantity, c.available, c.deadline);
    }
    s
}

/// One route per line: comma-separated nodes, then the distance.
pub fn write_routes(routes: &[Route]) -> String {
    routes.iter().map(|r| format!("{r} {}\n", r.distance())).collect()
}

/// Reads a route cache, rejecting routes whose stored distance disagrees
/// with the network.
pub fn parse_routes(text: &str, net: &Network) -> Result<Vec<Route>, FormatError> {
    let mut out = Vec::new();
    for (ln, line) in content_lines(text) {
        let mut parts = line.split_whitespace();
        let nodes = parse_nodes(parts.next().unwrap(), ln)?;
        let stored: Option<Km> = parts.next().map(|t| parse_num(t, ln, "distance")).transpose()?;
        if parts.next().is_some() {
            return Err(err(ln, "trailing fields"));
        }
        let r = route_on(nodes, net, ln)?;
        if let Some(d) = stored {
            if d != r.distance() {
                return Err(err(ln, format!("stored distance {d} differs from computed {}", r.distance())));
            }
        }
        out.push(r);
    }
    Ok(out)
}

fn parse_nodes(tok: &str, ln: usize) -> Result<Vec<usize>, FormatError> {
    tok.split(',').map(|t| parse_num(t, ln, "node")).collect()
}

fn route_on(nodes: Vec<usize>, net: &Network, ln: usize) -> Result<Route, FormatError> {
    if let Some(&bad) = nodes.iter().find(|&&v| v >= net.node_count()) {
        return Err(err(ln, format!("node {bad} is not in the network")));
    }
    let r = Route::new(nodes, net);
    r.check(net).map_err(|e| err(ln, e.to_string()))?;
    Ok(r)
}

pub fn write_schedule(s: &Schedule, inst: &Instance) -> String {
    let mut out = String::new();
    let mut shift = None;
    for u in &s.uses {
        if shift != Some(u.shift) {
            let _ = writeln!(out, "shift={}", u.shift);
            shift = Some(u.shift);
        }
        let _ = writeln!(out, "route={} count={}", u.route, u.count);
        for f in &u.flows {
            let _ = writeln!(out, "flow idx={} commodity={} units={}", f.index, inst.commodities[f.commodity].id, f.units);
        }
    }
    let _ = writeln!(out, "summary objective={} cuts={}", s.objective, s.cuts);
    out
}

fn fields(line: &str, ln: usize) -> Result<HashMap<&str, &str>, FormatError> {
    line.split_whitespace()
        .map(|t| t.split_once('=').ok_or_else(|| err(ln, format!("expected key=value, found {t:?}"))))
        .collect()
}

fn field<'a>(f: &HashMap<&str, &'a str>, key: &str, ln: usize) -> Result<&'a str, FormatError> {
    f.get(key).copied().ok_or_else(|| err(ln, format!("missing {key}")))
}

pub fn parse_schedule(text: &str, inst: &Instance) -> Result<Schedule, FormatError> {
    let net = &inst.network;
    let mut s = Schedule::default();
    let mut shift: Option<usize> = None;
    let mut summary = None;
    for (ln, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("flow ") {
            let f = fields(rest, ln)?;
            let id = field(&f, "commodity", ln)?;
            let commodity = inst.commodity_index(id).ok_or_else(|| err(ln, format!("unknown commodity {id}")))?;
            let u = s.uses.last_mut().ok_or_else(|| err(ln, "flow before any route"))?;
            u.flows.push(Flow {
                index: parse_num(field(&f, "idx", ln)?, ln, "idx")?,
                commodity,
                units: parse_num(field(&f, "units", ln)?, ln, "units")?,
            });
        } else if let Some(rest) = line.strip_prefix("summary ") {
            let f = fields(rest, ln)?;
            let obj: Km = parse_num(field(&f, "objective", ln)?, ln, "objective")?;
            let cuts: usize = parse_num(field(&f, "cuts", ln)?, ln, "cuts")?;
            summary = Some((ln, obj, cuts));
        } else if line.starts_with("route=") {
            let f = fields(line, ln)?;
            let sh = shift.ok_or_else(|| err(ln, "route before any shift"))?;
            let nodes = parse_nodes(field(&f, "route", ln)?, ln)?;
            let count = parse_num(field(&f, "count", ln)?, ln, "count")?;
            s.uses.push(RouteUse { route: route_on(nodes, net, ln)?, shift: sh, count, flows: Vec::new() });
        } else if let Some(v) = line.strip_prefix("shift=") {
            let sh: usize = parse_num(v.trim(), ln, "shift")?;
            if sh >= inst.shifts.count {
                return Err(err(ln, format!("shift {sh} does not exist")));
            }
            shift = Some(sh);
        } else {
            return Err(err(ln, format!("unrecognised line {line:?}")));
        }
    }
    let (ln, obj, cuts) = summary.ok_or_else(|| err(0, "missing summary line"))?;
    s.objective = s.distance();
    if obj != s.objective {
        return Err(err(ln, format!("summary objective {obj} differs from route distance {}", s.objective)));
    }
    s.cuts = cuts;
    Ok(s)
}
