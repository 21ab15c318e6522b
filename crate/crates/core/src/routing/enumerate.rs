use super::{Route, RoutingError};
use crate::instance::{Instance, Minutes, DEPOT};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub max_legs: usize,
    /// Maximum number of routes before giving up.
    pub budget: usize,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self { max_legs: 12, budget: 2_000_000 }
    }
}

/// All distance-wise feasible routes built from the instance's commodity
/// legs, sorted by node sequence. The empty route is not included.
pub fn enumerate_routes(inst: &Instance, opts: &EnumerateOptions) -> Result<Vec<Route>, RoutingError> {
    let mut legs = inst.od_pairs();
    legs.sort_unstable();
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    dfs(inst, &legs, opts, &mut prefix, 0, DEPOT, &mut out)?;
    out.sort_unstable();
    Ok(out)
}

/// `elapsed` covers service and travel up to arrival at `last`, excluding
/// the service at `last`.
fn dfs(
    inst: &Instance,
    legs: &[(usize, usize)],
    opts: &EnumerateOptions,
    prefix: &mut Vec<(usize, usize)>,
    elapsed: Minutes,
    last: usize,
    out: &mut Vec<Route>,
) -> Result<(), RoutingError> {
    if prefix.len() == opts.max_legs {
        return Ok(());
    }
    let net = &inst.network;
    let limit = inst.shifts.duration;
    for &(o, d) in legs {
        let at_d = elapsed + net.service(last) + net.travel(last, o) + net.service(o) + net.travel(o, d);
        if at_d + net.service(d) + net.travel(d, DEPOT) > limit {
            continue;
        }
        prefix.push((o, d));
        if out.len() >= opts.budget {
            return Err(RoutingError::BudgetExceeded(out.len()));
        }
        out.push(Route::from_legs(prefix, net));
        dfs(inst, legs, opts, prefix, at_d, d, out)?;
        prefix.pop();
    }
    Ok(())
}
