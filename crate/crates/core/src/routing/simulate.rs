//! Replays a schedule truck by truck and reports every broken promise.
//!
//! Aggregate flows of a route instance are split over its trucks round-robin:
//! at each loading index the units are listed by commodity index and unit `u`
//! rides on truck `u`. Each truck then drives its route, waiting at a loading
//! index until every commodity it picks up there is available.

use crate::instance::{Instance, Minutes};
use crate::master::{RouteUse, Schedule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimViolation {
    Late { use_index: usize, truck: u32, index: usize, commodity: usize, delivered: Minutes, deadline: Minutes },
    Quantity { commodity: usize, scheduled: u64, required: u64 },
    BadFlow { use_index: usize, index: usize, commodity: usize, reason: &'static str },
    Overloaded { use_index: usize, index: usize, units: u64, trucks: u32 },
    ShiftOverrun { use_index: usize, truck: u32, finish: Minutes, shift_end: Minutes },
    BadRoute { use_index: usize, reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimulationReport {
    pub violations: Vec<SimViolation>,
    /// Latest delivery time of any unit, per commodity.
    pub delivered_at: Vec<Option<Minutes>>,
    /// Return time at the depot, per route instance and truck.
    pub finish: Vec<Vec<Minutes>>,
}

impl SimulationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn late(&self) -> impl Iterator<Item = &SimViolation> {
        self.violations.iter().filter(|v| matches!(v, SimViolation::Late { .. }))
    }
}

/// Per truck, the commodities loaded at each route index under the
/// round-robin split. Flows are assumed valid.
pub fn round_robin_loads(ru: &RouteUse) -> Vec<Vec<Vec<usize>>> {
    let trucks = ru.count as usize;
    let mut loads = vec![vec![Vec::new(); ru.route.len()]; trucks];
    let mut flows = ru.flows.clone();
    flows.sort_by_key(|f| (f.index, f.commodity));
    let mut unit = 0;
    let mut last = None;
    for f in flows {
        if last != Some(f.index) {
            unit = 0;
            last = Some(f.index);
        }
        for _ in 0..f.units {
            if unit < trucks && f.index < ru.route.len() {
                loads[unit][f.index].push(f.commodity);
            }
            unit += 1;
        }
    }
    loads
}

pub fn simulate_schedule(schedule: &Schedule, inst: &Instance) -> SimulationReport {
    let net = &inst.network;
    let mut report = SimulationReport {
        delivered_at: vec![None; inst.commodities.len()],
        ..SimulationReport::default()
    };
    let mut carried = vec![0u64; inst.commodities.len()];

    for (u, ru) in schedule.uses.iter().enumerate() {
        let r = ru.route.nodes();
        if let Err(e) = ru.route.check(net) {
            report.violations.push(SimViolation::BadRoute { use_index: u, reason: e.to_string() });
            report.finish.push(Vec::new());
            continue;
        }
        if ru.shift >= inst.shifts.count {
            report.violations.push(SimViolation::BadRoute { use_index: u, reason: format!("shift {} does not exist", ru.shift) });
            report.finish.push(Vec::new());
            continue;
        }
        let trucks = ru.count as usize;
        // loads[t][i] = commodities truck t picks up at index i
        let mut loads: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); r.len()]; trucks];
        let mut flows = ru.flows.clone();
        flows.sort_by_key(|f| (f.index, f.commodity));
        let mut i = 0;
        while i < flows.len() {
            let index = flows[i].index;
            let mut unit = 0u64;
            while i < flows.len() && flows[i].index == index {
                let f = flows[i];
                i += 1;
                if f.units == 0 {
                    continue;
                }
                let Some(c) = inst.commodities.get(f.commodity) else {
                    report.violations.push(SimViolation::BadFlow { use_index: u, index, commodity: f.commodity, reason: "unknown commodity" });
                    continue;
                };
                if index % 2 == 0 || index + 1 >= r.len() {
                    report.violations.push(SimViolation::BadFlow { use_index: u, index, commodity: f.commodity, reason: "not a loading index" });
                    continue;
                }
                if r[index] != c.origin || r[index + 1] != c.dest {
                    report.violations.push(SimViolation::BadFlow { use_index: u, index, commodity: f.commodity, reason: "leg does not match origin and destination" });
                    continue;
                }
                carried[f.commodity] += f.units as u64;
                for _ in 0..f.units {
                    if (unit as usize) < trucks {
                        loads[unit as usize][index].push(f.commodity);
                    }
                    unit += 1;
                }
            }
            if unit > trucks as u64 {
                report.violations.push(SimViolation::Overloaded { use_index: u, index, units: unit, trucks: ru.count });
            }
        }

        let start = inst.shifts.start(ru.shift);
        let end = inst.shifts.end(ru.shift);
        let mut finishes = Vec::with_capacity(trucks);
        for (t, load) in loads.iter().enumerate() {
            let mut clock = start;
            for idx in 0..r.len() {
                if idx > 0 {
                    clock += net.service(r[idx - 1]) + net.travel(r[idx - 1], r[idx]);
                }
                for &k in &load[idx] {
                    clock = clock.max(inst.commodities[k].available);
                }
                if idx >= 2 && idx % 2 == 0 {
                    for &k in &load[idx - 1] {
                        let deadline = inst.commodities[k].deadline;
                        let slot = &mut report.delivered_at[k];
                        *slot = Some(slot.map_or(clock, |d| d.max(clock)));
                        if clock > deadline {
                            report.violations.push(SimViolation::Late {
                                use_index: u,
                                truck: t as u32,
                                index: idx - 1,
                                commodity: k,
                                delivered: clock,
                                deadline,
                            });
                        }
                    }
                }
            }
            if clock > end {
                report.violations.push(SimViolation::ShiftOverrun { use_index: u, truck: t as u32, finish: clock, shift_end: end });
            }
            finishes.push(clock);
        }
        report.finish.push(finishes);
    }

    for (k, c) in inst.commodities.iter().enumerate() {
        if carried[k] != c.quantity as u64 {
            report.violations.push(SimViolation::Quantity { commodity: k, scheduled: carried[k], required: c.quantity as u64 });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::worked_example;
    use crate::routing::{Flow, Route};

    fn f(index: usize, commodity: usize) -> Flow {
        Flow { index, commodity, units: 1 }
    }

    #[test]
    fn route_one_twice_misses_deadlines() {
        let inst = worked_example();
        let r1 = Route::new(vec![0, 1, 2, 3, 4, 0], &inst.network);
        let s = Schedule {
            uses: vec![RouteUse { route: r1, shift: 0, count: 2, flows: vec![f(1, 0), f(1, 1), f(3, 2), f(3, 3)] }],
            objective: 158,
            cuts: 0,
        };
        let rep = simulate_schedule(&s, &inst);
        assert!(!rep.is_clean());
        assert!(rep.late().count() >= 1);
    }

    #[test]
    fn split_assignment_is_clean() {
        let inst = worked_example();
        let r1 = Route::new(vec![0, 1, 2, 3, 4, 0], &inst.network);
        let r2 = Route::new(vec![0, 3, 4, 1, 2, 0], &inst.network);
        let s = Schedule {
            uses: vec![
                RouteUse { route: r1, shift: 0, count: 1, flows: vec![f(1, 1), f(3, 3)] },
                RouteUse { route: r2, shift: 0, count: 1, flows: vec![f(1, 2), f(3, 0)] },
            ],
            objective: 208,
            cuts: 3,
        };
        let rep = simulate_schedule(&s, &inst);
        assert_eq!(rep.violations, vec![]);
        assert_eq!(rep.delivered_at[0], Some(900));
    }

    #[test]
    fn empty_schedule_without_commodities() {
        let mut inst = worked_example();
        inst.commodities.clear();
        let rep = simulate_schedule(&Schedule::default(), &inst);
        assert!(rep.is_clean());
    }

    #[test]
    fn missing_units_and_overload_are_reported() {
        let inst = worked_example();
        let r3 = Route::new(vec![0, 1, 2, 0], &inst.network);
        let s = Schedule {
            uses: vec![RouteUse { route: r3, shift: 0, count: 1, flows: vec![f(1, 0), f(1, 1)] }],
            objective: 64,
            cuts: 0,
        };
        let rep = simulate_schedule(&s, &inst);
        assert!(rep.violations.iter().any(|v| matches!(v, SimViolation::Overloaded { .. })));
        assert!(rep.violations.iter().any(|v| matches!(v, SimViolation::Quantity { commodity: 2, .. })));
    }
}
