//! Random model generators and brute-force oracles shared by the engine
//! tests and the acceptance suite.
#![allow(dead_code)]

use ftl_lp::{LinearModel, LpSolution, Sense, VarId};
use rand::Rng;

pub fn random_lp<R: Rng>(rng: &mut R, n: usize, m: usize, bounded: bool) -> LinearModel {
    let mut model = LinearModel::new();
    let x0: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=4) as f64).collect();
    let vars: Vec<VarId> = (0..n)
        .map(|j| {
            let cost = rng.gen_range(-6..=6) as f64;
            let upper = if bounded || cost < 0.0 || rng.gen_bool(0.5) {
                x0[j] + rng.gen_range(0..=5) as f64
            } else {
                f64::INFINITY
            };
            model.add_var(format!("x{j}"), 0.0, upper, false, cost)
        })
        .collect();
    for i in 0..m {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for &v in &vars {
            if rng.gen_bool(0.7) {
                let a = rng.gen_range(-5..=5) as f64;
                if a != 0.0 {
                    terms.push((v, a));
                }
            }
        }
        let act: f64 = terms.iter().map(|&(v, a)| a * x0[v.0]).sum();
        let (sense, rhs) = match rng.gen_range(0..3) {
            0 => (Sense::Le, act + rng.gen_range(0..=3) as f64),
            1 => (Sense::Ge, act - rng.gen_range(0..=3) as f64),
            _ => (Sense::Eq, act),
        };
        model.add_constraint(format!("r{i}"), terms, sense, rhs);
    }
    model
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-9 {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                if f != 0.0 {
                    for k in c..n {
                        a[r][k] -= f * a[c][k];
                    }
                    b[r] -= f * b[c];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Minimum over all basic points of a model whose variables all have finite
/// bounds. Returns `None` when no vertex is feasible.
pub fn vertex_enumeration(model: &LinearModel) -> Option<f64> {
    let n = model.num_vars();
    let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut checks: Vec<(Vec<f64>, Sense, f64)> = Vec::new();
    for c in model.constraints() {
        let mut row = vec![0.0; n];
        for &(v, a) in &c.terms {
            row[v.0] += a;
        }
        planes.push((row.clone(), c.rhs));
        checks.push((row, c.sense, c.rhs));
    }
    for (j, v) in model.vars().iter().enumerate() {
        assert!(v.upper.is_finite());
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        planes.push((e.clone(), v.lower));
        planes.push((e.clone(), v.upper));
        checks.push((e.clone(), Sense::Ge, v.lower));
        checks.push((e, Sense::Le, v.upper));
    }
    let mut best: Option<f64> = None;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let a = pick.iter().map(|&p| planes[p].0.clone()).collect();
        let b = pick.iter().map(|&p| planes[p].1).collect();
        if let Some(x) = solve_square(a, b) {
            let ok = checks.iter().all(|(row, s, rhs)| {
                let act: f64 = row.iter().zip(&x).map(|(a, x)| a * x).sum();
                match s {
                    Sense::Le => act <= rhs + 1e-7,
                    Sense::Ge => act >= rhs - 1e-7,
                    Sense::Eq => (act - rhs).abs() <= 1e-7,
                }
            });
            if ok {
                let obj = model.objective_value(&x);
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // next combination of n out of planes.len()
        let total = planes.len();
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < total - n + i {
                pick[i] += 1;
                for k in i + 1..n {
                    pick[k] = pick[k - 1] + 1;
                }
                break;
            }
        }
    }
}

pub struct DualityReport {
    pub gap: f64,
    pub max_slackness: f64,
    pub sign_ok: bool,
    pub primal_violation: f64,
}

/// Builds the dual objective from row duals `y` alone and measures strong
/// duality, complementary slackness and dual sign feasibility.
pub fn duality_report(model: &LinearModel, sol: &LpSolution, tol: f64) -> DualityReport {
    let n = model.num_vars();
    let mut d: Vec<f64> = model.vars().iter().map(|v| v.cost).collect();
    let mut dual_obj = 0.0;
    let mut max_slack = 0.0f64;
    let mut sign_ok = true;
    for (i, c) in model.constraints().iter().enumerate() {
        let y = sol.duals[i];
        for &(v, a) in &c.terms {
            d[v.0] -= a * y;
        }
        dual_obj += y * c.rhs;
        let act = c.activity(&sol.x);
        max_slack = max_slack.max((y * (act - c.rhs)).abs());
        match c.sense {
            Sense::Le => sign_ok &= y <= tol,
            Sense::Ge => sign_ok &= y >= -tol,
            Sense::Eq => {}
        }
    }
    for j in 0..n {
        let v = &model.vars()[j];
        let x = sol.x[j];
        if d[j] > tol {
            sign_ok &= v.lower.is_finite();
            dual_obj += d[j] * v.lower;
            max_slack = max_slack.max((d[j] * (x - v.lower)).abs());
        } else if d[j] < -tol {
            sign_ok &= v.upper.is_finite();
            dual_obj += d[j] * v.upper;
            max_slack = max_slack.max((d[j] * (v.upper - x)).abs());
        }
    }
    DualityReport {
        gap: (sol.objective - dual_obj).abs(),
        max_slackness: max_slack,
        sign_ok,
        primal_violation: model.max_violation(&sol.x),
    }
}

/// Random set-covering program with binary columns; every row is covered by
/// at least one column.
pub fn random_set_cover<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> LinearModel {
    let mut model = LinearModel::new();
    let vars: Vec<VarId> = (0..cols)
        .map(|j| model.add_var(format!("c{j}"), 0.0, 1.0, true, rng.gen_range(1..=20) as f64))
        .collect();
    let mut cover: Vec<Vec<bool>> = (0..cols)
        .map(|_| (0..rows).map(|_| rng.gen_bool(0.3)).collect())
        .collect();
    for i in 0..rows {
        if !cover.iter().any(|c| c[i]) {
            let j = rng.gen_range(0..cols);
            cover[j][i] = true;
        }
        let terms = (0..cols).filter(|&j| cover[j][i]).map(|j| (vars[j], 1.0)).collect();
        model.add_constraint(format!("e{i}"), terms, Sense::Ge, 1.0);
    }
    model
}

/// Exhaustive minimum over all column subsets of a binary covering model.
pub fn subset_oracle(model: &LinearModel) -> Option<f64> {
    let n = model.num_vars();
    assert!(n <= 20);
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << n) {
        let x: Vec<f64> = (0..n).map(|j| ((mask >> j) & 1) as f64).collect();
        if model.max_violation(&x) <= 1e-9 {
            let obj = model.objective_value(&x);
            best = Some(best.map_or(obj, |b: f64| b.min(obj)));
        }
    }
    best
}
