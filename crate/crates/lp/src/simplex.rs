//! Bounded-variable primal simplex.
//!
//! Every row `a_i x (sense) b_i` gets a logical variable `s_i = a_i x` whose
//! bounds encode the sense, so the working system is `[A, -I] z = 0` with
//! bounds on all of `z`. Phase one minimises the sum of bound violations of
//! basic variables, which also lets a solve restart from any earlier basis
//! after bounds have moved.

use std::collections::HashMap;

use web_time::Instant;

use crate::factor::Factor;
use crate::model::{LinearModel, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum VarState {
    Basic,
    Lower,
    Upper,
    Free,
}

/// Basis snapshot usable as a warm start for a model with the same shape.
#[derive(Clone, Debug)]
pub struct Basis {
    pub(crate) head: Vec<usize>,
    pub(crate) state: Vec<VarState>,
}

impl Basis {
    /// Carries this basis, taken on `old`, over to `new` by variable and
    /// constraint names. Unmatched variables start nonbasic at a bound and
    /// unmatched rows with their logical basic; the result is trimmed or
    /// padded with logicals to the row count of `new`.
    pub fn remap(&self, old: &LinearModel, new: &LinearModel) -> Basis {
        let (n0, n1, m1) = (old.num_vars(), new.num_vars(), new.num_constraints());
        let vars: HashMap<&str, usize> = old.vars().iter().enumerate().map(|(j, v)| (v.name.as_str(), j)).collect();
        let rows: HashMap<&str, usize> =
            old.constraints().iter().enumerate().map(|(i, c)| (c.name.as_str(), i)).collect();
        let mut state = vec![VarState::Lower; n1 + m1];
        for (j, v) in new.vars().iter().enumerate() {
            if let Some(&o) = vars.get(v.name.as_str()) {
                state[j] = self.state[o];
            }
        }
        for (i, c) in new.constraints().iter().enumerate() {
            state[n1 + i] = match rows.get(c.name.as_str()) {
                Some(&o) => self.state[n0 + o],
                None => VarState::Basic,
            };
        }
        let mut head: Vec<usize> = (0..n1 + m1).filter(|&j| state[j] == VarState::Basic).collect();
        while head.len() > m1 {
            let j = head.iter().rposition(|&j| j < n1).unwrap_or(head.len() - 1);
            state[head.remove(j)] = VarState::Lower;
        }
        for i in 0..m1 {
            if head.len() == m1 {
                break;
            }
            if state[n1 + i] != VarState::Basic {
                state[n1 + i] = VarState::Basic;
                head.push(n1 + i);
            }
        }
        Basis { head, state }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexOptions {
    pub max_iterations: Option<usize>,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    pub refactor_every: usize,
    /// Stop with [`LpStatus::IterationLimit`] once this instant has passed.
    pub deadline: Option<Instant>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: None,
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            bland_after: 50,
            refactor_every: 100,
            deadline: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal values of the structural variables.
    pub x: Vec<f64>,
    /// One value per constraint: the rate of change of the optimal objective
    /// with respect to the right-hand side.
    pub duals: Vec<f64>,
    pub reduced_costs: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

/// Column-compressed computational form of a model.
#[derive(Clone, Debug)]
pub(crate) struct StdForm {
    pub n: usize,
    pub m: usize,
    pub col_start: Vec<usize>,
    pub row_idx: Vec<usize>,
    pub vals: Vec<f64>,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl StdForm {
    pub fn from_model(model: &LinearModel) -> Self {
        let n = model.num_vars();
        let m = model.num_constraints();
        let mut counts = vec![0usize; n];
        for c in model.constraints() {
            for &(v, a) in &c.terms {
                if a != 0.0 {
                    counts[v.0] += 1;
                }
            }
        }
        let mut col_start = vec![0usize; n + 1];
        for j in 0..n {
            col_start[j + 1] = col_start[j] + counts[j];
        }
        let nnz = col_start[n];
        let mut row_idx = vec![0usize; nnz];
        let mut vals = vec![0.0; nnz];
        let mut fill = col_start.clone();
        for (i, c) in model.constraints().iter().enumerate() {
            for &(v, a) in &c.terms {
                if a != 0.0 {
                    let k = fill[v.0];
                    row_idx[k] = i;
                    vals[k] = a;
                    fill[v.0] += 1;
                }
            }
        }
        // Duplicate terms for the same (row, var) are merged.
        for j in 0..n {
            let (s, e) = (col_start[j], col_start[j + 1]);
            let mut pairs: Vec<(usize, f64)> =
                (s..e).map(|k| (row_idx[k], vals[k])).collect();
            pairs.sort_by_key(|p| p.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
            for (r, a) in pairs {
                match merged.last_mut() {
                    Some(last) if last.0 == r => last.1 += a,
                    _ => merged.push((r, a)),
                }
            }
            for (k, (r, a)) in merged.iter().enumerate() {
                row_idx[s + k] = *r;
                vals[s + k] = *a;
            }
            for k in s + merged.len()..e {
                row_idx[k] = usize::MAX;
                vals[k] = 0.0;
            }
        }
        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for v in model.vars() {
            lower.push(v.lower);
            upper.push(v.upper);
        }
        for c in model.constraints() {
            let (l, u) = match c.sense {
                Sense::Le => (f64::NEG_INFINITY, c.rhs),
                Sense::Ge => (c.rhs, f64::INFINITY),
                Sense::Eq => (c.rhs, c.rhs),
            };
            lower.push(l);
            upper.push(u);
        }
        StdForm {
            n,
            m,
            col_start,
            row_idx,
            vals,
            cost: model.vars().iter().map(|v| v.cost).collect(),
            lower,
            upper,
        }
    }

    fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.col_start[j], self.col_start[j + 1]);
        self.row_idx[s..e]
            .iter()
            .zip(&self.vals[s..e])
            .filter(|(&r, _)| r != usize::MAX)
            .map(|(&r, &a)| (r, a))
    }

    /// Writes column `j` of `[A, -I]` into a zeroed dense vector.
    fn scatter(&self, j: usize, out: &mut [f64]) {
        if j < self.n {
            for (r, a) in self.column(j) {
                out[r] = a;
            }
        } else {
            out[j - self.n] = -1.0;
        }
    }

    fn dot_column(&self, j: usize, y: &[f64]) -> f64 {
        if j < self.n {
            self.column(j).map(|(r, a)| a * y[r]).sum()
        } else {
            -y[j - self.n]
        }
    }

    fn nnz(&self, j: usize) -> usize {
        if j < self.n {
            self.column(j).count()
        } else {
            1
        }
    }
}

pub(crate) struct RawResult {
    pub status: LpStatus,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

struct Simplex<'a> {
    sf: &'a StdForm,
    opts: &'a SimplexOptions,
    z: Vec<f64>,
    state: Vec<VarState>,
    head: Vec<usize>,
    factor: Factor,
    since_refactor: usize,
}

enum Step {
    Optimal,
    Infeasible,
    Unbounded,
    Moved,
}

impl<'a> Simplex<'a> {
    fn new(sf: &'a StdForm, opts: &'a SimplexOptions, warm: Option<&Basis>) -> Self {
        let total = sf.n + sf.m;
        let mut s = Simplex {
            sf,
            opts,
            z: vec![0.0; total],
            state: vec![VarState::Lower; total],
            head: (sf.n..total).collect(),
            factor: Factor::new(),
            since_refactor: 0,
        };
        match warm {
            Some(b) if b.head.len() == sf.m && b.state.len() == total => {
                s.head = b.head.clone();
                s.state = b.state.clone();
            }
            _ => {
                for j in 0..sf.n {
                    s.state[j] = VarState::Lower;
                }
                for i in 0..sf.m {
                    s.state[sf.n + i] = VarState::Basic;
                }
            }
        }
        for j in 0..total {
            if s.state[j] != VarState::Basic {
                s.place_nonbasic(j, s.state[j]);
            }
        }
        s.reinvert();
        s
    }

    /// Puts a nonbasic variable on a bound consistent with `hint`.
    fn place_nonbasic(&mut self, j: usize, hint: VarState) {
        let (l, u) = (self.sf.lower[j], self.sf.upper[j]);
        let st = match hint {
            VarState::Upper if u.is_finite() => VarState::Upper,
            VarState::Free if !l.is_finite() && !u.is_finite() => VarState::Free,
            _ if l.is_finite() => VarState::Lower,
            _ if u.is_finite() => VarState::Upper,
            _ => VarState::Free,
        };
        self.state[j] = st;
        self.z[j] = match st {
            VarState::Lower => l,
            VarState::Upper => u,
            _ => 0.0,
        };
    }

    /// Rebuilds the eta file from the logical basis and recomputes basic values.
    fn reinvert(&mut self) {
        let sf = self.sf;
        let (n, m) = (sf.n, sf.m);
        let mut structurals: Vec<usize> = self
            .head
            .iter()
            .copied()
            .filter(|&j| j < n)
            .collect();
        structurals.sort_by_key(|&j| (sf.nnz(j), j));
        let mut available = vec![true; m];
        for &j in &self.head {
            if j >= n {
                available[j - n] = false;
            }
        }
        let (order, reserved) = triangular_order(sf, &structurals, &available);
        self.factor.clear();
        let mut head: Vec<usize> = (n..n + m).collect();
        let mut alpha = vec![0.0; m];
        let mut mark = vec![false; m];
        let mut nz: Vec<usize> = Vec::new();
        let mut at_row = vec![usize::MAX; m];
        for (j, forced) in order {
            for &i in &nz {
                alpha[i] = 0.0;
                mark[i] = false;
            }
            nz.clear();
            for (r, a) in sf.column(j) {
                alpha[r] = a;
                if !mark[r] {
                    mark[r] = true;
                    nz.push(r);
                }
            }
            self.factor.ftran_sparse(&mut alpha, &mut nz, &mut mark, &at_row);
            nz.sort_unstable();
            let mut best: Option<(usize, f64)> =
                forced.filter(|&r| available[r] && alpha[r].abs() > 1e-7).map(|r| (r, f64::INFINITY));
            for pass in [false, true] {
                if best.is_some() {
                    break;
                }
                for &r in &nz {
                    let a = alpha[r];
                    if available[r] && (pass || !reserved[r]) && a.abs() > best.map_or(1e-7, |b| b.1) {
                        best = Some((r, a.abs()));
                    }
                }
            }
            match best {
                Some((r, _)) => {
                    at_row[r] = self.factor.len();
                    self.factor.push_sparse(r, &alpha, &nz);
                    available[r] = false;
                    head[r] = j;
                }
                None => {
                    // Singular in this basis: drop it to a bound.
                    self.place_nonbasic(j, VarState::Lower);
                }
            }
        }
        for r in 0..m {
            if available[r] {
                // Row whose structural could not be placed keeps its logical.
                head[r] = n + r;
            }
        }
        let mut in_head = vec![false; n + m];
        for &j in &head {
            in_head[j] = true;
        }
        for j in 0..n + m {
            if self.state[j] == VarState::Basic && !in_head[j] {
                let v = self.z[j];
                let (l, u) = (sf.lower[j], sf.upper[j]);
                let hint = if u.is_finite() && (!l.is_finite() || (u - v).abs() < (v - l).abs()) {
                    VarState::Upper
                } else {
                    VarState::Lower
                };
                self.place_nonbasic(j, hint);
            }
        }
        for &j in &head {
            self.state[j] = VarState::Basic;
        }
        self.head = head;
        self.since_refactor = 0;
        self.recompute_basics();
    }

    fn recompute_basics(&mut self) {
        let sf = self.sf;
        let mut rhs = vec![0.0; sf.m];
        for j in 0..sf.n + sf.m {
            if self.state[j] == VarState::Basic || self.z[j] == 0.0 {
                continue;
            }
            let v = self.z[j];
            if j < sf.n {
                for (r, a) in sf.column(j) {
                    rhs[r] -= a * v;
                }
            } else {
                rhs[j - sf.n] += v;
            }
        }
        self.factor.ftran(&mut rhs);
        for (r, &j) in self.head.iter().enumerate() {
            self.z[j] = rhs[r];
        }
    }

    fn tol(&self, bound: f64) -> f64 {
        self.opts.feasibility_tol * bound.abs().max(1.0)
    }

    fn below(&self, j: usize) -> bool {
        self.z[j] < self.sf.lower[j] - self.tol(self.sf.lower[j])
    }

    fn above(&self, j: usize) -> bool {
        self.z[j] > self.sf.upper[j] + self.tol(self.sf.upper[j])
    }

    fn phase_costs(&self, phase_one: bool) -> Vec<f64> {
        self.head
            .iter()
            .map(|&j| {
                if phase_one {
                    if self.below(j) {
                        -1.0
                    } else if self.above(j) {
                        1.0
                    } else {
                        0.0
                    }
                } else if j < self.sf.n {
                    self.sf.cost[j]
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn iterate(&mut self, bland: bool, degenerate: &mut bool) -> Step {
        let sf = self.sf;
        let (n, m) = (sf.n, sf.m);
        let phase_one = self.head.iter().any(|&j| self.below(j) || self.above(j));
        let mut y = self.phase_costs(phase_one);
        self.factor.btran(&mut y);

        // Pricing.
        let otol = self.opts.optimality_tol;
        let mut entering: Option<(usize, f64, f64)> = None; // (var, dir, score)
        for j in 0..n + m {
            let st = self.state[j];
            if st == VarState::Basic {
                continue;
            }
            if sf.lower[j] == sf.upper[j] {
                continue;
            }
            let c = if !phase_one && j < n { sf.cost[j] } else { 0.0 };
            let d = c - sf.dot_column(j, &y);
            let dir = match st {
                VarState::Lower if d < -otol => 1.0,
                VarState::Upper if d > otol => -1.0,
                VarState::Free if d.abs() > otol => -d.signum(),
                _ => continue,
            };
            if bland {
                entering = Some((j, dir, d.abs()));
                break;
            }
            if entering.map_or(true, |e| d.abs() > e.2) {
                entering = Some((j, dir, d.abs()));
            }
        }
        let Some((q, dir, _)) = entering else {
            return if phase_one { Step::Infeasible } else { Step::Optimal };
        };

        let mut alpha = vec![0.0; m];
        sf.scatter(q, &mut alpha);
        self.factor.ftran(&mut alpha);

        // Ratio test: basic r moves by delta_r per unit step.
        let ptol = 1e-9;
        let limit = |s: &Self, r: usize, delta: f64, slack: f64| -> Option<f64> {
            let j = s.head[r];
            let (l, u, v) = (sf.lower[j], sf.upper[j], s.z[j]);
            if phase_one && s.below(j) {
                (delta > 0.0).then(|| (l - v + slack) / delta)
            } else if phase_one && s.above(j) {
                (delta < 0.0).then(|| (v - u + slack) / -delta)
            } else if delta < 0.0 && l.is_finite() {
                Some(((v - l + slack) / -delta).max(0.0))
            } else if delta > 0.0 && u.is_finite() {
                Some(((u - v + slack) / delta).max(0.0))
            } else {
                None
            }
        };
        let flip = sf.upper[q] - sf.lower[q];
        let mut leave: Option<(usize, f64)> = None;
        if bland {
            for r in 0..m {
                let delta = -dir * alpha[r];
                if delta.abs() <= ptol {
                    continue;
                }
                if let Some(t) = limit(self, r, delta, 0.0) {
                    let better = match leave {
                        None => true,
                        Some((lr, lt)) => {
                            t < lt - 1e-12 || (t <= lt + 1e-12 && self.head[r] < self.head[lr])
                        }
                    };
                    if better {
                        leave = Some((r, t));
                    }
                }
            }
        } else {
            let mut t_max = f64::INFINITY;
            for r in 0..m {
                let delta = -dir * alpha[r];
                if delta.abs() <= ptol {
                    continue;
                }
                if let Some(t) = limit(self, r, delta, self.opts.feasibility_tol) {
                    t_max = t_max.min(t);
                }
            }
            if t_max.is_finite() {
                let mut best_piv = 0.0;
                for r in 0..m {
                    let delta = -dir * alpha[r];
                    if delta.abs() <= ptol {
                        continue;
                    }
                    if let Some(t) = limit(self, r, delta, 0.0) {
                        if t <= t_max && alpha[r].abs() > best_piv {
                            best_piv = alpha[r].abs();
                            leave = Some((r, t.max(0.0)));
                        }
                    }
                }
            }
        }

        let step_len = match leave {
            Some((_, t)) => t.min(flip),
            None => flip,
        };
        if !step_len.is_finite() {
            return Step::Unbounded;
        }
        *degenerate = step_len <= 1e-12;

        // Which bound the leaving variable lands on is fixed by its state before the step.
        let lands_on_lower = leave.map(|(r, _)| {
            let out = self.head[r];
            let delta = -dir * alpha[r];
            if phase_one && self.below(out) {
                true
            } else if phase_one && self.above(out) {
                false
            } else {
                delta < 0.0
            }
        });

        for r in 0..m {
            if alpha[r] != 0.0 {
                let j = self.head[r];
                self.z[j] -= dir * alpha[r] * step_len;
            }
        }
        self.z[q] += dir * step_len;

        match leave {
            Some((r, t)) if t < flip => {
                let out = self.head[r];
                let (l, u) = (sf.lower[out], sf.upper[out]);
                if lands_on_lower == Some(true) && l.is_finite() || !u.is_finite() {
                    self.z[out] = l;
                    self.state[out] = VarState::Lower;
                } else {
                    self.z[out] = u;
                    self.state[out] = VarState::Upper;
                }
                self.head[r] = q;
                self.state[q] = VarState::Basic;
                self.factor.push(r, &alpha);
                self.since_refactor += 1;
            }
            _ => {
                // Entering variable reaches its opposite bound.
                if dir > 0.0 {
                    self.z[q] = sf.upper[q];
                    self.state[q] = VarState::Upper;
                } else {
                    self.z[q] = sf.lower[q];
                    self.state[q] = VarState::Lower;
                }
            }
        }
        Step::Moved
    }

    fn run(mut self) -> RawResult {
        let sf = self.sf;
        let max_iter = self
            .opts
            .max_iterations
            .unwrap_or(200 * (sf.n + sf.m) + 10_000);
        let mut iterations = 0;
        let mut streak = 0usize;
        let mut fresh = true;
        let status = loop {
            if self.since_refactor >= self.opts.refactor_every {
                self.reinvert();
                fresh = true;
            }
            if iterations >= max_iter {
                break LpStatus::IterationLimit;
            }
            if iterations % 50 == 49 && self.opts.deadline.is_some_and(|d| Instant::now() >= d) {
                break LpStatus::IterationLimit;
            }
            let mut degenerate = false;
            match self.iterate(streak >= self.opts.bland_after, &mut degenerate) {
                Step::Moved => {
                    iterations += 1;
                    fresh = false;
                    streak = if degenerate { streak + 1 } else { 0 };
                }
                terminal => {
                    if !fresh && self.factor.len() > 0 {
                        // Confirm the verdict on freshly computed values.
                        if self.since_refactor < 20 {
                            self.recompute_basics();
                        } else {
                            self.reinvert();
                        }
                        fresh = true;
                        continue;
                    }
                    break match terminal {
                        Step::Optimal => LpStatus::Optimal,
                        Step::Infeasible => LpStatus::Infeasible,
                        _ => LpStatus::Unbounded,
                    };
                }
            }
        };
        let mut y: Vec<f64> = self
            .head
            .iter()
            .map(|&j| if j < sf.n { sf.cost[j] } else { 0.0 })
            .collect();
        self.factor.btran(&mut y);
        RawResult {
            status,
            z: self.z,
            y,
            basis: Basis {
                head: self.head,
                state: self.state,
            },
            iterations,
        }
    }
}

/// Pivot order for reinversion: row singletons first, column singletons
/// last (latest found first), the remaining bump in between by column
/// count. Singleton columns carry the row they should pivot on; with this
/// order their etas see no fill-in.
fn triangular_order(sf: &StdForm, cols: &[usize], available: &[bool]) -> (Vec<(usize, Option<usize>)>, Vec<bool>) {
    let m = sf.m;
    let mut row_cols: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut col_count = vec![0usize; cols.len()];
    for (c, &j) in cols.iter().enumerate() {
        for (r, _) in sf.column(j) {
            if available[r] {
                row_cols[r].push(c);
                col_count[c] += 1;
            }
        }
    }
    let mut row_count: Vec<usize> = row_cols.iter().map(Vec::len).collect();
    let mut row_live = available.to_vec();
    let mut col_live = vec![true; cols.len()];
    let mut front = Vec::new();
    let mut stack: Vec<usize> = (0..m).filter(|&r| row_live[r] && row_count[r] == 1).collect();
    while let Some(r) = stack.pop() {
        if !row_live[r] || row_count[r] != 1 {
            continue;
        }
        let Some(&c) = row_cols[r].iter().find(|&&c| col_live[c]) else { continue };
        col_live[c] = false;
        row_live[r] = false;
        front.push((cols[c], Some(r)));
        for (i, _) in sf.column(cols[c]) {
            if row_live[i] {
                row_count[i] -= 1;
                if row_count[i] == 1 {
                    stack.push(i);
                }
            }
        }
    }
    // Column counts over the rows still live.
    for (c, &j) in cols.iter().enumerate() {
        col_count[c] = if col_live[c] { sf.column(j).filter(|&(r, _)| row_live[r]).count() } else { 0 };
    }
    let mut back = Vec::new();
    let mut stack: Vec<usize> = (0..cols.len()).filter(|&c| col_live[c] && col_count[c] == 1).collect();
    while let Some(c) = stack.pop() {
        if !col_live[c] || col_count[c] != 1 {
            continue;
        }
        let Some((r, _)) = sf.column(cols[c]).find(|&(r, _)| row_live[r]) else { continue };
        col_live[c] = false;
        row_live[r] = false;
        back.push((cols[c], Some(r)));
        for &d in &row_cols[r] {
            if col_live[d] {
                col_count[d] -= 1;
                if col_count[d] == 1 {
                    stack.push(d);
                }
            }
        }
    }
    let bump = cols.iter().enumerate().filter(|&(c, _)| col_live[c]).map(|(_, &j)| (j, None));
    let reserved = (0..m).map(|r| available[r] && !row_live[r]).collect();
    (front.into_iter().chain(bump).chain(back.into_iter().rev()).collect(), reserved)
}

pub(crate) fn run_simplex(sf: &StdForm, opts: &SimplexOptions, warm: Option<&Basis>) -> RawResult {
    Simplex::new(sf, opts, warm).run()
}

pub(crate) fn package(sf: &StdForm, raw: RawResult) -> LpSolution {
    let x: Vec<f64> = raw.z[..sf.n].to_vec();
    let reduced_costs = (0..sf.n)
        .map(|j| sf.cost[j] - sf.dot_column(j, &raw.y))
        .collect();
    let objective = sf.cost.iter().zip(&x).map(|(c, v)| c * v).sum();
    LpSolution {
        status: raw.status,
        x,
        duals: raw.y,
        reduced_costs,
        objective,
        iterations: raw.iterations,
        basis: Some(raw.basis),
    }
}

/// Solves the continuous relaxation of `model` (integrality flags are ignored).
pub fn solve_lp(model: &LinearModel) -> LpSolution {
    solve_lp_with(model, &SimplexOptions::default(), None)
}

pub fn solve_lp_with(
    model: &LinearModel,
    opts: &SimplexOptions,
    warm: Option<&Basis>,
) -> LpSolution {
    let sf = StdForm::from_model(model);
    let raw = run_simplex(&sf, opts, warm);
    package(&sf, raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_lower_bound_row() {
        let mut m = LinearModel::new();
        let x = m.add_nonneg("x", 1.0);
        m.add_constraint("c", vec![(x, 1.0)], Sense::Ge, 3.0);
        let s = solve_lp(&m);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] - 3.0).abs() < 1e-12);
        assert!((s.duals[0] - 1.0).abs() < 1e-12);
        assert!((s.objective - 3.0).abs() < 1e-12);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut m = LinearModel::new();
        let x = m.add_nonneg("x", 1.0);
        m.add_constraint("a", vec![(x, 1.0)], Sense::Le, 1.0);
        m.add_constraint("b", vec![(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(solve_lp(&m).status, LpStatus::Infeasible);

        let mut m = LinearModel::new();
        let x = m.add_nonneg("x", -1.0);
        let y = m.add_nonneg("y", 0.0);
        m.add_constraint("a", vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&m).status, LpStatus::Unbounded);
    }

    #[test]
    fn empty_model_and_free_variable() {
        let m = LinearModel::new();
        let s = solve_lp(&m);
        assert_eq!(s.status, LpStatus::Optimal);
        assert_eq!(s.objective, 0.0);

        let mut m = LinearModel::new();
        let x = m.add_var("x", f64::NEG_INFINITY, f64::INFINITY, false, 1.0);
        m.add_constraint("a", vec![(x, 1.0)], Sense::Ge, -4.0);
        let s = solve_lp(&m);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.x[0] + 4.0).abs() < 1e-12);
    }

    #[test]
    fn classic_two_variable_lp_with_duals() {
        // max 3x + 5y st x <= 4, 2y <= 12, 3x + 2y <= 18  => (2, 6), 36
        let mut m = LinearModel::new();
        let x = m.add_nonneg("x", -3.0);
        let y = m.add_nonneg("y", -5.0);
        m.add_constraint("r1", vec![(x, 1.0)], Sense::Le, 4.0);
        m.add_constraint("r2", vec![(y, 2.0)], Sense::Le, 12.0);
        m.add_constraint("r3", vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        let s = solve_lp(&m);
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
        // Textbook shadow prices (0, 3/2, 1), negated for minimisation.
        assert!(s.duals[0].abs() < 1e-9);
        assert!((s.duals[1] + 1.5).abs() < 1e-9);
        assert!((s.duals[2] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn warm_start_after_bound_change() {
        let mut m = LinearModel::new();
        let x = m.add_var("x", 0.0, 10.0, false, -1.0);
        let y = m.add_var("y", 0.0, 10.0, false, -1.0);
        m.add_constraint("r", vec![(x, 2.0), (y, 1.0)], Sense::Le, 7.0);
        let s = solve_lp(&m);
        assert!((s.objective + 7.0).abs() < 1e-9);
        m.var_mut(y).upper = 2.0;
        let s2 = solve_lp_with(&m, &SimplexOptions::default(), s.basis.as_ref());
        assert_eq!(s2.status, LpStatus::Optimal);
        assert!((s2.objective + 4.5).abs() < 1e-9);
    }
}
