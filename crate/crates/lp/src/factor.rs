//! Product-form basis inverse.
//!
//! The starting basis is the all-logical basis `-I`; every pivot appends an
//! elementary column transformation. Reinversion rebuilds the file from the
//! logical basis so its length stays bounded.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

const DROP_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
struct Eta {
    row: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Factor {
    etas: Vec<Eta>,
}

impl Factor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.etas.clear();
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    /// `v <- B^{-1} v`
    pub fn ftran(&self, v: &mut [f64]) {
        for x in v.iter_mut() {
            *x = -*x;
        }
        for eta in &self.etas {
            let vp = v[eta.row] / eta.pivot;
            v[eta.row] = vp;
            if vp != 0.0 {
                for &(i, a) in &eta.entries {
                    v[i] -= a * vp;
                }
            }
        }
    }

    /// As [`Factor::ftran`] for a sparse `v`, valid while every eta pivots on
    /// a distinct row. `at_row[r]` is the eta pivoting on `r` or `usize::MAX`.
    /// `nz` lists the positions that may be nonzero and is extended as
    /// fill-in appears; `mark` flags them.
    pub fn ftran_sparse(&self, v: &mut [f64], nz: &mut Vec<usize>, mark: &mut [bool], at_row: &[usize]) {
        let mut heap = BinaryHeap::new();
        for &i in nz.iter() {
            v[i] = -v[i];
            if at_row[i] != usize::MAX {
                heap.push(Reverse(at_row[i]));
            }
        }
        while let Some(Reverse(t)) = heap.pop() {
            let eta = &self.etas[t];
            let vp = v[eta.row];
            if vp == 0.0 {
                continue;
            }
            let vp = vp / eta.pivot;
            v[eta.row] = vp;
            for &(i, a) in &eta.entries {
                if !mark[i] {
                    mark[i] = true;
                    nz.push(i);
                    if at_row[i] != usize::MAX && at_row[i] > t {
                        heap.push(Reverse(at_row[i]));
                    }
                }
                v[i] -= a * vp;
            }
        }
    }

    /// As [`Factor::push`] when the nonzeros of `alpha` lie in sorted `nz`.
    pub fn push_sparse(&mut self, row: usize, alpha: &[f64], nz: &[usize]) {
        let entries = nz
            .iter()
            .filter(|&&i| i != row && alpha[i].abs() > DROP_TOL)
            .map(|&i| (i, alpha[i]))
            .collect();
        self.etas.push(Eta {
            row,
            pivot: alpha[row],
            entries,
        });
    }

    /// `w^T <- w^T B^{-1}`
    pub fn btran(&self, w: &mut [f64]) {
        for eta in self.etas.iter().rev() {
            let mut s = w[eta.row];
            for &(i, a) in &eta.entries {
                s -= a * w[i];
            }
            w[eta.row] = s / eta.pivot;
        }
        for x in w.iter_mut() {
            *x = -*x;
        }
    }

    /// Records a pivot on `row` with the transformed entering column `alpha`.
    pub fn push(&mut self, row: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != row && a.abs() > DROP_TOL)
            .map(|(i, &a)| (i, a))
            .collect();
        self.etas.push(Eta {
            row,
            pivot: alpha[row],
            entries,
        });
    }
}
