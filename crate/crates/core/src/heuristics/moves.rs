//! Neighbourhood moves on routes written as leg lists.

use rand::Rng;

use crate::instance::DEPOT;

pub type Legs = Vec<(usize, usize)>;

/// Every exchange of one leg of `a` with one leg of `b`.
pub fn swap_moves(a: &[(usize, usize)], b: &[(usize, usize)]) -> Vec<(Legs, Legs)> {
    let mut out = Vec::new();
    for p in 0..a.len() {
        for q in 0..b.len() {
            if a[p] == b[q] {
                continue;
            }
            let mut na = a.to_vec();
            let mut nb = b.to_vec();
            std::mem::swap(&mut na[p], &mut nb[q]);
            out.push((na, nb));
        }
    }
    out
}

/// Every exchange of two legs inside `a`.
pub fn two_opt_moves(a: &[(usize, usize)]) -> Vec<Legs> {
    let mut out = Vec::new();
    for p in 0..a.len() {
        for q in p + 1..a.len() {
            if a[p] != a[q] {
                let mut na = a.to_vec();
                na.swap(p, q);
                out.push(na);
            }
        }
    }
    out
}

/// Every move of one leg of `a` into some position of `b`. The shortened
/// `a` may be empty.
pub fn relocate_moves(a: &[(usize, usize)], b: &[(usize, usize)]) -> Vec<(Legs, Legs)> {
    let mut out = Vec::new();
    for p in 0..a.len() {
        let mut na = a.to_vec();
        let leg = na.remove(p);
        for q in 0..=b.len() {
            let mut nb = b.to_vec();
            nb.insert(q, leg);
            out.push((na.clone(), nb));
        }
    }
    out
}

/// Two-point crossover on leg boundaries. A segment of at most `max_len`
/// legs is cut from each parent and the segments are traded.
pub fn crossover<R: Rng>(a: &[(usize, usize)], b: &[(usize, usize)], max_len: usize, rng: &mut R) -> (Legs, Legs) {
    let (sa, la) = segment(a.len(), max_len, rng);
    let (sb, lb) = segment(b.len(), max_len, rng);
    let splice = |base: &[(usize, usize)], s: usize, l: usize, ins: &[(usize, usize)]| {
        let mut v = base[..s].to_vec();
        v.extend_from_slice(ins);
        v.extend_from_slice(&base[s + l..]);
        v
    };
    (splice(a, sa, la, &b[sb..sb + lb]), splice(b, sb, lb, &a[sa..sa + la]))
}

fn segment<R: Rng>(len: usize, max_len: usize, rng: &mut R) -> (usize, usize) {
    let start = rng.gen_range(0..=len);
    let l = rng.gen_range(0..=max_len.min(len - start));
    (start, l)
}

/// Node positions in the expanded route `0, o1, d1, ..., 0` map to leg
/// `(p - 1) / 2`, origin when `p` is odd.
fn node_at(legs: &[(usize, usize)], p: usize) -> usize {
    let (o, d) = legs[(p - 1) / 2];
    if p % 2 == 1 {
        o
    } else {
        d
    }
}

fn set_node(legs: &mut [(usize, usize)], p: usize, v: usize) {
    let leg = &mut legs[(p - 1) / 2];
    if p % 2 == 1 {
        leg.0 = v;
    } else {
        leg.1 = v;
    }
}

/// Best-improvement descent over swaps of one node of `a` with a node of
/// `b` in the same role (origin with origin, destination with destination).
/// `score` returns `None` for infeasible routes; swaps that would make a
/// leg start and end at the same node, or touch the depot, are skipped.
/// Stops at a local optimum or after `max_steps` improving steps.
pub fn local_search_pair<F>(a: Legs, b: Legs, max_steps: usize, mut score: F) -> (Legs, Legs)
where
    F: FnMut(&[(usize, usize)]) -> Option<f64>,
{
    let (mut a, mut b) = (a, b);
    let (Some(mut fa), Some(mut fb)) = (score(&a), score(&b)) else {
        return (a, b);
    };
    for _ in 0..max_steps {
        let mut best: Option<(f64, usize, usize, f64, f64)> = None;
        for p in 1..=2 * a.len() {
            for q in 1..=2 * b.len() {
                if p % 2 != q % 2 {
                    continue;
                }
                let (u, v) = (node_at(&a, p), node_at(&b, q));
                if u == v || u == DEPOT || v == DEPOT {
                    continue;
                }
                let mut na = a.clone();
                let mut nb = b.clone();
                set_node(&mut na, p, v);
                set_node(&mut nb, q, u);
                if na[(p - 1) / 2].0 == na[(p - 1) / 2].1 || nb[(q - 1) / 2].0 == nb[(q - 1) / 2].1 {
                    continue;
                }
                let (Some(ga), Some(gb)) = (score(&na), score(&nb)) else { continue };
                let total = ga + gb;
                if total < fa + fb - 1e-9 && best.map_or(true, |bst| total < bst.0) {
                    best = Some((total, p, q, ga, gb));
                }
            }
        }
        let Some((_, p, q, ga, gb)) = best else { break };
        let (u, v) = (node_at(&a, p), node_at(&b, q));
        set_node(&mut a, p, v);
        set_node(&mut b, q, u);
        fa = ga;
        fb = gb;
    }
    (a, b)
}
