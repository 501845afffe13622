//! Bottleneck distance between extended persistence diagrams under
//! type-respecting partial matchings, with an exhaustive oracle for small
//! instances.

use crate::error::{input_err, Result};
use crate::persistence::{DiagramPoint, ExtendedDiagram, PointType};

/// An explicit partial matching: index pairs (into D, into D'), each index
/// used at most once per side.
#[derive(Debug, Clone, Default)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

fn linf(a: &DiagramPoint, b: &DiagramPoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// Cost of a matching: matched points pay their sup-norm distance, unmatched
/// points pay their diagonal gap; the cost is the maximum over all points.
pub fn matching_cost(d1: &ExtendedDiagram, d2: &ExtendedDiagram, m: &Matching) -> Result<f64> {
    let mut used1 = vec![false; d1.len()];
    let mut used2 = vec![false; d2.len()];
    let mut cost = 0.0f64;
    for &(i, j) in &m.pairs {
        if i >= d1.len() || j >= d2.len() {
            return input_err(format!("matched pair ({i},{j}) out of range"));
        }
        if used1[i] || used2[j] {
            return input_err(format!("index reused in matching at ({i},{j})"));
        }
        used1[i] = true;
        used2[j] = true;
        let (p, q) = (&d1.points[i], &d2.points[j]);
        if p.ptype != q.ptype {
            return input_err(format!(
                "matched points of different types {} and {}",
                p.ptype, q.ptype
            ));
        }
        cost = cost.max(linf(p, q));
    }
    for (i, p) in d1.points.iter().enumerate() {
        if !used1[i] {
            cost = cost.max(p.diagonal_gap());
        }
    }
    for (j, q) in d2.points.iter().enumerate() {
        if !used2[j] {
            cost = cost.max(q.diagonal_gap());
        }
    }
    Ok(cost)
}

fn class_points(d: &ExtendedDiagram, t: PointType) -> Vec<DiagramPoint> {
    d.of_type(t).cloned().collect()
}

/// Whether a partial matching of cost at most `t` exists for one type class.
///
/// Encoded as perfect matching in the usual augmented bipartite graph:
/// each point may pair with an opposite point within `t` or with its own
/// diagonal projection when its gap is within `t`; dummy projections pair
/// freely with each other.
fn feasible(p: &[DiagramPoint], q: &[DiagramPoint], t: f64) -> bool {
    let (np, nq) = (p.len(), q.len());
    let left = np + nq;
    let right = nq + np;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); left];
    for (i, pi) in p.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            if linf(pi, qj) <= t {
                adj[i].push(j);
            }
        }
        if pi.diagonal_gap() <= t {
            adj[i].push(nq + i);
        }
    }
    for (j, qj) in q.iter().enumerate() {
        if qj.diagonal_gap() <= t {
            adj[np + j].push(j);
        }
        for i in 0..np {
            adj[np + j].push(nq + i);
        }
    }
    let mut match_right: Vec<Option<usize>> = vec![None; right];
    let mut matched = 0usize;
    for u in 0..left {
        let mut seen = vec![false; right];
        if augment(u, &adj, &mut seen, &mut match_right) {
            matched += 1;
        } else {
            return false;
        }
    }
    matched == left
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    seen: &mut [bool],
    match_right: &mut [Option<usize>],
) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if match_right[v].is_none() || augment(match_right[v].unwrap(), adj, seen, match_right) {
            match_right[v] = Some(u);
            return true;
        }
    }
    false
}

fn class_bottleneck(p: &[DiagramPoint], q: &[DiagramPoint]) -> f64 {
    if p.is_empty() && q.is_empty() {
        return 0.0;
    }
    // the optimum is attained at a pairwise distance or a diagonal gap
    let mut candidates = vec![0.0f64];
    candidates.extend(p.iter().map(|x| x.diagonal_gap()));
    candidates.extend(q.iter().map(|x| x.diagonal_gap()));
    for pi in p {
        for qj in q {
            candidates.push(linf(pi, qj));
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut lo = 0usize;
    let mut hi = candidates.len() - 1;
    debug_assert!(feasible(p, q, candidates[hi]));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(p, q, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Exact bottleneck distance. The four type classes are independent, so the
/// distance is the maximum of the per-class optima.
pub fn bottleneck(d1: &ExtendedDiagram, d2: &ExtendedDiagram) -> f64 {
    PointType::ALL
        .iter()
        .map(|&t| class_bottleneck(&class_points(d1, t), &class_points(d2, t)))
        .fold(0.0, f64::max)
}

const ORACLE_CLASS_MAX: usize = 6;

fn class_oracle(p: &[DiagramPoint], q: &[DiagramPoint]) -> f64 {
    fn go(p: &[DiagramPoint], q: &[DiagramPoint], i: usize, used: &mut [bool], acc: f64) -> f64 {
        if i == p.len() {
            let mut cost = acc;
            for (j, qj) in q.iter().enumerate() {
                if !used[j] {
                    cost = cost.max(qj.diagonal_gap());
                }
            }
            return cost;
        }
        // leave p[i] unmatched
        let mut best = go(p, q, i + 1, used, acc.max(p[i].diagonal_gap()));
        for j in 0..q.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(go(p, q, i + 1, used, acc.max(linf(&p[i], &q[j]))));
                used[j] = false;
            }
        }
        best
    }
    let mut used = vec![false; q.len()];
    go(p, q, 0, &mut used, 0.0)
}

/// Exhaustive minimum over all partial matchings; guards each type class to
/// at most 6 points per diagram.
pub fn bottleneck_oracle(d1: &ExtendedDiagram, d2: &ExtendedDiagram) -> Result<f64> {
    let mut worst = 0.0f64;
    for &t in &PointType::ALL {
        let p = class_points(d1, t);
        let q = class_points(d2, t);
        if p.len() > ORACLE_CLASS_MAX || q.len() > ORACLE_CLASS_MAX {
            return input_err(format!(
                "oracle size guard: {} points of type {t} (max {ORACLE_CLASS_MAX})",
                p.len().max(q.len())
            ));
        }
        worst = worst.max(class_oracle(&p, &q));
    }
    Ok(worst)
}
