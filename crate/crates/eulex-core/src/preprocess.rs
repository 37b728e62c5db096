//! Instance normalization: vertex splitting and metric closure.
//!
//! Splitting caps every balance at magnitude one by giving overloaded
//! vertices fresh copies; the closure replaces the weight function by
//! shortest path weights over the complete digraph. Both keep the optimal
//! extension weight, the number of components and the total imbalance, and
//! both are reversible on witnesses: a solution of the normalized instance
//! lifts to one of the original instance with equal weight.

use crate::graph::{EeInstance, Multigraph, WeightMatrix};
use crate::weight::{is_finite, wadd, Weight, INF};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Records which original vertex each split vertex stands for.
#[derive(Debug, Clone)]
pub struct SplitInfo {
    /// `orig_of[v]` is the original vertex behind `v`; identity on originals.
    pub orig_of: Vec<usize>,
}

/// Shortest path predecessors of the metric closure, one row per source.
#[derive(Debug, Clone)]
pub struct ClosureInfo {
    pred: Vec<Vec<usize>>,
}

impl ClosureInfo {
    /// The closure witness for `(u, v)` as a vertex path `u, .., v` through
    /// the pre-closure weights. Requires a finite closed weight.
    pub fn expand(&self, u: usize, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut at = v;
        while at != u {
            at = self.pred[u][at];
            path.push(at);
        }
        path.reverse();
        path
    }
}

/// Everything needed to lift a normalized solution back to the input.
#[derive(Debug, Clone)]
pub struct PreprocessInfo {
    pub split: SplitInfo,
    pub closure: ClosureInfo,
}

/// Splits vertices until every balance has magnitude at most one.
///
/// The lowest overloaded vertex `v` is split first: a fresh copy takes over
/// the lexicographically smallest excess arc, the copy and `v` are tied
/// together by the arc pair `(u, v), (v, u)`, and the copy inherits `v`'s
/// weight rows while staying infinitely far from `v` itself.
pub fn split_vertices(inst: &EeInstance) -> (EeInstance, SplitInfo) {
    let mut graph = inst.graph.clone();
    let mut weights = inst.weights.clone();
    let mut orig_of: Vec<usize> = (0..graph.n()).collect();

    loop {
        let bal = graph.balances();
        let Some(v) = (0..graph.n()).find(|&v| bal[v].abs() > 1) else { break };

        let n = graph.n();
        let u = n;
        let mut arcs = graph.arcs().to_vec();
        if bal[v] > 0 {
            // Too many incoming arcs: move the smallest one over to the copy.
            let idx = arcs
                .iter()
                .enumerate()
                .filter(|&(_, &(_, t))| t == v)
                .min_by_key(|&(_, &(s, _))| s)
                .map(|(i, _)| i)
                .expect("positive balance implies an incoming arc");
            arcs[idx].1 = u;
        } else {
            let idx = arcs
                .iter()
                .enumerate()
                .filter(|&(_, &(s, _))| s == v)
                .min_by_key(|&(_, &(_, t))| t)
                .map(|(i, _)| i)
                .expect("negative balance implies an outgoing arc");
            arcs[idx].0 = u;
        }
        arcs.push((u, v));
        arcs.push((v, u));
        graph = Multigraph::with_arcs(n + 1, arcs).expect("split keeps arcs legal");

        let mut w = weights.grown(n + 1);
        for y in 0..n {
            if y != v {
                w.set(u, y, weights.get(v, y));
                w.set(y, u, weights.get(y, v));
            }
        }
        w.set(u, v, INF);
        w.set(v, u, INF);
        weights = w;
        orig_of.push(orig_of[v]);
    }

    let inst = EeInstance { graph, weights, omega_max: inst.omega_max };
    (inst, SplitInfo { orig_of })
}

fn dijkstra_row(weights: &WeightMatrix, src: usize) -> (Vec<Weight>, Vec<usize>) {
    let n = weights.n();
    let mut dist = vec![INF; n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0;
    heap.push(Reverse((0, src)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        for y in 0..n {
            let step = weights.get(x, y);
            if !is_finite(step) {
                continue;
            }
            let cand = wadd(d, step);
            if cand < dist[y] {
                dist[y] = cand;
                pred[y] = x;
                heap.push(Reverse((cand, y)));
            }
        }
    }
    (dist, pred)
}

/// Replaces every off-diagonal weight by the shortest path weight in the
/// complete digraph. Idempotent; the result satisfies the triangle
/// inequality. Witness paths for every finite pair are kept for lifting.
pub fn metric_closure(inst: &EeInstance) -> (EeInstance, ClosureInfo) {
    let n = inst.n();
    let rows = closure_rows(&inst.weights, n);

    let mut weights = WeightMatrix::new_inf(n);
    let mut pred = Vec::with_capacity(n);
    for (src, (dist, p)) in rows.into_iter().enumerate() {
        for (t, &d) in dist.iter().enumerate() {
            if t != src {
                weights.set(src, t, d);
            }
        }
        pred.push(p);
    }

    let inst = EeInstance {
        graph: inst.graph.clone(),
        weights,
        omega_max: inst.omega_max,
    };
    (inst, ClosureInfo { pred })
}

#[cfg(feature = "parallel")]
fn closure_rows(weights: &WeightMatrix, n: usize) -> Vec<(Vec<Weight>, Vec<usize>)> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(|src| dijkstra_row(weights, src)).collect()
}

#[cfg(not(feature = "parallel"))]
fn closure_rows(weights: &WeightMatrix, n: usize) -> Vec<(Vec<Weight>, Vec<usize>)> {
    (0..n).map(|src| dijkstra_row(weights, src)).collect()
}

/// Splits, then closes. The composed transform is what every solver assumes:
/// all balances in `{-1, 0, +1}` and a metric weight function.
pub fn preprocess(inst: &EeInstance) -> (EeInstance, PreprocessInfo) {
    let (split_inst, split) = split_vertices(inst);
    let (closed, closure) = metric_closure(&split_inst);
    (closed, PreprocessInfo { split, closure })
}

/// Lifts an extension of the preprocessed instance back to the original:
/// closure arcs expand into their witness paths, then split copies collapse
/// onto the vertices they stand for.
pub fn lift_extension(info: &PreprocessInfo, ext: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut lifted = Vec::new();
    for &(u, v) in ext {
        let path = info.closure.expand(u, v);
        for pair in path.windows(2) {
            let a = info.split.orig_of[pair[0]];
            let b = info.split.orig_of[pair[1]];
            debug_assert_ne!(a, b, "witness arcs never join copies of one vertex");
            lifted.push((a, b));
        }
    }
    lifted
}
