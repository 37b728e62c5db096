//! Eulerian extension solvers and the exhaustive reference oracle.
//!
//! `solve_ee` normalizes the instance, enumerates minimal connecting advices
//! over the component graph and realizes each advice hint by hint: cycle
//! hints through the component duplication probe, path hints through a
//! branch over imbalanced endpoint pairs and a masked shortest path. The
//! connected remainder is a minimum weight assignment of surplus onto
//! deficit vertices. `oracle_ee` searches the raw arc addition space
//! exhaustively and is the ground truth every other route is tested against.

use crate::advice::{
    eliminate_cycle_hints, enumerate_min_connecting_advices, minpath, Advice, Hint,
};
use crate::graph::{EeInstance, Multigraph, WeightMatrix};
use crate::matching::min_weight_perfect_matching;
use crate::preprocess::{lift_extension, preprocess};
use crate::weight::{is_finite, wadd, Weight};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

/// Ways an extension can fail verification.
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("arc ({0}, {1}) has an endpoint out of range")]
    ArcOutOfRange(usize, usize),
    #[error("self loop on vertex {0}")]
    SelfLoop(usize),
    #[error("arc ({0}, {1}) is forbidden")]
    ForbiddenArc(usize, usize),
    #[error("extended graph is not balanced")]
    NotBalanced,
    #[error("extended graph is not connected")]
    NotConnected,
}

/// Checks that the extension is legal and makes the graph Eulerian; returns
/// its total weight. The budget is deliberately not enforced here.
pub fn verify_extension(inst: &EeInstance, ext: &[(usize, usize)]) -> Result<Weight, VerifyError> {
    let n = inst.n();
    let mut total: Weight = 0;
    for &(u, v) in ext {
        if u >= n || v >= n {
            return Err(VerifyError::ArcOutOfRange(u, v));
        }
        if u == v {
            return Err(VerifyError::SelfLoop(u));
        }
        let w = inst.weights.get(u, v);
        if !is_finite(w) {
            return Err(VerifyError::ForbiddenArc(u, v));
        }
        total = wadd(total, w);
    }
    let g = inst.graph_with(ext);
    if !g.is_balanced() {
        return Err(VerifyError::NotBalanced);
    }
    if !g.is_connected() {
        return Err(VerifyError::NotConnected);
    }
    Ok(total)
}

/// Search effort counters, aggregated over one `solve_ee` call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    /// Minimal connecting advices tried.
    pub advices: usize,
    /// Branch nodes of the hint realization search.
    pub nodes: usize,
    /// Endpoint pairs branched over, summed over all nodes.
    pub branches: usize,
    /// Largest number of endpoint pairs at any single node.
    pub max_branches_per_node: usize,
    /// Masked shortest path computations.
    pub minpath_calls: usize,
}

impl SolveStats {
    fn absorb(&mut self, other: &SolveStats) {
        self.advices += other.advices;
        self.nodes += other.nodes;
        self.branches += other.branches;
        self.max_branches_per_node = self.max_branches_per_node.max(other.max_branches_per_node);
        self.minpath_calls += other.minpath_calls;
    }
}

/// Result of a solver run: the unconstrained optimum, if any extension of
/// finite weight exists, plus effort counters. Budget admission is a plain
/// comparison against `omega_max` at the call site.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub optimum: Option<(Weight, Vec<(usize, usize)>)>,
    pub stats: SolveStats,
}

/// Minimum weight balancing of a connected instance with all balances in
/// `{-1, 0, +1}` and metric weights: a minimum weight assignment of surplus
/// onto deficit vertices by direct arcs.
pub fn solve_connected(inst: &EeInstance) -> Option<(Weight, Vec<(usize, usize)>)> {
    debug_assert!(inst.graph.is_connected());
    connected_repair(&inst.graph, &inst.weights)
}

fn connected_repair(
    graph: &Multigraph,
    weights: &WeightMatrix,
) -> Option<(Weight, Vec<(usize, usize)>)> {
    let bal = graph.balances();
    debug_assert!(bal.iter().all(|b| b.abs() <= 1), "repair assumes unit balances");
    let pos: Vec<usize> = (0..graph.n()).filter(|&v| bal[v] > 0).collect();
    let neg: Vec<usize> = (0..graph.n()).filter(|&v| bal[v] < 0).collect();
    debug_assert_eq!(pos.len(), neg.len());
    let cost: Vec<Vec<Weight>> =
        pos.iter().map(|&u| neg.iter().map(|&v| weights.get(u, v)).collect()).collect();
    let (w, m) = min_weight_perfect_matching(&cost)?;
    let ext: Vec<(usize, usize)> = pos.iter().zip(&m).map(|(&u, &j)| (u, neg[j])).collect();
    Some((w, ext))
}

/// Realizes the path hints of one advice by branching over imbalanced
/// endpoint pairs in the hint's end components. The component frame stays
/// fixed while balances are always read from the current graph.
fn realize_path_hints(
    graph: &Multigraph,
    weights: &WeightMatrix,
    comp_of: &[usize],
    hints: &[Hint],
    stats: &mut SolveStats,
) -> Option<(Weight, Vec<(usize, usize)>)> {
    let Some((hint, rest)) = hints.split_first() else {
        debug_assert!(graph.is_connected(), "a realized advice connects the graph");
        return connected_repair(graph, weights);
    };
    stats.nodes += 1;
    let bal = graph.balances();
    let (ca, cw) = hint.endpoint_comps();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for u in 0..graph.n() {
        if bal[u] <= 0 {
            continue;
        }
        for v in 0..graph.n() {
            if bal[v] >= 0 {
                continue;
            }
            let fits = (comp_of[u] == ca && comp_of[v] == cw)
                || (comp_of[u] == cw && comp_of[v] == ca);
            if fits {
                pairs.push((u, v));
            }
        }
    }
    stats.branches += pairs.len();
    stats.max_branches_per_node = stats.max_branches_per_node.max(pairs.len());

    let mut best: Option<(Weight, Vec<(usize, usize)>)> = None;
    for (u, v) in pairs {
        stats.minpath_calls += 1;
        let Some((w, path)) = minpath(weights, comp_of, hint.comps(), u, v) else {
            continue;
        };
        let mut g2 = graph.clone();
        let mut arcs = Vec::with_capacity(path.len() - 1);
        for pair in path.windows(2) {
            g2.add_arc(pair[0], pair[1]);
            arcs.push((pair[0], pair[1]));
        }
        if let Some((sub_w, mut sub_ext)) = realize_path_hints(&g2, weights, comp_of, rest, stats)
        {
            let total = wadd(w, sub_w);
            if best.as_ref().is_none_or(|b| total < b.0) {
                let mut ext = arcs;
                ext.append(&mut sub_ext);
                best = Some((total, ext));
            }
        }
    }
    best
}

fn solve_one_advice(
    inst: &EeInstance,
    comp_of: &[usize],
    advice: &Advice,
) -> (Option<(Weight, Vec<(usize, usize)>)>, SolveStats) {
    let mut stats = SolveStats { advices: 1, ..SolveStats::default() };
    let Some((g, mut arcs, cycles_w, path_hints)) =
        eliminate_cycle_hints(&inst.graph, &inst.weights, comp_of, advice)
    else {
        return (None, stats);
    };
    match realize_path_hints(&g, &inst.weights, comp_of, &path_hints, &mut stats) {
        Some((w, mut ext)) => {
            arcs.append(&mut ext);
            (Some((wadd(cycles_w, w), arcs)), stats)
        }
        None => (None, stats),
    }
}

/// Solves an already normalized instance (unit balances, metric weights).
/// Returns the optimum in the normalized vertex space.
pub fn solve_ee_preprocessed(inst: &EeInstance) -> SolveReport {
    let comps = inst.graph.components();
    if comps.count == 1 {
        let optimum = connected_repair(&inst.graph, &inst.weights);
        return SolveReport { optimum, stats: SolveStats::default() };
    }
    let advices = enumerate_min_connecting_advices(comps.count);
    let outcomes = solve_advices(inst, &comps.comp_of, &advices);

    let mut stats = SolveStats::default();
    let mut best: Option<(Weight, Vec<(usize, usize)>)> = None;
    for (opt, s) in outcomes {
        stats.absorb(&s);
        if let Some((w, ext)) = opt {
            if best.as_ref().is_none_or(|b| w < b.0) {
                best = Some((w, ext));
            }
        }
    }
    SolveReport { optimum: best, stats }
}

#[cfg(feature = "parallel")]
fn solve_advices(
    inst: &EeInstance,
    comp_of: &[usize],
    advices: &[Advice],
) -> Vec<(Option<(Weight, Vec<(usize, usize)>)>, SolveStats)> {
    use rayon::prelude::*;
    advices.par_iter().map(|a| solve_one_advice(inst, comp_of, a)).collect()
}

#[cfg(not(feature = "parallel"))]
fn solve_advices(
    inst: &EeInstance,
    comp_of: &[usize],
    advices: &[Advice],
) -> Vec<(Option<(Weight, Vec<(usize, usize)>)>, SolveStats)> {
    advices.iter().map(|a| solve_one_advice(inst, comp_of, a)).collect()
}

/// Solves an instance under one fixed connecting advice: normalize, realize
/// exactly that advice, lift the witness back and admit it against the
/// budget. The advice speaks about components of the normalized graph,
/// which carries the same component structure as the input.
pub fn solve_eeca(inst: &EeInstance, advice: &Advice) -> Option<(Weight, Vec<(usize, usize)>)> {
    let (pre, info) = preprocess(inst);
    let comps = pre.graph.components();
    let (opt, _) = solve_one_advice(&pre, &comps.comp_of, advice);
    let (w, ext) = opt?;
    if w > inst.omega_max {
        return None;
    }
    let lifted = lift_extension(&info, &ext);
    debug_assert_eq!(verify_extension(inst, &lifted), Ok(w));
    Some((w, lifted))
}

/// Solves an arbitrary instance: normalize, solve, lift the witness back.
/// The returned optimum ignores the budget; admission is `weight <= omega_max`.
pub fn solve_ee(inst: &EeInstance) -> SolveReport {
    let (pre, info) = preprocess(inst);
    let report = solve_ee_preprocessed(&pre);
    let optimum = report.optimum.map(|(w, ext)| {
        let lifted = lift_extension(&info, &ext);
        debug_assert_eq!(verify_extension(inst, &lifted), Ok(w));
        (w, lifted)
    });
    SolveReport { optimum, stats: report.stats }
}

/// `solve_ee` filtered by the budget: the answer to the decision problem.
pub fn solve_ee_within_budget(inst: &EeInstance) -> Option<(Weight, Vec<(usize, usize)>)> {
    solve_ee(inst).optimum.filter(|&(w, _)| w <= inst.omega_max)
}

/// Default vertex cap for [`oracle_ee`].
pub const ORACLE_DEFAULT_CAP: usize = 8;

/// Exhaustive reference solver; see [`oracle_ee_with_cap`].
pub fn oracle_ee(inst: &EeInstance) -> Option<(Weight, Vec<(usize, usize)>)> {
    oracle_ee_with_cap(inst, ORACLE_DEFAULT_CAP)
}

/// Uniform cost search over arc additions, tracking only balances and the
/// component partition. Returns a cheapest extension within the budget.
///
/// Soundness of the pruning: any extension can be added trail by trail, and
/// along such an order no intermediate balance ever leaves `[-(b+1), b+1]`,
/// so clipping at `b + 2` never cuts off an optimal solution. The state
/// space is finite, hence the search always terminates.
pub fn oracle_ee_with_cap(inst: &EeInstance, cap: usize) -> Option<(Weight, Vec<(usize, usize)>)> {
    let n = inst.n();
    assert!(n <= cap, "oracle instance with {n} vertices exceeds the cap {cap}");
    let comps = inst.graph.components();
    let b = inst.graph.total_positive_balance() as i64;
    let clip = b + 2;

    type Key = (Vec<i8>, Vec<u8>);
    let start_bal: Vec<i8> = inst.graph.balances().iter().map(|&x| x as i8).collect();
    let start_part: Vec<u8> = canonical_partition(&(0..comps.count).collect::<Vec<_>>());
    let comp_of = comps.comp_of;

    let goal = |key: &Key| key.0.iter().all(|&x| x == 0) && key.1.iter().all(|&x| x == 0);

    let start: Key = (start_bal, start_part);
    if goal(&start) {
        return Some((0, Vec::new()));
    }

    let mut dist: HashMap<Key, Weight> = HashMap::new();
    let mut parent: HashMap<Key, (Key, (usize, usize))> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(Weight, u64, Key)>> = BinaryHeap::new();
    let mut stamp = 0u64;
    dist.insert(start.clone(), 0);
    heap.push(Reverse((0, stamp, start)));

    let mut popped = 0usize;
    while let Some(Reverse((g, _, key))) = heap.pop() {
        if dist.get(&key) != Some(&g) {
            continue;
        }
        popped += 1;
        assert!(popped < 20_000_000, "oracle state space blowup");
        if goal(&key) {
            // Rebuild the witness from the parent chain.
            let mut arcs = Vec::new();
            let mut at = key;
            while let Some((prev, arc)) = parent.get(&at) {
                arcs.push(*arc);
                at = prev.clone();
            }
            arcs.reverse();
            return Some((g, arcs));
        }
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let w = inst.weights.get(u, v);
                if !is_finite(w) {
                    continue;
                }
                let ng = wadd(g, w);
                if ng > inst.omega_max {
                    continue;
                }
                let mut bal = key.0.clone();
                bal[u] -= 1;
                bal[v] += 1;
                if (bal[u] as i64).abs() > clip || (bal[v] as i64).abs() > clip {
                    continue;
                }
                let part = merge_partition(&key.1, comp_of[u], comp_of[v]);
                let nk: Key = (bal, part);
                if dist.get(&nk).is_none_or(|&old| ng < old) {
                    dist.insert(nk.clone(), ng);
                    stamp += 1;
                    parent.insert(nk.clone(), (key.clone(), (u, v)));
                    heap.push(Reverse((ng, stamp, nk)));
                }
            }
        }
    }
    None
}

/// Relabels a block assignment into first occurrence order.
fn canonical_partition(blocks: &[usize]) -> Vec<u8> {
    let mut label: HashMap<usize, u8> = HashMap::new();
    let mut out = Vec::with_capacity(blocks.len());
    for &b in blocks {
        let next = label.len() as u8;
        out.push(*label.entry(b).or_insert(next));
    }
    out
}

fn merge_partition(part: &[u8], ca: usize, cb: usize) -> Vec<u8> {
    let (a, b) = (part[ca], part[cb]);
    if a == b {
        return part.to_vec();
    }
    let merged: Vec<usize> =
        part.iter().map(|&x| if x == a || x == b { a.min(b) as usize } else { x as usize }).collect();
    canonical_partition(&merged)
}
