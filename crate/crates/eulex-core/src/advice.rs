//! Hints, advices and their realization machinery.
//!
//! A hint prescribes the component trace of one trail of an extension: a
//! sequence of component identifiers together with the information whether
//! the trail is a path (imbalanced endpoints) or a cycle. Open sequences
//! visit pairwise distinct components; closed sequences return to their
//! initial component and may be as short as `X, Y, X`, the trace of a trail
//! that dips into a balanced component and comes back. An advice is a set of
//! hints over pairwise disjoint component edges that connects the component
//! graph; solvers enumerate the minimal connecting advices and realize each
//! hint by a cheapest trail with exactly the prescribed trace.

use crate::graph::{Multigraph, UnionFind, WeightMatrix};
use crate::weight::{is_finite, wadd, Weight, INF};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

/// Whether a hint's realization is a path or a cycle in the extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HintKind {
    Path,
    Cycle,
}

/// A component trace with a realization kind.
///
/// The trace is undirected: a hint and its reversal describe the same trails.
/// Closed path hints keep their initial component, because that is where both
/// imbalanced endpoints of a realization live; closed cycle hints are
/// rotation free.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Hint {
    comps: Vec<usize>,
    kind: HintKind,
}

impl Hint {
    /// Validates and canonicalizes a hint.
    ///
    /// Open traces must be simple paths of length at least one; closed traces
    /// repeat exactly their initial component and need at least two edges.
    /// Cycle kind requires a closed trace.
    pub fn new(comps: Vec<usize>, kind: HintKind) -> Result<Self, &'static str> {
        if comps.len() < 2 {
            return Err("a hint needs at least one component edge");
        }
        let closed = comps[0] == comps[comps.len() - 1];
        let inner = if closed { &comps[..comps.len() - 1] } else { &comps[..] };
        let distinct: BTreeSet<_> = inner.iter().collect();
        if distinct.len() != inner.len() {
            return Err("a hint may repeat only its initial component, and only at the end");
        }
        if closed && comps.len() < 3 {
            return Err("a closed hint needs at least two edges");
        }
        if kind == HintKind::Cycle && !closed {
            return Err("a cycle hint must have a closed trace");
        }
        let mut hint = Hint { comps, kind };
        hint.canonicalize();
        Ok(hint)
    }

    fn canonicalize(&mut self) {
        if !self.is_closed() {
            let rev: Vec<usize> = self.comps.iter().rev().copied().collect();
            if rev < self.comps {
                self.comps = rev;
            }
            return;
        }
        match self.kind {
            HintKind::Path => {
                // Keep the initial component, normalize the direction.
                let rev: Vec<usize> = self.comps.iter().rev().copied().collect();
                if rev < self.comps {
                    self.comps = rev;
                }
            }
            HintKind::Cycle => {
                // Rotation and direction free: pick the least closed form.
                let ring = &self.comps[..self.comps.len() - 1];
                let mut best: Option<Vec<usize>> = None;
                for dir in [false, true] {
                    let base: Vec<usize> = if dir {
                        ring.iter().rev().copied().collect()
                    } else {
                        ring.to_vec()
                    };
                    for r in 0..base.len() {
                        let mut cand: Vec<usize> =
                            base[r..].iter().chain(base[..r].iter()).copied().collect();
                        cand.push(cand[0]);
                        if best.as_ref().is_none_or(|b| cand < *b) {
                            best = Some(cand);
                        }
                    }
                }
                self.comps = best.unwrap();
            }
        }
    }

    /// The component trace, closed traces ending on their initial component.
    pub fn comps(&self) -> &[usize] {
        &self.comps
    }

    pub fn kind(&self) -> HintKind {
        self.kind
    }

    pub fn is_closed(&self) -> bool {
        self.comps[0] == self.comps[self.comps.len() - 1]
    }

    /// Number of component edges traversed.
    pub fn len_edges(&self) -> usize {
        self.comps.len() - 1
    }

    /// Components holding the endpoints of a realization. Coincide for
    /// closed hints.
    pub fn endpoint_comps(&self) -> (usize, usize) {
        (self.comps[0], self.comps[self.comps.len() - 1])
    }

    /// The set of undirected component edges the hint occupies.
    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.comps
            .windows(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect()
    }

    /// All components the hint touches.
    pub fn comp_set(&self) -> BTreeSet<usize> {
        self.comps.iter().copied().collect()
    }
}

/// An advice: hints over pairwise disjoint component edges. Kept sorted.
pub type Advice = Vec<Hint>;

/// True if the hints together connect all `c` components.
pub fn is_connecting(advice: &[Hint], c: usize) -> bool {
    let mut uf = UnionFind::new(c);
    for h in advice {
        for pair in h.comps().windows(2) {
            uf.union(pair[0], pair[1]);
        }
    }
    uf.blocks() == 1
}

/// True if the advice is connecting and no proper subset is.
pub fn is_minimal_connecting(advice: &[Hint], c: usize) -> bool {
    if !is_connecting(advice, c) {
        return false;
    }
    (0..advice.len()).all(|skip| {
        let rest: Vec<Hint> = advice
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, h)| h.clone())
            .collect();
        !is_connecting(&rest, c)
    })
}

/// Every minimal connecting advice over `c` components, canonically sorted
/// and free of duplicates. The hint universe contains open simple paths,
/// closed traces of length at least two in both kinds, and for closed path
/// hints every choice of initial component. Exponential in `c`.
pub fn enumerate_min_connecting_advices(c: usize) -> Vec<Advice> {
    assert!(c >= 2, "advice enumeration needs at least two components");
    let universe = hint_universe(c);
    let mut out = Vec::new();
    let mut stack: Vec<Hint> = Vec::new();
    let mut used_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    fn go(
        universe: &[Hint],
        from: usize,
        c: usize,
        stack: &mut Vec<Hint>,
        used: &mut BTreeSet<(usize, usize)>,
        out: &mut Vec<Advice>,
    ) {
        if is_connecting(stack, c) {
            if is_minimal_connecting(stack, c) {
                out.push(stack.clone());
            }
            // Supersets of a connecting advice are never minimal.
            return;
        }
        if stack.len() == c {
            return;
        }
        for i in from..universe.len() {
            let edges = universe[i].edge_set();
            if edges.iter().any(|e| used.contains(e)) {
                continue;
            }
            for e in &edges {
                used.insert(*e);
            }
            stack.push(universe[i].clone());
            go(universe, i + 1, c, stack, used, out);
            stack.pop();
            for e in &edges {
                used.remove(e);
            }
        }
    }
    go(&universe, 0, c, &mut stack, &mut used_edges, &mut out);
    out.sort();
    out
}

/// All canonical hints over `c` components.
fn hint_universe(c: usize) -> Vec<Hint> {
    let mut out = Vec::new();
    // Open simple paths, generated once per direction class.
    let mut seq: Vec<usize> = Vec::new();
    fn open_paths(c: usize, seq: &mut Vec<usize>, out: &mut Vec<Hint>) {
        if seq.len() >= 2 && seq[0] < seq[seq.len() - 1] {
            out.push(Hint::new(seq.clone(), HintKind::Path).unwrap());
        }
        if seq.len() == c {
            return;
        }
        for next in 0..c {
            if !seq.contains(&next) {
                seq.push(next);
                open_paths(c, seq, out);
                seq.pop();
            }
        }
    }
    for start in 0..c {
        seq.push(start);
        open_paths(c, &mut seq, &mut out);
        seq.pop();
    }
    // Closed traces: rings of two or more distinct components.
    fn rings(c: usize, ring: &mut Vec<usize>, out: &mut Vec<Hint>) {
        if ring.len() >= 2 {
            // Path kind: every rotation is its own hint, direction canonical.
            let mut closed = ring.clone();
            closed.push(ring[0]);
            if let Ok(h) = Hint::new(closed.clone(), HintKind::Path) {
                if h.comps() == closed.as_slice() {
                    out.push(h);
                }
            }
            // Cycle kind: rotation free, generate only the canonical form.
            let h = Hint::new(closed.clone(), HintKind::Cycle).unwrap();
            if h.comps() == closed.as_slice() {
                out.push(h);
            }
        }
        if ring.len() == c {
            return;
        }
        for next in 0..c {
            if !ring.contains(&next) {
                ring.push(next);
                rings(c, ring, out);
                ring.pop();
            }
        }
    }
    let mut ring: Vec<usize> = Vec::new();
    for start in 0..c {
        ring.push(start);
        rings(c, &mut ring, &mut out);
        ring.pop();
    }
    out.sort();
    out.dedup();
    out
}

/// A cheapest trail from `u` to `v` whose component trace equals the given
/// sequence, under a metric weight function. Returns the weight and the
/// vertex path. `None` if the endpoints do not fit the trace or no finite
/// trail exists.
///
/// Only arcs between consecutive trace components are admissible, so every
/// admissible walk follows the trace; ties fall to fewer arcs, which pins the
/// witness to the exact trace even when the trace repeats components.
pub fn minpath(
    weights: &WeightMatrix,
    comp_of: &[usize],
    trace: &[usize],
    u: usize,
    v: usize,
) -> Option<(Weight, Vec<usize>)> {
    debug_assert_ne!(u, v);
    let mut best: Option<(Weight, Vec<usize>)> = None;
    let rev: Vec<usize> = trace.iter().rev().copied().collect();
    let mut oriented: Vec<&[usize]> = Vec::new();
    if comp_of[u] == trace[0] && comp_of[v] == trace[trace.len() - 1] {
        oriented.push(trace);
    }
    if rev != trace && comp_of[u] == rev[0] && comp_of[v] == rev[rev.len() - 1] {
        oriented.push(&rev);
    }
    for dir in oriented {
        if let Some(found) = masked_shortest_path(weights, comp_of, dir, u, v) {
            if best.as_ref().is_none_or(|b| (found.0, found.1.len()) < (b.0, b.1.len())) {
                best = Some(found);
            }
        }
    }
    best
}

fn masked_shortest_path(
    weights: &WeightMatrix,
    comp_of: &[usize],
    trace: &[usize],
    u: usize,
    v: usize,
) -> Option<(Weight, Vec<usize>)> {
    let n = comp_of.len();
    let pairs: BTreeSet<(usize, usize)> = trace.windows(2).map(|p| (p[0], p[1])).collect();
    // Lexicographic (weight, arc count) labels keep witnesses canonical.
    let mut dist: Vec<(Weight, u32)> = vec![(INF, u32::MAX); n];
    let mut pred = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[u] = (0, 0);
    heap.push(Reverse((0, 0u32, u)));
    while let Some(Reverse((d, hops, x))) = heap.pop() {
        if done[x] {
            continue;
        }
        done[x] = true;
        if x == v {
            break;
        }
        for y in 0..n {
            if done[y] || !pairs.contains(&(comp_of[x], comp_of[y])) {
                continue;
            }
            // The start vertex is never an intermediate stop.
            if y == u {
                continue;
            }
            let step = weights.get(x, y);
            if !is_finite(step) {
                continue;
            }
            let cand = (wadd(d, step), hops + 1);
            if cand < dist[y] {
                dist[y] = cand;
                pred[y] = x;
                heap.push(Reverse((cand.0, cand.1, y)));
            }
        }
    }
    if !is_finite(dist[v].0) {
        return None;
    }
    let mut path = vec![v];
    let mut at = v;
    while at != u {
        at = pred[at];
        path.push(at);
    }
    path.reverse();
    Some((dist[v].0, path))
}

/// A cheapest closed trail realizing a cycle hint, under a metric weight
/// function and a fixed component frame.
///
/// One visited component is duplicated, the hint is cut open between the
/// original and the copy, and a cheapest cut trail is probed from every
/// vertex of that component in both directions. `None` if no finite
/// realization exists.
pub fn determine_cycle(
    weights: &WeightMatrix,
    comp_of: &[usize],
    hint: &Hint,
) -> Option<(Weight, Vec<usize>)> {
    assert_eq!(hint.kind(), HintKind::Cycle);
    let n = comp_of.len();
    let k = hint.comps()[0];
    let members: Vec<usize> = (0..n).filter(|&x| comp_of[x] == k).collect();
    let fresh = comp_of.iter().max().copied().unwrap_or(0) + 1;

    // Extended frame: copies of the cut component live in a fresh component
    // and inherit their original's weights in both directions.
    let big_n = n + members.len();
    let mut w2 = weights.grown(big_n);
    let mut comp2 = comp_of.to_vec();
    for (idx, &v) in members.iter().enumerate() {
        let v2 = n + idx;
        comp2.push(fresh);
        for x in 0..n {
            if x != v {
                w2.set(v2, x, weights.get(v, x));
                w2.set(x, v2, weights.get(x, v));
            }
        }
    }

    let mut cut = hint.comps().to_vec();
    *cut.last_mut().unwrap() = fresh;

    let mut best: Option<(Weight, Vec<usize>)> = None;
    for (idx, &v) in members.iter().enumerate() {
        let v2 = n + idx;
        for (a, b) in [(v, v2), (v2, v)] {
            if let Some((w, path)) = minpath(&w2, &comp2, &cut, a, b) {
                let trail: Vec<usize> =
                    path.iter().map(|&x| if x >= n { members[x - n] } else { x }).collect();
                debug_assert_eq!(trail[0], trail[trail.len() - 1]);
                if best.as_ref().is_none_or(|bst| w < bst.0) {
                    best = Some((w, trail));
                }
            }
        }
    }
    best
}

/// Realizes and removes every cycle hint of an advice.
///
/// Returns the graph with the realizations added, the realized arcs, their
/// total weight and the remaining path hints. `None` if some cycle hint has
/// no finite realization, which settles the advice as infeasible.
pub fn eliminate_cycle_hints(
    graph: &Multigraph,
    weights: &WeightMatrix,
    comp_of: &[usize],
    advice: &[Hint],
) -> Option<(Multigraph, Vec<(usize, usize)>, Weight, Vec<Hint>)> {
    let mut g = graph.clone();
    let mut arcs = Vec::new();
    let mut total: Weight = 0;
    let mut paths = Vec::new();
    for h in advice {
        match h.kind() {
            HintKind::Path => paths.push(h.clone()),
            HintKind::Cycle => {
                let (w, trail) = determine_cycle(weights, comp_of, h)?;
                for pair in trail.windows(2) {
                    g.add_arc(pair[0], pair[1]);
                    arcs.push((pair[0], pair[1]));
                }
                total = wadd(total, w);
            }
        }
    }
    Some((g, arcs, total, paths))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(comps: &[usize]) -> Hint {
        Hint::new(comps.to_vec(), HintKind::Path).unwrap()
    }

    fn cycle(comps: &[usize]) -> Hint {
        Hint::new(comps.to_vec(), HintKind::Cycle).unwrap()
    }

    #[test]
    fn hint_validation() {
        assert!(Hint::new(vec![0], HintKind::Path).is_err());
        assert!(Hint::new(vec![0, 1], HintKind::Path).is_ok());
        assert!(Hint::new(vec![0, 1], HintKind::Cycle).is_err());
        assert!(Hint::new(vec![0, 1, 0], HintKind::Cycle).is_ok());
        assert!(Hint::new(vec![0, 1, 0, 2], HintKind::Path).is_err());
        assert!(Hint::new(vec![0, 1, 2, 1, 0], HintKind::Path).is_err());
    }

    #[test]
    fn hint_canonical_forms() {
        assert_eq!(path(&[2, 1, 0]).comps(), &[0, 1, 2]);
        assert_eq!(path(&[1, 2, 0, 1]).comps(), &[1, 0, 2, 1]);
        assert_eq!(cycle(&[2, 0, 1, 2]).comps(), &[0, 1, 2, 0]);
        assert_eq!(cycle(&[1, 0, 1]).comps(), &[0, 1, 0]);
    }

    #[test]
    fn advice_counts_are_frozen() {
        // Per component count: all minimal connecting advices, and the share
        // that uses no closed trace.
        let two = enumerate_min_connecting_advices(2);
        assert_eq!(two.len(), 4);
        let simple = |a: &Advice| a.iter().all(|h| !h.is_closed());
        assert_eq!(two.iter().filter(|a| simple(a)).count(), 1);

        // All-open advices over three components: each spanning tree of the
        // triangle split into one two-edge path or two one-edge paths.
        let three = enumerate_min_connecting_advices(3);
        assert_eq!(three.len(), 55);
        assert_eq!(three.iter().filter(|a| simple(a)).count(), 6);
    }

    #[test]
    fn advices_are_minimal_and_edge_disjoint() {
        for (c, advices) in [(2usize, enumerate_min_connecting_advices(2)), (3, enumerate_min_connecting_advices(3))] {
            for advice in &advices {
                assert!(is_minimal_connecting(advice, c));
                assert!(advice.len() <= c);
                let mut seen = BTreeSet::new();
                for h in advice {
                    for e in h.edge_set() {
                        assert!(seen.insert(e), "advice reuses a component edge");
                    }
                }
            }
        }
    }

    #[test]
    fn minpath_respects_the_trace() {
        // Components: {0, 1} = comp 0, {2} = comp 1, {3} = comp 2.
        let comp_of = vec![0, 0, 1, 2];
        let w = WeightMatrix::from_fn(4, |u, v| match (u, v) {
            (0, 2) => 1,
            (2, 3) => 1,
            (3, 1) => 1,
            (0, 3) => 1,
            _ => 10,
        });
        // Open trace 0-1-2 from vertex 0 to vertex 3: must pass comp 1.
        let (w012, p) = minpath(&w, &comp_of, &[0, 1, 2], 0, 3).unwrap();
        assert_eq!(w012, 2);
        assert_eq!(p, vec![0, 2, 3]);
        // The direct hop 0 -> 3 is cheaper but skips comp 1, so it only
        // appears for the length one trace.
        let (w02, p) = minpath(&w, &comp_of, &[0, 2], 0, 3).unwrap();
        assert_eq!(w02, 1);
        assert_eq!(p, vec![0, 3]);
        // Closed trace 0-1-0 between the two vertices of comp 0.
        let (wb, p) = minpath(&w, &comp_of, &[0, 1, 0], 0, 1).unwrap();
        assert_eq!(wb, 1 + 10);
        assert_eq!(p, vec![0, 2, 1]);
        // Wrong endpoint component.
        assert!(minpath(&w, &comp_of, &[0, 1], 0, 1).is_none());
    }

    #[test]
    fn minpath_handles_closed_traces_both_ways() {
        let comp_of = vec![0, 0, 1, 2];
        // Going 0 -> comp2 -> comp1 -> 1 is cheap, the mirror direction dear.
        let w = WeightMatrix::from_fn(4, |u, v| match (u, v) {
            (0, 3) => 1,
            (3, 2) => 1,
            (2, 1) => 1,
            _ => 50,
        });
        let (wc, p) = minpath(&w, &comp_of, &[0, 1, 2, 0], 0, 1).unwrap();
        assert_eq!(wc, 3);
        assert_eq!(p, vec![0, 3, 2, 1]);
    }

    #[test]
    fn determine_cycle_finds_the_cheap_loop() {
        // Comp 0 = {0, 1}, comp 1 = {2, 3}; a 2-cycle through vertex 1 and 3
        // is the cheapest closed trail touching both.
        let comp_of = vec![0, 0, 1, 1];
        let w = WeightMatrix::from_fn(4, |u, v| match (u, v) {
            (1, 3) => 2,
            (3, 1) => 3,
            _ => 20,
        });
        let (wc, trail) = determine_cycle(&w, &comp_of, &cycle(&[0, 1, 0])).unwrap();
        assert_eq!(wc, 5);
        assert_eq!(trail, vec![1, 3, 1]);
    }

    #[test]
    fn determine_cycle_reports_infeasibility() {
        let comp_of = vec![0, 1];
        let mut w = WeightMatrix::new_inf(2);
        w.set(0, 1, 4);
        // No way back, so no closed trail exists.
        assert!(determine_cycle(&w, &comp_of, &cycle(&[0, 1, 0])).is_none());
    }
}
