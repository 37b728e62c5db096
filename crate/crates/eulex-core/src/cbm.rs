//! Conjoining bipartite matching: perfect matchings that must additionally
//! cross prescribed cell pairs.
//!
//! An instance is a bipartite graph with weighted edges, a partition of the
//! vertices into cells and a set of joins. A perfect matching is conjoining
//! if for every join at least one matching edge crosses the two named cells.
//! This module provides reduction rules for the degree restricted case, a
//! search tree solver on top of them, a general branching solver and an
//! exhaustive oracle.

use crate::matching::min_weight_perfect_matching;
use crate::weight::{is_finite, wadd, Weight, INF, MAX_FINITE};
use std::collections::{BTreeMap, BTreeSet};

/// Bipartite side of a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A conjoining bipartite matching instance.
///
/// Vertices are `0..n` with a side each; edges are undirected, stored with
/// the left endpoint first. Cells partition the vertices; joins are
/// unordered pairs of distinct cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CbmInstance {
    side: Vec<Side>,
    edges: Vec<(usize, usize, Weight)>,
    cell_of: Vec<usize>,
    num_cells: usize,
    joins: Vec<(usize, usize)>,
    pub omega_max: Weight,
}

/// Ways a CBM instance can be malformed.
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum CbmError {
    #[error("edge ({0}, {1}) does not cross the bipartition")]
    EdgeWithinSide(usize, usize),
    #[error("edge ({0}, {1}) is out of range")]
    EdgeOutOfRange(usize, usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {0} has cell {1} out of range")]
    CellOutOfRange(usize, usize),
    #[error("join ({0}, {1}) is not a pair of distinct cells in range")]
    BadJoin(usize, usize),
    #[error("weight exceeds the finite ceiling")]
    WeightTooLarge,
}

impl CbmInstance {
    pub fn new(
        side: Vec<Side>,
        edges: Vec<(usize, usize, Weight)>,
        cell_of: Vec<usize>,
        num_cells: usize,
        joins: Vec<(usize, usize)>,
        omega_max: Weight,
    ) -> Result<Self, CbmError> {
        let n = side.len();
        assert_eq!(cell_of.len(), n, "one cell per vertex");
        let mut normalized = Vec::with_capacity(edges.len());
        let mut seen = BTreeSet::new();
        for &(u, v, w) in &edges {
            if u >= n || v >= n {
                return Err(CbmError::EdgeOutOfRange(u, v));
            }
            if side[u] == side[v] {
                return Err(CbmError::EdgeWithinSide(u, v));
            }
            if w != INF && w > MAX_FINITE {
                return Err(CbmError::WeightTooLarge);
            }
            let (a, b) = if side[u] == Side::Left { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(CbmError::DuplicateEdge(a, b));
            }
            normalized.push((a, b, w));
        }
        normalized.sort_unstable();
        for (v, &c) in cell_of.iter().enumerate() {
            if c >= num_cells {
                return Err(CbmError::CellOutOfRange(v, c));
            }
        }
        let mut njoins = BTreeSet::new();
        for &(i, j) in &joins {
            if i == j || i >= num_cells || j >= num_cells {
                return Err(CbmError::BadJoin(i, j));
            }
            njoins.insert((i.min(j), i.max(j)));
        }
        if omega_max > MAX_FINITE {
            return Err(CbmError::WeightTooLarge);
        }
        Ok(CbmInstance {
            side,
            edges: normalized,
            cell_of,
            num_cells,
            joins: njoins.into_iter().collect(),
            omega_max,
        })
    }

    /// Instance whose answer is no: one vertex per side, no edges.
    pub fn canonical_no() -> Self {
        CbmInstance::new(vec![Side::Left, Side::Right], vec![], vec![0, 0], 1, vec![], 0).unwrap()
    }

    /// Instance whose answer is yes: one zero weight edge, no joins.
    pub fn canonical_yes() -> Self {
        CbmInstance::new(vec![Side::Left, Side::Right], vec![(0, 1, 0)], vec![0, 0], 1, vec![], 0)
            .unwrap()
    }

    pub fn n(&self) -> usize {
        self.side.len()
    }

    pub fn side(&self, v: usize) -> Side {
        self.side[v]
    }

    pub fn sides(&self) -> &[Side] {
        &self.side
    }

    /// Edges with the left endpoint first, sorted.
    pub fn edges(&self) -> &[(usize, usize, Weight)] {
        &self.edges
    }

    pub fn cell_of(&self, v: usize) -> usize {
        self.cell_of[v]
    }

    pub fn cells(&self) -> &[usize] {
        &self.cell_of
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn joins(&self) -> &[(usize, usize)] {
        &self.joins
    }

    pub fn left_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.side[v] == Side::Left).collect()
    }

    pub fn right_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.side[v] == Side::Right).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b, _)| a == v || b == v).count()
    }

    fn weight_of(&self, u: usize, v: usize) -> Option<Weight> {
        let (a, b) = if self.side[u] == Side::Left { (u, v) } else { (v, u) };
        self.edges.iter().find(|&&(x, y, _)| (x, y) == (a, b)).map(|&(_, _, w)| w)
    }

    /// Connected components of the underlying graph, as sorted vertex lists
    /// in order of their smallest member. Isolated vertices form their own
    /// components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = crate::graph::UnionFind::new(self.n());
        for &(u, v, _) in &self.edges {
            uf.union(u, v);
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..self.n() {
            groups.entry(uf.find(v)).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    fn join_satisfied_by(&self, u: usize, v: usize) -> Option<(usize, usize)> {
        let (a, b) = (self.cell_of[u], self.cell_of[v]);
        if a == b {
            return None;
        }
        let key = (a.min(b), a.max(b));
        self.joins.contains(&key).then_some(key)
    }
}

/// Ways a proposed matching can fail verification.
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum MatchingError {
    #[error("pair ({0}, {1}) is not an edge")]
    NotAnEdge(usize, usize),
    #[error("pair ({0}, {1}) has a forbidden weight")]
    ForbiddenEdge(usize, usize),
    #[error("vertex {0} is covered more than once")]
    DoublyCovered(usize),
    #[error("vertex {0} is uncovered")]
    Uncovered(usize),
    #[error("join ({0}, {1}) is unsatisfied")]
    UnsatisfiedJoin(usize, usize),
}

/// Checks that the edge list is a perfect conjoining matching and returns
/// its weight. The budget is not enforced here.
pub fn verify_matching(
    inst: &CbmInstance,
    matching: &[(usize, usize)],
) -> Result<Weight, MatchingError> {
    let mut covered = vec![false; inst.n()];
    let mut total: Weight = 0;
    let mut satisfied = BTreeSet::new();
    for &(u, v) in matching {
        let Some(w) = inst.weight_of(u, v) else {
            return Err(MatchingError::NotAnEdge(u, v));
        };
        if !is_finite(w) {
            return Err(MatchingError::ForbiddenEdge(u, v));
        }
        for x in [u, v] {
            if covered[x] {
                return Err(MatchingError::DoublyCovered(x));
            }
            covered[x] = true;
        }
        total = wadd(total, w);
        if let Some(j) = inst.join_satisfied_by(u, v) {
            satisfied.insert(j);
        }
    }
    if let Some(v) = covered.iter().position(|&c| !c) {
        return Err(MatchingError::Uncovered(v));
    }
    for &j in &inst.joins {
        if !satisfied.contains(&j) {
            return Err(MatchingError::UnsatisfiedJoin(j.0, j.1));
        }
    }
    Ok(total)
}

/// Result of applying a reduction rule: either a smaller equivalent
/// instance together with the weight already committed, or the certainty
/// that the original instance has no solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reduced {
    Instance { inst: CbmInstance, spent: Weight },
    No,
}

/// Removes a set of vertices, compacting ids and dropping incident edges.
/// Cells keep their ids; joins are kept as given.
fn without_vertices(inst: &CbmInstance, gone: &BTreeSet<usize>, joins: Vec<(usize, usize)>) -> CbmInstance {
    let mut rename = vec![usize::MAX; inst.n()];
    let mut side = Vec::new();
    let mut cell_of = Vec::new();
    for v in 0..inst.n() {
        if !gone.contains(&v) {
            rename[v] = side.len();
            side.push(inst.side[v]);
            cell_of.push(inst.cell_of[v]);
        }
    }
    let edges = inst
        .edges
        .iter()
        .filter(|&&(u, v, _)| !gone.contains(&u) && !gone.contains(&v))
        .map(|&(u, v, w)| (rename[u], rename[v], w))
        .collect();
    CbmInstance::new(side, edges, cell_of, inst.num_cells, joins, inst.omega_max).unwrap()
}

/// Degree one rule: a degree one vertex forces its unique edge into every
/// perfect matching. Removes both endpoints, strikes the join the edge
/// satisfies and commits the edge weight. An isolated vertex or an overrun
/// budget certifies a no instance. Applied exhaustively.
pub fn rr_degree_one(inst: &CbmInstance) -> Reduced {
    let mut cur = inst.clone();
    let mut spent: Weight = 0;
    loop {
        if (0..cur.n()).any(|v| cur.degree(v) == 0) {
            return Reduced::No;
        }
        let Some(v) = (0..cur.n()).find(|&v| cur.degree(v) == 1) else {
            return Reduced::Instance { inst: cur, spent };
        };
        let &(a, b, w) = cur
            .edges
            .iter()
            .find(|&&(a, b, _)| a == v || b == v)
            .expect("degree one vertex has an edge");
        if !is_finite(w) {
            return Reduced::No;
        }
        spent = wadd(spent, w);
        if spent > inst.omega_max {
            return Reduced::No;
        }
        let struck = cur.join_satisfied_by(a, b);
        let joins = cur.joins.iter().copied().filter(|&j| Some(j) != struck).collect();
        let mut next = without_vertices(&cur, &BTreeSet::from([a, b]), joins);
        next.omega_max = cur.omega_max - w;
        cur = next;
    }
}

/// Minimum weight perfect matching of an induced vertex set, by global ids.
fn component_min_matching(
    inst: &CbmInstance,
    comp: &[usize],
) -> Option<(Weight, Vec<(usize, usize)>)> {
    let left: Vec<usize> = comp.iter().copied().filter(|&v| inst.side[v] == Side::Left).collect();
    let right: Vec<usize> = comp.iter().copied().filter(|&v| inst.side[v] == Side::Right).collect();
    if left.len() != right.len() {
        return None;
    }
    let cost: Vec<Vec<Weight>> = left
        .iter()
        .map(|&u| right.iter().map(|&v| inst.weight_of(u, v).unwrap_or(INF)).collect())
        .collect();
    let (w, m) = min_weight_perfect_matching(&cost)?;
    Some((w, left.iter().zip(&m).map(|(&u, &j)| (u, right[j])).collect()))
}

/// Cell confinement rule: a connected component wholly inside one cell can
/// never satisfy a join, so it is matched optimally on its own and removed.
/// Applied exhaustively. A component without a finite perfect matching
/// certifies a no instance.
pub fn rr_component_in_cell(inst: &CbmInstance) -> Reduced {
    let mut gone = BTreeSet::new();
    let mut spent: Weight = 0;
    for comp in inst.components() {
        let cell = inst.cell_of[comp[0]];
        if comp.iter().all(|&v| inst.cell_of[v] == cell) {
            let Some((w, _)) = component_min_matching(inst, &comp) else {
                return Reduced::No;
            };
            if !is_finite(w) {
                return Reduced::No;
            }
            spent = wadd(spent, w);
            gone.extend(comp);
        }
    }
    if spent > inst.omega_max {
        return Reduced::No;
    }
    let mut next = without_vertices(inst, &gone, inst.joins.clone());
    next.omega_max = inst.omega_max - spent;
    Reduced::Instance { inst: next, spent }
}

/// The two perfect matchings of an even cycle component, the cheaper one
/// first. Ties break toward the matching holding the lexicographically
/// smallest edge. Returns edges by global ids plus both weights.
fn cycle_matchings(
    inst: &CbmInstance,
    comp: &[usize],
) -> (Vec<(usize, usize)>, Weight, Vec<(usize, usize)>, Weight) {
    // Walk the cycle from its smallest vertex, alternating edges.
    let adj: BTreeMap<usize, Vec<(usize, Weight)>> = comp
        .iter()
        .map(|&v| {
            let mut nb: Vec<(usize, Weight)> = inst
                .edges
                .iter()
                .filter_map(|&(a, b, w)| {
                    if a == v {
                        Some((b, w))
                    } else if b == v {
                        Some((a, w))
                    } else {
                        None
                    }
                })
                .collect();
            nb.sort_unstable();
            (v, nb)
        })
        .collect();
    let start = comp[0];
    let mut order = vec![start];
    let mut prev = start;
    let mut at = adj[&start][0].0;
    while at != start {
        order.push(at);
        let next = adj[&at].iter().map(|&(x, _)| x).find(|&x| x != prev).unwrap();
        prev = at;
        at = next;
    }
    let mut even: (Vec<(usize, usize)>, Weight) = (Vec::new(), 0);
    let mut odd: (Vec<(usize, usize)>, Weight) = (Vec::new(), 0);
    for i in 0..order.len() {
        let (u, v) = (order[i], order[(i + 1) % order.len()]);
        let w = inst.weight_of(u, v).unwrap();
        let slot = if i % 2 == 0 { &mut even } else { &mut odd };
        slot.0.push((u.min(v), u.max(v)));
        slot.1 = wadd(slot.1, w);
    }
    even.0.sort_unstable();
    odd.0.sort_unstable();
    let first_is_cheaper = match even.1.cmp(&odd.1) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => even.0.first() <= odd.0.first(),
    };
    if first_is_cheaper {
        (even.0, even.1, odd.0, odd.1)
    } else {
        (odd.0, odd.1, even.0, even.1)
    }
}

fn joins_satisfied(inst: &CbmInstance, edges: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    edges.iter().filter_map(|&(u, v)| inst.join_satisfied_by(u, v)).collect()
}

/// Signature of a cycle component: the joins its cheaper matching can
/// satisfy and the joins its other matching can satisfy.
pub fn signature(inst: &CbmInstance, comp: &[usize]) -> (BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>) {
    let (m1, _, m2, _) = cycle_matchings(inst, comp);
    (joins_satisfied(inst, &m1), joins_satisfied(inst, &m2))
}

/// Signature rule for disjoint even cycles. Components whose signatures
/// agree up to swapping the two matchings are redundant: if fixing all of
/// them to their cheap matchings covers the class's whole join footprint,
/// they are all removed; otherwise all but the one with the cheapest swap
/// margin are fixed cheap and removed. Applied exhaustively.
///
/// Every vertex must have degree exactly two.
pub fn rr_signature(inst: &CbmInstance) -> Reduced {
    debug_assert!((0..inst.n()).all(|v| inst.degree(v) == 2), "signature rule needs pure cycles");
    let mut cur = inst.clone();
    let mut spent: Weight = 0;
    loop {
        let comps = cur.components();
        let mut classes: BTreeMap<Vec<(usize, usize)>, Vec<usize>> = BTreeMap::new();
        let sigs: Vec<_> = comps.iter().map(|c| signature(&cur, c)).collect();
        for (i, (s1, s2)) in sigs.iter().enumerate() {
            // Swap-invariant class key: the two join sets in sorted order.
            let mut key: Vec<Vec<(usize, usize)>> =
                vec![s1.iter().copied().collect(), s2.iter().copied().collect()];
            key.sort();
            classes.entry(key.concat()).or_default().push(i);
        }
        let Some(class) = classes.into_values().find(|c| c.len() >= 2) else {
            return Reduced::Instance { inst: cur, spent };
        };

        let footprint: BTreeSet<(usize, usize)> =
            sigs[class[0]].0.union(&sigs[class[0]].1).copied().collect();
        let cheap_union: BTreeSet<(usize, usize)> =
            class.iter().flat_map(|&i| sigs[i].0.iter().copied()).collect();
        let details: Vec<_> = class.iter().map(|&i| cycle_matchings(&cur, &comps[i])).collect();

        let (removed, add, struck): (Vec<usize>, Weight, BTreeSet<(usize, usize)>) =
            if footprint.is_subset(&cheap_union) {
                // Cheap matchings of the whole class cover its footprint.
                let add = details.iter().fold(0, |acc, d| wadd(acc, d.1));
                (class.clone(), add, footprint)
            } else {
                // Keep the component with the smallest swap margin.
                let keep = class
                    .iter()
                    .enumerate()
                    .min_by_key(|&(pos, _)| details[pos].3 - details[pos].1)
                    .map(|(pos, _)| pos)
                    .unwrap();
                let add = details
                    .iter()
                    .enumerate()
                    .filter(|&(pos, _)| pos != keep)
                    .fold(0, |acc, (_, d)| wadd(acc, d.1));
                let removed = class
                    .iter()
                    .enumerate()
                    .filter(|&(pos, _)| pos != keep)
                    .map(|(_, &i)| i)
                    .collect();
                (removed, add, sigs[class[0]].0.clone())
            };

        if !is_finite(add) {
            return Reduced::No;
        }
        spent = wadd(spent, add);
        if spent > inst.omega_max {
            return Reduced::No;
        }
        let gone: BTreeSet<usize> = removed.iter().flat_map(|&i| comps[i].iter().copied()).collect();
        let joins = cur.joins.iter().copied().filter(|j| !struck.contains(j)).collect();
        let mut next = without_vertices(&cur, &gone, joins);
        next.omega_max = cur.omega_max - add;
        cur = next;
    }
}

/// Solver for instances where every left vertex has degree at most two:
/// after the degree one rule such a graph is a disjoint union of even
/// cycles if it has a perfect matching at all. Reduces, then searches over
/// which component satisfies each join; unfixed components take their
/// cheap matching.
pub fn solve_cbm_degree2(inst: &CbmInstance) -> Option<Weight> {
    assert!(
        inst.left_vertices().iter().all(|&v| inst.degree(v) <= 2),
        "left side must have maximum degree two"
    );
    if inst.left_vertices().len() != inst.right_vertices().len() {
        return None;
    }
    let reduced = match rr_degree_one(inst) {
        Reduced::No => return None,
        Reduced::Instance { inst, spent } => {
            let mut acc = spent;
            match rr_component_in_cell(&inst) {
                Reduced::No => return None,
                Reduced::Instance { inst, spent } => {
                    acc = wadd(acc, spent);
                    if (0..inst.n()).any(|v| inst.degree(v) != 2) {
                        return None;
                    }
                    match rr_signature(&inst) {
                        Reduced::No => return None,
                        Reduced::Instance { inst, spent } => (inst, wadd(acc, spent)),
                    }
                }
            }
        }
    };
    let (cur, spent) = reduced;
    if cur.n() == 0 {
        // Joins that survived the reductions have nothing left to satisfy them.
        if !cur.joins().is_empty() {
            return None;
        }
        return (spent <= inst.omega_max).then_some(spent);
    }

    let comps = cur.components();
    let details: Vec<_> = comps.iter().map(|c| cycle_matchings(&cur, c)).collect();
    let sats: Vec<(BTreeSet<_>, BTreeSet<_>)> = details
        .iter()
        .map(|(m1, _, m2, _)| (joins_satisfied(&cur, m1), joins_satisfied(&cur, m2)))
        .collect();

    // fixed[i]: None = free (defaults cheap), Some(false) = cheap, Some(true) = other.
    fn search(
        cur: &CbmInstance,
        details: &[(Vec<(usize, usize)>, Weight, Vec<(usize, usize)>, Weight)],
        sats: &[(BTreeSet<(usize, usize)>, BTreeSet<(usize, usize)>)],
        fixed: &mut Vec<Option<bool>>,
    ) -> Option<Weight> {
        let open = cur.joins.iter().find(|&&j| {
            !fixed.iter().enumerate().any(|(i, f)| match f {
                Some(false) => sats[i].0.contains(&j),
                Some(true) => sats[i].1.contains(&j),
                None => false,
            })
        });
        let Some(&join) = open else {
            let total = fixed
                .iter()
                .enumerate()
                .fold(0, |acc, (i, f)| wadd(acc, if *f == Some(true) { details[i].3 } else { details[i].1 }));
            return Some(total);
        };
        let mut best: Option<Weight> = None;
        for i in 0..details.len() {
            if fixed[i].is_some() {
                continue;
            }
            for (flip, side) in [(false, &sats[i].0), (true, &sats[i].1)] {
                if !side.contains(&join) {
                    continue;
                }
                fixed[i] = Some(flip);
                if let Some(w) = search(cur, details, sats, fixed) {
                    if best.is_none_or(|b| w < b) {
                        best = Some(w);
                    }
                }
                fixed[i] = None;
            }
        }
        best
    }

    let mut fixed = vec![None; comps.len()];
    let inner = search(&cur, &details, &sats, &mut fixed)?;
    let total = wadd(spent, inner);
    (is_finite(total) && total <= inst.omega_max).then_some(total)
}

/// General solver: branch over a satisfying edge per join, then complete
/// with a minimum weight perfect matching on the uncovered rest.
pub fn solve_cbm_general(inst: &CbmInstance) -> Option<(Weight, Vec<(usize, usize)>)> {
    fn complete(
        inst: &CbmInstance,
        used: &[bool],
        chosen: &mut Vec<(usize, usize)>,
        joins: &[(usize, usize)],
        best: &mut Option<(Weight, Vec<(usize, usize)>)>,
    ) {
        let satisfied: BTreeSet<(usize, usize)> =
            chosen.iter().filter_map(|&(u, v)| inst.join_satisfied_by(u, v)).collect();
        let Some(&join) = joins.iter().find(|j| !satisfied.contains(j)) else {
            let left: Vec<usize> =
                inst.left_vertices().into_iter().filter(|&v| !used[v]).collect();
            let right: Vec<usize> =
                inst.right_vertices().into_iter().filter(|&v| !used[v]).collect();
            if left.len() != right.len() {
                return;
            }
            let cost: Vec<Vec<Weight>> = left
                .iter()
                .map(|&u| right.iter().map(|&v| inst.weight_of(u, v).unwrap_or(INF)).collect())
                .collect();
            let Some((w, m)) = min_weight_perfect_matching(&cost) else {
                return;
            };
            let fixed: Weight = chosen
                .iter()
                .fold(0, |acc, &(u, v)| wadd(acc, inst.weight_of(u, v).unwrap()));
            let total = wadd(fixed, w);
            if !is_finite(total) {
                return;
            }
            if best.as_ref().is_none_or(|b| total < b.0) {
                let mut matching = chosen.clone();
                matching.extend(left.iter().zip(&m).map(|(&u, &j)| (u, right[j])));
                *best = Some((total, matching));
            }
            return;
        };
        for &(u, v, w) in inst.edges() {
            if used[u] || used[v] || !is_finite(w) {
                continue;
            }
            if inst.join_satisfied_by(u, v) != Some(join) {
                continue;
            }
            let mut used2 = used.to_vec();
            used2[u] = true;
            used2[v] = true;
            chosen.push((u, v));
            complete(inst, &used2, chosen, joins, best);
            chosen.pop();
        }
    }

    let mut best = None;
    complete(inst, &vec![false; inst.n()], &mut Vec::new(), inst.joins(), &mut best);
    best.filter(|&(w, _)| w <= inst.omega_max)
}

/// Exhaustive reference solver: enumerates every perfect matching.
pub fn oracle_cbm(inst: &CbmInstance) -> Option<Weight> {
    assert!(inst.n() <= 16, "oracle instance too large");
    let left = inst.left_vertices();
    let right = inst.right_vertices();
    if left.len() != right.len() {
        return None;
    }
    fn go(
        inst: &CbmInstance,
        left: &[usize],
        right: &[usize],
        taken: &mut Vec<bool>,
        picked: &mut Vec<(usize, usize)>,
        acc: Weight,
        best: &mut Option<Weight>,
    ) {
        if !is_finite(acc) || acc > inst.omega_max {
            return;
        }
        let Some(&u) = left.get(picked.len()) else {
            let satisfied: BTreeSet<_> =
                picked.iter().filter_map(|&(u, v)| inst.join_satisfied_by(u, v)).collect();
            if inst.joins().iter().all(|j| satisfied.contains(j)) && best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        };
        for (j, &v) in right.iter().enumerate() {
            if taken[j] {
                continue;
            }
            let Some(w) = inst.weight_of(u, v) else {
                continue;
            };
            taken[j] = true;
            picked.push((u, v));
            go(inst, left, right, taken, picked, wadd(acc, w), best);
            picked.pop();
            taken[j] = false;
        }
    }
    let mut best = None;
    go(inst, &left, &right, &mut vec![false; right.len()], &mut Vec::new(), 0, &mut best);
    best
}

/// Equalizes cell sides and connects the cell join graph without touching
/// the answer: unbalanced cells get zero weight pendant partners in one
/// fresh padding cell, and every stray block of the cell join graph is tied
/// to cell zero by forced zero weight edges plus a join those edges always
/// satisfy. Unequal bipartition sides or a join naming an empty cell
/// certify a no instance; cells without vertices are dropped.
///
/// Merging cells instead would be unsound: an edge between merged-in
/// vertices and a third cell could satisfy a join it never crossed before.
pub fn legalize(inst: &CbmInstance) -> Reduced {
    if inst.left_vertices().len() != inst.right_vertices().len() {
        return Reduced::No;
    }
    let mut occupied = vec![false; inst.num_cells];
    for v in 0..inst.n() {
        occupied[inst.cell_of[v]] = true;
    }
    if inst.joins.iter().any(|&(i, j)| !occupied[i] || !occupied[j]) {
        return Reduced::No;
    }
    if inst.n() == 0 {
        return Reduced::Instance { inst: inst.clone(), spent: 0 };
    }
    let mut relabel = vec![usize::MAX; inst.num_cells];
    let mut num_cells = 0;
    for c in 0..inst.num_cells {
        if occupied[c] {
            relabel[c] = num_cells;
            num_cells += 1;
        }
    }
    let mut side = inst.side.clone();
    let mut edges = inst.edges.clone();
    let mut cell_of: Vec<usize> = inst.cell_of.iter().map(|&c| relabel[c]).collect();
    let mut joins: Vec<(usize, usize)> =
        inst.joins.iter().map(|&(i, j)| (relabel[i], relabel[j])).collect();

    let mut surplus: Vec<i64> = vec![0; num_cells];
    for v in 0..inst.n() {
        surplus[cell_of[v]] += if side[v] == Side::Left { 1 } else { -1 };
    }
    if surplus.iter().any(|&s| s != 0) {
        let pad = num_cells;
        num_cells += 1;
        for c in 0..surplus.len() {
            for _ in 0..surplus[c].unsigned_abs() {
                // The cell's extra vertex pairs with a fresh pendant partner
                // in the padding cell via a zero weight edge.
                let fill = if surplus[c] > 0 { Side::Right } else { Side::Left };
                let v = side.len();
                side.push(fill);
                cell_of.push(c);
                let partner = side.len();
                side.push(if fill == Side::Left { Side::Right } else { Side::Left });
                cell_of.push(pad);
                edges.push(if fill == Side::Left { (v, partner, 0) } else { (partner, v, 0) });
            }
        }
    }

    // Every bridge vertex has degree one, so its zero weight edge lies in
    // each perfect matching: the new join holds for free, and no existing
    // join gains a crossing because none names both bridged cells.
    loop {
        let mut uf = crate::graph::UnionFind::new(num_cells);
        for &(i, j) in &joins {
            uf.union(i, j);
        }
        let lead = uf.find(0);
        let Some(stray) = (0..num_cells).find(|&c| uf.find(c) != lead) else {
            break;
        };
        for (a, b) in [(0, stray), (stray, 0)] {
            let x = side.len();
            side.push(Side::Left);
            cell_of.push(a);
            let y = side.len();
            side.push(Side::Right);
            cell_of.push(b);
            edges.push((x, y, 0));
        }
        joins.push((0, stray));
    }

    Reduced::Instance {
        inst: CbmInstance::new(side, edges, cell_of, num_cells, joins, inst.omega_max).unwrap(),
        spent: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure_instance() -> CbmInstance {
        // Eight vertices in two cells, one join, all weights zero. The only
        // perfect matching pairs within cells, so no conjoining matching
        // exists.
        let side = vec![
            Side::Right,
            Side::Left,
            Side::Right,
            Side::Left,
            Side::Right,
            Side::Left,
            Side::Right,
            Side::Left,
        ];
        let edges = vec![
            (1, 0, 0),
            (3, 2, 0),
            (5, 4, 0),
            (7, 6, 0),
            (1, 6, 0),
            (3, 4, 0),
            (5, 6, 0),
        ];
        let cells = vec![0, 0, 0, 0, 1, 1, 1, 1];
        CbmInstance::new(side, edges, cells, 2, vec![(0, 1)], 0).unwrap()
    }

    #[test]
    fn figure_instance_has_no_conjoining_matching() {
        let inst = figure_instance();
        assert_eq!(oracle_cbm(&inst), None);
        assert_eq!(solve_cbm_general(&inst), None);
        assert_eq!(solve_cbm_degree2(&inst), None);
        // Without the join a perfect matching exists.
        let free =
            CbmInstance::new(inst.side.clone(), inst.edges.clone(), inst.cell_of.clone(), 2, vec![], 0)
                .unwrap();
        assert_eq!(oracle_cbm(&free), Some(0));
        let (w, m) = solve_cbm_general(&free).unwrap();
        assert_eq!(w, 0);
        assert_eq!(verify_matching(&free, &m), Ok(0));
    }

    #[test]
    fn degree_one_rule_cascades_and_strikes_joins() {
        // Path 0 - 1 - 2 - 3: vertex 0 forces {0,1}, then 2 forces {2,3}.
        let side = vec![Side::Left, Side::Right, Side::Left, Side::Right];
        let edges = vec![(0, 1, 2), (2, 1, 9), (2, 3, 5)];
        let inst =
            CbmInstance::new(side, edges, vec![0, 0, 1, 1], 2, vec![(0, 1)], 10).unwrap();
        match rr_degree_one(&inst) {
            Reduced::Instance { inst, spent } => {
                assert_eq!(spent, 7);
                assert_eq!(inst.n(), 0);
                // The forced edges lie within cells, the join survives.
                assert_eq!(inst.joins(), &[(0, 1)]);
            }
            Reduced::No => panic!("reducible instance"),
        }
    }

    #[test]
    fn degree_one_rule_admits_a_cascade_that_exactly_meets_the_budget() {
        // Total forced weight equals the budget; the cascade must not count
        // earlier forced edges against the remaining budget twice.
        let side = vec![Side::Left, Side::Right, Side::Left, Side::Right];
        let edges = vec![(0, 1, 2), (2, 1, 9), (2, 3, 5)];
        let inst =
            CbmInstance::new(side, edges, vec![0, 0, 1, 1], 2, vec![], 7).unwrap();
        match rr_degree_one(&inst) {
            Reduced::Instance { inst, spent } => {
                assert_eq!(spent, 7);
                assert_eq!(inst.omega_max, 0);
            }
            Reduced::No => panic!("the cascade fits the budget exactly"),
        }
        assert_eq!(oracle_cbm(&inst), Some(7));
    }

    #[test]
    fn degree_one_rule_detects_stranded_vertices() {
        let side = vec![Side::Left, Side::Right, Side::Left, Side::Right];
        let edges = vec![(0, 1, 1), (0, 3, 1)];
        let inst = CbmInstance::new(side, edges, vec![0; 4], 1, vec![], 9).unwrap();
        // Vertex 2 is isolated from the start.
        assert_eq!(rr_degree_one(&inst), Reduced::No);
    }

    #[test]
    fn confined_component_rule_spends_its_matching() {
        // A 4-cycle inside cell 0 and a crossing edge pair in cells 0/1.
        let side = vec![Side::Left, Side::Right, Side::Left, Side::Right, Side::Left, Side::Right];
        let edges = vec![(0, 1, 3), (2, 1, 1), (2, 3, 4), (0, 3, 5), (4, 5, 2)];
        let cells = vec![0, 0, 0, 0, 0, 1];
        let inst = CbmInstance::new(side, edges, cells, 2, vec![(0, 1)], 100).unwrap();
        match rr_component_in_cell(&inst) {
            Reduced::Instance { inst: out, spent } => {
                // Cheapest pairing of the cycle is {0,3} + {2,1} at 5 + 1 = 6.
                assert_eq!(spent, 6);
                assert_eq!(out.n(), 2);
                assert_eq!(out.omega_max, 94);
            }
            Reduced::No => panic!("matchable component"),
        }
    }

    #[test]
    fn signature_rule_collapses_equal_cycles() {
        // Two 4-cycles with identical signatures: neither can satisfy any
        // join, so the rule removes all of them (empty footprint case).
        let side = vec![
            Side::Left,
            Side::Right,
            Side::Left,
            Side::Right,
            Side::Left,
            Side::Right,
            Side::Left,
            Side::Right,
        ];
        let edges = vec![
            (0, 1, 1),
            (2, 1, 5),
            (2, 3, 1),
            (0, 3, 5),
            (4, 5, 2),
            (6, 5, 7),
            (6, 7, 2),
            (4, 7, 7),
        ];
        let cells = vec![0; 8];
        let inst = CbmInstance::new(side, edges, cells, 2, vec![], 100).unwrap();
        match rr_signature(&inst) {
            Reduced::Instance { inst: out, spent } => {
                assert_eq!(spent, 2 + 4);
                assert_eq!(out.n(), 0);
            }
            Reduced::No => panic!("solvable instance"),
        }
    }

    #[test]
    fn degree2_solver_matches_oracle_on_a_mixed_instance() {
        // One cycle crossing two cells plus a pendant pair.
        let side = vec![Side::Left, Side::Right, Side::Left, Side::Right, Side::Left, Side::Right];
        let edges = vec![(0, 1, 1), (2, 1, 2), (2, 3, 3), (0, 3, 4), (4, 5, 1)];
        let cells = vec![0, 0, 1, 1, 1, 1];
        let inst = CbmInstance::new(side, edges, cells, 2, vec![(0, 1)], 50).unwrap();
        assert_eq!(solve_cbm_degree2(&inst), oracle_cbm(&inst));
        assert_eq!(solve_cbm_general(&inst).map(|(w, _)| w), oracle_cbm(&inst));
    }

    #[test]
    fn legalize_pads_and_connects() {
        // Cell 0 has a left surplus, cell 1 a right surplus, no joins.
        let side = vec![Side::Left, Side::Left, Side::Right, Side::Right, Side::Left, Side::Right];
        let edges = vec![(0, 2, 1), (1, 3, 1), (4, 5, 1)];
        let cells = vec![0, 0, 1, 1, 2, 2];
        let inst = CbmInstance::new(side, edges, cells, 3, vec![(0, 1)], 10).unwrap();
        let Reduced::Instance { inst: out, .. } = legalize(&inst) else {
            panic!("legalizable")
        };
        // Every cell is now side balanced.
        for c in 0..out.num_cells() {
            let l = (0..out.n())
                .filter(|&v| out.cell_of(v) == c && out.side(v) == Side::Left)
                .count();
            let r = (0..out.n())
                .filter(|&v| out.cell_of(v) == c && out.side(v) == Side::Right)
                .count();
            assert_eq!(l, r, "cell {c}");
        }
        // The cell join graph is connected.
        let mut uf = crate::graph::UnionFind::new(out.num_cells());
        for &(i, j) in out.joins() {
            uf.union(i, j);
        }
        let lead = uf.find(0);
        assert!((0..out.num_cells()).all(|c| uf.find(c) == lead));
        // Equivalence is preserved; the padded output outgrows the oracle.
        let answer = oracle_cbm(&inst);
        assert_eq!(solve_cbm_general(&inst).map(|(w, _)| w), answer);
        assert_eq!(solve_cbm_general(&out).map(|(w, _)| w), answer);
    }

    #[test]
    fn legalize_rejects_joins_on_empty_cells_instead_of_reviving_them() {
        // Cell 1 holds no vertex, so its join can never be satisfied. A
        // naive cell merge would hand the join to a populated cell and turn
        // the instance solvable.
        let side = vec![Side::Left, Side::Right];
        let inst =
            CbmInstance::new(side, vec![(0, 1, 1)], vec![0, 0], 3, vec![(1, 2)], 10).unwrap();
        assert_eq!(oracle_cbm(&inst), None);
        assert_eq!(legalize(&inst), Reduced::No);
    }

    #[test]
    fn legalize_never_lets_pad_partners_stand_in_for_a_real_join() {
        // The only edge crossing cells 0 and 1 is forbidden, so the join is
        // unsatisfiable even though a perfect matching exists. Both cells
        // need padding; tying the pad cell to cell 0 by a merge would let a
        // forced pendant edge satisfy the join for free.
        let side = vec![Side::Left, Side::Right];
        let inst =
            CbmInstance::new(side, vec![(0, 1, INF)], vec![0, 1], 2, vec![(0, 1)], 10).unwrap();
        assert_eq!(oracle_cbm(&inst), None);
        match legalize(&inst) {
            Reduced::No => {}
            Reduced::Instance { inst: out, .. } => {
                assert_eq!(solve_cbm_general(&out), None);
            }
        }
    }

    #[test]
    fn canonical_instances_answer_as_named() {
        assert_eq!(oracle_cbm(&CbmInstance::canonical_no()), None);
        assert_eq!(oracle_cbm(&CbmInstance::canonical_yes()), Some(0));
    }
}
