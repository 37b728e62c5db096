//! Reductions between Eulerian extension and its neighbor problems.
//!
//! This module carries the translation layer of the toolkit: Hamiltonian
//! cycle and rural postman map into extension instances, extension under a
//! fixed advice maps into conjoining bipartite matching and back, and 3-SAT
//! maps into conjoining matching. Composing the matching round trip yields a
//! kernel for extension with advice whose size depends only on the total
//! imbalance and the component count.

use crate::advice::{eliminate_cycle_hints, minpath, Advice, Hint, HintKind};
use crate::cbm::{CbmInstance, Reduced, Side};
use crate::graph::{EeInstance, Multigraph, WeightMatrix};
use crate::preprocess::preprocess;
use crate::weight::{is_finite, wsum, Weight, INF, MAX_FINITE};
use std::collections::BTreeSet;

/// Extension instance whose answer is yes at weight zero: a one vertex
/// graph is Eulerian on its own.
pub fn canonical_yes_ee() -> EeInstance {
    EeInstance::new(Multigraph::new(1), WeightMatrix::new_inf(1), 0).unwrap()
}

/// Extension instance whose answer is no: two isolated vertices can never
/// be connected when every arc is forbidden.
pub fn canonical_no_ee() -> EeInstance {
    EeInstance::new(Multigraph::new(2), WeightMatrix::new_inf(2), 0).unwrap()
}

/// Advice bearing instance whose answer is no, with a minimal connecting
/// advice of a single length one hint.
pub fn canonical_no_eea() -> (EeInstance, Advice) {
    let hint = Hint::new(vec![0, 1], HintKind::Path).unwrap();
    (canonical_no_ee(), vec![hint])
}

/// A directed graph asked for a Hamiltonian cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HcInstance {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl HcInstance {
    pub fn new(n: usize, arcs: Vec<(usize, usize)>) -> Result<Self, &'static str> {
        if n == 0 {
            return Err("empty vertex set");
        }
        let mut set = BTreeSet::new();
        for &(u, v) in &arcs {
            if u >= n || v >= n {
                return Err("arc out of range");
            }
            if u == v {
                return Err("self loop");
            }
            set.insert((u, v));
        }
        Ok(HcInstance { n, arcs: set.into_iter().collect() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }
}

/// Brute force Hamiltonian cycle check by extending paths from vertex zero.
pub fn has_hamiltonian_cycle(hc: &HcInstance) -> bool {
    let n = hc.n;
    if n == 1 {
        return false;
    }
    let mut adj = vec![vec![false; n]; n];
    for &(u, v) in &hc.arcs {
        adj[u][v] = true;
    }
    fn extend(adj: &[Vec<bool>], used: &mut [bool], at: usize, left: usize) -> bool {
        if left == 0 {
            return adj[at][0];
        }
        for next in 1..adj.len() {
            if !used[next] && adj[at][next] {
                used[next] = true;
                if extend(adj, used, next, left - 1) {
                    return true;
                }
                used[next] = false;
            }
        }
        false
    }
    let mut used = vec![false; n];
    used[0] = true;
    extend(&adj, &mut used, 0, n - 1)
}

/// Maps a Hamiltonian cycle question to an extension question.
///
/// Every original vertex becomes a two vertex component joined by a digon;
/// unit weight arcs between the primary copies mirror the original arcs and
/// everything else is forbidden. With budget `n`, feasible extensions are
/// exactly the Hamiltonian cycles.
pub fn hc_to_ee(hc: &HcInstance) -> EeInstance {
    let n = hc.n;
    let mut arcs = Vec::with_capacity(2 * n);
    for v in 0..n {
        arcs.push((2 * v, 2 * v + 1));
        arcs.push((2 * v + 1, 2 * v));
    }
    let graph = Multigraph::with_arcs(2 * n, arcs).unwrap();
    let mut weights = WeightMatrix::new_inf(2 * n);
    for &(u, v) in &hc.arcs {
        weights.set(2 * u, 2 * v, 1);
    }
    EeInstance::new(graph, weights, n as Weight).unwrap()
}

/// A rural postman instance: a multigraph with per arc weights, a multiset
/// of required arcs given by index, and a budget for a closed walk that
/// traverses every required arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RpInstance {
    n: usize,
    arcs: Vec<(usize, usize, Weight)>,
    required: Vec<usize>,
    pub omega_max: Weight,
}

impl RpInstance {
    pub fn new(
        n: usize,
        arcs: Vec<(usize, usize, Weight)>,
        required: Vec<usize>,
        omega_max: Weight,
    ) -> Result<Self, &'static str> {
        if n == 0 {
            return Err("empty vertex set");
        }
        for &(u, v, w) in &arcs {
            if u >= n || v >= n {
                return Err("arc out of range");
            }
            if u == v {
                return Err("self loop");
            }
            if is_finite(w) && w > MAX_FINITE {
                return Err("weight too large");
            }
        }
        let set: BTreeSet<usize> = required.iter().copied().collect();
        if set.len() != required.len() {
            return Err("duplicate required index");
        }
        if set.last().is_some_and(|&i| i >= arcs.len()) {
            return Err("required index out of range");
        }
        // Canonical storage: arcs ascending, a required arc after any equal
        // optional one, so equality and rendering ignore input order.
        let mut tagged: Vec<((usize, usize, Weight), bool)> =
            arcs.into_iter().enumerate().map(|(i, a)| (a, set.contains(&i))).collect();
        tagged.sort_unstable();
        let required = tagged.iter().enumerate().filter(|(_, t)| t.1).map(|(i, _)| i).collect();
        let arcs = tagged.into_iter().map(|t| t.0).collect();
        Ok(RpInstance { n, arcs, required, omega_max })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arcs(&self) -> &[(usize, usize, Weight)] {
        &self.arcs
    }

    pub fn required(&self) -> &[usize] {
        &self.required
    }

    /// Total weight of one traversal of every required arc.
    pub fn required_weight(&self) -> Weight {
        wsum(self.required.iter().map(|&i| self.arcs[i].2))
    }
}

/// Maps a postman question to an extension question: the required arcs
/// become the graph, deadheading becomes extension. Arc weights above the
/// leftover budget are forbidden outright.
pub fn rp_to_ee(rp: &RpInstance) -> EeInstance {
    let wr = rp.required_weight();
    if !is_finite(wr) {
        // Any walk covering the required arcs costs infinity.
        return if rp.omega_max == INF { canonical_yes_ee() } else { canonical_no_ee() };
    }
    if rp.omega_max != INF && wr > rp.omega_max {
        return canonical_no_ee();
    }
    let budget =
        if rp.omega_max == INF { MAX_FINITE } else { (rp.omega_max - wr).min(MAX_FINITE) };
    let graph = Multigraph::with_arcs(
        rp.n,
        rp.required.iter().map(|&i| (rp.arcs[i].0, rp.arcs[i].1)).collect(),
    )
    .unwrap();
    let mut weights = WeightMatrix::new_inf(rp.n);
    for &(u, v, w) in &rp.arcs {
        if is_finite(w) && w <= budget && w < weights.get(u, v) {
            weights.set(u, v, w);
        }
    }
    EeInstance::new(graph, weights, budget).unwrap()
}

/// Maps an extension question to a postman question: the graph arcs become
/// required, every vertex pair becomes a deadhead arc, and the budget grows
/// by the cost of one traversal of the required arcs.
///
/// A graph arc whose pair is forbidden keeps a finite price just above the
/// original budget, so the adjusted budget stays finite and exact.
pub fn ee_to_rp(inst: &EeInstance) -> RpInstance {
    let n = inst.n();
    let over_budget = inst.omega_max.saturating_add(1).min(MAX_FINITE);
    let mut arcs: Vec<(usize, usize, Weight)> = inst
        .graph
        .arcs()
        .iter()
        .map(|&(u, v)| {
            let w = inst.weights.get(u, v);
            (u, v, if is_finite(w) { w } else { over_budget })
        })
        .collect();
    let required: Vec<usize> = (0..arcs.len()).collect();
    let wr: Weight = arcs.iter().map(|a| a.2).sum();
    for u in 0..n {
        for v in 0..n {
            if u != v {
                arcs.push((u, v, inst.weights.get(u, v)));
            }
        }
    }
    RpInstance::new(n, arcs, required, inst.omega_max + wr).unwrap()
}

/// A 3-SAT formula: clauses of up to three literals `(variable, positive)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sat3Instance {
    num_vars: usize,
    clauses: Vec<Vec<(usize, bool)>>,
}

impl Sat3Instance {
    pub fn new(num_vars: usize, clauses: Vec<Vec<(usize, bool)>>) -> Result<Self, &'static str> {
        for clause in &clauses {
            if clause.len() > 3 {
                return Err("clause too wide");
            }
            if clause.iter().any(|&(v, _)| v >= num_vars) {
                return Err("variable out of range");
            }
        }
        Ok(Sat3Instance { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<(usize, bool)>] {
        &self.clauses
    }
}

/// Brute force satisfiability check.
pub fn sat3_satisfiable(f: &Sat3Instance) -> bool {
    assert!(f.num_vars <= 20, "assignment enumeration too large");
    (0u32..1 << f.num_vars).any(|bits| {
        f.clauses
            .iter()
            .all(|c| c.iter().any(|&(v, positive)| (bits >> v & 1 == 1) == positive))
    })
}

/// Maps a 3-SAT formula to a conjoining matching question.
///
/// Every variable becomes an even cycle of `4m` vertices whose two perfect
/// matchings encode true and false. Per clause, one cell collects marker
/// vertices of its literals so that a matching edge leaves the cell exactly
/// when the literal is satisfied; a join per clause demands one such edge.
pub fn sat3_to_cbm(f: &Sat3Instance) -> CbmInstance {
    let m = f.clauses.len();
    let span = 4 * m;
    let n = f.num_vars * span;
    // Vertex of variable `i` at cycle position `j`, positions counted from 1.
    let vid = |i: usize, j: usize| i * span + (j - 1);

    let mut side = vec![Side::Left; n];
    let mut edges = Vec::with_capacity(n);
    let mut cell_of = vec![0usize; n];
    for i in 0..f.num_vars {
        for j in 1..=span {
            if j % 2 == 0 {
                side[vid(i, j)] = Side::Right;
            }
            let next = if j == span { 1 } else { j + 1 };
            edges.push((vid(i, j), vid(i, next), 0));
        }
    }
    for (idx, clause) in f.clauses.iter().enumerate() {
        let j = idx + 1;
        for &(i, positive) in clause {
            cell_of[vid(i, 4 * j - 1)] = j;
            let marker = if positive { 4 * j - 2 } else { 4 * j };
            cell_of[vid(i, marker)] = j;
        }
    }
    let joins = (1..=m).map(|j| (0, j)).collect();
    CbmInstance::new(side, edges, cell_of, m + 1, joins, 1).unwrap()
}

/// What a matching vertex stands for when a conjoining matching is pulled
/// back to an extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CbmVertexKind {
    /// A vertex of positive balance; its matching edge starts a direct arc.
    Surplus(usize),
    /// A vertex of negative balance; absorbs a direct arc or a hint path.
    Deficit(usize),
    /// Gadget vertex matched to the deficit end when its path is chosen.
    PathTail(usize),
    /// Gadget vertex matched to the surplus end when its path is chosen.
    PathHead(usize),
}

/// Pull back data for a matching instance built by [`eeca_to_cbm`].
#[derive(Debug, Clone)]
pub struct EecaCbmMap {
    kinds: Vec<CbmVertexKind>,
    paths: Vec<Vec<(usize, usize)>>,
}

/// Maps one advice over a normalized instance to a conjoining matching
/// question of the same optimum weight.
///
/// Surplus and deficit vertices form the two sides, cells follow the
/// component frame and direct repair arcs become edges. Every length one
/// hint contributes a join between its end components. Every longer hint
/// gets a fresh cell holding one tail and head vertex pair per cheapest
/// trail realization; matching head to surplus and tail to deficit selects
/// that trail, matching head to tail declines the gadget at no cost. Joins
/// tie each hint cell to the hint's end components, so a conjoining
/// matching must select every hint at least once.
///
/// Cycle hints must already be realized; the remaining budget is the
/// matching budget.
pub fn eeca_to_cbm(
    graph: &Multigraph,
    weights: &WeightMatrix,
    comp_of: &[usize],
    num_comps: usize,
    hints: &[Hint],
    omega_max: Weight,
) -> (CbmInstance, EecaCbmMap) {
    assert!(hints.iter().all(|h| h.kind() == HintKind::Path), "cycle hints must be gone");
    let bal = graph.balances();
    debug_assert!(bal.iter().all(|b| b.abs() <= 1), "normalized instances have unit balances");
    let pos: Vec<usize> = (0..graph.n()).filter(|&v| bal[v] > 0).collect();
    let neg: Vec<usize> = (0..graph.n()).filter(|&v| bal[v] < 0).collect();

    let mut side = Vec::new();
    let mut cell_of = Vec::new();
    let mut kinds = Vec::new();
    let mut of_vertex = vec![usize::MAX; graph.n()];
    for &s in &pos {
        of_vertex[s] = side.len();
        side.push(Side::Left);
        cell_of.push(comp_of[s]);
        kinds.push(CbmVertexKind::Surplus(s));
    }
    for &t in &neg {
        of_vertex[t] = side.len();
        side.push(Side::Right);
        cell_of.push(comp_of[t]);
        kinds.push(CbmVertexKind::Deficit(t));
    }

    let mut edges = Vec::new();
    for &s in &pos {
        for &t in &neg {
            let w = weights.get(s, t);
            if is_finite(w) {
                edges.push((of_vertex[s], of_vertex[t], w));
            }
        }
    }

    let mut joins = BTreeSet::new();
    let mut paths: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut hint_cells = 0;
    for hint in hints {
        let (o, p) = hint.endpoint_comps();
        if hint.len_edges() == 1 {
            joins.insert((o.min(p), o.max(p)));
            continue;
        }
        let cell = num_comps + hint_cells;
        hint_cells += 1;
        for &s in &pos {
            for &t in &neg {
                let ends = (comp_of[s], comp_of[t]);
                if ends != (o, p) && ends != (p, o) {
                    continue;
                }
                let Some((w, path)) = minpath(weights, comp_of, hint.comps(), s, t) else {
                    continue;
                };
                let tail = side.len();
                side.push(Side::Left);
                cell_of.push(cell);
                kinds.push(CbmVertexKind::PathTail(paths.len()));
                let head = side.len();
                side.push(Side::Right);
                cell_of.push(cell);
                kinds.push(CbmVertexKind::PathHead(paths.len()));
                paths.push(path.windows(2).map(|p| (p[0], p[1])).collect());
                edges.push((of_vertex[s], head, w));
                edges.push((tail, of_vertex[t], 0));
                edges.push((tail, head, 0));
            }
        }
        joins.insert((o.min(cell), o.max(cell)));
        joins.insert((p.min(cell), p.max(cell)));
    }

    let inst = CbmInstance::new(
        side,
        edges,
        cell_of,
        num_comps + hint_cells,
        joins.into_iter().collect(),
        omega_max,
    )
    .unwrap();
    (inst, EecaCbmMap { kinds, paths })
}

/// Pulls a conjoining matching back to the extension it encodes: surplus
/// to deficit edges become direct arcs, head to surplus edges inject their
/// gadget's trail, everything else carries no arcs.
pub fn matching_to_extension(map: &EecaCbmMap, matching: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut ext = Vec::new();
    for &(a, b) in matching {
        match (map.kinds[a], map.kinds[b]) {
            (CbmVertexKind::Surplus(s), CbmVertexKind::Deficit(t))
            | (CbmVertexKind::Deficit(t), CbmVertexKind::Surplus(s)) => ext.push((s, t)),
            (CbmVertexKind::PathHead(g), CbmVertexKind::Surplus(_))
            | (CbmVertexKind::Surplus(_), CbmVertexKind::PathHead(g)) => {
                ext.extend(map.paths[g].iter().copied());
            }
            _ => {}
        }
    }
    ext
}

/// Maps a legalized matching question back to an extension question with a
/// minimal connecting advice of length one hints.
///
/// Cells become components: a directed cycle through each cell keeps it
/// balanced and connected, and one arc per left and right vertex pair
/// shifts every left vertex to deficit and every right vertex to surplus.
/// Allowed extension arcs run from right to left along the original edges,
/// so extensions correspond to perfect matchings; the advice mirrors the
/// joins.
pub fn cbm_to_eea(inst: &CbmInstance) -> (EeInstance, Advice) {
    let n = inst.n();
    let cells: Vec<Vec<usize>> = {
        let mut groups = vec![Vec::new(); inst.num_cells()];
        for v in 0..n {
            groups[inst.cell_of(v)].push(v);
        }
        groups
    };
    if inst.joins().iter().any(|&(i, j)| cells[i].is_empty() || cells[j].is_empty()) {
        return canonical_no_eea();
    }
    if n == 0 {
        return (canonical_yes_ee(), Vec::new());
    }

    let mut arcs = Vec::new();
    for members in &cells {
        if members.is_empty() {
            continue;
        }
        let lefts: Vec<usize> =
            members.iter().copied().filter(|&v| inst.side(v) == Side::Left).collect();
        let rights: Vec<usize> =
            members.iter().copied().filter(|&v| inst.side(v) == Side::Right).collect();
        assert_eq!(lefts.len(), rights.len(), "legalized cells are side balanced");
        for (&l, &r) in lefts.iter().zip(&rights) {
            arcs.push((l, r));
        }
        for k in 0..members.len() {
            arcs.push((members[k], members[(k + 1) % members.len()]));
        }
    }
    let graph = Multigraph::with_arcs(n, arcs).unwrap();
    let weights = WeightMatrix::from_fn(n, |u, v| {
        if inst.side(u) == Side::Right && inst.side(v) == Side::Left {
            inst.edges()
                .iter()
                .find(|&&(a, b, _)| (a, b) == (v, u))
                .map_or(INF, |&(_, _, w)| w)
        } else {
            INF
        }
    });

    let comps = graph.components();
    let advice = inst
        .joins()
        .iter()
        .map(|&(i, j)| {
            let a = comps.comp_of[cells[i][0]];
            let b = comps.comp_of[cells[j][0]];
            Hint::new(vec![a, b], HintKind::Path).unwrap()
        })
        .collect();
    (EeInstance::new(graph, weights, inst.omega_max).unwrap(), advice)
}

/// Shrinks an advice bearing instance to an equivalent one whose size is
/// polynomial in the total imbalance and the component count, with every
/// hint of length one.
///
/// Normalizes, realizes the cycle hints, crosses into conjoining matching,
/// legalizes and maps back.
pub fn kernelize_eeca(inst: &EeInstance, advice: &Advice) -> (EeInstance, Advice) {
    let (pre, _) = preprocess(inst);
    let comps = pre.graph.components();
    let Some((g, _, cycles_w, path_hints)) =
        eliminate_cycle_hints(&pre.graph, &pre.weights, &comps.comp_of, advice)
    else {
        return canonical_no_eea();
    };
    if !is_finite(cycles_w) || cycles_w > pre.omega_max {
        return canonical_no_eea();
    }
    let (cbm, _) = eeca_to_cbm(
        &g,
        &pre.weights,
        &comps.comp_of,
        comps.count,
        &path_hints,
        pre.omega_max - cycles_w,
    );
    match crate::cbm::legalize(&cbm) {
        Reduced::No => canonical_no_eea(),
        Reduced::Instance { inst: legal, .. } => cbm_to_eea(&legal),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cbm::{oracle_cbm, solve_cbm_general, verify_matching};
    use crate::solver::{oracle_ee, solve_ee, solve_ee_within_budget, solve_eeca, verify_extension};

    fn weights_from(n: usize, entries: &[(usize, usize, Weight)], default: Weight) -> WeightMatrix {
        let mut w = WeightMatrix::from_fn(n, |u, v| if u == v { INF } else { default });
        for &(u, v, x) in entries {
            w.set(u, v, x);
        }
        w
    }

    #[test]
    fn hamiltonian_brute_force_answers_cycles_and_stars() {
        let cycle = HcInstance::new(4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert!(has_hamiltonian_cycle(&cycle));
        // A star has no cycle through the leaves.
        let star = HcInstance::new(4, vec![(0, 1), (1, 0), (0, 2), (2, 0), (0, 3), (3, 0)]).unwrap();
        assert!(!has_hamiltonian_cycle(&star));
    }

    #[test]
    fn hamiltonian_reduction_round_trips_the_answer() {
        for (hc, expect) in [
            (HcInstance::new(3, vec![(0, 1), (1, 2), (2, 0)]).unwrap(), true),
            (HcInstance::new(3, vec![(0, 1), (1, 0), (0, 2), (2, 0)]).unwrap(), false),
        ] {
            let ee = hc_to_ee(&hc);
            assert_eq!(solve_ee_within_budget(&ee).is_some(), expect);
            assert_eq!(oracle_ee(&ee).is_some(), expect);
        }
    }

    #[test]
    fn postman_round_trip_preserves_the_decision() {
        // Two required components bridged by cheap deadheads.
        let graph = Multigraph::with_arcs(4, vec![(0, 1), (2, 3)]).unwrap();
        let weights = weights_from(
            4,
            &[(1, 2, 1), (3, 0, 1), (1, 0, 7), (3, 2, 7)],
            INF,
        );
        for (budget, expect) in [(2, true), (1, false)] {
            let inst = EeInstance::new(graph.clone(), weights.clone(), budget).unwrap();
            let rp = ee_to_rp(&inst);
            let back = rp_to_ee(&rp);
            assert_eq!(back.graph.arcs(), inst.graph.arcs());
            assert_eq!(
                solve_ee_within_budget(&back).is_some(),
                expect,
                "budget {budget}"
            );
            assert_eq!(solve_ee_within_budget(&inst).is_some(), expect);
        }
    }

    #[test]
    fn postman_with_unaffordable_required_arcs_is_no() {
        let rp = RpInstance::new(2, vec![(0, 1, 5), (1, 0, 5)], vec![0, 1], 9).unwrap();
        assert!(solve_ee_within_budget(&rp_to_ee(&rp)).is_none());
        let rp = RpInstance::new(2, vec![(0, 1, 5), (1, 0, 5)], vec![0, 1], 10).unwrap();
        assert!(solve_ee_within_budget(&rp_to_ee(&rp)).is_some());
    }

    #[test]
    fn sat_reduction_matches_brute_force_on_small_formulas() {
        let yes = Sat3Instance::new(
            2,
            vec![vec![(0, false), (1, true)], vec![(0, false), (1, false)]],
        )
        .unwrap();
        let no = Sat3Instance::new(
            1,
            vec![vec![(0, true)], vec![(0, false)]],
        )
        .unwrap();
        for f in [yes, no] {
            let cbm = sat3_to_cbm(&f);
            assert_eq!(solve_cbm_general(&cbm).is_some(), sat3_satisfiable(&f));
        }
    }

    #[test]
    fn advice_matching_image_reproduces_the_optimum() {
        // Two components; the bounce hint through the balanced one is the
        // cheapest realization.
        let graph = Multigraph::with_arcs(4, vec![(0, 1), (2, 3), (3, 2)]).unwrap();
        let weights = weights_from(4, &[(1, 2, 1), (2, 0, 1), (1, 0, 5)], 50);
        let inst = EeInstance::new(graph, weights, 100).unwrap();
        let best = solve_ee(&inst).optimum.map(|(w, _)| w);

        let (pre, _) = preprocess(&inst);
        let comps = pre.graph.components();
        let mut via_matching: Option<Weight> = None;
        for advice in crate::advice::enumerate_min_connecting_advices(comps.count) {
            let Some((g, _, cycles_w, hints)) =
                eliminate_cycle_hints(&pre.graph, &pre.weights, &comps.comp_of, &advice)
            else {
                continue;
            };
            let (cbm, map) = eeca_to_cbm(
                &g,
                &pre.weights,
                &comps.comp_of,
                comps.count,
                &hints,
                pre.omega_max,
            );
            let Some((w, matching)) = solve_cbm_general(&cbm) else {
                continue;
            };
            assert_eq!(verify_matching(&cbm, &matching), Ok(w));
            let ext = matching_to_extension(&map, &matching);
            let total = crate::weight::wadd(cycles_w, w);
            assert_eq!(
                ext.iter().map(|&(u, v)| pre.weights.get(u, v)).sum::<Weight>(),
                w,
                "pulled back arcs carry the matching weight"
            );
            if via_matching.is_none_or(|b| total < b) {
                via_matching = Some(total);
            }
        }
        assert_eq!(via_matching, best);
        // The bounce 1 -> 2 -> 0 costs two and connects everything.
        assert_eq!(best, Some(2));
    }

    #[test]
    fn legalized_matching_maps_to_extension_with_advice() {
        let side = vec![Side::Left, Side::Right, Side::Left, Side::Right];
        let edges = vec![(0, 1, 2), (0, 3, 1), (2, 1, 1), (2, 3, 4)];
        let inst =
            CbmInstance::new(side, edges, vec![0, 0, 1, 1], 2, vec![(0, 1)], 10).unwrap();
        let (ee, advice) = cbm_to_eea(&inst);
        assert!(advice.iter().all(|h| h.len_edges() == 1));
        let got = solve_eeca(&ee, &advice).map(|(w, _)| w);
        assert_eq!(got, oracle_cbm(&inst));
        assert_eq!(got, Some(2));
    }

    #[test]
    fn kernel_is_small_and_equivalent() {
        let graph = Multigraph::with_arcs(4, vec![(0, 1), (2, 3), (3, 2)]).unwrap();
        let weights = weights_from(4, &[(1, 2, 1), (2, 0, 1), (1, 0, 5)], 50);
        let inst = EeInstance::new(graph, weights, 100).unwrap();
        let advice = vec![Hint::new(vec![0, 1, 0], HintKind::Path).unwrap()];
        let before = solve_eeca(&inst, &advice).map(|(w, _)| w);

        let (kernel, kadvice) = kernelize_eeca(&inst, &advice);
        assert!(kadvice.iter().all(|h| h.len_edges() == 1));
        let after = solve_eeca(&kernel, &kadvice).map(|(w, ext)| {
            assert_eq!(verify_extension(&kernel, &ext), Ok(w));
            w
        });
        assert_eq!(before, after);
        assert_eq!(before, Some(2));
        // One surplus, one deficit, one gadget pair, nothing to pad.
        assert!(kernel.n() <= 6, "kernel has {} vertices", kernel.n());
    }

    #[test]
    fn canonical_instances_answer_as_named() {
        assert!(solve_ee_within_budget(&canonical_yes_ee()).is_some());
        assert!(solve_ee_within_budget(&canonical_no_ee()).is_none());
        let (inst, advice) = canonical_no_eea();
        assert!(solve_eeca(&inst, &advice).is_none());
    }
}
