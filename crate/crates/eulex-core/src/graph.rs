//! Directed multigraphs, balances, components and trail decompositions.
//!
//! Vertices are `0..n`. Arcs form a multiset and never loop on a single
//! vertex. Connectivity is always taken in the weak sense: an arc joins its
//! endpoints' components regardless of direction. Component identifiers are
//! assigned by first occurrence while scanning vertices in increasing order,
//! which keeps them stable when vertices are appended.

use crate::weight::{is_finite, wsum, Weight, INF, MAX_FINITE};

/// Errors raised when assembling graphs or instances from untrusted input.
#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("graph needs at least one vertex")]
    Empty,
    #[error("arc ({0}, {1}) has an endpoint out of range")]
    ArcOutOfRange(usize, usize),
    #[error("self loop on vertex {0}")]
    SelfLoop(usize),
    #[error("weight matrix side {matrix} does not match vertex count {graph}")]
    SizeMismatch { graph: usize, matrix: usize },
    #[error("weight {0} exceeds the maximum finite weight")]
    WeightTooLarge(Weight),
    #[error("diagonal weight on vertex {0} must be infinite")]
    FiniteSelfWeight(usize),
    #[error("budget {0} exceeds the maximum finite weight")]
    BudgetTooLarge(Weight),
}

/// A directed multigraph stored as a sorted arc list with multiplicity.
/// The canonical order makes iteration deterministic and equality the plain
/// multiset comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    arcs: Vec<(usize, usize)>,
}

impl Multigraph {
    /// An arcless graph on `n` vertices.
    pub fn new(n: usize) -> Self {
        Multigraph { n, arcs: Vec::new() }
    }

    /// Builds a graph and validates every arc.
    pub fn with_arcs(n: usize, mut arcs: Vec<(usize, usize)>) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        for &(u, v) in &arcs {
            if u >= n || v >= n {
                return Err(InstanceError::ArcOutOfRange(u, v));
            }
            if u == v {
                return Err(InstanceError::SelfLoop(u));
            }
        }
        arcs.sort_unstable();
        Ok(Multigraph { n, arcs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The arc multiset in ascending order.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// Inserts an arc at its sorted position. Panics on a self loop; those
    /// are never legal.
    pub fn add_arc(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n, "arc ({u}, {v}) is not legal here");
        let at = self.arcs.partition_point(|&a| a <= (u, v));
        self.arcs.insert(at, (u, v));
    }

    /// Appends a fresh isolated vertex and returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.n += 1;
        self.n - 1
    }

    /// Indegree minus outdegree of `v`.
    pub fn balance(&self, v: usize) -> i64 {
        let mut b = 0i64;
        for &(s, t) in &self.arcs {
            if t == v {
                b += 1;
            }
            if s == v {
                b -= 1;
            }
        }
        b
    }

    /// Balance of every vertex in one pass.
    pub fn balances(&self) -> Vec<i64> {
        let mut b = vec![0i64; self.n];
        for &(s, t) in &self.arcs {
            b[s] -= 1;
            b[t] += 1;
        }
        b
    }

    /// Vertices with positive balance, ascending.
    pub fn positive_vertices(&self) -> Vec<usize> {
        self.balances()
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b > 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// Vertices with negative balance, ascending.
    pub fn negative_vertices(&self) -> Vec<usize> {
        self.balances()
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b < 0)
            .map(|(v, _)| v)
            .collect()
    }

    /// Sum of all positive balances, the parameter `b`.
    pub fn total_positive_balance(&self) -> u64 {
        self.balances().iter().filter(|&&b| b > 0).sum::<i64>() as u64
    }

    /// Weakly connected components, identifiers in first occurrence order.
    pub fn components(&self) -> Components {
        let mut uf = UnionFind::new(self.n);
        for &(u, v) in &self.arcs {
            uf.union(u, v);
        }
        Components::from_union_find(&mut uf)
    }

    pub fn is_balanced(&self) -> bool {
        self.balances().iter().all(|&b| b == 0)
    }

    pub fn is_connected(&self) -> bool {
        self.components().count <= 1
    }

    /// Connected and balanced. A single isolated vertex qualifies.
    pub fn is_eulerian(&self) -> bool {
        self.is_connected() && self.is_balanced()
    }
}

/// A partition of the vertices into weakly connected components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component identifier of each vertex.
    pub comp_of: Vec<usize>,
    /// Number of components.
    pub count: usize,
}

impl Components {
    fn from_union_find(uf: &mut UnionFind) -> Self {
        let n = uf.len();
        let mut label = vec![usize::MAX; n];
        let mut comp_of = vec![0usize; n];
        let mut count = 0;
        for v in 0..n {
            let r = uf.find(v);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            comp_of[v] = label[r];
        }
        Components { comp_of, count }
    }

    /// The vertices of every component, grouped by identifier.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); self.count];
        for (v, &c) in self.comp_of.iter().enumerate() {
            m[c].push(v);
        }
        m
    }
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    blocks: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n], blocks: n }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Merges the blocks of `a` and `b`; returns false if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.blocks -= 1;
        true
    }

    /// Number of blocks.
    pub fn blocks(&self) -> usize {
        self.blocks
    }
}

/// A dense weight function on ordered vertex pairs. The diagonal is always
/// infinite because self loops are never legal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    n: usize,
    w: Vec<Weight>,
}

impl WeightMatrix {
    /// All pairs forbidden.
    pub fn new_inf(n: usize) -> Self {
        WeightMatrix { n, w: vec![INF; n * n] }
    }

    /// Fills from a function; the diagonal is forced to `INF`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Weight) -> Self {
        let mut m = WeightMatrix::new_inf(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    m.w[u * n + v] = f(u, v);
                }
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> Weight {
        self.w[u * self.n + v]
    }

    /// Sets one off-diagonal entry.
    pub fn set(&mut self, u: usize, v: usize, w: Weight) {
        assert!(u != v, "self weights stay infinite");
        self.w[u * self.n + v] = w;
    }

    /// Copies into a matrix for `new_n >= n` vertices; new pairs start at `INF`.
    pub fn grown(&self, new_n: usize) -> WeightMatrix {
        assert!(new_n >= self.n);
        let mut m = WeightMatrix::new_inf(new_n);
        for u in 0..self.n {
            for v in 0..self.n {
                m.w[u * new_n + v] = self.w[u * self.n + v];
            }
        }
        m
    }

    /// Largest finite entry, if any.
    pub fn max_finite(&self) -> Option<Weight> {
        self.w.iter().copied().filter(|&x| is_finite(x)).max()
    }
}

/// A weighted Eulerian extension instance: a multigraph, an arc weight
/// function on all ordered pairs and a budget.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EeInstance {
    pub graph: Multigraph,
    pub weights: WeightMatrix,
    pub omega_max: Weight,
}

impl EeInstance {
    /// Validates sizes, the infinite diagonal and the finite weight bound.
    pub fn new(
        graph: Multigraph,
        weights: WeightMatrix,
        omega_max: Weight,
    ) -> Result<Self, InstanceError> {
        if graph.n() != weights.n() {
            return Err(InstanceError::SizeMismatch { graph: graph.n(), matrix: weights.n() });
        }
        for u in 0..graph.n() {
            if weights.get(u, u) != INF {
                return Err(InstanceError::FiniteSelfWeight(u));
            }
            for v in 0..graph.n() {
                let w = weights.get(u, v);
                if is_finite(w) && w > MAX_FINITE {
                    return Err(InstanceError::WeightTooLarge(w));
                }
            }
        }
        if omega_max > MAX_FINITE {
            return Err(InstanceError::BudgetTooLarge(omega_max));
        }
        Ok(EeInstance { graph, weights, omega_max })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// Total weight of an arc multiset under this instance's weights.
    pub fn extension_weight(&self, ext: &[(usize, usize)]) -> Weight {
        wsum(ext.iter().map(|&(u, v)| self.weights.get(u, v)))
    }

    /// The graph with an extension added.
    pub fn graph_with(&self, ext: &[(usize, usize)]) -> Multigraph {
        let mut g = self.graph.clone();
        for &(u, v) in ext {
            g.add_arc(u, v);
        }
        g
    }
}

/// Collapses each maximal run of same component vertices of a trail to that
/// component's identifier.
pub fn meta_trail(trail: &[usize], comp_of: &[usize]) -> Vec<usize> {
    let mut meta = Vec::new();
    for &v in trail {
        let c = comp_of[v];
        if meta.last() != Some(&c) {
            meta.push(c);
        }
    }
    meta
}

/// Replaces a consecutive subtrail `s` of `t` by the single arc from its
/// initial to its terminal vertex, both in the arc multiset `e` and in `t`.
///
/// The endpoints of `t` never change and the multiset shrinks by one arc per
/// subtrail arc beyond the first, so shortcutting never grows `e`. A closed
/// subtrail is rejected because its replacement would be a self loop.
pub fn shortcut(
    e: &[(usize, usize)],
    t: &[usize],
    s: &[usize],
) -> Result<(Vec<(usize, usize)>, Vec<usize>), &'static str> {
    if s.len() < 2 {
        return Err("a subtrail needs at least one arc");
    }
    if s[0] == s[s.len() - 1] {
        return Err("shortcutting a closed subtrail would need a self loop");
    }
    let Some(pos) =
        (0..=t.len().saturating_sub(s.len())).find(|&i| t[i..i + s.len()] == *s)
    else {
        return Err("the subtrail does not occur in the trail");
    };
    let mut rest = e.to_vec();
    for pair in s.windows(2) {
        let arc = (pair[0], pair[1]);
        let Some(at) = rest.iter().position(|&a| a == arc) else {
            return Err("a subtrail arc is missing from the multiset");
        };
        rest.remove(at);
    }
    rest.push((s[0], s[s.len() - 1]));
    let mut shortened = t[..=pos].to_vec();
    shortened.extend_from_slice(&t[pos + s.len() - 1..]);
    Ok((rest, shortened))
}

/// Splits every interior loop of a walk off as its own cycle, leaving a
/// vertex simple walk. Scanning for the earliest repeated vertex makes each
/// split piece a simple cycle, so one pass per removal suffices.
fn unthread(mut walk: Vec<usize>, cycles: &mut Vec<Vec<usize>>) -> Vec<usize> {
    'scan: loop {
        for j in 1..walk.len() {
            let Some(i) = walk[..j].iter().position(|&v| v == walk[j]) else { continue };
            if i == 0 && j == walk.len() - 1 {
                return walk;
            }
            cycles.push(walk[i..=j].to_vec());
            walk.drain(i + 1..=j);
            continue 'scan;
        }
        return walk;
    }
}

/// Decomposes an extension of `g` into pairwise arc disjoint simple paths
/// and cycles, paths first. The pieces' arc multisets partition the
/// extension exactly; every path starts at a vertex with positive and ends
/// at one with negative balance in `g`.
///
/// Rejects extensions that do not balance `g`; connectivity plays no role in
/// the decomposition itself. Extraction is greedy: maximum length walks
/// along the smallest unused arc, started from surplus vertices while any
/// remain, then interior loops are split off as cycles so that no piece
/// revisits a vertex.
pub fn decompose_extension(g: &Multigraph, ext: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let n = g.n();
    let bal = g.balances();
    {
        let mut residual = bal.clone();
        for &(u, v) in ext {
            residual[u] -= 1;
            residual[v] += 1;
        }
        assert!(residual.iter().all(|&r| r == 0), "the extension must balance the graph");
    }
    let mut pending_start: Vec<i64> = bal.iter().map(|&b| b.max(0)).collect();

    // Outgoing extension arcs per vertex, targets ascending, consumed in order.
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in ext {
        out[u].push(v);
    }
    for targets in &mut out {
        targets.sort_unstable();
        targets.reverse();
    }

    let mut paths = Vec::new();
    let mut cycles = Vec::new();
    loop {
        let start = (0..n)
            .find(|&v| pending_start[v] > 0 && !out[v].is_empty())
            .or_else(|| (0..n).find(|&v| !out[v].is_empty()));
        let Some(start) = start else { break };
        let open = pending_start[start] > 0;
        if open {
            pending_start[start] -= 1;
        }
        let mut walk = vec![start];
        let mut at = start;
        while let Some(next) = out[at].pop() {
            walk.push(next);
            at = next;
        }
        // A walk from a surplus vertex gets stuck at a vertex still owed an
        // ending; one from a balanced start returns to it.
        if open {
            paths.push(unthread(walk, &mut cycles));
        } else {
            let closed = unthread(walk, &mut cycles);
            cycles.push(closed);
        }
    }
    paths.extend(cycles);
    paths
}
