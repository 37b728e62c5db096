//! Set switching cover and extension problems in the plane.
//!
//! A set switching cover instance asks to pick one position per switch so
//! that the chosen positions jointly name every color. The module provides
//! an exact solver, an or-composition that folds many instances of common
//! shape into one, and a translation into two dimensional Eulerian
//! extension, where extension arcs may only run downward in both
//! coordinates.

use crate::graph::{EeInstance, Multigraph, WeightMatrix};
use crate::weight::{Weight, INF};
use std::collections::BTreeSet;

/// A set switching cover instance. Every switch holds positions; a
/// position is a sorted multiset of colors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SscInstance {
    num_colors: usize,
    switches: Vec<Vec<Vec<usize>>>,
}

impl SscInstance {
    pub fn new(num_colors: usize, switches: Vec<Vec<Vec<usize>>>) -> Result<Self, &'static str> {
        let mut switches = switches;
        for s in &mut switches {
            for p in s.iter_mut() {
                if p.iter().any(|&x| x >= num_colors) {
                    return Err("color out of range");
                }
                p.sort_unstable();
            }
        }
        Ok(SscInstance { num_colors, switches })
    }

    /// Instance whose answer is yes: one switch, one position
    /// naming the only color.
    pub fn canonical_yes() -> Self {
        SscInstance::new(1, vec![vec![vec![0]]]).unwrap()
    }

    /// Instance whose answer is no: one switch whose only position names
    /// nothing, leaving the only color uncovered.
    pub fn canonical_no() -> Self {
        SscInstance::new(1, vec![vec![vec![]]]).unwrap()
    }

    pub fn num_colors(&self) -> usize {
        self.num_colors
    }

    pub fn switches(&self) -> &[Vec<Vec<usize>>] {
        &self.switches
    }
}

/// Exhaustive solver. Returns one chosen position index per switch, or
/// `None` if no choice covers every color.
pub fn solve_ssc(inst: &SscInstance) -> Option<Vec<usize>> {
    let c = inst.num_colors;
    assert!(c <= 64, "color bitsets hold at most 64 colors");
    let full: u64 = if c == 64 { u64::MAX } else { (1u64 << c) - 1 };
    let masks: Vec<Vec<u64>> = inst
        .switches
        .iter()
        .map(|s| s.iter().map(|p| p.iter().fold(0u64, |m, &x| m | 1 << x)).collect())
        .collect();
    if masks.iter().any(|s| s.is_empty()) {
        return None;
    }
    // Colors no position ever names can never be covered.
    let mut reach = vec![0u64; masks.len() + 1];
    for at in (0..masks.len()).rev() {
        reach[at] = reach[at + 1] | masks[at].iter().fold(0, |a, &m| a | m);
    }
    if reach[0] & full != full {
        return None;
    }

    fn go(masks: &[Vec<u64>], reach: &[u64], at: usize, covered: u64, full: u64, choice: &mut Vec<usize>) -> bool {
        if covered | reach[at] != full {
            return false;
        }
        if at == masks.len() {
            return true;
        }
        let mut seen = BTreeSet::new();
        for (idx, &m) in masks[at].iter().enumerate() {
            if !seen.insert(m) {
                continue;
            }
            choice.push(idx);
            if go(masks, reach, at + 1, covered | m, full, choice) {
                return true;
            }
            choice.pop();
        }
        false
    }

    let mut choice = Vec::new();
    go(&masks, &reach, 0, 0, full, &mut choice).then_some(choice)
}

/// Checks a position choice against the instance.
pub fn verify_ssc_choice(inst: &SscInstance, choice: &[usize]) -> bool {
    if choice.len() != inst.switches.len() {
        return false;
    }
    let mut covered = vec![false; inst.num_colors];
    for (s, &idx) in inst.switches.iter().zip(choice) {
        let Some(pos) = s.get(idx) else {
            return false;
        };
        for &x in pos {
            covered[x] = true;
        }
    }
    covered.iter().all(|&b| b)
}

/// Or-composition: folds instances of common color count and switch count
/// into one instance that is solvable exactly if some input is.
///
/// Every position is tagged with fresh colors encoding its instance's index
/// bits; selector switches demand the complementary bit pattern, so all
/// switches must draw from one instance. Inputs too numerous for the tag
/// alphabet are solved outright and replaced by a canonical answer.
pub fn compose_ssc(instances: &[SscInstance]) -> SscInstance {
    assert!(!instances.is_empty(), "nothing to compose");
    let c = instances[0].num_colors;
    let k = instances[0].switches.len();
    assert!(
        instances.iter().all(|i| i.num_colors == c && i.switches.len() == k),
        "instances must share their shape"
    );
    let m = instances.len();
    if m == 1 {
        return instances[0].clone();
    }
    if c * k < usize::BITS as usize && m >= 1 << (c * k) {
        return if instances.iter().any(|i| solve_ssc(i).is_some()) {
            SscInstance::canonical_yes()
        } else {
            SscInstance::canonical_no()
        };
    }
    let bits = usize::BITS as usize - (m - 1).leading_zeros() as usize;
    let tag = |alpha: usize, beta: usize, x: usize| c + (alpha * bits + beta) * 2 + x;

    let mut switches = Vec::with_capacity(k + bits);
    for alpha in 0..k {
        let mut positions = Vec::new();
        for (i, inst) in instances.iter().enumerate() {
            for pos in &inst.switches[alpha] {
                let mut p = pos.clone();
                p.extend((0..bits).map(|beta| tag(alpha, beta, i >> beta & 1)));
                positions.push(p);
            }
        }
        switches.push(positions);
    }
    for beta in 0..bits {
        switches.push(vec![
            (0..k).map(|alpha| tag(alpha, beta, 0)).collect(),
            (0..k).map(|alpha| tag(alpha, beta, 1)).collect(),
        ]);
    }

    let out = SscInstance::new(c + 2 * k * bits, switches).unwrap();
    debug_assert!(out.switches.len() <= k + c * k);
    debug_assert!(out.num_colors <= c + 2 * c * k * k);
    out
}

/// An extension question over points in the plane: extension arcs may only
/// run from a point to one dominated in both coordinates, and at most
/// `max_arcs` of them may be used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoDeeInstance {
    points: Vec<(i64, i64)>,
    arcs: Vec<(usize, usize)>,
    pub max_arcs: usize,
}

impl TwoDeeInstance {
    pub fn new(
        points: Vec<(i64, i64)>,
        mut arcs: Vec<(usize, usize)>,
        max_arcs: usize,
    ) -> Result<Self, &'static str> {
        if points.is_empty() {
            return Err("empty point set");
        }
        for &(u, v) in &arcs {
            if u >= points.len() || v >= points.len() {
                return Err("arc out of range");
            }
            if u == v {
                return Err("self loop");
            }
        }
        // Arc order carries no meaning; canonical storage keeps equality
        // and rendering stable.
        arcs.sort_unstable();
        Ok(TwoDeeInstance { points, arcs, max_arcs })
    }

    /// Instance whose answer is yes: a single point is Eulerian on its own.
    pub fn canonical_yes() -> Self {
        TwoDeeInstance::new(vec![(0, 0)], vec![], 0).unwrap()
    }

    /// Instance whose answer is no: the repair arc would have to climb.
    pub fn canonical_no() -> Self {
        TwoDeeInstance::new(vec![(0, 0), (1, 1)], vec![(1, 0)], 2).unwrap()
    }

    pub fn points(&self) -> &[(i64, i64)] {
        &self.points
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// True if an extension arc from `u` to `v` is allowed: `u` dominates
    /// `v` in both coordinates.
    pub fn allows(&self, u: usize, v: usize) -> bool {
        let (ux, uy) = self.points[u];
        let (vx, vy) = self.points[v];
        ux >= vx && uy >= vy
    }
}

/// Maps a planar extension question to a plain extension question: allowed
/// arcs cost one, the budget is the arc allowance.
pub fn twodee_to_ee(td: &TwoDeeInstance) -> EeInstance {
    let n = td.points.len();
    let graph = Multigraph::with_arcs(n, td.arcs.clone()).unwrap();
    let weights =
        WeightMatrix::from_fn(n, |u, v| if u != v && td.allows(u, v) { 1 } else { INF });
    EeInstance::new(graph, weights, td.max_arcs as Weight).unwrap()
}

/// Maps a cover question to a planar extension question.
///
/// One ladder cycle carries a surplus and deficit vertex pair per switch;
/// each position becomes a descending run of one point per color slot, and
/// every color's points are tied into their own cycle component. Repairing
/// switch `i` means running from its surplus down one position's points to
/// its deficit, which touches exactly the color components that position
/// names. The arc allowance admits one such run per switch and nothing
/// more, so the instance is solvable exactly if the cover is.
pub fn ssc_to_2dee(inst: &SscInstance) -> TwoDeeInstance {
    if inst.switches.iter().any(|s| s.is_empty()) {
        // A switch without positions admits no choice at all.
        return TwoDeeInstance::canonical_no();
    }
    if inst.num_colors == 0 {
        return TwoDeeInstance::canonical_yes();
    }
    // Positions naming nothing are never a useful choice; switches offering
    // only those contribute nothing and fold away.
    let mut switches: Vec<Vec<Vec<usize>>> = inst
        .switches
        .iter()
        .filter(|s| s.iter().any(|p| !p.is_empty()))
        .map(|s| s.iter().filter(|p| !p.is_empty()).cloned().collect())
        .collect();
    if switches.is_empty() {
        return TwoDeeInstance::canonical_no();
    }
    let c = inst.num_colors;
    let mut used = vec![false; c];
    for s in &switches {
        for p in s {
            for &x in p {
                used[x] = true;
            }
        }
    }
    if used.iter().any(|&b| !b) {
        return TwoDeeInstance::canonical_no();
    }
    // Normal shape: every position names exactly `c` colors and every
    // switch offers the same number of positions. Multiset semantics make
    // deduplication and repetition free.
    for s in &mut switches {
        for p in s.iter_mut() {
            p.dedup();
            while p.len() < c {
                let filler = p[0];
                p.push(filler);
            }
            p.sort_unstable();
        }
    }
    let l = switches.iter().map(|s| s.len()).max().unwrap();
    for s in &mut switches {
        while s.len() < l {
            s.push(s[0].clone());
        }
    }
    let k = switches.len();

    let (ci, ki, li) = (c as i64, k as i64, l as i64);
    let v1 = |i: i64| (8 * ci * i * li, 8 * ci * (ki - i + 1) * li);
    let v2 = |i: i64| {
        let (x, y) = v1(i);
        (x - 4 * ci * li, y - 4 * ci * li)
    };
    let w = |i: i64, j: i64, m: i64| {
        let (x, y) = v2(i);
        (x + 2 * ci * (2 * j - 1) - 2 * (m - 1), y + 4 * ci * li - 2 * ci * (2 * j - 2) - 2 * (m - 1))
    };

    // Ids: surplus ladder rail 0..=k, deficit rail k+1..=2k+1, then one
    // point per (switch, position, slot).
    let v1_id = |i: usize| i;
    let v2_id = |i: usize| k + 1 + (i - 1);
    let w_id = |i: usize, j: usize, m: usize| 2 * (k + 1) + ((i - 1) * l + (j - 1)) * c + (m - 1);

    let mut points = Vec::with_capacity(2 * (k + 1) + k * l * c);
    for i in 0..=k {
        points.push(v1(i as i64));
    }
    for i in 1..=k + 1 {
        points.push(v2(i as i64));
    }
    for i in 1..=k {
        for j in 1..=l {
            for m in 1..=c {
                points.push(w(i as i64, j as i64, m as i64));
            }
        }
    }
    debug_assert_eq!(points.iter().collect::<BTreeSet<_>>().len(), points.len());

    let mut arcs = Vec::new();
    for i in 1..=k {
        arcs.push((v1_id(i - 1), v1_id(i)));
        arcs.push((v2_id(i + 1), v2_id(i)));
    }
    arcs.push((v1_id(k), v2_id(k + 1)));
    arcs.push((v2_id(1), v1_id(0)));
    for i in 1..=k {
        arcs.push((v2_id(i), v1_id(i)));
    }
    for color in 0..c {
        let class: Vec<usize> = (1..=k)
            .flat_map(|i| {
                let s = &switches[i - 1];
                (1..=l).flat_map(move |j| {
                    (1..=c).filter(move |&m| s[j - 1][m - 1] == color).map(move |m| w_id(i, j, m))
                })
            })
            .collect();
        if class.len() >= 2 {
            for idx in 0..class.len() {
                arcs.push((class[idx], class[(idx + 1) % class.len()]));
            }
        }
    }

    TwoDeeInstance::new(points, arcs, (c + 1) * k).unwrap()
}
