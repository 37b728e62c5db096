//! Seeded random instance generators for sweeps and benches.
//!
//! Every generator is deterministic in its seed, so failing cases can be
//! replayed by seed alone.

use crate::cbm::{CbmInstance, Side};
use crate::graph::{EeInstance, Multigraph, WeightMatrix};
use crate::ssc::SscInstance;
use crate::weight::{Weight, INF, MAX_FINITE};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Random extension instance with `n` vertices, `c` weakly connected
/// components, and total positive imbalance `b` (clipped to zero when every
/// component is a single vertex). Finite weights are uniform up to `wmax`
/// with an infinite sprinkling; the budget is drawn generously enough that
/// both answers occur.
pub fn gen_random_ee(n: usize, c: usize, b: usize, wmax: Weight, seed: u64) -> EeInstance {
    assert!(c >= 1 && c <= n, "need one nonempty group per component");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sizes = vec![1usize; c];
    for _ in 0..n - c {
        sizes[rng.gen_range(0..c)] += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut groups = Vec::with_capacity(c);
    let mut at = 0;
    for &s in &sizes {
        groups.push(order[at..at + s].to_vec());
        at += s;
    }

    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut bal = vec![0i64; n];
    let push_cycle = |cycle: &[usize], arcs: &mut Vec<(usize, usize)>, bal: &mut [i64]| {
        for idx in 0..cycle.len() {
            let (u, v) = (cycle[idx], cycle[(idx + 1) % cycle.len()]);
            arcs.push((u, v));
            bal[u] -= 1;
            bal[v] += 1;
        }
    };
    for g in &groups {
        if g.len() < 2 {
            continue;
        }
        let mut cycle = g.clone();
        cycle.shuffle(&mut rng);
        push_cycle(&cycle, &mut arcs, &mut bal);
        for _ in 0..rng.gen_range(0..=2) {
            let mut sub = g.clone();
            sub.shuffle(&mut rng);
            sub.truncate(rng.gen_range(2..=g.len()));
            push_cycle(&sub, &mut arcs, &mut bal);
        }
    }

    let roomy: Vec<&Vec<usize>> = groups.iter().filter(|g| g.len() >= 2).collect();
    let b = if roomy.is_empty() { 0 } else { b };
    for _ in 0..b {
        let g = roomy[rng.gen_range(0..roomy.len())];
        // An arc from a sated vertex to a needy one raises the total
        // positive imbalance by exactly one; such a pair always exists
        // because group balances sum to zero.
        let pairs: Vec<(usize, usize)> = g
            .iter()
            .flat_map(|&u| g.iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| u != v && bal[u] <= 0 && bal[v] >= 0)
            .collect();
        let (u, v) = pairs[rng.gen_range(0..pairs.len())];
        arcs.push((u, v));
        bal[u] -= 1;
        bal[v] += 1;
    }

    let graph = Multigraph::with_arcs(n, arcs).unwrap();
    let weights = WeightMatrix::from_fn(n, |_, _| {
        if rng.gen_ratio(1, 8) {
            INF
        } else {
            rng.gen_range(0..=wmax)
        }
    });
    let ceiling = wmax.saturating_mul(b as Weight + c as Weight + 1).min(MAX_FINITE);
    let omega_max = rng.gen_range(0..=ceiling);
    EeInstance::new(graph, weights, omega_max).unwrap()
}

/// Random conjoining matching instance whose left side has maximum degree
/// two: a few alternating cycles and paths, sometimes a pendant hooked onto
/// a right vertex, with small weights and a modest budget.
pub fn gen_random_cbm_degree2(seed: u64) -> CbmInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut side: Vec<Side> = Vec::new();
    let mut edges: Vec<(usize, usize, Weight)> = Vec::new();
    let mut units: Vec<(usize, usize)> = Vec::new();
    let weight = |rng: &mut ChaCha8Rng| {
        if rng.gen_ratio(1, 10) {
            INF
        } else {
            rng.gen_range(0..=10)
        }
    };

    for _ in 0..rng.gen_range(1..=2) {
        let len = if rng.gen_bool(0.5) { 4 } else { 6 };
        let base = side.len();
        for p in 0..len {
            side.push(if p % 2 == 0 { Side::Left } else { Side::Right });
        }
        for p in 0..len {
            let w = weight(&mut rng);
            edges.push((base + p, base + (p + 1) % len, w));
        }
        units.push((base, len));
    }
    if side.len() + 4 <= 14 && rng.gen_bool(0.5) {
        let len = if rng.gen_bool(0.5) { 2 } else { 4 };
        let base = side.len();
        for p in 0..len {
            side.push(if p % 2 == 0 { Side::Left } else { Side::Right });
        }
        for p in 0..len - 1 {
            let w = weight(&mut rng);
            edges.push((base + p, base + p + 1, w));
        }
        units.push((base, len));
    }
    if side.len() + 1 <= 14 && rng.gen_bool(0.4) {
        // A pendant keeps left degrees small only when hooked on the right.
        let rights: Vec<usize> =
            (0..side.len()).filter(|&v| side[v] == Side::Right).collect();
        let r = rights[rng.gen_range(0..rights.len())];
        let nl = side.len();
        side.push(Side::Left);
        let w = weight(&mut rng);
        edges.push((nl, r, w));
        units.push((nl, 1));
    }

    let num_cells = rng.gen_range(1..=4);
    let mut cell_of = vec![0usize; side.len()];
    for &(base, len) in &units {
        if rng.gen_bool(0.5) {
            let cell = rng.gen_range(0..num_cells);
            for v in base..base + len {
                cell_of[v] = cell;
            }
        } else {
            for v in base..base + len {
                cell_of[v] = rng.gen_range(0..num_cells);
            }
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..num_cells)
        .flat_map(|i| (i + 1..num_cells).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(&mut rng);
    pairs.truncate(rng.gen_range(0..=3.min(pairs.len())));

    let omega_max = rng.gen_range(0..=40);
    CbmInstance::new(side, edges, cell_of, num_cells, pairs, omega_max).unwrap()
}

/// Random cover instance with `k` switches of `l` positions over `c`
/// colors; positions are small random multisets, occasionally empty.
pub fn gen_random_ssc(c: usize, k: usize, l: usize, seed: u64) -> SscInstance {
    assert!(c >= 1, "at least one color");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let switches = (0..k)
        .map(|_| {
            (0..l)
                .map(|_| {
                    if rng.gen_ratio(1, 10) {
                        return Vec::new();
                    }
                    let size = rng.gen_range(1..=c);
                    (0..size).map(|_| rng.gen_range(0..c)).collect()
                })
                .collect()
        })
        .collect();
    SscInstance::new(c, switches).unwrap()
}
