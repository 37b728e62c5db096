//! Throwaway timing and equivalence probe for the acceptance sweep shapes.

use std::time::Instant;

use eulex_core::advice::enumerate_min_connecting_advices;
use eulex_core::gen::gen_random_ee;
use eulex_core::graph::components;
use eulex_core::preprocess::preprocess;
use eulex_core::reductions::kernelize_eeca;
use eulex_core::solver::{oracle_ee_with_cap, solve_ee, solve_eeca};

fn main() {
    // Criterion 1 shape: solver vs oracle over the full sweep.
    let t = Instant::now();
    let mut yes = 0;
    for i in 0..520u64 {
        let inst = gen_random_ee(4 + (i % 4) as usize, 1 + (i % 3) as usize, (i % 5) as usize, 10, i);
        let solved = solve_ee(&inst).map(|(w, _)| w);
        let oracle = oracle_ee_with_cap(&inst, usize::MAX).map(|(w, _)| w);
        assert_eq!(solved, oracle, "sweep {i}");
        yes += solved.is_some() as usize;
    }
    println!("criterion1 sweep: {yes}/520 yes in {:?}", t.elapsed());

    // Criterion 2 shape: per-advice solve_eeca over the sweep.
    let t = Instant::now();
    for i in 0..520u64 {
        let inst = gen_random_ee(4 + (i % 4) as usize, 1 + (i % 3) as usize, (i % 5) as usize, 10, i);
        let (pre, _) = preprocess(&inst);
        let c = components(pre.num_vertices(), pre.arcs()).count;
        let advices =
            if c == 1 { vec![Vec::new()] } else { enumerate_min_connecting_advices(c) };
        let best = advices
            .iter()
            .filter_map(|a| solve_eeca(&inst, a).map(|(w, _)| w))
            .min();
        let direct = solve_ee(&inst).map(|(w, _)| w);
        assert_eq!(best, direct, "advice sweep {i}");
    }
    println!("criterion2 sweep done in {:?}", t.elapsed());

    // Criterion 7 shape: kernel decision equivalence per (instance, advice).
    let t = Instant::now();
    let mut kernel_max_n = 0usize;
    let mut worst_ratio = 0.0f64;
    for i in 0..520u64 {
        let inst = gen_random_ee(4 + (i % 4) as usize, 1 + (i % 3) as usize, (i % 5) as usize, 10, i);
        let (pre, _) = preprocess(&inst);
        let c = components(pre.num_vertices(), pre.arcs()).count;
        let b: i64 = (0..pre.num_vertices()).map(|v| pre.balance(v).max(0) as i64).sum();
        let advices =
            if c == 1 { vec![Vec::new()] } else { enumerate_min_connecting_advices(c) };
        for advice in &advices {
            let (kernel, kadvice) = kernelize_eeca(&inst, advice);
            kernel_max_n = kernel_max_n.max(kernel.num_vertices());
            if b > 0 {
                let ratio = kernel.num_vertices() as f64 / (b * b * c as i64) as f64;
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    println!(
                        "  ratio {ratio:.3} at i={i} (n={} b={b} c={c})",
                        kernel.num_vertices()
                    );
                }
            }
            let direct = solve_eeca(&inst, advice);
            let kerneled = solve_eeca(&kernel, &kadvice);
            assert_eq!(direct.is_some(), kerneled.is_some(), "kernel sweep {i}");
        }
    }
    println!(
        "criterion7 sweep done in {:?}, kernel_max_n={kernel_max_n}, worst b^2*c ratio {worst_ratio:.3}",
        t.elapsed()
    );
}
