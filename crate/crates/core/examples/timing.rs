//! Timing sanity on larger instances (not part of the test suite).
use sfvs_core::gen::*;
use sfvs_core::whole::solve_chordal;
use std::time::Instant;

fn main() {
    for (n, k) in [(30, 8), (40, 10), (60, 12), (80, 14)] {
        let mut worst = std::time::Duration::ZERO;
        let mut nodes = 0u64;
        for seed in 0..10u64 {
            let inst = gen_chordal(&ChordalParams {
                n,
                extra_edge_density: 0.5,
                terminal_prob: 0.35,
                mark_prob: 0.2,
                k,
                seed: 31_000 + seed,
            })
            .unwrap();
            let t = Instant::now();
            let out = solve_chordal(&inst).unwrap();
            worst = worst.max(t.elapsed());
            nodes = nodes.max(out.stats.nodes);
            assert!(out.stats.violations.is_empty());
        }
        println!("n={n} k={k}: worst {worst:?}, max nodes {nodes}");
    }
}
