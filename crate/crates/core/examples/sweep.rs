//! Large randomized cross-check sweep (not part of the test suite).
use sfvs_core::gen::*;
use sfvs_core::graph::VerifyMode;
use sfvs_core::oracle::oracle_solve;
use sfvs_core::split::solve_split;
use sfvs_core::exact::solve_split_exact;
use sfvs_core::whole::solve_chordal;

fn main() {
    let mut bad = 0u64;
    let mut total = 0u64;
    for seed in 0..4000u64 {
        let inst = gen_chordal(&ChordalParams {
            n: 3 + (seed % 15) as usize,
            extra_edge_density: 0.15 + 0.1 * ((seed % 8) as f64),
            terminal_prob: 0.15 + 0.1 * ((seed % 7) as f64),
            mark_prob: 0.1 * ((seed % 6) as f64),
            k: (seed % 8) as i64,
            seed: 90_000 + seed,
        })
        .unwrap();
        total += 1;
        let out = solve_chordal(&inst).unwrap();
        let want = oracle_solve(&inst, inst.k.max(0) as usize).feasible_within(inst.k);
        if out.answer != want || !out.stats.violations.is_empty() {
            bad += 1;
            eprintln!("CHORDAL seed {seed}: solver={} oracle={} violations={:?}\n{}",
                out.answer, want, out.stats.violations, inst.to_text());
        }
        if let Some(sol) = &out.solution {
            assert!(inst.verify_solution(sol, VerifyMode::Triangle).unwrap());
            assert!(inst.verify_solution(sol, VerifyMode::Cycle).unwrap());
        }
    }
    for seed in 0..4000u64 {
        let inst = gen_split(&SplitParams {
            n_clique: 2 + (seed % 10) as usize,
            n_indep: 1 + (seed % 9) as usize,
            edge_prob: 0.2 + 0.1 * ((seed % 7) as f64),
            terminal_prob: 0.2 + 0.1 * ((seed % 6) as f64),
            mark_prob: 0.12 * ((seed % 7) as f64),
            k: (seed % 8) as i64,
            seed: 80_000 + seed,
        })
        .unwrap();
        total += 1;
        let want = oracle_solve(&inst, inst.k.max(0) as usize).feasible_within(inst.k);
        let out = solve_split(&inst).unwrap();
        if out.answer != want || !out.stats.violations.is_empty() {
            bad += 1;
            eprintln!("SPLIT seed {seed}: solver={} oracle={} violations={:?}\n{}",
                out.answer, want, out.stats.violations, inst.to_text());
        }
        let w = solve_chordal(&inst).unwrap();
        if w.answer != want {
            bad += 1;
            eprintln!("WHOLE-on-split seed {seed}: {} vs {}\n{}", w.answer, want, inst.to_text());
        }
        if inst.graph.num_marked() == 0 {
            let e = solve_split_exact(&inst).unwrap();
            if e.answer != want || !e.stats.violations.is_empty() {
                bad += 1;
                eprintln!("EXACT seed {seed}: {} vs {} violations={:?}\n{}", e.answer, want, e.stats.violations, inst.to_text());
            }
        }
    }
    for seed in 0..1500u64 {
        for kind in [StructuredKind::Fish, StructuredKind::Separator1, StructuredKind::Separator2, StructuredKind::InnerTerminal] {
            let inst = gen_structured(kind, 2 + (seed % 9) as usize, 40_000 + seed).unwrap();
            total += 1;
            let out = solve_chordal(&inst).unwrap();
            let want = oracle_solve(&inst, inst.k.max(0) as usize).feasible_within(inst.k);
            if out.answer != want || !out.stats.violations.is_empty() {
                bad += 1;
                eprintln!("{kind:?} seed {seed}: solver={} oracle={} violations={:?}\n{}",
                    out.answer, want, out.stats.violations, inst.to_text());
            }
        }
    }
    // larger instances, minimize mode against the oracle minimum
    for seed in 0..800u64 {
        let inst = gen_chordal(&ChordalParams {
            n: 16 + (seed % 9) as usize, // up to 24
            extra_edge_density: 0.3 + 0.1 * ((seed % 5) as f64),
            terminal_prob: 0.35,
            mark_prob: 0.1 * ((seed % 4) as f64),
            k: 0,
            seed: 70_000 + seed,
        })
        .unwrap();
        total += 1;
        let cap = 6i64;
        let (min, stats) = sfvs_core::whole::solve_chordal_min(&inst, cap).unwrap();
        let want = oracle_solve(&inst, cap as usize).size;
        if min.as_ref().map(|(s, _)| *s) != want || !stats.violations.is_empty() {
            bad += 1;
            eprintln!("MIN seed {seed}: solver={:?} oracle={want:?} violations={:?}\n{}",
                min.map(|(s, _)| s), stats.violations, inst.to_text());
        }
    }
    println!("sweep done: {total} instances, {bad} disagreements");
    assert_eq!(bad, 0);
}
