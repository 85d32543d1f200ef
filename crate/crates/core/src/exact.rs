//! Exact algorithm for original split instances (no marked edges), measured
//! in the vertex count rather than the budget.

use crate::graph::{Instance, Vertex, VerifyMode};
use crate::split::{brute_small_clique, solve_split_rec, split_partition};
use crate::stats::{E2Branching, MinOutcome, SolveOutcome, Stats};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("graph is not a split graph")]
    NotSplit,
    #[error("instance has marked edges")]
    Marked,
}

const SMALL_CLIQUE: usize = 15;
const FIXED_SUBSET: usize = 10;

fn solve_exact_rec(inst: &mut Instance, stats: &mut Stats, depth: usize) -> Option<BTreeSet<Vertex>> {
    stats.enter_node(depth);
    if inst.k < 0 {
        return None;
    }
    let Some((iside, kside)) = split_partition(&inst.graph) else {
        stats.violation("exact split: graph stopped being split".into());
        return None;
    };

    // Step E1: small cliques are solved directly.
    if kside.len() <= SMALL_CLIQUE {
        stats.fire("exact_e1");
        let (min, witness) = brute_small_clique(inst, &kside);
        return if (min as i64) <= inst.k {
            Some(witness.into_iter().collect())
        } else {
            None
        };
    }

    // Step E2: a terminal inside the clique; branch on it or on a fixed
    // 10-subset / the remainder of the clique.
    if let Some(&t) = kside.iter().find(|&&v| inst.is_terminal(v)) {
        stats.fire("exact_e2");
        let rest: Vec<Vertex> = kside.iter().copied().filter(|&v| v != t).collect();
        let kp = rest[..FIXED_SUBSET].to_vec();
        let kpp = rest[FIXED_SUBSET..].to_vec();
        stats.e2_branchings.push(E2Branching {
            clique_size: kside.len(),
            raw_deletions: [1, kp.len(), kpp.len()],
            accounted: [1, 7, kside.len() - 8],
        });
        for (idx, part) in [vec![t], kp, kpp].into_iter().enumerate() {
            let cp = inst.delete_vertices(&part, part.len() as i64);
            if let Some(mut sol) = solve_exact_rec(inst, stats, depth + 1) {
                inst.undo_to(cp);
                sol.extend(part.iter().copied());
                if idx > 0 && !sol.contains(&t) {
                    let absent = kside
                        .iter()
                        .filter(|&&v| v != t && !sol.contains(&v))
                        .count();
                    if absent > 1 {
                        stats.violation(format!(
                            "exact_e2: {absent} clique vertices outside a t-free solution"
                        ));
                    }
                }
                return Some(sol);
            }
            inst.undo_to(cp);
        }
        return None;
    }

    // Step E3: with no terminal left in the clique, either side may be small
    // enough to take wholesale.
    if (iside.len() as i64) <= inst.k {
        stats.fire("exact_e3");
        return Some(iside.into_iter().collect());
    }
    if (kside.len() as i64) <= inst.k {
        stats.fire("exact_e3");
        return Some(kside.into_iter().collect());
    }

    // Step E4: both sides exceed k, so n > 2k; the parameterized solver
    // finishes the job.
    stats.fire("exact_e4");
    solve_split_rec(inst, stats, depth + 1)
}

/// Decision solver for original split instances (no marked edges).
pub fn solve_split_exact(inst: &Instance) -> Result<SolveOutcome, ExactError> {
    if inst.graph.num_marked() != 0 {
        return Err(ExactError::Marked);
    }
    if split_partition(&inst.graph).is_none() {
        return Err(ExactError::NotSplit);
    }
    let mut stats = Stats::new();
    let mut work = inst.clone();
    work.forget_history();
    let sol = solve_exact_rec(&mut work, &mut stats, 0);
    Ok(match sol {
        Some(s) => {
            let sol: Vec<Vertex> = s.into_iter().collect();
            if sol.len() as i64 > inst.k {
                stats.violation(format!(
                    "solution size {} exceeds budget {}",
                    sol.len(),
                    inst.k
                ));
            }
            match inst.verify_solution(&sol, VerifyMode::Triangle) {
                Ok(true) => {}
                _ => stats.violation("returned solution failed verification".into()),
            }
            debug_assert!(stats.violations.is_empty(), "{:?}", stats.violations);
            SolveOutcome::yes(sol, stats)
        }
        None => SolveOutcome::no(stats),
    })
}

/// Smallest solution size up to `cap`, with a witness.
pub fn solve_split_exact_min(inst: &Instance, cap: i64) -> Result<(MinOutcome, Stats), ExactError> {
    if inst.graph.num_marked() != 0 {
        return Err(ExactError::Marked);
    }
    if split_partition(&inst.graph).is_none() {
        return Err(ExactError::NotSplit);
    }
    let mut stats = Stats::new();
    for k in 0..=cap.max(0) {
        let mut work = inst.clone();
        work.k = k;
        work.forget_history();
        if let Some(sol) = solve_exact_rec(&mut work, &mut stats, 0) {
            let sol: Vec<Vertex> = sol.into_iter().collect();
            return Ok((Some((sol.len(), sol)), stats));
        }
    }
    Ok((None, stats))
}
