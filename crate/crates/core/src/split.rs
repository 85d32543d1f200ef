//! The measure-driven branching algorithm for good split instances and the
//! wrapper reducing arbitrary split instances to good ones.

use crate::chordal::maximal_cliques;
use crate::dm::{build_auxiliary, dm_reduce};
use crate::graph::{Graph, Instance, Vertex, VerifyMode};
use crate::stats::{GoodAlgRun, MinOutcome, SolveOutcome, Stats};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("graph is not a split graph")]
    NotSplit,
    #[error("instance is not good: {0}")]
    NotGood(String),
}

/// Brute-force threshold: cliques of size up to 2C are enumerated directly,
/// and the three-way branching vector (1, C, C) stays below the target
/// branching factor.
const WRAPPER_C: usize = 3;

/// The measure k - (2/3)|A| held in exact thirds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Measure {
    pub thirds: i64,
}

impl Measure {
    pub fn as_f64(self) -> f64 {
        self.thirds as f64 / 3.0
    }
}

pub fn measure(inst: &Instance) -> Measure {
    let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
    let aux = build_auxiliary(inst, &tset);
    Measure {
        thirds: 3 * inst.k - 2 * aux.a.len() as i64,
    }
}

fn measure_thirds(inst: &Instance) -> i64 {
    measure(inst).thirds
}

/// Finds a split partition (independent side, clique side) or None when the
/// graph is not split. Some maximal clique always works as the clique side.
pub fn split_partition(g: &Graph) -> Option<(Vec<Vertex>, Vec<Vertex>)> {
    if g.num_live() == 0 {
        return Some((Vec::new(), Vec::new()));
    }
    let cliques = maximal_cliques(g).ok()?;
    for q in &cliques {
        let rest: Vec<Vertex> = g.live_vertices().filter(|v| !q.contains(v)).collect();
        let independent = rest
            .iter()
            .enumerate()
            .all(|(i, &a)| rest[i + 1..].iter().all(|&b| !g.has_edge(a, b)));
        if independent {
            return Some((rest, q.iter().copied().collect()));
        }
    }
    None
}

/// Checks the three good-instance properties: (T, V \ T) is a split partition
/// with T independent, every marked edge joins a terminal to a non-terminal,
/// and the DM reduction is inapplicable.
pub fn is_good(inst: &Instance) -> Result<(), String> {
    let terms = inst.terminals();
    let nonterms = inst.non_terminals();
    for (i, &a) in terms.iter().enumerate() {
        for &b in &terms[i + 1..] {
            if inst.graph.has_edge(a, b) {
                return Err(format!("terminals {a} and {b} are adjacent"));
            }
        }
    }
    for (i, &a) in nonterms.iter().enumerate() {
        for &b in &nonterms[i + 1..] {
            if !inst.graph.has_edge(a, b) {
                return Err(format!("non-terminals {a} and {b} are not adjacent"));
            }
        }
    }
    for (u, v) in inst.graph.marked_edges() {
        if inst.is_terminal(u) == inst.is_terminal(v) {
            return Err(format!("marked edge {u}-{v} does not join both sides"));
        }
    }
    let tset: BTreeSet<Vertex> = terms.into_iter().collect();
    let mut probe = inst.clone();
    let (changed, _) = dm_reduce(&mut probe, &tset);
    if changed {
        return Err("DM reduction applies".into());
    }
    Ok(())
}

/// Commits a terminal out of the solution: its marked neighbors go in, k
/// drops accordingly, the terminal itself stays. Returns the committed
/// vertices; undo via the instance journal.
pub fn hide_terminal(inst: &mut Instance, t: Vertex) -> Vec<Vertex> {
    debug_assert!(inst.is_terminal(t));
    let nm = inst.graph.marked_neighbors(t);
    inst.delete_vertices(&nm, nm.len() as i64);
    nm
}

/// Commits a non-terminal out of the solution: its marked neighbors go in,
/// each T-triangle through it leaves a marked edge behind, then the vertex is
/// removed. Returns the committed vertices.
pub fn hide_nonterminal(inst: &mut Instance, v: Vertex) -> Vec<Vertex> {
    debug_assert!(!inst.is_terminal(v));
    let nm = inst.graph.marked_neighbors(v);
    inst.delete_vertices(&nm, nm.len() as i64);
    for (a, b) in inst.t_triangles_through(v) {
        inst.mark_edge(a, b);
    }
    inst.remove_vertex(v);
    nm
}

/// Solution-assembly events, applied newest-first when a yes-leaf bubbles up.
enum SolEvent {
    Commit(Vec<Vertex>),
    /// A deleted duplicate terminal: if its surviving twin ends up in the
    /// solution, swap the twin for a shared neighbor.
    TwinSwap { twin: Vertex, replacement: Vertex },
}

fn assemble(base: BTreeSet<Vertex>, events: &[SolEvent]) -> BTreeSet<Vertex> {
    let mut sol = base;
    for e in events.iter().rev() {
        match e {
            SolEvent::Commit(c) => sol.extend(c.iter().copied()),
            SolEvent::TwinSwap { twin, replacement } => {
                if sol.remove(twin) {
                    sol.insert(*replacement);
                }
            }
        }
    }
    sol
}

fn dm_to_fixpoint(inst: &mut Instance) -> Vec<Vertex> {
    let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
    dm_reduce(inst, &tset).1
}

/// Instrumentation around a reduction: measure must not increase.
fn note_reduction_mu(stats: &mut Stats, rule: &str, mu_before: i64, mu_after: i64) {
    if mu_after > mu_before {
        stats.violation(format!(
            "{rule}: measure increased from {mu_before}/3 to {mu_after}/3"
        ));
    }
}

fn note_branch_mu(stats: &mut Stats, rule: &str, delta_thirds: i64, min_thirds: i64) {
    if delta_thirds < min_thirds {
        stats.violation(format!(
            "{rule}: measure dropped {delta_thirds}/3 < required {min_thirds}/3"
        ));
    }
}

fn note_goodness(stats: &mut Stats, rule: &str, inst: &Instance) {
    if let Err(e) = is_good(inst) {
        stats.violation(format!("{rule}: resulting instance not good: {e}"));
    }
}

/// Conditions the measure analysis of the two branching steps relies on;
/// they must hold whenever the earlier steps are exhausted.
fn note_pre_branch_invariants(stats: &mut Stats, inst: &Instance, a: &BTreeSet<Vertex>) {
    let terms = inst.terminals();
    for &t in &terms {
        if inst.graph.degree(t) < 2 {
            stats.violation(format!("pre-branch: terminal {t} has degree < 2"));
        }
    }
    for &v in &inst.non_terminals() {
        let td = inst
            .graph
            .neighbors(v)
            .filter(|&u| inst.is_terminal(u))
            .count();
        if td < 2 {
            stats.violation(format!("pre-branch: non-terminal {v} has {td} terminal neighbors"));
        }
    }
    let two_deg: Vec<Vertex> = terms
        .iter()
        .copied()
        .filter(|&t| inst.graph.degree(t) == 2 && !a.contains(&t))
        .collect();
    for &t in &two_deg {
        if inst.graph.marked_neighbors(t).len() == 1 {
            stats.violation(format!("pre-branch: 2-degree terminal {t} with one marked edge"));
        }
    }
    for (i, &t) in two_deg.iter().enumerate() {
        if !inst.graph.marked_neighbors(t).is_empty() {
            continue;
        }
        for &u in &two_deg[i + 1..] {
            if inst.graph.marked_neighbors(u).is_empty()
                && inst.graph.neighbors(t).collect::<Vec<_>>()
                    == inst.graph.neighbors(u).collect::<Vec<_>>()
            {
                stats.violation(format!(
                    "pre-branch: markless 2-degree terminals {t} and {u} share neighbors"
                ));
            }
        }
    }
}

/// The branching algorithm for good instances. Restores the instance before
/// returning; the result is a fully assembled solution for the entry state.
pub(crate) fn good_alg_rec(
    inst: &mut Instance,
    stats: &mut Stats,
    depth: usize,
) -> Option<BTreeSet<Vertex>> {
    stats.enter_node(depth);
    let cp_entry = inst.checkpoint();
    let mut events: Vec<SolEvent> = Vec::new();
    let result = 'main: loop {
        let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
        let aux = build_auxiliary(inst, &tset);
        let mu = 3 * inst.k - 2 * aux.a.len() as i64;

        // Step 1: measure-based answers.
        if (aux.a.len() as i64) > inst.k || mu < 0 {
            stats.fire("split_step1_no");
            break 'main None;
        }
        if (tset.len() as i64) <= inst.k {
            stats.fire("split_step1_yes");
            break 'main Some(assemble(tset, &events));
        }

        // Step 2: vertices in no T-triangle and no marked edge.
        let unconstrained: Vec<Vertex> = inst
            .graph
            .live_vertices()
            .filter(|&v| !inst.in_t_triangle(v) && !inst.in_marked_edge(v))
            .collect();
        if !unconstrained.is_empty() {
            stats.fire("split_step2");
            inst.delete_vertices(&unconstrained, 0);
            let commits = dm_to_fixpoint(inst);
            note_reduction_mu(stats, "split_step2", mu, measure_thirds(inst));
            note_goodness(stats, "split_step2", inst);
            events.push(SolEvent::Commit(commits));
            continue 'main;
        }

        // Step 3: non-terminal with exactly one terminal neighbor is hidden.
        let step3 = inst
            .non_terminals()
            .into_iter()
            .find(|&v| inst.graph.neighbors(v).filter(|&u| inst.is_terminal(u)).count() == 1);
        if let Some(v) = step3 {
            stats.fire("split_step3");
            let mut commits = hide_nonterminal(inst, v);
            commits.extend(dm_to_fixpoint(inst));
            note_reduction_mu(stats, "split_step3", mu, measure_thirds(inst));
            note_goodness(stats, "split_step3", inst);
            events.push(SolEvent::Commit(commits));
            continue 'main;
        }

        // Step 4, first case: a 2-degree terminal outside A with exactly one
        // marked edge is hidden.
        let step4a = tset
            .iter()
            .copied()
            .find(|&t| {
                !aux.a.contains(&t)
                    && inst.graph.degree(t) == 2
                    && inst.graph.marked_neighbors(t).len() == 1
            });
        if let Some(t) = step4a {
            stats.fire("split_step4_hide");
            let mut commits = hide_terminal(inst, t);
            commits.extend(dm_to_fixpoint(inst));
            note_reduction_mu(stats, "split_step4_hide", mu, measure_thirds(inst));
            note_goodness(stats, "split_step4_hide", inst);
            events.push(SolEvent::Commit(commits));
            continue 'main;
        }

        // Step 4, second case: markless 2-degree twins outside A; one goes.
        let mut step4b = None;
        let two_deg: Vec<Vertex> = tset
            .iter()
            .copied()
            .filter(|&t| {
                !aux.a.contains(&t)
                    && inst.graph.degree(t) == 2
                    && inst.graph.marked_neighbors(t).is_empty()
            })
            .collect();
        'twins: for (i, &t) in two_deg.iter().enumerate() {
            for &u in &two_deg[i + 1..] {
                if inst.graph.neighbors(t).collect::<Vec<_>>()
                    == inst.graph.neighbors(u).collect::<Vec<_>>()
                {
                    step4b = Some((t, u));
                    break 'twins;
                }
            }
        }
        if let Some((t, twin)) = step4b {
            stats.fire("split_step4_twin");
            let replacement = inst
                .graph
                .neighbors(twin)
                .next()
                .expect("2-degree twin has neighbors");
            inst.delete_vertices(&[t], 0);
            // chronological order: the swap belongs to the deletion, the
            // reduction commits come after
            events.push(SolEvent::TwinSwap { twin, replacement });
            let commits = dm_to_fixpoint(inst);
            note_reduction_mu(stats, "split_step4_twin", mu, measure_thirds(inst));
            note_goodness(stats, "split_step4_twin", inst);
            events.push(SolEvent::Commit(commits));
            continue 'main;
        }

        // Step 5: non-terminal in B with exactly one marked and one unmarked
        // terminal neighbor; branch on hiding it or hiding the marked one.
        let step5 = inst.non_terminals().into_iter().find_map(|v| {
            if !aux.b.contains(&v) {
                return None;
            }
            let nm = inst.graph.marked_neighbors(v);
            let tnbrs = inst
                .graph
                .neighbors(v)
                .filter(|&u| inst.is_terminal(u))
                .count();
            if nm.len() == 1 && tnbrs == 2 {
                Some((v, nm[0]))
            } else {
                None
            }
        });
        if let Some((v, t)) = step5 {
            note_pre_branch_invariants(stats, inst, &aux.a);
            stats.fire("split_step5");
            let cp = inst.checkpoint();
            let mut commits = hide_nonterminal(inst, v);
            commits.extend(dm_to_fixpoint(inst));
            note_branch_mu(stats, "split_step5/hide-v", mu - measure_thirds(inst), 3);
            note_goodness(stats, "split_step5", inst);
            if let Some(sub) = good_alg_rec(inst, stats, depth + 1) {
                inst.undo_to(cp);
                let mut sol = sub;
                sol.extend(commits);
                break 'main Some(assemble(sol, &events));
            }
            inst.undo_to(cp);
            let mut commits = hide_terminal(inst, t);
            commits.extend(dm_to_fixpoint(inst));
            note_branch_mu(stats, "split_step5/hide-t", mu - measure_thirds(inst), 4);
            note_goodness(stats, "split_step5", inst);
            if let Some(sub) = good_alg_rec(inst, stats, depth + 1) {
                inst.undo_to(cp);
                let mut sol = sub;
                sol.extend(commits);
                break 'main Some(assemble(sol, &events));
            }
            inst.undo_to(cp);
            break 'main None;
        }

        // Step 6: non-terminal with an unmarked edge to a terminal; branch on
        // deleting or hiding it.
        let step6 = inst.non_terminals().into_iter().find(|&v| {
            inst.graph
                .neighbors(v)
                .any(|u| inst.is_terminal(u) && !inst.graph.is_marked(u, v))
        });
        if let Some(v) = step6 {
            note_pre_branch_invariants(stats, inst, &aux.a);
            stats.fire("split_step6");
            let cp = inst.checkpoint();
            inst.delete_vertices(&[v], 1);
            let mut commits = vec![v];
            commits.extend(dm_to_fixpoint(inst));
            note_branch_mu(stats, "split_step6/delete-v", mu - measure_thirds(inst), 3);
            note_goodness(stats, "split_step6", inst);
            if let Some(sub) = good_alg_rec(inst, stats, depth + 1) {
                inst.undo_to(cp);
                let mut sol = sub;
                sol.extend(commits);
                break 'main Some(assemble(sol, &events));
            }
            inst.undo_to(cp);
            let mut commits = hide_nonterminal(inst, v);
            commits.extend(dm_to_fixpoint(inst));
            note_branch_mu(stats, "split_step6/hide-v", mu - measure_thirds(inst), 4);
            note_goodness(stats, "split_step6", inst);
            if let Some(sub) = good_alg_rec(inst, stats, depth + 1) {
                inst.undo_to(cp);
                let mut sol = sub;
                sol.extend(commits);
                break 'main Some(assemble(sol, &events));
            }
            inst.undo_to(cp);
            break 'main None;
        }

        // With step 6 exhausted every terminal-side edge is marked, so T = A
        // and step 1 must have answered.
        stats.violation("good_alg: reached the end of the step list".into());
        break 'main None;
    };
    inst.undo_to(cp_entry);
    result
}

/// Solves a good instance, recording the per-run node count against its
/// entry size and measure.
pub fn good_alg(inst: &Instance) -> Result<SolveOutcome, SplitError> {
    is_good(inst).map_err(SplitError::NotGood)?;
    let mut stats = Stats::new();
    let mut work = inst.clone();
    let n_entry = work.graph.num_live();
    let mu_entry = measure_thirds(&work);
    let nodes_before = stats.nodes;
    let sol = good_alg_rec(&mut work, &mut stats, 0);
    stats.good_alg_runs.push(GoodAlgRun {
        n_entry,
        mu_thirds_entry: mu_entry,
        nodes: stats.nodes - nodes_before,
    });
    Ok(finish_outcome(inst, sol, stats))
}

fn finish_outcome(
    original: &Instance,
    sol: Option<BTreeSet<Vertex>>,
    mut stats: Stats,
) -> SolveOutcome {
    match sol {
        Some(s) => {
            let sol: Vec<Vertex> = s.into_iter().collect();
            if sol.len() as i64 > original.k {
                stats.violation(format!(
                    "solution size {} exceeds budget {}",
                    sol.len(),
                    original.k
                ));
            }
            match original.verify_solution(&sol, VerifyMode::Triangle) {
                Ok(true) => {}
                _ => stats.violation("returned solution failed verification".into()),
            }
            debug_assert!(stats.violations.is_empty(), "{:?}", stats.violations);
            SolveOutcome::yes(sol, stats)
        }
        None => SolveOutcome::no(stats),
    }
}

/// Exact minimum over the clique side by subset enumeration: for each subset
/// committed into the solution, the uncovered constraints force a unique set
/// of independent-side vertices.
pub(crate) fn brute_small_clique(inst: &Instance, kside: &[Vertex]) -> (usize, Vec<Vertex>) {
    let kpos: std::collections::BTreeMap<Vertex, usize> =
        kside.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // constraint = (mask over kside, independent member if any)
    let mut constraints: Vec<(u32, Option<Vertex>)> = Vec::new();
    for (a, b, c) in inst.t_triangles() {
        let mut mask = 0u32;
        let mut outside = None;
        for x in [a, b, c] {
            match kpos.get(&x) {
                Some(&i) => mask |= 1 << i,
                None => outside = Some(x),
            }
        }
        constraints.push((mask, outside));
    }
    for (a, b) in inst.graph.marked_edges() {
        let mut mask = 0u32;
        let mut outside = None;
        for x in [a, b] {
            match kpos.get(&x) {
                Some(&i) => mask |= 1 << i,
                None => outside = Some(x),
            }
        }
        constraints.push((mask, outside));
    }
    let mut best: Option<(usize, Vec<Vertex>)> = None;
    for p in 0u32..(1 << kside.len()) {
        let chosen = p.count_ones() as usize;
        if let Some((b, _)) = &best {
            if chosen >= *b {
                continue;
            }
        }
        let mut forced: BTreeSet<Vertex> = BTreeSet::new();
        let mut feasible = true;
        for &(mask, outside) in &constraints {
            if mask & p != 0 {
                continue;
            }
            match outside {
                Some(x) => {
                    forced.insert(x);
                }
                None => {
                    feasible = false;
                    break;
                }
            }
        }
        if !feasible {
            continue;
        }
        let size = chosen + forced.len();
        if best.as_ref().is_none_or(|(b, _)| size < *b) {
            let mut sol: Vec<Vertex> = kside
                .iter()
                .enumerate()
                .filter(|(i, _)| p & (1 << i) != 0)
                .map(|(_, &v)| v)
                .collect();
            sol.extend(forced);
            best = Some((size, sol));
        }
    }
    best.expect("taking the whole clique side is always feasible")
}

pub(crate) fn solve_split_rec(
    inst: &mut Instance,
    stats: &mut Stats,
    depth: usize,
) -> Option<BTreeSet<Vertex>> {
    stats.enter_node(depth);
    if inst.k < 0 {
        return None;
    }
    let Some((_iside, kside)) = split_partition(&inst.graph) else {
        stats.violation("solve_split: graph stopped being split".into());
        return None;
    };

    if kside.len() <= 2 * WRAPPER_C {
        stats.fire("split_wrap_brute");
        let (min, witness) = brute_small_clique(inst, &kside);
        return if (min as i64) <= inst.k {
            Some(witness.into_iter().collect())
        } else {
            None
        };
    }

    if let Some(&t) = kside.iter().find(|&&v| inst.is_terminal(v)) {
        // A terminal inside the clique: either it goes into the solution or
        // all but one clique vertex does; split the rest in two halves.
        stats.fire("split_wrap_terminal");
        let rest: Vec<Vertex> = kside.iter().copied().filter(|&v| v != t).collect();
        let half = rest.len().div_ceil(2);
        let parts: [Vec<Vertex>; 3] = [
            vec![t],
            rest[..half].to_vec(),
            rest[half..].to_vec(),
        ];
        for part in parts {
            let cp = inst.delete_vertices(&part, part.len() as i64);
            if let Some(mut sol) = solve_split_rec(inst, stats, depth + 1) {
                inst.undo_to(cp);
                sol.extend(part);
                return Some(sol);
            }
            inst.undo_to(cp);
        }
        return None;
    }

    // No terminal in the clique side: make the instance good and hand over.
    stats.fire("split_wrap_goodify");
    let cp = inst.checkpoint();
    let nonterms = inst.non_terminals();
    for (i, &a) in nonterms.iter().enumerate() {
        for &b in &nonterms[i + 1..] {
            if !inst.graph.has_edge(a, b) {
                inst.add_edge(a, b);
            }
        }
    }
    let marked_nn: Vec<(Vertex, Vertex)> = inst
        .graph
        .marked_edges()
        .filter(|&(u, v)| !inst.is_terminal(u) && !inst.is_terminal(v))
        .collect();
    let mut new_terms: Vec<(Vertex, Vertex)> = Vec::new();
    for (u, v) in marked_nn {
        inst.unmark_edge(u, v);
        let t_new = inst.add_vertex(true);
        inst.add_edge(t_new, u);
        inst.add_edge(t_new, v);
        new_terms.push((t_new, u));
    }
    let commits = dm_to_fixpoint(inst);
    note_goodness(stats, "split_wrap_goodify", inst);
    let n_entry = inst.graph.num_live();
    let mu_entry = measure_thirds(inst);
    let nodes_before = stats.nodes;
    let sub = good_alg_rec(inst, stats, depth + 1);
    stats.good_alg_runs.push(GoodAlgRun {
        n_entry,
        mu_thirds_entry: mu_entry,
        nodes: stats.nodes - nodes_before,
    });
    let result = sub.map(|mut sol| {
        for &(t_new, u) in &new_terms {
            if sol.remove(&t_new) {
                sol.insert(u);
            }
        }
        sol.extend(commits);
        sol
    });
    inst.undo_to(cp);
    result
}

/// Decision solver for split instances.
pub fn solve_split(inst: &Instance) -> Result<SolveOutcome, SplitError> {
    if split_partition(&inst.graph).is_none() {
        return Err(SplitError::NotSplit);
    }
    let mut stats = Stats::new();
    let mut work = inst.clone();
    let sol = solve_split_rec(&mut work, &mut stats, 0);
    Ok(finish_outcome(inst, sol, stats))
}

/// Smallest solution size up to `cap`, with a witness.
pub fn solve_split_min(inst: &Instance, cap: i64) -> Result<(MinOutcome, Stats), SplitError> {
    if split_partition(&inst.graph).is_none() {
        return Err(SplitError::NotSplit);
    }
    let mut stats = Stats::new();
    for k in 0..=cap.max(0) {
        let mut work = inst.clone();
        work.k = k;
        work.forget_history();
        if let Some(sol) = solve_split_rec(&mut work, &mut stats, 0) {
            let sol: Vec<Vertex> = sol.into_iter().collect();
            return Ok((Some((sol.len(), sol)), stats));
        }
    }
    Ok((None, stats))
}
