//! Maximum bipartite matching and the Dulmage-Mendelsohn decomposition,
//! plus the reduction it drives on split instances.

use crate::graph::{Instance, Vertex};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// A bipartite graph over original vertex ids; edges only cross sides.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    pub a: Vec<Vertex>,
    pub b: Vec<Vertex>,
    /// adjacency from a-index to b-indices, ascending
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(a: Vec<Vertex>, b: Vec<Vertex>, edges: &[(Vertex, Vertex)]) -> Self {
        let bpos: BTreeMap<Vertex, usize> = b.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let apos: BTreeMap<Vertex, usize> = a.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj = vec![Vec::new(); a.len()];
        for &(x, y) in edges {
            let (ai, bi) = match (apos.get(&x), bpos.get(&y)) {
                (Some(&ai), Some(&bi)) => (ai, bi),
                _ => (
                    *apos.get(&y).expect("edge endpoint on side A"),
                    *bpos.get(&x).expect("edge endpoint on side B"),
                ),
            };
            adj[ai].push(bi);
        }
        for l in adj.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        BipartiteGraph { a, b, adj }
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum()
    }
}

/// Maximum-cardinality matching by Hopcroft-Karp layered augmentation with
/// deterministic vertex order. Returns (a-vertex, b-vertex) pairs.
pub fn max_matching(f: &BipartiteGraph) -> Vec<(Vertex, Vertex)> {
    let (na, nb) = (f.a.len(), f.b.len());
    const NIL: usize = usize::MAX;
    let mut pair_a = vec![NIL; na];
    let mut pair_b = vec![NIL; nb];
    let mut dist = vec![usize::MAX; na];

    loop {
        // BFS layers from unmatched A vertices.
        let mut q = VecDeque::new();
        for u in 0..na {
            if pair_a[u] == NIL {
                dist[u] = 0;
                q.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = q.pop_front() {
            for &v in &f.adj[u] {
                match pair_b[v] {
                    NIL => found = true,
                    w if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        q.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            break;
        }
        fn dfs(
            u: usize,
            f: &BipartiteGraph,
            pair_a: &mut [usize],
            pair_b: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for &v in &f.adj[u] {
                let w = pair_b[v];
                if w == NIL || (dist[w] == dist[u] + 1 && dfs(w, f, pair_a, pair_b, dist)) {
                    pair_a[u] = v;
                    pair_b[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..na {
            if pair_a[u] == NIL {
                dfs(u, f, &mut pair_a, &mut pair_b, &mut dist);
            }
        }
    }

    (0..na)
        .filter(|&u| pair_a[u] != NIL)
        .map(|u| (f.a[u], f.b[pair_a[u]]))
        .collect()
}

/// The (C, H, R) partition of a bipartite graph's vertices: C is independent
/// with H as its neighborhood, H is the intersection of all minimum vertex
/// covers, and the rest R carries a perfect matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmResult {
    pub c: BTreeSet<Vertex>,
    pub h: BTreeSet<Vertex>,
    pub r: BTreeSet<Vertex>,
    pub matching: Vec<(Vertex, Vertex)>,
}

/// Computes the decomposition from a maximum matching by alternating
/// reachability from the unmatched vertices of each side.
pub fn dm_decompose(f: &BipartiteGraph) -> DmResult {
    let matching = max_matching(f);
    let (na, nb) = (f.a.len(), f.b.len());
    const NIL: usize = usize::MAX;
    let mut pair_a = vec![NIL; na];
    let mut pair_b = vec![NIL; nb];
    let apos: BTreeMap<Vertex, usize> = f.a.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let bpos: BTreeMap<Vertex, usize> = f.b.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    for &(x, y) in &matching {
        let (ai, bi) = (apos[&x], bpos[&y]);
        pair_a[ai] = bi;
        pair_b[bi] = ai;
    }
    let mut badj = vec![Vec::new(); nb];
    for (u, l) in f.adj.iter().enumerate() {
        for &v in l {
            badj[v].push(u);
        }
    }

    // Alternating reachability from unmatched A: non-matching A->B edges,
    // matching B->A edges.
    let mut seen_a = vec![false; na];
    let mut seen_b = vec![false; nb];
    let mut stack: Vec<usize> = (0..na).filter(|&u| pair_a[u] == NIL).collect();
    for &u in &stack {
        seen_a[u] = true;
    }
    while let Some(u) = stack.pop() {
        for &v in &f.adj[u] {
            if pair_a[u] == v || seen_b[v] {
                continue;
            }
            seen_b[v] = true;
            let w = pair_b[v];
            if w != NIL && !seen_a[w] {
                seen_a[w] = true;
                stack.push(w);
            }
        }
    }
    let (da_a, da_b) = (seen_a, seen_b);

    // Mirror image from unmatched B.
    let mut seen_a = vec![false; na];
    let mut seen_b = vec![false; nb];
    let mut stack: Vec<usize> = (0..nb).filter(|&v| pair_b[v] == NIL).collect();
    for &v in &stack {
        seen_b[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in &badj[v] {
            if pair_b[v] == u || seen_a[u] {
                continue;
            }
            seen_a[u] = true;
            let w = pair_a[u];
            if w != NIL && !seen_b[w] {
                seen_b[w] = true;
                stack.push(w);
            }
        }
    }
    let (db_a, db_b) = (seen_a, seen_b);

    let mut c = BTreeSet::new();
    let mut h = BTreeSet::new();
    let mut r = BTreeSet::new();
    for u in 0..na {
        if da_a[u] {
            c.insert(f.a[u]);
        } else if db_a[u] {
            h.insert(f.a[u]);
        } else {
            r.insert(f.a[u]);
        }
    }
    for v in 0..nb {
        if db_b[v] {
            c.insert(f.b[v]);
        } else if da_b[v] {
            h.insert(f.b[v]);
        } else {
            r.insert(f.b[v]);
        }
    }
    DmResult { c, h, r, matching }
}

/// The auxiliary bipartite subgraph of a split instance: A holds the
/// independent-side vertices with at least one edge and only marked edges,
/// B is their neighborhood, and the edges are the marked edges between them.
#[derive(Debug, Clone)]
pub struct AuxiliaryBipartite {
    pub a: BTreeSet<Vertex>,
    pub b: BTreeSet<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

pub fn build_auxiliary(inst: &Instance, independent_side: &BTreeSet<Vertex>) -> AuxiliaryBipartite {
    let mut a = BTreeSet::new();
    for &v in independent_side {
        if !inst.graph.is_live(v) {
            continue;
        }
        let deg = inst.graph.degree(v);
        if deg > 0 && inst.graph.marked_neighbors(v).len() == deg {
            a.insert(v);
        }
    }
    let mut b = BTreeSet::new();
    let mut edges = Vec::new();
    for &x in &a {
        for y in inst.graph.neighbors(x) {
            b.insert(y);
            edges.push((x, y));
        }
    }
    debug_assert!(edges.iter().all(|&(x, y)| inst.graph.is_marked(x, y)));
    AuxiliaryBipartite { a, b, edges }
}

impl AuxiliaryBipartite {
    pub fn to_bipartite(&self) -> BipartiteGraph {
        BipartiteGraph::new(
            self.a.iter().copied().collect(),
            self.b.iter().copied().collect(),
            &self.edges,
        )
    }
}

/// One application of the DM reduction: delete Â = A ∩ (R ∪ C) and
/// B̂ = B ∩ (R ∪ H) when both are non-empty and decrease k by |B̂|.
/// Returns the deleted pair when it fired.
pub fn dm_reduce_step(
    inst: &mut Instance,
    independent_side: &BTreeSet<Vertex>,
) -> Option<(Vec<Vertex>, Vec<Vertex>)> {
    let aux = build_auxiliary(inst, independent_side);
    if aux.a.is_empty() {
        return None;
    }
    let dm = dm_decompose(&aux.to_bipartite());
    let a_hat: Vec<Vertex> = aux
        .a
        .iter()
        .copied()
        .filter(|v| dm.r.contains(v) || dm.c.contains(v))
        .collect();
    let b_hat: Vec<Vertex> = aux
        .b
        .iter()
        .copied()
        .filter(|v| dm.r.contains(v) || dm.h.contains(v))
        .collect();
    if a_hat.is_empty() || b_hat.is_empty() {
        debug_assert!(a_hat.is_empty() && b_hat.is_empty());
        return None;
    }
    let dec = b_hat.len() as i64;
    inst.delete_vertices(&a_hat, 0);
    inst.delete_vertices(&b_hat, dec);
    Some((a_hat, b_hat))
}

/// The DM reduction applied to fixpoint. Returns whether anything changed
/// and the vertices committed into the solution (the deleted B̂ sets).
pub fn dm_reduce(inst: &mut Instance, independent_side: &BTreeSet<Vertex>) -> (bool, Vec<Vertex>) {
    let mut changed = false;
    let mut committed = Vec::new();
    while let Some((_, b_hat)) = dm_reduce_step(inst, independent_side) {
        committed.extend(b_hat);
        changed = true;
    }
    (changed, committed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::SplitMix64;

    fn bg(a: &[Vertex], b: &[Vertex], edges: &[(Vertex, Vertex)]) -> BipartiteGraph {
        BipartiteGraph::new(a.to_vec(), b.to_vec(), edges)
    }

    /// The 14-vertex example graph: side u1..u7 (ids 1..7), side v1..v7
    /// (ids 11..17), 18 edges.
    fn example_graph() -> BipartiteGraph {
        let a: Vec<Vertex> = (1..=7).collect();
        let b: Vec<Vertex> = (11..=17).collect();
        let edges = vec![
            (1, 11),
            (2, 12),
            (3, 13),
            (4, 15),
            (5, 16),
            (6, 14),
            (1, 12),
            (2, 11),
            (2, 14),
            (3, 14),
            (4, 12),
            (4, 13),
            (5, 13),
            (4, 14),
            (7, 14),
            (4, 16),
            (5, 15),
            (5, 17),
        ];
        bg(&a, &b, &edges)
    }

    #[test]
    fn matching_single_edge() {
        let f = bg(&[0], &[5], &[(0, 5)]);
        assert_eq!(max_matching(&f), vec![(0, 5)]);
    }

    #[test]
    fn matching_k33_perfect() {
        let f = bg(
            &[0, 1, 2],
            &[3, 4, 5],
            &[
                (0, 3),
                (0, 4),
                (0, 5),
                (1, 3),
                (1, 4),
                (1, 5),
                (2, 3),
                (2, 4),
                (2, 5),
            ],
        );
        assert_eq!(max_matching(&f).len(), 3);
    }

    #[test]
    fn matching_example_graph_size_six() {
        assert_eq!(max_matching(&example_graph()).len(), 6);
    }

    #[test]
    fn dm_example_graph() {
        let dm = dm_decompose(&example_graph());
        let set = |xs: &[Vertex]| xs.iter().copied().collect::<BTreeSet<_>>();
        assert_eq!(dm.c, set(&[6, 7, 15, 16, 17]));
        assert_eq!(dm.h, set(&[4, 5, 14]));
        assert_eq!(dm.r, set(&[1, 2, 3, 11, 12, 13]));
    }

    #[test]
    fn dm_single_edge_all_r() {
        let dm = dm_decompose(&bg(&[0], &[5], &[(0, 5)]));
        assert!(dm.c.is_empty());
        assert!(dm.h.is_empty());
        assert_eq!(dm.r.len(), 2);
    }

    #[test]
    fn dm_star_two_leaves() {
        // a1, a2 - b: the unique minimum vertex cover is {b}.
        let dm = dm_decompose(&bg(&[1, 2], &[7], &[(1, 7), (2, 7)]));
        assert_eq!(dm.c.iter().copied().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(dm.h.iter().copied().collect::<Vec<_>>(), vec![7]);
        assert!(dm.r.is_empty());
    }

    /// A split instance whose auxiliary subgraph loses two terminal/clique
    /// pairs once a particular clique vertex is deleted. Terminals 0..=5,
    /// clique 6..=11 (vertex 10 is the one to delete).
    fn aux_example() -> crate::graph::Instance {
        let mut edges = Vec::new();
        for u in 6..12 {
            for v in u + 1..12 {
                edges.push((u, v));
            }
        }
        let marked = [
            (0, 6),
            (0, 7),
            (0, 8),
            (0, 9),
            (1, 8),
            (1, 10),
            (2, 8),
            (2, 9),
            (2, 10),
            (4, 11),
        ];
        let unmarked = [(3, 9), (3, 10), (4, 9), (5, 10), (5, 11)];
        edges.extend(marked);
        edges.extend(unmarked);
        crate::graph::Instance::new(12, &edges, &[0, 1, 2, 3, 4, 5], &marked, 5).unwrap()
    }

    #[test]
    fn auxiliary_sides_from_example() {
        let inst = aux_example();
        let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
        let aux = build_auxiliary(&inst, &tset);
        assert_eq!(aux.a.iter().copied().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(
            aux.b.iter().copied().collect::<Vec<_>>(),
            vec![6, 7, 8, 9, 10]
        );
    }

    #[test]
    fn auxiliary_empty_without_marks() {
        let inst = crate::graph::Instance::new(3, &[(0, 1), (0, 2)], &[1, 2], &[], 1).unwrap();
        let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
        let aux = build_auxiliary(&inst, &tset);
        assert!(aux.a.is_empty());
        assert!(aux.b.is_empty());
    }

    #[test]
    fn terminal_with_unmarked_edge_stays_out() {
        let inst =
            crate::graph::Instance::new(3, &[(0, 1), (0, 2), (1, 2)], &[0], &[(0, 1)], 1).unwrap();
        let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
        let aux = build_auxiliary(&inst, &tset);
        assert!(aux.a.is_empty());
    }

    #[test]
    fn reduce_fires_after_deleting_clique_vertex() {
        // Deleting vertex 10 strands terminals 1 and 2 on marked edges only;
        // the first application removes them with their cover {8, 9}. That in
        // turn strands terminal 4 on its marked edge, so the fixpoint loop
        // fires once more.
        let mut inst = aux_example();
        inst.remove_vertex(10);
        let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
        let (a_hat, b_hat) = dm_reduce_step(&mut inst, &tset).unwrap();
        assert_eq!(a_hat, vec![1, 2]);
        assert_eq!(b_hat, vec![8, 9]);
        assert_eq!(inst.k, 3);
        let (a_hat, b_hat) = dm_reduce_step(&mut inst, &tset).unwrap();
        assert_eq!(a_hat, vec![4]);
        assert_eq!(b_hat, vec![11]);
        assert!(dm_reduce_step(&mut inst, &tset).is_none());
        assert!(inst.graph.is_live(0));
    }

    #[test]
    fn reduce_noop_when_a_empty() {
        let mut inst =
            crate::graph::Instance::new(3, &[(0, 1), (0, 2), (1, 2)], &[0], &[], 1).unwrap();
        let before = inst.state_string();
        let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
        let (changed, committed) = dm_reduce(&mut inst, &tset);
        assert!(!changed);
        assert!(committed.is_empty());
        assert_eq!(before, inst.state_string());
    }

    #[test]
    fn reduce_star_deletes_everything() {
        // star a1, a2 - b, all edges marked: the cover {b} goes in, k drops 1
        let mut inst =
            crate::graph::Instance::new(3, &[(0, 2), (1, 2)], &[0, 1], &[(0, 2), (1, 2)], 4)
                .unwrap();
        let tset: BTreeSet<Vertex> = inst.terminals().into_iter().collect();
        let (changed, committed) = dm_reduce(&mut inst, &tset);
        assert!(changed);
        assert_eq!(committed, vec![2]);
        assert_eq!(inst.k, 3);
        assert_eq!(inst.graph.num_live(), 0);
    }

    /// All minimum vertex covers by exhaustive search.
    fn min_vertex_covers(f: &BipartiteGraph) -> Vec<BTreeSet<Vertex>> {
        let verts: Vec<Vertex> = f.a.iter().chain(f.b.iter()).copied().collect();
        let n = verts.len();
        let mut edges = Vec::new();
        for (i, l) in f.adj.iter().enumerate() {
            for &j in l {
                edges.push((f.a[i], f.b[j]));
            }
        }
        let mut best = usize::MAX;
        let mut covers: Vec<BTreeSet<Vertex>> = Vec::new();
        for mask in 0u32..(1 << n) {
            let chosen: BTreeSet<Vertex> = (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .map(|i| verts[i])
                .collect();
            if edges
                .iter()
                .all(|&(x, y)| chosen.contains(&x) || chosen.contains(&y))
            {
                match chosen.len().cmp(&best) {
                    std::cmp::Ordering::Less => {
                        best = chosen.len();
                        covers = vec![chosen];
                    }
                    std::cmp::Ordering::Equal => covers.push(chosen),
                    _ => {}
                }
            }
        }
        covers
    }

    #[test]
    fn reduction_preserves_minimum_modulo_decrement() {
        use crate::gen::{gen_split, SplitParams};
        use crate::oracle::oracle_solve;
        use crate::split::split_partition;
        for seed in 0..60u64 {
            let inst = gen_split(&SplitParams {
                n_clique: 3 + (seed % 4) as usize,
                n_indep: 3 + (seed % 5) as usize,
                edge_prob: 0.5,
                terminal_prob: 0.5,
                mark_prob: 0.55,
                k: 8,
                seed: 600 + seed,
            })
            .unwrap();
            let n = inst.graph.num_live();
            let before = oracle_solve(&inst, n).size.unwrap();
            let mut reduced = inst.clone();
            let (iside, _) = split_partition(&inst.graph).unwrap();
            let iside: BTreeSet<Vertex> = iside.into_iter().collect();
            let (_, committed) = dm_reduce(&mut reduced, &iside);
            let after = oracle_solve(&reduced, n).size.unwrap();
            assert_eq!(before, after + committed.len(), "seed {seed}");
            // once the reduction is exhausted, more marked-only vertices on
            // the independent side than budget means infeasible
            let aux = build_auxiliary(&reduced, &iside);
            if aux.a.len() > 3 {
                assert!(
                    oracle_solve(&reduced, 3).size.is_none(),
                    "seed {seed}: |A| = {} demands more than 3 deletions",
                    aux.a.len()
                );
            }
        }
    }

    #[test]
    fn dm_matches_definition_on_random_graphs() {
        let mut rng = SplitMix64::new(0xDEAD);
        for trial in 0..120 {
            let na = 1 + rng.gen_range(6);
            let nb = 1 + rng.gen_range(6);
            let a: Vec<Vertex> = (0..na).collect();
            let b: Vec<Vertex> = (100..100 + nb).collect();
            let mut edges = Vec::new();
            for &x in &a {
                for &y in &b {
                    if rng.gen_bool(0.4) {
                        edges.push((x, y));
                    }
                }
            }
            let f = bg(&a, &b, &edges);
            let dm = dm_decompose(&f);

            // definition clause 1: C independent, H = N(C)
            for &(x, y) in &edges {
                assert!(!(dm.c.contains(&x) && dm.c.contains(&y)), "trial {trial}");
            }
            let mut nc: BTreeSet<Vertex> = BTreeSet::new();
            for &(x, y) in &edges {
                if dm.c.contains(&x) {
                    nc.insert(y);
                }
                if dm.c.contains(&y) {
                    nc.insert(x);
                }
            }
            assert_eq!(nc, dm.h, "trial {trial}: H must equal N(C)");

            // clause 3: H is the intersection of all minimum vertex covers
            let covers = min_vertex_covers(&f);
            let mut inter = covers[0].clone();
            for c in &covers[1..] {
                inter = inter.intersection(c).copied().collect();
            }
            assert_eq!(inter, dm.h, "trial {trial}");

            // clause 2: F[R] has a perfect matching; clause 4 via the count
            // |M| = |H| + |R|/2
            let ra: Vec<Vertex> = a.iter().copied().filter(|v| dm.r.contains(v)).collect();
            let rb: Vec<Vertex> = b.iter().copied().filter(|v| dm.r.contains(v)).collect();
            let redges: Vec<(Vertex, Vertex)> = edges
                .iter()
                .copied()
                .filter(|&(x, y)| dm.r.contains(&x) && dm.r.contains(&y))
                .collect();
            assert_eq!(ra.len(), rb.len(), "trial {trial}");
            let rmatch = max_matching(&bg(&ra, &rb, &redges));
            assert_eq!(rmatch.len(), ra.len(), "trial {trial}: F[R] perfect matching");
            assert_eq!(
                dm.matching.len(),
                dm.h.len() + dm.r.len() / 2,
                "trial {trial}"
            );
            // clause 4: the witness saturates R ∪ H
            let saturated: BTreeSet<Vertex> = dm
                .matching
                .iter()
                .flat_map(|&(x, y)| [x, y])
                .collect();
            assert!(dm.r.union(&dm.h).all(|v| saturated.contains(v)));
        }
    }
}
