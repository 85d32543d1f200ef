//! Chordality recognition, clique trees and simplicial structure.

use crate::graph::{Graph, Vertex};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliqueTreeError {
    #[error("graph is not chordal")]
    NotChordal,
    #[error("graph is not connected")]
    NotConnected,
}

/// Lexicographic BFS over live vertices with lowest-id tie-breaking.
/// Returns the visit order.
pub fn lex_bfs(g: &Graph) -> Vec<Vertex> {
    let live: Vec<Vertex> = g.live_vertices().collect();
    let n = live.len();
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; g.slots()];
    // Labels as sorted lists of visit positions, compared lexicographically.
    let mut label: Vec<Vec<usize>> = vec![Vec::new(); g.slots()];
    for i in 0..n {
        // Largest label wins; ascending scan keeps the lowest id on ties.
        let mut best: Option<Vertex> = None;
        for &v in &live {
            if visited[v] {
                continue;
            }
            match best {
                None => best = Some(v),
                Some(b) if label[v] > label[b] => best = Some(v),
                _ => {}
            }
        }
        let u = best.expect("live vertex remains");
        visited[u] = true;
        order.push(u);
        for w in g.neighbors(u) {
            if !visited[w] {
                label[w].push(n - i);
            }
        }
    }
    order
}

/// Chordality test. Returns a perfect elimination ordering (first vertex is
/// eliminated first) when the graph is chordal.
pub fn is_chordal(g: &Graph) -> Option<Vec<Vertex>> {
    let order = lex_bfs(g);
    let n = order.len();
    let mut pos = vec![usize::MAX; g.slots()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // Standard check: for each v, its earlier neighbors minus the latest one
    // must all be adjacent to that latest earlier neighbor.
    for &v in &order {
        let earlier: Vec<Vertex> = g.neighbors(v).filter(|&u| pos[u] < pos[v]).collect();
        if earlier.is_empty() {
            continue;
        }
        let parent = *earlier.iter().max_by_key(|&&u| pos[u]).unwrap();
        for &u in &earlier {
            if u != parent && !g.has_edge(u, parent) {
                return None;
            }
        }
    }
    let _ = n;
    let mut peo = order;
    peo.reverse();
    Some(peo)
}

/// Maximal cliques of a chordal graph, sorted sets ordered by smallest member.
pub fn maximal_cliques(g: &Graph) -> Result<Vec<BTreeSet<Vertex>>, CliqueTreeError> {
    let peo = is_chordal(g).ok_or(CliqueTreeError::NotChordal)?;
    let mut rank = vec![usize::MAX; g.slots()];
    for (i, &v) in peo.iter().enumerate() {
        rank[v] = i;
    }
    // Candidate cliques: v together with neighbors eliminated after it.
    let mut cands: Vec<BTreeSet<Vertex>> = Vec::new();
    for &v in &peo {
        let mut c: BTreeSet<Vertex> = g.neighbors(v).filter(|&u| rank[u] > rank[v]).collect();
        c.insert(v);
        cands.push(c);
    }
    let mut out: Vec<BTreeSet<Vertex>> = Vec::new();
    'outer: for (i, c) in cands.iter().enumerate() {
        for (j, d) in cands.iter().enumerate() {
            if i != j && c.is_subset(d) && (c.len() < d.len() || i > j) {
                continue 'outer;
            }
        }
        out.push(c.clone());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// A clique tree: the maximal cliques plus a maximum-weight spanning tree of
/// the clique graph weighted by intersection size. Tree-edge intersections
/// are exactly the minimal separators.
#[derive(Debug, Clone)]
pub struct CliqueTree {
    pub cliques: Vec<BTreeSet<Vertex>>,
    /// (i, j, weight) with i < j; the weight is the intersection size of
    /// cliques i and j.
    pub edges: Vec<(usize, usize, usize)>,
    /// For each vertex id, the clique indices containing it.
    pub vertex_cliques: Vec<Vec<usize>>,
}

pub fn build_clique_tree(g: &Graph) -> Result<CliqueTree, CliqueTreeError> {
    if g.num_live() > 0 && !g.is_connected() {
        return Err(CliqueTreeError::NotConnected);
    }
    let cliques = maximal_cliques(g)?;
    let m = cliques.len();
    // Kruskal on (weight desc, index asc) over intersecting pairs.
    let mut cand: Vec<(usize, usize, usize)> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let w = cliques[i].intersection(&cliques[j]).count();
            if w > 0 {
                cand.push((i, j, w));
            }
        }
    }
    cand.sort_by(|a, b| b.2.cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    let mut edges = Vec::new();
    for (i, j, w) in cand {
        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
        if ri != rj {
            parent[ri] = rj;
            edges.push((i, j, w));
        }
    }
    if m > 0 && edges.len() != m - 1 {
        return Err(CliqueTreeError::NotConnected);
    }
    let mut vertex_cliques = vec![Vec::new(); g.slots()];
    for (idx, c) in cliques.iter().enumerate() {
        for &v in c {
            vertex_cliques[v].push(idx);
        }
    }
    Ok(CliqueTree {
        cliques,
        edges,
        vertex_cliques,
    })
}

/// Vertices whose closed neighborhood is a clique.
pub fn simplicial_vertices(g: &Graph) -> Vec<Vertex> {
    g.live_vertices()
        .filter(|&v| {
            let nbrs: Vec<Vertex> = g.neighbors(v).collect();
            nbrs.iter().enumerate().all(|(i, &a)| {
                nbrs[i + 1..].iter().all(|&b| g.has_edge(a, b))
            })
        })
        .collect()
}

pub fn is_simplicial(g: &Graph, v: Vertex) -> bool {
    let nbrs: Vec<Vertex> = g.neighbors(v).collect();
    nbrs.iter()
        .enumerate()
        .all(|(i, &a)| nbrs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
}

/// A small separator with one connected component of the graph minus it.
pub type SeparatorComponent = (BTreeSet<Vertex>, Vec<Vertex>);

/// Scans clique-tree edges for a clique separator of size at most `max_size`
/// and returns it with one connected component of `G - Q`.
pub fn find_small_separator(
    g: &Graph,
    max_size: usize,
) -> Result<Option<SeparatorComponent>, CliqueTreeError> {
    let ct = build_clique_tree(g)?;
    for &(i, j, w) in &ct.edges {
        if w > max_size {
            continue;
        }
        let q: BTreeSet<Vertex> = ct.cliques[i]
            .intersection(&ct.cliques[j])
            .copied()
            .collect();
        let comps = g.components_without(&q);
        if comps.len() >= 2 {
            return Ok(Some((q, comps.into_iter().next().unwrap())));
        }
    }
    Ok(None)
}
