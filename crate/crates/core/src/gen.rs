//! Seeded instance generators.
//!
//! All randomness comes from SplitMix64 so fixtures are bit-reproducible
//! across platforms and implementations: the generator state advances by the
//! golden-gamma constant and the output is finalized with the standard
//! xor-shift-multiply chain (constants 0x9E3779B97F4A7C15,
//! 0xBF58476D1CE4E5B9, 0x94D049BB133111EB).

use crate::graph::{Instance, Vertex};
use thiserror::Error;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound` (bound > 0) by rejection-free modulo; the bias is
    /// negligible for the tiny bounds used here and identical everywhere.
    pub fn gen_range(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        (self.next_u64() % bound as u64) as usize
    }

    pub fn gen_bool(&mut self, p: f64) -> bool {
        ((self.next_u64() >> 11) as f64) / ((1u64 << 53) as f64) < p
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("parameter out of range: {0}")]
    BadParam(String),
}

fn check_prob(name: &str, p: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GenError::BadParam(format!("{name}={p}")))
    }
}

#[derive(Debug, Clone)]
pub struct ChordalParams {
    pub n: usize,
    pub extra_edge_density: f64,
    pub terminal_prob: f64,
    pub mark_prob: f64,
    pub k: i64,
    pub seed: u64,
}

/// Random connected chordal instance. Vertices are added one at a time; each
/// new vertex's neighborhood is a clique grown greedily inside the closed
/// neighborhood of a random anchor, which keeps the insertion order a reverse
/// perfect elimination ordering.
pub fn gen_chordal(p: &ChordalParams) -> Result<Instance, GenError> {
    if p.n == 0 {
        return Err(GenError::BadParam("n=0".into()));
    }
    check_prob("extra_edge_density", p.extra_edge_density)?;
    check_prob("terminal_prob", p.terminal_prob)?;
    check_prob("mark_prob", p.mark_prob)?;
    let mut rng = SplitMix64::new(p.seed);
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); p.n];
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    for v in 1..p.n {
        let anchor = rng.gen_range(v);
        let mut clique = vec![anchor];
        let mut cand: Vec<Vertex> = adj[anchor].iter().copied().filter(|&u| u < v).collect();
        cand.sort_unstable();
        for u in cand {
            if clique.iter().all(|&c| c == u || adj[u].contains(&c)) && rng.gen_bool(p.extra_edge_density)
            {
                clique.push(u);
            }
        }
        for &c in &clique {
            adj[v].push(c);
            adj[c].push(v);
            edges.push((c, v));
        }
    }
    let terminals: Vec<Vertex> = (0..p.n).filter(|_| rng.gen_bool(p.terminal_prob)).collect();
    edges.sort_unstable();
    let marks: Vec<(Vertex, Vertex)> = edges
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(p.mark_prob))
        .collect();
    Ok(Instance::new(p.n, &edges, &terminals, &marks, p.k).expect("generator builds valid instance"))
}

#[derive(Debug, Clone)]
pub struct SplitParams {
    pub n_clique: usize,
    pub n_indep: usize,
    pub edge_prob: f64,
    pub terminal_prob: f64,
    pub mark_prob: f64,
    pub k: i64,
    pub seed: u64,
}

/// Random split instance: a clique on `n_clique` vertices, an independent set
/// on `n_indep` vertices and random cross edges.
pub fn gen_split(p: &SplitParams) -> Result<Instance, GenError> {
    if p.n_clique + p.n_indep == 0 {
        return Err(GenError::BadParam("empty vertex set".into()));
    }
    check_prob("edge_prob", p.edge_prob)?;
    check_prob("terminal_prob", p.terminal_prob)?;
    check_prob("mark_prob", p.mark_prob)?;
    let n = p.n_clique + p.n_indep;
    let mut rng = SplitMix64::new(p.seed);
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    for u in 0..p.n_clique {
        for v in u + 1..p.n_clique {
            edges.push((u, v));
        }
    }
    for i in p.n_clique..n {
        for u in 0..p.n_clique {
            if rng.gen_bool(p.edge_prob) {
                edges.push((u, i));
            }
        }
    }
    let terminals: Vec<Vertex> = (0..n).filter(|_| rng.gen_bool(p.terminal_prob)).collect();
    edges.sort_unstable();
    let marks: Vec<(Vertex, Vertex)> = edges
        .iter()
        .copied()
        .filter(|_| rng.gen_bool(p.mark_prob))
        .collect();
    Ok(Instance::new(n, &edges, &terminals, &marks, p.k).expect("generator builds valid instance"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructuredKind {
    /// Exercises the fish-structure branching.
    Fish,
    /// Plants a cheap component behind a cut vertex.
    Separator1,
    /// Plants a cheap component behind a two-vertex clique separator.
    Separator2,
    /// Plants a non-simplicial terminal so the divide-and-conquer part runs.
    InnerTerminal,
}

/// Builds an instance guaranteed to exercise the named structure. `size`
/// scales the construction; the exact shape varies with the seed.
pub fn gen_structured(kind: StructuredKind, size: usize, seed: u64) -> Result<Instance, GenError> {
    match kind {
        StructuredKind::Fish => gen_fish(size, seed),
        StructuredKind::Separator1 => gen_separator(size, seed, 1),
        StructuredKind::Separator2 => gen_separator(size, seed, 2),
        StructuredKind::InnerTerminal => gen_inner_terminal(size, seed),
    }
}

/// A fixed hand-built instance: an inner terminal sits in the intersection of
/// two maximal cliques, and four simplicial terminals hang off the far side.
/// Ids: 0 = the inner terminal, 1..=3 three wing vertices u1..u3, 4..=7 the
/// central vertices v1..v4, 8..=11 the simplicial terminals t1..t4.
///
/// Used as ground truth in tests: the dividing separator is {0, 4, 5} with
/// good component {2, 3, 6, 7, 8, 9, 10, 11}, the component minima come out
/// as s0 = 1 and (s1, s2, s3, s4) = (1, 2, 1, 2).
pub fn dividing_example() -> Instance {
    let edges = vec![
        // wing u1 and the central clique
        (1, 0),
        (1, 4),
        (1, 5),
        (0, 4),
        (0, 5),
        (0, 6),
        (0, 7),
        (4, 5),
        (4, 6),
        (4, 7),
        (5, 6),
        (5, 7),
        (6, 7),
        // wings u2, u3
        (2, 0),
        (2, 4),
        (2, 6),
        (3, 0),
        (3, 5),
        (3, 7),
        // simplicial terminals
        (8, 2),
        (8, 4),
        (8, 6),
        (9, 3),
        (9, 5),
        (9, 7),
        (10, 4),
        (10, 6),
        (10, 7),
        (11, 5),
        (11, 6),
        (11, 7),
    ];
    let terminals = [0, 8, 9, 10, 11];
    let marks = [(0, 5), (2, 8), (7, 11)];
    Instance::new(12, &edges, &terminals, &marks, 3).expect("fixture is valid")
}

/// A good split instance whose first applicable rule is the two-way branch
/// on a clique vertex with exactly one marked and one unmarked terminal
/// neighbor. Clique 0..=3 (vertex 0 is the branch vertex), terminals 4..=8.
pub fn good_branching_example(k: i64) -> Instance {
    let edges = vec![
        (0, 1),
        (0, 2),
        (0, 3),
        (1, 2),
        (1, 3),
        (2, 3),
        (4, 0),
        (4, 1),
        (5, 2),
        (5, 3),
        (6, 0),
        (6, 1),
        (7, 1),
        (7, 2),
        (8, 2),
        (8, 3),
    ];
    let marks = [(4, 0), (4, 1), (5, 2), (5, 3)];
    Instance::new(9, &edges, &[4, 5, 6, 7, 8], &marks, k).expect("fixture is valid")
}

fn push_clique(edges: &mut Vec<(Vertex, Vertex)>, verts: &[Vertex]) {
    for (i, &a) in verts.iter().enumerate() {
        for &b in &verts[i + 1..] {
            edges.push((a.min(b), a.max(b)));
        }
    }
}

/// Two maximal cliques Q1 = {t̂, v1..vl} and Q2 = {t̂, w1, v2..vl} sharing the
/// separator Q = {t̂, v2..vl}, with two simplicial terminals hanging off each
/// private side. The inner terminal t̂ survives Part I, the branch sizes come
/// out as s0 = 0 with U1 a single vertex, and the marked edge at v1 selects
/// which of the two fish branchings fires.
fn gen_fish(size: usize, seed: u64) -> Result<Instance, GenError> {
    let l = size.clamp(4, 12);
    let mut rng = SplitMix64::new(seed);
    // ids: 0 = t̂, 1 = v1, 2..=l are v2..vl, then w1, t1, t2, t3, t4
    let that = 0usize;
    let v1 = 1usize;
    let w1 = l + 1;
    let t1 = l + 2;
    let t2 = l + 3;
    let t3 = l + 4;
    let t4 = l + 5;
    let n = l + 6;
    let mut edges = Vec::new();
    let mut q1: Vec<Vertex> = vec![that];
    q1.extend(1..=l);
    push_clique(&mut edges, &q1);
    let mut q2: Vec<Vertex> = vec![that, w1];
    q2.extend(2..=l);
    push_clique(&mut edges, &q2);
    for (t, anchors) in [
        (t1, [v1, 2, 3]),
        (t2, [v1, 3, 4]),
        (t3, [w1, 2, 3]),
        (t4, [w1, 3, 4]),
    ] {
        for a in anchors {
            edges.push((a.min(t), a.max(t)));
        }
    }
    let mut terminals = vec![that, t1, t2, t3, t4];
    if l >= 5 && rng.gen_bool(0.5) {
        terminals.push(l); // an extra terminal inside the separator
    }
    // Marking v1-t1 gives v1 a marked neighbor besides t̂ (first fish
    // branching); marking t̂-v1 does not (second branching).
    let first_branch = rng.gen_bool(0.5);
    let mut marks = vec![if first_branch { (v1, t1) } else { (that, v1) }];
    marks.push((w1.min(t3), w1.max(t3)));
    edges.sort_unstable();
    edges.dedup();
    let k = 2 + rng.gen_range(3) as i64;
    Instance::new(n, &edges, &terminals, &marks, k).map_err(|e| GenError::BadParam(e.to_string()))
}

/// A dumbbell: two terminal blobs joined only through a separator of the
/// requested size. The planted blob carries the lowest ids, so the separator
/// scan reaches it first and its replacement case is determined by the
/// variant; the far blob keeps the separator vertices constrained.
fn gen_separator(size: usize, seed: u64, sep_size: usize) -> Result<Instance, GenError> {
    let mut rng = SplitMix64::new(seed ^ 0x5EED_0000);
    // ids: separator 0 (and 1), then blob A {t,a,b,c}, then blob B with pads
    let s1 = 0usize;
    let s2 = 1usize; // only used when sep_size == 2
    let mut n = sep_size;
    let mut edges = Vec::new();
    let mut terminals = Vec::new();
    let mut marks: Vec<(Vertex, Vertex)> = Vec::new();
    if sep_size == 2 {
        edges.push((s1, s2));
    }
    let variant = rng.gen_range(if sep_size == 2 { 5 } else { 2 });
    if sep_size == 2 && variant == 2 {
        // Two marked wings, one per separator vertex, tied through a shared
        // inner terminal: each side carries its own unit of cost and the two
        // never merge, so together they cost two extra.
        let (t1, a1, b1, c1) = (n, n + 1, n + 2, n + 3);
        let m = n + 4;
        let (t2, a2, b2, c2) = (n + 5, n + 6, n + 7, n + 8);
        n += 9;
        terminals.extend([t1, m, t2]);
        push_clique(&mut edges, &[t1, a1, b1, c1]);
        push_clique(&mut edges, &[t2, a2, b2, c2]);
        for x in [a1, b1, c1] {
            edges.push((s1, x));
        }
        for x in [a2, b2, c2] {
            edges.push((s2, x));
        }
        for x in [s1, s2, a1, a2] {
            edges.push((x.min(m), x.max(m)));
        }
        marks.push((s1, a1));
        marks.push((s2, a2));
    } else {
        // one blob hanging on the whole separator
        let (t, a, b, c) = (n, n + 1, n + 2, n + 3);
        n += 4;
        terminals.push(t);
        push_clique(&mut edges, &[t, a, b, c]);
        for x in [a, b, c] {
            edges.push((s1.min(x), s1.max(x)));
            if sep_size == 2 {
                edges.push((s2.min(x), s2.max(x)));
            }
        }
        match (sep_size, variant) {
            (_, 1) => {
                // one marked blob-to-separator edge: one costly side
                if sep_size == 2 && rng.gen_bool(0.5) {
                    marks.push((s2, a));
                } else {
                    marks.push((s1, a));
                }
            }
            (2, 3) => {
                // simplicial terminal z on {a, s1, s2}: both sides costly at
                // once, sharing the same extra deletion
                let z = n;
                n += 1;
                terminals.push(z);
                for x in [a, s1, s2] {
                    edges.push((x.min(z), x.max(z)));
                }
            }
            (2, 4) => {
                // marked edge inside the blob plus two straddling terminals:
                // either separator vertex alone rides along with the blob
                // minimum, both together cost one more
                marks.push((a, b));
                let x1 = n;
                let x2 = n + 1;
                n += 2;
                terminals.push(x1);
                terminals.push(x2);
                for v in [a, s1, s2] {
                    edges.push((v.min(x1), v.max(x1)));
                }
                for v in [b, s1, s2] {
                    edges.push((v.min(x2), v.max(x2)));
                }
            }
            _ => {}
        }
    }
    // Blob B: a plain far-side blob plus pads that keep the separator
    // vertices inside T-triangles.
    let (tb, ab, bb, cb) = (n, n + 1, n + 2, n + 3);
    n += 4;
    terminals.push(tb);
    push_clique(&mut edges, &[tb, ab, bb, cb]);
    for x in [ab, bb, cb] {
        edges.push((s1.min(x), s1.max(x)));
        if sep_size == 2 {
            edges.push((s2.min(x), s2.max(x)));
        }
    }
    let pad_anchors = [ab, bb, cb];
    for i in 0..(2 + size % 3) {
        let p = n;
        n += 1;
        terminals.push(p);
        let anchor = pad_anchors[i % 3];
        edges.push((s1.min(p), s1.max(p)));
        if sep_size == 2 {
            edges.push((s2.min(p), s2.max(p)));
        } else {
            edges.push((pad_anchors[(i + 1) % 3].min(p), pad_anchors[(i + 1) % 3].max(p)));
        }
        edges.push((anchor.min(p), anchor.max(p)));
    }
    edges.sort_unstable();
    edges.dedup();
    let k = 2 + rng.gen_range(4) as i64;
    Instance::new(n, &edges, &terminals, &marks, k).map_err(|e| GenError::BadParam(e.to_string()))
}

/// The fish topology with no marked edges at all: every sub-instance minimum
/// is zero, so the divide-and-conquer lands in the branch that needs a
/// costless non-separator vertex.
fn markless_fish(size: usize, seed: u64) -> Result<Instance, GenError> {
    let l = size.clamp(4, 12);
    let mut rng = SplitMix64::new(seed ^ 0x00F1_54AA);
    let that = 0usize;
    let v1 = 1usize;
    let w1 = l + 1;
    let t1 = l + 2;
    let t2 = l + 3;
    let t3 = l + 4;
    let t4 = l + 5;
    let n = l + 6;
    let mut edges = Vec::new();
    let mut q1: Vec<Vertex> = vec![that];
    q1.extend(1..=l);
    push_clique(&mut edges, &q1);
    let mut q2: Vec<Vertex> = vec![that, w1];
    q2.extend(2..=l);
    push_clique(&mut edges, &q2);
    for (t, anchors) in [
        (t1, [v1, 2, 3]),
        (t2, [v1, 3, 4]),
        (t3, [w1, 2, 3]),
        (t4, [w1, 3, 4]),
    ] {
        for a in anchors {
            edges.push((a.min(t), a.max(t)));
        }
    }
    let terminals = vec![that, t1, t2, t3, t4];
    edges.sort_unstable();
    edges.dedup();
    let k = 1 + rng.gen_range(3) as i64;
    Instance::new(n, &edges, &terminals, &[], k).map_err(|e| GenError::BadParam(e.to_string()))
}

/// A core clique {t̂, x1..xp} with two wing vertices seeing t̂ and disjoint
/// halves of the core. The wings are non-adjacent, so t̂ is an inner
/// terminal, and each wing carries its own simplicial terminal so that a
/// clique-tree edge at the core yields a good component. Half the seeds use
/// the markless fish shape instead.
fn gen_inner_terminal(size: usize, seed: u64) -> Result<Instance, GenError> {
    if seed % 2 == 1 {
        return markless_fish(size, seed);
    }
    let p = size.clamp(4, 10);
    let mut rng = SplitMix64::new(seed ^ 0x1A7E_11AA);
    // ids: 0 = t̂, 1..=p core x's, then ua, ub, ta, tb, then blobs
    let that = 0usize;
    let ua = p + 1;
    let ub = p + 2;
    let ta = p + 3;
    let tb = p + 4;
    let mut n = p + 5;
    let mut edges = Vec::new();
    let mut core = vec![that];
    core.extend(1..=p);
    push_clique(&mut edges, &core);
    let half = p / 2;
    edges.push((that, ua));
    edges.push((that, ub));
    for i in 1..=half {
        edges.push((i, ua));
    }
    for i in half + 1..=p {
        edges.push((i, ub));
    }
    for x in [ua, 1, 2] {
        edges.push((x.min(ta), x.max(ta)));
    }
    for x in [ub, half + 1, half + 2] {
        edges.push((x.min(tb), x.max(tb)));
    }
    let mut terminals = vec![that, ta, tb];
    // extra simplicial terminal blobs on random core triples
    let blobs = rng.gen_range(3);
    for _ in 0..blobs {
        let d = n;
        n += 1;
        terminals.push(d);
        let i = 1 + rng.gen_range(p - 2);
        for x in [i, i + 1, i + 2] {
            edges.push((x.min(d), x.max(d)));
        }
    }
    let mut marks = Vec::new();
    if rng.gen_bool(0.7) {
        marks.push((that, 1 + rng.gen_range(p)));
    }
    edges.sort_unstable();
    edges.dedup();
    let k = 1 + rng.gen_range(4) as i64;
    Instance::new(n, &edges, &terminals, &marks, k).map_err(|e| GenError::BadParam(e.to_string()))
}
