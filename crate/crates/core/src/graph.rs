//! Simple undirected graphs with terminal and marked-edge annotations.
//!
//! Vertices are dense integer ids with a liveness flag; ids are never reused
//! or renumbered, so solutions and traces stay stable across search-tree
//! mutations. Every mutation goes through a journal, which makes backtracking
//! an exact inverse replay.

use std::collections::BTreeSet;
use thiserror::Error;

pub type Vertex = usize;

/// Normalizes an edge to (min, max) so the marked-edge set is order-insensitive.
fn norm(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    alive: Vec<bool>,
    adj: Vec<BTreeSet<Vertex>>,
    marks: BTreeSet<(Vertex, Vertex)>,
    live_count: usize,
    edge_count: usize,
}

impl Graph {
    pub fn with_vertices(n: usize) -> Self {
        Graph {
            alive: vec![true; n],
            adj: vec![BTreeSet::new(); n],
            marks: BTreeSet::new(),
            live_count: n,
            edge_count: 0,
        }
    }

    pub fn slots(&self) -> usize {
        self.alive.len()
    }

    pub fn num_live(&self) -> usize {
        self.live_count
    }

    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    pub fn is_live(&self, v: Vertex) -> bool {
        v < self.alive.len() && self.alive[v]
    }

    pub fn live_vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.alive.len()).filter(move |&v| self.alive[v])
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u != v && u < self.adj.len() && self.adj[u].contains(&v)
    }

    pub fn is_marked(&self, u: Vertex, v: Vertex) -> bool {
        self.marks.contains(&norm(u, v))
    }

    /// Live edges in ascending (u, v) order.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in self.live_vertices() {
            for v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn marked_edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.marks.iter().copied()
    }

    pub fn num_marked(&self) -> usize {
        self.marks.len()
    }

    /// Neighbors of `v` joined by a marked edge, ascending.
    pub fn marked_neighbors(&self, v: Vertex) -> Vec<Vertex> {
        self.neighbors(v).filter(|&u| self.is_marked(u, v)).collect()
    }

    /// Connected components over live vertices, each sorted, ordered by their
    /// smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.alive.len()];
        let mut out = Vec::new();
        for s in self.live_vertices() {
            if seen[s] {
                continue;
            }
            let mut comp = vec![];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Components of the graph with `removed` treated as deleted.
    pub fn components_without(&self, removed: &BTreeSet<Vertex>) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.alive.len()];
        let mut out = Vec::new();
        for s in self.live_vertices() {
            if seen[s] || removed.contains(&s) {
                continue;
            }
            let mut comp = vec![];
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for w in self.neighbors(u) {
                    if !seen[w] && !removed.contains(&w) {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// An edge is a bridge when it lies on no cycle.
    pub fn is_bridge(&self, u: Vertex, v: Vertex) -> bool {
        debug_assert!(self.has_edge(u, v));
        // Look for a u-v path avoiding the edge itself.
        let mut seen = vec![false; self.alive.len()];
        let mut stack = vec![u];
        seen[u] = true;
        while let Some(x) = stack.pop() {
            for w in self.neighbors(x) {
                if x == u && w == v {
                    continue;
                }
                if w == v {
                    return false;
                }
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone)]
enum EditOp {
    AddedVertex {
        v: Vertex,
    },
    RemovedVertex {
        v: Vertex,
        was_terminal: bool,
        nbrs: Vec<Vertex>,
        marked_nbrs: Vec<Vertex>,
    },
    AddedEdge {
        u: Vertex,
        v: Vertex,
    },
    RemovedEdge {
        u: Vertex,
        v: Vertex,
        was_marked: bool,
    },
    Marked {
        u: Vertex,
        v: Vertex,
    },
    Unmarked {
        u: Vertex,
        v: Vertex,
    },
    SetBudget {
        old: i64,
    },
    SetTerminal {
        v: Vertex,
        old: bool,
    },
}

/// A journal position; undoing to it restores the exact prior state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint(usize);

/// A problem instance: graph, terminal set, marked edges and budget.
///
/// The budget may go negative during search. In the generalized form any edge
/// may be marked; the original problem is the special case with no marks.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    terminal: Vec<bool>,
    pub k: i64,
    journal: Vec<EditOp>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {0}: {1}")]
    Line(usize, String),
    #[error("missing `p sfvs <n> <m>` header")]
    MissingHeader,
    #[error("missing `k <k>` line")]
    MissingBudget,
    #[error("declared {declared} edges but found {found}")]
    EdgeCount { declared: usize, found: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("vertex {0} is dead or unknown")]
    BadVertex(Vertex),
    #[error("self loop at {0}")]
    SelfLoop(Vertex),
    #[error("edge {0}-{1} already present")]
    DuplicateEdge(Vertex, Vertex),
    #[error("edge {0}-{1} not present")]
    NoSuchEdge(Vertex, Vertex),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    Triangle,
    Cycle,
}

impl Instance {
    pub fn new(
        n: usize,
        edges: &[(Vertex, Vertex)],
        terminals: &[Vertex],
        marks: &[(Vertex, Vertex)],
        k: i64,
    ) -> Result<Self, InstanceError> {
        let mut inst = Instance {
            graph: Graph::with_vertices(n),
            terminal: vec![false; n],
            k,
            journal: Vec::new(),
        };
        for &(u, v) in edges {
            inst.check_live(u)?;
            inst.check_live(v)?;
            if u == v {
                return Err(InstanceError::SelfLoop(u));
            }
            if inst.graph.has_edge(u, v) {
                return Err(InstanceError::DuplicateEdge(u, v));
            }
            inst.graph.adj[u].insert(v);
            inst.graph.adj[v].insert(u);
            inst.graph.edge_count += 1;
        }
        for &t in terminals {
            inst.check_live(t)?;
            inst.terminal[t] = true;
        }
        for &(u, v) in marks {
            if !inst.graph.has_edge(u, v) {
                return Err(InstanceError::NoSuchEdge(u, v));
            }
            inst.graph.marks.insert(norm(u, v));
        }
        Ok(inst)
    }

    fn check_live(&self, v: Vertex) -> Result<(), InstanceError> {
        if self.graph.is_live(v) {
            Ok(())
        } else {
            Err(InstanceError::BadVertex(v))
        }
    }

    pub fn is_terminal(&self, v: Vertex) -> bool {
        v < self.terminal.len() && self.terminal[v] && self.graph.is_live(v)
    }

    pub fn terminals(&self) -> Vec<Vertex> {
        self.graph
            .live_vertices()
            .filter(|&v| self.terminal[v])
            .collect()
    }

    pub fn num_terminals(&self) -> usize {
        self.graph.live_vertices().filter(|&v| self.terminal[v]).count()
    }

    pub fn non_terminals(&self) -> Vec<Vertex> {
        self.graph
            .live_vertices()
            .filter(|&v| !self.terminal[v])
            .collect()
    }

    // ---- journaled primitive edits ----

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint(self.journal.len())
    }

    pub fn add_vertex(&mut self, terminal: bool) -> Vertex {
        let v = self.graph.alive.len();
        self.graph.alive.push(true);
        self.graph.adj.push(BTreeSet::new());
        self.graph.live_count += 1;
        self.terminal.push(terminal);
        self.journal.push(EditOp::AddedVertex { v });
        v
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(self.graph.is_live(u) && self.graph.is_live(v) && u != v);
        debug_assert!(!self.graph.has_edge(u, v));
        self.graph.adj[u].insert(v);
        self.graph.adj[v].insert(u);
        self.graph.edge_count += 1;
        self.journal.push(EditOp::AddedEdge { u, v });
    }

    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(self.graph.has_edge(u, v));
        let was_marked = self.graph.marks.remove(&norm(u, v));
        self.graph.adj[u].remove(&v);
        self.graph.adj[v].remove(&u);
        self.graph.edge_count -= 1;
        self.journal.push(EditOp::RemovedEdge { u, v, was_marked });
    }

    pub fn mark_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(self.graph.has_edge(u, v));
        if self.graph.marks.insert(norm(u, v)) {
            self.journal.push(EditOp::Marked { u, v });
        }
    }

    pub fn unmark_edge(&mut self, u: Vertex, v: Vertex) {
        if self.graph.marks.remove(&norm(u, v)) {
            self.journal.push(EditOp::Unmarked { u, v });
        }
    }

    pub fn set_budget(&mut self, new_k: i64) {
        self.journal.push(EditOp::SetBudget { old: self.k });
        self.k = new_k;
    }

    pub fn set_terminal(&mut self, v: Vertex, t: bool) {
        self.journal.push(EditOp::SetTerminal {
            v,
            old: self.terminal[v],
        });
        self.terminal[v] = t;
    }

    pub fn remove_vertex(&mut self, v: Vertex) {
        debug_assert!(self.graph.is_live(v));
        let nbrs: Vec<Vertex> = self.graph.adj[v].iter().copied().collect();
        let marked_nbrs: Vec<Vertex> = nbrs
            .iter()
            .copied()
            .filter(|&u| self.graph.is_marked(u, v))
            .collect();
        for &u in &nbrs {
            self.graph.adj[u].remove(&v);
            self.graph.marks.remove(&norm(u, v));
        }
        self.graph.edge_count -= nbrs.len();
        self.graph.adj[v].clear();
        self.graph.alive[v] = false;
        self.graph.live_count -= 1;
        self.journal.push(EditOp::RemovedVertex {
            v,
            was_terminal: self.terminal[v],
            nbrs,
            marked_nbrs,
        });
    }

    /// Removes `xs` with incident edges and marks and decreases k by `dec`.
    /// The returned checkpoint restores the exact prior state.
    pub fn delete_vertices(&mut self, xs: &[Vertex], dec: i64) -> Checkpoint {
        let cp = self.checkpoint();
        for &v in xs {
            if self.graph.is_live(v) {
                self.remove_vertex(v);
            }
        }
        if dec != 0 {
            self.set_budget(self.k - dec);
        }
        cp
    }

    pub fn undo_to(&mut self, cp: Checkpoint) {
        while self.journal.len() > cp.0 {
            let op = self.journal.pop().expect("journal underflow");
            match op {
                EditOp::AddedVertex { v } => {
                    debug_assert!(self.graph.adj[v].is_empty());
                    debug_assert_eq!(v, self.graph.alive.len() - 1);
                    self.graph.alive.pop();
                    self.graph.adj.pop();
                    self.terminal.pop();
                    self.graph.live_count -= 1;
                }
                EditOp::RemovedVertex {
                    v,
                    was_terminal,
                    nbrs,
                    marked_nbrs,
                } => {
                    self.graph.alive[v] = true;
                    self.graph.live_count += 1;
                    self.terminal[v] = was_terminal;
                    for &u in &nbrs {
                        self.graph.adj[u].insert(v);
                        self.graph.adj[v].insert(u);
                    }
                    self.graph.edge_count += nbrs.len();
                    for &u in &marked_nbrs {
                        self.graph.marks.insert(norm(u, v));
                    }
                }
                EditOp::AddedEdge { u, v } => {
                    self.graph.adj[u].remove(&v);
                    self.graph.adj[v].remove(&u);
                    self.graph.marks.remove(&norm(u, v));
                    self.graph.edge_count -= 1;
                }
                EditOp::RemovedEdge { u, v, was_marked } => {
                    self.graph.adj[u].insert(v);
                    self.graph.adj[v].insert(u);
                    self.graph.edge_count += 1;
                    if was_marked {
                        self.graph.marks.insert(norm(u, v));
                    }
                }
                EditOp::Marked { u, v } => {
                    self.graph.marks.remove(&norm(u, v));
                }
                EditOp::Unmarked { u, v } => {
                    self.graph.marks.insert(norm(u, v));
                }
                EditOp::SetBudget { old } => {
                    self.k = old;
                }
                EditOp::SetTerminal { v, old } => {
                    self.terminal[v] = old;
                }
            }
        }
    }

    /// Drops undo history; the current state becomes the new baseline.
    pub fn forget_history(&mut self) {
        self.journal.clear();
    }

    // ---- T-triangles ----

    /// Every unordered triple {a,b,c} forming a triangle that contains at
    /// least one terminal, in ascending order.
    pub fn t_triangles(&self) -> Vec<(Vertex, Vertex, Vertex)> {
        let mut out = Vec::new();
        for u in self.graph.live_vertices() {
            let nbrs: Vec<Vertex> = self.graph.neighbors(u).filter(|&w| w > u).collect();
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    if self.graph.has_edge(a, b)
                        && (self.terminal[u] || self.terminal[a] || self.terminal[b])
                    {
                        out.push((u, a, b));
                    }
                }
            }
        }
        out
    }

    /// T-triangles through `v`, each reported as the other two vertices.
    pub fn t_triangles_through(&self, v: Vertex) -> Vec<(Vertex, Vertex)> {
        let nbrs: Vec<Vertex> = self.graph.neighbors(v).collect();
        let mut out = Vec::new();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if self.graph.has_edge(a, b)
                    && (self.terminal[v] || self.terminal[a] || self.terminal[b])
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn in_t_triangle(&self, v: Vertex) -> bool {
        let nbrs: Vec<Vertex> = self.graph.neighbors(v).collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                if self.graph.has_edge(a, b)
                    && (self.terminal[v] || self.terminal[a] || self.terminal[b])
                {
                    return true;
                }
            }
        }
        false
    }

    pub fn in_marked_edge(&self, v: Vertex) -> bool {
        self.graph.neighbors(v).any(|u| self.graph.is_marked(u, v))
    }

    // ---- verification ----

    /// Checks a candidate solution against this instance.
    ///
    /// Triangle mode accepts iff no T-triangle survives and every marked edge
    /// has an endpoint in `sol`. Cycle mode accepts iff no terminal lies on a
    /// cycle of the remaining graph and marked edges are covered. The two
    /// agree on chordal graphs.
    pub fn verify_solution(&self, sol: &[Vertex], mode: VerifyMode) -> Result<bool, InstanceError> {
        let mut in_sol = vec![false; self.graph.slots()];
        for &v in sol {
            self.check_live(v)?;
            in_sol[v] = true;
        }
        for &(u, v) in &self.graph.marks {
            if !in_sol[u] && !in_sol[v] {
                return Ok(false);
            }
        }
        match mode {
            VerifyMode::Triangle => {
                for (a, b, c) in self.t_triangles() {
                    if !in_sol[a] && !in_sol[b] && !in_sol[c] {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            VerifyMode::Cycle => {
                // A terminal lies on a cycle iff two of its neighbors are
                // connected without it in the remaining graph.
                for t in self.graph.live_vertices() {
                    if !self.terminal[t] || in_sol[t] {
                        continue;
                    }
                    let nbrs: Vec<Vertex> = self
                        .graph
                        .neighbors(t)
                        .filter(|&u| !in_sol[u])
                        .collect();
                    if nbrs.len() < 2 {
                        continue;
                    }
                    // Component labels of G - sol - t.
                    let mut label = vec![usize::MAX; self.graph.slots()];
                    let mut next = 0;
                    for s in self.graph.live_vertices() {
                        if in_sol[s] || s == t || label[s] != usize::MAX {
                            continue;
                        }
                        let mut stack = vec![s];
                        label[s] = next;
                        while let Some(x) = stack.pop() {
                            for w in self.graph.neighbors(x) {
                                if !in_sol[w] && w != t && label[w] == usize::MAX {
                                    label[w] = next;
                                    stack.push(w);
                                }
                            }
                        }
                        next += 1;
                    }
                    for i in 0..nbrs.len() {
                        for j in i + 1..nbrs.len() {
                            if label[nbrs[i]] == label[nbrs[j]] {
                                return Ok(false);
                            }
                        }
                    }
                }
                Ok(true)
            }
        }
    }

    // ---- derived instances ----

    /// The instance induced by `verts` (same vertex ids, others removed),
    /// with budget `k`. History is reset.
    pub fn induced(&self, verts: &BTreeSet<Vertex>, k: i64) -> Instance {
        let mut inst = self.clone();
        inst.journal.clear();
        let to_remove: Vec<Vertex> = inst
            .graph
            .live_vertices()
            .filter(|v| !verts.contains(v))
            .collect();
        for v in to_remove {
            inst.remove_vertex(v);
        }
        inst.k = k;
        inst.journal.clear();
        inst
    }

    /// Canonical state string: lists live vertices, adjacency, marks,
    /// terminals and budget verbatim. Used for state-equality checks.
    pub fn state_string(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("k={}\n", self.k));
        for v in self.graph.live_vertices() {
            let nbrs: Vec<String> = self.graph.neighbors(v).map(|u| u.to_string()).collect();
            s.push_str(&format!(
                "v{}{}: {}\n",
                v,
                if self.terminal[v] { "t" } else { "" },
                nbrs.join(",")
            ));
        }
        let marks: Vec<String> = self
            .graph
            .marked_edges()
            .map(|(u, v)| format!("{u}-{v}"))
            .collect();
        s.push_str(&format!("m: {}\n", marks.join(",")));
        s
    }

    // ---- text format ----

    /// Parses the line-oriented instance format:
    /// `p sfvs <n> <m>` header, then `k <k>`, `e <u> <v>`, `t <v>`,
    /// `m <u> <v>` lines; `#` starts a comment; vertices are 1-indexed.
    pub fn parse(text: &str) -> Result<Instance, ParseError> {
        let mut n: Option<usize> = None;
        let mut m_decl = 0usize;
        let mut k: Option<i64> = None;
        let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
        let mut terminals: Vec<Vertex> = Vec::new();
        let mut marks: Vec<(Vertex, Vertex)> = Vec::new();

        let map_id = |tok: &str, n: usize, ln: usize| -> Result<Vertex, ParseError> {
            let id: usize = tok
                .parse()
                .map_err(|_| ParseError::Line(ln, format!("bad vertex id `{tok}`")))?;
            if id == 0 || id > n {
                return Err(ParseError::Line(ln, format!("vertex id {id} out of range 1..={n}")));
            }
            Ok(id - 1)
        };

        for (idx, raw) in text.lines().enumerate() {
            let ln = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            match toks[0] {
                "p" => {
                    if n.is_some() {
                        return Err(ParseError::Line(ln, "duplicate header".into()));
                    }
                    if toks.len() != 4 || toks[1] != "sfvs" {
                        return Err(ParseError::Line(ln, "expected `p sfvs <n> <m>`".into()));
                    }
                    n = Some(
                        toks[2]
                            .parse()
                            .map_err(|_| ParseError::Line(ln, "bad vertex count".into()))?,
                    );
                    m_decl = toks[3]
                        .parse()
                        .map_err(|_| ParseError::Line(ln, "bad edge count".into()))?;
                }
                "k" => {
                    let nv = n.ok_or(ParseError::MissingHeader)?;
                    let _ = nv;
                    if toks.len() != 2 {
                        return Err(ParseError::Line(ln, "expected `k <k>`".into()));
                    }
                    if k.is_some() {
                        return Err(ParseError::Line(ln, "duplicate budget line".into()));
                    }
                    k = Some(
                        toks[1]
                            .parse()
                            .map_err(|_| ParseError::Line(ln, "bad budget".into()))?,
                    );
                }
                "e" | "m" | "t" => {
                    let nv = n.ok_or(ParseError::MissingHeader)?;
                    match toks[0] {
                        "e" | "m" => {
                            if toks.len() != 3 {
                                return Err(ParseError::Line(ln, "expected two vertex ids".into()));
                            }
                            let u = map_id(toks[1], nv, ln)?;
                            let v = map_id(toks[2], nv, ln)?;
                            if u == v {
                                return Err(ParseError::Line(ln, "self loop".into()));
                            }
                            if toks[0] == "e" {
                                if edges.contains(&norm(u, v)) {
                                    return Err(ParseError::Line(ln, "duplicate edge".into()));
                                }
                                edges.push(norm(u, v));
                            } else {
                                marks.push(norm(u, v));
                            }
                        }
                        _ => {
                            if toks.len() != 2 {
                                return Err(ParseError::Line(ln, "expected one vertex id".into()));
                            }
                            terminals.push(map_id(toks[1], nv, ln)?);
                        }
                    }
                }
                other => {
                    return Err(ParseError::Line(ln, format!("unknown directive `{other}`")));
                }
            }
        }

        let n = n.ok_or(ParseError::MissingHeader)?;
        let k = k.ok_or(ParseError::MissingBudget)?;
        if edges.len() != m_decl {
            return Err(ParseError::EdgeCount {
                declared: m_decl,
                found: edges.len(),
            });
        }
        for &(u, v) in &marks {
            if !edges.contains(&(u, v)) {
                return Err(ParseError::Line(
                    0,
                    format!("marked pair {}-{} is not an edge", u + 1, v + 1),
                ));
            }
        }
        Instance::new(n, &edges, &terminals, &marks, k)
            .map_err(|e| ParseError::Line(0, e.to_string()))
    }

    /// Canonical text rendering. Live vertices are compacted to 1..=n in
    /// ascending id order; fresh instances keep their ids.
    pub fn to_text(&self) -> String {
        let live: Vec<Vertex> = self.graph.live_vertices().collect();
        let mut pos = vec![0usize; self.graph.slots()];
        for (i, &v) in live.iter().enumerate() {
            pos[v] = i + 1;
        }
        let mut s = String::new();
        s.push_str(&format!("p sfvs {} {}\n", live.len(), self.graph.num_edges()));
        s.push_str(&format!("k {}\n", self.k));
        for (u, v) in self.graph.edges() {
            let (a, b) = norm(pos[u], pos[v]);
            s.push_str(&format!("e {a} {b}\n"));
        }
        for &t in &self.terminals() {
            s.push_str(&format!("t {}\n", pos[t]));
        }
        for (u, v) in self.graph.marked_edges() {
            let (a, b) = norm(pos[u], pos[v]);
            s.push_str(&format!("m {a} {b}\n"));
        }
        s
    }
}

/// Parses a solution file: one 1-indexed vertex per line, or the token `NO`.
pub fn parse_solution(text: &str) -> Result<Option<Vec<Vertex>>, ParseError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let tok = line.trim();
        if tok.is_empty() {
            continue;
        }
        if tok == "NO" {
            return Ok(None);
        }
        let id: usize = tok
            .parse()
            .map_err(|_| ParseError::Line(idx + 1, format!("bad vertex id `{tok}`")))?;
        if id == 0 {
            return Err(ParseError::Line(idx + 1, "vertex ids are 1-indexed".into()));
        }
        out.push(id - 1);
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(terms: &[usize], marks: &[(usize, usize)], k: i64) -> Instance {
        Instance::new(3, &[(0, 1), (0, 2), (1, 2)], terms, marks, k).unwrap()
    }

    #[test]
    fn t_triangles_single() {
        let inst = triangle(&[0], &[], 1);
        assert_eq!(inst.t_triangles(), vec![(0, 1, 2)]);
    }

    #[test]
    fn t_triangles_none_on_path() {
        let inst = Instance::new(3, &[(0, 1), (1, 2)], &[1], &[], 1).unwrap();
        assert!(inst.t_triangles().is_empty());
    }

    #[test]
    fn t_triangles_k4() {
        // K4 with one terminal: exactly the three triangles through it.
        let inst = Instance::new(
            4,
            &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
            &[0],
            &[],
            1,
        )
        .unwrap();
        let tris = inst.t_triangles();
        assert_eq!(tris, vec![(0, 1, 2), (0, 1, 3), (0, 2, 3)]);
    }

    #[test]
    fn verify_triangle_modes() {
        let inst = triangle(&[0], &[], 1);
        assert!(inst.verify_solution(&[1], VerifyMode::Triangle).unwrap());
        assert!(inst.verify_solution(&[1], VerifyMode::Cycle).unwrap());
        assert!(!inst.verify_solution(&[], VerifyMode::Triangle).unwrap());
    }

    #[test]
    fn verify_rejects_uncovered_mark() {
        let inst = triangle(&[0], &[(1, 2)], 1);
        assert!(!inst.verify_solution(&[0], VerifyMode::Triangle).unwrap());
        assert!(inst.verify_solution(&[1], VerifyMode::Triangle).unwrap());
    }

    #[test]
    fn verify_rejects_dead_vertex() {
        let mut inst = triangle(&[0], &[], 1);
        inst.remove_vertex(2);
        assert_eq!(
            inst.verify_solution(&[2], VerifyMode::Triangle),
            Err(InstanceError::BadVertex(2))
        );
        assert_eq!(
            inst.verify_solution(&[7], VerifyMode::Triangle),
            Err(InstanceError::BadVertex(7))
        );
    }

    #[test]
    fn c5_separates_the_modes() {
        // C5 has a terminal on a cycle but no triangle at all; this is why
        // chordality is a precondition for the triangle reformulation.
        let inst = Instance::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)], &[0], &[], 0).unwrap();
        assert!(inst.verify_solution(&[], VerifyMode::Triangle).unwrap());
        assert!(!inst.verify_solution(&[], VerifyMode::Cycle).unwrap());
    }

    #[test]
    fn delete_then_undo_restores_state() {
        let mut inst = Instance::new(
            5,
            &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4)],
            &[1, 4],
            &[(0, 1), (3, 4)],
            3,
        )
        .unwrap();
        let before = inst.state_string();
        let cp = inst.delete_vertices(&[0, 3], 2);
        assert_ne!(before, inst.state_string());
        assert_eq!(inst.k, 1);
        inst.undo_to(cp);
        assert_eq!(before, inst.state_string());
    }

    #[test]
    fn delete_empty_is_identity() {
        let mut inst = triangle(&[0], &[], 1);
        let before = inst.state_string();
        inst.delete_vertices(&[], 0);
        assert_eq!(before, inst.state_string());
    }

    #[test]
    fn undo_added_vertices_and_edges() {
        let mut inst = triangle(&[0], &[(0, 1)], 2);
        let before = inst.state_string();
        let cp = inst.checkpoint();
        let t = inst.add_vertex(true);
        inst.add_edge(t, 0);
        inst.mark_edge(t, 0);
        inst.unmark_edge(0, 1);
        inst.set_budget(7);
        inst.remove_vertex(1);
        inst.undo_to(cp);
        assert_eq!(before, inst.state_string());
        assert_eq!(inst.graph.slots(), 3);
    }

    #[test]
    fn parse_round_trip_is_identity() {
        let text = "p sfvs 4 4\nk 2\ne 1 2\ne 1 3\ne 2 3\ne 3 4\nt 2\nm 1 2\n";
        let inst = Instance::parse(text).unwrap();
        let rendered = inst.to_text();
        let again = Instance::parse(&rendered).unwrap();
        assert_eq!(rendered, again.to_text());
        assert_eq!(inst.state_string(), again.state_string());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Instance::parse("k 3\n"),
            Err(ParseError::MissingHeader)
        ));
        assert!(matches!(
            Instance::parse("p sfvs 2 1\ne 1 2\n"),
            Err(ParseError::MissingBudget)
        ));
        assert!(matches!(
            Instance::parse("p sfvs 2 2\nk 0\ne 1 2\n"),
            Err(ParseError::EdgeCount { .. })
        ));
        assert!(matches!(
            Instance::parse("p sfvs 2 1\nk 0\ne 1 5\n"),
            Err(ParseError::Line(3, _))
        ));
        // marked pair must duplicate an e pair
        assert!(Instance::parse("p sfvs 3 2\nk 0\ne 1 2\ne 2 3\nm 1 3\n").is_err());
        // order-insensitive mark
        assert!(Instance::parse("p sfvs 3 2\nk 0\ne 1 2\ne 2 3\nm 2 1\n").is_ok());
    }

    #[test]
    fn parse_solution_file() {
        assert_eq!(parse_solution("NO\n").unwrap(), None);
        assert_eq!(parse_solution("3\n1\n").unwrap(), Some(vec![2, 0]));
        assert!(parse_solution("x\n").is_err());
    }

    #[test]
    fn bridges() {
        let inst = Instance::new(4, &[(0, 1), (1, 2), (0, 2), (2, 3)], &[], &[], 0).unwrap();
        assert!(inst.graph.is_bridge(2, 3));
        assert!(!inst.graph.is_bridge(0, 1));
    }

    #[test]
    fn triangle_enumeration_matches_triple_scan() {
        use crate::gen::{gen_chordal, ChordalParams, SplitMix64};
        let mut rng = SplitMix64::new(0x7157);
        for seed in 0..30u64 {
            let inst = gen_chordal(&ChordalParams {
                n: 4 + (seed % 17) as usize, // up to 20
                extra_edge_density: 0.5,
                terminal_prob: 0.4,
                mark_prob: 0.0,
                k: 0,
                seed,
            })
            .unwrap();
            let verts: Vec<Vertex> = inst.graph.live_vertices().collect();
            let mut brute = Vec::new();
            for i in 0..verts.len() {
                for j in i + 1..verts.len() {
                    for l in j + 1..verts.len() {
                        let (a, b, c) = (verts[i], verts[j], verts[l]);
                        if inst.graph.has_edge(a, b)
                            && inst.graph.has_edge(a, c)
                            && inst.graph.has_edge(b, c)
                            && (inst.is_terminal(a) || inst.is_terminal(b) || inst.is_terminal(c))
                        {
                            brute.push((a, b, c));
                        }
                    }
                }
            }
            let mut got = inst.t_triangles();
            got.sort_unstable();
            brute.sort_unstable();
            assert_eq!(got, brute, "seed {seed}");
            let _ = rng.next_u64();
        }
    }

    #[test]
    fn triangle_and_cycle_verification_agree_on_chordal() {
        use crate::gen::{gen_chordal, ChordalParams, SplitMix64};
        let mut rng = SplitMix64::new(0xAB);
        for seed in 0..25u64 {
            let n = 4 + (seed % 11) as usize; // up to 14
            let inst = gen_chordal(&ChordalParams {
                n,
                extra_edge_density: 0.55,
                terminal_prob: 0.45,
                mark_prob: 0.2,
                k: 0,
                seed: 400 + seed,
            })
            .unwrap();
            let verts: Vec<Vertex> = inst.graph.live_vertices().collect();
            // all subsets for small n, random sampling beyond
            if n <= 10 {
                for mask in 0u32..(1 << n) {
                    let sol: Vec<Vertex> = (0..n)
                        .filter(|&i| mask & (1 << i) != 0)
                        .map(|i| verts[i])
                        .collect();
                    assert_eq!(
                        inst.verify_solution(&sol, VerifyMode::Triangle).unwrap(),
                        inst.verify_solution(&sol, VerifyMode::Cycle).unwrap(),
                        "seed {seed} mask {mask:b}"
                    );
                }
            } else {
                for _ in 0..200 {
                    let sol: Vec<Vertex> = verts
                        .iter()
                        .copied()
                        .filter(|_| rng.gen_bool(0.4))
                        .collect();
                    assert_eq!(
                        inst.verify_solution(&sol, VerifyMode::Triangle).unwrap(),
                        inst.verify_solution(&sol, VerifyMode::Cycle).unwrap(),
                        "seed {seed} sol {sol:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn undo_fuzz_restores_every_checkpoint() {
        use crate::gen::{gen_chordal, ChordalParams, SplitMix64};
        let mut rng = SplitMix64::new(0xF022);
        for seed in 0..20u64 {
            let mut inst = gen_chordal(&ChordalParams {
                n: 10,
                extra_edge_density: 0.5,
                terminal_prob: 0.4,
                mark_prob: 0.3,
                k: 3,
                seed: 800 + seed,
            })
            .unwrap();
            let mut stack: Vec<(Checkpoint, String)> = Vec::new();
            for _ in 0..120 {
                match rng.gen_range(9) {
                    0 => {
                        stack.push((inst.checkpoint(), inst.state_string()));
                    }
                    1 => {
                        if let Some((cp, want)) = stack.pop() {
                            inst.undo_to(cp);
                            assert_eq!(inst.state_string(), want, "seed {seed}");
                        }
                    }
                    2 => {
                        let live: Vec<Vertex> = inst.graph.live_vertices().collect();
                        if !live.is_empty() {
                            let v = live[rng.gen_range(live.len())];
                            inst.remove_vertex(v);
                        }
                    }
                    3 => {
                        let v = inst.add_vertex(rng.gen_bool(0.5));
                        let live: Vec<Vertex> =
                            inst.graph.live_vertices().filter(|&u| u != v).collect();
                        if !live.is_empty() {
                            inst.add_edge(v, live[rng.gen_range(live.len())]);
                        }
                    }
                    4 => {
                        let edges = inst.graph.edges();
                        if !edges.is_empty() {
                            let (u, v) = edges[rng.gen_range(edges.len())];
                            inst.mark_edge(u, v);
                        }
                    }
                    5 => {
                        let edges = inst.graph.edges();
                        if !edges.is_empty() {
                            let (u, v) = edges[rng.gen_range(edges.len())];
                            inst.unmark_edge(u, v);
                        }
                    }
                    6 => {
                        let edges = inst.graph.edges();
                        if !edges.is_empty() {
                            let (u, v) = edges[rng.gen_range(edges.len())];
                            inst.remove_edge(u, v);
                        }
                    }
                    7 => {
                        let live: Vec<Vertex> = inst.graph.live_vertices().collect();
                        if live.len() >= 2 {
                            let u = live[rng.gen_range(live.len())];
                            let v = live[rng.gen_range(live.len())];
                            if u != v && !inst.graph.has_edge(u, v) {
                                inst.add_edge(u, v);
                            }
                        }
                    }
                    _ => {
                        inst.set_budget(inst.k + rng.gen_range(3) as i64 - 1);
                    }
                }
            }
            while let Some((cp, want)) = stack.pop() {
                inst.undo_to(cp);
                assert_eq!(inst.state_string(), want, "seed {seed}");
            }
        }
    }

    #[test]
    fn instances_solve_on_independent_threads() {
        use crate::gen::{gen_chordal, ChordalParams};
        let inst = gen_chordal(&ChordalParams {
            n: 12,
            extra_edge_density: 0.5,
            terminal_prob: 0.4,
            mark_prob: 0.2,
            k: 3,
            seed: 5,
        })
        .unwrap();
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let clone = inst.clone();
                std::thread::spawn(move || crate::whole::solve_chordal(&clone).unwrap().answer)
            })
            .collect();
        let answers: Vec<bool> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        assert!(answers.windows(2).all(|w| w[0] == w[1]));
    }
}
