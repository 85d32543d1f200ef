//! Search statistics and solver outcomes.

use std::collections::BTreeMap;

/// Counters collected while a solver runs: search-tree nodes, per-rule firing
/// counts, recursion depth, and any violated internal invariants.
///
/// Violations are recorded instead of panicking so that test suites can assert
/// on them and `bench` can report them; a correct build keeps the list empty.
#[derive(Debug, Clone, Default)]
pub struct Stats {
    pub nodes: u64,
    pub peak_depth: usize,
    pub rule_firings: BTreeMap<String, u64>,
    pub violations: Vec<String>,
    /// One entry per top-level `good_alg` run: (vertices at entry, measure in
    /// thirds at entry, nodes spent in that run).
    pub good_alg_runs: Vec<GoodAlgRun>,
    /// One entry per exact-split E2 branching: clique size at the time plus
    /// the raw vertex deletions of the three branches and the coarser
    /// accounting the analysis uses.
    pub e2_branchings: Vec<E2Branching>,
}

#[derive(Debug, Clone, Copy)]
pub struct GoodAlgRun {
    pub n_entry: usize,
    pub mu_thirds_entry: i64,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct E2Branching {
    pub clique_size: usize,
    pub raw_deletions: [usize; 3],
    pub accounted: [usize; 3],
}

impl Stats {
    pub fn new() -> Self {
        Stats::default()
    }

    pub fn enter_node(&mut self, depth: usize) {
        self.nodes += 1;
        if depth > self.peak_depth {
            self.peak_depth = depth;
        }
    }

    pub fn fire(&mut self, rule: &str) {
        *self.rule_firings.entry(rule.to_string()).or_insert(0) += 1;
    }

    pub fn firings(&self, rule: &str) -> u64 {
        self.rule_firings.get(rule).copied().unwrap_or(0)
    }

    /// Total firings over every rule whose name starts with `prefix`.
    pub fn firings_with_prefix(&self, prefix: &str) -> u64 {
        self.rule_firings
            .iter()
            .filter(|(k, _)| k.starts_with(prefix))
            .map(|(_, v)| *v)
            .sum()
    }

    pub fn violation(&mut self, msg: String) {
        self.violations.push(msg);
    }

    pub fn merge(&mut self, other: &Stats) {
        self.nodes += other.nodes;
        self.peak_depth = self.peak_depth.max(other.peak_depth);
        for (k, v) in &other.rule_firings {
            *self.rule_firings.entry(k.clone()).or_insert(0) += v;
        }
        self.violations.extend(other.violations.iter().cloned());
        self.good_alg_runs.extend(other.good_alg_runs.iter().copied());
        self.e2_branchings.extend(other.e2_branchings.iter().copied());
    }

    /// Single-line machine-parseable rendering used by the CLI `--stats` flag.
    pub fn render_line(&self, wall_ms: u128) -> String {
        let rules: Vec<String> = self
            .rule_firings
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!(
            "STATS: nodes={} peak_depth={} time_ms={} violations={} rules[{}]",
            self.nodes,
            self.peak_depth,
            wall_ms,
            self.violations.len(),
            rules.join(",")
        )
    }
}

/// Smallest solution size with a witness, when one exists within the cap.
pub type MinOutcome = Option<(usize, Vec<usize>)>;

/// Result of a solver call: the decision, a certified solution when the answer
/// is yes, and the statistics gathered along the way.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub answer: bool,
    pub solution: Option<Vec<usize>>,
    pub stats: Stats,
    /// Smallest solution size found, present in minimize mode.
    pub min_size: Option<usize>,
}

impl SolveOutcome {
    pub fn no(stats: Stats) -> Self {
        SolveOutcome {
            answer: false,
            solution: None,
            stats,
            min_size: None,
        }
    }

    pub fn yes(solution: Vec<usize>, stats: Stats) -> Self {
        SolveOutcome {
            answer: true,
            solution: Some(solution),
            stats,
            min_size: None,
        }
    }
}
