//! Solvers for (generalized) subset feedback vertex set on chordal and split
//! graphs: a measure-driven branching algorithm for split instances, a
//! divide-and-conquer solver for chordal instances, an exact variant for
//! markless split instances, plus a brute-force oracle and seeded instance
//! generators for testing all of it.

pub mod chordal;
pub mod dm;
pub mod exact;
pub mod gen;
pub mod graph;
pub mod oracle;
pub mod split;
pub mod stats;
pub mod whole;

pub use graph::{parse_solution, Graph, Instance, ParseError, Vertex, VerifyMode};
pub use stats::{SolveOutcome, Stats};
