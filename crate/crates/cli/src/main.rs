//! Command-line front end: solve, verify, generate and benchmark instances.

use clap::{Args, Parser, Subcommand, ValueEnum};
use sfvs_core::exact::{solve_split_exact, solve_split_exact_min};
use sfvs_core::gen::{
    gen_chordal, gen_split, gen_structured, ChordalParams, SplitParams, StructuredKind,
};
use sfvs_core::graph::{parse_solution, Instance, Vertex, VerifyMode};
use sfvs_core::oracle::{oracle_solve, OracleResult};
use sfvs_core::split::{solve_split, solve_split_min, split_partition};
use sfvs_core::whole::{solve_chordal, solve_chordal_min};
use sfvs_core::Stats;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

const EXIT_YES: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;

#[derive(Parser)]
#[command(name = "sfvs", about = "Subset feedback vertex set solvers for chordal and split graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance file
    Solve(SolveArgs),
    /// Check a solution file against an instance
    Verify(VerifyArgs),
    /// Generate an instance file
    Gen(GenArgs),
    /// Run several solvers over a directory of instances
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Auto,
    Whole,
    Split,
    ExactSplit,
    Oracle,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Decide,
    Minimize,
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Auto)]
    algo: Algo,
    #[arg(long, value_enum, default_value_t = Mode::Decide)]
    mode: Mode,
    /// Append a machine-parseable STATS: line
    #[arg(long)]
    stats: bool,
    /// Write the solution (or NO) to this file
    #[arg(long)]
    solution_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    solution: PathBuf,
    #[arg(long, value_enum, default_value_t = CheckMode::Triangle)]
    mode: CheckMode,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckMode {
    Triangle,
    Cycle,
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// Random connected chordal instance
    Chordal {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0.3)]
        terminal_prob: f64,
        #[arg(long, default_value_t = 0.2)]
        mark_prob: f64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random split instance: a clique plus an independent set
    Split {
        #[arg(long)]
        n_clique: usize,
        #[arg(long)]
        n_indep: usize,
        #[arg(long, default_value_t = 0.5)]
        edge_prob: f64,
        #[arg(long, default_value_t = 0.3)]
        terminal_prob: f64,
        #[arg(long, default_value_t = 0.2)]
        mark_prob: f64,
        #[arg(long)]
        k: i64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Instances exercising a specific solver structure
    Structured {
        #[arg(long, value_enum)]
        kind: StructKind,
        #[arg(long, default_value_t = 5)]
        size: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StructKind {
    Fish,
    Separator1,
    Separator2,
    InnerTerminal,
}

#[derive(Args)]
struct BenchArgs {
    suite_dir: PathBuf,
    /// Comma-separated list of solvers to run
    #[arg(long, default_value = "auto,oracle", value_delimiter = ',')]
    algos: Vec<String>,
    #[arg(long, value_enum, default_value_t = Mode::Decide)]
    mode: Mode,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(a) => cmd_solve(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Gen(a) => cmd_gen(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    ExitCode::from(code)
}

fn read_instance(path: &Path) -> Result<Instance, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Instance::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

struct RunResult {
    answer: bool,
    min_size: Option<usize>,
    solution: Option<Vec<Vertex>>,
    stats: Stats,
}

fn outcome_to_run(out: sfvs_core::SolveOutcome) -> RunResult {
    RunResult {
        answer: out.answer,
        min_size: out.solution.as_ref().map(|s| s.len()),
        solution: out.solution,
        stats: out.stats,
    }
}

/// Runs the requested solver; Err is a precondition violation message.
fn run_algo(algo: Algo, mode: Mode, inst: &Instance) -> Result<RunResult, String> {
    let algo = if algo == Algo::Auto {
        if split_partition(&inst.graph).is_some() {
            Algo::Split
        } else {
            Algo::Whole
        }
    } else {
        algo
    };
    match (algo, mode) {
        (Algo::Whole, Mode::Decide) => solve_chordal(inst)
            .map(outcome_to_run)
            .map_err(|e| e.to_string()),
        (Algo::Whole, Mode::Minimize) => solve_chordal_min(inst, inst.k)
            .map(|(r, stats)| minimized(r, stats))
            .map_err(|e| e.to_string()),
        (Algo::Split, Mode::Decide) => solve_split(inst)
            .map(outcome_to_run)
            .map_err(|e| e.to_string()),
        (Algo::Split, Mode::Minimize) => solve_split_min(inst, inst.k)
            .map(|(r, stats)| minimized(r, stats))
            .map_err(|e| e.to_string()),
        (Algo::ExactSplit, Mode::Decide) => solve_split_exact(inst)
            .map(outcome_to_run)
            .map_err(|e| e.to_string()),
        (Algo::ExactSplit, Mode::Minimize) => solve_split_exact_min(inst, inst.k)
            .map(|(r, stats)| minimized(r, stats))
            .map_err(|e| e.to_string()),
        (Algo::Oracle, _) => {
            let cap = inst.k.max(0) as usize;
            let OracleResult { size, witness } = oracle_solve(inst, cap);
            Ok(RunResult {
                answer: size.is_some(),
                min_size: size,
                solution: witness,
                stats: Stats::new(),
            })
        }
        (Algo::Auto, _) => unreachable!("auto resolved above"),
    }
}

fn minimized(r: Option<(usize, Vec<Vertex>)>, stats: Stats) -> RunResult {
    match r {
        Some((s, sol)) => RunResult {
            answer: true,
            min_size: Some(s),
            solution: Some(sol),
            stats,
        },
        None => RunResult {
            answer: false,
            min_size: None,
            solution: None,
            stats,
        },
    }
}

fn cmd_solve(a: &SolveArgs) -> u8 {
    let inst = match read_instance(&a.file) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("parse error: {e}");
            return EXIT_PARSE;
        }
    };
    let start = Instant::now();
    let run = match run_algo(a.algo, a.mode, &inst) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("precondition violation: {e}");
            return EXIT_PRECONDITION;
        }
    };
    let elapsed = start.elapsed();
    if run.answer {
        println!("YES");
        if let Some(sol) = &run.solution {
            for &v in sol {
                println!("{}", v + 1);
            }
        }
    } else {
        println!("NO");
    }
    if let Some(path) = &a.solution_out {
        let mut text = String::new();
        match &run.solution {
            Some(sol) if run.answer => {
                for &v in sol {
                    let _ = writeln!(text, "{}", v + 1);
                }
            }
            _ => text.push_str("NO\n"),
        }
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("cannot write {}: {e}", path.display());
            return EXIT_PARSE;
        }
    }
    if a.stats {
        println!("{}", run.stats.render_line(elapsed.as_millis()));
    }
    if run.answer {
        EXIT_YES
    } else {
        EXIT_NO
    }
}

fn cmd_verify(a: &VerifyArgs) -> u8 {
    let inst = match read_instance(&a.instance) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("parse error: {e}");
            return EXIT_PARSE;
        }
    };
    let text = match std::fs::read_to_string(&a.solution) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("parse error: cannot read {}: {e}", a.solution.display());
            return EXIT_PARSE;
        }
    };
    let sol = match parse_solution(&text) {
        Ok(Some(s)) => s,
        Ok(None) => {
            eprintln!("solution file says NO; nothing to verify");
            return EXIT_NO;
        }
        Err(e) => {
            eprintln!("parse error: {}: {e}", a.solution.display());
            return EXIT_PARSE;
        }
    };
    for &v in &sol {
        if !inst.graph.is_live(v) {
            println!("REJECT: vertex {} is not in the instance", v + 1);
            return EXIT_NO;
        }
    }
    if sol.len() as i64 > inst.k {
        println!(
            "REJECT: solution has {} vertices, budget is {}",
            sol.len(),
            inst.k
        );
        return EXIT_NO;
    }
    let in_sol: std::collections::BTreeSet<Vertex> = sol.iter().copied().collect();
    for (u, v) in inst.graph.marked_edges() {
        if !in_sol.contains(&u) && !in_sol.contains(&v) {
            println!("REJECT: marked edge {} {} uncovered", u + 1, v + 1);
            return EXIT_NO;
        }
    }
    match a.mode {
        CheckMode::Triangle => {
            for (x, y, z) in inst.t_triangles() {
                if !in_sol.contains(&x) && !in_sol.contains(&y) && !in_sol.contains(&z) {
                    println!(
                        "REJECT: terminal triangle {} {} {} survives",
                        x + 1,
                        y + 1,
                        z + 1
                    );
                    return EXIT_NO;
                }
            }
        }
        CheckMode::Cycle => {
            let ok = inst
                .verify_solution(&sol, VerifyMode::Cycle)
                .expect("ids checked above");
            if !ok {
                for t in inst.terminals() {
                    if in_sol.contains(&t) {
                        continue;
                    }
                    let mut removed = in_sol.clone();
                    removed.insert(t);
                    let comps = inst.graph.components_without(&removed);
                    let nbrs: Vec<Vertex> = inst
                        .graph
                        .neighbors(t)
                        .filter(|u| !in_sol.contains(u))
                        .collect();
                    let on_cycle = nbrs.iter().any(|&x| {
                        nbrs.iter().any(|&y| {
                            x < y && comps.iter().any(|c| c.contains(&x) && c.contains(&y))
                        })
                    });
                    if on_cycle {
                        println!("REJECT: terminal {} lies on a cycle", t + 1);
                        return EXIT_NO;
                    }
                }
                println!("REJECT: solution fails the cycle check");
                return EXIT_NO;
            }
        }
    }
    println!("OK");
    EXIT_YES
}

fn cmd_gen(a: &GenArgs) -> u8 {
    let (inst, out) = match &a.kind {
        GenKind::Chordal {
            n,
            density,
            terminal_prob,
            mark_prob,
            k,
            seed,
            out,
        } => (
            gen_chordal(&ChordalParams {
                n: *n,
                extra_edge_density: *density,
                terminal_prob: *terminal_prob,
                mark_prob: *mark_prob,
                k: *k,
                seed: *seed,
            }),
            out.clone(),
        ),
        GenKind::Split {
            n_clique,
            n_indep,
            edge_prob,
            terminal_prob,
            mark_prob,
            k,
            seed,
            out,
        } => (
            gen_split(&SplitParams {
                n_clique: *n_clique,
                n_indep: *n_indep,
                edge_prob: *edge_prob,
                terminal_prob: *terminal_prob,
                mark_prob: *mark_prob,
                k: *k,
                seed: *seed,
            }),
            out.clone(),
        ),
        GenKind::Structured {
            kind,
            size,
            seed,
            out,
        } => {
            let k = match kind {
                StructKind::Fish => StructuredKind::Fish,
                StructKind::Separator1 => StructuredKind::Separator1,
                StructKind::Separator2 => StructuredKind::Separator2,
                StructKind::InnerTerminal => StructuredKind::InnerTerminal,
            };
            (gen_structured(k, *size, *seed), out.clone())
        }
    };
    let inst = match inst {
        Ok(i) => i,
        Err(e) => {
            eprintln!("bad parameters: {e}");
            return EXIT_PARSE;
        }
    };
    if let Err(e) = std::fs::write(&out, inst.to_text()) {
        eprintln!("cannot write {}: {e}", out.display());
        return EXIT_PARSE;
    }
    EXIT_YES
}

fn parse_algo(name: &str) -> Option<Algo> {
    match name {
        "auto" => Some(Algo::Auto),
        "whole" => Some(Algo::Whole),
        "split" => Some(Algo::Split),
        "exact-split" => Some(Algo::ExactSplit),
        "oracle" => Some(Algo::Oracle),
        _ => None,
    }
}

fn cmd_bench(a: &BenchArgs) -> u8 {
    let mut algos = Vec::new();
    for name in &a.algos {
        match parse_algo(name) {
            Some(x) => algos.push((name.clone(), x)),
            None => {
                eprintln!("unknown algorithm `{name}`");
                return EXIT_PARSE;
            }
        }
    }
    let mut entries: Vec<PathBuf> = match std::fs::read_dir(&a.suite_dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect(),
        Err(e) => {
            eprintln!("cannot read {}: {e}", a.suite_dir.display());
            return EXIT_PARSE;
        }
    };
    entries.sort();
    println!(
        "{:<28} {:<12} {:<6} {:<6} {:>10} {:>9}",
        "instance", "algo", "ans", "min", "nodes", "time_ms"
    );
    let mut mismatch = false;
    for path in &entries {
        let inst = match read_instance(path) {
            Ok(i) => i,
            Err(e) => {
                eprintln!("parse error: {e}");
                return EXIT_PARSE;
            }
        };
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut answers: Vec<(String, bool, Option<usize>)> = Vec::new();
        for (aname, algo) in &algos {
            let start = Instant::now();
            match run_algo(*algo, a.mode, &inst) {
                Ok(run) => {
                    let ms = start.elapsed().as_millis();
                    let min = match a.mode {
                        Mode::Minimize => run
                            .min_size
                            .map(|s| s.to_string())
                            .unwrap_or_else(|| "-".into()),
                        Mode::Decide => "-".into(),
                    };
                    println!(
                        "{:<28} {:<12} {:<6} {:<6} {:>10} {:>9}",
                        name,
                        aname,
                        if run.answer { "YES" } else { "NO" },
                        min,
                        run.stats.nodes,
                        ms
                    );
                    warn_on_bounds(&name, aname, &inst, &run.stats);
                    for v in &run.stats.violations {
                        eprintln!("warning: {name} [{aname}]: {v}");
                    }
                    let min_cmp = match a.mode {
                        Mode::Minimize => run.min_size,
                        Mode::Decide => None,
                    };
                    answers.push((aname.clone(), run.answer, min_cmp));
                }
                Err(e) => {
                    println!(
                        "{:<28} {:<12} {:<6} {:<6} {:>10} {:>9}",
                        name, aname, "skip", "-", "-", "-"
                    );
                    eprintln!("note: {name} [{aname}]: {e}");
                }
            }
        }
        if let Some(msg) = find_mismatch(&answers) {
            eprintln!("MISMATCH on {name}: {msg}");
            mismatch = true;
        }
    }
    if mismatch {
        EXIT_NO
    } else {
        EXIT_YES
    }
}

/// Compares per-algorithm results for one instance; answers and minima must
/// all agree.
fn find_mismatch(answers: &[(String, bool, Option<usize>)]) -> Option<String> {
    for pair in answers.windows(2) {
        if pair[0].1 != pair[1].1 || pair[0].2 != pair[1].2 {
            return Some(format!(
                "{}={:?} vs {}={:?}",
                pair[0].0,
                (pair[0].1, pair[0].2),
                pair[1].0,
                (pair[1].1, pair[1].2)
            ));
        }
    }
    None
}

/// Advisory search-tree bounds; exceeding them is reported, not fatal.
fn warn_on_bounds(name: &str, algo: &str, inst: &Instance, stats: &Stats) {
    let n = inst.graph.num_live() as f64;
    let k = inst.k.max(0) as f64;
    let bound = 10.0 * n.powi(3) * 1.820f64.powf(k);
    if stats.nodes as f64 > bound {
        eprintln!(
            "warning: {name} [{algo}]: {} nodes exceeds 10*n^3*1.820^k = {bound:.0}",
            stats.nodes
        );
    }
    for run in &stats.good_alg_runs {
        let n = run.n_entry.max(1) as f64;
        let mu = (run.mu_thirds_entry as f64 / 3.0).max(0.0);
        let gbound = 10.0 * n * n * 1.820f64.powf(mu);
        if run.nodes as f64 > gbound {
            eprintln!(
                "warning: {name} [{algo}]: good-instance run used {} nodes, bound {gbound:.0}",
                run.nodes
            );
        }
    }
}
