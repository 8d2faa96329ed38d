//! Command-line driver. Reads a DIMACS CNF (or an iCNF document in conquer
//! mode), runs the requested solver mode, and reports in SAT-competition
//! style: `c` comments, one `s` verdict line, `v` model lines on SAT. Exit
//! codes follow the usual convention: 10 for SAT, 20 for UNSAT, 0 for runs
//! that end without a verdict, 1 for usage and input errors.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use ccc_core::{
    conquer_parallel, conquer_serial, parse_dimacs, parse_icnf, run_ccc, run_ccc_threads,
    run_cdcl_only, run_lookahead_only, write_icnf, AbortReason, Assignment, CccConfig, CccMode,
    CccOutcome, CccRun, Cdcl, CdclConfig, CnfFormula, ConquerOutcome, ConquerResult, CubeResult,
    HeuristicConfig, IcnfDocument, LBool, LaConfig, LaMode, Peer, Schedule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Conflict-driven search alone.
    Cdcl,
    /// Lookahead search alone.
    Lookahead,
    /// Both peers race without a cutoff.
    CccInf,
    /// Cut cubes off and write them as an iCNF document.
    Cube,
    /// Solve the cubes of an iCNF document.
    Conquer,
    /// Race with the predictor armed; fall back to CDCL if it aborts.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CutoffArg {
    /// Classic scheme: lookahead splits alone and emits at the threshold.
    Cc,
    /// Concurrent scheme: the CDCL peer races while cubes are cut.
    Ccc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchedulerArg {
    /// Single-threaded, reproducible interleaving.
    Deterministic,
    /// One OS thread per peer.
    Threads,
}

#[derive(Parser)]
#[command(name = "ccc", version, about = "Concurrent cube-and-conquer SAT solver")]
struct Cli {
    /// DIMACS CNF input; an iCNF document in conquer mode.
    input: PathBuf,

    /// Solver mode.
    #[arg(long, value_enum)]
    mode: ModeArg,

    /// Cutoff scheme; cube mode only.
    #[arg(long, value_enum)]
    cutoff: Option<CutoffArg>,

    /// Recorded in the report; every deterministic run ignores it.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Step script for the deterministic scheduler: `la` and `cdcl` tokens
    /// separated by whitespace, each optionally repeated as `la*100`;
    /// `#` starts a comment.
    #[arg(long)]
    schedule: Option<PathBuf>,

    /// How the two peers share the machine.
    #[arg(long, value_enum, default_value_t = SchedulerArg::Deterministic)]
    scheduler: SchedulerArg,

    /// Conquer worker count; conquer mode only.
    #[arg(long)]
    workers: Option<usize>,

    /// Predictor budget under the deterministic scheduler.
    #[arg(long)]
    budget_propagations: Option<u64>,

    /// Predictor budget under the thread scheduler, in seconds.
    #[arg(long)]
    budget_seconds: Option<f64>,

    /// Where cube mode writes its iCNF document; required there.
    #[arg(long)]
    icnf_out: Option<PathBuf>,

    /// Write the run's key=value counters to this file.
    #[arg(long)]
    stats_out: Option<PathBuf>,

    /// Write the run's event trace to this file.
    #[arg(long)]
    trace_out: Option<PathBuf>,

    /// Starting value of the classic cutoff threshold.
    #[arg(long)]
    cc_init_threshold: Option<f64>,

    /// Classic threshold multiplier on a solved cube or a too-deep branch.
    #[arg(long)]
    cc_decay: Option<f64>,

    /// Classic threshold multiplier per decision.
    #[arg(long)]
    cc_growth: Option<f64>,

    /// Starting value of the concurrent cutoff threshold.
    #[arg(long)]
    ccc_init_threshold: Option<f64>,

    /// Difficulty factor for cubes the CDCL peer refuted.
    #[arg(long)]
    ccc_cdcl_factor: Option<f64>,

    /// Difficulty factor for cubes the lookahead refuted.
    #[arg(long)]
    ccc_la_factor: Option<f64>,

    /// Weight of the new target in the concurrent threshold filter.
    #[arg(long)]
    ccc_filter: Option<f64>,

    /// Concurrent threshold multiplier per cube cut off.
    #[arg(long)]
    ccc_cutoff_growth: Option<f64>,

    /// Decision depth the classic scheme counts as too deep.
    #[arg(long)]
    too_deep: Option<u32>,

    /// Leaf discrepancy count past which the predictor aborts.
    #[arg(long)]
    predictor_discrepancy_limit: Option<u32>,

    /// Lookahead wins the predictor needs to let the race continue.
    #[arg(long)]
    predictor_min_la_wins: Option<u64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    }
}

fn heuristics_from(cli: &Cli) -> HeuristicConfig {
    let mut h = HeuristicConfig::default();
    macro_rules! take {
        ($($field:ident),*) => {
            $(if let Some(v) = cli.$field { h.$field = v; })*
        };
    }
    take!(
        cc_init_threshold,
        cc_decay,
        cc_growth,
        ccc_init_threshold,
        ccc_cdcl_factor,
        ccc_la_factor,
        ccc_filter,
        ccc_cutoff_growth,
        too_deep,
        predictor_discrepancy_limit,
        predictor_min_la_wins
    );
    if let Some(v) = cli.budget_propagations {
        h.predictor_budget_propagations = v;
    }
    if let Some(v) = cli.budget_seconds {
        h.predictor_budget_seconds = v;
    }
    h
}

fn parse_schedule(text: &str) -> Result<Vec<Peer>, String> {
    let mut steps = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split_whitespace() {
            let (name, count) = match token.split_once('*') {
                Some((name, count)) => {
                    let count: usize = count
                        .parse()
                        .map_err(|_| format!("bad repeat count in schedule token {token:?}"))?;
                    (name, count)
                }
                None => (token, 1),
            };
            let peer = match name {
                "la" => Peer::Lookahead,
                "cdcl" => Peer::Cdcl,
                other => return Err(format!("unknown peer {other:?} in the schedule")),
            };
            steps.extend(std::iter::repeat(peer).take(count));
        }
    }
    if steps.is_empty() {
        return Err("the schedule file contains no steps".into());
    }
    Ok(steps)
}

fn validate(cli: &Cli) -> Result<(), String> {
    if cli.mode != ModeArg::Cube {
        if cli.cutoff.is_some() {
            return Err("--cutoff only applies to cube mode".into());
        }
        if cli.icnf_out.is_some() {
            return Err("--icnf-out only applies to cube mode".into());
        }
    } else if cli.icnf_out.is_none() {
        return Err("cube mode needs --icnf-out".into());
    }
    if cli.mode != ModeArg::Conquer && cli.workers.is_some() {
        return Err("--workers only applies to conquer mode".into());
    }
    if let Some(0) = cli.workers {
        return Err("--workers needs at least one worker".into());
    }
    if cli.schedule.is_some() {
        if cli.scheduler == SchedulerArg::Threads {
            return Err("a schedule script requires the deterministic scheduler".into());
        }
        let concurrent = matches!(cli.mode, ModeArg::CccInf | ModeArg::Auto)
            || (cli.mode == ModeArg::Cube && cli.cutoff != Some(CutoffArg::Cc));
        if !concurrent {
            return Err("--schedule only applies to modes that run both peers".into());
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<i32, String> {
    validate(cli)?;
    let text = fs::read_to_string(&cli.input)
        .map_err(|e| format!("cannot read {}: {e}", cli.input.display()))?;
    println!("c ccc");
    println!("c mode {}", mode_name(cli.mode));
    println!("c input {}", cli.input.display());
    println!("c seed {}", cli.seed);

    if cli.mode == ModeArg::Conquer {
        return run_conquer(cli, &text);
    }

    let f = parse_dimacs(&text).map_err(|e| e.to_string())?;
    let heuristics = heuristics_from(cli);
    let schedule = match &cli.schedule {
        Some(path) => {
            let script = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Schedule::Script(parse_schedule(&script)?)
        }
        None => Schedule::RoundRobin,
    };

    match cli.mode {
        ModeArg::Cdcl => {
            let run = run_cdcl_only(&f, CdclConfig::default());
            finish(cli, &f, run, None)
        }
        ModeArg::Lookahead => {
            let run = run_lookahead_only(&f, LaMode::Pure, &heuristics, &LaConfig::default());
            finish(cli, &f, run, None)
        }
        ModeArg::Cube if cli.cutoff == Some(CutoffArg::Cc) => {
            let run = run_lookahead_only(&f, LaMode::CcCutoff, &heuristics, &LaConfig::default());
            write_cubes(cli, &f, &run)?;
            finish(cli, &f, run, None)
        }
        ModeArg::Cube => {
            let config = CccConfig {
                mode: CccMode::Cutoff,
                schedule,
                predictor: false,
                heuristics,
                cdcl: CdclConfig::default(),
                lookahead: LaConfig::default(),
            };
            let run = launch(cli, &f, &config);
            write_cubes(cli, &f, &run)?;
            finish(cli, &f, run, None)
        }
        ModeArg::CccInf | ModeArg::Auto => {
            let config = CccConfig {
                mode: CccMode::Inf,
                schedule,
                predictor: cli.mode == ModeArg::Auto,
                heuristics,
                cdcl: CdclConfig::default(),
                lookahead: LaConfig::default(),
            };
            let run = launch(cli, &f, &config);
            if run.outcome == CccOutcome::Aborted(AbortReason::PredictorCdclDominates) {
                println!("c ABORTED-TO-CDCL");
                let fallback = run_cdcl_only(&f, CdclConfig::default());
                return finish(cli, &f, fallback, Some(run));
            }
            finish(cli, &f, run, None)
        }
        ModeArg::Conquer => unreachable!("handled above"),
    }
}

fn mode_name(mode: ModeArg) -> &'static str {
    match mode {
        ModeArg::Cdcl => "cdcl",
        ModeArg::Lookahead => "lookahead",
        ModeArg::CccInf => "ccc-inf",
        ModeArg::Cube => "cube",
        ModeArg::Conquer => "conquer",
        ModeArg::Auto => "auto",
    }
}

fn launch(cli: &Cli, f: &CnfFormula, config: &CccConfig) -> CccRun {
    match cli.scheduler {
        SchedulerArg::Deterministic => run_ccc(f, config),
        SchedulerArg::Threads => run_ccc_threads(f, config),
    }
}

fn write_cubes(cli: &Cli, f: &CnfFormula, run: &CccRun) -> Result<(), String> {
    let path = cli.icnf_out.as_ref().expect("validated");
    let doc = IcnfDocument {
        formula: f.clone(),
        cubes: run.cubes.emitted.clone(),
    };
    fs::write(path, write_icnf(&doc)).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    println!("c wrote {} cubes to {}", doc.cubes.len(), path.display());
    Ok(())
}

/// Prints the report and the verdict, writes the side files, and maps the
/// outcome to an exit code. When an aborted race is handed along, its trace
/// precedes the fallback's in the trace file and its predictor counters are
/// merged into the report.
fn finish(
    cli: &Cli,
    f: &CnfFormula,
    run: CccRun,
    aborted: Option<CccRun>,
) -> Result<i32, String> {
    let mut stats_lines: Vec<String> = run
        .stats
        .render()
        .lines()
        .map(|l| l.to_string())
        .collect();
    if let Some(aborted) = &aborted {
        for line in aborted.stats.render().lines() {
            if line.starts_with("predictor_") {
                stats_lines.push(line.to_string());
            }
        }
        stats_lines.sort();
    }
    for line in &stats_lines {
        println!("c {line}");
    }
    if let Some(path) = &cli.stats_out {
        let mut doc = stats_lines.join("\n");
        doc.push('\n');
        fs::write(path, doc).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(path) = &cli.trace_out {
        let mut lines = Vec::new();
        if let Some(aborted) = &aborted {
            lines.extend(aborted.trace.iter().cloned());
        }
        lines.extend(run.trace.iter().cloned());
        let mut doc = lines.join("\n");
        doc.push('\n');
        fs::write(path, doc).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    match run.outcome {
        CccOutcome::Sat { model, winner } => {
            println!("c winner {}", peer_name(winner));
            println!("s SATISFIABLE");
            print_model(f, &model);
            Ok(10)
        }
        CccOutcome::Unsat { winner } => {
            println!("c winner {}", peer_name(winner));
            println!("s UNSATISFIABLE");
            Ok(20)
        }
        CccOutcome::CubesEmitted => {
            println!("s UNKNOWN");
            Ok(0)
        }
        CccOutcome::Aborted(reason) => {
            let word = match reason {
                AbortReason::PredictorCdclDominates => "predictor",
                AbortReason::ScheduleExhausted => "schedule exhausted",
            };
            println!("c aborted: {word}");
            println!("s UNKNOWN");
            Ok(0)
        }
    }
}

fn peer_name(peer: Peer) -> &'static str {
    match peer {
        Peer::Lookahead => "la",
        Peer::Cdcl => "cdcl",
    }
}

fn print_model(f: &CnfFormula, model: &Assignment) {
    let lits: Vec<String> = f
        .vars()
        .map(|var| {
            let lit = if model.value(var) == LBool::True {
                var.positive()
            } else {
                var.negative()
            };
            lit.to_string()
        })
        .collect();
    for chunk in lits.chunks(20) {
        println!("v {}", chunk.join(" "));
    }
    println!("v 0");
}

fn run_conquer(cli: &Cli, text: &str) -> Result<i32, String> {
    let doc = parse_icnf(text).map_err(|e| e.to_string())?;
    let workers = cli.workers.unwrap_or(1);
    let result = if workers == 1 {
        let mut solver = Cdcl::new(&doc.formula, CdclConfig::default());
        conquer_serial(&doc, &mut solver)
    } else {
        conquer_parallel(&doc, workers, &CdclConfig::default())
    }
    .map_err(|e| e.to_string())?;

    let refuted = result
        .per_cube
        .iter()
        .filter(|s| s.result == CubeResult::Refuted)
        .count();
    let conflicts: u64 = result.per_cube.iter().map(|s| s.conflicts).sum();
    let propagations: u64 = result.per_cube.iter().map(|s| s.propagations).sum();
    let mut stats_lines = vec![
        format!("attempted={}", result.per_cube.len()),
        format!("conflicts={conflicts}"),
        format!("cubes={}", doc.cubes.len()),
        format!("propagations={propagations}"),
        format!("refuted={refuted}"),
    ];
    if let ConquerOutcome::Sat {
        winning_cube_index, ..
    } = &result.outcome
    {
        stats_lines.push(format!("sat_cube={winning_cube_index}"));
    }
    stats_lines.push(format!("workers={workers}"));
    for line in &stats_lines {
        println!("c {line}");
    }
    if let Some(path) = &cli.stats_out {
        let mut out = stats_lines.join("\n");
        out.push('\n');
        fs::write(path, out).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if let Some(path) = &cli.trace_out {
        fs::write(path, "").map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    report_conquer(&doc, &result)
}

fn report_conquer(doc: &IcnfDocument, result: &ConquerResult) -> Result<i32, String> {
    match &result.outcome {
        ConquerOutcome::Sat {
            model,
            winning_cube_index,
        } => {
            println!("c winning cube {winning_cube_index}");
            println!("s SATISFIABLE");
            print_model(&doc.formula, model);
            Ok(10)
        }
        ConquerOutcome::Unsat => {
            println!("s UNSATISFIABLE");
            Ok(20)
        }
    }
}
