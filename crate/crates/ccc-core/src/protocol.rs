//! Peer fabric: the messages the two engines exchange, the queues that
//! carry them, the shared trace, and the run orchestrators.
//!
//! The lookahead peer streams its decision path into `Q_decision` as
//! [`DecisionMsg`]s; the CDCL peer streams refuted cube ids back through
//! `Q_solved` as [`SolvedMsg`]s. Either side may be arbitrarily behind, so
//! both apply a staleness rule before acting on a message. Runs are driven
//! either by a deterministic single-threaded scheduler that interleaves
//! bounded peer steps by script (reproducible bit for bit), or by one
//! thread per peer.

use std::collections::VecDeque;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use crate::cdcl::{Cdcl, CdclConfig, CdclOutcome};
use crate::formula::{Assignment, CnfFormula};
use crate::heuristics::{
    HeuristicConfig, PredictorEvent, PredictorState, PredictorVerdict,
};
use crate::lookahead::{
    CubePhaseOutput, LaConfig, LaEngine, LaMode, LaStep, Refuter,
};
use crate::verify::check_model;

/// Identifier of a node in the cube tree, allocated by the lookahead peer
/// in depth-first visitation order starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CubeId(pub u64);

impl fmt::Display for CubeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Lookahead → CDCL: "my path now ends with `lit`; keep the first
/// `backtrack_level` of your assumptions and append this one".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecisionMsg {
    pub cube_id: CubeId,
    pub backtrack_level: u32,
    pub lit: crate::formula::Lit,
}

/// CDCL → lookahead: the cube with this id is unsatisfiable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolvedMsg {
    pub cube_id: CubeId,
}

/// Unbounded FIFO between one fixed producer and one fixed consumer.
/// `head` exists because the lookahead peer must inspect a solved message
/// repeatedly while unwinding before finally consuming it.
#[derive(Debug, Default)]
pub struct MsgQueue<T> {
    inner: Mutex<VecDeque<T>>,
}

impl<T: Copy> MsgQueue<T> {
    pub fn new() -> MsgQueue<T> {
        MsgQueue { inner: Mutex::new(VecDeque::new()) }
    }

    pub fn send(&self, msg: T) {
        self.inner.lock().unwrap().push_back(msg);
    }

    pub fn pop(&self) -> Option<T> {
        self.inner.lock().unwrap().pop_front()
    }

    pub fn head(&self) -> Option<T> {
        self.inner.lock().unwrap().front().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.lock().unwrap().is_empty()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().len()
    }
}

/// Which engine an event or outcome belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Peer {
    Lookahead,
    Cdcl,
}

impl fmt::Display for Peer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Peer::Lookahead => write!(f, "la"),
            Peer::Cdcl => write!(f, "cdcl"),
        }
    }
}

/// Shared append-only event log. Every line gets a global sequence number,
/// so a threaded run still renders in a single total order.
#[derive(Debug, Default)]
pub struct TraceSink {
    seq: AtomicU64,
    lines: Mutex<Vec<(u64, String)>>,
}

impl TraceSink {
    pub fn new() -> TraceSink {
        TraceSink { seq: AtomicU64::new(0), lines: Mutex::new(Vec::new()) }
    }

    /// Records one event. `event` is the event name followed by its
    /// space-separated arguments, e.g. `"close 6 cdcl"`.
    pub fn record(&self, peer: Peer, event: &str) {
        let n = self.seq.fetch_add(1, Ordering::Relaxed);
        self.lines.lock().unwrap().push((n, format!("SEQ {n} {peer} {event}")));
    }

    /// The recorded lines in sequence order.
    pub fn lines(&self) -> Vec<String> {
        let mut lines = self.lines.lock().unwrap().clone();
        lines.sort_by_key(|(n, _)| *n);
        lines.into_iter().map(|(_, l)| l).collect()
    }

    /// All lines joined with newlines, with a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in self.lines() {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Monotonic stop signal checked by both peers at step boundaries.
#[derive(Debug, Default)]
pub struct AbortFlag {
    flag: AtomicBool,
}

impl AbortFlag {
    pub fn new() -> AbortFlag {
        AbortFlag { flag: AtomicBool::new(false) }
    }

    pub fn set(&self) {
        self.flag.store(true, Ordering::SeqCst);
    }

    pub fn is_set(&self) -> bool {
        self.flag.load(Ordering::SeqCst)
    }
}

/// Lookahead-side staleness: a solved message is stale when its cube is no
/// longer on the current root path.
pub fn solved_is_stale(msg: &SolvedMsg, path: &[CubeId]) -> bool {
    !path.contains(&msg.cube_id)
}

/// CDCL-side staleness: a decision message is stale when it asks to keep
/// more assumptions than the stack holds, which means the lookahead peer
/// has since abandoned that part of the tree.
pub fn decision_is_stale(msg: &DecisionMsg, assumption_count: usize) -> bool {
    msg.backtrack_level as usize > assumption_count
}

/// How peer steps are interleaved under the deterministic scheduler.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Schedule {
    /// Lookahead first, then strict alternation.
    RoundRobin,
    /// Exactly this sequence of steps; the run aborts if it ends early.
    Script(Vec<Peer>),
}

impl Schedule {
    fn get(&self, i: usize) -> Option<Peer> {
        match self {
            Schedule::RoundRobin => {
                Some(if i % 2 == 0 { Peer::Lookahead } else { Peer::Cdcl })
            }
            Schedule::Script(steps) => steps.get(i).copied(),
        }
    }
}

/// Whether the lookahead peer may cut cubes off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CccMode {
    /// No cutoff: the peers race until one settles the formula.
    Inf,
    /// Difficulty-based cutoff: emitted cubes are collected for a later
    /// conquer phase.
    Cutoff,
}

/// Why a run stopped without an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbortReason {
    /// The predictor decided plain CDCL would do better.
    PredictorCdclDominates,
    /// A scripted schedule ran out before either peer finished.
    ScheduleExhausted,
}

/// Final state of a concurrent run.
#[derive(Debug, Clone, PartialEq)]
pub enum CccOutcome {
    Sat { model: Assignment, winner: Peer },
    Unsat { winner: Peer },
    /// Cutoff mode exhausted the tree with cubes left over for conquer.
    CubesEmitted,
    Aborted(AbortReason),
}

/// Counters reported after a run. `render` produces the flat key=value
/// document the CLI writes; keys are sorted and wall time is only present
/// for threaded runs, so deterministic runs render byte-identically.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunStats {
    pub la_steps: u64,
    pub cdcl_steps: u64,
    pub la_propagations: u64,
    pub cdcl_propagations: u64,
    pub cdcl_conflicts: u64,
    pub cdcl_decisions: u64,
    pub cdcl_learned: u64,
    pub floor_violations: u64,
    pub cubes_emitted: u64,
    pub refuted_by_la: u64,
    pub refuted_by_cdcl: u64,
    /// `discrepancy_histogram[d]` counts closed leaves with `d` discrepancies.
    pub discrepancy_histogram: Vec<u64>,
    pub predictor_verdict: Option<PredictorVerdict>,
    pub predictor_la_wins: Option<u64>,
    pub wall_ms: Option<u64>,
}

impl RunStats {
    fn count_leaf(&mut self, refuter: Refuter, discrepancies: u32) {
        match refuter {
            Refuter::Lookahead => self.refuted_by_la += 1,
            Refuter::Cdcl => self.refuted_by_cdcl += 1,
            Refuter::Cutoff => self.cubes_emitted += 1,
        }
        let d = discrepancies as usize;
        if self.discrepancy_histogram.len() <= d {
            self.discrepancy_histogram.resize(d + 1, 0);
        }
        self.discrepancy_histogram[d] += 1;
    }

    pub fn render(&self) -> String {
        use std::collections::BTreeMap;
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        kv.insert("la_steps".into(), self.la_steps.to_string());
        kv.insert("cdcl_steps".into(), self.cdcl_steps.to_string());
        kv.insert("la_propagations".into(), self.la_propagations.to_string());
        kv.insert("cdcl_propagations".into(), self.cdcl_propagations.to_string());
        kv.insert("cdcl_conflicts".into(), self.cdcl_conflicts.to_string());
        kv.insert("cdcl_decisions".into(), self.cdcl_decisions.to_string());
        kv.insert("cdcl_learned".into(), self.cdcl_learned.to_string());
        kv.insert("floor_violations".into(), self.floor_violations.to_string());
        kv.insert("cubes_emitted".into(), self.cubes_emitted.to_string());
        kv.insert("refuted_by_la".into(), self.refuted_by_la.to_string());
        kv.insert("refuted_by_cdcl".into(), self.refuted_by_cdcl.to_string());
        for (d, n) in self.discrepancy_histogram.iter().enumerate() {
            if *n > 0 {
                kv.insert(format!("discrepancies.{d}"), n.to_string());
            }
        }
        if let Some(v) = self.predictor_verdict {
            let word = match v {
                PredictorVerdict::Undecided => "undecided",
                PredictorVerdict::Continue => "continue",
                PredictorVerdict::AbortToCdcl => "abort-to-cdcl",
            };
            kv.insert("predictor_verdict".into(), word.into());
        }
        if let Some(w) = self.predictor_la_wins {
            kv.insert("predictor_la_wins".into(), w.to_string());
        }
        if let Some(ms) = self.wall_ms {
            kv.insert("wall_ms".into(), ms.to_string());
        }
        let mut out = String::new();
        for (k, v) in kv {
            out.push_str(&k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

/// Everything a finished run hands back: the verdict, any cubes collected
/// for conquer, the full event trace, and the counters.
#[derive(Debug)]
pub struct CccRun {
    pub outcome: CccOutcome,
    pub cubes: CubePhaseOutput,
    pub trace: Vec<String>,
    pub stats: RunStats,
}

/// Configuration of a concurrent run.
#[derive(Debug, Clone)]
pub struct CccConfig {
    pub mode: CccMode,
    pub schedule: Schedule,
    /// Enables the effectiveness predictor; its budget comes from the
    /// heuristic configuration (propagations here, wall seconds under
    /// threads).
    pub predictor: bool,
    pub heuristics: HeuristicConfig,
    pub cdcl: CdclConfig,
    pub lookahead: LaConfig,
}

impl Default for CccConfig {
    fn default() -> Self {
        CccConfig {
            mode: CccMode::Inf,
            schedule: Schedule::RoundRobin,
            predictor: false,
            heuristics: HeuristicConfig::default(),
            cdcl: CdclConfig::default(),
            lookahead: LaConfig::default(),
        }
    }
}

fn la_mode_for(mode: CccMode) -> LaMode {
    match mode {
        CccMode::Inf => LaMode::CccInf,
        CccMode::Cutoff => LaMode::CccCutoff,
    }
}

/// Runs both peers under the deterministic scheduler. The returned trace
/// and stats are pure functions of the formula, the configuration, and the
/// schedule.
pub fn run_ccc(f: &CnfFormula, config: &CccConfig) -> CccRun {
    let qd: MsgQueue<DecisionMsg> = MsgQueue::new();
    let qs: MsgQueue<SolvedMsg> = MsgQueue::new();
    let trace = TraceSink::new();
    let mut la = LaEngine::new(f, la_mode_for(config.mode), &config.heuristics, &config.lookahead);
    let mut cdcl = Cdcl::new(f, config.cdcl.clone());
    let mut stats = RunStats::default();
    let mut predictor = config
        .predictor
        .then(|| PredictorState::new(config.heuristics.predictor_budget_propagations, &config.heuristics));

    let mut outcome = None;
    let mut step_index = 0;
    while outcome.is_none() {
        let peer = match config.schedule.get(step_index) {
            Some(p) => p,
            None => {
                outcome = Some(CccOutcome::Aborted(AbortReason::ScheduleExhausted));
                break;
            }
        };
        step_index += 1;
        let mut leaf = None;
        match peer {
            Peer::Lookahead => {
                stats.la_steps += 1;
                match la.step(Some(&qd), Some(&qs), &trace) {
                    LaStep::Sat(model) => {
                        debug_assert_eq!(check_model(f, &model), Ok(true));
                        trace.record(Peer::Lookahead, "sat");
                        outcome = Some(CccOutcome::Sat { model, winner: Peer::Lookahead });
                    }
                    LaStep::Unsat => {
                        if config.mode == CccMode::Cutoff && !la.output().emitted.is_empty() {
                            outcome = Some(CccOutcome::CubesEmitted);
                        } else {
                            trace.record(Peer::Lookahead, "unsat");
                            outcome = Some(CccOutcome::Unsat { winner: Peer::Lookahead });
                        }
                    }
                    LaStep::Progress { closed } => leaf = closed,
                }
            }
            Peer::Cdcl => {
                stats.cdcl_steps += 1;
                match cdcl.ccc_step(&qd, &qs, &trace) {
                    CdclOutcome::Sat(model) => {
                        debug_assert_eq!(check_model(f, &model), Ok(true));
                        trace.record(Peer::Cdcl, "sat");
                        outcome = Some(CccOutcome::Sat { model, winner: Peer::Cdcl });
                    }
                    CdclOutcome::Unsat => {
                        trace.record(Peer::Cdcl, "unsat");
                        outcome = Some(CccOutcome::Unsat { winner: Peer::Cdcl });
                    }
                    CdclOutcome::CubeRefuted(_) | CdclOutcome::Paused => {}
                }
            }
        }
        if let Some(state) = predictor.take() {
            let mut state = state;
            if let Some(leaf) = leaf {
                if leaf.refuter == Refuter::Lookahead {
                    state = state.observe(PredictorEvent::LaRefutedCube);
                }
                state = state
                    .observe(PredictorEvent::LeafClosed { discrepancies: leaf.discrepancies });
            }
            let spent = la.propagations() + cdcl.propagations();
            let units = spent.saturating_sub(state.budget_spent);
            if units > 0 {
                state = state.observe(PredictorEvent::Tick { units });
            }
            if outcome.is_none() && state.verdict == PredictorVerdict::AbortToCdcl {
                outcome = Some(CccOutcome::Aborted(AbortReason::PredictorCdclDominates));
            }
            predictor = Some(state);
        }
    }

    finish_run(outcome.unwrap(), la, &cdcl, stats, &trace, predictor, None)
}

/// Runs both peers free-running on their own threads. Outcomes are settled
/// by a write-once cell; the losing peer stops at its next step boundary.
pub fn run_ccc_threads(f: &CnfFormula, config: &CccConfig) -> CccRun {
    use std::time::Instant;

    let qd: MsgQueue<DecisionMsg> = MsgQueue::new();
    let qs: MsgQueue<SolvedMsg> = MsgQueue::new();
    let trace = TraceSink::new();
    let abort = AbortFlag::new();
    let cell: Mutex<Option<CccOutcome>> = Mutex::new(None);
    let predictor = Mutex::new(config.predictor.then(|| {
        PredictorState::new(config.heuristics.predictor_budget_seconds.ceil() as u64, &config.heuristics)
    }));
    let started = Instant::now();

    let mut la = LaEngine::new(f, la_mode_for(config.mode), &config.heuristics, &config.lookahead);
    let mut cdcl = Cdcl::new(f, config.cdcl.clone());
    let mut la_steps = 0u64;
    let mut cdcl_steps = 0u64;
    let mut stats = RunStats::default();

    std::thread::scope(|scope| {
        let la_handle = scope.spawn(|| {
            let mut la_local_steps = 0u64;
            loop {
                if abort.is_set() {
                    break;
                }
                la_local_steps += 1;
                match la.step(Some(&qd), Some(&qs), &trace) {
                    LaStep::Sat(model) => {
                        settle(&cell, &abort, CccOutcome::Sat { model, winner: Peer::Lookahead });
                        trace.record(Peer::Lookahead, "sat");
                        break;
                    }
                    LaStep::Unsat => {
                        let out = if config.mode == CccMode::Cutoff && !la.output().emitted.is_empty() {
                            CccOutcome::CubesEmitted
                        } else {
                            trace.record(Peer::Lookahead, "unsat");
                            CccOutcome::Unsat { winner: Peer::Lookahead }
                        };
                        settle(&cell, &abort, out);
                        break;
                    }
                    LaStep::Progress { closed } => {
                        if let Some(leaf) = closed {
                            let mut guard = predictor.lock().unwrap();
                            if let Some(state) = guard.take() {
                                let mut state = state;
                                if leaf.refuter == Refuter::Lookahead {
                                    state = state.observe(PredictorEvent::LaRefutedCube);
                                }
                                state = state.observe(PredictorEvent::LeafClosed {
                                    discrepancies: leaf.discrepancies,
                                });
                                let elapsed = started.elapsed().as_secs();
                                let units = elapsed.saturating_sub(state.budget_spent);
                                if units > 0 {
                                    state = state.observe(PredictorEvent::Tick { units });
                                }
                                if state.verdict == PredictorVerdict::AbortToCdcl {
                                    settle(
                                        &cell,
                                        &abort,
                                        CccOutcome::Aborted(AbortReason::PredictorCdclDominates),
                                    );
                                }
                                *guard = Some(state);
                            }
                        }
                    }
                }
            }
            la_local_steps
        });

        let mut cdcl_local_steps = 0u64;
        loop {
            if abort.is_set() {
                break;
            }
            cdcl_local_steps += 1;
            match cdcl.ccc_step(&qd, &qs, &trace) {
                CdclOutcome::Sat(model) => {
                    settle(&cell, &abort, CccOutcome::Sat { model, winner: Peer::Cdcl });
                    trace.record(Peer::Cdcl, "sat");
                    break;
                }
                CdclOutcome::Unsat => {
                    settle(&cell, &abort, CccOutcome::Unsat { winner: Peer::Cdcl });
                    trace.record(Peer::Cdcl, "unsat");
                    break;
                }
                CdclOutcome::CubeRefuted(_) | CdclOutcome::Paused => {}
            }
        }
        la_steps = la_handle.join().unwrap();
        cdcl_steps = cdcl_local_steps;
    });

    stats.la_steps = la_steps;
    stats.cdcl_steps = cdcl_steps;
    stats.wall_ms = Some(started.elapsed().as_millis() as u64);
    let outcome = cell.into_inner().unwrap().expect("a peer settled the outcome");
    let predictor = predictor.into_inner().unwrap();
    let mut run = finish_run(outcome, la, &cdcl, stats, &trace, predictor, None);
    if let CccOutcome::Sat { model, .. } = &run.outcome {
        assert_eq!(check_model(f, model), Ok(true), "winning model must satisfy the formula");
    }
    run.stats.wall_ms = Some(started.elapsed().as_millis() as u64);
    run
}

fn settle(cell: &Mutex<Option<CccOutcome>>, abort: &AbortFlag, outcome: CccOutcome) {
    let mut guard = cell.lock().unwrap();
    if guard.is_none() {
        *guard = Some(outcome);
    }
    abort.set();
}

/// Drives the lookahead engine alone: `Pure` searches to an answer,
/// `CcCutoff` additionally cuts cubes off with the classic threshold.
pub fn run_lookahead_only(
    f: &CnfFormula,
    mode: LaMode,
    heuristics: &HeuristicConfig,
    la_config: &LaConfig,
) -> CccRun {
    let trace = TraceSink::new();
    let mut la = LaEngine::new(f, mode, heuristics, la_config);
    let mut stats = RunStats::default();
    let outcome = loop {
        stats.la_steps += 1;
        match la.step(None, None, &trace) {
            LaStep::Sat(model) => {
                debug_assert_eq!(check_model(f, &model), Ok(true));
                trace.record(Peer::Lookahead, "sat");
                break CccOutcome::Sat { model, winner: Peer::Lookahead };
            }
            LaStep::Unsat => {
                if !la.output().emitted.is_empty() {
                    break CccOutcome::CubesEmitted;
                }
                trace.record(Peer::Lookahead, "unsat");
                break CccOutcome::Unsat { winner: Peer::Lookahead };
            }
            LaStep::Progress { .. } => {}
        }
    };
    let cdcl = Cdcl::new(f, CdclConfig::default());
    finish_run(outcome, la, &cdcl, stats, &trace, None, None)
}

/// Drives the CDCL engine alone to an answer.
pub fn run_cdcl_only(f: &CnfFormula, config: CdclConfig) -> CccRun {
    let trace = TraceSink::new();
    let mut cdcl = Cdcl::new(f, config);
    let outcome = match cdcl.solve() {
        crate::cdcl::SolveResult::Sat(model) => {
            debug_assert_eq!(check_model(f, &model), Ok(true));
            trace.record(Peer::Cdcl, "sat");
            CccOutcome::Sat { model, winner: Peer::Cdcl }
        }
        crate::cdcl::SolveResult::Unsat => {
            trace.record(Peer::Cdcl, "unsat");
            CccOutcome::Unsat { winner: Peer::Cdcl }
        }
        other => unreachable!("unbudgeted solve cannot return {other:?}"),
    };
    let mut stats = RunStats::default();
    stats.cdcl_steps = 1;
    let la = LaEngine::new(f, LaMode::Pure, &HeuristicConfig::default(), &LaConfig::default());
    finish_run(outcome, la, &cdcl, stats, &trace, None, None)
}

fn finish_run(
    outcome: CccOutcome,
    la: LaEngine,
    cdcl: &Cdcl,
    mut stats: RunStats,
    trace: &TraceSink,
    predictor: Option<PredictorState>,
    wall_ms: Option<u64>,
) -> CccRun {
    for leaf in &la.output().stats {
        stats.count_leaf(leaf.refuter, leaf.discrepancies);
    }
    stats.la_propagations = la.propagations();
    stats.cdcl_propagations = cdcl.propagations();
    stats.cdcl_conflicts = cdcl.conflicts();
    stats.cdcl_decisions = cdcl.decisions();
    stats.cdcl_learned = cdcl.learned_count();
    stats.floor_violations = cdcl.floor_violations();
    if let Some(p) = &predictor {
        stats.predictor_verdict = Some(p.verdict);
        stats.predictor_la_wins = Some(p.la_wins);
    }
    if wall_ms.is_some() {
        stats.wall_ms = wall_ms;
    }
    CccRun { outcome, cubes: la.into_output(), trace: trace.lines(), stats }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_dimacs, Lit};
    use crate::verify::brute_force_solve;

    fn lit(n: i64) -> Lit {
        Lit::from_dimacs(n)
    }

    #[test]
    fn queue_preserves_send_order() {
        let q = MsgQueue::new();
        for i in 1..=5u64 {
            q.send(SolvedMsg { cube_id: CubeId(i) });
        }
        assert_eq!(q.head(), Some(SolvedMsg { cube_id: CubeId(1) }));
        let mut got = Vec::new();
        while let Some(m) = q.pop() {
            got.push(m.cube_id.0);
        }
        assert_eq!(got, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn trace_lines_are_sequenced() {
        let t = TraceSink::new();
        t.record(Peer::Lookahead, "open 1");
        t.record(Peer::Cdcl, "recv_decision 2 0 1");
        assert_eq!(t.lines(), vec!["SEQ 0 la open 1", "SEQ 1 cdcl recv_decision 2 0 1"]);
        assert_eq!(t.render(), "SEQ 0 la open 1\nSEQ 1 cdcl recv_decision 2 0 1\n");
    }

    #[test]
    fn solved_staleness_follows_the_current_path() {
        let msg = SolvedMsg { cube_id: CubeId(3) };
        let off_path: Vec<CubeId> = [1, 2, 8].map(CubeId).to_vec();
        let on_path: Vec<CubeId> = [1, 2, 3, 5, 7].map(CubeId).to_vec();
        assert!(solved_is_stale(&msg, &off_path));
        assert!(!solved_is_stale(&msg, &on_path));
    }

    #[test]
    fn decision_staleness_compares_against_stack_size() {
        let msg = DecisionMsg { cube_id: CubeId(9), backtrack_level: 3, lit: lit(4) };
        assert!(decision_is_stale(&msg, 2));
        assert!(!decision_is_stale(&msg, 3));
        assert!(!decision_is_stale(&msg, 4));
    }

    #[test]
    fn round_robin_solves_a_tiny_sat_formula_in_two_steps() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        let run = run_ccc(&f, &CccConfig::default());
        match run.outcome {
            CccOutcome::Sat { winner, .. } => assert_eq!(winner, Peer::Cdcl),
            other => panic!("expected sat, got {other:?}"),
        }
        assert_eq!(run.stats.la_steps + run.stats.cdcl_steps, 2);
    }

    #[test]
    fn identical_configurations_produce_identical_traces() {
        let f = crate::verify::random_3sat(8, 34, 11);
        let config = CccConfig::default();
        let a = run_ccc(&f, &config);
        let b = run_ccc(&f, &config);
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.outcome, b.outcome);
    }

    #[test]
    fn lookahead_only_script_matches_pure_lookahead() {
        let f = crate::verify::random_3sat(7, 30, 3);
        let script = CccConfig {
            schedule: Schedule::Script(vec![Peer::Lookahead; 10_000]),
            ..CccConfig::default()
        };
        let scripted = run_ccc(&f, &script);
        let pure = run_lookahead_only(
            &f,
            LaMode::Pure,
            &HeuristicConfig::default(),
            &LaConfig::default(),
        );
        assert_eq!(scripted.stats.cdcl_steps, 0);
        let scripted_sat = matches!(scripted.outcome, CccOutcome::Sat { .. });
        let pure_sat = matches!(pure.outcome, CccOutcome::Sat { .. });
        assert_eq!(scripted_sat, pure_sat);
    }

    #[test]
    fn exhausted_script_aborts_with_partial_trace() {
        let f = crate::verify::random_3sat(10, 50, 5);
        let config = CccConfig {
            schedule: Schedule::Script(vec![Peer::Lookahead, Peer::Cdcl]),
            ..CccConfig::default()
        };
        let run = run_ccc(&f, &config);
        assert_eq!(run.outcome, CccOutcome::Aborted(AbortReason::ScheduleExhausted));
        assert!(!run.trace.is_empty(), "partial trace survives the abort");
    }

    #[test]
    fn both_schedulers_agree_with_the_oracle_on_hole_instances() {
        // Four pigeons, three holes: every assignment violates some clause.
        let mut lines = String::from("p cnf 12 22\n");
        let var = |pigeon: i64, hole: i64| (pigeon - 1) * 3 + hole;
        for p in 1..=4 {
            lines.push_str(&format!("{} {} {} 0\n", var(p, 1), var(p, 2), var(p, 3)));
        }
        for h in 1..=3 {
            for p1 in 1..=4 {
                for p2 in (p1 + 1)..=4 {
                    lines.push_str(&format!("-{} -{} 0\n", var(p1, h), var(p2, h)));
                }
            }
        }
        let f = parse_dimacs(&lines).unwrap();
        assert!(!brute_force_solve(&f).unwrap().is_sat());
        let det = run_ccc(&f, &CccConfig::default());
        assert!(matches!(det.outcome, CccOutcome::Unsat { .. }), "got {:?}", det.outcome);
        let thr = run_ccc_threads(&f, &CccConfig::default());
        assert!(matches!(thr.outcome, CccOutcome::Unsat { .. }), "got {:?}", thr.outcome);
        assert!(thr.stats.wall_ms.is_some());
    }
}
