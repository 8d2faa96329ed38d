//! Lookahead peer: depth-first cube search driven by failed-literal
//! probing.
//!
//! The engine walks a binary tree over the formula's variables. Entering a
//! node applies its decision literal, propagates, then probes candidate
//! variables in both polarities; a probe that fails in one polarity asserts
//! the other, and probing repeats until a pass asserts nothing. The
//! surviving probe counts score the next decision. Each call to [`step`]
//! performs one tree action, either entering a node or splitting one, so a
//! scheduler can interleave this engine with a CDCL peer at a fixed grain.
//!
//! In the concurrent modes every committed decision is streamed to the
//! CDCL peer, and before each action the engine drains refutation messages
//! from it: a refutation naming a node on the current path kills the
//! branch under construction, while the message itself stays queued until
//! the unwind has climbed above the refuted node.
//!
//! [`step`]: LaEngine::step

use crate::formula::{Assignment, CnfFormula, Cube, LBool, Lit, Var};
use crate::heuristics::{
    cc_update, ccc_on_cutoff, ccc_update, difficulty, CcEvent, CcThreshold, CccThreshold,
    HeuristicConfig, RefutedBy,
};
use crate::protocol::{
    solved_is_stale, CubeId, DecisionMsg, MsgQueue, Peer, SolvedMsg, TraceSink,
};

/// Which search discipline the engine runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaMode {
    /// Plain search to an answer: no cutoff, no messages, weaker branch
    /// first.
    Pure,
    /// Classic cube generation: difficulty cutoff with the decay/growth
    /// threshold, no messages.
    CcCutoff,
    /// Concurrent peer without a cutoff; stronger branch first.
    CccInf,
    /// Concurrent peer with the filtered-difficulty cutoff.
    CccCutoff,
}

impl LaMode {
    fn concurrent(self) -> bool {
        matches!(self, LaMode::CccInf | LaMode::CccCutoff)
    }

    fn cutoff(self) -> bool {
        matches!(self, LaMode::CcCutoff | LaMode::CccCutoff)
    }
}

/// Who disposed of a closed leaf.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refuter {
    /// Probing or propagation refuted the cube in place.
    Lookahead,
    /// The CDCL peer reported the cube (or an ancestor) unsatisfiable.
    Cdcl,
    /// The difficulty threshold cut the cube off; it was emitted, not
    /// refuted.
    Cutoff,
}

/// One leaf closure, reported by the step that performed it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClosedLeaf {
    pub id: CubeId,
    pub refuter: Refuter,
    pub discrepancies: u32,
}

/// Per-leaf record kept for the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeafStat {
    pub id: CubeId,
    pub refuter: Refuter,
    pub discrepancies: u32,
}

/// Everything the cube phase leaves behind. `emitted` and `refuted`
/// together cover the search space whenever the tree was driven to
/// exhaustion.
#[derive(Debug, Clone, Default)]
pub struct CubePhaseOutput {
    /// Cubes cut off for a later conquer phase.
    pub emitted: Vec<Cube>,
    /// Cubes proved unsatisfiable, by either peer.
    pub refuted: Vec<Cube>,
    /// One entry per closed leaf, in closure order.
    pub stats: Vec<LeafStat>,
}

/// Engine knobs that are not part of the threshold heuristics.
#[derive(Debug, Clone)]
pub struct LaConfig {
    /// At most this many variables are probed per pass; beyond it, the
    /// most frequently occurring ones are kept.
    pub max_candidates: usize,
}

impl Default for LaConfig {
    fn default() -> Self {
        LaConfig { max_candidates: 256 }
    }
}

/// Result of one engine step.
#[derive(Debug, Clone)]
pub enum LaStep {
    /// A total consistent assignment was reached.
    Sat(Assignment),
    /// The tree is exhausted. This is a refutation of the formula only if
    /// no cubes were emitted; with a cutoff the caller must check
    /// [`CubePhaseOutput::emitted`].
    Unsat,
    /// One action was performed; `closed` reports a leaf closure if the
    /// action ended in one.
    Progress { closed: Option<ClosedLeaf> },
}

enum Terminal {
    Sat(Assignment),
    Unsat,
}

enum Simplified {
    Conflict,
    Sat,
    Open { scores: Vec<(Var, u64, u64)> },
}

/// Clause database with full occurrence lists and a rollback trail. Probing
/// resets state dozens of times per node, which watched literals make
/// awkward; plain occurrence lists keep rollback trivial.
struct LaProp {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    occ: Vec<Vec<u32>>,
    assign: Assignment,
    trail: Vec<Lit>,
    propagations: u64,
    empty_clause: bool,
}

impl LaProp {
    fn new(f: &CnfFormula) -> LaProp {
        let mut clauses = Vec::new();
        let mut empty_clause = false;
        for clause in &f.clauses {
            if clause.is_tautology() {
                continue;
            }
            if clause.is_empty() {
                empty_clause = true;
                continue;
            }
            clauses.push(clause.lits().to_vec());
        }
        let mut occ = vec![Vec::new(); 2 * f.num_vars as usize];
        for (ci, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                occ[lit.code()].push(ci as u32);
            }
        }
        LaProp {
            num_vars: f.num_vars as usize,
            clauses,
            occ,
            assign: Assignment::empty(f.num_vars),
            trail: Vec::new(),
            propagations: 0,
            empty_clause,
        }
    }

    fn checkpoint(&self) -> usize {
        self.trail.len()
    }

    fn rollback(&mut self, checkpoint: usize) {
        while self.trail.len() > checkpoint {
            let lit = self.trail.pop().unwrap();
            self.assign.unassign(lit.var());
        }
    }

    /// Assigns `lit` and propagates units to fixpoint. Returns false on a
    /// falsified clause, leaving the partial trail in place for the caller
    /// to roll back.
    fn assign_and_propagate(&mut self, lit: Lit) -> bool {
        match self.assign.lit_value(lit) {
            LBool::True => return true,
            LBool::False => return false,
            LBool::Undef => {}
        }
        let mut qhead = self.trail.len();
        self.assign.assign(lit);
        self.trail.push(lit);
        while qhead < self.trail.len() {
            let p = self.trail[qhead];
            qhead += 1;
            self.propagations += 1;
            let falsified = !p;
            for i in 0..self.occ[falsified.code()].len() {
                let ci = self.occ[falsified.code()][i] as usize;
                let mut satisfied = false;
                let mut open = 0u32;
                let mut last_open = None;
                for &q in &self.clauses[ci] {
                    match self.assign.lit_value(q) {
                        LBool::True => {
                            satisfied = true;
                            break;
                        }
                        LBool::Undef => {
                            open += 1;
                            last_open = Some(q);
                        }
                        LBool::False => {}
                    }
                }
                if satisfied {
                    continue;
                }
                match (open, last_open) {
                    (0, _) => return false,
                    (1, Some(q)) => {
                        self.assign.assign(q);
                        self.trail.push(q);
                    }
                    _ => {}
                }
            }
        }
        true
    }
}

/// A node on the current root path.
struct Frame {
    id: CubeId,
    /// The literal that entered this node and whether taking it was a
    /// discrepancy. `None` only for the root.
    decision: Option<(Lit, bool)>,
    /// Trail length before the decision literal was applied.
    checkpoint: usize,
    /// Children not yet visited, in visit order.
    pending: Vec<(Lit, bool)>,
    decided: bool,
    /// Probe counts from the final simplification pass, consumed by the
    /// split.
    scores: Vec<(Var, u64, u64)>,
}

/// The lookahead engine. Construct once per run and call [`step`] until a
/// terminal [`LaStep`] comes back; terminal answers repeat on further
/// calls.
///
/// [`step`]: LaEngine::step
pub struct LaEngine {
    prop: LaProp,
    frames: Vec<Frame>,
    next_id: u64,
    mode: LaMode,
    heur: HeuristicConfig,
    config: LaConfig,
    occurrence: Vec<u32>,
    cc_threshold: CcThreshold,
    ccc_threshold: CccThreshold,
    output: CubePhaseOutput,
    started: bool,
    finished: Option<Terminal>,
}

impl LaEngine {
    pub fn new(
        f: &CnfFormula,
        mode: LaMode,
        heur: &HeuristicConfig,
        config: &LaConfig,
    ) -> LaEngine {
        let mut occurrence = vec![0u32; f.num_vars as usize];
        for clause in &f.clauses {
            for &lit in clause.lits() {
                occurrence[lit.var().offset()] += 1;
            }
        }
        LaEngine {
            prop: LaProp::new(f),
            frames: Vec::new(),
            next_id: 1,
            mode,
            heur: heur.clone(),
            config: config.clone(),
            occurrence,
            cc_threshold: CcThreshold(heur.cc_init_threshold),
            ccc_threshold: CccThreshold(heur.ccc_init_threshold),
            output: CubePhaseOutput::default(),
            started: false,
            finished: None,
        }
    }

    /// Total unit propagations performed, probing included.
    pub fn propagations(&self) -> u64 {
        self.prop.propagations
    }

    pub fn output(&self) -> &CubePhaseOutput {
        &self.output
    }

    pub fn into_output(self) -> CubePhaseOutput {
        self.output
    }

    /// Performs one tree action: the first call opens the root, after that
    /// each call either splits the deepest open node or enters the next
    /// pending child. Queues are only touched when present, so the same
    /// engine drives both the concurrent and the standalone modes.
    pub fn step(
        &mut self,
        qd: Option<&MsgQueue<DecisionMsg>>,
        qs: Option<&MsgQueue<SolvedMsg>>,
        trace: &TraceSink,
    ) -> LaStep {
        if let Some(terminal) = &self.finished {
            return match terminal {
                Terminal::Sat(model) => LaStep::Sat(model.clone()),
                Terminal::Unsat => LaStep::Unsat,
            };
        }
        if !self.started {
            self.started = true;
            return self.enter_root(qs, trace);
        }
        let top_decided = self.frames.last().map_or(false, |f| f.decided);
        if top_decided {
            self.enter_child(qd, qs, trace)
        } else {
            self.split_step(qs, trace)
        }
    }

    fn alloc(&mut self) -> CubeId {
        let id = CubeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn path_ids(&self) -> Vec<CubeId> {
        self.frames.iter().map(|f| f.id).collect()
    }

    fn path_lits(&self) -> Vec<Lit> {
        self.frames.iter().filter_map(|f| f.decision).map(|(lit, _)| lit).collect()
    }

    fn path_discrepancies(&self) -> u32 {
        self.frames.iter().filter_map(|f| f.decision).filter(|&(_, disc)| disc).count() as u32
    }

    /// Pops and logs stale solved messages. Returns the id of a live one,
    /// leaving it queued: it names an ancestor still on the path, and the
    /// unwind must see it again until that ancestor is gone.
    fn drain_solved(
        &self,
        qs: Option<&MsgQueue<SolvedMsg>>,
        trace: &TraceSink,
        path: &[CubeId],
    ) -> Option<CubeId> {
        let qs = qs?;
        loop {
            let head = qs.head()?;
            if solved_is_stale(&head, path) {
                qs.pop();
                trace.record(Peer::Lookahead, &format!("drop_solved {}", head.cube_id));
            } else {
                return Some(head.cube_id);
            }
        }
    }

    fn enter_root(&mut self, qs: Option<&MsgQueue<SolvedMsg>>, trace: &TraceSink) -> LaStep {
        let id = self.alloc();
        trace.record(Peer::Lookahead, &format!("open {id}"));
        self.drain_solved(qs, trace, &[]);
        self.frames.push(Frame {
            id,
            decision: None,
            checkpoint: 0,
            pending: Vec::new(),
            decided: false,
            scores: Vec::new(),
        });
        if self.prop.empty_clause {
            return self.close_top_leaf(Refuter::Lookahead, trace);
        }
        for ci in 0..self.prop.clauses.len() {
            if self.prop.clauses[ci].len() == 1 {
                let unit = self.prop.clauses[ci][0];
                if !self.prop.assign_and_propagate(unit) {
                    return self.close_top_leaf(Refuter::Lookahead, trace);
                }
            }
        }
        self.after_entry(trace)
    }

    /// Splits the top node: pick the best-scoring variable, orient its two
    /// branches, and leave them pending. A live refutation for any node on
    /// the path kills the top node instead.
    fn split_step(&mut self, qs: Option<&MsgQueue<SolvedMsg>>, trace: &TraceSink) -> LaStep {
        let path = self.path_ids();
        if self.drain_solved(qs, trace, &path).is_some() {
            return self.close_top_leaf(Refuter::Cdcl, trace);
        }
        let top = self.frames.last().expect("an open node is on the stack");
        let mut best: Option<(Var, u64, u64)> = None;
        for &(var, pos, neg) in &top.scores {
            let better = match best {
                None => true,
                Some((_, bp, bn)) => pos * neg + pos + neg > bp * bn + bp + bn,
            };
            if better {
                best = Some((var, pos, neg));
            }
        }
        let (var, pos, neg) = best.expect("an open node has probe scores");
        let right = if neg > pos { var.negative() } else { var.positive() };
        let left = !right;
        let pending = if self.mode.concurrent() {
            vec![(right, true), (left, false)]
        } else {
            vec![(left, false), (right, true)]
        };
        if self.mode == LaMode::CcCutoff {
            self.cc_threshold = cc_update(self.cc_threshold, CcEvent::Decision, &self.heur);
        }
        let top = self.frames.last_mut().expect("an open node is on the stack");
        top.pending = pending;
        top.decided = true;
        LaStep::Progress { closed: None }
    }

    /// Enters the next pending child of the top node. A live refutation
    /// kills the child before its decision is applied; otherwise the child
    /// is committed, announced to the CDCL peer, and simplified.
    fn enter_child(
        &mut self,
        qd: Option<&MsgQueue<DecisionMsg>>,
        qs: Option<&MsgQueue<SolvedMsg>>,
        trace: &TraceSink,
    ) -> LaStep {
        let parent_len = self.frames.len();
        let (lit, disc_flag) = {
            let parent = self.frames.last_mut().expect("a split node is on the stack");
            debug_assert!(!parent.pending.is_empty());
            parent.pending.remove(0)
        };
        let id = self.alloc();
        trace.record(Peer::Lookahead, &format!("open {id}"));
        let path = self.path_ids();
        if self.drain_solved(qs, trace, &path).is_some() {
            let discrepancies = self.path_discrepancies() + disc_flag as u32;
            let mut lits = self.path_lits();
            lits.push(lit);
            let assigned = self.prop.trail.len() as u64;
            self.record_leaf(
                id,
                Cube::new(lits),
                Refuter::Cdcl,
                discrepancies,
                parent_len as u64,
                assigned,
                trace,
            );
            return self.finish_close(
                Some(ClosedLeaf { id, refuter: Refuter::Cdcl, discrepancies }),
                trace,
            );
        }
        let checkpoint = self.prop.checkpoint();
        self.frames.push(Frame {
            id,
            decision: Some((lit, disc_flag)),
            checkpoint,
            pending: Vec::new(),
            decided: false,
            scores: Vec::new(),
        });
        if self.mode.concurrent() {
            if let Some(qd) = qd {
                let backtrack_level = (self.frames.len() - 2) as u32;
                qd.send(DecisionMsg { cube_id: id, backtrack_level, lit });
                trace.record(
                    Peer::Lookahead,
                    &format!("send_decision {id} {backtrack_level} {lit}"),
                );
            }
        }
        if !self.prop.assign_and_propagate(lit) {
            return self.close_top_leaf(Refuter::Lookahead, trace);
        }
        self.after_entry(trace)
    }

    /// Simplification and cutoff handling shared by root and child entry.
    fn after_entry(&mut self, trace: &TraceSink) -> LaStep {
        match self.simplify() {
            Simplified::Conflict => self.close_top_leaf(Refuter::Lookahead, trace),
            Simplified::Sat => {
                let model = self.prop.assign.clone();
                self.finished = Some(Terminal::Sat(model.clone()));
                LaStep::Sat(model)
            }
            Simplified::Open { scores } => {
                let depth = (self.frames.len() - 1) as u64;
                if self.mode == LaMode::CcCutoff && depth > self.heur.too_deep as u64 {
                    self.cc_threshold =
                        cc_update(self.cc_threshold, CcEvent::TooDeep, &self.heur);
                }
                if self.mode.cutoff() && depth > 0 {
                    let assigned = self.prop.trail.len() as u64;
                    let free = self.prop.num_vars as u64 - assigned;
                    let d = difficulty(depth, assigned - depth, free)
                        .expect("an open node has free variables");
                    let bound = match self.mode {
                        LaMode::CcCutoff => self.cc_threshold.0,
                        _ => self.ccc_threshold.0,
                    };
                    if d.0 > bound {
                        return self.close_top_leaf(Refuter::Cutoff, trace);
                    }
                }
                self.frames.last_mut().expect("entered node is on the stack").scores = scores;
                LaStep::Progress { closed: None }
            }
        }
    }

    /// Closes the top frame as a leaf and unwinds.
    fn close_top_leaf(&mut self, refuter: Refuter, trace: &TraceSink) -> LaStep {
        let discrepancies = self.path_discrepancies();
        let cube = Cube::new(self.path_lits());
        let top = self.frames.last().expect("a leaf is on the stack");
        let id = top.id;
        let checkpoint = top.checkpoint;
        let dec = (self.frames.len() - 1) as u64;
        let assigned = self.prop.trail.len() as u64;
        self.record_leaf(id, cube, refuter, discrepancies, dec, assigned, trace);
        self.prop.rollback(checkpoint);
        self.frames.pop();
        self.finish_close(Some(ClosedLeaf { id, refuter, discrepancies }), trace)
    }

    /// Books a closed leaf: trace line, output records, threshold updates.
    /// `dec` and `assigned` describe the leaf for the difficulty estimate.
    fn record_leaf(
        &mut self,
        id: CubeId,
        cube: Cube,
        refuter: Refuter,
        discrepancies: u32,
        dec: u64,
        assigned: u64,
        trace: &TraceSink,
    ) {
        let reason = match refuter {
            Refuter::Lookahead => "conflict",
            Refuter::Cdcl => "cdcl",
            Refuter::Cutoff => "cutoff",
        };
        trace.record(Peer::Lookahead, &format!("close {id} {reason}"));
        self.output.stats.push(LeafStat { id, refuter, discrepancies });
        match refuter {
            Refuter::Cutoff => self.output.emitted.push(cube),
            _ => self.output.refuted.push(cube),
        }
        match self.mode {
            LaMode::Pure => {}
            LaMode::CcCutoff => {
                if refuter == Refuter::Lookahead {
                    self.cc_threshold =
                        cc_update(self.cc_threshold, CcEvent::LaSolvedCube, &self.heur);
                }
            }
            LaMode::CccInf | LaMode::CccCutoff => match refuter {
                Refuter::Cutoff => {
                    self.ccc_threshold = ccc_on_cutoff(self.ccc_threshold, &self.heur);
                }
                Refuter::Lookahead | Refuter::Cdcl => {
                    let free = self.prop.num_vars as u64 - assigned;
                    if free > 0 {
                        let d = difficulty(dec, assigned.saturating_sub(dec), free)
                            .expect("free count checked above");
                        let by = match refuter {
                            Refuter::Lookahead => RefutedBy::Lookahead,
                            _ => RefutedBy::Cdcl,
                        };
                        self.ccc_threshold = ccc_update(self.ccc_threshold, d, by, &self.heur);
                    }
                }
            },
        }
    }

    /// Unwinds fully explored ancestors after a closure. Exhausting the
    /// root ends the search.
    fn finish_close(&mut self, closed: Option<ClosedLeaf>, trace: &TraceSink) -> LaStep {
        loop {
            let exhausted = match self.frames.last() {
                None => break,
                Some(top) => top.decided && top.pending.is_empty(),
            };
            if !exhausted {
                break;
            }
            let top = self.frames.pop().unwrap();
            trace.record(Peer::Lookahead, &format!("close {} exhausted", top.id));
            self.prop.rollback(top.checkpoint);
        }
        if self.frames.is_empty() {
            self.finished = Some(Terminal::Unsat);
            return LaStep::Unsat;
        }
        LaStep::Progress { closed }
    }

    /// Unassigned variables to probe, most frequent first when over the
    /// cap, returned in ascending index order.
    fn candidates(&self) -> Vec<Var> {
        let mut vars: Vec<Var> = (1..=self.prop.num_vars as u32)
            .map(Var::new)
            .filter(|&v| self.prop.assign.value(v) == LBool::Undef)
            .collect();
        if vars.len() > self.config.max_candidates {
            vars.sort_by_key(|&v| (std::cmp::Reverse(self.occurrence[v.offset()]), v.offset()));
            vars.truncate(self.config.max_candidates);
            vars.sort();
        }
        vars
    }

    /// Probes candidates in both polarities until a pass asserts nothing,
    /// then reports that pass's implication counts. A variable failing both
    /// ways is a conflict; failing one way asserts the other.
    fn simplify(&mut self) -> Simplified {
        loop {
            if self.prop.trail.len() == self.prop.num_vars {
                return Simplified::Sat;
            }
            let mut scores = Vec::new();
            let mut asserted = false;
            for var in self.candidates() {
                if self.prop.assign.value(var) != LBool::Undef {
                    continue;
                }
                let checkpoint = self.prop.checkpoint();
                let pos_ok = self.prop.assign_and_propagate(var.positive());
                let pos_implied = (self.prop.trail.len() - checkpoint).saturating_sub(1) as u64;
                self.prop.rollback(checkpoint);
                if !pos_ok {
                    if !self.prop.assign_and_propagate(var.negative()) {
                        return Simplified::Conflict;
                    }
                    asserted = true;
                    continue;
                }
                let neg_ok = self.prop.assign_and_propagate(var.negative());
                let neg_implied = (self.prop.trail.len() - checkpoint).saturating_sub(1) as u64;
                self.prop.rollback(checkpoint);
                if !neg_ok {
                    if !self.prop.assign_and_propagate(var.positive()) {
                        return Simplified::Conflict;
                    }
                    asserted = true;
                    continue;
                }
                scores.push((var, pos_implied, neg_implied));
            }
            if self.prop.trail.len() == self.prop.num_vars {
                return Simplified::Sat;
            }
            if !asserted {
                return Simplified::Open { scores };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_dimacs;
    use crate::verify::{
        brute_force_solve, check_model, check_tree_cover, deep_discrepancy_instance,
        probe_shielded_unsat, random_3sat,
    };

    fn lit(n: i64) -> Lit {
        Lit::from_dimacs(n)
    }

    fn run_to_terminal(engine: &mut LaEngine, trace: &TraceSink) -> LaStep {
        for _ in 0..1_000_000 {
            match engine.step(None, None, trace) {
                LaStep::Progress { .. } => {}
                terminal => return terminal,
            }
        }
        panic!("search did not terminate");
    }

    fn pure_engine(f: &CnfFormula) -> LaEngine {
        LaEngine::new(f, LaMode::Pure, &HeuristicConfig::default(), &LaConfig::default())
    }

    #[test]
    fn pure_search_finds_a_model() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        let trace = TraceSink::new();
        let mut engine = pure_engine(&f);
        match run_to_terminal(&mut engine, &trace) {
            LaStep::Sat(model) => assert_eq!(check_model(&f, &model), Ok(true)),
            other => panic!("expected a model, got {other:?}"),
        }
    }

    #[test]
    fn contradictory_units_close_the_root() {
        let f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let trace = TraceSink::new();
        let mut engine = pure_engine(&f);
        match engine.step(None, None, &trace) {
            LaStep::Unsat => {}
            other => panic!("expected a refutation, got {other:?}"),
        }
        assert_eq!(engine.output().refuted, vec![Cube::empty()]);
        assert_eq!(
            engine.output().stats,
            vec![LeafStat { id: CubeId(1), refuter: Refuter::Lookahead, discrepancies: 0 }]
        );
    }

    #[test]
    fn failed_literal_assertions_reach_the_model() {
        let f = parse_dimacs("p cnf 3 3\n-1 2 0\n-1 -2 0\n1 3 0\n").unwrap();
        let trace = TraceSink::new();
        let mut engine = pure_engine(&f);
        match run_to_terminal(&mut engine, &trace) {
            LaStep::Sat(model) => {
                assert_eq!(model.lit_value(lit(-1)), LBool::True);
                assert_eq!(model.lit_value(lit(3)), LBool::True);
            }
            other => panic!("expected a model, got {other:?}"),
        }
    }

    #[test]
    fn pure_search_agrees_with_the_oracle() {
        for seed in 0..30 {
            let f = random_3sat(7, 30, seed);
            let verdict = brute_force_solve(&f).unwrap();
            let trace = TraceSink::new();
            let mut engine = pure_engine(&f);
            match run_to_terminal(&mut engine, &trace) {
                LaStep::Sat(model) => {
                    assert!(verdict.is_sat(), "seed {seed}: engine found a bogus model");
                    assert_eq!(check_model(&f, &model), Ok(true), "seed {seed}");
                }
                LaStep::Unsat => {
                    assert!(!verdict.is_sat(), "seed {seed}: engine missed a model");
                    let output = engine.output();
                    assert!(output.emitted.is_empty());
                    assert!(check_tree_cover(&output.emitted, &output.refuted), "seed {seed}");
                }
                LaStep::Progress { .. } => unreachable!(),
            }
        }
    }

    #[test]
    fn tiny_threshold_cuts_depth_one_cubes() {
        let f = random_3sat(8, 30, 3);
        let mut heur = HeuristicConfig::default();
        heur.cc_init_threshold = 0.01;
        let trace = TraceSink::new();
        let mut engine = LaEngine::new(&f, LaMode::CcCutoff, &heur, &LaConfig::default());
        match run_to_terminal(&mut engine, &trace) {
            LaStep::Unsat => {}
            other => panic!("every branch should be cut off, got {other:?}"),
        }
        let output = engine.output();
        assert!(!output.emitted.is_empty());
        assert!(output.stats.iter().all(|s| s.refuter != Refuter::Cdcl));
        assert!(check_tree_cover(&output.emitted, &output.refuted));
    }

    #[test]
    fn concurrent_split_visits_the_stronger_branch_first() {
        let f = parse_dimacs("p cnf 4 3\n-1 2 0\n-1 3 0\n1 4 0\n").unwrap();
        let qd = MsgQueue::new();
        let qs = MsgQueue::new();
        let trace = TraceSink::new();
        let mut engine =
            LaEngine::new(&f, LaMode::CccInf, &HeuristicConfig::default(), &LaConfig::default());
        for _ in 0..3 {
            engine.step(Some(&qd), Some(&qs), &trace);
        }
        let first = qd.pop().expect("the first committed child is announced");
        assert_eq!(first.cube_id, CubeId(2));
        assert_eq!(first.backtrack_level, 0);
        assert_eq!(first.lit, lit(1));
    }

    #[test]
    fn a_refutation_on_the_path_kills_the_current_branch() {
        let f = parse_dimacs("p cnf 5 2\n1 2 0\n4 5 0\n").unwrap();
        let qd = MsgQueue::new();
        let qs = MsgQueue::new();
        let trace = TraceSink::new();
        let mut engine =
            LaEngine::new(&f, LaMode::CccInf, &HeuristicConfig::default(), &LaConfig::default());
        for _ in 0..3 {
            match engine.step(Some(&qd), Some(&qs), &trace) {
                LaStep::Progress { closed: None } => {}
                other => panic!("setup steps should stay open, got {other:?}"),
            }
        }
        assert_eq!(qd.pop().map(|m| m.lit), Some(lit(-1)));

        qs.send(SolvedMsg { cube_id: CubeId(2) });
        match engine.step(Some(&qd), Some(&qs), &trace) {
            LaStep::Progress { closed: Some(leaf) } => {
                assert_eq!(leaf.id, CubeId(2));
                assert_eq!(leaf.refuter, Refuter::Cdcl);
                assert_eq!(leaf.discrepancies, 1);
            }
            other => panic!("the split should be killed, got {other:?}"),
        }
        assert_eq!(qs.len(), 1, "the live message stays queued through the close");

        match engine.step(Some(&qd), Some(&qs), &trace) {
            LaStep::Progress { closed: None } => {}
            other => panic!("the sibling should open cleanly, got {other:?}"),
        }
        assert!(qs.is_empty(), "the message is stale for the sibling and gets dropped");
        assert_eq!(qd.pop().map(|m| m.lit), Some(lit(1)));
        assert_eq!(engine.output().refuted, vec![Cube::new(vec![lit(-1)])]);
        let rendered = trace.render();
        assert!(rendered.contains("la close 2 cdcl"));
        assert!(rendered.contains("la drop_solved 2"));
    }

    #[test]
    fn silent_probes_delay_the_first_leaf_to_full_depth() {
        let f = deep_discrepancy_instance(4);
        let trace = TraceSink::new();
        let mut engine =
            LaEngine::new(&f, LaMode::CccInf, &HeuristicConfig::default(), &LaConfig::default());
        let mut first_leaf = None;
        let terminal = loop {
            match engine.step(None, None, &trace) {
                LaStep::Progress { closed } => {
                    if first_leaf.is_none() {
                        first_leaf = closed;
                    }
                }
                terminal => break terminal,
            }
        };
        let leaf = first_leaf.expect("the deep branch closes before the model is found");
        assert_eq!(leaf.refuter, Refuter::Lookahead);
        assert_eq!(leaf.discrepancies, 4);
        match terminal {
            LaStep::Sat(model) => assert_eq!(check_model(&f, &model), Ok(true)),
            other => panic!("the instance is satisfiable, got {other:?}"),
        }
    }

    #[test]
    fn shielded_core_forces_lookahead_to_refute_every_padding_leaf() {
        let f = probe_shielded_unsat(2);
        let trace = TraceSink::new();
        let mut engine =
            LaEngine::new(&f, LaMode::CccInf, &HeuristicConfig::default(), &LaConfig::default());
        match run_to_terminal(&mut engine, &trace) {
            LaStep::Unsat => {}
            other => panic!("the instance is unsatisfiable, got {other:?}"),
        }
        let output = engine.output();
        assert_eq!(output.stats.len(), 8);
        assert!(output.stats.iter().all(|s| s.refuter == Refuter::Lookahead));
        assert!(check_tree_cover(&output.emitted, &output.refuted));
    }
}
