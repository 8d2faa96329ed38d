//! Conflict-driven clause learning over two watched literals per clause,
//! with VSIDS branching, phase saving, Luby restarts and learned-clause
//! aging.
//!
//! The solver runs in two shapes. [`Cdcl::solve`] and
//! [`Cdcl::solve_under`] drive it to an answer like an ordinary
//! incremental solver; learned clauses survive across calls. In a
//! concurrent run the scheduler instead calls [`Cdcl::ccc_step`], which
//! performs one bounded slice of work: it either consumes one decision
//! message or executes one solving round.
//!
//! Assumptions live on a stack of `(cube_id, lit)` pairs mirroring the
//! lookahead peer's current path. Decision level `j` is reserved for
//! assumption `j` of that stack: an assumption that already holds still
//! opens its own (empty) level, so the level of a conflict tells directly
//! how much of the path it refutes. A conflict at level `L <= |S|` means
//! the prefix cube ending at position `L` is unsatisfiable; the solver
//! reports the id at that position and drops it and everything above it
//! from the stack. Restarts never backtrack below the assumption stack.

use crate::formula::{Assignment, Clause, CnfFormula, Cube, LBool, Lit};
use crate::protocol::{
    decision_is_stale, CubeId, DecisionMsg, MsgQueue, Peer, SolvedMsg, TraceSink,
};

/// Tunables. The defaults are conventional and are what every other
/// module assumes.
#[derive(Debug, Clone)]
pub struct CdclConfig {
    /// Multiplicative VSIDS decay applied per conflict.
    pub vsids_decay: f64,
    /// Multiplicative clause-activity decay applied per conflict.
    pub clause_decay: f64,
    /// Base number of conflicts between restarts; scaled by the Luby
    /// sequence.
    pub luby_unit: u64,
    /// Record a copy of every learned clause for later inspection.
    pub capture_learned: bool,
}

impl Default for CdclConfig {
    fn default() -> Self {
        CdclConfig {
            vsids_decay: 0.95,
            clause_decay: 0.999,
            luby_unit: 100,
            capture_learned: false,
        }
    }
}

/// Result of one scheduler-driven step.
#[derive(Debug, Clone, PartialEq)]
pub enum CdclOutcome {
    Sat(Assignment),
    Unsat,
    /// A prefix of the assumption stack was refuted; the id of the
    /// smallest refuted cube was pushed onto the solved queue.
    CubeRefuted(CubeId),
    /// Work was done but nothing externally visible happened.
    Paused,
}

/// Result of a driven solve.
#[derive(Debug, Clone, PartialEq)]
pub enum SolveResult {
    Sat(Assignment),
    Unsat,
    /// The formula is unsatisfiable under the given assumptions; carries
    /// the refuted prefix (shortest one discovered).
    UnsatUnderAssumptions(Cube),
    BudgetExhausted,
    Cancelled,
}

/// What a resolved conflict amounted to.
enum ConflictResult {
    /// Learned, backjumped, carry on.
    Continue,
    /// The prefix cube ending at this node was refuted.
    PrefixRefuted { id: CubeId },
    /// Conflict at level zero.
    Unsat,
}

enum RoundEvent {
    None,
    PrefixRefuted { id: CubeId },
    Unsat,
}

const NO_CLAUSE: u32 = u32::MAX;

struct ClauseData {
    lits: Vec<Lit>,
    activity: f64,
    learned: bool,
    deleted: bool,
}

/// Max-heap of variables ordered by activity, ties to the lower index.
/// `pos` tracks each variable's slot so bumps can re-sift in place.
struct ActivityHeap {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl ActivityHeap {
    fn full(num_vars: usize) -> ActivityHeap {
        // With all activities zero the identity permutation is already
        // heap-ordered, since lower indices win ties.
        ActivityHeap {
            heap: (0..num_vars as u32).collect(),
            pos: (0..num_vars).collect(),
        }
    }

    fn better(a: u32, b: u32, activity: &[f64]) -> bool {
        let (aa, ab) = (activity[a as usize], activity[b as usize]);
        aa > ab || (aa == ab && a < b)
    }

    fn sift_up(&mut self, mut i: usize, activity: &[f64]) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::better(self.heap[i], self.heap[parent], activity) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize, activity: &[f64]) {
        loop {
            let mut best = i;
            for child in [2 * i + 1, 2 * i + 2] {
                if child < self.heap.len()
                    && Self::better(self.heap[child], self.heap[best], activity)
                {
                    best = child;
                }
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i] as usize] = i;
        self.pos[self.heap[j] as usize] = j;
    }

    fn insert(&mut self, v: u32, activity: &[f64]) {
        if self.pos[v as usize] != ABSENT {
            return;
        }
        self.pos[v as usize] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, activity);
    }

    fn pop(&mut self, activity: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, activity);
        }
        Some(top)
    }

    fn bumped(&mut self, v: u32, activity: &[f64]) {
        let i = self.pos[v as usize];
        if i != ABSENT {
            self.sift_up(i, activity);
        }
    }
}

pub struct Cdcl {
    num_vars: usize,
    arena: Vec<ClauseData>,
    watches: Vec<Vec<u32>>,
    assign: Assignment,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: ActivityHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    assumptions: Vec<(CubeId, Lit)>,
    luby_index: u64,
    conflicts_since_restart: u64,
    learned_live: usize,
    learned_limit: usize,
    unsat: bool,
    config: CdclConfig,
    propagations: u64,
    conflicts: u64,
    decisions: u64,
    learned_total: u64,
    floor_violations: u64,
    captured: Vec<Clause>,
}

impl Cdcl {
    pub fn new(f: &CnfFormula, config: CdclConfig) -> Cdcl {
        let n = f.num_vars as usize;
        let mut solver = Cdcl {
            num_vars: n,
            arena: Vec::with_capacity(f.clauses.len()),
            watches: vec![Vec::new(); 2 * n],
            assign: Assignment::empty(f.num_vars),
            level: vec![0; n],
            reason: vec![NO_CLAUSE; n],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: ActivityHeap::full(n),
            phase: vec![false; n],
            seen: vec![false; n],
            assumptions: Vec::new(),
            luby_index: 0,
            conflicts_since_restart: 0,
            learned_live: 0,
            learned_limit: (2 * f.clauses.len()).max(100),
            unsat: false,
            config,
            propagations: 0,
            conflicts: 0,
            decisions: 0,
            learned_total: 0,
            floor_violations: 0,
            captured: Vec::new(),
        };
        for clause in &f.clauses {
            if clause.is_tautology() {
                continue;
            }
            match clause.lits() {
                [] => solver.unsat = true,
                [unit] => {
                    let cref = solver.add_clause(clause.lits().to_vec(), false);
                    if !solver.enqueue(*unit, cref) {
                        solver.unsat = true;
                    }
                }
                _ => {
                    solver.add_clause(clause.lits().to_vec(), false);
                }
            }
        }
        solver
    }

    pub fn propagations(&self) -> u64 {
        self.propagations
    }

    pub fn conflicts(&self) -> u64 {
        self.conflicts
    }

    pub fn decisions(&self) -> u64 {
        self.decisions
    }

    pub fn learned_count(&self) -> u64 {
        self.learned_total
    }

    pub fn floor_violations(&self) -> u64 {
        self.floor_violations
    }

    /// Copies of all clauses learned so far, if capturing is enabled.
    pub fn captured_learned(&self) -> &[Clause] {
        &self.captured
    }

    pub fn assumption_count(&self) -> usize {
        self.assumptions.len()
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn value(&self, lit: Lit) -> LBool {
        self.assign.lit_value(lit)
    }

    fn add_clause(&mut self, lits: Vec<Lit>, learned: bool) -> u32 {
        let cref = self.arena.len() as u32;
        if lits.len() >= 2 {
            self.watches[lits[0].code()].push(cref);
            self.watches[lits[1].code()].push(cref);
        }
        if learned {
            self.learned_total += 1;
            self.learned_live += 1;
            if self.config.capture_learned {
                self.captured.push(Clause::new(lits.clone()));
            }
        }
        self.arena.push(ClauseData { lits, activity: 0.0, learned, deleted: false });
        cref
    }

    fn enqueue(&mut self, lit: Lit, reason: u32) -> bool {
        match self.value(lit) {
            LBool::True => true,
            LBool::False => false,
            LBool::Undef => {
                debug_assert!(
                    reason == NO_CLAUSE
                        || self.arena[reason as usize]
                            .lits
                            .iter()
                            .all(|&q| q == lit || self.value(q) == LBool::False),
                    "a reason clause must force exactly the enqueued literal"
                );
                self.assign.assign(lit);
                let v = lit.var().offset();
                self.level[v] = self.decision_level();
                self.reason[v] = reason;
                self.trail.push(lit);
                true
            }
        }
    }

    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.propagations += 1;
            let false_lit = !p;
            let ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut kept = Vec::with_capacity(ws.len());
            let mut conflict = None;
            let mut i = 0;
            'clauses: while i < ws.len() {
                let cref = ws[i];
                i += 1;
                if self.arena[cref as usize].deleted {
                    continue;
                }
                if self.arena[cref as usize].lits[0] == false_lit {
                    self.arena[cref as usize].lits.swap(0, 1);
                }
                let first = self.arena[cref as usize].lits[0];
                if self.value(first) == LBool::True {
                    kept.push(cref);
                    continue;
                }
                for k in 2..self.arena[cref as usize].lits.len() {
                    let candidate = self.arena[cref as usize].lits[k];
                    if self.value(candidate) != LBool::False {
                        self.arena[cref as usize].lits.swap(1, k);
                        self.watches[candidate.code()].push(cref);
                        continue 'clauses;
                    }
                }
                kept.push(cref);
                if self.value(first) == LBool::False {
                    kept.extend_from_slice(&ws[i..]);
                    conflict = Some(cref);
                    break;
                }
                self.enqueue(first, cref);
            }
            self.watches[false_lit.code()] = kept;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v as u32, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.arena[cref as usize];
        if !c.learned {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in &mut self.arena {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learned clause with the
    /// asserting literal in slot 0 and the backjump destination in slot 1,
    /// plus the backjump level itself.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let current = self.decision_level();
        let mut tail: Vec<Lit> = Vec::new();
        let mut touched: Vec<usize> = Vec::new();
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let uip = loop {
            self.bump_clause(confl);
            let len = self.arena[confl as usize].lits.len();
            for k in 0..len {
                let q = self.arena[confl as usize].lits[k];
                if Some(q) == p {
                    continue;
                }
                let v = q.var().offset();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    touched.push(v);
                    self.bump_var(v);
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        tail.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().offset()] {
                    break;
                }
            }
            let pivot = self.trail[idx];
            p = Some(pivot);
            path -= 1;
            if path == 0 {
                break !pivot;
            }
            confl = self.reason[pivot.var().offset()];
            debug_assert_ne!(confl, NO_CLAUSE, "only the UIP may lack a reason");
        };
        let mut learned = Vec::with_capacity(tail.len() + 1);
        learned.push(uip);
        learned.extend(tail);
        let bt_level = if learned.len() == 1 {
            0
        } else {
            let mut best = 1;
            for k in 2..learned.len() {
                if self.level[learned[k].var().offset()]
                    > self.level[learned[best].var().offset()]
                {
                    best = k;
                }
            }
            learned.swap(1, best);
            self.level[learned[1].var().offset()]
        };
        for v in touched {
            self.seen[v] = false;
        }
        self.var_inc /= self.config.vsids_decay;
        self.cla_inc /= self.config.clause_decay;
        (learned, bt_level)
    }

    fn backtrack_to(&mut self, target: u32) {
        while self.decision_level() > target {
            let start = self.trail_lim.pop().unwrap();
            for k in (start..self.trail.len()).rev() {
                let lit = self.trail[k];
                let v = lit.var();
                self.phase[v.offset()] = lit.is_positive();
                self.assign.unassign(v);
                self.reason[v.offset()] = NO_CLAUSE;
                self.heap.insert(v.offset() as u32, &self.activity);
            }
            self.trail.truncate(start);
        }
        self.qhead = self.qhead.min(self.trail.len());
    }

    /// Backtracks to the assumption floor (or stays put if already at or
    /// below it). Restarting never abandons established assumptions.
    pub fn restart(&mut self) {
        let floor = (self.assumptions.len() as u32).min(self.decision_level());
        self.backtrack_to(floor);
        for j in 0..floor as usize {
            if self.value(self.assumptions[j].1) != LBool::True {
                self.floor_violations += 1;
            }
        }
    }

    /// Resets the restart schedule and ages the clause database. Called
    /// after every cube refutation, because the next cube is a fresh
    /// subproblem.
    fn on_cube_refuted(&mut self) {
        self.luby_index = 0;
        self.conflicts_since_restart = 0;
        self.reduce_db();
    }

    fn locked(&self, cref: u32) -> bool {
        let first = self.arena[cref as usize].lits[0];
        self.value(first) == LBool::True && self.reason[first.var().offset()] == cref
    }

    /// Deletes the less active half of the long learned clauses. Binary
    /// clauses and clauses currently acting as reasons are kept.
    fn reduce_db(&mut self) {
        let mut candidates: Vec<u32> = (0..self.arena.len() as u32)
            .filter(|&c| {
                let data = &self.arena[c as usize];
                data.learned && !data.deleted && data.lits.len() > 2 && !self.locked(c)
            })
            .collect();
        candidates.sort_by(|&a, &b| {
            self.arena[a as usize]
                .activity
                .partial_cmp(&self.arena[b as usize].activity)
                .unwrap()
                .then(a.cmp(&b))
        });
        for &c in &candidates[..candidates.len() / 2] {
            self.arena[c as usize].deleted = true;
            self.learned_live -= 1;
        }
    }

    fn decide(&mut self) {
        self.decisions += 1;
        let v = loop {
            let v = self.heap.pop(&self.activity).expect("an unassigned variable exists");
            if self.assign.value(crate::formula::Var::new(v + 1)) == LBool::Undef {
                break v;
            }
        };
        let var = crate::formula::Var::new(v + 1);
        let lit = Lit::new(var, self.phase[v as usize]);
        self.trail_lim.push(self.trail.len());
        self.enqueue(lit, NO_CLAUSE);
    }

    fn all_assigned(&self) -> bool {
        self.trail.len() == self.num_vars
    }

    fn established(&self) -> bool {
        self.decision_level() as usize >= self.assumptions.len()
    }

    /// Handles one conflict: analysis, learning and the backjump, plus the
    /// cube-refutation rule. A conflict at level `L <= |S|` proves the
    /// prefix cube ending at position `L` unsatisfiable, because only
    /// assumption decisions are involved up to there.
    fn resolve_conflict(&mut self, confl: u32) -> ConflictResult {
        self.conflicts += 1;
        self.conflicts_since_restart += 1;
        let level = self.decision_level();
        if level == 0 {
            self.unsat = true;
            return ConflictResult::Unsat;
        }
        let (learned, bt_level) = self.analyze(confl);
        let refuted = (level as usize <= self.assumptions.len()).then(|| {
            let id = self.assumptions[level as usize - 1].0;
            self.assumptions.truncate(level as usize - 1);
            id
        });
        self.backtrack_to(bt_level);
        let cref = self.add_clause(learned.clone(), true);
        self.bump_clause(cref);
        self.enqueue(learned[0], cref);
        if self.learned_live > self.learned_limit {
            self.reduce_db();
            self.learned_limit += self.learned_limit / 2;
        }
        match refuted {
            Some(id) => ConflictResult::PrefixRefuted { id },
            None => ConflictResult::Continue,
        }
    }

    /// Propagates to fixpoint, resolving conflicts as they come, but
    /// returns right after the first prefix refutation so the scheduler
    /// can surface it.
    fn funnel(&mut self) -> RoundEvent {
        loop {
            let Some(confl) = self.propagate() else { return RoundEvent::None };
            match self.resolve_conflict(confl) {
                ConflictResult::Continue => continue,
                ConflictResult::PrefixRefuted { id } => return RoundEvent::PrefixRefuted { id },
                ConflictResult::Unsat => return RoundEvent::Unsat,
            }
        }
    }

    /// Turns the next unestablished assumption into a decision level. An
    /// assumption that already holds gets an empty level, keeping the
    /// level/position correspondence exact. One that is already falsified
    /// refutes its prefix outright, without any conflict clause.
    fn establish_next(&mut self) -> RoundEvent {
        let position = self.decision_level() as usize;
        debug_assert!(position < self.assumptions.len());
        let (id, lit) = self.assumptions[position];
        match self.value(lit) {
            LBool::True => {
                self.trail_lim.push(self.trail.len());
                RoundEvent::None
            }
            LBool::Undef => {
                self.trail_lim.push(self.trail.len());
                self.enqueue(lit, NO_CLAUSE);
                self.funnel()
            }
            LBool::False => {
                self.assumptions.truncate(position);
                RoundEvent::PrefixRefuted { id }
            }
        }
    }

    /// One solving round: finish pending propagation, then either advance
    /// establishment by one level or make one decision.
    fn solving_round(&mut self, io: Option<(&MsgQueue<SolvedMsg>, &TraceSink)>) -> CdclOutcome {
        if self.unsat {
            return CdclOutcome::Unsat;
        }
        if self.established()
            && self.conflicts_since_restart >= luby(self.luby_index) * self.config.luby_unit
        {
            self.restart();
            self.luby_index += 1;
            self.conflicts_since_restart = 0;
        }
        let event = self.funnel();
        if let Some(outcome) = self.settle(event, io) {
            return outcome;
        }
        if !self.established() {
            let event = self.establish_next();
            if let Some(outcome) = self.settle(event, io) {
                return outcome;
            }
            return CdclOutcome::Paused;
        }
        if self.all_assigned() {
            return CdclOutcome::Sat(self.assign.clone());
        }
        self.decide();
        let event = self.funnel();
        if let Some(outcome) = self.settle(event, io) {
            return outcome;
        }
        if self.all_assigned() {
            return CdclOutcome::Sat(self.assign.clone());
        }
        CdclOutcome::Paused
    }

    fn settle(
        &mut self,
        event: RoundEvent,
        io: Option<(&MsgQueue<SolvedMsg>, &TraceSink)>,
    ) -> Option<CdclOutcome> {
        match event {
            RoundEvent::None => None,
            RoundEvent::Unsat => Some(CdclOutcome::Unsat),
            RoundEvent::PrefixRefuted { id } => {
                if let Some((qs, trace)) = io {
                    qs.send(SolvedMsg { cube_id: id });
                    trace.record(Peer::Cdcl, &format!("send_solved {id}"));
                }
                self.on_cube_refuted();
                Some(CdclOutcome::CubeRefuted(id))
            }
        }
    }

    /// One scheduler step: either absorb one decision message or run one
    /// solving round. Absorbing a message shortens the assumption stack to
    /// the requested level and appends the new literal; a message asking
    /// for a deeper stack than exists is stale and is dropped.
    pub fn ccc_step(
        &mut self,
        q_decision: &MsgQueue<DecisionMsg>,
        q_solved: &MsgQueue<SolvedMsg>,
        trace: &TraceSink,
    ) -> CdclOutcome {
        if self.unsat {
            return CdclOutcome::Unsat;
        }
        if let Some(msg) = q_decision.pop() {
            trace.record(
                Peer::Cdcl,
                &format!("recv_decision {} {} {}", msg.cube_id, msg.backtrack_level, msg.lit),
            );
            if decision_is_stale(&msg, self.assumptions.len()) {
                trace.record(Peer::Cdcl, &format!("discard_decision {}", msg.cube_id));
            } else {
                if self.decision_level() > msg.backtrack_level {
                    self.backtrack_to(msg.backtrack_level);
                }
                self.assumptions.truncate(msg.backtrack_level as usize);
                self.assumptions.push((msg.cube_id, msg.lit));
            }
            return CdclOutcome::Paused;
        }
        self.solving_round(Some((q_solved, trace)))
    }

    /// Solves the formula outright. Assumptions from earlier incremental
    /// calls are dropped; learned clauses are kept.
    pub fn solve(&mut self) -> SolveResult {
        self.backtrack_to(0);
        self.assumptions.clear();
        loop {
            match self.solving_round(None) {
                CdclOutcome::Sat(model) => return SolveResult::Sat(model),
                CdclOutcome::Unsat => return SolveResult::Unsat,
                CdclOutcome::CubeRefuted(_) => unreachable!("no assumptions are set"),
                CdclOutcome::Paused => {}
            }
        }
    }

    /// Solves under an assumption cube. Learned clauses persist into later
    /// calls on the same solver. `budget` bounds the number of conflicts;
    /// `abort`, checked between rounds, allows cooperative cancellation.
    pub fn solve_under(
        &mut self,
        assumptions: &Cube,
        budget: Option<u64>,
        abort: Option<&crate::protocol::AbortFlag>,
    ) -> SolveResult {
        self.backtrack_to(0);
        self.assumptions = assumptions
            .lits()
            .iter()
            .enumerate()
            .map(|(j, &lit)| (CubeId(j as u64 + 1), lit))
            .collect();
        let start = self.conflicts;
        loop {
            if let Some(flag) = abort {
                if flag.is_set() {
                    return SolveResult::Cancelled;
                }
            }
            if let Some(limit) = budget {
                if self.conflicts - start >= limit {
                    return SolveResult::BudgetExhausted;
                }
            }
            match self.solving_round(None) {
                CdclOutcome::Sat(model) => return SolveResult::Sat(model),
                CdclOutcome::Unsat => return SolveResult::Unsat,
                CdclOutcome::CubeRefuted(id) => {
                    // Positions double as ids here, so the id is the
                    // length of the refuted prefix.
                    let len = id.0 as usize;
                    let prefix = Cube::new(assumptions.lits()[..len].to_vec());
                    return SolveResult::UnsatUnderAssumptions(prefix);
                }
                CdclOutcome::Paused => {}
            }
        }
    }
}

/// Luby restart scaling: 1, 1, 2, 1, 1, 2, 4, ... for `x` starting at 0.
fn luby(mut x: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) / 2;
        seq -= 1;
        x %= size;
    }
    1 << seq
}
