//! Cutoff thresholds and the effectiveness predictor.
//!
//! The cutoff heuristic decides when the lookahead engine stops splitting
//! and emits the current cube. Two threshold schemes exist: the classic one
//! driven by decisions and lookahead refutations, and the concurrent one
//! driven by a per-cube difficulty score that tracks which engine refuted
//! the cube. The predictor watches the early search and votes on whether
//! cube-and-conquer suits the instance at all. Everything here is a pure
//! state transition; callers own the state and feed events in.

use thiserror::Error;

/// Tunable constants for the thresholds and the predictor. The defaults are
/// the values the rest of the crate is tested against.
#[derive(Debug, Clone, PartialEq)]
pub struct HeuristicConfig {
    /// Starting value of the classic cutoff threshold.
    pub cc_init_threshold: f64,
    /// Classic threshold multiplier when lookahead solves a cube or the
    /// search descends too deep.
    pub cc_decay: f64,
    /// Classic threshold multiplier applied at every decision.
    pub cc_growth: f64,
    /// Starting value of the concurrent cutoff threshold.
    pub ccc_init_threshold: f64,
    /// Difficulty multiplier for the target when CDCL refuted the cube.
    pub ccc_cdcl_factor: f64,
    /// Difficulty multiplier for the target when lookahead refuted it.
    pub ccc_la_factor: f64,
    /// Weight of the new target in the threshold filter; the old threshold
    /// keeps the complementary weight.
    pub ccc_filter: f64,
    /// Concurrent threshold multiplier for every cube cut off.
    pub ccc_cutoff_growth: f64,
    /// Decision depth beyond which the classic scheme counts a branch as
    /// too deep.
    pub too_deep: u32,
    /// A closed leaf with more discrepancies than this aborts to CDCL.
    pub predictor_discrepancy_limit: u32,
    /// Lookahead must win more than this many cubes within the budget.
    pub predictor_min_la_wins: u64,
    /// Predictor budget in propagations, used under the deterministic
    /// scheduler.
    pub predictor_budget_propagations: u64,
    /// Predictor budget in wall seconds, used under the thread scheduler.
    pub predictor_budget_seconds: f64,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            cc_init_threshold: 1000.0,
            cc_decay: 0.7,
            cc_growth: 1.05,
            ccc_init_threshold: 1000.0,
            ccc_cdcl_factor: 0.4,
            ccc_la_factor: 3.0,
            ccc_filter: 0.4,
            ccc_cutoff_growth: 1.05,
            too_deep: 50,
            predictor_discrepancy_limit: 20,
            predictor_min_la_wins: 10,
            predictor_budget_propagations: 2_000_000,
            predictor_budget_seconds: 5.0,
        }
    }
}

/// How hard a cube looks for CDCL: decisions squared times total assigned
/// literals, per free variable.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Difficulty(pub f64);

/// Threshold for the classic cutoff scheme.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CcThreshold(pub f64);

/// Threshold for the concurrent cutoff scheme.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CccThreshold(pub f64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("difficulty is undefined with zero free variables")]
pub struct ZeroFreeVariables;

/// Computes the difficulty of a node from its decision count, implied
/// count, and free-variable count.
pub fn difficulty(n_dec: u64, n_imp: u64, n_free: u64) -> Result<Difficulty, ZeroFreeVariables> {
    if n_free == 0 {
        return Err(ZeroFreeVariables);
    }
    let dec = n_dec as f64;
    let imp = n_imp as f64;
    Ok(Difficulty(dec * dec * (dec + imp) / n_free as f64))
}

/// Events that move the classic threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CcEvent {
    LaSolvedCube,
    TooDeep,
    Decision,
}

/// Applies one classic-scheme event: refutations and deep branches shrink
/// the threshold, decisions grow it.
pub fn cc_update(t: CcThreshold, event: CcEvent, cfg: &HeuristicConfig) -> CcThreshold {
    match event {
        CcEvent::LaSolvedCube | CcEvent::TooDeep => CcThreshold(t.0 * cfg.cc_decay),
        CcEvent::Decision => CcThreshold(t.0 * cfg.cc_growth),
    }
}

/// Which engine refuted a cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefutedBy {
    Cdcl,
    Lookahead,
}

/// Moves the concurrent threshold towards a target derived from the refuted
/// cube's difficulty: a fraction of it when CDCL won (cubes should get
/// easier), a multiple when lookahead won (cutting was premature). The move
/// is filtered so one cube never dominates.
pub fn ccc_update(
    t: CccThreshold,
    d: Difficulty,
    solver: RefutedBy,
    cfg: &HeuristicConfig,
) -> CccThreshold {
    let s = match solver {
        RefutedBy::Cdcl => cfg.ccc_cdcl_factor * d.0,
        RefutedBy::Lookahead => cfg.ccc_la_factor * d.0,
    };
    CccThreshold(cfg.ccc_filter * s + (1.0 - cfg.ccc_filter) * t.0)
}

/// Grows the concurrent threshold after a cube is cut off, so emission
/// stays rare unless refutations keep pulling the threshold back down.
pub fn ccc_on_cutoff(t: CccThreshold, cfg: &HeuristicConfig) -> CccThreshold {
    CccThreshold(t.0 * cfg.ccc_cutoff_growth)
}

/// The predictor's current answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorVerdict {
    Undecided,
    Continue,
    AbortToCdcl,
}

/// What the predictor hears from the running search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorEvent {
    /// Lookahead refuted a cube before CDCL reported it solved.
    LaRefutedCube,
    /// Any leaf reached a terminal state; carries its discrepancy count.
    LeafClosed { discrepancies: u32 },
    /// Budget consumed since the last tick, in whatever unit the budget
    /// limit uses.
    Tick { units: u64 },
}

/// Predictor bookkeeping. The verdict moves away from `Undecided` at most
/// once; counters keep accumulating afterwards for reporting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictorState {
    pub la_wins: u64,
    pub max_leaf_discrepancies: u32,
    pub budget_spent: u64,
    pub verdict: PredictorVerdict,
    budget_limit: u64,
    discrepancy_limit: u32,
    min_la_wins: u64,
}

impl PredictorState {
    /// Fresh state. `budget_limit` is in the caller's budget unit
    /// (propagations or whole seconds, depending on the scheduler).
    pub fn new(budget_limit: u64, cfg: &HeuristicConfig) -> PredictorState {
        PredictorState {
            la_wins: 0,
            max_leaf_discrepancies: 0,
            budget_spent: 0,
            verdict: PredictorVerdict::Undecided,
            budget_limit,
            discrepancy_limit: cfg.predictor_discrepancy_limit,
            min_la_wins: cfg.predictor_min_la_wins,
        }
    }

    /// Feeds one event through. Counters always update; the verdict only
    /// moves while still undecided.
    pub fn observe(mut self, event: PredictorEvent) -> PredictorState {
        match event {
            PredictorEvent::LaRefutedCube => self.la_wins += 1,
            PredictorEvent::LeafClosed { discrepancies } => {
                self.max_leaf_discrepancies = self.max_leaf_discrepancies.max(discrepancies);
                if self.verdict == PredictorVerdict::Undecided
                    && discrepancies > self.discrepancy_limit
                {
                    self.verdict = PredictorVerdict::AbortToCdcl;
                }
            }
            PredictorEvent::Tick { units } => {
                self.budget_spent = self.budget_spent.saturating_add(units);
                if self.verdict == PredictorVerdict::Undecided
                    && self.budget_spent >= self.budget_limit
                {
                    self.verdict = if self.la_wins > self.min_la_wins {
                        PredictorVerdict::Continue
                    } else {
                        PredictorVerdict::AbortToCdcl
                    };
                }
            }
        }
        self
    }
}
