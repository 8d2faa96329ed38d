//! Concurrent cube-and-conquer SAT solving.
//!
//! The crate pairs a lookahead engine that walks a binary cube tree with a
//! CDCL engine that solves under the cube prefix as assumptions. The two run
//! as peers and exchange messages: the lookahead side streams its current
//! decision path, the CDCL side reports refuted prefixes back. `protocol`
//! wires the peers together, `conquer` solves an already-cut cube set, and
//! `verify` holds the slow reference implementations the tests trust.

pub mod cdcl;
pub mod conquer;
pub mod formula;
pub mod heuristics;
pub mod lookahead;
pub mod protocol;
pub mod verify;

pub use cdcl::{Cdcl, CdclConfig, CdclOutcome, SolveResult};
pub use conquer::{
    conquer_parallel, conquer_serial, parse_icnf, write_icnf, ConquerOutcome, ConquerResult,
    CubeResult, CubeStat, EmptyCubeList, IcnfDocument, MalformedIcnf,
};
pub use formula::{
    dnf_is_tautology, eval_clause, negate_cube, parse_dimacs, serialize_dimacs, Assignment,
    Clause, ClauseEval, CnfFormula, Cube, DimacsError, LBool, Lit, TooManyVariables, Var,
};
pub use heuristics::{
    cc_update, ccc_on_cutoff, ccc_update, difficulty, CcEvent, CcThreshold, CccThreshold,
    Difficulty, HeuristicConfig, PredictorEvent, PredictorState, PredictorVerdict, RefutedBy,
    ZeroFreeVariables,
};
pub use lookahead::{
    ClosedLeaf, CubePhaseOutput, LaConfig, LaEngine, LaMode, LaStep, LeafStat, Refuter,
};
pub use protocol::{
    decision_is_stale, run_ccc, run_ccc_threads, run_cdcl_only, run_lookahead_only,
    solved_is_stale, AbortFlag, AbortReason, CccConfig, CccMode, CccOutcome, CccRun, CubeId,
    DecisionMsg, MsgQueue, Peer, RunStats, Schedule, SolvedMsg, TraceSink,
};
pub use verify::{
    brute_force_solve, check_model, check_tree_cover, cross_refutation_instance,
    deep_discrepancy_instance, probe_shielded_unsat, random_3sat, OracleOutcome, OracleVerdict,
    PartialModel,
};
