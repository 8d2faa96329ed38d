//! Reference implementations used to cross-check the solvers.
//!
//! Everything in this module favours being obviously correct over being
//! fast: the brute-force solver enumerates assignments, the tree checker
//! rebuilds the branch structure literally. Tests treat these as ground
//! truth for the real engines.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{
    eval_clause, Assignment, Clause, ClauseEval, CnfFormula, Cube, LBool, Lit, TooManyVariables,
    Var, ENUM_VAR_LIMIT,
};

/// Outcome of exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    /// The first satisfying assignment in enumeration order.
    Sat(Assignment),
    Unsat,
}

/// Result of [`brute_force_solve`], including how many assignments were
/// examined before the verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleVerdict {
    pub outcome: OracleOutcome,
    pub assignments_enumerated: u64,
}

impl OracleVerdict {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, OracleOutcome::Sat(_))
    }
}

/// Solves a formula by enumerating every assignment, all-true first:
/// variable 1 is the most significant position and `true` sorts before
/// `false`. Restricted to 24 variables.
pub fn brute_force_solve(formula: &CnfFormula) -> Result<OracleVerdict, TooManyVariables> {
    let n = formula.num_vars;
    if n > ENUM_VAR_LIMIT {
        return Err(TooManyVariables { num_vars: n, limit: ENUM_VAR_LIMIT });
    }
    // One bit per variable, variable 1 at the most significant position.
    // A clause is satisfied iff a positive literal's bit is set or a
    // negative literal's bit is clear.
    let bit = |v: Var| 1u64 << (n - v.index());
    let masks: Vec<(u64, u64)> = formula
        .clauses
        .iter()
        .map(|c| {
            let mut pos = 0;
            let mut neg = 0;
            for l in c.lits() {
                if l.is_positive() {
                    pos |= bit(l.var());
                } else {
                    neg |= bit(l.var());
                }
            }
            (pos, neg)
        })
        .collect();
    let total = 1u64 << n;
    for i in 0..total {
        // Bit pattern i: a 0 bit means true, so i == 0 is the all-true row.
        let truth = !i;
        if masks.iter().all(|&(pos, neg)| pos & truth != 0 || neg & i != 0) {
            let values: Vec<bool> = (0..n).map(|v| i & (1 << (n - 1 - v)) == 0).collect();
            let a = Assignment::from_bools(&values);
            debug_assert!(formula
                .clauses
                .iter()
                .all(|c| eval_clause(c, &a) == ClauseEval::Satisfied));
            return Ok(OracleVerdict { outcome: OracleOutcome::Sat(a), assignments_enumerated: i + 1 });
        }
    }
    Ok(OracleVerdict { outcome: OracleOutcome::Unsat, assignments_enumerated: total })
}

/// Raised when a model is checked but leaves variables unassigned.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model leaves variable x{var} unassigned")]
pub struct PartialModel {
    pub var: u32,
}

/// Checks a total model against a formula: true iff every clause has a true
/// literal. A partial assignment is an error, not a failed check.
pub fn check_model(formula: &CnfFormula, model: &Assignment) -> Result<bool, PartialModel> {
    assert!(model.num_vars() >= formula.num_vars, "model covers too few variables");
    for v in formula.vars() {
        if model.value(v) == LBool::Undef {
            return Err(PartialModel { var: v.index() });
        }
    }
    Ok(formula
        .clauses
        .iter()
        .all(|c| eval_clause(c, model) == ClauseEval::Satisfied))
}

/// Checks that a set of cubes is exactly the leaf set of one binary
/// branching tree: at every node the remaining cubes split on a single
/// variable into a positive and a negative group, and each leaf is one cube.
///
/// Cubes keep their decision order, so the first literal of every cube in a
/// group must branch on the same variable. A single empty cube is the
/// degenerate tree whose root is a leaf.
pub fn check_tree_cover(emitted: &[Cube], refuted: &[Cube]) -> bool {
    let mut leaves: Vec<&[Lit]> = emitted
        .iter()
        .chain(refuted.iter())
        .map(|c| c.lits())
        .collect();
    if leaves.is_empty() {
        return false;
    }
    split_covers(&mut leaves)
}

fn split_covers(leaves: &mut [&[Lit]]) -> bool {
    if leaves.len() == 1 {
        return leaves[0].is_empty();
    }
    // More than one leaf: all paths must branch here on one variable.
    let first = match leaves[0].first() {
        Some(&l) => l,
        None => return false, // empty cube cannot share a tree with others
    };
    let var = first.var();
    let mut pos: Vec<&[Lit]> = Vec::new();
    let mut neg: Vec<&[Lit]> = Vec::new();
    for path in leaves.iter() {
        match path.first() {
            Some(&l) if l.var() == var && l.is_positive() => pos.push(&path[1..]),
            Some(&l) if l.var() == var => neg.push(&path[1..]),
            _ => return false,
        }
    }
    if pos.is_empty() || neg.is_empty() {
        return false;
    }
    split_covers(&mut pos) && split_covers(&mut neg)
}

/// A fixed 33-variable satisfiable instance built so that, under a
/// lookahead-heavy schedule, the CDCL peer refutes a branch the lookahead
/// peer is still expanding. Two ingredients make that happen: a cluster of
/// clauses over three variables whose every sign combination is present
/// only below one branch, which single-literal probing cannot see but
/// clause learning untangles quickly, and a pair of variables whose
/// contradiction needs two probe stages, which kills one deep branch on
/// the lookahead side first. Helper variables give the early decisions
/// distinct probe scores so the visit order is forced.
pub fn cross_refutation_instance() -> CnfFormula {
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    // Probe scores for the first decision: x2 implies five helpers
    // positively, four negatively.
    for h in 10..=14 {
        clauses.push(vec![-2, h]);
    }
    for h in 15..=18 {
        clauses.push(vec![2, h]);
    }
    // Second decision: x3 implies three helpers, its negation four.
    for k in 23..=25 {
        clauses.push(vec![-3, k]);
    }
    for m in 19..=22 {
        clauses.push(vec![3, m]);
    }
    // Unsatisfiable cluster over (1, 5, 6), active only under x2 and -x3.
    for sa in [1i64, -1] {
        for sb in [5i64, -5] {
            for sc in [6i64, -6] {
                clauses.push(vec![-2, 3, sa, sb, sc]);
            }
        }
    }
    // Two-stage contradiction over (8, 9), active under -x3 and x7.
    for sp in [8i64, -8] {
        for sq in [9i64, -9] {
            clauses.push(vec![3, -7, sp, sq]);
        }
    }
    // Probe scores for the x7 decision and the x4 decision below it.
    for w in 26..=28 {
        clauses.push(vec![3, -7, w]);
    }
    clauses.push(vec![3, 7, 29]);
    clauses.push(vec![3, 7, 30]);
    clauses.push(vec![3, 7, 4, 31]);
    clauses.push(vec![3, 7, 4, 32]);
    clauses.push(vec![3, 7, -4, 33]);
    CnfFormula::new(
        33,
        clauses
            .into_iter()
            .map(|c| Clause::new(c.into_iter().map(Lit::from_dimacs).collect()))
            .collect(),
    )
}

/// A satisfiable instance whose lookahead tree runs `depth` right branches
/// deep before the first leaf closes: every probe is silent until all of
/// `x1..x_depth` are assigned true, at which point the two tail variables
/// contradict. Exercises discrepancy-based abort decisions.
pub fn deep_discrepancy_instance(depth: u32) -> CnfFormula {
    let a = depth as i64 + 1;
    let b = depth as i64 + 2;
    let prefix: Vec<i64> = (1..=depth as i64).map(|v| -v).collect();
    let mut clauses = Vec::new();
    for sa in [a, -a] {
        for sb in [b, -b] {
            let mut lits = prefix.clone();
            lits.push(sa);
            lits.push(sb);
            clauses.push(Clause::new(lits.into_iter().map(Lit::from_dimacs).collect()));
        }
    }
    CnfFormula::new(depth + 2, clauses)
}

/// An unsatisfiable instance that hides its contradiction from
/// single-literal probing: the core over variables 1..3 contains every
/// sign combination, so no single probe fails, while `levels` padding
/// variables carry positive probe scores and force the lookahead tree to
/// enumerate all their sign combinations first. The tree therefore closes
/// about `2^(levels+1)` leaves, all refuted by the lookahead peer itself.
pub fn probe_shielded_unsat(levels: u32) -> CnfFormula {
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    for sa in [1i64, -1] {
        for sb in [2i64, -2] {
            for sc in [3i64, -3] {
                clauses.push(vec![sa, sb, sc]);
            }
        }
    }
    for i in 0..levels as i64 {
        let y = 4 + i;
        let pos_helper = 4 + levels as i64 + 2 * i;
        let neg_helper = pos_helper + 1;
        clauses.push(vec![-y, pos_helper]);
        clauses.push(vec![y, neg_helper]);
    }
    CnfFormula::new(
        3 + 3 * levels,
        clauses
            .into_iter()
            .map(|c| Clause::new(c.into_iter().map(Lit::from_dimacs).collect()))
            .collect(),
    )
}

/// Generates a random 3-SAT instance: `num_clauses` clauses, each over three
/// distinct variables with independently random signs. Clauses may repeat.
/// The same seed always yields the same formula.
pub fn random_3sat(num_vars: u32, num_clauses: usize, seed: u64) -> CnfFormula {
    assert!(num_vars >= 3, "3-SAT needs at least three variables");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut clauses = Vec::with_capacity(num_clauses);
    for _ in 0..num_clauses {
        let mut vars = [0u32; 3];
        let mut picked = 0;
        while picked < 3 {
            let v = rng.gen_range(1..=num_vars);
            if !vars[..picked].contains(&v) {
                vars[picked] = v;
                picked += 1;
            }
        }
        let lits = vars
            .iter()
            .map(|&v| Lit::new(Var::new(v), rng.gen_bool(0.5)))
            .collect();
        clauses.push(Clause::new(lits));
    }
    CnfFormula::new(num_vars, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_dimacs;

    fn lit(n: i64) -> Lit {
        Lit::from_dimacs(n)
    }

    #[test]
    fn oracle_finds_first_model_all_true_first() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        let v = brute_force_solve(&f).unwrap();
        match v.outcome {
            OracleOutcome::Sat(m) => {
                assert_eq!(m.value(Var::new(1)), LBool::True);
                assert_eq!(m.value(Var::new(2)), LBool::True);
            }
            OracleOutcome::Unsat => panic!("expected sat"),
        }
        assert_eq!(v.assignments_enumerated, 1);
    }

    #[test]
    fn oracle_prefers_earlier_variables() {
        // Forces x1 false; the first model in order is then x1=F, x2=T.
        let f = parse_dimacs("p cnf 2 2\n-1 0\n1 2 0\n").unwrap();
        let v = brute_force_solve(&f).unwrap();
        match v.outcome {
            OracleOutcome::Sat(m) => {
                assert_eq!(m.value(Var::new(1)), LBool::False);
                assert_eq!(m.value(Var::new(2)), LBool::True);
            }
            OracleOutcome::Unsat => panic!("expected sat"),
        }
    }

    #[test]
    fn oracle_reports_unsat_after_full_enumeration() {
        let f = parse_dimacs("p cnf 1 2\n1 0\n-1 0\n").unwrap();
        let v = brute_force_solve(&f).unwrap();
        assert_eq!(v.outcome, OracleOutcome::Unsat);
        assert_eq!(v.assignments_enumerated, 2);
    }

    #[test]
    fn oracle_rejects_large_formulas() {
        let f = CnfFormula::new(25, vec![]);
        assert!(brute_force_solve(&f).is_err());
    }

    #[test]
    fn check_model_distinguishes_wrong_from_partial() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        let good = Assignment::from_bools(&[true, false]);
        let bad = Assignment::from_bools(&[false, false]);
        assert_eq!(check_model(&f, &good), Ok(true));
        assert_eq!(check_model(&f, &bad), Ok(false));
        let mut partial = Assignment::empty(2);
        partial.assign(lit(1));
        assert_eq!(check_model(&f, &partial), Err(PartialModel { var: 2 }));
    }

    #[test]
    fn tree_cover_accepts_complete_trees() {
        // Root splits on x1; the positive side splits again on x2.
        let leaves = vec![
            Cube::new(vec![lit(1), lit(2)]),
            Cube::new(vec![lit(1), lit(-2)]),
            Cube::new(vec![lit(-1)]),
        ];
        assert!(check_tree_cover(&leaves, &[]));
        assert!(check_tree_cover(&leaves[..1], &leaves[1..]));
    }

    #[test]
    fn tree_cover_rejects_missing_and_mismatched_branches() {
        let missing = vec![Cube::new(vec![lit(1), lit(2)]), Cube::new(vec![lit(-1)])];
        assert!(!check_tree_cover(&missing, &[]));
        let mixed_vars = vec![Cube::new(vec![lit(1)]), Cube::new(vec![lit(-2)])];
        assert!(!check_tree_cover(&mixed_vars, &[]));
        let duplicate = vec![Cube::new(vec![lit(1)]), Cube::new(vec![lit(1)]), Cube::new(vec![lit(-1)])];
        assert!(!check_tree_cover(&duplicate, &[]));
        // A cube that is a prefix of another cannot be a leaf.
        let prefix = vec![
            Cube::new(vec![lit(1)]),
            Cube::new(vec![lit(1), lit(2)]),
            Cube::new(vec![lit(-1)]),
        ];
        assert!(!check_tree_cover(&prefix, &[]));
        assert!(!check_tree_cover(&[], &[]));
    }

    #[test]
    fn tree_cover_accepts_bare_root() {
        assert!(check_tree_cover(&[Cube::empty()], &[]));
        assert!(!check_tree_cover(&[Cube::empty(), Cube::new(vec![lit(1)])], &[]));
    }

    #[test]
    fn cross_refutation_instance_is_satisfiable_via_both_split_variables() {
        let f = cross_refutation_instance();
        assert_eq!(f.num_vars, 33);
        assert_eq!(f.clauses.len(), 36);
        let mut values = vec![false; 33];
        for v in [2u32, 3, 10, 11, 12, 13, 14, 23, 24, 25] {
            values[v as usize - 1] = true;
        }
        let model = Assignment::from_bools(&values);
        assert_eq!(check_model(&f, &model), Ok(true));
    }

    #[test]
    fn deep_discrepancy_instance_is_satisfiable() {
        let f = deep_discrepancy_instance(3);
        assert_eq!(f.num_vars, 5);
        assert_eq!(f.clauses.len(), 4);
        let verdict = brute_force_solve(&f).unwrap();
        assert!(verdict.is_sat());
    }

    #[test]
    fn probe_shielded_instance_is_unsatisfiable() {
        let f = probe_shielded_unsat(2);
        assert_eq!(f.num_vars, 9);
        assert_eq!(f.clauses.len(), 12);
        let verdict = brute_force_solve(&f).unwrap();
        assert_eq!(verdict.outcome, OracleOutcome::Unsat);
    }

    #[test]
    fn random_3sat_is_deterministic_and_well_formed() {
        let a = random_3sat(10, 42, 7);
        let b = random_3sat(10, 42, 7);
        assert_eq!(a, b);
        assert_eq!(a.clauses.len(), 42);
        for c in &a.clauses {
            assert_eq!(c.len(), 3, "three distinct variables per clause");
            let mut vars: Vec<u32> = c.lits().iter().map(|l| l.var().index()).collect();
            vars.sort_unstable();
            vars.dedup();
            assert_eq!(vars.len(), 3);
        }
        let c = random_3sat(10, 42, 8);
        assert_ne!(a, c, "different seeds should differ");
    }

    #[test]
    fn tree_cover_agrees_with_dnf_tautology_on_random_trees() {
        use crate::formula::dnf_is_tautology;
        // Grow random binary trees; their leaves must pass both checkers.
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..50 {
            let leaves = random_tree_leaves(&mut rng, 5);
            assert!(check_tree_cover(&leaves, &[]));
            assert_eq!(dnf_is_tautology(&leaves, 5), Ok(true));
            // Removing any leaf breaks both properties.
            if leaves.len() > 1 {
                let mut broken = leaves.clone();
                let drop_at = rng.gen_range(0..broken.len());
                broken.remove(drop_at);
                assert!(!check_tree_cover(&broken, &[]));
                assert_eq!(dnf_is_tautology(&broken, 5), Ok(false));
            }
        }
    }

    fn random_tree_leaves(rng: &mut ChaCha8Rng, num_vars: u32) -> Vec<Cube> {
        fn grow(rng: &mut ChaCha8Rng, prefix: &mut Vec<Lit>, free: &[u32], out: &mut Vec<Cube>) {
            let split = !free.is_empty() && rng.gen_bool(0.6);
            if !split {
                out.push(Cube::new(prefix.clone()));
                return;
            }
            let var = free[rng.gen_range(0..free.len())];
            let rest: Vec<u32> = free.iter().copied().filter(|&v| v != var).collect();
            for positive in [true, false] {
                prefix.push(Lit::new(Var::new(var), positive));
                grow(rng, prefix, &rest, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        let free: Vec<u32> = (1..=num_vars).collect();
        grow(rng, &mut Vec::new(), &free, &mut out);
        out
    }
}
