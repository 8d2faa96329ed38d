//! Conquer phase: iCNF documents and the solvers that work through them.
//!
//! A cube phase hands over its formula and emitted cubes as one document.
//! [`conquer_serial`] solves the cubes in emission order on a single
//! incremental solver, keeping learned clauses between cubes;
//! [`conquer_parallel`] distributes cubes over a pool of private solvers
//! through a shared claim counter, so no cube is ever solved twice. The
//! on-disk form is the incremental CNF format: a `p inccnf` header, DIMACS
//! clause lines, and one `a`-prefixed assumption line per cube.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::cdcl::{Cdcl, CdclConfig, SolveResult};
use crate::formula::{Assignment, Clause, CnfFormula, Cube, Lit};
use crate::protocol::AbortFlag;

/// A formula together with cubes to solve it under, in emission order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IcnfDocument {
    pub formula: CnfFormula,
    pub cubes: Vec<Cube>,
}

/// Why an iCNF input was rejected. Lines are 1-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MalformedIcnf {
    #[error("line {line}: expected a `p inccnf` header")]
    MissingHeader { line: usize },
    #[error("line {line}: unreadable literal {token:?}")]
    BadLiteral { line: usize, token: String },
    #[error("line {line}: missing the terminating 0")]
    Unterminated { line: usize },
    #[error("line {line}: tokens after the terminating 0")]
    TrailingTokens { line: usize },
    #[error("line {line}: cube mentions variable {var}, but the clauses only go up to {num_vars}")]
    CubeVariableOutOfRange { line: usize, var: u32, num_vars: u32 },
    #[error("line {line}: cube names variable {var} twice")]
    RepeatedCubeVariable { line: usize, var: u32 },
}

/// Serializes a document. Clause lines come first, cube lines after, each
/// terminated by `0`; this is the canonical form [`parse_icnf`] inverts
/// byte for byte.
pub fn write_icnf(doc: &IcnfDocument) -> String {
    let mut out = String::from("p inccnf\n");
    for clause in &doc.formula.clauses {
        for lit in clause.lits() {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    for cube in &doc.cubes {
        out.push_str("a ");
        for lit in cube.lits() {
            out.push_str(&lit.to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

/// Parses the incremental CNF format. Comment (`c`) and blank lines are
/// skipped; the variable count is inferred from the clauses, and cubes may
/// not reach beyond it.
pub fn parse_icnf(input: &str) -> Result<IcnfDocument, MalformedIcnf> {
    let mut saw_header = false;
    let mut clause_lits: Vec<Vec<Lit>> = Vec::new();
    let mut cube_lines: Vec<(usize, Vec<Lit>)> = Vec::new();
    for (i, raw) in input.lines().enumerate() {
        let line = i + 1;
        let mut tokens = raw.split_ascii_whitespace().peekable();
        match tokens.peek() {
            None => continue,
            Some(&"c") => continue,
            _ => {}
        }
        if !saw_header {
            let header: Vec<&str> = tokens.collect();
            if header != ["p", "inccnf"] {
                return Err(MalformedIcnf::MissingHeader { line });
            }
            saw_header = true;
            continue;
        }
        let is_cube = tokens.peek() == Some(&&"a");
        if is_cube {
            tokens.next();
        }
        let lits = read_lits(line, tokens)?;
        if is_cube {
            cube_lines.push((line, lits));
        } else {
            clause_lits.push(lits);
        }
    }
    if !saw_header {
        return Err(MalformedIcnf::MissingHeader { line: input.lines().count() + 1 });
    }
    let num_vars = clause_lits
        .iter()
        .flatten()
        .map(|lit| lit.var().index())
        .max()
        .unwrap_or(0);
    let mut cubes = Vec::with_capacity(cube_lines.len());
    for (line, lits) in cube_lines {
        let mut seen = Vec::new();
        for lit in &lits {
            let var = lit.var().index();
            if var > num_vars {
                return Err(MalformedIcnf::CubeVariableOutOfRange { line, var, num_vars });
            }
            if seen.contains(&var) {
                return Err(MalformedIcnf::RepeatedCubeVariable { line, var });
            }
            seen.push(var);
        }
        cubes.push(Cube::new(lits));
    }
    let clauses = clause_lits.into_iter().map(Clause::new).collect();
    Ok(IcnfDocument { formula: CnfFormula::new(num_vars, clauses), cubes })
}

fn read_lits<'a>(
    line: usize,
    tokens: impl Iterator<Item = &'a str>,
) -> Result<Vec<Lit>, MalformedIcnf> {
    let mut lits = Vec::new();
    let mut terminated = false;
    for token in tokens {
        if terminated {
            return Err(MalformedIcnf::TrailingTokens { line });
        }
        let n: i64 = token
            .parse()
            .map_err(|_| MalformedIcnf::BadLiteral { line, token: token.to_string() })?;
        if n == 0 {
            terminated = true;
        } else {
            lits.push(Lit::from_dimacs(n));
        }
    }
    if !terminated {
        return Err(MalformedIcnf::Unterminated { line });
    }
    Ok(lits)
}

/// Verdict of a conquer run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConquerOutcome {
    /// Some cube is satisfiable together with the formula.
    /// `winning_cube_index` is the cube's 1-based document position.
    Sat { model: Assignment, winning_cube_index: usize },
    /// Every cube was individually refuted.
    Unsat,
}

/// How one attempted cube ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeResult {
    Sat,
    Refuted,
}

/// Counters for one attempted cube. Conflict and propagation counts are
/// the work spent on this cube alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeStat {
    /// 1-based document position.
    pub cube_index: usize,
    pub result: CubeResult,
    pub conflicts: u64,
    pub propagations: u64,
}

/// A finished conquer run: the verdict, one stat entry per attempted cube
/// (document order), and which worker claimed which cubes (claim order;
/// the serial run is one implicit worker).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConquerResult {
    pub outcome: ConquerOutcome,
    pub per_cube: Vec<CubeStat>,
    pub claims: Vec<Vec<usize>>,
}

/// A conquer run over no cubes would be vacuously unsatisfiable, which is
/// wrong whenever the formula itself is satisfiable, so it is rejected.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("a conquer run needs at least one cube")]
pub struct EmptyCubeList;

/// Solves the cubes in document order on one incremental solver. Learned
/// clauses persist from cube to cube; the run stops at the first
/// satisfiable cube, or early if some refutation holds with no assumptions
/// at all, which settles every remaining cube too.
pub fn conquer_serial(
    doc: &IcnfDocument,
    solver: &mut Cdcl,
) -> Result<ConquerResult, EmptyCubeList> {
    if doc.cubes.is_empty() {
        return Err(EmptyCubeList);
    }
    let mut per_cube = Vec::new();
    let mut claims = vec![Vec::new()];
    for (i, cube) in doc.cubes.iter().enumerate() {
        let cube_index = i + 1;
        claims[0].push(cube_index);
        let conflicts = solver.conflicts();
        let propagations = solver.propagations();
        let stat = |result, solver: &Cdcl| CubeStat {
            cube_index,
            result,
            conflicts: solver.conflicts() - conflicts,
            propagations: solver.propagations() - propagations,
        };
        match solver.solve_under(cube, None, None) {
            SolveResult::Sat(model) => {
                per_cube.push(stat(CubeResult::Sat, solver));
                return Ok(ConquerResult {
                    outcome: ConquerOutcome::Sat { model, winning_cube_index: cube_index },
                    per_cube,
                    claims,
                });
            }
            SolveResult::UnsatUnderAssumptions(_) => {
                per_cube.push(stat(CubeResult::Refuted, solver));
            }
            SolveResult::Unsat => {
                per_cube.push(stat(CubeResult::Refuted, solver));
                break;
            }
            other => unreachable!("unbudgeted, uncancelled solve returned {other:?}"),
        }
    }
    Ok(ConquerResult { outcome: ConquerOutcome::Unsat, per_cube, claims })
}

/// Solves the cubes on `k` workers, each with a private solver. Workers
/// claim cubes through a shared counter, so each cube is claimed exactly
/// once; the first satisfiable cube wins and cancels the others at their
/// next solving round. The verdict always matches [`conquer_serial`], the
/// winning index need not.
pub fn conquer_parallel(
    doc: &IcnfDocument,
    k: usize,
    config: &CdclConfig,
) -> Result<ConquerResult, EmptyCubeList> {
    assert!(k >= 1, "a conquer pool needs at least one worker");
    if doc.cubes.is_empty() {
        return Err(EmptyCubeList);
    }
    let next = AtomicUsize::new(0);
    let abort = AbortFlag::new();
    let winner: Mutex<Option<(Assignment, usize)>> = Mutex::new(None);

    let mut workers: Vec<(Vec<usize>, Vec<CubeStat>)> = Vec::with_capacity(k);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..k)
            .map(|_| {
                scope.spawn(|| {
                    let mut solver = Cdcl::new(&doc.formula, config.clone());
                    let mut claimed = Vec::new();
                    let mut stats = Vec::new();
                    loop {
                        if abort.is_set() {
                            break;
                        }
                        let i = next.fetch_add(1, Ordering::SeqCst);
                        if i >= doc.cubes.len() {
                            break;
                        }
                        let cube_index = i + 1;
                        claimed.push(cube_index);
                        let conflicts = solver.conflicts();
                        let propagations = solver.propagations();
                        let stat = |result, solver: &Cdcl| CubeStat {
                            cube_index,
                            result,
                            conflicts: solver.conflicts() - conflicts,
                            propagations: solver.propagations() - propagations,
                        };
                        match solver.solve_under(&doc.cubes[i], None, Some(&abort)) {
                            SolveResult::Sat(model) => {
                                stats.push(stat(CubeResult::Sat, &solver));
                                let mut guard = winner.lock().unwrap();
                                if guard.is_none() {
                                    *guard = Some((model, cube_index));
                                }
                                drop(guard);
                                abort.set();
                                break;
                            }
                            SolveResult::UnsatUnderAssumptions(_) => {
                                stats.push(stat(CubeResult::Refuted, &solver));
                            }
                            SolveResult::Unsat => {
                                stats.push(stat(CubeResult::Refuted, &solver));
                                abort.set();
                                break;
                            }
                            SolveResult::Cancelled => break,
                            SolveResult::BudgetExhausted => {
                                unreachable!("conquer workers run without a budget")
                            }
                        }
                    }
                    (claimed, stats)
                })
            })
            .collect();
        workers = handles.into_iter().map(|h| h.join().unwrap()).collect();
    });

    let claims: Vec<Vec<usize>> = workers.iter().map(|(claimed, _)| claimed.clone()).collect();
    let mut per_cube: Vec<CubeStat> =
        workers.into_iter().flat_map(|(_, stats)| stats).collect();
    per_cube.sort_by_key(|s| s.cube_index);
    let outcome = match winner.into_inner().unwrap() {
        Some((model, winning_cube_index)) => ConquerOutcome::Sat { model, winning_cube_index },
        None => ConquerOutcome::Unsat,
    };
    Ok(ConquerResult { outcome, per_cube, claims })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_dimacs, LBool};
    use crate::verify::{brute_force_solve, check_model, random_3sat};

    fn lit(n: i64) -> Lit {
        Lit::from_dimacs(n)
    }

    fn cube(ns: &[i64]) -> Cube {
        Cube::new(ns.iter().copied().map(Lit::from_dimacs).collect())
    }

    fn doc(dimacs: &str, cubes: &[&[i64]]) -> IcnfDocument {
        IcnfDocument {
            formula: parse_dimacs(dimacs).unwrap(),
            cubes: cubes.iter().map(|c| cube(c)).collect(),
        }
    }

    #[test]
    fn example_document_serializes_exactly() {
        let d = doc("p cnf 2 1\n1 2 0\n", &[&[1], &[-1]]);
        assert_eq!(write_icnf(&d), "p inccnf\n1 2 0\na 1 0\na -1 0\n");
    }

    #[test]
    fn roundtrip_preserves_the_document() {
        let d = doc(
            "p cnf 4 3\n1 -2 0\n-1 3 4 0\n2 0\n",
            &[&[1, 2], &[-1], &[], &[4, -3, 2]],
        );
        let text = write_icnf(&d);
        let parsed = parse_icnf(&text).unwrap();
        assert_eq!(parsed, d);
        assert_eq!(write_icnf(&parsed), text);
    }

    #[test]
    fn parser_skips_comments_and_blank_lines() {
        let text = "c generated\n\np inccnf\nc clauses\n1 2 0\n\na -1 0\n";
        let parsed = parse_icnf(text).unwrap();
        assert_eq!(parsed.formula.num_vars, 2);
        assert_eq!(parsed.formula.clauses.len(), 1);
        assert_eq!(parsed.cubes, vec![cube(&[-1])]);
    }

    #[test]
    fn cube_variables_beyond_the_clauses_are_rejected() {
        let err = parse_icnf("p inccnf\n1 2 0\na 99 0\n").unwrap_err();
        assert_eq!(
            err,
            MalformedIcnf::CubeVariableOutOfRange { line: 3, var: 99, num_vars: 2 }
        );
    }

    #[test]
    fn malformed_lines_are_reported_with_their_position() {
        assert_eq!(
            parse_icnf("1 2 0\n").unwrap_err(),
            MalformedIcnf::MissingHeader { line: 1 }
        );
        assert_eq!(
            parse_icnf("p inccnf\n1 x 0\n").unwrap_err(),
            MalformedIcnf::BadLiteral { line: 2, token: "x".into() }
        );
        assert_eq!(
            parse_icnf("p inccnf\n1 2\n").unwrap_err(),
            MalformedIcnf::Unterminated { line: 2 }
        );
        assert_eq!(
            parse_icnf("p inccnf\n1 0 2 0\n").unwrap_err(),
            MalformedIcnf::TrailingTokens { line: 2 }
        );
        assert_eq!(
            parse_icnf("p inccnf\n1 0\na 1 -1 0\n").unwrap_err(),
            MalformedIcnf::RepeatedCubeVariable { line: 3, var: 1 }
        );
        assert_eq!(parse_icnf("").unwrap_err(), MalformedIcnf::MissingHeader { line: 1 });
    }

    #[test]
    fn serial_conquer_stops_at_the_first_satisfiable_cube() {
        let d = doc(
            "p cnf 3 2\n-1 2 0\n-2 0\n",
            &[&[1], &[2], &[-1], &[3], &[-3]],
        );
        let mut solver = Cdcl::new(&d.formula, CdclConfig::default());
        let result = conquer_serial(&d, &mut solver).unwrap();
        match &result.outcome {
            ConquerOutcome::Sat { model, winning_cube_index } => {
                assert_eq!(*winning_cube_index, 3);
                assert_eq!(check_model(&d.formula, model), Ok(true));
                assert_eq!(model.lit_value(lit(-1)), LBool::True);
            }
            other => panic!("cube 3 is satisfiable, got {other:?}"),
        }
        assert_eq!(result.per_cube.len(), 3, "cubes after the winner are never attempted");
        assert_eq!(
            result.per_cube.iter().map(|s| s.result).collect::<Vec<_>>(),
            vec![CubeResult::Refuted, CubeResult::Refuted, CubeResult::Sat]
        );
        assert_eq!(result.claims, vec![vec![1, 2, 3]]);
    }

    #[test]
    fn serial_conquer_refutes_every_cube_of_an_unsat_instance() {
        for seed in 0..20 {
            let f = random_3sat(6, 40, seed);
            if brute_force_solve(&f).unwrap().is_sat() {
                continue;
            }
            let d = IcnfDocument { formula: f, cubes: vec![cube(&[1]), cube(&[-1])] };
            let mut solver = Cdcl::new(&d.formula, CdclConfig::default());
            let result = conquer_serial(&d, &mut solver).unwrap();
            assert_eq!(result.outcome, ConquerOutcome::Unsat, "seed {seed}");
            assert!(result.per_cube.iter().all(|s| s.result == CubeResult::Refuted));
        }
    }

    #[test]
    fn empty_cube_lists_are_rejected() {
        let d = doc("p cnf 1 1\n1 0\n", &[]);
        let mut solver = Cdcl::new(&d.formula, CdclConfig::default());
        assert_eq!(conquer_serial(&d, &mut solver), Err(EmptyCubeList));
        assert_eq!(conquer_parallel(&d, 2, &CdclConfig::default()), Err(EmptyCubeList));
    }

    #[test]
    fn parallel_claims_partition_the_cubes() {
        // The implication chain is satisfiable, so no worker can ever hit a
        // refutation free of assumptions and cancel the pool early; every
        // cube contradicts the chain and must be claimed by exactly one
        // worker.
        let d = doc(
            "p cnf 5 4\n-1 2 0\n-2 3 0\n-3 4 0\n-4 5 0\n",
            &[
                &[1, -2], &[1, -3], &[1, -4], &[1, -5],
                &[2, -3], &[2, -4], &[2, -5], &[3, -4],
            ],
        );
        for k in [2, 4] {
            let result = conquer_parallel(&d, k, &CdclConfig::default()).unwrap();
            assert_eq!(result.outcome, ConquerOutcome::Unsat);
            assert_eq!(result.claims.len(), k);
            let mut all: Vec<usize> = result.claims.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, (1..=d.cubes.len()).collect::<Vec<_>>());
            assert_eq!(result.per_cube.len(), d.cubes.len());
        }
    }

    #[test]
    fn one_worker_matches_the_serial_run_exactly() {
        let d = doc(
            "p cnf 3 2\n-1 2 0\n-2 0\n",
            &[&[1], &[2], &[-1], &[3]],
        );
        let mut solver = Cdcl::new(&d.formula, CdclConfig::default());
        let serial = conquer_serial(&d, &mut solver).unwrap();
        let parallel = conquer_parallel(&d, 1, &CdclConfig::default()).unwrap();
        assert_eq!(parallel, serial);
    }

    #[test]
    fn parallel_sat_runs_return_a_verified_model() {
        let f = random_3sat(8, 20, 1);
        assert!(brute_force_solve(&f).unwrap().is_sat(), "pick a satisfiable seed");
        let d = IcnfDocument {
            formula: f,
            cubes: vec![cube(&[1]), cube(&[-1])],
        };
        let result = conquer_parallel(&d, 4, &CdclConfig::default()).unwrap();
        match &result.outcome {
            ConquerOutcome::Sat { model, winning_cube_index } => {
                assert_eq!(check_model(&d.formula, model), Ok(true));
                let winning = &d.cubes[winning_cube_index - 1];
                assert!(winning.lits().iter().all(|&l| model.lit_value(l) == LBool::True));
            }
            other => panic!("the instance is satisfiable, got {other:?}"),
        }
    }
}
