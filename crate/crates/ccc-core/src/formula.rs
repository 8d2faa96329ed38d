//! CNF formulas, literals, cubes and assignments.
//!
//! Variables are 1-based as in DIMACS. Internally a literal is a single
//! `u32` code: `2 * (index - 1)` for the positive literal and
//! `2 * (index - 1) + 1` for the negative one, so negation is an XOR on the
//! lowest bit and literals index arrays directly.

use std::fmt;

use thiserror::Error;

/// A propositional variable with a 1-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(u32);

impl Var {
    /// Creates a variable. `index` must be at least 1.
    pub fn new(index: u32) -> Var {
        assert!(index >= 1, "variable indices are 1-based");
        Var(index)
    }

    /// The 1-based index, as written in DIMACS.
    pub fn index(self) -> u32 {
        self.0
    }

    /// Zero-based offset for array lookups.
    pub fn offset(self) -> usize {
        (self.0 - 1) as usize
    }

    /// Positive literal of this variable.
    pub fn positive(self) -> Lit {
        Lit::new(self, true)
    }

    /// Negative literal of this variable.
    pub fn negative(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal: a variable together with a sign, packed into one word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Lit {
        Lit((var.0 - 1) << 1 | (!positive) as u32)
    }

    /// Builds a literal from a non-zero DIMACS integer.
    pub fn from_dimacs(n: i64) -> Lit {
        assert!(n != 0, "0 terminates a clause and is not a literal");
        Lit::new(Var::new(n.unsigned_abs() as u32), n > 0)
    }

    /// Signed DIMACS representation.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var().index() as i64;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> Var {
        Var((self.0 >> 1) + 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// The packed code; positive literals are even.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals. May be empty (the unsatisfiable clause).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    /// Builds a clause, dropping duplicate literals while keeping the first
    /// occurrence order. Complementary pairs are kept; use
    /// [`Clause::is_tautology`] to detect them.
    pub fn new(lits: Vec<Lit>) -> Clause {
        let mut out = Vec::with_capacity(lits.len());
        for l in lits {
            if !out.contains(&l) {
                out.push(l);
            }
        }
        Clause { lits: out }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// True if the clause contains a literal and its negation.
    pub fn is_tautology(&self) -> bool {
        self.lits.iter().any(|&l| self.lits.contains(&!l))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lits {
            write!(f, "{} ", l)?;
        }
        write!(f, "0")
    }
}

/// A conjunction of literals in decision order. The search tree gives cubes
/// their order, so two cubes with the same literals in different order are
/// different paths and compare unequal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cube {
    lits: Vec<Lit>,
}

impl Cube {
    /// Builds a cube from literals in decision order. Panics if two literals
    /// use the same variable: a path never decides a variable twice.
    pub fn new(lits: Vec<Lit>) -> Cube {
        for (i, a) in lits.iter().enumerate() {
            for b in &lits[i + 1..] {
                assert!(a.var() != b.var(), "cube decides {} twice", a.var());
            }
        }
        Cube { lits }
    }

    pub fn empty() -> Cube {
        Cube { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }
}

/// The clause `¬l1 ∨ ¬l2 ∨ …` for a cube `l1 ∧ l2 ∧ …`, literals in cube
/// order. An empty cube yields the empty clause.
pub fn negate_cube(cube: &Cube) -> Clause {
    Clause::new(cube.lits.iter().map(|&l| !l).collect())
}

/// A CNF formula over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: u32,
    pub clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<Clause>) -> CnfFormula {
        let f = CnfFormula { num_vars, clauses };
        debug_assert!(f.check_var_bounds());
        f
    }

    fn check_var_bounds(&self) -> bool {
        self.clauses
            .iter()
            .flat_map(|c| c.lits())
            .all(|l| l.var().index() <= self.num_vars)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (1..=self.num_vars).map(Var::new)
    }
}

/// Truth value of a variable under a (possibly partial) assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LBool {
    True,
    False,
    Undef,
}

impl LBool {
    pub fn from_bool(b: bool) -> LBool {
        if b {
            LBool::True
        } else {
            LBool::False
        }
    }
}

/// A partial assignment mapping variables to truth values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<LBool>,
}

impl Assignment {
    pub fn empty(num_vars: u32) -> Assignment {
        Assignment {
            values: vec![LBool::Undef; num_vars as usize],
        }
    }

    /// Total assignment from a vector of booleans, `values[i]` giving the
    /// value of variable `i + 1`.
    pub fn from_bools(values: &[bool]) -> Assignment {
        Assignment {
            values: values.iter().map(|&b| LBool::from_bool(b)).collect(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn value(&self, var: Var) -> LBool {
        self.values[var.offset()]
    }

    /// Value of a literal: negation flips True and False, Undef stays Undef.
    pub fn lit_value(&self, lit: Lit) -> LBool {
        match (self.value(lit.var()), lit.is_positive()) {
            (LBool::Undef, _) => LBool::Undef,
            (v, true) => v,
            (LBool::True, false) => LBool::False,
            (LBool::False, false) => LBool::True,
        }
    }

    pub fn assign(&mut self, lit: Lit) {
        self.values[lit.var().offset()] = LBool::from_bool(lit.is_positive());
    }

    pub fn unassign(&mut self, var: Var) {
        self.values[var.offset()] = LBool::Undef;
    }

    pub fn is_total(&self) -> bool {
        self.values.iter().all(|&v| v != LBool::Undef)
    }

    pub fn assigned_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != LBool::Undef).count()
    }

    /// Literals of all assigned variables, in index order.
    pub fn to_lits(&self) -> Vec<Lit> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, &v)| match v {
                LBool::True => Some(Var::new(i as u32 + 1).positive()),
                LBool::False => Some(Var::new(i as u32 + 1).negative()),
                LBool::Undef => None,
            })
            .collect()
    }
}

/// Status of one clause under a partial assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClauseEval {
    /// Some literal is true.
    Satisfied,
    /// Every literal is false.
    Falsified,
    /// Exactly one literal is unassigned, the rest are false.
    Unit(Lit),
    /// Two or more literals are unassigned and none is true.
    Unresolved,
}

/// Evaluates a clause under a partial assignment.
pub fn eval_clause(clause: &Clause, assignment: &Assignment) -> ClauseEval {
    let mut unassigned = None;
    let mut unassigned_count = 0usize;
    for &l in clause.lits() {
        match assignment.lit_value(l) {
            LBool::True => return ClauseEval::Satisfied,
            LBool::False => {}
            LBool::Undef => {
                unassigned = Some(l);
                unassigned_count += 1;
            }
        }
    }
    match unassigned_count {
        0 => ClauseEval::Falsified,
        1 => ClauseEval::Unit(unassigned.unwrap()),
        _ => ClauseEval::Unresolved,
    }
}

/// Errors raised while reading a DIMACS CNF document.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: malformed header, expected `p cnf <vars> <clauses>`")]
    MalformedHeader { line: usize },
    #[error("line {line}: literal {lit} outside declared range 1..={num_vars}")]
    LiteralOutOfRange { line: usize, lit: i64, num_vars: u32 },
    #[error("line {line}: clause not terminated by 0 before end of input")]
    UnterminatedClause { line: usize },
    #[error("line {line}: expected an integer, found `{token}`")]
    InvalidToken { line: usize, token: String },
    #[error("header declared {declared} clauses but the body has {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
}

/// Parses a DIMACS CNF document.
///
/// Comment lines (`c …`) are allowed anywhere. The clause count in the
/// header must match the body exactly. Duplicate literals inside a clause
/// are dropped and tautological clauses are dropped entirely, so the
/// resulting formula may hold fewer clauses than the header declared.
pub fn parse_dimacs(input: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut in_clause = false;
    let mut last_body_line = 1;

    for (lineno, line) in input.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if header.is_none() {
            let mut parts = trimmed.split_ascii_whitespace();
            let ok = parts.next() == Some("p") && parts.next() == Some("cnf");
            let vars = parts.next().and_then(|t| t.parse::<u32>().ok());
            let count = parts.next().and_then(|t| t.parse::<usize>().ok());
            match (ok, vars, count, parts.next()) {
                (true, Some(v), Some(c), None) => {
                    header = Some((v, c));
                    continue;
                }
                _ => return Err(DimacsError::MalformedHeader { line: lineno }),
            }
        }
        let (num_vars, _) = header.unwrap();
        last_body_line = lineno;
        for token in trimmed.split_ascii_whitespace() {
            let n: i64 = token
                .parse()
                .map_err(|_| DimacsError::InvalidToken { line: lineno, token: token.to_string() })?;
            if n == 0 {
                let clause = Clause::new(std::mem::take(&mut current));
                if !clause.is_tautology() {
                    clauses.push(clause);
                }
                in_clause = false;
            } else {
                if n.unsigned_abs() > num_vars as u64 {
                    return Err(DimacsError::LiteralOutOfRange { line: lineno, lit: n, num_vars });
                }
                current.push(Lit::from_dimacs(n));
                in_clause = true;
            }
        }
    }

    let (num_vars, declared) = header.ok_or(DimacsError::MalformedHeader { line: 1 })?;
    if in_clause {
        return Err(DimacsError::UnterminatedClause { line: last_body_line });
    }
    // Tautologies were dropped after counting, so track the raw count here.
    let found = count_terminators(input);
    if found != declared {
        return Err(DimacsError::ClauseCountMismatch { declared, found });
    }
    Ok(CnfFormula::new(num_vars, clauses))
}

fn count_terminators(input: &str) -> usize {
    let mut seen_header = false;
    let mut count = 0;
    for line in input.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if !seen_header {
            seen_header = true;
            continue;
        }
        count += trimmed.split_ascii_whitespace().filter(|&t| t == "0").count();
    }
    count
}

/// Serializes a formula to DIMACS: header line, then one clause per line,
/// literals space-separated and terminated by `0`, every line ending in
/// `\n`. The output is byte-identical for equal formulas.
pub fn serialize_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::new();
    out.push_str(&format!("p cnf {} {}\n", formula.num_vars, formula.clauses.len()));
    for clause in &formula.clauses {
        for lit in clause.lits() {
            out.push_str(&format!("{} ", lit.to_dimacs()));
        }
        out.push_str("0\n");
    }
    out
}

/// Error for operations restricted to small variable counts.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{num_vars} variables exceed the limit of {limit} for exhaustive enumeration")]
pub struct TooManyVariables {
    pub num_vars: u32,
    pub limit: u32,
}

pub(crate) const ENUM_VAR_LIMIT: u32 = 24;

/// Decides by exhaustive enumeration whether a set of cubes, read as a DNF
/// over `num_vars` variables, is a tautology. Limited to 24 variables.
pub fn dnf_is_tautology(cubes: &[Cube], num_vars: u32) -> Result<bool, TooManyVariables> {
    if num_vars > ENUM_VAR_LIMIT {
        return Err(TooManyVariables { num_vars, limit: ENUM_VAR_LIMIT });
    }
    // Bit i of a mask holds the value of variable i + 1.
    let masks: Vec<(u32, u32)> = cubes
        .iter()
        .map(|cube| {
            let mut pos = 0u32;
            let mut neg = 0u32;
            for &l in cube.lits() {
                let bit = 1u32 << l.var().offset();
                if l.is_positive() {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect();
    for m in 0..(1u64 << num_vars) {
        let m = m as u32;
        let covered = masks.iter().any(|&(pos, neg)| m & pos == pos && m & neg == 0);
        if !covered {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lit(n: i64) -> Lit {
        Lit::from_dimacs(n)
    }

    #[test]
    fn literal_codes_pack_sign_in_low_bit() {
        assert_eq!(lit(1).code(), 0);
        assert_eq!(lit(-1).code(), 1);
        assert_eq!(lit(3).code(), 4);
        assert_eq!(lit(-3).code(), 5);
        assert_eq!(!lit(3), lit(-3));
        assert_eq!(!!lit(-7), lit(-7));
    }

    #[test]
    fn clause_construction_drops_duplicates() {
        let c = Clause::new(vec![lit(1), lit(-2), lit(1), lit(-2)]);
        assert_eq!(c.lits(), &[lit(1), lit(-2)]);
        assert!(!c.is_tautology());
        assert!(Clause::new(vec![lit(4), lit(-4)]).is_tautology());
    }

    #[test]
    fn parse_accepts_header_comments_and_multiline_clauses() {
        let f = parse_dimacs("c intro\np cnf 3 2\n1 -2 0\nc mid\n2\n3 0\n").unwrap();
        assert_eq!(f.num_vars, 3);
        assert_eq!(f.clauses.len(), 2);
        assert_eq!(f.clauses[1].lits(), &[lit(2), lit(3)]);
    }

    #[test]
    fn parse_rejects_malformed_header() {
        assert_eq!(
            parse_dimacs("p cnf x 2\n1 0\n"),
            Err(DimacsError::MalformedHeader { line: 1 })
        );
        assert_eq!(parse_dimacs(""), Err(DimacsError::MalformedHeader { line: 1 }));
    }

    #[test]
    fn parse_rejects_out_of_range_literal() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(DimacsError::LiteralOutOfRange { line: 2, lit: 3, num_vars: 2 })
        );
    }

    #[test]
    fn parse_rejects_unterminated_clause() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 2\n"),
            Err(DimacsError::UnterminatedClause { line: 2 })
        );
    }

    #[test]
    fn parse_rejects_clause_count_mismatch() {
        assert_eq!(
            parse_dimacs("p cnf 2 3\n1 0\n2 0\n"),
            Err(DimacsError::ClauseCountMismatch { declared: 3, found: 2 })
        );
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 0\n2 0\n"),
            Err(DimacsError::ClauseCountMismatch { declared: 1, found: 2 })
        );
    }

    #[test]
    fn parse_dedups_literals_and_drops_tautologies() {
        let f = parse_dimacs("p cnf 2 2\n1 1 -2 0\n2 -2 0\n").unwrap();
        assert_eq!(f.clauses.len(), 1);
        assert_eq!(f.clauses[0].lits(), &[lit(1), lit(-2)]);
    }

    #[test]
    fn serializer_output_is_exact() {
        let f = CnfFormula::new(
            3,
            vec![Clause::new(vec![lit(1), lit(-3)]), Clause::new(vec![lit(2)])],
        );
        assert_eq!(serialize_dimacs(&f), "p cnf 3 2\n1 -3 0\n2 0\n");
    }

    #[test]
    fn eval_clause_reports_each_status() {
        let c = Clause::new(vec![lit(1), lit(2), lit(-3)]);
        let mut a = Assignment::empty(3);
        assert_eq!(eval_clause(&c, &a), ClauseEval::Unresolved);
        a.assign(lit(-1));
        a.assign(lit(3));
        assert_eq!(eval_clause(&c, &a), ClauseEval::Unit(lit(2)));
        a.assign(lit(-2));
        assert_eq!(eval_clause(&c, &a), ClauseEval::Falsified);
        a.assign(lit(2));
        assert_eq!(eval_clause(&c, &a), ClauseEval::Satisfied);
    }

    #[test]
    fn negate_cube_keeps_order() {
        let cube = Cube::new(vec![lit(2), lit(-5), lit(3)]);
        assert_eq!(negate_cube(&cube).lits(), &[lit(-2), lit(5), lit(-3)]);
        assert!(negate_cube(&Cube::empty()).is_empty());
    }

    #[test]
    fn dnf_tautology_examples() {
        let t = vec![Cube::new(vec![lit(1)]), Cube::new(vec![lit(-1)])];
        assert_eq!(dnf_is_tautology(&t, 2), Ok(true));
        let not_t = vec![Cube::new(vec![lit(1), lit(2)]), Cube::new(vec![lit(-1)])];
        assert_eq!(dnf_is_tautology(&not_t, 2), Ok(false));
        assert!(dnf_is_tautology(&t, 25).is_err());
        // The empty cube covers everything.
        assert_eq!(dnf_is_tautology(&[Cube::empty()], 3), Ok(true));
        assert_eq!(dnf_is_tautology(&[], 1), Ok(false));
    }

    fn arb_formula() -> impl Strategy<Value = CnfFormula> {
        (1u32..=8).prop_flat_map(|nv| {
            let clause = proptest::collection::vec((1u32..=nv, any::<bool>()), 1..=4)
                .prop_map(|lits| {
                    Clause::new(
                        lits.into_iter()
                            .map(|(v, pos)| Lit::new(Var::new(v), pos))
                            .collect(),
                    )
                })
                .prop_filter("no tautologies in canonical formulas", |c| !c.is_tautology());
            proptest::collection::vec(clause, 0..12)
                .prop_map(move |clauses| CnfFormula::new(nv, clauses))
        })
    }

    proptest! {
        #[test]
        fn parse_inverts_serialize(f in arb_formula()) {
            let text = serialize_dimacs(&f);
            let parsed = parse_dimacs(&text).unwrap();
            prop_assert_eq!(&parsed, &f);
            prop_assert_eq!(serialize_dimacs(&parsed), text);
        }

        #[test]
        fn cube_and_negation_disagree_everywhere(
            lits in proptest::collection::vec((1u32..=6, any::<bool>()), 1..=6)
        ) {
            let mut seen = std::collections::HashSet::new();
            let lits: Vec<Lit> = lits
                .into_iter()
                .filter(|(v, _)| seen.insert(*v))
                .map(|(v, pos)| Lit::new(Var::new(v), pos))
                .collect();
            let cube = Cube::new(lits);
            let clause = negate_cube(&cube);
            // Any total assignment satisfies the cube iff it falsifies the clause.
            for m in 0u32..(1 << 6) {
                let vals: Vec<bool> = (0..6).map(|i| m & (1 << i) != 0).collect();
                let a = Assignment::from_bools(&vals);
                let cube_sat = cube.lits().iter().all(|&l| a.lit_value(l) == LBool::True);
                let eval = eval_clause(&clause, &a);
                prop_assert_eq!(cube_sat, eval == ClauseEval::Falsified);
            }
        }
    }
}
