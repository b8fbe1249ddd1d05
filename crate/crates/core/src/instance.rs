//! 3-SAT instances and the clause-violation diagonal they induce.
//!
//! Assignments are labeled in natural binary order: bit `k` of the index is
//! the truth value of variable `k + 1`. The diagonal entry for an assignment
//! is the number of clauses it violates, so a zero entry is a solution.

use std::fmt;
use std::fmt::Write as _;

use rand::Rng;
use thiserror::Error;

/// Largest supported variable count (diagonal length 65 536).
pub const MAX_VARS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("malformed DIMACS header: {0}")]
    MalformedHeader(String),
    #[error("clause {clause} has {len} literals, expected 3")]
    ClauseArityError { clause: usize, len: usize },
    #[error("clause {clause} mentions variable {var} more than once")]
    DuplicateVariableInClause { clause: usize, var: u32 },
    #[error("clause {clause}: variable {var} outside 1..={n_vars}")]
    VariableOutOfRange { clause: usize, var: u32, n_vars: usize },
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("invalid literal token {0:?}")]
    InvalidLiteral(String),
    #[error("formula has no clauses")]
    EmptyFormula,
    #[error("{0} variables requested, supported range is 1..={MAX_VARS}")]
    TooManyVariables(usize),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("diagonal must have at least one entry")]
    EmptyDiagonal,
}

/// A literal: a variable index (1-based) with a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    pub var: u32,
    pub negated: bool,
}

impl Literal {
    pub fn new(var: u32, negated: bool) -> Self {
        Literal { var, negated }
    }

    /// From a signed DIMACS integer (`-3` is the negation of variable 3).
    pub fn from_dimacs(v: i64) -> Option<Self> {
        if v == 0 || v.unsigned_abs() > u32::MAX as u64 {
            return None;
        }
        Some(Literal {
            var: v.unsigned_abs() as u32,
            negated: v < 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        if self.negated {
            -(self.var as i64)
        } else {
            self.var as i64
        }
    }

    /// Truth value under an assignment index.
    #[inline]
    pub fn eval(self, assignment: usize) -> bool {
        let bit = (assignment >> (self.var - 1)) & 1 == 1;
        bit != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A clause of exactly three literals over three distinct variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Clause(pub [Literal; 3]);

impl Clause {
    pub fn literals(&self) -> &[Literal; 3] {
        &self.0
    }

    pub fn is_satisfied_by(&self, assignment: usize) -> bool {
        self.0.iter().any(|l| l.eval(assignment))
    }

    /// `(mask, pattern)` such that an assignment violates the clause iff
    /// `assignment & mask == pattern`.
    fn violation_pattern(&self) -> (usize, usize) {
        let mut mask = 0usize;
        let mut pattern = 0usize;
        for lit in &self.0 {
            let bit = 1usize << (lit.var - 1);
            mask |= bit;
            // a negated literal is false when its variable is true
            if lit.negated {
                pattern |= bit;
            }
        }
        (mask, pattern)
    }
}

/// A 3-SAT problem with `n_vars` variables and at least one clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfInstance {
    n_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfInstance {
    /// Validates and builds an instance.
    pub fn new(n_vars: usize, clauses: Vec<Clause>) -> Result<Self, InstanceError> {
        if n_vars == 0 || n_vars > MAX_VARS {
            return Err(InstanceError::TooManyVariables(n_vars));
        }
        if clauses.is_empty() {
            return Err(InstanceError::EmptyFormula);
        }
        for (ci, clause) in clauses.iter().enumerate() {
            check_clause(ci, &clause.0, n_vars)?;
        }
        Ok(CnfInstance { n_vars, clauses })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_assignments(&self) -> usize {
        1 << self.n_vars
    }

    /// Violated-clause count evaluated directly from the clauses.
    pub fn count_violations(&self, assignment: usize) -> u32 {
        self.clauses
            .iter()
            .filter(|c| !c.is_satisfied_by(assignment))
            .count() as u32
    }

    pub fn is_satisfied_by(&self, assignment: usize) -> bool {
        self.clauses.iter().all(|c| c.is_satisfied_by(assignment))
    }

    /// Satisfiability by direct enumeration, without building a diagonal.
    pub fn brute_force_sat(&self) -> bool {
        (0..self.num_assignments()).any(|a| self.is_satisfied_by(a))
    }

    /// Canonical DIMACS rendering: header, then one clause per line.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n_vars, self.clauses.len());
        for c in &self.clauses {
            let [a, b, d] = c.0;
            let _ = writeln!(out, "{a} {b} {d} 0");
        }
        out
    }
}

fn check_clause(ci: usize, lits: &[Literal], n_vars: usize) -> Result<(), InstanceError> {
    if lits.len() != 3 {
        return Err(InstanceError::ClauseArityError {
            clause: ci,
            len: lits.len(),
        });
    }
    for (k, lit) in lits.iter().enumerate() {
        if lit.var == 0 || lit.var as usize > n_vars {
            return Err(InstanceError::VariableOutOfRange {
                clause: ci,
                var: lit.var,
                n_vars,
            });
        }
        if lits[..k].iter().any(|o| o.var == lit.var) {
            return Err(InstanceError::DuplicateVariableInClause {
                clause: ci,
                var: lit.var,
            });
        }
    }
    Ok(())
}

/// Parses DIMACS CNF text restricted to 3-literal clauses.
///
/// Comment lines start with `c`. A line starting with `%` ends the clause
/// section (SATLIB convention). A trailing clause without its terminating
/// `0` is accepted.
pub fn parse_dimacs(text: &str) -> Result<CnfInstance, InstanceError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();

    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(InstanceError::MalformedHeader("duplicate header".into()));
            }
            header = Some(parse_header(line)?);
            continue;
        }
        let Some((n_vars, _)) = header else {
            return Err(InstanceError::MalformedHeader(
                "clause data before `p cnf` header".into(),
            ));
        };
        for tok in line.split_whitespace() {
            let v: i64 = tok
                .parse()
                .map_err(|_| InstanceError::InvalidLiteral(tok.to_string()))?;
            if v == 0 {
                let ci = clauses.len();
                check_clause(ci, &current, n_vars)?;
                clauses.push(Clause([current[0], current[1], current[2]]));
                current.clear();
            } else {
                let lit = Literal::from_dimacs(v)
                    .ok_or_else(|| InstanceError::InvalidLiteral(tok.to_string()))?;
                current.push(lit);
            }
        }
    }

    let Some((n_vars, declared)) = header else {
        return Err(InstanceError::MalformedHeader("missing `p cnf` header".into()));
    };
    if !current.is_empty() {
        let ci = clauses.len();
        check_clause(ci, &current, n_vars)?;
        clauses.push(Clause([current[0], current[1], current[2]]));
    }
    if clauses.len() != declared {
        return Err(InstanceError::ClauseCountMismatch {
            declared,
            found: clauses.len(),
        });
    }
    CnfInstance::new(n_vars, clauses)
}

fn parse_header(line: &str) -> Result<(usize, usize), InstanceError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
        return Err(InstanceError::MalformedHeader(line.to_string()));
    }
    let n: usize = parts[2]
        .parse()
        .map_err(|_| InstanceError::MalformedHeader(line.to_string()))?;
    let m: usize = parts[3]
        .parse()
        .map_err(|_| InstanceError::MalformedHeader(line.to_string()))?;
    if n == 0 || n > MAX_VARS {
        return Err(InstanceError::TooManyVariables(n));
    }
    if m == 0 {
        return Err(InstanceError::EmptyFormula);
    }
    Ok((n, m))
}

/// Uniformly random 3-SAT instance: each clause picks three distinct
/// variables and independent polarities.
pub fn random_instance<R: Rng + ?Sized>(
    n_vars: usize,
    n_clauses: usize,
    rng: &mut R,
) -> Result<CnfInstance, InstanceError> {
    if !(3..=MAX_VARS).contains(&n_vars) {
        return Err(InstanceError::TooManyVariables(n_vars));
    }
    let clauses = (0..n_clauses)
        .map(|_| {
            let mut vars = [0u32; 3];
            let mut k = 0;
            while k < 3 {
                let v = rng.random_range(1..=n_vars as u32);
                if !vars[..k].contains(&v) {
                    vars[k] = v;
                    k += 1;
                }
            }
            Clause(vars.map(|v| Literal::new(v, rng.random_bool(0.5))))
        })
        .collect();
    CnfInstance::new(n_vars, clauses)
}

/// Diagonal of the problem Hamiltonian: one violation count per basis state.
///
/// Built from a formula the length is `2^n`; restricted problems and
/// synthetic inputs may have any positive length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ViolationDiagonal {
    entries: Vec<u32>,
}

impl ViolationDiagonal {
    pub fn from_entries(entries: Vec<u32>) -> Result<Self, InstanceError> {
        if entries.is_empty() {
            return Err(InstanceError::EmptyDiagonal);
        }
        Ok(ViolationDiagonal { entries })
    }

    /// Clause-violation counts for every assignment of `inst`.
    pub fn from_instance(inst: &CnfInstance) -> Self {
        let mut entries = vec![0u32; inst.num_assignments()];
        for clause in inst.clauses() {
            let (mask, pattern) = clause.violation_pattern();
            for (a, e) in entries.iter_mut().enumerate() {
                if a & mask == pattern {
                    *e += 1;
                }
            }
        }
        ViolationDiagonal { entries }
    }

    /// One zero at `solution` (or none) and every other entry equal to one.
    /// This is the maximally degenerate spectrum: all non-solutions sit at
    /// the lowest possible nonzero energy.
    pub fn worst_case(n_vars: usize, solution: Option<usize>) -> Result<Self, InstanceError> {
        if n_vars == 0 || n_vars > MAX_VARS {
            return Err(InstanceError::TooManyVariables(n_vars));
        }
        let dim = 1usize << n_vars;
        let mut entries = vec![1u32; dim];
        if let Some(s) = solution {
            if s >= dim {
                return Err(InstanceError::IndexOutOfRange { index: s, dim });
            }
            entries[s] = 0;
        }
        Ok(ViolationDiagonal { entries })
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `log2(dim)` when the length is a power of two.
    pub fn n_vars(&self) -> Option<usize> {
        self.dim()
            .is_power_of_two()
            .then(|| self.dim().trailing_zeros() as usize)
    }

    pub fn min_entry(&self) -> u32 {
        self.entries.iter().copied().min().unwrap_or(0)
    }

    pub fn is_soluble(&self) -> bool {
        self.entries.contains(&0)
    }

    /// CSV with header `index,violations`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,violations\n");
        for (i, e) in self.entries.iter().enumerate() {
            let _ = writeln!(out, "{i},{e}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solubility {
    pub soluble: bool,
    pub solutions: Vec<usize>,
}

/// Ground truth by scanning the diagonal for zero entries.
pub fn brute_force_solubility(diag: &ViolationDiagonal) -> Solubility {
    let solutions: Vec<usize> = diag
        .entries()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e == 0)
        .map(|(i, _)| i)
        .collect();
    Solubility {
        soluble: !solutions.is_empty(),
        solutions,
    }
}
