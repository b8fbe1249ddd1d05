//! Bisection search for a satisfying assignment driven by a solubility
//! oracle.
//!
//! The candidate set starts as every basis state. Each round keeps the lower
//! half if the oracle reports it soluble and the upper half otherwise, so a
//! soluble `n`-variable problem is pinned down in `n` half-space queries.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::hamiltonian::{restrict, HamiltonianError, SubspaceMask, Variant};
use crate::holonomy::{solubility_on, HolonomyError, LoopPath, Phase};
use crate::instance::ViolationDiagonal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("oracle failed on a {size}-state subspace: {source}")]
    OracleFailure {
        size: usize,
        #[source]
        source: HolonomyError,
    },
    #[error("search ended on state {index} with {violations} violated clauses")]
    InternalContradiction { index: usize, violations: u32 },
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

/// Decides whether a diagonal has a zero entry.
pub trait SolubilityOracle {
    fn name(&self) -> &'static str;
    fn is_soluble(&self, diag: &ViolationDiagonal, variant: Variant) -> Result<bool, HolonomyError>;
}

/// Geometric-phase test around a loop.
#[derive(Debug, Clone)]
pub struct BerryOracle {
    pub path: LoopPath,
}

impl Default for BerryOracle {
    fn default() -> Self {
        BerryOracle { path: LoopPath::default_rectangle() }
    }
}

impl SolubilityOracle for BerryOracle {
    fn name(&self) -> &'static str {
        "berry"
    }

    fn is_soluble(&self, diag: &ViolationDiagonal, variant: Variant) -> Result<bool, HolonomyError> {
        solubility_on(diag, variant, &self.path)
    }
}

/// Scans the diagonal directly.
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForceOracle;

impl SolubilityOracle for BruteForceOracle {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn is_soluble(&self, diag: &ViolationDiagonal, _variant: Variant) -> Result<bool, HolonomyError> {
        Ok(diag.is_soluble())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchIteration {
    /// Candidates before this round.
    pub mask_size: usize,
    /// Outcome of the lower-half query.
    pub phase_outcome: Phase,
    pub chosen_half: Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchOutcome {
    Assignment(usize),
    Insoluble,
}

impl Serialize for SearchOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SearchOutcome::Assignment(i) => s.serialize_u64(*i as u64),
            SearchOutcome::Insoluble => s.serialize_str("insoluble"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchTrace {
    pub oracle: &'static str,
    pub variant: Variant,
    pub iterations: Vec<SearchIteration>,
    pub result: SearchOutcome,
    /// All oracle queries, the initial full-space check included.
    pub oracle_calls: usize,
    /// Queries on half spaces only.
    pub half_space_calls: usize,
}

fn phase_of(soluble: bool) -> Phase {
    if soluble {
        Phase::Pi
    } else {
        Phase::Zero
    }
}

pub fn solve(diag: &ViolationDiagonal, variant: Variant, oracle: &dyn SolubilityOracle) -> Result<SearchTrace, SearchError> {
    let ask = |d: &ViolationDiagonal| {
        oracle
            .is_soluble(d, variant)
            .map_err(|source| SearchError::OracleFailure { size: d.dim(), source })
    };
    let mut trace = SearchTrace {
        oracle: oracle.name(),
        variant,
        iterations: Vec::new(),
        result: SearchOutcome::Insoluble,
        oracle_calls: 1,
        half_space_calls: 0,
    };
    if !ask(diag)? {
        return Ok(trace);
    }

    let mut mask = SubspaceMask::range(0, diag.dim())?;
    while mask.len() > 1 {
        let (lower, upper) = mask.split();
        let soluble = ask(&restrict(diag, &lower)?)?;
        trace.oracle_calls += 1;
        trace.half_space_calls += 1;
        let chosen_half = if soluble { Half::Lower } else { Half::Upper };
        trace.iterations.push(SearchIteration {
            mask_size: mask.len(),
            phase_outcome: phase_of(soluble),
            chosen_half,
        });
        mask = if soluble { lower } else { upper };
    }

    let index = mask.selected()[0];
    let violations = diag.entries()[index];
    if violations != 0 {
        return Err(SearchError::InternalContradiction { index, violations });
    }
    trace.result = SearchOutcome::Assignment(index);
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{random_instance, CnfInstance};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn worst_case_n3_sol5() {
        let d = ViolationDiagonal::worst_case(3, Some(5)).unwrap();
        let t = solve(&d, Variant::Unscaled, &BruteForceOracle).unwrap();
        assert_eq!(t.result, SearchOutcome::Assignment(5));
        let halves: Vec<Half> = t.iterations.iter().map(|i| i.chosen_half).collect();
        assert_eq!(halves, vec![Half::Upper, Half::Lower, Half::Upper]);
        let sizes: Vec<usize> = t.iterations.iter().map(|i| i.mask_size).collect();
        assert_eq!(sizes, vec![8, 4, 2]);
        assert_eq!(t.half_space_calls, 3);
        assert_eq!(t.oracle_calls, 4);
    }

    #[test]
    fn insoluble_stops_after_one_call() {
        let d = ViolationDiagonal::worst_case(3, None).unwrap();
        let t = solve(&d, Variant::Unscaled, &BruteForceOracle).unwrap();
        assert_eq!(t.result, SearchOutcome::Insoluble);
        assert_eq!(t.oracle_calls, 1);
        assert!(t.iterations.is_empty());
    }

    #[test]
    fn berry_matches_brute_on_worst_cases() {
        for sol in [0, 3, 5, 7] {
            let d = ViolationDiagonal::worst_case(3, Some(sol)).unwrap();
            let a = solve(&d, Variant::Unscaled, &BerryOracle::default()).unwrap();
            let b = solve(&d, Variant::Unscaled, &BruteForceOracle).unwrap();
            assert_eq!(a.iterations, b.iterations);
            assert_eq!(a.result, SearchOutcome::Assignment(sol));
        }
    }

    #[test]
    fn multi_solution_prefers_lowest() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let inst: CnfInstance = random_instance(5, 8, &mut rng).unwrap();
            let d = ViolationDiagonal::from_instance(&inst);
            let t = solve(&d, Variant::Unscaled, &BruteForceOracle).unwrap();
            match d.entries().iter().position(|&c| c == 0) {
                Some(first) => {
                    assert_eq!(t.result, SearchOutcome::Assignment(first));
                    assert_eq!(t.half_space_calls, 5);
                }
                None => assert_eq!(t.result, SearchOutcome::Insoluble),
            }
        }
    }

    struct Liar;

    impl SolubilityOracle for Liar {
        fn name(&self) -> &'static str {
            "liar"
        }

        fn is_soluble(&self, _: &ViolationDiagonal, _: Variant) -> Result<bool, HolonomyError> {
            Ok(true)
        }
    }

    #[test]
    fn faulty_oracle_is_caught() {
        let d = ViolationDiagonal::worst_case(3, Some(6)).unwrap();
        assert_eq!(
            solve(&d, Variant::Unscaled, &Liar),
            Err(SearchError::InternalContradiction { index: 0, violations: 1 })
        );
    }

    #[test]
    fn trace_json_shape() {
        let d = ViolationDiagonal::worst_case(2, Some(2)).unwrap();
        let t = solve(&d, Variant::Unscaled, &BruteForceOracle).unwrap();
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["result"], 2);
        assert_eq!(v["iterations"][0]["phase_outcome"], "0");
        assert_eq!(v["iterations"][0]["chosen_half"], "upper");
        let d = ViolationDiagonal::worst_case(2, None).unwrap();
        let v = serde_json::to_value(solve(&d, Variant::Unscaled, &BruteForceOracle).unwrap()).unwrap();
        assert_eq!(v["result"], "insoluble");
    }
}
