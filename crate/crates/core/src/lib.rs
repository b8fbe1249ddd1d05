//! Geometric-phase computation on bordered Hamiltonians.
//!
//! A 3-SAT instance becomes a diagonal of clause-violation counts. Bordering
//! that diagonal with one extra state and two parameters `(x, z)` gives a real
//! symmetric arrowhead Hamiltonian whose two lowest levels touch at the origin
//! exactly when the instance is satisfiable. Carrying the ground state around
//! a loop that encloses the origin then flips its sign (Berry phase `π`) for
//! satisfiable instances and leaves it unchanged otherwise.
//!
//! Modules, bottom-up:
//! - [`instance`]: DIMACS input and the violation diagonal.
//! - [`hamiltonian`]: the parameterized arrowhead matrices and subspace restriction.
//! - [`eigensolver`]: secular-equation spectra, dense cross-check, sweeps.
//! - [`holonomy`]: sign transport around a loop, solubility from the phase.
//! - [`perturbation`]: second-order level shifts and predicted gap location.
//! - [`adiabatic`]: explicit time evolution along the loop.
//! - [`search`]: bisection over restricted subspaces to recover an assignment.

pub mod acceptance;
pub mod adiabatic;
pub mod eigensolver;
pub mod format;
pub mod hamiltonian;
pub mod holonomy;
pub mod instance;
pub mod perturbation;
pub mod search;

mod error;

pub use error::Error;

pub use eigensolver::{eigen_arrowhead, eigen_dense, ArrowheadEigen, Spectrum};
pub use hamiltonian::{restrict, ArrowheadHamiltonian, ArrowheadMatrix, ParameterPoint, SubspaceMask, Variant};
pub use holonomy::{berry_phase, solubility, BerryResult, LoopPath};
pub use instance::{brute_force_solubility, parse_dimacs, CnfInstance, ViolationDiagonal};

/// Maps `f` over `0..n`, in parallel when the `parallel` feature is on.
/// Output order always follows the index.
pub(crate) fn par_map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
