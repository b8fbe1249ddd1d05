//! Spectra of arrowhead Hamiltonians: a fast secular-equation path and a
//! dense symmetric path used as an independent cross-check.

mod arrowhead;
mod dense;
mod sweep;

pub use arrowhead::{ArrowheadEigen, DEFLATION_TOL};
pub use dense::{dense_eigenvalues, eigen_dense, MAX_DENSE_DIM};
pub use sweep::{min_gap_on_segment, sweep, sweep_csv, GapMinimum, Segment, SweepAxis, SweepRow};

use thiserror::Error;

use crate::hamiltonian::ArrowheadMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("secular root {root} did not converge")]
    ConvergenceFailure { root: usize },
    #[error("dense solver limited to dimension {MAX_DENSE_DIM}, got {dim}")]
    DimensionTooLarge { dim: usize },
    #[error("dense eigensolver failed (info {info})")]
    DenseFailure { info: i32 },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

/// Ascending eigenvalues with the lowest gap and, optionally, the ground
/// eigenvector (unit norm, head component non-negative).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub ground_vector: Option<Vec<f64>>,
    pub gap01: f64,
}

impl Spectrum {
    pub(crate) fn from_sorted(eigenvalues: Vec<f64>, ground_vector: Option<Vec<f64>>) -> Self {
        let gap01 = match eigenvalues.as_slice() {
            [a, b, ..] => (b - a).max(0.0),
            _ => 0.0,
        };
        Spectrum {
            eigenvalues,
            ground_vector,
            gap01,
        }
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigenvalues (and optionally the ground vector) by the secular equation.
pub fn eigen_arrowhead(m: &ArrowheadMatrix, want_ground_vector: bool) -> Result<Spectrum, EigenError> {
    let e = ArrowheadEigen::new(m)?;
    let ground = want_ground_vector.then(|| e.ground_vector());
    Ok(Spectrum::from_sorted(e.eigenvalues(), ground))
}
