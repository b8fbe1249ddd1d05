use thiserror::Error;

use crate::adiabatic::AdiabaticError;
use crate::eigensolver::EigenError;
use crate::hamiltonian::HamiltonianError;
use crate::holonomy::HolonomyError;
use crate::instance::InstanceError;
use crate::perturbation::PerturbationError;
use crate::search::SearchError;

/// Any failure from the library, for callers that do not care which stage
/// raised it.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Holonomy(#[from] HolonomyError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
    #[error(transparent)]
    Adiabatic(#[from] AdiabaticError),
    #[error(transparent)]
    Search(#[from] SearchError),
}
