use super::{EigenError, Spectrum};
use crate::hamiltonian::ArrowheadMatrix;

/// Largest dimension accepted by the dense path.
pub const MAX_DENSE_DIM: usize = 4097;

fn check_dim(m: &ArrowheadMatrix) -> Result<usize, EigenError> {
    let dim = m.dim();
    if dim > MAX_DENSE_DIM {
        return Err(EigenError::DimensionTooLarge { dim });
    }
    Ok(dim)
}

/// Full symmetric diagonalization of the materialized matrix.
pub fn eigen_dense(m: &ArrowheadMatrix) -> Result<Spectrum, EigenError> {
    let dim = check_dim(m)?;
    let (eigenvalues, ground) = backend::solve(m, true)?;
    let mut ground = ground.expect("vectors requested");
    let pivot = if ground[dim - 1] != 0.0 {
        ground[dim - 1]
    } else {
        ground.iter().copied().find(|c| *c != 0.0).unwrap_or(1.0)
    };
    if pivot < 0.0 {
        ground.iter_mut().for_each(|c| *c = -*c);
    }
    Ok(Spectrum::from_sorted(eigenvalues, Some(ground)))
}

/// Ascending eigenvalues only, skipping the eigenvector work.
pub fn dense_eigenvalues(m: &ArrowheadMatrix) -> Result<Vec<f64>, EigenError> {
    check_dim(m)?;
    backend::solve(m, false).map(|(ev, _)| ev)
}

#[cfg(feature = "lapack")]
mod backend {
    use super::{ArrowheadMatrix, EigenError};

    /// `dsyevd` on the lower triangle; LAPACK returns eigenvalues ascending.
    pub(super) fn solve(m: &ArrowheadMatrix, vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>), EigenError> {
        let n = m.dim();
        let mut a = m.to_dense().as_slice().to_vec();
        let mut w = vec![0.0; n];
        let jobz = if vectors { b'V' } else { b'N' };
        let (ni, mut info) = (n as i32, 0);
        let mut work = [0.0];
        let mut iwork = [0i32];
        // SAFETY: workspace query; buffers sized for n x n input
        unsafe { lapack::dsyevd(jobz, b'L', ni, &mut a, ni, &mut w, &mut work, -1, &mut iwork, -1, &mut info) };
        if info != 0 {
            return Err(EigenError::DenseFailure { info });
        }
        let mut work = vec![0.0; work[0] as usize];
        let mut iwork = vec![0i32; iwork[0] as usize];
        let (lwork, liwork) = (work.len() as i32, iwork.len() as i32);
        // SAFETY: work and iwork sized from the query above
        unsafe { lapack::dsyevd(jobz, b'L', ni, &mut a, ni, &mut w, &mut work, lwork, &mut iwork, liwork, &mut info) };
        if info != 0 {
            return Err(EigenError::DenseFailure { info });
        }
        let ground = vectors.then(|| a[..n].to_vec());
        Ok((w, ground))
    }
}

#[cfg(not(feature = "lapack"))]
mod backend {
    use nalgebra::SymmetricEigen;

    use super::{ArrowheadMatrix, EigenError};

    pub(super) fn solve(m: &ArrowheadMatrix, vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>), EigenError> {
        let dense = m.to_dense();
        if !vectors {
            let mut ev: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            return Ok((ev, None));
        }
        let eig = SymmetricEigen::new(dense);
        let mut order: Vec<usize> = (0..m.dim()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let ev = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let ground = eig.eigenvectors.column(order[0]).iter().copied().collect();
        Ok((ev, Some(ground)))
    }
}
