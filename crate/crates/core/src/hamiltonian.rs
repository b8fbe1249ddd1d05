//! Bordered ("arrowhead") Hamiltonians over a violation diagonal.
//!
//! The matrix has `N + 1` rows. Rows `0..N` are the body: one basis state per
//! assignment with energy `z/4 + s * violations`. Row `N` is the head state
//! with energy `-z/4`. The only off-diagonal entries couple the head to every
//! body state with the same value (the border), so the matrix is real
//! symmetric and never needs to be stored densely.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::format::g17;
use crate::instance::ViolationDiagonal;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HamiltonianError {
    #[error("unknown variant {0:?} (expected unscaled, z_scaled or x_scaled)")]
    UnknownVariant(String),
    #[error("subspace mask is empty")]
    EmptyMask,
    #[error("mask index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("mask indices must be strictly increasing")]
    UnsortedMask,
    #[error("parameter point ({x}, {z}) is not finite")]
    NonFinite { x: f64, z: f64 },
}

/// Which size scaling is applied to the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Body `z/4 + H_p`, border `x`.
    Unscaled,
    /// Body `z/4 + N H_p`, border `x`: constant gap size and location in `N`.
    ZScaled,
    /// Body `z/4 + H_p`, border `x / sqrt(N)`.
    XScaled,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Unscaled, Variant::ZScaled, Variant::XScaled];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Unscaled => "unscaled",
            Variant::ZScaled => "z_scaled",
            Variant::XScaled => "x_scaled",
        }
    }

    /// Multiplier on the violation counts for a body of dimension `n`.
    pub fn body_scale(self, n: usize) -> f64 {
        match self {
            Variant::ZScaled => n as f64,
            _ => 1.0,
        }
    }

    /// Multiplier on `x` giving the border value for a body of dimension `n`.
    pub fn border_scale(self, n: usize) -> f64 {
        match self {
            Variant::XScaled => 1.0 / (n as f64).sqrt(),
            _ => 1.0,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = HamiltonianError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "unscaled" => Ok(Variant::Unscaled),
            "z_scaled" | "zscaled" => Ok(Variant::ZScaled),
            "x_scaled" | "xscaled" => Ok(Variant::XScaled),
            _ => Err(HamiltonianError::UnknownVariant(s.to_string())),
        }
    }
}

/// A point `(x, z)` in the two-parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterPoint {
    pub x: f64,
    pub z: f64,
}

impl ParameterPoint {
    pub fn new(x: f64, z: f64) -> Result<Self, HamiltonianError> {
        if !(x.is_finite() && z.is_finite()) {
            return Err(HamiltonianError::NonFinite { x, z });
        }
        Ok(ParameterPoint { x, z })
    }

    pub fn lerp(self, other: ParameterPoint, t: f64) -> ParameterPoint {
        ParameterPoint {
            x: self.x + (other.x - self.x) * t,
            z: self.z + (other.z - self.z) * t,
        }
    }

    pub fn distance(self, other: ParameterPoint) -> f64 {
        (other.x - self.x).hypot(other.z - self.z)
    }
}

/// Symmetric arrowhead matrix with a uniform border.
///
/// Layout: `body` on the leading diagonal, `head` in the last diagonal slot,
/// `border` in every off-diagonal entry of the last row and column.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowheadMatrix {
    pub body: Vec<f64>,
    pub border: f64,
    pub head: f64,
}

impl ArrowheadMatrix {
    pub fn new(body: Vec<f64>, border: f64, head: f64) -> Self {
        ArrowheadMatrix { body, border, head }
    }

    /// Total dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.body.len() + 1
    }

    pub fn trace(&self) -> f64 {
        self.body.iter().sum::<f64>() + self.head
    }

    /// `H v` without materializing the matrix.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim());
        let n = self.body.len();
        let vh = v[n];
        let mut out: Vec<f64> = self
            .body
            .iter()
            .zip(v)
            .map(|(d, vi)| d * vi + self.border * vh)
            .collect();
        out.push(self.head * vh + self.border * v[..n].iter().sum::<f64>());
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.body.len();
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for (i, &d) in self.body.iter().enumerate() {
            m[(i, i)] = d;
            m[(i, n)] = self.border;
            m[(n, i)] = self.border;
        }
        m[(n, n)] = self.head;
        m
    }
}

/// The Hamiltonian at one parameter point, tagged with how it was built.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrowheadHamiltonian {
    pub matrix: ArrowheadMatrix,
    pub params: ParameterPoint,
    pub variant: Variant,
}

impl ArrowheadHamiltonian {
    pub fn build(diag: &ViolationDiagonal, p: ParameterPoint, variant: Variant) -> Self {
        let n = diag.dim();
        let scale = variant.body_scale(n);
        let shift = p.z / 4.0;
        let body = diag
            .entries()
            .iter()
            .map(|&e| shift + scale * e as f64)
            .collect();
        ArrowheadHamiltonian {
            matrix: ArrowheadMatrix {
                body,
                border: p.x * variant.border_scale(n),
                head: -shift,
            },
            params: p,
            variant,
        }
    }

    pub fn body_dim(&self) -> usize {
        self.matrix.body.len()
    }

    /// Dense matrix as CSV rows (no header), `%.17g` entries.
    pub fn dense_csv(&self) -> String {
        let m = self.matrix.to_dense();
        let mut out = String::new();
        for r in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|c| g17(m[(r, c)])).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn descriptor(&self) -> HamiltonianDescriptor {
        HamiltonianDescriptor {
            variant: self.variant,
            n: self.body_dim(),
            x: self.params.x,
            z: self.params.z,
        }
    }
}

/// `{variant, n, x, z}`: enough to rebuild the matrix from its diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianDescriptor {
    pub variant: Variant,
    pub n: usize,
    pub x: f64,
    pub z: f64,
}

/// Retained basis states of a restricted search space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceMask {
    selected: Vec<usize>,
}

impl SubspaceMask {
    pub fn new(selected: Vec<usize>) -> Result<Self, HamiltonianError> {
        if selected.is_empty() {
            return Err(HamiltonianError::EmptyMask);
        }
        if selected.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HamiltonianError::UnsortedMask);
        }
        Ok(SubspaceMask { selected })
    }

    /// Contiguous index range `lo..hi`.
    pub fn range(lo: usize, hi: usize) -> Result<Self, HamiltonianError> {
        Self::new((lo..hi).collect())
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// Lower and upper halves by position; the lower half gets the extra
    /// element when the length is odd.
    pub fn split(&self) -> (SubspaceMask, SubspaceMask) {
        let mid = self.selected.len().div_ceil(2);
        (
            SubspaceMask { selected: self.selected[..mid].to_vec() },
            SubspaceMask { selected: self.selected[mid..].to_vec() },
        )
    }
}

/// Keeps only the masked entries of `diag`, in mask order.
pub fn restrict(
    diag: &ViolationDiagonal,
    mask: &SubspaceMask,
) -> Result<ViolationDiagonal, HamiltonianError> {
    let dim = diag.dim();
    if let Some(&bad) = mask.selected.iter().find(|&&i| i >= dim) {
        return Err(HamiltonianError::IndexOutOfRange { index: bad, dim });
    }
    let entries = mask.selected.iter().map(|&i| diag.entries()[i]).collect();
    Ok(ViolationDiagonal::from_entries(entries).expect("mask is non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, z: f64) -> ParameterPoint {
        ParameterPoint::new(x, z).unwrap()
    }

    #[test]
    fn unscaled_start_point() {
        let d = ViolationDiagonal::worst_case(7, Some(127)).unwrap();
        let h = ArrowheadHamiltonian::build(&d, pt(0.0, 1.0), Variant::Unscaled);
        let m = &h.matrix;
        assert_eq!(m.body.len(), 128);
        assert_eq!(m.body.iter().filter(|&&b| b == 1.25).count(), 127);
        assert_eq!(m.body[127], 0.25);
        assert_eq!(m.head, -0.25);
        assert_eq!(m.border, 0.0);
        // head is the lowest diagonal entry, so it is the ground state
        assert!(m.body.iter().all(|&b| b > m.head));
    }

    #[test]
    fn unscaled_lower_edge() {
        let d = ViolationDiagonal::worst_case(7, Some(127)).unwrap();
        let h = ArrowheadHamiltonian::build(&d, pt(0.01, -1.0), Variant::Unscaled);
        assert_eq!(h.matrix.border, 0.01);
        assert_eq!(h.matrix.head, 0.25);
        assert_eq!(h.matrix.body.iter().filter(|&&b| b == 0.75).count(), 127);
        assert_eq!(h.matrix.body[127], -0.25);
    }

    #[test]
    fn z_scaled_band() {
        let d = ViolationDiagonal::worst_case(7, Some(127)).unwrap();
        let h = ArrowheadHamiltonian::build(&d, pt(0.0, -1.0), Variant::ZScaled);
        assert_eq!(h.matrix.body.iter().filter(|&&b| b == 127.75).count(), 127);
        assert_eq!(h.matrix.body[127], -0.25);
        assert_eq!(h.matrix.head, 0.25);
    }

    #[test]
    fn x_scaled_border() {
        let d = ViolationDiagonal::worst_case(4, Some(0)).unwrap();
        let h = ArrowheadHamiltonian::build(&d, pt(0.8, 0.5), Variant::XScaled);
        assert_eq!(h.matrix.border, 0.8 / 4.0);
        assert_eq!(h.matrix.head, -0.125);
        assert_eq!(h.matrix.body[1], 1.125);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("z-scaled".parse::<Variant>().unwrap(), Variant::ZScaled);
        assert_eq!("X_SCALED".parse::<Variant>().unwrap(), Variant::XScaled);
        assert!(matches!(
            "scaled".parse::<Variant>(),
            Err(HamiltonianError::UnknownVariant(_))
        ));
        assert!(ParameterPoint::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn dense_symmetric_and_apply_agrees() {
        let d = ViolationDiagonal::from_entries(vec![2, 0, 1, 3, 0]).unwrap();
        let h = ArrowheadHamiltonian::build(&d, pt(-0.3, 0.7), Variant::Unscaled);
        let m = h.matrix.to_dense();
        assert_eq!(m, m.transpose());
        let v: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let dense = &m * nalgebra::DVector::from_vec(v.clone());
        for (a, b) in h.matrix.apply(&v).iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((h.matrix.trace() - m.trace()).abs() < 1e-14);
    }

    #[test]
    fn origin_degeneracy_only_when_soluble() {
        let sol = ViolationDiagonal::worst_case(3, Some(5)).unwrap();
        let h = ArrowheadHamiltonian::build(&sol, pt(0.0, 0.0), Variant::Unscaled);
        assert_eq!(h.matrix.head, 0.0);
        assert!(h.matrix.body.contains(&0.0));
        let unsol = ViolationDiagonal::worst_case(3, None).unwrap();
        let h = ArrowheadHamiltonian::build(&unsol, pt(0.0, 0.0), Variant::Unscaled);
        assert!(h.matrix.body.iter().all(|&b| b >= 1.0));
    }

    #[test]
    fn restrict_examples() {
        let d = ViolationDiagonal::from_entries(vec![1, 1, 1, 0]).unwrap();
        let lo = restrict(&d, &SubspaceMask::range(0, 2).unwrap()).unwrap();
        assert_eq!(lo.entries(), &[1, 1]);
        assert!(!lo.is_soluble());
        let hi = restrict(&d, &SubspaceMask::range(2, 4).unwrap()).unwrap();
        assert_eq!(hi.entries(), &[1, 0]);
        assert!(hi.is_soluble());
        let wc = ViolationDiagonal::worst_case(3, Some(7)).unwrap();
        let upper = restrict(&wc, &SubspaceMask::range(4, 8).unwrap()).unwrap();
        assert_eq!(upper.entries(), &[1, 1, 1, 0]);

        assert_eq!(SubspaceMask::new(vec![]), Err(HamiltonianError::EmptyMask));
        assert_eq!(SubspaceMask::new(vec![2, 1]), Err(HamiltonianError::UnsortedMask));
        assert_eq!(
            restrict(&d, &SubspaceMask::new(vec![0, 4]).unwrap()),
            Err(HamiltonianError::IndexOutOfRange { index: 4, dim: 4 })
        );
    }

    #[test]
    fn build_commutes_with_restrict() {
        let d = ViolationDiagonal::from_entries(vec![3, 0, 2, 1, 1, 0, 2, 4]).unwrap();
        let mask = SubspaceMask::new(vec![1, 2, 5, 6]).unwrap();
        let p = pt(0.4, -0.6);
        let full = ArrowheadHamiltonian::build(&d, p, Variant::Unscaled);
        let restricted = ArrowheadHamiltonian::build(&restrict(&d, &mask).unwrap(), p, Variant::Unscaled);
        let picked: Vec<f64> = mask.selected().iter().map(|&i| full.matrix.body[i]).collect();
        assert_eq!(picked, restricted.matrix.body);
        assert_eq!(restricted.matrix.border, full.matrix.border);
        assert_eq!(restricted.matrix.head, full.matrix.head);
        // the scaled variants use the restricted dimension
        let zs = ArrowheadHamiltonian::build(&restrict(&d, &mask).unwrap(), p, Variant::ZScaled);
        assert_eq!(zs.matrix.body[2], -0.15);
    }

    #[test]
    fn split_halves() {
        let m = SubspaceMask::range(0, 8).unwrap();
        let (a, b) = m.split();
        assert_eq!(a.selected(), &[0, 1, 2, 3]);
        assert_eq!(b.selected(), &[4, 5, 6, 7]);
    }

    #[test]
    fn descriptor_fields() {
        let d = ViolationDiagonal::worst_case(2, Some(1)).unwrap();
        let h = ArrowheadHamiltonian::build(&d, pt(0.5, -1.0), Variant::ZScaled);
        let js = serde_json::to_string(&h.descriptor()).unwrap();
        assert_eq!(js, r#"{"variant":"z_scaled","n":4,"x":0.5,"z":-1.0}"#);
        assert_eq!(h.dense_csv().lines().count(), 5);
    }
}
