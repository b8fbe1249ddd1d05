//! Secular-equation solver for symmetric arrowhead matrices with a uniform
//! border.
//!
//! Body entries that agree to within `1e-13` of the matrix scale are grouped.
//! A group of `k` equal entries `d` contributes `k - 1` exact eigenvalues `d`
//! (vectors orthogonal to the group's uniform vector never feel the border)
//! and one pole of weight `k` in the reduced problem
//!
//! ```text
//! f(λ) = (head - λ) - b² Σ_j k_j / (d_j - λ) = 0
//! ```
//!
//! whose `M + 1` roots interlace the `M` distinct poles. Each root is found by
//! bisection in coordinates shifted to its nearest pole, so `d_j - λ` keeps
//! full relative precision even when the root hugs a pole. That matters for
//! the eigenvectors, whose components are `b √k_j / (λ - d_j)`.
//!
//! The span of the head plus the group-uniform vectors is invariant under
//! every Hamiltonian with the same grouping; [`ArrowheadEigen::coupled_gap`]
//! reports the gap inside that sector.

use num_complex::Complex64;

use super::EigenError;
use crate::hamiltonian::ArrowheadMatrix;

/// Relative tolerance (to the matrix scale) below which body entries merge.
pub const DEFLATION_TOL: f64 = 1e-13;

const MAX_BISECTIONS: usize = 4000;

#[derive(Debug, Clone)]
struct PoleGroup {
    value: f64,
    members: Vec<usize>,
}

/// A root of the reduced problem stored as `origin + offset`, where `origin`
/// is a pole value (or the head when decoupled).
#[derive(Debug, Clone, Copy)]
struct Root {
    origin: f64,
    offset: f64,
}

impl Root {
    fn value(self) -> f64 {
        self.origin + self.offset
    }
}

/// Full eigendecomposition of an arrowhead matrix, held in deflated form.
#[derive(Debug, Clone)]
pub struct ArrowheadEigen {
    groups: Vec<PoleGroup>,
    border: f64,
    body_dim: usize,
    roots: Vec<Root>,
    /// Decoupled case: `roots[k]` belongs to group `order[k]`, or to the head
    /// when `order[k] == groups.len()`.
    decoupled_order: Option<Vec<usize>>,
}

impl ArrowheadEigen {
    pub fn new(m: &ArrowheadMatrix) -> Result<Self, EigenError> {
        let body_dim = m.body.len();
        let groups = group_poles(&m.body, matrix_scale(m));
        let scale = matrix_scale(m);
        let coupling_norm = m.border.abs() * (body_dim as f64).sqrt();

        if coupling_norm <= f64::EPSILON * f64::EPSILON * scale || m.border * m.border == 0.0 {
            return Ok(Self::decoupled(groups, m.head, body_dim));
        }

        let b2 = m.border * m.border;
        let poles: Vec<f64> = groups.iter().map(|g| g.value).collect();
        let weights: Vec<f64> = groups.iter().map(|g| g.members.len() as f64).collect();
        let mcount = poles.len();

        let lo_bound = poles[0].min(m.head) - 2.0 * coupling_norm - f64::MIN_POSITIVE;
        let hi_bound = poles[mcount - 1].max(m.head) + 2.0 * coupling_norm + f64::MIN_POSITIVE;

        let mut roots = Vec::with_capacity(mcount + 1);
        for k in 0..=mcount {
            let (origin, lo, hi) = if k == 0 {
                (poles[0], lo_bound - poles[0], 0.0)
            } else if k == mcount {
                (poles[mcount - 1], 0.0, hi_bound - poles[mcount - 1])
            } else {
                let left = poles[k - 1];
                let width = poles[k] - left;
                let mid = 0.5 * width;
                if secular(m.head, left, &poles, &weights, b2, mid) > 0.0 {
                    // root in the right half; measure from the right pole
                    (poles[k], mid - width, 0.0)
                } else {
                    (left, 0.0, mid)
                }
            };
            let offset = solve_bracket(m.head, origin, &poles, &weights, b2, lo, hi)
                .ok_or(EigenError::ConvergenceFailure { root: k })?;
            roots.push(Root { origin, offset });
        }

        Ok(ArrowheadEigen {
            groups,
            border: m.border,
            body_dim,
            roots,
            decoupled_order: None,
        })
    }

    fn decoupled(groups: Vec<PoleGroup>, head: f64, body_dim: usize) -> Self {
        let mut order: Vec<usize> = (0..=groups.len()).collect();
        let val = |i: usize| if i == groups.len() { head } else { groups[i].value };
        // head first on ties, then by pole position
        order.sort_by(|&a, &b| {
            val(a)
                .total_cmp(&val(b))
                .then_with(|| (b == groups.len()).cmp(&(a == groups.len())))
                .then(a.cmp(&b))
        });
        let roots = order
            .iter()
            .map(|&i| Root { origin: val(i), offset: 0.0 })
            .collect();
        ArrowheadEigen {
            groups,
            border: 0.0,
            body_dim,
            roots,
            decoupled_order: Some(order),
        }
    }

    pub fn dim(&self) -> usize {
        self.body_dim + 1
    }

    /// Number of distinct body values after deflation.
    pub fn num_poles(&self) -> usize {
        self.groups.len()
    }

    /// Sorted distinct body values.
    pub fn poles(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.value).collect()
    }

    /// Eigenvalues of the coupled sector, ascending.
    pub fn coupled_eigenvalues(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.value()).collect()
    }

    /// All `N + 1` eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev = self.coupled_eigenvalues();
        for g in &self.groups {
            ev.extend(std::iter::repeat_n(g.value, g.members.len() - 1));
        }
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn ground_energy(&self) -> f64 {
        self.roots[0].value()
    }

    /// Gap between the two lowest eigenvalues of the coupled sector.
    pub fn coupled_gap(&self) -> f64 {
        self.roots[1].value() - self.roots[0].value()
    }

    /// Unit eigenvector of coupled root `k` in the reduced basis
    /// (group-uniform vectors in pole order, then the head).
    fn reduced_vector(&self, k: usize) -> Vec<f64> {
        let m = self.groups.len();
        let mut w = vec![0.0; m + 1];
        match &self.decoupled_order {
            Some(order) => w[order[k]] = 1.0,
            None => {
                let root = self.roots[k];
                for (j, g) in self.groups.iter().enumerate() {
                    let diff = (g.value - root.origin) - root.offset;
                    // body row: d v_j + b v_head = λ v_j
                    w[j] = -self.border * (g.members.len() as f64).sqrt() / diff;
                }
                w[m] = 1.0;
                let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                w.iter_mut().for_each(|v| *v /= norm);
            }
        }
        w
    }

    fn expand(&self, w: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        for (g, &wj) in self.groups.iter().zip(w) {
            let c = wj / (g.members.len() as f64).sqrt();
            for &i in &g.members {
                v[i] = c;
            }
        }
        v[self.body_dim] = w[self.groups.len()];
        v
    }

    /// Ground eigenvector in the full basis with a non-negative head
    /// component. In the decoupled case with a degenerate body group the
    /// group-uniform vector is returned.
    pub fn ground_vector(&self) -> Vec<f64> {
        self.eigenvector(0)
    }

    /// Eigenvector of coupled root `k` in the full basis.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        let mut v = self.expand(&self.reduced_vector(k));
        let head = v[self.body_dim];
        let flip = if head != 0.0 {
            head < 0.0
        } else {
            v.iter().find(|c| **c != 0.0).is_some_and(|c| *c < 0.0)
        };
        if flip {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        v
    }

    /// Applies `exp(-i H dt)` to `psi` in place.
    ///
    /// The state is split into its coupled-sector coordinates and the
    /// remainder inside each group; the remainder only picks up the group's
    /// phase, the coupled part is propagated in the reduced eigenbasis.
    pub fn propagate(&self, psi: &mut [Complex64], dt: f64) {
        assert_eq!(psi.len(), self.dim());
        let m = self.groups.len();
        let mut reduced = vec![Complex64::new(0.0, 0.0); m + 1];
        for (j, g) in self.groups.iter().enumerate() {
            let sqrt_k = (g.members.len() as f64).sqrt();
            let mean = g.members.iter().map(|&i| psi[i]).sum::<Complex64>() / g.members.len() as f64;
            reduced[j] = mean * sqrt_k;
            let phase = Complex64::from_polar(1.0, -g.value * dt);
            for &i in &g.members {
                psi[i] = (psi[i] - mean) * phase;
            }
        }
        reduced[m] = psi[self.body_dim];

        let mut out = vec![Complex64::new(0.0, 0.0); m + 1];
        for (k, root) in self.roots.iter().enumerate() {
            let w = self.reduced_vector(k);
            let amp: Complex64 = w.iter().zip(&reduced).map(|(wi, r)| r * wi).sum();
            let amp = amp * Complex64::from_polar(1.0, -root.value() * dt);
            for (o, wi) in out.iter_mut().zip(&w) {
                *o += amp * wi;
            }
        }

        for (g, &o) in self.groups.iter().zip(&out) {
            let share = o / (g.members.len() as f64).sqrt();
            for &i in &g.members {
                psi[i] += share;
            }
        }
        psi[self.body_dim] = out[m];
    }
}

fn matrix_scale(m: &ArrowheadMatrix) -> f64 {
    let diag = m.body.iter().fold(m.head.abs(), |acc, d| acc.max(d.abs()));
    diag.max(m.border.abs() * (m.body.len() as f64).sqrt())
}

fn group_poles(body: &[f64], scale: f64) -> Vec<PoleGroup> {
    let tol = DEFLATION_TOL * scale;
    let mut idx: Vec<usize> = (0..body.len()).collect();
    idx.sort_by(|&a, &b| body[a].total_cmp(&body[b]).then(a.cmp(&b)));
    let mut groups: Vec<PoleGroup> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some(g) if body[i] - g.value <= tol => g.members.push(i),
            _ => groups.push(PoleGroup { value: body[i], members: vec![i] }),
        }
    }
    for g in &mut groups {
        g.members.sort_unstable();
    }
    groups
}

/// Secular function at `origin + offset`, with every difference formed
/// relative to `origin`.
fn secular(head: f64, origin: f64, poles: &[f64], weights: &[f64], b2: f64, offset: f64) -> f64 {
    let sum: f64 = poles
        .iter()
        .zip(weights)
        .map(|(&d, &k)| k / ((d - origin) - offset))
        .sum();
    (head - origin) - offset - b2 * sum
}

fn secular_slope(origin: f64, poles: &[f64], weights: &[f64], b2: f64, offset: f64) -> f64 {
    let sum: f64 = poles
        .iter()
        .zip(weights)
        .map(|(&d, &k)| {
            let e = (d - origin) - offset;
            k / (e * e)
        })
        .sum();
    -1.0 - b2 * sum
}

/// Root of the (strictly decreasing) secular function on `(lo, hi)`.
fn solve_bracket(
    head: f64,
    origin: f64,
    poles: &[f64],
    weights: &[f64],
    b2: f64,
    mut lo: f64,
    mut hi: f64,
) -> Option<f64> {
    let f = |t: f64| secular(head, origin, poles, weights, b2, t);
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            let mut t = mid;
            let fv = f(t);
            let slope = secular_slope(origin, poles, weights, b2, t);
            let newton = t - fv / slope;
            if newton > lo && newton < hi && newton.is_finite() {
                t = newton;
            }
            return Some(t);
        }
        let fv = f(mid);
        if fv.is_nan() {
            return None;
        }
        if fv > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}
