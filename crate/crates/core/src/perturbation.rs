//! Second-order perturbation theory in the border coupling.
//!
//! At `x = 0` the head state `b` has energy `-z/4` and the lowest body level
//! `a` sits at `z/4 + s·min(H_p)`. Turning on the border shifts both by terms
//! quadratic in `x`; where the two parabolas meet is the predicted avoided
//! crossing.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::eigensolver::{min_gap_on_segment, ArrowheadEigen, EigenError, Segment};
use crate::hamiltonian::{ArrowheadHamiltonian, ParameterPoint, Variant};
use crate::instance::ViolationDiagonal;

/// Relative size below which an energy denominator counts as zero.
const DEGENERACY_TOL: f64 = 1e-12;

/// Default numeric search range `[0, X_RANGE]` for the gap minimum.
pub const X_RANGE: f64 = 1.0;
pub const X_SAMPLES: usize = 401;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbationError {
    #[error("unperturbed levels coincide at z = {z} (denominator {denominator:e})")]
    DegenerateUnperturbed { z: f64, denominator: f64 },
    #[error("z must be finite, got {0}")]
    NonFinite(f64),
    #[error("fit needs at least 5 samples over a positive range")]
    InvalidFit,
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPrediction {
    pub z: f64,
    pub variant: Variant,
    /// Coefficient of `x²` in the shift of the lowest body level.
    pub delta_a2_coeff: f64,
    /// Coefficient of `x²` in the shift of the head level.
    pub delta_b2_coeff: f64,
    pub e_a0: f64,
    pub e_b0: f64,
    /// Degeneracy of the lowest body level.
    pub multiplicity: usize,
    pub x_gap_predicted: Option<f64>,
}

impl GapPrediction {
    pub fn energy_a(&self, x: f64) -> f64 {
        self.e_a0 + self.delta_a2_coeff * x * x
    }

    pub fn energy_b(&self, x: f64) -> f64 {
        self.e_b0 + self.delta_b2_coeff * x * x
    }
}

/// Second-order shifts for an arbitrary diagonal.
///
/// Level `b` couples to every body state, so its shift is a sum over the
/// whole body. A lowest body level of multiplicity `k` has one combination
/// that couples to the head with strength `sqrt(k)` times the border; that
/// combination carries the shift reported for `a`.
pub fn second_order(diag: &ViolationDiagonal, z: f64, variant: Variant) -> Result<GapPrediction, PerturbationError> {
    if !z.is_finite() {
        return Err(PerturbationError::NonFinite(z));
    }
    let n = diag.dim();
    let s = variant.body_scale(n);
    let beta2 = variant.border_scale(n).powi(2);
    let e_b0 = -z / 4.0;
    let level = |c: u32| z / 4.0 + s * c as f64;
    let tol = DEGENERACY_TOL * (1.0 + s * diag.entries().iter().copied().max().unwrap_or(0) as f64 + z.abs());

    let mut delta_b = 0.0;
    for &c in diag.entries() {
        let denom = e_b0 - level(c);
        if denom.abs() <= tol {
            return Err(PerturbationError::DegenerateUnperturbed { z, denominator: denom });
        }
        delta_b += beta2 / denom;
    }

    let cmin = diag.min_entry();
    let k = diag.entries().iter().filter(|&&c| c == cmin).count();
    let e_a0 = level(cmin);
    let delta_a = k as f64 * beta2 / (e_a0 - e_b0);

    let slope = delta_a - delta_b;
    let x_gap_predicted = if slope != 0.0 {
        let x2 = (e_b0 - e_a0) / slope;
        (x2.is_finite() && x2 >= 0.0).then(|| x2.sqrt())
    } else {
        None
    };

    Ok(GapPrediction {
        z,
        variant,
        delta_a2_coeff: delta_a,
        delta_b2_coeff: delta_b,
        e_a0,
        e_b0,
        multiplicity: k,
        x_gap_predicted,
    })
}

/// Closed-form `(Δ_a, Δ_b)` coefficients for a worst-case diagonal (one zero,
/// every other entry one) with body dimension `n_body`.
pub fn worst_case_coefficients(n_body: usize, z: f64, variant: Variant) -> (f64, f64) {
    let s = variant.body_scale(n_body);
    let beta2 = variant.border_scale(n_body).powi(2);
    let n = n_body as f64;
    let a = 2.0 * beta2 / z;
    let b = -2.0 * (n - 1.0) * beta2 / (z + 2.0 * s) - 2.0 * beta2 / z;
    (a, b)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub z: f64,
    pub variant: Variant,
    pub delta_a2_coeff: f64,
    pub delta_b2_coeff: f64,
    pub x_gap_predicted: Option<f64>,
    pub x_gap_numeric: f64,
    pub gap_numeric: f64,
    pub abs_error: Option<f64>,
}

/// Prediction next to the numeric gap minimum on `x ∈ [0, X_RANGE]`.
pub fn prediction_error(diag: &ViolationDiagonal, z: f64, variant: Variant) -> Result<PredictionReport, PerturbationError> {
    prediction_error_on(diag, z, variant, X_RANGE, X_SAMPLES)
}

pub fn prediction_error_on(
    diag: &ViolationDiagonal,
    z: f64,
    variant: Variant,
    x_max: f64,
    samples: usize,
) -> Result<PredictionReport, PerturbationError> {
    let pred = second_order(diag, z, variant)?;
    let min = min_gap_on_segment(diag, variant, &Segment::along_x(z, 0.0, x_max), samples)?;
    let x_num = min.location.x.abs();
    Ok(PredictionReport {
        z,
        variant,
        delta_a2_coeff: pred.delta_a2_coeff,
        delta_b2_coeff: pred.delta_b2_coeff,
        x_gap_predicted: pred.x_gap_predicted,
        x_gap_numeric: x_num,
        gap_numeric: min.gap,
        abs_error: pred.x_gap_predicted.map(|p| (p - x_num).abs()),
    })
}

/// Estimated `x²` coefficient of one exact level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvatureFit {
    /// Least squares on `{1, x², x⁴}`.
    pub quartic_model: f64,
    /// Least squares on `{1, x²}`.
    pub quadratic_model: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelFit {
    pub a: CurvatureFit,
    pub b: CurvatureFit,
}

/// Fits the exact levels that continue from `a` and `b` over a symmetric
/// grid `|x| <= x_max`. Each level is taken as the coupled eigenvalue nearest
/// its unperturbed energy.
pub fn fit_levels(
    diag: &ViolationDiagonal,
    z: f64,
    variant: Variant,
    x_max: f64,
    samples: usize,
) -> Result<LevelFit, PerturbationError> {
    if samples < 5 || !(x_max > 0.0 && x_max.is_finite()) {
        return Err(PerturbationError::InvalidFit);
    }
    let pred = second_order(diag, z, variant)?;
    let nearest = |ev: &[f64], target: f64| {
        ev.iter()
            .copied()
            .min_by(|p, q| (p - target).abs().total_cmp(&(q - target).abs()))
            .expect("non-empty spectrum")
    };
    let xs: Vec<f64> = (0..samples)
        .map(|i| -x_max + 2.0 * x_max * i as f64 / (samples - 1) as f64)
        .collect();
    let mut ea = Vec::with_capacity(samples);
    let mut eb = Vec::with_capacity(samples);
    for &x in &xs {
        let h = ArrowheadHamiltonian::build(diag, ParameterPoint { x, z }, variant);
        let ev = ArrowheadEigen::new(&h.matrix)?.coupled_eigenvalues();
        ea.push(nearest(&ev, pred.e_a0));
        eb.push(nearest(&ev, pred.e_b0));
    }
    Ok(LevelFit {
        a: curvature(&xs, &ea),
        b: curvature(&xs, &eb),
    })
}

fn curvature(xs: &[f64], ys: &[f64]) -> CurvatureFit {
    CurvatureFit {
        quartic_model: lstsq_even(xs, ys, 2)[1],
        quadratic_model: lstsq_even(xs, ys, 1)[1],
    }
}

/// Least squares on `1, x², ..., x^(2 degree)`, in units of `x / max|x|`
/// to keep the normal matrix well scaled.
fn lstsq_even(xs: &[f64], ys: &[f64], degree: usize) -> Vec<f64> {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let cols = degree + 1;
    let a = DMatrix::from_fn(xs.len(), cols, |r, c| (xs[r] / scale).powi(2 * c as i32));
    let y = DVector::from_column_slice(ys);
    let coef = a
        .svd(true, true)
        .solve(&y, 1e-14)
        .expect("svd was computed with both factors");
    (0..cols).map(|c| coef[c] / scale.powi(2 * c as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wc(n: usize) -> ViolationDiagonal {
        ViolationDiagonal::worst_case(n, Some((1 << n) - 1)).unwrap()
    }

    #[test]
    fn worst_case_n7_coefficients() {
        let p = second_order(&wc(7), -1.0, Variant::Unscaled).unwrap();
        assert!((p.delta_a2_coeff + 2.0).abs() < 1e-12);
        assert!((p.delta_b2_coeff + 252.0).abs() < 1e-12);
        assert_eq!(p.e_a0, -0.25);
        assert_eq!(p.e_b0, 0.25);
        let x = p.x_gap_predicted.unwrap();
        assert!((x - (1.0f64 / 500.0).sqrt()).abs() < 1e-12);
        assert!(p.delta_a2_coeff < 0.0 && p.delta_b2_coeff < p.delta_a2_coeff);
    }

    #[test]
    fn closed_form_matches_sum() {
        for n in 2..=9 {
            for &z in &[-1.5, -1.0, -0.3, 0.7, 2.5] {
                for v in Variant::ALL {
                    let p = second_order(&wc(n), z, v).unwrap();
                    let (a, b) = worst_case_coefficients(1 << n, z, v);
                    assert!((p.delta_a2_coeff - a).abs() <= 1e-12 * a.abs().max(1.0), "{n} {z} {v}");
                    assert!((p.delta_b2_coeff - b).abs() <= 1e-12 * b.abs().max(1.0), "{n} {z} {v}");
                }
            }
        }
    }

    #[test]
    fn z_scaled_has_no_crossing() {
        let p = second_order(&wc(7), -1.0, Variant::ZScaled).unwrap();
        assert!((p.delta_a2_coeff + 2.0).abs() < 1e-12);
        assert!((p.delta_b2_coeff - (2.0 - 127.0 / 127.5)).abs() < 1e-12);
        assert_eq!(p.x_gap_predicted, None);
    }

    #[test]
    fn degenerate_denominators_rejected() {
        assert!(matches!(
            second_order(&wc(3), 0.0, Variant::Unscaled),
            Err(PerturbationError::DegenerateUnperturbed { .. })
        ));
        assert!(matches!(
            second_order(&wc(3), -2.0, Variant::Unscaled),
            Err(PerturbationError::DegenerateUnperturbed { .. })
        ));
        assert!(second_order(&wc(3), f64::NAN, Variant::Unscaled).is_err());
    }

    #[test]
    fn multi_solution_uses_group_coupling() {
        let d = ViolationDiagonal::from_entries(vec![0, 1, 0, 2, 1, 0, 1, 1]).unwrap();
        let p = second_order(&d, -1.0, Variant::Unscaled).unwrap();
        assert_eq!(p.multiplicity, 3);
        assert!((p.delta_a2_coeff + 6.0).abs() < 1e-12);
        // exact curvature of the coupled ground level
        let fit = fit_levels(&d, -1.0, Variant::Unscaled, 0.002, 41).unwrap();
        assert!((fit.a.quartic_model - p.delta_a2_coeff).abs() < 1e-3 * 6.0);
        assert!((fit.b.quartic_model - p.delta_b2_coeff).abs() < 1e-3 * p.delta_b2_coeff.abs());
    }

    #[test]
    fn residual_is_fourth_order() {
        for n in [3, 5, 7] {
            let d = wc(n);
            let p = second_order(&d, -1.0, Variant::Unscaled).unwrap();
            let residuals = |x: f64| {
                let h = ArrowheadHamiltonian::build(&d, ParameterPoint { x, z: -1.0 }, Variant::Unscaled);
                let ev = ArrowheadEigen::new(&h.matrix).unwrap().coupled_eigenvalues();
                ((ev[0] - p.energy_a(x)).abs(), (ev[1] - p.energy_b(x)).abs())
            };
            let (ra1, rb1) = residuals(0.01 / (1 << n) as f64 * 16.0);
            let (ra2, rb2) = residuals(0.005 / (1 << n) as f64 * 16.0);
            for ratio in [ra1 / ra2, rb1 / rb2] {
                assert!((12.0..20.0).contains(&ratio), "n={n} ratio {ratio}");
            }
        }
    }

    #[test]
    fn unscaled_delta_b_grows_linearly() {
        let pts: Vec<(f64, f64)> = (3..=10)
            .map(|n| ((1 << n) as f64, second_order(&wc(n), -1.0, Variant::Unscaled).unwrap().delta_b2_coeff))
            .collect();
        for w in pts.windows(2) {
            let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            assert!((slope + 2.0).abs() < 1e-9, "{slope}");
        }
    }

    #[test]
    fn z_scaled_delta_b_approaches_one() {
        let mut prev = f64::INFINITY;
        for n in 3..=9 {
            let b = second_order(&wc(n), -1.0, Variant::ZScaled).unwrap().delta_b2_coeff;
            assert!(b > 1.0 && b < prev, "n={n} b={b}");
            prev = b;
        }
        assert!(prev - 1.0 < 2e-3);
    }

    #[test]
    fn fit_recovers_taylor_coefficients() {
        let fit = fit_levels(&wc(7), -1.0, Variant::Unscaled, 0.01, 201).unwrap();
        assert!((fit.a.quartic_model + 2.0).abs() < 0.02 * 2.0, "{fit:?}");
        assert!((fit.b.quartic_model + 252.0).abs() < 0.02 * 252.0, "{fit:?}");
        // the quadratic-only model absorbs the x^4 term into the curvature
        assert!(fit.b.quadratic_model > -245.0);
    }

    #[test]
    fn report_for_n5_is_finite() {
        let r = prediction_error(&wc(5), -1.0, Variant::Unscaled).unwrap();
        assert!(r.abs_error.unwrap().is_finite());
        assert!(r.x_gap_numeric > 0.0);
    }

    #[test]
    fn z_scaled_report_minimum_at_origin() {
        let r = prediction_error(&wc(7), -1.0, Variant::ZScaled).unwrap();
        assert_eq!(r.x_gap_predicted, None);
        assert_eq!(r.abs_error, None);
        assert!(r.x_gap_numeric <= 0.01);
        assert!((r.gap_numeric - 0.5).abs() < 0.05);
    }
}
