use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ArrowheadEigen, EigenError};
use crate::format::csv_row;
use crate::hamiltonian::{ArrowheadHamiltonian, ParameterPoint, Variant};
use crate::instance::ViolationDiagonal;
use crate::par_map;

/// Refinement tolerance in the swept coordinate.
pub const GOLDEN_TOL: f64 = 1e-6;
const GOLDEN_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    X,
    Z,
}

/// A straight line in parameter space along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub axis: SweepAxis,
    /// Value of the coordinate that is held fixed.
    pub fixed: f64,
    pub from: f64,
    pub to: f64,
}

impl Segment {
    pub fn along_x(z: f64, from: f64, to: f64) -> Self {
        Segment { axis: SweepAxis::X, fixed: z, from, to }
    }

    pub fn along_z(x: f64, from: f64, to: f64) -> Self {
        Segment { axis: SweepAxis::Z, fixed: x, from, to }
    }

    pub fn point(&self, swept: f64) -> ParameterPoint {
        match self.axis {
            SweepAxis::X => ParameterPoint { x: swept, z: self.fixed },
            SweepAxis::Z => ParameterPoint { x: self.fixed, z: swept },
        }
    }

    fn sample(&self, i: usize, samples: usize) -> f64 {
        if i + 1 == samples {
            self.to
        } else {
            self.from + (self.to - self.from) * i as f64 / (samples - 1) as f64
        }
    }

    fn validate(&self, samples: usize, min_samples: usize) -> Result<(), EigenError> {
        if samples < min_samples {
            return Err(EigenError::InvalidSweep(format!(
                "need at least {min_samples} samples, got {samples}"
            )));
        }
        if !(self.from.is_finite() && self.to.is_finite() && self.fixed.is_finite()) {
            return Err(EigenError::InvalidSweep("non-finite range".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub point: ParameterPoint,
    pub eigenvalues: Vec<f64>,
    pub gap01: f64,
}

fn solve_at(diag: &ViolationDiagonal, variant: Variant, p: ParameterPoint) -> Result<ArrowheadEigen, EigenError> {
    ArrowheadEigen::new(&ArrowheadHamiltonian::build(diag, p, variant).matrix)
}

/// Full spectrum at `samples` evenly spaced points (endpoints included).
/// Rows are in sample order regardless of how the solves are scheduled.
pub fn sweep(
    diag: &ViolationDiagonal,
    variant: Variant,
    seg: &Segment,
    samples: usize,
) -> Result<Vec<SweepRow>, EigenError> {
    seg.validate(samples, 2)?;
    par_map(samples, |i| {
        let p = seg.point(seg.sample(i, samples));
        let ev = solve_at(diag, variant, p)?.eigenvalues();
        let gap01 = ev[1] - ev[0];
        Ok(SweepRow { point: p, eigenvalues: ev, gap01 })
    })
    .into_iter()
    .collect()
}

/// CSV `x,z,e0,e1,...,gap01`. `levels` keeps only the lowest levels.
pub fn sweep_csv(rows: &[SweepRow], levels: Option<usize>) -> String {
    let total = rows.first().map_or(0, |r| r.eigenvalues.len());
    let k = levels.map_or(total, |l| l.min(total));
    let mut out = String::from("x,z");
    for i in 0..k {
        let _ = write!(out, ",e{i}");
    }
    out.push_str(",gap01\n");
    for r in rows {
        let mut vals = vec![r.point.x, r.point.z];
        vals.extend_from_slice(&r.eigenvalues[..k]);
        vals.push(r.gap01);
        out.push_str(&csv_row(&vals));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapMinimum {
    pub location: ParameterPoint,
    pub gap: f64,
}

/// Smallest `e1 - e0` along a segment: coarse sampling, then golden-section
/// refinement between the neighbours of the best sample.
pub fn min_gap_on_segment(
    diag: &ViolationDiagonal,
    variant: Variant,
    seg: &Segment,
    samples: usize,
) -> Result<GapMinimum, EigenError> {
    seg.validate(samples, 3)?;
    let gap = |t: f64| -> Result<f64, EigenError> {
        let ev = solve_at(diag, variant, seg.point(t))?.eigenvalues();
        Ok(ev[1] - ev[0])
    };
    let coarse: Vec<f64> = par_map(samples, |i| gap(seg.sample(i, samples)))
        .into_iter()
        .collect::<Result<_, _>>()?;
    let best = coarse
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("at least three samples");

    let mut a = seg.sample(best.saturating_sub(1), samples);
    let mut b = seg.sample((best + 1).min(samples - 1), samples);
    if a > b {
        std::mem::swap(&mut a, &mut b);
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = gap(c)?;
    let mut fd = gap(d)?;
    let mut iter = 0;
    while (b - a).abs() > GOLDEN_TOL {
        iter += 1;
        if iter > GOLDEN_MAX_ITER {
            return Err(EigenError::ConvergenceFailure { root: 0 });
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = gap(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = gap(d)?;
        }
    }
    let t = 0.5 * (a + b);
    let ft = gap(t)?;
    let (t, g) = [(t, ft), (seg.sample(best, samples), coarse[best])]
        .into_iter()
        .min_by(|p, q| p.1.total_cmp(&q.1))
        .expect("two candidates");
    Ok(GapMinimum { location: seg.point(t), gap: g })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unscaled_gap_location_n7() {
        // reference from dense diagonalization (numpy eigvalsh) on a 2001-point
        // grid over [0, 0.2]: minimum gap 0.101603 at x = 0.0615. The
        // second-order estimate sqrt(1/500) = 0.0447 sits well inside the
        // region where the x^4 term is as large as the x^2 term.
        let d = ViolationDiagonal::worst_case(7, Some(127)).unwrap();
        let m = min_gap_on_segment(&d, Variant::Unscaled, &Segment::along_x(-1.0, 0.0, 0.2), 201).unwrap();
        assert!((m.location.x - 0.0615).abs() < 2e-4, "{:?}", m);
        assert!((m.gap - 0.101603).abs() < 1e-5, "{:?}", m);
        assert_eq!(m.location.z, -1.0);
    }

    #[test]
    fn z_scaled_gap_at_origin_n7() {
        let d = ViolationDiagonal::worst_case(7, Some(127)).unwrap();
        let m = min_gap_on_segment(&d, Variant::ZScaled, &Segment::along_x(-1.0, -0.5, 0.5), 101).unwrap();
        assert!(m.location.x.abs() <= 0.01);
        assert!((m.gap - 0.5).abs() <= 0.05);
    }

    #[test]
    fn insoluble_gap_bounded_below() {
        // far from degeneracy the second-order shift is small: body at z/4 + 1,
        // head at -z/4, so at z = 1 the bare separation is 1.5
        let d = ViolationDiagonal::worst_case(4, None).unwrap();
        let m = min_gap_on_segment(&d, Variant::Unscaled, &Segment::along_x(1.0, 0.05, 0.1), 11).unwrap();
        let shift = 16.0 * 0.1f64.powi(2) / 1.5;
        assert!(m.gap >= 1.5 - 2.0 * shift);
    }

    #[test]
    fn sweep_rows_in_order_and_csv() {
        let d = ViolationDiagonal::worst_case(2, Some(3)).unwrap();
        let rows = sweep(&d, Variant::Unscaled, &Segment::along_z(0.0, -1.0, 1.0), 5).unwrap();
        let zs: Vec<f64> = rows.iter().map(|r| r.point.z).collect();
        assert_eq!(zs, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        // level crossing at the origin
        assert_eq!(rows[2].gap01, 0.0);
        let csv = sweep_csv(&rows, Some(2));
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,z,e0,e1,gap01"));
        assert_eq!(lines.next(), Some("0,-1,-0.25,0.25,0.5"));
    }

    #[test]
    fn rejects_bad_sweeps() {
        let d = ViolationDiagonal::worst_case(2, Some(3)).unwrap();
        assert!(min_gap_on_segment(&d, Variant::Unscaled, &Segment::along_x(0.0, 0.0, 1.0), 2).is_err());
        assert!(sweep(&d, Variant::Unscaled, &Segment::along_x(0.0, 0.0, f64::NAN), 4).is_err());
    }
}
