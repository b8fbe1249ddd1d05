//! Berry phase of the ground state around a closed loop in `(x, z)`.
//!
//! For a real symmetric Hamiltonian the holonomy of a non-degenerate level is
//! a sign. It is computed by solving for the ground vector at successive loop
//! points and flipping each one to have positive overlap with its
//! predecessor. Where consecutive vectors overlap poorly the segment is
//! bisected until the transport is resolved.
//!
//! The transported state stays inside the sector spanned by the head and the
//! uniform combinations of equal-energy body states; that sector is invariant
//! for every `(x, z)`, so the degeneracy check uses the gap inside it. States
//! outside the sector can cross the ground level (several solutions at
//! `x = 0`, `z < 0`) without affecting the transport.

use std::fmt::Write as _;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::eigensolver::{ArrowheadEigen, EigenError};
use crate::format::g17;
use crate::hamiltonian::{ArrowheadHamiltonian, ParameterPoint, Variant};
use crate::instance::ViolationDiagonal;

/// Smallest admissible gap between the transported level and the next one.
pub const GAP_FLOOR: f64 = 1e-9;
/// Smallest overlap accepted between consecutive transported vectors.
pub const OVERLAP_FLOOR: f64 = 0.5;
/// Overlap below which a segment is bisected.
pub const REFINE_TRIGGER: f64 = 0.8;
pub const MAX_REFINE_DEPTH: u32 = 22;
pub const DEFAULT_SAMPLES_PER_EDGE: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HolonomyError {
    #[error("loop is not closed: first and last waypoints differ")]
    OpenLoop,
    #[error("invalid loop: {0}")]
    InvalidLoop(String),
    #[error("ground level degenerate on the loop at ({x}, {z}): gap {gap:e}")]
    DegenerateOnLoop { x: f64, z: f64, gap: f64 },
    #[error("transport unresolved near ({x}, {z}): overlap {overlap} after maximum refinement")]
    RefinementExhausted { x: f64, z: f64, overlap: f64 },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// A closed polyline in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopPath {
    waypoints: Vec<ParameterPoint>,
    samples_per_edge: usize,
}

impl LoopPath {
    pub fn new(waypoints: Vec<ParameterPoint>, samples_per_edge: usize) -> Result<Self, HolonomyError> {
        let (first, last) = match (waypoints.first(), waypoints.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(HolonomyError::InvalidLoop("no waypoints".into())),
        };
        if first != last {
            return Err(HolonomyError::OpenLoop);
        }
        if samples_per_edge == 0 {
            return Err(HolonomyError::InvalidLoop("samples_per_edge must be positive".into()));
        }
        if waypoints.iter().any(|p| !(p.x.is_finite() && p.z.is_finite())) {
            return Err(HolonomyError::InvalidLoop("non-finite waypoint".into()));
        }
        let mut distinct: Vec<ParameterPoint> = Vec::new();
        for p in &waypoints {
            if !distinct.contains(p) {
                distinct.push(*p);
            }
        }
        if distinct.len() < 3 {
            return Err(HolonomyError::InvalidLoop("need at least 3 distinct waypoints".into()));
        }
        if waypoints.windows(2).any(|w| segment_hits_origin(w[0], w[1])) {
            return Err(HolonomyError::InvalidLoop("loop passes through the origin".into()));
        }
        Ok(LoopPath { waypoints, samples_per_edge })
    }

    /// `(0,1) → (-1,1) → (-1,-1) → (1,-1) → (1,1) → (0,1)`.
    pub fn default_rectangle() -> Self {
        Self::rectangle_from_top(1.0, 1.0, DEFAULT_SAMPLES_PER_EDGE).expect("valid default loop")
    }

    /// Rectangle `[-half_x, half_x] × [-half_z, half_z]` traversed like the
    /// default loop, starting at `(0, half_z)`.
    pub fn rectangle_from_top(half_x: f64, half_z: f64, samples_per_edge: usize) -> Result<Self, HolonomyError> {
        let p = |x, z| ParameterPoint { x, z };
        Self::new(
            vec![
                p(0.0, half_z),
                p(-half_x, half_z),
                p(-half_x, -half_z),
                p(half_x, -half_z),
                p(half_x, half_z),
                p(0.0, half_z),
            ],
            samples_per_edge,
        )
    }

    /// Axis-aligned rectangle starting at its lower-left corner.
    pub fn rectangle(x0: f64, x1: f64, z0: f64, z1: f64, samples_per_edge: usize) -> Result<Self, HolonomyError> {
        let p = |x, z| ParameterPoint { x, z };
        Self::new(
            vec![p(x0, z0), p(x1, z0), p(x1, z1), p(x0, z1), p(x0, z0)],
            samples_per_edge,
        )
    }

    pub fn waypoints(&self) -> &[ParameterPoint] {
        &self.waypoints
    }

    pub fn samples_per_edge(&self) -> usize {
        self.samples_per_edge
    }

    pub fn with_samples(&self, samples_per_edge: usize) -> Result<Self, HolonomyError> {
        Self::new(self.waypoints.clone(), samples_per_edge)
    }

    pub fn reversed(&self) -> Self {
        let mut w = self.waypoints.clone();
        w.reverse();
        LoopPath { waypoints: w, samples_per_edge: self.samples_per_edge }
    }

    /// Evenly spaced points along every edge; the first point is repeated at
    /// the end.
    pub fn sample_points(&self) -> Vec<ParameterPoint> {
        let mut pts = Vec::new();
        for w in self.waypoints.windows(2) {
            for j in 0..self.samples_per_edge {
                pts.push(w[0].lerp(w[1], j as f64 / self.samples_per_edge as f64));
            }
        }
        pts.push(self.waypoints[0]);
        pts
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| w[0].distance(w[1])).sum()
    }

    /// Point at arc-length fraction `s ∈ [0, 1]`.
    pub fn point_at(&self, s: f64) -> ParameterPoint {
        let total = self.length();
        let mut target = s.clamp(0.0, 1.0) * total;
        for w in self.waypoints.windows(2) {
            let len = w[0].distance(w[1]);
            if target <= len && len > 0.0 {
                return w[0].lerp(w[1], target / len);
            }
            target -= len;
        }
        *self.waypoints.last().expect("non-empty")
    }
}

fn segment_hits_origin(a: ParameterPoint, b: ParameterPoint) -> bool {
    let cross = a.x * b.z - a.z * b.x;
    if cross != 0.0 {
        return false;
    }
    a.x.min(b.x) <= 0.0 && 0.0 <= a.x.max(b.x) && a.z.min(b.z) <= 0.0 && 0.0 <= a.z.max(b.z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Zero,
    Pi,
}

impl Phase {
    pub fn radians(self) -> f64 {
        match self {
            Phase::Zero => 0.0,
            Phase::Pi => std::f64::consts::PI,
        }
    }
}

impl Serialize for Phase {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(match self {
            Phase::Zero => "0",
            Phase::Pi => "pi",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BerryResult {
    pub phase: Phase,
    pub holonomy_sign: i8,
    /// Smallest |overlap| between consecutive transported vectors.
    pub min_transport_overlap: f64,
    /// Smallest gap above the transported level anywhere on the loop.
    pub min_gap_on_loop: f64,
    /// Points inserted by bisection.
    pub refined_points: usize,
    /// Total points solved, including refinements.
    pub solves: usize,
}

/// One row of the transport log.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportStep {
    pub point: ParameterPoint,
    pub e0: f64,
    pub e1: f64,
    pub overlap: f64,
    pub cumulative_sign: i8,
}

/// CSV `step,x,z,e0,e1,overlap,cumulative_sign`.
pub fn transport_csv(steps: &[TransportStep]) -> String {
    let mut out = String::from("step,x,z,e0,e1,overlap,cumulative_sign\n");
    for (i, s) in steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{}",
            g17(s.point.x),
            g17(s.point.z),
            g17(s.e0),
            g17(s.e1),
            g17(s.overlap),
            s.cumulative_sign
        );
    }
    out
}

struct Transport<'a, G: FnMut(usize) -> f64> {
    diag: &'a ViolationDiagonal,
    variant: Variant,
    gauge: G,
    log: Option<Vec<TransportStep>>,
    solves: usize,
    refined: usize,
    min_overlap: f64,
    min_gap: f64,
}

impl<G: FnMut(usize) -> f64> Transport<'_, G> {
    /// Ground vector at `p` in the solver's gauge times the test gauge.
    fn ground(&mut self, p: ParameterPoint) -> Result<(Vec<f64>, i8, f64, f64), HolonomyError> {
        let h = ArrowheadHamiltonian::build(self.diag, p, self.variant);
        let eig = ArrowheadEigen::new(&h.matrix)?;
        let gap = eig.coupled_gap();
        if gap.is_nan() || gap < GAP_FLOOR {
            return Err(HolonomyError::DegenerateOnLoop { x: p.x, z: p.z, gap });
        }
        self.min_gap = self.min_gap.min(gap);
        let ev = eig.coupled_eigenvalues();
        let gauge: i8 = if (self.gauge)(self.solves) < 0.0 { -1 } else { 1 };
        self.solves += 1;
        let mut v = eig.ground_vector();
        if gauge < 0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        Ok((v, gauge, ev[0], ev[1]))
    }

    fn record(&mut self, p: ParameterPoint, e0: f64, e1: f64, overlap: f64, sign: i8) {
        if let Some(log) = self.log.as_mut() {
            log.push(TransportStep { point: p, e0, e1, overlap, cumulative_sign: sign });
        }
    }

    /// Carries `from_vec` (aligned at `a`) to `b` and returns the aligned
    /// vector at `b`.
    fn segment(
        &mut self,
        a: ParameterPoint,
        from_vec: &[f64],
        b: ParameterPoint,
        depth: u32,
    ) -> Result<Vec<f64>, HolonomyError> {
        let (v, gauge, e0, e1) = self.ground(b)?;
        let overlap: f64 = from_vec.iter().zip(&v).map(|(p, q)| p * q).sum();
        if overlap.abs() < REFINE_TRIGGER && depth < MAX_REFINE_DEPTH {
            let mid = a.lerp(b, 0.5);
            self.refined += 1;
            let mid_vec = self.segment(a, from_vec, mid, depth + 1)?;
            return self.segment(mid, &mid_vec, b, depth + 1);
        }
        if overlap.abs() < OVERLAP_FLOOR {
            return Err(HolonomyError::RefinementExhausted { x: b.x, z: b.z, overlap });
        }
        self.min_overlap = self.min_overlap.min(overlap.abs());
        let sign: i8 = if overlap < 0.0 { -1 } else { 1 };
        let aligned: Vec<f64> = v.iter().map(|c| c * f64::from(sign)).collect();
        // sign relative to the solver's own gauge (head component >= 0)
        self.record(b, e0, e1, overlap, sign * gauge);
        Ok(aligned)
    }
}

fn run<G: FnMut(usize) -> f64>(
    diag: &ViolationDiagonal,
    variant: Variant,
    path: &LoopPath,
    gauge: G,
    keep_log: bool,
) -> Result<(BerryResult, Vec<TransportStep>), HolonomyError> {
    let mut t = Transport {
        diag,
        variant,
        gauge,
        log: keep_log.then(Vec::new),
        solves: 0,
        refined: 0,
        min_overlap: 1.0,
        min_gap: f64::INFINITY,
    };
    let points = path.sample_points();
    let (start, gauge, e0, e1) = t.ground(points[0])?;
    t.record(points[0], e0, e1, 1.0, gauge);

    let mut current = start.clone();
    for w in points.windows(2) {
        current = t.segment(w[0], &current, w[1], 0)?;
    }
    let closure: f64 = current.iter().zip(&start).map(|(p, q)| p * q).sum();
    let holonomy_sign: i8 = if closure < 0.0 { -1 } else { 1 };
    let result = BerryResult {
        phase: if holonomy_sign < 0 { Phase::Pi } else { Phase::Zero },
        holonomy_sign,
        min_transport_overlap: t.min_overlap,
        min_gap_on_loop: t.min_gap,
        refined_points: t.refined,
        solves: t.solves,
    };
    Ok((result, t.log.unwrap_or_default()))
}

/// Geometric phase (`0` or `π`) of the ground state around `path`.
pub fn berry_phase(diag: &ViolationDiagonal, variant: Variant, path: &LoopPath) -> Result<BerryResult, HolonomyError> {
    run(diag, variant, path, |_| 1.0, false).map(|(r, _)| r)
}

/// [`berry_phase`] plus the per-point transport log.
pub fn berry_phase_logged(
    diag: &ViolationDiagonal,
    variant: Variant,
    path: &LoopPath,
) -> Result<(BerryResult, Vec<TransportStep>), HolonomyError> {
    run(diag, variant, path, |_| 1.0, true)
}

/// Satisfiability read off the Berry phase on the default loop.
pub fn solubility(diag: &ViolationDiagonal, variant: Variant) -> Result<bool, HolonomyError> {
    solubility_on(diag, variant, &LoopPath::default_rectangle())
}

pub fn solubility_on(diag: &ViolationDiagonal, variant: Variant, path: &LoopPath) -> Result<bool, HolonomyError> {
    Ok(berry_phase(diag, variant, path)?.phase == Phase::Pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{brute_force_solubility, parse_dimacs, random_instance};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wc(n: usize, sol: Option<usize>) -> ViolationDiagonal {
        ViolationDiagonal::worst_case(n, sol).unwrap()
    }

    #[test]
    fn soluble_worst_case_gives_pi() {
        let r = berry_phase(&wc(7, Some(127)), Variant::Unscaled, &LoopPath::default_rectangle()).unwrap();
        assert_eq!(r.phase, Phase::Pi);
        assert_eq!(r.holonomy_sign, -1);
        assert!(r.min_transport_overlap > OVERLAP_FLOOR);
        assert!(r.min_gap_on_loop > GAP_FLOOR);
    }

    #[test]
    fn insoluble_gives_zero() {
        let r = berry_phase(&wc(7, None), Variant::Unscaled, &LoopPath::default_rectangle()).unwrap();
        assert_eq!(r.phase, Phase::Zero);
        assert_eq!(r.holonomy_sign, 1);
    }

    #[test]
    fn two_level_conical_intersection() {
        let d = ViolationDiagonal::from_entries(vec![0]).unwrap();
        assert!(solubility(&d, Variant::Unscaled).unwrap());
        let d = ViolationDiagonal::from_entries(vec![1]).unwrap();
        assert!(!solubility(&d, Variant::Unscaled).unwrap());
    }

    #[test]
    fn named_solubility_cases() {
        assert!(solubility(&wc(5, Some(3)), Variant::Unscaled).unwrap());
        let single = parse_dimacs("p cnf 3 1\n1 2 3 0").unwrap();
        assert!(solubility(&ViolationDiagonal::from_instance(&single), Variant::Unscaled).unwrap());
        let mut text = String::from("p cnf 3 8\n");
        for p in 0..8 {
            let s = |k: i32| if (p >> k) & 1 == 1 { -(k + 1) } else { k + 1 };
            text.push_str(&format!("{} {} {} 0\n", s(0), s(1), s(2)));
        }
        let cover = ViolationDiagonal::from_instance(&parse_dimacs(&text).unwrap());
        assert!(!solubility(&cover, Variant::Unscaled).unwrap());
    }

    #[test]
    fn all_variants_agree_on_worst_cases() {
        for v in Variant::ALL {
            for n in 1..=6 {
                assert!(solubility(&wc(n, Some(0)), v).unwrap(), "{v} n={n}");
                assert!(!solubility(&wc(n, None), v).unwrap(), "{v} n={n}");
            }
        }
    }

    #[test]
    fn loop_validation() {
        let p = |x, z| ParameterPoint { x, z };
        assert_eq!(
            LoopPath::new(vec![p(0.0, 1.0), p(1.0, 1.0), p(1.0, 0.5)], 4),
            Err(HolonomyError::OpenLoop)
        );
        assert!(LoopPath::new(vec![p(0.0, 1.0), p(1.0, 1.0), p(0.0, 1.0)], 4).is_err());
        // the edge from (-1,-1) to (1,1) crosses the origin
        assert!(LoopPath::new(vec![p(-1.0, -1.0), p(1.0, 1.0), p(1.0, -1.0), p(-1.0, -1.0)], 4).is_err());
        assert!(LoopPath::rectangle(0.2, 0.6, -0.5, 0.5, 0).is_err());
    }

    #[test]
    fn loop_not_enclosing_origin_gives_zero() {
        let path = LoopPath::rectangle(0.2, 0.6, -0.5, 0.5, 32).unwrap();
        for sol in [Some(3), None] {
            let r = berry_phase(&wc(4, sol), Variant::Unscaled, &path).unwrap();
            assert_eq!(r.phase, Phase::Zero);
        }
    }

    #[test]
    fn orientation_and_resolution_invariance() {
        for diag in [wc(6, Some(17)), wc(6, None)] {
            let base = berry_phase(&diag, Variant::Unscaled, &LoopPath::default_rectangle()).unwrap();
            let rev = berry_phase(&diag, Variant::Unscaled, &LoopPath::default_rectangle().reversed()).unwrap();
            assert_eq!(base.phase, rev.phase);
            let fine = LoopPath::default_rectangle().with_samples(128).unwrap();
            let doubled = berry_phase(&diag, Variant::Unscaled, &fine).unwrap();
            assert_eq!(base.holonomy_sign, doubled.holonomy_sign);
        }
    }

    #[test]
    fn coarse_loop_triggers_refinement() {
        let path = LoopPath::default_rectangle().with_samples(2).unwrap();
        let r = berry_phase(&wc(7, Some(5)), Variant::Unscaled, &path).unwrap();
        assert_eq!(r.phase, Phase::Pi);
        assert!(r.refined_points > 0);
    }

    #[test]
    fn log_starts_and_ends_at_first_waypoint() {
        let (r, log) = berry_phase_logged(&wc(3, Some(1)), Variant::Unscaled, &LoopPath::default_rectangle()).unwrap();
        assert_eq!(log.len(), r.solves);
        assert_eq!(log[0].point, log[log.len() - 1].point);
        assert_eq!(log.last().unwrap().cumulative_sign, -1);
        let csv = transport_csv(&log);
        assert!(csv.starts_with("step,x,z,e0,e1,overlap,cumulative_sign\n0,0,1,-0.25,0.25,1,1\n"));
    }

    #[test]
    fn multi_solution_instance_is_accepted() {
        let d = ViolationDiagonal::from_entries(vec![0, 2, 0, 1, 0, 3, 1, 1]).unwrap();
        let r = berry_phase(&d, Variant::Unscaled, &LoopPath::default_rectangle()).unwrap();
        assert_eq!(r.phase, Phase::Pi);
    }

    #[test]
    fn random_instances_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..=6 {
            for _ in 0..15 {
                let m = rand::Rng::random_range(&mut rng, 1..=8 * n);
                let inst = random_instance(n, m, &mut rng).unwrap();
                let d = ViolationDiagonal::from_instance(&inst);
                let want = brute_force_solubility(&d).soluble;
                assert_eq!(solubility(&d, Variant::Unscaled).unwrap(), want, "n={n} m={m}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gauge_choice_does_not_matter(seed in any::<u64>(), sol in proptest::option::of(0usize..16)) {
            let d = wc(4, sol);
            let path = LoopPath::default_rectangle();
            let plain = berry_phase(&d, Variant::Unscaled, &path).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let gauge = move |_| if rand::Rng::random_bool(&mut rng, 0.5) { -1.0 } else { 1.0 };
            let (flipped, _) = run(&d, Variant::Unscaled, &path, gauge, false).unwrap();
            prop_assert_eq!(plain.phase, flipped.phase);
        }
    }
}
