//! Time-dependent evolution of the ground state around a loop.
//!
//! Each step applies the exact exponential of the Hamiltonian frozen at the
//! step midpoint, so the norm is preserved to rounding and the step error is
//! third order in `dt`. The state never leaves the coupled sector, so the
//! gaps and energies reported here are the ones inside it.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eigensolver::{ArrowheadEigen, EigenError};
use crate::format::csv_row;
use crate::hamiltonian::{ArrowheadHamiltonian, ParameterPoint, Variant};
use crate::holonomy::LoopPath;
use crate::instance::ViolationDiagonal;
use crate::par_map;

pub const NORM_TOLERANCE: f64 = 1e-6;
pub const MIN_STEPS: usize = 100;
/// Default steps per unit of total time.
pub const STEPS_PER_TIME: f64 = 20.0;
pub const DEFAULT_MIN_STEPS: usize = 1000;
pub const DEFAULT_MIN_SPEED_FRACTION: f64 = 0.05;
/// Resolution of the gap table behind the adaptive schedule.
const PROFILE_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdiabaticError {
    #[error("invalid schedule: {0}")]
    ScheduleInvalid(String),
    #[error("norm drifted to {norm} at step {step}")]
    NormDrift { step: usize, norm: f64 },
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedProfile {
    Uniform,
    GapAdaptive,
}

impl SpeedProfile {
    pub fn as_str(self) -> &'static str {
        match self {
            SpeedProfile::Uniform => "uniform",
            SpeedProfile::GapAdaptive => "gap_adaptive",
        }
    }
}

impl FromStr for SpeedProfile {
    type Err = AdiabaticError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "uniform" => Ok(SpeedProfile::Uniform),
            "adaptive" | "gap_adaptive" => Ok(SpeedProfile::GapAdaptive),
            _ => Err(AdiabaticError::ScheduleInvalid(format!("unknown profile {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Schedule {
    pub total_time: f64,
    pub profile: SpeedProfile,
    /// Lower clamp on the adaptive speed, as a fraction of its mean.
    pub min_speed_fraction: f64,
    pub steps: usize,
}

impl Schedule {
    /// `max(1000, 20 T)` steps and a 5% speed floor.
    pub fn new(total_time: f64, profile: SpeedProfile) -> Result<Self, AdiabaticError> {
        let steps = if total_time.is_finite() {
            DEFAULT_MIN_STEPS.max((STEPS_PER_TIME * total_time).ceil() as usize)
        } else {
            0
        };
        Schedule { total_time, profile, min_speed_fraction: DEFAULT_MIN_SPEED_FRACTION, steps }.validated()
    }

    pub fn with_steps(self, steps: usize) -> Result<Self, AdiabaticError> {
        Schedule { steps, ..self }.validated()
    }

    pub fn with_min_speed_fraction(self, f: f64) -> Result<Self, AdiabaticError> {
        Schedule { min_speed_fraction: f, ..self }.validated()
    }

    fn validated(self) -> Result<Self, AdiabaticError> {
        if !(self.total_time > 0.0 && self.total_time.is_finite()) {
            return Err(AdiabaticError::ScheduleInvalid(format!("total_time must be positive, got {}", self.total_time)));
        }
        if self.steps < MIN_STEPS {
            return Err(AdiabaticError::ScheduleInvalid(format!("need at least {MIN_STEPS} steps, got {}", self.steps)));
        }
        if !(self.min_speed_fraction > 0.0 && self.min_speed_fraction <= 1.0) {
            return Err(AdiabaticError::ScheduleInvalid(format!(
                "min_speed_fraction must lie in (0, 1], got {}",
                self.min_speed_fraction
            )));
        }
        Ok(self)
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }
}

/// Maps time fraction `u ∈ [0, 1]` to arc-length fraction `s ∈ [0, 1]`.
#[derive(Debug, Clone)]
enum TimeMap {
    Identity,
    /// Cumulative `tau(s)` on a uniform `s` grid, normalised to end at 1.
    Table(Vec<f64>),
}

impl TimeMap {
    fn build(diag: &ViolationDiagonal, variant: Variant, path: &LoopPath, sched: &Schedule) -> Result<Self, AdiabaticError> {
        if sched.profile == SpeedProfile::Uniform {
            return Ok(TimeMap::Identity);
        }
        let n = PROFILE_GRID;
        let gaps: Vec<f64> = par_map(n + 1, |i| solve(diag, variant, path.point_at(i as f64 / n as f64)).map(|e| e.coupled_gap()))
            .into_iter()
            .collect::<Result<_, _>>()?;
        let speed_sq: Vec<f64> = gaps.iter().map(|g| g * g).collect();
        let mean = speed_sq.iter().sum::<f64>() / speed_sq.len() as f64;
        let floor = sched.min_speed_fraction * mean;
        if floor.is_nan() || floor <= 0.0 {
            return Err(AdiabaticError::ScheduleInvalid("gap vanishes along the whole loop".into()));
        }
        let inv: Vec<f64> = speed_sq.iter().map(|v| 1.0 / v.max(floor)).collect();
        let mut tau = vec![0.0; n + 1];
        for i in 1..=n {
            tau[i] = tau[i - 1] + 0.5 * (inv[i - 1] + inv[i]);
        }
        let total = tau[n];
        tau.iter_mut().for_each(|t| *t /= total);
        Ok(TimeMap::Table(tau))
    }

    fn s_of(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        match self {
            TimeMap::Identity => u,
            TimeMap::Table(tau) => {
                let n = tau.len() - 1;
                let i = tau.partition_point(|&t| t < u).clamp(1, n);
                let (t0, t1) = (tau[i - 1], tau[i]);
                let frac = if t1 > t0 { (u - t0) / (t1 - t0) } else { 0.0 };
                ((i - 1) as f64 + frac) / n as f64
            }
        }
    }
}

fn solve(diag: &ViolationDiagonal, variant: Variant, p: ParameterPoint) -> Result<ArrowheadEigen, EigenError> {
    ArrowheadEigen::new(&ArrowheadHamiltonian::build(diag, p, variant).matrix)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionResult {
    #[serde(skip)]
    pub final_state: Vec<Complex64>,
    pub total_time: f64,
    pub profile: SpeedProfile,
    pub steps: usize,
    pub ground_fidelity: f64,
    /// `-∫ E₀ dt`.
    pub dynamical_phase: f64,
    /// `arg ⟨ψ(0)|ψ(T)⟩`.
    pub total_phase: f64,
    /// `total_phase - dynamical_phase` wrapped into `(-π, π]`.
    pub geometric_phase_estimate: f64,
    pub max_norm_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionRow {
    pub t: f64,
    pub point: ParameterPoint,
    pub e0: f64,
    pub e1: f64,
    pub fidelity: f64,
    pub norm: f64,
}

pub fn evolution_csv(rows: &[EvolutionRow]) -> String {
    let mut out = String::from("t,x,z,e0,e1,fidelity,norm\n");
    for r in rows {
        let _ = writeln!(out, "{}", csv_row(&[r.t, r.point.x, r.point.z, r.e0, r.e1, r.fidelity, r.norm]));
    }
    out
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_phase(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn overlap(a: &[f64], psi: &[Complex64]) -> Complex64 {
    a.iter().zip(psi).map(|(ai, p)| p * ai).sum()
}

fn norm(psi: &[Complex64]) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

pub fn evolve(
    diag: &ViolationDiagonal,
    variant: Variant,
    path: &LoopPath,
    schedule: &Schedule,
) -> Result<EvolutionResult, AdiabaticError> {
    run(diag, variant, path, schedule, None).map(|(r, _)| r)
}

/// Like [`evolve`], also recording every `stride`-th step (plus the first
/// and last).
pub fn evolve_logged(
    diag: &ViolationDiagonal,
    variant: Variant,
    path: &LoopPath,
    schedule: &Schedule,
    stride: usize,
) -> Result<(EvolutionResult, Vec<EvolutionRow>), AdiabaticError> {
    run(diag, variant, path, schedule, Some(stride.max(1)))
}

fn run(
    diag: &ViolationDiagonal,
    variant: Variant,
    path: &LoopPath,
    sched: &Schedule,
    stride: Option<usize>,
) -> Result<(EvolutionResult, Vec<EvolutionRow>), AdiabaticError> {
    let sched = sched.validated()?;
    let map = TimeMap::build(diag, variant, path, &sched)?;
    let steps = sched.steps;
    let dt = sched.dt();
    let point_at_step = |u: f64| path.point_at(map.s_of(u));

    let start = solve(diag, variant, point_at_step(0.0))?;
    let ground0 = start.ground_vector();
    let psi0: Vec<Complex64> = ground0.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut psi = psi0.clone();

    let mut rows = Vec::new();
    let row = |t: f64, p: ParameterPoint, eig: &ArrowheadEigen, psi: &[Complex64]| {
        let ev = eig.coupled_eigenvalues();
        EvolutionRow {
            t,
            point: p,
            e0: ev[0],
            e1: ev.get(1).copied().unwrap_or(f64::NAN),
            fidelity: overlap(&eig.ground_vector(), psi).norm_sqr(),
            norm: norm(psi),
        }
    };
    if stride.is_some() {
        rows.push(row(0.0, point_at_step(0.0), &start, &psi));
    }

    let mut e_prev = start.ground_energy();
    let mut energy_integral = 0.0;
    let mut max_norm_error = 0.0f64;
    let mut last = start;
    for i in 0..steps {
        let mid = solve(diag, variant, point_at_step((i as f64 + 0.5) / steps as f64))?;
        mid.propagate(&mut psi, dt);

        let u = (i + 1) as f64 / steps as f64;
        let here = solve(diag, variant, point_at_step(u))?;
        let e_next = here.ground_energy();
        energy_integral += 0.5 * dt * (e_prev + e_next);
        e_prev = e_next;

        let nrm = norm(&psi);
        max_norm_error = max_norm_error.max((nrm - 1.0).abs());
        if nrm.is_nan() || (nrm - 1.0).abs() > NORM_TOLERANCE {
            return Err(AdiabaticError::NormDrift { step: i + 1, norm: nrm });
        }
        if let Some(k) = stride {
            if (i + 1) % k == 0 || i + 1 == steps {
                rows.push(row(u * sched.total_time, point_at_step(u), &here, &psi));
            }
        }
        last = here;
    }

    let ground_fidelity = overlap(&last.ground_vector(), &psi).norm_sqr().min(1.0);
    let total = psi0.iter().zip(&psi).map(|(a, b)| a.conj() * b).sum::<Complex64>();
    let total_phase = total.arg();
    let dynamical_phase = -energy_integral;
    Ok((
        EvolutionResult {
            final_state: psi,
            total_time: sched.total_time,
            profile: sched.profile,
            steps,
            ground_fidelity,
            dynamical_phase,
            total_phase,
            geometric_phase_estimate: wrap_phase(total_phase - dynamical_phase),
            max_norm_error,
        },
        rows,
    ))
}

/// One summary per total time, all with the same profile. Runs are
/// independent and may execute in parallel.
pub fn fidelity_vs_time(
    diag: &ViolationDiagonal,
    variant: Variant,
    path: &LoopPath,
    profile: SpeedProfile,
    times: &[f64],
) -> Result<Vec<EvolutionResult>, AdiabaticError> {
    if times.is_empty() {
        return Err(AdiabaticError::ScheduleInvalid("no total times given".into()));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AdiabaticError::ScheduleInvalid("times must be strictly ascending".into()));
    }
    let schedules: Vec<Schedule> = times.iter().map(|&t| Schedule::new(t, profile)).collect::<Result<_, _>>()?;
    par_map(schedules.len(), |i| evolve(diag, variant, path, &schedules[i]))
        .into_iter()
        .collect()
}

/// CSV `total_time,ground_fidelity,geometric_phase_estimate`.
pub fn fidelity_table_csv(results: &[EvolutionResult]) -> String {
    let mut out = String::from("total_time,ground_fidelity,geometric_phase_estimate\n");
    for r in results {
        let _ = writeln!(out, "{}", csv_row(&[r.total_time, r.ground_fidelity, r.geometric_phase_estimate]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wc3() -> ViolationDiagonal {
        ViolationDiagonal::worst_case(3, Some(7)).unwrap()
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(0.0, SpeedProfile::Uniform).is_err());
        assert!(Schedule::new(f64::NAN, SpeedProfile::Uniform).is_err());
        assert!(Schedule::new(1.0, SpeedProfile::Uniform).unwrap().with_steps(99).is_err());
        assert!(Schedule::new(1.0, SpeedProfile::Uniform).unwrap().with_min_speed_fraction(0.0).is_err());
        assert_eq!(Schedule::new(10.0, SpeedProfile::Uniform).unwrap().steps, 1000);
        assert_eq!(Schedule::new(1e3, SpeedProfile::Uniform).unwrap().steps, 20000);
        assert_eq!("adaptive".parse::<SpeedProfile>().unwrap(), SpeedProfile::GapAdaptive);
    }

    #[test]
    fn wrap_phase_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!(wrap_phase(4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn adaptive_map_is_monotone_and_covers_loop() {
        let path = LoopPath::default_rectangle();
        let sched = Schedule::new(100.0, SpeedProfile::GapAdaptive).unwrap();
        let map = TimeMap::build(&wc3(), Variant::Unscaled, &path, &sched).unwrap();
        assert_eq!(map.s_of(0.0), 0.0);
        assert!((map.s_of(1.0) - 1.0).abs() < 1e-12);
        let mut prev = -1.0;
        for i in 0..=1000 {
            let s = map.s_of(i as f64 / 1000.0);
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn slow_soluble_loop_picks_up_pi() {
        let sched = Schedule::new(2000.0, SpeedProfile::GapAdaptive).unwrap();
        let r = evolve(&wc3(), Variant::Unscaled, &LoopPath::default_rectangle(), &sched).unwrap();
        assert!(r.ground_fidelity > 0.99, "{r:?}");
        assert!((r.geometric_phase_estimate.abs() - PI).abs() < 0.1, "{r:?}");
        assert!(r.max_norm_error < 1e-9);
    }

    #[test]
    fn slow_insoluble_loop_picks_up_nothing() {
        let d = ViolationDiagonal::worst_case(3, None).unwrap();
        let sched = Schedule::new(2000.0, SpeedProfile::GapAdaptive).unwrap();
        let r = evolve(&d, Variant::Unscaled, &LoopPath::default_rectangle(), &sched).unwrap();
        assert!(r.ground_fidelity > 0.99, "{r:?}");
        assert!(r.geometric_phase_estimate.abs() < 0.1, "{r:?}");
    }

    #[test]
    fn fast_uniform_run_leaks() {
        let path = LoopPath::default_rectangle();
        let fast = evolve(&wc3(), Variant::Unscaled, &path, &Schedule::new(10.0, SpeedProfile::Uniform).unwrap()).unwrap();
        let slow = evolve(&wc3(), Variant::Unscaled, &path, &Schedule::new(1000.0, SpeedProfile::GapAdaptive).unwrap()).unwrap();
        assert!(fast.ground_fidelity < slow.ground_fidelity, "{} vs {}", fast.ground_fidelity, slow.ground_fidelity);
    }

    #[test]
    fn halving_step_converges() {
        let path = LoopPath::default_rectangle();
        let s = Schedule::new(200.0, SpeedProfile::GapAdaptive).unwrap();
        let a = evolve(&wc3(), Variant::Unscaled, &path, &s).unwrap();
        let b = evolve(&wc3(), Variant::Unscaled, &path, &s.with_steps(2 * s.steps).unwrap()).unwrap();
        assert!((a.ground_fidelity - b.ground_fidelity).abs() < 1e-4, "{} {}", a.ground_fidelity, b.ground_fidelity);
    }

    #[test]
    fn logged_rows_and_csv() {
        let path = LoopPath::default_rectangle();
        let s = Schedule::new(5.0, SpeedProfile::Uniform).unwrap();
        let (r, rows) = evolve_logged(&wc3(), Variant::Unscaled, &path, &s, 100).unwrap();
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0].t, 0.0);
        assert!((rows[10].t - 5.0).abs() < 1e-12);
        assert_eq!(rows[0].fidelity, 1.0);
        assert!((rows[10].fidelity - r.ground_fidelity).abs() < 1e-12);
        for w in rows.windows(2) {
            assert!(w[0].t < w[1].t);
        }
        let csv = evolution_csv(&rows);
        assert!(csv.starts_with("t,x,z,e0,e1,fidelity,norm\n0,0,1,-0.25,0.25,1,1\n"), "{csv}");
        assert_eq!(csv.lines().count(), 12);
    }

    #[test]
    fn fidelity_table_rows() {
        let path = LoopPath::default_rectangle();
        let rows = fidelity_vs_time(&wc3(), Variant::Unscaled, &path, SpeedProfile::Uniform, &[5.0]).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(fidelity_vs_time(&wc3(), Variant::Unscaled, &path, SpeedProfile::Uniform, &[5.0, 1.0]).is_err());
    }

    #[test]
    fn evolution_is_deterministic() {
        let path = LoopPath::default_rectangle();
        let s = Schedule::new(20.0, SpeedProfile::GapAdaptive).unwrap();
        let a = evolve(&wc3(), Variant::Unscaled, &path, &s).unwrap();
        let b = evolve(&wc3(), Variant::Unscaled, &path, &s).unwrap();
        assert_eq!(a, b);
    }
}
