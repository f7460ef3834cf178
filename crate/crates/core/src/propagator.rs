//! Execution of pulse schedules on phonon states.
//!
//! Everything runs in the interaction picture of `H₀ = ω₀ Σ a_j† a_j`, where
//! the RWA hopping term is time independent and free segments are exact
//! exponentials. During a trap-modulation pulse on mode `j` the drive
//! `(Ω²(t)/4ω₀)(a_j† e^{iω₀t} + a_j e^{−iω₀t})²` keeps its counter-rotating
//! terms and the state is integrated numerically.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::ConstantPropagator;
use crate::fock::{FockSpace, PhononState};
use crate::integrator::{BulirschStoer, IntegrationStats};
use crate::operator::{quadrature_parts, QuadratureParts, SparseOperator};
use crate::pulse::ShapedPulse;
use crate::schedule::{ModeSet, PulseModel, PulseSchedule, TimedKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    /// Local error per integrator step.
    pub tolerance: f64,
    /// Longest integrator step during a pulse; `None` uses the largest
    /// allowed value, a twentieth of half a secular period.
    pub max_step: Option<f64>,
    /// `ω₀`, rad/s.
    pub secular_frequency: f64,
    /// Spacing of population records; `None` spreads
    /// [`PropagatorConfig::DEFAULT_RECORDS`] samples over the run.
    pub record_stride: Option<f64>,
    /// Boundary population above which a run is flagged.
    pub leakage_limit: f64,
}

impl PropagatorConfig {
    pub const DEFAULT_RECORDS: usize = 512;

    pub fn new(secular_frequency: f64) -> Self {
        PropagatorConfig {
            tolerance: 1e-12,
            max_step: None,
            secular_frequency,
            record_stride: None,
            leakage_limit: 1e-6,
        }
    }

    /// `(2π / 2ω₀) / 20`.
    pub fn step_limit(&self) -> f64 {
        PI / self.secular_frequency / 20.0
    }

    pub fn effective_max_step(&self) -> f64 {
        self.max_step.unwrap_or_else(|| self.step_limit())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::config("integrator tolerance must be positive"));
        }
        if !(self.secular_frequency > 0.0) {
            return Err(Error::config("secular frequency must be positive"));
        }
        let step = self.effective_max_step();
        if !(step > 0.0) || step > self.step_limit() * (1.0 + 1e-12) {
            return Err(Error::config(format!(
                "max step {step:.3e} s exceeds the limit {:.3e} s",
                self.step_limit()
            )));
        }
        if let Some(s) = self.record_stride {
            if !(s > 0.0) {
                return Err(Error::config("record stride must be positive"));
            }
        }
        Ok(())
    }
}

/// Time dependence of a trap-frequency excursion `Ω²(t)` on `[0, duration]`.
pub trait DriveProfile {
    fn duration(&self) -> f64;
    fn omega_sq_excess(&self, t: f64) -> f64;
    /// Times inside the pulse where `Ω²` jumps; integration restarts there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl DriveProfile for ShapedPulse {
    fn duration(&self) -> f64 {
        ShapedPulse::duration(self)
    }

    fn omega_sq_excess(&self, t: f64) -> f64 {
        ShapedPulse::omega_sq_excess(self, t)
    }
}

/// Piecewise-constant `Ω²`: `(duration, value)` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Staircase(pub Vec<(f64, f64)>);

impl DriveProfile for Staircase {
    fn duration(&self) -> f64 {
        self.0.iter().map(|s| s.0).sum()
    }

    fn omega_sq_excess(&self, t: f64) -> f64 {
        let mut edge = 0.0;
        for &(d, v) in &self.0 {
            edge += d;
            if t < edge {
                return v;
            }
        }
        self.0.last().map_or(0.0, |s| s.1)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut edge = 0.0;
        let mut out = Vec::new();
        for &(d, _) in &self.0[..self.0.len().saturating_sub(1)] {
            edge += d;
            out.push(edge);
        }
        out
    }
}

/// `exp(-i τ H) ψ`.
pub fn evolve_constant(state: &PhononState, hamiltonian: &SparseOperator, duration: f64) -> Result<PhononState> {
    let prop = ConstantPropagator::new(hamiltonian)?;
    let mut out = state.clone();
    prop.apply(&mut out.amplitudes, duration)?;
    Ok(out)
}

/// Instantaneous `exp(-iπ Σ_{j∈modes} n_j)`.
pub fn apply_ideal_phase(space: &FockSpace, state: &PhononState, modes: &ModeSet) -> Result<PhononState> {
    let mut out = state.clone();
    apply_parity(space, &mut out.amplitudes, modes)?;
    Ok(out)
}

fn apply_parity(space: &FockSpace, amplitudes: &mut [Complex64], modes: &ModeSet) -> Result<()> {
    if amplitudes.len() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            found: amplitudes.len(),
        });
    }
    for &m in modes.modes() {
        space.check_mode(m)?;
    }
    for (i, a) in amplitudes.iter_mut().enumerate() {
        let n: usize = modes.modes().iter().map(|&m| space.occupation(i, m)).sum();
        if n % 2 == 1 {
            *a = -*a;
        }
    }
    Ok(())
}

/// Drive operators for a set of target modes.
struct Drive {
    parts: Vec<QuadratureParts>,
    omega0: f64,
}

impl Drive {
    fn new(space: &FockSpace, targets: &ModeSet, omega0: f64) -> Result<Self> {
        let parts = targets
            .modes()
            .iter()
            .map(|&m| quadrature_parts(space, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Drive { parts, omega0 })
    }

    /// `dy = -i (H_bg + c (e^{2iω₀t} a†² + e^{-2iω₀t} a² + a†a + aa†)) y`.
    fn derivative(&self, background: &SparseOperator, c: f64, t_abs: f64, y: &[Complex64], dy: &mut [Complex64]) {
        let mi = Complex64::new(0.0, -1.0);
        background.apply(y, dy);
        dy.iter_mut().for_each(|v| *v *= mi);
        if c == 0.0 {
            return;
        }
        let rot = Complex64::from_polar(1.0, 2.0 * self.omega0 * t_abs);
        for p in &self.parts {
            p.raise_sq.apply_add(mi * c * rot, y, dy);
            p.lower_sq.apply_add(mi * c * rot.conj(), y, dy);
            for ((d, &yv), &g) in dy.iter_mut().zip(y).zip(&p.diagonal) {
                *d += mi * (c * g) * yv;
            }
        }
    }
}

/// Integrates the state through a drive applied to `targets`, starting at
/// absolute time `start` (which fixes the phase of the counter-rotating
/// terms). Integration is split at `stops` (local times) so the caller can
/// observe the state there.
#[allow(clippy::too_many_arguments)]
fn integrate_drive(
    space: &FockSpace,
    amplitudes: &mut [Complex64],
    drive_profile: &dyn DriveProfile,
    targets: &ModeSet,
    background: &SparseOperator,
    config: &PropagatorConfig,
    start: f64,
    stops: &[f64],
    mut observe: impl FnMut(f64, &[Complex64]),
) -> Result<IntegrationStats> {
    config.validate()?;
    if background.dimension() != space.dimension() || amplitudes.len() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            found: background.dimension().min(amplitudes.len()),
        });
    }
    let drive = Drive::new(space, targets, config.secular_frequency)?;
    let bs = BulirschStoer::with_tolerance(config.tolerance, config.effective_max_step());
    let duration = drive_profile.duration();
    let four_w0 = 4.0 * config.secular_frequency;
    let mut cuts: Vec<(f64, bool)> = drive_profile
        .breakpoints()
        .into_iter()
        .map(|t| (t, false))
        .chain(stops.iter().map(|&t| (t, true)))
        .filter(|&(t, _)| t > 0.0 && t < duration)
        .collect();
    cuts.sort_by(|a, b| a.0.total_cmp(&b.0));
    cuts.push((duration, false));
    let mut stats = IntegrationStats::default();
    let mut t = 0.0;
    for (cut, report) in cuts {
        if cut > t {
            // Evaluate Ω² at the midpoint of the interval for steps, so a
            // jump exactly at an edge belongs to the correct side.
            let (lo, hi) = (t, cut);
            let s = bs.integrate(
                |tl, y, dy| {
                    let tq = tl.clamp(lo + 1e-15 * hi, hi - 1e-15 * hi);
                    let c = drive_profile.omega_sq_excess(tq) / four_w0;
                    drive.derivative(background, c, start + tl, y, dy);
                },
                lo,
                hi,
                amplitudes,
            )?;
            stats.merge(&s);
            t = cut;
        }
        if report {
            observe(cut, amplitudes);
        }
    }
    Ok(stats)
}

/// Propagates through a trap-modulation pulse on `targets` while the
/// background Hamiltonian stays on. `start` is the absolute time at which the
/// pulse begins.
pub fn evolve_shaped(
    space: &FockSpace,
    state: &PhononState,
    drive: &dyn DriveProfile,
    targets: &ModeSet,
    background: &SparseOperator,
    config: &PropagatorConfig,
    start: f64,
) -> Result<(PhononState, IntegrationStats)> {
    let mut out = state.clone();
    let stats = integrate_drive(
        space,
        &mut out.amplitudes,
        drive,
        targets,
        background,
        config,
        start,
        &[],
        |_, _| {},
    )?;
    Ok((out, stats))
}

/// `1 − |<ψ₀|ψ>|`.
pub fn error_overlap(initial: &PhononState, fin: &PhononState) -> f64 {
    1.0 - initial.inner(fin).norm()
}

/// Ideal 50:50 beam splitter `exp(-i(π/4)(a_j† a_k + a_j a_k†))` applied to
/// a state.
pub fn beam_splitter_target(space: &FockSpace, initial: &PhononState, pair: (usize, usize)) -> Result<PhononState> {
    let (j, k) = pair;
    space.check_mode(j)?;
    space.check_mode(k)?;
    if j == k {
        return Err(Error::domain("beam splitter needs two distinct modes"));
    }
    let kappa = crate::chain::CouplingMatrix::from_fn(space.mode_count(), |a, b| {
        if (a, b) == (j.max(k), j.min(k)) {
            2.0
        } else {
            0.0
        }
    });
    let h = crate::operator::hopping_hamiltonian(space, &kappa, crate::operator::HoppingForm::Rwa)?;
    evolve_constant(initial, &h, PI / 4.0)
}

/// `1 − |<ψ_f|ψ>|` with `ψ_f` the ideal 50:50 splitter output on `pair`.
pub fn error_beam_splitter(
    space: &FockSpace,
    initial: &PhononState,
    fin: &PhononState,
    pair: (usize, usize),
) -> Result<f64> {
    let target = beam_splitter_target(space, initial, pair)?;
    Ok(1.0 - target.inner(fin).norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub times: Vec<f64>,
    /// Basis populations at each recorded time.
    pub populations: Vec<Vec<f64>>,
    pub final_state: PhononState,
    /// Largest `|‖ψ‖ − 1|` seen.
    pub norm_drift: f64,
    /// Largest population found on basis states at the cutoff.
    pub boundary_leakage: f64,
    pub leakage_exceeded: bool,
    pub error_e: f64,
    pub error_eb: Option<f64>,
    pub stats: IntegrationStats,
}

impl SimulationResult {
    pub fn check_leakage(&self, limit: f64) -> Result<()> {
        if self.boundary_leakage > limit {
            return Err(Error::Leakage {
                population: self.boundary_leakage,
                limit,
            });
        }
        Ok(())
    }
}

struct Recorder<'a> {
    space: &'a FockSpace,
    grid: Vec<f64>,
    next: usize,
    times: Vec<f64>,
    populations: Vec<Vec<f64>>,
    norm_drift: f64,
    leakage: f64,
}

impl<'a> Recorder<'a> {
    fn new(space: &'a FockSpace, total: f64, stride: Option<f64>) -> Self {
        let grid = match stride {
            Some(s) => {
                let n = (total / s).floor() as usize;
                let mut g: Vec<f64> = (0..=n).map(|i| i as f64 * s).collect();
                if g.last().is_some_and(|&l| l < total * (1.0 - 1e-12)) {
                    g.push(total);
                }
                g
            }
            None => {
                let n = PropagatorConfig::DEFAULT_RECORDS - 1;
                (0..=n).map(|i| total * i as f64 / n as f64).collect()
            }
        };
        Recorder {
            space,
            grid,
            next: 0,
            times: Vec::new(),
            populations: Vec::new(),
            norm_drift: 0.0,
            leakage: 0.0,
        }
    }

    /// Record times strictly inside `(from, to)` not yet taken, plus `from`
    /// itself if due.
    fn due_before(&self, to: f64) -> Vec<f64> {
        self.grid[self.next..].iter().copied().take_while(|&r| r < to).collect()
    }

    fn check(&mut self, amplitudes: &[Complex64]) {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        self.norm_drift = self.norm_drift.max((norm_sqr.sqrt() - 1.0).abs());
        let boundary: f64 = amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.space.is_boundary(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        self.leakage = self.leakage.max(boundary);
    }

    fn record(&mut self, t: f64, amplitudes: &[Complex64]) {
        self.check(amplitudes);
        self.times.push(t);
        self.populations.push(amplitudes.iter().map(|a| a.norm_sqr()).collect());
        self.next += 1;
    }
}

/// Runs a schedule from `initial`. `background` is the hopping Hamiltonian;
/// `pulse` must be given when the schedule uses shaped shifts.
pub fn run_schedule(
    space: &FockSpace,
    initial: &PhononState,
    schedule: &PulseSchedule,
    background: &SparseOperator,
    pulse: Option<&ShapedPulse>,
    config: &PropagatorConfig,
) -> Result<SimulationResult> {
    config.validate()?;
    schedule.validate()?;
    if schedule.mode_count != space.mode_count() {
        return Err(Error::DimensionMismatch {
            expected: space.mode_count(),
            found: schedule.mode_count,
        });
    }
    if initial.dimension() != space.dimension() {
        return Err(Error::DimensionMismatch {
            expected: space.dimension(),
            found: initial.dimension(),
        });
    }
    let pulse = match (schedule.model, pulse) {
        (PulseModel::Ideal, _) => None,
        (PulseModel::Shaped(spec), Some(p)) => {
            if (p.duration() - spec.pulse_duration).abs() > 1e-12 * spec.pulse_duration {
                return Err(Error::config("designed pulse length differs from the schedule's"));
            }
            Some(p)
        }
        (PulseModel::Shaped(_), None) => {
            return Err(Error::config("shaped schedule needs a designed pulse"));
        }
    };
    let free = ConstantPropagator::new(background)?;
    let timeline = schedule.timeline()?;
    let total = timeline.last().map_or(0.0, |e| e.end);
    let mut rec = Recorder::new(space, total, config.record_stride);
    let mut psi = initial.amplitudes.clone();
    let mut stats = IntegrationStats::default();
    let mut t = 0.0;

    for event in &timeline {
        match &event.kind {
            TimedKind::Free => {
                for r in rec.due_before(event.end) {
                    free.apply(&mut psi, r - t)?;
                    t = r;
                    rec.record(r, &psi);
                }
                free.apply(&mut psi, event.end - t)?;
                t = event.end;
            }
            TimedKind::Shift(modes) => match pulse {
                None => apply_parity(space, &mut psi, modes)?,
                Some(p) => {
                    let stops: Vec<f64> = rec.due_before(event.end).into_iter().map(|r| r - event.start).collect();
                    let start = event.start;
                    let mut seen = Vec::new();
                    let s = integrate_drive(space, &mut psi, p, modes, background, config, start, &stops, |tl, y| {
                        seen.push((start + tl, y.to_vec()));
                    })?;
                    for (tr, y) in seen {
                        rec.record(tr, &y);
                    }
                    stats.merge(&s);
                    t = event.end;
                }
            },
        }
        rec.check(&psi);
    }
    while rec.next < rec.grid.len() {
        let r = rec.grid[rec.next];
        rec.record(r.max(t), &psi);
    }
    let final_state = PhononState::from_amplitudes(psi);
    let error_e = error_overlap(initial, &final_state);
    Ok(SimulationResult {
        times: rec.times,
        populations: rec.populations,
        final_state,
        norm_drift: rec.norm_drift,
        boundary_leakage: rec.leakage,
        leakage_exceeded: rec.leakage > config.leakage_limit,
        error_e,
        error_eb: None,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::CouplingMatrix;
    use crate::expm::expm_dense;
    use crate::operator::{hopping_hamiltonian, total_number_operator, HoppingForm};
    use crate::schedule::ShapedSpec;
    use crate::synth::{synthesize, DDSpec};
    use nalgebra::DVector;

    const W0: f64 = 2.0 * PI * 2.2e6;
    const T0: f64 = 2.0 * PI / W0;

    fn two_mode_h(space: &FockSpace, kappa: f64) -> SparseOperator {
        hopping_hamiltonian(space, &CouplingMatrix::from_fn(2, |_, _| kappa), HoppingForm::Rwa).unwrap()
    }

    #[test]
    fn parity_examples() {
        let space = FockSpace::new(2, 3).unwrap();
        let psi = PhononState::fock(&space, &[1, 2]).unwrap();
        let once = apply_ideal_phase(&space, &psi, &ModeSet::new([0])).unwrap();
        assert_eq!(once.inner(&psi).re, -1.0);
        let twice = apply_ideal_phase(&space, &once, &ModeSet::new([0])).unwrap();
        assert_eq!(twice, psi);
        assert!(apply_ideal_phase(&space, &psi, &ModeSet::new([2])).is_err());
    }

    #[test]
    fn conjugation_reverses_hopping() {
        let space = FockSpace::new(2, 4).unwrap();
        let h = two_mode_h(&space, 1.0);
        let psi = PhononState::fock(&space, &[2, 1]).unwrap();
        let p = ModeSet::new([1]);
        let a = apply_ideal_phase(&space, &psi, &p).unwrap();
        let a = evolve_constant(&a, &h, 0.7).unwrap();
        let a = apply_ideal_phase(&space, &a, &p).unwrap();
        let b = evolve_constant(&psi, &h.scale(-1.0), 0.7).unwrap();
        assert!(a.distance(&b) < 1e-13);
    }

    #[test]
    fn error_metrics() {
        let space = FockSpace::new(2, 2).unwrap();
        let a = PhononState::fock(&space, &[1, 0]).unwrap();
        let b = PhononState::fock(&space, &[0, 1]).unwrap();
        assert_eq!(error_overlap(&a, &a), 0.0);
        let mut g = a.clone();
        g.amplitudes
            .iter_mut()
            .for_each(|v| *v *= Complex64::from_polar(1.0, 0.4));
        assert!(error_overlap(&a, &g).abs() < 1e-15);
        assert_eq!(error_overlap(&a, &b), 1.0);
        let target = beam_splitter_target(&space, &a, (1, 0)).unwrap();
        assert!(error_beam_splitter(&space, &a, &target, (1, 0)).unwrap().abs() < 1e-15);
    }

    #[test]
    fn two_mode_ideal_dd_is_exact() {
        let space = FockSpace::new(2, 8).unwrap();
        let h = two_mode_h(&space, 2.0 * PI * 1.9e3);
        let t = PI / (2.0 * 2.0 * PI * 1.9e3);
        let s = synthesize(&DDSpec::new(2, t)).unwrap();
        let psi = PhononState::fock(&space, &[1, 2]).unwrap();
        let r = run_schedule(&space, &psi, &s, &h, None, &PropagatorConfig::new(W0)).unwrap();
        assert!(r.error_e < 1e-12, "{}", r.error_e);
        assert_eq!(r.times.len(), 512);
        assert!(r.norm_drift < 1e-12);
        for row in &r.populations {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rwa_conserves_number() {
        let space = FockSpace::new(3, 6).unwrap();
        let k = CouplingMatrix::from_fn(3, |j, k| 1.0 / ((j - k) as f64).powi(3));
        let h = hopping_hamiltonian(&space, &k, HoppingForm::Rwa).unwrap();
        let psi = PhononState::fock(&space, &[0, 1, 2]).unwrap();
        let n0 = psi.total_number(&space);
        for &t in &[0.3, 1.7, 9.0] {
            let out = evolve_constant(&psi, &h, t).unwrap();
            assert!((out.total_number(&space) - n0).abs() < 1e-10);
        }
    }

    /// Lab-frame reference for a piecewise-constant drive: each step is an
    /// exact exponential of `ω₀N + H_C + (Ω²/4ω₀)(a†+a)²`, and the result is
    /// moved back to the interaction picture.
    #[test]
    fn staircase_matches_exact_steps() {
        let space = FockSpace::new(2, 6).unwrap();
        let w0 = 10.0;
        let h = two_mode_h(&space, 0.3);
        let stairs = Staircase(vec![(0.11, 3.0), (0.07, -2.0)]);
        let mut cfg = PropagatorConfig::new(w0);
        cfg.tolerance = 1e-13;
        let psi = PhononState::fock(&space, &[1, 2]).unwrap();
        let start = 0.05;
        let (out, _) = evolve_shaped(&space, &psi, &stairs, &ModeSet::new([1]), &h, &cfg, start).unwrap();

        let n = total_number_operator(&space).to_dense();
        let h0 = n.map(|v| v * w0);
        let phase = |t: f64| expm_dense(&(&h0 * Complex64::new(0.0, t)));
        let mut lab = phase(-start) * DVector::from_vec(psi.amplitudes.clone());
        for &(d, om) in &stairs.0 {
            let drive = crate::operator::modulation_hamiltonian(&space, 1, om, w0)
                .unwrap()
                .to_dense();
            let hl = &h0 + h.to_dense() + drive;
            lab = expm_dense(&(hl * Complex64::new(0.0, -d))) * lab;
        }
        let back = phase(start + stairs.duration()) * lab;
        let dist: f64 = out
            .amplitudes
            .iter()
            .zip(back.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-8, "{dist}");
    }

    #[test]
    fn zero_drive_reduces_to_free_evolution() {
        let space = FockSpace::new(2, 5).unwrap();
        let h = two_mode_h(&space, 1e4);
        let stairs = Staircase(vec![(3e-6, 0.0)]);
        let psi = PhononState::fock(&space, &[2, 1]).unwrap();
        let (a, _) = evolve_shaped(
            &space,
            &psi,
            &stairs,
            &ModeSet::new([0]),
            &h,
            &PropagatorConfig::new(W0),
            0.0,
        )
        .unwrap();
        let b = evolve_constant(&psi, &h, 3e-6).unwrap();
        assert!(a.distance(&b) < 1e-10);
    }

    #[test]
    fn pi_pulse_eigenphases() {
        let space = FockSpace::new(1, 12).unwrap();
        let pulse = ShapedPulse::pi_pulse(8.8 * T0, 4.4 * T0, W0).unwrap();
        let h = SparseOperator::zero(space.dimension());
        let cfg = PropagatorConfig::new(W0);
        for n in 0..=4 {
            let psi = PhononState::fock(&space, &[n]).unwrap();
            let (out, _) = evolve_shaped(&space, &psi, &pulse, &ModeSet::new([0]), &h, &cfg, 0.0).unwrap();
            let expected = Complex64::from_polar(1.0, -PI * (n as f64 + 0.5));
            // Phase-sensitive infidelity against e^{-iπ(n+1/2)}|n>.
            let fid = (psi.inner(&out) * expected.conj()).re;
            assert!(1.0 - fid < 1e-3, "n={n} {fid}");
        }
    }

    #[test]
    fn shaped_schedule_requires_pulse() {
        let space = FockSpace::new(2, 3).unwrap();
        let h = two_mode_h(&space, 1e4);
        let mut s = synthesize(&DDSpec::new(2, 1e-3)).unwrap();
        s.model = PulseModel::Shaped(ShapedSpec::pi(4e-6, 2e-6));
        let psi = PhononState::fock(&space, &[1, 0]).unwrap();
        assert!(run_schedule(&space, &psi, &s, &h, None, &PropagatorConfig::new(W0)).is_err());
    }

    #[test]
    fn config_limits() {
        let mut c = PropagatorConfig::new(W0);
        assert!(c.validate().is_ok());
        c.max_step = Some(c.step_limit() * 2.0);
        assert!(c.validate().is_err());
        c.max_step = None;
        c.tolerance = 0.0;
        assert!(c.validate().is_err());
    }
}
