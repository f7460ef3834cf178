//! Trap-modulation phase pulse built from an exact solution of the
//! time-dependent harmonic oscillator.
//!
//! A positive function `b(t)` with `b = 1` outside `[0, T_P]` fixes the trap
//! frequency through the Ermakov equation `b̈ + ω²(t) b = ω₀²/b³`. A
//! Fock state `|n>` then picks up the phase `(n + 1/2) φ` relative to free
//! evolution, with `φ = ω₀ (∫ dt/b² − T_P)`. Choosing `φ = π` gives the parity
//! operator up to a global phase.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::roots::bracketed_root;
use crate::trap::{dc_amplitude_for, rf_amplitude_for, TrapParams};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Shape of `b(t)`: erf ramps of width `T_ud` into and out of a plateau at
/// `1 − k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BFunctionParams {
    /// `T_P` in seconds.
    pub pulse_duration: f64,
    /// `T_ud`, shared by the up and down ramps.
    pub ramp_time: f64,
    /// `σ`, steepness of the erf ramps.
    pub erf_width: f64,
    /// `k`, plateau depth.
    pub strength: f64,
}

impl BFunctionParams {
    pub const DEFAULT_ERF_WIDTH: f64 = 6.0;

    pub fn new(pulse_duration: f64, ramp_time: f64, erf_width: f64, strength: f64) -> Result<Self> {
        let p = BFunctionParams {
            pulse_duration,
            ramp_time,
            erf_width,
            strength,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pulse_duration > 0.0) || !self.pulse_duration.is_finite() {
            return Err(Error::domain("pulse duration must be positive"));
        }
        if !(self.ramp_time > 0.0) || !self.ramp_time.is_finite() {
            return Err(Error::domain("ramp time must be positive"));
        }
        if !(self.erf_width > 0.0) {
            return Err(Error::domain("erf width must be positive"));
        }
        if !(0.0..1.0).contains(&self.strength) {
            return Err(Error::domain(format!("strength {} outside [0, 1)", self.strength)));
        }
        Ok(())
    }

    pub fn with_strength(&self, strength: f64) -> Self {
        BFunctionParams { strength, ..*self }
    }
}

/// `b` and its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BValue {
    pub b: f64,
    pub db: f64,
    pub ddb: f64,
}

/// Evaluates the erf-difference form of `b(t)` for `t` in `[0, T_P]`.
pub fn b_value(params: &BFunctionParams, t: f64) -> Result<BValue> {
    let tp = params.pulse_duration;
    let slack = 1e-12 * tp;
    if !(t >= -slack && t <= tp + slack) {
        return Err(Error::InvalidPulse {
            t,
            reason: format!("outside the pulse window [0, {tp:.6e}]"),
        });
    }
    Ok(b_unchecked(params, t))
}

fn b_unchecked(params: &BFunctionParams, t: f64) -> BValue {
    let BFunctionParams {
        pulse_duration: tp,
        ramp_time: tud,
        erf_width: sigma,
        strength: k,
    } = *params;
    let u = (t / tud - 0.5) * sigma;
    let v = ((t - (tp - tud)) / tud - 0.5) * sigma;
    let c = sigma / tud;
    let (gu, gv) = ((-u * u).exp(), (-v * v).exp());
    BValue {
        b: 1.0 - 0.5 * k * (libm::erf(u) - libm::erf(v)),
        db: -0.5 * k * FRAC_2_SQRT_PI * c * (gu - gv),
        ddb: -0.5 * k * FRAC_2_SQRT_PI * c * c * (-2.0 * u * gu + 2.0 * v * gv),
    }
}

/// `ω(t) = sqrt((ω₀²/b³ − b̈)/b)` and `Ω²(t) = ω² − ω₀²`.
pub fn omega_of_t(value: &BValue, secular_frequency: f64, t: f64) -> Result<(f64, f64)> {
    let w0sq = secular_frequency * secular_frequency;
    let b = value.b;
    if !(b > 0.0) {
        return Err(Error::InvalidPulse {
            t,
            reason: format!("b = {b:.6e} is not positive"),
        });
    }
    let radicand = (w0sq / (b * b * b) - value.ddb) / b;
    if radicand < 0.0 {
        return Err(Error::InvalidPulse {
            t,
            reason: format!("negative ω² = {radicand:.6e} rad²/s²"),
        });
    }
    Ok((radicand.sqrt(), radicand - w0sq))
}

/// `Ω²(t)` at a time inside the pulse, without validity checks.
pub fn omega_sq_excess(params: &BFunctionParams, secular_frequency: f64, t: f64) -> f64 {
    let v = b_unchecked(params, t);
    let w0sq = secular_frequency * secular_frequency;
    (w0sq / (v.b * v.b * v.b) - v.ddb) / v.b - w0sq
}

/// Accumulated phase `ω₀ (∫₀^{T_P} dt/b² − T_P)`, to 10⁻¹⁰ rad.
pub fn phase_integral(params: &BFunctionParams, secular_frequency: f64) -> Result<f64> {
    params.validate()?;
    if params.strength == 0.0 {
        return Ok(0.0);
    }
    let q = quadrature::integrate(
        |t| {
            let b = b_unchecked(params, t).b;
            secular_frequency * (1.0 / (b * b) - 1.0)
        },
        0.0,
        params.pulse_duration,
        1e-10,
        1e-13,
    )?;
    Ok(q.value)
}

/// Smallest `ω²(t)/ω₀²` over a uniform grid of the pulse.
pub fn min_radicand_ratio(params: &BFunctionParams, secular_frequency: f64, samples: usize) -> f64 {
    let w0sq = secular_frequency * secular_frequency;
    (0..=samples)
        .map(|i| {
            let t = params.pulse_duration * i as f64 / samples as f64;
            let v = b_unchecked(params, t);
            if v.b <= 0.0 {
                return f64::NEG_INFINITY;
            }
            (w0sq / (v.b * v.b * v.b) - v.ddb) / v.b / w0sq
        })
        .fold(f64::INFINITY, f64::min)
}

const VALIDITY_GRID: usize = 4000;

/// Largest strength for which `ω²(t)` stays non-negative over the pulse,
/// found by scanning upward and refining the first failure by bisection.
/// Upper end of the strength scan; the plateau `b = 1 − k` stays above `10⁻³`.
const MAX_STRENGTH: f64 = 0.999;

pub fn max_valid_strength(base: &BFunctionParams, secular_frequency: f64) -> f64 {
    let valid = |k: f64| min_radicand_ratio(&base.with_strength(k), secular_frequency, VALIDITY_GRID) >= 0.0;
    let step = 1e-3;
    let mut lo = 0.0;
    let mut hi = None;
    let mut k = step;
    while k < MAX_STRENGTH {
        if valid(k) {
            lo = k;
        } else {
            hi = Some(k);
            break;
        }
        k += step;
    }
    let Some(mut hi) = hi else {
        return lo.max(MAX_STRENGTH);
    };
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if valid(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Strength `k` giving the target phase for the given pulse timing.
pub fn solve_strength(
    pulse_duration: f64,
    ramp_time: f64,
    erf_width: f64,
    secular_frequency: f64,
    target_phase: f64,
) -> Result<f64> {
    let base = BFunctionParams::new(pulse_duration, ramp_time, erf_width, 0.0)?;
    if !(secular_frequency > 0.0) {
        return Err(Error::domain("secular frequency must be positive"));
    }
    if target_phase == 0.0 {
        return Ok(0.0);
    }
    if target_phase < 0.0 {
        return Err(Error::InfeasiblePulse("b < 1 only produces positive phases".into()));
    }
    let k_max = max_valid_strength(&base, secular_frequency);
    let phi_max = phase_integral(&base.with_strength(k_max), secular_frequency)?;
    if phi_max < target_phase {
        return Err(Error::InfeasiblePulse(format!(
            "largest valid strength k = {k_max:.4} reaches only φ = {phi_max:.4} rad < {target_phase:.4} rad; use a longer pulse"
        )));
    }
    let root = bracketed_root(
        |k| Ok(phase_integral(&base.with_strength(k), secular_frequency)? - target_phase),
        0.0,
        k_max,
        1e-15,
        1e-9,
    )?;
    let k = root.x;
    if min_radicand_ratio(&base.with_strength(k), secular_frequency, VALIDITY_GRID) < 0.0 {
        return Err(Error::InfeasiblePulse(format!("ω² turns negative at k = {k}")));
    }
    Ok(k)
}

/// One sample of a designed pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSample {
    pub t: f64,
    pub b: f64,
    pub db: f64,
    pub ddb: f64,
    pub omega: f64,
    pub omega_sq_excess: f64,
}

/// A validated, sampled pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedPulse {
    pub params: BFunctionParams,
    pub secular_frequency: f64,
    pub achieved_phase: f64,
    pub samples: Vec<PulseSample>,
}

impl ShapedPulse {
    /// Default spacing of exported samples.
    pub const SAMPLE_SPACING: f64 = 1e-9;

    pub fn new(params: BFunctionParams, secular_frequency: f64) -> Result<Self> {
        Self::with_spacing(params, secular_frequency, Self::SAMPLE_SPACING)
    }

    pub fn with_spacing(params: BFunctionParams, secular_frequency: f64, spacing: f64) -> Result<Self> {
        params.validate()?;
        if !(spacing > 0.0) {
            return Err(Error::domain("sample spacing must be positive"));
        }
        let count = (params.pulse_duration / spacing).ceil().max(1.0) as usize;
        let mut samples = Vec::with_capacity(count + 1);
        for i in 0..=count {
            let t = params.pulse_duration * i as f64 / count as f64;
            let v = b_value(&params, t)?;
            let (omega, excess) = omega_of_t(&v, secular_frequency, t)?;
            samples.push(PulseSample {
                t,
                b: v.b,
                db: v.db,
                ddb: v.ddb,
                omega,
                omega_sq_excess: excess,
            });
        }
        let achieved_phase = phase_integral(&params, secular_frequency)?;
        Ok(ShapedPulse {
            params,
            secular_frequency,
            achieved_phase,
            samples,
        })
    }

    /// Solves for the strength and samples the resulting pulse.
    pub fn design(
        pulse_duration: f64,
        ramp_time: f64,
        erf_width: f64,
        secular_frequency: f64,
        target_phase: f64,
    ) -> Result<Self> {
        let k = solve_strength(pulse_duration, ramp_time, erf_width, secular_frequency, target_phase)?;
        Self::new(
            BFunctionParams::new(pulse_duration, ramp_time, erf_width, k)?,
            secular_frequency,
        )
    }

    /// π pulse with σ = 6.
    pub fn pi_pulse(pulse_duration: f64, ramp_time: f64, secular_frequency: f64) -> Result<Self> {
        Self::design(
            pulse_duration,
            ramp_time,
            BFunctionParams::DEFAULT_ERF_WIDTH,
            secular_frequency,
            PI,
        )
    }

    pub fn duration(&self) -> f64 {
        self.params.pulse_duration
    }

    /// Analytic `Ω²` at local pulse time `t`.
    pub fn omega_sq_excess(&self, t: f64) -> f64 {
        omega_sq_excess(&self.params, self.secular_frequency, t)
    }

    /// Largest deviation of `b` from 1 at the pulse edges.
    pub fn boundary_mismatch(&self) -> f64 {
        let first = self.samples.first().map_or(0.0, |s| (s.b - 1.0).abs());
        let last = self.samples.last().map_or(0.0, |s| (s.b - 1.0).abs());
        first.max(last)
    }

    /// Frequency excursion at the middle of the pulse, `ω(T_P/2) − ω₀`.
    pub fn plateau_excursion(&self) -> f64 {
        let v = b_unchecked(&self.params, 0.5 * self.params.pulse_duration);
        omega_of_t(&v, self.secular_frequency, 0.5 * self.params.pulse_duration)
            .map(|(w, _)| w - self.secular_frequency)
            .unwrap_or(f64::NAN)
    }

    /// Largest `|b̈ + ω² b − ω₀²/b³|` relative to `ω₀²/b³` over the samples.
    pub fn ermakov_residual(&self) -> f64 {
        let w0sq = self.secular_frequency * self.secular_frequency;
        self.samples
            .iter()
            .map(|s| {
                let target = w0sq / s.b.powi(3);
                (s.ddb + s.omega * s.omega * s.b - target).abs() / target
            })
            .fold(0.0, f64::max)
    }

    /// Writes `t_s,b,omega_rad_s,omega_sq_excess` and, with a trap, the DC
    /// amplitude at fixed RF (`U0_V`) and the RF amplitude at fixed DC
    /// (`V0_V`) that realise `ω(t)`.
    pub fn write_csv(&self, trap: Option<&TrapParams>, mut out: impl Write) -> Result<()> {
        let voltages = match trap {
            Some(trap) => {
                let omegas: Vec<f64> = self.samples.iter().map(|s| s.omega).collect();
                Some((dc_amplitude_for(trap, &omegas)?, rf_amplitude_for(trap, &omegas)?))
            }
            None => None,
        };
        if voltages.is_some() {
            writeln!(out, "t_s,b,omega_rad_s,omega_sq_excess,U0_V,V0_V")?;
        } else {
            writeln!(out, "t_s,b,omega_rad_s,omega_sq_excess")?;
        }
        for (i, s) in self.samples.iter().enumerate() {
            write!(
                out,
                "{:.9e},{:.15e},{:.15e},{:.15e}",
                s.t, s.b, s.omega, s.omega_sq_excess
            )?;
            if let Some((dc, rf)) = &voltages {
                write!(out, ",{:.12e},{:.12e}", dc.values[i], rf.values[i])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
