//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes plain numbers and strings and returns a JSON string,
//! or throws the error message.

use std::f64::consts::PI;

use phonon_dd::chain::{build_coupling_matrix, IonChainConfig};
use phonon_dd::dwell::{signed_dwell_check, PairIntent};
use phonon_dd::fock::parse_occupations;
use phonon_dd::pulse::ShapedPulse;
use phonon_dd::scenario::{run_at_cutoff, ScenarioConfig};
use phonon_dd::schedule::{PulseModel, PulseSchedule, ScheduleEvent, TimedKind};
use phonon_dd::synth::{synthesize, DDSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Points sent to the page per curve.
const PLOT_POINTS: usize = 400;

#[derive(Serialize)]
pub struct PulseProfile {
    pub strength: f64,
    pub phase: f64,
    pub excursion_khz: f64,
    pub t_us: Vec<f64>,
    pub b: Vec<f64>,
    pub omega_mhz: Vec<f64>,
}

pub fn pulse_profile_data(
    tp_us: f64,
    tud_us: f64,
    sigma: f64,
    omega0_mhz: f64,
    target_phase: f64,
) -> Result<PulseProfile, String> {
    let w0 = 2.0 * PI * omega0_mhz * 1e6;
    let p = ShapedPulse::design(tp_us * 1e-6, tud_us * 1e-6, sigma, w0, target_phase).map_err(|e| e.to_string())?;
    let stride = (p.samples.len() / PLOT_POINTS).max(1);
    let picked: Vec<_> = p.samples.iter().step_by(stride).collect();
    Ok(PulseProfile {
        strength: p.params.strength,
        phase: p.achieved_phase,
        excursion_khz: p.plateau_excursion() / (2.0 * PI) / 1e3,
        t_us: picked.iter().map(|s| s.t * 1e6).collect(),
        b: picked.iter().map(|s| s.b).collect(),
        omega_mhz: picked.iter().map(|s| s.omega / (2.0 * PI) / 1e6).collect(),
    })
}

#[derive(Serialize)]
pub struct Flip {
    pub t: f64,
    pub modes: Vec<usize>,
}

#[derive(Serialize)]
pub struct Dwell {
    pub j: usize,
    pub k: usize,
    pub integral: f64,
    pub intent: &'static str,
    pub ok: bool,
}

#[derive(Serialize)]
pub struct ScheduleView {
    pub text: String,
    /// Flip times as fractions of the cycle.
    pub flips: Vec<Flip>,
    pub pulse_counts: Vec<usize>,
    pub dwell: Vec<Dwell>,
    pub passed: bool,
}

fn mode_list(text: &str) -> Result<Vec<usize>, String> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|_| format!("`{s}` is not a mode number")))
        .collect()
}

pub fn dd_schedule_data(
    modes: usize,
    repetitions: usize,
    protected: &str,
    swaps: &str,
) -> Result<ScheduleView, String> {
    let protected = mode_list(protected)?;
    let mut spec = DDSpec::new(modes, 1.0)
        .with_repetitions(repetitions)
        .with_protected(protected.iter().copied());
    if !swaps.trim().is_empty() {
        spec = spec.with_role_swap(
            swaps
                .split(',')
                .map(|s| s.trim() == "1" || s.trim() == "true")
                .collect(),
        );
    }
    let schedule = synthesize(&spec).map_err(|e| e.to_string())?;
    let flips = schedule
        .timeline()
        .map_err(|e| e.to_string())?
        .into_iter()
        .filter_map(|e| match e.kind {
            TimedKind::Shift(m) => Some(Flip {
                t: e.end,
                modes: m.modes().to_vec(),
            }),
            TimedKind::Free => None,
        })
        .collect();
    let chain = IonChainConfig::equidistant(modes, 1e-5, 2.0 * PI * 2.2e6).map_err(|e| e.to_string())?;
    let couplings = build_coupling_matrix(&chain).map_err(|e| e.to_string())?;
    let report = signed_dwell_check(&schedule, &couplings, &protected);
    Ok(ScheduleView {
        text: schedule.to_text(),
        flips,
        pulse_counts: report.pulse_counts.clone(),
        dwell: report
            .pairs
            .iter()
            .map(|p| Dwell {
                j: p.j,
                k: p.k,
                integral: p.integral,
                intent: match p.intent {
                    PairIntent::Decouple => "decouple",
                    PairIntent::Keep => "keep",
                    PairIntent::Ignore => "ignore",
                },
                ok: p.ok,
            })
            .collect(),
        passed: report.passed(),
    })
}

#[derive(Serialize)]
pub struct Populations {
    pub error: f64,
    pub total_time_us: f64,
    pub t_us: Vec<f64>,
    pub labels: Vec<String>,
    /// `series[i][r]`: population of `labels[i]` at `t_us[r]`.
    pub series: Vec<Vec<f64>>,
    pub events: usize,
}

pub fn ideal_dd_populations_data(
    modes: usize,
    spacing_um: f64,
    initial: &str,
    repetitions: usize,
    decouple: bool,
) -> Result<Populations, String> {
    let err = |e: phonon_dd::Error| e.to_string();
    let occupations = parse_occupations(initial).map_err(err)?;
    if occupations.len() != modes {
        return Err(format!(
            "initial state has {} modes, expected {modes}",
            occupations.len()
        ));
    }
    let total: usize = occupations.iter().sum();
    if total > 6 || modes > 4 {
        return Err("keep to at most 4 modes and 6 phonons in the browser".into());
    }
    let mut config = ScenarioConfig::new("browser", modes, spacing_um * 1e-6);
    config.initial = occupations;
    config.repetitions = repetitions;
    config.cutoff = total.max(1);
    config.max_cutoff = config.cutoff;
    config.converge = false;
    config.validate().map_err(err)?;
    let schedule = if decouple {
        config.schedule().map_err(err)?
    } else {
        let t = config.decoupling_time().map_err(err)?;
        PulseSchedule::new(modes, t, PulseModel::Ideal, vec![ScheduleEvent::Evolve(t)])
    };
    let (space, result) = run_at_cutoff(&config, &schedule, None, config.cutoff).map_err(err)?;
    let start = space.index(&config.initial).map_err(err)?;
    let cols: Vec<usize> = (0..space.dimension())
        .filter(|&i| i == start || result.populations.iter().any(|row| row[i] > 1e-4))
        .collect();
    let stride = (result.times.len() / PLOT_POINTS).max(1);
    let rows: Vec<usize> = (0..result.times.len()).step_by(stride).collect();
    Ok(Populations {
        error: result.error_e,
        total_time_us: schedule.total_time * 1e6,
        t_us: rows.iter().map(|&r| result.times[r] * 1e6).collect(),
        labels: cols.iter().map(|&i| space.label(i)).collect(),
        series: cols
            .iter()
            .map(|&i| rows.iter().map(|&r| result.populations[r][i]).collect())
            .collect(),
        events: schedule.events.len(),
    })
}

fn to_json<T: Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

/// Designs a pulse and returns its `b(t)` and `ω(t)/2π` curves.
#[wasm_bindgen]
pub fn pulse_profile(
    tp_us: f64,
    tud_us: f64,
    sigma: f64,
    omega0_mhz: f64,
    target_phase: f64,
) -> Result<String, JsError> {
    to_json(pulse_profile_data(tp_us, tud_us, sigma, omega0_mhz, target_phase))
}

/// Synthesises a cycle (time in units of the cycle) and its signed-dwell check.
#[wasm_bindgen]
pub fn dd_schedule(modes: usize, repetitions: usize, protected: &str, swaps: &str) -> Result<String, JsError> {
    to_json(dd_schedule_data(modes, repetitions, protected, swaps))
}

/// Populations under ideal decoupling, or bare hopping when `decouple` is false.
#[wasm_bindgen]
pub fn ideal_dd_populations(
    modes: usize,
    spacing_um: f64,
    initial: &str,
    repetitions: usize,
    decouple: bool,
) -> Result<String, JsError> {
    to_json(ideal_dd_populations_data(
        modes,
        spacing_um,
        initial,
        repetitions,
        decouple,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_pulse_profile() {
        let p = pulse_profile_data(4.0, 2.0, 6.0, 2.2, PI).unwrap();
        assert!((p.strength - 0.0529).abs() < 1e-3);
        assert!(p.t_us.len() <= PLOT_POINTS + 1 && p.t_us.len() == p.omega_mhz.len());
        assert!((p.omega_mhz[0] - 2.2).abs() < 1e-3);
        assert!(pulse_profile_data(0.1, 0.05, 6.0, 2.2, PI).is_err());
    }

    #[test]
    fn three_mode_schedule_view() {
        let v = dd_schedule_data(3, 1, "", "0,1").unwrap();
        assert!(v.passed);
        assert_eq!(v.pulse_counts, vec![0, 4, 2]);
        assert_eq!(v.dwell.len(), 3);
        assert!(v.flips.iter().all(|f| f.t > 0.0 && f.t <= 1.0 + 1e-12));
        let p = dd_schedule_data(3, 2, "0,1", "").unwrap();
        assert!(p.dwell.iter().any(|d| d.intent == "keep"));
        assert!(dd_schedule_data(3, 1, "x", "").is_err());
    }

    #[test]
    fn decoupling_freezes_populations() {
        let on = ideal_dd_populations_data(3, 43.8, "210", 5, true).unwrap();
        let off = ideal_dd_populations_data(3, 43.8, "210", 1, false).unwrap();
        assert!(on.error < 1e-5);
        assert!(off.error > 0.1);
        assert!(off.labels.len() > on.labels.len());
        assert_eq!(on.series.len(), on.labels.len());
        assert!(on.labels.contains(&"210".to_string()));
        assert!(serde_json::to_string(&on).unwrap().contains("\"labels\""));
        assert!(ideal_dd_populations_data(2, 43.8, "210", 1, true).is_err());
    }
}
