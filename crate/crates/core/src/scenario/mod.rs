//! Built-in experiments, scenario runs and result tables.

mod catalog;
mod config_file;
mod report;
mod sweep;

use std::io::Write;
use std::time::{Duration, Instant};

use crate::chain::{build_coupling_matrix, fifty_fifty_time, IonChainConfig, Truncation};
use crate::constants::CA40_MASS;
use crate::error::{Error, Result};
use crate::fock::{FockSpace, PhononState};
use crate::operator::{hopping_hamiltonian, HoppingForm};
use crate::propagator::{error_beam_splitter, run_schedule, PropagatorConfig, SimulationResult};
use crate::pulse::ShapedPulse;
use crate::schedule::{PulseModel, PulseSchedule, ShapedSpec};
use crate::synth::{synthesize, DDSpec};

pub use catalog::{catalog, find_scenario, SECULAR_FREQUENCY, T0};
pub use config_file::{parse_config, to_config_text};
pub use report::{emit_report, reference_values, Reference, Report, ReportRow, Tolerance, Verdict, REFERENCE_CSV};
pub use sweep::{sweep, SweepAxis, SweepRow};

/// Peak population a basis state needs to get its own CSV column.
pub const COLUMN_THRESHOLD: f64 = 1e-4;

/// Relative change in the error below which a larger cutoff is not tried.
pub const CONVERGENCE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub mode_count: usize,
    /// Ion spacing, m.
    pub spacing: f64,
    /// `ω₀`, rad/s.
    pub secular_frequency: f64,
    pub ion_mass: f64,
    pub truncation: Truncation,
    /// Initial occupations in mode order.
    pub initial: Vec<usize>,
    pub repetitions: usize,
    pub protected: Vec<usize>,
    pub role_swap: Option<Vec<bool>>,
    /// `None` runs ideal shifts.
    pub pulse: Option<ShapedSpec>,
    /// Decoupling time; `None` uses the 50:50 time of the nearest pair.
    pub total_time: Option<f64>,
    /// First Fock cutoff tried.
    pub cutoff: usize,
    /// Largest cutoff the convergence loop may reach.
    pub max_cutoff: usize,
    pub converge: bool,
    pub tolerance: f64,
    pub record_stride: Option<f64>,
    /// Pair `(j, k)` whose 50:50 splitter is the target; `None` measures `⟨E⟩`.
    pub beam_splitter: Option<(usize, usize)>,
    /// Write every basis state, not only the populated ones.
    pub full_dump: bool,
}

impl ScenarioConfig {
    /// Ideal-shift defaults for `m` equidistant ⁴⁰Ca⁺ ions.
    pub fn new(name: impl Into<String>, mode_count: usize, spacing: f64) -> Self {
        ScenarioConfig {
            name: name.into(),
            description: String::new(),
            mode_count,
            spacing,
            secular_frequency: SECULAR_FREQUENCY,
            ion_mass: CA40_MASS,
            truncation: Truncation::None,
            initial: vec![0; mode_count],
            repetitions: 1,
            protected: Vec::new(),
            role_swap: None,
            pulse: None,
            total_time: None,
            cutoff: 8,
            max_cutoff: if mode_count <= 2 { 18 } else { 10 },
            converge: true,
            tolerance: 1e-12,
            record_stride: None,
            beam_splitter: None,
            full_dump: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(|c: char| c.is_whitespace() || c == ',') {
            return Err(Error::config(format!("bad scenario name `{}`", self.name)));
        }
        if self.initial.len() != self.mode_count {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count,
                found: self.initial.len(),
            });
        }
        if self.cutoff == 0 || self.max_cutoff < self.cutoff {
            return Err(Error::config("need 1 ≤ cutoff ≤ max_cutoff"));
        }
        if let Some(&n) = self.initial.iter().find(|&&n| n > self.cutoff) {
            return Err(Error::config(format!(
                "initial occupation {n} exceeds the cutoff {}",
                self.cutoff
            )));
        }
        if let Some((j, k)) = self.beam_splitter {
            for m in [j, k] {
                if m >= self.mode_count {
                    return Err(Error::ModeOutOfRange {
                        mode: m,
                        modes: self.mode_count,
                    });
                }
            }
            if j == k {
                return Err(Error::config("beam-splitter pair needs two modes"));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("tolerance must be positive"));
        }
        if let Some(t) = self.total_time {
            if !(t > 0.0) {
                return Err(Error::config("total time must be positive"));
            }
        }
        self.dd_spec()?.validate()?;
        self.chain()?;
        Ok(())
    }

    pub fn chain(&self) -> Result<IonChainConfig> {
        IonChainConfig::equidistant_with_mass(self.mode_count, self.spacing, self.ion_mass, self.secular_frequency)?
            .with_truncation(self.truncation)
    }

    /// Nearest-neighbour hopping rate `κ`, rad/s.
    pub fn coupling_rate(&self) -> Result<f64> {
        Ok(build_coupling_matrix(&self.chain()?)?.nearest_neighbour())
    }

    pub fn decoupling_time(&self) -> Result<f64> {
        match self.total_time {
            Some(t) => Ok(t),
            None => Ok(fifty_fifty_time(self.coupling_rate()?)),
        }
    }

    pub fn model(&self) -> PulseModel {
        match self.pulse {
            Some(spec) => PulseModel::Shaped(spec),
            None => PulseModel::Ideal,
        }
    }

    pub fn dd_spec(&self) -> Result<DDSpec> {
        let total = match self.total_time {
            Some(t) => t,
            None => fifty_fifty_time(self.coupling_rate()?),
        };
        let mut spec = DDSpec::new(self.mode_count, total)
            .with_repetitions(self.repetitions)
            .with_protected(self.protected.iter().copied())
            .with_truncation(self.truncation)
            .with_model(self.model());
        if let Some(swaps) = &self.role_swap {
            spec = spec.with_role_swap(swaps.clone());
        }
        Ok(spec)
    }

    pub fn schedule(&self) -> Result<PulseSchedule> {
        synthesize(&self.dd_spec()?)
    }

    pub fn design_pulse(&self) -> Result<Option<ShapedPulse>> {
        self.pulse
            .map(|s| {
                ShapedPulse::design(
                    s.pulse_duration,
                    s.ramp_time,
                    s.erf_width,
                    self.secular_frequency,
                    s.target_phase,
                )
            })
            .transpose()
    }

    /// `⟨E_B⟩` for beam-splitter scenarios, `⟨E⟩` otherwise.
    pub fn metric(&self) -> Metric {
        if self.beam_splitter.is_some() {
            Metric::BeamSplitter
        } else {
            Metric::Overlap
        }
    }

    /// States that always get a CSV column, in mode order.
    pub fn named_states(&self) -> Vec<Vec<usize>> {
        let mut named = vec![self.initial.clone()];
        if let Some((j, k)) = self.beam_splitter {
            let total = self.initial[j] + self.initial[k];
            for n in [0, total] {
                let mut occ = self.initial.clone();
                occ[j] = n;
                occ[k] = total - n;
                named.push(occ);
            }
        }
        named
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    /// `⟨E⟩ = 1 − |<ψ₀|ψ>|`.
    Overlap,
    /// `⟨E_B⟩` against the ideal 50:50 splitter.
    BeamSplitter,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Overlap => "E",
            Metric::BeamSplitter => "EB",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "E" => Ok(Metric::Overlap),
            "EB" => Ok(Metric::BeamSplitter),
            other => Err(Error::config(format!("unknown metric `{other}`"))),
        }
    }
}

/// Summary of one scenario run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRecord {
    pub scenario: String,
    /// `key = value` echo of the configuration.
    pub parameters: Vec<(String, String)>,
    pub error_e: f64,
    pub error_eb: Option<f64>,
    pub norm_drift: f64,
    pub boundary_leakage: f64,
    pub leakage_exceeded: bool,
    /// Cutoff of the reported run.
    pub cutoff: usize,
    /// Error at each cutoff tried.
    pub cutoff_history: Vec<(usize, f64)>,
    pub converged: bool,
    pub pulse_strength: Option<f64>,
    pub wall_time: Duration,
}

impl ResultRecord {
    pub fn metric(&self) -> Metric {
        if self.error_eb.is_some() {
            Metric::BeamSplitter
        } else {
            Metric::Overlap
        }
    }

    pub fn value(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Overlap => Some(self.error_e),
            Metric::BeamSplitter => self.error_eb,
        }
    }

    /// The error the scenario is judged by.
    pub fn headline(&self) -> f64 {
        self.error_eb.unwrap_or(self.error_e)
    }

    pub const CSV_HEADER: &'static str =
        "scenario,metric,error,error_E,cutoff,converged,norm_drift,boundary_leakage,leakage_flag";

    /// Deterministic CSV row; wall time is left out.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:.6e},{:.6e},{},{},{:.3e},{:.3e},{}",
            self.scenario,
            self.metric().as_str(),
            self.headline(),
            self.error_e,
            self.cutoff,
            self.converged,
            self.norm_drift,
            self.boundary_leakage,
            self.leakage_exceeded
        )
    }
}

pub fn write_results_csv(records: &[ResultRecord], mut out: impl Write) -> Result<()> {
    writeln!(out, "{}", ResultRecord::CSV_HEADER)?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// A finished run with everything needed to write its outputs.
#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub config: ScenarioConfig,
    pub record: ResultRecord,
    pub result: SimulationResult,
    pub space: FockSpace,
    pub schedule: PulseSchedule,
    pub pulse: Option<ShapedPulse>,
}

impl ScenarioRun {
    /// Final population of a basis state given in mode order.
    pub fn final_population(&self, occupations: &[usize]) -> Result<f64> {
        let i = self.space.index(occupations)?;
        Ok(self.result.final_state.amplitudes[i].norm_sqr())
    }

    /// Basis indices that get a column, ascending.
    pub fn columns(&self) -> Vec<usize> {
        let dim = self.space.dimension();
        if self.config.full_dump {
            return (0..dim).collect();
        }
        let mut peak = vec![0.0f64; dim];
        for row in &self.result.populations {
            for (p, &x) in peak.iter_mut().zip(row) {
                *p = p.max(x);
            }
        }
        let named: Vec<usize> = self
            .config
            .named_states()
            .iter()
            .filter_map(|occ| self.space.index(occ).ok())
            .collect();
        (0..dim)
            .filter(|i| peak[*i] > COLUMN_THRESHOLD || named.contains(i))
            .collect()
    }

    /// `t_us`, one column per kept basis state, and `rest` holding the
    /// population of the states left out.
    pub fn write_populations_csv(&self, mut out: impl Write) -> Result<()> {
        let cols = self.columns();
        let mut header = String::from("t_us");
        for &i in &cols {
            header.push(',');
            header.push_str(&self.space.label(i));
        }
        header.push_str(",rest");
        writeln!(out, "{header}")?;
        for (t, row) in self.result.times.iter().zip(&self.result.populations) {
            let mut line = format!("{:.6}", t * 1e6);
            let mut shown = 0.0;
            for &i in &cols {
                shown += row[i];
                line.push_str(&format!(",{:.12e}", row[i]));
            }
            let total: f64 = row.iter().sum();
            line.push_str(&format!(",{:.12e}", (total - shown).max(0.0)));
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

/// Runs at one cutoff with a designed pulse.
pub fn run_at_cutoff(
    config: &ScenarioConfig,
    schedule: &PulseSchedule,
    pulse: Option<&ShapedPulse>,
    cutoff: usize,
) -> Result<(FockSpace, SimulationResult)> {
    let space = FockSpace::new(config.mode_count, cutoff)?;
    let couplings = build_coupling_matrix(&config.chain()?)?;
    let background = hopping_hamiltonian(&space, &couplings, HoppingForm::Rwa)?;
    let initial = PhononState::fock(&space, &config.initial)?;
    let mut prop = PropagatorConfig::new(config.secular_frequency);
    prop.tolerance = config.tolerance;
    prop.record_stride = config.record_stride;
    let mut result = run_schedule(&space, &initial, schedule, &background, pulse, &prop)?;
    if let Some(pair) = config.beam_splitter {
        result.error_eb = Some(error_beam_splitter(&space, &initial, &result.final_state, pair)?);
    }
    Ok((space, result))
}

/// Error at which cutoff changes stop mattering.
const ERROR_FLOOR: f64 = 1e-12;

fn settled(previous: f64, current: f64) -> bool {
    let change = (current - previous).abs();
    change <= CONVERGENCE_TOLERANCE * current.abs() || change <= ERROR_FLOOR
}

/// Synthesises, designs, runs, and raises the cutoff by 2 until the error
/// settles or `max_cutoff` is reached.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioRun> {
    run_inner(config).map_err(|e| e.in_scenario(&config.name))
}

fn run_inner(config: &ScenarioConfig) -> Result<ScenarioRun> {
    let started = Instant::now();
    config.validate()?;
    let schedule = config.schedule()?;
    let pulse = config.design_pulse()?;
    let headline = |r: &SimulationResult| r.error_eb.unwrap_or(r.error_e);

    let mut cutoff = config.cutoff;
    let (mut space, mut result) = run_at_cutoff(config, &schedule, pulse.as_ref(), cutoff)?;
    let mut history = vec![(cutoff, headline(&result))];
    let mut converged = !config.converge;
    while config.converge && cutoff + 2 <= config.max_cutoff {
        cutoff += 2;
        let (s, r) = run_at_cutoff(config, &schedule, pulse.as_ref(), cutoff)?;
        let done = settled(headline(&result), headline(&r)) && !r.leakage_exceeded;
        history.push((cutoff, headline(&r)));
        space = s;
        result = r;
        if done {
            converged = true;
            break;
        }
    }

    let record = ResultRecord {
        scenario: config.name.clone(),
        parameters: config_file::to_pairs(config),
        error_e: result.error_e,
        error_eb: result.error_eb,
        norm_drift: result.norm_drift,
        boundary_leakage: result.boundary_leakage,
        leakage_exceeded: result.leakage_exceeded,
        cutoff,
        cutoff_history: history,
        converged,
        pulse_strength: pulse.as_ref().map(|p| p.params.strength),
        wall_time: started.elapsed(),
    };
    Ok(ScenarioRun {
        config: config.clone(),
        record,
        result,
        space,
        schedule,
        pulse,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ScenarioConfig {
        let mut c = ScenarioConfig::new("tiny", 2, 27.6e-6);
        c.initial = vec![1, 2];
        c.cutoff = 3;
        c.max_cutoff = 5;
        c
    }

    #[test]
    fn settles_on_relative_or_absolute_change() {
        assert!(settled(1.0e-5, 1.04e-5));
        assert!(!settled(1.0e-5, 1.2e-5));
        assert!(settled(1e-16, 5e-13));
    }

    #[test]
    fn ideal_two_mode_run_is_exact() {
        let run = run_scenario(&tiny()).unwrap();
        assert!(run.record.error_e < 1e-12);
        assert!(run.record.converged);
        assert_eq!(run.record.cutoff_history.len(), 2);
        assert_eq!(run.result.times.len(), PropagatorConfig::DEFAULT_RECORDS);
    }

    #[test]
    fn populations_csv_rows_sum_to_norm() {
        let run = run_scenario(&tiny()).unwrap();
        let mut buf = Vec::new();
        run.write_populations_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("t_us,"));
        assert!(header.contains(",21,") || header.contains(",21"));
        assert!(header.ends_with(",rest"));
        for line in lines {
            let sum: f64 = line.split(',').skip(1).map(|x| x.parse::<f64>().unwrap()).sum();
            assert!((sum - 1.0).abs() < 1e-11, "{sum}");
        }
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut c = tiny();
        c.initial = vec![9, 0];
        assert!(c.validate().is_err());
        let mut c = tiny();
        c.beam_splitter = Some((0, 2));
        assert!(c.validate().is_err());
        let mut c = tiny();
        c.name = "a b".into();
        assert!(c.validate().is_err());
        let err = run_scenario(&ScenarioConfig {
            initial: vec![1],
            ..tiny()
        })
        .unwrap_err();
        assert!(matches!(err, Error::Scenario { .. }));
    }

    #[test]
    fn named_states_include_splitter_outputs() {
        let mut c = ScenarioConfig::new("bs", 3, 43.8e-6);
        c.initial = vec![1, 1, 1];
        c.beam_splitter = Some((1, 0));
        let named = c.named_states();
        assert!(named.contains(&vec![0, 2, 1]));
        assert!(named.contains(&vec![2, 0, 1]));
    }
}
