use std::fmt;
use std::str::FromStr;

use super::{run_scenario, ResultRecord, ScenarioConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// `n_r`.
    Repetitions,
    /// Ion spacing in µm.
    Spacing,
    /// Pulse length in µs; the ramp keeps its share of the pulse.
    PulseDuration,
    /// Fixed Fock cutoff, with the convergence loop off.
    Cutoff,
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_r" | "nr" | "repetitions" => Ok(SweepAxis::Repetitions),
            "d" | "spacing" => Ok(SweepAxis::Spacing),
            "T_P" | "tp" | "pulse" => Ok(SweepAxis::PulseDuration),
            "n_max" | "cutoff" => Ok(SweepAxis::Cutoff),
            other => Err(Error::config(format!(
                "unknown sweep axis `{other}` (n_r, d, T_P, n_max)"
            ))),
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Repetitions => "n_r",
            SweepAxis::Spacing => "d",
            SweepAxis::PulseDuration => "T_P",
            SweepAxis::Cutoff => "n_max",
        })
    }
}

fn count(value: f64, what: &str) -> Result<usize> {
    if value >= 1.0 && value.fract() == 0.0 {
        Ok(value as usize)
    } else {
        Err(Error::config(format!("{what} must be a positive integer, got {value}")))
    }
}

impl SweepAxis {
    /// `base` with the axis set to `value`, renamed `<base>-<axis><value>`.
    pub fn apply(self, base: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut c = base.clone();
        c.name = format!("{}-{}{}", base.name, self, value);
        match self {
            SweepAxis::Repetitions => c.repetitions = count(value, "n_r")?,
            SweepAxis::Spacing => c.spacing = value * 1e-6,
            SweepAxis::PulseDuration => {
                let p = c
                    .pulse
                    .as_mut()
                    .ok_or_else(|| Error::config("T_P sweep needs a shaped pulse"))?;
                let share = p.ramp_time / p.pulse_duration;
                p.pulse_duration = value * 1e-6;
                p.ramp_time = share * p.pulse_duration;
            }
            SweepAxis::Cutoff => {
                c.cutoff = count(value, "n_max")?;
                c.max_cutoff = c.cutoff;
                c.converge = false;
            }
        }
        Ok(c)
    }
}

/// One sweep point; failures are kept so the rest of the sweep can finish.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: std::result::Result<ResultRecord, String>,
}

impl SweepRow {
    pub const CSV_HEADER: &'static str =
        "value,scenario,metric,error,error_E,cutoff,converged,norm_drift,boundary_leakage,leakage_flag,failure";

    pub fn csv_row(&self) -> String {
        match &self.outcome {
            Ok(r) => format!("{},{},", self.value, r.csv_row()),
            Err(e) => format!("{},,,,,,,,,,{}", self.value, e.replace([',', '\n'], ";")),
        }
    }
}

fn run_point(base: &ScenarioConfig, axis: SweepAxis, value: f64) -> SweepRow {
    let outcome = axis
        .apply(base, value)
        .and_then(|c| run_scenario(&c))
        .map(|run| run.record)
        .map_err(|e| e.to_string());
    SweepRow { value, outcome }
}

/// Runs every value independently and returns rows sorted by value.
pub fn sweep(base: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config("sweep needs at least one value"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::config(format!("sweep value {v} is not finite")));
    }
    #[cfg(feature = "parallel")]
    let mut rows: Vec<SweepRow> = {
        use rayon::prelude::*;
        values.par_iter().map(|&v| run_point(base, axis, v)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let mut rows: Vec<SweepRow> = values.iter().map(|&v| run_point(base, axis, v)).collect();
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(rows)
}
