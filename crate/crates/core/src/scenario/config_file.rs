//! Flat `key = value` scenario files.
//!
//! ```text
//! # three modes with slower pulses
//! base = fig4b
//! name = fig4b-slow
//! pulse.tp_us = 6
//! pulse.tud_us = 3
//! ```
//!
//! Keys are grouped by prefix (`chain.`, `state.`, `schedule.`, `pulse.`,
//! `fock.`, `propagator.`, `metric.`, `output.`). A `base` line starts from a
//! catalog entry and must come first; later keys override it. Occupations are
//! written highest mode first, like basis labels.

use std::f64::consts::PI;
use std::str::FromStr;

use super::{find_scenario, ScenarioConfig};
use crate::chain::Truncation;
use crate::constants::ATOMIC_MASS_UNIT;
use crate::error::{Error, Result};
use crate::fock::{format_label, parse_occupations};
use crate::schedule::ShapedSpec;

fn parse_num<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{key}` expects a number, got `{value}`"),
    })
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse {
            line,
            message: format!("`{key}` expects true or false, got `{value}`"),
        }),
    }
}

fn parse_list(line: usize, key: &str, value: &str) -> Result<Vec<usize>> {
    if value.is_empty() || value == "none" {
        return Ok(Vec::new());
    }
    value.split(',').map(|v| parse_num(line, key, v.trim())).collect()
}

fn shaped(config: &mut ScenarioConfig) -> &mut ShapedSpec {
    config.pulse.get_or_insert(ShapedSpec::pi(f64::NAN, f64::NAN))
}

fn apply(config: &mut ScenarioConfig, line: usize, key: &str, value: &str) -> Result<()> {
    let us = 1e-6;
    match key {
        "name" => config.name = value.to_string(),
        "description" => config.description = value.to_string(),
        "chain.modes" => {
            config.mode_count = parse_num(line, key, value)?;
            config.initial.resize(config.mode_count, 0);
        }
        "chain.spacing_um" => config.spacing = parse_num::<f64>(line, key, value)? * us,
        "chain.omega0_mhz" => config.secular_frequency = 2.0 * PI * parse_num::<f64>(line, key, value)? * 1e6,
        "chain.mass_amu" => config.ion_mass = parse_num::<f64>(line, key, value)? * ATOMIC_MASS_UNIT,
        "chain.truncation" => {
            config.truncation = match value {
                "none" => Truncation::None,
                v => Truncation::Distance(parse_num(line, key, v)?),
            }
        }
        "state.initial" => {
            config.initial = parse_occupations(value).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?
        }
        "schedule.repetitions" => config.repetitions = parse_num(line, key, value)?,
        "schedule.protected" => config.protected = parse_list(line, key, value)?,
        "schedule.role_swap" => {
            config.role_swap = match value {
                "default" => None,
                v => Some(
                    v.split(',')
                        .map(|b| parse_bool(line, key, b.trim()))
                        .collect::<Result<_>>()?,
                ),
            }
        }
        "schedule.total_time_us" => {
            config.total_time = match value {
                "auto" => None,
                v => Some(parse_num::<f64>(line, key, v)? * us),
            }
        }
        "pulse.model" => match value {
            "ideal" => config.pulse = None,
            "shaped" => {
                shaped(config);
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("pulse.model is `ideal` or `shaped`, got `{value}`"),
                })
            }
        },
        "pulse.tp_us" => shaped(config).pulse_duration = parse_num::<f64>(line, key, value)? * us,
        "pulse.tud_us" => shaped(config).ramp_time = parse_num::<f64>(line, key, value)? * us,
        "pulse.sigma" => shaped(config).erf_width = parse_num(line, key, value)?,
        "pulse.target_phase" => shaped(config).target_phase = parse_num(line, key, value)?,
        "fock.cutoff" => config.cutoff = parse_num(line, key, value)?,
        "fock.max_cutoff" => config.max_cutoff = parse_num(line, key, value)?,
        "fock.converge" => config.converge = parse_bool(line, key, value)?,
        "propagator.tolerance" => config.tolerance = parse_num(line, key, value)?,
        "propagator.record_stride_us" => {
            config.record_stride = match value {
                "auto" => None,
                v => Some(parse_num::<f64>(line, key, v)? * us),
            }
        }
        "metric.beam_splitter" => {
            config.beam_splitter = match parse_list(line, key, value)?.as_slice() {
                [] => None,
                &[j, k] => Some((j, k)),
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: "metric.beam_splitter needs two modes".into(),
                    })
                }
            }
        }
        "output.full_dump" => config.full_dump = parse_bool(line, key, value)?,
        _ => {
            return Err(Error::Parse {
                line,
                message: format!("unknown key `{key}`"),
            })
        }
    }
    Ok(())
}

/// Parses a scenario file and validates the result.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut config: Option<ScenarioConfig> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if key == "base" {
            if config.is_some() {
                return Err(Error::Parse {
                    line,
                    message: "`base` must be the first key".into(),
                });
            }
            config = Some(find_scenario(value).ok_or_else(|| Error::Parse {
                line,
                message: format!("unknown base scenario `{value}`"),
            })?);
            continue;
        }
        let c = config.get_or_insert_with(|| ScenarioConfig::new("custom", 2, 27.6e-6));
        apply(c, line, key, value)?;
    }
    let config = config.ok_or_else(|| Error::config("empty scenario file"))?;
    if let Some(p) = config.pulse {
        if p.pulse_duration.is_nan() || p.ramp_time.is_nan() {
            return Err(Error::config("shaped pulses need pulse.tp_us and pulse.tud_us"));
        }
    }
    config.validate()?;
    Ok(config)
}

/// Shortest decimal of `x` rounded to 12 significant digits, so unit
/// conversions do not leave trailing noise.
fn num(x: f64) -> String {
    format!("{x:.11e}").parse::<f64>().unwrap_or(x).to_string()
}

fn join(values: impl IntoIterator<Item = impl ToString>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Every setting as `(key, value)`, in file order.
pub(crate) fn to_pairs(c: &ScenarioConfig) -> Vec<(String, String)> {
    let mut pairs = vec![
        ("name", c.name.clone()),
        ("description", c.description.clone()),
        ("chain.modes", c.mode_count.to_string()),
        ("chain.spacing_um", num(c.spacing * 1e6)),
        ("chain.omega0_mhz", num(c.secular_frequency / (2.0 * PI) / 1e6)),
        ("chain.mass_amu", num(c.ion_mass / ATOMIC_MASS_UNIT)),
        (
            "chain.truncation",
            c.truncation.distance().map_or("none".into(), |d| d.to_string()),
        ),
        ("state.initial", format_label(&c.initial)),
        ("schedule.repetitions", c.repetitions.to_string()),
        (
            "schedule.protected",
            if c.protected.is_empty() {
                "none".into()
            } else {
                join(&c.protected)
            },
        ),
        (
            "schedule.role_swap",
            c.role_swap.as_ref().map_or("default".into(), join),
        ),
        (
            "schedule.total_time_us",
            c.total_time.map_or("auto".into(), |t| num(t * 1e6)),
        ),
    ];
    match c.pulse {
        None => pairs.push(("pulse.model", "ideal".into())),
        Some(p) => pairs.extend([
            ("pulse.model", "shaped".into()),
            ("pulse.tp_us", num(p.pulse_duration * 1e6)),
            ("pulse.tud_us", num(p.ramp_time * 1e6)),
            ("pulse.sigma", p.erf_width.to_string()),
            ("pulse.target_phase", p.target_phase.to_string()),
        ]),
    }
    pairs.extend([
        ("fock.cutoff", c.cutoff.to_string()),
        ("fock.max_cutoff", c.max_cutoff.to_string()),
        ("fock.converge", c.converge.to_string()),
        ("propagator.tolerance", c.tolerance.to_string()),
        (
            "propagator.record_stride_us",
            c.record_stride.map_or("auto".into(), |s| num(s * 1e6)),
        ),
        (
            "metric.beam_splitter",
            c.beam_splitter.map_or("none".into(), |(j, k)| format!("{j},{k}")),
        ),
        ("output.full_dump", c.full_dump.to_string()),
    ]);
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn to_config_text(config: &ScenarioConfig) -> String {
    to_pairs(config)
        .into_iter()
        .map(|(k, v)| format!("{k} = {v}\n"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::catalog;

    #[test]
    fn catalog_entries_round_trip() {
        for c in catalog() {
            let text = to_config_text(&c);
            let back = parse_config(&text).unwrap();
            assert_eq!(to_config_text(&back), text, "{}", c.name);
            assert_eq!(back.initial, c.initial);
            assert_eq!(back.role_swap, c.role_swap);
            assert_eq!(back.beam_splitter, c.beam_splitter);
        }
    }

    #[test]
    fn base_with_overrides() {
        let c = parse_config("base = fig4b\nname = slow  # comment\npulse.tp_us = 6\n\nschedule.repetitions = 2\n")
            .unwrap();
        assert_eq!(c.name, "slow");
        assert_eq!(c.repetitions, 2);
        assert!((c.pulse.unwrap().pulse_duration - 6e-6).abs() < 1e-18);
        assert_eq!(c.mode_count, 3);
    }

    #[test]
    fn initial_is_written_highest_mode_first() {
        let c = parse_config("name = x\nchain.modes = 2\nstate.initial = 2,1\n").unwrap();
        assert_eq!(c.initial, vec![1, 2]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_config("name = x\nchain.spacing_um = wide\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_config("name = x\nbogus = 1\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config("name = x\nbase = fig3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(parse_config("name = x\npulse.model = shaped\n").is_err());
        assert!(parse_config("").is_err());
    }
}
