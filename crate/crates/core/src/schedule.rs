//! Decoupling pulse schedules: free evolution segments interleaved with π
//! phase shifts, in execution order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Sorted set of mode indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct ModeSet(Vec<usize>);

impl ModeSet {
    pub fn new(modes: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = modes.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ModeSet(v)
    }

    pub fn empty() -> Self {
        ModeSet(Vec::new())
    }

    pub fn modes(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.0.binary_search(&mode).is_ok()
    }

    /// Symmetric difference: a mode pulsed twice at one instant is not
    /// pulsed at all.
    pub fn xor(&self, other: &ModeSet) -> ModeSet {
        let mut out: Vec<usize> = self.0.iter().filter(|m| !other.contains(**m)).copied().collect();
        out.extend(other.0.iter().filter(|m| !self.contains(**m)));
        ModeSet::new(out)
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }
}

impl fmt::Display for ModeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ModeSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let modes = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::config(format!("bad mode index `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ModeSet::new(modes))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleEvent {
    /// Free evolution under the hopping Hamiltonian, in seconds.
    Evolve(f64),
    /// π phase shift on every listed mode at once.
    PhaseShift(ModeSet),
}

/// Timing of a trap-modulation pulse, designed for a target phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapedSpec {
    pub pulse_duration: f64,
    pub ramp_time: f64,
    pub erf_width: f64,
    pub target_phase: f64,
}

impl ShapedSpec {
    pub fn pi(pulse_duration: f64, ramp_time: f64) -> Self {
        ShapedSpec {
            pulse_duration,
            ramp_time,
            erf_width: 6.0,
            target_phase: std::f64::consts::PI,
        }
    }
}

/// How phase shifts are realised.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum PulseModel {
    /// Instantaneous `exp(-iπ a†a)`.
    #[default]
    Ideal,
    /// Finite trap-modulation pulse.
    Shaped(ShapedSpec),
}

impl fmt::Display for PulseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseModel::Ideal => write!(f, "ideal"),
            PulseModel::Shaped(s) => write!(
                f,
                "shaped tp={} tud={} sigma={} phase={}",
                s.pulse_duration, s.ramp_time, s.erf_width, s.target_phase
            ),
        }
    }
}

impl FromStr for PulseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut words = s.split_whitespace();
        match words.next() {
            Some("ideal") => Ok(PulseModel::Ideal),
            Some("shaped") => {
                let mut spec = ShapedSpec::pi(f64::NAN, f64::NAN);
                for w in words {
                    let (k, v) = w
                        .split_once('=')
                        .ok_or_else(|| Error::config(format!("bad model field `{w}`")))?;
                    let v: f64 = v.parse().map_err(|_| Error::config(format!("bad number in `{w}`")))?;
                    match k {
                        "tp" => spec.pulse_duration = v,
                        "tud" => spec.ramp_time = v,
                        "sigma" => spec.erf_width = v,
                        "phase" => spec.target_phase = v,
                        _ => return Err(Error::config(format!("unknown model field `{k}`"))),
                    }
                }
                if spec.pulse_duration.is_nan() || spec.ramp_time.is_nan() {
                    return Err(Error::config("shaped model needs tp and tud"));
                }
                Ok(PulseModel::Shaped(spec))
            }
            _ => Err(Error::config(format!("unknown pulse model `{s}`"))),
        }
    }
}

/// Ordered list of events for an `M`-mode chain.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSchedule {
    pub mode_count: usize,
    /// Nominal decoupling time `T` (sum of the evolve segments).
    pub total_time: f64,
    pub repetitions: usize,
    pub model: PulseModel,
    pub events: Vec<ScheduleEvent>,
    /// Set when the request needed no decoupling and a bare evolution was
    /// returned instead.
    pub note: Option<String>,
}

impl PulseSchedule {
    pub fn new(mode_count: usize, total_time: f64, model: PulseModel, events: Vec<ScheduleEvent>) -> Self {
        PulseSchedule {
            mode_count,
            total_time,
            repetitions: 1,
            model,
            events,
            note: None,
        }
    }

    pub fn evolve_time(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                ScheduleEvent::Evolve(d) => *d,
                ScheduleEvent::PhaseShift(_) => 0.0,
            })
            .sum()
    }

    pub fn phase_shifts(&self) -> impl Iterator<Item = &ModeSet> {
        self.events.iter().filter_map(|e| match e {
            ScheduleEvent::PhaseShift(m) => Some(m),
            ScheduleEvent::Evolve(_) => None,
        })
    }

    pub fn phase_shift_count(&self) -> usize {
        self.phase_shifts().count()
    }

    pub fn evolve_count(&self) -> usize {
        self.events.len() - self.phase_shift_count()
    }

    /// Number of π shifts received by each mode.
    pub fn pulse_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.mode_count];
        for set in self.phase_shifts() {
            for &m in set.modes() {
                if m < self.mode_count {
                    counts[m] += 1;
                }
            }
        }
        counts
    }

    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.events.iter().enumerate() {
            match e {
                ScheduleEvent::Evolve(d) if !(*d > 0.0) || !d.is_finite() => {
                    return Err(Error::config(format!(
                        "event {i}: evolve duration {d} must be positive"
                    )));
                }
                ScheduleEvent::PhaseShift(m) if m.is_empty() => {
                    return Err(Error::config(format!("event {i}: empty phase shift")));
                }
                ScheduleEvent::PhaseShift(m) if m.max().unwrap_or(0) >= self.mode_count => {
                    return Err(Error::ModeOutOfRange {
                        mode: m.max().unwrap_or(0),
                        modes: self.mode_count,
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Wall-clock placement of every event for a pulse model.
    ///
    /// Ideal shifts are instants. A shaped pulse of length `T_P` ends at the
    /// nominal flip time, so it occupies the last `T_P` of the preceding
    /// evolve segment; the hopping stays on throughout and the total duration
    /// is unchanged.
    pub fn timeline(&self) -> Result<Vec<TimedEvent>> {
        let tp = match self.model {
            PulseModel::Ideal => 0.0,
            PulseModel::Shaped(s) => s.pulse_duration,
        };
        let mut out = Vec::with_capacity(self.events.len());
        let mut t = 0.0;
        for (i, e) in self.events.iter().enumerate() {
            match e {
                ScheduleEvent::Evolve(d) => {
                    let shortened = matches!(self.events.get(i + 1), Some(ScheduleEvent::PhaseShift(_)));
                    let free = if shortened { d - tp } else { *d };
                    if free < -1e-15 * d.abs() {
                        return Err(Error::config(format!(
                            "evolve segment {i} ({d:.6e} s) is shorter than the pulse ({tp:.6e} s)"
                        )));
                    }
                    let free = free.max(0.0);
                    out.push(TimedEvent {
                        start: t,
                        end: t + free,
                        kind: TimedKind::Free,
                    });
                    t += free;
                }
                ScheduleEvent::PhaseShift(m) => {
                    if tp > 0.0
                        && !matches!(
                            i.checked_sub(1).map(|j| &self.events[j]),
                            Some(ScheduleEvent::Evolve(_))
                        )
                    {
                        return Err(Error::config(format!(
                            "shaped phase shift {i} has no preceding evolve segment to run in"
                        )));
                    }
                    out.push(TimedEvent {
                        start: t,
                        end: t + tp,
                        kind: TimedKind::Shift(m.clone()),
                    });
                    t += tp;
                }
            }
        }
        Ok(out)
    }

    /// Line-oriented text form; [`PulseSchedule::from_text`] reads it back
    /// exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str("# phonon-dd schedule\n");
        s.push_str(&format!("MODES {}\n", self.mode_count));
        s.push_str(&format!("TOTAL_TIME {}\n", self.total_time));
        s.push_str(&format!("REPETITIONS {}\n", self.repetitions));
        s.push_str(&format!("MODEL {}\n", self.model));
        for e in &self.events {
            match e {
                ScheduleEvent::Evolve(d) => s.push_str(&format!("EVOLVE {d}\n")),
                ScheduleEvent::PhaseShift(m) => s.push_str(&format!("PULSE {m}\n")),
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut modes = None;
        let mut total = None;
        let mut reps = 1;
        let mut model = PulseModel::Ideal;
        let mut events = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: n + 1, message };
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let number = |s: &str| s.parse::<f64>().map_err(|_| err(format!("bad number `{s}`")));
            match key {
                "MODES" => {
                    modes = Some(
                        rest.parse::<usize>()
                            .map_err(|_| err(format!("bad mode count `{rest}`")))?,
                    )
                }
                "TOTAL_TIME" => total = Some(number(rest)?),
                "REPETITIONS" => {
                    reps = rest
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad repetition count `{rest}`")))?
                }
                "MODEL" => model = rest.parse().map_err(|e: Error| err(e.to_string()))?,
                "EVOLVE" => events.push(ScheduleEvent::Evolve(number(rest)?)),
                "PULSE" => events.push(ScheduleEvent::PhaseShift(
                    rest.parse().map_err(|e: Error| err(e.to_string()))?,
                )),
                other => return Err(err(format!("unknown keyword `{other}`"))),
            }
        }
        let mode_count = modes.ok_or(Error::Parse {
            line: 0,
            message: "missing MODES header".into(),
        })?;
        let schedule = PulseSchedule {
            mode_count,
            total_time: total.unwrap_or(f64::NAN),
            repetitions: reps,
            model,
            events,
            note: None,
        };
        let schedule = if schedule.total_time.is_nan() {
            PulseSchedule {
                total_time: schedule.evolve_time(),
                ..schedule
            }
        } else {
            schedule
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimedKind {
    Free,
    Shift(ModeSet),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedEvent {
    pub start: f64,
    pub end: f64,
    pub kind: TimedKind,
}

/// Divides every evolve segment by `n_r` and plays the result `n_r` times.
pub fn repeat_schedule(base: &PulseSchedule, n_r: usize) -> Result<PulseSchedule> {
    if n_r < 1 {
        return Err(Error::domain("repetition count must be at least 1"));
    }
    if n_r == 1 {
        return Ok(base.clone());
    }
    let cycle: Vec<ScheduleEvent> = base
        .events
        .iter()
        .map(|e| match e {
            ScheduleEvent::Evolve(d) => ScheduleEvent::Evolve(d / n_r as f64),
            other => other.clone(),
        })
        .collect();
    let mut events = Vec::with_capacity(cycle.len() * n_r);
    for _ in 0..n_r {
        events.extend(cycle.iter().cloned());
    }
    Ok(PulseSchedule {
        events,
        repetitions: base.repetitions * n_r,
        ..base.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_mode(t: f64) -> PulseSchedule {
        let p = ScheduleEvent::PhaseShift(ModeSet::new([1]));
        PulseSchedule::new(
            2,
            t,
            PulseModel::Ideal,
            vec![
                ScheduleEvent::Evolve(t / 2.0),
                p.clone(),
                ScheduleEvent::Evolve(t / 2.0),
                p,
            ],
        )
    }

    #[test]
    fn mode_set_xor() {
        let a = ModeSet::new([2, 1]);
        let b = ModeSet::new([1, 3]);
        assert_eq!(a.xor(&b), ModeSet::new([2, 3]));
        assert!(a.xor(&a).is_empty());
        assert_eq!(a.to_string(), "1,2");
    }

    #[test]
    fn text_round_trip() {
        let mut s = two_mode(1.0 / 3.0);
        s.model = PulseModel::Shaped(ShapedSpec::pi(4e-6, 2e-6));
        let text = s.to_text();
        assert!(text.contains("EVOLVE 0.16666666666666666"));
        assert!(text.contains("PULSE 1"));
        let back = PulseSchedule::from_text(&text).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match PulseSchedule::from_text("MODES 2\nEVOLVE x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(PulseSchedule::from_text("EVOLVE 1\n").is_err());
        assert!(PulseSchedule::from_text("MODES 2\nPULSE 2\n").is_err());
        assert!(PulseSchedule::from_text("MODES 2\nEVOLVE -1\n").is_err());
        assert!(PulseSchedule::from_text("MODES 2\nFOO 1\n").is_err());
    }

    #[test]
    fn repetition() {
        let s = two_mode(1.0);
        assert_eq!(repeat_schedule(&s, 1).unwrap(), s);
        let r = repeat_schedule(&s, 5).unwrap();
        assert_eq!(r.evolve_count(), 10);
        assert_eq!(r.phase_shift_count(), 10);
        assert!((r.evolve_time() - 1.0).abs() < 1e-15);
        assert_eq!(r.repetitions, 5);
        assert!(repeat_schedule(&s, 0).is_err());
    }

    #[test]
    fn shaped_timeline_ends_pulses_at_flip_times() {
        let mut s = two_mode(1.0);
        s.model = PulseModel::Shaped(ShapedSpec::pi(0.1, 0.05));
        let tl = s.timeline().unwrap();
        assert_eq!(tl.len(), 4);
        assert!((tl[1].start - 0.4).abs() < 1e-15 && (tl[1].end - 0.5).abs() < 1e-15);
        assert!((tl[3].end - 1.0).abs() < 1e-15);
        s.model = PulseModel::Shaped(ShapedSpec::pi(0.6, 0.3));
        assert!(s.timeline().is_err());
    }
}
