//! Algebraic check of a schedule through the signs of the hopping terms.
//!
//! Conjugating the hopping term `a_j† a_k + h.c.` by a π shift on exactly one
//! of `j`, `k` flips its sign. To first order the schedule implements the
//! hopping Hamiltonian with each `κ_{j,k}` weighted by the time integral of its
//! sign, so a pair is decoupled when that signed dwell vanishes.

use crate::chain::CouplingMatrix;
use crate::schedule::{PulseSchedule, ScheduleEvent};

/// Piecewise-constant sign of one pair's hopping term.
#[derive(Debug, Clone, PartialEq)]
pub struct SignTrace {
    pub pair: (usize, usize),
    /// `(start, end, sign)` over consecutive evolve segments.
    pub segments: Vec<(f64, f64, i8)>,
}

impl SignTrace {
    pub fn integral(&self) -> f64 {
        self.segments.iter().map(|&(a, b, s)| (b - a) * s as f64).sum()
    }

    pub fn always_positive(&self) -> bool {
        self.segments.iter().all(|&(_, _, s)| s == 1)
    }
}

/// Sign traces of every pair `j > k`, on the instantaneous-shift timeline.
pub fn sign_traces(schedule: &PulseSchedule) -> Vec<SignTrace> {
    let m = schedule.mode_count;
    let mut parity = vec![false; m];
    let mut traces: Vec<SignTrace> = (0..m)
        .flat_map(|j| (0..j).map(move |k| (j, k)))
        .map(|pair| SignTrace {
            pair,
            segments: Vec::new(),
        })
        .collect();
    let mut t = 0.0;
    for event in &schedule.events {
        match event {
            ScheduleEvent::Evolve(d) => {
                for tr in traces.iter_mut() {
                    let (j, k) = tr.pair;
                    let sign = if parity[j] != parity[k] { -1 } else { 1 };
                    tr.segments.push((t, t + d, sign));
                }
                t += d;
            }
            ScheduleEvent::PhaseShift(modes) => {
                for &mode in modes.modes() {
                    if mode < m {
                        parity[mode] = !parity[mode];
                    }
                }
            }
        }
    }
    traces
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairIntent {
    /// Coupling to be cancelled.
    Decouple,
    /// Both modes protected; sign must stay `+1`.
    Keep,
    /// Zero coupling (truncated); not checked.
    Ignore,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairDwell {
    pub j: usize,
    pub k: usize,
    pub integral: f64,
    pub intent: PairIntent,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DwellReport {
    pub total_time: f64,
    pub pairs: Vec<PairDwell>,
    pub pulse_counts: Vec<usize>,
    /// Every mode receives an even number of shifts.
    pub parity_ok: bool,
}

impl DwellReport {
    pub fn passed(&self) -> bool {
        self.parity_ok && self.pairs.iter().all(|p| p.ok)
    }

    pub fn failures(&self) -> Vec<&PairDwell> {
        self.pairs.iter().filter(|p| !p.ok).collect()
    }
}

/// Signed dwell of every pair, judged against its intent: pairs with a zero
/// coupling are ignored, pairs inside `protected` must keep sign `+1`, all
/// others must integrate to zero (to `10⁻¹²` of the total time).
pub fn signed_dwell_check(schedule: &PulseSchedule, couplings: &CouplingMatrix, protected: &[usize]) -> DwellReport {
    let total_time = schedule.evolve_time();
    let tol = 1e-12 * total_time.max(f64::MIN_POSITIVE);
    let pairs = sign_traces(schedule)
        .into_iter()
        .map(|tr| {
            let (j, k) = tr.pair;
            let coupled = j < couplings.mode_count() && couplings.get(j, k) != 0.0;
            let intent = if !coupled {
                PairIntent::Ignore
            } else if protected.contains(&j) && protected.contains(&k) {
                PairIntent::Keep
            } else {
                PairIntent::Decouple
            };
            let integral = tr.integral();
            let ok = match intent {
                PairIntent::Ignore => true,
                PairIntent::Keep => tr.always_positive(),
                PairIntent::Decouple => integral.abs() <= tol,
            };
            PairDwell {
                j,
                k,
                integral,
                intent,
                ok,
            }
        })
        .collect();
    let pulse_counts = schedule.pulse_counts();
    let parity_ok = pulse_counts.iter().all(|c| c % 2 == 0);
    DwellReport {
        total_time,
        pairs,
        pulse_counts,
        parity_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::Truncation;
    use crate::schedule::{ModeSet, PulseModel};
    use crate::synth::{synthesize, DDSpec};
    use proptest::prelude::*;

    fn all_coupled(m: usize) -> CouplingMatrix {
        CouplingMatrix::from_fn(m, |j, k| 1.0 / ((j - k) as f64).powi(3))
    }

    fn truncated(m: usize, eta: usize) -> CouplingMatrix {
        CouplingMatrix::from_fn(m, |j, k| if j - k <= eta { 1.0 } else { 0.0 })
    }

    #[test]
    fn three_mode_plain_ordering() {
        let s = synthesize(&DDSpec::new(3, 1.0).with_role_swap(vec![false, false])).unwrap();
        let r = signed_dwell_check(&s, &all_coupled(3), &[]);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.pulse_counts, vec![0, 2, 4]);
        for p in &r.pairs {
            assert!(p.integral.abs() < 1e-15);
        }
    }

    #[test]
    fn protected_pair_keeps_sign() {
        let s = synthesize(&DDSpec::new(3, 2.0).with_protected([0, 1])).unwrap();
        let r = signed_dwell_check(&s, &all_coupled(3), &[0, 1]);
        assert!(r.passed());
        let p10 = r.pairs.iter().find(|p| (p.j, p.k) == (1, 0)).unwrap();
        assert_eq!(p10.intent, PairIntent::Keep);
        assert!((p10.integral - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bare_evolution_fails() {
        let s = PulseSchedule::new(2, 1.0, PulseModel::Ideal, vec![ScheduleEvent::Evolve(1.0)]);
        let r = signed_dwell_check(&s, &all_coupled(2), &[]);
        assert!(!r.passed());
        assert_eq!(r.pairs[0].integral, 1.0);
    }

    #[test]
    fn odd_pulse_count_fails_parity() {
        let s = PulseSchedule::new(
            2,
            1.0,
            PulseModel::Ideal,
            vec![
                ScheduleEvent::Evolve(0.5),
                ScheduleEvent::PhaseShift(ModeSet::new([1])),
                ScheduleEvent::Evolve(0.5),
            ],
        );
        let r = signed_dwell_check(&s, &all_coupled(2), &[]);
        assert!(!r.parity_ok);
        assert!(!r.passed());
    }

    fn any_spec() -> impl Strategy<Value = (DDSpec, Vec<usize>, Option<usize>)> {
        (
            2usize..=8,
            1usize..=8,
            proptest::collection::vec(any::<bool>(), 3),
            0u8..3,
            any::<u16>(),
        )
            .prop_map(|(m, n_r, swaps, kind, seed)| {
                let base = DDSpec::new(m, 1.0).with_repetitions(n_r).with_role_swap(swaps);
                match kind {
                    0 => (base, Vec::new(), None),
                    1 => {
                        let protected: Vec<usize> = (0..m).filter(|j| (seed >> j) & 1 == 1).collect();
                        let protected = if protected.len() == m {
                            protected[1..].to_vec()
                        } else {
                            protected
                        };
                        (base.with_protected(protected.clone()), protected, None)
                    }
                    _ => {
                        let eta = 1 + seed as usize % m;
                        (base.with_truncation(Truncation::Distance(eta)), Vec::new(), Some(eta))
                    }
                }
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]
        #[test]
        fn every_synthesized_schedule_cancels((spec, protected, eta) in any_spec()) {
            let s = synthesize(&spec).unwrap();
            let m = spec.mode_count;
            let k = match eta { Some(e) => truncated(m, e), None => all_coupled(m) };
            let r = signed_dwell_check(&s, &k, &protected);
            prop_assert!(r.passed(), "{:?}\n{:?}", spec, r.failures());
            prop_assert!((s.evolve_time() - spec.total_time).abs() <= 1e-12 * spec.total_time);
            for set in s.phase_shifts() {
                for q in &protected {
                    prop_assert!(!set.contains(*q));
                }
            }
        }
    }
}
