//! Decoupling schedules by recursive concatenation.
//!
//! The modes are halved recursively: at level `l` every group of two or more
//! modes splits into its first `⌊s/2⌋` modes (label 0) and the rest (label 1),
//! and one half of every group is flipped at the slots `(2p − 1)·2^{L−l}` of a
//! grid of `N_BP = 2^L` equal evolve segments. Any two modes separated at
//! level `l` then see a coupling sign that alternates on that level's slots and
//! integrates to zero. A final shift at the end of the cycle undoes every
//! mode's odd pulse count so the cycle multiplies to the identity.

use crate::chain::Truncation;
use crate::error::{Error, Result};
use crate::schedule::{repeat_schedule, ModeSet, PulseModel, PulseSchedule, ScheduleEvent};

/// Request for a decoupling schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct DDSpec {
    pub mode_count: usize,
    /// `T`, seconds.
    pub total_time: f64,
    pub repetitions: usize,
    /// Modes whose mutual coupling must be kept.
    pub protected: Vec<usize>,
    pub truncation: Truncation,
    /// Per-level flag: flip the label-0 half instead of the label-1 half.
    /// `None` selects [`default_role_swap`].
    pub role_swap: Option<Vec<bool>>,
    pub model: PulseModel,
}

impl DDSpec {
    pub fn new(mode_count: usize, total_time: f64) -> Self {
        DDSpec {
            mode_count,
            total_time,
            repetitions: 1,
            protected: Vec::new(),
            truncation: Truncation::None,
            role_swap: None,
            model: PulseModel::Ideal,
        }
    }

    pub fn with_repetitions(mut self, n_r: usize) -> Self {
        self.repetitions = n_r;
        self
    }

    pub fn with_protected(mut self, modes: impl IntoIterator<Item = usize>) -> Self {
        self.protected = modes.into_iter().collect();
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_role_swap(mut self, swaps: Vec<bool>) -> Self {
        self.role_swap = Some(swaps);
        self
    }

    pub fn with_model(mut self, model: PulseModel) -> Self {
        self.model = model;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_time > 0.0) || !self.total_time.is_finite() {
            return Err(Error::config("decoupling time must be positive"));
        }
        if self.repetitions < 1 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if let Some(&m) = self.protected.iter().find(|&&m| m >= self.mode_count) {
            return Err(Error::ModeOutOfRange {
                mode: m,
                modes: self.mode_count,
            });
        }
        if let Truncation::Distance(0) = self.truncation {
            return Err(Error::config("truncation distance must be at least 1"));
        }
        Ok(())
    }

    fn swap(&self, level: usize) -> bool {
        let default;
        let flags = match &self.role_swap {
            Some(f) => f,
            None => {
                default = default_role_swap(self.mode_count);
                &default
            }
        };
        flags.get(level - 1).copied().unwrap_or(false)
    }
}

/// Three modes flip the middle mode at the second level, which leaves a much
/// smaller residual than flipping the outer one; other sizes flip label-1
/// halves throughout.
pub fn default_role_swap(mode_count: usize) -> Vec<bool> {
    if mode_count == 3 {
        vec![false, true]
    } else {
        Vec::new()
    }
}

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: usize) -> usize {
    assert!(n >= 1);
    (usize::BITS - (n - 1).leading_zeros()) as usize
}

/// Pulse slots `1..=N_BP` being filled in, plus per-mode level labels.
struct Grid {
    levels: usize,
    slots: Vec<ModeSet>,
    labels: Vec<u64>,
}

impl Grid {
    fn new(levels: usize, mode_count: usize) -> Self {
        Grid {
            levels,
            slots: vec![ModeSet::empty(); (1 << levels) + 1],
            labels: vec![0; mode_count],
        }
    }

    fn n_bp(&self) -> usize {
        1 << self.levels
    }

    /// Flips `modes` at every level-`l` slot and records the label bit.
    fn pulse_level(&mut self, level: usize, modes: &ModeSet) {
        if modes.is_empty() {
            return;
        }
        let spacing = 1 << (self.levels - level);
        for p in 1..=(1usize << (level - 1)) {
            let slot = (2 * p - 1) * spacing;
            self.slots[slot] = self.slots[slot].xor(modes);
        }
        for &m in modes.modes() {
            self.labels[m] |= 1 << (level - 1);
        }
    }

    /// Recursive halving of `groups` over `first..=last`.
    fn concatenate(
        &mut self,
        mut groups: Vec<Vec<usize>>,
        first: usize,
        last: usize,
        swap: impl Fn(usize) -> bool,
        anchor: Option<usize>,
    ) {
        for level in first..=last {
            let mut pulsed = Vec::new();
            let mut next = Vec::new();
            for g in &groups {
                if g.len() < 2 {
                    next.push(g.clone());
                    continue;
                }
                let (zero, one) = g.split_at(g.len() / 2);
                let holds_anchor = anchor.is_some_and(|a| g.contains(&a));
                let target = if holds_anchor {
                    // The anchor is first in its group, so it sits in the
                    // label-0 half; flip the other half.
                    one
                } else if swap(level) {
                    zero
                } else {
                    one
                };
                pulsed.extend_from_slice(target);
                next.push(zero.to_vec());
                next.push(one.to_vec());
            }
            self.pulse_level(level, &ModeSet::new(pulsed));
            groups = next;
        }
    }

    fn into_schedule(mut self, spec: &DDSpec) -> (PulseSchedule, Vec<u64>) {
        let n_bp = self.n_bp();
        let mut counts = vec![0usize; spec.mode_count];
        for set in &self.slots {
            for &m in set.modes() {
                counts[m] += 1;
            }
        }
        let odd = ModeSet::new((0..spec.mode_count).filter(|&m| counts[m] % 2 == 1));
        self.slots[n_bp] = self.slots[n_bp].xor(&odd);
        let segment = spec.total_time / n_bp as f64;
        let mut events = Vec::with_capacity(2 * n_bp);
        for slot in 1..=n_bp {
            events.push(ScheduleEvent::Evolve(segment));
            if !self.slots[slot].is_empty() {
                events.push(ScheduleEvent::PhaseShift(self.slots[slot].clone()));
            }
        }
        (
            PulseSchedule::new(spec.mode_count, spec.total_time, spec.model, events),
            self.labels,
        )
    }
}

fn bare(spec: &DDSpec, note: &str) -> PulseSchedule {
    let mut s = PulseSchedule::new(
        spec.mode_count,
        spec.total_time,
        spec.model,
        vec![ScheduleEvent::Evolve(spec.total_time)],
    );
    s.note = Some(note.to_string());
    s
}

fn finish(spec: &DDSpec, base: PulseSchedule) -> Result<PulseSchedule> {
    repeat_schedule(&base, spec.repetitions)
}

/// One cycle of plain concatenation and the level labels `α_j`: bit `l − 1`
/// of `α_j` is set when mode `j` is flipped at level `l`.
pub fn concatenated_cycle(spec: &DDSpec) -> Result<(PulseSchedule, Vec<u64>)> {
    spec.validate()?;
    let m = spec.mode_count;
    if m < 2 {
        return Ok((bare(spec, "a single mode has nothing to decouple"), vec![0; m]));
    }
    let levels = ceil_log2(m);
    let mut grid = Grid::new(levels, m);
    grid.concatenate(vec![(0..m).collect()], 1, levels, |l| spec.swap(l), None);
    Ok(grid.into_schedule(spec))
}

/// Cancels the hopping between every pair of modes.
pub fn synthesize_concatenated(spec: &DDSpec) -> Result<PulseSchedule> {
    if !spec.protected.is_empty() {
        return Err(Error::config("plain concatenation takes no protected modes"));
    }
    let (cycle, _) = concatenated_cycle(spec)?;
    finish(spec, cycle)
}

/// Cancels every coupling except those inside the protected set `S`.
///
/// The protected modes are represented by their lowest index `q'`, which
/// joins the unprotected modes in a smaller concatenation where `q'` is
/// never flipped; the other members of `S` are never flipped either, so
/// their mutual signs stay `+1` and their coupling to `S^c` follows `q'`.
pub fn synthesize_protected(spec: &DDSpec) -> Result<PulseSchedule> {
    spec.validate()?;
    let protected = ModeSet::new(spec.protected.iter().copied());
    if protected.is_empty() {
        return synthesize_concatenated(spec);
    }
    if spec.truncation != Truncation::None {
        return Err(Error::config("protected modes cannot be combined with truncation"));
    }
    if protected.len() == spec.mode_count {
        return finish(spec, bare(spec, "every mode is protected; nothing to decouple"));
    }
    let anchor = protected.modes()[0];
    let mut virtual_modes = vec![anchor];
    virtual_modes.extend((0..spec.mode_count).filter(|m| !protected.contains(*m)));
    let levels = ceil_log2(virtual_modes.len());
    let mut grid = Grid::new(levels, spec.mode_count);
    grid.concatenate(vec![virtual_modes], 1, levels, |l| spec.swap(l), Some(anchor));
    let (cycle, _) = grid.into_schedule(spec);
    finish(spec, cycle)
}

/// Cancels only the couplings with `|j − k| ≤ η`.
///
/// Blocks of `η` consecutive modes are formed; the odd blocks are flipped at
/// the first level, and every block is concatenated internally on the finer
/// levels. A shorter final block is handled as a smaller block.
pub fn synthesize_truncated(spec: &DDSpec) -> Result<PulseSchedule> {
    spec.validate()?;
    let eta = match spec.truncation {
        Truncation::Distance(eta) => eta,
        Truncation::None => return synthesize_concatenated(spec),
    };
    let m = spec.mode_count;
    if m < 2 {
        return finish(spec, bare(spec, "a single mode has nothing to decouple"));
    }
    let l_max = ceil_log2(m);
    let beta = ceil_log2(eta) + 1;
    if eta >= m || beta >= l_max {
        return synthesize_concatenated(spec);
    }
    let blocks: Vec<Vec<usize>> = (0..m).collect::<Vec<_>>().chunks(eta).map(|c| c.to_vec()).collect();
    let mut grid = Grid::new(beta, m);
    let flip_even = spec.swap(1);
    let first: Vec<usize> = blocks
        .iter()
        .enumerate()
        .filter(|(i, _)| (i % 2 == 1) != flip_even)
        .flat_map(|(_, b)| b.iter().copied())
        .collect();
    grid.pulse_level(1, &ModeSet::new(first));
    grid.concatenate(blocks, 2, beta, |l| spec.swap(l), None);
    let (cycle, _) = grid.into_schedule(spec);
    finish(spec, cycle)
}

/// Dispatches on the protected set and truncation distance.
pub fn synthesize(spec: &DDSpec) -> Result<PulseSchedule> {
    spec.validate()?;
    match (spec.protected.is_empty(), spec.truncation) {
        (true, Truncation::None) => synthesize_concatenated(spec),
        (true, Truncation::Distance(_)) => synthesize_truncated(spec),
        (false, _) => synthesize_protected(spec),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(d: f64) -> ScheduleEvent {
        ScheduleEvent::Evolve(d)
    }

    fn p(m: &[usize]) -> ScheduleEvent {
        ScheduleEvent::PhaseShift(ModeSet::new(m.iter().copied()))
    }

    #[test]
    fn log2_ceiling() {
        assert_eq!(
            (1..=9).map(ceil_log2).collect::<Vec<_>>(),
            vec![0, 1, 2, 2, 3, 3, 3, 3, 4]
        );
    }

    #[test]
    fn two_modes() {
        let s = synthesize(&DDSpec::new(2, 1.0)).unwrap();
        assert_eq!(s.events, vec![ev(0.5), p(&[1]), ev(0.5), p(&[1])]);
    }

    #[test]
    fn three_modes_both_orderings() {
        let q = 0.25;
        let plain = synthesize(&DDSpec::new(3, 1.0).with_role_swap(vec![false, false])).unwrap();
        assert_eq!(
            plain.events,
            vec![ev(q), p(&[2]), ev(q), p(&[1, 2]), ev(q), p(&[2]), ev(q), p(&[1, 2])]
        );
        let swapped = synthesize(&DDSpec::new(3, 1.0).with_role_swap(vec![false, true])).unwrap();
        let expected = vec![ev(q), p(&[1]), ev(q), p(&[1, 2]), ev(q), p(&[1]), ev(q), p(&[1, 2])];
        assert_eq!(swapped.events, expected);
        assert_eq!(synthesize(&DDSpec::new(3, 1.0)).unwrap().events, expected);
    }

    #[test]
    fn labels_count_pulses() {
        for m in 2..=8 {
            let spec = DDSpec::new(m, 1.0).with_role_swap(vec![false; 3]);
            let (cycle, labels) = concatenated_cycle(&spec).unwrap();
            let counts = cycle.pulse_counts();
            for j in 0..m {
                let alpha = labels[j] as usize;
                let expected = alpha + (alpha & 1);
                assert_eq!(counts[j], expected, "M={m} j={j}");
            }
        }
    }

    #[test]
    fn protected_examples() {
        let s = synthesize(&DDSpec::new(3, 1.0).with_protected([0, 1])).unwrap();
        assert_eq!(s.events, vec![ev(0.5), p(&[2]), ev(0.5), p(&[2])]);
        let s = synthesize(&DDSpec::new(2, 1.0).with_protected([0])).unwrap();
        assert_eq!(s.events, vec![ev(0.5), p(&[1]), ev(0.5), p(&[1])]);
        let s = synthesize(&DDSpec::new(3, 1.0).with_protected([1])).unwrap();
        assert!(s.phase_shifts().all(|m| !m.contains(1)));
        assert_eq!(s.evolve_count(), 4);
        let all = synthesize(&DDSpec::new(3, 1.0).with_protected([0, 1, 2])).unwrap();
        assert_eq!(all.events, vec![ev(1.0)]);
        assert!(all.note.is_some());
    }

    #[test]
    fn truncated_examples() {
        let s = synthesize(&DDSpec::new(4, 1.0).with_truncation(Truncation::Distance(1))).unwrap();
        assert_eq!(s.events, vec![ev(0.5), p(&[1, 3]), ev(0.5), p(&[1, 3])]);
        let s = synthesize(&DDSpec::new(4, 1.0).with_truncation(Truncation::Distance(2))).unwrap();
        assert_eq!(s.evolve_count(), 4);
        let a = synthesize(&DDSpec::new(2, 1.0).with_truncation(Truncation::Distance(1))).unwrap();
        assert_eq!(a.events, synthesize(&DDSpec::new(2, 1.0)).unwrap().events);
    }

    #[test]
    fn degenerate_and_invalid_requests() {
        let s = synthesize(&DDSpec::new(1, 2.0)).unwrap();
        assert_eq!(s.events, vec![ev(2.0)]);
        assert!(s.note.is_some());
        assert!(synthesize(&DDSpec::new(2, 0.0)).is_err());
        assert!(synthesize(&DDSpec::new(2, 1.0).with_repetitions(0)).is_err());
        assert!(synthesize(&DDSpec::new(2, 1.0).with_protected([2])).is_err());
        assert!(synthesize(
            &DDSpec::new(4, 1.0)
                .with_protected([0])
                .with_truncation(Truncation::Distance(1))
        )
        .is_err());
    }

    #[test]
    fn repetitions_keep_total_time() {
        let s = synthesize(&DDSpec::new(3, 1.0).with_repetitions(5)).unwrap();
        assert_eq!(s.evolve_count(), 20);
        assert!((s.evolve_time() - 1.0).abs() < 1e-12);
        assert!(s.events.iter().all(|e| match e {
            ScheduleEvent::Evolve(d) => (d - 0.05).abs() < 1e-15,
            _ => true,
        }));
    }
}
