use std::f64::consts::PI;

use super::ScenarioConfig;
use crate::schedule::ShapedSpec;

/// `ω₀ = 2π · 2.2 MHz`.
pub const SECULAR_FREQUENCY: f64 = 2.0 * PI * 2.2e6;
/// Secular period `2π/ω₀`.
pub const T0: f64 = 1.0 / 2.2e6;

const SHORT_SPACING: f64 = 27.6e-6;
const LONG_SPACING: f64 = 43.8e-6;

fn long_pulse() -> ShapedSpec {
    ShapedSpec::pi(8.8 * T0, 4.4 * T0)
}

fn two_mode(name: &str, description: &str, spacing: f64, pulse: ShapedSpec) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(name, 2, spacing);
    c.description = description.into();
    c.initial = vec![1, 2];
    c.pulse = Some(pulse);
    c
}

fn three_mode(name: &str, description: &str, shaped: bool, repetitions: usize) -> ScenarioConfig {
    let mut c = ScenarioConfig::new(name, 3, LONG_SPACING);
    c.description = description.into();
    c.initial = vec![0, 1, 2];
    c.repetitions = repetitions;
    c.role_swap = Some(vec![false, true]);
    c.pulse = shaped.then(long_pulse);
    c
}

fn splitter(name: &str, description: &str, shaped: bool, repetitions: usize) -> ScenarioConfig {
    let mut c = three_mode(name, description, shaped, repetitions);
    c.initial = vec![1, 1, 1];
    c.role_swap = None;
    c.protected = vec![0, 1];
    c.beam_splitter = Some((1, 0));
    c
}

/// Every built-in scenario, in catalog order.
pub fn catalog() -> Vec<ScenarioConfig> {
    let mut fig3 = three_mode("fig3", "3 modes, ideal shifts, plain ordering, |2,1,0>", false, 1);
    fig3.role_swap = Some(vec![false, false]);
    vec![
        two_mode(
            "fig1a",
            "2 modes, d = 27.6 um, 4 us pulses, |2,1>",
            SHORT_SPACING,
            long_pulse(),
        ),
        two_mode(
            "fig1b",
            "2 modes, d = 27.6 um, 1 us pulses, |2,1>",
            SHORT_SPACING,
            ShapedSpec::pi(2.2 * T0, 1.0 * T0),
        ),
        two_mode(
            "fig2",
            "2 modes, d = 43.8 um, 4 us pulses, |2,1>",
            LONG_SPACING,
            long_pulse(),
        ),
        fig3,
        three_mode(
            "fig4a",
            "3 modes, ideal shifts, middle mode flipped at level 2",
            false,
            1,
        ),
        three_mode("fig4b", "3 modes, 4 us pulses, middle mode flipped at level 2", true, 1),
        three_mode("fig5a", "as fig4a, 5 repetitions", false, 5),
        three_mode("fig5b", "as fig4b, 5 repetitions", true, 5),
        splitter(
            "fig6a",
            "50:50 splitter on modes 1,0 with mode 2 decoupled, ideal, |1,1,1>",
            false,
            1,
        ),
        splitter(
            "fig6b",
            "50:50 splitter on modes 1,0 with mode 2 decoupled, 4 us pulses, |1,1,1>",
            true,
            1,
        ),
        splitter("fig7a", "as fig6a, 5 repetitions", false, 5),
        splitter("fig7b", "as fig6b, 5 repetitions", true, 5),
    ]
}

pub fn find_scenario(name: &str) -> Option<ScenarioConfig> {
    catalog().into_iter().find(|c| c.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_coupling_matrix;
    use crate::dwell::signed_dwell_check;

    #[test]
    fn names_are_unique_and_valid() {
        let all = catalog();
        assert_eq!(all.len(), 12);
        for (i, c) in all.iter().enumerate() {
            c.validate().unwrap();
            assert!(all[..i].iter().all(|o| o.name != c.name));
            assert_eq!(c.secular_frequency, SECULAR_FREQUENCY);
        }
    }

    #[test]
    fn long_spacing_rate() {
        let k = find_scenario("fig2").unwrap().coupling_rate().unwrap();
        assert!((k / (2.0 * PI) - 475.9).abs() < 0.1);
    }

    #[test]
    fn fixed_modes_are_never_pulsed() {
        for (name, fixed) in [
            ("fig4a", vec![0]),
            ("fig4b", vec![0]),
            ("fig5a", vec![0]),
            ("fig5b", vec![0]),
            ("fig6a", vec![0, 1]),
            ("fig6b", vec![0, 1]),
            ("fig7a", vec![0, 1]),
            ("fig7b", vec![0, 1]),
        ] {
            let c = find_scenario(name).unwrap();
            let s = c.schedule().unwrap();
            for set in s.phase_shifts() {
                assert!(fixed.iter().all(|&m| !set.contains(m)), "{name}: {set}");
            }
            let k = build_coupling_matrix(&c.chain().unwrap()).unwrap();
            assert!(signed_dwell_check(&s, &k, &c.protected).passed(), "{name}");
        }
    }

    #[test]
    fn plain_ordering_pulses_outer_mode_most() {
        let s = find_scenario("fig3").unwrap().schedule().unwrap();
        assert_eq!(s.pulse_counts(), vec![0, 2, 4]);
    }
}
