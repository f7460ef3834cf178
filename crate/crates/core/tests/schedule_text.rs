use phonon_dd::schedule::{ModeSet, PulseModel, PulseSchedule, ScheduleEvent, ShapedSpec};
use phonon_dd::synth::{synthesize, DDSpec};
use proptest::prelude::*;

fn event(m: usize) -> impl Strategy<Value = ScheduleEvent> {
    prop_oneof![
        (1e-12f64..1e-2).prop_map(ScheduleEvent::Evolve),
        proptest::collection::btree_set(0..m, 1..=m).prop_map(|s| ScheduleEvent::PhaseShift(ModeSet::new(s))),
    ]
}

fn schedule() -> impl Strategy<Value = PulseSchedule> {
    (1usize..=8, any::<bool>(), 1usize..=6).prop_flat_map(|(m, shaped, reps)| {
        proptest::collection::vec(event(m), 1..40).prop_map(move |mut events| {
            events.push(ScheduleEvent::Evolve(1e-6));
            let model = if shaped {
                PulseModel::Shaped(ShapedSpec::pi(4.0e-6, 2.0e-6))
            } else {
                PulseModel::Ideal
            };
            let mut s = PulseSchedule::new(m, 0.0, model, events);
            s.total_time = s.evolve_time();
            s.repetitions = reps;
            s
        })
    })
}

proptest! {
    #[test]
    fn text_form_round_trips_exactly(s in schedule()) {
        let text = s.to_text();
        let back = PulseSchedule::from_text(&text).unwrap();
        prop_assert_eq!(&back, &s);
        prop_assert_eq!(back.to_text(), text);
    }
}

#[test]
fn synthesized_schedule_file() {
    let s = synthesize(&DDSpec::new(3, 5.25e-4).with_role_swap(vec![false, false])).unwrap();
    let text = s.to_text();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# phonon-dd schedule"));
    assert_eq!(lines.next(), Some("MODES 3"));
    assert!(text.contains("\nPULSE 2\n"));
    assert!(text.lines().filter(|l| l.starts_with("EVOLVE ")).count() >= 4);
    assert_eq!(PulseSchedule::from_text(&text).unwrap(), s);
}

#[test]
fn header_is_required() {
    assert!(PulseSchedule::from_text("EVOLVE 1e-3\n").is_err());
    assert!(PulseSchedule::from_text("MODES 2\nEVOLVE soon\n").is_err());
    assert!(PulseSchedule::from_text("MODES 2\nPULSE 5\nEVOLVE 1\n").is_err());
}
