use std::f64::consts::PI;

use phonon_dd::pulse::ShapedPulse;
use phonon_dd::scenario::{SECULAR_FREQUENCY as W0, T0};
use phonon_dd::trap::TrapParams;

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn csv_without_trap() {
    let p = ShapedPulse::pi_pulse(8.8 * T0, 4.4 * T0, W0).unwrap();
    let mut buf = Vec::new();
    p.write_csv(None, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("t_s,b,omega_rad_s,omega_sq_excess"));
    let r = rows(&text);
    assert_eq!(r.len(), p.samples.len());
    assert!(r.iter().all(|row| row.len() == 4));
    assert_eq!(r[0][0], 0.0);
    assert!((r.last().unwrap()[0] - 4e-6).abs() < 1e-15);
    let plateau = &r[r.len() / 2];
    assert!((plateau[1] - (1.0 - p.params.strength)).abs() < 1e-4);
}

#[test]
fn csv_with_voltages() {
    let p = ShapedPulse::pi_pulse(8.8 * T0, 4.4 * T0, W0).unwrap();
    let trap = TrapParams::for_radial_frequency(2.0 * PI * 30e6, 0.5e-3, 2.0 * PI * 0.5e6, W0).unwrap();
    let mut buf = Vec::new();
    p.write_csv(Some(&trap), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("t_s,b,omega_rad_s,omega_sq_excess,U0_V,V0_V"));
    let r = rows(&text);
    let (first, mid) = (&r[0], &r[r.len() / 2]);
    assert!(first[4].abs() < 1e-3);
    assert!(mid[4] > first[4]);
    assert!(mid[5] > first[5]);
    assert!((first[5] - 387.0).abs() < 5.0);
}

#[test]
fn export_is_deterministic() {
    let write = || {
        let p = ShapedPulse::pi_pulse(2.2 * T0, 1.0 * T0, W0).unwrap();
        let mut buf = Vec::new();
        p.write_csv(None, &mut buf).unwrap();
        buf
    };
    assert_eq!(write(), write());
}
