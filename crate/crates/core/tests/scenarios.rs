use std::f64::consts::PI;

use phonon_dd::scenario::{
    emit_report, find_scenario, parse_config, run_scenario, sweep, to_config_text, write_results_csv, SweepAxis,
    Verdict,
};

fn csv_of(name: &str, cutoff: usize) -> Vec<u8> {
    let mut c = find_scenario(name).unwrap();
    c.cutoff = cutoff;
    c.max_cutoff = cutoff;
    let run = run_scenario(&c).unwrap();
    let mut buf = Vec::new();
    run.write_populations_csv(&mut buf).unwrap();
    buf
}

#[test]
fn reruns_are_bit_identical() {
    assert_eq!(csv_of("fig4a", 4), csv_of("fig4a", 4));
    assert_eq!(csv_of("fig6b", 3), csv_of("fig6b", 3));
}

#[test]
fn populations_csv_shape() {
    let text = String::from_utf8(csv_of("fig6a", 3)).unwrap();
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    assert_eq!(header[0], "t_us");
    assert_eq!(*header.last().unwrap(), "rest");
    for label in ["111", "120", "102"] {
        assert!(header.contains(&label), "{header:?}");
    }
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 512);
    for row in &rows {
        let sum: f64 = row[1..].iter().sum();
        assert!((sum - 1.0).abs() < 1e-11);
    }
    assert_eq!(rows[0][0], 0.0);
}

#[test]
fn config_file_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.cfg");
    std::fs::write(
        &path,
        "base = fig3\nname = fig3-small\nfock.cutoff = 3\nfock.max_cutoff = 5\n",
    )
    .unwrap();
    let config = parse_config(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let run = run_scenario(&config).unwrap();
    assert!((run.record.error_e - 6.4e-3).abs() < 0.1e-3);
    assert_eq!(run.record.cutoff_history.len(), 2);
    let echo = parse_config(&to_config_text(&config)).unwrap();
    assert_eq!(to_config_text(&echo), to_config_text(&config));
    assert_eq!(echo.initial, config.initial);
}

#[test]
fn spacing_sweep_follows_cubic_law() {
    let mut base = find_scenario("fig3").unwrap();
    base.cutoff = 3;
    base.max_cutoff = 3;
    let rows = sweep(&base, SweepAxis::Spacing, &[43.8, 27.6]).unwrap();
    assert_eq!(rows[0].value, 27.6);
    let rate = |d: f64| {
        let mut c = base.clone();
        c.spacing = d * 1e-6;
        c.coupling_rate().unwrap()
    };
    let ratio = rate(27.6) / rate(43.8);
    assert!((ratio - 4.0).abs() < 0.04, "{ratio}");
    assert!((rate(43.8) / (2.0 * PI) - 475.9).abs() < 0.1);
    // the same plain ordering gives the same error at any spacing, since T scales with 1/κ
    let e: Vec<f64> = rows.iter().map(|r| r.outcome.as_ref().unwrap().error_e).collect();
    assert!((e[0] / e[1] - 1.0).abs() < 1e-6);
}

#[test]
fn single_value_sweep_matches_run() {
    let mut base = find_scenario("fig4a").unwrap();
    base.cutoff = 3;
    base.max_cutoff = 3;
    let rows = sweep(&base, SweepAxis::Repetitions, &[1.0]).unwrap();
    let direct = run_scenario(&base).unwrap();
    assert_eq!(rows[0].outcome.as_ref().unwrap().error_e, direct.record.error_e);
}

#[test]
fn report_from_runs() {
    let mut records = Vec::new();
    for name in ["fig3", "fig7a"] {
        let mut c = find_scenario(name).unwrap();
        c.cutoff = 3;
        c.max_cutoff = 3;
        records.push(run_scenario(&c).unwrap().record);
    }
    let report = emit_report(&records).unwrap();
    assert!(report.rows.iter().all(|r| r.verdict == Verdict::Pass));
    assert!(report.to_table().contains("6.40e-3"));
    let mut buf = Vec::new();
    write_results_csv(&records, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.lines().nth(2).unwrap().starts_with("fig7a,EB,1.835"));
}
