use std::collections::BTreeMap;
use std::fmt;

use super::{Metric, ResultRecord};
use crate::error::{Error, Result};

/// Stored reference errors, one line per scenario.
pub const REFERENCE_CSV: &str = include_str!("../../data/reference_values.csv");

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// Within a multiplicative factor either way.
    Factor(f64),
    /// Within a relative deviation.
    Relative(f64),
}

impl Tolerance {
    pub fn accepts(self, reference: f64, computed: f64) -> bool {
        match self {
            Tolerance::Factor(f) => computed >= reference / f && computed <= reference * f,
            Tolerance::Relative(r) => (computed / reference - 1.0).abs() <= r,
        }
    }
}

impl fmt::Display for Tolerance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tolerance::Factor(x) => write!(f, "x{x}"),
            Tolerance::Relative(r) => write!(f, "±{}%", r * 100.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub metric: Metric,
    pub value: f64,
    pub tolerance: Tolerance,
}

/// Reference table keyed by scenario name.
pub fn reference_values() -> Result<BTreeMap<String, Reference>> {
    parse_references(REFERENCE_CSV)
}

fn parse_references(text: &str) -> Result<BTreeMap<String, Reference>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse { line: line_no, message };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [name, metric, value, kind, tol] = fields[..] else {
            return Err(bad(format!("expected 5 fields, got {}", fields.len())));
        };
        let value: f64 = value.parse().map_err(|_| bad(format!("bad value `{value}`")))?;
        let tol: f64 = tol.parse().map_err(|_| bad(format!("bad tolerance `{tol}`")))?;
        let tolerance = match kind {
            "factor" => Tolerance::Factor(tol),
            "relative" => Tolerance::Relative(tol),
            other => return Err(bad(format!("unknown tolerance kind `{other}`"))),
        };
        out.insert(
            name.to_string(),
            Reference {
                metric: Metric::parse(metric)?,
                value,
                tolerance,
            },
        );
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// No stored value to compare with.
    Unchecked,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Unchecked => "-",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub metric: Metric,
    pub computed: f64,
    pub reference: Option<Reference>,
    pub verdict: Verdict,
}

impl ReportRow {
    pub fn ratio(&self) -> Option<f64> {
        self.reference.map(|r| self.computed / r.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.verdict != Verdict::Fail)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("scenario,metric,computed,reference,ratio,tolerance,verdict\n");
        for r in &self.rows {
            let (reference, ratio, tol) = match r.reference {
                Some(re) => (
                    format!("{:.3e}", re.value),
                    format!("{:.3}", r.computed / re.value),
                    re.tolerance.to_string(),
                ),
                None => Default::default(),
            };
            s.push_str(&format!(
                "{},{},{:.6e},{},{},{},{}\n",
                r.scenario,
                r.metric.as_str(),
                r.computed,
                reference,
                ratio,
                tol,
                r.verdict.as_str()
            ));
        }
        s
    }

    pub fn to_table(&self) -> String {
        let mut s = format!(
            "{:<10} {:<3} {:>11} {:>11} {:>8} {:>7} {}\n",
            "scenario", "", "computed", "reference", "ratio", "tol", "verdict"
        );
        for r in &self.rows {
            let (reference, ratio, tol) = match r.reference {
                Some(re) => (
                    format!("{:.2e}", re.value),
                    format!("{:.3}", r.computed / re.value),
                    re.tolerance.to_string(),
                ),
                None => ("".into(), "".into(), "".into()),
            };
            s.push_str(&format!(
                "{:<10} {:<3} {:>11.3e} {:>11} {:>8} {:>7} {}\n",
                r.scenario,
                r.metric.as_str(),
                r.computed,
                reference,
                ratio,
                tol,
                r.verdict.as_str()
            ));
        }
        s
    }
}

/// Compares records against the stored references, sorted by scenario name.
pub fn emit_report(records: &[ResultRecord]) -> Result<Report> {
    if records.is_empty() {
        return Err(Error::config("no results to report"));
    }
    let refs = reference_values()?;
    let mut rows: Vec<ReportRow> = records
        .iter()
        .map(|rec| {
            let reference = refs.get(&rec.scenario).copied();
            let metric = reference.map_or(rec.metric(), |r| r.metric);
            let computed = rec.value(metric).unwrap_or(f64::NAN);
            let verdict = match reference {
                None => Verdict::Unchecked,
                Some(r) if r.tolerance.accepts(r.value, computed) => Verdict::Pass,
                Some(_) => Verdict::Fail,
            };
            ReportRow {
                scenario: rec.scenario.clone(),
                metric,
                computed,
                reference,
                verdict,
            }
        })
        .collect();
    rows.sort_by(|a, b| a.scenario.cmp(&b.scenario));
    Ok(Report { rows })
}
