//! JSON-lines reports: a header line, then one verdict per line ordered by
//! check identifier.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    pub instances: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Json>,
}

impl Verdict {
    pub fn pass(check: impl Into<String>, instances: u64) -> Self {
        Verdict { check: check.into(), passed: true, instances, detail: None, witness: None }
    }

    pub fn fail(check: impl Into<String>, instances: u64, detail: impl Into<String>, witness: Option<Json>) -> Self {
        Verdict {
            check: check.into(),
            passed: false,
            instances,
            detail: Some(detail.into()),
            witness,
        }
    }

    /// Pass if `failure` is `None`, otherwise fail with its detail and witness.
    pub fn from_outcome(check: impl Into<String>, instances: u64, failure: Option<(String, Json)>) -> Self {
        match failure {
            None => Self::pass(check, instances),
            Some((d, w)) => Self::fail(check, instances, d, Some(w)),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub command: String,
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Exact results keyed by name, rationals as `"num/den"`.
    #[serde(default)]
    pub values: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub header: Header,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new(command: impl Into<String>, args: Vec<String>, seed: Option<u64>) -> Self {
        Report {
            header: Header { command: command.into(), args, seed, values: BTreeMap::new() },
            verdicts: Vec::new(),
        }
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl ToString) {
        self.header.values.insert(key.into(), v.to_string());
    }

    pub fn push(&mut self, v: Verdict) {
        self.verdicts.push(v);
    }

    pub fn extend(&mut self, vs: impl IntoIterator<Item = Verdict>) {
        self.verdicts.extend(vs);
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    /// Canonical JSON-lines text. Verdicts are sorted by check identifier
    /// (stable, so equal identifiers keep insertion order).
    pub fn render(&self) -> String {
        let mut verdicts: Vec<&Verdict> = self.verdicts.iter().collect();
        verdicts.sort_by(|a, b| a.check.cmp(&b.check));
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for v in verdicts {
            out.push_str(&serde_json::to_string(v).expect("verdict serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Report> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = match lines.next() {
            Some(l) => serde_json::from_str(l).map_err(|e| crate::error::Error::parse(format!("report header: {e}")))?,
            None => return Err(crate::error::Error::parse("empty report")),
        };
        let verdicts = lines
            .enumerate()
            .map(|(i, l)| serde_json::from_str(l).map_err(|e| crate::error::Error::parse(format!("report line {}: {e}", i + 2))))
            .collect::<Result<_>>()?;
        Ok(Report { header, verdicts })
    }
}

pub fn emit_report(r: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, r.render())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new("validate", vec![], None);
        let text = r.render();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(Report::parse(&text).unwrap(), r);
    }

    #[test]
    fn verdicts_are_ordered_and_round_trip() {
        let mut r = Report::new("lawcheck", vec!["--grid".into(), "4".into()], Some(7));
        r.push(Verdict::pass("b", 3));
        r.push(Verdict::fail("a", 1, "broken", Some(serde_json::json!({"x": "1/2"}))));
        r.value("d", "3/10");
        let text = r.render();
        let back = Report::parse(&text).unwrap();
        assert_eq!(back.verdicts[0].check, "a");
        assert_eq!(back.render(), text);
        assert!(!back.passed());
    }
}
