use std::fmt::Write;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    NoCertificate,
}

impl Verdict {
    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::NoCertificate => "NO-CERT",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub op: String,
    pub verdict: Verdict,
    pub detail: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub no_certificate: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub manifest: String,
    pub seed: u64,
    /// Claims the engine records but does not check.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub asserted: Vec<String>,
    pub checks: Vec<CheckResult>,
    pub summary: Summary,
}

impl Report {
    pub fn new(manifest: String, seed: u64, asserted: Vec<String>, checks: Vec<CheckResult>) -> Self {
        let mut summary = Summary { total: checks.len(), ..Default::default() };
        for c in &checks {
            match c.verdict {
                Verdict::Pass => summary.passed += 1,
                Verdict::Fail => summary.failed += 1,
                Verdict::NoCertificate => summary.no_certificate += 1,
            }
        }
        Report { manifest, seed, asserted, checks, summary }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.passed == self.summary.total
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub fn emit(r: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(r).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Text => text(r),
    }
}

fn text(r: &Report) -> String {
    let mut s = String::new();
    writeln!(s, "manifest {} (seed {})", r.manifest, r.seed).unwrap();
    for a in &r.asserted {
        writeln!(s, "  asserted by user: {a}").unwrap();
    }
    for c in &r.checks {
        write!(s, "{:<7} {} [{}]", c.verdict.label(), c.id, c.op).unwrap();
        if !c.detail.is_empty() {
            write!(s, ": {}", c.detail).unwrap();
        }
        if let Some(t) = c.timing_ms {
            write!(s, " ({t} ms)").unwrap();
        }
        s.push('\n');
        for w in &c.witness {
            writeln!(s, "          {w}").unwrap();
        }
    }
    writeln!(s, "{}/{} checks passed", r.summary.passed, r.summary.total).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(id: &str, verdict: Verdict) -> CheckResult {
        CheckResult { id: id.into(), op: "op".into(), verdict, detail: String::new(), witness: vec![], timing_ms: None }
    }

    #[test]
    fn summary_counts() {
        let r = Report::new(
            "m".into(),
            1,
            vec![],
            vec![result("a", Verdict::Pass), result("b", Verdict::Fail), result("c", Verdict::NoCertificate)],
        );
        assert_eq!((r.summary.total, r.summary.passed, r.summary.failed, r.summary.no_certificate), (3, 1, 1, 1));
        assert!(!r.all_passed());
        assert!(emit(&r, Format::Text).ends_with("1/3 checks passed\n"));
    }

    #[test]
    fn json_omits_absent_timing() {
        let r = Report::new("m".into(), 1, vec![], vec![result("a", Verdict::NoCertificate)]);
        let s = emit(&r, Format::Json);
        assert!(!s.contains("timing_ms"));
        assert!(s.contains("\"no-certificate\""));
    }
}
