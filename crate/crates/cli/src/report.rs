use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Mixed,
}

impl Verdict {
    /// Pass iff every non-vacuous result passes; fail iff none does.
    pub fn of(results: &[CheckResult]) -> Verdict {
        let counted: Vec<&CheckResult> = results.iter().filter(|r| !r.vacuous).collect();
        let passed = counted.iter().filter(|r| r.passed).count();
        if passed == counted.len() {
            Verdict::Pass
        } else if passed == 0 {
            Verdict::Fail
        } else {
            Verdict::Mixed
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail | Verdict::Mixed => 1,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub vacuous: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        CheckResult {
            name: name.into(),
            passed,
            vacuous: false,
            max_deviation: None,
            tolerance: None,
            witness: None,
            detail: Value::Null,
        }
    }

    pub fn deviation(mut self, max_deviation: f64, tolerance: f64) -> Self {
        self.max_deviation = Some(max_deviation);
        self.tolerance = Some(tolerance);
        self
    }

    pub fn witness(mut self, witness: Option<Value>) -> Self {
        self.witness = witness;
        self
    }

    pub fn detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn vacuous(mut self, vacuous: bool) -> Self {
        self.vacuous = vacuous;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub results: Vec<CheckResult>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, inputs: Value, results: Vec<CheckResult>) -> Self {
        let verdict = Verdict::of(&results);
        Report { version: SCHEMA_VERSION, command: command.into(), inputs, results, verdict, wall_time_ms: None }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are serializable")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("loccov {}\n", self.command);
        for r in &self.results {
            let status = match (r.vacuous, r.passed) {
                (true, _) => "SKIP",
                (false, true) => "PASS",
                (false, false) => "FAIL",
            };
            let _ = write!(out, "  [{status}] {}", r.name);
            if let (Some(d), Some(t)) = (r.max_deviation, r.tolerance) {
                let _ = write!(out, "  max_deviation={d:.3e} tolerance={t:.1e}");
            }
            out.push('\n');
            if let Some(w) = &r.witness {
                let _ = writeln!(out, "         witness: {w}");
            }
        }
        let _ = writeln!(out, "verdict: {}", self.verdict.as_str());
        if let Some(ms) = self.wall_time_ms {
            let _ = writeln!(out, "wall time: {ms:.1} ms");
        }
        out
    }
}
