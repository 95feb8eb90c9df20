//! Named pass/fail checks and the report envelope shared by the library and CLI.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub expected: String,
    pub actual: String,
    /// The mathematical statement the check is tied to.
    pub anchor: String,
}

impl Check {
    pub fn new(name: impl Into<String>, anchor: impl Into<String>, passed: bool, expected: impl ToString, actual: impl ToString) -> Self {
        Check {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            expected: expected.to_string(),
            actual: actual.to_string(),
            anchor: anchor.into(),
        }
    }

    /// Pass iff `expected == actual` as displayed strings.
    pub fn equal(name: impl Into<String>, anchor: impl Into<String>, expected: impl ToString, actual: impl ToString) -> Self {
        let (e, a) = (expected.to_string(), actual.to_string());
        let passed = e == a;
        Check::new(name, anchor, passed, e, a)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl From<&crate::structures::IdentityCheck> for Check {
    fn from(c: &crate::structures::IdentityCheck) -> Self {
        let expected = if c.expect_equal { "equal" } else { "unequal" };
        let actual = if c.equal { "equal".to_string() } else { format!("unequal: lhs = {}; rhs = {}", c.lhs, c.rhs) };
        Check::new(c.name.clone(), c.anchor.clone(), c.passed(), expected, actual)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: Vec<String>,
    pub checks: Vec<Check>,
    /// Wall-clock milliseconds; the only field allowed to vary between identical runs.
    pub timing_ms: f64,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub data: serde_json::Value,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report { tool_version: env!("CARGO_PKG_VERSION").to_string(), command, checks: Vec::new(), timing_ms: 0.0, data: serde_json::Value::Null }
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag}  {}\n      expected: {}\n      actual:   {}\n      anchor:   {}\n", c.name, c.expected, c.actual, c.anchor));
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        out.push_str(&format!("{} checks, {} failed\n", self.checks.len(), failed));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let mut r = Report::new(vec!["verify".into(), "structures".into()]);
        r.checks.push(Check::equal("n", "a", 3, 3));
        r.checks.push(Check::new("m", "b", false, "x", "y"));
        let s = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(!r.all_passed());
        assert!(s.contains("\"status\":\"fail\""));
    }
}
