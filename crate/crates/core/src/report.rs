//! Check records shared by all suites.

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub instance: Value,
    /// absolute residual (exact checks: number of failing instances)
    pub residual: f64,
    /// tolerance budget before the safety factor (exact checks: 0)
    pub budget: f64,
    pub pass: bool,
    pub detail: Value,
}

impl CheckRecord {
    /// Exact check: passes iff there are no failures.
    pub fn exact(suite: &str, check: &str, instance: Value, failures: &[String], detail: Value) -> Self {
        let mut detail = detail;
        if !failures.is_empty() {
            let shown: Vec<&String> = failures.iter().take(20).collect();
            detail = serde_json::json!({ "info": detail, "failures": shown });
        }
        Self {
            suite: suite.into(),
            check: check.into(),
            instance,
            residual: failures.len() as f64,
            budget: 0.0,
            pass: failures.is_empty(),
            detail,
        }
    }

    /// Numeric check: passes iff `residual < budget * safety`.
    pub fn numeric(
        suite: &str,
        check: &str,
        instance: Value,
        residual: f64,
        budget: f64,
        safety: f64,
        detail: Value,
    ) -> Self {
        Self {
            suite: suite.into(),
            check: check.into(),
            instance,
            residual,
            budget,
            pass: residual.is_finite() && residual < budget * safety,
            detail,
        }
    }

    /// A failure caused by an error before any residual could be computed.
    pub fn errored(suite: &str, check: &str, instance: Value, err: &str) -> Self {
        Self {
            suite: suite.into(),
            check: check.into(),
            instance,
            residual: f64::INFINITY,
            budget: 0.0,
            pass: false,
            detail: serde_json::json!({ "error": err }),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub summary: bool,
    pub total: usize,
    pub passed: usize,
    pub failed: Vec<String>,
}

pub fn summarize(records: &[CheckRecord]) -> Summary {
    let failed: Vec<String> = records
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}/{} {}", r.suite, r.check, r.instance))
        .collect();
    Summary { summary: true, total: records.len(), passed: records.len() - failed.len(), failed }
}
