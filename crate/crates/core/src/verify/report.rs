//! Uniform result record for the numerical verification suite: every check
//! compares two numbers under a named relation, and a report is a list of
//! checks plus the quantities they were computed from.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// One named comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: f64,
    /// `"<="`, `"<"`, `">="`, `">"`, `"=="`, or `"~"` (within `tol`).
    pub op: String,
    pub rhs: f64,
    /// Absolute tolerance; only consulted by `"~"`.
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    fn mk(name: impl Into<String>, lhs: f64, op: &str, rhs: f64, tol: f64, pass: bool) -> Check {
        Check {
            name: name.into(),
            lhs,
            op: op.to_owned(),
            rhs,
            tol,
            pass,
        }
    }

    pub fn le(name: impl Into<String>, lhs: f64, rhs: f64) -> Check {
        Check::mk(name, lhs, "<=", rhs, 0.0, lhs <= rhs)
    }

    pub fn lt(name: impl Into<String>, lhs: f64, rhs: f64) -> Check {
        Check::mk(name, lhs, "<", rhs, 0.0, lhs < rhs)
    }

    pub fn ge(name: impl Into<String>, lhs: f64, rhs: f64) -> Check {
        Check::mk(name, lhs, ">=", rhs, 0.0, lhs >= rhs)
    }

    pub fn gt(name: impl Into<String>, lhs: f64, rhs: f64) -> Check {
        Check::mk(name, lhs, ">", rhs, 0.0, lhs > rhs)
    }

    pub fn eq(name: impl Into<String>, lhs: f64, rhs: f64) -> Check {
        Check::mk(name, lhs, "==", rhs, 0.0, lhs == rhs)
    }

    /// `|lhs - rhs| <= tol`, failing on non-finite values.
    pub fn approx(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Check {
        let pass = (lhs - rhs).abs() <= tol && lhs.is_finite() && rhs.is_finite();
        Check::mk(name, lhs, "~", rhs, tol, pass)
    }
}

/// A named bundle of checks with the underlying numbers, serializable as a
/// verification artifact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    /// Free-form inputs (scene id, parameter strings) for the record.
    pub inputs: BTreeMap<String, String>,
    /// Named numeric quantities the checks were derived from.
    pub quantities: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(name: impl Into<String>) -> VerificationReport {
        VerificationReport {
            name: name.into(),
            inputs: BTreeMap::new(),
            quantities: BTreeMap::new(),
            checks: Vec::new(),
        }
    }

    pub fn input(&mut self, key: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.inputs.insert(key.into(), value.into());
        self
    }

    pub fn quantity(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.quantities.insert(key.into(), value);
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Names of the failing checks.
    pub fn failures(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect()
    }
}
