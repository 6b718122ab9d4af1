//! Verification reports.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::check::{slack, Check};

/// One checked hypothesis of a theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub holds: bool,
    pub diagnostics: String,
}

impl Hypothesis {
    pub fn new(name: &str, holds: bool, diagnostics: String) -> Hypothesis {
        Hypothesis { name: name.to_string(), holds, diagnostics }
    }
}

/// Where the constant on the right-hand side came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Measured on this scenario: the smallest constant making it hold.
    Empirical,
    /// Evaluated from an explicit formula.
    Formula,
    /// Given by the caller.
    Supplied,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub scenario: String,
    pub hypotheses: Vec<Hypothesis>,
    /// The check nearest to failing, or 0 when nothing could be evaluated.
    #[serde(with = "crate::float")]
    pub lhs: f64,
    #[serde(with = "crate::float")]
    pub rhs: f64,
    #[serde(with = "crate::float")]
    pub constant_used: f64,
    pub provenance: Provenance,
    /// `rhs - lhs`.
    #[serde(with = "crate::float")]
    pub margin: f64,
    /// All hypotheses hold and every check passes.
    pub pass: bool,
    pub verdict: Verdict,
    pub checks: Vec<Check>,
    /// Named intermediate quantities.
    #[serde(with = "crate::float::map")]
    pub details: BTreeMap<String, f64>,
}

impl VerificationReport {
    pub fn new(theorem: &str) -> VerificationReport {
        VerificationReport {
            theorem: theorem.to_string(),
            scenario: String::new(),
            hypotheses: Vec::new(),
            lhs: 0.0,
            rhs: 0.0,
            constant_used: 0.0,
            provenance: Provenance::Empirical,
            margin: 0.0,
            pass: false,
            verdict: Verdict::NotApplicable,
            checks: Vec::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn with_scenario(mut self, scenario: &str) -> VerificationReport {
        self.scenario = scenario.to_string();
        self
    }

    pub fn hypothesis(&mut self, name: &str, holds: bool, diagnostics: String) {
        self.hypotheses.push(Hypothesis::new(name, holds, diagnostics));
    }

    pub fn detail(&mut self, name: &str, value: f64) {
        self.details.insert(name.to_string(), value);
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn constant(&mut self, value: f64, provenance: Provenance) {
        self.constant_used = value;
        self.provenance = provenance;
    }

    pub fn hypotheses_ok(&self) -> bool {
        self.hypotheses.iter().all(|h| h.holds)
    }

    pub fn applicable(&self) -> bool {
        self.verdict != Verdict::NotApplicable
    }

    /// Sets `lhs`, `rhs`, `margin`, `pass` and `verdict` from the checks and
    /// hypotheses. Without checks the report is not applicable.
    pub fn finish(mut self) -> VerificationReport {
        let worst = self.checks.iter().cloned().reduce(Check::worst);
        if let Some(w) = &worst {
            self.lhs = w.lhs;
            self.rhs = w.rhs;
            self.margin = w.margin;
        }
        let checks_ok = worst.as_ref().is_some_and(|_| self.checks.iter().all(|c| c.pass));
        self.verdict = if !self.hypotheses_ok() || worst.is_none() {
            Verdict::NotApplicable
        } else if checks_ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        self.pass = self.verdict == Verdict::Pass;
        self
    }

    /// `margin >= -slack(rhs)`.
    pub fn margin_ok(&self) -> bool {
        self.margin >= -slack(self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdicts() {
        let mut r = VerificationReport::new("t");
        r.hypothesis("h", true, String::new());
        r.check(Check::le("a", 1.0, 2.0));
        r.check(Check::le("b", 1.0, 1.5));
        let r = r.finish();
        assert!(r.pass);
        assert_eq!(r.rhs, 1.5);
        assert!(r.margin_ok());

        let mut r = VerificationReport::new("t");
        r.hypothesis("h", true, String::new());
        r.check(Check::le("a", 3.0, 2.0));
        let r = r.finish();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.margin_ok());

        let mut r = VerificationReport::new("t");
        r.hypothesis("h", false, "x".into());
        r.check(Check::le("a", 1.0, 2.0));
        assert_eq!(r.finish().verdict, Verdict::NotApplicable);
    }
}
