//! Inequality records shared by the checkers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Additive part of the comparison slack.
pub const ABS_SLACK: f64 = 1e-8;
/// Relative part of the comparison slack, scaled by the right-hand side.
pub const REL_SLACK: f64 = 1e-6;

/// Slack allowed when asserting `lhs <= rhs`.
pub fn slack(rhs: f64) -> f64 {
    ABS_SLACK + REL_SLACK * rhs.abs()
}

/// `lhs <= rhs` up to [`slack`].
pub fn holds(lhs: f64, rhs: f64) -> bool {
    if lhs.is_nan() || rhs.is_nan() {
        return false;
    }
    if rhs == f64::INFINITY {
        return true;
    }
    lhs <= rhs + slack(rhs)
}

/// One evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "crate::float")]
    pub lhs: f64,
    #[serde(with = "crate::float")]
    pub rhs: f64,
    /// `rhs - lhs`.
    #[serde(with = "crate::float")]
    pub margin: f64,
    pub pass: bool,
}

impl Check {
    pub fn le(name: &str, lhs: f64, rhs: f64) -> Check {
        Check { name: name.to_string(), lhs, rhs, margin: rhs - lhs, pass: holds(lhs, rhs) }
    }

    /// `|a - b| <= tol`, recorded as `|a - b|` against `tol`.
    pub fn close(name: &str, a: f64, b: f64, tol: f64) -> Check {
        let diff = if a == b { 0.0 } else { libm::fabs(a - b) };
        Check { name: name.to_string(), lhs: diff, rhs: tol, margin: tol - diff, pass: diff <= tol }
    }

    fn badness(&self) -> f64 {
        if self.pass {
            -(self.margin + slack(self.rhs))
        } else if self.margin.is_nan() {
            f64::INFINITY
        } else {
            -self.margin
        }
    }

    /// Keep whichever of the two instances is closer to failing.
    pub fn worst(self, other: Check) -> Check {
        if !other.pass && self.pass {
            return other;
        }
        if !self.pass && other.pass {
            return self;
        }
        if other.badness() > self.badness() {
            other
        } else {
            self
        }
    }
}

/// A named group of checks; passes iff every check passes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(name: &str) -> CheckReport {
        CheckReport { name: name.to_string(), checks: Vec::new(), pass: true }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn with(mut self, check: Check) -> CheckReport {
        self.push(check);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Smallest margin over all checks.
    pub fn min_margin(&self) -> f64 {
        self.checks.iter().map(|c| c.margin).fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slack_is_absolute_plus_relative() {
        assert!(holds(1.0 + 5e-7, 1.0));
        assert!(!holds(1.0 + 1e-5, 1.0));
        assert!(holds(5e-9, 0.0));
        assert!(!holds(f64::NAN, 1.0));
    }

    #[test]
    fn worst_prefers_failures() {
        let a = Check::le("a", 0.0, 1.0);
        let b = Check::le("b", 2.0, 1.0);
        assert_eq!(a.clone().worst(b.clone()).name, "b");
        let c = Check::le("c", 0.9, 1.0);
        assert_eq!(a.worst(c).name, "c");
    }
}
