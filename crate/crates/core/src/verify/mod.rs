//! Embedding inequalities checked on concrete scenarios: hypothesis
//! diagnostics, both sides of each inequality, and the necessity direction.

pub mod constants;
mod counterexample;
mod global;
mod local;
mod necessity;
mod report;

pub use counterexample::{counterexample_run, CounterexampleParams};
pub use global::{check_global, GlobalProblem, GlobalTheorem};
pub use local::{check_moser_trudinger_local, check_morrey_local, check_sobolev_local, localemb_check, LocalProblem};
pub use necessity::{necessity_run, NecessityMode, NecessityProblem, ATOM_FACTOR};
pub use report::{Hypothesis, Provenance, VerificationReport, Verdict};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exponent::{log_holder_constant, log_holder_constant_recip, ExponentField, Tag};
use crate::hajlasz::{minimal_scalar_gradient, minimal_vector_gradient, Scale};
use crate::norms::luxemburg_on;
use crate::root::golden_min;
use crate::space::MetricMeasureSpace;

/// Default dilation of the ball carrying the gradient.
pub const DEFAULT_SIGMA: f64 = 2.0;

/// Tolerance for `s p = Q` and `s = alpha`.
pub const EQUALITY_TOL: f64 = 1e-9;

/// Which gradient norm plays the role of `||g||`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    /// Scalar gradients, `L^p` norm.
    M,
    /// Vector gradients in `L^p(l^q)`.
    TriebelLizorkin {
        #[serde(with = "crate::float")]
        q: f64,
    },
    /// Vector gradients in `l^q(L^p)`.
    Besov {
        #[serde(with = "crate::float")]
        q: f64,
    },
}

impl Mode {
    pub fn name(&self) -> String {
        match self {
            Mode::M => "M".into(),
            Mode::TriebelLizorkin { q } => format!("TL(q={q})"),
            Mode::Besov { q } => format!("Besov(q={q})"),
        }
    }
}

/// Minimal gradient norm of `u` on the whole of `space`, and whether the
/// solve was heuristic.
pub(crate) fn gradient_norm(
    space: &MetricMeasureSpace,
    u: &[f64],
    s: &ExponentField,
    p: &ExponentField,
    mode: Mode,
    tol: f64,
) -> Result<(f64, bool)> {
    let sol = match mode {
        Mode::M => minimal_scalar_gradient(space, u, s, p, tol)?,
        Mode::TriebelLizorkin { q } => {
            let q = ExponentField::constant(Tag::Q, space.len(), q)?;
            minimal_vector_gradient(space, u, s, p, &q, Scale::LpLq, tol)?
        }
        Mode::Besov { q } => {
            let q = ExponentField::constant(Tag::Q, space.len(), q)?;
            minimal_vector_gradient(space, u, s, p, &q, Scale::LqLp, tol)?
        }
    };
    Ok((sol.objective.value, sol.heuristic))
}

/// Minimal gradient norm of `u` restricted to `set`, computed in the
/// subspace `set`.
pub(crate) fn gradient_norm_on(
    space: &MetricMeasureSpace,
    set: &[usize],
    u: &[f64],
    s: &ExponentField,
    p: &ExponentField,
    mode: Mode,
    tol: f64,
) -> Result<(f64, bool)> {
    let sub = space.subspace(set)?;
    let us: Vec<f64> = set.iter().map(|&i| u[i]).collect();
    gradient_norm(&sub, &us, &s.restrict(set), &p.restrict(set), mode, tol)
}

/// `inf_c ||u - c||_{L^gamma(set)}` and the minimizing `c`; the flag is set
/// when `gamma^- < 1` and the search is a grid refinement.
pub(crate) fn inf_over_constants(
    space: &MetricMeasureSpace,
    u: &[f64],
    gamma: &ExponentField,
    set: &[usize],
    tol: f64,
) -> (f64, f64, bool) {
    let lo = set.iter().map(|&i| u[i]).fold(f64::INFINITY, f64::min);
    let hi = set.iter().map(|&i| u[i]).fold(f64::NEG_INFINITY, f64::max);
    if set.is_empty() || lo == hi {
        return (0.0, if set.is_empty() { 0.0 } else { lo }, false);
    }
    let f = |c: f64| {
        let v: Vec<f64> = u.iter().map(|x| x - c).collect();
        luxemburg_on(space, &v, gamma, set, tol).value
    };
    let xtol = (hi - lo) * 1e-10;
    let convex = set.iter().all(|&i| gamma.get(i) >= 1.0);
    if convex {
        let (c, v) = golden_min(f, lo, hi, xtol);
        return (v, c, false);
    }
    let step = (hi - lo) / 63.0;
    let (k, _) = (0..64)
        .map(|k| (k, f(lo + k as f64 * step)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let a = (lo + (k as f64 - 1.0) * step).max(lo);
    let b = (lo + (k as f64 + 1.0) * step).min(hi);
    let (c, v) = golden_min(f, a, b, xtol);
    (v, c, true)
}

/// `mu`-average of `u` over `set`.
pub(crate) fn mean_on(space: &MetricMeasureSpace, u: &[f64], set: &[usize]) -> f64 {
    if let Some(&first) = set.first() {
        if set.iter().all(|&i| u[i] == u[first]) {
            return u[first];
        }
    }
    let mass = space.measure(set);
    set.iter().map(|&i| space.weight(i) * u[i]).sum::<f64>() / mass
}

/// The log-Hölder diagnostic for `s`, `p` and `Q`. Always holds on a finite
/// space; the constants are what matter.
pub(crate) fn log_holder_hypothesis(
    report: &mut VerificationReport,
    space: &MetricMeasureSpace,
    s: &ExponentField,
    p: &ExponentField,
    q_dim: &ExponentField,
) {
    let cs = log_holder_constant(s, space);
    let cp = log_holder_constant_recip(p, space, None);
    let cq = log_holder_constant(q_dim, space);
    report.detail("c_log_s", cs);
    report.detail("c_log_recip_p", cp);
    report.detail("c_log_Q", cq);
    let ok = cs.is_finite() && cp.is_finite() && cq.is_finite();
    report.hypothesis("log-Hölder s, p, Q", ok, format!("C_log(s) = {cs}, C_log(1/p) = {cp}, C_log(Q) = {cq}"));
}

/// `min (Q - s p)` over all points.
pub(crate) fn subcritical_gap(s: &ExponentField, p: &ExponentField, q_dim: &ExponentField) -> f64 {
    (0..s.len()).map(|i| q_dim.get(i) - s.get(i) * p.get(i)).fold(f64::INFINITY, f64::min)
}
