//! Global embeddings on the whole space.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::report::{Provenance, VerificationReport};
use super::{gradient_norm, inf_over_constants, log_holder_hypothesis, mean_on, subcritical_gap, Mode, EQUALITY_TOL};
use crate::check::Check;
use crate::error::{Error, Result};
use crate::exponent::{holder_exponent, sobolev_conjugate, strictly_dominates, ExponentField, Tag};
use crate::norms::{holder_norm, luxemburg};
use crate::regularity::best_lower_constant;
use crate::space::MetricMeasureSpace;

/// Spaces up to this size get an explicit doubling estimate.
const DOUBLING_ESTIMATE_MAX: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalTheorem {
    /// `||u||_gamma <= C (||u||_p + ||g||_p)` on a bounded space.
    Bounded,
    /// The same inequality under geometric doubling.
    DoublingSob,
    /// `||u||_beta <= C (||u||_p + ||g||_p)` for `beta >> p` when `s p = Q`.
    DoublingMt,
    /// `||u||_{C^{0,alpha}} <= C (||u||_p + ||g||_p)` when `s p >> Q`.
    DoublingHolder,
}

impl GlobalTheorem {
    pub fn name(self) -> &'static str {
        match self {
            GlobalTheorem::Bounded => "bounded",
            GlobalTheorem::DoublingSob => "doubling_sob",
            GlobalTheorem::DoublingMt => "doubling_mt",
            GlobalTheorem::DoublingHolder => "doubling_holder",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GlobalProblem<'a> {
    pub space: &'a MetricMeasureSpace,
    pub u: &'a [f64],
    pub s: &'a ExponentField,
    pub p: &'a ExponentField,
    pub q_dim: &'a ExponentField,
    pub mode: Mode,
    /// Upper end of the regularity range; 1 when absent.
    pub delta: Option<f64>,
    /// Target exponent of `DoublingMt`; `2 p` when absent.
    pub beta: Option<&'a ExponentField>,
    pub tol: f64,
}

fn doubling_hypotheses(report: &mut VerificationReport, space: &MetricMeasureSpace, delta: f64) {
    let n = space.len();
    let diag = if n <= DOUBLING_ESTIMATE_MAX {
        let m = space.estimate_doubling();
        report.detail("doubling_estimate", m as f64);
        format!("greedy estimate M = {m}")
    } else {
        format!("finite space, M <= {n}")
    };
    report.hypothesis("geometrically doubling", n > 0, diag);
    let sup = (0..n).map(|x| space.ball_measure(x, delta)).fold(0.0, f64::max);
    report.detail("sup_ball_mass", sup);
    report.hypothesis("sup mu(B(x,delta)) < inf", sup.is_finite(), format!("sup = {sup}"));
}

pub fn check_global(pr: &GlobalProblem, theorem: GlobalTheorem, candidate: Option<f64>) -> Result<VerificationReport> {
    let space = pr.space;
    let n = space.len();
    if pr.u.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: pr.u.len() });
    }
    if n == 0 {
        return Err(Error::EmptySet);
    }
    pr.s.check_len(n)?;
    pr.p.check_len(n)?;
    pr.q_dim.check_len(n)?;
    let delta = pr.delta.unwrap_or(1.0);
    let mut report = VerificationReport::new(theorem.name());
    report.scenario = format!("n={} mode={} delta={}", n, pr.mode.name(), delta);
    let b = best_lower_constant(space, pr.q_dim, space.min_distance().map(|d| d.min(delta)), Some(delta))?.b_lower.min(1.0);
    report.detail("b_lower", b);
    report.hypothesis("lower Ahlfors Q-regular up to delta", b > 0.0, format!("b = {b}"));
    log_holder_hypothesis(&mut report, space, pr.s, pr.p, pr.q_dim);

    let u_p = luxemburg(space, pr.u, pr.p, pr.tol).value;
    let (grad, heuristic) = gradient_norm(space, pr.u, pr.s, pr.p, pr.mode, pr.tol)?;
    let core = u_p + grad;
    report.detail("u_Lp", u_p);
    report.detail("gradient_norm", grad);
    report.detail("heuristic", if heuristic { 1.0 } else { 0.0 });

    let lhs = match theorem {
        GlobalTheorem::Bounded | GlobalTheorem::DoublingSob => {
            if theorem == GlobalTheorem::Bounded {
                let diam = space.diameter();
                report.detail("diameter", diam);
                report.hypothesis("X bounded", diam.is_finite(), format!("diam X = {diam}"));
            } else {
                doubling_hypotheses(&mut report, space, delta);
            }
            let gap = subcritical_gap(pr.s, pr.p, pr.q_dim);
            report.hypothesis("sp << Q", gap > 0.0, format!("min(Q - s p) = {gap}"));
            if !(gap > 0.0) {
                return Ok(report.finish());
            }
            let gamma = sobolev_conjugate(pr.q_dim, pr.s, pr.p)?;
            let all: Vec<usize> = (0..n).collect();
            let (inf_c, _, _) = inf_over_constants(space, pr.u, &gamma, &all, pr.tol);
            report.detail("inf_c_norm", inf_c);
            report.detail("homogeneous_constant", if inf_c == 0.0 { 0.0 } else { inf_c / grad });
            luxemburg(space, pr.u, &gamma, pr.tol).value
        }
        GlobalTheorem::DoublingMt => {
            doubling_hypotheses(&mut report, space, delta);
            let dev = (0..n).map(|i| libm::fabs(pr.s.get(i) * pr.p.get(i) - pr.q_dim.get(i))).fold(0.0, f64::max);
            report.hypothesis("sp = Q", dev <= EQUALITY_TOL, format!("max |s p - Q| = {dev}"));
            let beta = match pr.beta {
                Some(b) => b.clone(),
                None => ExponentField::new(Tag::P, pr.p.values().iter().map(|v| 2.0 * v).collect())?,
            };
            beta.check_len(n)?;
            let dom = strictly_dominates(&beta, pr.p)?;
            report.hypothesis("beta >> p", dom, format!("beta^- = {}", beta.min()));
            let all: Vec<usize> = (0..n).collect();
            let mean = mean_on(space, pr.u, &all);
            let avg = (0..n)
                .map(|i| {
                    let d = libm::fabs(pr.u[i] - mean);
                    space.weight(i) * libm::exp(if d == 0.0 { 0.0 } else { d / grad })
                })
                .sum::<f64>()
                / space.total_mass();
            report.detail("mt_average", avg);
            luxemburg(space, pr.u, &beta, pr.tol).value
        }
        GlobalTheorem::DoublingHolder => {
            let gap = -subcritical_gap(pr.s, pr.p, pr.q_dim);
            report.hypothesis("sp >> Q", gap > 0.0, format!("min(s p - Q) = {gap}"));
            if !(gap > 0.0) {
                return Ok(report.finish());
            }
            let alpha = holder_exponent(pr.q_dim, pr.s, pr.p)?;
            holder_norm(space, pr.u, &alpha)
        }
    };
    let empirical = if lhs == 0.0 { 0.0 } else { lhs / core };
    report.detail("empirical_constant", empirical);
    report.detail("core", core);
    let c = match candidate {
        Some(c) => {
            report.constant(c, Provenance::Supplied);
            c
        }
        None => {
            report.constant(empirical, Provenance::Empirical);
            empirical
        }
    };
    report.check(Check::le(theorem.name(), lhs, c * core));
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::coordinate;
    use crate::generators::grid2d;
    use crate::verify::Verdict;
    use alloc::vec;

    fn field(tag: Tag, n: usize, v: f64) -> ExponentField {
        ExponentField::constant(tag, n, v).unwrap()
    }

    #[test]
    fn constant_on_unit_mass() {
        let sp = grid2d(4, 4, 0.25).unwrap();
        let n = sp.len();
        let (s, p, q) = (field(Tag::S, n, 1.0), field(Tag::P, n, 1.0), field(Tag::Dim, n, 2.0));
        let u = vec![2.0; n];
        let pr = GlobalProblem { space: &sp, u: &u, s: &s, p: &p, q_dim: &q, mode: Mode::M, delta: None, beta: None, tol: 1e-10 };
        let r = check_global(&pr, GlobalTheorem::Bounded, None).unwrap();
        assert!(r.pass);
        // ||2||_{L^2} = 2 and ||2||_{L^1} + 0 = 2 on a space of mass 1
        assert!((r.details["empirical_constant"] - 1.0).abs() < 1e-8);
        assert!(r.details["gradient_norm"] < 1e-12);
    }

    #[test]
    fn bounded_grid_with_candidate() {
        let sp = grid2d(5, 5, 0.2).unwrap();
        let n = sp.len();
        let (s, p, q) = (field(Tag::S, n, 1.0), field(Tag::P, n, 1.0), field(Tag::Dim, n, 2.0));
        let u = coordinate(&sp, 0).unwrap();
        let pr = GlobalProblem { space: &sp, u: &u, s: &s, p: &p, q_dim: &q, mode: Mode::M, delta: None, beta: None, tol: 1e-9 };
        let r = check_global(&pr, GlobalTheorem::DoublingSob, None).unwrap();
        assert!(r.pass);
        let c = r.constant_used;
        assert!(c > 0.0 && c < 10.0);
        assert!(check_global(&pr, GlobalTheorem::DoublingSob, Some(2.0 * c)).unwrap().pass);
        assert_eq!(check_global(&pr, GlobalTheorem::DoublingSob, Some(0.5 * c)).unwrap().verdict, Verdict::Fail);
        assert_eq!(check_global(&pr, GlobalTheorem::DoublingHolder, None).unwrap().verdict, Verdict::NotApplicable);
    }
}
