//! Sobolev, Moser–Trudinger and Morrey inequalities on a single ball.

use alloc::format;

use super::constants::{holder_constant, kappa, median_factor};
use super::report::{Provenance, VerificationReport};
use super::{
    gradient_norm_on, inf_over_constants, log_holder_hypothesis, mean_on, subcritical_gap, Mode, EQUALITY_TOL,
};
use crate::check::Check;
use crate::error::{Error, Result};
use crate::exponent::{holder_exponent, sobolev_conjugate, ExponentField};
use crate::norms::luxemburg_on;
use crate::regularity::best_lower_constant;
use crate::space::{Ball, MetricMeasureSpace};

/// A ball `B0 = B(center, r0)`, a function and exponents. The gradient is
/// taken on `sigma B0`.
#[derive(Debug, Clone, Copy)]
pub struct LocalProblem<'a> {
    pub space: &'a MetricMeasureSpace,
    pub center: usize,
    pub r0: f64,
    pub sigma: f64,
    /// Upper end of the regularity range; `sigma r0` when absent.
    pub delta: Option<f64>,
    pub u: &'a [f64],
    pub s: &'a ExponentField,
    pub p: &'a ExponentField,
    pub q_dim: &'a ExponentField,
    pub mode: Mode,
    pub tol: f64,
}

/// Balls, gradient norm and the hypotheses shared by every local theorem.
struct Setup {
    b0: Ball,
    delta: f64,
    grad: f64,
}

fn setup(pr: &LocalProblem, report: &mut VerificationReport) -> Result<Setup> {
    let n = pr.space.len();
    if pr.u.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: pr.u.len() });
    }
    pr.s.check_len(n)?;
    pr.p.check_len(n)?;
    pr.q_dim.check_len(n)?;
    if !(pr.r0 > 0.0 && pr.r0.is_finite() && pr.sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < r0 < inf, got {}", pr.r0)));
    }
    let delta = pr.delta.unwrap_or(pr.sigma * pr.r0);
    let b0 = pr.space.ball(pr.center, pr.r0)?;
    let big = pr.space.ball(pr.center, pr.sigma * pr.r0)?;
    report.scenario = format!("n={} center={} r0={} sigma={} mode={}", n, pr.center, pr.r0, pr.sigma, pr.mode.name());
    report.hypothesis("sigma > 1", pr.sigma > 1.0, format!("sigma = {}", pr.sigma));
    report.hypothesis(
        "r0 <= delta/sigma",
        pr.r0 <= delta / pr.sigma * (1.0 + 1e-12),
        format!("r0 = {}, delta/sigma = {}", pr.r0, delta / pr.sigma),
    );
    let b = best_lower_constant(pr.space, pr.q_dim, pr.space.min_distance().map(|d| d.min(delta)), Some(delta)).map(|prof| prof.b_lower.min(1.0));
    let (ok, diag) = match b {
        Ok(b) => {
            report.detail("b_lower", b);
            (b > 0.0, format!("b = {b} on radii up to {delta}"))
        }
        Err(e) => (false, format!("{e}")),
    };
    report.hypothesis("lower Ahlfors Q-regular up to delta", ok, diag);
    log_holder_hypothesis(report, pr.space, pr.s, pr.p, pr.q_dim);
    let (grad, heuristic) = gradient_norm_on(pr.space, &big.members, pr.u, pr.s, pr.p, pr.mode, pr.tol)?;
    report.detail("gradient_norm", grad);
    report.detail("heuristic", if heuristic { 1.0 } else { 0.0 });
    report.detail("mu_B0", b0.measure);
    report.detail("delta", delta);
    Ok(Setup { b0, delta, grad })
}

fn ratio(lhs: f64, core: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / core
    }
}

/// Uses `candidate` if given, else the ratio `lhs / core`.
fn apply_constant(report: &mut VerificationReport, name: &str, lhs: f64, core: f64, candidate: Option<f64>) -> f64 {
    let empirical = ratio(lhs, core);
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
    report.check(Check::le(name, lhs, c * core));
    c
}

/// `inf_c ||u - c||_{L^gamma(B0)} <= C (mu(B0)/r0^{Q(x0)})^{1/gamma^-_{B0}} ||g||_{sigma B0}`
/// with `gamma = Q p / (Q - s p)`.
pub fn check_sobolev_local(pr: &LocalProblem, candidate: Option<f64>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("sobolev_local");
    let st = setup(pr, &mut report)?;
    let gap = subcritical_gap(pr.s, pr.p, pr.q_dim);
    report.hypothesis("sp << Q", gap > 0.0, format!("min(Q - s p) = {gap}"));
    if gap > 0.0 {
        sobolev_body(pr, &st, &mut report, candidate)?;
    }
    Ok(report.finish())
}

/// Returns `(gamma, gamma^-_{B0}, core)`.
fn sobolev_body(
    pr: &LocalProblem,
    st: &Setup,
    report: &mut VerificationReport,
    candidate: Option<f64>,
) -> Result<(ExponentField, f64, f64)> {
    let gamma = sobolev_conjugate(pr.q_dim, pr.s, pr.p)?;
    let (g_lo, _) = gamma.restricted_bounds(&st.b0.members)?;
    let (lhs, c, heuristic) = inf_over_constants(pr.space, pr.u, &gamma, &st.b0.members, pr.tol);
    let scale = libm::pow(st.b0.measure / libm::pow(pr.r0, pr.q_dim.get(pr.center)), 1.0 / g_lo);
    let core = scale * st.grad;
    report.detail("gamma_minus_B0", g_lo);
    report.detail("minimizing_c", c);
    report.detail("inf_c_heuristic", if heuristic { 1.0 } else { 0.0 });
    apply_constant(report, "Sobolev", lhs, core, candidate);
    Ok((gamma, g_lo, core))
}

/// Ball average of `exp(C1 |u - u_B0| / ||g||_{sigma B0})` against `C2`
/// (the average itself when `c2` is absent). Needs `s p = Q`.
pub fn check_moser_trudinger_local(pr: &LocalProblem, c1: Option<f64>, c2: Option<f64>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("moser_trudinger_local");
    let st = setup(pr, &mut report)?;
    let dev = (0..pr.space.len())
        .map(|i| libm::fabs(pr.s.get(i) * pr.p.get(i) - pr.q_dim.get(i)))
        .fold(0.0, f64::max);
    report.hypothesis("sp = Q", dev <= EQUALITY_TOL, format!("max |s p - Q| = {dev}"));
    let c1 = c1.unwrap_or(1.0);
    report.detail("C1", c1);
    let mean = mean_on(pr.space, pr.u, &st.b0.members);
    let constant_on_ball = st.b0.members.iter().all(|&i| pr.u[i] == mean);
    report.hypothesis(
        "gradient norm > 0",
        st.grad > 0.0 || constant_on_ball,
        format!("||g|| = {}", st.grad),
    );
    let mut acc = 0.0;
    for &i in &st.b0.members {
        let d = libm::fabs(pr.u[i] - mean);
        let arg = if d == 0.0 { 0.0 } else { c1 * d / st.grad };
        acc += pr.space.weight(i) * libm::exp(arg);
    }
    let avg = acc / st.b0.measure;
    report.detail("average", avg);
    let c2 = match c2 {
        Some(c) => {
            report.constant(c, Provenance::Supplied);
            c
        }
        None => {
            report.constant(avg, Provenance::Empirical);
            avg
        }
    };
    report.check(Check::le("Moser-Trudinger", avg, c2));
    Ok(report.finish())
}

/// `||u - u_B0||_{L^inf(B0)} <= C_H r0^{alpha(x0)} ||g||` and the pointwise
/// Hölder bound with `D_H`. Needs `s p >> Q`.
pub fn check_morrey_local(pr: &LocalProblem, candidate: Option<f64>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("morrey_local");
    let st = setup(pr, &mut report)?;
    let gap = -subcritical_gap(pr.s, pr.p, pr.q_dim);
    report.hypothesis("sp >> Q", gap > 0.0, format!("min(s p - Q) = {gap}"));
    if !(gap > 0.0) {
        return Ok(report.finish());
    }
    let alpha = holder_exponent(pr.q_dim, pr.s, pr.p)?;
    let mean = mean_on(pr.space, pr.u, &st.b0.members);
    let lhs = st.b0.members.iter().map(|&i| libm::fabs(pr.u[i] - mean)).fold(0.0, f64::max);
    let core = libm::pow(pr.r0, alpha.get(pr.center)) * st.grad;
    let c_h = apply_constant(&mut report, "Morrey", lhs, core, candidate);
    let d_h = holder_constant(c_h, alpha.max(), pr.sigma, st.delta, pr.r0);
    report.detail("D_H", d_h);
    let mut worst: Option<Check> = None;
    for &x in &st.b0.members {
        for &y in &st.b0.members {
            if x == y {
                continue;
            }
            let c = Check::le(
                "Hölder",
                libm::fabs(pr.u[x] - pr.u[y]),
                d_h * st.grad * libm::pow(pr.space.d(x, y), alpha.get(x)),
            );
            worst = Some(match worst {
                Some(w) => w.worst(c),
                None => c,
            });
        }
    }
    if let Some(w) = worst {
        report.check(w);
    }
    Ok(report.finish())
}

/// `||u||_{L^gamma(B0)} <= (kappa^2 + Lambda_gamma) C_S core + Lambda_p ||u||_{L^p(B0)}`,
/// with `C_S` from [`check_sobolev_local`] and
/// `Lambda_t = kappa^2 max{2, (2/mu(B0))^{1/t^-_{B0}}} ||1||_{L^gamma(B0)}`.
pub fn localemb_check(pr: &LocalProblem, candidate: Option<f64>) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("localemb");
    let st = setup(pr, &mut report)?;
    let gap = subcritical_gap(pr.s, pr.p, pr.q_dim);
    report.hypothesis("sp << Q", gap > 0.0, format!("min(Q - s p) = {gap}"));
    if !(gap > 0.0) {
        return Ok(report.finish());
    }
    let mut inner = VerificationReport::new("sobolev_local");
    let (gamma, g_lo, core) = sobolev_body(pr, &st, &mut inner, candidate)?;
    let c_s = inner.constant_used;
    let inf_c = inner.checks[0].lhs;
    report.constant(c_s, inner.provenance);
    report.detail("C_S", c_s);
    report.detail("core", core);
    let members = &st.b0.members;
    let ones = alloc::vec![1.0; pr.space.len()];
    let one_gamma = luxemburg_on(pr.space, &ones, &gamma, members, pr.tol).value;
    let (p_lo, _) = pr.p.restricted_bounds(members)?;
    let k2 = libm::pow(kappa(gamma.min()), 2.0);
    let lambda_gamma = k2 * median_factor(st.b0.measure, g_lo) * one_gamma;
    let lambda_p = k2 * median_factor(st.b0.measure, p_lo) * one_gamma;
    let lhs = luxemburg_on(pr.space, pr.u, &gamma, members, pr.tol).value;
    let u_p = luxemburg_on(pr.space, pr.u, pr.p, members, pr.tol).value;
    report.detail("kappa", kappa(gamma.min()));
    report.detail("Lambda_gamma", lambda_gamma);
    report.detail("Lambda_p", lambda_p);
    report.detail("u_Lp_B0", u_p);
    report.detail("rhs_printed_form", (k2 + lambda_gamma) * c_s * core + lambda_gamma * u_p);
    report.check(Check::le("median step", lhs, (k2 + lambda_gamma) * inf_c + lambda_p * u_p));
    report.check(Check::le("local embedding", lhs, (k2 + lambda_gamma) * c_s * core + lambda_p * u_p));
    Ok(report.finish())
}
