//! Structural checks on the gradient quasi-norms.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::gradient::{minimal_scalar_gradient, minimal_vector_gradient, minimal_vector_gradient_with, Coefficients, Scale};
use crate::check::{Check, CheckReport};
use crate::error::{Error, Result};
use crate::exponent::{ExponentField, Tag};
use crate::space::MetricMeasureSpace;

/// Relative tolerance used when comparing two solver objectives.
pub const COMPARE_RTOL: f64 = 1e-4;

fn le_rel(name: &str, lhs: f64, rhs: f64) -> Check {
    Check::le(name, lhs, rhs * (1.0 + COMPARE_RTOL))
}

fn close_rel(name: &str, a: f64, b: f64) -> Check {
    Check::close(name, a, b, COMPARE_RTOL * a.abs().max(b.abs()) + 1e-12)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionReport {
    pub norm: f64,
    /// Norm with `g_k` replaced by `2^{ks} g_k` over plain dyadic gradients.
    pub alt: f64,
    pub ratio: f64,
    /// `2^{s^+}`.
    pub factor: f64,
    pub checks: CheckReport,
}

/// Compares the quasi-norm with the dyadic convention:
/// `alt <= norm <= 2^{s^+} alt`.
pub fn norm_convention_equivalence(
    space: &MetricMeasureSpace,
    u: &[f64],
    s: &ExponentField,
    p: &ExponentField,
    q: &ExponentField,
    scale: Scale,
    tol: f64,
) -> Result<ConventionReport> {
    let norm = minimal_vector_gradient(space, u, s, p, q, scale, tol)?.objective.value;
    let alt = minimal_vector_gradient_with(space, u, s, p, q, scale, Coefficients::Dyadic, tol)?.objective.value;
    let factor = libm::exp2(s.max());
    let checks = CheckReport::new("norm conventions")
        .with(le_rel("alt <= norm", alt, norm))
        .with(le_rel("norm <= 2^{s+} alt", norm, factor * alt));
    let ratio = if alt > 0.0 { norm / alt } else { 1.0 };
    Ok(ConventionReport { norm, alt, ratio, factor, checks })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroGradientReport {
    pub objective: f64,
    /// `max |u_i - u_j|`.
    pub oscillation: f64,
    /// `max_{i<j} d^{s_i} w_i^{-1/p_i} + d^{s_j} w_j^{-1/p_j}`.
    pub constant: f64,
    /// True when the objective exceeds `tol`, so the implication is empty.
    pub vacuous: bool,
    pub checks: CheckReport,
}

/// Oscillation constant: a gradient of norm `lambda` has `g_i <= lambda w_i^{-1/p_i}`.
pub fn oscillation_constant(space: &MetricMeasureSpace, s: &ExponentField, p: &ExponentField) -> f64 {
    let n = space.len();
    let mut c: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.d(i, j);
            let a = libm::pow(d, s.get(i)) * libm::pow(space.weight(i), -1.0 / p.get(i));
            let b = libm::pow(d, s.get(j)) * libm::pow(space.weight(j), -1.0 / p.get(j));
            c = c.max(a + b);
        }
    }
    c
}

/// Quantitative form of "zero gradient norm means constant":
/// `osc(u) <= C ||u||_{M^{s,p}}`, and `osc(u) <= C tol` whenever the norm is below `tol`.
pub fn gradient_zero_implies_constant(
    space: &MetricMeasureSpace,
    u: &[f64],
    s: &ExponentField,
    p: &ExponentField,
    tol: f64,
) -> Result<ZeroGradientReport> {
    let sol = minimal_scalar_gradient(space, u, s, p, super::GRADIENT_TOL)?;
    let objective = sol.objective.value;
    let oscillation = sol.scale;
    let constant = oscillation_constant(space, s, p);
    let vacuous = objective > tol;
    let mut checks = CheckReport::new("zero gradient").with(Check::le("osc <= C norm", oscillation, constant * objective));
    if !vacuous {
        checks.push(Check::le("osc <= C tol", oscillation, constant * tol));
    }
    Ok(ZeroGradientReport { objective, oscillation, constant, vacuous, checks })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterativeReport {
    /// `a_1^{1-p/q} rho^p tau^{pq/(q-p)}`.
    pub value: f64,
    pub hypothesis_ok: bool,
    pub checks: CheckReport,
}

/// Checks `a_{j+1}^{1/q} <= rho tau^j a_j^{1/p}` on the supplied prefix and
/// evaluates the conclusion `a_1^{1-p/q} rho^p tau^{pq/(q-p)} >= 1`.
pub fn iterative_lemma_check(a: &[f64], p: f64, q: f64, rho: f64, tau: f64) -> Result<IterativeReport> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(p > 0.0 && p < q && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < p < q < inf, got p = {p}, q = {q}")));
    }
    if !(rho > 0.0 && tau > 0.0 && rho.is_finite() && tau.is_finite()) {
        return Err(Error::InvalidArgument("rho and tau must be positive and finite".into()));
    }
    if let Some(i) = a.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Precondition { index: Some(i), message: "sequence terms must be positive and finite".into() });
    }
    let mut hyp = Check::le("hypothesis", 0.0, 0.0);
    for j in 1..a.len() {
        let lhs = libm::pow(a[j], 1.0 / q);
        let rhs = rho * libm::pow(tau, j as f64) * libm::pow(a[j - 1], 1.0 / p);
        hyp = hyp.worst(Check::le("hypothesis", lhs, rhs));
    }
    let value = libm::pow(a[0], 1.0 - p / q) * libm::pow(rho, p) * libm::pow(tau, p * q / (q - p));
    let hypothesis_ok = hyp.pass;
    let checks = CheckReport::new("iterative lemma").with(hyp).with(Check::le("conclusion", 1.0, value));
    Ok(IterativeReport { value, hypothesis_ok, checks })
}

/// The norms compared by [`embedding_chain_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub scalar: f64,
    pub tl_q: f64,
    pub tl_inf: f64,
    pub tl_p: f64,
    pub besov_q: f64,
    pub besov_inf: f64,
    pub besov_p: f64,
    pub checks: CheckReport,
}

/// Orderings between the Sobolev, Triebel–Lizorkin and Besov quasi-norms of `u`.
pub fn embedding_chain_check(
    space: &MetricMeasureSpace,
    u: &[f64],
    s: &ExponentField,
    p: &ExponentField,
    q: &ExponentField,
    tol: f64,
) -> Result<ChainReport> {
    let n = space.len();
    let inf = ExponentField::constant(Tag::Q, n, f64::INFINITY).unwrap();
    let qp = p.clone().with_tag(Tag::Q)?;
    let vec = |q: &ExponentField, scale| minimal_vector_gradient(space, u, s, p, q, scale, tol).map(|g| g.objective.value);
    let scalar = minimal_scalar_gradient(space, u, s, p, tol)?.objective.value;
    let tl_q = vec(q, Scale::LpLq)?;
    let tl_inf = vec(&inf, Scale::LpLq)?;
    let tl_p = vec(&qp, Scale::LpLq)?;
    let besov_q = vec(q, Scale::LqLp)?;
    let besov_inf = vec(&inf, Scale::LqLp)?;
    let besov_p = vec(&qp, Scale::LqLp)?;

    let mut checks = CheckReport::new("embedding chain")
        .with(le_rel("(i) L^p(l^inf) <= L^p(l^q)", tl_inf, tl_q))
        .with(le_rel("(i) l^inf(L^p) <= l^q(L^p)", besov_inf, besov_q))
        .with(close_rel("(ii) L^p(l^inf) = M^{s,p}", tl_inf, scalar))
        .with(close_rel("(iii) L^p(l^p) = l^p(L^p)", tl_p, besov_p))
        .with(le_rel("(v) M^{s,p} <= L^p(l^q)", scalar, tl_q));
    if (0..n).all(|i| q.get(i) <= p.get(i)) {
        checks.push(le_rel("(vi) M^{s,p} <= l^q(L^p)", scalar, besov_q));
    }
    checks.push(le_rel("(viii) l^inf(L^p) <= M^{s,p}", besov_inf, scalar));
    Ok(ChainReport { scalar, tl_q, tl_inf, tl_p, besov_q, besov_inf, besov_p, checks })
}

/// `max{R^{1/p^-}, R^{1/p^+}}` with
/// `R = max{(4 delta)^{e^+ p^+}, (4 delta)^{e^- p^-}} / (1 - 2^{-p^- e^-})`,
/// where `e = s - t`.
pub fn zeta_constant(p_minus: f64, p_plus: f64, e_minus: f64, e_plus: f64, delta: f64) -> f64 {
    let four = 4.0 * delta;
    let r = libm::pow(four, e_plus * p_plus).max(libm::pow(four, e_minus * p_minus)) / (1.0 - libm::exp2(-p_minus * e_minus));
    libm::pow(r, 1.0 / p_minus).max(libm::pow(r, 1.0 / p_plus))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallEmbeddingReport {
    pub members: Vec<usize>,
    pub zeta: f64,
    /// `||u||_{M^{t,p}(B)}`.
    pub sobolev: f64,
    /// `||u||_{N^s_{p,q}(B)}`.
    pub besov: f64,
    pub checks: CheckReport,
}

/// On `B = B(center, r0)` with `r0 <= delta` and `s - t` bounded below by a
/// positive constant: `||u||_{M^{t,p}(B)} <= zeta ||u||_{N^s_{p,q}(B)}`.
#[allow(clippy::too_many_arguments)]
pub fn ball_embedding_check(
    space: &MetricMeasureSpace,
    center: usize,
    r0: f64,
    u: &[f64],
    s: &ExponentField,
    t: &ExponentField,
    p: &ExponentField,
    q: &ExponentField,
    delta: f64,
    tol: f64,
) -> Result<BallEmbeddingReport> {
    let n = space.len();
    for f in [s, t, p, q] {
        f.check_len(n)?;
    }
    if u.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: u.len() });
    }
    if !(r0 > 0.0 && r0 <= delta && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < r0 <= delta < inf, got r0 = {r0}, delta = {delta}")));
    }
    let e: Vec<f64> = (0..n).map(|i| s.get(i) - t.get(i)).collect();
    let e_minus = e.iter().copied().fold(f64::INFINITY, f64::min);
    let e_plus = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if e_minus <= 0.0 {
        return Err(Error::Precondition { index: None, message: "s - t must be bounded below by a positive constant".into() });
    }
    let zeta = zeta_constant(p.min(), p.max(), e_minus, e_plus, delta);
    let members = space.ball(center, r0)?.members;
    let sub = space.subspace(&members)?;
    let ub: Vec<f64> = members.iter().map(|&i| u[i]).collect();
    let (sb, tb, pb, qb) = (s.restrict(&members), t.restrict(&members), p.restrict(&members), q.restrict(&members));
    let sobolev = minimal_scalar_gradient(&sub, &ub, &tb, &pb, tol)?.objective.value;
    let besov = minimal_vector_gradient(&sub, &ub, &sb, &pb, &qb, Scale::LqLp, tol)?.objective.value;
    let checks = CheckReport::new("ball embedding").with(le_rel("M^{t,p}(B) <= zeta N^s_{p,q}(B)", sobolev, zeta * besov));
    Ok(BallEmbeddingReport { members, zeta, sobolev, besov, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two(d: f64) -> MetricMeasureSpace {
        MetricMeasureSpace::euclidean(vec![vec![0.0], vec![d]], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn convention_two_points() {
        // level 0: d^{1/2}(g0+g1) >= 1 against 2^{0}(h0+h1) >= 1
        let sp = two(0.6);
        let s = ExponentField::constant(Tag::S, 2, 0.5).unwrap();
        let p = ExponentField::constant(Tag::P, 2, 1.0).unwrap();
        let q = ExponentField::constant(Tag::Q, 2, 1.0).unwrap();
        let r = norm_convention_equivalence(&sp, &[0.0, 1.0], &s, &p, &q, Scale::LpLq, 1e-10).unwrap();
        assert!((r.norm - 1.0 / libm::sqrt(0.6)).abs() < 1e-7, "{}", r.norm);
        assert!((r.alt - 1.0).abs() < 1e-7, "{}", r.alt);
        assert!(r.checks.pass);
    }

    #[test]
    fn convention_constant_u() {
        let sp = two(0.6);
        let s = ExponentField::constant(Tag::S, 2, 0.5).unwrap();
        let p = ExponentField::constant(Tag::P, 2, 1.0).unwrap();
        let q = ExponentField::constant(Tag::Q, 2, 1.0).unwrap();
        let r = norm_convention_equivalence(&sp, &[3.0, 3.0], &s, &p, &q, Scale::LqLp, 1e-10).unwrap();
        assert_eq!((r.norm, r.alt), (0.0, 0.0));
        assert!(r.checks.pass);
    }

    #[test]
    fn zero_gradient_cases() {
        let sp = two(1.0);
        let s = ExponentField::constant(Tag::S, 2, 1.0).unwrap();
        let p = ExponentField::constant(Tag::P, 2, 1.0).unwrap();
        let r = gradient_zero_implies_constant(&sp, &[1.0, 1.0], &s, &p, 1e-9).unwrap();
        assert!(!r.vacuous && r.checks.pass);
        let r = gradient_zero_implies_constant(&sp, &[0.0, 1.0], &s, &p, 1e-9).unwrap();
        assert!(r.vacuous && r.checks.pass);
        let r = gradient_zero_implies_constant(&sp, &[1.0, 1.0 + 1e-12], &s, &p, 1e-9).unwrap();
        assert!(!r.vacuous && r.checks.pass);
    }

    #[test]
    fn iterative_lemma() {
        let r = iterative_lemma_check(&[1.0; 6], 1.0, 2.0, 1.0, 1.0).unwrap();
        assert!(r.checks.pass);
        assert_eq!(r.value, 1.0);
        assert_eq!(r.checks.get("conclusion").unwrap().margin, 0.0);
        let r = iterative_lemma_check(&[1.0; 6], 1.0, 2.0, 1.0, 1.5).unwrap();
        assert!(r.checks.pass && r.value > 1.0);
        let r = iterative_lemma_check(&[1.0, 9.0], 1.0, 2.0, 1.0, 1.0).unwrap();
        assert!(!r.hypothesis_ok && !r.checks.pass);
        assert!(iterative_lemma_check(&[1.0], 2.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn zeta_is_at_least_one_for_large_delta() {
        let z = zeta_constant(2.0, 2.0, 0.5, 0.5, 1.0);
        // R = 4^{1} / (1 - 2^{-1}) = 8
        assert!((z - libm::sqrt(8.0)).abs() < 1e-12);
    }
}
