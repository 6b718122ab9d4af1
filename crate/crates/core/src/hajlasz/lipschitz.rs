//! The explicit vector gradient of a Lipschitz cut-off function.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::gradient::{vector_certificate, Coefficients, GRADIENT_TOL};
use super::levels::active_levels;
use crate::check::{Check, CheckReport};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::norms::{luxemburg, mixed_norm_lp_lq, mixed_norm_lq_lp, SequenceSample};
use crate::space::MetricMeasureSpace;

/// Extra levels kept on each side of the constrained range. The bounds hold
/// for every truncation, so this only affects how much of the tail is seen.
pub const LEVEL_PAD: i32 = 8;

/// Certificate tolerance for the constructed gradient.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub k_l: i32,
    /// Constant of the `L^p(l^q)` bound (4 when `q^- = inf`).
    pub a1: f64,
    /// Constant of the `l^q(L^p)` bound (5 when `q^- = inf`).
    pub a2: f64,
    /// `A_2` with the extra `1/q^-` power on the second denominator, as it
    /// is usually printed. Informational only.
    pub a2_printed: Option<f64>,
    /// `max{L^{s_B^-}, L^{s_B^+}}`.
    pub growth: f64,
    pub chi_norm: f64,
    pub tl_norm: f64,
    pub besov_norm: f64,
    pub tl_ratio: f64,
    pub besov_ratio: f64,
    pub certificate: f64,
    pub checks: CheckReport,
}

/// `k` with `2^{k-1} <= l < 2^k`.
pub fn lipschitz_level(l: f64) -> i32 {
    let (_, e) = libm::frexp(l);
    e
}

/// `(4^{q}/(1-2^{-q s^-}) + 1/(1-2^{-q(1-s^+)}))^{1/q}`.
pub fn a1_constant(q_minus: f64, s_minus: f64, s_plus: f64) -> f64 {
    let q = q_minus;
    let t = libm::pow(4.0, q) / (1.0 - libm::exp2(-q * s_minus)) + 1.0 / (1.0 - libm::exp2(-q * (1.0 - s_plus)));
    libm::pow(t, 1.0 / q)
}

/// `2^{1/q}[(2^{2q+1}/(1-2^{-s^- q}))^{1/q} + (2/(1-2^{-q(1-s^+)}))^{1/q}]`.
pub fn a2_constant(q_minus: f64, s_minus: f64, s_plus: f64) -> f64 {
    let q = q_minus;
    let low = libm::exp2(2.0 * q + 1.0) / (1.0 - libm::exp2(-s_minus * q));
    let high = 2.0 / (1.0 - libm::exp2(-q * (1.0 - s_plus)));
    libm::exp2(1.0 / q) * (libm::pow(low, 1.0 / q) + libm::pow(high, 1.0 / q))
}

fn a2_printed(q_minus: f64, s_minus: f64, s_plus: f64) -> f64 {
    let q = q_minus;
    let low = libm::exp2(2.0 * q + 1.0) / (1.0 - libm::exp2(-s_minus * q));
    let high = 2.0 / libm::pow(1.0 - libm::exp2(-q * (1.0 - s_plus)), 1.0 / q);
    libm::exp2(1.0 / q) * (libm::pow(low, 1.0 / q) + libm::pow(high, 1.0 / q))
}

/// Value of `g_k` at a point of `B` with smoothness `s`.
pub fn cutoff_value(k: i32, k_l: i32, l: f64, s: f64) -> f64 {
    let k = k as f64;
    if k >= k_l as f64 {
        l * libm::exp2(k * (s - 1.0))
    } else {
        libm::exp2((k + 1.0) * s + 1.0)
    }
}

fn check_hypotheses(space: &MetricMeasureSpace, u: &[f64], inside: &[bool], l: f64) -> CheckReport {
    let n = space.len();
    let mut range = Check::le("u in [0,1]", 0.0, 1.0);
    let mut support = Check::le("u = 0 off B", 0.0, 0.0);
    let mut lip = Check::le("u L-Lipschitz", 0.0, 0.0);
    for i in 0..n {
        range = range.worst(Check::le("u in [0,1]", u[i], 1.0)).worst(Check::le("u in [0,1]", -u[i], 0.0));
        if !inside[i] {
            support = support.worst(Check::le("u = 0 off B", libm::fabs(u[i]), 0.0));
        }
        for j in (i + 1)..n {
            let d = space.d(i, j);
            let c = Check::le("u L-Lipschitz", libm::fabs(u[i] - u[j]), l * d * (1.0 + 1e-12));
            lip = if i == 0 && j == 1 { c } else { lip.worst(c) };
        }
    }
    CheckReport::new("hypotheses").with(range).with(support).with(lip)
}

/// Builds the cut-off gradient `{g_k}` of an `L`-Lipschitz `u : X -> [0,1]`
/// vanishing off `B` and checks feasibility and both norm bounds.
///
/// The sequence covers every constrained level plus [`LEVEL_PAD`] levels on
/// each side; the norms reported are those of this truncation.
pub fn lipschitz_cutoff_gradient(
    space: &MetricMeasureSpace,
    ball: &[usize],
    l: f64,
    s: &ExponentField,
    p: &ExponentField,
    q: &ExponentField,
    u: &[f64],
) -> Result<(SequenceSample, LipschitzReport)> {
    let n = space.len();
    s.check_len(n)?;
    p.check_len(n)?;
    q.check_len(n)?;
    if u.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: u.len() });
    }
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidArgument(format!("Lipschitz constant must be positive and finite, got {l}")));
    }
    let (s_minus, s_plus) = (s.min(), s.max());
    let q_minus = q.min();
    if s_minus <= 0.0 {
        return Err(Error::Precondition { index: None, message: "s must be positive".into() });
    }
    if s_plus > 1.0 {
        return Err(Error::Precondition { index: None, message: "s^+ must not exceed 1".into() });
    }
    if s_plus == 1.0 && q_minus.is_finite() {
        return Err(Error::Precondition { index: None, message: "s^+ = 1 requires q = inf".into() });
    }
    let mut inside = vec![false; n];
    for &b in ball {
        space.check_index(b)?;
        inside[b] = true;
    }

    let k_l = lipschitz_level(l);
    let (lo, hi) = match active_levels(space) {
        Ok((a, b)) => (a.min(k_l - 1), b.max(k_l)),
        Err(_) => (k_l - 1, k_l),
    };
    let (k_min, k_max) = (lo - LEVEL_PAD, hi + LEVEL_PAD);
    let levels: Vec<Vec<f64>> = (k_min..=k_max)
        .map(|k| (0..n).map(|i| if inside[i] { cutoff_value(k, k_l, l, s.get(i)) } else { 0.0 }).collect())
        .collect();
    let g = SequenceSample { k_min, levels };

    let certificate = vector_certificate(space, u, s, &g, Coefficients::Distance);
    let chi: Vec<f64> = inside.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let chi_norm = luxemburg(space, &chi, p, GRADIENT_TOL).value;
    let growth = if ball.is_empty() {
        0.0
    } else {
        let (sb_lo, sb_hi) = s.restricted_bounds(ball)?;
        libm::pow(l, sb_lo).max(libm::pow(l, sb_hi))
    };
    let tl_norm = mixed_norm_lp_lq(space, &g, p, q, GRADIENT_TOL)?.value;
    let besov_norm = mixed_norm_lq_lp(space, &g, p, q, GRADIENT_TOL)?.value;

    let (a1, a2, printed) = if q_minus.is_infinite() {
        (4.0, 5.0, None)
    } else {
        (a1_constant(q_minus, s_minus, s_plus), a2_constant(q_minus, s_minus, s_plus), Some(a2_printed(q_minus, s_minus, s_plus)))
    };
    let tl_rhs = a1 * growth * chi_norm;
    let besov_rhs = a2 * growth * chi_norm;
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };

    let mut checks = check_hypotheses(space, u, &inside, l);
    checks.name = "lipschitz cut-off".into();
    checks.push(Check::le("feasible", certificate, FEASIBILITY_TOL));
    checks.push(Check::le("L^p(l^q) bound", tl_norm, tl_rhs));
    checks.push(Check::le("l^q(L^p) bound", besov_norm, besov_rhs));

    let report = LipschitzReport {
        k_l,
        a1,
        a2,
        a2_printed: printed,
        growth,
        chi_norm,
        tl_norm,
        besov_norm,
        tl_ratio: ratio(tl_norm, tl_rhs),
        besov_ratio: ratio(besov_norm, besov_rhs),
        certificate,
        checks,
    };
    Ok((g, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Tag;

    fn line(n: usize) -> MetricMeasureSpace {
        let coords: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64 / (n - 1) as f64]).collect();
        MetricMeasureSpace::euclidean(coords, vec![1.0 / n as f64; n]).unwrap()
    }

    #[test]
    fn level_brackets() {
        assert_eq!(lipschitz_level(1.0), 1);
        assert_eq!(lipschitz_level(0.99), 0);
        assert_eq!(lipschitz_level(2.0), 2);
        assert_eq!(lipschitz_level(3.0), 2);
        assert_eq!(lipschitz_level(0.25), -1);
    }

    #[test]
    fn half_smoothness_values() {
        let sp = line(5);
        let s = ExponentField::constant(Tag::S, 5, 0.5).unwrap();
        let p = ExponentField::constant(Tag::P, 5, 2.0).unwrap();
        let q = ExponentField::constant(Tag::Q, 5, 2.0).unwrap();
        // tent of slope 1 centred at 0.5, support inside B = all points
        let u: Vec<f64> = (0..5).map(|i| (0.5 - libm::fabs(i as f64 / 4.0 - 0.5)).max(0.0)).collect();
        let ball: Vec<usize> = (0..5).collect();
        let (g, rep) = lipschitz_cutoff_gradient(&sp, &ball, 1.0, &s, &p, &q, &u).unwrap();
        assert_eq!(rep.k_l, 1);
        assert!((g.level(1).unwrap()[2] - libm::sqrt(0.5)).abs() < 1e-15);
        assert!((g.level(0).unwrap()[2] - libm::pow(2.0, 1.5)).abs() < 1e-15);
        assert!(rep.checks.pass, "{:?}", rep.checks);
    }

    #[test]
    fn empty_ball_is_zero() {
        let sp = line(4);
        let s = ExponentField::constant(Tag::S, 4, 0.5).unwrap();
        let p = ExponentField::constant(Tag::P, 4, 2.0).unwrap();
        let q = ExponentField::constant(Tag::Q, 4, 1.0).unwrap();
        let (g, rep) = lipschitz_cutoff_gradient(&sp, &[], 1.0, &s, &p, &q, &[0.0; 4]).unwrap();
        assert!(g.is_zero());
        assert_eq!(rep.tl_norm, 0.0);
        assert_eq!(rep.besov_norm, 0.0);
        assert!(rep.checks.pass);
    }

    #[test]
    fn rejects_unit_smoothness_with_finite_q() {
        let sp = line(3);
        let s = ExponentField::constant(Tag::S, 3, 1.0).unwrap();
        let p = ExponentField::constant(Tag::P, 3, 2.0).unwrap();
        let q = ExponentField::constant(Tag::Q, 3, 2.0).unwrap();
        assert!(lipschitz_cutoff_gradient(&sp, &[0], 1.0, &s, &p, &q, &[0.0; 3]).is_err());
        let q = ExponentField::constant(Tag::Q, 3, f64::INFINITY).unwrap();
        let (_, rep) = lipschitz_cutoff_gradient(&sp, &[1], 1.0, &s, &p, &q, &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(rep.a2, 5.0);
        assert!(rep.checks.pass);
    }
}
