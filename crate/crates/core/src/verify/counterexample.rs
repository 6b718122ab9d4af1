//! The unit ball of `R^n` with Lebesgue measure plus a unit atom at the
//! origin, `Q = beta` at the origin and `n` elsewhere: `M^{1,p}` does not
//! embed into `C^{0, 1 - Q/p}`.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::report::{Provenance, VerificationReport};
use crate::check::Check;
use crate::error::{Error, Result};
use crate::exponent::{ExponentField, Tag};
use crate::functions::power;
use crate::generators::ball_grid_with_atom;
use crate::hajlasz::scalar_certificate;
use crate::norms::{holder_norm, luxemburg};
use crate::regularity::best_lower_constant;

/// Largest tolerated variation `max/min - 1` of the `M^{1,p}` bound.
pub const NORM_VARIATION: f64 = 0.2;
/// Fraction of the predicted growth the quotient must reach at each step.
pub const GROWTH_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleParams {
    pub n_dim: usize,
    pub beta: f64,
    pub p: f64,
    pub theta: f64,
    /// Cells per unit length, strictly increasing.
    pub refinements: Vec<usize>,
}

fn validate(c: &CounterexampleParams) -> Result<()> {
    let n = c.n_dim as f64;
    if !(1..=3).contains(&c.n_dim) {
        return Err(Error::InvalidArgument(format!("dimension must be 1, 2 or 3, got {}", c.n_dim)));
    }
    if !(c.beta > 0.0 && c.beta < n) {
        return Err(Error::InvalidArgument(format!("need 0 < beta < n, got beta = {}", c.beta)));
    }
    if !(c.p > n && c.p.is_finite()) {
        return Err(Error::InvalidArgument(format!("need p > Q^+ = {n}, got p = {}", c.p)));
    }
    let (lo, hi) = (1.0 - n / c.p, 1.0 - c.beta / c.p);
    if !(c.theta > lo && c.theta < hi) {
        return Err(Error::InvalidArgument(format!("need theta in ({lo}, {hi}), got {}", c.theta)));
    }
    if c.refinements.len() < 2 || c.refinements.windows(2).any(|w| w[0] >= w[1]) || c.refinements[0] == 0 {
        return Err(Error::InvalidArgument("need at least two strictly increasing refinements".into()));
    }
    Ok(())
}

/// `n omega_n`, the surface measure of the unit sphere.
fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * core::f64::consts::PI,
        _ => 4.0 * core::f64::consts::PI,
    }
}

/// Builds each refinement, bounds `||u||_{M^{1,p}}` by `||u||_p + ||g||_p`
/// with `g = |x|^{theta-1}` (0 at the atom), and measures the Hölder quotient
/// `|u(x) - u(0)| / |x|^{alpha(0)}` at the point nearest to the atom.
///
/// The report passes when the bound stays within [`NORM_VARIATION`] and the
/// quotient grows by at least [`GROWTH_FRACTION`] of `ratio^{|theta - 1 + beta/p|}`
/// at every step, which certifies that no uniform embedding constant exists.
pub fn counterexample_run(c: &CounterexampleParams) -> Result<VerificationReport> {
    validate(c)?;
    let n = c.n_dim as f64;
    let mut report = VerificationReport::new("counterexample");
    report.scenario = format!("n={} beta={} p={} theta={} m={:?}", c.n_dim, c.beta, c.p, c.theta, c.refinements);
    let slope = c.theta - 1.0 + c.beta / c.p;
    report.detail("slope", slope);
    report.hypothesis("p > Q^+", true, format!("p = {}, Q^+ = {n}", c.p));
    report.hypothesis(
        "theta in (1 - n/p, 1 - beta/p)",
        true,
        format!("theta = {} in ({}, {})", c.theta, 1.0 - n / c.p, 1.0 - c.beta / c.p),
    );
    let exponent = c.theta * c.p - c.p + n;
    report.detail("g_modular_continuum", sphere_area(c.n_dim) / exponent);
    report.detail("u_modular_continuum", sphere_area(c.n_dim) / (c.theta * c.p + n));

    let mut bounds = Vec::new();
    let mut quotients = Vec::new();
    let mut b_min = f64::INFINITY;
    let mut cert_max: f64 = 0.0;
    for &m in &c.refinements {
        let space = ball_grid_with_atom(c.n_dim, m, 1.0)?;
        let size = space.len();
        let mut qv = alloc::vec![n; size];
        qv[0] = c.beta;
        let q_dim = ExponentField::new(Tag::Dim, qv)?;
        let alpha = ExponentField::new(Tag::Alpha, q_dim.values().iter().map(|q| 1.0 - q / c.p).collect())?;
        let p = ExponentField::constant(Tag::P, size, c.p)?;
        let s = ExponentField::constant(Tag::S, size, 1.0)?;
        let u = power(&space, 0, c.theta)?;
        let g: Vec<f64> = space.row(0).iter().map(|&d| if d == 0.0 { 0.0 } else { libm::pow(d, c.theta - 1.0) }).collect();
        let cert = scalar_certificate(&space, &u, &s, &g);
        cert_max = cert_max.max(cert);
        let g_p = luxemburg(&space, &g, &p, 1e-12).value;
        let bound = luxemburg(&space, &u, &p, 1e-12).value + g_p;
        let (near, d) = (1..size).map(|j| (j, space.d(0, j))).fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let quotient = libm::fabs(u[near] - u[0]) / libm::pow(d, alpha.get(0));
        let b = best_lower_constant(&space, &q_dim, None, Some(1.0))?.b_lower;
        b_min = b_min.min(b);
        report.detail(&format!("m{m}_points"), size as f64);
        report.detail(&format!("m{m}_m_norm_bound"), bound);
        report.detail(&format!("m{m}_g_modular"), libm::pow(g_p, c.p));
        report.detail(&format!("m{m}_holder_quotient"), quotient);
        report.detail(&format!("m{m}_holder_ratio"), holder_norm(&space, &u, &alpha) / bound);
        report.detail(&format!("m{m}_b_lower"), b);
        bounds.push(bound);
        quotients.push(quotient);
    }
    report.hypothesis("lower Ahlfors Q-regular", b_min > 0.0, format!("smallest b over refinements = {b_min}"));
    report.check(Check::le("gradient feasible", cert_max, 1e-9));
    let hi = bounds.iter().copied().fold(0.0, f64::max);
    let lo = bounds.iter().copied().fold(f64::INFINITY, f64::min);
    report.detail("m_norm_variation", hi / lo - 1.0);
    report.check(Check::le("M-norm bounded", hi / lo - 1.0, NORM_VARIATION));
    for (i, w) in c.refinements.windows(2).enumerate() {
        let ratio = w[1] as f64 / w[0] as f64;
        let needed = GROWTH_FRACTION * libm::pow(ratio, libm::fabs(slope));
        let growth = quotients[i + 1] / quotients[i];
        report.check(Check::le(&format!("quotient growth {}->{}", w[0], w[1]), needed, growth));
    }
    report.constant(GROWTH_FRACTION, Provenance::Formula);
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn params(theta: f64) -> CounterexampleParams {
        CounterexampleParams { n_dim: 1, beta: 0.5, p: 2.0, theta, refinements: vec![10, 100, 1000] }
    }

    #[test]
    fn one_dimensional_example() {
        let r = counterexample_run(&params(0.6)).unwrap();
        assert!(r.pass, "{r:#?}");
        assert!((r.details["slope"] + 0.15).abs() < 1e-12);
        // quotient at distance h/2 is (h/2)^{-0.15}
        for m in [10.0, 100.0, 1000.0] {
            let q = r.details[&format!("m{m}_holder_quotient")];
            assert!((q - libm::pow(0.5 / m, -0.15)).abs() < 1e-12 * q);
        }
    }

    #[test]
    fn open_theta_interval() {
        assert!(counterexample_run(&params(0.75)).is_err());
        assert!(counterexample_run(&params(0.5)).is_err());
        let mut bad = params(0.6);
        bad.p = 1.0;
        assert!(counterexample_run(&bad).is_err());
    }

    #[test]
    fn g_modular_matches_closed_form() {
        let r = counterexample_run(&params(0.6)).unwrap();
        let exact = r.details["g_modular_continuum"];
        // Simpson on 2 int_0^1 r^{theta p - p} dr after r = t^10, where the
        // integrand becomes 20 t^{10 (theta p - p + 1) - 1}
        let e = 0.6 * 2.0 - 2.0 + 1.0;
        let f = |t: f64| 20.0 * libm::pow(t, 10.0 * e - 1.0);
        let k = 1000;
        let h = 1.0 / k as f64;
        let mut simpson = f(0.0) + f(1.0);
        for i in 1..k {
            simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        simpson *= h / 3.0;
        assert!((simpson - exact).abs() < 1e-9 * exact, "{simpson} vs {exact}");
        // cell sums approach it from below
        let sums: Vec<f64> = [10, 100, 1000].iter().map(|m| r.details[&format!("m{m}_g_modular")]).collect();
        assert!(sums[0] < sums[1] && sums[1] < sums[2] && sums[2] < exact);
        assert!(sums[2] > 0.8 * exact);
    }
}
