use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::lebesgue::{luxemburg_weighted, modular_weighted};
use super::{NormKind, NormValue};
use crate::check::{Check, CheckReport};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::root::{bisect_decreasing, expand_decreasing, illinois_decreasing, level_one_threshold};
use crate::space::MetricMeasureSpace;

/// A finite window of a sequence `{g_k}`: `levels[j]` is `g_{k_min + j}`,
/// all other levels are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSample {
    pub k_min: i32,
    pub levels: Vec<Vec<f64>>,
}

impl SequenceSample {
    pub fn new(k_min: i32, levels: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(first) = levels.first() {
            let n = first.len();
            if let Some(bad) = levels.iter().find(|l| l.len() != n) {
                return Err(Error::LengthMismatch { expected: n, found: bad.len() });
            }
        }
        Ok(SequenceSample { k_min, levels })
    }

    pub fn zeros(k_min: i32, count: usize, n: usize) -> Self {
        SequenceSample { k_min, levels: vec![vec![0.0; n]; count] }
    }

    /// Largest index carried; `k_min - 1` when empty.
    pub fn k_max(&self) -> i32 {
        self.k_min + self.levels.len() as i32 - 1
    }

    pub fn points(&self) -> usize {
        self.levels.first().map_or(0, |l| l.len())
    }

    pub fn level(&self, k: i32) -> Option<&[f64]> {
        if k < self.k_min {
            return None;
        }
        self.levels.get((k - self.k_min) as usize).map(|l| l.as_slice())
    }

    pub fn level_mut(&mut self, k: i32) -> Option<&mut Vec<f64>> {
        if k < self.k_min {
            return None;
        }
        self.levels.get_mut((k - self.k_min) as usize)
    }

    pub fn scaled(&self, c: f64) -> SequenceSample {
        SequenceSample { k_min: self.k_min, levels: self.levels.iter().map(|l| l.iter().map(|v| c * v).collect()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.levels.iter().all(|l| l.iter().all(|&v| v == 0.0))
    }
}

/// `(sum_k a_k^q)^{1/q}`, or `max_k a_k` when `q = inf`.
pub fn pointwise_lq(a: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        a.fold(0.0, |m, v| m.max(libm::fabs(v)))
    } else {
        let s: f64 = a.filter(|&v| v != 0.0).map(|v| libm::pow(libm::fabs(v), q)).sum();
        libm::pow(s, 1.0 / q)
    }
}

/// Terms of `lambda -> sum_i w_i (g_i lambda^{-1/q_i})^{p_i}` split into the
/// part with `q_i = inf` (independent of `lambda`) and log-terms of the rest.
struct LevelTerms {
    fixed: f64,
    a: Vec<f64>,
    c: Vec<f64>,
}

impl LevelTerms {
    fn new(w: &[f64], g: &[f64], p: &[f64], q: &[f64]) -> LevelTerms {
        let mut t = LevelTerms { fixed: 0.0, a: Vec::new(), c: Vec::new() };
        for i in 0..g.len() {
            if g[i] == 0.0 {
                continue;
            }
            if q[i].is_infinite() {
                t.fixed += w[i] * libm::pow(libm::fabs(g[i]), p[i]);
            } else {
                t.a.push(libm::log(w[i]) + p[i] * libm::log(libm::fabs(g[i])));
                t.c.push(p[i] / q[i]);
            }
        }
        t
    }

    /// `ln(sum_finite) - ln(1 - fixed)` at `lambda = e^x`; decreasing in `x`.
    fn excess(&self, x: f64, target: f64) -> f64 {
        let mut m = f64::NEG_INFINITY;
        for i in 0..self.a.len() {
            m = m.max(self.a[i] - self.c[i] * x);
        }
        let mut s = 0.0;
        for i in 0..self.a.len() {
            s += libm::exp(self.a[i] - self.c[i] * x - m);
        }
        m + libm::log(s) - target
    }

    /// `inf { lambda > 0 : rho <= 1 }`; `bisect` selects plain bisection.
    fn solve(&self, rtol: f64, bisect: bool) -> f64 {
        if self.a.is_empty() {
            return if self.fixed <= 1.0 { 0.0 } else { f64::INFINITY };
        }
        if self.fixed >= 1.0 {
            return f64::INFINITY;
        }
        let target = libm::log1p(-self.fixed);
        let mut f = |x: f64| self.excess(x, target);
        // With all coefficients equal the root is explicit; use it as the starting guess.
        let c_mean = self.c.iter().sum::<f64>() / self.c.len() as f64;
        let guess = f(0.0) / c_mean;
        let Some((lo, flo, hi, fhi)) = expand_decreasing(&mut f, guess - 1e-6, guess + 1e-6) else {
            return f64::INFINITY;
        };
        let b = if bisect {
            bisect_decreasing(&mut f, lo, hi, rtol)
        } else {
            illinois_decreasing(&mut f, lo, flo, hi, fhi, rtol)
        };
        libm::exp(b.hi)
    }
}

fn check_shapes(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField) -> Result<()> {
    let n = space.len();
    p.check_len(n)?;
    q.check_len(n)?;
    if g.points() != n && !g.levels.is_empty() {
        return Err(Error::LengthMismatch { expected: n, found: g.points() });
    }
    Ok(())
}

fn modular_lq_lp_with(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField, tol: f64, bisect: bool) -> f64 {
    let mut total = 0.0;
    for level in &g.levels {
        let t = LevelTerms::new(space.weights(), level, p.values(), q.values());
        total += t.solve(tol, bisect);
        if total.is_infinite() {
            break;
        }
    }
    total
}

/// `sum_k inf { lambda_k > 0 : rho_p(g_k / lambda_k^{1/q}) <= 1 }`, each
/// infimum found by bisection (with `lambda^{1/inf} = 1`).
pub fn mixed_modular_lq_lp(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField, tol: f64) -> Result<f64> {
    check_shapes(space, g, p, q)?;
    Ok(modular_lq_lp_with(space, g, p, q, tol, true))
}

/// `sum_k || |g_k|^q ||_{L^{p/q}}`; requires `q^+ < inf`.
pub fn lq_lp_closed_form(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField, tol: f64) -> Result<f64> {
    check_shapes(space, g, p, q)?;
    if q.has_infinity() {
        return Err(Error::InvalidArgument("closed form needs q^+ < inf".into()));
    }
    let r: Vec<f64> = p.values().iter().zip(q.values()).map(|(a, b)| a / b).collect();
    let mut total = 0.0;
    for level in &g.levels {
        let v: Vec<f64> = level.iter().zip(q.values()).map(|(x, qq)| libm::pow(libm::fabs(*x), *qq)).collect();
        total += luxemburg_weighted(space.weights(), &v, &r, tol).value;
    }
    Ok(total)
}

/// Norm in `l^{q}(L^{p})`. Constant `q` (including `inf`) uses the sequence
/// norm of the per-level Luxemburg norms; otherwise the outer infimum is
/// solved against the level-wise modular.
pub fn mixed_norm_lq_lp(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField, tol: f64) -> Result<NormValue> {
    check_shapes(space, g, p, q)?;
    if g.is_zero() {
        return Ok(NormValue::exact(0.0, NormKind::MixedLqp));
    }
    if q.is_constant() {
        let qq = q.get(0);
        let norms = g.levels.iter().map(|l| luxemburg_weighted(space.weights(), l, p.values(), tol).value);
        return Ok(NormValue { value: pointwise_lq(norms, qq), tolerance: 0.0, kind: NormKind::MixedLqp });
    }
    Ok(outer_lq_lp(space, g, p, q, tol, false))
}

/// Norm in `l^{q}(L^{p})` straight from the definition, with bisection at both levels.
pub fn mixed_norm_lq_lp_definitional(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField, tol: f64) -> Result<NormValue> {
    check_shapes(space, g, p, q)?;
    if g.is_zero() {
        return Ok(NormValue::exact(0.0, NormKind::MixedLqp));
    }
    Ok(outer_lq_lp(space, g, p, q, tol, true))
}

fn outer_lq_lp(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField, tol: f64, bisect: bool) -> NormValue {
    let guess = g.levels.iter().map(|l| luxemburg_weighted(space.weights(), l, p.values(), 1e-6).value).fold(0.0, f64::max);
    let inner = tol * 1e-2;
    let b = level_one_threshold(|mu| modular_lq_lp_with(space, &g.scaled(1.0 / mu), p, q, inner, bisect), guess, tol);
    NormValue { value: b.hi, tolerance: b.hi - b.lo, kind: NormKind::MixedLqp }
}

/// Pointwise `l^{q(x)}` norm of the sequence at every point.
fn pointwise_norms(g: &SequenceSample, q: &ExponentField) -> Vec<f64> {
    (0..g.points()).map(|i| pointwise_lq(g.levels.iter().map(|l| l[i]), q.get(i))).collect()
}

/// `rho_p(||g(x)||_{l^{q(x)}})`.
pub fn mixed_modular_lp_lq(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField) -> Result<f64> {
    check_shapes(space, g, p, q)?;
    if g.levels.is_empty() {
        return Ok(0.0);
    }
    Ok(modular_weighted(space.weights(), &pointwise_norms(g, q), p.values()))
}

/// Norm in `L^{p}(l^{q})`.
pub fn mixed_norm_lp_lq(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q: &ExponentField, tol: f64) -> Result<NormValue> {
    check_shapes(space, g, p, q)?;
    if g.levels.is_empty() {
        return Ok(NormValue::exact(0.0, NormKind::MixedPlq));
    }
    let mut v = luxemburg_weighted(space.weights(), &pointwise_norms(g, q), p.values(), tol);
    v.kind = NormKind::MixedPlq;
    Ok(v)
}

/// For `q1 <= q2`: both mixed norms with `q2` are at most those with `q1`.
pub fn monotonicity_check(space: &MetricMeasureSpace, g: &SequenceSample, p: &ExponentField, q1: &ExponentField, q2: &ExponentField, tol: f64) -> Result<CheckReport> {
    q1.check_len(q2.len())?;
    if let Some(i) = (0..q1.len()).find(|&i| q1.get(i) > q2.get(i)) {
        return Err(Error::Precondition { index: Some(i), message: "need q1 <= q2".into() });
    }
    let mut r = CheckReport::new("monotonicity");
    r.push(Check::le(
        "l^q(L^p)",
        mixed_norm_lq_lp(space, g, p, q2, tol)?.value,
        mixed_norm_lq_lp(space, g, p, q1, tol)?.value,
    ));
    r.push(Check::le(
        "L^p(l^q)",
        mixed_norm_lp_lq(space, g, p, q2, tol)?.value,
        mixed_norm_lp_lq(space, g, p, q1, tol)?.value,
    ));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Tag;
    use crate::norms::luxemburg;

    fn setup() -> (MetricMeasureSpace, ExponentField) {
        let s = MetricMeasureSpace::euclidean(vec![vec![0.0], vec![1.0], vec![3.0]], vec![0.2, 0.5, 0.3]).unwrap();
        let p = ExponentField::new(Tag::P, vec![1.0, 1.5, 2.5]).unwrap();
        (s, p)
    }

    #[test]
    fn infinite_q_single_level() {
        let (s, p) = setup();
        let q = ExponentField::constant(Tag::Q, 3, f64::INFINITY).unwrap();
        let small = SequenceSample::new(0, vec![vec![0.1, 0.2, 0.1]]).unwrap();
        assert_eq!(mixed_modular_lq_lp(&s, &small, &p, &q, 1e-12).unwrap(), 0.0);
        let big = small.scaled(100.0);
        assert_eq!(mixed_modular_lq_lp(&s, &big, &p, &q, 1e-12).unwrap(), f64::INFINITY);
        let n = mixed_norm_lq_lp(&s, &big, &p, &q, 1e-12).unwrap().value;
        let l = luxemburg(&s, &big.levels[0], &p, 1e-12).value;
        assert!((n - l).abs() < 1e-10 * l);
    }

    #[test]
    fn lp_lq_examples() {
        let (s, p) = setup();
        let q1 = ExponentField::constant(Tag::Q, 3, 1.0).unwrap();
        let g = SequenceSample::new(2, vec![vec![0.3, 0.0, 1.0], vec![0.3, 0.0, 1.0]]).unwrap();
        let n = mixed_norm_lp_lq(&s, &g, &p, &q1, 1e-12).unwrap().value;
        let doubled = luxemburg(&s, &[0.6, 0.0, 2.0], &p, 1e-12).value;
        assert!((n - doubled).abs() < 1e-10);
        assert_eq!(mixed_norm_lp_lq(&s, &SequenceSample::zeros(0, 2, 3), &p, &q1, 1e-12).unwrap().value, 0.0);
    }

    #[test]
    fn definitional_matches_closed_form() {
        let (s, p) = setup();
        let q = ExponentField::new(Tag::Q, vec![1.0, 2.0, 3.0]).unwrap();
        let g = SequenceSample::new(-1, vec![vec![0.3, 0.7, 1.0], vec![2.0, 0.0, 0.5]]).unwrap();
        let a = mixed_modular_lq_lp(&s, &g, &p, &q, 1e-13).unwrap();
        let b = lq_lp_closed_form(&s, &g, &p, &q, 1e-13).unwrap();
        assert!((a - b).abs() < 1e-10, "{a} {b}");
        let n1 = mixed_norm_lq_lp(&s, &g, &p, &q, 1e-11).unwrap().value;
        let n2 = mixed_norm_lq_lp_definitional(&s, &g, &p, &q, 1e-11).unwrap().value;
        assert!((n1 - n2).abs() < 1e-8);
    }
}
