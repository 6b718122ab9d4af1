use alloc::format;
use alloc::vec::Vec;

use super::{NormKind, NormValue};
use crate::check::{Check, CheckReport};
use crate::error::{Error, Result};
use crate::exponent::{conjugate, ExponentField, Tag};
use crate::root::{expand_decreasing, illinois_decreasing};
use crate::space::MetricMeasureSpace;

/// Default relative bracket width for Luxemburg norms.
pub const DEFAULT_TOL: f64 = 1e-10;

/// `sum_i w_i |u_i|^{p_i}`.
pub fn modular_weighted(w: &[f64], u: &[f64], p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.len() {
        if u[i] != 0.0 {
            acc += w[i] * libm::pow(libm::fabs(u[i]), p[i]);
        }
    }
    acc
}

pub fn modular(space: &MetricMeasureSpace, u: &[f64], p: &ExponentField) -> f64 {
    modular_weighted(space.weights(), u, p.values())
}

/// `ln sum_i exp(a_i - c_i x)`.
fn log_sum(a: &[f64], c: &[f64], x: f64) -> f64 {
    let mut m = f64::NEG_INFINITY;
    for i in 0..a.len() {
        m = m.max(a[i] - c[i] * x);
    }
    if !m.is_finite() {
        return m;
    }
    let mut s = 0.0;
    for i in 0..a.len() {
        s += libm::exp(a[i] - c[i] * x - m);
    }
    m + libm::log(s)
}

/// Luxemburg norm `inf { lambda : sum w |u/lambda|^p <= 1 }` for explicit weights.
///
/// `tol` is the relative width of the returned bracket; the returned value is
/// its upper end, so the modular at `u / value` is at most 1.
pub fn luxemburg_weighted(w: &[f64], u: &[f64], p: &[f64], tol: f64) -> NormValue {
    let mut a = Vec::new();
    let mut c = Vec::new();
    for i in 0..u.len() {
        if u[i] != 0.0 {
            a.push(libm::log(w[i]) + p[i] * libm::log(libm::fabs(u[i])));
            c.push(p[i]);
        }
    }
    if a.is_empty() {
        return NormValue::exact(0.0, NormKind::Luxemburg);
    }
    let big_l = log_sum(&a, &c, 0.0);
    let (p_lo, p_hi) = c.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if p_lo == p_hi {
        let rho = modular_weighted(w, u, p);
        let value =
            if rho.is_finite() && rho > 0.0 { libm::pow(rho, 1.0 / p_lo) } else { libm::exp(big_l / p_lo) };
        return NormValue::exact(value, NormKind::Luxemburg);
    }
    // ln(norm) lies between L/p^+ and L/p^-.
    let x1 = big_l / p_lo;
    let x2 = big_l / p_hi;
    let pad = 1e-12 * (1.0 + libm::fabs(big_l));
    let mut f = |x: f64| log_sum(&a, &c, x);
    let (lo, flo, hi, fhi) = expand_decreasing(&mut f, x1.min(x2) - pad, x1.max(x2) + pad)
        .expect("log-modular is strictly decreasing");
    let b = illinois_decreasing(&mut f, lo, flo, hi, fhi, tol.max(1e-15));
    let value = libm::exp(b.hi);
    NormValue { value, tolerance: value - libm::exp(b.lo), kind: NormKind::Luxemburg }
}

pub fn luxemburg(space: &MetricMeasureSpace, u: &[f64], p: &ExponentField, tol: f64) -> NormValue {
    luxemburg_weighted(space.weights(), u, p.values(), tol)
}

/// Luxemburg norm of `u` restricted to `set`.
pub fn luxemburg_on(space: &MetricMeasureSpace, u: &[f64], p: &ExponentField, set: &[usize], tol: f64) -> NormValue {
    let w: Vec<f64> = set.iter().map(|&i| space.weight(i)).collect();
    let uu: Vec<f64> = set.iter().map(|&i| u[i]).collect();
    let pp: Vec<f64> = set.iter().map(|&i| p.get(i)).collect();
    luxemburg_weighted(&w, &uu, &pp, tol)
}

/// `min{rho^{1/p^-}, rho^{1/p^+}} <= ||u|| <= max{rho^{1/p^-}, rho^{1/p^+}}`.
pub fn rel_sandwich_check(space: &MetricMeasureSpace, u: &[f64], p: &ExponentField, tol: f64) -> CheckReport {
    let rho = modular(space, u, p);
    let norm = luxemburg(space, u, p, tol).value;
    let a = libm::pow(rho, 1.0 / p.min());
    let b = libm::pow(rho, 1.0 / p.max());
    CheckReport::new("modular sandwich")
        .with(Check::le("lower", a.min(b), norm))
        .with(Check::le("upper", norm, a.max(b)))
}

/// `rho(u/||u||) <= 1` and `rho(u / (||u|| (1 - 10 tol))) > 1`.
pub fn unit_ball_check(space: &MetricMeasureSpace, u: &[f64], p: &ExponentField, tol: f64) -> CheckReport {
    let norm = luxemburg(space, u, p, tol).value;
    let mut report = CheckReport::new("unit ball");
    if norm == 0.0 {
        report.push(Check::le("zero", modular(space, u, p), 0.0));
        return report;
    }
    let scaled = |lambda: f64| -> f64 {
        let v: Vec<f64> = u.iter().map(|x| x / lambda).collect();
        modular(space, &v, p)
    };
    report.push(Check::le("inside", scaled(norm), 1.0));
    let outside = scaled(norm * (1.0 - 10.0 * tol));
    report.push(Check { name: "outside".into(), lhs: 1.0, rhs: outside, margin: outside - 1.0, pass: outside > 1.0 });
    report
}

/// `||u + v|| <= 2^{1/p^-} (||u|| + ||v||)`.
pub fn quasi_triangle_check(space: &MetricMeasureSpace, u: &[f64], v: &[f64], p: &ExponentField, tol: f64) -> Check {
    let sum: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + b).collect();
    let kappa = libm::pow(2.0, 1.0 / p.min());
    let lhs = luxemburg(space, &sum, p, tol).value;
    let rhs = kappa * (luxemburg(space, u, p, tol).value + luxemburg(space, v, p, tol).value);
    Check::le("quasi-triangle", lhs, rhs)
}

/// `int |f g| <= 2 ||f||_{p} ||g||_{p'}`; needs `p^- > 1`.
pub fn holder_inequality_check(
    space: &MetricMeasureSpace,
    f: &[f64],
    g: &[f64],
    p: &ExponentField,
    tol: f64,
) -> Result<Check> {
    let pc = conjugate(p)?;
    let lhs: f64 = (0..space.len()).map(|i| space.weight(i) * libm::fabs(f[i] * g[i])).sum();
    let rhs = 2.0 * luxemburg(space, f, p, tol).value * luxemburg(space, g, &pc, tol).value;
    Ok(Check::le("holder", lhs, rhs))
}

/// `2^{1/p^-} max{ ||1||_{t'}^{1/p^+}, ||1||_{t'}^{1/p^-} }` with `t = q/p`; needs `q >> p`.
pub fn lebesgue_embedding_constant(
    space: &MetricMeasureSpace,
    p: &ExponentField,
    q: &ExponentField,
    tol: f64,
) -> Result<f64> {
    p.check_len(space.len())?;
    q.check_len(space.len())?;
    let mut t = Vec::with_capacity(p.len());
    for i in 0..p.len() {
        if !(q.get(i) > p.get(i)) || q.get(i).is_infinite() {
            return Err(Error::Precondition {
                index: Some(i),
                message: format!("need q > p, got q = {}, p = {}", q.get(i), p.get(i)),
            });
        }
        t.push(q.get(i) / p.get(i));
    }
    let t = ExponentField::new(Tag::T, t)?;
    let tc = conjugate(&t)?;
    let ones = alloc::vec![1.0; space.len()];
    let n1 = luxemburg(space, &ones, &tc, tol).value;
    Ok(libm::pow(2.0, 1.0 / p.min()) * libm::pow(n1, 1.0 / p.max()).max(libm::pow(n1, 1.0 / p.min())))
}

/// `||u||_p <= C ||u||_q` with the constant of [`lebesgue_embedding_constant`].
pub fn lebesgue_embedding_check(
    space: &MetricMeasureSpace,
    u: &[f64],
    p: &ExponentField,
    q: &ExponentField,
    tol: f64,
) -> Result<Check> {
    let c = lebesgue_embedding_constant(space, p, q, tol)?;
    Ok(Check::le("lebesgue embedding", luxemburg(space, u, p, tol).value, c * luxemburg(space, u, q, tol).value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two() -> MetricMeasureSpace {
        MetricMeasureSpace::euclidean(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).unwrap()
    }

    #[test]
    fn modular_and_norm_examples() {
        let s = two();
        let p = ExponentField::new(Tag::P, vec![1.0, 2.0]).unwrap();
        assert_eq!(modular(&s, &[2.0, 2.0], &p), 3.0);
        assert_eq!(modular(&s, &[0.0, 0.0], &p), 0.0);
        let n = luxemburg(&s, &[2.0, 2.0], &p, 1e-13);
        assert!((n.value - 2.0).abs() < 1e-11, "{n:?}");
        assert!(n.tolerance <= 2.0 * 1e-13 * 2.0);
        assert_eq!(luxemburg(&s, &[0.0, 0.0], &p, 1e-10).value, 0.0);
        let pc = ExponentField::constant(Tag::P, 2, 3.0).unwrap();
        assert!((luxemburg(&s, &[-1.5, -1.5], &pc, 1e-12).value - 1.5).abs() < 1e-14);
    }

    #[test]
    fn embedding_constant_example() {
        let s = two();
        let p = ExponentField::constant(Tag::P, 2, 1.0).unwrap();
        let q = ExponentField::constant(Tag::P, 2, 2.0).unwrap();
        let c = lebesgue_embedding_constant(&s, &p, &q, 1e-12).unwrap();
        assert!((c - 2.0).abs() < 1e-12);
        assert!(lebesgue_embedding_constant(&s, &q, &p, 1e-12).is_err());
    }

    #[test]
    fn holder_trivial() {
        let s = two();
        let p = ExponentField::constant(Tag::P, 2, 2.0).unwrap();
        let c = holder_inequality_check(&s, &[1.0, 1.0], &[1.0, 1.0], &p, 1e-12).unwrap();
        assert!((c.lhs - 1.0).abs() < 1e-15 && (c.rhs - 2.0).abs() < 1e-12);
        let p1 = ExponentField::constant(Tag::P, 2, 1.0).unwrap();
        assert!(holder_inequality_check(&s, &[1.0, 1.0], &[1.0, 1.0], &p1, 1e-12).is_err());
    }
}
