//! Minimal scalar and vector `s`-gradients and the resulting quasi-norms.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::barrier::{self, Block, Cover, Program};
use super::levels::{active_levels, level_of};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::norms::{luxemburg, mixed_norm_lp_lq, mixed_norm_lq_lp, pointwise_lq, NormKind, NormValue, SequenceSample};
use crate::root::{expand_decreasing, illinois_decreasing};
use crate::space::MetricMeasureSpace;

/// Default relative tolerance of the gradient norms.
pub const GRADIENT_TOL: f64 = 1e-9;

/// Which mixed norm a vector gradient is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// `l^{q}(L^{p})`, the Besov scale.
    LqLp,
    /// `L^{p}(l^{q})`, the Triebel–Lizorkin scale.
    LpLq,
}

/// Constraint coefficients of a vector gradient: `d(x,y)^{s(x)}`, or
/// `2^{-k s(x)}` on level `k` (the dyadic convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    Distance,
    Dyadic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Gradient {
    Scalar(Vec<f64>),
    Vector(SequenceSample),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientSolution {
    pub g: Gradient,
    /// Norm of `g` as measured by the evaluator of the target scale.
    pub objective: NormValue,
    /// Largest constraint violation of `g` (0 when feasible).
    #[serde(with = "crate::float")]
    pub certificate: f64,
    /// Largest `|u(x) - u(y)|`, the scale of `certificate`.
    #[serde(with = "crate::float")]
    pub scale: f64,
    /// Lower bound on the true minimum, when the problem is convex.
    #[serde(with = "crate::float::option")]
    pub lower_bound: Option<f64>,
    /// Set when the problem is nonconvex (`p^- < 1` or `q^- < 1`).
    pub heuristic: bool,
}

/// `|u_i - u_j| <= ci g_i + cj g_j` for one unordered pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairConstraint {
    pub i: usize,
    pub j: usize,
    pub ci: f64,
    pub cj: f64,
    pub target: f64,
    pub level: Option<i32>,
}

fn check_inputs(space: &MetricMeasureSpace, u: &[f64], fields: &[&ExponentField]) -> Result<()> {
    let n = space.len();
    if u.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: u.len() });
    }
    if let Some(i) = u.iter().position(|v| !v.is_finite()) {
        return Err(Error::Precondition { index: Some(i), message: "function values must be finite".into() });
    }
    for f in fields {
        f.check_len(n)?;
    }
    Ok(())
}

/// The scalar system: every unordered pair with coefficients `d^{s}`.
pub fn scalar_constraints(space: &MetricMeasureSpace, u: &[f64], s: &ExponentField) -> Vec<PairConstraint> {
    let n = space.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = space.d(i, j);
            out.push(PairConstraint {
                i,
                j,
                ci: libm::pow(d, s.get(i)),
                cj: libm::pow(d, s.get(j)),
                target: libm::fabs(u[i] - u[j]),
                level: None,
            });
        }
    }
    out
}

/// The vector system: every unordered pair, tagged with its dyadic level.
pub fn vector_constraints(space: &MetricMeasureSpace, u: &[f64], s: &ExponentField, coeffs: Coefficients) -> Vec<PairConstraint> {
    let mut out = scalar_constraints(space, u, s);
    for c in &mut out {
        let k = level_of(space.d(c.i, c.j));
        c.level = Some(k);
        if coeffs == Coefficients::Dyadic {
            c.ci = libm::exp2(-(k as f64) * s.get(c.i));
            c.cj = libm::exp2(-(k as f64) * s.get(c.j));
        }
    }
    out
}

/// Largest violation `|u_i - u_j| - d^{s_i} g_i - d^{s_j} g_j` (or 0).
pub fn scalar_certificate(space: &MetricMeasureSpace, u: &[f64], s: &ExponentField, g: &[f64]) -> f64 {
    scalar_constraints(space, u, s)
        .iter()
        .map(|c| c.target - c.ci * g[c.i] - c.cj * g[c.j])
        .fold(0.0, f64::max)
}

/// Largest violation of the vector system; missing levels count as zero.
pub fn vector_certificate(space: &MetricMeasureSpace, u: &[f64], s: &ExponentField, g: &SequenceSample, coeffs: Coefficients) -> f64 {
    vector_constraints(space, u, s, coeffs)
        .iter()
        .map(|c| {
            let (gi, gj) = match g.level(c.level.unwrap()) {
                Some(l) => (l[c.i], l[c.j]),
                None => (0.0, 0.0),
            };
            c.target - c.ci * gi - c.cj * gj
        })
        .fold(0.0, f64::max)
}

fn max_target(cons: &[PairConstraint]) -> f64 {
    cons.iter().map(|c| c.target).fold(0.0, f64::max)
}

/// Result of [`threshold`]: the smallest feasible `t`, a minimizer there and,
/// for convex programs, a certified lower bound on `t`.
struct Threshold {
    t: f64,
    x: Vec<f64>,
    lower: Option<f64>,
}

/// `inf { t > 0 : min_x sum_b w_b t^{-r_b} H_b(x) <= 1 }` where every `H_b`
/// is positively homogeneous and `r_b >= 0`.
///
/// `m(t)` is the inner minimum. For `t >= 1` it lies between `t^{-r^+} m(1)`
/// and `t^{-r^-} m(1)` (reversed below 1), so `ln t*` is bracketed by
/// `ln m(1) / r^{+-}`; equal degrees make the answer explicit.
fn threshold(prog: &Program, w: &[f64], r: &[f64], tol: f64) -> Threshold {
    let mut touched = vec![false; prog.nvar];
    for c in &prog.covers {
        touched[c.i] = true;
        touched[c.j] = true;
    }
    let active: Vec<usize> = (0..prog.blocks.len()).filter(|&b| prog.blocks[b].vars.iter().any(|&v| touched[v])).collect();
    if active.is_empty() {
        return Threshold { t: 0.0, x: vec![0.0; prog.nvar], lower: Some(0.0) };
    }
    let r_lo = active.iter().map(|&b| r[b]).fold(f64::INFINITY, f64::min);
    let r_hi = active.iter().map(|&b| r[b]).fold(0.0, f64::max);
    let first = barrier::solve(prog, w, None, barrier::REL_GAP);
    if r_hi == 0.0 {
        let t = if first.value <= 1.0 { 0.0 } else { f64::INFINITY };
        return Threshold { t, x: first.x, lower: Some(t) };
    }
    if r_lo == r_hi {
        let t = libm::pow(first.value, 1.0 / r_lo);
        let lower = if first.value > first.gap { libm::pow(first.value - first.gap, 1.0 / r_lo) } else { 0.0 };
        return Threshold { t, x: first.x, lower: Some(lower) };
    }
    let big_l = libm::log(first.value);
    let mut best: Option<(f64, barrier::Outcome)> = None;
    let mut warm = first.x.clone();
    let mut f = |x: f64| {
        let wt: Vec<f64> = (0..w.len()).map(|b| if r[b] == 0.0 { w[b] } else { w[b] * libm::exp(-r[b] * x) }).collect();
        let out = barrier::solve(prog, &wt, Some(&warm), barrier::REL_GAP);
        warm.clone_from(&out.x);
        let val = libm::log(out.value);
        if val <= 0.0 && best.as_ref().is_none_or(|(bx, _)| x < *bx) {
            best = Some((x, out));
        }
        val
    };
    let a = big_l / r_hi;
    let b = if r_lo > 0.0 { big_l / r_lo } else { a + libm::fabs(big_l) + 1.0 };
    let pad = 1e-9 * (1.0 + libm::fabs(big_l));
    let Some((lo, flo, hi, fhi)) = expand_decreasing(&mut f, a.min(b) - pad, a.max(b) + pad) else {
        return Threshold { t: f64::INFINITY, x: first.x, lower: None };
    };
    illinois_decreasing(&mut f, lo, flo, hi, fhi, tol);
    let (xt, out) = best.expect("a feasible side was evaluated");
    let t_hi = libm::exp(xt);
    // For t <= t_hi, m(t) >= (t_hi/t)^{r^-} m(t_hi), so t* >= t_hi (m_hi - gap)^{1/r^-}.
    let lower = if r_lo > 0.0 && out.value > out.gap { Some(t_hi * libm::pow(out.value - out.gap, 1.0 / r_lo)) } else { None };
    Threshold { t: t_hi, x: out.x, lower }
}

fn singleton_program(n: usize, cons: &[PairConstraint], p: &ExponentField, filter: impl Fn(&PairConstraint) -> bool) -> Program {
    Program {
        nvar: n,
        covers: cons
            .iter()
            .filter(|c| c.target > 0.0 && filter(c))
            .map(|c| Cover { i: c.i, j: c.j, a: c.ci, b: c.cj, c: c.target })
            .collect(),
        blocks: (0..n).map(|i| Block { vars: vec![i], p: p.get(i), q: 1.0 }).collect(),
    }
}

/// `inf ||g||_{L^p}` over scalar `s`-gradients of `u`.
pub fn minimal_scalar_gradient(space: &MetricMeasureSpace, u: &[f64], s: &ExponentField, p: &ExponentField, tol: f64) -> Result<GradientSolution> {
    check_inputs(space, u, &[s, p])?;
    let cons = scalar_constraints(space, u, s);
    let prog = singleton_program(space.len(), &cons, p, |_| true);
    let sol = threshold(&prog, space.weights(), p.values(), tol);
    let g = sol.x;
    let objective = luxemburg(space, &g, p, tol * 1e-2);
    let certificate = scalar_certificate(space, u, s, &g);
    let heuristic = p.min() < 1.0;
    Ok(GradientSolution {
        g: Gradient::Scalar(g),
        objective,
        certificate,
        scale: max_target(&cons),
        lower_bound: if heuristic { None } else { sol.lower },
        heuristic,
    })
}

/// Minimal vector gradient in the Distance convention.
pub fn minimal_vector_gradient(
    space: &MetricMeasureSpace,
    u: &[f64],
    s: &ExponentField,
    p: &ExponentField,
    q: &ExponentField,
    scale: Scale,
    tol: f64,
) -> Result<GradientSolution> {
    minimal_vector_gradient_with(space, u, s, p, q, scale, Coefficients::Distance, tol)
}

#[allow(clippy::too_many_arguments)]
pub fn minimal_vector_gradient_with(
    space: &MetricMeasureSpace,
    u: &[f64],
    s: &ExponentField,
    p: &ExponentField,
    q: &ExponentField,
    scale: Scale,
    coeffs: Coefficients,
    tol: f64,
) -> Result<GradientSolution> {
    check_inputs(space, u, &[s, p, q])?;
    let heuristic = p.min() < 1.0 || q.min() < 1.0;
    let n = space.len();
    if n < 2 {
        let g = SequenceSample::zeros(0, 0, n);
        let kind = if scale == Scale::LqLp { NormKind::MixedLqp } else { NormKind::MixedPlq };
        return Ok(GradientSolution {
            g: Gradient::Vector(g),
            objective: NormValue::exact(0.0, kind),
            certificate: 0.0,
            scale: 0.0,
            lower_bound: Some(0.0),
            heuristic,
        });
    }
    let (k_lo, k_hi) = active_levels(space)?;
    let count = (k_hi - k_lo + 1) as usize;
    let cons = vector_constraints(space, u, s, coeffs);
    let (g, lower) = match scale {
        Scale::LpLq => triebel_lizorkin(space, &cons, p, q, k_lo, count, tol),
        Scale::LqLp => besov(space, &cons, p, q, k_lo, count, tol),
    };
    let objective = match scale {
        Scale::LpLq => mixed_norm_lp_lq(space, &g, p, q, tol * 1e-2)?,
        Scale::LqLp => mixed_norm_lq_lp(space, &g, p, q, tol * 1e-2)?,
    };
    let certificate = vector_certificate(space, u, s, &g, coeffs);
    Ok(GradientSolution {
        g: Gradient::Vector(g),
        objective,
        certificate,
        scale: max_target(&cons),
        lower_bound: if heuristic { None } else { lower },
        heuristic,
    })
}

/// Joint solve over all levels. A point with `q = inf` carries one variable
/// shared by every level, which is optimal since only the sup counts there.
fn triebel_lizorkin(
    space: &MetricMeasureSpace,
    cons: &[PairConstraint],
    p: &ExponentField,
    q: &ExponentField,
    k_lo: i32,
    count: usize,
    tol: f64,
) -> (SequenceSample, Option<f64>) {
    let n = space.len();
    let var = |k: i32, i: usize| -> usize {
        if q.get(i).is_infinite() {
            i
        } else {
            n + (k - k_lo) as usize * n + i
        }
    };
    let nvar = n + count * n;
    let covers = cons
        .iter()
        .filter(|c| c.target > 0.0)
        .map(|c| {
            let k = c.level.unwrap();
            Cover { i: var(k, c.i), j: var(k, c.j), a: c.ci, b: c.cj, c: c.target }
        })
        .collect();
    let blocks = (0..n)
        .map(|i| {
            if q.get(i).is_infinite() {
                Block { vars: vec![i], p: p.get(i), q: 1.0 }
            } else {
                Block { vars: (0..count).map(|k| var(k_lo + k as i32, i)).collect(), p: p.get(i), q: q.get(i) }
            }
        })
        .collect();
    let prog = Program { nvar, covers, blocks };
    let sol = threshold(&prog, space.weights(), p.values(), tol);
    let mut g = SequenceSample::zeros(k_lo, count, n);
    for k in 0..count {
        for i in 0..n {
            g.levels[k][i] = sol.x[var(k_lo + k as i32, i)];
        }
    }
    (g, sol.lower)
}

fn besov(
    space: &MetricMeasureSpace,
    cons: &[PairConstraint],
    p: &ExponentField,
    q: &ExponentField,
    k_lo: i32,
    count: usize,
    tol: f64,
) -> (SequenceSample, Option<f64>) {
    let n = space.len();
    let programs: Vec<Program> =
        (0..count).map(|k| singleton_program(n, cons, p, |c| c.level == Some(k_lo + k as i32))).collect();
    let mut g = SequenceSample::zeros(k_lo, count, n);
    if q.is_constant() {
        // Levels decouple: each carries its own minimal L^p norm.
        let mut lows = Vec::with_capacity(count);
        for (k, prog) in programs.iter().enumerate() {
            let sol = threshold(prog, space.weights(), p.values(), tol);
            g.levels[k] = sol.x;
            lows.push(sol.lower.unwrap_or(0.0));
        }
        let lower = pointwise_lq(lows.into_iter(), q.get(0));
        return (g, Some(lower));
    }
    // Variable q: the modular is a sum over levels of per-level infima, each
    // minimized independently; solve for the outer scale mu.
    let ratio: Vec<f64> = (0..n).map(|i| p.get(i) / q.get(i)).collect();
    let level_weights = |mu: f64| -> Vec<f64> { (0..n).map(|i| space.weight(i) * libm::pow(mu, -p.get(i))).collect() };
    let guess = programs
        .iter()
        .map(|prog| threshold(prog, space.weights(), p.values(), 1e-6).t)
        .fold(0.0, f64::max);
    if guess == 0.0 {
        return (g, Some(0.0));
    }
    let inner = tol * 1e-2;
    let mut f = |x: f64| {
        let w = level_weights(libm::exp(x));
        let total: f64 = programs.iter().map(|prog| threshold(prog, &w, &ratio, inner).t).sum();
        if total == 0.0 {
            f64::NEG_INFINITY
        } else {
            libm::log(total)
        }
    };
    let x0 = libm::log(guess);
    let (lo, flo, hi, fhi) = expand_decreasing(&mut f, x0 - 0.25, x0 + 0.25).expect("modular is decreasing in the scale");
    let b = illinois_decreasing(&mut f, lo, flo, hi, fhi, tol);
    let w = level_weights(libm::exp(b.hi));
    for (k, prog) in programs.iter().enumerate() {
        g.levels[k] = threshold(prog, &w, &ratio, inner).x;
    }
    (g, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Tag;

    fn line(xs: &[f64], w: &[f64]) -> MetricMeasureSpace {
        MetricMeasureSpace::euclidean(xs.iter().map(|&x| vec![x]).collect(), w.to_vec()).unwrap()
    }

    fn c(tag: Tag, n: usize, v: f64) -> ExponentField {
        ExponentField::constant(tag, n, v).unwrap()
    }

    #[test]
    fn two_point_lp() {
        let s = line(&[0.0, 1.0], &[1.0, 1.0]);
        let sol = minimal_scalar_gradient(&s, &[0.0, 1.0], &c(Tag::S, 2, 1.0), &c(Tag::P, 2, 1.0), 1e-10).unwrap();
        assert!((sol.objective.value - 1.0).abs() < 1e-8, "{sol:?}");
        assert!(sol.certificate <= 1e-12);
        for scale in [Scale::LpLq, Scale::LqLp] {
            let v = minimal_vector_gradient(&s, &[0.0, 1.0], &c(Tag::S, 2, 1.0), &c(Tag::P, 2, 1.0), &c(Tag::Q, 2, 1.0), scale, 1e-10).unwrap();
            assert!((v.objective.value - 1.0).abs() < 1e-8, "{v:?}");
            match &v.g {
                Gradient::Vector(g) => assert_eq!(g.k_min, -1),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn constant_u_has_zero_gradient() {
        let s = line(&[0.0, 1.0, 2.5], &[1.0, 2.0, 1.0]);
        let sol = minimal_scalar_gradient(&s, &[3.0; 3], &c(Tag::S, 3, 0.5), &c(Tag::P, 3, 2.0), 1e-10).unwrap();
        assert_eq!(sol.objective.value, 0.0);
    }

    #[test]
    fn variable_p_scalar_and_tl_infinity_agree() {
        let s = line(&[0.0, 0.3, 0.7, 1.6], &[0.4, 1.0, 0.7, 0.2]);
        let u = [0.0, 1.0, 0.4, -0.5];
        let sf = ExponentField::new(Tag::S, vec![0.5, 0.8, 0.6, 0.9]).unwrap();
        let p = ExponentField::new(Tag::P, vec![1.2, 2.0, 1.5, 1.1]).unwrap();
        let m = minimal_scalar_gradient(&s, &u, &sf, &p, 1e-10).unwrap();
        let t = minimal_vector_gradient(&s, &u, &sf, &p, &c(Tag::Q, 4, f64::INFINITY), Scale::LpLq, 1e-10).unwrap();
        assert!((m.objective.value - t.objective.value).abs() < 1e-8 * m.objective.value, "{} {}", m.objective.value, t.objective.value);
        assert!(m.lower_bound.unwrap() <= m.objective.value * (1.0 + 1e-9));
        assert!(m.lower_bound.unwrap() >= m.objective.value * (1.0 - 1e-6));
    }

    #[test]
    fn besov_and_tl_agree_when_q_equals_p() {
        let s = line(&[0.0, 0.3, 0.7, 1.6, 2.0], &[0.4, 1.0, 0.7, 0.2, 0.5]);
        let u = [0.0, 1.0, 0.4, -0.5, 0.2];
        let sf = c(Tag::S, 5, 0.7);
        let p = ExponentField::new(Tag::P, vec![1.2, 2.0, 1.5, 1.1, 1.7]).unwrap();
        let q = p.clone().with_tag(Tag::Q).unwrap();
        let a = minimal_vector_gradient(&s, &u, &sf, &p, &q, Scale::LpLq, 1e-10).unwrap();
        let b = minimal_vector_gradient(&s, &u, &sf, &p, &q, Scale::LqLp, 1e-10).unwrap();
        assert!((a.objective.value - b.objective.value).abs() < 1e-7 * a.objective.value, "{} {}", a.objective.value, b.objective.value);
    }
}
