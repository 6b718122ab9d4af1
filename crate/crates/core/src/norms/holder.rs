use crate::exponent::ExponentField;
use crate::space::MetricMeasureSpace;

/// `max_{x != y} |u(x) - u(y)| / d(x,y)^{alpha(x)}` over ordered pairs.
pub fn holder_seminorm(space: &MetricMeasureSpace, u: &[f64], alpha: &ExponentField) -> f64 {
    let n = space.len();
    let mut best: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            if x != y && u[x] != u[y] {
                best = best.max(libm::fabs(u[x] - u[y]) / libm::pow(space.d(x, y), alpha.get(x)));
            }
        }
    }
    best
}

pub fn sup_norm(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(libm::fabs(*v)))
}

/// `sup |u| + [u]_alpha`.
pub fn holder_norm(space: &MetricMeasureSpace, u: &[f64], alpha: &ExponentField) -> f64 {
    sup_norm(u) + holder_seminorm(space, u, alpha)
}
