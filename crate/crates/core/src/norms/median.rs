use alloc::vec::Vec;

use super::lebesgue::luxemburg_on;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::space::MetricMeasureSpace;

/// `max { t : mu({x in E : u(x) < t}) <= mu(E)/2 }`.
pub fn median(space: &MetricMeasureSpace, u: &[f64], set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    for &i in set {
        space.check_index(i)?;
    }
    let mut order: Vec<usize> = set.to_vec();
    order.sort_by(|&a, &b| u[a].total_cmp(&u[b]));
    let half = space.measure(set) / 2.0;
    // The threshold is the first value whose closed sublevel set exceeds half the mass.
    let mut acc = 0.0;
    let mut idx = 0;
    while idx < order.len() {
        let v = u[order[idx]];
        while idx < order.len() && u[order[idx]] == v {
            acc += space.weight(order[idx]);
            idx += 1;
        }
        if acc > half {
            return Ok(v);
        }
    }
    // Rounding can leave the full mass at exactly half; the largest value is then the answer.
    Ok(u[*order.last().unwrap()])
}

/// `|m_u(E) - c| <= max{2, (2/mu(E))^{1/p_E^-}} ||u - c||_{L^p(E)}`.
pub fn median_bound_check(
    space: &MetricMeasureSpace,
    u: &[f64],
    set: &[usize],
    p: &ExponentField,
    c: f64,
    tol: f64,
) -> Result<Check> {
    let m = median(space, u, set)?;
    let (p_lo, _) = p.restricted_bounds(set)?;
    let factor = 2f64.max(libm::pow(2.0 / space.measure(set), 1.0 / p_lo));
    let shifted: Vec<f64> = u.iter().map(|v| v - c).collect();
    let norm = luxemburg_on(space, &shifted, p, set, tol).value;
    Ok(Check::le("median bound", libm::fabs(m - c), factor * norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::Tag;
    use alloc::vec;

    #[test]
    fn examples() {
        let s = MetricMeasureSpace::euclidean(vec![vec![0.0], vec![1.0]], vec![0.5, 0.5]).unwrap();
        assert_eq!(median(&s, &[0.0, 1.0], &[0, 1]).unwrap(), 1.0);
        assert_eq!(median(&s, &[4.0, 4.0], &[0, 1]).unwrap(), 4.0);
        assert_eq!(median(&s, &[0.0, 1.0], &[]), Err(Error::EmptySet));
        let p = ExponentField::constant(Tag::P, 2, 1.0).unwrap();
        let c = median_bound_check(&s, &[0.0, 1.0], &[0, 1], &p, 0.0, 1e-12).unwrap();
        assert!(c.margin.abs() < 1e-12 && c.pass, "{c:?}");
    }
}
