//! Lower and upper Ahlfors regularity of the measure.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ExponentField, Tag};
use crate::space::{MetricMeasureSpace, Witness};

/// Relative tolerance for recording several minimizers.
const WITNESS_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityProfile {
    #[serde(rename = "Q")]
    pub q: ExponentField,
    /// Largest `b` with `mu(B(x,r)) >= b r^{Q(x)}` on the scanned range.
    pub b_lower: f64,
    /// Smallest `b` with `mu(B(x,r)) <= b r^{Q(x)}` on the scanned range.
    pub b_upper: Option<f64>,
    pub r_min: f64,
    pub r_max: f64,
    /// Every `(x, r)` attaining `b_lower`.
    pub witnesses: Vec<Witness>,
}

/// Per-point distances sorted ascending with the running mass of the
/// closed ball at each of them.
struct Profile {
    dist: Vec<f64>,
    closed_mass: Vec<f64>,
}

impl Profile {
    fn new(space: &MetricMeasureSpace, x: usize) -> Profile {
        let row = space.row(x);
        let mut order: Vec<usize> = (0..space.len()).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]));
        let mut dist = Vec::with_capacity(order.len());
        let mut closed_mass: Vec<f64> = Vec::with_capacity(order.len());
        let mut acc = 0.0;
        for &j in &order {
            acc += space.weight(j);
            if dist.last() == Some(&row[j]) {
                *closed_mass.last_mut().unwrap() = acc;
            } else {
                dist.push(row[j]);
                closed_mass.push(acc);
            }
        }
        Profile { dist, closed_mass }
    }

    /// `mu({ y : d(x,y) < r })`.
    fn open_mass(&self, r: f64) -> f64 {
        let k = self.dist.partition_point(|&d| d < r);
        if k == 0 {
            0.0
        } else {
            self.closed_mass[k - 1]
        }
    }
}

/// Exact extremes of `mu(B(x,r)) / r^{Q(x)}` over all centers and all
/// `r in [r_min, r_max]`.
///
/// The open-ball mass is constant on each `(d_j, d_{j+1}]`, so the infimum is
/// attained at a distance or at `r_max`, and the supremum is approached just
/// above a distance (closed-ball mass) or at `r_min`.
///
/// `r_min` defaults to the smallest positive distance and `r_max` to 1.
pub fn best_lower_constant(space: &MetricMeasureSpace, q: &ExponentField, r_min: Option<f64>, r_max: Option<f64>) -> Result<RegularityProfile> {
    let n = space.len();
    q.check_len(n)?;
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let r_max = r_max.unwrap_or(1.0);
    let r_min = r_min.or(space.min_distance()).unwrap_or(r_max);
    if !(r_min > 0.0 && r_min <= r_max && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < r_min <= r_max < inf, got [{r_min}, {r_max}]")));
    }
    let mut lower = f64::INFINITY;
    let mut upper: f64 = 0.0;
    let mut candidates: Vec<(f64, Witness)> = Vec::new();
    for x in 0..n {
        let prof = Profile::new(space, x);
        let qx = q.get(x);
        let mut visit = |r: f64, mass: f64| {
            let v = mass / libm::pow(r, qx);
            if v <= lower * (1.0 + WITNESS_RTOL) {
                lower = lower.min(v);
                candidates.push((v, Witness { point: x, radius: r }));
            }
        };
        for &d in prof.dist.iter().filter(|&&d| d >= r_min && d <= r_max) {
            visit(d, prof.open_mass(d));
        }
        visit(r_max, prof.open_mass(r_max));
        upper = upper.max(prof.open_mass(r_min) / libm::pow(r_min, qx));
        for (k, &d) in prof.dist.iter().enumerate() {
            if d >= r_min && d < r_max {
                upper = upper.max(prof.closed_mass[k] / libm::pow(d, qx));
            }
        }
    }
    let mut witnesses: Vec<Witness> =
        candidates.into_iter().filter(|(v, _)| *v <= lower * (1.0 + WITNESS_RTOL)).map(|(_, w)| w).collect();
    witnesses.dedup();
    Ok(RegularityProfile { q: q.clone(), b_lower: lower, b_upper: Some(upper), r_min, r_max, witnesses })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    #[serde(rename = "Q")]
    pub q: ExponentField,
    /// Coefficient of determination of each per-point fit.
    pub r_squared: Vec<f64>,
    pub radii_used: Vec<usize>,
}

/// Least-squares slope of `log mu(B(x,r))` against `log r` over the critical
/// radii in `[r_min, r_max]`, for every point.
pub fn estimate_q(space: &MetricMeasureSpace, r_min: f64, r_max: f64) -> Result<DimensionEstimate> {
    let n = space.len();
    if !(r_min > 0.0 && r_min < r_max) {
        return Err(Error::InvalidArgument(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    let radii: Vec<f64> = space.critical_radii().into_iter().filter(|&r| r >= r_min && r <= r_max).collect();
    let mut slopes = Vec::with_capacity(n);
    let mut r_squared = Vec::with_capacity(n);
    let mut radii_used = Vec::with_capacity(n);
    for x in 0..n {
        let prof = Profile::new(space, x);
        let pts: Vec<(f64, f64)> = radii
            .iter()
            .filter_map(|&r| {
                let m = prof.open_mass(r);
                (m > 0.0).then(|| (libm::log(r), libm::log(m)))
            })
            .collect();
        if pts.len() < 3 {
            return Err(Error::Precondition { index: Some(x), message: format!("only {} radii in range, need 3", pts.len()) });
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = pts.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        if !(slope > 0.0) {
            return Err(Error::Precondition { index: Some(x), message: format!("ball masses do not grow (slope {slope})") });
        }
        slopes.push(slope);
        r_squared.push(if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 });
        radii_used.push(pts.len());
    }
    Ok(DimensionEstimate { q: ExponentField::new(Tag::Dim, slopes)?, r_squared, radii_used })
}

/// Constant valid up to `delta_prime` from one valid up to `delta`:
/// `b (delta / delta')^{Q^+}`.
pub fn rescale_threshold(b: f64, delta: f64, delta_prime: f64, q_plus: f64) -> Result<f64> {
    if !(delta > 0.0 && delta_prime >= delta && delta_prime.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < delta <= delta' < inf, got {delta}, {delta_prime}")));
    }
    Ok(b * libm::pow(delta / delta_prime, q_plus))
}
