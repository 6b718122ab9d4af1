//! Dyadic levels: a pair at distance `d` belongs to the `k` with `2^{-k-1} <= d < 2^{-k}`.

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// The dyadic level of a positive distance.
pub fn level_of(d: f64) -> i32 {
    debug_assert!(d > 0.0 && d.is_finite());
    let mut k = libm::ceil(-libm::log2(d)) as i32 - 1;
    // log2 may be off by an ulp near powers of two; fix up with exact scaling.
    while d >= libm::ldexp(1.0, -k) {
        k -= 1;
    }
    while d < libm::ldexp(1.0, -k - 1) {
        k += 1;
    }
    k
}

/// Smallest and largest level carried by some pair.
pub fn active_levels(space: &MetricMeasureSpace) -> Result<(i32, i32)> {
    if space.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: space.len() });
    }
    let mut lo = i32::MAX;
    let mut hi = i32::MIN;
    for i in 0..space.len() {
        for j in (i + 1)..space.len() {
            let k = level_of(space.d(i, j));
            lo = lo.min(k);
            hi = hi.max(k);
        }
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn examples() {
        assert_eq!(level_of(0.6), 0);
        assert_eq!(level_of(0.3), 1);
        assert_eq!(level_of(0.5), 0);
        assert_eq!(level_of(1.0), -1);
        assert_eq!(level_of(0.25), 1);
        assert_eq!(level_of(3.0), -2);
        let s = MetricMeasureSpace::euclidean(vec![vec![0.0], vec![0.3], vec![0.6]], vec![1.0; 3]).unwrap();
        assert_eq!(active_levels(&s).unwrap(), (0, 1));
    }

    #[test]
    fn bracket_holds_on_a_sweep() {
        let mut d = 1e-6;
        while d < 1e6 {
            let k = level_of(d);
            assert!(libm::ldexp(1.0, -k - 1) <= d && d < libm::ldexp(1.0, -k), "{d} {k}");
            d *= 1.0137;
        }
    }
}
