//! Bracketing root finders and a golden-section minimizer.

/// A bracket `lo < x* <= hi` for a nonincreasing function crossing zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Expand `[lo, hi]` geometrically (in `x`) until `f(lo) > 0 >= f(hi)`.
/// `f` must be nonincreasing. Returns `None` if no sign change is found
/// within 200 doublings.
pub fn expand_decreasing<F: FnMut(f64) -> f64>(f: &mut F, mut lo: f64, mut hi: f64) -> Option<(f64, f64, f64, f64)> {
    if !(hi > lo) {
        hi = lo + 1.0;
    }
    let mut flo = f(lo);
    let mut fhi = f(hi);
    let mut step = (hi - lo).max(1e-3);
    for _ in 0..200 {
        if flo > 0.0 && fhi <= 0.0 {
            return Some((lo, flo, hi, fhi));
        }
        if !(flo > 0.0) {
            hi = lo;
            fhi = flo;
            lo -= step;
            flo = f(lo);
        } else {
            lo = hi;
            flo = fhi;
            hi += step;
            fhi = f(hi);
        }
        step *= 2.0;
    }
    None
}

/// Illinois (modified regula falsi) on a nonincreasing `f` with
/// `f(lo) > 0 >= f(hi)`; shrinks the bracket until its width is `<= xtol`.
/// Infinite values are allowed and handled by bisection.
pub fn illinois_decreasing<F: FnMut(f64) -> f64>(
    f: &mut F,
    mut lo: f64,
    mut flo: f64,
    mut hi: f64,
    mut fhi: f64,
    xtol: f64,
) -> Bracket {
    let mut side = 0i8;
    for _ in 0..400 {
        if hi - lo <= xtol {
            break;
        }
        let mut x = if flo.is_finite() && fhi.is_finite() && flo != fhi {
            hi - fhi * (hi - lo) / (fhi - flo)
        } else {
            0.5 * (lo + hi)
        };
        // Keep a minimum step so the bracket always closes from both sides.
        let guard = 0.25 * xtol;
        if !(x > lo + guard && x < hi - guard) {
            x = 0.5 * (lo + hi);
        }
        if x <= lo || x >= hi {
            break;
        }
        let fx = f(x);
        if fx == 0.0 {
            hi = x;
            lo = x;
            break;
        }
        if fx > 0.0 {
            lo = x;
            flo = fx;
            if side == 1 {
                fhi *= 0.5;
            }
            side = 1;
        } else {
            hi = x;
            fhi = fx;
            if side == -1 {
                flo *= 0.5;
            }
            side = -1;
        }
    }
    Bracket { lo, hi }
}

/// Plain bisection on a nonincreasing `f` with `f(lo) > 0 >= f(hi)`.
pub fn bisect_decreasing<F: FnMut(f64) -> f64>(f: &mut F, mut lo: f64, mut hi: f64, xtol: f64) -> Bracket {
    while hi - lo > xtol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Bracket { lo, hi }
}

/// Smallest `t > 0` with `g(t) <= 1`, for `g` nonincreasing in `t`, to relative
/// precision `rtol`. Works in log coordinates on `ln g`. Returns `0` when
/// `g` is already `<= 1` at `t = 1e-300`, and `inf` when it never drops to 1.
pub fn level_one_threshold<G: FnMut(f64) -> f64>(mut g: G, guess: f64, rtol: f64) -> Bracket {
    let mut f = |x: f64| {
        let v = g(libm::exp(x));
        if v == f64::INFINITY {
            f64::INFINITY
        } else if v <= 0.0 {
            f64::NEG_INFINITY
        } else {
            libm::log(v)
        }
    };
    let x0 = if guess > 0.0 && guess.is_finite() { libm::log(guess) } else { 0.0 };
    match expand_decreasing(&mut f, x0 - 1e-3, x0 + 1e-3) {
        Some((lo, flo, hi, fhi)) => {
            let b = illinois_decreasing(&mut f, lo, flo, hi, fhi, rtol);
            Bracket { lo: libm::exp(b.lo), hi: libm::exp(b.hi) }
        }
        None => {
            if f(x0) > 0.0 {
                Bracket { lo: f64::INFINITY, hi: f64::INFINITY }
            } else {
                Bracket { lo: 0.0, hi: 0.0 }
            }
        }
    }
}

/// Golden-section search for a minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > xtol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if !(b > a) {
            break;
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_of_power() {
        // g(t) = (3/t)^2 <= 1 iff t >= 3
        let b = level_one_threshold(|t| (3.0 / t) * (3.0 / t), 1.0, 1e-13);
        assert!(b.lo <= 3.0 && b.hi >= 3.0 - 1e-12);
        assert!((b.hi - 3.0).abs() < 1e-11);
    }

    #[test]
    fn threshold_degenerate() {
        assert_eq!(level_one_threshold(|_| 0.5, 1.0, 1e-10).hi, 0.0);
        assert_eq!(level_one_threshold(|_| 2.0, 1.0, 1e-10).hi, f64::INFINITY);
    }

    #[test]
    fn golden_quadratic() {
        let (x, _) = golden_min(|x| (x - 0.3) * (x - 0.3), -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn bisection_and_illinois_agree() {
        let mut f = |x: f64| 2.0 - x * x * x;
        let b1 = bisect_decreasing(&mut f, 0.0, 2.0, 1e-14);
        let b2 = illinois_decreasing(&mut f, 0.0, 2.0, 2.0, -6.0, 1e-14);
        assert!((b1.hi - b2.hi).abs() < 1e-13);
    }
}
