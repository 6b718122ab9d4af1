//! Variable exponent fields and the operations on them.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::check::{Check, CheckReport};
use crate::error::{Error, Result};
use crate::space::{Ball, MetricMeasureSpace};

/// Which role an exponent field plays. Only `q` may take the value `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "p")]
    P,
    #[serde(rename = "s")]
    S,
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "Q")]
    Dim,
    #[serde(rename = "gamma", alias = "γ")]
    Gamma,
    #[serde(rename = "alpha", alias = "α")]
    Alpha,
    #[serde(rename = "epsilon", alias = "ε")]
    Epsilon,
    #[serde(rename = "t")]
    T,
}

impl Tag {
    pub fn allows_infinity(self) -> bool {
        self == Tag::Q
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::P => "p",
            Tag::S => "s",
            Tag::Q => "q",
            Tag::Dim => "Q",
            Tag::Gamma => "gamma",
            Tag::Alpha => "alpha",
            Tag::Epsilon => "epsilon",
            Tag::T => "t",
        }
    }
}

/// Per-point values of a variable exponent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct ExponentField {
    tag: Tag,
    values: Vec<f64>,
}

/// Wire form `{"name": tag, "values": [...]}`, validated on load.
#[derive(Serialize, Deserialize)]
struct FieldRepr {
    name: Tag,
    #[serde(with = "crate::float::vec")]
    values: Vec<f64>,
}

impl TryFrom<FieldRepr> for ExponentField {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Self> {
        ExponentField::new(r.name, r.values)
    }
}

impl From<ExponentField> for FieldRepr {
    fn from(f: ExponentField) -> Self {
        FieldRepr { name: f.tag, values: f.values }
    }
}

impl ExponentField {
    /// Values must be finite and positive; `q` fields may also hold `+inf`.
    pub fn new(tag: Tag, values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if value == f64::INFINITY {
                if !tag.allows_infinity() {
                    return Err(Error::BadExponent { index, value, reason: "only q may be infinite" });
                }
            } else if !(value > 0.0 && value.is_finite()) {
                return Err(Error::BadExponent { index, value, reason: "must be finite and positive" });
            }
        }
        Ok(ExponentField { tag, values })
    }

    pub fn constant(tag: Tag, n: usize, value: f64) -> Result<Self> {
        Self::new(tag, alloc::vec![value; n])
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn with_tag(mut self, tag: Tag) -> Result<Self> {
        if !tag.allows_infinity() && self.has_infinity() {
            return Err(Error::InvalidArgument(format!("field {} contains +inf", tag.name())));
        }
        self.tag = tag;
        Ok(self)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn has_infinity(&self) -> bool {
        self.values.iter().any(|v| v.is_infinite())
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }

    /// Global infimum; `+inf` for an empty field.
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `(inf_E f, sup_E f)`.
    pub fn restricted_bounds(&self, set: &[usize]) -> Result<(f64, f64)> {
        if set.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &i in set {
            let v = *self.values.get(i).ok_or(Error::IndexOutOfRange { index: i, len: self.len() })?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    }

    /// The field restricted to `set`, in that order.
    pub fn restrict(&self, set: &[usize]) -> ExponentField {
        ExponentField { tag: self.tag, values: set.iter().map(|&i| self.values[i]).collect() }
    }

    /// Pointwise `1/f`, with `1/inf = 0`. Not itself an exponent field.
    pub fn reciprocal_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| 1.0 / v).collect()
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: n, found: self.len() })
        }
    }
}

/// Closed-form exponent specifications expanded against a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ExponentFormula {
    Constant {
        #[serde(with = "crate::float")]
        value: f64,
    },
    /// `intercept + slope * x[axis]`; needs coordinates.
    Affine { intercept: f64, slope: f64, #[serde(default)] axis: usize },
    /// `inside` on the listed points, `outside` elsewhere.
    TwoZone {
        #[serde(with = "crate::float")]
        inside: f64,
        #[serde(with = "crate::float")]
        outside: f64,
        zone: Vec<usize>,
    },
}

impl ExponentFormula {
    pub fn expand(&self, tag: Tag, space: &MetricMeasureSpace) -> Result<ExponentField> {
        let n = space.len();
        let values = match self {
            ExponentFormula::Constant { value } => alloc::vec![*value; n],
            ExponentFormula::Affine { intercept, slope, axis } => {
                let coords = space
                    .coords()
                    .ok_or_else(|| Error::InvalidArgument("affine exponent needs point coordinates".into()))?;
                let mut out = Vec::with_capacity(n);
                for c in coords {
                    let x = c.get(*axis).ok_or_else(|| {
                        Error::InvalidArgument(format!("axis {axis} out of range for dimension {}", c.len()))
                    })?;
                    out.push(intercept + slope * x);
                }
                out
            }
            ExponentFormula::TwoZone { inside, outside, zone } => {
                let mut out = alloc::vec![*outside; n];
                for &i in zone {
                    space.check_index(i)?;
                    out[i] = *inside;
                }
                out
            }
        };
        ExponentField::new(tag, values)
    }
}

/// `f >> g`: `min (f - g) > 0`.
pub fn strictly_dominates(f: &ExponentField, g: &ExponentField) -> Result<bool> {
    f.check_len(g.len())?;
    if f.is_empty() {
        return Ok(false);
    }
    Ok(f.values.iter().zip(&g.values).all(|(a, b)| a > b && !(a.is_infinite() && b.is_infinite())))
}

/// Smallest `C` with `|v(x) - v(y)| <= C / log(e + 1/d(x,y))` over pairs in `set`
/// (all points when `None`).
pub fn log_holder_of(values: &[f64], space: &MetricMeasureSpace, set: Option<&[usize]>) -> f64 {
    let all: Vec<usize>;
    let pts = match set {
        Some(s) => s,
        None => {
            all = (0..space.len()).collect();
            &all
        }
    };
    let mut c: f64 = 0.0;
    for (a, &i) in pts.iter().enumerate() {
        for &j in &pts[a + 1..] {
            if values[i] == values[j] {
                continue;
            }
            let diff = libm::fabs(values[i] - values[j]);
            c = c.max(diff * libm::log(core::f64::consts::E + 1.0 / space.d(i, j)));
        }
    }
    c
}

/// `C_log(f)` over the whole space.
pub fn log_holder_constant(f: &ExponentField, space: &MetricMeasureSpace) -> f64 {
    log_holder_of(f.values(), space, None)
}

/// `C_log(1/f)`, the constant defining the class of log-Hölder exponents.
pub fn log_holder_constant_recip(f: &ExponentField, space: &MetricMeasureSpace, set: Option<&[usize]>) -> f64 {
    log_holder_of(&f.reciprocal_values(), space, set)
}

/// The three log-Hölder comparison estimates on a ball, with `C_log(1/t)`
/// computed over the ball's members.
pub fn loglemma_bounds(
    t: &ExponentField,
    space: &MetricMeasureSpace,
    ball: &Ball,
    big_r: f64,
) -> Result<CheckReport> {
    t.check_len(space.len())?;
    if t.has_infinity() {
        return Err(Error::InvalidArgument("log-Hölder bounds need a bounded exponent".into()));
    }
    let mut report = CheckReport::new("loglemma");
    if ball.members.is_empty() {
        return Ok(report);
    }
    let r = ball.radius;
    let (t_lo, t_hi) = t.restricted_bounds(&ball.members)?;
    let c = log_holder_constant_recip(t, space, Some(&ball.members));
    let ec = libm::exp(c);
    report.push(Check::le("R >= 2r", 2.0 * r, big_r));

    let inv_r = 1.0 / big_r;
    let lower = libm::pow(inv_r, 1.0 / t_lo) / ec;
    let upper = ec * libm::pow(inv_r, 1.0 / t_hi);
    let mut low_check = Check::le("(i) lower", lower, libm::pow(inv_r, 1.0 / t.get(ball.members[0])));
    let mut up_check = Check::le("(i) upper", libm::pow(inv_r, 1.0 / t.get(ball.members[0])), upper);
    for &x in &ball.members[1..] {
        let mid = libm::pow(inv_r, 1.0 / t.get(x));
        low_check = low_check.worst(Check::le("(i) lower", lower, mid));
        up_check = up_check.worst(Check::le("(i) upper", mid, upper));
    }
    report.push(low_check);
    report.push(up_check);

    let gap = 1.0 / t_lo - 1.0 / t_hi;
    report.push(Check::le("(ii)", libm::pow(r, -gap), ec * libm::pow(2.0, gap)));

    let m = m_constant(r, t_lo, c);
    let mut pair = Check::le("(iii)", 0.0, 0.0);
    for &x in &ball.members {
        for &y in &ball.members {
            if x == y {
                continue;
            }
            let d = space.d(x, y);
            let dx = libm::pow(d, 1.0 / t.get(x));
            let dy = libm::pow(d, 1.0 / t.get(y));
            pair = pair.worst(Check::le("(iii)", dx, m * dy)).worst(Check::le("(iii)", dy / m, dx));
        }
    }
    report.push(pair);
    report.push(Check::le("M >= 1", 1.0, m));
    Ok(report)
}

/// `M(r,t) = max{1, (2r)^{2/t^-}, e^{C_log(1/t)}}`.
pub fn m_constant(r: f64, t_lo: f64, c_log_recip: f64) -> f64 {
    1f64.max(libm::pow(2.0 * r, 2.0 / t_lo)).max(libm::exp(c_log_recip))
}

/// `gamma = Q p / (Q - s p)`; requires `s p < Q` at every point.
pub fn sobolev_conjugate(q_dim: &ExponentField, s: &ExponentField, p: &ExponentField) -> Result<ExponentField> {
    let n = q_dim.len();
    s.check_len(n)?;
    p.check_len(n)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let sp = s.get(i) * p.get(i);
        let qd = q_dim.get(i);
        if !(sp < qd) {
            return Err(Error::Precondition { index: Some(i), message: format!("need s p < Q, got s p = {sp}, Q = {qd}") });
        }
        out.push(qd * p.get(i) / (qd - sp));
    }
    ExponentField::new(Tag::Gamma, out)
}

/// `alpha = s - Q/p`; requires `s p > Q` at every point.
pub fn holder_exponent(q_dim: &ExponentField, s: &ExponentField, p: &ExponentField) -> Result<ExponentField> {
    let n = q_dim.len();
    s.check_len(n)?;
    p.check_len(n)?;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = s.get(i) - q_dim.get(i) / p.get(i);
        if !(a > 0.0) {
            return Err(Error::Precondition {
                index: Some(i),
                message: format!("need s p > Q, got alpha = {a}"),
            });
        }
        out.push(a);
    }
    ExponentField::new(Tag::Alpha, out)
}

/// `p' = p / (p - 1)`; requires `p^- > 1`.
pub fn conjugate(p: &ExponentField) -> Result<ExponentField> {
    let mut out = Vec::with_capacity(p.len());
    for (i, &v) in p.values().iter().enumerate() {
        if !(v > 1.0) || v.is_infinite() {
            return Err(Error::Precondition { index: Some(i), message: format!("conjugate needs 1 < p < inf, got {v}") });
        }
        out.push(v / (v - 1.0));
    }
    ExponentField::new(p.tag(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn field(v: &[f64]) -> ExponentField {
        ExponentField::new(Tag::P, v.to_vec()).unwrap()
    }

    #[test]
    fn bounds_and_order() {
        let f = field(&[1.0, 2.0, 3.0]);
        assert_eq!(f.restricted_bounds(&[0, 2]).unwrap(), (1.0, 3.0));
        assert_eq!(f.restricted_bounds(&[]), Err(Error::EmptySet));
        assert!(strictly_dominates(&field(&[2.0, 2.0]), &field(&[1.0, 1.0])).unwrap());
        assert!(!strictly_dominates(&field(&[2.0, 1.0]), &field(&[1.0, 1.0])).unwrap());
        assert!(!strictly_dominates(&f, &f).unwrap());
    }

    #[test]
    fn infinity_only_for_q() {
        assert!(ExponentField::new(Tag::Q, vec![f64::INFINITY]).is_ok());
        assert!(ExponentField::new(Tag::P, vec![f64::INFINITY]).is_err());
        assert!(ExponentField::new(Tag::P, vec![0.0]).is_err());
    }

    #[test]
    fn log_holder_two_points() {
        let s = MetricMeasureSpace::euclidean(vec![vec![0.0], vec![1.0]], vec![1.0, 1.0]).unwrap();
        let c = log_holder_constant(&field(&[1.0, 2.0]), &s);
        assert!((c - libm::log(core::f64::consts::E + 1.0)).abs() < 1e-12);
        assert!((c - 1.31326).abs() < 1e-5);
        assert_eq!(log_holder_constant(&field(&[3.0, 3.0]), &s), 0.0);
    }

    #[test]
    fn derived_exponents() {
        let c = |v| ExponentField::constant(Tag::P, 1, v).unwrap();
        let g = sobolev_conjugate(&c(2.0), &c(1.0), &c(1.0)).unwrap();
        assert_eq!(g.get(0), 2.0);
        assert_eq!(conjugate(&c(2.0)).unwrap().get(0), 2.0);
        assert_eq!(holder_exponent(&c(1.0), &c(1.0), &c(2.0)).unwrap().get(0), 0.5);
        assert!(matches!(sobolev_conjugate(&c(1.0), &c(1.0), &c(1.0)), Err(Error::Precondition { index: Some(0), .. })));
        assert!(conjugate(&c(1.0)).is_err());
    }

    #[test]
    fn loglemma_examples() {
        let s = MetricMeasureSpace::euclidean(vec![vec![0.0], vec![0.5]], vec![1.0, 1.0]).unwrap();
        let ball = s.ball(0, 0.5 + 1e-9).unwrap();
        assert_eq!(ball.members, vec![0, 1]);
        let r = loglemma_bounds(&field(&[2.0, 3.0]), &s, &ball, 1.0 + 2e-9).unwrap();
        assert!(r.pass, "{r:?}");
        let r = loglemma_bounds(&field(&[2.0, 2.0]), &s, &ball, 2.0).unwrap();
        assert!(r.pass);
    }
}
