//! Named test functions on a space.

use alloc::format;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// The `axis`-th coordinate; needs a space with coordinates.
pub fn coordinate(space: &MetricMeasureSpace, axis: usize) -> Result<Vec<f64>> {
    let coords = space.coords().ok_or_else(|| Error::InvalidArgument("space has no coordinates".into()))?;
    coords
        .iter()
        .map(|c| c.get(axis).copied().ok_or_else(|| Error::InvalidArgument(format!("no axis {axis}"))))
        .collect()
}

/// `d(x, center)`.
pub fn distance(space: &MetricMeasureSpace, center: usize) -> Result<Vec<f64>> {
    space.check_index(center)?;
    Ok(space.row(center).to_vec())
}

/// `d(x, center)^theta`, with value 0 at the centre.
pub fn power(space: &MetricMeasureSpace, center: usize, theta: f64) -> Result<Vec<f64>> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidArgument(format!("theta must be positive, got {theta}")));
    }
    Ok(distance(space, center)?.into_iter().map(|d| libm::pow(d, theta)).collect())
}

/// 1 on `B(center, inner)`, 0 off `B(center, outer)`, linear in the distance
/// between; Lipschitz with constant `1 / (outer - inner)`.
pub fn annular_cutoff(space: &MetricMeasureSpace, center: usize, inner: f64, outer: f64) -> Result<Vec<f64>> {
    if !(inner >= 0.0 && outer > inner && outer.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 <= inner < outer, got {inner}, {outer}")));
    }
    Ok(distance(space, center)?.into_iter().map(|d| ((outer - d) / (outer - inner)).clamp(0.0, 1.0)).collect())
}

/// `max(0, ln(radius / max(d(x, center), floor)))`.
pub fn log_bump(space: &MetricMeasureSpace, center: usize, radius: f64, floor: f64) -> Result<Vec<f64>> {
    if !(radius > 0.0 && floor > 0.0 && floor <= radius) {
        return Err(Error::InvalidArgument(format!("need 0 < floor <= radius, got {floor}, {radius}")));
    }
    Ok(distance(space, center)?.into_iter().map(|d| libm::log(radius / d.max(floor)).max(0.0)).collect())
}

/// Uniform values in `[0, 1)` from a seeded ChaCha8 stream.
pub fn random(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// Serializable description of a test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    Values { values: Vec<f64> },
    Constant { value: f64 },
    Coordinate { axis: usize },
    Distance { center: usize },
    Power { center: usize, theta: f64 },
    AnnularCutoff { center: usize, inner: f64, outer: f64 },
    LogBump { center: usize, radius: f64, floor: f64 },
    Random { seed: u64 },
}

impl FunctionSpec {
    pub fn evaluate(&self, space: &MetricMeasureSpace) -> Result<Vec<f64>> {
        let n = space.len();
        match *self {
            FunctionSpec::Values { ref values } => {
                if values.len() != n {
                    return Err(Error::LengthMismatch { expected: n, found: values.len() });
                }
                Ok(values.clone())
            }
            FunctionSpec::Constant { value } => Ok(alloc::vec![value; n]),
            FunctionSpec::Coordinate { axis } => coordinate(space, axis),
            FunctionSpec::Distance { center } => distance(space, center),
            FunctionSpec::Power { center, theta } => power(space, center, theta),
            FunctionSpec::AnnularCutoff { center, inner, outer } => annular_cutoff(space, center, inner, outer),
            FunctionSpec::LogBump { center, radius, floor } => log_bump(space, center, radius, floor),
            FunctionSpec::Random { seed } => Ok(random(n, seed)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::grid1d;

    #[test]
    fn cutoff_shape() {
        let sp = grid1d(10, 0.1).unwrap();
        let u = annular_cutoff(&sp, 0, 0.2, 0.6).unwrap();
        assert_eq!(u[0], 1.0);
        assert_eq!(u[2], 1.0);
        assert!((u[4] - 0.5).abs() < 1e-12);
        assert_eq!(u[9], 0.0);
    }

    #[test]
    fn random_is_seeded() {
        assert_eq!(random(5, 7), random(5, 7));
        assert_ne!(random(5, 7), random(5, 8));
        assert!(random(100, 1).iter().all(|&v| (0.0..1.0).contains(&v)));
    }

    #[test]
    fn power_and_bump() {
        let sp = grid1d(4, 1.0).unwrap();
        assert_eq!(power(&sp, 0, 2.0).unwrap(), alloc::vec![0.0, 1.0, 4.0, 9.0]);
        let b = log_bump(&sp, 0, 2.0, 0.5).unwrap();
        assert!((b[0] - libm::log(4.0)).abs() < 1e-15);
        assert!((b[1] - libm::log(2.0)).abs() < 1e-15);
        assert_eq!(b[2], 0.0);
    }
}
