//! Test spaces: grids, a Euclidean ball with an atom, Cantor sets and a
//! segment glued to a square.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::MetricMeasureSpace;

/// Label of the atom point in [`ball_grid_with_atom`].
pub const ATOM_LABEL: &str = "atom";

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

fn nonzero(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidArgument(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

/// Cell centres `(i + 1/2) h`, `i < n`, each of mass `h`.
pub fn grid1d(n: usize, h: f64) -> Result<MetricMeasureSpace> {
    nonzero("n", n)?;
    positive("h", h)?;
    let coords = (0..n).map(|i| vec![(i as f64 + 0.5) * h]).collect();
    MetricMeasureSpace::euclidean(coords, vec![h; n])
}

/// Cell centres of an `nx` by `ny` grid of spacing `h`, each of mass `h^2`.
/// Point `(i, j)` has index `j * nx + i`.
pub fn grid2d(nx: usize, ny: usize, h: f64) -> Result<MetricMeasureSpace> {
    nonzero("nx", nx)?;
    nonzero("ny", ny)?;
    positive("h", h)?;
    let mut coords = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            coords.push(vec![(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]);
        }
    }
    MetricMeasureSpace::euclidean(coords, vec![h * h; nx * ny])
}

/// The unit ball of `R^dim` sampled at the centres of the cells of side
/// `1/m` that lie inside it (mass `m^{-dim}` each), plus a separate point at
/// the origin of mass `atom`. The atom has index 0 and label [`ATOM_LABEL`].
pub fn ball_grid_with_atom(dim: usize, m: usize, atom: f64) -> Result<MetricMeasureSpace> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!("dimension must be 1, 2 or 3, got {dim}")));
    }
    nonzero("m", m)?;
    positive("atom mass", atom)?;
    let h = 1.0 / m as f64;
    let side = 2 * m;
    let mut coords = vec![vec![0.0; dim]];
    let mut weights = vec![atom];
    let cells = side.pow(dim as u32);
    for c in 0..cells {
        let mut rest = c;
        let mut x = Vec::with_capacity(dim);
        for _ in 0..dim {
            x.push(-1.0 + ((rest % side) as f64 + 0.5) * h);
            rest /= side;
        }
        if x.iter().map(|v| v * v).sum::<f64>() < 1.0 {
            coords.push(x);
            weights.push(libm::pow(h, dim as f64));
        }
    }
    let n = coords.len();
    let mut labels = vec![String::new(); n];
    labels[0] = ATOM_LABEL.to_string();
    for (i, l) in labels.iter_mut().enumerate().skip(1) {
        *l = format!("c{i}");
    }
    MetricMeasureSpace::euclidean(coords, weights)?.with_labels(labels)
}

/// Centres of the `2^level` intervals of the Cantor construction that keeps
/// two subintervals of relative length `ratio`; each of mass `2^{-level}`.
///
/// Point `i` has binary digits `a_1..a_level` (most significant first) and
/// left end `sum_j a_j (1 - ratio) ratio^{j-1}`.
pub fn cantor(level: u32, ratio: f64) -> Result<MetricMeasureSpace> {
    if !(ratio > 0.0 && ratio < 0.5) {
        return Err(Error::InvalidArgument(format!("ratio must lie in (0, 1/2), got {ratio}")));
    }
    if level > 12 {
        return Err(Error::InvalidArgument(format!("level {level} is too large")));
    }
    let n = 1usize << level;
    let coords = (0..n)
        .map(|i| {
            let mut x = 0.0;
            let mut len = 1.0;
            for j in (0..level).rev() {
                if (i >> j) & 1 == 1 {
                    x += (1.0 - ratio) * len;
                }
                len *= ratio;
            }
            vec![x + 0.5 * len]
        })
        .collect();
    MetricMeasureSpace::euclidean(coords, vec![1.0 / n as f64; n])
}

/// An `m` by `m` grid on `[0,1]^2` (mass `h^2`) with a segment of `k` points
/// of spacing `h = 1/m` and mass `h` continuing to the right of the bottom
/// row. Returns the space and the indices of the segment.
pub fn two_zone_glued(m: usize, k: usize) -> Result<(MetricMeasureSpace, Vec<usize>)> {
    nonzero("m", m)?;
    let h = 1.0 / m as f64;
    let mut coords = Vec::with_capacity(m * m + k);
    let mut weights = Vec::with_capacity(m * m + k);
    for j in 0..m {
        for i in 0..m {
            coords.push(vec![(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]);
            weights.push(h * h);
        }
    }
    let segment: Vec<usize> = (m * m..m * m + k).collect();
    for i in 0..k {
        coords.push(vec![1.0 + (i as f64 + 0.5) * h, 0.5 * h]);
        weights.push(h);
    }
    Ok((MetricMeasureSpace::euclidean(coords, weights)?, segment))
}

/// Serializable description of a generated space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Grid1d { n: usize, h: f64 },
    Grid2d { nx: usize, ny: usize, h: f64 },
    BallGridWithAtom { dim: usize, m: usize, #[serde(default = "unit")] atom: f64 },
    Cantor { level: u32, #[serde(default = "third")] ratio: f64 },
    TwoZoneGlued { m: usize, k: usize },
}

fn unit() -> f64 {
    1.0
}

fn third() -> f64 {
    1.0 / 3.0
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<MetricMeasureSpace> {
        match *self {
            GeneratorSpec::Grid1d { n, h } => grid1d(n, h),
            GeneratorSpec::Grid2d { nx, ny, h } => grid2d(nx, ny, h),
            GeneratorSpec::BallGridWithAtom { dim, m, atom } => ball_grid_with_atom(dim, m, atom),
            GeneratorSpec::Cantor { level, ratio } => cantor(level, ratio),
            GeneratorSpec::TwoZoneGlued { m, k } => two_zone_glued(m, k).map(|(s, _)| s),
        }
    }
}
