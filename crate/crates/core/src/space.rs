//! Finite metric measure spaces: storage, balls, nets and covering diagnostics.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance of the triangle-inequality validation.
const TRIANGLE_TOL: f64 = 1e-12;
/// Above this many points the triangle inequality is sampled instead of enumerated.
const EXHAUSTIVE_LIMIT: usize = 200;
const SAMPLED_TRIPLES: usize = 100_000;
/// Distances closer than this (relatively) are merged into one critical value.
const MERGE_TOL: f64 = 1e-12;

/// A finite set of points with a validated metric and strictly positive point masses.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricMeasureSpace {
    n: usize,
    dist: Vec<f64>,
    weight: Vec<f64>,
    labels: Option<Vec<String>>,
    coords: Option<Vec<Vec<f64>>>,
}

/// An open (or, on request, closed) ball together with its members and measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    pub closed: bool,
    pub members: Vec<usize>,
    pub measure: f64,
}

impl Ball {
    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl MetricMeasureSpace {
    /// Build from a full distance matrix; validates the metric axioms.
    pub fn new(dist: Vec<Vec<f64>>, weight: Vec<f64>) -> Result<Self> {
        let n = weight.len();
        if dist.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: dist.len() });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &dist {
            if row.len() != n {
                return Err(Error::LengthMismatch { expected: n, found: row.len() });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(n, flat, weight)
    }

    /// Build from a row-major `n*n` distance matrix.
    pub fn from_flat(n: usize, dist: Vec<f64>, weight: Vec<f64>) -> Result<Self> {
        if weight.len() != n {
            return Err(Error::LengthMismatch { expected: n, found: weight.len() });
        }
        if dist.len() != n * n {
            return Err(Error::LengthMismatch { expected: n * n, found: dist.len() });
        }
        let space = MetricMeasureSpace { n, dist, weight, labels: None, coords: None };
        space.validate()?;
        Ok(space)
    }

    /// Points in Euclidean space with the induced distance.
    pub fn euclidean(coords: Vec<Vec<f64>>, weight: Vec<f64>) -> Result<Self> {
        let n = coords.len();
        if n > 0 {
            let dim = coords[0].len();
            if let Some(bad) = coords.iter().find(|c| c.len() != dim) {
                return Err(Error::LengthMismatch { expected: dim, found: bad.len() });
            }
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let s: f64 = coords[i].iter().zip(&coords[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                let d = libm::sqrt(s);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let mut space = Self::from_flat(n, dist, weight)?;
        space.coords = Some(coords);
        Ok(space)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, found: labels.len() });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Same metric, new point masses.
    pub fn with_weights(&self, weight: Vec<f64>) -> Result<Self> {
        if weight.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, found: weight.len() });
        }
        check_weights(&weight)?;
        let mut out = self.clone();
        out.weight = weight;
        Ok(out)
    }

    fn validate(&self) -> Result<()> {
        check_weights(&self.weight)?;
        let n = self.n;
        for i in 0..n {
            let dii = self.d(i, i);
            if dii != 0.0 {
                return Err(Error::BadDistance { i, j: i, value: dii, reason: "diagonal must be zero" });
            }
            for j in (i + 1)..n {
                let dij = self.d(i, j);
                if !dij.is_finite() || dij <= 0.0 {
                    return Err(Error::BadDistance {
                        i,
                        j,
                        value: dij,
                        reason: "off-diagonal distances must be finite and positive",
                    });
                }
                if dij != self.d(j, i) {
                    return Err(Error::BadDistance { i, j, value: dij, reason: "matrix is not symmetric" });
                }
            }
        }
        if n <= EXHAUSTIVE_LIMIT {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        self.check_triangle(i, j, k)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            for _ in 0..SAMPLED_TRIPLES {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                let k = rng.random_range(0..n);
                self.check_triangle(i, j, k)?;
            }
        }
        Ok(())
    }

    fn check_triangle(&self, i: usize, j: usize, k: usize) -> Result<()> {
        let via = self.d(i, j) + self.d(j, k);
        let excess = self.d(i, k) - via;
        if excess > TRIANGLE_TOL * via {
            return Err(Error::Triangle { i, j, k, excess });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// Distances from `i` to every point.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weight[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weight
    }

    pub fn total_mass(&self) -> f64 {
        self.weight.iter().sum()
    }

    /// Measure of a point set.
    pub fn measure(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.weight[i]).sum()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, len: self.n })
        }
    }

    /// Open ball `{ j : d(center, j) < r }`.
    pub fn ball(&self, center: usize, r: f64) -> Result<Ball> {
        self.ball_with(center, r, false)
    }

    /// Closed ball `{ j : d(center, j) <= r }`.
    pub fn closed_ball(&self, center: usize, r: f64) -> Result<Ball> {
        self.ball_with(center, r, true)
    }

    pub fn ball_with(&self, center: usize, r: f64, closed: bool) -> Result<Ball> {
        self.check_index(center)?;
        if !(r >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("ball radius {r} must be nonnegative")));
        }
        let row = self.row(center);
        let members: Vec<usize> =
            (0..self.n).filter(|&j| if closed { row[j] <= r } else { row[j] < r }).collect();
        let measure = self.measure(&members);
        Ok(Ball { center, radius: r, closed, members, measure })
    }

    /// Measure of the open ball, without collecting members.
    pub fn ball_measure(&self, center: usize, r: f64) -> f64 {
        let row = self.row(center);
        (0..self.n).filter(|&j| row[j] < r).map(|j| self.weight[j]).sum()
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Smallest positive distance, if there are at least two points.
    pub fn min_distance(&self) -> Option<f64> {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.min(self.d(i, j));
            }
        }
        if m.is_finite() {
            Some(m)
        } else {
            None
        }
    }

    /// Sorted distinct positive pairwise distances.
    pub fn distinct_distances(&self) -> Vec<f64> {
        let mut all = Vec::with_capacity(self.n * (self.n.saturating_sub(1)) / 2);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                all.push(self.d(i, j));
            }
        }
        merge_sorted(all)
    }

    /// Distinct pairwise distances and the midpoints between consecutive ones
    /// (with `0` prepended before taking midpoints, so `d_min / 2` is included).
    pub fn critical_radii(&self) -> Vec<f64> {
        with_midpoints(&self.distinct_distances())
    }

    /// The subspace on `points` (in the given order) with inherited metric and masses.
    pub fn subspace(&self, points: &[usize]) -> Result<MetricMeasureSpace> {
        for &i in points {
            self.check_index(i)?;
        }
        let m = points.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in points {
            for &j in points {
                dist.push(self.d(i, j));
            }
        }
        let weight = points.iter().map(|&i| self.weight[i]).collect();
        let labels = self.labels.as_ref().map(|l| points.iter().map(|&i| l[i].clone()).collect());
        let coords = self.coords.as_ref().map(|c| points.iter().map(|&i| c[i].clone()).collect());
        Ok(MetricMeasureSpace { n: m, dist, weight, labels, coords })
    }

    /// Greedy maximal `r/2`-separated subset, scanning points in index order.
    pub fn separated_net(&self, r: f64) -> Vec<usize> {
        let half = r / 2.0;
        let mut net: Vec<usize> = Vec::new();
        for i in 0..self.n {
            if net.iter().all(|&s| self.d(i, s) >= half) {
                net.push(i);
            }
        }
        net
    }

    /// Greedy upper estimate of the geometric doubling constant.
    ///
    /// For every center and every radius built from the pairwise distances and
    /// their doubles, `B(x,r)` is covered by `r/2`-balls centered in it, picking
    /// the farthest uncovered point each time and starting from the lowest index.
    pub fn estimate_doubling(&self) -> usize {
        if self.n <= 1 {
            return 1;
        }
        let d = self.distinct_distances();
        let mut values = d.clone();
        values.extend(d.iter().map(|x| 2.0 * x));
        let radii = with_midpoints(&merge_sorted(values));
        let mut best = 1;
        let mut min_gap = vec![0.0; self.n];
        let mut members = Vec::with_capacity(self.n);
        for x in 0..self.n {
            let row = self.row(x);
            for &r in &radii {
                members.clear();
                members.extend((0..self.n).filter(|&j| row[j] < r));
                let count = self.greedy_cover(&members, r / 2.0, &mut min_gap);
                best = best.max(count);
            }
        }
        best
    }

    fn greedy_cover(&self, members: &[usize], half: f64, gap: &mut [f64]) -> usize {
        if members.is_empty() {
            return 0;
        }
        for &m in members {
            gap[m] = f64::INFINITY;
        }
        let mut center = members[0];
        let mut count = 0;
        loop {
            count += 1;
            let row = self.row(center);
            let mut far = None;
            let mut far_d = -1.0;
            for &m in members {
                gap[m] = gap[m].min(row[m]);
                if gap[m] >= half && gap[m] > far_d {
                    far_d = gap[m];
                    far = Some(m);
                }
            }
            match far {
                Some(next) => center = next,
                None => return count,
            }
        }
    }

    /// Bounded-overlap check for the balls `B(s, R)`, `s` in `net`.
    pub fn overlap_bound_check(&self, r: f64, big_r: f64, net: &[usize]) -> Result<OverlapReport> {
        let m = self.estimate_doubling();
        self.overlap_bound_check_with(r, big_r, net, m)
    }

    /// As [`Self::overlap_bound_check`] with a precomputed doubling estimate `m`.
    pub fn overlap_bound_check_with(&self, r: f64, big_r: f64, net: &[usize], m: usize) -> Result<OverlapReport> {
        if !(r > 0.0 && big_r > r) {
            return Err(Error::InvalidArgument(alloc::format!("need R > r > 0, got r={r}, R={big_r}")));
        }
        for &s in net {
            self.check_index(s)?;
        }
        let multiplicity = (0..self.n)
            .map(|x| net.iter().filter(|&&s| self.d(x, s) < big_r).count())
            .max()
            .unwrap_or(0);
        let mf = m as f64;
        let bound = mf * mf * mf * libm::pow(big_r / r, libm::log2(mf));
        Ok(OverlapReport { multiplicity, doubling: m, bound, pass: multiplicity as f64 <= bound })
    }

    /// Whether `B(x,r) \ B(x, lambda r)` has a point.
    pub fn annulus_nonempty(&self, x: usize, r: f64, lambda: f64) -> bool {
        let inner = lambda * r;
        self.row(x).iter().any(|&d| d < r && d >= inner)
    }

    /// Largest `lambda` on the grid `{0.01, ..., 0.99}` such that every proper
    /// ball `B(x,r)` with critical `r >= epsilon` meets the annulus
    /// `B(x,r) \ B(x, lambda r)`.
    pub fn uniform_perfectness(&self, epsilon: f64) -> PerfectnessReport {
        let mut sup = 1.0_f64;
        let mut witness = None;
        for x in 0..self.n {
            let row = self.row(x);
            for &r in self.critical_radii().iter().filter(|&&r| r >= epsilon) {
                if row.iter().all(|&d| d < r) {
                    continue;
                }
                // The annulus is nonempty iff the farthest point inside reaches lambda*r.
                let inner = row.iter().copied().filter(|&d| d < r).fold(0.0, f64::max);
                let ratio = inner / r;
                if ratio < sup {
                    sup = ratio;
                    witness = Some(Witness { point: x, radius: r });
                }
            }
        }
        let lambda = (1..=99).rev().map(|k| k as f64 / 100.0).find(|&l| l <= sup);
        PerfectnessReport { epsilon, lambda, lambda_sup: sup, witness }
    }

    /// `sup { s in [0,r] : mu(B(x,s)) <= mu(B(x,r))/2 }`, exactly.
    pub fn phi(&self, x: usize, r: f64) -> Result<f64> {
        self.check_index(x)?;
        if !(r >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("radius {r} must be nonnegative")));
        }
        let half = self.ball_measure(x, r) / 2.0;
        let row = self.row(x);
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by(|&a, &b| row[a].total_cmp(&row[b]));
        // mu(B(x,s)) jumps just after each distance value; the sup is the first
        // distance at which the closed ball exceeds half the mass.
        let mut acc = 0.0;
        let mut idx = 0;
        while idx < order.len() {
            let dv = row[order[idx]];
            if dv >= r {
                break;
            }
            while idx < order.len() && row[order[idx]] == dv {
                acc += self.weight[order[idx]];
                idx += 1;
            }
            if acc > half {
                return Ok(dv);
            }
        }
        Ok(r)
    }

    /// `phi_x(r), phi_x(phi_x(r)), ...`, stopping after `max_steps` or at a fixed point.
    pub fn phi_iterates(&self, x: usize, r: f64, max_steps: usize) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        let mut cur = r;
        for _ in 0..max_steps {
            let next = self.phi(x, cur)?;
            out.push(next);
            if next == cur || next == 0.0 {
                break;
            }
            cur = next;
        }
        Ok(out)
    }
}

fn check_weights(weight: &[f64]) -> Result<()> {
    for (index, &value) in weight.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::NonPositiveWeight { index, value });
        }
    }
    Ok(())
}

/// Sort and merge values that agree to a relative `1e-12`.
pub(crate) fn merge_sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for v in values {
        match out.last() {
            Some(&last) if v - last <= MERGE_TOL * v.abs() => {}
            _ => out.push(v),
        }
    }
    out
}

fn with_midpoints(sorted: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * sorted.len());
    let mut prev = 0.0;
    for &v in sorted {
        if v > 0.0 {
            out.push(0.5 * (prev + v));
            out.push(v);
            prev = v;
        }
    }
    out
}

/// Result of [`MetricMeasureSpace::overlap_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapReport {
    pub multiplicity: usize,
    pub doubling: usize,
    /// `M^3 (R/r)^{log2 M}`.
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: usize,
    pub radius: f64,
}

/// Result of [`MetricMeasureSpace::uniform_perfectness`]; `epsilon` is the resolution used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectnessReport {
    pub epsilon: f64,
    pub lambda: Option<f64>,
    /// Exact supremum of admissible `lambda` over the scanned balls.
    pub lambda_sup: f64,
    pub witness: Option<Witness>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> MetricMeasureSpace {
        MetricMeasureSpace::euclidean((0..n).map(|i| vec![i as f64]).collect(), vec![1.0; n]).unwrap()
    }

    #[test]
    fn ball_on_line() {
        let s = line(3);
        let b = s.ball(0, 1.5).unwrap();
        assert_eq!(b.members, vec![0, 1]);
        assert_eq!(b.measure, 2.0);
        assert!(s.ball(1, 0.0).unwrap().is_empty());
        assert_eq!(s.ball(1, 0.0).unwrap().measure, 0.0);
        let all = s.ball(2, s.diameter() + 1.0).unwrap();
        assert_eq!(all.members.len(), 3);
        assert_eq!(all.measure, s.total_mass());
        assert_eq!(s.closed_ball(0, 1.0).unwrap().members, vec![0, 1]);
        assert!(s.ball(3, 1.0).is_err());
    }

    #[test]
    fn validation_names_the_triple() {
        let d = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        match MetricMeasureSpace::new(d, vec![1.0; 3]) {
            Err(Error::Triangle { i, j, k, .. }) => assert_eq!((i, j, k), (0, 1, 2)),
            other => panic!("unexpected {other:?}"),
        }
        let d = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!(matches!(MetricMeasureSpace::new(d, vec![1.0, 0.0]), Err(Error::NonPositiveWeight { index: 1, .. })));
        let d = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(matches!(MetricMeasureSpace::new(d, vec![1.0, 1.0]), Err(Error::BadDistance { .. })));
    }

    #[test]
    fn nets() {
        let s = line(4);
        assert_eq!(s.separated_net(1.0), vec![0, 1, 2, 3]);
        assert_eq!(s.separated_net(4.0), vec![0, 2]);
        let one = line(1);
        assert_eq!(one.separated_net(3.0), vec![0]);
    }

    #[test]
    fn doubling_small_cases() {
        assert_eq!(line(1).estimate_doubling(), 1);
        assert!(line(3).estimate_doubling() <= 3);
    }

    #[test]
    fn phi_examples() {
        let s = line(3);
        assert_eq!(s.phi(0, 2.5).unwrap(), 1.0);
        assert_eq!(s.phi(0, 0.0).unwrap(), 0.0);
        assert!(s.phi(0, 1.0).unwrap() <= s.phi(0, 2.0).unwrap());
    }

    #[test]
    fn perfectness_examples() {
        let s = line(10);
        assert!(s.annulus_nonempty(0, 5.0, 0.5));
        let two = line(2);
        assert_eq!(two.uniform_perfectness(0.1).lambda, None);
        assert_eq!(s.uniform_perfectness(1.5).lambda, Some(0.5));
    }

    #[test]
    fn critical_radii_include_half_min_gap() {
        let two = line(2);
        assert_eq!(two.critical_radii(), vec![0.5, 1.0]);
    }
}
