//! Log-barrier Newton method for
//! `min sum_b w_b (sum_{v in b} x_v^{q_b})^{p_b/q_b}` subject to two-variable
//! covers `a x_i + b x_j >= c` and `x >= 0`.

use alloc::vec;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// `a x_i + b x_j >= c` with `a, b, c > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Cover {
    pub i: usize,
    pub j: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// `(sum_{v in vars} x_v^q)^{p/q}`; a single variable gives `x^p`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Block {
    pub vars: Vec<usize>,
    pub p: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Program {
    pub nvar: usize,
    pub covers: Vec<Cover>,
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    /// Minimizer, zero on variables that no cover touches.
    pub x: Vec<f64>,
    pub value: f64,
    /// Barrier duality-gap bound at exit; a true gap only for convex objectives.
    pub gap: f64,
}

/// Target relative gap.
pub(crate) const REL_GAP: f64 = 1e-11;
const MU: f64 = 8.0;

/// Internal form over the variables that some cover touches.
struct Compact {
    n: usize,
    covers: Vec<Cover>,
    blocks: Vec<(usize, Vec<usize>, f64, f64)>,
    map: Vec<Option<usize>>,
}

impl Compact {
    fn new(prog: &Program) -> Compact {
        let mut map = vec![None; prog.nvar];
        let mut n = 0;
        for c in &prog.covers {
            for v in [c.i, c.j] {
                if map[v].is_none() {
                    map[v] = Some(n);
                    n += 1;
                }
            }
        }
        let covers = prog
            .covers
            .iter()
            .map(|c| Cover { i: map[c.i].unwrap(), j: map[c.j].unwrap(), ..*c })
            .collect();
        let blocks = prog
            .blocks
            .iter()
            .enumerate()
            .filter_map(|(b, blk)| {
                let vars: Vec<usize> = blk.vars.iter().filter_map(|&v| map[v]).collect();
                if vars.is_empty() {
                    None
                } else {
                    Some((b, vars, blk.p, blk.q))
                }
            })
            .collect();
        Compact { n, covers, blocks, map }
    }

    fn objective(&self, w: &[f64], x: &[f64]) -> f64 {
        let mut f = 0.0;
        for (b, vars, p, q) in &self.blocks {
            f += w[*b] * block_value(vars, *p, *q, x);
        }
        f
    }

    /// `tau f - sum ln s - sum ln x`, or `inf` outside the domain.
    fn merit(&self, w: &[f64], tau: f64, x: &[f64]) -> f64 {
        let mut bar = 0.0;
        for &v in x {
            if !(v > 0.0) {
                return f64::INFINITY;
            }
            bar -= libm::log(v);
        }
        for c in &self.covers {
            let s = c.a * x[c.i] + c.b * x[c.j] - c.c;
            if !(s > 0.0) {
                return f64::INFINITY;
            }
            bar -= libm::log(s);
        }
        tau * self.objective(w, x) + bar
    }

    fn start(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for c in &self.covers {
            let v = 1.5 * c.c / (c.a + c.b);
            x[c.i] = f64::max(x[c.i], v);
            x[c.j] = f64::max(x[c.j], v);
        }
        x
    }

    fn feasible(&self, x: &[f64]) -> bool {
        x.iter().all(|&v| v > 0.0) && self.covers.iter().all(|c| c.a * x[c.i] + c.b * x[c.j] > c.c)
    }
}

fn block_value(vars: &[usize], p: f64, q: f64, x: &[f64]) -> f64 {
    if vars.len() == 1 {
        return libm::pow(x[vars[0]], p);
    }
    let s: f64 = vars.iter().map(|&v| libm::pow(x[v], q)).sum();
    libm::pow(s, p / q)
}

/// Adds `w * grad` and `w * hess` of one block into `g`, `h`.
fn block_derivatives(vars: &[usize], p: f64, q: f64, w: f64, x: &[f64], g: &mut DVector<f64>, h: &mut DMatrix<f64>) {
    if vars.len() == 1 {
        let v = vars[0];
        let xv = x[v];
        g[v] += w * p * libm::pow(xv, p - 1.0);
        // Concave pieces (p < 1) are dropped from the Hessian.
        h[(v, v)] += f64::max(0.0, w * p * (p - 1.0) * libm::pow(xv, p - 2.0));
        return;
    }
    let s: f64 = vars.iter().map(|&v| libm::pow(x[v], q)).sum();
    let big_n_pq = libm::pow(s, (p - q) / q); // N^{p-q}
    let big_n_p2q = libm::pow(s, (p - 2.0 * q) / q); // N^{p-2q}
    let xq1: Vec<f64> = vars.iter().map(|&v| libm::pow(x[v], q - 1.0)).collect();
    for (a, &va) in vars.iter().enumerate() {
        g[va] += w * p * big_n_pq * xq1[a];
        for (b, &vb) in vars.iter().enumerate() {
            let mut hv = w * p * (p - q) * big_n_p2q * xq1[a] * xq1[b];
            if a == b {
                hv += w * p * (q - 1.0) * big_n_pq * libm::pow(x[va], q - 2.0);
            }
            h[(va, vb)] += hv;
        }
    }
}

/// Minimize with block weights `w`; `warm` (full-length) is used when strictly feasible.
pub(crate) fn solve(prog: &Program, w: &[f64], warm: Option<&[f64]>, rel_gap: f64) -> Outcome {
    let cp = Compact::new(prog);
    let mut full = vec![0.0; prog.nvar];
    if cp.n == 0 {
        return Outcome { x: full, value: 0.0, gap: 0.0 };
    }
    let mut x = cp.start();
    if let Some(wx) = warm {
        let cand: Vec<f64> = (0..prog.nvar).filter_map(|v| cp.map[v].map(|c| (c, wx[v]))).fold(vec![0.0; cp.n], |mut acc, (c, val)| {
            acc[c] = val;
            acc
        });
        if cp.feasible(&cand) {
            x = cand;
        }
    }
    let m = (cp.covers.len() + cp.n) as f64;
    let f0 = cp.objective(w, &x).max(1e-300);
    let mut tau = m / f0;
    let n = cp.n;
    let mut grad = DVector::<f64>::zeros(n);
    let mut hess = DMatrix::<f64>::zeros(n, n);
    for _outer in 0..80 {
        for _inner in 0..200 {
            grad.fill(0.0);
            hess.fill(0.0);
            for (b, vars, p, q) in &cp.blocks {
                block_derivatives(vars, *p, *q, w[*b], &x, &mut grad, &mut hess);
            }
            grad *= tau;
            hess *= tau;
            for v in 0..n {
                grad[v] -= 1.0 / x[v];
                hess[(v, v)] += 1.0 / (x[v] * x[v]);
            }
            for c in &cp.covers {
                let s = c.a * x[c.i] + c.b * x[c.j] - c.c;
                let is = 1.0 / s;
                let is2 = is * is;
                grad[c.i] -= c.a * is;
                grad[c.j] -= c.b * is;
                hess[(c.i, c.i)] += c.a * c.a * is2;
                hess[(c.j, c.j)] += c.b * c.b * is2;
                hess[(c.i, c.j)] += c.a * c.b * is2;
                hess[(c.j, c.i)] += c.a * c.b * is2;
            }
            let Some(step) = newton_step(&hess, &grad) else { break };
            let dec = -grad.dot(&step);
            if !(dec > 1e-10) {
                break;
            }
            // Largest step keeping every slack positive.
            let mut amax = f64::INFINITY;
            for v in 0..n {
                if step[v] < 0.0 {
                    amax = amax.min(-x[v] / step[v]);
                }
            }
            for c in &cp.covers {
                let ds = c.a * step[c.i] + c.b * step[c.j];
                if ds < 0.0 {
                    amax = amax.min(-(c.a * x[c.i] + c.b * x[c.j] - c.c) / ds);
                }
            }
            let mut alpha = f64::min(1.0, 0.99 * amax);
            let phi0 = cp.merit(w, tau, &x);
            let mut trial = x.clone();
            let mut accepted = None;
            for _ in 0..60 {
                for v in 0..n {
                    trial[v] = x[v] + alpha * step[v];
                }
                let phi = cp.merit(w, tau, &trial);
                if phi <= phi0 - 0.25 * alpha * dec {
                    accepted = Some(phi);
                    break;
                }
                alpha *= 0.5;
            }
            let Some(phi) = accepted else { break };
            core::mem::swap(&mut x, &mut trial);
            // Progress below rounding of the merit: centred as well as it gets.
            if phi0 - phi <= 8.0 * f64::EPSILON * libm::fabs(phi0) {
                break;
            }
        }
        let f = cp.objective(w, &x);
        if m / tau <= rel_gap * f || f == 0.0 {
            break;
        }
        tau *= MU;
    }
    let value = cp.objective(w, &x);
    for v in 0..prog.nvar {
        if let Some(c) = cp.map[v] {
            full[v] = x[c];
        }
    }
    Outcome { x: full, value, gap: m / tau }
}

fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>) -> Option<DVector<f64>> {
    let scale = (0..hess.nrows()).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 0.0;
    for _ in 0..12 {
        let mut h = hess.clone();
        if shift > 0.0 {
            for i in 0..h.nrows() {
                h[(i, i)] += shift;
            }
        }
        if let Some(ch) = h.cholesky() {
            let step = ch.solve(&(-grad));
            if step.iter().all(|v| v.is_finite()) {
                return Some(step);
            }
        }
        shift = if shift == 0.0 { 1e-12 * scale } else { shift * 100.0 };
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_cover_linear() {
        // min g1 + g2 s.t. g1 + g2 >= 1
        let prog = Program {
            nvar: 2,
            covers: vec![Cover { i: 0, j: 1, a: 1.0, b: 1.0, c: 1.0 }],
            blocks: vec![Block { vars: vec![0], p: 1.0, q: 1.0 }, Block { vars: vec![1], p: 1.0, q: 1.0 }],
        };
        let out = solve(&prog, &[1.0, 1.0], None, REL_GAP);
        assert!((out.value - 1.0).abs() < 1e-9, "{out:?}");
    }

    #[test]
    fn one_cover_quadratic() {
        // min x^2 + 2 y^2 s.t. x + y >= 3 -> x = 2, y = 1, value 6
        let prog = Program {
            nvar: 3,
            covers: vec![Cover { i: 0, j: 1, a: 1.0, b: 1.0, c: 3.0 }],
            blocks: vec![
                Block { vars: vec![0], p: 2.0, q: 2.0 },
                Block { vars: vec![1], p: 2.0, q: 2.0 },
                Block { vars: vec![2], p: 2.0, q: 2.0 },
            ],
        };
        let out = solve(&prog, &[1.0, 2.0, 5.0], None, REL_GAP);
        assert!((out.value - 6.0).abs() < 1e-8, "{out:?}");
        assert!((out.x[0] - 2.0).abs() < 1e-4 && out.x[2] == 0.0);
    }

    #[test]
    fn euclidean_block() {
        // min ||(x, y)||_2 s.t. x + y >= 2 -> sqrt(2)
        let prog = Program {
            nvar: 2,
            covers: vec![Cover { i: 0, j: 1, a: 1.0, b: 1.0, c: 2.0 }],
            blocks: vec![Block { vars: vec![0, 1], p: 1.0, q: 2.0 }],
        };
        let out = solve(&prog, &[1.0], None, REL_GAP);
        assert!((out.value - libm::sqrt(2.0)).abs() < 1e-8, "{out:?}");
    }
}
