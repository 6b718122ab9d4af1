//! The converse direction: an embedding forces lower Ahlfors regularity.

use alloc::format;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::constants::{necessity_constants, NecessityInputs};
use super::report::{Provenance, VerificationReport};
use super::EQUALITY_TOL;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::exponent::{log_holder_constant, log_holder_constant_recip, strictly_dominates, ExponentField, Tag};
use crate::functions::annular_cutoff;
use crate::hajlasz::{lipschitz_cutoff_gradient, Scale};
use crate::norms::luxemburg;
use crate::regularity::best_lower_constant;
use crate::space::MetricMeasureSpace;

/// A point is an atom when its mass exceeds this multiple of the median mass.
pub const ATOM_FACTOR: f64 = 10.0;
/// Centres and radii scanned by the test-function family.
const MAX_CENTERS: usize = 16;
const MAX_RADII: usize = 6;
/// Indices `j` of the cut-offs `u_j` per ball.
const CUTOFF_STEPS: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NecessityMode {
    /// `A -> L^gamma` on `X`; `Q = gamma s p / (gamma - p)`.
    SobolevGlobal,
    /// Local Sobolev–Poincaré inequalities; same `Q`.
    SobolevLocal { sigma: f64, omega: f64 },
    /// Local Moser–Trudinger inequalities; `Q = s p`.
    Moser { sigma: f64, omega: f64 },
    /// `A -> C^{0,alpha}`; `Q = p (s - alpha)`.
    Holder,
}

impl NecessityMode {
    pub fn name(&self) -> &'static str {
        match self {
            NecessityMode::SobolevGlobal => "necessity_sobolev_global",
            NecessityMode::SobolevLocal { .. } => "necessity_sobolev_local",
            NecessityMode::Moser { .. } => "necessity_moser",
            NecessityMode::Holder => "necessity_holder",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NecessityProblem<'a> {
    pub space: &'a MetricMeasureSpace,
    pub s: &'a ExponentField,
    pub p: &'a ExponentField,
    pub q: &'a ExponentField,
    /// `gamma` for the Sobolev modes, `alpha` for the Hölder mode.
    pub gamma_or_alpha: Option<&'a ExponentField>,
    /// A dimension to compare the derived `Q` against.
    pub q_expected: Option<&'a ExponentField>,
    pub mode: NecessityMode,
    /// `LpLq` for the Triebel–Lizorkin scale, `LqLp` for Besov.
    pub scale: Scale,
    /// Resolution of the uniform perfectness check; twice the smallest
    /// distance when absent.
    pub epsilon: Option<f64>,
}

fn strict_positive(name: &str, b: f64) -> Check {
    Check { name: name.into(), lhs: 0.0, rhs: b, margin: b, pass: b > 0.0 }
}

/// Test-function family: annular cut-offs `u_j` around up to [`MAX_CENTERS`]
/// centres, radii `2^{-k}` down to the smallest distance, and
/// `r_j = (2^{-j-1} + 1/2) r`. Returns `(max ||u_j||_gamma / ||g_j||, C_lip, count)`.
fn embedding_family(pr: &NecessityProblem, gamma: &ExponentField) -> Result<(f64, f64, usize)> {
    let space = pr.space;
    let n = space.len();
    let d_min = space.min_distance().unwrap_or(1.0);
    let stride = n.div_ceil(MAX_CENTERS).max(1);
    let mut best: f64 = 0.0;
    let mut c_lip: f64 = 0.0;
    let mut count = 0;
    for x in (0..n).step_by(stride) {
        let mut r = 0.5;
        let mut radii = 0;
        while radii < MAX_RADII && r >= d_min {
            radii += 1;
            for j in 1..=CUTOFF_STEPS {
                let outer = (libm::exp2(-(j as f64) - 1.0) + 0.5) * r;
                let inner = (libm::exp2(-(j as f64) - 2.0) + 0.5) * r;
                let u = annular_cutoff(space, x, inner, outer)?;
                if u.iter().all(|&v| v == 1.0) {
                    continue;
                }
                let ball: Vec<usize> = (0..n).filter(|&i| space.d(x, i) < outer).collect();
                let (_, rep) = lipschitz_cutoff_gradient(space, &ball, 1.0 / (outer - inner), pr.s, pr.p, pr.q, &u)?;
                let (norm, c) = match pr.scale {
                    Scale::LpLq => (rep.tl_norm, rep.a1),
                    Scale::LqLp => (rep.besov_norm, rep.a2),
                };
                c_lip = c_lip.max(c);
                if norm > 0.0 {
                    best = best.max(luxemburg(space, &u, gamma, 1e-10).value / norm);
                    count += 1;
                }
            }
            r *= 0.5;
        }
    }
    Ok((best, c_lip, count))
}

/// Derives `Q` from the mode, measures `b_emp` with [`best_lower_constant`]
/// on radii up to 1 and, for the global Sobolev mode, compares it with the
/// constant of the proof evaluated at the empirical embedding constant.
pub fn necessity_run(pr: &NecessityProblem) -> Result<VerificationReport> {
    let space = pr.space;
    let n = space.len();
    if n == 0 {
        return Err(Error::EmptySet);
    }
    pr.s.check_len(n)?;
    pr.p.check_len(n)?;
    pr.q.check_len(n)?;
    let mut report = VerificationReport::new(pr.mode.name());
    report.scenario = format!("n={} scale={:?}", n, pr.scale);
    let (s_minus, s_plus, q_minus) = (pr.s.min(), pr.s.max(), pr.q.min());
    let smooth_ok = s_plus < 1.0 || (s_plus == 1.0 && q_minus.is_infinite());
    report.hypothesis("s^+ <=_{q^-} 1", smooth_ok, format!("s^+ = {s_plus}, q^- = {q_minus}"));
    let cs = log_holder_constant(pr.s, space);
    let cp = log_holder_constant_recip(pr.p, space, None);
    report.hypothesis("log-Hölder s, p", cs.is_finite() && cp.is_finite(), format!("C_log(s) = {cs}, C_log(1/p) = {cp}"));
    if !matches!(pr.mode, NecessityMode::SobolevGlobal) {
        let eps = pr.epsilon.unwrap_or(2.0 * space.min_distance().unwrap_or(0.0));
        let perf = space.uniform_perfectness(eps);
        report.detail("perfectness_lambda", perf.lambda.unwrap_or(0.0));
        report.hypothesis(
            "uniformly perfect",
            perf.lambda.is_some(),
            format!("resolution {eps}, sup lambda = {}", perf.lambda_sup),
        );
    }
    if let NecessityMode::SobolevLocal { sigma, omega } | NecessityMode::Moser { sigma, omega } = pr.mode {
        report.detail("sigma", sigma);
        report.detail("omega", omega);
    }

    let field = |name: &str| {
        pr.gamma_or_alpha
            .ok_or_else(|| Error::InvalidArgument(format!("this mode needs {name}")))
            .and_then(|f| f.check_len(n).map(|_| f))
    };
    let q_values: Vec<f64> = match pr.mode {
        NecessityMode::SobolevGlobal | NecessityMode::SobolevLocal { .. } => {
            let gamma = field("gamma")?;
            let dom = strictly_dominates(gamma, pr.p)?;
            report.hypothesis("gamma >> p", dom, format!("min(gamma - p) = {}", min_diff(gamma, pr.p)));
            if !dom {
                return Ok(report.finish());
            }
            (0..n).map(|i| gamma.get(i) * pr.s.get(i) * pr.p.get(i) / (gamma.get(i) - pr.p.get(i))).collect()
        }
        NecessityMode::Moser { .. } => (0..n).map(|i| pr.s.get(i) * pr.p.get(i)).collect(),
        NecessityMode::Holder => {
            let alpha = field("alpha")?;
            let mut worst = Check::le("s >= alpha", alpha.get(0), pr.s.get(0));
            for i in 1..n {
                worst = worst.worst(Check::le("s >= alpha", alpha.get(i), pr.s.get(i)));
            }
            report.check(worst);
            // points with s = alpha must carry an atom
            let mut w: Vec<f64> = space.weights().to_vec();
            w.sort_by(f64::total_cmp);
            let median = w[n / 2];
            let ties: Vec<usize> = (0..n).filter(|&i| libm::fabs(pr.s.get(i) - alpha.get(i)) <= EQUALITY_TOL).collect();
            let missing = ties.iter().filter(|&&i| !(space.weight(i) > ATOM_FACTOR * median)).count();
            report.detail("points_with_s_eq_alpha", ties.len() as f64);
            report.detail("missing_atoms", missing as f64);
            report.check(Check::le("atom where s = alpha", missing as f64, 0.0));
            (0..n).map(|i| pr.p.get(i) * (pr.s.get(i) - alpha.get(i))).collect()
        }
    };
    // Q may vanish where s = alpha; the ball mass itself is then the bound.
    let q_dim = ExponentField::new(Tag::Dim, q_values.iter().map(|&v| v.max(f64::MIN_POSITIVE)).collect())?;
    report.detail("Q_minus", q_dim.min());
    report.detail("Q_plus", q_dim.max());
    if let Some(expected) = pr.q_expected {
        expected.check_len(n)?;
        let err = (0..n).map(|i| libm::fabs(q_values[i] - expected.get(i))).fold(0.0, f64::max);
        report.detail("Q_identity_error", err);
        report.check(Check::close("Q identity", err, 0.0, 1e-12));
    }
    let b_emp = best_lower_constant(space, &q_dim, None, Some(1.0))?.b_lower;
    report.detail("b_emp", b_emp);
    report.check(strict_positive("b_emp > 0", b_emp));

    if pr.mode == NecessityMode::SobolevGlobal && smooth_ok {
        let gamma = field("gamma")?;
        let (c_emp, c_lip, count) = embedding_family(pr, gamma)?;
        report.detail("C_emp", c_emp);
        report.detail("C_lip", c_lip);
        report.detail("test_functions", count as f64);
        let k = necessity_constants(&NecessityInputs {
            c_product: c_emp * c_lip,
            s_minus,
            s_plus,
            gamma_minus: gamma.min(),
            gamma_plus: gamma.max(),
            q_minus: q_dim.min(),
            q_plus: q_dim.max(),
            c_log_s: cs,
            c_log_gamma: log_holder_constant(gamma, space),
            c_log_recip_gamma: log_holder_constant_recip(gamma, space, None),
            c_log_q: log_holder_constant(&q_dim, space),
        });
        report.detail("r_prime", k.r_prime);
        report.detail("eta", k.eta);
        report.detail("c1", k.c1);
        report.detail("c2", k.c2);
        report.detail("b_formula", k.b_all);
        report.constant(k.b_all, Provenance::Formula);
        report.check(Check::le("b_formula <= b_emp", k.b_all, b_emp));
    } else {
        report.constant(b_emp, Provenance::Empirical);
    }
    Ok(report.finish())
}

fn min_diff(a: &ExponentField, b: &ExponentField) -> f64 {
    (0..a.len()).map(|i| a.get(i) - b.get(i)).fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::sobolev_conjugate;
    use crate::generators::grid2d;
    use crate::verify::Verdict;
    use alloc::vec;

    fn field(tag: Tag, n: usize, v: f64) -> ExponentField {
        ExponentField::constant(tag, n, v).unwrap()
    }

    #[test]
    fn sobolev_global_identity() {
        let sp = grid2d(6, 6, 1.0 / 6.0).unwrap();
        let n = sp.len();
        let (s, p) = (field(Tag::S, n, 0.5), field(Tag::P, n, 1.5));
        let q = field(Tag::Q, n, 2.0);
        let qd = field(Tag::Dim, n, 2.0);
        let gamma = sobolev_conjugate(&qd, &s, &p).unwrap();
        let pr = NecessityProblem {
            space: &sp,
            s: &s,
            p: &p,
            q: &q,
            gamma_or_alpha: Some(&gamma),
            q_expected: Some(&qd),
            mode: NecessityMode::SobolevGlobal,
            scale: Scale::LpLq,
            epsilon: None,
        };
        let r = necessity_run(&pr).unwrap();
        assert!(r.pass, "{r:#?}");
        assert!(r.details["Q_identity_error"] <= 1e-12);
        assert!(r.details["test_functions"] > 0.0);
        assert!(r.details["b_formula"] <= r.details["b_emp"]);
    }

    #[test]
    fn holder_tie_without_atom_fails() {
        let sp = grid2d(4, 4, 0.25).unwrap();
        let n = sp.len();
        let (s, p, q) = (field(Tag::S, n, 1.0), field(Tag::P, n, 2.0), field(Tag::Q, n, f64::INFINITY));
        let mut a = vec![0.5; n];
        a[5] = 1.0;
        let alpha = ExponentField::new(Tag::Alpha, a).unwrap();
        let mut pr = NecessityProblem {
            space: &sp,
            s: &s,
            p: &p,
            q: &q,
            gamma_or_alpha: Some(&alpha),
            q_expected: None,
            mode: NecessityMode::Holder,
            scale: Scale::LpLq,
            epsilon: None,
        };
        let r = necessity_run(&pr).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(!r.checks.iter().find(|c| c.name == "atom where s = alpha").unwrap().pass);
        let mut w = vec![1.0 / 16.0; n];
        w[5] = 1.0;
        let heavy = sp.with_weights(w).unwrap();
        pr.space = &heavy;
        assert!(necessity_run(&pr).unwrap().pass);
    }

    #[test]
    fn single_atom() {
        let sp = MetricMeasureSpace::euclidean(vec![vec![0.0]], vec![0.3]).unwrap();
        let (s, p, q) = (field(Tag::S, 1, 0.5), field(Tag::P, 1, 2.0), field(Tag::Q, 1, 2.0));
        let pr = NecessityProblem {
            space: &sp,
            s: &s,
            p: &p,
            q: &q,
            gamma_or_alpha: None,
            q_expected: None,
            mode: NecessityMode::Moser { sigma: 2.0, omega: 1.0 },
            scale: Scale::LqLp,
            epsilon: None,
        };
        let r = necessity_run(&pr).unwrap();
        assert!(r.details["b_emp"] >= 0.3);
        assert!(r.pass);
    }
}
