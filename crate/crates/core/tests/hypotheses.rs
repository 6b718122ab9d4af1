//! Breaking one hypothesis at a time must turn a passing scenario into a
//! not-applicable one. Lower Ahlfors regularity, log-Hölder continuity,
//! boundedness and doubling always hold on a finite space and are not broken here.

use hajlasz_core::exponent::{sobolev_conjugate, ExponentField, Tag};
use hajlasz_core::functions::coordinate;
use hajlasz_core::generators::{grid1d, grid2d};
use hajlasz_core::hajlasz::Scale;
use hajlasz_core::space::MetricMeasureSpace;
use hajlasz_core::verify::{
    check_global, check_moser_trudinger_local, check_morrey_local, check_sobolev_local, localemb_check, necessity_run,
    GlobalProblem, GlobalTheorem, LocalProblem, Mode, NecessityMode, NecessityProblem, Verdict, VerificationReport,
};

fn c(tag: Tag, n: usize, v: f64) -> ExponentField {
    ExponentField::constant(tag, n, v).unwrap()
}

struct Local {
    space: MetricMeasureSpace,
    u: Vec<f64>,
    s: ExponentField,
    p: ExponentField,
    q: ExponentField,
    sigma: f64,
    delta: f64,
}

impl Local {
    fn new(s: f64, p: f64, q: f64) -> Local {
        let space = grid2d(8, 8, 0.125).unwrap();
        let n = space.len();
        let u = coordinate(&space, 0).unwrap();
        Local { u, s: c(Tag::S, n, s), p: c(Tag::P, n, p), q: c(Tag::Dim, n, q), sigma: 2.0, delta: 1.0, space }
    }

    fn problem(&self) -> LocalProblem<'_> {
        LocalProblem {
            space: &self.space,
            center: 4 * 8 + 4,
            r0: 0.25,
            sigma: self.sigma,
            delta: Some(self.delta),
            u: &self.u,
            s: &self.s,
            p: &self.p,
            q_dim: &self.q,
            mode: Mode::M,
            tol: 1e-9,
        }
    }
}

fn broken(report: &VerificationReport, name: &str) -> bool {
    report.verdict == Verdict::NotApplicable
        && report.hypotheses.iter().any(|h| h.name == name && !h.holds)
        && report.hypotheses.iter().filter(|h| !h.holds).count() == 1
}

#[test]
fn local_sobolev_hypotheses() {
    let base = Local::new(1.0, 1.0, 2.0);
    assert_eq!(check_sobolev_local(&base.problem(), None).unwrap().verdict, Verdict::Pass);

    let mut sigma = Local::new(1.0, 1.0, 2.0);
    sigma.sigma = 1.0;
    assert!(broken(&check_sobolev_local(&sigma.problem(), None).unwrap(), "sigma > 1"));

    let mut delta = Local::new(1.0, 1.0, 2.0);
    delta.delta = 0.3;
    assert!(broken(&check_sobolev_local(&delta.problem(), None).unwrap(), "r0 <= delta/sigma"));

    let critical = Local::new(1.0, 2.0, 2.0);
    assert!(broken(&check_sobolev_local(&critical.problem(), None).unwrap(), "sp << Q"));
}

#[test]
fn local_embedding_hypotheses() {
    let base = Local::new(1.0, 1.0, 2.0);
    assert_eq!(localemb_check(&base.problem(), None).unwrap().verdict, Verdict::Pass);
    let critical = Local::new(1.0, 2.0, 2.0);
    assert!(broken(&localemb_check(&critical.problem(), None).unwrap(), "sp << Q"));
}

#[test]
fn moser_trudinger_hypotheses() {
    let base = Local::new(1.0, 2.0, 2.0);
    assert_eq!(check_moser_trudinger_local(&base.problem(), None, None).unwrap().verdict, Verdict::Pass);
    let off = Local::new(1.0, 1.9, 2.0);
    assert!(broken(&check_moser_trudinger_local(&off.problem(), None, None).unwrap(), "sp = Q"));
}

#[test]
fn morrey_hypotheses() {
    let base = Local::new(1.0, 3.0, 2.0);
    assert_eq!(check_morrey_local(&base.problem(), None).unwrap().verdict, Verdict::Pass);
    let sub = Local::new(1.0, 1.5, 2.0);
    assert!(broken(&check_morrey_local(&sub.problem(), None).unwrap(), "sp >> Q"));
}

#[test]
fn global_hypotheses() {
    let space = grid1d(12, 1.0 / 12.0).unwrap();
    let n = space.len();
    let u = coordinate(&space, 0).unwrap();
    let s = c(Tag::S, n, 1.0);
    let run = |p: f64, q: f64, beta: Option<f64>, th: GlobalTheorem| {
        let pf = c(Tag::P, n, p);
        let qf = c(Tag::Dim, n, q);
        let bf = beta.map(|b| c(Tag::Gamma, n, b));
        let pr = GlobalProblem { space: &space, u: &u, s: &s, p: &pf, q_dim: &qf, mode: Mode::M, delta: None, beta: bf.as_ref(), tol: 1e-9 };
        check_global(&pr, th, None).unwrap()
    };
    for th in [GlobalTheorem::Bounded, GlobalTheorem::DoublingSob] {
        assert_eq!(run(1.0, 2.0, None, th).verdict, Verdict::Pass, "{th:?}");
        assert!(broken(&run(2.0, 2.0, None, th), "sp << Q"), "{th:?}");
    }
    assert_eq!(run(1.0, 1.0, Some(3.0), GlobalTheorem::DoublingMt).verdict, Verdict::Pass);
    assert!(broken(&run(1.5, 1.0, Some(3.0), GlobalTheorem::DoublingMt), "sp = Q"));
    assert!(broken(&run(1.0, 1.0, Some(1.0), GlobalTheorem::DoublingMt), "beta >> p"));
    assert_eq!(run(2.0, 1.0, None, GlobalTheorem::DoublingHolder).verdict, Verdict::Pass);
    assert!(broken(&run(1.0, 1.0, None, GlobalTheorem::DoublingHolder), "sp >> Q"));
}

#[test]
fn necessity_hypotheses() {
    let space = grid2d(5, 5, 0.2).unwrap();
    let n = space.len();
    let qd = c(Tag::Dim, n, 2.0);
    let p = c(Tag::P, n, 1.5);
    let run = |s: f64, q: f64, gamma_shift: f64, mode: NecessityMode, eps: Option<f64>| {
        let sf = c(Tag::S, n, s);
        let qf = c(Tag::Q, n, q);
        let mut gamma = sobolev_conjugate(&qd, &sf, &p).unwrap();
        if gamma_shift != 0.0 {
            gamma = c(Tag::Gamma, n, 1.5 + gamma_shift);
        }
        let pr = NecessityProblem {
            space: &space,
            s: &sf,
            p: &p,
            q: &qf,
            gamma_or_alpha: Some(&gamma),
            q_expected: Some(&qd),
            mode,
            scale: Scale::LpLq,
            epsilon: eps,
        };
        necessity_run(&pr).unwrap()
    };
    let local = NecessityMode::SobolevLocal { sigma: 2.0, omega: 0.5 };
    assert_eq!(run(0.5, 2.0, 0.0, NecessityMode::SobolevGlobal, None).verdict, Verdict::Pass);
    assert_eq!(run(0.5, 2.0, 0.0, local, None).verdict, Verdict::Pass);
    assert!(broken(&run(1.0, 2.0, 0.0, NecessityMode::SobolevGlobal, None), "s^+ <=_{q^-} 1"));
    assert!(broken(&run(0.5, 2.0, 0.0, local, Some(0.0)), "uniformly perfect"));
    assert!(broken(&run(0.5, 2.0, -0.5, NecessityMode::SobolevGlobal, None), "gamma >> p"));
}
