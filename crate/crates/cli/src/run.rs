//! Dispatch of scenarios to the core harnesses.

use anyhow::{anyhow, Context, Result};
use hajlasz_core::check::Check;
use hajlasz_core::hajlasz::{minimal_scalar_gradient, minimal_vector_gradient, Scale};
use hajlasz_core::norms::{luxemburg, modular, rel_sandwich_check, unit_ball_check};
use hajlasz_core::space::MetricMeasureSpace;
use hajlasz_core::verify::{
    check_global, check_moser_trudinger_local, check_morrey_local, check_sobolev_local, counterexample_run,
    localemb_check, necessity_run, GlobalProblem, GlobalTheorem, LocalProblem, Mode, NecessityProblem, Verdict,
    VerificationReport, DEFAULT_SIGMA,
};
use rayon::prelude::*;
use serde_json::Value;

use crate::scenario::{GradientNorm, GradientTask, Loaded, NormTask, VerifyTask};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Norm,
    Gradient,
    Verify,
    Necessity,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Gradient => "gradient",
            Command::Verify => "verify",
            Command::Necessity => "necessity",
        }
    }
}

/// Defaults for values a scenario leaves unset. Values in the scenario win.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Settings {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub sigma: Option<f64>,
    pub epsilon: Option<f64>,
}

/// One emitted report, plus the minimizer for gradient runs.
#[derive(Debug, Clone)]
pub struct Item {
    pub report: VerificationReport,
    pub solution: Option<Value>,
}

impl Item {
    pub fn to_value(&self) -> Result<Value> {
        let mut v = serde_json::to_value(&self.report)?;
        if let (Some(sol), Value::Object(m)) = (&self.solution, &mut v) {
            m.insert("solution".into(), sol.clone());
        }
        Ok(v)
    }

    /// Failed checks count against the exit status; not-applicable reports do not.
    pub fn ok(&self) -> bool {
        self.report.verdict != Verdict::Fail
    }
}

struct Ctx<'a> {
    l: &'a Loaded,
    settings: Settings,
    tol: f64,
}

impl Ctx<'_> {
    fn space(&self) -> Result<MetricMeasureSpace> {
        self.l.space()
    }

    fn function(&self, space: &MetricMeasureSpace, report_seed: &mut Option<u64>) -> Result<Vec<f64>> {
        let seed = self.l.scenario.seed.or(self.settings.seed).unwrap_or(DEFAULT_SEED);
        let (u, used) = self.l.function(space, seed)?;
        *report_seed = used;
        Ok(u)
    }
}

pub fn run_one(cmd: Command, l: &Loaded, settings: Settings) -> Result<Item> {
    let tol = l.scenario.tol.or(settings.tol).unwrap_or(DEFAULT_TOL);
    if !(tol > 0.0 && tol < 1.0) {
        return Err(anyhow!("tolerance must lie in (0, 1), got {tol}"));
    }
    let ctx = Ctx { l, settings, tol };
    let mut seed = None;
    let mut item = match cmd {
        Command::Norm => norm(&ctx, &l.scenario.norm.clone().unwrap_or_default(), &mut seed)?,
        Command::Gradient => gradient(&ctx, &l.scenario.gradient.clone().unwrap_or_default(), &mut seed)?,
        Command::Verify => verify(&ctx, &mut seed)?,
        Command::Necessity => necessity(&ctx)?,
    };
    let r = &mut item.report;
    r.scenario = l.name.clone();
    r.detail("setting_tol", tol);
    if let Some(s) = seed {
        r.detail("setting_seed", s as f64);
    }
    Ok(item)
}

fn norm(ctx: &Ctx, task: &NormTask, seed: &mut Option<u64>) -> Result<Item> {
    let space = ctx.space()?;
    let u = ctx.function(&space, seed)?;
    let key = task.exponent.as_deref().unwrap_or("p");
    let p = ctx.l.exponent(key, &space)?;
    let value = luxemburg(&space, &u, &p, ctx.tol);
    let mut r = VerificationReport::new("luxemburg_norm");
    for c in rel_sandwich_check(&space, &u, &p, ctx.tol).checks.into_iter().chain(unit_ball_check(&space, &u, &p, ctx.tol).checks) {
        r.check(c);
    }
    r.detail("value", value.value);
    r.detail("tolerance", value.tolerance);
    r.detail("modular", modular(&space, &u, &p));
    Ok(Item { report: r.finish(), solution: None })
}

fn gradient(ctx: &Ctx, task: &GradientTask, seed: &mut Option<u64>) -> Result<Item> {
    let space = ctx.space()?;
    let u = ctx.function(&space, seed)?;
    let s = ctx.l.exponent("s", &space)?;
    let p = ctx.l.exponent("p", &space)?;
    let (name, sol) = match task.norm {
        GradientNorm::M => ("minimal_gradient_m", minimal_scalar_gradient(&space, &u, &s, &p, ctx.tol)?),
        GradientNorm::TriebelLizorkin | GradientNorm::Besov => {
            let q = ctx.l.exponent("q", &space)?;
            let (name, scale) = match task.norm {
                GradientNorm::Besov => ("minimal_gradient_besov", Scale::LqLp),
                _ => ("minimal_gradient_triebel_lizorkin", Scale::LpLq),
            };
            (name, minimal_vector_gradient(&space, &u, &s, &p, &q, scale, ctx.tol)?)
        }
    };
    let mut r = VerificationReport::new(name);
    r.check(Check::le("feasibility certificate", sol.certificate, 1e-9 * sol.scale));
    r.detail("objective", sol.objective.value);
    r.detail("objective_tolerance", sol.objective.tolerance);
    r.detail("certificate", sol.certificate);
    r.detail("scale", sol.scale);
    if let Some(lb) = sol.lower_bound {
        r.detail("lower_bound", lb);
    }
    r.detail("heuristic", if sol.heuristic { 1.0 } else { 0.0 });
    Ok(Item { report: r.finish(), solution: Some(serde_json::to_value(&sol)?) })
}

fn verify(ctx: &Ctx, seed: &mut Option<u64>) -> Result<Item> {
    let l = ctx.l;
    let task = l.scenario.verify.as_ref().ok_or_else(|| anyhow!("scenario {:?} has no \"verify\" section", l.name))?;
    if let VerifyTask::Counterexample(params) = task {
        return Ok(Item { report: counterexample_run(params)?, solution: None });
    }
    let space = ctx.space()?;
    let u = ctx.function(&space, seed)?;
    let s = l.exponent("s", &space)?;
    let p = l.exponent("p", &space)?;
    let q_dim = l.exponent("Q", &space)?;
    let local = |center, r0, sigma: Option<f64>, delta, mode: Option<Mode>| LocalProblem {
        space: &space,
        center,
        r0,
        sigma: sigma.or(ctx.settings.sigma).unwrap_or(DEFAULT_SIGMA),
        delta,
        u: &u,
        s: &s,
        p: &p,
        q_dim: &q_dim,
        mode: mode.unwrap_or(Mode::M),
        tol: ctx.tol,
    };
    let report = match task {
        VerifyTask::SobolevLocal(t) => {
            let pr = local(t.center, t.r0, t.sigma, t.delta, t.mode);
            with_sigma(check_sobolev_local(&pr, t.candidate)?, pr.sigma)
        }
        VerifyTask::MorreyLocal(t) => {
            let pr = local(t.center, t.r0, t.sigma, t.delta, t.mode);
            with_sigma(check_morrey_local(&pr, t.candidate)?, pr.sigma)
        }
        VerifyTask::LocalEmbedding(t) => {
            let pr = local(t.center, t.r0, t.sigma, t.delta, t.mode);
            with_sigma(localemb_check(&pr, t.candidate)?, pr.sigma)
        }
        VerifyTask::MoserTrudingerLocal(t) => {
            let pr = local(t.center, t.r0, t.sigma, t.delta, t.mode);
            with_sigma(check_moser_trudinger_local(&pr, t.c1, t.c2)?, pr.sigma)
        }
        VerifyTask::Bounded(t) | VerifyTask::DoublingSob(t) | VerifyTask::DoublingMt(t) | VerifyTask::DoublingHolder(t) => {
            let theorem = match task {
                VerifyTask::Bounded(_) => GlobalTheorem::Bounded,
                VerifyTask::DoublingSob(_) => GlobalTheorem::DoublingSob,
                VerifyTask::DoublingMt(_) => GlobalTheorem::DoublingMt,
                _ => GlobalTheorem::DoublingHolder,
            };
            let beta = if l.has_exponent("beta") { Some(l.exponent("beta", &space)?) } else { None };
            let pr = GlobalProblem {
                space: &space,
                u: &u,
                s: &s,
                p: &p,
                q_dim: &q_dim,
                mode: t.mode.unwrap_or(Mode::M),
                delta: t.delta,
                beta: beta.as_ref(),
                tol: ctx.tol,
            };
            check_global(&pr, theorem, t.candidate)?
        }
        VerifyTask::Counterexample(_) => unreachable!(),
    };
    Ok(Item { report, solution: None })
}

fn with_sigma(mut r: VerificationReport, sigma: f64) -> VerificationReport {
    r.detail("setting_sigma", sigma);
    r
}

fn necessity(ctx: &Ctx) -> Result<Item> {
    let l = ctx.l;
    let task = l.scenario.necessity.as_ref().ok_or_else(|| anyhow!("scenario {:?} has no \"necessity\" section", l.name))?;
    let space = ctx.space()?;
    let s = l.exponent("s", &space)?;
    let p = l.exponent("p", &space)?;
    let q = l.exponent("q", &space)?;
    let target = match (l.has_exponent("gamma"), l.has_exponent("alpha")) {
        (true, false) => Some(l.exponent("gamma", &space)?),
        (false, true) => Some(l.exponent("alpha", &space)?),
        (false, false) => None,
        (true, true) => return Err(anyhow!("give at most one of \"gamma\" and \"alpha\"")),
    };
    let q_expected = if l.has_exponent("Q") { Some(l.exponent("Q", &space)?) } else { None };
    let epsilon = task.epsilon.or(ctx.settings.epsilon);
    let pr = NecessityProblem {
        space: &space,
        s: &s,
        p: &p,
        q: &q,
        gamma_or_alpha: target.as_ref(),
        q_expected: q_expected.as_ref(),
        mode: task.mode,
        scale: task.scale,
        epsilon,
    };
    let mut report = necessity_run(&pr)?;
    if let Some(e) = epsilon {
        report.detail("setting_epsilon", e);
    }
    Ok(Item { report, solution: None })
}

/// Runs every scenario on `jobs` threads; output order follows input order.
/// The first failing scenario (in input order) determines the error.
pub fn run_all(cmd: Command, scenarios: &[Loaded], settings: Settings, jobs: usize) -> Result<Vec<Item>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let results: Vec<Result<Item>> = pool.install(|| {
        scenarios
            .par_iter()
            .map(|l| run_one(cmd, l, settings).with_context(|| format!("scenario {:?}", l.name)))
            .collect()
    });
    results.into_iter().collect()
}
