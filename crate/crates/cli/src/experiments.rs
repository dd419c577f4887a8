//! One runner per subcommand. Each writes its tables and node dumps, pushes
//! a flag for anything uncertified, and returns the structured results.

use std::sync::Arc;

use anyhow::{Context, Result};
use grushin_core::extremals::{lambda_quotient_sweep, RadialProfile, RadialQuadrature};
use grushin_core::identities::{
    hardy_slope, interpolation_check, pohozaev_case1, pohozaev_case2, regime_classify, teq_ratio, weak_lorentz_norm,
    InterpolationTriple, Verdict,
};
use grushin_core::solver::nehari::check_threshold_coefficients;
use grushin_core::solver::{
    case1_ladder, mountain_pass, threshold_value, two_grid_check, Functional, MountainPassOptions, Ray, SolveStatus,
};
use grushin_core::trial::{smooth_random, smooth_random_positive};
use grushin_core::{
    asymptotic_slopes, cutoff_family, estimate_s, principal_eigenpair, sobolev_quotient, starshape_check,
    weak_form_residual, CutoffGeometry, Grid2D, GridFunction, ProblemSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{check_geometric, ExperimentConfig, HConfig, Kind};
use crate::output::{num, OutputDir, Table};

/// Eigenvalue tolerance for λ₁ when it only parametrizes another run.
const LAMBDA1_TOL: f64 = 1e-10;

pub struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub kind: Kind,
    pub out: OutputDir,
    pub flags: Vec<String>,
}

impl Ctx<'_> {
    fn flag(&mut self, msg: impl Into<String>) {
        self.flags.push(msg.into());
    }

    fn grid(&self, n: usize) -> Result<Arc<Grid2D>> {
        let p = &self.cfg.problem;
        Ok(Arc::new(Grid2D::new(self.cfg.domain_shape()?, n, n, &[0.0, p.beta, p.k as f64])?))
    }

    fn lambda1(&self, n: usize) -> Result<f64> {
        let p = &self.cfg.problem;
        Ok(principal_eigenpair(p.k, p.beta, &self.grid(n)?, LAMBDA1_TOL)?.lambda1)
    }

    /// λ for Case 1 together with λ₁ on the finest grid.
    fn case1_lambda(&self) -> Result<(f64, f64)> {
        let l1 = self.lambda1(self.cfg.finest())?;
        let p = &self.cfg.problem;
        Ok((p.lambda.unwrap_or_else(|| p.lambda_fraction.unwrap_or(0.5) * l1), l1))
    }

    fn spec_at(&self, lambda: f64, n: usize) -> Result<ProblemSpec> {
        let mut s = self.cfg.problem_spec(self.kind, lambda)?;
        s.resolution = (n, n);
        Ok(s)
    }

    fn samples(&self, n: usize) -> usize {
        self.cfg.problem.boundary_samples * n
    }
}

pub fn run(ctx: &mut Ctx) -> Result<Value> {
    match ctx.kind {
        Kind::Eigen => eigen(ctx),
        Kind::Sobolev => sobolev(ctx),
        Kind::Asymptotics => asymptotics(ctx),
        Kind::Case1 => case1(ctx),
        Kind::Case2 => case2(ctx),
        Kind::Pohozaev => pohozaev(ctx),
        Kind::Starshape => starshape(ctx),
        Kind::Inequalities => inequalities(ctx),
        Kind::Classify => classify(ctx),
        Kind::Convergence => convergence(ctx),
    }
}

fn eigen(ctx: &mut Ctx) -> Result<Value> {
    let (k, beta, tol) = (ctx.cfg.problem.k, ctx.cfg.problem.beta, ctx.cfg.problem.tol);
    let mut table = Table::new(
        "n: cells per axis; lambda1: principal eigenvalue; residual: discrete L2 residual; iterations: inverse iterations",
        &["n", "lambda1", "residual", "iterations"],
    );
    let mut runs = Vec::new();
    let mut last = None;
    for &n in &ctx.cfg.resolutions {
        let r = principal_eigenpair(k, beta, &ctx.grid(n)?, tol)?;
        let weak = weak_form_residual(&r, 20, ctx.cfg.seed)?;
        if !r.converged {
            ctx.flag(format!("n={n}: inverse iteration did not converge"));
        }
        table.push(vec![n.to_string(), num(r.lambda1), num(r.residual), r.iterations.to_string()]);
        runs.push(json!({ "summary": r.summary(), "weak_form_residual": weak }));
        last = Some((n, r));
    }
    ctx.out.csv("eigen.csv", &table)?;
    if let Some((n, r)) = &last {
        ctx.out.nodes(&format!("phi1_n{n}.csv"), &r.phi1)?;
    }

    let mut sweep = Table::new("beta: weight exponent; lambda1: principal eigenvalue on the finest grid", &["beta", "lambda1"]);
    let g = ctx.grid(ctx.cfg.finest())?;
    for &b in &ctx.cfg.betas {
        sweep.push(vec![num(b), num(principal_eigenpair(k, b, &g, tol)?.lambda1)]);
    }
    ctx.out.csv("eigen_beta.csv", &sweep)?;
    Ok(json!({ "runs": runs }))
}

fn geometry(ctx: &Ctx) -> Result<CutoffGeometry> {
    Ok(CutoffGeometry::new(&ctx.cfg.domain_shape()?, ctx.cfg.problem.k, ctx.cfg.extremals.r_in, None)?)
}

fn sobolev(ctx: &mut Ctx) -> Result<Value> {
    let k = ctx.cfg.problem.k;
    let x = &ctx.cfg.extremals;
    let s = estimate_s(k, x.quadrature_panels, x.r_max)?;
    let quad = RadialQuadrature::new(k, x.quadrature_panels, x.r_max)?;
    let geom = geometry(ctx)?;
    let n = ctx.cfg.finest();
    let g = ctx.grid(n)?;
    let mut table = Table::new(
        "eps: bubble scale; bubble_quotient, bubble_error: radial-route Q(U_eps); cutoff_grid_quotient: grid Q of the cutoff family where the grid resolves eps",
        &["eps", "bubble_quotient", "bubble_error", "cutoff_grid_quotient"],
    );
    let mut rows = Vec::new();
    for &e in &ctx.cfg.eps {
        let q = quad.sobolev_quotient(&RadialProfile::Bubble { eps: e })?;
        let gq = if geom.resolved(&g, e) { Some(sobolev_quotient(&cutoff_family(e, &geom, &g)?, k)?) } else { None };
        if let Some(v) = gq {
            if v < s.value - s.error_bar {
                ctx.flag(format!("eps={e}: grid quotient {v} is below S"));
            }
        }
        table.push(vec![num(e), num(q.value), num(q.error), gq.map(num).unwrap_or_default()]);
        rows.push(json!({ "eps": e, "bubble": q, "cutoff_grid_quotient": gq }));
    }
    ctx.out.csv("sobolev.csv", &table)?;
    Ok(json!({
        "s": s,
        "threshold": threshold_value(k, s.value)?,
        "geometry": geom,
        "grid_n": n,
        "quotients": rows,
    }))
}

fn asymptotics(ctx: &mut Ctx) -> Result<Value> {
    let (k, beta) = (ctx.cfg.problem.k, ctx.cfg.problem.beta);
    let geom = geometry(ctx)?;
    let g = ctx.grid(ctx.cfg.finest())?;
    let r = asymptotic_slopes(k, beta, &ctx.cfg.eps, &geom, Some(&g))?;
    let mut table = Table::new(
        "eps: cutoff-family scale; norm_S2_sq, norm_Lp1k_sq, norm_L2beta_sq: squared norms of u_eps by the radial route",
        &["eps", "norm_S2_sq", "norm_Lp1k_sq", "norm_L2beta_sq"],
    );
    for i in 0..r.eps.len() {
        table.push(vec![num(r.eps[i]), num(r.norm_s2_sq[i]), num(r.norm_lp1k_sq[i]), num(r.norm_l2beta_sq[i])]);
    }
    ctx.out.csv("asymptotics.csv", &table)?;
    if r.observed_regime != r.regime {
        ctx.flag(format!("observed L2 regime {:?} differs from the predicted {:?}", r.observed_regime, r.regime));
    }
    Ok(serde_json::to_value(&r)?)
}

struct Case1Outcome {
    results: Value,
    pohozaev: Vec<(usize, f64, f64, f64)>,
}

fn run_case1(ctx: &mut Ctx) -> Result<Case1Outcome> {
    let (lambda, l1) = ctx.case1_lambda()?;
    let res: Vec<(usize, usize)> = ctx.cfg.resolutions.iter().map(|&n| (n, n)).collect();
    let spec = ctx.spec_at(lambda, res[0].0)?;
    let reports = case1_ladder(&spec, &res, ctx.cfg.problem.tol)?;
    let mut table = Table::new(
        "n: cells per axis; energy: Psi(u); s_lambda: minimized quotient; residual: PDE residual; max_value: max |u|; r50: half-mass radius; pohozaev_gap: relative identity gap",
        &["n", "energy", "s_lambda", "residual", "max_value", "r50", "pohozaev_gap"],
    );
    let mut runs = Vec::new();
    let mut pz = Vec::new();
    for (r, &(n, _)) in reports.iter().zip(&res) {
        let spec_n = ctx.spec_at(lambda, n)?;
        let p = pohozaev_case1(&r.u, &spec_n, ctx.samples(n))?;
        ctx.out.nodes(&format!("u_n{n}.csv"), &r.u)?;
        if r.status != SolveStatus::Solved {
            ctx.flag(format!("n={n}: status {:?}", r.status));
        }
        if r.concentration.flagged {
            ctx.flag(format!("n={n}: concentration (r50 = {:.3e})", r.concentration.r50));
        }
        table.push(vec![
            n.to_string(),
            num(r.energy.total),
            num(r.s_lambda),
            num(r.residual),
            num(r.u.max_abs()),
            num(r.concentration.r50),
            num(p.gap),
        ]);
        pz.push((n, p.lhs, p.rhs, p.gap));
        runs.push(json!({ "summary": r.summary(), "pohozaev": p }));
    }
    let two_grid: Vec<_> = reports.windows(2).map(|w| two_grid_check(&w[0], &w[1])).collect();
    if let Some(t) = two_grid.last() {
        if !t.stable {
            ctx.flag("finest two-grid check is not stable");
        }
    }
    ctx.out.csv("case1.csv", &table)?;
    let geo = starshape_check(&spec.domain, spec.k, ctx.samples(ctx.cfg.finest()))?;
    let verdict = regime_classify(&spec, &geo, l1, false);
    Ok(Case1Outcome {
        results: json!({ "lambda": lambda, "lambda1": l1, "runs": runs, "two_grid": two_grid, "classification": verdict }),
        pohozaev: pz,
    })
}

fn run_case2(ctx: &mut Ctx) -> Result<Case1Outcome> {
    let x = &ctx.cfg.extremals;
    let s = estimate_s(ctx.cfg.problem.k, x.quadrature_panels, x.r_max)?;
    let mut table = Table::new(
        "n: cells per axis; level: mountain-pass level; rho: rim energy; relative_dual_norm: |Phi'(u)| / |u|; min_value: min u; pohozaev_gap: relative identity gap",
        &["n", "level", "rho", "relative_dual_norm", "min_value", "pohozaev_gap"],
    );
    let mut runs = Vec::new();
    let mut pz = Vec::new();
    for &n in &ctx.cfg.resolutions.clone() {
        let spec = ctx.spec_at(0.0, n)?;
        let g = spec.grid()?;
        let f = Functional::new(&spec, &g)?;
        // endpoint: the principal eigenfunction, scaled until Φ < 0
        let mut v0 = principal_eigenpair(spec.k, spec.beta, &g, LAMBDA1_TOL)?.phi1;
        let mut doublings = 0;
        while f.phi(&v0)? >= 0.0 {
            v0 = v0.scale(2.0);
            doublings += 1;
            if doublings > 60 {
                anyhow::bail!("n={n}: no endpoint with negative energy along the principal eigenfunction");
            }
        }
        let opts = MountainPassOptions { seed: ctx.cfg.seed, s_est: Some(s.value), ..Default::default() };
        let mp = mountain_pass(&spec, &v0, &opts)?;
        let p = pohozaev_case2(&mp.u, &spec, ctx.samples(n))?;
        ctx.out.nodes(&format!("u_n{n}.csv"), &mp.u)?;
        for fl in &mp.flags {
            ctx.flag(format!("n={n}: {fl}"));
        }
        table.push(vec![
            n.to_string(),
            num(mp.level),
            num(mp.rho),
            num(mp.relative_dual_norm),
            num(mp.min_value),
            num(p.gap),
        ]);
        pz.push((n, p.lhs, p.rhs, p.gap));
        runs.push(json!({ "summary": mp.summary(), "pohozaev": p }));
    }
    ctx.out.csv("case2.csv", &table)?;
    Ok(Case1Outcome { results: json!({ "s": s, "runs": runs }), pohozaev: pz })
}

fn case1(ctx: &mut Ctx) -> Result<Value> {
    Ok(run_case1(ctx)?.results)
}

fn case2(ctx: &mut Ctx) -> Result<Value> {
    Ok(run_case2(ctx)?.results)
}

fn pohozaev(ctx: &mut Ctx) -> Result<Value> {
    let o = if ctx.cfg.is_case2(ctx.kind) { run_case2(ctx)? } else { run_case1(ctx)? };
    let mut table = Table::new(
        "n: cells per axis; lhs: boundary flux term; rhs: interior term; gap: |lhs - rhs| / max(|lhs|, |rhs|, floor)",
        &["n", "lhs", "rhs", "gap"],
    );
    for &(n, l, r, g) in &o.pohozaev {
        table.push(vec![n.to_string(), num(l), num(r), num(g)]);
    }
    ctx.out.csv("pohozaev.csv", &table)?;
    Ok(o.results)
}

fn starshape_verdict(r: &grushin_core::StarshapeReport) -> String {
    if r.strictly {
        format!("strictly G-starshaped (eps0 = {})", r.eps0)
    } else if r.g_starshaped {
        "G-starshaped".to_string()
    } else {
        format!("not G-starshaped (min T.nu = {} at {:?})", r.min_t_dot_nu, r.worst_point)
    }
}

fn starshape(ctx: &mut Ctx) -> Result<Value> {
    let r = starshape_check(&ctx.cfg.domain_shape()?, ctx.cfg.problem.k, ctx.samples(ctx.cfg.finest()))?;
    ctx.out.text("verdict.txt", &format!("{}\n", starshape_verdict(&r)))?;
    Ok(serde_json::to_value(&r)?)
}

fn inequalities(ctx: &mut Ctx) -> Result<Value> {
    let (k, beta) = (ctx.cfg.problem.k, ctx.cfg.problem.beta);
    let i = ctx.cfg.inequalities.clone();
    let g = ctx.grid(ctx.cfg.finest())?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let trials: Vec<GridFunction> = (0..i.trials).map(|_| smooth_random(&g, 5, &mut rng)).collect();

    let mut table = Table::new(
        "theta: interpolation parameter; q, beta: derived exponent and weight; max_ratio: max over trials of lhs / rhs (at most 1)",
        &["theta", "q", "beta", "max_ratio"],
    );
    let mut interp = Vec::new();
    for &theta in &i.thetas {
        let t = InterpolationTriple { q1: 2.0, beta1: beta, q2: i.q0 + 1.0, beta2: k as f64, theta };
        let (q, b) = t.derived()?;
        let mut worst = 0.0f64;
        for u in &trials {
            worst = worst.max(interpolation_check(u, &t)?.ratio);
        }
        if worst > 1.0 + 1e-8 {
            ctx.flag(format!("interpolation violated at theta = {theta}: ratio {worst}"));
        }
        table.push(vec![num(theta), num(q), num(b), num(worst)]);
        interp.push(json!({ "triple": t, "q": q, "beta": b, "max_ratio": worst }));
    }
    ctx.out.csv("interpolation.csv", &table)?;

    let bump = smooth_random_positive(&g, 3, &mut rng);
    let hardy = hardy_slope(&bump, i.gamma, i.hardy_beta, &i.hardy_eps)?;
    let mut ht = Table::new("eps: strip half-width; near: weighted integral of u^2 over |x| < eps", &["eps", "near"]);
    for (e, n) in hardy.eps.iter().zip(&hardy.near) {
        ht.push(vec![num(*e), num(*n)]);
    }
    ctx.out.csv("hardy.csv", &ht)?;

    let params = ctx.cfg.teq_params();
    let mut teq = Vec::new();
    for u in trials.iter().take(10) {
        teq.push(teq_ratio(u, &params)?);
    }
    let weak: Vec<f64> = trials.iter().take(10).map(|u| weak_lorentz_norm(u, i.teq_s, k)).collect::<grushin_core::Result<_>>()?;
    Ok(json!({
        "interpolation": interp,
        "hardy": hardy,
        "teq": { "params": params, "theta": params.theta()?, "reports": teq },
        "weak_lorentz_norms": weak,
    }))
}

/// Threshold certificate for Case 2 along coefficient rays of the cutoff
/// family; only meaningful when h vanishes.
fn threshold_certificate(ctx: &Ctx, spec: &ProblemSpec) -> Result<Value> {
    let grushin_core::Case::Case2 { mu, q, .. } = &spec.case else {
        return Ok(json!(null));
    };
    if ctx.cfg.problem.h != HConfig::Zero {
        return Ok(json!({ "certified": false, "reason": "the ray coefficients do not include h" }));
    }
    let x = &ctx.cfg.extremals;
    let s = estimate_s(spec.k, x.quadrature_panels, x.r_max)?;
    let geom = geometry(ctx)?;
    let quad = RadialQuadrature::standard(spec.k);
    let p = spec.p();
    let mut best: Option<(f64, grushin_core::solver::ThresholdCheck)> = None;
    for &e in &ctx.cfg.eps {
        let prof = geom.profile(e);
        let a = quad.energy(&prof)?;
        let b = quad.weighted_power(&prof, spec.k as f64, p + 1.0)?;
        let c = quad.weighted_power(&prof, spec.beta, q + 1.0)?;
        let ray = Ray::from_coefficients(a.value, b.value, p, c.value, *mu, *q);
        let t = check_threshold_coefficients(&ray, spec.k, s.value, s.error_bar)?;
        if best.as_ref().is_none_or(|(_, bt)| t.sup < bt.sup) {
            best = Some((e, t));
        }
    }
    let certified = best.as_ref().is_some_and(|(_, t)| t.satisfied);
    Ok(json!({ "certified": certified, "best": best.map(|(e, t)| json!({ "eps": e, "check": t })) }))
}

fn classify(ctx: &mut Ctx) -> Result<Value> {
    let n = ctx.cfg.finest();
    let l1 = ctx.lambda1(n)?;
    let case2 = ctx.cfg.is_case2(ctx.kind);
    let lambda = if case2 {
        0.0
    } else {
        let p = &ctx.cfg.problem;
        p.lambda.unwrap_or_else(|| p.lambda_fraction.unwrap_or(0.5) * l1)
    };
    let spec = ctx.spec_at(lambda, n)?;
    let geo = starshape_check(&spec.domain, spec.k, ctx.samples(n))?;
    let cert = threshold_certificate(ctx, &spec)?;
    let certified = cert.get("certified").and_then(Value::as_bool).unwrap_or(false);
    let v = regime_classify(&spec, &geo, l1, certified);
    let verdict = serde_json::to_value(v.verdict)?;
    ctx.out.text(
        "verdict.txt",
        &format!("{} ({})\n", verdict.as_str().unwrap_or("?"), v.citation),
    )?;
    if v.verdict == Verdict::OutsideKnownRegimes {
        ctx.flag("parameters fall outside every known regime");
    }
    let mut extra = json!({ "verdict": v, "starshape": geo, "threshold_certificate": cert });
    if !case2 {
        let sweep = lambda_quotient_sweep(spec.k, spec.beta, lambda, &ctx.cfg.eps, &geometry(ctx)?)?;
        extra["lambda_quotient_sweep"] = serde_json::to_value(sweep)?;
    }
    Ok(extra)
}

/// Observed orders from successive differences: ln(|d_i| / |d_{i+1}|) / ln r.
fn difference_rates(values: &[f64], r: f64) -> (Vec<Option<f64>>, bool) {
    let d: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut rates = vec![None; values.len()];
    let mut monotone = true;
    for i in 0..d.len().saturating_sub(1) {
        monotone &= d[i + 1] < d[i];
        rates[i + 2] = Some((d[i] / d[i + 1]).ln() / r.ln());
    }
    (rates, monotone)
}

/// Orders of a quantity whose exact value is zero.
fn error_rates(errors: &[f64], r: f64) -> (Vec<Option<f64>>, bool) {
    let mut rates = vec![None; errors.len()];
    let mut monotone = true;
    for i in 1..errors.len() {
        monotone &= errors[i] < errors[i - 1];
        rates[i] = Some((errors[i - 1] / errors[i]).ln() / r.ln());
    }
    (rates, monotone)
}

fn convergence(ctx: &mut Ctx) -> Result<Value> {
    let res = ctx.cfg.resolutions.clone();
    let r = check_geometric(&res).map_err(anyhow::Error::msg)? as f64;
    let (k, beta, tol) = (ctx.cfg.problem.k, ctx.cfg.problem.beta, ctx.cfg.problem.tol);
    let mut table = Table::new(
        "n: cells per axis; quantity: measured quantity; value: its value; rate: observed order (empty when not claimed)",
        &["n", "quantity", "value", "rate"],
    );
    let mut quantities = serde_json::Map::new();
    let mut add = |ctx: &mut Ctx, name: &str, values: &[f64], rates: Vec<Option<f64>>, monotone: bool, claim: bool| {
        if !monotone {
            ctx.flag(format!("{name}: non-monotone errors (suspect concentration or under-resolution)"));
        }
        let rates: Vec<Option<f64>> = if claim { rates } else { vec![None; values.len()] };
        for ((n, v), rate) in res.iter().zip(values).zip(&rates) {
            table.push(vec![n.to_string(), name.to_string(), num(*v), rate.map(num).unwrap_or_default()]);
        }
        quantities.insert(name.to_string(), json!({ "values": values, "rates": rates, "monotone": monotone, "rates_claimed": claim }));
    };

    let l1: Vec<f64> =
        res.iter().map(|&n| Ok(principal_eigenpair(k, beta, &ctx.grid(n)?, tol)?.lambda1)).collect::<Result<_>>()?;
    let (rates, mono) = difference_rates(&l1, r);
    add(ctx, "lambda1", &l1, rates, mono, true);

    let p = &ctx.cfg.problem;
    if p.lambda.is_some() || p.lambda_fraction.is_some() {
        let l1_fine = *l1.last().context("no resolutions")?;
        let lambda = p.lambda.unwrap_or_else(|| p.lambda_fraction.unwrap_or(0.5) * l1_fine);
        let spec = ctx.spec_at(lambda, res[0])?;
        let ladder: Vec<(usize, usize)> = res.iter().map(|&n| (n, n)).collect();
        let reports = case1_ladder(&spec, &ladder, tol)?;
        let concentrated = reports.iter().any(|r| r.concentration.flagged || r.status != SolveStatus::Solved);
        if concentrated {
            ctx.flag("Case-1 ladder concentrates or is unsolved; no rate claimed");
        }
        let energies: Vec<f64> = reports.iter().map(|r| r.energy.total).collect();
        let gaps: Vec<f64> = reports
            .iter()
            .zip(&res)
            .map(|(rep, &n)| Ok(pohozaev_case1(&rep.u, &ctx.spec_at(lambda, n)?, ctx.samples(n))?.gap))
            .collect::<Result<_>>()?;
        let (er, em) = difference_rates(&energies, r);
        add(ctx, "energy", &energies, er, em, !concentrated);
        let (gr, gm) = error_rates(&gaps, r);
        add(ctx, "pohozaev_gap", &gaps, gr, gm, !concentrated);
    }
    drop(add);
    ctx.out.csv("convergence.csv", &table)?;
    Ok(json!({ "ratio": r, "resolutions": res, "quantities": quantities }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_order_sequence_has_rate_two() {
        let v: Vec<f64> = [16.0, 32.0, 64.0, 128.0].iter().map(|n: &f64| 3.0 + 5.0 / (n * n)).collect();
        let (rates, mono) = difference_rates(&v, 2.0);
        assert!(mono);
        assert!(rates[0].is_none() && rates[1].is_none());
        for r in rates[2..].iter() {
            assert!((r.unwrap() - 2.0).abs() < 1e-9);
        }
        let (rates, mono) = error_rates(&[0.4, 0.2, 0.1], 2.0);
        assert!(mono && (rates[2].unwrap() - 1.0).abs() < 1e-12);
        assert!(!error_rates(&[0.1, 0.2, 0.05], 2.0).1);
    }
}
