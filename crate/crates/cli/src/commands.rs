use serde::Serialize;
use serde_json::json;

use minkowski_sticks::atlas::{
    build_ray_family, endpoint_map_modulus, halton_queries, strip_configurations, RayFamily,
    SiteSet,
};
use minkowski_sticks::error::{ModuliError, StickError};
use minkowski_sticks::moduli::{
    certify, default_uniform_exponents, estimate_balanced, estimate_lambda, extend_to_radius,
    onev_scan, CertifyOptions, ModulusOptions, SampleMode, ZGrid,
};
use minkowski_sticks::norm::NormSpec;
use minkowski_sticks::sampling::{gaussian, halton, sample_rng};
use minkowski_sticks::sharpness::{
    construct_pgt2, construct_plt2, log_grid, sharpness_curve, window_grid,
};
use minkowski_sticks::sticks::{
    euclid_interp_bound_residual, euclid_lipschitz_ratio, euclid_monotonicity, flip_chain_verify,
    holder_ratio, strip_experiment, ChainStatus, HolderOptions, StripParams,
};

use crate::config::{
    AtlasArgs, CertifyArgs, Command, ExperimentConfig, Mode, OnevArgs, SharpnessArgs, SticksArgs,
    StripArgs,
};
use crate::output::{emit_csv, emit_json, float};
use crate::Failure;

pub fn run(cfg: &ExperimentConfig) -> Result<(), Failure> {
    match &cfg.command_args {
        Command::Certify(a) => run_certify(cfg, a),
        Command::Sticks(a) => run_sticks(cfg, a),
        Command::Strip(a) => run_strip(cfg, a),
        Command::Sharpness(a) => run_sharpness(cfg, a),
        Command::Atlas(a) => run_atlas(cfg, a),
        Command::Onev(a) => run_onev(cfg, a),
    }
}

fn moduli_failure(e: ModuliError) -> Failure {
    match e {
        ModuliError::NoInformativeSamples | ModuliError::NoSamples => {
            Failure::Degenerate(e.to_string())
        }
        e => Failure::Config(e.to_string()),
    }
}

fn stick_failure(e: StickError) -> Failure {
    match e {
        StickError::Moduli(m) => moduli_failure(m),
        StickError::Degenerate(_) | StickError::Unbounded { .. } => {
            Failure::Degenerate(e.to_string())
        }
        e => Failure::Config(e.to_string()),
    }
}

fn config_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn run_certify(cfg: &ExperimentConfig, a: &CertifyArgs) -> Result<(), Failure> {
    let norm = cfg.norm()?;
    let uniform_exponents = match a.uniform.as_deref() {
        Some([p, q]) => Some((*p, *q)),
        Some(_) => return Err(Failure::Config("--uniform takes two values p,q".into())),
        None => None,
    };
    let opts = CertifyOptions {
        r: cfg.r.unwrap_or(0.25),
        balanced_radius: a.balanced_radius,
        mode: match a.mode {
            Mode::Tangent => SampleMode::Tangent,
            Mode::Full => SampleMode::Full,
        },
        samples: cfg.samples_or(100_000),
        seed: cfg.seed,
        uniform_exponents,
    };
    let report = certify(&norm, &opts).map_err(moduli_failure)?;
    let finite = [report.lambda_hat, report.t_hat, report.k_hat]
        .iter()
        .all(|v| v.is_finite());
    emit_json(cfg, &report)?;
    if !finite {
        return Err(Failure::Degenerate(format!(
            "non-finite constant: lambda {}, t {}, k {}",
            report.lambda_hat, report.t_hat, report.k_hat
        )));
    }
    Ok(())
}

/// `count` Gaussian sites with standard deviation 3/4.
fn random_sites(norm: &NormSpec, count: usize, seed: u64) -> Result<SiteSet, Failure> {
    let sites = (0..count as u64)
        .map(|i| gaussian(&mut sample_rng(seed, i), norm.dim()).scale(0.75))
        .collect();
    SiteSet::new(sites, norm.clone()).map_err(config_failure)
}

fn ray_family(
    norm: &NormSpec,
    sites: usize,
    queries: usize,
    length: f64,
    seed: u64,
) -> Result<RayFamily, Failure> {
    let set = random_sites(norm, sites, seed)?;
    let lo = vec![-2.0; norm.dim()];
    let hi = vec![2.0; norm.dim()];
    let qs = halton_queries(&lo, &hi, queries, seed);
    build_ray_family(&set, &qs, length).map_err(config_failure)
}

fn chain_label(s: ChainStatus) -> &'static str {
    match s {
        ChainStatus::Passed => "passed",
        ChainStatus::Degenerate => "degenerate",
        ChainStatus::Failed => "failed",
    }
}

#[derive(Serialize)]
struct SticksSummary {
    sticks: usize,
    pairs: usize,
    violations: usize,
    holder_exponents: (f64, f64),
    holder_sup: Option<f64>,
    skipped_queries: Vec<String>,
}

fn run_sticks(cfg: &ExperimentConfig, a: &SticksArgs) -> Result<(), Failure> {
    let norm = cfg.norm()?;
    let (hp, hq) = match a.holder.as_deref() {
        Some([p, q]) => (*p, *q),
        Some(_) => return Err(Failure::Config("--holder takes two values p,q".into())),
        None => default_uniform_exponents(&norm),
    };
    if !(hq > 1.0 && hq <= hp) {
        return Err(Failure::Config(format!(
            "--holder needs 1 < q <= p, got p = {hp}, q = {hq}"
        )));
    }
    let fam = ray_family(&norm, a.sites, a.family, a.length, cfg.seed)?;
    if fam.len() < 2 {
        return Err(Failure::Degenerate(format!(
            "only {} sticks survived",
            fam.len()
        )));
    }
    let pred = cfg.tolerance("predicate");
    let bound = cfg.tolerance("bound");
    let euclid = norm.is_euclidean();
    let mut rows = Vec::new();
    let mut violations = 0;
    let mut holder_sup: Option<f64> = None;
    let mut k = 0u64;
    for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            let (l, m) = (&fam.sticks[i], &fam.sticks[j]);
            let u = halton(k + cfg.seed.wrapping_mul(1_000_003), 2);
            k += 1;
            let (s, t) = (u[0].max(u[1]), u[0].min(u[1]));
            let chain = flip_chain_verify(&norm, l, m, s, t).map_err(stick_failure)?;
            let mut bad = chain.status == ChainStatus::Failed;
            let (mono, resid, lip) = if euclid {
                let mono = euclid_monotonicity(l, m).map_err(stick_failure)?;
                let resid = euclid_interp_bound_residual(l, m, t).map_err(stick_failure)?;
                let lip = euclid_lipschitz_ratio(l, m, s, t)
                    .map_err(stick_failure)?
                    .ratio;
                bad |= mono < -pred || resid > pred || lip > 1.0 + bound;
                (Some(mono), Some(resid), Some(lip))
            } else {
                (None, None, None)
            };
            let holder = match holder_ratio(&norm, l, m, t, hq, hp, &HolderOptions::default()) {
                Ok(h) => Some(h),
                Err(StickError::Precondition(_)) => None,
                Err(StickError::Unbounded { .. }) => {
                    bad = true;
                    None
                }
                Err(e) => return Err(stick_failure(e)),
            };
            if let Some(h) = holder {
                holder_sup = Some(holder_sup.map_or(h, |x: f64| x.max(h)));
            }
            violations += bad as usize;
            rows.push(format!(
                "{i},{j},{},{},{},{},{},{},{},{},{}",
                float(Some(s)),
                float(Some(t)),
                chain.status != ChainStatus::Failed,
                chain_label(chain.status),
                float(mono),
                float(resid),
                float(lip),
                float(holder),
                bad
            ));
        }
    }
    let summary = SticksSummary {
        sticks: fam.len(),
        pairs: rows.len(),
        violations,
        holder_exponents: (hp, hq),
        holder_sup,
        skipped_queries: fam.notes.clone(),
    };
    emit_csv(cfg, json!(summary), |w| {
        let mut out = String::from(
            "i,j,s,t,two_sticks,chain,monotonicity,interp_residual,lipschitz_ratio,holder_ratio,violation\n",
        );
        for r in &rows {
            out.push_str(r);
            out.push('\n');
        }
        w.write_all(out.as_bytes()).map_err(|e| e.to_string())
    })?;
    if violations > 0 {
        return Err(Failure::Violation(format!(
            "{violations} of {} pairs",
            rows.len()
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct StripSummary {
    lambda_small_r: f64,
    r: f64,
    lambda: f64,
    doublings: u32,
    k: f64,
    balanced_radius: f64,
    kappa: f64,
    width: f64,
    configurations: usize,
    checked: usize,
    skipped: Vec<String>,
    failures: usize,
    worst_promise: f64,
    worst_strip: f64,
}

fn run_strip(cfg: &ExperimentConfig, a: &StripArgs) -> Result<(), Failure> {
    let norm = cfg.norm()?;
    let r = cfg.r.unwrap_or(0.25);
    let samples = cfg.samples_or(20_000);
    let lambda_small = match a.lambda {
        Some(l) => l,
        None => {
            estimate_lambda(&norm, r, SampleMode::Full, samples, cfg.seed)
                .map_err(moduli_failure)?
                .value
        }
    };
    if !(lambda_small > 2.0) {
        return Err(Failure::Config(format!(
            "the norm is not certified geometrically convex: Lambda = {lambda_small} <= 2"
        )));
    }
    let ext = extend_to_radius(r, lambda_small, 1.0).map_err(moduli_failure)?;
    let k = match a.k {
        Some(k) => k,
        None => {
            estimate_balanced(
                &norm,
                a.balanced_radius,
                SampleMode::Full,
                samples,
                cfg.seed,
            )
            .map_err(moduli_failure)?
            .value
        }
    };
    if !k.is_finite() {
        return Err(Failure::Degenerate(format!("balance constant {k}")));
    }
    let mut params = StripParams::new(a.delta, a.rho, ext.lambda, k, a.balanced_radius);
    params.kappa = a.kappa;
    params.tolerance = cfg.tolerance("bound");
    params.modulus = ModulusOptions::fast();
    let kappa = params.kappa();
    if !(params.bound() <= 1.0) {
        return Err(Failure::Config(format!(
            "strip width {} exceeds 1; decrease --delta",
            params.bound()
        )));
    }
    let configs = strip_configurations(&norm, a.delta, kappa, a.configs, cfg.seed, &params.modulus)
        .map_err(config_failure)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let (mut failures, mut worst_promise, mut worst_strip) = (0, 0.0f64, 0.0f64);
    for (i, c) in configs.iter().enumerate() {
        match strip_experiment(&norm, &c.l, &c.m, &c.x0, &params) {
            Ok(rep) => {
                failures += !rep.passed as usize;
                worst_promise = worst_promise.max(rep.promise_lhs / rep.promise_rhs);
                worst_strip = worst_strip.max(rep.projection.abs() / rep.bound);
                rows.push(format!(
                    "{i},{},{},{},{},{},{},{},{}",
                    float(Some(rep.sigma_e)),
                    float(Some(rep.sigma_ebar)),
                    float(Some(rep.promise_lhs)),
                    float(Some(rep.promise_rhs)),
                    float(Some(rep.projection)),
                    float(Some(rep.direction_projection)),
                    float(Some(rep.bound)),
                    rep.passed
                ));
            }
            Err(StickError::Precondition(m)) => skipped.push(format!("configuration {i}: {m}")),
            Err(e) => return Err(stick_failure(e)),
        }
    }
    let summary = StripSummary {
        lambda_small_r: lambda_small,
        r,
        lambda: ext.lambda,
        doublings: ext.doublings,
        k,
        balanced_radius: a.balanced_radius,
        kappa,
        width: params.bound(),
        configurations: configs.len(),
        checked: rows.len(),
        skipped,
        failures,
        worst_promise,
        worst_strip,
    };
    emit_csv(cfg, json!(summary), |w| {
        let mut out = String::from(
            "index,sigma_e,sigma_ebar,promise_lhs,promise_rhs,projection,direction_projection,width,passed\n",
        );
        for r in &rows {
            out.push_str(r);
            out.push('\n');
        }
        w.write_all(out.as_bytes()).map_err(|e| e.to_string())
    })?;
    if failures > 0 {
        return Err(Failure::Violation(format!(
            "{failures} of {} configurations",
            rows.len()
        )));
    }
    Ok(())
}

fn exponent_from(cfg: &ExperimentConfig, p: Option<f64>) -> Result<f64, Failure> {
    let p = match (p, &cfg.norm) {
        (Some(p), _) => p,
        (None, Some(_)) => cfg.norm()?.exponent().unwrap_or(2.0),
        (None, None) => return Err(Failure::Config("give --p or --norm p:<value>".into())),
    };
    if !(p > 1.0 && p.is_finite()) {
        return Err(Failure::Config(format!("p must exceed 1, got {p}")));
    }
    Ok(p)
}

fn run_sharpness(cfg: &ExperimentConfig, a: &SharpnessArgs) -> Result<(), Failure> {
    let p = exponent_from(cfg, a.p)?;
    let grid = if p >= 2.0 {
        log_grid(a.delta_min, a.delta_max, a.points)
    } else {
        window_grid(p, a.points, a.decades)
    };
    let curve = sharpness_curve(p, &grid).map_err(config_failure)?;
    let bad: Vec<f64> = grid
        .iter()
        .filter(|&&x| {
            let inst = if p >= 2.0 {
                construct_pgt2(p, x)
            } else {
                construct_plt2(p, x)
            };
            !inst.map(|i| i.verify().ok).unwrap_or(false)
        })
        .copied()
        .collect();
    let summary = json!({
        "p": p,
        "construction": curve.construction,
        "exponent": curve.exponent,
        "band": curve.band,
        "spread": curve.spread(),
        "invariant_failures": bad,
    });
    emit_csv(cfg, summary, |w| {
        curve.write_csv(w).map_err(|e| e.to_string())
    })?;
    if !bad.is_empty() {
        return Err(Failure::Violation(format!(
            "{} instances break the invariants",
            bad.len()
        )));
    }
    Ok(())
}

fn run_atlas(cfg: &ExperimentConfig, a: &AtlasArgs) -> Result<(), Failure> {
    let norm = cfg.norm()?;
    let fam = ray_family(&norm, a.sites, a.queries, a.length, cfg.seed)?;
    if fam.is_empty() {
        return Err(Failure::Degenerate("every query was skipped".into()));
    }
    let grid = log_grid(1e-3, 1.0, 7);
    let modulus = endpoint_map_modulus(&norm, &fam, a.t, &grid).map_err(config_failure)?;
    let summary = json!({
        "sticks": fam.len(),
        "notes": fam.notes,
        "t": a.t,
        "endpoint_modulus": modulus,
    });
    emit_csv(cfg, summary, |w| {
        fam.write_csv(w).map_err(|e| e.to_string())
    })
}

fn run_onev(cfg: &ExperimentConfig, a: &OnevArgs) -> Result<(), Failure> {
    let p = exponent_from(cfg, a.p)?;
    if a.points < 2 {
        return Err(Failure::Config("--points must be at least 2".into()));
    }
    let grid = ZGrid {
        points: a.points,
        ..ZGrid::default()
    };
    let scan = onev_scan(p, &grid);
    emit_json(cfg, &scan)?;
    if !(scan.inf_double_ratio > 2.0) {
        return Err(Failure::Violation(format!(
            "inf g(2z)/g(z) = {} is not above 2",
            scan.inf_double_ratio
        )));
    }
    Ok(())
}
