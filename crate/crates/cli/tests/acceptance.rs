//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs under `cargo test` as a plain binary.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{dot, euclid_uniform_oracle, Mix};
use minkowski_sticks::atlas::{build_ray_family, halton_queries, SiteSet};
use minkowski_sticks::gap::{linearization_identity_residual, triangle_equality_residual};
use minkowski_sticks::moduli::uniform::MIN_SEPARATION;
use minkowski_sticks::moduli::{
    duality_residual, estimate_balanced, estimate_doubling, estimate_lambda,
    estimate_uniform_constants, modulus, onev_scan, ModulusOptions, SampleMode, ZGrid,
};
use minkowski_sticks::norm::finite_diff_gradient;
use minkowski_sticks::sharpness::{log_grid, sharpness_curve, window_grid};
use minkowski_sticks::sticks::{
    euclid_interp_bound_residual, euclid_lipschitz_ratio, euclid_monotonicity,
};
use minkowski_sticks::{two_sticks_check, NormSpec, Vector};
use serde_json::Value;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn spec(p: f64, dim: usize) -> NormSpec {
    if p == 2.0 {
        NormSpec::euclidean(dim).unwrap()
    } else {
        NormSpec::p_norm(p, dim).unwrap()
    }
}

fn unit(norm: &NormSpec, c: Vec<f64>) -> Vector {
    let v = Vector::new(c).unwrap();
    v.scale(1.0 / norm.value(&v))
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let used = start.elapsed();
    if used > limit {
        return Err(format!("took {used:.1?}, limit {limit:?}"));
    }
    Ok(())
}

fn euclidean_modulus() -> Outcome {
    let start = Instant::now();
    let opts = ModulusOptions::default();
    let mut worst = 0.0f64;
    let mut rng = Mix(1);
    for dim in [2, 3] {
        let n = NormSpec::euclidean(dim).unwrap();
        for _ in 0..5 {
            let x = unit(&n, rng.vector(dim, 1.0));
            for k in 1..=10 {
                let t = k as f64 / 10.0;
                let s = modulus(&n, &x, t, &opts).map_err(|e| e.to_string())?;
                worst = worst.max((s.sigma - t * t / 2.0).abs());
            }
        }
    }
    ensure!(worst <= 1e-6, "max |sigma - t^2/2| = {worst:e}");
    within(start, Duration::from_secs(10))?;
    Ok(format!("max |sigma - t^2/2| = {worst:.2e}"))
}

fn normal_identities() -> Outcome {
    let mut rng = Mix(2);
    let (mut euler, mut dual, mut fd) = (0.0f64, f64::NEG_INFINITY, 0.0f64);
    for p in [2.0, 1.5, 3.0, 4.0] {
        let n = spec(p, 3);
        for _ in 0..10_000 {
            let x = rng.vector(3, 2.0);
            let y = rng.vector(3, 2.0);
            let g = n.normal(&x).ok_or("normal at a nonzero point")?;
            euler = euler.max((dot(&x, &g) - n.value(&x)).abs());
            dual = dual.max(dot(&y, &g) - n.value(&y));
        }
        let mut checked = 0;
        while checked < 1_000 {
            let x = Vector::new(rng.vector(3, 2.0)).unwrap();
            // p-norm gradients are not smooth across coordinate planes
            if x.iter().any(|c| c.abs() < 1e-2) {
                continue;
            }
            let diff = finite_diff_gradient(&n, &x, 1e-5).map_err(|e| e.to_string())?;
            fd = fd.max((&diff - &n.normal(&x).unwrap()).max_abs());
            checked += 1;
        }
    }
    ensure!(euler <= 1e-9, "<x,N(x)> - |x| residual {euler:e}");
    ensure!(dual <= 1e-9, "<y,N(x)> exceeds |y| by {dual:e}");
    ensure!(fd <= 1e-6, "finite-difference gap {fd:e}");
    Ok(format!(
        "euler {euler:.1e}, dual excess {dual:.1e}, fd {fd:.1e}"
    ))
}

fn gap_identities() -> Outcome {
    let mut rng = Mix(3);
    let (mut tri, mut lin) = (0.0f64, 0.0f64);
    for p in [2.0, 1.5, 3.0, 4.0] {
        let n = spec(p, 3);
        for _ in 0..10_000 {
            let x = Vector::new(rng.vector(3, 2.0)).unwrap();
            let y = Vector::new(rng.vector(3, 2.0)).unwrap();
            tri = tri.max(triangle_equality_residual(&n, &x, &y).map_err(|e| e.to_string())?);
            lin = lin.max(linearization_identity_residual(&n, &x, &y).map_err(|e| e.to_string())?);
        }
    }
    ensure!(tri <= 1e-9 && lin <= 1e-9, "residuals {tri:e}, {lin:e}");
    Ok(format!("triangle {tri:.1e}, linearization {lin:.1e}"))
}

fn euclidean_two_sticks() -> Outcome {
    let start = Instant::now();
    let n = NormSpec::euclidean(2).unwrap();
    let mut rng = Mix(4);
    let sites = (0..8)
        .map(|_| Vector::new(rng.vector(2, 1.0)).unwrap())
        .collect();
    let set = SiteSet::new(sites, n.clone()).map_err(|e| e.to_string())?;
    let queries = halton_queries(&[-2.0, -2.0], &[2.0, 2.0], 160, 1);
    let fam = build_ray_family(&set, &queries, 0.25).map_err(|e| e.to_string())?;
    let (mut mono, mut resid, mut lip) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut pairs = 0;
    'outer: for i in 0..fam.len() {
        for j in i + 1..fam.len() {
            if pairs == 10_000 {
                break 'outer;
            }
            let (l, m) = (&fam.sticks[i], &fam.sticks[j]);
            ensure!(
                two_sticks_check(&n, l, m),
                "pair ({i}, {j}) fails the predicate"
            );
            let (a, b) = (rng.unit().max(1e-9), rng.unit().max(1e-9));
            let (t, s) = (a.min(b), a.max(b));
            mono = mono.min(euclid_monotonicity(l, m).map_err(|e| e.to_string())?);
            resid = resid.max(euclid_interp_bound_residual(l, m, t).map_err(|e| e.to_string())?);
            lip = lip.max(
                euclid_lipschitz_ratio(l, m, s, t)
                    .map_err(|e| e.to_string())?
                    .ratio,
            );
            pairs += 1;
        }
    }
    ensure!(pairs == 10_000, "only {pairs} pairs");
    ensure!(mono >= -1e-12, "monotonicity {mono:e}");
    ensure!(resid <= 1e-12, "interpolation residual {resid:e}");
    ensure!(lip <= 1.0, "Lipschitz ratio {lip}");
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{pairs} pairs, min monotonicity {mono:.1e}, residual {resid:.1e}, max ratio {lip:.4}"
    ))
}

fn one_variable_lemma() -> Outcome {
    let mut lines = Vec::new();
    for p in [1.1, 1.5, 2.0, 3.0, 4.0, 8.0] {
        let s = onev_scan(p, &ZGrid::default());
        let top = 2f64.powf(p);
        ensure!(
            s.inf_double_ratio > 2.0,
            "p = {p}: inf {}",
            s.inf_double_ratio
        );
        ensure!(
            (s.limit_zero - 4.0).abs() <= 0.04,
            "p = {p}: limit at 0 is {}",
            s.limit_zero
        );
        ensure!(
            (s.limit_infinity - top).abs() <= 0.01 * top,
            "p = {p}: limit at infinity is {}, want {top}",
            s.limit_infinity
        );
        lines.push(format!("p={p}: inf {:.4}", s.inf_double_ratio));
    }
    Ok(lines.join(", "))
}

fn tangent_constants() -> Outcome {
    let mut worst_lambda = f64::INFINITY;
    for p in [1.5, 3.0, 4.0] {
        for dim in [2, 3, 5] {
            let n = spec(p, dim);
            let mode = SampleMode::Tangent;
            let lam = e(estimate_lambda(&n, 1.0, mode, 100_000, 6))?;
            let t = e(estimate_doubling(&n, 1.0, mode, 100_000, 6))?;
            let k = e(estimate_balanced(&n, 1.0, mode, 100_000, 6))?;
            println!(
                "    p={p} dim={dim}: Lambda {:.6} (sample {}), T {:.6} (sample {}), K {:.6} (sample {})",
                lam.value, lam.witness.sample, t.value, t.witness.sample, k.value, k.witness.sample
            );
            ensure!(
                lam.value > 2.0,
                "p = {p}, dim = {dim}: Lambda = {}",
                lam.value
            );
            ensure!(
                t.value.is_finite() && k.value.is_finite(),
                "p = {p}, dim = {dim}: T or K infinite"
            );
            worst_lambda = worst_lambda.min(lam.value);
        }
    }
    Ok(format!("smallest tangent Lambda {worst_lambda:.4}"))
}

fn modulus_doubling() -> Outcome {
    let opts = ModulusOptions::default();
    let r = 0.25;
    let mut worst = f64::INFINITY;
    for n in [spec(2.0, 3), spec(1.5, 2), spec(3.0, 3), spec(4.0, 2)] {
        let lam = estimate_lambda(&n, r, SampleMode::Full, 100_000, 7)
            .map_err(|e| e.to_string())?
            .value;
        ensure!(lam > 2.0, "{}: Lambda = {lam}", n.label());
        let mut rng = Mix(70);
        for _ in 0..20 {
            let x = unit(&n, rng.vector(n.dim(), 1.0));
            let t = rng.range(0.01, r);
            let s1 = modulus(&n, &x, t, &opts).map_err(|e| e.to_string())?.sigma;
            let s2 = modulus(&n, &x, 2.0 * t, &opts)
                .map_err(|e| e.to_string())?
                .sigma;
            ensure!(
                s2 >= (lam - 0.01) * s1,
                "{}: sigma(2t) = {s2} < ({lam} - 0.01) {s1}",
                n.label()
            );
            worst = worst.min(s2 / s1);
        }
    }
    Ok(format!("smallest sigma(2t)/sigma(t) {worst:.4}"))
}

fn duality() -> Outcome {
    let r = 0.25;
    let mut worst = 0.0f64;
    for n in [spec(2.0, 2), spec(1.5, 3), spec(3.0, 3), spec(4.0, 2)] {
        let lam = estimate_lambda(&n, r, SampleMode::Full, 50_000, 8)
            .map_err(|e| e.to_string())?
            .value;
        let mut rng = Mix(80);
        for _ in 0..1_000 {
            let x = Vector::new(rng.vector(n.dim(), 2.0)).unwrap();
            let d = Vector::new(rng.vector(n.dim(), 1.0)).unwrap();
            let z = x.axpy(rng.unit() * 2.0 * r * n.value(&x) / n.value(&d), &d);
            worst = worst.max(duality_residual(&n, &x, &z, lam, r).map_err(|e| e.to_string())?);
        }
    }
    ensure!(worst <= 1e-9, "residual {worst:e}");
    Ok(format!("max residual {worst:.1e}"))
}

fn holder_sharpness() -> Outcome {
    let large = sharpness_curve(4.0, &log_grid(1e-5, 1e-2, 16)).map_err(|e| e.to_string())?;
    let spread = large.spread().ok_or("p = 4 curve has no finite ratio")?;
    ensure!(spread <= 2.0, "p = 4 spread {spread}");
    let small = sharpness_curve(1.5, &window_grid(1.5, 16, 6.0)).map_err(|e| e.to_string())?;
    let (lo, hi) = small.band.ok_or("p = 1.5 curve has no finite ratio")?;
    ensure!(lo > 0.0 && hi.is_finite(), "p = 1.5 band [{lo}, {hi}]");
    let (c4, cc4) = large.band.unwrap();
    Ok(format!(
        "p=4 band [{c4:.6}, {cc4:.6}], p=1.5 band [{lo:.4}, {hi:.4}]"
    ))
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn strip_theorem() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    for (norm, dim) in [("euclidean", "2"), ("p:3", "3")] {
        let csv = dir.path().join(format!("strip-{dim}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_sticks"))
            .args(["strip", "--norm", norm, "--dim", dim, "--configs", "1000"])
            .arg("--out")
            .arg(&csv)
            .status()
            .map_err(|e| e.to_string())?;
        ensure!(
            status.code() == Some(0),
            "{norm}: exit code {:?}",
            status.code()
        );
        let meta = read_json(&dir.path().join(format!("strip-{dim}.csv.meta.json")))?;
        let s = &meta["summary"];
        ensure!(s["checked"] == 1000, "{norm}: checked {}", s["checked"]);
        ensure!(s["failures"] == 0, "{norm}: {} failures", s["failures"]);
        out.push(format!(
            "{norm}: Lambda {:.4}, K {:.4}, worst strip {:.2e}",
            s["lambda"].as_f64().unwrap_or(f64::NAN),
            s["k"].as_f64().unwrap_or(f64::NAN),
            s["worst_strip"].as_f64().unwrap_or(f64::NAN)
        ));
    }
    within(start, Duration::from_secs(300))?;
    Ok(out.join("; "))
}

fn uniform_constants() -> Outcome {
    let n = NormSpec::euclidean(2).unwrap();
    let u = estimate_uniform_constants(&n, 2.0, 2.0, 100_000, 11).map_err(|e| e.to_string())?;
    let (a, _) = euclid_uniform_oracle(0.5 * MIN_SEPARATION);
    let (_, b) = euclid_uniform_oracle(MIN_SEPARATION);
    ensure!((u.a_hat - 0.25).abs() <= 0.02, "a_hat = {}", u.a_hat);
    ensure!((u.b_hat - 1.0).abs() <= 0.02, "b_hat = {}", u.b_hat);
    ensure!(
        (u.a_hat - a).abs() <= 0.02 && (u.b_hat - b).abs() <= 0.02,
        "oracle ({a}, {b})"
    );
    Ok(format!(
        "a_hat {:.6} (oracle {a:.6}), b_hat {:.6} (oracle {b:.6})",
        u.a_hat, u.b_hat
    ))
}

fn strip_timestamps(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.remove("timestamp");
            map.values_mut().for_each(strip_timestamps);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timestamps),
        _ => {}
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 3] = [
        &[
            "sticks", "--norm", "p:3", "--dim", "3", "--family", "40", "--seed", "5",
        ],
        &[
            "certify",
            "--norm",
            "p:4",
            "--samples",
            "5000",
            "--seed",
            "5",
        ],
        &["sharpness", "--p", "1.5", "--points", "12"],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("run-{k}-{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_sticks"))
                .args(*args)
                .arg("--out")
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            ensure!(
                status.code() == Some(0),
                "{args:?}: exit code {:?}",
                status.code()
            );
            let body = std::fs::read(&path).map_err(|e| e.to_string())?;
            let mut meta = Value::Null;
            let side = dir.path().join(format!("run-{k}-{rep}.meta.json"));
            if side.exists() {
                meta = read_json(&side)?;
            }
            let mut body = serde_json::from_slice::<Value>(&body)
                .unwrap_or(Value::String(String::from_utf8_lossy(&body).into_owned()));
            strip_timestamps(&mut body);
            strip_timestamps(&mut meta);
            // the output path differs between the two runs by construction
            for v in [&mut body, &mut meta] {
                if let Some(c) = v.get_mut("config").and_then(Value::as_object_mut) {
                    c.remove("out");
                }
            }
            outputs.push((body, meta));
        }
        ensure!(outputs[0] == outputs[1], "{args:?}: outputs differ");
    }
    Ok(format!(
        "{} commands reproduced identically, timestamps aside",
        runs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("euclidean modulus closed form", euclidean_modulus),
        ("normal-map identities", normal_identities),
        ("gap identities", gap_identities),
        ("euclidean two sticks", euclidean_two_sticks),
        ("one-variable p-norm lemma", one_variable_lemma),
        ("tangent-plane constants", tangent_constants),
        ("modulus doubling", modulus_doubling),
        ("duality", duality),
        ("Hölder sharpness", holder_sharpness),
        ("strip theorem", strip_theorem),
        ("uniform constants", uniform_constants),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    } else {
        println!("all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    }
}
