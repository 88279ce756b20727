mod common;

use common::{euclid_tangent_lambda, euclid_uniform_oracle, grid_modulus_r3, pnorm, Mix};
use minkowski_sticks::moduli::uniform::MIN_SEPARATION;
use minkowski_sticks::moduli::{
    duality_residual, estimate_balanced, estimate_doubling, estimate_lambda,
    estimate_uniform_constants, modulus, onev_scan, ModulusOptions, SampleMode, ZGrid,
};
use minkowski_sticks::{NormSpec, Vector};

fn unit(norm: &NormSpec, c: &[f64]) -> Vector {
    let v = Vector::new(c.to_vec()).unwrap();
    v.scale(1.0 / norm.value(&v))
}

#[test]
fn euclidean_modulus_is_half_t_squared() {
    let opts = ModulusOptions::default();
    for dim in [2, 3] {
        let n = NormSpec::euclidean(dim).unwrap();
        let mut rng = Mix(dim as u64);
        for _ in 0..3 {
            let x = unit(&n, &rng.vector(dim, 1.0));
            for k in 1..=10 {
                let t = k as f64 / 10.0;
                let s = modulus(&n, &x, t, &opts).unwrap();
                assert!(
                    (s.sigma - t * t / 2.0).abs() <= 1e-6,
                    "t = {t}: {}",
                    s.sigma
                );
            }
        }
    }
}

#[test]
fn p4_modulus_matches_dense_grid() {
    let n = NormSpec::p_norm(4.0, 3).unwrap();
    let opts = ModulusOptions::default();
    for (c, t) in [([1.0, 0.0, 0.0], 0.3), ([0.6, -0.5, 0.4], 0.5)] {
        let s = pnorm(4.0, &c);
        let x = [c[0] / s, c[1] / s, c[2] / s];
        let oracle = grid_modulus_r3(4.0, &x, t, 1e-3);
        let got = modulus(&n, &Vector::new(x.to_vec()).unwrap(), t, &opts).unwrap();
        assert!(
            (got.sigma - oracle).abs() <= 1e-5,
            "{} vs {oracle}",
            got.sigma
        );
        assert!(got.sigma >= oracle - 1e-9);
    }
}

#[test]
fn euclidean_tangent_lambda_matches_closed_form() {
    let n = NormSpec::euclidean(3).unwrap();
    for r in [0.25, 1.0] {
        let est = estimate_lambda(&n, r, SampleMode::Tangent, 50_000, 2).unwrap();
        let exact = euclid_tangent_lambda(r);
        assert!(
            est.value >= exact - 1e-9,
            "r = {r}: {} < {exact}",
            est.value
        );
        assert!(
            est.value <= exact + 1e-3,
            "r = {r}: {} vs {exact}",
            est.value
        );
    }
}

#[test]
fn modulus_doubles_at_least_by_lambda() {
    let opts = ModulusOptions::default();
    for n in [
        NormSpec::euclidean(3).unwrap(),
        NormSpec::p_norm(3.0, 3).unwrap(),
        NormSpec::p_norm(1.5, 2).unwrap(),
    ] {
        let r = 0.25;
        let lam = estimate_lambda(&n, r, SampleMode::Full, 50_000, 9)
            .unwrap()
            .value;
        assert!(lam > 2.0);
        let mut rng = Mix(21);
        for _ in 0..20 {
            let x = unit(&n, &rng.vector(n.dim(), 1.0));
            let t = rng.range(0.01, r);
            let s1 = modulus(&n, &x, t, &opts).unwrap().sigma;
            let s2 = modulus(&n, &x, 2.0 * t, &opts).unwrap().sigma;
            assert!(s2 >= (lam - 0.01) * s1, "{s2} < {lam} * {s1}");
        }
    }
}

#[test]
fn duality_holds_on_admissible_pairs() {
    for n in [
        NormSpec::euclidean(2).unwrap(),
        NormSpec::p_norm(4.0, 3).unwrap(),
    ] {
        let r = 0.25;
        let lam = estimate_lambda(&n, r, SampleMode::Full, 50_000, 4)
            .unwrap()
            .value;
        let mut rng = Mix(31);
        for _ in 0..1_000 {
            let x = Vector::new(rng.vector(n.dim(), 2.0)).unwrap();
            let d = Vector::new(rng.vector(n.dim(), 1.0)).unwrap();
            let len = rng.unit() * 2.0 * r * n.value(&x);
            let z = x.axpy(len / n.value(&d), &d);
            assert!(duality_residual(&n, &x, &z, lam, r).unwrap() <= 1e-9);
        }
    }
}

#[test]
fn tangent_constants_of_p_norms() {
    for p in [1.5, 3.0, 4.0] {
        for dim in [2, 3, 5] {
            let n = NormSpec::p_norm(p, dim).unwrap();
            let mode = SampleMode::Tangent;
            let lam = estimate_lambda(&n, 1.0, mode, 20_000, 1).unwrap();
            let t = estimate_doubling(&n, 1.0, mode, 20_000, 1).unwrap();
            let k = estimate_balanced(&n, 1.0, mode, 20_000, 1).unwrap();
            assert!(lam.value > 2.0, "p = {p}, dim = {dim}: {}", lam.value);
            assert!(t.value.is_finite() && k.value.is_finite());
        }
    }
}

#[test]
fn one_variable_lemma() {
    for p in [1.1, 1.5, 2.0, 3.0, 4.0, 8.0] {
        let s = onev_scan(p, &ZGrid::default());
        assert!(s.inf_double_ratio > 2.0, "p = {p}");
        assert!(
            (s.limit_zero - 4.0).abs() <= 0.04,
            "p = {p}: {}",
            s.limit_zero
        );
        let top = 2f64.powf(p);
        assert!(
            (s.limit_infinity - top).abs() <= 0.01 * top,
            "p = {p}: {}",
            s.limit_infinity
        );
    }
}

#[test]
fn euclidean_uniform_constants() {
    let n = NormSpec::euclidean(2).unwrap();
    let u = estimate_uniform_constants(&n, 2.0, 2.0, 50_000, 3).unwrap();
    // normalizing the second point can shrink the separation to half the floor
    let d_min = 0.5 * MIN_SEPARATION;
    let (a, _) = euclid_uniform_oracle(d_min);
    let (_, b) = euclid_uniform_oracle(MIN_SEPARATION);
    // 2 - |e + f| cancels down to about d^2 / 4, costing a few ulps of 2
    let slack = 8.0 * f64::EPSILON / (d_min * d_min);
    assert!(
        u.a_hat >= a - slack && u.a_hat <= a + 0.02,
        "{} vs {a}",
        u.a_hat
    );
    assert!(
        u.b_hat <= b + 1e-9 && u.b_hat >= b - 0.02,
        "{} vs {b}",
        u.b_hat
    );
}
