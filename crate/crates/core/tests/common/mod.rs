//! Independent reference formulas. Nothing here calls into the crate's
//! norm or gap code, so agreement with it is a real check.
#![allow(dead_code)]

/// `(sum |x_i|^p)^(1/p)`, evaluated naively.
pub fn pnorm(p: f64, x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `sign(x_i) |x_i|^(p-1) / |x|_p^(p-1)`.
pub fn pnorm_grad(p: f64, x: &[f64]) -> Vec<f64> {
    let n = pnorm(p, x);
    x.iter()
        .map(|v| v.signum() * (v.abs() / n).powf(p - 1.0))
        .collect()
}

pub fn l2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `|y|_p - <y, grad |x|_p>`; `p = 2` is the Euclidean gap.
pub fn gap_p(p: f64, x: &[f64], y: &[f64]) -> f64 {
    pnorm(p, y) - dot(y, &pnorm_grad(p, x))
}

/// `sigma(x, t)` for a `p`-norm on `R^3` by brute force: `y = t u / |u|_p`
/// for `u` on a latitude-longitude grid of the Euclidean sphere with
/// spacing `step` radians.
pub fn grid_modulus_r3(p: f64, x: &[f64; 3], t: f64, step: f64) -> f64 {
    let g = pnorm_grad(p, x);
    let n_theta = (std::f64::consts::PI / step).ceil() as usize;
    let n_phi = (2.0 * std::f64::consts::PI / step).ceil() as usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=n_theta {
        let th = i as f64 * step;
        let (st, ct) = th.sin_cos();
        for j in 0..n_phi {
            let (sp, cp) = (j as f64 * step).sin_cos();
            let u = [st * cp, st * sp, ct];
            let s = t / pnorm(p, &u);
            let w = [x[0] + s * u[0], x[1] + s * u[1], x[2] + s * u[2]];
            let h = pnorm(p, &w) - dot(&w, &g);
            if h > best {
                best = h;
            }
        }
    }
    best
}

/// The Euclidean ratio `h(x, x+2y) / h(x, x+y)` for unit `x` and tangent
/// `y` with `|y| = r`; it decreases in `r`.
pub fn euclid_tangent_lambda(r: f64) -> f64 {
    4.0 * ((1.0 + r * r).sqrt() + 1.0) / ((1.0 + 4.0 * r * r).sqrt() + 1.0)
}

/// Euclidean `A` and `B` for exponent 2 along one-parameter families:
/// `(2 - |e+f|)/|e-f|^2 = 1/(2(1 + cos(theta/2)))` for unit vectors at
/// angle `theta`, and `(|x+y| + |x-y| - 2)/s^2 = 2(sqrt(1+s^2) - 1)/s^2`
/// for tangent `|y| = s`. `A` is the inf over `theta`, `B` the sup over
/// `s`, both attained as the parameter goes to zero.
pub fn euclid_uniform_oracle(min_sep: f64) -> (f64, f64) {
    let theta = 2.0 * (min_sep / 2.0).asin();
    let a = 1.0 / (2.0 * (1.0 + (theta / 2.0).cos()));
    let b = 2.0 * ((1.0 + min_sep * min_sep).sqrt() - 1.0) / (min_sep * min_sep);
    (a, b)
}

/// SplitMix64, for test inputs that must not share the crate's streams.
pub struct Mix(pub u64);

impl Mix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Coordinates uniform in `[-scale, scale]`.
    pub fn vector(&mut self, dim: usize, scale: f64) -> Vec<f64> {
        (0..dim).map(|_| self.range(-scale, scale)).collect()
    }
}
