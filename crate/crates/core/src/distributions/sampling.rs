//! Primitive variate generators shared by the families.

use rand::Rng as _;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::rng::Rng;

/// Uniform on (0, 1].
pub fn open_uniform(rng: &mut Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

pub fn exp1(rng: &mut Rng) -> f64 {
    Exp1.sample(rng)
}

/// ln G with G ~ Gam(shape, 1).
///
/// Marsaglia–Tsang squeeze for shape ≥ 1. Smaller shapes use
/// G_a = G_{a+1}·U^{1/a}, kept in log form so shapes near 1e-3 do not
/// underflow.
pub fn ln_gamma_variate(shape: f64, rng: &mut Rng) -> f64 {
    if shape < 1.0 {
        let boost = ln_gamma_variate(shape + 1.0, rng);
        return boost + open_uniform(rng).ln() / shape;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = StandardNormal.sample(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u = open_uniform(rng);
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d.ln() + v.ln();
        }
    }
}

/// ln(1 + e^t) without overflow.
pub fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// ln(e^a + e^b).
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + softplus(a.min(b) - m)
}

/// Index k ≥ 0 with P(k ≥ j) = θ^j.
pub fn geometric_index(ratio: f64, rng: &mut Rng) -> i64 {
    (open_uniform(rng).ln() / ratio.ln()).floor() as i64
}
