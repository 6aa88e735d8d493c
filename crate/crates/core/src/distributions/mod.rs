//! Distribution families with samplers, densities, CDFs and moments.
//!
//! Parameterizations (density or pmf up to normalization, with the
//! normalizing constant used):
//!
//! | family    | params                         | law                                            | normalizer                  |
//! |-----------|--------------------------------|------------------------------------------------|-----------------------------|
//! | `sExp`    | `rate` λ, `shift` c            | e^{−λx} on (c,∞)                               | e^{−λc}/λ                   |
//! | `Exp`     | `rate` λ                       | e^{−λx} on (0,∞)                               | 1/λ                         |
//! | `ssGeo`   | `ratio` θ, `offset` M, `scale` m | θ^x at m·x, x ≥ M integer                     | θ^M/(1−θ)                   |
//! | `sGeo`    | `ratio` θ, `scale` m           | `ssGeo` with M = 0                             | 1/(1−θ)                     |
//! | `AL`      | `rate_pos` λ₁, `rate_neg` λ₂   | e^{−λ₁x} for x > 0, e^{λ₂x} for x < 0          | 1/λ₁ + 1/λ₂                 |
//! | `sdAL`    | `ratio_pos` θ₁, `ratio_neg` θ₂, `scale` m | θ₁^x (x ≥ 0), θ₂^{−x} (x < 0) at m·x | 1/(1−θ₁) + θ₂/(1−θ₂)        |
//! | `Gam`     | `shape` λ, `rate` c            | x^{λ−1}e^{−cx}                                 | Γ(λ)/c^λ                    |
//! | `IG`      | `shape` λ, `scale` c           | x^{−λ−1}e^{−c/x}                               | Γ(λ)/c^λ                    |
//! | `Be`      | `a`, `b`                       | x^{a−1}(1−x)^{b−1} on (0,1)                    | B(a,b)                      |
//! | `IB`      | `a`, `b`                       | (x−1)^{b−1}x^{−a−b} on (1,∞)                   | B(a,b)                      |
//! | `BePrime` | `a`, `b`                       | x^{a−1}(1+x)^{−a−b} on (0,∞)                   | B(a,b)                      |
//! | `Point`   | `at`                           | unit mass at `at`                              |                             |
//!
//! The geometric ratios are the ratio of successive probabilities, so that
//! products like `ssGeo(pq)` combine directly. The sdAL normalizer is derived
//! by summing both geometric tails.
//!
//! JSON form: `{"family": "AL", "params": {"rate_pos": 1.0, "rate_neg": 2.0}, "modifier": "min_with_zero"}`.
//! Modifiers: `"negate"`, `"min_with_zero"`, `"max_with_zero"`, `{"scale": k}`, `{"shift": h}`.

mod sampling;

pub use sampling::{exp1, geometric_index, ln_gamma_variate, log_add_exp, open_uniform, softplus};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::stattest::special::{log_beta, log_gamma, reg_inc_beta, reg_inc_beta_upper, reg_inc_gamma, reg_inc_gamma_upper};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params")]
pub enum Family {
    #[serde(rename = "sExp")]
    SExp {
        rate: f64,
        shift: f64,
    },
    Exp {
        rate: f64,
    },
    #[serde(rename = "ssGeo")]
    SsGeo {
        ratio: f64,
        offset: i64,
        scale: f64,
    },
    #[serde(rename = "sGeo")]
    SGeo {
        ratio: f64,
        scale: f64,
    },
    AL {
        rate_pos: f64,
        rate_neg: f64,
    },
    #[serde(rename = "sdAL")]
    SdAL {
        ratio_pos: f64,
        ratio_neg: f64,
        scale: f64,
    },
    Gam {
        shape: f64,
        rate: f64,
    },
    IG {
        shape: f64,
        scale: f64,
    },
    Be {
        a: f64,
        b: f64,
    },
    IB {
        a: f64,
        b: f64,
    },
    BePrime {
        a: f64,
        b: f64,
    },
    Point {
        at: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modifier {
    Negate,
    MinWithZero,
    MaxWithZero,
    Scale(f64),
    Shift(f64),
}

/// A family plus an optional push-forward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modifier: Option<Modifier>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedSample {
    pub value: f64,
    pub is_atom: bool,
}

/// Discrete support `origin + scale·ℤ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub origin: f64,
    pub scale: f64,
}

impl Lattice {
    pub fn point(&self, k: i64) -> f64 {
        self.origin + self.scale * k as f64
    }

    /// Nearest index, treating values within 1e-9 relative of a lattice point as on it.
    pub fn index_of(&self, x: f64) -> i64 {
        ((x - self.origin) / self.scale).round() as i64
    }

    fn floor(&self, x: f64) -> i64 {
        let t = (x - self.origin) / self.scale;
        let r = t.round();
        if (t - r).abs() <= 1e-9 * r.abs().max(1.0) {
            r as i64
        } else {
            t.floor() as i64
        }
    }

    fn ceil(&self, x: f64) -> i64 {
        let t = (x - self.origin) / self.scale;
        let r = t.round();
        if (t - r).abs() <= 1e-9 * r.abs().max(1.0) {
            r as i64
        } else {
            t.ceil() as i64
        }
    }
}

fn invalid(family: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidParameter { family, detail: detail.into() }
}

fn positive(family: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(family, format!("{name} = {v} must be positive")))
    }
}

fn unit_open(family: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(family, format!("{name} = {v} must lie in (0,1)")))
    }
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::SExp { .. } => "sExp",
            Family::Exp { .. } => "Exp",
            Family::SsGeo { .. } => "ssGeo",
            Family::SGeo { .. } => "sGeo",
            Family::AL { .. } => "AL",
            Family::SdAL { .. } => "sdAL",
            Family::Gam { .. } => "Gam",
            Family::IG { .. } => "IG",
            Family::Be { .. } => "Be",
            Family::IB { .. } => "IB",
            Family::BePrime { .. } => "BePrime",
            Family::Point { .. } => "Point",
        }
    }

    pub fn describe(&self) -> String {
        let args = match *self {
            Family::SExp { rate, shift } => format!("{rate},{shift}"),
            Family::Exp { rate } => format!("{rate}"),
            Family::SsGeo { ratio, offset, scale } => format!("{ratio},{offset},{scale}"),
            Family::SGeo { ratio, scale } => format!("{ratio},{scale}"),
            Family::AL { rate_pos, rate_neg } => format!("{rate_pos},{rate_neg}"),
            Family::SdAL { ratio_pos, ratio_neg, scale } => format!("{ratio_pos},{ratio_neg},{scale}"),
            Family::Gam { shape, rate } => format!("{shape},{rate}"),
            Family::IG { shape, scale } => format!("{shape},{scale}"),
            Family::Be { a, b } | Family::IB { a, b } | Family::BePrime { a, b } => format!("{a},{b}"),
            Family::Point { at } => format!("{at}"),
        };
        format!("{}({args})", self.name())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.name();
        match *self {
            Family::SExp { rate, shift } => {
                positive(n, "rate", rate)?;
                if !shift.is_finite() {
                    return Err(invalid(n, "shift must be finite"));
                }
                Ok(())
            }
            Family::Exp { rate } => positive(n, "rate", rate),
            Family::SsGeo { ratio, scale, .. } => {
                unit_open(n, "ratio", ratio)?;
                positive(n, "scale", scale)
            }
            Family::SGeo { ratio, scale } => {
                unit_open(n, "ratio", ratio)?;
                positive(n, "scale", scale)
            }
            Family::AL { rate_pos, rate_neg } => {
                positive(n, "rate_pos", rate_pos)?;
                positive(n, "rate_neg", rate_neg)
            }
            Family::SdAL { ratio_pos, ratio_neg, scale } => {
                unit_open(n, "ratio_pos", ratio_pos)?;
                unit_open(n, "ratio_neg", ratio_neg)?;
                positive(n, "scale", scale)
            }
            Family::Gam { shape, rate } => {
                positive(n, "shape", shape)?;
                positive(n, "rate", rate)
            }
            Family::IG { shape, scale } => {
                positive(n, "shape", shape)?;
                positive(n, "scale", scale)
            }
            Family::Be { a, b } | Family::IB { a, b } | Family::BePrime { a, b } => {
                positive(n, "a", a)?;
                positive(n, "b", b)
            }
            Family::Point { at } => {
                if at.is_finite() {
                    Ok(())
                } else {
                    Err(invalid(n, "location must be finite"))
                }
            }
        }
    }

    /// Lattice for the integer-valued families.
    pub fn lattice(&self) -> Option<Lattice> {
        match *self {
            Family::SsGeo { scale, .. } | Family::SGeo { scale, .. } | Family::SdAL { scale, .. } => Some(Lattice { origin: 0.0, scale }),
            _ => None,
        }
    }

    /// Support endpoints (closed or open is not distinguished).
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Family::SExp { shift, .. } => (shift, f64::INFINITY),
            Family::Exp { .. } | Family::Gam { .. } | Family::IG { .. } | Family::BePrime { .. } => (0.0, f64::INFINITY),
            Family::SsGeo { offset, scale, .. } => (offset as f64 * scale, f64::INFINITY),
            Family::SGeo { .. } => (0.0, f64::INFINITY),
            Family::AL { .. } | Family::SdAL { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Family::Be { .. } => (0.0, 1.0),
            Family::IB { .. } => (1.0, f64::INFINITY),
            Family::Point { at } => (at, at),
        }
    }

    /// Lattice index draw for the integer-valued families.
    pub fn sample_index(&self, rng: &mut Rng) -> Option<i64> {
        match *self {
            Family::SsGeo { ratio, offset, .. } => Some(offset + geometric_index(ratio, rng)),
            Family::SGeo { ratio, .. } => Some(geometric_index(ratio, rng)),
            Family::SdAL { ratio_pos, ratio_neg, .. } => {
                let pos = 1.0 / (1.0 - ratio_pos);
                let z = pos + ratio_neg / (1.0 - ratio_neg);
                if open_uniform(rng) <= pos / z {
                    Some(geometric_index(ratio_pos, rng))
                } else {
                    Some(-1 - geometric_index(ratio_neg, rng))
                }
            }
            _ => None,
        }
    }

    /// ln X for the families supported in (0,∞), exact for tiny shapes.
    pub fn sample_ln(&self, rng: &mut Rng) -> Option<f64> {
        Some(match *self {
            Family::Exp { rate } => (exp1(rng) / rate).ln(),
            Family::Gam { shape, rate } => ln_gamma_variate(shape, rng) - rate.ln(),
            Family::IG { shape, scale } => scale.ln() - ln_gamma_variate(shape, rng),
            Family::Be { a, b } => {
                let (l1, l2) = (ln_gamma_variate(a, rng), ln_gamma_variate(b, rng));
                -softplus(l2 - l1)
            }
            Family::IB { a, b } => {
                let (l1, l2) = (ln_gamma_variate(a, rng), ln_gamma_variate(b, rng));
                softplus(l2 - l1)
            }
            Family::BePrime { a, b } => ln_gamma_variate(a, rng) - ln_gamma_variate(b, rng),
            _ => return None,
        })
    }

    pub fn sample(&self, rng: &mut Rng) -> f64 {
        if let (Some(l), Some(k)) = (self.lattice(), self.sample_index(rng)) {
            return l.point(k);
        }
        match *self {
            Family::SExp { rate, shift } => shift + exp1(rng) / rate,
            Family::Exp { rate } => exp1(rng) / rate,
            Family::AL { rate_pos, rate_neg } => {
                if open_uniform(rng) <= rate_neg / (rate_pos + rate_neg) {
                    exp1(rng) / rate_pos
                } else {
                    -exp1(rng) / rate_neg
                }
            }
            Family::Be { a, b } => {
                let (l1, l2) = (ln_gamma_variate(a, rng), ln_gamma_variate(b, rng));
                1.0 / (1.0 + (l2 - l1).exp())
            }
            Family::IB { a, b } => {
                let (l1, l2) = (ln_gamma_variate(a, rng), ln_gamma_variate(b, rng));
                1.0 + (l2 - l1).exp()
            }
            Family::Point { at } => at,
            Family::Gam { .. } | Family::IG { .. } | Family::BePrime { .. } => self.sample_ln(rng).map(f64::exp).unwrap_or(f64::NAN),
            Family::SsGeo { .. } | Family::SGeo { .. } | Family::SdAL { .. } => unreachable!(),
        }
    }

    fn lattice_cdf(&self, k: i64) -> f64 {
        match *self {
            Family::SsGeo { ratio, offset, .. } => {
                if k < offset {
                    0.0
                } else {
                    1.0 - ratio.powf((k - offset + 1) as f64)
                }
            }
            Family::SGeo { ratio, .. } => {
                if k < 0 {
                    0.0
                } else {
                    1.0 - ratio.powf((k + 1) as f64)
                }
            }
            Family::SdAL { ratio_pos, ratio_neg, .. } => {
                let z = 1.0 / (1.0 - ratio_pos) + ratio_neg / (1.0 - ratio_neg);
                if k < 0 {
                    ratio_neg.powf(-k as f64) / ((1.0 - ratio_neg) * z)
                } else {
                    1.0 - ratio_pos.powf((k + 1) as f64) / ((1.0 - ratio_pos) * z)
                }
            }
            _ => unreachable!(),
        }
    }

    /// P(X ≤ x).
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if let Some(l) = self.lattice() {
            if x == f64::INFINITY {
                return 1.0;
            }
            if x == f64::NEG_INFINITY {
                return 0.0;
            }
            return self.lattice_cdf(l.floor(x));
        }
        match *self {
            Family::SExp { rate, shift } => {
                if x <= shift {
                    0.0
                } else {
                    -(-rate * (x - shift)).exp_m1()
                }
            }
            Family::Exp { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Family::AL { rate_pos, rate_neg } => {
                let s = rate_pos + rate_neg;
                if x < 0.0 {
                    rate_pos / s * (rate_neg * x).exp()
                } else {
                    1.0 - rate_neg / s * (-rate_pos * x).exp()
                }
            }
            Family::Gam { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    reg_inc_gamma(shape, rate * x).unwrap_or(f64::NAN)
                }
            }
            Family::IG { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else {
                    reg_inc_gamma_upper(shape, scale / x).unwrap_or(f64::NAN)
                }
            }
            Family::Be { a, b } => reg_inc_beta(a, b, x.clamp(0.0, 1.0)).unwrap_or(f64::NAN),
            Family::IB { a, b } => {
                if x <= 1.0 {
                    0.0
                } else {
                    reg_inc_beta_upper(a, b, 1.0 / x).unwrap_or(f64::NAN)
                }
            }
            Family::BePrime { a, b } => {
                if x <= 0.0 {
                    0.0
                } else {
                    reg_inc_beta_upper(b, a, 1.0 / (1.0 + x)).unwrap_or(f64::NAN)
                }
            }
            Family::Point { at } => {
                if x >= at {
                    1.0
                } else {
                    0.0
                }
            }
            Family::SsGeo { .. } | Family::SGeo { .. } | Family::SdAL { .. } => unreachable!(),
        }
    }

    /// P(X < x).
    pub fn cdf_lt(&self, x: f64) -> f64 {
        if let Some(l) = self.lattice() {
            if x == f64::INFINITY {
                return 1.0;
            }
            if x == f64::NEG_INFINITY {
                return 0.0;
            }
            return self.lattice_cdf(l.ceil(x) - 1);
        }
        match *self {
            Family::Point { at } => {
                if x > at {
                    1.0
                } else {
                    0.0
                }
            }
            _ => self.cdf(x),
        }
    }

    /// Log density, or log pmf at lattice points; −∞ off the support.
    pub fn log_density(&self, x: f64) -> f64 {
        let ninf = f64::NEG_INFINITY;
        if let Some(l) = self.lattice() {
            let k = l.index_of(x);
            if (l.point(k) - x).abs() > 1e-9 * x.abs().max(l.scale) {
                return ninf;
            }
            return match *self {
                Family::SsGeo { ratio, offset, .. } => {
                    if k < offset {
                        ninf
                    } else {
                        (k - offset) as f64 * ratio.ln() + (-ratio).ln_1p()
                    }
                }
                Family::SGeo { ratio, .. } => {
                    if k < 0 {
                        ninf
                    } else {
                        k as f64 * ratio.ln() + (-ratio).ln_1p()
                    }
                }
                Family::SdAL { ratio_pos, ratio_neg, .. } => {
                    let z = 1.0 / (1.0 - ratio_pos) + ratio_neg / (1.0 - ratio_neg);
                    let w = if k >= 0 { k as f64 * ratio_pos.ln() } else { -(k as f64) * ratio_neg.ln() };
                    w - z.ln()
                }
                _ => unreachable!(),
            };
        }
        match *self {
            Family::SExp { rate, shift } => {
                if x < shift {
                    ninf
                } else {
                    rate.ln() - rate * (x - shift)
                }
            }
            Family::Exp { rate } => {
                if x < 0.0 {
                    ninf
                } else {
                    rate.ln() - rate * x
                }
            }
            Family::AL { rate_pos, rate_neg } => {
                let lz = (1.0 / rate_pos + 1.0 / rate_neg).ln();
                if x >= 0.0 {
                    -rate_pos * x - lz
                } else {
                    rate_neg * x - lz
                }
            }
            Family::Gam { shape, rate } => {
                if x <= 0.0 {
                    ninf
                } else {
                    shape * rate.ln() - log_gamma(shape) + (shape - 1.0) * x.ln() - rate * x
                }
            }
            Family::IG { shape, scale } => {
                if x <= 0.0 {
                    ninf
                } else {
                    shape * scale.ln() - log_gamma(shape) - (shape + 1.0) * x.ln() - scale / x
                }
            }
            Family::Be { a, b } => {
                if x <= 0.0 || x >= 1.0 {
                    ninf
                } else {
                    (a - 1.0) * x.ln() + (b - 1.0) * (-x).ln_1p() - log_beta(a, b)
                }
            }
            Family::IB { a, b } => {
                if x <= 1.0 {
                    ninf
                } else {
                    (b - 1.0) * (x - 1.0).ln() - (a + b) * x.ln() - log_beta(a, b)
                }
            }
            Family::BePrime { a, b } => {
                if x <= 0.0 {
                    ninf
                } else {
                    (a - 1.0) * x.ln() - (a + b) * x.ln_1p() - log_beta(a, b)
                }
            }
            Family::Point { at } => {
                if x == at {
                    0.0
                } else {
                    ninf
                }
            }
            Family::SsGeo { .. } | Family::SGeo { .. } | Family::SdAL { .. } => unreachable!(),
        }
    }

    pub fn mean(&self) -> Option<f64> {
        Some(match *self {
            Family::SExp { rate, shift } => shift + 1.0 / rate,
            Family::Exp { rate } => 1.0 / rate,
            Family::SsGeo { ratio, offset, scale } => scale * (offset as f64 + ratio / (1.0 - ratio)),
            Family::SGeo { ratio, scale } => scale * ratio / (1.0 - ratio),
            Family::AL { rate_pos, rate_neg } => 1.0 / rate_pos - 1.0 / rate_neg,
            Family::SdAL { ratio_pos: p, ratio_neg: q, scale } => {
                let z = 1.0 / (1.0 - p) + q / (1.0 - q);
                scale * (p / (1.0 - p).powi(2) - q / (1.0 - q).powi(2)) / z
            }
            Family::Gam { shape, rate } => shape / rate,
            Family::IG { shape, scale } if shape > 1.0 => scale / (shape - 1.0),
            Family::Be { a, b } => a / (a + b),
            Family::IB { a, b } if a > 1.0 => (a + b - 1.0) / (a - 1.0),
            Family::BePrime { a, b } if b > 1.0 => a / (b - 1.0),
            Family::Point { at } => at,
            _ => return None,
        })
    }

    pub fn variance(&self) -> Option<f64> {
        Some(match *self {
            Family::SExp { rate, .. } | Family::Exp { rate } => 1.0 / (rate * rate),
            Family::SsGeo { ratio, scale, .. } | Family::SGeo { ratio, scale } => scale * scale * ratio / (1.0 - ratio).powi(2),
            Family::AL { rate_pos: l1, rate_neg: l2 } => {
                let p = l2 / (l1 + l2);
                let m2 = p * 2.0 / (l1 * l1) + (1.0 - p) * 2.0 / (l2 * l2);
                m2 - (1.0 / l1 - 1.0 / l2).powi(2)
            }
            Family::SdAL { ratio_pos: p, ratio_neg: q, scale } => {
                let z = 1.0 / (1.0 - p) + q / (1.0 - q);
                let m2 = (p * (1.0 + p) / (1.0 - p).powi(3) + q * (1.0 + q) / (1.0 - q).powi(3)) / z;
                let m = self.mean()? / scale;
                scale * scale * (m2 - m * m)
            }
            Family::Gam { shape, rate } => shape / (rate * rate),
            Family::IG { shape, scale } if shape > 2.0 => scale * scale / ((shape - 1.0).powi(2) * (shape - 2.0)),
            Family::Be { a, b } => a * b / ((a + b).powi(2) * (a + b + 1.0)),
            Family::IB { a, b } if a > 2.0 => {
                let m2 = (a + b - 1.0) * (a + b - 2.0) / ((a - 1.0) * (a - 2.0));
                m2 - self.mean()?.powi(2)
            }
            Family::BePrime { a, b } if b > 2.0 => a * (a + b - 1.0) / ((b - 2.0) * (b - 1.0).powi(2)),
            Family::Point { .. } => 0.0,
            _ => return None,
        })
    }
}

impl From<Family> for DistributionSpec {
    fn from(family: Family) -> Self {
        Self { family, modifier: None }
    }
}

impl DistributionSpec {
    pub fn new(family: Family) -> Self {
        family.into()
    }

    pub fn with(mut self, modifier: Modifier) -> Self {
        self.modifier = Some(modifier);
        self
    }

    pub fn negated(self) -> Self {
        self.with(Modifier::Negate)
    }

    pub fn min_zero(self) -> Self {
        self.with(Modifier::MinWithZero)
    }

    pub fn max_zero(self) -> Self {
        self.with(Modifier::MaxWithZero)
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        match self.modifier {
            Some(Modifier::Scale(k)) if !(k.is_finite() && k != 0.0) => {
                Err(invalid(self.family.name(), format!("scale factor {k} must be finite and nonzero")))
            }
            Some(Modifier::Shift(h)) if !h.is_finite() => Err(invalid(self.family.name(), format!("shift {h} must be finite"))),
            _ => Ok(()),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn is_discrete(&self) -> bool {
        self.lattice().is_some() || matches!(self.family, Family::Point { .. })
    }

    /// Discrete support after the modifier.
    pub fn lattice(&self) -> Option<Lattice> {
        let l = self.family.lattice()?;
        Some(match self.modifier {
            None | Some(Modifier::Negate) | Some(Modifier::MinWithZero) | Some(Modifier::MaxWithZero) => l,
            Some(Modifier::Scale(k)) => Lattice { origin: l.origin * k, scale: l.scale * k.abs() },
            Some(Modifier::Shift(h)) => Lattice { origin: l.origin + h, scale: l.scale },
        })
    }

    /// Atom location and mass created by a clipping modifier on a continuous
    /// family (or the unit mass of `Point`).
    pub fn atom(&self) -> Option<(f64, f64)> {
        if let Family::Point { at } = self.family {
            let at = match self.modifier {
                None => at,
                Some(m) => apply_modifier(m, at),
            };
            return Some((at, 1.0));
        }
        match self.modifier {
            Some(Modifier::MinWithZero) => Some((0.0, 1.0 - self.family.cdf_lt(0.0))),
            Some(Modifier::MaxWithZero) => Some((0.0, self.family.cdf(0.0))),
            _ => None,
        }
    }

    pub fn sample_one(&self, rng: &mut Rng) -> MixedSample {
        let x = self.family.sample(rng);
        let value = match self.modifier {
            None => x,
            Some(m) => apply_modifier(m, x),
        };
        let is_atom = match (self.family, self.modifier) {
            (Family::Point { .. }, _) => true,
            (_, Some(Modifier::MinWithZero)) | (_, Some(Modifier::MaxWithZero)) => value == 0.0,
            _ => false,
        };
        MixedSample { value, is_atom }
    }

    pub fn sample(&self, rng: &mut Rng, n: usize) -> Result<Vec<MixedSample>> {
        if n == 0 {
            return Err(Error::Invalid("sample count must be at least 1".into()));
        }
        self.validate()?;
        Ok((0..n).map(|_| self.sample_one(rng)).collect())
    }

    /// Plain values.
    pub fn sample_values(&self, rng: &mut Rng, n: usize) -> Result<Vec<f64>> {
        Ok(self.sample(rng, n)?.into_iter().map(|s| s.value).collect())
    }

    /// Lattice index after negate/min/max modifiers (integer arithmetic on m·ℤ).
    pub fn sample_index(&self, rng: &mut Rng) -> Option<i64> {
        let k = self.family.sample_index(rng)?;
        match self.modifier {
            None => Some(k),
            Some(Modifier::Negate) => Some(-k),
            Some(Modifier::MinWithZero) => Some(k.min(0)),
            Some(Modifier::MaxWithZero) => Some(k.max(0)),
            Some(_) => None,
        }
    }

    /// P(Y ≤ y) for the modified variable Y.
    pub fn cdf(&self, y: f64) -> f64 {
        let f = &self.family;
        match self.modifier {
            None => f.cdf(y),
            Some(Modifier::Negate) => 1.0 - f.cdf_lt(-y),
            Some(Modifier::MinWithZero) => {
                if y >= 0.0 {
                    1.0
                } else {
                    f.cdf(y)
                }
            }
            Some(Modifier::MaxWithZero) => {
                if y < 0.0 {
                    0.0
                } else {
                    f.cdf(y)
                }
            }
            Some(Modifier::Scale(k)) => {
                if k > 0.0 {
                    f.cdf(y / k)
                } else {
                    1.0 - f.cdf_lt(y / k)
                }
            }
            Some(Modifier::Shift(h)) => f.cdf(y - h),
        }
    }

    /// P(Y < y).
    pub fn cdf_lt(&self, y: f64) -> f64 {
        let f = &self.family;
        match self.modifier {
            None => f.cdf_lt(y),
            Some(Modifier::Negate) => 1.0 - f.cdf(-y),
            Some(Modifier::MinWithZero) => {
                if y > 0.0 {
                    1.0
                } else {
                    f.cdf_lt(y)
                }
            }
            Some(Modifier::MaxWithZero) => {
                if y <= 0.0 {
                    0.0
                } else {
                    f.cdf_lt(y)
                }
            }
            Some(Modifier::Scale(k)) => {
                if k > 0.0 {
                    f.cdf_lt(y / k)
                } else {
                    1.0 - f.cdf(y / k)
                }
            }
            Some(Modifier::Shift(h)) => f.cdf_lt(y - h),
        }
    }

    /// P(Y = y).
    pub fn mass(&self, y: f64) -> f64 {
        (self.cdf(y) - self.cdf_lt(y)).max(0.0)
    }

    /// Log density of the continuous part, log pmf on lattices, log atom mass at atoms.
    pub fn log_density(&self, y: f64) -> f64 {
        let ninf = f64::NEG_INFINITY;
        if let Some((at, mass)) = self.atom() {
            if y == at {
                return mass.ln();
            }
        }
        let f = &self.family;
        match self.modifier {
            None => f.log_density(y),
            Some(Modifier::Negate) => f.log_density(-y),
            Some(Modifier::MinWithZero) => {
                if y > 0.0 {
                    ninf
                } else {
                    f.log_density(y)
                }
            }
            Some(Modifier::MaxWithZero) => {
                if y < 0.0 {
                    ninf
                } else {
                    f.log_density(y)
                }
            }
            Some(Modifier::Scale(k)) => {
                let base = f.log_density(y / k);
                if f.lattice().is_some() {
                    base
                } else {
                    base - k.abs().ln()
                }
            }
            Some(Modifier::Shift(h)) => f.log_density(y - h),
        }
    }

    pub fn mean(&self) -> Option<f64> {
        let m = self.family.mean()?;
        match self.modifier {
            None => Some(m),
            Some(Modifier::Negate) => Some(-m),
            Some(Modifier::Scale(k)) => Some(k * m),
            Some(Modifier::Shift(h)) => Some(m + h),
            _ => None,
        }
    }

    pub fn variance(&self) -> Option<f64> {
        let v = self.family.variance()?;
        match self.modifier {
            None | Some(Modifier::Negate) | Some(Modifier::Shift(_)) => Some(v),
            Some(Modifier::Scale(k)) => Some(k * k * v),
            _ => None,
        }
    }

    /// Support endpoints after the modifier.
    pub fn support(&self) -> (f64, f64) {
        let (lo, hi) = self.family.support();
        match self.modifier {
            None => (lo, hi),
            Some(Modifier::Negate) => (-hi, -lo),
            Some(Modifier::MinWithZero) => (lo.min(0.0), hi.min(0.0)),
            Some(Modifier::MaxWithZero) => (lo.max(0.0), hi.max(0.0)),
            Some(Modifier::Scale(k)) if k > 0.0 => (lo * k, hi * k),
            Some(Modifier::Scale(k)) => (hi * k, lo * k),
            Some(Modifier::Shift(h)) => (lo + h, hi + h),
        }
    }

    /// Short human-readable form, e.g. `AL(1,2)∧0`.
    pub fn describe(&self) -> String {
        let base = self.family.describe();
        match self.modifier {
            None => base,
            Some(Modifier::Negate) => format!("-{base}"),
            Some(Modifier::MinWithZero) => format!("{base}∧0"),
            Some(Modifier::MaxWithZero) => format!("{base}∨0"),
            Some(Modifier::Scale(k)) => format!("{k}·{base}"),
            Some(Modifier::Shift(h)) => format!("{base}+{h}"),
        }
    }
}

pub fn apply_modifier(m: Modifier, x: f64) -> f64 {
    match m {
        Modifier::Negate => -x,
        Modifier::MinWithZero => x.min(0.0),
        Modifier::MaxWithZero => x.max(0.0),
        Modifier::Scale(k) => k * x,
        Modifier::Shift(h) => x + h,
    }
}

/// Shorthand constructors.
pub mod laws {
    use super::{DistributionSpec, Family};

    pub fn sexp(rate: f64, shift: f64) -> DistributionSpec {
        Family::SExp { rate, shift }.into()
    }
    pub fn exp(rate: f64) -> DistributionSpec {
        Family::Exp { rate }.into()
    }
    pub fn ssgeo(ratio: f64, offset: i64, scale: f64) -> DistributionSpec {
        Family::SsGeo { ratio, offset, scale }.into()
    }
    pub fn sgeo(ratio: f64, scale: f64) -> DistributionSpec {
        Family::SGeo { ratio, scale }.into()
    }
    pub fn al(rate_pos: f64, rate_neg: f64) -> DistributionSpec {
        Family::AL { rate_pos, rate_neg }.into()
    }
    pub fn sdal(ratio_pos: f64, ratio_neg: f64, scale: f64) -> DistributionSpec {
        Family::SdAL { ratio_pos, ratio_neg, scale }.into()
    }
    pub fn gam(shape: f64, rate: f64) -> DistributionSpec {
        Family::Gam { shape, rate }.into()
    }
    pub fn ig(shape: f64, scale: f64) -> DistributionSpec {
        Family::IG { shape, scale }.into()
    }
    pub fn be(a: f64, b: f64) -> DistributionSpec {
        Family::Be { a, b }.into()
    }
    pub fn ib(a: f64, b: f64) -> DistributionSpec {
        Family::IB { a, b }.into()
    }
    pub fn beprime(a: f64, b: f64) -> DistributionSpec {
        Family::BePrime { a, b }.into()
    }
    pub fn point(at: f64) -> DistributionSpec {
        Family::Point { at }.into()
    }
}
