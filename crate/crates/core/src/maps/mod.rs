//! Polymer recursion maps R, the bijections F they are built from, their
//! zero-temperature (min-plus) counterparts, and the F̄ construction
//! (a,b,c) ↦ (d,e,f) with (d,g) = F(b,c), (e,f) = F⁻¹(a,g).
//!
//! Domains follow the convention R: J₁×I₁×I₂ → I₁×I₂ and F: I₁×I₂ → J₁×J₂.

pub mod identities;
pub mod limits;
pub mod tropical;

use serde::{Deserialize, Serialize};

use crate::distributions::{log_add_exp, softplus};
use crate::error::{Error, Result};
use crate::transforms::{Interval, PlanarTransform};
use tropical::MinPlus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Temperature {
    Positive,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "snake_case")]
pub enum MapId {
    /// (a,b,c) ↦ ((ac+αb+βab)/c, (ac+αb+βab)/b)
    R {
        alpha: f64,
        beta: f64,
    },
    /// R_(1,−1)∘(Q⁻¹×Id×Id)
    RTilde,
    /// (x,y) ↦ (x(y−α)/(y+βx), y/x)
    F {
        alpha: f64,
        beta: f64,
    },
    /// (x,y) ↦ (x+y, x/y)
    GammaBetaPrime,
    /// (x,y) ↦ ((1+x)/y, (1+x+y)/(xy)), an involution
    BetaPrimeBetaPrime,
    /// (x,y) ↦ (x∧y, x−y)
    ExpAl,
    /// (x,y) ↦ ((0∧x)−y, (0∧x∧y)−x−y), an involution
    AlAl,
    #[serde(rename = "r_zero_01")]
    RZero01,
    #[serde(rename = "r_zero_10")]
    RZero10,
    #[serde(rename = "r_zero_11")]
    RZero11,
    RTildeZero,
    /// (x,y) ↦ (x∨y, y−x)
    #[serde(rename = "f_zero_01")]
    FZero01,
}

/// A map together with its per-coordinate domain and codomain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapId", into = "MapId")]
pub struct PolymerMap {
    pub id: MapId,
    pub temperature: Temperature,
    pub domain: Vec<Interval>,
    pub codomain: Vec<Interval>,
}

impl TryFrom<MapId> for PolymerMap {
    type Error = Error;
    fn try_from(id: MapId) -> Result<Self> {
        PolymerMap::new(id)
    }
}

impl From<PolymerMap> for MapId {
    fn from(m: PolymerMap) -> MapId {
        m.id
    }
}

/// (J₁, I₁, I₂, J₂) for the tabulated (α,β) rows.
fn table_row(alpha: f64, beta: f64) -> Option<[Interval; 4]> {
    let p = Interval::POSITIVE;
    let u = Interval::UNIT;
    let g = Interval::ABOVE_ONE;
    Some(match (alpha, beta) {
        (a, b) if a == 0.0 && b == 1.0 => [p, p, p, p],
        (a, b) if a == 1.0 && b == 0.0 => [p, p, g, p],
        (a, b) if a == -1.0 && b == 1.0 => [g, g, p, p],
        (a, b) if a == 1.0 && b == 1.0 => [p, p, g, p],
        (a, b) if a == 1.0 && b == -1.0 => [u, u, g, g],
        _ => return None,
    })
}

fn check_ab(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha.max(beta) <= 0.0 {
        return Err(Error::InvalidParameter {
            family: "R_(α,β)",
            detail: format!("need finite α, β with max(α,β) > 0, got ({alpha}, {beta})"),
        });
    }
    Ok(())
}

/// ln Σ cᵢ e^{lᵢ}, failing if the sum is not positive.
fn signed_log_sum(terms: &[(f64, f64)]) -> Result<f64> {
    let m = terms.iter().filter(|t| t.0 != 0.0).map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = terms.iter().filter(|t| t.0 != 0.0).map(|&(c, l)| c * (l - m).exp()).sum();
    if s > 0.0 && m.is_finite() {
        Ok(m + s.ln())
    } else {
        Err(Error::Invalid(format!("log-coordinate sum is not positive ({s:e}·e^{m})")))
    }
}

impl PolymerMap {
    pub fn new(id: MapId) -> Result<Self> {
        use Interval as I;
        use Temperature::*;
        let (temperature, domain, codomain) = match id {
            MapId::R { alpha, beta } => {
                check_ab(alpha, beta)?;
                let [j1, i1, i2, _] = match table_row(alpha, beta) {
                    Some(r) => r,
                    None if alpha >= 0.0 && beta >= 0.0 => [I::POSITIVE; 4],
                    None => {
                        return Err(Error::InvalidParameter {
                            family: "R_(α,β)",
                            detail: format!("({alpha}, {beta}) has no declared domain; negative entries need a tabulated row"),
                        })
                    }
                };
                (Positive, vec![j1, i1, i2], vec![i1, i2])
            }
            MapId::F { alpha, beta } => {
                check_ab(alpha, beta)?;
                let [j1, i1, i2, j2] = table_row(alpha, beta).ok_or_else(|| Error::InvalidParameter {
                    family: "F_(α,β)",
                    detail: format!("({alpha}, {beta}) is not one of (0,1), (1,0), (-1,1), (1,1), (1,-1)"),
                })?;
                (Positive, vec![i1, i2], vec![j1, j2])
            }
            MapId::RTilde => (Positive, vec![I::POSITIVE, I::UNIT, I::ABOVE_ONE], vec![I::UNIT, I::ABOVE_ONE]),
            MapId::GammaBetaPrime | MapId::BetaPrimeBetaPrime => (Positive, vec![I::POSITIVE; 2], vec![I::POSITIVE; 2]),
            MapId::ExpAl | MapId::AlAl | MapId::FZero01 => (Zero, vec![I::REAL; 2], vec![I::REAL; 2]),
            MapId::RZero01 => (Zero, vec![I::REAL; 3], vec![I::REAL; 2]),
            MapId::RZero10 | MapId::RZero11 => (Zero, vec![I::REAL, I::REAL, I::NONPOSITIVE], vec![I::REAL, I::NONPOSITIVE]),
            MapId::RTildeZero => (Zero, vec![I::REAL, I::NONNEGATIVE, I::NONPOSITIVE], vec![I::NONNEGATIVE, I::NONPOSITIVE]),
        };
        Ok(Self { id, temperature, domain, codomain })
    }

    pub fn r(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MapId::R { alpha, beta })
    }

    pub fn f(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(MapId::F { alpha, beta })
    }

    /// For ids that always validate.
    pub fn fixed(id: MapId) -> Self {
        Self::new(id).expect("parameter-free map id")
    }

    pub fn name(&self) -> String {
        let ab = |a: f64, b: f64| format!("({a},{b})");
        match self.id {
            MapId::R { alpha, beta } => format!("R_{}", ab(alpha, beta)),
            MapId::F { alpha, beta } => format!("F_{}", ab(alpha, beta)),
            MapId::RTilde => "R~_(1,-1)".into(),
            MapId::GammaBetaPrime => "F_Gam,Be'".into(),
            MapId::BetaPrimeBetaPrime => "F_Be',Be'".into(),
            MapId::ExpAl => "F_E,AL".into(),
            MapId::AlAl => "F_AL,AL".into(),
            MapId::RZero01 => "R0_(0,1)".into(),
            MapId::RZero10 => "R0_(1,0)".into(),
            MapId::RZero11 => "R0_(1,1)".into(),
            MapId::RTildeZero => "R~0_(1,-1)".into(),
            MapId::FZero01 => "F0_(0,1)".into(),
        }
    }

    pub fn arity(&self) -> usize {
        self.domain.len()
    }

    pub fn is_involution(&self) -> bool {
        matches!(self.id, MapId::BetaPrimeBetaPrime | MapId::AlAl)
    }

    fn check(&self, what: &str, intervals: &[Interval], point: &[f64]) -> Result<()> {
        for (i, (iv, &x)) in intervals.iter().zip(point).enumerate() {
            if !iv.contains(x) {
                return Err(Error::domain(format!("{}{what} coordinate {}", self.name(), i + 1), x, iv));
            }
        }
        Ok(())
    }

    fn check_log(&self, what: &str, intervals: &[Interval], point: &[f64]) -> Result<()> {
        for (i, (iv, &l)) in intervals.iter().zip(point).enumerate() {
            if !iv.contains_log(l) {
                return Err(Error::domain(format!("{}{what} log-coordinate {}", self.name(), i + 1), l, iv));
            }
        }
        Ok(())
    }

    fn require(&self, arity: usize, temp: Option<Temperature>) -> Result<()> {
        if self.arity() != arity {
            return Err(Error::Invalid(format!("{} takes {} arguments, not {arity}", self.name(), self.arity())));
        }
        if let Some(t) = temp {
            if t != self.temperature {
                return Err(Error::Invalid(format!("{} is a {:?}-temperature map", self.name(), self.temperature)));
            }
        }
        Ok(())
    }

    pub fn check_domain(&self, point: &[f64]) -> Result<()> {
        self.check("", &self.domain, point)
    }

    pub fn check_codomain(&self, point: &[f64]) -> Result<()> {
        self.check(" image", &self.codomain, point)
    }

    pub fn eval_r(&self, a: f64, b: f64, c: f64) -> Result<(f64, f64)> {
        self.require(3, None)?;
        self.check_domain(&[a, b, c])?;
        Ok(match self.id {
            MapId::R { alpha, beta } => {
                let s = a * c + alpha * b + beta * a * b;
                (s / c, s / b)
            }
            MapId::RTilde => {
                let n = c + a * b;
                let d = 1.0 + a;
                (n / (d * c), n / (d * b))
            }
            _ => return self.eval_r_minplus(a, b, c),
        })
    }

    /// Zero-temperature R over any min-plus number type.
    pub fn eval_r_minplus<T: MinPlus>(&self, a: T, b: T, c: T) -> Result<(T, T)> {
        self.require(3, Some(Temperature::Zero))?;
        self.check_domain(&[a.to_f64(), b.to_f64(), c.to_f64()])?;
        Ok(match self.id {
            MapId::RZero01 => tropical::r_zero_01(a, b, c),
            MapId::RZero10 => tropical::r_zero_10(a, b, c),
            MapId::RZero11 => tropical::r_zero_11(a, b, c),
            MapId::RTildeZero => tropical::r_tilde_zero(a, b, c),
            _ => unreachable!("three-argument zero-temperature maps are listed above"),
        })
    }

    /// R with inputs and outputs as natural logs.
    pub fn eval_r_log(&self, la: f64, lb: f64, lc: f64) -> Result<(f64, f64)> {
        self.require(3, Some(Temperature::Positive))?;
        self.check_log("", &self.domain, &[la, lb, lc])?;
        Ok(match self.id {
            MapId::R { alpha, beta } => {
                let ls = signed_log_sum(&[(1.0, la + lc), (alpha, lb), (beta, la + lb)])?;
                (ls - lc, ls - lb)
            }
            MapId::RTilde => {
                let ln = log_add_exp(lc, la + lb) - softplus(la);
                (ln - lc, ln - lb)
            }
            _ => unreachable!("three-argument positive-temperature maps are listed above"),
        })
    }

    pub fn eval_f(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.require(2, None)?;
        self.check_domain(&[x, y])?;
        Ok(match self.id {
            MapId::F { alpha, beta } => (x * (y - alpha) / (y + beta * x), y / x),
            MapId::GammaBetaPrime => (x + y, x / y),
            MapId::BetaPrimeBetaPrime => ((1.0 + x) / y, (1.0 + x + y) / (x * y)),
            _ => return self.eval_f_minplus(x, y),
        })
    }

    pub fn eval_f_inv(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.require(2, None)?;
        self.check(" inverse", &self.codomain, &[x, y])?;
        Ok(match self.id {
            MapId::F { alpha, beta } => {
                let u = (x * (y + beta) + alpha) / y;
                (u, u * y)
            }
            MapId::GammaBetaPrime => (x * y / (1.0 + y), x / (1.0 + y)),
            MapId::BetaPrimeBetaPrime => ((1.0 + x) / y, (1.0 + x + y) / (x * y)),
            _ => return self.eval_f_inv_minplus(x, y),
        })
    }

    pub fn eval_f_minplus<T: MinPlus>(&self, x: T, y: T) -> Result<(T, T)> {
        self.require(2, Some(Temperature::Zero))?;
        self.check_domain(&[x.to_f64(), y.to_f64()])?;
        Ok(match self.id {
            MapId::ExpAl => tropical::exp_al(x, y),
            MapId::AlAl => tropical::al_al(x, y),
            MapId::FZero01 => tropical::f_zero_01(x, y),
            _ => unreachable!("two-argument zero-temperature maps are listed above"),
        })
    }

    pub fn eval_f_inv_minplus<T: MinPlus>(&self, x: T, y: T) -> Result<(T, T)> {
        self.require(2, Some(Temperature::Zero))?;
        self.check(" inverse", &self.codomain, &[x.to_f64(), y.to_f64()])?;
        Ok(match self.id {
            MapId::ExpAl => tropical::exp_al_inv(x, y),
            MapId::AlAl => tropical::al_al(x, y),
            MapId::FZero01 => tropical::f_zero_01_inv(x, y),
            _ => unreachable!("two-argument zero-temperature maps are listed above"),
        })
    }

    pub fn eval_f_log(&self, lx: f64, ly: f64) -> Result<(f64, f64)> {
        self.require(2, Some(Temperature::Positive))?;
        self.check_log("", &self.domain, &[lx, ly])?;
        Ok(match self.id {
            MapId::F { alpha, beta } => {
                let num = signed_log_sum(&[(1.0, ly), (-alpha, 0.0)])?;
                let den = signed_log_sum(&[(1.0, ly), (beta, lx)])?;
                (lx + num - den, ly - lx)
            }
            MapId::GammaBetaPrime => (log_add_exp(lx, ly), lx - ly),
            MapId::BetaPrimeBetaPrime => (softplus(lx) - ly, log_add_exp(softplus(lx), ly) - lx - ly),
            _ => unreachable!("two-argument positive-temperature maps are listed above"),
        })
    }

    pub fn eval_f_inv_log(&self, lx: f64, ly: f64) -> Result<(f64, f64)> {
        self.require(2, Some(Temperature::Positive))?;
        self.check_log(" inverse", &self.codomain, &[lx, ly])?;
        Ok(match self.id {
            MapId::F { alpha, beta } => {
                let lu = signed_log_sum(&[(1.0, lx + ly), (beta, lx), (alpha, 0.0)])? - ly;
                (lu, lu + ly)
            }
            MapId::GammaBetaPrime => (lx + ly - softplus(ly), lx - softplus(ly)),
            MapId::BetaPrimeBetaPrime => return self.eval_f_log(lx, ly),
            _ => unreachable!("two-argument positive-temperature maps are listed above"),
        })
    }

    /// Evaluates by arity: R for three arguments, F for two.
    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        match *p {
            [a, b, c] => self.eval_r(a, b, c).map(|(u, v)| vec![u, v]),
            [x, y] => self.eval_f(x, y).map(|(u, v)| vec![u, v]),
            _ => Err(Error::Invalid(format!("{} cannot take {} arguments", self.name(), p.len()))),
        }
    }

    /// Edge weights (u, v) of the lattice recursion behind R: Z = u·Z_left + v·Z_below
    /// at positive temperature, Z = min(u + Z_left, v + Z_below) at zero temperature.
    pub fn weights(&self, x: f64) -> Result<(f64, f64)> {
        self.require(3, None)?;
        self.check("", &self.domain[..1], &[x])?;
        Ok(match self.id {
            MapId::R { alpha, beta } => (x, alpha + beta * x),
            MapId::RTilde => (1.0 / (1.0 + x), x / (1.0 + x)),
            _ => return self.weights_minplus(x),
        })
    }

    /// (ln u, ln v) from ln x at positive temperature.
    pub fn log_weights(&self, lx: f64) -> Result<(f64, f64)> {
        self.require(3, Some(Temperature::Positive))?;
        self.check_log("", &self.domain[..1], &[lx])?;
        Ok(match self.id {
            MapId::R { alpha, beta } => (lx, signed_log_sum(&[(alpha, 0.0), (beta, lx)])?),
            MapId::RTilde => (-softplus(lx), lx - softplus(lx)),
            _ => unreachable!("three-argument positive-temperature maps are listed above"),
        })
    }

    pub fn weights_minplus<T: MinPlus>(&self, x: T) -> Result<(T, T)> {
        self.require(3, Some(Temperature::Zero))?;
        self.check("", &self.domain[..1], &[x.to_f64()])?;
        let z = T::zero();
        Ok(match self.id {
            MapId::RZero01 => (x, x),
            MapId::RZero10 => (x, z),
            MapId::RZero11 => (x, x.tmin(z)),
            MapId::RTildeZero => (-x.tmin(z), x.tmax(z)),
            _ => unreachable!("three-argument zero-temperature maps are listed above"),
        })
    }
}

/// A planar bijection with an explicit inverse.
pub trait Bijection: Send + Sync {
    fn name(&self) -> String;
    fn forward(&self, x: f64, y: f64) -> Result<(f64, f64)>;
    fn backward(&self, x: f64, y: f64) -> Result<(f64, f64)>;
}

impl Bijection for PolymerMap {
    fn name(&self) -> String {
        PolymerMap::name(self)
    }
    fn forward(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.eval_f(x, y)
    }
    fn backward(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.eval_f_inv(x, y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Map(PolymerMap),
    Inverse(PolymerMap),
    Transform(PlanarTransform),
}

impl Step {
    fn apply(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        match self {
            Step::Map(m) => m.eval_f(x, y),
            Step::Inverse(m) => m.eval_f_inv(x, y),
            Step::Transform(t) => t.apply(x, y),
        }
    }

    fn inverse(&self) -> Result<Step> {
        Ok(match self {
            Step::Map(m) => Step::Inverse(m.clone()),
            Step::Inverse(m) => Step::Map(m.clone()),
            Step::Transform(t) => Step::Transform(t.inverse().ok_or_else(|| Error::Invalid("transform in chain has no inverse".into()))?),
        })
    }

    fn name(&self) -> String {
        match self {
            Step::Map(m) => m.name(),
            Step::Inverse(m) => format!("{}^-1", m.name()),
            Step::Transform(t) => {
                let mut s = format!("[{}x{}]", chain_name(&t.left), chain_name(&t.right));
                if t.swap_before {
                    s = format!("{s}∘π");
                }
                if t.swap_after {
                    s = format!("π∘{s}");
                }
                s
            }
        }
    }
}

fn chain_name(c: &crate::transforms::Chain) -> String {
    if c.0.is_empty() {
        return "id".into();
    }
    c.0.iter().rev().map(|t| t.name()).collect::<Vec<_>>().join("∘")
}

/// Composition of planar steps, stored in application order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Composite {
    pub steps: Vec<Step>,
}

impl Composite {
    /// Written in composition order: the last step is applied first.
    pub fn circ(steps: Vec<Step>) -> Self {
        let mut steps = steps;
        steps.reverse();
        Self { steps }
    }

    pub fn inverse(&self) -> Result<Composite> {
        let steps = self.steps.iter().rev().map(Step::inverse).collect::<Result<Vec<_>>>()?;
        Ok(Self { steps })
    }
}

impl Bijection for Composite {
    fn name(&self) -> String {
        self.steps.iter().rev().map(Step::name).collect::<Vec<_>>().join("∘")
    }
    fn forward(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.steps.iter().try_fold((x, y), |(x, y), s| s.apply(x, y))
    }
    fn backward(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.steps.iter().rev().try_fold((x, y), |(x, y), s| s.inverse()?.apply(x, y))
    }
}

/// F̄(a,b,c) = (d,e,f) where (d,g) = F(b,c) and (e,f) = F⁻¹(a,g).
pub fn fbar<B: Bijection + ?Sized>(f: &B, a: f64, b: f64, c: f64) -> Result<(f64, f64, f64)> {
    let (d, g) = f.forward(b, c)?;
    let (e, h) = f.backward(a, g).map_err(|_| Error::IntermediateDomain { map: f.name(), x: a, y: g })?;
    Ok((d, e, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use approx::assert_relative_eq;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1.0)
    }

    #[test]
    fn worked_values() {
        assert_eq!(PolymerMap::r(0.0, 1.0).unwrap().eval_r(1.0, 1.0, 1.0).unwrap(), (2.0, 2.0));
        assert_eq!(PolymerMap::fixed(MapId::RZero01).eval_r(1.0, 2.0, 3.0).unwrap(), (0.0, 1.0));
        assert_eq!(PolymerMap::fixed(MapId::RTildeZero).eval_r(1.0, 2.0, -1.0).unwrap(), (0.0, -3.0));
        let bb = PolymerMap::fixed(MapId::BetaPrimeBetaPrime);
        assert_eq!(bb.eval_f(1.0, 1.0).unwrap(), (2.0, 3.0));
        assert_eq!(bb.eval_f(2.0, 3.0).unwrap(), (1.0, 1.0));
        let ea = PolymerMap::fixed(MapId::ExpAl);
        assert_eq!(ea.eval_f(3.0, 1.0).unwrap(), (1.0, 2.0));
        assert_eq!(ea.eval_f_inv(1.0, 2.0).unwrap(), (3.0, 1.0));
        let aa = PolymerMap::fixed(MapId::AlAl);
        assert_eq!(aa.eval_f(1.0, 2.0).unwrap(), (-2.0, -3.0));
        assert_eq!(aa.eval_f(-2.0, -3.0).unwrap(), (1.0, 2.0));
        assert_eq!(PolymerMap::fixed(MapId::GammaBetaPrime).eval_f(2.0, 1.0).unwrap(), (3.0, 2.0));
    }

    #[test]
    fn fbar_reconstructs_r_at_ones() {
        let f = PolymerMap::f(0.0, 1.0).unwrap();
        let (_, e, g) = fbar(&f, 1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(e, 2.0, max_relative = 1e-15);
        assert_relative_eq!(g, 2.0, max_relative = 1e-15);
        assert_eq!(f.eval_f(1.0, 1.0).unwrap(), (0.5, 1.0));
    }

    #[test]
    fn domain_errors_are_distinguished() {
        let r = PolymerMap::r(1.0, -1.0).unwrap();
        assert!(matches!(r.eval_r(0.5, 0.5, 0.5), Err(Error::Domain { .. })));
        let f = PolymerMap::f(1.0, -1.0).unwrap();
        assert!(matches!(fbar(&f, 0.5, 2.0, 3.0), Err(Error::Domain { .. })));
        assert!(matches!(fbar(&f, 2.0, 0.5, 3.0), Err(Error::IntermediateDomain { .. })));
        assert!(fbar(&f, 0.5, 0.5, 3.0).is_ok());
    }

    #[test]
    fn invalid_parameters() {
        assert!(PolymerMap::r(0.0, 0.0).is_err());
        assert!(PolymerMap::r(-1.0, -2.0).is_err());
        assert!(PolymerMap::f(2.0, 3.0).is_err());
        assert!(PolymerMap::r(2.0, 3.0).is_ok());
        assert!(PolymerMap::r(-2.0, 3.0).is_err());
        assert!(PolymerMap::fixed(MapId::RZero10).eval_f(1.0, 1.0).is_err());
    }

    #[test]
    fn images_land_in_codomain() {
        let mut rng = seeded(3);
        let ids = [
            MapId::R { alpha: 0.0, beta: 1.0 },
            MapId::R { alpha: 1.0, beta: 0.0 },
            MapId::R { alpha: -1.0, beta: 1.0 },
            MapId::R { alpha: 1.0, beta: 1.0 },
            MapId::R { alpha: 1.0, beta: -1.0 },
            MapId::R { alpha: 0.5, beta: 2.0 },
            MapId::F { alpha: 0.0, beta: 1.0 },
            MapId::F { alpha: 1.0, beta: 0.0 },
            MapId::F { alpha: -1.0, beta: 1.0 },
            MapId::F { alpha: 1.0, beta: 1.0 },
            MapId::F { alpha: 1.0, beta: -1.0 },
            MapId::RTilde,
            MapId::GammaBetaPrime,
            MapId::BetaPrimeBetaPrime,
            MapId::ExpAl,
            MapId::AlAl,
            MapId::FZero01,
            MapId::RZero01,
            MapId::RZero10,
            MapId::RZero11,
            MapId::RTildeZero,
        ];
        for id in ids {
            let m = PolymerMap::new(id).unwrap();
            for _ in 0..2000 {
                let p: Vec<f64> = m.domain.iter().map(|iv| iv.sample(&mut rng)).collect();
                let out = m.eval(&p).unwrap();
                m.check_codomain(&out).unwrap_or_else(|e| panic!("{} at {p:?}: {e}", m.name()));
            }
        }
    }

    #[test]
    fn log_coordinates_match_plain() {
        let mut rng = seeded(4);
        for id in [
            MapId::R { alpha: 0.0, beta: 1.0 },
            MapId::R { alpha: 1.0, beta: 0.0 },
            MapId::R { alpha: -1.0, beta: 1.0 },
            MapId::R { alpha: 1.0, beta: 1.0 },
            MapId::R { alpha: 1.0, beta: -1.0 },
            MapId::RTilde,
        ] {
            let m = PolymerMap::new(id).unwrap();
            for _ in 0..500 {
                let p: Vec<f64> = m.domain.iter().map(|iv| iv.sample(&mut rng)).collect();
                let (u, v) = m.eval_r(p[0], p[1], p[2]).unwrap();
                let (lu, lv) = m.eval_r_log(p[0].ln(), p[1].ln(), p[2].ln()).unwrap();
                assert!(rel(lu.exp(), u) < 1e-10 && rel(lv.exp(), v) < 1e-10, "{}", m.name());
            }
        }
        for id in [
            MapId::F { alpha: 0.0, beta: 1.0 },
            MapId::F { alpha: 1.0, beta: 0.0 },
            MapId::F { alpha: -1.0, beta: 1.0 },
            MapId::F { alpha: 1.0, beta: 1.0 },
            MapId::F { alpha: 1.0, beta: -1.0 },
            MapId::GammaBetaPrime,
            MapId::BetaPrimeBetaPrime,
        ] {
            let m = PolymerMap::new(id).unwrap();
            for _ in 0..500 {
                let x = m.domain[0].sample(&mut rng);
                let y = m.domain[1].sample(&mut rng);
                let (p, q) = m.eval_f(x, y).unwrap();
                let (lp, lq) = m.eval_f_log(x.ln(), y.ln()).unwrap();
                assert!(rel(lp.exp(), p) < 1e-10 && rel(lq.exp(), q) < 1e-10, "{}", m.name());
                let (lx, ly) = m.eval_f_inv_log(p.ln(), q.ln()).unwrap();
                assert!(rel(lx.exp(), x) < 1e-9 && rel(ly.exp(), y) < 1e-9, "{} inverse", m.name());
            }
        }
    }

    #[test]
    fn weights_reproduce_r() {
        let mut rng = seeded(5);
        for id in [
            MapId::R { alpha: 0.0, beta: 1.0 },
            MapId::R { alpha: 1.0, beta: 0.0 },
            MapId::R { alpha: -1.0, beta: 1.0 },
            MapId::R { alpha: 1.0, beta: -1.0 },
            MapId::RTilde,
            MapId::RZero01,
            MapId::RZero10,
            MapId::RZero11,
            MapId::RTildeZero,
        ] {
            let m = PolymerMap::new(id).unwrap();
            for _ in 0..500 {
                let p: Vec<f64> = m.domain.iter().map(|iv| iv.sample(&mut rng)).collect();
                let (a, b, c) = (p[0], p[1], p[2]);
                let (u, v) = m.weights(a).unwrap();
                // corner Z_{n-1,m-1} = 1 (or 0), Z_{n,m-1} = b·1, Z_{n-1,m} = c·1
                let (uu, vv) = match m.temperature {
                    Temperature::Positive => {
                        let z = u * c + v * b;
                        (z / c, z / b)
                    }
                    Temperature::Zero => {
                        let z = tropical::z_step(u, v, c, b);
                        (z - c, z - b)
                    }
                };
                let (eu, ev) = m.eval_r(a, b, c).unwrap();
                assert!(rel(uu, eu) < 1e-12 && rel(vv, ev) < 1e-12, "{}", m.name());
            }
        }
    }

    #[test]
    fn composite_round_trip_and_json() {
        use crate::transforms::{Chain, ScalarTransform::*};
        let c = Composite::circ(vec![
            Step::Transform(PlanarTransform::product(Chain::of(&[Reciprocal]), Chain::identity())),
            Step::Map(PolymerMap::f(0.0, 1.0).unwrap()),
            Step::Transform(PlanarTransform::product(Chain::of(&[Reciprocal]), Chain::of(&[Reciprocal]))),
        ]);
        let (x, y) = c.forward(2.0, 1.0).unwrap();
        assert_relative_eq!(x, 3.0, max_relative = 1e-15);
        assert_relative_eq!(y, 2.0, max_relative = 1e-15);
        let (p, q) = c.backward(x, y).unwrap();
        assert_relative_eq!(p, 2.0, max_relative = 1e-14);
        assert_relative_eq!(q, 1.0, max_relative = 1e-14);
        let js = serde_json::to_string(&c).unwrap();
        let back: Composite = serde_json::from_str(&js).unwrap();
        assert_eq!(back, c);
        assert!(serde_json::from_str::<PolymerMap>(r#"{"map":"f","alpha":3.0,"beta":3.0}"#).is_err());
    }
}
