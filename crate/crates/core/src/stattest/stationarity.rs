//! Stationarity of product laws: R(μ̃×μ×ν) = μ×ν, or the full-triple form
//! F̄(μ̃×μ×ν) = μ̃×μ×ν.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::balance::{ALPHA, MIN_SAMPLE};
use super::gof::sidak;
use super::product::{product_component_count, product_components, push_forward};
use super::report::{Component, TestReport};
use crate::distributions::laws::*;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::maps::{fbar, MapId, PolymerMap};
use crate::rng::child_seed;

/// Which push-forward is tested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Invariance {
    /// (U*, V*) = R(X, U, V) must have law μ × ν.
    Recursion { map: PolymerMap },
    /// F̄(X, U, V) must have law μ̃ × μ × ν.
    Involution { map: PolymerMap },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityCase {
    pub invariance: Invariance,
    pub mu_tilde: DistributionSpec,
    pub mu: DistributionSpec,
    pub nu: DistributionSpec,
}

impl StationarityCase {
    /// Triple given as (μ̃, μ, ν).
    pub fn recursion(id: MapId, triple: [DistributionSpec; 3]) -> Self {
        let [mu_tilde, mu, nu] = triple;
        Self { invariance: Invariance::Recursion { map: PolymerMap::fixed(id) }, mu_tilde, mu, nu }
    }

    pub fn involution(id: MapId, triple: [DistributionSpec; 3]) -> Self {
        let [mu_tilde, mu, nu] = triple;
        Self { invariance: Invariance::Involution { map: PolymerMap::fixed(id) }, mu_tilde, mu, nu }
    }

    pub fn describe(&self) -> String {
        let (name, m) = match &self.invariance {
            Invariance::Recursion { map } => ("R", map),
            Invariance::Involution { map } => ("F̄ of", map),
        };
        format!("{name} {}: ({}, {}, {})", m.name(), self.mu_tilde.describe(), self.mu.describe(), self.nu.describe())
    }

    fn claimed(&self) -> (Vec<DistributionSpec>, Vec<(usize, usize)>, &'static [&'static str]) {
        match self.invariance {
            Invariance::Recursion { .. } => (vec![self.mu, self.nu], vec![(0, 1)], &["U", "V"]),
            Invariance::Involution { .. } => (vec![self.mu_tilde, self.mu, self.nu], vec![(0, 1), (0, 2), (1, 2)], &["X", "U", "V"]),
        }
    }

    pub fn component_count(&self) -> usize {
        let (c, p, _) = self.claimed();
        product_component_count(&c, &p)
    }

    pub fn components(&self, prefix: &str, n: usize, seed: u64, alpha: f64) -> Result<Vec<Component>> {
        if n < MIN_SAMPLE {
            return Err(Error::InsufficientSample { n, min: MIN_SAMPLE });
        }
        let inputs = [self.mu_tilde, self.mu, self.nu];
        let cols = match &self.invariance {
            Invariance::Recursion { map } => push_forward(&inputs, n, seed, |x| {
                let (u, v) = map.eval_r(x[0], x[1], x[2])?;
                Ok(vec![u, v])
            })?,
            Invariance::Involution { map } => push_forward(&inputs, n, seed, |x| {
                let (d, e, f) = fbar(map, x[0], x[1], x[2])?;
                Ok(vec![d, e, f])
            })?,
        };
        let (claimed, pairs, names) = self.claimed();
        product_components(prefix, names, &cols, &claimed, &pairs, alpha)
    }
}

/// Draws (X, U, V) ~ μ̃×μ×ν, applies `map` and tests the outputs against
/// μ×ν (fit of each coordinate plus independence) at family-wise level 1%.
pub fn verify_stationarity(map: &PolymerMap, triple: [DistributionSpec; 3], n: usize, seed: u64) -> Result<TestReport> {
    let [mu_tilde, mu, nu] = triple;
    let case = StationarityCase { invariance: Invariance::Recursion { map: map.clone() }, mu_tilde, mu, nu };
    let alpha = sidak(ALPHA, case.component_count());
    Ok(TestReport::new("stationarity", n, case.components("", n, seed, alpha)?).with_seed(seed))
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarityEntry {
    pub key: &'static str,
    pub statement: &'static str,
    pub settings: Vec<StationarityCase>,
    pub expect_pass: bool,
}

impl StationarityEntry {
    pub fn run(&self, n: usize, seed: u64) -> Result<TestReport> {
        let k: usize = self.settings.iter().map(StationarityCase::component_count).sum();
        let alpha = sidak(ALPHA, k);
        let mut comps = Vec::new();
        for (i, case) in self.settings.iter().enumerate() {
            comps.extend(case.components(&format!("s{i}."), n, child_seed(seed, i as u64), alpha)?);
        }
        Ok(TestReport::new("stationarity", n, comps).with_case(self.key).with_seed(seed))
    }
}

const RST: [(f64, f64, f64); 3] = [(1.0, 1.0, 1.0), (0.7, 1.8, 2.5), (2.6, 0.6, 0.9)];
const RS_SHIFT: [(f64, f64, f64); 3] = [(1.0, 2.0, 0.0), (0.6, 1.7, -1.3), (2.4, 0.9, 2.1)];
const PQ_GEO: [(f64, f64, i64, f64); 3] = [(0.5, 0.6, 0, 1.0), (0.3, 0.8, -2, 0.5), (0.75, 0.45, 3, 2.0)];
const PQR: [(f64, f64, f64, f64); 3] = [(0.5, 0.6, 0.4, 1.0), (0.3, 0.7, 0.8, 0.5), (0.65, 0.45, 0.25, 2.0)];
/// (γ, λ, β) with γ > λ for the literature parameterizations.
const GLB: [(f64, f64, f64); 3] = [(2.0, 1.0, 1.0), (1.5, 0.4, 2.2), (3.1, 2.3, 0.7)];

type Triple = [DistributionSpec; 3];

fn over<P: Copy>(params: &[P], id: MapId, f: impl Fn(P) -> Triple) -> Vec<StationarityCase> {
    params.iter().map(|&p| StationarityCase::recursion(id, f(p))).collect()
}

fn build() -> Vec<StationarityEntry> {
    use MapId::*;
    let r = |a, b| R { alpha: a, beta: b };
    let e = |key, statement, settings| StationarityEntry { key, statement, settings, expect_pass: true };
    let neg = |key, statement, settings| StationarityEntry { key, statement, settings, expect_pass: false };
    vec![
        e("t42-a", "R_(0,1): (IG(ρ+σ,τ), IG(ρ,τ), IG(σ,τ))", over(&RST, r(0.0, 1.0), |(r, s, t)| [ig(r + s, t), ig(r, t), ig(s, t)])),
        e(
            "t42-a-fbar",
            "F̄ of F_(0,1) leaves IG(ρ+σ,τ) × IG(ρ,τ) × IG(σ,τ) invariant",
            RST.iter()
                .map(|&(r, s, t)| StationarityCase::involution(MapId::F { alpha: 0.0, beta: 1.0 }, [ig(r + s, t), ig(r, t), ig(s, t)]))
                .collect(),
        ),
        e("t42-b", "R_(1,0): (Gam(σ,τ), Gam(ρ+σ,τ), IB(ρ,σ))", over(&RST, r(1.0, 0.0), |(r, s, t)| [gam(s, t), gam(r + s, t), ib(r, s)])),
        e(
            "t42-ci",
            "R_(-1,1): (IB(σ+τ,ρ), IB(σ,ρ), Be'(ρ+σ,τ))",
            over(&RST, r(-1.0, 1.0), |(r, s, t)| [ib(s + t, r), ib(s, r), beprime(r + s, t)]),
        ),
        e(
            "t42-cii",
            "R_(1,1): (Be'(ρ,σ+τ), Be'(ρ+σ,τ), IB(σ,ρ))",
            over(&RST, r(1.0, 1.0), |(r, s, t)| [beprime(r, s + t), beprime(r + s, t), ib(s, r)]),
        ),
        e("t42-d", "R_(1,-1): (Be(σ,τ), Be(ρ+σ,τ), IB(ρ,σ))", over(&RST, r(1.0, -1.0), |(r, s, t)| [be(s, t), be(r + s, t), ib(r, s)])),
        e("lit-ig", "R_(0,1): (IG(γ,β), IG(γ-λ,β), IG(λ,β))", over(&GLB, r(0.0, 1.0), |(g, l, b)| [ig(g, b), ig(g - l, b), ig(l, b)])),
        e("lit-gam", "R_(1,0): (Gam(γ,β), Gam(γ+λ,β), IB(λ,γ))", over(&GLB, r(1.0, 0.0), |(g, l, b)| [gam(g, b), gam(g + l, b), ib(l, g)])),
        e(
            "lit-ib-m11",
            "R_(-1,1): (IB(γ,β), IB(γ-λ,β), Be'(β+γ-λ,λ))",
            over(&GLB, r(-1.0, 1.0), |(g, l, b)| [ib(g, b), ib(g - l, b), beprime(b + g - l, l)]),
        ),
        e(
            "lit-ib-11",
            "R_(1,1): (Be'(β,γ), Be'(β+λ,γ-λ), IB(λ,β))",
            over(&GLB, r(1.0, 1.0), |(g, l, b)| [beprime(b, g), beprime(b + l, g - l), ib(l, b)]),
        ),
        e("lit-beta", "R_(1,-1): (Be(γ,β), Be(γ+λ,β), IB(λ,γ))", over(&GLB, r(1.0, -1.0), |(g, l, b)| [be(g, b), be(g + l, b), ib(l, g)])),
        e(
            "t45-a-cont",
            "R0_(0,1): (-sExp(ρ+σ,τ), -sExp(ρ,τ), -sExp(σ,τ))",
            over(&RS_SHIFT, RZero01, |(r, s, t)| [sexp(r + s, t).negated(), sexp(r, t).negated(), sexp(s, t).negated()]),
        ),
        e(
            "t45-a-disc",
            "R0_(0,1): (-ssGeo(pq,M,m), -ssGeo(p,M,m), -ssGeo(q,M,m))",
            over(&PQ_GEO, RZero01, |(p, q, k, m)| [ssgeo(p * q, k, m).negated(), ssgeo(p, k, m).negated(), ssgeo(q, k, m).negated()]),
        ),
        e(
            "t45-b-cont",
            "R0_(1,0): (sExp(σ,τ), sExp(ρ+σ,τ), AL(σ,ρ)∧0)",
            over(&RS_SHIFT, RZero10, |(r, s, t)| [sexp(s, t), sexp(r + s, t), al(s, r).min_zero()]),
        ),
        e(
            "t45-b-disc",
            "R0_(1,0): (ssGeo(q,M,m), ssGeo(pq,M,m), sdAL(q,p,m)∧0)",
            over(&PQ_GEO, RZero10, |(p, q, k, m)| [ssgeo(q, k, m), ssgeo(p * q, k, m), sdal(q, p, m).min_zero()]),
        ),
        e(
            "t45-c-cont",
            "R0_(1,1): (AL(ρ,σ+τ), AL(ρ+σ,τ), AL(ρ,σ)∧0)",
            over(&RST, RZero11, |(r, s, t)| [al(r, s + t), al(r + s, t), al(r, s).min_zero()]),
        ),
        e(
            "t45-c-disc",
            "R0_(1,1): (sdAL(p,qr,m), sdAL(pq,r,m), sdAL(p,q,m)∧0)",
            over(&PQR, RZero11, |(p, q, r, m)| [sdal(p, q * r, m), sdal(p * q, r, m), sdal(p, q, m).min_zero()]),
        ),
        e(
            "t45-d-cont",
            "R~0_(1,-1): (AL(τ,σ), AL(ρ+σ,τ)∨0, AL(σ,ρ)∧0)",
            over(&RST, RTildeZero, |(r, s, t)| [al(t, s), al(r + s, t).max_zero(), al(s, r).min_zero()]),
        ),
        e(
            "t45-d-disc",
            "R~0_(1,-1): (sdAL(r,q,m), sdAL(pq,r,m)∨0, sdAL(q,p,m)∧0)",
            over(&PQR, RTildeZero, |(p, q, r, m)| [sdal(r, q, m), sdal(p * q, r, m).max_zero(), sdal(q, p, m).min_zero()]),
        ),
        e(
            "trem-a",
            "R0_(0,1): (-Exp(γ), -Exp(γ-λ), -Exp(λ))",
            over(&GLB, RZero01, |(g, l, _)| [exp(g).negated(), exp(g - l).negated(), exp(l).negated()]),
        ),
        e("trem-b", "R0_(1,0): (Exp(β), Exp(β+λ), AL(β,λ)∧0)", over(&GLB, RZero10, |(_, l, b)| [exp(b), exp(b + l), al(b, l).min_zero()])),
        e(
            "trem-c",
            "R0_(1,1): (AL(β,γ), AL(β+λ,γ-λ), AL(β,λ)∧0)",
            over(&GLB, RZero11, |(g, l, b)| [al(b, g), al(b + l, g - l), al(b, l).min_zero()]),
        ),
        e(
            "point-r01-fixed",
            "R_(0,1): (δ_{k/2}, δ_k, δ_k) is a fixed point",
            over(&[1.0, 2.0, 0.3], r(0.0, 1.0), |k| [point(k / 2.0), point(k), point(k)]),
        ),
        neg(
            "point-r01",
            "R_(0,1): (δ_k, δ_k, δ_k) is not stationary",
            over(&[1.0, 2.0, 0.3], r(0.0, 1.0), |k| [point(k), point(k), point(k)]),
        ),
        neg(
            "t45-d-neg",
            "R~0_(1,-1): (AL(τ,σ), AL(ρ+σ,τ)∨0, AL(ρ,σ)∧0) with ρ≠σ is not stationary",
            vec![StationarityCase::recursion(RTildeZero, [al(1.5, 3.0), al(4.0, 1.5).max_zero(), al(1.0, 3.0).min_zero()])],
        ),
    ]
}

pub fn registry() -> &'static [StationarityEntry] {
    static R: OnceLock<Vec<StationarityEntry>> = OnceLock::new();
    R.get_or_init(build)
}

pub fn keys() -> Vec<&'static str> {
    registry().iter().map(|e| e.key).collect()
}

pub fn get(key: &str) -> Result<&'static StationarityEntry> {
    registry().iter().find(|e| e.key == key).ok_or_else(|| Error::unknown_key(key, keys()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inputs_lie_in_the_domain() {
        for e in registry() {
            for c in &e.settings {
                let map = match &c.invariance {
                    Invariance::Recursion { map } => map,
                    Invariance::Involution { map } => map,
                };
                let doms = match c.invariance {
                    Invariance::Recursion { .. } => map.domain.clone(),
                    Invariance::Involution { .. } => vec![map.codomain[0], map.domain[0], map.domain[1]],
                };
                for (spec, d) in [c.mu_tilde, c.mu, c.nu].iter().zip(&doms) {
                    let (lo, hi) = spec.support();
                    assert!(d.lo <= lo && hi <= d.hi, "{}: {}", e.key, c.describe());
                }
            }
        }
    }

    #[test]
    fn zero_temperature_example_passes() {
        let m = PolymerMap::fixed(MapId::RZero01);
        let t = [sexp(3.0, 0.5).negated(), sexp(1.0, 0.5).negated(), sexp(2.0, 0.5).negated()];
        assert!(verify_stationarity(&m, t, 20_000, 4).unwrap().passed());
    }

    #[test]
    fn point_masses() {
        let m = PolymerMap::fixed(MapId::R { alpha: 0.0, beta: 1.0 });
        assert!(verify_stationarity(&m, [point(0.5), point(1.0), point(1.0)], 10_000, 1).unwrap().passed());
        assert!(!verify_stationarity(&m, [point(1.0), point(1.0), point(1.0)], 10_000, 1).unwrap().passed());
    }

    #[test]
    fn keys_are_unique_and_named_cases_exist() {
        let mut k = keys();
        k.sort();
        k.dedup();
        assert_eq!(k.len(), registry().len());
        for key in ["t45-d-cont", "t45-d-disc", "t42-a-fbar", "trem-c"] {
            assert!(get(key).is_ok());
        }
    }
}
