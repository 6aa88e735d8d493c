//! Detailed balance: F(μ×ν) = μ̃×ν̃ for a planar bijection F.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::gof::sidak;
use super::product::{product_component_count, product_components, push_forward};
use super::report::{Component, TestReport};
use crate::distributions::laws::*;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::maps::{MapId, PolymerMap};
use crate::rng::child_seed;

pub const MIN_SAMPLE: usize = 10_000;
pub const ALPHA: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailedBalanceCase {
    pub map: PolymerMap,
    pub mu: DistributionSpec,
    pub nu: DistributionSpec,
    pub mu_tilde: DistributionSpec,
    pub nu_tilde: DistributionSpec,
}

impl DetailedBalanceCase {
    pub fn new(id: MapId, laws: [DistributionSpec; 4]) -> Self {
        let [mu, nu, mu_tilde, nu_tilde] = laws;
        Self { map: PolymerMap::fixed(id), mu, nu, mu_tilde, nu_tilde }
    }

    pub fn describe(&self) -> String {
        format!(
            "{}: {} × {} -> {} × {}",
            self.map.name(),
            self.mu.describe(),
            self.nu.describe(),
            self.mu_tilde.describe(),
            self.nu_tilde.describe()
        )
    }

    fn claimed(&self) -> [DistributionSpec; 2] {
        [self.mu_tilde, self.nu_tilde]
    }

    pub fn component_count(&self) -> usize {
        product_component_count(&self.claimed(), &[(0, 1)])
    }

    /// Components at per-component level `alpha`, names prefixed by `prefix`.
    pub fn components(&self, prefix: &str, n: usize, seed: u64, alpha: f64) -> Result<Vec<Component>> {
        if n < MIN_SAMPLE {
            return Err(Error::InsufficientSample { n, min: MIN_SAMPLE });
        }
        let m = &self.map;
        let cols = push_forward(&[self.mu, self.nu], n, seed, |x| {
            let (u, v) = m.eval_f(x[0], x[1])?;
            Ok(vec![u, v])
        })?;
        product_components(prefix, &["U", "V"], &cols, &self.claimed(), &[(0, 1)], alpha)
    }
}

/// Draws (X,Y) ~ μ×ν, sets (U,V) = F(X,Y) and tests U ~ μ̃, V ~ ν̃ and U ⊥ V
/// with family-wise level 1%.
pub fn verify_detailed_balance(case: &DetailedBalanceCase, n: usize, seed: u64) -> Result<TestReport> {
    let alpha = sidak(ALPHA, case.component_count());
    let comps = case.components("", n, seed, alpha)?;
    Ok(TestReport::new("detailed_balance", n, comps).with_seed(seed))
}

/// A registry entry: one claim checked at several parameter settings.
#[derive(Debug, Clone, Serialize)]
pub struct BalanceEntry {
    pub key: &'static str,
    pub statement: &'static str,
    pub settings: Vec<DetailedBalanceCase>,
    /// Negative controls are expected to fail.
    pub expect_pass: bool,
}

impl BalanceEntry {
    /// All settings in one report, family-wise level 1% over every component.
    pub fn run(&self, n: usize, seed: u64) -> Result<TestReport> {
        let k: usize = self.settings.iter().map(DetailedBalanceCase::component_count).sum();
        let alpha = sidak(ALPHA, k);
        let mut comps = Vec::new();
        for (i, case) in self.settings.iter().enumerate() {
            comps.extend(case.components(&format!("s{i}."), n, child_seed(seed, i as u64), alpha)?);
        }
        Ok(TestReport::new("detailed_balance", n, comps).with_case(self.key).with_seed(seed))
    }
}

/// (ρ, σ, τ) settings for the continuous families.
const RST: [(f64, f64, f64); 3] = [(2.0, 3.0, 1.0), (0.7, 1.8, 2.5), (4.2, 0.6, 0.9)];
/// (ρ, σ, τ) with τ a real shift.
const RS_SHIFT: [(f64, f64, f64); 3] = [(1.0, 2.0, 0.0), (0.6, 1.7, -1.3), (2.4, 0.9, 2.1)];
/// (p, q, M, m) for shifted geometric laws.
const PQ_GEO: [(f64, f64, i64, f64); 3] = [(0.5, 0.6, 0, 1.0), (0.3, 0.8, -2, 0.5), (0.75, 0.45, 3, 2.0)];
/// (p, q, r, m) for discrete asymmetric Laplace laws.
const PQR: [(f64, f64, f64, f64); 3] = [(0.5, 0.6, 0.4, 1.0), (0.3, 0.7, 0.8, 0.5), (0.65, 0.45, 0.25, 2.0)];

fn rst(id: MapId, f: impl Fn(f64, f64, f64) -> [DistributionSpec; 4]) -> Vec<DetailedBalanceCase> {
    RST.iter().map(|&(r, s, t)| DetailedBalanceCase::new(id, f(r, s, t))).collect()
}

fn build() -> Vec<BalanceEntry> {
    let f = |a, b| MapId::F { alpha: a, beta: b };
    let entry = |key, statement, settings| BalanceEntry { key, statement, settings, expect_pass: true };
    vec![
        entry(
            "gb-a",
            "F_Gam,Be'(Gam(ρ,τ) × Gam(σ,τ)) = Gam(ρ+σ,τ) × Be'(ρ,σ)",
            rst(MapId::GammaBetaPrime, |r, s, t| [gam(r, t), gam(s, t), gam(r + s, t), beprime(r, s)]),
        ),
        entry(
            "gb-b",
            "F_Be',Be'(Be'(ρ,σ) × Be'(ρ+σ,τ)) = Be'(τ,σ) × Be'(σ+τ,ρ)",
            rst(MapId::BetaPrimeBetaPrime, |r, s, t| [beprime(r, s), beprime(r + s, t), beprime(t, s), beprime(s + t, r)]),
        ),
        entry(
            "t42-a",
            "F_(0,1)(IG(ρ,τ) × IG(σ,τ)) = IG(ρ+σ,τ) × Be'(ρ,σ)",
            rst(f(0.0, 1.0), |r, s, t| [ig(r, t), ig(s, t), ig(r + s, t), beprime(r, s)]),
        ),
        entry(
            "t42-b",
            "F_(1,0)(Gam(ρ+σ,τ) × IB(ρ,σ)) = Gam(σ,τ) × IG(ρ,τ)",
            rst(f(1.0, 0.0), |r, s, t| [gam(r + s, t), ib(r, s), gam(s, t), ig(r, t)]),
        ),
        entry(
            "t42-ci",
            "F_(-1,1)(IB(σ,ρ) × Be'(ρ+σ,τ)) = IB(σ+τ,ρ) × Be'(σ,τ)",
            rst(f(-1.0, 1.0), |r, s, t| [ib(s, r), beprime(r + s, t), ib(s + t, r), beprime(s, t)]),
        ),
        entry(
            "t42-cii",
            "F_(1,1)(Be'(ρ+σ,τ) × IB(σ,ρ)) = Be'(ρ,σ+τ) × Be'(τ,σ)",
            rst(f(1.0, 1.0), |r, s, t| [beprime(r + s, t), ib(s, r), beprime(r, s + t), beprime(t, s)]),
        ),
        entry(
            "t42-d",
            "F_(1,-1)(Be(ρ+σ,τ) × IB(ρ,σ)) = Be(σ,τ) × IB(ρ,σ+τ)",
            rst(f(1.0, -1.0), |r, s, t| [be(r + s, t), ib(r, s), be(s, t), ib(r, s + t)]),
        ),
        entry(
            "gbz-a-cont",
            "F_E,AL(sExp(ρ,τ) × sExp(σ,τ)) = sExp(ρ+σ,τ) × AL(ρ,σ)",
            RS_SHIFT
                .iter()
                .map(|&(r, s, t)| DetailedBalanceCase::new(MapId::ExpAl, [sexp(r, t), sexp(s, t), sexp(r + s, t), al(r, s)]))
                .collect(),
        ),
        entry(
            "gbz-a-disc",
            "F_E,AL(ssGeo(p,M,m) × ssGeo(q,M,m)) = ssGeo(pq,M,m) × sdAL(p,q,m)",
            PQ_GEO
                .iter()
                .map(|&(p, q, k, m)| {
                    DetailedBalanceCase::new(MapId::ExpAl, [ssgeo(p, k, m), ssgeo(q, k, m), ssgeo(p * q, k, m), sdal(p, q, m)])
                })
                .collect(),
        ),
        entry(
            "gbz-b-cont",
            "F_AL,AL(AL(ρ,σ) × AL(ρ+σ,τ)) = AL(τ,σ) × AL(σ+τ,ρ)",
            rst(MapId::AlAl, |r, s, t| [al(r, s), al(r + s, t), al(t, s), al(s + t, r)]),
        ),
        entry(
            "gbz-b-disc",
            "F_AL,AL(sdAL(p,q,m) × sdAL(pq,r,m)) = sdAL(r,q,m) × sdAL(qr,p,m)",
            PQR.iter()
                .map(|&(p, q, r, m)| {
                    DetailedBalanceCase::new(MapId::AlAl, [sdal(p, q, m), sdal(p * q, r, m), sdal(r, q, m), sdal(q * r, p, m)])
                })
                .collect(),
        ),
        BalanceEntry {
            key: "gb-a-neg",
            statement: "F_Gam,Be'(Gam(2,1) × Gam(3,2)): mismatched rates break independence",
            settings: vec![DetailedBalanceCase::new(
                MapId::GammaBetaPrime,
                [gam(2.0, 1.0), gam(3.0, 2.0), gam(5.0, 1.0), beprime(2.0, 3.0)],
            )],
            expect_pass: false,
        },
    ]
}

pub fn registry() -> &'static [BalanceEntry] {
    static R: OnceLock<Vec<BalanceEntry>> = OnceLock::new();
    R.get_or_init(build)
}

pub fn keys() -> Vec<&'static str> {
    registry().iter().map(|e| e.key).collect()
}

pub fn get(key: &str) -> Result<&'static BalanceEntry> {
    registry().iter().find(|e| e.key == key).ok_or_else(|| Error::unknown_key(key, keys()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_supports(case: &DetailedBalanceCase) {
        for (spec, dom) in [case.mu, case.nu].iter().zip(&case.map.domain) {
            let (lo, hi) = spec.support();
            assert!(dom.lo <= lo && hi <= dom.hi, "{}", case.describe());
        }
    }

    #[test]
    fn registry_inputs_lie_in_the_domain() {
        for e in registry() {
            for c in &e.settings {
                check_supports(c);
            }
        }
    }

    #[test]
    fn worked_example_passes() {
        let c = DetailedBalanceCase::new(MapId::GammaBetaPrime, [gam(2.0, 1.0), gam(3.0, 1.0), gam(5.0, 1.0), beprime(2.0, 3.0)]);
        assert!(verify_detailed_balance(&c, 20_000, 1).unwrap().passed());
    }

    #[test]
    fn small_samples_are_rejected() {
        let c = &get("gb-a").unwrap().settings[0];
        assert!(matches!(verify_detailed_balance(c, 100, 1), Err(Error::InsufficientSample { .. })));
    }

    #[test]
    fn wrong_output_law_fails() {
        let c = DetailedBalanceCase::new(MapId::ExpAl, [sexp(1.0, 0.0), sexp(2.0, 0.0), sexp(3.0, 0.0), al(2.0, 1.0)]);
        assert!(!verify_detailed_balance(&c, 20_000, 1).unwrap().passed());
    }

    #[test]
    fn unknown_key_suggests() {
        match get("gb-c") {
            Err(Error::UnknownKey { suggestions, .. }) => assert!(suggestions.iter().any(|s| s.starts_with("gb-"))),
            _ => panic!(),
        }
    }
}
