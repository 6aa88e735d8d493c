//! Limit probes: a one-parameter family of composed maps is evaluated on a
//! fixed grid along a schedule, and its sup-distance to the limiting map must
//! shrink at the expected rate.
//!
//! Two rules are supported. For scaling limits in δ the error is first order,
//! so consecutive errors must scale like the schedule (ratio within 10%) and
//! the last error is bounded by C·δ_min. For zero-temperature limits in ε the
//! family is S_ε⁻¹∘F∘S_ε in log coordinates; each soft-min deviates from the
//! min by at most ε·ln(#terms), so the error is bounded by 2ε·(#mins) once grid
//! points within 0.1 of a kink are dropped.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use super::identities::{apply3, map, pair, pm, prod, swap, PointMap};
use super::tropical::Gapped;
use super::{Bijection, Composite, MapId, PolymerMap};
use crate::error::{Error, Result};
use crate::stattest::report::{Component, TestReport};
use crate::transforms::{Chain, ScalarTransform};

pub type Family = Box<dyn Fn(f64, &[f64]) -> Result<Vec<f64>> + Send + Sync>;

/// Grid points closer than this to a kink of the target are excluded.
pub const KINK_GAP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ProbeRule {
    /// First-order rate in δ: final error ≤ coefficient·δ_min.
    Delta { coefficient: f64 },
    /// Zero-temperature limit in ε: error ≤ 2ε·mins at every step.
    Epsilon { mins: usize },
}

pub struct LimitProbe {
    pub key: &'static str,
    pub statement: String,
    pub rule: ProbeRule,
    pub schedule: Vec<f64>,
    pub grid: Vec<Vec<f64>>,
    family: Family,
    target: PointMap,
}

impl LimitProbe {
    pub fn run(&self) -> Result<TestReport> {
        self.run_with(&self.schedule)
    }

    pub fn run_with(&self, schedule: &[f64]) -> Result<TestReport> {
        Ok(limit_probe(&self.family, &self.target, &self.grid, schedule, self.rule)?.with_case(self.key))
    }

    pub fn family(&self, t: f64, p: &[f64]) -> Result<Vec<f64>> {
        (self.family)(t, p)
    }

    pub fn target(&self, p: &[f64]) -> Result<Vec<f64>> {
        (self.target)(p)
    }
}

/// Sup-error of `family(t)` against `target` over `grid` for each t in `schedule`.
pub fn sup_errors<F, T>(family: &F, target: &T, grid: &[Vec<f64>], schedule: &[f64]) -> Result<Vec<(f64, usize)>>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>> + Sync + ?Sized,
    T: Fn(&[f64]) -> Result<Vec<f64>> + Sync + ?Sized,
{
    let targets = grid.par_iter().map(|p| target(p)).collect::<Result<Vec<_>>>()?;
    schedule
        .iter()
        .map(|&t| {
            let errs = grid
                .par_iter()
                .zip(&targets)
                .map(|(p, want)| {
                    let got = family(t, p)?;
                    Ok(got.iter().zip(want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(errs.iter().enumerate().fold((0.0, 0), |acc, (i, &e)| {
                if e > acc.0 || e.is_nan() {
                    (if e.is_nan() { f64::INFINITY } else { e }, i)
                } else {
                    acc
                }
            }))
        })
        .collect()
}

pub fn limit_probe<F, T>(family: &F, target: &T, grid: &[Vec<f64>], schedule: &[f64], rule: ProbeRule) -> Result<TestReport>
where
    F: Fn(f64, &[f64]) -> Result<Vec<f64>> + Sync + ?Sized,
    T: Fn(&[f64]) -> Result<Vec<f64>> + Sync + ?Sized,
{
    if schedule.len() < 3 {
        return Err(Error::ScheduleTooShort { len: schedule.len() });
    }
    if grid.is_empty() {
        return Err(Error::Invalid("empty probe grid".into()));
    }
    if schedule.windows(2).any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less) || w[1] <= 0.0) {
        return Err(Error::Invalid("schedule must be positive and strictly decreasing".into()));
    }
    let errs = sup_errors(family, target, grid, schedule)?;
    let mut comps = Vec::new();
    for (k, (&t, &(e, i))) in schedule.iter().zip(&errs).enumerate() {
        let bound = match rule {
            ProbeRule::Epsilon { mins } => 2.0 * t * mins as f64,
            ProbeRule::Delta { coefficient } if k + 1 == schedule.len() => coefficient * t,
            ProbeRule::Delta { .. } => f64::INFINITY,
        };
        comps.push(Component::at_most(format!("sup_error[{t:e}]"), e, bound).with_parameter(t).with_note(format!("at {:?}", grid[i])));
    }
    for k in 1..errs.len() {
        let (prev, (e, i)) = (errs[k - 1].0, errs[k]);
        comps.push(Component::at_most(format!("monotone[{}]", k), e - prev, 0.0).with_note(format!("offending point {:?}", grid[i])));
        if let ProbeRule::Delta { .. } = rule {
            let expected = schedule[k - 1] / schedule[k];
            let ratio = prev / e;
            comps.push(Component::at_most(format!("rate[{}]", k), (ratio / expected - 1.0).abs(), 0.1).with_parameter(ratio));
        }
    }
    Ok(TestReport::new("limit_probe", grid.len(), comps))
}

/// Cartesian grid with `k` evenly spaced points per axis.
pub fn grid(axes: &[(f64, f64)], k: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi) in axes {
        let pts: Vec<f64> = (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect();
        out = out.into_iter().flat_map(|p| pts.iter().map(move |&x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

/// Smallest tie gap of a zero-temperature map at `p`.
pub fn kink_gap(m: &PolymerMap, p: &[f64], inverse: bool) -> Result<f64> {
    let g: Vec<Gapped> = p.iter().map(|&x| Gapped::exact(x)).collect();
    let (u, v) = match (g.len(), inverse) {
        (3, _) => m.eval_r_minplus(g[0], g[1], g[2])?,
        (2, false) => m.eval_f_minplus(g[0], g[1])?,
        (2, true) => m.eval_f_inv_minplus(g[0], g[1])?,
        _ => return Err(Error::Invalid("kink gap needs two or three coordinates".into())),
    };
    Ok(u.gap.min(v.gap))
}

/// S_ε⁻¹∘m∘S_ε evaluated in log coordinates.
pub fn conjugated(m: &PolymerMap, eps: f64, p: &[f64], inverse: bool) -> Result<Vec<f64>> {
    let l: Vec<f64> = p.iter().map(|x| -x / eps).collect();
    let (u, v) = match (l.len(), inverse) {
        (3, _) => m.eval_r_log(l[0], l[1], l[2])?,
        (2, false) => m.eval_f_log(l[0], l[1])?,
        (2, true) => m.eval_f_inv_log(l[0], l[1])?,
        _ => return Err(Error::Invalid("conjugation needs two or three coordinates".into())),
    };
    Ok(vec![-eps * u, -eps * v])
}

fn zero_probe(key: &'static str, positive: MapId, zero: MapId, inverse: bool, mins: usize, axes: &[(f64, f64)]) -> LimitProbe {
    let (pos, zer) = (pm(positive), pm(zero));
    let g: Vec<Vec<f64>> = grid(axes, 13)
        .into_iter()
        .filter(|p| zer.check_domain(p).is_ok() && kink_gap(&zer, p, inverse).is_ok_and(|d| d >= KINK_GAP))
        .collect();
    let inv = if inverse { "^-1" } else { "" };
    let statement = format!("S_ε⁻¹∘{}{inv}∘S_ε → {}{inv}", pos.name(), zer.name());
    let family: Family = Box::new(move |eps, p| conjugated(&pos, eps, p, inverse));
    let target: PointMap = Box::new(move |p| match (p.len(), inverse) {
        (3, _) => zer.eval_r(p[0], p[1], p[2]).map(pair),
        (_, false) => zer.eval_f(p[0], p[1]).map(pair),
        (_, true) => zer.eval_f_inv(p[0], p[1]).map(pair),
    });
    LimitProbe { key, statement, rule: ProbeRule::Epsilon { mins }, schedule: vec![1e-1, 1e-2, 1e-3], grid: g, family, target }
}

fn scale(k: f64) -> ScalarTransform {
    ScalarTransform::scale(k)
}

fn s(k: f64) -> Chain {
    Chain::of(&[scale(k)])
}

/// (δ Id × Id)∘F_(-1,1)∘(δ⁻¹Id × δ⁻¹Id) → F_(0,1)
pub fn beta_prime_to_gamma_chain(delta: f64) -> Composite {
    Composite::circ(vec![
        prod(&[scale(delta)], &[]),
        map(MapId::F { alpha: -1.0, beta: 1.0 }),
        prod(&[scale(1.0 / delta)], &[scale(1.0 / delta)]),
    ])
}

/// (δ⁻¹Id × δ Id)∘F_(1,1)∘(δ Id × Id) → F_(1,0)
pub fn one_one_to_one_zero_chain(delta: f64) -> Composite {
    Composite::circ(vec![prod(&[scale(1.0 / delta)], &[scale(delta)]), map(MapId::F { alpha: 1.0, beta: 1.0 }), prod(&[scale(delta)], &[])])
}

/// π∘(δI × δ⁻¹I)∘F_(1,-1)∘(δ Id × I∘J∘I) → F_(1,0)
pub fn beta_to_inverse_gamma_chain(delta: f64) -> Composite {
    use ScalarTransform::*;
    Composite::circ(vec![
        swap(),
        prod(&[scale(delta), Reciprocal], &[scale(1.0 / delta), Reciprocal]),
        map(MapId::F { alpha: 1.0, beta: -1.0 }),
        prod(&[scale(delta)], &[Reciprocal, J, Reciprocal]),
    ])
}

/// π∘(I∘Q × δ I∘Q∘I)∘F_(1,-1)∘((1 − δI) × (1 + δI))∘π → F_(0,1)
pub fn beta_second_order_chain(delta: f64) -> Composite {
    use ScalarTransform::*;
    Composite::circ(vec![
        swap(),
        prod(&[Reciprocal, Q], &[scale(delta), Reciprocal, Q, Reciprocal]),
        map(MapId::F { alpha: 1.0, beta: -1.0 }),
        prod(&[ScalarTransform::Affine { k: -delta, h: 1.0 }, Reciprocal], &[ScalarTransform::Affine { k: delta, h: 1.0 }, Reciprocal]),
        swap(),
    ])
}

fn planar_probe(
    key: &'static str,
    statement: &str,
    chain: fn(f64) -> Composite,
    target: MapId,
    inverse: bool,
    coefficient: f64,
    axes: &[(f64, f64)],
) -> LimitProbe {
    let t = pm(target);
    let family: Family = Box::new(move |d, p| chain(d).forward(p[0], p[1]).map(pair));
    let target: PointMap = Box::new(move |p| if inverse { t.eval_f_inv(p[0], p[1]) } else { t.eval_f(p[0], p[1]) }.map(pair));
    LimitProbe {
        key,
        statement: statement.into(),
        rule: ProbeRule::Delta { coefficient },
        schedule: DELTA_SCHEDULE.to_vec(),
        grid: grid(axes, 10),
        family,
        target,
    }
}

/// (outer(δ))∘R∘(inner(δ)) → target on triples.
fn triple_probe(
    key: &'static str,
    statement: &str,
    r: MapId,
    chains: fn(f64) -> ([Chain; 3], [Chain; 2]),
    target: MapId,
    coefficient: f64,
    axes: &[(f64, f64)],
) -> LimitProbe {
    let (r, t) = (pm(r), pm(target));
    let family: Family = Box::new(move |d, p| {
        let (inner, outer) = chains(d);
        let (a, b, c) = apply3(&inner, p)?;
        let (u, v) = r.eval_r(a, b, c)?;
        Ok(vec![outer[0].apply(u)?, outer[1].apply(v)?])
    });
    LimitProbe {
        key,
        statement: statement.into(),
        rule: ProbeRule::Delta { coefficient },
        schedule: DELTA_SCHEDULE.to_vec(),
        grid: grid(axes, 10),
        family,
        target: Box::new(move |p| t.eval(p)),
    }
}

pub const DELTA_SCHEDULE: [f64; 4] = [0.02, 0.01, 0.005, 0.0025];

fn build() -> Vec<LimitProbe> {
    use super::identities::{ptmap_backward_chain, ptmap_forward_chain};
    let box_ = [(0.5, 3.0), (0.5, 3.0)];
    let tall = [(0.5, 3.0), (1.5, 4.0)];
    let cube = [(0.5, 3.0), (0.5, 3.0), (0.5, 3.0)];
    let cube_tall = [(0.5, 3.0), (0.5, 3.0), (1.5, 4.0)];
    let sym = (-3.0, 3.0);
    let below = (-3.0, -0.5);
    let above = (0.5, 3.0);
    vec![
        planar_probe(
            "ptmap1-lim",
            "π∘(I × δ⁻¹Id)∘F_Be',Be'∘(δ⁻¹I × δ⁻¹I) → F_Gam,Be'",
            ptmap_forward_chain,
            MapId::GammaBetaPrime,
            false,
            27.0,
            &box_,
        ),
        planar_probe(
            "ptmap2-lim",
            "(δ⁻¹I × δ⁻¹I)∘F_Be',Be'∘(I × δId)∘π → F_Gam,Be'^-1",
            ptmap_backward_chain,
            MapId::GammaBetaPrime,
            true,
            3.5,
            &box_,
        ),
        planar_probe(
            "p53a",
            "(δId × Id)∘F_(-1,1)∘(δ⁻¹Id × δ⁻¹Id) → F_(0,1)",
            beta_prime_to_gamma_chain,
            MapId::F { alpha: 0.0, beta: 1.0 },
            false,
            1.3,
            &box_,
        ),
        planar_probe(
            "p53b",
            "(δ⁻¹Id × δId)∘F_(1,1)∘(δId × Id) → F_(1,0)",
            one_one_to_one_zero_chain,
            MapId::F { alpha: 1.0, beta: 0.0 },
            false,
            3.4,
            &tall,
        ),
        planar_probe(
            "p53c",
            "π∘(δI × δ⁻¹I)∘F_(1,-1)∘(δId × I∘J∘I) → F_(1,0)",
            beta_to_inverse_gamma_chain,
            MapId::F { alpha: 1.0, beta: 0.0 },
            false,
            4.5,
            &tall,
        ),
        planar_probe(
            "p53d",
            "π∘(I∘Q × δ·I∘Q∘I)∘F_(1,-1)∘((1-δI) × (1+δI))∘π → F_(0,1)",
            beta_second_order_chain,
            MapId::F { alpha: 0.0, beta: 1.0 },
            false,
            21.0,
            &box_,
        ),
        triple_probe(
            "c54a",
            "(δId × δId)∘R_(-1,1)∘(δ⁻¹Id × δ⁻¹Id × δ⁻¹Id) → R_(0,1)",
            MapId::R { alpha: -1.0, beta: 1.0 },
            |d| ([s(1.0 / d), s(1.0 / d), s(1.0 / d)], [s(d), s(d)]),
            MapId::R { alpha: 0.0, beta: 1.0 },
            9.0,
            &cube,
        ),
        triple_probe(
            "c54b",
            "(δ⁻¹Id × Id)∘R_(1,1)∘(δId × δId × Id) → R_(1,0)",
            MapId::R { alpha: 1.0, beta: 1.0 },
            |d| ([s(d), s(d), Chain::identity()], [s(1.0 / d), Chain::identity()]),
            MapId::R { alpha: 1.0, beta: 0.0 },
            9.0,
            &cube_tall,
        ),
        triple_probe(
            "eqr",
            "(δ⁻¹Id × Id)∘R_(1,-1)∘(δId × δId × Id) → R_(1,0)",
            MapId::R { alpha: 1.0, beta: -1.0 },
            |d| ([s(d), s(d), Chain::identity()], [s(1.0 / d), Chain::identity()]),
            MapId::R { alpha: 1.0, beta: 0.0 },
            9.0,
            &cube_tall,
        ),
        zero_probe("ztl-R01", MapId::R { alpha: 0.0, beta: 1.0 }, MapId::RZero01, false, 1, &[sym, sym, sym]),
        zero_probe("ztl-R10", MapId::R { alpha: 1.0, beta: 0.0 }, MapId::RZero10, false, 1, &[sym, sym, below]),
        zero_probe("ztl-R11", MapId::R { alpha: 1.0, beta: 1.0 }, MapId::RZero11, false, 2, &[sym, sym, below]),
        zero_probe("ztl-Rt1m1", MapId::RTilde, MapId::RTildeZero, false, 2, &[sym, above, below]),
        zero_probe("ztl-FGB", MapId::GammaBetaPrime, MapId::ExpAl, false, 1, &[sym, sym]),
        zero_probe("ztl-FBB", MapId::BetaPrimeBetaPrime, MapId::AlAl, false, 2, &[sym, sym]),
        zero_probe("ztl-FGBinv", MapId::GammaBetaPrime, MapId::ExpAl, true, 1, &[sym, sym]),
    ]
}

pub fn registry() -> &'static [LimitProbe] {
    static REG: OnceLock<Vec<LimitProbe>> = OnceLock::new();
    REG.get_or_init(build)
}

pub fn keys() -> Vec<&'static str> {
    registry().iter().map(|p| p.key).collect()
}

pub fn get(key: &str) -> Result<&'static LimitProbe> {
    registry().iter().find(|p| p.key == key).ok_or_else(|| Error::unknown_key(key, keys()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugated_r01_at_worked_point() {
        let m = pm(MapId::R { alpha: 0.0, beta: 1.0 });
        let v = conjugated(&m, 1e-3, &[1.0, 2.0, 3.0], false).unwrap();
        assert!((v[0] - 0.0).abs() <= 2e-3 && (v[1] - 1.0).abs() <= 2e-3, "{v:?}");
    }

    #[test]
    fn soft_min_error_matches_closed_form() {
        let m = pm(MapId::GammaBetaPrime);
        for eps in [1e-1, 1e-2, 1e-3] {
            let v = conjugated(&m, eps, &[1.0, 2.0], false).unwrap();
            let want = eps * (1.0 + (-1.0 / eps).exp()).ln();
            assert!(((1.0 - v[0]) - want).abs() < 1e-12, "{eps}: {v:?}");
            assert!(want <= 0.7 * eps);
        }
    }

    #[test]
    fn every_probe_passes() {
        for p in registry() {
            let r = p.run().unwrap();
            assert!(r.passed(), "{}: {:#?}", p.key, r.components);
        }
    }

    #[test]
    fn kink_filter_drops_ties() {
        let p = get("ztl-R01").unwrap();
        let m = pm(MapId::RZero01);
        assert!(p.grid.iter().all(|q| kink_gap(&m, q, false).unwrap() >= KINK_GAP));
        assert!(p.grid.len() > 100);
    }

    #[test]
    fn rejects_bad_schedules() {
        let p = get("p53a").unwrap();
        assert!(matches!(p.run_with(&[0.1, 0.05]), Err(Error::ScheduleTooShort { len: 2 })));
        assert!(p.run_with(&[0.01, 0.02, 0.005]).is_err());
    }

    #[test]
    fn non_convergent_family_fails() {
        let f = |d: f64, p: &[f64]| Ok(vec![p[0] + 1.0 + d]);
        let t = |p: &[f64]| Ok(vec![p[0]]);
        let g = grid(&[(0.0, 1.0)], 5);
        let r = limit_probe(&f, &t, &g, &DELTA_SCHEDULE, ProbeRule::Delta { coefficient: 10.0 }).unwrap();
        assert!(!r.passed());
    }
}
