//! Pointwise identities between composed maps, checked on random in-domain points.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

use super::{fbar, Bijection, Composite, MapId, PolymerMap, Step};
use crate::error::{Error, Result};
use crate::rng::seeded;
use crate::stattest::report::{Component, TestReport};
use crate::transforms::{Chain, Interval, PlanarTransform, ScalarTransform};

pub type PointMap = Box<dyn Fn(&[f64]) -> Result<Vec<f64>> + Send + Sync>;

pub const DEFAULT_TOL: f64 = 1e-12;

/// |lhs − rhs| / max(1, |rhs|): relative, judged absolutely near zero.
pub fn discrepancy(lhs: &[f64], rhs: &[f64]) -> f64 {
    if lhs.len() != rhs.len() {
        return f64::INFINITY;
    }
    lhs.iter().zip(rhs).map(|(l, r)| (l - r).abs() / r.abs().max(1.0)).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    /// Change-of-variable and reconstruction identities.
    Algebraic,
    /// Inverse pairs, involutions and F̄∘F̄ = id.
    Inverse,
}

pub struct Identity {
    pub key: &'static str,
    pub statement: String,
    pub group: Group,
    pub domain: Vec<Interval>,
    pub tol: f64,
    lhs: PointMap,
    rhs: PointMap,
}

impl Identity {
    pub fn check(&self, n: usize, seed: u64) -> Result<TestReport> {
        Ok(check_identity(&self.lhs, &self.rhs, &self.domain, n, self.tol, seed)?.with_case(self.key))
    }

    pub fn lhs(&self, p: &[f64]) -> Result<Vec<f64>> {
        (self.lhs)(p)
    }

    pub fn rhs(&self, p: &[f64]) -> Result<Vec<f64>> {
        (self.rhs)(p)
    }
}

/// Sup-norm discrepancy between two maps over `n` random points of `domain`.
pub fn check_identity<L, R>(lhs: &L, rhs: &R, domain: &[Interval], n: usize, tol: f64, seed: u64) -> Result<TestReport>
where
    L: Fn(&[f64]) -> Result<Vec<f64>> + Sync + ?Sized,
    R: Fn(&[f64]) -> Result<Vec<f64>> + Sync + ?Sized,
{
    let mut rng = seeded(seed);
    let points: Vec<Vec<f64>> = (0..n).map(|_| domain.iter().map(|iv| iv.sample(&mut rng)).collect()).collect();
    let worst = points
        .par_iter()
        .map(|p| {
            let d = discrepancy(&lhs(p)?, &rhs(p)?);
            Ok((if d.is_nan() { f64::INFINITY } else { d }, p))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold((0.0, None), |acc: (f64, Option<&Vec<f64>>), (d, p)| if d > acc.0 { (d, Some(p)) } else { acc });
    let mut c = Component::at_most("sup_discrepancy", worst.0, tol);
    if let Some(p) = worst.1 {
        c = c.with_note(format!("worst point {p:?}"));
    }
    Ok(TestReport::new("identity", n, vec![c]).with_seed(seed))
}

pub(crate) fn pm(id: MapId) -> PolymerMap {
    PolymerMap::new(id).expect("registry map ids are valid")
}

pub(crate) fn rf(alpha: f64, beta: f64) -> (PolymerMap, PolymerMap) {
    (pm(MapId::R { alpha, beta }), pm(MapId::F { alpha, beta }))
}

/// (f × g) with each factor written in composition order.
pub(crate) fn prod(left: &[ScalarTransform], right: &[ScalarTransform]) -> Step {
    Step::Transform(PlanarTransform::product(Chain::circ(left), Chain::circ(right)))
}

pub(crate) fn swap() -> Step {
    Step::Transform(PlanarTransform::swap())
}

pub(crate) fn map(id: MapId) -> Step {
    Step::Map(pm(id))
}

pub(crate) fn inv(id: MapId) -> Step {
    Step::Inverse(pm(id))
}

pub(crate) fn pair(v: (f64, f64)) -> Vec<f64> {
    vec![v.0, v.1]
}

pub(crate) fn apply3(chains: &[Chain; 3], p: &[f64]) -> Result<(f64, f64, f64)> {
    Ok((chains[0].apply(p[0])?, chains[1].apply(p[1])?, chains[2].apply(p[2])?))
}

/// Key, target identity, map, one transfer chain per coordinate, bijection.
type TransferRow = (&'static str, &'static str, MapId, [&'static [ScalarTransform]; 3], Composite);

fn planar<B: Bijection + 'static>(b: B) -> PointMap {
    Box::new(move |p| b.forward(p[0], p[1]).map(pair))
}

fn planar_inv<B: Bijection + 'static>(b: B) -> PointMap {
    Box::new(move |p| b.backward(p[0], p[1]).map(pair))
}

fn identity_map() -> PointMap {
    Box::new(|p| Ok(p.to_vec()))
}

/// (f̃₁, f₁, f₂) transfer: R∘(f̃₁×f₁×f₂) on the left, (f₁×f₂)∘F̄^(2,3) on the right.
fn transfer(r: PolymerMap, inner: [Chain; 3], f: Composite) -> (PointMap, PointMap) {
    let outer = [inner[1].clone(), inner[2].clone()];
    let lhs: PointMap = Box::new(move |p| {
        let (a, b, c) = apply3(&inner, p)?;
        r.eval_r(a, b, c).map(pair)
    });
    let rhs: PointMap = Box::new(move |p| {
        let (_, e, g) = fbar(&f, p[0], p[1], p[2])?;
        Ok(vec![outer[0].apply(e)?, outer[1].apply(g)?])
    });
    (lhs, rhs)
}

/// ptmap chain: π∘(I × δ⁻¹Id)∘F_Be′,Be′∘(δ⁻¹I × δ⁻¹I).
pub fn ptmap_forward_chain(delta: f64) -> Composite {
    use ScalarTransform::*;
    let d = ScalarTransform::scale(1.0 / delta);
    Composite::circ(vec![swap(), prod(&[Reciprocal], &[d]), map(MapId::BetaPrimeBetaPrime), prod(&[d, Reciprocal], &[d, Reciprocal])])
}

/// ptmap chain: (δ⁻¹I × δ⁻¹I)∘F_Be′,Be′∘(I × δId)∘π.
pub fn ptmap_backward_chain(delta: f64) -> Composite {
    use ScalarTransform::*;
    let d = ScalarTransform::scale(1.0 / delta);
    Composite::circ(vec![
        prod(&[d, Reciprocal], &[d, Reciprocal]),
        map(MapId::BetaPrimeBetaPrime),
        prod(&[Reciprocal], &[ScalarTransform::scale(delta)]),
        swap(),
    ])
}

struct Builder(Vec<Identity>);

impl Builder {
    fn add(&mut self, key: &'static str, statement: impl Into<String>, group: Group, domain: Vec<Interval>, sides: (PointMap, PointMap)) {
        self.0.push(Identity { key, statement: statement.into(), group, domain, tol: DEFAULT_TOL, lhs: sides.0, rhs: sides.1 });
    }
}

fn build() -> Vec<Identity> {
    use Group::*;
    use ScalarTransform::*;
    let pos = Interval::POSITIVE;
    let real = Interval::REAL;
    let neg = Interval::NEGATIVE;
    let mut b = Builder(Vec::new());
    let rows: [(&'static str, &'static str, f64, f64); 5] = [
        ("fr-01", "01", 0.0, 1.0),
        ("fr-10", "10", 1.0, 0.0),
        ("fr-m11", "m11", -1.0, 1.0),
        ("fr-11", "11", 1.0, 1.0),
        ("fr-1m1", "1m1", 1.0, -1.0),
    ];

    for &(key, _, alpha, beta) in &rows {
        let (r, f) = rf(alpha, beta);
        let dom = r.domain.clone();
        let st = format!("F̄_({alpha},{beta})^(2,3) = R_({alpha},{beta})");
        let lhs: PointMap = Box::new(move |p| fbar(&f, p[0], p[1], p[2]).map(|t| vec![t.1, t.2]));
        b.add(key, st, Algebraic, dom, (lhs, Box::new(move |p| r.eval(p))));
    }

    let fz = pm(MapId::FZero01);
    let r0 = pm(MapId::RZero01);
    b.add(
        "rrr",
        "F̄0_(0,1)^(2,3) = R0_(0,1)",
        Algebraic,
        vec![real; 3],
        (Box::new(move |p| fbar(&fz, p[0], p[1], p[2]).map(|t| vec![t.1, t.2])), Box::new(move |p| r0.eval(p))),
    );
    b.add(
        "rrr2",
        "(-Id × Id)∘F0_(0,1)∘(-Id × -Id) = F_E,AL",
        Algebraic,
        vec![real; 2],
        (planar(Composite::circ(vec![prod(&[Negate], &[]), map(MapId::FZero01), prod(&[Negate], &[Negate])])), planar(pm(MapId::ExpAl))),
    );

    let rt = pm(MapId::RTilde);
    let r1m1 = pm(MapId::R { alpha: 1.0, beta: -1.0 });
    b.add(
        "tildereq",
        "R~_(1,-1) = R_(1,-1)∘(Q⁻¹ × Id × Id)",
        Algebraic,
        rt.domain.clone(),
        (Box::new(move |p| rt.eval(p)), Box::new(move |p| r1m1.eval_r(1.0 / (1.0 + p[0]), p[1], p[2]).map(pair))),
    );

    let f = |alpha, beta| MapId::F { alpha, beta };
    let p31: [(&'static str, Composite, MapId, bool); 5] = [
        (
            "p31a",
            Composite::circ(vec![prod(&[Reciprocal], &[]), map(f(0.0, 1.0)), prod(&[Reciprocal], &[Reciprocal])]),
            MapId::GammaBetaPrime,
            false,
        ),
        (
            "p31b",
            Composite::circ(vec![swap(), prod(&[], &[Reciprocal]), map(f(1.0, 0.0)), prod(&[], &[Reciprocal, Qinv, Reciprocal])]),
            MapId::GammaBetaPrime,
            true,
        ),
        (
            "p31ci",
            Composite::circ(vec![
                swap(),
                prod(&[Reciprocal, Q, Reciprocal], &[Reciprocal]),
                map(f(-1.0, 1.0)),
                prod(&[Reciprocal, Qinv], &[]),
            ]),
            MapId::BetaPrimeBetaPrime,
            false,
        ),
        (
            "p31cii",
            Composite::circ(vec![swap(), prod(&[Reciprocal], &[]), map(f(1.0, 1.0)), prod(&[], &[Reciprocal, Qinv]), swap()]),
            MapId::BetaPrimeBetaPrime,
            false,
        ),
        (
            "p31d",
            Composite::circ(vec![
                prod(&[Q], &[Q, Reciprocal]),
                map(f(1.0, -1.0)),
                prod(&[Qinv, Reciprocal], &[Reciprocal, Qinv, Reciprocal]),
                swap(),
            ]),
            MapId::BetaPrimeBetaPrime,
            false,
        ),
    ];
    for (key, chain, target, inverse) in p31 {
        let t = pm(target);
        let st = format!("{} = {}{}", chain.name(), t.name(), if inverse { "^-1" } else { "" });
        let rhs = if inverse { planar_inv(t) } else { planar(t) };
        b.add(key, st, Algebraic, vec![pos; 2], (planar(chain), rhs));
    }

    // Transfer chains (f̃₁, f₁, f₂) in composition order, with the bijection F.
    let c32: [TransferRow; 5] = [
        (
            "c32a",
            "p34a",
            MapId::R { alpha: 0.0, beta: 1.0 },
            [&[Reciprocal], &[Reciprocal], &[Reciprocal]],
            Composite::circ(vec![map(MapId::GammaBetaPrime)]),
        ),
        (
            "c32b",
            "p34b",
            MapId::R { alpha: 1.0, beta: 0.0 },
            [&[], &[], &[Reciprocal, Qinv, Reciprocal]],
            Composite::circ(vec![swap(), inv(MapId::GammaBetaPrime)]),
        ),
        (
            "c32ci",
            "",
            MapId::R { alpha: -1.0, beta: 1.0 },
            [&[Reciprocal, Qinv, Reciprocal], &[Reciprocal, Qinv], &[]],
            Composite::circ(vec![swap(), map(MapId::BetaPrimeBetaPrime)]),
        ),
        (
            "c32cii",
            "p34c",
            MapId::R { alpha: 1.0, beta: 1.0 },
            [&[Reciprocal], &[], &[Reciprocal, Qinv]],
            Composite::circ(vec![swap(), map(MapId::BetaPrimeBetaPrime), swap()]),
        ),
        (
            "c32d",
            "p34d",
            MapId::RTilde,
            [&[], &[Qinv, Reciprocal], &[Reciprocal, Qinv, Reciprocal]],
            Composite::circ(vec![map(MapId::BetaPrimeBetaPrime), swap()]),
        ),
    ];
    let mut zero_transfers = Vec::new();
    for (key, zkey, r, chains, bij) in c32 {
        let r = pm(r);
        let inner = chains.map(Chain::circ);
        let st = format!("{}∘({}) = ({})∘F̄^(2,3) with F = {}", r.name(), names(&inner), names(&inner[1..]), bij.name());
        if !zkey.is_empty() {
            zero_transfers.push((zkey, r.id, inner.clone(), bij.clone()));
        }
        b.add(key, st, Algebraic, vec![pos; 3], transfer(r, inner, bij));
    }

    // The zero-temperature transfers are the termwise zero images of the above.
    for (key, rid, inner, bij) in zero_transfers {
        let r = pm(zero_of(rid));
        let inner = inner.map(|c| c.zero_image().expect("transfer chains have zero images"));
        let bij = zero_composite(&bij);
        let st = format!("{}∘({}) = ({})∘F̄^(2,3) with F = {}", r.name(), names(&inner), names(&inner[1..]), bij.name());
        b.add(key, st, Algebraic, vec![real; 3], transfer(r, inner, bij));
    }

    let zt1 = Composite::circ(vec![swap(), prod(&[Negate], &[]), map(MapId::AlAl), prod(&[Negate], &[Negate])]);
    let zt2 = Composite::circ(vec![prod(&[Negate], &[Negate]), map(MapId::AlAl), prod(&[Negate], &[]), swap()]);
    b.add("ztmap1", format!("{} = F_E,AL", zt1.name()), Algebraic, vec![pos, real], (planar(zt1), planar(pm(MapId::ExpAl))));
    b.add("ztmap2", format!("{} = F_E,AL^-1", zt2.name()), Algebraic, vec![pos, real], (planar(zt2), planar_inv(pm(MapId::ExpAl))));

    let unit = Interval::UNIT;
    b.add(
        "ptmap1",
        "π∘(I × δ⁻¹Id)∘F_Be',Be'∘(δ⁻¹I × δ⁻¹I)(x,y) = (x+y+δxy, x/(y+δxy))",
        Algebraic,
        vec![pos, pos, unit],
        (
            Box::new(|p| ptmap_forward_chain(p[2]).forward(p[0], p[1]).map(pair)),
            Box::new(|p| {
                let (x, y, d) = (p[0], p[1], p[2]);
                Ok(vec![x + y + d * x * y, x / (y + d * x * y)])
            }),
        ),
    );
    b.add(
        "ptmap2",
        "(δ⁻¹I × δ⁻¹I)∘F_Be',Be'∘(I × δId)∘π(x,y) = (xy/(1+y), x/(1+y+δxy))",
        Algebraic,
        vec![pos, pos, unit],
        (
            Box::new(|p| ptmap_backward_chain(p[2]).forward(p[0], p[1]).map(pair)),
            Box::new(|p| {
                let (x, y, d) = (p[0], p[1], p[2]);
                Ok(vec![x * y / (1.0 + y), x / (1.0 + y + d * x * y)])
            }),
        ),
    );

    let ppp: [(&'static str, MapId, [Interval; 3]); 2] =
        [("ppp1a", MapId::RZero01, [neg, real, neg]), ("ppp1b", MapId::RZero10, [pos, real, neg])];
    for (key, other, dom) in ppp {
        let r11 = pm(MapId::RZero11);
        let o = pm(other);
        let st = format!("R0_(1,1) = {}", o.name());
        b.add(key, st, Algebraic, dom.to_vec(), (Box::new(move |p| r11.eval(p)), Box::new(move |p| o.eval(p))));
    }
    let rtz = pm(MapId::RTildeZero);
    let r10 = pm(MapId::RZero10);
    let qz = ScalarTransform::Qinv.zero_image().expect("Q⁻¹ has a zero image");
    b.add(
        "ppp1c",
        "R~0_(1,-1) = R0_(1,0)∘((Q⁻¹)0 × Id × Id)",
        Algebraic,
        vec![neg, pos, neg],
        (Box::new(move |p| rtz.eval(p)), Box::new(move |p| r10.eval_r(qz.apply(p[0])?, p[1], p[2]).map(pair))),
    );

    // Inverse pairs and involutions.
    for (key, id, dom) in [("inv-fbb", MapId::BetaPrimeBetaPrime, pos), ("inv-faa", MapId::AlAl, real)] {
        let m = pm(id);
        let st = format!("{0}∘{0} = id", m.name());
        let lhs: PointMap = Box::new(move |p| {
            let (x, y) = m.eval_f(p[0], p[1])?;
            m.eval_f(x, y).map(pair)
        });
        b.add(key, st, Inverse, vec![dom; 2], (lhs, identity_map()));
    }
    let mut pairs: Vec<(&'static str, &'static str, MapId)> = vec![
        ("inv-fgb", "inv-fgb-rev", MapId::GammaBetaPrime),
        ("inv-fea", "inv-fea-rev", MapId::ExpAl),
        ("inv-fz01", "inv-fz01-rev", MapId::FZero01),
    ];
    let inv_keys: [(&'static str, &'static str); 5] = [
        ("inv-f01", "inv-f01-rev"),
        ("inv-f10", "inv-f10-rev"),
        ("inv-fm11", "inv-fm11-rev"),
        ("inv-f11", "inv-f11-rev"),
        ("inv-f1m1", "inv-f1m1-rev"),
    ];
    for (&(_, _, alpha, beta), (k1, k2)) in rows.iter().zip(inv_keys) {
        pairs.push((k1, k2, MapId::F { alpha, beta }));
    }
    for (k1, k2, id) in pairs {
        let m = pm(id);
        let (m1, m2) = (m.clone(), m.clone());
        let fwd: PointMap = Box::new(move |p| {
            let (x, y) = m1.eval_f(p[0], p[1])?;
            m1.eval_f_inv(x, y).map(pair)
        });
        let rev: PointMap = Box::new(move |p| {
            let (x, y) = m2.eval_f_inv(p[0], p[1])?;
            m2.eval_f(x, y).map(pair)
        });
        b.add(k1, format!("{0}^-1∘{0} = id", m.name()), Inverse, m.domain.clone(), (fwd, identity_map()));
        b.add(k2, format!("{0}∘{0}^-1 = id", m.name()), Inverse, m.codomain.clone(), (rev, identity_map()));
    }
    let fbar_keys: [&'static str; 5] = ["fbar-inv-01", "fbar-inv-10", "fbar-inv-m11", "fbar-inv-11", "fbar-inv-1m1"];
    for (&(_, _, alpha, beta), key) in rows.iter().zip(fbar_keys) {
        let (r, f) = rf(alpha, beta);
        let st = format!("F̄_({alpha},{beta})∘F̄_({alpha},{beta}) = id");
        let lhs: PointMap = Box::new(move |p| {
            let (d, e, g) = fbar(&f, p[0], p[1], p[2])?;
            let (x, y, z) = fbar(&f, d, e, g)?;
            Ok(vec![x, y, z])
        });
        b.add(key, st, Inverse, r.domain.clone(), (lhs, identity_map()));
    }
    b.0
}

fn names(chains: &[Chain]) -> String {
    chains
        .iter()
        .map(|c| if c.0.is_empty() { "id".to_string() } else { c.0.iter().rev().map(|t| t.name()).collect::<Vec<_>>().join("∘") })
        .collect::<Vec<_>>()
        .join(" × ")
}

fn zero_of(id: MapId) -> MapId {
    match id {
        MapId::R { alpha, beta } if alpha == 0.0 && beta == 1.0 => MapId::RZero01,
        MapId::R { alpha, beta } if alpha == 1.0 && beta == 0.0 => MapId::RZero10,
        MapId::R { alpha, beta } if alpha == 1.0 && beta == 1.0 => MapId::RZero11,
        MapId::RTilde => MapId::RTildeZero,
        MapId::GammaBetaPrime => MapId::ExpAl,
        MapId::BetaPrimeBetaPrime => MapId::AlAl,
        MapId::F { alpha, beta } if alpha == 0.0 && beta == 1.0 => MapId::FZero01,
        other => panic!("{other:?} has no registered zero-temperature image"),
    }
}

fn zero_composite(c: &Composite) -> Composite {
    let steps = c
        .steps
        .iter()
        .map(|s| match s {
            Step::Map(m) => map(zero_of(m.id)),
            Step::Inverse(m) => inv(zero_of(m.id)),
            Step::Transform(t) => Step::Transform(PlanarTransform {
                left: t.left.zero_image().expect("zero image"),
                right: t.right.zero_image().expect("zero image"),
                ..t.clone()
            }),
        })
        .collect();
    Composite { steps }
}

pub fn registry() -> &'static [Identity] {
    static REG: OnceLock<Vec<Identity>> = OnceLock::new();
    REG.get_or_init(build)
}

pub fn keys() -> Vec<&'static str> {
    registry().iter().map(|i| i.key).collect()
}

pub fn get(key: &str) -> Result<&'static Identity> {
    registry().iter().find(|i| i.key == key).ok_or_else(|| Error::unknown_key(key, keys()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_unique() {
        let mut k = keys();
        let n = k.len();
        k.sort();
        k.dedup();
        assert_eq!(k.len(), n);
    }

    #[test]
    fn p31a_hand_evaluated() {
        let id = get("p31a").unwrap();
        let l = id.lhs(&[2.0, 1.0]).unwrap();
        assert!((l[0] - 3.0).abs() < 1e-15 && (l[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn every_identity_holds() {
        for id in registry() {
            let r = id.check(2000, 11).unwrap();
            assert!(r.passed(), "{}: {} -> {:?}", id.key, id.statement, r.components);
        }
    }

    #[test]
    fn unknown_key_suggests() {
        match get("p31e") {
            Err(Error::UnknownKey { suggestions, .. }) => assert!(suggestions.iter().any(|s| s.starts_with("p31"))),
            _ => panic!("expected an unknown-key error"),
        }
    }

    #[test]
    fn broken_identity_fails() {
        let m = pm(MapId::GammaBetaPrime);
        let bb = pm(MapId::BetaPrimeBetaPrime);
        let r = check_identity(
            &|p: &[f64]| m.eval_f(p[0], p[1]).map(pair),
            &|p: &[f64]| bb.eval_f(p[0], p[1]).map(pair),
            &[Interval::POSITIVE; 2],
            100,
            DEFAULT_TOL,
            1,
        )
        .unwrap();
        assert!(!r.passed());
        assert!(r.components[0].note.as_deref().unwrap_or("").contains("worst point"));
    }
}
