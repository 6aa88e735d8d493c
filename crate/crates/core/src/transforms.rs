//! Scalar bijections, their products and compositions, the conjugation
//! S_ε(x) = e^{−x/ε}, and the zero-temperature image of each primitive.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::distributions::{softplus, MixedSample};
use crate::error::{Error, Result};
use crate::rng::Rng;

/// Interval with open or closed endpoints; infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }
    pub const REAL: Interval = Interval::open(f64::NEG_INFINITY, f64::INFINITY);
    pub const POSITIVE: Interval = Interval::open(0.0, f64::INFINITY);
    pub const NEGATIVE: Interval = Interval::open(f64::NEG_INFINITY, 0.0);
    pub const UNIT: Interval = Interval::open(0.0, 1.0);
    pub const ABOVE_ONE: Interval = Interval::open(1.0, f64::INFINITY);
    pub const NONNEGATIVE: Interval = Interval { lo: 0.0, hi: f64::INFINITY, lo_closed: true, hi_closed: false };
    pub const NONPOSITIVE: Interval = Interval { lo: f64::NEG_INFINITY, hi: 0.0, lo_closed: false, hi_closed: true };

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Whether e^l lies in the interval.
    pub fn contains_log(&self, l: f64) -> bool {
        if self.hi <= 0.0 {
            return false;
        }
        let above = self.lo < 0.0 || (self.lo == 0.0 && l > f64::NEG_INFINITY) || {
            let lo = self.lo.ln();
            if self.lo_closed {
                l >= lo
            } else {
                l > lo
            }
        };
        let hi = self.hi.ln();
        let below = if self.hi_closed { l <= hi } else { l < hi };
        above && below
    }

    /// Random interior point: log-uniform offsets within e^{±3} of a finite
    /// endpoint for half-lines, uniform on [−10, 10] for the line, and uniform
    /// on the inner 99.8% of bounded intervals.
    pub fn sample(&self, rng: &mut Rng) -> f64 {
        let offset = |rng: &mut Rng| rng.random_range(-3.0f64..3.0).exp();
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => {
                let w = self.hi - self.lo;
                self.lo + w * rng.random_range(0.001..0.999)
            }
            (true, false) => self.lo + offset(rng),
            (false, true) => self.hi - offset(rng),
            (false, false) => rng.random_range(-10.0..10.0),
        }
    }

    /// `n` evenly spaced points in [a, b] clipped to the interior.
    pub fn grid(&self, a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n.max(2) - 1) as f64).filter(|x| self.contains(*x)).collect()
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        let e = |v: f64| {
            if v == f64::INFINITY {
                "∞".to_string()
            } else if v == f64::NEG_INFINITY {
                "-∞".to_string()
            } else {
                format!("{v}")
            }
        };
        write!(f, "{l}{},{}{r}", e(self.lo), e(self.hi))
    }
}

/// A primitive scalar map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalarTransform {
    Identity,
    /// x ↦ 1/x
    Reciprocal,
    /// x ↦ 1/x − 1
    Q,
    /// x ↦ 1/(1+x)
    Qinv,
    /// x ↦ 1 − x
    J,
    Negate,
    MinWithZero,
    /// x ↦ kx + h
    Affine {
        k: f64,
        h: f64,
    },
}

/// ln(1 − e^l) for l < 0.
pub fn log1mexp(l: f64) -> f64 {
    if l > -std::f64::consts::LN_2 {
        (-l.exp_m1()).ln()
    } else {
        (-l.exp()).ln_1p()
    }
}

impl ScalarTransform {
    pub fn scale(k: f64) -> Self {
        ScalarTransform::Affine { k, h: 0.0 }
    }

    pub fn name(&self) -> String {
        match self {
            ScalarTransform::Identity => "identity".into(),
            ScalarTransform::Reciprocal => "reciprocal".into(),
            ScalarTransform::Q => "Q".into(),
            ScalarTransform::Qinv => "Qinv".into(),
            ScalarTransform::J => "J".into(),
            ScalarTransform::Negate => "negate".into(),
            ScalarTransform::MinWithZero => "min_with_zero".into(),
            ScalarTransform::Affine { k, h } => format!("affine({k},{h})"),
        }
    }

    pub fn domain(&self) -> Interval {
        match self {
            ScalarTransform::Reciprocal | ScalarTransform::Qinv => Interval::POSITIVE,
            ScalarTransform::Q | ScalarTransform::J => Interval::UNIT,
            _ => Interval::REAL,
        }
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        if !self.domain().contains(x) {
            return Err(Error::domain(self.name(), x, self.domain()));
        }
        Ok(match *self {
            ScalarTransform::Identity => x,
            ScalarTransform::Reciprocal => 1.0 / x,
            ScalarTransform::Q => 1.0 / x - 1.0,
            ScalarTransform::Qinv => 1.0 / (1.0 + x),
            ScalarTransform::J => 1.0 - x,
            ScalarTransform::Negate => -x,
            ScalarTransform::MinWithZero => x.min(0.0),
            ScalarTransform::Affine { k, h } => k * x + h,
        })
    }

    pub fn inverse(&self) -> Option<Self> {
        Some(match *self {
            ScalarTransform::Q => ScalarTransform::Qinv,
            ScalarTransform::Qinv => ScalarTransform::Q,
            ScalarTransform::MinWithZero => return None,
            ScalarTransform::Affine { k, h } => {
                if k == 0.0 {
                    return None;
                }
                ScalarTransform::Affine { k: 1.0 / k, h: -h / k }
            }
            other => other,
        })
    }

    /// Evaluation in log coordinates: ln t(e^l), for maps of positive reals.
    pub fn apply_log(&self, l: f64) -> Result<f64> {
        let out = match *self {
            ScalarTransform::Identity => Some(l),
            ScalarTransform::Reciprocal => Some(-l),
            ScalarTransform::Q if l < 0.0 => Some(log1mexp(l) - l),
            ScalarTransform::Qinv => Some(-softplus(l)),
            ScalarTransform::J if l < 0.0 => Some(log1mexp(l)),
            ScalarTransform::Affine { k, h } => {
                let a = l + k.abs().ln();
                match (k > 0.0, h) {
                    (true, 0.0) => Some(a),
                    (true, h) if h > 0.0 => Some(crate::distributions::log_add_exp(a, h.ln())),
                    (true, h) if a > (-h).ln() => Some(a + log1mexp((-h).ln() - a)),
                    (false, h) if h > 0.0 && h.ln() > a => Some(h.ln() + log1mexp(a - h.ln())),
                    _ => None,
                }
            }
            _ => None,
        };
        out.ok_or_else(|| Error::domain(format!("{} (log coordinates)", self.name()), l, "log of its domain"))
    }

    /// Zero-temperature image: the pointwise limit of S_ε⁻¹∘t∘S_ε as ε ↓ 0.
    pub fn zero_image(&self) -> Option<Chain> {
        use ScalarTransform::*;
        match *self {
            Identity => Some(Chain::identity()),
            Reciprocal => Some(Chain::of(&[Negate])),
            // −min{x, 0}
            Qinv => Some(Chain::of(&[MinWithZero, Negate])),
            // on (0,∞), where S_ε lands in Q's domain
            Q => Some(Chain::of(&[Negate])),
            Affine { k, h } if k > 0.0 && h == 0.0 => Some(Chain::identity()),
            _ => None,
        }
    }

    /// Whether the primitive clips values onto 0.
    fn clips(&self) -> bool {
        matches!(self, ScalarTransform::MinWithZero)
    }
}

/// Composition of primitives, stored in application order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Chain(pub Vec<ScalarTransform>);

impl Chain {
    pub fn identity() -> Self {
        Chain(Vec::new())
    }

    /// Chain applying `steps[0]` first.
    pub fn of(steps: &[ScalarTransform]) -> Self {
        Chain(steps.to_vec())
    }

    /// Chain written in composition order: `circ(&[f, g])` is f∘g (g applied first).
    pub fn circ(steps: &[ScalarTransform]) -> Self {
        Chain(steps.iter().rev().copied().collect())
    }

    /// self∘other: apply `other` first.
    pub fn after(&self, other: &Chain) -> Chain {
        Chain(other.0.iter().chain(self.0.iter()).copied().collect())
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        self.0.iter().try_fold(x, |v, t| t.apply(v))
    }

    pub fn apply_log(&self, l: f64) -> Result<f64> {
        self.0.iter().try_fold(l, |v, t| t.apply_log(v))
    }

    pub fn inverse(&self) -> Option<Chain> {
        self.0.iter().rev().map(|t| t.inverse()).collect::<Option<Vec<_>>>().map(Chain)
    }

    /// Composition of the primitives' zero images.
    pub fn zero_image(&self) -> Option<Chain> {
        let mut out = Vec::new();
        for t in &self.0 {
            out.extend(t.zero_image()?.0);
        }
        Some(Chain(out))
    }

    /// S_ε⁻¹∘self∘S_ε at x, evaluated in log coordinates.
    pub fn conjugate(&self, x: f64, eps: f64) -> Result<f64> {
        Ok(-eps * self.apply_log(-x / eps)?)
    }

    fn apply_sample(&self, s: MixedSample) -> Result<MixedSample> {
        let mut v = s.value;
        let mut atom = s.is_atom;
        for t in &self.0 {
            let w = t.apply(v)?;
            if t.clips() && w != v {
                atom = true;
            }
            v = w;
        }
        Ok(MixedSample { value: v, is_atom: atom })
    }
}

/// (x, y) ↦ π^a∘(left × right)∘π^b.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarTransform {
    pub left: Chain,
    pub right: Chain,
    #[serde(default)]
    pub swap_before: bool,
    #[serde(default)]
    pub swap_after: bool,
}

impl PlanarTransform {
    pub fn product(left: Chain, right: Chain) -> Self {
        Self { left, right, swap_before: false, swap_after: false }
    }

    pub fn swap() -> Self {
        Self { swap_after: true, ..Self::default() }
    }

    pub fn then_swap(mut self) -> Self {
        self.swap_after = !self.swap_after;
        self
    }

    pub fn swap_first(mut self) -> Self {
        self.swap_before = !self.swap_before;
        self
    }

    pub fn apply(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (x, y) = if self.swap_before { (y, x) } else { (x, y) };
        let (x, y) = (self.left.apply(x)?, self.right.apply(y)?);
        Ok(if self.swap_after { (y, x) } else { (x, y) })
    }

    pub fn inverse(&self) -> Option<Self> {
        Some(Self { left: self.left.inverse()?, right: self.right.inverse()?, swap_before: self.swap_after, swap_after: self.swap_before })
    }
}

pub fn s_eps(x: f64, eps: f64) -> f64 {
    (-x / eps).exp()
}

pub fn s_eps_inv(y: f64, eps: f64) -> f64 {
    -eps * y.ln()
}

/// Elementwise image of samples; atom flags survive and clipping creates new atoms.
pub fn pushforward(t: &Chain, samples: &[MixedSample]) -> Result<Vec<MixedSample>> {
    samples
        .iter()
        .enumerate()
        .map(|(index, s)| t.apply_sample(*s).map_err(|e| Error::SampleDomain { index, source: Box::new(e) }))
        .collect()
}

/// Elementwise image of sample pairs.
pub fn pushforward_pairs(t: &PlanarTransform, samples: &[(MixedSample, MixedSample)]) -> Result<Vec<(MixedSample, MixedSample)>> {
    samples
        .iter()
        .enumerate()
        .map(|(index, &(a, b))| {
            let (a, b) = if t.swap_before { (b, a) } else { (a, b) };
            let r = t.left.apply_sample(a).and_then(|a| Ok((a, t.right.apply_sample(b)?)));
            r.map(|(a, b)| if t.swap_after { (b, a) } else { (a, b) }).map_err(|e| Error::SampleDomain { index, source: Box::new(e) })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::ScalarTransform::*;
    use super::*;
    use crate::rng::seeded;
    use approx::assert_abs_diff_eq;

    #[test]
    fn primitive_examples() {
        assert_abs_diff_eq!(Q.apply(1.0 / 3.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_eq!(J.apply(0.25).unwrap(), 0.75);
        let qz = Qinv.zero_image().unwrap();
        assert_eq!(qz.apply(-2.0).unwrap(), 2.0);
        assert_eq!(qz.apply(5.0).unwrap(), 0.0);
        assert_eq!(Reciprocal.zero_image().unwrap(), Chain::of(&[Negate]));
        assert_eq!(Identity.zero_image().unwrap(), Chain::identity());
    }

    #[test]
    fn domain_errors_name_the_primitive() {
        match Q.apply(2.0) {
            Err(Error::Domain { primitive, .. }) => assert_eq!(primitive, "Q"),
            other => panic!("{other:?}"),
        }
        assert!(Reciprocal.apply(0.0).is_err());
        assert!(J.apply(1.0).is_err());
    }

    #[test]
    fn involutions_and_inverses() {
        let mut r = seeded(11);
        for _ in 0..10_000 {
            let x = Interval::POSITIVE.sample(&mut r);
            let u = Interval::UNIT.sample(&mut r);
            // relative error floored at unit scale
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
            assert!(rel(Reciprocal.apply(Reciprocal.apply(x).unwrap()).unwrap(), x) <= 1e-14);
            assert!(rel(Qinv.apply(Q.apply(u).unwrap()).unwrap(), u) <= 1e-14);
            assert!(rel(J.apply(J.apply(u).unwrap()).unwrap(), u) <= 1e-14);
        }
    }

    #[test]
    fn planar_inverse_round_trip() {
        let t = PlanarTransform {
            left: Chain::circ(&[Reciprocal, Qinv, Reciprocal]),
            right: Chain::of(&[ScalarTransform::scale(0.3), Q.inverse().unwrap()]),
            swap_before: true,
            swap_after: false,
        };
        let inv = t.inverse().unwrap();
        let mut r = seeded(12);
        for _ in 0..10_000 {
            let (x, y) = (Interval::POSITIVE.sample(&mut r), Interval::POSITIVE.sample(&mut r));
            let (a, b) = t.apply(x, y).unwrap();
            let (x2, y2) = inv.apply(a, b).unwrap();
            assert!((x2 - x).abs() <= 1e-12 * x.abs().max(1.0));
            assert!((y2 - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn conjugation_round_trip_and_soft_min() {
        for &x in &[-3.0, 0.0, 0.7, 12.0] {
            for &eps in &[1.0, 0.1] {
                assert_abs_diff_eq!(s_eps_inv(s_eps(x, eps), eps), x, epsilon = 1e-12);
            }
        }
        assert_eq!(s_eps(0.0, 0.3), 1.0);
        // S⁻¹(S(1) + S(2)) = 1 − ε ln(1 + e^{−1/ε})
        let eps = 0.01;
        let v = -eps * crate::distributions::log_add_exp(-1.0 / eps, -2.0 / eps);
        assert!((v - 1.0).abs() <= eps * 2f64.ln());
    }

    #[test]
    fn zero_images_are_limits() {
        for t in [Identity, Reciprocal, Qinv, Q, ScalarTransform::scale(3.0)] {
            let z = t.zero_image().unwrap();
            let dom = if t == Q { Interval::POSITIVE } else { Interval::REAL };
            let grid: Vec<f64> = dom.grid(-3.0, 3.0, 121);
            for &eps in &[0.1, 0.01, 0.001] {
                for &x in &grid {
                    if x.abs() < 0.1 {
                        continue;
                    }
                    let lim = Chain::of(&[t]).conjugate(x, eps).unwrap();
                    let err = (lim - z.apply(x).unwrap()).abs();
                    let allow = 2.0 * eps * 2f64.ln() + if matches!(t, Affine { .. }) { eps * 3f64.ln() } else { 0.0 };
                    assert!(err <= allow, "{t:?} at {x}, eps {eps}: {err}");
                }
            }
        }
    }

    #[test]
    fn composition_respects_zero_limits() {
        let chains = [Chain::circ(&[Reciprocal, Qinv, Reciprocal]), Chain::circ(&[Qinv, Reciprocal]), Chain::circ(&[Reciprocal, Qinv])];
        for c in &chains {
            let z = c.zero_image().unwrap();
            for x in Interval::REAL.grid(-3.0, 3.0, 61) {
                if x.abs() < 0.1 {
                    continue;
                }
                let lim = c.conjugate(x, 1e-4).unwrap();
                assert!((lim - z.apply(x).unwrap()).abs() < 1e-3, "{c:?} at {x}");
            }
        }
    }

    #[test]
    fn pushforward_marks_clipped_atoms() {
        let s = [MixedSample { value: 2.0, is_atom: false }, MixedSample { value: -1.0, is_atom: false }];
        let out = pushforward(&Chain::of(&[MinWithZero]), &s).unwrap();
        assert_eq!(out[0], MixedSample { value: 0.0, is_atom: true });
        assert_eq!(out[1], MixedSample { value: -1.0, is_atom: false });
        let err = pushforward(&Chain::of(&[Reciprocal]), &[s[1]]).unwrap_err();
        assert!(matches!(err, Error::SampleDomain { index: 0, .. }));
    }

    #[test]
    fn json_chain() {
        let c = Chain::circ(&[Reciprocal, ScalarTransform::scale(2.0)]);
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"[{"kind":"affine","k":2.0,"h":0.0},{"kind":"reciprocal"}]"#);
        assert_eq!(serde_json::from_str::<Chain>(&s).unwrap(), c);
    }
}
