//! Min-plus formulas shared by the zero-temperature maps, generic over the
//! number type: `f64` for evaluation, `i64` for lattice-valued environments,
//! and [`Gapped`] to measure how close an input sits to a kink.

use std::ops::{Add, Neg, Sub};

pub trait MinPlus: Copy + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self> {
    fn zero() -> Self;
    fn tmin(self, other: Self) -> Self;
    fn tmax(self, other: Self) -> Self {
        -((-self).tmin(-other))
    }
    fn to_f64(self) -> f64;
}

impl MinPlus for f64 {
    fn zero() -> Self {
        0.0
    }
    fn tmin(self, other: Self) -> Self {
        self.min(other)
    }
    fn tmax(self, other: Self) -> Self {
        self.max(other)
    }
    fn to_f64(self) -> f64 {
        self
    }
}

impl MinPlus for i64 {
    fn zero() -> Self {
        0
    }
    fn tmin(self, other: Self) -> Self {
        Ord::min(self, other)
    }
    fn tmax(self, other: Self) -> Self {
        Ord::max(self, other)
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
}

/// A value together with the smallest gap between the two arguments of any
/// min or max it passed through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gapped {
    pub value: f64,
    pub gap: f64,
}

impl Gapped {
    pub fn exact(value: f64) -> Self {
        Self { value, gap: f64::INFINITY }
    }
}

impl Add for Gapped {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { value: self.value + o.value, gap: self.gap.min(o.gap) }
    }
}

impl Sub for Gapped {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { value: self.value - o.value, gap: self.gap.min(o.gap) }
    }
}

impl Neg for Gapped {
    type Output = Self;
    fn neg(self) -> Self {
        Self { value: -self.value, gap: self.gap }
    }
}

impl MinPlus for Gapped {
    fn zero() -> Self {
        Self::exact(0.0)
    }
    fn tmin(self, o: Self) -> Self {
        Self { value: self.value.min(o.value), gap: self.gap.min(o.gap).min((self.value - o.value).abs()) }
    }
    fn to_f64(self) -> f64 {
        self.value
    }
}

fn min0<T: MinPlus>(a: T) -> T {
    a.tmin(T::zero())
}

pub fn r_zero_01<T: MinPlus>(a: T, b: T, c: T) -> (T, T) {
    (a.tmin(a + b - c), (a + c - b).tmin(a))
}

pub fn r_zero_10<T: MinPlus>(a: T, b: T, c: T) -> (T, T) {
    (a.tmin(b - c), min0(a + c - b))
}

pub fn r_zero_11<T: MinPlus>(a: T, b: T, c: T) -> (T, T) {
    (a.tmin(min0(a) + b - c), (a + c - b).tmin(min0(a)))
}

/// Weights u = −(a∧0), v = a∨0.
pub fn r_tilde_zero<T: MinPlus>(a: T, b: T, c: T) -> (T, T) {
    let u = -min0(a);
    let v = a.tmax(T::zero());
    (u.tmin(v + b - c), (u + c - b).tmin(v))
}

pub fn exp_al<T: MinPlus>(x: T, y: T) -> (T, T) {
    (x.tmin(y), x - y)
}

pub fn exp_al_inv<T: MinPlus>(x: T, y: T) -> (T, T) {
    let m = min0(y);
    (x + y - m, x - m)
}

pub fn al_al<T: MinPlus>(x: T, y: T) -> (T, T) {
    let m = min0(x);
    (m - y, m.tmin(y) - x - y)
}

pub fn f_zero_01<T: MinPlus>(x: T, y: T) -> (T, T) {
    (x.tmax(y), y - x)
}

pub fn f_zero_01_inv<T: MinPlus>(x: T, y: T) -> (T, T) {
    (x - y.tmax(T::zero()), x + min0(y))
}

/// Zero-temperature partition function step Z = min(u + Z_left, v + Z_below).
pub fn z_step<T: MinPlus>(u: T, v: T, left: T, below: T) -> T {
    (u + left).tmin(v + below)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_values() {
        assert_eq!(r_zero_01(1.0, 2.0, 3.0), (0.0, 1.0));
        assert_eq!(r_tilde_zero(1.0, 2.0, -1.0), (0.0, -3.0));
        assert_eq!(exp_al(3.0, 1.0), (1.0, 2.0));
        assert_eq!(exp_al_inv(1.0, 2.0), (3.0, 1.0));
        assert_eq!(al_al(1.0, 2.0), (-2.0, -3.0));
        assert_eq!(al_al(-2.0, -3.0), (1.0, 2.0));
    }

    #[test]
    fn integer_and_float_agree() {
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                for c in -4i64..=0 {
                    let (u, v) = r_zero_11(a, b, c);
                    let (uf, vf) = r_zero_11(a as f64, b as f64, c as f64);
                    assert_eq!((u as f64, v as f64), (uf, vf));
                    let (u, v) = r_tilde_zero(a, b.abs(), c);
                    let (uf, vf) = r_tilde_zero(a as f64, b.abs() as f64, c as f64);
                    assert_eq!((u as f64, v as f64), (uf, vf));
                }
            }
        }
    }

    #[test]
    fn gap_tracks_nearest_tie() {
        let g = |v| Gapped::exact(v);
        let (u, _) = r_zero_01(g(1.0), g(2.0), g(2.05));
        assert!((u.gap - 0.05).abs() < 1e-12);
        assert!((u.value - 0.95).abs() < 1e-12);
        let (u, v) = r_tilde_zero(g(0.3), g(1.0), g(-1.0));
        assert!((u.gap.min(v.gap) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn f_zero_01_inverse_pair() {
        for &(x, y) in &[(1.0, 3.0), (3.0, 1.0), (-2.0, 0.5), (0.0, 0.0)] {
            let (p, q) = f_zero_01(x, y);
            assert_eq!(f_zero_01_inv(p, q), (x, y));
        }
    }
}
