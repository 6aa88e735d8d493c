//! Kolmogorov–Smirnov statistics with asymptotic critical values.

use super::report::{Component, TestReport};
use super::special::{kolmogorov_sf, ks_critical};
use crate::error::{Error, Result};

pub const MIN_KS_SAMPLE: usize = 100;

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// sup_x |F_n(x) − F(x)| for a continuous `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let xs = sorted(samples);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// One-sample KS component at level `alpha`.
pub fn ks_one_sample_component(name: &str, samples: &[f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> Result<Component> {
    let n = samples.len();
    if n < MIN_KS_SAMPLE {
        return Err(Error::InsufficientSample { n, min: MIN_KS_SAMPLE });
    }
    let d = ks_statistic(samples, cdf);
    let rn = (n as f64).sqrt();
    Ok(Component::at_most(name, d, ks_critical(alpha) / rn).with_p(kolmogorov_sf(d * rn)))
}

pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64, alpha: f64) -> Result<TestReport> {
    let c = ks_one_sample_component("ks", samples, cdf, alpha)?;
    Ok(TestReport::new("ks_one_sample", samples.len(), vec![c]))
}

/// Empirical CDF evaluator on a sorted sample.
pub struct Ecdf {
    xs: Vec<f64>,
}

impl Ecdf {
    pub fn new(xs: &[f64]) -> Self {
        Self { xs: sorted(xs) }
    }
    pub fn len(&self) -> usize {
        self.xs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
    /// Fraction ≤ x.
    pub fn at(&self, x: f64) -> f64 {
        self.xs.partition_point(|&v| v <= x) as f64 / self.xs.len() as f64
    }
    pub fn values(&self) -> &[f64] {
        &self.xs
    }
}

/// Two-sample KS distance, ties handled by evaluating after each distinct value.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() || j < b.len() {
        let x = match (a.get(i), b.get(j)) {
            (Some(&u), Some(&v)) => u.min(v),
            (Some(&u), None) => u,
            (None, Some(&v)) => v,
            (None, None) => break,
        };
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sample KS distance restricted to points at distance ≥ `halfwidth`
/// from each `atoms` location.
pub fn ks_two_sample_statistic_excluding(a: &[f64], b: &[f64], atoms: &[f64], halfwidth: f64) -> f64 {
    if atoms.is_empty() {
        return ks_two_sample_statistic(a, b);
    }
    let (fa, fb) = (Ecdf::new(a), Ecdf::new(b));
    let inside = |x: f64| atoms.iter().any(|&c| (x - c).abs() < halfwidth);
    let mut points: Vec<f64> = fa.values().iter().chain(fb.values()).copied().filter(|&x| !inside(x)).collect();
    for &c in atoms {
        points.push(c - halfwidth);
        points.push(c + halfwidth);
    }
    points.iter().fold(0.0f64, |d, &x| d.max((fa.at(x) - fb.at(x)).abs()))
}

/// Asymptotic two-sample critical value at level `alpha`.
pub fn ks_two_sample_critical(n1: usize, n2: usize, alpha: f64) -> f64 {
    ks_critical(alpha) * ((n1 + n2) as f64 / (n1 as f64 * n2 as f64)).sqrt()
}

pub fn ks_two_sample_component(name: &str, a: &[f64], b: &[f64], alpha: f64) -> Result<Component> {
    for n in [a.len(), b.len()] {
        if n < MIN_KS_SAMPLE {
            return Err(Error::InsufficientSample { n, min: MIN_KS_SAMPLE });
        }
    }
    let d = ks_two_sample_statistic(a, b);
    let ne = (a.len() as f64 * b.len() as f64 / (a.len() + b.len()) as f64).sqrt();
    Ok(Component::at_most(name, d, ks_two_sample_critical(a.len(), b.len(), alpha)).with_p(kolmogorov_sf(d * ne)))
}

pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> Result<TestReport> {
    let c = ks_two_sample_component("ks", a, b, alpha)?;
    Ok(TestReport::new("ks_two_sample", a.len().min(b.len()), vec![c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::laws::exp;
    use crate::rng::{child_seed, seeded};

    #[test]
    fn exponential_null_and_power() {
        let mut fails = 0;
        for k in 0..20 {
            let mut r = seeded(child_seed(1, k));
            let xs = exp(1.0).sample_values(&mut r, 100_000).unwrap();
            if !ks_one_sample(&xs, |x| exp(1.0).cdf(x), 0.01).unwrap().passed() {
                fails += 1;
            }
            assert!(!ks_one_sample(&xs, |x| exp(1.1).cdf(x), 0.01).unwrap().passed());
        }
        assert!(fails <= 1);
    }

    #[test]
    fn two_sample_null_and_split_halves() {
        let mut fails = 0;
        for k in 0..20 {
            let mut r = seeded(child_seed(2, k));
            let a = exp(1.0).sample_values(&mut r, 20_000).unwrap();
            let b = exp(1.0).sample_values(&mut r, 30_000).unwrap();
            if !ks_two_sample(&a, &b, 0.01).unwrap().passed() {
                fails += 1;
            }
            let (h1, h2) = a.split_at(10_000);
            assert!(ks_two_sample(h1, h1, 0.01).unwrap().passed());
            let _ = h2;
        }
        assert!(fails <= 1);
    }

    #[test]
    fn tiny_samples_are_rejected() {
        assert!(matches!(ks_one_sample(&[1.0; 10], |x| x, 0.01), Err(Error::InsufficientSample { .. })));
    }

    #[test]
    fn statistic_matches_hand_computation() {
        assert_eq!(ks_two_sample_statistic(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert_eq!(ks_two_sample_statistic(&[1.0, 2.0, 2.0], &[2.0, 2.0, 1.0]), 0.0);
        let d = ks_statistic(&[0.5], |x| x);
        assert!((d - 0.5).abs() < 1e-15);
    }

    #[test]
    fn excluding_window_ignores_mass_collapsing_onto_atom() {
        // a: atom at 0; b: same mass spread just above 0
        let a: Vec<f64> = (0..1000).map(|i| if i < 500 { 0.0 } else { 1.0 + i as f64 / 1000.0 }).collect();
        let b: Vec<f64> = (0..1000).map(|i| if i < 500 { 1e-12 * (i + 1) as f64 } else { 1.0 + i as f64 / 1000.0 }).collect();
        assert!(ks_two_sample_statistic(&a, &b) > 0.4);
        assert_eq!(ks_two_sample_statistic_excluding(&a, &b, &[0.0], 1e-9), 0.0);
    }
}
