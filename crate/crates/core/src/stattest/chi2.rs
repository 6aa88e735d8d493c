//! Pearson chi-square tests: goodness of fit on a lattice and independence
//! on quantile-binned pairs.

use std::collections::BTreeMap;

use super::report::{Component, TestReport};
use super::special::{chi2_isf, chi2_sf};
use crate::distributions::{DistributionSpec, Lattice};
use crate::error::{Error, Result};

pub const MIN_EXPECTED: f64 = 5.0;
pub const DEFAULT_BINS: usize = 8;

/// Merge adjacent (observed, expected) bins left to right until every
/// expected count reaches `MIN_EXPECTED`.
fn merge_small(bins: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut acc = (0.0, 0.0);
    for &(o, e) in bins {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= MIN_EXPECTED {
            out.push(acc);
            acc = (0.0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0.0 {
        match out.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => out.push(acc),
        }
    }
    out
}

fn pearson(bins: &[(f64, f64)]) -> f64 {
    bins.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum()
}

/// Chi-square goodness of fit for samples on `spec`'s lattice.
pub fn chi2_gof_component(name: &str, samples: &[f64], spec: &DistributionSpec, alpha: f64) -> Result<Component> {
    let lattice: Lattice = spec.lattice().ok_or_else(|| Error::Invalid(format!("{name}: chi-square GOF needs a lattice law")))?;
    let n = samples.len();
    let mut counts: BTreeMap<i64, f64> = BTreeMap::new();
    for (index, &x) in samples.iter().enumerate() {
        let k = lattice.index_of(x);
        if (lattice.point(k) - x).abs() > 1e-9 * x.abs().max(lattice.scale) {
            return Err(Error::SampleDomain { index, source: Box::new(Error::domain(name, x, "lattice support")) });
        }
        *counts.entry(k).or_default() += 1.0;
    }
    let (&lo, _) = counts.first_key_value().ok_or(Error::InsufficientSample { n: 0, min: 1 })?;
    let (&hi, _) = counts.last_key_value().unwrap();
    let nf = n as f64;
    let mut bins = Vec::with_capacity((hi - lo + 1) as usize);
    for k in lo..=hi {
        let x = lattice.point(k);
        let e = if k == lo && k == hi {
            nf
        } else if k == lo {
            nf * spec.cdf(x)
        } else if k == hi {
            nf * (1.0 - spec.cdf_lt(x))
        } else {
            nf * spec.mass(x)
        };
        bins.push((counts.get(&k).copied().unwrap_or(0.0), e));
    }
    let merged = merge_small(&bins);
    if merged.len() < 2 {
        return Err(Error::DegenerateBinning(format!("{name}: fewer than two bins after merging")));
    }
    let stat = pearson(&merged);
    let df = (merged.len() - 1) as f64;
    Ok(Component::at_most(name, stat, chi2_isf(alpha, df)).with_p(chi2_sf(stat, df)).with_note(format!("df={df}")))
}

pub fn chi2_gof(samples: &[f64], spec: &DistributionSpec, alpha: f64) -> Result<TestReport> {
    let c = chi2_gof_component("chi2_gof", samples, spec, alpha)?;
    Ok(TestReport::new("chi2_gof", samples.len(), vec![c]))
}

/// Bin labels for one coordinate: roughly equal-count bins that never split a
/// repeated value; values holding at least a quarter of a bin get their own bin.
fn quantile_labels(xs: &[f64], bins: usize) -> Vec<usize> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let target = n as f64 / bins as f64;
    let heavy = (target / 4.0).max(2.0);
    let mut labels = vec![0usize; n];
    let (mut bin, mut filled, mut pos) = (0usize, 0usize, 0usize);
    while pos < n {
        let v = xs[order[pos]];
        let mut end = pos;
        while end < n && xs[order[end]] == v {
            end += 1;
        }
        let group = end - pos;
        if group as f64 >= heavy && filled > 0 {
            bin += 1;
            filled = 0;
        }
        for &i in &order[pos..end] {
            labels[i] = bin;
        }
        filled += group;
        if filled as f64 >= target || group as f64 >= heavy {
            bin += 1;
            filled = 0;
        }
        pos = end;
    }
    labels
}

fn relabel(labels: &mut [usize]) -> usize {
    let mut distinct = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    for l in labels.iter_mut() {
        *l = distinct.binary_search(l).unwrap();
    }
    distinct.len()
}

/// Merge the smallest marginal bin with its smaller neighbour.
fn merge_smallest(labels: &mut [usize], k: usize) -> usize {
    let mut sizes = vec![0usize; k];
    for &l in labels.iter() {
        sizes[l] += 1;
    }
    let s = (0..k).min_by_key(|&i| sizes[i]).unwrap();
    let t = if s == 0 {
        1
    } else if s == k - 1 || sizes[s - 1] <= sizes[s + 1] {
        s - 1
    } else {
        s + 1
    };
    for l in labels.iter_mut() {
        if *l == s {
            *l = t;
        }
    }
    relabel(labels)
}

/// Chi-square test of independence on quantile bins (at most `bins` per coordinate).
pub fn chi2_independence_component(name: &str, pairs: &[(f64, f64)], bins: usize, alpha: f64) -> Result<Component> {
    let n = pairs.len();
    if n < 20 {
        return Err(Error::InsufficientSample { n, min: 20 });
    }
    let bins = bins.min(((n as f64 / MIN_EXPECTED).sqrt()).floor() as usize).max(2);
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let (mut lx, mut ly) = (quantile_labels(&xs, bins), quantile_labels(&ys, bins));
    let (mut kx, mut ky) = (relabel(&mut lx), relabel(&mut ly));
    loop {
        if kx < 2 || ky < 2 {
            return Err(Error::DegenerateBinning(format!("{name}: a coordinate has a single bin")));
        }
        let mut rx = vec![0usize; kx];
        let mut ry = vec![0usize; ky];
        for i in 0..n {
            rx[lx[i]] += 1;
            ry[ly[i]] += 1;
        }
        let (mx, my) = (*rx.iter().min().unwrap(), *ry.iter().min().unwrap());
        if (mx * my) as f64 / n as f64 >= MIN_EXPECTED {
            let mut table = vec![0.0f64; kx * ky];
            for i in 0..n {
                table[lx[i] * ky + ly[i]] += 1.0;
            }
            let mut stat = 0.0;
            for a in 0..kx {
                for b in 0..ky {
                    let e = (rx[a] * ry[b]) as f64 / n as f64;
                    let o = table[a * ky + b];
                    stat += (o - e) * (o - e) / e;
                }
            }
            let df = ((kx - 1) * (ky - 1)) as f64;
            return Ok(Component::at_most(name, stat, chi2_isf(alpha, df)).with_p(chi2_sf(stat, df)).with_note(format!("bins={kx}x{ky}")));
        }
        if mx <= my {
            kx = merge_smallest(&mut lx, kx);
        } else {
            ky = merge_smallest(&mut ly, ky);
        }
    }
}

pub fn chi2_independence(pairs: &[(f64, f64)], bins: usize, alpha: f64) -> Result<TestReport> {
    let c = chi2_independence_component("chi2_independence", pairs, bins, alpha)?;
    Ok(TestReport::new("chi2_independence", pairs.len(), vec![c]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::laws::{al, exp, sdal, ssgeo};
    use crate::rng::{child_seed, seeded};

    #[test]
    fn independent_pairs_pass_dependent_fail() {
        let mut fails = 0;
        for k in 0..20 {
            let mut r = seeded(child_seed(3, k));
            let a = exp(1.0).sample_values(&mut r, 100_000).unwrap();
            let b = exp(1.0).sample_values(&mut r, 100_000).unwrap();
            let pairs: Vec<_> = a.iter().copied().zip(b.iter().copied()).collect();
            if !chi2_independence(&pairs, DEFAULT_BINS, 0.01).unwrap().passed() {
                fails += 1;
            }
            let same: Vec<_> = a.iter().map(|&x| (x, x)).collect();
            assert!(!chi2_independence(&same, DEFAULT_BINS, 0.01).unwrap().passed());
        }
        assert!(fails <= 1);
    }

    #[test]
    fn atoms_get_their_own_bins() {
        let mut r = seeded(4);
        let a = al(1.0, 1.0).min_zero().sample_values(&mut r, 50_000).unwrap();
        let b = al(2.0, 1.0).max_zero().sample_values(&mut r, 50_000).unwrap();
        let pairs: Vec<_> = a.into_iter().zip(b).collect();
        let c = chi2_independence_component("x", &pairs, 8, 0.01).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn constant_coordinate_is_degenerate() {
        let pairs: Vec<_> = (0..1000).map(|i| (1.0, i as f64)).collect();
        assert!(matches!(chi2_independence(&pairs, 8, 0.01), Err(Error::DegenerateBinning(_))));
    }

    #[test]
    fn geometric_gof_example_and_power() {
        let spec = ssgeo(0.5, 0, 1.0);
        let mut fails = 0;
        for k in 0..20 {
            let mut r = seeded(child_seed(5, k));
            let xs = spec.sample_values(&mut r, 100_000).unwrap();
            if !chi2_gof(&xs, &spec, 0.01).unwrap().passed() {
                fails += 1;
            }
            assert!(!chi2_gof(&xs, &ssgeo(0.52, 0, 1.0), 0.01).unwrap().passed());
        }
        assert!(fails <= 1);
        let d = sdal(0.3, 0.5, 2.0);
        let mut r = seeded(6);
        let xs = d.sample_values(&mut r, 100_000).unwrap();
        assert!(chi2_gof(&xs, &d, 0.01).unwrap().passed());
        assert!(chi2_gof(&[0.5, 1.0], &d, 0.01).is_err());
    }

    #[test]
    fn small_samples_shrink_bins() {
        let mut r = seeded(7);
        let a = exp(1.0).sample_values(&mut r, 200).unwrap();
        let b = exp(1.0).sample_values(&mut r, 200).unwrap();
        let pairs: Vec<_> = a.into_iter().zip(b).collect();
        let c = chi2_independence_component("x", &pairs, 8, 0.01).unwrap();
        let note = c.note.unwrap();
        let dims: Vec<usize> = note.trim_start_matches("bins=").split('x').map(|d| d.parse().unwrap()).collect();
        assert!(dims.iter().all(|&d| (2..=6).contains(&d)), "{note}");
    }
}
