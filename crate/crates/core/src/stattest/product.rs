//! Push a product law through a map and test that the image is the claimed
//! product law: one mixed-aware fit per output coordinate plus chi-square
//! independence for selected pairs of outputs.

use rayon::prelude::*;

use super::chi2::{chi2_independence_component, DEFAULT_BINS};
use super::gof::{gof_component_count, gof_components};
use super::report::Component;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::Streams;

/// Draw `n` points of `inputs[0] × inputs[1] × …` and apply `f` to each.
/// Draw `i` uses sub-stream `i`, so results do not depend on threading.
/// Returns one column per output coordinate.
pub fn push_forward<F>(inputs: &[DistributionSpec], n: usize, seed: u64, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    for spec in inputs {
        spec.validate()?;
    }
    let streams = Streams::new(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = streams.get(i as u64);
            let x: Vec<f64> = inputs.iter().map(|s| s.sample_one(&mut rng).value).collect();
            f(&x).map_err(|e| Error::SampleDomain { index: i, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    let width = rows.first().map_or(0, Vec::len);
    Ok((0..width).map(|j| rows.iter().map(|r| r[j]).collect()).collect())
}

fn is_point(spec: &DistributionSpec) -> bool {
    matches!(spec.atom(), Some((_, m)) if m >= 1.0)
}

/// Pairs whose independence is actually tested: a point mass is independent
/// of everything, and chi-square on it would be degenerate.
fn tested_pairs(claimed: &[DistributionSpec], pairs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    pairs.iter().copied().filter(|&(i, j)| !is_point(&claimed[i]) && !is_point(&claimed[j])).collect()
}

/// Number of components [`product_components`] produces.
pub fn product_component_count(claimed: &[DistributionSpec], pairs: &[(usize, usize)]) -> usize {
    claimed.iter().map(gof_component_count).sum::<usize>() + tested_pairs(claimed, pairs).len()
}

/// Fit of each column to its claimed law and independence of `pairs`, each
/// component at level `alpha`.
pub fn product_components(
    prefix: &str,
    names: &[&str],
    columns: &[Vec<f64>],
    claimed: &[DistributionSpec],
    pairs: &[(usize, usize)],
    alpha: f64,
) -> Result<Vec<Component>> {
    let mut out = Vec::new();
    for ((name, col), spec) in names.iter().zip(columns).zip(claimed) {
        out.extend(gof_components(&format!("{prefix}{name}"), col, spec, alpha)?);
    }
    for (i, j) in tested_pairs(claimed, pairs) {
        let xy: Vec<(f64, f64)> = columns[i].iter().copied().zip(columns[j].iter().copied()).collect();
        let name = format!("{prefix}{}⊥{}.chi2", names[i], names[j]);
        out.push(chi2_independence_component(&name, &xy, DEFAULT_BINS, alpha)?);
    }
    Ok(out)
}
