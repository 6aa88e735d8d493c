//! Goodness of fit against a [`DistributionSpec`], aware of atoms and lattices.

use super::chi2::chi2_gof_component;
use super::ks::{
    ks_one_sample_component, ks_two_sample_component, ks_two_sample_critical, ks_two_sample_statistic_excluding, MIN_KS_SAMPLE,
};
use super::report::Component;
use super::special::normal_isf;
use crate::distributions::DistributionSpec;
use crate::error::Result;

/// Per-component level keeping the family-wise level at `alpha` over `k` tests.
pub fn sidak(alpha: f64, k: usize) -> f64 {
    1.0 - (1.0 - alpha).powf(1.0 / k.max(1) as f64)
}

/// z threshold for atom frequencies: three standard errors at least.
pub fn atom_z(alpha: f64) -> f64 {
    normal_isf(alpha / 2.0).max(3.0)
}

/// Number of components [`gof_components`] produces for `spec`.
pub fn gof_component_count(spec: &DistributionSpec) -> usize {
    if spec.lattice().is_some() {
        1
    } else if let Some((_, mass)) = spec.atom() {
        if mass >= 1.0 {
            1
        } else {
            2
        }
    } else {
        1
    }
}

fn atom_component(name: &str, samples: &[f64], at: f64, mass: f64, alpha: f64) -> Component {
    let n = samples.len() as f64;
    let freq = samples.iter().filter(|&&x| x == at).count() as f64 / n;
    let se = (mass * (1.0 - mass) / n).sqrt();
    let tol = atom_z(alpha) * se;
    let c = Component::at_most(format!("{name}.atom"), (freq - mass).abs(), tol).with_note(format!("observed {freq}, expected {mass}"));
    if mass >= 1.0 {
        c.forced(freq == 1.0)
    } else {
        c
    }
}

/// Mixed-aware one-sample fit of `samples` to `spec` at per-component level
/// `alpha`: chi-square on lattices, atom frequency plus conditional KS for
/// clipped laws, plain KS otherwise.
pub fn gof_components(name: &str, samples: &[f64], spec: &DistributionSpec, alpha: f64) -> Result<Vec<Component>> {
    if spec.lattice().is_some() {
        return Ok(vec![chi2_gof_component(&format!("{name}.chi2"), samples, spec, alpha)?]);
    }
    match spec.atom() {
        Some((at, mass)) if mass >= 1.0 => Ok(vec![atom_component(name, samples, at, mass, alpha)]),
        Some((at, mass)) => {
            let atom = atom_component(name, samples, at, mass, alpha);
            let rest: Vec<f64> = samples.iter().copied().filter(|&x| x != at).collect();
            let cond = |x: f64| {
                let f = spec.cdf(x) - if x >= at { mass } else { 0.0 };
                (f / (1.0 - mass)).clamp(0.0, 1.0)
            };
            let ks = ks_one_sample_component(&format!("{name}.ks_continuous"), &rest, cond, alpha)?;
            Ok(vec![atom, ks])
        }
        None => Ok(vec![ks_one_sample_component(&format!("{name}.ks"), samples, |x| spec.cdf(x), alpha)?]),
    }
}

/// Mixed-aware two-sample comparison: atoms at `atoms` compared by frequency
/// (two-proportion z), the remaining values by two-sample KS.
pub fn two_sample_components(name: &str, a: &[f64], b: &[f64], atoms: &[f64], alpha: f64) -> Result<Vec<Component>> {
    if atoms.is_empty() {
        return Ok(vec![ks_two_sample_component(&format!("{name}.ks"), a, b, alpha)?]);
    }
    let mut out = Vec::new();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    for &at in atoms {
        let fa = a.iter().filter(|&&x| x == at).count() as f64 / na;
        let fb = b.iter().filter(|&&x| x == at).count() as f64 / nb;
        let p = (fa * na + fb * nb) / (na + nb);
        let se = (p * (1.0 - p) * (1.0 / na + 1.0 / nb)).sqrt();
        out.push(Component::at_most(format!("{name}.atom@{at}"), (fa - fb).abs(), atom_z(alpha) * se));
    }
    let ra: Vec<f64> = a.iter().copied().filter(|x| !atoms.contains(x)).collect();
    let rb: Vec<f64> = b.iter().copied().filter(|x| !atoms.contains(x)).collect();
    if ra.len() >= MIN_KS_SAMPLE && rb.len() >= MIN_KS_SAMPLE {
        out.push(ks_two_sample_component(&format!("{name}.ks_continuous"), &ra, &rb, alpha)?);
    }
    Ok(out)
}

/// Two-sample KS distance for limit comparisons, skipping a small window
/// around each target atom, with its critical value at level `alpha`.
pub fn limit_distance(pre: &[f64], target: &[f64], atoms: &[f64], alpha: f64) -> (f64, f64) {
    let d = ks_two_sample_statistic_excluding(pre, target, atoms, ATOM_WINDOW);
    (d, ks_two_sample_critical(pre.len(), target.len(), alpha))
}

/// Half-width of the window around target atoms excluded from limit distances.
pub const ATOM_WINDOW: f64 = 1e-9;
