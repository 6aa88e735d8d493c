//! Random walk in a beta environment.
//!
//! Ẑ_{n,m} = X̂_{n,m} Ẑ_{n,m−1} + (1 − X̂_{n,m}) Ẑ_{n−1,m−1} with Ẑ_{n,0} = 1 for
//! n ≥ 1 and Ẑ_{n,m} = 0 for n ≤ 0. Read as a walk of m steps from state
//! (n, m): from (ℓ, t) it steps up to (ℓ, t−1) with probability X̂_{ℓ,t} and
//! down to (ℓ−1, t−1) otherwise, so Ẑ_{n,m} is the probability of at most
//! n − 1 down-steps, i.e. of S_m ≥ m − 2n + 2.
//!
//! The shear Z_{n,k} = Ẑ_{n,n+k}, X_{n,k} = X̂_{n,n+k} turns the recursion into
//! Z_{n,k} = (1 − X_{n,k}) Z_{n−1,k} + X_{n,k} Z_{n,k−1}, the edge-weight
//! polymer with u(x) = 1 − x and v(x) = x, on the boundary Z_{0,k} = 0 (k ≥ 0)
//! and Z_{n,−1} = 1 (n ≥ 1).

use serde::Serialize;

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::Streams;

/// Largest m accepted by [`path_enumeration`].
pub const MAX_ENUMERATION_STEPS: usize = 24;

/// X̂_{ℓ,t} for 1 ≤ ℓ ≤ levels, 1 ≤ t ≤ steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaEnvironment {
    pub levels: usize,
    pub steps: usize,
    values: Vec<f64>,
}

impl BetaEnvironment {
    /// `values[(ℓ−1)·steps + (t−1)] = X̂_{ℓ,t}`, each in [0,1].
    pub fn new(levels: usize, steps: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != levels * steps {
            return Err(Error::Lattice(format!("expected {} environment values, got {}", levels * steps, values.len())));
        }
        if let Some(i) = values.iter().position(|x| !(0.0..=1.0).contains(x)) {
            return Err(Error::domain("environment value", values[i], "[0,1]"));
        }
        Ok(Self { levels, steps, values })
    }

    /// I.i.d. draws from `law` (typically a beta law), one stream per site.
    pub fn sample(law: &DistributionSpec, levels: usize, steps: usize, seed: u64) -> Result<Self> {
        law.validate()?;
        let s = Streams::new(seed);
        let values = (0..(levels * steps) as u64).map(|i| law.sample_one(&mut s.get(i)).value).collect();
        Self::new(levels, steps, values)
    }

    pub fn get(&self, level: usize, step: usize) -> f64 {
        self.values[(level - 1) * self.steps + (step - 1)]
    }

    fn check(&self, n: i64, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::Lattice("the walk needs m ≥ 1 steps".into()));
        }
        if m > self.steps || (n > 0 && (n as usize).min(m) > self.levels) {
            return Err(Error::Lattice(format!(
                "Ẑ_({n},{m}) needs sites up to ({},{m}); the environment covers ({},{})",
                n.clamp(0, m as i64),
                self.levels,
                self.steps
            )));
        }
        Ok(())
    }
}

/// Ẑ_{n,m} by the recursion.
pub fn rwre_partition(env: &BetaEnvironment, n: i64, m: usize) -> Result<f64> {
    env.check(n, m)?;
    if n <= 0 {
        return Ok(0.0);
    }
    let n = n as usize;
    // Levels above m never run out of down-steps.
    let top = n.min(m);
    // row[ℓ] = Ẑ_{ℓ,t} for the current t, ℓ = 0..=top.
    let mut row = vec![1.0; top + 1];
    row[0] = 0.0;
    for t in 1..=m {
        for l in (1..=top).rev() {
            let up = if l > t - 1 { 1.0 } else { row[l] };
            let x = env.get(l, t);
            row[l] = x * up + (1.0 - x) * row[l - 1];
        }
    }
    Ok(if n > m { 1.0 } else { row[n] })
}

/// Ẑ_{n,m} by summing the probabilities of all 2^m step sequences with at
/// most n − 1 down-steps.
pub fn path_enumeration(env: &BetaEnvironment, n: i64, m: usize) -> Result<f64> {
    env.check(n, m)?;
    if m > MAX_ENUMERATION_STEPS {
        return Err(Error::Lattice(format!("2^{m} sequences exceed the enumeration limit")));
    }
    if n <= 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for bits in 0u64..(1 << m) {
        let (mut level, mut p) = (n, 1.0);
        for s in 0..m {
            let t = m - s;
            if level <= 0 {
                break;
            }
            // Levels above the remaining time cannot be reached by down-steps;
            // their environment is never read.
            let x = if level as usize > env.levels { 1.0 } else { env.get(level as usize, t) };
            if bits >> s & 1 == 1 {
                p *= x;
            } else {
                p *= 1.0 - x;
                level -= 1;
            }
        }
        if level >= 1 {
            total += p;
        }
    }
    Ok(total)
}

/// Ẑ_{n,m} through the sheared edge-weight polymer: Z_{n,m−n} on the grid
/// Z_{n',k} = (1 − X) Z_{n'−1,k} + X Z_{n',k−1}.
pub fn sheared_partition(env: &BetaEnvironment, n: i64, m: usize) -> Result<f64> {
    env.check(n, m)?;
    if n <= 0 {
        return Ok(0.0);
    }
    let n = n as usize;
    if n > m {
        return Ok(1.0);
    }
    let kmax = m - n;
    // z[n'][k + 1] = Z_{n',k} for k = −1..=kmax.
    let mut z = vec![vec![0.0; kmax + 2]; n + 1];
    for row in z.iter_mut().skip(1) {
        row[0] = 1.0;
    }
    for np in 1..=n {
        for k in 0..=kmax {
            let x = env.get(np, np + k);
            let (u, v) = (1.0 - x, x);
            z[np][k + 1] = u * z[np - 1][k + 1] + v * z[np][k];
        }
    }
    Ok(z[n][kmax + 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::laws::be;

    #[test]
    fn one_step() {
        let env = BetaEnvironment::new(2, 1, vec![0.3, 0.8]).unwrap();
        assert_eq!(rwre_partition(&env, 1, 1).unwrap(), 0.3);
        assert_eq!(rwre_partition(&env, 2, 1).unwrap(), 1.0);
        assert_eq!(rwre_partition(&env, 0, 1).unwrap(), 0.0);
        assert_eq!(rwre_partition(&env, -3, 1).unwrap(), 0.0);
    }

    #[test]
    fn recursion_matches_enumeration_and_shear() {
        let env = BetaEnvironment::sample(&be(1.5, 2.5), 12, 12, 3).unwrap();
        for m in 1..=12 {
            for n in -1..=13 {
                let r = rwre_partition(&env, n, m).unwrap();
                let e = path_enumeration(&env, n, m).unwrap();
                let s = sheared_partition(&env, n, m).unwrap();
                assert!((r - e).abs() <= 1e-12, "({n},{m}): {r} vs {e}");
                assert!((r - s).abs() <= 1e-12, "({n},{m}): {r} vs {s}");
            }
        }
    }

    #[test]
    fn out_of_range_requests_fail() {
        let env = BetaEnvironment::new(2, 2, vec![0.5; 4]).unwrap();
        assert!(rwre_partition(&env, 1, 0).is_err());
        assert!(rwre_partition(&env, 1, 3).is_err());
        assert!(rwre_partition(&env, 3, 2).is_ok());
        assert!(BetaEnvironment::new(1, 1, vec![1.5]).is_err());
    }
}
