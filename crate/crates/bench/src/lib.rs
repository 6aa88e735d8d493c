//! Fixtures shared by the criterion benches.

use polymer_core::lattice::burke::{self, BurkeEntry};
use polymer_core::rng::seeded;
use polymer_core::DistributionSpec;

pub const SEED: u64 = 2026;

pub fn burke_entry(key: &str) -> &'static BurkeEntry {
    burke::get(key).expect("registered burke key")
}

/// `n` draws from `spec` on a fixed stream.
pub fn draws(spec: &DistributionSpec, n: usize) -> Vec<f64> {
    spec.sample_values(&mut seeded(SEED), n).expect("valid law")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        let e = burke_entry("t42-a");
        assert_eq!(draws(&e.boundary.mu, 50), draws(&e.boundary.mu, 50));
    }
}
