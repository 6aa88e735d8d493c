//! Special functions, KS and chi-square tests, mixed-aware goodness of fit,
//! and the detailed-balance, stationarity and limit verdict procedures.

pub mod balance;
pub mod chi2;
pub mod dist_limit;
pub mod gof;
pub mod ks;
pub mod product;
pub mod report;
pub mod special;
pub mod stationarity;

pub use chi2::{chi2_gof, chi2_independence};
pub use ks::{ks_one_sample, ks_two_sample};
pub use report::{Component, StabilityReport, TestReport, Verdict};

use rayon::prelude::*;

use crate::error::Result;
use crate::rng::child_seed;

/// Number of independent seeds in a stability run.
pub const STABILITY_SEEDS: usize = 20;
/// Failures tolerated among [`STABILITY_SEEDS`] runs of a 1% test.
pub const STABILITY_ALLOWED: usize = 1;

/// Runs `run` on `seeds` child seeds of `seed` and counts failures.
pub fn stability<F>(case: &str, seed: u64, seeds: usize, allowed: usize, run: F) -> Result<StabilityReport>
where
    F: Fn(u64) -> Result<TestReport> + Sync,
{
    let runs = (0..seeds as u64).into_par_iter().map(|k| run(child_seed(seed, k))).collect::<Result<Vec<_>>>()?;
    Ok(StabilityReport::new(case, runs, allowed))
}
