//! Burke's property: along a down-right path through a stationary grid the
//! crossed increments are independent, U ~ μ on horizontal steps and V ~ ν on
//! vertical ones.
//!
//! Independence is tested pairwise only: disjoint adjacent pairs and disjoint
//! lag-2 pairs, grouped by the kinds of the two increments.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{simulate, Boundary, LatticeGrid};
use crate::distributions::laws::*;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::maps::{MapId, PolymerMap};
use crate::rng::child_seed;
use crate::stattest::chi2::{chi2_independence_component, DEFAULT_BINS};
use crate::stattest::gof::{gof_component_count, gof_components, sidak};
use crate::stattest::ks::MIN_KS_SAMPLE;
use crate::stattest::report::{Component, TestReport};
use crate::stattest::stationarity::{self, Invariance};

pub const ALPHA: f64 = 0.01;
/// Paths stay at least this far (in n + m) from the origin.
pub const BURN_IN: usize = 50;
/// Pair classes smaller than this are not tested.
pub const MIN_PAIRS: usize = MIN_KS_SAMPLE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Increment {
    U,
    V,
}

/// Lattice vertices joined by unit steps right (n+1) or down (m−1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DownRightPath {
    pub vertices: Vec<(usize, usize)>,
}

impl DownRightPath {
    pub fn new(vertices: Vec<(usize, usize)>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Lattice("a path needs at least two vertices".into()));
        }
        for (i, w) in vertices.windows(2).enumerate() {
            let ((a, b), (c, d)) = (w[0], w[1]);
            let right = c == a + 1 && d == b;
            let down = c == a && d + 1 == b;
            if !(right || down) {
                return Err(Error::NotDownRight(i));
            }
        }
        Ok(Self { vertices })
    }

    /// Along height `m` from n = `from` to n = `to`.
    pub fn row(m: usize, from: usize, to: usize) -> Result<Self> {
        Self::new((from..=to).map(|n| (n, m)).collect())
    }

    /// Down column `n` from height `top` to height `bottom`.
    pub fn column(n: usize, top: usize, bottom: usize) -> Result<Self> {
        Self::new((bottom..=top).rev().map(|m| (n, m)).collect())
    }

    /// Alternating right, down, right, … for `steps` steps from `start`.
    pub fn staircase(start: (usize, usize), steps: usize) -> Result<Self> {
        let mut v = vec![start];
        let (mut n, mut m) = start;
        for i in 0..steps {
            if i % 2 == 0 {
                n += 1;
            } else {
                m = m.checked_sub(1).ok_or_else(|| Error::Lattice("staircase leaves the quadrant".into()))?;
            }
            v.push((n, m));
        }
        Self::new(v)
    }

    /// The increment crossed by each step: U_{n+1,m} for a right step from
    /// (n,m), V_{n,m} for a down step from (n,m).
    pub fn increments(&self) -> Vec<(Increment, usize, usize)> {
        self.vertices
            .windows(2)
            .map(|w| {
                let ((a, b), (c, _)) = (w[0], w[1]);
                if c == a + 1 {
                    (Increment::U, c, b)
                } else {
                    (Increment::V, a, b)
                }
            })
            .collect()
    }

    /// Smallest n + m over the vertices.
    pub fn distance_from_origin(&self) -> usize {
        self.vertices.iter().map(|&(n, m)| n + m).min().unwrap_or(0)
    }

    fn check_fits(&self, grid: &LatticeGrid) -> Result<()> {
        match self.vertices.iter().find(|&&(n, m)| n > grid.n || m > grid.m) {
            Some(&(n, m)) => Err(Error::Lattice(format!("path vertex ({n},{m}) outside a {}×{} grid", grid.n, grid.m))),
            None => Ok(()),
        }
    }
}

type Sequence = Vec<(Increment, f64)>;

fn collect(grid: &LatticeGrid, path: &DownRightPath) -> Sequence {
    path.increments()
        .into_iter()
        .map(|(k, n, m)| {
            let x = match k {
                Increment::U => grid.u(n, m),
                Increment::V => grid.v(n, m),
            };
            (k, x)
        })
        .collect()
}

fn is_point(spec: &DistributionSpec) -> bool {
    matches!(spec.atom(), Some((_, m)) if m >= 1.0)
}

/// Disjoint pairs at `lag` (1 or 2), keyed by the kinds of both ends.
fn pairs(seqs: &[Sequence], lag: usize) -> BTreeMap<(Increment, Increment), Vec<(f64, f64)>> {
    let mut out: BTreeMap<_, Vec<_>> = BTreeMap::new();
    let block = 2 * lag;
    for s in seqs {
        for start in (0..s.len()).step_by(block) {
            for j in start..start + lag {
                if j + lag < s.len() && j + lag < start + block {
                    let (a, b) = (s[j], s[j + lag]);
                    out.entry((a.0, b.0)).or_default().push((a.1, b.1));
                }
            }
        }
    }
    out
}

fn kind_name(k: Increment) -> &'static str {
    match k {
        Increment::U => "U",
        Increment::V => "V",
    }
}

/// The planned components of one path: (name, samples) for the marginals and
/// (name, pairs) for independence.
struct Plan {
    marginals: Vec<(String, Vec<f64>, DistributionSpec)>,
    pairs: Vec<(String, Vec<(f64, f64)>)>,
}

fn plan(prefix: &str, seqs: &[Sequence], mu: &DistributionSpec, nu: &DistributionSpec) -> Plan {
    let mut marginals = Vec::new();
    for (kind, spec) in [(Increment::U, mu), (Increment::V, nu)] {
        let xs: Vec<f64> = seqs.iter().flatten().filter(|p| p.0 == kind).map(|p| p.1).collect();
        if !xs.is_empty() {
            marginals.push((format!("{prefix}{}", kind_name(kind)), xs, *spec));
        }
    }
    let law = |k: Increment| if k == Increment::U { mu } else { nu };
    let mut ps = Vec::new();
    for (lag, label) in [(1, "adjacent"), (2, "lag2")] {
        for ((a, b), xy) in pairs(seqs, lag) {
            if xy.len() >= MIN_PAIRS && !is_point(law(a)) && !is_point(law(b)) {
                ps.push((format!("{prefix}{label}.{}{}.chi2", kind_name(a), kind_name(b)), xy));
            }
        }
    }
    Plan { marginals, pairs: ps }
}

impl Plan {
    fn count(&self) -> usize {
        self.marginals.iter().map(|m| gof_component_count(&m.2)).sum::<usize>() + self.pairs.len()
    }

    fn components(&self, alpha: f64) -> Result<Vec<Component>> {
        let mut out = Vec::new();
        for (name, xs, spec) in &self.marginals {
            out.extend(gof_components(name, xs, spec, alpha)?);
        }
        for (name, xy) in &self.pairs {
            out.push(chi2_independence_component(name, xy, DEFAULT_BINS, alpha)?);
        }
        Ok(out)
    }
}

fn report(paths: &[(&str, &DownRightPath)], grids: &[LatticeGrid], mu: &DistributionSpec, nu: &DistributionSpec) -> Result<TestReport> {
    let mut plans = Vec::new();
    for (label, path) in paths {
        for g in grids {
            path.check_fits(g)?;
        }
        let seqs: Vec<Sequence> = grids.iter().map(|g| collect(g, path)).collect();
        let prefix = if label.is_empty() { String::new() } else { format!("{label}.") };
        plans.push(plan(&prefix, &seqs, mu, nu));
    }
    let alpha = sidak(ALPHA, plans.iter().map(Plan::count).sum());
    let mut comps = Vec::new();
    for p in &plans {
        comps.extend(p.components(alpha)?);
    }
    let n = plans.iter().flat_map(|p| p.marginals.iter().map(|m| m.1.len())).max().unwrap_or(0);
    Ok(TestReport::new("burke", n, comps))
}

/// Marginal fit and pairwise independence of the increments crossed by
/// `path`, at family-wise level 1%.
pub fn burke_check(grid: &LatticeGrid, path: &DownRightPath, mu: &DistributionSpec, nu: &DistributionSpec) -> Result<TestReport> {
    burke_check_many(std::slice::from_ref(grid), path, mu, nu)
}

/// [`burke_check`] pooling the increments of independent grids.
pub fn burke_check_many(grids: &[LatticeGrid], path: &DownRightPath, mu: &DistributionSpec, nu: &DistributionSpec) -> Result<TestReport> {
    report(&[("", path)], grids, mu, nu)
}

/// The three standard paths of an N×M grid: the top row, the right column,
/// and a staircase from (BURN_IN, M) running until it reaches height BURN_IN
/// or the right edge.
pub fn standard_paths(n: usize, m: usize) -> Result<Vec<(&'static str, DownRightPath)>> {
    if n < BURN_IN + 2 || m < BURN_IN + 2 {
        return Err(Error::Lattice(format!("grid {n}×{m} too small for paths at distance {BURN_IN}")));
    }
    let steps = 2 * (n - BURN_IN).min(m - BURN_IN);
    Ok(vec![
        ("row", DownRightPath::row(m, 0, n)?),
        ("column", DownRightPath::column(n, m, 0)?),
        ("staircase", DownRightPath::staircase((BURN_IN, m), steps)?),
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct BurkeEntry {
    pub key: &'static str,
    pub statement: String,
    pub model: PolymerMap,
    /// Laws used to simulate the grid.
    pub boundary: Boundary,
    /// Laws the increments are tested against.
    pub mu: DistributionSpec,
    pub nu: DistributionSpec,
    pub expect_pass: bool,
}

impl BurkeEntry {
    /// Simulates enough independent N×M grids that every path yields at
    /// least `samples` increments of each kind it crosses, then tests all
    /// standard paths in one report.
    pub fn run(&self, n: usize, m: usize, samples: usize, seed: u64) -> Result<TestReport> {
        let paths = standard_paths(n, m)?;
        let per_grid = paths
            .iter()
            .flat_map(|(_, p)| {
                let inc = p.increments();
                [Increment::U, Increment::V].map(|k| inc.iter().filter(|i| i.0 == k).count())
            })
            .filter(|&c| c > 0)
            .min()
            .unwrap_or(1);
        let count = samples.div_ceil(per_grid).max(1);
        let grids = (0..count as u64)
            .into_par_iter()
            .map(|g| simulate(&self.model, n, m, &self.boundary, child_seed(seed, g)))
            .collect::<Result<Vec<_>>>()?;
        let refs: Vec<(&str, &DownRightPath)> = paths.iter().map(|(l, p)| (*l, p)).collect();
        Ok(report(&refs, &grids, &self.mu, &self.nu)?.with_case(self.key).with_seed(seed))
    }
}

fn build() -> Vec<BurkeEntry> {
    let mut out: Vec<BurkeEntry> = stationarity::registry()
        .iter()
        .filter(|e| e.expect_pass)
        .filter_map(|e| {
            let c = &e.settings[0];
            let Invariance::Recursion { map } = &c.invariance else { return None };
            Some(BurkeEntry {
                key: e.key,
                statement: format!("increments along down-right paths of the stationary {} grid", c.describe()),
                model: map.clone(),
                boundary: Boundary::new([c.mu_tilde, c.mu, c.nu]),
                mu: c.mu,
                nu: c.nu,
                expect_pass: true,
            })
        })
        .collect();
    let (r, s, t) = (1.0, 1.0, 1.0);
    let wrong = ig(r, 2.0 * t);
    out.push(BurkeEntry {
        key: "t42-a-misscaled",
        statement: "R_(0,1) grid with U boundary IG(ρ,2τ) instead of IG(ρ,τ) is not stationary".into(),
        model: PolymerMap::fixed(MapId::R { alpha: 0.0, beta: 1.0 }),
        boundary: Boundary::new([ig(r + s, t), wrong, ig(s, t)]),
        mu: wrong,
        nu: ig(s, t),
        expect_pass: false,
    });
    out
}

pub fn registry() -> &'static [BurkeEntry] {
    static R: OnceLock<Vec<BurkeEntry>> = OnceLock::new();
    R.get_or_init(build)
}

pub fn keys() -> Vec<&'static str> {
    registry().iter().map(|e| e.key).collect()
}

pub fn get(key: &str) -> Result<&'static BurkeEntry> {
    registry().iter().find(|e| e.key == key).ok_or_else(|| Error::unknown_key(key, keys()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_validation() {
        assert!(DownRightPath::new(vec![(0, 2), (1, 2), (1, 1), (2, 1)]).is_ok());
        assert_eq!(DownRightPath::new(vec![(0, 2), (1, 2), (1, 3)]), Err(Error::NotDownRight(1)));
        assert_eq!(DownRightPath::new(vec![(0, 0), (2, 0)]), Err(Error::NotDownRight(0)));
        let p = DownRightPath::staircase((1, 3), 4).unwrap();
        assert_eq!(p.vertices, vec![(1, 3), (2, 3), (2, 2), (3, 2), (3, 1)]);
        assert_eq!(p.increments(), vec![(Increment::U, 2, 3), (Increment::V, 2, 3), (Increment::U, 3, 2), (Increment::V, 3, 2)]);
    }

    #[test]
    fn disjoint_pairs() {
        let s: Sequence = (0..8).map(|i| (Increment::U, i as f64)).collect();
        let p1 = &pairs(std::slice::from_ref(&s), 1)[&(Increment::U, Increment::U)];
        assert_eq!(p1, &vec![(0.0, 1.0), (2.0, 3.0), (4.0, 5.0), (6.0, 7.0)]);
        let p2 = &pairs(std::slice::from_ref(&s), 2)[&(Increment::U, Increment::U)];
        assert_eq!(p2, &vec![(0.0, 2.0), (1.0, 3.0), (4.0, 6.0), (5.0, 7.0)]);
    }

    #[test]
    fn path_outside_grid_is_an_error() {
        let e = get("t42-a").unwrap();
        let g = simulate(&e.model, 5, 5, &e.boundary, 1).unwrap();
        let p = DownRightPath::row(6, 0, 3).unwrap();
        assert!(matches!(burke_check(&g, &p, &e.mu, &e.nu), Err(Error::Lattice(_))));
    }

    #[test]
    fn stationary_grid_passes_and_misscaled_fails() {
        assert!(get("t42-a").unwrap().run(80, 80, 3_000, 11).unwrap().passed());
        assert!(get("t45-d-cont").unwrap().run(80, 80, 3_000, 11).unwrap().passed());
        assert!(!get("t42-a-misscaled").unwrap().run(80, 80, 10_000, 11).unwrap().passed());
    }
}
