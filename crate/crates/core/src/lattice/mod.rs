//! Upper-right-corner lattice models.
//!
//! Inputs are i.i.d. disorder X_{n,m} (1 ≤ n ≤ N, 1 ≤ m ≤ M) with law μ̃,
//! boundary increments U_{n,0} ~ μ and V_{0,m} ~ ν. The interior is filled by
//! (U_{n,m}, V_{n,m}) = R(X_{n,m}, U_{n,m−1}, V_{n−1,m}), and Z by the
//! partition-function recursion with the edge weights (u, v) behind R:
//! Z = u·Z_{n−1,m} + v·Z_{n,m−1}, or Z = min(u + Z_{n−1,m}, v + Z_{n,m−1})
//! at zero temperature. Z_{0,0} is 1 (positive) or 0 (zero temperature).
//!
//! Positive-temperature fields are stored as natural logs, so both cases keep
//! an additive Z field. Zero-temperature models whose three laws live on a
//! common lattice m·ℤ are filled in integer arithmetic on the index.

pub mod burke;
pub mod experiment;
pub mod rwre;

use std::ops::Add;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{log_add_exp, DistributionSpec, Modifier};
use crate::error::{Error, Result};
use crate::maps::tropical::z_step;
use crate::maps::{MapId, PolymerMap, Temperature};
use crate::rng::{Rng, Streams};
use crate::stattest::report::sig17;

/// Recursion residual allowed on every interior cell (relative).
pub const RECURSION_TOL: f64 = 1e-10;
/// Allowed gap between Z and its row or column reconstruction.
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
/// Largest number of up-right paths [`path_enumeration`] will visit.
pub const MAX_PATHS: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillOrder {
    #[default]
    Rows,
    Columns,
    /// Cells with equal n + m are independent and computed in parallel.
    AntiDiagonals,
}

/// Laws of X (μ̃), of the boundary U_{n,0} (μ) and of V_{0,m} (ν).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub mu_tilde: DistributionSpec,
    pub mu: DistributionSpec,
    pub nu: DistributionSpec,
}

impl Boundary {
    pub fn new(triple: [DistributionSpec; 3]) -> Self {
        let [mu_tilde, mu, nu] = triple;
        Self { mu_tilde, mu, nu }
    }

    pub fn specs(&self) -> [DistributionSpec; 3] {
        [self.mu_tilde, self.mu, self.nu]
    }

    fn validate_for(&self, model: &PolymerMap) -> Result<()> {
        for ((spec, dom), what) in self.specs().iter().zip(&model.domain).zip(["X", "U boundary", "V boundary"]) {
            spec.validate()?;
            let (lo, hi) = spec.support();
            if lo < dom.lo || hi > dom.hi {
                return Err(Error::Lattice(format!(
                    "{what} law {} has support [{lo}, {hi}] outside {} domain {dom}",
                    spec.describe(),
                    model.name()
                )));
            }
        }
        Ok(())
    }

    /// Common lattice spacing when all three laws sit on m·ℤ and the
    /// modifiers keep them there.
    fn index_scale(&self) -> Option<f64> {
        let mut scale = None;
        for s in self.specs() {
            let l = s.lattice()?;
            if l.origin != 0.0 || matches!(s.modifier, Some(Modifier::Scale(_)) | Some(Modifier::Shift(_))) {
                return None;
            }
            match scale {
                None => scale = Some(l.scale),
                Some(k) if k == l.scale => {}
                Some(_) => return None,
            }
        }
        scale
    }
}

/// How stored numbers map to field values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Encoding {
    /// Natural logs (positive temperature).
    Log,
    /// Values as they are (zero temperature).
    Plain,
    /// Integer multiples of `scale` (discrete zero temperature).
    Index { scale: f64 },
}

#[derive(Debug, Clone, PartialEq)]
struct Fields<T> {
    x: Vec<T>,
    u: Vec<T>,
    v: Vec<T>,
    z: Vec<T>,
}

impl<T: Copy> Fields<T> {
    fn blank(len: usize, b: T) -> Self {
        Self { x: vec![b; len], u: vec![b; len], v: vec![b; len], z: vec![b; len] }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cells {
    Float(Fields<f64>),
    Int(Fields<i64>),
}

#[derive(Debug, Clone, Copy)]
enum Which {
    X,
    U,
    V,
    Z,
}

/// A filled grid. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeGrid {
    /// Extent in the first coordinate (N).
    pub n: usize,
    /// Extent in the second coordinate (M).
    pub m: usize,
    pub model: PolymerMap,
    /// `None` when the grid was built from explicit inputs.
    pub boundary: Option<Boundary>,
    pub seed: Option<u64>,
    pub order: FillOrder,
    pub encoding: Encoding,
    cells: Cells,
}

fn cell_error(n: usize, m: usize, e: Error) -> Error {
    Error::Lattice(format!("cell ({n},{m}): {e}"))
}

/// Fills boundary Z by cumulative sums and the interior cell by cell.
/// `cell(x, b, c, z_left, z_below)` returns (U, V, Z).
fn fill<T, F>(nn: usize, mm: usize, f: &mut Fields<T>, zero: T, order: FillOrder, cell: F) -> Result<()>
where
    T: Copy + Send + Sync + Add<Output = T>,
    F: Fn(T, T, T, T, T) -> Result<(T, T, T)> + Sync,
{
    let w = mm + 1;
    let at = |n: usize, m: usize| n * w + m;
    f.z[0] = zero;
    for n in 1..=nn {
        f.z[at(n, 0)] = f.z[at(n - 1, 0)] + f.u[at(n, 0)];
    }
    for m in 1..=mm {
        f.z[at(0, m)] = f.z[at(0, m - 1)] + f.v[at(0, m)];
    }
    let compute = |f: &Fields<T>, n: usize, m: usize| {
        cell(f.x[at(n, m)], f.u[at(n, m - 1)], f.v[at(n - 1, m)], f.z[at(n - 1, m)], f.z[at(n, m - 1)]).map_err(|e| cell_error(n, m, e))
    };
    let store = |f: &mut Fields<T>, n: usize, m: usize, (u, v, z): (T, T, T)| {
        f.u[at(n, m)] = u;
        f.v[at(n, m)] = v;
        f.z[at(n, m)] = z;
    };
    match order {
        FillOrder::Rows => {
            for m in 1..=mm {
                for n in 1..=nn {
                    let r = compute(f, n, m)?;
                    store(f, n, m, r);
                }
            }
        }
        FillOrder::Columns => {
            for n in 1..=nn {
                for m in 1..=mm {
                    let r = compute(f, n, m)?;
                    store(f, n, m, r);
                }
            }
        }
        FillOrder::AntiDiagonals => {
            for d in 2..=nn + mm {
                let lo = d.saturating_sub(mm).max(1);
                let hi = nn.min(d - 1);
                let frozen: &Fields<T> = f;
                let out: Vec<(T, T, T)> = (lo..=hi).into_par_iter().map(|n| compute(frozen, n, d - n)).collect::<Result<_>>()?;
                for (n, r) in (lo..=hi).zip(out) {
                    store(f, n, d - n, r);
                }
            }
        }
    }
    Ok(())
}

/// ln of a draw; exact log-space sampling where the family supports it.
fn sample_log(spec: &DistributionSpec, rng: &mut Rng) -> f64 {
    if spec.modifier.is_none() {
        if let Some(l) = spec.family.sample_ln(rng) {
            return l;
        }
    }
    spec.sample_one(rng).value.ln()
}

fn check_shape(model: &PolymerMap, n: usize, m: usize) -> Result<()> {
    if model.arity() != 3 {
        return Err(Error::Lattice(format!("{} is not a three-argument recursion", model.name())));
    }
    if n == 0 || m == 0 {
        return Err(Error::Lattice(format!("grid extents must be positive, got {n}×{m}")));
    }
    Ok(())
}

/// Input positions on the random streams: X_{n,m}, then U_{n,0}, then V_{0,m}.
fn draws<T: Send>(n: usize, m: usize, seed: u64, f: [&(dyn Fn(&mut Rng) -> T + Sync); 3]) -> (Vec<T>, Vec<T>, Vec<T>) {
    let s = Streams::new(seed);
    let nm = (n * m) as u64;
    let x = (0..nm).into_par_iter().map(|i| f[0](&mut s.get(i))).collect();
    let u = (0..n as u64).into_par_iter().map(|i| f[1](&mut s.get(nm + i))).collect();
    let v = (0..m as u64).into_par_iter().map(|i| f[2](&mut s.get(nm + n as u64 + i))).collect();
    (x, u, v)
}

fn load<T: Copy>(n: usize, m: usize, blank: T, x: &[T], u0: &[T], v0: &[T]) -> Fields<T> {
    let w = m + 1;
    let mut f = Fields::blank((n + 1) * w, blank);
    for i in 1..=n {
        for j in 1..=m {
            f.x[i * w + j] = x[(i - 1) * m + (j - 1)];
        }
        f.u[i * w] = u0[i - 1];
    }
    f.v[1..=m].copy_from_slice(&v0[..m]);
    f
}

fn fill_float(model: &PolymerMap, n: usize, m: usize, f: &mut Fields<f64>, order: FillOrder) -> Result<()> {
    match model.temperature {
        Temperature::Positive => fill(n, m, f, 0.0, order, |x, b, c, zl, zb| {
            let (lu, lv) = model.eval_r_log(x, b, c)?;
            let (wu, wv) = model.log_weights(x)?;
            Ok((lu, lv, log_add_exp(wu + zl, wv + zb)))
        }),
        Temperature::Zero => fill(n, m, f, 0.0, order, |x, b, c, zl, zb| {
            let (u, v) = model.eval_r_minplus(x, b, c)?;
            let (wu, wv) = model.weights_minplus(x)?;
            Ok((u, v, z_step(wu, wv, zl, zb)))
        }),
    }
}

fn fill_int(model: &PolymerMap, n: usize, m: usize, f: &mut Fields<i64>, order: FillOrder) -> Result<()> {
    fill(n, m, f, 0, order, |x, b, c, zl, zb| {
        let (u, v) = model.eval_r_minplus(x, b, c)?;
        let (wu, wv) = model.weights_minplus(x)?;
        Ok((u, v, z_step(wu, wv, zl, zb)))
    })
}

/// Draws inputs from `boundary` with `seed` and fills an N×M grid.
pub fn simulate(model: &PolymerMap, n: usize, m: usize, boundary: &Boundary, seed: u64) -> Result<LatticeGrid> {
    simulate_ordered(model, n, m, boundary, seed, FillOrder::Rows)
}

/// [`simulate`] with an explicit fill order. Every order gives the same fields.
pub fn simulate_ordered(model: &PolymerMap, n: usize, m: usize, boundary: &Boundary, seed: u64, order: FillOrder) -> Result<LatticeGrid> {
    check_shape(model, n, m)?;
    boundary.validate_for(model)?;
    let [mt, mu, nu] = boundary.specs();
    let (encoding, cells) = match (model.temperature, boundary.index_scale()) {
        (Temperature::Positive, _) => {
            let (x, u, v) = draws(n, m, seed, [&|r| sample_log(&mt, r), &|r| sample_log(&mu, r), &|r| sample_log(&nu, r)]);
            let mut f = load(n, m, f64::NAN, &x, &u, &v);
            fill_float(model, n, m, &mut f, order)?;
            (Encoding::Log, Cells::Float(f))
        }
        (Temperature::Zero, Some(scale)) => {
            let idx = |s: DistributionSpec| move |r: &mut Rng| s.sample_index(r).expect("lattice law has an index sampler");
            let (x, u, v) = draws(n, m, seed, [&idx(mt), &idx(mu), &idx(nu)]);
            let mut f = load(n, m, 0, &x, &u, &v);
            fill_int(model, n, m, &mut f, order)?;
            (Encoding::Index { scale }, Cells::Int(f))
        }
        (Temperature::Zero, None) => {
            let val = |s: DistributionSpec| move |r: &mut Rng| s.sample_one(r).value;
            let (x, u, v) = draws(n, m, seed, [&val(mt), &val(mu), &val(nu)]);
            let mut f = load(n, m, f64::NAN, &x, &u, &v);
            fill_float(model, n, m, &mut f, order)?;
            (Encoding::Plain, Cells::Float(f))
        }
    };
    Ok(LatticeGrid { n, m, model: model.clone(), boundary: Some(*boundary), seed: Some(seed), order, encoding, cells })
}

impl LatticeGrid {
    /// Grid from explicit values: `x[(n−1)·M + (m−1)] = X_{n,m}`,
    /// `u0[n−1] = U_{n,0}`, `v0[m−1] = V_{0,m}`, all in natural units.
    pub fn from_inputs(model: &PolymerMap, x: &[f64], u0: &[f64], v0: &[f64], order: FillOrder) -> Result<Self> {
        let (n, m) = (u0.len(), v0.len());
        check_shape(model, n, m)?;
        if x.len() != n * m {
            return Err(Error::Lattice(format!("expected {} disorder values for a {n}×{m} grid, got {}", n * m, x.len())));
        }
        let (encoding, cells) = match model.temperature {
            Temperature::Positive => {
                let ln = |v: &[f64]| v.iter().map(|t| t.ln()).collect::<Vec<_>>();
                let mut f = load(n, m, f64::NAN, &ln(x), &ln(u0), &ln(v0));
                fill_float(model, n, m, &mut f, order)?;
                (Encoding::Log, Cells::Float(f))
            }
            Temperature::Zero => {
                let mut f = load(n, m, f64::NAN, x, u0, v0);
                fill_float(model, n, m, &mut f, order)?;
                (Encoding::Plain, Cells::Float(f))
            }
        };
        Ok(Self { n, m, model: model.clone(), boundary: None, seed: None, order, encoding, cells })
    }

    pub fn temperature(&self) -> Temperature {
        self.model.temperature
    }

    fn at(&self, n: usize, m: usize) -> usize {
        assert!(n <= self.n && m <= self.m, "({n},{m}) outside a {}×{} grid", self.n, self.m);
        n * (self.m + 1) + m
    }

    /// Stored number (log, value or index as f64).
    fn raw(&self, which: Which, n: usize, m: usize) -> f64 {
        let i = self.at(n, m);
        match &self.cells {
            Cells::Float(f) => match which {
                Which::X => f.x[i],
                Which::U => f.u[i],
                Which::V => f.v[i],
                Which::Z => f.z[i],
            },
            Cells::Int(f) => {
                (match which {
                    Which::X => f.x[i],
                    Which::U => f.u[i],
                    Which::V => f.v[i],
                    Which::Z => f.z[i],
                }) as f64
            }
        }
    }

    fn value(&self, which: Which, n: usize, m: usize) -> f64 {
        let r = self.raw(which, n, m);
        match self.encoding {
            Encoding::Log => r.exp(),
            Encoding::Plain => r,
            Encoding::Index { scale } => r * scale,
        }
    }

    /// X_{n,m} for 1 ≤ n ≤ N, 1 ≤ m ≤ M.
    pub fn x(&self, n: usize, m: usize) -> f64 {
        assert!(n >= 1 && m >= 1, "X is defined off the axes only");
        self.value(Which::X, n, m)
    }

    /// U_{n,m} for n ≥ 1.
    pub fn u(&self, n: usize, m: usize) -> f64 {
        assert!(n >= 1, "U_{{0,m}} is not defined");
        self.value(Which::U, n, m)
    }

    /// V_{n,m} for m ≥ 1.
    pub fn v(&self, n: usize, m: usize) -> f64 {
        assert!(m >= 1, "V_{{n,0}} is not defined");
        self.value(Which::V, n, m)
    }

    /// The additive partition field: ln Z_{n,m} at positive temperature,
    /// Z_{n,m} at zero temperature.
    pub fn z(&self, n: usize, m: usize) -> f64 {
        match self.encoding {
            Encoding::Log | Encoding::Plain => self.raw(Which::Z, n, m),
            Encoding::Index { scale } => self.raw(Which::Z, n, m) * scale,
        }
    }

    /// Z_{n,m} as a lattice index, for integer-filled grids.
    pub fn z_index(&self, n: usize, m: usize) -> Option<i64> {
        match &self.cells {
            Cells::Int(f) => Some(f.z[self.at(n, m)]),
            Cells::Float(_) => None,
        }
    }

    /// Largest residuals of the recursion and of the row and column
    /// reconstructions of Z.
    pub fn consistency(&self) -> Result<Consistency> {
        let (nn, mm) = (self.n, self.m);
        let mut recursion = 0.0_f64;
        for n in 1..=nn {
            for m in 1..=mm {
                let (x, b, c) = (self.raw(Which::X, n, m), self.raw(Which::U, n, m - 1), self.raw(Which::V, n - 1, m));
                let (u, v) = (self.raw(Which::U, n, m), self.raw(Which::V, n, m));
                let err = match (&self.cells, self.encoding) {
                    (Cells::Int(f), _) => {
                        let i = |n: usize, m: usize| n * (mm + 1) + m;
                        let (ru, rv) =
                            self.model.eval_r_minplus(f.x[i(n, m)], f.u[i(n, m - 1)], f.v[i(n - 1, m)]).map_err(|e| cell_error(n, m, e))?;
                        ((ru - f.u[i(n, m)]).abs() + (rv - f.v[i(n, m)]).abs()) as f64
                    }
                    (_, Encoding::Log) => {
                        // Natural-space formula against the log-space fill.
                        let (ru, rv) = self.model.eval_r(x.exp(), b.exp(), c.exp()).map_err(|e| cell_error(n, m, e))?;
                        (ru.ln() - u).abs().max((rv.ln() - v).abs())
                    }
                    _ => {
                        let (ru, rv) = self.model.eval_r_minplus(x, b, c).map_err(|e| cell_error(n, m, e))?;
                        ((ru - u).abs() / u.abs().max(1.0)).max((rv - v).abs() / v.abs().max(1.0))
                    }
                };
                recursion = recursion.max(err);
            }
        }
        let (rows, columns) = match &self.cells {
            Cells::Float(f) => reconstruction(f, nn, mm, 0.0, |a, b| (a - b).abs()),
            Cells::Int(f) => reconstruction(f, nn, mm, 0, |a, b| (a - b).abs() as f64),
        };
        Ok(Consistency { recursion, rows, columns, exact: matches!(self.cells, Cells::Int(_)) })
    }

    /// Rows of the CSV dump: n, m, X, U, V and ln Z (positive) or Z (zero
    /// temperature), 17 significant digits, blanks where a field is undefined.
    pub fn to_csv(&self) -> String {
        let zname = match self.encoding {
            Encoding::Log => "logZ",
            _ => "Z",
        };
        let mut s = format!("n,m,X,U,V,{zname}\n");
        let opt = |ok: bool, f: &dyn Fn() -> f64| if ok { sig17(f()) } else { String::new() };
        for n in 0..=self.n {
            for m in 0..=self.m {
                s.push_str(&format!(
                    "{n},{m},{},{},{},{}\n",
                    opt(n >= 1 && m >= 1, &|| self.x(n, m)),
                    opt(n >= 1, &|| self.u(n, m)),
                    opt(m >= 1, &|| self.v(n, m)),
                    sig17(self.z(n, m)),
                ));
            }
        }
        s
    }

    pub fn summary(&self) -> Result<GridSummary> {
        Ok(GridSummary {
            schema_version: crate::SCHEMA_VERSION,
            model: self.model.name(),
            map: self.model.id,
            temperature: self.temperature(),
            n: self.n,
            m: self.m,
            encoding: self.encoding,
            order: self.order,
            seed: self.seed,
            boundary: self.boundary,
            z_corner: self.z(self.n, self.m),
            consistency: self.consistency()?,
        })
    }
}

fn reconstruction<T>(f: &Fields<T>, nn: usize, mm: usize, zero: T, diff: impl Fn(T, T) -> f64) -> (f64, f64)
where
    T: Copy + Add<Output = T>,
{
    let w = mm + 1;
    let (mut rows, mut cols) = (0.0_f64, 0.0_f64);
    // Along the V boundary then right along each row.
    let mut base = zero;
    for m in 0..=mm {
        if m > 0 {
            base = base + f.v[m];
        }
        let mut acc = base;
        for n in 0..=nn {
            if n > 0 {
                acc = acc + f.u[n * w + m];
            }
            rows = rows.max(diff(acc, f.z[n * w + m]));
        }
    }
    let mut base = zero;
    for n in 0..=nn {
        if n > 0 {
            base = base + f.u[n * w];
        }
        let mut acc = base;
        for m in 0..=mm {
            if m > 0 {
                acc = acc + f.v[n * w + m];
            }
            cols = cols.max(diff(acc, f.z[n * w + m]));
        }
    }
    (rows, cols)
}

/// Residuals of the grid invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Consistency {
    /// Largest recursion residual: log difference at positive temperature,
    /// relative difference at zero temperature.
    pub recursion: f64,
    /// Largest |Z − (Z_{0,m} + Σ U along the row)|, in the additive field.
    pub rows: f64,
    /// Largest |Z − (Z_{n,0} + Σ V along the column)|.
    pub columns: f64,
    /// Integer fill, where every residual must vanish.
    pub exact: bool,
}

impl Consistency {
    pub fn ok(&self) -> bool {
        if self.exact {
            self.recursion == 0.0 && self.rows == 0.0 && self.columns == 0.0
        } else {
            self.recursion <= RECURSION_TOL && self.rows <= RECONSTRUCTION_TOL && self.columns <= RECONSTRUCTION_TOL
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GridSummary {
    pub schema_version: u32,
    pub model: String,
    pub map: MapId,
    pub temperature: Temperature,
    pub n: usize,
    pub m: usize,
    pub encoding: Encoding,
    pub order: FillOrder,
    pub seed: Option<u64>,
    pub boundary: Option<Boundary>,
    /// ln Z_{N,M} (positive) or Z_{N,M} (zero temperature).
    pub z_corner: f64,
    pub consistency: Consistency,
}

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k.min(n - k)).fold(1u64, |acc, i| acc.saturating_mul(n - i + 1) / i)
}

fn each_path<T: Copy + Add<Output = T>>(
    (n, m): (usize, usize),
    (k, l): (usize, usize),
    acc: T,
    right: &dyn Fn(usize, usize) -> T,
    up: &dyn Fn(usize, usize) -> T,
    out: &mut Vec<T>,
) {
    if (k, l) == (n, m) {
        out.push(acc);
        return;
    }
    if k < n {
        each_path((n, m), (k + 1, l), acc + right(k + 1, l), right, up, out);
    }
    if l < m {
        each_path((n, m), (k, l + 1), acc + up(k, l + 1), right, up, out);
    }
}

/// Z_{n,m} by summing (positive) or minimizing (zero temperature) over every
/// up-right path from the origin, with the boundary increments on the axes
/// and the edge weights of X elsewhere. Same units as [`LatticeGrid::z`].
pub fn path_enumeration(grid: &LatticeGrid, n: usize, m: usize) -> Result<f64> {
    if n > grid.n || m > grid.m {
        return Err(Error::Lattice(format!("({n},{m}) outside a {}×{} grid", grid.n, grid.m)));
    }
    let count = binomial((n + m) as u64, n as u64);
    if count > MAX_PATHS {
        return Err(Error::Lattice(format!("{count} paths to ({n},{m}) exceed the enumeration limit {MAX_PATHS}")));
    }
    let model = &grid.model;
    match (&grid.cells, grid.encoding) {
        (Cells::Int(f), Encoding::Index { scale }) => {
            let w = grid.m + 1;
            let weights = |k: usize, l: usize| model.weights_minplus(f.x[k * w + l]).expect("weights of a filled grid");
            let right = |k: usize, l: usize| if l == 0 { f.u[k * w] } else { weights(k, l).0 };
            let up = |k: usize, l: usize| if k == 0 { f.v[l] } else { weights(k, l).1 };
            let mut out = Vec::new();
            each_path((n, m), (0, 0), 0i64, &right, &up, &mut out);
            Ok(*out.iter().min().expect("at least one path") as f64 * scale)
        }
        (Cells::Float(f), enc) => {
            let w = grid.m + 1;
            let weights = |k: usize, l: usize| {
                let x = f.x[k * w + l];
                match enc {
                    Encoding::Log => model.log_weights(x),
                    _ => model.weights_minplus(x),
                }
                .expect("weights of a filled grid")
            };
            let right = |k: usize, l: usize| if l == 0 { f.u[k * w] } else { weights(k, l).0 };
            let up = |k: usize, l: usize| if k == 0 { f.v[l] } else { weights(k, l).1 };
            let mut out = Vec::new();
            each_path((n, m), (0, 0), 0.0, &right, &up, &mut out);
            Ok(match enc {
                Encoding::Log => {
                    let top = out.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    top + out.iter().map(|s| (s - top).exp()).sum::<f64>().ln()
                }
                _ => out.iter().copied().fold(f64::INFINITY, f64::min),
            })
        }
        (Cells::Int(_), _) => unreachable!("integer cells always carry an index encoding"),
    }
}

/// Short model names accepted on the command line.
pub const MODEL_NAMES: [&str; 6] = ["r01", "r10", "rm11", "r11", "r1m1", "rtilde"];

/// The recursion called `name` at the given temperature.
pub fn model_by_name(name: &str, temperature: Temperature) -> Result<PolymerMap> {
    let r = |a: f64, b: f64| MapId::R { alpha: a, beta: b };
    let id = match (name, temperature) {
        ("r01", Temperature::Positive) => r(0.0, 1.0),
        ("r10", Temperature::Positive) => r(1.0, 0.0),
        ("rm11", Temperature::Positive) => r(-1.0, 1.0),
        ("r11", Temperature::Positive) => r(1.0, 1.0),
        ("r1m1", Temperature::Positive) => r(1.0, -1.0),
        ("rtilde", Temperature::Positive) => MapId::RTilde,
        ("r01", Temperature::Zero) => MapId::RZero01,
        ("r10", Temperature::Zero) => MapId::RZero10,
        ("r11", Temperature::Zero) => MapId::RZero11,
        ("rtilde", Temperature::Zero) => MapId::RTildeZero,
        ("rm11" | "r1m1", Temperature::Zero) => {
            return Err(Error::Invalid(format!("{name} has no zero-temperature version; use r01, r10, r11 or rtilde")))
        }
        _ => return Err(Error::unknown_key(name, MODEL_NAMES)),
    };
    PolymerMap::new(id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::laws::*;

    fn ig_grid(n: usize, seed: u64, order: FillOrder) -> LatticeGrid {
        let model = PolymerMap::r(0.0, 1.0).unwrap();
        let b = Boundary::new([ig(3.0, 1.0), ig(1.8, 1.0), ig(1.2, 1.0)]);
        simulate_ordered(&model, n, n, &b, seed, order).unwrap()
    }

    #[test]
    fn constant_disorder_gives_linear_z() {
        let model = model_by_name("r01", Temperature::Zero).unwrap();
        let g = LatticeGrid::from_inputs(&model, &[2.0; 9], &[2.0; 3], &[2.0; 3], FillOrder::Rows).unwrap();
        for n in 0..=3 {
            for m in 0..=3 {
                assert_eq!(g.z(n, m), 2.0 * (n + m) as f64);
                if n > 0 {
                    assert_eq!(g.u(n, m), 2.0);
                }
                if m > 0 {
                    assert_eq!(g.v(n, m), 2.0);
                }
            }
        }
    }

    #[test]
    fn fill_orders_agree_bitwise() {
        let a = ig_grid(30, 5, FillOrder::Rows);
        let b = ig_grid(30, 5, FillOrder::Columns);
        let c = ig_grid(30, 5, FillOrder::AntiDiagonals);
        // Blanks are NaN, so compare bit patterns.
        let bits = |g: &LatticeGrid| match &g.cells {
            Cells::Float(f) => [&f.x, &f.u, &f.v, &f.z].iter().flat_map(|v| v.iter().map(|x| x.to_bits())).collect::<Vec<_>>(),
            Cells::Int(_) => unreachable!(),
        };
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(bits(&a), bits(&c));
    }

    #[test]
    fn positive_temperature_matches_path_sum() {
        let g = ig_grid(6, 2, FillOrder::Rows);
        assert!(g.consistency().unwrap().ok());
        for n in 0..=6 {
            for m in 0..=6 {
                let e = path_enumeration(&g, n, m).unwrap();
                assert!((e - g.z(n, m)).abs() <= 1e-12 * e.abs().max(1.0), "({n},{m})");
            }
        }
    }

    #[test]
    fn discrete_zero_temperature_uses_indices() {
        let model = PolymerMap::fixed(MapId::RTildeZero);
        let b = Boundary::new([sdal(0.3, 0.4, 0.5), sdal(0.5, 0.3, 0.5).max_zero(), sdal(0.4, 0.6, 0.5).min_zero()]);
        let g = simulate(&model, 7, 7, &b, 9).unwrap();
        assert_eq!(g.encoding, Encoding::Index { scale: 0.5 });
        let c = g.consistency().unwrap();
        assert!(c.exact && c.ok(), "{c:?}");
        for n in 0..=7 {
            for m in 0..=7 {
                assert_eq!(path_enumeration(&g, n, m).unwrap(), g.z(n, m));
            }
        }
    }

    #[test]
    fn boundary_outside_domain_is_rejected() {
        let model = PolymerMap::fixed(MapId::RZero10);
        let b = Boundary::new([exp(1.0), exp(2.0), al(1.0, 1.0)]);
        assert!(matches!(simulate(&model, 3, 3, &b, 1), Err(Error::Lattice(_))));
    }

    #[test]
    fn model_names() {
        assert!(model_by_name("r1m1", Temperature::Zero).is_err());
        assert!(matches!(model_by_name("r00", Temperature::Zero), Err(Error::UnknownKey { .. })));
        for name in MODEL_NAMES {
            assert!(model_by_name(name, Temperature::Positive).is_ok());
        }
    }

    #[test]
    fn csv_has_one_row_per_vertex() {
        let g = ig_grid(3, 1, FillOrder::Rows);
        let csv = g.to_csv();
        assert_eq!(csv.lines().count(), 1 + 16);
        assert!(csv.starts_with("n,m,X,U,V,logZ\n0,0,,,,0.0000000000000000e0\n"));
    }
}
