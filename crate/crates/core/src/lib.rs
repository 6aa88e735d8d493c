//! Integrable directed-polymer recursions on the two-dimensional lattice:
//! the maps, their stationary measures, scaling and zero-temperature limits,
//! and the Monte Carlo machinery that checks them.

pub mod distributions;
pub mod error;
pub mod lattice;
pub mod maps;
pub mod rng;
pub mod stattest;
pub mod transforms;

pub use distributions::{DistributionSpec, Family, MixedSample, Modifier};
pub use error::{Error, Result};
pub use maps::{MapId, PolymerMap, Temperature};
pub use stattest::report::{Component, TestReport, Verdict};
pub use transforms::{Chain, PlanarTransform, ScalarTransform};

/// Version tag written into every serialized report.
pub const SCHEMA_VERSION: u32 = 1;
