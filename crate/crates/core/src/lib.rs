//! Fat fractal percolation laboratory.
//!
//! - [`sequence`]: retention-probability sequences and the α / β classifiers.
//! - [`dims`]: almost-sure Hausdorff, packing, Assouad and box dimensions and
//!   the expected Lebesgue measure.
//! - [`engine`]: seeded finite-depth sampling with sparse cell storage.
//! - [`estimators`]: Monte Carlo estimates checked against the closed forms.
//! - [`witness`]: unions of families realising a target (dimension, measure).

pub mod dims;
pub mod engine;
pub mod error;
pub mod estimators;
pub mod limits;
pub mod rng;
pub mod sequence;
pub mod witness;

pub use dims::{full_report, DimensionReport, Windows};
pub use engine::{generate, generate_replicate, PercolationParams, Realization};
pub use error::{Error, Result};
pub use limits::Window;
pub use sequence::{ClassifierReport, ExponentSpec, Family, Method, ProbSequence, SeqKind, SeqSpec};
pub use witness::{WitnessReport, WitnessSpec};

/// Crate version, embedded in every CLI output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
