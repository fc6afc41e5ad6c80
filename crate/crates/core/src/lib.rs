//! Weighted sums of independent gamma variables: a series engine for their
//! distribution functions, order predicates on weight vectors, certified
//! sign-change analysis of `F_η − F_θ`, mode analysis of gamma mixtures, and a
//! constructive search for multiple-crossing counterexamples when the common
//! shape is below one.

pub mod acceptance;
pub mod counterexample;
pub mod crossing;
pub mod density;
pub mod error;
pub mod gconv;
pub mod grid;
pub mod hexfloat;
pub mod mixtures;
pub mod orders;
pub mod specfun;
pub mod sweep;
pub mod verdict;
pub mod weights;

pub use density::Density;
pub use error::{Error, Result};
pub use gconv::{make_convolution, GammaComponent, GammaConvolution};
pub use specfun::ShapeParam;
pub use verdict::Verdict;
pub use weights::WeightVector;

/// Engine version string embedded in every report.
pub const ENGINE_VERSION: &str = concat!("gcross-core ", env!("CARGO_PKG_VERSION"));
