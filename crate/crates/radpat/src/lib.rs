//! Radiation-pattern calibration for cooperating aerial platforms.
//!
//! Two platforms that continuously exchange radio frames can turn their
//! flight logs and RSSI readings into calibrated antenna radiation
//! patterns: every received frame pins the *sum* of both antennas' gains
//! along the line of sight, and enough mutual geometry variation lets a
//! regularized linear fit split that sum into one pattern per platform.
//!
//! The crate is organized along the data path:
//!
//! * [`geometry`]: poses, body-frame directions, mutual observations,
//!   free-space path loss.
//! * [`models`]: sphere-function bases (spherical harmonics, grid kernels,
//!   raw-angle polynomials) behind one [`models::BasisSpec`] type.
//! * [`learning`]: the stacked design matrix and ridge solver that decouple
//!   the two patterns.
//! * [`baselines`]: reference predictors (global mean, weighted k-nearest
//!   neighbors) the decoupled fit is judged against.
//! * [`simulator`]: synthetic calibration flights over known ground-truth
//!   patterns, for end-to-end validation.
//! * [`evaluation`]: repeated train/test splits, error metrics, and the
//!   benchmark report comparing all methods on one dataset.
//! * [`dataio`]: CSV pose/signal interchange, time alignment of the two
//!   platforms' logs, and model serialization.

pub mod baselines;
pub mod dataio;
pub mod error;
pub mod evaluation;
pub mod geometry;
pub mod learning;
pub mod models;
pub mod simulator;

pub use error::{Error, Result};

/// The guide's code listings, compiled and run by `cargo test` so the book
/// in `book/` can never drift from the crate. One module per chapter keeps
/// failures attributable.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/bases.md")]
    mod bases {}
    #[doc = include_str!("../../../book/src/decoupling.md")]
    mod decoupling {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
