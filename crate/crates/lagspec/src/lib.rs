//! Std companion to `lagspec-core`: file formats, the rayon batch harness,
//! SVG figures, pilot calibration and the `lagspec` command line.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod formats;
pub mod harness;
pub mod pilot;
pub mod plot;

pub use error::{AppError, AppResult};
