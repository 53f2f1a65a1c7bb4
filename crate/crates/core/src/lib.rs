//! Characteristic evolution of a charged scalar field with Maxwell coupling on a fixed
//! Schwarzschild exterior, together with the multiplier energy diagnostics and decay fits
//! built on top of it.

// `!(x > 0)` style checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod decay;
pub mod diagnostics;
pub mod error;
pub mod evolution;
pub mod fields;
pub mod geometry;
pub mod grid;
pub mod history;
pub mod initial;
pub mod io;
pub mod manufactured;
pub mod modes;
pub mod multiplier;
pub mod report;
pub mod residual;
pub mod run;
pub mod scalar;
pub mod stress;
pub mod suite;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub type Background = geometry::BackgroundParams<f64>;
pub type Grid = grid::GridSpec<f64>;
pub type Potential = fields::PotentialSpec<f64>;
pub type Data = initial::InitialData<f64>;
pub type History = history::FieldHistory<f64>;
pub type ModeRun = modes::ModeHistory<f64>;
pub type Multiplier = multiplier::MultiplierSpec<f64>;
pub type Series = decay::TimeSeries<f64>;
