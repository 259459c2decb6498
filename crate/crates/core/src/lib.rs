//! Swaption pricing under a SABR/LIBOR market model.
//!
//! The forward-rate system carries one stochastic volatility factor; prices
//! solve a parabolic PDE in the spanned forwards plus the volatility. The
//! crate provides a full-grid finite-difference solver (`pde`), a sparse
//! grid combination technique that overcomes the curse of dimensionality for
//! longer swaps (`sparse`), and an independent Monte Carlo reference
//! (`montecarlo`).

pub mod error;
pub mod grid;
pub mod market;
pub mod model;
pub mod montecarlo;
pub mod pde;
pub mod sparse;

pub use error::{Error, Result};
pub use grid::{GridFunction, GridSpec, MultiIndex, SpaceDomain};
pub use market::{MarketCurve, SwaptionSpec, TenorStructure};
pub use model::{Measure, SabrLmmParams};

/// Basis points per unit: prices are kept as decimals internally and scaled
/// by this factor at the reporting boundary.
pub const BASIS_POINTS: f64 = 1e4;
