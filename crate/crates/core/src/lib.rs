//! Pseudo-spectral incompressible Navier–Stokes on the periodic box `[0, 2π)³`,
//! with triple-product regularity diagnostics, mixed space-time norms and
//! numerical checks of the energy-estimate chain behind them.

pub mod criterion;
pub mod error;
pub mod geometry;
pub mod norms;
pub mod scalar;
pub mod solver;
pub mod spectral;
pub mod verify;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
pub use scalar::{Exponent, Real};

/// Double-precision grid.
pub type Grid64 = spectral::SpectralGrid<f64>;
/// Single-precision grid.
pub type Grid32 = spectral::SpectralGrid<f32>;
pub type VectorSpectrum64 = spectral::VectorSpectrum<f64>;
pub type Trajectory64 = solver::Trajectory<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
