//! Numerical checks of the estimate chain: the multiplier energy identity,
//! interpolation and Hölder/Young steps, the Gronwall envelope, smallness
//! monitors and the local energy balance.

pub mod energy;
pub mod exponents;
pub mod gronwall;
pub mod holder;
pub mod interpolation;
pub mod local_energy;
pub mod smallness;

pub use energy::{energy_balance_from_series, energy_balance_residual, EnergyBalanceReport, ResidualScheme};
pub use exponents::{check_exponents, pq_exponents, young_exponents, Admissibility, Target};
pub use gronwall::{gronwall_envelope, gronwall_from_series, GronwallReport, GronwallSample};
pub use holder::{holder_at, holder_triple_check, HolderReport, HolderSample};
pub use interpolation::{empirical_constant, interpolation_check, InterpolationKind, InterpolationRatio};
pub use local_energy::{local_energy_residual, local_energy_residual_oversampled, LocalEnergyReport, SpaceBump, TestFunction, TimeProfile};
pub use smallness::{smallness_gamma, smallness_monitor, SmallnessReport};
