//! Quantum interaction of a fast electron with a single quantized optical
//! mode.
//!
//! The electron crosses the near field of a nanostructure that hosts one
//! bosonic mode of frequency ω₀. In the non-recoil regime the passage acts
//! on the joint electron-photon state as a displacement of the mode by the
//! dimensionless coupling β₀, entangled with the electron energy ladder:
//! the electron exchanges quanta ℏω₀ with the mode and its spectrum splits
//! into sidebands ℓ = ±1, ±2, … whose weights P_ℓ depend on the photon
//! statistics {pₙ} the mode held before the passage.
//!
//! The crate covers the full chain:
//!
//! - photon number distributions and their correlation functions g⁽ℓ⁾,
//! - the coupling amplitude β₀ from an arbitrary on-axis field profile,
//! - exact sideband spectra P_ℓ for any {pₙ} at any coupling strength,
//!   both by closed-form displacement matrix elements and by direct
//!   integration of the ladder equations,
//! - mode population dynamics of a cavity fed by N initially excited
//!   two-level emitters (Tavis-Cummings with cavity loss),
//! - time-resolved electron spectra of such a cavity and retrieval of the
//!   g⁽ℓ⁾ hierarchy from measured sidebands.
//!
//! Everything is generic over the floating scalar through [`Real`];
//! `f64` aliases are exported at the crate root.

pub mod bessel;
pub mod cavity;
pub mod coupling;
pub mod displacement;
pub mod error;
pub mod factorial;
pub mod interaction;
pub mod ode;
pub mod populations;
pub mod propagation;
pub mod quadrature;
pub mod scalar;
pub mod spectra;
pub mod units;

#[cfg(test)]
mod testkit;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex double, the default amplitude type.
pub type C64 = num_complex::Complex<f64>;

/// Photon number distribution over f64.
pub type Distribution64 = populations::Distribution<f64>;

/// Sideband spectrum over f64.
pub type Spectrum64 = interaction::Spectrum<f64>;

/// Cavity trajectory over f64.
pub type Trajectory64 = cavity::Trajectory<f64>;

/// Broadened energy trace over f64.
pub type Trace64 = spectra::Trace<f64>;
