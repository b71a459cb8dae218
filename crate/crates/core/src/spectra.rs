//! Presentation-layer spectral tools: Lorentzian broadening, gain/loss
//! ratios, and photon-statistics retrieval from sideband intensities.
//!
//! Energy-axis convention: the axis is the energy LOSS ΔE/ħω₀, so the
//! sideband at ℓ (electron energy change +ℓħω₀) appears centered at
//! ΔE/ħω₀ = −ℓ; gains sit at negative ΔE.

use crate::interaction::Spectrum;
use crate::scalar::Real;
use crate::{Error, Result};

/// Default Lorentzian FWHM in units of ω₀.
pub const DEFAULT_FWHM: f64 = 0.1;
/// Retrieval orders supported by [`retrieve_g`].
pub const RETRIEVE_ELL_MAX: usize = 8;

/// Broadened spectrum sampled on an energy-loss axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    energy: Vec<T>,
    intensity: Vec<T>,
    fwhm: T,
}

impl<T: Real> Trace<T> {
    /// ΔE/ħω₀ sample positions.
    pub fn energy(&self) -> &[T] {
        &self.energy
    }

    pub fn intensity(&self) -> &[T] {
        &self.intensity
    }

    pub fn fwhm(&self) -> T {
        self.fwhm
    }

    /// Trapezoidal integral of the trace over its axis.
    pub fn integral(&self) -> T {
        let mut acc = T::zero();
        for i in 1..self.energy.len() {
            let h = self.energy[i] - self.energy[i - 1];
            acc = acc + (self.intensity[i] + self.intensity[i - 1]) * h;
        }
        acc * T::from_f64_const(0.5)
    }
}

/// Render the sidebands as Lorentzians of common FWHM on the given
/// energy-loss axis: peak of weight P_ℓ centered at ΔE/ħω₀ = −ℓ.
pub fn broaden<T: Real>(spec: &Spectrum<T>, fwhm: T, axis: &[T]) -> Result<Trace<T>> {
    if !(fwhm > T::zero()) || !fwhm.is_finite() {
        return Err(Error::Domain(format!("fwhm must be positive, got {fwhm}")));
    }
    if axis.is_empty() {
        return Err(Error::Domain("energy axis must not be empty".into()));
    }
    if axis.iter().any(|e| !e.is_finite()) {
        return Err(Error::Domain("energy axis must be finite".into()));
    }
    let gamma = fwhm * T::from_f64_const(0.5);
    let norm = gamma / T::PI();
    let peaks: Vec<(T, T)> = spec
        .iter()
        .filter(|&(_, p)| p > T::zero())
        .map(|(ell, p)| (T::from_f64_const(-(ell as f64)), p))
        .collect();
    let intensity = axis
        .iter()
        .map(|&e| {
            let mut acc = T::zero();
            for &(center, weight) in &peaks {
                let d = e - center;
                acc = acc + weight * norm / (d * d + gamma * gamma);
            }
            acc
        })
        .collect();
    Ok(Trace { energy: axis.to_vec(), intensity, fwhm })
}

/// Σ_{ℓ>0} P_ℓ / Σ_{ℓ<0} P_ℓ, the integrated gain-to-loss ratio.
pub fn gains_losses_ratio<T: Real>(spec: &Spectrum<T>) -> Result<T> {
    let mut gains = T::zero();
    let mut losses = T::zero();
    for (ell, p) in spec.iter() {
        if ell > 0 {
            gains = gains + p;
        } else if ell < 0 {
            losses = losses + p;
        }
    }
    if !(losses > T::zero()) {
        return Err(Error::Undefined("no loss weight: gain/loss ratio undefined".into()));
    }
    Ok(gains / losses)
}

/// Photon-statistics retrieval from the gain sidebands:
/// ĝ⁽ℓ⁾ = (ℓ!)² P_ℓ / P₁^ℓ, which converges to g⁽ℓ⁾ as |β₀| → 0.
pub fn retrieve_g<T: Real>(spec: &Spectrum<T>, ell: usize) -> Result<T> {
    if !(2..=RETRIEVE_ELL_MAX).contains(&ell) {
        return Err(Error::Domain(format!(
            "retrieval order must lie in [2, {RETRIEVE_ELL_MAX}], got {ell}"
        )));
    }
    let p1 = spec.p(1);
    if !(p1 > T::zero()) {
        return Err(Error::Undefined("P(+1) vanishes: retrieval undefined".into()));
    }
    let mut factorial = T::one();
    for k in 2..=ell {
        factorial = factorial * T::from_count(k);
    }
    Ok(factorial * factorial * spec.p(ell as i64) / p1.powi(ell as i32))
}
