//! Unit system and physical constants.
//!
//! The crate works in eV, nm, fs, and elementary charges. In these units
//! the combination e·E·z/ℏω is dimensionless when E is expressed in
//! eV/(e·nm), i.e. field values in V/m are scaled by 1e-9. Dipole moments
//! carry e·nm and the Coulomb constant e²/(4πε₀) = [`E2_EV_NM`] eV·nm.

use crate::scalar::Real;

/// ℏ in eV·fs.
pub const HBAR_EV_FS: f64 = 0.6582119569;

/// Speed of light in nm/fs.
pub const C_NM_FS: f64 = 299.792458;

/// e²/(4πε₀) in eV·nm.
pub const E2_EV_NM: f64 = 1.439964485;

/// Electron rest energy in keV.
pub const ME_C2_KEV: f64 = 510.999;

/// Conversion factor from V/m to eV/(e·nm).
pub const VOLT_PER_M_TO_EV_PER_E_NM: f64 = 1e-9;

/// Conversion factor from eV/(fs·nm²) to W/m².
pub const EV_PER_FS_NM2_TO_W_M2: f64 = 1.602176634e14;

/// Relativistic electron kinematics for a given kinetic energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kinematics<T> {
    /// Lorentz factor γ = 1 + E/mc².
    pub gamma: T,
    /// Speed in nm/fs.
    pub v_nm_fs: T,
    /// Speed as a fraction of c.
    pub beta: T,
}

/// Kinematics of an electron of kinetic energy `e_kin_kev` (keV).
///
/// γ = 1 + E/(mc²), β = √(1 − 1/γ²).
pub fn electron_kinematics<T: Real>(e_kin_kev: T) -> crate::Result<Kinematics<T>> {
    if !(e_kin_kev > T::zero()) || !e_kin_kev.is_finite() {
        return Err(crate::Error::Domain(format!(
            "kinetic energy must be positive and finite, got {e_kin_kev}"
        )));
    }
    let gamma = T::one() + e_kin_kev / T::from_f64_const(ME_C2_KEV);
    let beta = (T::one() - (gamma * gamma).recip()).sqrt();
    Ok(Kinematics {
        gamma,
        v_nm_fs: beta * T::from_f64_const(C_NM_FS),
        beta,
    })
}

/// Photon energy ℏω₀ (eV) to angular frequency ω₀ (rad/fs).
pub fn omega_from_ev<T: Real>(hbar_omega_ev: T) -> T {
    hbar_omega_ev / T::from_f64_const(HBAR_EV_FS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinematics_10kev() {
        // γ = 1 + 10/510.999, v = βc
        let k = electron_kinematics(10.0_f64).unwrap();
        assert!((k.gamma - 1.0195695).abs() < 1e-6);
        assert!((k.v_nm_fs - 58.45521).abs() < 1e-4);
    }

    #[test]
    fn kinematics_rejects_nonpositive() {
        assert!(electron_kinematics(0.0_f64).is_err());
        assert!(electron_kinematics(-5.0_f64).is_err());
        assert!(electron_kinematics(f64::NAN).is_err());
    }

    #[test]
    fn omega_roundtrip() {
        let w = omega_from_ev(1.5_f64);
        assert!((w * HBAR_EV_FS - 1.5).abs() < 1e-12);
    }
}
