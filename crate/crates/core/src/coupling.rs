//! Physical estimates of the electron-mode coupling for concrete cavities.
//!
//! A small dipolar scatterer at impact parameter b couples to a passing
//! electron with
//!
//!   β₀ = −(2e²ω₀/ħv²γ) [i p_x K₁(ζ) + (p_z/γ) K₀(ζ)],   ζ = ω₀b/(vγ),
//!
//! with the transition dipole p in e·nm. Mode frequency and dipole for
//! plasmonic ellipsoids and thin shells follow from quasistatic
//! (Gaussian-unit) formulas; Purcell enhancement and saturating cw
//! populations complete the feasibility estimates. All formulas take
//! eV / nm / keV inputs and convert internally through e² = 1.44 eV·nm.

use num_complex::Complex;

use crate::bessel::{bessel_k0, bessel_k1};
use crate::scalar::Real;
use crate::units::{Kinematics, C_NM_FS, E2_EV_NM, HBAR_EV_FS};
use crate::{Error, Result};

/// Bound permittivity background of silver fits used throughout.
pub const SILVER_EPS_B: f64 = 4.0;
/// Silver bulk plasma energy ħω_p in eV.
pub const SILVER_PLASMA_EV: f64 = 9.17;
/// Silver Drude damping ħ/τ in eV.
pub const SILVER_DRUDE_EV: f64 = 0.021;

/// One dipolar cavity mode as seen by the beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DipoleMode<T> {
    /// Mode angular frequency in rad/fs.
    pub omega0_rad_fs: T,
    /// Transition-dipole component along the beam axis offset (e·nm).
    pub px_e_nm: T,
    /// Transition-dipole component along the beam direction (e·nm).
    pub pz_e_nm: T,
    /// Impact parameter in nm.
    pub b_nm: T,
}

/// Quasistatic mode estimate: frequency plus effective transition dipole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeEstimate<T> {
    pub hbar_omega_ev: T,
    pub dipole_e_nm: T,
}

impl<T: Real> ModeEstimate<T> {
    pub fn omega0_rad_fs(&self) -> T {
        self.hbar_omega_ev / T::from_f64_const(HBAR_EV_FS)
    }
}

fn check_mode<T: Real>(mode: &DipoleMode<T>) -> Result<()> {
    if !(mode.b_nm > T::zero()) || !mode.b_nm.is_finite() {
        return Err(Error::Domain(format!(
            "impact parameter must be positive, got {}",
            mode.b_nm
        )));
    }
    if !(mode.omega0_rad_fs > T::zero()) || !mode.omega0_rad_fs.is_finite() {
        return Err(Error::Domain(format!(
            "omega0 must be positive, got {}",
            mode.omega0_rad_fs
        )));
    }
    if !mode.px_e_nm.is_finite() || !mode.pz_e_nm.is_finite() {
        return Err(Error::Domain("dipole components must be finite".into()));
    }
    Ok(())
}

// −2e²ω₀/(ħv²γ), the common prefactor in 1/(e·nm).
fn dipole_prefactor<T: Real>(omega0: T, kin: &Kinematics<T>) -> T {
    let two = T::from_f64_const(2.0);
    -two * T::from_f64_const(E2_EV_NM) * omega0
        / (T::from_f64_const(HBAR_EV_FS) * kin.v_nm_fs * kin.v_nm_fs * kin.gamma)
}

/// ζ = ω₀ b / (vγ), the adiabaticity parameter of the passage.
pub fn zeta<T: Real>(omega0: T, b_nm: T, kin: &Kinematics<T>) -> T {
    omega0 * b_nm / (kin.v_nm_fs * kin.gamma)
}

/// Closed-form coupling to a point dipole, equal to the quadrature of the
/// retarded dipole field over the trajectory.
pub fn dipolar_beta0<T: Real>(mode: &DipoleMode<T>, kin: &Kinematics<T>) -> Result<Complex<T>> {
    check_mode(mode)?;
    let z = zeta(mode.omega0_rad_fs, mode.b_nm, kin);
    let k0 = bessel_k0(z)?;
    let k1 = bessel_k1(z)?;
    let pref = dipole_prefactor(mode.omega0_rad_fs, kin);
    Ok(Complex::new(
        pref * mode.pz_e_nm * k0 / kin.gamma,
        pref * mode.px_e_nm * k1,
    ))
}

/// First-order loss probability for a triply degenerate dipole mode of
/// magnitude p: the incoherent sum over the three Cartesian orientations,
/// P₋₁ = (2e²ω₀p/ħv²γ)² [K₁²(ζ) + K₀²(ζ)/γ²].
pub fn isotropic_eels_probability<T: Real>(
    p_e_nm: T,
    omega0: T,
    b_nm: T,
    kin: &Kinematics<T>,
) -> Result<T> {
    let mode = DipoleMode { omega0_rad_fs: omega0, px_e_nm: p_e_nm, pz_e_nm: p_e_nm, b_nm };
    check_mode(&mode)?;
    let z = zeta(omega0, b_nm, kin);
    let k0 = bessel_k0(z)?;
    let k1 = bessel_k1(z)?;
    let pref = dipole_prefactor(omega0, kin) * p_e_nm;
    Ok(pref * pref * (k1 * k1 + k0 * k0 / (kin.gamma * kin.gamma)))
}

/// Depolarization factor along the long axis of a prolate spheroid with
/// aspect ratio r > 1; decreases from 1/3 (sphere) toward 0 (needle).
pub fn depolarization_factor<T: Real>(aspect_ratio: T) -> Result<T> {
    let one = T::one();
    if !(aspect_ratio > one) || !aspect_ratio.is_finite() {
        return Err(Error::Domain(format!(
            "aspect ratio must exceed 1, got {aspect_ratio}"
        )));
    }
    let r2 = aspect_ratio * aspect_ratio;
    let delta = (r2 - one).sqrt();
    let half_pi = T::PI() * T::from_f64_const(0.5);
    let bracket = half_pi - (one / delta).atan() - delta / r2;
    Ok(r2 * T::from_f64_const(0.5) / (delta * delta * delta) * bracket)
}

/// Transverse dipolar plasmon of a prolate metallic spheroid: resonance
/// where ε(ω₀) = ε₀ = 1 − 1/L, with a Drude metal ε = ε_b − ω_p²/ω², and
/// the effective transition dipole p = (1−ε₀)√(ħω₀V / 8π(ε_b−ε₀)e²).
pub fn ellipsoid_mode<T: Real>(
    aspect_ratio: T,
    volume_nm3: T,
    plasma_energy_ev: T,
    eps_b: T,
) -> Result<ModeEstimate<T>> {
    if !(volume_nm3 > T::zero()) || !(plasma_energy_ev > T::zero()) {
        return Err(Error::Domain("volume and plasma energy must be positive".into()));
    }
    let l = depolarization_factor(aspect_ratio)?;
    let eps0 = T::one() - T::one() / l;
    let depth = eps_b - eps0;
    if !(depth > T::zero()) {
        return Err(Error::Domain(format!(
            "background permittivity {eps_b} cannot reach the resonance condition"
        )));
    }
    let hbar_omega = plasma_energy_ev / depth.sqrt();
    let eight_pi = T::from_f64_const(8.0) * T::PI();
    let p = (T::one() - eps0)
        * (hbar_omega * volume_nm3 / (eight_pi * depth * T::from_f64_const(E2_EV_NM))).sqrt();
    Ok(ModeEstimate { hbar_omega_ev: hbar_omega, dipole_e_nm: p })
}

/// Antisymmetric thin-shell plasmon of a metal shell (thickness t, outer
/// radius a) around a dielectric core: ω₀ ≈ (ω_p/√(ε_c+2))√(2t/a) and
/// p ≈ √(3ħω₀a³ / 2(ε_c+2)e²). Valid only for thin shells; callers should
/// treat t/a > 0.3 as marginal.
pub fn shell_mode<T: Real>(
    thickness_nm: T,
    radius_nm: T,
    eps_core: T,
    plasma_energy_ev: T,
) -> Result<ModeEstimate<T>> {
    if !(thickness_nm > T::zero()) || !(radius_nm > T::zero()) || !(plasma_energy_ev > T::zero()) {
        return Err(Error::Domain("shell dimensions and plasma energy must be positive".into()));
    }
    let ratio = thickness_nm / radius_nm;
    if ratio > T::from_f64_const(0.5) {
        return Err(Error::Domain(format!(
            "t/a = {ratio} is outside the thin-shell regime (max 0.5)"
        )));
    }
    let denom = eps_core + T::from_f64_const(2.0);
    if !(denom > T::zero()) {
        return Err(Error::Domain(format!("core permittivity {eps_core} must exceed -2")));
    }
    let hbar_omega =
        plasma_energy_ev / denom.sqrt() * (T::from_f64_const(2.0) * ratio).sqrt();
    let a3 = radius_nm * radius_nm * radius_nm;
    let p = (T::from_f64_const(1.5) * hbar_omega * a3
        / (denom * T::from_f64_const(E2_EV_NM)))
    .sqrt();
    Ok(ModeEstimate { hbar_omega_ev: hbar_omega, dipole_e_nm: p })
}

/// Purcell enhancement EF ≈ 9Q/(2ε ρ₀³) of an emitter inside a spherical
/// resonator of quality factor Q, permittivity ε, size parameter ρ₀.
pub fn purcell_enhancement<T: Real>(q: T, eps: T, rho0: T) -> Result<T> {
    if !(q > T::zero() && eps > T::zero() && rho0 > T::zero()) {
        return Err(Error::Domain("Purcell inputs must all be positive".into()));
    }
    Ok(T::from_f64_const(4.5) * q / (eps * rho0 * rho0 * rho0))
}

/// κ/g for a cavity of linewidth κ = ω₀/Q coupled at the Purcell-enhanced
/// rate EF·g₀. `omega0` and `g0` must be given in the same frequency unit.
pub fn cavity_kappa_over_g<T: Real>(omega0: T, q: T, ef: T, g0: T) -> Result<T> {
    if !(omega0 > T::zero() && q > T::zero() && ef > T::zero() && g0 > T::zero()) {
        return Err(Error::Domain("kappa/g inputs must all be positive".into()));
    }
    Ok(omega0 / q / (ef * g0))
}

/// Steady-state excited population of a cw-driven two-level (fermionic)
/// mode: n̄ = (1/2)·(I/I_s)/(1 + I/I_s), saturating at 1/2.
pub fn fermion_steady_state<T: Real>(intensity_ratio: T) -> Result<T> {
    if !(intensity_ratio >= T::zero()) {
        return Err(Error::Domain(format!(
            "intensity ratio must be non-negative, got {intensity_ratio}"
        )));
    }
    if intensity_ratio.is_infinite() {
        return Ok(T::from_f64_const(0.5));
    }
    Ok(T::from_f64_const(0.5) * intensity_ratio / (T::one() + intensity_ratio))
}

/// Steady-state population of a resonantly driven bosonic mode (coherent
/// state): n̄ = I/2I_s, unbounded and exactly linear in the intensity.
pub fn driven_boson_population<T: Real>(intensity_ratio: T) -> Result<T> {
    if !(intensity_ratio >= T::zero()) {
        return Err(Error::Domain(format!(
            "intensity ratio must be non-negative, got {intensity_ratio}"
        )));
    }
    Ok(T::from_f64_const(0.5) * intensity_ratio)
}

/// Saturation intensity I_s = c(ħκ)²/(16π p²) in eV/(fs·nm²), for the
/// linewidth ħκ in eV and dipole p in e·nm.
pub fn saturation_intensity<T: Real>(hbar_kappa_ev: T, p_e_nm: T) -> Result<T> {
    if !(hbar_kappa_ev > T::zero() && p_e_nm > T::zero()) {
        return Err(Error::Domain("linewidth and dipole must be positive".into()));
    }
    let sixteen_pi = T::from_f64_const(16.0) * T::PI();
    Ok(T::from_f64_const(C_NM_FS) * hbar_kappa_ev * hbar_kappa_ev
        / (sixteen_pi * p_e_nm * p_e_nm * T::from_f64_const(E2_EV_NM)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagation::{beta0_numeric, FieldProfile};
    use crate::units::electron_kinematics;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depolarization_limits_and_monotonicity() {
        let near_sphere = depolarization_factor::<f64>(1.0 + 1e-6).unwrap();
        assert!((near_sphere - 1.0 / 3.0).abs() < 1e-5, "{near_sphere}");
        let mut prev = near_sphere;
        for r in [1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 40.0] {
            let l = depolarization_factor::<f64>(r).unwrap();
            assert!(l > 0.0 && l < 1.0 / 3.0, "r {r}: L {l}");
            assert!(l < prev, "not decreasing at r {r}");
            prev = l;
        }
        assert!((depolarization_factor::<f64>(5.0).unwrap() - 0.1247581).abs() < 1e-6);
        assert!(depolarization_factor::<f64>(1.0).is_err());
    }

    #[test]
    fn silver_ellipsoid_preset_regime() {
        // aspect ratio 5, long axis 20 nm: semi-axes 10 and 2 nm
        let volume = 4.0 * std::f64::consts::PI / 3.0 * 2.0 * 2.0 * 10.0;
        let mode = ellipsoid_mode::<f64>(5.0, volume, SILVER_PLASMA_EV, SILVER_EPS_B).unwrap();
        assert!((mode.hbar_omega_ev - 2.7629).abs() < 2e-3, "{}", mode.hbar_omega_ev);
        assert!((mode.dipole_e_nm - 8.64).abs() < 0.05, "{}", mode.dipole_e_nm);
    }

    #[test]
    fn dipolar_beta0_matches_field_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..8 {
            let px: f64 = rng.gen_range(-5.0..5.0);
            let pz: f64 = rng.gen_range(-5.0..5.0);
            let b: f64 = rng.gen_range(2.0..30.0);
            let hbar_omega: f64 = rng.gen_range(1.0..6.0);
            let e_kin: f64 = rng.gen_range(30.0..200.0);
            let kin = electron_kinematics::<f64>(e_kin).unwrap();
            let omega0 = hbar_omega / HBAR_EV_FS;
            let mode = DipoleMode { omega0_rad_fs: omega0, px_e_nm: px, pz_e_nm: pz, b_nm: b };
            let closed = dipolar_beta0(&mode, &kin).unwrap();
            let profile =
                FieldProfile::DipoleAtImpactParameter { px_e_nm: px, pz_e_nm: pz, b_nm: b };
            let quad = beta0_numeric(&profile, kin.beta, omega0).unwrap();
            let rel = (closed - quad).norm() / closed.norm().max(1e-6);
            assert!(
                rel < 1e-8,
                "px {px:.3} pz {pz:.3} b {b:.2} hw {hbar_omega:.3} E {e_kin:.1}: rel {rel:.2e}"
            );
        }
    }

    #[test]
    fn zero_dipole_and_far_field_decay() {
        let kin = electron_kinematics::<f64>(100.0).unwrap();
        let mode = DipoleMode { omega0_rad_fs: 3.0, px_e_nm: 0.0, pz_e_nm: 0.0, b_nm: 5.0 };
        assert_eq!(dipolar_beta0(&mode, &kin).unwrap().norm(), 0.0);

        // |β₀| ~ e^{−ζ}/√ζ for large ζ (dominant K₁ asymptotics)
        let omega0 = 3.0;
        let b_for = |zeta_target: f64| zeta_target * kin.v_nm_fs * kin.gamma / omega0;
        let m5 = DipoleMode { omega0_rad_fs: omega0, px_e_nm: 1.0, pz_e_nm: 0.0, b_nm: b_for(5.0) };
        let m10 =
            DipoleMode { omega0_rad_fs: omega0, px_e_nm: 1.0, pz_e_nm: 0.0, b_nm: b_for(10.0) };
        let ratio = dipolar_beta0(&m10, &kin).unwrap().norm()
            / dipolar_beta0(&m5, &kin).unwrap().norm();
        let asymptotic = (-5.0f64).exp() * (5.0f64 / 10.0).sqrt();
        assert!((ratio / asymptotic - 1.0).abs() < 0.05, "ratio {ratio:.3e}");
    }

    #[test]
    fn isotropic_probability_is_the_three_dipole_sum() {
        let kin = electron_kinematics::<f64>(60.0).unwrap();
        let (p, omega0, b) = (2.5, 2.8, 7.0);
        let iso = isotropic_eels_probability::<f64>(p, omega0, b, &kin).unwrap();
        let bx = dipolar_beta0(
            &DipoleMode { omega0_rad_fs: omega0, px_e_nm: p, pz_e_nm: 0.0, b_nm: b },
            &kin,
        )
        .unwrap();
        let bz = dipolar_beta0(
            &DipoleMode { omega0_rad_fs: omega0, px_e_nm: 0.0, pz_e_nm: p, b_nm: b },
            &kin,
        )
        .unwrap();
        // the y-oriented dipole has no field component along the trajectory
        let sum = bx.norm_sqr() + bz.norm_sqr();
        assert!((iso - sum).abs() <= 1e-14 * iso, "{iso} vs {sum}");
    }

    #[test]
    fn isotropic_probability_decreases_with_b() {
        let kin = electron_kinematics::<f64>(30.0).unwrap();
        let mut prev = f64::INFINITY;
        for b in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
            let p = isotropic_eels_probability::<f64>(1.0, 2.0, b, &kin).unwrap();
            assert!(p < prev, "b {b}");
            prev = p;
        }
    }

    #[test]
    fn nonrelativistic_limit_of_isotropic_form() {
        // at low energy γ → 1 and the two K terms enter with equal weight
        let kin = electron_kinematics::<f64>(0.05).unwrap();
        assert!((kin.gamma - 1.0).abs() < 1e-4);
        let got = isotropic_eels_probability::<f64>(1.0, 0.5, 3.0, &kin).unwrap();
        let z = zeta(0.5, 3.0, &kin);
        let pref = 2.0 * E2_EV_NM * 0.5 / (HBAR_EV_FS * kin.v_nm_fs * kin.v_nm_fs * kin.gamma);
        let want = pref * pref
            * (bessel_k1(z).unwrap().powi(2) + bessel_k0(z).unwrap().powi(2) / kin.gamma.powi(2));
        assert!((got - want).abs() < 1e-15 * want);
        let gamma1 = bessel_k1(z).unwrap().powi(2) + bessel_k0(z).unwrap().powi(2);
        assert!((got / (pref * pref) / gamma1 - 1.0).abs() < 2e-4);
    }

    #[test]
    fn shell_mode_scalings() {
        let base = shell_mode::<f64>(2.0, 10.0, 2.0, SILVER_PLASMA_EV).unwrap();
        let doubled = shell_mode::<f64>(4.0, 10.0, 2.0, SILVER_PLASMA_EV).unwrap();
        let ratio = doubled.hbar_omega_ev / base.hbar_omega_ev;
        assert!((ratio - 2.0f64.sqrt()).abs() < 1e-12);
        assert!(base.dipole_e_nm > 0.0);
        assert!(base.hbar_omega_ev > 1.0 && base.hbar_omega_ev < 4.0);
        assert!(matches!(
            shell_mode::<f64>(6.0, 10.0, 2.0, SILVER_PLASMA_EV),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn purcell_value_and_linearity() {
        let ef = purcell_enhancement::<f64>(1.0e4, 12.0, 2.6775).unwrap();
        assert!((ef - 195.36).abs() < 0.05, "{ef}");
        let ef2 = purcell_enhancement::<f64>(2.0e4, 12.0, 2.6775).unwrap();
        assert!((ef2 / ef - 2.0).abs() < 1e-12);
        let om = 2.0 * std::f64::consts::PI * 0.1; // 100 THz in rad/fs
        let g0 = 2.0 * std::f64::consts::PI * 1e-6; // 1 GHz in rad/fs
        let k_over_g = cavity_kappa_over_g::<f64>(om, 1.0e4, ef, g0).unwrap();
        assert!((k_over_g - 0.0512).abs() < 1e-3, "{k_over_g}");
    }

    #[test]
    fn saturating_populations() {
        assert_eq!(fermion_steady_state::<f64>(0.0).unwrap(), 0.0);
        assert!((fermion_steady_state::<f64>(1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((fermion_steady_state::<f64>(f64::INFINITY).unwrap() - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        let mut prev_ratio = 0.0;
        let mut prev_slope = f64::INFINITY;
        for ratio in [0.5, 1.0, 2.0, 4.0, 8.0, 1e3, 1e9] {
            let n = fermion_steady_state::<f64>(ratio).unwrap();
            assert!(n < 0.5 && n > prev, "ratio {ratio}");
            let slope = (n - prev) / (ratio - prev_ratio);
            assert!(slope < prev_slope, "not concave at {ratio}");
            prev = n;
            prev_ratio = ratio;
            prev_slope = slope;
        }
        assert!((driven_boson_population::<f64>(2.0).unwrap() - 1.0).abs() < 1e-15);
        let (a, b) = (0.7, 1.9);
        let lin = driven_boson_population::<f64>(a + b).unwrap()
            - driven_boson_population::<f64>(a).unwrap()
            - driven_boson_population::<f64>(b).unwrap();
        assert!(lin.abs() < 1e-15);
        assert!(fermion_steady_state::<f64>(-0.1).is_err());
    }

    #[test]
    fn saturation_intensity_scaling() {
        let base = saturation_intensity::<f64>(1e-3, 2.0).unwrap();
        let quad = saturation_intensity::<f64>(4e-3, 2.0).unwrap();
        assert!((quad / base - 16.0).abs() < 1e-12);
        let closer = saturation_intensity::<f64>(1e-3, 4.0).unwrap();
        assert!((base / closer - 4.0).abs() < 1e-12);
        assert!(saturation_intensity::<f64>(0.0, 1.0).is_err());
    }
}
