//! Coupling-estimate runner: closed-form dipole couplings, quasistatic
//! mode presets, Purcell figures, and driven steady states.

use std::path::PathBuf;

use qpinem_core::coupling::{
    cavity_kappa_over_g, dipolar_beta0, driven_boson_population, ellipsoid_mode,
    fermion_steady_state, isotropic_eels_probability, purcell_enhancement,
    saturation_intensity, shell_mode, DipoleMode, ModeEstimate,
};
use qpinem_core::units::{electron_kinematics, omega_from_ev, EV_PER_FS_NM2_TO_W_M2};

use crate::config::{Axis, BetaScan, CouplingConfig, Ctx};
use crate::output::{fmt_num, write_tables, Cell, Table};
use crate::{Failure, RunResult};

fn check_energy(hbar_omega0_ev: f64) -> RunResult<f64> {
    if !(hbar_omega0_ev > 0.0) || !hbar_omega0_ev.is_finite() {
        return Err(Failure::Validation(format!(
            "hbar_omega0_ev must be positive, got {hbar_omega0_ev}"
        )));
    }
    Ok(omega_from_ev(hbar_omega0_ev))
}

fn dipole_rows(
    omega0: f64,
    px_e_nm: f64,
    pz_e_nm: f64,
    kinetic_kev: f64,
    b_nm: &Axis,
) -> RunResult<Vec<Vec<Cell>>> {
    let kin = electron_kinematics(kinetic_kev)?;
    let mut rows = Vec::new();
    for b in b_nm.values("b_nm")? {
        let mode = DipoleMode { omega0_rad_fs: omega0, px_e_nm, pz_e_nm, b_nm: b };
        let beta0 = dipolar_beta0(&mode, &kin)?;
        rows.push(vec![
            Cell::Num(b),
            Cell::Num(beta0.re),
            Cell::Num(beta0.im),
            Cell::Num(beta0.norm()),
        ]);
    }
    Ok(rows)
}

fn mode_tables(est: &ModeEstimate<f64>, scan: &Option<BetaScan>) -> RunResult<Vec<Table>> {
    let mut mode = Table::new("mode", &["hbar_omega0_ev", "dipole_e_nm"]);
    mode.rows.push(vec![Cell::Num(est.hbar_omega_ev), Cell::Num(est.dipole_e_nm)]);
    let mut tables = vec![mode];
    if let Some(scan) = scan {
        // transverse dipole orientation, the one the beam couples to best
        let rows =
            dipole_rows(est.omega0_rad_fs(), est.dipole_e_nm, 0.0, scan.kinetic_kev, &scan.b_nm)?;
        let mut beta = Table::new("beta0", &["b_nm", "beta0_re", "beta0_im", "beta0_abs"]);
        beta.rows = rows;
        tables.push(beta);
    }
    Ok(tables)
}

pub(crate) fn run_coupling(ctx: &Ctx, cfg: &CouplingConfig) -> RunResult<Vec<PathBuf>> {
    let tables = match cfg {
        CouplingConfig::Dipole { hbar_omega0_ev, px_e_nm, pz_e_nm, kinetic_kev, b_nm } => {
            let omega0 = check_energy(*hbar_omega0_ev)?;
            let mut t = Table::new("dipole", &["b_nm", "beta0_re", "beta0_im", "beta0_abs"]);
            t.rows = dipole_rows(omega0, *px_e_nm, *pz_e_nm, *kinetic_kev, b_nm)?;
            vec![t]
        }
        CouplingConfig::Eels { hbar_omega0_ev, p_e_nm, kinetic_kev, b_nm } => {
            let omega0 = check_energy(*hbar_omega0_ev)?;
            let kin = electron_kinematics(*kinetic_kev)?;
            let mut t = Table::new("eels", &["b_nm", "p_loss"]);
            for b in b_nm.values("b_nm")? {
                let p = isotropic_eels_probability(*p_e_nm, omega0, b, &kin)?;
                t.rows.push(vec![Cell::Num(b), Cell::Num(p)]);
            }
            vec![t]
        }
        CouplingConfig::Ellipsoid { aspect_ratio, long_axis_nm, plasma_energy_ev, eps_b, scan } => {
            if !(*long_axis_nm > 0.0) {
                return Err(Failure::Validation(format!(
                    "long_axis_nm must be positive, got {long_axis_nm}"
                )));
            }
            let a = long_axis_nm / 2.0;
            let c = a / aspect_ratio;
            let volume = 4.0 / 3.0 * std::f64::consts::PI * a * c * c;
            let est = ellipsoid_mode(*aspect_ratio, volume, *plasma_energy_ev, *eps_b)?;
            mode_tables(&est, scan)?
        }
        CouplingConfig::Shell { thickness_nm, radius_nm, eps_core, plasma_energy_ev, scan } => {
            let est = shell_mode(*thickness_nm, *radius_nm, *eps_core, *plasma_energy_ev)?;
            if thickness_nm / radius_nm > 0.3 {
                eprintln!(
                    "qpinem: warning: t/a = {} is marginal for the thin-shell estimate",
                    thickness_nm / radius_nm
                );
            }
            mode_tables(&est, scan)?
        }
        CouplingConfig::Purcell { q, eps, rho0, hbar_omega0_ev, hbar_g0_ev } => {
            let ef = purcell_enhancement(*q, *eps, *rho0)?;
            let kappa_over_g = cavity_kappa_over_g(*hbar_omega0_ev, *q, ef, *hbar_g0_ev)?;
            let mut t = Table::new("purcell", &["ef", "kappa_over_g"]);
            t.rows.push(vec![Cell::Num(ef), Cell::Num(kappa_over_g)]);
            vec![t]
        }
        CouplingConfig::Saturation { intensity_over_is, hbar_kappa_ev, p_e_nm } => {
            let mut t = Table::new(
                "saturation",
                &["intensity_over_is", "fermion_nbar", "fermion_gain_loss_ratio", "boson_nbar"],
            );
            for r in intensity_over_is.values("intensity_over_is")? {
                let nf = fermion_steady_state(r)?;
                let nb = driven_boson_population(r)?;
                t.rows.push(vec![
                    Cell::Num(r),
                    Cell::Num(nf),
                    Cell::Num(nf / (1.0 - nf)),
                    Cell::Num(nb),
                ]);
            }
            match (hbar_kappa_ev, p_e_nm) {
                (Some(k), Some(p)) => {
                    let is = saturation_intensity(*k, *p)?;
                    t.notes.push(("saturation_intensity_ev_fs_nm2".into(), fmt_num(is)));
                    t.notes.push((
                        "saturation_intensity_w_m2".into(),
                        fmt_num(is * EV_PER_FS_NM2_TO_W_M2),
                    ));
                }
                (None, None) => {}
                _ => {
                    return Err(Failure::Validation(
                        "hbar_kappa_ev and p_e_nm must be given together".into(),
                    ))
                }
            }
            vec![t]
        }
    };
    write_tables(ctx, tables)
}
