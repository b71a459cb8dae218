//! Cavity-feeding runner: integrate the N-emitter trajectory, then attach
//! an electron spectrum to each requested time sample.

use std::path::PathBuf;

use num_complex::Complex;

use qpinem_core::cavity::{default_time_grid, evolve, g2_of, spectra_over_time};
use qpinem_core::Error;

use crate::config::{CavityQeConfig, Ctx};
use crate::output::{fmt_num, write_tables, Cell, Table};
use crate::{Failure, RunResult};

pub(crate) fn run_cavity_qe(ctx: &Ctx, cfg: &CavityQeConfig) -> RunResult<Vec<PathBuf>> {
    if cfg.spectra_stride == 0 {
        return Err(Failure::Validation("spectra_stride must be at least 1".into()));
    }
    if !(cfg.beta0_abs >= 0.0 && cfg.beta0_abs <= 2.0) {
        return Err(Failure::Validation(format!(
            "beta0_abs must lie in [0, 2], got {}",
            cfg.beta0_abs
        )));
    }
    let n = cfg.n_emitters;
    // the config ratio is the figure-axis label kappa/(N g)
    let kappa_over_g = cfg.kappa_over_ng * n as f64;
    let grid = match &cfg.time_grid {
        Some(g) => g.clone(),
        None => default_time_grid(n),
    };
    let traj = evolve(n, kappa_over_g, &grid, ctx.tol.clamp(1e-12, 1e-6))?;
    let l_max = cfg.l_max.unwrap_or(n + 24);
    let specs = spectra_over_time(&traj, Complex::new(cfg.beta0_abs, 0.0), l_max)?;

    let mut columns = vec!["gt".to_string(), "nbar".to_string(), "g2".to_string()];
    columns.extend((0..=n).map(|i| format!("p{i}")));
    let mut trajectory = Table::new("trajectory", &[]);
    trajectory.columns = columns;
    for state in traj.states() {
        let g2 = match g2_of(state) {
            Ok(v) => v,
            Err(Error::Undefined(_)) => f64::NAN,
            Err(e) => return Err(e.into()),
        };
        let mut row = vec![
            Cell::Num(state.time()),
            Cell::Num(state.mean_photons()),
            Cell::Num(g2),
        ];
        row.extend(state.marginal_photons().into_iter().map(Cell::Num));
        trajectory.rows.push(row);
    }

    let mut spectra = Table::new("spectra", &["gt", "ell", "p"]);
    for (state, spec) in traj.states().iter().zip(&specs).step_by(cfg.spectra_stride) {
        let gt = state.time();
        spectra.notes.push((format!("deficit gt={gt}"), fmt_num(spec.deficit())));
        for (ell, p) in spec.iter() {
            spectra.rows.push(vec![Cell::Num(gt), Cell::Num(ell as f64), Cell::Num(p)]);
        }
    }
    write_tables(ctx, vec![trajectory, spectra])
}
