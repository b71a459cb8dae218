//! Spectrum-family runners: single-statistics coupling grids, the
//! gain/loss-ratio density grid, and long-format sweeps. Grid points are
//! independent, so they run in parallel with output in grid order.

use std::path::PathBuf;

use num_complex::Complex;
use rayon::prelude::*;

use qpinem_core::interaction::{exact_spectrum, exact_spectrum_auto};
use qpinem_core::populations::Distribution;
use qpinem_core::spectra::{broaden, gains_losses_ratio};
use qpinem_core::Spectrum64;

use crate::config::{tail_eps, Ctx, Fig1Config, KindName, SpectrumConfig, SweepConfig};
use crate::output::{fmt_num, write_tables, Cell, Table};
use crate::{Failure, RunResult};

pub(crate) fn run_spectrum(ctx: &Ctx, cfg: &SpectrumConfig) -> RunResult<Vec<PathBuf>> {
    let dist = cfg.statistics.build(tail_eps(ctx.tol))?;
    let axis_vals = cfg.beta0_abs.values("beta0_abs")?;
    let axis_name = if cfg.scaled_by_sqrt_nbar { "sqrt_nbar_beta0_abs" } else { "beta0_abs" };
    let scale = if cfg.scaled_by_sqrt_nbar {
        if !(dist.mean() > 0.0) {
            return Err(Failure::Validation(
                "scaled_by_sqrt_nbar requires statistics with nbar > 0".into(),
            ));
        }
        1.0 / dist.mean().sqrt()
    } else {
        1.0
    };
    let specs: Vec<Spectrum64> = axis_vals
        .par_iter()
        .map(|&b| {
            let beta0 = Complex::from_polar(b * scale, cfg.beta0_phase_rad);
            exact_spectrum(&dist, beta0, cfg.l_max)
        })
        .collect::<qpinem_core::Result<_>>()?;

    let mut spectrum = Table::new("spectrum", &[axis_name, "ell", "p"]);
    for (&b, spec) in axis_vals.iter().zip(&specs) {
        spectrum.notes.push((format!("deficit {axis_name}={b}"), fmt_num(spec.deficit())));
        for (ell, p) in spec.iter() {
            spectrum.rows.push(vec![Cell::Num(b), Cell::Num(ell as f64), Cell::Num(p)]);
        }
    }

    let mut tables = vec![spectrum];
    if let Some(br) = &cfg.broaden {
        if br.samples < 2 || !(br.energy_max > br.energy_min) {
            return Err(Failure::Validation(format!(
                "broaden: need samples >= 2 and energy_max > energy_min, got {} in [{}, {}]",
                br.samples, br.energy_min, br.energy_max
            )));
        }
        let step = (br.energy_max - br.energy_min) / (br.samples as f64 - 1.0);
        let energy: Vec<f64> =
            (0..br.samples).map(|i| br.energy_min + step * i as f64).collect();
        let mut trace = Table::new("trace", &[axis_name, "energy", "intensity"]);
        for (&b, spec) in axis_vals.iter().zip(&specs) {
            let t = broaden(spec, br.fwhm, &energy)?;
            for (&e, &i) in t.energy().iter().zip(t.intensity()) {
                trace.rows.push(vec![Cell::Num(b), Cell::Num(e), Cell::Num(i)]);
            }
        }
        tables.push(trace);
    }
    write_tables(ctx, tables)
}

/// Vacuum is the n̄ → 0 limit of every statistics family.
fn grid_distribution(kind: KindName, n: u32, tail: f64) -> qpinem_core::Result<Distribution<f64>> {
    match kind {
        KindName::Fock => Distribution::fock(n as usize),
        KindName::Coherent => Distribution::coherent(n as f64, tail),
        KindName::Thermal if n == 0 => Distribution::fock(0),
        KindName::Thermal => Distribution::thermal(n as f64, tail),
    }
}

pub(crate) fn run_fig1(ctx: &Ctx, cfg: &Fig1Config) -> RunResult<Vec<PathBuf>> {
    if cfg.kinds.is_empty() {
        return Err(Failure::Validation("kinds is empty".into()));
    }
    for (i, k) in cfg.kinds.iter().enumerate() {
        if cfg.kinds[..i].contains(k) {
            return Err(Failure::Validation(format!("kind {} listed twice", k.label())));
        }
    }
    if cfg.nbar_max > 50 {
        return Err(Failure::Validation(format!(
            "nbar_max is capped at 50, got {}",
            cfg.nbar_max
        )));
    }
    let betas = cfg.beta0_abs.values("beta0_abs")?;
    if let Some(bad) = betas.iter().find(|&&b| !(b > 0.0)) {
        return Err(Failure::Validation(format!(
            "beta0_abs must be positive on the ratio grid, got {bad}"
        )));
    }
    let tail = tail_eps(ctx.tol);

    let mut columns = vec!["nbar".to_string()];
    columns.extend(betas.iter().map(|b| format!("{b}")));
    let mut tables = Vec::new();
    for &kind in &cfg.kinds {
        let rows: Vec<Vec<Cell>> = (0..=cfg.nbar_max)
            .into_par_iter()
            .map(|n| -> RunResult<Vec<Cell>> {
                let dist = grid_distribution(kind, n, tail)?;
                let mut row = Vec::with_capacity(betas.len() + 1);
                row.push(Cell::Num(n as f64));
                for &b in &betas {
                    let spec = exact_spectrum_auto(&dist, Complex::new(b, 0.0))?;
                    row.push(Cell::Num(gains_losses_ratio(&spec)?));
                }
                Ok(row)
            })
            .collect::<RunResult<_>>()?;
        let mut table = Table::new(format!("fig1_{}", kind.label()), &[]);
        table.columns = columns.clone();
        table.rows = rows;
        tables.push(table);
    }
    write_tables(ctx, tables)
}

pub(crate) fn run_sweep(ctx: &Ctx, cfg: &SweepConfig) -> RunResult<Vec<PathBuf>> {
    if cfg.statistics.is_empty() {
        return Err(Failure::Validation("statistics is empty".into()));
    }
    let betas = cfg.beta0_abs.values("beta0_abs")?;
    let tail = tail_eps(ctx.tol);
    let dists: Vec<_> = cfg
        .statistics
        .iter()
        .map(|s| Ok((s.label(), s.build(tail)?)))
        .collect::<RunResult<Vec<_>>>()?;

    let jobs: Vec<(usize, f64)> = (0..dists.len())
        .flat_map(|i| betas.iter().map(move |&b| (i, b)))
        .collect();
    let specs: Vec<Spectrum64> = jobs
        .par_iter()
        .map(|&(i, b)| exact_spectrum(&dists[i].1, Complex::new(b, 0.0), cfg.l_max))
        .collect::<qpinem_core::Result<_>>()?;

    let mut table =
        Table::new("sweep", &["kind", "nbar", "beta0_abs", "ell", "p", "deficit"]);
    for (&(i, b), spec) in jobs.iter().zip(&specs) {
        let (label, dist) = &dists[i];
        for (ell, p) in spec.iter() {
            table.rows.push(vec![
                Cell::Text(label),
                Cell::Num(dist.mean()),
                Cell::Num(b),
                Cell::Num(ell as f64),
                Cell::Num(p),
                Cell::Num(spec.deficit()),
            ]);
        }
    }
    write_tables(ctx, vec![table])
}
