//! Retrieval runner: g^(l) estimates from a sideband table, read inline or
//! from a CSV produced by the spectrum command (or any file whose final two
//! columns are l and P_l).

use std::path::PathBuf;

use num_complex::Complex;

use qpinem_core::interaction::{measured_spectrum, weak_coupling_valid};
use qpinem_core::spectra::retrieve_g;

use crate::config::{Ctx, RetrieveConfig};
use crate::output::{write_tables, Cell, Table};
use crate::{Failure, RunResult};

pub(crate) fn run_retrieve(ctx: &Ctx, cfg: &RetrieveConfig) -> RunResult<Vec<PathBuf>> {
    let pairs = match (&cfg.spectrum_file, &cfg.pairs) {
        (Some(_), Some(_)) => {
            return Err(Failure::Validation(
                "give either spectrum_file or pairs, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Failure::Validation("one of spectrum_file or pairs is required".into()))
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Failure::Validation(format!("cannot read {}: {e}", path.display()))
            })?;
            parse_pairs(&text)?
        }
        (None, Some(pairs)) => pairs.clone(),
    };
    if cfg.ells.is_empty() {
        return Err(Failure::Validation("ells is empty".into()));
    }
    let spec = measured_spectrum(&pairs)?;

    // the retrieval identity is a weak-coupling statement; flag inputs
    // that sit outside its validity band
    let x_est = spec.p(-1) - spec.p(1);
    if x_est > 0.0 {
        let nbar_est = spec.p(1) / x_est;
        if !weak_coupling_valid(nbar_est, Complex::new(x_est.sqrt(), 0.0)) {
            eprintln!(
                "qpinem: warning: implied sqrt(nbar)|beta0| = {:.3} is outside the \
                 weak-coupling band; estimates carry finite-coupling bias",
                (nbar_est.max(1.0) * x_est).sqrt()
            );
        }
    } else {
        eprintln!(
            "qpinem: warning: losses do not exceed gains; the weak-coupling \
             retrieval identity may not apply to this table"
        );
    }

    let mut t = Table::new("retrieval", &["ell", "g"]);
    for &ell in &cfg.ells {
        t.rows.push(vec![Cell::Num(ell as f64), Cell::Num(retrieve_g(&spec, ell)?)]);
    }
    write_tables(ctx, vec![t])
}

/// Rows of numbers, comma or whitespace separated; `#` lines are comments
/// and one leading non-numeric header line is tolerated. With three or
/// more columns the leading columns must be constant (a single grid
/// point) and the final two are taken as (l, P_l).
fn parse_pairs(text: &str) -> RunResult<Vec<(i64, f64)>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Option<Vec<f64>> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().ok())
            .collect();
        match cells {
            Some(cells) if !cells.is_empty() => rows.push(cells),
            _ if rows.is_empty() => {} // header line
            _ => {
                return Err(Failure::Validation(format!(
                    "spectrum file line {}: not numeric: {line:?}",
                    idx + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(Failure::Validation("spectrum file has no data rows".into()));
    }
    let width = rows[0].len();
    if width < 2 || rows.iter().any(|r| r.len() != width) {
        return Err(Failure::Validation(
            "spectrum file needs a fixed column count of at least 2".into(),
        ));
    }
    if width > 2 {
        for col in 0..width - 2 {
            if rows.iter().any(|r| r[col] != rows[0][col]) {
                return Err(Failure::Validation(
                    "spectrum file holds several grid points; retrieval needs exactly one".into(),
                ));
            }
        }
    }
    rows.iter()
        .map(|r| {
            let (ell, p) = (r[width - 2], r[width - 1]);
            if ell.fract() != 0.0 || ell.abs() > i64::MAX as f64 {
                return Err(Failure::Validation(format!("sideband index {ell} is not an integer")));
            }
            Ok((ell as i64, p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_from_plain_and_prefixed_tables() {
        let plain = "# comment\nell,p\n-1,0.2\n0,0.7\n1,0.1\n";
        assert_eq!(parse_pairs(plain).unwrap(), vec![(-1, 0.2), (0, 0.7), (1, 0.1)]);
        let prefixed = "beta0_abs,ell,p\n0.1,-1,0.2\n0.1,0,0.7\n0.1,1,0.1\n";
        assert_eq!(parse_pairs(prefixed).unwrap(), vec![(-1, 0.2), (0, 0.7), (1, 0.1)]);
        let two_groups = "b,ell,p\n0.1,0,0.5\n0.2,0,0.5\n";
        assert!(parse_pairs(two_groups).is_err());
        assert!(parse_pairs("ell,p\n0.5,0.2\n").is_err());
        assert!(parse_pairs("").is_err());
    }
}
