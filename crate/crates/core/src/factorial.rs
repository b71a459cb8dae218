//! Log-factorial table.
//!
//! Photon indices run into the thousands, so factorials only ever appear
//! through ln n! differences inside exponentials. The table is built once
//! by cumulative summation of ln k, which keeps the absolute error of
//! ln n! below ~n·ε; the quantities consuming it are ratios of nearby
//! entries where that error cancels.

use crate::scalar::Real;

/// Cumulative table of ln n! for n = 0..=n_max.
#[derive(Debug, Clone)]
pub struct LnFactorial<T> {
    table: Vec<T>,
}

impl<T: Real> LnFactorial<T> {
    /// Build the table up to and including `n_max`.
    pub fn new(n_max: usize) -> Self {
        let mut table = Vec::with_capacity(n_max + 1);
        let mut acc = T::zero();
        table.push(acc);
        for k in 1..=n_max {
            acc = acc + T::from_count(k).ln();
            table.push(acc);
        }
        Self { table }
    }

    /// ln n!.
    pub fn ln(&self, n: usize) -> crate::Result<T> {
        self.table
            .get(n)
            .copied()
            .ok_or(crate::Error::Capacity { index: n, max: self.table.len() - 1 })
    }

    /// Largest tabulated n.
    pub fn n_max(&self) -> usize {
        self.table.len() - 1
    }
}

/// ½(ln n! − ln n₀!) as needed by displacement matrix elements, computed
/// from one shared table.
pub fn half_ln_ratio<T: Real>(lf: &LnFactorial<T>, n: usize, n0: usize) -> crate::Result<T> {
    Ok((lf.ln(n)? - lf.ln(n0)?) * T::from_f64_const(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values_exact() {
        let lf = LnFactorial::<f64>::new(12);
        assert_eq!(lf.ln(0).unwrap(), 0.0);
        assert_eq!(lf.ln(1).unwrap(), 0.0);
        assert!((lf.ln(5).unwrap() - 120.0_f64.ln()).abs() < 1e-13);
        assert!((lf.ln(12).unwrap() - 479001600.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn large_value_against_stirling() {
        // ln n! = n ln n − n + ½ln(2πn) + 1/(12n) − …
        let lf = LnFactorial::<f64>::new(4096);
        let n = 4096.0_f64;
        let stirling = n * n.ln() - n
            + 0.5 * (2.0 * std::f64::consts::PI * n).ln()
            + 1.0 / (12.0 * n);
        assert!((lf.ln(4096).unwrap() - stirling).abs() < 1e-8);
    }

    #[test]
    fn out_of_table_is_capacity_error() {
        let lf = LnFactorial::<f64>::new(4);
        assert!(matches!(lf.ln(5), Err(crate::Error::Capacity { index: 5, max: 4 })));
    }
}
