//! Fock matrix elements ⟨n|Ŝ|n₀⟩ of the mode displacement produced by the
//! electron passage.
//!
//! With x = |β₀|², k = |n − n₀| and s = min(n, n₀) the magnitude is
//!
//!   d_s = √(s!/(s+k)!) x^{k/2} e^{−x/2} L_s^{(k)}(x),   |d_s| ≤ 1,
//!
//! and the phase is carried by (−β₀)^{n₀−n} for n ≤ n₀, (β₀*)^{n−n₀}
//! otherwise; the irrelevant global phase is dropped. The d_j are produced
//! by the normalized Laguerre recurrence
//!
//!   d_j = (2(j−1)+k+1−x)/√(j(j+k)) · d_{j−1} − √((j−1)(j−1+k)/(j(j+k))) · d_{j−2},
//!
//! whose iterates stay in [−1, 1], so nothing overflows at any n; the
//! literal alternating factorial sum loses all precision by n ≈ 30. The
//! seed d₀ = exp(−x/2 + (k/2)ln x − ½ln k!) is evaluated in log space so
//! far-off-diagonal elements keep full relative accuracy.

use crate::factorial::LnFactorial;
use crate::scalar::Real;
use crate::{Error, Result};
use num_complex::Complex;

/// ⟨n|Ŝ|n₀⟩ for displacement β₀.
///
/// Requires `n` and `n0` within the factorial table.
pub fn displacement_amplitude<T: Real>(
    n: usize,
    n0: usize,
    beta0: Complex<T>,
    lf: &LnFactorial<T>,
) -> Result<Complex<T>> {
    let hi = n.max(n0);
    if hi > lf.n_max() {
        return Err(Error::Capacity { index: hi, max: lf.n_max() });
    }
    if !beta0.re.is_finite() || !beta0.im.is_finite() {
        return Err(Error::Domain("beta0 must be finite".into()));
    }
    let x = beta0.norm_sqr();
    if x == T::zero() {
        let v = if n == n0 { T::one() } else { T::zero() };
        return Ok(Complex::new(v, T::zero()));
    }
    let k = n.abs_diff(n0);
    let s = n.min(n0);
    let d = diagonal_magnitudes(k, s, x, lf)?;
    if k == 0 {
        return Ok(Complex::new(d[s], T::zero()));
    }
    // phase convention of the (−β₀)^{n₀−n} / (β₀*)^{n−n₀} prefactors
    let unit = if n <= n0 { -beta0 } else { beta0.conj() } / Complex::new(x.sqrt(), T::zero());
    let phase = Complex::from_polar(T::one(), unit.arg() * T::from_count(k));
    Ok(phase * d[s])
}

/// Squared magnitudes |⟨j|Ŝ|j+k⟩|² = |⟨j+k|Ŝ|j⟩|² for j = 0..=j_max.
///
/// One recurrence pass serves every initial population on the k-th
/// sideband, which makes a full spectrum O(L·n_max).
pub fn displacement_diagonal_sq<T: Real>(
    k: usize,
    j_max: usize,
    x: T,
    lf: &LnFactorial<T>,
) -> Result<Vec<T>> {
    if j_max + k > lf.n_max() {
        return Err(Error::Capacity { index: j_max + k, max: lf.n_max() });
    }
    if !(x >= T::zero()) || !x.is_finite() {
        return Err(Error::Domain(format!("|beta0|^2 must be finite and >= 0, got {x}")));
    }
    if x == T::zero() {
        let v = if k == 0 { T::one() } else { T::zero() };
        return Ok(vec![v; j_max + 1]);
    }
    let d = diagonal_magnitudes(k, j_max, x, lf)?;
    Ok(d.into_iter().map(|v| v * v).collect())
}

// d_j for j = 0..=j_top at fixed offset k; x > 0.
fn diagonal_magnitudes<T: Real>(
    k: usize,
    j_top: usize,
    x: T,
    lf: &LnFactorial<T>,
) -> Result<Vec<T>> {
    let half = T::from_f64_const(0.5);
    let mut ln_seed = -x * half;
    if k > 0 {
        ln_seed = ln_seed + T::from_count(k) * half * x.ln() - lf.ln(k)? * half;
    }
    let mut d = Vec::with_capacity(j_top + 1);
    d.push(ln_seed.exp());
    let kf = T::from_count(k);
    for j in 1..=j_top {
        let jf = T::from_count(j);
        let denom = (jf * (jf + kf)).sqrt();
        let a = (T::from_count(2 * (j - 1) + k + 1) - x) / denom;
        let prev = d[j - 1];
        let prev2 = if j >= 2 {
            let jm = jf - T::one();
            ((jm * (jm + kf)).sqrt() / denom) * d[j - 2]
        } else {
            T::zero()
        };
        d.push(a * prev - prev2);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit;

    fn table() -> LnFactorial<f64> {
        LnFactorial::new(256)
    }

    fn amp(n: usize, n0: usize, b: Complex<f64>, lf: &LnFactorial<f64>) -> Complex<f64> {
        displacement_amplitude(n, n0, b, lf).unwrap()
    }

    #[test]
    fn vacuum_element_is_gaussian() {
        let lf = table();
        let b = Complex::from_polar(1.0, 0.7);
        let d = amp(0, 0, b, &lf);
        assert!((d.re - 0.6065306597126334).abs() < 1e-15);
        assert!(d.im.abs() < 1e-15);
    }

    #[test]
    fn matches_literal_sum_oracle() {
        // pairs span on-, near- and far-diagonal; β real so the oracle applies
        let lf = table();
        let pairs = [
            (0usize, 0usize), (0, 1), (1, 0), (2, 2), (3, 5), (5, 3), (7, 7),
            (0, 12), (12, 0), (10, 14), (20, 20), (33, 29), (40, 64), (64, 64),
        ];
        for &(n, n0) in &pairs {
            for &b in &[0.2f64, 0.9, 1.7] {
                let got = amp(n, n0, Complex::new(b, 0.0), &lf);
                let want = testkit::dd_displacement_real(n, n0, b);
                assert!(
                    got.im.abs() <= 1e-13 + 1e-12 * want.abs(),
                    "imaginary residue at ({n},{n0},{b})"
                );
                assert!(
                    (got.re - want).abs() <= 1e-13 + 1e-12 * want.abs(),
                    "({n},{n0},{b}): got {:e}, want {want:e}",
                    got.re
                );
            }
        }
    }

    #[test]
    fn complex_beta_factorizes_into_phase_times_real_magnitude() {
        let lf = table();
        let b = Complex::new(0.6, 0.2);
        let got = amp(3, 5, b, &lf);
        // ⟨3|Ŝ|5⟩ = (−β₀/|β₀|)² · ⟨3|Ŝ|5⟩ at real |β₀|
        let mag = testkit::dd_displacement_real(3, 5, b.norm());
        let unit = -b / b.norm();
        let want = unit * unit * mag;
        assert!((got - want).norm() < 1e-13);
        // and the transpose picks up the conjugate phase
        let got_t = amp(5, 3, b, &lf);
        let unit_t = b.conj() / b.norm();
        let want_t = unit_t * unit_t * mag;
        assert!((got_t - want_t).norm() < 1e-13);
    }

    #[test]
    fn unitarity_columns() {
        let lf = LnFactorial::new(512);
        for &n0 in &[0usize, 3, 17, 64] {
            for &b in &[0.3f64, 1.0, 2.0] {
                let beta = Complex::from_polar(b, -1.1);
                let window = n0 + (6.0 * b * b) as usize + 48;
                let mut s = 0.0;
                for n in 0..=window {
                    s += amp(n, n0, beta, &lf).norm_sqr();
                }
                assert!((s - 1.0).abs() < 1e-9, "column n0={n0}, |b|={b}: {s}");
            }
        }
    }

    #[test]
    fn magnitude_symmetry() {
        let lf = table();
        let b = Complex::new(-0.4, 1.1);
        for &(n, n0) in &[(0usize, 4usize), (2, 9), (15, 40), (64, 50)] {
            let a = amp(n, n0, b, &lf).norm();
            let t = amp(n0, n, b, &lf).norm();
            assert!((a - t).abs() <= 1e-14 * a.max(1e-300));
        }
    }

    #[test]
    fn weak_coupling_phase_convention() {
        // leading order: ⟨n|Ŝ|n+1⟩ ∝ (−β₀), ⟨n+1|Ŝ|n⟩ ∝ β₀*
        let lf = table();
        let b = Complex::from_polar(0.01, 0.3);
        let up = amp(4, 5, b, &lf);
        let unit = up / up.norm();
        let want = -b / b.norm();
        assert!((unit - want).norm() < 1e-3);
        let dn = amp(5, 4, b, &lf);
        let unit_dn = dn / dn.norm();
        let want_dn = b.conj() / b.norm();
        assert!((unit_dn - want_dn).norm() < 1e-3);
    }

    #[test]
    fn far_tail_keeps_relative_accuracy() {
        // single-term element: ⟨0|Ŝ|30⟩ = (−β)³⁰ e^{−x/2}/√(30!), ~1e−47
        let lf = table();
        let b = 0.1f64;
        let got = amp(0, 30, Complex::new(b, 0.0), &lf).re;
        let ln_want = 30.0 * b.ln() - 0.5 * b * b - 0.5 * lf.ln(30).unwrap();
        let want = ln_want.exp(); // (−β)³⁰ positive, 30 even
        assert!(((got - want) / want).abs() < 1e-12, "got {got:e}, want {want:e}");
    }

    #[test]
    fn diagonal_squares_match_amplitudes() {
        let lf = table();
        let b = Complex::new(0.8, -0.5);
        let x = b.norm_sqr();
        for k in [0usize, 1, 3, 7] {
            let sq = displacement_diagonal_sq(k, 60, x, &lf).unwrap();
            for &j in &[0usize, 1, 5, 29, 60] {
                let a = amp(j, j + k, b, &lf).norm_sqr();
                assert!(
                    (sq[j] - a).abs() <= 1e-14 + 1e-12 * a,
                    "k={k}, j={j}: {:e} vs {a:e}",
                    sq[j]
                );
            }
        }
    }

    #[test]
    fn zero_coupling_is_identity() {
        let lf = table();
        assert_eq!(amp(5, 5, Complex::new(0.0, 0.0), &lf).re, 1.0);
        assert_eq!(amp(4, 5, Complex::new(0.0, 0.0), &lf).re, 0.0);
    }

    #[test]
    fn capacity_guard() {
        let lf = LnFactorial::new(64);
        assert!(matches!(
            displacement_amplitude(65, 0, Complex::new(0.5f64, 0.0), &lf),
            Err(Error::Capacity { index: 65, max: 64 })
        ));
        assert!(displacement_diagonal_sq(5, 60, 0.25f64, &lf).is_err());
    }
}
