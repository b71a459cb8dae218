//! Mode population distributions p_n and their correlation functions.
//!
//! Fock p_n = δ_{n,n̄}, coherent (Poissonian) p_n = e^{−n̄}n̄ⁿ/n!, thermal
//! (Bose-Einstein) p_n = (1−q)qⁿ with q = n̄/(1+n̄), and custom vectors.
//! Distributions are truncated with an explicitly declared tail bound so
//! downstream probability deficits can be attributed. The factorial
//! moments give g⁽ℓ⁾ = ⟨n(n−1)⋯(n−ℓ+1)⟩/n̄^ℓ.

use crate::scalar::Real;
use crate::{Error, Result};

/// Hard cap on the Fock-space truncation index; covers n̄ ≤ 500 with
/// 12-σ Poissonian tails and thermal n̄ ≤ 50 at tail 1e−14.
pub const N_MAX: usize = 4096;

/// Largest correlation order g⁽ℓ⁾ exposed.
pub const L_CORR_MAX: usize = 8;

/// Statistics family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Fock,
    Coherent,
    Thermal,
    Custom,
}

/// Truncated photon-number distribution with declared tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T> {
    probs: Vec<T>,
    mean: T,
    tail_bound: T,
    kind: Kind,
}

impl<T: Real> Distribution<T> {
    /// Fock state |n⟩: p_k = δ_{kn}.
    pub fn fock(n: usize) -> Result<Self> {
        if n > N_MAX {
            return Err(Error::Capacity { index: n, max: N_MAX });
        }
        let mut probs = vec![T::zero(); n + 1];
        probs[n] = T::one();
        Ok(Self { probs, mean: T::from_count(n), tail_bound: T::zero(), kind: Kind::Fock })
    }

    /// Poissonian distribution of mean `nbar`, truncated once the summed
    /// probability reaches 1 − tail_eps. Log-space per-term evaluation.
    pub fn coherent(nbar: T, tail_eps: T) -> Result<Self> {
        check_tail_eps(tail_eps)?;
        if !(nbar >= T::zero()) || !nbar.is_finite() {
            return Err(Error::Domain(format!("coherent needs nbar >= 0, got {nbar}")));
        }
        if nbar == T::zero() {
            return Ok(Self {
                probs: vec![T::one()],
                mean: T::zero(),
                tail_bound: T::zero(),
                kind: Kind::Coherent,
            });
        }
        let ln_nbar = nbar.ln();
        let mut probs = Vec::new();
        let mut ln_fact = T::zero();
        let mut n = 0usize;
        let tail = loop {
            if n > N_MAX {
                return Err(Error::Capacity { index: n, max: N_MAX });
            }
            if n > 0 {
                ln_fact = ln_fact + T::from_count(n).ln();
            }
            let p = (-nbar + T::from_count(n) * ln_nbar - ln_fact).exp();
            probs.push(p);
            // past the mode the terms shrink geometrically with ratio
            // r ≤ n̄/(n+2), so Σ_{m>n} p_m ≤ p_n r/(1−r); stopping on that
            // bound is immune to rounding noise in a running total
            if T::from_count(n) >= nbar {
                let r = nbar / T::from_count(n + 2);
                let bound = p * r / (T::one() - r);
                if bound <= tail_eps {
                    break bound;
                }
            }
            n += 1;
        };
        Ok(Self { probs, mean: nbar, tail_bound: tail, kind: Kind::Coherent })
    }

    /// Bose-Einstein distribution of mean `nbar` > 0: geometric with ratio
    /// q = n̄/(1+n̄); the closed-form tail q^{N+1} sets the truncation.
    pub fn thermal(nbar: T, tail_eps: T) -> Result<Self> {
        check_tail_eps(tail_eps)?;
        if !(nbar > T::zero()) || !nbar.is_finite() {
            return Err(Error::Domain(format!("thermal needs nbar > 0, got {nbar}")));
        }
        let q = nbar / (T::one() + nbar);
        // smallest N with q^{N+1} ≤ tail_eps
        let n_top = (tail_eps.ln() / q.ln()).ceil().as_f64() as usize;
        if n_top > N_MAX {
            return Err(Error::Capacity { index: n_top, max: N_MAX });
        }
        let one_minus_q = T::one() - q;
        let mut probs = Vec::with_capacity(n_top + 1);
        let mut p = one_minus_q;
        for _ in 0..=n_top {
            probs.push(p);
            p = p * q;
        }
        // p now holds (1−q)q^{N+1}; the true tail is q^{N+1}
        Ok(Self {
            probs,
            mean: nbar,
            tail_bound: p / one_minus_q,
            kind: Kind::Thermal,
        })
    }

    /// Custom distribution from raw probabilities. Rejected unless every
    /// entry is finite and non-negative and Σp deviates from 1 by less
    /// than 1e−6; the small residue is then renormalized away.
    pub fn custom(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Invalid("custom distribution is empty".into()));
        }
        if probs.len() > N_MAX + 1 {
            return Err(Error::Capacity { index: probs.len() - 1, max: N_MAX });
        }
        let mut total = T::zero();
        for (n, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < T::zero() {
                return Err(Error::Invalid(format!("p_{n} = {p} is not a probability")));
            }
            total = total + p;
        }
        if (total - T::one()).abs() >= T::from_f64_const(1e-6) {
            return Err(Error::Invalid(format!(
                "custom distribution sums to {total}, more than 1e-6 away from 1"
            )));
        }
        let probs: Vec<T> = probs.into_iter().map(|p| p / total).collect();
        let mut mean = T::zero();
        for (n, &p) in probs.iter().enumerate() {
            mean = mean + T::from_count(n) * p;
        }
        Ok(Self { probs, mean, tail_bound: T::zero(), kind: Kind::Custom })
    }

    /// Custom distribution from single-column text, one p_n per line.
    /// Blank lines and `#` comments are skipped.
    pub fn custom_from_text(text: &str) -> Result<Self> {
        let mut probs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p = line.parse::<f64>().map_err(|e| {
                Error::Invalid(format!("line {}: `{line}`: {e}", i + 1))
            })?;
            probs.push(T::from_f64_const(p));
        }
        Self::custom(probs)
    }

    /// p_n, zero beyond the truncation.
    pub fn p(&self, n: usize) -> T {
        self.probs.get(n).copied().unwrap_or_else(T::zero)
    }

    /// The stored probability vector, indices 0..=n_max.
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Largest stored index.
    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// Mean occupation n̄ (the analytic mean for the named families).
    pub fn mean(&self) -> T {
        self.mean
    }

    /// Declared upper bound on the truncated mass Σ_{n>n_max} p_n.
    pub fn tail_bound(&self) -> T {
        self.tail_bound
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// ℓ-th order zero-delay autocorrelation
    /// g⁽ℓ⁾ = Σ_n n(n−1)⋯(n−ℓ+1) p_n / n̄^ℓ, 1 ≤ ℓ ≤ 8.
    ///
    /// The factorial products stay below 4096⁸ ≈ 8·10²⁸, well inside the
    /// scalar range, so they are formed directly.
    pub fn g_ell(&self, ell: usize) -> Result<T> {
        if ell == 0 || ell > L_CORR_MAX {
            return Err(Error::Domain(format!("correlation order {ell} outside 1..={L_CORR_MAX}")));
        }
        if self.mean <= T::zero() {
            return Err(Error::Undefined("g^(l) of a zero-mean distribution".into()));
        }
        let mut moment = T::zero();
        for (n, &p) in self.probs.iter().enumerate().skip(ell) {
            let mut f = T::one();
            for j in 0..ell {
                f = f * T::from_count(n - j);
            }
            moment = moment + f * p;
        }
        Ok(moment / self.mean.powi(ell as i32))
    }
}

fn check_tail_eps<T: Real>(tail_eps: T) -> Result<()> {
    if !(tail_eps > T::zero()) || tail_eps > T::from_f64_const(1e-6) {
        return Err(Error::Domain(format!("tail_eps must be in (0, 1e-6], got {tail_eps}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn fock_basics() {
        let d = Distribution::<f64>::fock(2).unwrap();
        assert_eq!(d.p(2), 1.0);
        assert_eq!(d.p(1), 0.0);
        assert_eq!(d.mean(), 2.0);
        assert_eq!(d.tail_bound(), 0.0);
        assert!((d.g_ell(2).unwrap() - 0.5).abs() < 1e-15);
        let d50 = Distribution::<f64>::fock(50).unwrap();
        assert_eq!(d50.mean(), 50.0);
    }

    #[test]
    fn coherent_basics() {
        let vac = Distribution::<f64>::coherent(0.0, 1e-12).unwrap();
        assert_eq!(vac.p(0), 1.0);
        let d = Distribution::<f64>::coherent(1.0, 1e-12).unwrap();
        assert!((d.p(0) - 0.36787944117144233).abs() < 1e-15);
        let sum: f64 = d.probs().iter().sum();
        assert!(sum >= 1.0 - 1e-12 && sum <= 1.0 + 1e-14);
        let d50 = Distribution::<f64>::coherent(50.0, 1e-12).unwrap();
        // truncation near n̄ + 12√n̄
        assert!(d50.n_max() >= 50 && d50.n_max() < 50 + (12.0 * 50.0f64.sqrt()) as usize + 10);
        let s50: f64 = d50.probs().iter().sum();
        assert!(s50 >= 1.0 - 1e-12);
    }

    #[test]
    fn thermal_basics() {
        let d = Distribution::<f64>::thermal(1.0, 1e-12).unwrap();
        assert!((d.p(0) - 0.5).abs() < 1e-15);
        assert!((d.p(1) - 0.25).abs() < 1e-15);
        assert!((d.p(2) - 0.125).abs() < 1e-15);
        let sum: f64 = d.probs().iter().sum();
        assert!(sum >= 1.0 - 1e-12, "sum {sum}");
        assert!(d.tail_bound() <= 1e-12);
    }

    #[test]
    fn truncated_mean_matches_declared_mean() {
        for &nbar in &[0.3f64, 1.0, 7.5, 50.0] {
            for ctor in [Distribution::<f64>::coherent, Distribution::<f64>::thermal] {
                let d = ctor(nbar, 1e-14).unwrap();
                let m: f64 = d.probs().iter().enumerate().map(|(n, p)| n as f64 * p).sum();
                assert!((m - nbar).abs() < 1e-10, "nbar={nbar}: truncated mean {m}");
            }
        }
    }

    #[test]
    fn correlation_functions_of_named_families() {
        for &nbar in &[0.5f64, 1.0, 5.0, 50.0] {
            let c = Distribution::<f64>::coherent(nbar, 1e-14).unwrap();
            let t = Distribution::<f64>::thermal(nbar, 1e-14).unwrap();
            for ell in 1..=4usize {
                // the 1e−14 truncation tail enters ⟨n⁽ℓ⁾⟩ amplified by
                // n_max⁽ℓ⁾/n̄^ℓ, so equality holds to ~1e−9, not 1e−14
                assert!(
                    (c.g_ell(ell).unwrap() - 1.0).abs() < 1e-8,
                    "coherent l={ell} at nbar={nbar}: {}",
                    c.g_ell(ell).unwrap()
                );
                let lf: f64 = (1..=ell).map(|k| k as f64).product();
                assert!(
                    (t.g_ell(ell).unwrap() - lf).abs() < 1e-9 * lf,
                    "thermal l={ell} at nbar={nbar}: {}",
                    t.g_ell(ell).unwrap()
                );
            }
            assert!((t.g_ell(2).unwrap() - 2.0 * c.g_ell(2).unwrap()).abs() < 1e-9);
        }
        let f = Distribution::<f64>::fock(50).unwrap();
        assert!((f.g_ell(2).unwrap() - 0.98).abs() < 1e-12);
        assert!((f.g_ell(3).unwrap() - (50.0 * 49.0 * 48.0) / 50.0f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn g_ell_against_brute_force_on_random_custom() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let raw: Vec<f64> = (0..40).map(|_| rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let d = Distribution::custom(raw.iter().map(|p| p / total).collect()).unwrap();
            let nbar = d.mean();
            for ell in 1..=5usize {
                let mut brute = 0.0;
                for (n, &p) in d.probs().iter().enumerate() {
                    if n >= ell {
                        let f: f64 = (n - ell + 1..=n).map(|k| k as f64).product();
                        brute += f * p;
                    }
                }
                brute /= nbar.powi(ell as i32);
                assert!((d.g_ell(ell).unwrap() - brute).abs() <= 1e-12 * brute.max(1.0));
            }
        }
    }

    #[test]
    fn custom_validation() {
        assert!(Distribution::<f64>::custom(vec![]).is_err());
        assert!(Distribution::<f64>::custom(vec![0.5, -0.1, 0.6]).is_err());
        assert!(Distribution::<f64>::custom(vec![0.5, f64::NAN]).is_err());
        // off by 1e−5: rejected; off by 1e−7: renormalized
        assert!(Distribution::<f64>::custom(vec![0.5, 0.49999]).is_err());
        let d = Distribution::<f64>::custom(vec![0.5, 0.4999999]).unwrap();
        let sum: f64 = d.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-15);
    }

    #[test]
    fn custom_from_text_parses_and_skips_comments() {
        let d = Distribution::<f64>::custom_from_text("# header\n0.25\n\n0.75\n").unwrap();
        assert_eq!(d.n_max(), 1);
        assert!((d.p(1) - 0.75).abs() < 1e-15);
        assert!(Distribution::<f64>::custom_from_text("0.5\nnot-a-number\n").is_err());
    }

    #[test]
    fn domain_and_capacity_errors() {
        assert!(Distribution::<f64>::coherent(-1.0, 1e-12).is_err());
        assert!(Distribution::<f64>::thermal(0.0, 1e-12).is_err());
        assert!(Distribution::<f64>::coherent(1.0, 0.0).is_err());
        assert!(Distribution::<f64>::coherent(1.0, 1e-3).is_err());
        // thermal n̄ = 500 at 1e−14 needs ~16000 states
        assert!(matches!(
            Distribution::<f64>::thermal(500.0, 1e-14),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(Distribution::<f64>::fock(4097), Err(Error::Capacity { .. })));
    }

    #[test]
    fn undefined_g_for_vacuum() {
        let v = Distribution::<f64>::fock(0).unwrap();
        assert!(matches!(v.g_ell(2), Err(Error::Undefined(_))));
        assert!(matches!(v.g_ell(0), Err(Error::Domain(_))));
        assert!(matches!(v.g_ell(9), Err(Error::Domain(_))));
    }
}
