//! Electron sideband spectra P_ℓ after the passage.
//!
//! Each initial Fock occupation n₀ is an independent channel of weight
//! p_{n₀}; the exact probability to gain ℓ quanta is
//!
//!   P_ℓ = Σ_{n₀} p_{n₀} |⟨n₀−ℓ|Ŝ|n₀⟩|²,
//!
//! assembled from one displacement-diagonal pass per |ℓ|. Companion
//! routes: first-order weak-coupling probabilities, the intermediate
//! P_ℓ ≈ Σ_n p_n J_ℓ²(2√n|β₀|) form, the n̄ ≫ 1 closed forms
//! J_ℓ²(2|β|) and e^{−2|β|²}I_ℓ(2|β|²) with β = √n̄ β₀, and the
//! two-level (fermionic mode) first-order result.

use crate::bessel;
use crate::displacement::displacement_diagonal_sq;
use crate::factorial::LnFactorial;
use crate::populations::Distribution;
use crate::scalar::Real;
use crate::{Error, Result};
use num_complex::Complex;

/// Largest coupling magnitude the exact route is validated for.
pub const BETA0_ABS_MAX: f64 = 2.0;

/// Hard cap on n_max + l_max (factorial-table capacity).
pub const INDEX_CAP: usize = crate::populations::N_MAX;

/// Provenance of a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Exact,
    Ode,
    WeakCoupling,
    LargeNFock,
    LargeNCoherent,
    LargeNThermal,
    PinemLimit,
    Fermion,
    /// Imported (measured or externally synthesized) sideband table.
    Measured,
}

/// Sideband probabilities P_ℓ, ℓ ∈ [−l_max, l_max].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    l_max: usize,
    // index ℓ + l_max
    probs: Vec<T>,
    source: Source,
    beta0: Complex<T>,
    nbar: T,
    deficit: T,
}

impl<T: Real> Spectrum<T> {
    pub(crate) fn new(
        l_max: usize,
        probs: Vec<T>,
        source: Source,
        beta0: Complex<T>,
        nbar: T,
        deficit: T,
    ) -> Self {
        debug_assert_eq!(probs.len(), 2 * l_max + 1);
        Self { l_max, probs, source, beta0, nbar, deficit }
    }

    /// P_ℓ; zero outside the computed window.
    pub fn p(&self, ell: i64) -> T {
        if ell.unsigned_abs() as usize > self.l_max {
            return T::zero();
        }
        self.probs[(ell + self.l_max as i64) as usize]
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// (ℓ, P_ℓ) in increasing ℓ.
    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        let l = self.l_max as i64;
        (-l..=l).map(move |ell| (ell, self.p(ell)))
    }

    /// Σ_ℓ P_ℓ over the window.
    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Declared probability deficit (distribution tail + window truncation).
    pub fn deficit(&self) -> T {
        self.deficit
    }

    pub fn source(&self) -> Source {
        self.source
    }

    /// Coupling the spectrum was computed at; zero for measured imports.
    pub fn beta0(&self) -> Complex<T> {
        self.beta0
    }

    /// Mean occupation of the input statistics; NaN for measured imports.
    pub fn nbar(&self) -> T {
        self.nbar
    }
}

/// Exact spectrum for the mode statistics `dist` at coupling β₀, over
/// ℓ ∈ [−l_max, l_max].
pub fn exact_spectrum<T: Real>(
    dist: &Distribution<T>,
    beta0: Complex<T>,
    l_max: usize,
) -> Result<Spectrum<T>> {
    let x = validate_beta0(beta0)?;
    let n_max = dist.n_max();
    if n_max + l_max > INDEX_CAP {
        return Err(Error::Capacity { index: n_max + l_max, max: INDEX_CAP });
    }
    let lf = LnFactorial::new(n_max + l_max);
    let mut probs = vec![T::zero(); 2 * l_max + 1];
    for k in 0..=l_max {
        accumulate_sideband(dist, k, x, &lf, &mut probs, l_max)?;
    }
    finish_exact(dist, beta0, l_max, probs)
}

/// Exact spectrum with the window chosen automatically: the smallest
/// l_max with Σ P_ℓ ≥ 1 − 1e−6 − tail, capped at n_max + 6⌈|β₀|²⌉.
pub fn exact_spectrum_auto<T: Real>(
    dist: &Distribution<T>,
    beta0: Complex<T>,
) -> Result<Spectrum<T>> {
    let x = validate_beta0(beta0)?;
    let n_max = dist.n_max();
    let cap = n_max + 6 * x.ceil().as_f64() as usize;
    let cap = cap.min(INDEX_CAP - n_max);
    let lf = LnFactorial::new(n_max + cap);
    let target = T::one() - T::from_f64_const(1e-6) - dist.tail_bound();
    let mut per_k: Vec<(T, T)> = Vec::new();
    let mut running = T::zero();
    let mut l_max = cap;
    for k in 0..=cap {
        let mut pair = vec![T::zero(); 3];
        accumulate_sideband_pair(dist, k, x, &lf, &mut pair)?;
        running = running + pair[0] + if k > 0 { pair[2] } else { T::zero() };
        per_k.push((pair[0], pair[2]));
        if running >= target {
            l_max = k;
            break;
        }
    }
    let mut probs = vec![T::zero(); 2 * l_max + 1];
    for (k, &(gain, loss)) in per_k.iter().enumerate().take(l_max + 1) {
        probs[l_max + k] = gain;
        if k > 0 {
            probs[l_max - k] = loss;
        }
    }
    finish_exact(dist, beta0, l_max, probs)
}

fn validate_beta0<T: Real>(beta0: Complex<T>) -> Result<T> {
    if !beta0.re.is_finite() || !beta0.im.is_finite() {
        return Err(Error::Domain("beta0 must be finite".into()));
    }
    let x = beta0.norm_sqr();
    if x.as_f64() > BETA0_ABS_MAX * BETA0_ABS_MAX {
        return Err(Error::Domain(format!(
            "|beta0| = {} outside the validated range <= {BETA0_ABS_MAX}",
            x.sqrt()
        )));
    }
    Ok(x)
}

// Adds the ±k sidebands into the full window `probs` (length 2 l_max + 1).
fn accumulate_sideband<T: Real>(
    dist: &Distribution<T>,
    k: usize,
    x: T,
    lf: &LnFactorial<T>,
    probs: &mut [T],
    l_max: usize,
) -> Result<()> {
    let mut pair = vec![T::zero(); 3];
    accumulate_sideband_pair(dist, k, x, lf, &mut pair)?;
    probs[l_max + k] = pair[0];
    if k > 0 {
        probs[l_max - k] = pair[2];
    }
    Ok(())
}

// pair[0] = P_{+k} (gain), pair[2] = P_{−k} (loss).
fn accumulate_sideband_pair<T: Real>(
    dist: &Distribution<T>,
    k: usize,
    x: T,
    lf: &LnFactorial<T>,
    pair: &mut [T],
) -> Result<()> {
    let n_max = dist.n_max();
    if x == T::zero() {
        pair[0] = if k == 0 {
            dist.probs().iter().fold(T::zero(), |a, &b| a + b)
        } else {
            T::zero()
        };
        pair[2] = T::zero();
        return Ok(());
    }
    let d2 = displacement_diagonal_sq(k, n_max, x, lf)?;
    // gain +k: channels n₀ = j + k land on n = j
    let mut gain = T::zero();
    for (j, &w) in d2.iter().enumerate().take(n_max.saturating_sub(k) + 1) {
        gain = gain + w * dist.p(j + k);
    }
    // loss −k: channels n₀ = j land on n = j + k
    let mut loss = T::zero();
    for (j, &w) in d2.iter().enumerate() {
        loss = loss + w * dist.p(j);
    }
    pair[0] = gain;
    pair[2] = loss;
    Ok(())
}

fn finish_exact<T: Real>(
    dist: &Distribution<T>,
    beta0: Complex<T>,
    l_max: usize,
    probs: Vec<T>,
) -> Result<Spectrum<T>> {
    let total = probs.iter().fold(T::zero(), |a, &b| a + b);
    let deficit = (T::one() - total).max(T::zero());
    Ok(Spectrum::new(l_max, probs, Source::Exact, beta0, dist.mean(), deficit))
}

/// First-order probabilities (P_{−1}, P_{+1}) = ((1+n̄)|β₀|², n̄|β₀|²).
///
/// Valid for √n̄|β₀| ≪ 1; see [`weak_coupling_valid`].
/// Spectrum imported from an external (ℓ, P_ℓ) table, e.g. a measured
/// trace. Probabilities must be non-negative with Σ ≤ 1 + 1e−6 and each ℓ
/// listed at most once; the window is the smallest symmetric one holding
/// every listed ℓ. The coupling and input statistics are unknown, so
/// `beta0()` reads zero and `nbar()` NaN.
pub fn measured_spectrum<T: Real>(pairs: &[(i64, T)]) -> Result<Spectrum<T>> {
    if pairs.is_empty() {
        return Err(Error::Invalid("empty spectrum table".into()));
    }
    let l_max = pairs.iter().map(|&(l, _)| l.unsigned_abs() as usize).max().unwrap();
    if l_max > INDEX_CAP {
        return Err(Error::Capacity { index: l_max, max: INDEX_CAP });
    }
    let mut probs = vec![T::zero(); 2 * l_max + 1];
    let mut seen = vec![false; 2 * l_max + 1];
    for &(ell, p) in pairs {
        if !p.is_finite() || p < T::zero() {
            return Err(Error::Invalid(format!("P_{ell} = {p} is not a probability")));
        }
        let idx = (ell + l_max as i64) as usize;
        if seen[idx] {
            return Err(Error::Invalid(format!("sideband {ell} listed twice")));
        }
        seen[idx] = true;
        probs[idx] = p;
    }
    let total = probs.iter().fold(T::zero(), |a, &b| a + b);
    if total > T::one() + T::from_f64_const(1e-6) {
        return Err(Error::Invalid(format!("sideband table sums to {total} > 1")));
    }
    let deficit = (T::one() - total).max(T::zero());
    Ok(Spectrum::new(
        l_max,
        probs,
        Source::Measured,
        Complex::new(T::zero(), T::zero()),
        T::nan(),
        deficit,
    ))
}

pub fn weak_coupling_probs<T: Real>(nbar: T, beta0: Complex<T>) -> Result<(T, T)> {
    if !(nbar >= T::zero()) || !nbar.is_finite() {
        return Err(Error::Domain(format!("nbar must be >= 0, got {nbar}")));
    }
    let x = beta0.norm_sqr();
    Ok(((T::one() + nbar) * x, nbar * x))
}

/// Whether (n̄, β₀) is inside the stated first-order validity band
/// √n̄|β₀| ≤ 0.1 (callers should warn beyond it).
pub fn weak_coupling_valid<T: Real>(nbar: T, beta0: Complex<T>) -> bool {
    (nbar.max(T::one()) * beta0.norm_sqr()).sqrt() <= T::from_f64_const(0.1)
}

/// Predicted weak-coupling ratio P_ℓ/P₁^ℓ = g⁽ℓ⁾/(ℓ!)².
pub fn gain_ratio_prediction<T: Real>(dist: &Distribution<T>, ell: usize) -> Result<T> {
    if ell < 2 {
        return Err(Error::Domain(format!("ratio prediction needs ell >= 2, got {ell}")));
    }
    let g = dist.g_ell(ell)?;
    let mut lf = T::one();
    for k in 2..=ell {
        lf = lf * T::from_count(k);
    }
    Ok(g / (lf * lf))
}

/// Intermediate large-n̄ spectrum P_ℓ = Σ_n p_n J_ℓ²(2√n|β₀|).
///
/// Valid for n̄ ≫ 1 and |ℓ| ≪ n̄; the relative error of P_ℓ grows like
/// ℓ(ℓ−1)/(2n̄).
pub fn pinem_limit_spectrum<T: Real>(
    dist: &Distribution<T>,
    beta0: Complex<T>,
    l_max: usize,
) -> Result<Spectrum<T>> {
    if l_max > bessel::MAX_ORDER {
        return Err(Error::Capacity { index: l_max, max: bessel::MAX_ORDER });
    }
    let b = beta0.norm();
    let mut probs = vec![T::zero(); 2 * l_max + 1];
    for (n, &pn) in dist.probs().iter().enumerate() {
        if pn == T::zero() {
            continue;
        }
        let arg = T::from_f64_const(2.0) * T::from_count(n).sqrt() * b;
        let row = bessel::bessel_j_row(l_max, arg)?;
        // J_{−ℓ}² = J_ℓ²: symmetric spectrum per channel
        probs[l_max] = probs[l_max] + pn * row[0] * row[0];
        for (k, &j) in row.iter().enumerate().skip(1) {
            let w = pn * j * j;
            probs[l_max + k] = probs[l_max + k] + w;
            probs[l_max - k] = probs[l_max - k] + w;
        }
    }
    let total = probs.iter().fold(T::zero(), |a, &b| a + b);
    Ok(Spectrum::new(
        l_max,
        probs,
        Source::PinemLimit,
        beta0,
        dist.mean(),
        (T::one() - total).max(T::zero()),
    ))
}

/// Statistics family selector for the n̄ → ∞ closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LargeNKind {
    /// P_ℓ = J_ℓ²(2|β|)
    FockOrCoherent,
    /// P_ℓ = e^{−2|β|²} I_ℓ(2|β|²)
    Thermal,
}

/// Closed-form n̄ ≫ 1 sideband probability at β = √n̄ β₀.
pub fn large_n_closed_form<T: Real>(kind: LargeNKind, beta: Complex<T>, ell: i64) -> Result<T> {
    match kind {
        LargeNKind::FockOrCoherent => {
            let j = bessel::bessel_j(ell, T::from_f64_const(2.0) * beta.norm())?;
            Ok(j * j)
        }
        LargeNKind::Thermal => {
            bessel::bessel_i_scaled(ell, T::from_f64_const(2.0) * beta.norm_sqr())
        }
    }
}

/// First-order probabilities for a two-level (fermionic) mode:
/// (P_{−1}, P_{+1}) = ((1−n̄)|β₀|², n̄|β₀|²), n̄ ∈ [0, 1].
pub fn fermion_weak_probs<T: Real>(nbar: T, beta0: Complex<T>) -> Result<(T, T)> {
    if !(nbar >= T::zero() && nbar <= T::one()) {
        return Err(Error::Domain(format!("fermionic nbar must lie in [0, 1], got {nbar}")));
    }
    let x = beta0.norm_sqr();
    Ok(((T::one() - nbar) * x, nbar * x))
}
