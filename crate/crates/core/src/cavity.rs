//! Master equation for a cavity fed by N pumped three-level emitters.
//!
//! The joint probability p_n^m of n photons with m still-excited emitters
//! obeys, in dimensionless time τ = gt and with k = κ/g,
//!
//!   dp_n^m/dτ = n(m+1) p_{n−1}^{m+1} − (n+1)m p_n^m
//!             + k [(n+1) p_{n+1}^m − n p_n^m],
//!
//! from p_n^m(0) = δ_{n0} δ_{mN}. Total excitation n + m never exceeds N,
//! and for κ = 0 the dynamics stays on the anti-diagonal n + m = N, which
//! is integrated as an (N+1)-component cascade instead of the dense
//! (N+1)² system. Observables (n̄, g⁽²⁾, marginals) are always recomputed
//! from the stored joint distribution.

use num_complex::Complex;

use crate::interaction::{exact_spectrum, Spectrum};
use crate::ode::{Dopri5, Options};
use crate::populations::Distribution;
use crate::scalar::Real;
use crate::{Error, Result};

/// Largest emitter count accepted by [`evolve`]; the dense state has
/// (N+1)² entries.
pub const N_EMITTERS_MAX: usize = 256;

/// Joint photon-emitter state at one instant of dimensionless time.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityState<T> {
    n_emitters: usize,
    kappa_over_g: T,
    time: T,
    /// Row-major p_n^m at index m·(N+1) + n.
    joint: Vec<T>,
}

impl<T: Real> CavityState<T> {
    pub fn n_emitters(&self) -> usize {
        self.n_emitters
    }

    pub fn kappa_over_g(&self) -> T {
        self.kappa_over_g
    }

    /// Dimensionless time gt.
    pub fn time(&self) -> T {
        self.time
    }

    /// p_n^m; zero outside the stored range.
    pub fn prob(&self, n: usize, m: usize) -> T {
        let np1 = self.n_emitters + 1;
        if n >= np1 || m >= np1 {
            return T::zero();
        }
        self.joint[m * np1 + n]
    }

    /// Photon-number marginal p_n = Σ_m p_n^m.
    pub fn marginal_photons(&self) -> Vec<T> {
        let np1 = self.n_emitters + 1;
        let mut out = vec![T::zero(); np1];
        for m in 0..np1 {
            for (n, o) in out.iter_mut().enumerate() {
                *o = *o + self.joint[m * np1 + n];
            }
        }
        out
    }

    /// n̄ = Σ n p_n.
    pub fn mean_photons(&self) -> T {
        let np1 = self.n_emitters + 1;
        let mut nbar = T::zero();
        for m in 0..np1 {
            for n in 1..np1 {
                nbar = nbar + T::from_count(n) * self.joint[m * np1 + n];
            }
        }
        nbar
    }

    /// Σ_{n,m} p_n^m.
    pub fn total(&self) -> T {
        self.joint.iter().fold(T::zero(), |a, &b| a + b)
    }
}

/// Time-ordered sequence of cavity states on the requested grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    states: Vec<CavityState<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn states(&self) -> &[CavityState<T>] {
        &self.states
    }

    pub fn times(&self) -> Vec<T> {
        self.states.iter().map(|s| s.time).collect()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Zero-delay second-order correlation g⁽²⁾ = ⟨n(n−1)⟩/⟨n⟩² of the
/// instantaneous photon marginal.
pub fn g2_of<T: Real>(state: &CavityState<T>) -> Result<T> {
    let marginal = state.marginal_photons();
    let mut nbar = T::zero();
    let mut pairs = T::zero();
    for (n, &p) in marginal.iter().enumerate() {
        let nf = T::from_count(n);
        nbar = nbar + nf * p;
        pairs = pairs + nf * (nf - T::one()) * p;
    }
    if !(nbar > T::zero()) {
        return Err(Error::Undefined("g2 is undefined for an empty cavity".into()));
    }
    Ok(pairs / (nbar * nbar))
}

fn validate_grid<T: Real>(t_grid: &[T]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(Error::Domain("time grid must not be empty".into()));
    }
    if t_grid[0] != T::zero() {
        return Err(Error::Domain(format!(
            "time grid must start at 0, got {}",
            t_grid[0]
        )));
    }
    for w in t_grid.windows(2) {
        if !(w[1] > w[0]) || !w[1].is_finite() {
            return Err(Error::Domain(format!(
                "time grid must be strictly increasing and finite ({} then {})",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

// Shared snapshot policy: tiny negative undershoots (within −10·tol) are
// floored to zero, worse ones abort; the total is checked before flooring
// and never renormalized.
fn check_and_clip<T: Real>(values: &mut [T], tol: T, time: T) -> Result<()> {
    let floor = -T::from_f64_const(10.0) * tol;
    let mut total = T::zero();
    for v in values.iter() {
        total = total + *v;
    }
    if (total - T::one()).abs() > T::from_f64_const(10.0) * tol {
        return Err(Error::Integration(format!(
            "probability sum drifted to {total} at gt = {time}"
        )));
    }
    for v in values.iter_mut() {
        if *v < T::zero() {
            if *v < floor {
                return Err(Error::Integration(format!(
                    "negative probability {v} at gt = {time}"
                )));
            }
            *v = T::zero();
        }
    }
    Ok(())
}

/// Integrate the master equation for `n_emitters` emitters and decay ratio
/// κ/g, sampling the state at every point of `t_grid` (dimensionless gt,
/// strictly increasing from 0).
pub fn evolve<T: Real>(
    n_emitters: usize,
    kappa_over_g: T,
    t_grid: &[T],
    tol: T,
) -> Result<Trajectory<T>> {
    if n_emitters == 0 {
        return Err(Error::Domain("need at least one emitter".into()));
    }
    if n_emitters > N_EMITTERS_MAX {
        return Err(Error::Capacity { index: n_emitters, max: N_EMITTERS_MAX });
    }
    if !(kappa_over_g >= T::zero()) || !kappa_over_g.is_finite() {
        return Err(Error::Domain(format!(
            "kappa/g must be non-negative, got {kappa_over_g}"
        )));
    }
    if !(tol >= T::from_f64_const(1e-12) && tol <= T::from_f64_const(1e-6)) {
        return Err(Error::Domain(format!("tol must lie in [1e-12, 1e-6], got {tol}")));
    }
    validate_grid(t_grid)?;
    if kappa_over_g == T::zero() {
        evolve_antidiagonal(n_emitters, t_grid, tol)
    } else {
        evolve_dense(n_emitters, kappa_over_g, t_grid, tol)
    }
}

// κ = 0: r_k = p_k^{N−k} on the conserved anti-diagonal,
// dr_k/dτ = k(N−k+1) r_{k−1} − (k+1)(N−k) r_k.
fn evolve_antidiagonal<T: Real>(
    n_emitters: usize,
    t_grid: &[T],
    tol: T,
) -> Result<Trajectory<T>> {
    let nn = n_emitters;
    let rhs = move |_t: T, y: &[T], dy: &mut [T]| {
        for k in 0..=nn {
            let inflow = if k > 0 {
                T::from_count(k) * T::from_count(nn - k + 1) * y[k - 1]
            } else {
                T::zero()
            };
            let outflow = T::from_count(k + 1) * T::from_count(nn - k) * y[k];
            dy[k] = inflow - outflow;
        }
    };
    let mut y0 = vec![T::zero(); nn + 1];
    y0[0] = T::one();
    let opts = Options { rtol: tol, atol: tol * T::from_f64_const(1e-2), ..Default::default() };
    let mut solver = Dopri5::new(&rhs, T::zero(), y0, opts);
    let mut states = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        solver.advance_to(t)?;
        let mut r = solver.state().to_vec();
        check_and_clip(&mut r, tol, t)?;
        let np1 = nn + 1;
        let mut joint = vec![T::zero(); np1 * np1];
        for (k, &rk) in r.iter().enumerate() {
            joint[(nn - k) * np1 + k] = rk;
        }
        states.push(CavityState {
            n_emitters: nn,
            kappa_over_g: T::zero(),
            time: t,
            joint,
        });
    }
    Ok(Trajectory { states })
}

fn evolve_dense<T: Real>(
    n_emitters: usize,
    kappa_over_g: T,
    t_grid: &[T],
    tol: T,
) -> Result<Trajectory<T>> {
    let nn = n_emitters;
    let np1 = nn + 1;
    let kap = kappa_over_g;
    let rhs = move |_t: T, y: &[T], dy: &mut [T]| {
        for d in dy.iter_mut() {
            *d = T::zero();
        }
        for m in 0..=nn {
            for n in 0..=(nn - m) {
                let i = m * np1 + n;
                let mut acc = -T::from_count(n + 1) * T::from_count(m) * y[i];
                if n > 0 {
                    acc = acc + T::from_count(n) * T::from_count(m + 1) * y[(m + 1) * np1 + n - 1];
                }
                if n < nn - m {
                    acc = acc + kap * T::from_count(n + 1) * y[m * np1 + n + 1];
                }
                acc = acc - kap * T::from_count(n) * y[i];
                dy[i] = acc;
            }
        }
    };
    let mut y0 = vec![T::zero(); np1 * np1];
    y0[nn * np1] = T::one(); // n = 0, m = N
    let opts = Options { rtol: tol, atol: tol * T::from_f64_const(1e-2), ..Default::default() };
    let mut solver = Dopri5::new(&rhs, T::zero(), y0, opts);
    let mut states = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        solver.advance_to(t)?;
        let mut joint = solver.state().to_vec();
        check_and_clip(&mut joint, tol, t)?;
        states.push(CavityState { n_emitters: nn, kappa_over_g: kap, time: t, joint });
    }
    Ok(Trajectory { states })
}

/// Default sampling grid: log-spaced through the rise (gt ≤ 5/N) plus a
/// linear tail to gt = 40/N, bracketing the n̄ maximum for any κ/g.
pub fn default_time_grid<T: Real>(n_emitters: usize) -> Vec<T> {
    let n = (n_emitters.max(1)) as f64;
    let mut grid = vec![T::zero()];
    let (lo, hi) = (5e-3 / n, 5.0 / n);
    let log_points = 30;
    for i in 0..=log_points {
        let f = i as f64 / log_points as f64;
        grid.push(T::from_f64_const(lo * (hi / lo).powf(f)));
    }
    let lin_points = 20;
    for i in 1..=lin_points {
        let f = i as f64 / lin_points as f64;
        grid.push(T::from_f64_const(5.0 / n + f * 35.0 / n));
    }
    grid
}

/// Electron spectrum per time sample: the instantaneous photon marginal is
/// fed to the exact interaction solution at coupling β₀. Residual Σ-drift
/// within the trajectory tolerance is normalized away before use.
pub fn spectra_over_time<T: Real>(
    traj: &Trajectory<T>,
    beta0: Complex<T>,
    l_max: usize,
) -> Result<Vec<Spectrum<T>>> {
    let mut out = Vec::with_capacity(traj.len());
    for state in traj.states() {
        let mut marginal = state.marginal_photons();
        let total = marginal.iter().fold(T::zero(), |a, &b| a + b);
        for p in marginal.iter_mut() {
            *p = *p / total;
        }
        let dist = Distribution::custom(marginal)?;
        out.push(exact_spectrum(&dist, beta0, l_max)?);
    }
    Ok(out)
}
