//! Adaptive embedded Runge-Kutta integrator, Dormand-Prince 5(4).
//!
//! Drives both the amplitude ladder in z and the cavity master equation
//! in gt. The state is a flat slice of [`Element`]s (real or complex), the
//! right-hand side writes dy into a caller-provided buffer. Step control
//! is the standard PI controller; the first-same-as-last property saves
//! one derivative evaluation per accepted step.

use crate::scalar::{Element, Real};
use crate::{Error, Result};

/// Integration controls.
#[derive(Debug, Clone, Copy)]
pub struct Options<T> {
    pub rtol: T,
    pub atol: T,
    /// Cap on accepted + rejected steps across one `advance_to` call.
    pub max_steps: usize,
}

impl<T: Real> Default for Options<T> {
    fn default() -> Self {
        Self {
            rtol: T::from_f64_const(1e-9),
            atol: T::from_f64_const(1e-12),
            max_steps: 10_000_000,
        }
    }
}

// Dormand-Prince coefficients.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b − b̂: local error weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// One initial-value problem advanced in place through successive targets.
pub struct Dopri5<'f, T, E, F>
where
    F: Fn(T, &[E], &mut [E]),
{
    f: &'f F,
    t: T,
    y: Vec<E>,
    h: T,
    opts: Options<T>,
    k: [Vec<E>; 7],
    scratch: Vec<E>,
    facold: T,
    fresh_k1: bool,
}

impl<'f, T: Real, E: Element<T>, F: Fn(T, &[E], &mut [E])> Dopri5<'f, T, E, F> {
    pub fn new(f: &'f F, t0: T, y0: Vec<E>, opts: Options<T>) -> Self {
        let n = y0.len();
        let mk = || vec![E::zero(); n];
        Self {
            f,
            t: t0,
            y: y0,
            h: T::zero(),
            opts,
            k: [mk(), mk(), mk(), mk(), mk(), mk(), mk()],
            scratch: mk(),
            facold: T::from_f64_const(1e-4),
            fresh_k1: false,
        }
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn state(&self) -> &[E] {
        &self.y
    }

    /// Integrate from the current time to `t_end` (forward only).
    pub fn advance_to(&mut self, t_end: T) -> Result<()> {
        if t_end < self.t {
            return Err(Error::Domain("integration targets must be non-decreasing".into()));
        }
        if t_end == self.t {
            return Ok(());
        }
        if !self.fresh_k1 {
            (self.f)(self.t, &self.y, &mut self.k[0]);
            self.fresh_k1 = true;
        }
        if self.h <= T::zero() {
            self.h = self.initial_step(t_end);
        }
        let mut steps = 0usize;
        loop {
            if steps >= self.opts.max_steps {
                return Err(Error::Integration(format!(
                    "step budget {} exhausted at t = {}",
                    self.opts.max_steps, self.t
                )));
            }
            steps += 1;
            let resolution = self.t.abs().max(T::one()) * T::epsilon() * T::from_f64_const(4.0);
            if t_end - self.t <= resolution {
                self.t = t_end;
                return Ok(());
            }
            let mut h = self.h.min(t_end - self.t);
            let hit_end = h >= t_end - self.t;
            if h <= resolution {
                return Err(Error::Integration(format!(
                    "step size underflow at t = {} (h = {h})",
                    self.t
                )));
            }
            let err = self.try_step(h);
            // PI controller (safety 0.9, growth ≤ 10, shrink ≥ 1/5)
            let expo1 = T::from_f64_const(0.2 - 0.04 * 0.75);
            let beta = T::from_f64_const(0.04);
            let fac11 = err.powf(expo1);
            let safe = T::from_f64_const(0.9);
            if err <= T::one() {
                let fac = (fac11 / self.facold.powf(beta) / safe)
                    .max(T::from_f64_const(0.1))
                    .min(T::from_f64_const(5.0));
                let h_next = h / fac;
                self.facold = err.max(T::from_f64_const(1e-4));
                self.t = self.t + h;
                std::mem::swap(&mut self.y, &mut self.scratch);
                self.k.swap(0, 6); // FSAL
                if hit_end {
                    self.t = t_end;
                    self.h = h_next;
                    return Ok(());
                }
                self.h = h_next;
            } else {
                h = h / (fac11 / safe).min(T::from_f64_const(5.0));
                self.h = h;
            }
        }
    }

    // One trial step of size h: fills scratch with y_new, k[6] with its
    // derivative, and returns the scaled error norm.
    fn try_step(&mut self, h: T) -> T {
        let n = self.y.len();
        let t = self.t;
        let f = self.f;
        macro_rules! stage {
            ($ki:expr, $c:expr, $($a:expr => $kj:expr),+) => {{
                for i in 0..n {
                    let mut acc = E::zero();
                    $(acc = acc + self.k[$kj][i].scale(T::from_f64_const($a));)+
                    self.scratch[i] = self.y[i] + acc.scale(h);
                }
                f(t + h * T::from_f64_const($c), &self.scratch, &mut self.k[$ki]);
            }};
        }
        stage!(1, C2, A21 => 0);
        stage!(2, C3, A31 => 0, A32 => 1);
        stage!(3, C4, A41 => 0, A42 => 1, A43 => 2);
        stage!(4, C5, A51 => 0, A52 => 1, A53 => 2, A54 => 3);
        stage!(5, 1.0, A61 => 0, A62 => 1, A63 => 2, A64 => 3, A65 => 4);
        // 5th-order solution (a7j = bj), reused as the last stage input
        stage!(6, 1.0, B1 => 0, B3 => 2, B4 => 3, B5 => 4, B6 => 5);
        // error norm over sc_i = atol + rtol·max(|y|, |y_new|)
        let mut err_acc = T::zero();
        for i in 0..n {
            let e = self.k[0][i].scale(T::from_f64_const(E1))
                + self.k[2][i].scale(T::from_f64_const(E3))
                + self.k[3][i].scale(T::from_f64_const(E4))
                + self.k[4][i].scale(T::from_f64_const(E5))
                + self.k[5][i].scale(T::from_f64_const(E6))
                + self.k[6][i].scale(T::from_f64_const(E7));
            let sc = self.opts.atol + self.opts.rtol * self.y[i].abs().max(self.scratch[i].abs());
            let r = e.abs() * h / sc;
            err_acc = err_acc + r * r;
        }
        (err_acc / T::from_count(n)).sqrt()
    }

    // Hairer-style cheap starting-step guess.
    fn initial_step(&mut self, t_end: T) -> T {
        let n = self.y.len();
        let mut d0 = T::zero();
        let mut d1 = T::zero();
        for i in 0..n {
            let sc = self.opts.atol + self.opts.rtol * self.y[i].abs();
            let a = self.y[i].abs() / sc;
            let b = self.k[0][i].abs() / sc;
            d0 = d0 + a * a;
            d1 = d1 + b * b;
        }
        d0 = (d0 / T::from_count(n)).sqrt();
        d1 = (d1 / T::from_count(n)).sqrt();
        let h0 = if d0 < T::from_f64_const(1e-5) || d1 < T::from_f64_const(1e-5) {
            T::from_f64_const(1e-6)
        } else {
            T::from_f64_const(0.01) * d0 / d1
        };
        let h0 = h0.min((t_end - self.t) * T::from_f64_const(0.1));
        // one Euler probe to estimate the second derivative
        for i in 0..n {
            self.scratch[i] = self.y[i] + self.k[0][i].scale(h0);
        }
        (self.f)(self.t + h0, &self.scratch, &mut self.k[1]);
        let mut d2 = T::zero();
        for i in 0..n {
            let sc = self.opts.atol + self.opts.rtol * self.y[i].abs();
            let r = (self.k[1][i] - self.k[0][i]).abs() / sc;
            d2 = d2 + r * r;
        }
        d2 = (d2 / T::from_count(n)).sqrt() / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= T::from_f64_const(1e-15) {
            (h0 * T::from_f64_const(1e-3)).max(T::from_f64_const(1e-6))
        } else {
            (T::from_f64_const(0.01) / dm).powf(T::from_f64_const(0.2))
        };
        (h0 * T::from_f64_const(100.0)).min(h1).min(t_end - self.t)
    }
}
