//! Test-only high-precision oracles.
//!
//! Reference values for the special-function and matrix-element tests are
//! produced here with double-double arithmetic (~31 significant digits),
//! using textbook series that are independent of the production
//! algorithms. Nothing in this module ships.

#![allow(dead_code)]

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, rhs: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let e = e + self.lo + rhs.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(Dd { hi: -rhs.hi, lo: -rhs.lo })
    }

    pub fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul(Dd::from_f64(q1)));
        let q2 = r.hi / rhs.hi;
        let r2 = r.sub(rhs.mul(Dd::from_f64(q2)));
        let q3 = r2.hi / rhs.hi;
        let (hi, lo) = two_sum(q1, q2);
        let (hi, lo2) = two_sum(hi, q3 + lo);
        Dd { hi, lo: lo2 }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }
}

/// J_ν(x) for integer ν ≥ 0 by the ascending series in double-double.
/// Accurate while the largest term does not dwarf the sum; fine for the
/// x ≤ 40 arguments the tests use.
pub fn dd_bessel_j(nu: u32, x: f64) -> f64 {
    let xh = Dd::from_f64(x).mul(Dd::from_f64(0.5));
    let q = xh.mul(xh).neg();
    // leading (x/2)^ν / ν!
    let mut lead = Dd::ONE;
    for k in 1..=nu {
        lead = lead.mul(xh).div(Dd::from_f64(k as f64));
    }
    let mut term = lead;
    let mut sum = term;
    for k in 1..400 {
        term = term
            .mul(q)
            .div(Dd::from_f64(k as f64))
            .div(Dd::from_f64((k + nu as i64 as u64) as f64));
        sum = sum.add(term);
        if term.abs().to_f64() < 1e-40 * sum.abs().to_f64().max(1e-300) {
            break;
        }
    }
    sum.to_f64()
}

/// I_ν(x) for integer ν ≥ 0: same series with all-positive terms.
pub fn dd_bessel_i(nu: u32, x: f64) -> f64 {
    let xh = Dd::from_f64(x).mul(Dd::from_f64(0.5));
    let q = xh.mul(xh);
    let mut lead = Dd::ONE;
    for k in 1..=nu {
        lead = lead.mul(xh).div(Dd::from_f64(k as f64));
    }
    let mut term = lead;
    let mut sum = term;
    for k in 1..600 {
        term = term
            .mul(q)
            .div(Dd::from_f64(k as f64))
            .div(Dd::from_f64((k as u64 + nu as u64) as f64));
        sum = sum.add(term);
        if term.to_f64() < 1e-40 * sum.to_f64().max(1e-300) {
            break;
        }
    }
    sum.to_f64()
}

/// ⟨n|D(β)|n₀⟩ for real β > 0 by the literal finite sum
/// √(n! n₀!) e^{−β²/2} Σ_k (−β)^{n₀−k} β^{n−k} / (k!(n−k)!(n₀−k)!),
/// evaluated in double-double. Usable for n, n₀ ≤ 64 and β ≤ 2 where the
/// cancellation stays within the 31-digit headroom.
pub fn dd_displacement_real(n: usize, n0: usize, beta: f64) -> f64 {
    let b = Dd::from_f64(beta);
    // factorials in DD
    let mut fact = vec![Dd::ONE; n.max(n0) + 1];
    for k in 1..fact.len() {
        fact[k] = fact[k - 1].mul(Dd::from_f64(k as f64));
    }
    let mut sum = Dd::ZERO;
    for k in 0..=n.min(n0) {
        // (−β)^{n₀−k} β^{n−k}
        let mut p = Dd::ONE;
        for _ in 0..(n0 - k) {
            p = p.mul(b.neg());
        }
        for _ in 0..(n - k) {
            p = p.mul(b);
        }
        let denom = fact[k].mul(fact[n - k]).mul(fact[n0 - k]);
        sum = sum.add(p.div(denom));
    }
    // √(n! n₀!) e^{−β²/2}; the prefactor is benign, plain f64 transcendentals
    // in DD wrappers keep ~31 digits through the product.
    let ln_pref = 0.5 * (ln_factorial_f64(n) + ln_factorial_f64(n0)) - 0.5 * beta * beta;
    // exp in DD via split: e^a = e^round(a) · e^frac is overkill here because
    // |ln_pref| < 200 and the final comparison tolerance is 1e-12 relative.
    sum.to_f64() * ln_pref.exp()
}

fn ln_factorial_f64(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// K_ν(x) for ν ∈ {0, 1} by adaptive Simpson quadrature of the integral
/// representation K_ν(x) = e^{−x} ∫₀^∞ e^{−x(cosh t − 1)} cosh(νt) dt.
/// The scaled integrand keeps the integral O(1) for every x, so the
/// absolute Simpson tolerance stays meaningful at large x.
pub fn quad_bessel_k(nu: u32, x: f64) -> f64 {
    let f = |t: f64| (-x * (t.cosh() - 1.0)).exp() * (nu as f64 * t).cosh();
    let mut t_hi = 1.0_f64;
    while x * (t_hi.cosh() - 1.0) - (nu as f64 * t_hi) < 750.0 && t_hi < 60.0 {
        t_hi += 0.5;
    }
    (-x).exp() * adaptive_simpson(&f, 0.0, t_hi, 1e-15, 40)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, depth: u32) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    let whole = simpson(f, a, b);
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    if depth == 0 || (left + right - whole).abs() < 15.0 * eps {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive_simpson(f, a, m, eps / 2.0, depth - 1)
            + adaptive_simpson(f, m, b, eps / 2.0, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_mul_keeps_extra_digits() {
        // (1 + 2^-40)^2 = 1 + 2^-39 + 2^-80; plain f64 drops the last term
        let x = Dd::from_f64(1.0).add(Dd::from_f64(2.0_f64.powi(-40)));
        let sq = x.mul(x);
        let err = sq.sub(Dd::from_f64(1.0))
            .sub(Dd::from_f64(2.0_f64.powi(-39)))
            .to_f64();
        assert!((err - 2.0_f64.powi(-80)).abs() < 1e-30);
    }

    #[test]
    fn dd_series_hits_frozen_j_values() {
        assert!((dd_bessel_j(1, 1.0) - 0.4400505857449335).abs() < 1e-15);
        assert!((dd_bessel_j(0, 2.404825557695773)).abs() < 1e-15);
    }

    #[test]
    fn dd_series_hits_frozen_i_value() {
        assert!((dd_bessel_i(1, 1.0) - 0.5651591039924851).abs() < 1e-15);
        assert!((dd_bessel_i(0, 2.0) - 2.2795853023360673).abs() < 1e-15);
    }

    #[test]
    fn quad_k_hits_frozen_values() {
        assert!((quad_bessel_k(0, 1.0) - 0.42102443824070834).abs() < 1e-14);
        assert!((quad_bessel_k(1, 1.0) - 0.6019072301972346).abs() < 1e-14);
    }

    #[test]
    fn dd_displacement_vacuum_column() {
        // ⟨0|D(β)|0⟩ = e^{−β²/2}
        let d = dd_displacement_real(0, 0, 1.0);
        assert!((d - 0.6065306597126334).abs() < 1e-15);
        // ⟨1|D(β)|0⟩ = β e^{−β²/2}
        let d10 = dd_displacement_real(1, 0, 1.0);
        assert!((d10 - 0.6065306597126334).abs() < 1e-15);
    }
}
