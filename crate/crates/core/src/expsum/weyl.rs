//! Weyl sums `f_k(alpha) = sum_{1 <= x <= P} e(alpha x^k)`, the singular
//! integral factor `v_k(beta)`, the major-arc approximation
//! `f_k^*(alpha) = q^-1 S_k(q,a) v_k(alpha - a/q)` and the sample sums `K`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::adaptive_gk15;
use crate::residue::{check_exponent, gauss_sum, UnitRoots};

/// Largest `P` for a single Weyl-sum evaluation.
pub const WEYL_LIMIT: u64 = 10_000_000;

/// Largest `|beta| P^k` accepted by [`vk_integral`].
pub const OSCILLATION_BUDGET: f64 = 1e6;

#[inline]
pub(crate) fn e(t: f64) -> Complex64 {
    let (s, c) = (TAU * t).sin_cos();
    Complex64::new(c, s)
}

/// A point of the unit interval, either exactly rational or a double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Alpha {
    Rational { num: u64, den: u64 },
    Real(f64),
}

impl Alpha {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Alpha::Rational { num, den } => den > 0 && num < den,
            Alpha::Real(x) => (0.0..1.0).contains(&x),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::pre(format!("alpha {self:?} is not in [0, 1)")))
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Alpha::Rational { num, den } => num as f64 / den as f64,
            Alpha::Real(x) => x,
        }
    }
}

/// Neumaier-compensated complex sum.
#[derive(Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    re: f64,
    im: f64,
    cre: f64,
    cim: f64,
}

impl CompensatedSum {
    #[inline]
    fn add_part(sum: &mut f64, comp: &mut f64, x: f64) {
        let t = *sum + x;
        if sum.abs() >= x.abs() {
            *comp += (*sum - t) + x;
        } else {
            *comp += (x - t) + *sum;
        }
        *sum = t;
    }

    #[inline]
    pub(crate) fn add(&mut self, z: Complex64) {
        Self::add_part(&mut self.re, &mut self.cre, z.re);
        Self::add_part(&mut self.im, &mut self.cim, z.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.cre, self.im + self.cim)
    }
}

/// Fractional part of `mant * x^k / 2^shift`, exact up to the final rounding.
fn dyadic_phase(mant: u64, shift: u32, x: u64, k: u32) -> f64 {
    // 256-bit little-endian product mant * x^k
    let mut limbs = [mant, 0u64, 0, 0];
    for _ in 0..k {
        let mut carry = 0u128;
        for l in limbs.iter_mut() {
            let v = *l as u128 * x as u128 + carry;
            *l = v as u64;
            carry = v >> 64;
        }
        debug_assert_eq!(carry, 0);
    }
    if shift < 256 {
        let full = (shift / 64) as usize;
        let rem = shift % 64;
        for l in limbs.iter_mut().skip(full + usize::from(rem > 0)) {
            *l = 0;
        }
        if rem > 0 {
            limbs[full] &= (1u64 << rem) - 1;
        }
    }
    let mut f = 0.0f64;
    for &l in limbs.iter().rev() {
        f = f * 18_446_744_073_709_551_616.0 + l as f64;
    }
    // scale by 2^-shift in two steps so the factor never underflows early
    f * 2f64.powi(-(shift.min(1000) as i32)) * 2f64.powi(-(shift.saturating_sub(1000) as i32))
}

/// `(mantissa, shift)` with `x = mantissa / 2^shift` exactly, for finite `x >= 0`.
fn dyadic(x: f64) -> (u64, u32) {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (mut mant, mut shift) = if exp == 0 { (frac, 1074i32) } else { (frac | (1u64 << 52), 1075 - exp) };
    if mant == 0 {
        return (0, 0);
    }
    let tz = mant.trailing_zeros().min(shift.max(0) as u32);
    mant >>= tz;
    shift -= tz as i32;
    if shift < 0 {
        // x >= 2^53; only reachable for inputs outside [0, 1)
        return (0, 0);
    }
    (mant, shift as u32)
}

/// `sum_{1 <= x <= P} e(num x^k / den)` for any numerator.
pub fn phase_sum(k: u32, p: u64, num: u64, den: u64) -> Complex64 {
    let roots = UnitRoots::new(den);
    let num = num % den;
    let mut acc = CompensatedSum::default();
    for x in 1..=p {
        let m = (num as u128 * crate::arith::pow_mod(x, k, den) as u128 % den as u128) as u64;
        acc.add(roots.e(m));
    }
    acc.value()
}

/// `f_k(alpha)` over `1 <= x <= P`.
pub fn weyl_sum(k: u32, p: u64, alpha: Alpha) -> Result<Complex64> {
    alpha.validate()?;
    if p > WEYL_LIMIT {
        return Err(Error::Budget { what: "Weyl sum length", required: p as u128, limit: WEYL_LIMIT as u128 });
    }
    Ok(match alpha {
        Alpha::Rational { num, den } => {
            if den <= 1 << 24 {
                phase_sum(k, p, num, den)
            } else {
                let mut acc = CompensatedSum::default();
                for x in 1..=p {
                    let m = num as u128 * crate::arith::pow_mod(x, k, den) as u128 % den as u128;
                    acc.add(e(m as f64 / den as f64));
                }
                acc.value()
            }
        }
        Alpha::Real(a) => {
            let (mant, shift) = dyadic(a);
            let mut acc = CompensatedSum::default();
            for x in 1..=p {
                acc.add(e(dyadic_phase(mant, shift, x, k)));
            }
            acc.value()
        }
    })
}

/// `sum_{1 <= x <= P} e(a x^k / q) e(beta x^k)`, the Weyl sum at `a/q + beta`
/// with the rational part reduced exactly.
#[derive(Debug, Clone)]
pub struct ShiftedWeyl {
    coeffs: Vec<Complex64>,
    powers: Vec<f64>,
}

impl ShiftedWeyl {
    pub fn new(k: u32, p: u64, q: u64, a: u64) -> Self {
        let roots = UnitRoots::new(q);
        let coeffs = (1..=p)
            .map(|x| roots.e((a as u128 * crate::arith::pow_mod(x, k, q) as u128 % q as u128) as u64))
            .collect();
        let powers = (1..=p).map(|x| (x as f64).powi(k as i32)).collect();
        ShiftedWeyl { coeffs, powers }
    }

    pub fn eval(&self, beta: f64) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for (c, &xk) in self.coeffs.iter().zip(&self.powers) {
            acc.add(c * e(beta * xk));
        }
        acc.value()
    }
}

/// `v_k(beta) = int_0^P e(beta t^k) dt`.
///
/// The range is cut where the phase crosses each quarter period and every
/// piece is integrated by adaptive Gauss–Kronrod, so the total error is at
/// most `1e-8 P`. Negative `beta` is the conjugate of `|beta|`.
pub fn vk_integral(k: u32, p: f64, beta: f64) -> Result<Complex64> {
    check_exponent(k)?;
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::pre(format!("upper limit P={p} must be finite and non-negative")));
    }
    if beta == 0.0 || p == 0.0 {
        return Ok(Complex64::new(p, 0.0));
    }
    let b = beta.abs();
    let cycles = b * p.powi(k as i32);
    if cycles > OSCILLATION_BUDGET {
        return Err(Error::Budget {
            what: "oscillation count |beta| P^k",
            required: cycles.ceil() as u128,
            limit: OSCILLATION_BUDGET as u128,
        });
    }
    let tol = 1e-8 * p;
    let pieces = (4.0 * cycles).ceil().max(1.0) as usize;
    let inv_k = 1.0 / k as f64;
    let mut f = |t: f64| e(b * t.powi(k as i32));
    let mut acc = CompensatedSum::default();
    let mut lo = 0.0;
    for j in 1..=pieces {
        let hi = if j == pieces { p } else { (j as f64 / (4.0 * b)).powf(inv_k).min(p) };
        if hi > lo {
            let (v, _) = adaptive_gk15(&mut f, lo, hi, tol * (hi - lo) / p, 40)?;
            acc.add(v);
        }
        lo = hi;
    }
    let v = acc.value();
    Ok(if beta < 0.0 { v.conj() } else { v })
}

/// `v_k` tabulated on a uniform grid in `t = beta P^k`, evaluated by
/// four-point Lagrange interpolation. Used where `v_k` is needed at many
/// nearby points inside an integrand.
#[derive(Debug, Clone)]
pub struct VkTable {
    p: f64,
    scale: f64,
    step: f64,
    t_max: f64,
    values: Vec<Complex64>,
}

impl VkTable {
    /// Covers `|beta| P^k <= t_max`.
    pub fn new(k: u32, p: f64, t_max: f64, step: f64) -> Result<Self> {
        let scale = p.powi(k as i32);
        let n = (t_max / step).ceil() as usize + 3;
        let values = (0..=n)
            .map(|i| vk_integral(k, p, i as f64 * step / scale))
            .collect::<Result<Vec<_>>>()?;
        Ok(VkTable { p, scale, step, t_max, values })
    }

    pub fn upper_limit(&self) -> f64 {
        self.p
    }

    pub fn eval(&self, beta: f64) -> Complex64 {
        let t = beta.abs() * self.scale;
        debug_assert!(t <= self.t_max + self.step);
        let u = t / self.step;
        let i = (u.floor() as usize).clamp(1, self.values.len() - 3);
        let s = u - i as f64;
        // nodes i-1, i, i+1, i+2 at offsets -1, 0, 1, 2
        let w = [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ];
        let v: Complex64 = (0..4).map(|j| self.values[i - 1 + j] * w[j]).sum();
        if beta < 0.0 {
            v.conj()
        } else {
            v
        }
    }
}

/// `f_k^* = q^-1 S_k(q,a) v_k(beta)` with `v_k` integrated up to `P`.
pub fn major_arc_approx(k: u32, q: u64, a: u64, beta: f64, p: f64) -> Result<Complex64> {
    check_exponent(k)?;
    let s = if q == 1 {
        if a > 1 {
            return Err(Error::pre(format!("numerator a={a} invalid for q=1")));
        }
        Complex64::new(1.0, 0.0)
    } else {
        gauss_sum(k, q, a)?.value
    };
    Ok(s / q as f64 * vk_integral(k, p, beta)?)
}

/// A finite sample `Z` with unimodular weights `eta_n` (all one by default).
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalSample {
    pub z: Vec<u64>,
    pub eta: Option<Vec<Complex64>>,
}

impl ExceptionalSample {
    pub fn new(z: Vec<u64>) -> Self {
        ExceptionalSample { z, eta: None }
    }

    pub fn with_phases(z: Vec<u64>, eta: Vec<Complex64>) -> Result<Self> {
        if eta.len() != z.len() {
            return Err(Error::pre("eta must have one entry per member of Z"));
        }
        if eta.iter().any(|w| (w.norm() - 1.0).abs() > 1e-12) {
            return Err(Error::pre("every eta_n must have modulus one"));
        }
        Ok(ExceptionalSample { z, eta: Some(eta) })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }
}

/// `K(alpha) = sum_{n in Z} eta_n e(-n alpha)`.
pub fn sample_k(sample: &ExceptionalSample, alpha: f64) -> Complex64 {
    let (mant, shift) = dyadic(alpha.rem_euclid(1.0));
    let mut acc = CompensatedSum::default();
    for (i, &n) in sample.z.iter().enumerate() {
        // n * alpha mod 1, exact for the double alpha
        let ph = if n < (1 << 42) { dyadic_phase(mant, shift, n, 1) } else { (n as f64 * alpha).fract() };
        let term = e(-ph);
        acc.add(match &sample.eta {
            Some(eta) => eta[i] * term,
            None => term,
        });
    }
    acc.value()
}
