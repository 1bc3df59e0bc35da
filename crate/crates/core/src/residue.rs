//! Complete exponential sums `S_k(q,a) = sum_{r=1}^{q} e(a r^k / q)`, the
//! multiplicative majorant `w_k(q)` and the leading constant of the
//! asymptotic formula.
//!
//! Phases are always formed by reducing `a r^k` modulo `q` in exact integer
//! arithmetic and then looking up `e(m/q)` in a per-modulus table of roots of
//! unity, so the rounding error does not grow with `r`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::arith::{factorize, gcd, pow_mod};
use crate::error::{Error, Result};

/// Exponents appearing in the form `x1^2 + x2^2 + x3^3 + x4^3 + x5^6 + x6^6`.
pub const EXPONENTS: [u32; 3] = [2, 3, 6];

/// Largest modulus accepted by [`gauss_sum`].
pub const GAUSS_MODULUS_LIMIT: u64 = 1_000_000;

/// Largest `q_max` accepted by [`majorant_ratio_survey`].
pub const SURVEY_LIMIT: u64 = 10_000;

pub(crate) fn check_exponent(k: u32) -> Result<()> {
    if EXPONENTS.contains(&k) {
        Ok(())
    } else {
        Err(Error::pre(format!("exponent k={k} is not one of 2, 3, 6")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussSumValue {
    pub k: u32,
    pub q: u64,
    pub a: u64,
    #[serde(skip)]
    pub value: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorantValue {
    pub k: u32,
    pub q: u64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingConstant {
    /// `(27/32) 2^(1/3) Gamma(4/3)^6`.
    pub value: f64,
    /// `Gamma(3/2)^2 Gamma(4/3)^2 Gamma(7/6)^2 / Gamma(2)`.
    pub gamma_product_form: f64,
}

/// Table of `e(m/q)` for `0 <= m < q`.
#[derive(Debug, Clone)]
pub struct UnitRoots {
    q: u64,
    table: Vec<Complex64>,
}

impl UnitRoots {
    pub fn new(q: u64) -> Self {
        let table = (0..q)
            .map(|m| {
                // reflect into [0, 1/2] so the argument of sin_cos stays small
                let (num, neg) = if 2 * m <= q { (m, false) } else { (q - m, true) };
                let (s, c) = (std::f64::consts::TAU * num as f64 / q as f64).sin_cos();
                Complex64::new(c, if neg { -s } else { s })
            })
            .collect();
        UnitRoots { q, table }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// `e(m/q)` for any `m`, reduced modulo `q`.
    #[inline]
    pub fn e(&self, m: u64) -> Complex64 {
        self.table[(m % self.q) as usize]
    }
}

/// Sparse spectrum of the `k`-th power map on `Z/qZ`: `(residue, multiplicity)`
/// over one complete residue system, residues increasing.
pub fn power_spectrum(k: u32, q: u64) -> Vec<(u64, u64)> {
    let mut counts = vec![0u64; q as usize];
    for r in 0..q {
        counts[pow_mod(r, k, q) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(m, c)| (m as u64, c))
        .collect()
}

fn sum_over_spectrum(spec: &[(u64, u64)], a: u64, roots: &UnitRoots) -> Complex64 {
    let q = roots.modulus() as u128;
    spec.iter()
        .map(|&(m, c)| roots.e(((a as u128 * m as u128) % q) as u64) * c as f64)
        .sum()
}

/// `S_k(q,a)`.
pub fn gauss_sum(k: u32, q: u64, a: u64) -> Result<GaussSumValue> {
    check_exponent(k)?;
    if q == 0 {
        return Err(Error::pre("modulus q must be positive"));
    }
    if q > GAUSS_MODULUS_LIMIT {
        return Err(Error::pre(format!("modulus q={q} exceeds {GAUSS_MODULUS_LIMIT}")));
    }
    if a == 0 || a > q {
        return Err(Error::pre(format!("residue a={a} must satisfy 1 <= a <= q={q}")));
    }
    if gcd(a, q) != 1 {
        return Err(Error::pre(format!("gcd(a={a}, q={q}) != 1")));
    }
    let roots = UnitRoots::new(q);
    let value = sum_over_spectrum(&power_spectrum(k, q), a % q, &roots);
    Ok(GaussSumValue { k, q, a, value })
}

/// `S_k(q,a)` for every residue `a` in `0..q`; entries with `gcd(a,q) != 1`
/// are left at zero.
///
/// `S_k(q, a t^k) = S_k(q, a)` for every unit `t`, so the sum is evaluated once
/// per coset of the `k`-th power units and copied across the coset.
pub fn gauss_sums_all(k: u32, q: u64, roots: &UnitRoots) -> Vec<Complex64> {
    debug_assert_eq!(roots.modulus(), q);
    let n = q as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if q == 1 {
        out[0] = Complex64::new(1.0, 0.0);
        return out;
    }
    let spec = power_spectrum(k, q);
    let mut kth_units: Vec<u64> = (1..q)
        .filter(|&t| gcd(t, q) == 1)
        .map(|t| pow_mod(t, k, q))
        .collect();
    kth_units.sort_unstable();
    kth_units.dedup();

    let mut done = vec![false; n];
    for a in 1..q {
        if done[a as usize] || gcd(a, q) != 1 {
            continue;
        }
        let s = sum_over_spectrum(&spec, a, roots);
        for &u in &kth_units {
            let b = ((a as u128 * u as u128) % q as u128) as usize;
            out[b] = s;
            done[b] = true;
        }
    }
    out
}

/// `w_k(q)`, built multiplicatively from `w_k(p^(uk+v)) = k p^(-u-1/2)` when
/// `v = 1` and `p^(-u-1)` when `2 <= v <= k`.
pub fn wk_majorant(k: u32, q: u64) -> Result<MajorantValue> {
    check_exponent(k)?;
    if q == 0 {
        return Err(Error::pre("modulus q must be positive"));
    }
    let value = factorize(q)
        .into_iter()
        .map(|(p, h)| wk_prime_power(k, p, h))
        .product();
    Ok(MajorantValue { k, q, value })
}

fn wk_prime_power(k: u32, p: u64, h: u32) -> f64 {
    let u = (h - 1) / k;
    let v = h - u * k;
    let p = p as f64;
    if v == 1 {
        k as f64 * p.powf(-(u as f64) - 0.5)
    } else {
        p.powf(-(u as f64) - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSurvey {
    pub k: u32,
    pub q_max: u64,
    /// Modulus attaining the supremum.
    pub q: u64,
    pub a: u64,
    /// `sup |q^-1 S_k(q,a)| / w_k(q)`.
    pub ratio: f64,
}

/// Exhaustive supremum of `|q^-1 S_k(q,a)| / w_k(q)` over `q <= q_max` and
/// coprime `a`. Ties resolve to the smallest `(q, a)`.
pub fn majorant_ratio_survey(k: u32, q_max: u64) -> Result<RatioSurvey> {
    check_exponent(k)?;
    if q_max == 0 {
        return Err(Error::pre("q_max must be positive"));
    }
    if q_max > SURVEY_LIMIT {
        return Err(Error::pre(format!("q_max={q_max} exceeds {SURVEY_LIMIT}")));
    }
    let best = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let roots = UnitRoots::new(q);
            let sums = gauss_sums_all(k, q, &roots);
            let w = wk_majorant(k, q).expect("validated").value;
            let mut best = (0.0f64, q, 0u64);
            for a in 0..q.max(1) {
                let a_eff = if q == 1 { 1 } else { a };
                if q > 1 && gcd(a, q) != 1 {
                    continue;
                }
                let r = sums[(a % q) as usize].norm() / q as f64 / w;
                if r > best.0 {
                    best = (r, q, a_eff);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, u64::MAX, u64::MAX),
            |x, y| {
                if x.0 > y.0 || (x.0 == y.0 && (x.1, x.2) <= (y.1, y.2)) {
                    x
                } else {
                    y
                }
            },
        );
    Ok(RatioSurvey { k, q_max, q: best.1, a: best.2, ratio: best.0 })
}

/// Both closed forms of the constant multiplying `S(n) n` in the asymptotic
/// formula for `R(n)`.
pub fn leading_constant() -> LeadingConstant {
    let value = 27.0 / 32.0 * 2f64.cbrt() * gamma(4.0 / 3.0).powi(6);
    let gamma_product_form =
        (gamma(1.5) * gamma(4.0 / 3.0) * gamma(7.0 / 6.0)).powi(2) / gamma(2.0);
    LeadingConstant { value, gamma_product_form }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(k: u32, q: u64, a: u64) -> Complex64 {
        (1..=q)
            .map(|r| {
                let m = pow_mod(r, k, q) as f64 * a as f64 / q as f64;
                Complex64::from_polar(1.0, std::f64::consts::TAU * m)
            })
            .sum()
    }

    #[test]
    fn gauss_examples() {
        let close = |z: Complex64, re: f64, im: f64| (z - Complex64::new(re, im)).norm() < 1e-12;
        assert!(close(gauss_sum(3, 1, 1).unwrap().value, 1.0, 0.0));
        assert!(close(gauss_sum(2, 2, 1).unwrap().value, 0.0, 0.0));
        assert!(close(gauss_sum(2, 4, 1).unwrap().value, 2.0, 2.0));
        assert!(close(gauss_sum(3, 3, 1).unwrap().value, 0.0, 0.0));
    }

    #[test]
    fn gauss_rejects_bad_input() {
        assert!(matches!(gauss_sum(2, 4, 2), Err(Error::Precondition(_))));
        assert!(matches!(gauss_sum(4, 5, 1), Err(Error::Precondition(_))));
        assert!(matches!(gauss_sum(2, 0, 1), Err(Error::Precondition(_))));
        assert!(matches!(gauss_sum(2, 5, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn gauss_matches_direct_summation() {
        for &k in &EXPONENTS {
            for q in [7u64, 12, 36, 64, 81, 97, 250, 1001] {
                let roots = UnitRoots::new(q);
                let all = gauss_sums_all(k, q, &roots);
                for a in (1..q).filter(|&a| gcd(a, q) == 1).step_by(7) {
                    let d = direct(k, q, a);
                    assert!((gauss_sum(k, q, a).unwrap().value - d).norm() < 1e-9);
                    assert!((all[a as usize] - d).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn quadratic_gauss_sum_magnitude_at_odd_primes() {
        for p in crate::arith::primes_up_to(997).into_iter().skip(1) {
            let roots = UnitRoots::new(p);
            let all = gauss_sums_all(2, p, &roots);
            for a in 1..p {
                assert!((all[a as usize].norm() - (p as f64).sqrt()).abs() < 1e-8, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn conjugate_symmetry() {
        for &k in &EXPONENTS {
            for q in 2..=500u64 {
                let roots = UnitRoots::new(q);
                let all = gauss_sums_all(k, q, &roots);
                for a in (1..q).filter(|&a| gcd(a, q) == 1) {
                    assert!((all[(q - a) as usize] - all[a as usize].conj()).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn majorant_examples() {
        assert_eq!(wk_majorant(2, 1).unwrap().value, 1.0);
        assert!((wk_majorant(2, 3).unwrap().value - 2.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((wk_majorant(2, 4).unwrap().value - 0.5).abs() < 1e-15);
        // 2^7 = 2^(3*2+1) for k = 3: u = 2, v = 1
        assert!((wk_majorant(3, 128).unwrap().value - 3.0 * 2f64.powf(-2.5)).abs() < 1e-15);
        // 5^6 for k = 6: u = 0, v = 6
        assert!((wk_majorant(6, 15625).unwrap().value - 0.2).abs() < 1e-15);
        assert!(wk_majorant(2, 0).is_err());
    }

    #[test]
    fn survey_small() {
        let s = majorant_ratio_survey(2, 1).unwrap();
        assert_eq!((s.q, s.ratio), (1, 1.0));
        assert!(majorant_ratio_survey(2, SURVEY_LIMIT + 1).is_err());
    }

    #[test]
    fn leading_constant_forms_agree() {
        let c = leading_constant();
        assert!(c.value > 0.0);
        assert!((c.value - c.gamma_product_form).abs() <= 1e-12 * c.value);
        // mpmath at 30 digits: 0.539021496299682988790355373289
        assert!((c.value - 0.539_021_496_299_683).abs() < 1e-14);
    }

    #[test]
    fn gamma_reference_points() {
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert!((gamma(1.0) - 1.0).abs() < 1e-15);
    }
}
