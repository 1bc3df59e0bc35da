//! The singular series: the terms `A(q;n)`, the truncation `S(n;W)`, and the
//! exact congruence counts `M_n(q)` that serve as their independent oracle.
//!
//! `A(q;n)` is multiplicative in `q`, so the batched paths work from
//! prime-power tables only and multiply. The literal sum over residues `a`
//! is kept in [`series_term`] as a cross-check.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime, prime_power_parts, prime_powers_up_to, spf_table};
use crate::error::{Error, Result};
use crate::ntt::cyclic_convolve_exact;
use crate::residue::{gauss_sums_all, power_spectrum, UnitRoots};

/// Largest modulus for [`congruence_count`] and [`local_density`].
pub const CONGRUENCE_LIMIT: u64 = 10_000;

/// Default truncation level for predictions.
pub const DEFAULT_TRUNCATION: u64 = 1000;

/// Prime powers whose terms never exceed this in magnitude are treated as
/// identically zero (e.g. `q = 2`, where `S_2(2,1) = 0`).
const ZERO_TERM: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub q: u64,
    pub n: i64,
    pub value: f64,
    /// Imaginary part of the defining sum; zero up to rounding.
    pub imag: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularSeriesValue {
    pub n: u64,
    pub w: u64,
    pub value: f64,
    /// `|S(n;2W) - S(n;W)|`.
    pub tail_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CongruenceCount {
    pub q: u64,
    pub n: i64,
    pub count: u128,
}

/// `q^-6 (S_2 S_3 S_6)^2(q,a)` for every residue `a`, zero off the units.
fn term_weights(q: u64) -> Vec<Complex64> {
    let roots = UnitRoots::new(q);
    let s2 = gauss_sums_all(2, q, &roots);
    let s3 = gauss_sums_all(3, q, &roots);
    let s6 = gauss_sums_all(6, q, &roots);
    let scale = (q as f64).powi(-6);
    (0..q as usize)
        .map(|a| {
            let z = s2[a] * s3[a] * s6[a];
            z * z * scale
        })
        .collect()
}

fn sum_against_phases(weights: &[Complex64], q: u64, n: i64, roots: &UnitRoots) -> Complex64 {
    let r = n.rem_euclid(q as i64) as u64;
    // e(-n a / q) = e((q - r) a / q)
    let shift = (q - r) % q;
    weights
        .iter()
        .enumerate()
        .filter(|(_, w)| w.re != 0.0 || w.im != 0.0)
        .map(|(a, w)| w * roots.e(((shift as u128 * a as u128) % q as u128) as u64))
        .sum()
}

/// `A(q;n)` by literal summation over the reduced residues `a`.
pub fn series_term(q: u64, n: i64) -> Result<SeriesTerm> {
    if q == 0 {
        return Err(Error::pre("modulus q must be positive"));
    }
    if q > CONGRUENCE_LIMIT * 100 {
        return Err(Error::pre(format!("modulus q={q} too large for literal summation")));
    }
    if q == 1 {
        return Ok(SeriesTerm { q, n, value: 1.0, imag: 0.0 });
    }
    let weights = term_weights(q);
    let z = sum_against_phases(&weights, q, n, &UnitRoots::new(q));
    Ok(SeriesTerm { q, n, value: z.re, imag: z.im })
}

/// Per-prime-power data shared by every evaluation of the series up to a
/// fixed modulus limit.
#[derive(Debug, Clone)]
pub struct SeriesEngine {
    limit: u64,
    spf: Vec<u32>,
    /// Indexed by modulus; populated for prime powers only.
    weights: Vec<Option<Vec<Complex64>>>,
    roots: Vec<Option<UnitRoots>>,
}

impl SeriesEngine {
    /// Prepares every prime power `<= limit`.
    pub fn new(limit: u64) -> Self {
        let limit = limit.max(1);
        let pps = prime_powers_up_to(limit);
        let built: Vec<(u64, Vec<Complex64>, UnitRoots)> = pps
            .par_iter()
            .map(|&(_, _, q)| (q, term_weights(q), UnitRoots::new(q)))
            .collect();
        let mut weights = vec![None; limit as usize + 1];
        let mut roots = vec![None; limit as usize + 1];
        for (q, w, r) in built {
            weights[q as usize] = Some(w);
            roots[q as usize] = Some(r);
        }
        SeriesEngine { limit, spf: spf_table(limit as usize), weights, roots }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    fn prime_power_term(&self, q: u64, n: i64) -> f64 {
        let w = self.weights[q as usize].as_ref().expect("prime power");
        let r = self.roots[q as usize].as_ref().expect("prime power");
        sum_against_phases(w, q, n, r).re
    }

    /// `A(q;n)` as a product of prime-power terms.
    pub fn term(&self, q: u64, n: i64) -> Result<f64> {
        if q == 0 || q > self.limit {
            return Err(Error::pre(format!("modulus q={q} outside 1..={}", self.limit)));
        }
        Ok(prime_power_parts(q as usize, &self.spf)
            .into_iter()
            .map(|pp| self.prime_power_term(pp as u64, n))
            .product())
    }

    /// `S(n;W)` together with `|S(n;2W) - S(n;W)|`; needs `2W <= limit`.
    pub fn truncated(&self, n: u64, w: u64) -> Result<SingularSeriesValue> {
        if w == 0 {
            return Err(Error::pre("truncation W must be positive"));
        }
        if n == 0 {
            return Err(Error::pre("target n must be positive"));
        }
        if 2 * w > self.limit {
            return Err(Error::pre(format!("2W={} exceeds engine limit {}", 2 * w, self.limit)));
        }
        let n = n as i64;
        // A(p^h; n) for each prime power once, then products over q
        let mut pp_term = vec![0.0f64; 2 * w as usize + 1];
        for (q, slot) in pp_term.iter_mut().enumerate().skip(2) {
            if self.weights[q].is_some() {
                *slot = self.prime_power_term(q as u64, n);
            }
        }
        let mut value = 0.0;
        let mut upper = 0.0;
        for q in 1..=2 * w as usize {
            let t: f64 = prime_power_parts(q, &self.spf).into_iter().map(|pp| pp_term[pp]).product();
            if q <= w as usize {
                value += t;
            } else {
                upper += t;
            }
        }
        Ok(SingularSeriesValue { n: n as u64, w, value, tail_estimate: upper.abs() })
    }

    /// Full residue tables `A(q; r)` for all `q <= w_max`, for batch evaluation.
    pub fn table(&self, w_max: u64) -> Result<SeriesTable> {
        if w_max == 0 || w_max > self.limit {
            return Err(Error::pre(format!("table size {w_max} outside 1..={}", self.limit)));
        }
        let pps: Vec<u64> = (2..=w_max).filter(|&q| self.weights[q as usize].is_some()).collect();
        let pp_tables: Vec<(u64, Vec<f64>)> = pps
            .par_iter()
            .map(|&q| {
                let w = self.weights[q as usize].as_ref().unwrap();
                let roots = self.roots[q as usize].as_ref().unwrap();
                let t: Vec<f64> =
                    (0..q as i64).map(|r| sum_against_phases(w, q, r, roots).re).collect();
                (q, t)
            })
            .collect();
        let mut by_q: Vec<Option<Vec<f64>>> = vec![None; w_max as usize + 1];
        for (q, t) in pp_tables {
            if t.iter().any(|v| v.abs() > ZERO_TERM) {
                by_q[q as usize] = Some(t);
            }
        }
        let mut entries: Vec<(u64, Vec<f64>)> = vec![(1, vec![1.0])];
        for q in 2..=w_max as usize {
            let parts = prime_power_parts(q, &self.spf);
            if parts.iter().any(|&pp| by_q[pp].is_none()) {
                continue;
            }
            let t = if parts.len() == 1 {
                by_q[q].clone().unwrap()
            } else {
                (0..q)
                    .map(|r| parts.iter().map(|&pp| by_q[pp].as_ref().unwrap()[r % pp]).product())
                    .collect()
            };
            entries.push((q as u64, t));
        }
        Ok(SeriesTable { w_max, entries })
    }
}

/// Residue tables of the nonzero terms `A(q;·)`, `q <= w_max`.
#[derive(Debug, Clone)]
pub struct SeriesTable {
    w_max: u64,
    entries: Vec<(u64, Vec<f64>)>,
}

impl SeriesTable {
    pub fn w_max(&self) -> u64 {
        self.w_max
    }

    /// Moduli whose term is not identically zero.
    pub fn nonzero_moduli(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn partial_sum(&self, n: u64, w: u64) -> f64 {
        self.entries
            .iter()
            .take_while(|e| e.0 <= w)
            .map(|(q, t)| t[(n % q) as usize])
            .sum()
    }

    /// `S(n;W)` for every `n` in `lo..=hi`, accumulated modulus by modulus.
    pub fn partial_sums_range(&self, lo: u64, hi: u64, w: u64) -> Vec<f64> {
        const CHUNK: u64 = 1 << 14;
        let starts: Vec<u64> = (lo..=hi).step_by(CHUNK as usize).collect();
        starts
            .par_iter()
            .flat_map_iter(|&start| {
                let end = (start + CHUNK - 1).min(hi);
                let mut acc = vec![0.0f64; (end - start + 1) as usize];
                for (q, t) in self.entries.iter().take_while(|e| e.0 <= w) {
                    let q = *q as usize;
                    let mut r = (start % q as u64) as usize;
                    for slot in acc.iter_mut() {
                        *slot += t[r];
                        r += 1;
                        if r == q {
                            r = 0;
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

impl SeriesTable {
    /// `(S(n;W), |S(n;2W) - S(n;W)|)` for every `n` in `lo..=hi`; needs
    /// `2W <= w_max`.
    pub fn partial_sums_with_tail(&self, lo: u64, hi: u64, w: u64) -> Result<(Vec<f64>, Vec<f64>)> {
        if 2 * w > self.w_max {
            return Err(Error::pre(format!("2W={} exceeds table size {}", 2 * w, self.w_max)));
        }
        let value = self.partial_sums_range(lo, hi, w);
        let upper = self.partial_sums_range(lo, hi, 2 * w);
        let tail = upper.iter().zip(&value).map(|(u, v)| (u - v).abs()).collect();
        Ok((value, tail))
    }
}

/// `S(n;W)` with its tail estimate, from a freshly built engine.
pub fn truncated_singular_series(n: u64, w: u64) -> Result<SingularSeriesValue> {
    if w == 0 {
        return Err(Error::pre("truncation W must be positive"));
    }
    if n == 0 {
        return Err(Error::pre("target n must be positive"));
    }
    SeriesEngine::new(2 * w).truncated(n, w)
}

/// `S(n;W)` by literal summation of [`series_term`] over every `q <= W`.
pub fn truncated_singular_series_literal(n: u64, w: u64) -> Result<f64> {
    if w == 0 || n == 0 {
        return Err(Error::pre("n and W must be positive"));
    }
    let terms: Result<Vec<f64>> =
        (1..=w).into_par_iter().map(|q| series_term(q, n as i64).map(|t| t.value)).collect();
    Ok(terms?.into_iter().sum())
}

/// Exact solution counts of `x1^2+x2^2+x3^3+x4^3+x5^6+x6^6 = n (mod q)` for
/// all `n` at once.
#[derive(Debug, Clone)]
pub struct CongruenceCounter {
    q: u64,
    squares: Vec<u128>,
    rest: Vec<u128>,
}

impl CongruenceCounter {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::pre("modulus q must be positive"));
        }
        if q > CONGRUENCE_LIMIT {
            return Err(Error::pre(format!("modulus q={q} exceeds {CONGRUENCE_LIMIT}")));
        }
        let dense = |k: u32| {
            let mut v = vec![0u64; q as usize];
            for (m, c) in power_spectrum(k, q) {
                v[m as usize] = c;
            }
            v
        };
        let (n2, n3, n6) = (dense(2), dense(3), dense(6));
        let narrow = |v: Vec<u128>| v.into_iter().map(|x| x as u64).collect::<Vec<u64>>();
        // pair convolutions are at most q^2 and the quadruple one at most q^4
        let squares = cyclic_convolve_exact(&n2, &n2)?;
        let cubes = narrow(cyclic_convolve_exact(&n3, &n3)?);
        let sixths = narrow(cyclic_convolve_exact(&n6, &n6)?);
        let rest = cyclic_convolve_exact(&cubes, &sixths)?;
        Ok(CongruenceCounter { q, squares, rest })
    }

    pub fn count(&self, n: i64) -> CongruenceCount {
        let q = self.q as usize;
        let r = n.rem_euclid(q as i64) as usize;
        let count = (0..q).map(|m| self.squares[m] * self.rest[(r + q - m) % q]).sum();
        CongruenceCount { q: self.q, n, count }
    }
}

/// `M_n(q)`.
pub fn congruence_count(q: u64, n: i64) -> Result<CongruenceCount> {
    Ok(CongruenceCounter::new(q)?.count(n))
}

/// `count / q^5` without losing the low digits of a 128-bit count.
pub fn normalized_count(count: u128, q: u64) -> f64 {
    let q5 = (q as u128).pow(5);
    (count / q5) as f64 + (count % q5) as f64 / q5 as f64
}

/// `p^(-5h) M_n(p^h)`.
pub fn local_density(p: u64, n: i64, h: u32) -> Result<f64> {
    if !is_prime(p) {
        return Err(Error::pre(format!("p={p} is not prime")));
    }
    let q = crate::arith::pow_checked(p, h)
        .filter(|&q| q <= CONGRUENCE_LIMIT)
        .ok_or_else(|| Error::pre(format!("{p}^{h} exceeds {CONGRUENCE_LIMIT}")))?;
    if h == 0 {
        return Err(Error::pre("exponent h must be positive"));
    }
    Ok(normalized_count(congruence_count(q, n)?.count, q))
}
