//! Exact integer convolution through number-theoretic transforms over several
//! NTT-friendly primes, recombined with Garner's algorithm.
//!
//! Before transforming, the largest possible output coefficient is bounded
//! from the inputs and enough moduli are chosen that their product exceeds
//! the bound, so every reconstructed coefficient is the true integer.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// `(prime, primitive root, log2 of the largest supported transform length)`.
const MODULI: [(u64, u64, u32); 4] = [
    (2_013_265_921, 31, 27),
    (1_811_939_329, 13, 26),
    (469_762_049, 3, 26),
    (167_772_161, 3, 25),
];

/// Largest supported linear-convolution output length.
pub const MAX_TRANSFORM_LEN: usize = 1 << 25;

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

fn transform(buf: &mut [u64], p: u64, g: u64, invert: bool) {
    let n = buf.len();
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod(g, (p - 1) / len as u64, p);
        if invert {
            w = inv_mod(w, p);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut t = 1u64;
        for _ in 0..half {
            twiddles.push(t);
            t = t * w % p;
        }
        for chunk in buf.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((u, v), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let x = *u;
                let y = *v * tw % p;
                *u = if x + y >= p { x + y - p } else { x + y };
                *v = if x >= y { x - y } else { x + p - y };
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = inv_mod(n as u64, p);
        for x in buf.iter_mut() {
            *x = *x * n_inv % p;
        }
    }
}

fn convolve_mod(a: &[u64], b: &[u64], size: usize, p: u64, g: u64) -> Vec<u64> {
    let mut fa = vec![0u64; size];
    let mut fb = vec![0u64; size];
    for (d, &s) in fa.iter_mut().zip(a) {
        *d = s % p;
    }
    for (d, &s) in fb.iter_mut().zip(b) {
        *d = s % p;
    }
    transform(&mut fa, p, g, false);
    transform(&mut fb, p, g, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % p;
    }
    transform(&mut fa, p, g, true);
    fa
}

/// Upper bound on every coefficient of `a * b`.
pub fn coefficient_bound(a: &[u64], b: &[u64]) -> u128 {
    let sum = |v: &[u64]| v.iter().map(|&x| x as u128).sum::<u128>();
    let max = |v: &[u64]| v.iter().copied().max().unwrap_or(0) as u128;
    sum(a).saturating_mul(max(b)).min(sum(b).saturating_mul(max(a)))
}

/// Number of moduli whose product exceeds `bound`, or `None` if even all of
/// them fall short.
fn moduli_needed(bound: u128) -> Option<usize> {
    let mut prod: u128 = 1;
    for (i, &(p, _, _)) in MODULI.iter().enumerate() {
        prod = prod.checked_mul(p as u128)?;
        if prod > bound {
            return Some(i + 1);
        }
    }
    None
}

/// Exact linear convolution `c[i] = sum_j a[j] b[i-j]`, truncated to
/// `out_len` coefficients (pass `a.len() + b.len() - 1` for the full result).
pub fn convolve_exact(a: &[u64], b: &[u64], out_len: usize) -> Result<Vec<u128>> {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return Ok(vec![0; out_len]);
    }
    // coefficients beyond out_len never feed the kept ones
    let a = &a[..a.len().min(out_len)];
    let b = &b[..b.len().min(out_len)];
    let full = a.len() + b.len() - 1;
    let size = full.next_power_of_two();
    if size > MAX_TRANSFORM_LEN {
        return Err(Error::Budget {
            what: "transform length",
            required: size as u128,
            limit: MAX_TRANSFORM_LEN as u128,
        });
    }
    let bound = coefficient_bound(a, b);
    let count = moduli_needed(bound).ok_or(Error::Budget {
        what: "modulus product for exact reconstruction",
        required: bound,
        limit: MODULI.iter().map(|m| m.0 as u128).product(),
    })?;
    let residues: Vec<Vec<u64>> = MODULI[..count]
        .par_iter()
        .map(|&(p, g, _)| convolve_mod(a, b, size, p, g))
        .collect();

    let mut inv = [[0u64; 4]; 4];
    for (j, row) in inv.iter_mut().enumerate().take(count) {
        for (l, cell) in row.iter_mut().enumerate().take(j) {
            *cell = inv_mod(MODULI[l].0 % MODULI[j].0, MODULI[j].0);
        }
    }
    let keep = out_len.min(full);
    let mut out: Vec<u128> =
        (0..keep).into_par_iter().map(|i| garner(&residues, &inv, i, count)).collect();
    out.resize(out_len, 0);
    Ok(out)
}

fn garner(residues: &[Vec<u64>], inv: &[[u64; 4]; 4], i: usize, count: usize) -> u128 {
    // mixed-radix digits: x = d0 + m0 (d1 + m1 (d2 + ...))
    let mut digits = [0u64; 4];
    for j in 0..count {
        let pj = MODULI[j].0;
        let mut v = residues[j][i] % pj;
        for (l, &dl) in digits.iter().enumerate().take(j) {
            v = (v + pj - dl % pj) % pj * inv[j][l] % pj;
        }
        digits[j] = v;
    }
    let mut x: u128 = 0;
    for j in (0..count).rev() {
        x = x * MODULI[j].0 as u128 + digits[j] as u128;
    }
    x
}

/// Cyclic convolution modulo `q` of two length-`q` arrays.
pub fn cyclic_convolve_exact(a: &[u64], b: &[u64]) -> Result<Vec<u128>> {
    let q = a.len();
    debug_assert_eq!(q, b.len());
    let lin = convolve_exact(a, b, 2 * q - 1)?;
    let mut out = vec![0u128; q];
    for (i, v) in lin.into_iter().enumerate() {
        out[i % q] += v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(a: &[u64], b: &[u64]) -> Vec<u128> {
        let mut out = vec![0u128; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x as u128 * y as u128;
            }
        }
        out
    }

    #[test]
    fn primitive_roots_generate_full_group() {
        for &(p, g, _) in &MODULI {
            // p - 1 = c 2^s with small odd c; g must not be a residue of any prime factor order
            let mut m = p - 1;
            let mut factors = vec![];
            let mut f = 2;
            while f * f <= m {
                if m % f == 0 {
                    factors.push(f);
                    while m % f == 0 {
                        m /= f;
                    }
                }
                f += 1;
            }
            if m > 1 {
                factors.push(m);
            }
            for f in factors {
                assert_ne!(pow_mod(g, (p - 1) / f, p), 1, "p={p} f={f}");
            }
        }
    }

    #[test]
    fn large_coefficients_need_several_moduli() {
        let a = vec![u32::MAX as u64; 300];
        let b = vec![u32::MAX as u64 - 7; 200];
        assert!(moduli_needed(coefficient_bound(&a, &b)).unwrap() >= 2);
        assert_eq!(convolve_exact(&a, &b, 499).unwrap(), naive(&a, &b));
    }

    #[test]
    fn truncation_and_cyclic() {
        let a = [1u64, 2, 3];
        let b = [4u64, 5, 6];
        assert_eq!(convolve_exact(&a, &b, 2).unwrap(), vec![4, 13]);
        // linear: 4 13 28 27 18 -> cyclic mod 3: 4+27, 13+18, 28
        assert_eq!(cyclic_convolve_exact(&a, &b).unwrap(), vec![31, 31, 28]);
    }

    #[test]
    fn overflow_is_rejected() {
        let a = vec![u64::MAX; 4];
        assert!(matches!(convolve_exact(&a, &a, 7), Err(Error::Budget { .. })));
    }

    proptest! {
        #[test]
        fn matches_schoolbook(a in prop::collection::vec(0u64..1_000_000, 1..200),
                              b in prop::collection::vec(0u64..1_000_000, 1..200)) {
            prop_assert_eq!(convolve_exact(&a, &b, a.len() + b.len() - 1).unwrap(), naive(&a, &b));
        }
    }
}
