//! Exact representation counts `R(n)` for
//! `n = x1^2 + x2^2 + x3^3 + x4^3 + x5^6 + x6^6` with every `xi >= 1`.
//!
//! Counts are of ordered tuples. Single targets use a windowed
//! meet-in-the-middle join; full ranges convolve the square-pair spectrum
//! with the spectrum of the remaining four variables, exactly.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{iroot, pow_checked};
use crate::error::{Error, Result};
use crate::ntt::convolve_exact;
use crate::residue::check_exponent;

/// Largest pair spectrum we allocate densely (entries).
pub const SPECTRUM_BUDGET: u64 = 200_000_000;

/// Largest target for [`rep_count_single`].
pub const SINGLE_LIMIT: u64 = 1_000_000_000;

/// Largest bound for [`rep_count_range`].
pub const RANGE_LIMIT: u64 = 10_000_000;

/// Below this bound [`rep_count_range`] accumulates directly instead of
/// transforming.
pub const DIRECT_RANGE_LIMIT: u64 = 20_000;

/// `c[m] = #{(x,y) in [1,P]^2 : x^k + y^k = m}` for `0 <= m <= 2 P^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSpectrum {
    pub k: u32,
    pub p: u64,
    pub counts: Vec<u32>,
}

impl PairSpectrum {
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn get(&self, m: u64) -> u32 {
        self.counts.get(m as usize).copied().unwrap_or(0)
    }
}

/// Exact `R(n)` for `1 <= n <= X`; index 0 is unused and zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RangeCounts {
    pub x: u64,
    pub values: Vec<u32>,
}

impl RangeCounts {
    pub fn get(&self, n: u64) -> u32 {
        self.values[n as usize]
    }
}

/// Every value `x^k + y^k` must fit below this, so index arithmetic stays in u64.
fn pair_len(k: u32, p: u64) -> Result<u64> {
    let top = pow_checked(p, k).and_then(|v| v.checked_mul(2)).ok_or(Error::Budget {
        what: "pair spectrum entries",
        required: u128::MAX,
        limit: SPECTRUM_BUDGET as u128,
    })?;
    let len = top + 1;
    if len > SPECTRUM_BUDGET {
        return Err(Error::Budget {
            what: "pair spectrum entries",
            required: len as u128,
            limit: SPECTRUM_BUDGET as u128,
        });
    }
    Ok(len)
}

/// Dense pair spectrum, built in parallel over disjoint value ranges.
pub fn pair_spectrum(k: u32, p: u64) -> Result<PairSpectrum> {
    check_exponent(k)?;
    if p == 0 {
        return Err(Error::pre("range bound P must be positive"));
    }
    let len = pair_len(k, p)?;
    let powers: Vec<u64> = (1..=p).map(|x| x.pow(k)).collect();
    let mut counts = vec![0u32; len as usize];
    const CHUNK: usize = 1 << 16;
    counts.par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let lo = (ci * CHUNK) as u64;
        let hi = lo + chunk.len() as u64;
        for &xk in &powers {
            if xk + 1 >= hi {
                break;
            }
            // y^k in [lo - x^k, hi - x^k)
            let start = powers.partition_point(|&yk| xk + yk < lo);
            for &yk in &powers[start..] {
                let v = xk + yk;
                if v >= hi {
                    break;
                }
                chunk[(v - lo) as usize] += 1;
            }
        }
    });
    Ok(PairSpectrum { k, p, counts })
}

/// Sorted list of `x^k + y^k <= limit` over ordered pairs, with repeats.
fn pair_sums_up_to(k: u32, limit: u64) -> Vec<u64> {
    let p = iroot(limit, k);
    let powers: Vec<u64> = (1..=p).map(|x| x.pow(k)).collect();
    let mut out = Vec::new();
    for &a in &powers {
        for &b in &powers {
            if a + b > limit {
                break;
            }
            out.push(a + b);
        }
    }
    out.sort_unstable();
    out
}

/// Exact `R(n)` for a single target.
///
/// The square-pair counts are rebuilt one residual window at a time, and for
/// each window every sixth-power pair selects, by binary search, the run of
/// cube-pair sums whose residual lands in the window.
pub fn rep_count_single(n: u64) -> Result<u64> {
    if n < 1 {
        return Err(Error::pre("target n must be at least 1"));
    }
    if n > SINGLE_LIMIT {
        return Err(Error::Budget {
            what: "single-target meet-in-the-middle",
            required: n as u128,
            limit: SINGLE_LIMIT as u128,
        });
    }
    if n < 6 {
        return Ok(0);
    }
    let cubes = pair_sums_up_to(3, n - 4);
    let sixths = pair_sums_up_to(6, n - 4);
    let p2 = iroot(n, 2);
    let squares: Vec<u64> = (1..=p2).map(|x| x * x).collect();

    const WINDOW: u64 = 1 << 22;
    let windows: Vec<u64> = (2..=n - 4).step_by(WINDOW as usize).collect();
    let total = windows
        .par_iter()
        .map(|&lo| {
            let hi = (lo + WINDOW).min(n - 3);
            let mut r22 = vec![0u32; (hi - lo) as usize];
            for &a in &squares {
                if a + 1 >= hi {
                    break;
                }
                let start = squares.partition_point(|&b| a + b < lo);
                for &b in &squares[start..] {
                    if a + b >= hi {
                        break;
                    }
                    r22[(a + b - lo) as usize] += 1;
                }
            }
            let mut acc = 0u64;
            for &s in &sixths {
                // residual m = n - s - c must lie in [lo, hi)
                let Some(top) = n.checked_sub(s + lo) else { break };
                let bottom = (n - s).saturating_sub(hi - 1);
                let from = cubes.partition_point(|&c| c < bottom);
                let to = cubes.partition_point(|&c| c <= top);
                for &c in &cubes[from..to] {
                    acc += r22[(n - s - c - lo) as usize] as u64;
                }
            }
            acc
        })
        .sum();
    Ok(total)
}

/// `g(m) = #{(x3,x4,x5,x6) : x3^3+x4^3+x5^6+x6^6 = m}` over
/// `1 <= x3,x4 <= P3`, `1 <= x5,x6 <= P6`, for every `m` up to the maximum
/// `2 P3^3 + 2 P6^6`.
pub fn quadruple_spectrum(x: u64) -> Result<Vec<u32>> {
    let cubes = pair_spectrum(3, iroot(x, 3))?;
    let sixths = pair_spectrum(6, iroot(x, 6))?;
    let len = cubes.counts.len() + sixths.counts.len() - 1;
    if len as u64 > 2 * SPECTRUM_BUDGET {
        return Err(Error::Budget {
            what: "quadruple spectrum entries",
            required: len as u128,
            limit: 2 * SPECTRUM_BUDGET as u128,
        });
    }
    let six: Vec<(usize, u32)> =
        sixths.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(m, &c)| (m, c)).collect();
    let mut g = vec![0u32; len];
    for (c, &cc) in cubes.counts.iter().enumerate() {
        if cc == 0 {
            continue;
        }
        for &(s, sc) in &six {
            g[c + s] += cc * sc;
        }
    }
    Ok(g)
}

/// `R(n)` for every `n <= X`.
pub fn rep_count_range(x: u64) -> Result<RangeCounts> {
    let squares = pair_spectrum(2, iroot(x.max(1), 2))?;
    rep_count_range_with_squares(x, &squares)
}

/// As [`rep_count_range`], reusing a square-pair spectrum (e.g. from a cache).
pub fn rep_count_range_with_squares(x: u64, squares: &PairSpectrum) -> Result<RangeCounts> {
    if x == 0 {
        return Err(Error::pre("range bound X must be positive"));
    }
    if x > RANGE_LIMIT {
        return Err(Error::Budget {
            what: "range count bound",
            required: x as u128,
            limit: RANGE_LIMIT as u128,
        });
    }
    if squares.k != 2 || squares.p != iroot(x, 2) {
        return Err(Error::pre(format!(
            "square spectrum (k={}, P={}) does not match X={x}",
            squares.k, squares.p
        )));
    }
    let len = x as usize + 1;
    let g = quadruple_spectrum(x)?;
    let g: Vec<u64> = g.into_iter().take(len).map(u64::from).collect();
    let r22: Vec<u64> = squares.counts.iter().take(len).map(|&c| c as u64).collect();

    let raw: Vec<u128> = if x <= DIRECT_RANGE_LIMIT {
        direct_convolve(&r22, &g, len)
    } else {
        convolve_exact(&r22, &g, len)?
    };
    let mut values = Vec::with_capacity(len);
    for (n, v) in raw.into_iter().enumerate() {
        values.push(u32::try_from(v).map_err(|_| Error::Budget {
            what: "32-bit count storage",
            required: v,
            limit: u32::MAX as u128,
        })?);
        debug_assert!(n >= 6 || values[n] == 0);
    }
    Ok(RangeCounts { x, values })
}

fn direct_convolve(a: &[u64], b: &[u64], len: usize) -> Vec<u128> {
    let support: Vec<(usize, u64)> =
        a.iter().enumerate().filter(|(_, &v)| v > 0).map(|(i, &v)| (i, v)).collect();
    let mut out = vec![0u128; len];
    for (i, va) in support {
        for (j, &vb) in b.iter().enumerate().take(len - i) {
            out[i + j] += (va * vb) as u128;
        }
    }
    out
}
