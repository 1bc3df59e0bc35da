//! Exact solution counts for the mean values behind the argument: the
//! sixth-power pair equation `I2`, the mixed equation
//! `x1^3 - x2^3 = y1^6 + y2^6 - y3^6 - y4^6` (`I1`), the eighth moment of the
//! sixth-power Weyl sum, the set of cube differences with several
//! representations, and the correlation count against a sample set `Z`.
//!
//! Joins use dense arrays when the value range is at most
//! [`DENSE_RANGE_LIMIT`] and sort-merge on integer values otherwise.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::iroot;
use crate::error::{Error, Result};
use crate::reps::pair_spectrum;

pub const DENSE_RANGE_LIMIT: u64 = 100_000_000;
pub const I2_LIMIT: u64 = 3000;
pub const I1_LIMIT: u64 = 100_000_000;
pub const HUA_LIMIT: u64 = 200;
pub const CUBE_LIMIT: u64 = 10_000;
pub const L52_SAMPLE_LIMIT: usize = 100_000;

/// Items materialized per chunk by the chunked run counters.
const CHUNK_ITEMS: u64 = 1 << 23;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MomentLabel {
    I1,
    I2,
    Hua8,
    L52,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentCount {
    pub label: MomentLabel,
    /// Named parameters, e.g. `("P6", 100)`.
    pub params: Vec<(String, u64)>,
    pub count: u128,
    /// Labelled parts summing to `count`, where the count has a natural split.
    pub parts: Vec<(String, u128)>,
}

impl MomentCount {
    pub fn part(&self, name: &str) -> Option<u128> {
        self.parts.iter().find(|p| p.0 == name).map(|p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicitySet {
    pub p3: u64,
    /// Nonzero `m` with at least two representations `x1^3 - x2^3`, increasing.
    pub members: Vec<i64>,
    /// Largest number of representations of any nonzero difference.
    pub max_multiplicity: u64,
}

fn budget(what: &'static str, required: u64, limit: u64) -> Error {
    Error::Budget { what, required: required as u128, limit: limit as u128 }
}

/// Sum of squared run lengths of a multiset.
fn sum_squared_runs<T: Ord + Copy + Send>(mut v: Vec<T>) -> u128 {
    v.par_sort_unstable();
    let mut total = 0u128;
    let mut i = 0;
    while i < v.len() {
        let mut j = i + 1;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        let r = (j - i) as u128;
        total += r * r;
        i = j;
    }
    total
}

/// Streams a weighted multiset chunk by chunk over value ranges `[lo, hi)`,
/// calling `on_run(value, total_weight)` for each distinct value in order.
///
/// `count_in(lo, hi)` bounds how many items `fill(lo, hi, buf)` will push.
fn chunked_runs<C, G, F>(max_value: u64, count_in: C, fill: G, mut on_run: F)
where
    C: Fn(u64, u64) -> u64,
    G: Fn(u64, u64, &mut Vec<(u64, u64)>),
    F: FnMut(u64, u64),
{
    let end = max_value + 1;
    let mut lo = 0u64;
    let mut buf = Vec::new();
    while lo < end {
        // grow the window geometrically, then bisect back under the item target
        let mut step = 1u64;
        while lo + step < end && count_in(lo, lo + 2 * step) <= CHUNK_ITEMS {
            step *= 2;
        }
        let mut hi = (lo + step).min(end);
        if hi < end {
            let (mut good, mut bad) = (hi, (lo + 2 * step).min(end));
            while bad - good > 1 {
                let mid = good + (bad - good) / 2;
                if count_in(lo, mid) <= CHUNK_ITEMS {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            hi = good;
        }
        buf.clear();
        fill(lo, hi, &mut buf);
        buf.par_sort_unstable_by_key(|e| e.0);
        let mut i = 0;
        while i < buf.len() {
            let v = buf[i].0;
            let mut w = 0u64;
            while i < buf.len() && buf[i].0 == v {
                w += buf[i].1;
                i += 1;
            }
            on_run(v, w);
        }
        lo = hi;
    }
}

/// `#{y in [1,P6]^4 : y1^6 + y2^6 = y3^6 + y4^6}`.
pub fn count_i2(p6: u64) -> Result<MomentCount> {
    if p6 == 0 {
        return Err(Error::pre("P6 must be positive"));
    }
    if p6 > I2_LIMIT {
        return Err(budget("I2 bound P6", p6, I2_LIMIT));
    }
    let count = if 2 * p6.pow(6) < DENSE_RANGE_LIMIT {
        let s = pair_spectrum(6, p6)?;
        s.counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
    } else {
        i2_sort_merge(p6)
    };
    Ok(MomentCount {
        label: MomentLabel::I2,
        params: vec![("P6".into(), p6)],
        count,
        parts: vec![],
    })
}

fn i2_sort_merge(p6: u64) -> u128 {
    let powers: Vec<u128> = (1..=p6 as u128).map(|y| y.pow(6)).collect();
    let sums: Vec<u128> = powers.iter().flat_map(|&a| powers.iter().map(move |&b| a + b)).collect();
    sum_squared_runs(sums)
}

/// Sorted `(value, multiplicity)` list of `y1^6 + y2^6 - y3^6 - y4^6`.
fn rho_spectrum(p6: u64) -> Vec<(i64, u64)> {
    let powers: Vec<i64> = (1..=p6 as i64).map(|y| y.pow(6)).collect();
    let mut pairs: Vec<i64> = powers.iter().flat_map(|&a| powers.iter().map(move |&b| a + b)).collect();
    pairs.sort_unstable();
    let runs = to_runs(&pairs);
    let mut weights: HashMap<i64, u64> = HashMap::new();
    for &(a, wa) in &runs {
        for &(b, wb) in &runs {
            *weights.entry(a - b).or_default() += wa * wb;
        }
    }
    let mut out: Vec<(i64, u64)> = weights.into_iter().collect();
    out.sort_unstable();
    out
}

fn to_runs(sorted: &[i64]) -> Vec<(i64, u64)> {
    let mut out: Vec<(i64, u64)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((last, c)) if *last == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// Sorted `(m, representations)` for `m = x1^3 - x2^3`, `1 <= xi <= P3`.
fn cube_difference_spectrum(p3: u64) -> Vec<(i64, u64)> {
    let cubes: Vec<i64> = (1..=p3 as i64).map(|x| x.pow(3)).collect();
    let mut diffs: Vec<i64> = cubes.iter().flat_map(|&a| cubes.iter().map(move |&b| a - b)).collect();
    diffs.sort_unstable();
    to_runs(&diffs)
}

/// Solutions of `x1^3 - x2^3 = y1^6 + y2^6 - y3^6 - y4^6` with
/// `1 <= x <= floor(X^(1/3))`, `1 <= y <= floor(X^(1/6))`.
///
/// Parts: `diagonal` (`x1 = x2`, equal to `P3 * I2`), `unique` (the cube
/// difference has one representation) and `multiple` (it lies in the set of
/// differences with two or more).
pub fn count_i1(x: u64) -> Result<MomentCount> {
    if x == 0 {
        return Err(Error::pre("X must be positive"));
    }
    if x > I1_LIMIT {
        return Err(budget("I1 bound X", x, I1_LIMIT));
    }
    let p3 = iroot(x, 3);
    let p6 = iroot(x, 6);
    let rho = rho_spectrum(p6);
    let cubes = cube_difference_spectrum(p3);
    let (mut diagonal, mut unique, mut multiple) = (0u128, 0u128, 0u128);
    let (mut i, mut j) = (0, 0);
    while i < cubes.len() && j < rho.len() {
        match cubes[i].0.cmp(&rho[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let (m, reps) = cubes[i];
                let contrib = reps as u128 * rho[j].1 as u128;
                if m == 0 {
                    diagonal += contrib;
                } else if reps == 1 {
                    unique += contrib;
                } else {
                    multiple += contrib;
                }
                i += 1;
                j += 1;
            }
        }
    }
    Ok(MomentCount {
        label: MomentLabel::I1,
        params: vec![("X".into(), x), ("P3".into(), p3), ("P6".into(), p6)],
        count: diagonal + unique + multiple,
        parts: vec![
            ("diagonal".into(), diagonal),
            ("unique".into(), unique),
            ("multiple".into(), multiple),
        ],
    })
}

/// `#{y in [1,P6]^8 : y1^6+...+y4^6 = y5^6+...+y8^6}`.
pub fn hua_moment8(p6: u64) -> Result<MomentCount> {
    if p6 == 0 {
        return Err(Error::pre("P6 must be positive"));
    }
    if p6 > HUA_LIMIT {
        return Err(budget("eighth moment bound P6", p6, HUA_LIMIT));
    }
    let max_value = 4 * p6.pow(6);
    let count = if max_value < DENSE_RANGE_LIMIT {
        let pair = pair_spectrum(6, p6)?;
        let support: Vec<(usize, u64)> =
            pair.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(m, &c)| (m, c as u64)).collect();
        let mut quad = vec![0u64; max_value as usize + 1];
        for &(a, wa) in &support {
            for &(b, wb) in &support {
                quad[a + b] += wa * wb;
            }
        }
        quad.iter().map(|&c| (c as u128) * (c as u128)).sum()
    } else {
        hua_chunked(p6)
    };
    Ok(MomentCount {
        label: MomentLabel::Hua8,
        params: vec![("P6".into(), p6)],
        count,
        parts: vec![],
    })
}

fn hua_chunked(p6: u64) -> u128 {
    let powers: Vec<u64> = (1..=p6).map(|y| y.pow(6)).collect();
    let mut pairs: Vec<i64> =
        powers.iter().flat_map(|&a| powers.iter().map(move |&b| (a + b) as i64)).collect();
    pairs.sort_unstable();
    let runs: Vec<(u64, u64)> = to_runs(&pairs).into_iter().map(|(v, w)| (v as u64, w)).collect();
    let values: Vec<u64> = runs.iter().map(|r| r.0).collect();
    let count_in = |lo: u64, hi: u64| -> u64 {
        runs.iter()
            .map(|&(a, _)| {
                let from = values.partition_point(|&b| a + b < lo);
                let to = values.partition_point(|&b| a + b < hi);
                (to - from) as u64
            })
            .sum()
    };
    let fill = |lo: u64, hi: u64, buf: &mut Vec<(u64, u64)>| {
        for &(a, wa) in &runs {
            let from = values.partition_point(|&b| a + b < lo);
            let to = values.partition_point(|&b| a + b < hi);
            buf.extend(runs[from..to].iter().map(|&(b, wb)| (a + b, wa * wb)));
        }
    };
    let mut total = 0u128;
    chunked_runs(4 * p6.pow(6), count_in, fill, |_, w| total += (w as u128) * (w as u128));
    total
}

/// The set of nonzero cube differences with at least two representations.
pub fn cube_multiplicity(p3: u64) -> Result<MultiplicitySet> {
    if p3 == 0 {
        return Err(Error::pre("P3 must be positive"));
    }
    if p3 > CUBE_LIMIT {
        return Err(budget("cube difference bound P3", p3, CUBE_LIMIT));
    }
    let cubes: Vec<u64> = (1..=p3).map(|x| x.pow(3)).collect();
    // positive differences x1^3 - x2^3 with x1 > x2; negatives mirror them
    let x1_range = |x2: usize, lo: u64, hi: u64| -> (usize, usize) {
        let base = cubes[x2];
        let from = cubes.partition_point(|&c| c < base + lo).max(x2 + 1);
        let to = cubes.partition_point(|&c| c < base + hi).max(from);
        (from, to)
    };
    let count_in = |lo: u64, hi: u64| -> u64 {
        (0..cubes.len()).map(|x2| {
            let (f, t) = x1_range(x2, lo, hi);
            (t - f) as u64
        }).sum()
    };
    let fill = |lo: u64, hi: u64, buf: &mut Vec<(u64, u64)>| {
        for x2 in 0..cubes.len() {
            let (f, t) = x1_range(x2, lo, hi);
            buf.extend(cubes[f..t].iter().map(|&c| (c - cubes[x2], 1)));
        }
    };
    let mut positive = Vec::new();
    let mut max_multiplicity = if p3 >= 2 { 1 } else { 0 };
    chunked_runs(p3.pow(3), count_in, fill, |m, w| {
        if w >= 2 {
            positive.push(m as i64);
        }
        max_multiplicity = max_multiplicity.max(w);
    });
    let mut members: Vec<i64> = positive.iter().rev().map(|&m| -m).collect();
    members.extend_from_slice(&positive);
    Ok(MultiplicitySet { p3, members, max_multiplicity })
}

/// Counts `(x1, x2, n1, n2) in [1,P3]^2 x Z^2` with `x1^3 + n1 = x2^3 + n2`.
///
/// Parts: `diagonal` (`n1 = n2`, forcing `x1 = x2`; always `P3 |Z|`) and
/// `off_diagonal`.
pub fn correlation_l52(p3: u64, z: &[u64]) -> Result<MomentCount> {
    if p3 == 0 {
        return Err(Error::pre("P3 must be positive"));
    }
    if p3 > CUBE_LIMIT {
        return Err(budget("correlation bound P3", p3, CUBE_LIMIT));
    }
    if z.len() > L52_SAMPLE_LIMIT {
        return Err(budget("sample size |Z|", z.len() as u64, L52_SAMPLE_LIMIT as u64));
    }
    let mut sorted = z.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::pre("sample set Z contains duplicate entries"));
    }
    // positive cube differences d = x1^3 - x2^3 with their multiplicities
    let positive: Vec<(u64, u64)> = cube_difference_spectrum(p3)
        .into_iter()
        .filter(|&(m, _)| m > 0)
        .map(|(m, c)| (m as u64, c))
        .collect();
    let zlen = sorted.len() as u64;
    let half_off: u128 = if zlen * zlen / 2 <= zlen * positive.len() as u64 {
        let reps: HashMap<u64, u64> = positive.iter().copied().collect();
        sorted
            .par_iter()
            .enumerate()
            .map(|(i, &n1)| {
                sorted[i + 1..].iter().map(|&n2| reps.get(&(n2 - n1)).copied().unwrap_or(0) as u128).sum::<u128>()
            })
            .sum()
    } else {
        let members: HashSet<u64> = sorted.iter().copied().collect();
        sorted
            .par_iter()
            .map(|&n1| {
                positive
                    .iter()
                    .filter(|&&(d, _)| members.contains(&(n1 + d)))
                    .map(|&(_, c)| c as u128)
                    .sum::<u128>()
            })
            .sum()
    };
    let diagonal = p3 as u128 * zlen as u128;
    let off_diagonal = 2 * half_off;
    Ok(MomentCount {
        label: MomentLabel::L52,
        params: vec![("P3".into(), p3), ("Z".into(), zlen)],
        count: diagonal + off_diagonal,
        parts: vec![("diagonal".into(), diagonal), ("off_diagonal".into(), off_diagonal)],
    })
}

/// Least-squares slope of `log2(value)` against `log2(param)`, for each
/// consecutive pair of points.
pub fn log2_slopes(points: &[(f64, f64)]) -> Vec<f64> {
    points
        .windows(2)
        .map(|w| (w[1].1.log2() - w[0].1.log2()) / (w[1].0.log2() - w[0].0.log2()))
        .collect()
}
