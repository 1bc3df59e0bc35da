//! Arc dissection of the unit interval.
//!
//! `M(q,a) = {alpha : |q alpha - a| <= Q/X}` with `q <= Q`, the union `M(Q)`,
//! the annulus `N(Q) = M(Q) \ M(Q/2)`, the peak arcs
//! `P(q,a) = {alpha : |alpha - a/q| <= W/X}` with `q <= W`, and the complement
//! of the peak arcs. Overlaps are resolved by taking the least `q`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::weyl::{weyl_sum, Alpha};
use crate::arith::{gcd, iroot};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ArcKind {
    /// In `M(Q/2)`.
    Major,
    /// In `N(Q) = M(Q) \ M(Q/2)`.
    Annulus,
    /// Outside `M(Q)` but inside a peak arc.
    Peak,
    /// Outside `M(Q)` and every peak arc.
    Minor,
}

/// Position of a point in the dissection at level `Q` and scale `X`.
///
/// For `Major` and `Annulus`, `(q,a)` is the least-`q` arc of `M(Q)`
/// containing the point. For `Peak` it is the peak arc. For `Minor` it is
/// the best approximation with denominator at most `Q`. `peak` records
/// peak-arc membership independently of `kind`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArcLabel {
    pub q: u64,
    pub a: u64,
    pub kind: ArcKind,
    pub level: f64,
    pub scale: u64,
    pub peak: Option<(u64, u64)>,
}

/// `W = ceil(X^{1/10})`, the default peak-arc parameter.
pub fn default_w(x: u64) -> u64 {
    let w = iroot(x, 10);
    if crate::arith::pow_checked(w, 10) == Some(x) {
        w.max(1)
    } else {
        w + 1
    }
}

/// `alpha` as an exact fraction `num/den`.
fn exact(alpha: Alpha) -> (u128, u128) {
    match alpha {
        Alpha::Rational { num, den } => (num as u128, den as u128),
        Alpha::Real(x) => {
            if x == 0.0 {
                return (0, 1);
            }
            let bits = x.to_bits();
            let exp = ((bits >> 52) & 0x7ff) as i32;
            let mut mant = (bits & ((1u64 << 52) - 1)) | if exp == 0 { 0 } else { 1u64 << 52 };
            let mut shift = if exp == 0 { 1074 } else { 1075 - exp };
            let tz = mant.trailing_zeros() as i32;
            mant >>= tz;
            shift -= tz;
            if shift > 120 {
                // below 2^-67: indistinguishable from 0 at any admissible scale
                return (0, 1);
            }
            (mant as u128, 1u128 << shift)
        }
    }
}

/// `|q alpha - a| * X <= level`, evaluated on the exact fraction.
fn within(num: u128, den: u128, q: u128, a: u128, level: f64, x: u64) -> bool {
    let qn = q * num;
    let ad = a * den;
    let r = qn.abs_diff(ad);
    r as f64 * x as f64 <= level * den as f64
}

/// Nearest integer to `q * num / den`.
fn nearest(num: u128, den: u128, q: u128) -> u128 {
    let t = q * num;
    (t + den / 2) / den
}

/// Least `q <= level` with `||q alpha|| <= level / X`, via convergents.
fn least_q(num: u128, den: u128, level: f64, x: u64) -> Option<(u64, u64)> {
    if level < 1.0 {
        return None;
    }
    let a1 = nearest(num, den, 1);
    if within(num, den, 1, a1, level, x) {
        return Some((1, 0));
    }
    // convergents h/k of num/den
    let (mut h0, mut k0, mut h1, mut k1) = (0u128, 1u128, 1u128, 0u128);
    let (mut n, mut d) = (num, den);
    // the first partial quotient of alpha in [0,1) is zero
    let mut first = true;
    while d != 0 {
        let c = n / d;
        (n, d) = (d, n - c * d);
        let h2 = c * h1 + h0;
        let k2 = c * k1 + k0;
        (h0, k0, h1, k1) = (h1, k1, h2, k2);
        if first {
            first = false;
            continue;
        }
        if k1 as f64 > level {
            return None;
        }
        if k1 > 1 && within(num, den, k1, h1, level, x) {
            return Some((k1 as u64, (h1 % k1) as u64));
        }
    }
    None
}

/// Least `q <= level` by exhaustive search; reference for [`least_q`].
pub fn least_q_brute(alpha: Alpha, level: f64, x: u64) -> Option<(u64, u64)> {
    let (num, den) = exact(alpha);
    let mut q = 1u64;
    while q as f64 <= level {
        let a = nearest(num, den, q as u128);
        if within(num, den, q as u128, a, level, x) && gcd(a as u64 % q, q) == 1 {
            return Some((q, (a % q as u128) as u64));
        }
        q += 1;
    }
    None
}

/// Least-`q` peak arc containing `alpha`, if any.
fn peak_arc(num: u128, den: u128, w: u64, x: u64) -> Option<(u64, u64)> {
    (1..=w).find_map(|q| {
        let a = nearest(num, den, q as u128);
        // |alpha - a/q| <= W/X  <=>  |q alpha - a| X <= q W
        (within(num, den, q as u128, a, (q * w) as f64, x) && gcd((a % q as u128) as u64, q) == 1)
            .then_some((q, (a % q as u128) as u64))
    })
}

/// Best approximation `a/q` with `q <= level`.
fn best_approx(num: u128, den: u128, level: f64) -> (u64, u64) {
    let (mut h0, mut k0, mut h1, mut k1) = (0u128, 1u128, 1u128, 0u128);
    let (mut n, mut d) = (num, den);
    let mut best = (1u64, 0u64);
    let mut first = true;
    while d != 0 {
        let c = n / d;
        (n, d) = (d, n - c * d);
        let h2 = c * h1 + h0;
        let k2 = c * k1 + k0;
        (h0, k0, h1, k1) = (h1, k1, h2, k2);
        if first {
            first = false;
            continue;
        }
        if k1 as f64 > level {
            break;
        }
        best = (k1 as u64, (h1 % k1) as u64);
    }
    best
}

fn check_level(level: f64, x: u64) -> Result<()> {
    if x == 0 {
        return Err(Error::pre("scale X must be positive"));
    }
    if !(level >= 1.0 && level <= 2.0 * (x as f64).sqrt()) {
        return Err(Error::pre(format!("level Q={level} must satisfy 1 <= Q <= 2 X^(1/2) with X={x}")));
    }
    Ok(())
}

/// Labels `alpha` at level `Q`, scale `X` and peak parameter `W`.
pub fn classify_arc(alpha: Alpha, level: f64, x: u64, w: u64) -> Result<ArcLabel> {
    alpha.validate()?;
    check_level(level, x)?;
    if w == 0 {
        return Err(Error::pre("peak parameter W must be positive"));
    }
    let (num, den) = exact(alpha);
    let peak = peak_arc(num, den, w, x);
    let (q, a, kind) = match least_q(num, den, level, x) {
        Some((q, a)) => {
            let inner = least_q(num, den, level / 2.0, x).is_some();
            (q, a, if inner { ArcKind::Major } else { ArcKind::Annulus })
        }
        None => match peak {
            Some((q, a)) => (q, a, ArcKind::Peak),
            None => {
                let (q, a) = best_approx(num, den, level);
                (q, a, ArcKind::Minor)
            }
        },
    };
    Ok(ArcLabel { q, a, kind, level, scale: x, peak })
}

/// A maximal interval of `[0,1)` on which the label is constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub q: u64,
    pub a: u64,
}

impl Segment {
    /// `alpha - a/q` reduced to the nearest representative.
    pub fn beta(&self, alpha: f64) -> f64 {
        let d = alpha - self.a as f64 / self.q as f64;
        d - d.round()
    }
}

fn coprime_fractions(q_max: u64) -> Vec<(u64, u64)> {
    let mut out = vec![(1, 0)];
    for q in 2..=q_max {
        out.extend((1..q).filter(|&a| gcd(a, q) == 1).map(|a| (q, a)));
    }
    out
}

/// Cuts `[0,1)` at every endpoint, labels each piece by its midpoint and
/// keeps the pieces where `label` returns a fraction, merging neighbours.
fn sweep<F>(arcs: &[(f64, f64)], label: F) -> Vec<Segment>
where
    F: Fn(f64) -> Option<(u64, u64)> + Sync,
{
    let mut cuts = vec![0.0, 1.0];
    for &(c, r) in arcs {
        for t in [c - r, c + r] {
            let t = t.rem_euclid(1.0);
            cuts.push(t);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces: Vec<Option<Segment>> = cuts
        .par_windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                return None;
            }
            label(0.5 * (lo + hi)).map(|(q, a)| Segment { lo, hi, q, a })
        })
        .collect();
    let mut out: Vec<Segment> = Vec::new();
    for s in pieces.into_iter().flatten() {
        match out.last_mut() {
            Some(l) if l.hi == s.lo && (l.q, l.a) == (s.q, s.a) => l.hi = s.hi,
            _ => out.push(s),
        }
    }
    out
}

/// The annulus `N(Q)` as labelled segments.
pub fn annulus_segments(level: f64, x: u64) -> Result<Vec<Segment>> {
    check_level(level, x)?;
    let fr = coprime_fractions(level.floor() as u64);
    let half = level / 2.0;
    let mut arcs: Vec<(f64, f64)> = fr
        .iter()
        .map(|&(q, a)| (a as f64 / q as f64, level / (q as f64 * x as f64)))
        .collect();
    arcs.extend(
        fr.iter()
            .filter(|&&(q, _)| q as f64 <= half)
            .map(|&(q, a)| (a as f64 / q as f64, half / (q as f64 * x as f64))),
    );
    Ok(sweep(&arcs, |m| {
        let (num, den) = exact(Alpha::Real(m));
        let outer = least_q(num, den, level, x)?;
        least_q(num, den, half, x).is_none().then_some(outer)
    }))
}

/// The peak arcs `P` as labelled segments.
pub fn peak_segments(w: u64, x: u64) -> Result<Vec<Segment>> {
    if w == 0 || x == 0 {
        return Err(Error::pre("W and X must be positive"));
    }
    let fr = coprime_fractions(w);
    let r = w as f64 / x as f64;
    if 2.0 * r >= 1.0 {
        return Err(Error::pre(format!("peak arcs with W={w} cover the whole circle at X={x}")));
    }
    let arcs: Vec<(f64, f64)> = fr.iter().map(|&(q, a)| (a as f64 / q as f64, r)).collect();
    Ok(sweep(&arcs, |m| {
        let (num, den) = exact(Alpha::Real(m));
        peak_arc(num, den, w, x)
    }))
}

/// `f~_2(alpha) = P_2 (q + P_2^2 |q alpha - a|)^{-1/2}` on the arc `(q,a)`.
pub fn peak_majorant(alpha: f64, q: u64, a: u64, p2: u64) -> f64 {
    let d = q as f64 * alpha - a as f64;
    let d = (d - d.round()).abs();
    let p = p2 as f64;
    p / (q as f64 + p * p * d).sqrt()
}

/// Sup of `|f_2| / f~_2` over a sampled grid of `N(Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MajorantSurvey {
    pub level: f64,
    pub scale: u64,
    pub points: usize,
    pub ratio: f64,
    pub alpha: f64,
    pub q: u64,
    pub a: u64,
}

pub fn peak_majorant_survey(level: f64, x: u64, per_segment: usize) -> Result<MajorantSurvey> {
    let p2 = iroot(x, 2);
    let segs = annulus_segments(level, x)?;
    let best = segs
        .par_iter()
        .map(|s| {
            let mut best = (0.0f64, 0.0f64, 0usize);
            for i in 0..per_segment {
                let t = (i as f64 + 0.5) / per_segment as f64;
                let alpha = s.lo + t * (s.hi - s.lo);
                let f = weyl_sum(2, p2, Alpha::Real(alpha)).map(|z: Complex64| z.norm()).unwrap_or(0.0);
                let r = f / peak_majorant(alpha, s.q, s.a, p2);
                best.2 += 1;
                if r > best.0 {
                    best = (r, alpha, best.2);
                }
            }
            (best.0, best.1, best.2, s.q, s.a)
        })
        .collect::<Vec<_>>();
    let points = best.iter().map(|b| b.2).sum();
    let top = best
        .iter()
        .copied()
        .fold((0.0, 0.0, 0, 1, 0), |acc, b| if b.0 > acc.0 { b } else { acc });
    Ok(MajorantSurvey { level, scale: x, points, ratio: top.0, alpha: top.1, q: top.3, a: top.4 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        let l = classify_arc(Alpha::Real(0.0), 4.0, 100, 2).unwrap();
        assert_eq!((l.q, l.a, l.kind), (1, 0, ArcKind::Major));
        let l = classify_arc(Alpha::Real(0.5), 2.0, 100, 2).unwrap();
        assert_eq!((l.q, l.a), (2, 1));
        assert_eq!(l.kind, ArcKind::Annulus);
        let l = classify_arc(Alpha::Rational { num: 2, den: 4 }, 8.0, 100, 1).unwrap();
        assert_eq!((l.q, l.a, l.kind), (2, 1, ArcKind::Major));
        assert!(classify_arc(Alpha::Real(0.3), 0.5, 100, 1).is_err());
        assert!(classify_arc(Alpha::Real(0.3), 21.0, 100, 1).is_err());
    }

    #[test]
    fn convergents_agree_with_exhaustive_search() {
        for (level, x) in [(3.0, 100u64), (10.0, 1000), (37.5, 10_000), (100.0, 10_000)] {
            for i in 0..20_000u64 {
                let alpha = Alpha::Real(i as f64 / 20_000.0 + 1.234e-7);
                let (num, den) = exact(alpha);
                assert_eq!(least_q(num, den, level, x), least_q_brute(alpha, level, x), "{alpha:?} Q={level}");
            }
            for den in 1..60u64 {
                for num in 0..den {
                    let alpha = Alpha::Rational { num, den };
                    let (n, d) = exact(alpha);
                    assert_eq!(least_q(n, d, level, x), least_q_brute(alpha, level, x));
                }
            }
        }
    }

    #[test]
    fn labels_partition_the_grid() {
        let (x, level, w) = (10_000u64, 50.0, 3u64);
        for i in 0..100_000u64 {
            let alpha = i as f64 / 100_000.0;
            let l = classify_arc(Alpha::Real(alpha), level, x, w).unwrap();
            let (num, den) = exact(Alpha::Real(alpha));
            let in_outer = least_q(num, den, level, x).is_some();
            let in_inner = least_q(num, den, level / 2.0, x).is_some();
            match l.kind {
                ArcKind::Annulus => assert!(in_outer && !in_inner),
                ArcKind::Major => assert!(in_inner),
                ArcKind::Peak => assert!(!in_outer && l.peak.is_some()),
                ArcKind::Minor => assert!(!in_outer && l.peak.is_none()),
            }
            if matches!(l.kind, ArcKind::Major | ArcKind::Annulus) {
                assert!(within(num, den, l.q as u128, nearest(num, den, l.q as u128), level, x));
            }
        }
    }

    #[test]
    fn segments_match_pointwise_labels() {
        let (x, level) = (1000u64, 8.0);
        let segs = annulus_segments(level, x).unwrap();
        for s in &segs {
            assert!(s.lo < s.hi);
            for t in [0.1, 0.5, 0.9] {
                let m = s.lo + t * (s.hi - s.lo);
                let l = classify_arc(Alpha::Real(m), level, x, 1).unwrap();
                assert_eq!((l.kind, l.q, l.a), (ArcKind::Annulus, s.q, s.a));
            }
        }
        // measure of N(Q) from the segments vs a fine grid
        let measure: f64 = segs.iter().map(|s| s.hi - s.lo).sum();
        let n = 400_000;
        let hits = (0..n)
            .filter(|&i| {
                let l = classify_arc(Alpha::Real((i as f64 + 0.5) / n as f64), level, x, 1).unwrap();
                l.kind == ArcKind::Annulus
            })
            .count();
        assert!((measure - hits as f64 / n as f64).abs() < 1e-3);

        let peaks = peak_segments(2, 1000).unwrap();
        let total: f64 = peaks.iter().map(|s| s.hi - s.lo).sum();
        // arcs at 0/1 and 1/2, each of width 2W/X
        assert!((total - 2.0 * 2.0 * 2.0 / 1000.0).abs() < 1e-12);
    }

    #[test]
    fn majorant_shape() {
        assert!((peak_majorant(3.0 / 7.0, 7, 3, 100) - 100.0 / 7f64.sqrt()).abs() < 1e-9);
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let v = peak_majorant(3.0 / 7.0 + i as f64 * 1e-5, 7, 3, 100);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn default_peak_parameter() {
        assert_eq!(default_w(1), 1);
        assert_eq!(default_w(1024), 2);
        assert_eq!(default_w(1025), 3);
        assert_eq!(default_w(10_000), 3);
        assert_eq!(default_w(1_000_000), 4);
    }
}
