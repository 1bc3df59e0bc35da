//! Quadrature over arcs: the peak-arc integral of `f_2^2 f_3^2 f_6^2 e(-n alpha)`
//! and its `f^*` analogue, the singular integral `J(n;W)`, the pruned
//! annulus integrals `T_0, T_1, T_2`, and the sampled `f - f^*` survey.
//!
//! Every integral uses composite 8-point Gauss–Legendre with panels of
//! width `1/(grid X)`, and is recomputed with half the panel width. If the
//! two disagree beyond the contract the grid is doubled, at most
//! [`MAX_REFINEMENTS`] times.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::arcs::{annulus_segments, peak_segments, peak_majorant, Segment};
use super::weyl::{e, major_arc_approx, vk_integral, ExceptionalSample, ShiftedWeyl, VkTable};
use crate::arith::{gcd, iroot};
use crate::error::{Error, Result};
use crate::quad::gl8_points;
use crate::residue::{gauss_sum, leading_constant};

/// Largest `X` for the peak-arc integral.
pub const MAJOR_ARC_LIMIT: u64 = 100_000;
/// Largest `X` for the singular integral.
pub const SINGULAR_LIMIT: u64 = 1_000_000;
/// Largest `X` for the pruned diagnostics.
pub const PRUNED_LIMIT: u64 = 10_000;
/// Minimum number of panels per `1/X`.
pub const MIN_GRID: u32 = 10;
pub const MAX_REFINEMENTS: u32 = 3;
/// Relative grid-halving tolerance for peak-arc and singular integrals.
pub const MAJOR_TOLERANCE: f64 = 0.01;
/// Relative grid-halving tolerance for the pruned diagnostics.
pub const PRUNED_TOLERANCE: f64 = 0.02;
/// Exponent used for the bound shape `X^{1-delta^2} Z`.
pub const PRUNING_DELTA: f64 = 0.1;

fn gauss(k: u32, q: u64, a: u64) -> Result<Complex64> {
    if q == 1 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(gauss_sum(k, q, a)?.value)
}

/// `e(-n a / q)` with the numerator reduced exactly.
fn rational_phase(n: u64, a: u64, q: u64) -> Complex64 {
    let m = (n % q) as u128 * a as u128 % q as u128;
    e(-(m as f64) / q as f64)
}

fn relative_change(coarse: f64, fine: f64) -> f64 {
    let d = (coarse - fine).abs();
    if d == 0.0 {
        0.0
    } else {
        d / fine.abs().max(coarse.abs())
    }
}

/// Integrates `f(segment index, alpha, beta)` over each segment with panels
/// of width at most `1 / panels_per_unit`. Returns per-segment sums and the
/// number of nodes used.
fn segment_quadrature<const N: usize, F>(segs: &[Segment], panels_per_unit: f64, f: F) -> Vec<([Complex64; N], usize)>
where
    F: Fn(usize, f64, f64) -> [Complex64; N] + Sync,
{
    segs.par_iter()
        .enumerate()
        .map(|(i, s)| {
            let panels = ((s.hi - s.lo) * panels_per_unit).ceil().max(1.0) as usize;
            let width = (s.hi - s.lo) / panels as f64;
            let centre = s.a as f64 / s.q as f64;
            let beta_lo = {
                let d = s.lo - centre;
                d - d.round()
            };
            let mut acc = [Complex64::new(0.0, 0.0); N];
            for p in 0..panels {
                let lo = beta_lo + width * p as f64;
                for (beta, w) in gl8_points(lo, lo + width) {
                    let v = f(i, centre + beta, beta);
                    for j in 0..N {
                        acc[j] += v[j] * w;
                    }
                }
            }
            (acc, panels * 8)
        })
        .collect()
}

/// One arc's contribution to a reported integral.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArcIntegralRow {
    pub q: u64,
    pub a: u64,
    pub level: f64,
    pub integral_re: f64,
    pub integral_im: f64,
    pub abs: f64,
    pub grid_points: usize,
    /// Which integrand the row belongs to.
    pub integrand: &'static str,
}

fn group_rows(
    segs: &[Segment],
    parts: &[([Complex64; 2], usize)],
    j: usize,
    level: f64,
    integrand: &'static str,
) -> Vec<ArcIntegralRow> {
    let mut by_arc: BTreeMap<(u64, u64), (Complex64, usize)> = BTreeMap::new();
    for (s, (v, nodes)) in segs.iter().zip(parts) {
        let slot = by_arc.entry((s.q, s.a)).or_default();
        slot.0 += v[j];
        slot.1 += nodes;
    }
    by_arc
        .into_iter()
        .map(|((q, a), (v, nodes))| ArcIntegralRow {
            q,
            a,
            level,
            integral_re: v.re,
            integral_im: v.im,
            abs: v.norm(),
            grid_points: nodes,
            integrand,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorArcIntegral {
    pub n: u64,
    pub x: u64,
    pub w: u64,
    pub grid: u32,
    #[serde(skip)]
    pub f_integral: Complex64,
    #[serde(skip)]
    pub fstar_integral: Complex64,
    /// `|f integral - f^* integral|`.
    pub difference: f64,
    /// `difference / (W^4 X^{5/6})`.
    pub normalized_difference: f64,
    pub halving_change_f: f64,
    pub halving_change_fstar: f64,
    pub rows: Vec<ArcIntegralRow>,
}

struct PeakIntegrand {
    weyl: Vec<[ShiftedWeyl; 3]>,
    coeff: Vec<Complex64>,
}

/// `int_P f_2^2 f_3^2 f_6^2 e(-n alpha)` and the same with every `f_k`
/// replaced by `f_k^*`, over the peak arcs with `q <= W`.
pub fn major_arc_integral(n: u64, x: u64, w: u64, grid: u32) -> Result<MajorArcIntegral> {
    if x > MAJOR_ARC_LIMIT {
        return Err(Error::Budget { what: "peak-arc integral scale X", required: x as u128, limit: MAJOR_ARC_LIMIT as u128 });
    }
    if n == 0 || x == 0 || w == 0 {
        return Err(Error::pre("n, X and W must be positive"));
    }
    if grid < MIN_GRID {
        return Err(Error::pre(format!("grid {grid} is below the minimum {MIN_GRID} panels per 1/X")));
    }
    let p = [iroot(x, 2), iroot(x, 3), iroot(x, 6)];
    let pf = p.map(|v| v as f64);
    let segs = peak_segments(w, x)?;
    let arcs: Vec<(u64, u64)> = {
        let mut v: Vec<_> = segs.iter().map(|s| (s.q, s.a)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let index: BTreeMap<(u64, u64), usize> = arcs.iter().enumerate().map(|(i, &qa)| (qa, i)).collect();
    let data = PeakIntegrand {
        weyl: arcs
            .par_iter()
            .map(|&(q, a)| {
                [ShiftedWeyl::new(2, p[0], q, a), ShiftedWeyl::new(3, p[1], q, a), ShiftedWeyl::new(6, p[2], q, a)]
            })
            .collect(),
        coeff: arcs
            .iter()
            .map(|&(q, a)| {
                let s = [gauss(2, q, a)?, gauss(3, q, a)?, gauss(6, q, a)?];
                let qf = q as f64;
                Ok((s[0] * s[1] * s[2] / (qf * qf * qf)).powi(2) * rational_phase(n, a, q))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let seg_arc: Vec<usize> = segs.iter().map(|s| index[&(s.q, s.a)]).collect();
    let nf = n as f64;

    let run = |g: u32| -> Result<Vec<([Complex64; 2], usize)>> {
        let err = std::sync::Mutex::new(None);
        let parts = segment_quadrature::<2, _>(&segs, g as f64 * x as f64, |i, _alpha, beta| {
            let arc = seg_arc[i];
            let (q, a) = arcs[arc];
            let ws = &data.weyl[arc];
            let prod = (ws[0].eval(beta) * ws[1].eval(beta) * ws[2].eval(beta)).powi(2);
            let twist = e(-nf * beta);
            let f = prod * rational_phase(n, a, q) * twist;
            let v = (|| -> Result<Complex64> {
                Ok(vk_integral(2, pf[0], beta)? * vk_integral(3, pf[1], beta)? * vk_integral(6, pf[2], beta)?)
            })();
            let fstar = match v {
                Ok(v) => data.coeff[arc] * v * v * twist,
                Err(e) => {
                    *err.lock().unwrap() = Some(e);
                    Complex64::new(0.0, 0.0)
                }
            };
            [f, fstar]
        });
        match err.into_inner().unwrap() {
            Some(e) => Err(e),
            None => Ok(parts),
        }
    };
    let total = |parts: &[([Complex64; 2], usize)], j: usize| parts.iter().map(|p| p.0[j]).sum::<Complex64>();

    let mut g = grid;
    let mut coarse = run(g)?;
    for _ in 0..=MAX_REFINEMENTS {
        let fine = run(2 * g)?;
        let (cf, ff) = (total(&coarse, 0), total(&fine, 0));
        let (cs, fs) = (total(&coarse, 1), total(&fine, 1));
        let dch = relative_change(cf.norm(), ff.norm()).max((cf - ff).norm() / ff.norm().max(f64::MIN_POSITIVE));
        let sch = relative_change(cs.norm(), fs.norm()).max((cs - fs).norm() / fs.norm().max(f64::MIN_POSITIVE));
        if dch <= MAJOR_TOLERANCE && sch <= MAJOR_TOLERANCE {
            let difference = (cf - cs).norm();
            let scale = (w as f64).powi(4) * (x as f64).powf(5.0 / 6.0);
            let mut rows = group_rows(&segs, &coarse, 0, w as f64, "f");
            rows.extend(group_rows(&segs, &coarse, 1, w as f64, "fstar"));
            return Ok(MajorArcIntegral {
                n,
                x,
                w,
                grid: g,
                f_integral: cf,
                fstar_integral: cs,
                difference,
                normalized_difference: difference / scale,
                halving_change_f: dch,
                halving_change_fstar: sch,
                rows,
            });
        }
        if g >= grid << MAX_REFINEMENTS {
            return Err(Error::Convergence { what: "peak-arc integral", achieved: dch.max(sch), wanted: MAJOR_TOLERANCE });
        }
        g *= 2;
        coarse = fine;
    }
    unreachable!()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularIntegral {
    pub n: u64,
    pub x: u64,
    pub w: u64,
    pub grid: u32,
    pub value: f64,
    pub imag: f64,
    /// `Gamma(3/2)^2 Gamma(4/3)^2 Gamma(7/6)^2 / Gamma(2) * n`.
    pub prediction: f64,
    pub ratio: f64,
    pub halving_change: f64,
}

/// `J(n;W) = int_{|beta| <= W/X} v_2^2 v_3^2 v_6^2 e(-beta n) d beta`, with
/// each `v_k` integrated up to the real number `X^{1/k}`.
pub fn singular_integral_j(n: u64, x: u64, w: u64, grid: u32) -> Result<SingularIntegral> {
    if x > SINGULAR_LIMIT {
        return Err(Error::Budget { what: "singular integral scale X", required: x as u128, limit: SINGULAR_LIMIT as u128 });
    }
    if x == 0 || w == 0 {
        return Err(Error::pre("X and W must be positive"));
    }
    if !(2 * n > x && n <= x) {
        return Err(Error::pre(format!("n={n} must lie in (X/2, X] with X={x}")));
    }
    if grid < MIN_GRID {
        return Err(Error::pre(format!("grid {grid} is below the minimum {MIN_GRID} panels per 1/X")));
    }
    let xf = x as f64;
    let p = [xf.sqrt(), xf.cbrt(), xf.powf(1.0 / 6.0)];
    let nf = n as f64;
    let r = w as f64 / xf;
    let run = |g: u32| -> Result<Complex64> {
        let panels = (2.0 * r * g as f64 * xf).ceil() as usize;
        let width = 2.0 * r / panels as f64;
        let parts: Vec<Result<Complex64>> = (0..panels)
            .into_par_iter()
            .map(|i| {
                let lo = -r + width * i as f64;
                let mut acc = Complex64::new(0.0, 0.0);
                for (beta, wt) in gl8_points(lo, lo + width) {
                    let v = vk_integral(2, p[0], beta)? * vk_integral(3, p[1], beta)? * vk_integral(6, p[2], beta)?;
                    acc += v * v * e(-beta * nf) * wt;
                }
                Ok(acc)
            })
            .collect();
        parts.into_iter().sum()
    };
    let prediction = leading_constant().gamma_product_form * nf;
    let mut g = grid;
    let mut coarse = run(g)?;
    for _ in 0..=MAX_REFINEMENTS {
        let fine = run(2 * g)?;
        let change = relative_change(coarse.re, fine.re);
        if change <= MAJOR_TOLERANCE {
            return Ok(SingularIntegral {
                n,
                x,
                w,
                grid: g,
                value: coarse.re,
                imag: coarse.im,
                prediction,
                ratio: coarse.re / prediction,
                halving_change: change,
            });
        }
        if g >= grid << MAX_REFINEMENTS {
            return Err(Error::Convergence { what: "singular integral", achieved: change, wanted: MAJOR_TOLERANCE });
        }
        g *= 2;
        coarse = fine;
    }
    unreachable!()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrunedDiagnostic {
    pub x: u64,
    pub level: f64,
    pub sample_size: usize,
    pub grid: u32,
    /// `int_N |f_2^2 f_3^2 f_6^2 K|`.
    pub t0: f64,
    /// `int_N f~_2^2 |f_3^2 f_6^2 K|`.
    pub t1: f64,
    /// `int_N f~_2^2 |f_3^{*2} f_6^2 K|`.
    pub t2: f64,
    /// Same as `t0` without the factor `K`.
    pub t0_without_k: f64,
    pub measure: f64,
    /// `X Z^{1/2}`.
    pub shape_sqrt: f64,
    /// `X^{1-delta^2} Z` with `delta =` [`PRUNING_DELTA`].
    pub shape_linear: f64,
    pub halving_change: f64,
    pub rows: Vec<ArcIntegralRow>,
}

/// Numerical values of the pruned annulus integrals at level `Q`.
pub fn pruned_integral_diagnostic(x: u64, level: f64, sample: &ExceptionalSample, grid: u32) -> Result<PrunedDiagnostic> {
    if x > PRUNED_LIMIT {
        return Err(Error::Budget { what: "pruned diagnostic scale X", required: x as u128, limit: PRUNED_LIMIT as u128 });
    }
    if x == 0 || level > (x as f64).sqrt() {
        return Err(Error::pre(format!("level Q={level} must satisfy Q <= X^(1/2) with X={x}")));
    }
    if grid < MIN_GRID {
        return Err(Error::pre(format!("grid {grid} is below the minimum {MIN_GRID} panels per 1/X")));
    }
    let z = sample.len() as f64;
    let xf = x as f64;
    let shape_sqrt = xf * z.sqrt();
    let shape_linear = xf.powf(1.0 - PRUNING_DELTA * PRUNING_DELTA) * z;
    let segs = annulus_segments(level, x)?;
    let measure = segs.iter().map(|s| s.hi - s.lo).sum();
    if sample.is_empty() {
        return Ok(PrunedDiagnostic {
            x,
            level,
            sample_size: 0,
            grid,
            t0: 0.0,
            t1: 0.0,
            t2: 0.0,
            t0_without_k: 0.0,
            measure,
            shape_sqrt,
            shape_linear,
            halving_change: 0.0,
            rows: Vec::new(),
        });
    }
    let p = [iroot(x, 2), iroot(x, 3), iroot(x, 6)];
    let mut arcs: Vec<(u64, u64)> = segs.iter().map(|s| (s.q, s.a)).collect();
    arcs.sort_unstable();
    arcs.dedup();
    let index: BTreeMap<(u64, u64), usize> = arcs.iter().enumerate().map(|(i, &qa)| (qa, i)).collect();
    let weyl: Vec<[ShiftedWeyl; 3]> = arcs
        .par_iter()
        .map(|&(q, a)| [ShiftedWeyl::new(2, p[0], q, a), ShiftedWeyl::new(3, p[1], q, a), ShiftedWeyl::new(6, p[2], q, a)])
        .collect();
    let s3: Vec<f64> = arcs
        .iter()
        .map(|&(q, a)| Ok(gauss(3, q, a)?.norm() / q as f64))
        .collect::<Result<_>>()?;
    let t_max = level / xf * (p[1] as f64).powi(3);
    let v3 = VkTable::new(3, p[1] as f64, t_max, 0.01)?;
    let seg_arc: Vec<usize> = segs.iter().map(|s| index[&(s.q, s.a)]).collect();
    let eta: Vec<Complex64> = match &sample.eta {
        Some(v) => v.clone(),
        None => vec![Complex64::new(1.0, 0.0); sample.len()],
    };
    // K at a/q + beta: sum eta_n e(-n a/q) e(-n beta)
    let k_at = |q: u64, a: u64, beta: f64| -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&n, &w) in sample.z.iter().zip(&eta) {
            acc += w * rational_phase(n, a, q) * e(-(n as f64) * beta);
        }
        acc.norm()
    };
    let run = |g: u32| {
        segment_quadrature::<4, _>(&segs, g as f64 * xf, |i, alpha, beta| {
            let arc = seg_arc[i];
            let (q, a) = arcs[arc];
            let ws = &weyl[arc];
            let f2 = ws[0].eval(beta).norm_sqr();
            let f3 = ws[1].eval(beta).norm_sqr();
            let f6 = ws[2].eval(beta).norm_sqr();
            let k = k_at(q, a, beta);
            let maj = peak_majorant(alpha, q, a, p[0]).powi(2);
            let f3s = (s3[arc] * v3.eval(beta).norm()).powi(2);
            [f2 * f3 * f6 * k, maj * f3 * f6 * k, maj * f3s * f6 * k, f2 * f3 * f6].map(|v| Complex64::new(v, 0.0))
        })
    };
    let total = |parts: &[([Complex64; 4], usize)]| {
        let mut t = [0.0; 4];
        for (v, _) in parts {
            for j in 0..4 {
                t[j] += v[j].re;
            }
        }
        t
    };
    let mut g = grid;
    let mut coarse = run(g);
    for _ in 0..=MAX_REFINEMENTS {
        let fine = run(2 * g);
        let (c, f) = (total(&coarse), total(&fine));
        let change = (0..4).map(|j| relative_change(c[j], f[j])).fold(0.0, f64::max);
        if change <= PRUNED_TOLERANCE {
            let rows = {
                let mut by_arc: BTreeMap<(u64, u64), (f64, usize)> = BTreeMap::new();
                for (s, (v, nodes)) in segs.iter().zip(&coarse) {
                    let slot = by_arc.entry((s.q, s.a)).or_default();
                    slot.0 += v[0].re;
                    slot.1 += nodes;
                }
                by_arc
                    .into_iter()
                    .map(|((q, a), (v, nodes))| ArcIntegralRow {
                        q,
                        a,
                        level,
                        integral_re: v,
                        integral_im: 0.0,
                        abs: v.abs(),
                        grid_points: nodes,
                        integrand: "t0",
                    })
                    .collect()
            };
            return Ok(PrunedDiagnostic {
                x,
                level,
                sample_size: sample.len(),
                grid: g,
                t0: c[0],
                t1: c[1],
                t2: c[2],
                t0_without_k: c[3],
                measure,
                shape_sqrt,
                shape_linear,
                halving_change: change,
                rows,
            });
        }
        if g >= grid << MAX_REFINEMENTS {
            return Err(Error::Convergence { what: "pruned integrals", achieved: change, wanted: PRUNED_TOLERANCE });
        }
        g *= 2;
        coarse = fine;
    }
    unreachable!()
}

/// Largest `|f_k(a/q + beta) - f_k^*(a/q + beta)| / q^{1/2}` over a survey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApproxSurvey {
    pub k: u32,
    pub p: u64,
    pub q_max: u64,
    pub points: usize,
    pub max_ratio: f64,
    pub q: u64,
    pub a: u64,
    pub beta: f64,
}

/// Surveys every reduced `a/q` with `q <= q_max` at each offset in `betas`.
pub fn approx_error_survey(k: u32, p: u64, q_max: u64, betas: &[f64]) -> Result<ApproxSurvey> {
    if q_max == 0 {
        return Err(Error::pre("q_max must be positive"));
    }
    let mut fr = vec![(1u64, 0u64)];
    for q in 2..=q_max {
        fr.extend((1..q).filter(|&a| gcd(a, q) == 1).map(|a| (q, a)));
    }
    let results: Vec<Result<(f64, u64, u64, f64)>> = fr
        .par_iter()
        .map(|&(q, a)| {
            let sw = ShiftedWeyl::new(k, p, q, a);
            let mut best = (0.0, q, a, 0.0);
            for &beta in betas {
                let f = sw.eval(beta);
                let fs = major_arc_approx(k, q, if q == 1 { 1 } else { a }, beta, p as f64)?;
                let r = (f - fs).norm() / (q as f64).sqrt();
                if r > best.0 {
                    best = (r, q, a, beta);
                }
            }
            Ok(best)
        })
        .collect();
    let mut top = (0.0, 1, 0, 0.0);
    for r in results {
        let r = r?;
        if r.0 > top.0 {
            top = r;
        }
    }
    Ok(ApproxSurvey { k, p, q_max, points: fr.len() * betas.len(), max_ratio: top.0, q: top.1, a: top.2, beta: top.3 })
}
