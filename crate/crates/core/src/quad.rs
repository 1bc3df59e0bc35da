#![allow(clippy::excessive_precision)]

//! Gauss–Legendre and Gauss–Kronrod rules for complex-valued integrands.

use num_complex::Complex64;

use crate::error::{Error, Result};

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

// Kronrod 15-point nodes (descending, last is the centre) and weights; the
// embedded 7-point Gauss rule uses the odd-indexed nodes.
const GK15_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const GK15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// The eight Gauss–Legendre nodes mapped onto `[a, b]`, with weights.
pub fn gl8_points(a: f64, b: f64) -> [(f64, f64); 8] {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 8];
    for i in 0..4 {
        out[2 * i] = (c - h * GL8_NODES[i], h * GL8_WEIGHTS[i]);
        out[2 * i + 1] = (c + h * GL8_NODES[i], h * GL8_WEIGHTS[i]);
    }
    out
}

/// Composite 8-point Gauss–Legendre with `panels` equal panels.
pub fn gl8_composite<F: FnMut(f64) -> Complex64>(mut f: F, a: f64, b: f64, panels: usize) -> Complex64 {
    let width = (b - a) / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let lo = a + width * i as f64;
        let hi = if i + 1 == panels { b } else { lo + width };
        for (x, w) in gl8_points(lo, hi) {
            acc += f(x) * w;
        }
    }
    acc
}

/// Kronrod estimate on `[a, b]` and the Gauss–Kronrod difference.
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * GK15_WEIGHTS[7];
    let mut gauss = fc * G7_WEIGHTS[3];
    for i in 0..7 {
        let s = f(c - h * GK15_NODES[i]) + f(c + h * GK15_NODES[i]);
        kron += s * GK15_WEIGHTS[i];
        if i % 2 == 1 {
            gauss += s * G7_WEIGHTS[i / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

/// Adaptive bisection with Gauss–Kronrod panels until the estimated error
/// on each piece is below its share of `tol`.
pub fn adaptive_gk15<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<(Complex64, f64)> {
    let (val, err) = gk15(f, a, b);
    if err <= tol || b - a <= f64::EPSILON * a.abs().max(1.0) {
        return Ok((val, err));
    }
    if max_depth == 0 {
        return Err(Error::Convergence { what: "adaptive Gauss-Kronrod", achieved: err, wanted: tol });
    }
    let m = 0.5 * (a + b);
    let (l, el) = adaptive_gk15(f, a, m, 0.5 * tol, max_depth - 1)?;
    let (r, er) = adaptive_gk15(f, m, b, 0.5 * tol, max_depth - 1)?;
    Ok((l + r, el + er))
}
