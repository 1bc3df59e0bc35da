//! C interface to `circleforge`.
//!
//! Every fallible function returns a [`CfStatus`] and writes results through
//! out-pointers. On failure the message is available from
//! [`cf_last_error`] on the same thread until the next failing call.
//! Spectra and range counts are returned as opaque handles that must be
//! released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use circleforge::cache::{read_spectrum, write_spectrum};
use circleforge::expsum::{vk_integral, weyl_sum, Alpha};
use circleforge::moments::{count_i1, count_i2, hua_moment8};
use circleforge::reps::{pair_spectrum, rep_count_range, rep_count_single, PairSpectrum, RangeCounts};
use circleforge::residue::{gauss_sum, leading_constant, wk_majorant};
use circleforge::scan::predict;
use circleforge::series::{congruence_count, series_term, truncated_singular_series};
use circleforge::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfStatus {
    Ok = 0,
    Precondition = 2,
    Budget = 3,
    Convergence = 4,
    Cache = 5,
    Io = 6,
    NullPointer = 7,
    Panic = 8,
}

/// One prediction record, as returned by [`cf_predict`].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CfPrediction {
    pub n: u64,
    pub r: u64,
    pub s_w: f64,
    pub tail_estimate: f64,
    pub main: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Opaque pair spectrum.
pub struct CfSpectrum(PairSpectrum);

/// Opaque exact counts `R(1..=X)`.
pub struct CfRangeCounts(RangeCounts);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CfStatus {
    match e {
        Error::Precondition(_) => CfStatus::Precondition,
        Error::Budget { .. } => CfStatus::Budget,
        Error::Convergence { .. } => CfStatus::Convergence,
        Error::Cache(_) => CfStatus::Cache,
        Error::Io(_) => CfStatus::Io,
    }
}

enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::Core(Error::Io(e))
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> CfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CfStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            CfStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            CfStatus::Panic
        }
    }
}

fn null_error(what: &'static str) -> Fail {
    Fail::Null(what)
}

/// Writes `v` through `p`, failing on null.
unsafe fn put<T>(p: *mut T, v: T, what: &'static str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null_error(what));
    }
    p.write(v);
    Ok(())
}

fn narrow(v: u128) -> Result<u64, Error> {
    u64::try_from(v).map_err(|_| Error::Budget { what: "count width", required: v, limit: u64::MAX as u128 })
}

/// Message of the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn cf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `(27/32) 2^(1/3) Gamma(4/3)^6`.
#[no_mangle]
pub extern "C" fn cf_leading_constant() -> f64 {
    leading_constant().value
}

/// `S_k(q,a)`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_gauss_sum(k: u32, q: u64, a: u64, re: *mut f64, im: *mut f64) -> CfStatus {
    guard(|| {
        let g = gauss_sum(k, q, a)?.value;
        put(re, g.re, "re")?;
        put(im, g.im, "im")
    })
}

/// `w_k(q)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_wk_majorant(k: u32, q: u64, out: *mut f64) -> CfStatus {
    guard(|| put(out, wk_majorant(k, q)?.value, "out"))
}

/// `A(q;n)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_series_term(q: u64, n: i64, out: *mut f64) -> CfStatus {
    guard(|| put(out, series_term(q, n)?.value, "out"))
}

/// `S(n;W)` and `|S(n;2W) - S(n;W)|`.
///
/// # Safety
/// `value` and `tail` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_singular_series(n: u64, w: u64, value: *mut f64, tail: *mut f64) -> CfStatus {
    guard(|| {
        let s = truncated_singular_series(n, w)?;
        put(value, s.value, "value")?;
        put(tail, s.tail_estimate, "tail")
    })
}

/// Number of solutions modulo `q`, split into low and high 64-bit words.
///
/// # Safety
/// `lo` and `hi` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_congruence_count(q: u64, n: i64, lo: *mut u64, hi: *mut u64) -> CfStatus {
    guard(|| {
        let c = congruence_count(q, n)?.count;
        put(lo, c as u64, "lo")?;
        put(hi, (c >> 64) as u64, "hi")
    })
}

/// Exact `R(n)`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_rep_count(n: u64, out: *mut u64) -> CfStatus {
    guard(|| put(out, rep_count_single(n)?, "out"))
}

/// Builds the pair spectrum of `k`-th powers up to `p`.
///
/// # Safety
/// `out` must be valid for writes. The handle is freed with [`cf_spectrum_free`].
#[no_mangle]
pub unsafe extern "C" fn cf_spectrum_new(k: u32, p: u64, out: *mut *mut CfSpectrum) -> CfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_error("out"));
        }
        let s = pair_spectrum(k, p)?;
        out.write(Box::into_raw(Box::new(CfSpectrum(s))));
        Ok(())
    })
}

/// Reads a spectrum cache file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_spectrum_read(path: *const c_char, out: *mut *mut CfSpectrum) -> CfStatus {
    guard(|| {
        if path.is_null() || out.is_null() {
            return Err(null_error("path or out"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| Error::Precondition("path is not UTF-8".into()))?;
        let s = read_spectrum(BufReader::new(File::open(path)?))?;
        out.write(Box::into_raw(Box::new(CfSpectrum(s))));
        Ok(())
    })
}

/// Writes a spectrum cache file.
///
/// # Safety
/// `s` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cf_spectrum_write(s: *const CfSpectrum, path: *const c_char) -> CfStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_error("spectrum"))?;
        if path.is_null() {
            return Err(null_error("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|_| Error::Precondition("path is not UTF-8".into()))?;
        Ok(write_spectrum(BufWriter::new(File::create(path)?), &s.0)?)
    })
}

/// Number of entries, `2 P^k + 1`; zero for a null handle.
///
/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_spectrum_len(s: *const CfSpectrum) -> u64 {
    s.as_ref().map_or(0, |s| s.0.counts.len() as u64)
}

/// Count of pairs with `x^k + y^k = m`; zero beyond the end.
///
/// # Safety
/// `s` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_spectrum_get(s: *const CfSpectrum, m: u64, out: *mut u32) -> CfStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null_error("spectrum"))?;
        put(out, s.0.get(m), "out")
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cf_spectrum_free(s: *mut CfSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Exact `R(n)` for `1 <= n <= x`.
///
/// # Safety
/// `out` must be valid for writes. The handle is freed with [`cf_range_counts_free`].
#[no_mangle]
pub unsafe extern "C" fn cf_range_counts_new(x: u64, out: *mut *mut CfRangeCounts) -> CfStatus {
    guard(|| {
        if out.is_null() {
            return Err(null_error("out"));
        }
        let r = rep_count_range(x)?;
        out.write(Box::into_raw(Box::new(CfRangeCounts(r))));
        Ok(())
    })
}

/// The bound `X`; zero for a null handle.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cf_range_counts_limit(r: *const CfRangeCounts) -> u64 {
    r.as_ref().map_or(0, |r| r.0.x)
}

/// `R(n)` for `1 <= n <= X`.
///
/// # Safety
/// `r` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_range_counts_get(r: *const CfRangeCounts, n: u64, out: *mut u64) -> CfStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null_error("range counts"))?;
        if n == 0 || n > r.0.x {
            return Err(Error::Precondition(format!("n={n} outside 1..={}", r.0.x)).into());
        }
        put(out, r.0.get(n) as u64, "out")
    })
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cf_range_counts_free(r: *mut CfRangeCounts) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Solutions of `y1^6 + y2^6 = y3^6 + y4^6` in `[1, p6]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_count_i2(p6: u64, out: *mut u64) -> CfStatus {
    guard(|| put(out, narrow(count_i2(p6)?.count)?, "out"))
}

/// Solutions of `x1^3 - x2^3 = y1^6 + y2^6 - y3^6 - y4^6` at scale `x`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_count_i1(x: u64, out: *mut u64) -> CfStatus {
    guard(|| put(out, narrow(count_i1(x)?.count)?, "out"))
}

/// Solutions of `y1^6 + ... + y4^6 = y5^6 + ... + y8^6` in `[1, p6]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_hua_moment8(p6: u64, out: *mut u64) -> CfStatus {
    guard(|| put(out, narrow(hua_moment8(p6)?.count)?, "out"))
}

/// `sum_{1 <= x <= p} e(alpha x^k)` for `alpha` in `[0, 1)`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_weyl_sum(k: u32, p: u64, alpha: f64, re: *mut f64, im: *mut f64) -> CfStatus {
    guard(|| {
        let v = weyl_sum(k, p, Alpha::Real(alpha))?;
        put(re, v.re, "re")?;
        put(im, v.im, "im")
    })
}

/// As [`cf_weyl_sum`] at the exact point `num / den`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_weyl_sum_rational(
    k: u32,
    p: u64,
    num: u64,
    den: u64,
    re: *mut f64,
    im: *mut f64,
) -> CfStatus {
    guard(|| {
        let v = weyl_sum(k, p, Alpha::Rational { num, den })?;
        put(re, v.re, "re")?;
        put(im, v.im, "im")
    })
}

/// `int_0^p e(beta t^k) dt`.
///
/// # Safety
/// `re` and `im` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_vk_integral(k: u32, p: f64, beta: f64, re: *mut f64, im: *mut f64) -> CfStatus {
    guard(|| {
        let v = vk_integral(k, p, beta)?;
        put(re, v.re, "re")?;
        put(im, v.im, "im")
    })
}

/// Prediction record for `n >= 6` at truncation `w`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cf_predict(n: u64, w: u64, out: *mut CfPrediction) -> CfStatus {
    guard(|| {
        let r = predict(n, w)?;
        put(
            out,
            CfPrediction {
                n: r.n,
                r: r.r,
                s_w: r.s_w,
                tail_estimate: r.tail_estimate,
                main: r.main,
                abs_err: r.abs_err,
                rel_err: r.rel_err,
            },
            "out",
        )
    })
}
