//! Predictions `C S(n;W) n` against exact `R(n)` and the empirical
//! exceptional set `E(X; psi)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::reps::{rep_count_range, rep_count_single, RANGE_LIMIT};
use crate::residue::leading_constant;
use crate::series::SeriesEngine;

/// Records with `n` below this are reported but kept out of trend statistics.
pub const PRE_ASYMPTOTIC: u64 = 1000;

/// The error tolerance function `psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsiSpec {
    /// `(log t)^A` with `A > 0`.
    LogPower(f64),
    /// `t^delta` with `0 < delta <= 0.1`.
    Power(f64),
}

impl Default for PsiSpec {
    fn default() -> Self {
        PsiSpec::LogPower(1.0)
    }
}

impl PsiSpec {
    pub fn log_power(a: f64) -> Result<Self> {
        if a > 0.0 && a.is_finite() {
            Ok(PsiSpec::LogPower(a))
        } else {
            Err(Error::pre(format!("log exponent A={a} must be positive")))
        }
    }

    pub fn power(delta: f64) -> Result<Self> {
        if delta > 0.0 && delta <= 0.1 {
            Ok(PsiSpec::Power(delta))
        } else {
            Err(Error::pre(format!("power exponent delta={delta} must lie in (0, 0.1]")))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            PsiSpec::LogPower(a) => {
                let l = t.ln();
                if l <= 0.0 {
                    0.0
                } else {
                    l.powf(a)
                }
            }
            PsiSpec::Power(d) => t.powf(d),
        }
    }
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PsiSpec::LogPower(1.0) => write!(f, "log"),
            PsiSpec::LogPower(a) => write!(f, "log^{a}"),
            PsiSpec::Power(d) => write!(f, "pow:{d}"),
        }
    }
}

impl FromStr for PsiSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |t: &str| {
            t.parse::<f64>().map_err(|_| Error::pre(format!("cannot parse exponent {t:?} in psi descriptor {s:?}")))
        };
        if s == "log" {
            Ok(PsiSpec::LogPower(1.0))
        } else if let Some(a) = s.strip_prefix("log^") {
            PsiSpec::log_power(num(a)?)
        } else if let Some(d) = s.strip_prefix("pow:") {
            PsiSpec::power(num(d)?)
        } else {
            Err(Error::pre(format!("psi descriptor {s:?} is not \"log\", \"log^A\" or \"pow:delta\"")))
        }
    }
}

impl Serialize for PsiSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictionRecord {
    pub n: u64,
    #[serde(rename = "R")]
    pub r: u64,
    #[serde(rename = "S_W")]
    pub s_w: f64,
    pub tail_estimate: f64,
    pub main: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    /// `abs_err > n / psi(n)`, present once a `psi` has been applied.
    pub exceptional: Option<bool>,
}

impl PredictionRecord {
    /// Assembles a record from an exact count and a series value.
    pub fn from_parts(n: u64, r: u64, s_w: f64, tail_estimate: f64) -> Self {
        let main = leading_constant().value * s_w * n as f64;
        let abs_err = (r as f64 - main).abs();
        PredictionRecord { n, r, s_w, tail_estimate, main, abs_err, rel_err: abs_err / main, exceptional: None }
    }

    /// Whether `abs_err * psi(n) > n`; never true where `psi(n) <= 0`.
    pub fn is_exceptional(&self, psi: &PsiSpec) -> bool {
        let p = psi.eval(self.n as f64);
        p > 0.0 && self.abs_err * p > self.n as f64
    }

    pub fn flagged(mut self, psi: &PsiSpec) -> Self {
        self.exceptional = Some(self.is_exceptional(psi));
        self
    }

    pub fn pre_asymptotic(&self) -> bool {
        self.n < PRE_ASYMPTOTIC
    }
}

/// Prediction for one `n >= 6` at truncation `W`.
pub fn predict(n: u64, w: u64) -> Result<PredictionRecord> {
    if n < 6 {
        return Err(Error::pre(format!("n={n} is below 6, the least representable value")));
    }
    if w == 0 {
        return Err(Error::pre("truncation W must be positive"));
    }
    let r = rep_count_single(n)?;
    let s = SeriesEngine::new(2 * w).truncated(n, w)?;
    Ok(PredictionRecord::from_parts(n, r, s.value, s.tail_estimate))
}

/// Exceptional count on `{1}` or on `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicCount {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    pub size: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quantiles {
    pub p50: f64,
    pub p90: f64,
    pub p99: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    #[serde(rename = "X")]
    pub x: u64,
    pub psi: PsiSpec,
    #[serde(rename = "W")]
    pub w: u64,
    #[serde(rename = "E")]
    pub e: u64,
    /// The boundary interval `{1}` first, then `(2^j, 2^{j+1}]` capped at `X`.
    pub dyadic_counts: Vec<DyadicCount>,
    pub rel_err_quantiles: Quantiles,
    /// Number of records the quantiles were taken over.
    pub quantile_records: u64,
    pub pre_asymptotic_records: u64,
    #[serde(skip)]
    pub records: Vec<PredictionRecord>,
}

impl ScanReport {
    pub fn proportion(&self) -> f64 {
        self.e as f64 / self.x as f64
    }
}

/// Nearest-rank quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Builds a report from flagged records covering `1..=X` in order.
pub fn summarize(x: u64, psi: PsiSpec, w: u64, records: Vec<PredictionRecord>) -> ScanReport {
    let mut dyadic = vec![DyadicCount { lo: 1, hi: 1, count: 0, size: 1.min(x) }];
    let mut lo = 1u64;
    while lo < x {
        let hi = (2 * lo).min(x);
        dyadic.push(DyadicCount { lo, hi, count: 0, size: hi - lo });
        lo *= 2;
    }
    let mut e = 0;
    for r in &records {
        if r.exceptional == Some(true) {
            e += 1;
            let j = if r.n == 1 { 0 } else { (64 - (r.n - 1).leading_zeros()) as usize };
            dyadic[j].count += 1;
        }
    }
    let mut basis: Vec<f64> = records.iter().filter(|r| !r.pre_asymptotic()).map(|r| r.rel_err).collect();
    if basis.is_empty() {
        basis = records.iter().map(|r| r.rel_err).collect();
    }
    basis.sort_by(f64::total_cmp);
    let rel_err_quantiles = Quantiles { p50: quantile(&basis, 0.5), p90: quantile(&basis, 0.9), p99: quantile(&basis, 0.99) };
    let pre = records.iter().filter(|r| r.pre_asymptotic()).count() as u64;
    ScanReport {
        x,
        psi,
        w,
        e,
        dyadic_counts: dyadic,
        rel_err_quantiles,
        quantile_records: basis.len() as u64,
        pre_asymptotic_records: pre,
        records,
    }
}

/// Scans every `1 <= n <= X`.
pub fn scan(x: u64, psi: PsiSpec, w: u64) -> Result<ScanReport> {
    if x == 0 {
        return Err(Error::pre("scan bound X must be positive"));
    }
    if x > RANGE_LIMIT {
        return Err(Error::Budget { what: "scan bound X", required: x as u128, limit: RANGE_LIMIT as u128 });
    }
    if w == 0 {
        return Err(Error::pre("truncation W must be positive"));
    }
    let counts = rep_count_range(x)?;
    let table = SeriesEngine::new(2 * w).table(2 * w)?;
    let (values, tails) = table.partial_sums_with_tail(1, x, w)?;
    let records = (1..=x)
        .map(|n| {
            let i = (n - 1) as usize;
            PredictionRecord::from_parts(n, counts.get(n) as u64, values[i], tails[i]).flagged(&psi)
        })
        .collect();
    Ok(summarize(x, psi, w, records))
}
