//! Command-line front end.
//!
//! [`render`] is pure: the same configuration always yields the same bytes.
//! [`execute`] writes the result to standard output or `--out`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::arith::iroot;
use crate::cache::{cache_dir, cached_pair_spectrum};
use crate::error::{Error, Result};
use crate::expsum::{
    approx_error_survey, classify_arc, default_w, major_arc_approx, major_arc_integral, peak_majorant_survey,
    pruned_integral_diagnostic, singular_integral_j, vk_integral, weyl_sum, Alpha, ExceptionalSample, MIN_GRID,
};
use crate::moments::{correlation_l52, count_i1, count_i2, cube_multiplicity, hua_moment8, MomentCount};
use crate::reps::{pair_spectrum, rep_count_range, rep_count_range_with_squares, rep_count_single};
use crate::residue::{gauss_sum, leading_constant, majorant_ratio_survey, wk_majorant};
use crate::scan::{predict, scan, PsiSpec};
use crate::series::{congruence_count, series_term, truncated_singular_series, DEFAULT_TRUNCATION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Gauss sums, the majorant w_k, and the leading constant.
    Gauss,
    /// Singular series values, terms and congruence counts.
    Sseries,
    /// Exact representation counts.
    Count,
    /// Diophantine mean-value counts.
    Moments,
    /// Weyl sums, arc labels and arc quadrature.
    Arcs,
    /// One prediction record.
    Predict,
    /// Exceptional-set scan over 1..=limit.
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "circleforge", version, about = "Representations as two squares, two cubes and two sixth powers")]
pub struct CommandConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Variant of the command (see README).
    #[arg(long)]
    pub kind: Option<String>,
    /// Range bound X.
    #[arg(long)]
    pub limit: Option<u64>,
    /// Truncation W.
    #[arg(long)]
    pub trunc: Option<u64>,
    /// "log", "log^A" or "pow:delta".
    #[arg(long, default_value = "log")]
    pub psi: String,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub a: Option<u64>,
    #[arg(long = "P")]
    pub p: Option<u64>,
    #[arg(long = "Q")]
    pub level: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Quadrature panels per 1/X.
    #[arg(long)]
    pub grid: Option<u32>,
    /// Sample size.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit status and the bytes to emit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub text: String,
}

pub fn exit_status(e: &Error) -> i32 {
    match e {
        Error::Precondition(_) => 2,
        Error::Budget { .. } => 3,
        _ => 1,
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn normalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(f) = n.as_f64().and_then(|f| serde_json::Number::from_f64(round12(f))) {
                *n = f;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(normalize),
        Value::Object(o) => o.values_mut().for_each(normalize),
        _ => {}
    }
}

/// A report: a JSON document and, where the data is tabular, CSV rows.
struct Report {
    json: Value,
    table: Option<(Vec<&'static str>, Vec<Vec<Value>>)>,
}

impl Report {
    fn object(json: Value) -> Self {
        Report { json, table: None }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im, "abs": z.norm() })
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => u8::from(*b).to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => {
            let s = other.to_string();
            format!("\"{}\"", s.replace('"', "\"\""))
        }
    }
}

fn render_report(mut r: Report, format: Format) -> String {
    normalize(&mut r.json);
    match format {
        Format::Json => format!("{}\n", r.json),
        Format::Csv => {
            let (header, mut rows) = match r.table {
                Some((h, rows)) => (h.into_iter().map(String::from).collect::<Vec<_>>(), rows),
                None => match r.json {
                    Value::Object(o) => {
                        let (k, v): (Vec<String>, Vec<Value>) = o.into_iter().unzip();
                        (k, vec![v])
                    }
                    other => (vec!["value".into()], vec![vec![other]]),
                },
            };
            rows.iter_mut().for_each(|row| row.iter_mut().for_each(normalize));
            let mut out = header.join(",");
            out.push('\n');
            for row in rows {
                out.push_str(&row.iter().map(csv_cell).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
    }
}

fn error_line(e: &Error, format: Format) -> String {
    let msg = e.to_string();
    match format {
        Format::Json => format!("{}\n", json!({ "error": e.kind(), "message": msg })),
        Format::Csv => format!("error,{},{}\n", e.kind(), csv_cell(&Value::String(msg))),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::pre(format!("--{flag} is required for this command")))
}

fn kind(cfg: &CommandConfig, default: &'static str) -> String {
    cfg.kind.clone().unwrap_or_else(|| default.to_string())
}

fn unknown_kind(k: &str, allowed: &str) -> Error {
    Error::pre(format!("unknown --kind {k:?}; expected one of {allowed}"))
}

/// Distinct integers drawn uniformly from `(X/2, X]` by ChaCha8 seeded with `seed`.
pub fn sample_z(x: u64, size: usize, seed: u64) -> Result<Vec<u64>> {
    let lo = x / 2 + 1;
    let span = x - x / 2;
    if size as u64 > span {
        return Err(Error::pre(format!("cannot draw {size} distinct integers from ({}, {x}]", x / 2)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: Vec<u64> = rand::seq::index::sample(&mut rng, span as usize, size).into_iter().map(|i| lo + i as u64).collect();
    z.sort_unstable();
    Ok(z)
}

fn moment_json(m: &MomentCount) -> Value {
    let mut o = Map::new();
    o.insert("label".into(), to_value(&m.label));
    for (k, v) in &m.params {
        o.insert(k.clone(), json!(v));
    }
    o.insert("count".into(), json!(m.count));
    for (k, v) in &m.parts {
        o.insert(k.clone(), json!(v));
    }
    Value::Object(o)
}

fn gauss_cmd(cfg: &CommandConfig) -> Result<Report> {
    let k = kind(cfg, "sum");
    Ok(match k.as_str() {
        "sum" => {
            let (kk, q, a) = (need(cfg.k, "k")?, need(cfg.q, "q")?, need(cfg.a, "a")?);
            let g = gauss_sum(kk, q, a)?;
            Report::object(json!({ "k": kk, "q": q, "a": a, "re": g.value.re, "im": g.value.im, "abs": g.value.norm() }))
        }
        "majorant" => Report::object(to_value(&wk_majorant(need(cfg.k, "k")?, need(cfg.q, "q")?)?)),
        "survey" => Report::object(to_value(&majorant_ratio_survey(need(cfg.k, "k")?, need(cfg.limit, "limit")?)?)),
        "constant" => {
            let c = leading_constant();
            Report::object(json!({
                "value": c.value,
                "gamma_product_form": c.gamma_product_form,
                "relative_difference": (c.value - c.gamma_product_form).abs() / c.value,
            }))
        }
        other => return Err(unknown_kind(other, "sum, majorant, survey, constant")),
    })
}

fn sseries_cmd(cfg: &CommandConfig) -> Result<Report> {
    let k = kind(cfg, "series");
    Ok(match k.as_str() {
        "series" => {
            let w = cfg.trunc.unwrap_or(DEFAULT_TRUNCATION);
            Report::object(to_value(&truncated_singular_series(need(cfg.n, "n")?, w)?))
        }
        "term" => Report::object(to_value(&series_term(need(cfg.q, "q")?, need(cfg.n, "n")? as i64)?)),
        "congruence" => Report::object(to_value(&congruence_count(need(cfg.q, "q")?, need(cfg.n, "n")? as i64)?)),
        other => return Err(unknown_kind(other, "series, term, congruence")),
    })
}

fn count_cmd(cfg: &CommandConfig) -> Result<Report> {
    let cache = cache_dir(cfg.cache_dir.as_deref());
    let k = kind(cfg, if cfg.n.is_some() { "single" } else { "range" });
    Ok(match k.as_str() {
        "single" => {
            let n = need(cfg.n, "n")?;
            Report::object(json!({ "n": n, "R": rep_count_single(n)? }))
        }
        "range" => {
            let x = need(cfg.limit, "limit")?;
            let counts = match &cache {
                Some(dir) => rep_count_range_with_squares(x, &cached_pair_spectrum(dir, 2, iroot(x, 2))?)?,
                None => rep_count_range(x)?,
            };
            let r = &counts.values[1..];
            Report {
                json: json!({ "X": x, "R": r }),
                table: Some((vec!["n", "R"], r.iter().enumerate().map(|(i, &v)| vec![json!(i + 1), json!(v)]).collect())),
            }
        }
        "spectrum" => {
            let (kk, p) = (need(cfg.k, "k")?, need(cfg.p, "P")?);
            let s = match &cache {
                Some(dir) => cached_pair_spectrum(dir, kk, p)?,
                None => pair_spectrum(kk, p)?,
            };
            let nz: Vec<(usize, u32)> = s.counts.iter().copied().enumerate().filter(|e| e.1 > 0).collect();
            Report {
                json: json!({ "k": kk, "P": p, "total": s.total(), "nonzero": nz }),
                table: Some((vec!["m", "count"], nz.iter().map(|&(m, c)| vec![json!(m), json!(c)]).collect())),
            }
        }
        other => return Err(unknown_kind(other, "single, range, spectrum")),
    })
}

fn moments_cmd(cfg: &CommandConfig) -> Result<Report> {
    let k = kind(cfg, "i2");
    Ok(match k.as_str() {
        "i1" => Report::object(moment_json(&count_i1(need(cfg.limit, "limit")?)?)),
        "i2" => Report::object(moment_json(&count_i2(need(cfg.p, "P")?)?)),
        "hua8" => Report::object(moment_json(&hua_moment8(need(cfg.p, "P")?)?)),
        "multiplicity" => {
            let s = cube_multiplicity(need(cfg.p, "P")?)?;
            Report {
                json: json!({ "P3": s.p3, "card": s.members.len(), "max_multiplicity": s.max_multiplicity, "members": s.members }),
                table: Some((vec!["m"], s.members.iter().map(|&m| vec![json!(m)]).collect())),
            }
        }
        "l52" => {
            let p3 = need(cfg.p, "P")?;
            let x = cfg.limit.unwrap_or(p3.saturating_pow(3));
            let z = sample_z(x, cfg.sample.unwrap_or(100), cfg.seed)?;
            let mut v = moment_json(&correlation_l52(p3, &z)?);
            v["X"] = json!(x);
            v["Z"] = json!(z.len());
            v["seed"] = json!(cfg.seed);
            Report::object(v)
        }
        other => return Err(unknown_kind(other, "i1, i2, hua8, multiplicity, l52")),
    })
}

fn arcs_cmd(cfg: &CommandConfig) -> Result<Report> {
    let k = kind(cfg, "classify");
    let grid = cfg.grid.unwrap_or(MIN_GRID);
    let alpha = || -> Result<Alpha> {
        match (cfg.q, cfg.a, cfg.alpha) {
            (Some(q), Some(a), _) => Ok(Alpha::Rational { num: a, den: q }),
            (_, _, Some(x)) => Ok(Alpha::Real(x)),
            _ => Err(Error::pre("give --alpha, or --q with --a for a rational point")),
        }
    };
    Ok(match k.as_str() {
        "classify" => {
            let x = need(cfg.limit, "limit")?;
            let w = cfg.trunc.unwrap_or(default_w(x));
            Report::object(to_value(&classify_arc(alpha()?, need(cfg.level, "Q")?, x, w)?))
        }
        "weyl" => {
            let (kk, p, al) = (need(cfg.k, "k")?, need(cfg.p, "P")?, alpha()?);
            let mut v = complex(weyl_sum(kk, p, al)?);
            v["k"] = json!(kk);
            v["P"] = json!(p);
            v["alpha"] = json!(al.as_f64());
            Report::object(v)
        }
        "vk" => {
            let (kk, p, b) = (need(cfg.k, "k")?, need(cfg.p, "P")?, need(cfg.beta, "beta")?);
            let mut v = complex(vk_integral(kk, p as f64, b)?);
            v["k"] = json!(kk);
            v["P"] = json!(p);
            v["beta"] = json!(b);
            Report::object(v)
        }
        "approx" => {
            let (kk, q, a, p) = (need(cfg.k, "k")?, need(cfg.q, "q")?, need(cfg.a, "a")?, need(cfg.p, "P")?);
            let b = cfg.beta.unwrap_or(0.0);
            let mut v = complex(major_arc_approx(kk, q, a, b, p as f64)?);
            v["k"] = json!(kk);
            v["q"] = json!(q);
            v["a"] = json!(a);
            v["beta"] = json!(b);
            Report::object(v)
        }
        "approx-survey" => {
            let (kk, p) = (need(cfg.k, "k")?, need(cfg.p, "P")?);
            let x = cfg.limit.unwrap_or(p.saturating_pow(kk));
            let w = cfg.trunc.unwrap_or(default_w(x)) as f64;
            let betas: Vec<f64> = (-4..=4).map(|i| i as f64 / 4.0 * w / x as f64).collect();
            Report::object(to_value(&approx_error_survey(kk, p, cfg.q.unwrap_or(50), &betas)?))
        }
        "majorant" => {
            let per = cfg.sample.unwrap_or(8);
            Report::object(to_value(&peak_majorant_survey(need(cfg.level, "Q")?, need(cfg.limit, "limit")?, per)?))
        }
        "integral" => {
            let x = need(cfg.limit, "limit")?;
            let n = cfg.n.unwrap_or(x / 2);
            let w = cfg.trunc.unwrap_or(default_w(x));
            let r = major_arc_integral(n, x, w, grid)?;
            let mut v = to_value(&r);
            v["f_integral"] = complex(r.f_integral);
            v["fstar_integral"] = complex(r.fstar_integral);
            Report { json: v, table: Some(arc_rows(&r.rows)) }
        }
        "singular" => {
            let x = need(cfg.limit, "limit")?;
            let w = cfg.trunc.unwrap_or(default_w(x));
            Report::object(to_value(&singular_integral_j(cfg.n.unwrap_or(x), x, w, grid)?))
        }
        "pruned" => {
            let x = need(cfg.limit, "limit")?;
            let z = sample_z(x, cfg.sample.unwrap_or(100), cfg.seed)?;
            let d = pruned_integral_diagnostic(x, need(cfg.level, "Q")?, &ExceptionalSample::new(z), grid)?;
            let mut v = to_value(&d);
            v["seed"] = json!(cfg.seed);
            Report { json: v, table: Some(arc_rows(&d.rows)) }
        }
        other => {
            return Err(unknown_kind(
                other,
                "classify, weyl, vk, approx, approx-survey, majorant, integral, singular, pruned",
            ))
        }
    })
}

fn arc_rows(rows: &[crate::expsum::ArcIntegralRow]) -> (Vec<&'static str>, Vec<Vec<Value>>) {
    (
        vec!["q", "a", "Q", "integral_re", "integral_im", "abs", "grid_points", "integrand"],
        rows.iter()
            .map(|r| {
                vec![
                    json!(r.q),
                    json!(r.a),
                    json!(r.level),
                    json!(r.integral_re),
                    json!(r.integral_im),
                    json!(r.abs),
                    json!(r.grid_points),
                    json!(r.integrand),
                ]
            })
            .collect(),
    )
}

const RECORD_HEADER: [&str; 8] = ["n", "R", "S_W", "tail_estimate", "main", "abs_err", "rel_err", "exceptional"];

fn record_row(r: &crate::scan::PredictionRecord) -> Vec<Value> {
    vec![
        json!(r.n),
        json!(r.r),
        json!(r.s_w),
        json!(r.tail_estimate),
        json!(r.main),
        json!(r.abs_err),
        json!(r.rel_err),
        json!(r.exceptional),
    ]
}

fn predict_cmd(cfg: &CommandConfig, psi: PsiSpec) -> Result<Report> {
    let rec = predict(need(cfg.n, "n")?, cfg.trunc.unwrap_or(DEFAULT_TRUNCATION))?.flagged(&psi);
    let mut v = to_value(&rec);
    v["psi"] = json!(psi.to_string());
    Ok(Report { json: v, table: Some((RECORD_HEADER.to_vec(), vec![record_row(&rec)])) })
}

fn scan_cmd(cfg: &CommandConfig, psi: PsiSpec) -> Result<Report> {
    let rep = scan(need(cfg.limit, "limit")?, psi, cfg.trunc.unwrap_or(DEFAULT_TRUNCATION))?;
    let rows = rep.records.iter().map(record_row).collect();
    Ok(Report { json: to_value(&rep), table: Some((RECORD_HEADER.to_vec(), rows)) })
}

fn dispatch(cfg: &CommandConfig) -> Result<Report> {
    let psi: PsiSpec = cfg.psi.parse()?;
    if let Some(g) = cfg.grid {
        if g < MIN_GRID {
            return Err(Error::pre(format!("--grid must be at least {MIN_GRID}")));
        }
    }
    match cfg.command {
        Command::Gauss => gauss_cmd(cfg),
        Command::Sseries => sseries_cmd(cfg),
        Command::Count => count_cmd(cfg),
        Command::Moments => moments_cmd(cfg),
        Command::Arcs => arcs_cmd(cfg),
        Command::Predict => predict_cmd(cfg, psi),
        Command::Scan => scan_cmd(cfg, psi),
    }
}

/// Runs the command and formats its report or error.
pub fn render(cfg: &CommandConfig) -> Outcome {
    match dispatch(cfg) {
        Ok(r) => Outcome { status: 0, text: render_report(r, cfg.format) },
        Err(e) => Outcome { status: exit_status(&e), text: error_line(&e, cfg.format) },
    }
}

/// Runs the command and writes the result; returns the exit status.
pub fn execute(cfg: &CommandConfig) -> i32 {
    let out = render(cfg);
    let written = match (&cfg.out, out.status) {
        (Some(path), 0) => std::fs::write(path, &out.text),
        _ => std::io::stdout().write_all(out.text.as_bytes()),
    };
    match written {
        Ok(()) => out.status,
        Err(e) => {
            let e = Error::Io(e);
            let _ = std::io::stderr().write_all(error_line(&e, cfg.format).as_bytes());
            exit_status(&e)
        }
    }
}
