//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use circleforge::arith::{gcd, prime_powers_up_to};
use circleforge::cache::{cached_pair_spectrum, read_spectrum, write_spectrum};
use circleforge::cli::{render, CommandConfig};
use circleforge::expsum::{major_arc_integral, pruned_integral_diagnostic, singular_integral_j, ExceptionalSample};
use circleforge::moments::{correlation_l52, count_i1, count_i2, cube_multiplicity, hua_moment8, log2_slopes};
use circleforge::reps::{pair_spectrum, rep_count_range, rep_count_single};
use circleforge::residue::leading_constant;
use circleforge::scan::{scan, PsiSpec};
use circleforge::series::{series_term, CongruenceCounter, SeriesEngine};

use clap::Parser;

type Outcome = std::result::Result<String, String>;

fn check(cond: bool, msg: String) -> Outcome {
    if cond {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let failed: Vec<String> = parts.iter().filter_map(|p| p.as_ref().err().cloned()).collect();
    let msgs: Vec<String> = parts.into_iter().map(|p| p.unwrap_or_else(|e| e)).collect();
    if failed.is_empty() {
        Ok(msgs.join("; "))
    } else {
        Err(format!("failed: {}", failed.join("; ")))
    }
}

fn e<T>(r: circleforge::Result<T>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

fn naive_range(x: u64) -> Vec<u64> {
    let mut r = vec![0u64; x as usize + 1];
    let lim = |k: u32| (1..).take_while(|&v: &u64| v.pow(k) <= x).last().unwrap_or(0);
    let (p2, p3, p6) = (lim(2), lim(3), lim(6));
    for x1 in 1..=p2 {
        for x2 in 1..=p2 {
            let s2 = x1 * x1 + x2 * x2;
            for x3 in 1..=p3 {
                for x4 in 1..=p3 {
                    let s3 = s2 + x3.pow(3) + x4.pow(3);
                    if s3 > x {
                        break;
                    }
                    for x5 in 1..=p6 {
                        for x6 in 1..=p6 {
                            let s = s3 + x5.pow(6) + x6.pow(6);
                            if s <= x {
                                r[s as usize] += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    r
}

fn criterion_1() -> Outcome {
    let c = leading_constant();
    let rel = (c.value - c.gamma_product_form).abs() / c.value;
    all(vec![
        check(rel <= 1e-12, format!("relative difference {rel:.2e}")),
        check((c.value - 0.5390).abs() <= 0.0005, format!("value {:.12}", c.value)),
    ])
}

fn criterion_2() -> Outcome {
    let fast = rep_count_range(2000).map_err(|e| e.to_string())?;
    let slow = naive_range(2000);
    let mismatches = (1..=2000).filter(|&n| fast.get(n) as u64 != slow[n as usize]).count();
    let big = rep_count_range(100_000).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut single_bad = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=100_000u64);
        if rep_count_single(n).map_err(|e| e.to_string())? != big.get(n) as u64 {
            single_bad += 1;
        }
    }
    all(vec![
        check(mismatches == 0, format!("range(2000) vs 6-loop: {mismatches} mismatches")),
        check(single_bad == 0, format!("single vs range on 200 n <= 1e5: {single_bad} mismatches")),
    ])
}

fn criterion_3() -> Outcome {
    let engine = SeriesEngine::new(10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ns: Vec<i64> = (0..20).map(|_| rng.random_range(1..=1_000_000i64)).collect();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for (p, h, q) in prime_powers_up_to(10_000) {
        let counter = CongruenceCounter::new(q).map_err(|e| e.to_string())?;
        for &n in &ns {
            let lhs: f64 = (0..=h)
                .map(|j| engine.term(p.pow(j), n))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?
                .iter()
                .sum();
            let rhs = counter.count(n).count as f64 / (q as f64).powi(5);
            worst = worst.max((lhs - rhs).abs());
            checked += 1;
        }
    }
    let mod2 = (0..2i64).all(|n| {
        let m = CongruenceCounter::new(2).unwrap().count(n).count;
        let a = series_term(1, n).unwrap().value + series_term(2, n).unwrap().value;
        m == 32 && a == 1.0
    });
    all(vec![
        check(worst <= 1e-8, format!("{checked} prime-power cases, worst deviation {worst:.2e}")),
        check(mod2, "A(1)+A(2)=1 and M_n(2)=32".into()),
    ])
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut pairs = 0;
    while pairs < 200 {
        let q1 = rng.random_range(2..=100u64);
        let q2 = rng.random_range(2..=10_000 / q1);
        if gcd(q1, q2) != 1 {
            continue;
        }
        let n = rng.random_range(1..=1_000_000i64);
        let t = |q| series_term(q, n).map(|t| t.value).map_err(|e| e.to_string());
        worst = worst.max((t(q1 * q2)? - t(q1)? * t(q2)?).abs());
        pairs += 1;
    }
    check(worst <= 1e-8, format!("200 coprime pairs, worst deviation {worst:.2e}"))
}

fn criterion_5() -> Outcome {
    let table = SeriesEngine::new(2000).table(2000).map_err(|e| e.to_string())?;
    let small = table.partial_sums_range(1, 10_000, 1000);
    let min = small.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ns: Vec<u64> = (0..100).map(|_| rng.random_range(1..=1_000_000u64)).collect();
    let median = |w_lo: u64, w_hi: u64| {
        let mut d: Vec<f64> = ns.iter().map(|&n| (table.partial_sum(n, w_hi) - table.partial_sum(n, w_lo)).abs()).collect();
        d.sort_by(f64::total_cmp);
        0.5 * (d[49] + d[50])
    };
    let (d1, d2) = (median(500, 1000), median(1000, 2000));
    all(vec![
        check(min > 0.05, format!("min S(n;1000) over n <= 1e4 is {min:.4}")),
        check(d2 < d1, format!("median tail {d1:.3e} (500->1000) then {d2:.3e} (1000->2000)")),
    ])
}

fn criterion_6() -> Outcome {
    let i2 = e(count_i2(2))?.count;
    let hua = e(hua_moment8(2))?.count;
    let i1 = e(count_i1(64))?.count;
    // x1^3 - x2^3 = y1^6 + y2^6 - y3^6 - y4^6 with x <= 4, y <= 2
    let mut brute = 0u128;
    for x1 in 1..=4i64 {
        for x2 in 1..=4i64 {
            for y in 0..16 {
                let ys: Vec<i64> = (0..4).map(|b| 1 + ((y >> b) & 1)).collect();
                if x1.pow(3) - x2.pow(3) == ys[0].pow(6) + ys[1].pow(6) - ys[2].pow(6) - ys[3].pow(6) {
                    brute += 1;
                }
            }
        }
    }
    let l52 = e(correlation_l52(50, &[100_000]))?.count;
    let has_721 = e(cube_multiplicity(16))?.members.contains(&721);
    all(vec![
        check(i2 == 6, format!("I2(2)={i2}")),
        check(hua == 70, format!("Hua8(2)={hua}")),
        check(i1 == brute, format!("I1(64)={i1}, brute force {brute}")),
        check(l52 == 50, format!("L52 singleton at P3=50: {l52}")),
        check(has_721, "721 in X at P3=16".into()),
    ])
}

fn criterion_7() -> Outcome {
    let i1 = e(count_i1(1_000_000))?.count as f64 / 1e4;
    let hua: Vec<(f64, f64)> = [25u64, 50, 100]
        .iter()
        .map(|&p| Ok((p as f64, e(hua_moment8(p))?.count as f64)))
        .collect::<Result<_, String>>()?;
    let hs = log2_slopes(&hua);
    let card: Vec<(f64, f64)> = [500u64, 1000, 2000]
        .iter()
        .map(|&p| Ok((p as f64, e(cube_multiplicity(p))?.members.len() as f64)))
        .collect::<Result<_, String>>()?;
    let cs = log2_slopes(&card);
    let i2 = e(count_i2(200))?.count as f64 / (2.0 * 200.0 * 200.0);
    all(vec![
        check(i1 <= 3.5, format!("I1(1e6)/X^(2/3)={i1:.3}")),
        check(hs.iter().all(|&s| s <= 5.0), format!("Hua slopes {:.3}, {:.3}", hs[0], hs[1])),
        check(cs.iter().all(|&s| s <= 1.6), format!("card slopes {:.3}, {:.3}", cs[0], cs[1])),
        check((i2 - 1.0).abs() <= 0.25, format!("I2/(2P^2) at P6=200: {i2:.4}")),
    ])
}

fn criterion_8() -> Outcome {
    let j = e(singular_integral_j(10_000, 10_000, 50, 10))?;
    let m = e(major_arc_integral(5000, 10_000, 3, 10))?;
    let z: Vec<u64> = {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut v: Vec<u64> = (0..100).map(|_| rng.random_range(5001..=10_000u64)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let t = e(pruned_integral_diagnostic(10_000, 50.0, &ExceptionalSample::new(z), 10))?;
    all(vec![
        check((j.ratio - 1.0).abs() <= 0.1, format!("J/(Gamma-product n)={:.5}", j.ratio)),
        check(j.halving_change <= 0.01, format!("J halving {:.1e}", j.halving_change)),
        check(
            m.halving_change_f <= 0.01 && m.halving_change_fstar <= 0.01,
            format!("peak-arc halving {:.1e}/{:.1e}", m.halving_change_f, m.halving_change_fstar),
        ),
        check(t.halving_change <= 0.02, format!("pruned halving {:.1e}", t.halving_change)),
    ])
}

fn criterion_9() -> Outcome {
    let psi = PsiSpec::LogPower(1.0);
    let mut medians = Vec::new();
    let mut props = Vec::new();
    for x in [10_000u64, 100_000, 1_000_000] {
        let r = scan(x, psi, 1000).map_err(|e| e.to_string())?;
        medians.push(r.rel_err_quantiles.p50);
        props.push(r.proportion());
    }
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    all(vec![
        check(dec(&medians), format!("median rel_err {:.4} > {:.4} > {:.4}", medians[0], medians[1], medians[2])),
        check(dec(&props), format!("E/X {:.4} > {:.4} > {:.4}", props[0], props[1], props[2])),
    ])
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dirs = dir.path().to_str().unwrap().to_string();
    let commands: Vec<Vec<&str>> = vec![
        vec!["gauss", "--k", "3", "--q", "91", "--a", "5"],
        vec!["gauss", "--kind", "survey", "--k", "6", "--limit", "100"],
        vec!["sseries", "--n", "12345", "--trunc", "200"],
        vec!["sseries", "--kind", "congruence", "--q", "9", "--n", "4", "--format", "csv"],
        vec!["count", "--n", "100000"],
        vec!["count", "--limit", "3000", "--format", "csv", "--cache-dir", &dirs],
        vec!["count", "--kind", "spectrum", "--k", "3", "--P", "30", "--cache-dir", &dirs],
        vec!["moments", "--kind", "l52", "--P", "100", "--limit", "1000000", "--sample", "200", "--seed", "11"],
        vec!["moments", "--kind", "multiplicity", "--P", "200"],
        vec!["arcs", "--kind", "pruned", "--limit", "1000", "--Q", "8", "--sample", "20", "--seed", "5"],
        vec!["arcs", "--kind", "integral", "--limit", "2000", "--format", "csv"],
        vec!["arcs", "--kind", "classify", "--alpha", "0.3183", "--Q", "20", "--limit", "1000"],
        vec!["predict", "--n", "99999", "--psi", "log^2"],
        vec!["scan", "--limit", "5000", "--psi", "pow:0.05", "--trunc", "100", "--format", "csv"],
    ];
    let mut diffs = Vec::new();
    for args in &commands {
        let mut full = vec!["circleforge"];
        full.extend_from_slice(args);
        let cfg = CommandConfig::try_parse_from(&full).map_err(|e| e.to_string())?;
        let (a, b) = (render(&cfg), render(&cfg));
        if a != b || a.status != 0 {
            diffs.push(args.join(" "));
        }
    }
    let mut cache_ok = true;
    for (k, p) in [(2u32, 300u64), (3, 40), (6, 6)] {
        let s = pair_spectrum(k, p).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        write_spectrum(&mut buf, &s).map_err(|e| e.to_string())?;
        cache_ok &= read_spectrum(&buf[..]).map_err(|e| e.to_string())? == s;
        let stored = cached_pair_spectrum(dir.path(), k, p).map_err(|e| e.to_string())?;
        let reread = cached_pair_spectrum(dir.path(), k, p).map_err(|e| e.to_string())?;
        cache_ok &= stored == s && reread == s;
    }
    all(vec![
        check(diffs.is_empty(), format!("{} commands byte-identical across runs {diffs:?}", commands.len())),
        check(cache_ok, "WSPC1 round-trips exact".into()),
    ])
}

type Criterion = (u32, &'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "leading-constant identity", criterion_1, 1),
        (2, "exact oracle equivalence", criterion_2, 60),
        (3, "divisor-sum identity", criterion_3, 300),
        (4, "multiplicativity of A(q;n)", criterion_4, 60),
        (5, "singular-series positivity and stability", criterion_5, 600),
        (6, "moment oracles", criterion_6, 60),
        (7, "moment trends", criterion_7, 600),
        (8, "quadrature contracts", criterion_8, 600),
        (9, "asymptotic convergence trend", criterion_9, 1800),
        (10, "determinism and cache round-trip", criterion_10, 600),
    ];
    let mut failed = 0;
    for (id, name, f, budget) in criteria {
        let t = Instant::now();
        let res = f();
        let dt = t.elapsed();
        let within = dt <= Duration::from_secs(budget);
        let (ok, msg) = match res {
            Ok(m) => (within, m),
            Err(m) => (false, m),
        };
        let timing = format!("{:.2}s of {budget}s", dt.as_secs_f64());
        println!("{} criterion {id} ({name}): {msg} [{timing}]", if ok { "PASS" } else { "FAIL" });
        failed += u32::from(!ok);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
