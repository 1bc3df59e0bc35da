use num_complex::Complex64;

use circleforge::expsum::{
    classify_arc, major_arc_approx, peak_majorant, vk_integral, weyl_sum, Alpha, ArcKind,
};
use circleforge::moments::{correlation_l52, count_i1, count_i2, cube_multiplicity, hua_moment8};
use circleforge::reps::{pair_spectrum, rep_count_range, rep_count_single};
use circleforge::residue::{gauss_sum, leading_constant, wk_majorant};
use circleforge::series::{congruence_count, local_density, series_term, truncated_singular_series};
use circleforge::Error;

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() < 1e-12
}

#[test]
fn gauss_sum_examples() {
    let g = |k, q, a| gauss_sum(k, q, a).unwrap().value;
    assert!(close(g(3, 1, 1), Complex64::new(1.0, 0.0)));
    assert!(close(g(2, 2, 1), Complex64::new(0.0, 0.0)));
    assert!(close(g(2, 4, 1), Complex64::new(2.0, 2.0)));
    assert!(close(g(3, 3, 1), Complex64::new(0.0, 0.0)));
    assert!(matches!(gauss_sum(2, 4, 2), Err(Error::Precondition(_))));
}

#[test]
fn majorant_examples() {
    let w = |k, q| wk_majorant(k, q).unwrap().value;
    assert_eq!(w(2, 1), 1.0);
    assert!((w(2, 3) - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    assert!((w(2, 4) - 0.5).abs() < 1e-12);
}

#[test]
fn leading_constant_value() {
    let c = leading_constant();
    assert!((c.value - 0.5390214963).abs() < 1e-9);
    assert!((c.value - c.gamma_product_form).abs() < 1e-12);
}

#[test]
fn series_examples() {
    for n in [0i64, 1, 17, 1000] {
        assert!((series_term(1, n).unwrap().value - 1.0).abs() < 1e-12);
        assert!(series_term(2, n).unwrap().value.abs() < 1e-12);
    }
    let lhs = series_term(6, 10).unwrap().value;
    let rhs = series_term(2, 10).unwrap().value * series_term(3, 10).unwrap().value;
    assert!((lhs - rhs).abs() < 1e-12);

    assert_eq!(congruence_count(1, 0).unwrap().count, 1);
    assert_eq!(congruence_count(2, 0).unwrap().count, 32);
    assert_eq!(congruence_count(2, 1).unwrap().count, 32);
    let mut brute = 0u128;
    let cube = |x: u64| x.pow(3) % 9;
    let sixth = |x: u64| x.pow(6) % 9;
    for a in 0..9u64 {
        for b in 0..9u64 {
            for c in 0..9u64 {
                for d in 0..9u64 {
                    for e in 0..9u64 {
                        for f in 0..9u64 {
                            let s = a * a + b * b + cube(c) + cube(d) + sixth(e) + sixth(f);
                            brute += u128::from(s % 9 == 4);
                        }
                    }
                }
            }
        }
    }
    assert_eq!(congruence_count(9, 4).unwrap().count, brute);

    assert_eq!(truncated_singular_series(100, 1).unwrap().value, 1.0);
    assert!((truncated_singular_series(100, 2).unwrap().value - 1.0).abs() < 1e-12);
    let s1 = truncated_singular_series(6, 1000).unwrap().value;
    let s2 = truncated_singular_series(6, 2000).unwrap().value;
    assert!(s1 > 0.0 && (s1 - s2).abs() < 5e-4);

    assert!((local_density(2, 1, 1).unwrap() - 1.0).abs() < 1e-12);
    assert!(local_density(1009, 1, 2).is_err());
    assert!(local_density(1011, 1, 1).is_err());
    assert!(local_density(4, 1, 1).is_err());
    for h in [1u32, 2] {
        let divisors: f64 = (0..=h).map(|j| series_term(3u64.pow(j), 6).unwrap().value).sum();
        assert!((local_density(3, 6, h).unwrap() - divisors).abs() < 1e-8);
    }
}

#[test]
fn spectrum_and_count_examples() {
    let s = pair_spectrum(6, 1).unwrap();
    assert_eq!(s.get(2), 1);
    assert_eq!(s.total(), 1);
    let s = pair_spectrum(6, 2).unwrap();
    assert_eq!((s.get(2), s.get(65), s.get(128)), (1, 2, 1));
    let s = pair_spectrum(2, 3).unwrap();
    assert_eq!(s.total(), 9);
    for (m, c) in [(2, 1), (5, 2), (8, 1), (10, 2), (13, 2), (18, 1)] {
        assert_eq!(s.get(m), c);
    }

    let r = |n| rep_count_single(n).unwrap();
    assert_eq!((r(5), r(6), r(7), r(9)), (0, 1, 0, 2));
    let range = rep_count_range(20).unwrap();
    for n in 1..=20 {
        assert_eq!(u64::from(range.get(n)), r(n), "n = {n}");
    }
}

#[test]
fn moment_examples() {
    assert_eq!(count_i2(1).unwrap().count, 1);
    assert_eq!(count_i2(2).unwrap().count, 6);
    assert_eq!(count_i1(1).unwrap().count, 1);
    assert_eq!(hua_moment8(1).unwrap().count, 1);
    assert_eq!(hua_moment8(2).unwrap().count, 70);
    assert!(cube_multiplicity(2).unwrap().members.is_empty());
    assert!(cube_multiplicity(16).unwrap().members.contains(&721));
    assert_eq!(correlation_l52(37, &[600_000]).unwrap().count, 37);
    assert!(correlation_l52(10, &[600_000, 600_000]).is_err());
}

#[test]
fn weyl_and_vk_examples() {
    for k in [2, 3, 6] {
        assert!(close(weyl_sum(k, 17, Alpha::Real(0.0)).unwrap(), Complex64::new(17.0, 0.0)));
        let v = vk_integral(k, 40.0, 0.0).unwrap();
        assert!((v - Complex64::new(40.0, 0.0)).norm() < 1e-6);
        assert!(close(major_arc_approx(k, 1, 1, 0.0, 40.0).unwrap(), Complex64::new(40.0, 0.0)));
    }
    let half = Alpha::Rational { num: 1, den: 2 };
    assert!(close(weyl_sum(2, 10, half).unwrap(), Complex64::new(0.0, 0.0)));
    assert!(close(weyl_sum(2, 11, half).unwrap(), Complex64::new(-1.0, 0.0)));
    assert!(major_arc_approx(2, 2, 1, 0.0, 100.0).unwrap().norm() < 1e-12);

    let direct: Complex64 = (1..=10u64)
        .map(|x| {
            let m = x.pow(6) % 3;
            Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 / 3.0)
        })
        .sum();
    let third = Alpha::Rational { num: 1, den: 3 };
    assert!(close(weyl_sum(6, 10, third).unwrap(), direct));
}

#[test]
fn arc_examples() {
    let l = classify_arc(Alpha::Real(0.0), 10.0, 10_000, 2).unwrap();
    assert_eq!((l.q, l.a, l.kind), (1, 0, ArcKind::Major));
    let l = classify_arc(Alpha::Rational { num: 1, den: 2 }, 2.0, 100, 2).unwrap();
    assert_eq!((l.q, l.a), (2, 1));
    let l = classify_arc(Alpha::Rational { num: 2, den: 4 }, 8.0, 100, 2);
    assert!(l.is_err() || l.unwrap().q == 2);
    assert!(classify_arc(Alpha::Real(0.1), 30.0, 100, 2).is_err());

    let p2 = 100;
    assert!((peak_majorant(1.0 / 3.0, 3, 1, p2) - 100.0 / 3f64.sqrt()).abs() < 1e-9);
    assert!(peak_majorant(1.0 / 3.0 + 1e-5, 3, 1, p2) < peak_majorant(1.0 / 3.0 + 1e-6, 3, 1, p2));
}
