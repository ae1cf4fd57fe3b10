use approx::assert_relative_eq;
use povtrap_core::special_functions::{
    gamma, hyp2f1, hyp2f1_derivative, hyp2f1_ln_positive, hyp2f1_regularized, ln_gamma, pochhammer, Hyp2f1Args,
};
use povtrap_core::Error;
use proptest::prelude::*;

fn f(a: f64, b: f64, c: f64, z: f64) -> f64 {
    hyp2f1(Hyp2f1Args::new(a, b, c, z)).unwrap()
}

// 50-digit mpmath values.
const TABLE: [(f64, f64, f64, f64, f64); 20] = [
    (0.3, 1.7, 2.4, 0.2, 1.0475492972966950554),
    (0.5, 0.5, 1.5, 0.45, 1.096142067557421519),
    (-2.5, 1.2, 3.3, 0.4, 0.68984875446763368723),
    (1.5, 2.5, 4.5, 0.7, 2.3579125866459211359),
    (0.2, 0.9, 1.4, 0.93, 1.2974279218138968927),
    (1.1, 2.2, 3.3, 0.99, 8.7756061702929075625),
    (0.7, 1.3, 2.0, 0.8, 1.9020668743951178295),
    (0.25, 0.75, 1.0, 0.6, 1.1785508021241589897),
    (2.0, 3.0, 4.0, -0.9, 0.37027340815442895397),
    (0.4, 0.6, 1.2, -12.0, 0.53410435742984167051),
    (1.2, 1.2, 2.4, -0.7, 0.71659317872351554016),
    (0.3, 0.3, 0.9, 0.97, 1.2652104931258303262),
    (-0.5, 3.2, 1.7, -250.0, 22.455401432120608712),
    (0.8, 1.8, 0.8, 0.75, 12.125732532083185405),
    (5.0, 6.5, 3.25, 0.3, 29.510320035025406207),
    (0.1056, 0.3056, 1.1056, 0.5, 1.0180647272749649412),
    (0.5, 1.5, 2.0, 0.999, 4.8928107466753805023),
    (1.0, 1.0, 2.0, -4.5, 0.37883290938631671881),
    (3.0, -4.0, 1.5, 0.85, 0.024038095238095238569),
    (0.9, 40.0, 0.8, 0.3, 2269553.7326433242721),
];

#[test]
fn matches_high_precision_table() {
    for (a, b, c, z, want) in TABLE {
        let got = f(a, b, c, z);
        assert_relative_eq!(got, want, max_relative = 1e-10);
    }
}

#[test]
fn elementary_values() {
    assert_eq!(f(0.3, 0.4, 0.5, 0.0), 1.0);
    assert_relative_eq!(f(1.0, 2.0, 2.0, 0.5), 2.0, max_relative = 1e-14);
    assert_relative_eq!(f(1.0, 1.0, 2.0, 0.5), 2.0 * core::f64::consts::LN_2, max_relative = 1e-14);
}

#[test]
fn pfaff_oracle_at_negative_argument() {
    assert_relative_eq!(f(0.3, 1.7, 2.4, -3.0), 0.72052717996840225623, max_relative = 1e-12);
    assert_relative_eq!(f(0.3, 1.3, 1.6, -30.0), 0.39168702291839009244, max_relative = 1e-11);
}

#[test]
fn gauss_sum_at_one() {
    assert_relative_eq!(f(0.3, 0.4, 1.9, 1.0), 1.1151797887237771676, max_relative = 1e-12);
}

#[test]
fn branch_cut_and_poles_are_errors() {
    assert!(matches!(hyp2f1(Hyp2f1Args::new(0.3, 0.4, 1.9, 1.2)), Err(Error::Domain { .. })));
    assert!(matches!(hyp2f1(Hyp2f1Args::new(0.3, 0.4, -2.0, 0.2)), Err(Error::Pole { .. })));
    assert!(matches!(hyp2f1(Hyp2f1Args::new(0.3, 0.4, 0.5, 1.0)), Err(Error::Domain { .. })));
    // The series terminates before the pole.
    assert_relative_eq!(f(-1.0, 2.0, -3.0, 0.5), 1.0 + 1.0 / 3.0, max_relative = 1e-14);
}

#[test]
fn regularized_limit_at_negative_integer() {
    let v = hyp2f1_regularized(Hyp2f1Args::new(0.8, 1.3, -1.0, 0.25)).unwrap();
    assert_relative_eq!(v, 0.32655447618717864122, max_relative = 1e-11);
    let reg = hyp2f1_regularized(Hyp2f1Args::new(0.3, 1.7, 2.4, 0.2)).unwrap();
    assert_relative_eq!(reg, 1.0475492972966950554 / gamma(2.4).unwrap(), max_relative = 1e-12);
    assert_relative_eq!(hyp2f1_regularized(Hyp2f1Args::new(0.5, 0.7, 1.0, 0.0)).unwrap(), 1.0);
}

#[test]
fn derivative_oracle() {
    let d = hyp2f1_derivative(Hyp2f1Args::new(0.3, 1.7, 2.4, -0.4)).unwrap();
    assert_relative_eq!(d, 0.1492923311873538619, max_relative = 1e-11);
    let d0 = hyp2f1_derivative(Hyp2f1Args::new(0.3, 1.7, 2.4, 0.0)).unwrap();
    assert_relative_eq!(d0, 0.3 * 1.7 / 2.4, max_relative = 1e-14);
}

#[test]
fn ln_positive_large_parameter() {
    let v = hyp2f1_ln_positive(Hyp2f1Args::new(0.7999, 40003.2, 0.8, 0.5)).unwrap();
    assert_relative_eq!(v, 27728.104137193526693, max_relative = 1e-12);
    let w = hyp2f1_ln_positive(Hyp2f1Args::new(0.7999, 40004.2, 1.8, 0.5)).unwrap();
    assert_relative_eq!(w, 27717.977431095238658, max_relative = 1e-12);
    let small = hyp2f1_ln_positive(Hyp2f1Args::new(0.3, 1.7, 2.4, 0.2)).unwrap();
    assert_relative_eq!(small, 1.0475492972966950554f64.ln(), max_relative = 1e-12);
}

#[test]
fn ln_gamma_values() {
    assert_eq!(ln_gamma(1.0).unwrap().0, 0.0);
    assert_relative_eq!(ln_gamma(5.0).unwrap().0, 24f64.ln(), max_relative = 1e-14);
    assert_relative_eq!(ln_gamma(0.5).unwrap().0, core::f64::consts::PI.sqrt().ln(), max_relative = 1e-14);
    let cases = [
        (0.001, 6.9071788853838536617),
        (0.3, 1.0957979948180755606),
        (2.5, 0.28468287047291915963),
        (10.1, 13.027526738633237155),
        (170.0, 701.43726380873708535),
    ];
    for (x, want) in cases {
        assert_relative_eq!(ln_gamma(x).unwrap().0, want, max_relative = 1e-13);
    }
    let (v, s) = ln_gamma(-0.5).unwrap();
    assert_relative_eq!(v, 1.2655121234846453965, max_relative = 1e-13);
    assert_eq!(s, -1.0);
    let (v, s) = ln_gamma(-2.3).unwrap();
    assert_relative_eq!(v, 0.36956666345500803746, max_relative = 1e-13);
    assert_eq!(s, -1.0);
    assert!(matches!(ln_gamma(-3.0), Err(Error::Pole { .. })));
    assert!(matches!(ln_gamma(0.0), Err(Error::Pole { .. })));
}

#[test]
fn pochhammer_is_rising_factorial() {
    assert_eq!(pochhammer(3.0, 0), 1.0);
    assert_relative_eq!(pochhammer(0.5, 3), 0.5 * 1.5 * 2.5, max_relative = 1e-15);
    assert_relative_eq!(pochhammer(1.0, 5), 120.0, max_relative = 1e-15);
}

fn gauss_sum(a: f64, b: f64, c: f64) -> f64 {
    let lg = |x: f64| ln_gamma(x).unwrap();
    let (l1, s1) = lg(c);
    let (l2, s2) = lg(c - a - b);
    let (l3, s3) = lg(c - a);
    let (l4, s4) = lg(c - b);
    s1 * s2 * s3 * s4 * (l1 + l2 - l3 - l4).exp()
}

proptest! {
    #[test]
    fn symmetric_in_a_and_b(a in -3.0..3.0f64, b in -3.0..3.0f64, c in 0.3..4.0f64, z in -20.0..0.99f64) {
        let l = hyp2f1(Hyp2f1Args::new(a, b, c, z));
        let r = hyp2f1(Hyp2f1Args::new(b, a, c, z));
        match (l, r) {
            (Ok(l), Ok(r)) => prop_assert_eq!(l.to_bits(), r.to_bits()),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "asymmetric success"),
        }
    }

    #[test]
    fn pfaff_invariance(a in -2.0..2.0f64, b in -2.0..2.0f64, c in 0.4..3.5f64, z in -0.9..0.45f64) {
        let lhs = f(a, b, c, z);
        let rhs = (1.0 - z).powf(-a) * f(a, c - b, c, z / (z - 1.0));
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1e-3), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn gauss_summation(a in -2.0..2.0f64, b in -2.0..2.0f64, extra in 0.1..3.0f64) {
        let c = a + b + extra;
        let near_pole = |v: f64| v < 0.5 && (v - v.round()).abs() < 1e-3;
        prop_assume!(c > 0.05 && !near_pole(c - a) && !near_pole(c - b));
        let direct = f(a, b, c, 1.0);
        let want = gauss_sum(a, b, c);
        prop_assert!((direct - want).abs() <= 1e-9 * want.abs().max(1e-12), "{} vs {}", direct, want);
    }

    #[test]
    fn derivative_matches_finite_difference(a in -2.0..2.0f64, b in -2.0..2.0f64, c in 0.5..3.5f64, z in -0.9..0.9f64) {
        let d = hyp2f1_derivative(Hyp2f1Args::new(a, b, c, z)).unwrap();
        let h = 1e-6;
        let fd = (f(a, b, c, z + h) - f(a, b, c, z - h)) / (2.0 * h);
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1e-2), "{} vs {}", d, fd);
    }

    #[test]
    fn log_identity(z in -5.0..0.95f64) {
        prop_assume!(z.abs() > 1e-8);
        let want = -(-z).ln_1p() / z;
        prop_assert!((f(1.0, 1.0, 2.0, z) - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn continuous_across_seams(a in 0.1..2.0f64, b in 0.1..2.0f64, c in 0.6..3.5f64) {
        for seam in [0.5, -1.0] {
            let lo = f(a, b, c, seam - 1e-12);
            let hi = f(a, b, c, seam + 1e-12);
            prop_assert!((lo - hi).abs() <= 1e-9 * lo.abs().max(1e-3));
        }
    }
}
