use approx::assert_relative_eq;
use povtrap_core::capital_model::ModelParams;
use povtrap_core::closed_form::{
    ep_constants_constant_rate, ep_constants_exponential_rate, ep_probability_constant, ep_probability_exponential,
    exponents, laplace_trapping, trapping_constants, trapping_constants_with_basis, trapping_probability, Branch,
    EpConstants, MidBasis, TrappingConstants, TrappingSolution,
};
use povtrap_core::monte_carlo::adaptive_simpson;
use proptest::prelude::*;

fn reference() -> ModelParams {
    ModelParams::from_micro(0.1, 4.0, 0.4, 1.0, 0.8, 1.0, 2.0, 0.25).unwrap()
}

fn solved(p: &ModelParams, delta: f64) -> TrappingConstants {
    match trapping_constants(p, delta).unwrap() {
        TrappingSolution::Solved(c) => c,
        TrappingSolution::Certain => panic!("unexpected certain trapping"),
    }
}

// mpmath, 30 digits, constants from the same linear system with numerically
// differentiated basis functions.
#[test]
fn trapping_probability_reference_values() {
    let p = reference();
    let want = [
        (1.1, 0.95519919548079618),
        (1.5, 0.9179565382050622),
        (2.0, 0.88493747267224172),
        (3.0, 0.84205399135899428),
        (5.0, 0.79406573821083265),
    ];
    for (x, v) in want {
        assert_relative_eq!(trapping_probability(&p, x).unwrap(), v, max_relative = 1e-11);
    }
    assert_eq!(trapping_probability(&p, 0.5).unwrap(), 1.0);
}

#[test]
fn laplace_reference_constants() {
    let c = solved(&reference(), 0.1);
    assert_eq!(c.basis, MidBasis::Infinity);
    assert_relative_eq!(c.a2_u, 0.76311930581522594, max_relative = 1e-11);
    assert_relative_eq!(c.a1_l, -0.075179513593847152, max_relative = 1e-10);
    assert_relative_eq!(c.a2_l, 0.91715961181784946, max_relative = 1e-11);
    for r in c.residuals {
        assert!(r.abs() < 1e-9, "{r}");
    }
    let want = [(1.0, 0.8406241195197604), (1.5, 0.73502819882638526), (2.0, 0.6713069145664933), (3.0, 0.59439562061081313)];
    for (x, v) in want {
        assert_relative_eq!(c.value(x).unwrap(), v, max_relative = 1e-11);
    }
}

#[test]
fn ep_constant_reference_values() {
    let p = reference();
    let want = [
        (0.1, 0.79766955778416088),
        (0.5, 0.79175265716352922),
        (1.0, 0.76433157463178715),
        (1.5, 0.7252968374857057),
        (2.0, 0.6992077768265636),
        (3.0, 0.6653246330366693),
    ];
    for (x, v) in want {
        assert_relative_eq!(ep_probability_constant(&p, 0.02, 0.0, x).unwrap(), v, max_relative = 1e-10);
    }
    let want = [(0.5, 0.28844400506363768), (1.5, 0.2095671046688224), (3.0, 0.16947073518829519)];
    for (x, v) in want {
        assert_relative_eq!(ep_probability_constant(&p, 0.05, 0.1, x).unwrap(), v, max_relative = 1e-10);
    }
}

#[test]
fn ep_exponential_reference_values() {
    let p = reference();
    let want = [
        (0.1, 0.93296177157311086),
        (0.5, 0.92253893307948372),
        (1.0, 0.89218163400807997),
        (1.5, 0.84661754019598785),
        (2.0, 0.81616455154401113),
        (3.0, 0.77661376024461762),
    ];
    for (x, v) in want {
        assert_relative_eq!(ep_probability_exponential(&p, 0.02, x).unwrap(), v, max_relative = 1e-10);
    }
}

#[test]
fn exponent_pairs() {
    let (a, b) = exponents(1.44, 1.0, 0.8, 0.0);
    assert_eq!(a, 0.0);
    assert_relative_eq!(b, 0.8 - 1.0 / 1.44, max_relative = 1e-14);
    let (a, b) = exponents(1.19, 1.0, 0.8, 0.0);
    assert_relative_eq!(a, 0.8 - 1.0 / 1.19, max_relative = 1e-14);
    assert_eq!(b, 0.0);
    let (a, b) = exponents(1.44, 1.0, 0.8, 0.3);
    assert_relative_eq!(a * b, -0.8 * 0.3 / 1.44, max_relative = 1e-14);
    assert_relative_eq!(a + b, -(0.3 + 1.0 - 0.8 * 1.44) / 1.44, max_relative = 1e-14);
}

#[test]
fn certain_trapping_without_net_profit() {
    let p = reference().with_alpha(0.6).unwrap();
    assert!(matches!(trapping_constants(&p, 0.0).unwrap(), TrappingSolution::Certain));
    for x in [1.0, 1.5, 10.0, 1e6] {
        assert_eq!(trapping_probability(&p, x).unwrap(), 1.0);
    }
    assert!(laplace_trapping(&p, 0.1, 3.0).unwrap() < 1.0);
    assert!(ep_probability_constant(&p, 0.02, 0.0, 1.5).unwrap_err().is_validation());
}

#[test]
fn closed_forms_reject_zero_transfers() {
    let p = reference().with_c_t(0.0).unwrap();
    assert!(trapping_probability(&p, 1.5).unwrap_err().is_validation());
    assert!(ep_probability_constant(&p, 0.02, 0.0, 1.5).unwrap_err().is_validation());
}

#[test]
fn laplace_decreasing_in_delta_and_limit() {
    let p = reference();
    for x in [1.5, 3.0] {
        let psi = trapping_probability(&p, x).unwrap();
        assert_relative_eq!(laplace_trapping(&p, 0.0, x).unwrap(), psi, max_relative = 1e-10);
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            let v = laplace_trapping(&p, 0.01 * i as f64, x).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let tiny = laplace_trapping(&p, 1e-9, x).unwrap();
        assert!((tiny - psi).abs() < 1e-7);
    }
}

#[test]
fn decays_at_infinity() {
    let p = reference();
    let far = [1e2, 1e4, 1e8].map(|x| trapping_probability(&p, x).unwrap());
    assert!(far[0] > far[1] && far[1] > far[2]);
    assert!(laplace_trapping(&p, 0.1, 1e8).unwrap() < 0.01);
}

#[test]
fn agrees_across_bases() {
    let p = reference();
    let inf = trapping_constants_with_basis(&p, 0.05, MidBasis::Infinity).unwrap();
    let one = trapping_constants_with_basis(&p, 0.05, MidBasis::One).unwrap();
    assert!(trapping_constants_with_basis(&p, 0.05, MidBasis::Zero).is_err());
    for x in [1.0, 1.3, 1.9, 2.5] {
        assert_relative_eq!(inf.value(x).unwrap(), one.value(x).unwrap(), max_relative = 1e-11);
    }
    let fast = p.with_c_t(10.0).unwrap();
    let zero = trapping_constants_with_basis(&fast, 0.05, MidBasis::Zero).unwrap();
    let one = trapping_constants_with_basis(&fast, 0.05, MidBasis::One).unwrap();
    assert!(trapping_constants_with_basis(&fast, 0.05, MidBasis::Infinity).is_err());
    for x in [1.0, 1.3, 1.9, 2.5] {
        assert_relative_eq!(zero.value(x).unwrap(), one.value(x).unwrap(), max_relative = 1e-11);
    }
}

#[test]
fn transfer_rate_above_growth_rate() {
    let base = reference();
    for ct in [0.1, 1.0, 10.0, 100.0] {
        let p = base.with_c_t(ct).unwrap();
        let c = solved(&p, 0.0);
        for r in c.residuals {
            assert!(r.abs() < 1e-9, "c_t={ct}: {r}");
        }
    }
    for x in [1.0, 1.5, 3.0] {
        let v: Vec<f64> = [0.1, 1.0, 10.0, 100.0]
            .iter()
            .map(|&ct| trapping_probability(&base.with_c_t(ct).unwrap(), x).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] < w[0]), "{v:?}");
    }
}

#[test]
fn ep_residuals_and_lower_limit() {
    let p = reference();
    let c = ep_constants_constant_rate(&p, 0.05, 0.0).unwrap();
    for r in c.residuals {
        assert!(r.abs() < 1e-9, "{r}");
    }
    // ₂F₁ is 1 at the origin.
    let at_zero = c.particular + c.a_l();
    assert_relative_eq!(c.value(1e-300).unwrap(), at_zero, max_relative = 1e-12);
    assert!((0.0..=1.0).contains(&at_zero));
    let e = ep_constants_exponential_rate(&p, 0.02).unwrap();
    for r in e.residuals {
        assert!(r.abs() < 1e-9, "{r}");
    }
    assert_relative_eq!(e.value(1e-12).unwrap(), 1.0 + e.a_l() * (1e-12f64 / 2.0).powf(0.04), max_relative = 1e-9);
}

#[test]
fn ep_ordering_in_rate() {
    let p = reference();
    for x in [0.5f64, 1.0, 1.5, 3.0, 6.0] {
        let psi = trapping_probability(&p, x.max(1.0)).unwrap();
        let mut prev = 0.0;
        for w in [0.02, 0.05, 0.09, 1e2, 1e4] {
            let v = ep_probability_constant(&p, w, 0.0, x).unwrap();
            assert!(v >= prev, "x={x} w={w}");
            if x >= 1.0 {
                assert!(v <= psi + 1e-12);
            }
            prev = v;
        }
        if x >= 1.0 {
            assert!(psi - prev < 0.05);
        }
    }
}

#[test]
fn exponential_rate_dominates_constant() {
    let p = reference();
    for x in [0.1, 0.5, 0.9, 1.0, 1.5, 3.0] {
        let e = ep_probability_exponential(&p, 0.02, x).unwrap();
        let c = ep_probability_constant(&p, 0.02, 0.0, x).unwrap();
        assert!(e >= c, "x={x}");
    }
}

type Piecewise<'a> = &'a dyn Fn(Branch, f64) -> f64;

fn branch_of(p: &ModelParams, x: f64) -> Branch {
    if x >= p.barrier() {
        Branch::Upper
    } else if x >= p.x_star() {
        Branch::Mid
    } else {
        Branch::Lower
    }
}

fn jump_integral(m: Piecewise, p: &ModelParams, x: f64) -> f64 {
    // ∫₀¹ m(xz) α z^{α-1} dz = ∫₀¹ m(x u^{1/α}) du, one analytic piece per regime.
    let mut cuts = vec![0.0];
    for level in [p.x_star(), p.barrier()] {
        if level < x {
            cuts.push((level / x).powf(p.alpha()));
        }
    }
    cuts.push(1.0);
    cuts.windows(2)
        .map(|w| {
            let branch = branch_of(p, x * (0.5 * (w[0] + w[1])).powf(1.0 / p.alpha()));
            let g = |u: f64| m(branch, (x * u.powf(1.0 / p.alpha())).max(1e-300));
            if w[0] == 0.0 {
                // u = w₁ t⁴ smooths the power-law behaviour at the origin.
                let h = |t: f64| 4.0 * w[1] * t.powi(3) * g(w[1] * t.powi(4));
                adaptive_simpson(&h, 0.0, 1.0, 1e-12).unwrap()
            } else {
                adaptive_simpson(&g, w[0], w[1], 1e-12).unwrap()
            }
        })
        .sum()
}

fn residual(m: Piecewise, p: &ModelParams, delta: f64, omega: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let h = 1e-6 * x;
    let b = branch_of(p, x);
    let dm = (m(b, x + h) - m(b, x - h)) / (2.0 * h);
    let j = jump_integral(m, p, x);
    let v = m(b, x);
    let w = if x < p.x_star() { omega(x) } else { 0.0 };
    p.drift(x) * dm + p.lambda() * (j - v) - delta * v + w * (1.0 - v)
}

#[test]
fn trapping_solves_the_equation() {
    for (ct, delta) in [(0.25, 0.0), (0.25, 0.1), (10.0, 0.0), (10.0, 0.2)] {
        let p = reference().with_c_t(ct).unwrap();
        let c = solved(&p, delta);
        let m = |b: Branch, x: f64| c.branch(b, x).unwrap().0;
        let no_rate = |_: f64| 0.0;
        for x in [1.2, 1.7, 2.5, 4.0] {
            let r = residual(&m, &p, delta, &no_rate, x);
            assert!(r.abs() < 1e-7, "c_t={ct} delta={delta} x={x}: {r}");
        }
    }
}

fn check_ep(c: &EpConstants, p: &ModelParams, delta: f64, omega: &dyn Fn(f64) -> f64) {
    let m = |b: Branch, x: f64| c.branch(b, x).unwrap().0;
    for x in [0.3, 0.8, 1.2, 1.7, 2.5, 4.0] {
        let r = residual(&m, p, delta, omega, x);
        assert!(r.abs() < 1e-7, "x={x}: {r}");
    }
}

#[test]
fn ep_solves_the_equation() {
    let p = reference();
    check_ep(&ep_constants_constant_rate(&p, 0.02, 0.0).unwrap(), &p, 0.0, &|_| 0.02);
    check_ep(&ep_constants_constant_rate(&p, 0.5, 0.1).unwrap(), &p, 0.1, &|_| 0.5);
    check_ep(&ep_constants_exponential_rate(&p, 0.05).unwrap(), &p, 0.0, &|x| 0.05 / x);
    let fast = p.with_c_t(4.0).unwrap();
    check_ep(&ep_constants_constant_rate(&fast, 0.09, 0.0).unwrap(), &fast, 0.0, &|_| 0.09);
}

#[test]
fn ep_branches_meet() {
    let p = reference();
    let c = ep_constants_constant_rate(&p, 0.09, 0.0).unwrap();
    let (u, du) = c.branch(Branch::Upper, 2.0).unwrap();
    let (m, dm) = c.branch(Branch::Mid, 2.0).unwrap();
    assert!((u - m).abs() < 1e-12);
    assert_relative_eq!(du, dm, max_relative = 1e-10);
    let (m, dm) = c.branch(Branch::Mid, 1.0).unwrap();
    let (l, dl) = c.branch(Branch::Lower, 1.0).unwrap();
    assert!((m - l).abs() < 1e-12);
    assert_relative_eq!(0.25 * (dm - dl), 0.09 * (1.0 - m), max_relative = 1e-9);
}

#[test]
fn large_rate_is_stable() {
    let p = reference();
    let c = ep_constants_constant_rate(&p, 1e4, 0.0).unwrap();
    assert!(c.ln_lower_scale > 1e4);
    assert_eq!(c.a_l(), 0.0);
    let psi = trapping_probability(&p, 1.5).unwrap();
    let v = c.value(1.5).unwrap();
    assert!(v <= psi && psi - v < 1e-3);
    assert!(c.value(0.5).unwrap() > 0.999);
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.5..3.0f64, 0.3..1.5f64, 0.3..2.0f64, 1.05..3.0f64, 0.05..5.0f64).prop_filter_map(
        "valid with net profit",
        |(r, lambda, alpha, bf, ct)| {
            let p = ModelParams::new(r, lambda, alpha, 1.0, bf, ct).ok()?;
            ((r - ct).abs() > 0.05 && p.net_profit()).then_some(p)
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bounded_and_decreasing(p in params(), delta in prop::sample::select(vec![0.0, 0.05, 0.2])) {
        let c = match trapping_constants(&p, delta) {
            Ok(c) => c,
            Err(e) => return Err(TestCaseError::reject(format!("{e}"))),
        };
        let mut prev = 1.0;
        for i in 0..40 {
            let x = 1.0 + 0.1 * i as f64;
            let v = c.value(x).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            prop_assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn ep_below_trapping(p in params(), w in 0.01..5.0f64) {
        let (Ok(c), Ok(t)) = (ep_constants_constant_rate(&p, w, 0.0), trapping_constants(&p, 0.0)) else {
            return Err(TestCaseError::reject("singular"));
        };
        for lo in [0.2, 0.7] {
            let v = c.value(lo).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
        }
        for x in [1.0, 1.4, 2.2, 5.0] {
            prop_assert!(c.value(x).unwrap() <= t.value(x).unwrap() + 1e-10);
        }
    }
}
