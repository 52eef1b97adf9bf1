use proptest::prelude::*;
use segrad_core::model::{reaction_f, reaction_g, Bistable};
use segrad_core::{ModelParams, PiecewiseCapacity, Side, SpeciesPair};

/// Composite 7-point Gauss-Legendre on `n` panels.
fn gl7(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    const X: [f64; 4] = [
        0.0,
        0.405_845_151_377_397_2,
        0.741_531_185_599_394_4,
        0.949_107_912_342_758_5,
    ];
    const W: [f64; 4] = [
        0.417_959_183_673_469_4,
        0.381_830_050_505_118_9,
        0.279_705_391_489_276_7,
        0.129_484_966_168_869_7,
    ];
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for k in 0..n {
        let m = a + (k as f64 + 0.5) * h;
        let r = 0.5 * h;
        s += W[0] * f(m);
        for j in 1..4 {
            s += W[j] * (f(m - r * X[j]) + f(m + r * X[j]));
        }
    }
    s * 0.5 * h
}

/// Integral split at the kink so each piece is a polynomial.
fn integral_from_zero(f: impl Fn(f64) -> f64, w: f64) -> f64 {
    gl7(f, 0.0, w, 16)
}

prop_compose! {
    fn params()(b1 in 0.6..2.0f64, r1 in 0.05..0.9f64, b2 in 0.6..2.0f64, r2 in 0.05..0.9f64,
                b3f in 0.3..0.98f64, d3f in 0.0..1.0f64, c in 0.5..50.0f64) -> ModelParams {
        let b3 = b3f * b2;
        let d2 = r2 * b3;
        let d3 = d2 + (0.01 + 0.98 * d3f) * (b3 - d2);
        ModelParams { b1, b2, b3, d1: r1 * b1, d2, d3, c, diffusion: 0.5 }
    }
}

prop_compose! {
    fn caps()(a in 0.5..20.0f64, b in 0.5..20.0f64, c in 0.5..20.0f64, d in 0.5..20.0f64) -> PiecewiseCapacity {
        PiecewiseCapacity::new(a, b, c, d)
    }
}

fn side(f: bool) -> Side {
    if f { Side::F } else { Side::U }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn antiderivative_matches_quadrature(p in params(), k in caps(), w in -25.0..25.0f64, f in any::<bool>()) {
        let bs = Bistable::reduced(side(f), &p, &k);
        let q = integral_from_zero(|x| bs.f(x), w);
        let a = bs.antiderivative(w);
        prop_assert!((a - q).abs() <= 1e-10 * (1.0 + q.abs()), "{a} vs {q}");
    }

    #[test]
    fn infected_antiderivative_matches_quadrature(p in params(), k in caps(), w in -25.0..0.0f64, f in any::<bool>()) {
        let s = side(f);
        let bs = Bistable::new(s, SpeciesPair::P13, &p, &k);
        let q = integral_from_zero(|x| reaction_g(s, 1.0, x, &p, &k), w);
        prop_assert!((bs.antiderivative(w) - q).abs() <= 1e-10 * (1.0 + q.abs()));
    }

    #[test]
    fn bistable_sign_pattern(p in params(), k in caps(), t in 0.01..0.99f64, f in any::<bool>()) {
        let bs = Bistable::reduced(side(f), &p, &k);
        let (pos, neg) = (bs.positive_root(), bs.negative_root());
        prop_assert!(pos > 0.0 && neg < 0.0);
        prop_assert!(bs.f(t * pos) > 0.0);
        prop_assert!(bs.f(t * neg) < 0.0);
        prop_assert!(bs.f(pos * (1.0 + t)) < 0.0);
        prop_assert!(bs.f(neg * (1.0 + t)) > 0.0);
        prop_assert!(bs.f(pos).abs() < 1e-12 && bs.f(neg).abs() < 1e-12 && bs.f(0.0) == 0.0);
    }

    #[test]
    fn infection_weakens_the_competitor(p in params(), k in caps(), t in 0.01..0.99f64, f in any::<bool>()) {
        let s = side(f);
        let w = -t * k.k2(s);
        prop_assert!(reaction_g(s, 0.0, w, &p, &k) < reaction_g(s, 1.0, w, &p, &k));
    }

    #[test]
    fn uninfected_reaction_is_the_reduced_one(p in params(), k in caps(), w in -20.0..20.0f64, f in any::<bool>()) {
        let s = side(f);
        let a = reaction_g(s, 0.0, w, &p, &k);
        let b = reaction_f(s, w, &p, &k);
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn derivative_matches_finite_difference(p in params(), k in caps(), w in -20.0..20.0f64, f in any::<bool>()) {
        prop_assume!(w.abs() > 1e-3);
        let bs = Bistable::reduced(side(f), &p, &k);
        let h = 1e-5 * (1.0 + w.abs());
        let fd = (bs.f(w + h) - bs.f(w - h)) / (2.0 * h);
        prop_assert!((fd - bs.df(w)).abs() <= 1e-6 * (1.0 + bs.df(w).abs()));
    }

    #[test]
    fn energy_gap_is_a_difference(p in params(), k in caps(), a in -20.0..20.0f64, w in -20.0..20.0f64) {
        let bs = Bistable::reduced(Side::F, &p, &k);
        let d = bs.antiderivative(a) - bs.antiderivative(w);
        prop_assert!((bs.energy_gap(a, w) - d).abs() <= 1e-10 * (1.0 + d.abs() + bs.antiderivative(a).abs()));
    }
}

#[test]
fn reference_equilibrium_levels() {
    let p = ModelParams::reference();
    assert!((p.alpha1() * 10.0 - 7.589_285_714_285_714).abs() < 1e-12);
    assert!((p.alpha2() * 10.0 - 8.0).abs() < 1e-12);
    assert!((p.alpha3() * 10.0 - 22.0 / 3.0).abs() < 1e-12);
}
