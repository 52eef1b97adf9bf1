use segrad_core::experiments::{CASE1_CAPS, CASE2_CAPS};
use segrad_core::invasion::{theta_threshold, Threshold};
use segrad_core::model::Bistable;
use segrad_core::stationary::*;
use segrad_core::{ModelParams, PiecewiseCapacity, Side, SpeciesPair};

fn gl7(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    const X: [f64; 4] = [0.0, 0.405_845_151_377_397_2, 0.741_531_185_599_394_4, 0.949_107_912_342_758_5];
    const W: [f64; 4] = [0.417_959_183_673_469_4, 0.381_830_050_505_118_9, 0.279_705_391_489_276_7, 0.129_484_966_168_869_7];
    let h = (b - a) / n as f64;
    let mut s = 0.0;
    for k in 0..n {
        let m = a + (k as f64 + 0.5) * h;
        s += W[0] * f(m);
        for j in 1..4 {
            s += W[j] * (f(m - 0.5 * h * X[j]) + f(m + 0.5 * h * X[j]));
        }
    }
    0.5 * h * s
}

/// `∫_0^w f` by quadrature, each branch being a polynomial.
fn prim(bs: &Bistable, w: f64) -> f64 {
    gl7(&|z| bs.f(z), 0.0, w, 4)
}

struct Setup {
    p: ModelParams,
    forest: Bistable,
    urban: Bistable,
    left: f64,
    right: f64,
}

fn setup(caps: &PiecewiseCapacity, regime: Regime) -> Setup {
    let p = ModelParams::reference();
    let forest = Bistable::reduced(Side::F, &p, caps);
    let urban = Bistable::reduced(Side::U, &p, caps);
    let left = caps.k1(Side::F) * p.alpha1();
    let right = match regime {
        Regime::Bb => -caps.k2(Side::U) * p.alpha2(),
        Regime::Th2 => caps.k1(Side::U) * p.alpha1(),
    };
    Setup { p, forest, urban, left, right }
}

/// Independent matching function built from quadrature.
fn h_oracle(s: &Setup, w: f64) -> f64 {
    (prim(&s.forest, s.left) - prim(&s.forest, w)) - (prim(&s.urban, s.right) - prim(&s.urban, w))
}

fn scan_root(s: &Setup, n: usize) -> f64 {
    let (lo, hi) = (s.left.min(s.right), s.left.max(s.right));
    let step = (hi - lo) / n as f64;
    let mut prev = (lo, h_oracle(s, lo));
    for k in 1..=n {
        let x = lo + k as f64 * step;
        let v = h_oracle(s, x);
        if prev.1 * v <= 0.0 {
            return prev.0 - prev.1 * (x - prev.0) / (v - prev.1);
        }
        prev = (x, v);
    }
    panic!("no sign change");
}

#[test]
fn matching_value_agrees_with_a_dense_scan() {
    for (caps, regime) in [(CASE1_CAPS, Regime::Bb), (CASE2_CAPS, Regime::Th2)] {
        let s = setup(&caps, regime);
        let w = matching_value_solve(&s.p, &caps, regime).unwrap();
        let scan = scan_root(&s, 100_000);
        assert!((w - scan).abs() <= 1e-7, "{regime:?}: {w} vs {scan}");
    }
}

#[test]
fn matching_function_changes_sign_between_the_limits() {
    let s = setup(&CASE1_CAPS, Regime::Bb);
    let m = Matching::new(&s.p, &CASE1_CAPS, Regime::Bb).unwrap();
    assert!(m.h(s.right) < 0.0 && m.h(s.left) > 0.0);
    for w in [-7.0, -3.0, 0.0, 2.5, 6.0] {
        // the oracle is written as the energy difference, which is −H
        assert!((m.h(w) + h_oracle(&s, w)).abs() < 1e-10);
    }
}

#[test]
fn two_bracketings_give_the_same_front() {
    let p = ModelParams::reference();
    let m = Matching::new(&p, &CASE1_CAPS, Regime::Bb).unwrap();
    let a = m.solve_in(m.right_limit, m.left_limit).unwrap();
    let b = m.solve_in(-1.5, 0.5).unwrap();
    let fa = front_from_value(&p, &m, Regime::Bb, a, 40.0, 0.01).unwrap();
    let fb = front_from_value(&p, &m, Regime::Bb, b, 40.0, 0.01).unwrap();
    let d = fa.profile.iter().zip(&fb.profile).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    assert!(d <= 1e-8, "{d}");
}

fn fronts() -> Vec<(Regime, PiecewiseCapacity, StationaryFront)> {
    let p = ModelParams::reference();
    [(Regime::Bb, CASE1_CAPS), (Regime::Th2, CASE2_CAPS)]
        .into_iter()
        .map(|(r, c)| (r, c, front_construct(&p, &c, r, 40.0, 0.0025).unwrap()))
        .collect()
}

#[test]
fn front_solves_the_stationary_equation() {
    for (regime, caps, f) in fronts() {
        let s = setup(&caps, regime);
        let n = f.len() / 2;
        let h = f.mesh_step;
        let v = &f.profile;
        let mut worst = 0.0f64;
        for j in 1..f.len() - 1 {
            // skip the interface node and stencils across the kink of f
            if j == n || v[j - 1] * v[j + 1] <= 0.0 {
                continue;
            }
            let bs = if j < n { &s.forest } else { &s.urban };
            let d2 = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
            worst = worst.max((s.p.diffusion * d2 + bs.f(v[j])).abs());
        }
        assert!(worst <= 1e-4, "{regime:?}: residual {worst}");
    }
}

#[test]
fn energy_is_constant_on_each_half_line() {
    for (regime, caps, f) in fronts() {
        let s = setup(&caps, regime);
        let n = f.len() / 2;
        let h = f.mesh_step;
        let v = &f.profile;
        let mut worst = 0.0f64;
        for j in 2..f.len() - 2 {
            if (j as isize - n as isize).abs() <= 2 || v[j - 2] * v[j + 2] <= 0.0 {
                continue;
            }
            let d1 = (-v[j + 2] + 8.0 * v[j + 1] - 8.0 * v[j - 1] + v[j - 2]) / (12.0 * h);
            let (bs, lim) = if j < n { (&s.forest, s.left) } else { (&s.urban, s.right) };
            let e = 0.5 * s.p.diffusion * d1 * d1 + prim(bs, v[j]) - prim(bs, lim);
            worst = worst.max(e.abs());
        }
        assert!(worst <= 1e-6, "{regime:?}: energy defect {worst}");
    }
}

#[test]
fn one_sided_derivatives_match_at_the_interface() {
    for (regime, caps, f) in fronts() {
        let s = setup(&caps, regime);
        let w = f.matching_value;
        let d = s.p.diffusion;
        let left = (2.0 * (prim(&s.forest, s.left) - prim(&s.forest, w)) / d).sqrt();
        let right = (2.0 * (prim(&s.urban, s.right) - prim(&s.urban, w)) / d).sqrt();
        assert!((left - right).abs() <= 1e-8, "{regime:?}: {left} vs {right}");
        assert!((f.derivative_at_zero.abs() - right).abs() <= 1e-8);
        assert!(f.derivative_at_zero < 0.0);
        assert_eq!(f.profile[f.len() / 2], w);
    }
}

#[test]
fn front_is_decreasing_with_the_stated_limits() {
    for (regime, _, f) in fronts() {
        for w in f.profile.windows(2) {
            assert!(w[1] - w[0] <= 1e-12);
            if w[0] != f.left_limit && w[1] != f.right_limit {
                assert!(w[1] < w[0], "{regime:?}: not strictly decreasing");
            }
        }
        let (want_l, want_r) = match regime {
            Regime::Bb => (7.589_285_714, -8.0),
            Regime::Th2 => (7.589_285_714, 5.312_5),
        };
        assert!((f.profile[0] - want_l).abs() <= 1e-4);
        assert!((f.profile[f.len() - 1] - want_r).abs() <= 1e-4);
    }
}

#[test]
fn front_crosses_both_thresholds() {
    let p = ModelParams::reference();
    let f = front_construct(&p, &CASE1_CAPS, Regime::Bb, 40.0, 0.01).unwrap();
    let tf = theta_threshold(Threshold::Forest, &p, &CASE1_CAPS, SpeciesPair::P12).unwrap();
    let tu = theta_threshold(Threshold::Urban, &p, &CASE1_CAPS, SpeciesPair::P12).unwrap();
    let n = f.len() / 2;
    assert!((0..n).any(|j| f.profile[j] > tf));
    assert!((n + 1..f.len()).any(|j| f.profile[j] < tu));
}

#[test]
fn mirrored_front_is_the_reflection() {
    let p = ModelParams::reference();
    let f = front_construct(&p, &CASE1_CAPS, Regime::Bb, 40.0, 0.1).unwrap();
    let g = f.mirrored();
    for x in [-30.0, -1.23, 0.0, 0.05, 17.7] {
        assert!((f.value_at(x) - g.value_at(-x)).abs() < 1e-12);
    }
}
