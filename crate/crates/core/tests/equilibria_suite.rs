use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use segrad_core::equilibria::*;
use segrad_core::ModelParams;

struct Draw {
    p: ModelParams,
    k1: f64,
    k2: f64,
}

/// Rates satisfying every ordering hypothesis, capacities in [0.5, 20] and
/// `c` above the competition threshold of the 3-species system.
fn draw(rng: &mut ChaCha8Rng) -> Draw {
    let b1 = rng.gen_range(0.6..2.0);
    let d1 = b1 * rng.gen_range(0.05..0.85);
    let b2 = rng.gen_range(0.6..2.0);
    let b3 = b2 * rng.gen_range(0.4..0.95);
    let d2 = b3 * rng.gen_range(0.05..0.6);
    let d3 = d2 + (b3 - d2) * rng.gen_range(0.05..0.9);
    let k1 = rng.gen_range(0.5..20.0);
    let k2 = rng.gen_range(0.5..20.0);
    let mut p = ModelParams { b1, b2, b3, d1, d2, d3, c: 1.0, diffusion: 1.0 };
    let t = condition_3species(&p, k1, k2).threshold.max(condition_2species(&p, k1, k2).threshold);
    p.c = t * rng.gen_range(1.2..4.0);
    Draw { p, k1, k2 }
}

fn draws() -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e9_2ad);
    (0..50).map(|_| draw(&mut rng)).collect()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn rk4<const N: usize>(f: impl Fn([f64; N]) -> [f64; N], mut x: [f64; N], dt: f64, steps: usize) -> [f64; N] {
    let add = |a: [f64; N], b: [f64; N], s: f64| {
        let mut o = a;
        for i in 0..N {
            o[i] += s * b[i];
        }
        o
    };
    for _ in 0..steps {
        let k1 = f(x);
        let k2 = f(add(x, k1, 0.5 * dt));
        let k3 = f(add(x, k2, 0.5 * dt));
        let k4 = f(add(x, k3, dt));
        for i in 0..N {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            x[i] = x[i].max(0.0);
        }
    }
    x
}

fn dist<const N: usize>(a: [f64; N], b: &[f64]) -> f64 {
    (0..N).fold(0.0, |m, i| m.max((a[i] - b[i]).abs()))
}

/// Unit eigenvector of `m` for the real eigenvalue `lam`, from the cross
/// product of two rows of `m − λI`.
fn eigvec3(m: [[f64; 3]; 3], lam: f64) -> [f64; 3] {
    let mut a = m;
    for i in 0..3 {
        a[i][i] -= lam;
    }
    let cross = |u: [f64; 3], v: [f64; 3]| [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let cands = [cross(a[0], a[1]), cross(a[0], a[2]), cross(a[1], a[2])];
    let best = cands
        .iter()
        .copied()
        .max_by(|x, y| sup(x).partial_cmp(&sup(y)).unwrap())
        .unwrap();
    let n = sup(&best);
    [best[0] / n, best[1] / n, best[2] / n]
}

#[test]
fn two_species_count_and_stability_under_condition() {
    for (i, d) in draws().iter().enumerate() {
        let set = equilibria_2species(&d.p, d.k1, d.k2).unwrap();
        assert!(set.condition.satisfied);
        assert_eq!(set.points.len(), 4, "draw {i}");
        for pt in &set.points {
            let x = [pt.densities[0], pt.densities[1]];
            assert!(sup(&rhs_2species(x, &d.p, d.k1, d.k2)) <= 1e-10, "draw {i} {}", pt.label);
            assert!(pt.densities.iter().all(|v| *v >= 0.0));
            let want = match pt.label {
                "n1*" | "n2*" => Stability::Stable,
                _ => Stability::Unstable,
            };
            assert_eq!(pt.stability, want, "draw {i} {}", pt.label);
        }
    }
}

#[test]
fn three_species_count_and_stability_under_condition() {
    let mut mixed_seen = 0;
    for (i, d) in draws().iter().enumerate() {
        let set = equilibria_3species(&d.p, d.k1, d.k2).unwrap();
        assert!(set.condition.satisfied);
        for label in ["zero", "n1*", "n2*", "n3*"] {
            assert!(set.get(label).is_some(), "draw {i} lacks {label}");
        }
        for pt in &set.points {
            let x = [pt.densities[0], pt.densities[1], pt.densities[2]];
            assert!(sup(&rhs_3species(x, &d.p, d.k1, d.k2)) <= 1e-10, "draw {i} {}", pt.label);
            assert!(pt.densities.iter().all(|v| *v >= 0.0));
            match pt.label {
                "n1*" | "n2*" | "n3*" => assert_eq!(pt.stability, Stability::Stable, "draw {i} {}", pt.label),
                // classified numerically, no tag asserted
                "nbar123" => {}
                _ => {
                    mixed_seen += 1;
                    assert_eq!(pt.stability, Stability::Unstable, "draw {i} {}", pt.label)
                }
            }
        }
        for (label, v) in &set.infeasible {
            assert!(v.iter().any(|x| *x < 0.0), "draw {i} {label} reported infeasible");
        }
        let zero = set.get("zero").unwrap();
        match &zero.eigen_info {
            EigenInfo::DirectionalRates { unstable_direction, .. } => {
                assert_eq!(*unstable_direction, Some([0.0, 1.0, 0.0]))
            }
            other => panic!("zero classified by {other:?}"),
        }
    }
    assert!(mixed_seen > 50);
}

#[test]
fn jacobians_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in draws() {
        let x2 = [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)];
        let j = jacobian_2species(x2, &d.p, d.k1, d.k2);
        for col in 0..2 {
            let h = 1e-6 * (1.0 + x2[col]);
            let (mut a, mut b) = (x2, x2);
            a[col] += h;
            b[col] -= h;
            let (fa, fb) = (rhs_2species(a, &d.p, d.k1, d.k2), rhs_2species(b, &d.p, d.k1, d.k2));
            for row in 0..2 {
                let fd = (fa[row] - fb[row]) / (2.0 * h);
                assert!((fd - j[row][col]).abs() <= 1e-6 * (1.0 + fd.abs()), "{fd} vs {}", j[row][col]);
            }
        }
        assert!(j[0][1] <= 0.0 && j[1][0] <= 0.0);

        let x3 = [
            rng.gen_range(0.0..10.0),
            rng.gen_range(0.1..10.0),
            rng.gen_range(0.1..10.0),
        ];
        let j = jacobian_3species(x3, &d.p, d.k1, d.k2).unwrap();
        for col in 0..3 {
            let h = 1e-6 * (1.0 + x3[col]);
            let (mut a, mut b) = (x3, x3);
            a[col] += h;
            b[col] -= h;
            let (fa, fb) = (rhs_3species(a, &d.p, d.k1, d.k2), rhs_3species(b, &d.p, d.k1, d.k2));
            for row in 0..3 {
                let fd = (fa[row] - fb[row]) / (2.0 * h);
                assert!((fd - j[row][col]).abs() <= 1e-6 * (1.0 + fd.abs()), "({row},{col}) {fd} vs {}", j[row][col]);
            }
        }
    }
}

#[test]
fn jacobian_at_origin_is_diagonal() {
    let p = ModelParams::reference();
    let j = jacobian_2species([0.0, 0.0], &p, 3.0, 4.0);
    assert_eq!(j, [[p.b1 - p.d1, 0.0], [0.0, p.b2 - p.d2]]);
}

#[test]
fn stable_points_attract_perturbations() {
    for d in draws().iter().take(20) {
        let f2 = |x: [f64; 2]| rhs_2species(x, &d.p, d.k1, d.k2);
        let f3 = |x: [f64; 3]| rhs_3species(x, &d.p, d.k1, d.k2);
        let set = equilibria_2species(&d.p, d.k1, d.k2).unwrap();
        for pt in set.points.iter().filter(|p| p.stability == Stability::Stable) {
            let x0 = [pt.densities[0] + 1e-3, pt.densities[1] + 1e-3];
            let x = rk4(f2, x0, 0.01, 100_000);
            assert!(dist(x, &pt.densities) < 1e-6, "{} drifted to {x:?}", pt.label);
        }
        let set = equilibria_3species(&d.p, d.k1, d.k2).unwrap();
        for pt in set.points.iter().filter(|p| p.stability == Stability::Stable) {
            let x0 = [pt.densities[0] + 1e-3, pt.densities[1] + 1e-3, pt.densities[2] + 1e-3];
            let x = rk4(f3, x0, 0.01, 100_000);
            assert!(dist(x, &pt.densities) < 1e-4, "{} drifted to {x:?}", pt.label);
        }
    }
}

#[test]
fn unstable_points_repel_along_the_recorded_direction() {
    for d in draws().iter().take(20) {
        let f3 = |x: [f64; 3]| rhs_3species(x, &d.p, d.k1, d.k2);
        let set = equilibria_3species(&d.p, d.k1, d.k2).unwrap();
        for pt in set.points.iter().filter(|p| p.stability == Stability::Unstable) {
            let x = [pt.densities[0], pt.densities[1], pt.densities[2]];
            let dir = match &pt.eigen_info {
                EigenInfo::DirectionalRates { unstable_direction, .. } => unstable_direction.unwrap(),
                EigenInfo::Eigenvalues(ev) => {
                    let lam = ev
                        .iter()
                        .filter(|e| e.1 == 0.0)
                        .map(|e| e.0)
                        .fold(f64::NEG_INFINITY, f64::max);
                    assert!(lam > 0.0, "{}: no real unstable eigenvalue in {ev:?}", pt.label);
                    eigvec3(jacobian_3species(x, &d.p, d.k1, d.k2).unwrap(), lam)
                }
            };
            // pick the sign that keeps the start nonnegative
            let s = if (0..3).all(|i| x[i] + 1e-4 * dir[i] >= 0.0) { 1.0 } else { -1.0 };
            let x0 = [x[0] + s * 1e-4 * dir[0], x[1] + s * 1e-4 * dir[1], x[2] + s * 1e-4 * dir[2]];
            assert!(x0.iter().all(|v| *v >= 0.0), "{}: direction {dir:?} leaves the orthant", pt.label);
            let end = rk4(f3, x0, 0.01, 20_000);
            assert!(dist(end, &pt.densities) > 1e-2, "{} did not repel: {end:?}", pt.label);
        }
    }
}
