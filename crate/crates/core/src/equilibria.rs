//! Homogeneous steady states of the competition ODEs and their linear
//! stability.
//!
//! The three-species right-hand side contains the mating factor
//! `n2/(n2+n3)`, which is not differentiable where `n2+n3 = 0`. At those
//! points the stability is decided from the directional growth rates of
//! each species instead of a Jacobian.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{acos, cbrt, cos, sqrt};
use crate::model::ModelParams;
use crate::{Error, Result};

/// Real-part tolerance separating stable from unstable eigenvalues.
pub const EIGEN_TOL: f64 = 1e-9;
/// Largest admissible max-norm residual of an equilibrium.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Below this total the infected/wild mix is treated as extinct.
pub const EXTINCT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EquilibriumKind {
    Extinction,
    /// Only species `i` (1-based) present.
    SingleSpecies(usize),
    /// Several species present; lists them (1-based).
    Coexistence(&'static [usize]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Stability {
    Stable,
    Unstable,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum EigenInfo {
    /// Eigenvalues as `(re, im)` pairs.
    Eigenvalues(Vec<(f64, f64)>),
    /// Per-capita growth rates along the coordinate directions, used where
    /// the Jacobian does not exist. `unstable_direction` is the first
    /// direction with a positive rate.
    DirectionalRates {
        rates: [f64; 3],
        unstable_direction: Option<[f64; 3]>,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EquilibriumPoint {
    /// Short identifier such as `n1*` or `nbar21`.
    pub label: &'static str,
    pub densities: Vec<f64>,
    pub kind: EquilibriumKind,
    pub stability: Stability,
    pub eigen_info: EigenInfo,
}

/// The competition threshold above which the single-species states are stable.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CompetitionCondition {
    pub threshold: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EquilibriumSet {
    pub points: Vec<EquilibriumPoint>,
    /// Candidate states whose formulas produced a negative coordinate.
    pub infeasible: Vec<(&'static str, Vec<f64>)>,
    pub condition: CompetitionCondition,
}

impl EquilibriumSet {
    pub fn get(&self, label: &str) -> Option<&EquilibriumPoint> {
        self.points.iter().find(|p| p.label == label)
    }
}

pub fn rhs_2species(n: [f64; 2], p: &ModelParams, k1: f64, k2: f64) -> [f64; 2] {
    let [n1, n2] = n;
    [
        p.b1 * n1 * (1.0 - n1 / k1) - p.c * n1 * n2 - p.d1 * n1,
        p.b2 * n2 * (1.0 - n2 / k2) - p.c * n1 * n2 - p.d2 * n2,
    ]
}

pub fn jacobian_2species(n: [f64; 2], p: &ModelParams, k1: f64, k2: f64) -> [[f64; 2]; 2] {
    let [n1, n2] = n;
    [
        [p.b1 * (1.0 - 2.0 * n1 / k1) - p.c * n2 - p.d1, -p.c * n1],
        [-p.c * n2, p.b2 * (1.0 - 2.0 * n2 / k2) - p.c * n1 - p.d2],
    ]
}

/// `n2²/(n2+n3)`, taken as zero when both strains are extinct.
#[inline]
pub fn mating_factor(n2: f64, n3: f64) -> f64 {
    let s = n2 + n3;
    if s <= EXTINCT_TOL {
        0.0
    } else {
        n2 * n2 / s
    }
}

pub fn rhs_3species(n: [f64; 3], p: &ModelParams, k1: f64, k2: f64) -> [f64; 3] {
    let [n1, n2, n3] = n;
    let s = n2 + n3;
    let crowd = 1.0 - s / k2;
    [
        p.b1 * n1 * (1.0 - n1 / k1) - p.c * n1 * s - p.d1 * n1,
        p.b2 * mating_factor(n2, n3) * crowd - p.c * n1 * n2 - p.d2 * n2,
        p.b3 * n3 * crowd - p.c * n1 * n3 - p.d3 * n3,
    ]
}

/// Analytic Jacobian of the three-species system; requires `n2+n3 > 1e-12`.
pub fn jacobian_3species(n: [f64; 3], p: &ModelParams, k1: f64, k2: f64) -> Result<[[f64; 3]; 3]> {
    let [n1, n2, n3] = n;
    let s = n2 + n3;
    if s <= EXTINCT_TOL {
        return Err(Error::InvalidArgument(
            "three-species Jacobian undefined where n2 + n3 vanishes".into(),
        ));
    }
    let q = n2 / s;
    let r = n3 / s;
    Ok([
        [
            p.b1 * (1.0 - 2.0 * n1 / k1) - p.c * s - p.d1,
            -p.c * n1,
            -p.c * n1,
        ],
        [
            -p.c * n2,
            p.b2 * (1.0 - r * r) - 2.0 * p.b2 * n2 / k2 - p.c * n1 - p.d2,
            -p.b2 * q * q,
        ],
        [
            -p.c * n3,
            -p.b3 * n3 / k2,
            p.b3 * (1.0 - (n2 + 2.0 * n3) / k2) - p.c * n1 - p.d3,
        ],
    ])
}

pub fn condition_2species(p: &ModelParams, k1: f64, k2: f64) -> CompetitionCondition {
    let r1 = p.b1 - p.d1;
    let r2 = p.b2 - p.d2;
    let threshold = (p.b1 / k1 * r2 / r1).max(p.b2 / k2 * r1 / r2);
    CompetitionCondition {
        threshold,
        satisfied: p.c > threshold,
    }
}

/// Three-species competition threshold.
///
/// Besides the two-species terms and `(b3/K2)(b2−d2)/(b3−d3)`, the term
/// `(b3/K2)(b1−d1)/(b3−d3)` is included: without it `(0,0,n3*)` can be
/// invaded by species 1.
pub fn condition_3species(p: &ModelParams, k1: f64, k2: f64) -> CompetitionCondition {
    let two = condition_2species(p, k1, k2);
    let r1 = p.b1 - p.d1;
    let r2 = p.b2 - p.d2;
    let r3 = p.b3 - p.d3;
    let threshold = two
        .threshold
        .max(p.b3 / k2 * r2 / r3)
        .max(p.b3 / k2 * r1 / r3);
    CompetitionCondition {
        threshold,
        satisfied: p.c > threshold,
    }
}

/// Threshold exactly as printed in the three-term form, without the
/// species-1 invasion term of [`condition_3species`].
pub fn condition_3species_printed(p: &ModelParams, k1: f64, k2: f64) -> CompetitionCondition {
    let two = condition_2species(p, k1, k2);
    let threshold = two
        .threshold
        .max(p.b3 / k2 * (p.b2 - p.d2) / (p.b3 - p.d3));
    CompetitionCondition {
        threshold,
        satisfied: p.c > threshold,
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn equilibria_2species(p: &ModelParams, k1: f64, k2: f64) -> Result<EquilibriumSet> {
    p.validate_two_species()?;
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(Error::Hypothesis("capacities must be positive".into()));
    }
    let n1s = k1 * p.alpha1();
    let n2s = k2 * p.alpha2();
    let mut candidates: Vec<(&'static str, EquilibriumKind, Vec<f64>)> = vec![
        ("zero", EquilibriumKind::Extinction, vec![0.0, 0.0]),
        ("n1*", EquilibriumKind::SingleSpecies(1), vec![n1s, 0.0]),
        ("n2*", EquilibriumKind::SingleSpecies(2), vec![0.0, n2s]),
    ];
    let condition = condition_2species(p, k1, k2);
    let mut infeasible = Vec::new();
    let (a, b) = coexistence_pair(p.b1, p.d1, k1, p.b2, p.d2, k2, p.c);
    if condition.satisfied && a > 0.0 && b > 0.0 {
        candidates.push(("nbar", EquilibriumKind::Coexistence(&[1, 2]), vec![a, b]));
    } else if a.is_finite() && b.is_finite() && (a != 0.0 || b != 0.0) {
        infeasible.push(("nbar", vec![a, b]));
    }
    let mut points = Vec::with_capacity(candidates.len());
    for (label, kind, densities) in candidates {
        let (stability, eigen_info) = stability_classification(&densities, p, k1, k2)?;
        points.push(EquilibriumPoint {
            label,
            densities,
            kind,
            stability,
            eigen_info,
        });
    }
    Ok(EquilibriumSet {
        points,
        infeasible,
        condition,
    })
}

/// Interior state of a two-species logistic competition with common `c`.
fn coexistence_pair(b1: f64, d1: f64, k1: f64, b2: f64, d2: f64, k2: f64, c: f64) -> (f64, f64) {
    let det = c * c - b1 * b2 / (k1 * k2);
    let a = (c * (b2 - d2) - b2 / k2 * (b1 - d1)) / det;
    let b = (c * (b1 - d1) - b1 / k1 * (b2 - d2)) / det;
    (a, b)
}

/// State with all three species present, before refinement.
fn full_mix_closed_form(p: &ModelParams, k1: f64, k2: f64) -> [f64; 3] {
    let c = p.c;
    let r1 = p.b1 - p.d1;
    let r3 = p.b3 - p.d3;
    let den = p.b1 * p.b3 / (k1 * k2) - c * c;
    let n41 = (p.b3 / k2 * r1 - c * r3) / den;
    let n42 = (p.b1 / k1 * r3 - c * r1) / den;
    let a = p.b1 / k1 * r3 - c * r1;
    let bracket = p.b1 * p.b3 / (k1 * k2) * p.d2 + c * p.b3 / k2 * r1 - c * c * (p.b3 + p.d2 - p.d3);
    let n22 = k2 / p.b2 * a * bracket / (den * (k2 * den - a));
    [n41, n22, n42 - n22]
}

/// Damped Newton refinement of a three-species equilibrium.
fn refine_3species(mut x: [f64; 3], p: &ModelParams, k1: f64, k2: f64) -> [f64; 3] {
    for _ in 0..50 {
        let r = rhs_3species(x, p, k1, k2);
        let norm = max_abs(&r);
        if norm <= 1e-15 {
            break;
        }
        let Ok(j) = jacobian_3species(x, p, k1, k2) else {
            break;
        };
        let Some(dx) = solve3(j, [-r[0], -r[1], -r[2]]) else {
            break;
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial = [x[0] + lambda * dx[0], x[1] + lambda * dx[1], x[2] + lambda * dx[2]];
            if max_abs(&rhs_3species(trial, p, k1, k2)) < norm {
                x = trial;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    x
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut m = [[0.0; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col] == 0.0 {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = m[i][3];
        for k in i + 1..3 {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    Some(x)
}

pub fn equilibria_3species(p: &ModelParams, k1: f64, k2: f64) -> Result<EquilibriumSet> {
    p.validate_three_species()?;
    if !(k1 > 0.0 && k2 > 0.0) {
        return Err(Error::Hypothesis("capacities must be positive".into()));
    }
    let n1s = k1 * p.alpha1();
    let n2s = k2 * p.alpha2();
    let n3s = k2 * p.alpha3();
    let mut candidates: Vec<(&'static str, EquilibriumKind, Vec<f64>)> = vec![
        ("zero", EquilibriumKind::Extinction, vec![0.0, 0.0, 0.0]),
        ("n1*", EquilibriumKind::SingleSpecies(1), vec![n1s, 0.0, 0.0]),
        ("n2*", EquilibriumKind::SingleSpecies(2), vec![0.0, n2s, 0.0]),
        ("n3*", EquilibriumKind::SingleSpecies(3), vec![0.0, 0.0, n3s]),
    ];

    let (n21, n12) = coexistence_pair(p.b1, p.d1, k1, p.b2, p.d2, k2, p.c);
    let (n31, n13) = coexistence_pair(p.b1, p.d1, k1, p.b3, p.d3, k2, p.c);
    let n32 = p.d2 / p.b2 * k2 * (p.b3 - p.d3) / p.d3;
    let n23 = n3s - n32;
    let mix = full_mix_closed_form(p, k1, k2);
    let mixed: [(&'static str, EquilibriumKind, [f64; 3]); 4] = [
        ("nbar12", EquilibriumKind::Coexistence(&[1, 2]), [n21, n12, 0.0]),
        ("nbar13", EquilibriumKind::Coexistence(&[1, 3]), [n31, 0.0, n13]),
        ("nbar23", EquilibriumKind::Coexistence(&[2, 3]), [0.0, n32, n23]),
        ("nbar123", EquilibriumKind::Coexistence(&[1, 2, 3]), mix),
    ];
    let mut infeasible = Vec::new();
    for (label, kind, x) in mixed {
        let feasible = x.iter().all(|v| v.is_finite() && *v >= 0.0)
            && x.iter().filter(|v| **v > 0.0).count() >= 2;
        if !feasible {
            infeasible.push((label, x.to_vec()));
            continue;
        }
        let x = if label == "nbar123" {
            refine_3species(x, p, k1, k2)
        } else {
            x
        };
        if x.iter().any(|v| *v < 0.0) {
            infeasible.push((label, x.to_vec()));
            continue;
        }
        candidates.push((label, kind, x.to_vec()));
    }

    let mut points = Vec::with_capacity(candidates.len());
    for (label, kind, densities) in candidates {
        let (stability, eigen_info) = stability_classification(&densities, p, k1, k2)?;
        points.push(EquilibriumPoint {
            label,
            densities,
            kind,
            stability,
            eigen_info,
        });
    }
    Ok(EquilibriumSet {
        points,
        infeasible,
        condition: condition_3species(p, k1, k2),
    })
}

/// Linear stability of an equilibrium of the 2- or 3-species system,
/// selected by the length of `point`.
pub fn stability_classification(
    point: &[f64],
    p: &ModelParams,
    k1: f64,
    k2: f64,
) -> Result<(Stability, EigenInfo)> {
    match point.len() {
        2 => {
            let x = [point[0], point[1]];
            let residual = max_abs(&rhs_2species(x, p, k1, k2));
            if !(residual <= RESIDUAL_TOL) {
                return Err(Error::NotAnEquilibrium { residual });
            }
            let eig = eigenvalues_2x2(jacobian_2species(x, p, k1, k2));
            Ok((classify(&eig), EigenInfo::Eigenvalues(eig.to_vec())))
        }
        3 => {
            let x = [point[0], point[1], point[2]];
            let residual = max_abs(&rhs_3species(x, p, k1, k2));
            if !(residual <= RESIDUAL_TOL) {
                return Err(Error::NotAnEquilibrium { residual });
            }
            if x[1] + x[2] <= EXTINCT_TOL {
                return Ok(directional_rule(x, p, k1));
            }
            let eig = eigenvalues_3x3(jacobian_3species(x, p, k1, k2)?);
            Ok((classify(&eig), EigenInfo::Eigenvalues(eig.to_vec())))
        }
        n => Err(Error::InvalidArgument(alloc::format!(
            "equilibrium must have 2 or 3 components, got {n}"
        ))),
    }
}

/// Stability at `(n1, 0, 0)` from the per-capita growth rates of each
/// species when introduced alone.
fn directional_rule(x: [f64; 3], p: &ModelParams, k1: f64) -> (Stability, EigenInfo) {
    let n1 = x[0];
    let rates = [
        p.b2 - p.c * n1 - p.d2,
        p.b3 - p.c * n1 - p.d3,
        p.b1 * (1.0 - 2.0 * n1 / k1) - p.d1,
    ];
    let dirs = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
    let unstable_direction = rates
        .iter()
        .position(|r| *r > EIGEN_TOL)
        .map(|i| dirs[i]);
    let stability = if unstable_direction.is_some() {
        Stability::Unstable
    } else if rates.iter().all(|r| *r < -EIGEN_TOL) {
        Stability::Stable
    } else {
        Stability::Undetermined
    };
    (
        stability,
        EigenInfo::DirectionalRates {
            rates: [rates[2], rates[0], rates[1]],
            unstable_direction,
        },
    )
}

fn classify(eig: &[(f64, f64)]) -> Stability {
    if eig.iter().any(|e| e.0 > EIGEN_TOL) {
        Stability::Unstable
    } else if eig.iter().all(|e| e.0 < -EIGEN_TOL) {
        Stability::Stable
    } else {
        Stability::Undetermined
    }
}

fn quadratic_roots(b: f64, c: f64) -> [(f64, f64); 2] {
    // roots of λ² + bλ + c
    let half = -0.5 * b;
    let disc = half * half - c;
    if disc >= 0.0 {
        let s = sqrt(disc);
        // avoid cancellation in the smaller root
        let big = if half >= 0.0 { half + s } else { half - s };
        let small = if big != 0.0 { c / big } else { 0.0 };
        [(big, 0.0), (small, 0.0)]
    } else {
        let s = sqrt(-disc);
        [(half, s), (half, -s)]
    }
}

pub fn eigenvalues_2x2(m: [[f64; 2]; 2]) -> [(f64, f64); 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    quadratic_roots(-tr, det)
}

/// Eigenvalues from the characteristic cubic: one real root in closed
/// form, polished by Newton, then deflation to a quadratic.
pub fn eigenvalues_3x3(m: [[f64; 3]; 3]) -> [(f64, f64); 3] {
    let tr = m[0][0] + m[1][1] + m[2][2];
    let minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2]
        - m[1][2] * m[2][1];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    // λ³ + aλ² + bλ + c
    let (a, b, c) = (-tr, minors, -det);
    let mut r = real_cubic_root(a, b, c);
    for _ in 0..4 {
        let pv = ((r + a) * r + b) * r + c;
        let dp = (3.0 * r + 2.0 * a) * r + b;
        if dp == 0.0 {
            break;
        }
        let step = pv / dp;
        if !step.is_finite() {
            break;
        }
        r -= step;
    }
    let q = quadratic_roots(a + r, b + r * (a + r));
    [(r, 0.0), q[0], q[1]]
}

fn real_cubic_root(a: f64, b: f64, c: f64) -> f64 {
    // depressed cubic t³ + pt + q with λ = t − a/3
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let t = if disc >= 0.0 {
        let s = sqrt(disc);
        cbrt(-q / 2.0 + s) + cbrt(-q / 2.0 - s)
    } else {
        let rad = sqrt(-p / 3.0);
        let arg = (3.0 * q / (2.0 * p * rad)).clamp(-1.0, 1.0);
        2.0 * rad * cos(acos(arg) / 3.0)
    };
    t - shift
}
