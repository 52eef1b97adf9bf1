//! Stationary front of the reduced equation pinned at the habitat interface.
//!
//! On each half-line the front conserves `D/2 ω'² + F(ω)`, so it is fixed by
//! its value `ω̲` at `x = 0`. Matching the two energies there gives the scalar
//! equation `H(ω̲) = F^F(ω̲) − F^U(ω̲) − C = 0`.

use alloc::vec::Vec;

use crate::math::{bisect, sqrt};
use crate::model::{Bistable, ModelParams, PiecewiseCapacity, Side};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    /// Species 1 at `−∞`, competitor at `+∞`.
    Bb,
    /// Species 1 on both sides, at the two different capacities.
    Th2,
}

const MATCH_TOL: f64 = 1e-12;
const LIMIT_TOL: f64 = 1e-10;

/// Matching problem: the two one-sided reactions and the limits.
#[derive(Debug, Clone, Copy)]
pub struct Matching {
    pub forest: Bistable,
    pub urban: Bistable,
    pub left_limit: f64,
    pub right_limit: f64,
    pub constant: f64,
}

impl Matching {
    pub fn new(params: &ModelParams, caps: &PiecewiseCapacity, regime: Regime) -> Result<Self> {
        params.validate_two_species()?;
        caps.validate()?;
        if caps.is_homogeneous() {
            return Err(Error::HomogeneousEnvironment);
        }
        let forest = Bistable::reduced(Side::F, params, caps);
        let urban = Bistable::reduced(Side::U, params, caps);
        let (gf, gu) = (forest.gamma(), urban.gamma());
        if !(gf > 0.0) {
            return Err(Error::GammaSign {
                name: "gamma_F",
                value: gf,
                required: "gamma_F > 0",
            });
        }
        let right_limit = match regime {
            Regime::Bb => {
                if !(gu < 0.0) {
                    return Err(Error::GammaSign {
                        name: "gamma_U",
                        value: gu,
                        required: "gamma_U < 0",
                    });
                }
                urban.negative_root()
            }
            Regime::Th2 => {
                if !(gu > 0.0) {
                    return Err(Error::GammaSign {
                        name: "gamma_U",
                        value: gu,
                        required: "gamma_U > 0",
                    });
                }
                urban.positive_root()
            }
        };
        let left_limit = forest.positive_root();
        let constant = forest.antiderivative(left_limit) - urban.antiderivative(right_limit);
        Ok(Matching {
            forest,
            urban,
            left_limit,
            right_limit,
            constant,
        })
    }

    pub fn h(&self, w: f64) -> f64 {
        self.forest.antiderivative(w) - self.urban.antiderivative(w) - self.constant
    }

    /// Interval between the two limits, where the root lies.
    pub fn bracket(&self) -> (f64, f64) {
        (
            self.left_limit.min(self.right_limit),
            self.left_limit.max(self.right_limit),
        )
    }

    /// Root of `H` in `[lo, hi]`, which must carry a sign change.
    pub fn solve_in(&self, lo: f64, hi: f64) -> Result<f64> {
        bisect(|w| self.h(w), lo, hi, MATCH_TOL).ok_or_else(|| {
            Error::Inconsistent(alloc::format!(
                "matching function has no sign change on [{lo}, {hi}]"
            ))
        })
    }

    pub fn solve(&self) -> Result<f64> {
        if self.left_limit == self.right_limit {
            return Ok(self.left_limit);
        }
        let (lo, hi) = self.bracket();
        let (hlo, hhi) = (self.h(lo), self.h(hi));
        if !(hlo < 0.0 && hhi > 0.0 || hlo > 0.0 && hhi < 0.0) {
            return Err(Error::Inconsistent(alloc::format!(
                "matching function has equal signs at the limits ({hlo:e}, {hhi:e})"
            )));
        }
        self.solve_in(lo, hi)
    }
}

pub fn matching_value_solve(params: &ModelParams, caps: &PiecewiseCapacity, regime: Regime) -> Result<f64> {
    Matching::new(params, caps, regime)?.solve()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryFront {
    pub regime: Regime,
    pub matching_value: f64,
    pub half_length: f64,
    pub mesh_step: f64,
    /// Values at `x_j = −half_length + j·mesh_step`.
    pub profile: Vec<f64>,
    /// Exact slopes from the energy relation at the same nodes.
    pub slopes: Vec<f64>,
    pub left_limit: f64,
    pub right_limit: f64,
    pub derivative_at_zero: f64,
    pub diffusion: f64,
}

impl StationaryFront {
    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.mesh_step
    }

    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }

    /// Profile at any `x`; the limits beyond the truncation.
    pub fn value_at(&self, x: f64) -> f64 {
        if x <= -self.half_length {
            return self.profile[0];
        }
        if x >= self.half_length {
            return self.profile[self.len() - 1];
        }
        let s = (x + self.half_length) / self.mesh_step;
        let j = (libm::floor(s) as usize).min(self.len() - 2);
        let h = self.mesh_step;
        let t = s - j as f64;
        let (y0, y1, s0, s1) = (
            self.profile[j],
            self.profile[j + 1],
            self.slopes[j],
            self.slopes[j + 1],
        );
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * s0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * s1
    }

    /// The same front for a habitat with the forest on `x > 0`.
    pub fn mirrored(&self) -> StationaryFront {
        let mut profile = self.profile.clone();
        profile.reverse();
        let mut slopes: Vec<f64> = self.slopes.iter().map(|s| -s).collect();
        slopes.reverse();
        StationaryFront {
            profile,
            slopes,
            left_limit: self.right_limit,
            right_limit: self.left_limit,
            derivative_at_zero: -self.derivative_at_zero,
            ..self.clone()
        }
    }
}

/// Integrates `ω' = σ √(2 (F(lim) − F(ω))/D)` from `ω0` over `n` mesh
/// intervals with `sub` RK4 substeps each, stopping once the limit is
/// reached and padding with it.
fn half_line(bs: &Bistable, lim: f64, w0: f64, dcoef: f64, mesh: f64, n: usize) -> Vec<f64> {
    let sigma = if lim > w0 { 1.0 } else { -1.0 };
    let slope = |w: f64| {
        if (w - lim) * sigma >= 0.0 {
            return 0.0;
        }
        let gap = bs.energy_gap(lim, w).max(0.0);
        sigma * sqrt(2.0 * gap / dcoef)
    };
    let sub = libm::ceil(mesh / 1e-3).max(1.0) as usize;
    let h = mesh / sub as f64;
    let mut out = Vec::with_capacity(n + 1);
    out.push(w0);
    let mut w = w0;
    let mut done = (w - lim).abs() < LIMIT_TOL;
    for _ in 0..n {
        if !done {
            for _ in 0..sub {
                let k1 = slope(w);
                let k2 = slope(w + 0.5 * h * k1);
                let k3 = slope(w + 0.5 * h * k2);
                let k4 = slope(w + h * k3);
                w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            if (w - lim).abs() < LIMIT_TOL {
                done = true;
            }
        }
        out.push(if done { lim } else { w });
    }
    out
}

/// Builds the front on `[−half_length, half_length]` with nodes every
/// `mesh_step`; `half_length / mesh_step` must be an integer.
pub fn front_construct(
    params: &ModelParams,
    caps: &PiecewiseCapacity,
    regime: Regime,
    half_length: f64,
    mesh_step: f64,
) -> Result<StationaryFront> {
    let m = Matching::new(params, caps, regime)?;
    let w0 = m.solve()?;
    front_from_value(params, &m, regime, w0, half_length, mesh_step)
}

/// Builds the front through a given value at the interface. Only a root of
/// [`Matching::h`] gives a `C¹` front.
pub fn front_from_value(
    params: &ModelParams,
    m: &Matching,
    regime: Regime,
    w0: f64,
    half_length: f64,
    mesh_step: f64,
) -> Result<StationaryFront> {
    if !(half_length > 0.0 && mesh_step > 0.0) {
        return Err(Error::InvalidArgument(
            "half_length and mesh_step must be positive".into(),
        ));
    }
    let ratio = half_length / mesh_step;
    let n = libm::round(ratio) as usize;
    if (ratio - n as f64).abs() > 1e-9 * ratio.max(1.0) || n == 0 {
        return Err(Error::InvalidArgument(
            "half_length must be an integer multiple of mesh_step".into(),
        ));
    }
    let (lo, hi) = m.bracket();
    if !(w0 >= lo && w0 <= hi) {
        return Err(Error::InvalidArgument(
            "interface value must lie between the two limits".into(),
        ));
    }
    let dcoef = params.diffusion;
    let right = half_line(&m.urban, m.right_limit, w0, dcoef, mesh_step, n);
    let left = half_line(&m.forest, m.left_limit, w0, dcoef, mesh_step, n);

    let mut profile = Vec::with_capacity(2 * n + 1);
    profile.extend(left.iter().rev());
    profile.extend_from_slice(&right[1..]);

    let slope_of = |bs: &Bistable, lim: f64, w: f64, dir: f64| {
        if w == lim {
            return 0.0;
        }
        let s = if lim > w { 1.0 } else { -1.0 };
        dir * s * sqrt(2.0 * bs.energy_gap(lim, w).max(0.0) / dcoef)
    };
    let mut slopes = Vec::with_capacity(profile.len());
    for (j, &w) in profile.iter().enumerate() {
        let s = if j < n {
            slope_of(&m.forest, m.left_limit, w, -1.0)
        } else {
            slope_of(&m.urban, m.right_limit, w, 1.0)
        };
        slopes.push(s);
    }
    let derivative_at_zero = slopes[n];
    Ok(StationaryFront {
        regime,
        matching_value: w0,
        half_length,
        mesh_step,
        profile,
        slopes,
        left_limit: m.left_limit,
        right_limit: m.right_limit,
        derivative_at_zero,
        diffusion: dcoef,
    })
}
