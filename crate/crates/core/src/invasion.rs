//! Invasion coefficients, bistable thresholds, critical bubbles and
//! admissibility of initial data for the reduced equation.
//!
//! The sign of `γ = F(K1·α1) − F(−K2·α)` on a side tells which stable state
//! invades the other there. A bubble is a compactly supported even
//! subsolution of `−D χ'' = f(χ)`, used to trap initial data from below (or
//! above) through the comparison principle.

use alloc::vec::Vec;

use crate::math::{adaptive_simpson, bisect, sqrt};
use crate::model::{Bistable, ModelParams, PiecewiseCapacity, Side, SpeciesPair};
use crate::pde::Grid1D;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FrontScenario {
    /// `γ^F > 0 > γ^U`: each species keeps the side it is favoured on.
    TwoFronts,
    /// `γ^F, γ^U > 0`.
    Species1Invades,
    /// `γ^F, γ^U < 0`.
    Species2Invades,
    /// `γ^F < 0 < γ^U`.
    Species2Front,
}

impl FrontScenario {
    /// `None` when a coefficient vanishes.
    pub fn classify(gamma_f: f64, gamma_u: f64) -> Option<Self> {
        if gamma_f == 0.0 || gamma_u == 0.0 || gamma_f.is_nan() || gamma_u.is_nan() {
            return None;
        }
        Some(match (gamma_f > 0.0, gamma_u > 0.0) {
            (true, false) => FrontScenario::TwoFronts,
            (true, true) => FrontScenario::Species1Invades,
            (false, false) => FrontScenario::Species2Invades,
            (false, true) => FrontScenario::Species2Front,
        })
    }
}

/// Outcome class of an infected release on the urban side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WolbachiaCase {
    /// `γ13^U > γ12^U > 0`: species 1 takes both sides whatever the release.
    N1Everywhere,
    /// `0 > γ13^U > γ12^U`: the infected strain can replace the wild one but
    /// each competitor keeps its own side.
    ReplacementThenCoexistRegions,
    /// `γ13^U > 0 > γ12^U`: replacement turns the urban side over to species 1.
    ReplacementEnablesN1,
    /// A coefficient vanishes.
    None,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InvasionReport {
    pub gamma_f: f64,
    pub gamma_u: f64,
    /// `(γ13^F, γ13^U)` when the infected strain is modelled.
    pub gamma13: Option<(f64, f64)>,
    pub theta_f: Option<f64>,
    pub theta_u: Option<f64>,
    pub theta1_u: Option<f64>,
    pub scenario: Option<FrontScenario>,
    pub wolbachia_case: Option<WolbachiaCase>,
}

/// `(γ^F, γ^U)` for the given competitor.
pub fn gamma_coefficients(
    params: &ModelParams,
    caps: &PiecewiseCapacity,
    pair: SpeciesPair,
) -> (f64, f64) {
    (
        Bistable::new(Side::F, pair, params, caps).gamma(),
        Bistable::new(Side::U, pair, params, caps).gamma(),
    )
}

/// Which bistable threshold to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// `θ^F ∈ (0, K1^F α1)`, requires `γ^F > 0`.
    Forest,
    /// `θ^U ∈ (−K2^U α2, 0)`, requires `γ^U < 0`.
    Urban,
    /// `θ1^U ∈ (0, K1^U α1)`, requires `γ^U > 0`.
    UrbanInvader,
}

const THETA_TOL: f64 = 1e-12;

/// Level above which a positive bump can beat the opposite stable state.
pub(crate) fn positive_threshold(bs: &Bistable) -> Option<f64> {
    let target = bs.antiderivative(bs.negative_root());
    bisect(
        |w| bs.antiderivative(w) - target,
        0.0,
        bs.positive_root(),
        THETA_TOL,
    )
}

/// Level below which a negative dip can beat the positive stable state.
pub(crate) fn negative_threshold(bs: &Bistable) -> Option<f64> {
    let target = bs.antiderivative(bs.positive_root());
    bisect(
        |w| bs.antiderivative(w) - target,
        bs.negative_root(),
        0.0,
        THETA_TOL,
    )
}

pub fn theta_threshold(
    which: Threshold,
    params: &ModelParams,
    caps: &PiecewiseCapacity,
    pair: SpeciesPair,
) -> Result<f64> {
    let side = match which {
        Threshold::Forest => Side::F,
        Threshold::Urban | Threshold::UrbanInvader => Side::U,
    };
    let bs = Bistable::new(side, pair, params, caps);
    let gamma = bs.gamma();
    let (name, ok, required) = match which {
        Threshold::Forest => ("gamma_F", gamma > 0.0, "gamma_F > 0"),
        Threshold::Urban => ("gamma_U", gamma < 0.0, "gamma_U < 0"),
        Threshold::UrbanInvader => ("gamma_U", gamma > 0.0, "gamma_U > 0"),
    };
    if !ok {
        return Err(Error::GammaSign {
            name,
            value: gamma,
            required,
        });
    }
    let root = match which {
        Threshold::Forest | Threshold::UrbanInvader => positive_threshold(&bs),
        Threshold::Urban => negative_threshold(&bs),
    };
    root.ok_or_else(|| Error::Inconsistent("threshold equation has no sign change".into()))
}

pub fn invasion_report(
    params: &ModelParams,
    caps: &PiecewiseCapacity,
    three_species: bool,
) -> Result<InvasionReport> {
    if three_species {
        params.validate_three_species()?;
    } else {
        params.validate_two_species()?;
    }
    caps.validate()?;
    let (gamma_f, gamma_u) = gamma_coefficients(params, caps, SpeciesPair::P12);
    let p12 = SpeciesPair::P12;
    let theta_f = theta_threshold(Threshold::Forest, params, caps, p12).ok();
    let theta_u = theta_threshold(Threshold::Urban, params, caps, p12).ok();
    let theta1_u = theta_threshold(Threshold::UrbanInvader, params, caps, p12).ok();
    let (gamma13, wolbachia_case) = if three_species {
        (
            Some(gamma_coefficients(params, caps, SpeciesPair::P13)),
            wolbachia_classify(params, caps).ok(),
        )
    } else {
        (None, None)
    };
    Ok(InvasionReport {
        gamma_f,
        gamma_u,
        gamma13,
        theta_f,
        theta_u,
        theta1_u,
        scenario: FrontScenario::classify(gamma_f, gamma_u),
        wolbachia_case,
    })
}

pub fn wolbachia_classify(params: &ModelParams, caps: &PiecewiseCapacity) -> Result<WolbachiaCase> {
    params.validate_three_species()?;
    caps.validate()?;
    let (g12f, g12u) = gamma_coefficients(params, caps, SpeciesPair::P12);
    let (g13f, g13u) = gamma_coefficients(params, caps, SpeciesPair::P13);
    if !(g12f > 0.0) {
        return Err(Error::GammaSign {
            name: "gamma12_F",
            value: g12f,
            required: "gamma12_F > 0",
        });
    }
    if !(g13f > 0.0) {
        return Err(Error::GammaSign {
            name: "gamma13_F",
            value: g13f,
            required: "gamma13_F > 0",
        });
    }
    if !(g12f < g13f && g12u < g13u) {
        return Err(Error::Inconsistent(
            "wild-type coefficients must lie below infected-strain coefficients".into(),
        ));
    }
    Ok(if g12u > 0.0 {
        WolbachiaCase::N1Everywhere
    } else if g13u < 0.0 {
        WolbachiaCase::ReplacementThenCoexistRegions
    } else if g13u > 0.0 && g12u < 0.0 {
        WolbachiaCase::ReplacementEnablesN1
    } else {
        WolbachiaCase::None
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BubbleKind {
    /// Positive bump on the forest side, decreasing to a negative plateau.
    F,
    /// Negative dip on the urban side, increasing to a positive plateau.
    U,
    /// Positive bump on the urban side (species 1 invading there).
    U1,
}

impl BubbleKind {
    pub fn side(self) -> Side {
        match self {
            BubbleKind::F => Side::F,
            BubbleKind::U | BubbleKind::U1 => Side::U,
        }
    }
}

/// Open interval of admissible levels for a bubble kind.
pub fn bubble_level_range(
    kind: BubbleKind,
    params: &ModelParams,
    caps: &PiecewiseCapacity,
) -> Result<(f64, f64)> {
    let bs = Bistable::reduced(kind.side(), params, caps);
    let p12 = SpeciesPair::P12;
    Ok(match kind {
        BubbleKind::F => (
            theta_threshold(Threshold::Forest, params, caps, p12)?,
            bs.positive_root(),
        ),
        BubbleKind::U => (
            bs.negative_root(),
            theta_threshold(Threshold::Urban, params, caps, p12)?,
        ),
        BubbleKind::U1 => (
            theta_threshold(Threshold::UrbanInvader, params, caps, p12)?,
            bs.positive_root(),
        ),
    })
}

/// Critical bubble sampled on `x ≥ 0`; the profile is even.
#[derive(Debug, Clone, PartialEq)]
pub struct Bubble {
    pub kind: BubbleKind,
    pub level: f64,
    pub half_width: f64,
    pub plateau: f64,
    pub mesh_step: f64,
    pub diffusion: f64,
    /// Sample abscissae `0, h, 2h, …` and finally `half_width`.
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
    bistable: Bistable,
}

impl Bubble {
    /// Value at any `x`, by cubic Hermite interpolation of the samples and
    /// the plateau outside the support.
    pub fn value_at(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax >= self.half_width {
            return self.plateau;
        }
        let last = self.xs.len() - 1;
        let mut j = (ax / self.mesh_step) as usize;
        if j >= last {
            j = last - 1;
        }
        while j + 1 < last && self.xs[j + 1] < ax {
            j += 1;
        }
        hermite(
            self.xs[j],
            self.xs[j + 1],
            self.values[j],
            self.values[j + 1],
            self.slopes[j],
            self.slopes[j + 1],
            ax,
        )
    }

    /// Samples on a symmetric uniform mesh of spacing `mesh_step` covering
    /// `[−half_width, half_width]`, returned as `(x, χ)` pairs.
    pub fn even_profile(&self) -> Vec<(f64, f64)> {
        let m = self.xs.len() - 1;
        let mut out = Vec::with_capacity(2 * m + 1);
        for j in (1..=m).rev() {
            out.push((-self.xs[j], self.values[j]));
        }
        for j in 0..=m {
            out.push((self.xs[j], self.values[j]));
        }
        out
    }

    /// `D/2 χ'² + F(χ) − F(level)` at every sample.
    pub fn energy_defect(&self) -> Vec<f64> {
        let top = self.bistable.antiderivative(self.level);
        self.values
            .iter()
            .zip(&self.slopes)
            .map(|(v, s)| 0.5 * self.diffusion * s * s + self.bistable.antiderivative(*v) - top)
            .collect()
    }

    pub fn reaction(&self) -> &Bistable {
        &self.bistable
    }
}

fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, s0: f64, s1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * s0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * s1
}

fn bubble_plateau(kind: BubbleKind, params: &ModelParams, caps: &PiecewiseCapacity) -> f64 {
    match kind {
        BubbleKind::F | BubbleKind::U1 => -caps.k2_max() * params.alpha2(),
        BubbleKind::U => caps.k1_max() * params.alpha1(),
    }
}

fn check_level(kind: BubbleKind, level: f64, params: &ModelParams, caps: &PiecewiseCapacity) -> Result<()> {
    let (lo, hi) = bubble_level_range(kind, params, caps)?;
    if !(level > lo && level < hi) {
        return Err(Error::InvalidArgument(alloc::format!(
            "bubble level {level} outside the admissible interval ({lo}, {hi})"
        )));
    }
    Ok(())
}

/// Builds the critical bubble of the given kind centred at its `level`.
///
/// The profile solves `D χ'' = −f(χ)` from `χ(0) = level`, `χ'(0) = 0`
/// with classical Runge–Kutta until it meets the plateau.
pub fn bubble_construct(
    kind: BubbleKind,
    level: f64,
    params: &ModelParams,
    caps: &PiecewiseCapacity,
    mesh_step: f64,
) -> Result<Bubble> {
    params.validate_two_species()?;
    caps.validate()?;
    if !(mesh_step > 0.0 && mesh_step.is_finite()) {
        return Err(Error::InvalidArgument("mesh_step must be positive".into()));
    }
    check_level(kind, level, params, caps)?;
    let bs = Bistable::reduced(kind.side(), params, caps);
    let plateau = bubble_plateau(kind, params, caps);
    let dcoef = params.diffusion;
    let sub = libm::ceil(mesh_step / 2.5e-4).max(1.0) as usize;
    let hs = mesh_step / sub as f64;
    let rhs = |s: [f64; 2]| [s[1], -bs.f(s[0]) / dcoef];
    let rk4 = |s: [f64; 2], h: f64| {
        let k1 = rhs(s);
        let k2 = rhs([s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1]]);
        let k3 = rhs([s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1]]);
        let k4 = rhs([s[0] + h * k3[0], s[1] + h * k3[1]]);
        [
            s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    let above = level > plateau;
    let past = |v: f64| if above { v <= plateau } else { v >= plateau };

    let mut xs = alloc::vec![0.0];
    let mut values = alloc::vec![level];
    let mut slopes = alloc::vec![0.0];
    let mut state = [level, 0.0];
    let mut x = 0.0;
    let max_steps = (1e4 / hs) as usize;
    let mut steps = 0usize;
    let half_width;
    loop {
        let next = rk4(state, hs);
        steps += 1;
        if past(next[0]) {
            let tau = bisect(|t| rk4(state, t)[0] - plateau, 0.0, hs, 1e-16).unwrap_or(hs);
            let end = rk4(state, tau);
            half_width = x + tau;
            xs.push(half_width);
            values.push(plateau);
            slopes.push(end[1]);
            break;
        }
        if steps > max_steps || !next[0].is_finite() {
            return Err(Error::Inconsistent("bubble profile did not reach its plateau".into()));
        }
        state = next;
        x = steps as f64 * hs;
        if steps % sub == 0 {
            xs.push(x);
            values.push(state[0]);
            slopes.push(state[1]);
        }
    }
    // Drop a sample too close to the endpoint to keep the last interval regular.
    let n = xs.len();
    if n >= 3 && xs[n - 1] - xs[n - 2] < 1e-9 * mesh_step {
        xs.remove(n - 2);
        values.remove(n - 2);
        slopes.remove(n - 2);
    }
    Ok(Bubble {
        kind,
        level,
        half_width,
        plateau,
        mesh_step,
        diffusion: dcoef,
        xs,
        values,
        slopes,
        bistable: bs,
    })
}

/// Half-width `∫ dz / √(2(F(level) − F(z))/D)` between the level and the
/// plateau, by adaptive Simpson after the substitution `z = level ∓ s²`.
pub fn critical_length(
    kind: BubbleKind,
    level: f64,
    params: &ModelParams,
    caps: &PiecewiseCapacity,
) -> Result<f64> {
    params.validate_two_species()?;
    caps.validate()?;
    check_level(kind, level, params, caps)?;
    let bs = Bistable::reduced(kind.side(), params, caps);
    let plateau = bubble_plateau(kind, params, caps);
    let dcoef = params.diffusion;
    let sign = if level > plateau { -1.0 } else { 1.0 };
    let smax = sqrt((level - plateau).abs());
    let f0 = bs.f(level).abs();
    let integrand = |s: f64| {
        if s == 0.0 {
            return 2.0 / sqrt(2.0 * f0 / dcoef);
        }
        let z = level + sign * s * s;
        let gap = bs.energy_gap(level, z);
        2.0 * s / sqrt(2.0 * gap / dcoef)
    };
    Ok(adaptive_simpson(&integrand, 0.0, smax, 1e-9))
}

/// Bubble pair used to trap the initial data.
#[derive(Debug, Clone)]
pub enum BubblePair {
    /// Kind-F bubble below and kind-U bubble above.
    Sandwich { lower: Bubble, upper: Bubble },
    /// Kind-F and kind-U1 bubbles, summed, below.
    OneSided { forest: Bubble, urban: Bubble },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Admissibility {
    AdmissibleBb { x_alpha: f64, y_beta: f64 },
    AdmissibleTh2 { x_alpha: f64, y_alpha1: f64 },
    Inadmissible,
}

/// Smallest grid shift `s > half_width`, `s ≤ L`, such that
/// `cmp(bubble(x − sign·s), ω⁰(x))` holds at every node.
fn find_shift(
    grid: &Grid1D,
    omega0: &[f64],
    bubble: &Bubble,
    center_sign: f64,
    offset: f64,
    below: bool,
) -> Option<f64> {
    let dx = grid.dx();
    let k0 = libm::floor(bubble.half_width / dx) as usize + 1;
    let kmax = libm::floor(grid.half_length / dx + 1e-9) as usize;
    'shift: for k in k0..=kmax {
        let s = k as f64 * dx;
        if s <= bubble.half_width {
            continue;
        }
        let center = center_sign * s;
        for (i, &w) in omega0.iter().enumerate() {
            let v = bubble.value_at(grid.x(i) - center) + offset;
            let ok = if below { v <= w } else { w <= v };
            if !ok {
                continue 'shift;
            }
        }
        return Some(s);
    }
    None
}

/// Checks whether `omega0` is trapped by translates of the given bubbles,
/// scanning shifts over the grid nodes with bubble centres kept inside
/// the domain.
pub fn admissible_initial_data(
    grid: &Grid1D,
    omega0: &[f64],
    report: &InvasionReport,
    bubbles: &BubblePair,
) -> Admissibility {
    if omega0.len() != grid.n_nodes {
        return Admissibility::Inadmissible;
    }
    match bubbles {
        BubblePair::Sandwich { lower, upper } => {
            if report.scenario != Some(FrontScenario::TwoFronts) {
                return Admissibility::Inadmissible;
            }
            let Some(x_alpha) = find_shift(grid, omega0, lower, -1.0, 0.0, true) else {
                return Admissibility::Inadmissible;
            };
            let Some(y_beta) = find_shift(grid, omega0, upper, 1.0, 0.0, false) else {
                return Admissibility::Inadmissible;
            };
            Admissibility::AdmissibleBb { x_alpha, y_beta }
        }
        BubblePair::OneSided { forest, urban } => {
            if report.scenario != Some(FrontScenario::Species1Invades) {
                return Admissibility::Inadmissible;
            }
            // The supports are disjoint, so each bubble can be placed with
            // the other one at its plateau.
            let Some(x_alpha) = find_shift(grid, omega0, forest, -1.0, urban.plateau, true) else {
                return Admissibility::Inadmissible;
            };
            let Some(y_alpha1) = find_shift(grid, omega0, urban, 1.0, forest.plateau, true) else {
                return Admissibility::Inadmissible;
            };
            Admissibility::AdmissibleTh2 { x_alpha, y_alpha1 }
        }
    }
}
