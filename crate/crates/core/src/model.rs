//! Parameters, capacities and the pointwise reaction terms.
//!
//! The reduced scalar `ω = n1 - n2` (or `n1 - n2 - n3`) obeys a bistable
//! reaction whose positive branch is the logistic growth of species 1 and
//! whose negative branch is the mirrored logistic growth of the competitor.

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::{Error, Result};
use alloc::format;

/// Demographic rates, competition strength and diffusion coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ModelParams {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    /// Interspecific competition `c = 1/ε`.
    pub c: f64,
    /// Diffusion coefficient shared by all species.
    pub diffusion: f64,
}

impl ModelParams {
    /// Rates used for every packaged scenario.
    pub const fn reference() -> Self {
        ModelParams {
            b1: 1.12,
            b2: 1.0,
            b3: 0.9,
            d1: 0.27,
            d2: 0.2,
            d3: 0.24,
            c: 10.0,
            diffusion: 0.5,
        }
    }

    pub fn with_c(self, c: f64) -> Self {
        ModelParams { c, ..self }
    }

    pub fn with_diffusion(self, diffusion: f64) -> Self {
        ModelParams { diffusion, ..self }
    }

    pub fn alpha1(&self) -> f64 {
        1.0 - self.d1 / self.b1
    }

    pub fn alpha2(&self) -> f64 {
        1.0 - self.d2 / self.b2
    }

    pub fn alpha3(&self) -> f64 {
        1.0 - self.d3 / self.b3
    }

    /// Fraction of the carrying capacity reached by species `i` alone.
    pub fn alpha(&self, species: usize) -> f64 {
        match species {
            1 => self.alpha1(),
            2 => self.alpha2(),
            3 => self.alpha3(),
            _ => f64::NAN,
        }
    }

    /// All fields finite and nonnegative, diffusion strictly positive.
    /// This is all the solver needs.
    pub fn validate_for_solver(&self) -> Result<()> {
        let all = [
            self.b1, self.b2, self.b3, self.d1, self.d2, self.d3, self.c,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument(
                "rates and competition must be finite and nonnegative".into(),
            ));
        }
        if !(self.diffusion.is_finite() && self.diffusion > 0.0) {
            return Err(Error::InvalidArgument(
                "diffusion must be finite and positive".into(),
            ));
        }
        Ok(())
    }

    /// Strict positivity plus `b1 > d1`, `b2 > d2`.
    pub fn validate_two_species(&self) -> Result<()> {
        let all = [
            self.b1,
            self.b2,
            self.b3,
            self.d1,
            self.d2,
            self.d3,
            self.c,
            self.diffusion,
        ];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Hypothesis(
                "all rates, c and the diffusion must be finite and strictly positive".into(),
            ));
        }
        if !(self.b1 > self.d1 && self.b2 > self.d2) {
            return Err(Error::Hypothesis(format!(
                "birth must exceed death (b1 > d1, b2 > d2); got b1={}, d1={}, b2={}, d2={}",
                self.b1, self.d1, self.b2, self.d2
            )));
        }
        Ok(())
    }

    /// Two-species hypotheses plus `b3 > d3`, `b2 > b3`, `d3 > d2`: the
    /// infected strain is less fit than the wild one.
    pub fn validate_three_species(&self) -> Result<()> {
        self.validate_two_species()?;
        if !(self.b3 > self.d3 && self.b2 > self.b3 && self.d3 > self.d2) {
            return Err(Error::Hypothesis(format!(
                "infected strain ordering requires b3 > d3, b2 > b3, d3 > d2; got b2={}, b3={}, d2={}, d3={}",
                self.b2, self.b3, self.d2, self.d3
            )));
        }
        Ok(())
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Which region of the habitat a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Side {
    /// Forest, `x < 0`.
    F,
    /// Urban, `x > 0`.
    U,
}

impl Side {
    /// Side of a point; the interface itself is assigned to `U`.
    pub fn at(x: f64) -> Side {
        if x < 0.0 {
            Side::F
        } else {
            Side::U
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::F => Side::U,
            Side::U => Side::F,
        }
    }
}

/// Carrying capacities of species 1 and of the competitor on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PiecewiseCapacity {
    pub k1_f: f64,
    pub k1_u: f64,
    pub k2_f: f64,
    pub k2_u: f64,
}

impl PiecewiseCapacity {
    pub const fn new(k1_f: f64, k1_u: f64, k2_f: f64, k2_u: f64) -> Self {
        PiecewiseCapacity {
            k1_f,
            k1_u,
            k2_f,
            k2_u,
        }
    }

    pub const fn uniform(k1: f64, k2: f64) -> Self {
        Self::new(k1, k1, k2, k2)
    }

    pub fn k1(&self, side: Side) -> f64 {
        match side {
            Side::F => self.k1_f,
            Side::U => self.k1_u,
        }
    }

    pub fn k2(&self, side: Side) -> f64 {
        match side {
            Side::F => self.k2_f,
            Side::U => self.k2_u,
        }
    }

    pub fn k1_max(&self) -> f64 {
        self.k1_f.max(self.k1_u)
    }

    pub fn k2_max(&self) -> f64 {
        self.k2_f.max(self.k2_u)
    }

    pub fn k1_min(&self) -> f64 {
        self.k1_f.min(self.k1_u)
    }

    pub fn k2_min(&self) -> f64 {
        self.k2_f.min(self.k2_u)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.k1_f == self.k1_u && self.k2_f == self.k2_u
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.k1_f, self.k1_u, self.k2_f, self.k2_u];
        if all.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::Hypothesis(
                "carrying capacities must be finite and strictly positive".into(),
            ));
        }
        Ok(())
    }
}

/// Competitor entering the negative branch: the wild type (`P12`) or the
/// infected strain (`P13`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum SpeciesPair {
    P12,
    P13,
}

/// Species-1 equilibrium density `K1·α1` on a side.
pub fn n1_star(side: Side, params: &ModelParams, caps: &PiecewiseCapacity) -> f64 {
    caps.k1(side) * params.alpha1()
}

/// Wild-type equilibrium density `K2·α2` on a side.
pub fn n2_star(side: Side, params: &ModelParams, caps: &PiecewiseCapacity) -> f64 {
    caps.k2(side) * params.alpha2()
}

/// Infected-strain equilibrium density `K2·α3` on a side.
pub fn n3_star(side: Side, params: &ModelParams, caps: &PiecewiseCapacity) -> f64 {
    caps.k2(side) * params.alpha3()
}

/// Piecewise-logistic bistable nonlinearity on one side.
///
/// `f(ω) = ω (r₊ − s₊ ω)` for `ω ≥ 0` and `f(ω) = −m (r₋ − s₋ m)` with
/// `m = −ω` otherwise. Its antiderivative is the cubic `A ω² + B ω³` on each
/// branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bistable {
    pub r_pos: f64,
    pub s_pos: f64,
    pub r_neg: f64,
    pub s_neg: f64,
}

impl Bistable {
    pub fn new(side: Side, pair: SpeciesPair, params: &ModelParams, caps: &PiecewiseCapacity) -> Self {
        let (b, d) = match pair {
            SpeciesPair::P12 => (params.b2, params.d2),
            SpeciesPair::P13 => (params.b3, params.d3),
        };
        let k1 = caps.k1(side);
        let k2 = caps.k2(side);
        Bistable {
            r_pos: params.b1 - params.d1,
            s_pos: params.b1 / k1,
            r_neg: b - d,
            s_neg: b / k2,
        }
    }

    /// `f^F` or `f^U` for the wild-type competitor.
    pub fn reduced(side: Side, params: &ModelParams, caps: &PiecewiseCapacity) -> Self {
        Self::new(side, SpeciesPair::P12, params, caps)
    }

    /// Stable positive zero `K1·α1`.
    pub fn positive_root(&self) -> f64 {
        self.r_pos / self.s_pos
    }

    /// Stable negative zero `−K2·α`.
    pub fn negative_root(&self) -> f64 {
        -self.r_neg / self.s_neg
    }

    #[inline]
    pub fn f(&self, w: f64) -> f64 {
        if w >= 0.0 {
            w * (self.r_pos - self.s_pos * w)
        } else {
            let m = -w;
            -m * (self.r_neg - self.s_neg * m)
        }
    }

    #[inline]
    pub fn df(&self, w: f64) -> f64 {
        if w >= 0.0 {
            self.r_pos - 2.0 * self.s_pos * w
        } else {
            self.r_neg + 2.0 * self.s_neg * w
        }
    }

    #[inline]
    fn cubic(&self, w: f64) -> (f64, f64) {
        if w >= 0.0 {
            (0.5 * self.r_pos, -self.s_pos / 3.0)
        } else {
            (0.5 * self.r_neg, self.s_neg / 3.0)
        }
    }

    #[inline]
    pub fn antiderivative(&self, w: f64) -> f64 {
        let (a, b) = self.cubic(w);
        w * w * (a + b * w)
    }

    /// `F(a) − F(w)` without cancellation when `a` and `w` share a branch.
    pub fn energy_gap(&self, a: f64, w: f64) -> f64 {
        if (a >= 0.0) == (w >= 0.0) {
            let (ca, cb) = self.cubic(a);
            (a - w) * (ca * (a + w) + cb * (a * a + a * w + w * w))
        } else {
            self.antiderivative(a) - self.antiderivative(w)
        }
    }

    /// `F(K1·α1) − F(−K2·α)`, the invasion coefficient on this side.
    pub fn gamma(&self) -> f64 {
        self.antiderivative(self.positive_root()) - self.antiderivative(self.negative_root())
    }
}

pub fn reaction_f(side: Side, omega: f64, params: &ModelParams, caps: &PiecewiseCapacity) -> f64 {
    Bistable::reduced(side, params, caps).f(omega)
}

/// Antiderivative of [`reaction_f`] vanishing at zero.
pub fn antiderivative_f(
    side: Side,
    omega: f64,
    params: &ModelParams,
    caps: &PiecewiseCapacity,
) -> f64 {
    Bistable::reduced(side, params, caps).antiderivative(omega)
}

/// Reduced reaction when a fraction `p` of the competitor is infected.
pub fn reaction_g(
    side: Side,
    p: f64,
    omega: f64,
    params: &ModelParams,
    caps: &PiecewiseCapacity,
) -> f64 {
    let k1 = caps.k1(side);
    let k2 = caps.k2(side);
    let wp = omega.max(0.0);
    let wm = (-omega).max(0.0);
    let q = 1.0 - p;
    let birth = params.b2 * q * q + params.b3 * p;
    let death = params.d2 * q + params.d3 * p;
    params.b1 * wp * (1.0 - wp / k1) - params.d1 * wp - wm * (birth * (1.0 - wm / k2) - death)
}

/// Antiderivative of [`reaction_g`] at `p = 0` (`P12`) or `p = 1` (`P13`).
pub fn antiderivative_g(
    side: Side,
    pair: SpeciesPair,
    omega: f64,
    params: &ModelParams,
    caps: &PiecewiseCapacity,
) -> f64 {
    Bistable::new(side, pair, params, caps).antiderivative(omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CASE1: PiecewiseCapacity = PiecewiseCapacity::new(10.0, 1.0, 1.0, 10.0);

    fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        // 5-point rule on 64 panels, splitting at the kink.
        let nodes = [
            0.0,
            -0.538_469_310_105_683,
            0.538_469_310_105_683,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        let weights = [
            0.568_888_888_888_889,
            0.478_628_670_499_366,
            0.478_628_670_499_366,
            0.236_926_885_056_189,
            0.236_926_885_056_189,
        ];
        let mut pts = alloc::vec![a, b];
        if a < 0.0 && b > 0.0 || b < 0.0 && a > 0.0 {
            pts.insert(1, 0.0);
        }
        let mut total = 0.0;
        for w in pts.windows(2) {
            let n = 64;
            let h = (w[1] - w[0]) / n as f64;
            for k in 0..n {
                let c = w[0] + (k as f64 + 0.5) * h;
                for (x, wt) in nodes.iter().zip(weights.iter()) {
                    total += wt * f(c + 0.5 * h * x) * 0.5 * h;
                }
            }
        }
        total
    }

    #[test]
    fn reaction_f_values() {
        let p = ModelParams::reference();
        assert_eq!(reaction_f(Side::F, 0.0, &p, &CASE1), 0.0);
        let n1 = n1_star(Side::F, &p, &CASE1);
        assert!(reaction_f(Side::F, n1, &p, &CASE1).abs() < 1e-14);
        let v = reaction_f(Side::F, 1.0, &p, &CASE1);
        assert!((v - (1.12 * 0.9 - 0.27)).abs() < 1e-14);
        assert!((v - 0.738).abs() < 1e-12);
    }

    #[test]
    fn antiderivative_at_carrying_equilibrium() {
        let p = ModelParams::reference();
        let a1 = p.alpha1();
        let expected = p.b1 * 100.0 * a1 * a1 * a1 / 6.0;
        let n1 = n1_star(Side::F, &p, &CASE1);
        assert!((antiderivative_f(Side::F, n1, &p, &CASE1) - expected).abs() < 1e-12);
        let quad = gauss_legendre(|w| reaction_f(Side::F, w, &p, &CASE1), 0.0, n1);
        assert!((quad - expected).abs() < 1e-11);
    }

    #[test]
    fn reaction_g_values() {
        let p = ModelParams::reference();
        for &w in &[-3.0, -0.5, 0.0, 0.7, 4.0] {
            for side in [Side::F, Side::U] {
                assert!(
                    (reaction_g(side, 0.0, w, &p, &CASE1) - reaction_f(side, w, &p, &CASE1)).abs()
                        < 1e-14
                );
            }
        }
        let root = -n3_star(Side::U, &p, &CASE1);
        assert!(reaction_g(Side::U, 1.0, root, &p, &CASE1).abs() < 1e-13);
        let v = reaction_g(Side::F, 1.0, -1.0, &p, &CASE1);
        assert!((v - 0.24).abs() < 1e-14);
    }

    #[test]
    fn antiderivative_g_pair13_at_root() {
        let p = ModelParams::reference();
        let a3 = p.alpha3();
        let w = -10.0 * a3;
        let expected = p.b3 * 100.0 * a3 * a3 * a3 / 6.0;
        let g = antiderivative_g(Side::U, SpeciesPair::P13, w, &p, &CASE1);
        assert!((g - expected).abs() < 1e-12);
        let quad = gauss_legendre(|z| reaction_g(Side::U, 1.0, z, &p, &CASE1), 0.0, w);
        assert!((quad - expected).abs() < 1e-10);
    }

    #[test]
    fn pair12_matches_f_on_grid() {
        let p = ModelParams::reference();
        for i in 0..=200 {
            let w = -10.0 + 0.1 * i as f64;
            for side in [Side::F, Side::U] {
                let g = antiderivative_g(side, SpeciesPair::P12, w, &p, &CASE1);
                assert!((g - antiderivative_f(side, w, &p, &CASE1)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn interface_belongs_to_urban_side() {
        assert_eq!(Side::at(0.0), Side::U);
        assert_eq!(Side::at(-1e-300), Side::F);
    }

    #[test]
    fn hypotheses_are_checked() {
        let mut p = ModelParams::reference();
        assert!(p.validate_three_species().is_ok());
        p.b3 = 1.1;
        assert!(matches!(p.validate_three_species(), Err(Error::Hypothesis(_))));
        p = ModelParams::reference();
        p.d1 = 2.0;
        assert!(matches!(p.validate_two_species(), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn energy_gap_matches_difference() {
        let p = ModelParams::reference();
        let bs = Bistable::reduced(Side::F, &p, &CASE1);
        for &(a, w) in &[(7.0, 2.0), (-0.5, -3.0), (1.0, -1.0), (7.589, 7.5889)] {
            let direct = bs.antiderivative(a) - bs.antiderivative(w);
            assert!((bs.energy_gap(a, w) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
    }
}
