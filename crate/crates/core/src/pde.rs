//! Semi-implicit finite differences for the 2-species, 3-species and reduced
//! scalar equations on `[−L, L]` with Neumann boundaries.
//!
//! Each step treats the reaction explicitly and the diffusion with backward
//! Euler:
//!
//! ```text
//! (M − dt·D·Δh) u^{n+1} = M (u^n + dt·R(u^n))
//! ```
//!
//! where `Δh` is the three-point Laplacian with reflecting ghost nodes and
//! `M` is either the identity (lumped) or the fourth-order compact mass
//! matrix `tridiag(1, 10, 1)/12`. The compact form keeps a nonnegative
//! inverse only for `D·dt/dx² ≥ 1/12`, so `Scheme::Auto` falls back to the
//! lumped form below that ratio.
//!
//! A node sitting exactly on the interface sees the average of the two
//! one-sided reactions plus a first-order correction built from the jump of
//! the reaction at its two neighbours.

use alloc::vec;
use alloc::vec::Vec;

use crate::equilibria::mating_factor;
use crate::model::{ModelParams, PiecewiseCapacity, Side};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grid1D {
    pub half_length: f64,
    pub n_nodes: usize,
}

impl Grid1D {
    pub fn new(half_length: f64, n_nodes: usize) -> Result<Self> {
        if !(half_length > 0.0 && half_length.is_finite()) || n_nodes < 3 {
            return Err(Error::InvalidArgument(
                "grid needs a positive half length and at least 3 nodes".into(),
            ));
        }
        Ok(Grid1D {
            half_length,
            n_nodes,
        })
    }

    /// Grid with spacing `dx` (rounded so that it divides `2L`).
    pub fn with_spacing(half_length: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidArgument("dx must be positive".into()));
        }
        let cells = libm::round(2.0 * half_length / dx).max(2.0) as usize;
        Self::new(half_length, cells + 1)
    }

    /// 801 nodes on `[−40, 40]`.
    pub fn standard() -> Self {
        Grid1D {
            half_length: 40.0,
            n_nodes: 801,
        }
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / (self.n_nodes - 1) as f64
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes).map(|i| self.x(i)).collect()
    }

    /// Index of the node at `x = 0`, if the grid has one.
    pub fn interface_index(&self) -> Option<usize> {
        let s = self.half_length / self.dx();
        let i = libm::round(s);
        if (s - i).abs() < 1e-9 {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Trapezoid quadrature weights times `dx`.
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.n_nodes {
            0.5 * self.dx()
        } else {
            self.dx()
        }
    }
}

/// Which side of the line carries the forest capacities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Orientation {
    /// Forest on `x < 0`.
    #[default]
    ForestLeft,
    /// Forest on `x > 0`.
    ForestRight,
}

impl Orientation {
    pub fn side_at(self, x: f64) -> Side {
        match self {
            Orientation::ForestLeft => Side::at(x),
            Orientation::ForestRight => Side::at(-x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Habitat {
    pub caps: PiecewiseCapacity,
    pub orientation: Orientation,
}

impl Habitat {
    pub fn new(caps: PiecewiseCapacity, orientation: Orientation) -> Self {
        Habitat { caps, orientation }
    }

    pub fn standard(caps: PiecewiseCapacity) -> Self {
        Self::new(caps, Orientation::ForestLeft)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SystemKind {
    /// Fields `n1, n2`.
    TwoSpecies,
    /// Fields `n1, n2` (wild), `n3` (infected).
    ThreeSpecies,
    /// Single field `ω`.
    ReducedScalar,
}

impl SystemKind {
    pub fn n_fields(self) -> usize {
        match self {
            SystemKind::TwoSpecies => 2,
            SystemKind::ThreeSpecies => 3,
            SystemKind::ReducedScalar => 1,
        }
    }

    pub fn is_density(self) -> bool {
        !matches!(self, SystemKind::ReducedScalar)
    }

    pub fn field_names(self) -> &'static [&'static str] {
        match self {
            SystemKind::TwoSpecies => &["n1", "n2"],
            SystemKind::ThreeSpecies => &["n1", "n2", "n3"],
            SystemKind::ReducedScalar => &["omega"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid1D,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_nodes {
            return Err(Error::InvalidArgument(
                "field length does not match the grid".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field values"));
        }
        Ok(Field { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        Field {
            grid,
            values: (0..grid.n_nodes).map(|i| f(grid.x(i))).collect(),
        }
    }

    pub fn mass(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * self.grid.weight(i))
            .sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `x ↦ u(−x)`.
    pub fn reflected(&self) -> Field {
        let mut values = self.values.clone();
        values.reverse();
        Field {
            grid: self.grid,
            values,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub time: f64,
    pub kind: SystemKind,
    pub fields: Vec<Field>,
}

impl SimState {
    pub fn new(kind: SystemKind, fields: Vec<Field>) -> Result<Self> {
        if fields.len() != kind.n_fields() {
            return Err(Error::InvalidArgument(alloc::format!(
                "{kind:?} needs {} fields, got {}",
                kind.n_fields(),
                fields.len()
            )));
        }
        let grid = fields[0].grid;
        if fields.iter().any(|f| f.grid != grid) {
            return Err(Error::InvalidArgument("fields live on different grids".into()));
        }
        if kind.is_density() && fields.iter().any(|f| f.values.iter().any(|v| *v < 0.0)) {
            return Err(Error::InvalidArgument("densities must be nonnegative".into()));
        }
        Ok(SimState {
            time: 0.0,
            kind,
            fields,
        })
    }

    pub fn grid(&self) -> Grid1D {
        self.fields[0].grid
    }

    /// `n1 − n2 − n3`, or the scalar field itself.
    pub fn omega(&self) -> Vec<f64> {
        match self.kind {
            SystemKind::ReducedScalar => self.fields[0].values.clone(),
            _ => {
                let n = self.grid().n_nodes;
                (0..n)
                    .map(|i| {
                        self.fields[0].values[i]
                            - self.fields[1..].iter().map(|f| f.values[i]).sum::<f64>()
                    })
                    .collect()
            }
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.fields.iter().map(|f| f.mass()).sum()
    }
}

/// `max_x n1·(n2 + n3)`, zero exactly when the supports are disjoint.
pub fn segregation_metric(state: &SimState) -> Result<f64> {
    if state.kind == SystemKind::ReducedScalar {
        return Err(Error::InvalidArgument(
            "segregation metric is undefined for the reduced scalar equation".into(),
        ));
    }
    let n1 = &state.fields[0].values;
    let mut best: f64 = 0.0;
    for i in 0..n1.len() {
        let others: f64 = state.fields[1..].iter().map(|f| f.values[i]).sum();
        best = best.max(n1[i] * others);
    }
    Ok(best)
}

/// Thomas factorisation of a tridiagonal matrix, reusable across solves.
#[derive(Debug, Clone)]
pub struct TridiagFactor {
    lower: Vec<f64>,
    upper_mod: Vec<f64>,
    inv_denom: Vec<f64>,
}

impl TridiagFactor {
    /// `lower[i]` couples row `i+1` to `i`; `upper[i]` couples row `i` to `i+1`.
    pub fn new(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::InvalidArgument(
                "tridiagonal bands have inconsistent lengths".into(),
            ));
        }
        let mut upper_mod = vec![0.0; n.saturating_sub(1)];
        let mut inv_denom = vec![0.0; n];
        let mut prev = 0.0;
        for i in 0..n {
            let denom = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i - 1] * prev
            };
            if denom == 0.0 || !denom.is_finite() {
                return Err(Error::ZeroPivot { row: i });
            }
            inv_denom[i] = 1.0 / denom;
            if i + 1 < n {
                prev = upper[i] * inv_denom[i];
                upper_mod[i] = prev;
            }
        }
        Ok(TridiagFactor {
            lower: lower.to_vec(),
            upper_mod,
            inv_denom,
        })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.inv_denom.len();
        debug_assert_eq!(x.len(), n);
        x[0] *= self.inv_denom[0];
        for i in 1..n {
            x[i] = (x[i] - self.lower[i - 1] * x[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.upper_mod[i] * x[i + 1];
        }
    }
}

pub fn tridiag_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != diag.len() {
        return Err(Error::InvalidArgument(
            "right-hand side length does not match the matrix".into(),
        ));
    }
    let factor = TridiagFactor::new(lower, diag, upper)?;
    let mut x = rhs.to_vec();
    factor.solve_in_place(&mut x);
    Ok(x)
}

/// Treatment of the mass term in the implicit diffusion step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Scheme {
    /// Compact when `D·dt/dx² ≥ 1/12`, lumped otherwise.
    #[default]
    Auto,
    Lumped,
    Compact,
}

/// Bands of `M − r·dx²·Δh` for the chosen mass treatment.
pub fn implicit_bands(n: usize, r: f64, compact: bool) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (m_off, m_diag) = if compact {
        (1.0 / 12.0, 10.0 / 12.0)
    } else {
        (0.0, 1.0)
    };
    let mut lower = vec![m_off - r; n - 1];
    let diag = vec![m_diag + 2.0 * r; n];
    let mut upper = vec![m_off - r; n - 1];
    upper[0] = 2.0 * (m_off - r);
    lower[n - 2] = 2.0 * (m_off - r);
    (lower, diag, upper)
}

/// Row-sum Lipschitz bound of the reaction over the invariant box spanned
/// by the state and the capacities.
pub fn reaction_lipschitz_bound(
    kind: SystemKind,
    p: &ModelParams,
    caps: &PiecewiseCapacity,
    state: &SimState,
) -> f64 {
    let sup = |m: usize| state.fields[m].sup_norm();
    let (k1min, k2min) = (caps.k1_min(), caps.k2_min());
    match kind {
        SystemKind::TwoSpecies => {
            let m1 = sup(0).max(caps.k1_max());
            let m2 = sup(1).max(caps.k2_max());
            let l1 = p.b1 + p.d1 + 2.0 * p.b1 * m1 / k1min + p.c * m2 + p.c * m1;
            let l2 = p.b2 + p.d2 + 2.0 * p.b2 * m2 / k2min + p.c * m1 + p.c * m2;
            l1.max(l2)
        }
        SystemKind::ThreeSpecies => {
            let m1 = sup(0).max(caps.k1_max());
            let mn = (sup(1) + sup(2)).max(caps.k2_max());
            let crowd = 1.0 + mn / k2min;
            let l1 = p.b1 + p.d1 + 2.0 * p.b1 * m1 / k1min + p.c * mn + 2.0 * p.c * m1;
            let l2 = 2.0 * p.b2 * (crowd + mn / k2min) + p.c * m1 + p.d2 + p.c * mn;
            let l3 = p.b3 * (crowd + 2.0 * mn / k2min) + p.c * m1 + p.d3 + p.c * mn;
            l1.max(l2).max(l3)
        }
        SystemKind::ReducedScalar => {
            let m = sup(0).max(caps.k1_max()).max(caps.k2_max());
            let l1 = p.b1 + p.d1 + 2.0 * p.b1 * m / k1min;
            let l2 = p.b2 + p.d2 + 2.0 * p.b2 * m / k2min;
            l1.max(l2)
        }
    }
}

/// Largest admissible step `0.9/Λ`.
pub fn max_stable_dt(kind: SystemKind, p: &ModelParams, caps: &PiecewiseCapacity, state: &SimState) -> f64 {
    let lam = reaction_lipschitz_bound(kind, p, caps, state);
    if lam > 0.0 {
        0.9 / lam
    } else {
        f64::INFINITY
    }
}

/// `min(0.9/Λ, dx²/(2D), 0.01)`.
pub fn default_dt(p: &ModelParams, caps: &PiecewiseCapacity, state: &SimState) -> f64 {
    let dx = state.grid().dx();
    max_stable_dt(state.kind, p, caps, state)
        .min(dx * dx / (2.0 * p.diffusion))
        .min(0.01)
}

#[inline]
fn react(kind: SystemKind, p: &ModelParams, k1: f64, k2: f64, u: [f64; 3]) -> [f64; 3] {
    match kind {
        SystemKind::TwoSpecies => {
            let [n1, n2, _] = u;
            [
                n1 * (p.b1 * (1.0 - n1 / k1) - p.c * n2 - p.d1),
                n2 * (p.b2 * (1.0 - n2 / k2) - p.c * n1 - p.d2),
                0.0,
            ]
        }
        SystemKind::ThreeSpecies => {
            let [n1, n2, n3] = u;
            let s = n2 + n3;
            let crowd = 1.0 - s / k2;
            [
                n1 * (p.b1 * (1.0 - n1 / k1) - p.c * s - p.d1),
                p.b2 * mating_factor(n2, n3) * crowd - n2 * (p.c * n1 + p.d2),
                n3 * (p.b3 * crowd - p.c * n1 - p.d3),
            ]
        }
        SystemKind::ReducedScalar => {
            let w = u[0];
            let v = if w >= 0.0 {
                w * (p.b1 * (1.0 - w / k1) - p.d1)
            } else {
                let m = -w;
                -m * (p.b2 * (1.0 - m / k2) - p.d2)
            };
            [v, 0.0, 0.0]
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Interface {
    node: usize,
    forest_nbr: usize,
    urban_nbr: usize,
}

/// Prefactored stepper for a fixed grid, habitat and time step.
#[derive(Debug, Clone)]
pub struct Stepper {
    kind: SystemKind,
    params: ModelParams,
    dt: f64,
    compact: bool,
    factor: TridiagFactor,
    k1: Vec<f64>,
    k2: Vec<f64>,
    caps: PiecewiseCapacity,
    interface: Option<Interface>,
    correction: f64,
    v: [Vec<f64>; 3],
    rhs: Vec<f64>,
    clamped: f64,
    clamp_count: u64,
}

impl Stepper {
    /// Validates `dt` against the reaction bound at `state` and prefactors
    /// the implicit matrix.
    pub fn new(state: &SimState, params: &ModelParams, habitat: &Habitat, dt: f64, scheme: Scheme) -> Result<Self> {
        params.validate_for_solver()?;
        habitat.caps.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        let bound = max_stable_dt(state.kind, params, &habitat.caps, state);
        if dt > bound * (1.0 + 1e-12) {
            return Err(Error::TimeStepTooLarge { dt, bound });
        }
        let grid = state.grid();
        let n = grid.n_nodes;
        let dx = grid.dx();
        let r = params.diffusion * dt / (dx * dx);
        let compact = match scheme {
            Scheme::Auto => r >= 1.0 / 12.0,
            Scheme::Lumped => false,
            Scheme::Compact => true,
        };
        let (lower, diag, upper) = implicit_bands(n, r, compact);
        let factor = TridiagFactor::new(&lower, &diag, &upper)?;
        let caps = habitat.caps;
        let mut k1 = Vec::with_capacity(n);
        let mut k2 = Vec::with_capacity(n);
        for i in 0..n {
            let side = habitat.orientation.side_at(grid.x(i));
            k1.push(caps.k1(side));
            k2.push(caps.k2(side));
        }
        let interface = grid.interface_index().and_then(|node| {
            if node == 0 || node + 1 >= n {
                return None;
            }
            let (forest_nbr, urban_nbr) = match habitat.orientation {
                Orientation::ForestLeft => (node - 1, node + 1),
                Orientation::ForestRight => (node + 1, node - 1),
            };
            Some(Interface {
                node,
                forest_nbr,
                urban_nbr,
            })
        });
        Ok(Stepper {
            kind: state.kind,
            params: *params,
            dt,
            compact,
            factor,
            k1,
            k2,
            caps,
            interface,
            correction: if compact { 1.0 / 20.0 } else { 1.0 / 16.0 },
            v: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
            rhs: vec![0.0; n],
            clamped: 0.0,
            clamp_count: 0,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn is_compact(&self) -> bool {
        self.compact
    }

    /// Number of negative values removed so far, and their total mass.
    pub fn clamp_stats(&self) -> (u64, f64) {
        (self.clamp_count, self.clamped)
    }

    fn node_values(state: &SimState, i: usize) -> [f64; 3] {
        let mut u = [0.0; 3];
        for (m, f) in state.fields.iter().enumerate() {
            u[m] = f.values[i];
        }
        u
    }

    /// Advances `state` by one step and returns the sup norm of the discrete
    /// time derivative.
    pub fn step(&mut self, state: &mut SimState) -> Result<f64> {
        if state.kind != self.kind {
            return Err(Error::InvalidArgument("state kind differs from stepper".into()));
        }
        let nf = self.kind.n_fields();
        let n = self.k1.len();
        if state.grid().n_nodes != n {
            return Err(Error::InvalidArgument("state grid differs from stepper".into()));
        }
        let dt = self.dt;
        let p = self.params;
        for i in 0..n {
            let u = Self::node_values(state, i);
            let r = react(self.kind, &p, self.k1[i], self.k2[i], u);
            for m in 0..nf {
                self.v[m][i] = u[m] + dt * r[m];
            }
        }
        if let Some(itf) = self.interface {
            let c = &self.caps;
            let (kf1, kf2, ku1, ku2) = (c.k1_f, c.k2_f, c.k1_u, c.k2_u);
            let jump = |u: [f64; 3]| {
                let a = react(self.kind, &p, kf1, kf2, u);
                let b = react(self.kind, &p, ku1, ku2, u);
                [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
            };
            let u0 = Self::node_values(state, itf.node);
            let rf = react(self.kind, &p, kf1, kf2, u0);
            let ru = react(self.kind, &p, ku1, ku2, u0);
            let jf = jump(Self::node_values(state, itf.forest_nbr));
            let ju = jump(Self::node_values(state, itf.urban_nbr));
            for m in 0..nf {
                let r = 0.5 * (rf[m] + ru[m]) + self.correction * (jf[m] - ju[m]);
                self.v[m][itf.node] = u0[m] + dt * r;
            }
        }

        let grid = state.grid();
        let mut sup: f64 = 0.0;
        let mut clamped_now = 0.0;
        for m in 0..nf {
            let v = &self.v[m];
            let rhs = &mut self.rhs;
            if self.compact {
                let w = 1.0 / 12.0;
                rhs[0] = w * (10.0 * v[0] + 2.0 * v[1]);
                for i in 1..n - 1 {
                    rhs[i] = w * (v[i - 1] + 10.0 * v[i] + v[i + 1]);
                }
                rhs[n - 1] = w * (2.0 * v[n - 2] + 10.0 * v[n - 1]);
            } else {
                rhs.copy_from_slice(v);
            }
            self.factor.solve_in_place(rhs);
            let out = &mut state.fields[m].values;
            for i in 0..n {
                let mut val = rhs[i];
                if !val.is_finite() {
                    return Err(Error::NonFinite("solution"));
                }
                if self.kind.is_density() && val < 0.0 {
                    clamped_now += -val * grid.weight(i);
                    self.clamp_count += 1;
                    val = 0.0;
                }
                sup = sup.max((val - out[i]).abs());
                out[i] = val;
            }
        }
        state.time += dt;
        if clamped_now > 0.0 {
            self.clamped += clamped_now;
            let mass = state.total_mass();
            if self.clamped > 1e-8 * mass.max(f64::MIN_POSITIVE) {
                return Err(Error::ClampOverflow {
                    clamped: self.clamped,
                    mass,
                });
            }
        }
        Ok(sup / dt)
    }
}

/// One step of size `dt` with automatic scheme selection.
pub fn step_semi_implicit(state: &SimState, params: &ModelParams, habitat: &Habitat, dt: f64) -> Result<SimState> {
    let mut stepper = Stepper::new(state, params, habitat, dt, Scheme::Auto)?;
    let mut next = state.clone();
    stepper.step(&mut next)?;
    Ok(next)
}

/// Sampling and stopping configuration for [`run_to_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observers {
    /// Interval between stored snapshots; `None` stores none and the caller
    /// reads the final state from the state it passed in.
    pub snapshot_every: Option<f64>,
    /// Interval between diagnostic samples.
    pub sample_every: f64,
    /// Steady once this many consecutive samples have a time derivative
    /// below `steady_tol`.
    pub steady_tol: f64,
    pub steady_samples: usize,
    pub stop_when_steady: bool,
    pub scheme: Scheme,
}

impl Default for Observers {
    fn default() -> Self {
        Observers {
            snapshot_every: None,
            sample_every: 1.0,
            steady_tol: 1e-6,
            steady_samples: 10,
            stop_when_steady: false,
            scheme: Scheme::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub time: f64,
    pub sup_time_derivative: f64,
    /// `None` for the reduced equation.
    pub segregation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunLog {
    pub snapshots: Vec<SimState>,
    pub samples: Vec<Sample>,
    /// Time at which the steady criterion was first met.
    pub steady_at: Option<f64>,
    pub dt: f64,
    pub steps: u64,
    pub clamp_count: u64,
    pub clamped_mass: f64,
}

impl RunLog {
    pub fn last_sup_time_derivative(&self) -> Option<f64> {
        self.samples.last().map(|s| s.sup_time_derivative)
    }
}

/// Integrates to `t_end`, shrinking `dt` so the final time is hit exactly.
/// `dt = None` uses [`default_dt`]. The callback sees every sample with
/// the current state.
pub fn run_with<F: FnMut(&SimState, &Sample)>(
    state: &mut SimState,
    params: &ModelParams,
    habitat: &Habitat,
    dt: Option<f64>,
    t_end: f64,
    observers: &Observers,
    mut on_sample: F,
) -> Result<RunLog> {
    if !(t_end >= state.time) {
        return Err(Error::InvalidArgument("t_end precedes the current time".into()));
    }
    let mut log = RunLog::default();
    let span = t_end - state.time;
    if span == 0.0 {
        if observers.snapshot_every.is_some() {
            log.snapshots.push(state.clone());
        }
        return Ok(log);
    }
    let dt_max = match dt {
        Some(v) => v,
        None => default_dt(params, &habitat.caps, state),
    };
    if !(dt_max > 0.0) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    let n_steps = libm::ceil(span / dt_max - 1e-9).max(1.0) as u64;
    let dt_eff = span / n_steps as f64;
    let mut stepper = Stepper::new(state, params, habitat, dt_eff, observers.scheme)?;
    let stride = |every: f64| libm::round(every / dt_eff).max(1.0) as u64;
    let sample_stride = stride(observers.sample_every);
    let snap_stride = observers.snapshot_every.map(stride);
    let t0 = state.time;
    log.dt = dt_eff;
    if snap_stride.is_some() {
        log.snapshots.push(state.clone());
    }
    let mut quiet_run = 0usize;
    for k in 1..=n_steps {
        let sup = stepper.step(state)?;
        state.time = t0 + k as f64 * dt_eff;
        log.steps = k;
        let last = k == n_steps;
        if k % sample_stride == 0 || last {
            let sample = Sample {
                time: state.time,
                sup_time_derivative: sup,
                segregation: segregation_metric(state).ok(),
            };
            on_sample(state, &sample);
            log.samples.push(sample);
            if sup < observers.steady_tol {
                quiet_run += 1;
                if quiet_run >= observers.steady_samples && log.steady_at.is_none() {
                    log.steady_at = Some(state.time);
                }
            } else {
                quiet_run = 0;
                log.steady_at = None;
            }
        }
        if let Some(s) = snap_stride {
            if k % s == 0 || last {
                log.snapshots.push(state.clone());
            }
        }
        if observers.stop_when_steady && log.steady_at.is_some() {
            if snap_stride.is_some() && log.snapshots.last().map(|s| s.time) != Some(state.time) {
                log.snapshots.push(state.clone());
            }
            break;
        }
    }
    let (count, mass) = stepper.clamp_stats();
    log.clamp_count = count;
    log.clamped_mass = mass;
    Ok(log)
}

pub fn run_to_time(
    state: &mut SimState,
    params: &ModelParams,
    habitat: &Habitat,
    dt: Option<f64>,
    t_end: f64,
    observers: &Observers,
) -> Result<RunLog> {
    run_with(state, params, habitat, dt, t_end, observers, |_, _| {})
}
