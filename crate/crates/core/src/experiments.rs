//! Packaged scenarios and the rules that turn a simulation into a verdict.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::invasion::{
    admissible_initial_data, bubble_construct, bubble_level_range, invasion_report, Admissibility,
    BubbleKind, BubblePair, FrontScenario,
};
use crate::model::{ModelParams, PiecewiseCapacity};
use crate::pde::{
    run_to_time, run_with, Field, Grid1D, Habitat, Observers, Orientation, RunLog, SimState,
    SystemKind,
};
use crate::stationary::{front_construct, Regime, StationaryFront};
use crate::{Error, Result};

/// Constant `value` of species `species` (1-based) on the closed interval
/// `[lo, hi]`; infinite endpoints allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct InitialPiece {
    pub species: usize,
    pub value: f64,
    pub interval: [f64; 2],
}

impl InitialPiece {
    pub const fn new(species: usize, value: f64, lo: f64, hi: f64) -> Self {
        InitialPiece {
            species,
            value,
            interval: [lo, hi],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Outcome {
    TwoFrontSegregation,
    Species1InvadesAll,
    ReplacementSuccess,
    ReplacementFailure,
    ReplacementThenN1Invades,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::TwoFrontSegregation => "two_front_segregation",
            Outcome::Species1InvadesAll => "species1_invades_all",
            Outcome::ReplacementSuccess => "replacement_success",
            Outcome::ReplacementFailure => "replacement_failure",
            Outcome::ReplacementThenN1Invades => "replacement_then_n1_invades",
        }
    }

    /// Whether a release of the infected strain took hold.
    pub fn is_replacement(self) -> bool {
        matches!(
            self,
            Outcome::ReplacementSuccess | Outcome::ReplacementThenN1Invades
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub params: ModelParams,
    pub habitat: Habitat,
    pub system: SystemKind,
    pub initial: Vec<InitialPiece>,
    pub t_end: f64,
    pub dt: Option<f64>,
    pub dx: f64,
    pub half_length: f64,
    pub expected: Outcome,
}

const INF: f64 = f64::INFINITY;

/// Capacities of the two-front test habitat.
pub const CASE1_CAPS: PiecewiseCapacity = PiecewiseCapacity::new(10.0, 1.0, 1.0, 10.0);
/// Capacities of the one-invader test habitat.
pub const CASE2_CAPS: PiecewiseCapacity = PiecewiseCapacity::new(10.0, 7.0, 1.0, 5.0);
/// Habitat where replacement leaves the urban side to the infected strain.
pub const WOLB_A_CAPS: PiecewiseCapacity = PiecewiseCapacity::new(10.0, 1.0, 1.0, 10.0);
/// Habitat where replacement opens the urban side to species 1.
pub const WOLB_B_CAPS: PiecewiseCapacity = PiecewiseCapacity::new(10.0, 4.0, 1.0, 4.5);

fn base(name: &str, caps: PiecewiseCapacity, orientation: Orientation, system: SystemKind) -> Scenario {
    Scenario {
        name: name.into(),
        params: ModelParams::reference(),
        habitat: Habitat::new(caps, orientation),
        system,
        initial: Vec::new(),
        t_end: 500.0,
        dt: None,
        dx: 0.1,
        half_length: 40.0,
        expected: Outcome::TwoFrontSegregation,
    }
}

/// Two fronts. The forest is put on `x > 0`, where the initial species-1
/// patch sits.
pub fn scenario_case1() -> Scenario {
    Scenario {
        initial: vec![
            InitialPiece::new(1, 2.0, 10.0, 20.0),
            InitialPiece::new(2, 2.5, -20.0, -10.0),
        ],
        ..base("case1", CASE1_CAPS, Orientation::ForestRight, SystemKind::TwoSpecies)
    }
}

/// Species 1 invades both sides.
pub fn scenario_case2() -> Scenario {
    Scenario {
        initial: vec![
            InitialPiece::new(1, 2.0, 10.0, 20.0),
            InitialPiece::new(2, 2.5, -20.0, -10.0),
        ],
        expected: Outcome::Species1InvadesAll,
        ..base("case2", CASE2_CAPS, Orientation::ForestLeft, SystemKind::TwoSpecies)
    }
}

fn wolbachia(name: &str, caps: PiecewiseCapacity, wild: f64, release: InitialPiece, expected: Outcome) -> Scenario {
    Scenario {
        initial: vec![
            InitialPiece::new(1, 2.0, 10.0, 20.0),
            InitialPiece::new(2, wild, -INF, 0.0),
            release,
        ],
        t_end: 2000.0,
        expected,
        ..base(name, caps, Orientation::ForestRight, SystemKind::ThreeSpecies)
    }
}

pub fn scenario_wolb1() -> Scenario {
    wolbachia(
        "wolb1",
        WOLB_A_CAPS,
        7.5,
        InitialPiece::new(3, 7.0, -25.0, -15.0),
        Outcome::ReplacementSuccess,
    )
}

pub fn scenario_wolb2() -> Scenario {
    wolbachia(
        "wolb2",
        WOLB_A_CAPS,
        7.5,
        InitialPiece::new(3, 7.0, -20.0, -15.0),
        Outcome::ReplacementFailure,
    )
}

pub fn scenario_wolb3() -> Scenario {
    wolbachia(
        "wolb3",
        WOLB_B_CAPS,
        3.5,
        InitialPiece::new(3, 3.0, -25.0, -20.0),
        Outcome::ReplacementFailure,
    )
}

pub fn scenario_wolb4() -> Scenario {
    wolbachia(
        "wolb4",
        WOLB_B_CAPS,
        3.5,
        InitialPiece::new(3, 3.0, -25.0, -10.0),
        Outcome::ReplacementThenN1Invades,
    )
}

pub const SCENARIO_NAMES: [&str; 6] = ["case1", "case2", "wolb1", "wolb2", "wolb3", "wolb4"];

pub fn scenario_by_name(name: &str) -> Option<Scenario> {
    Some(match name {
        "case1" => scenario_case1(),
        "case2" => scenario_case2(),
        "wolb1" => scenario_wolb1(),
        "wolb2" => scenario_wolb2(),
        "wolb3" => scenario_wolb3(),
        "wolb4" => scenario_wolb4(),
        _ => return None,
    })
}

pub fn all_scenarios() -> Vec<Scenario> {
    SCENARIO_NAMES
        .iter()
        .filter_map(|n| scenario_by_name(n))
        .collect()
}

impl Scenario {
    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::with_spacing(self.half_length, self.dx)
    }

    pub fn validate(&self) -> Result<()> {
        match self.system {
            SystemKind::ThreeSpecies => self.params.validate_three_species()?,
            _ => self.params.validate_two_species()?,
        }
        self.habitat.caps.validate()?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidArgument("t_end must be finite and nonnegative".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) {
                return Err(Error::InvalidArgument("dt must be positive".into()));
            }
        }
        // A reduced run takes species data and builds ω = n1 − n2 − n3.
        let nf = match self.system {
            SystemKind::ReducedScalar => 3,
            k => k.n_fields(),
        };
        for piece in &self.initial {
            let [lo, hi] = piece.interval;
            if piece.species == 0 || piece.species > nf {
                return Err(Error::InvalidArgument(alloc::format!(
                    "initial piece refers to species {} of a {nf}-field system",
                    piece.species
                )));
            }
            if !(piece.value >= 0.0 && piece.value.is_finite()) || lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(Error::InvalidArgument(
                    "initial pieces need a nonnegative value and lo <= hi".into(),
                ));
            }
        }
        Ok(())
    }

    /// Initial densities on the scenario grid; pieces of the same species add.
    pub fn initial_state(&self) -> Result<SimState> {
        self.validate()?;
        let grid = self.grid()?;
        let nf = self.system.n_fields();
        let mut fields = vec![vec![0.0; grid.n_nodes]; nf];
        for piece in &self.initial {
            let [lo, hi] = piece.interval;
            let (target, sign) = match self.system {
                SystemKind::ReducedScalar if piece.species == 1 => (0, 1.0),
                SystemKind::ReducedScalar => (0, -1.0),
                _ => (piece.species - 1, 1.0),
            };
            for (i, v) in fields[target].iter_mut().enumerate() {
                let x = grid.x(i);
                if x >= lo && x <= hi {
                    *v += sign * piece.value;
                }
            }
        }
        let fields = fields
            .into_iter()
            .map(|v| Field::new(grid, v))
            .collect::<Result<Vec<_>>>()?;
        SimState::new(self.system, fields)
    }

    /// `ω⁰ = n1⁰ − n2⁰ − n3⁰` as the reduced-equation state.
    pub fn reduced_initial_state(&self) -> Result<SimState> {
        let s = self.initial_state()?;
        SimState::new(
            SystemKind::ReducedScalar,
            vec![Field::new(s.grid(), s.omega())?],
        )
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.params.c = c;
        self
    }
}

/// Which species (1-based) dominates a region, if any.
pub type Dominance = Option<usize>;

/// Regional summary used by the judging rules.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegionSummary {
    /// Mean of each species over `x < −5` (`left`) and `x > 5` (`right`).
    pub left_means: Vec<f64>,
    pub right_means: Vec<f64>,
    pub left: Dominance,
    pub right: Dominance,
}

/// Half-width of the band around the interface excluded from regional means.
pub const REGION_MARGIN: f64 = 5.0;
/// Dominance factor over every other species' regional mean.
pub const DOMINANCE_RATIO: f64 = 10.0;
/// Sup-norm threshold for calling a species extinct.
pub const EXTINCTION_LEVEL: f64 = 1e-3;

fn dominant(means: &[f64]) -> Dominance {
    (0..means.len()).find(|&s| {
        means[s] > 0.0
            && (0..means.len())
                .filter(|&o| o != s)
                .all(|o| means[s] > DOMINANCE_RATIO * means[o])
    })
    .map(|s| s + 1)
}

pub fn region_summary(state: &SimState) -> RegionSummary {
    let grid = state.grid();
    let mut left = vec![0.0; state.fields.len()];
    let mut right = vec![0.0; state.fields.len()];
    let (mut nl, mut nr) = (0usize, 0usize);
    for i in 0..grid.n_nodes {
        let x = grid.x(i);
        if x < -REGION_MARGIN {
            nl += 1;
            for (m, f) in state.fields.iter().enumerate() {
                left[m] += f.values[i];
            }
        } else if x > REGION_MARGIN {
            nr += 1;
            for (m, f) in state.fields.iter().enumerate() {
                right[m] += f.values[i];
            }
        }
    }
    for v in left.iter_mut() {
        *v /= nl.max(1) as f64;
    }
    for v in right.iter_mut() {
        *v /= nr.max(1) as f64;
    }
    RegionSummary {
        left: dominant(&left),
        right: dominant(&right),
        left_means: left,
        right_means: right,
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Diagnostics {
    pub final_time: f64,
    pub final_sup_time_derivative: f64,
    pub steady_at: Option<f64>,
    /// Zero crossings of `ω`, linearly interpolated.
    pub front_positions: Vec<f64>,
    /// `max |ω − ω̄|` on `|x| ≤ 30` for the system run.
    pub front_deviation: Option<f64>,
    /// Same for the reduced-equation run from `ω⁰`.
    pub reduced_front_deviation: Option<f64>,
    pub reduced_steady_at: Option<f64>,
    pub regions: RegionSummary,
    pub species_sup: Vec<f64>,
    /// Undefined for the reduced equation.
    pub final_segregation: Option<f64>,
    /// First sample at which the infected strain dominated a region.
    pub first_infected_dominance: Option<f64>,
    pub admissibility: Option<Admissibility>,
    pub dt: f64,
    pub steps: u64,
    pub clamp_count: u64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Verdict {
    pub scenario: String,
    /// `None` when no verdict class matches the final state.
    pub outcome: Option<Outcome>,
    /// Steady state reached before `t_end`.
    pub resolved: bool,
    pub diagnostics: Diagnostics,
}

impl Verdict {
    pub fn matches(&self, expected: Outcome) -> bool {
        self.outcome == Some(expected)
    }
}

/// Distance on `|x| ≤ 30`.
pub const COMPARISON_WINDOW: f64 = 30.0;

pub fn front_deviation(grid: &Grid1D, omega: &[f64], front: &StationaryFront) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, w) in omega.iter().enumerate() {
        let x = grid.x(i);
        if x.abs() <= COMPARISON_WINDOW + 1e-9 {
            worst = worst.max((w - front.value_at(x)).abs());
        }
    }
    worst
}

/// Sign changes of `ω`. A crossing between nonzero nodes is linearly
/// interpolated; a run of exact zeros reports its midpoint.
pub fn zero_crossings(grid: &Grid1D, omega: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut last: Option<usize> = None;
    for (i, &w) in omega.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        if let Some(k) = last {
            let a = omega[k];
            if a * w < 0.0 {
                out.push(if k + 1 == i {
                    grid.x(k) + a / (a - w) * grid.dx()
                } else {
                    0.5 * (grid.x(k + 1) + grid.x(i - 1))
                });
            }
        }
        last = Some(i);
    }
    out
}

/// Stationary front the reduced equation should approach, oriented like
/// the scenario habitat.
pub fn predicted_front(scenario: &Scenario) -> Option<StationaryFront> {
    let report = invasion_report(&scenario.params, &scenario.habitat.caps, false).ok()?;
    let regime = match report.scenario? {
        FrontScenario::TwoFronts => Regime::Bb,
        FrontScenario::Species1Invades => Regime::Th2,
        _ => return None,
    };
    let front = front_construct(
        &scenario.params,
        &scenario.habitat.caps,
        regime,
        scenario.half_length,
        scenario.dx,
    )
    .ok()?;
    Some(match scenario.habitat.orientation {
        Orientation::ForestLeft => front,
        Orientation::ForestRight => front.mirrored(),
    })
}

/// Tries five bubble levels per kind and reports the first trapping found.
pub fn check_admissibility(scenario: &Scenario) -> Option<Admissibility> {
    let params = &scenario.params;
    let caps = &scenario.habitat.caps;
    let report = invasion_report(params, caps, false).ok()?;
    let reduced = scenario.reduced_initial_state().ok()?;
    let grid = reduced.grid();
    let mut omega = reduced.fields[0].clone();
    if scenario.habitat.orientation == Orientation::ForestRight {
        omega = omega.reflected();
    }
    let levels = |kind: BubbleKind| -> Vec<f64> {
        match bubble_level_range(kind, params, caps) {
            Ok((lo, hi)) => (1..=5).map(|k| lo + (hi - lo) * k as f64 / 6.0).collect(),
            Err(_) => Vec::new(),
        }
    };
    let (first, second) = match report.scenario? {
        FrontScenario::TwoFronts => (BubbleKind::F, BubbleKind::U),
        FrontScenario::Species1Invades => (BubbleKind::F, BubbleKind::U1),
        _ => return None,
    };
    let mesh = 0.01;
    let mut found = Admissibility::Inadmissible;
    'outer: for a in levels(first) {
        let Ok(b1) = bubble_construct(first, a, params, caps, mesh) else { continue };
        for b in levels(second) {
            let Ok(b2) = bubble_construct(second, b, params, caps, mesh) else { continue };
            let pair = if second == BubbleKind::U {
                BubblePair::Sandwich {
                    lower: b1.clone(),
                    upper: b2,
                }
            } else {
                BubblePair::OneSided {
                    forest: b1.clone(),
                    urban: b2,
                }
            };
            let r = admissible_initial_data(&grid, &omega.values, &report, &pair);
            if r != Admissibility::Inadmissible {
                found = r;
                break 'outer;
            }
        }
    }
    Some(found)
}

/// Steady-state sampling used by every scenario run.
pub fn scenario_observers() -> Observers {
    Observers {
        stop_when_steady: true,
        ..Observers::default()
    }
}

fn judge(system: SystemKind, regions: &RegionSummary, sup: &[f64], first_infected: Option<f64>) -> Option<Outcome> {
    let (l, r) = (regions.left?, regions.right?);
    match system {
        SystemKind::TwoSpecies => match (l, r) {
            (1, 1) => Some(Outcome::Species1InvadesAll),
            (a, b) if a != b => Some(Outcome::TwoFrontSegregation),
            _ => None,
        },
        SystemKind::ThreeSpecies => {
            if l == 1 && r == 1 {
                return Some(if first_infected.is_some() {
                    Outcome::ReplacementThenN1Invades
                } else {
                    Outcome::Species1InvadesAll
                });
            }
            let has = |s| l == s || r == s;
            if has(3) && has(1) && sup[1] < EXTINCTION_LEVEL {
                return Some(Outcome::ReplacementSuccess);
            }
            if has(2) && sup[2] < EXTINCTION_LEVEL {
                return Some(Outcome::ReplacementFailure);
            }
            None
        }
        SystemKind::ReducedScalar => None,
    }
}

/// Runs the scenario until steady or `t_end` and classifies the final state.
/// Two-species scenarios are also run through the reduced equation and
/// both runs are compared with the predicted stationary front.
pub fn run_and_judge(scenario: &Scenario) -> Result<Verdict> {
    let (verdict, _) = run_and_judge_with_log(scenario, None)?;
    Ok(verdict)
}

/// As [`run_and_judge`], also returning the run log with snapshots every
/// `snapshot_every` time units.
pub fn run_and_judge_with_log(scenario: &Scenario, snapshot_every: Option<f64>) -> Result<(Verdict, RunLog)> {
    let mut state = scenario.initial_state()?;
    let observers = Observers {
        snapshot_every,
        ..scenario_observers()
    };
    let mut first_infected = None;
    let log = run_with(
        &mut state,
        &scenario.params,
        &scenario.habitat,
        scenario.dt,
        scenario.t_end,
        &observers,
        |s, sample| {
            if s.kind == SystemKind::ThreeSpecies && first_infected.is_none() {
                let r = region_summary(s);
                if r.left == Some(3) || r.right == Some(3) {
                    first_infected = Some(sample.time);
                }
            }
        },
    )?;
    let grid = state.grid();
    let regions = region_summary(&state);
    let species_sup: Vec<f64> = state.fields.iter().map(|f| f.sup_norm()).collect();
    let omega = state.omega();

    let mut front_dev = None;
    let mut reduced_dev = None;
    let mut reduced_steady = None;
    let mut admissibility = None;
    if scenario.system == SystemKind::TwoSpecies {
        if let Some(front) = predicted_front(scenario) {
            front_dev = Some(front_deviation(&grid, &omega, &front));
            let mut red = scenario.reduced_initial_state()?;
            let rlog = run_to_time(
                &mut red,
                &scenario.params,
                &scenario.habitat,
                scenario.dt,
                scenario.t_end,
                &scenario_observers(),
            )?;
            reduced_steady = rlog.steady_at;
            reduced_dev = Some(front_deviation(&grid, &red.fields[0].values, &front));
        }
        admissibility = check_admissibility(scenario);
    } else if scenario.system == SystemKind::ReducedScalar {
        if let Some(front) = predicted_front(scenario) {
            front_dev = Some(front_deviation(&grid, &omega, &front));
        }
        admissibility = check_admissibility(scenario);
    }

    let outcome = judge(scenario.system, &regions, &species_sup, first_infected);
    let diagnostics = Diagnostics {
        final_time: state.time,
        final_sup_time_derivative: log.last_sup_time_derivative().unwrap_or(0.0),
        steady_at: log.steady_at,
        front_positions: zero_crossings(&grid, &omega),
        front_deviation: front_dev,
        reduced_front_deviation: reduced_dev,
        reduced_steady_at: reduced_steady,
        regions,
        species_sup,
        final_segregation: crate::pde::segregation_metric(&state).ok(),
        first_infected_dominance: first_infected,
        admissibility,
        dt: log.dt,
        steps: log.steps,
        clamp_count: log.clamp_count,
    };
    Ok((
        Verdict {
            scenario: scenario.name.clone(),
            outcome,
            resolved: log.steady_at.is_some(),
            diagnostics,
        },
        log,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StudyRow {
    pub c: f64,
    /// `ε = 1/c`.
    pub epsilon: f64,
    pub segregation: f64,
    /// `max |ω_c − ω_reduced|` over the grid at the study time.
    pub deviation: f64,
}

/// Runs the two-species system at each competition strength and the
/// reduced equation once, all to time `t`.
pub fn strong_competition_study(base_scenario: &Scenario, c_values: &[f64], t: f64) -> Result<Vec<StudyRow>> {
    if base_scenario.system != SystemKind::TwoSpecies {
        return Err(Error::InvalidArgument(
            "the convergence study needs a two-species scenario".into(),
        ));
    }
    if c_values.iter().any(|c| !(*c > 0.0)) || c_values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "competition values must be positive and ascending".into(),
        ));
    }
    let reduced = reduced_reference(base_scenario, t)?;
    c_values
        .iter()
        .map(|&c| study_row(base_scenario, c, t, &reduced))
        .collect()
}

/// The reduced equation from `ω⁰`, run to time `t`.
pub fn reduced_reference(base_scenario: &Scenario, t: f64) -> Result<Vec<f64>> {
    let mut reduced = base_scenario.reduced_initial_state()?;
    run_to_time(
        &mut reduced,
        &base_scenario.params,
        &base_scenario.habitat,
        base_scenario.dt,
        t,
        &Observers::default(),
    )?;
    Ok(reduced.fields.swap_remove(0).values)
}

/// One row of the convergence study against a precomputed reduced solution.
pub fn study_row(base_scenario: &Scenario, c: f64, t: f64, reduced: &[f64]) -> Result<StudyRow> {
    let sc = base_scenario.clone().with_c(c);
    let mut state = sc.initial_state()?;
    run_to_time(&mut state, &sc.params, &sc.habitat, None, t, &Observers::default())?;
    let omega = state.omega();
    let deviation = omega
        .iter()
        .zip(reduced)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(StudyRow {
        c,
        epsilon: 1.0 / c,
        segregation: crate::pde::segregation_metric(&state)?,
        deviation,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ProbeResult {
    pub width: f64,
    pub outcome: Option<Outcome>,
    pub success: bool,
}

/// The release scenario with the infected support `[a, a + width]`, where
/// `a` is the left end of the original release; zero width removes it.
pub fn release_with_width(family: &Scenario, width: f64) -> Result<Scenario> {
    let idx = family
        .initial
        .iter()
        .position(|p| p.species == 3)
        .ok_or_else(|| Error::InvalidArgument("scenario has no infected release".into()))?;
    let mut sc = family.clone();
    let piece = sc.initial[idx];
    if width <= 0.0 {
        sc.initial.remove(idx);
    } else {
        let lo = piece.interval[0];
        sc.initial[idx].interval = [lo, lo + width];
    }
    sc.name = alloc::format!("{}_width_{width}", family.name);
    Ok(sc)
}

/// Release outcome for each support width, plus whether success is
/// monotone in the width over the probed set.
pub fn bubble_threshold_probe(family: &Scenario, widths: &[f64]) -> Result<(Vec<ProbeResult>, bool)> {
    if widths.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("widths must be ascending".into()));
    }
    let mut out = Vec::with_capacity(widths.len());
    for &w in widths {
        out.push(probe_width(family, w)?);
    }
    let monotone = probe_is_monotone(&out);
    Ok((out, monotone))
}

pub fn probe_width(family: &Scenario, width: f64) -> Result<ProbeResult> {
    let sc = release_with_width(family, width)?;
    let v = run_and_judge(&sc)?;
    Ok(ProbeResult {
        width,
        outcome: v.outcome,
        success: v.outcome.is_some_and(Outcome::is_replacement),
    })
}

pub fn probe_is_monotone(results: &[ProbeResult]) -> bool {
    results.windows(2).all(|w| !w[0].success || w[1].success)
}
