//! One function per subcommand. Each returns the JSON it prints and
//! writes its files under the given output directory.

use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use segrad_core::equilibria::{
    condition_3species_printed, equilibria_2species, equilibria_3species,
};
use segrad_core::experiments::{
    probe_is_monotone, probe_width, reduced_reference, run_and_judge_with_log, scenario_by_name,
    study_row, Scenario, Verdict, SCENARIO_NAMES,
};
use segrad_core::invasion::{
    bubble_construct, bubble_level_range, critical_length, invasion_report, BubbleKind,
    FrontScenario,
};
use segrad_core::pde::SystemKind;
use segrad_core::stationary::{front_construct, Regime};
use segrad_core::Side;

use crate::config::{unknown_scenario, RunConfig};
use crate::output::{write_columns, write_json, write_snapshots_file};
use crate::CliError;

/// Command-line overrides applied on top of a configuration.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub dx: Option<f64>,
    pub t_end: Option<f64>,
    pub c: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if let Some(dt) = self.dt {
            cfg.dt = Some(dt);
        }
        if let Some(dx) = self.dx {
            cfg.grid.dx = dx;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        if let Some(c) = self.c {
            cfg.params.c = c;
        }
        cfg.validate()
    }
}

fn validate_hypotheses(cfg: &RunConfig) -> Result<(), CliError> {
    match cfg.system {
        SystemKind::ThreeSpecies => cfg.params.validate_three_species()?,
        _ => cfg.params.validate_two_species()?,
    }
    Ok(())
}

pub fn cmd_equilibria(cfg: &RunConfig) -> Result<Value, CliError> {
    validate_hypotheses(cfg)?;
    let p = &cfg.params;
    let mut sides = serde_json::Map::new();
    for (key, side) in [("forest", Side::F), ("urban", Side::U)] {
        let (k1, k2) = (cfg.caps.k1(side), cfg.caps.k2(side));
        let v = match cfg.system {
            SystemKind::ThreeSpecies => {
                let set = equilibria_3species(p, k1, k2)?;
                json!({
                    "k1": k1,
                    "k2": k2,
                    "equilibria": set,
                    "printed_condition": condition_3species_printed(p, k1, k2),
                })
            }
            _ => json!({ "k1": k1, "k2": k2, "equilibria": equilibria_2species(p, k1, k2)? }),
        };
        sides.insert(key.into(), v);
    }
    Ok(json!({ "system": cfg.system, "params": cfg.params, "sides": sides }))
}

fn midpoint_level(kind: BubbleKind, cfg: &RunConfig) -> Option<f64> {
    bubble_level_range(kind, &cfg.params, &cfg.caps)
        .ok()
        .map(|(lo, hi)| 0.5 * (lo + hi))
}

/// Invasion report; with `profiles` set, also writes the stationary front
/// and one bubble per kind as CSV into that directory.
pub fn cmd_invasion(cfg: &RunConfig, profiles: Option<&Path>) -> Result<Value, CliError> {
    validate_hypotheses(cfg)?;
    let three = cfg.system == SystemKind::ThreeSpecies;
    let report = invasion_report(&cfg.params, &cfg.caps, three)?;
    let regime = match report.scenario {
        Some(FrontScenario::TwoFronts) => Some(Regime::Bb),
        Some(FrontScenario::Species1Invades) => Some(Regime::Th2),
        _ => None,
    };
    let front = match regime {
        Some(r) => Some(front_construct(
            &cfg.params,
            &cfg.caps,
            r,
            cfg.grid.half_length,
            cfg.grid.dx,
        )?),
        None => None,
    };
    let mut bubbles = Vec::new();
    for kind in [BubbleKind::F, BubbleKind::U, BubbleKind::U1] {
        let Some(level) = midpoint_level(kind, cfg) else { continue };
        let Ok(l) = critical_length(kind, level, &cfg.params, &cfg.caps) else { continue };
        bubbles.push((kind, level, l));
    }
    if let Some(dir) = profiles {
        fs::create_dir_all(dir)?;
        if let Some(f) = &front {
            let xs: Vec<f64> = (0..f.len()).map(|j| f.x(j)).collect();
            write_columns(
                &dir.join(format!("{}_front.csv", cfg.name)),
                &["x", "omega", "slope"],
                &[xs, f.profile.clone(), f.slopes.clone()],
            )?;
        }
        for &(kind, level, _) in &bubbles {
            let b = bubble_construct(kind, level, &cfg.params, &cfg.caps, 0.01)?;
            let (xs, vs): (Vec<f64>, Vec<f64>) = b.even_profile().into_iter().unzip();
            let tag = format!("{kind:?}").to_lowercase();
            write_columns(
                &dir.join(format!("{}_bubble_{tag}.csv", cfg.name)),
                &["x", "chi"],
                &[xs, vs],
            )?;
        }
    }
    Ok(json!({
        "gamma_f": report.gamma_f,
        "gamma_u": report.gamma_u,
        "gamma13": report.gamma13,
        "theta_f": report.theta_f,
        "theta_u": report.theta_u,
        "theta1_u": report.theta1_u,
        "scenario": report.scenario,
        "wolbachia_case": report.wolbachia_case,
        "matching_value": front.as_ref().map(|f| f.matching_value),
        "front_limits": front.as_ref().map(|f| [f.left_limit, f.right_limit]),
        "bubbles": bubbles.iter().map(|(k, level, l)| json!({
            "kind": k, "level": level, "critical_length": l
        })).collect::<Vec<_>>(),
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub outcome: Option<&'static str>,
    pub expected: Option<&'static str>,
    pub matches_expected: Option<bool>,
    pub resolved: bool,
    pub diagnostics: segrad_core::experiments::Diagnostics,
    pub params: segrad_core::ModelParams,
    pub caps: segrad_core::PiecewiseCapacity,
    /// The full configuration as TOML; parses back to the same run.
    pub config: String,
}

impl RunSummary {
    fn new(cfg: &RunConfig, v: Verdict) -> Self {
        RunSummary {
            scenario: v.scenario.clone(),
            outcome: v.outcome.map(|o| o.name()),
            expected: cfg.expected.map(|o| o.name()),
            matches_expected: cfg.expected.map(|e| v.matches(e)),
            resolved: v.resolved,
            diagnostics: v.diagnostics,
            params: cfg.params,
            caps: cfg.caps,
            config: cfg.to_toml(),
        }
    }
}

fn default_snapshot_every(t_end: f64) -> f64 {
    if t_end > 0.0 {
        t_end / 100.0
    } else {
        1.0
    }
}

/// Runs one configuration, writing `<name>.csv`, `<name>.json` and the
/// configuration echo `<name>.toml`.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<RunSummary, CliError> {
    let scenario: Scenario = cfg.scenario();
    let every = cfg.snapshot_every.unwrap_or_else(|| default_snapshot_every(cfg.t_end));
    let (verdict, log) = run_and_judge_with_log(&scenario, Some(every))?;
    fs::create_dir_all(out)?;
    write_snapshots_file(&out.join(format!("{}.csv", cfg.name)), &log.snapshots)?;
    let summary = RunSummary::new(cfg, verdict);
    write_json(&out.join(format!("{}.json", cfg.name)), &summary)?;
    fs::write(out.join(format!("{}.toml", cfg.name)), &summary.config)?;
    Ok(summary)
}

/// Expands `all` and checks every name against the packaged scenarios.
pub fn resolve_figure_names(names: &[String]) -> Result<Vec<&'static str>, CliError> {
    let mut out: Vec<&'static str> = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(SCENARIO_NAMES);
            continue;
        }
        let known = SCENARIO_NAMES
            .iter()
            .find(|k| **k == n.as_str())
            .ok_or_else(|| CliError::Config(unknown_scenario(n)))?;
        out.push(known);
    }
    let mut seen = Vec::new();
    out.retain(|n| {
        let fresh = !seen.contains(n);
        seen.push(*n);
        fresh
    });
    if out.is_empty() {
        return Err(CliError::Config(unknown_scenario("")));
    }
    Ok(out)
}

/// Runs the named packaged scenarios concurrently and writes their data
/// plus a merged `verdicts.json`.
pub fn cmd_figures(names: &[String], overrides: &Overrides, out: &Path) -> Result<Vec<RunSummary>, CliError> {
    let names = resolve_figure_names(names)?;
    let mut configs = Vec::with_capacity(names.len());
    for n in &names {
        let mut cfg = RunConfig::from_scenario(&scenario_by_name(n).expect("resolved name"));
        overrides.apply(&mut cfg)?;
        configs.push(cfg);
    }
    fs::create_dir_all(out)?;
    let summaries = configs
        .par_iter()
        .map(|cfg| cmd_simulate(cfg, out))
        .collect::<Result<Vec<_>, _>>()?;
    let table: Vec<Value> = summaries
        .iter()
        .map(|s| {
            json!({
                "scenario": s.scenario,
                "outcome": s.outcome,
                "expected": s.expected,
                "matches_expected": s.matches_expected,
                "resolved": s.resolved,
            })
        })
        .collect();
    write_json(&out.join("verdicts.json"), &table)?;
    Ok(summaries)
}

#[derive(Debug, Clone)]
pub enum SweepKind {
    /// Competition strengths and the comparison time.
    Competition { c_values: Vec<f64>, time: f64 },
    /// Release support widths.
    ReleaseWidth { widths: Vec<f64> },
}

pub fn cmd_sweep(cfg: &RunConfig, kind: &SweepKind, out: &Path) -> Result<Value, CliError> {
    let scenario = cfg.scenario();
    fs::create_dir_all(out)?;
    match kind {
        SweepKind::Competition { c_values, time } => {
            if cfg.system != SystemKind::TwoSpecies {
                return Err(CliError::Config(
                    "the competition sweep needs a two_species configuration".into(),
                ));
            }
            if c_values.is_empty()
                || c_values.iter().any(|c| !(*c > 0.0))
                || c_values.windows(2).any(|w| w[0] >= w[1])
            {
                return Err(CliError::Config(
                    "competition values must be positive and ascending".into(),
                ));
            }
            if !(*time >= 0.0 && time.is_finite()) {
                return Err(CliError::Config("sweep time must be nonnegative".into()));
            }
            let reduced = reduced_reference(&scenario, *time)?;
            let rows = c_values
                .par_iter()
                .map(|&c| study_row(&scenario, c, *time, &reduced))
                .collect::<Result<Vec<_>, _>>()?;
            write_columns(
                &out.join(format!("{}_competition.csv", cfg.name)),
                &["c", "epsilon(=1/c)", "segregation", "deviation"],
                &[
                    rows.iter().map(|r| r.c).collect(),
                    rows.iter().map(|r| r.epsilon).collect(),
                    rows.iter().map(|r| r.segregation).collect(),
                    rows.iter().map(|r| r.deviation).collect(),
                ],
            )?;
            let v = json!({ "time": time, "epsilon": "1/c", "rows": rows });
            write_json(&out.join(format!("{}_competition.json", cfg.name)), &v)?;
            Ok(v)
        }
        SweepKind::ReleaseWidth { widths } => {
            if widths.windows(2).any(|w| w[0] >= w[1]) || widths.iter().any(|w| !(*w >= 0.0)) {
                return Err(CliError::Config(
                    "widths must be nonnegative and ascending".into(),
                ));
            }
            let results = widths
                .par_iter()
                .map(|&w| probe_width(&scenario, w))
                .collect::<Result<Vec<_>, _>>()?;
            let monotone = probe_is_monotone(&results);
            let v = json!({ "results": results, "monotone": monotone });
            write_json(&out.join(format!("{}_widths.json", cfg.name)), &v)?;
            Ok(v)
        }
    }
}
