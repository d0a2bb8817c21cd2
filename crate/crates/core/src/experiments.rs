//! Parameter sweeps over whole runs and sensitivity sweeps at a frozen
//! iteration.
//!
//! Run sweeps (`T`, `N`, `K`) execute every policy for each (value, seed) cell
//! with shared inputs and report revenue plus Δ-metrics against the optimal
//! policy of the same cell. Sensitivity sweeps freeze the state of one
//! iteration and vary one participant's strategy or one cost parameter.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bandit::PolicyConfig;
use crate::engine::{csv_writer, delta_metrics, run_with, RunConfig, RunInputs, Simulation};
use crate::error::{Error, Result};
use crate::format::g12;
use crate::market::{CategoryId, ProfitReport, Strategy};
use crate::stackelberg::{Equilibrium, GameInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    T,
    N,
    K,
    SoC,
    SoP,
    #[serde(rename = "SoS_i")]
    SoS,
    #[serde(rename = "gamma")]
    Gamma,
    #[serde(rename = "a_i")]
    A,
}

impl SweepAxis {
    pub fn is_run_axis(self) -> bool {
        matches!(self, SweepAxis::T | SweepAxis::N | SweepAxis::K)
    }

    /// Whether the axis needs a target category.
    pub fn is_per_category(self) -> bool {
        matches!(self, SweepAxis::SoS | SweepAxis::A)
    }
}

fn default_fixed_iteration() -> u64 {
    100
}

fn default_seeds() -> Vec<u64> {
    vec![42]
}

/// A sweep definition. Run-config fields sit at the top level next to the
/// sweep fields; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Map<String, serde_json::Value>")]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Strictly increasing. Sensitivity sweeps default to ±50% around the
    /// equilibrium value in 21 steps when empty.
    #[serde(default)]
    pub values: Vec<f64>,
    #[serde(flatten)]
    pub base: RunConfig,
    #[serde(default = "default_fixed_iteration")]
    pub fixed_iteration: u64,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Target of `SoS_i` / `a_i` sweeps. Defaults to the selected category
    /// with the largest equilibrium richness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<CategoryId>,
    /// Policies of a run sweep; all five when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policies: Option<Vec<PolicyConfig>>,
}

/// Sweep-only keys of a [`SweepSpec`] object.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFields {
    axis: SweepAxis,
    #[serde(default)]
    values: Vec<f64>,
    #[serde(default = "default_fixed_iteration")]
    fixed_iteration: u64,
    #[serde(default = "default_seeds")]
    seeds: Vec<u64>,
    #[serde(default)]
    category: Option<CategoryId>,
    #[serde(default)]
    policies: Option<Vec<PolicyConfig>>,
}

const SWEEP_KEYS: [&str; 6] = [
    "axis",
    "values",
    "fixed_iteration",
    "seeds",
    "category",
    "policies",
];

impl TryFrom<serde_json::Map<String, serde_json::Value>> for SweepSpec {
    type Error = serde_json::Error;

    fn try_from(mut run: serde_json::Map<String, serde_json::Value>) -> serde_json::Result<Self> {
        let mut sweep = serde_json::Map::new();
        for key in SWEEP_KEYS {
            if let Some(v) = run.remove(key) {
                sweep.insert(key.to_string(), v);
            }
        }
        let f: SweepFields = serde_json::from_value(sweep.into())?;
        let base: RunConfig = serde_json::from_value(run.into())?;
        Ok(Self {
            axis: f.axis,
            values: f.values,
            base,
            fixed_iteration: f.fixed_iteration,
            seeds: f.seeds,
            category: f.category,
            policies: f.policies,
        })
    }
}

impl SweepSpec {
    pub fn new(axis: SweepAxis, values: Vec<f64>, base: RunConfig) -> Self {
        Self {
            axis,
            values,
            base,
            fixed_iteration: default_fixed_iteration(),
            seeds: default_seeds(),
            category: None,
            policies: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::config("seeds must not be empty"));
        }
        if self.axis.is_run_axis() && self.values.is_empty() {
            return Err(Error::config("run sweeps need explicit values"));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("sweep values must be finite"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("sweep values must be strictly increasing"));
        }
        if self.axis.is_run_axis() && self.values.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
            return Err(Error::config(format!(
                "{:?} values must be positive integers",
                self.axis
            )));
        }
        if !self.axis.is_run_axis() && self.fixed_iteration == 0 {
            return Err(Error::config("fixed_iteration must be >= 1"));
        }
        Ok(())
    }

    fn policies(&self) -> Vec<PolicyConfig> {
        self.policies
            .clone()
            .unwrap_or_else(|| PolicyConfig::all().to_vec())
    }
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Default sensitivity grid: 21 points spanning ±50% of `center`.
pub fn default_bracket(center: f64) -> Vec<f64> {
    if center > 0.0 {
        linspace(0.5 * center, 1.5 * center, 21)
    } else {
        linspace(0.0, 1.0, 21)
    }
}

/// One (axis value, seed, policy) cell of a run sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub seed: u64,
    pub policy: String,
    pub revenue_cum: f64,
    pub delta_poc: f64,
    pub delta_pop: f64,
    pub delta_pos: f64,
    pub infeasible: u64,
    pub status: String,
}

fn apply_run_axis(base: &RunConfig, axis: SweepAxis, value: f64, seed: u64) -> RunConfig {
    let mut cfg = base.clone();
    cfg.seed = seed;
    match axis {
        SweepAxis::T => cfg.horizon = value as u64,
        SweepAxis::N => cfg.n = value as usize,
        SweepAxis::K => cfg.k = value as usize,
        _ => unreachable!("not a run axis"),
    }
    cfg
}

fn sweep_cell(spec: &SweepSpec, value: f64, seed: u64) -> Vec<SweepRow> {
    let policies = spec.policies();
    let failed = |policy: &PolicyConfig, msg: String| SweepRow {
        axis_value: value,
        seed,
        policy: policy.name().to_string(),
        revenue_cum: f64::NAN,
        delta_poc: f64::NAN,
        delta_pop: f64::NAN,
        delta_pos: f64::NAN,
        infeasible: 0,
        status: format!("error: {msg}"),
    };
    let base = apply_run_axis(&spec.base, spec.axis, value, seed);
    let inputs = match base.resolve() {
        Ok(i) => i,
        Err(e) => return policies.iter().map(|p| failed(p, e.to_string())).collect(),
    };
    let optimal = run_with(&base.with_policy(PolicyConfig::Optimal), &inputs);
    policies
        .iter()
        .map(|policy| {
            let record = match run_with(&base.with_policy(*policy), &inputs) {
                Ok(r) => r,
                Err(e) => return failed(policy, e.to_string()),
            };
            let delta = match &optimal {
                Ok(opt) => delta_metrics(&record, opt),
                Err(e) => Err(Error::config(format!("optimal run failed: {e}"))),
            };
            let (dc, dp, ds) = match delta.map(|d| d.last()) {
                Ok(Some(last)) => last,
                Ok(None) => (0.0, 0.0, 0.0),
                Err(e) => return failed(policy, e.to_string()),
            };
            SweepRow {
                axis_value: value,
                seed,
                policy: policy.name().to_string(),
                revenue_cum: record.totals.revenue,
                delta_poc: dc,
                delta_pop: dp,
                delta_pos: ds,
                infeasible: record.totals.infeasible_iterations,
                status: "ok".to_string(),
            }
        })
        .collect()
}

/// Runs a `T`, `N` or `K` sweep. Cells run in parallel; rows come back ordered
/// by (axis value, seed, policy).
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    if !spec.axis.is_run_axis() {
        return Err(Error::config(format!(
            "{:?} is a sensitivity axis; use the sensitivity sweep",
            spec.axis
        )));
    }
    spec.base.policy.validate()?;
    let cells: Vec<(f64, u64)> = spec
        .values
        .iter()
        .flat_map(|&v| spec.seeds.iter().map(move |&s| (v, s)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(v, s)| sweep_cell(spec, v, s))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect())
}

pub const SWEEP_CSV_HEADER: &str =
    "axis_value,seed,policy,revenue_cum,delta_poc,delta_pop,delta_pos,infeasible,status";

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SWEEP_CSV_HEADER.split(','))?;
    for r in rows {
        w.write_record([
            g12(r.axis_value),
            r.seed.to_string(),
            r.policy.clone(),
            g12(r.revenue_cum),
            g12(r.delta_poc),
            g12(r.delta_pop),
            g12(r.delta_pos),
            r.infeasible.to_string(),
            r.status.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<R: Read, T: serde::de::DeserializeOwned>(input: R, header: &str) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(input);
    let found = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if found != header {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {found:?}"),
        });
    }
    rdr.deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.map_err(|e| Error::Parse {
                line: i as u64 + 2,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    read_rows(input, SWEEP_CSV_HEADER)
}

/// State of iteration `fixed_iteration` of a run, ready for re-solving.
#[derive(Debug, Clone)]
pub struct FrozenIteration {
    pub inputs: RunInputs,
    pub record: crate::engine::IterationRecord,
}

impl FrozenIteration {
    pub fn capture(config: &RunConfig, iteration: u64) -> Result<Self> {
        if iteration == 0 || iteration > config.horizon {
            return Err(Error::config(format!(
                "iteration {iteration} outside 1..={}",
                config.horizon
            )));
        }
        let inputs = config.resolve()?;
        let record = {
            let mut sim = Simulation::new(config, &inputs)?;
            let mut last = sim.step()?;
            while sim.iteration() < iteration {
                last = sim.step()?;
            }
            last
        };
        Ok(Self { inputs, record })
    }

    pub fn game(&self) -> Result<GameInstance<'_>> {
        self.record.game(&self.inputs.params)
    }
}

/// One point of a sensitivity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub axis_value: f64,
    pub seed: u64,
    pub chosen: String,
    pub soc: f64,
    pub sop: f64,
    pub sos: String,
    pub poc: f64,
    pub pop: f64,
    pub pos: f64,
    pub phi: String,
    pub status: String,
}

/// A parsed sensitivity point with per-category vectors split out.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityPoint {
    pub axis_value: f64,
    pub strategy: Strategy,
    pub profits: ProfitReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub axis: SweepAxis,
    pub seed: u64,
    pub category: Option<CategoryId>,
    pub equilibrium: Equilibrium,
    /// Axis value at the equilibrium (or the unmodified parameter).
    pub center: f64,
    /// One entry per swept value; `Err` holds the cell's failure message.
    pub points: Vec<(f64, std::result::Result<SensitivityPoint, String>)>,
}

impl SensitivityReport {
    pub fn rows(&self) -> Vec<SensitivityRow> {
        let chosen = self
            .equilibrium
            .strategy
            .richness
            .keys()
            .map(|id| id.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let join = |m: &BTreeMap<CategoryId, f64>| {
            m.values().map(|&v| g12(v)).collect::<Vec<_>>().join(";")
        };
        self.points
            .iter()
            .map(|(v, point)| match point {
                Ok(pt) => SensitivityRow {
                    axis_value: *v,
                    seed: self.seed,
                    chosen: chosen.clone(),
                    soc: pt.strategy.p_g,
                    sop: pt.strategy.p,
                    sos: join(&pt.strategy.richness),
                    poc: pt.profits.consumer,
                    pop: pt.profits.platform,
                    pos: pt.profits.sellers(),
                    phi: join(&pt.profits.per_category),
                    status: "ok".into(),
                },
                Err(msg) => SensitivityRow {
                    axis_value: *v,
                    seed: self.seed,
                    chosen: chosen.clone(),
                    soc: f64::NAN,
                    sop: f64::NAN,
                    sos: String::new(),
                    poc: f64::NAN,
                    pop: f64::NAN,
                    pos: f64::NAN,
                    phi: String::new(),
                    status: format!("error: {msg}"),
                },
            })
            .collect()
    }

    /// Successful points in axis order.
    pub fn ok_points(&self) -> impl Iterator<Item = &SensitivityPoint> {
        self.points.iter().filter_map(|(_, p)| p.as_ref().ok())
    }
}

fn sensitivity_point(
    axis: SweepAxis,
    game: &GameInstance<'_>,
    eq: &Equilibrium,
    target: Option<CategoryId>,
    value: f64,
) -> Result<SensitivityPoint> {
    let solved = |strategy: Strategy, game: &GameInstance<'_>| -> Result<SensitivityPoint> {
        let profits = game.profits(&strategy)?;
        Ok(SensitivityPoint {
            axis_value: value,
            strategy,
            profits,
        })
    };
    match axis {
        SweepAxis::SoC => solved(game.respond_to_bundle_price(value)?.0, game),
        SweepAxis::SoP => solved(game.respond_to_unit_price(eq.strategy.p_g, value)?.0, game),
        SweepAxis::SoS => {
            if !(value >= 0.0) {
                return Err(Error::domain(format!("richness {value} is negative")));
            }
            let mut strategy = eq.strategy.clone();
            let id = target.expect("target resolved");
            strategy.richness.insert(id, value);
            solved(strategy, game)
        }
        SweepAxis::Gamma | SweepAxis::A => {
            let mut params = game.params().clone();
            if axis == SweepAxis::Gamma {
                params.platform.gamma = value;
            } else {
                params.categories[target.expect("target resolved").index()].a = value;
            }
            params.validate()?;
            let modified = GameInstance::new(&params, game.members().to_vec())?;
            let eq = modified.solve()?;
            Ok(SensitivityPoint {
                axis_value: value,
                strategy: eq.strategy,
                profits: eq.profits,
            })
        }
        SweepAxis::T | SweepAxis::N | SweepAxis::K => unreachable!("run axis"),
    }
}

/// Sensitivity sweep on the frozen iteration of one seed.
pub fn sensitivity_for_seed(spec: &SweepSpec, seed: u64) -> Result<SensitivityReport> {
    let mut cfg = spec.base.clone();
    cfg.seed = seed;
    cfg.horizon = cfg.horizon.max(spec.fixed_iteration);
    let frozen = FrozenIteration::capture(&cfg, spec.fixed_iteration)?;
    let game = frozen.game()?;
    let eq = game.solve()?;

    let target = if spec.axis.is_per_category() {
        let id = match spec.category {
            Some(id) => id,
            None => eq
                .strategy
                .richness
                .iter()
                .fold(None::<(CategoryId, f64)>, |best, (&id, &s)| match best {
                    Some((_, bs)) if bs >= s => best,
                    _ => Some((id, s)),
                })
                .map(|(id, _)| id)
                .expect("nonempty selection"),
        };
        if !eq.strategy.richness.contains_key(&id) {
            return Err(Error::config(format!(
                "category {id} is not selected at iteration {}",
                spec.fixed_iteration
            )));
        }
        Some(id)
    } else {
        None
    };

    let center = match spec.axis {
        SweepAxis::SoC => eq.strategy.p_g,
        SweepAxis::SoP => eq.strategy.p,
        SweepAxis::SoS => eq.strategy.richness[&target.unwrap()],
        SweepAxis::Gamma => game.params().platform.gamma,
        SweepAxis::A => game.params().categories[target.unwrap().index()].a,
        _ => unreachable!("run axis"),
    };
    let values = if spec.values.is_empty() {
        default_bracket(center)
    } else {
        spec.values.clone()
    };
    let points = values
        .iter()
        .map(|&v| {
            (
                v,
                sensitivity_point(spec.axis, &game, &eq, target, v).map_err(|e| e.to_string()),
            )
        })
        .collect();
    Ok(SensitivityReport {
        axis: spec.axis,
        seed,
        category: target,
        equilibrium: eq,
        center,
        points,
    })
}

/// Sensitivity sweep for every seed of the sweep, in seed order.
pub fn sensitivity(spec: &SweepSpec) -> Result<Vec<SensitivityReport>> {
    spec.validate()?;
    if spec.axis.is_run_axis() {
        return Err(Error::config(format!(
            "{:?} is a run axis; use the run sweep",
            spec.axis
        )));
    }
    spec.seeds
        .par_iter()
        .map(|&seed| sensitivity_for_seed(spec, seed))
        .collect()
}

pub const SENSITIVITY_CSV_HEADER: &str =
    "axis_value,seed,chosen,soc,sop,sos,poc,pop,pos,phi,status";

pub fn write_sensitivity_csv<W: Write>(reports: &[SensitivityReport], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(SENSITIVITY_CSV_HEADER.split(','))?;
    for report in reports {
        for r in report.rows() {
            w.write_record([
                g12(r.axis_value),
                r.seed.to_string(),
                r.chosen,
                g12(r.soc),
                g12(r.sop),
                r.sos,
                g12(r.poc),
                g12(r.pop),
                g12(r.pos),
                r.phi,
                r.status,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_sensitivity_csv<R: Read>(input: R) -> Result<Vec<SensitivityRow>> {
    read_rows(input, SENSITIVITY_CSV_HEADER)
}
