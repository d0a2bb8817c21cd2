//! The online trading loop.
//!
//! Each iteration: the policy selects `K` categories, `M` products are drawn
//! from each through keyed streams, the estimator absorbs them, and the pricing
//! game is solved with the post-update qualities and this iteration's bundle
//! means. Revenue is the summed quality of every sold product.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bandit::{PolicyConfig, QualityEstimator, SelectionContext};
use crate::catalog::{generate_pool, load_pool, DrawKey, PoolSpec, PromptPool};
use crate::error::{Error, Infeasibility, Result};
use crate::format::g12;
use crate::market::{sample_market_params, CategoryId, MarketParams, ParamSpec};
use crate::stackelberg::{BundleMeans, GameInstance, Member, Warning};

fn default_seed() -> u64 {
    42
}
fn default_horizon() -> u64 {
    5000
}
fn default_n() -> usize {
    80
}
fn default_k() -> usize {
    4
}
fn default_m() -> usize {
    4
}

/// Market parameters: given outright, or sampled with the run seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamsSource {
    Explicit(MarketParams),
    Sample(ParamSpec),
}

/// Product pool: a CSV file, or generated from a spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PoolSource {
    File(PathBuf),
    Generate(PoolSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(rename = "T", alias = "t", default = "default_horizon")]
    pub horizon: u64,
    #[serde(rename = "N", alias = "n", default = "default_n")]
    pub n: usize,
    #[serde(rename = "K", alias = "k", default = "default_k")]
    pub k: usize,
    #[serde(rename = "M", alias = "m", default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub policy: PolicyConfig,
    /// Defaults to sampling with [`ParamSpec::default`] and the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsSource>,
    /// Defaults to the four-class pool generated with the run seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<PoolSource>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: default_seed(),
            horizon: default_horizon(),
            n: default_n(),
            k: default_k(),
            m: default_m(),
            policy: PolicyConfig::default(),
            params: None,
            pool: None,
        }
    }
}

/// Resolved immutable inputs of a run.
#[derive(Debug, Clone)]
pub struct RunInputs {
    pub pool: PromptPool,
    pub params: MarketParams,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::config("T must be >= 1"));
        }
        if self.n == 0 {
            return Err(Error::config("N must be >= 1"));
        }
        if self.k == 0 || self.k > self.n {
            return Err(Error::config(format!(
                "K = {} must be in 1..={}",
                self.k, self.n
            )));
        }
        if self.m == 0 {
            return Err(Error::config("M must be >= 1"));
        }
        self.policy.validate()
    }

    /// Same run with a different policy.
    pub fn with_policy(&self, policy: PolicyConfig) -> Self {
        Self {
            policy,
            ..self.clone()
        }
    }

    /// Loads or generates the pool and market, cut to the first `N` categories.
    pub fn resolve(&self) -> Result<RunInputs> {
        self.validate()?;
        let pool = match &self.pool {
            None => generate_pool(&PoolSpec::new(self.n, self.seed))?,
            Some(PoolSource::Generate(spec)) => generate_pool(spec)?,
            Some(PoolSource::File(path)) => load_pool(path)?,
        };
        let pool = match pool.n_categories() {
            n if n == self.n => pool,
            n if n > self.n => pool.truncated(self.n)?,
            n => {
                return Err(Error::config(format!(
                    "pool has {n} categories but N = {}",
                    self.n
                )))
            }
        };
        let params = match &self.params {
            None => sample_market_params(self.seed, self.n, &ParamSpec::default())?,
            Some(ParamsSource::Sample(spec)) => sample_market_params(self.seed, self.n, spec)?,
            Some(ParamsSource::Explicit(p)) => {
                p.validate()?;
                if p.n_categories() < self.n {
                    return Err(Error::config(format!(
                        "market has {} categories but N = {}",
                        p.n_categories(),
                        self.n
                    )));
                }
                p.truncated(self.n)?
            }
        };
        Ok(RunInputs { pool, params })
    }
}

/// One row of the run ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: u64,
    /// Selected ids, ascending. Every per-category vector below is aligned with it.
    pub chosen: Vec<CategoryId>,
    pub phi_bar: Vec<f64>,
    pub sigma_bar: Vec<f64>,
    /// Post-update estimated qualities.
    pub qbar: Vec<f64>,
    /// SoC.
    pub p_g: f64,
    /// SoP.
    pub p: f64,
    /// SoS, clamped.
    pub sos: Vec<f64>,
    /// PoC.
    pub poc: f64,
    /// PoP.
    pub pop: f64,
    /// PoS, the sum of `seller_profits`.
    pub pos: f64,
    pub seller_profits: Vec<f64>,
    /// Summed quality of the `K·M` products sold this iteration.
    pub revenue: f64,
    pub clamped: Vec<CategoryId>,
    pub infeasible: Option<Infeasibility>,
}

impl IterationRecord {
    /// Flags as written to the CSV `warnings` column.
    pub fn warning_tags(&self) -> Vec<String> {
        let mut tags: Vec<String> = self
            .clamped
            .iter()
            .map(|id| format!("clamped={id}"))
            .collect();
        if let Some(inf) = &self.infeasible {
            tags.push(inf.tag().to_string());
        }
        tags
    }

    /// Rebuilds the frozen game of this iteration.
    pub fn game<'a>(&self, params: &'a MarketParams) -> Result<GameInstance<'a>> {
        let members = self
            .chosen
            .iter()
            .enumerate()
            .map(|(j, &id)| Member {
                id,
                qbar: self.qbar[j],
                phi_bar: self.phi_bar[j],
                sigma_bar: self.sigma_bar[j],
            })
            .collect();
        GameInstance::new(params, members)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunTotals {
    /// Cumulative revenue `R(χ)`.
    pub revenue: f64,
    pub poc: f64,
    pub pop: f64,
    pub pos: f64,
    pub infeasible_iterations: u64,
    pub clamped_richness: u64,
}

impl RunTotals {
    fn absorb(&mut self, rec: &IterationRecord) {
        self.revenue += rec.revenue;
        self.poc += rec.poc;
        self.pop += rec.pop;
        self.pos += rec.pos;
        self.infeasible_iterations += rec.infeasible.is_some() as u64;
        self.clamped_richness += rec.clamped.len() as u64;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: RunConfig,
    pub iterations: Vec<IterationRecord>,
    pub totals: RunTotals,
}

/// A run in progress. Iterations must be taken in order.
pub struct Simulation<'a> {
    config: &'a RunConfig,
    pool: &'a PromptPool,
    params: &'a MarketParams,
    estimator: QualityEstimator,
    t: u64,
}

impl<'a> Simulation<'a> {
    pub fn new(config: &'a RunConfig, inputs: &'a RunInputs) -> Result<Self> {
        config.validate()?;
        if inputs.pool.n_categories() != config.n || inputs.params.n_categories() != config.n {
            return Err(Error::config(format!(
                "inputs have {} pool and {} market categories, N = {}",
                inputs.pool.n_categories(),
                inputs.params.n_categories(),
                config.n
            )));
        }
        Ok(Self {
            config,
            pool: &inputs.pool,
            params: &inputs.params,
            estimator: QualityEstimator::new(config.n),
            t: 0,
        })
    }

    pub fn estimator(&self) -> &QualityEstimator {
        &self.estimator
    }

    /// Iterations completed so far.
    pub fn iteration(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self) -> Result<IterationRecord> {
        let cfg = self.config;
        let t = self.t + 1;
        let selection = cfg.policy.select(&SelectionContext {
            estimator: &self.estimator,
            true_means: self.pool.true_means(),
            seed: cfg.seed,
            t,
            horizon: cfg.horizon,
            k: cfg.k,
        })?;

        let mut bundles = BTreeMap::new();
        for &category in &selection.chosen {
            let key = DrawKey {
                seed: cfg.seed,
                t,
                category,
            };
            bundles.insert(category, self.pool.draw_bundle(cfg.m, key)?);
        }
        self.estimator.update(&selection, &bundles, cfg.m)?;
        self.t = t;

        let inv_m = 1.0 / cfg.m as f64;
        let mut means = BTreeMap::new();
        let mut revenue = 0.0;
        for (&id, bundle) in &bundles {
            let phi: f64 = bundle.iter().map(|o| o.phi()).sum();
            let sigma: f64 = bundle.iter().map(|o| o.sigma()).sum();
            revenue += bundle.iter().map(|o| o.q()).sum::<f64>();
            means.insert(
                id,
                BundleMeans {
                    phi_bar: phi * inv_m,
                    sigma_bar: sigma * inv_m,
                },
            );
        }

        let chosen = selection.chosen;
        let k = chosen.len();
        let mut record = IterationRecord {
            t,
            phi_bar: chosen.iter().map(|id| means[id].phi_bar).collect(),
            sigma_bar: chosen.iter().map(|id| means[id].sigma_bar).collect(),
            qbar: chosen
                .iter()
                .map(|&id| self.estimator.qbar(id))
                .collect::<Result<_>>()?,
            chosen,
            p_g: 0.0,
            p: 0.0,
            sos: vec![0.0; k],
            poc: 0.0,
            pop: 0.0,
            pos: 0.0,
            seller_profits: vec![0.0; k],
            revenue,
            clamped: Vec::new(),
            infeasible: None,
        };

        match record.game(self.params)?.solve() {
            Ok(eq) => {
                record.p_g = eq.strategy.p_g;
                record.p = eq.strategy.p;
                record.sos = eq.strategy.richness.values().copied().collect();
                record.seller_profits = eq.profits.per_category.values().copied().collect();
                record.poc = eq.profits.consumer;
                record.pop = eq.profits.platform;
                record.pos = eq.profits.sellers();
                record.clamped = eq
                    .warnings
                    .iter()
                    .map(|w| match w {
                        Warning::ClampedRichness { category, .. } => *category,
                    })
                    .collect();
            }
            Err(Error::Infeasible(inf)) => record.infeasible = Some(inf),
            Err(e) => return Err(e),
        }
        Ok(record)
    }
}

/// Runs `config`, generating or loading its inputs.
pub fn run(config: &RunConfig) -> Result<RunRecord> {
    let inputs = config.resolve()?;
    run_with(config, &inputs)
}

/// Runs `config` against already-resolved inputs.
pub fn run_with(config: &RunConfig, inputs: &RunInputs) -> Result<RunRecord> {
    let mut sim = Simulation::new(config, inputs)?;
    let mut iterations = Vec::with_capacity(config.horizon as usize);
    let mut totals = RunTotals::default();
    for _ in 0..config.horizon {
        let rec = sim.step()?;
        totals.absorb(&rec);
        iterations.push(rec);
    }
    Ok(RunRecord {
        config: config.clone(),
        iterations,
        totals,
    })
}

/// Cumulative profit gaps `optimal − alg`, one entry per iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeltaSeries {
    pub t: Vec<u64>,
    pub poc: Vec<f64>,
    pub pop: Vec<f64>,
    pub pos: Vec<f64>,
}

impl DeltaSeries {
    fn from_profits<'a>(
        alg: impl Iterator<Item = (u64, [f64; 3])>,
        opt: impl Iterator<Item = (u64, [f64; 3])> + 'a,
    ) -> Result<Self> {
        let mut out = DeltaSeries::default();
        let mut acc = [0.0; 3];
        let mut alg = alg.peekable();
        let mut opt = opt.peekable();
        loop {
            match (alg.next(), opt.next()) {
                (None, None) => break,
                (Some((ta, a)), Some((to, o))) if ta == to => {
                    for i in 0..3 {
                        acc[i] += o[i] - a[i];
                    }
                    out.t.push(ta);
                    out.poc.push(acc[0]);
                    out.pop.push(acc[1]);
                    out.pos.push(acc[2]);
                }
                _ => return Err(Error::config("runs cover different iterations")),
            }
        }
        Ok(out)
    }

    /// Final entry `(Δ-PoC, Δ-PoP, Δ-PoS)`.
    pub fn last(&self) -> Option<(f64, f64, f64)> {
        Some((*self.poc.last()?, *self.pop.last()?, *self.pos.last()?))
    }
}

/// Δ-metrics of `alg` against the optimal run. The two runs must differ only
/// in their policy.
pub fn delta_metrics(alg: &RunRecord, optimal: &RunRecord) -> Result<DeltaSeries> {
    let a = &alg.config;
    let o = &optimal.config;
    if a.with_policy(o.policy) != *o {
        return Err(Error::config(
            "delta needs two runs with identical seed, T, N, K, M, params and pool",
        ));
    }
    let profits = |r: &RunRecord| -> Vec<(u64, [f64; 3])> {
        r.iterations
            .iter()
            .map(|it| (it.t, [it.poc, it.pop, it.pos]))
            .collect()
    };
    DeltaSeries::from_profits(profits(alg).into_iter(), profits(optimal).into_iter())
}

/// Δ-metrics from two parsed run CSVs.
pub fn delta_from_rows(alg: &[RunCsvRow], optimal: &[RunCsvRow]) -> Result<DeltaSeries> {
    let profits = |rows: &[RunCsvRow]| -> Vec<(u64, [f64; 3])> {
        rows.iter().map(|r| (r.t, [r.poc, r.pop, r.pos])).collect()
    };
    DeltaSeries::from_profits(profits(alg).into_iter(), profits(optimal).into_iter())
}

pub const DELTA_CSV_HEADER: &str = "t,delta_poc,delta_pop,delta_pos";

#[derive(Serialize, Deserialize)]
struct DeltaCsvRow {
    t: u64,
    delta_poc: f64,
    delta_pop: f64,
    delta_pos: f64,
}

pub fn write_delta_csv<W: Write>(delta: &DeltaSeries, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(DELTA_CSV_HEADER.split(','))?;
    for i in 0..delta.t.len() {
        w.write_record([
            delta.t[i].to_string(),
            g12(delta.poc[i]),
            g12(delta.pop[i]),
            g12(delta.pos[i]),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_delta_csv<R: Read>(input: R) -> Result<DeltaSeries> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != DELTA_CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    let mut out = DeltaSeries::default();
    for (i, row) in rdr.deserialize::<DeltaCsvRow>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            line: i as u64 + 2,
            message: e.to_string(),
        })?;
        out.t.push(row.t);
        out.poc.push(row.delta_poc);
        out.pop.push(row.delta_pop);
        out.pos.push(row.delta_pos);
    }
    Ok(out)
}

pub const RUN_CSV_HEADER: &str = "t,chosen,p_g,p,sos,poc,pop,pos,revenue_cum,warnings";

/// One parsed row of a run CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunCsvRow {
    pub t: u64,
    pub chosen: String,
    pub p_g: f64,
    pub p: f64,
    pub sos: String,
    pub poc: f64,
    pub pop: f64,
    pub pos: f64,
    pub revenue_cum: f64,
    pub warnings: String,
}

impl RunCsvRow {
    pub fn chosen_ids(&self) -> Result<Vec<CategoryId>> {
        self.chosen
            .split(';')
            .map(|s| {
                s.parse()
                    .map(CategoryId)
                    .map_err(|_| Error::config(format!("bad category id {s:?}")))
            })
            .collect()
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(";")
}

pub(crate) fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_run_csv<W: Write>(record: &RunRecord, out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(RUN_CSV_HEADER.split(','))?;
    let mut cumulative = 0.0;
    for it in &record.iterations {
        cumulative += it.revenue;
        w.write_record([
            it.t.to_string(),
            join(&it.chosen, |id| id.to_string()),
            g12(it.p_g),
            g12(it.p),
            join(&it.sos, |&s| g12(s)),
            g12(it.poc),
            g12(it.pop),
            g12(it.pos),
            g12(cumulative),
            it.warning_tags().join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_run_csv<R: Read>(input: R) -> Result<Vec<RunCsvRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != RUN_CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {:?}", header.join(",")),
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

/// JSON sidecar of a run CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub iterations: u64,
    pub totals: RunTotals,
}

impl RunRecord {
    pub fn summary(&self) -> RunSummary {
        RunSummary {
            config: self.config.clone(),
            iterations: self.iterations.len() as u64,
            totals: self.totals.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{category_profit, consumer_profit_at, platform_profit_at};

    fn small(policy: PolicyConfig) -> RunConfig {
        RunConfig {
            seed: 7,
            horizon: 60,
            n: 12,
            k: 3,
            m: 2,
            policy,
            params: None,
            pool: None,
        }
    }

    #[test]
    fn config_defaults_and_json() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(
            (cfg.seed, cfg.horizon, cfg.n, cfg.k, cfg.m),
            (42, 5000, 80, 4, 4)
        );
        assert_eq!(cfg.policy, PolicyConfig::Greedy);

        let cfg = RunConfig::from_json(
            r#"{"seed":3,"T":10,"N":6,"K":2,"M":1,"policy":{"type":"cucb","cucb_coeff":0.5},
                "params":{"a":[0.2,0.2]},"pool":{"per_category":5,"n_categories":6}}"#,
        )
        .unwrap();
        assert_eq!(cfg.policy, PolicyConfig::Cucb { cucb_coeff: 0.5 });
        assert!(matches!(cfg.params, Some(ParamsSource::Sample(_))));
        assert!(matches!(cfg.pool, Some(PoolSource::Generate(_))));
        let text = serde_json::to_string(&cfg).unwrap();
        assert!(text.contains("\"T\":10"));
        assert_eq!(RunConfig::from_json(&text).unwrap(), cfg);

        assert!(RunConfig::from_json(r#"{"K":5,"N":4}"#).is_err());
        assert!(RunConfig::from_json(r#"{"bogus":1}"#).is_err());
        let pathy = RunConfig::from_json(r#"{"pool":"pools/p.csv"}"#).unwrap();
        assert_eq!(pathy.pool, Some(PoolSource::File("pools/p.csv".into())));
    }

    #[test]
    fn missing_pool_file() {
        let cfg = RunConfig {
            pool: Some(PoolSource::File("/no/such/pool.csv".into())),
            ..small(PolicyConfig::Greedy)
        };
        let err = run(&cfg).unwrap_err();
        assert!(matches!(err, Error::PoolNotFound(_)));
        assert!(err.to_string().contains("pool not found"));
    }

    #[test]
    fn forced_selection_constant_quality() {
        use crate::market::QualityObservation;
        let obs = QualityObservation::new(0.5, 0.5).unwrap();
        let pool = PromptPool::from_categories(vec![vec![obs; 3]; 3]).unwrap();
        let params = sample_market_params(1, 3, &ParamSpec::default()).unwrap();
        let cfg = RunConfig {
            horizon: 1,
            n: 3,
            k: 3,
            m: 2,
            ..RunConfig::default()
        };
        let rec = run_with(&cfg, &RunInputs { pool, params }).unwrap();
        assert!((rec.totals.revenue - 3.0).abs() < 1e-12);
    }

    #[test]
    fn runs_are_deterministic() {
        for policy in PolicyConfig::all() {
            let a = run(&small(policy)).unwrap();
            let b = run(&small(policy)).unwrap();
            assert_eq!(a, b);
            let (mut x, mut y) = (Vec::new(), Vec::new());
            write_run_csv(&a, &mut x).unwrap();
            write_run_csv(&b, &mut y).unwrap();
            assert_eq!(x, y);
        }
    }

    #[test]
    fn record_invariants() {
        for policy in PolicyConfig::all() {
            let cfg = small(policy);
            let inputs = cfg.resolve().unwrap();
            let rec = run_with(&cfg, &inputs).unwrap();
            assert_eq!(rec.iterations.len(), 60);
            let mut revenue = 0.0;
            let mut totals = RunTotals::default();
            for it in &rec.iterations {
                assert_eq!(it.chosen.len(), cfg.k);
                assert!(it.chosen.windows(2).all(|w| w[0] < w[1]));
                assert!((0.0..=(cfg.k * cfg.m) as f64).contains(&it.revenue));
                revenue += it.revenue;
                totals.absorb(it);
                if it.infeasible.is_some() {
                    continue;
                }
                // Profits are recomputable from the stored strategy and state.
                let params = &inputs.params;
                let total: f64 = it.sos.iter().sum();
                let qmean = it.qbar.iter().sum::<f64>() / it.qbar.len() as f64;
                let sig: f64 = it.sigma_bar.iter().sum();
                let poc = consumer_profit_at(&params.consumer, it.p_g, total, sig, qmean).unwrap();
                let pop = platform_profit_at(&params.platform, it.p_g, it.p, total);
                assert!((poc - it.poc).abs() < 1e-9);
                assert!((pop - it.pop).abs() < 1e-9);
                let mut pos = 0.0;
                for (j, id) in it.chosen.iter().enumerate() {
                    let c = params.category(*id).unwrap();
                    pos += category_profit(c, it.p, it.sos[j], it.qbar[j], it.phi_bar[j], true)
                        .unwrap();
                }
                assert!((pos - it.pos).abs() < 1e-9);
            }
            assert!((rec.totals.revenue - revenue).abs() < 1e-9);
            assert_eq!(rec.totals, totals);
        }
    }

    #[test]
    fn paired_runs_share_bundles() {
        let greedy = run(&small(PolicyConfig::Greedy)).unwrap();
        let optimal = run(&small(PolicyConfig::Optimal)).unwrap();
        let mut shared = 0;
        for (g, o) in greedy.iterations.iter().zip(&optimal.iterations) {
            for (j, id) in g.chosen.iter().enumerate() {
                if let Some(k) = o.chosen.iter().position(|x| x == id) {
                    assert_eq!(g.phi_bar[j], o.phi_bar[k]);
                    assert_eq!(g.sigma_bar[j], o.sigma_bar[k]);
                    shared += 1;
                }
            }
        }
        assert!(shared > 0);
    }

    #[test]
    fn delta_of_self_is_zero() {
        let opt = run(&small(PolicyConfig::Optimal)).unwrap();
        let d = delta_metrics(&opt, &opt).unwrap();
        assert_eq!(d.t.len(), 60);
        assert!(d.poc.iter().chain(&d.pop).chain(&d.pos).all(|&x| x == 0.0));

        let greedy = run(&small(PolicyConfig::Greedy)).unwrap();
        let d = delta_metrics(&greedy, &opt).unwrap();
        let expected = opt.totals.pos - greedy.totals.pos;
        assert!((d.last().unwrap().2 - expected).abs() < 1e-9);

        let other = run(&RunConfig {
            seed: 8,
            ..small(PolicyConfig::Optimal)
        })
        .unwrap();
        assert!(matches!(
            delta_metrics(&greedy, &other),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn csv_round_trip_and_delta_from_rows() {
        let greedy = run(&small(PolicyConfig::Greedy)).unwrap();
        let opt = run(&small(PolicyConfig::Optimal)).unwrap();
        let mut buf = Vec::new();
        write_run_csv(&greedy, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(RUN_CSV_HEADER));
        let rows = read_run_csv(buf.as_slice()).unwrap();
        assert_eq!(rows.len(), 60);
        assert_eq!(rows[0].chosen_ids().unwrap(), greedy.iterations[0].chosen);
        let last = rows.last().unwrap();
        assert!((last.revenue_cum - greedy.totals.revenue).abs() < 1e-8 * greedy.totals.revenue);

        let mut obuf = Vec::new();
        write_run_csv(&opt, &mut obuf).unwrap();
        let orows = read_run_csv(obuf.as_slice()).unwrap();
        let from_rows = delta_from_rows(&rows, &orows).unwrap();
        let exact = delta_metrics(&greedy, &opt).unwrap();
        for (a, b) in from_rows.pos.iter().zip(&exact.pos) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(read_run_csv("a,b\n1,2\n".as_bytes()).is_err());

        let mut dbuf = Vec::new();
        write_delta_csv(&exact, &mut dbuf).unwrap();
        let back = read_delta_csv(dbuf.as_slice()).unwrap();
        assert_eq!(back.t, exact.t);
        for (a, b) in back.pop.iter().zip(&exact.pop) {
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }
}
