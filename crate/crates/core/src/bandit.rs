//! Category selection as a combinatorial bandit.
//!
//! Every iteration picks exactly `K` distinct categories. The reward of a
//! category is the quality of the products drawn from it, and the estimator
//! keeps an `n`-weighted running mean of those qualities per category.

use std::collections::BTreeMap;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{CategoryId, QualityObservation};
use crate::rng::{keyed_rng, tag};

/// Running quality means `q̄_i` and observation counts `n_i`.
///
/// Means start at 1.0 (the top of the quality range) with zero weight, so
/// greedy selection tries every category before it can settle.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityEstimator {
    qbar: Vec<f64>,
    n: Vec<u64>,
}

impl QualityEstimator {
    pub const INITIAL_QUALITY: f64 = 1.0;

    pub fn new(n_categories: usize) -> Self {
        Self {
            qbar: vec![Self::INITIAL_QUALITY; n_categories],
            n: vec![0; n_categories],
        }
    }

    pub fn n_categories(&self) -> usize {
        self.qbar.len()
    }

    fn slot(&self, id: CategoryId) -> Result<usize> {
        if id.0 == 0 || id.0 > self.qbar.len() {
            return Err(Error::UnknownCategory(id));
        }
        Ok(id.index())
    }

    pub fn qbar(&self, id: CategoryId) -> Result<f64> {
        Ok(self.qbar[self.slot(id)?])
    }

    pub fn count(&self, id: CategoryId) -> Result<u64> {
        Ok(self.n[self.slot(id)?])
    }

    pub fn qbars(&self) -> &[f64] {
        &self.qbar
    }

    pub fn counts(&self) -> &[u64] {
        &self.n
    }

    /// Folds this iteration's bundles into the selected categories.
    ///
    /// The estimator is left untouched if any bundle is missing, unexpected,
    /// or not exactly `m` long.
    pub fn update(
        &mut self,
        selection: &Selection,
        bundles: &BTreeMap<CategoryId, Vec<QualityObservation>>,
        m: usize,
    ) -> Result<()> {
        if m == 0 {
            return Err(Error::config("bundle size must be >= 1"));
        }
        if bundles.len() != selection.chosen.len()
            || !selection.chosen.iter().all(|id| bundles.contains_key(id))
        {
            return Err(Error::KeyMismatch(format!(
                "bundles for {:?} but selection is {:?}",
                bundles.keys().collect::<Vec<_>>(),
                selection.chosen
            )));
        }
        for (id, bundle) in bundles {
            self.slot(*id)?;
            if bundle.len() != m {
                return Err(Error::KeyMismatch(format!(
                    "bundle for category {id} has {} products, expected {m}",
                    bundle.len()
                )));
            }
        }
        for (id, bundle) in bundles {
            let i = id.index();
            let sum: f64 = bundle.iter().map(QualityObservation::q).sum();
            let prior = self.n[i] as f64;
            self.qbar[i] = (self.qbar[i] * prior + sum) / (prior + m as f64);
            self.n[i] += m as u64;
        }
        Ok(())
    }
}

/// The `K` categories picked at iteration `t`, in ascending id order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub chosen: Vec<CategoryId>,
    pub t: u64,
}

impl Selection {
    fn from_indices(mut indices: Vec<usize>, t: u64) -> Self {
        indices.sort_unstable();
        Self {
            chosen: indices.into_iter().map(CategoryId::from_index).collect(),
            t,
        }
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn contains(&self, id: CategoryId) -> bool {
        self.chosen.binary_search(&id).is_ok()
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::config(format!(
            "cannot select K = {k} of N = {n} categories"
        )));
    }
    Ok(())
}

/// Indices of the `k` largest scores; ties go to the lower index.
fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    order.truncate(k);
    order
}

pub fn select_greedy(est: &QualityEstimator, k: usize, t: u64) -> Result<Selection> {
    check_k(k, est.n_categories())?;
    Ok(Selection::from_indices(top_k(&est.qbar, k), t))
}

/// Uniform `k`-subset of `1..=n` addressed by `(seed, t)`.
pub fn select_random(seed: u64, t: u64, n: usize, k: usize) -> Result<Selection> {
    check_k(k, n)?;
    let mut rng = keyed_rng(&[tag::SELECT, seed, t]);
    Ok(Selection::from_indices(
        index::sample(&mut rng, n, k).into_vec(),
        t,
    ))
}

/// Length of the exploration phase, `⌈ε T⌉`.
pub fn exploration_rounds(epsilon: f64, horizon: u64) -> u64 {
    (epsilon * horizon as f64).ceil() as u64
}

pub fn select_eps_first(
    est: &QualityEstimator,
    seed: u64,
    t: u64,
    horizon: u64,
    epsilon: f64,
    k: usize,
) -> Result<Selection> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::config(format!("epsilon = {epsilon} outside [0, 1]")));
    }
    if t == 0 || t > horizon {
        return Err(Error::config(format!(
            "iteration {t} outside 1..={horizon}"
        )));
    }
    if t <= exploration_rounds(epsilon, horizon) {
        select_random(seed, t, est.n_categories(), k)
    } else {
        select_greedy(est, k, t)
    }
}

/// CUCB index `q̄_i + coeff · sqrt(3 ln t / (2 n_i))`; unexplored categories
/// score `+∞`.
pub fn cucb_index(qbar: f64, n: u64, t: u64, coeff: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    qbar + coeff * (3.0 * (t as f64).ln() / (2.0 * n as f64)).sqrt()
}

pub fn select_cucb(est: &QualityEstimator, t: u64, k: usize, coeff: f64) -> Result<Selection> {
    check_k(k, est.n_categories())?;
    if t == 0 {
        return Err(Error::config("CUCB iterations start at t = 1"));
    }
    let scores: Vec<f64> = est
        .qbar
        .iter()
        .zip(&est.n)
        .map(|(&q, &n)| cucb_index(q, n, t, coeff))
        .collect();
    Ok(Selection::from_indices(top_k(&scores, k), t))
}

/// Fixed top-`k` of the true category means.
pub fn select_oracle(true_means: &[f64], k: usize, t: u64) -> Result<Selection> {
    check_k(k, true_means.len())?;
    Ok(Selection::from_indices(top_k(true_means, k), t))
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_cucb_coeff() -> f64 {
    1.0
}

/// Selection policy, tagged by `"type"` in JSON.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyConfig {
    #[default]
    Greedy,
    Random,
    EpsFirst {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    Cucb {
        #[serde(default = "default_cucb_coeff")]
        cucb_coeff: f64,
    },
    Optimal,
}

/// Everything a policy may look at when choosing.
pub struct SelectionContext<'a> {
    pub estimator: &'a QualityEstimator,
    pub true_means: &'a [f64],
    pub seed: u64,
    pub t: u64,
    pub horizon: u64,
    pub k: usize,
}

impl PolicyConfig {
    /// The five policies with their default hyper-parameters.
    pub fn all() -> [PolicyConfig; 5] {
        [
            PolicyConfig::Greedy,
            PolicyConfig::Random,
            PolicyConfig::EpsFirst {
                epsilon: default_epsilon(),
            },
            PolicyConfig::Cucb {
                cucb_coeff: default_cucb_coeff(),
            },
            PolicyConfig::Optimal,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::Greedy => "greedy",
            PolicyConfig::Random => "random",
            PolicyConfig::EpsFirst { .. } => "eps_first",
            PolicyConfig::Cucb { .. } => "cucb",
            PolicyConfig::Optimal => "optimal",
        }
    }

    /// Parses a bare policy name with default hyper-parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        PolicyConfig::all()
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::config(format!("unknown policy {name:?}")))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            PolicyConfig::EpsFirst { epsilon } if !(0.0..=1.0).contains(&epsilon) => {
                Err(Error::config(format!("epsilon = {epsilon} outside [0, 1]")))
            }
            PolicyConfig::Cucb { cucb_coeff } if !(cucb_coeff.is_finite() && cucb_coeff >= 0.0) => {
                Err(Error::config(format!(
                    "cucb_coeff = {cucb_coeff} must be >= 0"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn select(&self, ctx: &SelectionContext<'_>) -> Result<Selection> {
        match *self {
            PolicyConfig::Greedy => select_greedy(ctx.estimator, ctx.k, ctx.t),
            PolicyConfig::Random => {
                select_random(ctx.seed, ctx.t, ctx.estimator.n_categories(), ctx.k)
            }
            PolicyConfig::EpsFirst { epsilon } => {
                select_eps_first(ctx.estimator, ctx.seed, ctx.t, ctx.horizon, epsilon, ctx.k)
            }
            PolicyConfig::Cucb { cucb_coeff } => {
                select_cucb(ctx.estimator, ctx.t, ctx.k, cucb_coeff)
            }
            PolicyConfig::Optimal => select_oracle(ctx.true_means, ctx.k, ctx.t),
        }
    }
}
