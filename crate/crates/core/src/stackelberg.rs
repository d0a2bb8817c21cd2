//! Three-stage leader/follower pricing solved by backward induction.
//!
//! Stage 3: each selected category best-responds to the unit prompt price `p`
//! with richness `ς_i = (p − b_i q̄_i) / (2 a_i q̄_i)`.
//!
//! Stage 2: the platform, anticipating stage 3, picks
//! `p = (p_g A − (δA − 2γAB − B)) / (2A(1 + γA))` where
//! `A = Σ 1/(2 a_i q̄_i)` and `B = Σ b_i/(2 a_i)` over the selected categories.
//!
//! Stage 1: the consumer, anticipating both, maximizes
//! `η ln(1 + q̄(p_g Γ − Θ)) − p_g² Γ + p_g Θ + const` with
//! `Γ = A / (2(1 + γA))` and `Θ = (δA − 2γAB − B) / (2(1 + γA)) + B`.
//! Substituting `Υ = Θ − p_g Γ` turns the first-order condition into the
//! quadratic `2q̄Υ² − (2 + q̄Θ)Υ + Θ − ηq̄Γ = 0` whose smaller root `Υ₁` is the
//! maximizer, giving `p_g = (3q̄Θ − 2 + √Δ) / (4q̄Γ)`.
//!
//! `Υ` is minus the total unclamped richness, so `Υ < 0` is required for a
//! trade to happen at all; solves that land on `Υ ≥ 0` are reported as
//! [`Infeasibility`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bandit::QualityEstimator;
use crate::error::{Error, Infeasibility, Result};
use crate::market::{
    category_profit, consumer_profit_at, CategoryId, CategoryParams, ConsumerParams, MarketParams,
    PlatformParams, ProfitReport, Strategy,
};

/// Intermediate quantities of one stage-1 solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageAggregates {
    /// `A = Σ 1/(2 a_i q̄_i)`.
    pub a_total: f64,
    /// `B = Σ b_i/(2 a_i)`.
    pub b_total: f64,
    /// `Γ = A / (2(1 + γA))`.
    pub gamma: f64,
    /// `Θ = (δA − 2γAB − B) / (2(1 + γA)) + B`.
    pub theta: f64,
    pub qbar_mean: f64,
    /// `Δ = (2 + q̄Θ)² − 8q̄(Θ − ηq̄Γ)`.
    pub discriminant: f64,
    /// `Υ = Θ − p_g Γ` at the returned price.
    pub upsilon: f64,
    /// Roots `(Υ₁, Υ₂)` of the first-order quadratic, `Υ₁ ≤ Υ₂`.
    pub upsilon_roots: (f64, f64),
}

impl StageAggregates {
    /// `(2 − q̄Θ)² + 8ηΓq̄²`, algebraically equal to [`Self::discriminant`].
    pub fn discriminant_sum_form(&self, eta: f64) -> f64 {
        let q = self.qbar_mean;
        (2.0 - q * self.theta).powi(2) + 8.0 * eta * self.gamma * q * q
    }
}

/// Stage-3 best response, unclamped. Negative when `p < b q̄`.
pub fn solve_stage3(params: &CategoryParams, p: f64, qbar: f64) -> Result<f64> {
    if !(params.a > 0.0) {
        return Err(Error::domain(format!("a = {} must be > 0", params.a)));
    }
    if !(qbar > 0.0) {
        return Err(Error::domain(format!(
            "estimated quality {qbar} must be > 0"
        )));
    }
    Ok((p - params.b * qbar) / (2.0 * params.a * qbar))
}

/// Stage-2 best response of the platform to the bundle price `p_g`.
pub fn solve_stage2(
    a_total: f64,
    b_total: f64,
    platform: &PlatformParams,
    p_g: f64,
) -> Result<f64> {
    if !(a_total > 0.0) {
        return Err(Error::domain(format!("A = {a_total} must be > 0")));
    }
    if !(platform.gamma > 0.0) {
        return Err(Error::domain(format!(
            "gamma = {} must be > 0",
            platform.gamma
        )));
    }
    let (a, b, g, d) = (a_total, b_total, platform.gamma, platform.delta);
    Ok((p_g * a - (d * a - 2.0 * g * a * b - b)) / (2.0 * a * (1.0 + g * a)))
}

/// Stage-1 optimum of the consumer, `p_g*`, with its aggregates.
pub fn solve_stage1(
    a_total: f64,
    b_total: f64,
    qbar_mean: f64,
    platform: &PlatformParams,
    consumer: &ConsumerParams,
) -> Result<(f64, StageAggregates)> {
    if !(a_total > 0.0) {
        return Err(Error::domain(format!("A = {a_total} must be > 0")));
    }
    if !(platform.gamma > 0.0) {
        return Err(Error::domain(format!(
            "gamma = {} must be > 0",
            platform.gamma
        )));
    }
    if !(consumer.eta > 0.0) {
        return Err(Error::domain(format!("eta = {} must be > 0", consumer.eta)));
    }
    if !(qbar_mean > 0.0) {
        return Err(Error::domain(format!(
            "mean quality {qbar_mean} must be > 0"
        )));
    }
    let (a, b, g, d, eta, q) = (
        a_total,
        b_total,
        platform.gamma,
        platform.delta,
        consumer.eta,
        qbar_mean,
    );
    let gamma_agg = a / (2.0 * (1.0 + g * a));
    let theta = (d * a - 2.0 * g * a * b - b) / (2.0 * (1.0 + g * a)) + b;
    let discriminant = (2.0 + q * theta).powi(2) - 8.0 * q * (theta - eta * q * gamma_agg);
    let root = discriminant.sqrt();
    let p_g = (3.0 * q * theta - 2.0 + root) / (4.0 * q * gamma_agg);
    let upsilon_roots = (
        (2.0 + q * theta - root) / (4.0 * q),
        (2.0 + q * theta + root) / (4.0 * q),
    );
    let upsilon = theta - p_g * gamma_agg;
    let aggregates = StageAggregates {
        a_total: a,
        b_total: b,
        gamma: gamma_agg,
        theta,
        qbar_mean: q,
        discriminant,
        upsilon,
        upsilon_roots,
    };
    if !(upsilon < 0.0) {
        return Err(Error::Infeasible(Infeasibility::UpsilonNonNegative {
            upsilon,
        }));
    }
    let p = solve_stage2(a, b, platform, p_g)?;
    let log_arg = 1.0 + q * p * a - q * b;
    if !(log_arg > 0.0) {
        return Err(Error::Infeasible(Infeasibility::LogDomain {
            argument: log_arg,
        }));
    }
    Ok((p_g, aggregates))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Warning {
    /// Stage 3 wanted negative richness; the category supplies 0 instead.
    ClampedRichness { category: CategoryId, raw: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub strategy: Strategy,
    pub aggregates: StageAggregates,
    pub profits: ProfitReport,
    pub warnings: Vec<Warning>,
}

impl Equilibrium {
    pub fn clamped_count(&self) -> usize {
        self.warnings
            .iter()
            .filter(|w| matches!(w, Warning::ClampedRichness { .. }))
            .count()
    }
}

/// Per-iteration state of one selected category.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Member {
    pub id: CategoryId,
    /// Post-update estimated quality `q̄_i`.
    pub qbar: f64,
    /// Mean `φ` of this iteration's bundle.
    pub phi_bar: f64,
    /// Mean `σ` of this iteration's bundle.
    pub sigma_bar: f64,
}

/// A frozen single-iteration game: market parameters plus selected members.
#[derive(Debug, Clone)]
pub struct GameInstance<'a> {
    params: &'a MarketParams,
    members: Vec<Member>,
}

impl<'a> GameInstance<'a> {
    pub fn new(params: &'a MarketParams, mut members: Vec<Member>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::domain(
                "the game needs at least one selected category",
            ));
        }
        members.sort_by_key(|m| m.id);
        for pair in members.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::KeyMismatch(format!(
                    "category {} listed twice",
                    pair[0].id
                )));
            }
        }
        for m in &members {
            params.category(m.id)?;
            if !(m.qbar > 0.0) {
                return Err(Error::domain(format!(
                    "category {} has estimated quality {} (must be > 0)",
                    m.id, m.qbar
                )));
            }
        }
        Ok(Self { params, members })
    }

    pub fn params(&self) -> &MarketParams {
        self.params
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn selected(&self) -> BTreeSet<CategoryId> {
        self.members.iter().map(|m| m.id).collect()
    }

    fn cat(&self, m: &Member) -> &CategoryParams {
        // Ids were checked in `new`.
        &self.params.categories[m.id.index()]
    }

    /// `(A, B, q̄)` over the selected categories.
    pub fn sums(&self) -> (f64, f64, f64) {
        let mut a_total = 0.0;
        let mut b_total = 0.0;
        let mut q_sum = 0.0;
        for m in &self.members {
            let c = self.cat(m);
            a_total += 1.0 / (2.0 * c.a * m.qbar);
            b_total += c.b / (2.0 * c.a);
            q_sum += m.qbar;
        }
        (a_total, b_total, q_sum / self.members.len() as f64)
    }

    /// Unclamped stage-3 responses to `p`.
    pub fn raw_richness(&self, p: f64) -> Result<BTreeMap<CategoryId, f64>> {
        self.members
            .iter()
            .map(|m| Ok((m.id, solve_stage3(self.cat(m), p, m.qbar)?)))
            .collect()
    }

    /// Stage 3 with negative responses clamped to 0.
    pub fn respond_to_unit_price(&self, p_g: f64, p: f64) -> Result<(Strategy, Vec<Warning>)> {
        let mut warnings = Vec::new();
        let richness = self
            .raw_richness(p)?
            .into_iter()
            .map(|(id, raw)| {
                if raw < 0.0 {
                    warnings.push(Warning::ClampedRichness { category: id, raw });
                    (id, 0.0)
                } else {
                    (id, raw)
                }
            })
            .collect();
        Ok((Strategy { p_g, p, richness }, warnings))
    }

    /// Stages 2 and 3 responding to a fixed bundle price.
    pub fn respond_to_bundle_price(&self, p_g: f64) -> Result<(Strategy, Vec<Warning>)> {
        let (a_total, b_total, _) = self.sums();
        let p = solve_stage2(a_total, b_total, &self.params.platform, p_g)?;
        self.respond_to_unit_price(p_g, p)
    }

    /// Every participant's profit under `strategy`.
    pub fn profits(&self, strategy: &Strategy) -> Result<ProfitReport> {
        if strategy.richness.len() != self.members.len()
            || !self
                .members
                .iter()
                .all(|m| strategy.richness.contains_key(&m.id))
        {
            return Err(Error::KeyMismatch(
                "strategy richness does not match the selected categories".into(),
            ));
        }
        let mut per_category = BTreeMap::new();
        for m in &self.members {
            let s = strategy.richness[&m.id];
            let phi = category_profit(self.cat(m), strategy.p, s, m.qbar, m.phi_bar, true)?;
            per_category.insert(m.id, phi);
        }
        let total = strategy.total_richness();
        let (_, _, qbar_mean) = self.sums();
        let sigma_sum: f64 = self.members.iter().map(|m| m.sigma_bar).sum();
        let platform = crate::market::platform_profit_at(
            &self.params.platform,
            strategy.p_g,
            strategy.p,
            total,
        );
        let consumer = consumer_profit_at(
            &self.params.consumer,
            strategy.p_g,
            total,
            sigma_sum,
            qbar_mean,
        )?;
        Ok(ProfitReport {
            per_category,
            platform,
            consumer,
        })
    }

    /// Backward induction: stage 1, then 2, then 3 with clamping.
    pub fn solve(&self) -> Result<Equilibrium> {
        let (a_total, b_total, qbar_mean) = self.sums();
        let (p_g, aggregates) = solve_stage1(
            a_total,
            b_total,
            qbar_mean,
            &self.params.platform,
            &self.params.consumer,
        )?;
        let (strategy, warnings) = self.respond_to_bundle_price(p_g)?;
        let profits = self.profits(&strategy)?;
        Ok(Equilibrium {
            strategy,
            aggregates,
            profits,
            warnings,
        })
    }
}

/// Bundle means of one selected category, supplied by the engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleMeans {
    pub phi_bar: f64,
    pub sigma_bar: f64,
}

/// Solves the iteration game for `selected` using the estimator's current
/// (post-update) qualities.
pub fn solve_equilibrium(
    selected: &[CategoryId],
    est: &QualityEstimator,
    means: &BTreeMap<CategoryId, BundleMeans>,
    params: &MarketParams,
) -> Result<Equilibrium> {
    let members = selected
        .iter()
        .map(|&id| {
            let bm = means
                .get(&id)
                .ok_or_else(|| Error::KeyMismatch(format!("no bundle means for category {id}")))?;
            Ok(Member {
                id,
                qbar: est.qbar(id)?,
                phi_bar: bm.phi_bar,
                sigma_bar: bm.sigma_bar,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    GameInstance::new(params, members)?.solve()
}

const GRID_POINTS: usize = 10_001;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]`: a 10⁴-interval grid scan, then golden-section
/// refinement inside the two cells around the best grid point.
///
/// Returns `(x*, f(x*))`. For unimodal `f` the argmax error is below `tol`.
pub fn numeric_argmax<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain(format!("invalid bracket [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be > 0")));
    }
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let at = |i: usize| {
        if i == GRID_POINTS - 1 {
            hi
        } else {
            lo + step * i as f64
        }
    };
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..GRID_POINTS {
        let v = f(at(i));
        if v > best.1 {
            best = (i, v);
        }
    }
    let (i, grid_val) = best;
    if !grid_val.is_finite() {
        return Err(Error::domain(
            "objective is not finite anywhere on the bracket",
        ));
    }

    let mut a = at(i.saturating_sub(1));
    let mut b = at((i + 1).min(GRID_POINTS - 1));
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    if fx >= grid_val {
        Ok((x, fx))
    } else {
        Ok((at(i), grid_val))
    }
}
