//! Market participants and their profit functions.
//!
//! Three parties trade in every iteration: each selected category (seller)
//! chooses an entity richness `ς_i`, the platform chooses a unit prompt price
//! `p`, and the consumer chooses a unit bundle price `p_g`. The functions here
//! evaluate their profits for a fixed strategy; the equilibrium solver lives in
//! [`crate::stackelberg`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{keyed_rng, tag};

/// 1-based category identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryId(pub usize);

impl CategoryId {
    /// Builds the id of the category stored at 0-based position `index`.
    pub fn from_index(index: usize) -> Self {
        CategoryId(index + 1)
    }

    /// 0-based storage position.
    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for CategoryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One sold product: image quality `phi`, prompt/image correlation `sigma`,
/// and their mean `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityObservation {
    phi: f64,
    sigma: f64,
    q: f64,
}

impl QualityObservation {
    pub fn new(phi: f64, sigma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&phi) {
            return Err(Error::domain(format!("phi = {phi} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::domain(format!("sigma = {sigma} outside [0, 1]")));
        }
        Ok(Self {
            phi,
            sigma,
            q: (phi + sigma) / 2.0,
        })
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Cost coefficients of one category: `C = (a ς² + b ς) q̄ + c φ̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl CategoryParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let params = Self {
            a,
            b,
            c,
            label: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a > 0.0) {
            return Err(Error::config(format!("a = {} must be > 0", self.a)));
        }
        if !(self.b.is_finite() && self.b >= 0.0) {
            return Err(Error::config(format!("b = {} must be >= 0", self.b)));
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::config(format!("c = {} must be >= 0", self.c)));
        }
        Ok(())
    }
}

/// Platform bundling cost `γ S² + δ S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformParams {
    pub gamma: f64,
    pub delta: f64,
}

impl Default for PlatformParams {
    fn default() -> Self {
        Self {
            gamma: 0.1,
            delta: 0.01,
        }
    }
}

impl PlatformParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::config(format!("gamma = {} must be > 0", self.gamma)));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::config(format!(
                "delta = {} must be >= 0",
                self.delta
            )));
        }
        Ok(())
    }
}

/// Consumer valuation `η ln(1 + q̄ S) + ω Σ σ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsumerParams {
    pub eta: f64,
    pub omega: f64,
}

impl Default for ConsumerParams {
    fn default() -> Self {
        Self {
            eta: 1.0,
            omega: 1.0,
        }
    }
}

impl ConsumerParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return Err(Error::config(format!("eta = {} must be > 0", self.eta)));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::config(format!("omega = {} must be > 0", self.omega)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    pub categories: Vec<CategoryParams>,
    pub platform: PlatformParams,
    pub consumer: ConsumerParams,
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::config("market needs at least one category"));
        }
        for (i, cat) in self.categories.iter().enumerate() {
            cat.validate()
                .map_err(|e| Error::config(format!("category {}: {e}", i + 1)))?;
        }
        self.platform.validate()?;
        self.consumer.validate()
    }

    pub fn n_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn category(&self, id: CategoryId) -> Result<&CategoryParams> {
        if id.0 == 0 {
            return Err(Error::UnknownCategory(id));
        }
        self.categories
            .get(id.index())
            .ok_or(Error::UnknownCategory(id))
    }

    /// The first `n` categories with the same platform and consumer.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.categories.len() {
            return Err(Error::config(format!(
                "cannot take {n} categories from a market of {}",
                self.categories.len()
            )));
        }
        Ok(Self {
            categories: self.categories[..n].to_vec(),
            platform: self.platform,
            consumer: self.consumer,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: Self = serde_json::from_str(text)?;
        params.validate()?;
        Ok(params)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The incentive triple `<p_g, p, ς>` for one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub p_g: f64,
    pub p: f64,
    pub richness: BTreeMap<CategoryId, f64>,
}

impl Strategy {
    pub fn total_richness(&self) -> f64 {
        self.richness.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfitReport {
    pub per_category: BTreeMap<CategoryId, f64>,
    pub platform: f64,
    pub consumer: f64,
}

impl ProfitReport {
    /// Sum of the selected categories' profits (PoS).
    pub fn sellers(&self) -> f64 {
        self.per_category.values().sum()
    }
}

fn check_keys<V>(
    what: &str,
    map: &BTreeMap<CategoryId, V>,
    selected: &BTreeSet<CategoryId>,
) -> Result<()> {
    if map.len() != selected.len() || !map.keys().all(|k| selected.contains(k)) {
        return Err(Error::KeyMismatch(format!(
            "{what} keys {:?} differ from the selected set {:?}",
            map.keys().collect::<Vec<_>>(),
            selected
        )));
    }
    Ok(())
}

/// Production cost `(a ς² + b ς) q̄ + c φ̄`.
pub fn category_cost(
    params: &CategoryParams,
    richness: f64,
    qbar: f64,
    phibar: f64,
) -> Result<f64> {
    if !(richness >= 0.0) {
        return Err(Error::domain(format!("richness {richness} is negative")));
    }
    if !(qbar > 0.0) {
        return Err(Error::domain(format!(
            "estimated quality {qbar} must be > 0"
        )));
    }
    Ok((params.a * richness * richness + params.b * richness) * qbar + params.c * phibar)
}

/// Seller profit `p ς − C`, or exactly 0 for an unselected category.
pub fn category_profit(
    params: &CategoryParams,
    p: f64,
    richness: f64,
    qbar: f64,
    phibar: f64,
    selected: bool,
) -> Result<f64> {
    if !selected {
        return Ok(0.0);
    }
    Ok(p * richness - category_cost(params, richness, qbar, phibar)?)
}

/// Platform profit as a function of the total richness `S`.
pub fn platform_profit_at(platform: &PlatformParams, p_g: f64, p: f64, total: f64) -> f64 {
    p_g * total - p * total - (platform.gamma * total * total + platform.delta * total)
}

/// Platform profit `p_g S − p S − (γ S² + δ S)` with `S = Σ ς` over `selected`.
pub fn platform_profit(
    platform: &PlatformParams,
    p_g: f64,
    p: f64,
    richness: &BTreeMap<CategoryId, f64>,
    selected: &BTreeSet<CategoryId>,
) -> Result<f64> {
    check_keys("richness", richness, selected)?;
    let total: f64 = richness.values().sum();
    Ok(platform_profit_at(platform, p_g, p, total))
}

/// Consumer profit given the total richness and the summed correlation means.
pub fn consumer_profit_at(
    consumer: &ConsumerParams,
    p_g: f64,
    total: f64,
    sigma_sum: f64,
    qbar_mean: f64,
) -> Result<f64> {
    let arg = 1.0 + qbar_mean * total;
    if !(arg > 0.0) {
        return Err(Error::domain(format!("log argument {arg} is not positive")));
    }
    Ok(consumer.eta * arg.ln() + consumer.omega * sigma_sum - p_g * total)
}

/// Consumer profit `η ln(1 + q̄ S) + ω Σ σ̄_i − p_g S`.
pub fn consumer_profit(
    consumer: &ConsumerParams,
    p_g: f64,
    richness: &BTreeMap<CategoryId, f64>,
    sigbar: &BTreeMap<CategoryId, f64>,
    qbar_mean: f64,
    selected: &BTreeSet<CategoryId>,
) -> Result<f64> {
    check_keys("richness", richness, selected)?;
    check_keys("sigma", sigbar, selected)?;
    let total: f64 = richness.values().sum();
    let sigma_sum: f64 = sigbar.values().sum();
    consumer_profit_at(consumer, p_g, total, sigma_sum, qbar_mean)
}

/// Closed interval `[lo, hi]` used by parameter sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range(pub f64, pub f64);

impl Range {
    fn check(&self, name: &str, strictly_positive: bool) -> Result<()> {
        let Range(lo, hi) = *self;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::config(format!(
                "{name} range [{lo}, {hi}] is invalid"
            )));
        }
        if (strictly_positive && lo <= 0.0) || lo < 0.0 {
            return Err(Error::config(format!(
                "{name} range [{lo}, {hi}] leaves the valid domain"
            )));
        }
        Ok(())
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.0 == self.1 {
            self.0
        } else {
            rng.random_range(self.0..=self.1)
        }
    }
}

/// Ranges for random category coefficients plus fixed platform/consumer values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamSpec {
    pub a: Range,
    pub b: Range,
    pub c: Range,
    pub platform: PlatformParams,
    pub consumer: ConsumerParams,
}

impl Default for ParamSpec {
    fn default() -> Self {
        Self {
            a: Range(0.01, 0.5),
            b: Range(0.01, 1.0),
            c: Range(0.01, 0.5),
            platform: PlatformParams::default(),
            consumer: ConsumerParams::default(),
        }
    }
}

impl ParamSpec {
    pub fn validate(&self) -> Result<()> {
        self.a.check("a", true)?;
        self.b.check("b", false)?;
        self.c.check("c", false)?;
        self.platform.validate()?;
        self.consumer.validate()
    }
}

/// Draws `n` categories' cost coefficients.
///
/// Category `i` draws from its own keyed stream, so the first `n` categories
/// of a larger market are identical to a market sampled with `n` directly.
pub fn sample_market_params(seed: u64, n: usize, spec: &ParamSpec) -> Result<MarketParams> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::config("market needs at least one category"));
    }
    let categories = (0..n)
        .map(|i| {
            let mut rng = keyed_rng(&[tag::PARAMS, seed, i as u64]);
            let a = spec.a.sample(&mut rng);
            let b = spec.b.sample(&mut rng);
            let c = spec.c.sample(&mut rng);
            CategoryParams {
                a,
                b,
                c,
                label: crate::catalog::default_label(CategoryId::from_index(i)).map(str::to_owned),
            }
        })
        .collect();
    Ok(MarketParams {
        categories,
        platform: spec.platform,
        consumer: spec.consumer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn cat(a: f64, b: f64, c: f64) -> CategoryParams {
        CategoryParams::new(a, b, c).unwrap()
    }

    fn ids(n: usize) -> BTreeSet<CategoryId> {
        (1..=n).map(CategoryId).collect()
    }

    fn uniform(values: &[f64]) -> BTreeMap<CategoryId, f64> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| (CategoryId(i + 1), v))
            .collect()
    }

    #[test]
    fn quality_is_mean_of_phi_and_sigma() {
        let obs = QualityObservation::new(0.3, 0.8).unwrap();
        assert_eq!(obs.q(), (0.3 + 0.8) / 2.0);
        assert!(QualityObservation::new(0.5, 1.2).is_err());
        assert!(QualityObservation::new(-0.1, 0.5).is_err());
        assert!(QualityObservation::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn cost_examples() {
        // (0.25·2.25 + 0.5·1.5)·0.8 + 0.1·0.7 = 1.05 + 0.07
        let c = category_cost(&cat(0.25, 0.5, 0.1), 1.5, 0.8, 0.7).unwrap();
        assert!((c - 1.12).abs() < TOL);
        assert_eq!(
            category_cost(&cat(0.3, 0.7, 0.2), 0.0, 0.9, 0.0).unwrap(),
            0.0
        );
        let c = category_cost(&cat(0.01, 0.0, 0.0), 1.0, 1.0, 1.0).unwrap();
        assert!((c - 0.01).abs() < TOL);
    }

    #[test]
    fn cost_rejects_bad_domain() {
        let p = cat(0.25, 0.5, 0.1);
        assert!(matches!(
            category_cost(&p, -0.1, 0.8, 0.7),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            category_cost(&p, 1.0, 0.0, 0.7),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn category_profit_examples() {
        let p = cat(0.25, 0.5, 0.1);
        let v = category_profit(&p, 1.0, 1.5, 0.8, 0.7, true).unwrap();
        assert!((v - 0.38).abs() < TOL);
        assert_eq!(category_profit(&p, 1.0, 1.5, 0.8, 0.7, false).unwrap(), 0.0);
        // Unselected categories report 0 even for out-of-domain inputs.
        assert_eq!(
            category_profit(&p, 1.0, -3.0, 0.0, 0.7, false).unwrap(),
            0.0
        );

        // a=0.25, b=c=0, p=0.4, q̄=0.8: interior optimum ς = 0.4/(2·0.25·0.8) = 1.
        let q = cat(0.25, 0.0, 0.0);
        let at_opt = category_profit(&q, 0.4, 1.0, 0.8, 0.0, true).unwrap();
        assert!((at_opt - 0.2).abs() < TOL);
        let best_grid = (0..=100_000)
            .map(|k| k as f64 * 1e-4)
            .map(|s| category_profit(&q, 0.4, s, 0.8, 0.0, true).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((best_grid - 0.2).abs() < 1e-8);
    }

    #[test]
    fn platform_profit_examples() {
        let pl = PlatformParams {
            gamma: 0.1,
            delta: 0.01,
        };
        let rich = uniform(&[1.5, 1.5]);
        let v = platform_profit(&pl, 1.5, 1.0, &rich, &ids(2)).unwrap();
        assert!((v - 0.57).abs() < TOL);
        let v = platform_profit(&pl, 1.2, 1.0, &rich, &ids(2)).unwrap();
        assert!((v + 0.33).abs() < TOL);
        let zero = uniform(&[0.0, 0.0, 0.0]);
        assert_eq!(platform_profit(&pl, 3.0, 1.0, &zero, &ids(3)).unwrap(), 0.0);
        assert!(matches!(
            platform_profit(&pl, 1.5, 1.0, &rich, &ids(3)),
            Err(Error::KeyMismatch(_))
        ));
    }

    #[test]
    fn consumer_profit_examples() {
        let rich = uniform(&[1.5, 1.5]);
        let sig = uniform(&[0.75, 0.75]);
        let c5 = ConsumerParams {
            eta: 5.0,
            omega: 1.0,
        };
        let v = consumer_profit(&c5, 1.5, &rich, &sig, 0.8, &ids(2)).unwrap();
        assert!((v - (5.0 * 3.4f64.ln() + 1.5 - 4.5)).abs() < TOL);
        assert!((v - 3.1189).abs() < 1e-4);

        let c1 = ConsumerParams::default();
        let v = consumer_profit(&c1, 1.5, &rich, &sig, 0.8, &ids(2)).unwrap();
        assert!((v + 1.7762).abs() < 1e-4);

        let zero = uniform(&[0.0, 0.0]);
        assert_eq!(
            consumer_profit(&c1, 1.5, &zero, &zero, 0.8, &ids(2)).unwrap(),
            0.0
        );
    }

    #[test]
    fn consumer_profit_log_domain() {
        let c1 = ConsumerParams::default();
        let rich = uniform(&[-2.0]);
        let sig = uniform(&[0.5]);
        assert!(matches!(
            consumer_profit(&c1, 1.0, &rich, &sig, 0.8, &ids(1)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn sampled_params_respect_ranges_and_seed() {
        let spec = ParamSpec::default();
        let m = sample_market_params(42, 80, &spec).unwrap();
        assert!(m.categories.iter().all(|c| (0.01..=0.5).contains(&c.a)));
        assert!(m.categories.iter().all(|c| (0.01..=1.0).contains(&c.b)));
        assert!(m.categories.iter().all(|c| (0.01..=0.5).contains(&c.c)));
        assert_eq!(
            m.platform,
            PlatformParams {
                gamma: 0.1,
                delta: 0.01
            }
        );
        assert_eq!(
            m.consumer,
            ConsumerParams {
                eta: 1.0,
                omega: 1.0
            }
        );

        let again = sample_market_params(42, 80, &spec).unwrap();
        assert_eq!(m.to_json().unwrap(), again.to_json().unwrap());
        assert_ne!(m, sample_market_params(43, 80, &spec).unwrap());

        let prefix = sample_market_params(42, 20, &spec).unwrap();
        assert_eq!(prefix, m.truncated(20).unwrap());
    }

    #[test]
    fn degenerate_range_is_constant() {
        let spec = ParamSpec {
            a: Range(0.2, 0.2),
            ..ParamSpec::default()
        };
        let m = sample_market_params(7, 10, &spec).unwrap();
        assert!(m.categories.iter().all(|c| c.a == 0.2));
    }

    #[test]
    fn invalid_ranges_rejected() {
        let spec = ParamSpec {
            a: Range(0.5, 0.1),
            ..ParamSpec::default()
        };
        assert!(matches!(
            sample_market_params(1, 3, &spec),
            Err(Error::Config(_))
        ));
        let spec = ParamSpec {
            a: Range(0.0, 0.1),
            ..ParamSpec::default()
        };
        assert!(sample_market_params(1, 3, &spec).is_err());
    }

    #[test]
    fn json_schema_is_strict() {
        let text = r#"{"categories":[{"a":0.2,"b":0.3,"c":0.1,"label":"person"}],
            "platform":{"gamma":0.1,"delta":0.01},"consumer":{"eta":1,"omega":1}}"#;
        let m = MarketParams::from_json(text).unwrap();
        assert_eq!(m.categories[0].label.as_deref(), Some("person"));
        assert_eq!(MarketParams::from_json(&m.to_json().unwrap()).unwrap(), m);

        let extra = text.replace("\"delta\":0.01", "\"delta\":0.01,\"zeta\":2");
        assert!(MarketParams::from_json(&extra).is_err());
        let bad = text.replace("\"a\":0.2", "\"a\":0.0");
        assert!(matches!(
            MarketParams::from_json(&bad),
            Err(Error::Config(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cost_nondecreasing_in_richness(
                a in 0.01f64..0.5, b in 0.0f64..1.0, c in 0.0f64..0.5,
                q in 0.05f64..1.0, phi in 0.0f64..1.0,
                s in 0.0f64..20.0, ds in 0.0f64..5.0,
            ) {
                let p = cat(a, b, c);
                let lo = category_cost(&p, s, q, phi).unwrap();
                let hi = category_cost(&p, s + ds, q, phi).unwrap();
                prop_assert!(hi >= lo);
            }

            #[test]
            fn platform_profit_strictly_concave_in_total(
                gamma in 0.1f64..1.0, delta in 0.0f64..0.05,
                pg in 0.0f64..5.0, p in 0.0f64..5.0,
                s in 0.0f64..10.0, h in 0.01f64..2.0,
            ) {
                let pl = PlatformParams { gamma, delta };
                let f = |x| platform_profit_at(&pl, pg, p, x);
                let mid = f(s + h);
                let ends = 0.5 * (f(s) + f(s + 2.0 * h));
                prop_assert!(mid > ends);
            }

            #[test]
            fn valuation_monotone_in_richness_and_sigma(
                eta in 1.0f64..10.0, omega in 1.0f64..5.0, q in 0.05f64..1.0,
                s in proptest::collection::vec(0.0f64..5.0, 3),
                sig in proptest::collection::vec(0.0f64..1.0, 3),
                which in 0usize..3, bump in 0.0f64..1.0,
            ) {
                let cons = ConsumerParams { eta, omega };
                let sel = ids(3);
                let base = consumer_profit(&cons, 0.0, &uniform(&s), &uniform(&sig), q, &sel).unwrap();
                let mut s2 = s.clone();
                s2[which] += bump;
                let mut sig2 = sig.clone();
                sig2[which] += bump;
                let up_s = consumer_profit(&cons, 0.0, &uniform(&s2), &uniform(&sig), q, &sel).unwrap();
                let up_sig = consumer_profit(&cons, 0.0, &uniform(&s), &uniform(&sig2), q, &sel).unwrap();
                prop_assert!(up_s >= base);
                prop_assert!(up_sig >= base);
            }

            #[test]
            fn unselected_category_earns_nothing(
                a in 0.01f64..0.5, b in 0.0f64..1.0, c in 0.0f64..0.5,
                p in -5.0f64..5.0, s in -5.0f64..5.0, q in -1.0f64..1.0, phi in 0.0f64..1.0,
            ) {
                prop_assert_eq!(category_profit(&cat(a, b, c), p, s, q, phi, false).unwrap(), 0.0);
            }

            #[test]
            fn platform_cost_term_ignores_price_scale(
                gamma in 0.1f64..1.0, delta in 0.0f64..0.05,
                pg in 0.0f64..5.0, p in 0.0f64..5.0, s in 0.0f64..10.0, k in 0.1f64..10.0,
            ) {
                let pl = PlatformParams { gamma, delta };
                let cost = |pg: f64, p: f64| (pg - p) * s - platform_profit_at(&pl, pg, p, s);
                let (base, scaled) = (cost(pg, p), cost(k * pg, k * p));
                prop_assert!((base - scaled).abs() <= 1e-9 * (1.0 + base.abs()));
            }
        }
    }
}
