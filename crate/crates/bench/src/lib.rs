//! Shared fixtures for the criterion benchmarks under `benches/`.

use pbt_core::market::{sample_market_params, ParamSpec};
use pbt_core::stackelberg::Member;
use pbt_core::{CategoryId, MarketParams, RunConfig};

/// Default-range market over `n` categories.
pub fn market(n: usize, seed: u64) -> MarketParams {
    sample_market_params(seed, n, &ParamSpec::default()).expect("default ranges are valid")
}

/// `k` members with spread-out qualities.
pub fn members(k: usize) -> Vec<Member> {
    (0..k)
        .map(|i| {
            let q = 0.5 + 0.4 * i as f64 / k.max(1) as f64;
            Member {
                id: CategoryId(i + 1),
                qbar: q,
                phi_bar: q - 0.02,
                sigma_bar: q + 0.02,
            }
        })
        .collect()
}

/// Default run shortened to `horizon` iterations.
pub fn run_config(horizon: u64) -> RunConfig {
    RunConfig {
        horizon,
        ..RunConfig::default()
    }
}
