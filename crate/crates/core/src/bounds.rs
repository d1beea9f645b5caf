//! Closed-form MSE bounds for the Wyner-Ziv and chained estimators.
//!
//! `log k` is always base 2; `ln` is natural.

use serde::{Deserialize, Serialize};

use crate::chain::{d_value, Chain, DeltaTable};
use crate::codec::{log_k_for, CodecParams};

/// `79 * ceil(log2(2 + sqrt(12 ln n))) + 26`
pub fn baseline_factor(n: usize) -> f64 {
    79.0 * log_k_for(n) as f64 + 26.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaselineBound {
    pub value: f64,
    /// False when `r > d`; the value is still reported.
    pub in_regime: bool,
}

/// Wyner-Ziv bound `(79 log k + 26) * sum(delta_i^2) * d / (n^2 r)`.
pub fn baseline_bound(delta_s: &[f64], n: usize, d: usize, r: usize) -> BaselineBound {
    let sum_sq: f64 = delta_s.iter().map(|x| x * x).sum();
    let scale = d as f64 / ((n * n) as f64 * r as f64);
    BaselineBound {
        value: baseline_factor(n) * sum_sq * scale,
        in_regime: r <= d,
    }
}

/// Per-client `(alpha, beta)` bounds for a chain with effective squared
/// distance `d_eff` ending at a client with side distance `delta_i`.
pub fn corollary_alpha_beta(d_eff: f64, delta_i: f64, params: &CodecParams) -> (f64, f64) {
    let n = params.n as f64;
    let km2 = params.k as f64 - 2.0;
    let mu = params.mu;
    let alpha = 24.0 * d_eff * n.sqrt().ln() / (mu * km2 * km2)
        + 154.0 * d_eff / (mu * n)
        + delta_i * delta_i / mu;
    let beta = 154.0 * d_eff / n;
    (alpha, beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub baseline: f64,
    pub proposed: f64,
    pub b_used: f64,
    pub sum_d: f64,
    pub sum_delta_sq: f64,
    /// `proposed / baseline` (1 when both are zero).
    pub ratio: f64,
    /// `sum_d < sum_delta_sq`
    pub improvement_region: bool,
    pub in_regime: bool,
}

/// Chained-estimator bound. The dimension used is the padded rotation
/// dimension `params.dim`.
pub fn proposed_bound(chains: &[Chain], table: &DeltaTable, params: &CodecParams) -> BoundReport {
    let n = params.n;
    let factor = 79.0 * params.log_k as f64 + 26.0;
    let scale = params.dim as f64 / ((n * n) as f64 * params.r as f64);
    let sum_d: f64 = chains.iter().map(|c| d_value(c, n)).sum();
    let sum_delta_sq = table.sum_side_sq();
    let excess: f64 = chains
        .iter()
        .map(|c| d_value(c, n) - table.side(c.client()).powi(2))
        .sum();
    let b_used = if excess >= 0.0 {
        factor
    } else {
        params.log_k as f64 / 8.0
    };
    let baseline = factor * sum_delta_sq * scale;
    let proposed = baseline + b_used * excess * scale;
    let ratio = if baseline == 0.0 && proposed == 0.0 {
        1.0
    } else {
        proposed / baseline
    };
    BoundReport {
        baseline,
        proposed,
        b_used,
        sum_d,
        sum_delta_sq,
        ratio,
        improvement_region: sum_d < sum_delta_sq,
        in_regime: params.r <= params.dim && params.r >= 2 * params.log_k as usize,
    }
}

/// `1 - log k / (8 (79 log k + 26)) * (1 - sum_d / sum_delta_sq)`
pub fn remark1_ratio(sum_d: f64, sum_delta_sq: f64, log_k: u32) -> f64 {
    let lk = log_k as f64;
    1.0 - lk / (8.0 * (79.0 * lk + 26.0)) * (1.0 - sum_d / sum_delta_sq)
}

/// `sum(alpha_i) / n^2 + sum(beta_i) / n` using the per-client alpha/beta
/// bounds; the decomposition every estimator with independent per-client
/// randomness satisfies.
pub fn decomposition_bound(chains: &[Chain], table: &DeltaTable, params: &CodecParams) -> f64 {
    let n = params.n as f64;
    chains
        .iter()
        .map(|c| {
            let (a, b) = corollary_alpha_beta(d_value(c, params.n), table.side(c.client()), params);
            a / (n * n) + b / n
        })
        .sum()
}
