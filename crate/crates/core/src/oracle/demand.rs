//! Demand by direct integration of the consumer decision rule.

use crate::model::{MarketParams, ProfitPair};

/// Shares of matched consumers, integrated over `u1` for a given cutoff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratedDemand {
    /// Keep product 1 (with or without search).
    pub q1: f64,
    /// Keep product 2.
    pub q2: f64,
    /// Inspect product 2.
    pub searchers: f64,
}

/// Integrate the rule over `u1` in `[0, 1]`. Consumers with `u1 >= cutoff`
/// keep product 1; below the cutoff the conditional probabilities are
/// piecewise linear in `u1`, so the midpoint rule on each piece is exact.
pub fn integrate_demand(p1: f64, p2: f64, cutoff: f64, r_s: f64) -> IntegratedDemand {
    let h = cutoff.clamp(0.0, 1.0);
    let clamp01 = |x: f64| x.clamp(0.0, 1.0);
    let keep1 = |u1: f64| {
        if u1 - p1 >= -r_s {
            clamp01(u1 - p1 + p2)
        } else {
            0.0
        }
    };
    let keep2 = |u1: f64| 1.0 - clamp01(p2 + (u1 - p1).max(-r_s));

    let mut knots = vec![0.0, h, p1 - r_s, p1 - p2, 1.0 + p1 - p2];
    knots.retain(|&x| x >= 0.0 && x <= h);
    knots.sort_by(f64::total_cmp);
    let (mut q1, mut q2) = (1.0 - h, 0.0);
    for w in knots.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        q1 += len * keep1(mid);
        q2 += len * keep2(mid);
    }
    IntegratedDemand {
        q1,
        q2,
        searchers: h,
    }
}

/// Profits from integrated demand, with unmatched consumers (probability
/// `1 - alpha`) returning product 1.
pub fn integrated_profits(p1: f64, p2: f64, cutoff: f64, params: &MarketParams) -> ProfitPair {
    let d = integrate_demand(p1, p2, cutoff, params.r_s);
    let cost = params.r - params.r_s;
    let alpha = params.alpha;
    ProfitPair {
        pi1: alpha * (p1 * d.q1 - cost * (1.0 - d.q1)) - (1.0 - alpha) * cost,
        pi2: alpha * (p2 * d.q2 - cost * (d.searchers - d.q2)),
    }
}
