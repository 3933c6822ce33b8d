//! Consumer surplus, industry profit and the platform's levers: the
//! position auction, the split of the return cost, and correlated match
//! values.

use crate::equilibrium::{solve_equilibrium_unobservable, EquilibriumResult, SolverOptions};
use crate::error::{ModelError, Result};
use crate::model::{
    region_masses, MarketParams, PricePair, ProfitPair, ReservationValue, MAX_SEARCH_FRICTION,
};

const SLACK: f64 = 1e-12;

/// Expected consumer surplus when consumers search iff `u1 < cutoff`, with
/// no consumer-borne return cost.
///
/// Polynomial form of the integrals over the no-search strip, the searchers
/// with `u1 < p1` and the searchers with `u1 >= p1`. Needs
/// `p1 <= cutoff` and `cutoff - p1 + p2 <= 1`.
pub fn consumer_surplus_at_cutoff(p1: f64, p2: f64, cutoff: f64, s: f64) -> Result<f64> {
    let x = cutoff - p1;
    if !(p1 >= 0.0 && p2 >= 0.0) {
        return Err(ModelError::precondition(format!(
            "prices must be non-negative (p1 = {p1}, p2 = {p2})"
        )));
    }
    if !(x >= -SLACK && x + p2 <= 1.0 + SLACK && cutoff <= 1.0 + SLACK) {
        return Err(ModelError::precondition(format!(
            "surplus polynomial needs p1 <= A and A - p1 + p2 <= 1 (A = {cutoff}, p1 = {p1}, p2 = {p2})"
        )));
    }
    let x = x.max(0.0);
    let stay = (1.0 - p2).powi(2);
    let t1 = p1 * stay / 2.0;
    let t2 = (x * stay - x.powi(3) / 3.0) / 2.0;
    let t3 = p2 * x * x / 2.0;
    let t4 = x.powi(3) / 3.0;
    let t5 = ((1.0 - p1).powi(2) - x * x) / 2.0;
    Ok(t1 + t2 + t3 + t4 + t5 - s * cutoff)
}

/// Consumer surplus at the optimal search cutoff `a + p1 - p2`.
pub fn consumer_surplus(prices: &PricePair, a: ReservationValue, s: f64) -> Result<f64> {
    region_masses(prices, a, 0.0)?;
    consumer_surplus_at_cutoff(prices.p1, prices.p2, prices.cutoff, s)
}

/// Consumer surplus for any market: a consumer-borne return cost shifts both
/// prices down by `r_s` and charges `r_s` per return; unmatched consumers
/// return product 1 and leave.
pub fn market_consumer_surplus(prices: &PricePair, params: &MarketParams) -> Result<f64> {
    let a = params.reservation_value()?;
    region_masses(prices, a, params.r_s)?;
    let r_s = params.r_s;
    let matched = if r_s == 0.0 {
        consumer_surplus_at_cutoff(prices.p1, prices.p2, prices.cutoff, params.s)?
    } else {
        consumer_surplus_at_cutoff(prices.p1 - r_s, prices.p2 - r_s, prices.cutoff, params.s)?
            - r_s * (1.0 + prices.cutoff)
    };
    if params.alpha == 1.0 {
        return Ok(matched);
    }
    Ok(params.alpha * matched - (1.0 - params.alpha) * r_s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionAuction {
    /// Losing bid in the symmetric equilibrium, `pi1 - pi2`.
    pub b2: f64,
    /// Price paid for the top slot, `max(0, b2)`.
    pub revenue: f64,
    /// True when the gap is negative and nobody bids for the top slot.
    pub clipped: bool,
}

/// Second-price auction for the prominent slot.
///
/// Any bids with `b1 >= pi1 - pi2 >= b2` form an equilibrium; the symmetric
/// one has the loser bidding the whole prominence rent.
pub fn position_auction(profits: &ProfitPair) -> PositionAuction {
    let b2 = profits.gap();
    PositionAuction {
        b2,
        revenue: b2.max(0.0),
        clipped: b2 < 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareReport {
    pub cs: f64,
    pub industry: f64,
    pub gap: f64,
    pub ad_revenue: f64,
    pub auction_clipped: bool,
}

pub fn welfare_report(eq: &EquilibriumResult, params: &MarketParams) -> Result<WelfareReport> {
    let auction = position_auction(&eq.profits);
    Ok(WelfareReport {
        cs: market_consumer_surplus(&eq.prices, params)?,
        industry: eq.profits.industry(),
        gap: eq.profits.gap(),
        ad_revenue: auction.revenue,
        auction_clipped: auction.clipped,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationGradient {
    /// One-sided difference of the equilibrium gap in the consumer share.
    pub gradient: f64,
    /// `(a - p2)(1 - a + p1 - p2) + (1 - a) p1` at the base equilibrium.
    pub firm_cost_channel: f64,
    /// `(p2 - p1) r` at the base equilibrium.
    pub demand_channel: f64,
    pub base: EquilibriumResult,
    pub shifted: EquilibriumResult,
}

/// Effect on the gap of moving a small part `h` of the return cost onto
/// consumers, starting from a market where firms bear all of it.
pub fn allocation_gradient(
    params: &MarketParams,
    h: f64,
    opts: &SolverOptions,
) -> Result<AllocationGradient> {
    if !(params.r > 0.0) {
        return Err(ModelError::domain("allocation gradient needs r > 0"));
    }
    if params.r_s != 0.0 {
        return Err(ModelError::domain("allocation gradient starts from r_s = 0"));
    }
    if !(h > 0.0 && params.s + h < MAX_SEARCH_FRICTION && h <= params.r) {
        return Err(ModelError::domain(format!(
            "step h = {h} must be positive, at most r and keep s + h < 1/8"
        )));
    }
    let base = solve_equilibrium_unobservable(params, opts)?;
    let shifted_params = params.with_consumer_return_cost(h)?;
    let shifted = solve_equilibrium_unobservable(&shifted_params, opts)?;
    let a = params.reservation_value()?.value();
    let (p1, p2) = (base.prices.p1, base.prices.p2);
    Ok(AllocationGradient {
        gradient: (shifted.profits.gap() - base.profits.gap()) / h,
        firm_cost_channel: (a - p2) * (1.0 - a + p1 - p2) + (1.0 - a) * p1,
        demand_channel: (p2 - p1) * params.r,
        base,
        shifted,
    })
}

/// Allocation gradient along a grid of search costs at fixed `r`, together
/// with the midpoint of the first cell where its sign flips.
pub fn allocation_sign_sweep(
    r: f64,
    s_values: &[f64],
    h: f64,
    opts: &SolverOptions,
) -> (Vec<Result<f64>>, Option<f64>) {
    let grads: Vec<Result<f64>> = s_values
        .iter()
        .map(|&s| {
            let params = MarketParams::new(s, r)?;
            Ok(allocation_gradient(&params, h, opts)?.gradient)
        })
        .collect();
    let flip = s_values.windows(2).zip(grads.windows(2)).find_map(|(s, g)| match (&g[0], &g[1]) {
        (Ok(x), Ok(y)) if x.signum() != y.signum() => Some(0.5 * (s[0] + s[1])),
        _ => None,
    });
    (grads, flip)
}

/// Three-way split of the gap at a common price when the match component
/// is one with probability `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapDecomposition {
    /// `alpha p (q1 - q2)`.
    pub advantage: f64,
    /// `-alpha r (q2 - k1)`.
    pub indirect: f64,
    /// `-(1 - alpha) r`.
    pub direct: f64,
}

impl GapDecomposition {
    pub fn total(&self) -> f64 {
        self.advantage + self.indirect + self.direct
    }
}

pub fn correlated_gap(alpha: f64, p: f64, a: ReservationValue, r: f64) -> Result<GapDecomposition> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(ModelError::precondition(format!("alpha = {alpha} outside (0, 1]")));
    }
    if !(r >= 0.0) {
        return Err(ModelError::precondition(format!("return cost r = {r} must be >= 0")));
    }
    let m = region_masses(&PricePair::symmetric(p, a), a, 0.0)?;
    Ok(GapDecomposition {
        advantage: alpha * p * (m.q1() - m.q2()),
        indirect: -alpha * r * (m.q2() - m.k1),
        direct: -(1.0 - alpha) * r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::firm_profits;
    use approx::assert_abs_diff_eq;

    fn av(a: f64) -> ReservationValue {
        ReservationValue::new(a).unwrap()
    }

    // Midpoint double integral of realised net utility over the unit square.
    fn surplus_by_quadrature(p1: f64, p2: f64, cutoff: f64, s: f64, r_s: f64) -> f64 {
        let n = 1500;
        let w = 1.0 / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            let u1 = (i as f64 + 0.5) * w;
            if u1 >= cutoff {
                total += (u1 - p1) * w;
                continue;
            }
            for j in 0..n {
                let u2 = (j as f64 + 0.5) * w;
                let (n1, n2) = (u1 - p1, u2 - p2);
                let v = if n1 < -r_s && n2 < -r_s {
                    -2.0 * r_s
                } else {
                    n1.max(n2) - r_s
                };
                total += (v - s) * w * w;
            }
        }
        total
    }

    #[test]
    fn free_search_at_zero_prices() {
        assert_abs_diff_eq!(consumer_surplus_at_cutoff(0.0, 0.0, 1.0, 0.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn surplus_matches_quadrature() {
        let a = av(0.75);
        for &(p1, p2) in &[(0.4464, 0.4737), (0.2, 0.5), (0.0, 0.1), (0.3, 0.3)] {
            let prices = PricePair::new(p1, p2, a);
            let cs = consumer_surplus(&prices, a, 1.0 / 32.0).unwrap();
            let quad = surplus_by_quadrature(p1, p2, prices.cutoff, 1.0 / 32.0, 0.0);
            assert_abs_diff_eq!(cs, quad, epsilon = 2e-5);
        }
    }

    #[test]
    fn surplus_with_consumer_cost_and_alpha_matches_quadrature() {
        let params = MarketParams::new(0.03, 0.2)
            .unwrap()
            .with_consumer_return_cost(0.04)
            .unwrap()
            .with_alpha(0.7)
            .unwrap();
        let a = params.reservation_value().unwrap();
        let prices = PricePair::new(0.25, 0.35, a);
        let cs = market_consumer_surplus(&prices, &params).unwrap();
        let quad = surplus_by_quadrature(0.25, 0.35, prices.cutoff, 0.03, 0.04);
        assert_abs_diff_eq!(cs, 0.7 * quad - 0.3 * 0.04, epsilon = 2e-5);
    }

    #[test]
    fn cutoff_is_surplus_maximising() {
        let (p1, p2, a, s) = (0.4464, 0.4737, 0.75, 1.0 / 32.0);
        let at = consumer_surplus_at_cutoff(p1, p2, a + p1 - p2, s).unwrap();
        for d in [-1e-3, 1e-3] {
            let off = consumer_surplus_at_cutoff(p1, p2, a + p1 - p2 + d, s).unwrap();
            assert!(off <= at + 1e-6);
        }
    }

    #[test]
    fn general_surplus_reduces_to_base() {
        let params = MarketParams::new(1.0 / 32.0, 0.1).unwrap();
        let a = params.reservation_value().unwrap();
        let prices = PricePair::new(0.4, 0.45, a);
        assert_eq!(
            market_consumer_surplus(&prices, &params).unwrap(),
            consumer_surplus(&prices, a, params.s).unwrap()
        );
    }

    #[test]
    fn surplus_rejects_invalid_prices() {
        let a = av(0.75);
        assert!(matches!(
            consumer_surplus(&PricePair::new(0.1, 0.8, a), a, 0.03),
            Err(ModelError::Precondition(_))
        ));
    }

    #[test]
    fn auction_examples() {
        let x = position_auction(&ProfitPair { pi1: 0.25, pi2: 0.18 });
        assert_abs_diff_eq!(x.revenue, 0.07, epsilon = 1e-15);
        assert!(!x.clipped);
        let x = position_auction(&ProfitPair { pi1: 0.2, pi2: 0.2 });
        assert_eq!(x.revenue, 0.0);
        let x = position_auction(&ProfitPair { pi1: 0.1, pi2: 0.2 });
        assert_eq!(x.revenue, 0.0);
        assert!(x.clipped);
    }

    #[test]
    fn decomposition_matches_profit_gap() {
        let a = av(0.75);
        let d = correlated_gap(0.8, 0.4, a, 0.2).unwrap();
        let params = MarketParams::from_reservation(0.75, 0.2).unwrap().with_alpha(0.8).unwrap();
        let gap = firm_profits(&PricePair::symmetric(0.4, a), &params).unwrap().gap();
        assert_abs_diff_eq!(d.total(), gap, epsilon = 1e-12);

        let d1 = correlated_gap(1.0, 0.4, a, 0.2).unwrap();
        assert_eq!(d1.direct, 0.0);
        let base = MarketParams::from_reservation(0.75, 0.2).unwrap();
        let gap = firm_profits(&PricePair::symmetric(0.4, a), &base).unwrap().gap();
        assert_abs_diff_eq!(d1.total(), gap, epsilon = 1e-12);
    }

    #[test]
    fn gap_falls_as_matches_become_correlated() {
        let a = av(0.75);
        let mut last = f64::INFINITY;
        for i in (1..=20).rev() {
            let g = correlated_gap(i as f64 / 20.0, 0.4, a, 0.2).unwrap().total();
            assert!(g < last);
            last = g;
        }
    }

    #[test]
    fn allocation_channels_at_high_search_cost() {
        let params = MarketParams::new(0.115, 0.3).unwrap();
        let g = allocation_gradient(&params, 1e-4, &SolverOptions::default()).unwrap();
        assert!(g.firm_cost_channel > 0.0);
        assert!(g.demand_channel > 0.0);
        assert!(g.gradient > 0.0, "gradient {}", g.gradient);
    }

    #[test]
    fn allocation_rejects_bad_inputs() {
        let opts = SolverOptions::default();
        let params = MarketParams::new(0.1, 0.0).unwrap();
        assert!(allocation_gradient(&params, 1e-4, &opts).is_err());
        let params = MarketParams::new(0.12, 0.3).unwrap();
        assert!(allocation_gradient(&params, 0.01, &opts).is_err());
    }
}
