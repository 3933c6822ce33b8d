//! Pricing game with prices revealed only on inspection.

use super::{finish, BestResponses, EquilibriumResult, SolverOptions};
use crate::error::{ModelError, Result};
use crate::model::{MarketParams, ReservationValue};

const SLACK: f64 = 1e-12;

fn check_price(p: f64, a: f64, name: &str) -> Result<()> {
    if !(p >= -SLACK && p <= a + SLACK) {
        return Err(ModelError::domain(format!(
            "{name} = {p} outside [0, a = {a}]"
        )));
    }
    Ok(())
}

/// Best response of the prominent firm to `p2`.
///
/// `r` is the total return cost and `r_s` the consumer's share of it.
pub fn best_response_prominent(p2: f64, a: ReservationValue, r: f64, r_s: f64) -> Result<f64> {
    let a = a.value();
    check_price(p2, a, "p2")?;
    let k1 = if r_s == 0.0 {
        (a * a - p2 * p2) / 2.0
    } else {
        a * a / 2.0 - (p2 - r_s).powi(2) / 2.0
    };
    Ok((0.5 * (1.0 - a - (r - r_s) + p2 + k1)).max(0.0))
}

/// Best response of the non-prominent firm to `p1`.
///
/// Solves `p2 = 1 - a - r' + k2/h2` by bisection; the left side minus the
/// right side is increasing in `p2`, so the root is unique. Returns zero when
/// the right side is already non-positive at `p2 = 0`.
pub fn best_response_nonprominent(p1: f64, a: ReservationValue, r: f64, r_s: f64) -> Result<f64> {
    let a = a.value();
    check_price(p1, a, "p1")?;
    let p1 = p1.max(0.0);
    let cost = r - r_s;
    let excess = |x: f64| {
        let ratio = 0.5 * (a - x + r_s) * (a - x + 2.0 * p1 - r_s) / (a + p1 - x);
        x - (1.0 - a - cost + ratio)
    };
    if excess(0.0) >= 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    // Keep the bracket strictly below the pole of k2/h2 at x = a + p1.
    let mut hi = ((1.0 - cost) / 2.0 + r_s).min(a + p1 - 1e-9);
    if !(excess(hi) >= 0.0) {
        return Err(ModelError::SolverFailure(format!(
            "no sign change for the firm-2 condition on [0, {hi}] (p1 = {p1}, a = {a}, r = {r})"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Unique equilibrium of the unobservable-price game.
pub fn solve_equilibrium_unobservable(
    params: &MarketParams,
    opts: &SolverOptions,
) -> Result<EquilibriumResult> {
    let start = params.monopoly_price() / 2.0;
    solve_equilibrium_unobservable_from(params, (start, start), opts)
}

/// Same as [`solve_equilibrium_unobservable`] with an explicit starting
/// point for the iteration.
pub fn solve_equilibrium_unobservable_from(
    params: &MarketParams,
    start: (f64, f64),
    opts: &SolverOptions,
) -> Result<EquilibriumResult> {
    params.validate()?;
    let a = params.reservation_value()?;
    let (r, r_s) = (params.r, params.r_s);
    let av = a.value();
    let clamp = |p: f64| p.clamp(0.0, av);
    let start = (clamp(start.0), clamp(start.1));
    let br1 = |p2: f64| best_response_prominent(clamp(p2), a, r, r_s);
    let br2 = |p1: f64| best_response_nonprominent(clamp(p1), a, r, r_s);
    let solved = BestResponses {
        br1: &br1,
        br2: &br2,
        p2_hi: ((1.0 - (r - r_s)) / 2.0 + r_s).min(av),
    }
    .solve(start, opts)?;
    finish(params, a, solved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{thresholds, Regime};
    use crate::model::firm_profits;
    use crate::model::PricePair;
    use approx::assert_abs_diff_eq;

    fn a(v: f64) -> ReservationValue {
        ReservationValue::new(v).unwrap()
    }

    // Direct grid maximisation of the closed-form profits, independent of the
    // first-order conditions.
    fn grid_argmax(f: impl Fn(f64) -> Option<f64>, hi: f64, n: usize) -> f64 {
        let mut best = (f64::NEG_INFINITY, 0.0);
        for i in 0..=n {
            let p = hi * i as f64 / n as f64;
            if let Some(v) = f(p) {
                if v > best.0 {
                    best = (v, p);
                }
            }
        }
        best.1
    }

    #[test]
    fn prominent_response_matches_grid() {
        let br = best_response_prominent(0.3, a(0.75), 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(br, 0.393125, epsilon = 1e-12);
        let params = MarketParams::from_reservation(0.75, 0.0).unwrap();
        let grid = grid_argmax(
            |p| {
                let prices = PricePair::new(p, 0.3, a(0.75));
                firm_profits(&prices, &params).ok().map(|x| x.pi1)
            },
            0.55,
            550_000,
        );
        assert_abs_diff_eq!(grid, br, epsilon = 2e-6);
    }

    #[test]
    fn prominent_response_corners() {
        assert_eq!(best_response_prominent(0.0, a(0.75), 1.0, 0.0).unwrap(), 0.0);
        // 1 - a - r + p2 + k1 < 0 at a high cost
        assert_eq!(best_response_prominent(0.05, a(0.75), 0.9, 0.0).unwrap(), 0.0);
        assert!(matches!(
            best_response_prominent(0.8, a(0.75), 0.0, 0.0),
            Err(ModelError::Domain(_))
        ));
    }

    #[test]
    fn nonprominent_response_matches_grid() {
        let (p1, r) = (0.3931, 0.1);
        let br = best_response_nonprominent(p1, a(0.75), r, 0.0).unwrap();
        // The cutoff is pinned by the conjectured price, so a deviation only
        // moves firm 2's share among the searchers u1 < h.
        let h = 0.75 + p1 - br;
        let grid = grid_argmax(
            |p| {
                let n = 2000;
                let mut q2 = 0.0;
                for j in 0..n {
                    let u1 = h * (j as f64 + 0.5) / n as f64;
                    let bar = (p + (u1 - p1).max(0.0)).clamp(0.0, 1.0);
                    q2 += (1.0 - bar) * h / n as f64;
                }
                Some(p * q2 - r * (h - q2))
            },
            0.6,
            60_000,
        );
        assert_abs_diff_eq!(grid, br, epsilon = 1e-4);
        let br0 = best_response_nonprominent(p1, a(0.75), 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(br0, 0.4715, epsilon = 1e-3);
    }

    #[test]
    fn nonprominent_response_zero_branch() {
        assert_eq!(best_response_nonprominent(0.0, a(0.75), 0.625, 0.0).unwrap(), 0.0);
        assert_eq!(best_response_nonprominent(0.2, a(0.75), 0.8, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn solves_base_example() {
        let params = MarketParams::from_reservation(0.75, 0.0).unwrap();
        let eq = solve_equilibrium_unobservable(&params, &SolverOptions::default()).unwrap();
        assert_eq!(eq.regime, Regime::BothPositive);
        assert_abs_diff_eq!(eq.prices.p1, 0.4464, epsilon = 1e-4);
        assert_abs_diff_eq!(eq.prices.p2, 0.4737, epsilon = 2e-4);
        assert!(eq.residual <= 1e-10);
    }

    #[test]
    fn prominent_price_zero_at_stated_threshold() {
        let r = thresholds(a(0.75)).r_bar;
        let params = MarketParams::from_reservation(0.75, r).unwrap();
        let eq = solve_equilibrium_unobservable(&params, &SolverOptions::default()).unwrap();
        assert_eq!(eq.regime, Regime::ProminentAtZero);
        assert_eq!(eq.prices.p1, 0.0);
        // With p1 = 0 the firm-2 condition reduces to p2 = (2 - a - 2r)/3.
        assert_abs_diff_eq!(eq.prices.p2, (2.0 - 0.75 - 2.0 * r) / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn both_zero_above_corner() {
        let params = MarketParams::from_reservation(0.75, 0.7).unwrap();
        let eq = solve_equilibrium_unobservable(&params, &SolverOptions::default()).unwrap();
        assert_eq!(eq.regime, Regime::BothZero);
        assert_eq!((eq.prices.p1, eq.prices.p2), (0.0, 0.0));
    }

    #[test]
    fn same_fixed_point_from_any_start() {
        let params = MarketParams::from_reservation(0.7, 0.2).unwrap();
        let opts = SolverOptions::default();
        let base = solve_equilibrium_unobservable(&params, &opts).unwrap();
        for &(x, y) in &[(0.0, 0.0), (0.7, 0.7), (0.0, 0.7), (0.7, 0.0), (0.33, 0.12)] {
            let eq = solve_equilibrium_unobservable_from(&params, (x, y), &opts).unwrap();
            assert_abs_diff_eq!(eq.prices.p1, base.prices.p1, epsilon = 1e-9);
            assert_abs_diff_eq!(eq.prices.p2, base.prices.p2, epsilon = 1e-9);
        }
    }

    #[test]
    fn consumer_cost_share_solves() {
        let params = MarketParams::new(0.05, 0.2)
            .unwrap()
            .with_consumer_return_cost(0.01)
            .unwrap();
        let eq = solve_equilibrium_unobservable(&params, &SolverOptions::default()).unwrap();
        assert_eq!(eq.regime, Regime::BothPositive);
        assert!(eq.prices.p1 > 0.01 && eq.prices.p2 > eq.prices.p1);
    }
}
