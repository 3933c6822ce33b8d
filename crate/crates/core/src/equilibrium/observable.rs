//! Pricing game with both prices posted before search.
//!
//! Firm 2 now moves the cutoff `a + p1 - p2`, which gives closed-form best
//! responses for both firms. Results hold for `r <= 1 - a` only.

use super::{finish, BestResponses, EquilibriumResult, SolverOptions};
use crate::error::{ModelError, Result};
use crate::model::{MarketParams, ReservationValue};

const SLACK: f64 = 1e-12;

fn check_cost(a: f64, r: f64) -> Result<()> {
    if !(r >= 0.0 && r <= 1.0 - a + SLACK) {
        return Err(ModelError::domain(format!(
            "observable-price game needs 0 <= r <= 1 - a (r = {r}, a = {a})"
        )));
    }
    Ok(())
}

pub fn best_response_obs_prominent(p2: f64, a: ReservationValue, r: f64) -> f64 {
    let a = a.value();
    (-p2 * p2 / 4.0 + p2 / 2.0 + 0.5 - a / 2.0 + a * a / 4.0 - r / 2.0).max(0.0)
}

/// Smaller root of firm 2's quadratic first-order condition.
pub fn best_response_obs_nonprominent(p1: f64, a: ReservationValue, r: f64) -> Result<f64> {
    let a = a.value();
    check_cost(a, r)?;
    let disc = 4.0 * p1 * p1 + 2.0 * p1 * (1.0 + r) + 3.0 * a * a - 6.0 * a + (r - 2.0).powi(2);
    if !(disc >= 0.0) {
        return Err(ModelError::SolverFailure(format!(
            "negative discriminant {disc} in the observable firm-2 condition"
        )));
    }
    Ok((2.0 + 2.0 * p1 - r - disc.sqrt()) / 3.0)
}

pub fn solve_equilibrium_observable(
    params: &MarketParams,
    opts: &SolverOptions,
) -> Result<EquilibriumResult> {
    let start = params.monopoly_price() / 2.0;
    solve_equilibrium_observable_from(params, (start, start), opts)
}

pub fn solve_equilibrium_observable_from(
    params: &MarketParams,
    start: (f64, f64),
    opts: &SolverOptions,
) -> Result<EquilibriumResult> {
    params.validate()?;
    if params.r_s != 0.0 {
        return Err(ModelError::domain(
            "observable-price game is defined without a consumer return cost",
        ));
    }
    let a = params.reservation_value()?;
    let r = params.r;
    check_cost(a.value(), r)?;
    let br1 = |p2: f64| Ok(best_response_obs_prominent(p2.clamp(0.0, 1.0), a, r));
    let br2 = |p1: f64| best_response_obs_nonprominent(p1.max(0.0), a, r);
    let solved = BestResponses {
        br1: &br1,
        br2: &br2,
        p2_hi: 1.0,
    }
    .solve((start.0.max(0.0), start.1.max(0.0)), opts)?;
    finish(params, a, solved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::{thresholds, Regime};
    use approx::assert_abs_diff_eq;

    fn a(v: f64) -> ReservationValue {
        ReservationValue::new(v).unwrap()
    }

    // Observable profits by direct integration over u1 (r_s = 0, alpha = 1).
    fn profits(p1: f64, p2: f64, a: f64, r: f64) -> (f64, f64) {
        let h = (a + p1 - p2).min(1.0);
        let n = 4000;
        let (mut q1, mut q2) = (1.0 - h, 0.0);
        for j in 0..n {
            let u1 = h * (j as f64 + 0.5) / n as f64;
            let w = h / n as f64;
            if u1 >= p1 {
                q1 += w * (u1 - p1 + p2).clamp(0.0, 1.0);
            }
            q2 += w * (1.0 - (p2 + (u1 - p1).max(0.0)).clamp(0.0, 1.0));
        }
        (p1 * q1 - r * (1.0 - q1), p2 * q2 - r * (h - q2))
    }

    fn argmax(f: impl Fn(f64) -> f64, hi: f64, n: usize) -> f64 {
        (0..=n)
            .map(|i| hi * i as f64 / n as f64)
            .fold((f64::NEG_INFINITY, 0.0), |best, p| {
                let v = f(p);
                if v > best.0 {
                    (v, p)
                } else {
                    best
                }
            })
            .1
    }

    #[test]
    fn prominent_response_values() {
        assert_abs_diff_eq!(best_response_obs_prominent(0.0, a(0.75), 0.0), 0.265625, epsilon = 1e-15);
        let br = best_response_obs_prominent(0.3962, a(0.75), 0.0);
        assert_abs_diff_eq!(br, 0.42446, epsilon = 1e-4);
        let grid = argmax(|p| profits(p, 0.3962, 0.75, 0.0).0, 0.6, 6000);
        assert_abs_diff_eq!(grid, br, epsilon = 2e-4);
        // zero crossing of the expression at p2 = 0
        let r0 = (1.0 + 0.0625) / 2.0;
        assert_abs_diff_eq!(best_response_obs_prominent(0.0, a(0.75), r0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn nonprominent_response_values() {
        let br0 = best_response_obs_nonprominent(0.0, a(0.75), 0.0).unwrap();
        assert_abs_diff_eq!(br0, (2.0 - 1.1875f64.sqrt()) / 3.0, epsilon = 1e-15);
        let br = best_response_obs_nonprominent(0.4245, a(0.75), 0.0).unwrap();
        assert_abs_diff_eq!(br, 0.39616, epsilon = 1e-4);
        let grid = argmax(|p| profits(0.4245, p, 0.75, 0.0).1, 0.75, 7500);
        assert_abs_diff_eq!(grid, br, epsilon = 2e-4);
        // Positive against a monopoly-priced rival (it may exceed that price).
        for &(av, r) in &[(0.6, 0.3), (0.9, 0.05), (0.75, 0.25)] {
            let pm = (1.0 - r) / 2.0;
            assert!(best_response_obs_nonprominent(pm, a(av), r).unwrap() > 0.0);
        }
        assert!(matches!(
            best_response_obs_nonprominent(0.2, a(0.75), 0.3),
            Err(ModelError::Domain(_))
        ));
    }

    #[test]
    fn solves_examples() {
        let opts = SolverOptions::default();
        let eq = solve_equilibrium_observable(&MarketParams::from_reservation(0.75, 0.0).unwrap(), &opts)
            .unwrap();
        assert_abs_diff_eq!(eq.prices.p1, 0.42446, epsilon = 1e-5);
        assert_abs_diff_eq!(eq.prices.p2, 0.39616, epsilon = 1e-5);
        assert_eq!(eq.regime, Regime::BothPositive);

        let t = thresholds(a(0.75));
        let eq = solve_equilibrium_observable(
            &MarketParams::from_reservation(0.75, t.r_bar_p).unwrap(),
            &opts,
        )
        .unwrap();
        assert_abs_diff_eq!(eq.prices.p1, t.p_under, epsilon = 1e-9);
        assert_abs_diff_eq!(eq.prices.p2, t.p_under, epsilon = 1e-9);

        let eq = solve_equilibrium_observable(&MarketParams::from_reservation(0.75, 0.2).unwrap(), &opts)
            .unwrap();
        assert!(eq.prices.p1 < eq.prices.p2);
    }

    #[test]
    fn rejects_outside_proven_region() {
        let opts = SolverOptions::default();
        let p = MarketParams::from_reservation(0.75, 0.3).unwrap();
        assert!(matches!(solve_equilibrium_observable(&p, &opts), Err(ModelError::Domain(_))));
        let p = MarketParams::new(0.03, 0.1)
            .unwrap()
            .with_consumer_return_cost(0.01)
            .unwrap();
        assert!(matches!(solve_equilibrium_observable(&p, &opts), Err(ModelError::Domain(_))));
    }
}
