//! Price equilibria of the pricing stage.
//!
//! Two information structures are covered:
//!
//! * [`unobservable`]: consumers learn a price only after inspecting the
//!   product, so firm 2 cannot move the search cutoff with its own price;
//! * [`observable`]: both prices are posted up front and firm 2's price
//!   enters the cutoff `a + p1 - p2`.
//!
//! Both games are solved by damped best-response iteration. If that fails
//! the composed map `p2 -> BR2(BR1(p2))` is bisected instead.

pub mod boundaries;
pub mod observable;
pub mod unobservable;

pub use boundaries::{
    equilibrium_gap, locate_disadvantage_onset, locate_observable_price_turn, locate_prominent_exit,
};
pub use observable::{
    best_response_obs_nonprominent, best_response_obs_prominent, solve_equilibrium_observable,
    solve_equilibrium_observable_from,
};
pub use unobservable::{
    best_response_nonprominent, best_response_prominent, solve_equilibrium_unobservable,
    solve_equilibrium_unobservable_from,
};

use std::fmt;

use crate::error::{ModelError, Result};
use crate::model::{firm_profits, MarketParams, PricePair, ProfitPair, ReservationValue};

/// Which information structure the pricing game is played under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PriceVisibility {
    Unobservable,
    Observable,
}

impl fmt::Display for PriceVisibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PriceVisibility::Unobservable => "unobservable",
            PriceVisibility::Observable => "observable",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    BothPositive,
    ProminentAtZero,
    BothZero,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::BothPositive => "BothPositive",
            Regime::ProminentAtZero => "ProminentAtZero",
            Regime::BothZero => "BothZero",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    DampedIteration,
    ComposedBisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Largest accepted best-response residual.
    pub tol: f64,
    pub max_iterations: usize,
    /// Weight on the new best response in each damped step.
    pub damping: f64,
    /// Prices below this are reported as exactly zero.
    pub zero_snap: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iterations: 10_000,
            damping: 0.5,
            zero_snap: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumResult {
    pub prices: PricePair,
    pub regime: Regime,
    pub profits: ProfitPair,
    /// Max absolute best-response residual at the reported prices.
    pub residual: f64,
    pub iterations: usize,
    pub method: SolveMethod,
}

/// Closed-form cost thresholds, all functions of the reservation value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Stated unobservable-game cost at which firm 1's price reaches zero,
    /// `(1 - 2a + sqrt(4a^2 - 4a + 9)) / 4`.
    pub r_bar: f64,
    /// Cost from which both unobservable prices are zero, `1 - a/2`.
    pub r_corner: f64,
    /// Cost up to which firm 1 earns more than firm 2, `(1 - a)^2`.
    pub r_low: f64,
    /// Observable-game cost up to which both prices stay below the monopoly
    /// price, `3 - 2 sqrt(-a^2 + 2a + 1)`.
    pub r_bar_obs: f64,
    /// Observable-game cost at which the price ranking flips, `(1 - a)^2`.
    pub r_bar_p: f64,
    /// Common observable price at the flip, `-1 + sqrt(-a^2 + 2a + 1)`.
    pub p_under: f64,
}

pub fn thresholds(a: ReservationValue) -> Thresholds {
    let a = a.value();
    let obs_root = (-a * a + 2.0 * a + 1.0).sqrt();
    Thresholds {
        r_bar: (1.0 - 2.0 * a + (4.0 * a * a - 4.0 * a + 9.0).sqrt()) / 4.0,
        r_corner: 1.0 - a / 2.0,
        r_low: (1.0 - a).powi(2),
        r_bar_obs: 3.0 - 2.0 * obs_root,
        r_bar_p: (1.0 - a).powi(2),
        p_under: -1.0 + obs_root,
    }
}

/// Regime implied by a price pair whose zero prices have been snapped.
pub fn classify_regime(p1: f64, p2: f64) -> Result<Regime> {
    match (p1 == 0.0, p2 == 0.0) {
        (false, false) => Ok(Regime::BothPositive),
        (true, false) => Ok(Regime::ProminentAtZero),
        (true, true) => Ok(Regime::BothZero),
        (false, true) => Err(ModelError::SolverFailure(format!(
            "non-prominent price is zero while p1 = {p1}"
        ))),
    }
}

/// Common driver: damped Jacobi iteration on the two best responses with a
/// bisection fallback on the composed map.
pub(crate) struct BestResponses<'a> {
    pub br1: &'a dyn Fn(f64) -> Result<f64>,
    pub br2: &'a dyn Fn(f64) -> Result<f64>,
    /// Upper end of the bracket for the fallback bisection on `p2`.
    pub p2_hi: f64,
}

impl BestResponses<'_> {
    fn residual(&self, p1: f64, p2: f64) -> Result<f64> {
        Ok(((self.br1)(p2)? - p1).abs().max(((self.br2)(p1)? - p2).abs()))
    }

    fn damped(&self, start: (f64, f64), opts: &SolverOptions) -> Result<(f64, f64, usize)> {
        let (mut p1, mut p2) = start;
        // Converge well below the reporting tolerance so snapping tiny prices
        // to zero cannot push the final residual over it.
        let inner_tol = opts.tol * 1e-2;
        let mut residual = f64::INFINITY;
        for iter in 0..opts.max_iterations {
            let b1 = (self.br1)(p2)?;
            let b2 = (self.br2)(p1)?;
            residual = (b1 - p1).abs().max((b2 - p2).abs());
            if residual <= inner_tol {
                return Ok((p1, p2, iter));
            }
            p1 += opts.damping * (b1 - p1);
            p2 += opts.damping * (b2 - p2);
        }
        Err(ModelError::NonConvergence {
            iterations: opts.max_iterations,
            residual,
        })
    }

    fn composed_bisection(&self) -> Result<(f64, f64, usize)> {
        let phi = |p2: f64| -> Result<f64> { Ok((self.br2)((self.br1)(p2)?)? - p2) };
        let (mut lo, mut hi) = (0.0, self.p2_hi);
        if phi(lo)? <= 0.0 {
            let p1 = (self.br1)(0.0)?;
            return Ok((p1, 0.0, 0));
        }
        if phi(hi)? > 0.0 {
            return Err(ModelError::SolverFailure(format!(
                "composed best response has no sign change on [0, {hi}]"
            )));
        }
        let mut iterations = 0;
        while hi - lo > f64::EPSILON && iterations < 200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        let p2 = 0.5 * (lo + hi);
        Ok(((self.br1)(p2)?, p2, iterations))
    }

    pub(crate) fn solve(
        &self,
        start: (f64, f64),
        opts: &SolverOptions,
    ) -> Result<(f64, f64, f64, usize, SolveMethod)> {
        let (p1, p2, iterations, method) = match self.damped(start, opts) {
            Ok((p1, p2, it)) => (p1, p2, it, SolveMethod::DampedIteration),
            Err(ModelError::NonConvergence { .. }) => {
                let (p1, p2, it) = self.composed_bisection()?;
                (p1, p2, it, SolveMethod::ComposedBisection)
            }
            Err(e) => return Err(e),
        };
        let unsnapped = (p1, p2);
        let snap = |p: f64| if p.abs() < opts.zero_snap { 0.0 } else { p };
        let (mut p1, mut p2) = (snap(p1), snap(p2));
        let mut residual = self.residual(p1, p2)?;
        if residual > opts.tol && (p1, p2) != unsnapped {
            // A genuinely tiny price near a regime boundary; keep it.
            (p1, p2) = unsnapped;
            residual = self.residual(p1, p2)?;
        }
        if residual > opts.tol {
            return Err(ModelError::NonConvergence {
                iterations,
                residual,
            });
        }
        Ok((p1, p2, residual, iterations, method))
    }
}

pub(crate) fn finish(
    params: &MarketParams,
    a: ReservationValue,
    solved: (f64, f64, f64, usize, SolveMethod),
) -> Result<EquilibriumResult> {
    let (p1, p2, residual, iterations, method) = solved;
    let prices = PricePair::new(p1, p2, a);
    Ok(EquilibriumResult {
        prices,
        regime: classify_regime(p1, p2)?,
        profits: firm_profits(&prices, params)?,
        residual,
        iterations,
        method,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn threshold_values() {
        let t = thresholds(ReservationValue::new(0.75).unwrap());
        assert_abs_diff_eq!(t.r_bar_p, 0.0625, epsilon = 1e-15);
        assert_abs_diff_eq!(t.r_low, 0.0625, epsilon = 1e-15);
        assert_abs_diff_eq!(t.r_corner, 0.625, epsilon = 1e-15);
        assert_abs_diff_eq!(t.r_bar, (-0.5 + 8.25f64.sqrt()) / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.p_under, -1.0 + 1.9375f64.sqrt(), epsilon = 1e-15);
        assert!(t.r_bar_obs < 0.25);
    }

    #[test]
    fn threshold_limits() {
        let lo = thresholds(ReservationValue::new(0.5 + 1e-9).unwrap());
        assert_abs_diff_eq!(lo.r_bar, 2f64.sqrt() / 2.0, epsilon = 1e-8);
        let hi = thresholds(ReservationValue::new(1.0 - 1e-9).unwrap());
        assert_abs_diff_eq!(hi.r_bar, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn threshold_orderings() {
        for i in 1..100 {
            let a = 0.5 + 0.5 * i as f64 / 100.0;
            let t = thresholds(ReservationValue::new(a).unwrap());
            assert!(t.r_bar > 0.5 && t.r_bar < 2f64.sqrt() / 2.0);
            assert!(t.r_low < t.r_bar);
            // The observable bound sits inside [0, 1 - a] only for a < 4/5.
            assert_eq!(t.r_bar_obs < 1.0 - a, a < 0.8, "a = {a}");
            assert!(t.p_under > 0.0);
        }
    }

    #[test]
    fn regime_labels() {
        assert_eq!(classify_regime(0.1, 0.2).unwrap(), Regime::BothPositive);
        assert_eq!(classify_regime(0.0, 0.2).unwrap(), Regime::ProminentAtZero);
        assert_eq!(classify_regime(0.0, 0.0).unwrap(), Regime::BothZero);
        assert!(classify_regime(0.1, 0.0).is_err());
    }
}
