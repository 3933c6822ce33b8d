//! Numerically located boundaries that have no closed form.

use super::{
    solve_equilibrium_observable, solve_equilibrium_unobservable, thresholds, SolverOptions,
};
use crate::error::{ModelError, Result};
use crate::model::{MarketParams, ReservationValue};

const R_TOL: f64 = 1e-12;

fn bisect(mut lo: f64, mut hi: f64, mut upper: impl FnMut(f64) -> Result<bool>) -> Result<f64> {
    // `upper(x)` is true on the right part of the bracket.
    while hi - lo > R_TOL {
        let mid = 0.5 * (lo + hi);
        if upper(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Equilibrium profit gap `pi1 - pi2` of the unobservable-price game.
pub fn equilibrium_gap(params: &MarketParams, opts: &SolverOptions) -> Result<f64> {
    Ok(solve_equilibrium_unobservable(params, opts)?.profits.gap())
}

/// Smallest return cost at which the prominent firm's equilibrium price is
/// zero (unobservable game, no consumer-borne cost).
pub fn locate_prominent_exit(a: ReservationValue, opts: &SolverOptions) -> Result<f64> {
    let hi = thresholds(a).r_corner;
    bisect(0.0, hi, |r| {
        let params = MarketParams::from_reservation(a.value(), r)?;
        Ok(solve_equilibrium_unobservable(&params, opts)?.prices.p1 == 0.0)
    })
}

/// Return cost at which the equilibrium gap turns negative, bracketed by
/// `[(1 - a)^2, r_bar]`.
pub fn locate_disadvantage_onset(a: ReservationValue, opts: &SolverOptions) -> Result<f64> {
    let t = thresholds(a);
    let gap = |r: f64| equilibrium_gap(&MarketParams::from_reservation(a.value(), r)?, opts);
    let (g_lo, g_hi) = (gap(t.r_low)?, gap(t.r_bar)?);
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(ModelError::SolverFailure(format!(
            "gap does not change sign on [{}, {}] (values {g_lo}, {g_hi})",
            t.r_low, t.r_bar
        )));
    }
    bisect(t.r_low, t.r_bar, |r| Ok(gap(r)? < 0.0))
}

/// Return cost at which the observable-game price of firm 2 stops falling and
/// starts rising. `None` if the slope does not change sign on `[0, 1 - a]`.
pub fn locate_observable_price_turn(
    a: ReservationValue,
    opts: &SolverOptions,
) -> Result<Option<f64>> {
    let top = 1.0 - a.value();
    let p2 = |r: f64| -> Result<f64> {
        let params = MarketParams::from_reservation(a.value(), r.clamp(0.0, top))?;
        Ok(solve_equilibrium_observable(&params, opts)?.prices.p2)
    };
    let step = 1e-5;
    let slope = |r: f64| -> Result<f64> {
        let (lo, hi) = ((r - step).max(0.0), (r + step).min(top));
        Ok((p2(hi)? - p2(lo)?) / (hi - lo))
    };
    if !(slope(0.0)? < 0.0 && slope(top)? > 0.0) {
        return Ok(None);
    }
    // The slope is differenced on a 1e-5 scale; refine no further than that.
    let mut lo = 0.0;
    let mut hi = top;
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if slope(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
