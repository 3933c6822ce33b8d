//! Brute-force best responses on a price grid.
//!
//! Profits come from [`integrated_profits`], so nothing here relies on the
//! first-order conditions. Ties in the argmax go to the lowest price.

use crate::equilibrium::PriceVisibility;
use crate::error::{ModelError, Result};
use crate::model::{MarketParams, PricePair};

use super::demand::integrated_profits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Firm {
    Prominent,
    NonProminent,
}

/// Upper end of the search grid. Observable-game prices can exceed the
/// monopoly price, so that game is searched up to `a`.
fn grid_top(params: &MarketParams, mode: PriceVisibility, a: f64) -> f64 {
    match mode {
        PriceVisibility::Unobservable => (1.0 - params.firm_return_cost()) / 2.0 + params.r_s,
        PriceVisibility::Observable => a,
    }
}

fn argmax_on_grid(top: f64, step: f64, f: impl Fn(f64) -> f64) -> f64 {
    let n = (top / step + 1e-9).floor() as u64;
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=n {
        let p = i as f64 * step;
        let v = f(p);
        if v > best.0 {
            best = (v, p);
        }
    }
    best.1
}

struct Grid<'a> {
    params: &'a MarketParams,
    mode: PriceVisibility,
    a: f64,
    step: f64,
    top: f64,
}

impl Grid<'_> {
    fn new(params: &MarketParams, mode: PriceVisibility, step: f64) -> Result<Grid<'_>> {
        params.validate()?;
        if !(step > 0.0) {
            return Err(ModelError::precondition(format!("grid step {step} must be positive")));
        }
        let a = params.reservation_value()?.value();
        Ok(Grid {
            params,
            mode,
            a,
            step,
            top: grid_top(params, mode, a),
        })
    }

    fn snap(&self, p: f64) -> f64 {
        ((p / self.step).round() * self.step).clamp(0.0, self.top)
    }

    fn prominent(&self, p2: f64) -> f64 {
        argmax_on_grid(self.top, self.step, |p| {
            integrated_profits(p, p2, self.a + p - p2, self.params).pi1
        })
    }

    /// Firm 2's best price when consumers expect it to charge `conjecture`.
    fn nonprominent_given(&self, p1: f64, conjecture: f64) -> f64 {
        match self.mode {
            PriceVisibility::Observable => argmax_on_grid(self.top, self.step, |p| {
                integrated_profits(p1, p, self.a + p1 - p, self.params).pi2
            }),
            PriceVisibility::Unobservable => {
                let cutoff = self.a + p1 - conjecture;
                argmax_on_grid(self.top, self.step, |p| {
                    integrated_profits(p1, p, cutoff, self.params).pi2
                })
            }
        }
    }

    /// Unobservable firm 2: iterate the conjecture until the best response
    /// confirms it. A 2-cycle between neighbours returns the lower price.
    fn nonprominent_consistent(&self, p1: f64) -> Result<f64> {
        let mut conj = self.snap(self.top / 2.0);
        let mut seen = vec![conj];
        for _ in 0..10_000 {
            let next = self.nonprominent_given(p1, conj);
            if next == conj {
                return Ok(conj);
            }
            if let Some(pos) = seen.iter().position(|&x| x == next) {
                return Ok(seen[pos..].iter().copied().fold(f64::INFINITY, f64::min));
            }
            seen.push(next);
            conj = next;
        }
        Err(ModelError::GridCycle { step: self.step })
    }
}

/// Grid maximiser of one firm's profit against a fixed rival price.
pub fn grid_best_response(
    opponent: f64,
    firm: Firm,
    mode: PriceVisibility,
    params: &MarketParams,
    step: f64,
) -> Result<f64> {
    let grid = Grid::new(params, mode, step)?;
    match (firm, mode) {
        (Firm::Prominent, _) => Ok(grid.prominent(opponent)),
        (Firm::NonProminent, PriceVisibility::Observable) => Ok(grid.nonprominent_given(opponent, 0.0)),
        (Firm::NonProminent, PriceVisibility::Unobservable) => grid.nonprominent_consistent(opponent),
    }
}

/// Alternate grid best responses until neither firm moves. On a cycle the
/// step is halved, up to three times.
pub fn grid_equilibrium(params: &MarketParams, mode: PriceVisibility, step: f64) -> Result<PricePair> {
    let mut step = step;
    let mut start = None;
    for _ in 0..4 {
        let grid = Grid::new(params, mode, step)?;
        let (mut p1, mut p2) = match start {
            Some((x, y)) => (grid.snap(x), grid.snap(y)),
            None => (grid.snap(grid.top / 2.0), grid.snap(grid.top / 2.0)),
        };
        let mut history = vec![(p1, p2)];
        let mut cycled = false;
        for _ in 0..10_000 {
            let n1 = grid.prominent(p2);
            // In the unobservable game the cutoff follows the current
            // conjecture p2, which is confirmed at a fixed point.
            let n2 = grid.nonprominent_given(n1, p2);
            if (n1, n2) == (p1, p2) {
                let a = params.reservation_value()?;
                return Ok(PricePair::new(n1, n2, a));
            }
            if history.contains(&(n1, n2)) {
                cycled = true;
                break;
            }
            history.push((n1, n2));
            (p1, p2) = (n1, n2);
        }
        if !cycled {
            return Err(ModelError::NonConvergence {
                iterations: 10_000,
                residual: f64::NAN,
            });
        }
        start = Some((p1, p2));
        step /= 2.0;
    }
    Err(ModelError::GridCycle { step: step * 2.0 })
}

/// Largest profit gain from a unilateral deviation to any of `points`
/// evenly spaced prices, for firm 1 and firm 2.
pub fn deviation_gains(
    params: &MarketParams,
    mode: PriceVisibility,
    prices: &PricePair,
    points: usize,
) -> Result<(f64, f64)> {
    if points < 2 {
        return Err(ModelError::precondition("deviation scan needs at least two points"));
    }
    let grid = Grid::new(params, mode, 1.0)?;
    let (a, p1, p2) = (grid.a, prices.p1, prices.p2);
    let here = integrated_profits(p1, p2, a + p1 - p2, params);
    let mut gain = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for i in 0..points {
        let p = grid.top * i as f64 / (points - 1) as f64;
        let d1 = integrated_profits(p, p2, a + p - p2, params).pi1 - here.pi1;
        let cutoff2 = match mode {
            PriceVisibility::Observable => a + p1 - p,
            PriceVisibility::Unobservable => a + p1 - p2,
        };
        let d2 = integrated_profits(p1, p, cutoff2, params).pi2 - here.pi2;
        gain = (gain.0.max(d1), gain.1.max(d2));
    }
    Ok(gain)
}
