//! Property suites run by `prominence verify` and by the acceptance tests.
//!
//! Each check compares the closed forms and solvers against an independent
//! route (simulation, grid search, quadrature) or against a qualitative
//! property of the model, and reports a one-line result.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equilibrium::{
    locate_disadvantage_onset, locate_observable_price_turn, locate_prominent_exit,
    solve_equilibrium_observable, solve_equilibrium_unobservable, thresholds, EquilibriumResult,
    PriceVisibility, Regime, SolverOptions,
};
use crate::error::Result;
use crate::model::{
    exogenous_gap, firm_profits, region_masses, MarketParams, PricePair, ReservationValue,
};
use crate::oracle::{deviation_gains, grid_equilibrium, simulate_market};
use crate::welfare::{
    allocation_gradient, allocation_sign_sweep, consumer_surplus_at_cutoff, correlated_gap,
    market_consumer_surplus, position_auction,
};

/// Draws per Monte Carlo comparison.
pub const MC_DRAWS: u64 = 1_000_000;
/// Statistics allowed outside three standard errors in one comparison batch.
pub const MC_ALLOWED_OUTLIERS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: &str, r: Result<Check>) -> Check {
        r.unwrap_or_else(|e| Check::new(name, false, format!("error: {e}")))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "pass" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Partition,
    Oracle,
    Ordering,
    Monotonicity,
    ProminenceSign,
    Cs,
    Allocation,
    Observable,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Partition,
        Suite::Oracle,
        Suite::Ordering,
        Suite::Monotonicity,
        Suite::ProminenceSign,
        Suite::Cs,
        Suite::Allocation,
        Suite::Observable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Partition => "partition",
            Suite::Oracle => "oracle",
            Suite::Ordering => "ordering",
            Suite::Monotonicity => "monotonicity",
            Suite::ProminenceSign => "prominence-sign",
            Suite::Cs => "cs",
            Suite::Allocation => "allocation",
            Suite::Observable => "observable",
        }
    }

    /// The model result each suite checks.
    pub fn title(self) -> &'static str {
        match self {
            Suite::Partition => "consumer outcomes partition the market",
            Suite::Oracle => "closed-form profits, surplus and equilibria match independent oracles",
            Suite::Ordering => "price ranking of the prominent and non-prominent firm",
            Suite::Monotonicity => "price regimes as the return cost rises",
            Suite::ProminenceSign => "return costs turn prominence into a disadvantage",
            Suite::Cs => "welfare and auction revenue as the return cost rises",
            Suite::Allocation => "shifting return cost onto consumers widens the gap",
            Suite::Observable => "comparative statics with observable prices",
        }
    }

    pub fn parse(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "pass" } else { "FAIL" };
        writeln!(f, "suite {} [{tag}]: {}", self.suite.name(), self.suite.title())?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        Ok(())
    }
}

/// Search costs used for the qualitative sweeps when none is given.
pub const DEFAULT_SEARCH_COSTS: [f64; 2] = [1.0 / 16.0, 1.0 / 128.0];

pub fn run_suite(suite: Suite, seed: u64, s: Option<f64>) -> SuiteReport {
    let costs: Vec<f64> = match s {
        Some(s) => vec![s],
        None => DEFAULT_SEARCH_COSTS.to_vec(),
    };
    let mut checks = Vec::new();
    match suite {
        Suite::Partition => checks.extend(partition_checks(seed)),
        Suite::Oracle => {
            checks.extend(profit_oracle_checks(seed));
            checks.extend(grid_equilibrium_checks(seed));
        }
        Suite::Ordering => checks.extend(ordering_checks(&costs)),
        Suite::Monotonicity => checks.extend(regime_checks(&costs)),
        Suite::ProminenceSign => {
            checks.extend(exogenous_gap_checks(seed));
            checks.extend(gap_profile_checks(&costs));
            checks.extend(correlated_checks(seed));
        }
        Suite::Cs => checks.extend(corollary_checks(&costs)),
        Suite::Allocation => checks.extend(allocation_checks()),
        Suite::Observable => checks.extend(observable_checks(&costs)),
    }
    SuiteReport { suite, checks }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn res_a(s: f64) -> Result<ReservationValue> {
    crate::model::reservation_value(s, 0.0)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// `|est - exact| > 3 se`, treating a zero standard error as exact.
fn outside(est: f64, exact: f64, se: f64) -> bool {
    (est - exact).abs() > (3.0 * se).max(1e-12)
}

/// Random admissible (prices, params) for the region masses.
fn sample_market(rng: &mut ChaCha8Rng) -> Result<(PricePair, MarketParams)> {
    let s = rng.gen_range(0.002..0.1);
    let r_s = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..(0.12 - s)) };
    let params = MarketParams::new(s, (r_s + 0.1).min(1.0))?.with_consumer_return_cost(r_s)?;
    let a = params.reservation_value()?;
    let av = a.value();
    let p2 = rng.gen_range(r_s..av);
    let p1 = rng.gen_range(r_s..av.min(1.0 - av + p2));
    Ok((PricePair::new(p1, p2, a), params))
}

/// Masses sum to one and match a simulated market.
pub fn partition_checks(seed: u64) -> Vec<Check> {
    let name = "region masses sum to one and match simulation";
    let run = || -> Result<Check> {
        let mut rng = rng(seed);
        let mut worst_sum = 0.0f64;
        let (mut stats, mut outliers) = (0usize, 0usize);
        for i in 0..50 {
            let (prices, params) = sample_market(&mut rng)?;
            let m = region_masses(&prices, params.reservation_value()?, params.r_s)?;
            worst_sum = worst_sum.max((m.total() - 1.0).abs());
            let sim = simulate_market(&prices, &params, MC_DRAWS, seed.wrapping_add(i))?;
            let (est, se) = (sim.masses.as_array(), sim.se.masses.as_array());
            for ((e, x), s) in est.iter().zip(m.as_array()).zip(se) {
                stats += 1;
                outliers += outside(*e, x, s) as usize;
            }
        }
        Ok(Check::new(
            name,
            worst_sum <= 1e-12 && outliers <= MC_ALLOWED_OUTLIERS,
            format!(
                "50 points, max |sum - 1| = {worst_sum:.1e}; {outliers}/{stats} masses beyond 3 se (allowed {MC_ALLOWED_OUTLIERS})"
            ),
        ))
    };
    vec![Check::from_result(name, run())]
}

/// Equilibrium profits and surplus against simulation.
pub fn profit_oracle_checks(seed: u64) -> Vec<Check> {
    let name = "equilibrium profits and surplus match simulation";
    let run = || -> Result<Check> {
        let mut rng = rng(seed ^ 0x5eed);
        let (mut stats, mut outliers) = (0usize, 0usize);
        for i in 0..20 {
            let s = rng.gen_range(0.002..0.12);
            let r = rng.gen_range(0.0..0.8);
            let params = MarketParams::new(s, r)?;
            let eq = solve_equilibrium_unobservable(&params, &opts())?;
            let cs = market_consumer_surplus(&eq.prices, &params)?;
            let sim = simulate_market(&eq.prices, &params, MC_DRAWS, seed.wrapping_add(1000 + i))?;
            for (est, exact, se) in [
                (sim.pi1, eq.profits.pi1, sim.se.pi1),
                (sim.pi2, eq.profits.pi2, sim.se.pi2),
                (sim.cs, cs, sim.se.cs),
            ] {
                stats += 1;
                outliers += outside(est, exact, se) as usize;
            }
        }
        Ok(Check::new(
            name,
            outliers <= MC_ALLOWED_OUTLIERS,
            format!("20 (s, r) points; {outliers}/{stats} statistics beyond 3 se (allowed {MC_ALLOWED_OUTLIERS})"),
        ))
    };
    vec![Check::from_result(name, run())]
}

fn solve(params: &MarketParams, mode: PriceVisibility) -> Result<EquilibriumResult> {
    match mode {
        PriceVisibility::Unobservable => solve_equilibrium_unobservable(params, &opts()),
        PriceVisibility::Observable => solve_equilibrium_observable(params, &opts()),
    }
}

/// Solver equilibria against grid best-response equilibria and a deviation
/// scan, in both games.
pub fn grid_equilibrium_checks(seed: u64) -> Vec<Check> {
    let step = 1e-4;
    let mut out = Vec::new();
    for mode in [PriceVisibility::Unobservable, PriceVisibility::Observable] {
        let name = format!("{mode} equilibrium matches grid best responses");
        let run = || -> Result<Check> {
            let mut rng = rng(seed ^ 0x9e1d);
            let (mut worst_price, mut worst_gain) = (0.0f64, f64::NEG_INFINITY);
            for _ in 0..20 {
                let a = rng.gen_range(0.55..0.95);
                let r = match mode {
                    PriceVisibility::Unobservable => rng.gen_range(0.0..0.8),
                    PriceVisibility::Observable => rng.gen_range(0.0..(1.0 - a)),
                };
                let params = MarketParams::from_reservation(a, r)?;
                let eq = solve(&params, mode)?;
                let grid = grid_equilibrium(&params, mode, step)?;
                worst_price = worst_price
                    .max((grid.p1 - eq.prices.p1).abs())
                    .max((grid.p2 - eq.prices.p2).abs());
                let (g1, g2) = deviation_gains(&params, mode, &eq.prices, 2000)?;
                worst_gain = worst_gain.max(g1).max(g2);
            }
            Ok(Check::new(
                &name,
                worst_price <= 2.0 * step && worst_gain <= 1e-6,
                format!("20 points; max price gap {worst_price:.2e} (tol 2e-4), max deviation gain {worst_gain:.2e} (tol 1e-6)"),
            ))
        };
        out.push(Check::from_result(&name, run()));
    }
    out
}

/// Prominent firm prices below its rival in the unobservable game; the
/// observable-game ranking flips at `(1 - a)^2`.
pub fn ordering_checks(costs: &[f64]) -> Vec<Check> {
    let mut out = Vec::new();
    for &s in costs {
        let name = format!("unobservable: p1 < p2 whenever p2 > 0 (s = {s})");
        let run = || -> Result<Check> {
            let mut bad = Vec::new();
            for r in linspace(0.0, 1.0, 200) {
                let eq = solve_equilibrium_unobservable(&MarketParams::new(s, r)?, &opts())?;
                if eq.prices.p2 > 0.0 && !(eq.prices.p1 < eq.prices.p2) {
                    bad.push(r);
                }
            }
            Ok(Check::new(&name, bad.is_empty(), format!("200-point r grid, {} violations", bad.len())))
        };
        out.push(Check::from_result(&name, run()));

        let name = format!("observable: sign(p1 - p2) = sign((1 - a)^2 - r) (s = {s})");
        let run = || -> Result<Check> {
            let a = res_a(s)?.value();
            let flip = (1.0 - a).powi(2);
            let mut bad = 0;
            let diff = |r: f64| -> Result<f64> {
                let eq = solve_equilibrium_observable(&MarketParams::new(s, r)?, &opts())?;
                Ok(eq.prices.p1 - eq.prices.p2)
            };
            for r in linspace(0.0, 1.0 - a, 100) {
                let d = diff(r)?;
                let expected = flip - r;
                let ok = if expected.abs() < 1e-12 {
                    d.abs() < 1e-9
                } else {
                    d.signum() == expected.signum() && d != 0.0
                };
                bad += (!ok) as usize;
            }
            let (mut lo, mut hi) = (0.0, 1.0 - a);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if diff(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let root = 0.5 * (lo + hi);
            Ok(Check::new(
                &name,
                bad == 0 && (root - flip).abs() <= 1e-3,
                format!("100-point grid, {bad} violations; equal prices at r = {root:.6} vs (1-a)^2 = {flip:.6}"),
            ))
        };
        out.push(Check::from_result(&name, run()));
    }
    out
}

/// Price regimes along the return cost.
pub fn regime_checks(costs: &[f64]) -> Vec<Check> {
    let mut out = Vec::new();
    for &s in costs {
        let run = || -> Result<Vec<Check>> {
            let a = res_a(s)?;
            let t = thresholds(a);
            let exit = locate_prominent_exit(a, &opts())?;
            let grid = linspace(0.0, 1.0, 200);
            let eqs = grid
                .iter()
                .map(|&r| solve_equilibrium_unobservable(&MarketParams::new(s, r)?, &opts()))
                .collect::<Result<Vec<_>>>()?;
            let corner_bad = grid
                .iter()
                .zip(&eqs)
                .filter(|(&r, e)| r >= t.r_corner && e.regime != Regime::BothZero)
                .count();
            let rising = eqs
                .windows(2)
                .filter(|w| w[1].prices.p1 > w[0].prices.p1 || w[1].prices.p2 > w[0].prices.p2)
                .count();
            Ok(vec![
                Check::new(
                    format!("p1 reaches zero at the stated threshold (s = {s})"),
                    (exit - t.r_bar).abs() <= 1e-3,
                    format!("p1 first zero at r = {exit:.6}; stated threshold {:.6}; tol 1e-3", t.r_bar),
                ),
                Check::new(
                    format!("both prices zero for r >= 1 - a/2 (s = {s})"),
                    corner_bad == 0,
                    format!("corner at r = {:.6}; {corner_bad} grid points outside the corner", t.r_corner),
                ),
                Check::new(
                    format!("both prices non-increasing in r (s = {s})"),
                    rising == 0,
                    format!("200-point grid on [0, 1]; {rising} increases"),
                ),
            ])
        };
        match run() {
            Ok(c) => out.extend(c),
            Err(e) => out.push(Check::new(format!("price regimes (s = {s})"), false, format!("error: {e}"))),
        }
    }
    out
}

/// Exogenous common price: the gap changes sign at `(1 - a) p / a`.
pub fn exogenous_gap_checks(seed: u64) -> Vec<Check> {
    let name = "exogenous price: gap changes sign at (1 - a) p / a";
    let run = || -> Result<Check> {
        let mut rng = rng(seed ^ 0xe0);
        let (mut analytic_bad, mut sim_bad, mut worst) = (0usize, 0usize, 0.0f64);
        for i in 0..100 {
            let av = rng.gen_range(0.55..0.8);
            let p = rng.gen_range(0.2..0.5);
            let a = ReservationValue::new(av)?;
            let thr = exogenous_gap(p, a, 0.0)?.threshold;
            let g = |r: f64| -> Result<f64> {
                let params = MarketParams::from_reservation(av, r)?;
                Ok(firm_profits(&PricePair::symmetric(p, a), &params)?.gap())
            };
            worst = worst.max(g(thr)?.abs());
            let closed = exogenous_gap(p, a, thr)?.gap;
            if !(g(thr)?.abs() <= 1e-12
                && closed.abs() <= 1e-12
                && g(thr - 1e-9)? > 0.0
                && g(thr + 1e-9)? < 0.0)
            {
                analytic_bad += 1;
            }
            // One simulated market serves every r on the grid: outcomes do
            // not depend on r, so profits are linear in it (common random
            // numbers).
            let params = MarketParams::from_reservation(av, 0.0)?;
            let sim = simulate_market(&PricePair::symmetric(p, a), &params, MC_DRAWS, seed.wrapping_add(2000 + i))?;
            let searchers = 1.0 - sim.masses.d1n;
            let sim_gap = |r: f64| {
                (p * sim.q1 - r * (1.0 - sim.q1)) - (p * sim.q2 - r * (searchers - sim.q2))
            };
            let cells: Vec<f64> = (0..6).map(|k| thr * (0.25 + 0.5 * k as f64)).collect();
            let flips: Vec<usize> = cells
                .windows(2)
                .enumerate()
                .filter(|(_, w)| sim_gap(w[0]) > 0.0 && sim_gap(w[1]) <= 0.0)
                .map(|(k, _)| k)
                .collect();
            if flips != [1] {
                sim_bad += 1;
            }
        }
        Ok(Check::new(
            name,
            analytic_bad == 0 && sim_bad == 0,
            format!(
                "100 (p, a) points; analytic misses {analytic_bad} (max |gap| at threshold {worst:.1e}); simulated sign change outside the threshold cell {sim_bad}"
            ),
        ))
    };
    vec![Check::from_result(name, run())]
}

/// Gap along the return cost for fixed search costs.
pub fn gap_profile_checks(costs: &[f64]) -> Vec<Check> {
    let mut out = Vec::new();
    for &s in costs {
        let name = format!("gap falls in r and turns negative inside ((1-a)^2, r_bar) (s = {s})");
        let run = || -> Result<Check> {
            let a = res_a(s)?;
            let t = thresholds(a);
            let gap = |r: f64| -> Result<f64> {
                Ok(solve_equilibrium_unobservable(&MarketParams::new(s, r)?, &opts())?.profits.gap())
            };
            let gaps = linspace(0.0, t.r_bar, 200)
                .into_iter()
                .map(gap)
                .collect::<Result<Vec<_>>>()?;
            let rises = gaps.windows(2).filter(|w| !(w[1] < w[0])).count();
            let (g_low, g_bar) = (gap(t.r_low)?, gap(t.r_bar)?);
            let onset = locate_disadvantage_onset(a, &opts());
            let inside = matches!(onset, Ok(x) if x > t.r_low && x < t.r_bar);
            Ok(Check::new(
                &name,
                rises == 0 && g_low > 0.0 && g_bar < 0.0 && inside,
                format!(
                    "a = {:.6}; {rises} non-decreasing steps; gap({:.6}) = {g_low:.6}, gap({:.6}) = {g_bar:.6}; onset {}",
                    a.value(),
                    t.r_low,
                    t.r_bar,
                    match onset {
                        Ok(x) => format!("{x:.6}"),
                        Err(e) => e.to_string(),
                    }
                ),
            ))
        };
        out.push(Check::from_result(&name, run()));
    }
    out
}

/// Correlated match values: decomposition identity and the bit-exact base case.
pub fn correlated_checks(seed: u64) -> Vec<Check> {
    let name = "gap decomposition sums to the profit gap";
    let run = || -> Result<Vec<Check>> {
        let mut rng = rng(seed ^ 0xa1);
        let mut worst = 0.0f64;
        let mut exact = true;
        for _ in 0..50 {
            let alpha = rng.gen_range(0.01..=1.0);
            let av = rng.gen_range(0.55..0.95);
            let a = ReservationValue::new(av)?;
            let p = rng.gen_range(0.0..av);
            let r = rng.gen_range(0.0..1.0);
            let d = correlated_gap(alpha, p, a, r)?;
            let params = MarketParams::from_reservation(av, r)?.with_alpha(alpha)?;
            let prices = PricePair::symmetric(p, a);
            worst = worst.max((d.total() - firm_profits(&prices, &params)?.gap()).abs());

            // alpha = 1 against the base formulas written out directly.
            let base = MarketParams::from_reservation(av, r)?;
            let m = region_masses(&prices, a, 0.0)?;
            let pi = firm_profits(&prices, &base)?;
            let pi1 = (p + r) * (m.d1n + m.k1) - r;
            let pi2 = (p + r) * (m.d2r + m.k2) - r * (1.0 - m.d1n);
            exact &= pi.pi1 == pi1 && pi.pi2 == pi2;
        }
        Ok(vec![
            Check::new(name, worst <= 1e-12, format!("50 points; max |sum - gap| = {worst:.1e}")),
            Check::new(
                "alpha = 1 reproduces the base profits bit for bit",
                exact,
                "50 points compared with ==",
            ),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::new(name, false, format!("error: {e}"))])
}

/// Profits, surplus and auction revenue along the return cost.
pub fn corollary_checks(costs: &[f64]) -> Vec<Check> {
    let mut out = Vec::new();
    for &s in costs {
        let run = || -> Result<Vec<Check>> {
            let grid = linspace(0.0, 1.0, 200);
            let mut rows = Vec::new();
            for &r in &grid {
                let params = MarketParams::new(s, r)?;
                let eq = solve_equilibrium_unobservable(&params, &opts())?;
                let cs = market_consumer_surplus(&eq.prices, &params)?;
                rows.push((eq, cs));
            }
            let count = |f: &dyn Fn(&(EquilibriumResult, f64), &(EquilibriumResult, f64)) -> bool| {
                rows.windows(2).filter(|w| f(&w[0], &w[1])).count()
            };
            let pi1_bad = count(&|x, y| !(y.0.profits.pi1 < x.0.profits.pi1));
            let ind_bad = count(&|x, y| !(y.0.profits.industry() < x.0.profits.industry()));
            let positive = |e: &EquilibriumResult| e.prices.p1 > 0.0 && e.prices.p2 > 0.0;
            let cs_bad = count(&|x, y| positive(&x.0) && positive(&y.0) && !(y.1 > x.1));
            let rev = |e: &EquilibriumResult| position_auction(&e.profits).revenue;
            let rev_bad = count(&|x, y| {
                x.0.profits.gap() > 0.0 && y.0.profits.gap() > 0.0 && !(rev(&y.0) < rev(&x.0))
            });
            // Surplus at the equilibrium cutoff beats nearby cutoffs.
            let mid = &rows[20].0;
            let at = consumer_surplus_at_cutoff(mid.prices.p1, mid.prices.p2, mid.prices.cutoff, s)?;
            let foc_ok = [-1e-3, 1e-3].iter().all(|d| {
                consumer_surplus_at_cutoff(mid.prices.p1, mid.prices.p2, mid.prices.cutoff + d, s)
                    .map(|v| v <= at + 1e-6)
                    .unwrap_or(false)
            });
            Ok(vec![
                Check::new(format!("prominent profit strictly falls in r (s = {s})"), pi1_bad == 0, format!("{pi1_bad} violations on 200 points")),
                Check::new(format!("industry profit strictly falls in r (s = {s})"), ind_bad == 0, format!("{ind_bad} violations")),
                Check::new(format!("consumer surplus strictly rises in r while prices are positive (s = {s})"), cs_bad == 0, format!("{cs_bad} violations")),
                Check::new(format!("auction revenue strictly falls in r while the gap is positive (s = {s})"), rev_bad == 0, format!("{rev_bad} violations")),
                Check::new(format!("search cutoff maximises consumer surplus (s = {s})"), foc_ok, format!("cutoff perturbed by 1e-3 at r = {:.4}", grid[20])),
            ])
        };
        match run() {
            Ok(c) => out.extend(c),
            Err(e) => out.push(Check::new(format!("welfare sweep (s = {s})"), false, format!("error: {e}"))),
        }
    }
    out
}

/// Moving return cost onto consumers near the top of the search-cost range.
pub fn allocation_checks() -> Vec<Check> {
    let name = "gap rises when consumers bear part of the return cost (s = 0.115, r = 0.3)";
    let run = || -> Result<Vec<Check>> {
        let params = MarketParams::new(0.115, 0.3)?;
        let g = allocation_gradient(&params, 1e-4, &opts())?;
        let s_grid = linspace(0.005, 0.12, 24);
        let (_, flip) = allocation_sign_sweep(0.3, &s_grid, 1e-4, &opts());
        Ok(vec![
            Check::new(name, g.gradient > 0.0, format!("d gap / d r_s = {:.6}", g.gradient)),
            Check::new(
                "both cost channels positive at that equilibrium",
                g.firm_cost_channel > 0.0 && g.demand_channel > 0.0,
                format!("firm-cost {:.6}, demand {:.6}", g.firm_cost_channel, g.demand_channel),
            ),
            Check::new(
                "search cost at which the gradient changes sign (reported)",
                true,
                match flip {
                    Some(s) => format!("sign flips near s = {s:.4} at r = 0.3"),
                    None => "no sign change on s in [0.005, 0.12] at r = 0.3".into(),
                },
            ),
        ])
    };
    run().unwrap_or_else(|e| vec![Check::new(name, false, format!("error: {e}"))])
}

/// Observable-price game along `r` in `[0, 1 - a]`.
pub fn observable_checks(costs: &[f64]) -> Vec<Check> {
    let mut out = Vec::new();
    for &s in costs {
        let run = || -> Result<Vec<Check>> {
            let a = res_a(s)?;
            let t = thresholds(a);
            let grid = linspace(0.0, 1.0 - a.value(), 100);
            let eqs = grid
                .iter()
                .map(|&r| solve_equilibrium_observable(&MarketParams::new(s, r)?, &opts()))
                .collect::<Result<Vec<_>>>()?;
            let p1_bad = eqs.windows(2).filter(|w| !(w[1].prices.p1 < w[0].prices.p1)).count();
            let p2_pos = eqs.iter().all(|e| e.prices.p2 > 0.0);
            let below_monopoly = grid.iter().zip(&eqs).all(|(&r, e)| {
                r > t.r_bar_obs || (e.prices.p1 <= (1.0 - r) / 2.0 && e.prices.p2 <= (1.0 - r) / 2.0)
            });
            let turn = locate_observable_price_turn(a, &opts())?;
            Ok(vec![
                Check::new(format!("observable p1 strictly falls in r (s = {s})"), p1_bad == 0, format!("{p1_bad} violations on 100 points")),
                Check::new(format!("observable p2 positive (s = {s})"), p2_pos, "all grid points"),
                Check::new(
                    format!("observable prices below monopoly price up to the bound (s = {s})"),
                    below_monopoly,
                    format!("bound r = {:.6}", t.r_bar_obs),
                ),
                Check::new(
                    format!("observable p2 turning point (reported, s = {s})"),
                    true,
                    match turn {
                        Some(r) => format!("p2 falls then rises, minimum near r = {r:.6}"),
                        None => "p2 monotone on [0, 1 - a]".into(),
                    },
                ),
            ])
        };
        match run() {
            Ok(c) => out.extend(c),
            Err(e) => out.push(Check::new(format!("observable sweep (s = {s})"), false, format!("error: {e}"))),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()), Some(s));
        }
        assert_eq!(Suite::parse("nope"), None);
    }

    #[test]
    fn outlier_rule() {
        assert!(!outside(1.0, 1.0, 0.0));
        assert!(outside(1.0, 1.1, 0.01));
        assert!(!outside(1.0, 1.02, 0.01));
    }
}
