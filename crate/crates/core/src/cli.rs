//! Command-line front end: `solve`, `sweep`, `simulate` and `verify`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::equilibrium::{
    locate_prominent_exit, solve_equilibrium_observable, solve_equilibrium_unobservable,
    thresholds, SolverOptions,
};
use crate::error::{ModelError, Result};
use crate::model::{firm_profits, region_masses, MarketParams, PricePair, MAX_SEARCH_FRICTION};
use crate::oracle::simulate_market;
use crate::verify::{run_suite, Suite};
use crate::welfare::{market_consumer_surplus, position_auction};

pub const CSV_HEADER: &str =
    "param_value,regime,p1,p2,q1,q2,pi1,pi2,gap,industry,cs,ad_revenue,residual,status";

#[derive(Debug, Parser)]
#[command(name = "prominence", version, about = "Prominence and product returns in a two-firm search market")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one market and print prices, profits, welfare and thresholds.
    Solve(MarketArgs),
    /// Sweep one parameter and write a CSV row per grid point.
    Sweep(SweepArgs),
    /// Simulate consumers and compare with the closed forms.
    Simulate(SimulateArgs),
    /// Run the property suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Unobservable,
    Observable,
    /// Both firms charge the common price `--p`.
    Exogenous,
}

#[derive(Debug, Clone, Args)]
pub struct MarketArgs {
    /// Search cost.
    #[arg(long, conflicts_with = "a")]
    pub s: Option<f64>,
    /// Reservation value, converted to s = (1 - a)^2 / 2.
    #[arg(long)]
    pub a: Option<f64>,
    /// Total return cost per returned unit.
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    /// Consumer's share of the return cost.
    #[arg(long, default_value_t = 0.0)]
    pub rs: f64,
    /// Probability that the common match component is one.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = Mode::Unobservable)]
    pub mode: Mode,
    /// Common price in exogenous mode.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Output file (default stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    R,
    Rs,
    S,
    Alpha,
    P,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub market: MarketArgs,
    /// Prices to simulate at; defaults to the equilibrium of `--mode`.
    #[arg(long, requires = "p2")]
    pub p1: Option<f64>,
    #[arg(long, requires = "p1")]
    pub p2: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite to run (default: all).
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Search cost for the sweep-based suites.
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fixed notation with 12 significant digits; `-0` prints as `0`.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let digits = (11 - v.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{v:.digits$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}

impl MarketArgs {
    fn search_cost(&self) -> Result<f64> {
        match (self.s, self.a) {
            (Some(s), _) => Ok(s),
            (None, Some(a)) => {
                if !(a > 0.5 && a < 1.0) {
                    return Err(ModelError::domain(format!("reservation value a = {a} outside (1/2, 1)")));
                }
                Ok((1.0 - a).powi(2) / 2.0)
            }
            (None, None) => Err(ModelError::domain("one of --s or --a is required")),
        }
    }

    pub fn params(&self) -> Result<MarketParams> {
        let params = MarketParams {
            s: self.search_cost()?,
            r: self.r,
            r_s: self.rs,
            alpha: self.alpha,
        };
        params.validate()?;
        Ok(params)
    }

    fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            ..SolverOptions::default()
        }
    }
}

/// Everything reported for one market.
#[derive(Debug, Clone, PartialEq)]
pub struct PointReport {
    pub regime: String,
    pub p1: f64,
    pub p2: f64,
    /// Shares among matched consumers.
    pub q1: f64,
    pub q2: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub gap: f64,
    pub industry: f64,
    pub cs: f64,
    pub ad_revenue: f64,
    pub auction_clipped: bool,
    pub residual: f64,
}

pub fn evaluate(mode: Mode, params: &MarketParams, price: Option<f64>, opts: &SolverOptions) -> Result<PointReport> {
    let a = params.reservation_value()?;
    let (prices, profits, regime, residual) = match mode {
        Mode::Unobservable | Mode::Observable => {
            let eq = if mode == Mode::Unobservable {
                solve_equilibrium_unobservable(params, opts)?
            } else {
                solve_equilibrium_observable(params, opts)?
            };
            (eq.prices, eq.profits, eq.regime.to_string(), eq.residual)
        }
        Mode::Exogenous => {
            let p = price.ok_or_else(|| ModelError::domain("exogenous mode needs --p"))?;
            let prices = PricePair::symmetric(p, a);
            (prices, firm_profits(&prices, params)?, "Exogenous".to_string(), 0.0)
        }
    };
    let masses = region_masses(&prices, a, params.r_s)?;
    let auction = position_auction(&profits);
    Ok(PointReport {
        regime,
        p1: prices.p1,
        p2: prices.p2,
        q1: masses.q1(),
        q2: masses.q2(),
        pi1: profits.pi1,
        pi2: profits.pi2,
        gap: profits.gap(),
        industry: profits.industry(),
        cs: market_consumer_surplus(&prices, params)?,
        ad_revenue: auction.revenue,
        auction_clipped: auction.clipped,
        residual,
    })
}

pub fn run_solve(args: &MarketArgs) -> Result<String> {
    let params = args.params()?;
    let a = params.reservation_value()?;
    let rep = evaluate(args.mode, &params, args.p, &args.options())?;
    let mut out = String::new();
    let mut line = |k: &str, v: String| writeln!(out, "{k:<18} {v}").unwrap();
    line("mode", format!("{:?}", args.mode).to_lowercase());
    line("s", fmt_num(params.s));
    line("a", fmt_num(a.value()));
    line("r", fmt_num(params.r));
    line("r_s", fmt_num(params.r_s));
    line("alpha", fmt_num(params.alpha));
    line("regime", rep.regime.clone());
    for (k, v) in [
        ("p1", rep.p1),
        ("p2", rep.p2),
        ("q1", rep.q1),
        ("q2", rep.q2),
        ("pi1", rep.pi1),
        ("pi2", rep.pi2),
        ("gap", rep.gap),
        ("industry", rep.industry),
        ("cs", rep.cs),
        ("ad_revenue", rep.ad_revenue),
        ("residual", rep.residual),
    ] {
        line(k, fmt_num(v));
    }
    line("auction_clipped", rep.auction_clipped.to_string());
    let t = thresholds(a);
    for (k, v) in [
        ("r_bar", t.r_bar),
        ("r_corner", t.r_corner),
        ("r_low", t.r_low),
        ("r_bar_obs", t.r_bar_obs),
        ("r_bar_p", t.r_bar_p),
        ("p_under", t.p_under),
    ] {
        line(k, fmt_num(v));
    }
    if params.r_s == 0.0 {
        line("p1_exit", fmt_num(locate_prominent_exit(a, &args.options())?));
    }
    Ok(out)
}

/// One-parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub mode: Mode,
    pub base: MarketParams,
    /// Common price for exogenous mode.
    pub price: Option<f64>,
    pub opts: SolverOptions,
}

impl SweepSpec {
    pub fn from_args(args: &SweepArgs) -> Result<SweepSpec> {
        let m = &args.market;
        let s = match (args.param, m.search_cost()) {
            (SweepParam::S, Err(_)) => args.from,
            (_, s) => s?,
        };
        let spec = SweepSpec {
            param: args.param,
            from: args.from,
            to: args.to,
            steps: args.steps,
            mode: m.mode,
            base: MarketParams {
                s,
                r: m.r,
                r_s: m.rs,
                alpha: m.alpha,
            },
            price: m.p,
            opts: m.options(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == n {
                    self.to
                } else {
                    self.from + (self.to - self.from) * i as f64 / n as f64
                }
            })
            .collect()
    }

    /// Market and price at one grid value.
    pub fn point(&self, v: f64) -> Result<(MarketParams, Option<f64>)> {
        let mut params = self.base;
        let mut price = self.price;
        match self.param {
            SweepParam::R => params.r = v,
            SweepParam::Rs => params.r_s = v,
            SweepParam::S => params.s = v,
            SweepParam::Alpha => params.alpha = v,
            SweepParam::P => price = Some(v),
        }
        params.validate()?;
        Ok((params, price))
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(ModelError::domain("a sweep needs at least 2 steps"));
        }
        if !(self.from.is_finite() && self.to.is_finite()) {
            return Err(ModelError::domain("sweep bounds must be finite"));
        }
        if self.param == SweepParam::P && self.mode != Mode::Exogenous {
            return Err(ModelError::domain("sweeping p needs --mode exogenous"));
        }
        if self.mode == Mode::Exogenous && self.param != SweepParam::P && self.price.is_none() {
            return Err(ModelError::domain("exogenous mode needs --p"));
        }
        if self.param == SweepParam::S && self.from.max(self.to) >= MAX_SEARCH_FRICTION {
            return Err(ModelError::domain("search cost must stay below 1/8"));
        }
        for v in [self.from, self.to] {
            let (params, price) = self.point(v)?;
            let a = params.reservation_value()?.value();
            match self.mode {
                Mode::Observable if params.r > 1.0 - a || params.r_s != 0.0 => {
                    return Err(ModelError::domain(format!(
                        "observable sweep endpoint {v} leaves r <= 1 - a with r_s = 0"
                    )));
                }
                Mode::Exogenous => {
                    let p = price.unwrap_or(f64::NAN);
                    if !(p >= 0.0 && p <= a) {
                        return Err(ModelError::domain(format!("common price {p} outside [0, a = {a}]")));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

fn csv_row(v: f64, point: Result<PointReport>) -> String {
    match point {
        Ok(p) => {
            let nums = [
                p.p1, p.p2, p.q1, p.q2, p.pi1, p.pi2, p.gap, p.industry, p.cs, p.ad_revenue, p.residual,
            ]
            .map(fmt_num)
            .join(",");
            let status = if p.auction_clipped { "ok;auction_clipped" } else { "ok" };
            format!("{},{},{nums},{status}", fmt_num(v), p.regime)
        }
        Err(e) => {
            let status = e.to_string().replace([',', '\n'], ";");
            format!("{},,,,,,,,,,,,,{status}", fmt_num(v))
        }
    }
}

/// CSV text for a sweep and the number of failed rows.
pub fn run_sweep(spec: &SweepSpec) -> (String, usize) {
    let rows: Vec<(String, bool)> = spec
        .values()
        .par_iter()
        .map(|&v| {
            let point = spec
                .point(v)
                .and_then(|(params, price)| evaluate(spec.mode, &params, price, &spec.opts));
            let failed = point.is_err();
            (csv_row(v, point), failed)
        })
        .collect();
    let failed = rows.iter().filter(|r| r.1).count();
    let mut out = String::with_capacity(rows.len() * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (row, _) in rows {
        out.push_str(&row);
        out.push('\n');
    }
    (out, failed)
}

pub fn run_simulate(args: &SimulateArgs) -> Result<String> {
    let m = &args.market;
    let params = m.params()?;
    let a = params.reservation_value()?;
    let prices = match (args.p1, args.p2) {
        (Some(p1), Some(p2)) => PricePair::new(p1, p2, a),
        _ => {
            let rep = evaluate(m.mode, &params, m.p, &m.options())?;
            PricePair::new(rep.p1, rep.p2, a)
        }
    };
    let sim = simulate_market(&prices, &params, args.n, args.seed)?;
    // Closed forms are optional: they need the validity conditions.
    let closed = region_masses(&prices, a, params.r_s).ok().map(|masses| {
        let profits = firm_profits(&prices, &params).ok();
        let cs = market_consumer_surplus(&prices, &params).ok();
        (masses, profits, cs)
    });
    let alpha = params.alpha;
    let exact = |f: &dyn Fn(&(crate::model::RegionMasses, Option<crate::model::ProfitPair>, Option<f64>)) -> Option<f64>| {
        closed.as_ref().and_then(f).map(fmt_num).unwrap_or_default()
    };
    let rows: [(&str, f64, f64, String); 11] = [
        ("d1n", sim.masses.d1n, sim.se.masses.d1n, exact(&|c| Some(alpha * c.0.d1n))),
        ("k1", sim.masses.k1, sim.se.masses.k1, exact(&|c| Some(alpha * c.0.k1))),
        ("d2r", sim.masses.d2r, sim.se.masses.d2r, exact(&|c| Some(alpha * c.0.d2r))),
        ("k2", sim.masses.k2, sim.se.masses.k2, exact(&|c| Some(alpha * c.0.k2))),
        ("k0", sim.masses.k0, sim.se.masses.k0, exact(&|c| Some(alpha * c.0.k0))),
        ("exit", sim.exit, sim.se.exit, fmt_num(1.0 - alpha)),
        ("q1", sim.q1, sim.se.q1, exact(&|c| Some(alpha * c.0.q1()))),
        ("q2", sim.q2, sim.se.q2, exact(&|c| Some(alpha * c.0.q2()))),
        ("pi1", sim.pi1, sim.se.pi1, exact(&|c| c.1.map(|p| p.pi1))),
        ("pi2", sim.pi2, sim.se.pi2, exact(&|c| c.1.map(|p| p.pi2))),
        ("cs", sim.cs, sim.se.cs, exact(&|c| c.2)),
    ];
    let mut out = format!(
        "# n={} seed={} p1={} p2={}\nstatistic,simulated,std_error,closed_form\n",
        sim.n,
        sim.seed,
        fmt_num(prices.p1),
        fmt_num(prices.p2)
    );
    for (name, est, se, exact) in rows {
        writeln!(out, "{name},{},{},{exact}", fmt_num(est), fmt_num(se)).unwrap();
    }
    Ok(out)
}

/// Report text and number of failed suites.
pub fn run_verify(suites: &[Suite], seed: u64, s: Option<f64>) -> (String, usize) {
    let mut out = String::new();
    let mut failed = 0;
    for &suite in suites {
        let report = run_suite(suite, seed, s);
        failed += (!report.passed()) as usize;
        write!(out, "{report}").unwrap();
    }
    writeln!(out, "{} of {} suites passed", suites.len() - failed, suites.len()).unwrap();
    (out, failed)
}

pub fn exit_code(err: &ModelError) -> i32 {
    match err {
        ModelError::Domain(_) | ModelError::Precondition(_) => 2,
        ModelError::NonConvergence { .. } | ModelError::SolverFailure(_) | ModelError::GridCycle { .. } => 3,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

/// Parse `args`, run the command and return the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (text, out, code) = match &cli.command {
        Command::Solve(m) => match run_solve(m) {
            Ok(t) => (t, &m.out, 0),
            Err(e) => return fail(&e),
        },
        Command::Sweep(args) => match SweepSpec::from_args(args) {
            Ok(spec) => {
                let (t, failed) = run_sweep(&spec);
                if failed > 0 {
                    eprintln!("sweep: {failed} of {} points failed (see status column)", spec.steps);
                }
                (t, &args.market.out, 0)
            }
            Err(e) => return fail(&e),
        },
        Command::Simulate(args) => match run_simulate(args) {
            Ok(t) => (t, &args.market.out, 0),
            Err(e) => return fail(&e),
        },
        Command::Verify(args) => {
            let suites = match &args.suite {
                None => Suite::ALL.to_vec(),
                Some(name) => match Suite::parse(name) {
                    Some(s) => vec![s],
                    None => {
                        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                        eprintln!("error: unknown suite {name:?}; expected one of {}", names.join(", "));
                        return 2;
                    }
                },
            };
            let (t, failed) = run_verify(&suites, args.seed, args.s);
            let code = if failed == 0 { 0 } else { 3 + failed as i32 };
            (t, &args.out, code)
        }
    };
    if let Err(e) = emit(out, &text) {
        eprintln!("error: cannot write output: {e}");
        return 1;
    }
    code
}

fn fail(e: &ModelError) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}
