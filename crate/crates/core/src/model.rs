//! Domain types and closed-form primitives of the two-firm search market.
//!
//! Consumers inspect the prominent firm (firm 1) first, buy its product and
//! learn the match value `u1`. They then either keep it or also buy firm 2's
//! product, keep the better of the two and return the other (or both).
//! Match values are `U[0,1]` throughout.

use crate::error::{ModelError, Result};

/// Upper bound (exclusive) on the total consumer search friction `s + r_s`.
pub const MAX_SEARCH_FRICTION: f64 = 0.125;

/// Slack used when checking the validity conditions of the closed forms.
const VALIDITY_SLACK: f64 = 1e-12;

/// Exogenous environment of the market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Search cost paid to inspect the second product.
    pub s: f64,
    /// Total per-unit cost of a returned product.
    pub r: f64,
    /// Part of `r` borne by the consumer.
    pub r_s: f64,
    /// Probability that the common match component equals one.
    pub alpha: f64,
}

impl MarketParams {
    /// Base market: no consumer-borne return cost, independent match values.
    pub fn new(s: f64, r: f64) -> Result<Self> {
        let params = MarketParams {
            s,
            r,
            r_s: 0.0,
            alpha: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Market parameterised by the reservation value instead of the search
    /// cost; `s = (1 - a)^2 / 2`.
    pub fn from_reservation(a: f64, r: f64) -> Result<Self> {
        if !(a > 0.5 && a < 1.0) {
            return Err(ModelError::domain(format!(
                "reservation value a = {a} outside (1/2, 1)"
            )));
        }
        Self::new((1.0 - a).powi(2) / 2.0, r)
    }

    pub fn with_consumer_return_cost(mut self, r_s: f64) -> Result<Self> {
        self.r_s = r_s;
        self.validate()?;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        self.alpha = alpha;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_frictions()?;
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(ModelError::domain(format!(
                "alpha = {} outside (0, 1]",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Same as [`validate`](Self::validate) but lets `alpha` be zero, which
    /// the simulator accepts as a degenerate market.
    pub(crate) fn validate_frictions(&self) -> Result<()> {
        if !(self.s > 0.0) {
            return Err(ModelError::domain(format!("search cost s = {} must be > 0", self.s)));
        }
        if !(self.r_s >= 0.0) {
            return Err(ModelError::domain(format!("r_s = {} must be >= 0", self.r_s)));
        }
        if !(self.s + self.r_s < MAX_SEARCH_FRICTION) {
            return Err(ModelError::domain(format!(
                "s + r_s = {} must be < 1/8",
                self.s + self.r_s
            )));
        }
        if !(0.0..=1.0).contains(&self.r) {
            return Err(ModelError::domain(format!("return cost r = {} outside [0, 1]", self.r)));
        }
        if self.r_s > self.r {
            return Err(ModelError::domain(format!(
                "consumer share r_s = {} exceeds total return cost r = {}",
                self.r_s, self.r
            )));
        }
        if !(self.alpha >= 0.0 && self.alpha <= 1.0) {
            return Err(ModelError::domain(format!("alpha = {} outside [0, 1]", self.alpha)));
        }
        Ok(())
    }

    pub fn reservation_value(&self) -> Result<ReservationValue> {
        reservation_value(self.s, self.r_s)
    }

    /// Per-unit return cost left with the firms.
    pub fn firm_return_cost(&self) -> f64 {
        self.r - self.r_s
    }

    /// Monopoly price `(1 - r') / 2` for the firm-borne cost `r'`.
    pub fn monopoly_price(&self) -> f64 {
        (1.0 - self.firm_return_cost()) / 2.0
    }
}

/// Match value at which a consumer holding product 1 is indifferent about
/// inspecting product 2 (at equal prices).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ReservationValue(f64);

impl ReservationValue {
    pub fn new(a: f64) -> Result<Self> {
        if a > 0.5 && a < 1.0 {
            Ok(ReservationValue(a))
        } else {
            Err(ModelError::domain(format!(
                "reservation value a = {a} outside (1/2, 1)"
            )))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `a = 1 - sqrt(2 (s + r_s))`.
pub fn reservation_value(s: f64, r_s: f64) -> Result<ReservationValue> {
    if !(s > 0.0) || !(r_s >= 0.0) {
        return Err(ModelError::domain(format!(
            "need s > 0 and r_s >= 0, got s = {s}, r_s = {r_s}"
        )));
    }
    let friction = s + r_s;
    if !(friction < MAX_SEARCH_FRICTION) {
        return Err(ModelError::domain(format!(
            "s + r_s = {friction} must lie in (0, 1/8)"
        )));
    }
    Ok(ReservationValue(1.0 - (2.0 * friction).sqrt()))
}

/// Prices of the prominent (`p1`) and non-prominent (`p2`) firm together with
/// the search cutoff `a + p1 - p2` on `u1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PricePair {
    pub p1: f64,
    pub p2: f64,
    pub cutoff: f64,
}

impl PricePair {
    pub fn new(p1: f64, p2: f64, a: ReservationValue) -> Self {
        PricePair {
            p1,
            p2,
            cutoff: a.value() + p1 - p2,
        }
    }

    pub fn symmetric(p: f64, a: ReservationValue) -> Self {
        Self::new(p, p, a)
    }
}

/// Masses of the five consumer outcomes; they partition the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RegionMasses {
    /// Keep product 1 without searching.
    pub d1n: f64,
    /// Search, keep product 1, return product 2.
    pub k1: f64,
    /// Search and keep product 2 with `u2 > a`.
    pub d2r: f64,
    /// Search and keep product 2 with `u2 <= a`.
    pub k2: f64,
    /// Search and return both products.
    pub k0: f64,
}

impl RegionMasses {
    pub fn q1(&self) -> f64 {
        self.d1n + self.k1
    }

    pub fn q2(&self) -> f64 {
        self.d2r + self.k2
    }

    /// Mass of consumers who inspect product 2.
    pub fn searchers(&self) -> f64 {
        1.0 - self.d1n
    }

    pub fn total(&self) -> f64 {
        self.d1n + self.k1 + self.d2r + self.k2 + self.k0
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.d1n, self.k1, self.d2r, self.k2, self.k0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfitPair {
    pub pi1: f64,
    pub pi2: f64,
}

impl ProfitPair {
    /// Extra profit of the prominent firm, `pi1 - pi2`.
    pub fn gap(&self) -> f64 {
        self.pi1 - self.pi2
    }

    pub fn industry(&self) -> f64 {
        self.pi1 + self.pi2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConsumerOutcome {
    KeepFirmOneNoSearch,
    SearchKeepFirmOne,
    SearchKeepFirmTwo,
    SearchReturnBoth,
    /// The common match component is zero: product 1 goes back and the
    /// consumer leaves without searching.
    ExitNoMatch,
}

/// Decision rule for a matched consumer with no consumer-borne return cost.
pub fn classify_consumer(u1: f64, u2: f64, prices: &PricePair) -> ConsumerOutcome {
    classify_consumer_with(true, u1, u2, prices, 0.0)
}

/// Full decision rule. `matched` is the realisation of the common match
/// component; a consumer-borne return cost `r_s` moves the outside option
/// from `0` to `-r_s`. Ties in net utility keep product 1.
pub fn classify_consumer_with(
    matched: bool,
    u1: f64,
    u2: f64,
    prices: &PricePair,
    r_s: f64,
) -> ConsumerOutcome {
    if !matched {
        return ConsumerOutcome::ExitNoMatch;
    }
    if u1 >= prices.cutoff {
        return ConsumerOutcome::KeepFirmOneNoSearch;
    }
    let net1 = u1 - prices.p1;
    let net2 = u2 - prices.p2;
    if net1 < -r_s && net2 < -r_s {
        ConsumerOutcome::SearchReturnBoth
    } else if net1 >= net2 {
        ConsumerOutcome::SearchKeepFirmOne
    } else {
        ConsumerOutcome::SearchKeepFirmTwo
    }
}

/// Closed-form masses of the five outcome regions.
///
/// Requires `0 <= p1, p2`, `p2 <= a`, `a + p1 - p2 <= 1` and, when the
/// consumer bears part of the return cost, `r_s <= min(p1, p2)`.
pub fn region_masses(prices: &PricePair, a: ReservationValue, r_s: f64) -> Result<RegionMasses> {
    let a = a.value();
    let PricePair { p1, p2, cutoff } = *prices;
    let h = a + p1 - p2;
    if !(p1 >= 0.0 && p2 >= 0.0) {
        return Err(ModelError::precondition(format!(
            "prices must be non-negative (p1 = {p1}, p2 = {p2})"
        )));
    }
    if (cutoff - h).abs() > VALIDITY_SLACK {
        return Err(ModelError::precondition(format!(
            "price pair cutoff {cutoff} does not equal a + p1 - p2 = {h}"
        )));
    }
    if p2 > a + VALIDITY_SLACK {
        return Err(ModelError::precondition(format!(
            "validity condition p2 <= a fails (p2 = {p2}, a = {a})"
        )));
    }
    if h > 1.0 + VALIDITY_SLACK {
        return Err(ModelError::precondition(format!(
            "validity condition a + p1 - p2 <= 1 fails (value {h})"
        )));
    }
    if !(r_s >= 0.0) {
        return Err(ModelError::precondition(format!("r_s = {r_s} must be >= 0")));
    }

    let d1n = 1.0 - h;
    let d2r = h * (1.0 - a);
    if r_s == 0.0 {
        let k1 = (a * a - p2 * p2) / 2.0;
        return Ok(RegionMasses {
            d1n,
            k1,
            d2r,
            k2: k1 + (p1 - p2) * (a - p2),
            k0: p1 * p2,
        });
    }

    if r_s > p1.min(p2) {
        return Err(ModelError::precondition(format!(
            "consumer return cost r_s = {r_s} exceeds min(p1, p2) = {}",
            p1.min(p2)
        )));
    }
    let shifted2 = p2 - r_s;
    Ok(RegionMasses {
        d1n,
        k1: a * a / 2.0 - shifted2 * shifted2 / 2.0,
        d2r,
        k2: (a + 2.0 * p1 - r_s - p2) * (a - p2 + r_s) / 2.0,
        k0: (p1 - r_s) * shifted2,
    })
}

/// Profits of both firms.
///
/// Firm 1 refunds every consumer who ends up with product 2 or with nothing,
/// firm 2 refunds every searcher who does not keep its product. With
/// `alpha < 1` firm 1 also refunds the unmatched consumers.
pub fn firm_profits(prices: &PricePair, params: &MarketParams) -> Result<ProfitPair> {
    let a = params.reservation_value()?;
    let masses = region_masses(prices, a, params.r_s)?;
    Ok(profits_from_masses(prices, &masses, params))
}

pub(crate) fn profits_from_masses(
    prices: &PricePair,
    masses: &RegionMasses,
    params: &MarketParams,
) -> ProfitPair {
    let alpha = params.alpha;
    let cost = params.r - params.r_s;
    let pi1 = alpha * ((prices.p1 + cost) * (masses.d1n + masses.k1) - cost) - (1.0 - alpha) * cost;
    let pi2 = alpha * ((prices.p2 + cost) * (masses.d2r + masses.k2) - cost * (1.0 - masses.d1n));
    ProfitPair { pi1, pi2 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonopolyBenchmark {
    pub price: f64,
    pub profit: f64,
}

/// Single seller facing `U[0,1]` match values and refunding every return:
/// maximises `p (1 - p) - r p`.
pub fn monopoly_benchmark(r: f64) -> Result<MonopolyBenchmark> {
    if !(0.0..=1.0).contains(&r) {
        return Err(ModelError::domain(format!("return cost r = {r} outside [0, 1]")));
    }
    Ok(MonopolyBenchmark {
        price: (1.0 - r) / 2.0,
        profit: (1.0 - r).powi(2) / 4.0,
    })
}

/// Prominence gap at a common exogenous price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExogenousGap {
    /// `pi1 - pi2 = (p - p a - r a)(1 - a)`.
    pub gap: f64,
    /// Return cost `(1 - a) p / a` above which the gap is negative.
    pub threshold: f64,
}

pub fn exogenous_gap(p: f64, a: ReservationValue, r: f64) -> Result<ExogenousGap> {
    let a = a.value();
    if !(p >= 0.0 && p <= a) {
        return Err(ModelError::precondition(format!(
            "common price p = {p} must lie in [0, a = {a}]"
        )));
    }
    if !(r >= 0.0) {
        return Err(ModelError::precondition(format!("return cost r = {r} must be >= 0")));
    }
    Ok(ExogenousGap {
        gap: (p - p * a - r * a) * (1.0 - a),
        threshold: (1.0 - a) * p / a,
    })
}
