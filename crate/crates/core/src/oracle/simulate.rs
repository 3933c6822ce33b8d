//! Seeded Monte Carlo market.
//!
//! Draws come from ChaCha8 seeded with `seed_from_u64(seed)`. The sample is
//! cut into shards of 2^16 consumers; shard `k` uses stream `k` of that
//! generator and draws three `f64`s per consumer, in the order
//! `(common match component, u1, u2)`. Shards run in parallel and are merged
//! in index order, so the outcome is bit-identical for a given seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ModelError, Result};
use crate::model::{classify_consumer_with, ConsumerOutcome, MarketParams, PricePair, RegionMasses};

const SHARD: u64 = 1 << 16;

/// Standard errors of the [`SimOutcome`] statistics.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimStandardErrors {
    pub masses: RegionMasses,
    pub exit: f64,
    pub q1: f64,
    pub q2: f64,
    pub pi1: f64,
    pub pi2: f64,
    pub cs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOutcome {
    /// Fractions of all draws in each region (unconditional on a match).
    pub masses: RegionMasses,
    /// Fraction of unmatched consumers.
    pub exit: f64,
    pub q1: f64,
    pub q2: f64,
    /// Mean profit per consumer.
    pub pi1: f64,
    pub pi2: f64,
    /// Mean realised net utility, search and return costs included.
    pub cs: f64,
    pub se: SimStandardErrors,
    pub n: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn merge(&mut self, other: &Moments) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn mean_se(&self, n: f64) -> (f64, f64) {
        let mean = self.sum / n;
        let var = (self.sum_sq / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    }
}

// Order: d1n, k1, d2r, k2, k0, exit.
#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    counts: [u64; 6],
    pi1: Moments,
    pi2: Moments,
    cs: Moments,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        for (c, o) in self.counts.iter_mut().zip(other.counts) {
            *c += o;
        }
        self.pi1.merge(&other.pi1);
        self.pi2.merge(&other.pi2);
        self.cs.merge(&other.cs);
    }
}

struct Market {
    prices: PricePair,
    a: f64,
    alpha: f64,
    s: f64,
    r_s: f64,
    cost: f64,
}

impl Market {
    fn consumer(&self, tally: &mut Tally, c: f64, u1: f64, u2: f64) {
        let Market { prices, a, alpha, s, r_s, cost } = *self;
        let (p1, p2) = (prices.p1, prices.p2);
        let outcome = classify_consumer_with(c < alpha, u1, u2, &prices, r_s);
        // (slot, firm 1 payoff, firm 2 payoff, consumer payoff)
        let (slot, f1, f2, v) = match outcome {
            ConsumerOutcome::KeepFirmOneNoSearch => (0, p1, 0.0, u1 - p1),
            ConsumerOutcome::SearchKeepFirmOne => (1, p1, -cost, u1 - p1 - s - r_s),
            ConsumerOutcome::SearchKeepFirmTwo => {
                let slot = if u2 > a { 2 } else { 3 };
                (slot, -cost, p2, u2 - p2 - s - r_s)
            }
            ConsumerOutcome::SearchReturnBoth => (4, -cost, -cost, -s - 2.0 * r_s),
            ConsumerOutcome::ExitNoMatch => (5, -cost, 0.0, -r_s),
        };
        tally.counts[slot] += 1;
        tally.pi1.push(f1);
        tally.pi2.push(f2);
        tally.cs.push(v);
    }

    fn shard(&self, seed: u64, index: u64, draws: u64) -> Tally {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let mut tally = Tally::default();
        for _ in 0..draws {
            let c: f64 = rng.gen();
            let u1: f64 = rng.gen();
            let u2: f64 = rng.gen();
            self.consumer(&mut tally, c, u1, u2);
        }
        tally
    }
}

/// Simulate `n` consumers facing `prices`.
///
/// Consumers are matched with probability `alpha`; matched consumers have
/// independent `U[0,1]` match values. Firms bear `r - r_s` per returned
/// unit, consumers `r_s` per return and `s` per search.
pub fn simulate_market(
    prices: &PricePair,
    params: &MarketParams,
    n: u64,
    seed: u64,
) -> Result<SimOutcome> {
    if n == 0 {
        return Err(ModelError::precondition("simulation needs at least one draw"));
    }
    params.validate_frictions()?;
    if !(prices.p1 >= 0.0 && prices.p2 >= 0.0) {
        return Err(ModelError::precondition(format!(
            "prices must be non-negative (p1 = {}, p2 = {})",
            prices.p1, prices.p2
        )));
    }
    let market = Market {
        prices: *prices,
        a: params.reservation_value()?.value(),
        alpha: params.alpha,
        s: params.s,
        r_s: params.r_s,
        cost: params.firm_return_cost(),
    };
    let shards = n.div_ceil(SHARD);
    let tallies: Vec<Tally> = (0..shards)
        .into_par_iter()
        .map(|k| market.shard(seed, k, SHARD.min(n - k * SHARD)))
        .collect();
    let mut total = Tally::default();
    for t in &tallies {
        total.merge(t);
    }

    let nf = n as f64;
    let frac = |c: u64| c as f64 / nf;
    let binom_se = |m: f64| (m * (1.0 - m) / nf).sqrt();
    let [d1n, k1, d2r, k2, k0, exit] = total.counts.map(frac);
    let masses = RegionMasses { d1n, k1, d2r, k2, k0 };
    let (q1, q2) = (d1n + k1, d2r + k2);
    let (pi1, pi1_se) = total.pi1.mean_se(nf);
    let (pi2, pi2_se) = total.pi2.mean_se(nf);
    let (cs, cs_se) = total.cs.mean_se(nf);
    Ok(SimOutcome {
        masses,
        exit,
        q1,
        q2,
        pi1,
        pi2,
        cs,
        se: SimStandardErrors {
            masses: RegionMasses {
                d1n: binom_se(d1n),
                k1: binom_se(k1),
                d2r: binom_se(d2r),
                k2: binom_se(k2),
                k0: binom_se(k0),
            },
            exit: binom_se(exit),
            q1: binom_se(q1),
            q2: binom_se(q2),
            pi1: pi1_se,
            pi2: pi2_se,
            cs: cs_se,
        },
        n,
        seed,
    })
}
