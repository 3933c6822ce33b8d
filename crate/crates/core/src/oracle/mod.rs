//! Verification engines that share no algebra with the closed forms.
//!
//! [`simulate`] draws consumers and applies only the decision rule.
//! [`grid`] maximises profits computed by integrating that same rule over
//! `u1`, never touching a first-order condition.

pub mod demand;
pub mod grid;
pub mod simulate;

pub use demand::{integrated_profits, IntegratedDemand};
pub use grid::{deviation_gains, grid_best_response, grid_equilibrium, Firm};
pub use simulate::{simulate_market, SimOutcome, SimStandardErrors};
