//! Minimum-load occupancy for balls into bins.
//!
//! Throw `m = alpha * n` balls independently and uniformly into `n` bins and
//! ask for the probability that every bin ends up with at least `d` balls.
//! This probability decays like `b^n` for a constant `b = b(alpha, d)`, and
//! the crate provides:
//!
//! * [`truncated_poisson`]: the Poisson distribution truncated to `>= d` with
//!   its rate tuned so the mean equals `alpha`,
//! * [`asymptotics`]: the base `b(alpha, d)` and the naive per-bin bound,
//! * [`exact`]: the exact finite-`n` probability as a big rational, with
//!   brute-force and inclusion-exclusion cross-checks,
//! * [`simulate`]: reproducible parallel Monte Carlo and the distribution of a
//!   sum of truncated Poisson variables,
//! * [`logconcave`]: a small toolkit for log-concave discrete distributions,
//! * [`cli`]: the machine-readable records behind the `minload` binary.
//!
//! ```
//! use minload::{asymptotics, Params};
//!
//! let b = asymptotics::base(&Params::new(2.0, 1).unwrap()).unwrap();
//! assert!((b.b - 0.8359).abs() < 5e-5);
//! ```

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod exact;
pub mod logconcave;
pub mod simulate;
pub mod truncated_poisson;

pub use error::{Error, Result};
pub use exact::{ExactResult, Instance};
pub use logconcave::{PeakStats, Pmf};
pub use simulate::SimEstimate;
pub use truncated_poisson::{Params, TruncatedPoisson};

/// `ln(k!)` summed directly; exact enough for the integer arguments used here.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}
