//! Monte Carlo estimation of the minimum-load event, and the distribution of
//! `N_Z`, the sum of `n` independent tuned truncated Poisson variables.
//!
//! Trials are split into fixed chunks of [`CHUNK_TRIALS`]. Chunk `c` draws
//! from `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, so a result depends
//! only on `(instance, trials, seed)` and never on how rayon schedules the
//! chunks or how many threads it has.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{balls_for, Instance};
use crate::logconcave::{convolve_with, ConvolveOptions, Pmf, DEFAULT_MAX_LEN};
use crate::truncated_poisson::{Params, TruncatedPoisson};

pub const CHUNK_TRIALS: u64 = 10_000;
/// Tail trimming per convolution step when building `N_Z`.
pub const NZ_DROP: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimEstimate {
    pub n: u64,
    pub m: u64,
    pub d: u32,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    /// 95% normal-approximation half width, `1.96 sqrt(p (1 - p) / trials)`.
    pub ci_halfwidth: f64,
    pub seed: u64,
}

impl SimEstimate {
    pub fn instance(&self) -> Instance {
        Instance {
            n: self.n,
            m: self.m,
            d: self.d,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        (self.estimate - p).abs() <= self.ci_halfwidth
    }
}

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn run_chunk(inst: &Instance, trials: u64, rng: &mut ChaCha8Rng) -> u64 {
    let n = inst.n as usize;
    let d = inst.d as u64;
    let mut loads = vec![0u64; n];
    let mut hits = 0;
    for _ in 0..trials {
        loads.fill(0);
        for _ in 0..inst.m {
            loads[rng.random_range(0..n)] += 1;
        }
        if loads.iter().all(|&l| l >= d) {
            hits += 1;
        }
    }
    hits
}

/// Throws `m` balls into `n` bins `trials` times and counts how often every
/// bin gets at least `d`. Runs on the current rayon pool.
pub fn simulate_event(inst: &Instance, trials: u64, seed: u64) -> Result<SimEstimate> {
    let inst = Instance::new(inst.n, inst.m, inst.d)?;
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    if usize::try_from(inst.n).is_err() {
        return Err(Error::Resource {
            what: "bins",
            needed: inst.n as u128,
            budget: usize::MAX as u128,
        });
    }
    let successes = if inst.is_feasible() {
        let chunks = trials.div_ceil(CHUNK_TRIALS);
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let len = CHUNK_TRIALS.min(trials - c * CHUNK_TRIALS);
                run_chunk(&inst, len, &mut chunk_rng(seed, c))
            })
            .sum()
    } else {
        0
    };
    let p = successes as f64 / trials as f64;
    Ok(SimEstimate {
        n: inst.n,
        m: inst.m,
        d: inst.d,
        trials,
        successes,
        estimate: p,
        ci_halfwidth: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        seed,
    })
}

/// Pmf of `N_Z` for `n` summands with the default size cap.
pub fn nz_distribution(alpha: f64, d: u32, n: u64) -> Result<Pmf> {
    nz_distribution_with(alpha, d, n, DEFAULT_MAX_LEN)
}

/// Pmf of `N_Z` by binary powering of the truncated Poisson pmf. Each
/// convolution trims tails below [`NZ_DROP`]; the removed mass accumulates in
/// [`Pmf::lost_mass`].
pub fn nz_distribution_with(alpha: f64, d: u32, n: u64, max_len: usize) -> Result<Pmf> {
    if n == 0 {
        return Err(Error::domain("need at least one summand"));
    }
    let tp = TruncatedPoisson::new(Params::new(alpha, d)?)?;
    let projected = (tp.to_pmf().len() as u128 - 1) * n as u128 + 1;
    if projected > max_len as u128 {
        return Err(Error::Resource {
            what: "N_Z support length",
            needed: projected,
            budget: max_len as u128,
        });
    }
    let opts = ConvolveOptions {
        drop_below: NZ_DROP,
        max_len,
    };
    let mut power = tp.to_pmf();
    let mut acc: Option<Pmf> = None;
    let mut k = n;
    loop {
        if k & 1 == 1 {
            acc = Some(match acc {
                None => power.clone(),
                Some(a) => convolve_with(&a, &power, opts)?,
            });
        }
        k >>= 1;
        if k == 0 {
            break;
        }
        power = convolve_with(&power, &power, opts)?;
    }
    Ok(acc.expect("n >= 1"))
}

/// `Pr[N_Z = alpha n] * sqrt(n)` for each `n`.
pub fn sqrt_n_law(alpha: f64, d: u32, n_values: &[u64]) -> Result<Vec<(u64, f64)>> {
    let ms = n_values
        .iter()
        .map(|&n| balls_for(alpha, n))
        .collect::<Result<Vec<_>>>()?;
    n_values
        .iter()
        .zip(ms)
        .map(|(&n, m)| {
            let pmf = nz_distribution(alpha, d, n)?;
            Ok((n, pmf.prob(m as i64) * (n as f64).sqrt()))
        })
        .collect()
}
