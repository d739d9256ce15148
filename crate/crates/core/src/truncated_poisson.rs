//! The Poisson distribution truncated to values `>= d`, with its rate tuned so
//! that the mean equals `alpha`.
//!
//! For rate `lambda` the pmf is
//!
//! ```text
//!     Pr[Z = i] = lambda^(i-d) / (i! * zeta)      for i >= d, else 0
//!     zeta      = sum_{i >= d} lambda^(i-d) / i!
//! ```
//!
//! All series are summed over the tail directly. Writing `zeta` as
//! `(e^lambda - sum_{i<d} lambda^i/i!) / lambda^d` loses every significant
//! digit once `lambda` is small compared to `d`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::ln_factorial;
use crate::logconcave::Pmf;

/// Relative cutoff for the tail series.
const SERIES_CUTOFF: f64 = 1e-17;
/// The pmf table stops at the first index whose remaining tail mass is below this.
pub const TAIL_MASS: f64 = 1e-15;
/// Offset used for the bisection bracket `(eps, alpha - eps)`.
const BRACKET_EPS: f64 = 1e-12;
/// Bisection stops once the bracket is this narrow relative to its midpoint.
const BISECTION_REL_WIDTH: f64 = 1e-13;
/// Relative mean residual accepted at a bracket endpoint.
const ROOT_TOL: f64 = 1e-12;

/// Mean load `alpha` and minimum load `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub alpha: f64,
    pub d: u32,
}

impl Params {
    /// Requires `d >= 1` and a finite `alpha >= d`.
    pub fn new(alpha: f64, d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("d must be at least 1"));
        }
        if !alpha.is_finite() {
            return Err(Error::domain(format!("alpha must be finite, got {alpha}")));
        }
        if alpha < d as f64 {
            return Err(Error::domain(format!("alpha < d ({alpha} < {d})")));
        }
        Ok(Params { alpha, d })
    }

    /// True when `alpha == d`, the boundary case with a closed form.
    pub fn is_boundary(&self) -> bool {
        self.alpha == self.d as f64
    }
}

/// Terms `s_i = lambda^(i-d) * d! / i!` for `i = d, d+1, ...`, i.e. the
/// summands of `zeta` scaled by `d!` so that `s_d = 1` even for large `d`.
/// Iteration stops once past the mode and the next term drops below the
/// relative cutoff of the partial sum.
struct ScaledTerms {
    lambda: f64,
    i: u64,
    term: f64,
    sum: f64,
}

impl ScaledTerms {
    fn new(lambda: f64, d: u32) -> Self {
        ScaledTerms {
            lambda,
            i: d as u64,
            term: 1.0,
            sum: 0.0,
        }
    }
}

impl Iterator for ScaledTerms {
    type Item = (u64, f64);

    fn next(&mut self) -> Option<(u64, f64)> {
        let past_mode = (self.i as f64) > self.lambda;
        if self.sum > 0.0 && past_mode && self.term < SERIES_CUTOFF * self.sum {
            return None;
        }
        let out = (self.i, self.term);
        self.sum += self.term;
        self.i += 1;
        self.term *= self.lambda / self.i as f64;
        Some(out)
    }
}

/// `zeta = sum_{i >= d} lambda^(i-d) / i!`.
///
/// Underflows to zero once `d!` exceeds the double range; use [`ln_zeta`] there.
pub fn zeta(lambda: f64, d: u32) -> f64 {
    ln_zeta(lambda, d).exp()
}

/// Natural log of [`zeta`], valid for any `d`.
pub fn ln_zeta(lambda: f64, d: u32) -> f64 {
    let scaled: f64 = ScaledTerms::new(lambda, d).map(|(_, t)| t).sum();
    scaled.ln() - ln_factorial(d as u64)
}

/// Mean of the truncated Poisson with rate `lambda` and truncation point `d`.
pub fn mean_at(lambda: f64, d: u32) -> f64 {
    let (mut norm, mut first) = (0.0, 0.0);
    for (i, t) in ScaledTerms::new(lambda, d) {
        norm += t;
        first += i as f64 * t;
    }
    first / norm
}

/// Solves `E[Z] = alpha` for the rate by bisection on `(eps, alpha - eps)`.
///
/// The mean is strictly increasing in the rate, equals `d` in the limit
/// `lambda -> 0` and exceeds `lambda` everywhere, so the bracket always holds a
/// root when `alpha > d`.
pub fn solve_lambda(params: &Params) -> Result<f64> {
    let Params { alpha, d } = *params;
    if alpha <= d as f64 {
        return Err(Error::domain(format!(
            "tuning requires alpha > d, got alpha = {alpha}, d = {d}"
        )));
    }
    let excess = |lambda: f64| mean_at(lambda, d) - alpha;

    let mut lo = BRACKET_EPS.min(alpha / 2.0);
    let mut hi = alpha - BRACKET_EPS;
    let (f_lo, f_hi) = (excess(lo), excess(hi));
    // alpha within ~1e-12 of d puts the root below the bracket; for large
    // alpha the root sits within 1e-12 of alpha itself
    if f_lo > 0.0 && f_lo <= ROOT_TOL * alpha {
        return Ok(lo);
    }
    if f_hi < 0.0 && -f_hi <= ROOT_TOL * alpha {
        return Ok(hi);
    }
    if !(f_lo <= 0.0 && f_hi >= 0.0) {
        return Err(Error::Convergence(format!(
            "bracket [{lo}, {hi}] does not enclose the root for alpha = {alpha}, d = {d} \
             (excess {f_lo}, {f_hi})"
        )));
    }

    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= BISECTION_REL_WIDTH * 0.5 * (lo + hi) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Convergence(format!(
        "bisection did not reach width {BISECTION_REL_WIDTH} for alpha = {alpha}, d = {d}"
    )))
}

/// The tuned truncated Poisson distribution for given `(alpha, d)`.
///
/// Holds a pmf table over `d..=support_limit`, where `support_limit` is the
/// smallest index whose remaining tail mass is below [`TAIL_MASS`].
#[derive(Debug, Clone)]
pub struct TruncatedPoisson {
    params: Params,
    lambda: f64,
    zeta: f64,
    ln_zeta: f64,
    table: Vec<f64>,
    cdf: Vec<f64>,
    tail_mass: f64,
}

impl TruncatedPoisson {
    /// Tunes the rate for `params`. Needs `alpha > d` strictly.
    pub fn new(params: Params) -> Result<Self> {
        let lambda = solve_lambda(&params)?;
        Ok(Self::with_lambda(params, lambda))
    }

    fn with_lambda(params: Params, lambda: f64) -> Self {
        let d = params.d;
        let terms: Vec<f64> = ScaledTerms::new(lambda, d).map(|(_, t)| t).collect();
        let scaled_sum: f64 = terms.iter().sum();
        let ln_zeta = scaled_sum.ln() - ln_factorial(d as u64);

        let probs: Vec<f64> = terms.iter().map(|t| t / scaled_sum).collect();
        // suffix[k] = mass strictly after index k
        let mut after = vec![0.0; probs.len()];
        let mut acc = 0.0;
        for k in (0..probs.len()).rev() {
            after[k] = acc;
            acc += probs[k];
        }
        let keep = after
            .iter()
            .position(|&t| t < TAIL_MASS)
            .map_or(probs.len(), |k| k + 1);
        let table = probs[..keep].to_vec();
        let tail_mass = after[keep - 1];

        let mut cdf = Vec::with_capacity(keep);
        let mut running = 0.0;
        for p in &table {
            running += p;
            cdf.push(running);
        }

        TruncatedPoisson {
            params,
            lambda,
            zeta: ln_zeta.exp(),
            ln_zeta,
            table,
            cdf,
            tail_mass,
        }
    }

    pub fn params(&self) -> Params {
        self.params
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn ln_zeta(&self) -> f64 {
        self.ln_zeta
    }

    /// Largest index kept in the pmf table.
    pub fn support_limit(&self) -> u64 {
        self.params.d as u64 + self.table.len() as u64 - 1
    }

    /// Mass beyond [`support_limit`](Self::support_limit).
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `Pr[Z = i]`, evaluated from the closed form (not limited to the table).
    pub fn pmf(&self, i: u64) -> f64 {
        let d = self.params.d as u64;
        if i < d {
            return 0.0;
        }
        let ln_p = (i - d) as f64 * self.lambda.ln() - ln_factorial(i) - self.ln_zeta;
        ln_p.exp()
    }

    /// Mean and variance by direct summation of the tail series.
    pub fn moments(&self) -> (f64, f64) {
        let d = self.params.d;
        let (mut norm, mut first) = (0.0, 0.0);
        let terms: Vec<(u64, f64)> = ScaledTerms::new(self.lambda, d).collect();
        for &(i, t) in &terms {
            norm += t;
            first += i as f64 * t;
        }
        let mean = first / norm;
        let second: f64 = terms
            .iter()
            .map(|&(i, t)| {
                let dev = i as f64 - mean;
                dev * dev * t
            })
            .sum();
        (mean, second / norm)
    }

    /// The tabulated pmf as a [`Pmf`] starting at `d`.
    pub fn to_pmf(&self) -> Pmf {
        Pmf::from_parts(self.params.d as i64, self.table.clone(), self.tail_mass)
    }

    /// Draws one value by inversion on the tabulated cdf. A uniform draw past
    /// the last cdf entry (probability below [`TAIL_MASS`]) returns the last
    /// tabulated index.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u);
        let k = k.min(self.table.len() - 1);
        self.params.d as u64 + k as u64
    }
}
