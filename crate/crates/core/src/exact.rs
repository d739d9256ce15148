//! Exact probability that every bin receives at least `d` of `m` balls.
//!
//! The probability is `count / n^m`, where `count` is the number of ways to
//! send `m` labelled balls into `n` labelled bins with every load `>= d`.
//! Equivalently `count = m! [t^m] (sum_{i >= d} t^i / i!)^n`. The coefficient
//! is extracted by multiplying the exponential generating function out one
//! bin at a time. In integer form each multiplication is the binomial
//! convolution
//!
//! ```text
//!     A_{j+1}[k] = sum_{i = d}^{k} C(k, i) * A_j[k - i]
//! ```
//!
//! so the whole computation stays in big integers.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::asymptotics::{self, Branch};
use crate::error::{Error, Result};
use crate::truncated_poisson::Params;

/// Default cap on the projected coefficient count `n * m`.
pub const DEFAULT_BUDGET: u128 = 10_000_000;
/// Cap on `n^m` for [`brute_force_probability`].
pub const BRUTE_FORCE_CAP: u128 = 100_000_000;

/// `n` bins, `m` balls, minimum load `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instance {
    pub n: u64,
    pub m: u64,
    pub d: u32,
}

impl Instance {
    pub fn new(n: u64, m: u64, d: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("need at least one bin"));
        }
        if d == 0 {
            return Err(Error::domain("d must be at least 1"));
        }
        Ok(Instance { n, m, d })
    }

    /// `m >= d n`; otherwise the event is impossible.
    pub fn is_feasible(&self) -> bool {
        self.m as u128 >= self.d as u128 * self.n as u128
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub instance: Instance,
    pub probability: BigRational,
}

impl ExactResult {
    fn new(instance: Instance, numer: BigUint, denom: BigUint) -> Self {
        ExactResult {
            instance,
            probability: Ratio::new(BigInt::from(numer), BigInt::from(denom)),
        }
    }

    /// Nearest double; underflows to zero for very small probabilities.
    pub fn to_f64(&self) -> f64 {
        self.probability.to_f64().unwrap_or(0.0)
    }

    /// Natural log of the probability, accurate to double precision at any
    /// magnitude. `-inf` for probability zero.
    pub fn ln(&self) -> f64 {
        if self.probability.is_zero() {
            return f64::NEG_INFINITY;
        }
        ln_big(self.probability.numer().magnitude()) - ln_big(self.probability.denom().magnitude())
    }

    /// Reduced `numerator/denominator`.
    pub fn ratio_string(&self) -> String {
        format!("{}/{}", self.probability.numer(), self.probability.denom())
    }
}

/// `ln(x)` for a positive big integer, keeping the top 64 bits.
pub(crate) fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(0.0);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn check_budget(inst: &Instance, budget: u128) -> Result<()> {
    let needed = inst.n as u128 * inst.m as u128;
    if needed > budget {
        return Err(Error::Resource {
            what: "coefficient count n*m",
            needed,
            budget,
        });
    }
    Ok(())
}

/// `counts[k]` = ways to put `k` labelled balls into `n` bins with every load
/// `>= d`, for `k = 0..=m_max`.
fn occupancy_counts(n: u64, m_max: u64, d: u32) -> Vec<BigUint> {
    let len = m_max as usize + 1;
    let d = d as usize;
    // one bin: exactly one way whenever k >= d
    let mut counts: Vec<BigUint> = (0..len)
        .map(|k| if k >= d { BigUint::one() } else { BigUint::zero() })
        .collect();
    let mut next = vec![BigUint::zero(); len];
    let mut pascal: Vec<BigUint> = Vec::with_capacity(len);

    for bins in 2..=n {
        let low = d.saturating_mul(bins as usize);
        pascal.clear();
        pascal.push(BigUint::one());
        for k in 0..len {
            if k > 0 {
                // row k of Pascal's triangle from row k - 1
                pascal.push(BigUint::one());
                for i in (1..k).rev() {
                    let prev = pascal[i - 1].clone();
                    pascal[i] += prev;
                }
            }
            next[k] = BigUint::zero();
            if k < low {
                continue;
            }
            // A_{j-1}[k - i] is zero unless k - i >= d (j - 1)
            let mut acc = BigUint::zero();
            for i in d..=(k - (low - d)) {
                let prev = &counts[k - i];
                if !prev.is_zero() {
                    acc += &pascal[i] * prev;
                }
            }
            next[k] = acc;
        }
        std::mem::swap(&mut counts, &mut next);
    }
    counts
}

/// Exact `Pr[every bin >= d]` with the default budget.
pub fn exact_probability(inst: &Instance) -> Result<ExactResult> {
    exact_probability_with_budget(inst, DEFAULT_BUDGET)
}

/// Exact `Pr[every bin >= d]`; fails when `n * m` exceeds `budget`.
pub fn exact_probability_with_budget(inst: &Instance, budget: u128) -> Result<ExactResult> {
    let inst = Instance::new(inst.n, inst.m, inst.d)?;
    if !inst.is_feasible() {
        return Ok(ExactResult::new(inst, BigUint::zero(), BigUint::one()));
    }
    check_budget(&inst, budget)?;
    let counts = occupancy_counts(inst.n, inst.m, inst.d);
    let total = BigUint::from(inst.n).pow(inst.m as u32);
    Ok(ExactResult::new(inst, counts[inst.m as usize].clone(), total))
}

/// Exact probabilities for every ball count `m = 0..=m_max` at once; one
/// generating-function expansion serves them all.
pub fn exact_probabilities_up_to(n: u64, m_max: u64, d: u32) -> Result<Vec<ExactResult>> {
    let top = Instance::new(n, m_max, d)?;
    check_budget(&top, DEFAULT_BUDGET)?;
    let counts = occupancy_counts(n, m_max, d);
    let base = BigUint::from(n);
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(m, c)| {
            let inst = Instance { n, m: m as u64, d };
            ExactResult::new(inst, c, base.pow(m as u32))
        })
        .collect())
}

/// Enumerates all `n^m` ball assignments. Tiny instances only.
pub fn brute_force_probability(inst: &Instance) -> Result<ExactResult> {
    let inst = Instance::new(inst.n, inst.m, inst.d)?;
    let (n, m) = (inst.n as usize, inst.m as usize);
    let total = (inst.n as u128).checked_pow(inst.m as u32).unwrap_or(u128::MAX);
    if total > BRUTE_FORCE_CAP {
        return Err(Error::Resource {
            what: "assignments n^m",
            needed: total,
            budget: BRUTE_FORCE_CAP,
        });
    }
    let d = inst.d as u64;
    let mut bins = vec![0usize; m];
    let mut loads = vec![0u64; n];
    loads[0] = m as u64;
    let mut short = loads.iter().filter(|&&l| l < d).count();
    let mut hits: u64 = 0;
    loop {
        if short == 0 {
            hits += 1;
        }
        // odometer step over ball positions
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(ExactResult::new(inst, hits.into(), BigUint::from(total)));
            }
            let from = bins[pos];
            let to = if from + 1 == n { 0 } else { from + 1 };
            if loads[from] == d {
                short += 1;
            }
            loads[from] -= 1;
            loads[to] += 1;
            if loads[to] == d {
                short -= 1;
            }
            bins[pos] = to;
            if to != 0 {
                break;
            }
            pos += 1;
        }
    }
}

/// Classical surjection count for `d = 1`:
/// `sum_k (-1)^k C(n, k) (n - k)^m / n^m`.
pub fn inclusion_exclusion_d1(n: u64, m: u64) -> Result<ExactResult> {
    let inst = Instance::new(n, m, 1)?;
    let mut sum = BigInt::zero();
    let mut binom = BigInt::one();
    for k in 0..=n {
        let term = &binom * BigInt::from(n - k).pow(m as u32);
        if k.is_even() {
            sum += term;
        } else {
            sum -= term;
        }
        binom = binom * BigInt::from(n - k) / BigInt::from(k + 1);
    }
    debug_assert!(!sum.is_negative());
    Ok(ExactResult {
        instance: inst,
        probability: Ratio::new(sum, BigInt::from(n).pow(m as u32)),
    })
}

/// `(d n)! / ((d!)^n n^(d n))`, the probability that every bin gets exactly `d`.
pub fn boundary_closed_form(n: u64, d: u32) -> BigRational {
    let factorial = |k: u64| (1..=k).fold(BigUint::one(), |acc, i| acc * i);
    let m = d as u64 * n;
    let numer = factorial(m);
    let denom = factorial(d as u64).pow(n as u32) * BigUint::from(n).pow(m as u32);
    Ratio::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioEntry {
    pub n: u64,
    pub m: u64,
    pub exact: ExactResult,
    /// `Pr[E] / b^n`, or `Pr[E] / (b^n sqrt(d n))` on the `alpha = d` branch.
    pub ratio: f64,
    pub ln_ratio: f64,
}

/// `Pr[E]` normalised by its exponential rate across a range of `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSeries {
    pub alpha: f64,
    pub d: u32,
    pub b: f64,
    pub branch: Branch,
    pub entries: Vec<RatioEntry>,
}

impl RatioSeries {
    pub fn ratios(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.ratio).collect()
    }
}

/// `alpha * n` as an integer, or a domain error when it is not integral.
pub fn balls_for(alpha: f64, n: u64) -> Result<u64> {
    let m = alpha * n as f64;
    let rounded = m.round();
    if (m - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::domain(format!(
            "alpha * n = {m} is not an integer (alpha = {alpha}, n = {n})"
        )));
    }
    Ok(rounded as u64)
}

/// Exact probabilities divided by `b^n` (times `sqrt(d n)` when `alpha = d`).
/// The division happens in log space, so neither side needs to be
/// representable as a double.
pub fn ratio_series(alpha: f64, d: u32, n_values: &[u64]) -> Result<RatioSeries> {
    ratio_series_with_budget(alpha, d, n_values, DEFAULT_BUDGET)
}

/// [`ratio_series`] with an explicit coefficient budget per exact evaluation.
pub fn ratio_series_with_budget(
    alpha: f64,
    d: u32,
    n_values: &[u64],
    budget: u128,
) -> Result<RatioSeries> {
    let params = Params::new(alpha, d)?;
    let ms = n_values
        .iter()
        .map(|&n| balls_for(alpha, n))
        .collect::<Result<Vec<u64>>>()?;
    let base = asymptotics::base(&params)?;
    let entries = n_values
        .iter()
        .zip(ms)
        .map(|(&n, m)| {
            let exact = exact_probability_with_budget(&Instance::new(n, m, d)?, budget)?;
            let mut ln_ratio = exact.ln() - n as f64 * base.ln_b;
            if base.branch == Branch::AlphaEqual {
                ln_ratio -= 0.5 * (d as f64 * n as f64).ln();
            }
            Ok(RatioEntry {
                n,
                m,
                exact,
                ratio: ln_ratio.exp(),
                ln_ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RatioSeries {
        alpha,
        d,
        b: base.b,
        branch: base.branch,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64) -> BigRational {
        Ratio::new(BigInt::from(a), BigInt::from(b))
    }

    fn exact(n: u64, m: u64, d: u32) -> BigRational {
        exact_probability(&Instance::new(n, m, d).unwrap())
            .unwrap()
            .probability
    }

    #[test]
    fn small_values() {
        assert_eq!(exact(1, 5, 3), q(1, 1));
        assert_eq!(exact(2, 4, 1), q(7, 8));
        assert_eq!(exact(2, 4, 2), q(3, 8));
        assert_eq!(exact(3, 6, 2), q(10, 81));
        assert_eq!(exact(3, 2, 1), q(0, 1));
        assert_eq!(exact(1, 2, 3), q(0, 1));
    }

    #[test]
    fn brute_force_values() {
        let bf = |n, m, d| {
            brute_force_probability(&Instance::new(n, m, d).unwrap())
                .unwrap()
                .probability
        };
        assert_eq!(bf(2, 4, 1), q(7, 8));
        assert_eq!(bf(3, 6, 2), q(10, 81));
        assert_eq!(bf(1, 1, 1), q(1, 1));
        assert_eq!(bf(3, 0, 1), q(0, 1));
        assert!(matches!(
            brute_force_probability(&Instance::new(10, 9, 1).unwrap()),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn inclusion_exclusion_values() {
        assert_eq!(inclusion_exclusion_d1(2, 4).unwrap().probability, q(7, 8));
        assert_eq!(inclusion_exclusion_d1(3, 3).unwrap().probability, q(2, 9));
        assert_eq!(inclusion_exclusion_d1(5, 4).unwrap().probability, q(0, 1));
    }

    #[test]
    fn closed_form_at_boundary() {
        for d in 1..=3u32 {
            for n in 1..=8u64 {
                assert_eq!(exact(n, d as u64 * n, d), boundary_closed_form(n, d));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let inst = Instance::new(100, 200, 1).unwrap();
        assert!(matches!(
            exact_probability_with_budget(&inst, 19_999),
            Err(Error::Resource { needed: 20_000, .. })
        ));
        assert!(exact_probability_with_budget(&inst, 20_000).is_ok());
        // infeasible instances never touch the budget
        let inst = Instance::new(100, 50, 1).unwrap();
        assert!(exact_probability_with_budget(&inst, 1).is_ok());
    }

    #[test]
    fn series_matches_single_calls() {
        let all = exact_probabilities_up_to(4, 12, 2).unwrap();
        for r in &all {
            assert_eq!(r.probability, exact(4, r.instance.m, 2));
        }
    }

    #[test]
    fn ln_of_small_probability() {
        let r = exact_probability(&Instance::new(300, 300, 1).unwrap()).unwrap();
        assert!((r.to_f64() / r.ln().exp() - 1.0).abs() < 1e-10);
        // ln(300! / 300^300)
        let expect: f64 = (1..=300).map(|i| (i as f64).ln()).sum::<f64>() - 300.0 * 300f64.ln();
        assert!((r.ln() - expect).abs() < 1e-10 * expect.abs());
    }

    #[test]
    fn ratio_series_rejects_fractional_balls() {
        assert!(matches!(ratio_series(1.5, 1, &[3]), Err(Error::Domain(_))));
        assert!(ratio_series(1.5, 1, &[4]).is_ok());
        assert!(matches!(balls_for(2.5, 3), Err(Error::Domain(_))));
        assert_eq!(balls_for(2.5, 4).unwrap(), 10);
    }

    #[test]
    fn ratio_string_is_reduced() {
        let r = exact_probability(&Instance::new(2, 4, 1).unwrap()).unwrap();
        assert_eq!(r.ratio_string(), "7/8");
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(n in 1u64..=4, m in 0u64..=8, d in 1u32..=3) {
            let inst = Instance::new(n, m, d).unwrap();
            prop_assert_eq!(
                exact_probability(&inst).unwrap().probability,
                brute_force_probability(&inst).unwrap().probability
            );
        }

        #[test]
        fn monotone_in_d_and_m(n in 1u64..=6, m in 0u64..=20, d in 1u32..=4) {
            let p = exact(n, m, d);
            prop_assert!(exact(n, m, d + 1) <= p);
            prop_assert!(exact(n, m + 1, d) >= p);
            prop_assert!(p >= q(0, 1) && p <= q(1, 1));
        }
    }
}
