//! Finite discrete pmfs on the integers and the log-concavity checks built on
//! them: testing, convolution, peak statistics, and the two peak-probability
//! bounds used for the `1/sqrt(n)` law.

use crate::error::{Error, Result};

/// Relative slack in `p_i^2 >= p_{i-1} p_{i+1}`.
pub const LOG_CONCAVE_TOL: f64 = 1e-12;
/// Entries at or below this count as zero when checking support connectivity.
pub const ZERO_FLOOR: f64 = 1e-300;
/// Default trimming threshold for convolution tails.
pub const CONVOLVE_DROP: f64 = 1e-17;
/// Default cap on the length of a convolution result.
pub const DEFAULT_MAX_LEN: usize = 10_000_000;

/// A pmf with `probs[k] = Pr[X = offset + k]`.
///
/// `lost_mass` records probability removed by tail truncation upstream, so
/// `probs` sums to `1 - lost_mass` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf {
    offset: i64,
    probs: Vec<f64>,
    lost_mass: f64,
}

impl Pmf {
    /// Checks that entries are finite, nonnegative and sum to 1 within `1e-10`.
    pub fn new(offset: i64, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::domain("pmf needs at least one entry"));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::domain(format!("invalid probability {bad}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Pmf {
            offset,
            probs,
            lost_mass: 0.0,
        })
    }

    pub(crate) fn from_parts(offset: i64, probs: Vec<f64>, lost_mass: f64) -> Self {
        Pmf {
            offset,
            probs,
            lost_mass,
        }
    }

    /// `delta_k`.
    pub fn point_mass(k: i64) -> Self {
        Pmf::from_parts(k, vec![1.0], 0.0)
    }

    /// Uniform on `{lo, ..., lo + count - 1}`.
    pub fn uniform(lo: i64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::domain("uniform pmf needs count >= 1"));
        }
        Ok(Pmf::from_parts(lo, vec![1.0 / count as f64; count], 0.0))
    }

    /// Geometric on `{1, 2, ...}` with `p_i = (1 - q)^(i-1) q`, cut where the
    /// remaining tail drops below `1e-15`.
    pub fn geometric(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::domain(format!("geometric parameter must be in (0, 1], got {q}")));
        }
        let mut probs = Vec::new();
        let mut p = q;
        // tail after index i is (1 - q)^i
        let mut tail = 1.0 - q;
        loop {
            probs.push(p);
            if tail < 1e-15 {
                break;
            }
            p *= 1.0 - q;
            tail *= 1.0 - q;
        }
        Ok(Pmf::from_parts(1, probs, tail))
    }

    /// Poisson with rate `lambda`, cut where the remaining tail drops below `1e-15`.
    pub fn poisson(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("Poisson rate must be positive, got {lambda}")));
        }
        // sum in scaled form, then normalise; avoids e^-lambda underflow
        let mut terms = vec![1.0];
        let mut i = 0u64;
        let mut sum = 1.0;
        loop {
            i += 1;
            let t = terms[terms.len() - 1] * lambda / i as f64;
            if i as f64 > lambda && t < 1e-18 * sum {
                break;
            }
            sum += t;
            terms.push(t);
        }
        let probs: Vec<f64> = terms.iter().map(|t| t / sum).collect();
        let mut acc = 0.0;
        let mut keep = probs.len();
        for k in (0..probs.len()).rev() {
            if acc + probs[k] >= 1e-15 {
                keep = k + 1;
                break;
            }
            acc += probs[k];
        }
        Ok(Pmf::from_parts(0, probs[..keep].to_vec(), acc))
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn lost_mass(&self) -> f64 {
        self.lost_mass
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Index of the last stored entry.
    pub fn max_index(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    /// `Pr[X = i]`, zero outside the stored range.
    pub fn prob(&self, i: i64) -> f64 {
        if i < self.offset {
            return 0.0;
        }
        self.probs.get((i - self.offset) as usize).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mean of the stored entries, normalised by their total.
    pub fn mean(&self) -> f64 {
        let total = self.total();
        let first: f64 = self
            .probs
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum();
        self.offset as f64 + first / total
    }

    pub fn variance(&self) -> f64 {
        let total = self.total();
        let centre = self.mean() - self.offset as f64;
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let dev = k as f64 - centre;
                dev * dev * p
            })
            .sum::<f64>()
            / total
    }

    /// True when the entries above [`ZERO_FLOOR`] form one contiguous run.
    pub fn has_connected_support(&self) -> bool {
        let nonzero = |p: &f64| *p > ZERO_FLOOR;
        let Some(first) = self.probs.iter().position(nonzero) else {
            return false;
        };
        let last = self.probs.iter().rposition(nonzero).unwrap_or(first);
        self.probs[first..=last].iter().all(nonzero)
    }
}

/// Peak and mean statistics of a pmf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakStats {
    /// Largest probability.
    pub p_hat: f64,
    /// Smallest index attaining `p_hat`.
    pub peak_index: i64,
    pub mu: f64,
    /// `max(p_floor(mu), p_ceil(mu))`.
    pub p_mu: f64,
    pub sigma: f64,
}

/// Connected support and `p_i^2 >= p_{i-1} p_{i+1} (1 - 1e-12)` everywhere.
///
/// The inequality is checked in ratio form, `p_i / p_{i-1} >= p_{i+1} / p_i`,
/// so tiny tail entries do not underflow.
pub fn is_log_concave(pmf: &Pmf) -> bool {
    if !pmf.has_connected_support() {
        return false;
    }
    let p = pmf.probs();
    p.windows(3).all(|w| {
        let (prev, mid, next) = (w[0], w[1], w[2]);
        if prev <= ZERO_FLOOR || next <= ZERO_FLOOR {
            return true;
        }
        mid / prev >= (next / mid) * (1.0 - LOG_CONCAVE_TOL)
    })
}

/// Tail trimming and size cap for [`convolve_with`].
#[derive(Debug, Clone, Copy)]
pub struct ConvolveOptions {
    /// Leading and trailing entries below this are dropped; their mass is added
    /// to `lost_mass`.
    pub drop_below: f64,
    pub max_len: usize,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        ConvolveOptions {
            drop_below: CONVOLVE_DROP,
            max_len: DEFAULT_MAX_LEN,
        }
    }
}

/// Convolution with the default options.
pub fn convolve(a: &Pmf, b: &Pmf) -> Result<Pmf> {
    convolve_with(a, b, ConvolveOptions::default())
}

/// Schoolbook convolution; the result starts at `a.offset + b.offset`.
pub fn convolve_with(a: &Pmf, b: &Pmf, opts: ConvolveOptions) -> Result<Pmf> {
    let len = a.len() + b.len() - 1;
    if len > opts.max_len {
        return Err(Error::Resource {
            what: "convolution length",
            needed: len as u128,
            budget: opts.max_len as u128,
        });
    }
    let mut out = vec![0.0; len];
    for (i, &x) in a.probs().iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (o, &y) in out[i..].iter_mut().zip(b.probs()) {
            *o += x * y;
        }
    }
    let mut lost = a.lost_mass + b.lost_mass;
    let mut offset = a.offset + b.offset;

    let lead = out.iter().take_while(|&&p| p < opts.drop_below).count();
    // keep at least one entry
    let lead = lead.min(len - 1);
    lost += out[..lead].iter().sum::<f64>();
    offset += lead as i64;
    let mut probs = out.split_off(lead);
    while probs.len() > 1 && probs[probs.len() - 1] < opts.drop_below {
        lost += probs.pop().unwrap_or(0.0);
    }
    Ok(Pmf::from_parts(offset, probs, lost))
}

/// Peak probability (ties toward the smallest index), mean, standard
/// deviation and `p_mu`.
pub fn peak_stats(pmf: &Pmf) -> PeakStats {
    let mut peak_k = 0;
    for (k, &p) in pmf.probs().iter().enumerate() {
        if p > pmf.probs()[peak_k] {
            peak_k = k;
        }
    }
    let mu = snap_to_integer(pmf.mean());
    let p_mu = pmf
        .prob(mu.floor() as i64)
        .max(pmf.prob(mu.ceil() as i64));
    PeakStats {
        p_hat: pmf.probs()[peak_k],
        peak_index: pmf.offset() + peak_k as i64,
        mu,
        p_mu,
        sigma: pmf.variance().sqrt(),
    }
}

/// Rounds `x` to the nearest integer when within `1e-9` relative of it, so
/// that an integral mean computed with rounding noise picks a single index.
fn snap_to_integer(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// Returns `(p_mu / p_hat, 1/e < ratio <= 1 + 1e-12)`.
pub fn verify_lemma5(pmf: &Pmf) -> Result<(f64, bool)> {
    if !is_log_concave(pmf) {
        return Err(Error::Precondition(
            "mean-vs-peak bound needs a log-concave pmf".into(),
        ));
    }
    let stats = peak_stats(pmf);
    let ratio = stats.p_mu / stats.p_hat;
    let holds = ratio > (-1.0f64).exp() && ratio <= 1.0 + 1e-12;
    Ok((ratio, holds))
}

/// `(sigma, p_hat * (1 + sigma))` for each pmf. Bounded products across a
/// family are the empirical form of `p_hat = Theta(1 / (1 + sigma))`.
pub fn verify_lemma4(pmfs: &[Pmf]) -> Result<Vec<(f64, f64)>> {
    pmfs.iter()
        .map(|pmf| {
            if !is_log_concave(pmf) {
                return Err(Error::Precondition(
                    "peak-vs-spread bound needs a log-concave pmf".into(),
                ));
            }
            let s = peak_stats(pmf);
            Ok((s.sigma, s.p_hat * (1.0 + s.sigma)))
        })
        .collect()
}

/// `(max - min) / max` over positive values; 0 for fewer than two values.
pub fn relative_band_width(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.len() < 2 {
        0.0
    } else {
        (max - min) / max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classic_families_are_log_concave() {
        for lambda in [0.1, 1.0, 4.5, 30.0] {
            assert!(is_log_concave(&Pmf::poisson(lambda).unwrap()), "{lambda}");
        }
        for q in [0.9, 0.5, 0.1, 0.001] {
            assert!(is_log_concave(&Pmf::geometric(q).unwrap()), "{q}");
        }
        assert!(is_log_concave(&Pmf::uniform(-3, 7).unwrap()));
        assert!(is_log_concave(&Pmf::point_mass(5)));
    }

    #[test]
    fn gap_in_support_fails() {
        let p = Pmf::new(0, vec![0.5, 0.0, 0.5]).unwrap();
        assert!(!p.has_connected_support());
        assert!(!is_log_concave(&p));
        // bimodal with full support also fails
        let p = Pmf::new(0, vec![0.4, 0.1, 0.5]).unwrap();
        assert!(!is_log_concave(&p));
    }

    #[test]
    fn new_rejects_bad_input() {
        assert!(Pmf::new(0, vec![]).is_err());
        assert!(Pmf::new(0, vec![0.5, 0.4]).is_err());
        assert!(Pmf::new(0, vec![1.5, -0.5]).is_err());
        assert!(Pmf::geometric(0.0).is_err());
        assert!(Pmf::uniform(0, 0).is_err());
    }

    #[test]
    fn convolve_with_point_mass_shifts() {
        let b = Pmf::poisson(2.0).unwrap();
        let c = convolve(&Pmf::point_mass(7), &b).unwrap();
        assert_eq!(c.offset(), b.offset() + 7);
        assert_eq!(c.probs(), b.probs());
    }

    #[test]
    fn convolve_adds_means() {
        let a = Pmf::poisson(2.0).unwrap();
        let b = Pmf::geometric(0.3).unwrap();
        let c = convolve(&a, &b).unwrap();
        assert!((c.mean() - a.mean() - b.mean()).abs() < 1e-10);
        assert!(is_log_concave(&c));
    }

    #[test]
    fn convolve_budget() {
        let a = Pmf::uniform(0, 10).unwrap();
        let opts = ConvolveOptions {
            max_len: 15,
            ..Default::default()
        };
        assert!(matches!(
            convolve_with(&a, &a, opts),
            Err(Error::Resource { needed: 19, .. })
        ));
    }

    #[test]
    fn convolve_trims_tails() {
        let a = Pmf::new(0, vec![1e-20, 0.5, 0.5 - 1e-20]).unwrap();
        let c = convolve(&a, &Pmf::point_mass(0)).unwrap();
        assert_eq!(c.offset(), 1);
        assert_eq!(c.len(), 2);
        assert!(c.lost_mass() > 0.0);
    }

    #[test]
    fn peak_stats_examples() {
        let s = peak_stats(&Pmf::uniform(0, 10).unwrap());
        assert!((s.p_hat - 0.1).abs() < 1e-15);
        assert_eq!(s.peak_index, 0);
        assert!((s.mu - 4.5).abs() < 1e-12);
        assert!((s.p_mu - 0.1).abs() < 1e-15);

        let s = peak_stats(&Pmf::point_mass(3));
        assert_eq!((s.p_hat, s.p_mu, s.sigma, s.peak_index), (1.0, 1.0, 0.0, 3));

        let s = peak_stats(&Pmf::geometric(0.5).unwrap());
        assert_eq!(s.peak_index, 1);
        assert!((s.p_hat - 0.5).abs() < 1e-15);
        assert!((s.mu - 2.0).abs() < 1e-12);
        assert!((s.p_mu - 0.25).abs() < 1e-12);
    }

    #[test]
    fn lemma5_examples() {
        assert_eq!(verify_lemma5(&Pmf::point_mass(0)).unwrap(), (1.0, true));
        let q = 1e-3;
        let (ratio, holds) = verify_lemma5(&Pmf::geometric(q).unwrap()).unwrap();
        let closed = (1.0 - q).powi((1.0 / q).floor() as i32 - 1);
        assert!((ratio - closed).abs() < 1e-9, "{ratio} vs {closed}");
        assert!(holds && ratio > (-1.0f64).exp());
        let bad = Pmf::new(0, vec![0.5, 0.0, 0.5]).unwrap();
        assert!(matches!(verify_lemma5(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn lemma4_uniform_products() {
        let pmfs: Vec<Pmf> = [1usize, 10, 100, 1000]
            .iter()
            .map(|&k| Pmf::uniform(0, k).unwrap())
            .collect();
        let out = verify_lemma4(&pmfs).unwrap();
        assert_eq!(out[0], (0.0, 1.0));
        for (&k, &(_, prod)) in [1usize, 10, 100, 1000].iter().zip(&out) {
            let k = k as f64;
            let closed = (1.0 + ((k * k - 1.0) / 12.0).sqrt()) / k;
            assert!((prod - closed).abs() < 1e-9);
        }
        assert!((out[3].1 - 1.0 / 12f64.sqrt()).abs() < 2e-3);
    }

    #[test]
    fn band_width() {
        assert_eq!(relative_band_width(&[2.0]), 0.0);
        assert!((relative_band_width(&[1.0, 2.0, 1.5]) - 0.5).abs() < 1e-15);
    }

    fn log_concave_strategy() -> impl Strategy<Value = Pmf> {
        // exp of a concave sequence: cumulative sums of decreasing slopes
        (prop::collection::vec(0.0f64..3.0, 1..40), -5.0f64..5.0, -20i64..20).prop_map(
            |(mut drops, start, offset)| {
                drops.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut slope = start;
                let mut logp = vec![0.0];
                for d in drops {
                    slope -= d;
                    logp.push(logp[logp.len() - 1] + slope);
                }
                let max = logp.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<f64> = logp.iter().map(|l| (l - max).exp()).collect();
                let s: f64 = w.iter().sum();
                Pmf::new(offset, w.iter().map(|x| x / s).collect()).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn peak_matches_scan(pmf in log_concave_strategy()) {
            let s = peak_stats(&pmf);
            let max = pmf.probs().iter().copied().fold(0.0, f64::max);
            let first = pmf.probs().iter().position(|&p| p == max).unwrap();
            prop_assert_eq!(s.p_hat, max);
            prop_assert_eq!(s.peak_index, pmf.offset() + first as i64);
            prop_assert!(s.p_mu <= s.p_hat);
            prop_assert!(s.p_hat >= 1.0 / pmf.len() as f64 - 1e-15);
        }

        #[test]
        fn generated_pmfs_satisfy_both_bounds(pmf in log_concave_strategy()) {
            prop_assert!(is_log_concave(&pmf));
            let (ratio, holds) = verify_lemma5(&pmf).unwrap();
            prop_assert!(holds, "ratio {}", ratio);
        }

        #[test]
        fn self_convolution_stays_log_concave(pmf in log_concave_strategy(), n in 1usize..12) {
            let mut acc = pmf.clone();
            for _ in 1..n {
                acc = convolve(&acc, &pmf).unwrap();
                prop_assert!(is_log_concave(&acc));
            }
            prop_assert!((acc.mean() - n as f64 * pmf.mean()).abs() < 1e-8 * (1.0 + acc.mean().abs()));
        }
    }
}
