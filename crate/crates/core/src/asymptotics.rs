//! The base `b(alpha, d)` with `Pr[every bin >= d] = Theta(b^n)`.
//!
//! ```text
//!     alpha > d:  b = alpha^alpha * zeta / (e^alpha * lambda^(alpha - d))
//!     alpha = d:  b = d^d / (e^d * d!)        (with an extra sqrt(d n) factor)
//! ```
//!
//! Both are evaluated in log space; `alpha^alpha` alone overflows a double
//! near `alpha = 144`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ln_factorial;
use crate::truncated_poisson::{Params, TruncatedPoisson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    AlphaGreater,
    AlphaEqual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseResult {
    pub params: Params,
    pub b: f64,
    pub ln_b: f64,
    pub branch: Branch,
    /// Tuned rate; absent on the `alpha = d` branch.
    pub lambda: Option<f64>,
    pub zeta: Option<f64>,
    /// `|E[Z] - alpha| / alpha` for the tuned distribution.
    pub residual: Option<f64>,
    /// Largest tabulated support index of the tuned distribution.
    pub support_limit: Option<u64>,
}

/// Computes `b(alpha, d)`. Fails with a domain error when `alpha < d` or `d < 1`.
pub fn base(params: &Params) -> Result<BaseResult> {
    let params = Params::new(params.alpha, params.d)?;
    let Params { alpha, d } = params;
    if params.is_boundary() {
        let d = d as f64;
        let ln_b = d * d.ln() - d - ln_factorial(params.d as u64);
        return Ok(BaseResult {
            params,
            b: ln_b.exp(),
            ln_b,
            branch: Branch::AlphaEqual,
            lambda: None,
            zeta: None,
            residual: None,
            support_limit: None,
        });
    }

    let tp = TruncatedPoisson::new(params)?;
    let lambda = tp.lambda();
    let ln_b = alpha * alpha.ln() + tp.ln_zeta() - alpha - (alpha - d as f64) * lambda.ln();
    let (mean, _) = tp.moments();
    Ok(BaseResult {
        params,
        b: ln_b.exp(),
        ln_b,
        branch: Branch::AlphaGreater,
        lambda: Some(lambda),
        zeta: Some(tp.zeta()),
        residual: Some((mean - alpha).abs() / alpha),
        support_limit: Some(tp.support_limit()),
    })
}

/// `1 - e^(-alpha)`, the per-bin probability of being nonempty in the limit.
pub fn naive_base(alpha: f64) -> f64 {
    -(-alpha).exp_m1()
}

/// Rounds half-to-even at `places` decimals.
pub fn round_half_even(x: f64, places: i32) -> f64 {
    let scale = 10f64.powi(places);
    (x * scale).round_ties_even() / scale
}

/// Grid of `b(alpha, d)` rounded to 4 decimals, `None` where `alpha < d`.
/// Rows follow `alphas`, columns follow `ds`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseTable {
    pub alphas: Vec<f64>,
    pub ds: Vec<u32>,
    pub cells: Vec<Vec<Option<f64>>>,
}

impl BaseTable {
    pub fn get(&self, alpha: f64, d: u32) -> Option<f64> {
        let r = self.alphas.iter().position(|&a| a == alpha)?;
        let c = self.ds.iter().position(|&x| x == d)?;
        self.cells[r][c]
    }

    /// Number of cells with a value.
    pub fn populated(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_some()).count()
    }
}

/// Tabulates [`base`] over a grid. Cells with `alpha < d` (or `d = 0`) are `None`.
pub fn table(alphas: &[f64], ds: &[u32]) -> BaseTable {
    let cells = alphas
        .iter()
        .map(|&alpha| {
            ds.iter()
                .map(|&d| {
                    Params::new(alpha, d)
                        .and_then(|p| base(&p))
                        .ok()
                        .map(|r| round_half_even(r.b, 4))
                })
                .collect()
        })
        .collect();
    BaseTable {
        alphas: alphas.to_vec(),
        ds: ds.to_vec(),
        cells,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn b(alpha: f64, d: u32) -> f64 {
        base(&Params { alpha, d }).unwrap().b
    }

    #[test]
    fn table_one_spot_values() {
        assert_eq!(round_half_even(b(2.0, 1), 4), 0.8359);
        assert_eq!(round_half_even(b(3.0, 2), 4), 0.7351);
        assert_eq!(round_half_even(b(5.0, 5), 4), 0.1755);
        assert_eq!(round_half_even(b(4.0, 4), 4), 0.1954);
        assert!((b(1.0, 1) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn branches() {
        let r = base(&Params { alpha: 5.0, d: 5 }).unwrap();
        assert_eq!(r.branch, Branch::AlphaEqual);
        assert!(r.lambda.is_none() && r.zeta.is_none());
        let r = base(&Params { alpha: 2.0, d: 1 }).unwrap();
        assert_eq!(r.branch, Branch::AlphaGreater);
        assert!(r.residual.unwrap() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(base(&Params { alpha: 1.0, d: 2 }), Err(Error::Domain(_))));
        assert!(matches!(base(&Params { alpha: 1.0, d: 0 }), Err(Error::Domain(_))));
    }

    #[test]
    fn naive_bound() {
        assert!((naive_base(2.0) - 0.864_664_716_763_387_3).abs() < 1e-15);
        assert_eq!(naive_base(1e3), 1.0);
        for alpha in 1..=5 {
            for d in 1..=alpha {
                assert!(naive_base(alpha as f64) > b(alpha as f64, d));
            }
        }
    }

    #[test]
    fn monotone_in_alpha_and_d() {
        for d in 1..=4u32 {
            let col: Vec<f64> = (0..40).map(|k| b(d as f64 + 0.25 * k as f64, d)).collect();
            assert!(col.windows(2).all(|w| w[1] > w[0]), "d={d}");
        }
        for alpha in [4.0, 6.5, 9.0] {
            let row: Vec<f64> = (1..=4).map(|d| b(alpha, d)).collect();
            assert!(row.windows(2).all(|w| w[1] < w[0]), "alpha={alpha}");
        }
    }

    #[test]
    fn continuous_at_branch_point() {
        for d in 1..=5u32 {
            let edge = b(d as f64, d);
            let near4 = b(d as f64 + 1e-4, d);
            let near6 = b(d as f64 + 1e-6, d);
            assert!((near4 - edge).abs() < 2e-3 * edge, "d={d}");
            assert!((near6 - edge).abs() < 5e-5 * edge, "d={d}");
            assert!((near6 - edge).abs() < (near4 - edge).abs());
        }
    }

    #[test]
    fn large_alpha_stays_finite() {
        // 1 - b is below double resolution here; only finiteness is checkable
        let r = base(&Params { alpha: 300.0, d: 3 }).unwrap();
        assert!(r.ln_b.is_finite() && r.ln_b.abs() < 1e-9);
        assert!(r.b <= 1.0 + 1e-12);
        let r = base(&Params { alpha: 20.0, d: 3 }).unwrap();
        assert!(r.b > 0.0 && r.b < 1.0 && r.b < naive_base(20.0));
        let r = base(&Params { alpha: 200.0, d: 200 }).unwrap();
        assert!(r.b > 0.0 && r.b < 1.0);
        let r = base(&Params { alpha: 180.0, d: 150 }).unwrap();
        assert!(r.b > 0.0 && r.b < 1.0);
    }

    #[test]
    fn grid() {
        let t = table(&[1.0, 2.0], &[1, 2, 3]);
        assert_eq!(t.get(1.0, 2), None);
        assert_eq!(t.get(2.0, 1), Some(0.8359));
        assert_eq!(t.get(2.0, 2), Some(0.2707));
        assert_eq!(t.populated(), 3);
    }
}
