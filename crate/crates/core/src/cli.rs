//! Records emitted by the `minload` command-line tool.
//!
//! Every command produces one [`OutputRecord`] that renders as plain text,
//! JSON or CSV. Exact rationals are written as `"numerator/denominator"`
//! strings and floats use shortest round-trip formatting, so parsing the JSON
//! back yields identical values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::asymptotics::{self, Branch};
use crate::error::{Error, Result};
use crate::exact::{self, Instance};
use crate::simulate;
use crate::truncated_poisson::Params;

pub type Fields = BTreeMap<String, Value>;

/// Key under `results` holding a list of per-row objects.
pub const ROWS: &str = "rows";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub parameters: Fields,
    pub results: Fields,
    pub metadata: Fields,
}

/// Process exit code for an error: 2 for bad input, 3 for an exceeded
/// budget, 1 for anything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) | Error::Precondition(_) => 2,
        Error::Resource { .. } => 3,
        Error::Convergence(_) => 1,
    }
}

fn fields<const N: usize>(pairs: [(&str, Value); N]) -> Fields {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}

fn base_metadata() -> Fields {
    fields([("version", json!(env!("CARGO_PKG_VERSION")))])
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::AlphaGreater => "AlphaGreater",
        Branch::AlphaEqual => "AlphaEqual",
    }
}

impl OutputRecord {
    fn new(command: &str, parameters: Fields, results: Fields, metadata: Fields) -> Self {
        OutputRecord {
            command: command.to_string(),
            parameters,
            results,
            metadata,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record values are plain JSON")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    /// Rows for tabular output: the `rows` list when present, otherwise the
    /// scalar results as one row.
    pub fn rows(&self) -> Vec<Fields> {
        match self.results.get(ROWS) {
            Some(Value::Array(items)) => items
                .iter()
                .filter_map(|v| v.as_object())
                .map(|o| o.iter().map(|(k, v)| (k.clone(), v.clone())).collect())
                .collect(),
            _ => vec![self.results.clone()],
        }
    }

    /// Header row followed by one record per row. Missing values render as `-`.
    pub fn to_csv(&self) -> String {
        let rows = self.rows();
        let mut header: Vec<String> = Vec::new();
        for row in &rows {
            for k in row.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).expect("in-memory write");
        for row in &rows {
            let cells = header.iter().map(|k| cell(row.get(k).unwrap_or(&Value::Null)));
            w.write_record(cells).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    /// `key: value` lines, rows as an aligned table.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.results {
            if k != ROWS {
                out.push_str(&format!("{k}: {}\n", cell(v)));
            }
        }
        if self.results.contains_key(ROWS) {
            let csv = self.to_csv();
            let lines: Vec<Vec<String>> = csv
                .lines()
                .map(|l| l.split(',').map(str::to_string).collect())
                .collect();
            let cols = lines.first().map_or(0, Vec::len);
            let widths: Vec<usize> = (0..cols)
                .map(|c| lines.iter().map(|l| l.get(c).map_or(0, String::len)).max().unwrap_or(0))
                .collect();
            for l in &lines {
                let padded: Vec<String> = l
                    .iter()
                    .zip(&widths)
                    .map(|(s, w)| format!("{s:>w$}"))
                    .collect();
                out.push_str(padded.join("  ").trim_end());
                out.push('\n');
            }
        }
        out
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `b(alpha, d)` with the tuned rate and the naive bound.
pub fn cmd_base(alpha: f64, d: u32) -> Result<OutputRecord> {
    let r = asymptotics::base(&Params::new(alpha, d)?)?;
    let results = fields([
        ("b", json!(r.b)),
        ("branch", json!(branch_name(r.branch))),
        ("lambda", json!(r.lambda)),
        ("zeta", json!(r.zeta)),
        ("naive_base", json!(asymptotics::naive_base(alpha))),
    ]);
    let mut meta = base_metadata();
    meta.insert("solver_residual".into(), json!(r.residual));
    meta.insert("support_limit".into(), json!(r.support_limit));
    Ok(OutputRecord::new(
        "base",
        fields([("alpha", json!(alpha)), ("d", json!(d))]),
        results,
        meta,
    ))
}

/// `b(alpha, d)` for integer `alpha = 1..=alpha_max`, `d = 1..=d_max`, rounded
/// to 4 decimals; `null` (rendered `-`) where `alpha < d`.
pub fn cmd_table(alpha_max: u32, d_max: u32) -> Result<OutputRecord> {
    if alpha_max == 0 || d_max == 0 {
        return Err(Error::domain("--alpha-max and --d-max must be positive"));
    }
    let alphas: Vec<f64> = (1..=alpha_max).map(f64::from).collect();
    let ds: Vec<u32> = (1..=d_max).collect();
    let t = asymptotics::table(&alphas, &ds);
    let mut rows = Vec::new();
    for (alpha, row) in (1..=alpha_max).zip(&t.cells) {
        for (d, c) in ds.iter().zip(row) {
            rows.push(json!({ "alpha": alpha, "d": d, "b": c }));
        }
    }
    let results = fields([
        ("populated", json!(t.populated())),
        (ROWS, Value::Array(rows)),
    ]);
    Ok(OutputRecord::new(
        "table",
        fields([("alpha_max", json!(alpha_max)), ("d_max", json!(d_max))]),
        results,
        base_metadata(),
    ))
}

/// Exact probability as a reduced fraction.
pub fn cmd_exact(n: u64, m: u64, d: u32, budget: u128) -> Result<OutputRecord> {
    let r = exact::exact_probability_with_budget(&Instance::new(n, m, d)?, budget)?;
    let results = fields([
        ("probability", json!(r.ratio_string())),
        ("probability_f64", json!(r.to_f64())),
        ("ln_probability", json!(finite_or_null(r.ln()))),
    ]);
    let mut meta = base_metadata();
    meta.insert("budget".into(), json!(budget.to_string()));
    Ok(OutputRecord::new(
        "exact",
        fields([("n", json!(n)), ("m", json!(m)), ("d", json!(d))]),
        results,
        meta,
    ))
}

fn finite_or_null(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Monte Carlo estimate on the current rayon pool.
pub fn cmd_simulate(n: u64, m: u64, d: u32, trials: u64, seed: u64) -> Result<OutputRecord> {
    let s = simulate::simulate_event(&Instance::new(n, m, d)?, trials, seed)?;
    let results = fields([
        ("trials", json!(s.trials)),
        ("successes", json!(s.successes)),
        ("estimate", json!(s.estimate)),
        ("ci_halfwidth", json!(s.ci_halfwidth)),
    ]);
    let mut meta = base_metadata();
    meta.insert("seed".into(), json!(seed));
    meta.insert("chunk_trials".into(), json!(simulate::CHUNK_TRIALS));
    Ok(OutputRecord::new(
        "simulate",
        fields([
            ("n", json!(n)),
            ("m", json!(m)),
            ("d", json!(d)),
            ("trials", json!(trials)),
            ("seed", json!(seed)),
        ]),
        results,
        meta,
    ))
}

/// Exact probabilities over `n_list` divided by their exponential rate.
pub fn cmd_verify(alpha: f64, d: u32, n_list: &[u64], budget: u128) -> Result<OutputRecord> {
    let series = exact::ratio_series_with_budget(alpha, d, n_list, budget)?;
    let rows: Vec<Value> = series
        .entries
        .iter()
        .map(|e| {
            json!({
                "n": e.n,
                "m": e.m,
                "probability": e.exact.ratio_string(),
                "ratio": e.ratio,
            })
        })
        .collect();
    let results = fields([
        ("b", json!(series.b)),
        ("branch", json!(branch_name(series.branch))),
        (ROWS, Value::Array(rows)),
    ]);
    let mut meta = base_metadata();
    meta.insert("budget".into(), json!(budget.to_string()));
    Ok(OutputRecord::new(
        "verify",
        fields([
            ("alpha", json!(alpha)),
            ("d", json!(d)),
            ("n_list", json!(n_list)),
        ]),
        results,
        meta,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        for rec in [
            cmd_base(2.0, 1).unwrap(),
            cmd_table(3, 4).unwrap(),
            cmd_exact(2, 4, 1, exact::DEFAULT_BUDGET).unwrap(),
            cmd_verify(2.0, 1, &[5, 10], exact::DEFAULT_BUDGET).unwrap(),
        ] {
            let back = OutputRecord::from_json(&rec.to_json()).unwrap();
            assert_eq!(back, rec);
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&cmd_base(1.0, 2).unwrap_err()), 2);
        assert_eq!(exit_code(&cmd_exact(1000, 100_000, 1, 10).unwrap_err()), 3);
        assert_eq!(exit_code(&cmd_verify(1.5, 1, &[3], 100).unwrap_err()), 2);
    }

    #[test]
    fn table_csv_layout() {
        let csv = cmd_table(2, 5).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "alpha,b,d");
        assert_eq!(lines.len(), 11);
        assert!(lines.contains(&"1,-,2"));
        assert!(lines.contains(&"2,0.8359,1"));
    }

    #[test]
    fn exact_record() {
        let rec = cmd_exact(2, 4, 1, exact::DEFAULT_BUDGET).unwrap();
        assert_eq!(rec.results["probability"], json!("7/8"));
        assert!(rec.to_text().contains("probability: 7/8"));
    }
}
