//! One-parameter sweeps of a criterion margin and threshold location.

use rayon::prelude::*;
use serde::Serialize;

use crate::criterion::CriterionReport;
use crate::{Error, Result};

/// Bisection stops once the bracket is no wider than this.
pub const BISECTION_TOL: f64 = 1e-9;

/// Points of the default sweep grid on `[0, 1]`.
pub const GRID_POINTS: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootInfo {
    pub iterations: usize,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    Root { value: f64, info: RootInfo },
    NoSignChange { f_lo: f64, f_hi: f64 },
}

impl Threshold {
    pub fn value(&self) -> Option<f64> {
        match self {
            Threshold::Root { value, .. } => Some(*value),
            Threshold::NoSignChange { .. } => None,
        }
    }
}

fn detected(v: f64) -> bool {
    v > 0.0
}

fn bisect<F>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<(f64, RootInfo)>
where
    F: Fn(f64) -> Result<f64>,
{
    let side_lo = detected(f_lo);
    let mut iterations = 0;
    while hi - lo > BISECTION_TOL {
        let mid = 0.5 * (lo + hi);
        if detected(f(mid)?) == side_lo {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok((
        0.5 * (lo + hi),
        RootInfo {
            iterations,
            bracket: (lo, hi),
        },
    ))
}

/// Bisection for the point where `f` changes between `> 0` and `<= 0`.
pub fn threshold_solve<F>(f: F, lo: f64, hi: f64) -> Result<Threshold>
where
    F: Fn(f64) -> Result<f64>,
{
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::InvalidBracket { lo, hi });
    }
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if detected(f_lo) == detected(f_hi) {
        return Ok(Threshold::NoSignChange { f_lo, f_hi });
    }
    let (value, info) = bisect(&f, lo, hi, f_lo)?;
    Ok(Threshold::Root { value, info })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub trace_norm: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub param: String,
    pub rows: Vec<SweepRow>,
    /// Refined location of the first verdict change on the grid.
    pub threshold: Option<f64>,
    pub root: Option<RootInfo>,
}

impl SweepResult {
    /// CSV with header `param,value,trace_norm,bound,margin`, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,value,trace_norm,bound,margin\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.11e},{:.11e},{:.11e},{:.11e}\n",
                self.param, r.value, r.trace_norm, r.bound, r.margin
            ));
        }
        out
    }

    pub fn margin_at(&self, value: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| (r.value - value).abs() < 1e-15)
            .map(|r| r.margin)
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Evaluates `eval` on the grid (concurrently, output in grid order), then
/// bisects the first interval on which the verdict changes.
pub fn sweep<F>(param: &str, grid: &[f64], eval: F) -> Result<SweepResult>
where
    F: Fn(f64) -> Result<CriterionReport> + Sync,
{
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&v| {
            eval(v).map(|r| SweepRow {
                value: v,
                trace_norm: r.trace_norm,
                bound: r.bound,
                margin: r.margin,
            })
        })
        .collect::<Result<_>>()?;

    let change = rows
        .windows(2)
        .find(|w| detected(w[0].margin) != detected(w[1].margin));
    let (threshold, root) = match change {
        Some(w) => {
            let margin = |v: f64| eval(v).map(|r| r.margin);
            let (value, info) = bisect(&margin, w[0].value, w[1].value, w[0].margin)?;
            (Some(value), Some(info))
        }
        None => (None, None),
    };
    Ok(SweepResult {
        param: param.to_string(),
        rows,
        threshold,
        root,
    })
}
