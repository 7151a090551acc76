//! Sample grids and residual reports.
//!
//! Operator identities are checked by evaluating coefficient functions on a
//! uniform grid. Points where some denominator is within `tau_zero` of zero are
//! skipped and listed in the report; a check passes only when at least
//! [`MIN_USABLE_FRACTION`] of the grid was usable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{ScalarFn, Tape, TAU_ZERO};

pub const MIN_USABLE_FRACTION: f64 = 0.9;

/// Default tolerance for sampled operator equality.
pub const EQUALITY_TOL: f64 = 1e-9;
/// Default tolerance for the remainder of an exact division.
pub const REMAINDER_TOL: f64 = 1e-8;
/// Default threshold below which a Wronskian counts as vanishing.
pub const TAU_WRON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub count: usize,
    #[serde(default = "default_tau_zero")]
    pub tau_zero: f64,
}

fn default_tau_zero() -> f64 {
    TAU_ZERO
}

impl Default for Grid {
    fn default() -> Self {
        Grid { start: -5.0, end: 5.0, count: 101, tau_zero: TAU_ZERO }
    }
}

impl Grid {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || count == 0 || (count > 1 && start >= end) {
            return Err(Error::Schema(format!("invalid grid [{start}, {end}] with {count} points")));
        }
        Ok(Grid { start, end, count, tau_zero: TAU_ZERO })
    }

    pub fn with_tau_zero(mut self, tau_zero: f64) -> Self {
        self.tau_zero = tau_zero;
        self
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let step = if self.count > 1 { (self.end - self.start) / (self.count - 1) as f64 } else { 0.0 };
        (0..self.count).map(move |k| if k + 1 == self.count && self.count > 1 { self.end } else { self.start + step * k as f64 })
    }

    /// Evaluates the tape at every grid point, collecting successes and the
    /// list of skipped points.
    pub fn sweep<T>(&self, tape: &Tape, mut f: impl FnMut(f64, &[num_complex::Complex64]) -> T) -> (Vec<T>, Vec<f64>) {
        let mut out = Vec::with_capacity(self.count);
        let mut skipped = Vec::new();
        for x in self.points() {
            match tape.eval_point(x, self.tau_zero) {
                Ok(vals) => out.push(f(x, &vals)),
                Err(_) => skipped.push(x),
            }
        }
        (out, skipped)
    }
}

/// Tolerance bundle used by the scenario runner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub equality: f64,
    pub remainder: f64,
    pub tau_zero: f64,
    pub tau_wron: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { equality: EQUALITY_TOL, remainder: REMAINDER_TOL, tau_zero: TAU_ZERO, tau_wron: TAU_WRON }
    }
}

/// Outcome of a sampled (or exact) residual check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub max: f64,
    pub tol: f64,
    pub usable: usize,
    pub total: usize,
    pub skipped: Vec<f64>,
}

impl Residual {
    /// A residual computed without sampling.
    pub fn exact(max: f64, tol: f64) -> Self {
        Residual { max, tol, usable: 1, total: 1, skipped: Vec::new() }
    }

    pub fn usable_fraction(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.usable as f64 / self.total as f64
        }
    }

    pub fn passed(&self) -> bool {
        self.max <= self.tol && self.usable_fraction() >= MIN_USABLE_FRACTION
    }

    /// Worst case of two checks over the same grid.
    pub fn combine(&self, other: &Residual) -> Residual {
        let mut skipped = self.skipped.clone();
        for x in &other.skipped {
            if !skipped.contains(x) {
                skipped.push(*x);
            }
        }
        skipped.sort_by(f64::total_cmp);
        let total = self.total.max(other.total);
        Residual {
            max: self.max.max(other.max),
            tol: self.tol.min(other.tol),
            usable: total.saturating_sub(skipped.len()).min(self.usable).min(other.usable),
            total,
            skipped,
        }
    }
}

/// Max over the grid of `|f|` for all functions in `fns`.
pub fn sample_max_abs(fns: &[ScalarFn], grid: &Grid, tol: f64) -> Residual {
    let tape = Tape::compile(fns);
    let (maxima, skipped) =
        grid.sweep(&tape, |_, vals| vals.iter().map(|v| v.norm()).fold(0.0, f64::max));
    Residual {
        max: maxima.iter().copied().fold(0.0, f64::max),
        tol,
        usable: maxima.len(),
        total: grid.count,
        skipped,
    }
}

/// Max over the grid of `|a_k - b_k|`, pairing the two lists elementwise.
pub fn sample_max_diff(a: &[ScalarFn], b: &[ScalarFn], grid: &Grid, tol: f64) -> Residual {
    assert_eq!(a.len(), b.len(), "paired function lists must have equal length");
    let tape = Tape::compile(a.iter().chain(b.iter()));
    let m = a.len();
    let (maxima, skipped) = grid.sweep(&tape, |_, vals| {
        (0..m).map(|k| (vals[k] - vals[m + k]).norm()).fold(0.0, f64::max)
    });
    Residual {
        max: maxima.iter().copied().fold(0.0, f64::max),
        tol,
        usable: maxima.len(),
        total: grid.count,
        skipped,
    }
}
