//! Counting constant states in a sampled profile.

use super::SimulationFrame;
use crate::state::PrimitiveState;

pub const DEFAULT_SLOPE_TOL: f64 = 1e-3;

pub fn default_min_width(n_cells: usize) -> usize {
    (n_cells / 100).max(5)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Plateau {
    pub start: usize,
    /// One past the last cell.
    pub end: usize,
    pub mean: f64,
    /// Mean over the central half of the run, away from wave tails.
    pub core_mean: f64,
}

impl Plateau {
    pub fn width(&self) -> usize {
        self.end - self.start
    }
}

/// Maximal runs of at least `min_width` flat cells. Cell `j` is flat when
/// `|v[j+1] - v[j-1]| < slope_tol * range / (dx * n)`, with one-sided
/// differences at the ends. Neighbouring runs whose means differ by at most
/// `10 slope_tol range` are merged.
pub fn find_plateaus(values: &[f64], dx: f64, slope_tol: f64, min_width: usize) -> Vec<Plateau> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let range = hi - lo;
    let mean = |s: usize, e: usize| values[s..e].iter().sum::<f64>() / (e - s) as f64;
    if range == 0.0 {
        return vec![Plateau { start: 0, end: n, mean: values[0], core_mean: values[0] }];
    }
    let threshold = slope_tol * range / (dx * n as f64);
    let flat = |j: usize| {
        let (l, r) = (j.saturating_sub(1), (j + 1).min(n - 1));
        if l == r {
            return true;
        }
        (values[r] - values[l]).abs() < threshold
    };

    let mut runs = Vec::new();
    let mut start = None;
    for j in 0..=n {
        match (j < n && flat(j), start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                if j - s >= min_width.max(1) {
                    let q = (j - s) / 4;
                    runs.push(Plateau { start: s, end: j, mean: mean(s, j), core_mean: mean(s + q, j - q) });
                }
                start = None;
            }
            _ => {}
        }
    }

    let merge_tol = 10.0 * slope_tol * range;
    let mut merged: Vec<Plateau> = Vec::new();
    for run in runs {
        match merged.last_mut() {
            Some(last) if (last.mean - run.mean).abs() <= merge_tol => {
                let (w0, w1) = (last.width() as f64, run.width() as f64);
                last.mean = (last.mean * w0 + run.mean * w1) / (w0 + w1);
                last.end = run.end;
                let q = last.width() / 4;
                last.core_mean = mean(last.start + q, last.end - q);
            }
            _ => merged.push(run),
        }
    }
    merged
}

pub fn count_plateaus(values: &[f64], dx: f64, slope_tol: f64, min_width: usize) -> usize {
    find_plateaus(values, dx, slope_tol, min_width).len()
}

/// [`count_plateaus`] on one primitive field of a frame.
pub fn count_plateaus_in(
    frame: &SimulationFrame,
    field: fn(&PrimitiveState) -> f64,
    dx: f64,
    slope_tol: f64,
    min_width: usize,
) -> usize {
    let values: Vec<f64> = frame.primitive.iter().map(field).collect();
    count_plateaus(&values, dx, slope_tol, min_width)
}
