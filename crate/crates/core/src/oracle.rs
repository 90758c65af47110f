//! Brute-force reference computations for cross-checking the main modules.
//!
//! Nothing here calls into `divergences`, `inequalities` or `contraction`:
//! divergences, push-forwards and the binary joint-range function are
//! re-derived from their definitions on plain slices, with no log-domain
//! evaluation and no solver, so a disagreement points at one side only.

use crate::error::{Error, Result};
use crate::probkit::Channel;

/// Largest alphabet [`GridSpec`] enumerates.
pub const MAX_GRID_DIMENSION: usize = 4;
/// Largest input alphabet [`eta_grid`] accepts.
pub const MAX_ETA_GRID_INPUTS: usize = 3;

/// Uniform grid on the probability simplex: all vectors whose entries are
/// multiples of `1 / resolution`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub resolution: usize,
    pub dimension: usize,
}

impl GridSpec {
    pub fn new(resolution: usize, dimension: usize) -> Result<Self> {
        if resolution < 10 {
            return Err(Error::BadParams(format!("grid resolution must be >= 10, got {resolution}")));
        }
        if dimension == 0 {
            return Err(Error::Empty);
        }
        if dimension > MAX_GRID_DIMENSION {
            return Err(Error::AlphabetTooLarge {
                size: dimension,
                limit: MAX_GRID_DIMENSION,
            });
        }
        Ok(Self { resolution, dimension })
    }

    /// Grid points in lexicographic order of their integer counts.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        let mut counts = vec![0usize; self.dimension];
        self.fill(0, self.resolution, &mut counts, &mut out);
        out
    }

    fn fill(&self, pos: usize, left: usize, counts: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if pos == self.dimension - 1 {
            counts[pos] = left;
            let r = self.resolution as f64;
            out.push(counts.iter().map(|&c| c as f64 / r).collect());
            return;
        }
        for c in 0..=left {
            counts[pos] = c;
            self.fill(pos + 1, left - c, counts, out);
        }
    }
}

/// `sum_x q(x) ((p(x)/q(x))^a - 1)` term by term, for `a > 1`, with
/// `0/0` terms dropped and `p > 0 = q` giving infinity.
pub fn naive_f_alpha(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            found: q.len(),
        });
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::UnsupportedAlpha(alpha));
    }
    let mut total = 0.0;
    for i in 0..p.len() {
        if q[i] == 0.0 {
            if p[i] > 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        let ratio = p[i] / q[i];
        total += q[i] * (ratio.powf(alpha) - 1.0);
    }
    Ok(total)
}

fn naive_renyi(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..p.len() {
        if p[i] == 0.0 {
            continue;
        }
        if q[i] == 0.0 {
            return f64::INFINITY;
        }
        s += p[i].powf(alpha) * q[i].powf(1.0 - alpha);
    }
    s.ln() / (alpha - 1.0)
}

fn naive_tv(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

fn naive_psi(p: f64, t: f64, alpha: f64) -> f64 {
    let left = if p == 0.0 { 0.0 } else { p.powf(alpha) / (p + t).powf(alpha - 1.0) };
    let right_den = 1.0 - p - t;
    let right = if right_den <= 0.0 {
        if t == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (1.0 - p).powf(alpha) / right_den.powf(alpha - 1.0)
    };
    left + right - 1.0
}

/// Minimum of the binary joint-range function over the uniform grid
/// `p = i (1 - t) / resolution`, `i = 0..=resolution`. Since the grid is a
/// subset of `[0, 1 - t]`, this bounds the envelope from above.
pub fn envelope_grid(alpha: f64, t: f64, resolution: usize) -> Result<f64> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::UnsupportedAlpha(alpha));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::OutOfRange {
            name: "t",
            value: t,
            range: "[0, 1)",
        });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let width = 1.0 - t;
    let mut best = f64::INFINITY;
    for i in 0..=resolution {
        let p = width * i as f64 / resolution as f64;
        best = best.min(naive_psi(p, t, alpha));
    }
    Ok(best)
}

/// Largest Rényi contraction ratio over all pairs of points of a simplex
/// grid, for channels with at most three inputs. Pairs with zero or
/// infinite input divergence are skipped.
pub fn eta_grid(channel: &Channel, alpha: f64, resolution: usize) -> Result<f64> {
    let n = channel.input_size();
    if n > MAX_ETA_GRID_INPUTS {
        return Err(Error::AlphabetTooLarge {
            size: n,
            limit: MAX_ETA_GRID_INPUTS,
        });
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::UnsupportedAlpha(alpha));
    }
    let rows = channel.to_rows();
    let m = channel.output_size();
    let push = |input: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; m];
        for x in 0..n {
            for y in 0..m {
                out[y] += input[x] * rows[x][y];
            }
        }
        out
    };
    let points = GridSpec::new(resolution, n)?.points();
    let outputs: Vec<Vec<f64>> = points.iter().map(|p| push(p)).collect();
    let mut best: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let din = naive_renyi(p, q, alpha);
            if !(din > 0.0 && din.is_finite()) {
                continue;
            }
            let dout = naive_renyi(&outputs[i], &outputs[j], alpha);
            best = best.max(dout / din);
        }
    }
    Ok(best)
}

/// Largest output/input TV ratio over pairs of grid points.
pub fn eta_tv_grid(channel: &Channel, resolution: usize) -> Result<f64> {
    let n = channel.input_size();
    let rows = channel.to_rows();
    let points = GridSpec::new(resolution, n)?.points();
    let out: Vec<Vec<f64>> = points
        .iter()
        .map(|p| {
            (0..channel.output_size())
                .map(|y| (0..n).map(|x| p[x] * rows[x][y]).sum())
                .collect()
        })
        .collect();
    let mut best: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let din = naive_tv(&points[i], &points[j]);
            if din > 0.0 {
                best = best.max(naive_tv(&out[i], &out[j]) / din);
            }
        }
    }
    Ok(best)
}
