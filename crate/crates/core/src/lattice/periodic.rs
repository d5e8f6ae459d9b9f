//! `phi^(n)` on periodic grids much smaller than its support.
//!
//! Away from the drift `phi^(n)` decays exponentially, so a DFT of length
//! `N < n * extent + 1` aliases only negligible tails. Each axis starts short
//! and is doubled until the periodized values are below `tol * sup` where
//! the period is cut; an axis that reaches the full support length is exact.

use num_complex::Complex64;

use super::dense::strides;
use super::fft::{check_cap, fft_grid_len, grid_shape, periodized_power};
use super::LatticeFunction;
use crate::error::{check_dim, Error, Result};

#[derive(Clone, Debug)]
pub struct TruncatedPower {
    /// Lattice point stored at index zero on each axis.
    origin: Vec<i64>,
    shape: Vec<usize>,
    /// Number of valid indices per axis (less than `shape` on exact axes).
    valid: Vec<usize>,
    data: Vec<Complex64>,
    level: f64,
}

fn axis_profile(data: &[Complex64], shape: &[usize], axis: usize) -> Vec<f64> {
    let st = strides(shape);
    let mut prof = vec![0.0f64; shape[axis]];
    for (idx, v) in data.iter().enumerate() {
        let i = (idx / st[axis]) % shape[axis];
        prof[i] = prof[i].max(v.norm());
    }
    prof
}

/// `phi^(n)` accurate to about `tol * sup |phi^(n)|`.
///
/// With `center`, each period is laid out as `[center - N/2, center + N/2)`
/// and the guard bands at both ends must be small; values outside read as
/// zero. Without it the period is cut where the axis profile is smallest,
/// which fixes values only modulo `N` but suffices for sup norms.
pub fn truncated_power(
    f: &LatticeFunction,
    n: u64,
    center: Option<&[f64]>,
    tol: f64,
    cap: usize,
) -> Result<TruncatedPower> {
    if n == 0 {
        return Err(Error::invalid("convolution power requires n >= 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    let d = f.dim();
    if let Some(c) = center {
        check_dim(d, c.len())?;
    }
    let (lo, _) = f
        .support_box()
        .ok_or_else(|| Error::invalid("cannot evaluate powers of the zero function"))?;
    let lo: Vec<i64> = lo.iter().map(|l| l * n as i64).collect();
    let full = grid_shape(f, n)?;
    let ext = f.extent();
    let out_len: Vec<usize> = ext.iter().map(|&e| e * n as usize + 1).collect();
    let root = (n as f64).sqrt().ceil() as usize;
    let mut shape: Vec<usize> = (0..d)
        .map(|k| fft_grid_len((ext[k] * root).max(64)).min(full[k]))
        .collect();
    loop {
        let exact: Vec<bool> = (0..d).map(|k| shape[k] >= out_len[k]).collect();
        for k in 0..d {
            if exact[k] {
                shape[k] = full[k];
            }
        }
        check_cap(&shape, cap)?;
        let data = periodized_power(f, n, &shape);
        let sup = data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if sup == 0.0 {
            return Ok(TruncatedPower {
                origin: lo,
                valid: shape.clone(),
                shape,
                data,
                level: 0.0,
            });
        }
        let mut origin = lo.clone();
        let mut valid = shape.clone();
        let mut level = 0.0f64;
        let mut grow = vec![false; d];
        for k in 0..d {
            if exact[k] {
                valid[k] = out_len[k];
                continue;
            }
            let m = shape[k] as i64;
            let prof = axis_profile(&data, &shape, k);
            let (start, edge) = match center {
                Some(c) => {
                    let start = c[k].round() as i64 - m / 2;
                    let guard = (m / 32).max(2);
                    let at = |x: i64| prof[(x - lo[k]).rem_euclid(m) as usize];
                    let edge = (0..guard).map(|j| at(start + j).max(at(start + m - 1 - j))).fold(0.0, f64::max);
                    (start, edge)
                }
                None => {
                    let (i, v) = prof
                        .iter()
                        .enumerate()
                        .min_by(|a, b| a.1.total_cmp(b.1))
                        .expect("non-empty axis");
                    (lo[k] + i as i64, *v)
                }
            };
            origin[k] = start;
            level = level.max(edge / sup);
            grow[k] = edge > tol * sup;
        }
        if !grow.iter().any(|g| *g) {
            // Re-index so that index zero on each axis holds `origin`.
            let st = strides(&shape);
            let total = data.len();
            let mut out = vec![Complex64::new(0.0, 0.0); total];
            let shift: Vec<usize> = (0..d)
                .map(|k| (origin[k] - lo[k]).rem_euclid(shape[k] as i64) as usize)
                .collect();
            for (idx, slot) in out.iter_mut().enumerate() {
                let src: usize = (0..d)
                    .map(|k| (((idx / st[k]) % shape[k] + shift[k]) % shape[k]) * st[k])
                    .sum();
                *slot = data[src];
            }
            return Ok(TruncatedPower {
                origin,
                shape,
                valid,
                data: out,
                level,
            });
        }
        for k in 0..d {
            if grow[k] {
                shape[k] = fft_grid_len(2 * shape[k]).min(full[k]);
            }
        }
    }
}

impl TruncatedPower {
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    /// Largest `|value| / sup` seen where a period was cut.
    pub fn cut_level(&self) -> f64 {
        self.level
    }

    fn index(&self, x: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for k in 0..self.shape.len() {
            let off = x[k] - self.origin[k];
            if off < 0 || off as usize >= self.valid[k] {
                return None;
            }
            idx = idx * self.shape[k] + off as usize;
        }
        Some(idx)
    }

    pub fn get(&self, x: &[i64]) -> Complex64 {
        self.index(x).map_or(Complex64::new(0.0, 0.0), |i| self.data[i])
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
