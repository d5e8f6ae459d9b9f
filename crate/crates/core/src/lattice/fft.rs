//! FFT convolution powers, including a row-streamed 2-D evaluator for grids
//! too large to hold at once.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::dense::{strides, DenseGrid};
use super::LatticeFunction;
use crate::error::{Error, Result};

/// Default cap on complex cells for a full FFT grid (512 MiB).
pub const DEFAULT_FFT_CAP: usize = 1 << 25;

/// Smallest 5-smooth integer `>= min_len`.
pub fn fft_grid_len(min_len: usize) -> usize {
    let mut n = min_len.max(1);
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// Unit-modulus-safe n-th power through the polar form.
#[inline]
pub(crate) fn cpow(z: Complex64, n: u64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(r.powf(n as f64), z.arg() * n as f64)
}

pub(crate) fn grid_shape(f: &LatticeFunction, n: u64) -> Result<Vec<usize>> {
    f.extent()
        .iter()
        .map(|&e| {
            (e as u64)
                .checked_mul(n)
                .and_then(|v| usize::try_from(v).ok())
                .and_then(|v| v.checked_add(1))
                .map(fft_grid_len)
                .ok_or_else(|| Error::resource("FFT grid length overflows"))
        })
        .collect()
}

pub(crate) fn check_cap(shape: &[usize], cap: usize) -> Result<usize> {
    let mut total: usize = 1;
    for &s in shape {
        total = total
            .checked_mul(s)
            .ok_or_else(|| Error::resource("FFT grid size overflows"))?;
    }
    if total > cap {
        return Err(Error::resource(format!(
            "FFT grid {shape:?} needs {total} cells, cap is {cap}"
        )));
    }
    Ok(total)
}

fn transform_axis(data: &mut [Complex64], shape: &[usize], axis: usize, fft: &Arc<dyn Fft<f64>>) {
    let len = shape[axis];
    let st = strides(shape)[axis];
    if st == 1 {
        data.par_chunks_mut(len).for_each(|line| fft.process(line));
        return;
    }
    // Lines along `axis` start at offsets with zero `axis` index; a block of
    // size len*st contains st interleaved lines.
    let block = len * st;
    data.par_chunks_mut(block).for_each(|chunk| {
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for j in 0..st {
            for i in 0..len {
                line[i] = chunk[j + i * st];
            }
            fft.process(&mut line);
            for i in 0..len {
                chunk[j + i * st] = line[i];
            }
        }
    });
}

/// Inverse DFT of `phi_hat^n` sampled on a grid of the given shape, row-major.
/// Index `z` holds the sum of `phi^(n)` over `x = n*lo + z` modulo the shape.
pub(crate) fn periodized_power(f: &LatticeFunction, n: u64, shape: &[usize]) -> Vec<Complex64> {
    let (lo, _) = f.support_box().expect("non-empty input");
    let d = f.dim();
    let total: usize = shape.iter().product();
    let mut data = vec![Complex64::new(0.0, 0.0); total];
    let st = strides(shape);
    for (x, v) in f.iter() {
        let idx: usize = (0..d).map(|k| ((x[k] - lo[k]) as usize % shape[k]) * st[k]).sum();
        data[idx] += *v;
    }

    let mut planner = FftPlanner::new();
    for axis in 0..d {
        let fwd = planner.plan_fft_forward(shape[axis]);
        transform_axis(&mut data, shape, axis, &fwd);
    }
    data.par_iter_mut().for_each(|z| *z = cpow(*z, n));
    for axis in 0..d {
        let inv = planner.plan_fft_inverse(shape[axis]);
        transform_axis(&mut data, shape, axis, &inv);
    }
    let scale = 1.0 / total as f64;
    data.par_iter_mut().for_each(|z| *z *= scale);
    data
}

/// Full-grid FFT power; returns `phi^(n)` on its exact support box.
pub(crate) fn power_dense(f: &LatticeFunction, n: u64, cap: usize) -> Result<DenseGrid> {
    let (lo, _) = f.support_box().expect("non-empty input");
    let lo = lo.to_vec();
    let shape = grid_shape(f, n)?;
    check_cap(&shape, cap)?;
    let d = f.dim();
    let data = periodized_power(f, n, &shape);
    let st = strides(&shape);

    let ext = f.extent();
    let out_shape: Vec<usize> = ext.iter().map(|&e| e * n as usize + 1).collect();
    let out_origin: Vec<i64> = lo.iter().map(|&l| l * n as i64).collect();
    let out_len: usize = out_shape.iter().product();
    let mut out = Vec::with_capacity(out_len);
    let mut odo = vec![0usize; d];
    for _ in 0..out_len {
        let idx: usize = odo.iter().zip(&st).map(|(i, s)| i * s).sum();
        out.push(data[idx]);
        for k in (0..d).rev() {
            odo[k] += 1;
            if odo[k] < out_shape[k] {
                break;
            }
            odo[k] = 0;
        }
    }
    Ok(DenseGrid::from_parts(out_origin, out_shape, out))
}

/// Evaluates `phi^(n)` through FFTs without materializing the full grid when
/// `d = 2`: rows of the second axis are produced in blocks whose size is set
/// by `budget` (complex cells).
pub struct PowerEvaluator<'a> {
    f: &'a LatticeFunction,
    n: u64,
    lo: Vec<i64>,
    out_shape: Vec<usize>,
    shape: Vec<usize>,
    budget: usize,
}

impl<'a> PowerEvaluator<'a> {
    pub fn new(f: &'a LatticeFunction, n: u64, budget: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("convolution power requires n >= 1"));
        }
        let (lo, _) = f
            .support_box()
            .ok_or_else(|| Error::invalid("cannot evaluate powers of the zero function"))?;
        let shape = grid_shape(f, n)?;
        let out_shape = f.extent().iter().map(|&e| e * n as usize + 1).collect();
        if f.dim() != 2 {
            check_cap(&shape, budget)?;
        } else if shape[0].max(shape[1]) > budget {
            return Err(Error::resource("budget smaller than one FFT line"));
        }
        Ok(PowerEvaluator {
            f,
            n,
            lo: lo.to_vec(),
            out_shape,
            shape,
            budget,
        })
    }

    pub fn grid_shape(&self) -> &[usize] {
        &self.shape
    }

    fn offset(&self, x: &[i64]) -> Option<Vec<usize>> {
        let mut z = Vec::with_capacity(x.len());
        for k in 0..x.len() {
            let v = x[k] - self.lo[k] * self.n as i64;
            if v < 0 || v as usize >= self.out_shape[k] {
                return None;
            }
            z.push(v as usize);
        }
        Some(z)
    }

    /// Calls `visit(z1, row)` for every second-axis offset `z1` in `rows`, where
    /// `row[z0]` is `phi^(n)` at `n*lo + (z0, z1)`.
    fn rows_2d<F>(&self, rows: std::ops::Range<usize>, mut visit: F)
    where
        F: FnMut(usize, &[Complex64]),
    {
        let (n0, n1) = (self.shape[0], self.shape[1]);
        let ext = self.f.extent();
        let mut planner = FftPlanner::new();
        let f0 = planner.plan_fft_forward(n0);
        let i0 = planner.plan_fft_inverse(n0);
        let f1 = planner.plan_fft_forward(n1);
        let i1 = planner.plan_fft_inverse(n1);

        // table[x1][k0]: axis-0 transform of each column of the support.
        let mut table = vec![vec![Complex64::new(0.0, 0.0); n0]; ext[1] + 1];
        for (x, v) in self.f.iter() {
            table[(x[1] - self.lo[1]) as usize][(x[0] - self.lo[0]) as usize] = *v;
        }
        for col in table.iter_mut() {
            f0.process(col);
        }

        let block = (self.budget / (2 * n0)).clamp(1, n1);
        let scale = 1.0 / (n0 as f64 * n1 as f64);
        let n = self.n;
        let mut start = rows.start;
        while start < rows.end {
            let end = (start + block).min(rows.end);
            let cols: Vec<Vec<Complex64>> = (0..n0)
                .into_par_iter()
                .map(|k0| {
                    let mut line = vec![Complex64::new(0.0, 0.0); n1];
                    for (x1, col) in table.iter().enumerate() {
                        line[x1] = col[k0];
                    }
                    f1.process(&mut line);
                    for z in line.iter_mut() {
                        *z = cpow(*z, n);
                    }
                    i1.process(&mut line);
                    line[start..end].to_vec()
                })
                .collect();
            let lines: Vec<Vec<Complex64>> = (start..end)
                .into_par_iter()
                .map(|z1| {
                    let mut line: Vec<Complex64> = cols.iter().map(|c| c[z1 - start]).collect();
                    i0.process(&mut line);
                    line.truncate(self.out_shape[0]);
                    for z in line.iter_mut() {
                        *z *= scale;
                    }
                    line
                })
                .collect();
            for (j, line) in lines.iter().enumerate() {
                visit(start + j, line);
            }
            start = end;
        }
    }

    /// `(sup |phi^(n)|, argmax)`.
    pub fn sup_norm(&self) -> Result<(f64, Vec<i64>)> {
        let mut best = (0.0f64, Vec::new());
        if self.f.dim() == 2 {
            let base: Vec<i64> = self.lo.iter().map(|l| l * self.n as i64).collect();
            self.rows_2d(0..self.out_shape[1], |z1, row| {
                for (z0, v) in row.iter().enumerate() {
                    let a = v.norm();
                    if a > best.0 {
                        best = (a, vec![base[0] + z0 as i64, base[1] + z1 as i64]);
                    }
                }
            });
        } else {
            let grid = power_dense(self.f, self.n, self.budget)?;
            let g = grid.to_lattice_function(0.0);
            for (x, v) in g.iter() {
                if v.norm() > best.0 {
                    best = (v.norm(), x.clone());
                }
            }
        }
        Ok(best)
    }

    /// `phi^(n)` at the given points (zero outside the support box).
    pub fn values_at(&self, points: &[Vec<i64>]) -> Result<Vec<Complex64>> {
        let zero = Complex64::new(0.0, 0.0);
        let offsets: Vec<Option<Vec<usize>>> = points.iter().map(|p| self.offset(p)).collect();
        let mut out = vec![zero; points.len()];
        if self.f.dim() != 2 {
            let grid = power_dense(self.f, self.n, self.budget)?;
            for (o, p) in out.iter_mut().zip(points) {
                *o = grid.get(p);
            }
            return Ok(out);
        }
        let z1s: Vec<usize> = offsets.iter().flatten().map(|z| z[1]).collect();
        let (Some(&lo1), Some(&hi1)) = (z1s.iter().min(), z1s.iter().max()) else {
            return Ok(out);
        };
        self.rows_2d(lo1..hi1 + 1, |z1, row| {
            for (o, z) in out.iter_mut().zip(&offsets) {
                if let Some(z) = z {
                    if z[1] == z1 {
                        *o = row[z[0]];
                    }
                }
            }
        });
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{power, PowerMethod};

    fn sample_2d() -> LatticeFunction {
        LatticeFunction::new(
            2,
            [
                (vec![0, 0], Complex64::new(0.4, 0.1)),
                (vec![1, 0], Complex64::new(0.2, 0.0)),
                (vec![-1, 2], Complex64::new(0.1, -0.2)),
                (vec![0, -1], Complex64::new(0.15, 0.05)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn smooth_lengths() {
        assert_eq!(fft_grid_len(1), 1);
        assert_eq!(fft_grid_len(7), 8);
        assert_eq!(fft_grid_len(11), 12);
        assert_eq!(fft_grid_len(121), 125);
        assert_eq!(fft_grid_len(2001), 2025);
    }

    #[test]
    fn streamed_matches_full_grid() {
        let f = sample_2d();
        let n = 9;
        let full = power(&f, n, PowerMethod::Direct).unwrap();
        // A tiny budget forces many row blocks.
        let ev = PowerEvaluator::new(&f, n, 64).unwrap();
        let (lo, hi) = full.support_box().unwrap();
        let pts: Vec<Vec<i64>> = (lo[0] - 1..=hi[0] + 1)
            .flat_map(|a| (lo[1] - 1..=hi[1] + 1).map(move |b| vec![a, b]))
            .collect();
        let vals = ev.values_at(&pts).unwrap();
        for (p, v) in pts.iter().zip(&vals) {
            assert!((full.get(p) - v).norm() < 1e-14, "{p:?}");
        }
        let (s, at) = ev.sup_norm().unwrap();
        assert!((s - full.sup_norm()).abs() < 1e-14);
        assert!((full.get(&at).norm() - s).abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_evaluator() {
        let f = LatticeFunction::from_real(1, [(vec![0], 0.5), (vec![1], 0.25), (vec![-1], 0.25)]).unwrap();
        let ev = PowerEvaluator::new(&f, 4, DEFAULT_FFT_CAP).unwrap();
        let v = ev.values_at(&[vec![0], vec![4], vec![5]]).unwrap();
        assert!((v[0].re - 70.0 / 256.0).abs() < 1e-15);
        assert!((v[1].re - 1.0 / 256.0).abs() < 1e-15);
        assert_eq!(v[2], Complex64::new(0.0, 0.0));
    }
}
