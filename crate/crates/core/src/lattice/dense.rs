use std::collections::BTreeMap;

use num_complex::Complex64;

use super::LatticeFunction;

/// Values on a full integer box, stored row-major (last axis fastest).
#[derive(Clone, Debug, PartialEq)]
pub struct DenseGrid {
    origin: Vec<i64>,
    shape: Vec<usize>,
    data: Vec<Complex64>,
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

impl DenseGrid {
    pub fn zeros(origin: Vec<i64>, shape: Vec<usize>) -> Self {
        assert_eq!(origin.len(), shape.len());
        let len = shape.iter().product();
        DenseGrid {
            origin,
            shape,
            data: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub(crate) fn from_parts(origin: Vec<i64>, shape: Vec<usize>, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), shape.iter().product::<usize>());
        DenseGrid {
            origin,
            shape,
            data,
        }
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn origin(&self) -> &[i64] {
        &self.origin
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    fn index(&self, x: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for k in 0..self.dim() {
            let off = x[k] - self.origin[k];
            if off < 0 || off as usize >= self.shape[k] {
                return None;
            }
            idx = idx * self.shape[k] + off as usize;
        }
        Some(idx)
    }

    fn point(&self, mut idx: usize) -> Vec<i64> {
        let mut p = vec![0i64; self.dim()];
        for k in (0..self.dim()).rev() {
            p[k] = self.origin[k] + (idx % self.shape[k]) as i64;
            idx /= self.shape[k];
        }
        p
    }

    pub fn get(&self, x: &[i64]) -> Complex64 {
        self.index(x)
            .map(|i| self.data[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, x: &[i64], v: Complex64) {
        let i = self
            .index(x)
            .unwrap_or_else(|| panic!("point {x:?} outside dense grid"));
        self.data[i] = v;
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Keeps entries with modulus strictly above `threshold`.
    pub fn to_lattice_function(&self, threshold: f64) -> LatticeFunction {
        let mut map = BTreeMap::new();
        for (i, v) in self.data.iter().enumerate() {
            if v.norm() > threshold {
                map.insert(self.point(i), *v);
            }
        }
        LatticeFunction::from_map(self.dim(), map)
    }

    /// Convolution with a short list of taps `(y, b)`; the result covers the
    /// Minkowski sum of the grid box and the taps' box.
    pub fn convolve_sparse<'a, I>(&self, taps: I) -> DenseGrid
    where
        I: IntoIterator<Item = (&'a [i64], Complex64)>,
    {
        let taps: Vec<(&[i64], Complex64)> = taps.into_iter().collect();
        let d = self.dim();
        let mut tlo = taps[0].0.to_vec();
        let mut thi = tlo.clone();
        for (y, _) in &taps {
            for k in 0..d {
                tlo[k] = tlo[k].min(y[k]);
                thi[k] = thi[k].max(y[k]);
            }
        }
        let out_shape: Vec<usize> = (0..d)
            .map(|k| self.shape[k] + (thi[k] - tlo[k]) as usize)
            .collect();
        let out_origin: Vec<i64> = (0..d).map(|k| self.origin[k] + tlo[k]).collect();
        let out_strides = strides(&out_shape);
        let mut out = DenseGrid::zeros(out_origin, out_shape);

        let last = self.shape[d - 1];
        let rows = self.data.len() / last;
        let lead = &self.shape[..d - 1];
        let mut row_start = Vec::with_capacity(rows);
        let mut odo = vec![0usize; d - 1];
        for _ in 0..rows {
            row_start.push(odo.iter().zip(&out_strides).map(|(i, s)| i * s).sum::<usize>());
            for k in (0..d - 1).rev() {
                odo[k] += 1;
                if odo[k] < lead[k] {
                    break;
                }
                odo[k] = 0;
            }
        }

        for (y, b) in &taps {
            let shift: usize = (0..d)
                .map(|k| (y[k] - tlo[k]) as usize * out_strides[k])
                .sum();
            for (row, start) in row_start.iter().enumerate() {
                let src = &self.data[row * last..(row + 1) * last];
                let dst = &mut out.data[start + shift..start + shift + last];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += s * b;
                }
            }
        }
        out
    }
}
