//! Chebyshev tables of `H^1` on a box, for evaluating many points at once.
//!
//! Values are sampled on tensor Chebyshev–Lobatto grids whose degree is
//! doubled per axis until the trailing coefficients along that axis are
//! below the tolerance. Lobatto grids nest under doubling, so every sample
//! is computed once.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Attractor, AttractorKind};
use crate::error::{check_dim, Error, Result};
use crate::homogeneous::WeightedPolynomial;

const FIRST_DEGREE: usize = 16;
pub const MAX_TABLE_DEGREE: usize = 512;

#[derive(Clone, Debug)]
pub struct AttractorTable {
    lo: Vec<f64>,
    hi: Vec<f64>,
    degrees: Vec<usize>,
    /// Chebyshev coefficients, first axis fastest.
    coeffs: Vec<Complex64>,
    mu: f64,
    e: Vec<f64>,
    tail: f64,
    samples: usize,
}

/// Whether `p(s xi) = p(xi)` for the sign pattern flipping the axes in `flip`.
fn invariant(p: &WeightedPolynomial, flip: &[bool]) -> bool {
    p.terms()
        .all(|(beta, _)| beta.iter().zip(flip).filter(|(_, f)| **f).map(|(b, _)| b).sum::<u32>() % 2 == 0)
}

/// Lobatto node `k` of degree `n` mapped to `[lo, hi]`.
fn node(lo: f64, hi: f64, k: usize, n: usize) -> f64 {
    let c = (PI * k as f64 / n as f64).cos();
    0.5 * (lo + hi) + 0.5 * (hi - lo) * c
}

/// DCT-I along `axis` turning Lobatto samples into Chebyshev coefficients.
fn dct_axis(data: &mut [Complex64], dims: &[usize], axis: usize) {
    let n = dims[axis] - 1;
    let stride: usize = dims[..axis].iter().product();
    let block = stride * dims[axis];
    let cos: Vec<f64> = (0..2 * n).map(|m| (PI * m as f64 / n as f64).cos()).collect();
    let mut line = vec![Complex64::new(0.0, 0.0); n + 1];
    for outer in (0..data.len()).step_by(block) {
        for inner in 0..stride {
            let at = |k: usize| outer + inner + k * stride;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[at(k)];
            }
            for j in 0..=n {
                let mut s = Complex64::new(0.0, 0.0);
                for (k, v) in line.iter().enumerate() {
                    let w = if k == 0 || k == n { 0.5 } else { 1.0 };
                    s += v * (w * cos[(j * k) % (2 * n)]);
                }
                let w = if j == 0 || j == n { 1.0 } else { 2.0 };
                data[at(j)] = s * (w / n as f64);
            }
        }
    }
}

fn clenshaw(c: &[Complex64], x: f64) -> Complex64 {
    let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + b1 * (2.0 * x) - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + b1 * x - b2
}

impl AttractorTable {
    /// Tabulates `H^1` of `att` on the box `[lo, hi]` to absolute accuracy
    /// about `tol` in the trailing coefficients.
    pub fn build(att: &Attractor, lo: &[f64], hi: &[f64], tol: f64) -> Result<Self> {
        let d = att.spec().dim();
        check_dim(d, lo.len())?;
        check_dim(d, hi.len())?;
        if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
            return Err(Error::invalid("table box needs lo < hi on every axis"));
        }
        if !(tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        // A sign flip leaving the symbol invariant leaves H invariant; on a
        // centred box it maps the Lobatto grid onto itself.
        let centred = lo.iter().zip(hi).all(|(a, b)| (a + b).abs() < 1e-14 * (b - a));
        let flips: Vec<Vec<bool>> = if centred && d <= 8 {
            (1..1usize << d)
                .map(|m| (0..d).map(|a| m >> a & 1 == 1).collect::<Vec<bool>>())
                .filter(|f| match &att.spec().kind {
                    AttractorKind::Imaginary { q } => invariant(q, f),
                    AttractorKind::Positive { r, q } => invariant(r, f) && invariant(q, f),
                })
                .collect()
        } else {
            Vec::new()
        };

        // Samples are keyed by indices on the finest grid.
        let mut cache: HashMap<Vec<usize>, Complex64> = HashMap::new();
        let mut degrees = vec![FIRST_DEGREE; d];
        loop {
            let dims: Vec<usize> = degrees.iter().map(|n| n + 1).collect();
            let total: usize = dims.iter().product();
            let key = |flat: usize| -> Vec<usize> {
                let mut rem = flat;
                let mut k = Vec::with_capacity(d);
                for (a, &m) in dims.iter().enumerate() {
                    k.push((rem % m) * (MAX_TABLE_DEGREE / degrees[a]));
                    rem /= m;
                }
                let mut best = k.clone();
                for f in &flips {
                    let image: Vec<usize> =
                        k.iter().zip(f).map(|(&i, &s)| if s { MAX_TABLE_DEGREE - i } else { i }).collect();
                    if image < best {
                        best = image;
                    }
                }
                best
            };
            let mut missing: Vec<Vec<usize>> = (0..total).map(key).filter(|k| !cache.contains_key(k)).collect();
            missing.sort();
            missing.dedup();
            let vals: Vec<Complex64> = missing
                .par_iter()
                .map(|k| {
                    let y: Vec<f64> = (0..d).map(|a| node(lo[a], hi[a], k[a], MAX_TABLE_DEGREE)).collect();
                    att.unit_value(&y)
                })
                .collect::<Result<_>>()?;
            cache.extend(missing.into_iter().zip(vals));

            let mut coeffs: Vec<Complex64> = (0..total).map(|f| cache[&key(f)]).collect();
            for a in 0..d {
                dct_axis(&mut coeffs, &dims, a);
            }
            // Largest coefficient in the last eighth of each axis.
            let mut tails = vec![0.0f64; d];
            for (f, c) in coeffs.iter().enumerate() {
                let mut rem = f;
                for (a, &m) in dims.iter().enumerate() {
                    let i = rem % m;
                    rem /= m;
                    if i >= degrees[a] - degrees[a] / 8 {
                        tails[a] = tails[a].max(c.norm());
                    }
                }
            }
            let mut refined = false;
            for a in 0..d {
                if tails[a] > tol {
                    if degrees[a] >= MAX_TABLE_DEGREE {
                        return Err(Error::resource(format!(
                            "table axis {a} unresolved at degree {MAX_TABLE_DEGREE} (tail {:.3e})",
                            tails[a]
                        )));
                    }
                    degrees[a] *= 2;
                    refined = true;
                }
            }
            if !refined {
                return Ok(AttractorTable {
                    lo: lo.to_vec(),
                    hi: hi.to_vec(),
                    degrees,
                    coeffs,
                    mu: att.spec().mu,
                    e: att.spec().generator.diagonal_entries(),
                    tail: tails.iter().cloned().fold(0.0, f64::max),
                    samples: cache.len(),
                });
            }
        }
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Largest trailing coefficient, a proxy for the interpolation error.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Number of `H^1` evaluations used to build the table.
    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn contains(&self, y: &[f64]) -> bool {
        y.len() == self.lo.len()
            && y.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| {
                let slack = 1e-9 * (b - a);
                *v >= a - slack && *v <= b + slack
            })
    }

    /// Interpolated `H^1(y)`.
    pub fn unit_value(&self, y: &[f64]) -> Result<Complex64> {
        check_dim(self.lo.len(), y.len())?;
        if !self.contains(y) {
            return Err(Error::invalid(format!("{y:?} lies outside the tabulated box")));
        }
        let u: Vec<f64> = (0..y.len())
            .map(|a| ((2.0 * y[a] - self.lo[a] - self.hi[a]) / (self.hi[a] - self.lo[a])).clamp(-1.0, 1.0))
            .collect();
        // Contract the first axis, then the next, on ever smaller blocks.
        let mut cur = self.coeffs.clone();
        for (a, &n) in self.degrees.iter().enumerate() {
            cur = cur.chunks(n + 1).map(|c| clenshaw(c, u[a])).collect();
        }
        Ok(cur[0])
    }

    /// `H^t(x) = t^-mu H^1(t^{-E*} x)`.
    pub fn value(&self, t: f64, x: &[f64]) -> Result<Complex64> {
        check_dim(self.lo.len(), x.len())?;
        let y: Vec<f64> = x.iter().zip(&self.e).map(|(v, ej)| v * t.powf(-ej)).collect();
        Ok(self.unit_value(&y)? * t.powf(-self.mu))
    }
}
