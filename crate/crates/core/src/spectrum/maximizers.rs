use std::collections::VecDeque;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeFunction;

pub const DEFAULT_GRID_PER_AXIS: usize = 512;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-3;
const MAX_GRID_CELLS: usize = 1 << 24;
const NEWTON_MAX_ITER: usize = 50;
const DISTINCT_TOL: f64 = 1e-6;
const SNAP_DENOM: f64 = 12.0;

/// A refined point of `Omega(phi)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Maximizer {
    pub xi: Vec<f64>,
    pub modulus: f64,
    pub refined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaximizerSearch {
    pub points: Vec<Maximizer>,
    pub sup: f64,
    pub warnings: Vec<String>,
}

/// `x` reduced to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// Max-coordinate distance on the torus.
pub fn torus_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| wrap_angle(x - y).abs())
        .fold(0.0, f64::max)
}

/// `phi_hat`, its gradient and Hessian at `xi`.
fn derivatives(f: &LatticeFunction, xi: &[f64]) -> (Complex64, Vec<Complex64>, DMatrix<Complex64>) {
    let d = f.dim();
    let mut v = Complex64::new(0.0, 0.0);
    let mut g = vec![Complex64::new(0.0, 0.0); d];
    let mut h = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    let i = Complex64::new(0.0, 1.0);
    for (x, a) in f.iter() {
        let phase: f64 = x.iter().zip(xi).map(|(&k, &s)| k as f64 * s).sum();
        let t = a * Complex64::from_polar(1.0, phase);
        v += t;
        for j in 0..d {
            g[j] += i * x[j] as f64 * t;
            for k in 0..d {
                h[(j, k)] -= (x[j] * x[k]) as f64 * t;
            }
        }
    }
    (v, g, h)
}

fn modulus_sq(f: &LatticeFunction, xi: &[f64]) -> f64 {
    super::eval_symbol(f, xi).norm_sqr()
}

/// Safeguarded Newton ascent on `|phi_hat|^2`; steps are accepted only when
/// they strictly increase the objective. Returns the point and whether the
/// iteration stopped before the cap.
fn refine(f: &LatticeFunction, start: &[f64], spacing: f64) -> (Vec<f64>, bool) {
    let d = f.dim();
    let mut xi = start.to_vec();
    let mut fx = modulus_sq(f, &xi);
    for _ in 0..NEWTON_MAX_ITER {
        let (v, g, h) = derivatives(f, &xi);
        let grad = DVector::from_fn(d, |j, _| 2.0 * (v.conj() * g[j]).re);
        if grad.amax() < 1e-15 {
            return (xi, true);
        }
        let hess = DMatrix::from_fn(d, d, |j, k| 2.0 * (g[j].conj() * g[k] + v.conj() * h[(j, k)]).re);
        let neg = -&hess;
        let dir = match neg.clone().cholesky() {
            Some(ch) => ch.solve(&grad),
            None => &grad * (spacing / grad.norm()),
        };
        let mut step = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let cand: Vec<f64> = (0..d).map(|j| xi[j] + step * dir[j]).collect();
            let fc = modulus_sq(f, &cand);
            if fc > fx {
                xi = cand;
                fx = fc;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved || step * dir.norm() < 1e-14 {
            return (xi, true);
        }
    }
    (xi, false)
}

/// Replaces a refined point by a nearby multiple of `pi/12` when that point is
/// at least as large. Flat maxima cannot be located by value beyond
/// `eps^(1/order)`, and every symmetric fixture maximizer lies on this lattice.
fn snap(f: &LatticeFunction, xi: &[f64], radius: f64) -> Vec<f64> {
    let unit = PI / SNAP_DENOM;
    let cand: Vec<f64> = xi.iter().map(|x| wrap_angle((x / unit).round() * unit)).collect();
    if torus_distance(&cand, xi) > radius {
        return xi.to_vec();
    }
    if modulus_sq(f, &cand) >= modulus_sq(f, xi) - 4.0 * f64::EPSILON {
        cand
    } else {
        xi.to_vec()
    }
}

/// Grid scan of `|phi_hat|^2`, clustering of cells within `tol` (relative) of
/// the maximum, refinement of each cluster, and de-duplication.
pub fn find_maximizers(f: &LatticeFunction, grid_per_axis: usize, tol: f64) -> Result<MaximizerSearch> {
    if f.len() < 2 {
        return Err(Error::invalid(
            "phi needs at least two support points; otherwise |phi_hat| is constant",
        ));
    }
    if grid_per_axis < 4 {
        return Err(Error::invalid("grid_per_axis must be at least 4"));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::invalid("cluster tolerance must lie in (0, 1)"));
    }
    let d = f.dim();
    let n = grid_per_axis;
    let cells = (0..d).try_fold(1usize, |acc, _| acc.checked_mul(n));
    let cells = match cells {
        Some(c) if c <= MAX_GRID_CELLS => c,
        _ => return Err(Error::resource("maximizer grid too large; lower grid_per_axis")),
    };
    let spacing = 2.0 * PI / n as f64;
    let coord = |mut idx: usize| -> Vec<f64> {
        let mut xi = vec![0.0; d];
        for k in (0..d).rev() {
            xi[k] = -PI + spacing * (idx % n) as f64;
            idx /= n;
        }
        xi
    };
    let vals: Vec<f64> = (0..cells).into_par_iter().map(|i| modulus_sq(f, &coord(i))).collect();
    let top = vals.iter().copied().fold(0.0, f64::max);
    let cut = top * (1.0 - tol);

    // Connected components of {vals >= cut} with torus wrap-around.
    let mut label = vec![usize::MAX; cells];
    let mut reps = Vec::new();
    let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
        .map(|mut c| {
            (0..d)
                .map(|_| {
                    let o = (c % 3) as i64 - 1;
                    c /= 3;
                    o
                })
                .collect()
        })
        .filter(|o: &Vec<i64>| o.iter().any(|&v| v != 0))
        .collect();
    for s in 0..cells {
        if vals[s] < cut || label[s] != usize::MAX {
            continue;
        }
        let id = reps.len();
        let mut best = s;
        label[s] = id;
        let mut members = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(c) = queue.pop_front() {
            if vals[c] > vals[best] {
                best = c;
            }
            let mut multi = vec![0usize; d];
            let mut r = c;
            for k in (0..d).rev() {
                multi[k] = r % n;
                r /= n;
            }
            for o in &offsets {
                let mut nb = 0usize;
                for k in 0..d {
                    let v = (multi[k] as i64 + o[k]).rem_euclid(n as i64) as usize;
                    nb = nb * n + v;
                }
                if vals[nb] >= cut && label[nb] == usize::MAX {
                    label[nb] = id;
                    members.push(nb);
                    queue.push_back(nb);
                }
            }
        }
        // Flat maxima leave Newton anywhere inside the cluster, so snapping
        // may reach as far as the cluster itself extends.
        let centre = coord(best);
        let extent = members
            .iter()
            .map(|&m| torus_distance(&coord(m), &centre))
            .fold(0.0, f64::max);
        reps.push((best, extent));
    }

    let mut found: Vec<Maximizer> = Vec::new();
    for (rep, extent) in reps {
        let (xi, ok) = refine(f, &coord(rep), spacing);
        let xi: Vec<f64> = xi.into_iter().map(wrap_angle).collect();
        let xi = snap(f, &xi, (3.0 * spacing).max(extent + spacing));
        let modulus = modulus_sq(f, &xi).sqrt();
        match found.iter_mut().find(|m| torus_distance(&m.xi, &xi) <= DISTINCT_TOL) {
            Some(m) if m.modulus < modulus => {
                *m = Maximizer { xi, modulus, refined: ok };
            }
            Some(_) => {}
            None => found.push(Maximizer { xi, modulus, refined: ok }),
        }
    }
    let sup = found.iter().map(|m| m.modulus).fold(0.0, f64::max);
    found.retain(|m| m.modulus >= sup - 1e-9);
    found.sort_by(|a, b| a.xi.iter().map(|x| x.abs()).sum::<f64>().total_cmp(&b.xi.iter().map(|x| x.abs()).sum::<f64>()));

    let mut warnings = Vec::new();
    if (sup - 1.0).abs() > 1e-6 {
        warnings.push(format!("max |phi_hat| = {sup:.12}, phi is not normalized"));
    }
    for m in &found {
        if !m.refined {
            warnings.push(format!("Newton refinement did not converge near {:?}", m.xi));
        }
    }
    Ok(MaximizerSearch {
        points: found,
        sup,
        warnings,
    })
}

/// Per-axis shift `xi_phi` placing every maximizer inside
/// `(xi_phi - pi, xi_phi + pi]`: the cell boundary sits in the middle of the
/// largest gap between maximizer coordinates.
pub fn torus_shift(points: &[Vec<f64>], dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|k| {
            let mut c: Vec<f64> = points.iter().map(|p| p[k].rem_euclid(2.0 * PI)).collect();
            if c.is_empty() {
                return 0.0;
            }
            c.sort_by(f64::total_cmp);
            let mut best = (c[0] + 2.0 * PI - c[c.len() - 1], c[c.len() - 1]);
            for w in c.windows(2) {
                if w[1] - w[0] > best.0 {
                    best = (w[1] - w[0], w[0]);
                }
            }
            let boundary = best.1 + best.0 / 2.0;
            wrap_angle(boundary + PI)
        })
        .collect()
}
