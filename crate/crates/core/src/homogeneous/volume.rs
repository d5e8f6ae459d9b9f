use rayon::prelude::*;

use super::{check_abs_positive_definite, sphere_samples, WeightedPolynomial};
use crate::error::{Error, Result};

/// Per-axis half-widths of a box containing `{|P| < level}`.
///
/// Weighted-homogeneous inputs use the exact boundary map
/// `u -> (level/|P(u)|)^E u` with `E = diag(1/m)`; anything else falls back to
/// ray bisection with a doubling bracket.
pub fn bounding_radius(p: &WeightedPolynomial, level: f64, resolution: usize) -> Result<Vec<f64>> {
    let d = p.dim();
    let dirs = sphere_samples(d, resolution.max(256))?;
    let mut half = vec![0.0f64; d];
    if p.is_weighted_homogeneous() {
        let e: Vec<f64> = p.weights().iter().map(|&w| 1.0 / w as f64).collect();
        for u in &dirs {
            let g = p.eval(u).norm();
            if !(g > 0.0) {
                return Err(Error::geometry("|P| vanishes on the unit sphere"));
            }
            let s = level / g;
            for k in 0..d {
                half[k] = half[k].max(s.powf(e[k]) * u[k].abs());
            }
        }
        // Sampled directions can straddle the extreme point.
        for h in half.iter_mut() {
            *h *= 1.02;
        }
    } else {
        for u in &dirs {
            let at = |s: f64| p.eval(&u.iter().map(|c| c * s).collect::<Vec<_>>()).norm();
            let mut hi = 1e-8;
            let mut steps = 0;
            while at(hi) <= level {
                hi *= 2.0;
                steps += 1;
                if steps > 200 {
                    return Err(Error::geometry("ray never leaves the sublevel set"));
                }
            }
            let mut lo = hi / 2.0;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if at(mid) <= level {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            for k in 0..d {
                half[k] = half[k].max(hi * u[k].abs());
            }
        }
        for h in half.iter_mut() {
            *h *= 1.1;
        }
    }
    Ok(half)
}

/// Length of `{s in [lo, hi] : g(s) < 0}` from a scan with `m` cells and
/// bisection on each sign change.
fn chord_length<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, m: usize) -> f64 {
    let h = (hi - lo) / m as f64;
    let root = |mut a: f64, mut b: f64, ga: f64| {
        let neg_a = ga < 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if (g(mid) < 0.0) == neg_a {
                a = mid;
            } else {
                b = mid;
            }
        }
        0.5 * (a + b)
    };
    let mut total = 0.0;
    let mut a = lo;
    let mut ga = g(a);
    for j in 1..=m {
        let b = lo + h * j as f64;
        let gb = g(b);
        match (ga < 0.0, gb < 0.0) {
            (true, true) => total += b - a,
            (true, false) => total += root(a, b, ga) - a,
            (false, true) => total += b - root(a, b, ga),
            (false, false) => {}
        }
        a = b;
        ga = gb;
    }
    total
}

/// Lebesgue measure of `{|P| < level}` for `d <= 2`.
///
/// One axis is resolved exactly by scan and bisection; the other uses the
/// midpoint rule with `resolution` cells.
pub fn sublevel_volume(p: &WeightedPolynomial, level: f64, resolution: usize) -> Result<f64> {
    if !(level > 0.0) {
        return Err(Error::invalid("level must be positive"));
    }
    if resolution < 8 {
        return Err(Error::invalid("resolution must be at least 8"));
    }
    if !check_abs_positive_definite(p, 4096)? {
        return Err(Error::geometry("|P| is not positive definite"));
    }
    let half = bounding_radius(p, level, 4096)?;
    match p.dim() {
        1 => Ok(chord_length(
            |s| p.eval(&[s]).norm() - level,
            -half[0],
            half[0],
            resolution,
        )),
        2 => {
            let h = 2.0 * half[0] / resolution as f64;
            let sum: f64 = (0..resolution)
                .into_par_iter()
                .map(|i| {
                    let x = -half[0] + (i as f64 + 0.5) * h;
                    chord_length(|y| p.eval(&[x, y]).norm() - level, -half[1], half[1], resolution)
                })
                .sum();
            Ok(sum * h)
        }
        d => Err(Error::geometry(format!("sublevel volumes support d <= 2, got {d}"))),
    }
}
