//! Radial integrals along one chart direction.
//!
//! For a node `eta` with `xi = r^E eta`, every attractor integrand becomes
//! `r^(mu-1) exp(-a r - i sum_j c_j r^(e_j))` where `e_j` are the diagonal
//! entries of `E` and `c_j = y_j eta_j`. The imaginary kind has `a = +-i`,
//! the positive kind `a = 1 + i Q(eta)`.

use num_complex::Complex64;

use super::quadrature::{integrate, Quad};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
/// Largest tolerated growth of `|exp|` along the rotated contour, in e-folds.
const MAX_GROWTH: f64 = 2.5;
/// The contour is cut where the integrand has decayed by this many e-folds.
const TAIL_DECAY: f64 = 45.0;
const MAX_PANELS: usize = 200_000;

pub(crate) struct Ray<'a> {
    pub a: Complex64,
    pub mu: f64,
    pub e: &'a [f64],
    pub c: Vec<f64>,
    /// Integer `L` with every `L e_j` integral, if one exists.
    pub lift: Option<u32>,
}

/// Smallest `L <= 64` turning every exponent into an integer.
pub(crate) fn integer_lift(e: &[f64]) -> Option<u32> {
    (1..=64u32).find(|&l| {
        e.iter()
            .all(|&x| (x * l as f64 - (x * l as f64).round()).abs() < 1e-12 && x * l as f64 >= 0.5)
    })
}

impl Ray<'_> {
    fn exponent(&self, r: Complex64) -> Complex64 {
        self.exponent_with_log(r, r.ln())
    }

    fn exponent_with_log(&self, r: Complex64, log_r: Complex64) -> Complex64 {
        let mut s = -self.a * r;
        for (&e, &c) in self.e.iter().zip(&self.c) {
            if c != 0.0 {
                s -= I * c * (log_r * e).exp();
            }
        }
        s
    }

    fn exponent_real(&self, r: f64) -> Complex64 {
        let mut phase = 0.0;
        let log_r = r.ln();
        for (&e, &c) in self.e.iter().zip(&self.c) {
            if c != 0.0 {
                phase += c * (log_r * e).exp();
            }
        }
        -self.a * r - I * phase
    }

    /// `int_{r0}^{r1} f(r) dr` on the real axis. With rational exponents
    /// the substitution `r = s^L` makes the integrand smooth at the origin;
    /// otherwise `theta = r^mu` removes the `r^(mu-1)` singularity.
    pub fn segment(&self, r0: f64, r1: f64, abs_tol: f64) -> Result<Complex64> {
        if r1 <= r0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // Breaks roughly every four radians of the linear phase.
        let rate = self.a.norm().max(1.0);
        let n = (((r1 - r0) * rate / 4.0).ceil() as usize).clamp(2, MAX_PANELS / 4);
        let r_at = |k: usize| r0 + (r1 - r0) * k as f64 / n as f64;
        let q = match self.lift {
            Some(l) => {
                let lf = l as f64;
                let pows: Vec<i32> = self.e.iter().map(|&x| (x * lf).round() as i32).collect();
                let jac = (self.mu * lf).round() as i32 - 1;
                let f = |s: f64| {
                    let mut phase = 0.0;
                    for (&p, &c) in pows.iter().zip(&self.c) {
                        phase += c * s.powi(p);
                    }
                    let r = s.powi(l as i32);
                    (-self.a * r - I * phase).exp() * (lf * s.powi(jac))
                };
                let breaks: Vec<f64> = (0..=n).map(|k| r_at(k).powf(1.0 / lf)).collect();
                integrate(&f, &breaks, abs_tol, MAX_PANELS)
            }
            None => {
                let inv = 1.0 / self.mu;
                let f = |th: f64| self.exponent_real(th.powf(inv)).exp() * inv;
                let breaks: Vec<f64> = (0..=n).map(|k| r_at(k).powf(self.mu)).collect();
                integrate(&f, &breaks, abs_tol, MAX_PANELS)
            }
        };
        finish(q, "radial segment")
    }

    /// Direction of steepest decay of `exp(-a r)`.
    fn direction(&self) -> Complex64 {
        self.a.conj() / self.a.norm()
    }

    /// Largest growth of `Re exponent` along `t + rho d` relative to `rho = 0`,
    /// and the `rho` at which the integrand has decayed by [`TAIL_DECAY`].
    fn tail_profile(&self, t: f64) -> Option<(f64, f64)> {
        let d = self.direction();
        let base = self.exponent(Complex64::new(t, 0.0)).re;
        let mut worst: f64 = 0.0;
        let mut rho = 1.0 / 16.0;
        while rho < 1e8 {
            let g = self.exponent(t + d * rho).re - base;
            worst = worst.max(g);
            if g < -TAIL_DECAY && rho > 1.0 {
                return Some((worst, rho));
            }
            rho *= 1.15;
        }
        None
    }

    /// Smallest power of two `T >= min_t` from which the contour
    /// `T + rho d` can be followed without significant amplification,
    /// together with its cut-off.
    pub fn contour_start(&self, min_t: f64) -> Result<(f64, f64)> {
        let mut t = min_t.max(1.0).log2().ceil().exp2();
        for _ in 0..80 {
            if let Some((worst, end)) = self.tail_profile(t) {
                if worst <= MAX_GROWTH {
                    return Ok((t, end));
                }
            }
            t *= 2.0;
        }
        Err(Error::resource("no admissible contour start below 2^80"))
    }

    /// `int_t^{t + inf d} f(r) dr`, which equals `int_t^inf f(r) dr` on the
    /// real axis whenever the arc at infinity vanishes (`Re a >= 0`,
    /// `e_j < 1`).
    pub fn tail(&self, t: f64, end: f64, abs_tol: f64) -> Result<Complex64> {
        let d = self.direction();
        let f = |rho: f64| {
            let r = t + d * rho;
            let log_r = r.ln();
            d * ((self.mu - 1.0) * log_r + self.exponent_with_log(r, log_r)).exp()
        };
        let breaks = [0.0, end / 64.0, end / 16.0, end / 4.0, end];
        finish(integrate(&f, &breaks, abs_tol, MAX_PANELS), "contour tail")
    }
}

fn finish(q: Quad, what: &str) -> Result<Complex64> {
    if q.converged || q.error < 1e-9 {
        Ok(q.value)
    } else {
        Err(Error::accuracy(format!(
            "{what}: quadrature error estimate {:.3e} after the panel cap",
            q.error
        )))
    }
}
