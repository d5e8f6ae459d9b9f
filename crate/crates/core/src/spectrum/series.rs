use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbol;
use crate::error::{check_dim, Error, Result};
use crate::lattice::LatticeFunction;

/// Default total degree for Taylor expansions when `d <= 2`.
pub const DEFAULT_SERIES_DEGREE: u32 = 24;

/// Taylor coefficients of `Gamma(xi) = log(phi_hat(xi + xi0) / phi_hat(xi0))`
/// up to a total degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSeries {
    pub base_point: Vec<f64>,
    pub symbol_value: Complex64,
    pub total_degree: u32,
    #[serde(with = "coeff_list")]
    pub coeffs: BTreeMap<Vec<u32>, Complex64>,
}

impl SymbolSeries {
    pub fn dim(&self) -> usize {
        self.base_point.len()
    }

    pub fn coefficient(&self, beta: &[u32]) -> Complex64 {
        self.coeffs
            .get(beta)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Evaluates the truncated series.
    pub fn evaluate(&self, xi: &[f64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (beta, c) in &self.coeffs {
            let mut m = 1.0;
            for (x, &b) in xi.iter().zip(beta) {
                m *= x.powi(b as i32);
            }
            s += c * m;
        }
        s
    }
}

/// All multi-indices of length `d` with total degree `<= deg`, ordered by
/// degree.
pub(crate) fn monomials(d: usize, deg: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 0..=deg {
        let mut cur = vec![0u32; d];
        compositions(total, 0, &mut cur, &mut out);
    }
    out
}

fn compositions(rem: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if k + 1 == cur.len() {
        cur[k] = rem;
        out.push(cur.clone());
        return;
    }
    for b in (0..=rem).rev() {
        cur[k] = b;
        compositions(rem - b, k + 1, cur, out);
    }
    cur[k] = 0;
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Exact Taylor coefficients of `Gamma` at `xi0`.
///
/// The coefficients of `w = phi_hat(xi + xi0)/phi_hat(xi0) - 1` are
/// `sum_x phi(x) e^{i x.xi0} (i x)^beta / beta! / phi_hat(xi0)`; the
/// logarithm is then taken formally through the Euler-operator recurrence
/// `|b| l_b = |b| w_b - sum_{0 < g < b} |g| l_g w_{b-g}`, which avoids the
/// cancellation of the alternating `sum (-1)^(j+1) w^j / j` expansion.
pub fn gamma_series(f: &LatticeFunction, xi0: &[f64], total_degree: u32) -> Result<SymbolSeries> {
    check_dim(f.dim(), xi0.len())?;
    if total_degree < 2 {
        return Err(Error::invalid("series total degree must be >= 2"));
    }
    let value = symbol(f, xi0)?;
    if (value.norm() - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "|phi_hat(xi0)| = {} is not 1 at the expansion point",
            value.norm()
        )));
    }
    let d = f.dim();
    let mons = monomials(d, total_degree);
    let index: HashMap<&[u32], usize> = mons.iter().enumerate().map(|(i, b)| (b.as_slice(), i)).collect();

    let weights: Vec<(Vec<f64>, Complex64)> = f
        .iter()
        .map(|(x, a)| {
            let phase: f64 = x.iter().zip(xi0).map(|(&xk, &s)| xk as f64 * s).sum();
            let xf: Vec<f64> = x.iter().map(|&v| v as f64).collect();
            (xf, a * Complex64::from_polar(1.0, phase) / value)
        })
        .collect();
    let i = Complex64::new(0.0, 1.0);
    let mut w = vec![Complex64::new(0.0, 0.0); mons.len()];
    for (j, beta) in mons.iter().enumerate().skip(1) {
        let deg: u32 = beta.iter().sum();
        let fact: f64 = beta.iter().map(|&b| factorial(b)).product();
        let mut s = Complex64::new(0.0, 0.0);
        for (x, a) in &weights {
            let mut m = 1.0;
            for (xk, &b) in x.iter().zip(beta) {
                m *= xk.powi(b as i32);
            }
            s += a * m;
        }
        w[j] = s * i.powu(deg) / fact;
    }

    let mut l = vec![Complex64::new(0.0, 0.0); mons.len()];
    for (j, beta) in mons.iter().enumerate().skip(1) {
        let deg: u32 = beta.iter().sum();
        let mut acc = w[j] * deg as f64;
        // Proper sub-multi-indices g of beta with g != 0.
        let mut g = vec![0u32; d];
        loop {
            let mut k = 0;
            while k < d {
                if g[k] < beta[k] {
                    g[k] += 1;
                    break;
                }
                g[k] = 0;
                k += 1;
            }
            if k == d || g == *beta {
                break;
            }
            let gdeg: u32 = g.iter().sum();
            let rest: Vec<u32> = beta.iter().zip(&g).map(|(b, c)| b - c).collect();
            let lg = l[index[g.as_slice()]];
            acc -= lg * w[index[rest.as_slice()]] * gdeg as f64;
        }
        l[j] = acc / deg as f64;
    }

    let coeffs = mons
        .into_iter()
        .zip(l)
        .skip(1)
        .filter(|(_, c)| c.norm() != 0.0)
        .collect();
    Ok(SymbolSeries {
        base_point: xi0.to_vec(),
        symbol_value: value,
        total_degree,
        coeffs,
    })
}

mod coeff_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Entry {
        beta: Vec<u32>,
        re: f64,
        im: f64,
    }

    pub fn serialize<S: Serializer>(m: &BTreeMap<Vec<u32>, Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Entry> = m
            .iter()
            .map(|(b, c)| Entry {
                beta: b.clone(),
                re: c.re,
                im: c.im,
            })
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<Vec<u32>, Complex64>, D::Error> {
        let v: Vec<Entry> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|e| (e.beta, Complex64::new(e.re, e.im))).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(1, 24).len(), 25);
        assert_eq!(monomials(2, 24).len(), 325);
        assert_eq!(monomials(3, 4).len(), 35);
        assert_eq!(monomials(2, 2), vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn lazy_walk_log_cos() {
        // log((1 + cos xi)/2) = log cos^2(xi/2) = -xi^2/4 - xi^4/96 - ...
        let f = LatticeFunction::from_real(1, [(vec![0], 0.5), (vec![1], 0.25), (vec![-1], 0.25)]).unwrap();
        let s = gamma_series(&f, &[0.0], 8).unwrap();
        assert!((s.coefficient(&[2]) - Complex64::new(-0.25, 0.0)).norm() < 1e-15);
        assert!((s.coefficient(&[4]) - Complex64::new(-1.0 / 96.0, 0.0)).norm() < 1e-15);
        assert!((s.coefficient(&[6]) - Complex64::new(-1.0 / 1440.0, 0.0)).norm() < 1e-15);
        assert!(s.coefficient(&[1]).norm() < 1e-16);
    }

    #[test]
    fn drift_of_shifted_walk() {
        // phi = delta_1 * lazy walk: Gamma picks up i*xi.
        let f = LatticeFunction::from_real(1, [(vec![1], 0.5), (vec![2], 0.25), (vec![0], 0.25)]).unwrap();
        let s = gamma_series(&f, &[0.0], 6).unwrap();
        assert!((s.coefficient(&[1]) - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((s.coefficient(&[2]) - Complex64::new(-0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = LatticeFunction::from_real(1, [(vec![0], 0.5), (vec![1], 0.25), (vec![-1], 0.25)]).unwrap();
        assert!(gamma_series(&f, &[0.0], 1).is_err());
        assert!(gamma_series(&f, &[1.0], 4).is_err());
        assert!(gamma_series(&f, &[0.0, 0.0], 4).is_err());
    }
}
