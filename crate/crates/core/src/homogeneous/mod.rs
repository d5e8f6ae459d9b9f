//! Weighted polynomials, homogeneity checks and sublevel-set geometry.

mod chart;
mod volume;

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::grouplie::GroupGenerator;

pub use chart::{polar_chart, PolarChart};
pub use volume::{bounding_radius, sublevel_volume};

/// Floor used by the positive-definiteness check.
pub const PD_FLOOR: f64 = 1e-9;

/// `sum_beta a_beta xi^beta` with weights `m`, so that the weighted level of a
/// multi-index is `|beta:m| = sum_k beta_k / m_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialJson", into = "PolynomialJson")]
pub struct WeightedPolynomial {
    dim: usize,
    weights: Vec<u32>,
    terms: BTreeMap<Vec<u32>, Complex64>,
}

impl WeightedPolynomial {
    pub fn new<I>(weights: Vec<u32>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let dim = weights.len();
        if dim == 0 {
            return Err(Error::invalid("polynomial needs at least one variable"));
        }
        if weights.contains(&0) {
            return Err(Error::invalid("weights must be >= 1"));
        }
        let mut map: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (beta, a) in terms {
            check_dim(dim, beta.len())?;
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(Error::invalid(format!("non-finite coefficient at {beta:?}")));
            }
            *map.entry(beta).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        map.retain(|_, a| a.re != 0.0 || a.im != 0.0);
        Ok(WeightedPolynomial {
            dim,
            weights,
            terms: map,
        })
    }

    pub fn from_real<I>(weights: Vec<u32>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        Self::new(
            weights,
            terms.into_iter().map(|(b, a)| (b, Complex64::new(a, 0.0))),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, beta: &[u32]) -> Complex64 {
        self.terms
            .get(beta)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|a| a.im == 0.0)
    }

    /// `|beta:m|` as an exact rational.
    pub fn level_of(&self, beta: &[u32]) -> Ratio<u64> {
        weighted_level(beta, &self.weights)
    }

    /// True when every term sits at weighted level exactly one.
    pub fn is_weighted_homogeneous(&self) -> bool {
        !self.terms.is_empty()
            && self
                .terms
                .keys()
                .all(|b| self.level_of(b) == Ratio::from_integer(1))
    }

    /// The canonical generator `diag(1/m_1, ..., 1/m_d)`.
    pub fn canonical_generator(&self) -> GroupGenerator {
        GroupGenerator::canonical(&self.weights)
    }

    pub fn evaluate(&self, xi: &[f64]) -> Result<Complex64> {
        check_dim(self.dim, xi.len())?;
        Ok(self.eval(xi))
    }

    pub(crate) fn eval(&self, xi: &[f64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (beta, a) in &self.terms {
            let mut m = 1.0;
            for (x, &b) in xi.iter().zip(beta) {
                m *= x.powi(b as i32);
            }
            s += a * m;
        }
        s
    }

    /// Real and imaginary coefficient parts as separate polynomials.
    pub fn split(&self) -> (WeightedPolynomial, WeightedPolynomial) {
        let re = self.terms.iter().map(|(b, a)| (b.clone(), Complex64::new(a.re, 0.0)));
        let im = self.terms.iter().map(|(b, a)| (b.clone(), Complex64::new(a.im, 0.0)));
        (
            Self::new(self.weights.clone(), re).expect("valid"),
            Self::new(self.weights.clone(), im).expect("valid"),
        )
    }

    pub fn scale(&self, c: Complex64) -> WeightedPolynomial {
        Self::new(
            self.weights.clone(),
            self.terms.iter().map(|(b, a)| (b.clone(), a * c)),
        )
        .expect("valid")
    }

    pub fn add(&self, other: &WeightedPolynomial) -> Result<WeightedPolynomial> {
        check_dim(self.dim, other.dim)?;
        Self::new(
            self.weights.clone(),
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|(b, a)| (b.clone(), *a)),
        )
    }
}

/// `|beta:m| = sum_k beta_k / m_k` as an exact rational.
pub fn weighted_level(beta: &[u32], weights: &[u32]) -> Ratio<u64> {
    beta.iter()
        .zip(weights)
        .map(|(&b, &w)| Ratio::new(b as u64, w as u64))
        .fold(Ratio::from_integer(0), |a, b| a + b)
}

pub fn evaluate(p: &WeightedPolynomial, xi: &[f64]) -> Result<Complex64> {
    p.evaluate(xi)
}

/// Samples `(t, xi)` with `t` log-uniform on `[0.1, 10]` and `xi` in
/// `[-2, 2]^d`, and checks `P(t^E xi) = t P(xi)` to `1e-9 (1 + |t P(xi)|)`.
pub fn check_homogeneity(
    p: &WeightedPolynomial,
    e: &GroupGenerator,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    check_homogeneity_with(|xi| p.eval(xi), p.dim(), e, samples, seed)
}

/// Homogeneity test for an arbitrary function (used for `|Q|` and `|xi|^nu`).
pub fn check_homogeneity_with<F>(
    f: F,
    dim: usize,
    e: &GroupGenerator,
    samples: usize,
    seed: u64,
) -> Result<bool>
where
    F: Fn(&[f64]) -> Complex64,
{
    if samples == 0 {
        return Err(Error::invalid("samples must be >= 1"));
    }
    check_dim(dim, e.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let t = 10f64.powf(rng.random_range(-1.0..=1.0));
        let xi: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..=2.0)).collect();
        let lhs = f(&e.apply(t, &xi)?);
        let rhs = f(&xi) * t;
        if (lhs - rhs).norm() > 1e-9 * (1.0 + rhs.norm()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Points of the Euclidean unit sphere used for minimum searches (`d <= 3`).
pub(crate) fn sphere_samples(dim: usize, resolution: usize) -> Result<Vec<Vec<f64>>> {
    let r = resolution.max(4);
    use std::f64::consts::PI;
    match dim {
        1 => Ok(vec![vec![1.0], vec![-1.0]]),
        2 => Ok((0..r)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / r as f64;
                vec![th.cos(), th.sin()]
            })
            .collect()),
        3 => {
            let rows = (r / 2).max(2);
            let mut pts = Vec::new();
            for i in 0..=rows {
                let ph = PI * i as f64 / rows as f64;
                for j in 0..r {
                    let th = 2.0 * PI * j as f64 / r as f64;
                    pts.push(vec![ph.sin() * th.cos(), ph.sin() * th.sin(), ph.cos()]);
                }
            }
            Ok(pts)
        }
        _ => Err(Error::geometry(format!("sphere sampling supports d <= 3, got {dim}"))),
    }
}

/// `P(0) = 0` and `min_{|xi|=1} P > PD_FLOOR` on a sample of the given
/// resolution. Requires real coefficients.
pub fn check_positive_definite(p: &WeightedPolynomial, resolution: usize) -> Result<bool> {
    if !p.is_real() {
        return Err(Error::invalid("positive-definiteness needs real coefficients"));
    }
    if p.coefficient(&vec![0; p.dim()]).norm() != 0.0 {
        return Ok(false);
    }
    let min = sphere_samples(p.dim(), resolution)?
        .iter()
        .map(|u| p.eval(u).re)
        .fold(f64::INFINITY, f64::min);
    Ok(min > PD_FLOOR)
}

/// Same test applied to `|P|` (complex coefficients allowed).
pub fn check_abs_positive_definite(p: &WeightedPolynomial, resolution: usize) -> Result<bool> {
    if p.coefficient(&vec![0; p.dim()]).norm() != 0.0 {
        return Ok(false);
    }
    let min = sphere_samples(p.dim(), resolution)?
        .iter()
        .map(|u| p.eval(u).norm())
        .fold(f64::INFINITY, f64::min);
    Ok(min > PD_FLOOR)
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    beta: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    dim: usize,
    weights: Vec<u32>,
    terms: Vec<TermJson>,
}

impl TryFrom<PolynomialJson> for WeightedPolynomial {
    type Error = Error;

    fn try_from(j: PolynomialJson) -> Result<Self> {
        check_dim(j.dim, j.weights.len())?;
        WeightedPolynomial::new(
            j.weights,
            j.terms
                .into_iter()
                .map(|t| (t.beta, Complex64::new(t.re, t.im))),
        )
    }
}

impl From<WeightedPolynomial> for PolynomialJson {
    fn from(p: WeightedPolynomial) -> Self {
        PolynomialJson {
            dim: p.dim,
            weights: p.weights,
            terms: p
                .terms
                .into_iter()
                .map(|(beta, a)| TermJson {
                    beta,
                    re: a.re,
                    im: a.im,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> WeightedPolynomial {
        WeightedPolynomial::from_real(vec![2, 4], [(vec![2, 0], 1.0), (vec![1, 2], 1.0), (vec![0, 4], 1.0)])
            .unwrap()
    }

    fn mixed_q() -> WeightedPolynomial {
        WeightedPolynomial::from_real(
            vec![2, 4],
            [(vec![2, 0], 4.0 / 96.0), (vec![1, 2], -1.0 / 96.0), (vec![0, 4], 1.0 / 96.0)],
        )
        .unwrap()
    }

    #[test]
    fn evaluation() {
        assert_eq!(p1().evaluate(&[1.0, 1.0]).unwrap(), Complex64::new(3.0, 0.0));
        assert!((mixed_q().evaluate(&[1.0, 0.0]).unwrap().re - 1.0 / 24.0).abs() < 1e-16);
        assert_eq!(mixed_q().evaluate(&[0.0, 0.0]).unwrap().norm(), 0.0);
        assert!(p1().evaluate(&[1.0]).is_err());
    }

    #[test]
    fn levels() {
        let p = p1();
        assert!(p.is_weighted_homogeneous());
        assert_eq!(p.level_of(&[1, 1]), Ratio::new(3, 4));
        let q = WeightedPolynomial::from_real(vec![2, 4], [(vec![2, 0], 1.0), (vec![0, 2], 1.0)]).unwrap();
        assert!(!q.is_weighted_homogeneous());
    }

    #[test]
    fn homogeneity_checks() {
        let e = GroupGenerator::diagonal(&[0.5, 0.25]).unwrap();
        assert!(check_homogeneity(&p1(), &e, 64, 42).unwrap());
        let iso = GroupGenerator::diagonal(&[0.5, 0.5]).unwrap();
        let q = WeightedPolynomial::from_real(vec![2, 4], [(vec![2, 0], 1.0), (vec![0, 4], 1.0)]).unwrap();
        assert!(!check_homogeneity(&q, &iso, 64, 42).unwrap());

        // |xi|^nu is homogeneous for E = I / nu.
        for nu in [0.5, 1.0, 3.0] {
            let e = GroupGenerator::diagonal(&[1.0 / nu, 1.0 / nu]).unwrap();
            let f = |x: &[f64]| Complex64::new((x[0] * x[0] + x[1] * x[1]).sqrt().powf(nu), 0.0);
            assert!(check_homogeneity_with(f, 2, &e, 64, 7).unwrap());
        }
    }

    #[test]
    fn positive_definiteness() {
        assert!(check_positive_definite(&mixed_q(), 2048).unwrap());
        let saddle = WeightedPolynomial::from_real(vec![2, 2], [(vec![2, 0], 1.0), (vec![0, 2], -1.0)]).unwrap();
        assert!(!check_positive_definite(&saddle, 2048).unwrap());
        let p2 = WeightedPolynomial::from_real(vec![6, 4], [(vec![6, 0], 1.0), (vec![0, 4], 1.0)]).unwrap();
        assert!(check_positive_definite(&p2, 2048).unwrap());
        let complex = p2.scale(Complex64::new(0.0, 1.0));
        assert!(check_positive_definite(&complex, 16).is_err());
        assert!(check_abs_positive_definite(&complex, 2048).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let p = mixed_q().scale(Complex64::new(1.0, -2.0));
        let s = serde_json::to_string(&p).unwrap();
        let back: WeightedPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);
    }
}
