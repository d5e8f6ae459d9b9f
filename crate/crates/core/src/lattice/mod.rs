//! Finitely supported complex functions on `Z^d` and their convolution powers.

mod dense;
mod fft;
mod periodic;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

pub use dense::DenseGrid;
pub use fft::{fft_grid_len, PowerEvaluator, DEFAULT_FFT_CAP};
pub(crate) use fft::power_dense;
pub use periodic::{truncated_power, TruncatedPower};

/// Relative threshold below which FFT-computed values are dropped.
pub const FFT_PRUNE_REL: f64 = 1e-14;

/// A finitely supported map `Z^d -> C`.
///
/// Zero values are never stored, and the support box is kept in sync with the
/// stored coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeFunctionJson", into = "LatticeFunctionJson")]
pub struct LatticeFunction {
    dim: usize,
    entries: BTreeMap<Vec<i64>, Complex64>,
    support_box: Option<(Vec<i64>, Vec<i64>)>,
}

impl LatticeFunction {
    /// Builds a function from `(point, value)` pairs. Repeated points are summed
    /// and exact zeros are pruned.
    pub fn new<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        if dim == 0 {
            return Err(Error::invalid("lattice dimension must be positive"));
        }
        let mut map: BTreeMap<Vec<i64>, Complex64> = BTreeMap::new();
        for (x, v) in entries {
            check_dim(dim, x.len())?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::invalid(format!("non-finite value at {x:?}")));
            }
            *map.entry(x).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        Ok(Self::from_map(dim, map))
    }

    pub(crate) fn from_map(dim: usize, mut map: BTreeMap<Vec<i64>, Complex64>) -> Self {
        map.retain(|_, v| v.re != 0.0 || v.im != 0.0);
        let support_box = bounding_box(dim, map.keys());
        LatticeFunction {
            dim,
            entries: map,
            support_box,
        }
    }

    /// Real-valued convenience constructor.
    pub fn from_real<I>(dim: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, f64)>,
    {
        Self::new(
            dim,
            entries
                .into_iter()
                .map(|(x, v)| (x, Complex64::new(v, 0.0))),
        )
    }

    /// The unit mass at `at`.
    pub fn delta(at: Vec<i64>) -> Self {
        let dim = at.len();
        let mut map = BTreeMap::new();
        map.insert(at, Complex64::new(1.0, 0.0));
        Self::from_map(dim, map)
    }

    pub fn empty(dim: usize) -> Self {
        Self::from_map(dim, BTreeMap::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Componentwise `(min, max)` of the support, `None` for the zero function.
    pub fn support_box(&self) -> Option<(&[i64], &[i64])> {
        self.support_box
            .as_ref()
            .map(|(lo, hi)| (lo.as_slice(), hi.as_slice()))
    }

    /// Side lengths `max - min` of the support box (zeros for the empty function).
    pub fn extent(&self) -> Vec<usize> {
        match &self.support_box {
            Some((lo, hi)) => lo.iter().zip(hi).map(|(a, b)| (b - a) as usize).collect(),
            None => vec![0; self.dim],
        }
    }

    pub fn get(&self, x: &[i64]) -> Complex64 {
        self.entries
            .get(x)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.entries.iter()
    }

    pub fn sup_norm(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.values().map(|v| v.norm()).sum()
    }

    /// `phi(x) -> c * phi(x)`.
    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_map(
            self.dim,
            self.entries.iter().map(|(x, v)| (x.clone(), v * c)).collect(),
        )
    }

    /// Maximum modulus of the entrywise difference.
    pub fn max_abs_diff(&self, other: &LatticeFunction) -> f64 {
        let mut worst: f64 = 0.0;
        for (x, v) in &self.entries {
            worst = worst.max((v - other.get(x)).norm());
        }
        for (x, v) in &other.entries {
            if !self.entries.contains_key(x) {
                worst = worst.max(v.norm());
            }
        }
        worst
    }

    /// The tensor product `(f ⊗ g)(x, y) = f(x) g(y)` on `Z^(d1 + d2)`.
    pub fn tensor(&self, other: &LatticeFunction) -> LatticeFunction {
        let dim = self.dim + other.dim;
        let mut map = BTreeMap::new();
        for (x, a) in &self.entries {
            for (y, b) in &other.entries {
                let mut p = x.clone();
                p.extend_from_slice(y);
                map.insert(p, a * b);
            }
        }
        Self::from_map(dim, map)
    }

    pub fn to_dense(&self) -> Option<DenseGrid> {
        let (lo, hi) = self.support_box.as_ref()?;
        let shape: Vec<usize> = lo.iter().zip(hi).map(|(a, b)| (b - a + 1) as usize).collect();
        let mut grid = DenseGrid::zeros(lo.clone(), shape);
        for (x, v) in &self.entries {
            grid.set(x, *v);
        }
        Some(grid)
    }
}

fn bounding_box<'a, I>(dim: usize, points: I) -> Option<(Vec<i64>, Vec<i64>)>
where
    I: Iterator<Item = &'a Vec<i64>>,
{
    let mut out: Option<(Vec<i64>, Vec<i64>)> = None;
    for p in points {
        match &mut out {
            None => out = Some((p.clone(), p.clone())),
            Some((lo, hi)) => {
                for k in 0..dim {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
        }
    }
    out
}

/// Full convolution `(f * g)(x) = sum_y f(x - y) g(y)`.
pub fn convolve(f: &LatticeFunction, g: &LatticeFunction) -> Result<LatticeFunction> {
    check_dim(f.dim, g.dim)?;
    let (big, small) = if f.len() >= g.len() { (f, g) } else { (g, f) };
    let Some(dense) = big.to_dense() else {
        return Ok(LatticeFunction::empty(f.dim));
    };
    if small.is_empty() {
        return Ok(LatticeFunction::empty(f.dim));
    }
    let out = dense.convolve_sparse(small.iter().map(|(x, v)| (x.as_slice(), *v)));
    Ok(out.to_lattice_function(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PowerMethod {
    Direct,
    Fft,
}

impl std::str::FromStr for PowerMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(PowerMethod::Direct),
            "fft" => Ok(PowerMethod::Fft),
            other => Err(Error::invalid(format!("unknown power method '{other}'"))),
        }
    }
}

/// `phi^(n)` with the default FFT memory cap.
pub fn power(f: &LatticeFunction, n: u64, method: PowerMethod) -> Result<LatticeFunction> {
    power_with_cap(f, n, method, DEFAULT_FFT_CAP)
}

/// `phi^(n)`; `cap` bounds the number of complex grid cells the FFT route may
/// allocate.
pub fn power_with_cap(
    f: &LatticeFunction,
    n: u64,
    method: PowerMethod,
    cap: usize,
) -> Result<LatticeFunction> {
    if n == 0 {
        return Err(Error::invalid("convolution power requires n >= 1"));
    }
    if f.is_empty() {
        return Ok(LatticeFunction::empty(f.dim));
    }
    match method {
        PowerMethod::Direct => power_direct(f, n),
        PowerMethod::Fft => {
            let grid = fft::power_dense(f, n, cap)?;
            let thresh = FFT_PRUNE_REL * grid.sup_norm();
            Ok(grid.to_lattice_function(thresh))
        }
    }
}

/// Repeated convolution with `phi`, kept dense between steps.
fn power_direct(f: &LatticeFunction, n: u64) -> Result<LatticeFunction> {
    let Some(mut acc) = f.to_dense() else {
        return Ok(LatticeFunction::empty(f.dim));
    };
    let taps: Vec<(&[i64], Complex64)> = f.iter().map(|(x, v)| (x.as_slice(), *v)).collect();
    for _ in 1..n {
        acc = acc.convolve_sparse(taps.iter().copied());
    }
    Ok(acc.to_lattice_function(0.0))
}

/// A set of lattice offsets around the rounded center `round(center)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeWindow {
    pub center: Vec<f64>,
    pub offsets: Vec<Vec<i64>>,
}

impl LatticeWindow {
    pub fn new(center: Vec<f64>, offsets: Vec<Vec<i64>>) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::invalid("window must contain at least one offset"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for o in &offsets {
            check_dim(center.len(), o.len())?;
            if !seen.insert(o.clone()) {
                return Err(Error::invalid(format!("duplicate window offset {o:?}")));
            }
        }
        Ok(Self { center, offsets })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn base(&self) -> Vec<i64> {
        self.center.iter().map(|c| c.round() as i64).collect()
    }

    /// Absolute lattice points covered by the window, in offset order.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let base = self.base();
        self.offsets
            .iter()
            .map(|o| o.iter().zip(&base).map(|(a, b)| a + b).collect())
            .collect()
    }
}

/// Values of `f` at `round(center) + offset` for every window offset.
pub fn extract_window(
    f: &LatticeFunction,
    w: &LatticeWindow,
) -> Result<BTreeMap<Vec<i64>, Complex64>> {
    check_dim(f.dim, w.dim())?;
    Ok(w.offsets
        .iter()
        .cloned()
        .zip(w.points())
        .map(|(o, p)| (o, f.get(&p)))
        .collect())
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    x: Vec<i64>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct LatticeFunctionJson {
    dim: usize,
    entries: Vec<EntryJson>,
}

impl TryFrom<LatticeFunctionJson> for LatticeFunction {
    type Error = Error;

    fn try_from(j: LatticeFunctionJson) -> Result<Self> {
        LatticeFunction::new(
            j.dim,
            j.entries
                .into_iter()
                .map(|e| (e.x, Complex64::new(e.re, e.im))),
        )
    }
}

impl From<LatticeFunction> for LatticeFunctionJson {
    fn from(f: LatticeFunction) -> Self {
        LatticeFunctionJson {
            dim: f.dim,
            entries: f
                .entries
                .into_iter()
                .map(|(x, v)| EntryJson { x, re: v.re, im: v.im })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn lazy() -> LatticeFunction {
        LatticeFunction::from_real(1, [(vec![0], 0.5), (vec![1], 0.25), (vec![-1], 0.25)]).unwrap()
    }

    #[test]
    fn zeros_are_pruned_and_box_tracks_support() {
        let f = LatticeFunction::new(
            2,
            [
                (vec![0, 0], c(1.0)),
                (vec![3, -1], c(0.0)),
                (vec![-2, 4], c(2.0)),
                (vec![1, 1], c(1.0)),
                (vec![1, 1], c(-1.0)),
            ],
        )
        .unwrap();
        assert_eq!(f.len(), 2);
        let (lo, hi) = f.support_box().unwrap();
        assert_eq!(lo, &[-2, 0]);
        assert_eq!(hi, &[0, 4]);
    }

    #[test]
    fn rejects_wrong_coordinate_length() {
        let err = LatticeFunction::new(2, [(vec![0], c(1.0))]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn lazy_walk_squared() {
        let g = convolve(&lazy(), &lazy()).unwrap();
        let expect = [(0, 3.0 / 8.0), (1, 0.25), (-1, 0.25), (2, 1.0 / 16.0), (-2, 1.0 / 16.0)];
        assert_eq!(g.len(), 5);
        for (x, v) in expect {
            assert!((g.get(&[x]) - c(v)).norm() < 1e-15);
        }
    }

    #[test]
    fn delta_is_identity() {
        let f = lazy();
        let g = convolve(&LatticeFunction::delta(vec![0]), &f).unwrap();
        assert!(g.max_abs_diff(&f) < 1e-16);
    }

    #[test]
    fn convolve_dimension_mismatch() {
        let err = convolve(&lazy(), &LatticeFunction::delta(vec![0, 0])).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn minkowski_box() {
        let f = LatticeFunction::from_real(2, [(vec![-1, 0], 1.0), (vec![2, 3], 1.0)]).unwrap();
        let g = LatticeFunction::from_real(2, [(vec![0, -2], 1.0), (vec![1, 1], 1.0)]).unwrap();
        let h = convolve(&f, &g).unwrap();
        let (lo, hi) = h.support_box().unwrap();
        assert_eq!(lo, &[-1, -2]);
        assert_eq!(hi, &[3, 4]);
    }

    #[test]
    fn power_of_delta_translates() {
        let d = LatticeFunction::delta(vec![2, -1]);
        for method in [PowerMethod::Direct, PowerMethod::Fft] {
            let p = power(&d, 7, method).unwrap();
            assert_eq!(p.len(), 1);
            assert!((p.get(&[14, -7]) - c(1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn power_one_is_identity() {
        let f = lazy();
        assert_eq!(power(&f, 1, PowerMethod::Direct).unwrap(), f);
        assert!(power(&f, 1, PowerMethod::Fft).unwrap().max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn power_zero_rejected() {
        assert!(matches!(
            power(&lazy(), 0, PowerMethod::Direct),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn fft_cap_is_enforced() {
        let err = power_with_cap(&lazy(), 1000, PowerMethod::Fft, 64).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn norms() {
        assert_eq!(LatticeFunction::delta(vec![0]).sup_norm(), 1.0);
        assert_eq!(LatticeFunction::empty(3).sup_norm(), 0.0);
        let f = LatticeFunction::from_real(
            1,
            [
                (vec![0], 0.5),
                (vec![1], 1.0 / 3.0),
                (vec![-1], 1.0 / 3.0),
                (vec![2], -1.0 / 12.0),
                (vec![-2], -1.0 / 12.0),
            ],
        )
        .unwrap();
        assert!((f.l1_norm() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn windows() {
        let d = LatticeFunction::delta(vec![0]);
        let w = LatticeWindow::new(vec![0.2], vec![vec![0]]).unwrap();
        let vals = extract_window(&d, &w).unwrap();
        assert_eq!(vals[&vec![0]], c(1.0));

        let far = LatticeWindow::new(vec![100.0], vec![vec![-1], vec![0], vec![1]]).unwrap();
        assert!(extract_window(&d, &far)
            .unwrap()
            .values()
            .all(|v| v.norm() == 0.0));

        assert!(LatticeWindow::new(vec![0.0], vec![]).is_err());
        assert!(LatticeWindow::new(vec![0.0], vec![vec![1], vec![1]]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = LatticeFunction::new(
            2,
            [
                (vec![0, 0], Complex64::new(0.25, -0.5)),
                (vec![1, -3], Complex64::new(1e-300, 3.0)),
            ],
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: LatticeFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
