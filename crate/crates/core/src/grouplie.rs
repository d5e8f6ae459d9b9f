//! One-parameter matrix groups `t^E = exp(log(t) E)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const CONTRACTING_TOL: f64 = 1e-10;

/// A real `d x d` generator `E` together with its trace `mu`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct GroupGenerator {
    matrix: DMatrix<f64>,
    trace_order: f64,
}

impl GroupGenerator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::invalid("generator must be a non-empty square matrix"));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("generator has non-finite entries"));
        }
        let trace_order = matrix.trace();
        Ok(GroupGenerator {
            matrix,
            trace_order,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("generator rows must form a square matrix"));
        }
        Self::new(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
    }

    pub fn diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(diag)))
    }

    /// `diag(1/(2m_1), ..., 1/(2m_d))`.
    pub fn canonical(weights2m: &[u32]) -> Self {
        let diag: Vec<f64> = weights2m.iter().map(|&w| 1.0 / w as f64).collect();
        Self::diagonal(&diag).expect("positive weights")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `mu = tr E`.
    pub fn trace_order(&self) -> f64 {
        self.trace_order
    }

    pub fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.matrix[(i, j)] == 0.0))
    }

    pub fn diagonal_entries(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.matrix.row(i).iter().copied().collect())
            .collect()
    }

    /// `E*`.
    pub fn adjoint(&self) -> Self {
        Self::new(self.matrix.transpose()).expect("transpose of a valid generator")
    }

    /// `c E`.
    pub fn scale_generator(&self, c: f64) -> Self {
        Self::new(&self.matrix * c).expect("finite scalar multiple")
    }

    /// `t^E` by Padé scaling-and-squaring.
    pub fn group_power(&self, t: f64) -> Result<DMatrix<f64>> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("group_power needs t > 0, got {t}")));
        }
        if self.is_diagonal() {
            let d: Vec<f64> = self.diagonal_entries().iter().map(|e| t.powf(*e)).collect();
            return Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)));
        }
        Ok((&self.matrix * t.ln()).exp())
    }

    /// `t^E x`.
    pub fn apply(&self, t: f64, x: &[f64]) -> Result<Vec<f64>> {
        let m = self.group_power(t)?;
        let v = m * nalgebra::DVector::from_column_slice(x);
        Ok(v.iter().copied().collect())
    }

    /// Every eigenvalue of `E` has real part above the tolerance.
    pub fn is_contracting(&self) -> bool {
        self.matrix
            .clone()
            .complex_eigenvalues()
            .iter()
            .all(|z| z.re > CONTRACTING_TOL)
    }
}

pub fn group_power(e: &GroupGenerator, t: f64) -> Result<DMatrix<f64>> {
    e.group_power(t)
}

pub fn is_contracting(e: &GroupGenerator) -> bool {
    e.is_contracting()
}

pub fn adjoint(e: &GroupGenerator) -> GroupGenerator {
    e.adjoint()
}

pub fn scale_generator(e: &GroupGenerator, c: f64) -> GroupGenerator {
    e.scale_generator(c)
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    dim: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<MatrixJson> for GroupGenerator {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        if j.rows.len() != j.dim {
            return Err(Error::DimensionMismatch {
                expected: j.dim,
                got: j.rows.len(),
            });
        }
        GroupGenerator::from_rows(&j.rows)
    }
}

impl From<GroupGenerator> for MatrixJson {
    fn from(g: GroupGenerator) -> Self {
        MatrixJson {
            dim: g.dim(),
            rows: g.rows(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).amax() <= tol
    }

    /// exp(A) by its Taylor series summed until terms vanish.
    fn series_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
        let d = a.nrows();
        let mut sum = DMatrix::identity(d, d);
        let mut term = DMatrix::identity(d, d);
        for k in 1..200 {
            term = &term * a / k as f64;
            sum += &term;
            if term.amax() < 1e-18 {
                break;
            }
        }
        sum
    }

    #[test]
    fn identity_at_one() {
        let e = GroupGenerator::from_rows(&[vec![0.3, 1.0], vec![-0.2, 0.7]]).unwrap();
        assert!(close(&e.group_power(1.0).unwrap(), &DMatrix::identity(2, 2), 1e-14));
    }

    #[test]
    fn diagonal_power() {
        let e = GroupGenerator::diagonal(&[0.5, 0.25]).unwrap();
        let m = e.group_power(16.0).unwrap();
        assert!(close(&m, &DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 2.0]), 1e-14));
    }

    #[test]
    fn jordan_block_against_series() {
        let e = GroupGenerator::from_rows(&[vec![0.5, 1.0], vec![0.0, 0.5]]).unwrap();
        let t = 2f64.exp();
        let m = e.group_power(t).unwrap();
        let expect = series_exp(&(e.matrix() * 2.0));
        assert!(close(&m, &expect, 1e-12));
        let hand = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]) * 1f64.exp();
        assert!(close(&m, &hand, 1e-12));
    }

    #[test]
    fn rejects_nonpositive_t() {
        let e = GroupGenerator::diagonal(&[1.0]).unwrap();
        assert!(e.group_power(0.0).is_err());
        assert!(e.group_power(-1.0).is_err());
    }

    #[test]
    fn contracting_cases() {
        assert!(GroupGenerator::diagonal(&[0.5, 0.25]).unwrap().is_contracting());
        assert!(!GroupGenerator::diagonal(&[0.5, -0.25]).unwrap().is_contracting());
        let skew = GroupGenerator::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        assert!(!skew.is_contracting());
    }

    #[test]
    fn adjoint_and_scaling() {
        let n = GroupGenerator::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(n.adjoint().rows(), vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let d = GroupGenerator::diagonal(&[0.3, 0.7]).unwrap();
        assert_eq!(d.adjoint(), d);
        let e = GroupGenerator::from_rows(&[vec![0.5, 2.0], vec![1.0, 0.25]]).unwrap();
        assert!((e.scale_generator(0.5).trace_order() - e.trace_order() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let e = GroupGenerator::from_rows(&[vec![0.5, 2.0], vec![1.0, 0.25]]).unwrap();
        let s = serde_json::to_string(&e).unwrap();
        assert_eq!(s, r#"{"dim":2,"rows":[[0.5,2.0],[1.0,0.25]]}"#);
        let back: GroupGenerator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<GroupGenerator>(r#"{"dim":2,"rows":[[1.0]]}"#).is_err());
    }
}
