//! Fourier symbols, their maximizers and the local classification of each
//! maximizer.

mod analysis;
mod classify;
mod maximizers;
mod series;

use num_complex::Complex64;

use crate::error::{check_dim, Result};
use crate::lattice::LatticeFunction;

pub use analysis::{analyze, AnalyzeOptions, PhiAnalysis};
pub use classify::{
    classify_point, imaginary_tail, Level, PointClassification, PointKind, WeightChoice, ZERO_TOL,
};
pub use maximizers::{
    find_maximizers, torus_distance, torus_shift, wrap_angle, Maximizer, MaximizerSearch,
    DEFAULT_CLUSTER_TOL, DEFAULT_GRID_PER_AXIS,
};
pub use series::{gamma_series, SymbolSeries, DEFAULT_SERIES_DEGREE};

/// `phi_hat(xi) = sum_x phi(x) e^{i x.xi}`.
pub fn symbol(f: &LatticeFunction, xi: &[f64]) -> Result<Complex64> {
    check_dim(f.dim(), xi.len())?;
    Ok(eval_symbol(f, xi))
}

pub(crate) fn eval_symbol(f: &LatticeFunction, xi: &[f64]) -> Complex64 {
    f.iter()
        .map(|(x, a)| {
            let phase: f64 = x.iter().zip(xi).map(|(&k, &s)| k as f64 * s).sum();
            a * Complex64::from_polar(1.0, phase)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_symbol_is_one() {
        let d = LatticeFunction::delta(vec![0, 0]);
        assert_eq!(symbol(&d, &[0.3, -1.2]).unwrap(), Complex64::new(1.0, 0.0));
        assert!(symbol(&d, &[0.3]).is_err());
    }

    #[test]
    fn translate_picks_up_phase() {
        let d = LatticeFunction::delta(vec![2]);
        let v = symbol(&d, &[0.25]).unwrap();
        assert!((v - Complex64::from_polar(1.0, 0.5)).norm() < 1e-15);
    }
}
