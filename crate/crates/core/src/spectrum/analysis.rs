use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    classify_point, find_maximizers, gamma_series, torus_shift, PointClassification, WeightChoice,
    DEFAULT_CLUSTER_TOL, DEFAULT_GRID_PER_AXIS, DEFAULT_SERIES_DEGREE,
};
use crate::error::Result;
use crate::lattice::LatticeFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzeOptions {
    pub grid_per_axis: usize,
    pub cluster_tol: f64,
    pub series_degree: u32,
    pub weights: WeightChoice,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            grid_per_axis: DEFAULT_GRID_PER_AXIS,
            cluster_tol: DEFAULT_CLUSTER_TOL,
            series_degree: DEFAULT_SERIES_DEGREE,
            weights: WeightChoice::Auto,
        }
    }
}

/// Maximizers of `|phi_hat|`, their classifications, the homogeneous order
/// `mu_phi` and the points attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiAnalysis {
    pub phi: LatticeFunction,
    pub maximizers: Vec<PointClassification>,
    /// Minimum of `mu` over classified maximizers.
    pub mu_phi: Option<f64>,
    /// Indices of classified maximizers with `mu = mu_phi`.
    pub dominant: Vec<usize>,
    pub shift: Vec<f64>,
    pub warnings: Vec<String>,
}

impl PhiAnalysis {
    pub fn dominant_points(&self) -> impl Iterator<Item = &PointClassification> {
        self.dominant.iter().map(|&i| &self.maximizers[i])
    }

    pub fn all_classified(&self) -> bool {
        self.maximizers.iter().all(|m| m.is_classified())
    }
}

pub fn analyze(f: &LatticeFunction, options: &AnalyzeOptions) -> Result<PhiAnalysis> {
    let search = find_maximizers(f, options.grid_per_axis, options.cluster_tol)?;
    let mut warnings = search.warnings.clone();
    let maximizers: Vec<PointClassification> = search
        .points
        .par_iter()
        .map(|m| {
            let series = gamma_series(f, &m.xi, options.series_degree)?;
            classify_point(&series, &options.weights)
        })
        .collect::<Result<_>>()?;

    let mu_phi = maximizers
        .iter()
        .filter_map(|m| m.mu)
        .fold(None, |acc: Option<f64>, mu| Some(acc.map_or(mu, |a| a.min(mu))));
    let dominant = match mu_phi {
        Some(mp) => maximizers
            .iter()
            .enumerate()
            .filter(|(_, m)| m.mu.is_some_and(|mu| (mu - mp).abs() < 1e-12))
            .map(|(i, _)| i)
            .collect(),
        None => Vec::new(),
    };
    for m in maximizers.iter().filter(|m| !m.is_classified()) {
        warnings.push(format!("maximizer {:?} is unclassified", m.xi0));
    }
    let pts: Vec<Vec<f64>> = maximizers.iter().map(|m| m.xi0.clone()).collect();
    let shift = torus_shift(&pts, f.dim());
    Ok(PhiAnalysis {
        phi: f.clone(),
        maximizers,
        mu_phi,
        dominant,
        shift,
        warnings,
    })
}
