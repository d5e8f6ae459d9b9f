use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{check_abs_positive_definite, check_homogeneity_with, WeightedPolynomial};
use crate::error::{Error, Result};
use crate::grouplie::GroupGenerator;

/// Quadrature nodes on the unital level set `S = {|Q| = 1}` with weights for
/// the polar surface measure, so that
/// `int f dxi = int_S int_0^inf f(r^E eta) r^(mu-1) dr sigma(d eta)`.
#[derive(Clone, Debug)]
pub struct PolarChart {
    generator: GroupGenerator,
    nodes: Vec<Vec<f64>>,
    weights_sigma: Vec<f64>,
}

impl PolarChart {
    pub fn generator(&self) -> &GroupGenerator {
        &self.generator
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights_sigma(&self) -> &[f64] {
        &self.weights_sigma
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sigma(S)`, which equals `mu * m(B)`.
    pub fn total_sigma(&self) -> f64 {
        self.weights_sigma.iter().sum()
    }
}

/// Builds the chart by pushing the Euclidean unit circle onto `S` along group
/// orbits: `eta(theta) = |Q(u)|^(-E) u(theta)`. The node weight is
/// `|det[E eta, |Q(u)|^(-E) u'(theta)]| * dtheta`; the orbit-direction part of
/// the tangent drops out of the determinant. For `d = 1` the two points of `S`
/// carry weight `|E eta|`.
pub fn polar_chart(q: &WeightedPolynomial, e: &GroupGenerator, nodes: usize) -> Result<PolarChart> {
    let d = q.dim();
    if e.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: e.dim(),
        });
    }
    if d > 2 {
        return Err(Error::geometry(format!("polar charts support d <= 2, got {d}")));
    }
    if !check_abs_positive_definite(q, 4096)? {
        return Err(Error::geometry("|Q| is not positive definite"));
    }
    if !check_homogeneity_with(
        |x| num_complex::Complex64::new(q.eval(x).norm(), 0.0),
        d,
        e,
        64,
        0x5eed,
    )? {
        return Err(Error::invalid("generator is not in Exp(|Q|)"));
    }
    if !e.is_contracting() {
        return Err(Error::invalid("generator must be contracting"));
    }

    let em = e.matrix();
    let dirs: Vec<(Vec<f64>, Vec<f64>)> = if d == 1 {
        vec![(vec![1.0], vec![0.0]), (vec![-1.0], vec![0.0])]
    } else {
        if nodes < 8 {
            return Err(Error::invalid("a 2-D chart needs at least 8 nodes"));
        }
        (0..nodes)
            .map(|j| {
                let th = 2.0 * PI * j as f64 / nodes as f64;
                (vec![th.cos(), th.sin()], vec![-th.sin(), th.cos()])
            })
            .collect()
    };
    let dtheta = 2.0 * PI / dirs.len() as f64;

    let mut pts = Vec::with_capacity(dirs.len());
    let mut wts = Vec::with_capacity(dirs.len());
    for (u, du) in &dirs {
        let g = q.eval(u).norm();
        let m = e.group_power(1.0 / g)?;
        let eta = &m * DVector::from_column_slice(u);
        let e_eta = em * &eta;
        let w = if d == 1 {
            e_eta[0].abs()
        } else {
            let tang = &m * DVector::from_column_slice(du);
            let j = DMatrix::from_columns(&[e_eta, tang]);
            j.determinant().abs() * dtheta
        };
        let eta: Vec<f64> = eta.iter().copied().collect();
        let level = q.eval(&eta).norm();
        if (level - 1.0).abs() > 1e-8 {
            return Err(Error::geometry(format!(
                "chart node {eta:?} has |Q| = {level}, expected 1"
            )));
        }
        pts.push(eta);
        wts.push(w);
    }
    Ok(PolarChart {
        generator: e.clone(),
        nodes: pts,
        weights_sigma: wts,
    })
}
