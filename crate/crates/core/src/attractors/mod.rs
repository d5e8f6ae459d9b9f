//! The attractors `H_P` (absolutely convergent) and `H_{iQ}` (renormalized
//! over the sublevel family `{|Q| < tau}` or over rectangles).

mod oned;
mod quadrature;
mod radial;
mod table;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_ur};

pub use oned::{airy_ai, heat_kernel, oned_oracle, vdc_bound};
pub use table::{AttractorTable, MAX_TABLE_DEGREE};

use crate::error::{check_dim, Error, Result};
use crate::grouplie::GroupGenerator;
use crate::homogeneous::{check_homogeneity, check_positive_definite, polar_chart, PolarChart, WeightedPolynomial};
use crate::spectrum::{PointClassification, PointKind};
use radial::Ray;

pub const DEFAULT_CHART_NODES: usize = 2048;
/// Coarsest level of the nested chart sums.
const FIRST_CHART_LEVEL: usize = 32;
pub const DEFAULT_RENORM_TOL: f64 = 1e-6;
/// Bound on the neglected tail `(2pi)^-d int_{R >= tau*} e^{-R}` of `H_P`.
const POSITIVE_TAIL: f64 = 1e-10;
/// Shells below this radius are integrated on the real axis in trace mode.
const TRACE_REAL_RADIUS: f64 = 64.0;
const MAX_SHELLS: usize = 400;
const DIVERGENCE_RUN: usize = 8;
const NODE_TOL: f64 = 1e-11;
/// Agreement of successive nested chart sums that ends node refinement.
const CHART_AGREEMENT: f64 = 1e-10;
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[default]
    Sublevel,
    Rectangular,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AttractorKind {
    /// `P = R + iQ`.
    Positive { r: WeightedPolynomial, q: WeightedPolynomial },
    Imaginary { q: WeightedPolynomial },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct AttractorSpec {
    pub kind: AttractorKind,
    pub generator: GroupGenerator,
    pub mu: f64,
    pub family: Family,
    /// Lets the sublevel family run at `mu >= 1`, where it need not converge.
    pub allow_divergent: bool,
}

fn real_coeffs(p: &WeightedPolynomial, what: &str) -> Result<()> {
    if !p.is_real() {
        return Err(Error::invalid(format!("{what} must have real coefficients")));
    }
    Ok(())
}

impl AttractorSpec {
    pub fn new(kind: AttractorKind, generator: GroupGenerator, family: Family) -> Result<Self> {
        let spec = AttractorSpec {
            mu: generator.trace_order(),
            kind,
            generator,
            family,
            allow_divergent: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `H_{iQ}` with the canonical generator of `Q`'s weights.
    pub fn imaginary(q: WeightedPolynomial) -> Result<Self> {
        let e = q.canonical_generator();
        Self::new(AttractorKind::Imaginary { q }, e, Family::Sublevel)
    }

    /// `H_P` for complex `P`, split as `R + iQ`.
    pub fn positive(p: &WeightedPolynomial) -> Result<Self> {
        let (r, q) = p.split();
        let e = r.canonical_generator();
        Self::new(AttractorKind::Positive { r, q }, e, Family::Sublevel)
    }

    /// The attractor attached to a classified maximizer.
    pub fn from_point(point: &PointClassification) -> Result<Self> {
        let e = point
            .generator
            .clone()
            .ok_or_else(|| Error::hypothesis(format!("maximizer {:?} is unclassified", point.xi0)))?;
        let kind = match point.kind {
            PointKind::PositiveHomogeneous => AttractorKind::Positive {
                r: point.r.clone().ok_or_else(|| Error::invalid("positive point without R"))?,
                q: point
                    .q
                    .clone()
                    .unwrap_or_else(|| WeightedPolynomial::new(e_weights(&e), []).expect("empty")),
            },
            PointKind::ImaginaryHomogeneous => AttractorKind::Imaginary {
                q: point.q.clone().ok_or_else(|| Error::invalid("imaginary point without Q"))?,
            },
            _ => {
                return Err(Error::hypothesis(format!(
                    "maximizer {:?} is not of positive or imaginary homogeneous type",
                    point.xi0
                )))
            }
        };
        Self::new(kind, e, Family::Sublevel)
    }

    pub fn with_family(mut self, family: Family) -> Result<Self> {
        self.family = family;
        self.validate()?;
        Ok(self)
    }

    pub fn allowing_divergence(mut self) -> Self {
        self.allow_divergent = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// The same attractor for `tP` (or `tQ`), i.e. `H^t` as a `t = 1` problem.
    pub fn scaled(&self, t: f64) -> Self {
        let c = Complex64::new(t, 0.0);
        let kind = match &self.kind {
            AttractorKind::Positive { r, q } => AttractorKind::Positive {
                r: r.scale(c),
                q: q.scale(c),
            },
            AttractorKind::Imaginary { q } => AttractorKind::Imaginary { q: q.scale(c) },
        };
        AttractorSpec { kind, ..self.clone() }
    }

    /// `-Q` in place of `Q`. For real coefficients the new attractor is
    /// `x -> conj(H(-x))`.
    pub fn conjugate(&self) -> Self {
        let c = Complex64::new(-1.0, 0.0);
        let kind = match &self.kind {
            AttractorKind::Positive { r, q } => AttractorKind::Positive {
                r: r.clone(),
                q: q.scale(c),
            },
            AttractorKind::Imaginary { q } => AttractorKind::Imaginary { q: q.scale(c) },
        };
        AttractorSpec { kind, ..self.clone() }
    }

    fn validate(&self) -> Result<()> {
        let d = self.generator.dim();
        if !self.generator.is_diagonal() {
            return Err(Error::invalid("attractor evaluation supports diagonal generators only"));
        }
        if !self.generator.is_contracting() {
            return Err(Error::invalid("generator must be contracting"));
        }
        match &self.kind {
            AttractorKind::Imaginary { q } => {
                check_dim(d, q.dim())?;
                real_coeffs(q, "Q")?;
                if q.is_zero() {
                    return Err(Error::invalid("Q must be nonzero"));
                }
                if self.family == Family::Sublevel && self.mu >= 1.0 && !self.allow_divergent {
                    return Err(Error::hypothesis(format!(
                        "the sublevel renormalization needs mu < 1, got mu = {}",
                        self.mu
                    )));
                }
            }
            AttractorKind::Positive { r, q } => {
                check_dim(d, r.dim())?;
                check_dim(d, q.dim())?;
                real_coeffs(r, "R")?;
                real_coeffs(q, "Q")?;
                if !check_positive_definite(r, 4096)? {
                    return Err(Error::hypothesis("R is not positive definite"));
                }
                if !q.is_zero() && !check_homogeneity(q, &self.generator, 64, 0x5eed)? {
                    return Err(Error::invalid("generator is not in Exp(Q)"));
                }
            }
        }
        if self.family == Family::Rectangular {
            rect_factors(self)?;
        }
        Ok(())
    }
}

fn e_weights(e: &GroupGenerator) -> Vec<u32> {
    e.diagonal_entries().iter().map(|v| (1.0 / v).round() as u32).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindTag {
    Positive,
    Imaginary,
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    kind: KindTag,
    #[serde(rename = "Q")]
    q: Option<WeightedPolynomial>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    r: Option<WeightedPolynomial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generator: Option<GroupGenerator>,
    #[serde(default)]
    family: Family,
    #[serde(default)]
    allow_divergent: bool,
}

impl TryFrom<SpecJson> for AttractorSpec {
    type Error = Error;

    fn try_from(j: SpecJson) -> Result<Self> {
        let (kind, weights_from) = match j.kind {
            KindTag::Imaginary => {
                let q = j.q.ok_or_else(|| Error::invalid("imaginary attractor needs Q"))?;
                let w = q.weights().to_vec();
                (AttractorKind::Imaginary { q }, w)
            }
            KindTag::Positive => {
                let r = j.r.ok_or_else(|| Error::invalid("positive attractor needs R"))?;
                let w = r.weights().to_vec();
                let q = match j.q {
                    Some(q) => q,
                    None => WeightedPolynomial::new(w.clone(), [])?,
                };
                (AttractorKind::Positive { r, q }, w)
            }
        };
        let e = j.generator.unwrap_or_else(|| GroupGenerator::canonical(&weights_from));
        let spec = AttractorSpec {
            mu: e.trace_order(),
            kind,
            generator: e,
            family: j.family,
            allow_divergent: j.allow_divergent,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<AttractorSpec> for SpecJson {
    fn from(s: AttractorSpec) -> Self {
        let (kind, q, r) = match s.kind {
            AttractorKind::Positive { r, q } => (KindTag::Positive, Some(q), Some(r)),
            AttractorKind::Imaginary { q } => (KindTag::Imaginary, Some(q), None),
        };
        SpecJson {
            kind,
            q,
            r,
            generator: Some(s.generator),
            family: s.family,
            allow_divergent: s.allow_divergent,
        }
    }
}

/// Outcome of a sublevel renormalization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormResult {
    pub value: Complex64,
    /// `(tau, partial value over {|Q| < tau})`.
    pub tau_trace: Vec<(f64, Complex64)>,
    /// Moduli of the shell increments.
    pub cauchy_residuals: Vec<f64>,
    pub converged: bool,
}

impl RenormResult {
    pub fn increments(&self) -> Vec<Complex64> {
        self.tau_trace.windows(2).map(|w| w[1].1 - w[0].1).collect()
    }
}

enum Engine {
    Chart {
        chart: PolarChart,
        /// Linear radial coefficient `a` of each node.
        a: Vec<Complex64>,
        /// Radial cut-off for the positive kind.
        radius: Option<f64>,
    },
    /// Per-axis `(m_j, beta_j)` of a separable symbol.
    Product(Vec<(u32, Complex64)>),
}

/// An attractor prepared for repeated evaluation.
pub struct Attractor {
    spec: AttractorSpec,
    exps: Vec<f64>,
    lift: Option<u32>,
    engine: Engine,
}

/// `(m_j, beta_j)` with `beta_j xi_j^m_j` the `j`-th summand of a separable
/// `P` (or `iQ`).
pub fn rect_factors(spec: &AttractorSpec) -> Result<Vec<(u32, Complex64)>> {
    let d = spec.dim();
    let (p, weights) = match &spec.kind {
        AttractorKind::Positive { r, q } => (r.add(&q.scale(I))?, r.weights().to_vec()),
        AttractorKind::Imaginary { q } => (q.scale(I), q.weights().to_vec()),
    };
    let mut out = vec![(0u32, Complex64::new(0.0, 0.0)); d];
    for (beta, c) in p.terms() {
        let axes: Vec<usize> = (0..d).filter(|&k| beta[k] > 0).collect();
        if axes.len() != 1 {
            return Err(Error::invalid(format!(
                "symbol is not separable: mixed monomial {beta:?}"
            )));
        }
        let k = axes[0];
        if beta[k] != weights[k] {
            return Err(Error::invalid(format!("monomial {beta:?} is off the weighted level")));
        }
        out[k] = (beta[k], *c);
    }
    if let Some(k) = out.iter().position(|(m, _)| *m == 0) {
        return Err(Error::invalid(format!("axis {k} has no pure power term")));
    }
    Ok(out)
}

impl Attractor {
    pub fn new(spec: AttractorSpec) -> Result<Self> {
        Self::with_nodes(spec, DEFAULT_CHART_NODES)
    }

    pub fn with_nodes(spec: AttractorSpec, nodes: usize) -> Result<Self> {
        spec.validate()?;
        let exps = spec.generator.diagonal_entries();
        let engine = if spec.family == Family::Rectangular {
            Engine::Product(rect_factors(&spec)?)
        } else {
            match &spec.kind {
                AttractorKind::Imaginary { q } => {
                    let chart = polar_chart(q, &spec.generator, nodes)?;
                    let a = chart.nodes().iter().map(|eta| I * q.eval(eta).re.signum()).collect();
                    Engine::Chart { chart, a, radius: None }
                }
                AttractorKind::Positive { r, q } => {
                    let chart = polar_chart(r, &spec.generator, nodes)?;
                    let a = chart
                        .nodes()
                        .iter()
                        .map(|eta| Complex64::new(1.0, q.eval(eta).re))
                        .collect();
                    let radius = positive_radius(spec.mu, chart.total_sigma(), spec.dim())?;
                    Engine::Chart {
                        chart,
                        a,
                        radius: Some(radius),
                    }
                }
            }
        };
        let lift = radial::integer_lift(&exps);
        Ok(Attractor { spec, exps, lift, engine })
    }

    pub fn spec(&self) -> &AttractorSpec {
        &self.spec
    }

    fn norm_factor(&self) -> f64 {
        (2.0 * PI).powi(-(self.spec.dim() as i32))
    }

    fn ray<'a>(&'a self, a: Complex64, eta: &[f64], y: &[f64]) -> Ray<'a> {
        Ray {
            a,
            mu: self.spec.mu,
            e: &self.exps,
            c: eta.iter().zip(y).map(|(n, v)| n * v).collect(),
            lift: self.lift,
        }
    }

    /// `H^1(y)`.
    pub fn unit_value(&self, y: &[f64]) -> Result<Complex64> {
        check_dim(self.spec.dim(), y.len())?;
        match &self.engine {
            Engine::Product(f) => product(f, 1.0, y),
            Engine::Chart { chart, a, radius } => {
                let node = |j: usize| -> Result<Complex64> {
                    let ray = self.ray(a[j], &chart.nodes()[j], y);
                    match radius {
                        Some(rad) => ray.segment(0.0, *rad, NODE_TOL),
                        None => {
                            let (t, end) = ray.contour_start(1.0)?;
                            Ok(ray.segment(0.0, t, NODE_TOL)? + ray.tail(t, end, NODE_TOL)?)
                        }
                    }
                };
                let (_, sum) = refine_chart(chart, node, |v| *v)?;
                Ok(sum * self.norm_factor())
            }
        }
    }

    /// `H^t(x)`. The chart path uses `H^t(x) = t^-mu H^1(t^{-E*} x)`; the
    /// rectangular path multiplies one-dimensional kernels at time `t`.
    pub fn value(&self, t: f64, x: &[f64]) -> Result<Complex64> {
        check_t(t)?;
        check_dim(self.spec.dim(), x.len())?;
        match &self.engine {
            Engine::Product(f) => product(f, t, x),
            Engine::Chart { .. } => {
                let y = self.spec.generator.adjoint().apply(1.0 / t, x)?;
                Ok(self.unit_value(&y)? * t.powf(-self.spec.mu))
            }
        }
    }

    /// Renormalized `H_{iQ}^t(x)` with the shell trace at `tau_j = 2^j`.
    pub fn renormalized(&self, t: f64, x: &[f64], tol: f64) -> Result<RenormResult> {
        check_t(t)?;
        check_dim(self.spec.dim(), x.len())?;
        if !(tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        if !matches!(self.spec.kind, AttractorKind::Imaginary { .. }) {
            return Err(Error::invalid("renormalization applies to the imaginary kind"));
        }
        let (chart, a) = match &self.engine {
            Engine::Product(f) => {
                return Ok(RenormResult {
                    value: product(f, t, x)?,
                    tau_trace: Vec::new(),
                    cauchy_residuals: Vec::new(),
                    converged: true,
                })
            }
            Engine::Chart { chart, a, .. } => (chart, a),
        };
        let y = self.spec.generator.adjoint().apply(1.0 / t, x)?;
        let scale = self.norm_factor() * t.powf(-self.spec.mu);
        let (picked, full) = refine_chart(
            chart,
            |j| NodeTrace::new(self.ray(a[j], &chart.nodes()[j], &y)),
            |n| n.full,
        )?;
        let full = full * scale;
        let (weights, nodes): (Vec<f64>, Vec<NodeTrace>) = picked.into_iter().unzip();

        let mut trace: Vec<(f64, Complex64)> = Vec::new();
        let mut residuals: Vec<f64> = Vec::new();
        let mut converged = false;
        let mut small_run = 0;
        let mut rising_run = 0;
        for j in 0..=MAX_SHELLS {
            let tau = (j as f64).exp2();
            let parts: Vec<Complex64> = nodes
                .par_iter()
                .map(|n| n.partial(tau))
                .collect::<Result<_>>()?;
            let s: Complex64 = parts.iter().zip(&weights).map(|(v, w)| v * w).sum::<Complex64>() * scale;
            if let Some(&(_, prev)) = trace.last() {
                let inc: f64 = (s - prev).norm();
                if let Some(&last) = residuals.last() {
                    rising_run = if inc >= last { rising_run + 1 } else { 0 };
                }
                small_run = if inc < tol { small_run + 1 } else { 0 };
                residuals.push(inc);
            }
            trace.push((tau / t, s));
            if small_run >= 3 {
                converged = true;
                break;
            }
            if rising_run >= DIVERGENCE_RUN {
                break;
            }
        }
        let value = if self.spec.mu < 1.0 {
            full
        } else {
            trace.last().map(|p| p.1).unwrap_or(full)
        };
        Ok(RenormResult {
            value,
            tau_trace: trace,
            cauchy_residuals: residuals,
            converged,
        })
    }
}

/// Trapezoid sums over the chart on nested subsets of 32, 64, ... nodes up to
/// the full chart, stopping once two successive sums agree. The angular
/// integrand oscillates faster as `|y|` grows and the sums jump from aliased
/// to accurate once the level resolves it. Returns the node data of the
/// accepted level paired with their rescaled weights, and the weighted sum.
fn refine_chart<T, F, V>(chart: &PolarChart, eval: F, value: V) -> Result<(Vec<(f64, T)>, Complex64)>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync,
    V: Fn(&T) -> Complex64,
{
    let n = chart.len();
    let w = chart.weights_sigma();
    let mut stride = 1;
    while n % (2 * stride) == 0 && n / (2 * stride) >= FIRST_CHART_LEVEL {
        stride *= 2;
    }
    let mut done: Vec<(usize, T)> = Vec::new();
    let mut prev: Option<Complex64> = None;
    let mut last_gap = f64::INFINITY;
    loop {
        let fresh: Vec<usize> = (0..n)
            .step_by(stride)
            .filter(|j| j % (2 * stride) != 0 || prev.is_none())
            .collect();
        let vals: Vec<T> = fresh.par_iter().map(|&j| eval(j)).collect::<Result<_>>()?;
        done.extend(fresh.into_iter().zip(vals));
        let est: Complex64 = done.iter().map(|(j, v)| value(v) * w[*j]).sum::<Complex64>() * stride as f64;
        if let Some(p) = prev {
            last_gap = (est - p).norm();
            if last_gap < CHART_AGREEMENT {
                let scaled = done.into_iter().map(|(j, v)| (w[j] * stride as f64, v)).collect();
                return Ok((scaled, est));
            }
        }
        if stride == 1 {
            break;
        }
        prev = Some(est);
        stride /= 2;
    }
    if prev.is_none() {
        // Too few nodes to nest; the caller asked for exactly this chart.
        let est = done.iter().map(|(j, v)| value(v) * w[*j]).sum();
        return Ok((done.into_iter().map(|(j, v)| (w[j], v)).collect(), est));
    }
    Err(Error::accuracy(format!(
        "chart sums with {n} nodes still differ by {last_gap:.3e}; raise the node count"
    )))
}

/// Per-node data for the shell trace: real-axis partial sums up to the
/// contour start and the full radial integral.
struct NodeTrace {
    a: Complex64,
    mu: f64,
    e: Vec<f64>,
    /// `c_j = y_j eta_j`.
    c: Vec<f64>,
    lift: Option<u32>,
    start: f64,
    cumulative: Vec<(f64, Complex64)>,
    full: Complex64,
}

impl NodeTrace {
    fn new(ray: Ray<'_>) -> Result<Self> {
        let (start, end) = ray.contour_start(TRACE_REAL_RADIUS)?;
        let mut cumulative = vec![(1.0, ray.segment(0.0, 1.0, NODE_TOL)?)];
        let mut tau = 1.0;
        while tau < start {
            let s = cumulative.last().expect("non-empty").1 + ray.segment(tau, 2.0 * tau, NODE_TOL)?;
            tau *= 2.0;
            cumulative.push((tau, s));
        }
        let full = cumulative.last().expect("non-empty").1 + ray.tail(start, end, NODE_TOL)?;
        Ok(NodeTrace {
            a: ray.a,
            mu: ray.mu,
            e: ray.e.to_vec(),
            c: ray.c,
            lift: ray.lift,
            start,
            cumulative,
            full,
        })
    }

    /// Radial integral over `[0, tau]`.
    fn partial(&self, tau: f64) -> Result<Complex64> {
        if tau <= self.start {
            return Ok(self
                .cumulative
                .iter()
                .find(|(t, _)| *t >= tau)
                .expect("tau is a power of two below the start")
                .1);
        }
        let ray = Ray {
            a: self.a,
            mu: self.mu,
            e: &self.e,
            c: self.c.clone(),
            lift: self.lift,
        };
        let (t2, end) = ray.contour_start(tau)?;
        let bridge = ray.segment(tau, t2, NODE_TOL)?;
        Ok(self.full - bridge - ray.tail(t2, end, NODE_TOL)?)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("t must be positive, got {t}")));
    }
    Ok(())
}

fn product(factors: &[(u32, Complex64)], t: f64, x: &[f64]) -> Result<Complex64> {
    factors
        .iter()
        .zip(x)
        .try_fold(Complex64::new(1.0, 0.0), |acc, (&(m, beta), &xj)| {
            Ok(acc * oned_oracle(m, beta, t, xj)?)
        })
}

/// Smallest power-of-two radius with `(2pi)^-d sigma Gamma(mu, tau) < 1e-10`.
fn positive_radius(mu: f64, sigma: f64, d: usize) -> Result<f64> {
    let pre = (2.0 * PI).powi(-(d as i32)) * sigma * gamma(mu);
    let mut tau: f64 = 1.0;
    while pre * gamma_ur(mu, tau) >= POSITIVE_TAIL {
        tau *= 2.0;
        if tau > 1e6 {
            return Err(Error::accuracy("positive attractor tail bound unattainable"));
        }
    }
    Ok(tau)
}

/// `H_P^t(x)` for the positive kind.
pub fn attractor_positive(spec: &AttractorSpec, t: f64, x: &[f64]) -> Result<Complex64> {
    if !matches!(spec.kind, AttractorKind::Positive { .. }) {
        return Err(Error::invalid("attractor_positive needs the positive kind"));
    }
    Attractor::new(spec.clone())?.value(t, x)
}

/// `H_{iQ}^t(x)` by renormalization with its shell trace.
pub fn attractor_imaginary(spec: &AttractorSpec, t: f64, x: &[f64], tol: f64) -> Result<RenormResult> {
    Attractor::new(spec.clone())?.renormalized(t, x, tol)
}

/// Product of one-dimensional attractors for a separable symbol.
pub fn attractor_rect_product(spec: &AttractorSpec, t: f64, x: &[f64]) -> Result<Complex64> {
    check_t(t)?;
    check_dim(spec.dim(), x.len())?;
    product(&rect_factors(spec)?, t, x)
}

/// Evaluation request: a spec, a time and a list of points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttractorRequest {
    #[serde(flatten)]
    pub spec: AttractorSpec,
    #[serde(default = "one")]
    pub t: f64,
    pub points: Vec<Vec<f64>>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub nodes: Option<usize>,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
struct RequestJson {
    #[serde(flatten)]
    spec: SpecJson,
    #[serde(default = "one")]
    t: f64,
    points: Vec<Vec<f64>>,
    #[serde(default)]
    tol: Option<f64>,
    #[serde(default)]
    nodes: Option<usize>,
}

impl AttractorRequest {
    /// Parses a request, keeping hypothesis violations in the spec distinct
    /// from malformed JSON.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RequestJson =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("attractor request: {e}")))?;
        Ok(AttractorRequest {
            spec: AttractorSpec::try_from(raw.spec)?,
            t: raw.t,
            points: raw.points,
            tol: raw.tol,
            nodes: raw.nodes,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractorValue {
    pub x: Vec<f64>,
    pub re: f64,
    pub im: f64,
    pub converged: bool,
}

pub fn evaluate_request(req: &AttractorRequest) -> Result<Vec<AttractorValue>> {
    let att = Attractor::with_nodes(req.spec.clone(), req.nodes.unwrap_or(DEFAULT_CHART_NODES))?;
    let tol = req.tol.unwrap_or(DEFAULT_RENORM_TOL);
    req.points
        .iter()
        .map(|x| {
            let (v, converged) = match (&req.spec.kind, req.spec.family) {
                (AttractorKind::Imaginary { .. }, Family::Sublevel) => {
                    let r = att.renormalized(req.t, x, tol)?;
                    (r.value, r.converged)
                }
                _ => (att.value(req.t, x)?, true),
            };
            Ok(AttractorValue {
                x: x.clone(),
                re: v.re,
                im: v.im,
                converged,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(weights: Vec<u32>, terms: Vec<(Vec<u32>, Complex64)>) -> WeightedPolynomial {
        WeightedPolynomial::new(weights, terms).unwrap()
    }

    fn anisotropic_q() -> WeightedPolynomial {
        WeightedPolynomial::from_real(
            vec![2, 4],
            [(vec![2, 0], 4.0 / 96.0), (vec![1, 2], -1.0 / 96.0), (vec![0, 4], 1.0 / 96.0)],
        )
        .unwrap()
    }

    /// `(1/pi) int_0^L e^{-t b s^4} cos(x s) ds` by the plain trapezoid rule,
    /// which is spectrally accurate for this even, rapidly decaying integrand.
    fn quartic_trapezoid(b: f64, t: f64, x: f64) -> f64 {
        let len = (60.0 / (t * b)).powf(0.25);
        let n = 20_000;
        let h = len / n as f64;
        let f = |s: f64| (-t * b * s.powi(4)).exp() * (x * s).cos();
        let mut sum = 0.5 * (f(0.0) + f(len));
        for k in 1..n {
            sum += f(k as f64 * h);
        }
        sum * h / PI
    }

    #[test]
    fn one_dimensional_chart_is_the_imaginary_heat_kernel() {
        let q = WeightedPolynomial::from_real(vec![2], [(vec![2], 0.125)]).unwrap();
        let att = Attractor::new(AttractorSpec::imaginary(q).unwrap()).unwrap();
        for (t, x) in [(1.0, 0.0), (1.0, 1.7), (3.0, -4.0), (0.5, 0.3)] {
            let want = heat_kernel(c(0.0, 0.125), t, x);
            let got = att.value(t, &[x]).unwrap();
            assert!((got - want).norm() < 1e-9, "t={t} x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn quartic_positive_attractor_matches_two_rules() {
        let p = WeightedPolynomial::from_real(vec![4], [(vec![4], 1.0 / 12.0)]).unwrap();
        let spec = AttractorSpec::positive(&p).unwrap();
        for (t, x) in [(1.0, 0.0), (1.0, 1.5), (2.0, -3.0)] {
            let trap = quartic_trapezoid(1.0 / 12.0, t, x);
            let gk = oned_oracle(4, c(1.0 / 12.0, 0.0), t, x).unwrap();
            let chart = attractor_positive(&spec, t, &[x]).unwrap();
            assert!((gk.re - trap).abs() < 1e-10 && gk.im.abs() < 1e-14);
            assert!((chart - c(trap, 0.0)).norm() < 1e-9, "t={t} x={x}: {chart} vs {trap}");
        }
    }

    #[test]
    fn scaling_against_rescaled_symbol() {
        // H^t(x) from the scaling identity must equal H^1 of the symbol tQ.
        let cases = [
            AttractorSpec::imaginary(anisotropic_q()).unwrap(),
            AttractorSpec::positive(&poly(
                vec![2, 4],
                vec![(vec![2, 0], c(0.5, 0.1)), (vec![0, 4], c(0.25, -0.2)), (vec![1, 2], c(0.05, 0.0))],
            ))
            .unwrap(),
        ];
        for spec in cases {
            let att = Attractor::new(spec.clone()).unwrap();
            for t in [0.25, 4.0, 16.0] {
                let direct = Attractor::new(spec.scaled(t)).unwrap();
                for x in [[0.0, 0.0], [1.5, -0.7], [-3.0, 2.0]] {
                    let a = att.value(t, &x).unwrap();
                    let b = direct.value(1.0, &x).unwrap();
                    assert!((a - b).norm() < 1e-8, "t={t} x={x:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn negating_q_conjugates() {
        let spec = AttractorSpec::imaginary(anisotropic_q()).unwrap();
        let att = Attractor::new(spec.clone()).unwrap();
        let conj = Attractor::new(spec.conjugate()).unwrap();
        for x in [[0.4, -1.1], [2.0, 0.5]] {
            let a = att.value(1.0, &x).unwrap();
            let b = conj.value(1.0, &[-x[0], -x[1]]).unwrap();
            assert!((a.conj() - b).norm() < 1e-10);
        }
    }

    #[test]
    fn origin_value_matches_closed_form_in_one_dimension() {
        let q = WeightedPolynomial::from_real(vec![2], [(vec![2], 0.125)]).unwrap();
        let r = attractor_imaginary(&AttractorSpec::imaginary(q).unwrap(), 1.0, &[0.0], 1e-6).unwrap();
        let want = (PI / 4.0).cos() / (PI / 2.0).sqrt();
        assert!((r.value.re - want).abs() < 1e-9);
        assert!(r.converged);
        assert!(r.tau_trace.windows(2).all(|w| w[1].0 > w[0].0));
    }

    #[test]
    fn unit_order_shells_do_not_converge() {
        let q = 0.5;
        let qq = WeightedPolynomial::from_real(vec![2, 2], [(vec![2, 0], q), (vec![0, 2], q)]).unwrap();
        assert!(matches!(AttractorSpec::imaginary(qq.clone()), Err(Error::Hypothesis(_))));
        let spec = AttractorSpec {
            kind: AttractorKind::Imaginary { q: qq.clone() },
            generator: qq.canonical_generator(),
            mu: 1.0,
            family: Family::Sublevel,
            allow_divergent: true,
        };
        let r = Attractor::with_nodes(spec, 64).unwrap().renormalized(1.0, &[0.0, 0.0], 1e-6).unwrap();
        assert!(!r.converged);
        let norm = (2.0 * PI).powi(2);
        for w in r.tau_trace.windows(2).take(12) {
            let (t1, s1) = w[0];
            let (t2, s2) = w[1];
            let want = c(0.0, PI / q) * (c(0.0, -t2).exp() - c(0.0, -t1).exp());
            assert!(((s2 - s1) * norm - want).norm() < 1e-6, "shell [{t1}, {t2}]");
        }
    }

    #[test]
    fn separable_symbols_agree_across_families() {
        let q = WeightedPolynomial::from_real(vec![2, 4], [(vec![2, 0], 0.125), (vec![0, 4], 1.0 / 32.0)]).unwrap();
        let spec = AttractorSpec::imaginary(q).unwrap();
        let rect = spec.clone().with_family(Family::Rectangular).unwrap();
        let chart = Attractor::new(spec).unwrap();
        let prod = Attractor::new(rect.clone()).unwrap();
        for x in [[0.0, 0.0], [1.0, -2.0], [-2.5, 0.5]] {
            let a = chart.value(1.0, &x).unwrap();
            let b = prod.value(1.0, &x).unwrap();
            let closed = heat_kernel(c(0.0, 0.125), 1.0, x[0]) * oned::oscillatory(4, 1.0 / 32.0, 1.0, x[1]).unwrap();
            assert!((a - b).norm() < 1e-8, "x={x:?}: {a} vs {b}");
            assert!((b - closed).norm() < 1e-12);
        }
        let p = poly(vec![2, 4], vec![(vec![2, 0], c(0.5, 0.125)), (vec![0, 4], c(1.0 / 12.0, 0.0))]);
        let pos = AttractorSpec::positive(&p).unwrap();
        let chart = Attractor::new(pos.clone()).unwrap();
        for x in [[0.0, 0.0], [1.0, -2.0]] {
            let a = chart.value(2.0, &x).unwrap();
            let b = attractor_rect_product(&pos, 2.0, &x).unwrap();
            assert!((a - b).norm() < 1e-8, "x={x:?}: {a} vs {b}");
        }
    }

    #[test]
    fn rectangular_family_rejects_cross_terms() {
        let spec = AttractorSpec::imaginary(anisotropic_q()).unwrap();
        assert!(spec.with_family(Family::Rectangular).is_err());
    }

    #[test]
    fn van_der_corput_bound_holds() {
        // phase u^2 / 2 on [1, 3] has derivative >= 1; g = 1 / (1 + u).
        for lambda in [5.0, 40.0, 300.0] {
            let f = |u: f64| c(0.0, lambda * u * u / 2.0).exp() / (1.0 + u);
            let q = quadrature::integrate(&f, &[1.0, 2.0, 3.0], 1e-13, 100_000);
            let bound = vdc_bound(lambda, 0.5, 0.5 - 0.25).unwrap();
            assert!(q.value.norm() <= bound, "lambda={lambda}");
        }
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = AttractorSpec::imaginary(anisotropic_q()).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: AttractorSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.mu, spec.mu);
        let x = [0.7, -0.2];
        let a = Attractor::new(spec).unwrap().value(1.0, &x).unwrap();
        let b = Attractor::new(back).unwrap().value(1.0, &x).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn request_errors_keep_their_category() {
        let q = WeightedPolynomial::from_real(vec![2, 2], [(vec![2, 0], 0.5), (vec![0, 2], 0.5)]).unwrap();
        let mut v = serde_json::to_value(AttractorSpec::imaginary(anisotropic_q()).unwrap()).unwrap();
        v["Q"] = serde_json::to_value(&q).unwrap();
        v.as_object_mut().unwrap().remove("generator");
        v["points"] = serde_json::json!([[0.0, 0.0]]);
        let err = AttractorRequest::from_json(&v.to_string()).unwrap_err();
        assert!(matches!(err, Error::Hypothesis(_)), "{err}");
        assert!(matches!(AttractorRequest::from_json("{\"kind\":"), Err(Error::InvalidInput(_))));
    }
}
