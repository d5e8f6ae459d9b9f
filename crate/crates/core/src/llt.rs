//! Local limit approximations of `phi^(n)`, their errors on drifting windows
//! and sup-norm decay fits.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attractors::{Attractor, AttractorSpec, AttractorTable};
use crate::error::{check_dim, Error, Result};
use crate::grouplie::GroupGenerator;
use crate::lattice::{power_dense, truncated_power, LatticeFunction, LatticeWindow, DEFAULT_FFT_CAP};
use crate::spectrum::{PhiAnalysis, PointClassification, PointKind};

pub const DEFAULT_HALF_WIDTH: f64 = 3.0;
pub const DEFAULT_POINT_CAP: usize = 4_000_000;
pub const DEFAULT_TABLE_TOL: f64 = 1e-8;
/// Relative level of aliased tails accepted in truncated powers.
pub const DEFAULT_POWER_TOL: f64 = 1e-13;
/// Below this many attractor evaluations per term, tabulation does not pay.
const MIN_TABLE_POINTS: usize = 4096;
const DRIFT_TOL: f64 = 1e-8;

/// A box `[lo, hi]` in `R^d`, the base set `K` of the windows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl KBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::invalid("box needs at least one axis"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::invalid(format!("bad box {lo:?}..{hi:?}")));
        }
        Ok(KBox { lo, hi })
    }

    pub fn symmetric(d: usize, half: f64) -> Self {
        KBox {
            lo: vec![-half; d],
            hi: vec![half; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    fn contains(&self, y: &[f64]) -> bool {
        y.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (a, b))| {
            let slack = 1e-9 * (b - a).max(1.0);
            *v >= a - slack && *v <= b + slack
        })
    }

    fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { self.hi[k] } else { self.lo[k] }).collect())
            .collect()
    }
}

/// `lo:hi` per axis, comma separated, e.g. `-3:3,-2:2`.
impl std::str::FromStr for KBox {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for part in s.split(',') {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::invalid(format!("box axis '{part}' is not lo:hi")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::invalid(format!("bad number '{t}' in box")))
            };
            lo.push(parse(a)?);
            hi.push(parse(b)?);
        }
        KBox::new(lo, hi)
    }
}

/// Which form of the local limit theorem applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LltCase {
    /// Every maximizer is of positive type; the error is uniform on `Z^d`.
    Positive,
    /// Only imaginary-type points attain `mu_phi`.
    Imaginary,
    /// Both kinds attain `mu_phi`.
    Mixed,
}

impl fmt::Display for LltCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LltCase::Positive => "positive",
            LltCase::Imaginary => "imaginary",
            LltCase::Mixed => "mixed",
        })
    }
}

/// Checks the hypotheses of the local limit theorem and names the case.
pub fn check_hypotheses(analysis: &PhiAnalysis) -> Result<LltCase> {
    if let Some(p) = analysis.maximizers.iter().find(|p| !p.is_classified()) {
        return Err(Error::hypothesis(format!(
            "maximizer {:?} is neither of positive nor of imaginary homogeneous type",
            p.xi0
        )));
    }
    let mu_phi = analysis
        .mu_phi
        .ok_or_else(|| Error::hypothesis("no classified maximizer, mu_phi undefined"))?;
    if analysis.dominant.is_empty() {
        return Err(Error::hypothesis("no maximizer attains mu_phi"));
    }
    let imaginary: Vec<&PointClassification> = analysis
        .maximizers
        .iter()
        .filter(|p| p.kind == PointKind::ImaginaryHomogeneous)
        .collect();
    if imaginary.is_empty() {
        return Ok(LltCase::Positive);
    }
    for p in &imaginary {
        let mu = p.mu.expect("classified point has mu");
        if mu >= 1.0 {
            return Err(Error::hypothesis(format!(
                "clause (i): imaginary point {:?} has mu = {mu}, need mu < 1",
                p.xi0
            )));
        }
    }
    if !imaginary.iter().any(|p| p.mu.is_some_and(|m| (m - mu_phi).abs() < 1e-12)) {
        return Err(Error::hypothesis(format!(
            "clause (ii): no imaginary point attains mu_phi = {mu_phi}"
        )));
    }
    let a0 = &imaginary[0].alpha;
    for p in &imaginary[1..] {
        if p.alpha.iter().zip(a0).any(|(a, b)| (a - b).abs() > DRIFT_TOL) {
            return Err(Error::hypothesis(format!(
                "clause (iii): imaginary points {:?} and {:?} have drifts {:?} and {:?}",
                imaginary[0].xi0, p.xi0, a0, p.alpha
            )));
        }
    }
    let positive_dominant = analysis
        .dominant_points()
        .any(|p| p.kind == PointKind::PositiveHomogeneous);
    Ok(if positive_dominant { LltCase::Mixed } else { LltCase::Imaginary })
}

struct Term {
    xi: Vec<f64>,
    /// `arg phi_hat(xi)`.
    arg: f64,
    alpha: Vec<f64>,
    kind: PointKind,
    mu: f64,
    attractor: Attractor,
    table: Option<AttractorTable>,
}

impl Term {
    fn value(&self, n: u64, x: &[i64]) -> Result<Complex64> {
        let nf = n as f64;
        let shifted: Vec<f64> = x.iter().zip(&self.alpha).map(|(&xi, a)| xi as f64 - nf * a).collect();
        let h = match &self.table {
            Some(t) => t.value(nf, &shifted)?,
            None => self.attractor.value(nf, &shifted)?,
        };
        let dot: f64 = x.iter().zip(&self.xi).map(|(&a, b)| a as f64 * b).sum();
        Ok(Complex64::from_polar(1.0, nf * self.arg - dot) * h)
    }
}

/// The summands of the approximation for a fixed `phi`.
pub struct LltPlan {
    pub case: LltCase,
    pub mu_phi: f64,
    /// Window centre drift.
    pub alpha: Vec<f64>,
    /// Generator whose adjoint scales the windows.
    pub generator: GroupGenerator,
    terms: Vec<Term>,
}

impl LltPlan {
    pub fn new(analysis: &PhiAnalysis) -> Result<Self> {
        let case = check_hypotheses(analysis)?;
        let mu_phi = analysis.mu_phi.expect("checked");
        let dominant: Vec<&PointClassification> = analysis.dominant_points().collect();
        let lead = match case {
            LltCase::Positive => dominant[0],
            _ => *dominant
                .iter()
                .find(|p| p.kind == PointKind::ImaginaryHomogeneous)
                .expect("an imaginary point attains mu_phi"),
        };
        let generator = lead
            .generator
            .clone()
            .ok_or_else(|| Error::hypothesis(format!("maximizer {:?} has no generator", lead.xi0)))?;
        let terms = dominant
            .iter()
            .map(|p| {
                let attractor = Attractor::new(AttractorSpec::from_point(p)?)?;
                Ok(Term {
                    xi: p.xi0.clone(),
                    arg: p.symbol_value.arg(),
                    alpha: p.alpha.clone(),
                    kind: p.kind,
                    mu: p.mu.expect("classified"),
                    attractor,
                    table: None,
                })
            })
            .collect::<Result<_>>()?;
        Ok(LltPlan {
            case,
            mu_phi,
            alpha: lead.alpha.clone(),
            generator,
            terms,
        })
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// Replaces direct attractor evaluation by Chebyshev tables over `k` for
    /// every imaginary term whose window coordinates are exactly `k`.
    pub fn tabulate(&mut self, k: &KBox, tol: f64) -> Result<()> {
        check_dim(self.dim(), k.dim())?;
        for term in self.terms.iter_mut() {
            let same_frame = term.attractor.spec().generator == self.generator
                && term.alpha.iter().zip(&self.alpha).all(|(a, b)| (a - b).abs() <= DRIFT_TOL);
            if term.kind == PointKind::ImaginaryHomogeneous && same_frame && term.table.is_none() {
                term.table = Some(AttractorTable::build(&term.attractor, &k.lo, &k.hi, tol)?);
            }
        }
        Ok(())
    }

    /// `sum_k phi_hat(xi_k)^n e^{-i x.xi_k} H_k^n(x - n alpha_k)`.
    pub fn approx(&self, n: u64, x: &[i64]) -> Result<Complex64> {
        check_dim(self.dim(), x.len())?;
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        self.terms
            .iter()
            .try_fold(Complex64::new(0.0, 0.0), |acc, t| Ok(acc + t.value(n, x)?))
    }

    /// Integer points of `n alpha + n^{E*}(k)`.
    pub fn window(&self, n: u64, k: &KBox, cap: usize) -> Result<LatticeWindow> {
        window_in_frame(&self.generator, &self.alpha, n, k, cap)
    }

    fn term_infos(&self, n_values: &[u64]) -> Vec<TermInfo> {
        self.terms
            .iter()
            .map(|t| TermInfo {
                xi: t.xi.clone(),
                kind: match t.kind {
                    PointKind::PositiveHomogeneous => "positive",
                    _ => "imaginary",
                }
                .to_string(),
                mu: t.mu,
                alpha: t.alpha.clone(),
                phases: n_values
                    .iter()
                    .map(|&n| Complex64::from_polar(1.0, n as f64 * t.arg).arg())
                    .collect(),
                tabulated: t.table.is_some(),
            })
            .collect()
    }
}

fn window_in_frame(e: &GroupGenerator, alpha: &[f64], n: u64, k: &KBox, cap: usize) -> Result<LatticeWindow> {
    let d = e.dim();
    check_dim(d, k.dim())?;
    check_dim(d, alpha.len())?;
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    let nf = n as f64;
    let adj = e.adjoint();
    let center: Vec<f64> = alpha.iter().map(|a| nf * a).collect();
    let mut lo = center.clone();
    let mut hi = center.clone();
    for c in k.corners() {
        let img = adj.apply(nf, &c)?;
        for j in 0..d {
            lo[j] = lo[j].min(center[j] + img[j]);
            hi[j] = hi[j].max(center[j] + img[j]);
        }
    }
    let lo: Vec<i64> = lo.iter().map(|v| (v - 1e-9).ceil() as i64).collect();
    let hi: Vec<i64> = hi.iter().map(|v| (v + 1e-9).floor() as i64).collect();
    let mut count: usize = 1;
    for j in 0..d {
        let len = usize::try_from((hi[j] - lo[j] + 1).max(0)).unwrap_or(usize::MAX);
        count = count.saturating_mul(len);
    }
    if count > cap {
        return Err(Error::resource(format!(
            "window bounding box holds {count} points, cap is {cap}; use a smaller K"
        )));
    }
    let inv = adj.group_power(1.0 / nf)?;
    let base: Vec<i64> = center.iter().map(|c| c.round() as i64).collect();
    let mut offsets = Vec::new();
    let mut x = lo.clone();
    if count == 0 {
        return Err(Error::invalid("window contains no lattice points"));
    }
    loop {
        let rel = nalgebra::DVector::from_iterator(d, (0..d).map(|j| x[j] as f64 - center[j]));
        let y = &inv * rel;
        if k.contains(y.as_slice()) {
            offsets.push((0..d).map(|j| x[j] - base[j]).collect());
        }
        let mut j = d;
        loop {
            if j == 0 {
                if offsets.is_empty() {
                    return Err(Error::invalid("window contains no lattice points"));
                }
                return LatticeWindow::new(center, offsets);
            }
            j -= 1;
            x[j] += 1;
            if x[j] <= hi[j] {
                break;
            }
            x[j] = lo[j];
        }
    }
}

/// `phi^(n)` approximation at `x` from the local limit theorem.
pub fn llt_approx(analysis: &PhiAnalysis, n: u64, x: &[i64]) -> Result<Complex64> {
    LltPlan::new(analysis)?.approx(n, x)
}

/// Integer points in `n alpha + n^{E*}(k)` for the canonical generator of a
/// dominant maximizer.
pub fn window_points(analysis: &PhiAnalysis, n: u64, k: &KBox) -> Result<LatticeWindow> {
    LltPlan::new(analysis)?.window(n, k, DEFAULT_POINT_CAP)
}

#[derive(Clone, Debug)]
pub struct LltOptions {
    pub k_box: Option<KBox>,
    /// Chebyshev table tolerance; `None` evaluates every point directly.
    pub table_tol: Option<f64>,
    pub power_tol: f64,
    pub point_cap: usize,
    pub fft_cap: usize,
}

impl Default for LltOptions {
    fn default() -> Self {
        LltOptions {
            k_box: None,
            table_tol: Some(DEFAULT_TABLE_TOL),
            power_tol: DEFAULT_POWER_TOL,
            point_cap: DEFAULT_POINT_CAP,
            fft_cap: DEFAULT_FFT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub k_lo: Vec<f64>,
    pub k_hi: Vec<f64>,
    /// Rows of the generator `E`; windows scale by `n^{E*}`.
    pub generator: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    /// The positive case compares on the whole support of `phi^(n)`.
    pub full_support: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermInfo {
    pub xi: Vec<f64>,
    pub kind: String,
    pub mu: f64,
    pub alpha: Vec<f64>,
    /// `arg phi_hat(xi)^n` for each `n`.
    pub phases: Vec<f64>,
    pub tabulated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LLTReport {
    pub case: LltCase,
    pub mu_phi: f64,
    pub n_values: Vec<u64>,
    /// `n^{mu_phi} max |phi^(n) - approx|` over the window.
    pub scaled_errors: Vec<f64>,
    /// `max |phi^(n)|` over the window.
    pub supnorms: Vec<f64>,
    pub window_sizes: Vec<usize>,
    pub window_spec: WindowSpec,
    pub attractor_terms: Vec<TermInfo>,
}

impl LLTReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::invalid(format!("report serialization: {e}")))
    }

    /// Columns `n, scaled_error, supnorm, scaled_supnorm, window_points`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::invalid(format!("csv: {e}"));
        w.write_record(["n", "scaled_error", "supnorm", "scaled_supnorm", "window_points"])
            .map_err(io)?;
        for i in 0..self.n_values.len() {
            let n = self.n_values[i];
            w.write_record([
                n.to_string(),
                format!("{:e}", self.scaled_errors[i]),
                format!("{:e}", self.supnorms[i]),
                format!("{:e}", (n as f64).powf(self.mu_phi) * self.supnorms[i]),
                self.window_sizes[i].to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv: {e}")))
    }
}

fn check_ladder(n_values: &[u64]) -> Result<()> {
    if n_values.is_empty() {
        return Err(Error::invalid("n list is empty"));
    }
    if n_values[0] == 0 {
        return Err(Error::invalid("n values must be positive"));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("n values must be strictly increasing"));
    }
    Ok(())
}

/// Scaled errors `n^{mu_phi} max_window |phi^(n) - approx|` with default options.
pub fn llt_error_curve(analysis: &PhiAnalysis, k: Option<&KBox>, n_values: &[u64]) -> Result<LLTReport> {
    let options = LltOptions {
        k_box: k.cloned(),
        ..LltOptions::default()
    };
    llt_error_curve_with(analysis, n_values, &options)
}

pub fn llt_error_curve_with(analysis: &PhiAnalysis, n_values: &[u64], options: &LltOptions) -> Result<LLTReport> {
    check_ladder(n_values)?;
    let mut plan = LltPlan::new(analysis)?;
    let d = plan.dim();
    let k = options.k_box.clone().unwrap_or_else(|| KBox::symmetric(d, DEFAULT_HALF_WIDTH));
    check_dim(d, k.dim())?;
    let phi = &analysis.phi;
    let full_support = plan.case == LltCase::Positive;

    let windows: Vec<Vec<Vec<i64>>> = if full_support {
        Vec::new()
    } else {
        n_values
            .iter()
            .map(|&n| Ok(plan.window(n, &k, options.point_cap)?.points()))
            .collect::<Result<_>>()?
    };
    let total: usize = windows.iter().map(|w| w.len()).sum();
    if let Some(tol) = options.table_tol {
        if !full_support && d >= 2 && total >= MIN_TABLE_POINTS {
            plan.tabulate(&k, tol)?;
        }
    }

    let mut scaled_errors = Vec::with_capacity(n_values.len());
    let mut supnorms = Vec::with_capacity(n_values.len());
    let mut window_sizes = Vec::with_capacity(n_values.len());
    for (i, &n) in n_values.iter().enumerate() {
        let (points, exact): (Vec<Vec<i64>>, Vec<Complex64>) = if full_support {
            // Every point of the support box of phi^(n), tails included.
            let g = power_dense(phi, n, options.fft_cap)?;
            let (lo, hi) = phi
                .support_box()
                .ok_or_else(|| Error::invalid("phi vanishes identically"))?;
            let lo: Vec<i64> = lo.iter().map(|v| v * n as i64).collect();
            let hi: Vec<i64> = hi.iter().map(|v| v * n as i64).collect();
            let pts = box_points(&lo, &hi, options.point_cap)?;
            let vals = pts.iter().map(|p| g.get(p)).collect();
            (pts, vals)
        } else {
            let center: Vec<f64> = plan.alpha.iter().map(|a| n as f64 * a).collect();
            let t = truncated_power(phi, n, Some(&center), options.power_tol, options.fft_cap)?;
            let pts = windows[i].clone();
            let vals = pts.iter().map(|p| t.get(p)).collect();
            (pts, vals)
        };
        let approx: Vec<Complex64> = points.par_iter().map(|p| plan.approx(n, p)).collect::<Result<_>>()?;
        let err = exact
            .iter()
            .zip(&approx)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        scaled_errors.push((n as f64).powf(plan.mu_phi) * err);
        supnorms.push(exact.iter().map(|v| v.norm()).fold(0.0, f64::max));
        window_sizes.push(points.len());
    }
    Ok(LLTReport {
        case: plan.case,
        mu_phi: plan.mu_phi,
        n_values: n_values.to_vec(),
        scaled_errors,
        supnorms,
        window_sizes,
        window_spec: WindowSpec {
            k_lo: k.lo.clone(),
            k_hi: k.hi.clone(),
            generator: plan.generator.rows(),
            alpha: plan.alpha.clone(),
            full_support,
        },
        attractor_terms: plan.term_infos(n_values),
    })
}

fn box_points(lo: &[i64], hi: &[i64], cap: usize) -> Result<Vec<Vec<i64>>> {
    let count = lo
        .iter()
        .zip(hi)
        .fold(1usize, |acc, (a, b)| acc.saturating_mul((b - a + 1) as usize));
    if count > cap {
        return Err(Error::resource(format!("support holds {count} points, cap is {cap}")));
    }
    let mut out = Vec::with_capacity(count);
    let mut x = lo.to_vec();
    loop {
        out.push(x.clone());
        let mut j = x.len();
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            x[j] += 1;
            if x[j] <= hi[j] {
                break;
            }
            x[j] = lo[j];
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupnormFit {
    pub n_values: Vec<u64>,
    pub supnorms: Vec<f64>,
    /// Least-squares slope of `log sup|phi^(n)|` against `log n`.
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the log residuals.
    pub residual: f64,
}

impl SupnormFit {
    /// `max / min` of `n^mu sup|phi^(n)|` over the ladder.
    pub fn scaled_ratio(&self, mu: f64) -> f64 {
        let s: Vec<f64> = self
            .n_values
            .iter()
            .zip(&self.supnorms)
            .map(|(&n, v)| (n as f64).powf(mu) * v)
            .collect();
        let max = s.iter().cloned().fold(f64::MIN, f64::max);
        let min = s.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    /// Columns `n, supnorm, log_n, log_supnorm`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::invalid(format!("csv: {e}"));
        w.write_record(["n", "supnorm", "log_n", "log_supnorm"]).map_err(io)?;
        for (&n, &s) in self.n_values.iter().zip(&self.supnorms) {
            w.write_record([
                n.to_string(),
                format!("{s:e}"),
                format!("{}", (n as f64).ln()),
                format!("{}", s.ln()),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::invalid(format!("csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::invalid(format!("csv: {e}")))
    }
}

/// Fits `log sup|phi^(n)| = slope log n + intercept`.
pub fn supnorm_fit(phi: &LatticeFunction, n_values: &[u64]) -> Result<SupnormFit> {
    supnorm_fit_with(phi, n_values, DEFAULT_POWER_TOL, DEFAULT_FFT_CAP)
}

pub fn supnorm_fit_with(phi: &LatticeFunction, n_values: &[u64], tol: f64, cap: usize) -> Result<SupnormFit> {
    check_ladder(n_values)?;
    if n_values.len() < 4 {
        return Err(Error::invalid(format!(
            "a sup-norm fit needs at least 4 values of n, got {}",
            n_values.len()
        )));
    }
    let supnorms: Vec<f64> = n_values
        .iter()
        .map(|&n| Ok(truncated_power(phi, n, None, tol, cap)?.sup_norm()))
        .collect::<Result<_>>()?;
    if supnorms.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::invalid("phi^(n) vanishes identically"));
    }
    let xs: Vec<f64> = n_values.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = supnorms.iter().map(|s| s.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok(SupnormFit {
        n_values: n_values.to_vec(),
        supnorms,
        slope,
        intercept,
        residual,
    })
}
