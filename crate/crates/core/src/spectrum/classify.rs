use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::SymbolSeries;
use crate::error::{Error, Result};
use crate::grouplie::GroupGenerator;
use crate::homogeneous::{
    check_abs_positive_definite, check_positive_definite, weighted_level, WeightedPolynomial,
};

/// Coefficients below this modulus are treated as zero.
pub const ZERO_TOL: f64 = 1e-9;
const PD_RESOLUTION: usize = 4096;
const AUTO_WEIGHTS: [u32; 6] = [2, 4, 6, 8, 10, 12];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    PositiveHomogeneous,
    ImaginaryHomogeneous,
    Unclassified,
}

/// An exact weighted level such as `2` or `3/2`, serialized as a string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Level(pub Ratio<u64>);

impl Level {
    pub fn to_f64(self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.parse::<Ratio<u64>>()
            .map(Level)
            .map_err(|_| Error::invalid(format!("bad rational level '{s}'")))
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum WeightChoice {
    Auto,
    Fixed(Vec<u32>),
}

/// Local structure of `Gamma` at one maximizer:
/// `Gamma(xi) = i alpha.xi - i Q(xi) - R(xi) + higher order`, with `Q` at
/// weighted level 1 and `R` at level `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointClassification {
    pub xi0: Vec<f64>,
    pub symbol_value: Complex64,
    pub kind: PointKind,
    pub alpha: Vec<f64>,
    pub weights2m: Option<Vec<u32>>,
    pub k: Option<Level>,
    pub mu: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<WeightedPolynomial>,
    #[serde(rename = "R")]
    pub r: Option<WeightedPolynomial>,
    pub generator: Option<GroupGenerator>,
    pub notes: Vec<String>,
}

impl PointClassification {
    pub fn is_classified(&self) -> bool {
        self.kind != PointKind::Unclassified
    }

    /// `P = R + iQ`, the exponent of a positive-type attractor.
    pub fn positive_p(&self) -> Option<WeightedPolynomial> {
        let (q, r) = (self.q.as_ref()?, self.r.as_ref()?);
        r.add(&q.scale(Complex64::new(0.0, 1.0))).ok()
    }
}

fn unit(d: usize, k: usize) -> Vec<u32> {
    let mut e = vec![0; d];
    e[k] = 1;
    e
}

enum Attempt {
    Ok(PointClassification),
    Rejected(Vec<String>),
}

fn try_weights(series: &SymbolSeries, w: &[u32], alpha: &[f64]) -> Result<Attempt> {
    let one = Ratio::from_integer(1u64);
    let wmax = *w.iter().max().expect("non-empty") as u64;
    let mut reasons = Vec::new();

    let nonlinear = series
        .coeffs
        .iter()
        .filter(|(b, _)| b.iter().sum::<u32>() >= 2)
        .map(|(b, c)| (b, c, weighted_level(b, w)));

    let mut k: Option<Ratio<u64>> = None;
    for (b, c, lvl) in nonlinear.clone() {
        if lvl < one && c.im.abs() > ZERO_TOL {
            reasons.push(format!("imaginary coefficient {:.3e} at {b:?} below level 1", c.im));
        }
        if c.re.abs() > ZERO_TOL {
            k = Some(k.map_or(lvl, |k0: Ratio<u64>| k0.min(lvl)));
        }
    }
    let Some(k) = k else {
        reasons.push(format!(
            "no real coefficient up to total degree {}",
            series.total_degree
        ));
        return Ok(Attempt::Rejected(reasons));
    };
    if k < one {
        reasons.push(format!("real part starts at level {k} < 1"));
    }
    let need = (k * Ratio::from_integer(wmax)).ceil().to_integer();
    if need > series.total_degree as u64 {
        reasons.push(format!(
            "series degree {} cannot resolve level {k} (needs {need})",
            series.total_degree
        ));
    }
    if !reasons.is_empty() {
        return Ok(Attempt::Rejected(reasons));
    }

    let mut q_terms = Vec::new();
    let mut r_terms = Vec::new();
    for (b, c, lvl) in nonlinear {
        if lvl == one && c.im.abs() > ZERO_TOL {
            q_terms.push((b.clone(), -c.im));
        }
        if lvl == k && c.re.abs() > ZERO_TOL {
            r_terms.push((b.clone(), -c.re));
        }
    }
    let q = WeightedPolynomial::from_real(w.to_vec(), q_terms)?;
    let r = WeightedPolynomial::from_real(w.to_vec(), r_terms)?;
    let kind = if k == one {
        if check_positive_definite(&r, PD_RESOLUTION)? {
            PointKind::PositiveHomogeneous
        } else {
            reasons.push("R at level 1 is not positive definite".into());
            PointKind::Unclassified
        }
    } else if q.is_zero() || !check_abs_positive_definite(&q, PD_RESOLUTION)? {
        reasons.push("|Q| is not positive definite".into());
        PointKind::Unclassified
    } else if !check_positive_definite(&r, PD_RESOLUTION)? {
        reasons.push(format!("R at level {k} is not positive definite"));
        PointKind::Unclassified
    } else {
        PointKind::ImaginaryHomogeneous
    };
    if kind == PointKind::Unclassified {
        return Ok(Attempt::Rejected(reasons));
    }
    let generator = GroupGenerator::canonical(w);
    Ok(Attempt::Ok(PointClassification {
        xi0: series.base_point.clone(),
        symbol_value: series.symbol_value,
        kind,
        alpha: alpha.to_vec(),
        weights2m: Some(w.to_vec()),
        k: Some(Level(k)),
        mu: Some(generator.trace_order()),
        q: Some(q),
        r: Some(r),
        generator: Some(generator),
        notes: Vec::new(),
    }))
}

fn unclassified(series: &SymbolSeries, alpha: Vec<f64>, notes: Vec<String>) -> PointClassification {
    PointClassification {
        xi0: series.base_point.clone(),
        symbol_value: series.symbol_value,
        kind: PointKind::Unclassified,
        alpha,
        weights2m: None,
        k: None,
        mu: None,
        q: None,
        r: None,
        generator: None,
        notes,
    }
}

/// Splits the series by weighted level and applies the positive / imaginary
/// type tests. With [`WeightChoice::Auto`], every `2m` in `{2,...,12}^d`
/// (`d <= 2`) is tried and the admissible one with the smallest `mu` wins.
pub fn classify_point(series: &SymbolSeries, weights: &WeightChoice) -> Result<PointClassification> {
    let d = series.dim();
    let alpha: Vec<f64> = (0..d).map(|k| series.coefficient(&unit(d, k)).im).collect();
    let mut notes = Vec::new();
    for k in 0..d {
        let re = series.coefficient(&unit(d, k)).re;
        if re.abs() > ZERO_TOL {
            notes.push(format!("real linear coefficient {re:.3e} on axis {k}: not a local maximum"));
        }
    }
    if !notes.is_empty() {
        return Ok(unclassified(series, alpha, notes));
    }

    let candidates: Vec<Vec<u32>> = match weights {
        WeightChoice::Fixed(w) => {
            if w.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: w.len(),
                });
            }
            if w.contains(&0) {
                return Err(Error::invalid("weights must be positive"));
            }
            vec![w.clone()]
        }
        WeightChoice::Auto => {
            if d > 2 {
                return Ok(unclassified(
                    series,
                    alpha,
                    vec!["automatic weight search is limited to d <= 2".into()],
                ));
            }
            let mut all: Vec<Vec<u32>> = vec![vec![]];
            for _ in 0..d {
                all = all
                    .into_iter()
                    .flat_map(|p| {
                        AUTO_WEIGHTS.iter().map(move |&w| {
                            let mut q = p.clone();
                            q.push(w);
                            q
                        })
                    })
                    .collect();
            }
            // Smallest mu first; ties broken lexicographically.
            all.sort_by(|a, b| {
                let mu = |v: &Vec<u32>| v.iter().map(|&x| 1.0 / x as f64).sum::<f64>();
                mu(a).total_cmp(&mu(b)).then_with(|| a.cmp(b))
            });
            all
        }
    };

    let mut rejected = Vec::new();
    for w in &candidates {
        match try_weights(series, w, &alpha)? {
            Attempt::Ok(c) => return Ok(c),
            Attempt::Rejected(r) => rejected.push((w.clone(), r)),
        }
    }
    if let [(w, r)] = rejected.as_slice() {
        notes.push(format!("weights {w:?}: {}", r.join("; ")));
    } else {
        notes.push(format!(
            "no admissible weights among {} candidates",
            rejected.len()
        ));
        // Report the isotropic quadratic attempt, the most informative one.
        if let Some((w, r)) = rejected.iter().find(|(w, _)| w.iter().all(|&x| x == 2)) {
            notes.push(format!("weights {w:?}: {}", r.join("; ")));
        }
    }
    Ok(unclassified(series, alpha, notes))
}

/// Imaginary terms of `Gamma` above weighted level 1 (the tail of `Q`), as
/// `-Im c_beta`.
pub fn imaginary_tail(series: &SymbolSeries, weights2m: &[u32]) -> Result<WeightedPolynomial> {
    let one = Ratio::from_integer(1u64);
    WeightedPolynomial::from_real(
        weights2m.to_vec(),
        series
            .coeffs
            .iter()
            .filter(|(b, c)| {
                b.iter().sum::<u32>() >= 2
                    && weighted_level(b, weights2m) > one
                    && c.im.abs() > 0.0
            })
            .map(|(b, c)| (b.clone(), -c.im)),
    )
}
