//! Convolution powers of finitely supported functions on `Z^d`: Fourier
//! symbols and their maximizers, the attractors that govern `phi^(n)`, and
//! numerical local limit checks.

pub mod attractors;
pub mod error;
pub mod fixtures;
pub mod grouplie;
pub mod homogeneous;
pub mod lattice;
pub mod llt;
pub mod spectrum;

pub use attractors::{Attractor, AttractorSpec, RenormResult};
pub use error::{Error, Result};
pub use grouplie::GroupGenerator;
pub use homogeneous::{PolarChart, WeightedPolynomial};
pub use lattice::{LatticeFunction, LatticeWindow, PowerMethod};
pub use spectrum::{PhiAnalysis, PointClassification, PointKind, SymbolSeries};
