//! Reference functions with known spectral structure, used by tests, benches
//! and the command line tool.

use num_complex::Complex64;

use crate::lattice::LatticeFunction;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn build(dim: usize, entries: Vec<(Vec<i64>, Complex64)>) -> LatticeFunction {
    LatticeFunction::new(dim, entries).expect("fixture is well formed")
}

/// Real symmetric function on `Z` whose symbol is `1 - xi^4/12 + O(xi^6)` at
/// its unique maximizer `0`.
pub fn quartic_positive_1d() -> LatticeFunction {
    build(
        1,
        vec![
            (vec![0], c(0.5, 0.0)),
            (vec![1], c(1.0 / 3.0, 0.0)),
            (vec![-1], c(1.0 / 3.0, 0.0)),
            (vec![2], c(-1.0 / 12.0, 0.0)),
            (vec![-2], c(-1.0 / 12.0, 0.0)),
        ],
    )
}

/// Complex function on `Z` with `Gamma(xi) = -i xi^2/8 + O(xi^4)` at `0`.
pub fn imaginary_quadratic_1d() -> LatticeFunction {
    let side = c(4.0, 3.0) / 24.0;
    // The outer coefficient must be -1/24: with +1/24 the symbol at the origin
    // is 7/6 and the quadratic coefficient of Gamma is not -i/8.
    let far = c(-1.0 / 24.0, 0.0);
    build(
        1,
        vec![
            (vec![0], c(3.0, -1.0) / 4.0),
            (vec![1], side),
            (vec![-1], side),
            (vec![2], far),
            (vec![-2], far),
        ],
    )
}

/// Function on `Z^2` whose only maximizer is the origin, of imaginary type with
/// `2m = (2, 4)` and `mu = 3/4`.
pub fn anisotropic_imaginary_2d() -> LatticeFunction {
    let s = 1.0 / 768.0;
    let raw: Vec<(Vec<i64>, Complex64)> = vec![
        (vec![0, 0], c(602.0, -112.0)),
        (vec![0, 1], c(56.0, 32.0)),
        (vec![0, -1], c(56.0, 32.0)),
        (vec![-1, 0], c(56.0, 32.0)),
        (vec![1, 0], c(72.0, 32.0)),
        (vec![0, 2], c(-28.0, -8.0)),
        (vec![0, -2], c(-28.0, -8.0)),
        (vec![2, 0], c(-16.0, 0.0)),
        (vec![-2, 0], c(-16.0, 0.0)),
        // 8, not 56, at (0, +-3): matches the closed-form symbol and makes
        // phi_hat(0) = 1.
        (vec![0, 3], c(8.0, 0.0)),
        (vec![0, -3], c(8.0, 0.0)),
        (vec![0, 4], c(-1.0, 0.0)),
        (vec![0, -4], c(-1.0, 0.0)),
        (vec![-1, 1], c(4.0, 0.0)),
        (vec![-1, -1], c(4.0, 0.0)),
        (vec![1, 1], c(-4.0, 0.0)),
        (vec![1, -1], c(-4.0, 0.0)),
    ];
    build(2, raw.into_iter().map(|(x, v)| (x, v * s)).collect())
}

/// Function on `Z^2` with two maximizers: `(0,0)` of imaginary type
/// (`2m = (6, 2)`, `mu = 2/3`) and `(pi, pi)` of positive type (`mu = 1`).
pub fn two_maximizer_2d() -> LatticeFunction {
    let mut entries: Vec<(Vec<i64>, Complex64)> = Vec::new();
    let mut sym = |x: i64, y: i64, v: Complex64| {
        entries.push((vec![x, y], v));
        if x != 0 || y != 0 {
            entries.push((vec![-x, -y], v));
        }
    };
    let a = 2f64.powi(-7);
    for (x, y, v) in [(1, 0, c(15.0, 15.0)), (0, 1, c(16.0, 16.0)), (3, 0, c(1.0, 1.0))] {
        sym(x, y, v * a);
    }
    let b = c(0.0, -(2f64.powi(-11)));
    for (x, y, v) in [
        (0, 0, 682.0),
        (2, 0, 152.0),
        (4, 0, -28.0),
        (6, 0, 8.0),
        (8, 0, -1.0),
        (0, 2, 60.0),
        (0, 4, -24.0),
        (0, 6, 4.0),
    ] {
        sym(x, y, b * v);
    }
    let g = c(2f64.powi(-21), 0.0);
    for (x, y, v) in [
        (0, 0, 1387004.0),
        (2, 0, -106722.0),
        (4, 0, 3960.0),
        (6, 0, -1045.0),
        (8, 0, 138.0),
        (10, 0, -9.0),
        // -2^16 at (0, +-2); -2^17 leaves phi_hat(0) = 15/16.
        (0, 2, -65536.0),
    ] {
        sym(x, y, g * v);
    }
    build(2, entries)
}

/// The one-dimensional profile `psi` along each arm of [`cross_shaped_2d`].
pub fn cross_profile_1d() -> LatticeFunction {
    let s = 2f64.powi(-12);
    let mut entries = vec![(vec![0], c(2.0, 1.0) * 1292.0 * s)];
    for (k, v) in [
        (1, c(552.0, -540.0)),
        (2, -c(177.0, -499.0 / 2.0)),
        (3, -c(28.0, -10.0)),
        (4, c(42.0, -59.0)),
        (5, -c(12.0, -18.0)),
        (6, c(1.0, -1.5)),
    ] {
        entries.push((vec![k], v * s));
        entries.push((vec![-k], v * s));
    }
    build(1, entries)
}

/// Function on `Z^2` supported on the coordinate axes,
/// `phi(x, 0) = phi(0, x) = psi(x)`, with maximizers `(0,0)` (imaginary type)
/// and `(pi, pi)` (positive type), both of order `1/2`.
pub fn cross_shaped_2d() -> LatticeFunction {
    let psi = cross_profile_1d();
    let mut entries = Vec::new();
    for (x, v) in psi.iter() {
        entries.push((vec![x[0], 0], *v));
        if x[0] != 0 {
            entries.push((vec![0, x[0]], *v));
        }
    }
    build(2, entries)
}

/// `{0: 1/2, +-1: 1/4}`.
pub fn lazy_walk_1d() -> LatticeFunction {
    build(
        1,
        vec![
            (vec![0], c(0.5, 0.0)),
            (vec![1], c(0.25, 0.0)),
            (vec![-1], c(0.25, 0.0)),
        ],
    )
}

/// `{+-1: 1/2}`; maximizers `0` and `pi`.
pub fn simple_walk_1d() -> LatticeFunction {
    build(1, vec![(vec![1], c(0.5, 0.0)), (vec![-1], c(0.5, 0.0))])
}

/// Named fixtures for the command line tool.
pub fn by_name(name: &str) -> Option<LatticeFunction> {
    Some(match name {
        "quartic_positive_1d" => quartic_positive_1d(),
        "imaginary_quadratic_1d" => imaginary_quadratic_1d(),
        "anisotropic_imaginary_2d" => anisotropic_imaginary_2d(),
        "two_maximizer_2d" => two_maximizer_2d(),
        "cross_profile_1d" => cross_profile_1d(),
        "cross_shaped_2d" => cross_shaped_2d(),
        "lazy_walk_1d" => lazy_walk_1d(),
        "simple_walk_1d" => simple_walk_1d(),
        _ => return None,
    })
}

pub const NAMES: [&str; 8] = [
    "quartic_positive_1d",
    "imaginary_quadratic_1d",
    "anisotropic_imaginary_2d",
    "two_maximizer_2d",
    "cross_profile_1d",
    "cross_shaped_2d",
    "lazy_walk_1d",
    "simple_walk_1d",
];
