//! End-to-end checks of the numbered acceptance criteria. Each test writes
//! one `criterion N: PASS|FAIL` line to stderr, outside libtest's capture.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use convpow::attractors::{
    attractor_imaginary, attractor_rect_product, heat_kernel, Attractor, AttractorKind, AttractorSpec, Family,
};
use convpow::fixtures;
use convpow::homogeneous::{sublevel_volume, WeightedPolynomial};
use convpow::lattice::{power, LatticeFunction, PowerMethod};
use convpow::llt::{llt_error_curve, supnorm_fit};
use convpow::spectrum::{analyze, gamma_series, torus_distance, AnalyzeOptions, PhiAnalysis, PointKind};
use convpow::GroupGenerator;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Prints the verdict for one criterion and fails the test if it did not pass.
fn report(id: u32, start: Instant, budget: Duration, failures: Vec<String>) {
    let elapsed = start.elapsed();
    let mut failures = failures;
    if elapsed > budget {
        failures.push(format!("runtime {elapsed:.1?} over budget {budget:?}"));
    }
    let line = if failures.is_empty() {
        format!("criterion {id}: PASS ({elapsed:.1?})")
    } else {
        format!("criterion {id}: FAIL ({elapsed:.1?}): {}", failures.join("; "))
    };
    let _ = writeln!(std::io::stderr(), "{line}");
    assert!(failures.is_empty(), "{line}");
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        failures.push(what());
    }
}

fn analysis(f: &LatticeFunction) -> PhiAnalysis {
    analyze(f, &AnalyzeOptions::default()).expect("analysis")
}

#[test]
fn criterion_01_quartic_series() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let s = gamma_series(&fixtures::quartic_positive_1d(), &[0.0], 6).unwrap();
    let c4 = s.coefficient(&[4]);
    check(&mut fails, (c4 - c(-1.0 / 12.0, 0.0)).norm() < 1e-9, || format!("xi^4 coefficient {c4}"));
    for k in [2u32, 3] {
        let v = s.coefficient(&[k]);
        check(&mut fails, v.norm() < 1e-9, || format!("xi^{k} coefficient {v}"));
    }
    report(1, start, Duration::from_secs(1), fails);
}

#[test]
fn criterion_02_imaginary_series() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let s = gamma_series(&fixtures::imaginary_quadratic_1d(), &[0.0], 6).unwrap();
    let c2 = s.coefficient(&[2]);
    let c4 = s.coefficient(&[4]);
    check(&mut fails, (c2 - c(0.0, -0.125)).norm() < 1e-9, || format!("xi^2 coefficient {c2}"));
    let want4 = -c(13.0 / 384.0, -1.0 / 96.0);
    check(&mut fails, (c4 - want4).norm() < 1e-9, || format!("xi^4 coefficient {c4}"));
    report(2, start, Duration::from_secs(1), fails);
}

#[test]
fn criterion_03_anisotropic_classification() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let a = analysis(&fixtures::anisotropic_imaginary_2d());
    check(&mut fails, a.maximizers.len() == 1, || format!("{} maximizers", a.maximizers.len()));
    let p = &a.maximizers[0];
    check(&mut fails, p.kind == PointKind::ImaginaryHomogeneous, || format!("kind {:?}", p.kind));
    check(&mut fails, p.weights2m.as_deref() == Some(&[2, 4][..]), || format!("2m {:?}", p.weights2m));
    let mu = p.mu.unwrap_or(f64::NAN);
    check(&mut fails, (mu - 0.75).abs() < 1e-12, || format!("mu {mu}"));
    check(&mut fails, p.alpha.iter().all(|v| v.abs() < 1e-12), || format!("alpha {:?}", p.alpha));
    match &p.q {
        Some(q) => {
            for (beta, want) in [(vec![2, 0], 4.0), (vec![1, 2], -1.0), (vec![0, 4], 1.0)] {
                let got = q.coefficient(&beta);
                check(&mut fails, (got - c(want / 96.0, 0.0)).norm() < 1e-9, || {
                    format!("Q coefficient at {beta:?}: {got}")
                });
            }
            check(&mut fails, q.terms().count() == 3, || format!("Q has {} terms", q.terms().count()));
        }
        None => fails.push("no Q".into()),
    }
    report(3, start, Duration::from_secs(5), fails);
}

#[test]
fn criterion_04_two_point_analysis() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let a = analysis(&fixtures::two_maximizer_2d());
    check(&mut fails, a.maximizers.len() == 2, || format!("{} maximizers", a.maximizers.len()));
    for (xi, mu) in [([0.0, 0.0], 2.0 / 3.0), ([PI, PI], 1.0)] {
        match a.maximizers.iter().find(|p| torus_distance(&p.xi0, &xi) < 1e-6) {
            Some(p) => {
                let got = p.mu.unwrap_or(f64::NAN);
                check(&mut fails, (got - mu).abs() < 1e-9, || format!("mu at {xi:?} is {got}"));
            }
            None => fails.push(format!("no maximizer near {xi:?}")),
        }
    }
    let mu_phi = a.mu_phi.unwrap_or(f64::NAN);
    check(&mut fails, (mu_phi - 2.0 / 3.0).abs() < 1e-9, || format!("mu_phi {mu_phi}"));
    report(4, start, Duration::from_secs(10), fails);
}

/// `(2 pi)^-d m({|Q| < 1}) Gamma(1 + mu) cos(mu pi / 2)`.
fn origin_formula(q: &WeightedPolynomial, mu: f64) -> f64 {
    let d = q.dim() as i32;
    let m = sublevel_volume(q, 1.0, 4096).unwrap();
    (2.0 * PI).powi(-d) * m * gamma(1.0 + mu) * (mu * PI / 2.0).cos()
}

#[test]
fn criterion_05_origin_formula() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let q1 = WeightedPolynomial::from_real(vec![2], [(vec![2], 0.125)]).unwrap();
    let spec1 = AttractorSpec::imaginary(q1.clone()).unwrap();
    let h1 = attractor_imaginary(&spec1, 1.0, &[0.0], 1e-8).unwrap().value;
    let closed = (PI / 4.0).cos() / (PI / 2.0).sqrt();
    check(&mut fails, (h1.re - closed).abs() < 1e-6, || format!("1-D H(0) = {h1}, closed form {closed}"));
    let f1 = origin_formula(&q1, 0.5);
    check(&mut fails, ((h1.re - f1) / f1).abs() < 1e-2, || format!("1-D origin formula {f1} vs {}", h1.re));

    let a = analysis(&fixtures::anisotropic_imaginary_2d());
    let q2 = a.maximizers[0].q.clone().unwrap();
    let spec2 = AttractorSpec::imaginary(q2.clone()).unwrap();
    let h2 = attractor_imaginary(&spec2, 1.0, &[0.0, 0.0], 1e-6).unwrap().value;
    let f2 = origin_formula(&q2, 0.75);
    check(&mut fails, ((h2.re - f2) / f2).abs() < 1e-2, || format!("2-D origin formula {f2} vs {}", h2.re));
    report(5, start, Duration::from_secs(30), fails);
}

/// Largest `|H^t(x) - t^-mu H^1(t^-E* x)|` over `points` and `t`, with `H^t`
/// computed from the rescaled symbol.
fn scaling_defect(spec: &AttractorSpec, points: &[Vec<f64>]) -> f64 {
    let unit = Attractor::new(spec.clone()).unwrap();
    let e = spec.generator.diagonal_entries();
    let mut worst = 0.0f64;
    for t in [0.25, 4.0, 16.0] {
        let direct = Attractor::new(spec.scaled(t)).unwrap();
        for x in points {
            let lhs = direct.unit_value(x).unwrap();
            let y: Vec<f64> = x.iter().zip(&e).map(|(v, ej)| v * f64::powf(t, -ej)).collect();
            let rhs = unit.unit_value(&y).unwrap() * t.powf(-spec.mu);
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

#[test]
fn criterion_06_scaling_identities() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let line: Vec<Vec<f64>> = [-2.0, -0.7, 0.0, 0.4, 1.5, 3.0].iter().map(|v| vec![*v]).collect();
    let plane: Vec<Vec<f64>> = [[0.0, 0.0], [1.0, -1.0], [-2.0, 0.5], [0.5, 2.0]].iter().map(|p| p.to_vec()).collect();

    let quartic = WeightedPolynomial::from_real(vec![4], [(vec![4], 1.0 / 12.0)]).unwrap();
    let pos2 = WeightedPolynomial::new(
        vec![2, 4],
        [(vec![2, 0], c(0.5, 0.25)), (vec![0, 4], c(0.125, -0.1)), (vec![1, 2], c(0.0, 0.05))],
    )
    .unwrap();
    for (name, spec, pts) in [
        ("positive 1-D", AttractorSpec::positive(&quartic.clone()).unwrap(), &line),
        ("positive 2-D", AttractorSpec::positive(&pos2).unwrap(), &plane),
    ] {
        let w = scaling_defect(&spec, pts);
        check(&mut fails, w <= 1e-6, || format!("{name}: defect {w:.3e}"));
    }
    let q1 = WeightedPolynomial::from_real(vec![2], [(vec![2], 0.125)]).unwrap();
    let q2 = analysis(&fixtures::anisotropic_imaginary_2d()).maximizers[0].q.clone().unwrap();
    for (name, spec, pts) in [
        ("imaginary 1-D", AttractorSpec::imaginary(q1).unwrap(), &line),
        ("imaginary 2-D", AttractorSpec::imaginary(q2).unwrap(), &plane),
    ] {
        let w = scaling_defect(&spec, pts);
        check(&mut fails, w <= 1e-4, || format!("{name}: defect {w:.3e}"));
    }
    report(6, start, Duration::from_secs(60), fails);
}

#[test]
fn criterion_07_divergence_and_products() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let q = 0.5;
    let qq = WeightedPolynomial::from_real(vec![2, 2], [(vec![2, 0], q), (vec![0, 2], q)]).unwrap();
    let spec = AttractorSpec {
        kind: AttractorKind::Imaginary { q: qq.clone() },
        generator: qq.canonical_generator(),
        mu: 1.0,
        family: Family::Sublevel,
        allow_divergent: true,
    };
    let r = Attractor::with_nodes(spec, 64).unwrap().renormalized(1.0, &[0.0, 0.0], 1e-6).unwrap();
    check(&mut fails, !r.converged, || "shells reported convergence".into());
    let norm = (2.0 * PI).powi(2);
    let shells = r.tau_trace.len().saturating_sub(1);
    check(&mut fails, shells >= 8, || format!("only {shells} shells"));
    for w in r.tau_trace.windows(2) {
        let ((t1, s1), (t2, s2)) = (w[0], w[1]);
        let want = c(0.0, PI / q) * (c(0.0, -t2).exp() - c(0.0, -t1).exp());
        let got = (s2 - s1) * norm;
        check(&mut fails, (got - want).norm() < 1e-6, || format!("shell [{t1}, {t2}]: {got} vs {want}"));
    }

    let rect = AttractorSpec {
        kind: AttractorKind::Imaginary { q: qq.clone() },
        generator: qq.canonical_generator(),
        mu: 1.0,
        family: Family::Rectangular,
        allow_divergent: false,
    };
    for x in [[0.0, 0.0], [1.0, -0.5], [-2.0, 3.0]] {
        let got = attractor_rect_product(&rect, 1.0, &x).unwrap();
        let want = heat_kernel(c(0.0, q), 1.0, x[0]) * heat_kernel(c(0.0, q), 1.0, x[1]);
        check(&mut fails, (got - want).norm() < 1e-6, || format!("product at {x:?}: {got} vs {want}"));
    }
    report(7, start, Duration::from_secs(10), fails);
}

#[test]
fn criterion_08_llt_decay() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let ladder_1d = [100u64, 300, 600, 1000];
    let ladder_2d = [250u64, 500, 1000, 2000];
    for (name, f, ladder) in [
        ("quartic positive 1-D", fixtures::quartic_positive_1d(), &ladder_1d[..]),
        ("imaginary quadratic 1-D", fixtures::imaginary_quadratic_1d(), &ladder_1d[..]),
        ("anisotropic imaginary 2-D", fixtures::anisotropic_imaginary_2d(), &ladder_2d[..]),
    ] {
        let r = llt_error_curve(&analysis(&f), None, ladder).unwrap();
        let e = &r.scaled_errors;
        let _ = writeln!(std::io::stderr(), "  {name}: scaled errors {e:.4?}");
        let decreasing = e.windows(2).all(|w| w[1] < w[0]);
        let halved = e[e.len() - 1] < 0.5 * e[0];
        check(&mut fails, decreasing && halved, || {
            format!("{name}: decreasing={decreasing}, last/first={:.3}", e[e.len() - 1] / e[0])
        });
    }
    report(8, start, Duration::from_secs(600), fails);
}

#[test]
fn criterion_09_supnorm_exponents() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let ladder_1d = [100u64, 300, 600, 1000];
    let ladder_2d = [250u64, 500, 1000, 2000];
    for (name, f, mu, ladder) in [
        ("quartic positive 1-D", fixtures::quartic_positive_1d(), 0.25, &ladder_1d[..]),
        ("imaginary quadratic 1-D", fixtures::imaginary_quadratic_1d(), 0.5, &ladder_1d[..]),
        ("anisotropic imaginary 2-D", fixtures::anisotropic_imaginary_2d(), 0.75, &ladder_2d[..]),
        ("cross-shaped 2-D", fixtures::cross_shaped_2d(), 0.5, &ladder_2d[..]),
    ] {
        let fit = supnorm_fit(&f, ladder).unwrap();
        let ratio = fit.scaled_ratio(mu);
        let _ = writeln!(std::io::stderr(), "  {name}: slope {:.4}, ratio {ratio:.3}", fit.slope);
        check(&mut fails, (fit.slope + mu).abs() <= 0.1, || format!("{name}: slope {}", fit.slope));
        check(&mut fails, ratio <= 10.0, || format!("{name}: ratio {ratio}"));
    }
    report(9, start, Duration::from_secs(600), fails);
}

#[test]
fn criterion_10_tensor_oracle() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let psi = fixtures::imaginary_quadratic_1d();
    let product = psi.tensor(&psi);
    for n in [10u64, 50] {
        let lhs = power(&product, n, PowerMethod::Fft).unwrap();
        let p1 = power(&psi, n, PowerMethod::Direct).unwrap();
        let rhs = p1.tensor(&p1);
        let diff = lhs.max_abs_diff(&rhs);
        check(&mut fails, diff <= 1e-12, || format!("n={n}: max difference {diff:.3e}"));
    }
    let a = analysis(&product);
    let point = &a.maximizers[0];
    let spec = AttractorSpec::from_point(point)
        .or_else(|_| {
            let q = point.q.clone().unwrap();
            let e = point.generator.clone().unwrap();
            AttractorSpec::new(AttractorKind::Imaginary { q }, e, Family::Rectangular)
        })
        .and_then(|s| s.with_family(Family::Rectangular));
    match spec {
        Ok(spec) => {
            let att = Attractor::new(spec).unwrap();
            for x in [[0.0, 0.0], [1.5, -0.5], [-3.0, 2.0]] {
                let got = att.value(1.0, &x).unwrap();
                let want = heat_kernel(c(0.0, 0.125), 1.0, x[0]) * heat_kernel(c(0.0, 0.125), 1.0, x[1]);
                check(&mut fails, (got - want).norm() < 1e-6, || format!("attractor at {x:?}: {got} vs {want}"));
            }
        }
        Err(e) => fails.push(format!("rectangular spec: {e}")),
    }
    report(10, start, Duration::from_secs(60), fails);
}

/// `E = S + A` with `S` symmetric, spectrum in `[0.1, 0.3]`, and `A` skew.
/// The identity is then a Lyapunov matrix for `E`, so `|t^E|` decays
/// monotonically as `t -> 0`.
fn random_generator(rng: &mut ChaCha8Rng) -> GroupGenerator {
    let d = rng.random_range(1..=3usize);
    let b = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let o = b.qr().q();
    let lambda = DMatrix::<f64>::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| rng.random_range(0.1..0.3)));
    let sym = &o * lambda * o.transpose();
    let k = DMatrix::<f64>::from_fn(d, d, |_, _| rng.random_range(-0.5..0.5));
    GroupGenerator::new(sym + &k - k.transpose()).unwrap()
}

fn group_law_failures(e: &GroupGenerator, rng: &mut ChaCha8Rng, label: &str) -> Vec<String> {
    let mut fails = Vec::new();
    for _ in 0..5 {
        let s = rng.random_range(0.1..10.0);
        let t = rng.random_range(0.1..10.0);
        let lhs = e.group_power(s).unwrap() * e.group_power(t).unwrap();
        let rhs = e.group_power(s * t).unwrap();
        let diff = (lhs - rhs).amax();
        check(&mut fails, diff < 1e-10, || format!("{label}: group law off by {diff:.3e}"));
        let det = e.group_power(t).unwrap().determinant();
        let want = t.powf(e.trace_order());
        check(&mut fails, ((det - want) / want).abs() < 1e-10, || format!("{label}: det {det} vs {want}"));
    }
    check(&mut fails, e.is_contracting(), || format!("{label}: not contracting"));
    let small: Vec<f64> = (1..=8).map(|k| e.group_power(10f64.powi(-k)).unwrap().norm()).collect();
    check(&mut fails, small.windows(2).all(|w| w[1] < w[0]) && small[7] < small[0], || {
        format!("{label}: contracting norms {small:.3?}")
    });
    let growth: Vec<f64> =
        [1e2, 1e4, 1e6, 1e8].iter().map(|&r: &f64| e.group_power(r).unwrap().norm() / r).collect();
    check(&mut fails, growth.windows(2).all(|w| w[1] < w[0]) && growth[3] < 1e-2, || {
        format!("{label}: |r^E|/r {growth:.3?}")
    });
    fails
}

#[test]
fn criterion_11_group_laws() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for k in 0..20 {
        let e = random_generator(&mut rng);
        fails.extend(group_law_failures(&e, &mut rng, &format!("random generator {k}")));
    }
    for name in fixtures::NAMES {
        // Some profiles are not normalized on their own and carry no generator.
        let Ok(a) = analyze(&fixtures::by_name(name).unwrap(), &AnalyzeOptions::default()) else {
            continue;
        };
        for p in &a.maximizers {
            if let Some(e) = &p.generator {
                fails.extend(group_law_failures(e, &mut rng, &format!("{name} at {:?}", p.xi0)));
            }
        }
    }
    report(11, start, Duration::from_secs(5), fails);
}
