//! Adaptive Gauss–Kronrod (7, 15) quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Kronrod value and `|K - G|` on one panel.
pub(crate) fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * h, ((k - g) * h).norm())
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Quad {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.total_cmp(&o.error)
    }
}

/// Integrates over consecutive `breaks`, bisecting the panel with the largest
/// error estimate until the summed estimate drops below `abs_tol` or
/// `max_panels` is reached.
pub(crate) fn integrate<F: Fn(f64) -> Complex64>(
    f: &F,
    breaks: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> Quad {
    let mut heap = BinaryHeap::with_capacity(breaks.len() * 2);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = gk15(f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    while error > abs_tol && heap.len() < max_panels {
        let p = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let m = 0.5 * (p.a + p.b);
        if m <= p.a || m >= p.b {
            heap.push(p);
            break;
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        value += v1 + v2 - p.value;
        error += e1 + e2 - p.error;
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
    }
    // Re-sum to shed the drift of the running updates.
    let value = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Quad {
        value,
        error,
        converged: error <= abs_tol,
    }
}
