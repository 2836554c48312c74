//! Adaptive quadrature on intervals and rectangles.
//!
//! The 1-D integrator is a globally adaptive Gauss–Kronrod (7, 15) scheme in
//! the QUADPACK style. The 2-D integrator bisects cells in both directions and
//! compares a tensor Gauss–Legendre estimate on a cell against the sum over
//! its four children.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stopping rule shared by the adaptive integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    /// Maximum number of intervals (1-D) or cells (2-D).
    pub max_pieces: usize,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self {
            abs: 0.0,
            rel,
            max_pieces: 20_000,
        }
    }

    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_pieces: 20_000,
        }
    }

    pub fn with_max_pieces(mut self, max_pieces: usize) -> Self {
        self.max_pieces = max_pieces;
        self
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-12, 1e-10)
    }
}

/// A quadrature result together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

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

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = kronrod.abs();
    let mut fv = [0.0; 14];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

struct Piece<B> {
    bounds: B,
    value: f64,
    error: f64,
}

impl<B> PartialEq for Piece<B> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<B> Eq for Piece<B> {}
impl<B> PartialOrd for Piece<B> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<B> Ord for Piece<B> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`, optionally splitting first at `breaks`.
pub fn integrate_with_breaks<F>(f: F, a: f64, b: f64, breaks: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let mut points = vec![a];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    points.extend(inner);
    points.push(b);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in points.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (value, error) = kronrod15(&f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Piece {
            bounds: (w[0], w[1]),
            value,
            error,
        });
    }

    while total_err > tol.target(total) {
        if heap.len() >= tol.max_pieces {
            return Err(Error::ToleranceNotMet {
                estimate: total,
                error: total_err,
                tolerance: tol.target(total),
            });
        }
        let Some(worst) = heap.pop() else { break };
        let (lo, hi) = worst.bounds;
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            // interval can no longer be bisected in floating point
            heap.push(worst);
            return Err(Error::ToleranceNotMet {
                estimate: total,
                error: total_err,
                tolerance: tol.target(total),
            });
        }
        let (v1, e1) = kronrod15(&f, lo, mid);
        let (v2, e2) = kronrod15(&f, mid, hi);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Piece {
            bounds: (lo, mid),
            value: v1,
            error: e1,
        });
        heap.push(Piece {
            bounds: (mid, hi),
            value: v2,
            error: e2,
        });
    }

    // re-sum to shed the drift of incremental updates
    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Estimate { value, error })
}

pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// Mean of a `2π`-periodic function by the `n`-point trapezoid rule.
///
/// Spectrally accurate for analytic periodic integrands.
pub fn periodic_mean<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = TAU / n as f64;
    (0..n).map(|k| f(k as f64 * h)).sum::<f64>() / n as f64
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let prev = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Axis-aligned integration rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    fn quarters(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(self.x0, xm, ym, self.y1),
            Rect::new(xm, self.x1, ym, self.y1),
        ]
    }
}

struct TensorRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl TensorRule {
    fn apply<F: Fn(f64, f64) -> f64>(&self, f: &F, r: &Rect) -> f64 {
        let (hx, cx) = (0.5 * (r.x1 - r.x0), 0.5 * (r.x1 + r.x0));
        let (hy, cy) = (0.5 * (r.y1 - r.y0), 0.5 * (r.y1 + r.y0));
        let mut acc = 0.0;
        for (xi, wi) in self.nodes.iter().zip(&self.weights) {
            let x = cx + hx * xi;
            let mut row = 0.0;
            for (yj, wj) in self.nodes.iter().zip(&self.weights) {
                row += wj * f(x, cy + hy * yj);
            }
            acc += wi * row;
        }
        acc * hx * hy
    }
}

/// Adaptive cubature of `f(x, y)` over a rectangle.
///
/// `order` is the number of Gauss–Legendre points per direction in each cell.
pub fn integrate_rect<F>(f: F, rect: Rect, order: usize, tol: Tolerance) -> Result<Estimate>
where
    F: Fn(f64, f64) -> f64,
{
    let (nodes, weights) = gauss_legendre(order);
    let rule = TensorRule { nodes, weights };

    let refine = |r: Rect, coarse: f64| -> Piece<Rect> {
        let fine: f64 = r.quarters().iter().map(|q| rule.apply(&f, q)).sum();
        Piece {
            bounds: r,
            value: fine,
            error: (fine - coarse).abs(),
        }
    };

    let root_coarse = rule.apply(&f, &rect);
    let root = refine(rect, root_coarse);
    let mut total = root.value;
    let mut total_err = root.error;
    let mut heap = BinaryHeap::new();
    heap.push(root);

    while total_err > tol.target(total) {
        if heap.len() >= tol.max_pieces {
            return Err(Error::ToleranceNotMet {
                estimate: total,
                error: total_err,
                tolerance: tol.target(total),
            });
        }
        let Some(worst) = heap.pop() else { break };
        total -= worst.value;
        total_err -= worst.error;
        for q in worst.bounds.quarters() {
            let coarse = rule.apply(&f, &q);
            let piece = refine(q, coarse);
            total += piece.value;
            total_err += piece.error;
            heap.push(piece);
        }
    }

    let value = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    Ok(Estimate { value, error })
}
