//! Complex polynomials and simultaneous root iteration.

use num_complex::Complex64;

/// Polynomial with coefficients in ascending order of degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == Complex64::new(0.0, 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(Complex64::new(0.0, 0.0));
        }
    }

    /// Drops leading coefficients below `rel` times the largest one.
    pub fn trim_relative(&mut self, rel: f64) {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while self.coeffs.len() > 1 && self.coeffs.last().unwrap().norm() <= rel * max {
            self.coeffs.pop();
        }
    }

    /// Multiplies in place by `c0 + c1·z`.
    pub fn mul_linear(&mut self, c0: Complex64, c1: Complex64) {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[k] += c * c0;
            out[k + 1] += c * c1;
        }
        self.coeffs = out;
        self.trim();
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly::new(
            (0..n)
                .map(|k| *self.coeffs.get(k).unwrap_or(&zero) + *other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }
}

/// Result of [`aberth`].
#[derive(Debug, Clone)]
pub struct Roots {
    pub roots: Vec<Complex64>,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_ITERATIONS: usize = 1000;

/// All roots of `p` by the Aberth–Ehrlich iteration.
///
/// Roots of higher multiplicity converge only linearly; stagnation is treated
/// as convergence once the corrections stop decreasing.
pub fn aberth(p: &Poly) -> Roots {
    let n = p.degree();
    if n == 0 {
        return Roots {
            roots: Vec::new(),
            iterations: 0,
            converged: true,
        };
    }
    let c = p.coeffs();
    let lead = c[n];
    let radius = {
        let ratio = (c[0] / lead).norm();
        if ratio > 0.0 {
            ratio.powf(1.0 / n as f64)
        } else {
            // Cauchy bound when zero is a root
            1.0 + c[..n].iter().map(|x| (x / lead).norm()).fold(0.0, f64::max)
        }
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    let mut active = vec![true; n];
    let mut last_step = vec![f64::INFINITY; n];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS && active.iter().any(|&a| a) {
        iterations += 1;
        for k in 0..n {
            if !active[k] {
                continue;
            }
            let (v, dv) = p.eval_with_derivative(z[k]);
            if v == Complex64::new(0.0, 0.0) {
                active[k] = false;
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| 1.0 / (z[k] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // nudge off a degenerate configuration
                let nudge = Complex64::new(1e-7, 1e-7) * (1.0 + z[k].norm());
                z[k] += nudge;
                continue;
            }
            z[k] -= step;
            let size = step.norm();
            let scale = 1.0 + z[k].norm();
            // converged, or stagnating at rounding level for an ill-conditioned root
            if size <= 4.0 * f64::EPSILON * scale || (size <= 1e-10 * scale && size >= 0.5 * last_step[k]) {
                active[k] = false;
            }
            last_step[k] = size;
        }
    }
    Roots {
        converged: active.iter().all(|&a| !a),
        roots: z,
        iterations,
    }
}

/// Groups points closer than `tol` (single linkage) and returns each
/// cluster's centroid and size, in order of first appearance.
pub fn cluster(points: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (points[i] - points[j]).norm() < tol {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut order: Vec<usize> = Vec::new();
    let mut sums: Vec<(Complex64, usize)> = Vec::new();
    for (i, &p) in points.iter().enumerate().take(n) {
        let r = find(&mut label, i);
        match order.iter().position(|&o| o == r) {
            Some(pos) => {
                sums[pos].0 += p;
                sums[pos].1 += 1;
            }
            None => {
                order.push(r);
                sums.push((p, 1));
            }
        }
    }
    sums.into_iter().map(|(s, m)| (s / m as f64, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Eigenvalues of the companion matrix as an independent root oracle.
    fn companion_roots(p: &Poly) -> Vec<Complex64> {
        let n = p.degree();
        let a = p.coeffs();
        let lead = a[n];
        let mut m = DMatrix::<Complex64>::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = c(1.0, 0.0);
        }
        for i in 0..n {
            m[(i, n - 1)] = -a[i] / lead;
        }
        m.schur()
            .eigenvalues()
            .expect("triangular Schur form")
            .iter()
            .copied()
            .collect()
    }

    fn matched(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        let mut used = vec![false; b.len()];
        a.iter().all(|x| {
            let best = (0..b.len())
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (b[i] - x).norm().partial_cmp(&(b[j] - x).norm()).unwrap());
            match best {
                Some(j) if (b[j] - x).norm() < tol => {
                    used[j] = true;
                    true
                }
                _ => false,
            }
        })
    }

    #[test]
    fn horner_derivative() {
        let p = Poly::new(vec![c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 1.0)]);
        let z = c(0.3, -0.7);
        let (v, d) = p.eval_with_derivative(z);
        assert!((v - (c(1.0, 0.0) + c(0.0, 2.0) * z + c(-3.0, 1.0) * z * z)).norm() < 1e-14);
        assert!((d - (c(0.0, 2.0) + 2.0 * c(-3.0, 1.0) * z)).norm() < 1e-14);
    }

    #[test]
    fn quadratic_roots() {
        // z² - 4z + 1
        let p = Poly::new(vec![c(1.0, 0.0), c(-4.0, 0.0), c(1.0, 0.0)]);
        let r = aberth(&p);
        assert!(r.converged);
        let want = [c(2.0 - 3f64.sqrt(), 0.0), c(2.0 + 3f64.sqrt(), 0.0)];
        assert!(matched(&r.roots, &want, 1e-12));
    }

    #[test]
    fn matches_companion_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [3usize, 8, 17, 30] {
            let coeffs: Vec<Complex64> = (0..=n)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let p = Poly::new(coeffs);
            let r = aberth(&p);
            assert!(r.converged, "degree {n}");
            assert!(matched(&r.roots, &companion_roots(&p), 1e-7), "degree {n}");
        }
    }

    #[test]
    fn zero_root_and_multiplicity() {
        // z³ (z - 0.5)²
        let mut p = Poly::constant(c(1.0, 0.0));
        for _ in 0..3 {
            p.mul_linear(c(0.0, 0.0), c(1.0, 0.0));
        }
        for _ in 0..2 {
            p.mul_linear(c(-0.5, 0.0), c(1.0, 0.0));
        }
        let r = aberth(&p);
        let groups = cluster(&r.roots, 1e-4);
        assert_eq!(groups.len(), 2);
        let mut mult: Vec<usize> = groups.iter().map(|g| g.1).collect();
        mult.sort();
        assert_eq!(mult, vec![2, 3]);
    }

    #[test]
    fn cluster_single_linkage() {
        let pts = [c(0.0, 0.0), c(1e-9, 0.0), c(2e-9, 0.0), c(1.0, 0.0)];
        let g = cluster(&pts, 1.5e-9);
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].1, 3);
        assert!((g[0].0 - c(1e-9, 0.0)).norm() < 1e-20);
    }
}
