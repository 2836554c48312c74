//! Finite Blaschke products and disk automorphisms.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pseudo_hyperbolic, BoundaryPoint, DiskPoint, BOUNDARY_MARGIN};
use crate::poly::{aberth, cluster, Poly};

/// Default upper bound on the degree of a product.
pub const DEFAULT_DEGREE_CAP: usize = 64;

/// Roots closer than this are merged into one root with multiplicity.
pub const MERGE_TOLERANCE: f64 = 1e-8;

/// Largest residual `|F(z) - w|` accepted from the preimage solver.
pub const PREIMAGE_RESIDUAL: f64 = 1e-9;

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A point with multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub point: Complex64,
    pub multiplicity: usize,
}

impl Root {
    pub fn simple(point: Complex64) -> Self {
        Self { point, multiplicity: 1 }
    }
}

/// Total multiplicity of a root list.
pub fn total_multiplicity(roots: &[Root]) -> usize {
    roots.iter().map(|r| r.multiplicity).sum()
}

fn merge_roots(points: &[Complex64], tol: f64) -> Vec<Root> {
    cluster(points, tol)
        .into_iter()
        .map(|(point, multiplicity)| Root { point, multiplicity })
        .collect()
}

/// The disk automorphism `τ(w) = e^{iφ}(w - a)/(1 - āw)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusAutomorphism {
    pub a: DiskPoint,
    pub phi: f64,
}

impl MoebiusAutomorphism {
    pub fn new(a: DiskPoint, phi: f64) -> Self {
        Self { a, phi }
    }

    pub fn identity() -> Self {
        Self::new(DiskPoint::ORIGIN, 0.0)
    }

    pub fn apply(&self, w: Complex64) -> Complex64 {
        let a = self.a.to_complex();
        Complex64::from_polar(1.0, self.phi) * (w - a) / (ONE - a.conj() * w)
    }

    pub fn inverse(&self) -> Self {
        let a = -self.a.to_complex() * Complex64::from_polar(1.0, self.phi);
        Self::new(DiskPoint::from_complex(a).expect("image of a disk point"), -self.phi)
    }

    /// `1 - |τ(w)|²` given `1 - |w|²`, without cancellation.
    pub fn one_minus_abs_sq(&self, w: Complex64, w_defect: f64) -> f64 {
        let a = self.a.to_complex();
        self.a.one_minus_abs_sq() * w_defect / (ONE - a.conj() * w).norm_sqr()
    }

    /// The automorphism with `τ(q) = p` and `τ'(q) > 0` direction fixed by
    /// passing through the origin, i.e. `σ_p ∘ σ_q^{-1}` with
    /// `σ_c(w) = (w + c)/(1 + c̄w)`.
    pub fn sending(q: DiskPoint, p: DiskPoint) -> Self {
        let qc = q.to_complex();
        let pc = p.to_complex();
        let map = |w: Complex64| {
            let u = (w - qc) / (ONE - qc.conj() * w);
            (u + pc) / (ONE + pc.conj() * u)
        };
        // zero of the composite
        let a = (qc - pc) / (ONE - qc.conj() * pc);
        let a = DiskPoint::from_complex(a).expect("automorphism zero inside the disk");
        let w0 = if a.abs() < 0.5 {
            if a.abs() == 0.0 {
                Complex64::new(0.5, 0.0)
            } else {
                -a.to_complex() / a.abs() * 0.5
            }
        } else {
            ZERO
        };
        let ac = a.to_complex();
        let rot = map(w0) * (ONE - ac.conj() * w0) / (w0 - ac);
        Self::new(a, rot.im.atan2(rot.re))
    }

    /// The recentering map `τ_p` with `τ_p(F(p)) = p`.
    pub fn recentering(f: &BlaschkeProduct, p: DiskPoint) -> Result<Self> {
        let q = DiskPoint::from_complex(f.eval(p.to_complex()))?;
        Ok(Self::sending(q, p))
    }

    /// As a degree-one Blaschke product.
    pub fn to_blaschke(&self) -> BlaschkeProduct {
        let a = self.a.to_complex();
        let rot = if a.norm() == 0.0 {
            self.phi
        } else {
            // e^{iφ}(w - a)/(1 - āw) = e^{i(φ+π+arg a)} b_a(w)
            self.phi + PI + a.im.atan2(a.re)
        };
        BlaschkeProduct::from_roots(vec![Root::simple(a)], rot).expect("single zero inside the disk")
    }
}

/// Serializable description `{ "rotation_theta": θ, "zeros": [[re, im], ...] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeSpec {
    #[serde(default)]
    pub rotation_theta: f64,
    pub zeros: Vec<[f64; 2]>,
}

/// `F(z) = e^{iθ} Π_k b_{a_k}(z)^{m_k}` with `b_a(z) = (|a|/a)(a - z)/(1 - āz)`
/// and `b_0(z) = z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BlaschkeSpec", into = "BlaschkeSpec")]
pub struct BlaschkeProduct {
    zeros: Vec<Root>,
    rotation_theta: f64,
    degree: usize,
}

impl TryFrom<BlaschkeSpec> for BlaschkeProduct {
    type Error = Error;

    fn try_from(spec: BlaschkeSpec) -> Result<Self> {
        let zeros = spec
            .zeros
            .iter()
            .map(|&[re, im]| DiskPoint::new(re, im))
            .collect::<Result<Vec<_>>>()?;
        BlaschkeProduct::new(&zeros, spec.rotation_theta)
    }
}

impl From<BlaschkeProduct> for BlaschkeSpec {
    fn from(f: BlaschkeProduct) -> Self {
        BlaschkeSpec {
            rotation_theta: f.rotation_theta,
            zeros: f.zero_list().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// The factor `b_a(z)`.
fn factor(a: Complex64, z: Complex64) -> Complex64 {
    let r = a.norm();
    if r == 0.0 {
        z
    } else {
        (a / r).conj() * (a - z) / (ONE - a.conj() * z)
    }
}

/// `b_a'(z)`.
fn factor_derivative(a: Complex64, z: Complex64) -> Complex64 {
    let r = a.norm();
    if r == 0.0 {
        ONE
    } else {
        let d = ONE - a.conj() * z;
        -(a / r).conj() * (1.0 - r * r) / (d * d)
    }
}

impl BlaschkeProduct {
    /// Product with simple zeros at `zeros` (repeated points are merged).
    pub fn new(zeros: &[DiskPoint], rotation_theta: f64) -> Result<Self> {
        let pts: Vec<Complex64> = zeros.iter().map(|z| z.to_complex()).collect();
        Self::from_roots(merge_roots(&pts, MERGE_TOLERANCE), rotation_theta)
    }

    pub fn from_roots(zeros: Vec<Root>, rotation_theta: f64) -> Result<Self> {
        Self::from_roots_with_cap(zeros, rotation_theta, DEFAULT_DEGREE_CAP)
    }

    pub fn from_roots_with_cap(zeros: Vec<Root>, rotation_theta: f64, cap: usize) -> Result<Self> {
        let degree = total_multiplicity(&zeros);
        if degree == 0 {
            return Err(Error::InvalidArgument(
                "a Blaschke product needs at least one zero".into(),
            ));
        }
        if degree > cap {
            return Err(Error::DegreeCap { degree, cap });
        }
        for r in &zeros {
            if r.multiplicity == 0 {
                return Err(Error::InvalidArgument("zero multiplicity must be positive".into()));
            }
            DiskPoint::from_complex(r.point)?;
        }
        Ok(Self {
            zeros,
            rotation_theta,
            degree,
        })
    }

    pub fn identity() -> Self {
        Self::monomial(1)
    }

    /// `z^d`.
    pub fn monomial(d: usize) -> Self {
        Self::from_roots(
            vec![Root {
                point: ZERO,
                multiplicity: d,
            }],
            0.0,
        )
        .expect("valid monomial")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rotation_theta(&self) -> f64 {
        self.rotation_theta
    }

    pub fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.rotation_theta)
    }

    /// Distinct zeros with multiplicity.
    pub fn zeros(&self) -> &[Root] {
        &self.zeros
    }

    /// Zeros repeated by multiplicity.
    pub fn zero_list(&self) -> Vec<Complex64> {
        self.zeros
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.point, r.multiplicity))
            .collect()
    }

    pub fn with_rotation(&self, rotation_theta: f64) -> Self {
        Self {
            rotation_theta,
            ..self.clone()
        }
    }

    /// `F(z)` for any `z` off the poles.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros.iter().fold(self.rotation(), |acc, r| {
            acc * factor(r.point, z).powu(r.multiplicity as u32)
        })
    }

    pub fn eval_disk(&self, z: DiskPoint) -> Complex64 {
        self.eval(z.to_complex())
    }

    pub fn eval_boundary(&self, xi: BoundaryPoint) -> Complex64 {
        self.eval(xi.to_complex())
    }

    /// `1 - |F(z)|²` given `1 - |z|²`, by telescoping over the factors.
    pub fn one_minus_abs_sq_from(&self, z: Complex64, z_defect: f64) -> f64 {
        let mut defect = 0.0;
        let mut prod = 1.0;
        for r in &self.zeros {
            let a = r.point;
            let b = factor(a, z).norm_sqr();
            let e = (1.0 - a.norm_sqr()) * z_defect / (ONE - a.conj() * z).norm_sqr();
            for _ in 0..r.multiplicity {
                defect += prod * e;
                prod *= b;
            }
        }
        defect
    }

    /// `1 - |F(z)|²` without cancellation near the circle.
    pub fn one_minus_abs_sq(&self, z: DiskPoint) -> f64 {
        self.one_minus_abs_sq_from(z.to_complex(), z.one_minus_abs_sq())
    }

    /// `F'(z)` by the product rule, valid at the zeros as well.
    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let vals: Vec<Complex64> = self.zeros.iter().map(|r| factor(r.point, z)).collect();
        let mut total = ZERO;
        for (k, r) in self.zeros.iter().enumerate() {
            let m = r.multiplicity as u32;
            let mut term = factor_derivative(r.point, z) * m as f64 * vals[k].powu(m - 1);
            for (j, s) in self.zeros.iter().enumerate() {
                if j != k {
                    term *= vals[j].powu(s.multiplicity as u32);
                }
            }
            total += term;
        }
        self.rotation() * total
    }

    /// Logarithmic derivative `F'/F = Σ_k m_k (1 - |a_k|²)/((z - a_k)(1 - ā_k z))`.
    pub fn log_derivative(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .map(|r| {
                let a = r.point;
                r.multiplicity as f64 * (1.0 - a.norm_sqr()) / ((z - a) * (ONE - a.conj() * z))
            })
            .sum()
    }

    /// `|F'(ξ)| = Σ_k m_k (1 - |a_k|²)/|ξ - a_k|²` on the circle.
    pub fn boundary_derivative_modulus(&self, xi: BoundaryPoint) -> f64 {
        self.boundary_derivative_at(xi.to_complex())
    }

    pub(crate) fn boundary_derivative_at(&self, xi: Complex64) -> f64 {
        self.zeros
            .iter()
            .map(|r| r.multiplicity as f64 * (1.0 - r.point.norm_sqr()) / (xi - r.point).norm_sqr())
            .sum()
    }

    /// Numerator `P` and denominator `Q` with `F = P/Q`.
    pub fn numerator_denominator(&self) -> (Poly, Poly) {
        let mut p = Poly::constant(self.rotation());
        let mut q = Poly::constant(ONE);
        for r in &self.zeros {
            let a = r.point;
            let s = a.norm();
            for _ in 0..r.multiplicity {
                if s == 0.0 {
                    p.mul_linear(ZERO, ONE);
                } else {
                    let u = (a / s).conj();
                    p.mul_linear(u * a, -u);
                    q.mul_linear(ONE, -a.conj());
                }
            }
        }
        (p, q)
    }

    /// Solutions of `F(z) = w` for `|w| ≤ 1`, merged by multiplicity.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Root>> {
        if !(w.norm() <= 1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "preimage target |w| = {} exceeds 1",
                w.norm()
            )));
        }
        if w == ZERO {
            return Ok(self.zeros.clone());
        }
        if self.degree == 1 {
            // single zero: invert the factor directly
            let a = self.zeros[0].point;
            let v = w / self.rotation();
            let z = if a.norm() == 0.0 {
                v
            } else {
                let u = (a / a.norm()).conj();
                // u(a - z) = v(1 - āz)
                (u * a - v) / (u - v * a.conj())
            };
            return Ok(vec![Root::simple(z)]);
        }
        let (p, q) = self.numerator_denominator();
        let mut target = p.add(&q.scale(-w));
        target.trim_relative(1e-15);
        if target.degree() != self.degree {
            return Err(Error::RootFinding {
                iterations: 0,
                residual: f64::NAN,
            });
        }
        let found = aberth(&target);
        let on_circle = w.norm() >= 1.0 - BOUNDARY_MARGIN;
        let mut pts = Vec::with_capacity(found.roots.len());
        for mut z in found.roots {
            if on_circle {
                z /= z.norm();
            }
            for _ in 0..2 {
                let d = self.derivative(z);
                if d.norm() < 1e-12 {
                    break;
                }
                let next = z - (self.eval(z) - w) / d;
                let next = if on_circle { next / next.norm() } else { next };
                if (self.eval(next) - w).norm() <= (self.eval(z) - w).norm() {
                    z = next;
                } else {
                    break;
                }
            }
            pts.push(z);
        }
        let residual = pts.iter().map(|&z| (self.eval(z) - w).norm()).fold(0.0, f64::max);
        if !(residual < PREIMAGE_RESIDUAL) {
            return Err(Error::RootFinding {
                iterations: found.iterations,
                residual,
            });
        }
        if !on_circle && pts.iter().any(|z| z.norm() >= 1.0) {
            return Err(Error::RootFinding {
                iterations: found.iterations,
                residual,
            });
        }
        Ok(merge_roots(&pts, MERGE_TOLERANCE))
    }

    /// The `d` solutions of `F(ξ) = α` on the circle, sorted by angle.
    pub fn boundary_preimages(&self, alpha: BoundaryPoint) -> Result<Vec<BoundaryPoint>> {
        let target = alpha.to_complex();
        let roots = self.preimages(target)?;
        let mut out = Vec::with_capacity(self.degree);
        for r in roots {
            let mut theta = r.point.im.atan2(r.point.re);
            for _ in 0..4 {
                let xi = Complex64::from_polar(1.0, theta);
                let miss = (self.eval(xi) / target).arg();
                // arg F(e^{iθ}) increases with speed |F'(ξ)|
                theta -= miss / self.boundary_derivative_at(xi);
            }
            for _ in 0..r.multiplicity {
                out.push(BoundaryPoint::new(theta));
            }
        }
        out.sort_by(|a, b| a.theta().partial_cmp(&b.theta()).unwrap());
        Ok(out)
    }

    /// Critical points inside the disk, with multiplicity.
    ///
    /// Zeros of multiplicity `m ≥ 2` contribute `m - 1`; the remaining ones
    /// are the roots inside the disk of
    /// `N(z) = Σ_j m_j (1 - |a_j|²) Π_{i≠j} (z - a_i)(1 - ā_i z)`.
    pub fn critical_points(&self) -> Result<Vec<Root>> {
        let mut out: Vec<Complex64> = Vec::new();
        for r in &self.zeros {
            for _ in 1..r.multiplicity {
                out.push(r.point);
            }
        }
        let n = self.zeros.len();
        if n >= 2 {
            let mut num = Poly::constant(ZERO);
            for (j, rj) in self.zeros.iter().enumerate() {
                let mut term = Poly::constant(Complex64::new(
                    rj.multiplicity as f64 * (1.0 - rj.point.norm_sqr()),
                    0.0,
                ));
                for (i, ri) in self.zeros.iter().enumerate() {
                    if i != j {
                        term.mul_linear(-ri.point, ONE);
                        term.mul_linear(ONE, -ri.point.conj());
                    }
                }
                num = num.add(&term);
            }
            num.trim_relative(1e-15);
            let found = aberth(&num);
            let mut roots = found.roots;
            roots.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
            for mut c in roots.into_iter().take(n - 1) {
                for _ in 0..3 {
                    let h = self.log_derivative(c);
                    let dh = self.log_derivative_prime(c);
                    if dh.norm() == 0.0 {
                        break;
                    }
                    let next = c - h / dh;
                    if next.norm() < 1.0 && self.log_derivative(next).norm() <= h.norm() {
                        c = next;
                    } else {
                        break;
                    }
                }
                if !(c.norm() < 1.0) {
                    return Err(Error::RootFinding {
                        iterations: found.iterations,
                        residual: self.derivative(c).norm(),
                    });
                }
                out.push(c);
            }
        }
        Ok(merge_roots(&out, MERGE_TOLERANCE))
    }

    fn log_derivative_prime(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .map(|r| {
                let a = r.point;
                let s = 1.0 - a.norm_sqr();
                let u = z - a;
                let v = ONE - a.conj() * z;
                // d/dz [s/(uv)] = -s(v - ā u)/(uv)²
                -(r.multiplicity as f64) * s * (v - a.conj() * u) / (u * u * v * v)
            })
            .sum()
    }

    /// `τ ∘ F`.
    pub fn post_compose_mobius(&self, tau: &MoebiusAutomorphism) -> Result<Self> {
        let zeros = self.preimages(tau.a.to_complex())?;
        let zeros = self.check_cap(zeros)?;
        self.fit_rotation(zeros, |z| tau.apply(self.eval(z)))
    }

    /// `F ∘ G`.
    pub fn compose(&self, g: &BlaschkeProduct) -> Result<Self> {
        let mut pts: Vec<Root> = Vec::new();
        for r in &self.zeros {
            for pre in g.preimages(r.point)? {
                pts.push(Root {
                    point: pre.point,
                    multiplicity: pre.multiplicity * r.multiplicity,
                });
            }
        }
        let zeros = self.check_cap(pts)?;
        self.fit_rotation(zeros, |z| self.eval(g.eval(z)))
    }

    fn check_cap(&self, zeros: Vec<Root>) -> Result<Vec<Root>> {
        let degree = total_multiplicity(&zeros);
        if degree > DEFAULT_DEGREE_CAP {
            return Err(Error::DegreeCap {
                degree,
                cap: DEFAULT_DEGREE_CAP,
            });
        }
        Ok(zeros)
    }

    /// Finds the front rotation so that the product with `zeros` agrees with
    /// `target`, using a test point far from every zero.
    fn fit_rotation<T: Fn(Complex64) -> Complex64>(&self, zeros: Vec<Root>, target: T) -> Result<Self> {
        let unrotated = Self::from_roots(zeros, 0.0)?;
        let candidates = (0..16)
            .map(|k| Complex64::from_polar(0.7, TAU * k as f64 / 16.0))
            .chain([ZERO]);
        let z0 = candidates
            .max_by(|x, y| {
                let dx = unrotated
                    .zeros
                    .iter()
                    .map(|r| pseudo_hyperbolic(*x, r.point))
                    .fold(1.0, f64::min);
                let dy = unrotated
                    .zeros
                    .iter()
                    .map(|r| pseudo_hyperbolic(*y, r.point))
                    .fold(1.0, f64::min);
                dx.partial_cmp(&dy).unwrap()
            })
            .unwrap();
        let ratio = target(z0) / unrotated.eval(z0);
        Ok(unrotated.with_rotation(ratio.im.atan2(ratio.re)))
    }

    /// Winding number of `F` over the circle from `n` samples.
    pub fn winding_number(&self, n: usize) -> i64 {
        let mut total = 0.0;
        let mut prev = self.eval(ONE);
        for k in 1..=n {
            let cur = self.eval(Complex64::from_polar(1.0, TAU * k as f64 / n as f64));
            total += (cur / prev).arg();
            prev = cur;
        }
        (total / TAU).round() as i64
    }
}
