//! Clark measures of finite Blaschke products, the kernel `H[σ]`, Lyapunov
//! exponents and the identities relating them.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::carleson::{entropy, outer_log_modulus};
use crate::error::{Error, Result};
use crate::geometry::{angle_difference, poisson_kernel, Arc, BoundaryPoint, CarlesonSquare, DiskPoint};
use crate::quadrature::Tolerance;

/// Atoms closer than this are reported as a near-degenerate configuration.
pub const ATOM_SEPARATION: f64 = 1e-9;

/// `|F(0)|` below this counts as centered.
pub const CENTERED_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: BoundaryPoint,
    pub mass: f64,
}

/// A finite positive combination of point masses on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicBoundaryMeasure {
    atoms: Vec<Atom>,
}

impl AtomicBoundaryMeasure {
    /// Atoms at (numerically) equal positions are merged.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if let Some(a) = atoms.iter().find(|a| !(a.mass > 0.0)) {
            return Err(Error::InvalidArgument(format!("atom mass {} must be positive", a.mass)));
        }
        let mut atoms = atoms;
        atoms.sort_by(|a, b| a.position.theta().total_cmp(&b.position.theta()));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if angle_difference(a.position.theta(), last.position.theta()).abs() < ATOM_SEPARATION => {
                    last.mass += a.mass;
                }
                _ => merged.push(a),
            }
        }
        if merged.len() > 1 {
            let (first, last) = (merged[0], merged[merged.len() - 1]);
            if angle_difference(first.position.theta(), last.position.theta()).abs() < ATOM_SEPARATION {
                merged[0].mass += last.mass;
                merged.pop();
            }
        }
        Ok(Self { atoms: merged })
    }

    /// The unit point mass at `ξ`.
    pub fn dirac(xi: BoundaryPoint) -> Self {
        Self {
            atoms: vec![Atom {
                position: xi,
                mass: 1.0,
            }],
        }
    }

    /// `n` equal atoms of total mass one at `2πk/n + offset`.
    pub fn uniform(n: usize, offset: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("uniform measure needs at least one atom".into()));
        }
        Self::new(
            (0..n)
                .map(|k| Atom {
                    position: BoundaryPoint::new(offset + TAU * k as f64 / n as f64),
                    mass: 1.0 / n as f64,
                })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Poisson extension `Σ mass·P(z, β)`.
    pub fn poisson_extension(&self, z: DiskPoint) -> f64 {
        self.atoms.iter().map(|a| a.mass * poisson_kernel(z, a.position)).sum()
    }
}

/// The Clark measure `σ_α = Σ_{F(β) = α} |F'(β)|^{-1} δ_β`.
pub fn clark_measure(f: &BlaschkeProduct, alpha: BoundaryPoint) -> Result<AtomicBoundaryMeasure> {
    let pre = f.boundary_preimages(alpha)?;
    let n = pre.len();
    for k in 0..n {
        let gap = angle_difference(pre[(k + 1) % n].theta(), pre[k].theta()).abs();
        if n > 1 && gap < ATOM_SEPARATION {
            return Err(Error::NearDegenerate(gap));
        }
    }
    let atoms = pre
        .into_iter()
        .map(|b| Atom {
            position: b,
            mass: 1.0 / f.boundary_derivative_modulus(b),
        })
        .collect();
    Ok(AtomicBoundaryMeasure { atoms })
}

/// `max_z |Re((α + F(z))/(α - F(z))) - Σ mass·P(z, β)|` over the samples.
pub fn herglotz_residual(f: &BlaschkeProduct, alpha: BoundaryPoint, samples: &[DiskPoint]) -> Result<f64> {
    let sigma = clark_measure(f, alpha)?;
    let a = alpha.to_complex();
    Ok(samples
        .iter()
        .map(|&z| {
            let w = f.eval_disk(z);
            let lhs = ((a + w) / (a - w)).re;
            (lhs - sigma.poisson_extension(z)).abs()
        })
        .fold(0.0, f64::max))
}

/// `χ(σ, F) = Σ mass·log|F'(β)|`.
pub fn lyapunov_exponent(f: &BlaschkeProduct, sigma: &AtomicBoundaryMeasure) -> f64 {
    sigma
        .atoms()
        .iter()
        .map(|a| a.mass * f.boundary_derivative_modulus(a.position).ln())
        .sum()
}

/// `χ(σ_α, F)` for the Clark measure at `α`.
pub fn clark_lyapunov(f: &BlaschkeProduct, alpha: BoundaryPoint) -> Result<f64> {
    Ok(lyapunov_exponent(f, &clark_measure(f, alpha)?))
}

/// `∫ log|F'| dω_p`.
pub fn harmonic_lyapunov(f: &BlaschkeProduct, p: DiskPoint, tol: Tolerance) -> Result<f64> {
    Ok(outer_log_modulus(f, p, tol)?.value)
}

/// `χ(ω_p, F_p) = ∫ log|F'| dω_p + log((1 - |p|²)/(1 - |F(p)|²))`.
pub fn weighted_lyapunov(f: &BlaschkeProduct, p: DiskPoint, tol: Tolerance) -> Result<f64> {
    Ok(harmonic_lyapunov(f, p, tol)? + (p.one_minus_abs_sq() / f.one_minus_abs_sq(p)).ln())
}

/// `|χ(ω_p, F∘G) - χ(ω_p, G) - χ(ω_{G(p)}, F)|`.
pub fn cocycle_residual(f: &BlaschkeProduct, g: &BlaschkeProduct, p: DiskPoint, tol: Tolerance) -> Result<f64> {
    let fg = f.compose(g)?;
    let gp = DiskPoint::from_complex(g.eval_disk(p))?;
    let lhs = harmonic_lyapunov(&fg, p, tol)?;
    Ok((lhs - harmonic_lyapunov(g, p, tol)? - harmonic_lyapunov(f, gp, tol)?).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disintegration {
    /// `∫ χ(σ_α, F) dm(α)`.
    pub clark_average: f64,
    /// `∫ log|F'| dm`.
    pub entropy: f64,
    pub residual: f64,
}

/// Compares `∫ χ(σ_α, F) dm(α)`, by the periodic trapezoid rule on
/// `n_alpha` nodes, with the entropy of `F`.
pub fn disintegration(f: &BlaschkeProduct, n_alpha: usize, tol: Tolerance) -> Result<Disintegration> {
    if n_alpha < 16 {
        return Err(Error::InvalidArgument("at least 16 α nodes are required".into()));
    }
    let chis: Vec<f64> = (0..n_alpha)
        .into_par_iter()
        .map(|k| clark_lyapunov(f, BoundaryPoint::new(TAU * k as f64 / n_alpha as f64)))
        .collect::<Result<_>>()?;
    let clark_average = chis.iter().sum::<f64>() / n_alpha as f64;
    let entropy = entropy(f, tol)?.value;
    Ok(Disintegration {
        clark_average,
        entropy,
        residual: (clark_average - entropy).abs(),
    })
}

/// `|∫ χ(σ_α, F) dm(α) - ∫ log|F'| dm|`.
pub fn disintegration_residual(f: &BlaschkeProduct, n_alpha: usize, tol: Tolerance) -> Result<f64> {
    Ok(disintegration(f, n_alpha, tol)?.residual)
}

/// `log(1/|v|) - Σ_{F(u) = v} log(1/|u|)` for centered `F`.
pub fn littlewood_gap(f: &BlaschkeProduct, v: DiskPoint) -> Result<f64> {
    let f0 = f.eval(Complex64::new(0.0, 0.0)).norm();
    if f0 > CENTERED_TOLERANCE {
        return Err(Error::NotCentered(f0));
    }
    if v.abs() == 0.0 {
        return Err(Error::InvalidArgument("Littlewood gap needs v ≠ 0".into()));
    }
    let sum: f64 = f
        .preimages(v.to_complex())?
        .iter()
        .map(|r| -(r.multiplicity as f64) * r.point.norm().ln())
        .sum();
    Ok(-v.abs().ln() - sum)
}

/// Value of `H[σ]`, with a distinguished infinity at the atoms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HValue {
    Finite(f64),
    Infinite,
}

impl HValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            HValue::Finite(v) => Some(v),
            HValue::Infinite => None,
        }
    }
}

/// `H[σ](z) = Σ mass/|β - z|²` for `|z| ≤ 1`.
pub fn h_sigma(sigma: &AtomicBoundaryMeasure, z: Complex64) -> HValue {
    let mut total = 0.0;
    for a in sigma.atoms() {
        let d = (a.position.to_complex() - z).norm_sqr();
        if d == 0.0 || (z.norm() >= 1.0 - 1e-15 && d < ATOM_SEPARATION * ATOM_SEPARATION) {
            return HValue::Infinite;
        }
        total += a.mass / d;
    }
    HValue::Finite(total)
}

/// The family `𝒜(Q, M)` of maximal dyadic subsquares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HStoppingResult {
    pub square: CarlesonSquare,
    pub m: f64,
    pub squares: Vec<CarlesonSquare>,
    pub total_length: f64,
}

/// Upper bound of `H[σ]` over the closed square `Q̄_J`, infinite when an
/// atom lies on its base.
fn h_bound(sigma: &AtomicBoundaryMeasure, arc: &Arc) -> f64 {
    let r_in = 1.0 - arc.length();
    let mut total = 0.0;
    for a in sigma.atoms() {
        let theta = a.position.theta();
        if arc.contains_angle(theta) {
            return f64::INFINITY;
        }
        let d0 = angle_difference(theta, arc.start_theta()).abs();
        let d1 = angle_difference(theta, arc.end_theta()).abs();
        let edge = if d0 < d1 { arc.start_theta() } else { arc.end_theta() };
        let dir = Complex64::from_polar(1.0, edge);
        let p = a.position.to_complex();
        let proj = (p * dir.conj()).re.clamp(r_in.max(0.0), 1.0);
        total += a.mass / (p - dir * proj).norm_sqr();
    }
    total
}

/// Maximal dyadic subsquares `Q_j ⊊ Q` at most `depth` levels below `Q`
/// with `H[σ](z_{Q_j}) ≥ M·H[σ](z_Q)`.
pub fn h_stopping_squares(
    sigma: &AtomicBoundaryMeasure,
    q: CarlesonSquare,
    m: f64,
    depth: u32,
) -> Result<HStoppingResult> {
    if !(m > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "stopping parameter M = {m} must exceed 1"
        )));
    }
    let base = h_sigma(sigma, q.top_point().to_complex())
        .finite()
        .ok_or_else(|| Error::InvalidArgument("H[σ] is infinite at the top point".into()))?;
    let threshold = m * base;
    let mut squares = Vec::new();
    let mut stack: Vec<(u32, CarlesonSquare)> = q.children().into_iter().rev().map(|c| (1, c)).collect();
    while let Some((level, sq)) = stack.pop() {
        let v = h_sigma(sigma, sq.top_point().to_complex())
            .finite()
            .unwrap_or(f64::INFINITY);
        if v >= threshold {
            squares.push(sq);
            continue;
        }
        if level >= depth || h_bound(sigma, &sq.base()) < threshold {
            continue;
        }
        let [a, b] = sq.children();
        stack.push((level + 1, b));
        stack.push((level + 1, a));
    }
    let total_length = squares.iter().map(|s| s.side_length()).sum();
    Ok(HStoppingResult {
        square: q,
        m,
        squares,
        total_length,
    })
}

/// Least-squares fit of `log Σℓ(Q_j) = a - C log M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub ms: Vec<f64>,
    pub total_lengths: Vec<f64>,
    pub exponent: f64,
    pub intercept: f64,
}

/// Fits the decay exponent of `Σℓ(Q_j)` against `M` over the given values.
pub fn h_decay_exponent(sigma: &AtomicBoundaryMeasure, q: CarlesonSquare, ms: &[f64], depth: u32) -> Result<DecayFit> {
    if ms.len() < 2 {
        return Err(Error::InvalidArgument(
            "a decay fit needs at least two values of M".into(),
        ));
    }
    let totals: Vec<f64> = ms
        .iter()
        .map(|&m| Ok(h_stopping_squares(sigma, q, m, depth)?.total_length))
        .collect::<Result<_>>()?;
    if let Some(pos) = totals.iter().position(|&t| !(t > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "empty stopping family at M = {}; cannot fit a power law",
            ms[pos]
        )));
    }
    let xs: Vec<f64> = ms.iter().map(|m| m.ln()).collect();
    let ys: Vec<f64> = totals.iter().map(|t| t.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(DecayFit {
        ms: ms.to_vec(),
        total_lengths: totals,
        exponent: -slope,
        intercept: my - slope * mx,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSample {
    pub alpha: f64,
    pub chi: f64,
    /// Centered first difference.
    pub d1: f64,
    /// Centered second difference.
    pub d2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiProfile {
    pub samples: Vec<ChiSample>,
    /// `‖D_n - D_2n‖/‖D_2n - D_4n‖` for the first differences at the
    /// common nodes; absent when the differences vanish.
    pub richardson_ratio: Option<f64>,
}

fn chi_grid(f: &BlaschkeProduct, n: usize) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|k| clark_lyapunov(f, BoundaryPoint::new(TAU * k as f64 / n as f64)))
        .collect()
}

fn first_differences(chi: &[f64]) -> Vec<f64> {
    let n = chi.len();
    let h = TAU / n as f64;
    (0..n)
        .map(|k| (chi[(k + 1) % n] - chi[(k + n - 1) % n]) / (2.0 * h))
        .collect()
}

/// `α ↦ χ(σ_α, F)` on a uniform grid with finite differences and a grid
/// refinement study.
pub fn chi_smoothness_profile(f: &BlaschkeProduct, n_alpha: usize) -> Result<ChiProfile> {
    if n_alpha < 64 {
        return Err(Error::InvalidArgument("at least 64 α nodes are required".into()));
    }
    let n = n_alpha;
    let chi = chi_grid(f, n)?;
    let h = TAU / n as f64;
    let d1 = first_differences(&chi);
    let samples = (0..n)
        .map(|k| ChiSample {
            alpha: h * k as f64,
            chi: chi[k],
            d1: d1[k],
            d2: (chi[(k + 1) % n] - 2.0 * chi[k] + chi[(k + n - 1) % n]) / (h * h),
        })
        .collect();
    let d2n = first_differences(&chi_grid(f, 2 * n)?);
    let d4n = first_differences(&chi_grid(f, 4 * n)?);
    let coarse = (0..n).map(|k| (d1[k] - d2n[2 * k]).abs()).fold(0.0, f64::max);
    let fine = (0..n).map(|k| (d2n[2 * k] - d4n[4 * k]).abs()).fold(0.0, f64::max);
    // differences at rounding level carry no convergence information
    let richardson_ratio = if fine > 1e-11 { Some(coarse / fine) } else { None };
    Ok(ChiProfile {
        samples,
        richardson_ratio,
    })
}

/// Largest angular move of a tracked atom between consecutive grid values
/// of `α`, and the bound `Δα / min|F'|` it should respect.
pub fn atom_track_jump(f: &BlaschkeProduct, n_alpha: usize) -> Result<(f64, f64)> {
    let h = TAU / n_alpha as f64;
    let measures: Vec<AtomicBoundaryMeasure> = (0..=n_alpha)
        .map(|k| clark_measure(f, BoundaryPoint::new(h * k as f64)))
        .collect::<Result<_>>()?;
    let mut jump: f64 = 0.0;
    let mut min_derivative = f64::INFINITY;
    for w in measures.windows(2) {
        for a in w[0].atoms() {
            min_derivative = min_derivative.min(f.boundary_derivative_modulus(a.position));
            let nearest = w[1]
                .atoms()
                .iter()
                .map(|b| angle_difference(b.position.theta(), a.position.theta()).abs())
                .fold(f64::INFINITY, f64::min);
            jump = jump.max(nearest);
        }
    }
    Ok((jump, h / min_derivative))
}
