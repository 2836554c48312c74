//! Hyperbolic area transported by a finite Blaschke product.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::distortion::hyperbolic_derivative;
use crate::error::{Error, Result};
use crate::geometry::{hyperbolic_disk_area, pseudo_hyperbolic, DiskPoint};
use crate::quadrature::{integrate_rect, Estimate, Rect, Tolerance};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// The point `σ_z(tanh(s/2) e^{iφ})` at hyperbolic polar coordinates
/// `(s, φ)` about `z`, where `σ_z(u) = (u + z)/(1 + z̄u)`.
fn polar_point(z: Complex64, s: f64, phi: f64) -> Complex64 {
    let u = Complex64::from_polar((0.5 * s).tanh(), phi);
    (u + z) / (ONE + z.conj() * u)
}

/// `∫_{B_h(z,R)} (λ_F/λ)² dA_h`, the hyperbolic area of `F(B_h(z, R))`
/// counted with multiplicity.
pub fn area_with_multiplicity(f: &BlaschkeProduct, z: DiskPoint, radius: f64, tol: Tolerance) -> Result<Estimate> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    let zc = z.to_complex();
    let density = |s: f64, phi: f64| {
        let w = polar_point(zc, s, phi);
        match DiskPoint::from_complex(w) {
            Ok(p) => {
                let h = hyperbolic_derivative(f, p);
                h * h * s.sinh()
            }
            Err(_) => 0.0,
        }
    };
    integrate_rect(density, Rect::new(0.0, radius, 0.0, TAU), 6, tol)
}

/// Resolution of the membership raster used by [`image_area`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RasterOptions {
    /// Cells in the radial direction.
    pub radial_cells: usize,
    /// Cells in the angular direction.
    pub angular_cells: usize,
    /// Cells whose corners disagree are split into `2^level` by `2^level`
    /// subcells sampled at their centers.
    pub refine_level: u32,
    /// Extra hyperbolic radius of the bounding disk around `F(z)`.
    pub margin: f64,
}

impl Default for RasterOptions {
    fn default() -> Self {
        Self {
            radial_cells: 256,
            angular_cells: 256,
            refine_level: 3,
            margin: 0.25,
        }
    }
}

/// Whether `w` has a preimage in `B_h(z, R)`.
pub fn has_preimage_in_disk(f: &BlaschkeProduct, w: Complex64, z: DiskPoint, radius: f64) -> Result<bool> {
    let t = (0.5 * radius).tanh();
    let zc = z.to_complex();
    Ok(f.preimages(w)?.iter().any(|r| pseudo_hyperbolic(zc, r.point) < t))
}

/// Hyperbolic area of the set `F(B_h(z, R))`, without multiplicity.
///
/// Membership is rasterized on a polar grid in hyperbolic coordinates about
/// `F(z)` covering `B_h(F(z), R + margin)`. The error estimate is half the
/// area of the refined subcells lying on the sampled boundary of the image,
/// or half the cell when the boundary slips between all of its subcells.
pub fn image_area(f: &BlaschkeProduct, z: DiskPoint, radius: f64, opts: &RasterOptions) -> Result<Estimate> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    if opts.radial_cells == 0 || opts.angular_cells == 0 {
        return Err(Error::InvalidArgument(
            "raster needs at least one cell in each direction".into(),
        ));
    }
    let v = f.eval_disk(z);
    let (ns, nphi) = (opts.radial_cells, opts.angular_cells);
    let s_max = radius + opts.margin;
    let ds = s_max / ns as f64;
    let dphi = TAU / nphi as f64;
    let member = |s: f64, phi: f64| has_preimage_in_disk(f, polar_point(v, s, phi), z, radius);

    // corner (i, j) sits at s = i·ds, φ = j·dφ; the angular index wraps
    let corners: Vec<bool> = (0..(ns + 1) * nphi)
        .into_par_iter()
        .map(|idx| member((idx / nphi) as f64 * ds, (idx % nphi) as f64 * dphi))
        .collect::<Result<_>>()?;
    let corner = |i: usize, j: usize| corners[i * nphi + j % nphi];

    let cell_area = |s0: f64, s1: f64, width: f64| (s1.cosh() - s0.cosh()) * width;
    let sub = 1usize << opts.refine_level;
    let cells: Vec<(f64, f64)> = (0..ns * nphi)
        .into_par_iter()
        .map(|idx| -> Result<(f64, f64)> {
            let (i, j) = (idx / nphi, idx % nphi);
            let states = [corner(i, j), corner(i + 1, j), corner(i, j + 1), corner(i + 1, j + 1)];
            let s0 = i as f64 * ds;
            if states.iter().all(|&b| b) {
                return Ok((cell_area(s0, s0 + ds, dphi), 0.0));
            }
            if states.iter().all(|&b| !b) {
                return Ok((0.0, 0.0));
            }
            let hs = ds / sub as f64;
            let hphi = dphi / sub as f64;
            let mut inside = vec![false; sub * sub];
            for a in 0..sub {
                for b in 0..sub {
                    inside[a * sub + b] =
                        member(s0 + (a as f64 + 0.5) * hs, j as f64 * dphi + (b as f64 + 0.5) * hphi)?;
                }
            }
            let mut value = 0.0;
            let mut uncertain = 0.0;
            for a in 0..sub {
                let area = cell_area(s0 + a as f64 * hs, s0 + (a + 1) as f64 * hs, hphi);
                for b in 0..sub {
                    let here = inside[a * sub + b];
                    if here {
                        value += area;
                    }
                    let differs = (a > 0 && inside[(a - 1) * sub + b] != here)
                        || (a + 1 < sub && inside[(a + 1) * sub + b] != here)
                        || (b > 0 && inside[a * sub + b - 1] != here)
                        || (b + 1 < sub && inside[a * sub + b + 1] != here);
                    if differs {
                        uncertain += 0.5 * area;
                    }
                }
            }
            // corners disagree but the subcells do not: the boundary crosses
            // the cell between samples
            if inside.iter().all(|&b| b == inside[0]) {
                uncertain += 0.5 * cell_area(s0, s0 + ds, dphi);
            }
            Ok((value, uncertain))
        })
        .collect::<Result<_>>()?;
    let (value, error) = cells.iter().fold((0.0, 0.0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
    Ok(Estimate { value, error })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AphaCell {
    pub z: DiskPoint,
    pub radius: f64,
    pub image_area: f64,
    pub error: f64,
    pub disk_area: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AphaScanResult {
    pub cells: Vec<AphaCell>,
    /// Smallest ratio over the scan.
    pub c_hat: f64,
}

impl AphaScanResult {
    pub fn worst_cell(&self) -> Option<&AphaCell> {
        self.cells.iter().min_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }
}

/// Ratios `A_h(F(B_h(z, R)))/A_h(B_h(z, R))` over a grid of centers and
/// radii `R > 1`.
pub fn apha_scan(
    f: &BlaschkeProduct,
    centers: &[DiskPoint],
    radii: &[f64],
    opts: &RasterOptions,
) -> Result<AphaScanResult> {
    if let Some(r) = radii.iter().find(|&&r| !(r > 1.0)) {
        return Err(Error::InvalidArgument(format!("scan radius {r} must exceed 1")));
    }
    apha_scan_unrestricted(f, centers, radii, opts)
}

/// As [`apha_scan`] but accepting any positive radius.
pub fn apha_scan_unrestricted(
    f: &BlaschkeProduct,
    centers: &[DiskPoint],
    radii: &[f64],
    opts: &RasterOptions,
) -> Result<AphaScanResult> {
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::InvalidArgument("scan grid is empty".into()));
    }
    let mut cells = Vec::with_capacity(centers.len() * radii.len());
    for &z in centers {
        for &radius in radii {
            let est = image_area(f, z, radius, opts)?;
            let disk_area = hyperbolic_disk_area(radius);
            cells.push(AphaCell {
                z,
                radius,
                image_area: est.value,
                error: est.error,
                disk_area,
                ratio: est.value / disk_area,
            });
        }
    }
    let c_hat = cells.iter().map(|c| c.ratio).fold(f64::INFINITY, f64::min);
    Ok(AphaScanResult { cells, c_hat })
}

/// Number of rays used by [`containment_radius`].
pub const CONTAINMENT_RAYS: usize = 512;

/// Step of the outward march along each ray.
pub const CONTAINMENT_STEP: f64 = 0.02;

/// Bisection tolerance for the exit radius along a ray.
pub const CONTAINMENT_TOL: f64 = 1e-4;

/// Largest `r` such that every sampled point of `B_h(F(z), r)` has a
/// preimage in `B_h(z, R)`.
///
/// Each of [`CONTAINMENT_RAYS`] rays from `F(z)` is marched outward to its
/// first point outside the image, which is then located by bisection.
pub fn containment_radius(f: &BlaschkeProduct, z: DiskPoint, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("radius {radius} must be positive")));
    }
    let v = f.eval_disk(z);
    let exits: Vec<f64> = (0..CONTAINMENT_RAYS)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let phi = TAU * k as f64 / CONTAINMENT_RAYS as f64;
            let inside = |s: f64| has_preimage_in_disk(f, polar_point(v, s, phi), z, radius);
            let mut lo = 0.0;
            let mut hi = None;
            let mut s = CONTAINMENT_STEP;
            // the image lies in B_h(F(z), R), so the march ends by R + step
            while s <= radius + CONTAINMENT_STEP {
                if !inside(s)? {
                    hi = Some(s);
                    break;
                }
                lo = s;
                s += CONTAINMENT_STEP;
            }
            let mut hi = hi.unwrap_or(s);
            while hi - lo > CONTAINMENT_TOL {
                let mid = 0.5 * (lo + hi);
                if inside(mid)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            Ok(0.5 * (lo + hi))
        })
        .collect::<Result<_>>()?;
    Ok(exits.into_iter().fold(f64::INFINITY, f64::min))
}
