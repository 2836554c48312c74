//! Hyperbolic geometry of the unit disk.
//!
//! Points of the disk carry the hyperbolic metric `2|dz| / (1 - |z|²)`.
//! Boundary arcs are measured with the normalized arclength `m`, so the whole
//! circle has measure one; angles in radians only appear in
//! [`BoundaryPoint`] and in the arc endpoints.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Estimate, Rect, Tolerance};

/// Points closer than this to the unit circle are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

/// Area integrands are set to zero beyond this radius.
pub const AREA_CLIP_RADIUS: f64 = 1.0 - 1e-9;

/// A point of the open unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    re: f64,
    im: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Result<Self> {
        let r = re.hypot(im);
        if !(r <= 1.0 - BOUNDARY_MARGIN) {
            return Err(Error::PointOutsideDisk { re, im });
        }
        Ok(Self { re, im })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    /// Real point `x` on the diameter.
    pub fn real(x: f64) -> Result<Self> {
        Self::new(x, 0.0)
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    /// `1 - |z|²`, evaluated as `(1 - |z|)(1 + |z|)`.
    pub fn one_minus_abs_sq(&self) -> f64 {
        let r = self.abs();
        (1.0 - r) * (1.0 + r)
    }

    pub fn arg(&self) -> f64 {
        self.im.atan2(self.re)
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.to_complex()
    }
}

/// A point `e^{iθ}` of the unit circle with `θ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    theta: f64,
}

impl BoundaryPoint {
    pub fn new(theta: f64) -> Self {
        Self {
            theta: normalize_angle(theta),
        }
    }

    /// Boundary point in the direction of a nonzero complex number.
    pub fn from_direction(w: Complex64) -> Self {
        Self::new(w.im.atan2(w.re))
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Signed angular difference `a - b` reduced to `(-π, π]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// An arc of the unit circle given by its center angle and normalized length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    center_theta: f64,
    length: f64,
}

impl Arc {
    pub fn new(center_theta: f64, length: f64) -> Result<Self> {
        if !(length > 0.0 && length <= 1.0) {
            return Err(Error::InvalidArc(format!("length {length} outside (0, 1]")));
        }
        Ok(Self {
            center_theta: normalize_angle(center_theta),
            length,
        })
    }

    /// The whole circle, seen as the dyadic root `[0, 2π)`.
    pub fn full() -> Self {
        Self {
            center_theta: PI,
            length: 1.0,
        }
    }

    /// Arc `[start, start + 2π·length)`.
    pub fn from_start(start_theta: f64, length: f64) -> Result<Self> {
        Self::new(start_theta + PI * length, length)
    }

    /// The arc `I_z` centered at `z/|z|` with `m(I_z) = 1 - |z|`; the whole
    /// circle when `z = 0`.
    pub fn of_point(z: DiskPoint) -> Self {
        if z.abs() == 0.0 {
            return Self::full();
        }
        Self {
            center_theta: normalize_angle(z.arg()),
            length: 1.0 - z.abs(),
        }
    }

    /// The arc `K·I_z`, capped at the whole circle.
    pub fn scaled_of_point(z: DiskPoint, k: f64) -> Self {
        let base = Self::of_point(z);
        Self {
            center_theta: base.center_theta,
            length: (k * base.length).min(1.0),
        }
    }

    pub fn center_theta(&self) -> f64 {
        self.center_theta
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn center(&self) -> BoundaryPoint {
        BoundaryPoint::new(self.center_theta)
    }

    /// Half of the angular width, in radians.
    pub fn half_width(&self) -> f64 {
        PI * self.length
    }

    /// Start angle; may be negative or exceed `2π` by less than one turn.
    pub fn start_theta(&self) -> f64 {
        self.center_theta - self.half_width()
    }

    pub fn end_theta(&self) -> f64 {
        self.center_theta + self.half_width()
    }

    pub fn is_full(&self) -> bool {
        self.length >= 1.0
    }

    /// Whether the closed arc contains the angle `theta`.
    pub fn contains_angle(&self, theta: f64) -> bool {
        self.is_full() || angle_difference(theta, self.center_theta).abs() <= self.half_width()
    }

    /// Half-open membership `θ ∈ [start, end)`, so that dyadic siblings
    /// partition their parent. Angles within `1e-12` of the start count as
    /// inside.
    pub fn contains_angle_half_open(&self, theta: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let mut offset = (theta - self.start_theta()).rem_euclid(TAU);
        if offset > TAU - 1e-12 {
            offset = 0.0;
        }
        offset < TAU * self.length - 1e-12
    }

    /// `z_I = (1 - m(I))·ξ` with `ξ` the center of the arc.
    pub fn top_point(&self) -> DiskPoint {
        let r = 1.0 - self.length;
        DiskPoint {
            re: r * self.center_theta.cos(),
            im: r * self.center_theta.sin(),
        }
    }

    /// The two dyadic halves, in counterclockwise order.
    pub fn children(&self) -> [Arc; 2] {
        let quarter = 0.5 * self.half_width();
        let length = 0.5 * self.length;
        [
            Arc {
                center_theta: normalize_angle(self.center_theta - quarter),
                length,
            },
            Arc {
                center_theta: normalize_angle(self.center_theta + quarter),
                length,
            },
        ]
    }

    /// Angle of `t ∈ [0, 1]` along the arc, from start to end.
    pub fn angle_at(&self, t: f64) -> f64 {
        self.start_theta() + t * TAU * self.length
    }

    fn overlaps(&self, other: &Arc) -> bool {
        if self.is_full() || other.is_full() {
            return true;
        }
        let gap = angle_difference(self.center_theta, other.center_theta).abs();
        gap < self.half_width() + other.half_width() - 1e-14
    }
}

/// A Carleson square `Q_I = {z : z/|z| ∈ I, 1 - m(I) < |z| < 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSquare {
    base: Arc,
}

impl CarlesonSquare {
    pub fn new(base: Arc) -> Self {
        Self { base }
    }

    pub fn base(&self) -> Arc {
        self.base
    }

    /// `ℓ(Q) = m(I)`.
    pub fn side_length(&self) -> f64 {
        self.base.length
    }

    /// `z_Q = z_I`.
    pub fn top_point(&self) -> DiskPoint {
        self.base.top_point()
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r > 1.0 - self.base.length && r < 1.0 && self.base.contains_angle_half_open(z.im.atan2(z.re))
    }

    pub fn children(&self) -> [CarlesonSquare; 2] {
        let [a, b] = self.base.children();
        [CarlesonSquare::new(a), CarlesonSquare::new(b)]
    }
}

/// Pseudo-hyperbolic distance `|z - w| / |1 - z̄w|`.
pub fn pseudo_hyperbolic(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm() / (Complex64::new(1.0, 0.0) - z.conj() * w).norm()
}

/// Hyperbolic distance for the metric `2|dz|/(1 - |z|²)`.
///
/// Uses `1 - ρ² = (1 - |z|²)(1 - |w|²)/|1 - z̄w|²`, so points near the
/// circle keep full relative accuracy in `1 - ρ`.
pub fn hyperbolic_distance(z: DiskPoint, w: DiskPoint) -> f64 {
    distance_from_parts(
        z.to_complex(),
        z.one_minus_abs_sq(),
        w.to_complex(),
        w.one_minus_abs_sq(),
    )
}

/// Hyperbolic distance when `1 - |z|²` and `1 - |w|²` are known separately.
pub fn distance_from_parts(z: Complex64, z_defect: f64, w: Complex64, w_defect: f64) -> f64 {
    let denom = (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    let rho = (z - w).norm() / denom;
    let one_minus_rho_sq = z_defect * w_defect / (denom * denom);
    ((1.0 + rho) * (1.0 + rho) / one_minus_rho_sq).ln()
}

/// `d_h(0, w)` given `|w|` and `1 - |w|²`.
pub fn distance_to_origin_from_parts(abs_w: f64, w_defect: f64) -> f64 {
    ((1.0 + abs_w) * (1.0 + abs_w) / w_defect).ln()
}

/// A Euclidean disk inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EuclideanDisk {
    pub center: DiskPoint,
    pub radius: f64,
}

/// Euclidean center and radius of the hyperbolic disk `B_h(z, R)`.
pub fn hyperbolic_disk_euclidean(z: DiskPoint, radius: f64) -> Result<EuclideanDisk> {
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "hyperbolic radius {radius} must be positive"
        )));
    }
    let t = (0.5 * radius).tanh();
    let zc = z.to_complex();
    let r2 = zc.norm_sqr();
    let denom = 1.0 - t * t * r2;
    let center = zc * ((1.0 - t * t) / denom);
    Ok(EuclideanDisk {
        center: DiskPoint::from_complex(center)?,
        radius: t * z.one_minus_abs_sq() / denom,
    })
}

/// Closed form `A_h(B_h(z, R)) = 4π sinh²(R/2)`.
pub fn hyperbolic_disk_area(radius: f64) -> f64 {
    let s = (0.5 * radius).sinh();
    4.0 * PI * s * s
}

/// Integration window for [`hyperbolic_area`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AreaWindow {
    Square(CarlesonSquare),
    Disk(EuclideanDisk),
}

/// Hyperbolic area `∫_E 4 dA / (1 - |z|²)²` of the part of `region` inside
/// `window`.
///
/// Disk windows are integrated in polar coordinates about their Euclidean
/// center. Carleson squares use `s = -log(1 - |z|)` radially, with the
/// integrand clipped at [`AREA_CLIP_RADIUS`].
pub fn hyperbolic_area<P>(region: P, window: AreaWindow, tol: Tolerance) -> Result<Estimate>
where
    P: Fn(Complex64) -> bool,
{
    let density = |z: Complex64| -> f64 {
        let r = z.norm();
        if r >= AREA_CLIP_RADIUS || !region(z) {
            return 0.0;
        }
        let d = (1.0 - r) * (1.0 + r);
        4.0 / (d * d)
    };
    match window {
        AreaWindow::Disk(disk) => {
            let c = disk.center.to_complex();
            let f = |rho: f64, phi: f64| rho * density(c + Complex64::from_polar(rho, phi));
            quadrature::integrate_rect(f, Rect::new(0.0, disk.radius, 0.0, TAU), 6, tol)
        }
        AreaWindow::Square(q) => {
            let arc = q.base();
            let s0 = -(arc.length().ln());
            let s1 = -((1.0 - AREA_CLIP_RADIUS).ln());
            let f = |s: f64, theta: f64| {
                let one_minus_r = (-s).exp();
                let r = 1.0 - one_minus_r;
                // dA = r dr dθ with dr = (1 - r) ds
                r * one_minus_r * density(Complex64::from_polar(r, theta))
            };
            quadrature::integrate_rect(f, Rect::new(s0, s1, arc.start_theta(), arc.end_theta()), 6, tol)
        }
    }
}

/// Poisson kernel `(1 - |z|²)/|ξ - z|²`.
pub fn poisson_kernel(z: DiskPoint, xi: BoundaryPoint) -> f64 {
    poisson_kernel_complex(z.to_complex(), xi.to_complex())
}

pub(crate) fn poisson_kernel_complex(z: Complex64, xi: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r) / (xi - z).norm_sqr()
}

/// Cumulative harmonic measure `∫_{φ}^{φ+δ} P(z, e^{iθ}) dθ/2π` of the
/// angular interval starting at `arg z`, for any real `δ`.
fn poisson_primitive(r: f64, delta: f64) -> f64 {
    let turns = (delta / TAU).round();
    let reduced = delta - turns * TAU;
    let q = (1.0 + r) / (1.0 - r);
    turns + (q * (0.5 * reduced).tan()).atan() / PI
}

/// Harmonic measure of one arc seen from `z`, by exact integration of the
/// Poisson kernel.
pub fn arc_harmonic_measure(z: DiskPoint, arc: &Arc) -> f64 {
    if arc.is_full() {
        return 1.0;
    }
    let r = z.abs();
    let phi = if r == 0.0 { 0.0 } else { z.arg() };
    let d0 = angle_difference(arc.start_theta(), phi);
    let d1 = d0 + TAU * arc.length();
    poisson_primitive(r, d1) - poisson_primitive(r, d0)
}

/// Harmonic measure `ω(z, ∪ arcs, 𝔻)` of a finite union of disjoint arcs.
pub fn harmonic_measure(z: DiskPoint, arcs: &[Arc]) -> Result<f64> {
    for (i, a) in arcs.iter().enumerate() {
        for b in &arcs[i + 1..] {
            if a.overlaps(b) {
                return Err(Error::OverlappingArcs(format!("{a:?} and {b:?}")));
            }
        }
    }
    Ok(arcs
        .iter()
        .map(|a| arc_harmonic_measure(z, a))
        .sum::<f64>()
        .clamp(0.0, 1.0))
}

/// The point at hyperbolic distance `t` from `z` on the geodesic ray towards `ξ`.
pub fn geodesic_point(z: DiskPoint, xi: BoundaryPoint, t: f64) -> Result<DiskPoint> {
    let sample = geodesic_sample(z, xi, t)?;
    DiskPoint::from_complex(sample.point)
}

/// A point on a geodesic ray together with `1 - |w|²` computed without
/// cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicSample {
    pub point: Complex64,
    pub one_minus_abs_sq: f64,
}

pub fn geodesic_sample(z: DiskPoint, xi: BoundaryPoint, t: f64) -> Result<GeodesicSample> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("arclength {t} must be nonnegative")));
    }
    let zc = z.to_complex();
    let one = Complex64::new(1.0, 0.0);
    // direction of ξ seen from z, after moving z to the origin
    let eta = {
        let v = (xi.to_complex() - zc) / (one - zc.conj() * xi.to_complex());
        v / v.norm()
    };
    let rho = (0.5 * t).tanh();
    let zeta = eta * rho;
    let denom = one + zc.conj() * zeta;
    let point = (zeta + zc) / denom;
    let sech = 1.0 / (0.5 * t).cosh();
    let one_minus_abs_sq = z.one_minus_abs_sq() * sech * sech / denom.norm_sqr();
    Ok(GeodesicSample {
        point,
        one_minus_abs_sq,
    })
}

/// The dyadic arc `[2πk/2^level, 2π(k+1)/2^level)` of the full circle.
pub fn dyadic_arc(level: u32, index: u64) -> Arc {
    let length = 0.5f64.powi(level as i32);
    Arc {
        center_theta: TAU * length * (index as f64 + 0.5),
        length,
    }
}

/// Index of the level-`level` dyadic arc containing `theta`.
pub fn dyadic_index(level: u32, theta: f64) -> u64 {
    let n = 1u64 << level;
    ((normalize_angle(theta) / TAU * n as f64).floor() as u64).min(n - 1)
}

/// The `2^depth` dyadic descendants of `arc`, in counterclockwise order.
pub fn dyadic_descendants(arc: Arc, depth: u32) -> Result<Vec<Arc>> {
    if depth == 0 {
        return Err(Error::InvalidArgument("dyadic depth must be at least 1".into()));
    }
    let count = 1usize << depth;
    let length = arc.length() / count as f64;
    let start = arc.start_theta();
    Ok((0..count)
        .map(|k| Arc {
            center_theta: normalize_angle(start + TAU * length * (k as f64 + 0.5)),
            length,
        })
        .collect())
}

/// Every dyadic subarc of `arc` from level 0 (the arc itself) to `depth`.
pub fn dyadic_tree(arc: Arc, depth: u32) -> Vec<(u32, Arc)> {
    let mut out = vec![(0, arc)];
    let mut level = vec![arc];
    for d in 1..=depth {
        level = level.iter().flat_map(|a| a.children()).collect();
        out.extend(level.iter().map(|a| (d, *a)));
    }
    out
}
