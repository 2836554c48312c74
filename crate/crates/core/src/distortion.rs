//! Möbius distortion, lag profiles along geodesic rays, and boundary
//! derivative diagnostics.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeProduct;
use crate::error::{Error, Result};
use crate::geometry::{
    angle_difference, distance_from_parts, distance_to_origin_from_parts, geodesic_sample, harmonic_measure, Arc,
    BoundaryPoint, DiskPoint,
};

/// Default length of a ray profile.
pub const DEFAULT_T_MAX: f64 = 20.0;

/// A profile is converged when its last two samples differ by less than this.
pub const CONVERGENCE_STEP: f64 = 1e-4;

/// Boundary samples for the threshold scan of [`condition2_arcs`].
pub const CONDITION2_SAMPLES: usize = 4096;

/// Rounding slack allowed when comparing lag limits with a constant.
pub const CLASSIFICATION_SLACK: f64 = 1e-9;

/// Angular bisection tolerance for threshold crossings.
pub const CONDITION2_ANGLE_TOL: f64 = 1e-8;

/// `μ(z) = 1 - (1 - |z|²)|F'(z)| / (1 - |F(z)|²)`, clamped to `[0, 1]`.
pub fn mobius_distortion(f: &BlaschkeProduct, z: DiskPoint) -> f64 {
    (1.0 - hyperbolic_derivative(f, z)).clamp(0.0, 1.0)
}

/// `λ_F(z)/λ(z) = (1 - |z|²)|F'(z)| / (1 - |F(z)|²)`, unclamped.
pub fn hyperbolic_derivative(f: &BlaschkeProduct, z: DiskPoint) -> f64 {
    z.one_minus_abs_sq() * f.derivative(z.to_complex()).norm() / f.one_minus_abs_sq(z)
}

/// `1 - |F(z)|` without cancellation.
pub fn one_minus_abs_image(f: &BlaschkeProduct, z: DiskPoint) -> f64 {
    f.one_minus_abs_sq(z) / (1.0 + f.eval_disk(z).norm())
}

/// `log((1 - |F(z)|)/(1 - |z|))`.
pub fn log_ratio(f: &BlaschkeProduct, z: DiskPoint) -> f64 {
    one_minus_abs_image(f, z).ln() - (1.0 - z.abs()).ln()
}

/// `log|F'(ξ)| - log((1 - |F(z)|)/(1 - |z|))`.
pub fn normalized_boundary_derivative(f: &BlaschkeProduct, z: DiskPoint, xi: BoundaryPoint) -> f64 {
    f.boundary_derivative_modulus(xi).ln() - log_ratio(f, z)
}

/// Smallest `k ≥ 1` with `w ∈ k·I_v` where `v = F(z)`; `1` when `F(z) = 0`.
pub fn k_factor(f: &BlaschkeProduct, z: DiskPoint, xi: BoundaryPoint) -> f64 {
    let v = f.eval_disk(z);
    if v.norm() == 0.0 {
        return 1.0;
    }
    let w = f.eval_boundary(xi);
    let delta = angle_difference(w.im.atan2(w.re), v.im.atan2(v.re)).abs() / TAU;
    (2.0 * delta / one_minus_abs_image(f, z)).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySample {
    pub t: f64,
    pub lag: f64,
    pub radial_lag: f64,
}

/// Lag and radial lag along the geodesic ray `[z, ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayProfile {
    pub base: DiskPoint,
    pub target: BoundaryPoint,
    pub samples: Vec<RaySample>,
    pub lag_limit: f64,
    pub radial_lag_limit: f64,
    pub k_factor: f64,
    pub converged: bool,
    /// `log|F'(ξ)| - log((1 - |F(z)|)/(1 - |z|)) - L^rad(ξ)`.
    pub derivative_defect: f64,
    /// `L^rad(ξ) - L(ξ) - 2 log k`.
    pub k_defect: f64,
}

/// Samples `L(t) = t - d_h(F(z), F(γ(t)))` and
/// `L^rad(t) = t - (d_h(0, F(γ(t))) - d_h(0, F(z)))` on a uniform grid
/// `t ∈ [0, t_max]`.
pub fn ray_profile(
    f: &BlaschkeProduct,
    z: DiskPoint,
    xi: BoundaryPoint,
    t_max: f64,
    n_samples: usize,
) -> Result<RayProfile> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} must be positive")));
    }
    if n_samples < 2 {
        return Err(Error::InvalidArgument(
            "a ray profile needs at least two samples".into(),
        ));
    }
    let fz = f.eval_disk(z);
    let fz_defect = f.one_minus_abs_sq(z);
    let base_dist = distance_to_origin_from_parts(fz.norm(), fz_defect);
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = t_max * k as f64 / (n_samples - 1) as f64;
        let g = geodesic_sample(z, xi, t)?;
        let fw = f.eval(g.point);
        let fw_defect = f.one_minus_abs_sq_from(g.point, g.one_minus_abs_sq);
        let image_dist = if t == 0.0 {
            0.0
        } else {
            distance_from_parts(fz, fz_defect, fw, fw_defect)
        };
        samples.push(RaySample {
            t,
            lag: t - image_dist,
            radial_lag: t - (distance_to_origin_from_parts(fw.norm(), fw_defect) - base_dist),
        });
    }
    let lag_limit = samples.iter().map(|s| s.lag).fold(f64::NEG_INFINITY, f64::max);
    let radial_lag_limit = samples.iter().map(|s| s.radial_lag).fold(f64::NEG_INFINITY, f64::max);
    let [.., prev, last] = samples[..] else { unreachable!() };
    let converged =
        (last.lag - prev.lag).abs() < CONVERGENCE_STEP && (last.radial_lag - prev.radial_lag).abs() < CONVERGENCE_STEP;
    let k = k_factor(f, z, xi);
    Ok(RayProfile {
        base: z,
        target: xi,
        lag_limit,
        radial_lag_limit,
        k_factor: k,
        converged,
        derivative_defect: normalized_boundary_derivative(f, z, xi) - radial_lag_limit,
        k_defect: radial_lag_limit - lag_limit - 2.0 * k.ln(),
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayClass {
    Good,
    AlmostIsometric,
    Neither,
}

impl RayClass {
    pub fn is_good(self) -> bool {
        self == RayClass::Good
    }

    pub fn is_almost_isometric(self) -> bool {
        self != RayClass::Neither
    }
}

/// A ray is `C`-good when `L^rad(ξ) ≤ C` and `C`-almost isometric when
/// `L(ξ) ≤ C`. Good rays are reported as [`RayClass::Good`] only.
pub fn ray_classification(profile: &RayProfile, c: f64) -> Result<RayClass> {
    if !profile.converged {
        let [.., prev, last] = profile.samples[..] else {
            unreachable!()
        };
        return Err(Error::UnconvergedProfile(
            (last.radial_lag - prev.radial_lag)
                .abs()
                .max((last.lag - prev.lag).abs()),
        ));
    }
    Ok(if profile.radial_lag_limit <= c + CLASSIFICATION_SLACK {
        RayClass::Good
    } else if profile.lag_limit <= c + CLASSIFICATION_SLACK {
        RayClass::AlmostIsometric
    } else {
        RayClass::Neither
    })
}

/// `min_{ξ ∈ I} |F'(ξ)|·(1 - |z_I|)/(1 - |F(z_I)|)` over `n_samples`
/// equally spaced points of `I`, endpoints included.
pub fn gp_min_derivative(f: &BlaschkeProduct, arc: &Arc, n_samples: usize) -> Result<f64> {
    if n_samples < 16 {
        return Err(Error::InvalidArgument(
            "at least 16 boundary samples are required".into(),
        ));
    }
    let z = arc.top_point();
    let scale = arc.length() / one_minus_abs_image(f, z);
    let min = (0..n_samples)
        .map(|k| {
            let theta = arc.angle_at(k as f64 / (n_samples - 1) as f64);
            f.boundary_derivative_modulus(BoundaryPoint::new(theta))
        })
        .fold(f64::INFINITY, f64::min);
    Ok(min * scale)
}

/// The threshold `C(1 - |F(z)|)/(1 - |z|)`.
pub fn condition2_threshold(f: &BlaschkeProduct, z: DiskPoint, c: f64) -> f64 {
    c * one_minus_abs_image(f, z) / (1.0 - z.abs())
}

/// The set `{ξ : |F'(ξ)| < threshold}` as disjoint arcs.
pub fn condition2_arcs(f: &BlaschkeProduct, threshold: f64) -> Vec<Arc> {
    let g = |theta: f64| f.boundary_derivative_at(Complex64::from_polar(1.0, theta)) - threshold;
    let n = CONDITION2_SAMPLES;
    let h = TAU / n as f64;
    let vals: Vec<f64> = (0..n).map(|k| g(k as f64 * h)).collect();
    let below = |v: f64| v < 0.0;
    if vals.iter().all(|&v| below(v)) {
        return vec![Arc::full()];
    }
    if vals.iter().all(|&v| !below(v)) {
        return Vec::new();
    }
    let crossing = |k: usize| -> f64 {
        let (mut a, mut b) = (k as f64 * h, (k + 1) as f64 * h);
        let ga = below(g(a));
        while b - a > CONDITION2_ANGLE_TOL {
            let m = 0.5 * (a + b);
            if below(g(m)) == ga {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    // start the sweep at a sample that is not below, so every arc closes
    let start = vals.iter().position(|&v| !below(v)).unwrap();
    let mut arcs = Vec::new();
    let mut open: Option<f64> = None;
    for step in 0..n {
        let k = (start + step) % n;
        let next = (k + 1) % n;
        if below(vals[k]) != below(vals[next]) {
            let mut x = crossing(k);
            if x < start as f64 * h {
                x += TAU;
            }
            match open.take() {
                None => open = Some(x),
                Some(s) => {
                    if let Ok(arc) = Arc::from_start(s, (x - s) / TAU) {
                        arcs.push(arc);
                    }
                }
            }
        }
    }
    arcs
}

/// `ω(z, {ξ : |F'(ξ)| < C(1 - |F(z)|)/(1 - |z|)}, 𝔻)`.
pub fn condition2_harmonic_measure(f: &BlaschkeProduct, z: DiskPoint, c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!("constant C = {c} must be positive")));
    }
    let arcs = condition2_arcs(f, condition2_threshold(f, z, c));
    harmonic_measure(z, &arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::MoebiusAutomorphism;
    use crate::geometry::{hyperbolic_distance, poisson_kernel};
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn bp(zeros: &[(f64, f64)], theta: f64) -> BlaschkeProduct {
        let pts: Vec<DiskPoint> = zeros.iter().map(|&(x, y)| DiskPoint::new(x, y).unwrap()).collect();
        BlaschkeProduct::new(&pts, theta).unwrap()
    }

    fn pt(x: f64, y: f64) -> DiskPoint {
        DiskPoint::new(x, y).unwrap()
    }

    #[test]
    fn distortion_examples() {
        let m = MoebiusAutomorphism::new(pt(0.3, -0.6), 1.1).to_blaschke();
        assert!(mobius_distortion(&m, pt(0.5, 0.2)) < 1e-12);
        let sq = BlaschkeProduct::monomial(2);
        assert_eq!(mobius_distortion(&sq, DiskPoint::ORIGIN), 1.0);
        assert_relative_eq!(mobius_distortion(&sq, pt(0.5, 0.0)), 0.2, epsilon = 1e-14);
        assert_relative_eq!(mobius_distortion(&sq, pt(0.0, -0.5)), 0.2, epsilon = 1e-14);
    }

    #[test]
    fn identity_profile() {
        let id = BlaschkeProduct::identity();
        // radial rays: ξ = z/|z|, and any ξ from the origin
        let z = pt(0.2, 0.5);
        for (z, xi) in [
            (z, BoundaryPoint::new(z.arg())),
            (DiskPoint::ORIGIN, BoundaryPoint::new(4.0)),
        ] {
            let p = ray_profile(&id, z, xi, DEFAULT_T_MAX, 101).unwrap();
            assert!(p.converged);
            let worst = p
                .samples
                .iter()
                .map(|s| s.lag.abs().max(s.radial_lag.abs()))
                .fold(0.0, f64::max);
            assert!(worst < 1e-6, "{worst} {:?}", p.samples.last());
            assert_relative_eq!(p.k_factor, 1.0);
            assert_eq!(ray_classification(&p, 0.0).unwrap(), RayClass::Good);
        }
        // off the radius the lag still vanishes but the radial lag does not
        let p = ray_profile(&id, z, BoundaryPoint::new(4.0), DEFAULT_T_MAX, 101).unwrap();
        assert!(p.lag_limit.abs() < 1e-6);
        assert!(p.radial_lag_limit > 0.1 && p.k_factor > 1.0);
    }

    #[test]
    fn mobius_profile_is_isometric_not_good() {
        // F(w) = (w + 0.9)/(1 + 0.9w), z = 0, ξ = -1: F(z) = 0.9, F(ξ) = -1
        let f = MoebiusAutomorphism::new(pt(-0.9, 0.0), 0.0).to_blaschke();
        let p = ray_profile(&f, DiskPoint::ORIGIN, BoundaryPoint::new(PI), DEFAULT_T_MAX, 201).unwrap();
        assert!(p.converged);
        assert!(p.samples.iter().all(|s| s.lag.abs() < 1e-6));
        assert_relative_eq!(p.k_factor, 10.0, epsilon = 1e-9);
        // travelling from 0.9 through the origin to -1
        assert_relative_eq!(p.radial_lag_limit, 2.0 * 19f64.ln(), epsilon = 1e-6);
        assert_eq!(ray_classification(&p, 1.0).unwrap(), RayClass::AlmostIsometric);
        assert!(p.k_defect.abs() < 2.0);
    }

    #[test]
    fn monomial_radial_lag() {
        let sq = BlaschkeProduct::monomial(2);
        let z = pt(0.5, 0.0);
        let p = ray_profile(&sq, z, BoundaryPoint::new(0.0), DEFAULT_T_MAX, 201).unwrap();
        assert!(p.converged);
        // along the radius, d_h(0, r²) - d_h(0, 1/4) against d_h(1/2, r) tends to log(10/9)
        assert_relative_eq!(p.radial_lag_limit, (10.0f64 / 9.0).ln(), epsilon = 1e-6);
        let formula = 2f64.ln() - 1.5f64.ln();
        assert_relative_eq!(
            normalized_boundary_derivative(&sq, z, BoundaryPoint::new(0.0)),
            formula,
            epsilon = 1e-12
        );
        assert_relative_eq!(p.derivative_defect, formula - (10.0f64 / 9.0).ln(), epsilon = 1e-6);
    }

    #[test]
    fn classification_requires_convergence() {
        let f = bp(&[(0.5, 0.1), (-0.3, 0.2)], 0.0);
        let p = ray_profile(&f, DiskPoint::ORIGIN, BoundaryPoint::new(1.0), 1.0, 3).unwrap();
        assert!(!p.converged);
        assert!(matches!(ray_classification(&p, 5.0), Err(Error::UnconvergedProfile(_))));
    }

    #[test]
    fn gp_examples() {
        let id = BlaschkeProduct::identity();
        assert_relative_eq!(
            gp_min_derivative(&id, &Arc::new(1.0, 0.2).unwrap(), 64).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let sq = BlaschkeProduct::monomial(2);
        assert_relative_eq!(gp_min_derivative(&sq, &Arc::full(), 64).unwrap(), 2.0, epsilon = 1e-12);
        let f = bp(&[(0.5, 0.0)], 0.0);
        let arc = Arc::new(0.0, 0.5).unwrap();
        let v = gp_min_derivative(&f, &arc, 1025).unwrap();
        // dense oracle: |F'(ξ)| sampled directly on the arc
        let oracle = (0..=100_000)
            .map(|k| {
                let theta = -PI / 2.0 + PI * k as f64 / 100_000.0;
                poisson_kernel(pt(0.5, 0.0), BoundaryPoint::new(theta))
            })
            .fold(f64::INFINITY, f64::min)
            * 0.5;
        assert_relative_eq!(v, oracle, epsilon = 1e-9);
        assert_relative_eq!(v, 0.3, epsilon = 1e-9);
    }

    #[test]
    fn condition2_examples() {
        let id = BlaschkeProduct::identity();
        assert_relative_eq!(condition2_harmonic_measure(&id, pt(0.3, 0.4), 2.0).unwrap(), 1.0);
        let sq = BlaschkeProduct::monomial(2);
        assert_relative_eq!(condition2_harmonic_measure(&sq, DiskPoint::ORIGIN, 3.0).unwrap(), 1.0);
        assert_eq!(condition2_harmonic_measure(&sq, DiskPoint::ORIGIN, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn condition2_against_dense_scan() {
        let f = bp(&[(0.7, 0.1), (-0.2, -0.6), (0.0, 0.5)], 0.3);
        let z = pt(0.1, -0.4);
        for c in [0.5, 1.0, 2.0, 4.0] {
            let threshold = condition2_threshold(&f, z, c);
            let n = 400_000;
            let oracle: f64 = (0..n)
                .map(|k| {
                    let xi = BoundaryPoint::new(TAU * (k as f64 + 0.5) / n as f64);
                    if f.boundary_derivative_modulus(xi) < threshold {
                        poisson_kernel(z, xi)
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
                / n as f64;
            let got = condition2_harmonic_measure(&f, z, c).unwrap();
            assert!((got - oracle).abs() < 1e-4, "C = {c}: {got} vs {oracle}");
        }
    }

    fn arb_product() -> impl Strategy<Value = BlaschkeProduct> {
        (prop::collection::vec((0.0f64..0.9, 0.0f64..TAU), 1..6), 0.0f64..TAU).prop_map(|(zs, theta)| {
            let pts: Vec<DiskPoint> = zs.iter().map(|&(r, t)| DiskPoint::from_polar(r, t).unwrap()).collect();
            BlaschkeProduct::new(&pts, theta).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn lags_monotone(f in arb_product(), r in 0.0f64..0.9, phi in 0.0f64..TAU, t in 0.0f64..TAU) {
            let z = DiskPoint::from_polar(r, phi).unwrap();
            let p = ray_profile(&f, z, BoundaryPoint::new(t), DEFAULT_T_MAX, 161).unwrap();
            for w in p.samples.windows(2) {
                prop_assert!(w[1].lag >= w[0].lag - 1e-9);
                prop_assert!(w[1].radial_lag >= w[0].radial_lag - 1e-9);
            }
            for s in &p.samples {
                prop_assert!(s.radial_lag >= s.lag - 1e-9);
            }
        }

        #[test]
        fn classification_monotone(f in arb_product(), t in 0.0f64..TAU, c1 in 0.0f64..6.0, dc in 0.0f64..3.0) {
            let p = ray_profile(&f, DiskPoint::ORIGIN, BoundaryPoint::new(t), DEFAULT_T_MAX, 161).unwrap();
            prop_assume!(p.converged);
            let a = ray_classification(&p, c1).unwrap();
            let b = ray_classification(&p, c1 + dc).unwrap();
            prop_assert!(!a.is_good() || b.is_good());
            prop_assert!(!a.is_almost_isometric() || b.is_almost_isometric());
        }

        #[test]
        fn geodesic_parametrization(r in 0.0f64..0.95, phi in 0.0f64..TAU, t in 0.0f64..TAU) {
            let z = DiskPoint::from_polar(r, phi).unwrap();
            let w = crate::geometry::geodesic_point(z, BoundaryPoint::new(t), 3.0).unwrap();
            prop_assert!((hyperbolic_distance(z, w) - 3.0).abs() < 1e-9);
        }

        #[test]
        fn distortion_in_unit_interval(f in arb_product(), r in 0.0f64..0.99, phi in 0.0f64..TAU) {
            let z = DiskPoint::from_polar(r, phi).unwrap();
            let raw = 1.0 - hyperbolic_derivative(&f, z);
            prop_assert!((-1e-9..=1.0 + 1e-12).contains(&raw));
        }
    }
}
