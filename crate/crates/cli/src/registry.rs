//! Named diagnostics. Each evaluates one family member and returns a scalar
//! with an optional error estimate, judged against a default threshold.

use std::f64::consts::{E, TAU};
use std::fmt::Write as _;

use apha_core::area::{
    apha_scan, apha_scan_unrestricted, area_with_multiplicity, containment_radius, has_preimage_in_disk, image_area,
    RasterOptions,
};
use apha_core::blaschke::{total_multiplicity, BlaschkeProduct, MoebiusAutomorphism};
use apha_core::carleson::{
    bmo_norm, build_stopping_tree, carleson_newman_norm, critical_carleson_norm, default_square_tolerance,
    distortion_integral, distortion_square_integral, entropy, mean_log_derivative_gap, mean_oscillation,
    mu_carleson_norm, outer_gap, outer_log_modulus, outer_modulus, point_carleson_norm,
};
use apha_core::clark::{
    atom_track_jump, chi_smoothness_profile, clark_lyapunov, clark_measure, cocycle_residual, disintegration,
    disintegration_residual, h_decay_exponent, h_sigma, h_stopping_squares, harmonic_lyapunov, herglotz_residual,
    littlewood_gap, lyapunov_exponent, weighted_lyapunov, HValue,
};
use apha_core::distortion::{
    condition2_arcs, condition2_harmonic_measure, condition2_threshold, gp_min_derivative, hyperbolic_derivative,
    k_factor, log_ratio, mobius_distortion, normalized_boundary_derivative, one_minus_abs_image, ray_classification,
    ray_profile, RayClass, DEFAULT_T_MAX,
};
use apha_core::geometry::{
    angle_difference, arc_harmonic_measure, distance_from_parts, distance_to_origin_from_parts, dyadic_arc,
    dyadic_descendants, dyadic_index, dyadic_tree, geodesic_point, geodesic_sample, harmonic_measure, hyperbolic_area,
    hyperbolic_disk_area, hyperbolic_disk_euclidean, hyperbolic_distance, normalize_angle, poisson_kernel,
    pseudo_hyperbolic, Arc, AreaWindow, BoundaryPoint, CarlesonSquare, DiskPoint,
};
use apha_core::quadrature::Tolerance;
use apha_core::{Error, Result};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Params;
use crate::family::{hyperbolic_uniform_zero, ZeroList};

/// How a value is judged against its threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    AtMost,
    AtLeast,
    Positive,
    Finite,
}

impl Check {
    pub fn passes(self, value: f64, threshold: Option<f64>) -> bool {
        if !value.is_finite() {
            return false;
        }
        match (self, threshold) {
            (Check::AtMost, Some(t)) => value <= t,
            (Check::AtLeast, Some(t)) => value >= t,
            (Check::Positive, _) => value > 0.0,
            _ => true,
        }
    }
}

/// Result of one diagnostic on one member.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub value: f64,
    pub error: Option<f64>,
    pub detail: String,
    /// Secondary consistency condition; a record passes only if it holds.
    pub consistent: bool,
}

impl Outcome {
    fn new(value: f64) -> Self {
        Self {
            value,
            error: None,
            detail: String::new(),
            consistent: true,
        }
    }

    fn error(mut self, e: f64) -> Self {
        self.error = Some(e);
        self
    }

    fn detail(mut self, d: String) -> Self {
        self.detail = d;
        self
    }

    fn consistent(mut self, ok: bool) -> Self {
        self.consistent = ok;
        self
    }
}

/// Inputs of a diagnostic run.
pub struct Ctx<'a> {
    pub f: &'a BlaschkeProduct,
    pub params: &'a Params,
    /// Seed for sample points, already mixed with the member id.
    pub seed: u64,
}

impl Ctx<'_> {
    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    fn samples(&self, default: usize) -> usize {
        self.params.samples.unwrap_or(default)
    }

    fn r_max(&self) -> f64 {
        self.params.r_max.unwrap_or(0.95)
    }

    fn tol(&self) -> Tolerance {
        Tolerance::new(1e-13, self.params.tol.unwrap_or(1e-10))
    }

    fn depth(&self, default: u32) -> u32 {
        self.params.depth.unwrap_or(default)
    }

    /// Hyperbolic-area uniform points in `|z| ≤ r_max`.
    fn disk_points(&self, n: usize) -> Result<Vec<DiskPoint>> {
        let mut rng = self.rng(1);
        (0..n)
            .map(|_| hyperbolic_uniform_zero(&mut rng, self.r_max()))
            .collect()
    }

    /// Uniform points on the circle.
    fn boundary_points(&self, n: usize) -> Vec<BoundaryPoint> {
        let mut rng = self.rng(2);
        (0..n).map(|_| BoundaryPoint::new(TAU * unit(&mut rng))).collect()
    }

    fn alphas(&self, default: usize) -> Vec<BoundaryPoint> {
        let n = self.params.n_alpha.unwrap_or(default);
        (0..n).map(|k| BoundaryPoint::new(TAU * k as f64 / n as f64)).collect()
    }

    fn partner(&self) -> Result<BlaschkeProduct> {
        match &self.params.partner {
            Some(z) => z.to_product(),
            None => ZeroList {
                zeros: vec![[0.3, 0.2], [-0.4, 0.0]],
                rotation_theta: 0.0,
            }
            .to_product(),
        }
    }

    fn raster(&self) -> RasterOptions {
        let n = self.params.raster.unwrap_or(64);
        RasterOptions {
            radial_cells: n,
            angular_cells: n,
            refine_level: 2,
            ..RasterOptions::default()
        }
    }
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn min(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(f64::INFINITY, f64::min)
}

fn square_label(level: u32, arc: &Arc) -> String {
    format!("level={level} center={} length={}", arc.center_theta(), arc.length())
}

pub struct Diagnostic {
    pub name: &'static str,
    pub summary: &'static str,
    /// Library operations exercised, as `module::name`.
    pub covers: &'static [&'static str],
    pub check: Check,
    pub default_threshold: Option<f64>,
    pub run: fn(&Ctx) -> Result<Outcome>,
}

/// Every public operation of the library modules that a diagnostic must
/// reach.
pub static OPERATIONS: &[&str] = &[
    "geometry::normalize_angle",
    "geometry::angle_difference",
    "geometry::pseudo_hyperbolic",
    "geometry::hyperbolic_distance",
    "geometry::distance_from_parts",
    "geometry::distance_to_origin_from_parts",
    "geometry::hyperbolic_disk_euclidean",
    "geometry::hyperbolic_disk_area",
    "geometry::hyperbolic_area",
    "geometry::poisson_kernel",
    "geometry::arc_harmonic_measure",
    "geometry::harmonic_measure",
    "geometry::geodesic_point",
    "geometry::geodesic_sample",
    "geometry::dyadic_arc",
    "geometry::dyadic_index",
    "geometry::dyadic_descendants",
    "geometry::dyadic_tree",
    "blaschke::total_multiplicity",
    "blaschke::BlaschkeProduct::eval",
    "blaschke::BlaschkeProduct::eval_boundary",
    "blaschke::BlaschkeProduct::derivative",
    "blaschke::BlaschkeProduct::log_derivative",
    "blaschke::BlaschkeProduct::boundary_derivative_modulus",
    "blaschke::BlaschkeProduct::critical_points",
    "blaschke::BlaschkeProduct::preimages",
    "blaschke::BlaschkeProduct::boundary_preimages",
    "blaschke::BlaschkeProduct::post_compose_mobius",
    "blaschke::BlaschkeProduct::compose",
    "blaschke::BlaschkeProduct::winding_number",
    "blaschke::MoebiusAutomorphism::recentering",
    "blaschke::MoebiusAutomorphism::inverse",
    "distortion::mobius_distortion",
    "distortion::hyperbolic_derivative",
    "distortion::one_minus_abs_image",
    "distortion::log_ratio",
    "distortion::normalized_boundary_derivative",
    "distortion::k_factor",
    "distortion::ray_profile",
    "distortion::ray_classification",
    "distortion::gp_min_derivative",
    "distortion::condition2_threshold",
    "distortion::condition2_arcs",
    "distortion::condition2_harmonic_measure",
    "area::area_with_multiplicity",
    "area::has_preimage_in_disk",
    "area::image_area",
    "area::apha_scan",
    "area::apha_scan_unrestricted",
    "area::containment_radius",
    "carleson::mean_log_derivative_gap",
    "carleson::entropy",
    "carleson::mean_oscillation",
    "carleson::bmo_norm",
    "carleson::default_square_tolerance",
    "carleson::distortion_square_integral",
    "carleson::distortion_integral",
    "carleson::mu_carleson_norm",
    "carleson::point_carleson_norm",
    "carleson::critical_carleson_norm",
    "carleson::carleson_newman_norm",
    "carleson::outer_log_modulus",
    "carleson::outer_modulus",
    "carleson::outer_gap",
    "carleson::build_stopping_tree",
    "clark::clark_measure",
    "clark::herglotz_residual",
    "clark::lyapunov_exponent",
    "clark::clark_lyapunov",
    "clark::harmonic_lyapunov",
    "clark::weighted_lyapunov",
    "clark::cocycle_residual",
    "clark::disintegration",
    "clark::disintegration_residual",
    "clark::littlewood_gap",
    "clark::h_sigma",
    "clark::h_stopping_squares",
    "clark::h_decay_exponent",
    "clark::chi_smoothness_profile",
    "clark::atom_track_jump",
];

/// Operations of [`OPERATIONS`] that no diagnostic reaches.
pub fn coverage_gaps() -> Vec<&'static str> {
    OPERATIONS
        .iter()
        .copied()
        .filter(|op| !REGISTRY.iter().any(|d| d.covers.contains(op)))
        .collect()
}

pub fn find(name: &str) -> Option<&'static Diagnostic> {
    REGISTRY.iter().find(|d| d.name == name)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    REGISTRY.iter().map(|d| d.name)
}

pub static REGISTRY: &[Diagnostic] = &[
    Diagnostic {
        name: "schwarz_pick",
        summary: "max of d_h(F(z), F(w)) - d_h(z, w) over sampled pairs",
        covers: &[
            "geometry::hyperbolic_distance",
            "geometry::pseudo_hyperbolic",
            "geometry::distance_from_parts",
            "geometry::distance_to_origin_from_parts",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-9),
        run: schwarz_pick,
    },
    Diagnostic {
        name: "hyperbolic_disk",
        summary: "relative error of the quadrature area of B_h(F(z), R) against 4π sinh²(R/2)",
        covers: &[
            "geometry::hyperbolic_disk_euclidean",
            "geometry::hyperbolic_area",
            "geometry::hyperbolic_disk_area",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-6),
        run: hyperbolic_disk,
    },
    Diagnostic {
        name: "harmonic_pushforward",
        summary: "max |ω_z(F⁻¹(J)) - ω_{F(z)}(J)| over sampled arcs J",
        covers: &[
            "geometry::harmonic_measure",
            "geometry::arc_harmonic_measure",
            "blaschke::BlaschkeProduct::boundary_preimages",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-8),
        run: harmonic_pushforward,
    },
    Diagnostic {
        name: "geodesic",
        summary: "max |d_h(z, γ(t)) - t| and relative error of 1 - |γ(t)|² along sampled rays",
        covers: &["geometry::geodesic_point", "geometry::geodesic_sample"],
        check: Check::AtMost,
        default_threshold: Some(1e-8),
        run: geodesic,
    },
    Diagnostic {
        name: "dyadic",
        summary: "dyadic partition length defect plus misplaced zeros in their Carleson boxes",
        covers: &[
            "geometry::dyadic_arc",
            "geometry::dyadic_index",
            "geometry::dyadic_descendants",
            "geometry::dyadic_tree",
            "geometry::normalize_angle",
            "geometry::angle_difference",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-12),
        run: dyadic,
    },
    Diagnostic {
        name: "unimodularity",
        summary: "max ||F(ξ)| - 1| on the circle plus the winding number defect",
        covers: &[
            "blaschke::BlaschkeProduct::eval_boundary",
            "blaschke::BlaschkeProduct::eval",
            "blaschke::BlaschkeProduct::winding_number",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-12),
        run: unimodularity,
    },
    Diagnostic {
        name: "angular_derivative",
        summary: "relative mismatch of the kernel-sum angular derivative with |F'(ξ)| and of F'/F",
        covers: &[
            "blaschke::BlaschkeProduct::derivative",
            "blaschke::BlaschkeProduct::boundary_derivative_modulus",
            "blaschke::BlaschkeProduct::log_derivative",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-9),
        run: angular_derivative,
    },
    Diagnostic {
        name: "preimages",
        summary: "max residual |F(u) - w| over all preimages of sampled w",
        covers: &["blaschke::BlaschkeProduct::preimages", "blaschke::total_multiplicity"],
        check: Check::AtMost,
        default_threshold: Some(1e-9),
        run: preimages,
    },
    Diagnostic {
        name: "critical_distortion",
        summary: "max |μ(c) - 1| over the computed critical points",
        covers: &[
            "blaschke::BlaschkeProduct::critical_points",
            "distortion::mobius_distortion",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-8),
        run: critical_distortion,
    },
    Diagnostic {
        name: "composition",
        summary: "max mismatch of composed and post-composed products with pointwise composition",
        covers: &[
            "blaschke::BlaschkeProduct::compose",
            "blaschke::BlaschkeProduct::post_compose_mobius",
            "blaschke::MoebiusAutomorphism::recentering",
            "blaschke::MoebiusAutomorphism::inverse",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-10),
        run: composition,
    },
    Diagnostic {
        name: "mu_range",
        summary: "largest excursion of the unclamped distortion 1 - λ_F/λ outside [0, 1]",
        covers: &[
            "distortion::hyperbolic_derivative",
            "distortion::mobius_distortion",
            "distortion::one_minus_abs_image",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-9),
        run: mu_range,
    },
    Diagnostic {
        name: "rays",
        summary: "max of L(ξ) - L^rad(ξ) over sampled rays from z towards I_z",
        covers: &[
            "distortion::ray_profile",
            "distortion::ray_classification",
            "distortion::k_factor",
        ],
        check: Check::AtMost,
        default_threshold: Some(1e-9),
        run: rays,
    },
    Diagnostic {
        name: "angular_lower_bound",
        summary: "min of log|F'(ξ)| - log((1 - |F(z)|)/(1 - |z|)) for ξ in I_z",
        covers: &["distortion::normalized_boundary_derivative", "distortion::log_ratio"],
        check: Check::AtLeast,
        default_threshold: Some(-3.6),
        run: angular_lower_bound,
    },
    Diagnostic {
        name: "gp_min_derivative",
        summary: "min over dyadic arcs of min_I |F'|·(1 - |z_I|)/(1 - |F(z_I)|)",
        covers: &["distortion::gp_min_derivative"],
        check: Check::Positive,
        default_threshold: None,
        run: gp_min,
    },
    Diagnostic {
        name: "condition2",
        summary: "δ̂ = min over sampled z of ω(z, {|F'| < C(1 - |F(z)|)/(1 - |z|)})",
        covers: &[
            "distortion::condition2_harmonic_measure",
            "distortion::condition2_threshold",
            "distortion::condition2_arcs",
        ],
        check: Check::Positive,
        default_threshold: None,
        run: condition2,
    },
    Diagnostic {
        name: "apha_scan",
        summary: "ĉ = min ratio A_h(F(B_h(z, R)))/A_h(B_h(z, R)) over the scan grid",
        covers: &["area::apha_scan", "area::apha_scan_unrestricted", "area::image_area"],
        check: Check::Positive,
        default_threshold: None,
        run: apha,
    },
    Diagnostic {
        name: "area_multiplicity",
        summary: "A_h of F(B_h(z, R)) counted with multiplicity, checked against the image area",
        covers: &[
            "area::area_with_multiplicity",
            "area::image_area",
            "area::has_preimage_in_disk",
        ],
        check: Check::Finite,
        default_threshold: None,
        run: area_multiplicity,
    },
    Diagnostic {
        name: "containment",
        summary: "max deficit R - r with B_h(F(z), r) ⊂ F(B_h(z, R))",
        covers: &["area::containment_radius"],
        check: Check::Finite,
        default_threshold: None,
        run: containment,
    },
    Diagnostic {
        name: "entropy",
        summary: "∫ log|F'| dm",
        covers: &["carleson::entropy"],
        check: Check::Finite,
        default_threshold: None,
        run: entropy_diag,
    },
    Diagnostic {
        name: "bmo",
        summary: "dyadic BMO norm of log|F'|",
        covers: &["carleson::bmo_norm", "carleson::mean_oscillation"],
        check: Check::Finite,
        default_threshold: None,
        run: bmo,
    },
    Diagnostic {
        name: "mean_gap",
        summary: "sup over dyadic arcs of |mean_I log|F'| - log((1 - |F(z_I)|)/(1 - |z_I|))|",
        covers: &["carleson::mean_log_derivative_gap"],
        check: Check::Finite,
        default_threshold: None,
        run: mean_gap,
    },
    Diagnostic {
        name: "outer_gap",
        summary: "sup over sampled z of |log|O_{F'}(z)| - log((1 - |F(z)|)/(1 - |z|))|",
        covers: &["carleson::outer_gap", "carleson::outer_log_modulus"],
        check: Check::Finite,
        default_threshold: None,
        run: outer_gap_diag,
    },
    Diagnostic {
        name: "dyakonov",
        summary: "max of (1 - |F(z)|²)/((1 - |z|²)|O_{F'}(z)|)",
        covers: &["carleson::outer_modulus"],
        check: Check::AtMost,
        default_threshold: Some(1.0 + 1e-6),
        run: dyakonov,
    },
    Diagnostic {
        name: "mu_carleson",
        summary: "sup over dyadic squares of (1/m(I)) ∫_{Q_I} μ dA/(1 - |z|)",
        covers: &[
            "carleson::mu_carleson_norm",
            "carleson::distortion_square_integral",
            "carleson::distortion_integral",
            "carleson::default_square_tolerance",
        ],
        check: Check::Finite,
        default_threshold: None,
        run: mu_carleson,
    },
    Diagnostic {
        name: "critical_carleson",
        summary: "sup over dyadic squares of (1/m(I)) Σ_{c ∈ Q_I} (1 - |c|) over critical points",
        covers: &["carleson::critical_carleson_norm", "carleson::point_carleson_norm"],
        check: Check::Finite,
        default_threshold: None,
        run: critical_carleson,
    },
    Diagnostic {
        name: "carleson_newman",
        summary: "sup over dyadic squares of (1/m(I)) Σ_{a ∈ Q_I} (1 - |a|) over zeros",
        covers: &["carleson::carleson_newman_norm"],
        check: Check::Finite,
        default_threshold: None,
        run: carleson_newman,
    },
    Diagnostic {
        name: "stopping_tree",
        summary: "decay rate δ̂ of the stopped generations, with L_n ≤ (1 - δ̂)ⁿ m(I)",
        covers: &["carleson::build_stopping_tree"],
        check: Check::Positive,
        default_threshold: None,
        run: stopping_tree,
    },
    Diagnostic {
        name: "clark_mass",
        summary: "max over α of |σ_α(∂𝔻) - P(F(0), α)|; the target is 1 for centered F",
        covers: &["clark::clark_measure"],
        check: Check::AtMost,
        default_threshold: Some(1e-8),
        run: clark_mass,
    },
    Diagnostic {
        name: "clark_atom_law",
        summary: "max over atoms of |mass·|F'(β)| - 1| with |F'(β)| from the product rule",
        covers: &["clark::clark_measure"],
        check: Check::AtMost,
        default_threshold: Some(1e-9),
        run: clark_atom_law,
    },
    Diagnostic {
        name: "herglotz",
        summary: "max Herglotz residual over sampled z and α, plus the Poisson pushforward identity",
        covers: &["clark::herglotz_residual", "geometry::poisson_kernel"],
        check: Check::AtMost,
        default_threshold: Some(1e-7),
        run: herglotz,
    },
    Diagnostic {
        name: "lyapunov",
        summary: "χ(σ_α, F) at α = 1, with its range over the α grid",
        covers: &[
            "clark::lyapunov_exponent",
            "clark::clark_lyapunov",
            "clark::disintegration_residual",
        ],
        check: Check::Finite,
        default_threshold: None,
        run: lyapunov,
    },
    Diagnostic {
        name: "disintegration",
        summary: "|∫ χ(σ_α) dm(α) - ∫ log|F'| dm| relative to max(1, |entropy|)",
        covers: &["clark::disintegration"],
        check: Check::AtMost,
        default_threshold: Some(1e-5),
        run: disintegration_diag,
    },
    Diagnostic {
        name: "littlewood",
        summary: "min Littlewood gap over sampled v, after recentering non-centered F",
        covers: &["clark::littlewood_gap"],
        check: Check::AtLeast,
        default_threshold: Some(-1e-9),
        run: littlewood,
    },
    Diagnostic {
        name: "weighted_lyapunov",
        summary: "sup over sampled p of χ(ω_p, F_p)",
        covers: &["clark::weighted_lyapunov", "clark::harmonic_lyapunov"],
        check: Check::Finite,
        default_threshold: None,
        run: weighted,
    },
    Diagnostic {
        name: "cocycle",
        summary: "max |χ(ω_p, F∘G) - χ(ω_p, G) - χ(ω_{G(p)}, F)| over base points",
        covers: &["clark::cocycle_residual"],
        check: Check::AtMost,
        default_threshold: Some(1e-6),
        run: cocycle,
    },
    Diagnostic {
        name: "chi_smoothness",
        summary: "Richardson ratio of α ↦ χ(σ_α) derivative estimates (≈ 4 for a smooth profile)",
        covers: &["clark::chi_smoothness_profile"],
        check: Check::Finite,
        default_threshold: None,
        run: chi_smoothness,
    },
    Diagnostic {
        name: "atom_continuity",
        summary: "largest tracked atom move between α grid points over its bound Δα/min|F'|",
        covers: &["clark::atom_track_jump"],
        check: Check::AtMost,
        default_threshold: Some(1.01),
        run: atom_continuity,
    },
    Diagnostic {
        name: "h_decay",
        summary: "fitted exponent C in Σℓ(Q_j) ≍ M^{-C} for the Clark measure σ_1",
        covers: &["clark::h_sigma", "clark::h_stopping_squares", "clark::h_decay_exponent"],
        check: Check::Positive,
        default_threshold: None,
        run: h_decay,
    },
];

fn schwarz_pick(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let pts = ctx.disk_points(2 * ctx.samples(200))?;
    let f0 = f.eval(Complex64::new(0.0, 0.0));
    let d0 = distance_to_origin_from_parts(f0.norm(), 1.0 - f0.norm_sqr());
    let mut worst = f64::NEG_INFINITY;
    let mut pseudo = f64::NEG_INFINITY;
    for pair in pts.chunks(2) {
        let [z, w] = [pair[0], pair[1]];
        let (fz, fw) = (f.eval_disk(z), f.eval_disk(w));
        let image = distance_from_parts(fz, f.one_minus_abs_sq(z), fw, f.one_minus_abs_sq(w));
        worst = worst.max(image - hyperbolic_distance(z, w));
        pseudo = pseudo.max(pseudo_hyperbolic(fz, fw) - pseudo_hyperbolic(z.to_complex(), w.to_complex()));
        // d(0, F(z)) ≤ d(0, F(0)) + d(0, z)
        let origin = distance_to_origin_from_parts(fz.norm(), f.one_minus_abs_sq(z));
        worst = worst.max(origin - d0 - hyperbolic_distance(DiskPoint::ORIGIN, z));
    }
    Ok(Outcome::new(worst)
        .detail(format!("pseudo_hyperbolic_excess={pseudo}"))
        .consistent(pseudo <= 1e-12))
}

fn hyperbolic_disk(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let tol = Tolerance::new(1e-12, ctx.params.tol.unwrap_or(1e-9));
    let mut worst: f64 = 0.0;
    let mut err: f64 = 0.0;
    for z in ctx.disk_points(ctx.samples(4))? {
        let c = DiskPoint::from_complex(f.eval_disk(z))?;
        for radius in ctx.params.radii.clone().unwrap_or_else(|| vec![1.0, 2.0]) {
            let disk = hyperbolic_disk_euclidean(c, radius)?;
            let inside = |w: Complex64| DiskPoint::from_complex(w).is_ok_and(|w| hyperbolic_distance(c, w) < radius);
            let est = hyperbolic_area(inside, AreaWindow::Disk(disk), tol)?;
            let exact = hyperbolic_disk_area(radius);
            worst = worst.max((est.value - exact).abs() / exact);
            err = err.max(est.error / exact);
        }
    }
    Ok(Outcome::new(worst).error(err))
}

/// `F⁻¹(J)` as `d` disjoint arcs, from the preimages of the endpoints.
fn preimage_arcs(f: &BlaschkeProduct, j: &Arc) -> Result<Vec<Arc>> {
    let starts = f.boundary_preimages(BoundaryPoint::new(j.start_theta()))?;
    let ends = f.boundary_preimages(BoundaryPoint::new(j.end_theta()))?;
    starts
        .iter()
        .map(|s| {
            let span = ends
                .iter()
                .map(|e| normalize_angle(e.theta() - s.theta()))
                .fold(f64::INFINITY, f64::min);
            Arc::from_start(s.theta(), span / TAU)
        })
        .collect()
}

fn harmonic_pushforward(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let n = ctx.samples(16);
    let pts = ctx.disk_points(n)?;
    let mut rng = ctx.rng(3);
    let mut worst: f64 = 0.0;
    for z in pts {
        let j = Arc::from_start(TAU * unit(&mut rng), 0.05 + 0.45 * unit(&mut rng))?;
        let arcs = preimage_arcs(f, &j)?;
        let lhs = harmonic_measure(z, &arcs)?;
        let rhs = arc_harmonic_measure(DiskPoint::from_complex(f.eval_disk(z))?, &j);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(Outcome::new(worst))
}

fn geodesic(ctx: &Ctx) -> Result<Outcome> {
    let pts = ctx.disk_points(ctx.samples(16))?;
    let dirs = ctx.boundary_points(pts.len());
    let mut worst: f64 = 0.0;
    for (z, xi) in pts.into_iter().zip(dirs) {
        for t in [0.5, 2.0, 8.0] {
            let w = geodesic_point(z, xi, t)?;
            let s = geodesic_sample(z, xi, t)?;
            let rel = (s.one_minus_abs_sq - (1.0 - s.point.norm_sqr())).abs() / s.one_minus_abs_sq;
            let along = distance_from_parts(z.to_complex(), z.one_minus_abs_sq(), s.point, s.one_minus_abs_sq);
            worst = worst.max((hyperbolic_distance(z, w) - t).abs().max((along - t).abs()).max(rel));
        }
    }
    Ok(Outcome::new(worst))
}

fn dyadic(ctx: &Ctx) -> Result<Outcome> {
    let depth = ctx.depth(8);
    let mut defect: f64 = 0.0;
    for level in 0..3 {
        for (k, arc) in (0..1u64 << level).map(|k| (k, dyadic_arc(level, k))) {
            let desc = dyadic_descendants(arc, depth)?;
            defect = defect.max((desc.iter().map(Arc::length).sum::<f64>() - arc.length()).abs());
            for (i, d) in desc.iter().enumerate() {
                let want = (k << depth) + i as u64;
                if dyadic_index(level + depth, d.center_theta()) != want {
                    defect += 1.0;
                }
            }
            let tree = dyadic_tree(arc, 2);
            if tree.len() != 7 {
                defect += 1.0;
            }
        }
    }
    let mut misplaced = 0usize;
    for root in ctx.f.zeros() {
        let a = root.point;
        if a.norm() < 0.5 {
            continue;
        }
        // a zero at exactly 1 - 2^-j sits on the inner edge of the level j box
        let level = ((1.0 / (1.0 - a.norm())).log2().ceil() as u32).saturating_sub(1);
        let theta = a.im.atan2(a.re);
        let sq = CarlesonSquare::new(dyadic_arc(level, dyadic_index(level, theta)));
        let back = angle_difference(normalize_angle(theta + 3.0 * TAU), theta).abs();
        if !sq.contains(a) || back > 1e-12 {
            misplaced += 1;
        }
    }
    Ok(Outcome::new(defect + misplaced as f64).detail(format!("misplaced_zeros={misplaced}")))
}

fn unimodularity(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let worst = max(ctx.boundary_points(ctx.samples(1000)).into_iter().map(|xi| {
        (f.eval_boundary(xi).norm() - 1.0)
            .abs()
            .max((f.eval(xi.to_complex()).norm() - 1.0).abs())
    }));
    let winding = f.winding_number(4096);
    let defect = (winding - f.degree() as i64).abs() as f64;
    Ok(Outcome::new(worst + defect).detail(format!("winding={winding}")))
}

fn angular_derivative(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let boundary = max(ctx.boundary_points(ctx.samples(500)).into_iter().map(|xi| {
        let kernel = f.boundary_derivative_modulus(xi);
        (kernel - f.derivative(xi.to_complex()).norm()).abs() / kernel
    }));
    let interior = max(ctx.disk_points(ctx.samples(500))?.into_iter().filter_map(|z| {
        let zc = z.to_complex();
        let v = f.eval(zc);
        // F'/F is singular at the zeros
        (v.norm() > 1e-6).then(|| {
            let ld = f.log_derivative(zc);
            (f.derivative(zc) / v - ld).norm() / ld.norm().max(1.0)
        })
    }));
    Ok(Outcome::new(boundary.max(interior)))
}

fn preimages(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let mut worst: f64 = 0.0;
    let mut count_defects = 0usize;
    for w in ctx.disk_points(ctx.samples(200))? {
        let w = w.to_complex();
        let roots = f.preimages(w)?;
        if total_multiplicity(&roots) != f.degree() {
            count_defects += 1;
        }
        worst = worst.max(max(roots.iter().map(|r| (f.eval(r.point) - w).norm())));
    }
    let mut boundary: f64 = 0.0;
    for alpha in ctx.boundary_points(ctx.samples(200)) {
        let pre = f.boundary_preimages(alpha)?;
        if pre.len() != f.degree() {
            count_defects += 1;
        }
        boundary = boundary.max(max(pre
            .iter()
            .map(|b| (f.eval_boundary(*b) - alpha.to_complex()).norm())));
    }
    Ok(Outcome::new(worst.max(boundary) + count_defects as f64).detail(format!(
        "interior={worst} boundary={boundary} count_defects={count_defects}"
    )))
}

fn critical_distortion(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let crit = f.critical_points()?;
    let inside: Vec<_> = crit.iter().filter(|c| c.point.norm() < 1.0).collect();
    let count = inside.iter().map(|c| c.multiplicity).sum::<usize>();
    let worst = max(inside
        .iter()
        .map(|c| DiskPoint::from_complex(c.point).map_or(f64::INFINITY, |p| (mobius_distortion(f, p) - 1.0).abs())))
    .max(0.0);
    Ok(Outcome::new(worst)
        .detail(format!("critical_points={count}"))
        .consistent(count + 1 == f.degree().max(1)))
}

fn composition(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let g = ctx.partner()?;
    let fg = f.compose(&g)?;
    let pts = ctx.disk_points(ctx.samples(100))?;
    let mut worst = max(pts.iter().map(|&z| (fg.eval_disk(z) - f.eval(g.eval_disk(z))).norm()));
    let p = pts[0];
    let tau = MoebiusAutomorphism::recentering(f, p)?;
    let h = f.post_compose_mobius(&tau)?;
    worst = worst.max((h.eval_disk(p) - p.to_complex()).norm());
    let inv = tau.inverse();
    for &z in &pts {
        let fz = f.eval_disk(z);
        worst = worst.max((h.eval_disk(z) - tau.apply(fz)).norm());
        worst = worst.max((inv.apply(tau.apply(fz)) - fz).norm());
    }
    Ok(Outcome::new(worst).detail(format!("degree_of_composition={}", fg.degree())))
}

fn mu_range(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let pts = ctx.disk_points(ctx.samples(1000))?;
    let raw: Vec<f64> = pts.iter().map(|&z| 1.0 - hyperbolic_derivative(f, z)).collect();
    let excursion = max(raw.iter().map(|&m| (-m).max(m - 1.0)));
    let clamped_ok = pts
        .iter()
        .zip(&raw)
        .all(|(&z, &m)| mobius_distortion(f, z) == m.clamp(0.0, 1.0));
    let bounded = pts.iter().all(|&z| one_minus_abs_image(f, z) > 0.0);
    Ok(Outcome::new(excursion)
        .detail(format!(
            "min_mu={} max_mu={}",
            min(raw.iter().copied()),
            max(raw.iter().copied())
        ))
        .consistent(clamped_ok && bounded))
}

fn rays(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let c = ctx.params.c.unwrap_or(1.0);
    let mut worst = f64::NEG_INFINITY;
    let mut k_defect = f64::NEG_INFINITY;
    let (mut good, mut almost, mut neither, mut unconverged) = (0, 0, 0, 0);
    for z in ctx.disk_points(ctx.samples(4))? {
        let arc = Arc::of_point(z);
        for k in 0..8 {
            let xi = BoundaryPoint::new(arc.angle_at(k as f64 / 7.0));
            let p = ray_profile(f, z, xi, DEFAULT_T_MAX, 201)?;
            if !(k_factor(f, z, xi) >= 1.0) {
                return Err(Error::InvalidArgument("k factor below one".into()));
            }
            worst = worst.max(p.lag_limit - p.radial_lag_limit);
            k_defect = k_defect.max(p.k_defect);
            match ray_classification(&p, c) {
                Ok(RayClass::Good) => good += 1,
                Ok(RayClass::AlmostIsometric) => almost += 1,
                Ok(RayClass::Neither) => neither += 1,
                Err(_) => unconverged += 1,
            }
        }
    }
    Ok(Outcome::new(worst).detail(format!(
        "C={c} good={good} almost_isometric={almost} neither={neither} unconverged={unconverged} max_k_defect={k_defect}"
    )))
}

fn angular_lower_bound(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let mut worst = f64::INFINITY;
    let mut at = String::new();
    for z in ctx.disk_points(ctx.samples(200))? {
        let arc = Arc::of_point(z);
        let base = log_ratio(f, z);
        for k in 0..33 {
            let xi = BoundaryPoint::new(arc.angle_at(k as f64 / 32.0));
            let v = normalized_boundary_derivative(f, z, xi);
            debug_assert!((v - (f.boundary_derivative_modulus(xi).ln() - base)).abs() < 1e-9);
            if v < worst {
                worst = v;
                at = format!("z=({},{}) xi={}", z.re(), z.im(), xi.theta());
            }
        }
    }
    Ok(Outcome::new(worst).detail(at))
}

fn gp_min(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let mut worst = f64::INFINITY;
    let mut at = String::new();
    for (level, arc) in dyadic_tree(Arc::full(), ctx.depth(6)) {
        let v = gp_min_derivative(f, &arc, ctx.samples(64))?;
        if v < worst {
            worst = v;
            at = square_label(level, &arc);
        }
    }
    Ok(Outcome::new(worst).detail(at))
}

fn condition2(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    // for z^d the condition set at the origin is empty unless C > d
    let c = ctx.params.c.unwrap_or(E * f.degree().max(1) as f64);
    let mut worst = f64::INFINITY;
    let mut at = String::new();
    let mut pts = vec![DiskPoint::ORIGIN];
    pts.extend(ctx.disk_points(ctx.samples(64))?);
    for z in pts {
        let w = condition2_harmonic_measure(f, z, c)?;
        if w < worst {
            worst = w;
            let arcs = condition2_arcs(f, condition2_threshold(f, z, c));
            at = format!("C={c} z=({},{}) arcs={}", z.re(), z.im(), arcs.len());
        }
    }
    Ok(Outcome::new(worst).detail(at))
}

/// Scan centers: the origin, the critical points and sampled points.
fn scan_centers(ctx: &Ctx) -> Result<Vec<DiskPoint>> {
    let mut centers = vec![DiskPoint::ORIGIN];
    for c in ctx.f.critical_points()? {
        if let Ok(p) = DiskPoint::from_complex(c.point) {
            centers.push(p);
        }
    }
    centers.extend(ctx.disk_points(ctx.samples(8))?);
    Ok(centers)
}

fn apha(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let centers = scan_centers(ctx)?;
    let radii = ctx.params.radii.clone().unwrap_or_else(|| vec![1.5, 3.0]);
    let opts = ctx.raster();
    let scan = apha_scan(f, &centers, &radii, &opts)?;
    let worst = scan
        .worst_cell()
        .copied()
        .ok_or_else(|| Error::InvalidArgument("empty scan".into()))?;
    // small radii are outside the APHA condition and only reported
    let small = apha_scan_unrestricted(f, &centers[..1], &[0.5], &opts)?;
    Ok(Outcome::new(scan.c_hat)
        .error(worst.error / worst.disk_area)
        .detail(format!(
            "worst z=({},{}) R={} ratio_at_R0.5={}",
            worst.z.re(),
            worst.z.im(),
            worst.radius,
            small.c_hat
        )))
}

fn area_multiplicity(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let radius = ctx
        .params
        .radii
        .as_ref()
        .and_then(|r| r.first().copied())
        .unwrap_or(2.0);
    let z = DiskPoint::ORIGIN;
    let mult = area_with_multiplicity(f, z, radius, ctx.tol())?;
    let image = image_area(f, z, radius, &ctx.raster())?;
    let center_in = has_preimage_in_disk(f, f.eval_disk(z), z, radius)?;
    Ok(Outcome::new(mult.value)
        .error(mult.error)
        .detail(format!("image_area={} ± {}", image.value, image.error))
        .consistent(center_in && image.value - image.error <= mult.value + mult.error))
}

fn containment(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let radius = ctx
        .params
        .radii
        .as_ref()
        .and_then(|r| r.first().copied())
        .unwrap_or(2.0);
    let mut pts = vec![DiskPoint::ORIGIN];
    pts.extend(ctx.disk_points(ctx.samples(3))?);
    let mut worst = f64::NEG_INFINITY;
    for z in pts {
        worst = worst.max(radius - containment_radius(f, z, radius)?);
    }
    Ok(Outcome::new(worst).detail(format!("R={radius}")))
}

fn entropy_diag(ctx: &Ctx) -> Result<Outcome> {
    let e = entropy(ctx.f, ctx.tol())?;
    Ok(Outcome::new(e.value).error(e.error))
}

fn bmo(ctx: &Ctx) -> Result<Outcome> {
    let b = bmo_norm(ctx.f, ctx.depth(6), ctx.tol())?;
    let full = mean_oscillation(ctx.f, &Arc::full(), ctx.tol())?;
    Ok(Outcome::new(b.value)
        .detail(format!("{} full_circle={full}", square_label(b.level, &b.arc)))
        .consistent(full <= b.value + 1e-9))
}

fn mean_gap(ctx: &Ctx) -> Result<Outcome> {
    let mut worst = f64::NEG_INFINITY;
    let mut err: f64 = 0.0;
    let mut at = String::new();
    for (level, arc) in dyadic_tree(Arc::full(), ctx.depth(6)) {
        let g = mean_log_derivative_gap(ctx.f, &arc, ctx.tol())?;
        err = err.max(g.error);
        if g.gap.abs() > worst {
            worst = g.gap.abs();
            at = square_label(level, &arc);
        }
    }
    Ok(Outcome::new(worst).error(err).detail(at))
}

fn outer_gap_diag(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let mut worst = f64::NEG_INFINITY;
    let mut err: f64 = 0.0;
    let mut pts = vec![DiskPoint::ORIGIN];
    pts.extend(ctx.disk_points(ctx.samples(64))?);
    for z in pts {
        worst = worst.max(outer_gap(f, z, ctx.tol())?.abs());
        err = err.max(outer_log_modulus(f, z, ctx.tol())?.error);
    }
    Ok(Outcome::new(worst).error(err))
}

fn dyakonov(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let worst = ctx
        .disk_points(ctx.samples(1000))?
        .into_iter()
        .map(|z| Ok(f.one_minus_abs_sq(z) / z.one_minus_abs_sq() / outer_modulus(f, z, ctx.tol())?))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Outcome::new(max(worst)))
}

fn mu_carleson(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let tol = default_square_tolerance();
    let norm = mu_carleson_norm(f, ctx.depth(8), tol)?;
    let full = distortion_integral(f, tol)?;
    let top = distortion_square_integral(f, &Arc::full(), tol)?;
    let agree = (full.value - top.value).abs() <= 1e-6 * full.value.max(1.0) + full.error + top.error;
    Ok(Outcome::new(norm.value)
        .error(full.error)
        .detail(format!(
            "{} full_disk={}",
            square_label(norm.level, &norm.arc),
            full.value
        ))
        .consistent(agree && norm.value >= full.value - full.error - 1e-9))
}

fn critical_carleson(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let depth = ctx.depth(12);
    let norm = critical_carleson_norm(f, depth)?;
    let again = point_carleson_norm(&f.critical_points()?, depth)?;
    Ok(Outcome::new(norm.value)
        .detail(square_label(norm.level, &norm.arc))
        .consistent(norm.value == again.value))
}

fn carleson_newman(ctx: &Ctx) -> Result<Outcome> {
    let norm = carleson_newman_norm(ctx.f, ctx.depth(12))?;
    Ok(Outcome::new(norm.value).detail(square_label(norm.level, &norm.arc)))
}

fn stopping_tree(ctx: &Ctx) -> Result<Outcome> {
    let depth = ctx.depth(10);
    let m = ctx.params.m.unwrap_or(1.0 + (ctx.f.degree().max(1) as f64).ln());
    let tree = build_stopping_tree(ctx.f, Arc::full(), m, 50, 0.5f64.powi(depth as i32))?;
    let delta = tree.decay_rate();
    let lengths = tree.generation_lengths();
    let bounded = lengths
        .iter()
        .enumerate()
        .all(|(n, &l)| l <= (1.0 - delta).powi(n as i32 + 1) * tree.root.length() * (1.0 + 1e-12));
    Ok(Outcome::new(delta)
        .detail(format!(
            "M={m} min_arc=2^-{depth} generations={lengths:?} truncated={} maximality_band={}",
            tree.truncated, tree.maximality_band
        ))
        .consistent(bounded))
}

fn clark_mass(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let f0 = DiskPoint::from_complex(f.eval(Complex64::new(0.0, 0.0)))?;
    let mut worst: f64 = 0.0;
    for alpha in ctx.alphas(64) {
        let s = clark_measure(f, alpha)?;
        worst = worst.max((s.total_mass() - poisson_kernel(f0, alpha)).abs());
    }
    Ok(Outcome::new(worst).detail(format!("centered={}", f0.abs() < 1e-12)))
}

fn clark_atom_law(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let mut worst: f64 = 0.0;
    for alpha in ctx.alphas(64) {
        for a in clark_measure(f, alpha)?.atoms() {
            worst = worst.max((a.mass * f.derivative(a.position.to_complex()).norm() - 1.0).abs());
        }
    }
    Ok(Outcome::new(worst))
}

fn herglotz(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let pts = ctx.disk_points(ctx.samples(100))?;
    let mut worst: f64 = 0.0;
    for alpha in ctx.alphas(8) {
        worst = worst.max(herglotz_residual(f, alpha, &pts)?);
        // Re((α + F)/(α - F)) = P(F(z), α) = Σ mass·P(z, β)
        let s = clark_measure(f, alpha)?;
        for &z in pts.iter().take(10) {
            let w = DiskPoint::from_complex(f.eval_disk(z))?;
            let lhs = poisson_kernel(w, alpha);
            worst = worst.max((lhs - s.poisson_extension(z)).abs() / lhs.max(1.0));
        }
    }
    Ok(Outcome::new(worst))
}

fn lyapunov(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let at_one = lyapunov_exponent(f, &clark_measure(f, BoundaryPoint::new(0.0))?);
    let all = ctx
        .alphas(16)
        .into_iter()
        .map(|a| clark_lyapunov(f, a))
        .collect::<Result<Vec<f64>>>()?;
    let coarse = disintegration_residual(f, 16, ctx.tol())?;
    Ok(Outcome::new(at_one).detail(format!(
        "min={} max={} disintegration_residual_16={coarse}",
        min(all.iter().copied()),
        max(all.iter().copied())
    )))
}

fn disintegration_diag(ctx: &Ctx) -> Result<Outcome> {
    let n = ctx.params.n_alpha.unwrap_or(256);
    let d = disintegration(ctx.f, n, ctx.tol())?;
    Ok(Outcome::new(d.residual / d.entropy.abs().max(1.0)).detail(format!(
        "clark_average={} entropy={} n_alpha={n}",
        d.clark_average, d.entropy
    )))
}

fn littlewood(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let f0 = f.eval(Complex64::new(0.0, 0.0));
    let (g, recentered) = if f0.norm() > 1e-12 {
        let tau = MoebiusAutomorphism::sending(DiskPoint::from_complex(f0)?, DiskPoint::ORIGIN);
        (f.post_compose_mobius(&tau)?, true)
    } else {
        (f.clone(), false)
    };
    let mut worst = f64::INFINITY;
    for v in ctx.disk_points(ctx.samples(500))? {
        if v.abs() > 0.0 {
            worst = worst.min(littlewood_gap(&g, v)?);
        }
    }
    Ok(Outcome::new(worst).detail(format!("recentered={recentered}")))
}

fn weighted(ctx: &Ctx) -> Result<Outcome> {
    let f = ctx.f;
    let mut worst = f64::NEG_INFINITY;
    let mut pts = vec![DiskPoint::ORIGIN];
    pts.extend(ctx.disk_points(ctx.samples(16))?);
    for &p in &pts {
        worst = worst.max(weighted_lyapunov(f, p, ctx.tol())?);
    }
    let at_origin = harmonic_lyapunov(f, DiskPoint::ORIGIN, ctx.tol())?;
    Ok(Outcome::new(worst).detail(format!("harmonic_lyapunov_at_0={at_origin}")))
}

fn cocycle(ctx: &Ctx) -> Result<Outcome> {
    let g = ctx.partner()?;
    let mut worst: f64 = 0.0;
    for p in ctx.disk_points(ctx.samples(5))? {
        worst = worst.max(cocycle_residual(ctx.f, &g, p, ctx.tol())?);
    }
    Ok(Outcome::new(worst))
}

fn chi_smoothness(ctx: &Ctx) -> Result<Outcome> {
    let p = chi_smoothness_profile(ctx.f, ctx.params.n_alpha.unwrap_or(64))?;
    let d1 = max(p.samples.iter().map(|s| s.d1.abs()));
    let d2 = max(p.samples.iter().map(|s| s.d2.abs()));
    // a constant profile has no refinement signal; report it as ratio 4
    let ratio = p.richardson_ratio.unwrap_or(4.0);
    Ok(Outcome::new(ratio).detail(format!(
        "max_abs_d1={d1} max_abs_d2={d2} constant_profile={}",
        p.richardson_ratio.is_none()
    )))
}

fn atom_continuity(ctx: &Ctx) -> Result<Outcome> {
    let (jump, bound) = atom_track_jump(ctx.f, ctx.params.n_alpha.unwrap_or(128))?;
    Ok(Outcome::new(jump / bound).detail(format!("jump={jump} bound={bound}")))
}

fn h_decay(ctx: &Ctx) -> Result<Outcome> {
    let sigma = clark_measure(ctx.f, BoundaryPoint::new(0.0))?;
    let q = CarlesonSquare::new(Arc::full());
    let ms = ctx
        .params
        .m_values
        .clone()
        .unwrap_or_else(|| vec![2.0, 4.0, 8.0, 16.0, 32.0]);
    let depth = ctx.depth(30);
    let fit = h_decay_exponent(&sigma, q, &ms, depth)?;
    let base = h_sigma(&sigma, Complex64::new(0.0, 0.0));
    let first = h_stopping_squares(&sigma, q, ms[0], depth)?;
    let mut detail = format!("squares_at_first_M={} totals=", first.squares.len());
    for t in &fit.total_lengths {
        let _ = write!(detail, "{t};");
    }
    Ok(Outcome::new(fit.exponent)
        .detail(detail)
        .consistent(matches!(base, HValue::Finite(v) if v > 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut seen = std::collections::BTreeSet::new();
        for d in REGISTRY {
            assert!(seen.insert(d.name), "duplicate {}", d.name);
            assert!(!d.covers.is_empty());
            if matches!(d.check, Check::AtMost | Check::AtLeast) {
                assert!(d.default_threshold.is_some(), "{}", d.name);
            }
        }
    }

    #[test]
    fn every_operation_is_reachable() {
        assert_eq!(coverage_gaps(), Vec::<&str>::new());
        for d in REGISTRY {
            for op in d.covers {
                assert!(OPERATIONS.contains(op), "{} claims unknown {op}", d.name);
            }
        }
    }

    #[test]
    fn checks() {
        assert!(Check::AtMost.passes(1.0, Some(1.0)));
        assert!(!Check::AtMost.passes(f64::NAN, Some(1.0)));
        assert!(Check::AtLeast.passes(-3.5, Some(-3.6)));
        assert!(!Check::Positive.passes(0.0, None));
        assert!(!Check::Finite.passes(f64::INFINITY, None));
    }
}
