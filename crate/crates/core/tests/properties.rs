//! Cross-module identities checked on random products.

use apha_core::blaschke::{BlaschkeProduct, MoebiusAutomorphism};
use apha_core::carleson::entropy;
use apha_core::clark::{clark_measure, disintegration};
use apha_core::distortion::hyperbolic_derivative;
use apha_core::geometry::{hyperbolic_distance, poisson_kernel, BoundaryPoint, DiskPoint};
use apha_core::quadrature::Tolerance;
use proptest::prelude::*;

fn point(r_max: f64) -> impl Strategy<Value = DiskPoint> {
    (0.0..r_max, 0.0..std::f64::consts::TAU).prop_map(|(r, t)| DiskPoint::from_polar(r, t).unwrap())
}

fn product(max_degree: usize) -> impl Strategy<Value = BlaschkeProduct> {
    (
        prop::collection::vec(point(0.9), 1..=max_degree),
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(zeros, theta)| BlaschkeProduct::new(&zeros, theta).unwrap())
}

fn centered(max_degree: usize) -> impl Strategy<Value = BlaschkeProduct> {
    prop::collection::vec(point(0.9), 0..max_degree).prop_map(|mut zeros| {
        zeros.push(DiskPoint::ORIGIN);
        BlaschkeProduct::new(&zeros, 0.0).unwrap()
    })
}

fn tol() -> Tolerance {
    Tolerance::new(1e-13, 1e-11)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schwarz_pick(f in product(5), z in point(0.95), w in point(0.95)) {
        let image = hyperbolic_distance(
            DiskPoint::from_complex(f.eval_disk(z)).unwrap(),
            DiskPoint::from_complex(f.eval_disk(w)).unwrap(),
        );
        prop_assert!(image <= hyperbolic_distance(z, w) + 1e-9);
    }

    #[test]
    fn distortion_is_invariant_under_automorphisms(f in product(4), a in point(0.8), phi in 0.0..6.0f64, z in point(0.9)) {
        let tau = MoebiusAutomorphism::new(a, phi);
        let g = f.post_compose_mobius(&tau).unwrap();
        let (x, y) = (hyperbolic_derivative(&f, z), hyperbolic_derivative(&g, z));
        prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0), "{x} vs {y}");
    }

    /// With G(0) = 0 the Lebesgue measure is G-invariant, so entropy is
    /// additive under composition.
    #[test]
    fn entropy_adds_under_centered_composition(f in product(3), g in centered(3)) {
        let fg = f.compose(&g).unwrap();
        let sum = entropy(&f, tol()).unwrap().value + entropy(&g, tol()).unwrap().value;
        let whole = entropy(&fg, tol()).unwrap().value;
        prop_assert!((whole - sum).abs() <= 1e-8 * sum.abs().max(1.0), "{whole} vs {sum}");
    }

    /// The Poisson extension of the Clark measure is P(F(z), α).
    #[test]
    fn clark_poisson_extension(f in product(5), z in point(0.9), t in 0.0..std::f64::consts::TAU) {
        let alpha = BoundaryPoint::new(t);
        let sigma = clark_measure(&f, alpha).unwrap();
        let want = poisson_kernel(DiskPoint::from_complex(f.eval_disk(z)).unwrap(), alpha);
        prop_assert!((sigma.poisson_extension(z) - want).abs() <= 1e-8 * want.max(1.0));
        prop_assert_eq!(sigma.atoms().len(), f.degree());
    }
}

#[test]
fn disintegration_matches_entropy_for_compositions() {
    let f = BlaschkeProduct::new(
        &[DiskPoint::new(0.3, -0.4).unwrap(), DiskPoint::real(0.6).unwrap()],
        0.5,
    )
    .unwrap();
    let g = BlaschkeProduct::new(&[DiskPoint::ORIGIN, DiskPoint::new(-0.2, 0.7).unwrap()], 0.0).unwrap();
    let fg = f.compose(&g).unwrap();
    let d = disintegration(&fg, 256, tol()).unwrap();
    assert_eq!(fg.degree(), 4);
    assert!(d.residual < 1e-8 * d.entropy.abs().max(1.0), "{d:?}");
}
