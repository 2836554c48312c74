//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line with the
//! measured quantity; run with `--nocapture` to see them all.

use std::f64::consts::{E, PI, TAU};

use apha_cli::config::ExperimentConfig;
use apha_cli::family::{hyperbolic_uniform_zero, FamilySpec, Member};
use apha_cli::report::DiagnosticsReport;
use apha_cli::suite::{default_battery, run_suite};
use apha_core::area::{apha_scan, area_with_multiplicity, containment_radius, RasterOptions};
use apha_core::blaschke::BlaschkeProduct;
use apha_core::carleson::{build_stopping_tree, outer_modulus};
use apha_core::clark::{
    clark_lyapunov, clark_measure, cocycle_residual, disintegration, h_decay_exponent, herglotz_residual,
    littlewood_gap,
};
use apha_core::distortion::hyperbolic_derivative;
use apha_core::geometry::{Arc, BoundaryPoint, CarlesonSquare, DiskPoint};
use apha_core::quadrature::Tolerance;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

fn verdict(n: u32, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {n:>2} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn rng(stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(SEED);
    r.set_stream(stream);
    r
}

fn points(rng: &mut ChaCha8Rng, n: usize, r_max: f64) -> Vec<DiskPoint> {
    (0..n).map(|_| hyperbolic_uniform_zero(rng, r_max).unwrap()).collect()
}

fn random_product(rng: &mut ChaCha8Rng, d: usize, centered: bool) -> BlaschkeProduct {
    let mut zeros = if centered { vec![DiskPoint::ORIGIN] } else { Vec::new() };
    while zeros.len() < d {
        zeros.push(hyperbolic_uniform_zero(rng, 0.9).unwrap());
    }
    let theta = TAU * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
    BlaschkeProduct::new(&zeros, theta).unwrap()
}

fn products(spec: FamilySpec) -> Vec<BlaschkeProduct> {
    spec.generate(SEED)
        .unwrap()
        .into_iter()
        .map(|m: Member| m.product)
        .collect()
}

/// Twenty products of degrees 2 to 6, four of each.
fn twenty(centered: bool) -> Vec<BlaschkeProduct> {
    (2..=6)
        .flat_map(|d| {
            products(FamilySpec::RandomUniform {
                n: 4,
                d,
                r_max: 0.9,
                centered,
                seed: Some(SEED + d as u64),
            })
        })
        .collect()
}

fn alphas(n: usize) -> Vec<BoundaryPoint> {
    (0..n).map(|k| BoundaryPoint::new(TAU * k as f64 / n as f64)).collect()
}

#[test]
fn criterion_01_distortion_range() {
    const UPPER: f64 = 1.0 + 1e-9;
    const ROUNDING: f64 = 1e-12;
    const MOBIUS: f64 = 1e-12;
    const CRITICAL: f64 = 1e-8;
    let mut r = rng(1);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut crit_worst: f64 = 0.0;
    let mut n_crit = 0;
    for k in 0..200 {
        let f = random_product(&mut r, 2 + k % 5, false);
        for z in points(&mut r, 1000, 0.95) {
            let mu = 1.0 - hyperbolic_derivative(&f, z);
            lo = lo.min(mu);
            hi = hi.max(mu);
        }
        for c in f.critical_points().unwrap() {
            if let Ok(p) = DiskPoint::from_complex(c.point) {
                let mu = 1.0 - hyperbolic_derivative(&f, p);
                crit_worst = crit_worst.max((mu - 1.0).abs());
                n_crit += 1;
            }
        }
    }
    let mut mob: f64 = 0.0;
    for _ in 0..50 {
        let f = random_product(&mut r, 1, false);
        for z in points(&mut r, 1000, 0.95) {
            mob = mob.max((1.0 - hyperbolic_derivative(&f, z)).abs());
        }
    }
    verdict(
        1,
        "distortion range",
        lo >= -ROUNDING && hi <= UPPER && mob <= MOBIUS && crit_worst <= CRITICAL && n_crit > 0,
        format!("mu in [{lo:.3e}, {hi:.12}], mobius max |mu| = {mob:.2e}, max |mu - 1| at {n_crit} critical points = {crit_worst:.2e}"),
    );
}

#[test]
fn criterion_02_clark_probability_and_atom_law() {
    const MASS: f64 = 1e-8;
    const ATOM: f64 = 1e-9;
    let mut fams = twenty(true);
    fams.extend(products(FamilySpec::Monomials { d_max: 8 }));
    let (mut mass, mut atom): (f64, f64) = (0.0, 0.0);
    for f in &fams {
        for alpha in alphas(64) {
            let s = clark_measure(f, alpha).unwrap();
            mass = mass.max((s.total_mass() - 1.0).abs());
            assert_eq!(s.atoms().len(), f.degree());
            for a in s.atoms() {
                atom = atom.max((a.mass * f.boundary_derivative_modulus(a.position) - 1.0).abs());
            }
        }
    }
    verdict(
        2,
        "Clark probability and atom law",
        mass < MASS && atom <= ATOM,
        format!(
            "{} centered products x 64 alphas: max |mass - 1| = {mass:.2e}, max |mass |F'| - 1| = {atom:.2e}",
            fams.len()
        ),
    );
}

#[test]
fn criterion_03_herglotz() {
    const TOL: f64 = 1e-7;
    let mut r = rng(3);
    let fams = twenty(false);
    let mut worst: f64 = 0.0;
    for f in &fams {
        let pts = points(&mut r, 100, 0.95);
        for alpha in alphas(8) {
            worst = worst.max(herglotz_residual(f, alpha, &pts).unwrap());
        }
    }
    verdict(
        3,
        "Herglotz identity",
        worst < TOL,
        format!(
            "{} products x 8 alphas x 100 points: max residual = {worst:.2e}",
            fams.len()
        ),
    );
}

#[test]
fn criterion_04_disintegration() {
    const TOL: f64 = 1e-5;
    let fams = twenty(false);
    let mut worst: f64 = 0.0;
    for f in &fams {
        let d = disintegration(f, 256, Tolerance::new(1e-13, 1e-10)).unwrap();
        worst = worst.max(d.residual / d.entropy.abs().max(1.0));
    }
    verdict(
        4,
        "disintegration",
        worst < TOL,
        format!(
            "{} products, 256 alpha nodes: max relative residual = {worst:.2e}",
            fams.len()
        ),
    );
}

#[test]
fn criterion_05_littlewood() {
    const TOL: f64 = 1e-9;
    let mut r = rng(5);
    let mut worst = f64::INFINITY;
    for k in 0..500 {
        let f = random_product(&mut r, 2 + k % 5, true);
        let v = hyperbolic_uniform_zero(&mut r, 0.95).unwrap();
        worst = worst.min(littlewood_gap(&f, v).unwrap());
    }
    let mut mono: f64 = 0.0;
    for d in 1..=8 {
        let f = BlaschkeProduct::monomial(d);
        for v in points(&mut r, 20, 0.95) {
            mono = mono.max(littlewood_gap(&f, v).unwrap().abs());
        }
    }
    verdict(
        5,
        "Littlewood",
        worst >= -TOL && mono <= TOL,
        format!("min gap over 500 trials = {worst:.3e}, max |gap| for monomials = {mono:.2e}"),
    );
}

#[test]
fn criterion_06_dyakonov() {
    const SLACK: f64 = 1e-6;
    let mut r = rng(6);
    let mut fams = twenty(false);
    fams.extend(products(FamilySpec::RadialChain { k: 4 }));
    fams.extend(products(FamilySpec::Cluster {
        n: 3,
        center_theta: 1.0,
        spread: 0.1,
    }));
    let tol = Tolerance::new(1e-13, 1e-10);
    let mut worst: f64 = 0.0;
    for f in &fams {
        for z in points(&mut r, 1000, 0.95) {
            let lhs = f.one_minus_abs_sq(z) / z.one_minus_abs_sq();
            worst = worst.max(lhs / outer_modulus(f, z, tol).unwrap());
        }
    }
    verdict(
        6,
        "Dyakonov",
        worst <= 1.0 + SLACK,
        format!(
            "{} products x 1000 points: max ratio / |O_F'| - 1 = {:.2e}",
            fams.len(),
            worst - 1.0
        ),
    );
}

#[test]
fn criterion_07_angular_lower_bound() {
    const THRESHOLD: f64 = -3.6;
    // Julia's lemma on I_z: ratio ≥ (1 + r)/(2(1 + rπ²)) ≥ 1/(1 + π²)
    let julia = -(1.0 + PI * PI).ln();
    let cfg = ExperimentConfig {
        seed: SEED,
        families: default_battery(),
        diagnostics: vec![apha_cli::config::DiagnosticSpec::named("angular_lower_bound")],
        output: None,
        time_budget_seconds: None,
        record_timing: false,
    };
    let report = run_suite(&cfg).unwrap();
    let worst = report
        .records
        .iter()
        .map(|r| r.value.unwrap())
        .fold(f64::INFINITY, f64::min);
    verdict(
        7,
        "angular derivative lower bound",
        report.all_pass() && worst >= THRESHOLD && worst >= julia - 1e-9,
        format!(
            "{} members: min = {worst:.4}, threshold {THRESHOLD}, Julia bound {julia:.4}",
            report.records.len()
        ),
    );
}

#[test]
fn criterion_08_monomial_closed_forms() {
    const CHI: f64 = 1e-9;
    const RATIO: f64 = 0.367;
    const AREA: f64 = 12.74;
    const PERCENT: f64 = 0.01;
    const DEFICIT: f64 = 0.675;
    const DEFICIT_TOL: f64 = 1e-2;
    let mut chi: f64 = 0.0;
    for d in 1..=8 {
        let f = BlaschkeProduct::monomial(d);
        for alpha in alphas(64) {
            chi = chi.max((clark_lyapunov(&f, alpha).unwrap() - (d as f64).ln()).abs());
        }
    }
    let z2 = BlaschkeProduct::monomial(2);
    let scan = apha_scan(&z2, &[DiskPoint::ORIGIN], &[2.0], &RasterOptions::default()).unwrap();
    let area = area_with_multiplicity(&z2, DiskPoint::ORIGIN, 2.0, Tolerance::default()).unwrap();
    let deficit = 2.0 - containment_radius(&z2, DiskPoint::ORIGIN, 2.0).unwrap();
    let pass = chi <= CHI
        && (scan.c_hat / RATIO - 1.0).abs() <= PERCENT
        && (area.value / AREA - 1.0).abs() <= PERCENT
        && (deficit - DEFICIT).abs() <= DEFICIT_TOL;
    verdict(
        8,
        "monomial closed forms",
        pass,
        format!(
            "max |chi - log d| = {chi:.2e}, ratio = {:.4}, area = {:.4}, deficit = {deficit:.4}",
            scan.c_hat, area.value
        ),
    );
}

#[test]
fn criterion_09_cocycle() {
    const TOL: f64 = 1e-6;
    let mut r = rng(9);
    let tol = Tolerance::new(1e-13, 1e-10);
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let f = random_product(&mut r, 1 + k % 4, false);
        let g = random_product(&mut r, 1 + (k / 4) % 4, false);
        for p in points(&mut r, 5, 0.9) {
            worst = worst.max(cocycle_residual(&f, &g, p, tol).unwrap());
        }
    }
    verdict(
        9,
        "cocycle",
        worst < TOL,
        format!("20 pairs x 5 points: max residual = {worst:.2e}"),
    );
}

#[test]
fn criterion_10_stopping_decay() {
    const M: f64 = 1.0;
    const BAND: f64 = 0.2;
    let mut lines = Vec::new();
    let mut pass = true;
    for f in products(FamilySpec::RadialChain { k: 5 }) {
        let mut deltas = Vec::new();
        for depth in [8, 10] {
            let tree = build_stopping_tree(&f, Arc::full(), M, 50, 0.5f64.powi(depth)).unwrap();
            let delta = tree.decay_rate();
            for (n, l) in tree.generation_lengths().iter().enumerate() {
                pass &= *l <= (1.0 - delta).powi(n as i32 + 1) * (1.0 + 1e-12);
            }
            deltas.push(delta);
        }
        pass &= deltas[0] > 0.0 && deltas[1] > 0.0 && (deltas[0] / deltas[1] - 1.0).abs() <= BAND;
        lines.push(format!("d={}: {:.3}/{:.3}", f.degree(), deltas[0], deltas[1]));
    }
    verdict(
        10,
        "stopping-time decay",
        pass,
        format!("delta at depth 8/10: {}", lines.join(", ")),
    );
}

#[test]
fn criterion_11_h_decay() {
    const WITHIN: f64 = 0.1;
    // four doublings of M in quarter-doubling steps
    let ms: Vec<f64> = (0..=16).map(|k| 2f64.powf(1.0 + k as f64 / 4.0)).collect();
    let q = CarlesonSquare::new(Arc::full());
    let mut fams = products(FamilySpec::RandomUniform {
        n: 4,
        d: 3,
        r_max: 0.9,
        centered: true,
        seed: Some(SEED),
    });
    fams.extend(products(FamilySpec::RadialChain { k: 3 }));
    let mut low = f64::INFINITY;
    for f in &fams {
        let sigma = clark_measure(f, BoundaryPoint::new(0.0)).unwrap();
        low = low.min(h_decay_exponent(&sigma, q, &ms, 30).unwrap().exponent);
    }
    // control: σ_1 of the identity, a unit atom at 1, against its own
    // sixteen-doubling fit
    let atom = clark_measure(&BlaschkeProduct::identity(), BoundaryPoint::new(0.0)).unwrap();
    let long: Vec<f64> = (0..=64).map(|k| 2f64.powf(1.0 + k as f64 / 4.0)).collect();
    let reference = h_decay_exponent(&atom, q, &long, 40).unwrap().exponent;
    let single = h_decay_exponent(&atom, q, &ms, 30).unwrap().exponent;
    verdict(
        11,
        "H power-law decay",
        low > 0.0 && atom.atoms().len() == 1 && (single / reference - 1.0).abs() <= WITHIN,
        format!(
            "min exponent over {} Clark measures = {low:.3}, single atom = {single:.4} against long fit {reference:.4}",
            fams.len()
        ),
    );
}

fn values(report: &DiagnosticsReport, diagnostic: &str) -> Vec<f64> {
    report
        .records
        .iter()
        .filter(|r| r.diagnostic == diagnostic)
        .map(|r| r.value.unwrap_or(f64::NAN))
        .collect()
}

fn monotone(v: &[f64], increasing: bool) -> bool {
    v.windows(2)
        .all(|w| if increasing { w[1] >= w[0] } else { w[1] <= w[0] })
}

#[test]
fn criterion_12_self_consistency() {
    let base = r#"{"seed": 20240601, "families": [{"name": "radial_chain", "k": 6}], "diagnostics": [
        {"name": "apha_scan"}, {"name": "mean_gap"}, {"name": "outer_gap"},
        {"name": "mu_carleson"}, {"name": "critical_carleson"}]}"#;
    let first = run_suite(&ExperimentConfig::from_json(base).unwrap()).unwrap();
    let c_hat = values(&first, "apha_scan");
    // one constant for the whole family, set by its worst area ratio
    let c = E / c_hat.iter().copied().fold(f64::INFINITY, f64::min);
    let cond = format!(
        r#"{{"seed": 20240601, "families": [{{"name": "radial_chain", "k": 6}}],
            "diagnostics": [{{"name": "condition2", "params": {{"c": {c}}}}}]}}"#
    );
    let second = run_suite(&ExperimentConfig::from_json(&cond).unwrap()).unwrap();
    let columns = [
        ("c_hat", c_hat.clone(), false),
        ("delta_hat", values(&second, "condition2"), false),
        ("mean_gap", values(&first, "mean_gap"), true),
        ("outer_gap", values(&first, "outer_gap"), true),
        ("mu_carleson", values(&first, "mu_carleson"), true),
        ("critical_carleson", values(&first, "critical_carleson"), true),
    ];
    println!(
        "member  {}",
        columns.iter().map(|c| format!("{:>18}", c.0)).collect::<String>()
    );
    for j in 0..c_hat.len() {
        println!(
            "{:>6}  {}",
            j + 1,
            columns.iter().map(|c| format!("{:>18.6}", c.1[j])).collect::<String>()
        );
    }
    let finite = columns
        .iter()
        .all(|c| c.1.len() == 6 && c.1.iter().all(|v| v.is_finite()));
    let bad: Vec<&str> = columns.iter().filter(|c| !monotone(&c.1, c.2)).map(|c| c.0).collect();
    verdict(
        12,
        "joint monotone degradation on radial_chain(6)",
        finite && bad.is_empty(),
        format!("C = {c:.3}; finite = {finite}; non-monotone columns: {bad:?}"),
    );
}
