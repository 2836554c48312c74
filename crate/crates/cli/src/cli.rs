//! Argument parsing and dispatch for the `apha` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{ConfigError, DiagnosticSpec, ExperimentConfig, Format};
use crate::registry;
use crate::report::{write_report, DiagnosticsReport};
use crate::suite::{default_battery, run_suite};

#[derive(Debug, Parser)]
#[command(name = "apha", version, about = "Diagnostics for finite Blaschke products")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hyperbolic area transport: APHA ratios, multiplicity areas, containment.
    Scan(Common),
    /// Distortion, lags along geodesic rays and boundary-derivative conditions.
    Rays(Common),
    /// Carleson, BMO, outer-function and stopping-time diagnostics.
    Carleson(Common),
    /// Clark measures, Lyapunov exponents and the H[σ] kernel.
    Clark(Common),
    /// The configured diagnostics, or all of them.
    Suite(Common),
    /// Registry coverage, a reference example and determinism.
    Selftest(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Dyadic depth for every diagnostic that takes one.
    #[arg(long)]
    pub depth: Option<u32>,
    /// Relative quadrature tolerance for every diagnostic.
    #[arg(long)]
    pub tol: Option<f64>,
}

pub const SCAN: &[&str] = &["apha_scan", "area_multiplicity", "containment", "hyperbolic_disk"];
pub const RAYS: &[&str] = &[
    "mu_range",
    "critical_distortion",
    "rays",
    "angular_lower_bound",
    "gp_min_derivative",
    "condition2",
];
pub const CARLESON: &[&str] = &[
    "entropy",
    "bmo",
    "mean_gap",
    "outer_gap",
    "dyakonov",
    "mu_carleson",
    "critical_carleson",
    "carleson_newman",
    "stopping_tree",
];
pub const CLARK: &[&str] = &[
    "clark_mass",
    "clark_atom_law",
    "herglotz",
    "lyapunov",
    "disintegration",
    "littlewood",
    "weighted_lyapunov",
    "cocycle",
    "chi_smoothness",
    "atom_continuity",
    "h_decay",
];

/// Exit codes: all pass, some record failed, bad configuration or I/O.
pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

fn load(common: &Common) -> Result<(ExperimentConfig, bool), ConfigError> {
    let (mut cfg, from_file) = match &common.config {
        Some(path) => (ExperimentConfig::load(path)?, true),
        None => (
            ExperimentConfig {
                seed: 0,
                families: default_battery(),
                diagnostics: Vec::new(),
                output: None,
                time_budget_seconds: None,
                record_timing: false,
            },
            false,
        ),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = common.tol {
        if !(t > 0.0) {
            return Err(ConfigError::Invalid(format!("tolerance {t} must be positive")));
        }
    }
    Ok((cfg, from_file))
}

/// Keeps configured parameters for listed names and adds the rest with
/// defaults.
fn theme(cfg: &ExperimentConfig, names: &[&str]) -> Vec<DiagnosticSpec> {
    names
        .iter()
        .map(|&n| {
            cfg.diagnostics
                .iter()
                .find(|d| d.name == n)
                .cloned()
                .unwrap_or_else(|| DiagnosticSpec::named(n))
        })
        .collect()
}

fn apply_overrides(cfg: &mut ExperimentConfig, common: &Common) {
    for d in &mut cfg.diagnostics {
        if common.depth.is_some() {
            d.params.depth = common.depth;
        }
        if common.tol.is_some() {
            d.params.tol = common.tol;
        }
    }
}

fn emit(
    report: &DiagnosticsReport,
    cfg: &ExperimentConfig,
    common: &Common,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let path = common
        .out
        .clone()
        .or_else(|| cfg.output.as_ref().map(|o| o.path.clone()));
    let format = common
        .format
        .or_else(|| cfg.output.as_ref().map(|o| o.format))
        .or_else(|| {
            path.as_ref()
                .and_then(|p| p.extension())
                .filter(|e| *e == "json")
                .map(|_| Format::Json)
        })
        .unwrap_or_default();
    match path {
        Some(p) => write_report(report, format, &p),
        None => match format {
            Format::Csv => report.write_csv(out),
            Format::Json => out.write_all(report.to_json().as_bytes()),
        },
    }
}

fn selftest(cfg: &ExperimentConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut ok = true;
    let gaps = registry::coverage_gaps();
    let _ = writeln!(
        out,
        "coverage: {} operations, {} diagnostics, {} unreachable",
        registry::OPERATIONS.len(),
        registry::REGISTRY.len(),
        gaps.len()
    );
    for g in &gaps {
        let _ = writeln!(err, "unreachable operation {g}");
        ok = false;
    }
    let example = ExperimentConfig::from_json(
        r#"{"families": [{"name": "monomials", "d_max": 2}],
            "diagnostics": [{"name": "clark_mass"}, {"name": "lyapunov"}]}"#,
    )
    .expect("built-in config");
    match run_suite(&example) {
        Ok(r) => {
            let chi: Vec<f64> = r
                .records
                .iter()
                .filter(|x| x.diagnostic == "lyapunov")
                .filter_map(|x| x.value)
                .collect();
            let good = r.all_pass()
                && chi.len() == 2
                && chi[0].abs() < 1e-12
                && (chi[1] - std::f64::consts::LN_2).abs() < 1e-12;
            let _ = writeln!(out, "reference example: {}", if good { "pass" } else { "FAIL" });
            ok &= good;
        }
        Err(e) => {
            let _ = writeln!(err, "reference example: {e}");
            ok = false;
        }
    }
    let mut quick = cfg.clone();
    quick.families.truncate(2);
    quick.diagnostics = ["unimodularity", "preimages", "herglotz", "littlewood"]
        .iter()
        .map(|n| DiagnosticSpec::named(n))
        .collect();
    quick.record_timing = false;
    match (run_suite(&quick), run_suite(&quick)) {
        (Ok(a), Ok(b)) => {
            let same = a.to_json() == b.to_json() && a.to_csv() == b.to_csv();
            let _ = writeln!(
                out,
                "determinism: {} ({} records, all pass: {})",
                if same { "pass" } else { "FAIL" },
                a.records.len(),
                a.all_pass()
            );
            ok &= same && a.all_pass();
        }
        (Err(e), _) | (_, Err(e)) => {
            let _ = writeln!(err, "determinism: {e}");
            ok = false;
        }
    }
    if ok {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs a parsed command, writing the report (when not redirected) to `out`
/// and messages to `err`. Returns the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (common, names): (&Common, Option<&[&str]>) = match &cli.command {
        Command::Scan(c) => (c, Some(SCAN)),
        Command::Rays(c) => (c, Some(RAYS)),
        Command::Carleson(c) => (c, Some(CARLESON)),
        Command::Clark(c) => (c, Some(CLARK)),
        Command::Suite(c) | Command::Selftest(c) => (c, None),
    };
    let (mut cfg, from_file) = match load(common) {
        Ok(x) => x,
        Err(e) => {
            let _ = writeln!(err, "apha: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Command::Selftest(_) = cli.command {
        return selftest(&cfg, out, err);
    }
    match names {
        Some(names) => cfg.diagnostics = theme(&cfg, names),
        None if !from_file => cfg.diagnostics = registry::names().map(DiagnosticSpec::named).collect(),
        None => {}
    }
    apply_overrides(&mut cfg, common);
    let report = match run_suite(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "apha: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Err(e) = emit(&report, &cfg, common, out) {
        let _ = writeln!(err, "apha: {e}");
        return EXIT_CONFIG;
    }
    let failed: Vec<_> = report.failures().collect();
    let _ = writeln!(err, "{} records, {} failed", report.records.len(), failed.len());
    for r in &failed {
        let _ = writeln!(
            err,
            "FAIL {} {} value={:?} threshold={:?} {} [{}]",
            r.family_id,
            r.diagnostic,
            r.value,
            r.threshold,
            r.failure.as_deref().unwrap_or(""),
            r.input_summary
        );
    }
    if failed.is_empty() {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
