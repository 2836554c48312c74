//! Suite execution: every configured diagnostic on every family member.

use std::fmt::Write as _;
use std::time::Instant;

use apha_core::blaschke::BlaschkeProduct;
use rayon::prelude::*;

use crate::config::{ConfigError, DiagnosticSpec, ExperimentConfig, Params};
use crate::family::{FamilySpec, Member};
use crate::registry::{self, Ctx};
use crate::report::{DiagnosticsReport, Record};

/// FNV-1a of the member id mixed with the run seed. Sample points of a
/// member depend on nothing else.
pub fn member_seed(seed: u64, member_id: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in member_id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// `zeros=[(re,im);…];rot=θ`, with shortest round-trip floats.
pub fn describe(f: &BlaschkeProduct) -> String {
    let mut s = String::from("zeros=[");
    for (i, z) in f.zero_list().iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        let _ = write!(s, "({},{})", z.re, z.im);
    }
    let _ = write!(s, "];rot={}", f.rotation_theta());
    s
}

fn summary(f: &BlaschkeProduct, params: &Params) -> String {
    let p = serde_json::to_string(params).expect("params serialize");
    if p == "{}" {
        describe(f)
    } else {
        format!("{};params={p}", describe(f))
    }
}

/// Runs one diagnostic on one member.
pub fn evaluate(member: &Member, spec: &DiagnosticSpec, seed: u64, record_timing: bool) -> Record {
    let diag = registry::find(&spec.name).expect("validated diagnostic name");
    let threshold = spec.threshold.or(diag.default_threshold);
    let ctx = Ctx {
        f: &member.product,
        params: &spec.params,
        seed: member_seed(seed, &member.id),
    };
    let start = Instant::now();
    let result = (diag.run)(&ctx);
    let seconds = if record_timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    let mut record = Record {
        family_id: member.id.clone(),
        diagnostic: spec.name.clone(),
        input_summary: summary(&member.product, &spec.params),
        value: None,
        error_estimate: None,
        threshold,
        pass: false,
        seconds,
        detail: String::new(),
        timed_out: false,
        failure: None,
    };
    match result {
        Ok(out) => {
            record.pass = diag.check.passes(out.value, threshold) && out.consistent;
            record.value = out.value.is_finite().then_some(out.value);
            record.error_estimate = out.error.filter(|e| e.is_finite());
            record.detail = out.detail;
            if !out.value.is_finite() {
                record.failure = Some(format!("non-finite value {}", out.value));
            } else if !out.consistent {
                record.failure = Some("consistency check failed".into());
            }
        }
        Err(e) => record.failure = Some(e.to_string()),
    }
    record
}

/// All members of all families, in configuration order.
pub fn members(cfg: &ExperimentConfig) -> Result<Vec<Member>, ConfigError> {
    let mut out = Vec::new();
    for fam in &cfg.families {
        out.extend(
            fam.generate(cfg.seed)
                .map_err(|e| ConfigError::Invalid(format!("family {}: {e}", fam.label())))?,
        );
    }
    Ok(out)
}

/// Evaluates all (member, diagnostic) pairs in parallel. Records come out
/// ordered by family, member and diagnostic regardless of completion order.
/// Records not started within the time budget are flagged and fail.
pub fn run_suite(cfg: &ExperimentConfig) -> Result<DiagnosticsReport, ConfigError> {
    cfg.validate()?;
    let members = members(cfg)?;
    let jobs: Vec<(&Member, &DiagnosticSpec)> = members
        .iter()
        .flat_map(|m| cfg.diagnostics.iter().map(move |d| (m, d)))
        .collect();
    let start = Instant::now();
    let records = jobs
        .par_iter()
        .map(|&(m, d)| {
            let over = cfg
                .time_budget_seconds
                .is_some_and(|b| start.elapsed().as_secs_f64() > b);
            if over {
                Record {
                    family_id: m.id.clone(),
                    diagnostic: d.name.clone(),
                    input_summary: summary(&m.product, &d.params),
                    value: None,
                    error_estimate: None,
                    threshold: d
                        .threshold
                        .or(registry::find(&d.name).and_then(|g| g.default_threshold)),
                    pass: false,
                    seconds: 0.0,
                    detail: String::new(),
                    timed_out: true,
                    failure: Some("time budget exhausted before start".into()),
                }
            } else {
                evaluate(m, d, cfg.seed, cfg.record_timing)
            }
        })
        .collect();
    Ok(DiagnosticsReport {
        seed: cfg.seed,
        records,
    })
}

/// Families used when no configuration is given.
pub fn default_battery() -> Vec<FamilySpec> {
    let mut fams = vec![
        FamilySpec::Monomials { d_max: 4 },
        FamilySpec::RadialChain { k: 5 },
        FamilySpec::Cluster {
            n: 3,
            center_theta: 1.0,
            spread: 0.1,
        },
    ];
    for d in [2, 4, 6] {
        fams.push(FamilySpec::RandomUniform {
            n: 3,
            d,
            r_max: 0.9,
            centered: false,
            seed: None,
        });
        fams.push(FamilySpec::RandomUniform {
            n: 3,
            d,
            r_max: 0.9,
            centered: true,
            seed: None,
        });
    }
    fams
}
