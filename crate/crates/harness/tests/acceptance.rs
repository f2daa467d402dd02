//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::sync::Arc;
use std::time::{Duration, Instant};

use aqft1d::bump::Bump;
use aqft1d::geometry::{BaseDomain, FieldConfiguration, SpacetimeFamily, TimeWindow};
use aqft1d::green::{ivp_roundtrip_suite, support_check, verify_exact_sequence, ProbeSettings, VerticalOperator};
use aqft1d::models::{smoothness_probe, ModelError};
use aqft1d::quantize::checks::algebra_suite;
use aqft1d::report::CheckReport;
use aqft1d_harness::config::{RunConfig, Scenario};
use aqft1d_harness::report::VerificationReport;
use aqft1d_harness::{run_verify, VerifyOptions};

const INVERSE_APPLY_TOL: f64 = 1e-6;
const INVERSE_GREEN_TOL: f64 = 1e-5;
const SUPPORT_TOL: f64 = 1e-9;
const EXACT_TOL: f64 = 1e-6;
const DATA_SOLVE_TOL: f64 = 1e-10;
const SOLVE_DATA_TOL: f64 = 1e-8;
const ALGEBRA_BUDGET: Duration = Duration::from_secs(10);
const GREEN_BUDGET: Duration = Duration::from_secs(60);
const ANTISYMMETRY_TOL: f64 = 1e-8;
const QUOTIENT_TOL: f64 = 1e-7;
const COHERENCE_TOL: f64 = 1e-7;
const COMPOSITION_TOL: f64 = 1e-9;
const U1_TOL: f64 = 1e-9;
const STEPS: [f64; 3] = [0.1, 0.05, 0.025];

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: impl Into<String>) -> Line {
    Line { passed, detail: detail.into() }
}

fn family(rho_slope: f64) -> Arc<SpacetimeFamily> {
    SpacetimeFamily::builder(BaseDomain::interval(0.0, 1.0, 3).unwrap())
        .fiber(|_| -4.0, |_| 4.0)
        .density(move |_, x| 1.0 + rho_slope * x[0])
        .window(TimeWindow { lo: -4.0, hi: 4.0, samples: 41 })
        .build()
        .unwrap()
}

/// Twelve bumps: radii 0.05 to 1.0 (support widths 0.1 to 2.0), masses 0.5, 1, 2,
/// densities 1 and 1 + 0.2x.
fn green_cases() -> Vec<(VerticalOperator, FieldConfiguration)> {
    let masses = [0.5, 1.0, 2.0];
    let families = [family(0.0), family(0.2)];
    (0..12)
        .map(|k| {
            let f = families[k % 2].clone();
            let op = VerticalOperator::klein_gordon_constant(f.clone(), masses[k % 3]).unwrap();
            let radius = 0.05 + 0.95 * k as f64 / 11.0;
            let phi = Bump::unit(0.3 * (k % 4) as f64 - 0.5, radius).field(f).unwrap();
            (op, phi)
        })
        .collect()
}

fn worst(reports: &[CheckReport]) -> (bool, f64) {
    let passed = reports.iter().all(|r| r.passed);
    let e = reports.iter().map(|r| r.max_error).fold(0.0, f64::max);
    (passed, e)
}

fn inverse_axiom(cases: &[(VerticalOperator, FieldConfiguration)], start: Instant) -> Line {
    let (mut apply_green, mut green_apply) = (0.0f64, 0.0f64);
    for (op, phi) in cases {
        let pts = op.family().sample_points();
        let p_phi = op.apply(phi).unwrap();
        for g in [op.retarded(phi).unwrap(), op.advanced(phi).unwrap()] {
            apply_green = apply_green.max(op.apply(&g).unwrap().max_distance(phi, &pts).unwrap());
        }
        for g in [op.retarded(&p_phi).unwrap(), op.advanced(&p_phi).unwrap()] {
            green_apply = green_apply.max(g.max_distance(phi, &pts).unwrap());
        }
    }
    let elapsed = start.elapsed();
    line(
        apply_green <= INVERSE_APPLY_TOL && green_apply <= INVERSE_GREEN_TOL && elapsed <= GREEN_BUDGET,
        format!(
            "|P G± phi - phi| = {apply_green:.2e} <= {INVERSE_APPLY_TOL:.0e}, |G± P phi - phi| = {green_apply:.2e} <= {INVERSE_GREEN_TOL:.0e}, 12 fields in {:.1} s <= 60 s",
            elapsed.as_secs_f64()
        ),
    )
}

fn support_axiom(cases: &[(VerticalOperator, FieldConfiguration)]) -> Line {
    let mut e = 0.0f64;
    let mut samples = 0;
    for (op, phi) in cases {
        let (err, n) = support_check(op, phi).unwrap();
        e = e.max(err);
        samples += n;
    }
    line(e <= SUPPORT_TOL && samples > 0, format!("|G+ phi| below support = {e:.2e} <= {SUPPORT_TOL:.0e} over {samples} points"))
}

fn exact_sequence(cases: &[(VerticalOperator, FieldConfiguration)]) -> Line {
    let reports: Vec<_> =
        cases.iter().flat_map(|(op, phi)| verify_exact_sequence(op, std::slice::from_ref(phi), EXACT_TOL, ProbeSettings::default())).collect();
    let (passed, e) = worst(&reports);
    line(passed && reports.len() == 48, format!("{} node checks, worst {e:.2e} <= {EXACT_TOL:.0e}", reports.len()))
}

fn ivp_roundtrips() -> Line {
    let mut detail = Vec::new();
    let mut passed = true;
    for (name, dirac) in [("klein-gordon", false), ("dirac", true)] {
        let reports = ivp_roundtrip_suite(&family(0.2), dirac, 20, 11);
        for r in &reports {
            let tol = if r.check.ends_with("data_after_solve") { DATA_SOLVE_TOL } else { SOLVE_DATA_TOL };
            passed &= r.passed && r.max_error <= tol;
        }
        let (a, b) = (reports[0].max_error, reports[1].max_error);
        detail.push(format!("{name} {a:.1e}/{b:.1e}"));
    }
    line(passed, format!("data.solve <= 1e-10, solve.data <= 1e-8 on 20 records: {}", detail.join(", ")))
}

fn algebra() -> Line {
    let start = Instant::now();
    let reports = algebra_suite(5, 200);
    let elapsed = start.elapsed();
    let (passed, e) = worst(&reports);
    line(
        passed && elapsed <= ALGEBRA_BUDGET,
        format!("{} checks, worst {e:.1e}, {:.2} s <= 10 s", reports.len(), elapsed.as_secs_f64()),
    )
}

fn check<'a>(report: &'a VerificationReport, name: &str) -> &'a aqft1d_harness::report::CheckEntry {
    report.checks.iter().find(|c| c.check == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn within(report: &VerificationReport, names: &[(&str, f64)]) -> Line {
    let mut passed = true;
    let mut parts = Vec::new();
    for &(name, tol) in names {
        let c = check(report, name);
        let e = c.max_error.unwrap_or(f64::INFINITY);
        passed &= c.passed() && e <= tol;
        parts.push(format!("{name} {e:.1e} <= {tol:.0e}"));
    }
    line(passed, parts.join(", "))
}

fn smoothness(scalar: &VerificationReport) -> Line {
    let tau = check(scalar, "models.smoothness.tau12");
    let kink = smoothness_probe(|s: f64| Ok::<f64, ModelError>(s.abs()), 0.0, &STEPS).unwrap();
    line(
        tau.passed() && !kink.passed,
        format!("|order(tau12) - 2| = {:.1e} <= 0.5, |s| control rejected: {}", tau.max_error.unwrap_or(f64::NAN), !kink.passed),
    )
}

fn main() {
    let scalar_cfg = RunConfig::preset(Scenario::ConstantMassScalar);
    let scalar = run_verify(&scalar_cfg, VerifyOptions::default()).unwrap();
    let u1 = run_verify(&RunConfig::preset(Scenario::U1Dirac), VerifyOptions::default()).unwrap();

    let cases = green_cases();
    let start = Instant::now();
    let c1 = inverse_axiom(&cases, start);
    let lines = [
        ("Green inverse axiom", c1),
        ("support axiom", support_axiom(&cases)),
        ("exact sequence", exact_sequence(&cases)),
        ("initial value roundtrips", ivp_roundtrips()),
        ("CCR/CAR algebra", algebra()),
        ("Poisson structure", within(&scalar, &[("models.antisymmetry", ANTISYMMETRY_TOL), ("models.quotient", QUOTIENT_TOL)])),
        (
            "pullback coherence",
            within(
                &scalar,
                &[
                    ("models.pullback_coherence.identity", COHERENCE_TOL),
                    ("models.pullback_coherence.constant", COHERENCE_TOL),
                    ("models.pullback_coherence.square", COHERENCE_TOL),
                ],
            ),
        ),
        (
            "functoriality",
            within(&scalar, &[("models.pushforward.translation", COHERENCE_TOL), ("models.pushforward.functoriality", COMPOSITION_TOL)]),
        ),
        (
            "U(1) equivariance",
            within(
                &u1,
                &[
                    ("models.u1.pairing_invariance", U1_TOL),
                    ("models.u1.group_law", 0.0),
                    ("models.u1.pushforward_equivariance", U1_TOL),
                ],
            ),
        ),
        ("smoothness probes", smoothness(&scalar)),
        ("determinism", {
            let again = run_verify(&scalar_cfg, VerifyOptions::default()).unwrap();
            let same = again.to_json() == scalar.to_json();
            line(same, format!("two verify reports byte-identical: {same}"))
        }),
    ];

    let mut failed = 0;
    for (k, (name, l)) in lines.iter().enumerate() {
        println!("{} {:>2} {name}: {}", if l.passed { "PASS" } else { "FAIL" }, k + 1, l.detail);
        failed += usize::from(!l.passed);
    }
    println!("{} of {} criteria pass", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
