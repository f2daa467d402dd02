//! The checks `verify` runs for each scenario.

use std::sync::Arc;

use aqft1d::bump::Bump;
use aqft1d::geometry::{
    check_open_embedding, inverse_proper_time, proper_time, BaseMapping, FamilyMorphism, FieldConfiguration, Point, Section,
    SpacetimeFamily, EMBEDDING_TOLERANCE,
};
use aqft1d::green::{ivp_roundtrip_suite, support_check, verify_exact_sequence, ProbeSettings};
use aqft1d::models::{
    pullback_coherence_check, pushforward_observables, smoothness_probe, u1_action, BosonicModel, FermionicModel, Model, ModelError,
    TestFamily, ANTISYMMETRY_TOLERANCE, COHERENCE_TOLERANCE, ORDER_RANGE, PAIRING_TOLERANCE, U1_TOLERANCE,
};
use aqft1d::quantize::checks::algebra_suite;
use aqft1d::quantize::{AlgebraElement, AlgebraMorphism, Parent, PoissonSpace};
use aqft1d::report::CheckReport;
use aqft1d::value::FieldValue;
use num_complex::Complex64;
use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};

use crate::config::{ConfigError, RunConfig};
use crate::scenario::Setup;

pub const PROPER_TIME_TOLERANCE: f64 = 1e-10;
pub const EXACT_SEQUENCE_TOLERANCE: f64 = 1e-6;
pub const SUPPORT_TOLERANCE: f64 = 1e-9;
pub const QUOTIENT_TOLERANCE: f64 = 1e-7;
pub const FUNCTORIALITY_TOLERANCE: f64 = 1e-9;
pub const IVP_RECORDS: usize = 20;
pub const RANDOM_PRODUCTS: usize = 200;
pub const SMOOTHNESS_STEPS: [f64; 3] = [0.1, 0.05, 0.025];

/// A unit of work producing one or more checks.
pub struct Job {
    pub name: &'static str,
    pub run: Box<dyn Fn() -> Vec<CheckReport> + Send + Sync>,
}

fn job(name: &'static str, run: impl Fn() -> Vec<CheckReport> + Send + Sync + 'static) -> Job {
    Job { name, run: Box::new(run) }
}

fn one<E: ToString>(name: &str, tol: f64, r: Result<(f64, usize), E>) -> Vec<CheckReport> {
    vec![CheckReport::measure(name, tol, r)]
}

/// The family with its fiber and window extended by `dt` to the future.
pub fn extended_family(family: &Arc<SpacetimeFamily>, dt: f64) -> Result<Arc<SpacetimeFamily>, aqft1d::geometry::GeometryError> {
    let (lo, hi) = family.fiber(&family.base().centre());
    let mut window = family.window();
    window.hi += dt;
    let f = family.clone();
    SpacetimeFamily::builder(family.base().clone())
        .fiber(move |_| lo, move |_| hi + dt)
        .density(move |t, x| f.density(t, x))
        .window(window)
        .build()
}

fn proper_time_roundtrip(family: &SpacetimeFamily) -> Result<(f64, usize), aqft1d::geometry::GeometryError> {
    let (lo, hi) = family.fiber(&family.base().centre());
    let anchor = Section::constant(0.5 * (lo + hi));
    let mut worst = 0.0f64;
    let mut n = 0;
    for (t, x) in family.sample_points() {
        let big_t = proper_time(family, t, &x, &anchor)?;
        worst = worst.max((inverse_proper_time(family, big_t, &x, &anchor)? - t).abs());
        n += 1;
    }
    Ok((worst, n))
}

fn base_maps(setup: &Setup) -> Vec<(&'static str, BaseMapping)> {
    let base = setup.family.base().clone();
    vec![
        ("identity", BaseMapping::identity(base.clone())),
        ("constant", BaseMapping::constant(base.clone(), &setup.centre)),
        (
            "square",
            BaseMapping::new(base, |x| {
                let mut y: Point = x.into();
                y[0] = x[0] * x[0];
                y
            }),
        ),
    ]
}

/// `(max_error, samples)`.
type Measured = (f64, usize);

fn max_matrix_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max)
}

fn translation_checks(setup: &Setup) -> Vec<CheckReport> {
    let x = setup.centre.clone();
    let run = || -> Result<(Measured, Measured), ModelError> {
        let half = extended_family(&setup.family, 0.5)?;
        let full = extended_family(&setup.family, 1.0)?;
        let f = FamilyMorphism::translation(setup.family.clone(), full.clone(), 1.0)?;
        let pushed = setup.model.pushed(&f)?;
        let (a, b) = (setup.model.structure(&x)?, pushed.structure(&x)?);
        let deviation = max_matrix_distance(&a, &b);
        pushforward_observables(&f, &setup.model, &x)?;

        let f1 = FamilyMorphism::translation(setup.family.clone(), half.clone(), 0.5)?;
        let f2 = FamilyMorphism::translation(half, full, 0.5)?;
        let m1 = pushforward_observables(&f1, &setup.model, &x)?;
        let m2 = pushforward_observables(&f2, &setup.model.pushed(&f1)?, &x)?;
        let m12 = pushforward_observables(&f1.then(&f2)?, &setup.model, &x)?;
        let composed = m1.then(&m2)?;
        Ok(((deviation, a.len() * a.len()), (composed.distance(&m12), a.len())))
    };
    match run() {
        Ok((p, c)) => vec![
            CheckReport::new("models.pushforward.translation", p.0, COHERENCE_TOLERANCE, p.1),
            CheckReport::new("models.pushforward.functoriality", c.0, FUNCTORIALITY_TOLERANCE, c.1),
        ],
        Err(e) => vec![
            CheckReport::failed("models.pushforward.translation", COHERENCE_TOLERANCE, &e),
            CheckReport::failed("models.pushforward.functoriality", FUNCTORIALITY_TOLERANCE, &e),
        ],
    }
}

fn relations_at(parent: &Arc<Parent>) -> Result<(f64, usize), ModelError> {
    let k = parent.rank();
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let (a, b) = (AlgebraElement::generator(parent, i)?, AlgebraElement::generator(parent, j)?);
            let (lhs, c) = match &**parent {
                Parent::Ccr(w) => (a.commutator(&b)?, Complex64::new(0.0, w.tau(i, j))),
                Parent::Car(v) => (a.anticommutator(&b)?, v.pairing(i, j)),
            };
            worst = worst.max(lhs.distance(&AlgebraElement::scalar(parent, c))?);
        }
    }
    Ok((worst, k * k))
}

/// Reports `|order − 2|` against the half-width of the accepted range.
fn smoothness_report(name: &str, observable: impl Fn(f64) -> Result<f64, ModelError>, s0: f64) -> CheckReport {
    let half_width = 0.5 * (ORDER_RANGE.1 - ORDER_RANGE.0);
    let centre = 0.5 * (ORDER_RANGE.0 + ORDER_RANGE.1);
    match smoothness_probe(observable, s0, &SMOOTHNESS_STEPS) {
        Ok(r) if r.exact => CheckReport::new(name, 0.0, half_width, SMOOTHNESS_STEPS.len()),
        Ok(r) => match r.second_order {
            Some(p) if p.is_finite() => CheckReport::new(name, (p - centre).abs(), half_width, SMOOTHNESS_STEPS.len()),
            _ => CheckReport::failed(name, half_width, "no convergence order"),
        },
        Err(e) => CheckReport::failed(name, half_width, e),
    }
}

fn kink_control() -> CheckReport {
    let r = smoothness_probe(|s: f64| Ok::<f64, ModelError>(s.abs()), 0.0, &SMOOTHNESS_STEPS);
    let rejected = matches!(r, Ok(ref r) if !r.passed);
    CheckReport::new("models.smoothness.kink_control", if rejected { 0.0 } else { 1.0 }, 0.0, SMOOTHNESS_STEPS.len())
}

fn bosonic(setup: &Setup) -> &BosonicModel {
    match &setup.model {
        Model::Bosonic(m) => m,
        Model::Fermionic(_) => unreachable!("scalar scenario"),
    }
}

fn fermionic(setup: &Setup) -> &FermionicModel {
    match &setup.model {
        Model::Fermionic(m) => m,
        Model::Bosonic(_) => unreachable!("Dirac scenario"),
    }
}

fn quotient_probe_centre(setup: &Setup) -> (f64, f64) {
    let (lo, hi) = setup.family.fiber(&setup.centre);
    let support = setup.tests[0].support();
    let c = support.upper(&setup.centre).unwrap_or(0.0) + 0.2;
    let radius = 0.4f64.min(0.45 * (hi - lo));
    (c.clamp(lo + radius + 0.01, hi - radius - 0.01), radius)
}

fn scalar_jobs(setup: &Arc<Setup>, config: &RunConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    let s = setup.clone();
    jobs.push(job("models.antisymmetry", move || {
        let run = || -> Result<(f64, usize), ModelError> {
            let mut worst = 0.0f64;
            let mut n = 0;
            for x in s.family.base().samples() {
                let raw = bosonic(&s).raw_tau(&x)?;
                worst = worst.max(PoissonSpace::antisymmetry_defect(&raw));
                n += raw.len() * raw.len();
            }
            Ok((worst, n))
        };
        one("models.antisymmetry", ANTISYMMETRY_TOLERANCE, run())
    }));
    let s = setup.clone();
    jobs.push(job("models.quotient", move || {
        let run = || -> Result<(f64, usize), ModelError> {
            let model = bosonic(&s);
            let (c, r) = quotient_probe_centre(&s);
            let p_psi = model.operator().apply(&Bump::unit(c, r).field(s.family.clone())?)?;
            let mut fields = s.tests.clone();
            fields.push(p_psi);
            let k = fields.len() - 1;
            let raw = model.with_tests(TestFamily::new(fields)?)?.raw_tau(&s.centre)?;
            let worst = (0..=k).map(|i| raw[i][k].abs().max(raw[k][i].abs())).fold(0.0, f64::max);
            Ok((worst, 2 * k + 1))
        };
        one("models.quotient", QUOTIENT_TOLERANCE, run())
    }));
    if setup.tests.len() >= 2 {
        let s = setup.clone();
        let family_scan = config.scenario == crate::config::Scenario::MassFamilyScalar;
        jobs.push(job("models.smoothness", move || {
            let model = bosonic(&s);
            let x0 = s.centre.clone();
            let report = if family_scan {
                let last = x0.len() - 1;
                let observable = |v: f64| -> Result<f64, ModelError> {
                    let mut x = x0.clone();
                    x[last] = v;
                    Ok(model.poisson_space(&x)?.tau(0, 1))
                };
                smoothness_report("models.smoothness.tau12", observable, x0[last])
            } else {
                let mass = model.mass_fn();
                let m0 = mass(&x0);
                let observable = |m: f64| -> Result<f64, ModelError> {
                    let mass = mass.clone();
                    let shifted = Arc::new(move |x: &[f64]| mass(x) + (m - m0));
                    let op = aqft1d::green::VerticalOperator::klein_gordon_fn(s.family.clone(), shifted)?;
                    Ok(BosonicModel::new(op, model.tests().clone())?.poisson_space(&x0)?.tau(0, 1))
                };
                smoothness_report("models.smoothness.tau12", observable, m0)
            };
            vec![report, kink_control()]
        }));
    }
    jobs
}

fn dirac_jobs(setup: &Arc<Setup>) -> Vec<Job> {
    let mut jobs = Vec::new();
    let s = setup.clone();
    jobs.push(job("models.pairing_defects", move || {
        let run = || -> Result<(f64, usize), ModelError> {
            let model = fermionic(&s);
            let p = model.involution();
            let mut worst = 0.0f64;
            let mut n = 0;
            for x in s.family.base().samples() {
                let b = model.raw_pairing(&x)?;
                for i in 0..b.len() {
                    for j in 0..b.len() {
                        worst = worst.max((b[i][j] - b[j][i]).norm()).max((b[i][j].conj() - b[p[i]][p[j]]).norm());
                        n += 1;
                    }
                }
            }
            Ok((worst, n))
        };
        one("models.pairing_defects", PAIRING_TOLERANCE, run())
    }));
    let s = setup.clone();
    jobs.push(job("models.quotient", move || {
        let run = || -> Result<(f64, usize), ModelError> {
            let (c, r) = quotient_probe_centre(&s);
            let chi = Bump::unit(c, r).spinor(s.family.clone(), Complex64::new(1.0, 0.5), Complex64::new(0.3, 0.0))?;
            let d_chi = s.operator.apply(&chi)?;
            let mut fields = s.tests.clone();
            fields.push(d_chi);
            let k = fields.len() - 1;
            let model = FermionicModel::new(s.family.clone(), TestFamily::new(fields)?)?;
            let partner = model.involution()[k];
            let b = model.raw_pairing(&s.centre)?;
            let mut worst = 0.0f64;
            for i in 0..b.len() {
                for &j in &[k, partner] {
                    worst = worst.max(b[i][j].norm()).max(b[j][i].norm());
                }
            }
            Ok((worst, 4 * b.len()))
        };
        one("models.quotient", QUOTIENT_TOLERANCE, run())
    }));
    jobs
}

fn phase_fn(theta: f64, slope: f64) -> impl Fn(&[f64]) -> Complex64 + Clone {
    move |x: &[f64]| Complex64::from_polar(1.0, theta + slope * x[0])
}

fn rotated(field: &FieldConfiguration, g: Complex64) -> Result<FieldConfiguration, ModelError> {
    let f = field.clone();
    Ok(FieldConfiguration::new(field.family().clone(), 2, field.kind(), field.support().clone(), move |t, x| {
        let v = f.eval(t, x)?;
        Ok(FieldValue::pair(g * v[0], g.conj() * v[1]))
    })?)
}

fn u1_jobs(setup: &Arc<Setup>, seed: u64) -> Vec<Job> {
    let mut jobs = Vec::new();
    let s = setup.clone();
    jobs.push(job("models.u1", move || {
        let model = fermionic(&s);
        let x = s.centre.clone();
        let mut rng = SmallRng::seed_from_u64(seed ^ 0x0001);
        let mut draw = || phase_fn(rng.gen_range(-3.1..3.1), rng.gen_range(-1.0..1.0));
        let g = draw();

        let invariance = || -> Result<(f64, usize), ModelError> {
            let phase = g(&x);
            let fields = model.tests().fields().iter().map(|f| rotated(f, phase)).collect::<Result<Vec<_>, _>>()?;
            let acted = FermionicModel::new(s.family.clone(), TestFamily::new(fields)?)?;
            let (a, b) = (acted.raw_pairing(&x)?, model.raw_pairing(&x)?);
            Ok((max_matrix_distance(&a, &b), a.len() * a.len()))
        };
        let equivariance = || -> Result<(f64, usize), ModelError> {
            let m = u1_action(&g, model, &x)?;
            Ok((m.structure_deviation().0, m.matrix().len()))
        };
        let triples: Vec<_> = (0..3).map(|_| (draw(), draw(), draw())).collect();
        let group_law = || -> Result<(f64, usize), ModelError> {
            let mut worst = 0.0f64;
            for (a, b, c) in &triples {
                let (ua, ub, uc) = (u1_action(a, model, &x)?, u1_action(b, model, &x)?, u1_action(c, model, &x)?);
                let (a2, b2, c2) = (a.clone(), b.clone(), c.clone());
                let ab = u1_action(move |y: &[f64]| a2(y) * b2(y), model, &x)?;
                let (a3, b3) = (a.clone(), b.clone());
                let abc = u1_action(move |y: &[f64]| a3(y) * b3(y) * c2(y), model, &x)?;
                worst = worst.max(ua.then(&ub)?.distance(&ab));
                worst = worst.max(ua.then(&ub)?.then(&uc)?.distance(&abc));
            }
            worst = worst.max(u1_action(|_: &[f64]| Complex64::new(1.0, 0.0), model, &x)?.distance(&AlgebraMorphism::identity(&model.algebra(&x)?)));
            Ok((worst, 2 * triples.len() + 1))
        };
        let pushforward = || -> Result<(f64, usize), ModelError> {
            let target = extended_family(&s.family, 1.0)?;
            let f = FamilyMorphism::translation(s.family.clone(), target, 1.0)?;
            let p = pushforward_observables(&f, &s.model, &x)?;
            let pushed = match s.model.pushed(&f)? {
                Model::Fermionic(m) => m,
                Model::Bosonic(_) => unreachable!("pushforward keeps the theory"),
            };
            let (u_src, u_tgt) = (u1_action(&g, model, &x)?, u1_action(&g, &pushed, &x)?);
            Ok((u_src.then(&p)?.distance(&p.then(&u_tgt)?), p.matrix().len()))
        };
        vec![
            CheckReport::measure("models.u1.pairing_invariance", U1_TOLERANCE, invariance()),
            CheckReport::measure("models.u1.involution_equivariance", U1_TOLERANCE, equivariance()),
            CheckReport::measure("models.u1.group_law", 0.0, group_law()),
            CheckReport::measure("models.u1.pushforward_equivariance", FUNCTORIALITY_TOLERANCE, pushforward()),
        ]
    }));
    jobs
}

/// Every job for the configured scenario.
pub fn jobs(config: &RunConfig, setup: Setup) -> Vec<Job> {
    let setup = Arc::new(setup);
    let seed = config.seed;
    let dirac = config.scenario.is_dirac();
    let mut jobs = Vec::new();

    let s = setup.clone();
    jobs.push(job("geometry", move || {
        let embedding = extended_family(&s.family, 1.0)
            .and_then(|target| FamilyMorphism::translation(s.family.clone(), target, 1.0))
            .map(|f| check_open_embedding(&f, EMBEDDING_TOLERANCE));
        let embedding = match embedding {
            Ok(r) => CheckReport::new(
                "geometry.translation_embedding",
                if r.monotone && r.inside_target { r.max_form_error } else { f64::INFINITY },
                EMBEDDING_TOLERANCE,
                r.samples,
            ),
            Err(e) => CheckReport::failed("geometry.translation_embedding", EMBEDDING_TOLERANCE, e),
        };
        vec![CheckReport::measure("geometry.proper_time_roundtrip", PROPER_TIME_TOLERANCE, proper_time_roundtrip(&s.family)), embedding]
    }));
    for i in 0..setup.tests.len() {
        let s = setup.clone();
        jobs.push(job("green.exact_sequence", move || {
            let mut out = verify_exact_sequence(&s.operator, &s.tests[i..=i], EXACT_SEQUENCE_TOLERANCE, ProbeSettings::default());
            for r in &mut out {
                r.check = format!("green.{}", r.check.replacen("[0]", &format!("[{i}]"), 1));
            }
            out.push(CheckReport::measure(format!("green.support[{i}]"), SUPPORT_TOLERANCE, support_check(&s.operator, &s.tests[i])));
            out
        }));
    }
    let s = setup.clone();
    jobs.push(job("green.ivp", move || ivp_roundtrip_suite(&s.family, dirac, IVP_RECORDS, seed)));
    jobs.push(job("quantize", move || algebra_suite(seed, RANDOM_PRODUCTS)));

    let s = setup.clone();
    jobs.push(job("models.relations", move || {
        let name = if dirac { "models.anticommutation" } else { "models.commutation" };
        one(name, 0.0, s.model.algebra(&s.centre).and_then(|p| relations_at(&p)))
    }));
    for (tag, h) in base_maps(&setup) {
        let s = setup.clone();
        jobs.push(job("models.pullback_coherence", move || {
            let mut r = pullback_coherence_check(&h, &s.model, COHERENCE_TOLERANCE);
            r.check = format!("{}.{tag}", r.check);
            vec![r]
        }));
    }
    let s = setup.clone();
    jobs.push(job("models.pushforward", move || translation_checks(&s)));
    if dirac {
        jobs.extend(dirac_jobs(&setup));
        if config.scenario == crate::config::Scenario::U1Dirac {
            jobs.extend(u1_jobs(&setup, seed));
        }
    } else {
        jobs.extend(scalar_jobs(&setup, config));
    }
    jobs
}

/// Applies tolerance overrides: the longest key equal to a check name or
/// to a prefix of it ending at `.` or `[` wins. Keys matching no check are
/// an error.
pub fn apply_tolerances(reports: Vec<CheckReport>, config: &RunConfig) -> Result<Vec<CheckReport>, ConfigError> {
    let matches = |key: &str, name: &str| {
        name == key || (name.starts_with(key) && matches!(name.as_bytes().get(key.len()), Some(b'.') | Some(b'[')))
    };
    for key in config.tolerances.keys() {
        if !reports.iter().any(|r| matches(key, &r.check)) {
            return Err(crate::config::invalid(format!("tolerances.{key}"), "matches no check"));
        }
    }
    Ok(reports
        .into_iter()
        .map(|r| {
            let best = config.tolerances.iter().filter(|(k, _)| matches(k, &r.check)).max_by_key(|(k, _)| k.len());
            match best {
                Some((_, &tol)) => r.with_tolerance(tol),
                None => r,
            }
        })
        .collect())
}
