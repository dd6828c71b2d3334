//! Acceptance run. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any criterion fails.

mod common;

use std::num::NonZeroU64;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bigdecimal::{BigDecimal, Context, RoundingMode};
use geodex::betti::{
    epsilon_term, even_partial_sum_check, even_sphere_bound_check, general_betti,
    odd_sphere_sum_check, sphere_betti, ManifoldClass, OmegaReading,
};
use geodex::exact::{rational, QuadraticRatio, SurdSum};
use geodex::index::{
    analytical_period, growth_offset, index_iterate, index_table, m_zero, mean_deviation,
    period_by_definition, verify_bott,
};
use geodex::ledger::{contradiction_scan, epsilon_eta_claim, odd_sum_identity};
use geodex::normal_form::fixtures::{model_a, model_b};
use geodex::normal_form::GeodesicModel;
use geodex::quasi::{
    find_quasi_period, verify_escape, verify_growth_bounds, verify_index_sum_bound,
    verify_quasi_periodicity, QuasiPeriodConfig, QuasiPeriodResult, PERIOD_MEAN_INDEX,
};
use geodex::Error;
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(
    label: &str,
    elapsed: Duration,
    budget: Duration,
) -> std::result::Result<(), String> {
    ensure(elapsed < budget, || {
        format!("{label} took {elapsed:.2?}, budget {budget:?}")
    })
}

fn contradiction_scans() -> Outcome {
    let start = Instant::now();
    let mut scanned = 0;
    for (d, h) in [(2, 1), (3, 1), (2, 2), (4, 2)] {
        let mc = ManifoldClass::new(d, h).map_err(|e| e.to_string())?;
        let max_p = 3 * (mc.dim() - 1);
        for reversible in [false, true] {
            let report =
                contradiction_scan(&mc, 400, max_p, reversible).map_err(|e| e.to_string())?;
            let feasible = report.feasible();
            ensure(feasible.is_empty(), || {
                format!(
                    "(d,h)=({d},{h}) reversible={reversible}: feasible at R={}, p={}",
                    feasible[0].r, feasible[0].p
                )
            })?;
            scanned += report.scanned();
        }
    }
    let elapsed = start.elapsed();
    within_budget("scans", elapsed, Duration::from_secs(5))?;
    Ok(format!(
        "0 feasible among {scanned} instances in {elapsed:.2?}"
    ))
}

fn betti_closed_forms() -> Outcome {
    const KMAX: u64 = 5000;
    let start = Instant::now();
    let mut rows = 0;
    let mut absorb = |report: geodex::betti::SumCheckReport, what: String| {
        rows += report.rows.len();
        match report.first_failure() {
            None => Ok(()),
            Some(row) => Err(format!(
                "{what}: k={} direct={} closed={}",
                row.k, row.direct, row.closed
            )),
        }
    };
    for d in [3, 5, 7] {
        absorb(odd_sphere_sum_check(d, KMAX), format!("odd sphere d={d}"))?;
    }
    for d in [2, 4, 6] {
        for h in 1..=5 {
            let mc = ManifoldClass::new(d, h).map_err(|e| e.to_string())?;
            absorb(
                even_partial_sum_check(&mc, KMAX, OmegaReading::Corrected),
                format!("even partial d={d} h={h}"),
            )?;
        }
    }
    for d in [2, 4, 6, 8] {
        absorb(
            even_sphere_bound_check(d, KMAX),
            format!("even bound d={d}"),
        )?;
    }
    for (d, h) in (2..=8).flat_map(|d| (1..=5).map(move |h| (d, h))) {
        let Ok(mc) = ManifoldClass::new(d, h) else {
            continue;
        };
        if d % 2 == 1 && h != 1 {
            continue;
        }
        for k in 0..=KMAX {
            match epsilon_term(&mc, k) {
                Ok(_) => {}
                Err(Error::RangeClaimViolated(_)) => {
                    return Err(format!("epsilon range claim fails at d={d} h={h} k={k}"))
                }
                Err(_) => {}
            }
        }
    }
    let elapsed = start.elapsed();
    within_budget("closed forms", elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "{rows} partial sums exact, epsilon ranges hold, {elapsed:.2?}"
    ))
}

fn sphere_consistency() -> Outcome {
    for d in [2, 4, 6, 8] {
        let mc = ManifoldClass::new(d, 1).map_err(|e| e.to_string())?;
        for q in 0..=2000 {
            let general = general_betti(&mc, q, OmegaReading::Corrected);
            let sphere = sphere_betti(d, q);
            ensure(general == sphere, || {
                format!("d={d} q={q}: general {general} vs sphere {sphere}")
            })?;
        }
    }
    Ok("d in {2,4,6,8}, q <= 2000 agree".into())
}

fn verified(model: &GeodesicModel, found: &QuasiPeriodResult, tau: &geodex::Rational) -> Outcome {
    let m0 = m_zero(model).map_err(|e| e.to_string())?;
    let report = verify_quasi_periodicity(model, found, m0, tau);
    match report.checks.iter().find(|c| !c.passed) {
        None => Ok(format!("T={} verified", found.t)),
        Some(c) => Err(format!("T={}: {c}", found.t)),
    }
}

fn quasi_fixtures() -> Outcome {
    let tau = rational(3, 10);
    let b = model_b();
    let basic = find_quasi_period(&b, &QuasiPeriodConfig::default()).map_err(|e| e.to_string())?;
    let strong = find_quasi_period(
        &b,
        &QuasiPeriodConfig {
            strong_period: true,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    ensure(basic.t == 8 && strong.t == 84, || {
        format!("model B: T={} basic, T={} strong", basic.t, strong.t)
    })?;
    verified(&b, &basic, &tau)?;
    verified(&b, &strong, &tau)?;

    let a = model_a();
    let mut ts = Vec::new();
    for strong_period in [false, true] {
        let cfg = QuasiPeriodConfig {
            strong_period,
            ..Default::default()
        };
        let found = find_quasi_period(&a, &cfg).map_err(|e| e.to_string())?;
        verified(&a, &found, &tau)?;
        let lhs = rational(2, 3) * rational(found.t as i64, 1);
        let rhs = index_iterate(&a, found.t).map_err(|e| e.to_string())? + found.p_c;
        ensure(lhs == rational(rhs, 1), || {
            format!("model A T={}: T*2/3 = {lhs}, i(c^T)+p = {rhs}", found.t)
        })?;
        ts.push(found.t);
    }
    ensure(ts == [6, 18], || format!("model A: T values {ts:?}"))?;
    Ok("B: T=8 and T=84 verified at tau=3/10; A: T=6 and T=18 with exact mean law".into())
}

fn fixture_escape() -> Outcome {
    let mut detail = Vec::new();
    for (name, model, t, bound) in [("A", model_a(), 6, 4), ("B", model_b(), 8, 9)] {
        let result = QuasiPeriodResult::classify(&model, t);
        let found =
            find_quasi_period(&model, &QuasiPeriodConfig::default()).map_err(|e| e.to_string())?;
        ensure(found.t == t && found.p == result.p, || {
            format!("model {name}: search gave T={}", found.t)
        })?;
        let sum = verify_index_sum_bound(&model, &found);
        ensure(sum.passed() && sum.bound == bound, || {
            format!("model {name}: index sum {sum:?}")
        })?;
        let m0 = m_zero(&model).map_err(|e| e.to_string())?;
        let escape = verify_escape(&model, &found, m0, 20);
        ensure(escape.passed(), || {
            format!("model {name}: escape {escape:?}")
        })?;
        detail.push(format!(
            "{name}: max {} <= {bound}, gain {} >= {}",
            sum.max_lhs, escape.min_gain, escape.required
        ));
    }
    Ok(detail.join("; "))
}

/// Multiples of `base` scanned per generated model; keeps the horizon `3T` small.
const SUITE_MAX_T: u64 = 6000;
const SUITE_MODELS: usize = 500;
const SUITE_MAX_M: u64 = 200;

fn check_model(model: &GeodesicModel) -> std::result::Result<Option<u64>, String> {
    let bott = verify_bott(model, SUITE_MAX_M);
    ensure(bott.passed(), || format!("bott {:?}", bott.violation))?;

    let n = analytical_period(model);
    let table = index_table(model, SUITE_MAX_M + n);
    for m in 1..=SUITE_MAX_M {
        let (now, later) = (table[(m - 1) as usize], table[(m + n - 1) as usize]);
        ensure(now.nullity == later.nullity, || {
            format!("nullity not {n}-periodic at m={m}")
        })?;
        ensure((later.index - now.index).rem_euclid(2) == 0, || {
            format!("odd index step over {n} at m={m}")
        })?;
    }
    if n <= SUITE_MAX_M {
        let by_def = period_by_definition(model, SUITE_MAX_M);
        ensure(by_def == Some(n), || {
            format!("period by definition {by_def:?}, analytical {n}")
        })?;
    }

    let c = SurdSum::from_integer(growth_offset(&model.nf) as i64);
    for m in 1..=SUITE_MAX_M {
        let dev = mean_deviation(model, m).map_err(|e| e.to_string())?;
        ensure(dev <= c && dev >= -&c, || {
            format!("|i - m*mean| = {dev} beyond {c} at m={m}")
        })?;
    }

    let base = geodex::quasi::search_base(model, false).map_err(|e| e.to_string())?;
    let cfg = QuasiPeriodConfig {
        max_multiplier: (SUITE_MAX_T / base).max(1),
        ..Default::default()
    };
    let found = match find_quasi_period(model, &cfg) {
        Ok(found) => found,
        Err(Error::QuasiPeriodNotFound { .. }) => return Ok(None),
        Err(e) => return Err(e.to_string()),
    };
    let growth = verify_growth_bounds(model, &found, 3 * found.t);
    ensure(growth.passed(), || {
        format!("growth at T={}: {growth:?}", found.t)
    })?;
    let m0 = m_zero(model).map_err(|e| e.to_string())?;
    let closure = verify_quasi_periodicity(model, &found, m0, &rational(1, 1));
    for check in closure
        .checks
        .iter()
        .filter(|c| c.name != PERIOD_MEAN_INDEX)
    {
        ensure(check.passed, || {
            format!("closure at T={}: {check}", found.t)
        })?;
    }
    Ok(Some(found.t))
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let models: Vec<GeodesicModel> = (0..SUITE_MODELS)
        .map(|_| common::random_model(&mut rng))
        .collect();
    let irrational = models.iter().filter(|m| m.nf.k() > 0).count();
    let mut found = 0;
    for (idx, model) in models.iter().enumerate() {
        match check_model(model) {
            Ok(t) => found += usize::from(t.is_some()),
            Err(why) => return Err(format!("model #{idx} {model:?}: {why}")),
        }
    }
    Ok(format!(
        "{} models ({irrational} irrational), growth checked at {found} found quasi-periods",
        models.len()
    ))
}

fn section_six_arithmetic() -> Outcome {
    let mut cells = 0;
    for d in (2..=10).step_by(2) {
        for h in 1..=6 {
            let mc = ManifoldClass::new(d, h).map_err(|e| e.to_string())?;
            let eta = epsilon_eta_claim(&mc).map_err(|e| e.to_string())?;
            ensure(eta.passed, || {
                format!(
                    "d={d} h={h}: max {} at {} vs bound {}",
                    eta.max, eta.argmax, eta.bound
                )
            })?;
            let odd = odd_sum_identity(&mc).map_err(|e| e.to_string())?;
            ensure(odd.passed, || {
                format!("d={d} h={h}: {} != {}", odd.lhs, odd.rhs)
            })?;
            cells += 1;
        }
    }
    Ok(format!("{cells} (d,h) cells"))
}

fn decimal_floor(x: &QuadraticRatio, m: u64, ctx: &Context) -> BigInt {
    let root = BigDecimal::from(x.radicand() as i64)
        .sqrt_with_context(ctx)
        .expect("positive radicand");
    let numerator =
        (BigDecimal::from(x.a()) + BigDecimal::from(x.b()) * root) * BigDecimal::from(m);
    let (floored, scale) = numerator
        .with_scale_round(0, RoundingMode::Floor)
        .as_bigint_and_exponent();
    assert_eq!(scale, 0);
    floored.div_floor(&BigInt::from(x.c()))
}

fn exactness_oracle() -> Outcome {
    let ctx = Context::default().with_precision(NonZeroU64::new(220).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut compared = 0;
    while compared < 10_000 {
        let d = rng.gen_range(2..=1000i64);
        let (a, b, c) = (
            rng.gen_range(-10_000..=10_000i64),
            rng.gen_range(-100..=100i64),
            rng.gen_range(1..=10_000i64),
        );
        let Ok(x) = QuadraticRatio::new(a, b, c, d) else {
            continue;
        };
        let m = rng.gen_range(1..=1_000_000u64);
        let exact = x.floor_scaled(m);
        let oracle = decimal_floor(&x, m, &ctx);
        ensure(exact == oracle, || {
            format!("({a} + {b}*sqrt({d}))/{c} at m={m}: exact {exact}, decimal {oracle}")
        })?;
        compared += 1;
    }
    Ok(format!("{compared} pairs agree with 220-digit evaluation"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("contradiction scans", contradiction_scans),
        ("betti closed forms", betti_closed_forms),
        ("sphere/general consistency", sphere_consistency),
        ("quasi-period fixtures", quasi_fixtures),
        ("index sum and escape at fixtures", fixture_escape),
        ("generated model properties", property_suite),
        ("even-dimension arithmetic", section_six_arithmetic),
        ("exactness oracle", exactness_oracle),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", n + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", n + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
