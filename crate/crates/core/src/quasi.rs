//! Quasi-period search and verification of the index laws it unlocks.
//!
//! A quasi-period is an even `T ∈ n·ℕ` at which every irrational rotation
//! ratio has `{Tβ_j}` within `ε` of 0 or of 1. The ratios close to 1 form the
//! set `P` of size `A`. At such `T` the index shifts by exactly
//! `i(c^T) + p(c)` on the first `m₀` iterates.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{rational, rational_from_int, AngleRatio, Rational, SurdSum};
use crate::index::{
    analytical_period, index_iterate, m_zero, mean_index, nullity_iterate, MeanIndex,
};
use crate::normal_form::{GeodesicModel, NormalFormData};

/// Denominator of the first certified lower bound tried for the automatic `ε`.
pub const AUTO_EPSILON_DENOMINATOR: u64 = 10_000;

const SCAN_CHUNK: u64 = 4096;
const NEAR_MISS_WINDOW: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EpsilonChoice {
    Auto,
    Explicit(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiPeriodConfig {
    pub epsilon: EpsilonChoice,
    /// When set, `T` must also satisfy the period-mean-index law: exactly for
    /// rational `î`, and within `tau` otherwise.
    pub tau: Option<Rational>,
    pub strong_period: bool,
    pub max_multiplier: u64,
}

impl Default for QuasiPeriodConfig {
    fn default() -> Self {
        Self {
            epsilon: EpsilonChoice::Auto,
            tau: None,
            strong_period: false,
            max_multiplier: 1_000_000,
        }
    }
}

impl QuasiPeriodConfig {
    pub fn validate(&self) -> Result<()> {
        if let EpsilonChoice::Explicit(e) = &self.epsilon {
            if *e <= Rational::zero() || *e >= rational(1, 4) {
                return Err(Error::InvalidArgument(format!(
                    "epsilon {e} must lie in (0, 1/4)"
                )));
            }
        }
        if let Some(t) = &self.tau {
            if *t <= Rational::zero() {
                return Err(Error::InvalidArgument(format!("tau {t} must be positive")));
            }
        }
        if self.max_multiplier == 0 {
            return Err(Error::InvalidArgument(
                "max_multiplier must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiPeriodResult {
    pub t: u64,
    pub a: u64,
    /// 1-based positions among the irrational rotations with `{Tβ_j} > 1 − ε`.
    pub p: BTreeSet<usize>,
    pub p_c: i64,
    pub epsilon_used: Rational,
}

impl QuasiPeriodResult {
    /// Builds a result for an arbitrary `T`, classifying ratios as high when
    /// `{Tβ_j} ≥ 1/2`. Useful for checking what happens away from real
    /// quasi-periods.
    pub fn classify(model: &GeodesicModel, t: u64) -> Self {
        let half = rational(1, 2);
        let p: BTreeSet<usize> = model
            .nf
            .irrational_rotations()
            .enumerate()
            .filter(|(_, b)| {
                let fl = rational_from_int(b.floor_scaled(t));
                b.cmp_scaled(t, &(fl + &half)).is_gt()
            })
            .map(|(j, _)| j + 1)
            .collect();
        let a = p.len() as u64;
        Self {
            t,
            a,
            p,
            p_c: p_of_c(&model.nf, a),
            epsilon_used: Rational::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutoEpsilon {
    pub exact: SurdSum,
    pub certified: Rational,
}

/// `ε = min{{mβ_j}, 1 − {mβ_j} : 1 ≤ m ≤ m₀, β_j irrational}` together with a
/// certified rational lower bound `⌊ε·10^e⌋/10^e`, `e ≥ 4` the least exponent
/// giving a positive bound.
pub fn auto_epsilon(model: &GeodesicModel, m0: u64) -> Result<AutoEpsilon> {
    if model.nf.k() == 0 {
        return Err(Error::InvalidArgument(
            "automatic epsilon needs an irrational rotation".into(),
        ));
    }
    if m0 == 0 {
        return Err(Error::ZeroIterate);
    }
    let one = SurdSum::from_integer(1);
    let mut best: Option<SurdSum> = None;
    for m in 1..=m0 {
        for b in model.nf.irrational_rotations() {
            let f = b.fract_scaled(m);
            let g = &one - &f;
            let d = if f < g { f } else { g };
            if best.as_ref().is_none_or(|cur| d < *cur) {
                best = Some(d);
            }
        }
    }
    let exact = best.expect("at least one irrational rotation");
    let mut den = AUTO_EPSILON_DENOMINATOR;
    let certified = loop {
        let lo = exact.lower_bound_with_denominator(den);
        if lo > Rational::zero() {
            break lo;
        }
        den *= 10;
    };
    Ok(AutoEpsilon { exact, certified })
}

/// `p(c) = p₋ + p₀ + q₀ + q₊ + 2(r*−k*) + r + 2A − 2k`.
pub fn p_of_c(nf: &NormalFormData, a: u64) -> i64 {
    (nf.p_minus + nf.p_zero + nf.q_zero + nf.q_plus + 2 * (nf.r_star() - nf.k_star()) + nf.r())
        as i64
        + 2 * a as i64
        - 2 * nf.k() as i64
}

/// `(K₁, K₂)` bounding index growth away from a quasi-period.
pub fn growth_constants(model: &GeodesicModel, a: u64) -> (i64, i64) {
    let nf = &model.nf;
    let lambda = model.lambda();
    let q = (nf.q_zero + nf.q_plus) as i64;
    let r = nf.r() as i64;
    let k = nf.k() as i64;
    let star = (nf.r_star() - nf.k_star()) as i64;
    let a = a as i64;
    let k1 = lambda + q + 2 * (r - k) + 2 * star + 2 * a;
    let k2 = lambda - q + 2 * k - 2 * star - 2 * a;
    (k1, k2)
}

fn lcm_up_to(m: u64) -> u64 {
    (1..=m).fold(1u64, |acc, b| acc.lcm(&b))
}

/// Step between candidate quasi-periods.
pub fn search_base(model: &GeodesicModel, strong: bool) -> Result<u64> {
    let n = analytical_period(model);
    let base = if strong {
        lcm_up_to(m_zero(model)?)
            .checked_mul(n)
            .ok_or_else(|| Error::InvalidArgument("strong period base overflows".into()))?
    } else {
        n
    };
    Ok(base.lcm(&2))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Classification {
    /// High positions, when every ratio is within `ε` of 0 or 1.
    Admissible(BTreeSet<usize>),
    Unclassified(usize),
}

fn classify(irrational: &[&AngleRatio], t: u64, eps: &Rational) -> Classification {
    let one = Rational::one();
    let mut high = BTreeSet::new();
    let mut unclassified = 0;
    for (j, b) in irrational.iter().enumerate() {
        let fl = rational_from_int(b.floor_scaled(t));
        if b.cmp_scaled(t, &(&fl + &one - eps)).is_gt() {
            high.insert(j + 1);
        } else if !b.cmp_scaled(t, &(&fl + eps)).is_lt() {
            unclassified += 1;
        }
    }
    if unclassified == 0 {
        Classification::Admissible(high)
    } else {
        Classification::Unclassified(unclassified)
    }
}

/// `T·î − (i(c^T) + p)`.
pub fn period_mean_gap(model: &GeodesicModel, mean: &MeanIndex, t: u64, p_c: i64) -> SurdSum {
    let i_t = index_iterate(model, t).expect("t ≥ 1");
    &mean.scale_int(t as i64) - &SurdSum::from_integer(i_t + p_c)
}

fn within(gap: &SurdSum, tau: &Rational) -> bool {
    let t = SurdSum::from_rational(tau.clone());
    *gap < t && *gap > -&t
}

pub fn find_quasi_period(
    model: &GeodesicModel,
    cfg: &QuasiPeriodConfig,
) -> Result<QuasiPeriodResult> {
    cfg.validate()?;
    let mean = mean_index(model);
    if !mean.is_positive() {
        return Err(Error::MeanIndexNotPositive(mean.to_string()));
    }
    let nf = &model.nf;
    let k = nf.k();
    let mut base = search_base(model, cfg.strong_period)?;

    let epsilon = match (&cfg.epsilon, k) {
        (EpsilonChoice::Explicit(e), _) => e.clone(),
        (EpsilonChoice::Auto, 0) => Rational::zero(),
        (EpsilonChoice::Auto, _) => auto_epsilon(model, m_zero(model)?)?.certified,
    };

    if cfg.tau.is_some() && mean.is_rational() && k >= 1 {
        let irrational_sum = nf
            .irrational_rotations()
            .fold(SurdSum::zero(), |acc, b| &acc + &b.value());
        let q = irrational_sum
            .as_rational()
            .expect("rational mean index forces a rational irrational-angle sum");
        let p_den: u64 = q.denom().try_into().map_err(|_| {
            Error::InvalidArgument("irrational angle sum has a huge denominator".into())
        })?;
        let n = analytical_period(model);
        base = base.lcm(&(p_den * n));
    }

    let irrational: Vec<&AngleRatio> = nf.irrational_rotations().collect();
    let min_high = k.div_ceil(2);
    let accept = |mult: u64| -> Option<QuasiPeriodResult> {
        let t = mult.checked_mul(base)?;
        let high = match classify(&irrational, t, &epsilon) {
            Classification::Admissible(h) => h,
            Classification::Unclassified(_) => return None,
        };
        let a = high.len() as u64;
        if a < min_high || a > k {
            return None;
        }
        let p_c = p_of_c(nf, a);
        if let Some(tau) = &cfg.tau {
            let gap = period_mean_gap(model, &mean, t, p_c);
            let ok = if mean.is_rational() {
                gap.signum().is_eq()
            } else {
                within(&gap, tau)
            };
            if !ok {
                return None;
            }
        }
        Some(QuasiPeriodResult {
            t,
            a,
            p: high,
            p_c,
            epsilon_used: epsilon.clone(),
        })
    };

    let mut start = 1u64;
    while start <= cfg.max_multiplier {
        let end = (start + SCAN_CHUNK - 1).min(cfg.max_multiplier);
        if let Some(found) = (start..=end).into_par_iter().find_map_first(accept) {
            return Ok(found);
        }
        start = end + 1;
    }

    let near_miss = (1..=cfg.max_multiplier.min(NEAR_MISS_WINDOW))
        .filter_map(|mult| {
            let t = mult.checked_mul(base)?;
            let miss = match classify(&irrational, t, &epsilon) {
                Classification::Admissible(h) => {
                    return Some((0usize, t, format!("A = {} outside range", h.len())))
                }
                Classification::Unclassified(u) => u,
            };
            Some((miss, t, format!("{miss} ratio(s) not within epsilon")))
        })
        .min_by_key(|(miss, t, _)| (*miss, *t))
        .map(|(_, t, why)| format!("best near-miss T = {t}: {why}"))
        .unwrap_or_else(|| "no candidate examined".into());
    Err(Error::QuasiPeriodNotFound {
        searched_up_to: cfg.max_multiplier.saturating_mul(base),
        near_miss,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            name,
            passed,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{}: {} ({})", self.name, status, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const INDEX_SHIFT: &str = "index-shift";
pub const NULLITY_SHIFT: &str = "nullity-shift";
pub const RELATIVE_PARITY: &str = "relative-parity";
pub const NULLITY_PERIODICITY: &str = "nullity-periodicity";
pub const PERIOD_MEAN_INDEX: &str = "period-mean-index";

/// The four conclusions of index quasi-periodicity at `result.t`.
pub fn verify_quasi_periodicity(
    model: &GeodesicModel,
    result: &QuasiPeriodResult,
    m0: u64,
    tau: &Rational,
) -> VerificationReport {
    let t = result.t;
    let p = result.p_c;
    let i = |m: u64| index_iterate(model, m).expect("m ≥ 1");
    let nu = |m: u64| nullity_iterate(model, m).expect("m ≥ 1");
    let i_t = i(t);
    let mut checks = Vec::new();

    let bad_index = (1..=m0).find(|&m| i(m + t) != i(m) + i_t + p);
    checks.push(Check::new(
        INDEX_SHIFT,
        bad_index.is_none(),
        match bad_index {
            None => format!("i(c^(m+{t})) = i(c^m) + {i_t} + {p} for 1 <= m <= {m0}"),
            Some(m) => format!("fails at m = {m}: {} != {} + {i_t} + {p}", i(m + t), i(m)),
        },
    ));

    let bad_nullity = (1..=m0).find(|&m| nu(m + t) != nu(m));
    checks.push(Check::new(
        NULLITY_SHIFT,
        bad_nullity.is_none(),
        match bad_nullity {
            None => format!("nullity repeats for 1 <= m <= {m0}"),
            Some(m) => format!("fails at m = {m}: {} != {}", nu(m + t), nu(m)),
        },
    ));

    checks.push(Check::new(
        RELATIVE_PARITY,
        (i_t - p).rem_euclid(2) == 0,
        format!("i(c^T) = {i_t}, p(c) = {p}"),
    ));

    let n = analytical_period(model);
    let bound = p + model.dim as i64 - 1 - 2 * result.a as i64;
    let (nu_n, nu_t) = (nu(n), nu(t));
    checks.push(Check::new(
        NULLITY_PERIODICITY,
        nu_n == nu_t && (nu_t as i64) <= bound,
        format!("nu(c^n) = {nu_n}, nu(c^T) = {nu_t}, bound {bound}"),
    ));

    let mean = mean_index(model);
    let gap = period_mean_gap(model, &mean, t, p);
    let (passed, detail) = if mean.is_rational() {
        (
            gap.signum().is_eq(),
            format!(
                "T*mean = {}, i(c^T) + p = {}",
                mean.scale_int(t as i64),
                i_t + p
            ),
        )
    } else {
        (
            within(&gap, tau),
            format!(
                "|T*mean - (i(c^T) + p)| ~ {:.6} against tau = {tau}",
                gap.to_f64_approx().abs()
            ),
        )
    };
    checks.push(Check::new(PERIOD_MEAN_INDEX, passed, detail));

    VerificationReport { checks }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSumReport {
    pub max_lhs: i64,
    pub bound: i64,
    pub first_violation: Option<u64>,
}

impl IndexSumReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// `i(c^m) + ν(c^m) ≤ i(c^T) + p(c) + dim − 3` for `1 ≤ m ≤ T − 1`.
pub fn verify_index_sum_bound(model: &GeodesicModel, result: &QuasiPeriodResult) -> IndexSumReport {
    let t = result.t;
    let bound = index_iterate(model, t).expect("t ≥ 1") + result.p_c + model.dim as i64 - 3;
    let lhs: Vec<i64> = (1..t)
        .into_par_iter()
        .map(|m| {
            index_iterate(model, m).expect("m ≥ 1")
                + nullity_iterate(model, m).expect("m ≥ 1") as i64
        })
        .collect();
    IndexSumReport {
        max_lhs: lhs.iter().copied().max().unwrap_or(i64::MIN),
        bound,
        first_violation: lhs.iter().position(|&v| v > bound).map(|i| i as u64 + 1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeReport {
    pub required: i64,
    pub min_gain: i64,
    pub first_violation: Option<u64>,
}

impl EscapeReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// `i(c^{T+m₀+m}) − i(c^T) ≥ p(c) + dim` for `1 ≤ m ≤ horizon`.
pub fn verify_escape(
    model: &GeodesicModel,
    result: &QuasiPeriodResult,
    m0: u64,
    horizon: u64,
) -> EscapeReport {
    let t = result.t;
    let i_t = index_iterate(model, t).expect("t ≥ 1");
    let required = result.p_c + model.dim as i64;
    let gains: Vec<i64> = (1..=horizon)
        .map(|m| index_iterate(model, t + m0 + m).expect("m ≥ 1") - i_t)
        .collect();
    EscapeReport {
        required,
        min_gain: gains.iter().copied().min().unwrap_or(i64::MAX),
        first_violation: gains
            .iter()
            .position(|&g| g < required)
            .map(|i| i as u64 + 1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthReport {
    pub k1: i64,
    pub k2: i64,
    pub k1_violation: Option<u64>,
    pub k2_violation: Option<u64>,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        self.k1_violation.is_none() && self.k2_violation.is_none()
    }
}

/// `i(c^T) − i(c^m) ≥ K₂` for `m < T` and `i(c^m) − i(c^T) ≥ K₁` for
/// `T < m ≤ horizon`.
pub fn verify_growth_bounds(
    model: &GeodesicModel,
    result: &QuasiPeriodResult,
    horizon: u64,
) -> GrowthReport {
    let (k1, k2) = growth_constants(model, result.a);
    let t = result.t;
    let i_t = index_iterate(model, t).expect("t ≥ 1");
    let i = |m: u64| index_iterate(model, m).expect("m ≥ 1");
    GrowthReport {
        k1,
        k2,
        k2_violation: (1..t).find(|&m| i_t - i(m) < k2),
        k1_violation: (t + 1..=horizon).find(|&m| i(m) - i_t < k1),
    }
}
