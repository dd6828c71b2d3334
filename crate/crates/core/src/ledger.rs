//! Resonance identity, the contradiction arithmetic built on it, and the
//! mean index identity over supplied critical-module dimensions.

use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::betti::{betti_number, coefficient_b, ManifoldClass};
use crate::error::{Error, Result};
use crate::exact::{rational, rational_from_int, Rational};
use crate::index::{analytical_period, index_iterate, mean_index, nullity_iterate};
use crate::normal_form::GeodesicModel;

fn sign_of_power(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A candidate `(R, p) = (i(c^T), p(c))` for a single prime closed geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IdentityInstance {
    pub mc: ManifoldClass,
    pub r: u64,
    pub p: u64,
    pub reversible: bool,
}

impl IdentityInstance {
    pub fn new(mc: ManifoldClass, r: u64, p: u64, reversible: bool) -> Result<Self> {
        if !(r + p).is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "R = {r} and p = {p} must have the same parity"
            )));
        }
        if r + p < 2 {
            return Err(Error::InvalidArgument(format!(
                "R + p = {} must be at least 2",
                r + p
            )));
        }
        Ok(Self {
            mc,
            r,
            p,
            reversible,
        })
    }

    /// `μ = p + dh − 3`.
    pub fn mu(&self) -> i64 {
        self.p as i64 + self.mc.dim() as i64 - 3
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityOutcome {
    Feasible(u64),
    Infeasible(Rational),
}

impl IdentityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible(_))
    }

    pub fn kappa(&self) -> Rational {
        match self {
            Self::Feasible(k) => rational_from_int(*k as i64),
            Self::Infeasible(k) => k.clone(),
        }
    }
}

/// Prefix sums `S(j) = Σ_{q≤j} (−1)^q b_q`, with `S(j) = 0` for `j < 0`.
#[derive(Debug, Clone)]
struct AlternatingPrefix {
    sums: Vec<i64>,
}

impl AlternatingPrefix {
    fn new(mc: &ManifoldClass, top: u64) -> Self {
        let mut acc = 0i64;
        let sums = (0..=top as i64)
            .map(|q| {
                acc += sign_of_power(q) * betti_number(mc, q) as i64;
                acc
            })
            .collect();
        Self { sums }
    }

    fn at(&self, j: i64) -> i64 {
        if j < 0 {
            0
        } else {
            self.sums[j as usize]
        }
    }

    fn range(&self, lo: i64, hi: i64) -> i64 {
        self.at(hi) - self.at(lo - 1)
    }
}

fn classify_kappa(kappa: Rational, reversible: bool) -> IdentityOutcome {
    let admissible = kappa.is_integer()
        && !kappa.is_negative()
        && (!reversible || kappa.to_integer() % 2 == num_bigint::BigInt::zero());
    if admissible {
        let k: u64 = kappa.to_integer().try_into().expect("kappa fits in u64");
        IdentityOutcome::Feasible(k)
    } else {
        IdentityOutcome::Infeasible(kappa)
    }
}

fn check_with(inst: &IdentityInstance, prefix: &AlternatingPrefix) -> IdentityOutcome {
    let mu = inst.mu();
    let r = inst.r as i64;
    let rhs = prefix.range(mu - inst.p as i64 + 1, r + mu);
    let b_term = coefficient_b(&inst.mc) * rational_from_int(r + inst.p as i64);
    let kappa = (rational_from_int(rhs) - b_term) * rational_from_int(sign_of_power(r + mu));
    classify_kappa(kappa, inst.reversible)
}

/// `κ = (−1)^{R+μ}(Σ_{j=μ−p+1}^{R+μ} (−1)^j b_j − B(d,h)(R+p))`; feasible iff
/// `κ` is a nonnegative integer, and even in the reversible case.
pub fn identity_check(inst: &IdentityInstance) -> IdentityOutcome {
    let top = (inst.r as i64 + inst.mu()).max(0) as u64;
    check_with(inst, &AlternatingPrefix::new(&inst.mc, top))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanRow {
    pub r: u64,
    pub p: u64,
    pub outcome: IdentityOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub mc: ManifoldClass,
    pub reversible: bool,
    /// Every scanned instance, ordered by `p` then `R`.
    pub rows: Vec<ScanRow>,
    pub max_kappa: Option<Rational>,
}

impl ScanReport {
    pub fn scanned(&self) -> usize {
        self.rows.len()
    }

    pub fn feasible(&self) -> Vec<&ScanRow> {
        self.rows
            .iter()
            .filter(|r| r.outcome.is_feasible())
            .collect()
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} feasible / {} scanned",
            self.feasible().len(),
            self.scanned()
        )
    }
}

/// Every `(R, p)` with `R + p` even in `[2, max_sum]` and `0 ≤ p ≤ max_p`.
pub fn contradiction_scan(
    mc: &ManifoldClass,
    max_sum: u64,
    max_p: u64,
    reversible: bool,
) -> Result<ScanReport> {
    if max_sum < 2 {
        return Err(Error::InvalidArgument(format!(
            "max_sum = {max_sum} must be at least 2"
        )));
    }
    let top = max_sum + mc.dim();
    let prefix = AlternatingPrefix::new(mc, top);
    let rows: Vec<ScanRow> = (0..=max_p)
        .into_par_iter()
        .filter(|&p| p <= max_sum)
        .flat_map_iter(|p| {
            let first_r = if p >= 2 { p % 2 } else { 2 - p };
            let prefix = &prefix;
            (first_r..=max_sum - p).step_by(2).map(move |r| {
                let inst = IdentityInstance::new(*mc, r, p, reversible).expect("grid point");
                ScanRow {
                    r,
                    p,
                    outcome: check_with(&inst, prefix),
                }
            })
        })
        .collect();
    let max_kappa = rows.iter().map(|r| r.outcome.kappa()).max();
    Ok(ScanReport {
        mc: *mc,
        reversible,
        rows,
        max_kappa,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EtaReport {
    /// `(2η, ε(2η))` for even `2η ∈ [0, D−2]`.
    pub values: Vec<(u64, Rational)>,
    pub max: Rational,
    pub argmax: u64,
    pub bound: Rational,
    pub passed: bool,
}

/// `ε(2η) = {2η/(dh)} − (2/d + (d−2)/(dh))·2η/D − {2η/d}` against
/// `(dh−(d−2))/(dh+(d−2))`.
pub fn epsilon_eta_claim(mc: &ManifoldClass) -> Result<EtaReport> {
    if !mc.is_even() {
        return Err(Error::InvalidArgument("epsilon(2 eta) needs even d".into()));
    }
    let (d, dh, big_d) = (mc.d() as i64, mc.dim() as i64, mc.big_d() as i64);
    let fract = |q: Rational| &q - q.floor();
    let values: Vec<(u64, Rational)> = (0..=big_d - 2)
        .step_by(2)
        .map(|two_eta| {
            let v = fract(rational(two_eta, dh))
                - (rational(2, d) + rational(d - 2, dh)) * rational(two_eta, big_d)
                - fract(rational(two_eta, d));
            (two_eta as u64, v)
        })
        .collect();
    let (argmax, max) = values
        .iter()
        .fold(None::<(u64, Rational)>, |best, (e, v)| match best {
            Some((_, ref bv)) if bv >= v => best,
            _ => Some((*e, v.clone())),
        })
        .expect("2η = 0 is always present");
    let bound = rational(dh - (d - 2), dh + (d - 2));
    Ok(EtaReport {
        passed: values.iter().all(|(_, v)| *v < bound),
        values,
        max,
        argmax,
        bound,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddSumReport {
    pub lhs: u64,
    pub rhs: Rational,
    pub passed: bool,
}

/// `Σ_{odd q ≤ dh−3} b_q = dh(h−1)/4` for even `d`.
pub fn odd_sum_identity(mc: &ManifoldClass) -> Result<OddSumReport> {
    if !mc.is_even() {
        return Err(Error::InvalidArgument(
            "odd-sum identity needs even d".into(),
        ));
    }
    let top = mc.dim() as i64 - 3;
    let lhs: u64 = (1..=top).step_by(2).map(|q| betti_number(mc, q)).sum();
    let rhs = rational((mc.dim() * (mc.h() - 1)) as i64, 4);
    Ok(OddSumReport {
        passed: rational_from_int(lhs as i64) == rhs,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum KSign {
    #[default]
    Plus,
    Minus,
}

/// Local critical module dimensions `k_0, …, k_ν` of one iterate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KVector {
    pub entries: Vec<u64>,
    pub sign: KSign,
    pub attached_index: i64,
    pub attached_nullity: u64,
}

impl KVector {
    /// Detached vector whose nullity is read off its length.
    pub fn new(entries: Vec<u64>) -> Self {
        let attached_nullity = entries.len().saturating_sub(1) as u64;
        Self {
            entries,
            sign: KSign::Plus,
            attached_index: 0,
            attached_nullity,
        }
    }

    pub fn entry(&self, j: u64) -> u64 {
        self.entries.get(j as usize).copied().unwrap_or(0)
    }

    /// `Σ_l (−1)^{i+l} k_l`.
    pub fn alternating_sum(&self) -> i64 {
        self.entries
            .iter()
            .enumerate()
            .map(|(l, k)| sign_of_power(self.attached_index + l as i64) * *k as i64)
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KVectorViolation {
    EntryBeyondNullity { position: usize },
    EndpointSum { sum: u64 },
    InteriorNonzero { position: usize },
    MinusSignAtZero,
}

impl fmt::Display for KVectorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EntryBeyondNullity { position } => {
                write!(f, "k_{position} is nonzero beyond the nullity")
            }
            Self::EndpointSum { sum } => write!(f, "k_0 + k_nu = {sum} exceeds 1"),
            Self::InteriorNonzero { position } => {
                write!(f, "k_{position} is nonzero although k_0 + k_nu = 1")
            }
            Self::MinusSignAtZero => f.write_str("k_0 must vanish for the minus sign"),
        }
    }
}

/// Empty iff the vector is admissible. For `ν = 0` the two endpoints coincide
/// and the endpoint condition reads `k_0 ≤ 1`.
pub fn validate_kvector(kv: &KVector) -> Vec<KVectorViolation> {
    let mut out = Vec::new();
    let nu = kv.attached_nullity;
    for (position, k) in kv.entries.iter().enumerate() {
        if position as u64 > nu && *k != 0 {
            out.push(KVectorViolation::EntryBeyondNullity { position });
        }
    }
    let endpoints = if nu == 0 {
        kv.entry(0)
    } else {
        kv.entry(0) + kv.entry(nu)
    };
    if endpoints > 1 {
        out.push(KVectorViolation::EndpointSum { sum: endpoints });
    }
    if endpoints == 1 {
        for position in 1..nu {
            if kv.entry(position) != 0 {
                out.push(KVectorViolation::InteriorNonzero {
                    position: position as usize,
                });
            }
        }
    }
    if kv.sign == KSign::Minus && kv.entry(0) != 0 {
        out.push(KVectorViolation::MinusSignAtZero);
    }
    out
}

/// A model with one k-vector per iterate `m = 1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerInput {
    pub model: GeodesicModel,
    pub n: u64,
    pub kvectors: Vec<KVector>,
}

impl LedgerInput {
    /// Attaches `i(c^m)` and `ν(c^m)` to the supplied entries and validates them.
    pub fn new(model: GeodesicModel, entries: Vec<(Vec<u64>, KSign)>) -> Result<Self> {
        let n = analytical_period(&model);
        if entries.len() as u64 != n {
            return Err(Error::DimensionMismatch(format!(
                "{} k-vectors supplied for analytical period {n}",
                entries.len()
            )));
        }
        let mut kvectors = Vec::with_capacity(entries.len());
        for (m, (entries, sign)) in (1..=n).zip(entries) {
            let nullity = nullity_iterate(&model, m)?;
            if entries.len() as u64 > nullity + 1 {
                return Err(Error::DimensionMismatch(format!(
                    "k-vector for m = {m} has {} entries but nu(c^{m}) = {nullity}",
                    entries.len()
                )));
            }
            let kv = KVector {
                entries,
                sign,
                attached_index: index_iterate(&model, m)?,
                attached_nullity: nullity,
            };
            let violations = validate_kvector(&kv);
            if !violations.is_empty() {
                let text: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Err(Error::InvalidArgument(format!(
                    "k-vector for m = {m}: {}",
                    text.join("; ")
                )));
            }
            kvectors.push(kv);
        }
        Ok(Self { model, n, kvectors })
    }

    /// Same as [`LedgerInput::new`] with every sign `+1`.
    pub fn with_entries(model: GeodesicModel, entries: Vec<Vec<u64>>) -> Result<Self> {
        Self::new(
            model,
            entries.into_iter().map(|e| (e, KSign::Plus)).collect(),
        )
    }
}

/// `(1/n) Σ_{m≤n} Σ_l (−1)^{i(c^m)+l} k_l(c^m)`.
pub fn chi_hat(input: &LedgerInput) -> Rational {
    let total: i64 = input.kvectors.iter().map(KVector::alternating_sum).sum();
    rational(total, input.n as i64)
}

fn rational_mean_index(model: &GeodesicModel) -> Result<Rational> {
    let mean = mean_index(model);
    let value = mean
        .as_rational()
        .cloned()
        .ok_or_else(|| Error::IrrationalMeanIndex(mean.to_string()))?;
    if !value.is_positive() {
        return Err(Error::MeanIndexNotPositive(value.to_string()));
    }
    Ok(value)
}

/// `Σ_j χ̂(c_j)/î(c_j) − B(d,h)`.
pub fn mean_identity_residual(inputs: &[LedgerInput], mc: &ManifoldClass) -> Result<Rational> {
    let mut total = Rational::zero();
    for input in inputs {
        total += chi_hat(input) / rational_mean_index(&input.model)?;
    }
    Ok(total - coefficient_b(mc))
}

/// `B(d,h)·n·î − [Σ_{m<n} Σ_l (−1)^{i(c^m)+l} k_l(c^m) + Σ_{j≤μ+1} (−1)^{i(c^n)+j} d_j]`
/// with `d_j` the entries of the `m = n` vector.
pub fn ledger_residual(input: &LedgerInput, mc: &ManifoldClass, mu: u64) -> Result<Rational> {
    let mean = rational_mean_index(&input.model)?;
    let last = input
        .kvectors
        .last()
        .ok_or_else(|| Error::DimensionMismatch("no k-vectors supplied".into()))?;
    if let Some((index, value)) = last
        .entries
        .iter()
        .enumerate()
        .find(|(j, d)| *j as u64 >= mu + 2 && **d != 0)
    {
        return Err(Error::DJTailNonzero {
            index,
            value: *value,
        });
    }
    let head: i64 = input.kvectors[..input.kvectors.len() - 1]
        .iter()
        .map(KVector::alternating_sum)
        .sum();
    let tail: i64 = last
        .entries
        .iter()
        .enumerate()
        .take(mu as usize + 2)
        .map(|(j, d)| sign_of_power(last.attached_index + j as i64) * *d as i64)
        .sum();
    let lhs = coefficient_b(mc) * rational_from_int(input.n as i64) * mean;
    Ok(lhs - rational_from_int(head + tail))
}

/// `max(0, p + dh − 3)`.
pub fn default_mu(mc: &ManifoldClass, p_c: i64) -> u64 {
    (p_c + mc.dim() as i64 - 3).max(0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal_form::fixtures::*;

    fn mc(d: u64, h: u64) -> ManifoldClass {
        ManifoldClass::new(d, h).unwrap()
    }

    fn check(d: u64, h: u64, r: u64, p: u64) -> IdentityOutcome {
        identity_check(&IdentityInstance::new(mc(d, h), r, p, false).unwrap())
    }

    #[test]
    fn identity_examples() {
        assert_eq!(
            check(3, 1, 1, 1),
            IdentityOutcome::Infeasible(rational(-1, 1))
        );
        assert_eq!(
            check(2, 1, 1, 1),
            IdentityOutcome::Infeasible(rational(-1, 1))
        );
        assert_eq!(
            check(3, 1, 3, 1),
            IdentityOutcome::Infeasible(rational(-1, 1))
        );
    }

    #[test]
    fn instance_invariants() {
        assert!(IdentityInstance::new(mc(2, 1), 1, 0, false).is_err());
        assert!(IdentityInstance::new(mc(2, 1), 0, 0, false).is_err());
        assert_eq!(
            IdentityInstance::new(mc(3, 1), 1, 1, false).unwrap().mu(),
            1
        );
    }

    #[test]
    fn scans_find_nothing() {
        for (d, h) in [(2, 1), (3, 1), (2, 2)] {
            let report = contradiction_scan(&mc(d, h), 100, 6, false).unwrap();
            assert!(report.feasible().is_empty(), "{d},{h}: {report}");
            assert!(report.scanned() > 0);
        }
    }

    #[test]
    fn scan_rows_match_single_checks() {
        let report = contradiction_scan(&mc(4, 2), 40, 5, false).unwrap();
        for row in &report.rows {
            assert_eq!(row.outcome, check(4, 2, row.r, row.p));
        }
        let first = &report.rows[0];
        assert_eq!((first.r, first.p), (2, 0));
    }

    #[test]
    fn eta_examples() {
        let r = epsilon_eta_claim(&mc(4, 2)).unwrap();
        let vals: Vec<Rational> = r.values.iter().map(|(_, v)| v.clone()).collect();
        assert_eq!(
            vals,
            vec![
                rational(0, 1),
                rational(-2, 5),
                rational(1, 5),
                rational(-1, 5),
                rational(-3, 5)
            ]
        );
        assert_eq!(
            (r.max.clone(), r.argmax, r.bound.clone()),
            (rational(1, 5), 4, rational(3, 5))
        );
        assert!(r.passed);

        let r = epsilon_eta_claim(&mc(2, 1)).unwrap();
        assert_eq!(
            (r.max.clone(), r.argmax, r.bound.clone()),
            (rational(0, 1), 0, rational(1, 1))
        );
        assert!(r.passed);
        assert!(epsilon_eta_claim(&mc(2, 2)).unwrap().passed);
        assert!(epsilon_eta_claim(&mc(3, 1)).is_err());
    }

    #[test]
    fn odd_sum_examples() {
        for ((d, h), lhs) in [((2, 2), 1), ((4, 2), 2), ((2, 3), 3)] {
            let r = odd_sum_identity(&mc(d, h)).unwrap();
            assert_eq!(r.lhs, lhs);
            assert!(r.passed);
        }
    }

    #[test]
    fn kvector_examples() {
        assert!(validate_kvector(&KVector::new(vec![1, 0, 0, 0])).is_empty());
        assert_eq!(
            validate_kvector(&KVector::new(vec![1, 0, 0, 1])),
            vec![KVectorViolation::EndpointSum { sum: 2 }]
        );
        assert!(validate_kvector(&KVector::new(vec![0, 2, 0])).is_empty());
        assert_eq!(
            validate_kvector(&KVector::new(vec![1, 2, 0])),
            vec![KVectorViolation::InteriorNonzero { position: 1 }]
        );
        let mut minus = KVector::new(vec![1]);
        minus.sign = KSign::Minus;
        assert_eq!(
            validate_kvector(&minus),
            vec![KVectorViolation::MinusSignAtZero]
        );
    }

    fn input_a() -> LedgerInput {
        LedgerInput::with_entries(model_a(), vec![vec![1], vec![1], vec![1, 0, 0, 0]]).unwrap()
    }

    fn input_c() -> LedgerInput {
        LedgerInput::with_entries(model_c(), vec![vec![1]]).unwrap()
    }

    fn input_d() -> LedgerInput {
        LedgerInput::with_entries(model_d(), vec![vec![1], vec![1]]).unwrap()
    }

    #[test]
    fn chi_hat_examples() {
        assert_eq!(chi_hat(&input_c()), rational(1, 1));
        assert_eq!(chi_hat(&input_d()), rational(0, 1));
        assert_eq!(chi_hat(&input_a()), rational(-1, 1));
    }

    #[test]
    fn ledger_input_dimension_checks() {
        assert!(matches!(
            LedgerInput::with_entries(model_a(), vec![vec![1], vec![1]]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            LedgerInput::with_entries(model_c(), vec![vec![1, 0]]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn mean_identity_examples() {
        let s2 = mc(2, 1);
        assert_eq!(
            mean_identity_residual(&[input_c()], &s2),
            Ok(rational(3, 2))
        );
        assert_eq!(mean_identity_residual(&[], &s2), Ok(rational(1, 1)));
        assert_eq!(
            mean_identity_residual(&[input_d()], &s2),
            Ok(rational(1, 1))
        );
        let b = LedgerInput::with_entries(model_b(), vec![vec![1]]).unwrap();
        assert!(matches!(
            mean_identity_residual(&[b], &s2),
            Err(Error::IrrationalMeanIndex(_))
        ));
    }

    #[test]
    fn ledger_residual_examples() {
        assert_eq!(
            ledger_residual(&input_c(), &mc(2, 1), 0),
            Ok(rational(-3, 1))
        );
        assert_eq!(
            ledger_residual(&input_d(), &mc(2, 1), 0),
            Ok(rational(-2, 1))
        );
        assert_eq!(
            ledger_residual(&input_a(), &mc(3, 1), 1),
            Ok(rational(5, 1))
        );
    }

    #[test]
    fn ledger_residual_rejects_tail() {
        let input =
            LedgerInput::with_entries(model_a(), vec![vec![1], vec![1], vec![0, 0, 0, 1]]).unwrap();
        assert_eq!(
            ledger_residual(&input, &mc(3, 1), 0),
            Err(Error::DJTailNonzero { index: 3, value: 1 })
        );
    }
}
