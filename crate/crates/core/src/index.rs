//! Morse index and nullity of iterates, mean index, analytical period and the
//! escape threshold `m₀`.
//!
//! With `β_j` the rotation ratios, `α̂_j` the rational nontrivial pair ratios
//! and `e(m) = 1` for even `m`:
//!
//! ```text
//! i(c^m) = mλ + 2ΣE(mβ_j) − r − p₋ − p₀ − e(m)(q₀+q₊) + 2Σφ(mα̂_j) − 2(r*−k*)
//! ν(c^m) = ν(c) + e(m)(q₋+2q₀+q₊) + 2ς(m)
//! ```
//!
//! Since `E(x) ≥ x` and `φ ≥ 0`, `i(c^s) ≥ s·î − C` with
//! `C = r + p₋ + p₀ + q₀ + q₊ + 2(r*−k*)`. Since `E(x) < x + 1` and
//! `φ ≤ 1`, also `i(c^s) < s·î + r`, so `|i(c^s) − s·î| ≤ C`.

use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{rational_from_int, SurdSum};
use crate::normal_form::{initial_nullity, GeodesicModel, NormalFormData};

/// Exact mean index `î(c)`.
pub type MeanIndex = SurdSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexPair {
    pub index: i64,
    pub nullity: u64,
}

fn even_indicator(m: u64) -> u64 {
    u64::from(m.is_multiple_of(2))
}

pub fn index_iterate(model: &GeodesicModel, m: u64) -> Result<i64> {
    if m == 0 {
        return Err(Error::ZeroIterate);
    }
    let nf = &model.nf;
    let rotation_sum: i64 = nf.rotations.iter().map(|b| b.upper_e(m)).sum();
    let nontrivial_phi: i64 = nf
        .nontrivial_pairs
        .iter()
        .filter(|a| a.is_rational())
        .map(|a| a.phi(m))
        .sum();
    let value = m as i64 * model.lambda() + 2 * rotation_sum
        - nf.r() as i64
        - nf.p_minus as i64
        - nf.p_zero as i64
        - (even_indicator(m) * (nf.q_zero + nf.q_plus)) as i64
        + 2 * nontrivial_phi
        - 2 * (nf.r_star() - nf.k_star()) as i64;
    Ok(value)
}

/// `ς(m)`: rational entries whose multiple `m·ratio` is an integer.
fn resonant_count(nf: &NormalFormData, m: u64) -> u64 {
    nf.all_angles()
        .filter(|a| a.is_rational())
        .map(|a| (1 - a.phi(m)) as u64)
        .sum()
}

pub fn nullity_iterate(model: &GeodesicModel, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::ZeroIterate);
    }
    let nf = &model.nf;
    Ok(initial_nullity(nf)
        + even_indicator(m) * (nf.q_minus + 2 * nf.q_zero + nf.q_plus)
        + 2 * resonant_count(nf, m))
}

pub fn index_pair(model: &GeodesicModel, m: u64) -> Result<IndexPair> {
    Ok(IndexPair {
        index: index_iterate(model, m)?,
        nullity: nullity_iterate(model, m)?,
    })
}

/// `(i(c^m), ν(c^m))` for `m = 1..=max_m`, evaluated in parallel.
pub fn index_table(model: &GeodesicModel, max_m: u64) -> Vec<IndexPair> {
    (1..=max_m)
        .into_par_iter()
        .map(|m| index_pair(model, m).expect("m ≥ 1"))
        .collect()
}

pub fn mean_index(model: &GeodesicModel) -> MeanIndex {
    model
        .nf
        .rotations
        .iter()
        .fold(SurdSum::from_integer(model.lambda()), |acc, b| {
            &acc + &b.value().scale_int(2)
        })
}

/// `i(c^m) − m·î(c)`, exactly.
pub fn mean_deviation(model: &GeodesicModel, m: u64) -> Result<SurdSum> {
    let i = index_iterate(model, m)?;
    Ok(&SurdSum::from_integer(i) - &mean_index(model).scale_int(m as i64))
}

/// `C = r + p₋ + p₀ + q₀ + q₊ + 2(r*−k*)`.
pub fn growth_offset(nf: &NormalFormData) -> u64 {
    nf.r() + nf.p_minus + nf.p_zero + nf.q_zero + nf.q_plus + 2 * (nf.r_star() - nf.k_star())
}

/// Lcm of the denominators of all rational angles, 1 if there are none.
pub fn rational_period(nf: &NormalFormData) -> u64 {
    nf.all_angles()
        .filter_map(|a| a.denominator())
        .fold(1u64, |acc, d| acc.lcm(&(d as u64)))
}

fn max_nullity(model: &GeodesicModel) -> u64 {
    let nf = &model.nf;
    let rational_entries = nf.all_angles().filter(|a| a.is_rational()).count() as u64;
    initial_nullity(nf) + nf.q_minus + 2 * nf.q_zero + nf.q_plus + 2 * rational_entries
}

/// Whether `j` meets the defining conditions of the analytical period, with
/// the universal quantifier over `m` restricted to `1..=window`.
pub fn satisfies_period_definition(model: &GeodesicModel, j: u64, window: u64) -> bool {
    let nu_j = nullity_iterate(model, j).expect("j ≥ 1");
    let mut nu_max = nu_j;
    for m in 1..=window {
        nu_max = nu_max.max(nullity_iterate(model, m).expect("m ≥ 1"));
        let a = index_iterate(model, m).expect("m ≥ 1");
        let b = index_iterate(model, m + j).expect("m ≥ 1");
        if (b - a).rem_euclid(2) != 0 {
            return false;
        }
    }
    nu_j == nu_max
}

/// Brute-force analytical period: smallest `j ≤ window` satisfying the
/// definition on `1..=window`.
pub fn period_by_definition(model: &GeodesicModel, window: u64) -> Option<u64> {
    (1..=window).find(|&j| satisfies_period_definition(model, j, window))
}

const VERIFY_WINDOW_CAP: u64 = 100_000;

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// Analytical period `n(c)`.
///
/// Index parity along iterates depends only on `m mod 2`:
/// `i(c^m) ≡ mλ + r + p₋ + p₀ + e(m)(q₀+q₊)`. An odd shift keeps every
/// difference even iff `λ + q₀ + q₊` is even, and maximal nullity needs every
/// rational ratio resonant plus an even iterate once `q₋+2q₀+q₊ > 0`.
pub fn analytical_period(model: &GeodesicModel) -> u64 {
    let nf = &model.nf;
    let n0 = rational_period(nf);
    let q_nullity = nf.q_minus + 2 * nf.q_zero + nf.q_plus;
    let odd_shift_breaks_parity =
        (model.lambda() + (nf.q_zero + nf.q_plus) as i64).rem_euclid(2) == 1;
    let force_even = q_nullity > 0 || (n0 % 2 == 1 && odd_shift_breaks_parity);
    let n = if force_even { n0.lcm(&2) } else { n0 };

    let window = (2 * n0 + 4).min(VERIFY_WINDOW_CAP);
    assert_eq!(
        nullity_iterate(model, n).expect("n ≥ 1"),
        max_nullity(model),
        "closed-form period misses maximal nullity"
    );
    assert!(
        satisfies_period_definition(model, n, window),
        "closed-form period {n} fails the definition"
    );
    for j in divisors(n).into_iter().filter(|&j| j < n) {
        let parity_ok = (1..=2).all(|m| {
            let a = index_iterate(model, m).expect("m ≥ 1");
            let b = index_iterate(model, m + j).expect("m ≥ 1");
            (b - a).rem_euclid(2) == 0
        });
        let nullity_ok = nullity_iterate(model, j).expect("j ≥ 1") == max_nullity(model);
        assert!(
            !(parity_ok && nullity_ok),
            "proper divisor {j} of closed-form period {n} also satisfies the definition"
        );
    }
    n
}

fn positive_lower_bound(v: &SurdSum) -> crate::exact::Rational {
    let mut den = 10_000u64;
    loop {
        let lo = v.lower_bound_with_denominator(den);
        if lo > rational_from_int(0) {
            return lo;
        }
        den = den
            .checked_mul(10)
            .expect("positive value admits a positive bound");
    }
}

/// `m₀(c) = min{m : i(c^{j+m}) ≥ dim + 4k for all j ≥ 1}`.
pub fn m_zero(model: &GeodesicModel) -> Result<u64> {
    let mean = mean_index(model);
    if !mean.is_positive() {
        return Err(Error::MeanIndexNotPositive(mean.to_string()));
    }
    let target = (model.dim + 4 * model.nf.k()) as i64;
    let offset = growth_offset(&model.nf) as i64;
    let lo = positive_lower_bound(&mean);
    // s·lo − C ≥ target for every s ≥ horizon
    let needed = rational_from_int(target + offset) / lo;
    let horizon = needed.ceil().to_integer();
    let horizon: u64 = u64::try_from(horizon).unwrap_or(1).max(1);
    let mut last_below = 0u64;
    for s in 1..=horizon {
        if index_iterate(model, s)? < target {
            last_below = s;
        }
    }
    Ok(last_below.max(1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BottViolation {
    OddParity { m: u64 },
    EvenParity { m: u64 },
    IndexNotMonotone { q: u64, p: u64 },
    NullityNotMonotone { q: u64, p: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BottReport {
    pub max_m: u64,
    pub violation: Option<BottViolation>,
}

impl BottReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `i(c^{2m}) ≡ i(c²)`, `i(c^{2m+1}) ≡ i(c)` (mod 2) and, for `q | p`,
/// `i(c^p) ≥ i(c^q)` and `ν(c^p) ≥ ν(c^q)`, for all iterates up to `max_m`.
pub fn verify_bott(model: &GeodesicModel, max_m: u64) -> BottReport {
    let table = index_table(model, max_m);
    let at = |m: u64| table[(m - 1) as usize];
    let mut violation = None;
    'outer: for m in 1..=max_m {
        let reference = if m % 2 == 0 { 2 } else { 1 };
        if reference <= max_m && (at(m).index - at(reference).index).rem_euclid(2) != 0 {
            violation = Some(if m % 2 == 0 {
                BottViolation::EvenParity { m }
            } else {
                BottViolation::OddParity { m }
            });
            break;
        }
        let mut p = 2 * m;
        while p <= max_m {
            if at(p).index < at(m).index {
                violation = Some(BottViolation::IndexNotMonotone { q: m, p });
                break 'outer;
            }
            if at(p).nullity < at(m).nullity {
                violation = Some(BottViolation::NullityNotMonotone { q: m, p });
                break 'outer;
            }
            p += m;
        }
    }
    BottReport { max_m, violation }
}
