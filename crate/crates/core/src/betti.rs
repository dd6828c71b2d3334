//! Betti numbers of `ΛM/S¹` relative to point curves for manifolds whose
//! rational cohomology is a truncated polynomial algebra `T_{d,h+1}(x)`.

use num_traits::Zero;

use crate::error::{Error, RangeClaim, Result};
use crate::exact::{rational, rational_from_int, Rational};

/// `(d, h)` with `dim M = d·h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ManifoldClass {
    d: u64,
    h: u64,
}

impl ManifoldClass {
    pub fn new(d: u64, h: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!(
                "d = {d} must be at least 2"
            )));
        }
        if h < 1 {
            return Err(Error::InvalidArgument(format!(
                "h = {h} must be at least 1"
            )));
        }
        if d % 2 == 1 && h != 1 {
            return Err(Error::InvalidArgument(format!(
                "odd d = {d} forces h = 1, got h = {h}"
            )));
        }
        Ok(Self { d, h })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn dim(&self) -> u64 {
        self.d * self.h
    }

    /// `D = d(h+1) − 2`.
    pub fn big_d(&self) -> u64 {
        self.d * (self.h + 1) - 2
    }

    pub fn is_even(&self) -> bool {
        self.d.is_multiple_of(2)
    }
}

/// `B(d,h)`.
pub fn coefficient_b(mc: &ManifoldClass) -> Rational {
    let (d, h) = (mc.d as i64, mc.h as i64);
    if mc.is_even() {
        -rational(h * (h + 1) * d, 2 * d * (h + 1) - 4)
    } else {
        rational(d + 1, 2 * d - 2)
    }
}

/// Which `j`-range defines the set `Ω(d,h)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum OmegaReading {
    /// `j ∈ [0, h−1]`, consistent with the sphere table and the partial sums.
    #[default]
    Corrected,
    /// `j ∈ [1, h−1]`, as printed.
    Printed,
}

/// Whether odd `q` satisfies `q − (d−1) = iD + jd` for some `i ≥ 1` and `j` in
/// the range selected by `reading`.
pub fn omega_member_with(mc: &ManifoldClass, q: i64, reading: OmegaReading) -> bool {
    if q.rem_euclid(2) == 0 {
        return false;
    }
    let x = q - (mc.d as i64 - 1);
    let (d, big_d) = (mc.d as i64, mc.big_d() as i64);
    let j_min = match reading {
        OmegaReading::Corrected => 0,
        OmegaReading::Printed => 1,
    };
    (j_min..mc.h as i64).any(|j| {
        let y = x - j * d;
        y >= big_d && y % big_d == 0
    })
}

pub fn omega_member(mc: &ManifoldClass, q: i64) -> bool {
    omega_member_with(mc, q, OmegaReading::Corrected)
}

/// Betti numbers of the odd or even sphere `S^d`.
pub fn sphere_betti(d: u64, q: i64) -> u64 {
    let step = d as i64 - 1;
    if q < step || (q - step) % 2 != 0 {
        return 0;
    }
    let in_k = q % step == 0 && {
        let k = q / step;
        if d % 2 == 1 {
            k >= 2
        } else {
            k >= 3 && k % 2 == 1
        }
    };
    if in_k {
        2
    } else {
        1
    }
}

/// The general formula for even `d`.
pub fn general_betti(mc: &ManifoldClass, q: i64, reading: OmegaReading) -> u64 {
    let (d, h) = (mc.d as i64, mc.h as i64);
    if q.rem_euclid(2) == 0 || q <= d - 2 {
        return 0;
    }
    if q < d - 1 + (h - 1) * d {
        return ((q - (d - 1)) / d + 1) as u64;
    }
    if omega_member_with(mc, q, reading) {
        (h + 1) as u64
    } else {
        h as u64
    }
}

/// `b_q`: sphere tables for odd `d` and for `h = 1`, the general formula otherwise.
pub fn betti_number(mc: &ManifoldClass, q: i64) -> u64 {
    if !mc.is_even() || mc.h == 1 {
        sphere_betti(mc.d, q)
    } else {
        general_betti(mc, q, OmegaReading::Corrected)
    }
}

fn fract(q: &Rational) -> Rational {
    q - q.floor()
}

/// `{k/(d−1)} + {k/2}` for odd `d`.
pub fn epsilon_odd_sphere(d: u64, k: u64) -> Rational {
    fract(&rational(k as i64, d as i64 - 1)) + fract(&rational(k as i64, 2))
}

/// `ε_{d,h}(k)` for even `d`, written in terms of `t = (k−(d−1)) mod D`.
pub fn epsilon_even(mc: &ManifoldClass, k: u64) -> Rational {
    let (d, h, big_d) = (mc.d as i64, mc.h as i64, mc.big_d() as i64);
    let t = (k as i64 - (d - 1)).rem_euclid(big_d);
    let f = rational(t, big_d);
    fract(&rational(t, h * d))
        - (rational(2, d) + rational(d - 2, h * d)) * f
        - rational_from_int(h) * fract(&rational(t, 2))
        - fract(&rational(t, d))
}

fn odd_sphere_epsilon_range(d: u64) -> (Rational, Rational) {
    (
        Rational::zero(),
        rational(3, 2) - rational(1, 2 * (d as i64 - 1)),
    )
}

fn even_epsilon_range(mc: &ManifoldClass) -> (Rational, Rational) {
    (rational_from_int(-(mc.h as i64 + 2)), rational_from_int(1))
}

/// The ε-term of the partial-sum formula: the odd sphere variant for odd `d`,
/// the general one for even `d`. Range claims are checked.
pub fn epsilon_term(mc: &ManifoldClass, k: u64) -> Result<Rational> {
    if k + 1 < mc.d {
        return Err(Error::InvalidArgument(format!(
            "k = {k} is below d - 1 = {}",
            mc.d - 1
        )));
    }
    if mc.is_even() {
        let value = epsilon_even(mc, k);
        let (lower, upper) = even_epsilon_range(mc);
        if value <= lower || value >= upper {
            return Err(Error::RangeClaimViolated(Box::new(RangeClaim {
                k,
                value,
                lower,
                upper,
            })));
        }
        Ok(value)
    } else {
        let value = epsilon_odd_sphere(mc.d, k);
        let (lower, upper) = odd_sphere_epsilon_range(mc.d);
        if value < lower || value >= upper {
            return Err(Error::RangeClaimViolated(Box::new(RangeClaim {
                k,
                value,
                lower,
                upper,
            })));
        }
        Ok(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    /// `Σ (−1)^j b_j` against its closed form, odd `d`.
    OddAlternating,
    /// `Σ b_{2j−1}` against its upper bound, even sphere.
    EvenSphereOddBound,
    /// `Σ_{q≤k} b_q` against its closed form, even `d`.
    EvenPartial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumCheckRow {
    pub k: u64,
    pub direct: i64,
    /// Closed form for the equalities, the bound for the inequality.
    pub closed: Rational,
    /// ε-term for the equalities, the slack `bound − direct` for the inequality.
    pub epsilon: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumCheckReport {
    pub kind: SumKind,
    pub rows: Vec<SumCheckRow>,
}

impl SumCheckReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    pub fn first_failure(&self) -> Option<&SumCheckRow> {
        self.rows.iter().find(|r| !r.holds)
    }
}

fn betti_prefix(kmax: u64, b: impl Fn(i64) -> u64) -> Vec<u64> {
    (0..=kmax as i64).map(b).collect()
}

/// Odd `d`, `d−1 ≤ k ≤ kmax`:
/// `Σ_{j≤k} (−1)^j b_j = k(d+1)/(2(d−1)) − (d−1)/2 − ε_{d,1}(k)`.
pub fn odd_sphere_sum_check(d: u64, kmax: u64) -> SumCheckReport {
    let b = betti_prefix(kmax, |q| sphere_betti(d, q));
    let (lo, hi) = odd_sphere_epsilon_range(d);
    let di = d as i64;
    let mut direct = 0i64;
    let mut rows = Vec::new();
    for k in 0..=kmax {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        direct += sign * b[k as usize] as i64;
        if k + 1 < d || k == 0 {
            continue;
        }
        let eps = epsilon_odd_sphere(d, k);
        let closed = rational(k as i64 * (di + 1), 2 * (di - 1)) - rational(di - 1, 2) - &eps;
        let holds = rational_from_int(direct) == closed && eps >= lo && eps < hi;
        rows.push(SumCheckRow {
            k,
            direct,
            closed,
            epsilon: eps,
            holds,
        });
    }
    SumCheckReport {
        kind: SumKind::OddAlternating,
        rows,
    }
}

/// Even `d`, `d−1 ≤ k ≤ kmax`: `Σ_{2j−1≤k} b_{2j−1} ≤ kd/(2(d−1)) − (d−2)/2`.
pub fn even_sphere_bound_check(d: u64, kmax: u64) -> SumCheckReport {
    let b = betti_prefix(kmax, |q| sphere_betti(d, q));
    let di = d as i64;
    let mut direct = 0i64;
    let mut rows = Vec::new();
    for k in 0..=kmax {
        if k % 2 == 1 {
            direct += b[k as usize] as i64;
        }
        if k + 1 < d || k == 0 {
            continue;
        }
        let bound = rational(k as i64 * di, 2 * (di - 1)) - rational(di - 2, 2);
        let slack = &bound - rational_from_int(direct);
        rows.push(SumCheckRow {
            k,
            direct,
            holds: slack >= Rational::zero(),
            closed: bound,
            epsilon: slack,
        });
    }
    SumCheckReport {
        kind: SumKind::EvenSphereOddBound,
        rows,
    }
}

/// Even `d`, `dh−1 ≤ k ≤ kmax`:
/// `Σ_{q≤k} b_q = h(h+1)d/(2D)·(k−(d−1)) − h(h−1)d/4 + 1 + ε_{d,h}(k)`.
pub fn even_partial_sum_check(
    mc: &ManifoldClass,
    kmax: u64,
    reading: OmegaReading,
) -> SumCheckReport {
    let b = betti_prefix(kmax, |q| general_betti(mc, q, reading));
    let (d, h, big_d) = (mc.d as i64, mc.h as i64, mc.big_d() as i64);
    let (lo, hi) = even_epsilon_range(mc);
    let mut direct = 0i64;
    let mut rows = Vec::new();
    for k in 0..=kmax {
        direct += b[k as usize] as i64;
        if k + 1 < mc.dim() {
            continue;
        }
        let eps = epsilon_even(mc, k);
        let closed = rational(h * (h + 1) * d, 2 * big_d) * rational_from_int(k as i64 - (d - 1))
            - rational(h * (h - 1) * d, 4)
            + rational_from_int(1)
            + &eps;
        let holds = rational_from_int(direct) == closed && eps > lo && eps < hi;
        rows.push(SumCheckRow {
            k,
            direct,
            closed,
            epsilon: eps,
            holds,
        });
    }
    SumCheckReport {
        kind: SumKind::EvenPartial,
        rows,
    }
}

/// Closed-form sum checks for `k` up to `kmax`: the alternating identity for
/// odd `d`, the odd-degree bound for even spheres, the partial-sum identity
/// otherwise.
pub fn alternating_sum_check(mc: &ManifoldClass, kmax: u64) -> Result<SumCheckReport> {
    if kmax + 1 < mc.dim() {
        return Err(Error::InvalidArgument(format!(
            "kmax = {kmax} is below dh - 1 = {}",
            mc.dim() - 1
        )));
    }
    Ok(if !mc.is_even() {
        odd_sphere_sum_check(mc.d, kmax)
    } else if mc.h == 1 {
        even_sphere_bound_check(mc.d, kmax)
    } else {
        even_partial_sum_check(mc, kmax, OmegaReading::Corrected)
    })
}
