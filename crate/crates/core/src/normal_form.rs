//! Block data of the basic normal form decomposition of a linearized
//! Poincaré map, and the geodesic descriptor built on top of it.

use std::fmt;

use crate::exact::AngleRatio;

/// Multiplicities and angle lists of the normal form blocks.
///
/// Angle lists hold `θ/2π` and keep irrational entries first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormalFormData {
    pub half_dim: u64,
    pub p_minus: u64,
    pub p_zero: u64,
    pub p_plus: u64,
    pub q_minus: u64,
    pub q_zero: u64,
    pub q_plus: u64,
    pub rotations: Vec<AngleRatio>,
    pub nontrivial_pairs: Vec<AngleRatio>,
    pub trivial_pairs: Vec<AngleRatio>,
    pub h_plus: u64,
    pub h_minus: u64,
}

impl NormalFormData {
    pub fn empty(half_dim: u64) -> Self {
        Self {
            half_dim,
            p_minus: 0,
            p_zero: 0,
            p_plus: 0,
            q_minus: 0,
            q_zero: 0,
            q_plus: 0,
            rotations: Vec::new(),
            nontrivial_pairs: Vec::new(),
            trivial_pairs: Vec::new(),
            h_plus: 0,
            h_minus: 0,
        }
    }

    pub fn r(&self) -> u64 {
        self.rotations.len() as u64
    }

    pub fn k(&self) -> u64 {
        count_irrational(&self.rotations)
    }

    pub fn r_star(&self) -> u64 {
        self.nontrivial_pairs.len() as u64
    }

    pub fn k_star(&self) -> u64 {
        count_irrational(&self.nontrivial_pairs)
    }

    pub fn r_zero(&self) -> u64 {
        self.trivial_pairs.len() as u64
    }

    pub fn k_zero(&self) -> u64 {
        count_irrational(&self.trivial_pairs)
    }

    /// Total dimension occupied by the blocks, counted in units of `Sp(2)`.
    pub fn block_sum(&self) -> u64 {
        self.p_minus
            + self.p_zero
            + self.p_plus
            + self.q_minus
            + self.q_zero
            + self.q_plus
            + self.r()
            + 2 * self.r_star()
            + 2 * self.r_zero()
            + self.h_minus
            + self.h_plus
    }

    pub fn irrational_rotations(&self) -> impl Iterator<Item = &AngleRatio> {
        self.rotations.iter().filter(|a| !a.is_rational())
    }

    /// Every angle of every list, rational or not.
    pub fn all_angles(&self) -> impl Iterator<Item = &AngleRatio> {
        self.rotations
            .iter()
            .chain(&self.nontrivial_pairs)
            .chain(&self.trivial_pairs)
    }
}

fn count_irrational(list: &[AngleRatio]) -> u64 {
    list.iter().filter(|a| !a.is_rational()).count() as u64
}

/// `dim` is the manifold dimension; the normal form lives in `Sp(2·dim − 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeodesicModel {
    pub dim: u64,
    pub initial_index: u64,
    pub nf: NormalFormData,
}

impl GeodesicModel {
    /// `λ = i(c) + p₋ + p₀ − r`.
    pub fn lambda(&self) -> i64 {
        self.initial_index as i64 + self.nf.p_minus as i64 + self.nf.p_zero as i64
            - self.nf.r() as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: i64) -> Self {
        if n.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AngleList {
    Rotations,
    NontrivialPairs,
    TrivialPairs,
}

impl fmt::Display for AngleList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AngleList::Rotations => "rotations",
            AngleList::NontrivialPairs => "nontrivial_pairs",
            AngleList::TrivialPairs => "trivial_pairs",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    DimensionTooSmall { dim: u64 },
    HalfDimMismatch { half_dim: u64, expected: u64 },
    DimensionBudget { block_sum: u64, half_dim: u64 },
    AngleIsHalf { list: AngleList, position: usize },
    IrrationalNotFirst { list: AngleList, position: usize },
    HMinusRange { h_minus: u64 },
    IndexParity { index: u64, expected: Parity },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DimensionTooSmall { dim } => {
                write!(f, "manifold dimension {dim} is below 2")
            }
            Violation::HalfDimMismatch { half_dim, expected } => write!(
                f,
                "normal form half dimension {half_dim} differs from dim - 1 = {expected}"
            ),
            Violation::DimensionBudget {
                block_sum,
                half_dim,
            } => write!(
                f,
                "dimension budget: block sum {block_sum} differs from half dimension {half_dim}"
            ),
            Violation::AngleIsHalf { list, position } => {
                write!(f, "{list}[{position}] equals 1/2")
            }
            Violation::IrrationalNotFirst { list, position } => write!(
                f,
                "{list}[{position}] is irrational but follows a rational entry"
            ),
            Violation::HMinusRange { h_minus } => {
                write!(f, "h_minus = {h_minus} must be 0 or 1")
            }
            Violation::IndexParity { index, expected } => write!(
                f,
                "initial index {index} has the wrong parity; blocks force {expected}"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate_model(model: &GeodesicModel) -> ValidationReport {
    let mut violations = Vec::new();
    let nf = &model.nf;
    if model.dim < 2 {
        violations.push(Violation::DimensionTooSmall { dim: model.dim });
    } else if nf.half_dim != model.dim - 1 {
        violations.push(Violation::HalfDimMismatch {
            half_dim: nf.half_dim,
            expected: model.dim - 1,
        });
    }
    if nf.block_sum() != nf.half_dim {
        violations.push(Violation::DimensionBudget {
            block_sum: nf.block_sum(),
            half_dim: nf.half_dim,
        });
    }
    for (list, angles) in [
        (AngleList::Rotations, &nf.rotations),
        (AngleList::NontrivialPairs, &nf.nontrivial_pairs),
        (AngleList::TrivialPairs, &nf.trivial_pairs),
    ] {
        let mut seen_rational = false;
        for (position, a) in angles.iter().enumerate() {
            if a.is_half() {
                violations.push(Violation::AngleIsHalf { list, position });
            }
            if a.is_rational() {
                seen_rational = true;
            } else if seen_rational {
                violations.push(Violation::IrrationalNotFirst { list, position });
            }
        }
    }
    if nf.h_minus > 1 {
        violations.push(Violation::HMinusRange {
            h_minus: nf.h_minus,
        });
    }
    let expected = index_parity(nf);
    if Parity::of(model.initial_index as i64) != expected {
        violations.push(Violation::IndexParity {
            index: model.initial_index,
            expected,
        });
    }
    ValidationReport { violations }
}

/// `ν(c) = p₋ + 2p₀ + p₊`.
pub fn initial_nullity(nf: &NormalFormData) -> u64 {
    nf.p_minus + 2 * nf.p_zero + nf.p_plus
}

pub fn index_parity(nf: &NormalFormData) -> Parity {
    let odd_blocks =
        nf.p_minus + nf.p_zero + nf.q_minus + nf.q_zero + nf.q_plus + nf.r() + nf.h_minus;
    Parity::of(odd_blocks as i64)
}

/// The four reference geodesics used throughout the tests and examples.
pub mod fixtures {
    use super::*;

    /// One rational rotation `1/3` plus one `N₁(1,1)` block on a 3-manifold.
    pub fn model_a() -> GeodesicModel {
        let mut nf = NormalFormData::empty(2);
        nf.rotations = vec![AngleRatio::rational(1, 3).unwrap()];
        nf.p_plus = 1;
        GeodesicModel {
            dim: 3,
            initial_index: 1,
            nf,
        }
    }

    /// A single golden-ratio rotation on a surface.
    pub fn model_b() -> GeodesicModel {
        let mut nf = NormalFormData::empty(1);
        nf.rotations = vec![AngleRatio::quadratic(-1, 1, 2, 5).unwrap()];
        GeodesicModel {
            dim: 2,
            initial_index: 1,
            nf,
        }
    }

    /// Hyperbolic `H(2)`.
    pub fn model_c() -> GeodesicModel {
        let mut nf = NormalFormData::empty(1);
        nf.h_plus = 1;
        GeodesicModel {
            dim: 2,
            initial_index: 2,
            nf,
        }
    }

    /// Hyperbolic `H(−2)`.
    pub fn model_d() -> GeodesicModel {
        let mut nf = NormalFormData::empty(1);
        nf.h_minus = 1;
        GeodesicModel {
            dim: 2,
            initial_index: 1,
            nf,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for m in [model_a(), model_b(), model_c(), model_d()] {
            assert!(validate_model(&m).is_valid(), "{:?}", validate_model(&m));
        }
    }

    #[test]
    fn parity_and_budget_violations() {
        let mut m = model_a();
        m.initial_index = 2;
        assert_eq!(
            validate_model(&m).violations,
            vec![Violation::IndexParity {
                index: 2,
                expected: Parity::Odd
            }]
        );

        let mut m = model_a();
        m.nf.p_plus = 2;
        assert_eq!(
            validate_model(&m).violations,
            vec![Violation::DimensionBudget {
                block_sum: 3,
                half_dim: 2
            }]
        );
    }

    #[test]
    fn single_field_perturbations_break_budget() {
        for m in [model_a(), model_b(), model_c(), model_d()] {
            for field in 0..8 {
                let mut p = m.clone();
                let nf = &mut p.nf;
                match field {
                    0 => nf.p_minus += 1,
                    1 => nf.p_zero += 1,
                    2 => nf.p_plus += 1,
                    3 => nf.q_minus += 1,
                    4 => nf.q_zero += 1,
                    5 => nf.q_plus += 1,
                    6 => nf.h_plus += 1,
                    _ => nf.half_dim += 1,
                }
                let report = validate_model(&p);
                assert!(!report.is_valid());
            }
        }
    }

    #[test]
    fn half_and_ordering_are_rejected() {
        let mut m = model_a();
        m.dim = 4;
        m.nf.half_dim = 3;
        m.nf.p_plus = 0;
        m.nf.rotations = vec![
            AngleRatio::rational(1, 3).unwrap(),
            AngleRatio::rational(1, 2).unwrap(),
            AngleRatio::quadratic(-1, 1, 2, 5).unwrap(),
        ];
        let v = validate_model(&m).violations;
        assert!(v.contains(&Violation::AngleIsHalf {
            list: AngleList::Rotations,
            position: 1
        }));
        assert!(v.contains(&Violation::IrrationalNotFirst {
            list: AngleList::Rotations,
            position: 2
        }));
    }

    #[test]
    fn nullity_and_parity_examples() {
        assert_eq!(initial_nullity(&model_a().nf), 1);
        assert_eq!(initial_nullity(&model_b().nf), 0);
        let mut nf = NormalFormData::empty(2);
        nf.p_zero = 2;
        assert_eq!(initial_nullity(&nf), 4);

        assert_eq!(index_parity(&model_a().nf), Parity::Odd);
        assert_eq!(index_parity(&model_c().nf), Parity::Even);
        assert_eq!(index_parity(&model_d().nf), Parity::Odd);
    }
}
