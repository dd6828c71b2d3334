//! Seeded generator of valid geodesic models for property checks.

#![allow(dead_code)]

use geodex::exact::AngleRatio;
use geodex::index::mean_index;
use geodex::normal_form::{validate_model, GeodesicModel, NormalFormData};
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const RADICANDS: [i64; 4] = [2, 3, 5, 7];

pub fn rational_angle(rng: &mut ChaCha8Rng, max_den: i64) -> AngleRatio {
    loop {
        let den = rng.gen_range(3..=max_den);
        let num = rng.gen_range(1..den);
        if let Ok(a) = AngleRatio::rational(num, den) {
            if !a.is_half() {
                return a;
            }
        }
    }
}

/// `(a + b√D)/c` in `(0,1)`: with `f = ⌊b√D⌋`, exactly the `a` in `[−f, c−f−1]` qualify.
pub fn quadratic_angle(
    rng: &mut ChaCha8Rng,
    radicands: &[i64],
    max_b: i64,
    max_c: i64,
) -> AngleRatio {
    loop {
        let d = radicands[rng.gen_range(0..radicands.len())];
        let b = loop {
            let b = rng.gen_range(-max_b..=max_b);
            if b != 0 {
                break b;
            }
        };
        let c = rng.gen_range(1..=max_c);
        let root = BigInt::from(b * b * d).sqrt();
        let f: i64 = if b > 0 {
            root.try_into().unwrap()
        } else {
            -i64::try_from(root).unwrap() - 1
        };
        let a = rng.gen_range(-f..=c - f - 1);
        if let Ok(x) = AngleRatio::quadratic(a, b, c, d) {
            return x;
        }
    }
}

fn angle(rng: &mut ChaCha8Rng, irrational_share: f64) -> AngleRatio {
    if rng.gen_bool(irrational_share) {
        quadratic_angle(rng, &RADICANDS, 3, 12)
    } else {
        rational_angle(rng, 30)
    }
}

fn irrational_first(list: &mut [AngleRatio]) {
    list.sort_by_key(|a| a.is_rational());
}

/// Smallest initial index keeping every ω-index nonnegative for the block
/// mix, padded to the right parity.
fn realizable_index(nf: &NormalFormData, parity_odd: bool) -> u64 {
    let half = AngleRatio::rational(1, 2).unwrap().value();
    let small_rotations = nf.rotations.iter().filter(|b| b.value() < half).count() as i64;
    let need = small_rotations + (nf.q_zero + nf.q_plus) as i64 + 2 * nf.r_star() as i64
        - (nf.p_minus + nf.p_zero) as i64;
    let mut i = need.max(0) as u64;
    if (i % 2 == 1) != parity_odd {
        i += 1;
    }
    i
}

/// A random valid model with positive mean index.
pub fn random_model(rng: &mut ChaCha8Rng) -> GeodesicModel {
    loop {
        let dim = rng.gen_range(2..=7u64);
        let half = dim - 1;
        let mut nf = NormalFormData::empty(half);
        let irrational_share = rng.gen_range(0.0..0.7);
        let mut left = half;
        while left > 0 {
            let pick = rng.gen_range(0..12);
            match pick {
                0 => nf.p_minus += 1,
                1 => nf.p_zero += 1,
                2 => nf.p_plus += 1,
                3 => nf.q_minus += 1,
                4 => nf.q_zero += 1,
                5 => nf.q_plus += 1,
                6..=8 => nf.rotations.push(angle(rng, irrational_share)),
                9 if left >= 2 => nf.nontrivial_pairs.push(angle(rng, irrational_share)),
                10 if left >= 2 => nf.trivial_pairs.push(angle(rng, irrational_share)),
                11 if nf.h_minus == 0 && rng.gen_bool(0.5) => nf.h_minus = 1,
                _ => nf.h_plus += 1,
            }
            left = half - nf.block_sum().min(half);
            if nf.block_sum() > half {
                break;
            }
        }
        if nf.block_sum() != half {
            continue;
        }
        irrational_first(&mut nf.rotations);
        irrational_first(&mut nf.nontrivial_pairs);
        irrational_first(&mut nf.trivial_pairs);
        let odd = geodex::normal_form::index_parity(&nf) == geodex::normal_form::Parity::Odd;
        let initial_index = realizable_index(&nf, odd) + 2 * rng.gen_range(0..=1u64);
        let model = GeodesicModel {
            dim,
            initial_index,
            nf,
        };
        assert!(validate_model(&model).is_valid(), "{model:?}");
        if mean_index(&model).is_positive() {
            return model;
        }
    }
}
