//! Exact index iteration engine and identity verifier for closed geodesics.
//!
//! Every result path uses integer and rational arithmetic; irrational angle
//! ratios are quadratic surds handled through integer square roots.

pub mod betti;
pub mod cli;
pub mod error;
pub mod exact;
pub mod index;
pub mod ledger;
pub mod normal_form;
pub mod quasi;

pub use error::{Error, Result};
pub use exact::{AngleRatio, QuadraticRatio, Rational, RationalRatio, SurdSum};
pub use normal_form::{fixtures, validate_model, GeodesicModel, NormalFormData};
