//! Semimodulars and Luxemburg quasi-norms.

mod holder;
mod lebesgue;
mod median;
mod mixed;

pub use holder::{holder_norm, holder_seminorm, sup_norm};
pub use lebesgue::{
    holder_inequality_check, lebesgue_embedding_check, lebesgue_embedding_constant, luxemburg, luxemburg_on,
    luxemburg_weighted, modular, modular_weighted, quasi_triangle_check, rel_sandwich_check, unit_ball_check,
    DEFAULT_TOL,
};
pub use median::{median, median_bound_check};
pub use mixed::{
    lq_lp_closed_form, mixed_modular_lp_lq, mixed_modular_lq_lp, mixed_norm_lp_lq, mixed_norm_lq_lp,
    mixed_norm_lq_lp_definitional, monotonicity_check, pointwise_lq, SequenceSample,
};

use serde::{Deserialize, Serialize};

/// What a [`NormValue`] measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Modular,
    Luxemburg,
    MixedLqp,
    MixedPlq,
    HolderSeminorm,
    SupNorm,
}

/// A computed (quasi-)norm with the width of its final bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    #[serde(with = "crate::float")]
    pub value: f64,
    #[serde(with = "crate::float")]
    pub tolerance: f64,
    pub kind: NormKind,
}

impl NormValue {
    pub fn exact(value: f64, kind: NormKind) -> NormValue {
        NormValue { value, tolerance: 0.0, kind }
    }
}
