//! Hajłasz gradients: constraint systems, minimal gradients and the Sobolev,
//! Triebel–Lizorkin and Besov quasi-norms built from them.

mod barrier;
pub mod checks;
pub mod gradient;
pub mod levels;
pub mod lipschitz;

pub use gradient::{
    minimal_scalar_gradient, minimal_vector_gradient, minimal_vector_gradient_with, scalar_certificate,
    scalar_constraints, vector_certificate, vector_constraints, Coefficients, Gradient, GradientSolution,
    PairConstraint, Scale, GRADIENT_TOL,
};
pub use levels::{active_levels, level_of};
pub use checks::{
    ball_embedding_check, embedding_chain_check, gradient_zero_implies_constant, iterative_lemma_check,
    norm_convention_equivalence, oscillation_constant, zeta_constant, BallEmbeddingReport, ChainReport,
    ConventionReport, IterativeReport, ZeroGradientReport,
};
pub use lipschitz::{a1_constant, a2_constant, lipschitz_cutoff_gradient, lipschitz_level, LipschitzReport};
