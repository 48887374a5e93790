//! Conical 2-designs on a finite-dimensional Hilbert space.
//!
//! Construction, verification and classification of designs, Bloch-body geometry,
//! the Gram-projector picture of homogeneous designs with a contraction search, and
//! symmetric decompositions of separable Werner and isotropic states.

// negated comparisons reject NaN in range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bloch;
pub mod constructors;
pub mod design;
pub mod error;
pub mod io;
pub mod operator;
pub mod polytope;
pub mod random;
pub mod werner;

pub use bloch::{
    bloch_norm, body_membership, from_bloch, kappa_max_direction, to_bloch, BlochVector, Membership,
};
pub use constructors::{
    mub_prime, mum_counterexample, mum_inball, random_rotate, scale_design, sic_fixture, sic_kets,
    sim_inball, theorem3_design,
};
pub use design::{
    classify, expand_operator, induced_povm, verify, Classification, ConicalDesign,
    DesignParameters, VerificationReport,
};
pub use error::{Error, Result};
pub use operator::{BipartiteOperator, HermitianOperator, SuperoperatorMatrix};
pub use polytope::{
    cp_search, gram_projector, validate_projector, verify_bloch_one_design, DesignProjector,
    SearchConfig, SearchResult,
};
pub use werner::{
    isotropic_state, symmetric_decomposition, verify_decomposition, werner_isotropic_transform,
    werner_state, DecompositionReport, Target,
};
