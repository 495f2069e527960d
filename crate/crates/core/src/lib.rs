//! Strength functions of quantum effect operators.
//!
//! An effect is a Hermitian operator `E` with `0 <= E <= I` in the Loewner
//! order. Its strength along a ray `phi` is the largest `lambda` with
//! `lambda P_phi <= E`; the map from effects to strength functions is an
//! order isomorphism, which this crate evaluates, verifies property by
//! property at desk scale, and inverts (reconstructing `E` from samples).

pub mod effect;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod lambda_range;
pub mod oracle;
pub mod reconstruct;
pub mod sampling;
pub mod strength;
pub mod suite;

pub use effect::{is_weak_atom, loewner_leq, make_effect, meet_with_ray, ray_projector};
pub use effect::{Effect, Ray, WeakAtomWitness};
pub use error::{Error, Result};
pub use hermitian::{
    eigh, is_psd, min_eigenvalue, range_projector, spectral_function, ComplexScalar,
    HermitianMatrix, SpectralDecomposition, Tolerances,
};
pub use lambda_range::{lambda_range_classify, numerical_range_check, LambdaRangeReport};
pub use oracle::{haar_rays, strength_by_bisection, structured_rays, RayGenerator};
pub use reconstruct::{distinguish, probe_rays, reconstruct_effect, ReconstructionResult};
pub use strength::{
    evaluate_strength, interpolation_pair, is_saturated, ray_in_sqrt_range, strength, witness_ray,
    InterpolationPair, StrengthEvaluation, StrengthSample,
};
