//! Value sets of n-point modifications of linear permutations over small
//! finite fields.
//!
//! The library builds the family of permutations f that agree with a linear
//! map g(x) = ax + b except on an ordered pole set of n points, studies
//! F = f + x through exact value-set statistics, enumerates the spectrum of
//! attained |V_F| over all instances for a given (q, n), and generates and
//! brute-force-verifies the explicit families with prescribed value sets
//! (small sets, complements, multiplicative cosets, complete mappings).

pub mod carlitz;
pub mod constructions;
pub mod family;
pub mod gf;

pub use carlitz::{decompose, CarlitzChain, CarlitzError, Decomposition, PoleSet, RecursionTable};
pub use family::{
    enumerate_spectrum, interpolate, is_permutation, sum_of_values, FamilyError, FamilyInstance,
    LinearMap, SpectrumMode, SpectrumOptions, SpectrumReport, ValueProfile,
};
pub use gf::{FieldCtx, FieldElement, GfError};
