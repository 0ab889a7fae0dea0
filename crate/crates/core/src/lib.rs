//! Smooth finite soluble quotients of ordinary triangle groups.
//!
//! For `G = <x, y | x^p = y^q = (xy)^r = 1>` this crate computes the
//! abelianisation, the signature of the derived subgroup `G'`, which of the
//! eight possible compact shapes it has, the minimum derived length `c` of
//! a smooth finite soluble quotient, whether there are finitely many such
//! quotients at length `c`, and explicit normal series witnessing every
//! derived length `>= c`.
//!
//! All arithmetic is exact. Closed forms are cross-checked against an
//! integer Smith-normal-form oracle ([`oracle`]), whose matrices are generic
//! over the entry type ([`arith::Scalar`]): machine integers for fast scans,
//! [`BigInt`] where nothing may overflow.

pub mod arith;
pub mod classify;
mod error;
pub mod oracle;
pub mod report;
pub mod signature;
pub mod tower;
pub mod triangle;

use num_bigint::BigInt;
use num_rational::BigRational;

pub use classify::{
    chetiya_case, infinitude_at_c, min_derived_length, Branch, ClassificationReport, Verdict,
};
pub use error::{Error, Result};
pub use signature::{
    format_signature, normal_transfer, parse_signature, rh_index, FuchsianSignature,
};
pub use tower::{
    fuchsian_abelianisation, km_kernel, macbeath_step, macbeath_tower, witness_chain,
    AbelianStructure, WitnessChain,
};
pub use triangle::{
    abelianisation, curvature_class, derived_signature, is_perfect, signature_case,
    AbelianisationReport, CaseForm, Curvature, TriangleParams,
};

/// Exact rational numbers with unbounded numerator and denominator.
pub type ExactRational = BigRational;

/// Integer matrix with unbounded entries; never overflows.
pub type BigMatrix = oracle::IntegerMatrix<BigInt>;

/// Integer matrix with `i64` entries; arithmetic is checked and reports
/// [`Error::Overflow`].
pub type MachineMatrix = oracle::IntegerMatrix<i64>;

/// Abelianisation computed over unbounded integers.
pub type BigFpAbelianisation = oracle::FpAbelianisation<BigInt>;
