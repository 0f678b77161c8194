// SPDX-License-Identifier: Apache-2.0

//! Algorithms for the Baumslag–Solitar groups `G(m,n) = ⟨a, b | a⁻¹ b^m a = b^n⟩`:
//! Britton reduction, conjugacy in `G(1,n)`, residual and separability
//! classification, finite quotients, and checkable separation witnesses.

pub mod conjugacy;
pub mod error;
pub mod numtheory;
pub mod presentation;
pub mod quotients;
pub mod witness;
pub mod words;

pub use conjugacy::{
    conjugacy_form, is_conjugate, is_conjugate_solvable, separate_conjugacy, separate_element, separate_element_with,
    ConjugacyForm, SearchLimits,
};
pub use error::{Error, Result};
pub use numtheory::{Factorization, PrimeSet, UnsolvableModulusBound};
pub use presentation::{GroupParams, Reason, SigmaDescription, Truth, Verdict, WitnessHint};
pub use quotients::{FiniteGroup, FiniteQuotient, Perm, PermQuotient, QuotientElement};
pub use witness::{verify, Claim, ClaimKind, Target, VerifyError, Witness};
pub use words::{britton_reduce, Generator, SolvableNormalForm, Syllable, Word};
