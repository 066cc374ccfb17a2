//! Computations in odd-dimensional unitary groups `U_{2n+1}(K, Delta)` over
//! finite Hermitian form fields.

pub mod elementary;
pub mod factor;
pub mod field;
pub mod form_ring;
pub mod level;
pub mod presets;
pub mod sharpness;
pub mod text;
pub mod unitary;

pub use field::{Elem, FieldCtx, FieldError, HermitianScalars, InvolutionKind, ScalarError};
pub use form_ring::{Descriptor, FormError, FormParameter, FormSetup, HPair, HermitianField, Sign};
pub use unitary::{NonMember, UMatrix, UVector};
