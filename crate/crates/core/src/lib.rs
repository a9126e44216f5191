//! Exact symbolic calculus for Lie and Courant algebroids over a countably
//! indexed coordinate space.
//!
//! Functions are sparse polynomials with rational coefficients in variables
//! `x0, x1, ...`; every object references finitely many coordinates. On top of
//! that sit differential forms and multivector fields, symplectic structures,
//! Lie algebroids with their Chevalley-Eilenberg differential, the
//! contravariant (Lichnerowicz-Poisson) differential, the generalized tangent
//! bundle with its Dorfman and Courant brackets, and truncated cohomology by
//! exact linear algebra.

pub mod algebroid;
pub mod blade;
pub mod calculus;
pub mod cohomology;
pub mod courant;
pub mod error;
pub mod graded;
pub mod linalg;
pub mod poly;
pub mod random;
pub mod scalar;
pub mod sigma;
pub mod symplectic;

pub use blade::Blade;
pub use error::{Error, Result};
pub use graded::{Co, Contra, Graded, KForm, KVector, Variance};
pub use poly::{Monomial, Poly, VarIndex};
pub use scalar::Scalar;
