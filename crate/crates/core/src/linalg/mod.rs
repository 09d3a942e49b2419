//! Exact scalars and linear algebra over Q and Q[t].

mod matrix;
pub mod poly;
mod smith;
pub mod sparse;
mod subquotient;

pub use matrix::{rational_inverse, row_reduce, CoefficientRing, ExactMatrix};
pub use poly::{parse_rational, rat, Rational, UniPoly};
pub use smith::{invariant_factors, smith_normal_form};
pub use sparse::{Echelon, SparseVec};
pub use subquotient::{normalize_torsion, subquotient, ModulePresentation, Subquotient};
