pub mod algebra;
mod axioms;
pub mod cohomology;
pub mod error;
pub mod fixtures;
pub mod genexact;
pub mod linalg;
pub mod model;
pub mod modelfile;

pub use error::{CourantError, Result};
pub use linalg::{CoefficientRing, ExactMatrix, ModulePresentation, Rational, UniPoly};
pub use model::CourantModel;
