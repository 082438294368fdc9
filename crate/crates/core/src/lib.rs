//! Exact p-adic arithmetic in the cyclotomic tower, Volkenborn distributions
//! and integration, norm-coherent sequences and Gauss-sum interpolation.

pub mod characters;
pub mod cli;
pub mod coherent;
pub mod cyclo;
pub mod error;
pub mod interp;
pub mod padic;
pub mod volkenborn;

pub use characters::DirichletCharacter;
pub use cyclo::{CycloElement, FieldContext};
pub use error::{Error, Result};
pub use padic::{PadicScalar, Valuation};
