//! Dimensions of linear systems of hypersurfaces with general fat points.
//!
//! * [`combinatorics`]: exact binomials, virtual dimensions and thresholds.
//! * [`systems`]: the `L_{r,d}(...)` data model, the table of special
//!   systems, and symbolic transformations.
//! * [`oracle`]: dimension by rank of the interpolation matrix over `F_p`.
//! * [`prover`]: certificates for non-speciality and their checker.
//! * [`cli`]: the `fatpoints` command line.

mod bigjson;
pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod oracle;
pub mod prover;
pub mod systems;

pub use error::{Error, Result};
pub use systems::LinearSystem;
