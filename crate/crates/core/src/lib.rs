//! μ-ordinary reduction of cyclic covers of the projective line: predicted
//! Newton polygons from monodromy data, actual Newton polygons from point
//! counts, the a_p invariant, and symbolic component trace functions.

pub mod cm;
pub mod counting;
pub mod cyclotomic;
pub mod error;
pub mod ffield;
pub mod harness;
pub mod invariant;
pub mod newton;
pub mod padic;
pub mod weyl;

pub use error::{Error, Result};
