//! Cyclic representations of the Weyl algebra at odd roots of unity, their
//! Clebsch-Gordan operators, 6j-symbols, charged 6j-symbols and the
//! tetrahedral invariants built from them.

pub mod charged;
pub mod core_numerics;
pub mod cyclic_dilog;
pub mod error;
pub mod intertwiners;
pub mod linalg;
pub mod sampling;
pub mod special_functions;
pub mod tetra;
pub mod verify;
pub mod weyl_reps;

pub use core_numerics::{Context, C64};
pub use error::{Error, Result};
