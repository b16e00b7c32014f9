//! Exact p-adic algebra for θ-algebras, λ-rings, Mahler expansions,
//! q-expansions and procyclic group cohomology.

pub mod error;
pub mod padic;
pub mod poly;
pub mod theta;
pub mod lambda;
pub mod mahler;
pub mod qseries;
pub mod cohomology;
pub mod checks;

pub use error::{Error, Result};
pub use padic::PadicInt;
