//! Exact lattice computations for exceptional toric systems on weak del Pezzo
//! surfaces: divisor arithmetic, root data, effectiveness, toric systems and
//! their transpositions and augmentations, exceptionality checks and
//! classification suites.

pub mod admissible;
pub mod augment;
pub mod checker;
pub mod classes;
pub mod classify;
pub mod effective;
pub mod error;
pub mod lattice;
mod quadratic;
pub mod surface;
pub mod toric;

pub use error::{Error, Result};
pub use lattice::{DivisorClass, LatticeMap, PicardLattice};
pub use surface::{Registry, Surface};
pub use toric::ToricSystem;
