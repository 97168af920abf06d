//! Executable skeleton of SYZ mirror symmetry: singular integral affine bases,
//! Landau-Ginzburg superpotentials, wall-crossing, tropical rays and special
//! Lagrangian numerics for quadratic differentials.

pub mod affine_base;
pub mod catalog;
pub mod error;
pub mod geom;
pub mod guide;
pub mod rational;
pub mod report;
pub mod slag_numeric;
pub mod superpotential;
pub mod svg;
pub mod tropical;
pub mod wallcross;

pub use error::{Error, Result};
