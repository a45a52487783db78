//! Point-source expansions in the complex plane, R² and R³: basis
//! evaluation, the structured moment matrices behind their uniqueness,
//! R³→R² reduction integrals, and a numerical probe of the mixed-pole
//! C matrix.

pub mod cli;
pub mod complex_basis;
pub mod config;
pub mod error;
pub mod geometry;
pub mod independence;
pub mod linalg;
pub mod probe;
pub mod quadrature;
pub mod real_basis;
pub mod reduction;
pub mod sampling;
pub mod simplex;
pub mod structured;

pub use error::{Error, Result};
