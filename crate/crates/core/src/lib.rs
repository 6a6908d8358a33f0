//! Weighted Steklov eigenvalues and weighted isoperimetric inequalities on
//! planar domains.

pub mod ball;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod isoperimetry;
pub mod params;
pub mod quadrature;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
