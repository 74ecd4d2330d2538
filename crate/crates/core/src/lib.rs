pub mod cells;
pub mod error;
pub mod geometry;
pub mod homotopy;
pub mod matrix;
pub mod mpoly;
pub mod osculating;
pub mod partitions;
pub mod poly;
pub mod scalar;
pub mod solver;

pub use error::{Error, Result};
