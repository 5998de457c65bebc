pub mod algebroid;
pub mod calculus;
pub mod dirac;
pub mod djacobi;
pub mod lebrun;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod linpair;
pub mod preq;
pub mod sample;
pub mod scalar;

pub use error::{Error, Result};
