//! Exact linear algebra over prime fields: compressed Krylov matrices,
//! characteristic polynomials and Kalman controllability decompositions.
//!
//! Two routes are implemented for the Kalman form: a multiplication-driven
//! doubling scheme (`kalman::kalman_kg`) and a cubic recursive variant built
//! on matrix-vector Krylov iterates (`kalman::kalman_luk`). Both are checked
//! against brute-force oracles in the test suites.

pub mod charpoly;
pub mod densemat;
mod error;
pub mod factor;
pub mod ffield;
pub mod gen;
pub mod kalman;
pub mod krylov;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
