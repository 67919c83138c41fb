//! Exact machinery for nilpotent-orbit Fourier coefficients of SL(3)/SL(4)
//! Eisenstein series and the E6/E7/E8 minimal-representation spherical vector checks.

pub mod characters;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod expand;
pub mod matrix;
pub mod orbits;
pub mod spherical;

pub use error::{Error, Result};
pub use exactnum::Rational;
pub use matrix::RationalMatrix;
pub use orbits::Partition;
