//! Self-consistent stationary states, degeneracies and transport of a
//! two-band Chern insulator with a Kerr-type nonlinearity.

pub mod cli;
pub mod dynamics;
pub mod effective;
pub mod error;
pub mod model;
pub mod response;
pub mod spectrum;

pub use error::{Error, Result};
