//! Biextension heights of limit mixed Hodge structures and regularized
//! Néron pairings on elliptic curves over Q.

pub mod algebra;
pub mod cli;
pub mod degeneration;
pub mod analytic;
pub mod arith;
pub mod error;
pub mod estimate;
pub mod extrapolate;
pub mod global;
pub mod mhs;
pub mod nonarch;

pub use error::{Error, Result};
