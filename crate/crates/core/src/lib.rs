//! Gluing-parameter coordinates on moduli of stable marked disks, with
//! corner-aware numerical differentiation and decay-estimate verification.

pub mod coords;
pub mod dd;
pub mod error;
pub mod estimates;
pub mod jet;
pub mod maps;
pub mod plumbing;

pub use error::{Error, Result};
