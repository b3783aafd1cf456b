//! Toolkit for directed block designs with block size 4: verification,
//! cyclic development, directed trades and defining-set bounds, exact
//! defining-set search, and recursive constructions.

pub mod catalog;
pub mod constructions;
pub mod defset;
pub mod development;
pub mod error;
pub mod format;
pub mod model;
pub mod trades;
pub mod verify;

pub use error::{Error, Result};
