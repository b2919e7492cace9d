//! Negativity and statistical correlators (mutual predictability, mutual information,
//! Pearson correlation) for parametric two-qudit mixed states measured in a fixed pair
//! of mutually unbiased bases.

pub mod characterization;
pub mod correlators;
pub mod density;
pub mod error;
pub mod figures;
pub mod linalg;
pub mod measurement;
pub mod states;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
