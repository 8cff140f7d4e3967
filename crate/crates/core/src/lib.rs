//! Cubical homology and exterior calculus for vortex theory.

pub mod complex;
pub mod dynamics;
pub mod error;
pub mod forms;
pub mod grid;
pub mod integrate;
pub mod kinematics;
pub mod scenarios;
pub mod vortex;

pub use error::{Error, Result};
