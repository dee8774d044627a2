//! Exact admissibility checking for finite families of probabilistic requirements.
//!
//! A requirement set over named events is parsed from a small DSL, rewritten
//! over atom probabilities, and decided exactly: either an atom distribution
//! satisfying everything, or a certificate of infeasibility that can be
//! checked independently and turned into a betting game.

pub mod atomize;
pub mod certificates;
pub mod dutchbook;
pub mod error;
pub mod events;
pub mod feasibility;
pub mod numeric;
pub mod requirements;

pub use error::{Error, Result};
