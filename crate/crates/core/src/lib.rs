//! Coxeter systems and their combinatorics: presentations, finite-type
//! recognition, the word problem, parabolic subgroups, and the density and
//! lemma checks built on them.

pub mod classify;
pub mod cli;
pub mod hypothesis;
pub mod parabolic;
pub mod error;
pub mod system;
pub mod words;

pub use error::{CoxError, Result};
