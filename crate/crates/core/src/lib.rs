//! Exact enumeration of permutations sortable by two stacks in series, and
//! numerical extension and analysis of the resulting generating function.
//!
//! The pipeline runs bottom-up:
//!
//! - [`machine`] simulates the sorting machine and provides brute-force
//!   oracles for small sizes.
//! - [`automata`] builds the automata that prune redundant operation
//!   sequences.
//! - [`enumerator`] counts achievable permutations with a sharded, parallel
//!   depth-first search and the binomial transform in [`series`].
//! - [`approximant`] fits differential approximants in exact rational
//!   arithmetic and extends a series.
//! - [`analysis`] estimates the growth rate, exponent and amplitude.

pub mod analysis;
pub mod approximant;
pub mod automata;
pub mod enumerator;
pub mod fixtures;
pub mod machine;
pub mod real;
pub mod series;
pub mod table;

pub use machine::{Letter, MachineState, Permutation, Word};
pub use series::{Approx, Series};
