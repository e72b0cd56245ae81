//! Exact bisimulation and logic toolkit for finite nondeterministic labeled
//! Markov processes (NLMPs).
//!
//! State spaces are finite, σ-algebras are stored as atom partitions and
//! every probability is an exact rational. The crate computes traditional,
//! state and event bisimilarity, evaluates the two-level probabilistic
//! modal logic and synthesizes distinguishing formulas.

pub mod bisim;
pub mod enumerate;
pub mod error;
pub mod logic;
pub mod measurable;
pub mod measures;
pub mod model;
pub mod random;
pub mod rational;
pub mod stateset;
pub mod text;

pub use error::{Error, Result};
pub use measurable::{Partition, Relation, SigmaAlgebra, Universe};
pub use measures::{BoundSpec, Measure, MeasurePool, Profile};
pub use model::{Lmp, Nlmp, ValidationReport};
pub use rational::Rational;
pub use stateset::StateSet;
