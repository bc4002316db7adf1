//! Randomly weighted d-complexes in the complete complex `K_n`: sampling,
//! path neighbourhoods, cocycle ranks, statistics, difference operators,
//! Monte Carlo estimators and closed-form normal-approximation bounds.
//!
//! Vertices are 0-based throughout; d-simplices and (d-1)-simplices are
//! addressed by colexicographic rank.

pub mod bounds;
pub mod cohomology;
pub mod complex;
pub mod config;
pub mod error;
pub mod harness;
pub mod perturbation;
pub mod rng;
pub mod sampling;
pub mod statistics;
pub mod topology;

pub use complex::{Ambient, Simplex, SimplexRank, SubComplexView, WeightedComplex};
pub use error::{Error, Result};
pub use sampling::{ForcedBits, ModelParams, PairedSample, WeightDistribution};
pub use config::{ExperimentConfig, Mode};
pub use statistics::{parse_statistic, Statistic};
