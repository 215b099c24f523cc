//! Recovery of block-constant binary matrices from erased and bit-flipped
//! observations.
//!
//! The pipeline is: [`generator`] samples a matrix with equal-size clusters,
//! [`channel`] erases and flips entries, [`clusterer`] recovers row and
//! column partitions, and [`decoder`] takes a majority vote per cluster.
//! [`decoder`] and [`bounds`] evaluate the decoder's error probability
//! exactly and in closed form; [`experiment`] estimates it by Monte Carlo.

pub mod bounds;
pub mod channel;
pub mod cli;
pub mod clusterer;
pub mod decoder;
pub mod error;
pub mod experiment;
pub mod generator;
pub mod io;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
pub use model::{
    BlockConstantMatrix, ChannelParams, GenerationLaw, ObservedMatrix, Partition, Symbol, TiePolicy,
};
