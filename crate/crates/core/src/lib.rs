//! Identification of Rayleigh-damped second-order systems from frequency
//! response samples with the second-order Loewner framework, plus the
//! classical first-order Loewner baseline, SVD-based order reduction and a
//! grid search for unknown damping coefficients.
//!
//! Typical flow: sample or read a [`SampleSet`], [`partition`] it into right
//! and left data, build the pencil with [`build_so_loewner`] and reduce it
//! with [`identify_so_reduced`].

pub mod benchgen;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod loewner_fo;
pub mod loewner_so;
pub mod paramfit;
pub mod sampling;
pub mod systems;

pub use error::{Error, Result};
pub use linalg::{numerical_rank, CMatrix, CVector, SvdTruncation, Truncation};
pub use loewner_fo::{build_fo_loewner, identify_fo, FoMode, LoewnerPair};
pub use loewner_so::{
    build_so_loewner, identify_so_exact, identify_so_reduced, realify, SoLoewnerData, SoPencil,
};
pub use num_complex::Complex64;
pub use sampling::{partition, FrequencySample, PartitionStrategy, PartitionedData, SampleSet};
pub use systems::{DampingParams, FirstOrderSystem, SecondOrderSystem, TransferFunction};
