//! Adaptive solution prediction: a linear classifier guides a probabilistic
//! sampler whose pool of best solutions feeds back statistical features.
//! Backends cover maximum weight clique, TSP and orienteering, plus column
//! generation for graph colouring with the sampler as pricer.

pub mod colgen;
pub mod engine;
pub mod error;
pub mod features;
pub mod instances;
pub mod ml;
pub mod pool;
pub mod problems;

pub use engine::{asp_run, uniform_init, AspConfig, AspOutcome, AspTrace};
pub use error::{Error, Result};
pub use ml::{Calibration, LinearModel, ModelFile, TrainConfig, TrainingExample};
pub use problems::{Problem, ProblemKind, Sense};
