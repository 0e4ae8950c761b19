//! Keyed distortion-based secrecy for scalar sources.
//!
//! A source value `Y` is mapped by a secret key `K` to a bin `tau`. A
//! receiver holding the key decodes exactly; an eavesdropper sees only
//! `tau` and estimates `Y` by its posterior mean. Codes are judged by the
//! eavesdropper's mean squared error `D_ach` against the no-observation
//! error `D_max = var(Y)`.
//!
//! - [`encoders`]: greedy and exchange-based code construction.
//! - [`analysis`]: posterior, distortion and bound checks.
//! - [`search`]: exhaustive search for the optimal code on small alphabets.
//! - [`multisource`]: several independently keyed sources and separable
//!   functions of them.
//! - [`simulation`]: Monte Carlo estimates of `D_ach`.

pub mod alphabet;
pub mod analysis;
pub mod cli;
pub mod code;
pub mod config;
pub mod encoders;
pub mod error;
pub mod multisource;
pub mod scalar;
pub mod search;
pub mod simulation;

pub use alphabet::SourceAlphabet;
pub use analysis::{bound_report, DistortionReport};
pub use code::KeyedCode;
pub use encoders::{build_code, Algorithm};
pub use error::{Error, Result};
pub use scalar::Scalar;
