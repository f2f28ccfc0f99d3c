//! LTE Turbo codes and information-coupled (IC) Turbo codes.
//!
//! The crate covers the whole transport-block chain: CRC attachment,
//! segmentation with information coupling and dummy-bit insertion, Turbo
//! encoding, repetition rate matching, BPSK over AWGN, and the two inter-CB
//! decoders (feed-forward/feed-back and windowed). EXIT-chart tooling
//! predicts decoding thresholds, and [`sim`] drives Monte Carlo sweeps.
//!
//! Soft-value code is generic over [`Llr`] (`f32`/`f64`); rate arithmetic is
//! generic over any numeric type and has an exact rational instantiation.

pub mod channel;
pub mod crc;
mod error;
pub mod exit;
pub mod ic;
pub mod rate_matching;
mod scalar;
pub mod sim;
pub mod turbo;

pub use error::{Error, Result};
pub use scalar::{Llr, LLR_SATURATION};

/// A hard bit, `0` or `1`.
pub type Bit = u8;

/// Exact rational used for rate identities.
pub type Rational = num_rational::Ratio<i64>;

pub type LlrFrame64 = turbo::LlrFrame<f64>;
pub type LlrFrame32 = turbo::LlrFrame<f32>;
pub type TurboDecodeOutput64 = turbo::TurboDecodeOutput<f64>;
