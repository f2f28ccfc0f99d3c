//! LTE mother Turbo code: constituent encoders, QPP interleaver, exact
//! log-MAP constituent decoding and the iterative decoder.

mod bcjr;
mod decoder;
mod encoder;
mod interleaver;
mod qpp_table;
mod trellis;

pub use bcjr::{bcjr_decode, bcjr_decode_into, BcjrOutput, BcjrWorkspace};
pub use decoder::{LlrFrame, TurboDecodeOutput, TurboDecoder};
pub use encoder::{cc_encode, terminate, turbo_encode, TurboCodeword, TAIL_LEN};
pub use interleaver::{is_valid_block_length, qpp_coefficients, valid_block_lengths, Interleaver};
pub use trellis::{Trellis, TrellisSpec, LTE_TRELLIS_SPEC};

/// Mother code rate, ignoring tail overhead.
pub const MOTHER_RATE: f64 = 1.0 / 3.0;
