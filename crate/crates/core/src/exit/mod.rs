//! EXIT-chart analysis.
//!
//! [`ExitFamily`] holds Monte Carlo transfer curves of the mother
//! constituent decoder over a range of channel-LLR spreads. From it,
//! [`exit_rep`] builds the curve of a repetition-matched Turbo code and
//! [`exit_ic`] the curve of an IC Turbo code under perfect coupled
//! knowledge. [`decoding_threshold`] bisects the SNR at which the tunnel
//! between two identical constituent curves opens.

mod curve;
mod jfunc;
mod mother;
mod threshold;

pub use curve::{
    first_tunnel_crossing, standard_grid, tunnel_open, ExitCurve, GRID_STEP, TUNNEL_END,
    TUNNEL_MARGIN,
};
pub use jfunc::{
    j_complement, j_function, j_inverse, j_inverse_complement, mutual_information_all_zero,
    mutual_information_from_llrs, J_SIGMA_MAX,
};
pub use mother::{
    generate_mother_exit, simulate_dummy_bit_exit, simulate_repetition_exit, ExitFamily,
    ExitSimConfig, FAMILY_STEP,
};
pub use threshold::*;
