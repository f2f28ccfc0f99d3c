//! Information-coupled Turbo codes: parameters, construction, transmission
//! and inter-CB decoding.

mod decode;
mod layout;
mod params;
mod transmit;

pub use decode::{
    block_count_ratio, complexity_report, intra_cb_decode, CouplingMessages, DecodeStats,
    IcDecoder, InterCbConfig, InterCbOutput, IntraCbOutput, MessageSchedule,
};
pub use layout::{
    build_layouts, cb_layout, coupled_positions, reassemble, segment_and_couple, BoundaryKind,
    CbLayout,
};
pub use params::{
    effective_code_rate, effective_code_rate_exact, solve_code_parameters, standard_block_lengths,
    CodeParameters,
};
pub use transmit::{
    route_channel_llrs, select_transmitted_bits, transmitted_slots, CbTransmission, CodedSlot,
    IcTransmission, SharedRoute,
};
