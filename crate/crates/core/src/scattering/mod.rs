//! Continuum side: bound states embedded in the continuum, phase shifts,
//! envelope beats, truncation resonances and block rearrangement.

mod beats;
mod bsec;
mod phase;
mod rearrange;
mod resonance;

pub use beats::{beating_analysis, beats_of, envelope_of, BeatAnalysis};
pub use bsec::{
    build_bsec_free, build_bsec_numeric, free_gathering_potential, free_p, BsecSystem,
};
pub use phase::{
    linspace, nearest_branch, phase_shift, phase_shift_counted, reduce_phase, scan_phase,
    unwrap_phases, PhaseShiftScan, MAX_CONDITION,
};
pub use rearrange::{rearrange_blocks, slots_from, BlockSlot, Rearrangement};
pub use resonance::{snap_to_knot, truncate_and_width, ResonanceEstimate};
