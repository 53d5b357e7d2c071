//! Spectral-weight transformations of the radial Schrödinger equation
//! `-phi'' + V phi = E phi` on `r >= 0` (units with `hbar^2/2m = 1`).
//!
//! Changing the weight `psi'(E, 0)^2` of a single state moves where that state
//! lives without moving any energy level. The same construction applied at a
//! continuum energy gathers a scattering wave toward the origin and produces
//! a bound state embedded in the continuum (BSEC).
//!
//! Modules, bottom up:
//! - [`grid`], [`numerics`]: uniform grids, Numerov integration, Simpson
//!   quadrature, differences and zero finding.
//! - [`potentials`]: initial potentials and small-r starts.
//! - [`transform`]: the weight change itself.
//! - [`spectrum`]: bound states, centroids and barrier/well blocks.
//! - [`scattering`]: BSEC systems, phase shifts, beats, truncation widths and
//!   block rearrangement.
//! - [`io`]: CSV formats shared with the command-line tool.

pub mod error;
pub mod grid;
pub mod io;
pub mod numerics;
pub mod potentials;
pub mod scattering;
pub mod spectrum;
pub mod transform;

pub use error::{Error, Result};
pub use grid::{GridFunction, RadialGrid};
pub use potentials::{Boundary, PotentialModel};
pub use scattering::{
    beating_analysis, build_bsec_free, build_bsec_numeric, phase_shift, rearrange_blocks,
    scan_phase, truncate_and_width, BeatAnalysis, BlockSlot, BsecSystem, PhaseShiftScan,
    Rearrangement, ResonanceEstimate,
};
pub use spectrum::{
    centroid, decompose_blocks, find_bound_states, find_bound_states_in, shift_report, Block,
    BlockDecomposition, BoundState, LevelShift, ShiftReport, Sign,
};
pub use transform::{
    apply_weight_change, compute_p, norm_constant, transform_chosen, transform_potential,
    transform_potential_logform, transform_solution, ChosenState, NewWeight, TransformResult,
    WeightChange,
};
