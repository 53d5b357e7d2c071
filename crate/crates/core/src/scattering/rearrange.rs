use std::f64::consts::PI;

use serde::Serialize;

use super::beats::envelope_of;
use super::bsec::BsecSystem;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numerics::{integrate_regular, taylor_start};
use crate::potentials::PotentialModel;

/// Content of one inter-knot slot after rearrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockSlot {
    /// The original block with this index.
    Block(usize),
    /// Zero potential.
    Zero,
}

#[derive(Debug, Clone)]
pub struct Rearrangement {
    pub v_new: GridFunction,
    /// Regular solution of `v_new` at `E_b`.
    pub psi_new: GridFunction,
    /// Peak `|psi_new|` in each complete block of the grid.
    pub block_envelope: Vec<f64>,
    pub gathered: bool,
}

/// Relative slack in the non-increasing envelope test.
const ENVELOPE_SLACK: f64 = 1e-6;

/// Permutes (or blanks) the first `slots.len()` blocks of a free-model BSEC
/// potential and re-integrates at `E_b`.
///
/// `gathered` holds when the per-block peaks of the new solution do not grow
/// across any block boundary beyond the rearranged region, and the last
/// complete block on the grid stays below the largest peak inside the
/// rearranged region.
pub fn rearrange_blocks(sys: &BsecSystem, slots: &[BlockSlot]) -> Result<Rearrangement> {
    if sys.model != PotentialModel::FreeHalfAxis {
        return Err(Error::invalid(
            "block rearrangement needs equal block widths (free initial model only)",
        ));
    }
    let n_blocks = slots.len();
    let mut seen = vec![false; n_blocks];
    for slot in slots {
        if let BlockSlot::Block(i) = *slot {
            if i >= n_blocks || std::mem::replace(&mut seen[i], true) {
                return Err(Error::invalid(format!(
                    "block permutation {slots:?} is not a bijection on 0..{n_blocks}"
                )));
            }
        }
    }
    let grid = *sys.grid();
    let width = PI / sys.k_b;
    let total = (grid.r_max() / width).floor() as usize;
    if n_blocks == 0 || n_blocks >= total {
        return Err(Error::invalid(format!(
            "{n_blocks} blocks requested but the grid holds {total} complete blocks"
        )));
    }
    let knots = sys.knots();
    if knots
        .iter()
        .take(n_blocks)
        .enumerate()
        .any(|(j, &r)| (r - (j + 1) as f64 * width).abs() > grid.h())
    {
        return Err(Error::invalid("knots of the BSEC are not equally spaced"));
    }

    let samples = grid
        .radii()
        .enumerate()
        .map(|(i, r)| {
            let slot = (r / width).floor() as usize;
            if slot >= n_blocks {
                return Ok(sys.v[i]);
            }
            match slots[slot] {
                BlockSlot::Zero => Ok(0.0),
                BlockSlot::Block(src) if src == slot => Ok(sys.v[i]),
                BlockSlot::Block(src) => sys.v.interpolate(r + (src as f64 - slot as f64) * width),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let v_new = GridFunction::new(grid, samples)?;
    let energy = sys.energy();
    let psi_new = integrate_regular(&v_new, energy, taylor_start(v_new[0], energy, grid.h()))?;

    let mut block_envelope = vec![0.0_f64; total];
    for (r, a) in envelope_of(&psi_new) {
        let j = (r / width).floor() as usize;
        if j < total {
            block_envelope[j] = block_envelope[j].max(a);
        }
    }
    let tail_ok = block_envelope[n_blocks..]
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + ENVELOPE_SLACK));
    let inner_peak = block_envelope[..n_blocks].iter().copied().fold(0.0, f64::max);
    let gathered = tail_ok && block_envelope[total - 1] < inner_peak;
    Ok(Rearrangement {
        v_new,
        psi_new,
        block_envelope,
        gathered,
    })
}

/// Slots from a permutation of block indices with some positions blanked.
pub fn slots_from(permutation: &[usize], zeroed: &[usize]) -> Vec<BlockSlot> {
    permutation
        .iter()
        .enumerate()
        .map(|(pos, &src)| {
            if zeroed.contains(&pos) {
                BlockSlot::Zero
            } else {
                BlockSlot::Block(src)
            }
        })
        .collect()
}
