use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use super::bsec::BsecSystem;
use super::phase::{counted_phase, linspace};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, RadialGrid};
use crate::numerics::{integrate_regular, taylor_start};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceEstimate {
    /// Truncation radius after snapping to a knot.
    pub r_cut: f64,
    pub e_r: f64,
    pub gamma: f64,
    /// RMS deviation (radians) of the scanned phase from the Breit-Wigner
    /// form over `E_r +- 3 Gamma`.
    pub fit_quality: f64,
}

/// Largest single-step phase rise accepted as resolved.
const RESOLVED_STEP: f64 = PI / 8.0;
const MAX_ZOOMS: usize = 12;

struct TruncatedPotential {
    v: GridFunction,
    window: (f64, f64),
}

impl TruncatedPotential {
    fn phase(&self, energy: f64) -> Result<f64> {
        let phi = integrate_regular(&self.v, energy, taylor_start(self.v[0], energy, self.v.grid().h()))?;
        counted_phase(&phi, energy.sqrt(), self.window)
    }

    fn scan(&self, energies: &[f64]) -> Result<Vec<f64>> {
        energies.par_iter().map(|&e| self.phase(e)).collect()
    }
}

/// Knot of `sys.psi` nearest to `r_cut`.
pub fn snap_to_knot(sys: &BsecSystem, r_cut: f64) -> Result<f64> {
    sys.knots()
        .into_iter()
        .min_by(|a, b| (a - r_cut).abs().total_cmp(&(b - r_cut).abs()))
        .ok_or_else(|| Error::invalid("BSEC wavefunction has no knots on its grid"))
}

/// Potential of `sys` with everything beyond `r_cut` removed, on a grid
/// extended far enough past the cut to match the free asymptote.
fn truncated(sys: &BsecSystem, r_cut: f64, k_min: f64) -> Result<TruncatedPotential> {
    let wavelength = 2.0 * PI / k_min;
    let grid: RadialGrid = sys.grid().resized(r_cut + 3.0 * wavelength)?;
    let h = grid.h();
    let samples = (0..grid.n_points())
        .map(|i| {
            let r = grid.r(i);
            if r > r_cut || i >= sys.v.len() {
                0.0
            } else {
                sys.v[i]
            }
        })
        .collect();
    Ok(TruncatedPotential {
        v: GridFunction::new(grid, samples)?,
        window: (r_cut + h, grid.r_max()),
    })
}

/// Cuts the gathering potential at the knot nearest `r_cut` and locates the
/// resulting resonance in `energy_window`.
///
/// The phase is node-counted, so a resonance narrower than the scan step
/// still shows up as a jump of about `pi`; the scan then zooms into the
/// steepest step until it is resolved. `E_r` is the point of steepest rise
/// and `Gamma = 2 / (d delta / dE)` there.
pub fn truncate_and_width(
    sys: &BsecSystem,
    r_cut: f64,
    energy_window: (f64, f64),
    n_scan: usize,
) -> Result<ResonanceEstimate> {
    let (e_lo, e_hi) = energy_window;
    if !(e_lo > 0.0 && e_hi > e_lo) {
        return Err(Error::invalid(format!(
            "energy window [{e_lo}, {e_hi}] must be increasing and positive"
        )));
    }
    if n_scan < 5 {
        return Err(Error::invalid("need at least 5 scan energies"));
    }
    let r_cut = snap_to_knot(sys, r_cut)?;
    let pot = truncated(sys, r_cut, e_lo.sqrt())?;

    let (mut lo, mut hi) = (e_lo, e_hi);
    let mut energies;
    let mut phases;
    let mut steepest;
    let mut zooms = 0;
    loop {
        energies = linspace(lo, hi, n_scan);
        phases = pot.scan(&energies)?;
        steepest = (0..n_scan - 1)
            .max_by(|&i, &j| {
                (phases[i + 1] - phases[i]).total_cmp(&(phases[j + 1] - phases[j]))
            })
            .unwrap();
        let rise = phases[steepest + 1] - phases[steepest];
        if rise <= RESOLVED_STEP || zooms == MAX_ZOOMS {
            break;
        }
        lo = energies[steepest.saturating_sub(1)];
        hi = energies[(steepest + 2).min(n_scan - 1)];
        zooms += 1;
    }

    // steepest point from a parabola through the three neighbouring slopes
    let slope_at = |i: usize| (phases[i + 1] - phases[i]) / (energies[i + 1] - energies[i]);
    let step = energies[1] - energies[0];
    let mut e_r = 0.5 * (energies[steepest] + energies[steepest + 1]);
    if steepest >= 1 && steepest + 2 < n_scan {
        let (l, c, r) = (slope_at(steepest - 1), slope_at(steepest), slope_at(steepest + 1));
        let denom = l - 2.0 * c + r;
        if denom < 0.0 {
            e_r += (0.5 * (l - r) / denom).clamp(-1.0, 1.0) * step;
        }
    }
    let eps = 0.25 * step;
    let slope = (pot.phase(e_r + eps)? - pot.phase(e_r - eps)?) / (2.0 * eps);
    if !(slope > 0.0) {
        return Err(Error::NoResonance { lo: e_lo, hi: e_hi });
    }
    let gamma = 2.0 / slope;

    // a resonance rises by ~pi across a few widths; background alone does not
    let reach = (5.0 * gamma).min(0.5 * (e_hi - e_lo));
    let left = (e_r - reach).max(e_lo);
    let right = (e_r + reach).min(e_hi);
    let rise = pot.phase(right)? - pot.phase(left)?;
    if rise < FRAC_PI_2 {
        return Err(Error::NoResonance { lo: e_lo, hi: e_hi });
    }

    let center = pot.phase(e_r)?;
    let offsets = [-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0];
    let probes: Vec<f64> = offsets.iter().map(|o| e_r + o * gamma).collect();
    let measured = pot.scan(&probes)?;
    let sq: f64 = probes
        .iter()
        .zip(&measured)
        .map(|(&e, &d)| {
            let model = center + (2.0 * (e - e_r) / gamma).atan();
            (d - model).powi(2)
        })
        .sum();
    Ok(ResonanceEstimate {
        r_cut,
        e_r,
        gamma,
        fit_quality: (sq / offsets.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::bsec::build_bsec_free;

    #[test]
    fn truncation_snaps_to_knots() {
        let g = RadialGrid::with_step(80.0, 1e-2).unwrap();
        let sys = build_bsec_free(1.0, 1.0, &g).unwrap();
        let r = snap_to_knot(&sys, 20.0 * PI + 0.7).unwrap();
        assert!((r - 20.0 * PI).abs() < g.h());
    }

    #[test]
    fn free_potential_has_no_resonance() {
        let g = RadialGrid::with_step(80.0, 1e-2).unwrap();
        let sys = build_bsec_free(1.0, 0.0, &g).unwrap();
        let r = truncate_and_width(&sys, 10.0 * PI, (0.9, 1.1), 41);
        assert!(matches!(r, Err(Error::NoResonance { .. })), "{r:?}");
    }

    #[test]
    fn pre_truncated_input_is_idempotent() {
        let g = RadialGrid::with_step(100.0, 1e-2).unwrap();
        let sys = build_bsec_free(1.0, 1.0, &g).unwrap();
        let first = truncate_and_width(&sys, 10.0 * PI, (0.9, 1.1), 81).unwrap();
        let mut cut = sys.clone();
        let cut_samples: Vec<f64> = g
            .radii()
            .zip(sys.v.samples())
            .map(|(r, &v)| if r > first.r_cut { 0.0 } else { v })
            .collect();
        cut.v = GridFunction::new(g, cut_samples).unwrap();
        let second = truncate_and_width(&cut, 10.0 * PI, (0.9, 1.1), 81).unwrap();
        assert_eq!(first, second);
    }
}
