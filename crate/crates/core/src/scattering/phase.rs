use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numerics::{integrate_regular, taylor_start};

/// Matching is rejected above this condition number.
pub const MAX_CONDITION: f64 = 1e8;

/// Reduce an angle modulo `pi` into `(-pi/2, pi/2]`.
pub fn reduce_phase(delta: f64) -> f64 {
    let mut d = delta.rem_euclid(PI);
    if d > FRAC_PI_2 {
        d -= PI;
    }
    d
}

/// Shift `delta` by a multiple of `pi` to land nearest `reference`.
pub fn nearest_branch(delta: f64, reference: f64) -> f64 {
    delta + ((reference - delta) / PI).round() * PI
}

/// Least-squares fit `k phi(r) = a sin(k r) + b cos(k r)` over the grid nodes
/// in `[r1, r2]`, i.e. `phi = A sin(k r + delta) / k` with `a = A cos(delta)`,
/// `b = A sin(delta)`. A window holding two nodes is the classic two-point
/// match.
pub(crate) fn fit_asymptote(phi: &GridFunction, k: f64, window: (f64, f64)) -> Result<(f64, f64)> {
    let (r1, r2) = window;
    let grid = phi.grid();
    if !(r1 >= 0.0 && r2 > r1 && r2 <= grid.r_max() * (1.0 + 1e-12)) {
        return Err(Error::invalid(format!(
            "matching window [{r1}, {r2}] must lie inside [0, {}]",
            grid.r_max()
        )));
    }
    let (mut ss, mut sc, mut cc, mut ys, mut yc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let first = (r1 / grid.h() - 1e-9).ceil().max(0.0) as usize;
    let last = ((r2 / grid.h() + 1e-9).floor() as usize).min(grid.n_points() - 1);
    if last < first + 1 {
        return Err(Error::DegenerateMatch { cond: f64::INFINITY });
    }
    for i in first..=last {
        let (s, c) = (k * grid.r(i)).sin_cos();
        let y = k * phi[i];
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ys += y * s;
        yc += y * c;
    }
    let det = ss * cc - sc * sc;
    let half_trace = 0.5 * (ss + cc);
    let spread = (0.25 * (ss - cc).powi(2) + sc * sc).sqrt();
    let cond = (half_trace + spread) / (half_trace - spread).max(0.0);
    if !(cond <= MAX_CONDITION) || det == 0.0 {
        return Err(Error::DegenerateMatch { cond });
    }
    Ok(((ys * cc - yc * sc) / det, (yc * ss - ys * sc) / det))
}

/// Phase shift of the fitted asymptote, reduced to `(-pi/2, pi/2]`.
pub(crate) fn matched_phase(phi: &GridFunction, k: f64, window: (f64, f64)) -> Result<f64> {
    let (a, b) = fit_asymptote(phi, k, window)?;
    Ok(reduce_phase(b.atan2(a)))
}

/// Phase shift on the branch fixed by counting the nodes of `phi`: the Prüfer
/// angle `theta` (`tan theta = k phi / phi'`) at a reference point minus
/// `k r`. Continuous in energy, so no unwrapping is needed.
pub(crate) fn counted_phase(phi: &GridFunction, k: f64, window: (f64, f64)) -> Result<f64> {
    let (a, b) = fit_asymptote(phi, k, window)?;
    let grid = phi.grid();
    // reference node: largest |phi| within the first half-wave of the window
    let first = (window.0 / grid.h()).ceil() as usize;
    let span = ((PI / k) / grid.h()).ceil() as usize + 1;
    let last = (first + span).min(grid.n_points() - 1);
    let i_ref = (first..=last)
        .max_by(|&i, &j| phi[i].abs().total_cmp(&phi[j].abs()))
        .unwrap_or(first);
    let r_ref = grid.r(i_ref);
    let mut crossings = 0usize;
    let mut sign = 0.0_f64;
    for &x in &phi.samples()[1..=i_ref] {
        if x != 0.0 {
            if sign != 0.0 && x.signum() != sign {
                crossings += 1;
            }
            sign = x.signum();
        }
    }
    let (s, c) = (k * r_ref).sin_cos();
    let value = a * s + b * c; // k phi
    let slope = a * c - b * s; // phi'
    let sgn = if value != 0.0 { value.signum() } else { sign };
    let alpha = (value * sgn).atan2(slope * sgn);
    Ok(crossings as f64 * PI + alpha - k * r_ref)
}

fn regular_solution(v: &GridFunction, energy: f64) -> Result<GridFunction> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::invalid(format!(
            "phase shifts need a continuum energy E > 0, got {energy}"
        )));
    }
    integrate_regular(v, energy, taylor_start(v[0], energy, v.grid().h()))
}

/// Phase shift at `E = k^2` from the regular solution in `v`, matched to
/// `A sin(k r + delta)` over `window`. Reduced to `(-pi/2, pi/2]`.
///
/// The potential must be regular at the origin and negligible, or decaying
/// with oscillations, inside the window; Coulomb tails are not handled.
pub fn phase_shift(v: &GridFunction, energy: f64, window: (f64, f64)) -> Result<f64> {
    let phi = regular_solution(v, energy)?;
    matched_phase(&phi, energy.sqrt(), window)
}

/// Node-counted phase shift (no `mod pi` ambiguity).
pub fn phase_shift_counted(v: &GridFunction, energy: f64, window: (f64, f64)) -> Result<f64> {
    let phi = regular_solution(v, energy)?;
    counted_phase(&phi, energy.sqrt(), window)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftScan {
    pub energies: Vec<f64>,
    /// Reduced to `(-pi/2, pi/2]`.
    pub deltas: Vec<f64>,
    /// Same values shifted by multiples of `pi` for continuity.
    pub unwrapped: Vec<f64>,
    pub window: (f64, f64),
}

impl PhaseShiftScan {
    pub fn matching_radius(&self) -> f64 {
        self.window.0
    }
}

/// Continuity unwrapping of phases defined modulo `pi`.
pub fn unwrap_phases(deltas: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let next = match out.last() {
            Some(&prev) => nearest_branch(d, prev),
            None => d,
        };
        out.push(next);
    }
    out
}

/// [`phase_shift`] over many energies (computed in parallel, returned in
/// input order).
pub fn scan_phase(v: &GridFunction, energies: &[f64], window: (f64, f64)) -> Result<PhaseShiftScan> {
    let deltas = energies
        .par_iter()
        .map(|&e| phase_shift(v, e, window))
        .collect::<Result<Vec<_>>>()?;
    Ok(PhaseShiftScan {
        energies: energies.to_vec(),
        unwrapped: unwrap_phases(&deltas),
        deltas,
        window,
    })
}

/// `n` evenly spaced energies on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
