use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::numerics::{integrate_regular, taylor_start};

/// Slow modulation of a scattering solution near a BSEC energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeatAnalysis {
    pub energy: f64,
    /// Median spacing of consecutive envelope minima.
    pub beat_period: f64,
    /// `(r, |phi|)` at every half-wave maximum.
    pub envelope: Vec<(f64, f64)>,
    /// Radii of the envelope minima.
    pub envelope_minima: Vec<f64>,
    /// Radii of the envelope maxima.
    pub envelope_maxima: Vec<f64>,
}

impl BeatAnalysis {
    /// `(max - min) / max` of the envelope beyond `r_from`.
    pub fn envelope_variation(&self, r_from: f64) -> f64 {
        let (lo, hi) = self
            .envelope
            .iter()
            .filter(|(r, _)| *r >= r_from)
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &(_, a)| (lo.min(a), hi.max(a)));
        if hi > 0.0 {
            (hi - lo) / hi
        } else {
            0.0
        }
    }
}

/// Half-wave maxima of `|phi|`, each refined by a parabola through the
/// neighbouring samples.
pub fn envelope_of(phi: &GridFunction) -> Vec<(f64, f64)> {
    let grid = phi.grid();
    let a: Vec<f64> = phi.samples().iter().map(|x| x.abs()).collect();
    let h = grid.h();
    (1..a.len() - 1)
        .filter(|&i| a[i] >= a[i - 1] && a[i] > a[i + 1])
        .map(|i| {
            let (l, c, r) = (a[i - 1], a[i], a[i + 1]);
            let denom = l - 2.0 * c + r;
            if denom < 0.0 {
                let t = 0.5 * (l - r) / denom;
                (grid.r(i) + t * h, c - 0.25 * (l - r) * t)
            } else {
                (grid.r(i), c)
            }
        })
        .collect()
}

fn local_extrema(env: &[(f64, f64)], minima: bool) -> Vec<f64> {
    let cmp = |x: f64, y: f64| if minima { x < y } else { x > y };
    let cmp_eq = |x: f64, y: f64| if minima { x <= y } else { x >= y };
    (1..env.len().saturating_sub(1))
        .filter(|&j| cmp(env[j].1, env[j - 1].1) && cmp_eq(env[j].1, env[j + 1].1))
        .map(|j| env[j].0)
        .collect()
}

/// Integrates the regular solution in `v` at `energy` and measures the
/// period of its envelope beats.
pub fn beating_analysis(v: &GridFunction, energy: f64) -> Result<BeatAnalysis> {
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::invalid(format!("beats need E > 0, got {energy}")));
    }
    let phi = integrate_regular(v, energy, taylor_start(v[0], energy, v.grid().h()))?;
    beats_of(&phi, energy)
}

/// Beat analysis of an already computed solution.
pub fn beats_of(phi: &GridFunction, energy: f64) -> Result<BeatAnalysis> {
    let envelope = envelope_of(phi);
    let minima = local_extrema(&envelope, true);
    let maxima = local_extrema(&envelope, false);
    if minima.len() < 3 {
        return Err(Error::NoBeats { found: minima.len() });
    }
    let mut gaps: Vec<f64> = minima.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(f64::total_cmp);
    let mid = gaps.len() / 2;
    let beat_period = if gaps.len() % 2 == 1 {
        gaps[mid]
    } else {
        0.5 * (gaps[mid - 1] + gaps[mid])
    };
    Ok(BeatAnalysis {
        energy,
        beat_period,
        envelope,
        envelope_minima: minima,
        envelope_maxima: maxima,
    })
}
