//! Uniform radial grids and functions sampled on them.

use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform grid `r_i = i * h` on `[0, r_max]` with an odd number of points,
/// so that composite Simpson applies to the whole range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialGrid {
    r_max: f64,
    n_points: usize,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 9;

    pub fn new(r_max: f64, n_points: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::invalid(format!("r_max must be positive, got {r_max}")));
        }
        if n_points < Self::MIN_POINTS || n_points % 2 == 0 {
            return Err(Error::invalid(format!(
                "n_points must be odd and >= {}, got {n_points}",
                Self::MIN_POINTS
            )));
        }
        Ok(Self { r_max, n_points })
    }

    /// Smallest odd-point grid on `[0, r_max]` whose step does not exceed `h`.
    pub fn with_step(r_max: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::invalid(format!("step must be positive, got {h}")));
        }
        let intervals = (r_max / h).ceil().max(8.0) as usize;
        let intervals = intervals + intervals % 2;
        Self::new(r_max, intervals + 1)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn h(&self) -> f64 {
        self.r_max / (self.n_points - 1) as f64
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.h()
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.h();
        (0..self.n_points).map(move |i| i as f64 * h)
    }

    /// Index of the grid point nearest to `r`, clamped to the grid.
    pub fn nearest_index(&self, r: f64) -> usize {
        let i = (r / self.h()).round();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.n_points - 1)
        }
    }

    /// Same step, truncated or extended to cover `[0, r_max]` (rounded up to
    /// keep the point count odd).
    pub fn resized(&self, r_max: f64) -> Result<Self> {
        let h = self.h();
        let intervals = (r_max / h - 1e-9).ceil().max(8.0) as usize;
        let intervals = intervals + intervals % 2;
        Self::new(intervals as f64 * h, intervals + 1)
    }

    pub(crate) fn same_as(&self, other: &RadialGrid) -> bool {
        self.n_points == other.n_points
            && (self.r_max - other.r_max).abs() <= 1e-12 * self.r_max.max(other.r_max)
    }
}

/// A real function sampled at every point of a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: RadialGrid,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: RadialGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} points",
                samples.len(),
                grid.n_points()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { radius: grid.r(i) });
        }
        Ok(Self { grid, samples })
    }

    /// Caller guarantees length and finiteness.
    pub(crate) fn from_vec_unchecked(grid: RadialGrid, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), grid.n_points());
        Self { grid, samples }
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.radii().map(f).collect())
    }

    pub fn constant(grid: RadialGrid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.n_points()])
    }

    pub fn zeros(grid: RadialGrid) -> Self {
        Self::from_vec_unchecked(grid, vec![0.0; grid.n_points()])
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Self::new(
            self.grid,
            self.samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.map(|v| v * factor)
    }

    pub fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "grids differ: ({}, {}) vs ({}, {})",
                self.grid.r_max(),
                self.grid.n_points(),
                other.grid.r_max(),
                other.grid.n_points()
            )))
        }
    }

    /// Linear interpolation; `r` outside the grid is an error.
    pub fn interpolate(&self, r: f64) -> Result<f64> {
        let h = self.grid.h();
        let last = self.samples.len() - 1;
        let x = r / h;
        if !(x >= -1e-9 && x <= last as f64 + 1e-9) {
            return Err(Error::GridMismatch(format!(
                "r = {r} outside [0, {}]",
                self.grid.r_max()
            )));
        }
        let i = (x.floor().max(0.0) as usize).min(last - 1);
        let t = (x - i as f64).clamp(0.0, 1.0);
        Ok(self.samples[i] * (1.0 - t) + self.samples[i + 1] * t)
    }

    /// Resample onto another grid by linear interpolation.
    pub fn resample(&self, grid: RadialGrid) -> Result<Self> {
        let samples = grid
            .radii()
            .map(|r| self.interpolate(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(grid, samples)
    }

    /// Restriction to (or zero-extension onto) a grid with the same step.
    pub fn with_grid_prefix(&self, grid: RadialGrid) -> Result<Self> {
        if (grid.h() - self.grid.h()).abs() > 1e-12 * self.grid.h() {
            return Err(Error::GridMismatch("steps differ".into()));
        }
        let samples = (0..grid.n_points())
            .map(|i| self.samples.get(i).copied().unwrap_or(0.0))
            .collect();
        Self::new(grid, samples)
    }
}

impl std::ops::Index<usize> for GridFunction {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.samples[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_even_or_tiny_grids() {
        assert!(RadialGrid::new(1.0, 10).is_err());
        assert!(RadialGrid::new(1.0, 7).is_err());
        assert!(RadialGrid::new(0.0, 11).is_err());
        assert!(RadialGrid::new(1.0, 11).is_ok());
    }

    #[test]
    fn grid_points_start_at_origin() {
        let g = RadialGrid::new(2.0, 21).unwrap();
        assert_eq!(g.r(0), 0.0);
        assert!((g.h() - 0.1).abs() < 1e-15);
        assert!((g.r(20) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn with_step_is_odd_and_fine_enough() {
        let g = RadialGrid::with_step(std::f64::consts::PI, 1e-3).unwrap();
        assert_eq!(g.n_points() % 2, 1);
        assert!(g.h() <= 1e-3);
    }

    #[test]
    fn non_finite_samples_rejected() {
        let g = RadialGrid::new(1.0, 9).unwrap();
        let mut s = vec![0.0; 9];
        s[3] = f64::NAN;
        assert!(matches!(GridFunction::new(g, s), Err(Error::NonFinite { .. })));
        assert!(GridFunction::new(g, vec![0.0; 8]).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_linear() {
        let g = RadialGrid::new(1.0, 11).unwrap();
        let f = GridFunction::from_fn(g, |r| 3.0 * r - 1.0).unwrap();
        assert!((f.interpolate(0.537).unwrap() - 0.611).abs() < 1e-12);
        assert!(f.interpolate(1.5).is_err());
    }
}
