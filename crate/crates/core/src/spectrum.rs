//! Bound states by shooting, localization metrics and the block structure of
//! a potential perturbation.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result, ResultExt};
use crate::grid::{GridFunction, RadialGrid};
use crate::numerics::{
    definite_integral, integrate_regular, numerov_next, numerov_weights, taylor_start,
};
use crate::potentials::{Boundary, PotentialModel};
use crate::transform::{knots_with_ends, transform_bound_state, NewWeight, TransformResult};

#[derive(Debug, Clone)]
pub struct BoundState {
    /// Level index, interior node count + 1.
    pub nu: usize,
    pub energy: f64,
    /// Unit-normalized wavefunction.
    pub psi: GridFunction,
    /// Spectral weight `psi'(0)^2`.
    pub c_sq: f64,
}

impl BoundState {
    /// The regular solution `psi / c` (unit slope at the origin).
    pub fn regular(&self) -> Result<GridFunction> {
        self.psi.scaled(1.0 / self.c_sq.sqrt())
    }
}

const RENORM_AT: f64 = 1e150;
const EIGEN_RTOL: f64 = 1e-13;

struct Shooter<'a> {
    v: &'a [f64],
    grid: RadialGrid,
    boundary: Boundary,
    start: &'a (dyn Fn(f64) -> (f64, f64) + Sync),
}

impl Shooter<'_> {
    /// Prüfer phase at `r_max` minus the phase the `nu`-th eigenfunction must
    /// reach there. Increasing in `E`, zero at the eigenvalue.
    fn mismatch(&self, energy: f64, nu: usize) -> f64 {
        let n = self.grid.n_points();
        let h = self.grid.h();
        let w = numerov_weights(self.v, energy, h);
        let (a, b) = (self.start)(energy);
        // rolling window of the last three samples
        let (mut f0, mut f1, mut f2) = (0.0, a, b);
        let mut sign = a.signum();
        let mut crossings = 0usize;
        let note = |x: f64, sign: &mut f64, crossings: &mut usize| {
            if x != 0.0 {
                if x.signum() != *sign {
                    *crossings += 1;
                }
                *sign = x.signum();
            }
        };
        note(b, &mut sign, &mut crossings);
        for i in 2..n - 1 {
            let mut next = numerov_next(w[i - 1], w[i], w[i + 1], f1, f2);
            if next.abs() > RENORM_AT {
                f1 /= RENORM_AT;
                f2 /= RENORM_AT;
                next /= RENORM_AT;
            }
            f0 = f1;
            f1 = f2;
            f2 = next;
            note(next, &mut sign, &mut crossings);
        }
        let d = (3.0 * f2 - 4.0 * f1 + f0) / (2.0 * h);
        let alpha = (f2 * sign).atan2(d * sign);
        let target = match self.boundary {
            Boundary::HardWall => std::f64::consts::PI,
            Boundary::Decaying => {
                let kappa = (self.v[n - 1] - energy).max(0.0).sqrt();
                1.0_f64.atan2(-kappa)
            }
        };
        (crossings as f64 * std::f64::consts::PI + alpha)
            - ((nu - 1) as f64 * std::f64::consts::PI + target)
    }

    fn eigenvalue(&self, nu: usize, lo: f64, hi: f64) -> Result<f64> {
        if self.mismatch(hi, nu) < 0.0 {
            return Err(Error::InsufficientSpectrum {
                found: nu - 1,
                wanted: nu,
                ceiling: hi,
            });
        }
        let (mut lo, mut hi) = (lo, hi);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if self.mismatch(mid, nu) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= EIGEN_RTOL * mid.abs().max(1.0) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Regular solution at an eigenvalue, with the forbidden-region tail
    /// taken from an inward sweep when the boundary is decaying.
    fn eigenfunction(&self, energy: f64) -> Result<Vec<f64>> {
        let v = GridFunction::from_vec_unchecked(self.grid, self.v.to_vec());
        match self.boundary {
            Boundary::HardWall => {
                let mut out = integrate_regular(&v, energy, (self.start)(energy))?.into_samples();
                *out.last_mut().unwrap() = 0.0;
                Ok(out)
            }
            Boundary::Decaying => {
                let n = self.grid.n_points();
                let turning = self
                    .v
                    .iter()
                    .rposition(|&x| x < energy)
                    .unwrap_or(n / 2)
                    .clamp(4, n - 4);
                let w = numerov_weights(self.v, energy, self.grid.h());
                let mut out = vec![0.0; n];
                let (a, b) = (self.start)(energy);
                out[1] = a;
                out[2] = b;
                for i in 2..turning {
                    out[i + 1] = numerov_next(w[i - 1], w[i], w[i + 1], out[i - 1], out[i]);
                }
                let mut inward = vec![0.0; n];
                inward[n - 2] = 1e-200;
                for i in (turning..n - 1).rev() {
                    inward[i - 1] = numerov_next(w[i + 1], w[i], w[i - 1], inward[i + 1], inward[i]);
                    if inward[i - 1].abs() > RENORM_AT {
                        inward[i - 1..].iter_mut().for_each(|x| *x /= RENORM_AT);
                    }
                }
                let scale = out[turning] / inward[turning];
                for i in turning + 1..n {
                    out[i] = inward[i] * scale;
                }
                Ok(out)
            }
        }
    }
}

/// Lowest `count` bound states of a sampled potential.
///
/// Shooting on the Prüfer phase (node count plus phase within the current
/// half-wave), bisected to `1e-13` relative; `start` supplies
/// `(phi(h), phi(2h))` at a given energy.
pub fn find_bound_states_with(
    v: &GridFunction,
    boundary: Boundary,
    count: usize,
    start: &(dyn Fn(f64) -> (f64, f64) + Sync),
) -> Result<Vec<BoundState>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let grid = *v.grid();
    let interior = &v.samples()[1..];
    let v_min = interior.iter().copied().fold(f64::INFINITY, f64::min);
    let v_max = interior.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ceiling = v_max + 4.0 * (std::f64::consts::PI * count as f64 / grid.r_max()).powi(2);
    let shooter = Shooter {
        v: v.samples(),
        grid,
        boundary,
        start,
    };
    (1..=count)
        .into_par_iter()
        .map(|nu| {
            let energy = shooter.eigenvalue(nu, v_min, ceiling)?;
            let phi = GridFunction::new(grid, shooter.eigenfunction(energy)?)?;
            let norm = definite_integral(&phi.map(|x| x * x)?);
            let c_sq = 1.0 / norm;
            Ok(BoundState {
                nu,
                energy,
                psi: phi.scaled(c_sq.sqrt())?,
                c_sq,
            })
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|states| match states.windows(2).find(|w| w[1].energy <= w[0].energy) {
            Some(w) => Err(Error::InsufficientSpectrum {
                found: w[0].nu,
                wanted: count,
                ceiling,
            }),
            None => Ok(states),
        })
}

/// Bound states of a sampled potential, started from the Taylor series with
/// the potential's origin sample.
pub fn find_bound_states_in(v: &GridFunction, boundary: Boundary, count: usize) -> Result<Vec<BoundState>> {
    let v_origin = v[0];
    let h = v.grid().h();
    find_bound_states_with(v, boundary, count, &move |e| taylor_start(v_origin, e, h))
}

pub fn find_bound_states(model: &PotentialModel, grid: &RadialGrid, count: usize) -> Result<Vec<BoundState>> {
    let boundary = model.boundary().ok_or(Error::InsufficientSpectrum {
        found: 0,
        wanted: count,
        ceiling: f64::INFINITY,
    })?;
    let v = model.evaluate(grid)?;
    let h = grid.h();
    find_bound_states_with(&v, boundary, count, &|e| model.small_r_series(e, h))
}

/// Mean position `<r> = int r psi^2 / int psi^2`.
pub fn centroid(psi: &GridFunction) -> f64 {
    let grid = psi.grid();
    let sq = GridFunction::from_vec_unchecked(*grid, psi.samples().iter().map(|x| x * x).collect());
    let weighted = GridFunction::from_vec_unchecked(
        *grid,
        grid.radii().zip(sq.samples()).map(|(r, s)| r * s).collect(),
    );
    definite_integral(&weighted) / definite_integral(&sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Block {
    pub interval: (f64, f64),
    pub sign_pattern: Vec<Sign>,
    pub barrier_peak: f64,
    pub well_depth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDecomposition {
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn patterns(&self) -> Vec<Vec<Sign>> {
        self.blocks.iter().map(|b| b.sign_pattern.clone()).collect()
    }
}

/// Relative noise floor below which a sample counts as zero.
pub const LOBE_FLOOR: f64 = 1e-9;

/// Splits `delta_v` at `knots` (which should include both end points) and
/// records the ordered signs of its lobes between each pair.
pub fn decompose_blocks(delta_v: &GridFunction, knots: &[f64]) -> BlockDecomposition {
    let floor = LOBE_FLOOR * delta_v.max_abs();
    let grid = delta_v.grid();
    let mut sorted = knots.to_vec();
    sorted.sort_by(f64::total_cmp);
    let blocks = sorted
        .windows(2)
        .map(|k| {
            let (a, b) = (k[0], k[1]);
            let mut pattern: Vec<Sign> = Vec::new();
            let (mut peak, mut depth) = (0.0_f64, 0.0_f64);
            // the perturbation vanishes on the knots themselves
            let (lo, hi) = (a + 0.5 * grid.h(), b - 0.5 * grid.h());
            for (r, &x) in grid.radii().zip(delta_v.samples()) {
                if r < lo || r > hi {
                    continue;
                }
                peak = peak.max(x);
                depth = depth.min(x);
                if x.abs() <= floor {
                    continue;
                }
                let s = if x > 0.0 { Sign::Plus } else { Sign::Minus };
                if pattern.last() != Some(&s) {
                    pattern.push(s);
                }
            }
            Block {
                interval: (a, b),
                sign_pattern: pattern,
                barrier_peak: peak,
                well_depth: depth,
            }
        })
        .collect();
    BlockDecomposition { blocks }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelShift {
    pub nu: usize,
    pub energy_before: f64,
    pub energy_after: f64,
    pub centroid_before: f64,
    pub centroid_after: f64,
}

#[derive(Debug, Clone)]
pub struct ShiftReport {
    pub transform: TransformResult,
    pub chosen: usize,
    pub levels: Vec<LevelShift>,
}

impl ShiftReport {
    pub fn blocks(&self) -> BlockDecomposition {
        decompose_blocks(&self.transform.delta_v, &knots_with_ends(&self.transform.phi0_nu))
    }
}

/// Changes the weight of level `chosen`, then solves the transformed
/// potential from scratch and compares the lowest `levels` states.
pub fn shift_report(
    model: &PotentialModel,
    chosen: usize,
    new_weight: NewWeight,
    grid: &RadialGrid,
    levels: usize,
) -> Result<ShiftReport> {
    if chosen == 0 {
        return Err(Error::invalid("levels are numbered from 1"));
    }
    let boundary = model
        .boundary()
        .ok_or_else(|| Error::invalid(format!("{model} has no bound states")))?;
    let v0 = model.evaluate(grid)?;
    let before = find_bound_states(model, grid, levels.max(chosen))
        .context(|| format!("spectrum of {model}"))?;
    let transform = transform_bound_state(&v0, &before[chosen - 1], new_weight)?;
    let after = find_bound_states_in(&transform.v, boundary, levels)
        .context(|| "spectrum of the transformed potential".to_string())?;
    let levels = before
        .iter()
        .zip(&after)
        .map(|(b, a)| LevelShift {
            nu: b.nu,
            energy_before: b.energy,
            energy_after: a.energy,
            centroid_before: centroid(&b.psi),
            centroid_after: centroid(&a.psi),
        })
        .collect();
    Ok(ShiftReport {
        transform,
        chosen,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn well(width: f64, n: usize) -> (PotentialModel, RadialGrid) {
        (
            PotentialModel::InfiniteWell { width },
            RadialGrid::new(width, n).unwrap(),
        )
    }

    #[test]
    fn infinite_well_spectrum() {
        let (m, g) = well(PI, 3001);
        let states = find_bound_states(&m, &g, 4).unwrap();
        for s in &states {
            let exact = (s.nu * s.nu) as f64;
            assert!((s.energy - exact).abs() < 1e-8 * exact, "{} vs {exact}", s.energy);
            let norm = definite_integral(&s.psi.map(|x| x * x).unwrap());
            assert!((norm - 1.0).abs() < 1e-8);
            let nodes = knots_with_ends(&s.psi).len() - 2;
            assert_eq!(nodes, s.nu - 1);
        }
        let ground = &states[0];
        let amp = (2.0 / PI).sqrt();
        for (r, v) in g.radii().zip(ground.psi.samples()) {
            assert!((v - amp * r.sin()).abs() < 1e-6);
        }
        assert!((ground.c_sq - 2.0 / PI).abs() < 1e-8);
    }

    #[test]
    fn wider_well_scales_as_inverse_square() {
        let (m, g) = well(2.0 * PI, 6001);
        let states = find_bound_states(&m, &g, 3).unwrap();
        for s in &states {
            let exact = (s.nu * s.nu) as f64 / 4.0;
            assert!((s.energy - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn linear_potential_airy_levels() {
        // -phi'' + r phi = E phi on the half-axis: E_n = -a_n (Airy zeros)
        let m = PotentialModel::Linear { slope: 1.0 };
        let g = RadialGrid::new(16.0, 8001).unwrap();
        let states = find_bound_states(&m, &g, 3).unwrap();
        let airy = [2.338_107_410_459_767, 4.087_949_444_130_97, 5.520_559_828_095_551];
        for (s, e) in states.iter().zip(airy) {
            assert!((s.energy - e).abs() < 1e-7, "{} vs {e}", s.energy);
            assert!(s.psi[g.n_points() - 1].abs() < 1e-8);
        }
    }

    #[test]
    fn free_model_has_no_bound_states() {
        let g = RadialGrid::new(10.0, 101).unwrap();
        assert!(find_bound_states(&PotentialModel::FreeHalfAxis, &g, 1).is_err());
    }

    #[test]
    fn centroid_examples() {
        let g = RadialGrid::new(PI, 2001).unwrap();
        let psi = GridFunction::from_fn(g, |r| (2.0 / PI).sqrt() * r.sin()).unwrap();
        assert!((centroid(&psi) - PI / 2.0).abs() < 1e-8);
        let half = GridFunction::from_fn(g, |r| if r <= PI / 2.0 { (2.0 * r).sin() } else { 0.0 }).unwrap();
        assert!((centroid(&half) - PI / 4.0).abs() < 1e-6);
        let skew = GridFunction::from_fn(g, |r| r * r * r.sin()).unwrap();
        let c = centroid(&skew);
        assert!(c > 0.0 && c < PI);
    }

    #[test]
    fn blocks_of_zero_perturbation_are_empty() {
        let g = RadialGrid::new(PI, 101).unwrap();
        let d = decompose_blocks(&GridFunction::zeros(g), &[0.0, PI / 2.0, PI]);
        assert_eq!(d.blocks.len(), 2);
        assert!(d.blocks.iter().all(|b| b.sign_pattern.is_empty()));
    }

    #[test]
    fn left_shift_blocks_are_well_then_barrier() {
        use Sign::*;
        let (m, g) = well(PI, 3001);
        for nu in [1usize, 2] {
            let report = shift_report(&m, nu, NewWeight::Ratio(2.0), &g, 2).unwrap();
            let blocks = report.blocks();
            assert_eq!(blocks.blocks.len(), nu);
            for b in &blocks.blocks {
                assert_eq!(b.sign_pattern, vec![Minus, Plus]);
                assert!(b.barrier_peak > 0.0 && b.well_depth < 0.0);
            }
            let mirror = shift_report(&m, nu, NewWeight::Ratio(0.5), &g, 2).unwrap();
            for b in &mirror.blocks().blocks {
                assert_eq!(b.sign_pattern, vec![Plus, Minus]);
            }
        }
    }

    #[test]
    fn shift_report_cases() {
        let (m, g) = well(PI, 3001);
        let r = shift_report(&m, 1, NewWeight::Ratio(3.0), &g, 3).unwrap();
        assert!(r.levels[0].centroid_after < r.levels[0].centroid_before);
        assert!(r.levels[1].centroid_after > r.levels[1].centroid_before);
        for l in &r.levels {
            assert!((l.energy_after - l.energy_before).abs() < 1e-6 * l.energy_before.max(1.0));
        }
        let same = shift_report(&m, 1, NewWeight::Ratio(1.0), &g, 3).unwrap();
        for l in &same.levels {
            assert!((l.energy_after - l.energy_before).abs() < 1e-10);
            assert!((l.centroid_after - l.centroid_before).abs() < 1e-10);
        }
    }
}
