//! Spectral-weight transformations.
//!
//! Changing the weight `c^2 = psi'(E_nu, 0)^2` of one state (bound or
//! continuum) from `c0^2` to `c^2` while keeping every energy fixed. With
//! `phi0 = phi0(E_nu, r)` the regular solution (`phi0'(0) = 1`) of the initial
//! potential and `dc2 = c^2 - c0^2`:
//!
//! ```text
//! p(r)      = 1 + dc2 * int_0^r phi0^2
//! V(r)      = V0(r) - 4 dc2 phi0' phi0 / p + 2 dc2^2 phi0^4 / p^2
//! phi(E, r) = phi0(E, r) - dc2 phi0(r) / p(r) * int_0^r phi0(t) phi0(E, t) dt
//! phi(E_nu) = phi0 / p
//! ```
//!
//! The initial weight is `c0^2 = 1 / int_0^inf phi0^2`, and `c0^2 = 0` for a
//! continuum energy.

use serde::Serialize;

use crate::error::{Error, Result, ResultExt};
use crate::grid::{GridFunction, RadialGrid};
use crate::numerics::{
    cumulative_integral, definite_integral, derivative, find_zeros, integrate_regular,
    second_derivative,
};
use crate::potentials::PotentialModel;
use crate::spectrum::{find_bound_states, BoundState};

/// Smallest admissible value of `p(r)`.
pub const P_FLOOR: f64 = 1e-9;

/// Largest `|phi(r_max)| / max|phi|` accepted as a normalizable state.
pub const TAIL_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightChange {
    pub e0nu: f64,
    pub c0_sq: f64,
    pub c_sq: f64,
    pub delta_c_sq: f64,
}

impl WeightChange {
    /// Bound-state change `c0^2 -> c^2`.
    pub fn new(e0nu: f64, c0_sq: f64, c_sq: f64) -> Result<Self> {
        if !e0nu.is_finite() {
            return Err(Error::invalid("energy must be finite"));
        }
        if !(c0_sq.is_finite() && c0_sq >= 0.0) {
            return Err(Error::invalid(format!("c0^2 must be >= 0, got {c0_sq}")));
        }
        if !(c_sq.is_finite() && c_sq > 0.0) {
            return Err(Error::invalid(format!("c^2 must be > 0, got {c_sq}")));
        }
        Ok(Self {
            e0nu,
            c0_sq,
            c_sq,
            delta_c_sq: c_sq - c0_sq,
        })
    }

    /// Continuum energy: the initial weight vanishes, so `c^2 = dc2`.
    /// `dc2 = 0` is the degenerate no-gathering case.
    pub fn continuum(energy: f64, delta_c_sq: f64) -> Result<Self> {
        if !energy.is_finite() {
            return Err(Error::invalid("energy must be finite"));
        }
        if !(delta_c_sq.is_finite() && delta_c_sq >= 0.0) {
            return Err(Error::invalid(format!(
                "continuum weight change must be >= 0, got {delta_c_sq}"
            )));
        }
        Ok(Self {
            e0nu: energy,
            c0_sq: 0.0,
            c_sq: delta_c_sq,
            delta_c_sq,
        })
    }
}

#[derive(Debug, Clone)]
pub struct TransformResult {
    pub weight: WeightChange,
    pub v0: GridFunction,
    /// Initial regular solution at the chosen energy.
    pub phi0_nu: GridFunction,
    pub p: GridFunction,
    pub v: GridFunction,
    pub delta_v: GridFunction,
    /// Transformed regular solution at the chosen energy, `phi0 / p`.
    pub phi_nu: GridFunction,
}

impl TransformResult {
    pub fn grid(&self) -> &RadialGrid {
        self.v.grid()
    }

    /// Transformed regular solution at another energy.
    pub fn solution_at(&self, phi0_e: &GridFunction) -> Result<GridFunction> {
        transform_solution(phi0_e, &self.phi0_nu, &self.p, self.weight.delta_c_sq)
    }
}

/// `c0^2 = 1 / int phi0^2`. Rejects functions that have not died out at
/// `r_max`.
pub fn norm_constant(phi0_nu: &GridFunction) -> Result<f64> {
    let max = phi0_nu.max_abs();
    if max == 0.0 {
        return Err(Error::NonNormalizable { ratio: f64::INFINITY });
    }
    let tail = phi0_nu[phi0_nu.len() - 1].abs() / max;
    if tail > TAIL_TOLERANCE {
        return Err(Error::NonNormalizable { ratio: tail });
    }
    let sq = phi0_nu.map(|x| x * x)?;
    Ok(1.0 / definite_integral(&sq))
}

fn check_p(p: &GridFunction) -> Result<()> {
    let (i, min) = p
        .samples()
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    if min <= P_FLOOR {
        return Err(Error::PNonpositive {
            min,
            radius: p.grid().r(i),
        });
    }
    Ok(())
}

pub fn compute_p(phi0_nu: &GridFunction, delta_c_sq: f64) -> Result<GridFunction> {
    let running = cumulative_integral(&phi0_nu.map(|x| x * x)?);
    let p = running.map(|s| 1.0 + delta_c_sq * s)?;
    check_p(&p)?;
    Ok(p)
}

/// Transformed potential from `phi0`, its numerical derivative and `p`.
pub fn transform_potential(
    v0: &GridFunction,
    phi0_nu: &GridFunction,
    p: &GridFunction,
    delta_c_sq: f64,
) -> Result<GridFunction> {
    v0.check_same_grid(phi0_nu)?;
    v0.check_same_grid(p)?;
    check_p(p)?;
    let d_phi = derivative(phi0_nu);
    let samples = (0..v0.len())
        .map(|i| {
            let (f, pi) = (phi0_nu[i], p[i]);
            v0[i] - 4.0 * delta_c_sq * d_phi[i] * f / pi
                + 2.0 * delta_c_sq * delta_c_sq * f.powi(4) / (pi * pi)
        })
        .collect();
    GridFunction::new(*v0.grid(), samples)
}

/// `V0 - 2 (ln p)''`, algebraically equal to [`transform_potential`]; used to
/// cross-check it.
pub fn transform_potential_logform(v0: &GridFunction, p: &GridFunction) -> Result<GridFunction> {
    v0.check_same_grid(p)?;
    check_p(p)?;
    let d2 = second_derivative(&p.map(f64::ln)?);
    v0.zip_with(&d2, |a, b| a - 2.0 * b)
}

/// Transformed regular solution at an energy other than the chosen one.
pub fn transform_solution(
    phi0_e: &GridFunction,
    phi0_nu: &GridFunction,
    p: &GridFunction,
    delta_c_sq: f64,
) -> Result<GridFunction> {
    phi0_e.check_same_grid(phi0_nu)?;
    phi0_e.check_same_grid(p)?;
    check_p(p)?;
    let cross = cumulative_integral(&phi0_nu.zip_with(phi0_e, |a, b| a * b)?);
    let samples = (0..phi0_e.len())
        .map(|i| phi0_e[i] - delta_c_sq * phi0_nu[i] / p[i] * cross[i])
        .collect();
    GridFunction::new(*phi0_e.grid(), samples)
}

pub fn transform_chosen(phi0_nu: &GridFunction, p: &GridFunction) -> Result<GridFunction> {
    check_p(p)?;
    phi0_nu.zip_with(p, |f, q| f / q)
}

/// Build `p`, `V`, `dV` and the transformed chosen solution from an initial
/// potential and its regular solution at the chosen energy.
pub fn transform_from_solution(
    v0: &GridFunction,
    phi0_nu: &GridFunction,
    weight: WeightChange,
) -> Result<TransformResult> {
    let p = compute_p(phi0_nu, weight.delta_c_sq)?;
    let v = transform_potential(v0, phi0_nu, &p, weight.delta_c_sq)?;
    let delta_v = v.zip_with(v0, |a, b| a - b)?;
    let phi_nu = transform_chosen(phi0_nu, &p)?;
    Ok(TransformResult {
        weight,
        v0: v0.clone(),
        phi0_nu: phi0_nu.clone(),
        p,
        v,
        delta_v,
        phi_nu,
    })
}

/// Which state gets its weight changed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChosenState {
    /// Bound level `nu` (ground state is 1).
    Level(usize),
    /// Continuum energy; `c0^2 = 0`.
    Energy(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NewWeight {
    /// `c^2 = ratio * c0^2` (bound states only).
    Ratio(f64),
    /// `c^2` given directly.
    Absolute(f64),
}

/// Full pipeline: solve `phi0` at the chosen energy, resolve the weight
/// change, and transform.
pub fn apply_weight_change(
    model: &PotentialModel,
    chosen: ChosenState,
    new_weight: NewWeight,
    grid: &RadialGrid,
) -> Result<TransformResult> {
    let v0 = model.evaluate(grid)?;
    match chosen {
        ChosenState::Level(nu) => {
            let states = find_bound_states(model, grid, nu)
                .context(|| format!("solving level {nu} of {model}"))?;
            transform_bound_state(&v0, &states[nu - 1], new_weight)
        }
        ChosenState::Energy(energy) => {
            let dc2 = match new_weight {
                NewWeight::Absolute(c2) => c2,
                NewWeight::Ratio(_) => {
                    return Err(Error::invalid(
                        "a weight ratio is undefined at a continuum energy (c0^2 = 0)",
                    ))
                }
            };
            let weight = WeightChange::continuum(energy, dc2)?;
            let phi0 = integrate_regular(&v0, energy, model.small_r_series(energy, grid.h()))
                .context(|| format!("regular solution of {model} at E = {energy}"))?;
            transform_from_solution(&v0, &phi0, weight)
                .context(|| format!("transforming {model} at E = {energy}"))
        }
    }
}

/// Weight change of an already solved bound state.
pub fn transform_bound_state(
    v0: &GridFunction,
    state: &BoundState,
    new_weight: NewWeight,
) -> Result<TransformResult> {
    let phi0 = state.regular()?;
    let c0_sq = norm_constant(&phi0).context(|| format!("normalizing level {}", state.nu))?;
    let c_sq = match new_weight {
        NewWeight::Ratio(x) => x * c0_sq,
        NewWeight::Absolute(c2) => c2,
    };
    let weight = WeightChange::new(state.energy, c0_sq, c_sq)?;
    // exact identity when the weight is unchanged
    let weight = if c_sq == c0_sq {
        WeightChange {
            delta_c_sq: 0.0,
            ..weight
        }
    } else {
        weight
    };
    transform_from_solution(v0, &phi0, weight)
        .context(|| format!("transforming level {} (E = {})", state.nu, state.energy))
}

/// Interior knots of a solution plus the domain end points.
pub fn knots_with_ends(phi: &GridFunction) -> Vec<f64> {
    let h = phi.grid().h();
    let r_max = phi.grid().r_max();
    let mut knots = vec![0.0];
    knots.extend(
        find_zeros(phi, true)
            .into_iter()
            .filter(|&r| r > 0.5 * h && r < r_max - 0.5 * h),
    );
    knots.push(r_max);
    knots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_diff;
    use std::f64::consts::PI;

    fn well_grid() -> RadialGrid {
        RadialGrid::new(PI, 3001).unwrap()
    }

    fn sine(g: RadialGrid, k: f64) -> GridFunction {
        GridFunction::from_fn(g, |r| (k * r).sin() / k).unwrap()
    }

    #[test]
    fn norm_constants_of_well_states() {
        let g = well_grid();
        assert!((norm_constant(&sine(g, 1.0)).unwrap() - 2.0 / PI).abs() < 1e-6);
        assert!((norm_constant(&sine(g, 2.0)).unwrap() - 8.0 / PI).abs() < 1e-6);
        let doubled = sine(g, 1.0).scaled(2.0).unwrap();
        let ratio = norm_constant(&doubled).unwrap() / norm_constant(&sine(g, 1.0)).unwrap();
        assert!((ratio - 0.25).abs() < 1e-12);
    }

    #[test]
    fn continuum_wave_is_not_normalizable() {
        let g = RadialGrid::new(10.0, 1001).unwrap();
        assert!(matches!(
            norm_constant(&sine(g, 1.0)),
            Err(Error::NonNormalizable { .. })
        ));
    }

    #[test]
    fn p_examples() {
        let g = well_grid();
        let phi = sine(g, 1.0);
        let p0 = compute_p(&phi, 0.0).unwrap();
        assert!(p0.samples().iter().all(|&v| v == 1.0));
        let p1 = compute_p(&phi, 1.0).unwrap();
        assert_eq!(p1[0], 1.0);
        assert!((p1[g.n_points() - 1] - (1.0 + PI / 2.0)).abs() < 1e-8);

        let kb = 1.3;
        let g2 = RadialGrid::new(30.0, 6001).unwrap();
        let dc2 = 0.7;
        let p2 = compute_p(&sine(g2, kb), dc2).unwrap();
        for (r, v) in g2.radii().zip(p2.samples()) {
            let exact = 1.0 + dc2 * (2.0 * kb * r - (2.0 * kb * r).sin()) / (4.0 * kb.powi(3));
            assert!((v - exact).abs() < 1e-8, "r = {r}");
        }
    }

    #[test]
    fn p_nonpositive_is_an_error() {
        let g = well_grid();
        // int sin^2 = pi/2, so dc2 < -2/pi drives p through zero
        assert!(matches!(
            compute_p(&sine(g, 1.0), -1.0),
            Err(Error::PNonpositive { .. })
        ));
        assert!(compute_p(&sine(g, 1.0), -0.6).is_ok());
    }

    #[test]
    fn identity_transform() {
        let g = well_grid();
        let phi = sine(g, 1.0);
        let v0 = GridFunction::zeros(g);
        let p = compute_p(&phi, 0.0).unwrap();
        let v = transform_potential(&v0, &phi, &p, 0.0).unwrap();
        assert!(max_abs_diff(&v, &v0) < 1e-12);
        let other = sine(g, 1.7);
        let t = transform_solution(&other, &phi, &p, 0.0).unwrap();
        assert!(max_abs_diff(&t, &other) < 1e-12);
        assert!(max_abs_diff(&transform_chosen(&phi, &p).unwrap(), &phi) < 1e-15);
        assert!(max_abs_diff(&transform_potential_logform(&v0, &p).unwrap(), &v0) < 1e-12);
    }

    #[test]
    fn logform_of_gaussian_p() {
        let g = RadialGrid::new(2.0, 2001).unwrap();
        let alpha = 0.8;
        let p = GridFunction::from_fn(g, |r| (alpha * r * r).exp()).unwrap();
        let v0 = GridFunction::constant(g, 1.5).unwrap();
        let v = transform_potential_logform(&v0, &p).unwrap();
        for x in v.samples() {
            assert!((x - (1.5 - 4.0 * alpha)).abs() < 1e-6);
        }
    }

    #[test]
    fn well_ground_state_perturbation_signs() {
        // c^2 = 2 c0^2: the perturbation starts as a well at the origin and
        // ends as a barrier in front of the far wall.
        let g = well_grid();
        let phi = sine(g, 1.0);
        let c0 = norm_constant(&phi).unwrap();
        let w = WeightChange::new(1.0, c0, 2.0 * c0).unwrap();
        let v0 = GridFunction::zeros(g);
        let t = transform_from_solution(&v0, &phi, w).unwrap();
        let n = g.n_points();
        assert!(t.delta_v[n / 10] < 0.0);
        assert!(t.delta_v[9 * n / 10] > 0.0);
    }

    #[test]
    fn chosen_solution_norm_and_knots() {
        let g = well_grid();
        let phi = sine(g, 2.0);
        let c0 = norm_constant(&phi).unwrap();
        for ratio in [0.5, 2.0, 10.0] {
            let w = WeightChange::new(4.0, c0, ratio * c0).unwrap();
            let t = transform_from_solution(&GridFunction::zeros(g), &phi, w).unwrap();
            let norm = definite_integral(&t.phi_nu.map(|x| x * x).unwrap());
            assert!((norm * w.c_sq - 1.0).abs() < 1e-6, "ratio {ratio}: {norm}");
            let z0 = find_zeros(&phi, true);
            let z1 = find_zeros(&t.phi_nu, true);
            assert_eq!(z0.len(), z1.len());
            for (a, b) in z0.iter().zip(&z1) {
                assert!((a - b).abs() <= g.h());
            }
            for i in 0..g.n_points() {
                assert!((t.phi_nu[i] * t.p[i] - phi[i]).abs() <= 1e-12 * phi[i].abs().max(1e-300));
            }
        }
    }

    #[test]
    fn transformed_solution_starts_regular() {
        let g = RadialGrid::new(10.0, 4001).unwrap();
        let phi_b = sine(g, 1.0);
        let p = compute_p(&phi_b, 1.0).unwrap();
        let phi_e = sine(g, 1.3);
        let t = transform_solution(&phi_e, &phi_b, &p, 1.0).unwrap();
        assert_eq!(t[0], 0.0);
        let slope = (t[1] - t[0]) / g.h();
        assert!((slope - 1.0).abs() < 1e-5);
    }

    #[test]
    fn weight_change_validation() {
        assert!(WeightChange::new(1.0, 0.5, 0.0).is_err());
        assert!(WeightChange::new(1.0, -0.5, 1.0).is_err());
        let w = WeightChange::new(1.0, 0.5, 2.0).unwrap();
        assert_eq!(w.delta_c_sq, 1.5);
        assert!(WeightChange::continuum(1.0, -1.0).is_err());
        assert_eq!(WeightChange::continuum(1.0, 0.0).unwrap().c_sq, 0.0);
    }
}
