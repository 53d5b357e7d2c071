use crate::error::{Error, Result, ResultExt};
use crate::grid::{GridFunction, RadialGrid};
use crate::numerics::{find_zeros, integrate_regular};
use crate::potentials::PotentialModel;
use crate::transform::{
    transform_chosen, transform_from_solution, transform_potential, WeightChange,
};

/// A gathering potential together with the bound state it confines at the
/// continuum energy `k_b^2`.
#[derive(Debug, Clone)]
pub struct BsecSystem {
    pub k_b: f64,
    pub delta_c_sq: f64,
    pub model: PotentialModel,
    pub v0: GridFunction,
    /// Initial regular solution at `E_b`.
    pub phi0: GridFunction,
    pub p: GridFunction,
    pub v: GridFunction,
    /// `phi0 / p`, square integrable with norm `1 / delta_c_sq` when
    /// `delta_c_sq > 0`.
    pub psi: GridFunction,
}

impl BsecSystem {
    pub fn energy(&self) -> f64 {
        self.k_b * self.k_b
    }

    pub fn grid(&self) -> &RadialGrid {
        self.v.grid()
    }

    /// `false` for the degenerate `delta_c_sq = 0` system, which is just the
    /// unperturbed scattering wave.
    pub fn is_gathering(&self) -> bool {
        self.delta_c_sq > 0.0
    }

    /// Knots of the BSEC wavefunction, origin excluded.
    pub fn knots(&self) -> Vec<f64> {
        find_zeros(&self.psi, true)
    }
}

fn check_k(k_b: f64, delta_c_sq: f64) -> Result<()> {
    if !(k_b.is_finite() && k_b > 0.0) {
        return Err(Error::invalid(format!("k_b must be positive, got {k_b}")));
    }
    if !(delta_c_sq.is_finite() && delta_c_sq >= 0.0) {
        return Err(Error::invalid(format!(
            "gathering strength must be >= 0, got {delta_c_sq}"
        )));
    }
    Ok(())
}

/// Closed-form `p(r)` for `phi0 = sin(k r) / k`.
pub fn free_p(k_b: f64, delta_c_sq: f64, r: f64) -> f64 {
    1.0 + delta_c_sq * (2.0 * k_b * r - (2.0 * k_b * r).sin()) / (4.0 * k_b.powi(3))
}

/// Gathering potential of the free half-axis, with the analytic `phi0'`.
pub fn free_gathering_potential(k_b: f64, delta_c_sq: f64, r: f64) -> f64 {
    let (s, c) = (k_b * r).sin_cos();
    let phi = s / k_b;
    let p = free_p(k_b, delta_c_sq, r);
    -4.0 * delta_c_sq * c * phi / p + 2.0 * delta_c_sq * delta_c_sq * phi.powi(4) / (p * p)
}

/// BSEC on the free half-axis at `E_b = k_b^2`.
///
/// `p` is taken in closed form; `V` follows the same numerical-derivative path
/// as every other transform (see [`free_gathering_potential`] for the analytic
/// route).
pub fn build_bsec_free(k_b: f64, delta_c_sq: f64, grid: &RadialGrid) -> Result<BsecSystem> {
    check_k(k_b, delta_c_sq)?;
    let phi0 = GridFunction::from_fn(*grid, |r| (k_b * r).sin() / k_b)?;
    let p = GridFunction::from_fn(*grid, |r| free_p(k_b, delta_c_sq, r))?;
    let v0 = GridFunction::zeros(*grid);
    let v = transform_potential(&v0, &phi0, &p, delta_c_sq)?;
    let psi = transform_chosen(&phi0, &p)?;
    Ok(BsecSystem {
        k_b,
        delta_c_sq,
        model: PotentialModel::FreeHalfAxis,
        v0,
        phi0,
        p,
        v,
        psi,
    })
}

/// BSEC built on a numerically integrated scattering solution at `E_b`.
pub fn build_bsec_numeric(
    model: &PotentialModel,
    energy: f64,
    delta_c_sq: f64,
    grid: &RadialGrid,
) -> Result<BsecSystem> {
    if matches!(model, PotentialModel::InfiniteWell { .. }) {
        return Err(Error::invalid("the infinite well has no continuum"));
    }
    if let PotentialModel::Linear { slope } = *model {
        if slope > 0.0 {
            return Err(Error::invalid(format!(
                "a rising linear potential (g = {slope}) confines every state; use g <= 0"
            )));
        }
    }
    if !(energy.is_finite() && energy > 0.0) {
        return Err(Error::invalid(format!(
            "BSEC energy must lie in the continuum (E > 0), got {energy}"
        )));
    }
    check_k(energy.sqrt(), delta_c_sq)?;
    let v0 = model.evaluate(grid)?;
    let phi0 = integrate_regular(&v0, energy, model.small_r_series(energy, grid.h()))
        .context(|| format!("scattering solution of {model} at E = {energy}"))?;
    let weight = WeightChange::continuum(energy, delta_c_sq)?;
    let t = transform_from_solution(&v0, &phi0, weight)?;
    Ok(BsecSystem {
        k_b: energy.sqrt(),
        delta_c_sq,
        model: model.clone(),
        v0,
        phi0,
        p: t.p,
        v: t.v,
        psi: t.phi_nu,
    })
}
