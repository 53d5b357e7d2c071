//! Fourth-order ODE integration, quadrature, differentiation and zero finding
//! on a uniform radial grid.
//!
//! The radial equation is `-phi'' + V phi = E phi` (units with hbar^2/2m = 1).

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Default magnitude cap for [`integrate_regular`].
pub const BLOW_UP_CAP: f64 = 1e250;

/// Numerov weights `w_i = 1 - h^2 (V_i - E) / 12`.
pub(crate) fn numerov_weights(v: &[f64], energy: f64, h: f64) -> Vec<f64> {
    let h2 = h * h / 12.0;
    v.iter().map(|&vi| 1.0 - h2 * (vi - energy)).collect()
}

/// One Numerov step: value at `i + 1` from `i` and `i - 1` (or the mirror
/// image for inward sweeps).
#[inline]
pub(crate) fn numerov_next(w_prev: f64, w_mid: f64, w_next: f64, prev: f64, mid: f64) -> f64 {
    ((12.0 - 10.0 * w_mid) * mid - w_prev * prev) / w_next
}

/// Regular solution of `-phi'' + V phi = E phi` with `phi(0) = 0`.
///
/// `start` holds `(phi(h), phi(2h))`, normally from
/// [`crate::potentials::small_r_series`]; the sample `V(0)` is never read, so a
/// singular origin is harmless. Fails with [`Error::BlowUp`] once `|phi|`
/// exceeds [`BLOW_UP_CAP`].
pub fn integrate_regular(v: &GridFunction, energy: f64, start: (f64, f64)) -> Result<GridFunction> {
    integrate_regular_capped(v, energy, start, BLOW_UP_CAP)
}

pub fn integrate_regular_capped(
    v: &GridFunction,
    energy: f64,
    start: (f64, f64),
    cap: f64,
) -> Result<GridFunction> {
    if !energy.is_finite() || !start.0.is_finite() || !start.1.is_finite() {
        return Err(Error::invalid("energy and start values must be finite"));
    }
    let grid = *v.grid();
    let n = grid.n_points();
    let w = numerov_weights(v.samples(), energy, grid.h());
    let mut phi = vec![0.0; n];
    phi[1] = start.0;
    phi[2] = start.1;
    for i in 2..n - 1 {
        let next = numerov_next(w[i - 1], w[i], w[i + 1], phi[i - 1], phi[i]);
        if !(next.abs() <= cap) {
            return Err(Error::BlowUp {
                radius: grid.r(i + 1),
                cap,
            });
        }
        phi[i + 1] = next;
    }
    Ok(GridFunction::from_vec_unchecked(grid, phi))
}

/// Running integral `F(r_i) = int_0^{r_i} f`.
///
/// Even nodes use composite Simpson; odd node `2m+1` adds the three-point
/// half-step `h/12 (5 f_{2m} + 8 f_{2m+1} - f_{2m+2})` to `F(r_{2m})`.
pub fn cumulative_integral(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    let h = grid.h();
    let s = f.samples();
    let n = s.len();
    let mut out = vec![0.0; n];
    let mut acc = 0.0;
    let mut i = 0;
    while i + 2 < n {
        out[i + 1] = acc + h / 12.0 * (5.0 * s[i] + 8.0 * s[i + 1] - s[i + 2]);
        acc += simpson_pair(s[i], s[i + 1], s[i + 2], h);
        out[i + 2] = acc;
        i += 2;
    }
    GridFunction::from_vec_unchecked(grid, out)
}

#[inline]
fn simpson_pair(a: f64, b: f64, c: f64, h: f64) -> f64 {
    h / 3.0 * (a + 4.0 * b + c)
}

/// Composite Simpson over the whole grid.
pub fn definite_integral(f: &GridFunction) -> f64 {
    let h = f.grid().h();
    f.samples()
        .windows(3)
        .step_by(2)
        .map(|w| simpson_pair(w[0], w[1], w[2], h))
        .sum()
}

/// First derivative: central differences inside, second-order one-sided
/// stencils at both ends.
pub fn derivative(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    let h = grid.h();
    let s = f.samples();
    let n = s.len();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (s[i + 1] - s[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * s[n - 1] - 4.0 * s[n - 2] + s[n - 3]) / (2.0 * h);
    GridFunction::from_vec_unchecked(grid, d)
}

/// Second derivative, `O(h^2)` everywhere including the end points.
pub fn second_derivative(f: &GridFunction) -> GridFunction {
    let grid = *f.grid();
    let h2 = grid.h() * grid.h();
    let s = f.samples();
    let n = s.len();
    let mut d = vec![0.0; n];
    d[0] = (2.0 * s[0] - 5.0 * s[1] + 4.0 * s[2] - s[3]) / h2;
    for i in 1..n - 1 {
        d[i] = (s[i + 1] - 2.0 * s[i] + s[i - 1]) / h2;
    }
    d[n - 1] = (2.0 * s[n - 1] - 5.0 * s[n - 2] + 4.0 * s[n - 3] - s[n - 4]) / h2;
    GridFunction::from_vec_unchecked(grid, d)
}

/// Radii of the zeros of `f`: one per sign change between consecutive
/// samples (linear interpolation), exact zero samples counted once.
pub fn find_zeros(f: &GridFunction, skip_origin: bool) -> Vec<f64> {
    let grid = f.grid();
    let s = f.samples();
    let mut zeros = Vec::new();
    // sign of the last nonzero sample, and whether a zero sample was seen since
    let mut last: Option<(usize, f64)> = None;
    let mut in_zero_run = false;
    for (i, &v) in s.iter().enumerate() {
        if v == 0.0 {
            if !in_zero_run {
                zeros.push(grid.r(i));
                in_zero_run = true;
            }
            continue;
        }
        if let Some((j, prev)) = last {
            if !in_zero_run && prev.signum() != v.signum() {
                let (ra, rb) = (grid.r(j), grid.r(i));
                zeros.push(ra + (rb - ra) * prev / (prev - v));
            }
        }
        last = Some((i, v));
        in_zero_run = false;
    }
    if skip_origin {
        zeros.retain(|&r| r > 0.0);
    }
    zeros
}

/// Pointwise `(a[i] - b[i])` maximum magnitude.
pub fn max_abs_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.samples()
        .iter()
        .zip(b.samples())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Residual `-phi'' + V phi - E phi` by second differences. End points are
/// left at zero.
pub fn schrodinger_residual(phi: &GridFunction, v: &GridFunction, energy: f64) -> Result<GridFunction> {
    phi.check_same_grid(v)?;
    let grid = *phi.grid();
    let h2 = grid.h() * grid.h();
    let p = phi.samples();
    let n = p.len();
    let mut res = vec![0.0; n];
    for i in 1..n - 1 {
        let d2 = (p[i + 1] - 2.0 * p[i] + p[i - 1]) / h2;
        res[i] = -d2 + (v[i] - energy) * p[i];
    }
    GridFunction::new(grid, res)
}

/// Free start pair `(phi(h), phi(2h))` for a potential regular at the origin.
pub fn taylor_start(v_origin: f64, energy: f64, h: f64) -> (f64, f64) {
    let f = |r: f64| r - (energy - v_origin) * r * r * r / 6.0;
    (f(h), f(2.0 * h))
}
