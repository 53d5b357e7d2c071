//! Initial potentials `V0(r)` and the small-r start of their regular solution.
//!
//! Coulomb convention: `V0(r) = Z / r` in units with `hbar^2/2m = 1`. The
//! linear model is `V0(r) = g r`.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{GridFunction, RadialGrid};

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialModel {
    /// `V0 = 0` on `[0, width]` with hard walls at both ends.
    InfiniteWell { width: f64 },
    FreeHalfAxis,
    /// `V0 = strength / r`, `strength > 0`.
    RepulsiveCoulomb { strength: f64 },
    /// `V0 = slope * r`.
    Linear { slope: f64 },
    Tabulated { table: GridFunction },
}

/// Outer boundary condition for bound-state problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `phi(r_max) = 0`.
    HardWall,
    /// Log-derivative match to `exp(-kappa r)` at `r_max`.
    Decaying,
}

impl PotentialModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PotentialModel::InfiniteWell { width } if !(width.is_finite() && width > 0.0) => {
                Err(Error::invalid(format!("well width must be positive, got {width}")))
            }
            PotentialModel::RepulsiveCoulomb { strength }
                if !(strength.is_finite() && strength > 0.0) =>
            {
                Err(Error::invalid(format!(
                    "Coulomb strength must be positive, got {strength}"
                )))
            }
            PotentialModel::Linear { slope } if !slope.is_finite() => {
                Err(Error::invalid("linear slope must be finite"))
            }
            _ => Ok(()),
        }
    }

    /// True when `V0(0)` is infinite; the origin sample of [`Self::evaluate`]
    /// is then a placeholder copied from `r = h`.
    pub fn singular_origin(&self) -> bool {
        matches!(self, PotentialModel::RepulsiveCoulomb { .. })
    }

    /// Natural outer boundary for bound states, if the model has any.
    pub fn boundary(&self) -> Option<Boundary> {
        match *self {
            PotentialModel::InfiniteWell { .. } => Some(Boundary::HardWall),
            PotentialModel::Linear { slope } if slope > 0.0 => Some(Boundary::Decaying),
            _ => None,
        }
    }

    fn value_at(&self, r: f64) -> f64 {
        match self {
            PotentialModel::InfiniteWell { .. } | PotentialModel::FreeHalfAxis => 0.0,
            PotentialModel::RepulsiveCoulomb { strength } => strength / r,
            PotentialModel::Linear { slope } => slope * r,
            PotentialModel::Tabulated { table } => table.interpolate(r).unwrap_or(f64::NAN),
        }
    }

    fn origin_value(&self) -> f64 {
        match self {
            PotentialModel::Tabulated { table } => table[0],
            _ => 0.0,
        }
    }

    pub fn evaluate(&self, grid: &RadialGrid) -> Result<GridFunction> {
        self.validate()?;
        match self {
            PotentialModel::InfiniteWell { width } => {
                if (grid.r_max() - width).abs() > 1e-12 * width {
                    return Err(Error::GridMismatch(format!(
                        "infinite well of width {width} needs r_max = width, got {}",
                        grid.r_max()
                    )));
                }
                Ok(GridFunction::zeros(*grid))
            }
            PotentialModel::Tabulated { table } => {
                if table.grid().same_as(grid) {
                    Ok(table.clone())
                } else {
                    table.resample(*grid)
                }
            }
            PotentialModel::RepulsiveCoulomb { .. } => {
                let mut s: Vec<f64> = grid.radii().map(|r| self.value_at(r)).collect();
                s[0] = s[1];
                GridFunction::new(*grid, s)
            }
            _ => GridFunction::from_fn(*grid, |r| self.value_at(r)),
        }
    }

    /// `(phi(h), phi(2h))` of the s-wave regular solution (`phi'(0) = 1`).
    pub fn small_r_series(&self, energy: f64, h: f64) -> (f64, f64) {
        small_r_series(self, energy, h)
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            PotentialModel::InfiniteWell { .. } => "well",
            PotentialModel::FreeHalfAxis => "free",
            PotentialModel::RepulsiveCoulomb { .. } => "coulomb",
            PotentialModel::Linear { .. } => "linear",
            PotentialModel::Tabulated { .. } => "tabulated",
        }
    }

    /// Reads a two-column `r,V` table with a one-line header. `r` must start
    /// at 0 and increase strictly; tables that are not uniform with an odd
    /// point count are linearly resampled onto one.
    pub fn tabulated_from_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut rs = Vec::new();
        let mut vs = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::Parse(format!("row {}: expected 2 columns", line + 2)));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("row {}: {e}", line + 2)))
            };
            rs.push(parse(&rec[0])?);
            vs.push(parse(&rec[1])?);
        }
        tabulated_from_points(&rs, &vs)
    }

    pub fn tabulated_from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::tabulated_from_reader(std::fs::File::open(path)?)
    }
}

fn tabulated_from_points(rs: &[f64], vs: &[f64]) -> Result<PotentialModel> {
    if rs.len() < RadialGrid::MIN_POINTS {
        return Err(Error::Parse(format!(
            "table needs at least {} rows, got {}",
            RadialGrid::MIN_POINTS,
            rs.len()
        )));
    }
    if rs[0] != 0.0 {
        return Err(Error::Parse(format!("table must start at r = 0, got {}", rs[0])));
    }
    if let Some(w) = rs.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::Parse(format!(
            "r must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    let r_max = *rs.last().unwrap();
    let step = r_max / (rs.len() - 1) as f64;
    let uniform = rs
        .iter()
        .enumerate()
        .all(|(i, &r)| (r - i as f64 * step).abs() <= 1e-9 * r_max);
    let table = if uniform && rs.len() % 2 == 1 {
        GridFunction::new(RadialGrid::new(r_max, rs.len())?, vs.to_vec())?
    } else {
        let n = rs.len() + (rs.len() + 1) % 2;
        let grid = RadialGrid::new(r_max, n)?;
        let mut j = 0;
        let samples = grid
            .radii()
            .map(|r| {
                while j + 2 < rs.len() && rs[j + 1] < r {
                    j += 1;
                }
                let t = ((r - rs[j]) / (rs[j + 1] - rs[j])).clamp(0.0, 1.0);
                vs[j] * (1.0 - t) + vs[j + 1] * t
            })
            .collect();
        GridFunction::new(grid, samples)?
    };
    Ok(PotentialModel::Tabulated { table })
}

/// Two-term small-r expansion of the regular solution.
///
/// Regular origin: `phi ~ r - (E - V0(0)) r^3 / 6`. Coulomb `Z/r`:
/// `phi ~ r + (Z/2) r^2`.
pub fn small_r_series(model: &PotentialModel, energy: f64, h: f64) -> (f64, f64) {
    let f = |r: f64| match model {
        PotentialModel::RepulsiveCoulomb { strength } => r + 0.5 * strength * r * r,
        _ => r - (energy - model.origin_value()) * r * r * r / 6.0,
    };
    (f(h), f(2.0 * h))
}

impl fmt::Display for PotentialModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialModel::InfiniteWell { width } => write!(f, "well:L={width}"),
            PotentialModel::FreeHalfAxis => write!(f, "free"),
            PotentialModel::RepulsiveCoulomb { strength } => write!(f, "coulomb:Z={strength}"),
            PotentialModel::Linear { slope } => write!(f, "linear:g={slope}"),
            PotentialModel::Tabulated { .. } => write!(f, "tabulated"),
        }
    }
}

impl FromStr for PotentialModel {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form. `tabulated` cannot be
    /// reconstructed from a label.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), Some(p.trim())),
            None => (s.trim(), None),
        };
        let value = |key: &str| -> Result<f64> {
            let p = param.ok_or_else(|| Error::Parse(format!("model '{s}' needs {key}=...")))?;
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad model parameter '{p}'")))?;
            if k.trim() != key {
                return Err(Error::Parse(format!("expected {key}, got {k}")));
            }
            v.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("model parameter '{v}': {e}")))
        };
        let model = match name {
            "free" => PotentialModel::FreeHalfAxis,
            "well" => PotentialModel::InfiniteWell { width: value("L")? },
            "coulomb" => PotentialModel::RepulsiveCoulomb { strength: value("Z")? },
            "linear" => PotentialModel::Linear { slope: value("g")? },
            _ => return Err(Error::Parse(format!("unknown potential model '{s}'"))),
        };
        model.validate()?;
        Ok(model)
    }
}
