//! CSV tables: `# key=value` metadata lines, a column-name row, then data.
//! Floats are written in shortest round-trip form.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, RadialGrid};
use crate::potentials::PotentialModel;
use crate::scattering::{BeatAnalysis, BsecSystem, PhaseShiftScan};
use crate::spectrum::ShiftReport;
use crate::transform::{TransformResult, WeightChange};

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Ordered `key=value` pairs written as `#` header lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn push_f64(&mut self, key: &str, value: f64) -> &mut Self {
        self.push(key, fmt_f64(value))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::Parse(format!("missing metadata key '{key}'")))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        let raw = self.require(key)?;
        raw.parse()
            .map_err(|_| Error::Parse(format!("metadata '{key}={raw}' is not a number")))
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Adds the grid keys.
    pub fn grid(&mut self, grid: &RadialGrid) -> &mut Self {
        self.push_f64("r_max", grid.r_max())
            .push("n_points", grid.n_points())
    }

    pub fn read_grid(&self) -> Result<RadialGrid> {
        let n: usize = self
            .require("n_points")?
            .parse()
            .map_err(|_| Error::Parse("n_points is not an integer".into()))?;
        RadialGrid::new(self.require_f64("r_max")?, n)
    }

    /// Adds the model label and the convention notes that apply to it.
    pub fn model(&mut self, model: &PotentialModel) -> &mut Self {
        self.push("model", model);
        match model {
            PotentialModel::RepulsiveCoulomb { .. } => {
                self.push("coulomb_convention", "V0=Z/r");
            }
            PotentialModel::Linear { .. } => {
                self.push("linear_convention", "V0=g*r");
            }
            _ => {}
        }
        self
    }

    pub fn weight(&mut self, w: &WeightChange) -> &mut Self {
        self.push_f64("E0nu", w.e0nu)
            .push_f64("c0_sq", w.c0_sq)
            .push_f64("c_sq", w.c_sq)
            .push_f64("delta_c_sq", w.delta_c_sq)
    }

    pub fn read_weight(&self) -> Result<WeightChange> {
        Ok(WeightChange {
            e0nu: self.require_f64("E0nu")?,
            c0_sq: self.require_f64("c0_sq")?,
            c_sq: self.require_f64("c_sq")?,
            delta_c_sq: self.require_f64("delta_c_sq")?,
        })
    }
}

/// A parsed table: metadata plus named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub metadata: Metadata,
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.headers
            .iter()
            .position(|h| h == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| Error::Parse(format!("missing column '{name}'")))
    }

    /// Column `name` as a function on the grid recorded in the metadata.
    pub fn grid_column(&self, name: &str) -> Result<GridFunction> {
        let grid = self.metadata.read_grid()?;
        let values = self.column(name)?;
        if values.len() != grid.n_points() {
            return Err(Error::Parse(format!(
                "column '{name}' has {} rows, grid has {}",
                values.len(),
                grid.n_points()
            )));
        }
        GridFunction::new(grid, values.to_vec())
    }
}

pub fn write_table<W: Write>(
    mut out: W,
    metadata: &Metadata,
    headers: &[&str],
    columns: &[&[f64]],
) -> Result<()> {
    if headers.len() != columns.len() {
        return Err(Error::invalid("one header per column"));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::invalid("columns differ in length"));
    }
    for (k, v) in metadata.entries() {
        writeln!(out, "# {k}={v}")?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(headers)?;
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| fmt_f64(c[i])))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_table<R: Read>(mut input: R) -> Result<Table> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    let mut metadata = Metadata::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        let Some(rest) = line.trim_start().strip_prefix('#') else {
            break;
        };
        body_start += line.len();
        if let Some((k, v)) = rest.trim().split_once('=') {
            metadata.push(k.trim(), v.trim());
        }
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(&text.as_bytes()[body_start..]);
    let headers: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut columns = vec![Vec::new(); headers.len()];
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (col, field) in columns.iter_mut().zip(rec.iter()) {
            col.push(field.parse::<f64>().map_err(|_| {
                Error::Parse(format!("row {}: '{field}' is not a number", row + 1))
            })?);
        }
    }
    Ok(Table {
        metadata,
        headers,
        columns,
    })
}

pub fn transform_metadata(t: &TransformResult, model: &PotentialModel) -> Metadata {
    let mut m = Metadata::new();
    m.push("kind", "transform")
        .model(model)
        .weight(&t.weight)
        .grid(t.grid())
        .push("weight_label", "c_sq=psi'(0)^2");
    m
}

pub fn write_transform<W: Write>(out: W, t: &TransformResult, meta: &Metadata) -> Result<()> {
    let r: Vec<f64> = t.grid().radii().collect();
    write_table(
        out,
        meta,
        &["r", "V0", "V", "delta_V", "p", "phi_nu"],
        &[
            &r,
            t.v0.samples(),
            t.v.samples(),
            t.delta_v.samples(),
            t.p.samples(),
            t.phi_nu.samples(),
        ],
    )
}

/// Rebuilds a transform from its CSV; `phi0_nu` is recovered as `p * phi_nu`.
pub fn read_transform<R: Read>(input: R) -> Result<(TransformResult, Metadata)> {
    let table = read_table(input)?;
    let p = table.grid_column("p")?;
    let phi_nu = table.grid_column("phi_nu")?;
    let phi0_nu = phi_nu.zip_with(&p, |f, q| f * q)?;
    let t = TransformResult {
        weight: table.metadata.read_weight()?,
        v0: table.grid_column("V0")?,
        v: table.grid_column("V")?,
        delta_v: table.grid_column("delta_V")?,
        p,
        phi_nu,
        phi0_nu,
    };
    Ok((t, table.metadata))
}

pub fn write_shift_report<W: Write>(out: W, report: &ShiftReport, meta: &Metadata) -> Result<()> {
    let mut meta = meta.clone();
    meta.push("kind", "shift_report").push("chosen_nu", report.chosen);
    let col = |f: fn(&crate::spectrum::LevelShift) -> f64| -> Vec<f64> {
        report.levels.iter().map(f).collect()
    };
    write_table(
        out,
        &meta,
        &["nu", "E_before", "E_after", "centroid_before", "centroid_after"],
        &[
            &col(|l| l.nu as f64),
            &col(|l| l.energy_before),
            &col(|l| l.energy_after),
            &col(|l| l.centroid_before),
            &col(|l| l.centroid_after),
        ],
    )
}

pub fn bsec_metadata(sys: &BsecSystem) -> Metadata {
    let mut m = Metadata::new();
    m.push("kind", "bsec")
        .push_f64("k_b", sys.k_b)
        .push_f64("E_b", sys.energy())
        .push_f64("delta_c_sq", sys.delta_c_sq)
        .model(&sys.model)
        .grid(sys.grid());
    m
}

pub fn write_bsec<W: Write>(out: W, sys: &BsecSystem, meta: &Metadata) -> Result<()> {
    let r: Vec<f64> = sys.grid().radii().collect();
    write_table(
        out,
        meta,
        &["r", "V", "psi", "p"],
        &[&r, sys.v.samples(), sys.psi.samples(), sys.p.samples()],
    )
}

/// Rebuilds a BSEC from its CSV. `V0` is re-evaluated from the model label
/// (zero for a tabulated model, whose table is not stored).
pub fn read_bsec<R: Read>(input: R) -> Result<(BsecSystem, Metadata)> {
    let table = read_table(input)?;
    let meta = &table.metadata;
    let grid = meta.read_grid()?;
    let label = meta.require("model")?;
    let (model, v0) = match label.parse::<PotentialModel>() {
        Ok(model) => {
            let v0 = model.evaluate(&grid)?;
            (model, v0)
        }
        Err(_) if label == "tabulated" => (
            PotentialModel::Tabulated {
                table: GridFunction::zeros(grid),
            },
            GridFunction::zeros(grid),
        ),
        Err(e) => return Err(e),
    };
    let p = table.grid_column("p")?;
    let psi = table.grid_column("psi")?;
    let sys = BsecSystem {
        k_b: meta.require_f64("k_b")?,
        delta_c_sq: meta.require_f64("delta_c_sq")?,
        model,
        v0,
        phi0: psi.zip_with(&p, |f, q| f * q)?,
        p,
        v: table.grid_column("V")?,
        psi,
    };
    Ok((sys, table.metadata))
}

pub fn write_phase_scan<W: Write>(out: W, scan: &PhaseShiftScan, meta: &Metadata) -> Result<()> {
    let mut meta = meta.clone();
    meta.push("kind", "phase_scan")
        .push_f64("match_r1", scan.window.0)
        .push_f64("match_r2", scan.window.1);
    let k: Vec<f64> = scan.energies.iter().map(|e| e.sqrt()).collect();
    write_table(
        out,
        &meta,
        &["E", "k", "delta_unwrapped", "delta_reduced"],
        &[&scan.energies, &k, &scan.unwrapped, &scan.deltas],
    )
}

pub fn write_beats<W: Write>(out: W, beats: &BeatAnalysis, meta: &Metadata) -> Result<()> {
    let mut meta = meta.clone();
    meta.push("kind", "beats")
        .push_f64("E", beats.energy)
        .push_f64("beat_period", beats.beat_period);
    let (r, a): (Vec<f64>, Vec<f64>) = beats.envelope.iter().copied().unzip();
    write_table(out, &meta, &["r", "envelope"], &[&r, &a])
}
