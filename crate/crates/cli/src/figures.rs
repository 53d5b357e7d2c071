//! The four reference figures, regenerated with fixed parameters:
//!
//! | file          | content                                                   |
//! |---------------|-----------------------------------------------------------|
//! | `fig1_shift`  | well `L = pi`, levels 1 and 2 each given weight `x4`      |
//! | `fig2_bsec`   | free half-axis, `k_b = 1`, `dc2` in {0.5, 2, 8}           |
//! | `fig3_beats`  | scattering wave at `E = 1.05^2` in the `k_b = 1, dc2 = 1` BSEC |
//! | `fig5_coulomb`| Coulomb `Z = 1`, `E_b = 1`, `dc2 = 1`                     |

use std::f64::consts::PI;
use std::path::Path;

use anyhow::Result;

use specweight::io::{fmt_f64, write_table, Metadata};
use specweight::numerics::{integrate_regular, taylor_start};
use specweight::spectrum::find_bound_states_in;
use specweight::{
    apply_weight_change, beating_analysis, find_bound_states, Boundary, ChosenState, GridFunction,
    NewWeight, PotentialModel, RadialGrid,
};

use crate::commands::{build_bsec, clip_panel, create, prepare_dir, write_svg};
use crate::svg::{Panel, Plot, Series};

const FIG1_RATIO: f64 = 4.0;
const FIG2_LADDER: [f64; 3] = [0.5, 2.0, 8.0];
const FIG3_K: f64 = 1.05;

pub(crate) fn write_all(out: &Path) -> Result<()> {
    prepare_dir(out)?;
    let files = [fig1(out)?, fig2(out)?, fig3(out)?, fig5(out)?];
    for (csv, svg) in &files {
        println!(
            "{}",
            serde_json::json!({
                "command": "figs",
                "csv": csv,
                "svg": svg,
            })
        );
    }
    Ok(())
}

fn base_meta(figure: &str) -> Metadata {
    let mut m = Metadata::new();
    m.push("kind", "figure").push("figure", figure).push("command", "figs");
    m
}

fn save(
    out: &Path,
    stem: &str,
    meta: &Metadata,
    columns: &[(String, Vec<f64>)],
    plot: &Plot,
) -> Result<(String, String)> {
    let csv = format!("{stem}.csv");
    let svg = format!("{stem}.svg");
    let headers: Vec<&str> = columns.iter().map(|(h, _)| h.as_str()).collect();
    let data: Vec<&[f64]> = columns.iter().map(|(_, c)| c.as_slice()).collect();
    write_table(create(&out.join(&csv))?, meta, &headers, &data)?;
    write_svg(&out.join(&svg), plot)?;
    Ok((csv, svg))
}

fn fig1(out: &Path) -> Result<(String, String)> {
    let model = PotentialModel::InfiniteWell { width: PI };
    let grid = RadialGrid::new(PI, 3001)?;
    let r: Vec<f64> = grid.radii().collect();
    let before = find_bound_states(&model, &grid, 2)?;
    let mut columns = vec![
        ("r".to_string(), r.clone()),
        ("psi1_before".to_string(), before[0].psi.samples().to_vec()),
        ("psi2_before".to_string(), before[1].psi.samples().to_vec()),
    ];
    let mut panels = Vec::new();
    let mut meta = base_meta("1");
    meta.model(&model)
        .grid(&grid)
        .push_f64("c2_ratio", FIG1_RATIO)
        .push("weight_label", "c_sq=psi'(0)^2");
    for nu in [1usize, 2] {
        let t = apply_weight_change(&model, ChosenState::Level(nu), NewWeight::Ratio(FIG1_RATIO), &grid)?;
        let after = find_bound_states_in(&t.v, Boundary::HardWall, 2)?;
        meta.push_f64(&format!("nu{nu}_c0_sq"), t.weight.c0_sq)
            .push_f64(&format!("nu{nu}_c_sq"), t.weight.c_sq);
        let mut states = Panel::new(format!("level {nu} chosen"));
        for (i, s) in before.iter().enumerate() {
            let label = format!("psi{}", i + 1);
            states = states.with(Series::new(format!("{label} before"), &r, s.psi.samples()).dashed());
            states = states.with(Series::new(format!("{label} after"), &r, after[i].psi.samples()));
        }
        panels.push(states);
        panels.push(
            Panel::new(format!("delta V, level {nu}")).with(Series::new("delta V", &r, t.delta_v.samples())),
        );
        columns.push((format!("dV_nu{nu}"), t.delta_v.samples().to_vec()));
        for (i, s) in after.iter().enumerate() {
            columns.push((format!("psi{}_after_nu{nu}", i + 1), s.psi.samples().to_vec()));
        }
    }
    let plot = Plot {
        title: format!("Shifting levels of the well L = pi, weight x{}", fmt_f64(FIG1_RATIO)),
        x_label: "r".into(),
        panels,
    };
    save(out, "fig1_shift", &meta, &columns, &plot)
}

fn fig2(out: &Path) -> Result<(String, String)> {
    let grid = RadialGrid::new(40.0, 4001)?;
    let r: Vec<f64> = grid.radii().collect();
    let mut meta = base_meta("2");
    meta.model(&PotentialModel::FreeHalfAxis)
        .grid(&grid)
        .push_f64("k_b", 1.0)
        .push(
            "dc2_ladder",
            FIG2_LADDER.map(fmt_f64).join(","),
        );
    let mut columns = vec![("r".to_string(), r.clone())];
    let mut psi_panel = Panel::new("psi");
    let mut v_panel = Panel::new("V");
    for dc2 in FIG2_LADDER {
        let sys = build_bsec(&PotentialModel::FreeHalfAxis, 1.0, dc2, &grid)?;
        let tag = fmt_f64(dc2);
        psi_panel = psi_panel.with(Series::new(format!("dc2={tag}"), &r, sys.psi.samples()));
        v_panel = v_panel.with(Series::new(format!("dc2={tag}"), &r, sys.v.samples()));
        columns.push((format!("psi_dc2_{tag}"), sys.psi.samples().to_vec()));
        columns.push((format!("V_dc2_{tag}"), sys.v.samples().to_vec()));
    }
    let plot = Plot {
        title: "Bound states embedded in the continuum, k_b = 1".into(),
        x_label: "r".into(),
        panels: vec![psi_panel, v_panel],
    };
    save(out, "fig2_bsec", &meta, &columns, &plot)
}

fn fig3(out: &Path) -> Result<(String, String)> {
    let grid = RadialGrid::new(300.0, 15001)?;
    let r: Vec<f64> = grid.radii().collect();
    let sys = build_bsec(&PotentialModel::FreeHalfAxis, 1.0, 1.0, &grid)?;
    let energy = FIG3_K * FIG3_K;
    let phi = integrate_regular(&sys.v, energy, taylor_start(sys.v[0], energy, grid.h()))?;
    let free = GridFunction::from_fn(grid, |x| (FIG3_K * x).sin() / FIG3_K)?;
    let beats = beating_analysis(&sys.v, energy)?;
    let mut meta = base_meta("3");
    meta.model(&PotentialModel::FreeHalfAxis)
        .grid(&grid)
        .push_f64("k_b", 1.0)
        .push_f64("delta_c_sq", 1.0)
        .push_f64("E", energy)
        .push_f64("beat_period", beats.beat_period);
    let columns = vec![
        ("r".to_string(), r.clone()),
        ("V".to_string(), sys.v.samples().to_vec()),
        ("phi".to_string(), phi.samples().to_vec()),
        ("phi_free".to_string(), free.samples().to_vec()),
    ];
    let plot = Plot {
        title: format!("Scattering wave at E = {}, BSEC at E_b = 1", fmt_f64(energy)),
        x_label: "r".into(),
        panels: vec![
            Panel::new("phi")
                .with(Series::new("phi", &r, phi.samples()))
                .with(Series::new("sin(kr)/k", &r, free.samples()).dashed()),
            Panel::new("V").with(Series::new("V", &r, sys.v.samples())),
        ],
    };
    save(out, "fig3_beats", &meta, &columns, &plot)
}

fn fig5(out: &Path) -> Result<(String, String)> {
    let grid = RadialGrid::new(40.0, 4001)?;
    let r: Vec<f64> = grid.radii().collect();
    let model = PotentialModel::RepulsiveCoulomb { strength: 1.0 };
    let sys = build_bsec(&model, 1.0, 1.0, &grid)?;
    let mut meta = base_meta("5");
    meta.model(&model)
        .grid(&grid)
        .push_f64("E_b", 1.0)
        .push_f64("delta_c_sq", 1.0);
    let columns = vec![
        ("r".to_string(), r.clone()),
        ("V0".to_string(), sys.v0.samples().to_vec()),
        ("V".to_string(), sys.v.samples().to_vec()),
        ("phi0".to_string(), sys.phi0.samples().to_vec()),
        ("psi".to_string(), sys.psi.samples().to_vec()),
    ];
    let potentials = Panel::new("potential")
        .with(Series::new("V0 = 1/r", &r, sys.v0.samples()).dashed())
        .with(Series::new("V", &r, sys.v.samples()));
    let plot = Plot {
        title: "BSEC from the repulsive Coulomb potential".into(),
        x_label: "r".into(),
        panels: vec![
            clip_panel(potentials, &r, 0.5),
            Panel::new("wave")
                .with(Series::new("phi0", &r, sys.phi0.samples()).dashed())
                .with(Series::new("psi", &r, sys.psi.samples())),
        ],
    };
    save(out, "fig5_coulomb", &meta, &columns, &plot)
}
