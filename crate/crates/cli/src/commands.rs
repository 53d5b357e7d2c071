use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use specweight::io::{
    bsec_metadata, fmt_f64, read_bsec, read_transform, transform_metadata, write_beats, write_bsec,
    write_phase_scan, write_shift_report, write_table, write_transform, Metadata,
};
use specweight::numerics::{cumulative_integral, definite_integral};
use specweight::scattering::{linspace, slots_from, snap_to_knot};
use specweight::transform::knots_with_ends;
use specweight::{
    beating_analysis, build_bsec_free, build_bsec_numeric, decompose_blocks, rearrange_blocks,
    scan_phase, shift_report, truncate_and_width, BsecSystem, NewWeight, PotentialModel,
    RadialGrid,
};

use crate::svg::{render, Panel, Plot, Series};
use crate::{
    figures, BlocksArgs, BsecArgs, Cli, Command, GridArgs, ModelKind, PhaseScanArgs,
    RearrangeArgs, ResonanceArgs, ShiftArgs,
};

pub(crate) fn dispatch(cli: &Cli) -> Result<()> {
    let out = &cli.out;
    match &cli.command {
        Command::Shift(a) => shift(a, &cli.grid, out),
        Command::Bsec(a) => bsec(a, &cli.grid, out),
        Command::PhaseScan(a) => phase_scan(a, out),
        Command::Resonance(a) => resonance(a),
        Command::Blocks(a) => blocks(a),
        Command::Rearrange(a) => rearrange(a, out),
        Command::Figs => figures::write_all(out),
    }
}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    specweight::Error::InvalidParameter(msg.into()).into()
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {x}")))
    }
}

fn grid_from(args: &GridArgs, default_r_max: f64, default_step: f64) -> Result<RadialGrid> {
    let r_max = args.r_max.unwrap_or(default_r_max);
    let grid = match args.n_points {
        Some(n) => RadialGrid::new(r_max, n)?,
        None => RadialGrid::with_step(r_max, default_step)?,
    };
    Ok(grid)
}

pub(crate) fn prepare_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub(crate) fn write_svg(path: &Path, plot: &Plot) -> Result<()> {
    fs::write(path, render(plot)).with_context(|| format!("writing {}", path.display()))
}

fn emit(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn grid_flags(g: &RadialGrid) -> String {
    format!("--r-max {} --n-points {}", fmt_f64(g.r_max()), g.n_points())
}

fn names(paths: &[PathBuf]) -> Vec<String> {
    paths.iter().map(|p| p.display().to_string()).collect()
}

fn shift(a: &ShiftArgs, grid_args: &GridArgs, out: &Path) -> Result<()> {
    if a.nu == 0 {
        return Err(invalid("--nu counts levels from 1"));
    }
    if let Some(x) = a.c2_ratio {
        positive("--c2-ratio", x)?;
    }
    if let Some(x) = a.c2 {
        positive("--c2", x)?;
    }
    let (model, grid) = match a.model {
        ModelKind::Well => {
            positive("--L", a.width)?;
            let n = grid_args.n_points.unwrap_or(3001);
            let r_max = grid_args.r_max.unwrap_or(a.width);
            (
                PotentialModel::InfiniteWell { width: a.width },
                RadialGrid::new(r_max, n)?,
            )
        }
        ModelKind::Linear => {
            positive("--g", a.slope)?;
            (
                PotentialModel::Linear { slope: a.slope },
                grid_from(grid_args, 16.0 / a.slope.cbrt(), 2e-3)?,
            )
        }
        other => return Err(invalid(format!("shift needs a model with bound states, got {other:?}"))),
    };
    let weight = match (a.c2_ratio, a.c2) {
        (Some(x), _) => NewWeight::Ratio(x),
        (None, Some(c2)) => NewWeight::Absolute(c2),
        (None, None) => return Err(invalid("give --c2-ratio or --c2")),
    };
    let levels = a.levels.max(a.nu);
    prepare_dir(out)?;
    let report = shift_report(&model, a.nu, weight, &grid, levels)?;
    let t = &report.transform;

    let weight_flag = match weight {
        NewWeight::Ratio(x) => format!("--c2-ratio {}", fmt_f64(x)),
        NewWeight::Absolute(x) => format!("--c2 {}", fmt_f64(x)),
    };
    let mut meta = transform_metadata(t, &model);
    meta.push("nu", a.nu).push("levels", levels).push(
        "command",
        format!(
            "shift --model {} --L {} --g {} --nu {} {weight_flag} --levels {levels} {}",
            model.short_name(),
            fmt_f64(a.width),
            fmt_f64(a.slope),
            a.nu,
            grid_flags(&grid)
        ),
    );
    let transform_path = out.join("shift_transform.csv");
    let levels_path = out.join("shift_levels.csv");
    let svg_path = out.join("shift.svg");
    write_transform(create(&transform_path)?, t, &meta)?;
    write_shift_report(create(&levels_path)?, &report, &meta)?;

    let r: Vec<f64> = grid.radii().collect();
    let psi_before = t.phi0_nu.scaled(t.weight.c0_sq.sqrt())?;
    let psi_after = t.phi_nu.scaled(t.weight.c_sq.sqrt())?;
    let plot = Plot {
        title: format!("{model}: level {} weight x{}", a.nu, fmt_f64(t.weight.c_sq / t.weight.c0_sq)),
        x_label: "r".into(),
        panels: vec![
            Panel::new("potential")
                .with(Series::new("V0", &r, t.v0.samples()))
                .with(Series::new("V", &r, t.v.samples()))
                .with(Series::new("delta V", &r, t.delta_v.samples()).dashed()),
            Panel::new("chosen state")
                .with(Series::new("psi before", &r, psi_before.samples()).dashed())
                .with(Series::new("psi after", &r, psi_after.samples())),
        ],
    };
    write_svg(&svg_path, &plot)?;

    let patterns: Vec<String> = report
        .blocks()
        .patterns()
        .iter()
        .map(|p| p.iter().map(|s| s.to_string()).collect())
        .collect();
    emit(&json!({
        "command": "shift",
        "model": model.to_string(),
        "weight": t.weight,
        "levels": report.levels,
        "block_patterns": patterns,
        "files": names(&[transform_path, levels_path, svg_path]),
    }))
}

pub(crate) fn bsec_model(kind: ModelKind, strength: f64, slope: f64) -> Result<PotentialModel> {
    Ok(match kind {
        ModelKind::Free => PotentialModel::FreeHalfAxis,
        ModelKind::Coulomb => PotentialModel::RepulsiveCoulomb { strength },
        ModelKind::Linear => PotentialModel::Linear { slope },
        ModelKind::Well => return Err(invalid("the infinite well has no continuum")),
    })
}

pub(crate) fn build_bsec(model: &PotentialModel, k_b: f64, dc2: f64, grid: &RadialGrid) -> Result<BsecSystem> {
    let sys = match model {
        PotentialModel::FreeHalfAxis => build_bsec_free(k_b, dc2, grid)?,
        _ => build_bsec_numeric(model, k_b * k_b, dc2, grid)?,
    };
    Ok(sys)
}

/// Fraction of `int psi^2` (over the grid) lying in `[0, r]`.
pub(crate) fn mass_fraction(psi: &specweight::GridFunction, r: f64) -> Result<f64> {
    let cum = cumulative_integral(&psi.map(|x| x * x)?);
    Ok(cum.interpolate(r.min(cum.grid().r_max()))? / cum[cum.len() - 1])
}

fn bsec(a: &BsecArgs, grid_args: &GridArgs, out: &Path) -> Result<()> {
    positive("--kb", a.kb)?;
    let model = bsec_model(a.model, a.strength, a.slope)?;
    model.validate()?;
    let ladder = match (&a.dc2_ladder, a.dc2) {
        (Some(l), _) if !l.is_empty() => l.clone(),
        (_, Some(d)) => vec![d],
        _ => return Err(invalid("give --dc2 or --dc2-ladder")),
    };
    for &d in &ladder {
        if !(d.is_finite() && d >= 0.0) {
            return Err(invalid(format!("gathering strength must be >= 0, got {d}")));
        }
    }
    let grid = grid_from(grid_args, 100.0, 1e-2)?;
    prepare_dir(out)?;
    let single = ladder.len() == 1;
    let mut systems = Vec::new();
    for &dc2 in &ladder {
        if dc2 == 0.0 {
            eprintln!("warning: no gathering (dc2 = 0), the potential is left unchanged");
        }
        let sys = build_bsec(&model, a.kb, dc2, &grid)?;
        let path = if single {
            out.join("bsec.csv")
        } else {
            out.join(format!("bsec_dc2_{}.csv", fmt_f64(dc2)))
        };
        let mut meta = bsec_metadata(&sys);
        meta.push(
            "command",
            format!(
                "bsec --model {} --kb {} --dc2 {} --Z {} --g {} {}",
                model.short_name(),
                fmt_f64(a.kb),
                fmt_f64(dc2),
                fmt_f64(a.strength),
                fmt_f64(a.slope),
                grid_flags(&grid)
            ),
        );
        write_bsec(create(&path)?, &sys, &meta)?;
        let norm = definite_integral(&sys.psi.map(|x| x * x)?);
        emit(&json!({
            "command": "bsec",
            "model": model.to_string(),
            "k_b": a.kb,
            "delta_c_sq": dc2,
            "norm": norm,
            "mass_fraction_10_half_waves": mass_fraction(&sys.psi, 10.0 * std::f64::consts::PI / a.kb)?,
            "knots": sys.knots().len(),
            "file": path.display().to_string(),
        }))?;
        systems.push(sys);
    }
    let r: Vec<f64> = grid.radii().collect();
    let mut v_panel = Panel::new("V");
    let mut psi_panel = Panel::new("psi");
    for s in &systems {
        let label = format!("dc2={}", fmt_f64(s.delta_c_sq));
        v_panel = v_panel.with(Series::new(label.clone(), &r, s.v.samples()));
        psi_panel = psi_panel.with(Series::new(label, &r, s.psi.samples()));
    }
    if model.singular_origin() {
        v_panel = clip_panel(v_panel, &r, 1.0);
    }
    write_svg(
        &out.join("bsec.svg"),
        &Plot {
            title: format!("BSEC at k_b = {} ({model})", fmt_f64(a.kb)),
            x_label: "r".into(),
            panels: vec![v_panel, psi_panel],
        },
    )
}

/// Fixes the y range of `panel` to the values at `r >= r_from`.
pub(crate) fn clip_panel(panel: Panel, _r: &[f64], r_from: f64) -> Panel {
    let (lo, hi) = panel
        .series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|p| p.0 >= r_from)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        panel.range(lo - pad, hi + pad)
    } else {
        panel
    }
}

fn load_bsec(path: &Path) -> Result<(BsecSystem, Metadata)> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_bsec(f).with_context(|| format!("reading {}", path.display()))
}

fn phase_scan(a: &PhaseScanArgs, out: &Path) -> Result<()> {
    positive("--emin", a.emin)?;
    if !(a.emax > a.emin) {
        return Err(invalid("--emax must exceed --emin"));
    }
    if a.n < 2 {
        return Err(invalid("--n must be at least 2"));
    }
    let span = a.match_span.unwrap_or(20.0 * std::f64::consts::PI / a.emin.sqrt());
    positive("--match-span", span)?;
    if !(a.match_r >= 0.0) {
        return Err(invalid("--match-r must be >= 0"));
    }
    let (sys, source_meta) = load_bsec(&a.from_bsec)?;
    let window = (a.match_r, a.match_r + span);
    if window.1 > sys.grid().r_max() {
        return Err(invalid(format!(
            "matching window [{}, {}] extends beyond r_max = {}",
            window.0,
            window.1,
            sys.grid().r_max()
        )));
    }
    prepare_dir(out)?;
    let energies = linspace(a.emin, a.emax, a.n);
    let scan = scan_phase(&sys.v, &energies, window)?;
    let mut meta = source_meta.clone();
    meta.push("source", a.from_bsec.display()).push(
        "command",
        format!(
            "phase-scan --emin {} --emax {} --n {} --match-r {} --match-span {}",
            fmt_f64(a.emin),
            fmt_f64(a.emax),
            a.n,
            fmt_f64(a.match_r),
            fmt_f64(span)
        ),
    );
    let csv_path = out.join("phase_scan.csv");
    let svg_path = out.join("phase_scan.svg");
    write_phase_scan(create(&csv_path)?, &scan, &meta)?;
    write_svg(
        &svg_path,
        &Plot {
            title: format!("phase shift, match at r = {}", fmt_f64(a.match_r)),
            x_label: "E".into(),
            panels: vec![Panel::new("delta (rad)")
                .with(Series::new("unwrapped", &scan.energies, &scan.unwrapped))
                .with(Series::new("reduced", &scan.energies, &scan.deltas).dashed())],
        },
    )?;
    let mut files = vec![csv_path, svg_path];
    let mut beat_period = None;
    if a.beats {
        let energy = a.energy.ok_or_else(|| invalid("--beats needs --E"))?;
        positive("--E", energy)?;
        let beats = beating_analysis(&sys.v, energy)?;
        let beats_csv = out.join("beats.csv");
        let beats_svg = out.join("beats.svg");
        write_beats(create(&beats_csv)?, &beats, &meta)?;
        let (er, ea): (Vec<f64>, Vec<f64>) = beats.envelope.iter().copied().unzip();
        write_svg(
            &beats_svg,
            &Plot {
                title: format!("envelope beats at E = {}", fmt_f64(energy)),
                x_label: "r".into(),
                panels: vec![Panel::new("|phi| maxima").with(Series::new("envelope", &er, &ea))],
            },
        )?;
        files.push(beats_csv);
        files.push(beats_svg);
        beat_period = Some(beats.beat_period);
    }
    emit(&json!({
        "command": "phase-scan",
        "points": scan.energies.len(),
        "beat_period": beat_period,
        "files": names(&files),
    }))
}

#[derive(Serialize)]
struct ResonanceRow {
    knot: usize,
    #[serde(flatten)]
    estimate: specweight::ResonanceEstimate,
}

fn resonance(a: &ResonanceArgs) -> Result<()> {
    let [lo, hi] = a.window[..] else {
        return Err(invalid("--window takes two energies lo,hi"));
    };
    positive("window start", lo)?;
    if !(hi > lo) {
        return Err(invalid("--window must be increasing"));
    }
    let (sys, _) = load_bsec(&a.from_bsec)?;
    let knots = sys.knots();
    for &n in &a.rcut_knots {
        if n == 0 || n > knots.len() {
            bail!(invalid(format!(
                "knot {n} does not exist (the BSEC has {} knots on its grid)",
                knots.len()
            )));
        }
    }
    for &n in &a.rcut_knots {
        let r = snap_to_knot(&sys, knots[n - 1])?;
        let estimate = truncate_and_width(&sys, r, (lo, hi), a.n)
            .with_context(|| format!("cut at knot {n} (r = {r})"))?;
        emit(&ResonanceRow { knot: n, estimate })?;
    }
    Ok(())
}

fn blocks(a: &BlocksArgs) -> Result<()> {
    let f = File::open(&a.from_shift).with_context(|| format!("opening {}", a.from_shift.display()))?;
    let (t, _) = read_transform(f).with_context(|| format!("reading {}", a.from_shift.display()))?;
    let d = decompose_blocks(&t.delta_v, &knots_with_ends(&t.phi0_nu));
    emit(&d)
}

fn rearrange(a: &RearrangeArgs, out: &Path) -> Result<()> {
    if let Some(&z) = a.zero.iter().find(|&&z| z >= a.perm.len()) {
        return Err(invalid(format!("--zero {z} is outside the permuted range")));
    }
    let (sys, source_meta) = load_bsec(&a.from_bsec)?;
    let slots = slots_from(&a.perm, &a.zero);
    let r = rearrange_blocks(&sys, &slots)?;
    prepare_dir(out)?;
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let mut meta = source_meta;
    meta.push("source", a.from_bsec.display())
        .push("perm", join(&a.perm))
        .push("zero", join(&a.zero))
        .push("gathered", r.gathered)
        .push(
            "command",
            format!("rearrange --perm {} --zero {}", join(&a.perm), join(&a.zero)),
        );
    let path = out.join("rearranged.csv");
    let radii: Vec<f64> = sys.grid().radii().collect();
    write_table(
        create(&path)?,
        &meta,
        &["r", "V", "psi"],
        &[&radii, r.v_new.samples(), r.psi_new.samples()],
    )?;
    emit(&json!({
        "command": "rearrange",
        "gathered": r.gathered,
        "block_envelope": r.block_envelope,
        "file": path.display().to_string(),
    }))
}
