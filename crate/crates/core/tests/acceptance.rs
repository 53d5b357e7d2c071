//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, then the
//! assertion. Run with `cargo test -p specweight --test acceptance -- --nocapture
//! --test-threads=1` for an ordered report.

use std::f64::consts::PI;

use specweight::numerics::{cumulative_integral, definite_integral, find_zeros, max_abs_diff};
use specweight::scattering::{phase_shift, slots_from};
use specweight::transform::transform_bound_state;
use specweight::{
    apply_weight_change, beating_analysis, build_bsec_free, build_bsec_numeric, find_bound_states,
    find_bound_states_in, rearrange_blocks, shift_report, transform_potential_logform,
    truncate_and_width, Boundary, BsecSystem, ChosenState, GridFunction, NewWeight,
    PotentialModel, RadialGrid, Sign,
};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {id:02} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn well() -> PotentialModel {
    PotentialModel::InfiniteWell { width: PI }
}

fn well_grid(n: usize) -> RadialGrid {
    RadialGrid::new(PI, n).unwrap()
}

const RATIOS: [f64; 3] = [0.5, 2.0, 10.0];

#[test]
fn identity_transform() {
    const TOL: f64 = 1e-12;
    let g = well_grid(3001);
    let states = find_bound_states(&well(), &g, 4).unwrap();
    let v0 = well().evaluate(&g).unwrap();
    let mut worst = 0.0_f64;
    for s in &states[..2] {
        let t = transform_bound_state(&v0, s, NewWeight::Ratio(1.0)).unwrap();
        worst = worst.max(max_abs_diff(&t.v, &v0));
        worst = worst.max(max_abs_diff(&t.phi_nu, &t.phi0_nu));
        for other in &states {
            let phi0 = other.regular().unwrap();
            worst = worst.max(max_abs_diff(&t.solution_at(&phi0).unwrap(), &phi0));
        }
    }
    let fg = RadialGrid::with_step(50.0, 1e-2).unwrap();
    for e in [0.5, 1.0, 2.0] {
        let t = apply_weight_change(
            &PotentialModel::FreeHalfAxis,
            ChosenState::Energy(e),
            NewWeight::Absolute(0.0),
            &fg,
        )
        .unwrap();
        worst = worst.max(max_abs_diff(&t.v, &t.v0));
        worst = worst.max(max_abs_diff(&t.phi_nu, &t.phi0_nu));
        let other = GridFunction::from_fn(fg, |r| (1.3 * r).sin() / 1.3).unwrap();
        worst = worst.max(max_abs_diff(&t.solution_at(&other).unwrap(), &other));
    }
    report(
        1,
        "identity transform",
        worst <= TOL,
        &format!("max deviation {worst:.3e} (tol {TOL:e})"),
    );
}

#[test]
fn log_form_cross_check() {
    const TOL: f64 = 5e-4;
    let diff_at = |n: usize| -> f64 {
        let g = well_grid(n);
        let mut worst = 0.0_f64;
        for nu in [1, 2] {
            for ratio in RATIOS {
                let t = apply_weight_change(&well(), ChosenState::Level(nu), NewWeight::Ratio(ratio), &g)
                    .unwrap();
                let log_form = transform_potential_logform(&t.v0, &t.p).unwrap();
                worst = worst.max(max_abs_diff(&t.v, &log_form));
            }
        }
        worst
    };
    let coarse_grid = RadialGrid::with_step(PI, 1e-3).unwrap();
    let n = coarse_grid.n_points();
    let coarse = diff_at(n);
    let fine = diff_at(2 * (n - 1) + 1);
    let ratio = coarse / fine;
    report(
        2,
        "log-form cross-check",
        coarse <= TOL && (3.0..=5.0).contains(&ratio),
        &format!(
            "max diff {coarse:.3e} at h={:.3e}, {fine:.3e} at h/2, ratio {ratio:.2} (tol {TOL:e}, ratio ~4)",
            coarse_grid.h()
        ),
    );
}

#[test]
fn normalization_identity() {
    const TOL: f64 = 1e-6;
    let g = well_grid(3001);
    let mut worst = 0.0_f64;
    for nu in [1, 2] {
        for ratio in RATIOS {
            let t = apply_weight_change(&well(), ChosenState::Level(nu), NewWeight::Ratio(ratio), &g)
                .unwrap();
            let norm = definite_integral(&t.phi_nu.map(|x| x * x).unwrap());
            worst = worst.max((norm * t.weight.c_sq - 1.0).abs());
        }
    }
    report(
        3,
        "normalization identity",
        worst <= TOL,
        &format!("max relative error {worst:.3e} (tol {TOL:e})"),
    );
}

#[test]
fn isospectrality() {
    const TOL: f64 = 1e-6;
    // the transformed potential carries an O(h^2) derivative error
    let g = well_grid(12001);
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for nu in [1, 2] {
        for ratio in [0.5, 2.0, 5.0, 10.0, 50.0] {
            let t = apply_weight_change(&well(), ChosenState::Level(nu), NewWeight::Ratio(ratio), &g)
                .unwrap();
            let states = find_bound_states_in(&t.v, Boundary::HardWall, 4).unwrap();
            for s in &states {
                let exact = (s.nu * s.nu) as f64;
                worst = worst.max((s.energy - exact).abs() / exact);
            }
            cases += 1;
        }
    }
    report(
        4,
        "isospectrality",
        worst <= TOL,
        &format!("{cases} weight changes, lowest 4 levels, max relative shift {worst:.3e} (tol {TOL:e})"),
    );
}

#[test]
fn block_structure() {
    use Sign::*;
    let g = well_grid(3001);
    let h = g.h();
    let mut pass = true;
    let mut notes = Vec::new();
    for (ratio, expected) in [(2.0, vec![Plus, Minus]), (0.5, vec![Minus, Plus])] {
        for nu in [1usize, 2] {
            let r = shift_report(&well(), nu, NewWeight::Ratio(ratio), &g, nu).unwrap();
            let blocks = r.blocks();
            let knots: Vec<f64> = (0..=nu).map(|j| j as f64 * PI / nu as f64).collect();
            let bounds_ok = blocks.blocks.len() == nu
                && blocks.blocks.iter().enumerate().all(|(j, b)| {
                    (b.interval.0 - knots[j]).abs() <= h && (b.interval.1 - knots[j + 1]).abs() <= h
                });
            let patterns: Vec<String> = blocks
                .patterns()
                .iter()
                .map(|p| p.iter().map(Sign::to_string).collect::<Vec<_>>().join(""))
                .collect();
            let ok = bounds_ok && blocks.patterns().iter().all(|p| *p == expected);
            pass &= ok;
            notes.push(format!(
                "nu={nu} c2/c02={ratio}: [{}] want {}",
                patterns.join(" "),
                expected.iter().map(Sign::to_string).collect::<String>()
            ));
        }
    }
    report(5, "block structure", pass, &notes.join("; "));
}

#[test]
fn shift_and_recoil_directions() {
    const LEVELS: usize = 4;
    let g = well_grid(3001);
    let ladder = [1.0, 2.0, 5.0, 10.0, 50.0];
    let mut pass = true;
    let mut notes = Vec::new();
    for chosen in [1usize, 2] {
        // centroids[step][level]
        let centroids: Vec<Vec<f64>> = ladder
            .iter()
            .map(|&x| {
                let r = shift_report(&well(), chosen, NewWeight::Ratio(x), &g, LEVELS).unwrap();
                r.levels.iter().map(|l| l.centroid_after).collect()
            })
            .collect();
        for level in 0..LEVELS {
            let path: Vec<f64> = centroids.iter().map(|c| c[level]).collect();
            let ok = if level + 1 == chosen {
                path.windows(2).all(|w| w[1] < w[0])
            } else {
                path.windows(2).all(|w| w[1] > w[0])
            };
            pass &= ok;
            notes.push(format!(
                "chosen {chosen} level {}: <r> {:.4}->{:.4}",
                level + 1,
                path[0],
                path[path.len() - 1]
            ));
        }
    }
    report(6, "shift and recoil directions", pass, &notes.join("; "));
}

fn mass(psi: &GridFunction, upto: f64) -> f64 {
    let cum = cumulative_integral(&psi.map(|x| x * x).unwrap());
    cum.interpolate(upto).unwrap()
}

#[test]
fn bsec_construction() {
    let g = RadialGrid::with_step(400.0, 1e-2).unwrap();
    let h = g.h();
    let ladder = [0.5, 1.0, 2.0, 5.0];
    let systems: Vec<BsecSystem> = ladder
        .iter()
        .map(|&dc2| build_bsec_free(1.0, dc2, &g).unwrap())
        .collect();

    let norm_err = systems
        .iter()
        .map(|s| (definite_integral(&s.psi.map(|x| x * x).unwrap()) * s.delta_c_sq - 1.0).abs())
        .fold(0.0, f64::max);
    let fractions: Vec<f64> = systems
        .iter()
        .map(|s| mass(&s.psi, 10.0 * PI) / mass(&s.psi, 400.0))
        .collect();
    let fractions_up = fractions.windows(2).all(|w| w[1] > w[0]);
    let reference = systems[0].knots();
    let knots_ok = systems.iter().all(|s| {
        let k = s.knots();
        k.len() == reference.len() && k.iter().zip(&reference).all(|(a, b)| (a - b).abs() <= h)
    });

    let mut tail_worst: Vec<(f64, f64)> = Vec::new();
    for s in &systems {
        let y: Vec<f64> = g.radii().zip(s.v.samples()).map(|(r, v)| r * v.abs()).collect();
        let worst = (1..y.len() - 1)
            .filter(|&i| g.r(i) > 50.0 && y[i] > y[i - 1] && y[i] >= y[i + 1])
            .map(|i| (y[i] / 4.0 - 1.0).abs())
            .fold(0.0, f64::max);
        tail_worst.push((s.delta_c_sq, worst));
    }
    let tail_ok = tail_worst.iter().all(|&(_, w)| w <= 0.02);

    let pass = norm_err <= 0.02 && fractions_up && knots_ok && tail_ok;
    let tails: Vec<String> = tail_worst
        .iter()
        .map(|(d, w)| format!("dc2={d}: {:.2}%", 100.0 * w))
        .collect();
    report(
        7,
        "BSEC construction",
        pass,
        &format!(
            "norm err {:.2}% (tol 2%); mass in [0,10pi] {:?} increasing={fractions_up}; knots invariant={knots_ok}; r|V| peak deviation from 4 beyond r=50: {} (tol 2%)",
            100.0 * norm_err,
            fractions.iter().map(|f| (f * 1e4).round() / 1e4).collect::<Vec<_>>(),
            tails.join(", ")
        ),
    );
}

#[test]
fn zero_asymptotic_phase_shift() {
    let radii = [100.0, 200.0, 400.0];
    let span = 20.0 * PI;
    let g = RadialGrid::with_step(400.0 + span, 1e-2).unwrap();
    let sys = build_bsec_free(1.0, 1.0, &g).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for k in [0.8, 0.95, 1.05, 1.2] {
        let deltas: Vec<f64> = radii
            .iter()
            .map(|&r| phase_shift(&sys.v, k * k, (r, r + span)).unwrap())
            .collect();
        let ok = deltas[2].abs() < 0.05 && deltas.windows(2).all(|w| w[1].abs() < w[0].abs());
        pass &= ok;
        notes.push(format!(
            "k={k}: {:+.4} {:+.4} {:+.4}",
            deltas[0], deltas[1], deltas[2]
        ));
    }
    report(
        8,
        "zero asymptotic phase shift",
        pass,
        &format!("delta at R=100/200/400 (window 20pi): {}", notes.join("; ")),
    );
}

#[test]
fn beatings() {
    let g = RadialGrid::with_step(600.0, 1e-2).unwrap();
    let sys = build_bsec_free(1.0, 1.0, &g).unwrap();
    let near = beating_analysis(&sys.v, 1.05_f64.powi(2)).unwrap();
    let far = beating_analysis(&sys.v, 1.1_f64.powi(2)).unwrap();
    let ratio = near.beat_period / far.beat_period;
    report(
        9,
        "beatings",
        (ratio / 2.0 - 1.0).abs() <= 0.15,
        &format!(
            "period {:.2} at k=1.05, {:.2} at k=1.1, ratio {ratio:.3} (want 2 within 15%)",
            near.beat_period, far.beat_period
        ),
    );
}

#[test]
fn truncation_widths() {
    let g = RadialGrid::with_step(90.0 * PI, 2.5e-3).unwrap();
    let sys = build_bsec_free(1.0, 1.0, &g).unwrap();
    let estimates: Vec<_> = [20.0, 40.0, 80.0]
        .iter()
        .map(|&n| truncate_and_width(&sys, n * PI, (0.8, 1.2), 81).unwrap())
        .collect();
    let gammas_down = estimates.windows(2).all(|w| w[1].gamma < w[0].gamma);
    let offsets: Vec<f64> = estimates.iter().map(|e| (e.e_r - sys.energy()).abs()).collect();
    let converging = offsets.windows(2).all(|w| w[1] <= w[0]);
    let detail: Vec<String> = estimates
        .iter()
        .map(|e| format!("R={:.1}: E_r={:.6} Gamma={:.3e}", e.r_cut, e.e_r, e.gamma))
        .collect();
    report(
        10,
        "truncation widths",
        gammas_down && converging,
        &format!(
            "{}; Gamma decreasing={gammas_down}, |E_r-E_b| non-increasing={converging}",
            detail.join("; ")
        ),
    );
}

#[test]
fn rearrangement() {
    let run = |m: usize| {
        // 60 blocks of width pi with m intervals each
        let g = RadialGrid::new(60.0 * PI, 60 * m + 1).unwrap();
        let sys = build_bsec_free(1.0, 1.0, &g).unwrap();
        let identity = rearrange_blocks(&sys, &slots_from(&[0, 1, 2, 3, 4, 5], &[])).unwrap();
        let swap = rearrange_blocks(&sys, &slots_from(&[0, 2, 1, 3, 4, 5], &[])).unwrap();
        let zeroed = rearrange_blocks(&sys, &slots_from(&[0, 1, 2, 3, 4, 5], &[3])).unwrap();
        let diff = max_abs_diff(&identity.psi_new, &sys.psi) / sys.psi.max_abs();
        (identity.gathered, swap.gathered, zeroed.gathered, diff)
    };
    let (id, sw, ze, diff) = run(314);
    let (_, _, _, diff_fine) = run(628);
    let order = diff / diff_fine;
    // second-order convergence of psi_new toward psi
    let pass = id && sw && ze && (3.0..=5.0).contains(&order);
    report(
        11,
        "rearrangement",
        pass,
        &format!(
            "gathered identity={id} swap={sw} zeroed={ze}; identity psi deviation {diff:.2e}, {diff_fine:.2e} at h/2 (ratio {order:.2})"
        ),
    );
}

#[test]
fn coulomb_bsec() {
    let r_max = 2000.0;
    let g = RadialGrid::with_step(r_max, 1e-2).unwrap();
    let model = PotentialModel::RepulsiveCoulomb { strength: 1.0 };
    let sys = build_bsec_numeric(&model, 1.0, 1.0, &g).unwrap();
    // int_R^inf psi^2 = int_R^r_max psi^2 + 1 / (dc2 p(r_max)) since p' = dc2 phi0^2
    let total = definite_integral(&sys.psi.map(|x| x * x).unwrap());
    let remainder = 1.0 / (sys.delta_c_sq * sys.p[sys.p.len() - 1]);
    let tail = |r: f64| total - mass(&sys.psi, r) + remainder;
    let ratio = tail(200.0) / tail(100.0);
    let norm = total + remainder;
    let pass = (ratio / 0.5 - 1.0).abs() <= 0.2 && (norm * sys.delta_c_sq - 1.0).abs() < 1e-3;
    report(
        12,
        "Coulomb BSEC",
        pass,
        &format!(
            "tail mass T(100)={:.4e} T(200)={:.4e} ratio {ratio:.3} (want 0.5 within 20%); norm*dc2={:.6}; knots={}",
            tail(100.0),
            tail(200.0),
            norm * sys.delta_c_sq,
            find_zeros(&sys.psi, true).len()
        ),
    );
}

#[test]
fn cli_figures_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run = |dir: &std::path::Path| {
        specweight_cli::run([
            "specweight",
            "figs",
            "--out",
            dir.to_str().unwrap(),
        ])
    };
    let code_a = run(a.path());
    let code_b = run(b.path());
    let list = |dir: &std::path::Path| {
        let mut names: Vec<String> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        names
    };
    let names = list(a.path());
    let csv = names.iter().filter(|n| n.ends_with(".csv")).count();
    let svg = names.iter().filter(|n| n.ends_with(".svg")).count();
    let identical = names == list(b.path())
        && names.iter().filter(|n| n.ends_with(".csv")).all(|n| {
            std::fs::read(a.path().join(n)).unwrap() == std::fs::read(b.path().join(n)).unwrap()
        });
    report(
        13,
        "CLI figure regeneration",
        code_a == 0 && code_b == 0 && csv == 4 && svg == 4 && identical,
        &format!("exit codes {code_a}/{code_b}; {csv} CSV + {svg} SVG; CSV byte-identical across runs={identical}"),
    );
}
