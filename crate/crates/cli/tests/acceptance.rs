//! End-to-end acceptance checks. Each test prints one
//! `ACCEPTANCE <n> <name>: PASS|FAIL` line (run with `--nocapture` to see
//! them on success) and fails the build if its criterion is not met.

use std::f64::consts::{LN_2, PI, TAU};
use std::time::{Duration, Instant};

use potlab::scenes;
use potlab_core::harmonic::{annulus_measure_reference, annulus_measure_solved};
use potlab_core::{
    check_level_log_identity, count_critical_by_argument, find_critical_points, greedy_content,
    harmonic_measure, modify_domain, normal_log_grad_flux, separating_curves, solve_equilibrium,
    BoundarySelector, Clipped, CompactScene, Component, ComponentId, Contour, Disc,
    EquilibriumSolution, GreenField, PipelineParams, Point, Shape, SolverConfig,
    VerificationReport,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

macro_rules! expect {
    ($cond:expr, $($arg:tt)+) => {
        if !($cond) {
            return Err(format!($($arg)+));
        }
    };
}

fn report(n: u32, name: &str, result: Result<(), String>) {
    match &result {
        Ok(()) => println!("ACCEPTANCE {n} {name}: PASS"),
        Err(e) => println!("ACCEPTANCE {n} {name}: FAIL — {e}"),
    }
    if let Err(e) = result {
        panic!("criterion {n} ({name}): {e}");
    }
}

fn ok<T>(r: potlab_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn disc_scene(specs: &[(f64, f64, f64)]) -> CompactScene {
    let components = specs
        .iter()
        .enumerate()
        .map(|(k, &(x, y, r))| Component {
            id: ComponentId::new(format!("c{k}")),
            shape: Shape::Disc(Disc::new(Point::new(x, y), r)),
        })
        .collect();
    CompactScene::new(components).expect("valid test scene")
}

fn solve(scene: &CompactScene, nodes: usize) -> Result<EquilibriumSolution, String> {
    ok(solve_equilibrium(
        &Clipped::from_scene(scene),
        &SolverConfig::with_nodes(nodes),
    ))
}

fn quantity(report: &VerificationReport, key: &str) -> Result<f64, String> {
    report
        .quantities
        .get(key)
        .copied()
        .ok_or_else(|| format!("report {} has no quantity {key}", report.name))
}

#[test]
fn criterion_01_disc_capacity_is_its_radius() {
    let run = || -> Result<(), String> {
        for &r in &[0.25, 0.5, 1.0] {
            let scene = disc_scene(&[(0.0, 0.0, r)]);
            let t0 = Instant::now();
            let coarse = solve(&scene, 256)?;
            let coarse_time = t0.elapsed();
            let t1 = Instant::now();
            let fine = solve(&scene, 1024)?;
            let fine_time = t1.elapsed();
            let err_coarse = (coarse.capacity - r).abs() / r;
            let err_fine = (fine.capacity - r).abs() / r;
            expect!(
                err_coarse < 1e-3,
                "radius {r}: relative error {err_coarse:.3e} at 256 nodes, need < 1e-3"
            );
            expect!(
                err_fine < 1e-4,
                "radius {r}: relative error {err_fine:.3e} at 1024 nodes, need < 1e-4"
            );
            let order = (err_coarse / err_fine).ln() / 4f64.ln();
            expect!(
                order >= 1.8,
                "radius {r}: convergence order {order:.2} from {err_coarse:.3e} -> {err_fine:.3e}, need >= 1.8"
            );
            let budget = Duration::from_secs(2);
            expect!(
                coarse_time < budget && fine_time < budget,
                "radius {r}: solves took {coarse_time:?} / {fine_time:?}, need < 2 s each"
            );
        }
        Ok(())
    };
    report(1, "disc_capacity_is_its_radius", run());
}

#[test]
fn criterion_02_disc_green_matches_the_closed_form() {
    let run = || -> Result<(), String> {
        let r = 0.3;
        let field = GreenField::new(solve(&disc_scene(&[(0.0, 0.0, r)]), 256)?);
        let mut worst = 0.0f64;
        for k in 0..200 {
            // outward spiral from just off the boundary to ten radii out
            let radius = r + 0.05 + 2.65 * k as f64 / 199.0;
            let angle = 2.399_963 * k as f64;
            let z = Point::new(radius * angle.cos(), radius * angle.sin());
            let g = ok(field.green_at(z))?;
            worst = worst.max((g - (radius / r).ln()).abs());
        }
        expect!(
            worst < 1e-3,
            "max |g - log(|z|/r)| = {worst:.3e} over 200 exterior points, need < 1e-3"
        );
        Ok(())
    };
    report(2, "disc_green_matches_the_closed_form", run());
}

#[test]
fn criterion_03_arc_measure_is_angle_over_two_pi() {
    let run = || -> Result<(), String> {
        let nodes = 1536;
        let sol = solve(&disc_scene(&[(0.0, 0.0, 0.3)]), nodes)?;
        // nodes sit at angles 2 pi k / n; offset the sector ends half a gap
        // so no node straddles them
        let half_gap = PI / nodes as f64;
        for &theta in &[PI / 6.0, PI / 2.0, PI] {
            let selector = BoundarySelector::Sector {
                cx: 0.0,
                cy: 0.0,
                theta0: -half_gap,
                theta1: theta - half_gap,
            };
            let measure = ok(harmonic_measure(&sol, &selector))?;
            let exact = theta / TAU;
            expect!(
                (measure - exact).abs() < 1e-3,
                "arc {theta:.4}: measure {measure:.6} vs {exact:.6}, need within 1e-3"
            );
        }
        Ok(())
    };
    report(3, "arc_measure_is_angle_over_two_pi", run());
}

#[test]
fn criterion_04_annulus_measure_matches_the_reference() {
    let run = || -> Result<(), String> {
        // inner disc of capacity 1/2, i.e. Robin constant log 2
        for &outer in &[10.0, 100.0] {
            let at = outer / 2.0;
            let solved = ok(annulus_measure_solved(outer, 0.5, 512, at))?;
            let reference = ok(annulus_measure_reference(outer, LN_2, at))?;
            expect!(
                (solved - reference).abs() < 1e-2,
                "outer {outer}: solved {solved:.6} vs reference {reference:.6}, need within 1e-2"
            );
        }
        let spot = ok(annulus_measure_reference(100.0, LN_2, 50.0))?;
        expect!(
            (spot - 0.13082).abs() < 1e-5,
            "spot value {spot:.6} vs 0.13082, need within 1e-5"
        );
        Ok(())
    };
    report(4, "annulus_measure_matches_the_reference", run());
}

#[test]
fn criterion_05_saddle_counts_agree_with_component_count() {
    let run = || -> Result<(), String> {
        let scenes = [
            disc_scene(&[(-0.22, 0.03, 0.10), (0.24, -0.05, 0.08)]),
            disc_scene(&[(-0.25, -0.10, 0.10), (0.25, -0.08, 0.09), (0.00, 0.22, 0.11)]),
            disc_scene(&[
                (-0.28, -0.20, 0.08),
                (0.26, -0.22, 0.09),
                (0.27, 0.21, 0.07),
                (-0.24, 0.23, 0.10),
            ]),
        ];
        for scene in &scenes {
            let n = scene.len();
            let t0 = Instant::now();
            let field = GreenField::new(solve(scene, 64 * n)?);
            let saddles = ok(find_critical_points(&field))?;
            let newton: usize = saddles.iter().map(|c| c.multiplicity).sum();
            let winding = ok(count_critical_by_argument(&field, Point::new(0.0, 0.0), 0.65))?;
            let elapsed = t0.elapsed();
            expect!(
                newton == n - 1,
                "{n}-disc scene: Newton count {newton}, need {}",
                n - 1
            );
            expect!(
                winding == (n - 1) as i64,
                "{n}-disc scene: argument-principle count {winding}, need {}",
                n - 1
            );
            expect!(
                elapsed < Duration::from_secs(10),
                "{n}-disc scene took {elapsed:?}, need < 10 s"
            );
        }
        Ok(())
    };
    report(5, "saddle_counts_agree_with_component_count", run());
}

/// The four standard scenes for the flux-identity checks, with the
/// residual tolerance each must meet.
fn identity_scenes() -> [(CompactScene, usize, f64); 4] {
    [
        (disc_scene(&[(0.0, 0.0, 0.3)]), 128, 1e-6),
        (disc_scene(&[(-0.25, 0.0, 0.1), (0.25, 0.0, 0.1)]), 128, 1e-2),
        (
            disc_scene(&[(-0.25, 0.02, 0.12), (0.28, -0.05, 0.07)]),
            128,
            1e-2,
        ),
        (
            disc_scene(&[(-0.25, -0.10, 0.10), (0.25, -0.08, 0.09), (0.00, 0.22, 0.11)]),
            144,
            1e-2,
        ),
    ]
}

#[test]
fn criterion_06_flux_identity_closes() {
    let run = || -> Result<(), String> {
        for (scene, nodes, tol) in identity_scenes() {
            let n = scene.len();
            let field = GreenField::new(solve(&scene, nodes)?);
            let id_report = ok(check_level_log_identity(&field))?;
            let residual = quantity(&id_report, "residual")?;
            let lhs = quantity(&id_report, "lhs_flux_integral")?;
            expect!(
                residual.abs() < tol,
                "{n}-component scene: identity residual {residual:.3e}, need < {tol:.0e}"
            );
            expect!(
                lhs > -LN_2,
                "{n}-component scene: flux integral {lhs:.6} must exceed -log 2"
            );
            expect!(
                id_report.passed(),
                "{n}-component scene: failed checks {:?}",
                id_report.failures()
            );
        }
        Ok(())
    };
    report(6, "flux_identity_closes", run());
}

#[test]
fn criterion_07_log_gradient_winding_is_minus_one() {
    let run = || -> Result<(), String> {
        for (scene, nodes, _) in identity_scenes() {
            let n = scene.len();
            let field = GreenField::new(solve(&scene, nodes)?);
            let curves = ok(separating_curves(&field))?;
            expect!(
                curves.len() == n,
                "{n}-component scene: got {} separating curves",
                curves.len()
            );
            for curve in &curves {
                let contour = Contour::from_level_curve(curve);
                let winding = ok(normal_log_grad_flux(&field, &contour))?;
                expect!(
                    (winding + 1.0).abs() < 1e-2,
                    "{n}-component scene, level {:.4}: winding {winding:.6}, need -1 within 1e-2",
                    curve.level
                );
            }
        }
        Ok(())
    };
    report(7, "log_gradient_winding_is_minus_one", run());
}

/// Split the scene's components into a measured set `S`, a deleted set
/// `D`, and untouched remainder; both `S` and `D` non-empty.
fn random_split(rng: &mut ChaCha8Rng, ids: &[ComponentId]) -> (Vec<ComponentId>, Vec<ComponentId>) {
    loop {
        let mut measured = Vec::new();
        let mut deleted = Vec::new();
        for id in ids {
            match rng.gen_range(0..3u8) {
                0 => measured.push(id.clone()),
                1 => deleted.push(id.clone()),
                _ => {}
            }
        }
        if !measured.is_empty() && !deleted.is_empty() {
            return (measured, deleted);
        }
    }
}

#[test]
fn criterion_08_pipeline_integrity_on_cantor_dust() {
    let run = || -> Result<(), String> {
        let scene = scenes::cantor_discs(2, 0.25).map_err(|e| e.to_string())?;
        let params = PipelineParams::default(); // eps 1/2, M 8, rho 1/16, R 4
        let t0 = Instant::now();
        let trace = ok(modify_domain(&scene, &params))?;
        let elapsed = t0.elapsed();
        expect!(
            elapsed < Duration::from_secs(60),
            "pipeline took {elapsed:?}, need < 60 s"
        );
        ok(trace.check_invariants())?; // pairwise-disjoint closed discs
        let coverage = trace.coverage_check();
        expect!(
            coverage.covered,
            "seed squares {:?} are not covered by the surviving squares",
            coverage.uncovered_seeds
        );

        // the linear-growth constant must be stable under mesh doubling
        let growth = trace.ball_growth();
        let doubled = ok(solve_equilibrium(
            &Clipped::from_scene(&trace.final_scene),
            &SolverConfig::with_nodes(2 * trace.params.solver.nodes),
        ))?;
        let growth_doubled = trace.ball_growth_with(&doubled);
        expect!(
            growth.is_finite() && growth > 0.0 && growth_doubled > 0.0,
            "ball growth {growth} / {growth_doubled} not positive finite"
        );
        expect!(
            growth_doubled <= 2.0 * growth && growth <= 2.0 * growth_doubled,
            "ball growth {growth:.4} vs {growth_doubled:.4} under mesh doubling, need within 2x"
        );

        // deleting components (what the annulus construction does) must not
        // shrink the harmonic measure of what stays
        let base_scene = if trace.final_scene.len() >= 3 {
            trace.final_scene.clone()
        } else {
            scene.clone()
        };
        let per_component = 96;
        let base = solve(&base_scene, per_component * base_scene.len())?;
        let ids: Vec<ComponentId> = base_scene
            .components()
            .iter()
            .map(|c| c.id.clone())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..20 {
            let (measured, deleted) = random_split(&mut rng, &ids);
            let selector = BoundarySelector::Components {
                ids: measured.clone(),
            };
            let before = ok(harmonic_measure(&base, &selector))?;
            let kept: Vec<Component> = base_scene
                .components()
                .iter()
                .filter(|c| !deleted.contains(&c.id))
                .cloned()
                .collect();
            let kept_len = kept.len();
            let smaller = CompactScene::new(kept).map_err(|e| e.to_string())?;
            let after_sol = solve(&smaller, per_component * kept_len)?;
            let after = ok(harmonic_measure(&after_sol, &selector))?;
            expect!(
                after >= before - 1e-4,
                "trial {trial}: measure of {measured:?} fell {before:.6} -> {after:.6} after deleting {deleted:?}"
            );
        }
        Ok(())
    };
    report(8, "pipeline_integrity_on_cantor_dust", run());
}

#[test]
fn criterion_09_content_capacity_ratio_is_controlled() {
    let run = || -> Result<(), String> {
        for seed in 0..50u64 {
            let n = 2 + (seed % 7) as usize;
            let scene = scenes::random_discs(n, seed, 0.01, 0.04).map_err(|e| e.to_string())?;
            let clipped = Clipped::from_scene(&scene);
            let sol = solve(&scene, 32 * n)?;
            for &s in &[1.0, 1.5, 2.0] {
                let content = greedy_content(&clipped, s, 6);
                let ratio = content / sol.capacity.powf(s);
                expect!(
                    ratio.is_finite() && ratio > 0.0,
                    "seed {seed}, s={s}: content/capacity^s = {ratio} not positive finite"
                );
            }
        }
        // one disc: content r^s against the exact capacity r
        for &r in &[0.05, 0.11, 0.23, 0.35, 0.49] {
            let clipped = Clipped::from_scene(&disc_scene(&[(0.0, 0.0, r)]));
            for &s in &[1.0, 1.5, 2.0] {
                let ratio = greedy_content(&clipped, s, 6) / r.powf(s);
                expect!(
                    ratio <= 1.0,
                    "disc radius {r}, s={s}: content/capacity^s = {ratio} exceeds 1"
                );
            }
        }
        Ok(())
    };
    report(9, "content_capacity_ratio_is_controlled", run());
}

#[test]
fn criterion_10_artifacts_are_byte_deterministic() {
    let run = || -> Result<(), String> {
        let bin = env!("CARGO_BIN_EXE_potlab");
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let rerun = |name: &str, args: &[&str]| -> Result<(), String> {
            let mut outputs = Vec::new();
            for pass in 0..2 {
                let out = dir.path().join(format!("{name}{pass}.json"));
                let status = std::process::Command::new(bin)
                    .args(args)
                    .arg("--out")
                    .arg(&out)
                    .output()
                    .map_err(|e| format!("running {name}: {e}"))?;
                expect!(
                    status.status.success(),
                    "{name} run {pass} exited with {:?}: {}",
                    status.status.code(),
                    String::from_utf8_lossy(&status.stderr)
                );
                outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
            }
            expect!(
                !outputs[0].is_empty() && outputs[0] == outputs[1],
                "{name} artifacts differ between identical runs"
            );
            Ok(())
        };
        rerun(
            "modify",
            &["modify", "--scene", "cantor_discs:depth=1", "--seed", "7"],
        )?;
        rerun(
            "verify",
            &[
                "verify",
                "--scene",
                "cantor_discs:depth=1",
                "--nodes",
                "128",
                "--seed",
                "7",
                "--suite",
                "all",
            ],
        )?;
        Ok(())
    };
    report(10, "artifacts_are_byte_deterministic", run());
}
