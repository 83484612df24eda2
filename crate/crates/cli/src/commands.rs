//! Subcommand definitions and dispatch.
//!
//! Output contract: the machine-readable artifact (JSON, or SVG for
//! `render`) goes to `--out` when given and to stdout otherwise; progress
//! and summaries go to stderr. Exit codes: 0 success, 1 failed checks or
//! numerical errors, 2 usage and I/O errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use potlab_core::{
    exceptional_set, find_critical_points, find_level_seed, harmonic_measure, modify_domain,
    solve_equilibrium, trace_level_curve, BoundarySelector, Check, Clipped, ComponentId,
    EquilibriumSolution, GreenField, ModificationTrace, PipelineParams, Point, SolverConfig,
    TraceFile, VerificationReport,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::scenes::{load_scene, load_scene_file, parse_point};
use crate::svg;
use crate::CliError;

#[derive(Parser)]
#[command(
    name = "potlab",
    version,
    about = "Logarithmic potential theory on unions of discs and squares: \
             equilibrium measures, Green fields, harmonic measure, domain \
             modification, verification, SVG rendering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args)]
pub struct SceneOpts {
    /// Scene JSON file, or a generator spec: cantor_discs, random_discs,
    /// grid_squares, with optional `:key=val,key=val` parameters
    #[arg(long)]
    pub scene: String,
    /// Target boundary node count for the equilibrium solve
    #[arg(long, default_value_t = 256)]
    pub nodes: usize,
    /// Seed for generators that draw random scenes
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

impl SceneOpts {
    fn solve(&self) -> Result<EquilibriumSolution, CliError> {
        let scene = load_scene(&self.scene, self.seed)?;
        let clipped = Clipped::from_scene(&scene);
        Ok(solve_equilibrium(
            &clipped,
            &SolverConfig::with_nodes(self.nodes),
        )?)
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Solve the equilibrium measure and report Robin constant and capacity
    Capacity {
        #[command(flatten)]
        scene: SceneOpts,
        /// Also write the solution nodes as CSV rows `x,y,weight`
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the JSON artifact here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the Green function and its gradient at given points
    GreenEval {
        #[command(flatten)]
        scene: SceneOpts,
        /// Evaluation point `x,y`; repeatable
        #[arg(long = "at", value_name = "X,Y", required = true)]
        at: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Harmonic measure at infinity of a boundary portion
    HarmonicMeasure {
        #[command(flatten)]
        scene: SceneOpts,
        /// Select whole components by id, comma-separated
        #[arg(long, value_name = "ID,ID,...")]
        components: Option<String>,
        /// Select boundary inside the open ball `cx,cy,r`
        #[arg(long, value_name = "CX,CY,R")]
        ball: Option<String>,
        /// Select boundary in the angular sector `cx,cy,theta0,theta1`
        #[arg(long, value_name = "CX,CY,T0,T1")]
        sector: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace a closed level curve of the Green function
    TraceLevel {
        #[command(flatten)]
        scene: SceneOpts,
        /// Level of the curve, must be positive and non-critical
        #[arg(long)]
        level: f64,
        /// Ray origin for locating the curve
        #[arg(long, default_value = "0,0", value_name = "X,Y")]
        anchor: String,
        /// Ray direction for locating the curve
        #[arg(long, default_value = "1,0", value_name = "X,Y")]
        dir: String,
        /// Also write the curve as CSV rows `x,y,g,grad_norm`
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also render scene plus curve as SVG
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Locate the critical points of the Green function
    CriticalPoints {
        #[command(flatten)]
        scene: SceneOpts,
        /// Also render scene plus critical markers as SVG
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the disc/annulus domain-modification pipeline
    Modify {
        #[command(flatten)]
        scene: SceneOpts,
        /// Content exponent offset: the exceptional set is measured in
        /// dimension 1 + eps
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// Mass-threshold factor for selecting squares
        #[arg(long = "M", default_value_t = 8.0)]
        m: f64,
        /// Seed-square side for the first stage
        #[arg(long, default_value_t = 0.0625)]
        rho: f64,
        /// Sublattice stride; annuli dilate squares by this factor
        #[arg(long = "R", default_value_t = 4)]
        r: u32,
        /// Required roundness factor for the sigma-curves
        #[arg(long, default_value_t = 16.0)]
        mu: f64,
        /// Fix the seed sublattice residue `p,q` (each in 1..=R)
        #[arg(long, value_name = "P,Q")]
        residue: Option<String>,
        /// Stop after this many selection steps
        #[arg(long, default_value_t = 4096)]
        max_steps: usize,
        /// Also render the trace as SVG
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run numerical verification suites against a scene
    Verify {
        #[command(flatten)]
        scene: SceneOpts,
        /// Which suite: all, identity, contour, flux, content, gradient,
        /// or pipeline
        #[arg(long, default_value = "all")]
        suite: String,
        /// Content exponent for the content suite
        #[arg(long = "s", default_value_t = 1.5)]
        s: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a scene or a saved modification trace as SVG
    Render {
        /// Scene JSON file or generator spec
        #[arg(long)]
        scene: Option<String>,
        /// Modification trace JSON file (from `modify --out`)
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Seed for generators that draw random scenes
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Usage(format!("writing {}: {e}", path.display())))
}

/// Send the artifact to `--out` or stdout.
fn emit<T: Serialize>(artifact: &T, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(artifact)
        .map_err(|e| CliError::Failed(format!("serializing artifact: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_floats(s: &str, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = s.split(',').map(|v| v.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == n => Ok(v),
        _ => Err(CliError::Usage(format!(
            "{what} must be {n} comma-separated numbers, got `{s}`"
        ))),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Capacity { scene, csv, out } => capacity(&scene, csv.as_ref(), out.as_ref()),
        Command::GreenEval { scene, at, out } => green_eval(&scene, &at, out.as_ref()),
        Command::HarmonicMeasure {
            scene,
            components,
            ball,
            sector,
            out,
        } => harmonic(
            &scene,
            components.as_deref(),
            ball.as_deref(),
            sector.as_deref(),
            out.as_ref(),
        ),
        Command::TraceLevel {
            scene,
            level,
            anchor,
            dir,
            csv,
            svg,
            out,
        } => trace_level(
            &scene,
            level,
            &anchor,
            &dir,
            csv.as_ref(),
            svg.as_ref(),
            out.as_ref(),
        ),
        Command::CriticalPoints { scene, svg, out } => {
            critical_points(&scene, svg.as_ref(), out.as_ref())
        }
        Command::Modify {
            scene,
            eps,
            m,
            rho,
            r,
            mu,
            residue,
            max_steps,
            svg,
            out,
        } => {
            let residue = match residue {
                None => None,
                Some(s) => {
                    let v = parse_floats(&s, 2, "--residue")?;
                    Some((v[0] as u32, v[1] as u32))
                }
            };
            let params = PipelineParams {
                eps,
                m,
                rho,
                r,
                residue,
                mu,
                solver: SolverConfig::with_nodes(scene.nodes),
                max_steps,
            };
            modify(&scene, &params, svg.as_ref(), out.as_ref())
        }
        Command::Verify {
            scene,
            suite,
            s,
            out,
        } => verify(&scene, &suite, s, out.as_ref()),
        Command::Render {
            scene,
            trace,
            seed,
            out,
        } => render(scene.as_deref(), trace.as_ref(), seed, out.as_ref()),
    }
}

fn capacity(
    scene: &SceneOpts,
    csv: Option<&PathBuf>,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let sol = scene.solve()?;
    if let Some(path) = csv {
        let mut text = String::from("x,y,weight\n");
        for (node, w) in sol.mesh.nodes.iter().zip(&sol.weights) {
            text.push_str(&format!("{},{},{}\n", node.position.x, node.position.y, w));
        }
        write_file(path, &text)?;
    }
    let masses: serde_json::Map<String, serde_json::Value> = sol
        .mesh
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| (c.id.as_str().to_owned(), json!(sol.component_mass(i))))
        .collect();
    let artifact = json!({
        "robin": sol.robin,
        "capacity": sol.capacity,
        "nodes": sol.mesh.nodes.len(),
        "component_masses": masses,
    });
    eprintln!(
        "capacity {:.9}  robin {:.9}  ({} nodes)",
        sol.capacity,
        sol.robin,
        sol.mesh.nodes.len()
    );
    emit(&artifact, out)
}

fn green_eval(scene: &SceneOpts, at: &[String], out: Option<&PathBuf>) -> Result<(), CliError> {
    let field = GreenField::new(scene.solve()?);
    let points: Vec<Point> = at
        .iter()
        .map(|s| parse_point(s))
        .collect::<Result<_, _>>()?;
    let rows: Vec<serde_json::Value> = points
        .par_iter()
        .map(|&p| match (field.green_at(p), field.grad(p)) {
            (Ok(g), Ok(grad)) => Ok(json!({
                "x": p.x, "y": p.y, "g": g,
                "grad_x": grad.x, "grad_y": grad.y,
                "grad_norm": grad.norm(), "inside": false,
            })),
            (Err(potlab_core::Error::InsideComponent { .. }), _) => Ok(json!({
                "x": p.x, "y": p.y, "g": 0.0,
                "grad_x": 0.0, "grad_y": 0.0,
                "grad_norm": 0.0, "inside": true,
            })),
            (Err(e), _) | (_, Err(e)) => Err(CliError::from(e)),
        })
        .collect::<Result<_, _>>()?;
    let artifact = json!({ "robin": field.robin(), "points": rows });
    eprintln!("evaluated {} points", rows.len());
    emit(&artifact, out)
}

fn harmonic(
    scene: &SceneOpts,
    components: Option<&str>,
    ball: Option<&str>,
    sector: Option<&str>,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let given = components.is_some() as u8 + ball.is_some() as u8 + sector.is_some() as u8;
    if given != 1 {
        return Err(CliError::Usage(
            "give exactly one of --components, --ball, --sector".into(),
        ));
    }
    let selector = if let Some(ids) = components {
        BoundarySelector::Components {
            ids: ids
                .split(',')
                .map(|s| ComponentId::new(s.trim()))
                .collect(),
        }
    } else if let Some(b) = ball {
        let v = parse_floats(b, 3, "--ball")?;
        BoundarySelector::Ball {
            cx: v[0],
            cy: v[1],
            r: v[2],
        }
    } else {
        let v = parse_floats(sector.unwrap(), 4, "--sector")?;
        BoundarySelector::Sector {
            cx: v[0],
            cy: v[1],
            theta0: v[2],
            theta1: v[3],
        }
    };
    let sol = scene.solve()?;
    let measure = harmonic_measure(&sol, &selector)?;
    let artifact = json!({
        "selector": selector,
        "measure": measure,
        "robin": sol.robin,
        "nodes": sol.mesh.nodes.len(),
    });
    eprintln!("harmonic measure {measure:.9}");
    emit(&artifact, out)
}

fn trace_level(
    scene: &SceneOpts,
    level: f64,
    anchor: &str,
    dir: &str,
    csv: Option<&PathBuf>,
    svg_out: Option<&PathBuf>,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let scene_file = load_scene_file(&scene.scene, scene.seed)?;
    let field = GreenField::new(scene.solve()?);
    let seed = find_level_seed(&field, level, parse_point(anchor)?, parse_point(dir)?)?;
    let curve = trace_level_curve(&field, level, seed)?;
    let enclosed: Vec<&str> = curve
        .enclosed
        .iter()
        .map(|&i| field.solution().mesh.components[i].id.as_str())
        .collect();
    if let Some(path) = csv {
        let mut text = String::from("x,y,g,grad_norm\n");
        for &p in &curve.points {
            let g = field.green_at(p)?;
            let gn = field.grad_norm(p)?;
            text.push_str(&format!("{},{},{g},{gn}\n", p.x, p.y));
        }
        write_file(path, &text)?;
    }
    if let Some(path) = svg_out {
        write_file(
            path,
            &svg::render_curves(&scene_file, &[(level, curve.points.clone())]),
        )?;
    }
    let points: Vec<[f64; 2]> = curve.points.iter().map(|p| [p.x, p.y]).collect();
    let artifact = json!({
        "level": curve.level,
        "length": curve.length,
        "steps": curve.steps,
        "enclosed": enclosed,
        "points": points,
    });
    eprintln!(
        "level {:.6}: {} points, length {:.6}, encloses {} components",
        level,
        curve.points.len(),
        curve.length,
        enclosed.len()
    );
    emit(&artifact, out)
}

fn critical_points(
    scene: &SceneOpts,
    svg_out: Option<&PathBuf>,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let scene_file = load_scene_file(&scene.scene, scene.seed)?;
    let field = GreenField::new(scene.solve()?);
    let pts = find_critical_points(&field)?;
    if let Some(path) = svg_out {
        let marks: Vec<Point> = pts.iter().map(|c| c.position).collect();
        write_file(path, &svg::render_critical(&scene_file, &marks))?;
    }
    let rows: Vec<serde_json::Value> = pts
        .iter()
        .map(|c| {
            json!({
                "x": c.position.x, "y": c.position.y,
                "g": c.value, "multiplicity": c.multiplicity,
            })
        })
        .collect();
    let count: usize = pts.iter().map(|c| c.multiplicity).sum();
    let artifact = json!({
        "robin": field.robin(),
        "count_with_multiplicity": count,
        "points": rows,
    });
    eprintln!("{count} critical points (with multiplicity)");
    emit(&artifact, out)
}

fn modify(
    scene: &SceneOpts,
    params: &PipelineParams,
    svg_out: Option<&PathBuf>,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let input = load_scene(&scene.scene, scene.seed)?;
    let trace = modify_domain(&input, params)?;
    let file = trace.to_json();
    if let Some(path) = svg_out {
        write_file(path, &svg::render_trace(&file))?;
    }
    eprintln!(
        "modified: {} seed discs, {} steps, {} final components, capacity {:.9} -> {:.9}",
        file.first_stage.len(),
        file.steps.len(),
        file.final_scene.components.len(),
        file.baseline.capacity,
        file.steps
            .last()
            .map(|s| s.after_step.capacity)
            .unwrap_or(file.after_first_stage.capacity),
    );
    emit(&file, out)
}

const SUITES: [&str; 6] = ["identity", "contour", "flux", "content", "gradient", "pipeline"];

fn pipeline_report(trace: &ModificationTrace) -> Result<VerificationReport, CliError> {
    let mut report = VerificationReport::new("pipeline");
    report
        .input("seeds", trace.first_stage.len().to_string())
        .input("steps", trace.steps.len().to_string());
    let invariants = trace.check_invariants();
    if let Err(e) = &invariants {
        report.input("invariant_failure", e.to_string());
    }
    report.check(Check::eq(
        "final_scene_invariants_hold",
        invariants.is_ok() as u8 as f64,
        1.0,
    ));
    let coverage = trace.coverage_check();
    report.check(Check::eq(
        "seed_squares_covered",
        coverage.covered as u8 as f64,
        1.0,
    ));
    report.check(Check::eq(
        "uncovered_seed_count",
        coverage.uncovered_seeds.len() as f64,
        0.0,
    ));
    let growth = trace.ball_growth();
    report.quantity("ball_growth", growth);
    report.check(Check::lt("ball_growth_is_finite", growth, f64::INFINITY));
    report.check(Check::ge("ball_growth_nonnegative", growth, 0.0));
    let exc = exceptional_set(trace)?;
    report
        .quantity("exceptional_content_bound", exc.content_bound)
        .quantity("exceptional_residual_measure", exc.residual_measure);
    report.check(Check::lt(
        "exceptional_content_is_finite",
        exc.content_bound,
        f64::INFINITY,
    ));
    report.check(Check::ge(
        "exceptional_content_nonnegative",
        exc.content_bound,
        0.0,
    ));
    report.check(Check::ge(
        "residual_measure_nonnegative",
        exc.residual_measure,
        -1e-12,
    ));
    report.check(Check::le(
        "residual_measure_at_most_one",
        exc.residual_measure,
        1.0 + 1e-9,
    ));
    Ok(report)
}

fn verify(scene: &SceneOpts, suite: &str, s: f64, out: Option<&PathBuf>) -> Result<(), CliError> {
    let wanted: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(CliError::Usage(format!(
            "unknown suite `{suite}`; pick one of all, {}",
            SUITES.join(", ")
        )));
    };
    let input = load_scene(&scene.scene, scene.seed)?;
    let config = SolverConfig::with_nodes(scene.nodes);

    let needs_field = ["identity", "contour", "flux"];
    let field = if wanted.iter().any(|w| needs_field.contains(w)) {
        let clipped = Clipped::from_scene(&input);
        Some(GreenField::new(solve_equilibrium(&clipped, &config)?))
    } else {
        None
    };
    let trace = if wanted.iter().any(|&w| w == "gradient" || w == "pipeline") {
        let params = PipelineParams {
            solver: config.clone(),
            ..PipelineParams::default()
        };
        Some(modify_domain(&input, &params)?)
    } else {
        None
    };

    let mut reports = Vec::new();
    for &name in &wanted {
        let report = match name {
            "identity" => potlab_core::check_level_log_identity(field.as_ref().unwrap())?,
            "contour" => potlab_core::check_contour_sum(field.as_ref().unwrap())?,
            "flux" => potlab_core::check_flux_normalization(field.as_ref().unwrap())?,
            "content" => potlab_core::check_content_bound(&input, s, &config)?,
            "gradient" => potlab_core::check_gradient_bound(trace.as_ref().unwrap())?,
            _ => pipeline_report(trace.as_ref().unwrap())?,
        };
        for check in &report.checks {
            eprintln!(
                "[{}] {} {}: {} {} {}",
                if check.pass { "pass" } else { "FAIL" },
                report.name,
                check.name,
                check.lhs,
                check.op,
                check.rhs,
            );
        }
        reports.push(report);
    }

    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            let name = r.name.clone();
            r.failures()
                .into_iter()
                .map(move |f| format!("{name}.{f}"))
                .collect::<Vec<_>>()
        })
        .collect();
    let passed = failures.is_empty();
    let artifact = json!({
        "suites": reports,
        "passed": passed,
        "failures": failures,
    });
    emit(&artifact, out)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} verification checks failed: {}",
            failures.len(),
            failures.join(", ")
        )))
    }
}

fn render(
    scene: Option<&str>,
    trace: Option<&PathBuf>,
    seed: u64,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    let svg = match (scene, trace) {
        (Some(s), None) => svg::render_scene(&load_scene_file(s, seed)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("reading trace {}: {e}", path.display())))?;
            let file: TraceFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("parsing trace {}: {e}", path.display())))?;
            svg::render_trace(&file)
        }
        _ => {
            return Err(CliError::Usage(
                "give exactly one of --scene, --trace".into(),
            ))
        }
    };
    match out {
        Some(path) => write_file(path, &svg),
        None => {
            print!("{svg}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn the_argument_grammar_is_self_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn modify_accepts_the_documented_flag_spelling() {
        let cli = Cli::try_parse_from([
            "potlab", "modify", "--scene", "s.json", "--eps", "0.5", "--M", "8", "--rho",
            "0.0625", "--R", "4", "--out", "trace.json",
        ])
        .unwrap();
        let Command::Modify { eps, m, rho, r, .. } = cli.command else {
            panic!("expected modify");
        };
        assert_eq!((eps, m, rho, r), (0.5, 8.0, 0.0625, 4));
    }

    #[test]
    fn unknown_suites_are_usage_errors() {
        let scene = SceneOpts {
            scene: "cantor_discs:depth=0".into(),
            nodes: 64,
            seed: 1,
        };
        let err = verify(&scene, "nonsense", 1.5, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
