use std::path::Path;

use nsmop::problems::lookup;
use nsmop::subdivision::{pareto_cover, DyadicBox, ParetoCover};
use nsmop::{BoundingBox, Problem};
use serde::Serialize;

use crate::args::ParetoArgs;
use crate::error::{CliError, CliResult};
use crate::output::{digest, ensure_dir, numbered, out_file, push_floats, write_csv, write_json};

pub fn root_box(spec: &[f64], dim: usize) -> CliResult<DyadicBox> {
    let bounds = match spec.len() {
        2 => BoundingBox::cube(spec[0], spec[1], dim),
        len if len == 2 * dim => BoundingBox::new(
            spec.iter().step_by(2).copied().collect(),
            spec.iter().skip(1).step_by(2).copied().collect(),
        ),
        len => {
            return Err(CliError::Usage(format!(
                "--root needs 2 or {} values for dimension {dim}, got {len}",
                2 * dim
            )))
        }
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    DyadicBox::from_bounds(&bounds).map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Debug, Serialize)]
struct ParetoSummary<'a> {
    problem: &'a str,
    root_lower: Vec<f64>,
    root_upper: Vec<f64>,
    iterations: usize,
    inner_m: usize,
    samples_per_axis: usize,
    config_digest: String,
    boxes: usize,
    images: usize,
    escaped_images: usize,
    nondominated: usize,
}

pub fn write_pareto_outputs(dir: &Path, problem: &Problem, cover: &ParetoCover) -> CliResult<()> {
    ensure_dir(dir)?;
    let n = problem.dim();
    let mut header = numbered("center_", n);
    header.extend(numbered("radius_", n));
    let rows: Vec<Vec<String>> = cover
        .collection
        .boxes()
        .iter()
        .map(|b| {
            let mut row = Vec::with_capacity(2 * n);
            push_floats(&mut row, &b.center);
            push_floats(&mut row, &b.radii);
            row
        })
        .collect();
    write_csv(&out_file(dir, "pareto_boxes.csv"), &header, &rows)?;

    let mut header = numbered("x", n);
    header.extend(numbered("f", problem.num_objectives()));
    header.push("nondominated".into());
    let rows: Vec<Vec<String>> = cover
        .images
        .iter()
        .zip(&cover.image_values)
        .zip(&cover.nondominated)
        .map(|((x, f), nd)| {
            let mut row = Vec::new();
            push_floats(&mut row, x);
            push_floats(&mut row, f);
            row.push(u8::from(*nd).to_string());
            row
        })
        .collect();
    write_csv(&out_file(dir, "pareto_front.csv"), &header, &rows)
}

pub fn cmd_pareto(args: &ParetoArgs) -> CliResult<u8> {
    let problem = lookup(&args.problem)?;
    let root = root_box(&args.root, problem.dim())?;
    let config = args.flags.config();
    if config.epsilon_schedule.is_some() {
        return Err(CliError::Usage("pareto uses a single radius; drop --eps-schedule".into()));
    }
    config.validate()?;
    if args.samples_per_axis == 0 || args.inner_m == 0 {
        return Err(CliError::Usage("--samples-per-axis and --inner-m must be positive".into()));
    }
    let cover = match pareto_cover(
        &problem,
        &config,
        root.clone(),
        args.subdiv_iters,
        args.inner_m,
        args.samples_per_axis,
    ) {
        Err(nsmop::Error::EmptyCover) => {
            return Err(CliError::Failed(
                "selection removed every box: enlarge --root or increase --inner-m".into(),
            ))
        }
        other => other?,
    };
    write_pareto_outputs(&args.out, &problem, &cover)?;
    let summary = ParetoSummary {
        problem: problem.name(),
        root_lower: root.lower(),
        root_upper: root.upper(),
        iterations: args.subdiv_iters,
        inner_m: args.inner_m,
        samples_per_axis: args.samples_per_axis,
        config_digest: digest(&config)?,
        boxes: cover.collection.len(),
        images: cover.images.len(),
        escaped_images: cover.escaped,
        nondominated: cover.nondominated.iter().filter(|b| **b).count(),
    };
    write_json(&out_file(&args.out, "pareto_summary.json"), &summary)?;
    println!(
        "{}: {} boxes at depth {}, {} image points ({} non-dominated, {} outside the root)",
        problem.name(),
        summary.boxes,
        cover.collection.depth(),
        summary.images,
        summary.nondominated,
        summary.escaped_images
    );
    Ok(0)
}
