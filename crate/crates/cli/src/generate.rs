use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fracflowq::problem::{
    fracture_cells, generate_pitchfork_permeability, sample_random_wells, BoundaryCondition,
    FractureSpec, GridSpec, Orientation, PermeabilityField, Problem,
};
use serde::Serialize;

use crate::io::{sibling, write_text};
use crate::manifest::RunManifest;

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationArg {
    Horizontal,
    Vertical,
}

#[derive(Args, Debug, Serialize)]
pub struct GenerateArgs {
    #[arg(long)]
    pub nx: usize,
    #[arg(long)]
    pub ny: usize,
    #[arg(long, default_value_t = 1.0)]
    pub dx: f64,
    #[arg(long, default_value_t = 1.0)]
    pub dy: f64,
    /// Left and right boundary pressures.
    #[arg(
        long,
        num_args = 2,
        value_names = ["P_LEFT", "P_RIGHT"],
        allow_negative_numbers = true,
        conflicts_with = "wells",
        required_unless_present = "wells"
    )]
    pub gradient: Option<Vec<f64>>,
    /// Number of randomly placed wells with standard-normal rates.
    #[arg(long)]
    pub wells: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub pitchfork_depth: Option<usize>,
    /// Largest fracture-to-matrix permeability ratio.
    #[arg(long, default_value_t = 1000.0)]
    pub contrast: f64,
    #[arg(long, value_enum, default_value_t = OrientationArg::Horizontal)]
    pub orientation: OrientationArg,
    #[arg(long, default_value_t = 1.0)]
    pub matrix_perm: f64,
    #[arg(long, default_value = "problem.json")]
    pub out: PathBuf,
}

pub fn run(args: &GenerateArgs, argv: &[String]) -> anyhow::Result<()> {
    let grid = GridSpec::with_spacing(args.nx, args.ny, args.dx, args.dy)?;
    let fracture = args.pitchfork_depth.map(|depth| FractureSpec {
        depth,
        base_orientation: match args.orientation {
            OrientationArg::Horizontal => Orientation::Horizontal,
            OrientationArg::Vertical => Orientation::Vertical,
        },
        matrix_perm: args.matrix_perm,
        max_contrast: args.contrast,
    });
    let (permeability, levels) = match &fracture {
        Some(spec) => (
            generate_pitchfork_permeability(&grid, spec)?,
            fracture_cells(&grid, spec)?,
        ),
        None => (
            PermeabilityField::uniform(grid.n_cells(), args.matrix_perm)?,
            vec![0; grid.n_cells()],
        ),
    };
    let (boundary, seed) = match (&args.gradient, args.wells) {
        (Some(p), _) => (
            BoundaryCondition::PressureGradient {
                p_left: p[0],
                p_right: p[1],
            },
            None,
        ),
        (None, Some(w)) => (sample_random_wells(&grid, w, args.seed)?, Some(args.seed)),
        (None, None) => return Err(crate::usage("one of --gradient or --wells is required")),
    };
    let problem = Problem {
        grid,
        permeability,
        boundary,
        seed,
        fracture,
    };
    problem.validate()?;
    write_text(&args.out, &problem.to_json())?;

    let csv_path = sibling(&args.out, "perm.csv");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "col", "row", "level", "permeability"])?;
    for (i, &level) in levels.iter().enumerate() {
        let (col, row) = grid.coords(i);
        w.serialize((i, col, row, level, problem.permeability.value(i)))?;
    }
    write_text(&csv_path, &String::from_utf8(w.into_inner()?)?)?;

    let mut m = RunManifest::new("generate", argv, args)?
        .output(&args.out)
        .output(&csv_path);
    if let Some(s) = seed {
        m = m.seed(s);
    }
    m.write_beside(&args.out)?;
    println!(
        "wrote {} ({} cells, n_b = {})",
        args.out.display(),
        grid.n_cells(),
        grid.n_b()
    );
    Ok(())
}
