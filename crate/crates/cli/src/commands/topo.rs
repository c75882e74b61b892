//! `topo`: torus topology tools, in two modes.
//!
//! Loop mode (`--loop RRUULLDD --L 4`) classifies a closed step path by its
//! winding pair `(w_x, w_y)`.
//!
//! Field mode (`--spin-config file --orientation x|y|normal`) projects the
//! spins onto arrows along the chosen axis and reports whether the summed
//! field defines a direction (the raw `|Σv|/N` ratio is always printed) plus
//! the winding of every grid cycle. Windings need an in-plane field and a
//! well-defined turn at each step; cycles where that fails say so in the
//! `note` column instead of reporting a number.

use torus_ising::lattice::{Orientation, SpinConfig};
use torus_ising::topology::{
    build_spin_field, loop_class, Cycle, LatticeLoop, SpinField, TorusEmbedding,
};

use crate::args::TopoArgs;
use crate::report::{csv_safe, f, Csv};
use crate::settings::{require, FileConfig};
use crate::{CliError, CliResult};

fn run_loop_mode(csv: &mut Csv, letters: &str, l: usize) -> CliResult<()> {
    let lp = LatticeLoop::from_letters((0, 0), letters)?;
    let class = loop_class(&lp, l)?;
    csv.kv("loop", letters);
    csv.kv("L", l);
    csv.columns(&["loop", "L", "wx", "wy", "contractible"]);
    csv.row(&[
        letters.to_string(),
        l.to_string(),
        class.m.to_string(),
        class.n.to_string(),
        class.is_contractible().to_string(),
    ]);
    Ok(())
}

fn direction_cells(field: &SpinField<f64>, threshold: f64) -> CliResult<(String, [String; 3])> {
    let report = field.total_spin_direction(threshold)?;
    let cells = match report.direction {
        Some(d) => [f(d[0]), f(d[1]), f(d[2])],
        None => [String::new(), String::new(), String::new()],
    };
    Ok((f(report.ratio), cells))
}

fn winding_cells(field: &SpinField<f64>, cycle: Cycle) -> (String, String) {
    match field.field_winding(cycle) {
        Ok(w) => (w.to_string(), String::new()),
        Err(e) => (String::new(), csv_safe(&e.to_string())),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_field_mode(
    csv: &mut Csv,
    path: &std::path::Path,
    orientation: Orientation,
    threshold: f64,
    major: f64,
    minor: f64,
) -> CliResult<()> {
    let text = std::fs::read_to_string(path)?;
    let (config, _bc) = SpinConfig::parse(&text)?;
    let l = config.side();
    let embedding = TorusEmbedding::new(major, minor)?;
    let field = build_spin_field(&config, orientation, &embedding)?;
    let (ratio, dir) = direction_cells(&field, threshold)?;

    csv.kv("spin-config", path.display());
    csv.kv("L", l);
    csv.kv(
        "orientation",
        match orientation {
            Orientation::XParallel => "x",
            Orientation::YParallel => "y",
            Orientation::NormalToPlane => "normal",
        },
    );
    csv.kv("threshold", threshold);
    csv.kv("major-radius", major);
    csv.kv("minor-radius", minor);
    csv.columns(&[
        "ratio", "dx", "dy", "dz", "cycle", "index", "winding", "note",
    ]);

    let lead = |csv: &mut Csv, tail: [String; 4]| {
        let mut cells = vec![
            ratio.clone(),
            dir[0].clone(),
            dir[1].clone(),
            dir[2].clone(),
        ];
        cells.extend(tail);
        csv.row(&cells);
    };

    if orientation == Orientation::NormalToPlane {
        lead(
            csv,
            [
                String::new(),
                String::new(),
                String::new(),
                "windings need an in-plane field".into(),
            ],
        );
        return Ok(());
    }
    for y in 0..l {
        let (w, note) = winding_cells(&field, Cycle::XCycle { y });
        lead(csv, ["x".into(), y.to_string(), w, note]);
    }
    for x in 0..l {
        let (w, note) = winding_cells(&field, Cycle::YCycle { x });
        lead(csv, ["y".into(), x.to_string(), w, note]);
    }
    Ok(())
}

pub fn run(args: TopoArgs) -> CliResult<()> {
    let mut cfg = FileConfig::load(args.config.as_deref())?;
    let loop_steps = cfg.resolve(args.loop_steps, "loop")?;
    let l = cfg.resolve(args.l, "L")?;
    let spin_config = cfg.resolve(args.spin_config, "spin-config")?;
    let orientation = cfg.resolve_parse::<Orientation>(args.orientation, "orientation")?;
    let threshold = cfg.resolve(args.threshold, "threshold")?.unwrap_or(0.5);
    let major = cfg
        .resolve(args.major_radius, "major-radius")?
        .unwrap_or(2.0);
    let minor = cfg
        .resolve(args.minor_radius, "minor-radius")?
        .unwrap_or(1.0);
    let out = cfg.resolve(args.out, "out")?;
    cfg.finish()?;

    let mut csv = Csv::new("topo");
    match (loop_steps, spin_config) {
        (Some(letters), None) => {
            let l = require(l, "--L")?;
            run_loop_mode(&mut csv, &letters, l)?;
        }
        (None, Some(path)) => {
            let orientation = require(orientation, "--orientation")?;
            run_field_mode(&mut csv, &path, orientation, threshold, major, minor)?;
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(
                "give either --loop or --spin-config, not both".into(),
            ));
        }
        (None, None) => {
            return Err(CliError::Usage(
                "nothing to do: give --loop STEPS --L N, or --spin-config FILE \
                 --orientation AXIS"
                    .into(),
            ));
        }
    }
    csv.write(out.as_deref())
}
