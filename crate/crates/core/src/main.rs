//! Command-line front end: detect, eval, synth.
//!
//! Exit codes: 0 success, 1 input error, 2 internal invariant failure.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use foeseg::error::Result;
use foeseg::pipeline::{analyze_frame, write_outputs};
use foeseg::seg_prior::{load_class_table_file, ClassPriorTable, PanopticMap};
use foeseg::synth::{ground_truth_foe, parse_scene_file, render_flow};
use foeseg::{eval, flow_io, pgm, Config};

#[derive(Parser)]
#[command(
    name = "foeseg",
    about = "Moving-object detection from optical flow and panoptic segmentation",
    version
)]
struct Cli {
    /// Configuration file (line-oriented `key value`).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// RANSAC seed, overriding the config value.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Detect moving objects in one frame (or a directory of frames).
    Detect(DetectArgs),
    /// Score predicted masks against ground truth and emit a CSV.
    Eval(EvalArgs),
    /// Render a synthetic scene to flow, labels, and ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct DetectArgs {
    /// Middlebury .flo flow file.
    #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
    flow: Option<PathBuf>,

    /// 16-bit PGM class-id map.
    #[arg(long, requires = "flow")]
    classes: Option<PathBuf>,

    /// 16-bit PGM instance-id map.
    #[arg(long, requires = "flow")]
    instances: Option<PathBuf>,

    /// Batch mode: directory of .flo files.
    #[arg(long)]
    batch: Option<PathBuf>,

    /// Directory holding <stem>.class.pgm / <stem>.inst.pgm for batch mode.
    #[arg(long, requires = "batch")]
    labels: Option<PathBuf>,

    /// Class prior table; defaults to the built-in COCO panoptic table.
    #[arg(long)]
    table: Option<PathBuf>,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,

    /// Also write every intermediate panel (prior, flow color, inliers, ...).
    #[arg(long)]
    diagnostics: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Directory of predicted masks: <scene>/<frame>.{pgm,png}.
    #[arg(long)]
    pred: PathBuf,

    /// Directory of ground-truth masks in the same layout.
    #[arg(long)]
    gt: PathBuf,

    /// Scene-exclusion list (one name per line).
    #[arg(long)]
    exclude: Option<PathBuf>,

    /// CSV output path (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Scene description file.
    #[arg(long)]
    spec: PathBuf,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,

    /// Frame stem for the emitted files.
    #[arg(long, default_value = "00000")]
    stem: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(_) => {
            eprintln!("error: internal invariant failure");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;

    if cli.print_config {
        print!("{}", cfg.to_text());
        return Ok(());
    }

    match cli.command {
        Some(Command::Detect(args)) => cmd_detect(&args, &cfg),
        Some(Command::Eval(args)) => cmd_eval(&args),
        Some(Command::Synth(args)) => cmd_synth(&args),
        None => {
            eprintln!("no subcommand given; see --help");
            Err(foeseg::Error::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "missing subcommand",
            )))
        }
    }
}

fn load_table(path: &Option<PathBuf>) -> Result<ClassPriorTable> {
    match path {
        Some(p) => load_class_table_file(p),
        None => Ok(ClassPriorTable::default_coco()),
    }
}

fn detect_one(
    flow_path: &Path,
    class_path: &Path,
    inst_path: &Path,
    table: &ClassPriorTable,
    cfg: &Config,
    out: &Path,
    diagnostics: bool,
) -> Result<()> {
    let flow = flow_io::read_flo(std::fs::File::open(flow_path)?)?;
    let seg = PanopticMap::load(class_path, inst_path)?;
    let analysis = analyze_frame(&flow, &seg, table, cfg)?;

    let stem = flow_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("frame");
    write_outputs(&analysis, &seg, out, stem, diagnostics)?;

    let foe_desc = match &analysis.foe {
        Some(r) => match r.foe.position() {
            Some((x, y)) => format!(
                "foe=({x:.2},{y:.2}) sign={} support={}",
                if r.foe.sign() == foeseg::FoeSign::Source { "+1" } else { "-1" },
                r.support
            ),
            None => {
                let (dx, dy) = r.foe.infinite_direction().unwrap();
                format!("foe=infinite dir=({dx:.3},{dy:.3}) support={}", r.support)
            }
        },
        None => "static camera".to_owned(),
    };
    println!(
        "{stem}: ratio={:.3} moving={} {} mask_px={}",
        analysis.flow_ratio,
        analysis.camera_moving,
        foe_desc,
        analysis.object_mask.count_true()
    );
    Ok(())
}

fn cmd_detect(args: &DetectArgs, cfg: &Config) -> Result<()> {
    let table = load_table(&args.table)?;

    if let Some(batch_dir) = &args.batch {
        let labels = args.labels.as_deref().unwrap_or(batch_dir);
        let mut flows: Vec<PathBuf> = std::fs::read_dir(batch_dir)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("flo"))
            .collect();
        flows.sort();
        if flows.is_empty() {
            return Err(foeseg::Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("no .flo files in {}", batch_dir.display()),
            )));
        }
        // Frames are independent; results land in per-frame files.
        flows.par_iter().try_for_each(|flow_path| {
            let stem = flow_path.file_stem().and_then(|s| s.to_str()).unwrap_or("frame");
            let class_path = labels.join(format!("{stem}.class.pgm"));
            let inst_path = labels.join(format!("{stem}.inst.pgm"));
            detect_one(
                flow_path,
                &class_path,
                &inst_path,
                &table,
                cfg,
                &args.out,
                args.diagnostics,
            )
        })
    } else {
        let flow = args.flow.as_deref().expect("clap enforces");
        let classes = args.classes.as_deref().ok_or_else(|| {
            foeseg::Error::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "--classes is required with --flow",
            ))
        })?;
        let instances = args.instances.as_deref().ok_or_else(|| {
            foeseg::Error::Io(std::io::Error::new(
                std::io::ErrorKind::InvalidInput,
                "--instances is required with --flow",
            ))
        })?;
        detect_one(flow, classes, instances, &table, cfg, &args.out, args.diagnostics)
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let excluded = match &args.exclude {
        Some(path) => eval::read_scene_list(path)?,
        None => BTreeSet::new(),
    };
    let report = eval::evaluate_directories(&args.pred, &args.gt, &excluded)?;
    match &args.out {
        Some(path) => eval::write_csv(&report, std::fs::File::create(path)?)?,
        None => eval::write_csv(&report, std::io::stdout().lock())?,
    }
    eprintln!("dataset mean IoU: {:.6}", report.mean);
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let scene = parse_scene_file(&args.spec)?;
    let frame = render_flow(&scene.spec, &scene.intrinsics, &scene.motion)?;
    std::fs::create_dir_all(&args.out)?;
    let stem = &args.stem;

    flow_io::write_flo(
        &frame.flow,
        std::fs::File::create(args.out.join(format!("{stem}.flo")))?,
    )?;
    frame.seg.save(
        &args.out.join(format!("{stem}.class.pgm")),
        &args.out.join(format!("{stem}.inst.pgm")),
    )?;
    let gt_bytes: Vec<u8> = frame
        .gt_moving
        .data()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    pgm::write_pgm8(
        std::fs::File::create(args.out.join(format!("{stem}.gt.pgm")))?,
        frame.gt_moving.width(),
        frame.gt_moving.height(),
        &gt_bytes,
    )?;

    let foe_line = match ground_truth_foe(&scene.intrinsics, &scene.motion) {
        Ok(foe) => match foe.position() {
            Some((x, y)) => format!(
                "foe finite {x:.6} {y:.6} {}",
                if foe.sign() == foeseg::FoeSign::Source { "+1" } else { "-1" }
            ),
            None => {
                let (dx, dy) = foe.infinite_direction().unwrap();
                format!("foe infinite {dx:.6} {dy:.6} +1")
            }
        },
        Err(e) => format!("foe undefined ({e})"),
    };
    let manifest = format!(
        "width {}\nheight {}\nfiles {stem}.flo {stem}.class.pgm {stem}.inst.pgm {stem}.gt.pgm\nmoving_pixels {}\n{foe_line}\n",
        scene.intrinsics.width,
        scene.intrinsics.height,
        frame.gt_moving.count_true(),
    );
    std::fs::write(args.out.join("manifest.txt"), manifest)?;
    println!(
        "{}: wrote {stem}.flo + labels + gt ({} moving pixels)",
        args.out.display(),
        frame.gt_moving.count_true()
    );
    Ok(())
}
