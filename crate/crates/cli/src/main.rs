//! Command-line interface: instance generation, both planning variants,
//! benchmark tables, and SVG rendering.
//!
//! Exit codes: 0 success, 2 invalid input, 3 size-limit refusal (exact tour
//! mode), 4 internal invariant violation (a bound sandwich broke, which is a
//! bug, never a silently-reported result).

mod result_doc;
mod svg;

use clap::{Parser, Subcommand, ValueEnum};
use rsfov_core::error::Error;
use rsfov_core::instance::{
    euclidean_tsp_sequence, generate_instance, load_instance, save_instance, GenerationConfig,
    Instance,
};
use rsfov_core::seq::{build_layered_graph, lower_bound_seq, repair_to_feasible};
use rsfov_core::tour::{build_gtsp, repair_tour, solve_tour_lb, TourMode};
use std::f64::consts::{FRAC_PI_2, PI};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "rsfov",
    version,
    about = "Bounded-curvature waypoint planning with field-of-view constraints: \
             certified lower bounds, feasible paths, and a-priori gap certificates"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Seq,
    Tour,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Heuristic,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate random instances under the standard protocol.
    Generate {
        /// Directory for the instance files.
        #[arg(long, value_name = "DIR")]
        out_dir: PathBuf,
        /// Inclusive seed range, e.g. `1..25`.
        #[arg(long, default_value = "1..25", value_name = "A..B")]
        seed_range: String,
        /// Waypoints per instance.
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Side length of the sampling square.
        #[arg(long, default_value_t = 1000.0)]
        area_side: f64,
        /// Minimum turning radius.
        #[arg(long, default_value_t = 100.0)]
        rho: f64,
        /// Field-of-view width in radians.
        #[arg(long, default_value_t = FRAC_PI_2)]
        fov_width: f64,
        /// Upper limit of the uniform draw for the window's lower edge.
        #[arg(long, default_value_t = 1.5 * PI)]
        theta_min_range: f64,
        /// Overwrite existing files.
        #[arg(long)]
        force: bool,
    },
    /// Plan one instance and emit a result document (and optionally an SVG).
    Plan {
        #[arg(long, value_name = "FILE")]
        instance: PathBuf,
        #[arg(long, value_enum)]
        variant: Variant,
        /// Sectors per waypoint window.
        #[arg(long)]
        k: usize,
        /// Relaxation solver for the tour variant.
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Require a certified lower bound (refuses heuristic mode).
        #[arg(long)]
        certified: bool,
        /// Result document path (stdout when omitted).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Render the solution to this SVG file.
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// Run both bounds over a directory of instances and tabulate.
    Bench {
        #[arg(long, value_name = "DIR")]
        instance_dir: PathBuf,
        #[arg(long, value_enum)]
        variant: Variant,
        /// Comma-separated sector counts, e.g. `4,8,16`.
        #[arg(long, default_value = "4,8,16")]
        k: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// CSV output path.
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Worker threads (defaults to the number of cores; also settable
        /// via RAYON_NUM_THREADS).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Re-render an existing result document to SVG without re-solving.
    RenderOnly {
        #[arg(long, value_name = "FILE")]
        result: PathBuf,
        #[arg(long, value_name = "FILE")]
        svg: PathBuf,
    },
}

/// CLI failure carrying its process exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }

    fn internal(msg: impl Into<String>) -> Self {
        Failure {
            code: 4,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeLimit(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Generate {
            out_dir,
            seed_range,
            n,
            area_side,
            rho,
            fov_width,
            theta_min_range,
            force,
        } => cmd_generate(
            &out_dir,
            &seed_range,
            n,
            area_side,
            rho,
            fov_width,
            theta_min_range,
            force,
        ),
        Cmd::Plan {
            instance,
            variant,
            k,
            mode,
            certified,
            out,
            svg,
        } => cmd_plan(&instance, variant, k, mode, certified, out.as_deref(), svg.as_deref()),
        Cmd::Bench {
            instance_dir,
            variant,
            k,
            mode,
            out,
            jobs,
        } => cmd_bench(&instance_dir, variant, &k, mode, &out, jobs),
        Cmd::RenderOnly { result, svg } => cmd_render_only(&result, &svg),
    }
}

fn parse_seed_range(s: &str) -> Result<std::ops::RangeInclusive<u64>, Failure> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Failure::invalid(format!("seed range must look like A..B, got {s:?}")))?;
    let a: u64 = a
        .trim()
        .parse()
        .map_err(|_| Failure::invalid(format!("bad seed range start {a:?}")))?;
    let b: u64 = b
        .trim()
        .parse()
        .map_err(|_| Failure::invalid(format!("bad seed range end {b:?}")))?;
    if a > b {
        return Err(Failure::invalid(format!("empty seed range {s:?}")));
    }
    Ok(a..=b)
}

#[allow(clippy::too_many_arguments)]
fn cmd_generate(
    out_dir: &Path,
    seed_range: &str,
    n: usize,
    area_side: f64,
    rho: f64,
    fov_width: f64,
    theta_min_range: f64,
    force: bool,
) -> Result<(), Failure> {
    if n < 2 {
        return Err(Failure::invalid("an instance needs at least 2 waypoints"));
    }
    if !(rho > 0.0) || !(area_side > 0.0) || !(fov_width >= 0.0) {
        return Err(Failure::invalid("rho and area must be positive, fov non-negative"));
    }
    let seeds = parse_seed_range(seed_range)?;
    std::fs::create_dir_all(out_dir).map_err(Error::from)?;
    let paths: Vec<(u64, PathBuf)> = seeds
        .map(|s| (s, out_dir.join(format!("instance_{s:03}.toml"))))
        .collect();
    if !force {
        if let Some((_, existing)) = paths.iter().find(|(_, p)| p.exists()) {
            return Err(Failure::invalid(format!(
                "{} already exists; pass --force to overwrite",
                existing.display()
            )));
        }
    }
    for (seed, path) in &paths {
        let inst = generate_instance(&GenerationConfig {
            n,
            area_side,
            rho,
            fov_width,
            theta_min_range,
            seed: *seed,
        });
        save_instance(&inst, path).map_err(Failure::from)?;
    }
    eprintln!("wrote {} instance files to {}", paths.len(), out_dir.display());
    Ok(())
}

/// Sandwich audit tolerance: root-finding headroom on top of float identity.
fn sandwich_tol(scale: f64) -> f64 {
    1e-9 * (1.0 + scale.abs())
}

struct Solved {
    doc: result_doc::ResultDoc,
    build_s: f64,
    search_s: f64,
    repair_s: f64,
}

fn solve_one(
    inst: &Instance,
    variant: Variant,
    k: usize,
    mode: Mode,
) -> Result<Solved, Failure> {
    match variant {
        Variant::Seq => {
            let sequence = euclidean_tsp_sequence(inst);
            let t0 = Instant::now();
            let g = build_layered_graph(inst, &sequence, k)?;
            let build_s = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            let lb = lower_bound_seq(&g);
            let search_s = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            let plan = repair_to_feasible(inst, &sequence, &lb, k)?;
            let repair_s = t0.elapsed().as_secs_f64();
            let gap = rsfov_core::seq::theoretical_gap_seq(inst, &sequence, k)?;
            if plan.feasible_length < plan.lower_bound - sandwich_tol(plan.lower_bound)
                || plan.feasible_length > plan.lower_bound + gap + sandwich_tol(plan.lower_bound)
            {
                return Err(Failure::internal(format!(
                    "bound sandwich violated: lb {} feasible {} gap {}",
                    plan.lower_bound, plan.feasible_length, gap
                )));
            }
            Ok(Solved {
                doc: result_doc::from_plan(inst, &plan, k),
                build_s,
                search_s,
                repair_s,
            })
        }
        Variant::Tour => {
            let t0 = Instant::now();
            let g = build_gtsp(inst, k)?;
            let build_s = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            let tmode = match mode {
                Mode::Exact => TourMode::Exact,
                Mode::Heuristic => TourMode::Heuristic,
            };
            let relax = solve_tour_lb(&g, tmode)?;
            let search_s = t0.elapsed().as_secs_f64();
            let t0 = Instant::now();
            let tour = repair_tour(inst, &g, &relax)?;
            let repair_s = t0.elapsed().as_secs_f64();
            let tol = sandwich_tol(tour.lower_bound);
            if tour.feasible_length < tour.lower_bound - tol {
                return Err(Failure::internal(format!(
                    "feasible tour {} fell below the relaxation value {}",
                    tour.feasible_length, tour.lower_bound
                )));
            }
            if tour.certified {
                let gap = rsfov_core::tour::theoretical_gap_tour(inst, k)?;
                if tour.feasible_length > tour.lower_bound + gap + tol {
                    return Err(Failure::internal(format!(
                        "bound sandwich violated: lb {} feasible {} gap {}",
                        tour.lower_bound, tour.feasible_length, gap
                    )));
                }
            }
            let mode_name = match mode {
                Mode::Exact => "exact",
                Mode::Heuristic => "heuristic",
            };
            Ok(Solved {
                doc: result_doc::from_tour(inst, &tour, k, mode_name),
                build_s,
                search_s,
                repair_s,
            })
        }
    }
}

fn cmd_plan(
    instance: &Path,
    variant: Variant,
    k: usize,
    mode: Mode,
    certified: bool,
    out: Option<&Path>,
    svg_path: Option<&Path>,
) -> Result<(), Failure> {
    if k == 0 {
        return Err(Failure::invalid("k must be at least 1"));
    }
    if certified && variant == Variant::Tour && mode == Mode::Heuristic {
        return Err(Failure::invalid(
            "heuristic tour values are not certified lower bounds; \
             drop --certified or use --mode exact",
        ));
    }
    let inst = load_instance(instance).map_err(Failure::from)?;
    let solved = solve_one(&inst, variant, k, mode)?;
    let text = result_doc::to_string(&solved.doc);
    match out {
        Some(p) => std::fs::write(p, text).map_err(Error::from)?,
        None => print!("{text}"),
    }
    if let Some(p) = svg_path {
        let rendered = svg::render(&solved.doc)?;
        std::fs::write(p, rendered).map_err(Error::from)?;
    }
    eprintln!(
        "solved in {:.2}s (edges {:.2}s, search {:.2}s, repair {:.2}s); \
         bound {:.2}, feasible {:.2}, deviation {:.2}%",
        solved.build_s + solved.search_s + solved.repair_s,
        solved.build_s,
        solved.search_s,
        solved.repair_s,
        solved.doc.lower_bound,
        solved.doc.feasible_length,
        solved.doc.deviation_pct,
    );
    Ok(())
}

fn parse_k_list(s: &str) -> Result<Vec<usize>, Failure> {
    let ks: Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse::<usize>()).collect();
    let ks = ks.map_err(|_| Failure::invalid(format!("bad k list {s:?}")))?;
    if ks.is_empty() || ks.contains(&0) {
        return Err(Failure::invalid("k list must contain positive integers"));
    }
    Ok(ks)
}

fn cmd_bench(
    instance_dir: &Path,
    variant: Variant,
    k_list: &str,
    mode: Mode,
    out: &Path,
    jobs: Option<usize>,
) -> Result<(), Failure> {
    if let Some(j) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::invalid(format!("cannot size worker pool: {e}")))?;
    }
    let ks = parse_k_list(k_list)?;
    let mut files: Vec<PathBuf> = std::fs::read_dir(instance_dir)
        .map_err(Error::from)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::invalid(format!(
            "no instance files in {}",
            instance_dir.display()
        )));
    }
    let instances: Vec<(String, Instance)> = files
        .iter()
        .map(|p| {
            let label = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            load_instance(p).map(|inst| (label, inst))
        })
        .collect::<Result<_, _>>()
        .map_err(Failure::from)?;
    let rho0 = instances[0].1.rho;
    if instances.iter().any(|(_, i)| i.rho != rho0) {
        return Err(Failure::invalid(
            "instances mix different turning radii; benchmark units would be ambiguous",
        ));
    }

    let mut csv = String::new();
    csv.push_str("instance");
    for k in &ks {
        csv.push_str(&format!(",lb_k{k},ub_k{k},dev_pct_k{k},theo_pct_k{k}"));
    }
    csv.push('\n');

    let mut sums = vec![[0.0f64; 4]; ks.len()];
    let mut phase = [0.0f64; 3];
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (label, inst) in &instances {
        let mut cells = vec![label.clone()];
        for (ki, &k) in ks.iter().enumerate() {
            let solved = solve_one(inst, variant, k, mode)?;
            let d = &solved.doc;
            if d.deviation_pct < -1e-9 {
                return Err(Failure::internal(format!(
                    "{label}: negative deviation {}",
                    d.deviation_pct
                )));
            }
            if d.certified && d.theoretical_deviation_pct < d.deviation_pct - 1e-9 {
                return Err(Failure::internal(format!(
                    "{label}: deviation {} exceeds its certificate {}",
                    d.deviation_pct, d.theoretical_deviation_pct
                )));
            }
            cells.push(format!("{:.2}", d.lower_bound));
            cells.push(format!("{:.2}", d.feasible_length));
            cells.push(format!("{:.2}", d.deviation_pct));
            cells.push(format!("{:.2}", d.theoretical_deviation_pct));
            sums[ki][0] += d.lower_bound;
            sums[ki][1] += d.feasible_length;
            sums[ki][2] += d.deviation_pct;
            sums[ki][3] += d.theoretical_deviation_pct;
            phase[0] += solved.build_s;
            phase[1] += solved.search_s;
            phase[2] += solved.repair_s;
        }
        csv.push_str(&cells.join(","));
        csv.push('\n');
        rows.push(cells);
    }
    let m = instances.len() as f64;
    let mut mean = vec!["mean".to_string()];
    for s in &sums {
        for v in s {
            mean.push(format!("{:.2}", v / m));
        }
    }
    csv.push_str(&mean.join(","));
    csv.push('\n');
    rows.push(mean);

    std::fs::write(out, &csv).map_err(Error::from)?;

    // Aligned text table.
    let mut header = vec!["instance".to_string()];
    for k in &ks {
        for c in ["lb", "ub", "dev%", "theo%"] {
            header.push(format!("{c}(k={k})"));
        }
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|c| {
            rows.iter()
                .map(|r| r[c].len())
                .chain(std::iter::once(header[c].len()))
                .max()
                .unwrap()
        })
        .collect();
    let fmt_row = |r: &[String]| {
        r.iter()
            .enumerate()
            .map(|(c, v)| format!("{v:>w$}", w = widths[c]))
            .collect::<Vec<_>>()
            .join("  ")
    };
    println!("{}", fmt_row(&header));
    for r in &rows {
        println!("{}", fmt_row(r));
    }
    eprintln!(
        "wall time per phase: edge costs {:.1}s, relaxation search {:.1}s, repair {:.1}s",
        phase[0], phase[1], phase[2]
    );
    eprintln!("csv written to {}", out.display());
    Ok(())
}

fn cmd_render_only(result: &Path, svg_path: &Path) -> Result<(), Failure> {
    let text = std::fs::read_to_string(result).map_err(Error::from)?;
    let doc = result_doc::from_str(&text).map_err(Failure::from)?;
    let rendered = svg::render(&doc)?;
    std::fs::write(svg_path, rendered).map_err(Error::from)?;
    Ok(())
}
