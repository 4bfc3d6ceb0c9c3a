//! Command-line driver for the shallow-water solver suite.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};

use swe::config::SimulationConfig;
use swe::runner::{convergence_study, invariance_suite, run, StudyAxis};

const CONFIG_HELP: &str = "\
Config files are flat `key = value` text; `#` starts a comment.

Keys (defaults in parentheses):
  scheme               one of: lagrangian-explicit, lagrangian-trapezoidal,
                       conservative-explicit, conservative-trapezoidal,
                       computational-explicit, computational-trapezoidal,
                       computational-conservative-explicit,
                       computational-conservative-trapezoidal,
                       fv-explicit, fv-trapezoidal, eulerian-trapezoidal
  n, length            1D node count and period
  nx, ny, lx, ly       2D lattice size and periods
  tau, t_final         time step and final time
  amplitude (0.4)      initial wave amplitude A
  phase (pi/6)         initial wave phase offset
  depth (10)           mean fluid depth h0
  monitor (constant)   1D mesh density: arc-length-u|h|uh, curvature-u|h|uh,
                       constant; monitor_alpha (1), monitor_beta (1)
  weight (constant)    2D mesh weight: velocity-gradient, height-curvature,
                       constant; weight_alpha (0)
  interp (sibson)      finite-volume corner interpolation: sibson, mean
  scheme_tol (1e-12)   implicit-step iteration tolerance
  scheme_max_iter (200)
  mesh_tol             mesh solver tolerance (1e-12 1D, 1e-10 2D)
  mesh_max_iter (0)    0 = 50*N (1D) or 50*Nx*Ny (2D)
  snapshot_stride (500), diagnostics_stride (1), mesh_stride (10)
  out                  default output directory

The environment variable SWE_OUTPUT_DIGITS (1..=17, default 17) sets the
number of significant decimal digits in the CSV output.";

#[derive(Parser)]
#[command(name = "swe", version, about = "Symmetry-preserving shallow-water solvers", after_long_help = CONFIG_HELP)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a simulation from a preset or a config file.
    Run {
        /// Built-in experiment: fig2, fig3, fig4, fig5, or fig5-smoke.
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Path to a flat key = value config file.
        #[arg(long, required_unless_present = "preset")]
        config: Option<PathBuf>,
        /// Output directory (default: the config's `out`, else ./swe-out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check scheme equivariance under every symmetry generator.
    Invariance {
        #[arg(long)]
        config: PathBuf,
    },
    /// Richardson self-convergence orders in tau (and in N where defined).
    Converge {
        #[arg(long)]
        config: PathBuf,
        /// Number of refinement levels (at least 3).
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

fn load(preset: &Option<String>, config: &Option<PathBuf>) -> anyhow::Result<SimulationConfig> {
    match (preset, config) {
        (Some(name), _) => Ok(SimulationConfig::preset(name)?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
            Ok(SimulationConfig::parse(&text)?)
        }
        (None, None) => anyhow::bail!("either --preset or --config is required"),
    }
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Run { preset, config, out } => {
            let cfg = load(&preset, &config)?;
            let out_dir = out
                .or_else(|| cfg.out.clone())
                .unwrap_or_else(|| PathBuf::from("swe-out"));
            let started = Instant::now();
            let result = run(&cfg, Some(&out_dir))?;
            let elapsed = started.elapsed().as_secs_f64();
            println!(
                "completed {} steps to t = {} in {elapsed:.1} s; output in {}",
                result.steps,
                result.t_end,
                out_dir.display()
            );
            if let Some(row) = result.series_1d.last() {
                println!(
                    "final drifts: relM = {:.3e}, relP = {:.3e}, relH = {:.3e}",
                    row.rel_m, row.rel_p, row.rel_h
                );
            }
            if let Some(row) = result.series_2d.last() {
                println!(
                    "final drifts: relM = {:.3e}, relPx = {:.3e}, relPy = {:.3e}, relH = {:.3e}",
                    row.rel_m, row.rel_px, row.rel_py, row.rel_h
                );
            }
            if let Some(worst) = result
                .mesh_residuals
                .iter()
                .copied()
                .fold(None::<f64>, |acc, r| Some(acc.map_or(r, |a| a.max(r))))
            {
                println!("worst equidistribution residual: {worst:.3e}");
            }
        }
        Cmd::Invariance { config } => {
            let cfg = load(&None, &Some(config))?;
            let rows = invariance_suite(&cfg)?;
            println!(
                "{:<42} {:<12} {:>5}  {:>12}  {:>9}  verdict",
                "scheme", "generator", "steps", "discrepancy", "tolerance"
            );
            let mut failures = 0usize;
            for r in &rows {
                if !r.passed() {
                    failures += 1;
                }
                println!(
                    "{:<42} {:<12} {:>5}  {:>12.3e}  {:>9.1e}  {}",
                    r.scheme.as_str(),
                    r.generator,
                    r.steps,
                    r.discrepancy,
                    r.tolerance,
                    if r.passed() { "pass" } else { "FAIL" }
                );
            }
            println!("{} of {} checks passed", rows.len() - failures, rows.len());
        }
        Cmd::Converge { config, levels } => {
            let cfg = load(&None, &Some(config))?;
            let mut studies = vec![(StudyAxis::Temporal, "temporal")];
            if cfg.scheme.uses_monitor() {
                studies.push((StudyAxis::Spatial, "spatial"));
            }
            for (axis, name) in studies {
                println!("{name} self-convergence:");
                println!("  {:<14} {:>12}  order", "resolution", "error");
                for row in convergence_study(&cfg, levels, axis)? {
                    match row.order {
                        Some(p) => {
                            println!("  {:<14} {:>12.3e}  {p:.2}", row.resolution, row.error)
                        }
                        None => println!(
                            "  {:<14} {:>12.3e}  {}",
                            row.resolution,
                            row.error,
                            if row.level == 0 { "-" } else { "non-monotone" }
                        ),
                    }
                }
            }
        }
    }
    Ok(())
}
