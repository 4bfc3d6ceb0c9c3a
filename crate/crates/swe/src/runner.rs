//! Experiment driver: time loops for every scheme, CSV emission, the
//! equivariance test matrix, and Richardson convergence studies.
//!
//! Output files (written when an output directory is given):
//!   - snapshot.csv     1D `t,i,x,u,h` / 2D `t,j,k,x,y,u,v,h`, time-major
//!   - diagnostics.csv  conserved quantities and their relative drifts
//!   - mesh.csv         node worldlines, 1D `t,i,x` / 2D `t,i,j,x,y`
//!
//! Floating-point values are printed in scientific notation with the number
//! of significant decimal digits taken from SWE_OUTPUT_DIGITS (default 17,
//! which round-trips f64 exactly). All loops and reductions have fixed
//! order, so identical configurations produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use crate::config::{SchemeId, SimulationConfig};
use crate::diagnostics::{
    conserved_1d, conserved_2d, record_series_1d, record_series_2d, Conserved1D, Conserved2D,
    SeriesRow1D, SeriesRow2D,
};
use crate::fv2d::{step_fv_explicit, step_fv_trapezoidal};
use crate::eulerian2d::step_eulerian_trapezoidal;
use crate::mesh1d::{
    equidistribution_residual, mesh_velocity, monitor_values, solve_equidistribution,
};
use crate::mesh2d::{solve_elliptic_grid, weight_values};
use crate::model::{Grid1D, Grid2D, State1D, State2D};
use crate::numerics::mean;
use crate::schemes1d::{
    step_computational_conservative, step_computational_nonconservative,
    step_conservative_explicit, step_conservative_trapezoidal, step_lagrangian_explicit,
    step_lagrangian_trapezoidal, TimeMode,
};
use crate::symmetry::{check_equivariance_1d, check_equivariance_2d, GroupElement1D, GroupElement2D};
use crate::{Error, Result};

/// Number of significant decimal digits for file output, from
/// SWE_OUTPUT_DIGITS, clamped to 1..=17 (default 17).
pub fn output_digits() -> usize {
    std::env::var("SWE_OUTPUT_DIGITS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .map(|d| d.clamp(1, 17))
        .unwrap_or(17)
}

fn fmt(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits - 1, v)
}

struct CsvFiles {
    snapshot: BufWriter<File>,
    diagnostics: BufWriter<File>,
    mesh: BufWriter<File>,
    digits: usize,
}

impl CsvFiles {
    fn create(dir: &Path, two_d: bool) -> Result<Self> {
        std::fs::create_dir_all(dir)?;
        let open = |name: &str| -> Result<BufWriter<File>> {
            Ok(BufWriter::new(File::create(dir.join(name))?))
        };
        let mut files = CsvFiles {
            snapshot: open("snapshot.csv")?,
            diagnostics: open("diagnostics.csv")?,
            mesh: open("mesh.csv")?,
            digits: output_digits(),
        };
        if two_d {
            writeln!(files.snapshot, "t,j,k,x,y,u,v,h")?;
            writeln!(files.diagnostics, "t,M,Px,Py,H,relM,relPx,relPy,relH")?;
            writeln!(files.mesh, "t,i,j,x,y")?;
        } else {
            writeln!(files.snapshot, "t,i,x,u,h")?;
            writeln!(files.diagnostics, "t,M,P,H,relM,relP,relH")?;
            writeln!(files.mesh, "t,i,x")?;
        }
        Ok(files)
    }

    fn snapshot_1d(&mut self, t: f64, grid: &Grid1D, state: &State1D) -> Result<()> {
        let d = self.digits;
        for i in 0..grid.n() {
            writeln!(
                self.snapshot,
                "{},{},{},{},{}",
                fmt(t, d),
                i,
                fmt(grid.nodes()[i], d),
                fmt(state.u[i], d),
                fmt(state.h[i], d)
            )?;
        }
        Ok(())
    }

    fn snapshot_2d(&mut self, t: f64, grid: &Grid2D, state: &State2D) -> Result<()> {
        let d = self.digits;
        for j in 0..grid.nx() {
            for k in 0..grid.ny() {
                let idx = grid.idx(j, k);
                writeln!(
                    self.snapshot,
                    "{},{},{},{},{},{},{},{}",
                    fmt(t, d),
                    j,
                    k,
                    fmt(grid.xs()[idx], d),
                    fmt(grid.ys()[idx], d),
                    fmt(state.u[idx], d),
                    fmt(state.v[idx], d),
                    fmt(state.h[idx], d)
                )?;
            }
        }
        Ok(())
    }

    fn mesh_1d(&mut self, t: f64, grid: &Grid1D) -> Result<()> {
        let d = self.digits;
        for i in 0..grid.n() {
            writeln!(self.mesh, "{},{},{}", fmt(t, d), i, fmt(grid.nodes()[i], d))?;
        }
        Ok(())
    }

    fn mesh_2d(&mut self, t: f64, grid: &Grid2D) -> Result<()> {
        let d = self.digits;
        for j in 0..grid.nx() {
            for k in 0..grid.ny() {
                let idx = grid.idx(j, k);
                writeln!(
                    self.mesh,
                    "{},{},{},{},{}",
                    fmt(t, d),
                    j,
                    k,
                    fmt(grid.xs()[idx], d),
                    fmt(grid.ys()[idx], d)
                )?;
            }
        }
        Ok(())
    }

    fn diagnostics_1d(&mut self, rows: &[SeriesRow1D]) -> Result<()> {
        let d = self.digits;
        for r in rows {
            writeln!(
                self.diagnostics,
                "{},{},{},{},{},{},{}",
                fmt(r.t, d),
                fmt(r.c.m, d),
                fmt(r.c.p, d),
                fmt(r.c.h, d),
                fmt(r.rel_m, d),
                fmt(r.rel_p, d),
                fmt(r.rel_h, d)
            )?;
        }
        Ok(())
    }

    fn diagnostics_2d(&mut self, rows: &[SeriesRow2D]) -> Result<()> {
        let d = self.digits;
        for r in rows {
            writeln!(
                self.diagnostics,
                "{},{},{},{},{},{},{},{},{}",
                fmt(r.t, d),
                fmt(r.c.m, d),
                fmt(r.c.px, d),
                fmt(r.c.py, d),
                fmt(r.c.h, d),
                fmt(r.rel_m, d),
                fmt(r.rel_px, d),
                fmt(r.rel_py, d),
                fmt(r.rel_h, d)
            )?;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.snapshot.flush()?;
        self.diagnostics.flush()?;
        self.mesh.flush()?;
        Ok(())
    }
}

/// Everything a caller may want to inspect after a run.
#[derive(Debug)]
pub struct RunOutput {
    pub steps: usize,
    pub t_end: f64,
    pub series_1d: Vec<SeriesRow1D>,
    pub series_2d: Vec<SeriesRow2D>,
    /// Equidistribution residual of each accepted adaptive 1D step.
    pub mesh_residuals: Vec<f64>,
    pub final_1d: Option<(Grid1D, State1D)>,
    pub final_2d: Option<(Grid2D, State2D)>,
}

/// Runs the configured simulation, optionally writing the CSV artifacts.
pub fn run(config: &SimulationConfig, out_dir: Option<&Path>) -> Result<RunOutput> {
    config.validate()?;
    if config.scheme.is_two_dimensional() {
        run_2d(config, out_dir)
    } else {
        run_1d(config, out_dir)
    }
}

fn due(step: usize, steps: usize, stride: usize) -> bool {
    step == 0 || step == steps || (stride > 0 && step % stride == 0)
}

fn run_1d(config: &SimulationConfig, out_dir: Option<&Path>) -> Result<RunOutput> {
    let (mut grid, mut state) = config.initial_1d()?;
    let steps = config.steps();
    let tau = config.tau;
    let mesh_cap = config.mesh_iteration_cap();
    let mut files = match out_dir {
        Some(dir) => Some(CsvFiles::create(dir, false)?),
        None => None,
    };
    let mut samples: Vec<(f64, Conserved1D)> = Vec::new();
    let mut mesh_residuals = Vec::new();

    samples.push((0.0, conserved_1d(&grid, &state)));
    if let Some(f) = files.as_mut() {
        f.snapshot_1d(0.0, &grid, &state)?;
        f.mesh_1d(0.0, &grid)?;
    }

    for step in 1..=steps {
        let t = (step - 1) as f64 * tau;
        let result = match config.scheme {
            SchemeId::LagrangianExplicit => step_lagrangian_explicit(&grid, &state, tau),
            SchemeId::LagrangianTrapezoidal => step_lagrangian_trapezoidal(
                &grid,
                &state,
                tau,
                config.scheme_tol,
                config.scheme_max_iter,
            ),
            SchemeId::ConservativeExplicit => step_conservative_explicit(&grid, &state, tau),
            SchemeId::ConservativeTrapezoidal => step_conservative_trapezoidal(
                &grid,
                &state,
                tau,
                config.scheme_tol,
                config.scheme_max_iter,
            ),
            SchemeId::ComputationalExplicit
            | SchemeId::ComputationalTrapezoidal
            | SchemeId::ComputationalConservativeExplicit
            | SchemeId::ComputationalConservativeTrapezoidal => {
                let rho = monitor_values(&grid, &state, &config.monitor);
                let solve = solve_equidistribution(
                    &grid,
                    &rho,
                    mean(&state.u),
                    tau,
                    config.mesh_tol,
                    mesh_cap,
                )?;
                let w = mesh_velocity(&grid, &solve.grid, tau);
                let mode = match config.scheme {
                    SchemeId::ComputationalExplicit
                    | SchemeId::ComputationalConservativeExplicit => TimeMode::Explicit,
                    _ => TimeMode::Trapezoidal,
                };
                let r = match config.scheme {
                    SchemeId::ComputationalExplicit | SchemeId::ComputationalTrapezoidal => {
                        step_computational_nonconservative(
                            &grid,
                            &state,
                            tau,
                            &w,
                            mode,
                            config.scheme_tol,
                            config.scheme_max_iter,
                        )
                    }
                    _ => step_computational_conservative(
                        &grid,
                        &state,
                        tau,
                        &w,
                        mode,
                        config.scheme_tol,
                        config.scheme_max_iter,
                    ),
                };
                if let Ok(ref res) = r {
                    mesh_residuals.push(equidistribution_residual(&res.grid, &rho));
                }
                r
            }
            _ => unreachable!("2D scheme in the 1D loop"),
        }
        .map_err(|e| e.with_time(t))?;
        grid = result.grid;
        state = result.state;
        let t_now = step as f64 * tau;

        if due(step, steps, config.diagnostics_stride) {
            samples.push((t_now, conserved_1d(&grid, &state)));
        }
        if let Some(f) = files.as_mut() {
            if due(step, steps, config.snapshot_stride) {
                f.snapshot_1d(t_now, &grid, &state)?;
            }
            if due(step, steps, config.mesh_stride) {
                f.mesh_1d(t_now, &grid)?;
            }
        }
    }

    let series = record_series_1d(&samples);
    if let Some(mut f) = files {
        f.diagnostics_1d(&series)?;
        f.finish()?;
    }
    Ok(RunOutput {
        steps,
        t_end: steps as f64 * tau,
        series_1d: series,
        series_2d: Vec::new(),
        mesh_residuals,
        final_1d: Some((grid, state)),
        final_2d: None,
    })
}

/// Blending factor for the per-step weight update in the adaptive 2D
/// pipeline. The grid solve feeds back into the next weight evaluation
/// through the mesh metrics, and on fine grids that loop develops an
/// oscillatory gain beyond one once the height field steepens; blending each
/// fresh weight with the previous one scales the loop gain by this factor
/// while leaving the equilibrium mesh unchanged.
const WEIGHT_RELAXATION: f64 = 0.2;

fn run_2d(config: &SimulationConfig, out_dir: Option<&Path>) -> Result<RunOutput> {
    let (mut grid, mut state) = config.initial_2d()?;
    let steps = config.steps();
    let tau = config.tau;
    let mesh_cap = config.mesh_iteration_cap();
    let mut weight_history: Option<Vec<f64>> = None;
    let mut files = match out_dir {
        Some(dir) => Some(CsvFiles::create(dir, true)?),
        None => None,
    };
    let mut samples: Vec<(f64, Conserved2D)> = Vec::new();

    samples.push((0.0, conserved_2d(&grid, &state, grid.dxi, grid.deta)));
    if let Some(f) = files.as_mut() {
        f.snapshot_2d(0.0, &grid, &state)?;
        f.mesh_2d(0.0, &grid)?;
    }

    for step in 1..=steps {
        let t = (step - 1) as f64 * tau;
        match config.scheme {
            SchemeId::FvExplicit => {
                let r = step_fv_explicit(&grid, &state, tau, config.interp)
                    .map_err(|e| e.with_time(t))?;
                grid = r.grid;
                state = r.state;
            }
            SchemeId::FvTrapezoidal => {
                let r = step_fv_trapezoidal(
                    &grid,
                    &state,
                    tau,
                    config.interp,
                    config.scheme_tol,
                    config.scheme_max_iter,
                )
                .map_err(|e| e.with_time(t))?;
                grid = r.grid;
                state = r.state;
            }
            SchemeId::EulerianTrapezoidal => {
                let mut w = weight_values(&grid, &state, &config.weight);
                if let Some(prev) = &weight_history {
                    for (wi, pi) in w.iter_mut().zip(prev) {
                        *wi = (1.0 - WEIGHT_RELAXATION) * pi + WEIGHT_RELAXATION * *wi;
                    }
                }
                let anchor = (mean(&state.u), mean(&state.v));
                let solve =
                    solve_elliptic_grid(&grid, &w, anchor, tau, config.mesh_tol, mesh_cap)
                        .map_err(|e| e.with_time(t))?;
                weight_history = Some(w);
                let r = step_eulerian_trapezoidal(
                    &grid,
                    &solve.grid,
                    &state,
                    tau,
                    config.scheme_tol,
                    config.scheme_max_iter,
                )
                .map_err(|e| e.with_time(t))?;
                grid = solve.grid;
                state = r.state;
            }
            _ => unreachable!("1D scheme in the 2D loop"),
        }
        let t_now = step as f64 * tau;

        if due(step, steps, config.diagnostics_stride) {
            samples.push((t_now, conserved_2d(&grid, &state, grid.dxi, grid.deta)));
        }
        if let Some(f) = files.as_mut() {
            if due(step, steps, config.snapshot_stride) {
                f.snapshot_2d(t_now, &grid, &state)?;
            }
            if due(step, steps, config.mesh_stride) {
                f.mesh_2d(t_now, &grid)?;
            }
        }
    }

    let series = record_series_2d(&samples);
    if let Some(mut f) = files {
        f.diagnostics_2d(&series)?;
        f.finish()?;
    }
    Ok(RunOutput {
        steps,
        t_end: steps as f64 * tau,
        series_1d: Vec::new(),
        series_2d: series,
        mesh_residuals: Vec::new(),
        final_1d: None,
        final_2d: Some((grid, state)),
    })
}

/// One cell of the equivariance matrix.
#[derive(Debug, Clone)]
pub struct InvarianceRow {
    pub scheme: SchemeId,
    pub generator: &'static str,
    pub steps: usize,
    pub discrepancy: f64,
    pub tolerance: f64,
}

impl InvarianceRow {
    pub fn passed(&self) -> bool {
        self.discrepancy <= self.tolerance
    }
}

/// Per-step closure for a 1D scheme as the runner would drive it. The
/// computational schemes use the symmetric smoothing velocity
/// ẋ_i = (u_{i−1} + 2u_i + u_{i+1})/4, which transforms like a velocity
/// under the whole group, so every generator can be tested on them.
fn step_closure_1d(
    scheme: SchemeId,
    tol: f64,
    max_iter: usize,
) -> impl Fn(f64, &Grid1D, &State1D, f64) -> Result<(Grid1D, State1D)> {
    move |_t, grid, state, tau| {
        let r = match scheme {
            SchemeId::LagrangianExplicit => step_lagrangian_explicit(grid, state, tau)?,
            SchemeId::LagrangianTrapezoidal => {
                step_lagrangian_trapezoidal(grid, state, tau, tol, max_iter)?
            }
            SchemeId::ConservativeExplicit => step_conservative_explicit(grid, state, tau)?,
            SchemeId::ConservativeTrapezoidal => {
                step_conservative_trapezoidal(grid, state, tau, tol, max_iter)?
            }
            _ => {
                let n = state.n();
                let w: Vec<f64> = (0..n as i64)
                    .map(|i| {
                        0.25 * (state.u_at(i - 1) + 2.0 * state.u_at(i) + state.u_at(i + 1))
                    })
                    .collect();
                let mode = match scheme {
                    SchemeId::ComputationalExplicit
                    | SchemeId::ComputationalConservativeExplicit => TimeMode::Explicit,
                    _ => TimeMode::Trapezoidal,
                };
                match scheme {
                    SchemeId::ComputationalExplicit | SchemeId::ComputationalTrapezoidal => {
                        step_computational_nonconservative(
                            grid, state, tau, &w, mode, tol, max_iter,
                        )?
                    }
                    _ => step_computational_conservative(
                        grid, state, tau, &w, mode, tol, max_iter,
                    )?,
                }
            }
        };
        Ok((r.grid, r.state))
    }
}

/// Equivariance matrix for the config's spatial dimension: every scheme of
/// that dimension × every symmetry generator × 1 and 10 steps. 1D schemes
/// are checked under both shifts, the Galilean boost, both scalings, and a
/// combined element; 2D schemes under the three shifts and both boosts
/// (an adaptive mesh pipeline drives the computational-coordinates scheme).
pub fn invariance_suite(config: &SimulationConfig) -> Result<Vec<InvarianceRow>> {
    let mut rows = Vec::new();
    let steps_list = [1usize, 10];
    if config.scheme.is_two_dimensional() {
        let (grid, state) = config.initial_2d()?;
        let mesh_cap = config.mesh_iteration_cap();
        let generators: [(&'static str, GroupElement2D); 6] = [
            ("time-shift", GroupElement2D::shift(0.3, 0.0, 0.0)),
            ("x-shift", GroupElement2D::shift(0.0, 0.4, 0.0)),
            ("y-shift", GroupElement2D::shift(0.0, 0.0, -0.3)),
            ("x-boost", GroupElement2D::boost(0.25, 0.0)),
            ("y-boost", GroupElement2D::boost(0.0, -0.15)),
            (
                "combined",
                GroupElement2D { dt: 0.2, dx: 0.3, dy: -0.1, eps1: 0.2, eps2: 0.1 },
            ),
        ];
        for scheme in [SchemeId::FvExplicit, SchemeId::FvTrapezoidal, SchemeId::EulerianTrapezoidal]
        {
            let tolerance = if scheme == SchemeId::EulerianTrapezoidal {
                10.0 * config.mesh_tol.max(config.scheme_tol)
            } else {
                10.0 * config.scheme_tol.max(1e-12)
            };
            let cfg = config.clone();
            let step = move |_t: f64, grid: &Grid2D, state: &State2D, tau: f64| {
                match scheme {
                    SchemeId::FvExplicit => {
                        let r = step_fv_explicit(grid, state, tau, cfg.interp)?;
                        Ok((r.grid, r.state))
                    }
                    SchemeId::FvTrapezoidal => {
                        let r = step_fv_trapezoidal(
                            grid,
                            state,
                            tau,
                            cfg.interp,
                            cfg.scheme_tol,
                            cfg.scheme_max_iter,
                        )?;
                        Ok((r.grid, r.state))
                    }
                    _ => {
                        let w = weight_values(grid, state, &cfg.weight);
                        let anchor = (mean(&state.u), mean(&state.v));
                        let solve = solve_elliptic_grid(
                            grid,
                            &w,
                            anchor,
                            tau,
                            cfg.mesh_tol,
                            mesh_cap,
                        )?;
                        let r = step_eulerian_trapezoidal(
                            grid,
                            &solve.grid,
                            state,
                            tau,
                            cfg.scheme_tol,
                            cfg.scheme_max_iter,
                        )?;
                        Ok((solve.grid, r.state))
                    }
                }
            };
            for (name, g) in &generators {
                for steps in steps_list {
                    let discrepancy =
                        check_equivariance_2d(&step, g, 0.0, &grid, &state, config.tau, steps)?;
                    rows.push(InvarianceRow {
                        scheme,
                        generator: name,
                        steps,
                        discrepancy,
                        tolerance,
                    });
                }
            }
        }
    } else {
        let (grid, state) = config.initial_1d()?;
        let generators: [(&'static str, GroupElement1D); 6] = [
            ("time-shift", GroupElement1D::shift(0.3, 0.0)),
            ("space-shift", GroupElement1D::shift(0.0, 0.4)),
            ("boost", GroupElement1D::boost(0.25)),
            ("scaling-a", GroupElement1D::scaling(0.2, 0.0)),
            ("scaling-b", GroupElement1D::scaling(0.0, -0.15)),
            (
                "combined",
                GroupElement1D { dt: 0.1, dx: 0.3, eps: 0.2, a: 0.1, b: -0.1 },
            ),
        ];
        let one_d_schemes = [
            SchemeId::LagrangianExplicit,
            SchemeId::LagrangianTrapezoidal,
            SchemeId::ConservativeExplicit,
            SchemeId::ConservativeTrapezoidal,
            SchemeId::ComputationalExplicit,
            SchemeId::ComputationalTrapezoidal,
            SchemeId::ComputationalConservativeExplicit,
            SchemeId::ComputationalConservativeTrapezoidal,
        ];
        for scheme in one_d_schemes {
            let tolerance = 10.0 * config.scheme_tol.max(1e-12);
            let step = step_closure_1d(scheme, config.scheme_tol, config.scheme_max_iter);
            for (name, g) in &generators {
                for steps in steps_list {
                    let discrepancy =
                        check_equivariance_1d(&step, g, 0.0, &grid, &state, config.tau, steps)?;
                    rows.push(InvarianceRow {
                        scheme,
                        generator: name,
                        steps,
                        discrepancy,
                        tolerance,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Refinement axis of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyAxis {
    /// Halve τ at fixed resolution; self-convergence at the final time.
    Temporal,
    /// Double N at fixed τ on a static uniform mesh (1D computational
    /// schemes only); coarse nodes are compared against their images.
    Spatial,
}

/// One refinement level of a convergence study. `order` is the observed
/// Richardson order against the previous level (None for the first level
/// or when the error sequence is not monotonically decreasing).
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub axis: StudyAxis,
    pub level: usize,
    pub resolution: String,
    pub error: f64,
    pub order: Option<f64>,
}

fn final_state_1d(config: &SimulationConfig) -> Result<(Grid1D, State1D)> {
    let out = run(config, None)?;
    Ok(out.final_1d.expect("1D run must produce a 1D final state"))
}

fn final_state_2d(config: &SimulationConfig) -> Result<(Grid2D, State2D)> {
    let out = run(config, None)?;
    Ok(out.final_2d.expect("2D run must produce a 2D final state"))
}

/// Richardson self-convergence study with `levels` refinements (≥ 3).
pub fn convergence_study(
    config: &SimulationConfig,
    levels: usize,
    axis: StudyAxis,
) -> Result<Vec<ConvergenceRow>> {
    if levels < 3 {
        return Err(Error::Config(format!(
            "a convergence study needs at least 3 levels, got {levels}"
        )));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    match axis {
        StudyAxis::Temporal => {
            if config.scheme.is_two_dimensional() {
                let mut states: Vec<(Grid2D, State2D)> = Vec::new();
                for level in 0..levels {
                    let mut c = config.clone();
                    c.tau = config.tau / (1 << level) as f64;
                    states.push(final_state_2d(&c)?);
                }
                for level in 0..levels - 1 {
                    let (ga, sa) = &states[level];
                    let (gb, sb) = &states[level + 1];
                    let mut err = 0.0f64;
                    for i in 0..sa.len() {
                        err = err.max((ga.xs()[i] - gb.xs()[i]).abs());
                        err = err.max((ga.ys()[i] - gb.ys()[i]).abs());
                        err = err.max((sa.u[i] - sb.u[i]).abs());
                        err = err.max((sa.v[i] - sb.v[i]).abs());
                        err = err.max((sa.h[i] - sb.h[i]).abs());
                    }
                    push_row(&mut rows, axis, level, format!("tau={}", config.tau / (1 << level) as f64), err);
                }
            } else {
                let mut states: Vec<(Grid1D, State1D)> = Vec::new();
                for level in 0..levels {
                    let mut c = config.clone();
                    c.tau = config.tau / (1 << level) as f64;
                    states.push(final_state_1d(&c)?);
                }
                for level in 0..levels - 1 {
                    let (ga, sa) = &states[level];
                    let (gb, sb) = &states[level + 1];
                    let mut err = 0.0f64;
                    for i in 0..sa.n() {
                        err = err.max((ga.nodes()[i] - gb.nodes()[i]).abs());
                        err = err.max((sa.u[i] - sb.u[i]).abs());
                        err = err.max((sa.h[i] - sb.h[i]).abs());
                    }
                    push_row(&mut rows, axis, level, format!("tau={}", config.tau / (1 << level) as f64), err);
                }
            }
        }
        StudyAxis::Spatial => {
            if config.scheme.is_two_dimensional() || !config.scheme.uses_monitor() {
                return Err(Error::Config(
                    "the spatial study drives the 1D computational schemes on a static mesh"
                        .into(),
                ));
            }
            // Static uniform mesh: zero mesh velocity throughout.
            let mode = match config.scheme {
                SchemeId::ComputationalExplicit | SchemeId::ComputationalConservativeExplicit => {
                    TimeMode::Explicit
                }
                _ => TimeMode::Trapezoidal,
            };
            let mut states: Vec<(usize, State1D)> = Vec::new();
            for level in 0..levels {
                let mut c = config.clone();
                c.n = config.n << level;
                let (grid, mut state) = c.initial_1d()?;
                let w = vec![0.0; c.n];
                let mut g = grid;
                for _ in 0..c.steps() {
                    let r = match c.scheme {
                        SchemeId::ComputationalExplicit | SchemeId::ComputationalTrapezoidal => {
                            step_computational_nonconservative(
                                &g,
                                &state,
                                c.tau,
                                &w,
                                mode,
                                c.scheme_tol,
                                c.scheme_max_iter,
                            )?
                        }
                        _ => step_computational_conservative(
                            &g,
                            &state,
                            c.tau,
                            &w,
                            mode,
                            c.scheme_tol,
                            c.scheme_max_iter,
                        )?,
                    };
                    g = r.grid;
                    state = r.state;
                }
                states.push((c.n, state));
            }
            for level in 0..levels - 1 {
                let (na, sa) = &states[level];
                let (_, sb) = &states[level + 1];
                let mut err = 0.0f64;
                for i in 0..*na {
                    err = err.max((sa.u[i] - sb.u[2 * i]).abs());
                    err = err.max((sa.h[i] - sb.h[2 * i]).abs());
                }
                push_row(&mut rows, axis, level, format!("n={na}"), err);
            }
        }
    }
    Ok(rows)
}

fn push_row(rows: &mut Vec<ConvergenceRow>, axis: StudyAxis, level: usize, resolution: String, err: f64) {
    let order = rows.last().and_then(|prev: &ConvergenceRow| {
        // Flag non-monotone error pairs instead of reporting a bogus order.
        if prev.error > err && err > 0.0 {
            Some((prev.error / err).log2())
        } else {
            None
        }
    });
    rows.push(ConvergenceRow { axis, level, resolution, error: err, order });
}
