//! The 1D schemes on moving periodic meshes.
//!
//! Two families, each in explicit (forward Euler) and trapezoidal variants:
//!
//! * advective form (per-node material equations)
//!     u_t + (u − ẋ)u_x + h_x = 0,   h_t + (u − ẋ)h_x + h u_x = 0
//!   as the Lagrangian schemes (mesh velocity ẋ = u, resp. (u+û)/2) and the
//!   computational-coordinate schemes (ẋ supplied externally);
//! * conservative (momentum) form
//!     h_t + (uh)_x = 0,   (uh)_t + (hu² + ½h²)_x = 0,
//!   discretized so that the discrete mass ½Σ h_i(x_{i+1}−x_{i−1}) — and for
//!   the explicit variants also the momentum — telescopes exactly over the
//!   periodic index.
//!
//! All stencils are centered, with periodic wrap through ghost positions
//! (x_{i+N} = x_i + L). Conservative updates are assembled in the form
//! ĥ_i Δx̂_i = h_i Δx_i − τ·(flux difference), with every flux value computed
//! once per node, so the telescoping cancellation is exact in floating point
//! up to summation roundoff.
//!
//! Implicit variants solve the coupled system by damped Picard iteration;
//! the iteration residual is the max-norm increment of the unknowns.

use crate::model::{periodic_index, Grid1D, State1D};
use crate::{Error, Result};

/// Time discretization selector for the computational-coordinate schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    Explicit,
    Trapezoidal,
}

/// Outcome of one 1D step. `iterations`/`residual` report the Picard solve
/// (0 and 0.0 for explicit schemes).
#[derive(Debug, Clone)]
pub struct Step1DResult {
    pub grid: Grid1D,
    pub state: State1D,
    pub iterations: usize,
    pub residual: f64,
}

/// Advective flux difference quotient
/// A(z) = [(u_{i+1}−ẋ_{i+1})z_{i+1} − (u_{i−1}−ẋ_{i−1})z_{i−1}] / (x_{i+1}−x_{i−1})
/// with the mesh velocity ẋ = (x̂ − x)/τ taken from the two grid levels.
pub fn flux_a(
    z: &[f64],
    grid: &Grid1D,
    hat_grid: &Grid1D,
    state: &State1D,
    tau: f64,
    i: i64,
) -> Result<f64> {
    let dd = grid.centered_spacing(i);
    if dd == 0.0 {
        return Err(Error::DegenerateStencil {
            index: periodic_index(i, grid.n()).0,
        });
    }
    let n = grid.n();
    let at = |j: i64| z[periodic_index(j, n).0];
    let xdot = |j: i64| (hat_grid.pos(j) - grid.pos(j)) / tau;
    Ok(((state.u_at(i + 1) - xdot(i + 1)) * at(i + 1)
        - (state.u_at(i - 1) - xdot(i - 1)) * at(i - 1))
        / dd)
}

/// Hatted counterpart Â(z): next-level fields and spacings, same mesh velocity.
pub fn flux_a_hat(
    z_hat: &[f64],
    grid: &Grid1D,
    hat_grid: &Grid1D,
    hat_state: &State1D,
    tau: f64,
    i: i64,
) -> Result<f64> {
    let dd = hat_grid.centered_spacing(i);
    if dd == 0.0 {
        return Err(Error::DegenerateStencil {
            index: periodic_index(i, grid.n()).0,
        });
    }
    let n = grid.n();
    let at = |j: i64| z_hat[periodic_index(j, n).0];
    let xdot = |j: i64| (hat_grid.pos(j) - grid.pos(j)) / tau;
    Ok(((hat_state.u_at(i + 1) - xdot(i + 1)) * at(i + 1)
        - (hat_state.u_at(i - 1) - xdot(i - 1)) * at(i - 1))
        / dd)
}

/// Central difference quotient D(z) = (z_{i+1} − z_{i−1})/(x_{i+1} − x_{i−1}).
pub fn flux_d(z: &[f64], grid: &Grid1D, i: i64) -> Result<f64> {
    let dd = grid.centered_spacing(i);
    if dd == 0.0 {
        return Err(Error::DegenerateStencil {
            index: periodic_index(i, grid.n()).0,
        });
    }
    let n = grid.n();
    let at = |j: i64| z[periodic_index(j, n).0];
    Ok((at(i + 1) - at(i - 1)) / dd)
}

/// Advisory stability number for the explicit schemes:
/// τ·max(|u_i| + √h_i)/min spacing. Warns above 1; does not abort.
fn cfl_advisory(grid: &Grid1D, state: &State1D, tau: f64) {
    let speed = state
        .u
        .iter()
        .zip(&state.h)
        .fold(0.0f64, |m, (&u, &h)| m.max(u.abs() + h.sqrt()));
    let cfl = tau * speed / grid.min_spacing();
    if cfl > 1.0 {
        log::warn!("explicit step has advisory CFL number {cfl:.3} > 1; expect instability");
    }
}

fn picard_failure(solver: &'static str, residual: f64, iterations: usize) -> Error {
    Error::NoConvergence {
        solver,
        residual,
        iterations,
        time: None,
    }
}

/// Shared explicit kernel for the advective-form schemes:
///   x̂ = x + τẋ,
///   û_i = u_i − τ[(u_i−ẋ_i)(u_{i+1}−u_{i−1}) + (h_{i+1}−h_{i−1})]/Δx_i,
///   ĥ_i = h_i − τ[(u_i−ẋ_i)(h_{i+1}−h_{i−1}) + h_i(u_{i+1}−u_{i−1})]/Δx_i.
/// The Lagrangian scheme is exactly this kernel with ẋ = u, so the two entry
/// points agree bit for bit.
fn explicit_advective(
    grid: &Grid1D,
    state: &State1D,
    xdot: &[f64],
    tau: f64,
) -> Result<(Grid1D, State1D)> {
    let n = grid.n();
    let x_hat: Vec<f64> = (0..n).map(|i| grid.nodes()[i] + tau * xdot[i]).collect();
    let mut u_hat = vec![0.0; n];
    let mut h_hat = vec![0.0; n];
    for i in 0..n as i64 {
        let dd = grid.centered_spacing(i);
        let du = state.u_at(i + 1) - state.u_at(i - 1);
        let dh = state.h_at(i + 1) - state.h_at(i - 1);
        let adv = state.u_at(i) - xdot[i as usize];
        u_hat[i as usize] = state.u_at(i) - tau * (adv * du + dh) / dd;
        h_hat[i as usize] = state.h_at(i) - tau * (adv * dh + state.h_at(i) * du) / dd;
    }
    Ok((Grid1D::new(x_hat, grid.length())?, State1D::new(u_hat, h_hat)?))
}

/// Shared explicit kernel for the conservative-form schemes, assembled as
///   ĥ_i Δx̂_i = h_i Δx_i − τ a_i(h),
///   û_i ĥ_i Δx̂_i = u_i h_i Δx_i − τ a_i(uh) − (τ/2)(h²_{i+1} − h²_{i−1}),
/// with a_i(z) = (u_{i+1}−ẋ_{i+1})z_{i+1} − (u_{i−1}−ẋ_{i−1})z_{i−1}. Each
/// nodal flux value enters the periodic sums once with each sign, so mass
/// and momentum telescope exactly. The Lagrangian conservative scheme is
/// this kernel with ẋ = u (all a_i vanish identically).
fn explicit_conservative(
    grid: &Grid1D,
    state: &State1D,
    xdot: &[f64],
    tau: f64,
) -> Result<(Grid1D, State1D)> {
    let n = grid.n();
    let x_hat: Vec<f64> = (0..n).map(|i| grid.nodes()[i] + tau * xdot[i]).collect();
    let hat_grid = Grid1D::new(x_hat, grid.length())?;
    // Per-node flux values, computed once.
    let g: Vec<f64> = (0..n).map(|i| state.u[i] - xdot[i]).collect();
    let m: Vec<f64> = (0..n).map(|i| state.u[i] * state.h[i]).collect();
    let h2: Vec<f64> = state.h.iter().map(|&h| h * h).collect();
    let mut u_hat = vec![0.0; n];
    let mut h_hat = vec![0.0; n];
    let at = |z: &[f64], j: i64| z[periodic_index(j, n).0];
    for i in 0..n as i64 {
        let dd = grid.centered_spacing(i);
        let ddh = hat_grid.centered_spacing(i);
        let a_h = at(&g, i + 1) * state.h_at(i + 1) - at(&g, i - 1) * state.h_at(i - 1);
        let a_m = at(&g, i + 1) * at(&m, i + 1) - at(&g, i - 1) * at(&m, i - 1);
        let dh2 = at(&h2, i + 1) - at(&h2, i - 1);
        let hn = (state.h_at(i) * dd - tau * a_h) / ddh;
        let un = (at(&m, i) * dd - tau * a_m - 0.5 * tau * dh2) / (hn * ddh);
        h_hat[i as usize] = hn;
        u_hat[i as usize] = un;
    }
    Ok((hat_grid, State1D::new(u_hat, h_hat)?))
}

/// Lagrangian explicit step (mesh moves with the fluid, ẋ = u).
pub fn step_lagrangian_explicit(grid: &Grid1D, state: &State1D, tau: f64) -> Result<Step1DResult> {
    cfl_advisory(grid, state, tau);
    let (grid, state) = explicit_advective(grid, state, &state.u, tau)?;
    Ok(Step1DResult { grid, state, iterations: 0, residual: 0.0 })
}

/// Conservative (momentum-form) explicit step with ẋ = u; preserves the
/// discrete mass and momentum exactly.
pub fn step_conservative_explicit(grid: &Grid1D, state: &State1D, tau: f64) -> Result<Step1DResult> {
    cfl_advisory(grid, state, tau);
    let (grid, state) = explicit_conservative(grid, state, &state.u, tau)?;
    Ok(Step1DResult { grid, state, iterations: 0, residual: 0.0 })
}

/// Advective-form step on an externally driven mesh, x̂ = x + τ·meshVelocity.
/// With meshVelocity = u the explicit variant reproduces
/// [`step_lagrangian_explicit`] bit-exactly.
pub fn step_computational_nonconservative(
    grid: &Grid1D,
    state: &State1D,
    tau: f64,
    mesh_velocity: &[f64],
    mode: TimeMode,
    tol: f64,
    max_iter: usize,
) -> Result<Step1DResult> {
    match mode {
        TimeMode::Explicit => {
            cfl_advisory(grid, state, tau);
            let (grid, state) = explicit_advective(grid, state, mesh_velocity, tau)?;
            Ok(Step1DResult { grid, state, iterations: 0, residual: 0.0 })
        }
        TimeMode::Trapezoidal => {
            trapezoidal_advective(grid, state, Some(mesh_velocity), tau, tol, max_iter)
        }
    }
}

/// Conservative-form step on an externally driven mesh. Mass telescopes
/// exactly in both modes; momentum additionally in the explicit mode.
pub fn step_computational_conservative(
    grid: &Grid1D,
    state: &State1D,
    tau: f64,
    mesh_velocity: &[f64],
    mode: TimeMode,
    tol: f64,
    max_iter: usize,
) -> Result<Step1DResult> {
    match mode {
        TimeMode::Explicit => {
            cfl_advisory(grid, state, tau);
            let (grid, state) = explicit_conservative(grid, state, mesh_velocity, tau)?;
            Ok(Step1DResult { grid, state, iterations: 0, residual: 0.0 })
        }
        TimeMode::Trapezoidal => {
            trapezoidal_conservative(grid, state, Some(mesh_velocity), tau, tol, max_iter)
        }
    }
}

/// Lagrangian trapezoidal step: ẋ = (u+û)/2 coupled with centered averages
/// of the advective equations over the two levels.
pub fn step_lagrangian_trapezoidal(
    grid: &Grid1D,
    state: &State1D,
    tau: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Step1DResult> {
    trapezoidal_advective(grid, state, None, tau, tol, max_iter)
}

/// Conservative trapezoidal step: ẋ = (u+û)/2, continuity ĥ_iΔx̂_i = h_iΔx_i
/// (exact mass), momentum with the time-averaged pressure-flux difference
/// (τ/4)(Δh² + Δĥ²).
pub fn step_conservative_trapezoidal(
    grid: &Grid1D,
    state: &State1D,
    tau: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Step1DResult> {
    trapezoidal_conservative(grid, state, None, tau, tol, max_iter)
}

/// Damped-Picard driver shared by the implicit schemes. `sweep` performs one
/// fixed-point assignment pass from the previous iterate and returns the new
/// one; convergence is measured as the max-norm increment. On a residual
/// increase the damping factor drops from 1 to 1/2 (applied to u and x; h is
/// always reassigned exactly so conservation identities survive damping).
/// One final undamped pass follows convergence so the returned iterate is a
/// pure assignment image.
struct PicardVars {
    x: Vec<f64>,
    u: Vec<f64>,
    h: Vec<f64>,
}

fn picard_drive<F>(
    solver: &'static str,
    init: PicardVars,
    mut sweep: F,
    tol: f64,
    max_iter: usize,
) -> Result<(PicardVars, usize, f64)>
where
    F: FnMut(&PicardVars) -> Result<PicardVars>,
{
    let mut cur = init;
    let mut omega = 1.0;
    let mut prev_inc = f64::INFINITY;
    for iter in 1..=max_iter {
        let new = sweep(&cur)?;
        let mut inc = 0.0f64;
        for (a, b) in new.x.iter().zip(&cur.x) {
            inc = inc.max((a - b).abs());
        }
        for (a, b) in new.u.iter().zip(&cur.u) {
            inc = inc.max((a - b).abs());
        }
        for (a, b) in new.h.iter().zip(&cur.h) {
            inc = inc.max((a - b).abs());
        }
        if inc > prev_inc {
            omega = 0.5;
        }
        prev_inc = inc;
        if omega == 1.0 {
            cur = new;
        } else {
            for i in 0..cur.x.len() {
                cur.x[i] += omega * (new.x[i] - cur.x[i]);
                cur.u[i] += omega * (new.u[i] - cur.u[i]);
            }
            cur.h = new.h;
        }
        if inc <= tol {
            let fin = sweep(&cur)?;
            return Ok((fin, iter + 1, inc));
        }
    }
    Err(picard_failure(solver, prev_inc, max_iter))
}

/// Trapezoidal advective form. `mesh_velocity = None` selects the Lagrangian
/// closure ẋ = (u+û)/2 (the advective factor then cancels); `Some(ẋ)` holds
/// the mesh motion fixed at x̂ = x + τẋ.
fn trapezoidal_advective(
    grid: &Grid1D,
    state: &State1D,
    mesh_velocity: Option<&[f64]>,
    tau: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Step1DResult> {
    let n = grid.n();
    let length = grid.length();
    let at = |z: &[f64], j: i64| z[periodic_index(j, n).0];
    let pos = |x: &[f64], j: i64| {
        let (r, w) = periodic_index(j, n);
        x[r] + w as f64 * length
    };

    let init = PicardVars {
        x: match mesh_velocity {
            Some(w) => (0..n).map(|i| grid.nodes()[i] + tau * w[i]).collect(),
            None => grid.nodes().to_vec(),
        },
        u: state.u.clone(),
        h: state.h.clone(),
    };

    let sweep = |cur: &PicardVars| -> Result<PicardVars> {
        // Mesh update first; geometry below uses the fresh level.
        let x_new: Vec<f64> = match mesh_velocity {
            Some(w) => (0..n).map(|i| grid.nodes()[i] + tau * w[i]).collect(),
            None => (0..n)
                .map(|i| grid.nodes()[i] + 0.5 * tau * (state.u[i] + cur.u[i]))
                .collect(),
        };
        let mut u_new = vec![0.0; n];
        let mut h_new = vec![0.0; n];
        for i in 0..n as i64 {
            let dd = grid.centered_spacing(i);
            let ddh = pos(&x_new, i + 1) - pos(&x_new, i - 1);
            if ddh <= 0.0 {
                return Err(Error::Tangled {
                    index: periodic_index(i, n).0,
                    time: None,
                });
            }
            let ii = i as usize;
            let du = state.u_at(i + 1) - state.u_at(i - 1);
            let dh = state.h_at(i + 1) - state.h_at(i - 1);
            let duh = at(&cur.u, i + 1) - at(&cur.u, i - 1);
            let dhh = at(&cur.h, i + 1) - at(&cur.h, i - 1);
            match mesh_velocity {
                None => {
                    // û = u − (τ/2)[D(h) + D̂(ĥ)]
                    u_new[ii] = state.u[ii] - 0.5 * tau * (dh / dd + dhh / ddh);
                    // ĥ(1 + (τ/2)Δû/Δx̂) = h − (τ/2) h Δu/Δx
                    h_new[ii] = (state.h[ii] - 0.5 * tau * state.h[ii] * du / dd)
                        / (1.0 + 0.5 * tau * duh / ddh);
                }
                Some(w) => {
                    // Advective factor (u+û)/2 − ẋ multiplies the centered
                    // average of the difference quotients at both levels.
                    let eu = 0.5 * (du / dd + duh / ddh);
                    let eh = 0.5 * (dh / dd + dhh / ddh);
                    // Isolate the diagonal û in û + τ((u+û)/2 − ẋ)·eu + τ·eh = −...
                    u_new[ii] = (state.u[ii] - tau * (0.5 * state.u[ii] - w[ii]) * eu
                        - tau * eh)
                        / (1.0 + 0.5 * tau * eu);
                    let adv = 0.5 * (state.u[ii] + u_new[ii]) - w[ii];
                    h_new[ii] = (state.h[ii]
                        - tau * adv * eh
                        - 0.5 * tau * state.h[ii] * du / dd)
                        / (1.0 + 0.5 * tau * duh / ddh);
                }
            }
            if h_new[ii] <= 0.0 {
                return Err(Error::NonPositiveDepth {
                    index: ii,
                    value: h_new[ii],
                    time: None,
                });
            }
        }
        Ok(PicardVars { x: x_new, u: u_new, h: h_new })
    };

    let solver = match mesh_velocity {
        None => "lagrangian-trapezoidal Picard",
        Some(_) => "computational-trapezoidal Picard",
    };
    let (vars, iterations, residual) = picard_drive(solver, init, sweep, tol, max_iter)?;
    Ok(Step1DResult {
        grid: Grid1D::new(vars.x, length)?,
        state: State1D::new(vars.u, vars.h)?,
        iterations,
        residual,
    })
}

/// Trapezoidal conservative form, assembled against the unhatted spacing:
///   ĥ_i Δx̂_i = h_i Δx_i − (τ/2)(a_i + â_i),
///   û_i ĥ_i Δx̂_i = u_i h_i Δx_i − (τ/2)(a_i(uh) + â_i(uh)) − (τ/4)(Δh² + Δĥ²),
/// where â uses next-level fields with the same mesh velocity. The flux
/// terms telescope at every iterate, so mass (and, pointwise in assembly,
/// momentum) conservation is independent of how far the Picard loop got.
/// `mesh_velocity = None` selects ẋ = (u+û)/2 with all a-terms dropped (the
/// Lagrangian momentum form); `Some(ẋ)` holds x̂ = x + τẋ fixed.
fn trapezoidal_conservative(
    grid: &Grid1D,
    state: &State1D,
    mesh_velocity: Option<&[f64]>,
    tau: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Step1DResult> {
    let n = grid.n();
    let length = grid.length();
    let at = |z: &[f64], j: i64| z[periodic_index(j, n).0];
    let pos = |x: &[f64], j: i64| {
        let (r, w) = periodic_index(j, n);
        x[r] + w as f64 * length
    };
    let h2: Vec<f64> = state.h.iter().map(|&h| h * h).collect();
    let m: Vec<f64> = (0..n).map(|i| state.u[i] * state.h[i]).collect();

    let init = PicardVars {
        x: match mesh_velocity {
            Some(w) => (0..n).map(|i| grid.nodes()[i] + tau * w[i]).collect(),
            None => grid.nodes().to_vec(),
        },
        u: state.u.clone(),
        h: state.h.clone(),
    };

    let sweep = |cur: &PicardVars| -> Result<PicardVars> {
        let x_new: Vec<f64> = match mesh_velocity {
            Some(w) => (0..n).map(|i| grid.nodes()[i] + tau * w[i]).collect(),
            None => (0..n)
                .map(|i| grid.nodes()[i] + 0.5 * tau * (state.u[i] + cur.u[i]))
                .collect(),
        };
        let h2h: Vec<f64> = cur.h.iter().map(|&h| h * h).collect();
        let mh: Vec<f64> = (0..n).map(|i| cur.u[i] * cur.h[i]).collect();
        let mut u_new = vec![0.0; n];
        let mut h_new = vec![0.0; n];
        for i in 0..n as i64 {
            let dd = grid.centered_spacing(i);
            let ddh = pos(&x_new, i + 1) - pos(&x_new, i - 1);
            if ddh <= 0.0 {
                return Err(Error::Tangled {
                    index: periodic_index(i, n).0,
                    time: None,
                });
            }
            let ii = i as usize;
            let dh2 = at(&h2, i + 1) - at(&h2, i - 1) + (at(&h2h, i + 1) - at(&h2h, i - 1));
            let (flux_h, flux_m) = match mesh_velocity {
                None => (0.0, 0.0),
                Some(w) => {
                    let gp = state.u_at(i + 1) - at(w, i + 1);
                    let gm = state.u_at(i - 1) - at(w, i - 1);
                    let gph = at(&cur.u, i + 1) - at(w, i + 1);
                    let gmh = at(&cur.u, i - 1) - at(w, i - 1);
                    let a_h = gp * state.h_at(i + 1) - gm * state.h_at(i - 1)
                        + (gph * at(&cur.h, i + 1) - gmh * at(&cur.h, i - 1));
                    let a_m = gp * at(&m, i + 1) - gm * at(&m, i - 1)
                        + (gph * at(&mh, i + 1) - gmh * at(&mh, i - 1));
                    (a_h, a_m)
                }
            };
            let hn = (state.h[ii] * dd - 0.5 * tau * flux_h) / ddh;
            if hn <= 0.0 {
                return Err(Error::NonPositiveDepth { index: ii, value: hn, time: None });
            }
            let un = (m[ii] * dd - 0.5 * tau * flux_m - 0.25 * tau * dh2) / (hn * ddh);
            h_new[ii] = hn;
            u_new[ii] = un;
        }
        Ok(PicardVars { x: x_new, u: u_new, h: h_new })
    };

    let solver = match mesh_velocity {
        None => "conservative-trapezoidal Picard",
        Some(_) => "computational-conservative-trapezoidal Picard",
    };
    let (vars, iterations, residual) = picard_drive(solver, init, sweep, tol, max_iter)?;
    Ok(Step1DResult {
        grid: Grid1D::new(vars.x, length)?,
        state: State1D::new(vars.u, vars.h)?,
        iterations,
        residual,
    })
}

/// Pointwise residuals (eq_h, eq_u) of the Lagrangian conservative
/// equations, normalized by Δx_i:
///   eq_h = [ĥΔx̂ − hΔx]/Δx,
///   eq_u = [ûĥΔx̂ − uhΔx + pressure flux]/Δx,
/// with the pressure flux (τ/2)Δh² (explicit) or (τ/4)(Δh²+Δĥ²)
/// (trapezoidal). Under a boost the pair transforms as
/// (eq_h, eq_u + ε·eq_h).
pub fn residual_conservative(
    grid: &Grid1D,
    hat_grid: &Grid1D,
    state: &State1D,
    hat_state: &State1D,
    tau: f64,
    mode: TimeMode,
) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n();
    let mut eq_h = vec![0.0; n];
    let mut eq_u = vec![0.0; n];
    for i in 0..n as i64 {
        let dd = grid.centered_spacing(i);
        let ddh = hat_grid.centered_spacing(i);
        let ii = i as usize;
        let dh2 = state.h_at(i + 1).powi(2) - state.h_at(i - 1).powi(2);
        let dh2h = hat_state.h_at(i + 1).powi(2) - hat_state.h_at(i - 1).powi(2);
        let press = match mode {
            TimeMode::Explicit => 0.5 * tau * dh2,
            TimeMode::Trapezoidal => 0.25 * tau * (dh2 + dh2h),
        };
        eq_h[ii] = (hat_state.h_at(i) * ddh - state.h_at(i) * dd) / dd;
        eq_u[ii] = (hat_state.u_at(i) * hat_state.h_at(i) * ddh
            - state.u_at(i) * state.h_at(i) * dd
            + press)
            / dd;
    }
    (eq_h, eq_u)
}

/// Pointwise residuals of the computational-coordinate conservative
/// equations with an external mesh velocity, normalized by Δx_i. Boost law
/// as in [`residual_conservative`].
pub fn residual_computational_conservative(
    grid: &Grid1D,
    hat_grid: &Grid1D,
    state: &State1D,
    hat_state: &State1D,
    mesh_velocity: &[f64],
    tau: f64,
    mode: TimeMode,
) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n();
    let at = |z: &[f64], j: i64| z[periodic_index(j, n).0];
    let mut eq_h = vec![0.0; n];
    let mut eq_u = vec![0.0; n];
    for i in 0..n as i64 {
        let dd = grid.centered_spacing(i);
        let ddh = hat_grid.centered_spacing(i);
        let ii = i as usize;
        let gp = state.u_at(i + 1) - at(mesh_velocity, i + 1);
        let gm = state.u_at(i - 1) - at(mesh_velocity, i - 1);
        let a_h = gp * state.h_at(i + 1) - gm * state.h_at(i - 1);
        let a_m = gp * state.u_at(i + 1) * state.h_at(i + 1)
            - gm * state.u_at(i - 1) * state.h_at(i - 1);
        let dh2 = state.h_at(i + 1).powi(2) - state.h_at(i - 1).powi(2);
        let (flux_h, flux_m, press) = match mode {
            TimeMode::Explicit => (tau * a_h, tau * a_m, 0.5 * tau * dh2),
            TimeMode::Trapezoidal => {
                let gph = hat_state.u_at(i + 1) - at(mesh_velocity, i + 1);
                let gmh = hat_state.u_at(i - 1) - at(mesh_velocity, i - 1);
                let ah_h = gph * hat_state.h_at(i + 1) - gmh * hat_state.h_at(i - 1);
                let ah_m = gph * hat_state.u_at(i + 1) * hat_state.h_at(i + 1)
                    - gmh * hat_state.u_at(i - 1) * hat_state.h_at(i - 1);
                let dh2h = hat_state.h_at(i + 1).powi(2) - hat_state.h_at(i - 1).powi(2);
                (
                    0.5 * tau * (a_h + ah_h),
                    0.5 * tau * (a_m + ah_m),
                    0.25 * tau * (dh2 + dh2h),
                )
            }
        };
        eq_h[ii] = (hat_state.h_at(i) * ddh - state.h_at(i) * dd + flux_h) / dd;
        eq_u[ii] = (hat_state.u_at(i) * hat_state.h_at(i) * ddh
            - state.u_at(i) * state.h_at(i) * dd
            + flux_m
            + press)
            / dd;
    }
    (eq_h, eq_u)
}
