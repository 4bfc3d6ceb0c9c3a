//! Adaptive 1D mesh generation by equidistribution of a monitor function.
//!
//! The next-level mesh x̂ solves the discrete equidistribution relation
//!
//!   (ρ_{i+1} + ρ_i)(x̂_{i+1} − x̂_i) − (ρ_i + ρ_{i−1})(x̂_i − x̂_{i−1}) = 0
//!
//! on the periodic extension x̂_{i+N} = x̂_i + L, i.e. cell widths inversely
//! proportional to the edge-averaged monitor ρ. The relation only involves
//! differences of node positions and ratios of monitor values, so any mesh
//! transformation that shifts all nodes equally and rescales ρ by a common
//! factor maps solutions to solutions; the leftover translation freedom is
//! fixed by anchoring the mean node displacement to τ times a reference
//! velocity (the mean fluid velocity in the solver loop).
//!
//! Monitor functions follow the arc-length pattern ρ = √(1 + α z_x²) and its
//! curvature variant ρ = √(1 + α z_xx²) on the moving mesh, built from the
//! centered difference quotients
//!   z_x  ≈ (z_{i+1} − z_{i−1}) / (x_{i+1} − x_{i−1}),
//!   z_xx ≈ 2[(z_{i+1} − z_i)/(x_{i+1} − x_i) − (z_i − z_{i−1})/(x_i − x_{i−1})]
//!          / (x_{i+1} − x_{i−1}).

use crate::model::{periodic_index, Grid1D, State1D};
use crate::numerics::mean;
use crate::{Error, Result};

/// Which field(s) drive the monitor and through which derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorKind {
    /// ρ = √(1 + α u_x²)
    ArcLengthU,
    /// ρ = √(1 + α h_x²)
    ArcLengthH,
    /// ρ = √(1 + α u_x² + β h_x²)
    ArcLengthUH,
    /// ρ = √(1 + α u_xx²)
    CurvatureU,
    /// ρ = √(1 + α h_xx²)
    CurvatureH,
    /// ρ = √(1 + α u_xx² + β h_xx²)
    CurvatureUH,
    /// ρ = 1 (uniform mesh)
    Constant,
}

/// Monitor selection with its weights (β only matters for the UH kinds).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSpec {
    pub kind: MonitorKind,
    pub alpha: f64,
    pub beta: f64,
}

impl MonitorSpec {
    pub fn new(kind: MonitorKind, alpha: f64, beta: f64) -> Self {
        MonitorSpec { kind, alpha, beta }
    }
}

/// First derivative by the centered difference quotient on a nonuniform mesh.
#[inline]
fn d1(grid: &Grid1D, z: &[f64], i: i64) -> f64 {
    let n = grid.n();
    let at = |j: i64| z[periodic_index(j, n).0];
    (at(i + 1) - at(i - 1)) / grid.centered_spacing(i)
}

/// Second derivative by the nonuniform three-point formula.
#[inline]
fn d2(grid: &Grid1D, z: &[f64], i: i64) -> f64 {
    let n = grid.n();
    let at = |j: i64| z[periodic_index(j, n).0];
    let fwd = (at(i + 1) - at(i)) / (grid.pos(i + 1) - grid.pos(i));
    let bwd = (at(i) - at(i - 1)) / (grid.pos(i) - grid.pos(i - 1));
    2.0 * (fwd - bwd) / grid.centered_spacing(i)
}

/// Evaluates the monitor function at every node.
pub fn monitor_values(grid: &Grid1D, state: &State1D, spec: &MonitorSpec) -> Vec<f64> {
    let n = grid.n();
    let MonitorSpec { kind, alpha, beta } = *spec;
    (0..n as i64)
        .map(|i| match kind {
            MonitorKind::ArcLengthU => (1.0 + alpha * d1(grid, &state.u, i).powi(2)).sqrt(),
            MonitorKind::ArcLengthH => (1.0 + alpha * d1(grid, &state.h, i).powi(2)).sqrt(),
            MonitorKind::ArcLengthUH => (1.0
                + alpha * d1(grid, &state.u, i).powi(2)
                + beta * d1(grid, &state.h, i).powi(2))
            .sqrt(),
            MonitorKind::CurvatureU => (1.0 + alpha * d2(grid, &state.u, i).powi(2)).sqrt(),
            MonitorKind::CurvatureH => (1.0 + alpha * d2(grid, &state.h, i).powi(2)).sqrt(),
            MonitorKind::CurvatureUH => (1.0
                + alpha * d2(grid, &state.u, i).powi(2)
                + beta * d2(grid, &state.h, i).powi(2))
            .sqrt(),
            MonitorKind::Constant => 1.0,
        })
        .collect()
}

/// Result of an equidistribution solve.
#[derive(Debug, Clone)]
pub struct MeshSolve1D {
    pub grid: Grid1D,
    pub iterations: usize,
    pub residual: f64,
}

/// Max-norm of the equidistribution relation over all nodes.
pub fn equidistribution_residual(grid: &Grid1D, rho: &[f64]) -> f64 {
    let n = grid.n();
    let at = |j: i64| rho[periodic_index(j, n).0];
    (0..n as i64)
        .map(|i| {
            let wp = at(i + 1) + at(i);
            let wm = at(i) + at(i - 1);
            (wp * (grid.pos(i + 1) - grid.pos(i)) - wm * (grid.pos(i) - grid.pos(i - 1))).abs()
        })
        .fold(0.0, f64::max)
}

/// Solves the periodic equidistribution relation for the next mesh level by
/// lexicographic Gauss–Seidel sweeps of
///   x̂_i ← [(ρ_{i+1}+ρ_i) x̂_{i+1} + (ρ_i+ρ_{i−1}) x̂_{i−1}] / (ρ_{i+1}+2ρ_i+ρ_{i−1}),
/// starting from the current mesh. After convergence the translation gauge
/// is fixed by shifting all nodes so the mean displacement equals
/// τ·`anchor_velocity`, and the result is validated for monotonicity.
pub fn solve_equidistribution(
    grid: &Grid1D,
    rho: &[f64],
    anchor_velocity: f64,
    tau: f64,
    tol: f64,
    max_iter: usize,
) -> Result<MeshSolve1D> {
    let n = grid.n();
    if rho.len() != n {
        return Err(Error::Config(format!(
            "monitor has {} values for a {}-node grid",
            rho.len(),
            n
        )));
    }
    if let Some(i) = rho.iter().position(|&r| !(r > 0.0)) {
        return Err(Error::Config(format!(
            "monitor must be positive, got {} at node {i}",
            rho[i]
        )));
    }
    let length = grid.length();
    let at = |j: i64| rho[periodic_index(j, n).0];
    let mut x = grid.nodes().to_vec();
    let pos = |x: &[f64], j: i64| {
        let (r, w) = periodic_index(j, n);
        x[r] + w as f64 * length
    };

    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    for sweep in 1..=max_iter {
        for i in 0..n as i64 {
            let wp = at(i + 1) + at(i);
            let wm = at(i) + at(i - 1);
            x[i as usize] = (wp * pos(&x, i + 1) + wm * pos(&x, i - 1)) / (wp + wm);
        }
        residual = (0..n as i64)
            .map(|i| {
                let wp = at(i + 1) + at(i);
                let wm = at(i) + at(i - 1);
                (wp * (pos(&x, i + 1) - pos(&x, i)) - wm * (pos(&x, i) - pos(&x, i - 1))).abs()
            })
            .fold(0.0, f64::max);
        iterations = sweep;
        if residual <= tol {
            break;
        }
    }
    if residual > tol {
        return Err(Error::NoConvergence {
            solver: "equidistribution Gauss-Seidel",
            residual,
            iterations,
            time: None,
        });
    }

    // Translation gauge: mean displacement = τ·anchor.
    let disp: Vec<f64> = (0..n).map(|i| x[i] - grid.nodes()[i]).collect();
    let shift = tau * anchor_velocity - mean(&disp);
    for xi in &mut x {
        *xi += shift;
    }

    Ok(MeshSolve1D {
        grid: Grid1D::new(x, length)?,
        iterations,
        residual,
    })
}

/// Mesh velocity between two levels: ẋ_i = (x̂_i − x_i)/τ.
pub fn mesh_velocity(grid: &Grid1D, hat_grid: &Grid1D, tau: f64) -> Vec<f64> {
    grid.nodes()
        .iter()
        .zip(hat_grid.nodes())
        .map(|(&x, &xh)| (xh - x) / tau)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn arc_length_monitor_on_a_ramp() {
        let grid = Grid1D::new(vec![0.0, 1.0, 2.0], 3.0).unwrap();
        // Periodic ramp: the seam nodes see the wrap jump, the middle one a
        // clean slope of 1.
        let state = State1D::new(vec![0.0, 1.0, 2.0], vec![1.0; 3]).unwrap();
        let spec = MonitorSpec::new(MonitorKind::ArcLengthU, 1.0, 0.0);
        let rho = monitor_values(&grid, &state, &spec);
        assert!((rho[1] - 2.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn curvature_monitor_on_a_kink() {
        let grid = Grid1D::new(vec![0.0, 1.0, 2.0], 3.0).unwrap();
        let state = State1D::new(vec![0.0, 0.0, 1.0], vec![1.0; 3]).unwrap();
        // u_xx at node 1: 2[(1-0)/1 - (0-0)/1]/2 = 1.
        let spec = MonitorSpec::new(MonitorKind::CurvatureU, 3.0, 0.0);
        let rho = monitor_values(&grid, &state, &spec);
        assert!((rho[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_monitor_recovers_uniform_spacing() {
        let grid = Grid1D::new(vec![0.0, 0.2, 0.5, 2.1, 2.9], 4.0).unwrap();
        let rho = vec![1.0; 5];
        let sol = solve_equidistribution(&grid, &rho, 0.0, 0.1, TOL, 10 * 25).unwrap();
        for i in 0..5 {
            let w = sol.grid.pos(i as i64 + 1) - sol.grid.pos(i as i64);
            assert!((w - 0.8).abs() < 1e-10, "cell {i} width {w}");
        }
        assert!(sol.residual <= TOL);
    }

    #[test]
    fn three_node_monitor_sets_inverse_edge_spacing() {
        // ρ = (1,1,3): widths ∝ (1/(ρ0+ρ1), 1/(ρ1+ρ2), 1/(ρ2+ρ0)) = (1/2, 1/4, 1/4)
        // scaled to total length 1.
        let grid = Grid1D::uniform(3, 1.0).unwrap();
        let rho = vec![1.0, 1.0, 3.0];
        let sol = solve_equidistribution(&grid, &rho, 0.0, 1.0, TOL, 1000).unwrap();
        let w: Vec<f64> = (0..3)
            .map(|i| sol.grid.pos(i + 1) - sol.grid.pos(i))
            .collect();
        assert!((w[0] - 0.5).abs() < 1e-10);
        assert!((w[1] - 0.25).abs() < 1e-10);
        assert!((w[2] - 0.25).abs() < 1e-10);
        // Gauge: anchor velocity 0 keeps the mean node position.
        let disp: Vec<f64> = (0..3)
            .map(|i| sol.grid.nodes()[i] - grid.nodes()[i])
            .collect();
        assert!(mean(&disp).abs() < 1e-12);
    }

    #[test]
    fn anchor_velocity_sets_mean_displacement() {
        let grid = Grid1D::uniform(8, 2.0).unwrap();
        let rho = vec![1.0; 8];
        let tau = 0.1;
        let sol = solve_equidistribution(&grid, &rho, 0.3, tau, TOL, 1000).unwrap();
        let disp: Vec<f64> = (0..8)
            .map(|i| sol.grid.nodes()[i] - grid.nodes()[i])
            .collect();
        assert!((mean(&disp) - 0.03).abs() < 1e-13);
        let w = mesh_velocity(&grid, &sol.grid, tau);
        assert!((mean(&w) - 0.3).abs() < 1e-12);
    }

    #[test]
    fn monitor_rejects_nonpositive_values() {
        let grid = Grid1D::uniform(4, 1.0).unwrap();
        assert!(solve_equidistribution(&grid, &[1.0, 0.0, 1.0, 1.0], 0.0, 0.1, TOL, 100).is_err());
    }

    #[test]
    fn boost_shifts_monitor_nodes_but_not_values() {
        // u → u + ε with all nodes moved by the same offset leaves every
        // difference quotient unchanged up to roundoff.
        let grid = Grid1D::uniform(16, 2.0 * std::f64::consts::PI).unwrap();
        let u: Vec<f64> = grid.nodes().iter().map(|&x| 0.4 * x.sin()).collect();
        let h: Vec<f64> = grid.nodes().iter().map(|&x| 10.0 + 0.4 * x.cos()).collect();
        let state = State1D::new(u.clone(), h.clone()).unwrap();
        let spec = MonitorSpec::new(MonitorKind::ArcLengthUH, 0.8, 0.3);
        let rho = monitor_values(&grid, &state, &spec);

        let eps = 0.9;
        let shift = eps * 2.7;
        let gb = Grid1D::new(grid.nodes().iter().map(|&x| x + shift).collect(), grid.length())
            .unwrap();
        let sb = State1D::new(u.iter().map(|&w| w + eps).collect(), h).unwrap();
        let rho_b = monitor_values(&gb, &sb, &spec);
        for i in 0..16 {
            assert!((rho_b[i] - rho[i]).abs() <= 1e-12 * rho[i]);
        }
    }
}
