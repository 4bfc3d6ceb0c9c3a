//! Finite symmetry-group actions, difference invariants, and the two-path
//! equivariance check.
//!
//! The 1D symmetry set is generated by time/space translations, the
//! Galilean boost t∂x + ∂u, and the two scalings t∂t + x∂x and
//! x∂x + u∂u + 2h∂h. In 2D only translations and the two boost components
//! survive the periodic channel setup; there are no scalings.
//!
//! A scheme "preserves" these symmetries when stepping commutes with the
//! group action; [`check_equivariance_1d`]/[`check_equivariance_2d`] measure
//! the discrepancy between the two orders of operations directly.

use crate::model::{Grid1D, Grid2D, State1D, State2D};
use crate::{Error, Result};

/// Finite element of the 1D symmetry group.
///
/// `a` is the exponent of the scaling t∂t + x∂x, `b` of x∂x + u∂u + 2h∂h;
/// the identity element is all zeros.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroupElement1D {
    pub dt: f64,
    pub dx: f64,
    pub eps: f64,
    pub a: f64,
    pub b: f64,
}

impl GroupElement1D {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn boost(eps: f64) -> Self {
        Self { eps, ..Self::default() }
    }

    pub fn shift(dt: f64, dx: f64) -> Self {
        Self { dt, dx, ..Self::default() }
    }

    pub fn scaling(a: f64, b: f64) -> Self {
        Self { a, b, ..Self::default() }
    }

    /// How a time step transforms: τ → e^a τ.
    #[inline]
    pub fn scale_tau(&self, tau: f64) -> f64 {
        self.a.exp() * tau
    }

    /// How a velocity-like quantity (u, mesh velocity) transforms.
    #[inline]
    pub fn transform_velocity(&self, w: f64) -> f64 {
        self.b.exp() * w + self.eps
    }
}

/// Finite element of the 2D symmetry group (shifts and boost components).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroupElement2D {
    pub dt: f64,
    pub dx: f64,
    pub dy: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl GroupElement2D {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn boost(eps1: f64, eps2: f64) -> Self {
        Self { eps1, eps2, ..Self::default() }
    }

    pub fn shift(dt: f64, dx: f64, dy: f64) -> Self {
        Self { dt, dx, dy, ..Self::default() }
    }
}

/// Applies a 1D group element to a time level.
///
/// Factor order is fixed: scaling-b, scaling-a, boost, space shift, time
/// shift. Concretely
///   x → e^{a+b} x + ε e^a t + δx,   t → e^a t + δt,
///   u → e^b u + ε,                  h → e^{2b} h,
/// and the domain length transforms as L → e^{a+b} L.
pub fn act_1d(
    g: &GroupElement1D,
    t: f64,
    grid: &Grid1D,
    state: &State1D,
) -> Result<(f64, Grid1D, State1D)> {
    let ea = g.a.exp();
    let eb = g.b.exp();
    let eab = (g.a + g.b).exp();
    let x_shift = g.eps * ea * t + g.dx;
    let x: Vec<f64> = grid.nodes().iter().map(|&xi| eab * xi + x_shift).collect();
    let u: Vec<f64> = state.u.iter().map(|&ui| eb * ui + g.eps).collect();
    let h: Vec<f64> = state.h.iter().map(|&hi| eb * eb * hi).collect();
    let new_grid = Grid1D::new(x, eab * grid.length())?;
    let new_state = State1D::new(u, h)?;
    Ok((ea * t + g.dt, new_grid, new_state))
}

/// Applies a 2D group element: x → x + ε₁t + δx, y → y + ε₂t + δy,
/// u → u + ε₁, v → v + ε₂, h unchanged, then t → t + δt.
pub fn act_2d(
    g: &GroupElement2D,
    t: f64,
    grid: &Grid2D,
    state: &State2D,
) -> Result<(f64, Grid2D, State2D)> {
    let x: Vec<f64> = grid.xs().iter().map(|&x| x + g.eps1 * t + g.dx).collect();
    let y: Vec<f64> = grid.ys().iter().map(|&y| y + g.eps2 * t + g.dy).collect();
    let u: Vec<f64> = state.u.iter().map(|&u| u + g.eps1).collect();
    let v: Vec<f64> = state.v.iter().map(|&v| v + g.eps2).collect();
    let new_grid = Grid2D::new(
        x,
        y,
        grid.nx(),
        grid.ny(),
        grid.lx(),
        grid.ly(),
        grid.dxi,
        grid.deta,
    )?;
    let new_state = State2D::new(u, v, state.h.clone())?;
    Ok((t + g.dt, new_grid, new_state))
}

/// The twelve difference invariants of the two-level, three-point stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantSet1D {
    pub i0: f64,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub i5: f64,
    pub i6: f64,
    pub i7: f64,
    pub i8: f64,
    pub i9: f64,
    pub i10: f64,
    pub i11: f64,
}

impl InvariantSet1D {
    pub fn as_array(&self) -> [f64; 12] {
        [
            self.i0, self.i1, self.i2, self.i3, self.i4, self.i5, self.i6, self.i7, self.i8,
            self.i9, self.i10, self.i11,
        ]
    }
}

/// Evaluates the difference invariants centered at node `i`, with
/// ẋ_i = (x̂_i − x_i)/τ:
///
///   I0 = (x_{i+1}−x_i)/(x_i−x_{i−1})
///   I1 = (ẋ_i−u_i)τ/Δx      I2 = (û_i−u_i)τ/Δx      I3 = (u_{i+1}−u_{i−1})τ/Δx
///   I4 = (u_{i+1}−u_i)τ/(x_{i+1}−x_i)
///   I5..I7 = h_{i−1}, h_i, h_{i+1} · τ²/Δx²          I8 = ĥ_i τ²/Δx²
///   I9 = (ẋ_i−û_i)τ/Δx      I10 = (û_{i+1}−û_{i−1})τ/Δx̂
///   I11 = (ĥ_{i+1}−ĥ_{i−1})τ²/(Δx·Δx̂)
///
/// with Δx = x_{i+1}−x_{i−1} and Δx̂ its hatted counterpart.
pub fn difference_invariants_1d(
    grid: &Grid1D,
    hat_grid: &Grid1D,
    state: &State1D,
    hat_state: &State1D,
    tau: f64,
    i: i64,
) -> Result<InvariantSet1D> {
    let dx = grid.centered_spacing(i);
    let dx_hat = hat_grid.centered_spacing(i);
    let dxl = grid.pos(i) - grid.pos(i - 1);
    let dxr = grid.pos(i + 1) - grid.pos(i);
    if dx == 0.0 || dxl == 0.0 || dxr == 0.0 || dx_hat == 0.0 {
        return Err(Error::DegenerateStencil {
            index: (i.rem_euclid(grid.n() as i64)) as usize,
        });
    }
    let xdot = (hat_grid.pos(i) - grid.pos(i)) / tau;
    let t2 = tau * tau;
    Ok(InvariantSet1D {
        i0: dxr / dxl,
        i1: (xdot - state.u_at(i)) * tau / dx,
        i2: (hat_state.u_at(i) - state.u_at(i)) * tau / dx,
        i3: (state.u_at(i + 1) - state.u_at(i - 1)) * tau / dx,
        i4: (state.u_at(i + 1) - state.u_at(i)) * tau / dxr,
        i5: state.h_at(i - 1) * t2 / (dx * dx),
        i6: state.h_at(i) * t2 / (dx * dx),
        i7: state.h_at(i + 1) * t2 / (dx * dx),
        i8: hat_state.h_at(i) * t2 / (dx * dx),
        i9: (xdot - hat_state.u_at(i)) * tau / dx,
        i10: (hat_state.u_at(i + 1) - hat_state.u_at(i - 1)) * tau / dx_hat,
        i11: (hat_state.h_at(i + 1) - hat_state.h_at(i - 1)) * t2 / (dx * dx_hat),
    })
}

/// Max over fields of |a − b| / (1 + |b|), the discrepancy norm used by the
/// equivariance checks.
fn field_discrepancy(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0, |m: f64, (&x, &y)| m.max((x - y).abs() / (1.0 + y.abs())))
}

fn discrepancy_1d(ga: &Grid1D, sa: &State1D, gb: &Grid1D, sb: &State1D) -> f64 {
    field_discrepancy(ga.nodes(), gb.nodes())
        .max(field_discrepancy(&sa.u, &sb.u))
        .max(field_discrepancy(&sa.h, &sb.h))
}

fn discrepancy_2d(ga: &Grid2D, sa: &State2D, gb: &Grid2D, sb: &State2D) -> f64 {
    field_discrepancy(ga.xs(), gb.xs())
        .max(field_discrepancy(ga.ys(), gb.ys()))
        .max(field_discrepancy(&sa.u, &sb.u))
        .max(field_discrepancy(&sa.v, &sb.v))
        .max(field_discrepancy(&sa.h, &sb.h))
}

/// Two-path equivariance check in 1D.
///
/// Path A transforms the input by `g` and advances `steps` steps of the
/// transformed step size e^a τ; path B advances first and transforms the
/// result with the group element's time slot evaluated at t + steps·τ.
/// Returns the max relative discrepancy over mesh and fields.
///
/// The step closure receives (t, grid, state, τ); schemes needing a mesh
/// velocity must derive it inside the closure from the (possibly
/// transformed) state, so that it transforms covariantly.
pub fn check_equivariance_1d<F>(
    step: F,
    g: &GroupElement1D,
    t: f64,
    grid: &Grid1D,
    state: &State1D,
    tau: f64,
    steps: usize,
) -> Result<f64>
where
    F: Fn(f64, &Grid1D, &State1D, f64) -> Result<(Grid1D, State1D)>,
{
    // Path A: act, then step.
    let tau_a = g.scale_tau(tau);
    let (mut ta, mut grid_a, mut state_a) = act_1d(g, t, grid, state)?;
    for _ in 0..steps {
        let (ng, ns) = step(ta, &grid_a, &state_a, tau_a)?;
        grid_a = ng;
        state_a = ns;
        ta += tau_a;
    }

    // Path B: step, then act at the advanced time.
    let mut tb = t;
    let mut grid_b = grid.clone();
    let mut state_b = state.clone();
    for _ in 0..steps {
        let (ng, ns) = step(tb, &grid_b, &state_b, tau)?;
        grid_b = ng;
        state_b = ns;
        tb += tau;
    }
    let (tb, grid_b, state_b) = act_1d(g, tb, &grid_b, &state_b)?;

    debug_assert!((ta - tb).abs() <= 1e-12 * (1.0 + tb.abs()));
    Ok(discrepancy_1d(&grid_a, &state_a, &grid_b, &state_b))
}

/// Two-path equivariance check in 2D (same contract as the 1D version;
/// s2 has no scalings, so τ is shared by both paths).
pub fn check_equivariance_2d<F>(
    step: F,
    g: &GroupElement2D,
    t: f64,
    grid: &Grid2D,
    state: &State2D,
    tau: f64,
    steps: usize,
) -> Result<f64>
where
    F: Fn(f64, &Grid2D, &State2D, f64) -> Result<(Grid2D, State2D)>,
{
    let (mut ta, mut grid_a, mut state_a) = act_2d(g, t, grid, state)?;
    for _ in 0..steps {
        let (ng, ns) = step(ta, &grid_a, &state_a, tau)?;
        grid_a = ng;
        state_a = ns;
        ta += tau;
    }

    let mut tb = t;
    let mut grid_b = grid.clone();
    let mut state_b = state.clone();
    for _ in 0..steps {
        let (ng, ns) = step(tb, &grid_b, &state_b, tau)?;
        grid_b = ng;
        state_b = ns;
        tb += tau;
    }
    let (tb, grid_b, state_b) = act_2d(g, tb, &grid_b, &state_b)?;

    debug_assert!((ta - tb).abs() <= 1e-12 * (1.0 + tb.abs()));
    Ok(discrepancy_2d(&grid_a, &state_a, &grid_b, &state_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> Grid1D {
        Grid1D::new(vec![0.0, 1.0, 2.0], 3.0).unwrap()
    }

    #[test]
    fn boost_moves_positions_by_eps_t_and_velocities_by_eps() {
        let g = GroupElement1D::boost(0.5);
        let state = State1D::new(vec![2.0, 2.0, 2.0], vec![4.0, 4.0, 4.0]).unwrap();
        let grid = Grid1D::new(vec![1.0, 2.0, 3.0], 6.0).unwrap();
        let (t, ng, ns) = act_1d(&g, 3.0, &grid, &state).unwrap();
        assert_eq!(t, 3.0);
        assert_eq!(ng.nodes()[0], 2.5); // x + εt = 1 + 1.5
        assert_eq!(ns.u[0], 2.5);
        assert_eq!(ns.h[0], 4.0);
    }

    #[test]
    fn scaling_b_scales_x_u_h_with_weights_1_1_2() {
        let g = GroupElement1D::scaling(0.0, (2.0f64).ln());
        let grid = Grid1D::new(vec![1.0, 2.0, 3.0], 6.0).unwrap();
        let state = State1D::new(vec![1.0; 3], vec![1.0; 3]).unwrap();
        let (_, ng, ns) = act_1d(&g, 0.0, &grid, &state).unwrap();
        assert!((ng.nodes()[0] - 2.0).abs() < 1e-15);
        assert!((ns.u[0] - 2.0).abs() < 1e-15);
        assert!((ns.h[0] - 4.0).abs() < 1e-15);
        assert!((ng.length() - 12.0).abs() < 1e-14);
    }

    #[test]
    fn identity_acts_bit_exactly() {
        let g = GroupElement1D::identity();
        let grid = Grid1D::new(vec![0.3, 1.1, 2.9], 5.0).unwrap();
        let state = State1D::new(vec![0.1, -0.4, 0.7], vec![2.0, 3.0, 4.0]).unwrap();
        let (t, ng, ns) = act_1d(&g, 1.25, &grid, &state).unwrap();
        assert_eq!(t, 1.25);
        assert_eq!(ng, grid);
        assert_eq!(ns, state);
    }

    #[test]
    fn act_2d_boosts_each_direction_independently() {
        let g = GroupElement2D::boost(1.0, 0.0);
        let grid = Grid2D::uniform(4, 4, 4.0, 4.0).unwrap();
        let state = State2D::new(vec![5.0; 16], vec![1.0; 16], vec![2.0; 16]).unwrap();
        let (_, ng, ns) = act_2d(&g, 2.0, &grid, &state).unwrap();
        assert_eq!(ng.xs()[0] - grid.xs()[0], 2.0); // ε1·t
        assert_eq!(ng.ys()[0], grid.ys()[0]);
        assert_eq!(ns.u[0], 6.0);
        assert_eq!(ns.v[0], 1.0);
        assert_eq!(ns.h[0], 2.0);
    }

    #[test]
    fn invariants_on_hand_stencil() {
        let grid = grid3();
        let state = State1D::new(vec![0.0; 3], vec![1.0, 2.0, 3.0]).unwrap();
        let inv =
            difference_invariants_1d(&grid, &grid, &state, &state, 0.1, 1).unwrap();
        assert_eq!(inv.i0, 1.0);
        assert_eq!(inv.i1, 0.0);
        assert_eq!(inv.i3, 0.0);
        assert!((inv.i6 - 0.005).abs() < 1e-16);
    }

    #[test]
    fn lagrangian_velocity_zeroes_i1() {
        // Uniform motion: x̂ = x + τc with u = c makes ẋ − u vanish.
        let c = 0.7;
        let tau = 0.05;
        let grid = grid3();
        let hat = Grid1D::new(
            grid.nodes().iter().map(|&x| x + tau * c).collect(),
            grid.length(),
        )
        .unwrap();
        let state = State1D::new(vec![c; 3], vec![1.0; 3]).unwrap();
        let inv = difference_invariants_1d(&grid, &hat, &state, &state, tau, 0).unwrap();
        // ẋ is reconstructed as (x̂−x)/τ, so ẋ−u only vanishes to roundoff.
        assert!(inv.i1.abs() < 1e-15);
        assert!(inv.i9.abs() < 1e-15);
    }

    #[test]
    fn invariants_unchanged_under_group_action() {
        // Defining property: every I_k matches after acting with any element.
        let grid = Grid1D::new(vec![0.0, 0.9, 2.2, 3.1, 4.7], 6.0).unwrap();
        let hat = Grid1D::new(vec![0.05, 1.0, 2.25, 3.2, 4.75], 6.0).unwrap();
        let state =
            State1D::new(vec![0.3, -0.2, 0.5, 0.1, -0.4], vec![1.0, 2.0, 1.5, 0.7, 1.2])
                .unwrap();
        let hat_state =
            State1D::new(vec![0.35, -0.1, 0.45, 0.2, -0.3], vec![1.1, 1.9, 1.6, 0.8, 1.1])
                .unwrap();
        let tau = 0.2;
        let t = 0.8;

        let g = GroupElement1D { dt: 0.37, dx: -1.3, eps: 0.45, a: 0.2, b: -0.3 };
        let (_, tg, ts) = act_1d(&g, t, &grid, &state).unwrap();
        // Hatted level lives at t + τ; τ itself scales by e^a.
        let (_, tgh, tsh) = act_1d(&g, t + tau, &hat, &hat_state).unwrap();
        let tau_t = g.scale_tau(tau);

        for i in 0..grid.n() as i64 {
            let a = difference_invariants_1d(&grid, &hat, &state, &hat_state, tau, i)
                .unwrap()
                .as_array();
            let b = difference_invariants_1d(&tg, &tgh, &ts, &tsh, tau_t, i)
                .unwrap()
                .as_array();
            for (p, q) in a.iter().zip(b.iter()) {
                assert!(
                    (p - q).abs() <= 1e-13 * (1.0 + q.abs()),
                    "invariant mismatch at node {i}: {p} vs {q}"
                );
            }
        }
    }

    #[test]
    fn shift_boost_composition_matches_combined_element() {
        // For a=b=0: applying g1 then g2 equals the single element
        // (δt1+δt2, δx1+δx2+ε2·δt1, ε1+ε2).
        let g1 = GroupElement1D { dt: 0.4, dx: 1.1, eps: -0.3, a: 0.0, b: 0.0 };
        let g2 = GroupElement1D { dt: -0.9, dx: 0.2, eps: 0.8, a: 0.0, b: 0.0 };
        let g12 = GroupElement1D {
            dt: g1.dt + g2.dt,
            dx: g1.dx + g2.dx + g2.eps * g1.dt,
            eps: g1.eps + g2.eps,
            a: 0.0,
            b: 0.0,
        };
        let grid = grid3();
        let state = State1D::new(vec![0.2, 0.4, -0.1], vec![1.0, 2.0, 3.0]).unwrap();
        let t = 0.6;
        let (t1, gg, ss) = act_1d(&g1, t, &grid, &state).unwrap();
        let (t2, gg, ss) = act_1d(&g2, t1, &gg, &ss).unwrap();
        let (t12, gg12, ss12) = act_1d(&g12, t, &grid, &state).unwrap();
        assert!((t2 - t12).abs() < 1e-15);
        for i in 0..3 {
            assert!((gg.nodes()[i] - gg12.nodes()[i]).abs() < 1e-14);
            assert!((ss.u[i] - ss12.u[i]).abs() < 1e-15);
            assert_eq!(ss.h[i], ss12.h[i]);
        }
    }

    #[test]
    fn equivariance_of_identity_map_is_zero() {
        let grid = grid3();
        let state = State1D::new(vec![0.1, 0.2, 0.3], vec![1.0, 2.0, 3.0]).unwrap();
        let g = GroupElement1D::identity();
        let d = check_equivariance_1d(
            |_, g1, s1, _| Ok((g1.clone(), s1.clone())),
            &g,
            0.0,
            &grid,
            &state,
            0.1,
            1,
        )
        .unwrap();
        assert_eq!(d, 0.0);
    }
}
