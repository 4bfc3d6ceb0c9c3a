//! Shared data model: periodic moving grids and collocated states.
//!
//! Grids store exactly one period of nodes; every wrap-around access goes
//! through the ghost-position helpers so that periodic stencils are
//! single-sourced. The 1D extension rule is `x[i+N] = x[i] + L`; in 2D the
//! x-coordinate gains `Lx` across the j-seam only and the y-coordinate gains
//! `Ly` across the k-seam only. Fields (u[, v], h) live at the same nodes
//! (collocated, Arakawa A-grid placement).

use crate::{Error, Result};

/// Reduces index `i` into `[0, n)` and counts the periodic wraps.
///
/// Returns `(i mod n, floor(i/n))`; the wrap count multiplies the domain
/// length when reconstructing ghost-node positions.
#[inline]
pub fn periodic_index(i: i64, n: usize) -> (usize, i64) {
    let n = n as i64;
    let r = i.rem_euclid(n);
    (r as usize, (i - r) / n)
}

/// One period of a moving 1D mesh on a domain of length `length`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    x: Vec<f64>,
    length: f64,
}

impl Grid1D {
    /// Builds a grid, rejecting non-monotone node sequences. Requires
    /// `n >= 3` (the smallest centered stencil) and a positive wrap spacing
    /// `x[0] + L - x[N-1]`.
    pub fn new(x: Vec<f64>, length: f64) -> Result<Self> {
        if x.len() < 3 {
            return Err(Error::Config(format!(
                "1D grid needs at least 3 nodes, got {}",
                x.len()
            )));
        }
        if !(length > 0.0) {
            return Err(Error::Config(format!("domain length must be > 0, got {length}")));
        }
        let g = Grid1D { x, length };
        match g.first_tangle() {
            Some(i) => Err(Error::Tangled { index: i, time: None }),
            None => Ok(g),
        }
    }

    /// Uniform grid x_i = i·L/N, i = 0..N-1.
    pub fn uniform(n: usize, length: f64) -> Result<Self> {
        let x = (0..n).map(|i| i as f64 * length / n as f64).collect();
        Grid1D::new(x, length)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.x.len()
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Node positions of the stored period.
    #[inline]
    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// Ghost-aware node position: `x[i mod N] + floor(i/N)·L`.
    #[inline]
    pub fn pos(&self, i: i64) -> f64 {
        let (r, w) = periodic_index(i, self.x.len());
        self.x[r] + w as f64 * self.length
    }

    /// Centered spacing x_{i+1} − x_{i−1} around node `i`.
    #[inline]
    pub fn centered_spacing(&self, i: i64) -> f64 {
        self.pos(i + 1) - self.pos(i - 1)
    }

    /// Smallest cell width, wrap cell included.
    pub fn min_spacing(&self) -> f64 {
        (0..self.x.len() as i64)
            .map(|i| self.pos(i + 1) - self.pos(i))
            .fold(f64::INFINITY, f64::min)
    }

    fn first_tangle(&self) -> Option<usize> {
        let n = self.x.len() as i64;
        (0..n).find(|&i| self.pos(i + 1) <= self.pos(i)).map(|i| i as usize)
    }
}

/// Reports the nodes `i` whose cell `[x_i, x_{i+1})` has nonpositive width
/// (wrap cell included). Empty report means the grid is valid.
pub fn validate_grid_1d(x: &[f64], length: f64) -> Vec<usize> {
    let n = x.len() as i64;
    let pos = |i: i64| {
        let (r, w) = periodic_index(i, x.len());
        x[r] + w as f64 * length
    };
    (0..n)
        .filter(|&i| pos(i + 1) <= pos(i))
        .map(|i| i as usize)
        .collect()
}

/// Collocated 1D fields (u, h) on the nodes of an associated [`Grid1D`].
#[derive(Debug, Clone, PartialEq)]
pub struct State1D {
    pub u: Vec<f64>,
    pub h: Vec<f64>,
}

impl State1D {
    /// Builds a state, rejecting nonpositive depths and mismatched lengths.
    pub fn new(u: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if u.len() != h.len() {
            return Err(Error::Config(format!(
                "state field lengths differ: u has {}, h has {}",
                u.len(),
                h.len()
            )));
        }
        if let Some(i) = h.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::NonPositiveDepth {
                index: i,
                value: h[i],
                time: None,
            });
        }
        Ok(State1D { u, h })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.u.len()
    }

    /// Periodic field access (fields carry no offsets across the seam).
    #[inline]
    pub fn u_at(&self, i: i64) -> f64 {
        self.u[periodic_index(i, self.u.len()).0]
    }

    #[inline]
    pub fn h_at(&self, i: i64) -> f64 {
        self.h[periodic_index(i, self.h.len()).0]
    }
}

/// One period of a moving, doubly periodic 2D mesh.
///
/// Nodes are indexed by computational coordinates (j, k) with
/// j = 0..Nx-1, k = 0..Ny-1, stored row-major in j (`idx = j*ny + k`).
/// `dxi`/`deta` are the computational steps Δξ, Δη.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    x: Vec<f64>,
    y: Vec<f64>,
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    pub dxi: f64,
    pub deta: f64,
}

impl Grid2D {
    pub fn new(
        x: Vec<f64>,
        y: Vec<f64>,
        nx: usize,
        ny: usize,
        lx: f64,
        ly: f64,
        dxi: f64,
        deta: f64,
    ) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::Config(format!(
                "2D grid needs at least 3x3 nodes, got {nx}x{ny}"
            )));
        }
        if x.len() != nx * ny || y.len() != nx * ny {
            return Err(Error::Config(format!(
                "2D grid arrays must have {} entries, got x: {}, y: {}",
                nx * ny,
                x.len(),
                y.len()
            )));
        }
        if !(lx > 0.0 && ly > 0.0 && dxi > 0.0 && deta > 0.0) {
            return Err(Error::Config(
                "2D grid lengths and computational steps must be > 0".into(),
            ));
        }
        let g = Grid2D { x, y, nx, ny, lx, ly, dxi, deta };
        match validate_grid_2d(&g).first() {
            Some(&idx) => Err(Error::Tangled { index: idx, time: None }),
            None => Ok(g),
        }
    }

    /// Uniform lattice x = j·Lx/Nx, y = k·Ly/Ny with Δξ = Δη = 1.
    pub fn uniform(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        let mut x = vec![0.0; nx * ny];
        let mut y = vec![0.0; nx * ny];
        for j in 0..nx {
            for k in 0..ny {
                x[j * ny + k] = j as f64 * lx / nx as f64;
                y[j * ny + k] = k as f64 * ly / ny as f64;
            }
        }
        Grid2D::new(x, y, nx, ny, lx, ly, 1.0, 1.0)
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn lx(&self) -> f64 {
        self.lx
    }

    #[inline]
    pub fn ly(&self) -> f64 {
        self.ly
    }

    #[inline]
    pub fn idx(&self, j: usize, k: usize) -> usize {
        j * self.ny + k
    }

    #[inline]
    pub fn xs(&self) -> &[f64] {
        &self.x
    }

    #[inline]
    pub fn ys(&self) -> &[f64] {
        &self.y
    }

    /// Ghost-aware x: gains Lx across the j-seam, unchanged across k.
    #[inline]
    pub fn x_at(&self, j: i64, k: i64) -> f64 {
        let (jj, wj) = periodic_index(j, self.nx);
        let (kk, _) = periodic_index(k, self.ny);
        self.x[jj * self.ny + kk] + wj as f64 * self.lx
    }

    /// Ghost-aware y: gains Ly across the k-seam, unchanged across j.
    #[inline]
    pub fn y_at(&self, j: i64, k: i64) -> f64 {
        let (jj, _) = periodic_index(j, self.nx);
        let (kk, wk) = periodic_index(k, self.ny);
        self.y[jj * self.ny + kk] + wk as f64 * self.ly
    }
}

/// Discrete Jacobian at node (j, k) from centered differences:
/// J = (x_ξ y_η − x_η y_ξ) with ghost-aware neighbors.
#[inline]
pub fn nodal_jacobian(g: &Grid2D, j: i64, k: i64) -> f64 {
    ((g.x_at(j + 1, k) - g.x_at(j - 1, k)) * (g.y_at(j, k + 1) - g.y_at(j, k - 1))
        - (g.x_at(j, k + 1) - g.x_at(j, k - 1)) * (g.y_at(j + 1, k) - g.y_at(j - 1, k)))
        / (4.0 * g.dxi * g.deta)
}

/// Reports flattened node indices with nonpositive Jacobian. Empty means valid.
pub fn validate_grid_2d(g: &Grid2D) -> Vec<usize> {
    let mut bad = Vec::new();
    for j in 0..g.nx {
        for k in 0..g.ny {
            if !(nodal_jacobian(g, j as i64, k as i64) > 0.0) {
                bad.push(g.idx(j, k));
            }
        }
    }
    bad
}

/// Collocated 2D fields (u, v, h), stored like [`Grid2D`] (`idx = j*ny + k`).
#[derive(Debug, Clone, PartialEq)]
pub struct State2D {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub h: Vec<f64>,
}

impl State2D {
    pub fn new(u: Vec<f64>, v: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if u.len() != h.len() || v.len() != h.len() {
            return Err(Error::Config(format!(
                "state field lengths differ: u {}, v {}, h {}",
                u.len(),
                v.len(),
                h.len()
            )));
        }
        if let Some(i) = h.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::NonPositiveDepth {
                index: i,
                value: h[i],
                time: None,
            });
        }
        Ok(State2D { u, v, h })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.h.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Time-step bookkeeping: current time and step size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSpec {
    pub t: f64,
    pub tau: f64,
}

impl StepSpec {
    pub fn new(t: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return Err(Error::Config(format!("time step must be > 0, got {tau}")));
        }
        Ok(StepSpec { t, tau })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_index_wraps_forward_and_backward() {
        assert_eq!(periodic_index(5, 5), (0, 1));
        assert_eq!(periodic_index(-1, 5), (4, -1));
        assert_eq!(periodic_index(7, 5), (2, 1));
        assert_eq!(periodic_index(3, 5), (3, 0));
    }

    #[test]
    fn ghost_positions_extend_periodically() {
        let g = Grid1D::new(vec![0.0, 2.0, 4.0], 6.0).unwrap();
        assert_eq!(g.pos(3), 6.0);
        assert_eq!(g.pos(-1), -2.0);
        assert_eq!(g.pos(1), 2.0);
    }

    #[test]
    fn ghost_position_shift_by_period_is_exact() {
        let g = Grid1D::new(vec![0.1, 1.7, 3.9, 5.2], 2.0 * std::f64::consts::PI).unwrap();
        for i in -9..9 {
            // One ulp of slack: x + (w+1)·L and x + w·L round independently.
            assert!((g.pos(i + 4) - g.pos(i) - g.length()).abs() < 1e-14);
        }
    }

    #[test]
    fn validate_flags_inverted_nodes() {
        assert!(validate_grid_1d(&[0.0, 1.0, 2.0], 6.0).is_empty());
        assert_eq!(validate_grid_1d(&[0.0, 2.0, 1.0], 6.0), vec![1]);
        assert!(Grid1D::new(vec![0.0, 2.0, 1.0], 6.0).is_err());
    }

    #[test]
    fn wrap_cell_must_stay_positive() {
        // x[N-1] beyond x[0]+L inverts the wrap cell.
        assert_eq!(validate_grid_1d(&[0.0, 1.0, 6.5], 6.0), vec![2]);
    }

    #[test]
    fn identity_2d_grid_is_valid_with_unit_jacobian() {
        let n = 8;
        let g = Grid2D::uniform(n, n, n as f64, n as f64).unwrap();
        assert!(validate_grid_2d(&g).is_empty());
        for j in 0..n {
            for k in 0..n {
                let jac = nodal_jacobian(&g, j as i64, k as i64);
                assert!((jac - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn seam_offsets_apply_per_direction() {
        let g = Grid2D::uniform(4, 5, 8.0, 10.0).unwrap();
        assert_eq!(g.x_at(4, 2) - g.x_at(0, 2), 8.0);
        assert_eq!(g.y_at(4, 2), g.y_at(0, 2));
        assert_eq!(g.y_at(1, 5) - g.y_at(1, 0), 10.0);
        assert_eq!(g.x_at(1, 5), g.x_at(1, 0));
        assert_eq!(g.x_at(-1, 2), g.x_at(3, 2) - 8.0);
    }

    #[test]
    fn depth_positivity_enforced() {
        assert!(State1D::new(vec![0.0; 3], vec![1.0, 0.0, 1.0]).is_err());
        assert!(State1D::new(vec![0.0; 3], vec![1.0; 3]).is_ok());
        assert!(StepSpec::new(0.0, 0.0).is_err());
    }
}
