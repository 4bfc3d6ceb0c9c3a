//! Lagrangian finite-volume schemes on moving quadrilateral cells.
//!
//! Cell centers carry the unknowns (x0, y0, u0, v0, h0) and move with the
//! fluid; fluxes are evaluated on the cell polygon spanned by the four
//! corners, whose values are interpolated from the adjacent centers. The
//! divergence of a vector field f over one counterclockwise quad with area A
//! uses the Gauss–Ostrogradsky edge rule
//!
//!   ∇·f ≈ (1/2A) Σ_{i=1..4} [(f¹_i + f¹_{i+1})(y_{i+1} − y_i)
//!                            − (f²_i + f²_{i+1})(x_{i+1} − x_i)],
//!
//! which is exact for affine fields. The explicit step advances each center
//!
//!   x̂0 = x0 + τu0,   ŷ0 = y0 + τv0,
//!   ĥ0 = h0 − (τh0/2A) Σ[(u_i+u_{i+1})(y_{i+1}−y_i) − (v_i+v_{i+1})(x_{i+1}−x_i)],
//!   û0 = u0 − (τ/2A) Σ(h_i+h_{i+1})(y_{i+1}−y_i),
//!   v̂0 = v0 + (τ/2A) Σ(h_i+h_{i+1})(x_{i+1}−x_i),
//!
//! and the trapezoidal step averages the edge sums over both time levels
//! (with areas A and Â) while coupling the mesh motion ẋ0 = (u0+û0)/2.
//!
//! Corner positions are auxiliary: the corner between cells (j,k), (j+1,k),
//! (j+1,k+1), (j,k+1) sits at the centroid of those four centers and is
//! recomputed from the current center lattice whenever needed. Corner values
//! use Sibson natural-neighbor weights (the area the corner's inserted
//! Voronoi cell steals from each adjacent center's cell, normalized over the
//! four adjacent centers) or, optionally, plain ¼-averaging. Both choices
//! commute with shifts and Galilean boosts because they depend only on the
//! relative geometry of the centers.

use crate::model::{periodic_index, Grid2D, State2D};
use crate::{Error, Result};

/// Corner-value interpolation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpMode {
    /// Natural-neighbor (Sibson) area-stealing weights. Default.
    Sibson,
    /// Equal weights ¼ per adjacent center.
    Mean,
}

/// Sibson weights of one corner over its four adjacent cell centers,
/// ordered like the centers passed to [`corner_weights`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationWeights {
    pub w: [f64; 4],
}

/// Outcome of one 2D finite-volume step.
#[derive(Debug, Clone)]
pub struct Step2DResult {
    pub grid: Grid2D,
    pub state: State2D,
    pub iterations: usize,
    pub residual: f64,
}

#[inline]
fn shoelace4(p: &[(f64, f64); 4]) -> f64 {
    // ½ Σ (x_i y_{i+1} − x_{i+1} y_i) with cyclic wrap.
    0.5 * ((p[0].0 * p[1].1 - p[1].0 * p[0].1)
        + (p[1].0 * p[2].1 - p[2].0 * p[1].1)
        + (p[2].0 * p[3].1 - p[3].0 * p[2].1)
        + (p[3].0 * p[0].1 - p[0].0 * p[3].1))
}

/// Shoelace area of a counterclockwise quadrilateral.
pub fn polygon_area(corners: &[(f64, f64); 4]) -> Result<f64> {
    let a = shoelace4(corners);
    if a <= 0.0 {
        return Err(Error::Tangled { index: 0, time: None });
    }
    Ok(a)
}

/// Trapezoidal edge-rule sums over one counterclockwise quad:
/// the velocity-divergence sum Σ[(u_i+u_{i+1})Δy_i − (v_i+v_{i+1})Δx_i] and
/// the two pressure sums Σ(h_i+h_{i+1})Δy_i, Σ(h_i+h_{i+1})Δx_i.
pub fn cell_edge_sums(
    pos: &[(f64, f64); 4],
    u: &[f64; 4],
    v: &[f64; 4],
    h: &[f64; 4],
) -> (f64, f64, f64) {
    let mut div = 0.0;
    let mut hx = 0.0;
    let mut hy = 0.0;
    for i in 0..4 {
        let j = (i + 1) % 4;
        let dx = pos[j].0 - pos[i].0;
        let dy = pos[j].1 - pos[i].1;
        div += (u[i] + u[j]) * dy - (v[i] + v[j]) * dx;
        hx += (h[i] + h[j]) * dy;
        hy += (h[i] + h[j]) * dx;
    }
    (div, hx, hy)
}

// ---------------------------------------------------------------------------
// Half-plane clipping for Voronoi-cell areas.

/// Keeps the part of `poly` with n·p ≤ b (Sutherland–Hodgman), writing into
/// `out`.
fn clip_halfplane(poly: &[(f64, f64)], n: (f64, f64), b: f64, out: &mut Vec<(f64, f64)>) {
    out.clear();
    let m = poly.len();
    for i in 0..m {
        let p = poly[i];
        let q = poly[(i + 1) % m];
        let sp = n.0 * p.0 + n.1 * p.1 - b;
        let sq = n.0 * q.0 + n.1 * q.1 - b;
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0) != (sq < 0.0) {
            let t = sp / (sp - sq);
            out.push((p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1)));
        }
    }
}

fn poly_area(poly: &[(f64, f64)]) -> f64 {
    let m = poly.len();
    if m < 3 {
        return 0.0;
    }
    0.5 * (0..m)
        .map(|i| {
            let p = poly[i];
            let q = poly[(i + 1) % m];
            p.0 * q.1 - q.0 * p.1
        })
        .sum::<f64>()
}

#[inline]
fn dist2(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0) * (a.0 - b.0) + (a.1 - b.1) * (a.1 - b.1)
}

/// Clips `poly` (in place) to the Voronoi cell of `owner` against the
/// generators `gens[order]`, sorted by distance from `owner`. A generator
/// bit-equal to `owner` is skipped, as is every generator too far away to
/// cut the current polygon (its bisector lies beyond the polygon's radius
/// around the owner, so skipping is exact, not an approximation).
fn clip_to_cell(
    owner: (f64, f64),
    gens: &[(f64, f64)],
    order: &mut Vec<usize>,
    poly: &mut Vec<(f64, f64)>,
    scratch: &mut Vec<(f64, f64)>,
) {
    order.clear();
    order.extend(0..gens.len());
    order.sort_by(|&i, &j| {
        dist2(gens[i], owner)
            .partial_cmp(&dist2(gens[j], owner))
            .unwrap()
    });
    for &gi in order.iter() {
        let g = gens[gi];
        let d2 = dist2(g, owner);
        if d2 == 0.0 {
            continue; // the owner itself (or a coincident generator)
        }
        let maxr2 = poly.iter().map(|&p| dist2(p, owner)).fold(0.0, f64::max);
        if d2 >= 4.0 * maxr2 {
            break; // sorted ascending: no remaining bisector reaches the polygon
        }
        let n = (g.0 - owner.0, g.1 - owner.1);
        let b = 0.5 * (n.0 * (g.0 + owner.0) + n.1 * (g.1 + owner.1));
        clip_halfplane(poly, n, b, scratch);
        std::mem::swap(poly, scratch);
        if poly.len() < 3 {
            poly.clear();
            return;
        }
    }
}

/// Sibson weights of `corner` over its four adjacent cell `centers`.
///
/// The `neighborhood` must contain every generator whose Voronoi cell could
/// border the corner's inserted cell — in particular the four adjacent
/// centers themselves; on periodic lattices a 4×4 block of ghost-replicated
/// centers around the corner suffices. The weight of center κ is the area
/// the inserted corner cell steals from κ's original cell, normalized over
/// the four adjacent centers so the weights always form a partition of
/// unity.
pub fn corner_weights(
    centers: &[(f64, f64); 4],
    corner: (f64, f64),
    neighborhood: &[(f64, f64)],
) -> Result<InterpolationWeights> {
    let scale2 = centers.iter().map(|&c| dist2(c, corner)).fold(0.0, f64::max);
    if scale2 == 0.0 {
        return Err(Error::DegenerateStencil { index: 0 });
    }
    // Limit case: corner sitting on an adjacent center gets its value.
    for (k, &c) in centers.iter().enumerate() {
        if dist2(c, corner) <= 1e-24 * scale2 {
            let mut w = [0.0; 4];
            w[k] = 1.0;
            return Ok(InterpolationWeights { w });
        }
    }

    let r = 8.0 * scale2.sqrt();
    let bbox = [
        (corner.0 - r, corner.1 - r),
        (corner.0 + r, corner.1 - r),
        (corner.0 + r, corner.1 + r),
        (corner.0 - r, corner.1 + r),
    ];

    let mut order = Vec::with_capacity(neighborhood.len());
    let mut poly = Vec::with_capacity(16);
    let mut scratch = Vec::with_capacity(16);

    // Voronoi cell of the inserted corner in the augmented tessellation.
    poly.extend_from_slice(&bbox);
    clip_to_cell(corner, neighborhood, &mut order, &mut poly, &mut scratch);
    if poly
        .iter()
        .any(|&p| (p.0 - corner.0).abs() >= 0.99 * r || (p.1 - corner.1).abs() >= 0.99 * r)
    {
        return Err(Error::UnboundedCell { x: corner.0, y: corner.1 });
    }
    let corner_cell = poly.clone();

    // Overlap of the corner cell with each adjacent center's original cell.
    let mut overlap = [0.0; 4];
    for (k, &c) in centers.iter().enumerate() {
        poly.clear();
        poly.extend_from_slice(&corner_cell);
        clip_to_cell(c, neighborhood, &mut order, &mut poly, &mut scratch);
        overlap[k] = poly_area(&poly).max(0.0);
    }
    let total: f64 = overlap.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateStencil { index: 0 });
    }
    Ok(InterpolationWeights {
        w: [
            overlap[0] / total,
            overlap[1] / total,
            overlap[2] / total,
            overlap[3] / total,
        ],
    })
}

/// Corner lattice of a center lattice: entry (j,k) is the centroid of the
/// plaquette centers (j,k), (j+1,k), (j+1,k+1), (j,k+1) in ghost-aware
/// coordinates, i.e. the corner at computational position (j+½, k+½).
pub fn corner_positions(centers: &Grid2D) -> Result<Grid2D> {
    let (nx, ny) = (centers.nx(), centers.ny());
    let mut cx = vec![0.0; nx * ny];
    let mut cy = vec![0.0; nx * ny];
    for j in 0..nx as i64 {
        for k in 0..ny as i64 {
            let idx = (j as usize) * ny + k as usize;
            cx[idx] = 0.25
                * (centers.x_at(j, k)
                    + centers.x_at(j + 1, k)
                    + centers.x_at(j + 1, k + 1)
                    + centers.x_at(j, k + 1));
            cy[idx] = 0.25
                * (centers.y_at(j, k)
                    + centers.y_at(j + 1, k)
                    + centers.y_at(j + 1, k + 1)
                    + centers.y_at(j, k + 1));
        }
    }
    Grid2D::new(
        cx,
        cy,
        nx,
        ny,
        centers.lx(),
        centers.ly(),
        centers.dxi,
        centers.deta,
    )
}

/// Interpolates center values to the corner lattice. Corner (j,k) combines
/// the centers (j,k), (j+1,k), (j+1,k+1), (j,k+1) (counterclockwise), with
/// Sibson weights over a 4×4 ghost-replicated neighborhood block or equal
/// weights in [`InterpMode::Mean`].
pub fn interpolate_corners(
    centers: &Grid2D,
    state: &State2D,
    corners: &Grid2D,
    mode: InterpMode,
) -> Result<State2D> {
    let (nx, ny) = (centers.nx(), centers.ny());
    let mut u = vec![0.0; nx * ny];
    let mut v = vec![0.0; nx * ny];
    let mut h = vec![0.0; nx * ny];
    let mut neighborhood = Vec::with_capacity(16);
    for j in 0..nx as i64 {
        for k in 0..ny as i64 {
            let idx = (j as usize) * ny + k as usize;
            let w = match mode {
                InterpMode::Mean => [0.25; 4],
                InterpMode::Sibson => {
                    let corner = (corners.x_at(j, k), corners.y_at(j, k));
                    let adj = [
                        (centers.x_at(j, k), centers.y_at(j, k)),
                        (centers.x_at(j + 1, k), centers.y_at(j + 1, k)),
                        (centers.x_at(j + 1, k + 1), centers.y_at(j + 1, k + 1)),
                        (centers.x_at(j, k + 1), centers.y_at(j, k + 1)),
                    ];
                    neighborhood.clear();
                    for dj in -1..=2 {
                        for dk in -1..=2 {
                            neighborhood
                                .push((centers.x_at(j + dj, k + dk), centers.y_at(j + dj, k + dk)));
                        }
                    }
                    corner_weights(&adj, corner, &neighborhood)?.w
                }
            };
            // Field values are periodic without offsets.
            let f = |z: &[f64], dj: i64, dk: i64| {
                let (jj, _) = periodic_index(j + dj, nx);
                let (kk, _) = periodic_index(k + dk, ny);
                z[jj * ny + kk]
            };
            let stencil = [(0, 0), (1, 0), (1, 1), (0, 1)];
            u[idx] = stencil
                .iter()
                .zip(&w)
                .map(|(&(dj, dk), wk)| wk * f(&state.u, dj, dk))
                .sum();
            v[idx] = stencil
                .iter()
                .zip(&w)
                .map(|(&(dj, dk), wk)| wk * f(&state.v, dj, dk))
                .sum();
            h[idx] = stencil
                .iter()
                .zip(&w)
                .map(|(&(dj, dk), wk)| wk * f(&state.h, dj, dk))
                .sum();
        }
    }
    State2D::new(u, v, h)
}

/// Corner positions and values around cell (j,k), counterclockwise from the
/// lower-left: corner-lattice entries (j−1,k−1), (j,k−1), (j,k), (j−1,k).
fn cell_corners(
    corners: &Grid2D,
    values: &State2D,
    j: i64,
    k: i64,
) -> ([(f64, f64); 4], [f64; 4], [f64; 4], [f64; 4]) {
    let (nx, ny) = (corners.nx(), corners.ny());
    let ids = [(j - 1, k - 1), (j, k - 1), (j, k), (j - 1, k)];
    let mut pos = [(0.0, 0.0); 4];
    let mut u = [0.0; 4];
    let mut v = [0.0; 4];
    let mut h = [0.0; 4];
    for (m, &(cj, ck)) in ids.iter().enumerate() {
        pos[m] = (corners.x_at(cj, ck), corners.y_at(cj, ck));
        let (jj, _) = periodic_index(cj, nx);
        let (kk, _) = periodic_index(ck, ny);
        let idx = jj * ny + kk;
        u[m] = values.u[idx];
        v[m] = values.v[idx];
        h[m] = values.h[idx];
    }
    (pos, u, v, h)
}

/// Explicit Lagrangian finite-volume step.
pub fn step_fv_explicit(
    grid: &Grid2D,
    state: &State2D,
    tau: f64,
    mode: InterpMode,
) -> Result<Step2DResult> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let corners = corner_positions(grid)?;
    let cvals = interpolate_corners(grid, state, &corners, mode)?;
    let mut x = vec![0.0; nx * ny];
    let mut y = vec![0.0; nx * ny];
    let mut u = vec![0.0; nx * ny];
    let mut v = vec![0.0; nx * ny];
    let mut h = vec![0.0; nx * ny];
    for j in 0..nx as i64 {
        for k in 0..ny as i64 {
            let idx = (j as usize) * ny + k as usize;
            let (pos, cu, cv, ch) = cell_corners(&corners, &cvals, j, k);
            let area =
                polygon_area(&pos).map_err(|_| Error::Tangled { index: idx, time: None })?;
            let (div, hx, hy) = cell_edge_sums(&pos, &cu, &cv, &ch);
            x[idx] = grid.xs()[idx] + tau * state.u[idx];
            y[idx] = grid.ys()[idx] + tau * state.v[idx];
            let coef = tau / (2.0 * area);
            h[idx] = state.h[idx] - coef * state.h[idx] * div;
            u[idx] = state.u[idx] - coef * hx;
            v[idx] = state.v[idx] + coef * hy;
        }
    }
    let grid = Grid2D::new(x, y, nx, ny, grid.lx(), grid.ly(), grid.dxi, grid.deta)?;
    let state = State2D::new(u, v, h)?;
    Ok(Step2DResult { grid, state, iterations: 0, residual: 0.0 })
}

/// Trapezoidal Lagrangian finite-volume step: damped Picard iteration over
/// the coupled mesh/field system, edge sums averaged over both levels. The
/// depth update is always a pure assignment (diagonal isolated); damping
/// only blends positions and velocities. One undamped pass follows
/// convergence.
pub fn step_fv_trapezoidal(
    grid: &Grid2D,
    state: &State2D,
    tau: f64,
    mode: InterpMode,
    tol: f64,
    max_iter: usize,
) -> Result<Step2DResult> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let n = nx * ny;

    // Level-0 geometry and edge sums are fixed through the iteration.
    let corners0 = corner_positions(grid)?;
    let cvals0 = interpolate_corners(grid, state, &corners0, mode)?;
    let mut area0 = vec![0.0; n];
    let mut div0 = vec![0.0; n];
    let mut hx0 = vec![0.0; n];
    let mut hy0 = vec![0.0; n];
    for j in 0..nx as i64 {
        for k in 0..ny as i64 {
            let idx = (j as usize) * ny + k as usize;
            let (pos, cu, cv, ch) = cell_corners(&corners0, &cvals0, j, k);
            area0[idx] =
                polygon_area(&pos).map_err(|_| Error::Tangled { index: idx, time: None })?;
            let (div, hx, hy) = cell_edge_sums(&pos, &cu, &cv, &ch);
            div0[idx] = div;
            hx0[idx] = hx;
            hy0[idx] = hy;
        }
    }

    let mut cur_x = grid.xs().to_vec();
    let mut cur_y = grid.ys().to_vec();
    let mut cur_u = state.u.clone();
    let mut cur_v = state.v.clone();
    let mut cur_h = state.h.clone();

    let sweep = |cx: &[f64],
                 cy: &[f64],
                 cu: &[f64],
                 cv: &[f64],
                 ch: &[f64]|
     -> Result<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
        let _ = (cx, cy);
        let mut x = vec![0.0; n];
        let mut y = vec![0.0; n];
        for i in 0..n {
            x[i] = grid.xs()[i] + 0.5 * tau * (state.u[i] + cu[i]);
            y[i] = grid.ys()[i] + 0.5 * tau * (state.v[i] + cv[i]);
        }
        let hat_grid = Grid2D::new(x, y, nx, ny, grid.lx(), grid.ly(), grid.dxi, grid.deta)?;
        let hat_state = State2D::new(cu.to_vec(), cv.to_vec(), ch.to_vec())?;
        let hat_corners = corner_positions(&hat_grid)?;
        let hat_cvals = interpolate_corners(&hat_grid, &hat_state, &hat_corners, mode)?;
        let mut u = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut h = vec![0.0; n];
        for j in 0..nx as i64 {
            for k in 0..ny as i64 {
                let idx = (j as usize) * ny + k as usize;
                let (pos, hu, hv, hh) = cell_corners(&hat_corners, &hat_cvals, j, k);
                let hat_area =
                    polygon_area(&pos).map_err(|_| Error::Tangled { index: idx, time: None })?;
                let (divh, hxh, hyh) = cell_edge_sums(&pos, &hu, &hv, &hh);
                let c0 = tau / (4.0 * area0[idx]);
                let c1 = tau / (4.0 * hat_area);
                // ĥ(1 + c1·divĥ) = h(1 − c0·div) isolates the diagonal.
                let hn = state.h[idx] * (1.0 - c0 * div0[idx]) / (1.0 + c1 * divh);
                if hn <= 0.0 {
                    return Err(Error::NonPositiveDepth { index: idx, value: hn, time: None });
                }
                h[idx] = hn;
                u[idx] = state.u[idx] - c0 * hx0[idx] - c1 * hxh;
                v[idx] = state.v[idx] + c0 * hy0[idx] + c1 * hyh;
            }
        }
        let (x, y) = (hat_grid.xs().to_vec(), hat_grid.ys().to_vec());
        Ok((x, y, u, v, h))
    };

    let mut omega = 1.0;
    let mut prev_inc = f64::INFINITY;
    for iter in 1..=max_iter {
        let (nx_, ny_, nu, nv, nh) = sweep(&cur_x, &cur_y, &cur_u, &cur_v, &cur_h)?;
        let mut inc = 0.0f64;
        for i in 0..n {
            inc = inc.max((nx_[i] - cur_x[i]).abs());
            inc = inc.max((ny_[i] - cur_y[i]).abs());
            inc = inc.max((nu[i] - cur_u[i]).abs());
            inc = inc.max((nv[i] - cur_v[i]).abs());
            inc = inc.max((nh[i] - cur_h[i]).abs());
        }
        if inc > prev_inc {
            omega = 0.5;
        }
        prev_inc = inc;
        if omega == 1.0 {
            cur_x = nx_;
            cur_y = ny_;
            cur_u = nu;
            cur_v = nv;
        } else {
            for i in 0..n {
                cur_x[i] += omega * (nx_[i] - cur_x[i]);
                cur_y[i] += omega * (ny_[i] - cur_y[i]);
                cur_u[i] += omega * (nu[i] - cur_u[i]);
                cur_v[i] += omega * (nv[i] - cur_v[i]);
            }
        }
        cur_h = nh;
        if inc <= tol {
            let (fx, fy, fu, fv, fh) = sweep(&cur_x, &cur_y, &cur_u, &cur_v, &cur_h)?;
            let grid = Grid2D::new(fx, fy, nx, ny, grid.lx(), grid.ly(), grid.dxi, grid.deta)?;
            let state = State2D::new(fu, fv, fh)?;
            return Ok(Step2DResult { grid, state, iterations: iter + 1, residual: inc });
        }
    }
    Err(Error::NoConvergence {
        solver: "finite-volume trapezoidal Picard",
        residual: prev_inc,
        iterations: max_iter,
        time: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;
    const MAX_ITER: usize = 200;

    #[test]
    fn shoelace_areas() {
        let unit = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        assert_eq!(polygon_area(&unit).unwrap(), 1.0);
        let scaled = [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0)];
        assert_eq!(polygon_area(&scaled).unwrap(), 4.0);
        // Sheared quad by hand: ½[(0·0−2·0) + (2·2−3·0) + (3·2−1·2) + (1·0−0·2)] = 4.
        let quad = [(0.0, 0.0), (2.0, 0.0), (3.0, 2.0), (1.0, 2.0)];
        assert_eq!(polygon_area(&quad).unwrap(), 4.0);
        // Clockwise ordering is a tangled cell.
        let cw = [(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)];
        assert!(polygon_area(&cw).is_err());
    }

    fn unit_block() -> Vec<(f64, f64)> {
        let mut nb = Vec::new();
        for dj in -1..=2 {
            for dk in -1..=2 {
                nb.push((dj as f64, dk as f64));
            }
        }
        nb
    }

    #[test]
    fn plaquette_centroid_weights_are_equal() {
        let adj = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let w = corner_weights(&adj, (0.5, 0.5), &unit_block()).unwrap().w;
        for k in 0..4 {
            assert!((w[k] - 0.25).abs() < 1e-12, "w[{k}] = {}", w[k]);
        }
    }

    #[test]
    fn corner_on_center_is_one_hot() {
        let adj = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let w = corner_weights(&adj, (1.0, 0.0), &unit_block()).unwrap().w;
        assert_eq!(w, [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn edge_midpoint_weights_pair_up() {
        let adj = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let w = corner_weights(&adj, (0.5, 0.0), &unit_block()).unwrap().w;
        assert!((w[0] - w[1]).abs() < 1e-12, "near pair differs: {w:?}");
        assert!((w[2] - w[3]).abs() < 1e-12, "far pair differs: {w:?}");
        assert!(w[0] > w[2], "near centers must dominate: {w:?}");
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weights_translate_with_the_configuration() {
        let adj = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let corner = (0.62, 0.41);
        let w0 = corner_weights(&adj, corner, &unit_block()).unwrap().w;
        let (sx, sy) = (3.75, -1.25);
        let adj_s = adj.map(|(x, y)| (x + sx, y + sy));
        let nb_s: Vec<_> = unit_block().iter().map(|&(x, y)| (x + sx, y + sy)).collect();
        let w1 = corner_weights(&adj_s, (corner.0 + sx, corner.1 + sy), &nb_s)
            .unwrap()
            .w;
        for k in 0..4 {
            assert!((w0[k] - w1[k]).abs() < 1e-12);
        }
        assert!((w0.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn corner_outside_the_generator_hull_is_unbounded() {
        let adj = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        // All generators above the corner: nothing bounds its cell below.
        let err = corner_weights(&adj, (0.5, -0.3), &adj.to_vec());
        assert!(matches!(err, Err(Error::UnboundedCell { .. })));
    }

    #[test]
    fn edge_rule_divergence_is_exact_for_affine_fields() {
        // u = 0.3 + 1.7x − 0.4y, v = −0.1 + 0.6x + 2.2y on a sheared quad:
        // divergence 1.7 + 2.2 = 3.9 independent of the cell shape.
        let pos = [(0.1, -0.2), (2.3, 0.3), (2.9, 2.2), (-0.4, 1.9)];
        let fu = |x: f64, y: f64| 0.3 + 1.7 * x - 0.4 * y;
        let fv = |x: f64, y: f64| -0.1 + 0.6 * x + 2.2 * y;
        let u = pos.map(|(x, y)| fu(x, y));
        let v = pos.map(|(x, y)| fv(x, y));
        let h = [0.0; 4];
        let a = polygon_area(&pos).unwrap();
        let (div, _, _) = cell_edge_sums(&pos, &u, &v, &h);
        assert!((div / (2.0 * a) - 3.9).abs() < 1e-12);
    }

    #[test]
    fn pressure_edge_sum_recovers_linear_gradient() {
        // h = h0 + γx on the unit square: û0 − u0 = −τ/(2A)·Σ(h_i+h_{i+1})Δy = −τγ.
        let pos = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let (h0, gamma) = (10.0, 0.7);
        let h = pos.map(|(x, _)| h0 + gamma * x);
        let (_, hx, hy) = cell_edge_sums(&pos, &[0.0; 4], &[0.0; 4], &h);
        let tau = 0.01;
        assert!((-tau / 2.0 * hx - (-tau * gamma)).abs() < 1e-12);
        assert!(hy.abs() < 1e-12);
    }

    #[test]
    fn corner_lattice_sits_between_centers() {
        let g = Grid2D::uniform(4, 4, 4.0, 4.0).unwrap();
        let c = corner_positions(&g).unwrap();
        assert!((c.x_at(0, 0) - 0.5).abs() < 1e-15);
        assert!((c.y_at(0, 0) - 0.5).abs() < 1e-15);
        // Seam corner averages ghost centers at x = 3 and x = 4.
        assert!((c.x_at(3, 3) - 3.5).abs() < 1e-15);
        assert!((c.y_at(3, 3) - 3.5).abs() < 1e-15);
    }

    #[test]
    fn interpolation_has_linear_precision_away_from_the_seam() {
        let g = Grid2D::uniform(5, 5, 5.0, 5.0).unwrap();
        let n = 25;
        // u = x as a nodal field (non-periodic, but corner (1,1) sees no seam).
        let u: Vec<f64> = g.xs().to_vec();
        let v: Vec<f64> = g.ys().to_vec();
        let state = State2D::new(u, v, vec![1.0; n]).unwrap();
        let corners = corner_positions(&g).unwrap();
        let vals = interpolate_corners(&g, &state, &corners, InterpMode::Sibson).unwrap();
        let idx = g.idx(1, 1);
        assert!((vals.u[idx] - corners.x_at(1, 1)).abs() < 1e-12);
        assert!((vals.v[idx] - corners.y_at(1, 1)).abs() < 1e-12);
        assert!((vals.h[idx] - 1.0).abs() < 1e-14);
    }

    fn wave_case(n: usize) -> (Grid2D, State2D) {
        let grid = Grid2D::uniform(n, n, 2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI)
            .unwrap();
        let phi = std::f64::consts::PI / 6.0;
        let mut u = vec![0.0; n * n];
        let mut v = vec![0.0; n * n];
        let mut h = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                let idx = j * n + k;
                let (x, y) = (grid.xs()[idx], grid.ys()[idx]);
                u[idx] = 0.4 * (x + phi).sin() * y.sin();
                v[idx] = 0.4 * x.sin() * y.sin();
                h[idx] = 10.0 + 0.4 * (x + phi).cos() * y.cos();
            }
        }
        (grid, State2D::new(u, v, h).unwrap())
    }

    #[test]
    fn constant_state_translates_both_steps() {
        let g = Grid2D::uniform(5, 4, 5.0, 4.0).unwrap();
        let n = 20;
        let (c, d, h0) = (0.3, -0.2, 2.0);
        let state = State2D::new(vec![c; n], vec![d; n], vec![h0; n]).unwrap();
        let tau = 0.05;
        for mode in [InterpMode::Mean, InterpMode::Sibson] {
            let ex = step_fv_explicit(&g, &state, tau, mode).unwrap();
            for i in 0..n {
                assert!((ex.grid.xs()[i] - (g.xs()[i] + tau * c)).abs() < 1e-15);
                assert!((ex.grid.ys()[i] - (g.ys()[i] + tau * d)).abs() < 1e-15);
                assert!((ex.state.u[i] - c).abs() < 1e-14);
                assert!((ex.state.v[i] - d).abs() < 1e-14);
                assert!((ex.state.h[i] - h0).abs() < 1e-13);
            }
            let tr = step_fv_trapezoidal(&g, &state, tau, mode, TOL, MAX_ITER).unwrap();
            assert!(tr.iterations <= 3, "iterations {}", tr.iterations);
            for i in 0..n {
                assert!((tr.grid.xs()[i] - (g.xs()[i] + tau * c)).abs() < 1e-13);
                assert!((tr.state.h[i] - h0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn trapezoidal_matches_explicit_to_second_order() {
        let (grid, state) = wave_case(17);
        let tau = 0.002;
        let ex = step_fv_explicit(&grid, &state, tau, InterpMode::Mean).unwrap();
        let tr = step_fv_trapezoidal(&grid, &state, tau, InterpMode::Mean, TOL, MAX_ITER).unwrap();
        let mut diff = 0.0f64;
        for i in 0..17 * 17 {
            diff = diff.max((ex.state.u[i] - tr.state.u[i]).abs());
            diff = diff.max((ex.state.v[i] - tr.state.v[i]).abs());
            diff = diff.max((ex.state.h[i] - tr.state.h[i]).abs());
        }
        assert!(diff > 0.0 && diff < 1e-4, "gap {diff}");
    }
}
