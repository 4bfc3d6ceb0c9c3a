//! Conserved-quantity diagnostics on moving meshes.
//!
//! Midpoint-type quadratures weighted by the local mesh measure:
//!
//! 1D (centered cell width x_{i+1} − x_{i−1}):
//!   M = ½ Σ h_i Δx_i,
//!   P = ½ Σ h_i u_i Δx_i,
//!   H = ¼ Σ (h_i u_i² + h_i²) Δx_i;
//!
//! 2D (nodal Jacobian measure):
//!   M  = ΔξΔη Σ h J,      Px = ΔξΔη Σ h u J,     Py = ΔξΔη Σ h v J,
//!   H  = ½ ΔξΔη Σ (h(u² + v²) + h²) J.
//!
//! Under a Galilean boost u → u + ε the quadratures obey
//! M̃ = M, P̃ = P + εM, H̃ = H + εP + ½ε²M (and the per-direction 2D
//! analogs), which the invariance suite checks directly. Sums are pairwise
//! for run-to-run determinism and low roundoff.

use crate::model::{nodal_jacobian, Grid1D, Grid2D, State1D, State2D};
use crate::numerics::pairwise_sum;

/// Mass, momentum, and energy of a 1D state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved1D {
    pub m: f64,
    pub p: f64,
    pub h: f64,
}

/// Mass, both momenta, and energy of a 2D state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conserved2D {
    pub m: f64,
    pub px: f64,
    pub py: f64,
    pub h: f64,
}

/// Evaluates the 1D conserved quadratures.
pub fn conserved_1d(grid: &Grid1D, state: &State1D) -> Conserved1D {
    let n = grid.n();
    let mut wm = vec![0.0; n];
    let mut wp = vec![0.0; n];
    let mut wh = vec![0.0; n];
    for i in 0..n as i64 {
        let dd = grid.centered_spacing(i);
        let ii = i as usize;
        let (u, h) = (state.u[ii], state.h[ii]);
        wm[ii] = h * dd;
        wp[ii] = h * u * dd;
        wh[ii] = (h * u * u + h * h) * dd;
    }
    Conserved1D {
        m: 0.5 * pairwise_sum(&wm),
        p: 0.5 * pairwise_sum(&wp),
        h: 0.25 * pairwise_sum(&wh),
    }
}

/// Evaluates the 2D conserved quadratures with the centered nodal Jacobian
/// as mesh measure.
pub fn conserved_2d(grid: &Grid2D, state: &State2D, dxi: f64, deta: f64) -> Conserved2D {
    let (nx, ny) = (grid.nx(), grid.ny());
    let n = nx * ny;
    let mut wm = vec![0.0; n];
    let mut wpx = vec![0.0; n];
    let mut wpy = vec![0.0; n];
    let mut wh = vec![0.0; n];
    for j in 0..nx {
        for k in 0..ny {
            let idx = grid.idx(j, k);
            let jac = nodal_jacobian(grid, j as i64, k as i64);
            let (u, v, h) = (state.u[idx], state.v[idx], state.h[idx]);
            wm[idx] = h * jac;
            wpx[idx] = h * u * jac;
            wpy[idx] = h * v * jac;
            wh[idx] = (h * (u * u + v * v) + h * h) * jac;
        }
    }
    let scale = dxi * deta;
    Conserved2D {
        m: scale * pairwise_sum(&wm),
        px: scale * pairwise_sum(&wpx),
        py: scale * pairwise_sum(&wpy),
        h: 0.5 * scale * pairwise_sum(&wh),
    }
}

/// Relative change against the initial value, floored at magnitude one so
/// that quantities starting at (numerically) zero still produce a bounded,
/// meaningful series: (x − x₀)/max(|x₀|, 1).
#[inline]
pub fn relative_change(x: f64, x0: f64) -> f64 {
    (x - x0) / x0.abs().max(1.0)
}

/// One row of a 1D conservation time series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesRow1D {
    pub t: f64,
    pub c: Conserved1D,
    pub rel_m: f64,
    pub rel_p: f64,
    pub rel_h: f64,
}

/// One row of a 2D conservation time series.
#[derive(Debug, Clone, Copy)]
pub struct SeriesRow2D {
    pub t: f64,
    pub c: Conserved2D,
    pub rel_m: f64,
    pub rel_px: f64,
    pub rel_py: f64,
    pub rel_h: f64,
}

/// Turns sampled conserved quantities into a relative-change series against
/// the first sample.
pub fn record_series_1d(samples: &[(f64, Conserved1D)]) -> Vec<SeriesRow1D> {
    let first = match samples.first() {
        Some(&(_, c)) => c,
        None => return Vec::new(),
    };
    samples
        .iter()
        .map(|&(t, c)| SeriesRow1D {
            t,
            c,
            rel_m: relative_change(c.m, first.m),
            rel_p: relative_change(c.p, first.p),
            rel_h: relative_change(c.h, first.h),
        })
        .collect()
}

/// 2D counterpart of [`record_series_1d`].
pub fn record_series_2d(samples: &[(f64, Conserved2D)]) -> Vec<SeriesRow2D> {
    let first = match samples.first() {
        Some(&(_, c)) => c,
        None => return Vec::new(),
    };
    samples
        .iter()
        .map(|&(t, c)| SeriesRow2D {
            t,
            c,
            rel_m: relative_change(c.m, first.m),
            rel_px: relative_change(c.px, first.px),
            rel_py: relative_change(c.py, first.py),
            rel_h: relative_change(c.h, first.h),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Grid1D, State1D};

    #[test]
    fn hand_quadrature_on_uniform_grid() {
        // N = 4, L = 4: every centered width is 2.
        let grid = Grid1D::uniform(4, 4.0).unwrap();
        let state = State1D::new(vec![1.0; 4], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let c = conserved_1d(&grid, &state);
        // M = ½·(1+2+3+4)·2 = 10, P = 10, H = ¼·(Σh + Σh²)·2 = ½(10+30) = 20.
        assert!((c.m - 10.0).abs() < 1e-14);
        assert!((c.p - 10.0).abs() < 1e-14);
        assert!((c.h - 20.0).abs() < 1e-14);
    }

    #[test]
    fn boost_identities_1d() {
        let grid = Grid1D::uniform(17, 2.0 * std::f64::consts::PI).unwrap();
        let u: Vec<f64> = grid.nodes().iter().map(|&x| 0.4 * x.sin()).collect();
        let h: Vec<f64> = grid.nodes().iter().map(|&x| 10.0 + 0.3 * x.cos()).collect();
        let state = State1D::new(u.clone(), h.clone()).unwrap();
        let c = conserved_1d(&grid, &state);

        let eps = 0.7;
        let t = 1.3;
        let xb: Vec<f64> = grid.nodes().iter().map(|&x| x + eps * t).collect();
        let gb = Grid1D::new(xb, grid.length()).unwrap();
        let sb = State1D::new(u.iter().map(|&w| w + eps).collect(), h).unwrap();
        let cb = conserved_1d(&gb, &sb);

        assert!((cb.m - c.m).abs() <= 1e-13 * c.m.abs());
        assert!((cb.p - (c.p + eps * c.m)).abs() <= 1e-13 * (1.0 + c.p.abs() + eps * c.m.abs()));
        let expect_h = c.h + eps * c.p + 0.5 * eps * eps * c.m;
        assert!((cb.h - expect_h).abs() <= 1e-13 * expect_h.abs());
    }

    #[test]
    fn relative_change_floors_small_references() {
        assert_eq!(relative_change(3.0, 2.0), 0.5);
        // A reference that is numerically zero must not blow up the series.
        assert_eq!(relative_change(1e-12, 0.0), 1e-12);
        assert_eq!(relative_change(5.0, -10.0), 1.5);
    }

    #[test]
    fn series_is_relative_to_first_sample() {
        let c0 = Conserved1D { m: 2.0, p: 0.0, h: 8.0 };
        let c1 = Conserved1D { m: 2.0, p: 0.5, h: 8.2 };
        let rows = record_series_1d(&[(0.0, c0), (1.0, c1)]);
        assert_eq!(rows[0].rel_m, 0.0);
        assert!((rows[1].rel_p - 0.5).abs() < 1e-15);
        assert!((rows[1].rel_h - 0.2 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_lattice_mass_is_cell_area_weighted_sum() {
        let grid = crate::model::Grid2D::uniform(6, 5, 3.0, 2.5).unwrap();
        let n = 30;
        let h: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let state = State2D::new(vec![0.0; n], vec![0.0; n], h.clone()).unwrap();
        let c = conserved_2d(&grid, &state, grid.dxi, grid.deta);
        let cell = (3.0 / 6.0) * (2.5 / 5.0);
        let expect: f64 = h.iter().sum::<f64>() * cell;
        assert!((c.m - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn boost_identities_2d() {
        let grid = crate::model::Grid2D::uniform(9, 8, 6.0, 5.0).unwrap();
        let n = 72;
        let u: Vec<f64> = (0..n).map(|i| (0.13 * i as f64).sin()).collect();
        let v: Vec<f64> = (0..n).map(|i| (0.29 * i as f64).cos()).collect();
        let h: Vec<f64> = (0..n).map(|i| 4.0 + (0.07 * i as f64).sin()).collect();
        let state = State2D::new(u.clone(), v.clone(), h.clone()).unwrap();
        let c = conserved_2d(&grid, &state, 1.0, 1.0);

        let (e1, e2, t) = (0.4, -0.9, 0.6);
        let xb: Vec<f64> = grid.xs().iter().map(|&x| x + e1 * t).collect();
        let yb: Vec<f64> = grid.ys().iter().map(|&y| y + e2 * t).collect();
        let gb = crate::model::Grid2D::new(xb, yb, 9, 8, 6.0, 5.0, 1.0, 1.0).unwrap();
        let sb = State2D::new(
            u.iter().map(|&w| w + e1).collect(),
            v.iter().map(|&w| w + e2).collect(),
            h,
        )
        .unwrap();
        let cb = conserved_2d(&gb, &sb, 1.0, 1.0);

        assert!((cb.m - c.m).abs() <= 1e-13 * c.m.abs());
        assert!((cb.px - (c.px + e1 * c.m)).abs() <= 1e-12 * (1.0 + c.m.abs()));
        assert!((cb.py - (c.py + e2 * c.m)).abs() <= 1e-12 * (1.0 + c.m.abs()));
        let expect_h = c.h + e1 * c.px + e2 * c.py + 0.5 * (e1 * e1 + e2 * e2) * c.m;
        assert!((cb.h - expect_h).abs() <= 1e-12 * expect_h.abs());
    }
}
