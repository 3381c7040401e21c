use crate::error::{Error, Result};
use crate::field::ScalarField2;
use crate::jet::Jet2;

use super::Grid;

/// Piecewise bicubic Hermite interpolant of gridded samples.
///
/// Nodal slopes come from second-order finite differences (centred inside,
/// one-sided on the edges), so the interpolant is C¹ and reproduces
/// quadratics exactly.
#[derive(Debug, Clone)]
pub struct BicubicField {
    grid: Grid,
    f: Vec<f64>,
    fu: Vec<f64>,
    fv: Vec<f64>,
    fuv: Vec<f64>,
}

/// Second-order derivative estimate along a line of samples with spacing `h`.
fn derivative_along(samples: &[f64], h: f64) -> Vec<f64> {
    let n = samples.len();
    (0..n)
        .map(|k| {
            if k == 0 {
                (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h)
            } else if k == n - 1 {
                (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * h)
            } else {
                (samples[k + 1] - samples[k - 1]) / (2.0 * h)
            }
        })
        .collect()
}

impl BicubicField {
    /// `values[i * n_v + j]` is the sample at node `(i, j)`.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        let (nu, nv) = (grid.n_u, grid.n_v);
        if nu < 3 || nv < 3 || values.len() != nu * nv {
            return Err(Error::invalid(format!(
                "bicubic interpolation needs a grid of at least 3x3 with matching samples, got {nu}x{nv} and {} values",
                values.len()
            )));
        }
        let (hu, hv) = grid.spacing();
        let diff_u = |data: &[f64]| {
            let mut out = vec![0.0; nu * nv];
            for j in 0..nv {
                let line: Vec<f64> = (0..nu).map(|i| data[i * nv + j]).collect();
                for (i, d) in derivative_along(&line, hu).into_iter().enumerate() {
                    out[i * nv + j] = d;
                }
            }
            out
        };
        let diff_v = |data: &[f64]| {
            let mut out = vec![0.0; nu * nv];
            for i in 0..nu {
                let d = derivative_along(&data[i * nv..(i + 1) * nv], hv);
                out[i * nv..(i + 1) * nv].copy_from_slice(&d);
            }
            out
        };
        let fu = diff_u(&values);
        let fv = diff_v(&values);
        let fuv = diff_v(&fu);
        Ok(BicubicField {
            grid,
            f: values,
            fu,
            fv,
            fuv,
        })
    }
}

/// Hermite basis on [0, 1]: values, first and second derivatives of
/// `(h00, h10, h01, h11)`.
fn hermite(t: f64) -> [[f64; 4]; 3] {
    let (t2, t3) = (t * t, t * t * t);
    [
        [
            2.0 * t3 - 3.0 * t2 + 1.0,
            t3 - 2.0 * t2 + t,
            -2.0 * t3 + 3.0 * t2,
            t3 - t2,
        ],
        [
            6.0 * t2 - 6.0 * t,
            3.0 * t2 - 4.0 * t + 1.0,
            -6.0 * t2 + 6.0 * t,
            3.0 * t2 - 2.0 * t,
        ],
        [
            12.0 * t - 6.0,
            6.0 * t - 4.0,
            -12.0 * t + 6.0,
            6.0 * t - 2.0,
        ],
    ]
}

impl ScalarField2 for BicubicField {
    fn jet(&self, u: f64, v: f64) -> Result<Jet2> {
        let (u0, u1, v0, v1) = self.grid.bounds();
        let (hu, hv) = self.grid.spacing();
        let slack = 1e-12 * (u1 - u0).abs().max(v1 - v0).max(1.0);
        if u < u0 - slack || u > u1 + slack || v < v0 - slack || v > v1 + slack {
            return Err(Error::Domain {
                expr: self.describe(),
                u,
                v,
                reason: "point outside the sampled grid".into(),
            });
        }
        let (nu, nv) = (self.grid.n_u, self.grid.n_v);
        let cell = |x: f64, x0: f64, h: f64, n: usize| {
            let k = (((x - x0) / h).floor().max(0.0) as usize).min(n - 2);
            (k, ((x - x0) / h - k as f64).clamp(0.0, 1.0))
        };
        let (i, t) = cell(u, u0, hu, nu);
        let (j, s) = cell(v, v0, hv, nv);
        let bu = hermite(t);
        let bv = hermite(s);
        // corner a ∈ {0, 1} uses value basis index 2a and slope basis 2a + 1
        let mut out = [[0.0f64; 3]; 3];
        for a in 0..2 {
            for b in 0..2 {
                let k = (i + a) * nv + (j + b);
                let (val_u, slope_u) = (2 * a, 1 + 2 * a);
                let (val_v, slope_v) = (2 * b, 1 + 2 * b);
                for du in 0..3 {
                    for dv in 0..(3 - du) {
                        out[du][dv] += self.f[k] * bu[du][val_u] * bv[dv][val_v]
                            + self.fu[k] * hu * bu[du][slope_u] * bv[dv][val_v]
                            + self.fv[k] * hv * bu[du][val_u] * bv[dv][slope_v]
                            + self.fuv[k] * hu * hv * bu[du][slope_u] * bv[dv][slope_v];
                    }
                }
            }
        }
        Ok(Jet2 {
            value: out[0][0],
            du: out[1][0] / hu,
            dv: out[0][1] / hv,
            duu: out[2][0] / (hu * hu),
            duv: out[1][1] / (hu * hv),
            dvv: out[0][2] / (hv * hv),
        })
    }

    fn describe(&self) -> String {
        format!("bicubic({}x{})", self.grid.n_u, self.grid.n_v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Domain2;

    #[test]
    fn reproduces_quadratics() {
        let grid = Grid::new(Domain2::rect(-1.0, 2.0, 0.0, 1.0).unwrap(), 7, 5).unwrap();
        let q = |u: f64, v: f64| 1.0 + 2.0 * u - v + 0.5 * u * u + 3.0 * u * v - 2.0 * v * v;
        let values = grid.nodes().map(|(u, v)| q(u, v)).collect();
        let field = BicubicField::new(grid, values).unwrap();
        for &(u, v) in &[
            (-0.9, 0.1),
            (0.33, 0.77),
            (1.99, 0.5),
            (2.0, 1.0),
            (-1.0, 0.0),
        ] {
            let j = field.jet(u, v).unwrap();
            assert!((j.value - q(u, v)).abs() < 1e-12);
            assert!((j.du - (2.0 + u + 3.0 * v)).abs() < 1e-12);
            assert!((j.dv - (-1.0 + 3.0 * u - 4.0 * v)).abs() < 1e-12);
            assert!((j.duv - 3.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_points_off_the_grid() {
        let grid = Grid::new(Domain2::unit_square(), 4, 4).unwrap();
        let field = BicubicField::new(grid, vec![0.0; 16]).unwrap();
        assert!(field.jet(1.5, 0.5).is_err());
    }

    #[test]
    fn interpolates_node_values() {
        let grid = Grid::new(Domain2::unit_square(), 5, 6).unwrap();
        let values: Vec<f64> = (0..30).map(|k| (k as f64 * 0.37).sin()).collect();
        let field = BicubicField::new(grid.clone(), values.clone()).unwrap();
        for (k, (u, v)) in grid.nodes().enumerate() {
            assert!((field.value(u, v).unwrap() - values[k]).abs() < 1e-14);
        }
    }
}
