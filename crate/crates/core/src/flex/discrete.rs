//! Discrete flexes: nullspace of the finite-difference isometry system with
//! the rigid motions deflated.
//!
//! Unknowns are `(ξ, η, ζ)` at every node of an `n_u × n_v` grid, stored
//! node-major (`3 * (i * n_v + j) + component`). The first-order system is
//! imposed at interior nodes with centred differences; the height slopes
//! are differenced the same way, which keeps every sampled rigid motion in
//! the discrete kernel exactly.
//!
//! The kernel is read off a column-pivoted QR of the transposed system.
//! Inside the deflated kernel the returned vector minimises the discrete
//! thin-plate energy, which selects a smooth flex over the grid-scale
//! modes that centred stencils admit.

use std::io::Write;
use std::sync::Arc;

use faer::{Mat, MatRef, Side};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::quadrature::Domain2;
use crate::surface::MongePatch;

use super::{BicubicField, FlexField};

/// Relative singular-value cut-off used to decide the numerical rank.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Reporting threshold on the triviality score.
pub const TRIVIALITY_THRESHOLD: f64 = 0.5;

/// Uniform node grid over a rectangle, nodes on the boundary included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub domain: Domain2,
    pub n_u: usize,
    pub n_v: usize,
}

impl Grid {
    pub fn new(domain: Domain2, n_u: usize, n_v: usize) -> Result<Self> {
        if !matches!(domain, Domain2::Rect { .. }) {
            return Err(Error::invalid("flex grids require a rectangular domain"));
        }
        if n_u < 2 || n_v < 2 {
            return Err(Error::invalid(format!("grid {n_u}x{n_v} is too small")));
        }
        Ok(Grid { domain, n_u, n_v })
    }

    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.domain.bounds()
    }

    pub fn spacing(&self) -> (f64, f64) {
        let (u0, u1, v0, v1) = self.bounds();
        (
            (u1 - u0) / (self.n_u - 1) as f64,
            (v1 - v0) / (self.n_v - 1) as f64,
        )
    }

    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let (u0, _, v0, _) = self.bounds();
        let (hu, hv) = self.spacing();
        (u0 + hu * i as f64, v0 + hv * j as f64)
    }

    pub fn len(&self) -> usize {
        self.n_u * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All nodes, `i`-major.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.n_u).flat_map(move |i| (0..self.n_v).map(move |j| self.node(i, j)))
    }

    fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_v + j
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlexOutcome {
    /// A kernel vector outside the rigid-motion space was found.
    Nontrivial,
    /// Every kernel vector is rigid to tolerance; the stored field is the
    /// non-rigid field of least residual.
    NumericallyRigid,
}

/// Grid-sampled flex returned by [`construct_flex_numeric`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFlex {
    pub grid: Grid,
    /// `(ξ, η, ζ)` per node, `i`-major.
    pub values: Vec<[f64; 3]>,
    /// RMS of the discrete residuals for the unit-norm field.
    pub residual_norm: f64,
    pub triviality_score: f64,
    pub kernel_dim: usize,
    pub rank: usize,
    pub outcome: FlexOutcome,
}

#[derive(Serialize, Deserialize)]
struct DiscreteFlexJson {
    grid: Grid,
    residual_norm: f64,
    triviality_score: f64,
    kernel_dim: usize,
    rank: usize,
    outcome: FlexOutcome,
    /// `ξ, η, ζ` per node, flattened `i`-major.
    values: Vec<f64>,
}

impl DiscreteFlex {
    /// RMS of `|v|` over the nodes.
    pub fn grid_norm(&self) -> f64 {
        grid_norm(&flatten(&self.values))
    }

    /// C¹ bicubic interpolant of the three components.
    pub fn interpolate(&self) -> Result<FlexField> {
        let component = |c: usize| -> Result<Field> {
            let data = self.values.iter().map(|x| x[c]).collect();
            Ok(Arc::new(BicubicField::new(self.grid.clone(), data)?))
        };
        Ok(FlexField::new(component(0)?, component(1)?, component(2)?))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["u", "v", "xi", "eta", "zeta"])?;
        for ((u, v), x) in self.grid.nodes().zip(&self.values) {
            w.write_record([u, v, x[0], x[1], x[2]].map(|x| x.to_string()))?;
        }
        w.flush().map_err(|e| Error::Serialize(e.to_string()))?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DiscreteFlexJson {
            grid: self.grid.clone(),
            residual_norm: self.residual_norm,
            triviality_score: self.triviality_score,
            kernel_dim: self.kernel_dim,
            rank: self.rank,
            outcome: self.outcome,
            values: flatten(&self.values),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DiscreteFlexJson = serde_json::from_str(text)?;
        if raw.values.len() != 3 * raw.grid.len() {
            return Err(Error::invalid(format!(
                "expected {} values for a {}x{} grid, found {}",
                3 * raw.grid.len(),
                raw.grid.n_u,
                raw.grid.n_v,
                raw.values.len()
            )));
        }
        Ok(DiscreteFlex {
            values: raw.values.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
            grid: raw.grid,
            residual_norm: raw.residual_norm,
            triviality_score: raw.triviality_score,
            kernel_dim: raw.kernel_dim,
            rank: raw.rank,
            outcome: raw.outcome,
        })
    }
}

fn flatten(values: &[[f64; 3]]) -> Vec<f64> {
    values.iter().flat_map(|x| x.iter().copied()).collect()
}

fn grid_norm(x: &[f64]) -> f64 {
    (x.iter().map(|a| a * a).sum::<f64>() / (x.len() / 3) as f64).sqrt()
}

/// Heights and centred height slopes at every node.
fn height_samples(patch: &MongePatch, grid: &Grid) -> Result<Vec<f64>> {
    grid.nodes().map(|(u, v)| patch.f.value(u, v)).collect()
}

/// Transposed constraint matrix: one column per equation.
fn assemble_transposed(grid: &Grid, heights: &[f64]) -> Mat<f64> {
    let (nu, nv) = (grid.n_u, grid.n_v);
    let (hu, hv) = grid.spacing();
    let unknowns = 3 * grid.len();
    let equations = 3 * (nu - 2) * (nv - 2);
    let mut at = Mat::<f64>::zeros(unknowns, equations);
    let mut row = 0;
    for i in 1..nu - 1 {
        for j in 1..nv - 1 {
            let (e, w, n, s) = (
                grid.index(i + 1, j),
                grid.index(i - 1, j),
                grid.index(i, j + 1),
                grid.index(i, j - 1),
            );
            let fu = (heights[e] - heights[w]) / (2.0 * hu);
            let fv = (heights[n] - heights[s]) / (2.0 * hv);
            let (cu, cv) = (0.5 / hu, 0.5 / hv);
            let mut add = |eq: usize, node: usize, comp: usize, k: f64| {
                at[(3 * node + comp, row + eq)] += k;
            };
            // ξ_u + f_u ζ_u
            add(0, e, 0, cu);
            add(0, w, 0, -cu);
            add(0, e, 2, fu * cu);
            add(0, w, 2, -fu * cu);
            // ξ_v + η_u + f_v ζ_u + f_u ζ_v
            add(1, n, 0, cv);
            add(1, s, 0, -cv);
            add(1, e, 1, cu);
            add(1, w, 1, -cu);
            add(1, e, 2, fv * cu);
            add(1, w, 2, -fv * cu);
            add(1, n, 2, fu * cv);
            add(1, s, 2, -fu * cv);
            // η_v + f_v ζ_v
            add(2, n, 1, cv);
            add(2, s, 1, -cv);
            add(2, n, 2, fv * cv);
            add(2, s, 2, -fv * cv);
            row += 3;
        }
    }
    at
}

/// Discrete thin-plate operator: second differences of every component,
/// `∂uu` and `∂vv` at interior nodes and `√2 ∂uv` on every cell.
fn roughness(grid: &Grid, x: MatRef<'_, f64>) -> Vec<f64> {
    let (nu, nv) = (grid.n_u, grid.n_v);
    let (hu, hv) = grid.spacing();
    let at = |i: usize, j: usize, c: usize| x[(3 * grid.index(i, j) + c, 0)];
    let mut out = Vec::with_capacity(3 * (2 * nu * nv + (nu - 1) * (nv - 1)));
    for c in 0..3 {
        for i in 1..nu - 1 {
            for j in 0..nv {
                out.push((at(i + 1, j, c) - 2.0 * at(i, j, c) + at(i - 1, j, c)) / (hu * hu));
            }
        }
        for i in 0..nu {
            for j in 1..nv - 1 {
                out.push((at(i, j + 1, c) - 2.0 * at(i, j, c) + at(i, j - 1, c)) / (hv * hv));
            }
        }
        for i in 0..nu - 1 {
            for j in 0..nv - 1 {
                let d = at(i + 1, j + 1, c) - at(i + 1, j, c) - at(i, j + 1, c) + at(i, j, c);
                out.push(std::f64::consts::SQRT_2 * d / (hu * hv));
            }
        }
    }
    out
}

/// Orthonormal basis (modified Gram–Schmidt) of the six rigid-motion
/// fields sampled on the grid, as the columns of a `3N × 6` matrix.
pub fn rigid_basis(patch: &MongePatch, grid: &Grid) -> Result<Mat<f64>> {
    let heights = height_samples(patch, grid)?;
    Ok(rigid_basis_from_heights(grid, &heights))
}

fn rigid_basis_from_heights(grid: &Grid, heights: &[f64]) -> Mat<f64> {
    let n = grid.len();
    let mut basis = Mat::<f64>::zeros(3 * n, 6);
    for (k, (u, v)) in grid.nodes().enumerate() {
        let z = heights[k];
        for c in 0..3 {
            basis[(3 * k + c, c)] = 1.0;
        }
        // b × (u, v, z) for b = e_x, e_y, e_z
        let rot = [[0.0, -z, v], [z, 0.0, -u], [-v, u, 0.0]];
        for (b, r) in rot.iter().enumerate() {
            for c in 0..3 {
                basis[(3 * k + c, 3 + b)] = r[c];
            }
        }
    }
    modified_gram_schmidt(&mut basis);
    basis
}

fn modified_gram_schmidt(m: &mut Mat<f64>) {
    let (rows, cols) = (m.nrows(), m.ncols());
    for j in 0..cols {
        for k in 0..j {
            let dot: f64 = (0..rows).map(|i| m[(i, j)] * m[(i, k)]).sum();
            for i in 0..rows {
                m[(i, j)] -= dot * m[(i, k)];
            }
        }
        let norm = (0..rows).map(|i| m[(i, j)] * m[(i, j)]).sum::<f64>().sqrt();
        let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
        for i in 0..rows {
            m[(i, j)] *= scale;
        }
    }
}

/// `‖P x‖ / ‖x‖` with `P` the orthogonal projector onto the columns of `basis`.
fn projection_ratio(basis: MatRef<'_, f64>, x: &[f64]) -> f64 {
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let proj: f64 = (0..basis.ncols())
        .map(|c| {
            let d: f64 = (0..x.len()).map(|i| basis[(i, c)] * x[i]).sum();
            d * d
        })
        .sum();
    (proj.sqrt() / norm).clamp(0.0, 1.0)
}

/// Relative norm of the rigid-motion component of a sampled field.
pub fn triviality_score_of(patch: &MongePatch, grid: &Grid, values: &[[f64; 3]]) -> Result<f64> {
    if values.len() != grid.len() {
        return Err(Error::invalid("sample count does not match the grid"));
    }
    let basis = rigid_basis(patch, grid)?;
    Ok(projection_ratio(basis.as_ref(), &flatten(values)))
}

pub fn triviality_score(d: &DiscreteFlex, patch: &MongePatch) -> Result<f64> {
    triviality_score_of(patch, &d.grid, &d.values)
}

struct Selection {
    x: Vec<f64>,
    kernel_dim: usize,
    rank: usize,
    outcome: FlexOutcome,
}

/// Core of the construction, on an explicit (transposed) system.
fn select_flex(
    at: MatRef<'_, f64>,
    rigid: MatRef<'_, f64>,
    rough: impl Fn(MatRef<'_, f64>) -> Vec<f64>,
) -> Result<Selection> {
    let unknowns = at.nrows();
    let qr = at.col_piv_qr();
    let r = qr.R();
    let diag = r.nrows().min(r.ncols());
    let lead = if diag > 0 { r[(0, 0)].abs() } else { 0.0 };
    let rank = (0..diag)
        .take_while(|&k| lead > 0.0 && r[(k, k)].abs() > RANK_TOLERANCE * lead)
        .count();
    let kernel_dim = unknowns - rank;
    let q = qr.compute_Q();
    let kernel = q.as_ref().subcols(rank, kernel_dim);

    // Remove the rigid part, then keep an orthonormal basis of what survives.
    let deflated = if kernel_dim > 0 {
        let coeff = rigid.transpose() * kernel;
        let projected = kernel - rigid * &coeff;
        let svd = projected
            .thin_svd()
            .map_err(|e| Error::invalid(format!("SVD failed: {e:?}")))?;
        let s = svd.S().column_vector();
        let keep = (0..s.nrows()).filter(|&k| s[k] > 1e-8).count();
        svd.U().subcols(0, keep).to_owned()
    } else {
        Mat::zeros(unknowns, 0)
    };

    if deflated.ncols() == 0 {
        return least_residual_nonrigid(at, rigid, rank, kernel_dim);
    }

    // Smallest thin-plate energy within the deflated kernel.
    let cols: Vec<Vec<f64>> = (0..deflated.ncols())
        .map(|c| rough(deflated.as_ref().subcols(c, 1)))
        .collect();
    let k = cols.len();
    let gram = Mat::<f64>::from_fn(k, k, |a, b| {
        cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum()
    });
    let eig = gram
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::invalid(format!("eigensolver failed: {e:?}")))?;
    let y = eig.U().col(0);
    let x = &deflated * y;
    Ok(Selection {
        x: (0..unknowns).map(|i| x[i]).collect(),
        kernel_dim,
        rank,
        outcome: FlexOutcome::Nontrivial,
    })
}

/// Fallback when the kernel is rigid: the unit field orthogonal to the
/// rigid motions with the smallest residual.
fn least_residual_nonrigid(
    at: MatRef<'_, f64>,
    rigid: MatRef<'_, f64>,
    rank: usize,
    kernel_dim: usize,
) -> Result<Selection> {
    let n = at.nrows();
    let mut complement = Mat::<f64>::identity(n, n);
    complement -= rigid * rigid.transpose();
    // A P, with P the projector onto the rigid complement
    let ap = at.transpose() * &complement;
    let svd = ap
        .svd()
        .map_err(|e| Error::invalid(format!("SVD failed: {e:?}")))?;
    let s = svd.S().column_vector();
    let v = svd.V();
    // Right singular vectors of AP inside the complement; pick the smallest σ.
    let mut best: Option<(f64, usize)> = None;
    for c in 0..v.ncols() {
        let col: Vec<f64> = (0..n).map(|i| v[(i, c)]).collect();
        if projection_ratio(rigid, &col) > 1e-6 {
            continue;
        }
        let sigma = if c < s.nrows() { s[c] } else { 0.0 };
        if best.map_or(true, |(b, _)| sigma < b) {
            best = Some((sigma, c));
        }
    }
    let (_, c) = best.ok_or_else(|| Error::invalid("no field orthogonal to the rigid motions"))?;
    Ok(Selection {
        x: (0..n).map(|i| v[(i, c)]).collect(),
        kernel_dim,
        rank,
        outcome: FlexOutcome::NumericallyRigid,
    })
}

/// Build a nontrivial discrete flex of `patch` on an `n_u × n_v` grid.
pub fn construct_flex_numeric(patch: &MongePatch, n_u: usize, n_v: usize) -> Result<DiscreteFlex> {
    if n_u < 4 || n_v < 4 {
        return Err(Error::invalid(format!(
            "flex construction needs at least a 4x4 grid, got {n_u}x{n_v}"
        )));
    }
    let grid = Grid::new(patch.domain, n_u, n_v)?;
    let heights = height_samples(patch, &grid)?;
    let at = assemble_transposed(&grid, &heights);
    let rigid = rigid_basis_from_heights(&grid, &heights);
    let sel = select_flex(at.as_ref(), rigid.as_ref(), |x| roughness(&grid, x))?;

    let mut x = sel.x;
    let norm = grid_norm(&x);
    let largest = x
        .iter()
        .copied()
        .fold(0.0f64, |m, a| if a.abs() > m.abs() { a } else { m });
    let scale = largest.signum() / norm;
    x.iter_mut().for_each(|a| *a *= scale);

    let xcol = Mat::<f64>::from_fn(x.len(), 1, |i, _| x[i]);
    let res = at.transpose() * &xcol;
    let equations = res.nrows().max(1);
    let residual_norm = ((0..res.nrows())
        .map(|i| res[(i, 0)] * res[(i, 0)])
        .sum::<f64>()
        / equations as f64)
        .sqrt();
    let triviality_score = projection_ratio(rigid.as_ref(), &x);

    Ok(DiscreteFlex {
        values: x.chunks(3).map(|c| [c[0], c[1], c[2]]).collect(),
        grid,
        residual_norm,
        triviality_score,
        kernel_dim: sel.kernel_dim,
        rank: sel.rank,
        outcome: sel.outcome,
    })
}

/// Sample a flex field at the grid nodes.
pub fn sample_flex(flex: &FlexField, grid: &Grid) -> Result<Vec<[f64; 3]>> {
    grid.nodes()
        .map(|(u, v)| Ok(flex.velocity(u, v)?.to_array()))
        .collect()
}
