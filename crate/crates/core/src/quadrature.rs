//! Fixed-rule quadrature over rectangles, disks and their boundaries, plus
//! the finite-difference helpers used by the oracles.
//!
//! Every rule produces its nodes in a fixed order and sums them in that
//! order with compensated summation, so repeated runs are bitwise identical.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField2;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let k = (i + 1) as f64;
        let mut x = (std::f64::consts::PI * (k - 0.25) / (nf + 0.5)).cos()
            * (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct Accumulator {
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Planar parameter domain with a positively oriented boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Domain2 {
    Rect {
        u_min: f64,
        u_max: f64,
        v_min: f64,
        v_max: f64,
    },
    Disk {
        center_u: f64,
        center_v: f64,
        radius: f64,
    },
}

impl Domain2 {
    pub fn rect(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        let ok = [u_min, u_max, v_min, v_max].iter().all(|x| x.is_finite())
            && u_min < u_max
            && v_min < v_max;
        if !ok {
            return Err(Error::invalid(format!(
                "rectangle [{u_min}, {u_max}] x [{v_min}, {v_max}] is empty or not finite"
            )));
        }
        Ok(Domain2::Rect {
            u_min,
            u_max,
            v_min,
            v_max,
        })
    }

    pub fn unit_square() -> Self {
        Domain2::Rect {
            u_min: 0.0,
            u_max: 1.0,
            v_min: 0.0,
            v_max: 1.0,
        }
    }

    pub fn disk(center_u: f64, center_v: f64, radius: f64) -> Result<Self> {
        if !(center_u.is_finite() && center_v.is_finite() && radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!(
                "disk centre ({center_u}, {center_v}) radius {radius} is not a valid disk"
            )));
        }
        Ok(Domain2::Disk {
            center_u,
            center_v,
            radius,
        })
    }

    pub fn area(&self) -> f64 {
        match *self {
            Domain2::Rect {
                u_min,
                u_max,
                v_min,
                v_max,
            } => (u_max - u_min) * (v_max - v_min),
            Domain2::Disk { radius, .. } => std::f64::consts::PI * radius * radius,
        }
    }

    /// `(u_min, u_max, v_min, v_max)` of the smallest enclosing rectangle.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            Domain2::Rect {
                u_min,
                u_max,
                v_min,
                v_max,
            } => (u_min, u_max, v_min, v_max),
            Domain2::Disk {
                center_u,
                center_v,
                radius,
            } => (
                center_u - radius,
                center_u + radius,
                center_v - radius,
                center_v + radius,
            ),
        }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        match *self {
            Domain2::Rect {
                u_min,
                u_max,
                v_min,
                v_max,
            } => (u_min..=u_max).contains(&u) && (v_min..=v_max).contains(&v),
            Domain2::Disk {
                center_u,
                center_v,
                radius,
            } => (u - center_u).hypot(v - center_v) <= radius,
        }
    }

    /// Boundary point and velocity at `s ∈ [0, 1)`, counterclockwise.
    pub fn boundary(&self, s: f64) -> ((f64, f64), (f64, f64)) {
        match *self {
            Domain2::Rect {
                u_min,
                u_max,
                v_min,
                v_max,
            } => {
                let (w, h) = (u_max - u_min, v_max - v_min);
                let s4 = 4.0 * s.rem_euclid(1.0);
                let side = (s4.floor() as usize).min(3);
                let r = s4 - side as f64;
                match side {
                    0 => ((u_min + r * w, v_min), (4.0 * w, 0.0)),
                    1 => ((u_max, v_min + r * h), (0.0, 4.0 * h)),
                    2 => ((u_max - r * w, v_max), (-4.0 * w, 0.0)),
                    _ => ((u_min, v_max - r * h), (0.0, -4.0 * h)),
                }
            }
            Domain2::Disk {
                center_u,
                center_v,
                radius,
            } => {
                let th = 2.0 * std::f64::consts::PI * s;
                let (sn, cs) = th.sin_cos();
                let k = 2.0 * std::f64::consts::PI * radius;
                (
                    (center_u + radius * cs, center_v + radius * sn),
                    (-k * sn, k * cs),
                )
            }
        }
    }

    /// An `n × n` sample set covering the closed domain (polar rings for disks).
    pub fn sample_points(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        let mut out = Vec::with_capacity(n * n);
        match *self {
            Domain2::Rect {
                u_min,
                u_max,
                v_min,
                v_max,
            } => {
                for i in 0..n {
                    let u = u_min + (u_max - u_min) * i as f64 / (n - 1) as f64;
                    for j in 0..n {
                        let v = v_min + (v_max - v_min) * j as f64 / (n - 1) as f64;
                        out.push((u, v));
                    }
                }
            }
            Domain2::Disk {
                center_u,
                center_v,
                radius,
            } => {
                for i in 0..n {
                    let r = radius * i as f64 / (n - 1) as f64;
                    for j in 0..n {
                        let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
                        out.push((center_u + r * th.cos(), center_v + r * th.sin()));
                    }
                }
            }
        }
        out
    }
}

/// One weighted node of an area rule; `weight` includes every Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub u: f64,
    pub v: f64,
    pub weight: f64,
}

/// One node of a boundary rule: the point and `weight · dc/ds`, so that
/// `∮ P du + Q dv ≈ Σ P·du + Q·dv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryNode {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
}

/// Area quadrature settings.
///
/// Rectangles use an `n × n` Gauss–Legendre tensor product. Disks use `n`
/// radial Gauss nodes (with the `r` Jacobian) times `angular_nodes` angular
/// nodes arranged in equal Gauss panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    pub angular_nodes: usize,
}

const PANEL: usize = 8;

impl QuadratureSpec {
    pub fn new(nodes_per_axis: usize) -> Result<Self> {
        Self::with_angular(nodes_per_axis, 2 * nodes_per_axis)
    }

    pub fn with_angular(nodes_per_axis: usize, angular_nodes: usize) -> Result<Self> {
        if nodes_per_axis < 2 || angular_nodes < 2 {
            return Err(Error::invalid(format!(
                "quadrature needs at least 2 nodes per axis, got {nodes_per_axis}"
            )));
        }
        Ok(QuadratureSpec {
            nodes_per_axis,
            angular_nodes,
        })
    }

    pub fn nodes(&self, domain: &Domain2) -> Vec<QuadNode> {
        let n = self.nodes_per_axis;
        let (x, w) = gauss_legendre(n);
        match *domain {
            Domain2::Rect {
                u_min,
                u_max,
                v_min,
                v_max,
            } => {
                let (hu, hv) = (0.5 * (u_max - u_min), 0.5 * (v_max - v_min));
                let (cu, cv) = (0.5 * (u_max + u_min), 0.5 * (v_max + v_min));
                let mut out = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        out.push(QuadNode {
                            u: cu + hu * x[i],
                            v: cv + hv * x[j],
                            weight: w[i] * w[j] * hu * hv,
                        });
                    }
                }
                out
            }
            Domain2::Disk {
                center_u,
                center_v,
                radius,
            } => {
                let angles = panel_rule(self.angular_nodes, 2.0 * std::f64::consts::PI);
                let mut out = Vec::with_capacity(n * angles.len());
                for i in 0..n {
                    let r = 0.5 * radius * (x[i] + 1.0);
                    let wr = 0.5 * radius * w[i] * r;
                    for &(th, wt) in &angles {
                        out.push(QuadNode {
                            u: center_u + r * th.cos(),
                            v: center_v + r * th.sin(),
                            weight: wr * wt,
                        });
                    }
                }
                out
            }
        }
    }
}

/// Composite Gauss rule on `[0, length]` with panels of up to [`PANEL`] nodes.
fn panel_rule(total: usize, length: f64) -> Vec<(f64, f64)> {
    let panels = total.div_ceil(PANEL).max(1);
    let per = total.div_ceil(panels);
    let (x, w) = gauss_legendre(per);
    let h = length / panels as f64;
    let mut out = Vec::with_capacity(panels * per);
    for p in 0..panels {
        let a = p as f64 * h;
        for k in 0..per {
            out.push((a + 0.5 * h * (x[k] + 1.0), 0.5 * h * w[k]));
        }
    }
    out
}

/// Boundary quadrature settings: composite Gauss panels along the
/// counterclockwise boundary. Rectangles get one Gauss rule per side so the
/// corners fall on panel ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryQuadratureSpec {
    pub nodes: usize,
}

impl BoundaryQuadratureSpec {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::invalid(format!(
                "boundary quadrature needs at least 8 nodes, got {nodes}"
            )));
        }
        Ok(BoundaryQuadratureSpec { nodes })
    }

    pub fn nodes(&self, domain: &Domain2) -> Vec<BoundaryNode> {
        let mut out = Vec::with_capacity(self.nodes);
        match domain {
            Domain2::Rect { .. } => {
                let per = self.nodes.div_ceil(4);
                let (x, w) = gauss_legendre(per);
                for side in 0..4 {
                    for k in 0..per {
                        let s = 0.25 * (side as f64 + 0.5 * (x[k] + 1.0));
                        let ((u, v), (du, dv)) = domain.boundary(s);
                        let ws = 0.125 * w[k];
                        out.push(BoundaryNode {
                            u,
                            v,
                            du: du * ws,
                            dv: dv * ws,
                        });
                    }
                }
            }
            Domain2::Disk { .. } => {
                for (s, ws) in panel_rule(self.nodes, 1.0) {
                    let ((u, v), (du, dv)) = domain.boundary(s);
                    out.push(BoundaryNode {
                        u,
                        v,
                        du: du * ws,
                        dv: dv * ws,
                    });
                }
            }
        }
        out
    }
}

/// `∬_D field du dv`.
pub fn integrate_2d<F>(field: F, domain: &Domain2, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<f64>,
{
    let mut acc = Accumulator::default();
    for node in spec.nodes(domain) {
        acc.add(node.weight * field(node.u, node.v)?);
    }
    Ok(acc.total())
}

/// `∮_{∂D} P du + Q dv` along the positively oriented boundary.
pub fn integrate_boundary<P, Q>(
    p: P,
    q: Q,
    domain: &Domain2,
    spec: &BoundaryQuadratureSpec,
) -> Result<f64>
where
    P: Fn(f64, f64) -> Result<f64>,
    Q: Fn(f64, f64) -> Result<f64>,
{
    integrate_one_form(|u, v| Ok((p(u, v)?, q(u, v)?)), domain, spec)
}

/// Like [`integrate_boundary`] with both coefficients produced together.
pub fn integrate_one_form<F>(
    form: F,
    domain: &Domain2,
    spec: &BoundaryQuadratureSpec,
) -> Result<f64>
where
    F: Fn(f64, f64) -> Result<(f64, f64)>,
{
    let mut acc = Accumulator::default();
    for node in spec.nodes(domain) {
        let (p, q) = form(node.u, node.v)?;
        acc.add(p * node.du);
        acc.add(q * node.dv);
    }
    Ok(acc.total())
}

/// Both sides of Green's theorem: `(∮ P du + Q dv, ∬ (Q_u − P_v) du dv)`.
pub fn green_consistency(
    p: &dyn ScalarField2,
    q: &dyn ScalarField2,
    domain: &Domain2,
    area: &QuadratureSpec,
    boundary: &BoundaryQuadratureSpec,
) -> Result<(f64, f64)> {
    let line = integrate_boundary(|u, v| p.value(u, v), |u, v| q.value(u, v), domain, boundary)?;
    let surface = integrate_2d(|u, v| Ok(q.jet(u, v)?.du - p.jet(u, v)?.dv), domain, area)?;
    Ok((line, surface))
}

/// `[g(x + h) − g(x − h)] / 2h`.
pub fn central_difference<G>(g: G, x: f64, h: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    Ok((g(x + h)? - g(x - h)?) / (2.0 * h))
}

/// One Richardson step on the central difference: `(4 D(h/2) − D(h)) / 3`.
pub fn richardson_central<G>(g: G, x: f64, h: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    let coarse = central_difference(&g, x, h)?;
    let fine = central_difference(&g, x, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_field;

    fn q(n: usize) -> QuadratureSpec {
        QuadratureSpec::new(n).unwrap()
    }

    #[test]
    fn gauss_weights_sum_to_two() {
        for n in [1, 2, 3, 7, 16, 64, 128] {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn three_point_rule_matches_closed_form() {
        let (x, w) = gauss_legendre(3);
        let r = (0.6f64).sqrt();
        assert!((x[0] + r).abs() < 1e-15 && x[1] == 0.0 && (x[2] - r).abs() < 1e-15);
        assert!((w[0] - 5.0 / 9.0).abs() < 1e-15 && (w[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn simple_rectangle_integrals() {
        let d = Domain2::unit_square();
        assert!((integrate_2d(|_, _| Ok(1.0), &d, &q(4)).unwrap() - 1.0).abs() < 1e-15);
        assert!((integrate_2d(|u, v| Ok(u * v), &d, &q(4)).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn disk_area() {
        let d = Domain2::disk(0.0, 0.0, 1.0).unwrap();
        let spec = QuadratureSpec::with_angular(32, 64).unwrap();
        let a = integrate_2d(|_, _| Ok(1.0), &d, &spec).unwrap();
        assert!((a - std::f64::consts::PI).abs() < 1e-12, "{a}");
    }

    #[test]
    fn boundary_rules() {
        let sq = Domain2::unit_square();
        let bq = BoundaryQuadratureSpec::new(64).unwrap();
        let twice_area = integrate_boundary(|_, v| Ok(-v), |u, _| Ok(u), &sq, &bq).unwrap();
        assert!((twice_area - 2.0).abs() < 1e-14);
        assert_eq!(
            integrate_boundary(|_, _| Ok(0.0), |_, _| Ok(0.0), &sq, &bq).unwrap(),
            0.0
        );
        // ζ = u²+v²: ∮ ζ_v du + ζ_u dv = ∬ (ζ_uu − ζ_vv) = 0
        let probe = integrate_boundary(|_, v| Ok(2.0 * v), |u, _| Ok(2.0 * u), &sq, &bq).unwrap();
        assert!(probe.abs() < 1e-14);
    }

    #[test]
    fn signed_area_is_positive() {
        let bq = BoundaryQuadratureSpec::new(128).unwrap();
        for d in [
            Domain2::unit_square(),
            Domain2::rect(-1.0, 1.0, -1.0, 1.0).unwrap(),
            Domain2::rect(0.1, 0.7, 0.2, 0.9).unwrap(),
            Domain2::disk(0.0, 0.0, 0.5).unwrap(),
            Domain2::disk(0.3, -0.2, 1.0).unwrap(),
        ] {
            let a = 0.5 * integrate_boundary(|_, v| Ok(-v), |u, _| Ok(u), &d, &bq).unwrap();
            assert!((a - d.area()).abs() < 1e-12, "{d:?}: {a}");
        }
    }

    #[test]
    fn green_on_rotation_form() {
        let p = parse_field("-v").unwrap();
        let qf = parse_field("u").unwrap();
        let bq = BoundaryQuadratureSpec::new(64).unwrap();
        let (l, s) =
            green_consistency(p.as_ref(), qf.as_ref(), &Domain2::unit_square(), &q(8), &bq)
                .unwrap();
        assert!((l - 2.0).abs() < 1e-14 && (s - 2.0).abs() < 1e-14);
        let disk = Domain2::disk(0.0, 0.0, 1.0).unwrap();
        let (l, s) = green_consistency(p.as_ref(), qf.as_ref(), &disk, &q(16), &bq).unwrap();
        let tau = 2.0 * std::f64::consts::PI;
        assert!(
            (l - tau).abs() < 1e-12 && (s - tau).abs() < 1e-12,
            "{l} {s}"
        );
    }

    #[test]
    fn difference_quotients() {
        let d = central_difference(|x| Ok(x.powi(3)), 1.0, 1e-3).unwrap();
        assert!((d - 3.0 - 1e-6).abs() < 1e-12);
        let r = richardson_central(|x| Ok(x.powi(3)), 1.0, 1e-2).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        assert!(QuadratureSpec::new(1).is_err());
        assert!(BoundaryQuadratureSpec::new(4).is_err());
        assert!(Domain2::rect(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(Domain2::disk(0.0, 0.0, 0.0).is_err());
    }
}
