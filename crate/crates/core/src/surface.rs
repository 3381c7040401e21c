//! Monge patches, general parametrized patches, and their curvature.
//!
//! Orientation is always `x_u × x_v`, which for a Monge patch `z = f(u, v)`
//! is the upward normal `(−f_u, −f_v, 1)/√W`, `W = 1 + f_u² + f_v²`. With
//! this orientation the paraboloid `(u² + v²)/2` has `H = +1` at its vertex.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::flex::FlexField;
use crate::jet::Jet2;
use crate::quadrature::{gauss_legendre, integrate_2d, Accumulator, Domain2, QuadratureSpec};
use crate::vec3::Vec3;

/// Anything that maps the parameter domain into space with second-order jets.
pub trait Surface {
    /// Jets of the three coordinates at `(u, v)`.
    fn position(&self, u: f64, v: f64) -> Result<[Jet2; 3]>;

    fn domain(&self) -> &Domain2;

    /// First and second fundamental forms at `(u, v)`.
    fn local(&self, u: f64, v: f64) -> Result<LocalGeometry> {
        LocalGeometry::from_position(&self.position(u, v)?, u, v)
    }
}

/// Height-field surface `x(u, v) = (u, v, f(u, v))` over a planar domain.
#[derive(Debug, Clone)]
pub struct MongePatch {
    pub f: Field,
    pub domain: Domain2,
}

/// General parametrized patch `x(u, v) = (x₁, x₂, x₃)`.
#[derive(Debug, Clone)]
pub struct ParamPatch {
    pub x: [Field; 3],
    pub domain: Domain2,
}

impl Surface for MongePatch {
    fn position(&self, u: f64, v: f64) -> Result<[Jet2; 3]> {
        Ok([Jet2::var_u(u), Jet2::var_v(v), self.f.jet(u, v)?])
    }

    fn domain(&self) -> &Domain2 {
        &self.domain
    }
}

impl Surface for ParamPatch {
    fn position(&self, u: f64, v: f64) -> Result<[Jet2; 3]> {
        Ok([
            self.x[0].jet(u, v)?,
            self.x[1].jet(u, v)?,
            self.x[2].jet(u, v)?,
        ])
    }

    fn domain(&self) -> &Domain2 {
        &self.domain
    }
}

pub(crate) fn partials(x: &[Jet2; 3]) -> (Vec3, Vec3, Vec3, Vec3, Vec3) {
    (
        Vec3::new(x[0].du, x[1].du, x[2].du),
        Vec3::new(x[0].dv, x[1].dv, x[2].dv),
        Vec3::new(x[0].duu, x[1].duu, x[2].duu),
        Vec3::new(x[0].duv, x[1].duv, x[2].duv),
        Vec3::new(x[0].dvv, x[1].dvv, x[2].dvv),
    )
}

/// Fundamental forms `(E, F, G)`, `(L, M, N)` and the oriented unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry {
    pub xu: Vec3,
    pub xv: Vec3,
    pub normal: Vec3,
    /// `|x_u × x_v|`
    pub area_element: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

impl LocalGeometry {
    pub fn from_position(x: &[Jet2; 3], u: f64, v: f64) -> Result<Self> {
        let (xu, xv, xuu, xuv, xvv) = partials(x);
        let cross = xu.cross(xv);
        let area_element = cross.norm();
        let scale = xu.norm() * xv.norm();
        if !area_element.is_finite() || area_element <= 1e-14 * scale {
            return Err(Error::Irregular { u, v, t: None });
        }
        let normal = cross * (1.0 / area_element);
        Ok(LocalGeometry {
            xu,
            xv,
            normal,
            area_element,
            e: xu.dot(xu),
            f: xu.dot(xv),
            g: xv.dot(xv),
            l: xuu.dot(normal),
            m: xuv.dot(normal),
            n: xvv.dot(normal),
        })
    }

    fn metric_det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    /// `(E N − 2 F M + G L) / 2(EG − F²)`.
    pub fn mean_curvature(&self) -> f64 {
        (self.e * self.n - 2.0 * self.f * self.m + self.g * self.l) / (2.0 * self.metric_det())
    }

    pub fn gaussian_curvature(&self) -> f64 {
        (self.l * self.n - self.m * self.m) / self.metric_det()
    }

    /// Eigenvalues of the shape operator, `κ₁ ≥ κ₂`.
    pub fn principal_curvatures(&self) -> (f64, f64) {
        let h = self.mean_curvature();
        let k = self.gaussian_curvature();
        let disc = (h * h - k).max(0.0).sqrt();
        (h + disc, h - disc)
    }
}

impl MongePatch {
    pub fn new(f: Field, domain: Domain2) -> Self {
        MongePatch { f, domain }
    }

    pub fn from_expression(source: &str, domain: Domain2) -> Result<Self> {
        Ok(MongePatch::new(crate::field::parse_field(source)?, domain))
    }

    /// `W = 1 + f_u² + f_v²` at a point, together with the height jet.
    pub fn metric_factor(&self, u: f64, v: f64) -> Result<(Jet2, f64)> {
        let f = self.f.jet(u, v)?;
        Ok((f, 1.0 + f.du * f.du + f.dv * f.dv))
    }

    /// Upward unit normal `W^{-1/2} (−f_u, −f_v, 1)`.
    pub fn unit_normal(&self, u: f64, v: f64) -> Result<Vec3> {
        let (f, w) = self.metric_factor(u, v)?;
        Ok(Vec3::new(-f.du, -f.dv, 1.0) * (1.0 / w.sqrt()))
    }

    /// `H = [(1+f_v²) f_uu − 2 f_u f_v f_uv + (1+f_u²) f_vv] / (2 W^{3/2})`.
    pub fn mean_curvature(&self, u: f64, v: f64) -> Result<f64> {
        let (f, w) = self.metric_factor(u, v)?;
        Ok(monge_mean_curvature(&f, w))
    }

    pub fn principal_curvatures(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        Ok(self.local(u, v)?.principal_curvatures())
    }

    /// `∬_D H √W du dv`.
    pub fn total_mean_curvature(&self, q: &QuadratureSpec) -> Result<f64> {
        integrate_2d(
            |u, v| {
                let (f, w) = self.metric_factor(u, v)?;
                Ok(monge_mean_curvature(&f, w) * w.sqrt())
            },
            &self.domain,
            q,
        )
    }

    pub fn area(&self, q: &QuadratureSpec) -> Result<f64> {
        integrate_2d(
            |u, v| Ok(self.metric_factor(u, v)?.1.sqrt()),
            &self.domain,
            q,
        )
    }

    /// The same surface as a general parametrized patch `(u, v, f)`.
    pub fn to_param_patch(&self) -> ParamPatch {
        ParamPatch {
            x: [
                Arc::new(crate::expr::Expression::u()),
                Arc::new(crate::expr::Expression::v()),
                self.f.clone(),
            ],
            domain: self.domain,
        }
    }
}

fn monge_mean_curvature(f: &Jet2, w: f64) -> f64 {
    ((1.0 + f.dv * f.dv) * f.duu - 2.0 * f.du * f.dv * f.duv + (1.0 + f.du * f.du) * f.dvv)
        / (2.0 * w * w.sqrt())
}

/// `∬ H dA` of any surface via its fundamental forms.
pub fn total_mean_curvature_of(s: &dyn Surface, q: &QuadratureSpec) -> Result<f64> {
    integrate_2d(
        |u, v| {
            let g = s.local(u, v)?;
            Ok(g.mean_curvature() * g.area_element)
        },
        s.domain(),
        q,
    )
}

pub fn area_of(s: &dyn Surface, q: &QuadratureSpec) -> Result<f64> {
    integrate_2d(|u, v| Ok(s.local(u, v)?.area_element), s.domain(), q)
}

pub fn total_gauss_curvature_of(s: &dyn Surface, q: &QuadratureSpec) -> Result<f64> {
    integrate_2d(
        |u, v| {
            let g = s.local(u, v)?;
            Ok(g.gaussian_curvature() * g.area_element)
        },
        s.domain(),
        q,
    )
}

/// Algebraic volume between the surface and the plane `z = 0`, measured
/// against the projected area element: `∬ z (x_u × x_v)·e_z du dv`.
pub fn projected_volume_of(s: &dyn Surface, q: &QuadratureSpec) -> Result<f64> {
    integrate_2d(
        |u, v| {
            let x = s.position(u, v)?;
            let (xu, xv, ..) = partials(&x);
            Ok(x[2].value * xu.cross(xv).z)
        },
        s.domain(),
        q,
    )
}

/// A piecewise-smooth curve in the parameter plane.
#[derive(Debug, Clone, PartialEq)]
pub enum PlaneCurve {
    Segment {
        from: (f64, f64),
        to: (f64, f64),
    },
    /// Circular arc, angles in radians.
    Arc {
        center: (f64, f64),
        radius: f64,
        start: f64,
        end: f64,
    },
    Polyline(Vec<(f64, f64)>),
}

/// `(point, velocity)` of one smooth piece as a function of `s ∈ [0, 1]`.
type Piece<'a> = Box<dyn Fn(f64) -> ((f64, f64), (f64, f64)) + 'a>;

impl PlaneCurve {
    /// Smooth pieces as `(point, velocity)` functions of `s ∈ [0, 1]`.
    fn pieces(&self) -> Vec<Piece<'_>> {
        match self {
            PlaneCurve::Segment { from, to } => vec![segment(*from, *to)],
            PlaneCurve::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let (c, r, a, b) = (*center, *radius, *start, *end);
                vec![Box::new(move |s: f64| {
                    let th = a + (b - a) * s;
                    let (sn, cs) = th.sin_cos();
                    (
                        (c.0 + r * cs, c.1 + r * sn),
                        (-r * sn * (b - a), r * cs * (b - a)),
                    )
                })]
            }
            PlaneCurve::Polyline(pts) => pts.windows(2).map(|w| segment(w[0], w[1])).collect(),
        }
    }
}

fn segment<'a>(from: (f64, f64), to: (f64, f64)) -> Piece<'a> {
    Box::new(move |s: f64| {
        (
            (from.0 + (to.0 - from.0) * s, from.1 + (to.1 - from.1) * s),
            (to.0 - from.0, to.1 - from.1),
        )
    })
}

/// `d/dt|₀ Length(ψ(γ, t))` for `ψ = x + t v`, i.e. `∫ x′·v′ / |x′| ds`,
/// with `nodes` Gauss points on each smooth piece.
pub fn first_variation_of_length(
    surface: &dyn Surface,
    curve: &PlaneCurve,
    flex: &FlexField,
    nodes: usize,
) -> Result<f64> {
    let (x, w) = gauss_legendre(nodes);
    let pieces = curve.pieces();
    let mut acc = Accumulator::default();
    for (k, piece) in pieces.iter().enumerate() {
        for (xi, wi) in x.iter().zip(&w) {
            let s = 0.5 * (xi + 1.0);
            let ((u, v), (du, dv)) = piece(s);
            let pos = surface.position(u, v)?;
            let (xu, xv, ..) = partials(&pos);
            let dx = xu * du + xv * dv;
            let speed = dx.norm();
            if speed.is_nan() || speed <= 0.0 {
                return Err(Error::ZeroSpeed { s: k as f64 + s });
            }
            let vel = flex.jets(u, v)?;
            let (vu, vv, ..) = partials(&vel);
            let dvel = vu * du + vv * dv;
            acc.add(0.5 * wi * dx.dot(dvel) / speed);
        }
    }
    Ok(acc.total())
}
