//! First variation of total mean curvature under an infinitesimal flex,
//! computed three independent ways:
//!
//! * surface route: `½ ∬_D [(1+f_v²) ζ_uu − 2 f_u f_v ζ_uv + (1+f_u²) ζ_vv] du dv`;
//! * boundary route: `½ ∮_{∂S} m·dx` with `m = n′ × n`;
//! * oracle: central difference of `H(ψ(S, t))` in `t`, where `ψ = x + t v`
//!   is integrated as a general parametrized patch.
//!
//! The analytic routes share nothing but the input jets, and the oracle
//! shares nothing with either beyond the quadrature rule.

use faer::linalg::solvers::SolveLstsq;
use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flex::{require_flex, FlexField, FLEX_TOLERANCE};
use crate::jet::Jet2;
use crate::quadrature::{
    central_difference, integrate_2d, integrate_one_form, richardson_central,
    BoundaryQuadratureSpec, Domain2, QuadratureSpec,
};
use crate::surface::{
    area_of, partials, projected_volume_of, total_gauss_curvature_of, total_mean_curvature_of,
    MongePatch, Surface,
};
use crate::vec3::Vec3;

/// `ψ(u, v, t) = (u + tξ, v + tη, f + tζ)` for a fixed `t`.
#[derive(Debug, Clone)]
pub struct DeformedPatch<'a> {
    pub base: &'a MongePatch,
    pub flex: &'a FlexField,
    pub t: f64,
}

impl Surface for DeformedPatch<'_> {
    fn position(&self, u: f64, v: f64) -> Result<[Jet2; 3]> {
        let [xi, eta, zeta] = self.flex.jets(u, v)?;
        let f = self.base.f.jet(u, v)?;
        Ok([
            Jet2::var_u(u) + xi.scale(self.t),
            Jet2::var_v(v) + eta.scale(self.t),
            f + zeta.scale(self.t),
        ])
    }

    fn domain(&self) -> &Domain2 {
        &self.base.domain
    }

    fn local(&self, u: f64, v: f64) -> Result<crate::surface::LocalGeometry> {
        crate::surface::LocalGeometry::from_position(&self.position(u, v)?, u, v)
            .map_err(|e| e.with_t(self.t))
    }
}

/// `n′ = d/dt|₀ n(x, t)`: with `N = ψ_u × ψ_v`,
/// `n′ = (N′ − (N′·n) n) / |N|` and `N′ = v_u × x_v + x_u × v_v`.
pub fn normal_velocity(patch: &MongePatch, flex: &FlexField, u: f64, v: f64) -> Result<Vec3> {
    let f = patch.f.jet(u, v)?;
    let xu = Vec3::new(1.0, 0.0, f.du);
    let xv = Vec3::new(0.0, 1.0, f.dv);
    let (vu, vv, ..) = partials(&flex.jets(u, v)?);
    let big_n = xu.cross(xv);
    let len = big_n.norm();
    let n = big_n * (1.0 / len);
    let dn = vu.cross(xv) + xu.cross(vv);
    Ok((dn - n * dn.dot(n)) * (1.0 / len))
}

/// The tangential field `m = n′ × n` of a patch under a flex.
#[derive(Debug, Clone)]
pub struct MField {
    pub patch: MongePatch,
    pub flex: FlexField,
}

impl MField {
    /// `m` from its definition.
    pub fn at(&self, u: f64, v: f64) -> Result<Vec3> {
        let n = self.patch.unit_normal(u, v)?;
        Ok(normal_velocity(&self.patch, &self.flex, u, v)?.cross(n))
    }

    /// Closed-form expansion of `m` for a Monge patch, valid when the flex
    /// equations hold:
    /// `W⁻¹ (f_u ξ_v + f_v η_v − ζ_v, −f_u ξ_u − f_v η_u + ζ_u,
    ///       −(f_u² + f_v²) η_u + f_v ζ_u − f_u W ζ_v)`.
    pub fn expanded(&self, u: f64, v: f64) -> Result<Vec3> {
        let f = self.patch.f.jet(u, v)?;
        let [xi, eta, zeta] = self.flex.jets(u, v)?;
        let (fu, fv) = (f.du, f.dv);
        let w = 1.0 + fu * fu + fv * fv;
        Ok(Vec3::new(
            fu * xi.dv + fv * eta.dv - zeta.dv,
            -fu * xi.du - fv * eta.du + zeta.du,
            -(fu * fu + fv * fv) * eta.du + fv * zeta.du - fu * w * zeta.dv,
        ) * (1.0 / w))
    }

    pub fn normal(&self, u: f64, v: f64) -> Result<Vec3> {
        self.patch.unit_normal(u, v)
    }
}

/// `m = n′ × n`, after checking that `flex` satisfies the flex equations.
pub fn m_field(patch: &MongePatch, flex: &FlexField) -> Result<MField> {
    require_flex(patch, flex, FLEX_TOLERANCE)?;
    Ok(MField {
        patch: patch.clone(),
        flex: flex.clone(),
    })
}

/// Surface-integral route, returning `H′` (half the area integral of the variation of `H dA`).
pub fn variation_surface_integral(
    patch: &MongePatch,
    flex: &FlexField,
    q: &QuadratureSpec,
) -> Result<f64> {
    require_flex(patch, flex, FLEX_TOLERANCE)?;
    surface_route(patch, flex, q)
}

fn surface_route(patch: &MongePatch, flex: &FlexField, q: &QuadratureSpec) -> Result<f64> {
    let integral = integrate_2d(
        |u, v| {
            let f = patch.f.jet(u, v)?;
            let z = flex.zeta.jet(u, v)?;
            Ok((1.0 + f.dv * f.dv) * z.duu - 2.0 * f.du * f.dv * z.duv
                + (1.0 + f.du * f.du) * z.dvv)
        },
        &patch.domain,
        q,
    )?;
    Ok(0.5 * integral)
}

/// Boundary route: `½ ∮ m·dx` along the lifted boundary curve, where
/// `dx = (du, dv, f_u du + f_v dv)`.
pub fn variation_line_integral(
    patch: &MongePatch,
    flex: &FlexField,
    q: &BoundaryQuadratureSpec,
) -> Result<f64> {
    let m = m_field(patch, flex)?;
    line_route(&m, q)
}

fn line_route(m: &MField, q: &BoundaryQuadratureSpec) -> Result<f64> {
    let circulation = integrate_one_form(
        |u, v| {
            let f = m.patch.f.jet(u, v)?;
            let mv = m.at(u, v)?;
            Ok((mv.x + f.du * mv.z, mv.y + f.dv * mv.z))
        },
        &m.patch.domain,
        q,
    )?;
    Ok(0.5 * circulation)
}

/// Half the boundary integral of the reduced one-form `P du + Q dv` with
/// `P = (1+f_u²) ζ_v − f_u η_u`, `Q = ζ_u − f_v η_u − f_u f_v ζ_v`.
///
/// Kept only as a probe: the `du` coefficient carries a sign error relative
/// to `m·dx`, so this disagrees with the other routes whenever `ζ_v` does
/// not vanish on the boundary.
pub fn printed_line_integral(
    patch: &MongePatch,
    flex: &FlexField,
    q: &BoundaryQuadratureSpec,
) -> Result<f64> {
    require_flex(patch, flex, FLEX_TOLERANCE)?;
    let circulation = integrate_one_form(
        |u, v| {
            let f = patch.f.jet(u, v)?;
            let eta = flex.eta.jet(u, v)?;
            let z = flex.zeta.jet(u, v)?;
            Ok((
                (1.0 + f.du * f.du) * z.dv - f.du * eta.du,
                z.du - f.dv * eta.du - f.du * f.dv * z.dv,
            ))
        },
        &patch.domain,
        q,
    )?;
    Ok(0.5 * circulation)
}

/// Finite-difference settings for the oracle route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdSpec {
    pub step: f64,
    /// Combine steps `h` and `h/2` to cancel the `h²` term.
    pub richardson: bool,
}

impl Default for FdSpec {
    fn default() -> Self {
        FdSpec {
            step: 1e-3,
            richardson: true,
        }
    }
}

impl FdSpec {
    pub fn new(step: f64, richardson: bool) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::invalid(format!(
                "finite-difference step {step} must be positive"
            )));
        }
        Ok(FdSpec { step, richardson })
    }

    /// Agreement tolerance against the analytic routes, `10 h²`.
    pub fn tolerance(&self) -> f64 {
        10.0 * self.step * self.step
    }
}

/// `H(ψ(S, t))` computed from the fundamental forms of the deformed patch.
pub fn deformed_total_mean_curvature(
    patch: &MongePatch,
    flex: &FlexField,
    t: f64,
    q: &QuadratureSpec,
) -> Result<f64> {
    let deformed = DeformedPatch {
        base: patch,
        flex,
        t,
    };
    total_mean_curvature_of(&deformed, q).map_err(|e| e.with_t(t))
}

/// Oracle route: `[H(ψ(S, h)) − H(ψ(S, −h))] / 2h`, optionally Richardson
/// extrapolated with `h/2`.
pub fn variation_finite_difference(
    patch: &MongePatch,
    flex: &FlexField,
    q: &QuadratureSpec,
    fd: &FdSpec,
) -> Result<f64> {
    require_flex(patch, flex, FLEX_TOLERANCE)?;
    fd_route(patch, flex, q, fd)
}

fn fd_route(patch: &MongePatch, flex: &FlexField, q: &QuadratureSpec, fd: &FdSpec) -> Result<f64> {
    let h_of = |t: f64| deformed_total_mean_curvature(patch, flex, t, q);
    if fd.richardson {
        richardson_central(h_of, 0.0, fd.step)
    } else {
        central_difference(h_of, 0.0, fd.step)
    }
}

/// Settings shared by the three routes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationSpec {
    pub quadrature: QuadratureSpec,
    pub boundary: BoundaryQuadratureSpec,
    pub fd: FdSpec,
    /// Allowed `|h_surface − h_line|`.
    pub tol_analytic: f64,
    /// Also evaluate the probe integrand, see [`printed_line_integral`].
    pub erratum_probe: bool,
}

impl Default for VariationSpec {
    fn default() -> Self {
        VariationSpec {
            quadrature: QuadratureSpec {
                nodes_per_axis: 64,
                angular_nodes: 128,
            },
            boundary: BoundaryQuadratureSpec { nodes: 256 },
            fd: FdSpec::default(),
            tol_analytic: 1e-8,
            erratum_probe: false,
        }
    }
}

/// Result of the reduced-integrand probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErratumProbe {
    /// `½ ∮` of the probe one-form.
    pub h_line_printed: f64,
    /// `|h_line_printed − h_fd|`.
    pub disc_printed_fd: f64,
    /// `|h_line_printed − h_line|`.
    pub disc_printed_line: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub h_surface: f64,
    pub h_line: f64,
    pub h_fd: f64,
    pub disc_sl: f64,
    pub disc_sf: f64,
    pub disc_lf: f64,
    pub pass: bool,
    pub tol_analytic: f64,
    pub tol_fd: f64,
    pub nodes: usize,
    pub boundary_nodes: usize,
    pub fd_step: f64,
    pub richardson: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub erratum: Option<ErratumProbe>,
}

impl VariationReport {
    pub fn from_values(h_surface: f64, h_line: f64, h_fd: f64, spec: &VariationSpec) -> Self {
        let (disc_sl, disc_sf, disc_lf) = discrepancies(h_surface, h_line, h_fd);
        let tol_fd = spec.fd.tolerance();
        VariationReport {
            h_surface,
            h_line,
            h_fd,
            disc_sl,
            disc_sf,
            disc_lf,
            pass: disc_sl <= spec.tol_analytic && disc_sf <= tol_fd,
            tol_analytic: spec.tol_analytic,
            tol_fd,
            nodes: spec.quadrature.nodes_per_axis,
            boundary_nodes: spec.boundary.nodes,
            fd_step: spec.fd.step,
            richardson: spec.fd.richardson,
            erratum: None,
        }
    }
}

/// `(|s − l|, |s − f|, |l − f|)`.
pub fn discrepancies(h_surface: f64, h_line: f64, h_fd: f64) -> (f64, f64, f64) {
    (
        (h_surface - h_line).abs(),
        (h_surface - h_fd).abs(),
        (h_line - h_fd).abs(),
    )
}

fn attribute<T>(route: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Route {
        route: route.to_string(),
        source: Box::new(e),
    })
}

/// All three routes plus their pairwise discrepancies.
pub fn variation_report(
    patch: &MongePatch,
    flex: &FlexField,
    spec: &VariationSpec,
) -> Result<VariationReport> {
    let m = m_field(patch, flex)?;
    let h_surface = attribute("surface", surface_route(patch, flex, &spec.quadrature))?;
    let h_line = attribute("line", line_route(&m, &spec.boundary))?;
    let h_fd = attribute(
        "finite-difference",
        fd_route(patch, flex, &spec.quadrature, &spec.fd),
    )?;
    let mut report = VariationReport::from_values(h_surface, h_line, h_fd, spec);
    if spec.erratum_probe {
        let printed = attribute(
            "printed-line",
            printed_line_integral(patch, flex, &spec.boundary),
        )?;
        report.erratum = Some(ErratumProbe {
            h_line_printed: printed,
            disc_printed_fd: (printed - h_fd).abs(),
            disc_printed_line: (printed - h_line).abs(),
        });
    }
    Ok(report)
}

/// One row of an invariant sweep over `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub total_mean_curvature: Option<f64>,
    pub area: Option<f64>,
    pub volume: Option<f64>,
    pub total_gauss_curvature: Option<f64>,
    /// Why the row could not be evaluated.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

/// Total mean curvature, area, projected volume and total Gauss curvature
/// of `ψ(S, t)` for each requested `t`. A failing row is marked and the
/// sweep carries on.
pub fn invariant_sweep(
    patch: &MongePatch,
    flex: &FlexField,
    t_values: &[f64],
    q: &QuadratureSpec,
) -> Vec<SweepRow> {
    t_values
        .iter()
        .map(|&t| {
            let deformed = DeformedPatch {
                base: patch,
                flex,
                t,
            };
            let row = (|| -> Result<[f64; 4]> {
                Ok([
                    total_mean_curvature_of(&deformed, q)?,
                    area_of(&deformed, q)?,
                    projected_volume_of(&deformed, q)?,
                    total_gauss_curvature_of(&deformed, q)?,
                ])
            })();
            match row {
                Ok([h, a, vol, k]) => SweepRow {
                    t,
                    total_mean_curvature: Some(h),
                    area: Some(a),
                    volume: Some(vol),
                    total_gauss_curvature: Some(k),
                    error: None,
                },
                Err(e) => SweepRow {
                    t,
                    total_mean_curvature: None,
                    area: None,
                    volume: None,
                    total_gauss_curvature: None,
                    error: Some(e.with_t(t).to_string()),
                },
            }
        })
        .collect()
}

/// Least-squares polynomial coefficients, lowest degree first.
pub fn fit_polynomial(xs: &[f64], ys: &[f64], degree: usize) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || xs.len() <= degree {
        return Err(Error::invalid(format!(
            "need more than {degree} points with matching values to fit a degree-{degree} polynomial"
        )));
    }
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let a = Mat::<f64>::from_fn(xs.len(), degree + 1, |i, k| (xs[i] / scale).powi(k as i32));
    let b = Mat::<f64>::from_fn(ys.len(), 1, |i, _| ys[i]);
    let c = a.qr().solve_lstsq(&b);
    Ok((0..=degree)
        .map(|k| c[(k, 0)] / scale.powi(k as i32))
        .collect())
}

/// Height of the sweep's deformed surface, for callers that want to plot it.
pub fn deformed_height(
    patch: &MongePatch,
    flex: &FlexField,
    t: f64,
    u: f64,
    v: f64,
) -> Result<f64> {
    Ok(patch.f.value(u, v)? + t * flex.zeta.value(u, v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flex::{rigid_motion_flex, RigidMotion};

    fn flat(domain: Domain2) -> MongePatch {
        MongePatch::from_expression("0", domain).unwrap()
    }

    fn spec() -> VariationSpec {
        VariationSpec::default()
    }

    #[test]
    fn normal_velocity_on_the_plane() {
        let p = flat(Domain2::unit_square());
        let flex = FlexField::parse("0", "0", "u^2*v + sin(v)").unwrap();
        let (u, v) = (0.3, 0.6);
        let nv = normal_velocity(&p, &flex, u, v).unwrap();
        let expected = Vec3::new(-2.0 * u * v, -(u * u + v.cos()), 0.0);
        assert!((nv - expected).max_abs() < 1e-15);
    }

    #[test]
    fn translations_and_normal_rotations_fix_the_normal() {
        let bowl = MongePatch::from_expression("(u^2+v^2)/2", Domain2::unit_square()).unwrap();
        let shift = rigid_motion_flex(
            RigidMotion::new(Vec3::new(1.0, 2.0, 3.0), Vec3::ZERO),
            &bowl,
        );
        assert_eq!(
            normal_velocity(&bowl, &shift, 0.2, 0.9).unwrap(),
            Vec3::ZERO
        );
        let p = flat(Domain2::unit_square());
        let spin = rigid_motion_flex(RigidMotion::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 1.0)), &p);
        assert_eq!(normal_velocity(&p, &spin, 0.2, 0.9).unwrap(), Vec3::ZERO);
    }

    #[test]
    fn m_field_examples() {
        let p = flat(Domain2::unit_square());
        let m = m_field(&p, &FlexField::parse("0", "0", "u").unwrap()).unwrap();
        assert_eq!(m.at(0.4, 0.1).unwrap(), Vec3::new(0.0, 1.0, 0.0));
        let m = m_field(&p, &FlexField::parse("0", "0", "u*v^2").unwrap()).unwrap();
        let (u, v) = (0.4, 0.7);
        assert!((m.at(u, v).unwrap() - Vec3::new(-2.0 * u * v, v * v, 0.0)).max_abs() < 1e-15);
    }

    #[test]
    fn m_of_a_rotation() {
        let bowl = MongePatch::from_expression("(u^2+v^2)/2", Domain2::unit_square()).unwrap();
        let b = Vec3::new(0.4, -1.0, 0.7);
        let m = m_field(
            &bowl,
            &rigid_motion_flex(RigidMotion::new(Vec3::ZERO, b), &bowl),
        )
        .unwrap();
        let (u, v) = (0.3, 0.8);
        let n = bowl.unit_normal(u, v).unwrap();
        let expected = n * b.dot(n) - b;
        assert!((m.at(u, v).unwrap() - expected).max_abs() < 1e-15);
        // b parallel to the normal at the vertex gives m = 0 there
        let m = m_field(
            &bowl,
            &rigid_motion_flex(
                RigidMotion::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 2.0)),
                &bowl,
            ),
        )
        .unwrap();
        assert_eq!(m.at(0.0, 0.0).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn m_field_requires_a_flex() {
        let p = flat(Domain2::unit_square());
        let err = m_field(&p, &FlexField::parse("u", "0", "0").unwrap()).unwrap_err();
        assert!(matches!(err, Error::NotAFlex { residual, .. } if residual == 1.0));
    }

    #[test]
    fn expanded_m_matches_definition() {
        let bowl = MongePatch::from_expression(
            "(u^2+v^2)/2",
            Domain2::rect(-1.0, 1.0, -1.0, 1.0).unwrap(),
        )
        .unwrap();
        let flex = FlexField::parse("-u^2*v/2 - v^3/6", "-u*v^2/2 - u^3/6", "u*v").unwrap();
        let m = m_field(&bowl, &flex).unwrap();
        for &(u, v) in &[(0.3, 0.55), (-0.8, 0.1), (0.9, -0.4)] {
            let d = m.at(u, v).unwrap() - m.expanded(u, v).unwrap();
            assert!(d.max_abs() < 1e-14, "{d:?}");
            assert!(m.at(u, v).unwrap().dot(m.normal(u, v).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn surface_route_examples() {
        let p = flat(Domain2::unit_square());
        let q = &spec().quadrature;
        let bowl = FlexField::parse("0", "0", "u^2+v^2").unwrap();
        assert!((variation_surface_integral(&p, &bowl, q).unwrap() - 2.0).abs() < 1e-13);
        let saddle = FlexField::parse("0", "0", "u^2-v^2").unwrap();
        assert_eq!(variation_surface_integral(&p, &saddle, q).unwrap(), 0.0);
    }

    #[test]
    fn line_route_on_the_plane() {
        let p = flat(Domain2::unit_square());
        let bowl = FlexField::parse("0", "0", "u^2+v^2").unwrap();
        let h = variation_line_integral(&p, &bowl, &spec().boundary).unwrap();
        assert!((h - 2.0).abs() < 1e-13, "{h}");
    }

    #[test]
    fn printed_form_loses_the_zeta_v_term() {
        let p = flat(Domain2::unit_square());
        let bowl = FlexField::parse("0", "0", "u^2+v^2").unwrap();
        let printed = printed_line_integral(&p, &bowl, &spec().boundary).unwrap();
        assert!(printed.abs() < 1e-13, "{printed}");
    }

    #[test]
    fn fd_route_and_linearity() {
        let p = flat(Domain2::unit_square());
        let q = QuadratureSpec::new(24).unwrap();
        let bowl = FlexField::parse("0", "0", "u^2+v^2").unwrap();
        let fd = FdSpec::default();
        let h = variation_finite_difference(&p, &bowl, &q, &fd).unwrap();
        assert!((h - 2.0).abs() < 1e-7, "{h}");
        let h3 = variation_finite_difference(&p, &bowl.scaled(3.0), &q, &fd).unwrap();
        assert!((h3 - 3.0 * h).abs() < 1e-7, "{h3}");
    }

    #[test]
    fn report_flags_and_discrepancies() {
        let p = flat(Domain2::unit_square());
        let bowl = FlexField::parse("0", "0", "u^2+v^2").unwrap();
        let r = variation_report(&p, &bowl, &spec()).unwrap();
        assert!(r.pass);
        assert_eq!(r.disc_sl, (r.h_surface - r.h_line).abs());
        assert_eq!(r.disc_sf, (r.h_surface - r.h_fd).abs());
        assert_eq!(r.disc_lf, (r.h_line - r.h_fd).abs());
        assert!(r.erratum.is_none());
        let bad = FlexField::parse("u", "0", "0").unwrap();
        assert!(matches!(
            variation_report(&p, &bad, &spec()),
            Err(Error::NotAFlex { .. })
        ));
    }

    #[test]
    fn deformed_patch_at_zero_is_the_base() {
        let bowl = MongePatch::from_expression("(u^2+v^2)/2", Domain2::unit_square()).unwrap();
        let flex = FlexField::parse("-2*u^3/3", "2*v^3/3", "u^2 - v^2").unwrap();
        let d = DeformedPatch {
            base: &bowl,
            flex: &flex,
            t: 0.0,
        };
        assert_eq!(
            d.position(0.3, 0.2).unwrap(),
            bowl.position(0.3, 0.2).unwrap()
        );
    }

    #[test]
    fn sweep_marks_failing_rows() {
        let p = flat(Domain2::unit_square());
        // at t = -1 the parametrization collapses: ψ_u = (1 + tξ_u, ...) = 0
        let flex = FlexField::parse("u", "v", "0").unwrap();
        let rows = invariant_sweep(
            &p,
            &flex,
            &[0.0, -1.0, 0.5],
            &QuadratureSpec::new(4).unwrap(),
        );
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.as_deref().unwrap().contains("t = -1"));
        assert!(rows[2].error.is_none());
        assert!((rows[2].area.unwrap() - 2.25).abs() < 1e-14);
    }

    #[test]
    fn polynomial_fit_recovers_coefficients() {
        let xs: Vec<f64> = (-5..=5).map(|k| k as f64 * 0.02).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x).collect();
        let c = fit_polynomial(&xs, &ys, 2).unwrap();
        assert!(
            (c[0] - 1.0).abs() < 1e-12 && (c[1] + 2.0).abs() < 1e-12 && (c[2] - 0.5).abs() < 1e-10
        );
        assert!(fit_polynomial(&xs[..2], &ys[..2], 2).is_err());
    }
}
