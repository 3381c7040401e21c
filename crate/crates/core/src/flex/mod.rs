//! Infinitesimal flexes: candidate velocity fields, the first-order isometry
//! system and its differentiated identities, rigid motions, and the
//! discrete nullspace construction.

mod bicubic;
mod discrete;

use std::sync::Arc;

pub use bicubic::BicubicField;
pub use discrete::{
    construct_flex_numeric, rigid_basis, sample_flex, triviality_score, triviality_score_of,
    DiscreteFlex, FlexOutcome, Grid, RANK_TOLERANCE, TRIVIALITY_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{linear_combination, parse_field, Field, ScalarField2};
use crate::jet::Jet2;
use crate::surface::{partials, MongePatch, ParamPatch, Surface};
use crate::vec3::Vec3;

/// Velocity field `v = (ξ, η, ζ)` over the parameter domain.
#[derive(Debug, Clone)]
pub struct FlexField {
    pub xi: Field,
    pub eta: Field,
    pub zeta: Field,
}

impl FlexField {
    pub fn new(xi: Field, eta: Field, zeta: Field) -> Self {
        FlexField { xi, eta, zeta }
    }

    pub fn parse(xi: &str, eta: &str, zeta: &str) -> Result<Self> {
        Ok(FlexField::new(
            parse_field(xi)?,
            parse_field(eta)?,
            parse_field(zeta)?,
        ))
    }

    pub fn jets(&self, u: f64, v: f64) -> Result<[Jet2; 3]> {
        Ok([
            self.xi.jet(u, v)?,
            self.eta.jet(u, v)?,
            self.zeta.jet(u, v)?,
        ])
    }

    pub fn velocity(&self, u: f64, v: f64) -> Result<Vec3> {
        Ok(Vec3::new(
            self.xi.value(u, v)?,
            self.eta.value(u, v)?,
            self.zeta.value(u, v)?,
        ))
    }

    pub fn scaled(&self, k: f64) -> FlexField {
        let s = |f: &Field| linear_combination(vec![(k, f.clone())]);
        FlexField::new(s(&self.xi), s(&self.eta), s(&self.zeta))
    }

    pub fn sum(&self, other: &FlexField) -> FlexField {
        let s = |a: &Field, b: &Field| linear_combination(vec![(1.0, a.clone()), (1.0, b.clone())]);
        FlexField::new(
            s(&self.xi, &other.xi),
            s(&self.eta, &other.eta),
            s(&self.zeta, &other.zeta),
        )
    }

    pub fn describe(&self) -> String {
        format!(
            "{}, {}, {}",
            self.xi.describe(),
            self.eta.describe(),
            self.zeta.describe()
        )
    }
}

/// Infinitesimal rigid motion `x ↦ a + b × x`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RigidMotion {
    pub translation: Vec3,
    pub rotation: Vec3,
}

impl RigidMotion {
    pub fn new(translation: Vec3, rotation: Vec3) -> Self {
        RigidMotion {
            translation,
            rotation,
        }
    }

    pub fn velocity_at(&self, x: Vec3) -> Vec3 {
        self.translation + self.rotation.cross(x)
    }
}

/// One component of `a + b × x(u, v)` for a given position map.
#[derive(Debug, Clone)]
struct RigidComponent {
    motion: RigidMotion,
    position: [Field; 3],
    component: usize,
}

impl ScalarField2 for RigidComponent {
    fn jet(&self, u: f64, v: f64) -> Result<Jet2> {
        let x = [
            self.position[0].jet(u, v)?,
            self.position[1].jet(u, v)?,
            self.position[2].jet(u, v)?,
        ];
        let a = self.motion.translation.to_array();
        let b = self.motion.rotation.to_array();
        let (i, j, k) = match self.component {
            0 => (0, 1, 2),
            1 => (1, 2, 0),
            _ => (2, 0, 1),
        };
        // (b × x)_i = b_j x_k − b_k x_j
        Ok(x[k].scale(b[j]) - x[j].scale(b[k]) + a[i])
    }

    fn describe(&self) -> String {
        let (a, b) = (self.motion.translation, self.motion.rotation);
        format!(
            "rigid[{}](a=({}, {}, {}), b=({}, {}, {}))",
            ["xi", "eta", "zeta"][self.component.min(2)],
            a.x,
            a.y,
            a.z,
            b.x,
            b.y,
            b.z
        )
    }
}

/// The rigid-motion velocity field bound to a Monge patch.
pub fn rigid_motion_flex(motion: RigidMotion, patch: &MongePatch) -> FlexField {
    rigid_motion_flex_on(motion, &patch.to_param_patch())
}

/// The rigid-motion velocity field bound to a general patch.
pub fn rigid_motion_flex_on(motion: RigidMotion, patch: &ParamPatch) -> FlexField {
    let c = |component| -> Field {
        Arc::new(RigidComponent {
            motion,
            position: patch.x.clone(),
            component,
        })
    };
    FlexField::new(c(0), c(1), c(2))
}

/// `(x_u·v_u, x_u·v_v + x_v·v_u, x_v·v_v)` for any parametrization.
pub fn flex_residuals_general(
    patch: &dyn Surface,
    flex: &FlexField,
    u: f64,
    v: f64,
) -> Result<[f64; 3]> {
    let (xu, xv, ..) = partials(&patch.position(u, v)?);
    let (vu, vv, ..) = partials(&flex.jets(u, v)?);
    Ok([xu.dot(vu), xu.dot(vv) + xv.dot(vu), xv.dot(vv)])
}

/// Monge form of the first-order isometry system:
/// `(ξ_u + f_u ζ_u, ξ_v + η_u + f_v ζ_u + f_u ζ_v, η_v + f_v ζ_v)`.
pub fn flex_residuals_monge(
    patch: &MongePatch,
    flex: &FlexField,
    u: f64,
    v: f64,
) -> Result<[f64; 3]> {
    let f = patch.f.jet(u, v)?;
    let [xi, eta, zeta] = flex.jets(u, v)?;
    Ok([
        xi.du + f.du * zeta.du,
        xi.dv + eta.du + f.dv * zeta.du + f.du * zeta.dv,
        eta.dv + f.dv * zeta.dv,
    ])
}

/// The six second-derivative identities implied by the first-order system,
/// as left-minus-right residuals in the order
/// `ξ_uu, ξ_uv, ξ_vv, η_uu, η_uv, η_vv`.
pub fn second_order_identities(
    patch: &MongePatch,
    flex: &FlexField,
    u: f64,
    v: f64,
) -> Result<[f64; 6]> {
    let f = patch.f.jet(u, v)?;
    let [xi, eta, z] = flex.jets(u, v)?;
    Ok([
        xi.duu + f.duu * z.du + f.du * z.duu,
        xi.duv + f.duv * z.du + f.du * z.duv,
        xi.dvv + f.dvv * z.du + f.du * z.dvv,
        eta.duu + f.duu * z.dv + f.dv * z.duu,
        eta.duv + f.duv * z.dv + f.dv * z.duv,
        eta.dvv + f.dvv * z.dv + f.dv * z.dvv,
    ])
}

/// Worst residuals of a candidate flex over a sample grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlexCheck {
    /// Max |residual| of the first-order system.
    pub first_order: f64,
    pub first_order_at: (f64, f64),
    /// Max |residual| of the differentiated identities.
    pub second_order: f64,
    pub second_order_at: (f64, f64),
    pub samples: usize,
}

impl FlexCheck {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.first_order <= tolerance && self.second_order <= tolerance
    }
}

/// Sample points used by [`check_flex`] and the variation preconditions.
pub const FLEX_SAMPLES_PER_AXIS: usize = 10;

/// Residual tolerance for accepting a field as a flex.
pub const FLEX_TOLERANCE: f64 = 1e-8;

pub fn check_flex(patch: &MongePatch, flex: &FlexField, per_axis: usize) -> Result<FlexCheck> {
    let pts = patch.domain.sample_points(per_axis);
    let mut out = FlexCheck {
        first_order: 0.0,
        first_order_at: pts[0],
        second_order: 0.0,
        second_order_at: pts[0],
        samples: pts.len(),
    };
    for &(u, v) in &pts {
        let r1 = flex_residuals_monge(patch, flex, u, v)?;
        let m1 = r1.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if m1 > out.first_order {
            out.first_order = m1;
            out.first_order_at = (u, v);
        }
        let r2 = second_order_identities(patch, flex, u, v)?;
        let m2 = r2.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if m2 > out.second_order {
            out.second_order = m2;
            out.second_order_at = (u, v);
        }
    }
    Ok(out)
}

/// Fails with [`Error::NotAFlex`] unless the first-order residuals vanish
/// to `tolerance` on the standard sample grid.
pub fn require_flex(patch: &MongePatch, flex: &FlexField, tolerance: f64) -> Result<()> {
    let pts = patch.domain.sample_points(FLEX_SAMPLES_PER_AXIS);
    let mut worst = (0.0f64, pts[0]);
    for &(u, v) in &pts {
        let r = flex_residuals_monge(patch, flex, u, v)?;
        let m = r.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if m > worst.0 || m.is_nan() {
            worst = (m, (u, v));
        }
    }
    if worst.0 <= tolerance {
        Ok(())
    } else {
        Err(Error::NotAFlex {
            residual: worst.0,
            tolerance,
            u: worst.1 .0,
            v: worst.1 .1,
        })
    }
}
