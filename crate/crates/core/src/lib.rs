//! Total mean curvature of surface patches and its first variation under
//! infinitesimal flexes.
//!
//! The variation `H′(S)` is computed three independent ways and compared:
//! a surface integral of second derivatives of the normal component of the
//! flex, the boundary circulation `½ ∮ m·dx` of the field `m = n′ × n`, and a
//! central difference of `H(ψ(S, t))` in the deformation parameter.
//!
//! ```
//! use flexcurv::{catalog::SurfaceSpec, FlexField, VariationSpec, variation_report};
//!
//! let plane = SurfaceSpec::parse("plane").unwrap().patch(None);
//! let flex = FlexField::parse("0", "0", "u^2+v^2").unwrap();
//! let report = variation_report(&plane, &flex, &VariationSpec::default()).unwrap();
//! assert!(report.pass);
//! assert!((report.h_line - 2.0).abs() < 1e-10);
//! ```

pub mod catalog;
pub mod error;
pub mod expr;
pub mod field;
pub mod flex;
pub mod jet;
pub mod quadrature;
pub mod surface;
pub mod variation;
pub mod vec3;

pub use error::{Error, Result};
pub use expr::Expression;
pub use field::{Field, ScalarField2};
pub use flex::{
    check_flex, construct_flex_numeric, rigid_motion_flex, DiscreteFlex, FlexCheck, FlexField,
    FlexOutcome, Grid, RigidMotion,
};
pub use jet::Jet2;
pub use quadrature::{BoundaryQuadratureSpec, Domain2, QuadratureSpec};
pub use surface::{MongePatch, ParamPatch, Surface};
pub use variation::{variation_report, FdSpec, VariationReport, VariationSpec};
pub use vec3::Vec3;
