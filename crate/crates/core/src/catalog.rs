//! Named surfaces, domains and flexes, and the verification catalog.
//!
//! Text forms accepted here are the ones the command line uses:
//!
//! * surfaces: `plane`, `paraboloid`, `saddle`, `cap-R-r`, `dome-R-r`, or
//!   any expression in `u, v`;
//! * domains: `square`, `rect:u0,u1,v0,v1`, `disk:cu,cv,r`;
//! * flexes: `xi,eta,zeta` expressions, `translation`, `rotation`,
//!   `rigid:a1,a2,a3,b1,b2,b3`, `bump`, `para-harmonic`, `para-twist`, or
//!   several of these joined with `|` (summed), or `construct:NUxNV`.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::field::expression_field;
use crate::flex::{
    construct_flex_numeric, rigid_motion_flex, DiscreteFlex, FlexField, RigidMotion,
};
use crate::quadrature::Domain2;
use crate::surface::MongePatch;
use crate::vec3::Vec3;

fn parse_numbers(text: &str, count: usize, what: &str) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::invalid(format!("{what} `{text}`: {e}")))?;
    if values.len() != count {
        return Err(Error::invalid(format!(
            "{what} `{text}` needs {count} comma-separated numbers, got {}",
            values.len()
        )));
    }
    Ok(values)
}

/// Parse a domain description.
pub fn parse_domain(text: &str) -> Result<Domain2> {
    let text = text.trim();
    if text == "square" || text == "unit-square" {
        return Ok(Domain2::unit_square());
    }
    if let Some(rest) = text.strip_prefix("rect:") {
        let x = parse_numbers(rest, 4, "rectangle")?;
        return Domain2::rect(x[0], x[1], x[2], x[3]);
    }
    if let Some(rest) = text.strip_prefix("disk:") {
        let x = parse_numbers(rest, 3, "disk")?;
        return Domain2::disk(x[0], x[1], x[2]);
    }
    Err(Error::invalid(format!(
        "unknown domain `{text}` (expected square, rect:u0,u1,v0,v1 or disk:cu,cv,r)"
    )))
}

/// Canonical text form of a domain, accepted by [`parse_domain`].
pub fn format_domain(d: &Domain2) -> String {
    match *d {
        Domain2::Rect {
            u_min,
            u_max,
            v_min,
            v_max,
        } => format!("rect:{u_min},{u_max},{v_min},{v_max}"),
        Domain2::Disk {
            center_u,
            center_v,
            radius,
        } => format!("disk:{center_u},{center_v},{radius}"),
    }
}

/// A surface given by catalog name or by a height expression.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceSpec {
    source: String,
    height: Expression,
    default_domain: Domain2,
}

fn cap_parameters(rest: &str, name: &str) -> Result<(f64, f64)> {
    let (r_big, r_small) = rest
        .split_once('-')
        .ok_or_else(|| Error::invalid(format!("`{name}` needs the form {name}-R-r")))?;
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| Error::invalid(format!("`{name}` parameter `{s}`: {e}")))
    };
    let (big, small) = (parse(r_big)?, parse(r_small)?);
    if !(big.is_finite() && small > 0.0 && small < big) {
        return Err(Error::invalid(format!(
            "`{name}` needs 0 < r < R, got R = {big}, r = {small}"
        )));
    }
    Ok((big, small))
}

impl SurfaceSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let source = text.trim().to_string();
        let square = Domain2::unit_square();
        let centred = Domain2::Rect {
            u_min: -1.0,
            u_max: 1.0,
            v_min: -1.0,
            v_max: 1.0,
        };
        let (height, default_domain) = match source.as_str() {
            "plane" => (Expression::num(0.0), square),
            "paraboloid" => (Expression::parse("(u^2+v^2)/2")?, centred),
            "saddle" => (Expression::parse("u*v")?, centred),
            "cap" => cap(1.0, 0.5)?,
            s if s.starts_with("cap-") => {
                let (big, small) = cap_parameters(&s[4..], "cap")?;
                cap(big, small)?
            }
            s if s.starts_with("dome-") => {
                let (big, small) = cap_parameters(&s[5..], "dome")?;
                let e = Expression::parse(&format!("sqrt({} - u^2 - v^2)", big * big))?;
                (e, Domain2::disk(0.0, 0.0, small)?)
            }
            s => (Expression::parse(s)?, square),
        };
        Ok(SurfaceSpec {
            source,
            height,
            default_domain,
        })
    }

    pub fn height(&self) -> &Expression {
        &self.height
    }

    pub fn default_domain(&self) -> Domain2 {
        self.default_domain
    }

    /// The patch over `domain`, or over the catalog default.
    pub fn patch(&self, domain: Option<Domain2>) -> MongePatch {
        MongePatch::new(
            expression_field(self.height.clone()),
            domain.unwrap_or(self.default_domain),
        )
    }
}

/// Spherical cap of radius `R` over the disk of radius `r`, opening upward
/// so that the upward normal points to the centre and `H = 1/R > 0`.
fn cap(big: f64, small: f64) -> Result<(Expression, Domain2)> {
    let e = Expression::parse(&format!("{big} - sqrt({} - u^2 - v^2)", big * big))?;
    Ok((e, Domain2::disk(0.0, 0.0, small)?))
}

impl fmt::Display for SurfaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// One summand of a flex description.
#[derive(Debug, Clone, PartialEq)]
pub enum FlexTerm {
    Components(Box<[Expression; 3]>),
    Rigid(RigidMotion),
    /// `((u−a)(b−u)(v−c)(d−v))³` on a rectangle, `(r² − ρ²)³` on a disk,
    /// normalized to peak 1. It vanishes with its gradient on the boundary.
    Bump,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlexKind {
    Sum(Vec<FlexTerm>),
    Construct { n_u: usize, n_v: usize },
}

/// A flex given by text.
#[derive(Debug, Clone, PartialEq)]
pub struct FlexSpec {
    source: String,
    pub kind: FlexKind,
}

/// A flex ready for use on a particular patch.
#[derive(Debug, Clone)]
pub struct ResolvedFlex {
    pub field: FlexField,
    /// Present when the field interpolates a constructed discrete flex.
    pub discrete: Option<DiscreteFlex>,
}

fn parse_term(text: &str) -> Result<FlexTerm> {
    let text = text.trim();
    let rigid = |a: [f64; 3], b: [f64; 3]| {
        FlexTerm::Rigid(RigidMotion::new(
            Vec3::new(a[0], a[1], a[2]),
            Vec3::new(b[0], b[1], b[2]),
        ))
    };
    let components = |xi: &str, eta: &str, zeta: &str| -> Result<FlexTerm> {
        Ok(FlexTerm::Components(Box::new([
            Expression::parse(xi)?,
            Expression::parse(eta)?,
            Expression::parse(zeta)?,
        ])))
    };
    match text {
        "translation" => Ok(rigid([0.0, 0.0, 1.0], [0.0; 3])),
        "rotation" => Ok(rigid([0.0; 3], [1.0, 0.0, 0.0])),
        "bump" => Ok(FlexTerm::Bump),
        // nontrivial flexes of the paraboloid (u² + v²)/2
        "para-harmonic" => components("-2*u^3/3", "2*v^3/3", "u^2 - v^2"),
        "para-twist" => components("-u^2*v/2 - v^3/6", "-u*v^2/2 - u^3/6", "u*v"),
        t if t.starts_with("rigid:") => {
            let x = parse_numbers(&t[6..], 6, "rigid motion")?;
            Ok(rigid([x[0], x[1], x[2]], [x[3], x[4], x[5]]))
        }
        t => {
            let parts: Vec<&str> = t.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::invalid(format!(
                    "flex `{t}` is not a catalog name and does not have three comma-separated components"
                )));
            }
            components(parts[0], parts[1], parts[2])
        }
    }
}

fn parse_grid_size(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::invalid(format!("grid size `{text}` must look like 12x12"));
    let (a, b) = text.split_once('x').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn bump_on(domain: &Domain2) -> Result<Expression> {
    let text = match *domain {
        Domain2::Rect {
            u_min,
            u_max,
            v_min,
            v_max,
        } => {
            let peak = (u_max - u_min).powi(2) * (v_max - v_min).powi(2) / 16.0;
            format!("((u - ({u_min}))*(({u_max}) - u)*(v - ({v_min}))*(({v_max}) - v)/{peak})^3")
        }
        Domain2::Disk {
            center_u,
            center_v,
            radius,
        } => {
            let r2 = radius * radius;
            format!("(1 - ((u - ({center_u}))^2 + (v - ({center_v}))^2)/{r2})^3")
        }
    };
    Expression::parse(&text)
}

impl FlexSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let source = text.trim().to_string();
        let kind = if let Some(size) = source.strip_prefix("construct:") {
            let (n_u, n_v) = parse_grid_size(size)?;
            FlexKind::Construct { n_u, n_v }
        } else {
            FlexKind::Sum(source.split('|').map(parse_term).collect::<Result<_>>()?)
        };
        Ok(FlexSpec { source, kind })
    }

    pub fn is_constructed(&self) -> bool {
        matches!(self.kind, FlexKind::Construct { .. })
    }

    /// Bind the flex to `patch`; rigid terms follow the patch's shape.
    pub fn resolve(&self, patch: &MongePatch) -> Result<ResolvedFlex> {
        match &self.kind {
            FlexKind::Construct { n_u, n_v } => {
                let d = construct_flex_numeric(patch, *n_u, *n_v)?;
                Ok(ResolvedFlex {
                    field: d.interpolate()?,
                    discrete: Some(d),
                })
            }
            FlexKind::Sum(terms) => {
                let mut total: Option<FlexField> = None;
                for term in terms {
                    let field = match term {
                        FlexTerm::Components(c) => {
                            let [xi, eta, zeta] = (**c).clone();
                            FlexField::new(
                                expression_field(xi),
                                expression_field(eta),
                                expression_field(zeta),
                            )
                        }
                        FlexTerm::Rigid(m) => rigid_motion_flex(*m, patch),
                        FlexTerm::Bump => FlexField::new(
                            expression_field(Expression::num(0.0)),
                            expression_field(Expression::num(0.0)),
                            expression_field(bump_on(&patch.domain)?),
                        ),
                    };
                    total = Some(match total {
                        None => field,
                        Some(acc) => acc.sum(&field),
                    });
                }
                Ok(ResolvedFlex {
                    field: total.ok_or_else(|| Error::invalid("empty flex description"))?,
                    discrete: None,
                })
            }
        }
    }
}

impl fmt::Display for FlexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

/// A (patch, flex) pair with its known variation, if any.
#[derive(Debug, Clone)]
pub struct CatalogPair {
    pub name: &'static str,
    pub surface: &'static str,
    pub flex: &'static str,
    /// `H′` derived by hand.
    pub expected: Option<f64>,
}

impl CatalogPair {
    pub fn resolve(&self) -> Result<(MongePatch, FlexField)> {
        let patch = SurfaceSpec::parse(self.surface)?.patch(None);
        let flex = FlexSpec::parse(self.flex)?.resolve(&patch)?.field;
        Ok((patch, flex))
    }
}

/// Pairs on which the three routes are cross-checked.
pub fn verification_catalog() -> Vec<CatalogPair> {
    vec![
        CatalogPair {
            name: "plane+bowl",
            surface: "plane",
            flex: "0,0,u^2+v^2",
            expected: Some(2.0),
        },
        CatalogPair {
            name: "plane+harmonic",
            surface: "plane",
            flex: "0,0,u^2-v^2",
            expected: Some(0.0),
        },
        CatalogPair {
            // ½ ∬ 6u over the unit square
            name: "plane+cubic",
            surface: "plane",
            flex: "0,0,u*v+u^3",
            expected: Some(1.5),
        },
        CatalogPair {
            name: "plane+bump",
            surface: "plane",
            flex: "bump",
            expected: Some(0.0),
        },
        CatalogPair {
            name: "paraboloid+translation",
            surface: "paraboloid",
            flex: "translation",
            expected: Some(0.0),
        },
        CatalogPair {
            name: "paraboloid+rotation",
            surface: "paraboloid",
            flex: "rotation",
            expected: Some(0.0),
        },
        CatalogPair {
            name: "cap+rigid",
            surface: "cap-1-0.5",
            flex: "rigid:0.2,-0.4,1,0.3,0.5,-0.7",
            expected: Some(0.0),
        },
        CatalogPair {
            name: "plane+rigid+bowl",
            surface: "plane",
            flex: "rigid:1,-1,0.5,0.3,-0.2,0.7|0,0,u^2+v^2",
            expected: Some(2.0),
        },
    ]
}
