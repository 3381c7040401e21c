use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Expected-token classes reported by the expression parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expected {
    Number,
    Identifier,
    LeftParen,
    RightParen,
    Minus,
    Operator,
    EndOfInput,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expected::Number => "number",
            Expected::Identifier => "identifier",
            Expected::LeftParen => "'('",
            Expected::RightParen => "')'",
            Expected::Minus => "'-'",
            Expected::Operator => "operator",
            Expected::EndOfInput => "end of input",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("syntax error at byte {offset}: found {found}, expected one of {}", join_expected(.expected))]
pub struct SyntaxError {
    pub offset: usize,
    pub found: String,
    pub expected: Vec<Expected>,
}

fn join_expected(expected: &[Expected]) -> String {
    expected
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    /// An operation was evaluated outside the set where it is defined.
    #[error("domain error in `{expr}` at (u, v) = ({u}, {v}): {reason}")]
    Domain {
        expr: String,
        u: f64,
        v: f64,
        reason: String,
    },

    #[error("surface is not regular at (u, v) = ({u}, {v}){}", fmt_t(*.t))]
    Irregular { u: f64, v: f64, t: Option<f64> },

    #[error("curve has zero speed at parameter {s}")]
    ZeroSpeed { s: f64 },

    #[error(
        "field is not an infinitesimal flex: residual {residual:.3e} exceeds {tolerance:.1e} at (u, v) = ({u}, {v})"
    )]
    NotAFlex {
        residual: f64,
        tolerance: f64,
        u: f64,
        v: f64,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("serialization failed: {0}")]
    Serialize(String),

    /// A failure inside one of the variation routes, tagged with its name.
    #[error("{route} route: {source}")]
    Route { route: String, source: Box<Error> },
}

fn fmt_t(t: Option<f64>) -> String {
    t.map(|t| format!(" for t = {t}")).unwrap_or_default()
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// True for failures of the numerics at run time (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Domain { .. } | Error::Irregular { .. } | Error::ZeroSpeed { .. } => true,
            Error::Route { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn with_t(self, t: f64) -> Self {
        match self {
            Error::Irregular { u, v, .. } => Error::Irregular { u, v, t: Some(t) },
            Error::Route { route, source } => Error::Route {
                route,
                source: Box::new(source.with_t(t)),
            },
            other => other,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}
