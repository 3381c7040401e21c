//! Scalar fields on the parameter plane.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::expr::Expression;
use crate::jet::Jet2;

/// A twice-differentiable scalar function of `(u, v)`.
pub trait ScalarField2: Send + Sync + fmt::Debug {
    fn jet(&self, u: f64, v: f64) -> Result<Jet2>;

    fn value(&self, u: f64, v: f64) -> Result<f64> {
        Ok(self.jet(u, v)?.value)
    }

    /// Human-readable form, used in reports.
    fn describe(&self) -> String;
}

/// Shared, immutable handle to a scalar field.
pub type Field = Arc<dyn ScalarField2>;

impl ScalarField2 for Expression {
    fn jet(&self, u: f64, v: f64) -> Result<Jet2> {
        self.eval_jet2(u, v)
    }

    fn value(&self, u: f64, v: f64) -> Result<f64> {
        self.eval(u, v)
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

pub fn expression_field(e: Expression) -> Field {
    Arc::new(e)
}

/// Parse `source` into a shareable field.
pub fn parse_field(source: &str) -> Result<Field> {
    Ok(Arc::new(Expression::parse(source)?))
}

pub fn constant_field(c: f64) -> Field {
    Arc::new(Expression::num(c))
}

/// `Σ cᵢ fᵢ`, evaluated term by term.
#[derive(Debug, Clone)]
pub struct LinearCombination {
    pub terms: Vec<(f64, Field)>,
}

impl ScalarField2 for LinearCombination {
    fn jet(&self, u: f64, v: f64) -> Result<Jet2> {
        let mut acc = Jet2::constant(0.0);
        for (c, f) in &self.terms {
            acc = acc + f.jet(u, v)?.scale(*c);
        }
        Ok(acc)
    }

    fn describe(&self) -> String {
        self.terms
            .iter()
            .map(|(c, f)| format!("{c}*({})", f.describe()))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

pub fn linear_combination(terms: Vec<(f64, Field)>) -> Field {
    Arc::new(LinearCombination { terms })
}
