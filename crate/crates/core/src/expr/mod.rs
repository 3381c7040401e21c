//! Arithmetic expressions in `u` and `v` with exact second-order derivatives.
//!
//! Expressions are parsed once and are immutable afterwards. Evaluation with
//! [`Expression::eval_jet2`] propagates a [`Jet2`] through the tree, so the
//! gradient and Hessian are exact up to rounding; nothing here differentiates
//! numerically.

mod parse;

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    U,
    V,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

/// Abstract syntax tree of a scalar expression in `u` and `v`.
///
/// Literals produced by the parser are never negative; a leading minus is
/// always an explicit [`Expression::Neg`].
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Num(f64),
    Var(Var),
    Const(Constant),
    Neg(Box<Expression>),
    Binary(BinOp, Box<Expression>, Box<Expression>),
    Call(Func, Box<Expression>),
}

impl std::str::FromStr for Expression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expression::parse(s)
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Expression> {
        parse::parse(source)
    }

    /// A literal, expressed as `Neg(Num(|x|))` when `x` is negative so that
    /// printed output re-parses to the same tree.
    pub fn num(x: f64) -> Expression {
        if x.is_sign_negative() && x != 0.0 {
            Expression::Neg(Box::new(Expression::Num(-x)))
        } else {
            Expression::Num(x)
        }
    }

    pub fn u() -> Expression {
        Expression::Var(Var::U)
    }

    pub fn v() -> Expression {
        Expression::Var(Var::V)
    }

    pub fn binary(op: BinOp, lhs: Expression, rhs: Expression) -> Expression {
        Expression::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn pow(self, rhs: Expression) -> Expression {
        Expression::binary(BinOp::Pow, self, rhs)
    }

    /// Replace every occurrence of `u` and `v` by the given expressions.
    pub fn substitute(&self, u: &Expression, v: &Expression) -> Expression {
        match self {
            Expression::Var(Var::U) => u.clone(),
            Expression::Var(Var::V) => v.clone(),
            Expression::Num(_) | Expression::Const(_) => self.clone(),
            Expression::Neg(a) => Expression::Neg(Box::new(a.substitute(u, v))),
            Expression::Binary(op, a, b) => {
                Expression::binary(*op, a.substitute(u, v), b.substitute(u, v))
            }
            Expression::Call(f, a) => Expression::Call(*f, Box::new(a.substitute(u, v))),
        }
    }

    /// Value, gradient and Hessian at `(u, v)`.
    pub fn eval_jet2(&self, u: f64, v: f64) -> Result<Jet2> {
        let j = self.jet(u, v)?;
        if !j.is_finite() {
            return Err(self.domain(u, v, "non-finite result"));
        }
        Ok(j)
    }

    /// Value only. Unlike [`Expression::eval_jet2`] this accepts points
    /// where the value exists but a derivative does not (e.g. `sqrt(0)`).
    pub fn eval(&self, u: f64, v: f64) -> Result<f64> {
        let x = match self {
            Expression::Num(x) => *x,
            Expression::Var(Var::U) => u,
            Expression::Var(Var::V) => v,
            Expression::Const(c) => c.value(),
            Expression::Neg(a) => -a.eval(u, v)?,
            Expression::Binary(op, a, b) => {
                let (x, y) = (a.eval(u, v)?, b.eval(u, v)?);
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(self.domain(u, v, "division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => match integer_exponent(y, b.is_constant()) {
                        Some(n) => {
                            if x == 0.0 && n < 0 {
                                return Err(self.domain(u, v, "division by zero"));
                            }
                            x.powi(n)
                        }
                        None if x > 0.0 => x.powf(y),
                        None if x == 0.0 && y > 0.0 => 0.0,
                        None => {
                            return Err(self.domain(
                                u,
                                v,
                                "non-integer power of a non-positive base",
                            ))
                        }
                    },
                }
            }
            Expression::Call(f, a) => {
                let x = a.eval(u, v)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(self.domain(u, v, "logarithm of a non-positive number"));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(self.domain(u, v, "square root of a negative number"));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if !x.is_finite() {
            return Err(self.domain(u, v, "non-finite result"));
        }
        Ok(x)
    }

    /// True when the tree contains no variables.
    pub fn is_constant(&self) -> bool {
        match self {
            Expression::Var(_) => false,
            Expression::Num(_) | Expression::Const(_) => true,
            Expression::Neg(a) | Expression::Call(_, a) => a.is_constant(),
            Expression::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    fn domain(&self, u: f64, v: f64, reason: &str) -> Error {
        Error::Domain {
            expr: self.to_string(),
            u,
            v,
            reason: reason.to_string(),
        }
    }

    fn jet(&self, u: f64, v: f64) -> Result<Jet2> {
        Ok(match self {
            Expression::Num(x) => Jet2::constant(*x),
            Expression::Var(Var::U) => Jet2::var_u(u),
            Expression::Var(Var::V) => Jet2::var_v(v),
            Expression::Const(c) => Jet2::constant(c.value()),
            Expression::Neg(a) => -a.jet(u, v)?,
            Expression::Binary(op, a, b) => {
                let x = a.jet(u, v)?;
                let y = b.jet(u, v)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.value == 0.0 {
                            return Err(self.domain(u, v, "division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => self.pow_jet(x, y, u, v)?,
                }
            }
            Expression::Call(f, a) => {
                let x = a.jet(u, v)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x.value <= 0.0 {
                            return Err(self.domain(u, v, "logarithm of a non-positive number"));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x.value < 0.0 {
                            return Err(self.domain(u, v, "square root of a negative number"));
                        }
                        if x.value == 0.0 {
                            return Err(self.domain(
                                u,
                                v,
                                "square root is not differentiable at 0",
                            ));
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }

    fn pow_jet(&self, base: Jet2, exponent: Jet2, u: f64, v: f64) -> Result<Jet2> {
        if let Some(n) = integer_exponent(exponent.value, exponent.is_constant()) {
            if base.value == 0.0 && n < 0 {
                return Err(self.domain(u, v, "division by zero"));
            }
            return Ok(base.powi(n));
        }
        if base.value <= 0.0 {
            return Err(self.domain(u, v, "non-integer power of a non-positive base"));
        }
        if exponent.is_constant() {
            Ok(base.powf(exponent.value))
        } else {
            Ok((exponent * base.ln()).exp())
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expression::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expression::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expression::Neg(_) => 3,
            Expression::Binary(BinOp::Pow, ..) => 4,
            // A negative literal prints as a unary minus.
            Expression::Num(x) if x.is_sign_negative() && *x != 0.0 => 3,
            _ => 5,
        }
    }
}

macro_rules! binary_ops {
    ($($trait:ident $method:ident $op:ident),*) => {$(
        impl std::ops::$trait for Expression {
            type Output = Expression;
            fn $method(self, rhs: Expression) -> Expression {
                Expression::binary(BinOp::$op, self, rhs)
            }
        }
    )*};
}

binary_ops!(Add add Add, Sub sub Sub, Mul mul Mul, Div div Div);

fn integer_exponent(y: f64, constant: bool) -> Option<i32> {
    (constant && y.fract() == 0.0 && y.abs() <= f64::from(i32::MAX)).then_some(y as i32)
}

struct Wrapped<'a>(&'a Expression, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Num(x) => write!(f, "{x}"),
            Expression::Var(Var::U) => f.write_str("u"),
            Expression::Var(Var::V) => f.write_str("v"),
            Expression::Const(Constant::Pi) => f.write_str("pi"),
            Expression::Const(Constant::E) => f.write_str("e"),
            Expression::Neg(a) => write!(f, "-{}", Wrapped(a, a.precedence() < 3)),
            Expression::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expression::Binary(BinOp::Pow, a, b) => write!(
                f,
                "{}^{}",
                Wrapped(a, a.precedence() < 5),
                Wrapped(b, b.precedence() < 3)
            ),
            Expression::Binary(op, a, b) => {
                let p = self.precedence();
                let sym = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => unreachable!(),
                };
                write!(
                    f,
                    "{}{sym}{}",
                    Wrapped(a, a.precedence() < p),
                    Wrapped(b, b.precedence() <= p)
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Expected;
    use std::ops::{Add, Div, Mul, Sub};

    fn p(s: &str) -> Expression {
        Expression::parse(s).unwrap()
    }

    fn num(x: f64) -> Expression {
        Expression::Num(x)
    }

    #[test]
    fn parses_sum_of_squares() {
        let expected = Expression::u()
            .pow(num(2.0))
            .add(Expression::v().pow(num(2.0)));
        assert_eq!(p("u^2+v^2"), expected);
    }

    #[test]
    fn parses_hemisphere() {
        let inner = num(1.0)
            .sub(Expression::u().pow(num(2.0)))
            .sub(Expression::v().pow(num(2.0)));
        assert_eq!(
            p("sqrt(1-u^2-v^2)"),
            Expression::Call(Func::Sqrt, Box::new(inner))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("-u^2"), Expression::Neg(Box::new(p("u^2"))));
        assert_eq!(p("2^3^2"), num(2.0).pow(num(3.0).pow(num(2.0))));
        assert_eq!(
            p("u-v-1"),
            Expression::u().sub(Expression::v()).sub(num(1.0))
        );
        assert_eq!(
            p("u/v/2"),
            Expression::u().div(Expression::v()).div(num(2.0))
        );
        assert_eq!(
            p("u^-1"),
            Expression::u().pow(Expression::Neg(Box::new(num(1.0))))
        );
        assert_eq!(p("1.5e-3*u"), num(1.5e-3).mul(Expression::u()));
    }

    #[test]
    fn incomplete_expression_reports_offset() {
        match Expression::parse("u+") {
            Err(Error::Syntax(e)) => {
                assert_eq!(e.offset, 2);
                assert!(e.expected.contains(&Expected::Number));
                assert!(e.expected.contains(&Expected::Identifier));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            Expression::parse("u + w"),
            Err(Error::UnknownIdentifier {
                name: "w".into(),
                offset: 4
            })
        );
    }

    #[test]
    fn unbalanced_and_trailing_input() {
        assert!(matches!(Expression::parse("(u+v"), Err(Error::Syntax(e)) if e.offset == 4));
        assert!(matches!(Expression::parse("u v"), Err(Error::Syntax(e)) if e.offset == 2));
        assert!(matches!(Expression::parse("sin u"), Err(Error::Syntax(_))));
        assert!(matches!(Expression::parse("u $ v"), Err(Error::Syntax(e)) if e.offset == 2));
    }

    #[test]
    fn jet_of_sum_of_squares() {
        let j = p("u^2+v^2").eval_jet2(1.0, 2.0).unwrap();
        assert_eq!(j.value, 5.0);
        assert_eq!(j.gradient(), [2.0, 4.0]);
        assert_eq!(j.hessian(), [2.0, 0.0, 2.0]);
    }

    #[test]
    fn jet_of_hemisphere_at_pole() {
        // d/du sqrt(1-u^2-v^2) = -u/s, d2/du2 = -(1-v^2)/s^3: at the origin -1
        let j = p("sqrt(1-u^2-v^2)").eval_jet2(0.0, 0.0).unwrap();
        assert_eq!(j.value, 1.0);
        assert_eq!(j.gradient(), [0.0, 0.0]);
        assert_eq!(j.hessian(), [-1.0, 0.0, -1.0]);
    }

    #[test]
    fn domain_errors() {
        let err = p("1/u").eval_jet2(0.0, 0.0).unwrap_err();
        match err {
            Error::Domain { expr, reason, .. } => {
                assert_eq!(expr, "1/u");
                assert!(reason.contains("division"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(p("log(u)").eval_jet2(-1.0, 0.0).is_err());
        assert!(p("sqrt(u)").eval_jet2(-1.0, 0.0).is_err());
        assert!(p("u^0.5").eval_jet2(-1.0, 0.0).is_err());
        assert!(p("u^-2").eval_jet2(0.0, 1.0).is_err());
        // the offending sub-expression is named, not the whole tree
        match p("1 + sqrt(u - 2)").eval_jet2(0.0, 0.0).unwrap_err() {
            Error::Domain { expr, .. } => assert_eq!(expr, "sqrt(u - 2)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn integer_powers_of_negative_bases() {
        let j = p("u^3").eval_jet2(-2.0, 0.0).unwrap();
        assert_eq!((j.value, j.du, j.duu), (-8.0, 12.0, -12.0));
        let j = p("(u - 1)^2").eval_jet2(1.0, 0.0).unwrap();
        assert_eq!((j.value, j.du, j.duu), (0.0, 0.0, 2.0));
    }

    #[test]
    fn variable_exponent() {
        // u^v = exp(v ln u); at (e, 1): value e, d/du = v u^(v-1) = 1, d/dv = ln(u) u^v = e
        let j = p("u^v").eval_jet2(std::f64::consts::E, 1.0).unwrap();
        assert!((j.value - std::f64::consts::E).abs() < 1e-15);
        assert!((j.du - 1.0).abs() < 1e-15);
        assert!((j.dv - std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "u^2 + v^2",
            "-u^2",
            "(-u)^2",
            "u - (v - 1)",
            "u/(v*2)",
            "2^3^2",
            "(2^3)^2",
            "--u",
            "u - -v",
            "sqrt(1 - u^2 - v^2)",
            "exp(-(u^2 + v^2))*cos(pi*u)",
            "u^-v",
            "0.001*e",
        ] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} printed as {e}");
        }
    }

    #[test]
    fn substitution() {
        let e = p("u*v").substitute(&p("v"), &p("u + 1"));
        assert_eq!(e.eval(2.0, 3.0).unwrap(), 3.0 * 3.0);
    }
}
