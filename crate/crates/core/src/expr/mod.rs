//! Scalar expressions over chart coordinates: parsing, printing, evaluation and
//! forward-mode differentiation, plus b-functions `c*log|t| + g`.

mod bfunction;
mod jet;
mod parse;
mod print;

pub use bfunction::{BCovector, BFunction};
pub use jet::Jet;
pub use parse::parse;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

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
    Tan,
    Exp,
    Log,
    Abs,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 7] =
        [Func::Sin, Func::Cos, Func::Tan, Func::Exp, Func::Log, Func::Abs, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.iter().copied().find(|f| f.name() == name)
    }
}

/// Abstract syntax tree. Variables carry their name and their index in the chart.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var { name: String, index: usize },
    Neg(Box<Expr>),
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Call { func: Func, arg: Box<Expr> },
}

impl Expr {
    /// Numeric literal; negative values become `Neg(Num(|v|))` so printing round-trips.
    pub fn num(v: f64) -> Expr {
        if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn var(name: impl Into<String>, index: usize) -> Expr {
        Expr::Var { name: name.into(), index }
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call { func, arg: Box::new(arg) }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Add, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Sub, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Mul, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(self, rhs: Expr) -> Expr {
        Expr::binary(BinOp::Div, self, rhs)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    /// Literal value when the tree is a (possibly negated) number.
    pub fn as_literal(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            Expr::Neg(inner) => inner.as_literal().map(|v| -v),
            _ => None,
        }
    }

    /// Largest variable index referenced, if any.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var { index, .. } => Some(*index),
            Expr::Neg(e) | Expr::Call { arg: e, .. } => e.max_index(),
            Expr::Binary { lhs, rhs, .. } => match (lhs.max_index(), rhs.max_index()) {
                (Some(a), Some(b)) => Some(a.max(b)),
                (a, b) => a.or(b),
            },
        }
    }

    pub fn depends_on(&self, index: usize) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var { index: i, .. } => *i == index,
            Expr::Neg(e) | Expr::Call { arg: e, .. } => e.depends_on(index),
            Expr::Binary { lhs, rhs, .. } => lhs.depends_on(index) || rhs.depends_on(index),
        }
    }

    /// Rebinds every variable to the index of its name in `coords`.
    pub fn rebind(&self, coords: &[&str]) -> Result<Expr> {
        Ok(match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var { name, .. } => {
                let index = coords
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::UnknownIdentifier(name.clone()))?;
                Expr::var(name.clone(), index)
            }
            Expr::Neg(e) => Expr::Neg(Box::new(e.rebind(coords)?)),
            Expr::Call { func, arg } => Expr::call(*func, arg.rebind(coords)?),
            Expr::Binary { op, lhs, rhs } => Expr::binary(*op, lhs.rebind(coords)?, rhs.rebind(coords)?),
        })
    }

    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S> {
        match self {
            Expr::Num(v) => Ok(S::lit(*v)),
            Expr::Var { name, index } => point.get(*index).copied().ok_or_else(|| {
                Error::ChartMismatch(format!("coordinate `{name}` (index {index}) outside point of length {}", point.len()))
            }),
            Expr::Neg(e) => Ok(-e.eval(point)?),
            Expr::Call { func, arg } => apply_func(*func, arg.eval(point)?),
            Expr::Binary { op, lhs, rhs } => {
                let (a, b) = (lhs.eval(point)?, rhs.eval(point)?);
                match op {
                    BinOp::Add => Ok(a + b),
                    BinOp::Sub => Ok(a - b),
                    BinOp::Mul => Ok(a * b),
                    BinOp::Div => {
                        if b == S::zero() {
                            Err(Error::Domain("division by zero".into()))
                        } else {
                            Ok(a / b)
                        }
                    }
                    BinOp::Pow => power_value(a, b, rhs.as_literal()),
                }
            }
        }
    }

    /// Value and exact first partials at `point` (forward-mode differentiation).
    pub fn jet<S: Scalar>(&self, point: &[S]) -> Result<Jet<S>> {
        let dim = point.len();
        match self {
            Expr::Num(v) => Ok(Jet::constant(S::lit(*v), dim)),
            Expr::Var { name, index } => {
                let v = point.get(*index).copied().ok_or_else(|| {
                    Error::ChartMismatch(format!("coordinate `{name}` (index {index}) outside point of length {dim}"))
                })?;
                Ok(Jet::variable(v, dim, *index))
            }
            Expr::Neg(e) => Ok(-e.jet(point)?),
            Expr::Call { func, arg } => {
                let x = arg.jet(point)?;
                let v = x.value;
                let value = apply_func(*func, v)?;
                let slope = match func {
                    Func::Sin => v.cos(),
                    Func::Cos => -v.sin(),
                    Func::Tan => S::one() / (v.cos() * v.cos()),
                    Func::Exp => value,
                    Func::Log => S::one() / v,
                    Func::Abs => v.signum() * if v == S::zero() { S::zero() } else { S::one() },
                    Func::Sqrt => {
                        if value == S::zero() {
                            return Err(Error::Domain("derivative of sqrt at 0".into()));
                        }
                        S::one() / (S::lit(2.0) * value)
                    }
                };
                Ok(x.chain(value, slope))
            }
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.jet(point)?;
                let b = rhs.jet(point)?;
                match op {
                    BinOp::Add => Ok(&a + &b),
                    BinOp::Sub => Ok(&a - &b),
                    BinOp::Mul => Ok(&a * &b),
                    BinOp::Div => {
                        if b.value == S::zero() {
                            Err(Error::Domain("division by zero".into()))
                        } else {
                            Ok(&a / &b)
                        }
                    }
                    BinOp::Pow => {
                        let value = power_value(a.value, b.value, rhs.as_literal())?;
                        if b.is_constant() {
                            let n = b.value;
                            let slope = if n == S::zero() {
                                S::zero()
                            } else {
                                n * power_value(a.value, n - S::one(), rhs.as_literal().map(|e| e - 1.0))?
                            };
                            Ok(a.chain(value, slope))
                        } else {
                            if a.value <= S::zero() {
                                return Err(Error::Domain("non-constant exponent of a non-positive base".into()));
                            }
                            // d(a^b) = a^b (b' ln a + b a'/a)
                            let ln_a = a.value.ln();
                            let partials = a
                                .partials
                                .iter()
                                .zip(&b.partials)
                                .map(|(&da, &db)| value * (db * ln_a + b.value * da / a.value))
                                .collect();
                            Ok(Jet { value, partials })
                        }
                    }
                }
            }
        }
    }
}

fn apply_func<S: Scalar>(func: Func, v: S) -> Result<S> {
    Ok(match func {
        Func::Sin => v.sin(),
        Func::Cos => v.cos(),
        Func::Tan => v.tan(),
        Func::Exp => v.exp(),
        Func::Log => {
            if v <= S::zero() {
                return Err(Error::Domain(format!("log of non-positive value {v}")));
            }
            v.ln()
        }
        Func::Abs => v.abs(),
        Func::Sqrt => {
            if v < S::zero() {
                return Err(Error::Domain(format!("sqrt of negative value {v}")));
            }
            v.sqrt()
        }
    })
}

fn power_value<S: Scalar>(base: S, exponent: S, literal: Option<f64>) -> Result<S> {
    if let Some(e) = literal {
        if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
            if base == S::zero() && e < 0.0 {
                return Err(Error::Domain("zero to a negative power".into()));
            }
            return Ok(base.powi(e as i32));
        }
    }
    if base < S::zero() && exponent.fract() != S::zero() {
        return Err(Error::Domain(format!("negative base {base} to non-integer power")));
    }
    if base == S::zero() && exponent < S::zero() {
        return Err(Error::Domain("zero to a negative power".into()));
    }
    Ok(base.powf(exponent))
}
