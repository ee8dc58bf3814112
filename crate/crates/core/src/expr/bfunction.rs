use std::fmt;

use super::{parse, BinOp, Expr, Func};
use crate::error::{Error, Result};
use crate::expr::Jet;
use crate::scalar::Scalar;

/// `c*log|t| + g` with `g` smooth. `c == 0` exactly when there is no singular coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct BFunction {
    c: f64,
    singular: Option<(String, usize)>,
    smooth: Expr,
}

/// Differential of a b-function in the b-coframe: when `singular` is `Some(s)` the
/// entry `coeffs[s]` is the coefficient of `ds/s`, all other entries are ordinary partials.
#[derive(Debug, Clone, PartialEq)]
pub struct BCovector<S> {
    pub singular: Option<usize>,
    pub coeffs: Vec<S>,
}

impl BFunction {
    pub fn smooth(g: Expr) -> Self {
        BFunction { c: 0.0, singular: None, smooth: g }
    }

    pub fn new(c: f64, name: impl Into<String>, index: usize, g: Expr) -> Self {
        if c == 0.0 {
            return BFunction::smooth(g);
        }
        BFunction { c, singular: Some((name.into(), index)), smooth: g }
    }

    /// Parses `src` and promotes top-level `k*log(abs(t))` terms to the singular part.
    pub fn parse(src: &str, coords: &[&str]) -> Result<Self> {
        BFunction::from_expr(&parse(src, coords)?)
    }

    /// Splits the top-level sum of `expr` into the singular term(s) `k*log(abs(t))`
    /// (literal `k`, possibly negated or divided by a literal) and the smooth rest.
    pub fn from_expr(expr: &Expr) -> Result<Self> {
        let mut terms = Vec::new();
        split_terms(expr, false, &mut terms);
        let mut c = 0.0;
        let mut singular: Option<(String, usize)> = None;
        let mut rest: Option<Expr> = None;
        for (neg, term) in terms {
            if let Some((k, name, index)) = match_log_term(term) {
                if let Some((prev, _)) = &singular {
                    if *prev != name {
                        return Err(Error::InvalidArgument(format!(
                            "b-function singular in both `{prev}` and `{name}`"
                        )));
                    }
                }
                c += if neg { -k } else { k };
                singular = Some((name, index));
                continue;
            }
            rest = Some(match (rest, neg) {
                (None, false) => term.clone(),
                (None, true) => Expr::Neg(Box::new(term.clone())),
                (Some(acc), false) => acc.add(term.clone()),
                (Some(acc), true) => acc.sub(term.clone()),
            });
        }
        let g = rest.unwrap_or(Expr::Num(0.0));
        Ok(match singular {
            Some((name, index)) if c != 0.0 => BFunction::new(c, name, index, g),
            _ => BFunction::smooth(g),
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn singular_coord(&self) -> Option<(&str, usize)> {
        self.singular.as_ref().map(|(n, i)| (n.as_str(), *i))
    }

    pub fn singular_index(&self) -> Option<usize> {
        self.singular.as_ref().map(|(_, i)| *i)
    }

    pub fn smooth_part(&self) -> &Expr {
        &self.smooth
    }

    pub fn is_smooth(&self) -> bool {
        self.singular.is_none()
    }

    /// Coefficient of `log|coordinate|`; zero when the function is not singular there.
    pub fn weight_along(&self, index: usize) -> f64 {
        match self.singular_index() {
            Some(i) if i == index => self.c,
            _ => 0.0,
        }
    }

    pub fn singular_expr(&self) -> Option<Expr> {
        let (name, index) = self.singular.as_ref()?;
        let log = Expr::call(Func::Log, Expr::call(Func::Abs, Expr::var(name.clone(), *index)));
        Some(if self.c == 1.0 {
            log
        } else if self.c == -1.0 {
            Expr::Neg(Box::new(log))
        } else {
            Expr::num(self.c).mul(log)
        })
    }

    pub fn to_expr(&self) -> Expr {
        match self.singular_expr() {
            None => self.smooth.clone(),
            Some(s) if self.smooth.is_zero() => s,
            Some(s) => match &self.smooth {
                Expr::Neg(inner) => s.sub((**inner).clone()),
                g => s.add(g.clone()),
            },
        }
    }

    pub fn rebind(&self, coords: &[&str]) -> Result<Self> {
        let smooth = self.smooth.rebind(coords)?;
        Ok(match &self.singular {
            None => BFunction::smooth(smooth),
            Some((name, _)) => {
                let index = coords
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::UnknownIdentifier(name.clone()))?;
                BFunction::new(self.c, name.clone(), index, smooth)
            }
        })
    }

    /// `sum_k w_k f_k`; the singular coefficients combine linearly.
    pub fn linear_combination(terms: &[(f64, &BFunction)]) -> Result<Self> {
        let mut c = 0.0;
        let mut singular: Option<(String, usize)> = None;
        let mut smooth: Option<Expr> = None;
        for (w, f) in terms {
            if let Some((name, index)) = &f.singular {
                if let Some((prev, _)) = &singular {
                    if prev != name {
                        return Err(Error::InvalidArgument(format!(
                            "combination singular in both `{prev}` and `{name}`"
                        )));
                    }
                }
                c += w * f.c;
                singular = Some((name.clone(), *index));
            }
            if f.smooth.is_zero() || *w == 0.0 {
                continue;
            }
            let scaled = if *w == 1.0 { f.smooth.clone() } else { Expr::num(*w).mul(f.smooth.clone()) };
            smooth = Some(match smooth {
                None => scaled,
                Some(acc) => acc.add(scaled),
            });
        }
        let g = smooth.unwrap_or(Expr::Num(0.0));
        Ok(match singular {
            Some((name, index)) if c != 0.0 => BFunction::new(c, name, index, g),
            _ => BFunction::smooth(g),
        })
    }

    fn singular_value<S: Scalar>(&self, point: &[S]) -> Result<Option<(usize, S)>> {
        let Some((name, index)) = &self.singular else { return Ok(None) };
        let t = *point.get(*index).ok_or_else(|| {
            Error::ChartMismatch(format!("coordinate `{name}` outside point of length {}", point.len()))
        })?;
        Ok(Some((*index, t)))
    }

    pub fn value<S: Scalar>(&self, point: &[S]) -> Result<S> {
        let g = self.smooth.eval(point)?;
        match self.singular_value(point)? {
            None => Ok(g),
            Some((_, t)) if t == S::zero() => Err(self.singular_error()),
            Some((_, t)) => Ok(S::lit(self.c) * t.abs().ln() + g),
        }
    }

    /// Plain value and first partials; fails on the singular hypersurface.
    pub fn jet<S: Scalar>(&self, point: &[S]) -> Result<Jet<S>> {
        let mut jet = self.smooth.jet(point)?;
        if let Some((index, t)) = self.singular_value(point)? {
            if t == S::zero() {
                return Err(self.singular_error());
            }
            let c = S::lit(self.c);
            jet.value = jet.value + c * t.abs().ln();
            jet.partials[index] = jet.partials[index] + c / t;
        }
        Ok(jet)
    }

    /// Differential in the b-coframe adapted to the hypersurface `{x_s = 0}`.
    ///
    /// With `s = None` this is the plain differential. A singular term in a coordinate
    /// other than `s` is only accepted away from its zero set.
    pub fn b_covector<S: Scalar>(&self, point: &[S], s: Option<usize>) -> Result<BCovector<S>> {
        let Some(s) = s else {
            return Ok(BCovector { singular: None, coeffs: self.jet(point)?.partials });
        };
        let mut coeffs = self.smooth.jet(point)?.partials;
        let xs = *point
            .get(s)
            .ok_or_else(|| Error::ChartMismatch(format!("singular index {s} outside point")))?;
        coeffs[s] = xs * coeffs[s];
        if let Some((index, t)) = self.singular_value(point)? {
            let c = S::lit(self.c);
            if index == s {
                coeffs[s] = coeffs[s] + c;
            } else if t == S::zero() {
                return Err(self.singular_error());
            } else {
                coeffs[index] = coeffs[index] + c / t;
            }
        }
        Ok(BCovector { singular: Some(s), coeffs })
    }

    fn singular_error(&self) -> Error {
        let name = self.singular.as_ref().map(|(n, _)| n.as_str()).unwrap_or("?");
        Error::Singular(format!("`{self}` evaluated on {name} = 0"))
    }
}

fn split_terms<'e>(e: &'e Expr, neg: bool, out: &mut Vec<(bool, &'e Expr)>) {
    match e {
        Expr::Binary { op: BinOp::Add, lhs, rhs } => {
            split_terms(lhs, neg, out);
            split_terms(rhs, neg, out);
        }
        Expr::Binary { op: BinOp::Sub, lhs, rhs } => {
            split_terms(lhs, neg, out);
            split_terms(rhs, !neg, out);
        }
        other => out.push((neg, other)),
    }
}

fn match_log_term(e: &Expr) -> Option<(f64, String, usize)> {
    match e {
        Expr::Call { func: Func::Log, arg } => match &**arg {
            Expr::Call { func: Func::Abs, arg } => match &**arg {
                Expr::Var { name, index } => Some((1.0, name.clone(), *index)),
                _ => None,
            },
            _ => None,
        },
        Expr::Neg(inner) => match_log_term(inner).map(|(k, n, i)| (-k, n, i)),
        Expr::Binary { op: BinOp::Mul, lhs, rhs } => {
            if let Some(k) = lhs.as_literal() {
                match_log_term(rhs).map(|(c, n, i)| (k * c, n, i))
            } else if let Some(k) = rhs.as_literal() {
                match_log_term(lhs).map(|(c, n, i)| (k * c, n, i))
            } else {
                None
            }
        }
        Expr::Binary { op: BinOp::Div, lhs, rhs } => {
            let k = rhs.as_literal().filter(|k| *k != 0.0)?;
            match_log_term(lhs).map(|(c, n, i)| (c / k, n, i))
        }
        _ => None,
    }
}

impl fmt::Display for BFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}
