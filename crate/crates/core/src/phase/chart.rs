use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{self, BFunction, Expr};
use crate::scalar::{wrap_centered, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoordKind {
    /// Valued in R/Z (period 1).
    Angle,
    Real,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseCoord {
    pub name: String,
    pub kind: CoordKind,
    pub fiber: String,
}

impl BaseCoord {
    /// Base coordinate whose fiber coordinate follows the `p_<base>` convention.
    pub fn new(name: impl Into<String>, kind: CoordKind) -> Self {
        let name = name.into();
        let fiber = format!("p_{name}");
        BaseCoord { name, kind, fiber }
    }

    pub fn with_fiber(name: impl Into<String>, kind: CoordKind, fiber: impl Into<String>) -> Self {
        BaseCoord { name: name.into(), kind, fiber: fiber.into() }
    }

    pub fn angle(name: impl Into<String>) -> Self {
        BaseCoord::new(name, CoordKind::Angle)
    }

    pub fn real(name: impl Into<String>) -> Self {
        BaseCoord::new(name, CoordKind::Real)
    }
}

/// Cotangent-model chart: base coordinates `q_1..q_n`, their fiber coordinates
/// `p_1..p_n`, then optional transverse (Casimir) coordinates.
///
/// Points are laid out in exactly that order.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseChart {
    base: Vec<BaseCoord>,
    transverse: Vec<String>,
    singular: Option<usize>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PhaseChart {
    pub fn new(base: Vec<BaseCoord>, transverse: Vec<String>, singular: Option<&str>) -> Result<Self> {
        let mut chart = PhaseChart { base, transverse, singular: None };
        let names = chart.names();
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) {
                return Err(Error::InvalidArgument(format!("`{name}` is not a valid coordinate name")));
            }
            if expr::Func::from_name(name).is_some() {
                return Err(Error::InvalidArgument(format!("coordinate name `{name}` clashes with a function")));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidArgument(format!("duplicate coordinate `{name}`")));
            }
        }
        if let Some(s) = singular {
            let index = chart
                .index_of(s)
                .ok_or_else(|| Error::UnknownIdentifier(s.to_string()))?;
            if chart.is_angle(index) {
                return Err(Error::InvalidArgument(format!("singular coordinate `{s}` cannot be an angle")));
            }
            chart.singular = Some(index);
        }
        Ok(chart)
    }

    /// Chart on T*(base) with no transverse part and no singular coordinate.
    pub fn cotangent(base: Vec<BaseCoord>) -> Result<Self> {
        PhaseChart::new(base, Vec::new(), None)
    }

    pub fn with_singular(&self, singular: Option<&str>) -> Result<Self> {
        PhaseChart::new(self.base.clone(), self.transverse.clone(), singular)
    }

    pub fn base(&self) -> &[BaseCoord] {
        &self.base
    }

    pub fn transverse(&self) -> &[String] {
        &self.transverse
    }

    /// Number of base coordinates.
    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.base.len() + self.transverse.len()
    }

    pub fn singular(&self) -> Option<usize> {
        self.singular
    }

    pub fn names(&self) -> Vec<&str> {
        self.base
            .iter()
            .map(|b| b.name.as_str())
            .chain(self.base.iter().map(|b| b.fiber.as_str()))
            .chain(self.transverse.iter().map(String::as_str))
            .collect()
    }

    pub fn name(&self, index: usize) -> &str {
        let n = self.n();
        if index < n {
            &self.base[index].name
        } else if index < 2 * n {
            &self.base[index - n].fiber
        } else {
            &self.transverse[index - 2 * n]
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names().iter().position(|c| *c == name)
    }

    pub fn fiber_index(&self, base: usize) -> usize {
        self.n() + base
    }

    pub fn is_angle(&self, index: usize) -> bool {
        index < self.n() && self.base[index].kind == CoordKind::Angle
    }

    pub fn is_fiber(&self, index: usize) -> bool {
        index >= self.n() && index < 2 * self.n()
    }

    pub fn parse_expr(&self, src: &str) -> Result<Expr> {
        expr::parse(src, &self.names())
    }

    pub fn parse_bfunction(&self, src: &str) -> Result<BFunction> {
        BFunction::parse(src, &self.names())
    }

    pub fn check_point<S: Scalar>(&self, point: &[S]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::ChartMismatch(format!(
                "point has {} coordinates, chart expects {} ({})",
                point.len(),
                self.dim(),
                self.names().join(", ")
            )));
        }
        Ok(())
    }

    /// `a - b` with angle components wrapped into `[-1/2, 1/2)`.
    pub fn wrapped_difference<S: Scalar>(&self, a: &[S], b: &[S]) -> Vec<S> {
        a.iter()
            .zip(b)
            .enumerate()
            .map(|(i, (&x, &y))| if self.is_angle(i) { wrap_centered(x - y, S::one()) } else { x - y })
            .collect()
    }

    pub fn wrapped_distance<S: Scalar>(&self, a: &[S], b: &[S]) -> S {
        crate::linalg::norm(&self.wrapped_difference(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_names() {
        let chart = PhaseChart::new(
            vec![BaseCoord::with_fiber("theta", CoordKind::Angle, "a"), BaseCoord::real("x")],
            vec!["z".into()],
            Some("a"),
        )
        .unwrap();
        assert_eq!(chart.names(), vec!["theta", "x", "a", "p_x", "z"]);
        assert_eq!(chart.dim(), 5);
        assert_eq!(chart.singular(), Some(2));
        assert!(chart.is_angle(0) && !chart.is_angle(1) && !chart.is_angle(2));
    }

    #[test]
    fn rejects_bad_charts() {
        assert!(PhaseChart::cotangent(vec![BaseCoord::real("x"), BaseCoord::real("x")]).is_err());
        assert!(PhaseChart::cotangent(vec![BaseCoord::real("sin")]).is_err());
        assert!(PhaseChart::new(vec![BaseCoord::angle("t")], vec![], Some("t")).is_err());
        assert!(PhaseChart::new(vec![BaseCoord::angle("t")], vec![], Some("q")).is_err());
    }

    #[test]
    fn wrapped_distance_uses_unit_period() {
        let chart = PhaseChart::cotangent(vec![BaseCoord::angle("t")]).unwrap();
        let d: f64 = chart.wrapped_distance(&[2.9, 1.0], &[0.1, 1.0]);
        assert!((d - 0.2).abs() < 1e-12);
    }
}
