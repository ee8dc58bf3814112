use crate::error::{Error, Result};
use crate::expr::{BFunction, Expr, Jet};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

use super::chart::PhaseChart;
use super::pfaffian::pfaffian;

#[derive(Debug, Clone, PartialEq)]
pub enum StructureKind {
    /// `sum_i d/dq_i ^ d/dp_i`, zero on transverse coordinates.
    Canonical,
    /// `(p_s/c) d/dq_s ^ d/dp_s + sum_{i != s} d/dq_i ^ d/dp_i`, singular in the fiber `p_s`.
    TwistedB { c: f64 },
    /// `x_s d/dx_s ^ d/dp_s + sum_{i != s} d/dx_i ^ d/dp_i`, singular in the base `x_s`.
    CanonicalB,
    Custom,
}

impl StructureKind {
    pub fn is_b(&self) -> bool {
        matches!(self, StructureKind::TwistedB { .. } | StructureKind::CanonicalB)
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    i: usize,
    j: usize,
    value: Expr,
    /// `value / x_s` in closed form when the entry touches the singular coordinate.
    b_value: Option<Expr>,
}

/// Vector in the b-frame: with `singular = Some(s)` the component `s` multiplies `x_s d/dx_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct BVector<S> {
    pub singular: Option<usize>,
    pub components: Vec<S>,
}

impl<S: Scalar> BVector<S> {
    /// Ordinary components; the singular one is multiplied back by `x_s`.
    pub fn to_ordinary(&self, point: &[S]) -> Vec<S> {
        let mut out = self.components.clone();
        if let Some(s) = self.singular {
            out[s] = out[s] * point[s];
        }
        out
    }
}

/// Poisson bivector on a chart, stored as its nonzero upper-triangular entries `Pi^{ij}`, `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonStructure {
    kind: StructureKind,
    dim: usize,
    singular: Option<usize>,
    entries: Vec<Entry>,
}

impl PoissonStructure {
    pub fn canonical(chart: &PhaseChart) -> Self {
        let n = chart.n();
        let entries = (0..n)
            .map(|i| Entry { i, j: n + i, value: Expr::Num(1.0), b_value: None })
            .collect();
        PoissonStructure { kind: StructureKind::Canonical, dim: chart.dim(), singular: None, entries }
    }

    /// Twisted b-structure dual to `(c/p_s) dq_s ^ dp_s + sum dq_i ^ dp_i`; the chart's
    /// singular coordinate must be a fiber coordinate.
    pub fn twisted_b(chart: &PhaseChart, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("twisted b-structure needs c > 0, got {c}")));
        }
        let s = chart
            .singular()
            .ok_or_else(|| Error::NoSingularCoordinate("twisted b-structure needs a singular fiber coordinate".into()))?;
        if !chart.is_fiber(s) {
            return Err(Error::InvalidArgument(format!(
                "twisted b-structure is singular in a fiber coordinate, `{}` is not one",
                chart.name(s)
            )));
        }
        let n = chart.n();
        let entries = (0..n)
            .map(|i| {
                if n + i == s {
                    let a = Expr::var(chart.name(s), s);
                    let value = if c == 1.0 { a } else { a.div(Expr::Num(c)) };
                    Entry { i, j: s, value, b_value: Some(Expr::Num(1.0).div(Expr::Num(c))) }
                } else {
                    Entry { i, j: n + i, value: Expr::Num(1.0), b_value: None }
                }
            })
            .collect();
        Ok(PoissonStructure { kind: StructureKind::TwistedB { c }, dim: chart.dim(), singular: Some(s), entries })
    }

    /// Canonical b-structure on the b-cotangent bundle; the chart's singular coordinate
    /// must be a real base coordinate.
    pub fn canonical_b(chart: &PhaseChart) -> Result<Self> {
        let s = chart
            .singular()
            .ok_or_else(|| Error::NoSingularCoordinate("canonical b-structure needs a singular base coordinate".into()))?;
        if s >= chart.n() {
            return Err(Error::InvalidArgument(format!(
                "canonical b-structure is singular in a base coordinate, `{}` is not one",
                chart.name(s)
            )));
        }
        let n = chart.n();
        let entries = (0..n)
            .map(|i| {
                if i == s {
                    Entry { i, j: n + i, value: Expr::var(chart.name(s), s), b_value: Some(Expr::Num(1.0)) }
                } else {
                    Entry { i, j: n + i, value: Expr::Num(1.0), b_value: None }
                }
            })
            .collect();
        Ok(PoissonStructure { kind: StructureKind::CanonicalB, dim: chart.dim(), singular: Some(s), entries })
    }

    /// Custom bivector from a full coefficient matrix, which must be antisymmetric.
    pub fn custom(chart: &PhaseChart, matrix: Vec<Vec<Expr>>) -> Result<Self> {
        let dim = chart.dim();
        if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
            return Err(Error::ChartMismatch(format!("custom matrix must be {dim}x{dim}")));
        }
        let mut upper = Vec::new();
        for i in 0..dim {
            if !matrix[i][i].is_zero() && matrix[i][i].as_literal() != Some(0.0) {
                return Err(Error::InvalidArgument(format!("diagonal entry ({i},{i}) must be 0")));
            }
            for j in i + 1..dim {
                if !antisymmetric_pair(&matrix[i][j], &matrix[j][i], dim)? {
                    return Err(Error::InvalidArgument(format!(
                        "matrix is not antisymmetric at ({}, {})",
                        chart.name(i),
                        chart.name(j)
                    )));
                }
                upper.push((i, j, matrix[i][j].clone()));
            }
        }
        PoissonStructure::custom_upper(chart, upper)
    }

    /// Custom bivector from upper-triangular entries `(i, j, Pi^{ij})`; swapped index
    /// pairs are negated.
    pub fn custom_upper(chart: &PhaseChart, entries: Vec<(usize, usize, Expr)>) -> Result<Self> {
        let dim = chart.dim();
        let mut out: Vec<Entry> = Vec::new();
        for (i, j, value) in entries {
            if i >= dim || j >= dim || i == j {
                return Err(Error::InvalidArgument(format!("bad entry index ({i}, {j})")));
            }
            if value.max_index().is_some_and(|m| m >= dim) {
                return Err(Error::ChartMismatch("entry references a coordinate outside the chart".into()));
            }
            if value.as_literal() == Some(0.0) {
                continue;
            }
            let (i, j, value) = if i < j { (i, j, value) } else { (j, i, negate(value)) };
            if out.iter().any(|e| e.i == i && e.j == j) {
                return Err(Error::InvalidArgument(format!("duplicate entry ({i}, {j})")));
            }
            out.push(Entry { i, j, value, b_value: None });
        }
        Ok(PoissonStructure { kind: StructureKind::Custom, dim, singular: chart.singular(), entries: out })
    }

    pub fn kind(&self) -> &StructureKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn singular(&self) -> Option<usize> {
        self.singular
    }

    pub fn is_b(&self) -> bool {
        self.kind.is_b() || (self.kind == StructureKind::Custom && self.singular.is_some())
    }

    /// Full antisymmetric coefficient matrix as expressions.
    pub fn matrix_exprs(&self) -> Vec<Vec<Expr>> {
        let mut m = vec![vec![Expr::Num(0.0); self.dim]; self.dim];
        for e in &self.entries {
            m[e.i][e.j] = e.value.clone();
            m[e.j][e.i] = negate(e.value.clone());
        }
        m
    }

    /// Upper-triangular nonzero entries `(i, j, Pi^{ij})`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, &Expr)> {
        self.entries.iter().map(|e| (e.i, e.j, &e.value))
    }

    fn check_dim<S>(&self, point: &[S]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::ChartMismatch(format!(
                "point has {} coordinates, structure expects {}",
                point.len(),
                self.dim
            )));
        }
        Ok(())
    }

    pub fn matrix<S: Scalar>(&self, point: &[S]) -> Result<Matrix<S>> {
        self.check_dim(point)?;
        let mut m = linalg::zeros(self.dim, self.dim);
        for e in &self.entries {
            let v = e.value.eval(point)?;
            m[e.i][e.j] = v;
            m[e.j][e.i] = -v;
        }
        Ok(m)
    }

    pub fn matrix_jets<S: Scalar>(&self, point: &[S]) -> Result<Vec<Vec<Jet<S>>>> {
        self.check_dim(point)?;
        let zero = Jet::constant(S::zero(), self.dim);
        let mut m = vec![vec![zero; self.dim]; self.dim];
        for e in &self.entries {
            let v = e.value.jet(point)?;
            m[e.j][e.i] = -v.clone();
            m[e.i][e.j] = v;
        }
        Ok(m)
    }

    /// Entries in the b-frame: those touching the singular coordinate are divided by it.
    /// On the hypersurface the quotient is the derivative along the singular coordinate.
    fn b_entries<S: Scalar>(&self, point: &[S]) -> Result<Vec<(usize, usize, S)>> {
        self.entries
            .iter()
            .map(|e| {
                let touches = self.singular.filter(|&s| e.i == s || e.j == s);
                let v = match (touches, &e.b_value) {
                    (None, _) => e.value.eval(point)?,
                    (Some(_), Some(b)) => b.eval(point)?,
                    (Some(s), None) => {
                        if point[s] != S::zero() {
                            e.value.eval(point)? / point[s]
                        } else {
                            e.value.jet(point)?.partials[s]
                        }
                    }
                };
                Ok((e.i, e.j, v))
            })
            .collect()
    }

    fn differential<S: Scalar>(&self, f: &BFunction, point: &[S]) -> Result<Vec<S>> {
        Ok(f.b_covector(point, self.singular)?.coeffs)
    }

    /// `{f, g} = Pi(df, dg)`, evaluated by pairing b-coframe differentials with the
    /// b-frame bivector so that it stays finite across the singular hypersurface.
    pub fn bracket<S: Scalar>(&self, f: &BFunction, g: &BFunction, point: &[S]) -> Result<S> {
        self.check_dim(point)?;
        let df = self.differential(f, point)?;
        let dg = self.differential(g, point)?;
        Ok(self
            .b_entries(point)?
            .into_iter()
            .fold(S::zero(), |acc, (i, j, v)| acc + v * (df[i] * dg[j] - df[j] * dg[i])))
    }

    /// Hamiltonian vector field `X_f = Pi(df, .)` in the b-frame.
    pub fn hamiltonian_field_b<S: Scalar>(&self, f: &BFunction, point: &[S]) -> Result<BVector<S>> {
        self.check_dim(point)?;
        let df = self.differential(f, point)?;
        Ok(self.field_from_covector(&df, point)?)
    }

    pub(crate) fn field_from_covector<S: Scalar>(&self, df: &[S], point: &[S]) -> Result<BVector<S>> {
        let mut x = vec![S::zero(); self.dim];
        for (i, j, v) in self.b_entries(point)? {
            x[j] = x[j] + v * df[i];
            x[i] = x[i] - v * df[j];
        }
        Ok(BVector { singular: self.singular, components: x })
    }

    /// Hamiltonian vector field `X_f = Pi(df, .)` in ordinary components. The component
    /// along the singular coordinate carries an exact factor `x_s`, so it vanishes on Z.
    pub fn hamiltonian_field<S: Scalar>(&self, f: &BFunction, point: &[S]) -> Result<Vec<S>> {
        Ok(self.hamiltonian_field_b(f, point)?.to_ordinary(point))
    }

    /// Largest component of the Schouten bracket `[Pi, Pi]` at `point`.
    pub fn jacobi_residual<S: Scalar>(&self, point: &[S]) -> Result<S> {
        let m = self.matrix_jets(point)?;
        let n = self.dim;
        let mut worst = S::zero();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let mut sum = S::zero();
                    for l in 0..n {
                        sum = sum
                            + m[i][l].value * m[j][k].partials[l]
                            + m[j][l].value * m[k][i].partials[l]
                            + m[k][l].value * m[i][j].partials[l];
                    }
                    worst = worst.max(sum.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Pfaffian of the coefficient matrix together with its partials.
    pub fn pfaffian_jet<S: Scalar>(&self, point: &[S]) -> Result<Jet<S>> {
        if self.dim % 2 == 1 {
            return Ok(Jet::constant(S::zero(), self.dim));
        }
        Ok(pfaffian(self.matrix_jets(point)?))
    }
}

fn negate(e: Expr) -> Expr {
    match e {
        Expr::Neg(inner) => *inner,
        Expr::Num(v) => Expr::num(-v),
        other => Expr::Neg(Box::new(other)),
    }
}

fn antisymmetric_pair(upper: &Expr, lower: &Expr, dim: usize) -> Result<bool> {
    if *lower == negate(upper.clone()) || negate(lower.clone()) == *upper {
        return Ok(true);
    }
    match (upper.as_literal(), lower.as_literal()) {
        (Some(a), Some(b)) => return Ok(a == -b),
        _ => {}
    }
    // Compare numerically at a fixed set of probe points.
    let probes = [0.3141, -0.2718, 0.5772, 1.4142, -0.6931, 0.9, -1.3];
    for shift in 0..probes.len() {
        let p: Vec<f64> = (0..dim).map(|k| probes[(k + shift) % probes.len()] * (1.0 + k as f64 * 0.1)).collect();
        let (a, b) = match (upper.eval(&p), lower.eval(&p)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        if (a + b).abs() > 1e-12 * (1.0 + a.abs()) {
            return Ok(false);
        }
    }
    Ok(true)
}
