//! Cotangent lifts of abelian base actions and the integrable systems they generate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{self, BFunction, Expr};
use crate::linalg;
use crate::phase::{BaseCoord, CoordKind, PhaseChart, PoissonStructure, StructureKind};
use crate::systems::{IntegrableSystem, NamedIntegral};

/// Infinitesimal generator of a one-parameter subgroup acting on the base.
#[derive(Debug, Clone, PartialEq)]
pub enum ActionGenerator {
    /// `d/dq`.
    Translation(String),
    /// `x_i d/dx_j - x_j d/dx_i`.
    Rotation(String, String),
    /// `x d/dx`.
    Scaling(String),
    /// `x_i d/dx_i + x_j d/dx_j`.
    RadialScaling(String, String),
    /// Arbitrary field, one component per base coordinate (in base order).
    Field(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ActionSpec {
    pub generators: Vec<ActionGenerator>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiftKind {
    SymplecticCanonical,
    /// Canonical b-lift singular along `{x = 0}` for the named base coordinate.
    CanonicalB { coord: String },
    /// Twisted b-lift; the distinguished angle defaults to the first generator's coordinate.
    TwistedB { c: f64, angle: Option<String> },
}

fn base_index(base: &[BaseCoord], name: &str) -> Result<usize> {
    base.iter()
        .position(|b| b.name == name)
        .ok_or_else(|| Error::UnknownIdentifier(name.to_string()))
}

fn real_index(base: &[BaseCoord], name: &str) -> Result<usize> {
    let i = base_index(base, name)?;
    if base[i].kind != CoordKind::Real {
        return Err(Error::InvalidArgument(format!("`{name}` must be a real base coordinate")));
    }
    Ok(i)
}

fn base_var(base: &[BaseCoord], i: usize) -> Expr {
    Expr::var(base[i].name.clone(), i)
}

impl ActionGenerator {
    /// Components of the base field as expressions in the base coordinates.
    pub fn base_field(&self, base: &[BaseCoord]) -> Result<Vec<Expr>> {
        let n = base.len();
        let mut out = vec![Expr::Num(0.0); n];
        match self {
            ActionGenerator::Translation(q) => out[base_index(base, q)?] = Expr::Num(1.0),
            ActionGenerator::Rotation(a, b) => {
                let (i, j) = (real_index(base, a)?, real_index(base, b)?);
                if i == j {
                    return Err(Error::InvalidArgument("rotation needs two distinct coordinates".into()));
                }
                out[j] = base_var(base, i);
                out[i] = Expr::Neg(Box::new(base_var(base, j)));
            }
            ActionGenerator::Scaling(x) => {
                let i = real_index(base, x)?;
                out[i] = base_var(base, i);
            }
            ActionGenerator::RadialScaling(a, b) => {
                let (i, j) = (real_index(base, a)?, real_index(base, b)?);
                if i == j {
                    return Err(Error::InvalidArgument("radial scaling needs two distinct coordinates".into()));
                }
                out[i] = base_var(base, i);
                out[j] = base_var(base, j);
            }
            ActionGenerator::Field(components) => {
                if components.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "field has {} components, base has {n}",
                        components.len()
                    )));
                }
                let names: Vec<&str> = base.iter().map(|b| b.name.as_str()).collect();
                for (k, c) in components.iter().enumerate() {
                    out[k] = c.rebind(&names)?;
                }
            }
        }
        Ok(out)
    }

    /// Closed-form `sum_k X^k p_k` for the catalog generators; generic sum for fields.
    fn canonical_pairing(&self, base: &[BaseCoord]) -> Result<Expr> {
        let n = base.len();
        let p = |i: usize| Expr::var(base[i].fiber.clone(), n + i);
        let x = |i: usize| base_var(base, i);
        Ok(match self {
            ActionGenerator::Translation(q) => p(base_index(base, q)?),
            ActionGenerator::Rotation(a, b) => {
                let (i, j) = (real_index(base, a)?, real_index(base, b)?);
                x(i).mul(p(j)).sub(x(j).mul(p(i)))
            }
            ActionGenerator::Scaling(s) => {
                let i = real_index(base, s)?;
                x(i).mul(p(i))
            }
            ActionGenerator::RadialScaling(a, b) => {
                let (i, j) = (real_index(base, a)?, real_index(base, b)?);
                x(i).mul(p(i)).add(x(j).mul(p(j)))
            }
            ActionGenerator::Field(_) => {
                let field = self.base_field(base)?;
                sum_terms(field.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| {
                    if c.as_literal() == Some(1.0) {
                        p(k)
                    } else {
                        c.mul(p(k))
                    }
                }))
            }
        })
    }
}

fn sum_terms(terms: impl Iterator<Item = Expr>) -> Expr {
    terms.reduce(|acc, t| acc.add(t)).unwrap_or(Expr::Num(0.0))
}

/// If `e` is `x_s * g` or `g * x_s` (or exactly `x_s`), returns `g`.
fn divide_by_var(e: &Expr, s: usize) -> Option<Expr> {
    match e {
        Expr::Var { index, .. } if *index == s => Some(Expr::Num(1.0)),
        Expr::Binary { op: expr::BinOp::Mul, lhs, rhs } => {
            if matches!(**lhs, Expr::Var { index, .. } if index == s) {
                Some((**rhs).clone())
            } else if matches!(**rhs, Expr::Var { index, .. } if index == s) {
                Some((**lhs).clone())
            } else {
                divide_by_var(lhs, s).map(|g| g.mul((**rhs).clone()))
            }
        }
        Expr::Neg(inner) => divide_by_var(inner, s).map(|g| Expr::Neg(Box::new(g))),
        _ => None,
    }
}

fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out
}

impl ActionSpec {
    pub fn new(generators: Vec<ActionGenerator>) -> Self {
        ActionSpec { generators }
    }

    /// Parses `rot(theta);rotation(x1,x2);scale(x);radial(x1,x2);field(e1,..,en)`.
    pub fn parse(src: &str, base: &[BaseCoord]) -> Result<Self> {
        let names: Vec<&str> = base.iter().map(|b| b.name.as_str()).collect();
        let mut generators = Vec::new();
        for item in src.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let open = item
                .find('(')
                .filter(|_| item.ends_with(')'))
                .ok_or_else(|| Error::InvalidArgument(format!("generator `{item}` must look like name(args)")))?;
            let head = item[..open].trim();
            let args = split_args(&item[open + 1..item.len() - 1]);
            let arity = |k: usize| -> Result<()> {
                if args.len() != k || args.iter().any(|a| a.is_empty()) {
                    return Err(Error::InvalidArgument(format!("`{head}` takes {k} argument(s)")));
                }
                Ok(())
            };
            let g = match head {
                "rot" | "translate" | "translation" => {
                    arity(1)?;
                    ActionGenerator::Translation(args[0].to_string())
                }
                "rotation" => {
                    arity(2)?;
                    ActionGenerator::Rotation(args[0].to_string(), args[1].to_string())
                }
                "scale" | "scaling" => {
                    arity(1)?;
                    ActionGenerator::Scaling(args[0].to_string())
                }
                "radial" => {
                    arity(2)?;
                    ActionGenerator::RadialScaling(args[0].to_string(), args[1].to_string())
                }
                "field" => {
                    arity(names.len())?;
                    ActionGenerator::Field(args.iter().map(|a| expr::parse(a, &names)).collect::<Result<_>>()?)
                }
                other => return Err(Error::InvalidArgument(format!("unknown generator `{other}`"))),
            };
            generators.push(g);
        }
        Ok(ActionSpec { generators })
    }
}

/// Parses a base description such as `S1xR2` or `T2`: factors `S1`, `T<k>`, `R<k>` joined
/// by `x`. A single angle is called `theta`, several `theta1..`; reals likewise `x` / `x1..`.
pub fn parse_base_spec(src: &str) -> Result<Vec<BaseCoord>> {
    let mut kinds = Vec::new();
    for factor in src.split(['x', 'X', '*']).map(str::trim) {
        let (head, count) = factor.split_at(factor.find(|c: char| c.is_ascii_digit()).unwrap_or(factor.len()));
        let count: usize = count
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad base factor `{factor}`")))?;
        let kind = match head {
            "S" if count == 1 => CoordKind::Angle,
            "T" => CoordKind::Angle,
            "R" => CoordKind::Real,
            _ => return Err(Error::InvalidArgument(format!("bad base factor `{factor}` (use S1, T<k>, R<k>)"))),
        };
        kinds.extend(std::iter::repeat(kind).take(count));
    }
    if kinds.is_empty() {
        return Err(Error::InvalidArgument("empty base".into()));
    }
    let angles = kinds.iter().filter(|k| **k == CoordKind::Angle).count();
    let reals = kinds.len() - angles;
    let (mut ia, mut ir) = (0, 0);
    Ok(kinds
        .into_iter()
        .map(|k| match k {
            CoordKind::Angle => {
                ia += 1;
                BaseCoord::angle(if angles == 1 { "theta".to_string() } else { format!("theta{ia}") })
            }
            CoordKind::Real => {
                ir += 1;
                BaseCoord::real(if reals == 1 { "x".to_string() } else { format!("x{ir}") })
            }
        })
        .collect())
}

impl LiftKind {
    /// Parses `canonical`, `twisted_b:c=1[,angle=theta]` or `canonical_b:x1`.
    pub fn parse(src: &str) -> Result<Self> {
        let (head, rest) = src.split_once(':').unwrap_or((src, ""));
        match head.trim() {
            "canonical" | "symplectic" if rest.trim().is_empty() => Ok(LiftKind::SymplecticCanonical),
            "canonical_b" => {
                let coord = rest.trim().trim_start_matches("singular=").to_string();
                if coord.is_empty() {
                    return Err(Error::InvalidArgument("canonical_b needs a coordinate, e.g. canonical_b:x1".into()));
                }
                Ok(LiftKind::CanonicalB { coord })
            }
            "twisted_b" => {
                let mut c = None;
                let mut angle = None;
                for kv in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    match kv.split_once('=') {
                        Some(("c", v)) => {
                            c = Some(v.trim().parse::<f64>().map_err(|_| {
                                Error::InvalidArgument(format!("bad value for c: `{v}`"))
                            })?)
                        }
                        Some(("angle", v)) => angle = Some(v.trim().to_string()),
                        _ => return Err(Error::InvalidArgument(format!("bad twisted_b option `{kv}`"))),
                    }
                }
                Ok(LiftKind::TwistedB { c: c.unwrap_or(1.0), angle })
            }
            other => Err(Error::InvalidArgument(format!("unknown lift kind `{other}`"))),
        }
    }
}

/// A lift-generated system with the data needed to re-derive its fundamental fields.
#[derive(Debug, Clone)]
pub struct Lift {
    pub system: IntegrableSystem,
    pub base: Vec<BaseCoord>,
    pub action: ActionSpec,
    pub kind: LiftKind,
    pub warnings: Vec<String>,
}

impl Lift {
    pub fn structure(&self) -> &PoissonStructure {
        self.system.structure()
    }

    /// Fundamental field `X^#` of generator `index` on the phase space.
    pub fn fundamental_field(&self, index: usize, point: &[f64]) -> Result<Vec<f64>> {
        let field = self.action.generators[index].base_field(&self.base)?;
        let singular = match &self.kind {
            LiftKind::CanonicalB { coord } => Some(base_index(&self.base, coord)?),
            _ => None,
        };
        lifted_field(&field, singular, self.system.chart(), point)
    }
}

/// Cotangent lift of the base field `X`: `(X^k, -sum_j p_j dX^j/dq_k)`. With `singular = Some(s)`
/// the fiber coordinate of `s` is the b-momentum `x_s * xi_s`, which requires `x_s != 0`.
pub fn lifted_field(field: &[Expr], singular: Option<usize>, chart: &PhaseChart, point: &[f64]) -> Result<Vec<f64>> {
    chart.check_point(point)?;
    let n = chart.n();
    let q = &point[..n];
    let mut xi: Vec<f64> = point[n..2 * n].to_vec();
    if let Some(s) = singular {
        if q[s] == 0.0 {
            return Err(Error::Singular(format!("lifted field needs {} != 0", chart.name(s))));
        }
        xi[s] /= q[s];
    }
    let jets: Vec<_> = field.iter().map(|c| c.jet::<f64>(q)).collect::<Result<_>>()?;
    let mut out = vec![0.0; chart.dim()];
    for k in 0..n {
        out[k] = jets[k].value;
        out[n + k] = -(0..n).map(|j| xi[j] * jets[j].partials.get(k).copied().unwrap_or(0.0)).sum::<f64>();
    }
    if let Some(s) = singular {
        out[n + s] = out[s] * xi[s] + q[s] * out[n + s];
    }
    Ok(out)
}

/// Value of a moment component: a number, or the b-function itself on its singular set.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentValue {
    Finite(f64),
    Singular(BFunction),
}

/// Ordinary coefficients of the Liouville one-form of `structure` at `point` (zero on
/// transverse coordinates). Errors on the singular set of a b-structure.
pub fn liouville_form(chart: &PhaseChart, structure: &PoissonStructure, point: &[f64]) -> Result<Vec<f64>> {
    chart.check_point(point)?;
    let n = chart.n();
    let mut out = vec![0.0; chart.dim()];
    out[..n].copy_from_slice(&point[n..2 * n]);
    match structure.kind() {
        StructureKind::Canonical => {}
        StructureKind::TwistedB { c } => {
            let s = structure.singular().expect("twisted structure has a singular coordinate");
            if point[s] == 0.0 {
                return Err(Error::Singular(format!("Liouville form has a log pole at {} = 0", chart.name(s))));
            }
            out[s - n] = c * point[s].abs().ln();
        }
        StructureKind::CanonicalB => {
            let s = structure.singular().expect("canonical b-structure has a singular coordinate");
            if point[s] == 0.0 {
                return Err(Error::Singular(format!("Liouville form has a pole at {} = 0", chart.name(s))));
            }
            out[s] = point[n + s] / point[s];
        }
        StructureKind::Custom => {
            return Err(Error::UnsupportedStructure("custom structures carry no Liouville form".into()))
        }
    }
    Ok(out)
}

/// `<lambda, X^#>` at `point`, computed from the projection of the lifted field (the base field).
pub fn moment_pairing(chart: &PhaseChart, structure: &PoissonStructure, field: &[Expr], point: &[f64]) -> Result<MomentValue> {
    chart.check_point(point)?;
    let n = chart.n();
    let x: Vec<f64> = field.iter().map(|c| c.eval(&point[..n])).collect::<Result<_>>()?;
    if let (StructureKind::TwistedB { c }, Some(s)) = (structure.kind(), structure.singular()) {
        if point[s] == 0.0 && x[s - n] != 0.0 {
            let rest = sum_terms(
                (0..n)
                    .filter(|&k| k != s - n && x[k] != 0.0)
                    .map(|k| Expr::num(x[k]).mul(Expr::var(chart.name(n + k), n + k))),
            );
            return Ok(MomentValue::Singular(BFunction::new(c * x[s - n], chart.name(s), s, rest)));
        }
    }
    let lambda = liouville_form(chart, structure, point)?;
    Ok(MomentValue::Finite((0..n).map(|k| lambda[k] * x[k]).sum()))
}

const CHECK_POINTS: usize = 100;
const COMMUTATION_TOLERANCE: f64 = 1e-10;

fn random_base_point(base: &[BaseCoord], rng: &mut ChaCha8Rng) -> Vec<f64> {
    base.iter()
        .map(|b| match b.kind {
            CoordKind::Angle => rng.gen_range(0.0..1.0),
            CoordKind::Real => rng.gen_range(-2.0..2.0),
        })
        .collect()
}

/// Checks that the generators pairwise commute and are independent at generic points.
pub fn check_abelian(base: &[BaseCoord], fields: &[Vec<Expr>]) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut independent = 0;
    for _ in 0..CHECK_POINTS {
        let q = random_base_point(base, &mut rng);
        let jets: Vec<Vec<_>> = fields
            .iter()
            .map(|f| f.iter().map(|c| c.jet::<f64>(&q)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        for a in 0..fields.len() {
            for b in a + 1..fields.len() {
                let bracket: Vec<f64> = (0..base.len())
                    .map(|k| {
                        (0..base.len())
                            .map(|j| {
                                jets[a][j].value * jets[b][k].partials[j] - jets[b][j].value * jets[a][k].partials[j]
                            })
                            .sum()
                    })
                    .collect();
                let norm = linalg::norm(&bracket);
                if norm > COMMUTATION_TOLERANCE {
                    return Err(Error::NonCommuting { first: a, second: b, norm });
                }
            }
        }
        let m: Vec<Vec<f64>> = jets.iter().map(|f| f.iter().map(|j| j.value).collect()).collect();
        let sv = linalg::singular_values(&m);
        independent += (sv.last().copied().unwrap_or(0.0) > 1e-6) as usize;
    }
    if (independent as f64) < 0.99 * CHECK_POINTS as f64 {
        return Err(Error::InvalidArgument(format!(
            "generators are dependent at {} of {CHECK_POINTS} generic points (action not effective)",
            CHECK_POINTS - independent
        )));
    }
    Ok(())
}

fn integral_name(i: usize) -> String {
    format!("f{}", i + 1)
}

/// Builds the lifted structure and the integrable system of moment components
/// `f_i = <lambda, X_i^#>` (Liouville's theorem on cotangent lifts of abelian actions).
pub fn build_lift(base: Vec<BaseCoord>, action: &ActionSpec, kind: &LiftKind) -> Result<Lift> {
    let n = base.len();
    let k = action.generators.len();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("{k} generators given for a {n}-dimensional base")));
    }
    let fields: Vec<Vec<Expr>> = action.generators.iter().map(|g| g.base_field(&base)).collect::<Result<_>>()?;
    check_abelian(&base, &fields)?;
    let mut warnings = Vec::new();
    if k < n {
        warnings.push(format!(
            "{k} generators on a {n}-dimensional base: the moment map supplies {k} of the {n} integrals; \
             add {} further commuting integral(s) (e.g. an energy) for a complete system",
            n - k
        ));
    }
    let (chart, structure, integrals) = match kind {
        LiftKind::SymplecticCanonical => {
            let chart = PhaseChart::cotangent(base.clone())?;
            let integrals = action
                .generators
                .iter()
                .map(|g| Ok(BFunction::smooth(g.canonical_pairing(&base)?)))
                .collect::<Result<Vec<_>>>()?;
            let structure = PoissonStructure::canonical(&chart);
            (chart, structure, integrals)
        }
        LiftKind::TwistedB { c, angle } => {
            let angle_name = match (angle, &action.generators[0]) {
                (Some(a), _) => a.clone(),
                (None, ActionGenerator::Translation(q)) => q.clone(),
                _ => {
                    return Err(Error::InvalidArgument(
                        "twisted lift needs the first generator to be the circle rotation".into(),
                    ))
                }
            };
            let t = base_index(&base, &angle_name)?;
            if base[t].kind != CoordKind::Angle {
                return Err(Error::InvalidArgument(format!("`{angle_name}` is not an angle coordinate")));
            }
            if action.generators[0] != ActionGenerator::Translation(angle_name.clone()) {
                return Err(Error::InvalidArgument(format!(
                    "twisted lift needs the first generator to be rot({angle_name})"
                )));
            }
            // The base must split as S^1 x N: the other generators act on N alone.
            for (k, f) in fields.iter().enumerate().skip(1) {
                if !f[t].is_zero() || f.iter().any(|c| c.depends_on(t)) {
                    return Err(Error::InvalidArgument(format!(
                        "generator {} does not act on the complement of `{angle_name}`",
                        k + 1
                    )));
                }
            }
            let fiber = base[t].fiber.clone();
            let chart = PhaseChart::new(base.clone(), Vec::new(), Some(&fiber))?;
            let structure = PoissonStructure::twisted_b(&chart, *c)?;
            let mut integrals = vec![BFunction::new(*c, fiber, n + t, Expr::Num(0.0))];
            for g in &action.generators[1..] {
                integrals.push(BFunction::smooth(g.canonical_pairing(&base)?));
            }
            (chart, structure, integrals)
        }
        LiftKind::CanonicalB { coord } => {
            let s = real_index(&base, coord)?;
            let chart = PhaseChart::new(base.clone(), Vec::new(), Some(coord))?;
            let structure = PoissonStructure::canonical_b(&chart)?;
            let mut integrals = Vec::new();
            for (k, f) in fields.iter().enumerate() {
                // <lambda, X^#> = p_s X^s / x_s + sum_{j != s} p_j X^j
                let mut terms = Vec::new();
                if !f[s].is_zero() {
                    let g = divide_by_var(&f[s], s).ok_or_else(|| {
                        Error::InvalidArgument(format!(
                            "generator {} is not tangent to {{{coord} = 0}}; no canonical b-lift",
                            k + 1
                        ))
                    })?;
                    let p = Expr::var(base[s].fiber.clone(), n + s);
                    terms.push(if g.as_literal() == Some(1.0) { p } else { g.mul(p) });
                }
                for j in (0..n).filter(|&j| j != s && !f[j].is_zero()) {
                    let p = Expr::var(base[j].fiber.clone(), n + j);
                    terms.push(if f[j].as_literal() == Some(1.0) { p } else { f[j].clone().mul(p) });
                }
                integrals.push(BFunction::smooth(sum_terms(terms.into_iter())));
            }
            warnings.push(format!(
                "canonical b-lift: moment components restricted to {{{coord} = 0}} have at most {} independent differentials, so the lift is never b-integrable",
                n - 1
            ));
            (chart, structure, integrals)
        }
    };
    let named = integrals
        .into_iter()
        .enumerate()
        .map(|(i, f)| NamedIntegral::new(integral_name(i), f))
        .collect();
    let system = IntegrableSystem::new("lift", chart, structure, named)?;
    Ok(Lift { system, base, action: action.clone(), kind: kind.clone(), warnings })
}

/// Lift of the translation action on the cylinder `R^k x T^(n-k)` with its parallel basis.
/// Canonical and canonical-b lifts list the real coordinates first; the twisted lift puts
/// the angles first so that the distinguished circle leads.
pub fn affine_cylinder_system(k: usize, n: usize, kind: &LiftKind) -> Result<Lift> {
    if k > n || n == 0 {
        return Err(Error::InvalidArgument(format!("affine cylinder needs 0 <= k <= n, n >= 1 (got k={k}, n={n})")));
    }
    let m = n - k;
    if matches!(kind, LiftKind::TwistedB { .. }) && m == 0 {
        return Err(Error::InvalidArgument("twisted lift needs at least one circle factor".into()));
    }
    let reals: Vec<BaseCoord> = (1..=k)
        .map(|i| BaseCoord::real(if k == 1 { "x".to_string() } else { format!("x{i}") }))
        .collect();
    let angles: Vec<BaseCoord> = (1..=m)
        .map(|i| {
            if m == 1 {
                BaseCoord::with_fiber("theta", CoordKind::Angle, "a")
            } else {
                BaseCoord::with_fiber(format!("theta{i}"), CoordKind::Angle, format!("a{i}"))
            }
        })
        .collect();
    let base: Vec<BaseCoord> = match kind {
        LiftKind::TwistedB { .. } => angles.into_iter().chain(reals).collect(),
        _ => reals.into_iter().chain(angles).collect(),
    };
    let action = ActionSpec::new(base.iter().map(|b| ActionGenerator::Translation(b.name.clone())).collect());
    let kind = match kind {
        LiftKind::TwistedB { c, .. } => LiftKind::TwistedB { c: *c, angle: Some(base[0].name.clone()) },
        other => other.clone(),
    };
    let mut lift = build_lift(base, &action, &kind)?;
    lift.system.name = format!("affine({k},{n})");
    Ok(lift)
}
