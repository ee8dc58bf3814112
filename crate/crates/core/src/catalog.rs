//! Built-in model systems.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{BFunction, Expr};
use crate::lift::{affine_cylinder_system, LiftKind};
use crate::phase::{BaseCoord, CoordKind, PhaseChart, PoissonStructure};
use crate::systems::{IntegrableSystem, NamedIntegral, Tolerances};

type Predicate = Box<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Known set where the integrals fail to be independent.
pub struct SingularSet {
    pub description: String,
    predicate: Predicate,
}

impl SingularSet {
    fn empty() -> Self {
        SingularSet { description: "none".into(), predicate: Box::new(|_| false) }
    }

    /// Common zero set of the listed coordinates.
    fn zeros(chart: &PhaseChart, coords: &[&str]) -> Self {
        let idx: Vec<usize> = coords.iter().map(|c| chart.index_of(c).expect("catalog coordinate")).collect();
        SingularSet {
            description: format!("{} = 0", coords.join(" = ")),
            predicate: Box::new(move |p| idx.iter().all(|&i| p[i].abs() <= 1e-9)),
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        (self.predicate)(p)
    }
}

impl fmt::Debug for SingularSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SingularSet").field("description", &self.description).finish()
    }
}

#[derive(Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub system: IntegrableSystem,
    pub provenance: &'static str,
    pub singular_set: SingularSet,
    /// Tolerances the entry is expected to meet under `verify`.
    pub expected: Tolerances,
}

/// `(id template, description)` of every catalog family.
pub const FAMILIES: &[(&str, &str)] = &[
    ("can_model(n)", "T*T^n with the canonical structure; integrals are the fiber projections a_i"),
    ("tw_model(n,c)", "T*T^n with the twisted b-structure of weight c; integrals (c log|a1|, a2, .., an)"),
    ("bdarboux(n)", "b-Darboux normal form z d/dt ^ d/dz + sum d/dx_i ^ d/dy_i as a custom structure"),
    ("oscillator_b", "S^1 x R^2 twisted lift of rotations: (log|a|, angular momentum L, energy H)"),
    ("oscillator(n)", "symplectic harmonic oscillator on T*R^n, n = 1 (H) or n = 2 (L, H)"),
    ("hyperbolic(c)", "S^1 x R twisted lift of (rotation, scaling): (c log|p|, x y), hyperbolic at x = y = 0"),
    ("focusfocus(c)", "S^1 x R^2 twisted lift of (rotation, radial scaling, rotation): focus-focus at the origin"),
    ("affine(k,n[,kind])", "translation lift on the cylinder R^k x T^(n-k); kind canonical (default) or twisted_b:c=.."),
    ("poisson_product(r,s)", "(T*T^r)_can x (R^(s-r), zero structure) with integrals (a_i, z_j)"),
];

fn integrals(chart: &PhaseChart, items: &[(&str, &str)]) -> Result<Vec<NamedIntegral>> {
    items
        .iter()
        .map(|(name, src)| Ok(NamedIntegral::new(*name, chart.parse_bfunction(src)?)))
        .collect()
}

fn numbered(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}

fn torus_chart(n: usize, transverse: Vec<String>, singular: Option<&str>) -> Result<PhaseChart> {
    let base = (1..=n)
        .map(|i| BaseCoord::with_fiber(numbered("theta", i), CoordKind::Angle, numbered("a", i)))
        .collect();
    PhaseChart::new(base, transverse, singular)
}

fn check_positive(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("c must be positive, got {c}")));
    }
    Ok(())
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > 16 {
        return Err(Error::InvalidArgument(format!("dimension must be in 1..=16, got {n}")));
    }
    Ok(())
}

pub fn can_model(n: usize) -> Result<CatalogEntry> {
    check_dim(n)?;
    let chart = torus_chart(n, Vec::new(), None)?;
    let structure = PoissonStructure::canonical(&chart);
    let items: Vec<(String, String)> = (1..=n).map(|i| (numbered("f", i), numbered("a", i))).collect();
    let items: Vec<(&str, &str)> = items.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let ints = integrals(&chart, &items)?;
    Ok(CatalogEntry {
        id: format!("can_model({n})"),
        system: IntegrableSystem::new(format!("can_model({n})"), chart, structure, ints)?,
        provenance: "canonical cotangent model; the moment map is the projection to the fiber",
        singular_set: SingularSet::empty(),
        expected: Tolerances::default(),
    })
}

pub fn tw_model(n: usize, c: f64) -> Result<CatalogEntry> {
    check_dim(n)?;
    check_positive(c)?;
    let chart = torus_chart(n, Vec::new(), Some("a1"))?;
    let structure = PoissonStructure::twisted_b(&chart, c)?;
    let mut ints = vec![NamedIntegral::new("f1", BFunction::new(c, "a1", n, Expr::Num(0.0)))];
    for i in 2..=n {
        ints.push(NamedIntegral::new(numbered("f", i), chart.parse_bfunction(&numbered("a", i))?));
    }
    Ok(CatalogEntry {
        id: format!("tw_model({n},{c})"),
        system: IntegrableSystem::new(format!("tw_model({n},{c})"), chart, structure, ints)?,
        provenance: "twisted b-cotangent model; moment map (c log|a1|, a2, .., an)",
        singular_set: SingularSet::empty(),
        expected: Tolerances::default(),
    })
}

/// Local b-Darboux form; under `a1 -> z`, `c*theta1 -> t` it is the twisted model of weight `c`.
pub fn bdarboux(n: usize) -> Result<CatalogEntry> {
    check_dim(n)?;
    let mut base = vec![BaseCoord::with_fiber("t", CoordKind::Real, "z")];
    for i in 1..n {
        base.push(BaseCoord::with_fiber(numbered("x", i), CoordKind::Real, numbered("y", i)));
    }
    let chart = PhaseChart::new(base, Vec::new(), Some("z"))?;
    let mut entries = vec![(0, n, Expr::var("z", n))];
    for i in 1..n {
        entries.push((i, n + i, Expr::Num(1.0)));
    }
    let structure = PoissonStructure::custom_upper(&chart, entries)?;
    let mut items = vec![("f1".to_string(), "log(abs(z))".to_string())];
    for i in 1..n {
        items.push((numbered("f", i + 1), numbered("y", i)));
    }
    let items: Vec<(&str, &str)> = items.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let ints = integrals(&chart, &items)?;
    Ok(CatalogEntry {
        id: format!("bdarboux({n})"),
        system: IntegrableSystem::new(format!("bdarboux({n})"), chart, structure, ints)?,
        provenance: "b-Darboux normal form near the critical hypersurface z = 0",
        singular_set: SingularSet::empty(),
        expected: Tolerances::default(),
    })
}

fn oscillator_singular_set(chart: &PhaseChart) -> SingularSet {
    let i = |c: &str| chart.index_of(c).expect("oscillator coordinate");
    let (x1, x2, y1, y2) = (i("x1"), i("x2"), i("y1"), i("y2"));
    SingularSet {
        description: "x = y = 0, or y1 = -x2 and y2 = x1, or y1 = x2 and y2 = -x1".into(),
        predicate: Box::new(move |p| {
            let eps = 1e-9;
            let origin = [x1, x2, y1, y2].iter().all(|&k| p[k].abs() <= eps);
            let plus = (p[y1] + p[x2]).abs() <= eps && (p[y2] - p[x1]).abs() <= eps;
            let minus = (p[y1] - p[x2]).abs() <= eps && (p[y2] + p[x1]).abs() <= eps;
            origin || plus || minus
        }),
    }
}

fn s1_chart(reals: usize, singular: bool, fiber: &str) -> Result<PhaseChart> {
    let mut base = vec![BaseCoord::with_fiber("theta", CoordKind::Angle, fiber)];
    if reals == 1 {
        base.push(BaseCoord::with_fiber("x", CoordKind::Real, "y"));
    } else {
        for i in 1..=reals {
            base.push(BaseCoord::with_fiber(numbered("x", i), CoordKind::Real, numbered("y", i)));
        }
    }
    PhaseChart::new(base, Vec::new(), singular.then_some(fiber))
}

pub fn oscillator_b() -> Result<CatalogEntry> {
    let chart = s1_chart(2, true, "a")?;
    let structure = PoissonStructure::twisted_b(&chart, 1.0)?;
    let ints = integrals(
        &chart,
        &[("f1", "log(abs(a))"), ("L", "x1*y2 - x2*y1"), ("H", "0.5*(y1^2 + y2^2) + 0.5*(x1^2 + x2^2)")],
    )?;
    let singular_set = oscillator_singular_set(&chart);
    Ok(CatalogEntry {
        id: "oscillator_b".into(),
        system: IntegrableSystem::new("oscillator_b", chart, structure, ints)?,
        provenance: "harmonic oscillator on S^1 x R^2: twisted lift of the circle and plane rotations plus energy",
        singular_set,
        expected: Tolerances::default(),
    })
}

/// Symplectic harmonic oscillator on `T*R` (`n = 1`) or `T*R^2` (`n = 2`, with angular momentum).
pub fn oscillator(n: usize) -> Result<CatalogEntry> {
    let (chart, items): (PhaseChart, Vec<(&str, &str)>) = match n {
        1 => (
            PhaseChart::cotangent(vec![BaseCoord::with_fiber("x", CoordKind::Real, "y")])?,
            vec![("H", "0.5*(x^2 + y^2)")],
        ),
        2 => (
            PhaseChart::cotangent(vec![
                BaseCoord::with_fiber("x1", CoordKind::Real, "y1"),
                BaseCoord::with_fiber("x2", CoordKind::Real, "y2"),
            ])?,
            vec![("L", "x1*y2 - x2*y1"), ("H", "0.5*(y1^2 + y2^2) + 0.5*(x1^2 + x2^2)")],
        ),
        _ => return Err(Error::InvalidArgument(format!("oscillator(n) needs n = 1 or 2, got {n}"))),
    };
    let structure = PoissonStructure::canonical(&chart);
    let ints = integrals(&chart, &items)?;
    let singular_set =
        if n == 1 { SingularSet::zeros(&chart, &["x", "y"]) } else { oscillator_singular_set(&chart) };
    Ok(CatalogEntry {
        id: format!("oscillator({n})"),
        system: IntegrableSystem::new(format!("oscillator({n})"), chart, structure, ints)?,
        provenance: "symplectic harmonic oscillator (sum of potential and kinetic energy)",
        singular_set,
        expected: Tolerances::default(),
    })
}

pub fn hyperbolic(c: f64) -> Result<CatalogEntry> {
    check_positive(c)?;
    let chart = s1_chart(1, true, "p")?;
    let structure = PoissonStructure::twisted_b(&chart, c)?;
    let ints = vec![
        NamedIntegral::new("f1", BFunction::new(c, "p", chart.index_of("p").expect("p"), Expr::Num(0.0))),
        NamedIntegral::new("f2", chart.parse_bfunction("x*y")?),
    ];
    let singular_set = SingularSet::zeros(&chart, &["x", "y"]);
    Ok(CatalogEntry {
        id: format!("hyperbolic({c})"),
        system: IntegrableSystem::new(format!("hyperbolic({c})"), chart, structure, ints)?,
        provenance: "twisted lift of rotation and scaling on S^1 x R; hyperbolic singularity",
        singular_set,
        expected: Tolerances::default(),
    })
}

pub fn focusfocus(c: f64) -> Result<CatalogEntry> {
    check_positive(c)?;
    let chart = s1_chart(2, true, "p")?;
    let structure = PoissonStructure::twisted_b(&chart, c)?;
    let ints = vec![
        NamedIntegral::new("f1", BFunction::new(c, "p", chart.index_of("p").expect("p"), Expr::Num(0.0))),
        NamedIntegral::new("f2", chart.parse_bfunction("x1*y1 + x2*y2")?),
        NamedIntegral::new("f3", chart.parse_bfunction("x1*y2 - y1*x2")?),
    ];
    let singular_set = SingularSet::zeros(&chart, &["x1", "x2", "y1", "y2"]);
    Ok(CatalogEntry {
        id: format!("focusfocus({c})"),
        system: IntegrableSystem::new(format!("focusfocus({c})"), chart, structure, ints)?,
        provenance: "twisted lift of rotation, radial scaling and plane rotation; focus-focus singularity",
        singular_set,
        expected: Tolerances::default(),
    })
}

pub fn affine(k: usize, n: usize, kind: &LiftKind) -> Result<CatalogEntry> {
    let lift = affine_cylinder_system(k, n, kind)?;
    let suffix = match kind {
        LiftKind::SymplecticCanonical => String::new(),
        LiftKind::TwistedB { c, .. } => format!(",twisted_b:c={c}"),
        LiftKind::CanonicalB { coord } => format!(",canonical_b:{coord}"),
    };
    let id = format!("affine({k},{n}{suffix})");
    let mut system = lift.system;
    system.name = id.clone();
    Ok(CatalogEntry {
        id,
        system,
        provenance: "cotangent lift of the translation action on an affine cylinder",
        singular_set: SingularSet::empty(),
        expected: Tolerances::default(),
    })
}

pub fn poisson_product(r: usize, s: usize) -> Result<CatalogEntry> {
    check_dim(r)?;
    if r > s {
        return Err(Error::InvalidArgument(format!("poisson_product needs r <= s, got r = {r}, s = {s}")));
    }
    let transverse: Vec<String> = (1..=s - r).map(|j| numbered("z", j)).collect();
    let chart = torus_chart(r, transverse, None)?;
    let structure = PoissonStructure::canonical(&chart);
    let mut items: Vec<(String, String)> = (1..=r).map(|i| (numbered("f", i), numbered("a", i))).collect();
    items.extend((1..=s - r).map(|j| (numbered("f", r + j), numbered("z", j))));
    let items: Vec<(&str, &str)> = items.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let ints = integrals(&chart, &items)?;
    Ok(CatalogEntry {
        id: format!("poisson_product({r},{s})"),
        system: IntegrableSystem::new(format!("poisson_product({r},{s})"), chart, structure, ints)?,
        provenance: "product of the canonical torus model with a zero Poisson structure",
        singular_set: SingularSet::empty(),
        expected: Tolerances::default(),
    })
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| Error::InvalidArgument(format!("expected a non-negative integer, got `{s}`")))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::InvalidArgument(format!("expected a number, got `{s}`")))
}

/// Looks up an entry by id, e.g. `tw_model(2,1)`, `hyperbolic(1)` or `oscillator_b`.
pub fn get(id: &str) -> Result<CatalogEntry> {
    let id = id.trim();
    let (name, args) = match id.find('(') {
        Some(open) if id.ends_with(')') => {
            let inner = &id[open + 1..id.len() - 1];
            let args: Vec<&str> = if inner.trim().is_empty() { Vec::new() } else { inner.split(',').collect() };
            (id[..open].trim(), args)
        }
        Some(_) => return Err(Error::UnknownCatalogId(id.to_string())),
        None => (id, Vec::new()),
    };
    let arity = |lo: usize, hi: usize| -> Result<()> {
        if args.len() < lo || args.len() > hi {
            return Err(Error::InvalidArgument(format!("`{name}` takes {lo}..={hi} parameters, got {}", args.len())));
        }
        Ok(())
    };
    let arg = |i: usize| args.get(i).copied();
    match name {
        "can_model" => {
            arity(0, 1)?;
            can_model(arg(0).map(parse_usize).transpose()?.unwrap_or(2))
        }
        "tw_model" => {
            arity(0, 2)?;
            tw_model(
                arg(0).map(parse_usize).transpose()?.unwrap_or(2),
                arg(1).map(parse_f64).transpose()?.unwrap_or(1.0),
            )
        }
        "bdarboux" => {
            arity(0, 1)?;
            bdarboux(arg(0).map(parse_usize).transpose()?.unwrap_or(2))
        }
        "oscillator_b" => {
            arity(0, 0)?;
            oscillator_b()
        }
        "oscillator" => {
            arity(0, 1)?;
            oscillator(arg(0).map(parse_usize).transpose()?.unwrap_or(1))
        }
        "hyperbolic" => {
            arity(0, 1)?;
            hyperbolic(arg(0).map(parse_f64).transpose()?.unwrap_or(1.0))
        }
        "focusfocus" => {
            arity(0, 1)?;
            focusfocus(arg(0).map(parse_f64).transpose()?.unwrap_or(1.0))
        }
        "affine" => {
            if args.len() < 2 {
                return Err(Error::InvalidArgument("`affine` takes (k, n[, kind])".into()));
            }
            let kind = if args.len() > 2 { LiftKind::parse(&args[2..].join(","))? } else { LiftKind::SymplecticCanonical };
            affine(parse_usize(args[0])?, parse_usize(args[1])?, &kind)
        }
        "poisson_product" => {
            arity(0, 2)?;
            poisson_product(
                arg(0).map(parse_usize).transpose()?.unwrap_or(1),
                arg(1).map(parse_usize).transpose()?.unwrap_or(2),
            )
        }
        _ => Err(Error::UnknownCatalogId(id.to_string())),
    }
}
