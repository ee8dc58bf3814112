//! Period lattices of joint flows, action integrals and the modular period.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::flow::{self, Method};
use crate::lift::liouville_form;
use crate::linalg::{self, Matrix};
use crate::phase::{PoissonStructure, StructureKind};
use crate::systems::IntegrableSystem;

/// Settings for [`find_period_lattice_with`].
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSearch {
    /// Sampling interval of the per-generator return scan.
    pub scan_step: f64,
    /// Largest return time searched along each generator.
    pub horizon: f64,
    /// Largest integrator step.
    pub max_step: f64,
    pub tolerance: f64,
    /// Denominators tried when looking for lattice points between the scanned generators.
    pub denominators: Vec<i64>,
}

impl Default for LatticeSearch {
    fn default() -> Self {
        LatticeSearch { scan_step: 0.05, horizon: 100.0, max_step: 1e-3, tolerance: 1e-8, denominators: vec![2, 3] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodLattice {
    /// Integrals whose flows span the torus; generator entries refer to these, in order.
    pub integrals: Vec<String>,
    #[serde(skip)]
    pub active: Vec<usize>,
    /// Joint-flow times returning the base point to itself, one vector per generator.
    pub generators: Vec<Vec<f64>>,
    /// Angle-wrapped return distance of each generator.
    pub residuals: Vec<f64>,
    /// True once the basis has been LLL-reduced and put in canonical order.
    pub reduced: bool,
}

impl PeriodLattice {
    /// Full time vector (zeros on inactive integrals) for `coeffs` in the active integrals.
    pub fn embed(&self, total: usize, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; total];
        for (&i, &v) in self.active.iter().zip(coeffs) {
            out[i] = v;
        }
        out
    }
}

fn return_residual(sys: &IntegrableSystem, x: &[f64], m: &[f64]) -> Vec<f64> {
    sys.chart().wrapped_difference(x, m)
}

fn flow_combined(sys: &IntegrableSystem, s: &[f64], m: &[f64], max_step: f64) -> Result<Vec<f64>> {
    flow::combined_flow(sys, s, 1.0, m, max_step)
}

/// Gauss-Newton on the return map `s -> wrap(Phi_s(m) - m)`. The Jacobian columns are the
/// Hamiltonian fields at the end point, exact because the flows commute.
fn polish(
    sys: &IntegrableSystem,
    active: &[usize],
    s0: &[f64],
    m: &[f64],
    search: &LatticeSearch,
) -> Result<(Vec<f64>, f64)> {
    let total = sys.integrals().len();
    let embed = |c: &[f64]| {
        let mut out = vec![0.0; total];
        for (&i, &v) in active.iter().zip(c) {
            out[i] = v;
        }
        out
    };
    let mut s = s0.to_vec();
    let mut x = flow_combined(sys, &embed(&s), m, search.max_step)?;
    let mut r = return_residual(sys, &x, m);
    let mut best = linalg::norm(&r);
    for _ in 0..12 {
        if best <= 1e-13 {
            break;
        }
        let cols: Vec<Vec<f64>> = active.iter().map(|&i| sys.field(i, &x)).collect::<Result<_>>()?;
        let j = linalg::transpose(&cols);
        let delta = linalg::least_squares(&j, &r)
            .ok_or_else(|| Error::RankDeficient("return-map Jacobian is singular".into()))?;
        let trial: Vec<f64> = s.iter().zip(&delta).map(|(a, d)| a - d).collect();
        let xt = flow_combined(sys, &embed(&trial), m, search.max_step)?;
        let rt = return_residual(sys, &xt, m);
        let nt = linalg::norm(&rt);
        if !(nt < best) {
            break;
        }
        s = trial;
        x = xt;
        r = rt;
        best = nt;
    }
    Ok((s, best))
}

/// First positive return time of the single flow `X_{f_i}` through `m`.
fn scan_generator(sys: &IntegrableSystem, i: usize, m: &[f64], search: &LatticeSearch) -> Result<Option<f64>> {
    let field = |y: &[f64]| sys.field(i, y);
    let distance = |y: &[f64]| linalg::norm(&return_residual(sys, y, m));
    let mut t = 0.0;
    let mut x = m.to_vec();
    let mut history: Vec<(f64, Vec<f64>, f64)> = Vec::new();
    while t < search.horizon {
        x = flow::flow_for(&field, &x, search.scan_step, search.max_step, Method::Rk4)?;
        t += search.scan_step;
        let d = distance(&x);
        history.push((t, x.clone(), d));
        if history.len() < 3 {
            continue;
        }
        let k = history.len() - 2;
        let (tk, xk, dk) = &history[k];
        if !(*dk <= history[k - 1].2 && *dk <= history[k + 1].2) {
            continue;
        }
        let speed = linalg::norm(&sys.field(i, xk)?);
        if *dk > 2.0 * search.scan_step * speed + 1e-6 {
            continue;
        }
        // Newton on the offset from the scanned state.
        let mut delta = 0.0;
        let mut y = xk.clone();
        for _ in 0..30 {
            let r = return_residual(sys, &y, m);
            if linalg::norm(&r) <= 1e-12 {
                break;
            }
            let v = sys.field(i, &y)?;
            let vv = linalg::dot(&v, &v);
            if vv == 0.0 {
                break;
            }
            let step = linalg::dot(&r, &v) / vv;
            if !step.is_finite() || step.abs() > 2.0 * search.scan_step {
                break;
            }
            delta -= step;
            y = flow::flow_for(&field, xk, delta, search.max_step, Method::Rk4)?;
        }
        if distance(&y) <= 1e3 * search.tolerance && tk + delta > 1.5 * search.scan_step {
            return Ok(Some(tk + delta));
        }
        history.drain(..k - 1);
    }
    Ok(None)
}

/// Integer basis of the lattice spanned by `cols` (each of length `n`, spanning `Z^n`-rank `n`).
fn integer_basis(mut cols: Vec<Vec<i64>>, n: usize) -> Vec<Vec<i64>> {
    let mut basis = Vec::new();
    for row in 0..n {
        loop {
            let nz: Vec<usize> = (0..cols.len()).filter(|&c| cols[c][row] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&c| cols[c][row].abs()).expect("nonempty");
            for &c in nz.iter().filter(|&&c| c != p) {
                let q = cols[c][row] / cols[p][row];
                let pivot = cols[p].clone();
                for (a, b) in cols[c].iter_mut().zip(&pivot) {
                    *a -= q * b;
                }
            }
        }
        if let Some(p) = (0..cols.len()).find(|&c| cols[c][row] != 0) {
            basis.push(cols.remove(p));
        }
    }
    basis
}

/// LLL reduction (delta = 3/4) of the columns of `b`.
fn lll(mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = b.len();
    let gram_schmidt = |b: &[Vec<f64>]| -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut bs: Vec<Vec<f64>> = Vec::with_capacity(b.len());
        let mut mu = vec![vec![0.0; b.len()]; b.len()];
        for i in 0..b.len() {
            let mut v = b[i].clone();
            for j in 0..i {
                mu[i][j] = linalg::dot(&b[i], &bs[j]) / linalg::dot(&bs[j], &bs[j]);
                for (a, c) in v.iter_mut().zip(&bs[j]) {
                    *a -= mu[i][j] * c;
                }
            }
            bs.push(v);
        }
        (bs, mu)
    };
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let (_, mu) = gram_schmidt(&b);
            let q = mu[k][j].round();
            if q != 0.0 {
                let bj = b[j].clone();
                for (a, c) in b[k].iter_mut().zip(&bj) {
                    *a -= q * c;
                }
            }
        }
        let (bs, mu) = gram_schmidt(&b);
        let lhs = linalg::dot(&bs[k], &bs[k]);
        let rhs = (0.75 - mu[k][k - 1] * mu[k][k - 1]) * linalg::dot(&bs[k - 1], &bs[k - 1]);
        if lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Sign (first significant entry positive) and order (by length, ties lexicographically descending).
fn canonical_order(mut b: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for v in b.iter_mut() {
        if let Some(&first) = v.iter().find(|x| x.abs() > 1e-9) {
            if first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    b.sort_by(|u, v| {
        let (nu, nv) = (linalg::norm(u), linalg::norm(v));
        if (nu - nv).abs() > 1e-9 * (1.0 + nu.max(nv)) {
            return nu.total_cmp(&nv);
        }
        for (a, c) in u.iter().zip(v) {
            if (a - c).abs() > 1e-9 * (1.0 + a.abs().max(c.abs())) {
                return c.total_cmp(a);
            }
        }
        std::cmp::Ordering::Equal
    });
    b
}

/// Integrals whose Hamiltonian fields do not vanish at `m`; Casimirs are left out.
fn active_integrals(sys: &IntegrableSystem, m: &[f64]) -> Result<Vec<usize>> {
    let mut active = Vec::new();
    for i in 0..sys.integrals().len() {
        if linalg::norm(&sys.field(i, m)?) > 1e-12 {
            active.push(i);
        }
    }
    if active.len() != sys.rank() {
        return Err(Error::RankDeficient(format!(
            "{} integrals have nonvanishing fields at the base point, the torus has dimension {}",
            active.len(),
            sys.rank()
        )));
    }
    Ok(active)
}

pub fn find_period_lattice(sys: &IntegrableSystem, m: &[f64]) -> Result<PeriodLattice> {
    find_period_lattice_with(sys, m, &LatticeSearch::default())
}

/// Period lattice of the joint flow through `m`: per-generator return scan, refinement by
/// fractional combinations, Newton polishing and LLL reduction.
pub fn find_period_lattice_with(sys: &IntegrableSystem, m: &[f64], search: &LatticeSearch) -> Result<PeriodLattice> {
    sys.chart().check_point(m)?;
    if !sys.regular_point(m, 1e-6)? {
        return Err(Error::NotRegular(format!("{m:?}")));
    }
    let active = active_integrals(sys, m)?;
    let r = active.len();
    let total = sys.integrals().len();

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(r);
    for (slot, &i) in active.iter().enumerate() {
        let t = scan_generator(sys, i, m, search)?.ok_or_else(|| {
            Error::NoReturn(format!(
                "flow of `{}` does not return within |t| <= {}",
                sys.integrals()[i].name,
                search.horizon
            ))
        })?;
        let mut v = vec![0.0; r];
        v[slot] = t;
        basis.push(v);
    }

    let returns = |v: &[f64]| -> Result<bool> {
        let mut full = vec![0.0; total];
        for (&i, &x) in active.iter().zip(v) {
            full[i] = x;
        }
        let x = flow_combined(sys, &full, m, search.max_step)?;
        Ok(linalg::norm(&return_residual(sys, &x, m)) <= 1e-6)
    };
    // Look for lattice points b * k / d between the scanned generators.
    let mut changed = true;
    let mut rounds = 0;
    while changed && rounds < 8 {
        changed = false;
        rounds += 1;
        'denominators: for &d in &search.denominators {
            let count = (d as usize).pow(r as u32);
            for code in 1..count {
                let k: Vec<i64> = (0..r).map(|j| ((code / (d as usize).pow(j as u32)) % d as usize) as i64).collect();
                let v: Vec<f64> = (0..r)
                    .map(|row| (0..r).map(|c| basis[c][row] * k[c] as f64).sum::<f64>() / d as f64)
                    .collect();
                if !returns(&v)? {
                    continue;
                }
                let mut cols: Vec<Vec<i64>> = (0..r)
                    .map(|c| (0..r).map(|row| if row == c { d } else { 0 }).collect())
                    .collect();
                cols.push(k);
                let ints = integer_basis(cols, r);
                basis = ints
                    .iter()
                    .map(|col| {
                        (0..r)
                            .map(|row| (0..r).map(|c| basis[c][row] * col[c] as f64).sum::<f64>() / d as f64)
                            .collect()
                    })
                    .collect();
                changed = true;
                break 'denominators;
            }
        }
    }

    let reduced = canonical_order(lll(basis));
    let mut generators = Vec::with_capacity(r);
    let mut residuals = Vec::with_capacity(r);
    for v in reduced {
        let (s, res) = polish(sys, &active, &v, m, search)?;
        if !(res <= search.tolerance) {
            return Err(Error::Convergence(format!("return residual {res:e} above {:e} for {s:?}", search.tolerance)));
        }
        generators.push(s);
        residuals.push(res);
    }
    let m_mat: Matrix<f64> = generators.clone();
    if linalg::determinant(m_mat).abs() < 1e-9 {
        return Err(Error::RankDeficient("lattice generators are dependent".into()));
    }
    Ok(PeriodLattice {
        integrals: active.iter().map(|&i| sys.integrals()[i].name.clone()).collect(),
        active,
        generators,
        residuals,
        reduced: true,
    })
}

/// Action of a cycle that winds around the singular angle: `c*log|x_s|` times the winding,
/// plus the finite integral of the rest of the Liouville form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularAction {
    pub cycle: usize,
    pub c: f64,
    pub coordinate: String,
    pub log_form: String,
    pub winding: f64,
    pub smooth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionReport {
    /// `∮ lambda` per lattice generator; `None` for cycles reported in `singular`.
    pub actions: Vec<Option<f64>>,
    pub singular: Vec<SingularAction>,
    pub lattice: PeriodLattice,
    pub lambda: String,
    pub samples_per_cycle: usize,
    /// Sampled loops `gamma_i(tau) = Phi(-tau v_i)(m)`, `tau = k / samples`.
    #[serde(skip)]
    pub cycles: Vec<Vec<Vec<f64>>>,
    pub modular_period: Option<f64>,
    /// Casimir (transverse) coordinates of the base point.
    pub transverse: BTreeMap<String, f64>,
}

pub const DEFAULT_CYCLE_SAMPLES: usize = 1000;

fn lambda_description(sys: &IntegrableSystem) -> String {
    let chart = sys.chart();
    let n = chart.n();
    let term = |k: usize| format!("{} d{}", chart.name(n + k), chart.name(k));
    match sys.structure().kind() {
        StructureKind::TwistedB { c } => {
            let s = sys.structure().singular().unwrap_or(n) - n;
            (0..n)
                .map(|k| if k == s { format!("{c}*log|{}| d{}", chart.name(n + k), chart.name(k)) } else { term(k) })
                .collect::<Vec<_>>()
                .join(" + ")
        }
        StructureKind::CanonicalB => {
            let s = sys.structure().singular().unwrap_or(0);
            (0..n)
                .map(|k| if k == s { format!("{} d{}/{}", chart.name(n + k), chart.name(k), chart.name(k)) } else { term(k) })
                .collect::<Vec<_>>()
                .join(" + ")
        }
        _ => (0..n).map(term).collect::<Vec<_>>().join(" + "),
    }
}

pub fn action_integrals(sys: &IntegrableSystem, lattice: &PeriodLattice, m: &[f64]) -> Result<ActionReport> {
    action_integrals_with(sys, lattice, m, DEFAULT_CYCLE_SAMPLES, flow::DEFAULT_MAX_STEP)
}

/// Mineur actions `p_i = ∮_{gamma_i} lambda` by the rectangle rule on the sampled loops.
pub fn action_integrals_with(
    sys: &IntegrableSystem,
    lattice: &PeriodLattice,
    m: &[f64],
    samples: usize,
    max_step: f64,
) -> Result<ActionReport> {
    sys.chart().check_point(m)?;
    let structure = sys.structure();
    if *structure.kind() == StructureKind::Custom {
        return Err(Error::UnsupportedStructure("action integrals need a Liouville form (custom structure)".into()));
    }
    let chart = sys.chart();
    let n = chart.n();
    let total = sys.integrals().len();
    let samples = samples.max(1000);
    let twisted = match structure.kind() {
        StructureKind::TwistedB { c } => structure.singular().map(|s| (*c, s)),
        _ => None,
    };
    let mut actions = Vec::new();
    let mut singular = Vec::new();
    let mut cycles = Vec::new();
    for (idx, v) in lattice.generators.iter().enumerate() {
        let s = lattice.embed(total, v);
        let minus: Vec<f64> = s.iter().map(|x| -x).collect();
        let h = 1.0 / samples as f64;
        let mut points = Vec::with_capacity(samples);
        let mut x = m.to_vec();
        for _ in 0..samples {
            points.push(x.clone());
            x = flow::combined_flow(sys, &minus, h, &x, max_step)?;
        }
        let closing = linalg::norm(&chart.wrapped_difference(&x, m));
        if closing > 1e-6 {
            return Err(Error::Convergence(format!("cycle {idx} does not close (gap {closing:e})")));
        }
        // Winding of the cycle around the distinguished angle of a twisted structure.
        let winding = twisted.map(|(_, sp)| x[sp - n] - m[sp - n]).unwrap_or(0.0);
        let mut smooth = 0.0;
        let mut full = 0.0;
        let mut full_ok = true;
        for p in &points {
            let velocity: Vec<f64> = flow::combined_field(sys, &minus, p)?;
            match twisted {
                Some((_, sp)) => {
                    smooth += (0..n).filter(|&k| k != sp - n).map(|k| p[n + k] * velocity[k]).sum::<f64>();
                    match liouville_form(chart, structure, p) {
                        Ok(l) => full += linalg::dot(&l, &velocity),
                        Err(_) => full_ok = false,
                    }
                }
                None => full += linalg::dot(&liouville_form(chart, structure, p)?, &velocity),
            }
        }
        smooth *= h;
        full *= h;
        match twisted {
            Some((c, sp)) if winding.abs() > 0.5 => {
                singular.push(SingularAction {
                    cycle: idx,
                    c,
                    coordinate: chart.name(sp).to_string(),
                    log_form: format!("{c}*log(abs({}))", chart.name(sp)),
                    winding: winding.round(),
                    smooth,
                });
                actions.push(None);
            }
            Some(_) if !full_ok => actions.push(Some(smooth)),
            _ => actions.push(Some(full)),
        }
        cycles.push(points);
    }
    let modular = if structure.is_b() {
        let s = structure.singular().expect("b-structure has a singular coordinate");
        let mut start = m.to_vec();
        start[s] = 0.0;
        modular_period(structure, &Expr::Num(1.0), &start, &ModularSearch::default()).ok()
    } else {
        None
    };
    let transverse = (2 * n..chart.dim()).map(|k| (chart.name(k).to_string(), m[k])).collect();
    Ok(ActionReport {
        actions,
        singular,
        lattice: lattice.clone(),
        lambda: lambda_description(sys),
        samples_per_cycle: samples,
        cycles,
        modular_period: modular,
        transverse,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModularSearch {
    pub step: f64,
    pub horizon: f64,
}

impl Default for ModularSearch {
    fn default() -> Self {
        ModularSearch { step: 0.01, horizon: 1000.0 }
    }
}

/// Modular vector field `u^j = sum_i d_i(Pi^{ij} V) / V` of the density `V`.
pub fn modular_field(structure: &PoissonStructure, volume: &Expr, x: &[f64]) -> Result<Vec<f64>> {
    let m = structure.matrix_jets::<f64>(x)?;
    let v = volume.jet::<f64>(x)?;
    if !(v.value > 0.0) {
        return Err(Error::Domain(format!("volume density must be positive, got {}", v.value)));
    }
    let dim = structure.dim();
    Ok((0..dim)
        .map(|j| {
            (0..dim)
                .map(|i| m[i][j].partials[i] + m[i][j].value * v.partials.get(i).copied().unwrap_or(0.0) / v.value)
                .sum()
        })
        .collect())
}

/// Return time of the modular field from `start` (on Z) to the same symplectic leaf of Z.
///
/// The leaf coordinate is the angle `x_k` maximising `|d_s Pi^{sk}|` on Z; a leaf is
/// reached again when `x_k` has advanced by one full period.
pub fn modular_period(structure: &PoissonStructure, volume: &Expr, start: &[f64], search: &ModularSearch) -> Result<f64> {
    if !structure.is_b() {
        return Err(Error::UnsupportedStructure("modular period needs a b-type structure".into()));
    }
    let s = structure.singular().expect("b-structure has a singular coordinate");
    if start.len() != structure.dim() {
        return Err(Error::ChartMismatch(format!("start has {} coordinates, expected {}", start.len(), structure.dim())));
    }
    if start[s].abs() > 1e-12 {
        return Err(Error::InvalidArgument("modular period needs a start point on Z".into()));
    }
    let m = structure.matrix_jets::<f64>(start)?;
    let k = (0..structure.dim())
        .filter(|&k| k != s)
        .max_by(|&a, &b| m[s][a].partials[s].abs().total_cmp(&m[s][b].partials[s].abs()))
        .ok_or_else(|| Error::InvalidArgument("structure too small".into()))?;
    if m[s][k].partials[s].abs() < 1e-12 {
        return Err(Error::NoReturn("structure does not vanish transversally along Z".into()));
    }
    let field = |y: &[f64]| modular_field(structure, volume, y);
    let mut t = 0.0;
    let mut x = start.to_vec();
    while t < search.horizon {
        let next = flow::rk4_step(&field, &x, search.step)?;
        if (next[k] - start[k]).abs() >= 1.0 {
            // Bisect inside the last step.
            let (mut lo, mut hi) = (0.0, search.step);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let y = flow::rk4_step(&field, &x, mid)?;
                if (y[k] - start[k]).abs() >= 1.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(t + 0.5 * (lo + hi));
        }
        x = next;
        t += search.step;
    }
    Err(Error::NoReturn(format!("modular flow did not return to its leaf within t <= {}", search.horizon)))
}
