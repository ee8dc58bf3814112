//! Integrable-system container and its verification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::BFunction;
use crate::linalg;
use crate::phase::{PhaseChart, PoissonStructure, TransversalityReport};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct NamedIntegral {
    pub name: String,
    pub function: BFunction,
}

impl NamedIntegral {
    pub fn new(name: impl Into<String>, function: BFunction) -> Self {
        NamedIntegral { name: name.into(), function }
    }
}

/// Chart + Poisson structure + first integrals.
///
/// The structure has rank `2r` with `r` the number of base coordinates; a complete
/// system carries `dim - r` integrals (`n` for a symplectic or b-symplectic chart).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrableSystem {
    pub name: String,
    chart: PhaseChart,
    structure: PoissonStructure,
    integrals: Vec<NamedIntegral>,
}

impl IntegrableSystem {
    pub fn new(
        name: impl Into<String>,
        chart: PhaseChart,
        structure: PoissonStructure,
        integrals: Vec<NamedIntegral>,
    ) -> Result<Self> {
        if structure.dim() != chart.dim() {
            return Err(Error::ChartMismatch(format!(
                "structure dimension {} differs from chart dimension {}",
                structure.dim(),
                chart.dim()
            )));
        }
        if structure.singular() != chart.singular() {
            return Err(Error::ChartMismatch("structure and chart disagree on the singular coordinate".into()));
        }
        let names = chart.names();
        let mut checked = Vec::with_capacity(integrals.len());
        for (k, integral) in integrals.into_iter().enumerate() {
            if integral.name.is_empty() || checked.iter().any(|c: &NamedIntegral| c.name == integral.name) {
                return Err(Error::InvalidArgument(format!("integral #{k} has an empty or duplicate name")));
            }
            let function = integral.function.rebind(&names)?;
            checked.push(NamedIntegral { name: integral.name, function });
        }
        Ok(IntegrableSystem { name: name.into(), chart, structure, integrals: checked })
    }

    pub fn chart(&self) -> &PhaseChart {
        &self.chart
    }

    pub fn structure(&self) -> &PoissonStructure {
        &self.structure
    }

    pub fn integrals(&self) -> &[NamedIntegral] {
        &self.integrals
    }

    pub fn functions(&self) -> impl Iterator<Item = &BFunction> {
        self.integrals.iter().map(|i| &i.function)
    }

    pub fn integral_index(&self, name: &str) -> Option<usize> {
        self.integrals.iter().position(|i| i.name == name)
    }

    /// Half the rank of the structure.
    pub fn rank(&self) -> usize {
        self.chart.n()
    }

    pub fn expected_count(&self) -> usize {
        self.chart.dim() - self.rank()
    }

    pub fn is_b(&self) -> bool {
        self.structure.is_b()
    }

    /// Replaces the integrals, keeping chart and structure.
    pub fn with_integrals(&self, integrals: Vec<NamedIntegral>) -> Result<Self> {
        IntegrableSystem::new(self.name.clone(), self.chart.clone(), self.structure.clone(), integrals)
    }

    /// Ordinary components of `X_{f_index}` at `point`.
    pub fn field<S: Scalar>(&self, index: usize, point: &[S]) -> Result<Vec<S>> {
        self.structure.hamiltonian_field(&self.integrals[index].function, point)
    }

    /// Differentials of all integrals in the b-coframe (plain coframe for smooth structures).
    pub fn differentials<S: Scalar>(&self, point: &[S]) -> Result<Vec<Vec<S>>> {
        self.functions()
            .map(|f| Ok(f.b_covector(point, self.structure.singular())?.coeffs))
            .collect()
    }

    /// True iff the Hamiltonian vector fields span a space of dimension `r` (for a
    /// symplectic or b-symplectic chart: all `n` fields independent) and the
    /// differentials are independent, both with singular values above `threshold`.
    pub fn regular_point<S: Scalar>(&self, point: &[S], threshold: f64) -> Result<bool> {
        self.chart.check_point(point)?;
        let fields: Vec<Vec<S>> =
            (0..self.integrals.len()).map(|i| self.field(i, point)).collect::<Result<_>>()?;
        let r = self.rank();
        let sv = linalg::singular_values(&fields);
        if sv.len() < r || !(sv[r - 1].as_f64() > threshold) {
            return Ok(false);
        }
        let sv = linalg::singular_values(&self.differentials(point)?);
        Ok(sv.last().is_some_and(|v| v.as_f64() > threshold))
    }

    /// Coefficient of `log|x_s|` in each integral, `x_s` the structure's singular coordinate.
    pub fn modular_weights(&self) -> Result<Vec<f64>> {
        let s = match self.structure.singular() {
            Some(s) if self.structure.is_b() => s,
            _ => return Err(Error::UnsupportedStructure("modular weights need a b-type structure".into())),
        };
        Ok(self.functions().map(|f| f.weight_along(s)).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub jacobi: f64,
    pub involutivity: f64,
    /// Minimum fraction of sampled points where the integrals are independent.
    pub independence: f64,
    /// Singular-value threshold for rank decisions.
    pub rank: f64,
    pub transversality: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { jacobi: 1e-12, involutivity: 1e-9, independence: 0.99, rank: 1e-6, transversality: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    /// Real coordinates are sampled in `[-box_half_width, box_half_width]`; angles over a full period.
    pub box_half_width: f64,
    /// Off-Z samples keep at least this distance from the singular hypersurface.
    pub z_cutoff: f64,
    pub tolerances: Tolerances,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { samples: 1000, seed: 42, box_half_width: 2.0, z_cutoff: 0.1, tolerances: Tolerances::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Involutivity {
    pub max: f64,
    pub pair: Option<[String; 2]>,
    pub point: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Independence {
    pub off_z: f64,
    pub on_z: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralCount {
    pub found: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub samples: usize,
    pub seed: u64,
    pub jacobi: f64,
    pub involutivity: Involutivity,
    pub independence: Independence,
    pub integral_count: IntegralCount,
    pub transversality: Option<TransversalityReport>,
    pub modular_weights: Option<Vec<f64>>,
    pub failures: Vec<String>,
}

struct PointOutcome {
    jacobi: f64,
    worst_bracket: f64,
    worst_pair: Option<(usize, usize)>,
    independent: bool,
}

impl IntegrableSystem {
    /// Seeded sample of `count` chart points; with `on_z` the singular coordinate is set
    /// to zero, otherwise it is kept at least `z_cutoff` away from zero.
    pub fn sample_points(&self, count: usize, seed: u64, config: &VerifyConfig, on_z: bool) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = config.box_half_width;
        let s = self.chart.singular();
        (0..count)
            .map(|_| {
                (0..self.chart.dim())
                    .map(|i| {
                        if self.chart.is_angle(i) {
                            rng.gen_range(0.0..1.0)
                        } else if Some(i) == s {
                            let m = rng.gen_range(config.z_cutoff..w);
                            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                            if on_z { 0.0 } else { sign * m }
                        } else {
                            rng.gen_range(-w..w)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn evaluate_point(&self, p: &[f64], threshold: f64) -> Result<PointOutcome> {
        let jacobi = self.structure.jacobi_residual(p)?;
        let mut worst_bracket = 0.0;
        let mut worst_pair = None;
        for i in 0..self.integrals.len() {
            for j in i + 1..self.integrals.len() {
                let v = self
                    .structure
                    .bracket(&self.integrals[i].function, &self.integrals[j].function, p)?
                    .abs();
                if v > worst_bracket || worst_pair.is_none() {
                    worst_bracket = v;
                    worst_pair = Some((i, j));
                }
            }
        }
        let sv = linalg::singular_values(&self.differentials(p)?);
        let independent = !sv.is_empty() && sv.len() == self.integrals.len() && sv[sv.len() - 1] > threshold;
        Ok(PointOutcome { jacobi, worst_bracket, worst_pair, independent })
    }

    /// Samples the chart and checks involutivity, independence, the Jacobi identity and,
    /// for b-structures, transversality and independence on the singular hypersurface.
    pub fn verify(&self, config: &VerifyConfig) -> VerificationReport {
        let tol = &config.tolerances;
        let n_samples = config.samples.max(1);
        let mut failures = Vec::new();
        let off = self.sample_points(n_samples, config.seed, config, false);
        let on = if self.is_b() {
            Some(self.sample_points(n_samples, config.seed.wrapping_add(0x9e37_79b9), config, true))
        } else {
            None
        };

        let mut jacobi = 0.0f64;
        let mut involutivity = Involutivity { max: 0.0, pair: None, point: None };
        let mut tally = |points: &[Vec<f64>], failures: &mut Vec<String>| -> f64 {
            // Parallel evaluation, reduced in input order.
            let outcomes: Vec<Result<PointOutcome>> =
                points.par_iter().map(|p| self.evaluate_point(p, tol.rank)).collect();
            let mut independent = 0usize;
            for (p, outcome) in points.iter().zip(outcomes) {
                match outcome {
                    Ok(o) => {
                        jacobi = jacobi.max(o.jacobi);
                        if o.worst_bracket > involutivity.max || (involutivity.pair.is_none() && o.worst_pair.is_some()) {
                            involutivity.max = o.worst_bracket;
                            involutivity.pair = o
                                .worst_pair
                                .map(|(i, j)| [self.integrals[i].name.clone(), self.integrals[j].name.clone()]);
                            involutivity.point = Some(p.clone());
                        }
                        independent += o.independent as usize;
                    }
                    Err(e) => {
                        if failures.len() < 16 {
                            failures.push(format!("evaluation failed at {p:?}: {e}"));
                        }
                        jacobi = f64::INFINITY;
                        involutivity.max = f64::INFINITY;
                    }
                }
            }
            independent as f64 / points.len() as f64
        };
        let off_z = tally(&off, &mut failures);
        let on_z = on.as_ref().map(|pts| tally(pts, &mut failures));

        let transversality = on.as_ref().map(|pts| {
            self.structure.b_transversality(pts, tol.transversality).unwrap_or_else(|e| TransversalityReport {
                passed: false,
                threshold: tol.transversality,
                max_abs_pfaffian: f64::NAN,
                min_abs_derivative: f64::NAN,
                samples: 0,
                failures: pts.len(),
                diagnostic: Some(e.to_string()),
                per_sample: Vec::new(),
            })
        });
        let modular_weights = self.modular_weights().ok();

        if !(jacobi <= tol.jacobi) {
            failures.push(format!("Jacobi residual {jacobi:e} exceeds {:e}", tol.jacobi));
        }
        if !(involutivity.max <= tol.involutivity) {
            failures.push(format!("involutivity residual {:e} exceeds {:e}", involutivity.max, tol.involutivity));
        }
        if !(off_z >= tol.independence) {
            failures.push(format!("independence fraction off Z {off_z} below {}", tol.independence));
        }
        if let Some(on_z) = on_z {
            if !(on_z >= tol.independence) {
                failures.push(format!("independence fraction on Z {on_z} below {}", tol.independence));
            }
        }
        if let Some(t) = &transversality {
            if !t.passed {
                failures.push(format!(
                    "transversality failed: {}",
                    t.diagnostic.clone().unwrap_or_else(|| "no samples".into())
                ));
            }
        }
        let integral_count = IntegralCount { found: self.integrals.len(), expected: self.expected_count() };
        if integral_count.found != integral_count.expected {
            failures.push(format!(
                "{} integrals given, a complete system needs {}",
                integral_count.found, integral_count.expected
            ));
        }
        VerificationReport {
            passed: failures.is_empty(),
            samples: n_samples,
            seed: config.seed,
            jacobi,
            involutivity,
            independence: Independence { off_z, on_z },
            integral_count,
            transversality,
            modular_weights,
            failures,
        }
    }
}
