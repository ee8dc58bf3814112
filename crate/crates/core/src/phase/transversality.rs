use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::structure::PoissonStructure;

pub const DEFAULT_DERIVATIVE_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_ZERO_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalitySample {
    pub pfaffian: f64,
    pub derivative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub passed: bool,
    pub threshold: f64,
    pub max_abs_pfaffian: f64,
    pub min_abs_derivative: f64,
    pub samples: usize,
    pub failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
    #[serde(skip)]
    pub per_sample: Vec<TransversalitySample>,
}

impl PoissonStructure {
    /// Checks that the top power of the bivector vanishes on `{x_s = 0}` and does so
    /// transversally: `pf = 0` and `|d pf / d x_s| >= threshold` at every sample.
    pub fn b_transversality<S: Scalar>(&self, samples: &[Vec<S>], threshold: f64) -> Result<TransversalityReport> {
        let s = self
            .singular()
            .ok_or_else(|| Error::NoSingularCoordinate("transversality needs a singular coordinate".into()))?;
        let mut per_sample = Vec::with_capacity(samples.len());
        for p in samples {
            if p.get(s).is_some_and(|v| *v != S::zero()) {
                return Err(Error::InvalidArgument("transversality samples must lie on the hypersurface".into()));
            }
            let pf = self.pfaffian_jet(p)?;
            per_sample.push(TransversalitySample { pfaffian: pf.value.as_f64(), derivative: pf.partials[s].as_f64() });
        }
        let max_abs_pfaffian = per_sample.iter().map(|x| x.pfaffian.abs()).fold(0.0, f64::max);
        let min_abs_derivative = per_sample.iter().map(|x| x.derivative.abs()).fold(f64::INFINITY, f64::min);
        let failures = per_sample
            .iter()
            .filter(|x| x.pfaffian.abs() > DEFAULT_ZERO_TOLERANCE || !(x.derivative.abs() >= threshold))
            .count();
        let diagnostic = if failures == 0 {
            None
        } else if max_abs_pfaffian > DEFAULT_ZERO_TOLERANCE {
            Some(format!(
                "top power does not vanish on the hypersurface (|pf| up to {max_abs_pfaffian:e})"
            ))
        } else {
            Some(format!(
                "top power vanishes non-transversally: |d pf/d s| = {min_abs_derivative:e} < {threshold:e}"
            ))
        };
        Ok(TransversalityReport {
            passed: failures == 0 && !per_sample.is_empty(),
            threshold,
            max_abs_pfaffian,
            min_abs_derivative,
            samples: per_sample.len(),
            failures,
            diagnostic,
            per_sample,
        })
    }
}
