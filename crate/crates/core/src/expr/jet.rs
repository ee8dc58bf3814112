use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Value together with its exact first partials with respect to every chart coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet<S> {
    pub value: S,
    pub partials: Vec<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(value: S, dim: usize) -> Self {
        Jet { value, partials: vec![S::zero(); dim] }
    }

    pub fn variable(value: S, dim: usize, index: usize) -> Self {
        let mut partials = vec![S::zero(); dim];
        partials[index] = S::one();
        Jet { value, partials }
    }

    pub fn dim(&self) -> usize {
        self.partials.len()
    }

    /// Applies a unary function with value `value` and derivative `slope` at `self.value`.
    pub fn chain(&self, value: S, slope: S) -> Self {
        Jet { value, partials: self.partials.iter().map(|&d| d * slope).collect() }
    }

    pub fn is_constant(&self) -> bool {
        self.partials.iter().all(|d| *d == S::zero())
    }

    pub fn scale(&self, k: S) -> Self {
        self.chain(self.value * k, k)
    }
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: Jet<S>) -> Jet<S> {
        &self + &rhs
    }
}

impl<S: Scalar> Add for &Jet<S> {
    type Output = Jet<S>;
    fn add(self, rhs: &Jet<S>) -> Jet<S> {
        Jet {
            value: self.value + rhs.value,
            partials: self.partials.iter().zip(&rhs.partials).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: Jet<S>) -> Jet<S> {
        &self - &rhs
    }
}

impl<S: Scalar> Sub for &Jet<S> {
    type Output = Jet<S>;
    fn sub(self, rhs: &Jet<S>) -> Jet<S> {
        Jet {
            value: self.value - rhs.value,
            partials: self.partials.iter().zip(&rhs.partials).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: Jet<S>) -> Jet<S> {
        &self * &rhs
    }
}

impl<S: Scalar> Mul for &Jet<S> {
    type Output = Jet<S>;
    fn mul(self, rhs: &Jet<S>) -> Jet<S> {
        Jet {
            value: self.value * rhs.value,
            partials: self
                .partials
                .iter()
                .zip(&rhs.partials)
                .map(|(&a, &b)| a * rhs.value + self.value * b)
                .collect(),
        }
    }
}

/// Quotient rule; the caller is responsible for a nonzero denominator.
impl<S: Scalar> Div for Jet<S> {
    type Output = Jet<S>;
    fn div(self, rhs: Jet<S>) -> Jet<S> {
        &self / &rhs
    }
}

impl<S: Scalar> Div for &Jet<S> {
    type Output = Jet<S>;
    fn div(self, rhs: &Jet<S>) -> Jet<S> {
        let q = self.value / rhs.value;
        Jet {
            value: q,
            partials: self
                .partials
                .iter()
                .zip(&rhs.partials)
                .map(|(&a, &b)| (a - q * b) / rhs.value)
                .collect(),
        }
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Jet<S>;
    fn neg(self) -> Jet<S> {
        Jet { value: -self.value, partials: self.partials.into_iter().map(|d| -d).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Jet::<f64>::variable(3.0, 2, 0);
        let y = Jet::variable(-2.0, 2, 1);
        let p = &x * &y;
        assert_eq!(p.value, -6.0);
        assert_eq!(p.partials, vec![-2.0, 3.0]);
        let q = &x / &y;
        assert_eq!(q.value, -1.5);
        assert_eq!(q.partials, vec![-0.5, -0.75]);
    }
}
