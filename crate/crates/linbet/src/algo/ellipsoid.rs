//! Confidence region driving optimistic arm selection: the set
//! `{theta : ||theta - center||_V <= beta}` together with the closed-form
//! maximum of `<x, theta>` over it.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::weighted_norm;

#[derive(Debug, Clone)]
pub struct ConfidenceEllipsoid {
    center: DVector<f64>,
    beta: f64,
    v: DMatrix<f64>,
    v_inv: DMatrix<f64>,
}

impl ConfidenceEllipsoid {
    /// Round-zero region: center 0 and radius `sqrt(lambda) * S` under the
    /// metric `V_0 = lambda * I`, which contains every `||theta||_2 <= S`.
    pub fn initial(dim: usize, lambda: f64, s: f64) -> ConfidenceEllipsoid {
        ConfidenceEllipsoid {
            center: DVector::zeros(dim),
            beta: lambda.sqrt() * s,
            v: DMatrix::identity(dim, dim) * lambda,
            v_inv: DMatrix::identity(dim, dim) / lambda,
        }
    }

    pub fn new(
        center: DVector<f64>,
        beta: f64,
        v: DMatrix<f64>,
        v_inv: DMatrix<f64>,
    ) -> ConfidenceEllipsoid {
        ConfidenceEllipsoid { center, beta, v, v_inv }
    }

    pub fn center(&self) -> &DVector<f64> {
        &self.center
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// `max_{theta in region} <x, theta> = <x, center> + beta * ||x||_{V^-1}`.
    pub fn optimistic_value(&self, x: &DVector<f64>) -> Result<f64> {
        Ok(x.dot(&self.center) + self.beta * weighted_norm(&self.v_inv, x)?)
    }

    /// The theta attaining the optimistic value. Test surface only; selection
    /// never materializes it (undefined for x = 0).
    pub fn maximizer(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let norm = weighted_norm(&self.v_inv, x)?;
        if norm == 0.0 {
            return Err(Error::invalid_input("maximizer undefined for x with ||x||_{V^-1} = 0"));
        }
        Ok(&self.center + (self.beta / norm) * (&self.v_inv * x))
    }

    /// Optimistic argmax over a finite arm list; ties break to the lowest
    /// index. An all-zero arm list degenerates to index 0.
    pub fn select_optimistic_arm(&self, arms: &[DVector<f64>]) -> Result<usize> {
        if arms.is_empty() {
            return Err(Error::invalid_input("empty arm list"));
        }
        let mut best = 0usize;
        let mut best_val = self.optimistic_value(&arms[0])?;
        for (i, x) in arms.iter().enumerate().skip(1) {
            let v = self.optimistic_value(x)?;
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        Ok(best)
    }

    /// Whether `theta` lies inside the region.
    pub fn contains(&self, theta: &DVector<f64>) -> Result<bool> {
        Ok(weighted_norm(&self.v, &(theta - &self.center))? <= self.beta)
    }
}
