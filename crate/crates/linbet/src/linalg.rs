//! Dense linear-algebra core shared by every policy: the regularized design
//! matrix `V = lambda*I + sum x x^T`, its maintained inverse, weighted norms,
//! ridge solves, the symmetric inverse square root and the weight rows
//! `V^{-1/2} X^T` used by the truncated estimator.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Full re-factorization cadence for the maintained inverse.
const REFACTOR_EVERY: u64 = 256;

/// Regularized Gram matrix state with a maintained inverse.
#[derive(Debug, Clone)]
pub struct DesignState {
    dim: usize,
    lambda: f64,
    v: DMatrix<f64>,
    v_inv: DMatrix<f64>,
    /// log det(V_t) - log det(lambda*I), kept for diagnostics.
    log_det_ratio: f64,
    t: u64,
}

impl DesignState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid_input("dimension must be positive"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid_input("lambda must be a positive finite real"));
        }
        Ok(DesignState {
            dim,
            lambda,
            v: DMatrix::identity(dim, dim) * lambda,
            v_inv: DMatrix::identity(dim, dim) / lambda,
            log_det_ratio: 0.0,
            t: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn count(&self) -> u64 {
        self.t
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn inverse(&self) -> &DMatrix<f64> {
        &self.v_inv
    }

    pub fn log_det_ratio(&self) -> f64 {
        self.log_det_ratio
    }

    /// Rank-one update `V += x x^T` with a Sherman-Morrison update of the
    /// maintained inverse. Every `REFACTOR_EVERY` updates the inverse is
    /// recomputed from scratch to stop drift from accumulating.
    pub fn update(&mut self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::invalid_input(format!(
                "arm has dimension {}, design expects {}",
                x.len(),
                self.dim
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("non-finite entry in arm vector"));
        }
        self.v.syger(1.0, x, x, 1.0);
        // syger only touches the lower triangle; mirror it.
        self.v.fill_upper_triangle_with_lower_triangle();

        let v_inv_x = &self.v_inv * x;
        let denom = 1.0 + x.dot(&v_inv_x);
        self.log_det_ratio += denom.ln();
        self.t += 1;

        if self.t % REFACTOR_EVERY == 0 || denom <= 1e-12 {
            self.refactor()?;
        } else {
            let scale = 1.0 / denom;
            self.v_inv.syger(-scale, &v_inv_x, &v_inv_x, 1.0);
            self.v_inv.fill_upper_triangle_with_lower_triangle();
        }
        Ok(())
    }

    /// Recompute the inverse from the current V via Cholesky.
    fn refactor(&mut self) -> Result<()> {
        let chol = self
            .v
            .clone()
            .cholesky()
            .ok_or_else(|| Error::internal("design matrix lost positive definiteness"))?;
        self.v_inv = chol.inverse();
        Ok(())
    }

    /// Ridge solve `V^{-1} s` against the accumulated payoff-weighted sum `s`.
    pub fn ridge_solve(&self, s: &DVector<f64>) -> Result<DVector<f64>> {
        if s.len() != self.dim {
            return Err(Error::invalid_input("sum vector dimension mismatch"));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("non-finite entry in sum vector"));
        }
        Ok(&self.v_inv * s)
    }

    /// Symmetric inverse square root `M` with `M * M = V^{-1}`, via
    /// eigen-decomposition of V.
    pub fn inv_sqrt(&self) -> Result<DMatrix<f64>> {
        let eig = self.v.clone().symmetric_eigen();
        let floor = self.lambda / 2.0;
        let mut inv_sqrt_vals = DVector::zeros(self.dim);
        for (i, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev < floor {
                return Err(Error::internal(format!(
                    "eigenvalue {ev} below lambda/2 = {floor}"
                )));
            }
            inv_sqrt_vals[i] = 1.0 / ev.sqrt();
        }
        let q = &eig.eigenvectors;
        let m = q * DMatrix::from_diagonal(&inv_sqrt_vals) * q.transpose();
        // Symmetrize away eigen-solver roundoff.
        Ok((&m + m.transpose()) * 0.5)
    }

    /// Rows of `V^{-1/2} X^T` for a recorded arm history.
    pub fn weight_rows(&self, history_arms: &[DVector<f64>]) -> Result<WeightRows> {
        if history_arms.len() as u64 != self.t {
            return Err(Error::invalid_input(format!(
                "history has {} arms but {} updates were applied",
                history_arms.len(),
                self.t
            )));
        }
        let m = self.inv_sqrt()?;
        let t = history_arms.len();
        let mut rows = vec![DVector::zeros(t); self.dim];
        for (tau, x) in history_arms.iter().enumerate() {
            let col = &m * x;
            for i in 0..self.dim {
                rows[i][tau] = col[i];
            }
        }
        Ok(WeightRows { rows })
    }
}

/// Rows `u_1..u_d` of `V^{-1/2} X^T`. Each row has length t and satisfies
/// `||u_i||_2 <= 1` and `||u_i||_{1+eps} <= t^{(1-eps)/(2(1+eps))}`.
#[derive(Debug, Clone)]
pub struct WeightRows {
    rows: Vec<DVector<f64>>,
}

impl WeightRows {
    pub fn rows(&self) -> &[DVector<f64>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &DVector<f64> {
        &self.rows[i]
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn len(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `sqrt(x^T A x)` for SPD `A`. Tiny negative quadratic forms from roundoff
/// are clamped to zero; anything below -1e-12 is reported as an internal error.
pub fn weighted_norm(a: &DMatrix<f64>, x: &DVector<f64>) -> Result<f64> {
    let q = x.dot(&(a * x));
    if q < 0.0 {
        if q > -1e-12 {
            return Ok(0.0);
        }
        return Err(Error::internal(format!("negative quadratic form {q}")));
    }
    Ok(q.sqrt())
}

/// `||v||_p` for p >= 1.
pub fn lp_norm(v: &DVector<f64>, p: f64) -> f64 {
    v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn random_unit_ball_vec(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
        loop {
            let v = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
            if v.norm() <= 1.0 {
                return v;
            }
        }
    }

    fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(d, d) * 0.1
    }

    #[test]
    fn update_identity_plus_basis_vector() {
        let mut st = DesignState::new(2, 1.0).unwrap();
        st.update(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let expected_v = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 1.0]));
        let expected_inv = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 1.0]));
        assert!((st.matrix() - expected_v).abs().max() < 1e-12);
        assert!((st.inverse() - expected_inv).abs().max() < 1e-12);
        assert_eq!(st.count(), 1);
    }

    #[test]
    fn update_zero_vector_is_noop_on_v() {
        let mut st = DesignState::new(2, 1.0).unwrap();
        st.update(&DVector::zeros(2)).unwrap();
        assert!((st.matrix() - DMatrix::identity(2, 2)).abs().max() < 1e-15);
        assert_eq!(st.count(), 1);
    }

    #[test]
    fn update_rejects_non_finite() {
        let mut st = DesignState::new(2, 1.0).unwrap();
        let err = st.update(&DVector::from_vec(vec![f64::NAN, 0.0]));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn maintained_inverse_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut st = DesignState::new(3, 1.0).unwrap();
        let mut v_oracle = DMatrix::identity(3, 3);
        for _ in 0..50 {
            let x = random_unit_ball_vec(&mut rng, 3);
            v_oracle += &x * x.transpose();
            st.update(&x).unwrap();
        }
        let inv_oracle = v_oracle.try_inverse().unwrap();
        assert!((st.inverse() - inv_oracle).abs().max() < 1e-8);
    }

    #[test]
    fn long_run_inverse_and_spd_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut st = DesignState::new(4, 0.5).unwrap();
        let mut v_oracle = DMatrix::identity(4, 4) * 0.5;
        for _ in 0..1000 {
            let x = random_unit_ball_vec(&mut rng, 4);
            v_oracle += &x * x.transpose();
            st.update(&x).unwrap();
        }
        // V * V_inv = I
        let prod = st.matrix() * st.inverse();
        assert!((prod - DMatrix::identity(4, 4)).abs().max() < 1e-8);
        // against from-scratch dense inverse
        let inv_oracle = v_oracle.clone().try_inverse().unwrap();
        assert!((st.inverse() - inv_oracle).abs().max() < 1e-8);
        // symmetry and min eigenvalue
        assert!((st.matrix() - st.matrix().transpose()).abs().max() < 1e-10);
        let min_ev = st
            .matrix()
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .min();
        assert!(min_ev >= st.lambda() - 1e-9);
        // log-det diagnostic tracks the true ratio
        let expected = v_oracle.determinant().ln() - (0.5f64.ln() * 4.0);
        assert!((st.log_det_ratio() - expected).abs() < 1e-6);
    }

    #[test]
    fn weighted_norm_euclidean_case() {
        let a = DMatrix::identity(2, 2);
        let x = DVector::from_vec(vec![3.0, 4.0]);
        assert!((weighted_norm(&a, &x).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_norm_diagonal_case() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 1.0]));
        let x = DVector::from_vec(vec![1.0, 0.0]);
        assert!((weighted_norm(&a, &x).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn weighted_norm_matches_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = random_spd(&mut rng, 5);
            let x = DVector::from_fn(5, |_, _| rng.random_range(-2.0..2.0));
            let eig = a.clone().symmetric_eigen();
            let y = eig.eigenvectors.transpose() * &x;
            let oracle = y
                .iter()
                .zip(eig.eigenvalues.iter())
                .map(|(yi, ev)| ev * yi * yi)
                .sum::<f64>()
                .sqrt();
            assert!((weighted_norm(&a, &x).unwrap() - oracle).abs() < 1e-10);
        }
    }

    #[test]
    fn ridge_solve_zero_sum() {
        let st = DesignState::new(3, 1.0).unwrap();
        let out = st.ridge_solve(&DVector::zeros(3)).unwrap();
        assert_eq!(out, DVector::zeros(3));
    }

    #[test]
    fn ridge_solve_hand_case() {
        let mut st = DesignState::new(2, 1.0).unwrap();
        st.update(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        let out = st.ridge_solve(&DVector::from_vec(vec![2.0, 0.0])).unwrap();
        assert!((out - DVector::from_vec(vec![1.0, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn ridge_solve_noiseless_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 4;
        let theta = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let mut st = DesignState::new(d, 1e-8).unwrap();
        let mut s = DVector::zeros(d);
        for _ in 0..200 {
            let x = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
            let y = x.dot(&theta);
            st.update(&x).unwrap();
            s += y * &x;
        }
        let est = st.ridge_solve(&s).unwrap();
        assert!((est - theta).norm() < 1e-4);
    }

    #[test]
    fn inv_sqrt_identity() {
        let st = DesignState::new(3, 1.0).unwrap();
        let m = st.inv_sqrt().unwrap();
        assert!((m - DMatrix::identity(3, 3)).abs().max() < 1e-12);
    }

    #[test]
    fn inv_sqrt_diagonal_case() {
        let mut st = DesignState::new(2, 1.0).unwrap();
        // drive V to diag(4, 9)
        st.update(&DVector::from_vec(vec![3f64.sqrt(), 0.0])).unwrap();
        st.update(&DVector::from_vec(vec![0.0, 8f64.sqrt()])).unwrap();
        let m = st.inv_sqrt().unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![0.5, 1.0 / 3.0]));
        assert!((m - expected).abs().max() < 1e-10);
    }

    #[test]
    fn inv_sqrt_multiply_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut st = DesignState::new(5, 1.0).unwrap();
        for _ in 0..40 {
            st.update(&random_unit_ball_vec(&mut rng, 5)).unwrap();
        }
        let m = st.inv_sqrt().unwrap();
        assert!((&m - m.transpose()).abs().max() < 1e-10);
        let prod = &m * &m * st.matrix();
        assert!((prod - DMatrix::identity(5, 5)).abs().max() < 1e-7);
        assert!((&m * &m - st.inverse()).abs().max() < 1e-8);
    }

    #[test]
    fn weight_rows_hand_case() {
        let mut st = DesignState::new(2, 1.0).unwrap();
        let e1 = DVector::from_vec(vec![1.0, 0.0]);
        st.update(&e1).unwrap();
        let rows = st.weight_rows(&[e1]).unwrap();
        assert!((rows.row(0)[0] - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!(rows.row(1)[0].abs() < 1e-12);
    }

    #[test]
    fn weight_rows_all_zero_arms() {
        let mut st = DesignState::new(3, 1.0).unwrap();
        let z = DVector::zeros(3);
        for _ in 0..4 {
            st.update(&z).unwrap();
        }
        let rows = st.weight_rows(&[z.clone(), z.clone(), z.clone(), z]).unwrap();
        for r in rows.rows() {
            assert!(r.amax() < 1e-15);
        }
    }

    #[test]
    fn weight_rows_length_mismatch() {
        let mut st = DesignState::new(2, 1.0).unwrap();
        st.update(&DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert!(matches!(
            st.weight_rows(&[]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn weight_rows_norm_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = 4;
        let t = 30;
        let mut st = DesignState::new(d, 1.0).unwrap();
        let mut history = Vec::new();
        for _ in 0..t {
            let x = random_unit_ball_vec(&mut rng, d);
            st.update(&x).unwrap();
            history.push(x);
        }
        let rows = st.weight_rows(&history).unwrap();
        for eps in [0.25, 0.5, 0.75, 1.0] {
            let bound = (t as f64).powf((1.0 - eps) / (2.0 * (1.0 + eps)));
            for r in rows.rows() {
                assert!(r.norm() <= 1.0 + 1e-9);
                assert!(lp_norm(r, 1.0 + eps) <= bound + 1e-6);
            }
        }
    }
}
