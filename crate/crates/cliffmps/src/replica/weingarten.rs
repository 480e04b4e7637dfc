//! Weingarten functions by numerical inversion of the Gram matrix
//! `G[σ][π] = q^{c(σ⁻¹π)}`.

use nalgebra::DMatrix;

use super::classes::{to_f64, ClassAlgebra};
use crate::error::{Error, Result};
use crate::numeric::RealMatrix;

#[derive(Clone, Debug)]
pub struct WeingartenTable {
    k: usize,
    q: f64,
    /// `W[σ][π] = Wg(σ⁻¹π, q)` in the lexicographic element order of `S_k`.
    matrix: RealMatrix,
}

/// `G[σ][π] = q^{c(σ⁻¹π)}`.
pub fn gram_matrix(k: usize, q: f64) -> Result<RealMatrix> {
    let alg = ClassAlgebra::get(k)?;
    let g = alg.group();
    let n = g.order();
    Ok(DMatrix::from_fn(n, n, |s, p| {
        let c = alg.cycle_count(alg.class_of(g.mul(g.inv(s), p)));
        q.powi(c as i32)
    }))
}

impl WeingartenTable {
    /// Inverts the Gram matrix for `q ≥ k` and checks `G·W = 1` to 1e-10.
    pub fn new(k: usize, q: f64) -> Result<Self> {
        if !(q.is_finite() && q >= k as f64) {
            return Err(Error::NumericalConsistency(format!(
                "Gram matrix of S_{k} is singular or ill-defined at q = {q} (need q ≥ k)"
            )));
        }
        let g = gram_matrix(k, q)?;
        let w = g
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::NumericalConsistency(format!("singular Gram matrix at k={k}, q={q}")))?;
        let defect = (&g * &w - RealMatrix::identity(g.nrows(), g.ncols())).amax();
        if defect > 1e-10 {
            return Err(Error::NumericalConsistency(format!("G·W deviates from 1 by {defect:e}")));
        }
        Ok(WeingartenTable { k, q, matrix: w })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    /// `Wg(π, q)` for the element with index `pi` in `S_k`.
    pub fn value(&self, pi: usize) -> f64 {
        self.matrix[(0, pi)]
    }

    /// `Wg` per conjugacy class (class order of [`ClassAlgebra`]).
    pub fn class_values(&self) -> Result<Vec<f64>> {
        let alg = ClassAlgebra::get(self.k)?;
        let mut out = vec![f64::NAN; alg.num_classes()];
        for (pi, v) in self.matrix.row(0).iter().enumerate() {
            let c = alg.class_of(pi);
            if out[c].is_nan() {
                out[c] = *v;
            }
        }
        Ok(out)
    }

    /// Largest deviation of `Wg(σ⁻¹π)` from its class value; zero for an
    /// exact class function.
    pub fn class_function_defect(&self) -> Result<f64> {
        let alg = ClassAlgebra::get(self.k)?;
        let g = alg.group();
        let per_class = self.class_values()?;
        let mut worst: f64 = 0.0;
        for s in 0..g.order() {
            for p in 0..g.order() {
                let c = alg.class_of(g.mul(g.inv(s), p));
                worst = worst.max((self.matrix[(s, p)] - per_class[c]).abs());
            }
        }
        Ok(worst)
    }
}

/// Exact `Wg(·, q)` per class (pseudo-inverse for `q < k`) as `f64`.
pub fn weingarten_exact_f64(k: usize, q: u64) -> Result<Vec<f64>> {
    let alg = ClassAlgebra::get(k)?;
    Ok(alg.weingarten(q).iter().map(to_f64).collect())
}
