//! Dense complex linear algebra and seeded randomness shared by the rest of
//! the crate.
//!
//! Matrices are plain `nalgebra::DMatrix` values. Everything here is pure
//! given its inputs; the only mutable state is the caller-owned [`Rng`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type RealMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seeded ChaCha stream.
///
/// Children obtained with [`Rng::child`] share a key derived from the parent
/// and are separated by the ChaCha stream id, so sibling trajectories draw
/// from disjoint subsequences regardless of how much the parent has consumed.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: ChaCha12Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Rng {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent child stream number `index`. Depends only on this
    /// generator's seed and stream, never on its current position.
    pub fn child(&self, index: u64) -> Rng {
        let key = splitmix64(self.seed ^ splitmix64(self.stream.wrapping_add(0x5851_f42d_4c95_7f2d)));
        Rng::with_stream(key, index)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        // Lemire's multiply-shift with rejection
        let n64 = n as u64;
        let mut m = (self.inner.next_u64() as u128) * (n64 as u128);
        if (m as u64) < n64 {
            let threshold = n64.wrapping_neg() % n64;
            while (m as u64) < threshold {
                m = (self.inner.next_u64() as u128) * (n64 as u128);
            }
        }
        (m >> 64) as usize
    }

    pub fn bit(&mut self) -> bool {
        self.inner.next_u32() & 1 == 1
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    /// Complex Gaussian with `E|z|^2 = 1`.
    pub fn complex_normal(&mut self) -> C64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(self.normal() * s, self.normal() * s)
    }
}

impl RngCore for Rng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Haar-random unitary of size `dim` (Ginibre matrix, QR, phases of the R
/// diagonal moved into Q).
pub fn haar_unitary(dim: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    if dim == 0 {
        return Err(Error::InvalidDimension("Haar unitary of dimension 0".into()));
    }
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| rng.complex_normal());
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// `‖U†U − 1‖` in spectral norm.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let n = u.ncols();
    let d = u.adjoint() * u - ComplexMatrix::identity(n, n);
    spectral_norm(&d)
}

pub fn spectral_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Result of a truncated SVD `M ≈ U · diag(S) · V`.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub u: ComplexMatrix,
    pub s: Vec<f64>,
    /// Rows are the kept right singular vectors (already conjugated).
    pub v: ComplexMatrix,
    pub discarded_weight: f64,
}

impl Truncation {
    pub fn rank(&self) -> usize {
        self.s.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.u.clone();
        for (j, s) in self.s.iter().enumerate() {
            for i in 0..us.nrows() {
                us[(i, j)] *= *s;
            }
        }
        us * &self.v
    }
}

/// SVD keeping at most `chi_max` singular values strictly above `cutoff`,
/// sorted in descending order. At least one value is kept unless `M = 0`.
pub fn svd_truncate(m: &ComplexMatrix, chi_max: usize, cutoff: f64) -> Result<Truncation> {
    if chi_max == 0 {
        return Err(Error::InvalidDimension("chi_max must be positive".into()));
    }
    if !is_finite(m) {
        return Err(Error::Validation("matrix has non-finite entries".into()));
    }
    let (rows, cols) = m.shape();
    let svd = m.clone().svd(true, true);
    let u_full = svd.u.expect("u requested");
    let vt_full = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut keep = Vec::new();
    let mut discarded = 0.0;
    for &idx in &order {
        let s = svd.singular_values[idx];
        if keep.len() < chi_max && s > cutoff && s > 0.0 {
            keep.push(idx);
        } else {
            discarded += s * s;
        }
    }

    let u = ComplexMatrix::from_fn(rows, keep.len(), |i, j| u_full[(i, keep[j])]);
    let v = ComplexMatrix::from_fn(keep.len(), cols, |i, j| vt_full[(keep[i], j)]);
    let s = keep.iter().map(|&k| svd.singular_values[k]).collect();
    Ok(Truncation {
        u,
        s,
        v,
        discarded_weight: discarded,
    })
}

/// Eigenvalues of a general (non-symmetric) real square matrix.
pub fn eigenvalues_general(m: &RealMatrix) -> Result<Vec<C64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidDimension(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation("matrix has non-finite entries".into()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    // nalgebra's Schur iteration has no iteration cap and can stall on
    // highly degenerate spectra; faer's QR algorithm does not.
    let n = m.nrows();
    let fm = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let ev = fm
        .eigenvalues()
        .map_err(|e| Error::NumericalConsistency(format!("eigenvalue solver failed: {e:?}")))?;
    Ok(ev.into_iter().map(|z| C64::new(z.re, z.im)).collect())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Von Neumann entropy (natural log) of a probability vector; zeros skipped.
pub fn shannon_entropy(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 1e-300)
        .map(|p| -p * p.ln())
        .sum()
}

/// Pairwise (cascade) summation for reproducible, low-error reductions.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn normalize(v: &mut DVector<C64>) -> f64 {
    let n = v.norm();
    if n > 0.0 {
        *v /= C64::new(n, 0.0);
    }
    n
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}
