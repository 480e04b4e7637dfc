//! Class functions on `S_k` and their convolution algebra, in exact
//! rational arithmetic.
//!
//! A class function is a vector indexed by conjugacy classes (cycle types).
//! Convolution `(f ∗ h)(z) = Σ_x f(x) h(x⁻¹ z)` is evaluated through the
//! structure constants `N[l][i][j] = #{x ∈ C_i : x⁻¹ z_l ∈ C_j}` with `z_l`
//! a fixed representative of class `l`.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::perm::SymmetricGroup;
use crate::error::{Error, Result};

/// Largest replica number with a class algebra.
pub const MAX_REPLICAS: usize = 6;

pub struct ClassAlgebra {
    group: SymmetricGroup,
    class_of: Vec<usize>,
    partitions: Vec<Vec<usize>>,
    sizes: Vec<usize>,
    structure: Vec<u32>,
}

static ALGEBRAS: [OnceLock<ClassAlgebra>; MAX_REPLICAS + 1] = [const { OnceLock::new() }; MAX_REPLICAS + 1];

pub fn rational(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

impl ClassAlgebra {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_REPLICAS {
            return Err(Error::Unsupported(format!("class algebra of S_{k}")));
        }
        let group = SymmetricGroup::new(k)?;
        let mut partitions: Vec<Vec<usize>> = Vec::new();
        let mut reps = Vec::new();
        let mut class_of = Vec::with_capacity(group.order());
        for (idx, p) in group.elements().iter().enumerate() {
            let ct = p.cycle_type();
            let c = match partitions.iter().position(|q| *q == ct) {
                Some(c) => c,
                None => {
                    partitions.push(ct);
                    reps.push(idx);
                    partitions.len() - 1
                }
            };
            class_of.push(c);
        }
        let p = partitions.len();
        let mut sizes = vec![0usize; p];
        for &c in &class_of {
            sizes[c] += 1;
        }
        let mut structure = vec![0u32; p * p * p];
        for (l, &z) in reps.iter().enumerate() {
            for x in 0..group.order() {
                let y = group.mul(group.inv(x), z);
                structure[(l * p + class_of[x]) * p + class_of[y]] += 1;
            }
        }
        Ok(ClassAlgebra {
            group,
            class_of,
            partitions,
            sizes,
            structure,
        })
    }

    /// Shared instance for `k ≤ 6`.
    pub fn get(k: usize) -> Result<&'static ClassAlgebra> {
        if k == 0 || k > MAX_REPLICAS {
            return Err(Error::Unsupported(format!("class algebra of S_{k}")));
        }
        if let Some(a) = ALGEBRAS[k].get() {
            return Ok(a);
        }
        let a = ClassAlgebra::new(k)?;
        Ok(ALGEBRAS[k].get_or_init(|| a))
    }

    pub fn degree(&self) -> usize {
        self.group.degree()
    }

    pub fn group(&self) -> &SymmetricGroup {
        &self.group
    }

    pub fn num_classes(&self) -> usize {
        self.partitions.len()
    }

    /// Cycle type of each class; class 0 is the identity.
    pub fn partitions(&self) -> &[Vec<usize>] {
        &self.partitions
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn class_of(&self, element: usize) -> usize {
        self.class_of[element]
    }

    pub fn cycle_count(&self, class: usize) -> usize {
        self.partitions[class].len()
    }

    pub fn all_cycles_even(&self, class: usize) -> bool {
        self.partitions[class].iter().all(|l| l % 2 == 0)
    }

    /// `N[l][i][j]`.
    pub fn structure_constant(&self, l: usize, i: usize, j: usize) -> u32 {
        let p = self.num_classes();
        self.structure[(l * p + i) * p + j]
    }

    pub fn delta_identity(&self) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.num_classes()];
        v[0] = BigRational::one();
        v
    }

    /// `τ ↦ base^{c(τ)}`.
    pub fn power_of_cycles(&self, base: u64) -> Vec<BigRational> {
        (0..self.num_classes())
            .map(|c| BigRational::from_integer(BigInt::from(base).pow(self.cycle_count(c) as u32)))
            .collect()
    }

    pub fn convolve(&self, f: &[BigRational], h: &[BigRational]) -> Vec<BigRational> {
        let p = self.num_classes();
        let mut out = vec![BigRational::zero(); p];
        for (l, slot) in out.iter_mut().enumerate() {
            for (i, fi) in f.iter().enumerate() {
                if fi.is_zero() {
                    continue;
                }
                let mut inner = BigRational::zero();
                for (j, hj) in h.iter().enumerate() {
                    let n = self.structure_constant(l, i, j);
                    if n != 0 && !hj.is_zero() {
                        inner += hj * BigRational::from_integer(BigInt::from(n));
                    }
                }
                *slot += fi * inner;
            }
        }
        out
    }

    pub fn convolve_f64(&self, f: &[f64], h: &[f64]) -> Vec<f64> {
        let p = self.num_classes();
        (0..p)
            .map(|l| {
                let mut acc = 0.0;
                for (i, fi) in f.iter().enumerate() {
                    for (j, hj) in h.iter().enumerate() {
                        acc += fi * hj * self.structure_constant(l, i, j) as f64;
                    }
                }
                acc
            })
            .collect()
    }

    /// Distinct eigenvalues of convolution by `q^{c(·)}`: one content
    /// product `Π_{boxes}(q + j − i)` per irreducible representation.
    pub fn gram_eigenvalues(&self, q: u64) -> Vec<BigInt> {
        let mut out: Vec<BigInt> = Vec::new();
        for shape in &self.partitions {
            let mut prod = BigInt::one();
            for (row, &len) in shape.iter().enumerate() {
                for col in 0..len {
                    prod *= BigInt::from(q as i64 + col as i64 - row as i64);
                }
            }
            if !out.contains(&prod) {
                out.push(prod);
            }
        }
        out
    }

    /// Weingarten class function `Wg(·, q)`: the inverse of the Gram
    /// element `q^{c(·)}` when it is invertible (`q ≥ k`), its
    /// Moore–Penrose pseudo-inverse otherwise.
    pub fn weingarten(&self, q: u64) -> Vec<BigRational> {
        let g = self.power_of_cycles(q);
        let eig = self.gram_eigenvalues(q);
        let delta = self.delta_identity();
        let mut out = vec![BigRational::zero(); self.num_classes()];
        for mu in eig.iter().filter(|m| !m.is_zero()) {
            // spectral projector Π_{ν≠μ} (G − ν)/(μ − ν)
            let mut proj = delta.clone();
            for nu in eig.iter().filter(|n| *n != mu) {
                let shifted: Vec<BigRational> = g
                    .iter()
                    .zip(&delta)
                    .map(|(gi, di)| gi - di * BigRational::from_integer(nu.clone()))
                    .collect();
                let scale = BigRational::from_integer(mu - nu).recip();
                proj = self.convolve(&proj, &shifted).into_iter().map(|x| x * &scale).collect();
            }
            let inv_mu = BigRational::from_integer(mu.clone()).recip();
            for (o, p) in out.iter_mut().zip(proj) {
                *o += p * &inv_mu;
            }
        }
        out
    }

    /// `Σ_σ f(σ)` over the whole group.
    pub fn group_sum(&self, f: &[BigRational]) -> BigRational {
        f.iter()
            .zip(&self.sizes)
            .map(|(x, &s)| x * BigRational::from_integer(BigInt::from(s)))
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// Expands a class function to all `k!` elements.
    pub fn expand_f64(&self, f: &[f64]) -> Vec<f64> {
        self.class_of.iter().map(|&c| f[c]).collect()
    }
}

/// Characteristic polynomial `det(x·1 − A)` of an exact square matrix,
/// coefficients from constant term upward (Faddeev–LeVerrier).
pub fn characteristic_polynomial(a: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = a.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for (l, row) in m.iter().enumerate() {
                    if !a[i][l].is_zero() && !row[j].is_zero() {
                        acc += &a[i][l] * &row[j];
                    }
                }
                next[i][j] = acc;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        // c_{n-k} = −tr(A M_k)/k
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -tr / rational(k as i64);
    }
    coeffs
}

/// Root of `p` nearest to zero by Newton iteration from 0, for a root
/// well separated from the others.
pub fn root_near_zero(coeffs: &[BigRational]) -> Result<f64> {
    if coeffs.len() < 2 || coeffs[1].is_zero() {
        return Err(Error::NumericalConsistency("degenerate root near zero".into()));
    }
    if coeffs[0].is_zero() {
        return Ok(0.0);
    }
    Ok(refine_root(coeffs, -to_f64(&coeffs[0]) / to_f64(&coeffs[1])))
}

/// Newton polish of a simple root of `p` from a nearby `start`. Each
/// coefficient is rounded once from its exact value, so small roots keep
/// full relative precision.
pub fn refine_root(coeffs: &[BigRational], start: f64) -> f64 {
    let c: Vec<f64> = coeffs.iter().map(to_f64).collect();
    let eval = |x: f64| -> (f64, f64) {
        let mut p = 0.0;
        let mut dp = 0.0;
        for &ci in c.iter().rev() {
            dp = dp * x + p;
            p = p * x + ci;
        }
        (p, dp)
    };
    let mut x = start;
    for _ in 0..100 {
        let (p, dp) = eval(x);
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let step = p / dp;
        if !step.is_finite() {
            break;
        }
        x -= step;
        if step.abs() <= 1e-17 * x.abs() || step == 0.0 {
            break;
        }
    }
    x
}
