//! Replica transfer matrices of random MPS in the permutation basis.
//!
//! Site `i` contributes `T[σ][β] = w(σ)·K(σ⁻¹β)` with
//! `K = Wg(·, q_i) ∗ χ_{i−1}^{c(·)}` and `q_i = 2χ_i`. The weight `w` is the
//! physical contraction: the Pauli sum `Σ_α Tr[σ_α^{⊗k} T_σ]` for magic,
//! or `Tr[T_σ] = 2^{c(σ)}` for the norm.
//!
//! Class functions are mapped to class functions by `T`, and both chain
//! boundaries (`e_id` and the all-ones vector) are class functions, so the
//! open-boundary chain is evaluated in the class sector
//! (`p(k)` dimensions instead of `k!`). The full `k!×k!` matrix is kept for
//! spectra and for the periodic trace.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::classes::{characteristic_polynomial, rational, refine_root, to_f64, ClassAlgebra};
use super::closed_form::{haar_gap, haar_limit};
use super::perm::Permutation;
use crate::error::{Error, Result};
use crate::mps::BondProfile;
use crate::numeric::{eigenvalues_general, RealMatrix, C64};

/// Physical-leg contraction used in the transfer matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SiteWeight {
    /// `Σ_α Tr[σ_α^{⊗k} T_σ]` summed over the four single-qubit Paulis.
    Pauli,
    /// `Tr[T_σ] = 2^{c(σ)}`; the chain then computes the squared norm.
    Identity,
}

impl SiteWeight {
    pub fn value(self, sigma: &Permutation) -> f64 {
        match self {
            SiteWeight::Pauli => pauli_trace_weight(sigma),
            SiteWeight::Identity => identity_weight(sigma),
        }
    }

    fn class_value(self, alg: &ClassAlgebra, class: usize) -> BigRational {
        let base = rational(1i64 << alg.cycle_count(class));
        match self {
            SiteWeight::Identity => base,
            SiteWeight::Pauli if alg.all_cycles_even(class) => base * rational(4),
            SiteWeight::Pauli => base,
        }
    }
}

/// `g(σ) = 2^{−n} Σ_α Π_{cycles c} Tr[σ_α^{|c|}]` for `σ ∈ S_{2n}`.
pub fn pauli_weight_g(sigma: &Permutation, n: usize) -> f64 {
    pauli_trace_weight(sigma) * 2f64.powi(-(n as i32))
}

/// `Σ_α Π_{cycles c} Tr[σ_α^{|c|}] = 2^{c(σ)}(1 + 3·[all cycles even])`.
pub fn pauli_trace_weight(sigma: &Permutation) -> f64 {
    let base = 2f64.powi(sigma.cycle_count() as i32);
    if sigma.all_cycles_even() {
        4.0 * base
    } else {
        base
    }
}

/// `Tr[T_σ]` on one qubit.
pub fn identity_weight(sigma: &Permutation) -> f64 {
    2f64.powi(sigma.cycle_count() as i32)
}

fn check_k(k: usize) -> Result<&'static ClassAlgebra> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::Unsupported(format!("transfer matrix for k = {k} replicas (need even k)")));
    }
    ClassAlgebra::get(k)
}

type KernelKey = (usize, u64, u64);
type Kernel = Arc<Vec<BigRational>>;

fn kernel(k: usize, q: u64, chi_in: u64) -> Result<Kernel> {
    static CACHE: OnceLock<Mutex<HashMap<KernelKey, Kernel>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("kernel cache poisoned").get(&(k, q, chi_in)) {
        return Ok(hit.clone());
    }
    let alg = check_k(k)?;
    let value = Arc::new(alg.convolve(&alg.weingarten(q), &alg.power_of_cycles(chi_in)));
    cache.lock().expect("kernel cache poisoned").insert((k, q, chi_in), value.clone());
    Ok(value)
}

fn check_bonds(chi_in: usize, chi_out: usize) -> Result<()> {
    if chi_in == 0 || chi_out == 0 {
        return Err(Error::config("chi", "bond dimensions must be positive"));
    }
    Ok(())
}

/// Transfer matrix restricted to class functions, exact and in `f64`.
#[derive(Debug)]
pub struct ReducedTransfer {
    k: usize,
    exact: Vec<Vec<BigRational>>,
    matrix: RealMatrix,
}

impl ReducedTransfer {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `R[l][j] = w_l Σ_i K_i N[l][i][j]`.
    pub fn exact(&self) -> &[Vec<BigRational>] {
        &self.exact
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }
}

type ReducedKey = (usize, u64, u64, SiteWeight);

/// Class-sector transfer matrix for one site with output bond `chi_out`
/// (`q = 2·chi_out`) and input bond `chi_in`; cached.
pub fn reduced_transfer(k: usize, chi_in: usize, chi_out: usize, weight: SiteWeight) -> Result<Arc<ReducedTransfer>> {
    static CACHE: OnceLock<Mutex<HashMap<ReducedKey, Arc<ReducedTransfer>>>> = OnceLock::new();
    check_bonds(chi_in, chi_out)?;
    let q = 2 * chi_out as u64;
    let key = (k, q, chi_in as u64, weight);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("transfer cache poisoned").get(&key) {
        return Ok(hit.clone());
    }
    let alg = check_k(k)?;
    let kern = kernel(k, q, chi_in as u64)?;
    let p = alg.num_classes();
    let mut exact = vec![vec![BigRational::zero(); p]; p];
    for (l, row) in exact.iter_mut().enumerate() {
        let w = weight.class_value(alg, l);
        for (j, slot) in row.iter_mut().enumerate() {
            let mut acc = BigRational::zero();
            for (i, ki) in kern.iter().enumerate() {
                let n = alg.structure_constant(l, i, j);
                if n != 0 {
                    acc += ki * rational(n as i64);
                }
            }
            *slot = acc * &w;
        }
    }
    let matrix = DMatrix::from_fn(p, p, |l, j| to_f64(&exact[l][j]));
    let value = Arc::new(ReducedTransfer { k, exact, matrix });
    cache.lock().expect("transfer cache poisoned").insert(key, value.clone());
    Ok(value)
}

/// Full `k!×k!` site transfer matrix in the lexicographic order of `S_k`.
#[derive(Clone, Debug)]
pub struct TransferMatrix {
    k: usize,
    q: u64,
    chi_in: usize,
    weight: SiteWeight,
    matrix: RealMatrix,
}

impl TransferMatrix {
    /// Site with input bond `chi_in` and output bond `chi_out`. For
    /// `2·chi_out < k` the Gram matrix is singular and its pseudo-inverse is
    /// used, which is exact on the span of the permutation operators.
    pub fn site(k: usize, chi_in: usize, chi_out: usize, weight: SiteWeight) -> Result<Self> {
        check_bonds(chi_in, chi_out)?;
        let alg = check_k(k)?;
        let q = 2 * chi_out as u64;
        let kern: Vec<f64> = kernel(k, q, chi_in as u64)?.iter().map(to_f64).collect();
        let w: Vec<f64> = (0..alg.num_classes()).map(|c| to_f64(&weight.class_value(alg, c))).collect();
        let g = alg.group();
        let n = g.order();
        let matrix = DMatrix::from_fn(n, n, |s, b| w[alg.class_of(s)] * kern[alg.class_of(g.mul(g.inv(s), b))]);
        Ok(TransferMatrix { k, q, chi_in, weight, matrix })
    }

    /// Translation-invariant bulk site, `chi_in = chi_out = chi`.
    pub fn bulk(k: usize, chi: usize, weight: SiteWeight) -> Result<Self> {
        Self::site(k, chi, chi, weight)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn chi_in(&self) -> usize {
        self.chi_in
    }

    pub fn weight(&self) -> SiteWeight {
        self.weight
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }
}

/// `transfer_matrix_site` for the magic weight at Rényi index `n` (`k = 2n`).
pub fn transfer_matrix_site(n: usize, chi_in: usize, chi_out: usize) -> Result<TransferMatrix> {
    TransferMatrix::site(2 * n, chi_in, chi_out, SiteWeight::Pauli)
}

/// `Σ_σ [T^(N) ⋯ T^(1) e_id](σ)` over the staircase bond profile.
pub fn obc_chain_value(k: usize, chi_max: usize, n_sites: usize, weight: SiteWeight) -> Result<f64> {
    obc_chain_value_for(k, &BondProfile::new(n_sites, chi_max)?, weight)
}

/// Chain value over an arbitrary bond profile.
pub fn obc_chain_value_for(k: usize, profile: &BondProfile, weight: SiteWeight) -> Result<f64> {
    let alg = check_k(k)?;
    let dims = profile.dims();
    let mut v = nalgebra::DVector::<f64>::zeros(alg.num_classes());
    v[0] = 1.0;
    for i in 1..dims.len() {
        let r = reduced_transfer(k, dims[i - 1], dims[i], weight)?;
        v = r.matrix() * v;
    }
    let out: f64 = v.iter().zip(alg.sizes()).map(|(x, &s)| x * s as f64).sum();
    if !out.is_finite() {
        return Err(Error::NumericalConsistency(format!(
            "chain value {out} at N={}, chi={}",
            profile.num_sites(),
            profile.chi_max()
        )));
    }
    Ok(out)
}

/// Sorted spectrum of a bulk transfer matrix.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    eigenvalues: Vec<C64>,
    /// `λ − 1` to full relative precision where known from the exact
    /// class-sector polynomial.
    excess: Vec<Option<f64>>,
    cluster: usize,
}

impl SpectrumResult {
    /// Descending by real part, ties by increasing `|Im|`.
    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    /// Eigenvalues before the first real-part gap larger than 0.1.
    pub fn leading_cluster(&self) -> &[C64] {
        &self.eigenvalues[..self.cluster]
    }

    /// `λ_i − 1` when eigenvalue `i` was refined from the exact polynomial.
    pub fn excess(&self, i: usize) -> Option<f64> {
        self.excess[i]
    }

    /// `λ₁ − 1`, refined when possible.
    pub fn leading_excess(&self) -> f64 {
        self.excess[0].unwrap_or(self.eigenvalues[0].re - 1.0)
    }

    fn ln_real(&self, i: usize) -> f64 {
        match self.excess[i] {
            Some(mu) => mu.ln_1p(),
            None => self.eigenvalues[i].re.ln(),
        }
    }

    fn is_positive_real(&self, i: usize) -> bool {
        let l = self.eigenvalues[i];
        l.im == 0.0 && l.re > 0.0
    }

    /// `Σ_σ λ_σ^N`.
    pub fn trace_power(&self, n: usize) -> f64 {
        (0..self.eigenvalues.len())
            .map(|i| {
                if self.is_positive_real(i) {
                    (n as f64 * self.ln_real(i)).exp()
                } else {
                    self.eigenvalues[i].powu(n as u32).re
                }
            })
            .sum()
    }

    /// `Σ_{λ ∈ cluster} (λ^N − 1) + Σ_{others} λ^N`, without cancellation
    /// for the real cluster eigenvalues close to 1.
    pub fn trace_power_minus_cluster(&self, n: usize) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.eigenvalues.len() {
            let in_cluster = i < self.cluster;
            acc += match (in_cluster, self.is_positive_real(i)) {
                (true, true) => (n as f64 * self.ln_real(i)).exp_m1(),
                (true, false) => self.eigenvalues[i].powu(n as u32).re - 1.0,
                (false, true) => (n as f64 * self.ln_real(i)).exp(),
                (false, false) => self.eigenvalues[i].powu(n as u32).re,
            };
        }
        acc
    }
}

fn spectrum_order(a: &(C64, Option<f64>), b: &(C64, Option<f64>)) -> std::cmp::Ordering {
    b.0.re.total_cmp(&a.0.re).then(a.0.im.abs().total_cmp(&b.0.im.abs()))
}

fn leading_cluster_len(ev: &[C64]) -> usize {
    for i in 0..ev.len().saturating_sub(1) {
        if ev[i].re - ev[i + 1].re > 0.1 {
            return i + 1;
        }
    }
    ev.len()
}

/// Spectrum of the bulk transfer matrix at bond dimension `chi`. Real
/// eigenvalues of the class sector within 0.1 of 1 are polished on the
/// exact characteristic polynomial of `R − 1` and matched to the full
/// spectrum; the rest come from the `f64` eigensolver.
pub fn bulk_spectrum(k: usize, chi: usize, weight: SiteWeight) -> Result<Arc<SpectrumResult>> {
    type Key = (usize, usize, SiteWeight);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<SpectrumResult>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.lock().expect("spectrum cache poisoned").get(&(k, chi, weight)) {
        return Ok(hit.clone());
    }
    let t = TransferMatrix::bulk(k, chi, weight)?;
    let ev = eigenvalues_general(t.matrix())?;
    let reduced = reduced_transfer(k, chi, chi, weight)?;
    let shifted: Vec<Vec<BigRational>> = reduced
        .exact()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, x)| if i == j { x - BigRational::one() } else { x.clone() })
                .collect()
        })
        .collect();
    let poly = characteristic_polynomial(&shifted);
    let mut pairs: Vec<(C64, Option<f64>)> = ev.into_iter().map(|l| (l, None)).collect();
    for l in eigenvalues_general(reduced.matrix())? {
        if l.im != 0.0 || (l.re - 1.0).abs() > 0.1 {
            continue;
        }
        let mu = refine_root(&poly, l.re - 1.0);
        if (mu - (l.re - 1.0)).abs() > 1e-8 {
            continue;
        }
        let best = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.1.is_none() && p.0.im == 0.0)
            .map(|(i, p)| (i, (p.0.re - 1.0 - mu).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((i, dist)) = best {
            if dist < 1e-6 {
                pairs[i] = (C64::new(1.0 + mu, 0.0), Some(mu));
            }
        }
    }
    pairs.sort_by(spectrum_order);
    let eigenvalues: Vec<C64> = pairs.iter().map(|p| p.0).collect();
    let excess = pairs.iter().map(|p| p.1).collect();
    let cluster = leading_cluster_len(&eigenvalues);
    let value = Arc::new(SpectrumResult { eigenvalues, excess, cluster });
    cache.lock().expect("spectrum cache poisoned").insert((k, chi, weight), value.clone());
    Ok(value)
}

/// `Tr[T^N]` from the spectrum.
pub fn pbc_trace(k: usize, chi: usize, n_sites: usize, weight: SiteWeight) -> Result<f64> {
    if n_sites == 0 {
        return Err(Error::config("n", "need at least one site"));
    }
    Ok(bulk_spectrum(k, chi, weight)?.trace_power(n_sites))
}

/// `Tr[T^N] − d^n E_Haar[m_n]` for the magic weight, `k = 2n`.
pub fn pbc_delta(n: usize, chi: usize, n_sites: usize) -> Result<f64> {
    let spec = bulk_spectrum(2 * n, chi, SiteWeight::Pauli)?;
    let x = 0.5f64.powi(n_sites.min(i32::MAX as usize) as i32);
    let cluster = spec.leading_cluster().len() as f64;
    Ok(spec.trace_power_minus_cluster(n_sites) + (cluster - haar_limit(n)?) + haar_gap(n, x)?)
}

/// `obc_chain_value − d^n E_Haar[m_n]` for the magic weight, `k = 2n`.
pub fn obc_delta(n: usize, chi: usize, n_sites: usize) -> Result<f64> {
    let chain = obc_chain_value(2 * n, chi, n_sites, SiteWeight::Pauli)?;
    let x = 0.5f64.powi(n_sites.min(i32::MAX as usize) as i32);
    Ok(chain - haar_limit(n)? + haar_gap(n, x)?)
}
