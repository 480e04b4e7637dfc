//! Dense state vectors on up to [`MAX_QUBITS`] qubits: gates, exact
//! stabilizer Rényi entropies, cut entropies and the k-fold objects used
//! as brute-force references.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::circuit::{Circuit, Gate};
use crate::clifford::{CliffordGroup, CliffordTableau};
use crate::error::{Error, Result};
use crate::numeric::{hermitian_eigenvalues, pairwise_sum, shannon_entropy, ComplexMatrix, Rng, C64, ONE, ZERO};
use crate::pauli::PauliString;
use crate::replica::perm::{Permutation, SymmetricGroup};

pub const MAX_QUBITS: usize = 12;
/// Largest register for the exhaustive `4^N` Pauli sum.
pub const MAX_SRE_QUBITS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

/// Linearized magic `m_n` and Rényi entropy `M_n` (nats).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sre {
    pub index: usize,
    pub linear: f64,
    pub entropy: f64,
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidDimension("state on zero qubits".into()));
    }
    if n > MAX_QUBITS {
        return Err(Error::Resource(format!("dense state on {n} qubits (max {MAX_QUBITS})")));
    }
    Ok(())
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n: usize) -> Result<Self> {
        check_size(n)?;
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = ONE;
        Ok(StateVector { n, amps })
    }

    /// Wraps amplitudes after checking the length and unit norm (±1e-10).
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidDimension(format!("{len} amplitudes")));
        }
        let n = len.trailing_zeros() as usize;
        check_size(n)?;
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!("state norm² = {norm2}")));
        }
        Ok(StateVector { n, amps })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn from_unnormalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::Validation("zero or non-finite vector".into()));
        }
        let s = 1.0 / norm2.sqrt();
        amps.iter_mut().for_each(|a| *a *= s);
        StateVector::from_amplitudes(amps)
    }

    pub fn haar(n: usize, rng: &mut Rng) -> Result<Self> {
        check_size(n)?;
        let amps = (0..1usize << n).map(|_| rng.complex_normal()).collect();
        StateVector::from_unnormalized(amps)
    }

    /// Tensor product of independent Haar single-qubit states.
    pub fn random_product(n: usize, rng: &mut Rng) -> Result<Self> {
        check_size(n)?;
        let qubits: Vec<[C64; 2]> = (0..n)
            .map(|_| {
                let (a, b) = (rng.complex_normal(), rng.complex_normal());
                let s = 1.0 / (a.norm_sqr() + b.norm_sqr()).sqrt();
                [a * s, b * s]
            })
            .collect();
        StateVector::product(&qubits)
    }

    /// `⊗_j (a_j|0⟩ + b_j|1⟩)`, qubit 0 leftmost.
    pub fn product(qubits: &[[C64; 2]]) -> Result<Self> {
        let n = qubits.len();
        check_size(n)?;
        let mut amps = vec![ONE];
        for q in qubits {
            amps = amps.iter().flat_map(|a| [a * q[0], a * q[1]]).collect();
        }
        StateVector::from_unnormalized(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(Error::Validation(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        Ok(())
    }

    /// Applies a 2x2 matrix to qubit `q`.
    pub fn apply_1q(&mut self, q: usize, m: &ComplexMatrix) -> Result<()> {
        self.check_qubit(q)?;
        if m.shape() != (2, 2) {
            return Err(Error::InvalidDimension(format!("{:?} single-qubit gate", m.shape())));
        }
        let mask = 1usize << (self.n - 1 - q);
        let (m00, m01, m10, m11) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = m00 * a0 + m01 * a1;
                self.amps[i | mask] = m10 * a0 + m11 * a1;
            }
        }
        Ok(())
    }

    /// Applies a 4x4 matrix to qubits `(q1, q2)`; local index `2·s_{q1} + s_{q2}`.
    pub fn apply_2q(&mut self, q1: usize, q2: usize, m: &ComplexMatrix) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::Validation("two-qubit gate on a single qubit".into()));
        }
        if m.shape() != (4, 4) {
            return Err(Error::InvalidDimension(format!("{:?} two-qubit gate", m.shape())));
        }
        let b1 = 1usize << (self.n - 1 - q1);
        let b2 = 1usize << (self.n - 1 - q2);
        let mut local = [ZERO; 4];
        for base in 0..self.amps.len() {
            if base & (b1 | b2) != 0 {
                continue;
            }
            let idx = [base, base | b2, base | b1, base | b1 | b2];
            for (l, &i) in idx.iter().enumerate() {
                local[l] = self.amps[i];
            }
            for (r, &i) in idx.iter().enumerate() {
                self.amps[i] = m[(r, 0)] * local[0] + m[(r, 1)] * local[1] + m[(r, 2)] * local[2] + m[(r, 3)] * local[3];
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        match gate {
            Gate::H(q) | Gate::S(q) | Gate::T(q) => self.apply_1q(q, &gate.matrix()),
            Gate::Cnot(c, t) => self.apply_2q(c, t, &gate.matrix()),
        }
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        circuit.validate(self.n)?;
        for &g in &circuit.gates {
            self.apply_gate(g)?;
        }
        Ok(())
    }

    /// Full `d × d` matrix-vector product.
    pub fn apply_unitary(&mut self, u: &ComplexMatrix) -> Result<()> {
        let d = self.amps.len();
        if u.shape() != (d, d) {
            return Err(Error::InvalidDimension(format!("{:?} operator on dimension {d}", u.shape())));
        }
        let v = nalgebra::DVector::from_column_slice(&self.amps);
        let w = u * v;
        self.amps.copy_from_slice(w.as_slice());
        Ok(())
    }

    pub fn apply_clifford(&mut self, t: &CliffordTableau) -> Result<()> {
        if t.num_qubits() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: t.num_qubits(),
            });
        }
        self.apply_unitary(&t.to_dense()?)
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.amps = p.apply(&self.amps)?;
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` for Hermitian `P`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        let v = p.expectation_dense(&self.amps)?;
        if v.im.abs() > 1e-8 {
            return Err(Error::NumericalConsistency(format!("imaginary expectation {v} for {p}")));
        }
        Ok(v.re)
    }

    /// `Σ_σ ⟨ψ|σ|ψ⟩^{2n}` over all `4^N` Hermitian strings, for every requested `n`.
    ///
    /// For a fixed x-mask the expectations over all z-masks are the
    /// Walsh–Hadamard transform of `conj(ψ[i⊕x]) ψ[i]`.
    pub fn pauli_moment_sums(&self, indices: &[usize]) -> Result<Vec<f64>> {
        if self.n > MAX_SRE_QUBITS {
            return Err(Error::Resource(format!(
                "exhaustive Pauli sum on {} qubits (max {MAX_SRE_QUBITS})",
                self.n
            )));
        }
        let d = self.amps.len();
        let per_x: Vec<Vec<f64>> = (0..d)
            .into_par_iter()
            .map(|x| {
                let mut w: Vec<C64> = (0..d).map(|i| self.amps[i ^ x].conj() * self.amps[i]).collect();
                walsh_hadamard(&mut w);
                let sq: Vec<f64> = w.iter().map(|c| c.norm_sqr()).collect();
                indices.iter().map(|&n| pairwise_sum(&sq.iter().map(|s| s.powi(n as i32)).collect::<Vec<_>>())).collect()
            })
            .collect();
        Ok((0..indices.len())
            .map(|k| pairwise_sum(&per_x.iter().map(|v| v[k]).collect::<Vec<_>>()))
            .collect())
    }

    /// Exact `m_n` and `M_n` by exhaustive enumeration.
    pub fn exact_sre(&self, n: usize) -> Result<Sre> {
        if n < 2 {
            return Err(Error::Unsupported(format!("Rényi index {n}")));
        }
        let sum = self.pauli_moment_sums(&[n])?[0];
        let d = self.amps.len() as f64;
        let linear = sum / d.powi(n as i32);
        let entropy = linear.ln() / (1.0 - n as f64) - d.ln();
        Ok(Sre {
            index: n,
            linear,
            entropy,
        })
    }

    /// Amplitudes as a `2^cut × 2^{N-cut}` matrix.
    fn cut_matrix(&self, cut: usize) -> Result<DMatrix<C64>> {
        if cut == 0 || cut >= self.n {
            return Err(Error::Validation(format!("cut {cut} for {} qubits", self.n)));
        }
        let da = 1usize << cut;
        let db = 1usize << (self.n - cut);
        Ok(DMatrix::from_row_slice(da, db, &self.amps))
    }

    /// Eigenvalues of the reduced density matrix of the first `cut` qubits
    /// (computed on the smaller side), descending.
    pub fn reduced_spectrum(&self, cut: usize) -> Result<Vec<f64>> {
        let m = self.cut_matrix(cut)?;
        let rho = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
        let mut ev: Vec<f64> = hermitian_eigenvalues(&rho).into_iter().map(|x| x.max(0.0)).collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(ev)
    }

    /// Von Neumann entropy (nats) between qubits `[0, cut)` and the rest.
    pub fn entanglement_entropy(&self, cut: usize) -> Result<f64> {
        Ok(shannon_entropy(self.reduced_spectrum(cut)?))
    }

    /// Entropies at every cut `1..N`.
    pub fn entropy_profile(&self) -> Result<Vec<f64>> {
        (1..self.n).map(|c| self.entanglement_entropy(c)).collect()
    }

    pub fn max_entropy(&self) -> Result<f64> {
        Ok(self.entropy_profile()?.into_iter().fold(0.0, f64::max))
    }

    /// `Tr ρ_A²` for `A` = first `subset_size` qubits.
    pub fn purity(&self, subset_size: usize) -> Result<f64> {
        let m = self.cut_matrix(subset_size)?;
        let rho = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
        Ok(rho.iter().map(|c| c.norm_sqr()).sum())
    }

    /// Purity of the first half (`⌊N/2⌋` qubits).
    pub fn half_purity(&self) -> Result<f64> {
        self.purity(self.n / 2)
    }

    /// `|ψ⟩^{⊗k}` as a dense vector of length `d^k`.
    pub fn tensor_power(&self, k: usize) -> Vec<C64> {
        let mut out = vec![ONE];
        for _ in 0..k {
            out = out.iter().flat_map(|a| self.amps.iter().map(move |b| a * b)).collect();
        }
        out
    }
}

/// In-place unnormalized Walsh–Hadamard transform: `out[z] = Σ_i (-1)^{z·i} w[i]`.
pub fn walsh_hadamard(w: &mut [C64]) {
    let n = w.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (w[i], w[i + h]);
                w[i] = a + b;
                w[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Dense unitary of a gate list.
pub fn circuit_unitary(n: usize, circuit: &Circuit) -> Result<ComplexMatrix> {
    check_size(n)?;
    circuit.validate(n)?;
    let d = 1usize << n;
    let mut u = ComplexMatrix::zeros(d, d);
    for c in 0..d {
        let mut amps = vec![ZERO; d];
        amps[c] = ONE;
        let mut s = StateVector { n, amps };
        for &g in &circuit.gates {
            s.apply_gate(g)?;
        }
        for (r, a) in s.amps.iter().enumerate() {
            u[(r, c)] = *a;
        }
    }
    Ok(u)
}

/// `T_π` on `(C^d)^{⊗k}`: `T_π |i_1 … i_k⟩ = |i_{π⁻¹(1)} … i_{π⁻¹(k)}⟩`.
pub fn permutation_operator(d: usize, pi: &Permutation) -> ComplexMatrix {
    let k = pi.degree();
    let dim = d.pow(k as u32);
    let inv = pi.inverse();
    let mut m = ComplexMatrix::zeros(dim, dim);
    let mut digits = vec![0usize; k];
    for col in 0..dim {
        let mut rem = col;
        for slot in (0..k).rev() {
            digits[slot] = rem % d;
            rem /= d;
        }
        let row = (0..k).fold(0, |acc, slot| acc * d + digits[inv.apply(slot)]);
        m[(row, col)] = ONE;
    }
    m
}

/// `Q = d^{-2} Σ_σ σ^{⊗4}` and the symmetric projector `P^{(k)}_symm` on
/// `N ≤ 2` qubits.
pub fn build_q_and_psym(n: usize, k: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if n == 0 || n > 2 || k != 4 {
        return Err(Error::Resource(format!("dense 4-fold objects need N ≤ 2 and k = 4 (got N={n}, k={k})")));
    }
    let d = 1usize << n;
    let dim = d.pow(4);
    let mut q = ComplexMatrix::zeros(dim, dim);
    for p in PauliString::enumerate(n) {
        let s = p.to_dense()?;
        let s2 = s.kronecker(&s);
        q += s2.kronecker(&s2);
    }
    q /= C64::new((d * d) as f64, 0.0);
    let group = SymmetricGroup::new(4)?;
    let mut psym = ComplexMatrix::zeros(dim, dim);
    for pi in group.elements() {
        psym += permutation_operator(d, pi);
    }
    psym /= C64::new(group.order() as f64, 0.0);
    Ok((q, psym))
}

/// Coefficients `(α, β)` of the 4-fold Clifford channel given `m_2 = ‖Π_ψ‖₂²`.
pub fn clifford_4fold_coefficients(d: f64, m2: f64) -> (f64, f64) {
    let den = (d * d - 1.0) * (d + 2.0) * (d + 4.0);
    ((6.0 * d * (d + 3.0) * m2 - 24.0) / den, 24.0 * (1.0 - m2) / den)
}

/// `E[(U†|ψ⟩⟨ψ|U)^{⊗4}]` over the Clifford group.
///
/// With `exact` the average runs over all 24 or 11520 group elements
/// (`N ≤ 2`); otherwise over `samples` uniform draws.
pub fn clifford_channel_4fold(psi: &StateVector, exact: bool, samples: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    let n = psi.num_qubits();
    if n > 2 {
        return Err(Error::Resource(format!("dense 4-fold channel on {n} qubits")));
    }
    let d = psi.dim();
    let dim = d.pow(4);
    let unitaries: Vec<ComplexMatrix> = if exact {
        CliffordGroup::get(n)?.dense().to_vec()
    } else {
        if samples == 0 {
            return Err(Error::Validation("zero samples".into()));
        }
        (0..samples)
            .map(|_| CliffordTableau::random(n, rng).to_dense())
            .collect::<Result<_>>()?
    };
    let count = unitaries.len();
    let acc = unitaries
        .par_iter()
        .fold(
            || ComplexMatrix::zeros(dim, dim),
            |mut acc, u| {
                let mut s = psi.clone();
                s.apply_unitary(&u.adjoint()).expect("dimensions match");
                let v = nalgebra::DVector::from_vec(s.tensor_power(4));
                acc.ger(ONE, &v, &v.conjugate(), ONE);
                acc
            },
        )
        .reduce(|| ComplexMatrix::zeros(dim, dim), |a, b| a + b);
    Ok(acc / C64::new(count as f64, 0.0))
}
