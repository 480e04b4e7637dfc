//! Open-boundary matrix product states.
//!
//! Site `i` holds a tensor `A_i[a][s][b]` of shape `(χ_i, 2, χ_{i+1})`
//! (bond index `i` sits to the left of site `i`, so `χ_0 = χ_N = 1`).
//! Tensors are stored as `χ_i × 2χ_{i+1}` matrices with column index
//! `s·χ_{i+1} + b`. The state keeps an orthogonality center: sites left of
//! it are left-normalized, sites right of it right-normalized.

use crate::error::{Error, Result};
use crate::numeric::{haar_unitary, shannon_entropy, svd_truncate, unitarity_defect, ComplexMatrix, Rng, C64, ONE, ZERO};
use crate::pauli::PauliString;
use crate::statevector::{StateVector, MAX_QUBITS};

/// Bond dimensions `χ_0, …, χ_N` of a random MPS.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BondProfile {
    chi_max: usize,
    dims: Vec<usize>,
}

fn check_chi(n: usize, chi_max: usize, max_exp: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::config("n", "need at least one site"));
    }
    if chi_max == 0 || !chi_max.is_power_of_two() {
        return Err(Error::config("chi_max", format!("{chi_max} is not a power of two")));
    }
    if max_exp < usize::BITS as usize - 1 && chi_max > 1usize << max_exp {
        return Err(Error::config(
            "chi_max",
            format!("{chi_max} exceeds 2^{max_exp} = {} for N = {n}", 1usize << max_exp),
        ));
    }
    Ok(())
}

fn pow2(e: usize) -> usize {
    if e >= 63 {
        usize::MAX
    } else {
        1usize << e
    }
}

impl BondProfile {
    /// Staircase profile that shrinks only toward the right edge:
    /// `χ_0 = 1`, `χ_i = min(2^{N−i}, χ_max)` for `i ≥ 1`, with
    /// `χ_max ≤ 2^{N−1}`. At `χ_max = 2^{N−1}` the first site unitary acts
    /// on all qubits and the ensemble is exactly Haar.
    pub fn new(n: usize, chi_max: usize) -> Result<Self> {
        check_chi(n, chi_max, n.saturating_sub(1))?;
        let dims = (0..=n).map(|i| if i == 0 { 1 } else { pow2(n - i).min(chi_max) }).collect();
        Ok(BondProfile { chi_max, dims })
    }

    /// Minimal symmetric profile `χ_i = min(2^i, 2^{N−i}, χ_max)` with
    /// `χ_max ≤ 2^⌊N/2⌋`.
    pub fn symmetric(n: usize, chi_max: usize) -> Result<Self> {
        check_chi(n, chi_max, n / 2)?;
        let dims = (0..=n).map(|i| pow2(i).min(pow2(n - i)).min(chi_max)).collect();
        Ok(BondProfile { chi_max, dims })
    }

    pub fn chi_max(&self) -> usize {
        self.chi_max
    }

    /// `χ_0, …, χ_N`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_sites(&self) -> usize {
        self.dims.len() - 1
    }
}

/// Per-bond von Neumann entropies (nats) for bonds `1..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementProfile {
    pub entropies: Vec<f64>,
    pub max_entropy: f64,
}

#[derive(Clone, Debug)]
pub struct MpsState {
    tensors: Vec<ComplexMatrix>,
    dims: Vec<usize>,
    center: usize,
    discarded_weight: f64,
}

fn left_grouped(t: &ComplexMatrix, l: usize, r: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(2 * l, r, |row, b| t[(row / 2, (row % 2) * r + b)])
}

fn from_left_grouped(m: &ComplexMatrix, l: usize, r: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(l, 2 * r, |a, col| m[(2 * a + col / r, col % r)])
}

impl MpsState {
    /// Validates shapes and wraps tensors. The orthogonality center is taken
    /// as given, not checked.
    pub fn from_tensors(tensors: Vec<ComplexMatrix>, center: usize) -> Result<Self> {
        let n = tensors.len();
        if n == 0 {
            return Err(Error::InvalidDimension("MPS with no sites".into()));
        }
        if center >= n {
            return Err(Error::Validation(format!("center {center} outside {n} sites")));
        }
        let mut dims = Vec::with_capacity(n + 1);
        dims.push(1);
        for (i, t) in tensors.iter().enumerate() {
            let l = dims[i];
            if t.nrows() != l || t.ncols() % 2 != 0 || t.ncols() == 0 {
                return Err(Error::InvalidDimension(format!(
                    "site {i}: tensor {}x{} does not fit left bond {l}",
                    t.nrows(),
                    t.ncols()
                )));
            }
            if t.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Validation(format!("site {i}: non-finite entries")));
            }
            dims.push(t.ncols() / 2);
        }
        if dims[n] != 1 {
            return Err(Error::InvalidDimension(format!("right boundary bond {} != 1", dims[n])));
        }
        Ok(MpsState {
            tensors,
            dims,
            center,
            discarded_weight: 0.0,
        })
    }

    /// Staircase random MPS on the default [`BondProfile`].
    pub fn sample_rmps_obc(n: usize, chi_max: usize, rng: &mut Rng) -> Result<Self> {
        Self::sample_rmps(&BondProfile::new(n, chi_max)?, rng)
    }

    /// Site `i` uses the first `χ_i` rows of a Haar unitary of size
    /// `2χ_{i+1}`, so `A[a][s][b] = U[a][s·χ_{i+1} + b]`.
    pub fn sample_rmps(profile: &BondProfile, rng: &mut Rng) -> Result<Self> {
        let dims = profile.dims().to_vec();
        let n = profile.num_sites();
        let mut tensors = Vec::with_capacity(n);
        for i in 0..n {
            let (l, r) = (dims[i], dims[i + 1]);
            let u = haar_unitary(2 * r, rng)?;
            tensors.push(u.rows(0, l).into_owned());
        }
        Ok(MpsState {
            tensors,
            dims,
            center: 0,
            discarded_weight: 0.0,
        })
    }

    /// Product state `⊗_j (a_j|0⟩ + b_j|1⟩)` (normalized per site).
    pub fn product(qubits: &[[C64; 2]]) -> Result<Self> {
        if qubits.is_empty() {
            return Err(Error::InvalidDimension("MPS with no sites".into()));
        }
        let tensors = qubits
            .iter()
            .map(|q| {
                let norm = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
                ComplexMatrix::from_row_slice(1, 2, &[q[0] / norm, q[1] / norm])
            })
            .collect();
        MpsState::from_tensors(tensors, 0)
    }

    pub fn zero(n: usize) -> Result<Self> {
        MpsState::product(&vec![[ONE, ZERO]; n])
    }

    /// Exact MPS of a dense state (right-to-left SVD sweep, zero singular
    /// values dropped).
    pub fn from_statevector(state: &StateVector) -> Result<Self> {
        let n = state.num_qubits();
        // rest: rows = physical prefix index, cols = current right bond
        let mut rest = ComplexMatrix::from_column_slice(state.dim(), 1, state.amplitudes());
        let mut tensors = vec![ComplexMatrix::zeros(0, 0); n];
        for i in (0..n).rev() {
            let k = rest.ncols();
            let rows = rest.nrows() / 2;
            let m = ComplexMatrix::from_fn(rows, 2 * k, |p, c| rest[(2 * p + c / k, c % k)]);
            if i == 0 {
                tensors[0] = m;
                break;
            }
            let svd = svd_truncate(&m, usize::MAX, 1e-14)?;
            if svd.rank() == 0 {
                return Err(Error::Validation("zero state".into()));
            }
            let mut us = svd.u.clone();
            for (j, s) in svd.s.iter().enumerate() {
                us.column_mut(j).scale_mut(*s);
            }
            tensors[i] = svd.v;
            rest = us;
        }
        MpsState::from_tensors(tensors, 0)
    }

    pub fn num_sites(&self) -> usize {
        self.tensors.len()
    }

    /// `χ_0, …, χ_N`.
    pub fn bond_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn tensors(&self) -> &[ComplexMatrix] {
        &self.tensors
    }

    pub fn center(&self) -> usize {
        self.center
    }

    /// Accumulated squared weight dropped by truncations.
    pub fn discarded_weight(&self) -> f64 {
        self.discarded_weight
    }

    /// `A[a][s][b]`.
    pub fn entry(&self, site: usize, a: usize, s: usize, b: usize) -> C64 {
        self.tensors[site][(a, s * self.dims[site + 1] + b)]
    }

    /// Largest `‖A A† − 1‖` over sites right of the center.
    pub fn right_normalization_defect(&self) -> f64 {
        (self.center + 1..self.num_sites())
            .map(|i| {
                let t = &self.tensors[i];
                let g = t * t.adjoint();
                (g - ComplexMatrix::identity(t.nrows(), t.nrows())).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Largest `‖A†A − 1‖` (left-grouped) over sites left of the center.
    pub fn left_normalization_defect(&self) -> f64 {
        (0..self.center)
            .map(|i| {
                let m = left_grouped(&self.tensors[i], self.dims[i], self.dims[i + 1]);
                (m.adjoint() * &m - ComplexMatrix::identity(m.ncols(), m.ncols())).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `⟨φ|φ⟩` by full transfer contraction.
    pub fn norm_sqr(&self) -> f64 {
        self.overlap_env(None).re
    }

    fn overlap_env(&self, p: Option<&PauliString>) -> C64 {
        let mut env = ComplexMatrix::from_element(1, 1, ONE);
        for (i, t) in self.tensors.iter().enumerate() {
            let r = self.dims[i + 1];
            let op = p.map(|p| p.local_matrix(i));
            // M_s = env · A^s  (l' × r), then new_env = Σ_{s,s'} conj(A^s)ᵀ O[s][s'] M_{s'}
            let mut new_env = ComplexMatrix::zeros(r, r);
            let blocks: Vec<ComplexMatrix> = (0..2).map(|s| t.columns(s * r, r).into_owned()).collect();
            let m: Vec<ComplexMatrix> = blocks.iter().map(|b| &env * b).collect();
            for s in 0..2 {
                let bra = blocks[s].adjoint();
                for sp in 0..2 {
                    let o = match &op {
                        Some(o) => o[s][sp],
                        None => if s == sp { ONE } else { ZERO },
                    };
                    if o == ZERO {
                        continue;
                    }
                    new_env += (&bra * &m[sp]) * o;
                }
            }
            env = new_env;
        }
        let phase = p.map(|p| p.phase()).unwrap_or(ONE);
        env[(0, 0)] * phase
    }

    /// `⟨φ|σ|φ⟩` in `O(N χ³)`.
    pub fn pauli_expectation(&self, p: &PauliString) -> Result<f64> {
        if p.len() != self.num_sites() {
            return Err(Error::LengthMismatch {
                expected: self.num_sites(),
                found: p.len(),
            });
        }
        let v = self.overlap_env(Some(p));
        if v.im.abs() > 1e-8 {
            return Err(Error::NumericalConsistency(format!("imaginary residue {} in ⟨{p}⟩", v.im)));
        }
        Ok(v.re)
    }

    fn shift_center_right(&mut self) {
        let i = self.center;
        let (l, r) = (self.dims[i], self.dims[i + 1]);
        let m = left_grouped(&self.tensors[i], l, r);
        let qr = m.qr();
        let (q, rmat) = (qr.q(), qr.r());
        let k = q.ncols();
        self.tensors[i] = from_left_grouped(&q, l, k);
        let next = &self.tensors[i + 1];
        self.tensors[i + 1] = rmat * next;
        self.dims[i + 1] = k;
        self.center = i + 1;
    }

    fn shift_center_left(&mut self) {
        let i = self.center;
        let t = self.tensors[i].adjoint();
        let qr = t.qr();
        let (q, rmat) = (qr.q(), qr.r());
        let k = q.ncols();
        self.tensors[i] = q.adjoint();
        let prev = &self.tensors[i - 1];
        let r_prev = self.dims[i];
        // prev has columns s·r_prev + b; contract b with R†
        let l_prev = self.dims[i - 1];
        let rd = rmat.adjoint();
        let mut out = ComplexMatrix::zeros(l_prev, 2 * k);
        for s in 0..2 {
            let block = prev.columns(s * r_prev, r_prev) * &rd;
            out.columns_mut(s * k, k).copy_from(&block);
        }
        self.tensors[i - 1] = out;
        self.dims[i] = k;
        self.center = i - 1;
    }

    /// Moves the orthogonality center to `site`.
    pub fn canonicalize_to(&mut self, site: usize) -> Result<()> {
        if site >= self.num_sites() {
            return Err(Error::Validation(format!("site {site} outside {} sites", self.num_sites())));
        }
        while self.center < site {
            self.shift_center_right();
        }
        while self.center > site {
            self.shift_center_left();
        }
        Ok(())
    }

    /// Applies a 4x4 gate to sites `(site, site+1)` (local index
    /// `2·s_site + s_{site+1}`), truncating the new bond to `chi_max`
    /// singular values above `cutoff` and renormalizing. Returns the
    /// discarded weight of this step.
    pub fn apply_two_qubit_gate(&mut self, gate: &ComplexMatrix, site: usize, chi_max: usize, cutoff: f64) -> Result<f64> {
        if gate.shape() != (4, 4) {
            return Err(Error::InvalidDimension(format!("{:?} two-qubit gate", gate.shape())));
        }
        if unitarity_defect(gate) > 1e-8 {
            return Err(Error::Validation("gate is not unitary".into()));
        }
        if site + 1 >= self.num_sites() {
            return Err(Error::Validation(format!("gate at site {site} needs site {} to exist", site + 1)));
        }
        self.canonicalize_to(site)?;
        let (l, m, r) = (self.dims[site], self.dims[site + 1], self.dims[site + 2]);
        let a = &self.tensors[site];
        let b = &self.tensors[site + 1];
        // theta[(a, s1)][(s2, c)] = Σ_{s1', s2'} G[(s1 s2), (s1' s2')] Σ_k A[a][s1'][k] B[k][s2'][c]
        let mut pair = [[ComplexMatrix::zeros(l, r), ComplexMatrix::zeros(l, r)], [ComplexMatrix::zeros(l, r), ComplexMatrix::zeros(l, r)]];
        for (s1, row) in pair.iter_mut().enumerate() {
            for (s2, slot) in row.iter_mut().enumerate() {
                *slot = a.columns(s1 * m, m) * b.columns(s2 * r, r);
            }
        }
        let mut theta = ComplexMatrix::zeros(2 * l, 2 * r);
        for s1 in 0..2 {
            for s2 in 0..2 {
                let mut acc = ComplexMatrix::zeros(l, r);
                for t1 in 0..2 {
                    for t2 in 0..2 {
                        let g = gate[(2 * s1 + s2, 2 * t1 + t2)];
                        if g != ZERO {
                            acc += &pair[t1][t2] * g;
                        }
                    }
                }
                for x in 0..l {
                    for c in 0..r {
                        theta[(2 * x + s1, s2 * r + c)] = acc[(x, c)];
                    }
                }
            }
        }
        let tr = svd_truncate(&theta, chi_max, cutoff)?;
        if tr.rank() == 0 {
            return Err(Error::NumericalConsistency("two-site block vanished".into()));
        }
        let kept: f64 = tr.s.iter().map(|s| s * s).sum();
        let k = tr.rank();
        self.tensors[site] = from_left_grouped(&tr.u, l, k);
        let scale = 1.0 / kept.sqrt();
        let mut sv = tr.v.clone();
        for (j, s) in tr.s.iter().enumerate() {
            sv.row_mut(j).scale_mut(s * scale);
        }
        self.tensors[site + 1] = sv;
        self.dims[site + 1] = k;
        self.center = site + 1;
        let discarded = tr.discarded_weight / (kept + tr.discarded_weight);
        self.discarded_weight += discarded;
        Ok(discarded)
    }

    /// Schmidt values at every bond `1..N`, from one left-to-right sweep
    /// on a copy.
    pub fn schmidt_spectra(&self) -> Result<Vec<Vec<f64>>> {
        let mut work = self.clone();
        work.canonicalize_to(0)?;
        let n = work.num_sites();
        let mut out = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n.saturating_sub(1) {
            let m = left_grouped(&work.tensors[i], work.dims[i], work.dims[i + 1]);
            let s = m.singular_values();
            let mut s: Vec<f64> = s.iter().cloned().collect();
            s.sort_by(|a, b| b.total_cmp(a));
            out.push(s);
            work.shift_center_right();
        }
        Ok(out)
    }

    fn check_normalized(&self) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > 1e-8 {
            return Err(Error::Validation(format!("state is not normalized (norm² = {n2})")));
        }
        Ok(())
    }

    /// `Tr ρ_A²` for `A` = sites `[0, cut)`.
    pub fn bipartition_purity(&self, cut: usize) -> Result<f64> {
        if cut == 0 || cut >= self.num_sites() {
            return Err(Error::Validation(format!("cut {cut} for {} sites", self.num_sites())));
        }
        self.check_normalized()?;
        let mut work = self.clone();
        work.canonicalize_to(cut - 1)?;
        let m = left_grouped(&work.tensors[cut - 1], work.dims[cut - 1], work.dims[cut]);
        Ok(m.singular_values().iter().map(|s| s.powi(4)).sum())
    }

    pub fn entanglement_profile(&self) -> Result<EntanglementProfile> {
        self.check_normalized()?;
        let entropies: Vec<f64> = self
            .schmidt_spectra()?
            .into_iter()
            .map(|s| shannon_entropy(s.into_iter().map(|x| x * x)))
            .collect();
        let max_entropy = entropies.iter().cloned().fold(0.0, f64::max);
        Ok(EntanglementProfile { entropies, max_entropy })
    }

    /// Dense amplitudes (qubit 0 most significant).
    pub fn to_statevector(&self) -> Result<StateVector> {
        let n = self.num_sites();
        if n > MAX_QUBITS {
            return Err(Error::Resource(format!("dense conversion of {n} sites")));
        }
        // rows: physical prefix index, cols: current right bond
        let mut acc = ComplexMatrix::from_element(1, 1, ONE);
        for (i, t) in self.tensors.iter().enumerate() {
            let r = self.dims[i + 1];
            let rows = acc.nrows();
            let mut next = ComplexMatrix::zeros(rows * 2, r);
            for s in 0..2 {
                let block = &acc * t.columns(s * r, r);
                for p in 0..rows {
                    next.row_mut(2 * p + s).copy_from(&block.row(p));
                }
            }
            acc = next;
        }
        StateVector::from_unnormalized(acc.column(0).iter().cloned().collect())
    }
}
