//! Clifford tableaux, uniform sampling and the enumerated one- and
//! two-qubit groups.
//!
//! A tableau stores the forward images `U X_j U†` and `U Z_j U†` as signed
//! Hermitian [`PauliString`]s.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::numeric::{ComplexMatrix, Rng, C64, ZERO};
use crate::pauli::{Pauli, PauliString};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    /// `images[j]` = image of `X_j`, `images[n + j]` = image of `Z_j`.
    images: Vec<PauliString>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let mut images = Vec::with_capacity(2 * n);
        images.extend((0..n).map(|j| PauliString::single(n, j, Pauli::X)));
        images.extend((0..n).map(|j| PauliString::single(n, j, Pauli::Z)));
        CliffordTableau { n, images }
    }

    /// Builds a tableau from generator images, checking hermiticity and the
    /// symplectic relations.
    pub fn from_images(x_images: Vec<PauliString>, z_images: Vec<PauliString>) -> Result<Self> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: z_images.len(),
            });
        }
        let mut images = x_images;
        images.extend(z_images);
        for p in &images {
            if p.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: p.len(),
                });
            }
            if !p.is_hermitian() {
                return Err(Error::Validation(format!("non-Hermitian image {p}")));
            }
        }
        let t = CliffordTableau { n, images };
        if !t.is_symplectic() {
            return Err(Error::Validation("images violate the symplectic relations".into()));
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, j: usize) -> &PauliString {
        &self.images[j]
    }

    pub fn z_image(&self, j: usize) -> &PauliString {
        &self.images[self.n + j]
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for a in 0..2 * n {
            for b in a..2 * n {
                let expect = u32::from(b == a + n && a < n);
                if self.images[a].symplectic_product(&self.images[b]) != expect {
                    return false;
                }
            }
        }
        true
    }

    /// 2n×2n binary matrix; column `c` is the `(x | z)` vector of image `c`.
    pub fn symplectic_matrix(&self) -> Vec<Vec<u8>> {
        let n = self.n;
        let mut m = vec![vec![0u8; 2 * n]; 2 * n];
        for (c, p) in self.images.iter().enumerate() {
            for (r, row) in m.iter_mut().enumerate() {
                row[c] = p.bit_at(r) as u8;
            }
        }
        m
    }

    /// One bit per image: set when the image carries a `-` sign.
    pub fn phase_bits(&self) -> Vec<bool> {
        self.images.iter().map(|p| p.sign() == Some(-1)).collect()
    }

    /// Dedup key: symplectic data plus signs.
    pub fn key(&self) -> Vec<u64> {
        let mut k = Vec::with_capacity(self.images.len() * 3);
        for p in &self.images {
            k.extend_from_slice(p.x_words());
            k.extend_from_slice(p.z_words());
            k.push(p.phase_exponent() as u64);
        }
        k
    }

    /// `U p U†`.
    pub fn conjugate(&self, p: &PauliString) -> Result<PauliString> {
        if p.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        Ok(self.conjugate_unchecked(p))
    }

    fn conjugate_unchecked(&self, p: &PauliString) -> PauliString {
        // i^δ Π_j X_j^{x_j} Z_j^{z_j} -> i^δ Π_j (U X_j U†)^{x_j} (U Z_j U†)^{z_j}
        let mut out = PauliString::identity(self.n).with_phase_exponent(p.phase_exponent());
        for j in 0..self.n {
            if p.x_bit(j) {
                out.mul_assign_unchecked(&self.images[j]);
            }
            if p.z_bit(j) {
                out.mul_assign_unchecked(&self.images[self.n + j]);
            }
        }
        out
    }

    /// `U† p U`.
    pub fn conjugate_dagger(&self, p: &PauliString) -> Result<PauliString> {
        self.inverse().conjugate(p)
    }

    /// Tableau of `V U`, i.e. `self` acts first and `next` second.
    pub fn then(&self, next: &CliffordTableau) -> Result<CliffordTableau> {
        if next.n != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: next.n,
            });
        }
        Ok(CliffordTableau {
            n: self.n,
            images: self.images.iter().map(|p| next.conjugate_unchecked(p)).collect(),
        })
    }

    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        // Preimage of Q has X_k coefficient <Q, U Z_k U†> and Z_k coefficient
        // <Q, U X_k U†>; the sign is then fixed by a forward check.
        let preimage = |q: &PauliString| -> PauliString {
            let xs: Vec<bool> = (0..n).map(|k| q.symplectic_product(&self.images[n + k]) == 1).collect();
            let zs: Vec<bool> = (0..n).map(|k| q.symplectic_product(&self.images[k]) == 1).collect();
            let p = PauliString::from_bits(&xs, &zs).expect("equal lengths");
            if self.conjugate_unchecked(&p).phase_exponent() == q.phase_exponent() {
                p
            } else {
                p.negated()
            }
        };
        let mut images = Vec::with_capacity(2 * n);
        for j in 0..n {
            images.push(preimage(&PauliString::single(n, j, Pauli::X)));
        }
        for j in 0..n {
            images.push(preimage(&PauliString::single(n, j, Pauli::Z)));
        }
        CliffordTableau { n, images }
    }

    /// Appends a gate: the result is `G U`.
    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        if let Some(&q) = gate.qubits().iter().find(|&&q| q >= self.n) {
            return Err(Error::Validation(format!("qubit {q} out of range for {} qubits", self.n)));
        }
        for p in &mut self.images {
            match gate {
                Gate::H(q) => p.conj_h(q),
                Gate::S(q) => p.conj_s(q),
                Gate::Cnot(c, t) => p.conj_cnot(c, t),
                Gate::T(_) => return Err(Error::Unsupported("T is not a Clifford gate".into())),
            }
        }
        Ok(())
    }

    pub fn from_circuit(n: usize, circuit: &Circuit) -> Result<Self> {
        let mut t = CliffordTableau::identity(n);
        for &g in &circuit.gates {
            t.apply_gate(g)?;
        }
        Ok(t)
    }

    /// Uniformly random element of the n-qubit Clifford group (modulo global phase).
    pub fn random(n: usize, rng: &mut Rng) -> Self {
        let mut basis: Vec<PauliString> = CliffordTableau::identity(n).images;
        let mut xs = Vec::with_capacity(n);
        let mut zs = Vec::with_capacity(n);
        let xor = |a: &PauliString, b: &PauliString| a.mul_unchecked(b).unsigned();
        let combo = |basis: &[PauliString], rng: &mut Rng| {
            let mut acc = PauliString::identity(n);
            for v in basis {
                if rng.bit() {
                    acc = xor(&acc, v);
                }
            }
            acc
        };
        for _ in 0..n {
            let a = loop {
                let c = combo(&basis, rng);
                if !c.is_identity_up_to_phase() {
                    break c;
                }
            };
            let mut b = combo(&basis, rng);
            if a.symplectic_product(&b) == 0 {
                let c = basis
                    .iter()
                    .find(|v| a.symplectic_product(v) == 1)
                    .expect("symplectic form is nondegenerate on the remaining span");
                b = xor(&b, c);
            }
            let projected: Vec<PauliString> = basis
                .iter()
                .map(|v| {
                    let mut w = v.clone();
                    if v.symplectic_product(&b) == 1 {
                        w = xor(&w, &a);
                    }
                    if v.symplectic_product(&a) == 1 {
                        w = xor(&w, &b);
                    }
                    w
                })
                .collect();
            basis = reduce_basis(projected);
            debug_assert_eq!(basis.len(), 2 * (n - xs.len() - 1));
            xs.push(a);
            zs.push(b);
        }
        let mut images = xs;
        images.extend(zs);
        for p in &mut images {
            if rng.bit() {
                *p = p.clone().negated();
            }
        }
        CliffordTableau { n, images }
    }

    /// Amplitudes of `U|0…0⟩`, up to a global phase, obtained by projecting
    /// a computational basis vector onto the joint +1 eigenspace of the
    /// stabilizers `U Z_j U†`.
    pub fn stabilizer_amplitudes(&self) -> Result<Vec<C64>> {
        let n = self.n;
        if n > 12 {
            return Err(Error::Resource(format!("dense stabilizer state on {n} qubits")));
        }
        let d = 1usize << n;
        let project = |mut v: Vec<C64>| -> Vec<C64> {
            for j in 0..n {
                let zv = self.images[n + j].apply(&v).expect("sizes match");
                for (a, b) in v.iter_mut().zip(zv) {
                    *a = (*a + b) * 0.5;
                }
            }
            v
        };
        // Some basis vector has overlap at least 1/d with the stabilizer state.
        for i in 0..d {
            let mut e = vec![ZERO; d];
            e[i] = C64::new(1.0, 0.0);
            let v = project(e);
            let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            if norm2 >= 0.5 / d as f64 {
                let s = 1.0 / norm2.sqrt();
                return Ok(v.into_iter().map(|a| a * s).collect());
            }
        }
        Err(Error::NumericalConsistency("empty stabilizer projection".into()))
    }

    /// Dense unitary. Global phase: the first entry of column 0 with
    /// modulus above 1e-9 is made real and positive.
    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        if n > 12 {
            return Err(Error::Resource(format!("dense Clifford on {n} qubits")));
        }
        let d = 1usize << n;
        let state = self.stabilizer_amplitudes()?;
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
        cols.push(state);
        for b in 1..d {
            // highest set bit of b in dense order is qubit n-1-bit
            let bit = usize::BITS as usize - 1 - b.leading_zeros() as usize;
            let qubit = n - 1 - bit;
            let prev = &cols[b ^ (1 << bit)];
            cols.push(self.images[qubit].apply(prev)?);
        }
        let pivot = cols[0]
            .iter()
            .find(|a| a.norm() > 1e-9)
            .copied()
            .expect("nonzero column");
        let fix = pivot.conj() / pivot.norm();
        let mut m = ComplexMatrix::zeros(d, d);
        for (c, col) in cols.iter().enumerate() {
            for (r, a) in col.iter().enumerate() {
                m[(r, c)] = a * fix;
            }
        }
        Ok(m)
    }
}

/// Row-reduced basis of the GF(2) span of `vectors`.
fn reduce_basis(vectors: Vec<PauliString>) -> Vec<PauliString> {
    let mut rows: Vec<(usize, PauliString)> = Vec::new();
    for mut v in vectors {
        for (pivot, r) in &rows {
            if v.bit_at(*pivot) {
                v = v.mul_unchecked(r).unsigned();
            }
        }
        if let Some(pivot) = v.first_set_bit() {
            for (_, r) in rows.iter_mut() {
                if r.bit_at(pivot) {
                    *r = r.mul_unchecked(&v).unsigned();
                }
            }
            rows.push((pivot, v));
        }
    }
    rows.into_iter().map(|(_, r)| r).collect()
}

/// The full Clifford group on one or two qubits, with generating words.
///
/// Elements are ordered by breadth-first discovery from the identity over
/// the generators H, S on each qubit and CNOT in both orientations, so the
/// identity is element 0.
pub struct CliffordGroup {
    n: usize,
    elements: Vec<CliffordTableau>,
    words: Vec<Vec<Gate>>,
    lookup: HashMap<Vec<u64>, usize>,
    dense: OnceLock<Vec<ComplexMatrix>>,
}

static GROUP_1: OnceLock<CliffordGroup> = OnceLock::new();
static GROUP_2: OnceLock<CliffordGroup> = OnceLock::new();

impl CliffordGroup {
    pub fn enumerate(n: usize) -> Result<Self> {
        let generators: Vec<Gate> = match n {
            1 => vec![Gate::H(0), Gate::S(0)],
            2 => vec![Gate::H(0), Gate::H(1), Gate::S(0), Gate::S(1), Gate::Cnot(0, 1), Gate::Cnot(1, 0)],
            _ => return Err(Error::Unsupported(format!("Clifford group enumeration for {n} qubits"))),
        };
        let id = CliffordTableau::identity(n);
        let mut lookup = HashMap::new();
        lookup.insert(id.key(), 0);
        let mut elements = vec![id];
        let mut words: Vec<Vec<Gate>> = vec![Vec::new()];
        let mut head = 0;
        while head < elements.len() {
            for &g in &generators {
                let mut t = elements[head].clone();
                t.apply_gate(g)?;
                let key = t.key();
                if !lookup.contains_key(&key) {
                    lookup.insert(key, elements.len());
                    let mut w = words[head].clone();
                    w.push(g);
                    elements.push(t);
                    words.push(w);
                }
            }
            head += 1;
        }
        Ok(CliffordGroup {
            n,
            elements,
            words,
            lookup,
            dense: OnceLock::new(),
        })
    }

    /// Shared instance for `n ∈ {1, 2}`.
    pub fn get(n: usize) -> Result<&'static CliffordGroup> {
        let cell = match n {
            1 => &GROUP_1,
            2 => &GROUP_2,
            _ => return Err(Error::Unsupported(format!("Clifford group enumeration for {n} qubits"))),
        };
        if let Some(g) = cell.get() {
            return Ok(g);
        }
        let g = CliffordGroup::enumerate(n)?;
        Ok(cell.get_or_init(|| g))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[CliffordTableau] {
        &self.elements
    }

    pub fn word(&self, i: usize) -> &[Gate] {
        &self.words[i]
    }

    pub fn index_of(&self, t: &CliffordTableau) -> Option<usize> {
        self.lookup.get(&t.key()).copied()
    }

    /// Dense unitaries in element order (phase convention of [`CliffordTableau::to_dense`]).
    pub fn dense(&self) -> &[ComplexMatrix] {
        self.dense.get_or_init(|| {
            self.elements
                .iter()
                .map(|t| t.to_dense().expect("n <= 2"))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{unitarity_defect, Rng};
    use proptest::prelude::*;

    fn dense_conj(u: &ComplexMatrix, p: &PauliString) -> ComplexMatrix {
        u * p.to_dense().unwrap() * u.adjoint()
    }

    #[test]
    fn cnot_maps_x_control_to_xx() {
        let t = CliffordTableau::from_circuit(2, &Circuit::new(vec![Gate::Cnot(0, 1)])).unwrap();
        let img = t.conjugate(&"XI".parse().unwrap()).unwrap();
        assert_eq!(img.to_string(), "+XX");
        let img = t.conjugate(&"IZ".parse().unwrap()).unwrap();
        assert_eq!(img.to_string(), "+ZZ");
    }

    #[test]
    fn identity_conjugation_is_trivial() {
        let t = CliffordTableau::identity(3);
        for s in ["XYZ", "-iZZI", "+IIY"] {
            let p: PauliString = s.parse().unwrap();
            assert_eq!(t.conjugate(&p).unwrap(), p);
        }
    }

    #[test]
    fn single_qubit_rules() {
        let h = CliffordTableau::from_circuit(1, &Circuit::new(vec![Gate::H(0)])).unwrap();
        assert_eq!(h.conjugate(&"Y".parse().unwrap()).unwrap().to_string(), "-Y");
        let s = CliffordTableau::from_circuit(1, &Circuit::new(vec![Gate::S(0)])).unwrap();
        assert_eq!(s.conjugate(&"X".parse().unwrap()).unwrap().to_string(), "+Y");
        assert_eq!(s.conjugate(&"Y".parse().unwrap()).unwrap().to_string(), "-X");
    }

    #[test]
    fn gate_conjugation_matches_dense_gates() {
        let cases = [(1, Gate::H(0)), (1, Gate::S(0)), (2, Gate::Cnot(0, 1)), (2, Gate::Cnot(1, 0))];
        for (n, g) in cases {
            let t = CliffordTableau::from_circuit(n, &Circuit::new(vec![g])).unwrap();
            let u = crate::statevector::circuit_unitary(n, &Circuit::new(vec![g])).unwrap();
            for p in PauliString::enumerate(n) {
                let lhs = dense_conj(&u, &p);
                let rhs = t.conjugate(&p).unwrap().to_dense().unwrap();
                assert!((lhs - rhs).norm() < 1e-12, "{g:?} {p}");
            }
        }
    }

    #[test]
    fn hadamard_dense_is_standard() {
        let t = CliffordTableau::from_circuit(1, &Circuit::new(vec![Gate::H(0)])).unwrap();
        let u = t.to_dense().unwrap();
        assert!((u - Gate::H(0).matrix()).norm() < 1e-12);
        let id = CliffordTableau::identity(3).to_dense().unwrap();
        assert!((id - ComplexMatrix::identity(8, 8)).norm() < 1e-12);
    }

    #[test]
    fn to_dense_too_large() {
        assert!(matches!(CliffordTableau::identity(13).to_dense(), Err(Error::Resource(_))));
    }

    #[test]
    fn random_two_qubit_dense_conjugation_matches() {
        let mut rng = Rng::new(5);
        for _ in 0..50 {
            let t = CliffordTableau::random(2, &mut rng);
            let u = t.to_dense().unwrap();
            assert!(unitarity_defect(&u) < 1e-12);
            for p in PauliString::enumerate(2) {
                let lhs = dense_conj(&u, &p);
                let rhs = t.conjugate(&p).unwrap().to_dense().unwrap();
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn group_orders() {
        let g1 = CliffordGroup::get(1).unwrap();
        assert_eq!(g1.len(), 24);
        let g2 = CliffordGroup::get(2).unwrap();
        assert_eq!(g2.len(), 11520);
        assert_eq!(g2.index_of(&CliffordTableau::identity(2)), Some(0));
        assert!(matches!(CliffordGroup::get(3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn words_reproduce_elements() {
        let g2 = CliffordGroup::get(2).unwrap();
        for i in (0..g2.len()).step_by(97) {
            let t = CliffordTableau::from_circuit(2, &Circuit::new(g2.word(i).to_vec())).unwrap();
            assert_eq!(&t, &g2.elements()[i]);
        }
    }

    #[test]
    fn two_qubit_group_is_closed() {
        let g2 = CliffordGroup::get(2).unwrap();
        let mut rng = Rng::new(8);
        for _ in 0..10_000 {
            let a = &g2.elements()[rng.below(g2.len())];
            let b = &g2.elements()[rng.below(g2.len())];
            assert!(g2.index_of(&a.then(b).unwrap()).is_some());
        }
    }

    #[test]
    fn one_qubit_sampling_is_uniform() {
        let g1 = CliffordGroup::get(1).unwrap();
        let mut rng = Rng::new(77);
        let samples = 100_000;
        let mut counts = [0usize; 24];
        for _ in 0..samples {
            let t = CliffordTableau::random(1, &mut rng);
            counts[g1.index_of(&t).expect("sample is a group element")] += 1;
        }
        let p = 1.0 / 24.0;
        let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
        for c in counts {
            assert!((c as f64 - samples as f64 * p).abs() < 5.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn two_qubit_sampling_hits_group() {
        let g2 = CliffordGroup::get(2).unwrap();
        let mut rng = Rng::new(78);
        for _ in 0..2000 {
            assert!(g2.index_of(&CliffordTableau::random(2, &mut rng)).is_some());
        }
    }

    #[test]
    fn from_images_rejects_bad_relations() {
        let x: Vec<PauliString> = vec!["X".parse().unwrap()];
        let z: Vec<PauliString> = vec!["X".parse().unwrap()];
        assert!(CliffordTableau::from_images(x, z).is_err());
        let x: Vec<PauliString> = vec!["iX".parse().unwrap()];
        let z: Vec<PauliString> = vec!["Z".parse().unwrap()];
        assert!(CliffordTableau::from_images(x, z).is_err());
    }

    #[test]
    fn symplectic_matrix_of_identity() {
        let m = CliffordTableau::identity(2).symplectic_matrix();
        for (r, row) in m.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                assert_eq!(v, u8::from(r == c));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sampled_tableaux_are_symplectic(seed in any::<u64>(), n in 1usize..40) {
            let t = CliffordTableau::random(n, &mut Rng::new(seed));
            prop_assert!(t.is_symplectic());
            prop_assert!(t.images().iter().all(|p| p.is_hermitian()));
        }

        #[test]
        fn inverse_round_trips(seed in any::<u64>(), n in 1usize..30) {
            let mut rng = Rng::new(seed);
            let t = CliffordTableau::random(n, &mut rng);
            prop_assert_eq!(t.then(&t.inverse()).unwrap(), CliffordTableau::identity(n));
            prop_assert_eq!(t.inverse().then(&t).unwrap(), CliffordTableau::identity(n));
        }

        #[test]
        fn conjugation_preserves_commutation(seed in any::<u64>(), n in 1usize..20) {
            let mut rng = Rng::new(seed);
            let t = CliffordTableau::random(n, &mut rng);
            let letters = |rng: &mut Rng| -> PauliString {
                let ps: Vec<Pauli> = (0..n).map(|_| Pauli::ALL[rng.below(4)]).collect();
                PauliString::from_paulis(&ps)
            };
            let a = letters(&mut rng);
            let b = letters(&mut rng);
            let ta = t.conjugate(&a).unwrap();
            let tb = t.conjugate(&b).unwrap();
            prop_assert_eq!(a.symplectic_product(&b), ta.symplectic_product(&tb));
            prop_assert!(ta.is_hermitian());
            // conjugation is a homomorphism
            let tab = t.conjugate(&a.multiply(&b).unwrap()).unwrap();
            prop_assert_eq!(tab, ta.multiply(&tb).unwrap());
        }

        #[test]
        fn composition_matches_dense(seed in any::<u64>()) {
            let mut rng = Rng::new(seed);
            let a = CliffordTableau::random(3, &mut rng);
            let b = CliffordTableau::random(3, &mut rng);
            let ab = a.then(&b).unwrap().to_dense().unwrap();
            let dense = b.to_dense().unwrap() * a.to_dense().unwrap();
            // equal up to a global phase
            let (r, c) = (0..64).map(|i| (i % 8, i / 8)).find(|&(r, c)| ab[(r, c)].norm() > 1e-6).unwrap();
            let phase = dense[(r, c)] / ab[(r, c)];
            prop_assert!((phase.norm() - 1.0).abs() < 1e-10);
            prop_assert!((ab * phase - dense).norm() < 1e-10);
        }
    }
}
