//! Pauli strings in bit-pair encoding with exact phase tracking.
//!
//! A string on `n` qubits is stored as two bit vectors `x`, `z` and a phase
//! exponent `δ ∈ Z_4`; the operator it denotes is
//!
//! ```text
//!     P = i^δ · X^{x_0} Z^{z_0} ⊗ X^{x_1} Z^{z_1} ⊗ … ⊗ X^{x_{n-1}} Z^{z_{n-1}}
//! ```
//!
//! so `Y = i·XZ` is `(x=1, z=1, δ=1)`. `P` is Hermitian exactly when
//! `δ + |x ∧ z|` is even; the Hermitian string with sign `s` therefore has
//! `δ = |x ∧ z| + (s < 0 ? 2 : 0)`. Text form is an optional sign/phase
//! prefix (`+`, `-`, `i`, `+i`, `-i`) followed by one letter per qubit,
//! where letters always mean the Hermitian single-qubit Paulis.
//!
//! Dense conventions: qubit `j` is bit `n-1-j` of a computational basis
//! index (qubit 0 is the most significant).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{ComplexMatrix, C64, I, ONE, ZERO};

const WORD: usize = 64;

fn words_for(n: usize) -> usize {
    n.div_ceil(WORD).max(1)
}

/// Single-qubit Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn xz(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_xz(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Hermitian 2x2 matrix.
    pub fn matrix(self) -> ComplexMatrix {
        match self {
            Pauli::I => ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
            Pauli::X => ComplexMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            Pauli::Y => ComplexMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
            Pauli::Z => ComplexMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            n,
            x: vec![0; words_for(n)],
            z: vec![0; words_for(n)],
            phase: 0,
        }
    }

    /// Hermitian string with a `+` sign from per-qubit labels.
    pub fn from_paulis(paulis: &[Pauli]) -> Self {
        let mut p = PauliString::identity(paulis.len());
        for (j, &q) in paulis.iter().enumerate() {
            let (x, z) = q.xz();
            p.set_xz(j, x, z);
        }
        p.phase = (p.xz_overlap() % 4) as u8;
        p
    }

    /// Hermitian `+` string from bit vectors.
    pub fn from_bits(x: &[bool], z: &[bool]) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                found: z.len(),
            });
        }
        let mut p = PauliString::identity(x.len());
        for j in 0..x.len() {
            p.set_xz(j, x[j], z[j]);
        }
        p.phase = (p.xz_overlap() % 4) as u8;
        Ok(p)
    }

    /// Hermitian `+` string from dense index masks (qubit `j` ↔ bit `n-1-j`).
    pub fn from_masks(n: usize, x_mask: u64, z_mask: u64) -> Self {
        assert!(n <= 64);
        let mut p = PauliString::identity(n);
        for j in 0..n {
            let b = n - 1 - j;
            p.set_xz(j, (x_mask >> b) & 1 == 1, (z_mask >> b) & 1 == 1);
        }
        p.phase = (p.xz_overlap() % 4) as u8;
        p
    }

    /// `P_j` on qubit `j`, identity elsewhere.
    pub fn single(n: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut p = PauliString::identity(n);
        let (x, z) = pauli.xz();
        p.set_xz(qubit, x, z);
        p.phase = (p.xz_overlap() % 4) as u8;
        p
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Exponent `δ` of the `i^δ` prefactor.
    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    pub fn phase(&self) -> C64 {
        match self.phase & 3 {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        }
    }

    pub fn with_phase_exponent(mut self, delta: u8) -> Self {
        self.phase = delta & 3;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = (self.phase + 2) & 3;
        self
    }

    pub fn x_bit(&self, j: usize) -> bool {
        (self.x[j / WORD] >> (j % WORD)) & 1 == 1
    }

    pub fn z_bit(&self, j: usize) -> bool {
        (self.z[j / WORD] >> (j % WORD)) & 1 == 1
    }

    fn set_xz(&mut self, j: usize, x: bool, z: bool) {
        let (w, b) = (j / WORD, j % WORD);
        self.x[w] = (self.x[w] & !(1 << b)) | ((x as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((z as u64) << b);
    }

    pub fn get(&self, j: usize) -> Pauli {
        Pauli::from_xz(self.x_bit(j), self.z_bit(j))
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    fn xz_overlap(&self) -> u32 {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn is_hermitian(&self) -> bool {
        (self.phase as u32 + self.xz_overlap()) % 2 == 0
    }

    /// `+1` / `-1` for Hermitian strings, `None` otherwise.
    pub fn sign(&self) -> Option<i8> {
        if !self.is_hermitian() {
            return None;
        }
        let rel = (self.phase as u32 + 4 - self.xz_overlap() % 4) % 4;
        Some(if rel == 0 { 1 } else { -1 })
    }

    /// The same x/z content as a `+` Hermitian string.
    pub fn unsigned(&self) -> PauliString {
        let mut p = self.clone();
        p.phase = (p.xz_overlap() % 4) as u8;
        p
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Operator product `self · other`.
    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> PauliString {
        // X^a Z^b X^c Z^d = (-1)^{b·c} X^{a+c} Z^{b+d}
        let mut swaps = 0u32;
        let mut x = Vec::with_capacity(self.x.len());
        let mut z = Vec::with_capacity(self.z.len());
        for w in 0..self.x.len() {
            swaps += (self.z[w] & other.x[w]).count_ones();
            x.push(self.x[w] ^ other.x[w]);
            z.push(self.z[w] ^ other.z[w]);
        }
        let phase = ((self.phase as u32 + other.phase as u32 + 2 * swaps) % 4) as u8;
        PauliString {
            n: self.n,
            x,
            z,
            phase,
        }
    }

    /// In-place right multiplication, lengths assumed equal.
    pub(crate) fn mul_assign_unchecked(&mut self, other: &PauliString) {
        let mut swaps = 0u32;
        for w in 0..self.x.len() {
            swaps += (self.z[w] & other.x[w]).count_ones();
            self.x[w] ^= other.x[w];
            self.z[w] ^= other.z[w];
        }
        self.phase = ((self.phase as u32 + other.phase as u32 + 2 * swaps) % 4) as u8;
    }

    /// `H_q P H_q`.
    pub(crate) fn conj_h(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        // X^x Z^z -> Z^x X^z = (-1)^{xz} X^z Z^x
        if x && z {
            self.phase = (self.phase + 2) & 3;
        }
        self.set_xz(q, z, x);
    }

    /// `S_q P S_q†` with `S X S† = Y`.
    pub(crate) fn conj_s(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x {
            self.phase = (self.phase + 1) & 3;
        }
        self.set_xz(q, x, z ^ x);
    }

    /// `CNOT P CNOT` with control `c`, target `t`.
    pub(crate) fn conj_cnot(&mut self, c: usize, t: usize) {
        let (xc, zc) = (self.x_bit(c), self.z_bit(c));
        let (xt, zt) = (self.x_bit(t), self.z_bit(t));
        self.set_xz(c, xc, zc ^ zt);
        self.set_xz(t, xt ^ xc, zt);
    }

    /// Lowest set coordinate of the `(x | z)` vector, x bits first.
    pub(crate) fn first_set_bit(&self) -> Option<usize> {
        (0..self.n)
            .find(|&j| self.x_bit(j))
            .or_else(|| (0..self.n).find(|&j| self.z_bit(j)).map(|j| j + self.n))
    }

    pub(crate) fn bit_at(&self, pos: usize) -> bool {
        if pos < self.n {
            self.x_bit(pos)
        } else {
            self.z_bit(pos - self.n)
        }
    }

    /// Symplectic product: 0 if the strings commute, 1 if they anticommute.
    pub fn symplectic_product(&self, other: &PauliString) -> u32 {
        let mut acc = 0u32;
        for w in 0..self.x.len() {
            acc += (self.x[w] & other.z[w]).count_ones() + (self.z[w] & other.x[w]).count_ones();
        }
        acc & 1
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        self.symplectic_product(other) == 0
    }

    /// `(x_mask, z_mask)` in dense index convention. Requires `n ≤ 64`.
    pub fn index_masks(&self) -> (u64, u64) {
        assert!(self.n <= 64, "index masks need n <= 64");
        let mut xm = 0u64;
        let mut zm = 0u64;
        for j in 0..self.n {
            let b = self.n - 1 - j;
            xm |= (self.x_bit(j) as u64) << b;
            zm |= (self.z_bit(j) as u64) << b;
        }
        (xm, zm)
    }

    /// 2x2 matrix `X^{x_j} Z^{z_j}` of qubit `j` (no global phase).
    pub fn local_matrix(&self, j: usize) -> [[C64; 2]; 2] {
        match (self.x_bit(j), self.z_bit(j)) {
            (false, false) => [[ONE, ZERO], [ZERO, ONE]],
            (false, true) => [[ONE, ZERO], [ZERO, -ONE]],
            (true, false) => [[ZERO, ONE], [ONE, ZERO]],
            // XZ = [[0,-1],[1,0]]
            (true, true) => [[ZERO, -ONE], [ONE, ZERO]],
        }
    }

    /// `P·ψ` on a dense amplitude vector of length `2^n`.
    pub fn apply(&self, amps: &[C64]) -> Result<Vec<C64>> {
        if self.n > 30 || amps.len() != 1usize << self.n {
            return Err(Error::LengthMismatch {
                expected: 1usize << self.n.min(30),
                found: amps.len(),
            });
        }
        let (xm, zm) = self.index_masks();
        let ph = self.phase();
        let mut out = vec![ZERO; amps.len()];
        for (i, a) in amps.iter().enumerate() {
            let sign = if (zm & i as u64).count_ones() % 2 == 1 { -ph } else { ph };
            out[i ^ xm as usize] = sign * a;
        }
        Ok(out)
    }

    /// `⟨ψ|P|ψ⟩` on a dense state.
    pub fn expectation_dense(&self, amps: &[C64]) -> Result<C64> {
        let pa = self.apply(amps)?;
        Ok(amps.iter().zip(&pa).map(|(a, b)| a.conj() * b).sum())
    }

    /// Dense `2^n × 2^n` matrix. Requires `n ≤ 12`.
    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        if self.n > 12 {
            return Err(Error::Resource(format!("dense Pauli on {} qubits", self.n)));
        }
        let d = 1usize << self.n;
        let mut m = ComplexMatrix::zeros(d, d);
        let (xm, zm) = self.index_masks();
        let ph = self.phase();
        for i in 0..d {
            let sign = if (zm & i as u64).count_ones() % 2 == 1 { -ph } else { ph };
            m[(i ^ xm as usize, i)] = sign;
        }
        Ok(m)
    }

    /// All `4^n` Hermitian `+` strings in index order
    /// (index = `x_mask · 2^n + z_mask`).
    pub fn enumerate(n: usize) -> impl Iterator<Item = PauliString> {
        assert!(n <= 16);
        let d = 1u64 << n;
        (0..d * d).map(move |idx| PauliString::from_masks(n, idx / d, idx % d))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = (self.phase as u32 + 4 - self.xz_overlap() % 4) % 4;
        let prefix = match rel {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(prefix)?;
        for j in 0..self.n {
            write!(f, "{}", self.get(j).letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (rel, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1u32, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('i') {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(Error::Parse("empty Pauli string".into()));
        }
        let mut paulis = Vec::with_capacity(body.len());
        for (pos, c) in body.chars().enumerate() {
            paulis.push(match c {
                'I' | '_' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::Parse(format!(
                        "invalid Pauli letter {other:?} at position {pos}"
                    )))
                }
            });
        }
        let p = PauliString::from_paulis(&paulis);
        let phase = ((p.phase as u32 + rel) % 4) as u8;
        Ok(p.with_phase_exponent(phase))
    }
}
