//! Permutations of `{0..k}` and the symmetric group `S_k` for small `k`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest `k` for which [`SymmetricGroup`] materializes its product table.
pub const MAX_K: usize = 8;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<u8>,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation {
            image: (0..k as u8).collect(),
        }
    }

    pub fn from_images(image: &[usize]) -> Result<Self> {
        let k = image.len();
        if k > u8::MAX as usize {
            return Err(Error::InvalidDimension(format!("permutation of degree {k}")));
        }
        let mut seen = vec![false; k];
        for &i in image {
            if i >= k || seen[i] {
                return Err(Error::Validation(format!("{image:?} is not a bijection")));
            }
            seen[i] = true;
        }
        Ok(Permutation {
            image: image.iter().map(|&i| i as u8).collect(),
        })
    }

    /// Transposition of `a` and `b` in `S_k`.
    pub fn transposition(k: usize, a: usize, b: usize) -> Self {
        let mut p = Permutation::identity(k);
        p.image.swap(a, b);
        p
    }

    pub fn degree(&self) -> usize {
        self.image.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.image.iter().map(|&i| i as usize).collect()
    }

    /// `self ∘ other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation {
            image: other.image.iter().map(|&i| self.image[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.image.len()];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Permutation { image: inv }
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let k = self.image.len();
        let mut seen = vec![false; k];
        let mut lengths = Vec::new();
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.image[i] as usize;
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// Number of cycles `c(π)`, fixed points included.
    pub fn cycle_count(&self) -> usize {
        self.cycle_type().len()
    }

    pub fn all_cycles_even(&self) -> bool {
        self.cycle_type().iter().all(|l| l % 2 == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &j)| i == j as usize)
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.image)
    }
}

/// All `k!` elements in lexicographic order (identity first), with product
/// and inverse tables.
pub struct SymmetricGroup {
    k: usize,
    elements: Vec<Permutation>,
    index: HashMap<Permutation, usize>,
    mul: Vec<u16>,
    inv: Vec<u16>,
}

impl SymmetricGroup {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::Unsupported(format!("symmetric group S_{k}")));
        }
        let mut elements = Vec::new();
        let mut current: Vec<usize> = (0..k).collect();
        loop {
            elements.push(Permutation::from_images(&current)?);
            if !next_permutation(&mut current) {
                break;
            }
        }
        let index: HashMap<Permutation, usize> =
            elements.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = elements.len();
        let mut mul = vec![0u16; n * n];
        for (a, pa) in elements.iter().enumerate() {
            for (b, pb) in elements.iter().enumerate() {
                mul[a * n + b] = index[&pa.compose(pb)] as u16;
            }
        }
        let inv = elements.iter().map(|p| index[&p.inverse()] as u16).collect();
        Ok(SymmetricGroup {
            k,
            elements,
            index,
            mul,
            inv,
        })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Index of `σ_a ∘ σ_b`.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.elements.len() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
