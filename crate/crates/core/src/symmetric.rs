//! Permutations, their tensor representation and the antisymmetric subspace.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ONE, ZERO};

/// A permutation of `0..n`, stored as the image of each point.
///
/// Composition follows function composition: `(p ∘ q)(x) = p(q(x))`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images)
    }
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection"
                )));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Swap of points `a` and `b`.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Self { images }
    }

    /// Every element of `S_n` in lexicographic order of image arrays.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len());
        Self {
            images: other.images.iter().map(|&x| self.images[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x] = i;
        }
        Self { images }
    }

    /// Parity: `+1` for even, `-1` for odd permutations.
    pub fn sign(&self) -> i32 {
        let mut visited = vec![false; self.len()];
        let mut transpositions = 0;
        for start in 0..self.len() {
            if visited[start] {
                continue;
            }
            let mut x = start;
            let mut cycle_len = 0;
            while !visited[x] {
                visited[x] = true;
                x = self.images[x];
                cycle_len += 1;
            }
            transpositions += cycle_len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// A word in adjacent transpositions `s_i = (i, i+1)` with
    /// `self = s_{w[0]} ∘ s_{w[1]} ∘ ...`. The word is reduced.
    pub fn adjacent_word(&self) -> Vec<usize> {
        let mut current = self.images.clone();
        let mut reversed = Vec::new();
        // bubble sort; right-multiplying by s_i swaps entries i and i+1
        while let Some(i) =
            (0..current.len().saturating_sub(1)).find(|&i| current[i] > current[i + 1])
        {
            current.swap(i, i + 1);
            reversed.push(i);
        }
        reversed.reverse();
        reversed
    }

    /// Extend to `S_{n+1}` by fixing the new last point.
    pub fn extend(&self) -> Permutation {
        let mut images = self.images.clone();
        images.push(self.len());
        Self { images }
    }
}

/// Index map of `V(π)` on `(C^d)^{⊗n}`: entry `x` is the row index of the
/// single nonzero entry in column `x`.
///
/// `V(π)` moves the tensor factor at position `j` to position `π(j)`, so that
/// `V(π)V(σ) = V(π∘σ)`.
pub fn perm_index_map(p: &Permutation, d: usize) -> Vec<usize> {
    let n = p.len();
    let total = d.pow(n as u32);
    let mut strides = vec![1usize; n];
    for f in (0..n.saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * d;
    }
    (0..total)
        .map(|idx| {
            (0..n)
                .map(|j| ((idx / strides[j]) % d) * strides[p.apply(j)])
                .sum()
        })
        .collect()
}

/// The permutation operator `V(π)` on `(C^d)^{⊗n}`.
pub fn perm_operator(p: &Permutation, d: usize) -> ComplexMatrix {
    let map = perm_index_map(p, d);
    let n = map.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (col, &row) in map.iter().enumerate() {
        m[(row, col)] = ONE;
    }
    m
}

/// A vector stored as `(index, amplitude)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub len: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn to_dense(&self) -> Vec<C64> {
        let mut v = vec![ZERO; self.len];
        for &(i, a) in &self.entries {
            v[i] += C64::new(a, 0.0);
        }
        v
    }

    /// `<self|v>` for a dense `v`.
    pub fn dot(&self, v: &[C64]) -> C64 {
        self.entries.iter().map(|&(i, a)| v[i] * a).sum()
    }
}

/// Size-`n` subsets of `0..d` in lexicographic order.
fn subsets(d: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    if n > d {
        return out;
    }
    loop {
        out.push(current.clone());
        let Some(i) = (0..n).rev().find(|&i| current[i] < d - n + i) else {
            break;
        };
        current[i] += 1;
        for j in i + 1..n {
            current[j] = current[j - 1] + 1;
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|x| x as f64).product()
}

/// Orthonormal basis of the antisymmetric subspace of `(C^d)^{⊗n}`, sparse.
///
/// One vector per size-`n` subset `{s_0 < ... < s_{n-1}}` of `0..d`, in
/// lexicographic subset order: `(1/√n!) Σ_π sgn(π) |s_{π(0)}> ⊗ ... ⊗ |s_{π(n-1)}>`.
pub fn antisym_basis_sparse(d: usize, n: usize) -> Result<Vec<SparseVector>> {
    if n == 0 || n > d {
        return Err(Error::EmptySpace { d, n });
    }
    let len = d.pow(n as u32);
    let norm = 1.0 / factorial(n).sqrt();
    let perms = Permutation::all(n);
    Ok(subsets(d, n)
        .into_iter()
        .map(|subset| {
            let entries = perms
                .iter()
                .map(|p| {
                    let idx = (0..n).fold(0, |acc, j| acc * d + subset[p.apply(j)]);
                    (idx, p.sign() as f64 * norm)
                })
                .collect();
            SparseVector { len, entries }
        })
        .collect())
}

/// Dense form of [`antisym_basis_sparse`].
pub fn antisym_basis(d: usize, n: usize) -> Result<Vec<Vec<C64>>> {
    Ok(antisym_basis_sparse(d, n)?
        .iter()
        .map(SparseVector::to_dense)
        .collect())
}

/// Projector `A(d, n)` onto the antisymmetric subspace of `(C^d)^{⊗n}`,
/// equal to `(1/n!) Σ_π sgn(π) V(π)`. Zero when `n > d`.
pub fn antisym_projector(d: usize, n: usize) -> ComplexMatrix {
    let side = d.pow(n as u32);
    let mut a = ComplexMatrix::zeros(side, side);
    let Ok(basis) = antisym_basis_sparse(d, n) else {
        return a;
    };
    for v in &basis {
        for &(r, x) in &v.entries {
            for &(c, y) in &v.entries {
                a[(r, c)] += C64::new(x * y, 0.0);
            }
        }
    }
    a
}
