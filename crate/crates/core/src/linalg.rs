//! Dense complex matrices over tensor-product spaces.
//!
//! Storage is row-major. Tensor factors are numbered from the left: factor 0
//! is the most significant digit of a basis index, so the basis vector
//! `|i_0 i_1 ... i_{m-1}>` sits at index `((i_0 * d_1 + i_1) * d_2 + ...)`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Relative rank tolerance for Hilbert–Schmidt Gram–Schmidt.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Local dimensions of the tensor factors of a space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Dimension(format!(
                "subsystem dimensions must be positive, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    /// `count` copies of a `d`-dimensional factor.
    pub fn uniform(d: usize, count: usize) -> Self {
        Self::new(vec![d; count]).expect("positive dimension")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Dimension of the full space.
    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Stride of each factor in a flattened index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for f in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[f] = strides[f + 1] * self.dims[f + 1];
        }
        strides
    }

    /// Concatenation `self ⊗ other`.
    pub fn join(&self, other: &SubsystemShape) -> SubsystemShape {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        SubsystemShape { dims }
    }

    fn check_square(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(Error::Dimension(format!(
                "shape {:?} (total {}) does not match a {}x{} matrix",
                self.dims,
                self.total(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    /// For every value of the multi-index over `factors`, its offset in the
    /// full flattened index.
    fn offsets(&self, factors: &[usize]) -> Vec<usize> {
        let strides = self.strides();
        let mut offsets = vec![0usize];
        for &f in factors {
            let mut next = Vec::with_capacity(offsets.len() * self.dims[f]);
            for &o in &offsets {
                for digit in 0..self.dims[f] {
                    next.push(o + digit * strides[f]);
                }
            }
            offsets = next;
        }
        offsets
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows.min(16) {
            write!(f, "  ")?;
            for c in 0..self.cols.min(16) {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{} entries cannot form a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            values.iter().map(|&x| C64::new(x, 0.0)).collect(),
        )
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn real_diag(values: &[f64]) -> Self {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    /// Column vector.
    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// `|v><w|`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        Self::from_fn(v.len(), w.len(), |r, c| v[r] * w[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &ComplexMatrix, s: C64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    /// Hilbert–Schmidt inner product `tr(self† other)`.
    pub fn hs_inner(&self, other: &ComplexMatrix) -> C64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += self.data[r * self.cols + c] * other.data[c * other.cols + r];
            }
        }
        acc
    }

    pub fn hs_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` entrywise.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M†|` entrywise.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0f64;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self.data[r * n + c] - self.data[c * n + r].conj()).norm());
            }
        }
        dev
    }

    /// `max |M†M - I|` entrywise.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.rows))
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * 0.5
        })
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        self.data
            .chunks(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul of {}x{} by {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let (n, m) = (other.rows, other.cols);
        let mut out = vec![ZERO; self.rows * m];
        let work = |(r, out_row): (usize, &mut [C64])| {
            let lhs = &self.data[r * n..(r + 1) * n];
            for (k, &a) in lhs.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let rhs = &other.data[k * m..(k + 1) * m];
                for (o, &b) in out_row.iter_mut().zip(rhs) {
                    *o += a * b;
                }
            }
        };
        if self.rows * n * m > 1 << 18 {
            out.par_chunks_mut(m).enumerate().for_each(work);
        } else {
            out.chunks_mut(m).enumerate().for_each(work);
        }
        ComplexMatrix {
            rows: self.rows,
            cols: m,
            data: out,
        }
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, ONE);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(rhs, -ONE);
        out
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.add_scaled(rhs, ONE);
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-ONE)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut data = vec![ZERO; rows * cols];
    for ar in 0..a.rows {
        for ac in 0..a.cols {
            let x = a[(ar, ac)];
            if x == ZERO {
                continue;
            }
            for br in 0..b.rows {
                let row = ar * b.rows + br;
                let dst = &mut data[row * cols + ac * b.cols..row * cols + (ac + 1) * b.cols];
                for (o, &y) in dst.iter_mut().zip(&b.data[br * b.cols..(br + 1) * b.cols]) {
                    *o = x * y;
                }
            }
        }
    }
    ComplexMatrix { rows, cols, data }
}

/// Kronecker product of a sequence of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut it = factors.into_iter();
    let first = it.next().expect("kron_all of an empty sequence").clone();
    it.fold(first, |acc, f| kron(&acc, f))
}

/// Trace over the factors listed in `traced`; the result lives on the
/// remaining factors in their original order.
pub fn partial_trace(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    traced: &[usize],
) -> Result<ComplexMatrix> {
    shape.check_square(m)?;
    for &t in traced {
        if t >= shape.len() {
            return Err(Error::Dimension(format!(
                "factor {t} out of range for {} factors",
                shape.len()
            )));
        }
    }
    let kept: Vec<usize> = (0..shape.len()).filter(|f| !traced.contains(f)).collect();
    let traced: Vec<usize> = (0..shape.len()).filter(|f| traced.contains(f)).collect();
    let keep_off = shape.offsets(&kept);
    let trace_off = shape.offsets(&traced);
    let n = m.rows;
    let k = keep_off.len();
    let mut out = ComplexMatrix::zeros(k, k);
    for (r, &ro) in keep_off.iter().enumerate() {
        for (c, &co) in keep_off.iter().enumerate() {
            let mut acc = ZERO;
            for &t in &trace_off {
                acc += m.data[(ro + t) * n + co + t];
            }
            out.data[r * k + c] = acc;
        }
    }
    Ok(out)
}

/// Transpose the listed factors in the computational basis.
pub fn partial_transpose_many(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    subsystems: &[usize],
) -> Result<ComplexMatrix> {
    shape.check_square(m)?;
    let strides = shape.strides();
    for &s in subsystems {
        if s >= shape.len() {
            return Err(Error::Dimension(format!(
                "factor {s} out of range for {} factors",
                shape.len()
            )));
        }
    }
    let n = m.rows;
    let digit = |idx: usize, f: usize| (idx / strides[f]) % shape.dims[f];
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let (mut r2, mut c2) = (r, c);
            for &s in subsystems {
                let (dr, dc) = (digit(r, s), digit(c, s));
                r2 = r2 - dr * strides[s] + dc * strides[s];
                c2 = c2 - dc * strides[s] + dr * strides[s];
            }
            out.data[r2 * n + c2] = m.data[r * n + c];
        }
    }
    Ok(out)
}

/// Transpose a single factor in the computational basis.
pub fn partial_transpose(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    subsystem: usize,
) -> Result<ComplexMatrix> {
    partial_transpose_many(m, shape, &[subsystem])
}

/// Reorder tensor factors: factor `j` of the result is factor `order[j]` of
/// the input.
pub fn permute_subsystems(
    m: &ComplexMatrix,
    shape: &SubsystemShape,
    order: &[usize],
) -> Result<ComplexMatrix> {
    shape.check_square(m)?;
    let mut seen = vec![false; shape.len()];
    if order.len() != shape.len() || order.iter().any(|&o| o >= shape.len()) {
        return Err(Error::Dimension(format!(
            "{order:?} is not a reordering of {} factors",
            shape.len()
        )));
    }
    for &o in order {
        if std::mem::replace(&mut seen[o], true) {
            return Err(Error::Dimension(format!("{order:?} repeats a factor")));
        }
    }
    let map = reorder_index_map(shape, order);
    let n = m.rows;
    let mut out = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out.data[map[r] * n + map[c]] = m.data[r * n + c];
        }
    }
    Ok(out)
}

/// For each old flattened index, the flattened index after reordering the
/// factors with `order` (new factor `j` = old factor `order[j]`).
pub fn reorder_index_map(shape: &SubsystemShape, order: &[usize]) -> Vec<usize> {
    let old_strides = shape.strides();
    let new_dims: Vec<usize> = order.iter().map(|&o| shape.dims[o]).collect();
    let new_shape = SubsystemShape { dims: new_dims };
    let new_strides = new_shape.strides();
    (0..shape.total())
        .map(|idx| {
            order
                .iter()
                .enumerate()
                .map(|(j, &o)| ((idx / old_strides[o]) % shape.dims[o]) * new_strides[j])
                .sum()
        })
        .collect()
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.vectors;
        let scaled = ComplexMatrix::from_fn(v.rows, v.cols, |r, c| v[(r, c)] * self.values[c]);
        &scaled * &v.adjoint()
    }
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "{}x{} matrix is not square",
            m.rows, m.cols
        )));
    }
    let deviation = m.hermitian_deviation();
    if deviation > 1e-10 * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(m)?;
    let eig = nalgebra::SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..m.rows).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(m.rows, m.rows, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(m)?;
    let mut values: Vec<f64> = m
        .hermitian_part()
        .to_nalgebra()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?[0])
}

/// Orthonormalize `ops` under `<A, B> = tr(A† B)`. Inputs whose residual norm
/// after projection is at most `rel_tol` times the largest input norm are
/// dropped.
pub fn gram_schmidt_hs(ops: &[ComplexMatrix], rel_tol: f64) -> Vec<ComplexMatrix> {
    let Some(first) = ops.first() else {
        return Vec::new();
    };
    for op in ops {
        assert_eq!(
            (op.rows, op.cols),
            (first.rows, first.cols),
            "Gram–Schmidt inputs must share a shape"
        );
    }
    let scale = ops.iter().map(ComplexMatrix::hs_norm).fold(0.0, f64::max);
    let threshold = rel_tol * scale;
    let mut basis: Vec<ComplexMatrix> = Vec::new();
    for op in ops {
        let mut v = op.clone();
        // two passes of modified Gram–Schmidt
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.hs_inner(&v);
                v.add_scaled(b, -coeff);
            }
        }
        let norm = v.hs_norm();
        if norm > threshold {
            basis.push(v.scale_real(1.0 / norm));
        }
    }
    basis
}

/// Apply a single-factor operator `u` to factor `factor` of a state vector.
pub fn apply_local(
    state: &[C64],
    shape: &SubsystemShape,
    factor: usize,
    u: &ComplexMatrix,
) -> Vec<C64> {
    let d = shape.dims[factor];
    assert_eq!(state.len(), shape.total());
    assert_eq!((u.rows, u.cols), (d, d));
    let stride = shape.strides()[factor];
    let block = stride * d;
    let mut out = vec![ZERO; state.len()];
    for base in (0..state.len()).step_by(block) {
        for inner in 0..stride {
            for r in 0..d {
                let mut acc = ZERO;
                for c in 0..d {
                    acc += u[(r, c)] * state[base + c * stride + inner];
                }
                out[base + r * stride + inner] = acc;
            }
        }
    }
    out
}
