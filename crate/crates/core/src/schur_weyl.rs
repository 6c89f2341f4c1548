//! Young's orthogonal representation of `S_n` and the matrix units
//! `E^λ_ij` it induces on `(C^d)^{⊗n}`.
//!
//! Standard tableaux are kept in last-letter order: grouped by the shape left
//! after deleting the cell holding `n` (bottom corner first, so the shapes
//! `α` run in descending lexicographic order), recursively. With
//! this order the restriction of `φ^λ` to `S_{n-1}` is block diagonal with
//! blocks `φ^α`, `α ∈ λ`, and the `α` block of `λ` inherits `α`'s own index
//! order.
//!
//! Permutations of the points `0..n` act on tensor factors as in
//! [`crate::symmetric::perm_operator`]; the adjacent transposition of points
//! `m, m+1` acts on tableaux through the letters `m+1, m+2`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{kron, ComplexMatrix, C64};
use crate::symmetric::{perm_index_map, Permutation};
use crate::young::{irrep_dim, multiplicity, Cell, Partition};

/// Largest `d^n` for which matrix units are assembled.
pub const MAX_UNIT_SIDE: usize = 1024;
/// Largest `n` for which matrix units are assembled (`n!` terms each).
pub const MAX_UNIT_N: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StandardTableau {
    shape: Partition,
    rows: Vec<Vec<usize>>,
}

impl StandardTableau {
    pub fn new(shape: Partition, rows: Vec<Vec<usize>>) -> Result<Self> {
        let lens: Vec<usize> = rows.iter().map(Vec::len).collect();
        if lens != shape.parts() {
            return Err(Error::InvalidPartition(format!(
                "tableau rows {lens:?} do not fit shape {shape}"
            )));
        }
        let n = shape.size();
        let mut seen = vec![false; n + 1];
        for &x in rows.iter().flatten() {
            if x == 0 || x > n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPartition(format!(
                    "{rows:?} is not a filling by 1..{n}"
                )));
            }
        }
        for (r, row) in rows.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                let right_ok = c + 1 >= row.len() || row[c + 1] > x;
                let below_ok = r + 1 >= rows.len() || c >= rows[r + 1].len() || rows[r + 1][c] > x;
                if !right_ok || !below_ok {
                    return Err(Error::InvalidPartition(format!("{rows:?} is not standard")));
                }
            }
        }
        Ok(Self { shape, rows })
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    /// Cell holding `letter` (1-based).
    pub fn position(&self, letter: usize) -> Option<Cell> {
        self.rows.iter().enumerate().find_map(|(r, row)| {
            row.iter()
                .position(|&x| x == letter)
                .map(|c| Cell::new(r + 1, c + 1))
        })
    }

    /// The tableau left after deleting the cell holding `n`.
    pub fn restrict(&self) -> Option<StandardTableau> {
        let n = self.shape.size();
        let cell = self.position(n)?;
        let shape = self.shape.remove(cell)?;
        let mut rows = self.rows.clone();
        rows[cell.row - 1].pop();
        if rows[cell.row - 1].is_empty() {
            rows.pop();
        }
        Some(StandardTableau { shape, rows })
    }

    /// Swap letters `a` and `b`; `None` if the result is not standard.
    fn swap_letters(&self, a: usize, b: usize) -> Option<StandardTableau> {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| {
                        if x == a {
                            b
                        } else if x == b {
                            a
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect();
        StandardTableau::new(self.shape.clone(), rows).ok()
    }
}

/// Shapes `α ∈ λ` in block order, each with the removed cell.
pub fn branch_blocks(lambda: &Partition) -> Vec<(Cell, Partition)> {
    let mut blocks = lambda.removals();
    blocks.reverse();
    blocks
}

/// Standard tableaux of `λ` in last-letter order.
pub fn standard_tableaux(lambda: &Partition) -> Vec<StandardTableau> {
    let n = lambda.size();
    if n == 1 {
        return vec![StandardTableau {
            shape: lambda.clone(),
            rows: vec![vec![1]],
        }];
    }
    let mut out = Vec::new();
    for (cell, alpha) in branch_blocks(lambda) {
        for t in standard_tableaux(&alpha) {
            let mut rows = t.rows;
            if rows.len() < cell.row {
                rows.push(Vec::new());
            }
            rows[cell.row - 1].push(n);
            out.push(StandardTableau {
                shape: lambda.clone(),
                rows,
            });
        }
    }
    out
}

/// A real orthogonal `d_λ × d_λ` matrix `φ^λ(π)`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepMatrix {
    pub shape: Partition,
    pub permutation: Permutation,
    pub dim: usize,
    pub data: Vec<f64>,
}

impl IrrepMatrix {
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.dim + c]
    }

    fn product(a: &[f64], b: &[f64], dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let x = a[r * dim + k];
                if x == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    out[r * dim + c] += x * b[k * dim + c];
                }
            }
        }
        out
    }

    /// `max |M Mᵀ - I|`.
    pub fn orthogonality_deviation(&self) -> f64 {
        let dim = self.dim;
        let mut dev = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let dot: f64 = (0..dim).map(|k| self.get(r, k) * self.get(c, k)).sum();
                let expected = if r == c { 1.0 } else { 0.0 };
                dev = dev.max((dot - expected).abs());
            }
        }
        dev
    }

    pub fn matmul(&self, other: &IrrepMatrix) -> Vec<f64> {
        Self::product(&self.data, &other.data, self.dim)
    }
}

/// Young's orthogonal form for a fixed shape, with generator matrices cached.
#[derive(Debug, Clone)]
pub struct YoungRepresentation {
    shape: Partition,
    tableaux: Vec<StandardTableau>,
    /// `generators[m]` represents the transposition of points `m, m+1`.
    generators: Vec<Vec<f64>>,
}

impl YoungRepresentation {
    pub fn new(shape: &Partition) -> Self {
        let tableaux = standard_tableaux(shape);
        let dim = tableaux.len();
        let n = shape.size();
        let generators = (0..n.saturating_sub(1))
            .map(|m| {
                let (a, b) = (m + 1, m + 2);
                let mut g = vec![0.0; dim * dim];
                for (t, tab) in tableaux.iter().enumerate() {
                    let ca = tab.position(a).expect("letter present");
                    let cb = tab.position(b).expect("letter present");
                    // signed axial distance from a to b
                    let r = (cb.content() - ca.content()) as f64;
                    g[t * dim + t] = 1.0 / r;
                    if let Some(swapped) = tab.swap_letters(a, b) {
                        let u = tableaux
                            .iter()
                            .position(|x| *x == swapped)
                            .expect("swapped tableau is enumerated");
                        g[t * dim + u] = (1.0 - 1.0 / (r * r)).sqrt();
                    }
                }
                g
            })
            .collect();
        Self {
            shape: shape.clone(),
            tableaux,
            generators,
        }
    }

    pub fn dim(&self) -> usize {
        self.tableaux.len()
    }

    pub fn shape(&self) -> &Partition {
        &self.shape
    }

    pub fn tableaux(&self) -> &[StandardTableau] {
        &self.tableaux
    }

    pub fn matrix(&self, pi: &Permutation) -> Result<IrrepMatrix> {
        if pi.len() != self.shape.size() {
            return Err(Error::Dimension(format!(
                "permutation of {} points applied to irrep {} of S_{}",
                pi.len(),
                self.shape,
                self.shape.size()
            )));
        }
        let dim = self.dim();
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        for m in pi.adjacent_word() {
            data = IrrepMatrix::product(&data, &self.generators[m], dim);
        }
        Ok(IrrepMatrix {
            shape: self.shape.clone(),
            permutation: pi.clone(),
            dim,
            data,
        })
    }
}

pub fn young_orthogonal_rep(lambda: &Partition, pi: &Permutation) -> Result<IrrepMatrix> {
    YoungRepresentation::new(lambda).matrix(pi)
}

fn check_unit_size(lambda: &Partition, d: usize) -> Result<usize> {
    let n = lambda.size();
    let side = d.checked_pow(n as u32).unwrap_or(usize::MAX);
    if n > MAX_UNIT_N || side > MAX_UNIT_SIDE {
        return Err(Error::SizeCap {
            side,
            cap: MAX_UNIT_SIDE,
        });
    }
    Ok(side)
}

/// All matrix units of `λ` on `(C^d)^{⊗n}`, as `units[i][j] = E^λ_ij`
/// (0-based), built as `E_ij = (d_λ/n!) Σ_π φ^λ(π)_ij V(π)`.
///
/// They satisfy `E_ij E_kl = δ_jk E_il` and `tr E_ij = δ_ij m_λ`. When the
/// height of `λ` exceeds `d` every unit is the zero operator.
pub fn matrix_units(lambda: &Partition, d: usize) -> Result<Vec<Vec<ComplexMatrix>>> {
    let side = check_unit_size(lambda, d)?;
    let n = lambda.size();
    let rep = YoungRepresentation::new(lambda);
    let dim = rep.dim();
    let perms = Permutation::all(n);
    let scale = dim as f64 / perms.len() as f64;
    let terms: Vec<(Vec<usize>, IrrepMatrix)> = perms
        .par_iter()
        .map(|p| Ok((perm_index_map(p, d), rep.matrix(p)?)))
        .collect::<Result<_>>()?;
    let units = (0..dim)
        .into_par_iter()
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let mut e = ComplexMatrix::zeros(side, side);
                    for (map, phi) in &terms {
                        let coeff = scale * phi.get(i, j);
                        if coeff == 0.0 {
                            continue;
                        }
                        for (col, &row) in map.iter().enumerate() {
                            e[(row, col)] += C64::new(coeff, 0.0);
                        }
                    }
                    e
                })
                .collect()
        })
        .collect();
    Ok(units)
}

/// A single matrix unit `E^λ_ij` (0-based indices).
pub fn matrix_unit(lambda: &Partition, i: usize, j: usize, d: usize) -> Result<ComplexMatrix> {
    let dim = irrep_dim(lambda) as usize;
    if i >= dim || j >= dim {
        return Err(Error::OutOfRange(format!(
            "index ({i}, {j}) outside irrep {lambda} of dimension {dim}"
        )));
    }
    let side = check_unit_size(lambda, d)?;
    let n = lambda.size();
    let rep = YoungRepresentation::new(lambda);
    let perms = Permutation::all(n);
    let scale = dim as f64 / perms.len() as f64;
    let mut e = ComplexMatrix::zeros(side, side);
    for p in &perms {
        let coeff = scale * rep.matrix(p)?.get(i, j);
        if coeff == 0.0 {
            continue;
        }
        for (col, &row) in perm_index_map(p, d).iter().enumerate() {
            e[(row, col)] += C64::new(coeff, 0.0);
        }
    }
    Ok(e)
}

/// `P^λ = Σ_i E^λ_ii`, the projector onto the `λ`-isotypic component.
pub fn young_projector(lambda: &Partition, d: usize) -> Result<ComplexMatrix> {
    let side = check_unit_size(lambda, d)?;
    let n = lambda.size();
    let rep = YoungRepresentation::new(lambda);
    let dim = rep.dim();
    let perms = Permutation::all(n);
    let scale = dim as f64 / perms.len() as f64;
    let mut proj = ComplexMatrix::zeros(side, side);
    for p in &perms {
        let phi = rep.matrix(p)?;
        let character: f64 = (0..dim).map(|i| phi.get(i, i)).sum();
        let coeff = scale * character;
        if coeff.abs() < 1e-15 {
            continue;
        }
        for (col, &row) in perm_index_map(p, d).iter().enumerate() {
            proj[(row, col)] += C64::new(coeff, 0.0);
        }
    }
    Ok(proj)
}

/// `E^α_ij ⊗ 1_d`: a matrix unit of `S_{n-1}` embedded in `(C^d)^{⊗n}`.
pub fn branching_embed(alpha: &Partition, i: usize, j: usize, d: usize) -> Result<ComplexMatrix> {
    let e = matrix_unit(alpha, i, j, d)?;
    Ok(kron(&e, &ComplexMatrix::identity(d)))
}

/// Index within `λ`'s tableau order of the `i`-th tableau of `α ∈ λ`, or
/// `None` when `α` is not obtained from `λ` by removing a cell.
pub fn branch_index(lambda: &Partition, alpha: &Partition, i: usize) -> Option<usize> {
    let mut offset = 0;
    for (_, beta) in branch_blocks(lambda) {
        let dim = irrep_dim(&beta) as usize;
        if beta == *alpha {
            return (i < dim).then_some(offset + i);
        }
        offset += dim;
    }
    None
}

/// Whether `λ` contributes on `(C^d)^{⊗n}`.
pub fn appears(lambda: &Partition, d: usize) -> bool {
    multiplicity(lambda, d) > num_bigint::BigUint::ZERO
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::symmetric::{antisym_projector, perm_operator};
    use crate::young::partitions;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn tableau_counts() {
        assert_eq!(standard_tableaux(&Partition::row(4)).len(), 1);
        assert_eq!(standard_tableaux(&p(&[2, 1])).len(), 2);
        assert_eq!(standard_tableaux(&p(&[2, 2])).len(), 2);
        for n in 1..=7 {
            for l in partitions(n, n) {
                let tabs = standard_tableaux(&l);
                assert_eq!(tabs.len() as u64, irrep_dim(&l), "λ={l}");
                for t in &tabs {
                    StandardTableau::new(l.clone(), t.rows().to_vec()).unwrap();
                }
            }
        }
    }

    #[test]
    fn tableaux_are_in_last_letter_order() {
        let tabs = standard_tableaux(&p(&[2, 1]));
        assert_eq!(tabs[0].rows(), &[vec![1, 2], vec![3]]);
        assert_eq!(tabs[1].rows(), &[vec![1, 3], vec![2]]);
        for n in 2..=6 {
            for l in partitions(n, n) {
                let tabs = standard_tableaux(&l);
                let mut idx = 0;
                for (_, alpha) in branch_blocks(&l) {
                    for (i, sub) in standard_tableaux(&alpha).iter().enumerate() {
                        assert_eq!(tabs[idx].restrict().as_ref(), Some(sub));
                        assert_eq!(branch_index(&l, &alpha, i), Some(idx));
                        idx += 1;
                    }
                }
                assert_eq!(idx, tabs.len());
            }
        }
    }

    #[test]
    fn invalid_tableaux_rejected() {
        assert!(StandardTableau::new(p(&[2, 1]), vec![vec![2, 1], vec![3]]).is_err());
        assert!(StandardTableau::new(p(&[2, 1]), vec![vec![1, 3], vec![3]]).is_err());
        assert!(StandardTableau::new(p(&[2, 1]), vec![vec![1, 2, 3]]).is_err());
    }

    #[test]
    fn orthogonal_rep_examples() {
        let l = p(&[3, 2]);
        let phi = young_orthogonal_rep(&l, &Permutation::identity(5)).unwrap();
        assert_eq!(phi.dim, 5);
        for r in 0..5 {
            for c in 0..5 {
                assert_eq!(phi.get(r, c), if r == c { 1.0 } else { 0.0 });
            }
        }
        let col = Partition::column(4);
        for pi in Permutation::all(4) {
            let phi = young_orthogonal_rep(&col, &pi).unwrap();
            assert!((phi.get(0, 0) - pi.sign() as f64).abs() < 1e-15);
        }
        let phi = young_orthogonal_rep(&p(&[2, 1]), &Permutation::transposition(3, 0, 1)).unwrap();
        assert_eq!(phi.data, vec![1.0, 0.0, 0.0, -1.0]);
        assert!(young_orthogonal_rep(&p(&[2, 1]), &Permutation::identity(4)).is_err());
    }

    #[test]
    fn orthogonal_rep_is_an_orthogonal_homomorphism() {
        for n in 1..=5 {
            let perms = Permutation::all(n);
            for l in partitions(n, n) {
                let rep = YoungRepresentation::new(&l);
                let mats: Vec<IrrepMatrix> = perms.iter().map(|p| rep.matrix(p).unwrap()).collect();
                for (a, ma) in perms.iter().zip(&mats) {
                    assert!(ma.orthogonality_deviation() < 1e-12);
                    for (b, mb) in perms.iter().zip(&mats) {
                        let prod = ma.matmul(mb);
                        let direct = rep.matrix(&a.compose(b)).unwrap();
                        let err = prod
                            .iter()
                            .zip(&direct.data)
                            .map(|(x, y)| (x - y).abs())
                            .fold(0.0, f64::max);
                        assert!(err < 1e-10, "λ={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_is_block_diagonal() {
        for n in 2..=5 {
            for l in partitions(n, n) {
                let rep = YoungRepresentation::new(&l);
                for sub in Permutation::all(n - 1) {
                    let phi = rep.matrix(&sub.extend()).unwrap();
                    for (_, alpha) in branch_blocks(&l) {
                        let phi_a = young_orthogonal_rep(&alpha, &sub).unwrap();
                        for i in 0..phi_a.dim {
                            for j in 0..phi_a.dim {
                                let r = branch_index(&l, &alpha, i).unwrap();
                                let c = branch_index(&l, &alpha, j).unwrap();
                                assert!((phi.get(r, c) - phi_a.get(i, j)).abs() < 1e-12);
                            }
                        }
                    }
                    // no coupling between different blocks
                    let block_of: Vec<usize> = rep
                        .tableaux()
                        .iter()
                        .map(|t| t.position(n).unwrap().row)
                        .collect();
                    for r in 0..phi.dim {
                        for c in 0..phi.dim {
                            if block_of[r] != block_of[c] {
                                assert!(phi.get(r, c).abs() < 1e-12);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn matrix_unit_examples() {
        let e = matrix_unit(&p(&[1]), 0, 0, 3).unwrap();
        assert!(e.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
        for d in 2..=4 {
            let e = matrix_unit(&p(&[1, 1]), 0, 0, d).unwrap();
            assert!(e.max_abs_diff(&antisym_projector(d, 2)) < 1e-14);
            assert!((e.trace().re - (d * (d - 1) / 2) as f64).abs() < 1e-12);
        }
        let e = matrix_unit(&p(&[2, 1]), 0, 0, 2).unwrap();
        assert!((e.trace().re - 2.0).abs() < 1e-12);
        assert!(matrix_unit(&p(&[2, 1]), 2, 0, 2).is_err());
        assert!(matches!(
            matrix_unit(&Partition::column(7), 0, 0, 2),
            Err(Error::SizeCap { .. })
        ));
        // vanishing irrep
        let e = matrix_unit(&p(&[1, 1, 1]), 0, 0, 2).unwrap();
        assert!(e.max_abs() < 1e-15);
        assert!(!appears(&p(&[1, 1, 1]), 2));
    }

    #[test]
    fn matrix_units_agree_with_single_unit_builder() {
        let l = p(&[2, 1]);
        let all = matrix_units(&l, 3).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(all[i][j].max_abs_diff(&matrix_unit(&l, i, j, 3).unwrap()) < 1e-14);
            }
        }
    }

    #[test]
    fn matrix_units_are_real_and_adjoint_pairs() {
        let all = matrix_units(&p(&[2, 1]), 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(all[i][j].max_abs_diff(&all[j][i].adjoint()) < 1e-14);
                assert!(all[i][j].data().iter().all(|z| z.im == 0.0));
            }
        }
    }

    #[test]
    fn matrix_units_commute_with_permutations_like_phi() {
        // V(π) E_ij = Σ_k φ(π)_ki E_kj
        let l = p(&[2, 1]);
        let d = 2;
        let units = matrix_units(&l, d).unwrap();
        let rep = YoungRepresentation::new(&l);
        for pi in Permutation::all(3) {
            let v = perm_operator(&pi, d);
            let phi = rep.matrix(&pi).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let lhs = &v * &units[i][j];
                    let mut rhs = ComplexMatrix::zeros(8, 8);
                    for k in 0..2 {
                        rhs.add_scaled(&units[k][j], C64::new(phi.get(k, i), 0.0));
                    }
                    assert!(lhs.max_abs_diff(&rhs) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn projector_examples() {
        let pr = young_projector(&p(&[2, 1]), 3).unwrap();
        assert!((pr.trace().re - 16.0).abs() < 1e-11);
        for (d, n) in [(2, 2), (3, 2), (3, 3), (4, 3)] {
            let pr = young_projector(&Partition::column(n), d).unwrap();
            assert!(pr.max_abs_diff(&antisym_projector(d, n)) < 1e-13);
        }
        let pr = young_projector(&p(&[2, 2]), 2).unwrap();
        assert!(pr.max_abs_diff(&(&pr * &pr)) < 1e-12);
        assert!(pr.hermitian_deviation() < 1e-14);
    }

    #[test]
    fn branching_examples() {
        let d = 3;
        let left = branching_embed(&p(&[1]), 0, 0, d).unwrap();
        assert!(left.max_abs_diff(&ComplexMatrix::identity(d * d)) < 1e-14);
        let right =
            &young_projector(&p(&[2]), d).unwrap() + &young_projector(&p(&[1, 1]), d).unwrap();
        assert!(left.max_abs_diff(&right) < 1e-13);

        let left = branching_embed(&p(&[2]), 0, 0, 2).unwrap();
        assert!((left.trace().re - 6.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_unit_relations() {
        for n in 1..=4 {
            for d in 1..=3usize {
                let side = d.pow(n as u32);
                let mut total = ComplexMatrix::zeros(side, side);
                for l in partitions(n, n) {
                    let units = matrix_units(&l, d).unwrap();
                    let dim = units.len();
                    let m = multiplicity(&l, d).to_string().parse::<f64>().unwrap();
                    for i in 0..dim {
                        total += &units[i][i];
                        for j in 0..dim {
                            let expected_tr = if i == j { m } else { 0.0 };
                            assert!(
                                (units[i][j].trace() - C64::new(expected_tr, 0.0)).norm() < 1e-10
                            );
                            for k in 0..dim {
                                for q in 0..dim {
                                    let prod = &units[i][j] * &units[k][q];
                                    let err = if j == k {
                                        prod.max_abs_diff(&units[i][q])
                                    } else {
                                        prod.max_abs()
                                    };
                                    assert!(err < 1e-10, "n={n} d={d} λ={l} ({i}{j})({k}{q})");
                                }
                            }
                        }
                    }
                }
                assert!(total.max_abs_diff(&ComplexMatrix::identity(side)) < 1e-10);
            }
        }
    }

    #[test]
    fn branching_rule_for_matrix_units() {
        for n in 2..=4 {
            for d in 1..=3usize {
                let side = d.pow(n as u32);
                for alpha in partitions(n - 1, n - 1) {
                    let dim = irrep_dim(&alpha) as usize;
                    for i in 0..dim {
                        for j in 0..dim {
                            let left = branching_embed(&alpha, i, j, d).unwrap();
                            let mut right = ComplexMatrix::zeros(side, side);
                            for lambda in alpha.additions(d) {
                                let r = branch_index(&lambda, &alpha, i).unwrap();
                                let c = branch_index(&lambda, &alpha, j).unwrap();
                                right += &matrix_unit(&lambda, r, c, d).unwrap();
                            }
                            assert!(left.max_abs_diff(&right) < 1e-9, "n={n} d={d} α={alpha}");
                        }
                    }
                }
            }
        }
    }
}
