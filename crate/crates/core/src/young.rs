//! Young-diagram combinatorics.
//!
//! Cells use 1-based `(row, col)` coordinates. Everything that feeds the
//! dual constant is computed in exact rational arithmetic.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<usize>,
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

/// A cell of a Young diagram, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// `col - row`.
    pub fn content(&self) -> i64 {
        self.col as i64 - self.row as i64
    }
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} has a zero part"
            )));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!(
                "{parts:?} is not weakly decreasing"
            )));
        }
        Ok(Self { parts })
    }

    /// `[n]`.
    pub fn row(n: usize) -> Self {
        Self { parts: vec![n] }
    }

    /// `[1^n]`.
    pub fn column(n: usize) -> Self {
        Self { parts: vec![1; n] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Number of cells.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of rows.
    pub fn height(&self) -> usize {
        self.parts.len()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        cell.row >= 1
            && cell.col >= 1
            && cell.row <= self.height()
            && cell.col <= self.parts[cell.row - 1]
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (1..=len).map(move |c| Cell::new(r + 1, c)))
    }

    /// Column lengths.
    pub fn conjugate(&self) -> Partition {
        let parts = (1..=self.parts[0])
            .map(|c| self.parts.iter().filter(|&&len| len >= c).count())
            .collect();
        Partition { parts }
    }

    /// Remove `cell`; `None` if it is not a removable corner, or if the
    /// diagram would become empty.
    pub fn remove(&self, cell: Cell) -> Option<Partition> {
        if !self.contains(cell) || self.parts[cell.row - 1] != cell.col {
            return None;
        }
        if cell.row < self.height() && self.parts[cell.row] == cell.col {
            return None;
        }
        let mut parts = self.parts.clone();
        parts[cell.row - 1] -= 1;
        if parts[cell.row - 1] == 0 {
            parts.pop();
        }
        if parts.is_empty() {
            return None;
        }
        Some(Partition { parts })
    }

    /// Diagrams `β ∈ λ` obtained by removing one corner, in corner order
    /// (top corner first), paired with the removed cell.
    pub fn removals(&self) -> Vec<(Cell, Partition)> {
        corner_boxes(self)
            .into_iter()
            .filter_map(|c| self.remove(c).map(|p| (c, p)))
            .collect()
    }

    /// Diagrams `λ ∋ α` obtained by adding one cell, with height at most
    /// `max_height`, ordered top row first.
    pub fn additions(&self, max_height: usize) -> Vec<Partition> {
        let mut out = Vec::new();
        for r in 0..=self.height() {
            let len = self.parts.get(r).copied().unwrap_or(0);
            let above = if r == 0 {
                usize::MAX
            } else {
                self.parts[r - 1]
            };
            if len < above {
                let mut parts = self.parts.clone();
                if r == parts.len() {
                    parts.push(1);
                } else {
                    parts[r] += 1;
                }
                if parts.len() <= max_height {
                    out.push(Partition { parts });
                }
            }
        }
        out
    }
}

/// All partitions of `n` with at most `max_height` rows, lexicographically
/// descending.
pub fn partitions(n: usize, max_height: usize) -> Vec<Partition> {
    fn rec(
        remaining: usize,
        max_part: usize,
        rows_left: usize,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Partition>,
    ) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        if rows_left == 0 {
            return;
        }
        for part in (1..=max_part.min(remaining)).rev() {
            prefix.push(part);
            rec(remaining - part, part, rows_left - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, n, max_height, &mut Vec::new(), &mut out);
    out
}

/// Arm + leg + 1.
pub fn hook_length(lambda: &Partition, cell: Cell) -> Result<usize> {
    if !lambda.contains(cell) {
        return Err(Error::CellOutside {
            row: cell.row,
            col: cell.col,
        });
    }
    let arm = lambda.parts[cell.row - 1] - cell.col;
    let leg = lambda.parts[cell.row..]
        .iter()
        .filter(|&&len| len >= cell.col)
        .count();
    Ok(arm + leg + 1)
}

fn hook_product(lambda: &Partition) -> BigUint {
    lambda
        .cells()
        .map(|c| BigUint::from(hook_length(lambda, c).expect("cell of its own diagram")))
        .product()
}

/// Dimension of the S_n irrep `λ`, by the hook-length formula.
pub fn irrep_dim(lambda: &Partition) -> u64 {
    let factorial: BigUint = (1..=lambda.size()).map(BigUint::from).product();
    (factorial / hook_product(lambda))
        .to_u64()
        .expect("irrep dimension fits in u64")
}

/// Multiplicity `m_λ` of `λ` in `(C^d)^{⊗n}` (dimension of the U(d) irrep),
/// by the hook-content formula `∏ (d - i + j) / h(i, j)`. Zero when the
/// height exceeds `d`.
pub fn multiplicity(lambda: &Partition, d: usize) -> BigUint {
    if lambda.height() > d {
        return BigUint::zero();
    }
    let contents: BigUint = lambda
        .cells()
        .map(|c| BigUint::from((d as i64 + c.content()) as u64))
        .product();
    contents / hook_product(lambda)
}

/// `(k_1, p_1, ..., k_s, p_s)`: `k_i` counts the rows of the `i`-th distinct
/// length, `p_i` is the drop to the next distinct length (or to zero).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StepRepresentation {
    pub pairs: Vec<(usize, usize)>,
}

impl StepRepresentation {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() || pairs.iter().any(|&(k, p)| k == 0 || p == 0) {
            return Err(Error::InvalidPartition(format!(
                "step representation {pairs:?} needs positive entries"
            )));
        }
        Ok(Self { pairs })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `Σ_{i ≤ j} k_i p_j`.
    pub fn size(&self) -> usize {
        let mut total = 0;
        let mut rows_so_far = 0;
        // row length of block j is p_j + ... + p_s
        for j in 0..self.pairs.len() {
            rows_so_far += self.pairs[j].0;
            total += rows_so_far * self.pairs[j].1;
        }
        total
    }

    /// Flattened `(k_1, p_1, k_2, p_2, ...)`.
    pub fn flat(&self) -> Vec<usize> {
        self.pairs.iter().flat_map(|&(k, p)| [k, p]).collect()
    }

    pub fn to_partition(&self) -> Partition {
        let mut parts = Vec::new();
        for (i, &(k, _)) in self.pairs.iter().enumerate() {
            let len: usize = self.pairs[i..].iter().map(|&(_, p)| p).sum();
            parts.extend(std::iter::repeat_n(len, k));
        }
        Partition { parts }
    }
}

pub fn step_representation(lambda: &Partition) -> StepRepresentation {
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let parts = &lambda.parts;
    let mut i = 0;
    while i < parts.len() {
        let len = parts[i];
        let k = parts[i..].iter().take_while(|&&x| x == len).count();
        let next = parts.get(i + k).copied().unwrap_or(0);
        pairs.push((k, len - next));
        i += k;
    }
    StepRepresentation { pairs }
}

/// Removable corners `c_j = (k_1 + ... + k_j, p_j + ... + p_s)`, top first.
pub fn corner_boxes(lambda: &Partition) -> Vec<Cell> {
    let step = step_representation(lambda);
    let mut row = 0;
    step.pairs
        .iter()
        .enumerate()
        .map(|(j, &(k, _))| {
            row += k;
            let col = step.pairs[j..].iter().map(|&(_, p)| p).sum();
            Cell::new(row, col)
        })
        .collect()
}

/// `|i_1 - i_2| + |j_1 - j_2|`.
pub fn axial_distance(a: Cell, b: Cell) -> usize {
    a.row.abs_diff(b.row) + a.col.abs_diff(b.col)
}

fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn require_feasible(lambda: &Partition, d: usize) -> Result<()> {
    if lambda.height() > d {
        return Err(Error::ZeroMultiplicity(format!("{lambda} with d={d}")));
    }
    Ok(())
}

/// `c(λ) = Σ_{β ∈ λ} m_β / m_λ`, directly from multiplicities.
pub fn c_lambda_brute(lambda: &Partition, d: usize) -> Result<BigRational> {
    require_feasible(lambda, d)?;
    let m_lambda = BigInt::from(multiplicity(lambda, d));
    let sum: BigUint = if lambda.size() == 1 {
        // removing the only cell leaves the empty diagram, m = 1
        BigUint::one()
    } else {
        lambda
            .removals()
            .iter()
            .map(|(_, beta)| multiplicity(beta, d))
            .sum()
    };
    Ok(BigRational::new(BigInt::from(sum), m_lambda))
}

/// The two products over corner pairs shared by the closed form of `c(λ)`
/// and the Vershik identity, for corner `j` (0-based).
fn corner_weight(step: &StepRepresentation, corners: &[Cell], j: usize) -> BigRational {
    let one = BigRational::one();
    let mut w = BigRational::from_integer(BigInt::from(step.pairs[j].0 * step.pairs[j].1));
    for i in 0..j {
        w *= &one
            + ratio(
                step.pairs[i].0 as u64,
                axial_distance(corners[i], corners[j]) as u64,
            );
    }
    for i in j + 1..step.len() {
        w *= &one
            + ratio(
                step.pairs[i].1 as u64,
                axial_distance(corners[j], corners[i]) as u64,
            );
    }
    w
}

/// Closed form of `c(λ)` over the step representation.
pub fn c_lambda_closed(lambda: &Partition, d: usize) -> Result<BigRational> {
    require_feasible(lambda, d)?;
    let step = step_representation(lambda);
    let corners = corner_boxes(lambda);
    let mut total = BigRational::zero();
    for j in 0..step.len() {
        let rows: usize = step.pairs[..=j].iter().map(|&(k, _)| k).sum();
        let cols: usize = step.pairs[j..].iter().map(|&(_, p)| p).sum();
        let denom = d as i64 - rows as i64 + cols as i64;
        total += corner_weight(&step, &corners, j) / BigRational::from_integer(BigInt::from(denom));
    }
    Ok(total)
}

/// Left side of the Vershik identity; equals `n` for every `λ ⊢ n`.
pub fn vershik_sum(lambda: &Partition) -> BigRational {
    let step = step_representation(lambda);
    let corners = corner_boxes(lambda);
    (0..step.len())
        .map(|j| corner_weight(&step, &corners, j))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxC {
    /// Every partition attaining the maximum, in [`partitions`] order.
    pub maximizers: Vec<Partition>,
    pub value: BigRational,
    /// `c(λ)` for every feasible `λ`.
    pub table: Vec<(Partition, BigRational)>,
}

impl MaxC {
    pub fn argmax(&self) -> &Partition {
        &self.maximizers[0]
    }

    pub fn is_unique(&self) -> bool {
        self.maximizers.len() == 1
    }
}

/// Maximize `c(λ)` over `λ ⊢ n` with at most `d` rows.
pub fn max_c(n: usize, d: usize) -> Result<MaxC> {
    if n == 0 || n > d {
        return Err(Error::OutOfRange(format!(
            "max_c needs 1 <= n <= d, got n={n}, d={d}"
        )));
    }
    let table: Vec<(Partition, BigRational)> = partitions(n, d)
        .into_iter()
        .map(|lambda| {
            let c = c_lambda_closed(&lambda, d)?;
            Ok((lambda, c))
        })
        .collect::<Result<_>>()?;
    let value = table
        .iter()
        .map(|(_, c)| c)
        .max()
        .cloned()
        .expect("nonempty");
    let maximizers = table
        .iter()
        .filter(|(_, c)| *c == value)
        .map(|(l, _)| l.clone())
        .collect();
    Ok(MaxC {
        maximizers,
        value,
        table,
    })
}

/// Optimal conjugation fidelity `(k+1)/(d(d-k))` as an exact rational.
pub fn optimal_fidelity(d: usize, k: usize) -> BigRational {
    ratio((k + 1) as u64, (d * (d - k)) as u64)
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}
