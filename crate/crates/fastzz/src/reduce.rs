//! Standard persistence of a cell-wise filtration by left-to-right GF(2)
//! column reduction. Two strategies share the pairing contract: the plain
//! scan, and the clearing variant that processes dimensions from high to low
//! and skips columns already known to be births. Both return the identical
//! pair set; the test suite asserts so on random inputs.

use std::io::{self, Write};

use thiserror::Error;

use crate::convert::BoundaryMatrix;

/// Maximal nonzero row of a column, or `None` if the column is empty.
pub fn low(column: &[usize]) -> Option<usize> {
    column.last().copied()
}

/// A birth/death pair of column positions. `dim` is the cell dimension at
/// the birth position; the death cell has dimension `dim + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PersistencePair {
    pub birth_pos: usize,
    pub death_pos: usize,
    pub dim: usize,
}

/// An unpaired column position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EssentialClass {
    pub pos: usize,
    pub dim: usize,
}

/// Pairs and essential classes of a reduction; pairs are sorted by birth
/// position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub pairs: Vec<PersistencePair>,
    pub essential: Vec<EssentialClass>,
}

impl ReductionResult {
    /// Debug dump: one `dim birth_pos death_pos` line per pair.
    pub fn write_pairs(&self, w: &mut impl Write) -> io::Result<()> {
        for pair in &self.pairs {
            writeln!(w, "{} {} {}", pair.dim, pair.birth_pos, pair.death_pos)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReduceError {
    #[error("column {pos}: row id {row} not below the column position")]
    MalformedColumn { pos: usize, row: usize },
    #[error("column {pos}: rows not strictly increasing")]
    UnsortedColumn { pos: usize },
}

fn check_matrix(columns: &[Vec<usize>]) -> Result<(), ReduceError> {
    for (pos, column) in columns.iter().enumerate() {
        if column.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ReduceError::UnsortedColumn { pos });
        }
        if let Some(&last) = column.last() {
            if last >= pos {
                return Err(ReduceError::MalformedColumn { pos, row: last });
            }
        }
    }
    Ok(())
}

/// Hierarchical bitset over row ids, used as the working column during
/// clearing reduction: entry flips are O(1) amortized and the maximal set
/// bit is found by descending one 64-ary level per step. Stored columns stay
/// sparse; only this transient accumulator is dense.
struct BitCursor {
    /// `levels[0]` is the leaf bitmap; a bit at level `k + 1` records that
    /// the corresponding word at level `k` is nonzero.
    levels: Vec<Vec<u64>>,
}

impl BitCursor {
    fn new(bits: usize) -> Self {
        let mut levels = Vec::new();
        let mut len = bits.max(1);
        loop {
            len = len.div_ceil(64);
            levels.push(vec![0u64; len]);
            if len == 1 {
                break;
            }
        }
        Self { levels }
    }

    fn flip(&mut self, i: usize) {
        let word = &mut self.levels[0][i >> 6];
        let was = *word != 0;
        *word ^= 1 << (i & 63);
        let mut child_nonzero = *word != 0;
        if was == child_nonzero {
            return;
        }
        // the child word switched between zero and nonzero: rewrite its bit
        // upwards until a word keeps its status
        let mut bit = i >> 6;
        for level in 1..self.levels.len() {
            let word = &mut self.levels[level][bit >> 6];
            let was = *word != 0;
            if child_nonzero {
                *word |= 1 << (bit & 63);
            } else {
                *word &= !(1 << (bit & 63));
            }
            let now = *word != 0;
            if was == now {
                return;
            }
            child_nonzero = now;
            bit >>= 6;
        }
    }

    fn xor_column(&mut self, rows: &[usize]) {
        for &r in rows {
            self.flip(r);
        }
    }

    fn max(&self) -> Option<usize> {
        let top = self.levels.last().expect("at least one level")[0];
        if top == 0 {
            return None;
        }
        let mut idx = 63 - top.leading_zeros() as usize;
        for level in (0..self.levels.len() - 1).rev() {
            let word = self.levels[level][idx];
            debug_assert_ne!(word, 0, "level bits track nonzero words");
            idx = (idx << 6) + (63 - word.leading_zeros() as usize);
        }
        Some(idx)
    }

    /// Moves all set bits into `out` in ascending order, leaving the cursor
    /// empty.
    fn drain_into(&mut self, out: &mut Vec<usize>) {
        out.clear();
        while let Some(i) = self.max() {
            out.push(i);
            self.flip(i);
        }
        out.reverse();
    }
}

fn xor_into(target: &mut Vec<usize>, other: &[usize], scratch: &mut Vec<usize>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(target, scratch);
}

fn collect_result(
    ncols: usize,
    dims: &[usize],
    pivot_of_row: Vec<Option<usize>>,
) -> ReductionResult {
    let mut paired = vec![false; ncols];
    let mut pairs = Vec::new();
    for (row, owner) in pivot_of_row.iter().enumerate() {
        if let Some(col) = *owner {
            paired[row] = true;
            paired[col] = true;
            pairs.push(PersistencePair {
                birth_pos: row,
                death_pos: col,
                dim: dims[row],
            });
        }
    }
    pairs.sort_unstable();
    let essential = (0..ncols)
        .filter(|&pos| !paired[pos])
        .map(|pos| EssentialClass {
            pos,
            dim: dims[pos],
        })
        .collect();
    ReductionResult { pairs, essential }
}

/// Plain left-to-right reduction. Consumes the matrix.
pub fn reduce_naive(matrix: BoundaryMatrix) -> Result<ReductionResult, ReduceError> {
    let (mut columns, dims) = matrix.into_parts();
    check_matrix(&columns)?;
    let ncols = columns.len();
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; ncols];
    let mut scratch = Vec::new();
    for j in 0..ncols {
        let (head, tail) = columns.split_at_mut(j);
        let column = &mut tail[0];
        while let Some(l) = low(column) {
            match pivot_of_row[l] {
                None => {
                    pivot_of_row[l] = Some(j);
                    break;
                }
                Some(p) => xor_into(column, &head[p], &mut scratch),
            }
        }
    }
    Ok(collect_result(ncols, &dims, pivot_of_row))
}

/// Reduction with clearing: dimensions are processed from high to low, and a
/// column whose position was already used as a pivot row — a known birth —
/// is cleared instead of reduced. The working column lives in a [`BitCursor`]
/// so repeated pivot additions cost their own length, not the length of the
/// accumulated column. Consumes the matrix.
pub fn reduce(matrix: BoundaryMatrix) -> Result<ReductionResult, ReduceError> {
    let (mut columns, dims) = matrix.into_parts();
    check_matrix(&columns)?;
    let ncols = columns.len();
    let max_dim = dims.iter().copied().max().unwrap_or(0);
    let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); max_dim + 1];
    for (pos, &dim) in dims.iter().enumerate() {
        by_dim[dim].push(pos);
    }
    let mut pivot_of_row: Vec<Option<usize>> = vec![None; ncols];
    let mut cleared = vec![false; ncols];
    let mut cursor = BitCursor::new(ncols);
    for dim in (0..=max_dim).rev() {
        for &j in &by_dim[dim] {
            if cleared[j] {
                columns[j] = Vec::new();
                continue;
            }
            if columns[j].is_empty() {
                continue;
            }
            cursor.xor_column(&columns[j]);
            loop {
                match cursor.max() {
                    None => {
                        columns[j] = Vec::new();
                        break;
                    }
                    Some(l) => match pivot_of_row[l] {
                        Some(p) => cursor.xor_column(&columns[p]),
                        None => {
                            pivot_of_row[l] = Some(j);
                            cleared[l] = true;
                            cursor.drain_into(&mut columns[j]);
                            break;
                        }
                    },
                }
            }
        }
    }
    Ok(collect_result(ncols, &dims, pivot_of_row))
}
