//! Conversion of a closed zigzag filtration into the boundary matrix of an
//! equivalent non-zigzag cell-wise filtration.
//!
//! Every insertion creates a fresh cell, so a simplex inserted twice yields
//! two distinct cells of a Δ-complex. After the scan, each deleted cell is
//! replaced by attaching its cone over a shared apex vertex `ω`, in reverse
//! deletion order. The resulting matrix lists `ω` at position 0, cells `1..=n`
//! in addition order, and cones `n+1..=2n`, where `n` is half the filtration
//! length. Positional metadata needed to map persistence pairs back to
//! zigzag intervals is collected in a [`CellRegistry`].

use std::collections::HashMap;
use std::hash::BuildHasher;
use std::io::{self, Write};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::filtration::{OpKind, Simplex, ZigzagFiltration};

/// Column id of the cone apex vertex.
pub const OMEGA: usize = 0;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConvertError {
    #[error("op {op_index}: insertion of a simplex that is already present")]
    DuplicateInsert { op_index: usize },
    #[error("op {op_index}: operation on an absent simplex")]
    AbsentSimplex { op_index: usize },
    #[error("op {op_index}: facet {facet:?} has no live cell")]
    MissingFacet { op_index: usize, facet: Simplex },
    #[error("filtration does not end at the empty complex ({live} cells remain)")]
    NotClosed { live: usize },
}

/// One cell of the converted complex, with its positions in the input
/// filtration and its rank among additions and deletions.
#[derive(Clone, Debug)]
pub struct CellRecord {
    pub simplex: Simplex,
    pub dim: usize,
    /// Facet cell ids, sorted ascending.
    pub boundary: Vec<usize>,
    /// Index of the insertion op in the input filtration.
    pub pos_add: usize,
    /// Index of the deletion op in the input filtration.
    pub pos_del: usize,
    /// 1-based rank among additions; equal to the cell id.
    pub add_rank: usize,
    /// 1-based rank among deletions.
    pub del_rank: usize,
}

/// All cells created by a conversion, addressable by id, addition rank, or
/// deletion rank. Cell ids are dense: the k-th addition gets id k, so ids and
/// matrix positions coincide for the first `n` columns.
#[derive(Clone, Debug)]
pub struct CellRegistry {
    cells: Vec<CellRecord>,
    del_order: Vec<usize>,
}

impl CellRegistry {
    /// Number of cells; half the length of the input filtration.
    pub fn n(&self) -> usize {
        self.cells.len()
    }

    /// The cell with the given id (1-based; equals its addition rank).
    pub fn cell(&self, id: usize) -> &CellRecord {
        &self.cells[id - 1]
    }

    pub fn cell_of_add_rank(&self, rank: usize) -> &CellRecord {
        self.cell(rank)
    }

    pub fn cell_of_del_rank(&self, rank: usize) -> &CellRecord {
        self.cell(self.del_order[rank - 1])
    }

    pub fn cells(&self) -> impl Iterator<Item = &CellRecord> {
        self.cells.iter()
    }
}

/// Ordered sparse GF(2) boundary matrix: one column per cell of the
/// converted non-zigzag filtration, each a strictly sorted list of row ids.
/// Columns are packed into one flat entry buffer, so building a matrix with
/// millions of columns costs a handful of allocations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    /// `offsets[pos] .. offsets[pos + 1]` indexes the rows of column `pos`.
    offsets: Vec<usize>,
    entries: Vec<usize>,
    dims: Vec<usize>,
}

impl BoundaryMatrix {
    pub(crate) fn with_capacity(columns: usize) -> Self {
        let mut offsets = Vec::with_capacity(columns + 1);
        offsets.push(0);
        Self {
            offsets,
            entries: Vec::new(),
            dims: Vec::with_capacity(columns),
        }
    }

    pub(crate) fn push_column(&mut self, dim: usize, rows: &[usize]) {
        self.entries.extend_from_slice(rows);
        self.offsets.push(self.entries.len());
        self.dims.push(dim);
    }

    pub fn from_columns(columns: Vec<(usize, Vec<usize>)>) -> Self {
        let mut matrix = Self::with_capacity(columns.len());
        for (dim, rows) in columns {
            matrix.push_column(dim, &rows);
        }
        matrix
    }

    /// Number of columns.
    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn column(&self, pos: usize) -> &[usize] {
        &self.entries[self.offsets[pos]..self.offsets[pos + 1]]
    }

    /// Cell dimension of the column at `pos`.
    pub fn dim(&self, pos: usize) -> usize {
        self.dims[pos]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Unpacks into one growable vector per column plus the dimension list.
    pub(crate) fn into_parts(self) -> (Vec<Vec<usize>>, Vec<usize>) {
        let columns = (0..self.len()).map(|pos| self.column(pos).to_vec()).collect();
        (columns, self.dims)
    }

    /// Text dump for differential testing: one column per line,
    /// `pos dim: r1 r2 ...`.
    pub fn write_debug(&self, w: &mut impl Write) -> io::Result<()> {
        for pos in 0..self.len() {
            write!(w, "{pos} {}:", self.dims[pos])?;
            for row in self.column(pos) {
                write!(w, " {row}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// GF(2) sum of the boundaries of the entries of every column is empty.
    /// Quadratic in column size; meant for tests and debugging.
    pub fn boundaries_square_to_zero(&self) -> bool {
        (0..self.len()).all(|pos| {
            let mut acc: Vec<usize> = Vec::new();
            for &row in self.column(pos) {
                acc = symmetric_difference(&acc, self.column(row));
            }
            acc.is_empty()
        })
    }
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Boundary column of a new cell for simplex `s`: the current cell id of
/// each facet, sorted. `cid` maps each live simplex to its most recent cell.
pub fn cell_boundary<S: BuildHasher>(
    s: &Simplex,
    cid: &HashMap<Simplex, usize, S>,
    op_index: usize,
) -> Result<Vec<usize>, ConvertError> {
    let vertices = s.vertices();
    if vertices.len() == 1 {
        return Ok(Vec::new());
    }
    let mut column = Vec::with_capacity(vertices.len());
    let mut scratch = Vec::with_capacity(vertices.len() - 1);
    for skip in 0..vertices.len() {
        scratch.clear();
        scratch.extend(vertices.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v));
        match cid.get(scratch.as_slice()) {
            Some(&id) => column.push(id),
            None => {
                return Err(ConvertError::MissingFacet {
                    op_index,
                    facet: Simplex::new(scratch).expect("facet of a valid simplex"),
                })
            }
        }
    }
    column.sort_unstable();
    Ok(column)
}

/// Boundary column of the cone over the cell `del_id`: the cell itself, the
/// cones of its boundary cells, and the apex `ω` for vertices. `matrix` is
/// the partially built matrix, which already holds the column of `del_id`.
pub fn coned_cell_boundary(
    del_id: usize,
    matrix: &BoundaryMatrix,
    cone_ids: &[Option<usize>],
) -> Vec<usize> {
    let mut column = vec![del_id];
    if matrix.dim(del_id) == 0 {
        column.push(OMEGA);
    } else {
        for &facet in matrix.column(del_id) {
            column.push(cone_ids[facet].expect("cones attach in reverse deletion order"));
        }
    }
    column.sort_unstable();
    column
}

/// Converts a valid closed filtration into the boundary matrix of the
/// equivalent non-zigzag filtration, together with the registry of cells.
/// The matrix has `m + 1` columns for an input of length `m`.
pub fn convert_filt(
    f: &ZigzagFiltration,
) -> Result<(BoundaryMatrix, CellRegistry), ConvertError> {
    struct PendingCell {
        simplex: Simplex,
        dim: usize,
        boundary: Vec<usize>,
        pos_add: usize,
        pos_del: usize,
    }

    let mut cid: FxHashMap<Simplex, usize> =
        FxHashMap::with_capacity_and_hasher(f.len() / 2, Default::default());
    let mut cells: Vec<PendingCell> = Vec::with_capacity(f.len() / 2);
    let mut del_list: Vec<usize> = Vec::with_capacity(f.len() / 2);

    for (op_index, op) in f.ops().iter().enumerate() {
        match op.kind {
            OpKind::Insert => {
                if cid.contains_key(&op.simplex) {
                    return Err(ConvertError::DuplicateInsert { op_index });
                }
                let boundary = cell_boundary(&op.simplex, &cid, op_index)?;
                let id = cells.len() + 1;
                cells.push(PendingCell {
                    simplex: op.simplex.clone(),
                    dim: op.simplex.dim(),
                    boundary,
                    pos_add: op_index,
                    pos_del: usize::MAX,
                });
                cid.insert(op.simplex.clone(), id);
            }
            OpKind::Delete => {
                let id = cid
                    .remove(&op.simplex)
                    .ok_or(ConvertError::AbsentSimplex { op_index })?;
                cells[id - 1].pos_del = op_index;
                del_list.push(id);
            }
        }
    }
    if !cid.is_empty() {
        return Err(ConvertError::NotClosed { live: cid.len() });
    }
    let n = cells.len();
    debug_assert_eq!(del_list.len(), n);

    // matrix columns: ω, then cells by id, then cones in reverse deletion order
    let mut matrix = BoundaryMatrix::with_capacity(2 * n + 1);
    matrix.push_column(0, &[]);
    for cell in &cells {
        matrix.push_column(cell.dim, &cell.boundary);
    }
    let mut cone_ids: Vec<Option<usize>> = vec![None; n + 1];
    for &del_id in del_list.iter().rev() {
        cone_ids[del_id] = Some(matrix.len());
        let column = coned_cell_boundary(del_id, &matrix, &cone_ids);
        matrix.push_column(matrix.dim(del_id) + 1, &column);
    }

    let mut records: Vec<CellRecord> = cells
        .into_iter()
        .enumerate()
        .map(|(idx, cell)| CellRecord {
            simplex: cell.simplex,
            dim: cell.dim,
            boundary: cell.boundary,
            pos_add: cell.pos_add,
            pos_del: cell.pos_del,
            add_rank: idx + 1,
            del_rank: 0,
        })
        .collect();
    for (rank0, &id) in del_list.iter().enumerate() {
        records[id - 1].del_rank = rank0 + 1;
    }

    Ok((
        matrix,
        CellRegistry {
            cells: records,
            del_order: del_list,
        },
    ))
}
