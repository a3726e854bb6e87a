//! Simplex-wise zigzag filtrations: domain types, text parsing, validation,
//! and normalization to a closed filtration.
//!
//! A filtration is a sequence of single-simplex insertions and deletions,
//! starting from the empty complex. Every prefix must be a simplicial
//! complex: a simplex can only be inserted when all its proper faces are
//! present, and only deleted when no coface is present. A *closed*
//! filtration also ends at the empty complex.

use std::borrow::Borrow;
use std::fmt;

use rustc_hash::FxHashMap;
use thiserror::Error;

/// A simplex, stored as a strictly increasing list of vertex ids.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Simplex {
    vertices: Vec<u32>,
}

/// Simplex-keyed maps can be probed by a plain vertex slice, which keeps
/// facet lookups allocation-free.
impl Borrow<[u32]> for Simplex {
    fn borrow(&self) -> &[u32] {
        &self.vertices
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimplexError {
    #[error("simplex has no vertices")]
    Empty,
    #[error("vertex {0} repeated")]
    RepeatedVertex(u32),
}

impl Simplex {
    /// Builds a simplex from an arbitrary vertex list; the list is sorted
    /// internally. A repeated vertex is an error.
    pub fn new(mut vertices: Vec<u32>) -> Result<Self, SimplexError> {
        if vertices.is_empty() {
            return Err(SimplexError::Empty);
        }
        vertices.sort_unstable();
        for w in vertices.windows(2) {
            if w[0] == w[1] {
                return Err(SimplexError::RepeatedVertex(w[0]));
            }
        }
        Ok(Self { vertices })
    }

    pub fn vertex(v: u32) -> Self {
        Self { vertices: vec![v] }
    }

    pub fn edge(u: u32, v: u32) -> Self {
        assert_ne!(u, v, "edge endpoints must differ");
        Self {
            vertices: if u < v { vec![u, v] } else { vec![v, u] },
        }
    }

    /// Builds from a list that is already strictly increasing.
    pub(crate) fn from_sorted(vertices: Vec<u32>) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Self { vertices }
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// The codimension-one faces, omitting one vertex each. Vertices have
    /// no facets.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let count = if self.vertices.len() == 1 {
            0
        } else {
            self.vertices.len()
        };
        (0..count).map(move |skip| {
            let vertices = self
                .vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            Simplex { vertices }
        })
    }

    /// True if `self` is a face of `other` (possibly equal). Both vertex
    /// lists are sorted, so this is a linear merge.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        let mut it = other.vertices.iter();
        self.vertices
            .iter()
            .all(|v| it.by_ref().any(|w| w == v))
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// The simplex extended by one extra vertex, or `None` if already present.
    pub fn with_vertex(&self, v: u32) -> Option<Simplex> {
        match self.vertices.binary_search(&v) {
            Ok(_) => None,
            Err(pos) => {
                let mut vertices = self.vertices.clone();
                vertices.insert(pos, v);
                Some(Simplex { vertices })
            }
        }
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.vertices {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

/// Direction of a filtration step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    Insert,
    Delete,
}

/// One filtration step: insertion or deletion of a single simplex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiltrationOp {
    pub kind: OpKind,
    pub simplex: Simplex,
}

impl FiltrationOp {
    pub fn insert(simplex: Simplex) -> Self {
        Self {
            kind: OpKind::Insert,
            simplex,
        }
    }

    pub fn delete(simplex: Simplex) -> Self {
        Self {
            kind: OpKind::Delete,
            simplex,
        }
    }
}

impl fmt::Display for FiltrationOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = match self.kind {
            OpKind::Insert => 'i',
            OpKind::Delete => 'd',
        };
        write!(f, "{code} {}", self.simplex)
    }
}

/// A simplex-wise zigzag filtration, starting from the empty complex.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ZigzagFiltration {
    ops: Vec<FiltrationOp>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: unknown opcode {found:?} (expected \"i\" or \"d\")")]
    UnknownOpcode { line: usize, found: String },
    #[error("line {line}: invalid vertex id {token:?}")]
    InvalidVertex { line: usize, token: String },
    #[error("line {line}: vertex {vertex} repeated within one simplex")]
    RepeatedVertex { line: usize, vertex: u32 },
    #[error("line {line}: operation has no vertex list")]
    EmptySimplex { line: usize },
}

/// Reason an operation is rejected during validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InvalidOp {
    /// Insertion of a simplex with a missing proper face.
    MissingFace { face: Simplex },
    /// Insertion of a simplex that is already present.
    DuplicateInsert,
    /// Deletion of a simplex that is not present.
    DeleteAbsent,
    /// Deletion of a simplex that still has a live coface.
    LiveCoface { coface: Simplex },
}

impl fmt::Display for InvalidOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvalidOp::MissingFace { face } => write!(f, "face {face:?} missing"),
            InvalidOp::DuplicateInsert => write!(f, "simplex already present"),
            InvalidOp::DeleteAbsent => write!(f, "simplex not present"),
            InvalidOp::LiveCoface { coface } => write!(f, "live coface {coface:?}"),
        }
    }
}

/// First offending operation found by [`ZigzagFiltration::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("op {op_index} ({op}): {reason}")]
pub struct ValidationFailure {
    pub op_index: usize,
    pub op: FiltrationOp,
    pub reason: InvalidOp,
}

/// Summary of a valid filtration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiltrationStats {
    /// Number of operations.
    pub len: usize,
    pub inserts: usize,
    pub deletes: usize,
    /// Number of distinct simplices ever inserted.
    pub distinct_simplices: usize,
    /// Largest complex reached over all prefixes.
    pub max_complex_size: usize,
    /// Largest simplex dimension, or `None` for the empty filtration.
    pub max_dim: Option<usize>,
    /// Whether the filtration ends at the empty complex.
    pub closed: bool,
}

impl FiltrationStats {
    /// Average number of times a distinct simplex is inserted; 1.0 means
    /// non-repetitive.
    pub fn repetitiveness(&self) -> f64 {
        if self.distinct_simplices == 0 {
            1.0
        } else {
            self.inserts as f64 / self.distinct_simplices as f64
        }
    }
}

/// Outcome of validating a filtration.
#[derive(Clone, Debug, PartialEq)]
pub enum ValidationReport {
    Valid(FiltrationStats),
    Invalid(ValidationFailure),
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        matches!(self, ValidationReport::Valid(_))
    }

    pub fn into_result(self) -> Result<FiltrationStats, ValidationFailure> {
        match self {
            ValidationReport::Valid(stats) => Ok(stats),
            ValidationReport::Invalid(failure) => Err(failure),
        }
    }
}

impl ZigzagFiltration {
    pub fn new(ops: Vec<FiltrationOp>) -> Self {
        Self { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[FiltrationOp] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<FiltrationOp> {
        self.ops
    }

    /// Parses the line-oriented text format: one op per line, `i v1 .. vk`
    /// or `d v1 .. vk`. Blank lines and lines starting with `#` are ignored.
    /// Vertex lists may be unsorted; a repeated vertex is an error.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut ops = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_ascii_whitespace();
            let opcode = tokens.next().expect("non-empty line has a token");
            let kind = match opcode {
                "i" => OpKind::Insert,
                "d" => OpKind::Delete,
                other => {
                    return Err(ParseError::UnknownOpcode {
                        line,
                        found: other.to_string(),
                    })
                }
            };
            let mut vertices = Vec::new();
            for token in tokens {
                let v: u32 = token.parse().map_err(|_| ParseError::InvalidVertex {
                    line,
                    token: token.to_string(),
                })?;
                vertices.push(v);
            }
            let simplex = Simplex::new(vertices).map_err(|e| match e {
                SimplexError::Empty => ParseError::EmptySimplex { line },
                SimplexError::RepeatedVertex(vertex) => {
                    ParseError::RepeatedVertex { line, vertex }
                }
            })?;
            ops.push(FiltrationOp { kind, simplex });
        }
        Ok(Self { ops })
    }

    /// Checks that every prefix is a simplicial complex and reports either
    /// summary statistics or the first offending operation.
    pub fn validate(&self) -> ValidationReport {
        let mut live = LiveComplex::new();
        let mut inserts = 0usize;
        let mut distinct = std::collections::HashSet::new();
        let mut max_size = 0usize;
        let mut max_dim: Option<usize> = None;
        for (op_index, op) in self.ops.iter().enumerate() {
            let step = match op.kind {
                OpKind::Insert => live.try_insert(&op.simplex, op_index),
                OpKind::Delete => live.try_delete(&op.simplex),
            };
            if let Err(reason) = step {
                return ValidationReport::Invalid(ValidationFailure {
                    op_index,
                    op: op.clone(),
                    reason,
                });
            }
            if op.kind == OpKind::Insert {
                inserts += 1;
                distinct.insert(op.simplex.clone());
                max_dim = Some(max_dim.map_or(op.simplex.dim(), |d| d.max(op.simplex.dim())));
            }
            max_size = max_size.max(live.len());
        }
        ValidationReport::Valid(FiltrationStats {
            len: self.ops.len(),
            inserts,
            deletes: self.ops.len() - inserts,
            distinct_simplices: distinct.len(),
            max_complex_size: max_size,
            max_dim,
            closed: live.is_empty(),
        })
    }

    /// Appends deletions for every remaining simplex so the filtration ends
    /// at the empty complex. Remaining simplices are deleted by descending
    /// dimension, ties broken by most recent insertion first, which keeps
    /// every prefix valid. Idempotent on already-closed filtrations.
    pub fn close(&self) -> Result<ZigzagFiltration, ValidationFailure> {
        let mut live = LiveComplex::new();
        for (op_index, op) in self.ops.iter().enumerate() {
            let step = match op.kind {
                OpKind::Insert => live.try_insert(&op.simplex, op_index),
                OpKind::Delete => live.try_delete(&op.simplex),
            };
            if let Err(reason) = step {
                return Err(ValidationFailure {
                    op_index,
                    op: op.clone(),
                    reason,
                });
            }
        }
        let mut remaining = live.into_live();
        remaining.sort_by(|a, b| {
            (b.0.dim(), b.1, &b.0).cmp(&(a.0.dim(), a.1, &a.0))
        });
        let mut ops = self.ops.clone();
        ops.extend(
            remaining
                .into_iter()
                .map(|(simplex, _)| FiltrationOp::delete(simplex)),
        );
        Ok(ZigzagFiltration { ops })
    }
}

impl fmt::Display for ZigzagFiltration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ZigzagFiltration {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

#[derive(Clone, Debug)]
struct CellState {
    coface_count: usize,
    inserted_at: usize,
}

/// Replay state for a prefix of a filtration: the set of live simplices
/// with immediate-coface counts, enough to check both insertion and
/// deletion legality in O(dim) hash lookups.
#[derive(Clone, Debug, Default)]
pub(crate) struct LiveComplex {
    cells: FxHashMap<Simplex, CellState>,
}

impl LiveComplex {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn len(&self) -> usize {
        self.cells.len()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub(crate) fn contains(&self, s: &Simplex) -> bool {
        self.cells.contains_key(s)
    }

    pub(crate) fn coface_count(&self, s: &Simplex) -> Option<usize> {
        self.cells.get(s).map(|state| state.coface_count)
    }

    pub(crate) fn try_insert(&mut self, s: &Simplex, op_index: usize) -> Result<(), InvalidOp> {
        if self.cells.contains_key(s) {
            return Err(InvalidOp::DuplicateInsert);
        }
        for facet in s.facets() {
            if !self.cells.contains_key(&facet) {
                return Err(InvalidOp::MissingFace { face: facet });
            }
        }
        for facet in s.facets() {
            self.cells
                .get_mut(&facet)
                .expect("facet checked live")
                .coface_count += 1;
        }
        self.cells.insert(
            s.clone(),
            CellState {
                coface_count: 0,
                inserted_at: op_index,
            },
        );
        Ok(())
    }

    pub(crate) fn try_delete(&mut self, s: &Simplex) -> Result<(), InvalidOp> {
        match self.cells.get(s) {
            None => return Err(InvalidOp::DeleteAbsent),
            Some(state) if state.coface_count > 0 => {
                return Err(InvalidOp::LiveCoface {
                    coface: self.smallest_live_coface(s),
                });
            }
            Some(_) => {}
        }
        self.cells.remove(s);
        for facet in s.facets() {
            self.cells
                .get_mut(&facet)
                .expect("facet of live simplex is live")
                .coface_count -= 1;
        }
        Ok(())
    }

    /// Smallest immediate live coface, for error reporting. Only called on
    /// the failure path.
    fn smallest_live_coface(&self, s: &Simplex) -> Simplex {
        self.cells
            .keys()
            .filter(|k| k.dim() == s.dim() + 1 && s.is_face_of(k))
            .min()
            .cloned()
            .expect("coface count positive")
    }

    /// Live simplices with their insertion op index.
    pub(crate) fn into_live(self) -> Vec<(Simplex, usize)> {
        self.cells
            .into_iter()
            .map(|(s, state)| (s, state.inserted_at))
            .collect()
    }
}
