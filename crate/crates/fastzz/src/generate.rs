//! Filtration generators: clique-complex zigzags driven by edge events,
//! seeded random simplex-wise zigzags, and random interleavings of up-down
//! filtrations. All generators are deterministic in their seed.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::filtration::{
    FiltrationOp, LiveComplex, OpKind, Simplex, ValidationFailure, ZigzagFiltration,
};

/// Insertion or deletion of a single graph edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeEvent {
    pub kind: OpKind,
    pub u: u32,
    pub v: u32,
}

impl EdgeEvent {
    pub fn insert(u: u32, v: u32) -> Self {
        Self {
            kind: OpKind::Insert,
            u,
            v,
        }
    }

    pub fn delete(u: u32, v: u32) -> Self {
        Self {
            kind: OpKind::Delete,
            u,
            v,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EdgeEventError {
    #[error("self loop at vertex {0}")]
    SelfLoop(u32),
    #[error("edge ({0}, {1}) already live")]
    DuplicateEdge(u32, u32),
    #[error("edge ({0}, {1}) not live")]
    DeleteAbsentEdge(u32, u32),
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("edge event {index}: {kind}")]
    InvalidEdgeEvent { index: usize, kind: EdgeEventError },
    #[error("input filtration invalid: {0}")]
    InvalidInput(#[from] ValidationFailure),
    #[error("op {op_index}: insertion after a deletion, filtration is not up-down")]
    NotUpDown { op_index: usize },
    #[error("{0}")]
    InvalidParameter(String),
}

/// Incremental clique-complex state over a live graph. The live simplicial
/// complex is always the clique complex (up to `max_dim`) of the live edge
/// set, with vertices entering on first incidence and lingering afterwards.
struct CliqueComplexBuilder {
    max_dim: usize,
    adj: BTreeMap<u32, BTreeSet<u32>>,
    vertex_live: BTreeSet<u32>,
    ops: Vec<FiltrationOp>,
    live_cells: usize,
}

impl CliqueComplexBuilder {
    fn new(max_dim: usize) -> Self {
        Self {
            max_dim,
            adj: BTreeMap::new(),
            vertex_live: BTreeSet::new(),
            ops: Vec::new(),
            live_cells: 0,
        }
    }

    fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj.get(&u).is_some_and(|nbrs| nbrs.contains(&v))
    }

    fn common_neighbors(&self, u: u32, v: u32) -> Vec<u32> {
        match (self.adj.get(&u), self.adj.get(&v)) {
            (Some(a), Some(b)) => a.intersection(b).copied().collect(),
            _ => Vec::new(),
        }
    }

    /// All cliques `T` within `cands` (which are pairwise candidates for
    /// extension) of size at most `max_size`, including the empty clique.
    fn cliques_within(&self, cands: &[u32], max_size: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        self.cliques_rec(cands, max_size, &mut current, &mut out);
        out
    }

    fn cliques_rec(
        &self,
        cands: &[u32],
        max_size: usize,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        out.push(current.clone());
        if current.len() == max_size {
            return;
        }
        for (i, &v) in cands.iter().enumerate() {
            if current
                .iter()
                .all(|&u| self.adj.get(&u).is_some_and(|nbrs| nbrs.contains(&v)))
            {
                current.push(v);
                self.cliques_rec(&cands[i + 1..], max_size, current, out);
                current.pop();
            }
        }
    }

    /// Every live clique containing both `u` and `v`, as sorted simplices.
    fn cliques_through_edge(&self, u: u32, v: u32) -> Vec<Simplex> {
        let cands = self.common_neighbors(u, v);
        let max_extra = self.max_dim.saturating_sub(1);
        self.cliques_within(&cands, max_extra)
            .into_iter()
            .map(|mut t| {
                t.push(u);
                t.push(v);
                t.sort_unstable();
                Simplex::from_sorted(t)
            })
            .collect()
    }

    fn apply(&mut self, index: usize, event: EdgeEvent) -> Result<(), GenerateError> {
        let (u, v) = if event.u < event.v {
            (event.u, event.v)
        } else {
            (event.v, event.u)
        };
        if u == v {
            return Err(GenerateError::InvalidEdgeEvent {
                index,
                kind: EdgeEventError::SelfLoop(u),
            });
        }
        match event.kind {
            OpKind::Insert => {
                if self.has_edge(u, v) {
                    return Err(GenerateError::InvalidEdgeEvent {
                        index,
                        kind: EdgeEventError::DuplicateEdge(u, v),
                    });
                }
                for w in [u, v] {
                    if self.vertex_live.insert(w) {
                        self.ops.push(FiltrationOp::insert(Simplex::vertex(w)));
                        self.live_cells += 1;
                    }
                }
                let mut new_cells = self.cliques_through_edge(u, v);
                new_cells.sort_by(|a, b| {
                    (a.vertices().len(), a.vertices()).cmp(&(b.vertices().len(), b.vertices()))
                });
                self.live_cells += new_cells.len();
                self.ops
                    .extend(new_cells.into_iter().map(FiltrationOp::insert));
                self.adj.entry(u).or_default().insert(v);
                self.adj.entry(v).or_default().insert(u);
            }
            OpKind::Delete => {
                if !self.has_edge(u, v) {
                    return Err(GenerateError::InvalidEdgeEvent {
                        index,
                        kind: EdgeEventError::DeleteAbsentEdge(u, v),
                    });
                }
                let mut dead_cells = self.cliques_through_edge(u, v);
                dead_cells.sort_by(|a, b| {
                    (b.vertices().len(), b.vertices()).cmp(&(a.vertices().len(), a.vertices()))
                });
                self.live_cells -= dead_cells.len();
                self.ops
                    .extend(dead_cells.into_iter().map(FiltrationOp::delete));
                self.adj.get_mut(&u).expect("edge endpoint").remove(&v);
                self.adj.get_mut(&v).expect("edge endpoint").remove(&u);
            }
        }
        Ok(())
    }
}

/// Builds the simplex-wise zigzag filtration whose complexes are the clique
/// complexes (up to `max_dim`) of the graphs traced out by `events`. Edge
/// insertion inserts the edge and every newly completed clique in
/// dimension-increasing order; edge deletion removes every clique through
/// the edge in dimension-decreasing order. Vertices are inserted on first
/// incidence and are never deleted here; the result is generally not closed.
pub fn gen_clique_zigzag(
    events: &[EdgeEvent],
    max_dim: usize,
) -> Result<ZigzagFiltration, GenerateError> {
    if max_dim == 0 {
        return Err(GenerateError::InvalidParameter(
            "clique filtrations need max_dim >= 1".to_string(),
        ));
    }
    let mut builder = CliqueComplexBuilder::new(max_dim);
    for (index, &event) in events.iter().enumerate() {
        builder.apply(index, event)?;
    }
    Ok(ZigzagFiltration::new(builder.ops))
}

/// Seeded random edge events over `num_vertices` vertices. The live edge
/// count hovers around three times the vertex count, which keeps clique
/// growth bounded.
pub fn random_edge_events(num_vertices: u32, num_events: usize, seed: u64) -> Vec<EdgeEvent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut driver = EdgeEventDriver::new(num_vertices);
    let mut events = Vec::with_capacity(num_events);
    for _ in 0..num_events {
        match driver.next_event(&mut rng) {
            Some(ev) => events.push(ev),
            None => break,
        }
    }
    events
}

struct EdgeEventDriver {
    num_vertices: u32,
    live: Vec<(u32, u32)>,
    total_pairs: usize,
    target_live: usize,
}

impl EdgeEventDriver {
    fn new(num_vertices: u32) -> Self {
        let n = num_vertices as usize;
        Self {
            num_vertices,
            live: Vec::new(),
            total_pairs: n * n.saturating_sub(1) / 2,
            target_live: (3 * n).max(1),
        }
    }

    fn next_event(&mut self, rng: &mut ChaCha8Rng) -> Option<EdgeEvent> {
        let can_insert = self.live.len() < self.total_pairs;
        let can_delete = !self.live.is_empty();
        let insert = match (can_insert, can_delete) {
            (false, false) => return None,
            (true, false) => true,
            (false, true) => false,
            (true, true) => {
                let p = if self.live.len() >= self.target_live {
                    0.35
                } else {
                    0.55
                };
                rng.random_bool(p)
            }
        };
        if insert {
            loop {
                let u = rng.random_range(0..self.num_vertices);
                let v = rng.random_range(0..self.num_vertices);
                if u == v {
                    continue;
                }
                let key = if u < v { (u, v) } else { (v, u) };
                if self.live.contains(&key) {
                    continue;
                }
                self.live.push(key);
                return Some(EdgeEvent::insert(key.0, key.1));
            }
        } else {
            let idx = rng.random_range(0..self.live.len());
            let (u, v) = self.live.swap_remove(idx);
            Some(EdgeEvent::delete(u, v))
        }
    }
}

/// Random clique-complex zigzag with roughly `m_target` operations: edge
/// events are sampled until the operation count plus the live complex size
/// reaches the target, then the filtration is closed.
pub fn gen_clique_by_ops(
    num_vertices: u32,
    m_target: usize,
    max_dim: usize,
    seed: u64,
) -> Result<ZigzagFiltration, GenerateError> {
    if max_dim == 0 {
        return Err(GenerateError::InvalidParameter(
            "clique filtrations need max_dim >= 1".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut driver = EdgeEventDriver::new(num_vertices);
    let mut builder = CliqueComplexBuilder::new(max_dim);
    let mut index = 0usize;
    while builder.ops.len() + builder.live_cells < m_target {
        let Some(event) = driver.next_event(&mut rng) else {
            break;
        };
        builder.apply(index, event)?;
        index += 1;
    }
    Ok(ZigzagFiltration::new(builder.ops)
        .close()
        .expect("clique builder output is valid"))
}

/// Closed up-down filtration: a random graph is grown edge by edge (clique
/// complexes up to `max_dim`), then everything is deleted, always removing
/// the oldest coface-free cell first. Deleting oldest-first keeps the
/// deletion order close to the insertion order, which leaves
/// [`shuffle_updown`] the most room to interleave. Growth stops once the
/// insertion count reaches `m_target / 2`.
pub fn gen_updown_by_ops(
    num_vertices: u32,
    m_target: usize,
    max_dim: usize,
    seed: u64,
) -> Result<ZigzagFiltration, GenerateError> {
    if max_dim == 0 {
        return Err(GenerateError::InvalidParameter(
            "clique filtrations need max_dim >= 1".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut driver = EdgeEventDriver::new(num_vertices);
    driver.target_live = usize::MAX; // grow only, never too dense to matter
    let mut builder = CliqueComplexBuilder::new(max_dim);
    let mut index = 0usize;
    while builder.ops.len() < m_target / 2 {
        let Some(event) = insert_only(&mut driver, &mut rng) else {
            break;
        };
        builder.apply(index, event)?;
        index += 1;
    }

    let mut ops = builder.ops;
    let mut live = LiveComplex::new();
    let mut inserted_at: HashMap<Simplex, usize> = HashMap::new();
    for (pos, op) in ops.iter().enumerate() {
        live.try_insert(&op.simplex, pos)
            .expect("clique builder output is valid");
        inserted_at.insert(op.simplex.clone(), pos);
    }
    let mut ready: BinaryHeap<Reverse<(usize, Simplex)>> = inserted_at
        .iter()
        .filter(|(s, _)| live.coface_count(s) == Some(0))
        .map(|(s, &pos)| Reverse((pos, s.clone())))
        .collect();
    while let Some(Reverse((_, s))) = ready.pop() {
        live.try_delete(&s).expect("coface-free cells are deletable");
        for facet in s.facets() {
            if live.coface_count(&facet) == Some(0) {
                ready.push(Reverse((inserted_at[&facet], facet)));
            }
        }
        ops.push(FiltrationOp::delete(s));
    }
    Ok(ZigzagFiltration::new(ops))
}

fn insert_only(driver: &mut EdgeEventDriver, rng: &mut ChaCha8Rng) -> Option<EdgeEvent> {
    if driver.live.len() >= driver.total_pairs {
        return None;
    }
    loop {
        let u = rng.random_range(0..driver.num_vertices);
        let v = rng.random_range(0..driver.num_vertices);
        if u == v {
            continue;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        if driver.live.contains(&key) {
            continue;
        }
        driver.live.push(key);
        return Some(EdgeEvent::insert(key.0, key.1));
    }
}

/// Seeded random simplex-wise zigzag over `num_vertices` vertices with
/// simplices of dimension at most `max_dim`. Each step either inserts a
/// simplex whose proper faces are present or deletes one without cofaces,
/// then the filtration is closed. The returned length is `m_target` rounded
/// up to even.
pub fn gen_random_zigzag(
    num_vertices: u32,
    m_target: usize,
    max_dim: usize,
    seed: u64,
) -> ZigzagFiltration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = m_target + (m_target & 1);
    let mut live = LiveComplex::new();
    let mut live_vertices: Vec<u32> = Vec::new();
    let mut insertable: Vec<Simplex> = (0..num_vertices).map(Simplex::vertex).collect();
    let mut deletable: Vec<Simplex> = Vec::new();
    let mut ops: Vec<FiltrationOp> = Vec::new();

    while ops.len() + live.len() < target {
        let can_insert = !insertable.is_empty();
        let can_delete = !deletable.is_empty();
        let insert = match (can_insert, can_delete) {
            (false, false) => break,
            (true, false) => true,
            (false, true) => false,
            (true, true) => rng.random_bool(0.55),
        };
        if insert {
            let s = insertable[rng.random_range(0..insertable.len())].clone();
            live.try_insert(&s, ops.len())
                .expect("insertable candidates stay legal");
            sorted_remove(&mut insertable, &s);
            sorted_insert(&mut deletable, s.clone());
            for facet in s.facets() {
                if live.coface_count(&facet) == Some(1) {
                    sorted_remove(&mut deletable, &facet);
                }
            }
            // any simplex that just became insertable has `s` as its most
            // recently arrived facet, so it is `s` plus one live vertex
            if s.dim() < max_dim {
                for &v in &live_vertices {
                    if let Some(candidate) = s.with_vertex(v) {
                        if !live.contains(&candidate)
                            && candidate.facets().all(|f| live.contains(&f))
                        {
                            sorted_insert(&mut insertable, candidate);
                        }
                    }
                }
            }
            if s.dim() == 0 {
                sorted_insert_u32(&mut live_vertices, s.vertices()[0]);
            }
            ops.push(FiltrationOp::insert(s));
        } else {
            let s = deletable[rng.random_range(0..deletable.len())].clone();
            live.try_delete(&s)
                .expect("deletable candidates stay legal");
            sorted_remove(&mut deletable, &s);
            sorted_insert(&mut insertable, s.clone());
            for facet in s.facets() {
                if live.coface_count(&facet) == Some(0) {
                    sorted_insert(&mut deletable, facet);
                }
            }
            for &v in &live_vertices {
                if let Some(candidate) = s.with_vertex(v) {
                    sorted_remove(&mut insertable, &candidate);
                }
            }
            if s.dim() == 0 {
                sorted_remove_u32(&mut live_vertices, s.vertices()[0]);
            }
            ops.push(FiltrationOp::delete(s));
        }
    }
    ZigzagFiltration::new(ops)
        .close()
        .expect("generated prefix is valid")
}

/// Randomly interleaves the deletions of a valid up-down filtration with its
/// insertions, preserving the relative order among insertions and among
/// deletions, such that every prefix stays a simplicial complex.
pub fn shuffle_updown(f: &ZigzagFiltration, seed: u64) -> Result<ZigzagFiltration, GenerateError> {
    f.validate().into_result()?;
    let mut first_delete = None;
    for (i, op) in f.ops().iter().enumerate() {
        match op.kind {
            OpKind::Delete => {
                if first_delete.is_none() {
                    first_delete = Some(i);
                }
            }
            OpKind::Insert => {
                if first_delete.is_some() {
                    return Err(GenerateError::NotUpDown { op_index: i });
                }
            }
        }
    }
    let inserts: Vec<&Simplex> = f
        .ops()
        .iter()
        .filter(|op| op.kind == OpKind::Insert)
        .map(|op| &op.simplex)
        .collect();
    let deletes: Vec<&Simplex> = f
        .ops()
        .iter()
        .filter(|op| op.kind == OpKind::Delete)
        .map(|op| &op.simplex)
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut live = LiveComplex::new();
    let mut ops = Vec::with_capacity(f.len());
    let (mut i, mut d) = (0usize, 0usize);
    while i < inserts.len() || d < deletes.len() {
        let insert_ready = i < inserts.len();
        // the next deletion in order is legal exactly when its cell has been
        // inserted: all of its cofaces precede it in the deletion order
        let delete_ready = d < deletes.len() && live.contains(deletes[d]);
        let take_insert = match (insert_ready, delete_ready) {
            (true, true) => rng.random_bool(0.5),
            (true, false) => true,
            (false, true) => false,
            (false, false) => unreachable!("up-down interleaving cannot deadlock"),
        };
        if take_insert {
            live.try_insert(inserts[i], ops.len())
                .expect("insertion order preserved from a valid up-down filtration");
            ops.push(FiltrationOp::insert(inserts[i].clone()));
            i += 1;
        } else {
            live.try_delete(deletes[d])
                .expect("deletion order preserved from a valid up-down filtration");
            ops.push(FiltrationOp::delete(deletes[d].clone()));
            d += 1;
        }
    }
    Ok(ZigzagFiltration::new(ops))
}

fn sorted_insert(vec: &mut Vec<Simplex>, item: Simplex) {
    if let Err(pos) = vec.binary_search(&item) {
        vec.insert(pos, item);
    }
}

fn sorted_remove(vec: &mut Vec<Simplex>, item: &Simplex) -> bool {
    match vec.binary_search(item) {
        Ok(pos) => {
            vec.remove(pos);
            true
        }
        Err(_) => false,
    }
}

fn sorted_insert_u32(vec: &mut Vec<u32>, item: u32) {
    if let Err(pos) = vec.binary_search(&item) {
        vec.insert(pos, item);
    }
}

fn sorted_remove_u32(vec: &mut Vec<u32>, item: u32) {
    if let Ok(pos) = vec.binary_search(&item) {
        vec.remove(pos);
    }
}
