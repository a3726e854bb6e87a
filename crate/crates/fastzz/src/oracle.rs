//! Brute-force zigzag barcode oracle for small filtrations.
//!
//! The oracle is deliberately independent of the conversion pipeline: it
//! computes a GF(2) homology basis for every complex in the filtration, the
//! inclusion-induced maps between neighbours, and then recovers interval
//! multiplicities from the rank invariant of restricted windows. The rank of
//! a window `[i, j]` is the rank of the canonical map from the space of
//! compatible sections (the limit of the restricted diagram) to its colimit,
//! both built as explicit GF(2) matrices. Interval multiplicities follow by
//! two-dimensional inclusion-exclusion over window ranks.
//!
//! Cost grows with the square of the filtration length times dense matrix
//! work, so filtrations are capped at [`DEFAULT_ORACLE_BOUND`] operations
//! unless a larger bound is requested explicitly.

use std::collections::HashMap;

use thiserror::Error;

use crate::barcode::{interval_type_from_ops, ZigzagInterval};
use crate::filtration::{OpKind, Simplex, ValidationFailure, ZigzagFiltration};
use crate::gf2::{BitVec, Echelon};
#[cfg(feature = "parallel")]
use crate::par::ParallelIterator;
use crate::par::MaybeParIter;

/// Default cap on filtration length accepted by the oracle.
pub const DEFAULT_ORACLE_BOUND: usize = 64;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("filtration invalid: {0}")]
    InvalidInput(#[from] ValidationFailure),
    #[error("filtration must end at the empty complex")]
    NotClosed,
    #[error("filtration length {len} exceeds oracle bound {bound}")]
    BoundExceeded { len: usize, bound: usize },
    #[error("window [{i}, {j}] out of range for m = {m}")]
    IndexOutOfRange { i: usize, j: usize, m: usize },
    #[error("oracle inconsistency: {0}")]
    Inconsistent(String),
}

/// Homology bases of every complex in a filtration together with the
/// inclusion-induced maps along every arrow.
pub struct HomologyDiagram {
    m: usize,
    /// Arrow directions; `true` for insertion (forward inclusion).
    forward: Vec<bool>,
    /// `h[p][t]` = dim H_p(K_t) for `t` in `0..=m`.
    h: Vec<Vec<usize>>,
    /// `maps[p][t]`: the induced map along arrow `t`, one column per basis
    /// vector of the smaller complex, with coordinates in the basis of the
    /// larger one. Forward arrows map from `t` into `t+1`, backward arrows
    /// from `t+1` into `t`.
    maps: Vec<Vec<Vec<BitVec>>>,
    /// `reps[p][t]`: cycle representatives of the basis of H_p(K_t), as
    /// chains over the global simplex index space of dimension `p`.
    pub(crate) reps: Vec<Vec<Vec<BitVec>>>,
}

impl HomologyDiagram {
    pub fn m(&self) -> usize {
        self.m
    }

    /// dim H_p(K_t); zero beyond the computed range.
    pub fn betti(&self, p: usize, t: usize) -> usize {
        self.h.get(p).map_or(0, |row| row[t])
    }

    pub fn max_dim(&self) -> usize {
        self.h.len().saturating_sub(1)
    }
}

/// Global first-appearance index of every distinct simplex, per dimension.
struct SimplexTables {
    /// `count[p]` = number of distinct p-simplices in the filtration.
    count: Vec<usize>,
    /// `facets[p][gid]` = global ids of the facets, in dimension `p - 1`.
    facets: Vec<Vec<Vec<usize>>>,
}

fn build_tables(f: &ZigzagFiltration, pmax: usize) -> (SimplexTables, HashMap<Simplex, usize>) {
    let mut ids: HashMap<Simplex, usize> = HashMap::new();
    let mut count = vec![0usize; pmax + 1];
    let mut facets: Vec<Vec<Vec<usize>>> = vec![Vec::new(); pmax + 1];
    for op in f.ops() {
        if op.kind != OpKind::Insert || ids.contains_key(&op.simplex) {
            continue;
        }
        let p = op.simplex.dim();
        let gid = count[p];
        count[p] += 1;
        ids.insert(op.simplex.clone(), gid);
        let facet_ids = op
            .simplex
            .facets()
            .map(|facet| *ids.get(&facet).expect("faces appear before cofaces"))
            .collect();
        facets[p].push(facet_ids);
    }
    (SimplexTables { count, facets }, ids)
}

/// Homology basis of one complex in one dimension, with an elimination
/// structure for expressing arbitrary cycles in that basis.
struct HomologySpace {
    reps: Vec<BitVec>,
    /// Echelon over `[reps | boundary columns]`; combination coordinates
    /// `0..reps.len()` give the basis expression of a reduced cycle.
    expressor: Echelon,
}

impl HomologySpace {
    fn express(&self, cycle: &BitVec) -> BitVec {
        let mut residue = cycle.clone();
        let mut comb = BitVec::zeros(self.expressor.generators());
        self.expressor.reduce(&mut residue, &mut comb);
        assert!(
            residue.is_zero(),
            "chain is not a cycle of the target complex"
        );
        comb.extract(0, self.reps.len(), self.reps.len(), 0)
    }
}

fn boundary_chain(tables: &SimplexTables, p: usize, gid: usize, rows: usize) -> BitVec {
    let mut col = BitVec::zeros(rows);
    if p > 0 {
        for &facet in &tables.facets[p][gid] {
            col.flip(facet);
        }
    }
    col
}

fn homology_space(tables: &SimplexTables, live: &[Vec<usize>], p: usize) -> HomologySpace {
    let chain_rows = tables.count[p];
    let boundary_rows = if p == 0 { 0 } else { tables.count[p - 1] };
    let live_p = &live[p];
    let live_above: &[usize] = live.get(p + 1).map_or(&[], |v| v.as_slice());

    // cycles: kernel of the boundary operator on live p-cells
    let mut kernel_ech = Echelon::new(boundary_rows, live_p.len());
    let mut cycles: Vec<BitVec> = Vec::new();
    for &gid in live_p {
        let col = boundary_chain(tables, p, gid, boundary_rows);
        if let Some(comb) = kernel_ech.insert(col) {
            let mut cycle = BitVec::zeros(chain_rows);
            for bit in comb.ones() {
                cycle.flip(live_p[bit]);
            }
            cycles.push(cycle);
        }
    }

    // boundaries: image of the boundary operator on live (p+1)-cells
    let mut quotient = Echelon::new(chain_rows, 0);
    for &gid in live_above {
        quotient.insert(boundary_chain(tables, p + 1, gid, chain_rows));
    }

    // extend the boundary space by independent cycles; reduced residues are
    // still cycles, and become the homology representatives
    let mut reps = Vec::new();
    for cycle in cycles {
        if quotient.insert(cycle).is_none() {
            reps.push(quotient.last_reduced().clone());
        }
    }

    let mut expressor = Echelon::new(chain_rows, reps.len() + live_above.len());
    for rep in &reps {
        let stored = expressor.insert(rep.clone());
        debug_assert!(stored.is_none(), "representatives are independent");
    }
    for &gid in live_above {
        expressor.insert(boundary_chain(tables, p + 1, gid, chain_rows));
    }
    HomologySpace { reps, expressor }
}

/// Computes homology bases and induced maps for every complex of a valid
/// closed filtration, up to homology dimension `max_dim`. Refuses filtrations
/// longer than [`DEFAULT_ORACLE_BOUND`].
pub fn build_diagram(
    f: &ZigzagFiltration,
    max_dim: usize,
) -> Result<HomologyDiagram, OracleError> {
    build_diagram_bounded(f, max_dim, DEFAULT_ORACLE_BOUND)
}

/// As [`build_diagram`] with an explicit length bound.
pub fn build_diagram_bounded(
    f: &ZigzagFiltration,
    max_dim: usize,
    bound: usize,
) -> Result<HomologyDiagram, OracleError> {
    let stats = f.validate().into_result()?;
    if !stats.closed {
        return Err(OracleError::NotClosed);
    }
    if stats.len > bound {
        return Err(OracleError::BoundExceeded {
            len: stats.len,
            bound,
        });
    }
    let m = stats.len;
    let top_dim = stats.max_dim;
    let pmax = top_dim.map_or(0, |d| d.min(max_dim));
    let table_dim = top_dim.unwrap_or(0);
    let (tables, ids) = build_tables(f, table_dim);

    // live cell snapshots per complex index
    let mut live: Vec<Vec<Vec<usize>>> = Vec::with_capacity(m + 1);
    let mut current: Vec<Vec<usize>> = vec![Vec::new(); table_dim + 1];
    live.push(current.clone());
    for op in f.ops() {
        let p = op.simplex.dim();
        let gid = ids[&op.simplex];
        match op.kind {
            OpKind::Insert => {
                let pos = current[p].binary_search(&gid).unwrap_err();
                current[p].insert(pos, gid);
            }
            OpKind::Delete => {
                let pos = current[p].binary_search(&gid).expect("validated delete");
                current[p].remove(pos);
            }
        }
        live.push(current.clone());
    }

    // homology of every complex, then induced maps along every arrow
    let spaces: Vec<Vec<HomologySpace>> = live
        .maybe_par_iter()
        .map(|snapshot| {
            (0..=pmax)
                .map(|p| homology_space(&tables, &snapshot, p))
                .collect()
        })
        .collect();

    let forward: Vec<bool> = f.ops().iter().map(|op| op.kind == OpKind::Insert).collect();
    let mut h = vec![vec![0usize; m + 1]; pmax + 1];
    let mut maps = vec![Vec::with_capacity(m); pmax + 1];
    let mut reps = vec![Vec::with_capacity(m + 1); pmax + 1];
    for (p, h_row) in h.iter_mut().enumerate() {
        for (t, space) in spaces.iter().enumerate() {
            h_row[t] = space[p].reps.len();
        }
    }
    for p in 0..=pmax {
        for t in 0..m {
            let (small, large) = if forward[t] {
                (&spaces[t][p], &spaces[t + 1][p])
            } else {
                (&spaces[t + 1][p], &spaces[t][p])
            };
            let cols = small.reps.iter().map(|rep| large.express(rep)).collect();
            maps[p].push(cols);
        }
    }
    for (p, reps_row) in reps.iter_mut().enumerate() {
        for space in &spaces {
            reps_row.push(space[p].reps.clone());
        }
    }

    Ok(HomologyDiagram {
        m,
        forward,
        h,
        maps,
        reps,
    })
}

/// Rank of the canonical limit-to-colimit map of the diagram restricted to
/// complexes `i ..= j`, i.e. the number of barcode intervals of dimension `p`
/// containing `[i, j]`.
pub fn rank_invariant(
    diag: &HomologyDiagram,
    p: usize,
    i: usize,
    j: usize,
) -> Result<usize, OracleError> {
    if i < 1 || j < i || diag.m < 2 || j > diag.m - 1 {
        return Err(OracleError::IndexOutOfRange { i, j, m: diag.m });
    }
    Ok(diag.window_rank(p, i, j))
}

impl HomologyDiagram {
    fn window_rank(&self, p: usize, i: usize, j: usize) -> usize {
        let Some(h) = self.h.get(p) else { return 0 };
        // the canonical map factors through every H_p(K_t) in the window
        if (i..=j).any(|t| h[t] == 0) {
            return 0;
        }
        let slots = j - i + 1;
        let mut offset = vec![0usize; slots + 1];
        for (s, t) in (i..=j).enumerate() {
            offset[s + 1] = offset[s] + h[t];
        }
        let total = offset[slots];

        // limit: kernel of the stacked compatibility constraints, one block
        // of rows per arrow in the window
        let mut row_offset = vec![0usize; j - i + 1];
        let mut rows = 0usize;
        for (s, t) in (i..j).enumerate() {
            row_offset[s] = rows;
            rows += if self.forward[t] { h[t + 1] } else { h[t] };
        }
        let mut constraint_ech = Echelon::new(rows, total);
        let mut sections: Vec<BitVec> = Vec::new();
        for (s, t) in (i..=j).enumerate() {
            for a in 0..h[t] {
                let mut col = BitVec::zeros(rows);
                if t > i {
                    let arrow = t - 1;
                    let block = row_offset[s - 1];
                    if self.forward[arrow] {
                        // M v_{t-1} = v_t: this variable enters as itself
                        col.flip(block + a);
                    } else {
                        // v_{t-1} = M v_t: this variable enters through M
                        for r in self.maps[p][arrow][a].ones() {
                            col.flip(block + r);
                        }
                    }
                }
                if t < j {
                    let arrow = t;
                    let block = row_offset[s];
                    if self.forward[arrow] {
                        for r in self.maps[p][arrow][a].ones() {
                            col.flip(block + r);
                        }
                    } else {
                        col.flip(block + a);
                    }
                }
                if let Some(comb) = constraint_ech.insert(col) {
                    sections.push(comb);
                }
            }
        }
        if sections.is_empty() {
            return 0;
        }

        // colimit: quotient of the direct sum by one relation column per
        // basis vector per arrow
        let mut rel_ech = Echelon::new(total, 0);
        for (s, t) in (i..j).enumerate() {
            let (src_slot, dst_slot, count) = if self.forward[t] {
                (s, s + 1, h[t])
            } else {
                (s + 1, s, h[t + 1])
            };
            for a in 0..count {
                let mut col = BitVec::zeros(total);
                col.flip(offset[src_slot] + a);
                for r in self.maps[p][t][a].ones() {
                    col.flip(offset[dst_slot] + r);
                }
                rel_ech.insert(col);
            }
        }
        let relation_rank = rel_ech.rank();
        // canonical map: a compatible section goes to the class of its
        // component at the first slot (all components share that class)
        for section in sections {
            rel_ech.insert(section.extract(0, h[i], total, 0));
        }
        rel_ech.rank() - relation_rank
    }
}

/// Independent typed zigzag barcode of a valid closed filtration: window
/// ranks for every `[b, d]` plus inclusion-exclusion give multiplicities,
/// endpoint types come from the operation directions.
pub fn oracle_barcode(
    f: &ZigzagFiltration,
    max_dim: usize,
) -> Result<Vec<ZigzagInterval>, OracleError> {
    oracle_barcode_bounded(f, max_dim, DEFAULT_ORACLE_BOUND)
}

/// As [`oracle_barcode`] with an explicit length bound.
pub fn oracle_barcode_bounded(
    f: &ZigzagFiltration,
    max_dim: usize,
    bound: usize,
) -> Result<Vec<ZigzagInterval>, OracleError> {
    let diag = build_diagram_bounded(f, max_dim, bound)?;
    let m = diag.m;
    let mut intervals = Vec::new();
    if m > 0 {
        for p in 0..=diag.max_dim() {
            // full window-rank table; ranks only shrink as windows grow, so
            // a row is filled with zeros past its first zero
            let table: Vec<Vec<usize>> = (1..m)
                .maybe_par_iter()
                .map(|b| {
                    let mut row = vec![0usize; m];
                    for d in b..m {
                        let r = diag.window_rank(p, b, d);
                        row[d] = r;
                        if r == 0 {
                            break;
                        }
                    }
                    row
                })
                .collect();
            let rank = |b: usize, d: usize| -> i64 {
                if b < 1 || d > m - 1 || b > d {
                    0
                } else {
                    table[b - 1][d] as i64
                }
            };
            for b in 1..m {
                for d in b..m {
                    let mult = rank(b, d) - rank(b.wrapping_sub(1), d) - rank(b, d + 1)
                        + rank(b.wrapping_sub(1), d + 1);
                    if mult < 0 {
                        return Err(OracleError::Inconsistent(format!(
                            "negative multiplicity {mult} for dim {p} window [{b}, {d}]"
                        )));
                    }
                    for _ in 0..mult {
                        intervals.push(ZigzagInterval {
                            dim: p,
                            birth: b,
                            death: d,
                            ty: interval_type_from_ops(f, b, d),
                        });
                    }
                }
            }
        }
    }
    if intervals.len() != m / 2 {
        return Err(OracleError::Inconsistent(format!(
            "expected {} intervals, found {}",
            m / 2,
            intervals.len()
        )));
    }
    intervals.sort();
    Ok(intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barcode::IntervalType;

    fn barcode_of(text: &str) -> Vec<ZigzagInterval> {
        let f = ZigzagFiltration::parse(text).unwrap();
        oracle_barcode(&f, 2).unwrap()
    }

    #[test]
    fn single_vertex_lifetime() {
        let f = ZigzagFiltration::parse("i 0\nd 0").unwrap();
        let diag = build_diagram(&f, 2).unwrap();
        assert_eq!(
            (0..=2).map(|t| diag.betti(0, t)).collect::<Vec<_>>(),
            vec![0, 1, 0]
        );
        assert_eq!(
            barcode_of("i 0\nd 0"),
            vec![ZigzagInterval {
                dim: 0,
                birth: 1,
                death: 1,
                ty: IntervalType::ClosedClosed
            }]
        );
    }

    #[test]
    fn edge_filtration_betti_numbers() {
        let f = ZigzagFiltration::parse("i 0\ni 1\ni 0 1\nd 0 1\nd 0\nd 1").unwrap();
        let diag = build_diagram(&f, 2).unwrap();
        assert_eq!(
            (0..=6).map(|t| diag.betti(0, t)).collect::<Vec<_>>(),
            vec![0, 1, 2, 1, 2, 1, 0]
        );
        assert!((0..=6).all(|t| diag.betti(1, t) == 0));
    }

    #[test]
    fn edge_filtration_rank_invariant() {
        let f = ZigzagFiltration::parse("i 0\ni 1\ni 0 1\nd 0 1\nd 0\nd 1").unwrap();
        let diag = build_diagram(&f, 2).unwrap();
        assert_eq!(rank_invariant(&diag, 0, 2, 2).unwrap(), 2);
        assert_eq!(rank_invariant(&diag, 0, 1, 5).unwrap(), 1);
        assert_eq!(rank_invariant(&diag, 0, 2, 4).unwrap(), 1);
        assert!(rank_invariant(&diag, 0, 0, 3).is_err());
        assert!(rank_invariant(&diag, 0, 1, 6).is_err());
    }

    #[test]
    fn edge_filtration_barcode() {
        let got = barcode_of("i 0\ni 1\ni 0 1\nd 0 1\nd 0\nd 1");
        let expect = vec![
            ZigzagInterval {
                dim: 0,
                birth: 1,
                death: 5,
                ty: IntervalType::ClosedClosed,
            },
            ZigzagInterval {
                dim: 0,
                birth: 2,
                death: 2,
                ty: IntervalType::ClosedOpen,
            },
            ZigzagInterval {
                dim: 0,
                birth: 4,
                death: 4,
                ty: IntervalType::OpenClosed,
            },
        ];
        assert_eq!(got, expect);
    }

    #[test]
    fn triangle_cycle_appears_and_fills() {
        // boundary of a triangle, filled, unfilled, then torn down
        let text = "i 0\ni 1\ni 2\ni 0 1\ni 0 2\ni 1 2\ni 0 1 2\nd 0 1 2\n\
                    d 1 2\nd 0 2\nd 0 1\nd 0\nd 1\nd 2";
        let f = ZigzagFiltration::parse(text).unwrap();
        let diag = build_diagram(&f, 2).unwrap();
        let h1: Vec<usize> = (0..=14).map(|t| diag.betti(1, t)).collect();
        assert_eq!(h1, vec![0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0]);
        let bars = oracle_barcode(&f, 2).unwrap();
        assert_eq!(bars.len(), 7);
        let h1_bars: Vec<_> = bars.iter().filter(|b| b.dim == 1).collect();
        assert_eq!(h1_bars.len(), 2);
        assert_eq!((h1_bars[0].birth, h1_bars[0].death), (6, 6));
        assert_eq!(h1_bars[0].ty, IntervalType::ClosedOpen);
        assert_eq!((h1_bars[1].birth, h1_bars[1].death), (8, 8));
        assert_eq!(h1_bars[1].ty, IntervalType::OpenClosed);
    }

    #[test]
    fn bound_is_enforced() {
        let f = crate::generate::gen_random_zigzag(5, 80, 2, 0);
        assert!(matches!(
            build_diagram(&f, 2),
            Err(OracleError::BoundExceeded { .. })
        ));
        assert!(build_diagram_bounded(&f, 2, 100).is_ok());
    }

    #[test]
    fn empty_filtration() {
        let f = ZigzagFiltration::default();
        assert_eq!(oracle_barcode(&f, 2).unwrap(), vec![]);
    }

    #[test]
    fn interval_count_matches_half_length() {
        for seed in 0..20 {
            let f = crate::generate::gen_random_zigzag(5, 24, 2, seed);
            let bars = oracle_barcode(&f, 2).unwrap();
            assert_eq!(bars.len(), f.len() / 2, "seed {seed}");
        }
    }

    #[test]
    fn representatives_match_reported_dimensions() {
        let f = ZigzagFiltration::parse("i 0\ni 1\ni 0 1\nd 0 1\nd 0\nd 1").unwrap();
        let diag = build_diagram(&f, 2).unwrap();
        for p in 0..=diag.max_dim() {
            for t in 0..=diag.m() {
                let reps = &diag.reps[p][t];
                assert_eq!(reps.len(), diag.betti(p, t));
                assert!(reps.iter().all(|rep| !rep.is_zero()));
            }
        }
    }

    #[test]
    fn pointwise_dimension_conservation() {
        for seed in 0..10 {
            let f = crate::generate::gen_random_zigzag(5, 30, 2, seed);
            let diag = build_diagram(&f, 2).unwrap();
            let bars = oracle_barcode(&f, 2).unwrap();
            for t in 0..=f.len() {
                for p in 0..=2 {
                    let covering = bars
                        .iter()
                        .filter(|b| b.dim == p && b.birth <= t && t <= b.death)
                        .count();
                    assert_eq!(covering, diag.betti(p, t), "seed {seed} t {t} p {p}");
                }
            }
        }
    }
}
