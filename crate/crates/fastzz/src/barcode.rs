//! Mapping persistence pairs of the converted non-zigzag filtration back to
//! typed intervals of the input zigzag filtration.
//!
//! With `n` cells, the converted filtration has midpoint `n`: positions
//! `1..=n` add the input cells in insertion order, positions `n+1..=2n` add
//! cones in reverse deletion order, so the cone at position `s` belongs to
//! the `(2n + 1 - s)`-th deleted cell. A pair `(i, j)` classifies by where it
//! sits relative to the midpoint, which determines the creator and destroyer
//! operations in the input filtration and, from their order, the interval and
//! its endpoint types. Intervals are over complex indices: `[b, d]` means the
//! class lives in the complexes `K_b` through `K_d`.

use std::fmt;

use thiserror::Error;

use crate::convert::CellRegistry;
use crate::filtration::{OpKind, ZigzagFiltration};
use crate::par::MaybeParIter;
#[cfg(feature = "parallel")]
use crate::par::ParallelIterator;
use crate::reduce::{PersistencePair, ReductionResult};

/// Endpoint type of a zigzag interval: a birth is closed when the preceding
/// arrow is an insertion, a death is closed when the following arrow is a
/// deletion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IntervalType {
    ClosedClosed,
    ClosedOpen,
    OpenClosed,
    OpenOpen,
}

impl IntervalType {
    pub fn as_str(self) -> &'static str {
        match self {
            IntervalType::ClosedClosed => "CC",
            IntervalType::ClosedOpen => "CO",
            IntervalType::OpenClosed => "OC",
            IntervalType::OpenOpen => "OO",
        }
    }
}

impl fmt::Display for IntervalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed interval `[birth, death]` of the zigzag barcode, over complex
/// indices `1 ..= m-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ZigzagInterval {
    pub dim: usize,
    pub birth: usize,
    pub death: usize,
    pub ty: IntervalType,
}

impl fmt::Display for ZigzagInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.dim, self.birth, self.death, self.ty)
    }
}

/// Classification of a persistence pair of the converted filtration by its
/// location relative to the midpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairClass {
    /// Entirely within the additions: `j <= n`.
    Ordinary,
    /// Entirely within the cones: `i > n`.
    Relative,
    /// Spanning the midpoint: `i <= n < j`.
    Extended,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BarcodeError {
    #[error("pair ({i}, {j}) out of range for n = {n}")]
    PairOutOfRange { i: usize, j: usize, n: usize },
    #[error("expected exactly one essential class, found {found}")]
    EssentialCount { found: usize },
    #[error("essential class at position {pos}, expected the apex at 0")]
    EssentialPosition { pos: usize },
    #[error("interval in dimension 0 cannot have an open-open type")]
    DimensionUnderflow,
}

/// Classifies a pair `(i, j)` against the midpoint `n`.
pub fn classify_pair(pair: &PersistencePair, n: usize) -> Result<PairClass, BarcodeError> {
    let (i, j) = (pair.birth_pos, pair.death_pos);
    if i < 1 || i >= j || j > 2 * n {
        return Err(BarcodeError::PairOutOfRange { i, j, n });
    }
    Ok(if j <= n {
        PairClass::Ordinary
    } else if i > n {
        PairClass::Relative
    } else {
        PairClass::Extended
    })
}

/// Endpoint type of an interval recomputed from the operation directions of
/// the filtration the interval indexes into.
pub fn interval_type_from_ops(f: &ZigzagFiltration, birth: usize, death: usize) -> IntervalType {
    let closed_birth = f.ops()[birth - 1].kind == OpKind::Insert;
    let closed_death = f.ops()[death].kind == OpKind::Delete;
    match (closed_birth, closed_death) {
        (true, true) => IntervalType::ClosedClosed,
        (true, false) => IntervalType::ClosedOpen,
        (false, true) => IntervalType::OpenClosed,
        (false, false) => IntervalType::OpenOpen,
    }
}

/// Endpoint types of an interval of the intermediate up-down filtration; an
/// up-down barcode has no open-open intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpDownType {
    ClosedOpen,
    OpenClosed,
    ClosedClosed,
}

/// An interval of the up-down filtration obtained by listing all additions
/// before all deletions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UpDownInterval {
    pub birth: usize,
    pub death: usize,
    pub dim: usize,
    pub ty: UpDownType,
}

/// Mapping table from intervals of the coned extended filtration to
/// intervals of the up-down filtration. `birth`/`death` are complex indices
/// of the extended filtration (`pair (i, j)` corresponds to `[i, j - 1]`),
/// and `n` is the midpoint.
pub fn extended_to_updown(
    birth: usize,
    death: usize,
    dim: usize,
    n: usize,
) -> Result<UpDownInterval, BarcodeError> {
    if birth < 1 || birth > death || death > 2 * n - 1 {
        return Err(BarcodeError::PairOutOfRange {
            i: birth,
            j: death,
            n,
        });
    }
    Ok(if death < n {
        UpDownInterval {
            birth,
            death,
            dim,
            ty: UpDownType::ClosedOpen,
        }
    } else if birth > n {
        // relative classes are created by cones, which have dimension >= 1
        if dim == 0 {
            return Err(BarcodeError::DimensionUnderflow);
        }
        UpDownInterval {
            birth: 3 * n - death,
            death: 3 * n - birth,
            dim: dim - 1,
            ty: UpDownType::OpenClosed,
        }
    } else {
        UpDownInterval {
            birth,
            death: 3 * n - death - 1,
            dim,
            ty: UpDownType::ClosedClosed,
        }
    })
}

/// Mapping table from an up-down interval to a zigzag interval, given the
/// positions of its creator and destroyer operations in the input
/// filtration. For closed-open intervals both positions are insertions, for
/// open-closed both are deletions; a closed-closed interval is created by an
/// insertion and destroyed by a deletion, and flips to open-open with a
/// dimension drop when the destroyer precedes the creator.
pub fn updown_to_zigzag(
    ty: UpDownType,
    creator_pos: usize,
    destroyer_pos: usize,
    dim: usize,
) -> Result<ZigzagInterval, BarcodeError> {
    Ok(match ty {
        UpDownType::ClosedOpen => ZigzagInterval {
            dim,
            birth: creator_pos + 1,
            death: destroyer_pos,
            ty: IntervalType::ClosedOpen,
        },
        UpDownType::OpenClosed => ZigzagInterval {
            dim,
            birth: creator_pos + 1,
            death: destroyer_pos,
            ty: IntervalType::OpenClosed,
        },
        UpDownType::ClosedClosed => {
            if creator_pos < destroyer_pos {
                ZigzagInterval {
                    dim,
                    birth: creator_pos + 1,
                    death: destroyer_pos,
                    ty: IntervalType::ClosedClosed,
                }
            } else {
                if dim == 0 {
                    return Err(BarcodeError::DimensionUnderflow);
                }
                ZigzagInterval {
                    dim: dim - 1,
                    birth: destroyer_pos + 1,
                    death: creator_pos,
                    ty: IntervalType::OpenOpen,
                }
            }
        }
    })
}

/// Maps one persistence pair of the converted matrix to its zigzag interval,
/// fusing both mapping tables into closed form over the registry positions.
pub fn map_pair(pair: &PersistencePair, reg: &CellRegistry) -> Result<ZigzagInterval, BarcodeError> {
    let n = reg.n();
    match classify_pair(pair, n)? {
        PairClass::Ordinary => {
            let creator = reg.cell_of_add_rank(pair.birth_pos);
            let destroyer = reg.cell_of_add_rank(pair.death_pos);
            Ok(ZigzagInterval {
                dim: creator.dim,
                birth: creator.pos_add + 1,
                death: destroyer.pos_add,
                ty: IntervalType::ClosedOpen,
            })
        }
        PairClass::Relative => {
            let creator = reg.cell_of_del_rank(2 * n + 1 - pair.death_pos);
            let destroyer = reg.cell_of_del_rank(2 * n + 1 - pair.birth_pos);
            Ok(ZigzagInterval {
                dim: destroyer.dim,
                birth: creator.pos_del + 1,
                death: destroyer.pos_del,
                ty: IntervalType::OpenClosed,
            })
        }
        PairClass::Extended => {
            let added = reg.cell_of_add_rank(pair.birth_pos);
            let deleted = reg.cell_of_del_rank(2 * n + 1 - pair.death_pos);
            if added.pos_add < deleted.pos_del {
                Ok(ZigzagInterval {
                    dim: added.dim,
                    birth: added.pos_add + 1,
                    death: deleted.pos_del,
                    ty: IntervalType::ClosedClosed,
                })
            } else {
                if added.dim == 0 {
                    return Err(BarcodeError::DimensionUnderflow);
                }
                Ok(ZigzagInterval {
                    dim: added.dim - 1,
                    birth: deleted.pos_del + 1,
                    death: added.pos_add,
                    ty: IntervalType::OpenOpen,
                })
            }
        }
    }
}

/// Maps every pair of a reduction to its zigzag interval and discards the
/// one infinite class of the apex vertex. The output is sorted by
/// `(dim, birth, death, type)` and has exactly `n` intervals.
pub fn convert_barcode(
    result: &ReductionResult,
    reg: &CellRegistry,
) -> Result<Vec<ZigzagInterval>, BarcodeError> {
    if result.essential.len() != 1 {
        return Err(BarcodeError::EssentialCount {
            found: result.essential.len(),
        });
    }
    if result.essential[0].pos != 0 {
        return Err(BarcodeError::EssentialPosition {
            pos: result.essential[0].pos,
        });
    }
    let mut intervals = result
        .pairs
        .as_slice()
        .maybe_par_iter()
        .map(|pair| map_pair(pair, reg))
        .collect::<Result<Vec<_>, _>>()?;
    intervals.sort_unstable();
    Ok(intervals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convert::convert_filt;
    use crate::reduce::reduce;

    fn pair(i: usize, j: usize, dim: usize) -> PersistencePair {
        PersistencePair {
            birth_pos: i,
            death_pos: j,
            dim,
        }
    }

    fn pipeline(text: &str) -> Vec<ZigzagInterval> {
        let f = ZigzagFiltration::parse(text).unwrap();
        let (matrix, reg) = convert_filt(&f).unwrap();
        let result = reduce(matrix).unwrap();
        convert_barcode(&result, &reg).unwrap()
    }

    fn interval(dim: usize, birth: usize, death: usize, ty: IntervalType) -> ZigzagInterval {
        ZigzagInterval {
            dim,
            birth,
            death,
            ty,
        }
    }

    #[test]
    fn classify_against_midpoint() {
        assert_eq!(classify_pair(&pair(2, 3, 0), 3).unwrap(), PairClass::Ordinary);
        assert_eq!(classify_pair(&pair(1, 4, 0), 3).unwrap(), PairClass::Extended);
        assert_eq!(classify_pair(&pair(5, 6, 1), 3).unwrap(), PairClass::Relative);
        assert!(classify_pair(&pair(0, 3, 0), 3).is_err());
        assert!(classify_pair(&pair(2, 7, 0), 3).is_err());
        assert!(classify_pair(&pair(3, 3, 0), 3).is_err());
    }

    #[test]
    fn updown_table_closed_closed_flip() {
        // destroyer before creator flips a closed-closed interval to
        // open-open one dimension lower: positions (6, 3) give [4, 6]
        let got = updown_to_zigzag(UpDownType::ClosedClosed, 6, 3, 1).unwrap();
        assert_eq!(got, interval(0, 4, 6, IntervalType::OpenOpen));
        let got = updown_to_zigzag(UpDownType::ClosedClosed, 2, 5, 1).unwrap();
        assert_eq!(got, interval(1, 3, 5, IntervalType::ClosedClosed));
        assert_eq!(
            updown_to_zigzag(UpDownType::ClosedClosed, 6, 3, 0),
            Err(BarcodeError::DimensionUnderflow)
        );
    }

    #[test]
    fn updown_table_single_sided() {
        assert_eq!(
            updown_to_zigzag(UpDownType::ClosedOpen, 0, 2, 0).unwrap(),
            interval(0, 1, 2, IntervalType::ClosedOpen)
        );
        assert_eq!(
            updown_to_zigzag(UpDownType::OpenClosed, 3, 4, 0).unwrap(),
            interval(0, 4, 4, IntervalType::OpenClosed)
        );
    }

    #[test]
    fn extended_table_rows() {
        // ordinary: strictly inside the additions
        assert_eq!(
            extended_to_updown(2, 2, 0, 3).unwrap(),
            UpDownInterval {
                birth: 2,
                death: 2,
                dim: 0,
                ty: UpDownType::ClosedOpen
            }
        );
        // relative: strictly inside the cones, indices reflect
        assert_eq!(
            extended_to_updown(5, 5, 1, 3).unwrap(),
            UpDownInterval {
                birth: 4,
                death: 4,
                dim: 0,
                ty: UpDownType::OpenClosed
            }
        );
        // extended: spans the midpoint
        assert_eq!(
            extended_to_updown(1, 3, 0, 3).unwrap(),
            UpDownInterval {
                birth: 1,
                death: 5,
                dim: 0,
                ty: UpDownType::ClosedClosed
            }
        );
        assert!(extended_to_updown(0, 2, 0, 3).is_err());
    }

    #[test]
    fn edge_filtration_barcode() {
        let got = pipeline("i 0\ni 1\ni 0 1\nd 0 1\nd 0\nd 1");
        assert_eq!(
            got,
            vec![
                interval(0, 1, 5, IntervalType::ClosedClosed),
                interval(0, 2, 2, IntervalType::ClosedOpen),
                interval(0, 4, 4, IntervalType::OpenClosed),
            ]
        );
    }

    #[test]
    fn single_vertex_barcode() {
        assert_eq!(
            pipeline("i 0\nd 0"),
            vec![interval(0, 1, 1, IntervalType::ClosedClosed)]
        );
    }

    #[test]
    fn reinsertion_produces_all_four_types() {
        let got = pipeline("i 0\ni 1\ni 0 1\nd 0 1\ni 0 1\nd 0 1\nd 0\nd 1");
        assert_eq!(
            got,
            vec![
                interval(0, 1, 7, IntervalType::ClosedClosed),
                interval(0, 2, 2, IntervalType::ClosedOpen),
                interval(0, 4, 4, IntervalType::OpenOpen),
                interval(0, 6, 6, IntervalType::OpenClosed),
            ]
        );
    }

    #[test]
    fn fused_map_matches_composed_tables() {
        use crate::generate::gen_random_zigzag;
        for seed in 0..25 {
            let f = gen_random_zigzag(6, 40, 2, seed);
            let (matrix, reg) = convert_filt(&f).unwrap();
            let dims: Vec<usize> = (0..matrix.len()).map(|p| matrix.dim(p)).collect();
            let result = reduce(matrix).unwrap();
            for p in &result.pairs {
                let fused = map_pair(p, &reg).unwrap();
                let composed = compose_tables(p, &reg, &dims).unwrap();
                assert_eq!(fused, composed, "seed {seed} pair {p:?}");
            }
        }
    }

    /// Reference path through the two standalone tables, resolving up-down
    /// positions through the registry.
    fn compose_tables(
        pair: &PersistencePair,
        reg: &CellRegistry,
        dims: &[usize],
    ) -> Result<ZigzagInterval, BarcodeError> {
        let n = reg.n();
        let ud = extended_to_updown(pair.birth_pos, pair.death_pos - 1, dims[pair.birth_pos], n)?;
        // an up-down position `k` (1-based complex index) is preceded by the
        // arrow adding the k-th cell when k <= n, or deleting the (k - n)-th
        // when beyond
        let creator_pos = match ud.ty {
            UpDownType::ClosedOpen | UpDownType::ClosedClosed => {
                reg.cell_of_add_rank(ud.birth).pos_add
            }
            UpDownType::OpenClosed => reg.cell_of_del_rank(ud.birth - n).pos_del,
        };
        let destroyer_pos = match ud.ty {
            UpDownType::ClosedOpen => reg.cell_of_add_rank(ud.death + 1).pos_add,
            UpDownType::OpenClosed | UpDownType::ClosedClosed => {
                reg.cell_of_del_rank(ud.death + 1 - n).pos_del
            }
        };
        updown_to_zigzag(ud.ty, creator_pos, destroyer_pos, ud.dim)
    }

    #[test]
    fn convert_barcode_rejects_bad_essentials() {
        let f = ZigzagFiltration::parse("i 0\nd 0").unwrap();
        let (matrix, reg) = convert_filt(&f).unwrap();
        let mut result = reduce(matrix).unwrap();
        result.essential.push(crate::reduce::EssentialClass { pos: 2, dim: 0 });
        assert_eq!(
            convert_barcode(&result, &reg),
            Err(BarcodeError::EssentialCount { found: 2 })
        );
        result.essential.remove(0);
        assert_eq!(
            convert_barcode(&result, &reg),
            Err(BarcodeError::EssentialPosition { pos: 2 })
        );
    }

    #[test]
    fn emitted_types_match_op_directions() {
        use crate::generate::gen_random_zigzag;
        for seed in 0..25 {
            let f = gen_random_zigzag(6, 40, 2, seed);
            let bars = pipeline(&f.to_string());
            assert_eq!(bars.len(), f.len() / 2);
            for bar in bars {
                assert!(bar.birth <= bar.death);
                assert_eq!(
                    bar.ty,
                    interval_type_from_ops(&f, bar.birth, bar.death),
                    "seed {seed} bar {bar}"
                );
            }
        }
    }
}
