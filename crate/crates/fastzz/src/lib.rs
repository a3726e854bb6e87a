//! Zigzag persistence barcodes through standard persistence.
//!
//! An input simplex-wise zigzag filtration — a sequence of single-simplex
//! insertions and deletions — is converted into an ordinary, insertion-only
//! filtration of a Δ-complex: every insertion creates a fresh cell (so a
//! re-inserted simplex becomes a new copy), and every deletion is replaced by
//! attaching the cone of its cell over a shared apex vertex. The boundary
//! matrix of the converted filtration is reduced with the usual left-to-right
//! GF(2) column algorithm (with clearing), and each persistence pair is
//! mapped back in constant time to a typed interval `[b, d]` of the zigzag
//! barcode, where the type records whether each endpoint is open or closed.
//!
//! ```
//! use fastzz::{zigzag_barcode, ZigzagFiltration};
//!
//! let f = ZigzagFiltration::parse("i 0\ni 1\ni 0 1\nd 0 1\nd 0\nd 1").unwrap();
//! let barcode = zigzag_barcode(&f).unwrap();
//! let lines: Vec<String> = barcode.iter().map(|b| b.to_string()).collect();
//! assert_eq!(lines, ["0 1 5 CC", "0 2 2 CO", "0 4 4 OC"]);
//! ```
//!
//! The [`oracle`] module holds an independent brute-force implementation for
//! small filtrations, used to cross-check the pipeline.

pub mod barcode;
pub mod convert;
pub mod filtration;
pub mod generate;
mod gf2;
pub mod oracle;
mod par;
pub mod reduce;

use thiserror::Error;

pub use barcode::{
    classify_pair, convert_barcode, extended_to_updown, interval_type_from_ops, map_pair,
    updown_to_zigzag, BarcodeError, IntervalType, PairClass, UpDownInterval, UpDownType,
    ZigzagInterval,
};
pub use convert::{
    cell_boundary, coned_cell_boundary, convert_filt, BoundaryMatrix, CellRecord, CellRegistry,
    ConvertError, OMEGA,
};
pub use filtration::{
    FiltrationOp, FiltrationStats, OpKind, ParseError, Simplex, SimplexError, ValidationFailure,
    ValidationReport, ZigzagFiltration,
};
pub use generate::{
    gen_clique_by_ops, gen_clique_zigzag, gen_random_zigzag, gen_updown_by_ops, random_edge_events,
    shuffle_updown, EdgeEvent, EdgeEventError, GenerateError,
};
pub use oracle::{
    build_diagram, build_diagram_bounded, oracle_barcode, oracle_barcode_bounded, rank_invariant,
    HomologyDiagram, OracleError, DEFAULT_ORACLE_BOUND,
};
pub use reduce::{
    low, reduce, reduce_naive, EssentialClass, PersistencePair, ReduceError, ReductionResult,
};

/// Any failure of the end-to-end pipeline.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Validation(#[from] ValidationFailure),
    #[error(transparent)]
    Convert(#[from] ConvertError),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Barcode(#[from] BarcodeError),
}

/// Computes the typed zigzag barcode of a filtration. A filtration that does
/// not end at the empty complex is closed first by padding deletions, and
/// interval indices refer to the closed filtration. The output is sorted by
/// `(dim, birth, death, type)`.
pub fn zigzag_barcode(f: &ZigzagFiltration) -> Result<Vec<ZigzagInterval>, PipelineError> {
    let closed = f.close()?;
    let (matrix, registry) = convert_filt(&closed)?;
    let result = reduce(matrix)?;
    Ok(convert_barcode(&result, &registry)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barcode_of_empty_filtration() {
        assert_eq!(zigzag_barcode(&ZigzagFiltration::default()).unwrap(), vec![]);
    }

    #[test]
    fn pads_open_filtrations() {
        let f = ZigzagFiltration::parse("i 0").unwrap();
        let barcode = zigzag_barcode(&f).unwrap();
        assert_eq!(barcode.len(), 1);
        assert_eq!(barcode[0].to_string(), "0 1 1 CC");
    }

    #[test]
    fn interval_count_is_half_length() {
        for seed in 0..10 {
            let f = generate::gen_random_zigzag(6, 50, 2, seed);
            assert_eq!(zigzag_barcode(&f).unwrap().len(), f.len() / 2);
        }
    }
}
