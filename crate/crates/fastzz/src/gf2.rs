//! Dense GF(2) vectors and incremental column elimination, used by the
//! homology oracle. The main pipeline deliberately does not share this code:
//! it reduces sparse sorted columns instead.

use std::fmt;

/// Dense bit vector over GF(2), packed into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub(crate) fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub(crate) fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub(crate) fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub(crate) fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w ^= o;
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub(crate) fn lowest_set(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub(crate) fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    /// Copies the bit range `[from, from + count)` into a fresh vector of
    /// length `len`, placed at offset `to`.
    pub(crate) fn extract(&self, from: usize, count: usize, len: usize, to: usize) -> BitVec {
        let mut out = BitVec::zeros(len);
        for i in 0..count {
            if self.get(from + i) {
                out.set(to + i);
            }
        }
        out
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// Column echelon accumulator with combination tracking: every stored column
/// has a distinct lowest set bit, and carries the GF(2) combination of
/// inserted generators that produced it.
pub(crate) struct Echelon {
    /// (pivot bit, reduced column, combination over generators)
    cols: Vec<(usize, BitVec, BitVec)>,
    pivot_of: Vec<Option<usize>>,
    generators: usize,
    next_generator: usize,
}

impl Echelon {
    /// `rows` is the column length, `generators` the number of insertions
    /// whose combinations should be tracked.
    pub(crate) fn new(rows: usize, generators: usize) -> Self {
        Self {
            cols: Vec::new(),
            pivot_of: vec![None; rows],
            generators,
            next_generator: 0,
        }
    }

    pub(crate) fn rank(&self) -> usize {
        self.cols.len()
    }

    pub(crate) fn generators(&self) -> usize {
        self.generators
    }

    /// The reduced column stored by the most recent successful insert.
    pub(crate) fn last_reduced(&self) -> &BitVec {
        &self.cols.last().expect("echelon is non-empty").1
    }

    /// Reduces `col` against the stored columns, tracking the combination.
    pub(crate) fn reduce(&self, col: &mut BitVec, comb: &mut BitVec) {
        while let Some(p) = col.lowest_set() {
            match self.pivot_of[p] {
                Some(idx) => {
                    let (_, stored, stored_comb) = &self.cols[idx];
                    col.xor_assign(stored);
                    comb.xor_assign(stored_comb);
                }
                None => break,
            }
        }
    }

    /// Inserts the next generator column. Returns the generator combination
    /// if the column reduces to zero (a kernel element), `None` if it was
    /// stored with a fresh pivot. Inserts past the tracked generator count
    /// contribute nothing to combinations.
    pub(crate) fn insert(&mut self, mut col: BitVec) -> Option<BitVec> {
        let gen_index = self.next_generator;
        self.next_generator += 1;
        let mut comb = BitVec::zeros(self.generators);
        if gen_index < self.generators {
            comb.set(gen_index);
        }
        self.reduce(&mut col, &mut comb);
        match col.lowest_set() {
            None => Some(comb),
            Some(p) => {
                self.pivot_of[p] = Some(self.cols.len());
                self.cols.push((p, col, comb));
                None
            }
        }
    }
}
