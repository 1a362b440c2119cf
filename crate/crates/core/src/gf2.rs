//! Dense bit-packed matrices over GF(2).
//!
//! Rows are stored contiguously, each padded to a whole number of `u64`
//! words. Elimination uses first-nonzero pivoting with no heuristics, so the
//! sequence of row operations is a deterministic function of the input.

use std::fmt;
use std::ops::Range;

use crate::bits::{get_bit, set_bit, words_for, xor_into, BitVec, WORD_BITS};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

/// A row operation performed during elimination.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowOp {
    /// Exchange rows `0` and `1`.
    Swap(usize, usize),
    /// `row[dst] ^= row[src]`.
    Add { src: usize, dst: usize },
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[BitVec]) -> Self {
        let cols = rows.first().map_or(0, BitVec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged rows");
            m.row_words_mut(r).copy_from_slice(row.words());
        }
        m
    }

    /// Builds from raw packed words; `data` must hold `rows * words_for(cols)`
    /// words with zero padding.
    pub(crate) fn from_words(rows: usize, cols: usize, data: Vec<u64>) -> Self {
        let stride = words_for(cols);
        assert_eq!(data.len(), rows * stride);
        Self {
            rows,
            cols,
            stride,
            data,
        }
    }

    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Self {
        Self::from_rows(&rows.iter().map(|r| BitVec::from_bools(r)).collect::<Vec<_>>())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        get_bit(self.row_words(r), c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols);
        set_bit(self.row_words_mut(r), c, value);
    }

    #[inline]
    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        let mut v = BitVec::zeros(self.cols);
        for c in 0..self.cols {
            if self.get(r, c) {
                v.set(c, true);
            }
        }
        v
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (head, tail) = self.data.split_at_mut(hi * self.stride);
        head[lo * self.stride..(lo + 1) * self.stride].swap_with_slice(&mut tail[..self.stride]);
    }

    /// `row[dst] ^= row[src]`, touching only words from `from_word` on.
    fn add_row_from(&mut self, src: usize, dst: usize, from_word: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        if src < dst {
            let (head, tail) = self.data.split_at_mut(dst * s);
            xor_into(&mut tail[from_word..s], &head[src * s + from_word..(src + 1) * s]);
        } else {
            let (head, tail) = self.data.split_at_mut(src * s);
            xor_into(&mut head[dst * s + from_word..(dst + 1) * s], &tail[from_word..s]);
        }
    }

    pub fn add_row(&mut self, src: usize, dst: usize) {
        self.add_row_from(src, dst, 0);
    }

    pub fn apply(&mut self, op: RowOp) {
        match op {
            RowOp::Swap(a, b) => self.swap_rows(a, b),
            RowOp::Add { src, dst } => self.add_row(src, dst),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            let words = self.row_words(r);
            for (wi, &w) in words.iter().enumerate() {
                let mut w = w;
                while w != 0 {
                    let c = wi * WORD_BITS + w.trailing_zeros() as usize;
                    w &= w - 1;
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Copy of the rows in `rows` (in order) restricted to all columns.
    pub fn select_rows(&self, rows: impl IntoIterator<Item = usize>) -> Self {
        let picked: Vec<usize> = rows.into_iter().collect();
        let mut data = Vec::with_capacity(picked.len() * self.stride);
        for &r in &picked {
            data.extend_from_slice(self.row_words(r));
        }
        Self::from_words(picked.len(), self.cols, data)
    }

    /// Copy restricted to a column range.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Self {
        let mut m = Self::zeros(rows.len(), cols.len());
        for (ri, r) in rows.enumerate() {
            for (ci, c) in cols.clone().enumerate() {
                if self.get(r, c) {
                    m.set(ri, ci, true);
                }
            }
        }
        m
    }

    /// Rank over GF(2). The receiver is left untouched.
    pub fn rank(&self) -> usize {
        self.clone().rank_in_place()
    }

    /// Rank over GF(2), destroying the contents of the matrix.
    pub(crate) fn rank_in_place(&mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let w = c / WORD_BITS;
            let mask = 1u64 << (c % WORD_BITS);
            let Some(pivot) = (rank..self.rows).find(|&r| self.data[r * self.stride + w] & mask != 0)
            else {
                continue;
            };
            self.swap_rows(pivot, rank);
            for r in rank + 1..self.rows {
                if self.data[r * self.stride + w] & mask != 0 {
                    self.add_row_from(rank, r, w);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Reduces to row-echelon form, pivoting only on columns in `pivot_cols`.
    ///
    /// Every swap and row addition is reported to `on_row_op` in execution
    /// order, so callers can mirror the same operations on data that rides
    /// along with each row. Returns the reduced matrix and the number of
    /// pivots found, which is the rank of the pivot-column block.
    pub fn row_echelon_with_callback<F>(&self, pivot_cols: Range<usize>, mut on_row_op: F) -> (Self, usize)
    where
        F: FnMut(RowOp),
    {
        assert!(pivot_cols.end <= self.cols, "pivot columns out of bounds");
        let mut m = self.clone();
        let mut rank = 0;
        for c in pivot_cols {
            if rank == m.rows {
                break;
            }
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            if pivot != rank {
                m.swap_rows(pivot, rank);
                on_row_op(RowOp::Swap(pivot, rank));
            }
            for r in rank + 1..m.rows {
                if m.get(r, c) {
                    m.add_row(rank, r);
                    on_row_op(RowOp::Add { src: rank, dst: r });
                }
            }
            rank += 1;
        }
        (m, rank)
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.cols);
        let base = self.rank();
        let mut rows: Vec<BitVec> = (0..self.rows).map(|r| self.row(r)).collect();
        rows.push(v.clone());
        Self::from_rows(&rows).rank() == base
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {}", self.row(r).to_bit_string())?;
        }
        Ok(())
    }
}
