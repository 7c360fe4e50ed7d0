use std::fmt;

use super::bitvec::BitVec;
use crate::error::{Error, Result};

/// Row-major bit matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(into = "crate::io::BitMatRepr", try_from = "crate::io::BitMatRepr")]
pub struct BitMat {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rref: BitMat,
    /// `pivots[i]` is the pivot column of row `i`, for `i < rank`.
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Column indices that carry no pivot, ascending.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.rref.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.rref.cols).filter(|&c| !is_pivot[c]).collect()
    }
}

impl BitMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks row vectors. `cols` is needed so that zero-row matrices keep
    /// their width.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Builds a matrix whose `j`-th column is `cols[j]`.
    pub fn from_cols(rows: usize, cols: &[BitVec]) -> Result<Self> {
        if let Some(bad) = cols.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch(format!(
                "column of length {} in matrix with {rows} rows",
                bad.len()
            )));
        }
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in c.iter_ones() {
                m.data[i].set(j, true);
            }
        }
        Ok(m)
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
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    #[inline]
    pub fn row(&self, r: usize) -> &BitVec {
        &self.data[r]
    }

    pub fn row_vecs(&self) -> &[BitVec] {
        &self.data
    }

    pub fn col(&self, c: usize) -> BitVec {
        assert!(c < self.cols, "column {c} out of range");
        let mut v = BitVec::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            if row.get(c) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn col_vecs(&self) -> Vec<BitVec> {
        self.transpose().data
    }

    pub fn transpose(&self) -> BitMat {
        let mut t = BitMat::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.iter_ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVec::is_zero)
    }

    /// `M · x` for a column vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(x.len(), self.cols, "mul_vec dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        for (i, row) in self.data.iter().enumerate() {
            if row.dot(x) {
                out.set(i, true);
            }
        }
        out
    }

    /// `yᵀ · M` for a row vector `y` of length `rows`: XOR of the selected rows.
    pub fn vec_mul(&self, y: &BitVec) -> BitVec {
        assert_eq!(y.len(), self.rows, "vec_mul dimension mismatch");
        let mut out = BitVec::zeros(self.cols);
        for i in y.iter_ones() {
            out.xor_assign(&self.data[i]);
        }
        out
    }

    pub fn mul(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let data = self.data.iter().map(|row| other.vec_mul(row)).collect();
        BitMat {
            rows: self.rows,
            cols: other.cols,
            data,
        }
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &BitMat) -> Result<BitMat> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.concat(b))
            .collect();
        Ok(BitMat {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    pub fn select_cols(&self, idx: &[usize]) -> BitMat {
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut out = BitVec::zeros(idx.len());
                for (k, &c) in idx.iter().enumerate() {
                    if row.get(c) {
                        out.set(k, true);
                    }
                }
                out
            })
            .collect();
        BitMat {
            rows: self.rows,
            cols: idx.len(),
            data,
        }
    }

    pub fn select_rows(&self, idx: &[usize]) -> BitMat {
        BitMat {
            rows: idx.len(),
            cols: self.cols,
            data: idx.iter().map(|&r| self.data[r].clone()).collect(),
        }
    }

    /// Columns `[start, start + len)`.
    pub fn col_range(&self, start: usize, len: usize) -> BitMat {
        let data = self.data.iter().map(|r| r.extract(start, len)).collect();
        BitMat {
            rows: self.rows,
            cols: len,
            data,
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    /// Reduced row echelon form. Pivot rows are taken lowest index first, so
    /// the result is a pure function of the input.
    pub fn echelon(&self) -> Echelon {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| m.data[i].get(c)) else {
                continue;
            };
            m.data.swap(r, p);
            let pivot_row = m.data[r].clone();
            for i in 0..self.rows {
                if i != r && m.data[i].get(c) {
                    m.data[i].xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Echelon { rref: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().rank()
    }

    /// Some `x` with `M · x = b`, free variables set to zero.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve: rhs has {} bits, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        // Eliminate on [M | b].
        let mut rows: Vec<BitVec> = self.data.clone();
        let mut rhs: Vec<bool> = b.iter().collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            rhs.swap(r, p);
            let pivot_row = rows[r].clone();
            let pivot_rhs = rhs[r];
            for i in 0..self.rows {
                if i != r && rows[i].get(c) {
                    rows[i].xor_assign(&pivot_row);
                    rhs[i] ^= pivot_rhs;
                }
            }
            pivots.push(c);
            r += 1;
        }
        if rhs[r..].iter().any(|&bit| bit) {
            return Ok(None);
        }
        let mut x = BitVec::zeros(self.cols);
        for (i, &c) in pivots.iter().enumerate() {
            if rhs[i] {
                x.set(c, true);
            }
        }
        Ok(Some(x))
    }

    /// Basis of `{x : M · x = 0}` as the columns of a `cols × (cols - rank)`
    /// matrix, one column per free variable in ascending order.
    pub fn kernel_basis(&self) -> BitMat {
        let cols = kernel_vectors(&self.echelon());
        BitMat::from_cols(self.cols, &cols).expect("kernel vectors have matching length")
    }

    /// Packs the matrix as a flat row-major bit stream, then hex-encodes it.
    pub fn to_hex(&self) -> String {
        let mut flat = BitVec::zeros(self.rows * self.cols);
        for (i, row) in self.data.iter().enumerate() {
            flat.xor_at(i * self.cols, row);
        }
        flat.to_hex()
    }

    pub fn from_hex(rows: usize, cols: usize, text: &str) -> Result<BitMat> {
        let flat = BitVec::from_hex(rows * cols, text)?;
        let data = (0..rows).map(|i| flat.extract(i * cols, cols)).collect();
        Ok(BitMat { rows, cols, data })
    }
}

/// Kernel vectors read off a reduced echelon form, ordered by free column.
pub(crate) fn kernel_vectors(e: &Echelon) -> Vec<BitVec> {
    let cols = e.rref.cols;
    e.free_columns()
        .into_iter()
        .map(|f| {
            let mut v = BitVec::zeros(cols);
            v.set(f, true);
            for (i, &p) in e.pivots.iter().enumerate() {
                if e.rref.get(i, f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

impl fmt::Debug for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMat {}x{} [", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row}")?;
        }
        f.write_str("]")
    }
}
