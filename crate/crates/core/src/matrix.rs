//! Dense and sparse real matrices.
//!
//! Both representations are immutable once built. Indices are 0-based.

use crate::error::{Error, Result};
use crate::numeric::{self, CompensatedSum};

/// Common read access shared by [`DenseMatrix`] and [`SparseMatrix`].
pub trait MatrixLike {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    /// Visits every stored nonzero in row-major order.
    fn for_each_nonzero<F: FnMut(usize, usize, f64)>(&self, f: F);

    /// `y = A x`
    fn mul_vec_into(&self, x: &[f64], y: &mut [f64]);

    /// `y = Aᵀ x`
    fn tr_mul_vec_into(&self, x: &[f64], y: &mut [f64]);

    fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows()];
        self.mul_vec_into(x, &mut y);
        y
    }

    fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.cols()];
        self.tr_mul_vec_into(x, &mut y);
        y
    }

    fn nnz(&self) -> usize {
        let mut n = 0;
        self.for_each_nonzero(|_, _, _| n += 1);
        n
    }

    fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows(), self.cols());
        self.for_each_nonzero(|i, j, v| out.data[i * out.cols + j] = v);
        out
    }

    fn to_sparse(&self) -> SparseMatrix {
        let mut entries = Vec::new();
        self.for_each_nonzero(|i, j, v| entries.push((i, j, v)));
        SparseMatrix::from_sorted_unchecked(self.rows(), self.cols(), entries)
    }
}

/// Row-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!("data length {} does not match {rows}x{cols}", data.len())));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("entry ({}, {})", pos / cols.max(1), pos % cols.max(1))));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// I.i.d. standard normal entries from the stream `Seed(seed)·INSTANCE`.
    pub fn random_gaussian(rows: usize, cols: usize, seed: u64) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = crate::rng::Seed::new(seed).derive(crate::rng::stage::INSTANCE).rng();
        Self::from_fn(rows, cols, |_, _| StandardNormal.sample(&mut rng))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a != 0.0 {
                    numeric::axpy(a, other.row(k), out_row);
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("cannot subtract {:?} from {:?}", other.shape(), self.shape())));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * c).collect() }
    }

    pub fn frobenius(&self) -> f64 {
        numeric::norm2(&self.data)
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl MatrixLike for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn for_each_nonzero<F: FnMut(usize, usize, f64)>(&self, mut f: F) {
        for i in 0..self.rows {
            for (j, &v) in self.row(i).iter().enumerate() {
                if v != 0.0 {
                    f(i, j, v);
                }
            }
        }
    }

    fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = numeric::dot(self.row(i), x);
        }
    }

    fn tr_mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.rows);
        assert_eq!(y.len(), self.cols);
        y.fill(0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                numeric::axpy(xi, self.row(i), y);
            }
        }
    }
}

/// Coordinate-format sparse matrix.
///
/// Entries are kept sorted by `(row, col)` with no duplicates, and every
/// stored value is finite and nonzero, so `nnz()` is the entry count.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
    row_ptr: Vec<usize>,
}

impl SparseMatrix {
    pub fn empty(rows: usize, cols: usize) -> Self {
        Self::from_sorted_unchecked(rows, cols, Vec::new())
    }

    /// Builds a matrix from triplets in any order. Exact zeros are dropped;
    /// duplicates, out-of-range indices and non-finite values are errors.
    pub fn from_triplets(rows: usize, cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, v) in &entries {
            check_entry(rows, cols, i, j, v)?;
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::DuplicateEntry { row: w[1].0, col: w[1].1 });
        }
        entries.retain(|e| e.2 != 0.0);
        Ok(Self::from_sorted_unchecked(rows, cols, entries))
    }

    /// Like [`from_triplets`](Self::from_triplets) but duplicate coordinates
    /// are summed. Entries that cancel to zero are dropped.
    pub fn from_triplets_summed(rows: usize, cols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        for &(i, j, v) in &entries {
            check_entry(rows, cols, i, j, v)?;
        }
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);
        Ok(Self::from_sorted_unchecked(rows, cols, merged))
    }

    pub(crate) fn from_sorted_unchecked(rows: usize, cols: usize, entries: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        debug_assert!(entries.iter().all(|e| e.2 != 0.0 && e.2.is_finite()));
        let mut row_ptr = vec![0usize; rows + 1];
        for &(i, _, _) in &entries {
            row_ptr[i + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { rows, cols, entries, row_ptr }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn row_entries(&self, i: usize) -> &[(usize, usize, f64)] {
        &self.entries[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.rows).map(|i| self.row_nnz(i)).max().unwrap_or(0)
    }

    pub fn col_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.cols];
        for &(_, j, _) in &self.entries {
            counts[j] += 1;
        }
        counts
    }

    pub fn max_col_nnz(&self) -> usize {
        self.col_counts().into_iter().max().unwrap_or(0)
    }

    pub fn transpose(&self) -> Self {
        let mut entries: Vec<_> = self.entries.iter().map(|&(i, j, v)| (j, i, v)).collect();
        entries.sort_by_key(|&(i, j, _)| (i, j));
        Self::from_sorted_unchecked(self.cols, self.rows, entries)
    }

    pub fn scale(&self, c: f64) -> Self {
        let entries = self.entries.iter().map(|&(i, j, v)| (i, j, v * c)).filter(|e| e.2 != 0.0).collect();
        Self::from_sorted_unchecked(self.rows, self.cols, entries)
    }

    pub fn frobenius(&self) -> f64 {
        numeric::sum(self.entries.iter().map(|e| e.2 * e.2)).sqrt()
    }

    /// Squared ℓ2 norm of every row.
    pub fn row_sq_norms(&self) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row_entries(i).iter().map(|e| e.2 * e.2).collect::<CompensatedSum>().value())
            .collect()
    }
}

fn check_entry(rows: usize, cols: usize, i: usize, j: usize, v: f64) -> Result<()> {
    if i >= rows || j >= cols {
        return Err(Error::IndexOutOfRange { row: i, col: j, rows, cols });
    }
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("entry ({i}, {j})")));
    }
    Ok(())
}

impl MatrixLike for SparseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn for_each_nonzero<F: FnMut(usize, usize, f64)>(&self, mut f: F) {
        for &(i, j, v) in &self.entries {
            f(i, j, v);
        }
    }

    fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row_entries(i).iter().map(|&(_, j, v)| v * x[j]).collect::<CompensatedSum>().value();
        }
    }

    fn tr_mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.rows);
        assert_eq!(y.len(), self.cols);
        y.fill(0.0);
        for &(i, j, v) in &self.entries {
            y[j] += v * x[i];
        }
    }

    fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn to_sparse(&self) -> SparseMatrix {
        self.clone()
    }
}

impl From<&DenseMatrix> for SparseMatrix {
    fn from(m: &DenseMatrix) -> Self {
        m.to_sparse()
    }
}

impl From<&SparseMatrix> for DenseMatrix {
    fn from(m: &SparseMatrix) -> Self {
        m.to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_rejects_bad_length_and_nan() {
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(matches!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn sparse_rejects_duplicates_and_out_of_range() {
        let dup = SparseMatrix::from_triplets(3, 3, vec![(2, 2, 1.0), (0, 0, 1.0), (2, 2, 4.0)]);
        assert!(matches!(dup, Err(Error::DuplicateEntry { row: 2, col: 2 })));
        let oob = SparseMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]);
        assert!(matches!(oob, Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn summed_triplets_merge_and_drop_cancellations() {
        let m = SparseMatrix::from_triplets_summed(2, 2, vec![(0, 1, 1.0), (0, 1, 2.0), (1, 0, 1.0), (1, 0, -1.0)])
            .unwrap();
        assert_eq!(m.entries(), &[(0, 1, 3.0)]);
    }

    #[test]
    fn dense_sparse_products_agree() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 0.0, 2.0], vec![0.0, -3.0, 4.0]]).unwrap();
        let s = a.to_sparse();
        let x = [1.0, 2.0, 3.0];
        assert_eq!(a.mul_vec(&x), s.mul_vec(&x));
        assert_eq!(a.tr_mul_vec(&[1.0, -1.0]), s.tr_mul_vec(&[1.0, -1.0]));
        assert_eq!(s.nnz(), 4);
        assert_eq!(s.max_row_nnz(), 2);
        assert_eq!(s.max_col_nnz(), 2);
        assert_eq!(s.transpose().to_dense(), a.transpose());
    }

    #[test]
    fn matmul_small() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = DenseMatrix::identity(2);
        assert_eq!(a.matmul(&b).unwrap(), a);
        assert!(a.matmul(&DenseMatrix::zeros(3, 1)).is_err());
    }
}
