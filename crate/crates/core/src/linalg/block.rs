use alloc::vec::Vec;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Partition of a matrix into a grid of blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    block_rows: Vec<usize>,
    block_cols: Vec<usize>,
}

impl BlockLayout {
    pub fn new(block_rows: Vec<usize>, block_cols: Vec<usize>) -> Result<Self> {
        if block_rows.is_empty() || block_cols.is_empty() {
            return Err(Error::InvalidLayout("no blocks"));
        }
        if block_rows.iter().chain(&block_cols).any(|&s| s == 0) {
            return Err(Error::InvalidLayout("block sizes must be positive"));
        }
        Ok(BlockLayout {
            block_rows,
            block_cols,
        })
    }

    /// `blocks x blocks` grid of `size x size` blocks.
    pub fn uniform(blocks: usize, size: usize) -> Result<Self> {
        Self::new(alloc::vec![size; blocks], alloc::vec![size; blocks])
    }

    /// A single block covering the whole matrix.
    pub fn whole(rows: usize, cols: usize) -> Result<Self> {
        Self::new(alloc::vec![rows], alloc::vec![cols])
    }

    pub fn block_rows(&self) -> &[usize] {
        &self.block_rows
    }

    pub fn block_cols(&self) -> &[usize] {
        &self.block_cols
    }

    pub fn total_rows(&self) -> usize {
        self.block_rows.iter().sum()
    }

    pub fn total_cols(&self) -> usize {
        self.block_cols.iter().sum()
    }

    fn row_offset(&self, i: usize) -> usize {
        self.block_rows[..i].iter().sum()
    }

    fn col_offset(&self, j: usize) -> usize {
        self.block_cols[..j].iter().sum()
    }
}

/// Copy of block `(i, j)` of `a` under `layout`.
pub fn extract_block(
    a: &ComplexMatrix,
    layout: &BlockLayout,
    i: usize,
    j: usize,
) -> Result<ComplexMatrix> {
    if layout.total_rows() != a.rows() || layout.total_cols() != a.cols() {
        return Err(Error::InvalidLayout("layout does not match matrix shape"));
    }
    if i >= layout.block_rows.len() || j >= layout.block_cols.len() {
        return Err(Error::BlockOutOfRange { row: i, col: j });
    }
    a.submatrix(
        layout.row_offset(i),
        layout.col_offset(j),
        layout.block_rows[i],
        layout.block_cols[j],
    )
}

/// Kronecker product; the row index of `a ⊗ b` is `i_a * b.rows + i_b`, so
/// the factor on the right varies fastest.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = b.shape();
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Block-diagonal matrix with the given (possibly rectangular) blocks.
pub fn block_diag(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let rows = blocks.iter().map(|b| b.rows()).sum();
    let cols = blocks.iter().map(|b| b.cols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.set_submatrix(r, c, b).expect("block fits by construction");
        r += b.rows();
        c += b.cols();
    }
    out
}

/// Square block matrix with `diag` on the block diagonal and `superdiag` on
/// the first block superdiagonal. All blocks must be `n x n`.
pub fn block_bidiagonal(diag: &[ComplexMatrix], superdiag: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if diag.len() != superdiag.len() + 1 {
        return Err(Error::LengthMismatch {
            points: diag.len(),
            directions: superdiag.len(),
        });
    }
    let n = diag[0].rows();
    for m in diag.iter().chain(superdiag) {
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                op: "block_bidiagonal",
                left: (n, n),
                right: m.shape(),
            });
        }
    }
    let k1 = diag.len();
    let mut out = ComplexMatrix::zeros(k1 * n, k1 * n);
    for (i, d) in diag.iter().enumerate() {
        out.set_submatrix(i * n, i * n, d)?;
    }
    for (i, h) in superdiag.iter().enumerate() {
        out.set_submatrix(i * n, (i + 1) * n, h)?;
    }
    Ok(out)
}
