//! Dense quaternion matrices, block calculus and the real 4×4 embedding.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Quaternion, Rational};

/// Row-major dense `rows × cols` quaternion matrix. Either dimension may be 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims(format!("{} entries supplied for a {rows}x{cols} matrix", data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::dims("ragged rows"));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds from quaternion literals; handy in tests and examples.
    pub fn parse_rows(rows: &[&[&str]]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| Quaternion::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Quaternion::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::one();
        }
        m
    }

    pub fn scalar(q: Quaternion) -> Self {
        Self { rows: 1, cols: 1, data: vec![q] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Quaternion] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Quaternion::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let q = &self[(i, j)];
                    if i == j {
                        q.is_one()
                    } else {
                        q.is_zero()
                    }
                })
            })
    }

    pub fn matmul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(l, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Product of a chain of conforming matrices, left to right.
    pub fn chain(factors: &[&QMatrix]) -> Result<QMatrix> {
        let (first, rest) = factors.split_first().ok_or_else(|| Error::dims("empty product"))?;
        rest.iter().try_fold((*first).clone(), |acc, f| acc.matmul(f))
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.zip_with(other, "subtract", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &QMatrix,
        what: &str,
        f: impl Fn(&Quaternion, &Quaternion) -> Quaternion,
    ) -> Result<QMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::dims(format!(
                "cannot {what} {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect();
        Ok(QMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|q| -q).collect() }
    }

    /// Conjugate transpose.
    pub fn ctranspose(&self) -> QMatrix {
        let mut out = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> QMatrix {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols, "submatrix out of range");
        let mut out = QMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)].clone();
            }
        }
        out
    }

    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        assert!(r0 + block.rows <= self.rows && c0 + block.cols <= self.cols, "block out of range");
        for i in 0..block.rows {
            for j in 0..block.cols {
                self[(r0 + i, c0 + j)] = block[(i, j)].clone();
            }
        }
    }

    /// `[self other]`.
    pub fn hcat(&self, other: &QMatrix) -> Result<QMatrix> {
        QMatrix::block(&[vec![self, other]])
    }

    /// `[self; other]`.
    pub fn vcat(&self, other: &QMatrix) -> Result<QMatrix> {
        QMatrix::block(&[vec![self], vec![other]])
    }

    /// Assembles a grid of blocks whose sizes are inferred. Each block row must
    /// share a height and each block column a width.
    pub fn block(grid: &[Vec<&QMatrix>]) -> Result<QMatrix> {
        let ncols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|r| r.len() != ncols) {
            return Err(Error::dims("ragged block grid"));
        }
        if ncols == 0 {
            return Ok(QMatrix::zeros(0, 0));
        }
        let heights: Vec<usize> = grid.iter().map(|r| r[0].rows).collect();
        let widths: Vec<usize> = (0..ncols).map(|j| grid[0][j].cols).collect();
        let owned: Vec<Vec<QMatrix>> = grid.iter().map(|r| r.iter().map(|b| (*b).clone()).collect()).collect();
        BlockSpec::new(heights, widths).assemble(&owned)
    }

    /// Assembles a bordered block matrix in which `None` stands for a zero
    /// block. Every block row and block column needs at least one `Some` to
    /// fix its size, e.g. `[A B; E 0]`.
    pub fn bordered(grid: &[Vec<Option<&QMatrix>>]) -> Result<QMatrix> {
        let ncols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|r| r.len() != ncols) {
            return Err(Error::dims("ragged block grid"));
        }
        let heights = grid
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .flatten()
                    .next()
                    .map(|b| b.rows)
                    .ok_or_else(|| Error::dims(format!("block row {i} has no sized block")))
            })
            .collect::<Result<Vec<_>>>()?;
        let widths = (0..ncols)
            .map(|j| {
                grid.iter()
                    .find_map(|r| r[j].map(|b| b.cols))
                    .ok_or_else(|| Error::dims(format!("block column {j} has no sized block")))
            })
            .collect::<Result<Vec<_>>>()?;
        let blocks: Vec<Vec<QMatrix>> = grid
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.iter()
                    .enumerate()
                    .map(|(j, b)| b.cloned().unwrap_or_else(|| QMatrix::zeros(heights[i], widths[j])))
                    .collect()
            })
            .collect();
        BlockSpec::new(heights, widths).assemble(&blocks)
    }

    /// Block diagonal matrix.
    pub fn diag(blocks: &[&QMatrix]) -> QMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = QMatrix::zeros(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            out.set_submatrix(r, c, b);
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// `diag(I_r, 0)` of shape `rows × cols`.
    pub fn partial_identity(rows: usize, cols: usize, r: usize) -> QMatrix {
        assert!(r <= rows.min(cols));
        let mut out = QMatrix::zeros(rows, cols);
        for i in 0..r {
            out[(i, i)] = Quaternion::one();
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Quaternion) -> Quaternion) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Left-regular real representation: each entry `q` becomes the 4×4
    /// matrix of `v ↦ q·v` on the basis (1, i, j, k), so that
    /// `embed(XY) = embed(X)·embed(Y)`.
    pub fn real_embedding(&self) -> RealMatrix {
        let mut out = RealMatrix::zeros(4 * self.rows, 4 * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let q = &self[(r, c)];
                if q.is_zero() {
                    continue;
                }
                let (a, b, cc, d) = (&q.re, &q.i, &q.j, &q.k);
                let block = [
                    [a.clone(), -b, -cc, -d],
                    [b.clone(), a.clone(), -d, cc.clone()],
                    [cc.clone(), d.clone(), a.clone(), -b],
                    [d.clone(), -cc, b.clone(), a.clone()],
                ];
                for (i, row) in block.into_iter().enumerate() {
                    for (j, v) in row.into_iter().enumerate() {
                        out[(4 * r + i, 4 * c + j)] = v;
                    }
                }
            }
        }
        out
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "[{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Aligned-column table using the canonical quaternion formatter.
impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 0 || self.cols == 0 {
            return writeln!(f, "({}x{} empty)", self.rows, self.cols);
        }
        let cells: Vec<String> = self.data.iter().map(ToString::to_string).collect();
        let widths: Vec<usize> =
            (0..self.cols).map(|j| (0..self.rows).map(|i| cells[i * self.cols + j].len()).max().unwrap_or(0)).collect();
        for i in 0..self.rows {
            let line: Vec<String> =
                (0..self.cols).map(|j| format!("{:>w$}", cells[i * self.cols + j], w = widths[j])).collect();
            writeln!(f, "[ {} ]", line.join("  "))?;
        }
        Ok(())
    }
}

/// Row heights and column widths partitioning a matrix into blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub row_heights: Vec<usize>,
    pub col_widths: Vec<usize>,
}

impl BlockSpec {
    pub fn new(row_heights: Vec<usize>, col_widths: Vec<usize>) -> Self {
        Self { row_heights, col_widths }
    }

    pub fn rows(&self) -> usize {
        self.row_heights.iter().sum()
    }

    pub fn cols(&self) -> usize {
        self.col_widths.iter().sum()
    }

    pub fn row_offset(&self, i: usize) -> usize {
        self.row_heights[..i].iter().sum()
    }

    pub fn col_offset(&self, j: usize) -> usize {
        self.col_widths[..j].iter().sum()
    }

    pub fn assemble(&self, blocks: &[Vec<QMatrix>]) -> Result<QMatrix> {
        if blocks.len() != self.row_heights.len() || blocks.iter().any(|r| r.len() != self.col_widths.len()) {
            return Err(Error::dims("block grid does not match the block spec"));
        }
        let mut out = QMatrix::zeros(self.rows(), self.cols());
        for (bi, row) in blocks.iter().enumerate() {
            for (bj, b) in row.iter().enumerate() {
                if b.shape() != (self.row_heights[bi], self.col_widths[bj]) {
                    return Err(Error::dims(format!(
                        "block ({bi},{bj}) is {}x{}, expected {}x{}",
                        b.rows, b.cols, self.row_heights[bi], self.col_widths[bj]
                    )));
                }
                out.set_submatrix(self.row_offset(bi), self.col_offset(bj), b);
            }
        }
        Ok(out)
    }

    pub fn extract(&self, m: &QMatrix, i: usize, j: usize) -> Result<QMatrix> {
        if m.shape() != (self.rows(), self.cols()) {
            return Err(Error::dims(format!(
                "matrix is {}x{} but the block spec covers {}x{}",
                m.rows,
                m.cols,
                self.rows(),
                self.cols()
            )));
        }
        if i >= self.row_heights.len() || j >= self.col_widths.len() {
            return Err(Error::dims(format!("block index ({i},{j}) out of range")));
        }
        Ok(m.submatrix(self.row_offset(i), self.col_offset(j), self.row_heights[i], self.col_widths[j]))
    }

    pub fn split(&self, m: &QMatrix) -> Result<Vec<Vec<QMatrix>>> {
        (0..self.row_heights.len())
            .map(|i| (0..self.col_widths.len()).map(|j| self.extract(m, i, j)).collect())
            .collect()
    }
}

/// Dense rational matrix; the target of [`QMatrix::real_embedding`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matmul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != other.rows {
            return Err(Error::dims("real matrix product does not conform"));
        }
        let mut out = RealMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = a * &other[(l, j)];
                    out[(i, j)] += v;
                }
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::arb_qmatrix;
    use proptest::prelude::*;

    fn m(rows: &[&[&str]]) -> QMatrix {
        QMatrix::parse_rows(rows).unwrap()
    }

    #[test]
    fn products() {
        let x = m(&[&["1", "2*i"], &["j", "3/2"]]);
        assert_eq!(QMatrix::identity(2).matmul(&x).unwrap(), x);
        assert_eq!(m(&[&["i"]]).matmul(&m(&[&["j"]])).unwrap(), m(&[&["k"]]));
        let l = m(&[&["1", "i"], &["0", "1"]]);
        let r = m(&[&["1", "0"], &["j", "1"]]);
        assert_eq!(l.matmul(&r).unwrap(), m(&[&["1+k", "i"], &["j", "1"]]));
        assert!(matches!(l.matmul(&QMatrix::zeros(3, 1)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn conjugate_transpose() {
        assert_eq!(m(&[&["i", "j"]]).ctranspose(), m(&[&["-i"], &["-j"]]));
        assert_eq!(QMatrix::identity(3).ctranspose(), QMatrix::identity(3));
        let x = m(&[&["1", "i"], &["j", "k"]]);
        assert_eq!(x.ctranspose().ctranspose(), x);
    }

    #[test]
    fn block_assembly() {
        let one = QMatrix::identity(1);
        let z = QMatrix::zeros(1, 1);
        let spec = BlockSpec::new(vec![1, 1], vec![1, 1]);
        let i2 = spec.assemble(&[vec![one.clone(), z.clone()], vec![z.clone(), one.clone()]]).unwrap();
        assert_eq!(i2, QMatrix::identity(2));
        assert_eq!(spec.extract(&i2, 1, 1).unwrap(), one);

        // A zero-height block row disappears from the result.
        let spec = BlockSpec::new(vec![0, 1], vec![2]);
        let out = spec.assemble(&[vec![QMatrix::zeros(0, 2)], vec![m(&[&["1", "i"]])]]).unwrap();
        assert_eq!(out, m(&[&["1", "i"]]));
        assert_eq!(spec.extract(&out, 0, 0).unwrap().shape(), (0, 2));

        let bad = spec.assemble(&[vec![QMatrix::zeros(1, 2)], vec![m(&[&["1", "i"]])]]);
        assert!(matches!(bad, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn embedding_examples() {
        assert!(m(&[&["0"]]).real_embedding() == RealMatrix::zeros(4, 4));
        let id = m(&[&["1"]]).real_embedding();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(id[(i, j)], if i == j { crate::scalar::int(1) } else { Rational::zero() });
            }
        }
        let ij = m(&[&["i"]]).real_embedding().matmul(&m(&[&["j"]]).real_embedding()).unwrap();
        assert_eq!(ij, m(&[&["k"]]).real_embedding());
    }

    proptest! {
        #[test]
        fn matmul_associative(a in arb_qmatrix(3, 2), b in arb_qmatrix(2, 3), c in arb_qmatrix(3, 2)) {
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn ctranspose_reverses_products(a in arb_qmatrix(2, 3), b in arb_qmatrix(3, 2)) {
            let lhs = a.matmul(&b).unwrap().ctranspose();
            let rhs = b.ctranspose().matmul(&a.ctranspose()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn embedding_is_multiplicative(a in arb_qmatrix(2, 3), b in arb_qmatrix(3, 2)) {
            let lhs = a.matmul(&b).unwrap().real_embedding();
            let rhs = a.real_embedding().matmul(&b.real_embedding()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn block_split_round_trip(a in arb_qmatrix(4, 3)) {
            let spec = BlockSpec::new(vec![1, 0, 3], vec![2, 1]);
            let blocks = spec.split(&a).unwrap();
            prop_assert_eq!(spec.assemble(&blocks).unwrap(), a);
        }
    }
}
