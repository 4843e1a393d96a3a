//! Gaussian elimination over the quaternion division ring.
//!
//! Row operations act on the left and column operations on the right; the
//! multiplier of each elementary operation sits on the matching side. Every
//! operation updates the accumulated transform and its inverse together, so
//! `T·T⁻¹ = I` holds exactly without a second elimination pass.
//!
//! Pivots are the first nonzero entry in column order.

use crate::error::Result;
use crate::matrix::QMatrix;
use crate::scalar::Quaternion;

/// `P·A·Q = diag(I_r, 0)` with both inverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub p: QMatrix,
    pub p_inv: QMatrix,
    pub rank: usize,
    pub q: QMatrix,
    pub q_inv: QMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `T·A = [A₁; 0]`
    Rows,
    /// `A·T = [A₁ 0]`
    Cols,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compression {
    pub t: QMatrix,
    pub t_inv: QMatrix,
    pub rank: usize,
    pub side: Side,
}

impl Compression {
    /// The compressed matrix `T·A` or `A·T`.
    pub fn apply(&self, a: &QMatrix) -> Result<QMatrix> {
        match self.side {
            Side::Rows => self.t.matmul(a),
            Side::Cols => a.matmul(&self.t),
        }
    }
}

/// Working matrix together with the transforms accumulated on each side.
struct Eliminator {
    w: QMatrix,
    p: QMatrix,
    p_inv: QMatrix,
    q: QMatrix,
    q_inv: QMatrix,
}

impl Eliminator {
    fn new(a: &QMatrix) -> Self {
        let (m, n) = a.shape();
        Self {
            w: a.clone(),
            p: QMatrix::identity(m),
            p_inv: QMatrix::identity(m),
            q: QMatrix::identity(n),
            q_inv: QMatrix::identity(n),
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.w.swap_rows(a, b);
        self.p.swap_rows(a, b);
        self.p_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.w.swap_cols(a, b);
        self.q.swap_cols(a, b);
        self.q_inv.swap_rows(a, b);
    }

    /// row_k ← s·row_k
    fn scale_row(&mut self, k: usize, s: &Quaternion, s_inv: &Quaternion) {
        for j in 0..self.w.cols() {
            self.w[(k, j)] = s * &self.w[(k, j)];
        }
        for j in 0..self.p.cols() {
            self.p[(k, j)] = s * &self.p[(k, j)];
        }
        for i in 0..self.p_inv.rows() {
            self.p_inv[(i, k)] = &self.p_inv[(i, k)] * s_inv;
        }
    }

    /// row_i ← row_i + c·row_k
    fn add_row(&mut self, i: usize, k: usize, c: &Quaternion) {
        for j in 0..self.w.cols() {
            let v = c * &self.w[(k, j)];
            self.w[(i, j)] += &v;
        }
        for j in 0..self.p.cols() {
            let v = c * &self.p[(k, j)];
            self.p[(i, j)] += &v;
        }
        // P⁻¹ ← P⁻¹·(I − c·e_i e_kᵀ): col_k ← col_k − col_i·c
        for r in 0..self.p_inv.rows() {
            let v = &self.p_inv[(r, i)] * c;
            self.p_inv[(r, k)] -= &v;
        }
    }

    /// col_j ← col_j + col_k·c
    fn add_col(&mut self, j: usize, k: usize, c: &Quaternion) {
        for r in 0..self.w.rows() {
            let v = &self.w[(r, k)] * c;
            self.w[(r, j)] += &v;
        }
        for r in 0..self.q.rows() {
            let v = &self.q[(r, k)] * c;
            self.q[(r, j)] += &v;
        }
        // Q⁻¹ ← (I − e_k c e_jᵀ)·Q⁻¹: row_k ← row_k − c·row_j
        for col in 0..self.q_inv.cols() {
            let v = c * &self.q_inv[(j, col)];
            self.q_inv[(k, col)] -= &v;
        }
    }

    /// First nonzero in column order within the trailing submatrix.
    fn find_pivot(&self, row0: usize, col0: usize) -> Option<(usize, usize)> {
        (col0..self.w.cols()).find_map(|j| (row0..self.w.rows()).find(|&i| !self.w[(i, j)].is_zero()).map(|i| (i, j)))
    }

    /// Reduced row echelon form using row operations only; returns the rank.
    fn row_echelon(&mut self) -> usize {
        let mut k = 0;
        let mut col = 0;
        while k < self.w.rows() {
            let Some((i, j)) = self.find_pivot(k, col) else { break };
            self.swap_rows(i, k);
            let s_inv = self.w[(k, j)].clone();
            let s = s_inv.inv().expect("pivot is nonzero");
            self.scale_row(k, &s, &s_inv);
            for r in 0..self.w.rows() {
                if r != k && !self.w[(r, j)].is_zero() {
                    let c = -&self.w[(r, j)];
                    self.add_row(r, k, &c);
                }
            }
            k += 1;
            col = j + 1;
        }
        k
    }

    fn canonical(&mut self) -> usize {
        let mut k = 0;
        while k < self.w.rows().min(self.w.cols()) {
            let Some((i, j)) = self.find_pivot(k, k) else { break };
            self.swap_rows(i, k);
            self.swap_cols(j, k);
            let s_inv = self.w[(k, k)].clone();
            let s = s_inv.inv().expect("pivot is nonzero");
            self.scale_row(k, &s, &s_inv);
            for r in 0..self.w.rows() {
                if r != k && !self.w[(r, k)].is_zero() {
                    let c = -&self.w[(r, k)];
                    self.add_row(r, k, &c);
                }
            }
            for c in k + 1..self.w.cols() {
                if !self.w[(k, c)].is_zero() {
                    let coef = -&self.w[(k, c)];
                    self.add_col(c, k, &coef);
                }
            }
            k += 1;
        }
        k
    }
}

/// Quaternion rank: the dimension of the column right space.
pub fn rank(a: &QMatrix) -> usize {
    let mut w = a.clone();
    let (m, n) = w.shape();
    let mut r = 0;
    for j in 0..n {
        if r == m {
            break;
        }
        let Some(i) = (r..m).find(|&i| !w[(i, j)].is_zero()) else { continue };
        w.swap_rows(i, r);
        let inv = w[(r, j)].inv().expect("pivot is nonzero");
        for i in r + 1..m {
            if w[(i, j)].is_zero() {
                continue;
            }
            let c = &w[(i, j)] * &inv;
            for col in j..n {
                let v = &c * &w[(r, col)];
                w[(i, col)] -= &v;
            }
        }
        r += 1;
    }
    r
}

pub fn canonical_reduce(a: &QMatrix) -> Reduction {
    let mut e = Eliminator::new(a);
    let rank = e.canonical();
    debug_assert_eq!(e.w, QMatrix::partial_identity(a.rows(), a.cols(), rank));
    Reduction { p: e.p, p_inv: e.p_inv, rank, q: e.q, q_inv: e.q_inv }
}

pub fn compress_rows(a: &QMatrix) -> Compression {
    let mut e = Eliminator::new(a);
    let rank = e.row_echelon();
    Compression { t: e.p, t_inv: e.p_inv, rank, side: Side::Rows }
}

/// Column compression via the row compression of `A*`: if `T·A* = [A₁*; 0]`
/// then `A·T* = [A₁ 0]`.
pub fn compress_cols(a: &QMatrix) -> Compression {
    let c = compress_rows(&a.ctranspose());
    Compression { t: c.t.ctranspose(), t_inv: c.t_inv.ctranspose(), rank: c.rank, side: Side::Cols }
}

/// Reflexive inner inverse `Q·diag(I_r, 0)·P`, so `A·G·A = A` and `G·A·G = G`.
pub fn inner_inverse(a: &QMatrix) -> QMatrix {
    let red = canonical_reduce(a);
    let (m, n) = a.shape();
    let core = QMatrix::partial_identity(n, m, red.rank);
    QMatrix::chain(&[&red.q, &core, &red.p]).expect("shapes conform")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{arb_low_rank, arb_qmatrix};
    use proptest::prelude::*;

    fn m(rows: &[&[&str]]) -> QMatrix {
        QMatrix::parse_rows(rows).unwrap()
    }

    fn check_reduction(a: &QMatrix, red: &Reduction) {
        let (rows, cols) = a.shape();
        assert!(red.p.matmul(&red.p_inv).unwrap().is_identity());
        assert!(red.p_inv.matmul(&red.p).unwrap().is_identity());
        assert!(red.q.matmul(&red.q_inv).unwrap().is_identity());
        assert!(red.q_inv.matmul(&red.q).unwrap().is_identity());
        let paq = QMatrix::chain(&[&red.p, a, &red.q]).unwrap();
        assert_eq!(paq, QMatrix::partial_identity(rows, cols, red.rank));
        let back = QMatrix::chain(&[&red.p_inv, &paq, &red.q_inv]).unwrap();
        assert_eq!(&back, a);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&QMatrix::zeros(2, 3)), 0);
        // second row is j times the first
        assert_eq!(rank(&m(&[&["1", "i"], &["j", "-k"]])), 1);
        assert_eq!(rank(&m(&[&["1", "i"], &["j", "k"]])), 2);
        assert_eq!(rank(&QMatrix::zeros(0, 4)), 0);
    }

    #[test]
    fn left_dependence_is_not_right_dependence() {
        // [1 i; j k]: row 2 = j·row 1 would need j·i = -k, not k.
        let a = m(&[&["1", "i"], &["j", "k"]]);
        assert_eq!(rank(&a), 2);
        // whereas row 2 = j·row 1 exactly:
        let b = m(&[&["1", "i"], &["j", "-k"]]);
        assert_eq!(rank(&b), 1);
    }

    #[test]
    fn canonical_examples() {
        let z = QMatrix::zeros(2, 3);
        let red = canonical_reduce(&z);
        assert_eq!(red.rank, 0);
        assert!(red.p.is_identity() && red.q.is_identity());

        let i3 = QMatrix::identity(3);
        let red = canonical_reduce(&i3);
        assert_eq!(red.rank, 3);
        check_reduction(&i3, &red);

        let a = m(&[&["1", "i"], &["j", "-k"]]);
        let red = canonical_reduce(&a);
        assert_eq!(red.rank, 1);
        check_reduction(&a, &red);

        let e = QMatrix::zeros(0, 2);
        let red = canonical_reduce(&e);
        assert_eq!((red.rank, red.p.shape(), red.q.shape()), (0, (0, 0), (2, 2)));
    }

    #[test]
    fn compression_examples() {
        let c = compress_rows(&QMatrix::zeros(2, 2));
        assert_eq!(c.rank, 0);
        assert!(c.t.is_identity());

        let a = m(&[&["1"], &["j"]]);
        let c = compress_rows(&a);
        assert_eq!(c.rank, 1);
        let ta = c.apply(&a).unwrap();
        assert!(!ta[(0, 0)].is_zero() && ta[(1, 0)].is_zero());

        let a = m(&[&["1", "i"]]);
        let c = compress_cols(&a);
        assert_eq!(c.rank, 1);
        let at = c.apply(&a).unwrap();
        assert!(!at[(0, 0)].is_zero() && at[(0, 1)].is_zero());
        assert!(c.t.matmul(&c.t_inv).unwrap().is_identity());
    }

    #[test]
    fn inner_inverse_examples() {
        let z = QMatrix::zeros(2, 3);
        assert_eq!(inner_inverse(&z), QMatrix::zeros(3, 2));
        assert_eq!(inner_inverse(&QMatrix::identity(2)), QMatrix::identity(2));
        let a = m(&[&["1", "i"], &["j", "-k"]]);
        let g = inner_inverse(&a);
        assert_eq!(QMatrix::chain(&[&a, &g, &a]).unwrap(), a);
    }

    fn arb_nonsingular(n: usize) -> impl Strategy<Value = QMatrix> {
        arb_qmatrix(n, n).prop_filter("singular", move |p| rank(p) == n)
    }

    proptest! {
        #[test]
        fn reduction_reconstructs(a in arb_low_rank(3, 4, 2)) {
            let red = canonical_reduce(&a);
            prop_assert_eq!(red.rank, rank(&a));
            check_reduction(&a, &red);
        }

        #[test]
        fn rank_is_transform_invariant(a in arb_low_rank(3, 3, 2), p in arb_nonsingular(3), q in arb_nonsingular(3)) {
            let paq = QMatrix::chain(&[&p, &a, &q]).unwrap();
            prop_assert_eq!(rank(&paq), rank(&a));
            prop_assert_eq!(rank(&a.ctranspose()), rank(&a));
        }

        #[test]
        fn compressions_have_the_stated_shape(a in arb_low_rank(4, 3, 2)) {
            let rows = compress_rows(&a);
            let ta = rows.apply(&a).unwrap();
            prop_assert_eq!(rows.rank, rank(&a));
            prop_assert!(ta.submatrix(rows.rank, 0, 4 - rows.rank, 3).is_zero());
            prop_assert_eq!(rank(&ta.submatrix(0, 0, rows.rank, 3)), rows.rank);
            prop_assert!(rows.t.matmul(&rows.t_inv).unwrap().is_identity());

            let cols = compress_cols(&a);
            let at = cols.apply(&a).unwrap();
            prop_assert_eq!(cols.rank, rows.rank);
            prop_assert!(at.submatrix(0, cols.rank, 4, 3 - cols.rank).is_zero());
            prop_assert_eq!(rank(&at.submatrix(0, 0, 4, cols.rank)), cols.rank);
            prop_assert!(cols.t_inv.matmul(&cols.t).unwrap().is_identity());
        }

        #[test]
        fn inner_inverse_identity(a in arb_low_rank(3, 4, 2)) {
            let g = inner_inverse(&a);
            prop_assert_eq!(QMatrix::chain(&[&a, &g, &a]).unwrap(), a);
        }
    }
}
