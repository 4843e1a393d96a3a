//! Brute-force cross-checks through the real 4×4 embedding.
//!
//! Nothing here calls into [`crate::elimination`]: ranks and solvability are
//! recomputed with plain Gaussian elimination over ℚ on real matrices that are
//! 4× (ranks) or up to 64× (the linearized equation) larger than the
//! quaternion problem.
//!
//! Unknowns of the linearized equation are ordered: X before Y, entries
//! row-major, and components (1, i, j, k) within each entry. Equations follow
//! the same order over the entries of `A`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matrix::{QMatrix, RealMatrix};
use crate::scalar::{Quaternion, Rational};
use crate::simdecomp::QuintInput;

/// Real linearization of `B·X·D + C·Y·E = A`.
#[derive(Clone, Debug)]
pub struct RealSystem {
    pub coefficients: RealMatrix,
    pub rhs: Vec<Rational>,
}

/// Row-reduces in place and returns the pivot columns.
fn rref(m: &mut RealMatrix) -> Vec<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
        if p != r {
            for j in 0..cols {
                let tmp = m[(p, j)].clone();
                m[(p, j)] = m[(r, j)].clone();
                m[(r, j)] = tmp;
            }
        }
        let inv = m[(r, c)].recip();
        for j in c..cols {
            m[(r, j)] = &m[(r, j)] * &inv;
        }
        for i in 0..rows {
            if i == r || m[(i, c)].is_zero() {
                continue;
            }
            let f = m[(i, c)].clone();
            for j in c..cols {
                let v = &f * &m[(r, j)];
                m[(i, j)] -= v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn real_rank(m: &RealMatrix) -> usize {
    let mut w = m.clone();
    rref(&mut w).len()
}

/// Quaternion rank recovered as a quarter of the real rank of the embedding.
pub fn oracle_rank(a: &QMatrix) -> Result<usize> {
    let r = real_rank(&a.real_embedding());
    if !r.is_multiple_of(4) {
        return Err(Error::internal(format!("embedded real rank {r} is not divisible by 4")));
    }
    Ok(r / 4)
}

fn push_components(col: &mut Vec<Rational>, m: &QMatrix) {
    for q in m.entries() {
        col.extend(q.components().into_iter().cloned());
    }
}

/// Column for the unknown `e_c` at entry `(i, j)` of the middle factor of
/// `left·(·)·right`: the matrix `left[:, i]·e_c·right[j, :]`.
fn unit_response(left: &QMatrix, right: &QMatrix, i: usize, j: usize, c: usize) -> QMatrix {
    let e = Quaternion::basis(c);
    let mut out = QMatrix::zeros(left.rows(), right.cols());
    for r in 0..left.rows() {
        let le = &left[(r, i)] * &e;
        if le.is_zero() {
            continue;
        }
        for s in 0..right.cols() {
            out[(r, s)] = &le * &right[(j, s)];
        }
    }
    out
}

pub fn build_real_system(input: &QuintInput) -> RealSystem {
    let (m, n) = input.a.shape();
    let mut columns: Vec<Vec<Rational>> = Vec::new();
    for (left, right) in [(&input.b, &input.d), (&input.c, &input.e)] {
        for i in 0..left.cols() {
            for j in 0..right.rows() {
                for c in 0..4 {
                    let mut col = Vec::with_capacity(4 * m * n);
                    push_components(&mut col, &unit_response(left, right, i, j, c));
                    columns.push(col);
                }
            }
        }
    }
    let mut coefficients = RealMatrix::zeros(4 * m * n, columns.len());
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            coefficients[(i, j)] = v;
        }
    }
    let mut rhs = Vec::with_capacity(4 * m * n);
    push_components(&mut rhs, &input.a);
    RealSystem { coefficients, rhs }
}

fn augmented(sys: &RealSystem) -> RealMatrix {
    let (rows, cols) = (sys.coefficients.rows(), sys.coefficients.cols());
    let mut aug = RealMatrix::zeros(rows, cols + 1);
    for i in 0..rows {
        for j in 0..cols {
            aug[(i, j)] = sys.coefficients[(i, j)].clone();
        }
        aug[(i, cols)] = sys.rhs[i].clone();
    }
    aug
}

pub fn oracle_solvable(input: &QuintInput) -> bool {
    oracle_solve(input).is_some()
}

/// One exact solution `(X, Y)` with every free real unknown set to zero, or
/// `None` when the real system is inconsistent.
pub fn oracle_solve(input: &QuintInput) -> Option<(QMatrix, QMatrix)> {
    let sys = build_real_system(input);
    let unknowns = sys.coefficients.cols();
    let mut aug = augmented(&sys);
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&unknowns) {
        return None;
    }
    let mut values = vec![Rational::zero(); unknowns];
    for (r, &c) in pivots.iter().enumerate() {
        values[c] = aug[(r, unknowns)].clone();
    }

    let rebuild = |rows: usize, cols: usize, offset: usize| {
        let data = (0..rows * cols)
            .map(|e| {
                let base = offset + 4 * e;
                Quaternion::new(
                    values[base].clone(),
                    values[base + 1].clone(),
                    values[base + 2].clone(),
                    values[base + 3].clone(),
                )
            })
            .collect();
        QMatrix::from_vec(rows, cols, data).expect("sizes agree")
    };
    let (p1, q1) = (input.b.cols(), input.d.rows());
    let (p2, q2) = (input.c.cols(), input.e.rows());
    let x = rebuild(p1, q1, 0);
    let y = rebuild(p2, q2, 4 * p1 * q1);
    Some((x, y))
}
