use proptest::prelude::*;

use crate::matrix::QMatrix;
use crate::scalar::{rat, Quaternion};

fn arb_small() -> impl Strategy<Value = crate::scalar::Rational> {
    (-2i64..=2, 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

pub fn arb_quat() -> impl Strategy<Value = Quaternion> {
    prop_oneof![
        1 => Just(Quaternion::zero()),
        3 => (arb_small(), arb_small(), arb_small(), arb_small())
            .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d)),
    ]
}

pub fn arb_qmatrix(rows: usize, cols: usize) -> impl Strategy<Value = QMatrix> {
    prop::collection::vec(arb_quat(), rows * cols).prop_map(move |v| QMatrix::from_vec(rows, cols, v).unwrap())
}

/// Product of two random factors with inner dimension `inner`, so the rank is
/// at most `inner`.
pub fn arb_low_rank(rows: usize, cols: usize, inner: usize) -> impl Strategy<Value = QMatrix> {
    (arb_qmatrix(rows, inner), arb_qmatrix(inner, cols)).prop_map(|(a, b)| a.matmul(&b).unwrap())
}
