//! Seeded random instances for the self-test and the acceptance suite.
//!
//! Components are `k/d` with `k ∈ {−2, …, 2}` and `d ∈ {1, 2, 3}`. Matrix
//! dimensions are uniform in `[0, max_dim]`, so empty blocks show up often.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::elimination::{canonical_reduce, rank};
use crate::matrix::QMatrix;
use crate::scalar::{rat, Quaternion, Rational};
use crate::simdecomp::QuintInput;

pub struct Generator {
    rng: ChaCha8Rng,
}

/// FNV-1a, used only to turn a suite name into a stream id.
fn suite_id(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream for one case, fixed by `(seed, suite, index)`, so
    /// cases can run in any order or in parallel.
    pub fn for_case(seed: u64, suite: &str, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ suite_id(suite));
        rng.set_stream(index);
        Self { rng }
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn dim(&mut self, max_dim: usize) -> usize {
        self.rng.gen_range(0..=max_dim)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn rational(&mut self) -> Rational {
        rat(self.rng.gen_range(-2..=2), self.rng.gen_range(1..=3))
    }

    pub fn quaternion(&mut self) -> Quaternion {
        Quaternion::new(self.rational(), self.rational(), self.rational(), self.rational())
    }

    /// Dense random matrix; about one entry in five is zero.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> QMatrix {
        let data =
            (0..rows * cols).map(|_| if self.coin(0.2) { Quaternion::zero() } else { self.quaternion() }).collect();
        QMatrix::from_vec(rows, cols, data).expect("sizes agree")
    }

    /// Product of random `rows×inner` and `inner×cols` factors.
    pub fn low_rank(&mut self, rows: usize, cols: usize, inner: usize) -> QMatrix {
        let l = self.matrix(rows, inner);
        let r = self.matrix(inner, cols);
        l.matmul(&r).expect("inner sizes agree")
    }

    /// Random, planted-low-rank, or zero, in proportions 5 : 4 : 1.
    pub fn mixed(&mut self, rows: usize, cols: usize) -> QMatrix {
        match self.below(10) {
            0 => QMatrix::zeros(rows, cols),
            1..=4 => {
                let inner = self.dim(rows.min(cols).saturating_sub(1));
                self.low_rank(rows, cols, inner)
            }
            _ => self.matrix(rows, cols),
        }
    }

    /// A nonsingular matrix and its inverse.
    pub fn nonsingular(&mut self, n: usize) -> (QMatrix, QMatrix) {
        loop {
            let t = self.matrix(n, n);
            if rank(&t) == n {
                let red = canonical_reduce(&t);
                let inv = red.q.matmul(&red.p).expect("square");
                return (t, inv);
            }
        }
    }

    pub fn quint(&mut self, max_dim: usize) -> QuintInput {
        let (m, n) = (self.dim(max_dim), self.dim(max_dim));
        let (p1, p2, q1, q2) = (self.dim(max_dim), self.dim(max_dim), self.dim(max_dim), self.dim(max_dim));
        QuintInput::new(self.mixed(m, n), self.mixed(m, p1), self.mixed(m, p2), self.mixed(q1, n), self.mixed(q2, n))
            .expect("generated shapes conform")
    }

    /// `(X, Y)` of the shapes the quintuple expects.
    pub fn unknowns(&mut self, q: &QuintInput) -> (QMatrix, QMatrix) {
        let (p1, q1) = q.x_shape();
        let (p2, q2) = q.y_shape();
        (self.mixed(p1, q1), self.mixed(p2, q2))
    }

    /// A solvable instance: random coefficients and `A = B·X·D + C·Y·E` for
    /// random `(X, Y)`.
    pub fn planted_solvable(&mut self, max_dim: usize) -> QuintInput {
        let mut q = self.quint(max_dim);
        let (x, y) = self.unknowns(&q);
        q.a = q.apply(&x, &y).expect("shapes conform");
        q
    }

    /// An instance with `R(B) ⊆ R(C)` and `R(E*) ⊆ R(D*)`, obtained as
    /// `B = C·K` and `E = L·D`.
    pub fn contained_quint(&mut self, max_dim: usize) -> QuintInput {
        let mut q = self.quint(max_dim);
        let k = self.mixed(q.c.cols(), q.b.cols());
        let l = self.mixed(q.e.rows(), q.d.rows());
        q.b = q.c.matmul(&k).expect("shapes conform");
        q.e = l.matmul(&q.d).expect("shapes conform");
        q
    }
}
