//! Maximal and minimal ranks of linear matrix expressions, with witnesses.
//!
//! The closed forms are evaluated directly from ranks of bordered matrices.
//! Witnesses are built separately in the coordinates of the simultaneous
//! decomposition, then checked against the closed forms, so every report is
//! a cross-check of two independent computations.
//!
//! In those coordinates `rank p(X, Y) = m1 + m5 + m6 + rank Ω`, where
//!
//! ```text
//!     [ Z1  Z2  A3 ]
//! Ω = [ Z3  Z4  Z5 ]
//!     [ A7  Z6  Z7 ]
//! ```
//!
//! and `Z1 … Z7` range freely as `X` and `Y` do.

use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};
use serde::Serialize;

use crate::elimination::{canonical_reduce, inner_inverse, rank};
use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::scalar::Quaternion;
use crate::simdecomp::{simultaneous_decompose, BorderedRanks, QuintInput, SimDecomposition};

/// `p(X, Y) = A − B·X·D − C·Y·E`, with the same shape rules as
/// [`QuintInput`].
pub type PExpression = QuintInput;

/// Which term attains the outer minimum of the maximal-rank formula for
/// `p`. Ties go to the earliest variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MaxCase {
    /// `r[A; D; E]`
    StackedADE,
    /// `r[A B C]`
    RowABC,
    /// `r[A B; E 0]`
    BorderedABE,
    /// `r[A C; D 0]`
    BorderedACD,
}

impl MaxCase {
    /// The bordered rank this case names, e.g. `r[A B; E 0]`.
    pub fn term(self) -> &'static str {
        match self {
            MaxCase::StackedADE => "r[A; D; E]",
            MaxCase::RowABC => "r[A B C]",
            MaxCase::BorderedABE => "r[A B; E 0]",
            MaxCase::BorderedACD => "r[A C; D 0]",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalReport {
    pub max_rank: usize,
    pub min_rank: usize,
    /// Variable values attaining `max_rank`, in the order the expression
    /// names them (`X, Y` or `X1 … X4`).
    pub max_witness: Vec<QMatrix>,
    pub min_witness: Vec<QMatrix>,
    pub max_case: Option<MaxCase>,
}

fn r(grid: &[Vec<Option<&QMatrix>>]) -> Result<usize> {
    Ok(rank(&QMatrix::bordered(grid)?))
}

fn nonneg(expression: &str, v: i64) -> Result<usize> {
    usize::try_from(v).map_err(|_| Error::internal(format!("{expression}: rank formula evaluated to {v}")))
}

fn attained(expression: &str, bound: &str, formula: usize, got: usize) -> Result<()> {
    if formula == got {
        Ok(())
    } else {
        Err(Error::WitnessMissed { expression: expression.into(), bound: bound.into(), formula, attained: got })
    }
}

/// Closed-form maximum of `rank p(X, Y)` and the term attaining it.
pub fn p_max_formula(q: &PExpression) -> Result<(usize, MaxCase)> {
    let b = BorderedRanks::of(q)?;
    let terms = [
        (b.ade, MaxCase::StackedADE),
        (b.abc, MaxCase::RowABC),
        (b.ab_e, MaxCase::BorderedABE),
        (b.ac_d, MaxCase::BorderedACD),
    ];
    // `min_by_key` keeps the first of equal keys.
    Ok(terms.into_iter().min_by_key(|t| t.0).expect("four terms"))
}

/// Closed-form minimum of `rank p(X, Y)`.
pub fn p_min_formula(q: &PExpression) -> Result<usize> {
    let b = BorderedRanks::of(q)?;
    let i = |v: usize| v as i64;
    let left = i(b.ab_e) - i(b.abc_e) - i(b.ab_de);
    let right = i(b.ac_d) - i(b.abc_d) - i(b.ac_de);
    nonneg("p", i(b.ade) + i(b.abc) + left.max(right))
}

/// Closed forms for `p` when `R(B) ⊆ R(C)` and `R(E*) ⊆ R(D*)`.
pub fn p_contained_formulas(q: &PExpression) -> Result<(usize, usize)> {
    let (a, b, c, d, e) = (&q.a, &q.b, &q.c, &q.d, &q.e);
    let ad = r(&[vec![Some(a)], vec![Some(d)]])?;
    let ac = r(&[vec![Some(a), Some(c)]])?;
    let ab_e = r(&[vec![Some(a), Some(b)], vec![Some(e), None]])?;
    let ac_e = r(&[vec![Some(a), Some(c)], vec![Some(e), None]])?;
    let ab_d = r(&[vec![Some(a), Some(b)], vec![Some(d), None]])?;
    let max = ad.min(ac).min(ab_e);
    let min = nonneg("p (contained)", (ad + ac + ab_e) as i64 - ac_e as i64 - ab_d as i64)?;
    Ok((max, min))
}

/// Closed forms for `A − B·X − Y·C`.
pub fn f1_formulas(a: &QMatrix, b: &QMatrix, c: &QMatrix) -> Result<(usize, usize)> {
    let (m, n) = a.shape();
    let abc0 = r(&[vec![Some(a), Some(b)], vec![Some(c), None]])?;
    let max = m.min(n).min(abc0);
    let min = nonneg("f1", abc0 as i64 - rank(b) as i64 - rank(c) as i64)?;
    Ok((max, min))
}

/// Coefficients of `A − B1·X1 − X2·C2 − B3·X3·C3 − B4·X4·C4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F2Input {
    pub a: QMatrix,
    pub b1: QMatrix,
    pub c2: QMatrix,
    pub b3: QMatrix,
    pub c3: QMatrix,
    pub b4: QMatrix,
    pub c4: QMatrix,
}

impl F2Input {
    pub fn new(
        a: QMatrix,
        b1: QMatrix,
        c2: QMatrix,
        b3: QMatrix,
        c3: QMatrix,
        b4: QMatrix,
        c4: QMatrix,
    ) -> Result<Self> {
        let (m, n) = a.shape();
        for (name, rows) in [("B1", b1.rows()), ("B3", b3.rows()), ("B4", b4.rows())] {
            if rows != m {
                return Err(Error::dims(format!("{name} has {rows} rows, A has {m}")));
            }
        }
        for (name, cols) in [("C2", c2.cols()), ("C3", c3.cols()), ("C4", c4.cols())] {
            if cols != n {
                return Err(Error::dims(format!("{name} has {cols} columns, A has {n}")));
            }
        }
        Ok(Self { a, b1, c2, b3, c3, b4, c4 })
    }

    /// `[A B1; C2 0]` with the two-sided terms as a `p` expression.
    fn bordered_p(&self) -> Result<PExpression> {
        let (l, k) = (self.c2.rows(), self.b1.cols());
        QuintInput::new(
            QMatrix::bordered(&[vec![Some(&self.a), Some(&self.b1)], vec![Some(&self.c2), None]])?,
            self.b3.vcat(&QMatrix::zeros(l, self.b3.cols()))?,
            self.b4.vcat(&QMatrix::zeros(l, self.b4.cols()))?,
            self.c3.hcat(&QMatrix::zeros(self.c3.rows(), k))?,
            self.c4.hcat(&QMatrix::zeros(self.c4.rows(), k))?,
        )
    }

    /// `A − B3·X3·C3 − B4·X4·C4`.
    fn reduced(&self, x3: &QMatrix, x4: &QMatrix) -> Result<QMatrix> {
        let t3 = QMatrix::chain(&[&self.b3, x3, &self.c3])?;
        let t4 = QMatrix::chain(&[&self.b4, x4, &self.c4])?;
        self.a.sub(&t3)?.sub(&t4)
    }

    pub fn value(&self, x: &[QMatrix]) -> Result<QMatrix> {
        let [x1, x2, x3, x4] = x else {
            return Err(Error::dims("f2 takes four variables"));
        };
        let bx = self.b1.matmul(x1)?;
        let xc = x2.matmul(&self.c2)?;
        self.reduced(x3, x4)?.sub(&bx)?.sub(&xc)
    }
}

/// Bordered ranks shared by the f2 and f3 formulas.
struct F2Terms {
    /// `r[A B1; C2 0; C3 0; C4 0]`
    rows_all: usize,
    /// `r[A B1 B3 B4; C2 0 0 0]`
    cols_all: usize,
    /// `r[A B1 B3; C2 0 0; C4 0 0]`
    b3_c4: usize,
    /// `r[A B1 B4; C2 0 0; C3 0 0]`
    b4_c3: usize,
    /// `r[A B1 B3 B4; C2 0 0 0; C4 0 0 0]`
    b34_c4: usize,
    /// `r[A B1 B3; C2 0 0; C3 0 0; C4 0 0]`
    b3_c34: usize,
    /// `r[A B1 B3 B4; C2 0 0 0; C3 0 0 0]`
    b34_c3: usize,
    /// `r[A B1 B4; C2 0 0; C3 0 0; C4 0 0]`
    b4_c34: usize,
}

impl F2Terms {
    fn of(f: &F2Input) -> Result<Self> {
        let a = Some(&f.a);
        let (b1, b3, b4) = (Some(&f.b1), Some(&f.b3), Some(&f.b4));
        let (c2, c3, c4) = (Some(&f.c2), Some(&f.c3), Some(&f.c4));
        Ok(F2Terms {
            rows_all: r(&[vec![a, b1], vec![c2, None], vec![c3, None], vec![c4, None]])?,
            cols_all: r(&[vec![a, b1, b3, b4], vec![c2, None, None, None]])?,
            b3_c4: r(&[vec![a, b1, b3], vec![c2, None, None], vec![c4, None, None]])?,
            b4_c3: r(&[vec![a, b1, b4], vec![c2, None, None], vec![c3, None, None]])?,
            b34_c4: r(&[vec![a, b1, b3, b4], vec![c2, None, None, None], vec![c4, None, None, None]])?,
            b3_c34: r(&[vec![a, b1, b3], vec![c2, None, None], vec![c3, None, None], vec![c4, None, None]])?,
            b34_c3: r(&[vec![a, b1, b3, b4], vec![c2, None, None, None], vec![c3, None, None, None]])?,
            b4_c34: r(&[vec![a, b1, b4], vec![c2, None, None], vec![c3, None, None], vec![c4, None, None]])?,
        })
    }

    fn max_part(&self) -> usize {
        self.rows_all.min(self.cols_all).min(self.b3_c4).min(self.b4_c3)
    }

    fn inner_max(&self) -> i64 {
        let i = |v: usize| v as i64;
        let left = i(self.b3_c4) - i(self.b34_c4) - i(self.b3_c34);
        let right = i(self.b4_c3) - i(self.b34_c3) - i(self.b4_c34);
        left.max(right)
    }
}

pub fn f2_formulas(f: &F2Input) -> Result<(usize, usize)> {
    let t = F2Terms::of(f)?;
    let (m, n) = f.a.shape();
    let max = m.min(n).min(t.max_part());
    let min = (t.rows_all + t.cols_all) as i64 - rank(&f.b1) as i64 - rank(&f.c2) as i64 + t.inner_max();
    Ok((max, nonneg("f2", min)?))
}

/// Coefficients of `A − B1·X1·C1 − B2·X2·C2 − B3·X3·C3 − B4·X4·C4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct F3Input {
    pub a: QMatrix,
    pub b: [QMatrix; 4],
    pub c: [QMatrix; 4],
}

impl F3Input {
    pub fn new(a: QMatrix, b: [QMatrix; 4], c: [QMatrix; 4]) -> Result<Self> {
        let (m, n) = a.shape();
        for (i, bi) in b.iter().enumerate() {
            if bi.rows() != m {
                return Err(Error::dims(format!("B{} has {} rows, A has {m}", i + 1, bi.rows())));
            }
        }
        for (i, ci) in c.iter().enumerate() {
            if ci.cols() != n {
                return Err(Error::dims(format!("C{} has {} columns, A has {n}", i + 1, ci.cols())));
            }
        }
        Ok(Self { a, b, c })
    }

    fn preconditions(&self) -> Result<()> {
        for i in [0, 2, 3] {
            if !subspace_contained(&self.b[i], &self.b[1])? {
                return Err(Error::PreconditionViolated(format!("R(B{}) is not inside R(B2)", i + 1)));
            }
        }
        let c1 = self.c[0].ctranspose();
        for j in [1, 2, 3] {
            if !subspace_contained(&self.c[j].ctranspose(), &c1)? {
                return Err(Error::PreconditionViolated(format!("R(C{}*) is not inside R(C1*)", j + 1)));
            }
        }
        Ok(())
    }

    /// The f2-shaped view that shares its two-sided terms 3 and 4.
    fn as_f2(&self) -> Result<F2Input> {
        F2Input::new(
            self.a.clone(),
            self.b[0].clone(),
            self.c[1].clone(),
            self.b[2].clone(),
            self.c[2].clone(),
            self.b[3].clone(),
            self.c[3].clone(),
        )
    }

    pub fn value(&self, x: &[QMatrix]) -> Result<QMatrix> {
        if x.len() != 4 {
            return Err(Error::dims("f3 takes four variables"));
        }
        let mut out = self.a.clone();
        for ((b, xi), c) in self.b.iter().zip(x).zip(&self.c) {
            out = out.sub(&QMatrix::chain(&[b, xi, c])?)?;
        }
        Ok(out)
    }
}

pub fn f3_formulas(f: &F3Input) -> Result<(usize, usize)> {
    let t = F2Terms::of(&f.as_f2()?)?;
    let a = Some(&f.a);
    let (b1, b2) = (Some(&f.b[0]), Some(&f.b[1]));
    let (c1, c2) = (Some(&f.c[0]), Some(&f.c[1]));
    let ab2 = r(&[vec![a, b2]])?;
    let ac1 = r(&[vec![a], vec![c1]])?;
    let ab1_c1 = r(&[vec![a, b1], vec![c1, None]])?;
    let ab2_c2 = r(&[vec![a, b2], vec![c2, None]])?;
    let max = ab2.min(ac1).min(t.max_part());
    let min = (t.rows_all + t.cols_all + ac1 + ab2) as i64 - ab1_c1 as i64 - ab2_c2 as i64 + t.inner_max();
    Ok((max, nonneg("f3", min)?))
}

/// `R(U) ⊆ R(V)`, tested as `r[U V] = r(V)`.
pub fn subspace_contained(u: &QMatrix, v: &QMatrix) -> Result<bool> {
    if u.rows() != v.rows() {
        return Err(Error::dims(format!("U has {} rows but V has {}", u.rows(), v.rows())));
    }
    Ok(rank(&u.hcat(v)?) == rank(v))
}

/// Fills the free block `M` of `[A11 A12; A21 M]` with `A21·A11⁻·A12`, which
/// attains the least possible rank `r[A11 A12] + r[A11; A21] − r(A11)`.
pub fn min_completion_single_block(a11: &QMatrix, a12: &QMatrix, a21: &QMatrix) -> Result<(QMatrix, usize)> {
    if a12.rows() != a11.rows() || a21.cols() != a11.cols() {
        return Err(Error::dims(format!(
            "A11 is {:?}, A12 is {:?}, A21 is {:?}",
            a11.shape(),
            a12.shape(),
            a21.shape()
        )));
    }
    let m = QMatrix::chain(&[a21, &inner_inverse(a11), a12])?;
    let full = QMatrix::block(&[vec![a11, a12], vec![a21, &m]])?;
    let formula = rank(&a11.hcat(a12)?) + rank(&a11.vcat(a21)?) - rank(a11);
    let got = rank(&full);
    attained("single-block completion", "min", formula, got)?;
    Ok((m, got))
}

/// Maximum matching of the bipartite graph with `rows` row vertices and
/// `cols` column vertices; returns the matched `(row, col)` pairs.
fn max_matching(adj: &[Vec<usize>], cols: usize) -> Vec<(usize, usize)> {
    let rows = adj.len();
    let mut g = UnGraph::<(), ()>::with_capacity(rows + cols, 0);
    for _ in 0..rows + cols {
        g.add_node(());
    }
    for (i, js) in adj.iter().enumerate() {
        for &j in js {
            g.add_edge(NodeIndex::new(i), NodeIndex::new(rows + j), ());
        }
    }
    maximum_matching(&g)
        .edges()
        .map(|(u, v)| {
            let (u, v) = (u.index().min(v.index()), u.index().max(v.index()));
            (u, v - rows)
        })
        .collect()
}

/// Decomposition of `p` plus the reductions of `A3` and `A7` that put `Ω`
/// into the coordinates where both fixed blocks are partial identities.
struct Canonical {
    dec: SimDecomposition,
    rows: [usize; 3],
    cols: [usize; 3],
    /// `(P1⁻¹, I, P2⁻¹)` and `(Q2⁻¹, I, Q1⁻¹)`.
    row_back: [QMatrix; 3],
    col_back: [QMatrix; 3],
    a3_rank: usize,
    a7_rank: usize,
}

impl Canonical {
    fn new(q: &PExpression) -> Result<Self> {
        let dec = simultaneous_decompose(q)?;
        let d = dec.dims;
        let red3 = canonical_reduce(&dec.core.a[2]);
        let red7 = canonical_reduce(&dec.core.a[6]);
        Ok(Canonical {
            rows: [d.m2, d.m3, d.m4],
            cols: [d.n2, d.n3, d.n4],
            row_back: [red3.p_inv.clone(), QMatrix::identity(d.m3), red7.p_inv.clone()],
            col_back: [red7.q_inv.clone(), QMatrix::identity(d.n3), red3.q_inv.clone()],
            a3_rank: red3.rank,
            a7_rank: red7.rank,
            dec,
        })
    }

    fn is_fixed(i: usize, j: usize) -> bool {
        (i, j) == (0, 2) || (i, j) == (2, 0)
    }

    /// Turns canonical free blocks `Z̃` into `(X, Y)`. `z̃[i][j]` is ignored
    /// at the two fixed positions.
    fn witness(&self, zt: &[[QMatrix; 3]; 3]) -> Result<Vec<QMatrix>> {
        let core = &self.dec.core.a;
        let z = |i: usize, j: usize| QMatrix::chain(&[&self.row_back[i], &zt[i][j], &self.col_back[j]]);
        let d = self.dec.dims;
        let xs = d.x_hat_spec();
        let ys = d.y_hat_spec();
        let zeros = |spec: &crate::matrix::BlockSpec| -> Vec<Vec<QMatrix>> {
            spec.row_heights.iter().map(|&h| spec.col_widths.iter().map(|&w| QMatrix::zeros(h, w)).collect()).collect()
        };
        let mut xb = zeros(&xs);
        let mut yb = zeros(&ys);
        // The shared block Z4 = A5 − X5 − Y5 is carried entirely by X5.
        xb[0][0] = core[0].sub(&z(0, 0)?)?;
        xb[0][1] = core[1].sub(&z(0, 1)?)?;
        xb[1][0] = core[3].sub(&z(1, 0)?)?;
        xb[1][1] = core[4].sub(&z(1, 1)?)?;
        yb[1][2] = core[5].sub(&z(1, 2)?)?;
        yb[2][1] = core[7].sub(&z(2, 1)?)?;
        yb[2][2] = core[8].sub(&z(2, 2)?)?;
        let (x, y) = self.dec.unhat(&xs.assemble(&xb)?, &ys.assemble(&yb)?)?;
        Ok(vec![x, y])
    }

    fn zero_blocks(&self) -> [[QMatrix; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| QMatrix::zeros(self.rows[i], self.cols[j])))
    }

    /// Couple the two fixed identities through `I_s` in the two corners,
    /// `s = min(r(A3), r(A7))`, so that `rank Ω = max(r(A3), r(A7))`.
    fn min_witness(&self) -> Result<Vec<QMatrix>> {
        let s = self.a3_rank.min(self.a7_rank);
        let mut zt = self.zero_blocks();
        zt[0][0] = QMatrix::partial_identity(self.rows[0], self.cols[0], s);
        zt[2][2] = QMatrix::partial_identity(self.rows[2], self.cols[2], s);
        self.witness(&zt)
    }

    /// Puts `2` on a maximum matching of the free positions together with
    /// the fixed identity diagonals, and `0` on every other free position.
    /// The matched square submatrix is then a permuted `I ⊕ (2I + N)` with
    /// `N` a partial permutation, hence nonsingular, so `rank Ω` reaches
    /// the term rank, which bounds it from above.
    fn max_witness(&self) -> Result<Vec<QMatrix>> {
        let roff = [0, self.rows[0], self.rows[0] + self.rows[1]];
        let coff = [0, self.cols[0], self.cols[0] + self.cols[1]];
        let (nr, nc) = (self.rows.iter().sum::<usize>(), self.cols.iter().sum::<usize>());
        let block_of = |off: &[usize; 3], sizes: &[usize; 3], x: usize| {
            (0..3).find(|&b| x >= off[b] && x < off[b] + sizes[b]).expect("index inside the grid")
        };
        let mut adj = vec![Vec::new(); nr];
        for (gi, row) in adj.iter_mut().enumerate() {
            let bi = block_of(&roff, &self.rows, gi);
            for gj in 0..nc {
                let bj = block_of(&coff, &self.cols, gj);
                let edge = if Canonical::is_fixed(bi, bj) {
                    let (li, lj) = (gi - roff[bi], gj - coff[bj]);
                    let r = if bi == 0 { self.a3_rank } else { self.a7_rank };
                    li == lj && li < r
                } else {
                    true
                };
                if edge {
                    row.push(gj);
                }
            }
        }
        let mut zt = self.zero_blocks();
        let two = Quaternion::from(2);
        for (gi, gj) in max_matching(&adj, nc) {
            let (bi, bj) = (block_of(&roff, &self.rows, gi), block_of(&coff, &self.cols, gj));
            if !Canonical::is_fixed(bi, bj) {
                zt[bi][bj][(gi - roff[bi], gj - coff[bj])] = two.clone();
            }
        }
        self.witness(&zt)
    }
}

fn witness_rank(q: &PExpression, w: &[QMatrix]) -> Result<usize> {
    Ok(rank(&q.p_value(&w[0], &w[1])?))
}

pub fn extremal_ranks_p(q: &PExpression) -> Result<ExtremalReport> {
    let (max_rank, case) = p_max_formula(q)?;
    let min_rank = p_min_formula(q)?;
    let canon = Canonical::new(q)?;
    let max_witness = canon.max_witness()?;
    let min_witness = canon.min_witness()?;
    attained("p", "max", max_rank, witness_rank(q, &max_witness)?)?;
    attained("p", "min", min_rank, witness_rank(q, &min_witness)?)?;
    Ok(ExtremalReport { max_rank, min_rank, max_witness, min_witness, max_case: Some(case) })
}

pub fn extremal_ranks_p_contained(q: &PExpression) -> Result<ExtremalReport> {
    if !subspace_contained(&q.b, &q.c)? {
        return Err(Error::PreconditionViolated("R(B) is not inside R(C)".into()));
    }
    if !subspace_contained(&q.e.ctranspose(), &q.d.ctranspose())? {
        return Err(Error::PreconditionViolated("R(E*) is not inside R(D*)".into()));
    }
    let (max_rank, min_rank) = p_contained_formulas(q)?;
    let general = extremal_ranks_p(q)?;
    attained("p (contained)", "max", max_rank, general.max_rank)?;
    attained("p (contained)", "min", min_rank, general.min_rank)?;
    Ok(ExtremalReport { max_case: None, ..general })
}

/// `A − B·X − Y·C`.
pub fn extremal_ranks_f1(a: &QMatrix, b: &QMatrix, c: &QMatrix) -> Result<ExtremalReport> {
    let (m, n) = a.shape();
    if b.rows() != m || c.cols() != n {
        return Err(Error::dims(format!("A is {m}x{n}, B has {} rows, C has {} columns", b.rows(), c.cols())));
    }
    let (max_rank, min_rank) = f1_formulas(a, b, c)?;
    let q = QuintInput::new(a.clone(), b.clone(), QMatrix::identity(m), QMatrix::identity(n), c.clone())?;
    let canon = Canonical::new(&q)?;
    let max_witness = canon.max_witness()?;
    let min_witness = canon.min_witness()?;
    attained("f1", "max", max_rank, witness_rank(&q, &max_witness)?)?;
    attained("f1", "min", min_rank, witness_rank(&q, &min_witness)?)?;
    Ok(ExtremalReport { max_rank, min_rank, max_witness, min_witness, max_case: None })
}

pub fn extremal_ranks_f2(f: &F2Input) -> Result<ExtremalReport> {
    let (max_rank, min_rank) = f2_formulas(f)?;
    let outer = extremal_ranks_p(&f.bordered_p()?)?;
    let stage = |w: &[QMatrix], pick_max: bool| -> Result<Vec<QMatrix>> {
        let reduced = f.reduced(&w[0], &w[1])?;
        let inner = extremal_ranks_f1(&reduced, &f.b1, &f.c2)?;
        let xy = if pick_max { inner.max_witness } else { inner.min_witness };
        Ok(vec![xy[0].clone(), xy[1].clone(), w[0].clone(), w[1].clone()])
    };
    let max_witness = stage(&outer.max_witness, true)?;
    let min_witness = stage(&outer.min_witness, false)?;
    attained("f2", "max", max_rank, rank(&f.value(&max_witness)?))?;
    attained("f2", "min", min_rank, rank(&f.value(&min_witness)?))?;
    Ok(ExtremalReport { max_rank, min_rank, max_witness, min_witness, max_case: None })
}

pub fn extremal_ranks_f3(f: &F3Input) -> Result<ExtremalReport> {
    f.preconditions()?;
    let (max_rank, min_rank) = f3_formulas(f)?;
    let f2 = f.as_f2()?;
    let outer = extremal_ranks_p(&f2.bordered_p()?)?;
    let stage = |w: &[QMatrix], pick_max: bool| -> Result<Vec<QMatrix>> {
        let reduced = f2.reduced(&w[0], &w[1])?;
        let q = QuintInput::new(reduced, f.b[0].clone(), f.b[1].clone(), f.c[0].clone(), f.c[1].clone())?;
        let inner = extremal_ranks_p_contained(&q)?;
        let xy = if pick_max { inner.max_witness } else { inner.min_witness };
        Ok(vec![xy[0].clone(), xy[1].clone(), w[0].clone(), w[1].clone()])
    };
    let max_witness = stage(&outer.max_witness, true)?;
    let min_witness = stage(&outer.min_witness, false)?;
    attained("f3", "max", max_rank, rank(&f.value(&max_witness)?))?;
    attained("f3", "min", min_rank, rank(&f.value(&min_witness)?))?;
    Ok(ExtremalReport { max_rank, min_rank, max_witness, min_witness, max_case: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::arb_qmatrix;
    use proptest::prelude::*;

    fn m(rows: &[&[&str]]) -> QMatrix {
        QMatrix::parse_rows(rows).unwrap()
    }

    fn one(s: &str) -> QMatrix {
        m(&[&[s]])
    }

    fn quint(a: &str, b: &str, c: &str, d: &str, e: &str) -> QuintInput {
        QuintInput::new(one(a), one(b), one(c), one(d), one(e)).unwrap()
    }

    #[test]
    fn no_variable_terms() {
        let a = m(&[&["1", "i"], &["j", "k"], &["0", "1"]]);
        let q = QuintInput::new(
            a.clone(),
            QMatrix::zeros(3, 2),
            QMatrix::zeros(3, 1),
            QMatrix::zeros(2, 2),
            QMatrix::zeros(1, 2),
        )
        .unwrap();
        let rep = extremal_ranks_p(&q).unwrap();
        assert_eq!((rep.max_rank, rep.min_rank), (2, 2));
    }

    #[test]
    fn all_ones_p() {
        let q = quint("1", "1", "1", "1", "1");
        let rep = extremal_ranks_p(&q).unwrap();
        assert_eq!((rep.max_rank, rep.min_rank), (1, 0));
        assert!(q.p_value(&one("1"), &one("0")).unwrap().is_zero());
        let c = extremal_ranks_p_contained(&q).unwrap();
        assert_eq!((c.max_rank, c.min_rank), (1, 0));
    }

    #[test]
    fn identity_with_one_hit_entry() {
        let q = QuintInput::new(
            QMatrix::identity(2),
            m(&[&["1"], &["0"]]),
            QMatrix::zeros(2, 1),
            m(&[&["1", "0"]]),
            QMatrix::zeros(1, 2),
        )
        .unwrap();
        let rep = extremal_ranks_p(&q).unwrap();
        assert_eq!((rep.max_rank, rep.min_rank), (2, 1));
        assert_eq!(rank(&q.p_value(&one("1"), &QMatrix::zeros(1, 1)).unwrap()), 1);
    }

    #[test]
    fn max_case_tie_break() {
        // Every max term equals 1 here, so the first listed one wins.
        let rep = extremal_ranks_p(&quint("1", "1", "1", "1", "1")).unwrap();
        assert_eq!(rep.max_case, Some(MaxCase::StackedADE));
    }

    #[test]
    fn f1_examples() {
        let z = QMatrix::zeros;
        let a = m(&[&["1", "i"], &["0", "0"]]);
        let rep = extremal_ranks_f1(&a, &z(2, 1), &z(1, 2)).unwrap();
        assert_eq!((rep.max_rank, rep.min_rank), (1, 1));

        let rep = extremal_ranks_f1(&one("1"), &one("1"), &one("1")).unwrap();
        assert_eq!((rep.max_rank, rep.min_rank), (1, 0));

        let a = m(&[&["0", "1"], &["0", "0"]]);
        let b = m(&[&["1"], &["0"]]);
        let c = m(&[&["0", "1"]]);
        let rep = extremal_ranks_f1(&a, &b, &c).unwrap();
        assert_eq!(rep.min_rank, 0);
        let x = m(&[&["0", "1"]]);
        let fx = a.sub(&b.matmul(&x).unwrap()).unwrap();
        assert!(fx.is_zero());
    }

    #[test]
    fn f2_examples() {
        let z = QMatrix::zeros;
        // Vanishing two-sided terms reduce to f1.
        let a = m(&[&["1", "0"], &["j", "0"]]);
        let b1 = m(&[&["1"], &["0"]]);
        let c2 = m(&[&["0", "i"]]);
        let f = F2Input::new(a.clone(), b1.clone(), c2.clone(), z(2, 1), z(1, 2), z(2, 1), z(1, 2)).unwrap();
        let r2 = extremal_ranks_f2(&f).unwrap();
        let r1 = extremal_ranks_f1(&a, &b1, &c2).unwrap();
        assert_eq!((r2.max_rank, r2.min_rank), (r1.max_rank, r1.min_rank));

        // Vanishing one-sided terms reduce to p.
        let (b3, c3, b4, c4) = (m(&[&["1"], &["k"]]), m(&[&["1", "0"]]), m(&[&["0"], &["1"]]), m(&[&["0", "1"]]));
        let f = F2Input::new(a.clone(), z(2, 0), z(0, 2), b3.clone(), c3.clone(), b4.clone(), c4.clone()).unwrap();
        let r2 = extremal_ranks_f2(&f).unwrap();
        let rp = extremal_ranks_p(&QuintInput::new(a, b3, b4, c3, c4).unwrap()).unwrap();
        assert_eq!((r2.max_rank, r2.min_rank), (rp.max_rank, rp.min_rank));

        let f = F2Input::new(one("1"), one("1"), one("1"), one("1"), one("1"), one("0"), one("0")).unwrap();
        let rep = extremal_ranks_f2(&f).unwrap();
        assert_eq!((rep.max_rank, rep.min_rank), (1, 0));
        let x = [one("1"), one("0"), one("0"), one("0")];
        assert!(f.value(&x).unwrap().is_zero());
    }

    #[test]
    fn f3_examples() {
        let ones: [QMatrix; 4] = std::array::from_fn(|_| one("1"));
        let f = F3Input::new(one("1"), ones.clone(), ones).unwrap();
        let rep = extremal_ranks_f3(&f).unwrap();
        assert_eq!((rep.max_rank, rep.min_rank), (1, 0));

        let a = m(&[&["1", "i"], &["0", "j"]]);
        let zb: [QMatrix; 4] = std::array::from_fn(|_| QMatrix::zeros(2, 1));
        let zc: [QMatrix; 4] = std::array::from_fn(|_| QMatrix::zeros(1, 2));
        let rep = extremal_ranks_f3(&F3Input::new(a.clone(), zb, zc).unwrap()).unwrap();
        assert_eq!((rep.max_rank, rep.min_rank), (2, 2));

        let b = [one("1"), one("0"), one("0"), one("0")];
        let c: [QMatrix; 4] = std::array::from_fn(|_| one("1"));
        let bad = F3Input::new(one("1"), b, c).unwrap();
        assert!(matches!(extremal_ranks_f3(&bad), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn containment_examples() {
        let a = m(&[&["1", "i"], &["j", "k"]]);
        assert!(subspace_contained(&a, &QMatrix::identity(2)).unwrap());
        assert!(subspace_contained(&one("i"), &one("j")).unwrap());
        assert!(!subspace_contained(&one("1"), &one("0")).unwrap());
        assert!(subspace_contained(&QMatrix::zeros(2, 1), &QMatrix::zeros(2, 0)).unwrap());
        assert!(subspace_contained(&one("1"), &QMatrix::zeros(2, 1)).is_err());
    }

    #[test]
    fn contained_matches_general() {
        let a = m(&[&["1", "i"], &["j", "k"]]);
        let i2 = QMatrix::identity(2);
        let q = QuintInput::new(a, i2.clone(), i2.clone(), i2.clone(), i2).unwrap();
        let c = extremal_ranks_p_contained(&q).unwrap();
        let g = extremal_ranks_p(&q).unwrap();
        assert_eq!((c.max_rank, c.min_rank), (g.max_rank, g.min_rank));
    }

    #[test]
    fn completion_examples() {
        let (mm, r) = min_completion_single_block(&one("0"), &one("1"), &one("1")).unwrap();
        assert!(mm.is_zero());
        assert_eq!(r, 2);
        let a12 = m(&[&["1", "i"]]);
        let a21 = m(&[&["j"], &["2"]]);
        let (mm, r) = min_completion_single_block(&one("1"), &a12, &a21).unwrap();
        assert_eq!(mm, a21.matmul(&a12).unwrap());
        assert_eq!(r, 1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn p_witnesses_attain(
            a in arb_qmatrix(2, 3), b in arb_qmatrix(2, 1), c in arb_qmatrix(2, 2),
            d in arb_qmatrix(1, 3), e in arb_qmatrix(2, 3),
            x in arb_qmatrix(1, 1), y in arb_qmatrix(2, 2),
        ) {
            let q = QuintInput::new(a, b, c, d, e).unwrap();
            let rep = extremal_ranks_p(&q).unwrap();
            let r = rank(&q.p_value(&x, &y).unwrap());
            prop_assert!(rep.min_rank <= r && r <= rep.max_rank);
        }

        #[test]
        fn completion_is_minimal(
            a11 in arb_qmatrix(2, 2), a12 in arb_qmatrix(2, 1), a21 in arb_qmatrix(1, 2),
            other in arb_qmatrix(1, 1),
        ) {
            let (_, r) = min_completion_single_block(&a11, &a12, &a21).unwrap();
            let full = QMatrix::block(&[vec![&a11, &a12], vec![&a21, &other]]).unwrap();
            prop_assert!(rank(&full) >= r);
        }
    }
}
