//! Simultaneous decomposition of the array `(A, B, C, D, E)`.
//!
//! One set of nonsingular transforms `P, Q, T1, T2, V1, V2` brings all five
//! matrices to coupled block forms at once:
//!
//! ```text
//! A = P·S_A·Q,  B = P·S_B·T1,  C = P·S_C·T2,  D = V1·S_D·Q,  E = V2·S_E·Q
//! ```
//!
//! `S_A` has block rows `(m1, …, m7)` and block columns
//! `(m6, n2, n3, n4, m5, m1, n7)`. Its only free part is the 3×3 core
//! `A1 … A9` on rows `(m2, m3, m4)` and columns `(n2, n3, n4)`; everything else
//! is an identity or zero. `S_B` and `S_C` share the identity `I_m3` on the
//! same block row, and `S_D`, `S_E` share `I_n3` on the same block column.
//!
//! The construction runs in seven stages. Each stage applies block
//! transforms, updates every running transform together with its inverse, and
//! checks the zero pattern it was supposed to create.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::elimination::{canonical_reduce, compress_cols, compress_rows, rank};
use crate::error::{Error, Result};
use crate::matrix::{BlockSpec, QMatrix};

/// The five matrices of the equation `B·X·D + C·Y·E = A` and the expression
/// `A − B·X·D − C·Y·E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuintInput {
    pub a: QMatrix,
    pub b: QMatrix,
    pub c: QMatrix,
    pub d: QMatrix,
    pub e: QMatrix,
}

impl QuintInput {
    pub fn new(a: QMatrix, b: QMatrix, c: QMatrix, d: QMatrix, e: QMatrix) -> Result<Self> {
        let (m, n) = a.shape();
        if b.rows() != m || c.rows() != m {
            return Err(Error::dims(format!("A has {m} rows but B has {} and C has {}", b.rows(), c.rows())));
        }
        if d.cols() != n || e.cols() != n {
            return Err(Error::dims(format!("A has {n} columns but D has {} and E has {}", d.cols(), e.cols())));
        }
        Ok(Self { a, b, c, d, e })
    }

    /// Shape `(p1, q1)` of `X`.
    pub fn x_shape(&self) -> (usize, usize) {
        (self.b.cols(), self.d.rows())
    }

    /// Shape `(p2, q2)` of `Y`.
    pub fn y_shape(&self) -> (usize, usize) {
        (self.c.cols(), self.e.rows())
    }

    fn check_unknowns(&self, x: &QMatrix, y: &QMatrix) -> Result<()> {
        if x.shape() != self.x_shape() || y.shape() != self.y_shape() {
            return Err(Error::dims(format!(
                "X must be {:?} and Y must be {:?}, got {:?} and {:?}",
                self.x_shape(),
                self.y_shape(),
                x.shape(),
                y.shape()
            )));
        }
        Ok(())
    }

    /// `B·X·D + C·Y·E`.
    pub fn apply(&self, x: &QMatrix, y: &QMatrix) -> Result<QMatrix> {
        self.check_unknowns(x, y)?;
        let bxd = QMatrix::chain(&[&self.b, x, &self.d])?;
        let cye = QMatrix::chain(&[&self.c, y, &self.e])?;
        bxd.add(&cye)
    }

    /// `A − B·X·D − C·Y·E`.
    pub fn p_value(&self, x: &QMatrix, y: &QMatrix) -> Result<QMatrix> {
        self.a.sub(&self.apply(x, y)?)
    }

    /// `B·X·D + C·Y·E − A`; zero exactly when `(X, Y)` solves the equation.
    pub fn residual(&self, x: &QMatrix, y: &QMatrix) -> Result<QMatrix> {
        self.apply(x, y)?.sub(&self.a)
    }

    /// `(U·A·W, U·B·R1, U·C·R2, R3·D·W, R4·E·W)`.
    pub fn transformed(&self, u: &QMatrix, w: &QMatrix, r: [&QMatrix; 4]) -> Result<QuintInput> {
        QuintInput::new(
            QMatrix::chain(&[u, &self.a, w])?,
            QMatrix::chain(&[u, &self.b, r[0]])?,
            QMatrix::chain(&[u, &self.c, r[1]])?,
            QMatrix::chain(&[r[2], &self.d, w])?,
            QMatrix::chain(&[r[3], &self.e, w])?,
        )
    }
}

/// Block sizes of the decomposition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimVector {
    pub m1: usize,
    pub m2: usize,
    pub m3: usize,
    pub m4: usize,
    pub m5: usize,
    pub m6: usize,
    pub m7: usize,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
    pub n7: usize,
    pub w_b1: usize,
    pub w_c1: usize,
    pub h_d1: usize,
    pub h_e1: usize,
}

impl DimVector {
    pub fn a_rows(&self) -> Vec<usize> {
        vec![self.m1, self.m2, self.m3, self.m4, self.m5, self.m6, self.m7]
    }

    pub fn a_cols(&self) -> Vec<usize> {
        vec![self.m6, self.n2, self.n3, self.n4, self.m5, self.m1, self.n7]
    }

    pub fn b_cols(&self) -> Vec<usize> {
        vec![self.m2, self.m3, self.w_b1]
    }

    pub fn c_cols(&self) -> Vec<usize> {
        vec![self.w_c1, self.m3, self.m4]
    }

    pub fn d_rows(&self) -> Vec<usize> {
        vec![self.n2, self.n3, self.h_d1]
    }

    pub fn e_rows(&self) -> Vec<usize> {
        vec![self.h_e1, self.n3, self.n4]
    }

    pub fn a_spec(&self) -> BlockSpec {
        BlockSpec::new(self.a_rows(), self.a_cols())
    }

    pub fn b_spec(&self) -> BlockSpec {
        BlockSpec::new(self.a_rows(), self.b_cols())
    }

    pub fn c_spec(&self) -> BlockSpec {
        BlockSpec::new(self.a_rows(), self.c_cols())
    }

    pub fn d_spec(&self) -> BlockSpec {
        BlockSpec::new(self.d_rows(), self.a_cols())
    }

    pub fn e_spec(&self) -> BlockSpec {
        BlockSpec::new(self.e_rows(), self.a_cols())
    }

    /// Partition of `T1·X·V1`, matching the B columns and D rows.
    pub fn x_hat_spec(&self) -> BlockSpec {
        BlockSpec::new(self.b_cols(), self.d_rows())
    }

    /// Partition of `T2·Y·V2`, matching the C columns and E rows.
    pub fn y_hat_spec(&self) -> BlockSpec {
        BlockSpec::new(self.c_cols(), self.e_rows())
    }

    /// Partition of the 3×3 core `A1 … A9`.
    pub fn core_spec(&self) -> BlockSpec {
        BlockSpec::new(vec![self.m2, self.m3, self.m4], vec![self.n2, self.n3, self.n4])
    }

    /// `m1 + m5 + m6`, the only combination of the three pinned by ranks.
    pub fn m156(&self) -> usize {
        self.m1 + self.m5 + self.m6
    }
}

/// Free blocks left after the decomposition. `a[0]` is `A1`, …, `a[8]` is `A9`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreBlocks {
    pub a: [QMatrix; 9],
    pub b1: QMatrix,
    pub c1: QMatrix,
    pub c2: QMatrix,
    pub d1: QMatrix,
    pub e1: QMatrix,
    pub e2: QMatrix,
}

impl CoreBlocks {
    fn extract(dims: &DimVector, sa: &QMatrix, sb: &QMatrix, sc: &QMatrix, sd: &QMatrix, se: &QMatrix) -> Result<Self> {
        let (asp, bsp, csp, dsp, esp) = (dims.a_spec(), dims.b_spec(), dims.c_spec(), dims.d_spec(), dims.e_spec());
        let mut a = Vec::with_capacity(9);
        for i in 1..=3 {
            for j in 1..=3 {
                a.push(asp.extract(sa, i, j)?);
            }
        }
        Ok(CoreBlocks {
            a: a.try_into().expect("nine blocks"),
            b1: bsp.extract(sb, 0, 2)?,
            c1: csp.extract(sc, 0, 0)?,
            c2: csp.extract(sc, 0, 1)?,
            d1: dsp.extract(sd, 2, 0)?,
            e1: esp.extract(se, 0, 0)?,
            e2: esp.extract(se, 1, 0)?,
        })
    }

    /// The core `[A1 A2 A3; A4 A5 A6; A7 A8 A9]` as one matrix.
    pub fn omega(&self, dims: &DimVector) -> QMatrix {
        let grid: Vec<Vec<QMatrix>> = self.a.chunks(3).map(|r| r.to_vec()).collect();
        dims.core_spec().assemble(&grid).expect("core blocks match their spec")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimDecomposition {
    pub p: QMatrix,
    pub p_inv: QMatrix,
    pub q: QMatrix,
    pub q_inv: QMatrix,
    pub t1: QMatrix,
    pub t1_inv: QMatrix,
    pub t2: QMatrix,
    pub t2_inv: QMatrix,
    pub v1: QMatrix,
    pub v1_inv: QMatrix,
    pub v2: QMatrix,
    pub v2_inv: QMatrix,
    pub s_a: QMatrix,
    pub s_b: QMatrix,
    pub s_c: QMatrix,
    pub s_d: QMatrix,
    pub s_e: QMatrix,
    pub dims: DimVector,
    pub core: CoreBlocks,
}

impl SimDecomposition {
    /// Maps `X̂`, `Ŷ` in decomposition coordinates back to
    /// `X = T1⁻¹·X̂·V1⁻¹` and `Y = T2⁻¹·Ŷ·V2⁻¹`.
    pub fn unhat(&self, x_hat: &QMatrix, y_hat: &QMatrix) -> Result<(QMatrix, QMatrix)> {
        let x = QMatrix::chain(&[&self.t1_inv, x_hat, &self.v1_inv])?;
        let y = QMatrix::chain(&[&self.t2_inv, y_hat, &self.v2_inv])?;
        Ok((x, y))
    }
}

/// Identity with the given off-diagonal blocks. Callers only pass patterns
/// whose strictly off-diagonal part `N` squares to zero, so the inverse is
/// `I − N`.
fn block_unipotent(sizes: &[usize], entries: &[(usize, usize, QMatrix)]) -> (QMatrix, QMatrix) {
    let total: usize = sizes.iter().sum();
    let mut t = QMatrix::identity(total);
    let mut t_inv = QMatrix::identity(total);
    let off = |i: usize| sizes[..i].iter().sum::<usize>();
    for (i, j, block) in entries {
        debug_assert_ne!(i, j);
        debug_assert_eq!(block.shape(), (sizes[*i], sizes[*j]));
        t.set_submatrix(off(*i), off(*j), block);
        t_inv.set_submatrix(off(*i), off(*j), &block.neg());
    }
    debug_assert!(t.matmul(&t_inv).unwrap().is_identity());
    (t, t_inv)
}

/// Permutation `Π` with `(M·Π)[:, k] = M[:, order[k]]`; its inverse is `Πᵀ`.
fn permutation(order: &[usize]) -> (QMatrix, QMatrix) {
    let n = order.len();
    let mut pi = QMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        pi[(src, k)] = crate::scalar::Quaternion::one();
    }
    let pi_t = pi.ctranspose();
    (pi, pi_t)
}

fn block_at(m: &QMatrix, rows: &[usize], cols: &[usize], i: usize, j: usize) -> QMatrix {
    let r0: usize = rows[..i].iter().sum();
    let c0: usize = cols[..j].iter().sum();
    m.submatrix(r0, c0, rows[i], cols[j])
}

fn expect_zero(m: &QMatrix, what: &str) -> Result<()> {
    if m.is_zero() {
        Ok(())
    } else {
        Err(Error::internal(format!("{what} should vanish")))
    }
}

/// Outcome of [`pair_canonicalize_rows`]:
/// `P7·[Bp Cp]·diag(WB, WC)` has block rows `(m2, m3, m4)` and reads
///
/// ```text
/// [ I 0 0 | 0 0 0 ]
/// [ 0 I 0 | 0 I 0 ]
/// [ 0 0 0 | 0 0 I ]
/// ```
///
/// with B columns `(m2, m3, rest)` and C columns `(rest, m3, m4)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairRows {
    pub p7: QMatrix,
    pub p7_inv: QMatrix,
    pub wb: QMatrix,
    pub wb_inv: QMatrix,
    pub wc: QMatrix,
    pub wc_inv: QMatrix,
    pub m2: usize,
    pub m3: usize,
    pub m4: usize,
}

/// Dual of [`PairRows`]: `diag(WD, WE)·[Dp; Ep]·Q7` has block columns
/// `(n2, n3, n4)`, D rows `(n2, n3, rest)` and E rows `(rest, n3, n4)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCols {
    pub q7: QMatrix,
    pub q7_inv: QMatrix,
    pub wd: QMatrix,
    pub wd_inv: QMatrix,
    pub we: QMatrix,
    pub we_inv: QMatrix,
    pub n2: usize,
    pub n3: usize,
    pub n4: usize,
}

struct PairState {
    p: QMatrix,
    p_inv: QMatrix,
    wb: QMatrix,
    wb_inv: QMatrix,
    wc: QMatrix,
    wc_inv: QMatrix,
    b: QMatrix,
    c: QMatrix,
}

impl PairState {
    fn left(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.p = t.matmul(&self.p).expect("square transform");
        self.p_inv = self.p_inv.matmul(t_inv).expect("square transform");
        self.b = t.matmul(&self.b).expect("square transform");
        self.c = t.matmul(&self.c).expect("square transform");
    }

    fn right_b(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.wb = self.wb.matmul(t).expect("square transform");
        self.wb_inv = t_inv.matmul(&self.wb_inv).expect("square transform");
        self.b = self.b.matmul(t).expect("square transform");
    }

    fn right_c(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.wc = self.wc.matmul(t).expect("square transform");
        self.wc_inv = t_inv.matmul(&self.wc_inv).expect("square transform");
        self.c = self.c.matmul(t).expect("square transform");
    }
}

pub fn pair_canonicalize_rows(bp: &QMatrix, cp: &QMatrix) -> Result<PairRows> {
    if bp.rows() != cp.rows() {
        return Err(Error::dims(format!("Bp has {} rows but Cp has {}", bp.rows(), cp.rows())));
    }
    let h = bp.rows();
    let (pb, pc) = (bp.cols(), cp.cols());
    if rank(&bp.hcat(cp)?) != h {
        return Err(Error::PreconditionViolated("[Bp Cp] must have full row rank".into()));
    }
    let mut s = PairState {
        p: QMatrix::identity(h),
        p_inv: QMatrix::identity(h),
        wb: QMatrix::identity(pb),
        wb_inv: QMatrix::identity(pb),
        wc: QMatrix::identity(pc),
        wc_inv: QMatrix::identity(pc),
        b: bp.clone(),
        c: cp.clone(),
    };

    // B to diag(I_rb, 0).
    let red = canonical_reduce(bp);
    let rb = red.rank;
    s.left(&red.p, &red.p_inv);
    s.right_b(&red.q, &red.q_inv);
    let m4 = h - rb;

    // The last m4 rows carry no B; their C part has full row rank. Reduce it
    // to [I 0] and move the identity to the last C columns.
    let bottom = s.c.submatrix(rb, 0, m4, pc);
    let red = canonical_reduce(&bottom);
    if red.rank != m4 {
        return Err(Error::internal("lower C rows lost full row rank"));
    }
    s.left(&QMatrix::diag(&[&QMatrix::identity(rb), &red.p]), &QMatrix::diag(&[&QMatrix::identity(rb), &red.p_inv]));
    s.right_c(&red.q, &red.q_inv);
    let order: Vec<usize> = (m4..pc).chain(0..m4).collect();
    let (pi, pi_t) = permutation(&order);
    s.right_c(&pi, &pi_t);

    // Clear the C entries above I_m4 using the B-free lower rows.
    let rest = pc - m4;
    let above = s.c.submatrix(0, rest, rb, m4);
    let (l, l_inv) = block_unipotent(&[rb, m4], &[(0, 1, above.neg())]);
    s.left(&l, &l_inv);
    expect_zero(&s.c.submatrix(0, rest, rb, m4), "C above I_m4")?;

    // Split the upper rows by the rank of their remaining C part, repairing
    // the B identity with a column transform on B.
    let ct = s.c.submatrix(0, 0, rb, rest);
    let red = canonical_reduce(&ct);
    let m3 = red.rank;
    let m2 = rb - m3;
    let im4 = QMatrix::identity(m4);
    s.left(&QMatrix::diag(&[&red.p, &im4]), &QMatrix::diag(&[&red.p_inv, &im4]));
    let ib = QMatrix::identity(pb - rb);
    s.right_b(&QMatrix::diag(&[&red.p_inv, &ib]), &QMatrix::diag(&[&red.p, &ib]));
    s.right_c(&QMatrix::diag(&[&red.q, &im4]), &QMatrix::diag(&[&red.q_inv, &im4]));

    // Reorder rows to (m2, m3, m4), with B columns following, and move the
    // m3 identity of C after the free C columns.
    let row_order: Vec<usize> = (m3..rb).chain(0..m3).chain(rb..h).collect();
    let (pr, pr_t) = permutation(&row_order);
    // Left row permutation is Πᵀ for the column-order convention.
    s.left(&pr_t, &pr);
    let b_order: Vec<usize> = (m3..rb).chain(0..m3).chain(rb..pb).collect();
    let (pbm, pbm_t) = permutation(&b_order);
    s.right_b(&pbm, &pbm_t);
    let c_order: Vec<usize> = (m3..rest).chain(0..m3).chain(rest..pc).collect();
    let (pcm, pcm_t) = permutation(&c_order);
    s.right_c(&pcm, &pcm_t);

    let rows = [m2, m3, m4];
    let expected_b = BlockSpec::new(rows.to_vec(), vec![m2, m3, pb - rb]).assemble(&[
        vec![QMatrix::identity(m2), QMatrix::zeros(m2, m3), QMatrix::zeros(m2, pb - rb)],
        vec![QMatrix::zeros(m3, m2), QMatrix::identity(m3), QMatrix::zeros(m3, pb - rb)],
        vec![QMatrix::zeros(m4, m2), QMatrix::zeros(m4, m3), QMatrix::zeros(m4, pb - rb)],
    ])?;
    let wc1 = pc - m3 - m4;
    let expected_c = BlockSpec::new(rows.to_vec(), vec![wc1, m3, m4]).assemble(&[
        vec![QMatrix::zeros(m2, wc1), QMatrix::zeros(m2, m3), QMatrix::zeros(m2, m4)],
        vec![QMatrix::zeros(m3, wc1), QMatrix::identity(m3), QMatrix::zeros(m3, m4)],
        vec![QMatrix::zeros(m4, wc1), QMatrix::zeros(m4, m3), QMatrix::identity(m4)],
    ])?;
    if s.b != expected_b || s.c != expected_c {
        return Err(Error::internal("paired row reduction missed its template"));
    }
    Ok(PairRows { p7: s.p, p7_inv: s.p_inv, wb: s.wb, wb_inv: s.wb_inv, wc: s.wc, wc_inv: s.wc_inv, m2, m3, m4 })
}

pub fn pair_canonicalize_cols(dp: &QMatrix, ep: &QMatrix) -> Result<PairCols> {
    if dp.cols() != ep.cols() {
        return Err(Error::dims(format!("Dp has {} columns but Ep has {}", dp.cols(), ep.cols())));
    }
    let r = pair_canonicalize_rows(&dp.ctranspose(), &ep.ctranspose()).map_err(|e| match e {
        Error::PreconditionViolated(_) => Error::PreconditionViolated("[Dp; Ep] must have full column rank".into()),
        other => other,
    })?;
    Ok(PairCols {
        q7: r.p7.ctranspose(),
        q7_inv: r.p7_inv.ctranspose(),
        wd: r.wb.ctranspose(),
        wd_inv: r.wb_inv.ctranspose(),
        we: r.wc.ctranspose(),
        we_inv: r.wc_inv.ctranspose(),
        n2: r.m2,
        n3: r.m3,
        n4: r.m4,
    })
}

/// Running matrices and transforms: `a = L·A·R`, `b = L·B·TB`, `c = L·C·TC`,
/// `d = VD·D·R`, `e = VE·E·R`.
struct Work {
    a: QMatrix,
    b: QMatrix,
    c: QMatrix,
    d: QMatrix,
    e: QMatrix,
    l: (QMatrix, QMatrix),
    r: (QMatrix, QMatrix),
    tb: (QMatrix, QMatrix),
    tc: (QMatrix, QMatrix),
    vd: (QMatrix, QMatrix),
    ve: (QMatrix, QMatrix),
}

fn ident_pair(n: usize) -> (QMatrix, QMatrix) {
    (QMatrix::identity(n), QMatrix::identity(n))
}

fn mul(x: &QMatrix, y: &QMatrix) -> QMatrix {
    x.matmul(y).expect("conforming transform")
}

impl Work {
    fn new(input: &QuintInput) -> Self {
        let (m, n) = input.a.shape();
        Work {
            a: input.a.clone(),
            b: input.b.clone(),
            c: input.c.clone(),
            d: input.d.clone(),
            e: input.e.clone(),
            l: ident_pair(m),
            r: ident_pair(n),
            tb: ident_pair(input.b.cols()),
            tc: ident_pair(input.c.cols()),
            vd: ident_pair(input.d.rows()),
            ve: ident_pair(input.e.rows()),
        }
    }

    fn left(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.a = mul(t, &self.a);
        self.b = mul(t, &self.b);
        self.c = mul(t, &self.c);
        self.l = (mul(t, &self.l.0), mul(&self.l.1, t_inv));
    }

    fn right(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.a = mul(&self.a, t);
        self.d = mul(&self.d, t);
        self.e = mul(&self.e, t);
        self.r = (mul(&self.r.0, t), mul(t_inv, &self.r.1));
    }

    fn right_b(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.b = mul(&self.b, t);
        self.tb = (mul(&self.tb.0, t), mul(t_inv, &self.tb.1));
    }

    fn right_c(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.c = mul(&self.c, t);
        self.tc = (mul(&self.tc.0, t), mul(t_inv, &self.tc.1));
    }

    fn left_d(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.d = mul(t, &self.d);
        self.vd = (mul(t, &self.vd.0), mul(&self.vd.1, t_inv));
    }

    fn left_e(&mut self, t: &QMatrix, t_inv: &QMatrix) {
        self.e = mul(t, &self.e);
        self.ve = (mul(t, &self.ve.0), mul(&self.ve.1, t_inv));
    }
}

fn diag_pair(blocks: &[(&QMatrix, &QMatrix)]) -> (QMatrix, QMatrix) {
    let t: Vec<&QMatrix> = blocks.iter().map(|b| b.0).collect();
    let t_inv: Vec<&QMatrix> = blocks.iter().map(|b| b.1).collect();
    (QMatrix::diag(&t), QMatrix::diag(&t_inv))
}

pub fn simultaneous_decompose(input: &QuintInput) -> Result<SimDecomposition> {
    // Revalidate in case the fields were edited after construction.
    let input = QuintInput::new(input.a.clone(), input.b.clone(), input.c.clone(), input.d.clone(), input.e.clone())?;
    let (m, n) = input.a.shape();
    let (p1, p2, q1, q2) = (input.b.cols(), input.c.cols(), input.d.rows(), input.e.rows());
    let mut w = Work::new(&input);

    // Compress [B C] by rows and [D; E] by columns.
    let bc = compress_rows(&input.b.hcat(&input.c)?);
    let r_bc = bc.rank;
    w.left(&bc.t, &bc.t_inv);
    let de = compress_cols(&input.d.vcat(&input.e)?);
    let r_de = de.rank;
    w.right(&de.t, &de.t_inv);
    expect_zero(&w.b.submatrix(r_bc, 0, m - r_bc, p1), "B below its row compression")?;
    expect_zero(&w.c.submatrix(r_bc, 0, m - r_bc, p2), "C below its row compression")?;
    expect_zero(&w.d.submatrix(0, r_de, q1, n - r_de), "D beside its column compression")?;
    expect_zero(&w.e.submatrix(0, r_de, q2, n - r_de), "E beside its column compression")?;

    // Reduce the corner of A outside both compressions.
    let corner = w.a.submatrix(r_bc, r_de, m - r_bc, n - r_de);
    let red = canonical_reduce(&corner);
    let m5 = red.rank;
    let (ib, id) = (QMatrix::identity(r_bc), QMatrix::identity(r_de));
    let (t, ti) = diag_pair(&[(&ib, &ib), (&red.p, &red.p_inv)]);
    w.left(&t, &ti);
    let (t, ti) = diag_pair(&[(&id, &id), (&red.q, &red.q_inv)]);
    w.right(&t, &ti);

    // Use I_m5 to clear its row and column.
    let rs = [r_bc, m5, m - r_bc - m5];
    let cs = [r_de, m5, n - r_de - m5];
    let a2 = block_at(&w.a, &rs, &cs, 0, 1);
    let (t, ti) = block_unipotent(&rs, &[(0, 1, a2.neg())]);
    w.left(&t, &ti);
    let a4 = block_at(&w.a, &rs, &cs, 1, 0);
    let (t, ti) = block_unipotent(&cs, &[(1, 0, a4.neg())]);
    w.right(&t, &ti);
    expect_zero(&block_at(&w.a, &rs, &cs, 0, 1), "A above I_m5")?;
    expect_zero(&block_at(&w.a, &rs, &cs, 1, 0), "A beside I_m5")?;

    // Reduce the two remaining off-corner blocks of A.
    let upper = block_at(&w.a, &rs, &cs, 0, 2);
    let lower = block_at(&w.a, &rs, &cs, 2, 0);
    let ru = canonical_reduce(&upper);
    let rl = canonical_reduce(&lower);
    let (m1, m6) = (ru.rank, rl.rank);
    let i5 = QMatrix::identity(m5);
    let (t, ti) = diag_pair(&[(&ru.p, &ru.p_inv), (&i5, &i5), (&rl.p, &rl.p_inv)]);
    w.left(&t, &ti);
    let (t, ti) = diag_pair(&[(&rl.q, &rl.q_inv), (&i5, &i5), (&ru.q, &ru.q_inv)]);
    w.right(&t, &ti);
    let m7 = m - r_bc - m5 - m6;
    let n7 = n - r_de - m5 - m1;
    let rows5 = [m1, r_bc - m1, m5, m6, m7];
    let cols5 = [m6, r_de - m6, m5, m1, n7];

    // Clear against I_m6 (rows) and I_m1 (columns).
    let f0 = block_at(&w.a, &rows5, &cols5, 0, 0);
    let f1 = block_at(&w.a, &rows5, &cols5, 1, 0);
    let (t, ti) = block_unipotent(&rows5, &[(0, 3, f0.neg()), (1, 3, f1.neg())]);
    w.left(&t, &ti);
    let g = block_at(&w.a, &rows5, &cols5, 0, 1);
    let (t, ti) = block_unipotent(&cols5, &[(3, 1, g.neg())]);
    w.right(&t, &ti);
    for (i, j, what) in [
        (0, 0, "A(1,1) after pivoting on I_m6"),
        (1, 0, "A(2,1) after pivoting on I_m6"),
        (0, 1, "A(1,2) after pivoting on I_m1"),
    ] {
        expect_zero(&block_at(&w.a, &rows5, &cols5, i, j), what)?;
    }

    // Paired reductions of the middle B/C rows and D/E columns.
    let pr = pair_canonicalize_rows(&w.b.submatrix(m1, 0, r_bc - m1, p1), &w.c.submatrix(m1, 0, r_bc - m1, p2))?;
    let (i1, i6, i7) = (QMatrix::identity(m1), QMatrix::identity(m6), QMatrix::identity(m7));
    let (t, ti) = diag_pair(&[(&i1, &i1), (&pr.p7, &pr.p7_inv), (&i5, &i5), (&i6, &i6), (&i7, &i7)]);
    w.left(&t, &ti);
    w.right_b(&pr.wb, &pr.wb_inv);
    w.right_c(&pr.wc, &pr.wc_inv);
    let pc = pair_canonicalize_cols(&w.d.submatrix(0, m6, q1, r_de - m6), &w.e.submatrix(0, m6, q2, r_de - m6))?;
    let in7 = QMatrix::identity(n7);
    let (t, ti) = diag_pair(&[(&i6, &i6), (&pc.q7, &pc.q7_inv), (&i5, &i5), (&i1, &i1), (&in7, &in7)]);
    w.right(&t, &ti);
    w.left_d(&pc.wd, &pc.wd_inv);
    w.left_e(&pc.we, &pc.we_inv);

    let dims = DimVector {
        m1,
        m2: pr.m2,
        m3: pr.m3,
        m4: pr.m4,
        m5,
        m6,
        m7,
        n2: pc.n2,
        n3: pc.n3,
        n4: pc.n4,
        n7,
        w_b1: p1 - pr.m2 - pr.m3,
        w_c1: p2 - pr.m3 - pr.m4,
        h_d1: q1 - pc.n2 - pc.n3,
        h_e1: q2 - pc.n3 - pc.n4,
    };
    let (ar, ac) = (dims.a_rows(), dims.a_cols());
    let (bc_, cc_, dr_, er_) = (dims.b_cols(), dims.c_cols(), dims.d_rows(), dims.e_rows());

    // Clear the m1 rows of B, C and the m6 columns of D, E against the
    // identities just created.
    let b1 = block_at(&w.b, &ar, &bc_, 0, 0);
    let b2 = block_at(&w.b, &ar, &bc_, 0, 1);
    let c3 = block_at(&w.c, &ar, &cc_, 0, 2);
    let (t, ti) = block_unipotent(&ar, &[(0, 1, b1.neg()), (0, 2, b2.neg()), (0, 3, c3.neg())]);
    w.left(&t, &ti);
    let d1 = block_at(&w.d, &dr_, &ac, 0, 0);
    let d2 = block_at(&w.d, &dr_, &ac, 1, 0);
    let e3 = block_at(&w.e, &er_, &ac, 2, 0);
    let (t, ti) = block_unipotent(&ac, &[(1, 0, d1.neg()), (2, 0, d2.neg()), (3, 0, e3.neg())]);
    w.right(&t, &ti);

    // Finally clear the first block column of A against I_m6 and the first
    // block row against I_m1.
    let col0: Vec<_> = (0..4).map(|i| (i, 5, block_at(&w.a, &ar, &ac, i, 0).neg())).collect();
    let (t, ti) = block_unipotent(&ar, &col0);
    w.left(&t, &ti);
    let row0: Vec<_> = (1..4).map(|j| (5, j, block_at(&w.a, &ar, &ac, 0, j).neg())).collect();
    let (t, ti) = block_unipotent(&ac, &row0);
    w.right(&t, &ti);

    let core = CoreBlocks::extract(&dims, &w.a, &w.b, &w.c, &w.d, &w.e)?;
    let decomposition = SimDecomposition {
        p: w.l.1,
        p_inv: w.l.0,
        q: w.r.1,
        q_inv: w.r.0,
        t1: w.tb.1,
        t1_inv: w.tb.0,
        t2: w.tc.1,
        t2_inv: w.tc.0,
        v1: w.vd.1,
        v1_inv: w.vd.0,
        v2: w.ve.1,
        v2_inv: w.ve.0,
        s_a: w.a,
        s_b: w.b,
        s_c: w.c,
        s_d: w.d,
        s_e: w.e,
        dims,
        core,
    };
    if let Some(msg) = template_failures(&decomposition).into_iter().next() {
        return Err(Error::internal(msg));
    }
    Ok(decomposition)
}

/// The rank-determined counts, evaluated directly on bordered matrices.
/// Signed so that a broken invariant shows up as a negative value instead of
/// a panic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDims {
    pub m156: i64,
    pub m2: i64,
    pub m3: i64,
    pub m4: i64,
    pub n2: i64,
    pub n3: i64,
    pub n4: i64,
}

impl RankDims {
    pub fn of(d: &DimVector) -> Self {
        let c = |v: usize| v as i64;
        RankDims { m156: c(d.m156()), m2: c(d.m2), m3: c(d.m3), m4: c(d.m4), n2: c(d.n2), n3: c(d.n3), n4: c(d.n4) }
    }
}

/// Ranks of the bordered matrices that recur throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BorderedRanks {
    /// `r[A B C]`
    pub abc: usize,
    /// `r[A; D; E]`
    pub ade: usize,
    /// `r[A B C; D 0 0; E 0 0]`
    pub big: usize,
    /// `r[A B; D 0; E 0]`
    pub ab_de: usize,
    /// `r[A C; D 0; E 0]`
    pub ac_de: usize,
    /// `r[A B C; D 0 0]`
    pub abc_d: usize,
    /// `r[A B C; E 0 0]`
    pub abc_e: usize,
    /// `r[A B; E 0]`
    pub ab_e: usize,
    /// `r[A C; D 0]`
    pub ac_d: usize,
}

impl BorderedRanks {
    pub fn of(q: &QuintInput) -> Result<Self> {
        let (a, b, c, d, e) = (&q.a, &q.b, &q.c, &q.d, &q.e);
        let r = |grid: &[Vec<Option<&QMatrix>>]| QMatrix::bordered(grid).map(|m| rank(&m));
        Ok(BorderedRanks {
            abc: r(&[vec![Some(a), Some(b), Some(c)]])?,
            ade: r(&[vec![Some(a)], vec![Some(d)], vec![Some(e)]])?,
            big: r(&[vec![Some(a), Some(b), Some(c)], vec![Some(d), None, None], vec![Some(e), None, None]])?,
            ab_de: r(&[vec![Some(a), Some(b)], vec![Some(d), None], vec![Some(e), None]])?,
            ac_de: r(&[vec![Some(a), Some(c)], vec![Some(d), None], vec![Some(e), None]])?,
            abc_d: r(&[vec![Some(a), Some(b), Some(c)], vec![Some(d), None, None]])?,
            abc_e: r(&[vec![Some(a), Some(b), Some(c)], vec![Some(e), None, None]])?,
            ab_e: r(&[vec![Some(a), Some(b)], vec![Some(e), None]])?,
            ac_d: r(&[vec![Some(a), Some(c)], vec![Some(d), None]])?,
        })
    }
}

pub fn dims_from_ranks(input: &QuintInput) -> Result<RankDims> {
    let r = BorderedRanks::of(input)?;
    let i = |v: usize| v as i64;
    Ok(RankDims {
        m156: i(r.abc) + i(r.ade) - i(r.big),
        m2: i(r.big) - i(r.ac_de),
        m3: i(r.ab_de) + i(r.ac_de) - i(r.big) - i(r.ade),
        m4: i(r.big) - i(r.ab_de),
        n2: i(r.big) - i(r.abc_e),
        n3: i(r.abc_d) + i(r.abc_e) - i(r.big) - i(r.abc),
        n4: i(r.big) - i(r.abc_d),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Zero,
    Identity,
    Free,
}

use Kind::{Free as F, Identity as I, Zero as O};

const A_TEMPLATE: [[Kind; 7]; 7] = [
    [O, O, O, O, O, I, O],
    [O, F, F, F, O, O, O],
    [O, F, F, F, O, O, O],
    [O, F, F, F, O, O, O],
    [O, O, O, O, I, O, O],
    [I, O, O, O, O, O, O],
    [O, O, O, O, O, O, O],
];

const B_TEMPLATE: [[Kind; 3]; 7] = [[O, O, F], [I, O, O], [O, I, O], [O, O, O], [O, O, O], [O, O, O], [O, O, O]];

const C_TEMPLATE: [[Kind; 3]; 7] = [[F, F, O], [O, O, O], [O, I, O], [O, O, I], [O, O, O], [O, O, O], [O, O, O]];

const D_TEMPLATE: [[Kind; 7]; 3] = [[O, I, O, O, O, O, O], [O, O, I, O, O, O, O], [F, O, O, O, O, O, O]];

const E_TEMPLATE: [[Kind; 7]; 3] = [[F, O, O, O, O, O, O], [F, O, I, O, O, O, O], [O, O, O, I, O, O, O]];

fn check_template<const R: usize, const C: usize>(
    name: &str,
    m: &QMatrix,
    spec: &BlockSpec,
    kinds: &[[Kind; C]; R],
) -> Option<String> {
    let blocks = match spec.split(m) {
        Ok(b) => b,
        Err(e) => return Some(format!("{name}: {e}")),
    };
    for (i, row) in kinds.iter().enumerate() {
        for (j, kind) in row.iter().enumerate() {
            let b = &blocks[i][j];
            let ok = match kind {
                Kind::Zero => b.is_zero(),
                Kind::Identity => b.rows() == b.cols() && b.is_identity(),
                Kind::Free => true,
            };
            if !ok {
                let want = if *kind == Kind::Zero { "zero" } else { "an identity" };
                return Some(format!("{name}: block ({},{}) should be {want}", i + 1, j + 1));
            }
        }
    }
    None
}

fn template_failures(d: &SimDecomposition) -> Vec<String> {
    let dims = &d.dims;
    [
        check_template("S_A", &d.s_a, &dims.a_spec(), &A_TEMPLATE),
        check_template("S_B", &d.s_b, &dims.b_spec(), &B_TEMPLATE),
        check_template("S_C", &d.s_c, &dims.c_spec(), &C_TEMPLATE),
        check_template("S_D", &d.s_d, &dims.d_spec(), &D_TEMPLATE),
        check_template("S_E", &d.s_e, &dims.e_spec(), &E_TEMPLATE),
    ]
    .into_iter()
    .flatten()
    .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn record(&mut self, name: impl Into<String>, outcome: std::result::Result<(), String>) {
        let (passed, detail) = match outcome {
            Ok(()) => (true, String::new()),
            Err(d) => (false, d),
        };
        self.checks.push(Check { name: name.into(), passed, detail });
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let status = if c.passed { "pass" } else { "FAIL" };
            write!(f, "{:width$}  {status}", c.name)?;
            if !c.detail.is_empty() {
                write!(f, "  ({})", c.detail)?;
            }
            writeln!(f)?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

fn reconstruct(factors: &[&QMatrix], target: &QMatrix) -> std::result::Result<(), String> {
    let got = QMatrix::chain(factors).map_err(|e| e.to_string())?;
    if &got == target {
        Ok(())
    } else if got.shape() != target.shape() {
        Err(format!("product is {:?}, expected {:?}", got.shape(), target.shape()))
    } else {
        Err("product differs from the input".into())
    }
}

fn inverse_pair(t: &QMatrix, t_inv: &QMatrix, n: usize) -> std::result::Result<(), String> {
    if t.shape() != (n, n) || t_inv.shape() != (n, n) {
        return Err(format!("dimension mismatch: expected {n}x{n}, got {:?} and {:?}", t.shape(), t_inv.shape()));
    }
    let lhs = t.matmul(t_inv).map_err(|e| e.to_string())?;
    let rhs = t_inv.matmul(t).map_err(|e| e.to_string())?;
    if lhs.is_identity() && rhs.is_identity() {
        Ok(())
    } else {
        Err("stored inverse does not invert".into())
    }
}

fn equal<T: PartialEq + fmt::Debug>(lhs: T, rhs: T) -> std::result::Result<(), String> {
    if lhs == rhs {
        Ok(())
    } else {
        Err(format!("{lhs:?} != {rhs:?}"))
    }
}

/// Checks reconstruction, block templates, the shared identities, stored
/// inverses, and the rank-determined counts. Never errors: every problem is
/// recorded as a failed check.
pub fn verify_decomposition(input: &QuintInput, d: &SimDecomposition) -> VerificationReport {
    let mut rep = VerificationReport::default();
    let (m, n) = input.a.shape();
    let (p1, q1) = input.x_shape();
    let (p2, q2) = input.y_shape();
    let dims = &d.dims;

    for (name, t, t_inv, size) in [
        ("inverse P", &d.p, &d.p_inv, m),
        ("inverse Q", &d.q, &d.q_inv, n),
        ("inverse T1", &d.t1, &d.t1_inv, p1),
        ("inverse T2", &d.t2, &d.t2_inv, p2),
        ("inverse V1", &d.v1, &d.v1_inv, q1),
        ("inverse V2", &d.v2, &d.v2_inv, q2),
    ] {
        rep.record(name, inverse_pair(t, t_inv, size));
    }

    rep.record("reconstruct A", reconstruct(&[&d.p, &d.s_a, &d.q], &input.a));
    rep.record("reconstruct B", reconstruct(&[&d.p, &d.s_b, &d.t1], &input.b));
    rep.record("reconstruct C", reconstruct(&[&d.p, &d.s_c, &d.t2], &input.c));
    rep.record("reconstruct D", reconstruct(&[&d.v1, &d.s_d, &d.q], &input.d));
    rep.record("reconstruct E", reconstruct(&[&d.v2, &d.s_e, &d.q], &input.e));

    let sizes = [
        ("m", dims.a_rows().iter().sum::<usize>(), m),
        ("n", dims.a_cols().iter().sum::<usize>(), n),
        ("p1", dims.b_cols().iter().sum::<usize>(), p1),
        ("p2", dims.c_cols().iter().sum::<usize>(), p2),
        ("q1", dims.d_rows().iter().sum::<usize>(), q1),
        ("q2", dims.e_rows().iter().sum::<usize>(), q2),
    ];
    rep.record(
        "block sizes",
        sizes
            .iter()
            .find(|(_, got, want)| got != want)
            .map_or(Ok(()), |(what, got, want)| Err(format!("blocks cover {got} of {what} = {want}"))),
    );

    for (name, outcome) in [
        ("template S_A", check_template("S_A", &d.s_a, &dims.a_spec(), &A_TEMPLATE)),
        ("template S_B", check_template("S_B", &d.s_b, &dims.b_spec(), &B_TEMPLATE)),
        ("template S_C", check_template("S_C", &d.s_c, &dims.c_spec(), &C_TEMPLATE)),
        ("template S_D", check_template("S_D", &d.s_d, &dims.d_spec(), &D_TEMPLATE)),
        ("template S_E", check_template("S_E", &d.s_e, &dims.e_spec(), &E_TEMPLATE)),
    ] {
        rep.record(name, outcome.map_or(Ok(()), Err));
    }

    // The shared identities must sit on the same block row (B/C) and the
    // same block column (D/E).
    let coupling = |x: Result<QMatrix>, y: Result<QMatrix>, k: usize| -> std::result::Result<(), String> {
        let (x, y) = (x.map_err(|e| e.to_string())?, y.map_err(|e| e.to_string())?);
        if x.shape() == (k, k) && y.shape() == (k, k) && x.is_identity() && y.is_identity() {
            Ok(())
        } else {
            Err("the two copies do not coincide".into())
        }
    };
    rep.record(
        "shared I_m3",
        coupling(dims.b_spec().extract(&d.s_b, 2, 1), dims.c_spec().extract(&d.s_c, 2, 1), dims.m3),
    );
    rep.record(
        "shared I_n3",
        coupling(dims.d_spec().extract(&d.s_d, 1, 2), dims.e_spec().extract(&d.s_e, 1, 2), dims.n3),
    );

    let core_ok = CoreBlocks::extract(dims, &d.s_a, &d.s_b, &d.s_c, &d.s_d, &d.s_e)
        .map_err(|e| e.to_string())
        .and_then(|c| if c == d.core { Ok(()) } else { Err("stored core differs from the factors".into()) });
    rep.record("core blocks", core_ok);

    match dims_from_ranks(input) {
        Ok(formula) => rep.record("rank-determined counts", equal(formula, RankDims::of(dims))),
        Err(e) => rep.record("rank-determined counts", Err(e.to_string())),
    }

    match (BorderedRanks::of(input), &d.core.a[2], &d.core.a[6]) {
        (Ok(r), a3, a7) => {
            let lhs = dims.m1 + dims.m2 + dims.m3 + dims.m5 + dims.m6 + dims.n3 + dims.n4 + rank(a7);
            rep.record("r[A B; E 0] from blocks", equal(r.ab_e, lhs));
            let lhs = dims.m1 + dims.m3 + dims.m4 + dims.m5 + dims.m6 + dims.n2 + dims.n3 + rank(a3);
            rep.record("r[A C; D 0] from blocks", equal(r.ac_d, lhs));
        }
        (Err(e), ..) => rep.record("bordered ranks", Err(e.to_string())),
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{arb_low_rank, arb_qmatrix};
    use proptest::prelude::*;

    fn m(rows: &[&[&str]]) -> QMatrix {
        QMatrix::parse_rows(rows).unwrap()
    }

    fn one_by_one(a: &str, b: &str, c: &str, d: &str, e: &str) -> QuintInput {
        QuintInput::new(m(&[&[a]]), m(&[&[b]]), m(&[&[c]]), m(&[&[d]]), m(&[&[e]])).unwrap()
    }

    #[test]
    fn rejects_nonconforming_input() {
        let r = QuintInput::new(
            QMatrix::zeros(2, 2),
            QMatrix::zeros(1, 1),
            QMatrix::zeros(2, 1),
            QMatrix::zeros(1, 2),
            QMatrix::zeros(1, 2),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn pair_rows_examples() {
        let r = pair_canonicalize_rows(&m(&[&["1"]]), &m(&[&["0"]])).unwrap();
        assert_eq!((r.m2, r.m3, r.m4), (1, 0, 0));
        let r = pair_canonicalize_rows(&m(&[&["1"]]), &m(&[&["1"]])).unwrap();
        assert_eq!((r.m2, r.m3, r.m4), (0, 1, 0));
        let r = pair_canonicalize_rows(&m(&[&["1"], &["0"]]), &m(&[&["0"], &["1"]])).unwrap();
        assert_eq!((r.m2, r.m3, r.m4), (1, 0, 1));
        let bad = pair_canonicalize_rows(&m(&[&["1"], &["i"]]), &m(&[&["0"], &["0"]]));
        assert!(matches!(bad, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn pair_cols_examples() {
        let r = pair_canonicalize_cols(&m(&[&["1"]]), &m(&[&["0"]])).unwrap();
        assert_eq!((r.n2, r.n3, r.n4), (1, 0, 0));
        let r = pair_canonicalize_cols(&m(&[&["1"]]), &m(&[&["1"]])).unwrap();
        assert_eq!((r.n2, r.n3, r.n4), (0, 1, 0));
        let r = pair_canonicalize_cols(&m(&[&["1", "0"]]), &m(&[&["0", "1"]])).unwrap();
        assert_eq!((r.n2, r.n3, r.n4), (1, 0, 1));
    }

    #[test]
    fn zero_input_has_zero_counts() {
        let q = QuintInput::new(
            QMatrix::zeros(2, 3),
            QMatrix::zeros(2, 1),
            QMatrix::zeros(2, 2),
            QMatrix::zeros(2, 3),
            QMatrix::zeros(1, 3),
        )
        .unwrap();
        let d = simultaneous_decompose(&q).unwrap();
        assert_eq!(d.dims.m156() + d.dims.m2 + d.dims.m3 + d.dims.m4, 0);
        assert_eq!(d.dims.n2 + d.dims.n3 + d.dims.n4, 0);
        assert!(d.s_a.is_zero());
        assert!(d.p.is_identity() && d.q.is_identity());
        let r = dims_from_ranks(&q).unwrap();
        assert_eq!(r, RankDims { m156: 0, m2: 0, m3: 0, m4: 0, n2: 0, n3: 0, n4: 0 });
        assert!(verify_decomposition(&q, &d).passed());
    }

    #[test]
    fn b_and_d_only_instance() {
        let q = one_by_one("1", "1", "0", "1", "0");
        let r = dims_from_ranks(&q).unwrap();
        assert_eq!(r, RankDims { m156: 0, m2: 1, m3: 0, m4: 0, n2: 1, n3: 0, n4: 0 });
        let d = simultaneous_decompose(&q).unwrap();
        assert_eq!((d.dims.m2, d.dims.n2), (1, 1));
        assert_eq!(d.dims.m156() + d.dims.m3 + d.dims.m4 + d.dims.n3 + d.dims.n4, 0);
        assert_eq!(d.core.a[0].shape(), (1, 1));
        assert!(verify_decomposition(&q, &d).passed());
    }

    #[test]
    fn all_ones_instance() {
        let q = one_by_one("1", "1", "1", "1", "1");
        let r = dims_from_ranks(&q).unwrap();
        assert_eq!(r, RankDims { m156: 0, m2: 0, m3: 1, m4: 0, n2: 0, n3: 1, n4: 0 });
        let d = simultaneous_decompose(&q).unwrap();
        assert_eq!((d.dims.m3, d.dims.n3), (1, 1));
        assert!(verify_decomposition(&q, &d).passed());
    }

    #[test]
    fn tampering_is_reported() {
        let q = QuintInput::new(
            m(&[&["1", "i"], &["j", "0"]]),
            m(&[&["1"], &["k"]]),
            m(&[&["0"], &["1"]]),
            m(&[&["1", "1"]]),
            m(&[&["i", "0"]]),
        )
        .unwrap();
        let d = simultaneous_decompose(&q).unwrap();
        assert!(verify_decomposition(&q, &d).passed(), "{}", verify_decomposition(&q, &d));

        let mut bad = d.clone();
        bad.s_a[(0, 0)] = &bad.s_a[(0, 0)] + &crate::scalar::Quaternion::one();
        let rep = verify_decomposition(&q, &bad);
        assert!(!rep.passed());
        assert!(rep.failures().any(|c| c.name == "reconstruct A"));

        let mut bad = d.clone();
        bad.q = QMatrix::identity(3);
        let rep = verify_decomposition(&q, &bad);
        assert!(rep.failures().any(|c| c.name == "inverse Q" && c.detail.contains("dimension mismatch")));
        assert!(!rep.passed());
    }

    fn arb_quint(max: usize) -> impl Strategy<Value = QuintInput> {
        (0..=max, 0..=max, 0..=max, 0..=max, 0..=max, 0..=max)
            .prop_flat_map(|(m, n, p1, p2, q1, q2)| {
                (
                    prop_oneof![arb_qmatrix(m, n), arb_low_rank(m, n, 1)],
                    prop_oneof![arb_qmatrix(m, p1), arb_low_rank(m, p1, 1)],
                    prop_oneof![arb_qmatrix(m, p2), arb_low_rank(m, p2, 1)],
                    prop_oneof![arb_qmatrix(q1, n), arb_low_rank(q1, n, 1)],
                    prop_oneof![arb_qmatrix(q2, n), arb_low_rank(q2, n, 1)],
                )
            })
            .prop_map(|(a, b, c, d, e)| QuintInput::new(a, b, c, d, e).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn decomposition_verifies(q in arb_quint(3)) {
            let d = simultaneous_decompose(&q).unwrap();
            let rep = verify_decomposition(&q, &d);
            prop_assert!(rep.passed(), "{}", rep);
        }

        #[test]
        fn pair_rows_template(b in arb_qmatrix(3, 2), c in arb_qmatrix(3, 2)) {
            let stacked = b.hcat(&c).unwrap();
            prop_assume!(rank(&stacked) == 3);
            let r = pair_canonicalize_rows(&b, &c).unwrap();
            prop_assert_eq!(r.m2 + r.m3, rank(&b));
            prop_assert_eq!(r.m3 + r.m4, rank(&c));
            prop_assert!(r.p7.matmul(&r.p7_inv).unwrap().is_identity());
            prop_assert!(r.wb.matmul(&r.wb_inv).unwrap().is_identity());
            prop_assert!(r.wc.matmul(&r.wc_inv).unwrap().is_identity());
        }
    }
}
