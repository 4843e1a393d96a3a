//! Solvability, general solution and minimal-rank solutions of
//! `B·X·D + C·Y·E = A`.
//!
//! Consistency is decided by four rank equalities alone. The decomposition
//! is only computed when a solution is requested; under consistency the
//! blocks `m1`, `m5`, `m6`, `A3`, `A7` all vanish, and the solutions are
//! parametrized in decomposition coordinates by
//!
//! ```text
//!      [ A1 A2 X3 ]        [ Y1 Y2      Y3 ]
//! X̂ =  [ A4 X5 X6 ]   Ŷ =  [ Y4 A5 − X5 A6 ]
//!      [ X7 X8 X9 ]        [ Y7 A8      A9 ]
//! ```
//!
//! with `X = T1⁻¹·X̂·V1⁻¹` and `Y = T2⁻¹·Ŷ·V2⁻¹`.

use std::fmt;

use serde::Serialize;

use crate::elimination::rank;
use crate::error::{Error, Result};
use crate::extremal::min_completion_single_block;
use crate::gen::Generator;
use crate::matrix::QMatrix;
use crate::simdecomp::{simultaneous_decompose, QuintInput, SimDecomposition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equality {
    pub name: &'static str,
    pub lhs: usize,
    pub rhs: usize,
}

impl Equality {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub equalities: Vec<Equality>,
}

impl ConsistencyReport {
    pub fn consistent(&self) -> bool {
        self.equalities.iter().all(Equality::holds)
    }

    pub fn first_failure(&self) -> Option<&Equality> {
        self.equalities.iter().find(|e| !e.holds())
    }

    fn require(&self) -> Result<()> {
        match self.first_failure() {
            None => Ok(()),
            Some(e) => Err(Error::Inconsistent { equality: e.name.into(), lhs: e.lhs, rhs: e.rhs }),
        }
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.equalities {
            let mark = if e.holds() { "holds" } else { "FAILS" };
            writeln!(f, "{:28} {} vs {}  {mark}", e.name, e.lhs, e.rhs)?;
        }
        write!(f, "consistent: {}", self.consistent())
    }
}

fn r(grid: &[Vec<Option<&QMatrix>>]) -> Result<usize> {
    Ok(rank(&QMatrix::bordered(grid)?))
}

pub fn is_consistent(q: &QuintInput) -> Result<ConsistencyReport> {
    let q = QuintInput::new(q.a.clone(), q.b.clone(), q.c.clone(), q.d.clone(), q.e.clone())?;
    let (a, b, c, d, e) = (Some(&q.a), Some(&q.b), Some(&q.c), Some(&q.d), Some(&q.e));
    let eq = |name, lhs, rhs| Equality { name, lhs, rhs };
    Ok(ConsistencyReport {
        equalities: vec![
            eq("r[A C B] = r[C B]", r(&[vec![a, c, b]])?, r(&[vec![c, b]])?),
            eq("r[A; D; E] = r[D; E]", r(&[vec![a], vec![d], vec![e]])?, r(&[vec![d], vec![e]])?),
            eq("r[A B; E 0] = r[0 B; E 0]", r(&[vec![a, b], vec![e, None]])?, r(&[vec![None, b], vec![e, None]])?),
            eq("r[A C; D 0] = r[0 C; D 0]", r(&[vec![a, c], vec![d, None]])?, r(&[vec![None, c], vec![d, None]])?),
        ],
    })
}

/// Values of the free blocks of a general-solution member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeBlocks {
    pub x3: QMatrix,
    pub x5: QMatrix,
    pub x6: QMatrix,
    pub x7: QMatrix,
    pub x8: QMatrix,
    pub x9: QMatrix,
    pub y1: QMatrix,
    pub y2: QMatrix,
    pub y3: QMatrix,
    pub y4: QMatrix,
    pub y7: QMatrix,
}

#[derive(Clone, Debug)]
pub struct GeneralSolution {
    pub decomposition: SimDecomposition,
}

impl GeneralSolution {
    fn fill(&self, mut f: impl FnMut(usize, usize) -> QMatrix) -> FreeBlocks {
        let d = &self.decomposition.dims;
        FreeBlocks {
            x3: f(d.m2, d.h_d1),
            x5: f(d.m3, d.n3),
            x6: f(d.m3, d.h_d1),
            x7: f(d.w_b1, d.n2),
            x8: f(d.w_b1, d.n3),
            x9: f(d.w_b1, d.h_d1),
            y1: f(d.w_c1, d.h_e1),
            y2: f(d.w_c1, d.n3),
            y3: f(d.w_c1, d.n4),
            y4: f(d.m3, d.h_e1),
            y7: f(d.m4, d.h_e1),
        }
    }

    pub fn zero_blocks(&self) -> FreeBlocks {
        self.fill(QMatrix::zeros)
    }

    pub fn random_blocks(&self, g: &mut Generator) -> FreeBlocks {
        self.fill(|r, c| g.mixed(r, c))
    }

    /// The member `(X, Y)` for the given free blocks.
    pub fn member(&self, f: &FreeBlocks) -> Result<(QMatrix, QMatrix)> {
        let dec = &self.decomposition;
        let a = &dec.core.a;
        let x_hat = dec.dims.x_hat_spec().assemble(&[
            vec![a[0].clone(), a[1].clone(), f.x3.clone()],
            vec![a[3].clone(), f.x5.clone(), f.x6.clone()],
            vec![f.x7.clone(), f.x8.clone(), f.x9.clone()],
        ])?;
        let y_hat = dec.dims.y_hat_spec().assemble(&[
            vec![f.y1.clone(), f.y2.clone(), f.y3.clone()],
            vec![f.y4.clone(), a[4].sub(&f.x5)?, a[5].clone()],
            vec![f.y7.clone(), a[7].clone(), a[8].clone()],
        ])?;
        dec.unhat(&x_hat, &y_hat)
    }

    pub fn particular(&self) -> Result<(QMatrix, QMatrix)> {
        self.member(&self.zero_blocks())
    }

    pub fn random_member(&self, g: &mut Generator) -> Result<(QMatrix, QMatrix)> {
        self.member(&self.random_blocks(g))
    }
}

pub fn general_solution(q: &QuintInput) -> Result<GeneralSolution> {
    is_consistent(q)?.require()?;
    let decomposition = simultaneous_decompose(q)?;
    let d = &decomposition.dims;
    let core = &decomposition.core;
    if d.m156() != 0 || !core.a[2].is_zero() || !core.a[6].is_zero() || !core.b1.is_zero() || !core.d1.is_zero() {
        return Err(Error::internal("consistent equation but the decomposition kept blocks that must vanish"));
    }
    let sol = GeneralSolution { decomposition };
    let (x, y) = sol.particular()?;
    if !q.residual(&x, &y)?.is_zero() {
        return Err(Error::internal("particular solution does not satisfy the equation"));
    }
    Ok(sol)
}

/// Least possible `rank X` and `rank Y` over all solutions.
pub fn min_rank_solution_values(q: &QuintInput) -> Result<(usize, usize)> {
    is_consistent(q)?.require()?;
    let (a, b, c, d, e) = (Some(&q.a), Some(&q.b), Some(&q.c), Some(&q.d), Some(&q.e));
    let x = r(&[vec![a, c]])? + r(&[vec![a], vec![e]])? - r(&[vec![a, c], vec![e, None]])?;
    let y = r(&[vec![a, b]])? + r(&[vec![a], vec![d]])? - r(&[vec![a, b], vec![d, None]])?;
    Ok((x, y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    X,
    Y,
}

/// A solution whose `X` (or `Y`) has the least possible rank.
pub fn min_rank_solution_witness(q: &QuintInput, which: Which) -> Result<(QMatrix, QMatrix)> {
    let (min_x, min_y) = min_rank_solution_values(q)?;
    let sol = general_solution(q)?;
    let a = &sol.decomposition.core.a;
    let mut blocks = sol.zero_blocks();
    match which {
        // rank X = rank [A1 A2; A4 X5] once X3, X6, X7, X8, X9 vanish.
        Which::X => blocks.x5 = min_completion_single_block(&a[0], &a[1], &a[3])?.0,
        // rank Y = rank [A5 − X5, A6; A8, A9] once Y1 … Y4, Y7 vanish.
        Which::Y => {
            let y5 = min_completion_single_block(&a[8], &a[7], &a[5])?.0;
            blocks.x5 = a[4].sub(&y5)?;
        }
    }
    let (x, y) = sol.member(&blocks)?;
    if !q.residual(&x, &y)?.is_zero() {
        return Err(Error::internal("minimal-rank witness does not satisfy the equation"));
    }
    let (target, got, label) = match which {
        Which::X => (min_x, rank(&x), "rank X"),
        Which::Y => (min_y, rank(&y), "rank Y"),
    };
    if target != got {
        return Err(Error::WitnessMissed {
            expression: label.into(),
            bound: "min".into(),
            formula: target,
            attained: got,
        });
    }
    Ok((x, y))
}
