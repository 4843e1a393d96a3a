//! Seeded randomized checks of every module against the oracle and the
//! closed-form rank formulas.
//!
//! Each case draws from its own generator stream, derived from the master
//! seed, the suite name and the case index, so results are identical
//! whether cases run serially or in parallel.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::elimination::rank;
use crate::extremal::{
    extremal_ranks_f1, extremal_ranks_f2, extremal_ranks_f3, extremal_ranks_p, extremal_ranks_p_contained,
    ExtremalReport, F2Input, F3Input,
};
use crate::gen::Generator;
use crate::matrix::QMatrix;
use crate::oracle::{oracle_rank, oracle_solvable};
use crate::simdecomp::{dims_from_ranks, simultaneous_decompose, verify_decomposition, QuintInput};
use crate::solver::{general_solution, is_consistent, min_rank_solution_values, min_rank_solution_witness, Which};

/// Random `(X, Y)` samples per extremal-rank case.
pub const EXTREMAL_SAMPLES: usize = 50;
/// Random general-solution members substituted per solvable case.
pub const MEMBER_SAMPLES: usize = 10;
/// Random solutions whose ranks are compared with the minimum per case.
pub const MIN_RANK_SAMPLES: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Suite {
    Decomposition,
    RankOracle,
    ExtremalP,
    F1F2Coherence,
    ContainedCoherence,
    F3,
    Solvability,
    MinRank,
    MicroInstances,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Decomposition,
        Suite::RankOracle,
        Suite::ExtremalP,
        Suite::F1F2Coherence,
        Suite::ContainedCoherence,
        Suite::F3,
        Suite::Solvability,
        Suite::MinRank,
        Suite::MicroInstances,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Decomposition => "decomposition",
            Suite::RankOracle => "rank-oracle",
            Suite::ExtremalP => "extremal-p",
            Suite::F1F2Coherence => "f1-f2-coherence",
            Suite::ContainedCoherence => "contained-coherence",
            Suite::F3 => "f3",
            Suite::Solvability => "solvability",
            Suite::MinRank => "min-rank",
            Suite::MicroInstances => "micro-instances",
        }
    }

    fn case(self, g: &mut Generator, max_dim: usize) -> Result<(), String> {
        match self {
            Suite::Decomposition => decomposition_case(g, max_dim),
            Suite::RankOracle => rank_case(g, max_dim),
            Suite::ExtremalP => extremal_p_case(g, max_dim),
            Suite::F1F2Coherence => f1_f2_case(g, max_dim),
            Suite::ContainedCoherence => contained_case(g, max_dim),
            Suite::F3 => f3_case(g, max_dim),
            Suite::Solvability => solvability_case(g, max_dim),
            Suite::MinRank => min_rank_case(g, max_dim),
            Suite::MicroInstances => micro_instances(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub name: &'static str,
    pub cases: usize,
    /// `(case index, message)` for every failing case.
    pub failures: Vec<(usize, String)>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = self.cases - self.failures.len();
        let status = if self.passed() { "pass" } else { "FAIL" };
        write!(f, "{:20} {ok:>4}/{:<4} {status}", self.name, self.cases)?;
        for (i, msg) in self.failures.iter().take(5) {
            write!(f, "\n    case {i}: {msg}")?;
        }
        Ok(())
    }
}

/// Runs `cases` cases of one suite. The micro-instance suite is a fixed
/// list and ignores `cases` and `max_dim`.
pub fn run_suite(suite: Suite, cases: usize, max_dim: usize, seed: u64) -> SuiteResult {
    let cases = if suite == Suite::MicroInstances { 1 } else { cases };
    let failures = (0..cases)
        .into_par_iter()
        .filter_map(|i| {
            let mut g = Generator::for_case(seed, suite.name(), i as u64);
            suite.case(&mut g, max_dim).err().map(|msg| (i, msg))
        })
        .collect();
    SuiteResult { suite, name: suite.name(), cases, failures }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub seed: u64,
    pub max_dim: usize,
    pub suites: Vec<SuiteResult>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteResult::passed)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}  max-dim {}", self.seed, self.max_dim)?;
        for s in &self.suites {
            writeln!(f, "{s}")?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

pub fn run_all(cases: usize, max_dim: usize, seed: u64) -> Summary {
    let suites = Suite::ALL.iter().map(|&s| run_suite(s, cases, max_dim, seed)).collect();
    Summary { seed, max_dim, suites }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: fmt::Display>(e: E) -> String {
    e.to_string()
}

fn decomposition_case(g: &mut Generator, max_dim: usize) -> Result<(), String> {
    let q = g.quint(max_dim);
    let d = simultaneous_decompose(&q).map_err(err)?;
    let rep = verify_decomposition(&q, &d);
    if !rep.passed() {
        let names: Vec<_> = rep.failures().map(|c| format!("{} ({})", c.name, c.detail)).collect();
        return Err(names.join("; "));
    }
    // The rank-determined counts do not change under equivalence.
    let (m, n) = q.a.shape();
    let (u, _) = g.nonsingular(m);
    let (w, _) = g.nonsingular(n);
    let r: Vec<QMatrix> =
        [q.b.cols(), q.c.cols(), q.d.rows(), q.e.rows()].iter().map(|&k| g.nonsingular(k).0).collect();
    let moved = q.transformed(&u, &w, [&r[0], &r[1], &r[2], &r[3]]).map_err(err)?;
    let (before, after) = (dims_from_ranks(&q).map_err(err)?, dims_from_ranks(&moved).map_err(err)?);
    check(before == after, || format!("counts changed under equivalence: {before:?} vs {after:?}"))
}

fn rank_case(g: &mut Generator, max_dim: usize) -> Result<(), String> {
    let (rows, cols) = (g.dim(max_dim), g.dim(max_dim));
    let a = g.mixed(rows, cols);
    let ours = rank(&a);
    let theirs = oracle_rank(&a).map_err(err)?;
    check(ours == theirs, || format!("elimination rank {ours}, oracle rank {theirs}"))
}

fn sandwich(label: &str, rep: &ExtremalReport, r: usize) -> Result<(), String> {
    check(rep.min_rank <= r && r <= rep.max_rank, || {
        format!("{label}: sampled rank {r} outside [{}, {}]", rep.min_rank, rep.max_rank)
    })
}

fn p_attains(q: &QuintInput, rep: &ExtremalReport) -> Result<(), String> {
    let hi = rank(&q.p_value(&rep.max_witness[0], &rep.max_witness[1]).map_err(err)?);
    let lo = rank(&q.p_value(&rep.min_witness[0], &rep.min_witness[1]).map_err(err)?);
    check(hi == rep.max_rank && lo == rep.min_rank, || {
        format!("witness ranks ({lo}, {hi}) vs formulas ({}, {})", rep.min_rank, rep.max_rank)
    })
}

fn extremal_p_case(g: &mut Generator, max_dim: usize) -> Result<(), String> {
    let q = g.quint(max_dim);
    let rep = extremal_ranks_p(&q).map_err(err)?;
    p_attains(&q, &rep)?;
    for _ in 0..EXTREMAL_SAMPLES {
        let (x, y) = g.unknowns(&q);
        sandwich("p", &rep, rank(&q.p_value(&x, &y).map_err(err)?))?;
    }
    Ok(())
}

fn f1_f2_case(g: &mut Generator, max_dim: usize) -> Result<(), String> {
    let (m, n) = (g.dim(max_dim), g.dim(max_dim));
    let (k, l) = (g.dim(max_dim), g.dim(max_dim));
    let (a, b, c) = (g.mixed(m, n), g.mixed(m, k), g.mixed(l, n));
    let (k3, l3, k4, l4) = (g.dim(max_dim), g.dim(max_dim), g.dim(max_dim), g.dim(max_dim));
    let f2 = F2Input::new(
        a.clone(),
        b.clone(),
        c.clone(),
        QMatrix::zeros(m, k3),
        QMatrix::zeros(l3, n),
        QMatrix::zeros(m, k4),
        QMatrix::zeros(l4, n),
    )
    .map_err(err)?;
    let r1 = extremal_ranks_f1(&a, &b, &c).map_err(err)?;
    let r2 = extremal_ranks_f2(&f2).map_err(err)?;
    check((r1.max_rank, r1.min_rank) == (r2.max_rank, r2.min_rank), || {
        format!("f1 gives ({}, {}), f2 gives ({}, {})", r1.min_rank, r1.max_rank, r2.min_rank, r2.max_rank)
    })?;
    // A full f2 instance on the same draw.
    let f2 = F2Input::new(a, b, c, g.mixed(m, k3), g.mixed(l3, n), g.mixed(m, k4), g.mixed(l4, n)).map_err(err)?;
    let rep = extremal_ranks_f2(&f2).map_err(err)?;
    let shapes = [(k, n), (m, l), (k3, l3), (k4, l4)];
    for _ in 0..10 {
        let x: Vec<QMatrix> = shapes.iter().map(|&(r, c)| g.mixed(r, c)).collect();
        sandwich("f2", &rep, rank(&f2.value(&x).map_err(err)?))?;
    }
    Ok(())
}

fn contained_case(g: &mut Generator, max_dim: usize) -> Result<(), String> {
    let q = g.contained_quint(max_dim);
    let general = extremal_ranks_p(&q).map_err(err)?;
    let contained = extremal_ranks_p_contained(&q).map_err(err)?;
    check((general.max_rank, general.min_rank) == (contained.max_rank, contained.min_rank), || {
        format!(
            "general ({}, {}) vs contained ({}, {})",
            general.min_rank, general.max_rank, contained.min_rank, contained.max_rank
        )
    })?;
    p_attains(&q, &contained)
}

/// An f3 instance satisfying its range preconditions: `Bi = B2·Ki` and
/// `Cj = Lj·C1`.
pub fn f3_instance(g: &mut Generator, max_dim: usize) -> F3Input {
    let (m, n) = (g.dim(max_dim), g.dim(max_dim));
    let (k2, l1) = (g.dim(max_dim), g.dim(max_dim));
    let b2 = g.mixed(m, k2);
    let c1 = g.mixed(l1, n);
    let mut b: Vec<QMatrix> = Vec::with_capacity(4);
    let mut c: Vec<QMatrix> = Vec::with_capacity(4);
    for i in 0..4 {
        b.push(if i == 1 {
            b2.clone()
        } else {
            let k = g.dim(max_dim);
            b2.matmul(&g.mixed(k2, k)).expect("inner sizes agree")
        });
        c.push(if i == 0 {
            c1.clone()
        } else {
            let l = g.dim(max_dim);
            g.mixed(l, l1).matmul(&c1).expect("inner sizes agree")
        });
    }
    let a = g.mixed(m, n);
    F3Input::new(a, b.try_into().expect("four"), c.try_into().expect("four")).expect("shapes conform")
}

fn f3_case(g: &mut Generator, max_dim: usize) -> Result<(), String> {
    let f = f3_instance(g, max_dim);
    let rep = extremal_ranks_f3(&f).map_err(err)?;
    let hi = rank(&f.value(&rep.max_witness).map_err(err)?);
    let lo = rank(&f.value(&rep.min_witness).map_err(err)?);
    check(hi == rep.max_rank && lo == rep.min_rank, || {
        format!("witness ranks ({lo}, {hi}) vs formulas ({}, {})", rep.min_rank, rep.max_rank)
    })?;
    for _ in 0..20 {
        let x: Vec<QMatrix> = (0..4).map(|i| g.mixed(f.b[i].cols(), f.c[i].rows())).collect();
        sandwich("f3", &rep, rank(&f.value(&x).map_err(err)?))?;
    }
    Ok(())
}

fn solvability_case(g: &mut Generator, max_dim: usize) -> Result<(), String> {
    // Roughly half the instances are planted solvable ones.
    let q = if g.coin(0.5) { g.planted_solvable(max_dim) } else { g.quint(max_dim) };
    solvability_check(g, &q)
}

/// Compares the rank test with the oracle and, when solvable, substitutes
/// random general-solution members.
pub fn solvability_check(g: &mut Generator, q: &QuintInput) -> Result<(), String> {
    let ours = is_consistent(q).map_err(err)?.consistent();
    let theirs = oracle_solvable(q);
    check(ours == theirs, || format!("rank test says {ours}, oracle says {theirs}"))?;
    if ours {
        let sol = general_solution(q).map_err(err)?;
        for _ in 0..MEMBER_SAMPLES {
            let (x, y) = sol.random_member(g).map_err(err)?;
            check(q.residual(&x, &y).map_err(err)?.is_zero(), || "member fails substitution".into())?;
        }
    }
    Ok(())
}

fn min_rank_case(g: &mut Generator, max_dim: usize) -> Result<(), String> {
    let q = g.planted_solvable(max_dim);
    min_rank_check(g, &q)
}

pub fn min_rank_check(g: &mut Generator, q: &QuintInput) -> Result<(), String> {
    let (mx, my) = min_rank_solution_values(q).map_err(err)?;
    let (x, _) = min_rank_solution_witness(q, Which::X).map_err(err)?;
    let (_, y) = min_rank_solution_witness(q, Which::Y).map_err(err)?;
    check(rank(&x) == mx && rank(&y) == my, || {
        format!("witness ranks ({}, {}) vs minima ({mx}, {my})", rank(&x), rank(&y))
    })?;
    let sol = general_solution(q).map_err(err)?;
    for _ in 0..MIN_RANK_SAMPLES {
        let (x, y) = sol.random_member(g).map_err(err)?;
        check(rank(&x) >= mx && rank(&y) >= my, || {
            format!("sampled solution ranks ({}, {}) undercut ({mx}, {my})", rank(&x), rank(&y))
        })?;
    }
    Ok(())
}

fn one(lit: &str) -> QMatrix {
    QMatrix::parse_rows(&[&[lit]]).expect("valid literal")
}

fn micro(a: &str, b: &str, c: &str, d: &str, e: &str) -> QuintInput {
    QuintInput::new(one(a), one(b), one(c), one(d), one(e)).expect("1x1 shapes conform")
}

/// The three hand-checked 1×1 instances.
pub fn micro_instances() -> Result<(), String> {
    // i·X·j = k is solved by X = 1.
    let q = micro("k", "i", "0", "j", "0");
    check(is_consistent(&q).map_err(err)?.consistent(), || "i/j/k instance reported inconsistent".into())?;
    let (x, y) = general_solution(&q).map_err(err)?.particular().map_err(err)?;
    check(x == one("1") && q.residual(&x, &y).map_err(err)?.is_zero(), || format!("i/j/k gave X = {x}"))?;

    // All ones: p ranges over ranks 0 and 1.
    let q = micro("1", "1", "1", "1", "1");
    let rep = extremal_ranks_p(&q).map_err(err)?;
    check((rep.min_rank, rep.max_rank) == (0, 1), || format!("all-ones p ranks ({}, {})", rep.min_rank, rep.max_rank))?;

    // C = E = 0 pins X = 1.
    let q = micro("1", "1", "0", "1", "0");
    let (mx, my) = min_rank_solution_values(&q).map_err(err)?;
    check((mx, my) == (1, 0), || format!("C = E = 0 minima ({mx}, {my})"))?;
    let (x, _) = min_rank_solution_witness(&q, Which::X).map_err(err)?;
    check(x == one("1"), || format!("C = E = 0 witness X = {x}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let a = run_all(4, 3, 9);
        assert!(a.passed(), "{a}");
        let b = run_all(4, 3, 9);
        assert_eq!(a.to_string(), b.to_string());
    }
}
