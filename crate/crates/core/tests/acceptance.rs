//! Acceptance run: one line per criterion, exact arithmetic throughout, so
//! every comparison is an equality with tolerance zero.

use std::process::ExitCode;
use std::time::Instant;

use rayon::prelude::*;

use quatrank::gen::Generator;
use quatrank::selftest::{micro_instances, run_suite, solvability_check, Suite, SuiteResult};

const SEED: u64 = 20_240_601;

struct Line {
    number: usize,
    what: String,
    failures: Vec<String>,
}

fn from_suites(number: usize, what: &str, results: &[SuiteResult]) -> Line {
    let failures =
        results.iter().flat_map(|r| r.failures.iter().map(move |(i, m)| format!("{} case {i}: {m}", r.name))).collect();
    Line { number, what: what.to_string(), failures }
}

/// 100 planted solvable instances followed by 100 unconstrained ones.
fn solvability() -> Vec<String> {
    (0..200usize)
        .into_par_iter()
        .filter_map(|i| {
            let mut g = Generator::for_case(SEED, "acceptance-solvability", i as u64);
            let q = if i < 100 { g.planted_solvable(4) } else { g.quint(4) };
            solvability_check(&mut g, &q).err().map(|m| format!("case {i}: {m}"))
        })
        .collect()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let lines = vec![
        from_suites(
            1,
            "decomposition soundness: 200 quintuples, dims <= 5, reconstruction/templates/rank counts exact",
            &[run_suite(Suite::Decomposition, 200, 5, SEED)],
        ),
        from_suites(
            2,
            "rank oracle agreement: 500 matrices, dims <= 6, embedded real rank divisible by 4",
            &[run_suite(Suite::RankOracle, 500, 6, SEED)],
        ),
        from_suites(
            3,
            "extremal ranks of p: 200 quintuples, witnesses exact, 50 samples each inside [min, max]",
            &[run_suite(Suite::ExtremalP, 200, 4, SEED)],
        ),
        from_suites(
            4,
            "coherence: f1 = f2 with vanished terms, contained = general, f3 sandwich and attainment (100 each)",
            &[
                run_suite(Suite::F1F2Coherence, 100, 4, SEED),
                run_suite(Suite::ContainedCoherence, 100, 4, SEED),
                run_suite(Suite::F3, 100, 3, SEED),
            ],
        ),
        Line {
            number: 5,
            what: "solvability: rank test = oracle on 100 planted + 100 random, 10 exact members each".into(),
            failures: solvability(),
        },
        from_suites(
            6,
            "minimal ranks: 100 planted instances, witnesses attain, 50 samples never lower",
            &[run_suite(Suite::MinRank, 100, 4, SEED)],
        ),
        Line {
            number: 7,
            what: "micro-instances: i/j/k solve, all-ones min rank 0, C = E = 0 gives min rank X = 1".into(),
            failures: micro_instances().err().into_iter().collect(),
        },
    ];

    let mut all = true;
    for line in &lines {
        let status = if line.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("criterion {}: {status}  {} (tolerance 0)", line.number, line.what);
        for f in line.failures.iter().take(5) {
            println!("    {f}");
        }
        all &= line.failures.is_empty();
    }
    println!("acceptance: {} in {:.1} s", if all { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
