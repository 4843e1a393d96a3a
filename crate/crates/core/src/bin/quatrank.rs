use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use quatrank::elimination::rank;
use quatrank::extremal::{
    extremal_ranks_f1, extremal_ranks_f2, extremal_ranks_f3, extremal_ranks_p, extremal_ranks_p_contained,
    ExtremalReport, F2Input, F3Input,
};
use quatrank::io::{decomposition_to_value, matrix_to_value, read_matrix, write_matrix};
use quatrank::selftest::run_all;
use quatrank::simdecomp::{simultaneous_decompose, verify_decomposition, QuintInput};
use quatrank::solver::{general_solution, is_consistent, min_rank_solution_values, min_rank_solution_witness, Which};
use quatrank::{Error, QMatrix, Result};

#[derive(Parser)]
#[command(
    name = "quatrank",
    version,
    about = "Exact quaternion matrix ranks, decompositions and the equation BXD + CYE = A"
)]
struct Cli {
    /// Output style.
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Rank of one matrix.
    Rank { file: PathBuf },
    /// Simultaneous decomposition of (A, B, C, D, E), verified before it is written.
    Decompose {
        #[command(flatten)]
        quint: QuintFiles,
        /// Directory receiving decomposition.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximal and minimal ranks of a linear matrix expression.
    Extremal {
        #[command(subcommand)]
        kind: ExtremalKind,
    },
    /// Solve B·X·D + C·Y·E = A.
    Solve {
        #[command(flatten)]
        quint: QuintFiles,
        #[command(flatten)]
        mode: SolveMode,
        /// Directory receiving X.json and Y.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded randomized checks of every component.
    Selftest {
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 4)]
        max_dim: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct QuintFiles {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    c: PathBuf,
    #[arg(long)]
    d: PathBuf,
    #[arg(long)]
    e: PathBuf,
}

impl QuintFiles {
    fn load(&self) -> Result<QuintInput> {
        QuintInput::new(
            read_matrix(&self.a)?,
            read_matrix(&self.b)?,
            read_matrix(&self.c)?,
            read_matrix(&self.d)?,
            read_matrix(&self.e)?,
        )
    }
}

#[derive(Args)]
#[group(multiple = false)]
struct SolveMode {
    /// A solution whose X has the smallest possible rank.
    #[arg(long)]
    min_rank_x: bool,
    /// A solution whose Y has the smallest possible rank.
    #[arg(long)]
    min_rank_y: bool,
    /// The particular solution with every free block zero (the default).
    #[arg(long)]
    particular: bool,
}

#[derive(Subcommand)]
enum ExtremalKind {
    /// A − B·X·D − C·Y·E
    P {
        #[command(flatten)]
        quint: QuintFiles,
        /// Use the formulas for R(B) ⊆ R(C) and R(E*) ⊆ R(D*).
        #[arg(long)]
        contained: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A − B·X − Y·C
    F1 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        c: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A − B1·X1 − X2·C2 − B3·X3·C3 − B4·X4·C4
    F2 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b1: PathBuf,
        #[arg(long)]
        c2: PathBuf,
        #[arg(long)]
        b3: PathBuf,
        #[arg(long)]
        c3: PathBuf,
        #[arg(long)]
        b4: PathBuf,
        #[arg(long)]
        c4: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A − Σ Bi·Xi·Ci for i = 1..4, with R(Bi) ⊆ R(B2) and R(Ci*) ⊆ R(C1*)
    F3 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long, num_args = 4, value_names = ["B1", "B2", "B3", "B4"])]
        b: Vec<PathBuf>,
        #[arg(long, num_args = 4, value_names = ["C1", "C2", "C3", "C4"])]
        c: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command prints in each format, and its exit status.
struct Output {
    table: String,
    json: Value,
    code: u8,
}

impl Output {
    fn ok(table: String, json: Value) -> Self {
        Output { table, json, code: 0 }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn cmd_rank(file: &Path) -> Result<Output> {
    let m = read_matrix(file)?;
    let r = rank(&m);
    Ok(Output::ok(format!("{r}\n"), json!({ "rows": m.rows(), "cols": m.cols(), "rank": r })))
}

fn cmd_decompose(files: &QuintFiles, out: &Path) -> Result<Output> {
    let q = files.load()?;
    let d = simultaneous_decompose(&q)?;
    let report = verify_decomposition(&q, &d);
    let mut table = String::new();
    let dims = serde_json::to_value(d.dims).expect("block sizes serialize");
    for (k, v) in dims.as_object().expect("block sizes form an object") {
        writeln!(table, "{k:>5} = {v}").unwrap();
    }
    writeln!(table, "{report}").unwrap();
    let verification = serde_json::to_value(&report).expect("reports serialize");
    if !report.passed() {
        writeln!(table, "verification failed; nothing written").unwrap();
        return Ok(Output {
            table,
            json: json!({ "dims": dims, "verification": verification, "written": Value::Null }),
            code: 1,
        });
    }
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let path = out.join("decomposition.json");
    let doc = serde_json::to_string_pretty(&decomposition_to_value(&d)).expect("documents serialize");
    fs::write(&path, doc + "\n").map_err(|e| io_err(&path, e))?;
    writeln!(table, "wrote {}", path.display()).unwrap();
    Ok(Output::ok(table, json!({ "dims": dims, "verification": verification, "written": path.display().to_string() })))
}

fn write_named(out: Option<&Path>, named: &[(String, &QMatrix)]) -> Result<Vec<String>> {
    let Some(dir) = out else { return Ok(Vec::new()) };
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    named
        .iter()
        .map(|(name, m)| {
            let path = dir.join(format!("{name}.json"));
            write_matrix(&path, m)?;
            Ok(path.display().to_string())
        })
        .collect()
}

fn extremal_output(expression: &str, vars: &[&str], rep: &ExtremalReport, out: Option<&Path>) -> Result<Output> {
    let mut table = String::new();
    writeln!(table, "expression  {expression}").unwrap();
    match rep.max_case {
        Some(case) => writeln!(table, "max rank    {}  (= {})", rep.max_rank, case.term()),
        None => writeln!(table, "max rank    {}", rep.max_rank),
    }
    .unwrap();
    writeln!(table, "min rank    {}", rep.min_rank).unwrap();
    let mut named = Vec::new();
    let mut witnesses = serde_json::Map::new();
    for (bound, w) in [("max", &rep.max_witness), ("min", &rep.min_witness)] {
        let mut obj = serde_json::Map::new();
        for (v, m) in vars.iter().zip(w) {
            write!(table, "\n{bound} witness {v}:\n{m}").unwrap();
            obj.insert(v.to_string(), matrix_to_value(m));
            named.push((format!("{bound}_{v}"), m));
        }
        witnesses.insert(bound.to_string(), Value::Object(obj));
    }
    let written = write_named(out, &named)?;
    for p in &written {
        writeln!(table, "wrote {p}").unwrap();
    }
    Ok(Output::ok(
        table,
        json!({
            "expression": expression,
            "max_rank": rep.max_rank,
            "min_rank": rep.min_rank,
            "max_case": rep.max_case,
            "witnesses": witnesses,
            "written": written,
        }),
    ))
}

fn read_four(paths: &[PathBuf]) -> Result<[QMatrix; 4]> {
    let ms = paths.iter().map(|p| read_matrix(p)).collect::<Result<Vec<_>>>()?;
    ms.try_into().map_err(|_| Error::DimensionMismatch("expected four matrices".into()))
}

fn cmd_extremal(kind: &ExtremalKind) -> Result<Output> {
    match kind {
        ExtremalKind::P { quint, contained, out } => {
            let q = quint.load()?;
            let rep = if *contained { extremal_ranks_p_contained(&q)? } else { extremal_ranks_p(&q)? };
            extremal_output("A - B*X*D - C*Y*E", &["X", "Y"], &rep, out.as_deref())
        }
        ExtremalKind::F1 { a, b, c, out } => {
            let rep = extremal_ranks_f1(&read_matrix(a)?, &read_matrix(b)?, &read_matrix(c)?)?;
            extremal_output("A - B*X - Y*C", &["X", "Y"], &rep, out.as_deref())
        }
        ExtremalKind::F2 { a, b1, c2, b3, c3, b4, c4, out } => {
            let f = F2Input::new(
                read_matrix(a)?,
                read_matrix(b1)?,
                read_matrix(c2)?,
                read_matrix(b3)?,
                read_matrix(c3)?,
                read_matrix(b4)?,
                read_matrix(c4)?,
            )?;
            let rep = extremal_ranks_f2(&f)?;
            extremal_output("A - B1*X1 - X2*C2 - B3*X3*C3 - B4*X4*C4", &["X1", "X2", "X3", "X4"], &rep, out.as_deref())
        }
        ExtremalKind::F3 { a, b, c, out } => {
            let f = F3Input::new(read_matrix(a)?, read_four(b)?, read_four(c)?)?;
            let rep = extremal_ranks_f3(&f)?;
            extremal_output(
                "A - B1*X1*C1 - B2*X2*C2 - B3*X3*C3 - B4*X4*C4",
                &["X1", "X2", "X3", "X4"],
                &rep,
                out.as_deref(),
            )
        }
    }
}

fn cmd_solve(files: &QuintFiles, mode: &SolveMode, out: Option<&Path>) -> Result<Output> {
    let q = files.load()?;
    let report = is_consistent(&q)?;
    if let Some(eq) = report.first_failure() {
        return Err(Error::Inconsistent { equality: eq.name.to_string(), lhs: eq.lhs, rhs: eq.rhs });
    }
    let (label, (x, y)) = if mode.min_rank_x {
        ("min-rank-x", min_rank_solution_witness(&q, Which::X)?)
    } else if mode.min_rank_y {
        ("min-rank-y", min_rank_solution_witness(&q, Which::Y)?)
    } else {
        ("particular", general_solution(&q)?.particular()?)
    };
    let exact = q.residual(&x, &y)?.is_zero();
    let substitution = if exact { "exact" } else { "FAILED" };
    let (min_x, min_y) = min_rank_solution_values(&q)?;

    let mut table = String::new();
    write!(table, "{report}").unwrap();
    if !table.ends_with('\n') {
        table.push('\n');
    }
    writeln!(table, "solution    {label}").unwrap();
    writeln!(table, "rank X      {}  (minimum {min_x})", rank(&x)).unwrap();
    writeln!(table, "rank Y      {}  (minimum {min_y})", rank(&y)).unwrap();
    write!(table, "\nX:\n{x}\nY:\n{y}\n").unwrap();
    writeln!(table, "substitution: {substitution}").unwrap();
    let written = if exact { write_named(out, &[("X".into(), &x), ("Y".into(), &y)])? } else { Vec::new() };
    for p in &written {
        writeln!(table, "wrote {p}").unwrap();
    }
    Ok(Output {
        table,
        json: json!({
            "consistency": report,
            "solution": label,
            "X": matrix_to_value(&x),
            "Y": matrix_to_value(&y),
            "rank_x": rank(&x),
            "rank_y": rank(&y),
            "min_rank_x": min_x,
            "min_rank_y": min_y,
            "substitution": substitution,
            "written": written,
        }),
        code: if exact { 0 } else { 1 },
    })
}

fn cmd_selftest(cases: usize, max_dim: usize, seed: u64) -> Output {
    let summary = run_all(cases, max_dim, seed);
    Output {
        table: format!("{summary}\n"),
        json: serde_json::to_value(&summary).expect("summaries serialize"),
        code: if summary.passed() { 0 } else { 1 },
    }
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Rank { file } => cmd_rank(file),
        Command::Decompose { quint, out } => cmd_decompose(quint, out),
        Command::Extremal { kind } => cmd_extremal(kind),
        Command::Solve { quint, mode, out } => cmd_solve(quint, mode, out.as_deref()),
        Command::Selftest { cases, max_dim, seed } => Ok(cmd_selftest(*cases, *max_dim, *seed)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let text = match cli.format {
                Format::Table => out.table,
                Format::Json => serde_json::to_string_pretty(&out.json).expect("values serialize") + "\n",
            };
            // A closed pipe downstream is not an error worth reporting.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(out.code)
        }
        Err(e) => {
            if cli.format == Format::Json {
                let _ = writeln!(std::io::stdout().lock(), "{}", json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
