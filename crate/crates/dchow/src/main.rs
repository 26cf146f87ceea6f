//! Command-line interface: `chow`, `bounds`, `reduce`, `verify`, `jacobi`.
//!
//! Results go to stdout and are byte-deterministic for identical inputs;
//! diagnostics, warnings, and timings go to stderr. Exit codes: 0 on
//! success, 1 for input errors (including failed verification), 2 when a
//! search violates its proven bounds.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dchow::bounds::{
    conjectured_bound, degree_bound_at, degree_bound_orderly, jacobi_number, BoundsError,
    OrderMatrix,
};
use dchow::chow::{
    dchowform1_with, dchowform2_with, dchowform3_with, verify_chow, ChowError, ChowResult,
    SearchOptions,
};
use dchow::dpoly::DiffPoly;
use dchow::frontend::{
    compile_charset, format_diffpoly, parse_diffpoly, parse_uform, render_result, trace_line,
    FormatStyle, FrontendError, ProblemSpec,
};
use dchow::reduction::{diff_rem, CharSet};

#[derive(Parser)]
#[command(
    name = "dchow",
    version,
    about = "Differential Chow forms of prime differential ideals, from characteristic sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the differential Chow form of a characteristic set.
    Chow {
        #[command(flatten)]
        system: SystemArgs,
        /// Search algorithm: 1 (orderly rankings), 2 (order-major),
        /// 3 (degree-major with verification), or auto (1 if orderly else 3).
        #[arg(long, default_value = "auto")]
        algorithm: String,
        /// Write one JSON record per examined (h, t) cell to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Abort if a cell would need more ansatz columns than this.
        #[arg(long)]
        max_columns: Option<u64>,
        /// Start the sweep at this cell, given as `h,t`.
        #[arg(long)]
        jump: Option<String>,
        /// Verify this Chow-form expression at the `--jump` cell and stop,
        /// instead of solving (early exit for heavy inputs).
        #[arg(long, requires = "jump")]
        candidate: Option<String>,
        /// Emit a JSON document instead of plain text.
        #[arg(long)]
        json: bool,
    },
    /// Print order and degree bounds for a characteristic set.
    Bounds {
        #[command(flatten)]
        system: SystemArgs,
        /// Emit a JSON document instead of plain text.
        #[arg(long)]
        json: bool,
    },
    /// Differentially reduce a polynomial by a characteristic set and
    /// print the reduction certificate.
    Reduce {
        #[command(flatten)]
        system: SystemArgs,
        /// The polynomial to reduce (same grammar as char_set entries).
        #[arg(long)]
        poly: String,
        /// Emit a JSON document instead of plain text.
        #[arg(long)]
        json: bool,
    },
    /// Verify that an expression is the differential Chow form of a
    /// characteristic set. Exits 1 when verification fails.
    Verify {
        #[command(flatten)]
        system: SystemArgs,
        /// The Chow-form expression, in u{i}_{j} naming.
        #[arg(long)]
        chow: String,
        /// Emit a JSON document instead of plain text.
        #[arg(long)]
        json: bool,
    },
    /// Jacobi number and conjectured order bound of a raw order matrix.
    Jacobi {
        /// Matrix file: one row per line, entries whitespace-separated,
        /// nonnegative integers or `*` for "variable does not occur".
        #[arg(long)]
        matrix: PathBuf,
        /// Emit a JSON document instead of plain text.
        #[arg(long)]
        json: bool,
    },
}

/// How a characteristic set reaches a subcommand: a JSON problem file, or
/// bare expressions (one per line) with an explicit ranking and count.
#[derive(Args)]
struct SystemArgs {
    /// Problem file: JSON {"n", "ranking", "char_set", "options"?}.
    #[arg(long, conflicts_with_all = ["exprs", "ranking", "n"])]
    input: Option<PathBuf>,
    /// Bare mode: file of polynomial expressions, one per line (`-` reads
    /// standard input).
    #[arg(long, requires = "ranking", requires = "n")]
    exprs: Option<PathBuf>,
    /// Bare mode: ranking description (orderly, orderly(...), elim(...),
    /// block([...]<[...])).
    #[arg(long)]
    ranking: Option<String>,
    /// Bare mode: number of variables.
    #[arg(long)]
    n: Option<u32>,
}

impl SystemArgs {
    fn load(&self) -> Result<ProblemSpec, CliError> {
        if let Some(path) = &self.input {
            let text = read_file(path)?;
            return ProblemSpec::from_json(&text).map_err(|e| CliError::Input(format!(
                "{}: {e}",
                path.display()
            )));
        }
        let path = self.exprs.as_ref().ok_or_else(|| {
            CliError::Input("give either --input FILE or --exprs FILE with --ranking/--n".into())
        })?;
        let text = if path == Path::new("-") {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Input(format!("standard input: {e}")))?;
            buf
        } else {
            read_file(path)?
        };
        Ok(ProblemSpec {
            n: self.n.expect("clap enforces --n with --exprs"),
            ranking: self.ranking.clone().expect("clap enforces --ranking with --exprs"),
            char_set: text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect(),
            options: Default::default(),
        })
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

enum CliError {
    /// Malformed input of any kind (files, expressions, flags, rankings,
    /// rejected candidates, failed verification).
    Input(String),
    /// A search ran past its proven bound or violated a proven invariant.
    BoundViolation(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::BoundViolation(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::BoundViolation(m) => m,
        }
    }
}

impl From<FrontendError> for CliError {
    fn from(e: FrontendError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ChowError> for CliError {
    fn from(e: ChowError) -> Self {
        match e {
            ChowError::BoundExceeded { .. }
            | ChowError::NullityViolation { .. }
            | ChowError::ColumnBudgetExceeded { .. } => CliError::BoundViolation(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Chow { system, algorithm, trace, max_columns, jump, candidate, json } => {
            let spec = system.load()?;
            let (charset, warnings) = compile_charset(&spec)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let algorithm = resolve_algorithm(
                spec.options.algorithm.as_deref(),
                &algorithm,
                &charset,
            )?;
            let mut opts = SearchOptions {
                max_columns: max_columns.or(spec.options.max_columns),
                ..Default::default()
            };
            if let Some(jump) = &jump {
                opts.jump_to = Some(parse_cell(jump)?);
            }
            if let Some(expr) = &candidate {
                opts.candidate =
                    Some(parse_uform(expr).map_err(|e| CliError::Input(e.to_string()))?);
            }
            let started = std::time::Instant::now();
            let result = match algorithm {
                1 => dchowform1_with(&charset, &opts),
                2 => dchowform2_with(&charset, &opts),
                3 => dchowform3_with(&charset, &opts),
                _ => unreachable!("resolve_algorithm returns 1..=3"),
            };
            let elapsed = started.elapsed();
            // The trace is worth keeping even when the search fails.
            if let Some(path) = &trace {
                let entries = match &result {
                    Ok(r) => r.trace.as_slice(),
                    Err(_) => &[],
                };
                write_trace(path, entries)?;
            }
            let result = result?;
            eprintln!(
                "examined {} cells in {:.3}s",
                result.trace.len(),
                elapsed.as_secs_f64()
            );
            print!("{}", render_result(&result, json));
            report_result_warnings(&result);
            Ok(())
        }
        Command::Bounds { system, json } => {
            let spec = system.load()?;
            let (charset, warnings) = compile_charset(&spec)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", render_bounds(&charset, json)?);
            Ok(())
        }
        Command::Reduce { system, poly, json } => {
            let spec = system.load()?;
            let (charset, warnings) = compile_charset(&spec)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let f = parse_diffpoly(&poly, spec.n).map_err(|e| CliError::Input(e.to_string()))?;
            let cert = diff_rem(&f, &charset);
            print!("{}", render_certificate(&f, &cert, json));
            Ok(())
        }
        Command::Verify { system, chow, json } => {
            let spec = system.load()?;
            let (charset, warnings) = compile_charset(&spec)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            let f = parse_uform(&chow).map_err(|e| CliError::Input(e.to_string()))?;
            let verdict = verify_chow(&f, &charset);
            print!("{}", render_verdict(&verdict, json));
            if verdict.pass {
                Ok(())
            } else {
                Err(CliError::Input("verification failed".to_string()))
            }
        }
        Command::Jacobi { matrix, json } => {
            let text = read_file(&matrix)?;
            let parsed = parse_matrix(&text)?;
            let m = OrderMatrix::new(parsed).map_err(|e| CliError::Input(e.to_string()))?;
            print!("{}", render_jacobi(&m, json)?);
            Ok(())
        }
    }
}

/// Applies the `auto` rule and the file/flag precedence (flags win).
fn resolve_algorithm(
    from_file: Option<&str>,
    from_flag: &str,
    charset: &CharSet,
) -> Result<u8, CliError> {
    let requested = if from_flag == "auto" { from_file.unwrap_or("auto") } else { from_flag };
    match requested {
        "1" => Ok(1),
        "2" => Ok(2),
        "3" => Ok(3),
        "auto" => Ok(if charset.ranking().is_orderly() { 1 } else { 3 }),
        other => Err(CliError::Input(format!(
            "--algorithm must be 1, 2, 3, or auto (got `{other}`)"
        ))),
    }
}

fn parse_cell(text: &str) -> Result<(u32, u32), CliError> {
    let mut parts = text.split(',');
    let parse = |s: Option<&str>| {
        s.and_then(|x| x.trim().parse::<u32>().ok())
            .ok_or_else(|| CliError::Input(format!("--jump expects `h,t`, got `{text}`")))
    };
    let h = parse(parts.next())?;
    let t = parse(parts.next())?;
    if parts.next().is_some() {
        return Err(CliError::Input(format!("--jump expects `h,t`, got `{text}`")));
    }
    Ok((h, t))
}

fn parse_matrix(text: &str) -> Result<Vec<Vec<Option<u32>>>, CliError> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for entry in line.split_whitespace() {
            if entry == "*" {
                row.push(None);
            } else {
                let value = entry.parse::<u32>().map_err(|_| {
                    CliError::Input(format!(
                        "line {}: `{entry}` is neither a nonnegative integer nor `*`",
                        lineno + 1
                    ))
                })?;
                row.push(Some(value));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Input("the matrix file has no rows".to_string()));
    }
    Ok(rows)
}

fn write_trace(path: &Path, entries: &[dchow::chow::TraceEntry]) -> Result<(), CliError> {
    let mut out = String::new();
    for e in entries {
        out.push_str(&trace_line(e));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn report_result_warnings(result: &ChowResult) {
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
}

fn render_bounds(charset: &CharSet, json: bool) -> Result<String, CliError> {
    let matrix = OrderMatrix::from_charset(charset);
    let jacobi = match jacobi_number(&matrix) {
        Ok(j) => Some(j),
        Err(BoundsError::NoFeasibleAssignment) => None,
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let conjectured = conjectured_bound(&matrix);
    let ord = charset.ord();
    let orderly = charset.ranking().is_orderly();
    let degree_rows: Vec<(u32, String)> = match jacobi {
        Some(j) => (ord..=j).map(|h| (h, degree_bound_at(charset, h).to_string())).collect(),
        None => vec![(ord, degree_bound_at(charset, ord).to_string())],
    };
    if json {
        let doc = serde_json::json!({
            "elements": charset.len(),
            "dimension": charset.dimension(),
            "ord": ord,
            "jacobi": jacobi,
            "conjectured": conjectured,
            "orderly_ranking": orderly,
            "degree_bound_orderly": orderly.then(|| degree_bound_orderly(charset).to_string()),
            "degree_bounds": degree_rows
                .iter()
                .map(|(h, b)| serde_json::json!({"h": h, "bound": b}))
                .collect::<Vec<_>>(),
        });
        Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).expect("plain data serializes")
        ))
    } else {
        let mut out = String::new();
        let _ = writeln!(out, "elements: {}", charset.len());
        let _ = writeln!(out, "dimension: {}", charset.dimension());
        let _ = writeln!(out, "ord: {ord}");
        match jacobi {
            Some(j) => {
                let _ = writeln!(out, "jacobi: {j}");
            }
            None => {
                let _ = writeln!(out, "jacobi: infeasible");
            }
        }
        let _ = writeln!(out, "conjectured: {conjectured}");
        if orderly {
            let _ = writeln!(out, "degree_bound_orderly: {}", degree_bound_orderly(charset));
        }
        for (h, b) in degree_rows {
            let _ = writeln!(out, "degree_bound[h={h}]: {b}");
        }
        Ok(out)
    }
}

fn render_certificate(
    f: &DiffPoly,
    cert: &dchow::reduction::ReductionCertificate,
    json: bool,
) -> String {
    if json {
        let doc = serde_json::json!({
            "input": format_diffpoly(f, FormatStyle::Plain),
            "remainder": format_diffpoly(&cert.remainder, FormatStyle::Plain),
            "is_member": cert.remainder.is_zero(),
            "steps": cert.steps.iter().map(|s| serde_json::json!({
                "element": s.element,
                "derivative": s.derivative,
                "multiplier": format!("{}{}^{}", s.kind, s.element, s.exponent),
                "quotient": format_diffpoly(&s.quotient, FormatStyle::Plain),
            })).collect::<Vec<_>>(),
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain data serializes"))
    } else {
        let mut out = String::new();
        let _ = writeln!(out, "input: {f}");
        let _ = writeln!(out, "remainder: {}", cert.remainder);
        let _ = writeln!(out, "member: {}", cert.remainder.is_zero());
        for (i, s) in cert.steps.iter().enumerate() {
            let _ = writeln!(
                out,
                "step {}: {}{}^{} on derivative {} of element {}; quotient {}",
                i + 1,
                s.kind,
                s.element,
                s.exponent,
                s.derivative,
                s.element,
                s.quotient
            );
        }
        out
    }
}

fn render_verdict(v: &dchow::chow::ChowVerdict, json: bool) -> String {
    if json {
        let doc = serde_json::json!({
            "pass": v.pass,
            "order": v.order,
            "per_block_degree": v.per_block_degree,
            "failures": v.failures,
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain data serializes"))
    } else {
        let mut out = String::new();
        let _ = writeln!(out, "verdict: {}", if v.pass { "PASS" } else { "FAIL" });
        if let Some(h) = v.order {
            let _ = writeln!(out, "order: {h}");
        }
        if let Some(r) = v.per_block_degree {
            let _ = writeln!(out, "per_block_degree: {r}");
        }
        for failure in &v.failures {
            let _ = writeln!(out, "failed: {failure}");
        }
        out
    }
}

fn render_jacobi(m: &OrderMatrix, json: bool) -> Result<String, CliError> {
    let jacobi = match jacobi_number(m) {
        Ok(j) => Some(j),
        Err(BoundsError::NoFeasibleAssignment) => None,
        Err(e) => return Err(CliError::Input(e.to_string())),
    };
    let conjectured = conjectured_bound(m);
    if json {
        let doc = serde_json::json!({
            "rows": m.rows(),
            "cols": m.cols(),
            "jacobi": jacobi,
            "conjectured": conjectured,
        });
        Ok(format!(
            "{}\n",
            serde_json::to_string_pretty(&doc).expect("plain data serializes")
        ))
    } else {
        let mut out = String::new();
        match jacobi {
            Some(j) => {
                let _ = writeln!(out, "jacobi: {j}");
            }
            None => {
                let _ = writeln!(out, "jacobi: infeasible");
            }
        }
        let _ = writeln!(out, "conjectured: {conjectured}");
        Ok(out)
    }
}
