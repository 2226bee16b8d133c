use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use schematic::io::{emit_trace, emit_verdict, json_report, parse_problem, ProblemFile};
use schematic::oracle::{agrees, bounded_check, OracleReport, DEFAULT_NODE_CAP};
use schematic::{u_sch_unif, Outcome, SolveOptions};

/// Decide a uniform schematic unification problem.
#[derive(Parser, Debug)]
#[command(name = "schematic", version)]
struct Args {
    /// Problem file (`schema:` rules, `problem:` equations, `# key = value` directives).
    file: PathBuf,
    /// Print the per-instance trace.
    #[arg(long)]
    trace: bool,
    /// Print the outcome as JSON.
    #[arg(long)]
    json: bool,
    /// Cross-check the verdict by unifying instances 0..=N directly.
    #[arg(long, value_name = "N", num_args = 0..=1, default_missing_value = "25")]
    oracle: Option<usize>,
    /// Give up after K instances.
    #[arg(long, value_name = "K")]
    max_iterations: Option<usize>,
    /// Skip oracle instances with more than M term nodes.
    #[arg(long, value_name = "M")]
    oracle_node_cap: Option<usize>,
}

const EXIT_INPUT: u8 = 3;

fn directive<T: std::str::FromStr>(file: &ProblemFile, key: &str) -> Result<Option<T>, String> {
    file.directives
        .get(key)
        .map(|v| v.parse().map_err(|_| format!("directive `{key}`: invalid value `{v}`")))
        .transpose()
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(args: &Args) -> Result<u8, String> {
    let text = std::fs::read_to_string(&args.file)
        .map_err(|e| format!("{}: {e}", args.file.display()))?;
    let file = parse_problem(&text).map_err(|e| format!("{}:{e}", args.file.display()))?;
    let problem = file
        .uniform_problem()
        .map_err(|e| format!("{}: {e}", args.file.display()))?;

    let max_iterations = match args.max_iterations {
        Some(k) => Some(k),
        None => directive(&file, "max_iterations")?,
    };
    let oracle_n = match args.oracle {
        Some(n) => Some(n),
        None => directive(&file, "oracle")?,
    };
    let node_cap = match args.oracle_node_cap {
        Some(m) => m,
        None => directive(&file, "oracle_node_cap")?.unwrap_or(DEFAULT_NODE_CAP),
    };

    let report = u_sch_unif(&problem, SolveOptions { max_iterations })
        .map_err(|e| format!("{}: {e}", args.file.display()))?;
    let oracle: Option<OracleReport> =
        oracle_n.map(|n| bounded_check(&problem, n, node_cap));

    let mut out = String::new();
    if args.json {
        let json = json_report(&report, oracle.as_ref());
        out.push_str(&serde_json::to_string_pretty(&json).expect("report serializes"));
        out.push('\n');
    } else {
        if let Some(o) = &oracle {
            out.push_str(&oracle_summary(&report.outcome, o));
        }
        if args.trace {
            out.push_str(&emit_trace(&report));
        } else {
            out.push_str(&emit_verdict(&report.outcome));
        }
    }
    // a closed pipe (e.g. `| head`) is not an error
    match std::io::stdout().lock().write_all(out.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(format!("stdout: {e}")),
        _ => {}
    }
    if let Some(o) = &oracle {
        if !agrees(&report.outcome, o) {
            eprintln!("warning: oracle disagrees with the solver verdict");
        }
    }

    Ok(match report.outcome {
        Outcome::Cycle { .. } => 0,
        Outcome::NotUnifiable { .. } => 1,
        Outcome::StabilityViolation { .. } | Outcome::Exhausted { .. } => 2,
    })
}

fn oracle_summary(outcome: &Outcome, o: &OracleReport) -> String {
    let checked = match o.checked_up_to {
        Some(k) => format!("instances 0..={k}"),
        None => "no instances".to_string(),
    };
    let found = match o.first_failure {
        Some((k, kind)) => format!("first failure at instance {k} ({kind})"),
        None => "no failure".to_string(),
    };
    let capped = match o.size_capped_at {
        Some(k) => format!(", size cap reached at instance {k}"),
        None => String::new(),
    };
    let verdict = if agrees(outcome, o) { "agrees" } else { "disagrees" };
    format!("oracle: {checked}, {found}{capped}; {verdict}\n")
}
