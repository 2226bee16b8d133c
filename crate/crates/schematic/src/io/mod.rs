//! Problem files, traces and JSON reports.

mod json;
mod parse;
mod trace;

use std::fmt::Write;

use crate::term::Term;

pub use json::{json_report, JsonInstance, JsonOracle, JsonReport};
pub use parse::{parse_problem, parse_term, ParseError, ProblemFile};
pub use trace::{emit_trace, emit_verdict};

/// Renders a rule body with indices relative to `i`: `X[0]` as `X[i]`,
/// `X[2]` as `X[i+2]`.
pub fn render_base(t: &Term) -> String {
    let mut out = String::new();
    write_base(&mut out, t);
    out
}

fn write_base(out: &mut String, t: &Term) {
    match t {
        Term::Var(v) if v.idx == 0 => {
            let _ = write!(out, "{}[i]", v.sym);
        }
        Term::Var(v) => {
            let _ = write!(out, "{}[i+{}]", v.sym, v.idx);
        }
        Term::App(h, args) => {
            out.push_str(h);
            if !args.is_empty() {
                out.push('(');
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    write_base(out, a);
                }
                out.push(')');
            }
        }
    }
}

/// Renders a file that `parse_problem` reads back to the same value.
pub fn render_problem(file: &ProblemFile) -> String {
    let mut out = String::from("schema:\n");
    for (sym, base) in file.schema.rules() {
        let _ = writeln!(out, "  {sym}[i] -> {};", render_base(base));
    }
    out.push_str("problem:\n");
    for e in &file.equations {
        let _ = writeln!(out, "  {e};");
    }
    for (k, v) in &file.directives {
        let _ = writeln!(out, "# {k} = {v}");
    }
    out
}
