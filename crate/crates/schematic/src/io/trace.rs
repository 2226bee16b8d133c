//! Human-readable per-instance trace.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::solver::{Outcome, SolveReport};
use crate::term::{Equation, Var};

fn set<T: std::fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    let parts: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn eqs(s: &BTreeSet<Equation>) -> String {
    set(s.iter())
}

fn vars(s: &BTreeSet<Var>) -> String {
    set(s.iter())
}

/// One block per instance, then the verdict. A cycle ends with the line
/// `cycle i=<i> j=<j>`.
pub fn emit_trace(report: &SolveReport) -> String {
    let mut out = String::new();
    let p = &report.primitive;
    if !p.sigma.is_empty() {
        out.push_str("primitive schema:\n");
        for line in p.schema.to_string().lines() {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(out, "renaming: {}", p.sigma);
        let _ = writeln!(out, "problem: {}", eqs(&p.equations));
    }
    if let Some(s) = report.stab_index {
        let _ = writeln!(out, "stab: {s}");
    }
    for r in &report.records {
        let _ = writeln!(out, "--- instance {} ---", r.i);
        let _ = writeln!(out, "metric: {} (listed {})", r.metric, r.listed_metric);
        match (r.stab_ratio, r.listed_ratio) {
            (Some(a), Some(b)) => {
                let _ = writeln!(out, "stab ratio: {a:.3} (listed {b:.3})");
            }
            (Some(a), None) => {
                let _ = writeln!(out, "stab ratio: {a:.3}");
            }
            (None, Some(b)) => {
                let _ = writeln!(out, "stab ratio: - (listed {b:.3})");
            }
            (None, None) => {}
        }
        let _ = writeln!(out, "store: {}", eqs(&r.store));
        let _ = writeln!(out, "normalized: {}", eqs(&r.normalized_store));
        let _ = writeln!(out, "reduced: {}", eqs(&r.reduced_store));
        let _ = writeln!(out, "irr: {}", eqs(&r.irr));
        let _ = writeln!(out, "FR: {}", vars(&r.fr));
        let _ = writeln!(out, "sub: {}", r.eq_sub);
        let _ = writeln!(out, "step: {}", r.step_sub);
    }
    out.push_str(&emit_verdict(&report.outcome));
    out
}

/// The closing lines of a trace: the mapping and `cycle i=.. j=..`, or the
/// failure.
pub fn emit_verdict(outcome: &Outcome) -> String {
    let mut out = String::new();
    match outcome {
        Outcome::Cycle { i, j, mapping, .. } => {
            let _ = writeln!(out, "mapping: {mapping}");
            let _ = writeln!(out, "cycle i={i} j={j}");
        }
        Outcome::NotUnifiable {
            instance,
            cause,
            equation,
        } => {
            let _ = writeln!(out, "not unifiable at instance {instance}: {cause} at {equation}");
        }
        Outcome::StabilityViolation { instance } => {
            let _ = writeln!(out, "stability violation at instance {instance}");
        }
        Outcome::Exhausted { cap } => {
            let _ = writeln!(out, "exhausted after {cap} instances");
        }
    }
    out
}
