//! Machine-readable report.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::oracle::OracleReport;
use crate::solver::{Cause, Outcome, SolveReport};
use crate::subst::FailureKind;

#[derive(Debug, Clone, Serialize)]
pub struct JsonInstance {
    pub i: usize,
    pub store: Vec<String>,
    pub normalized_store: Vec<String>,
    pub reduced_store: Vec<String>,
    pub irr: Vec<String>,
    pub fr: Vec<String>,
    pub eq_sub: BTreeMap<String, String>,
    pub step_sub: BTreeMap<String, String>,
    pub metric: i64,
    pub listed_metric: i64,
    pub stab_ratio: Option<f64>,
    pub listed_ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonFailure {
    pub instance: usize,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonOracle {
    pub checked_up_to: Option<usize>,
    pub first_failure: Option<JsonFailure>,
    pub size_capped_at: Option<usize>,
    pub agrees: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct JsonReport {
    pub verdict: &'static str,
    pub i: Option<usize>,
    pub j: Option<usize>,
    pub mapping: BTreeMap<String, String>,
    pub stab_index: Option<usize>,
    /// Failing instance for `not_unifiable` and `stability_violation`.
    pub instance: Option<usize>,
    pub cause: Option<Cause>,
    pub equation: Option<String>,
    pub instances: Vec<JsonInstance>,
    pub oracle: Option<JsonOracle>,
}

fn strings<T: ToString>(items: impl IntoIterator<Item = T>) -> Vec<String> {
    items.into_iter().map(|x| x.to_string()).collect()
}

pub fn json_report(report: &SolveReport, oracle: Option<&OracleReport>) -> JsonReport {
    let mut out = JsonReport {
        verdict: report.outcome.name(),
        i: None,
        j: None,
        mapping: BTreeMap::new(),
        stab_index: report.stab_index,
        instance: None,
        cause: None,
        equation: None,
        instances: report
            .records
            .iter()
            .map(|r| JsonInstance {
                i: r.i,
                store: strings(&r.store),
                normalized_store: strings(&r.normalized_store),
                reduced_store: strings(&r.reduced_store),
                irr: strings(&r.irr),
                fr: strings(&r.fr),
                eq_sub: r.eq_sub.to_string_map(),
                step_sub: r.step_sub.to_string_map(),
                metric: r.metric,
                listed_metric: r.listed_metric,
                stab_ratio: r.stab_ratio,
                listed_ratio: r.listed_ratio,
            })
            .collect(),
        oracle: oracle.map(|o| JsonOracle {
            checked_up_to: o.checked_up_to,
            first_failure: o
                .first_failure
                .map(|(instance, kind)| JsonFailure { instance, kind }),
            size_capped_at: o.size_capped_at,
            agrees: crate::oracle::agrees(&report.outcome, o),
        }),
    };
    match &report.outcome {
        Outcome::Cycle { i, j, mapping, .. } => {
            out.i = Some(*i);
            out.j = Some(*j);
            out.mapping = mapping.to_string_map();
        }
        Outcome::NotUnifiable {
            instance,
            cause,
            equation,
        } => {
            out.instance = Some(*instance);
            out.cause = Some(*cause);
            out.equation = Some(equation.to_string());
        }
        Outcome::StabilityViolation { instance } => out.instance = Some(*instance),
        Outcome::Exhausted { .. } => {}
    }
    out
}
