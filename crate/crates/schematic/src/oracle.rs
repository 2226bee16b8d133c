//! Bounded brute-force check: build instance problems directly and unify
//! them with plain first-order unification.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::solver::{Outcome, SchematicProblem};
use crate::subst::{unify, FailureKind};
use crate::term::{vars_of, Equation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InstanceSize {
    pub terms: usize,
    pub max_depth: usize,
    pub vars: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceResult {
    Unifiable,
    Failed(FailureKind),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    /// Last instance actually unified; `None` if even instance 0 was too big.
    pub checked_up_to: Option<usize>,
    pub first_failure: Option<(usize, FailureKind)>,
    pub results: Vec<InstanceResult>,
    pub sizes: Vec<InstanceSize>,
    /// First instance skipped for exceeding the node cap.
    pub size_capped_at: Option<usize>,
}

impl OracleReport {
    /// Every instance after the first failing one fails as well.
    pub fn failures_are_monotone(&self) -> bool {
        match self.first_failure {
            None => true,
            Some((k, _)) => self.results[k..]
                .iter()
                .all(|r| matches!(r, InstanceResult::Failed(_))),
        }
    }
}

pub const DEFAULT_INSTANCES: usize = 25;
pub const DEFAULT_NODE_CAP: usize = 200_000;

/// Unifies instances `0..=n` of `problem`, stopping early at the first
/// instance whose total node count exceeds `node_cap`.
pub fn bounded_check(problem: &SchematicProblem, n: usize, node_cap: usize) -> OracleReport {
    let mut report = OracleReport {
        checked_up_to: None,
        first_failure: None,
        results: Vec::new(),
        sizes: Vec::new(),
        size_capped_at: None,
    };
    let mut current: Vec<Equation> = problem.equations.iter().cloned().collect();
    for i in 0..=n {
        if i > 0 {
            current = current
                .iter()
                .map(|e| e.map(|t| problem.schema.unfold(t)))
                .collect();
        }
        let Some(size) = instance_size(&current, node_cap) else {
            report.size_capped_at = Some(i);
            break;
        };
        let result = match unify(&current) {
            Ok(_) => InstanceResult::Unifiable,
            Err(e) => {
                report.first_failure.get_or_insert((i, e.kind));
                InstanceResult::Failed(e.kind)
            }
        };
        report.results.push(result);
        report.sizes.push(size);
        report.checked_up_to = Some(i);
    }
    report
}

/// Number of instances the oracle should check to confirm `outcome`: for a
/// cycle `(i, j)` two further periods past `i`, capped at the default.
pub fn confirmation_horizon(outcome: &Outcome) -> usize {
    match outcome {
        Outcome::Cycle { i, j, .. } => (i + 2 * (i - j)).min(DEFAULT_INSTANCES),
        Outcome::NotUnifiable { instance, .. } => (*instance).max(DEFAULT_INSTANCES),
        _ => DEFAULT_INSTANCES,
    }
}

/// Whether the oracle's findings are consistent with `outcome`: a cycle
/// must see no failing instance, a non-unifiable verdict must see one.
/// Other outcomes make no claim.
pub fn agrees(outcome: &Outcome, report: &OracleReport) -> bool {
    match outcome {
        Outcome::Cycle { .. } => report.first_failure.is_none(),
        Outcome::NotUnifiable { .. } => report.first_failure.is_some(),
        _ => true,
    }
}

fn instance_size(eqs: &[Equation], cap: usize) -> Option<InstanceSize> {
    let mut budget = cap;
    let mut max_depth = 0;
    for e in eqs {
        for t in [&e.lhs, &e.rhs] {
            let n = t.size_capped(budget)?;
            budget -= n;
            max_depth = max_depth.max(t.depth());
        }
    }
    let vars: BTreeSet<_> = vars_of(eqs);
    Some(InstanceSize {
        terms: cap - budget,
        max_depth,
        vars: vars.len(),
    })
}
