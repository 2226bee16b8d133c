mod common;

use std::collections::BTreeSet;

use schematic::io::{emit_trace, json_report, render_problem};
use schematic::oracle::{agrees, bounded_check, confirmation_horizon, DEFAULT_NODE_CAP};
use schematic::term::{max_depth_of, vars_of};
use schematic::{parse_problem, u_sch_unif, Outcome, SolveReport, Term};

fn solve(file: &schematic::ProblemFile) -> SolveReport {
    u_sch_unif(&file.uniform_problem().unwrap(), Default::default()).unwrap()
}

#[test]
fn corpus_is_large_enough() {
    let c = common::corpus();
    assert!(c.len() >= 20);
    let failing = c.iter().filter(|(_, f)| f.expect() == Some("not_unifiable")).count();
    assert!(failing >= 5 && failing < c.len());
}

#[test]
fn verdicts_match_expectations() {
    for (name, file) in common::corpus() {
        let report = solve(&file);
        assert_eq!(Some(report.outcome.name()), file.expect(), "{name}");
    }
}

#[test]
fn oracle_confirms_every_verdict() {
    for (name, file) in common::corpus() {
        let report = solve(&file);
        let n = confirmation_horizon(&report.outcome);
        let oracle = bounded_check(&file.problem(), n, DEFAULT_NODE_CAP);
        assert!(agrees(&report.outcome, &oracle), "{name}: {oracle:?}");
        assert!(oracle.failures_are_monotone(), "{name}");
        if let Outcome::NotUnifiable { instance, .. } = report.outcome {
            let (k, _) = oracle.first_failure.unwrap();
            assert!(k <= instance.max(n), "{name}");
            // once an instance fails, the next few fail as well
            let more = bounded_check(&file.problem(), k + 3, DEFAULT_NODE_CAP);
            assert!(more.results[k..].iter().all(|r| *r != schematic::oracle::InstanceResult::Unifiable));
        }
    }
}

#[test]
fn normalized_stores_stay_within_first_unfolding() {
    for (name, file) in common::corpus() {
        let report = solve(&file);
        let Some(first) = report.records.first() else { continue };
        let seed = first.step_sub.apply_set(&report.primitive.equations);
        let bound = max_depth_of(&seed);
        let subterms = |eqs: &BTreeSet<schematic::Equation>| -> BTreeSet<Term> {
            eqs.iter()
                .flat_map(|e| e.lhs.subterms().into_iter().chain(e.rhs.subterms()))
                .collect()
        };
        let strict = subterms(&seed);
        // instance 0's store still holds the unsubstituted schema variables
        let mut first_pool = strict.clone();
        first_pool.extend(subterms(&report.primitive.equations));
        let is_shift = |pool: &BTreeSet<Term>, t: &Term| {
            pool.iter()
                .any(|s| (0..=t.max_index().unwrap_or(0)).any(|d| &s.shift(d) == t))
        };
        for r in &report.records {
            assert!(max_depth_of(&r.normalized_store) <= bound, "{name} i={}", r.i);
            let pool = if r.i == 0 { &first_pool } else { &strict };
            for e in &r.normalized_store {
                assert!(is_shift(pool, &e.lhs) && is_shift(pool, &e.rhs), "{name} i={}: {e}", r.i);
            }
        }
    }
}

#[test]
fn stores_bind_variables() {
    for (name, file) in common::corpus() {
        for r in solve(&file).records {
            assert!(r.store.iter().all(|e| e.lhs.is_var()), "{name} i={}", r.i);
            assert!(vars_of(&r.reduced_store).len() <= vars_of(&r.store).len() + r.store.len());
        }
    }
}

#[test]
fn files_round_trip() {
    for (name, file) in common::corpus() {
        let again = parse_problem(&render_problem(&file)).unwrap();
        assert_eq!(again, file, "{name}");
    }
}

#[test]
fn output_is_deterministic() {
    for (name, file) in common::corpus() {
        let a = solve(&file);
        let b = solve(&file);
        assert_eq!(emit_trace(&a), emit_trace(&b), "{name}");
        let ja = serde_json::to_string(&json_report(&a, None)).unwrap();
        let jb = serde_json::to_string(&json_report(&b, None)).unwrap();
        assert_eq!(ja, jb, "{name}");
    }
}
