use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use schematic::oracle::{bounded_check, DEFAULT_NODE_CAP};
use schematic::{parse_problem, th_unif, u_sch_unif, SchematicProblem};

const LONG_RUN: &str = include_str!("../../../corpus/long_run.prob");
const SMALL: &str = include_str!("../../../corpus/nested_pair.prob");
const CLASH: &str = include_str!("../../../corpus/swap_clash.prob");

fn problem(text: &str) -> SchematicProblem {
    parse_problem(text).unwrap().uniform_problem().unwrap()
}

fn solve(c: &mut Criterion) {
    for (name, text) in [("long_run", LONG_RUN), ("small", SMALL), ("clash", CLASH)] {
        let p = problem(text);
        c.bench_function(&format!("solve/{name}"), |b| {
            b.iter(|| u_sch_unif(black_box(&p), Default::default()).unwrap())
        });
    }
}

fn theta(c: &mut Criterion) {
    let p = problem(LONG_RUN);
    for i in [1, 5, 10] {
        let eqs = p.instance(i);
        c.bench_function(&format!("th_unif/long_run_instance_{i}"), |b| {
            b.iter(|| th_unif(black_box(&eqs), &p.schema))
        });
    }
}

fn oracle(c: &mut Criterion) {
    let p = problem(LONG_RUN);
    c.bench_function("oracle/long_run_25", |b| {
        b.iter(|| bounded_check(black_box(&p), 25, DEFAULT_NODE_CAP))
    });
}

criterion_group!(benches, solve, theta, oracle);
criterion_main!(benches);
