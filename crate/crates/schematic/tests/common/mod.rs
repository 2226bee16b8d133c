#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use proptest::prelude::*;
use schematic::{parse_problem, Equation, ProblemFile, Term, Var};

/// Textbook recursive unification: solve equations left to right, applying
/// each new binding to everything solved so far. Shares nothing with the
/// library's unifier beyond the term type.
pub fn naive_unify(eqs: &[Equation]) -> Option<BTreeMap<Var, Term>> {
    let mut sigma: BTreeMap<Var, Term> = BTreeMap::new();
    let mut todo: Vec<(Term, Term)> = eqs.iter().map(|e| (e.lhs.clone(), e.rhs.clone())).collect();
    while let Some((s, t)) = todo.pop() {
        let s = naive_apply(&sigma, &s);
        let t = naive_apply(&sigma, &t);
        match (&s, &t) {
            _ if s == t => {}
            (Term::Var(x), _) => bind(&mut sigma, x, t)?,
            (_, Term::Var(y)) => bind(&mut sigma, y, s)?,
            (Term::App(f, xs), Term::App(g, ys)) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                todo.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
        }
    }
    Some(sigma)
}

fn bind(sigma: &mut BTreeMap<Var, Term>, x: &Var, t: Term) -> Option<()> {
    if occurs(x, &t) {
        return None;
    }
    let single = BTreeMap::from([(x.clone(), t.clone())]);
    for v in sigma.values_mut() {
        *v = naive_apply(&single, v);
    }
    sigma.insert(x.clone(), t);
    Some(())
}

fn occurs(x: &Var, t: &Term) -> bool {
    match t {
        Term::Var(y) => x == y,
        Term::App(_, args) => args.iter().any(|a| occurs(x, a)),
    }
}

pub fn naive_apply(sigma: &BTreeMap<Var, Term>, t: &Term) -> Term {
    match t {
        Term::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| naive_apply(sigma, a)).collect()),
    }
}

/// Terms over `f/2`, `g/1`, `a`, `b` and variables `X`, `Y`, `L` with
/// indices `0..3`; at most six distinct symbols, depth at most `depth`.
pub fn term(depth: u32) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::constant("a")),
        Just(Term::constant("b")),
        (prop_oneof![Just("X"), Just("Y"), Just("L")], 0usize..3).prop_map(|(s, i)| Term::var(s, i)),
    ];
    leaf.prop_recursive(depth, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::app("f", vec![l, r])),
            inner.prop_map(|t| Term::app("g", vec![t])),
        ]
    })
}

pub fn equations(max: usize) -> impl Strategy<Value = Vec<Equation>> {
    prop::collection::vec((term(3), term(3)).prop_map(|(l, r)| Equation::new(l, r)), 1..=max)
}

/// Equations `t = tθ` sharing one `θ` from `X`/`L` variables to terms over
/// `Y`, so the set is unifiable by construction; the caller may perturb it.
pub fn planted_equations(max: usize) -> impl Strategy<Value = Vec<Equation>> {
    let lhs = term(3).prop_filter("no Y", |t| t.vars().iter().all(|v| &*v.sym != "Y"));
    let image = term(2).prop_map(|t| {
        t.map_vars(&mut |v| Term::var("Y", v.idx))
    });
    (
        prop::collection::vec(lhs, 1..=max),
        prop::collection::btree_map((prop_oneof![Just("X"), Just("L")], 0usize..3), image, 0..6),
    )
        .prop_map(|(ts, theta)| {
            let theta: BTreeMap<Var, Term> =
                theta.into_iter().map(|((s, i), t)| (Var::new(s, i), t)).collect();
            ts.into_iter()
                .map(|t| {
                    let r = naive_apply(&theta, &t);
                    Equation::new(t, r)
                })
                .collect()
        })
}

/// Roughly even mix of arbitrary and unifiable-by-construction sets, with
/// an occasional extra random equation on the planted side.
pub fn mixed_equations(max: usize) -> impl Strategy<Value = Vec<Equation>> {
    prop_oneof![
        equations(max),
        planted_equations(max),
        (planted_equations(max), (term(2), term(2))).prop_map(|(mut eqs, (l, r))| {
            eqs.push(Equation::new(l, r));
            eqs
        }),
    ]
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus() -> Vec<(String, ProblemFile)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "prob"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let text = std::fs::read_to_string(&p).unwrap();
            let file = parse_problem(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, file)
        })
        .collect()
}

pub fn t(s: &str) -> Term {
    schematic::parse_term(s).unwrap()
}

pub fn eq(l: &str, r: &str) -> Equation {
    Equation::new(t(l), t(r))
}
