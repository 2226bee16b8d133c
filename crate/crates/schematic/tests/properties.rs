mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{equations, mixed_equations, naive_apply, naive_unify, term};
use proptest::prelude::*;
use schematic::oracle::bounded_check;
use schematic::{
    make_primitive, parse_problem, th_unif, unify, Equation, SchemaClass, SchematicProblem,
    Term, Var,
};

fn schema_l() -> schematic::Schema {
    parse_problem("schema: L[i] -> f(X[i], L[i+1]); problem: a = a;")
        .unwrap()
        .schema
}

/// Parameter terms over `X`, `Z` with indices `0..=max_idx`.
fn param_term(max_idx: usize) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        Just(Term::constant("c")),
        (prop_oneof![Just("X"), Just("Z")], 0..=max_idx).prop_map(|(s, i)| Term::var(s, i)),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        (inner.clone(), inner).prop_map(|(l, r)| Term::app("f", vec![l, r]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shift_composes(t in term(4), a in 0usize..5, b in 0usize..5) {
        prop_assert_eq!(t.shift(a).shift(b), t.shift(a + b));
        prop_assert_eq!(t.shift(0), t.clone());
        let shifted: BTreeSet<Var> = t.vars().iter().map(|v| v.shift(a)).collect();
        prop_assert_eq!(t.shift(a).vars(), shifted);
    }

    #[test]
    fn mgu_agrees_with_naive_unifier(eqs in mixed_equations(4)) {
        let ours = unify(&eqs);
        let naive = naive_unify(&eqs);
        prop_assert_eq!(ours.is_ok(), naive.is_some());
        if let (Ok(sigma), Some(theta)) = (ours, naive) {
            for e in &eqs {
                prop_assert_eq!(sigma.apply(&e.lhs), sigma.apply(&e.rhs));
                let once = sigma.apply(&e.lhs);
                prop_assert_eq!(sigma.apply(&once), once);
            }
            // theta is a unifier, so it must factor through sigma
            for x in schematic::term::vars_of(&eqs) {
                let v = Term::Var(x);
                prop_assert_eq!(naive_apply(&theta, &sigma.apply(&v)), naive_apply(&theta, &v));
            }
        }
    }

    #[test]
    fn mgu_is_most_general_over_ground_universe(eqs in equations(2)) {
        let vars: Vec<Var> = schematic::term::vars_of(&eqs).into_iter().collect();
        prop_assume!(vars.len() <= 3);
        let universe = [
            Term::constant("a"),
            Term::constant("b"),
            Term::app("g", vec![Term::constant("a")]),
            Term::app("f", vec![Term::constant("a"), Term::constant("b")]),
        ];
        let result = unify(&eqs);
        let mut assignment = vec![0usize; vars.len()];
        loop {
            let theta: BTreeMap<Var, Term> = vars
                .iter()
                .cloned()
                .zip(assignment.iter().map(|&k| universe[k].clone()))
                .collect();
            let solves = eqs.iter().all(|e| naive_apply(&theta, &e.lhs) == naive_apply(&theta, &e.rhs));
            if solves {
                let sigma = result.as_ref().expect("a ground solution exists, so unify must succeed");
                for x in &vars {
                    let v = Term::Var(x.clone());
                    prop_assert_eq!(naive_apply(&theta, &sigma.apply(&v)), naive_apply(&theta, &v));
                }
            }
            let mut k = 0;
            while k < assignment.len() && assignment[k] + 1 == universe.len() {
                assignment[k] = 0;
                k += 1;
            }
            if k == assignment.len() {
                break;
            }
            assignment[k] += 1;
        }
    }

    #[test]
    fn store_equations_have_variable_lhs(eqs in mixed_equations(4)) {
        let fc = th_unif(&eqs, &schema_l());
        if !fc.is_ok() {
            return Ok(());
        }
        for e in fc.store.iter().chain(fc.active.iter()) {
            prop_assert!(e.lhs.is_var(), "{}", e);
        }
    }

    #[test]
    fn normalize_inverts_unfold(p in param_term(1), q in param_term(1), d in 0usize..=5, k in 0usize..=4) {
        let base = Term::app("h", vec![p, Term::var("L", 1), q]);
        let schema = schematic::Schema::new([("L".into(), base)]);
        prop_assert_eq!(schema.classify(), SchemaClass::Primitive);
        let l = Term::var("L", d);
        prop_assert_eq!(schema.normalize(&schema.instance(&l, k)), l);
    }

    #[test]
    fn make_primitive_preserves_instance_verdicts(
        p in param_term(4),
        m in 2usize..=3,
        rhs in param_term(3),
        extra in param_term(3),
    ) {
        let base = Term::app("h", vec![p, Term::var("L", m)]);
        let schema = schematic::Schema::new([("L".into(), base)]);
        prop_assume!(schema.classify() == SchemaClass::Uniform);
        let eqs: BTreeSet<Equation> = [
            Equation::new(Term::var("L", 0), Term::app("h", vec![rhs, Term::var("Y", 0)])),
            Equation::new(Term::var("X", 1), extra),
        ]
        .into();
        let prim = make_primitive(&eqs, &schema).unwrap();
        prop_assert_eq!(prim.schema.classify(), SchemaClass::Primitive);
        let before = bounded_check(&SchematicProblem::new(eqs.clone(), schema), 6, 50_000);
        let after = bounded_check(&SchematicProblem::new(prim.equations, prim.schema), 6, 50_000);
        let n = before.results.len().min(after.results.len());
        for i in 0..n {
            prop_assert_eq!(
                matches!(before.results[i], schematic::oracle::InstanceResult::Unifiable),
                matches!(after.results[i], schematic::oracle::InstanceResult::Unifiable),
                "instance {}", i
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1200))]

    #[test]
    fn theta_unification_agrees_with_unify(eqs in mixed_equations(4)) {
        let fc = th_unif(&eqs, &schema_l());
        prop_assert_eq!(fc.is_ok(), unify(&eqs).is_ok());
    }
}
