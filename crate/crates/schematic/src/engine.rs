//! Θ-unification: saturate an equation set under orientation,
//! decomposition, symmetry and transitivity, then move every equation
//! relevant to later instances into the store.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::schema::Schema;
use crate::subst::{unify, FailureKind, UnifyError};
use crate::term::{Equation, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Orient1,
    Decompose,
    Orient2,
    Transitive,
    Store,
}

/// One rule application, for tracing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleEvent {
    pub rule: Rule,
    pub consumed: Vec<Equation>,
    pub produced: Vec<Equation>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    Failed(UnifyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalConfiguration {
    pub store: BTreeSet<Equation>,
    pub active: BTreeSet<Equation>,
    pub verdict: Verdict,
    pub rule_applications: usize,
}

impl FinalConfiguration {
    pub fn is_ok(&self) -> bool {
        self.verdict == Verdict::Ok
    }

    pub fn failure(&self) -> Option<&UnifyError> {
        match &self.verdict {
            Verdict::Ok => None,
            Verdict::Failed(e) => Some(e),
        }
    }
}

pub fn orient1(eq: &Equation) -> Equation {
    eq.flip()
}

/// Argument-wise equations of `f(r..) = f(s..)`, reflexive ones dropped.
pub fn decompose(eq: &Equation) -> Vec<Equation> {
    eq.lhs
        .args()
        .iter()
        .zip(eq.rhs.args())
        .filter(|(a, b)| a != b)
        .map(|(a, b)| Equation::new(a.clone(), b.clone()))
        .collect()
}

/// `r = s` from `x = r` and `x = s`, or nothing when `r == s`.
pub fn transitive(e1: &Equation, e2: &Equation) -> Option<Equation> {
    debug_assert_eq!(e1.lhs, e2.lhs);
    (e1.rhs != e2.rhs).then(|| Equation::new(e1.rhs.clone(), e2.rhs.clone()))
}

fn is_clash(eq: &Equation) -> bool {
    match (eq.lhs.head(), eq.rhs.head()) {
        (Some(a), Some(b)) => a != b,
        _ => false,
    }
}

/// Decides the store conditions for bindings against a fixed store snapshot.
pub struct StoreOracle<'a> {
    schema: &'a Schema,
    /// Parameters reachable by unfolding a schema variable of the store.
    reachable: BTreeSet<Var>,
    /// Variables occurring on some right-hand side of the store.
    rhs_vars: BTreeSet<Var>,
    lhs: BTreeSet<Term>,
}

impl<'a> StoreOracle<'a> {
    pub fn new(schema: &'a Schema, store: &BTreeSet<Equation>, bound: usize) -> Self {
        let mut reachable = BTreeSet::new();
        let mut rhs_vars = BTreeSet::new();
        let mut schema_vars = BTreeSet::new();
        for e in store {
            e.rhs.for_each_var(&mut |v| {
                rhs_vars.insert(v.clone());
            });
            e.for_each_var(&mut |v| {
                if schema.contains(v) {
                    schema_vars.insert(v.clone());
                }
            });
        }
        for z in &schema_vars {
            reachable.extend(schema.reachable_parameters(z, bound));
        }
        StoreOracle {
            schema,
            reachable,
            rhs_vars,
            lhs: store.iter().map(|e| e.lhs.clone()).collect(),
        }
    }

    pub fn eligible(&self, eq: &Equation) -> bool {
        let Term::Var(y) = &eq.lhs else { return false };
        if self.schema.contains(y) {
            return match &eq.rhs {
                Term::Var(r) => self.schema.contains(r),
                Term::App(..) => true,
            };
        }
        self.rhs_vars.contains(y)
            || self.lhs.contains(&eq.lhs)
            || self.lhs.contains(&eq.rhs)
            || self.reachable.contains(y)
    }
}

/// Whether `eq` may be moved into `store`.
pub fn store_eligible(schema: &Schema, store: &BTreeSet<Equation>, eq: &Equation) -> bool {
    let bound = eq.lhs.as_var().map_or(0, |v| v.idx);
    StoreOracle::new(schema, store, bound).eligible(eq)
}

#[derive(Default)]
struct State {
    store: BTreeSet<Equation>,
    active: BTreeSet<Equation>,
    changes: BTreeSet<Equation>,
    var_dict: BTreeMap<Var, BTreeSet<Equation>>,
    orient1: VecDeque<Equation>,
    decom: VecDeque<Equation>,
    orient2: VecDeque<Equation>,
    trans: VecDeque<(Equation, Equation)>,
    applications: usize,
}

impl State {
    fn add(&mut self, eq: Equation, produced: &mut Vec<Equation>) {
        if !self.active.contains(&eq) {
            self.active.insert(eq.clone());
            self.changes.insert(eq.clone());
            produced.push(eq);
        }
    }

    fn update(&mut self) -> Result<bool, UnifyError> {
        if let Some(eq) = self.changes.iter().find(|e| is_clash(e)) {
            return Err(UnifyError {
                kind: FailureKind::Clash,
                equation: eq.clone(),
            });
        }
        for eq in std::mem::take(&mut self.changes) {
            match (&eq.lhs, &eq.rhs) {
                (Term::App(..), Term::Var(_)) => self.orient1.push_back(eq.clone()),
                (Term::App(..), Term::App(..)) => self.decom.push_back(eq.clone()),
                (Term::Var(_), Term::Var(_)) if !self.active.contains(&eq.flip()) => {
                    self.orient2.push_back(eq.clone())
                }
                _ => {}
            }
            if let Term::Var(x) = &eq.lhs {
                let seen = self.var_dict.entry(x.clone()).or_default();
                if !seen.contains(&eq) {
                    for other in seen.iter() {
                        self.trans.push_back((eq.clone(), other.clone()));
                    }
                    seen.insert(eq);
                }
            }
        }
        Ok(!(self.orient1.is_empty()
            && self.decom.is_empty()
            && self.orient2.is_empty()
            && self.trans.is_empty()))
    }
}

/// Runs Θ-unification on `eqs`.
pub fn th_unif<'a>(
    eqs: impl IntoIterator<Item = &'a Equation>,
    schema: &Schema,
) -> FinalConfiguration {
    th_unif_traced(eqs, schema, &mut |_| {})
}

/// As [`th_unif`], reporting every rule application to `sink`.
pub fn th_unif_traced<'a>(
    eqs: impl IntoIterator<Item = &'a Equation>,
    schema: &Schema,
    sink: &mut dyn FnMut(RuleEvent),
) -> FinalConfiguration {
    let mut st = State::default();
    for e in eqs {
        if !e.is_reflexive() {
            st.active.insert(e.clone());
        }
    }
    st.changes = st.active.clone();

    loop {
        match st.update() {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return failed(st, e),
        }
        while let Some(eq) = st.orient1.pop_front() {
            if !st.active.remove(&eq) {
                continue;
            }
            let mut produced = Vec::new();
            st.add(orient1(&eq), &mut produced);
            st.applications += 1;
            sink(RuleEvent {
                rule: Rule::Orient1,
                consumed: vec![eq],
                produced,
            });
        }
        while let Some(eq) = st.decom.pop_front() {
            if !st.active.remove(&eq) {
                continue;
            }
            let mut produced = Vec::new();
            for e in decompose(&eq) {
                st.add(e, &mut produced);
            }
            st.applications += 1;
            sink(RuleEvent {
                rule: Rule::Decompose,
                consumed: vec![eq],
                produced,
            });
        }
        while let Some(eq) = st.orient2.pop_front() {
            let flip = eq.flip();
            if !st.active.contains(&eq) || st.active.contains(&flip) {
                continue;
            }
            let mut produced = Vec::new();
            st.add(flip, &mut produced);
            st.applications += 1;
            sink(RuleEvent {
                rule: Rule::Orient2,
                consumed: vec![eq],
                produced,
            });
        }
        while let Some((e1, e2)) = st.trans.pop_front() {
            let mut produced = Vec::new();
            if let Some(e) = transitive(&e1, &e2) {
                st.add(e, &mut produced);
            }
            st.applications += 1;
            sink(RuleEvent {
                rule: Rule::Transitive,
                consumed: vec![e1, e2],
                produced,
            });
        }
    }

    let bound = st
        .active
        .iter()
        .filter_map(|e| e.lhs.as_var().map(|v| v.idx))
        .max()
        .unwrap_or(0);
    loop {
        let oracle = StoreOracle::new(schema, &st.store, bound);
        let batch: Vec<Equation> = st
            .active
            .iter()
            .filter(|e| oracle.eligible(e))
            .cloned()
            .collect();
        if batch.is_empty() {
            break;
        }
        for eq in batch {
            st.active.remove(&eq);
            st.store.insert(eq.clone());
            st.applications += 1;
            sink(RuleEvent {
                rule: Rule::Store,
                consumed: vec![eq],
                produced: Vec::new(),
            });
        }
    }

    match unify(st.store.iter().chain(st.active.iter())) {
        Ok(_) => FinalConfiguration {
            store: st.store,
            active: st.active,
            verdict: Verdict::Ok,
            rule_applications: st.applications,
        },
        Err(e) => failed(st, e),
    }
}

fn failed(st: State, e: UnifyError) -> FinalConfiguration {
    FinalConfiguration {
        store: st.store,
        active: st.active,
        verdict: Verdict::Failed(e),
        rule_applications: st.applications,
    }
}
