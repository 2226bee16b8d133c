//! The decision procedure for uniform schematic unification problems.
//!
//! Instance `i+1` is never built directly: its store is recomputed from the
//! store of instance `i` under the step substitution. Bindings that fall out
//! of the store accumulate in the irrelevant set, which is checked for
//! occurs-cycles on every step. The loop stops once the normalized store of
//! some instance is a variable renaming of an earlier one.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::engine::{th_unif, FinalConfiguration};
use crate::schema::{make_primitive, Primitivized, Schema, SchemaError};
use crate::subst::{unify, FailureKind, Substitution, UnifyError};
use crate::term::{max_depth_of, max_index_of, vars_of, Equation, Symbol, Term, Var};

/// Equations plus the schema generating their instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchematicProblem {
    pub equations: BTreeSet<Equation>,
    pub schema: Schema,
}

impl SchematicProblem {
    pub fn new(equations: impl IntoIterator<Item = Equation>, schema: Schema) -> Self {
        SchematicProblem {
            equations: equations.into_iter().collect(),
            schema,
        }
    }

    /// The `i`-th instance problem.
    pub fn instance(&self, i: usize) -> BTreeSet<Equation> {
        self.equations
            .iter()
            .map(|e| e.map(|t| self.schema.instance(t, i)))
            .collect()
    }
}

/// Everything the procedure computed for one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceRecord {
    pub i: usize,
    pub store: BTreeSet<Equation>,
    pub active: BTreeSet<Equation>,
    pub normalized_store: BTreeSet<Equation>,
    /// `normalized_store` under `eq_sub`, reflexive equations removed.
    pub reduced_store: BTreeSet<Equation>,
    /// Cumulative irrelevant set.
    pub irr: BTreeSet<Equation>,
    pub irr_vars: BTreeSet<Var>,
    pub step_sub: Substitution,
    pub eq_sub: Substitution,
    pub fr: BTreeSet<Var>,
    /// `|vars(reduced_store)| - |irr_vars|`.
    pub metric: i64,
    /// `|vars(U(i))| - |dom(eq_sub)| - |irr_vars|`, counted over the
    /// instance problem itself.
    pub listed_metric: i64,
    /// Stability ratio of `metric`, once the stability index is reached.
    pub stab_ratio: Option<f64>,
    /// The same ratio computed from `listed_metric`.
    pub listed_ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cause {
    Clash,
    Cycle,
    IrrCycle,
}

impl std::fmt::Display for Cause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Cause::Clash => "clash",
            Cause::Cycle => "occurs cycle",
            Cause::IrrCycle => "occurs cycle among irrelevant bindings",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Cycle {
        i: usize,
        j: usize,
        mapping: Substitution,
        store_i: BTreeSet<Equation>,
        eq_sub_i: Substitution,
        store_j: BTreeSet<Equation>,
        eq_sub_j: Substitution,
        irr_i: BTreeSet<Equation>,
    },
    NotUnifiable {
        instance: usize,
        cause: Cause,
        equation: Equation,
    },
    StabilityViolation {
        instance: usize,
    },
    Exhausted {
        cap: usize,
    },
}

impl Outcome {
    pub fn name(&self) -> &'static str {
        match self {
            Outcome::Cycle { .. } => "cycle",
            Outcome::NotUnifiable { .. } => "not_unifiable",
            Outcome::StabilityViolation { .. } => "stability_violation",
            Outcome::Exhausted { .. } => "exhausted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub records: Vec<InstanceRecord>,
    /// `None` when instance 0 already failed.
    pub stab_index: Option<usize>,
    pub primitive: Primitivized,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Instance cap; defaults to `10 * (stab + |dom| + |U|)`.
    pub max_iterations: Option<usize>,
}

/// One-step unfoldings of every schema variable in the store.
pub fn step_substitution(store: &BTreeSet<Equation>, schema: &Schema) -> Substitution {
    vars_of(store)
        .into_iter()
        .filter_map(|x| schema.binding(&x).map(|b| (x, b)))
        .collect()
}

/// Bindings left in the active set whose variable is not a schema variable.
pub fn irrelevant_set(
    _store: &BTreeSet<Equation>,
    active: &BTreeSet<Equation>,
    schema: &Schema,
) -> BTreeSet<Equation> {
    active
        .iter()
        .filter(|e| e.lhs.as_var().is_some_and(|v| !schema.contains(v)))
        .cloned()
        .collect()
}

/// Unfolds the schema variables on the right of `irr` far enough to expose
/// any occurs-cycle, then unifies.
pub fn cycle_check(irr: &BTreeSet<Equation>, schema: &Schema) -> Result<(), UnifyError> {
    let rhs_schema_vars = |eqs: &BTreeSet<Equation>| -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        for e in eqs {
            e.rhs.for_each_var(&mut |v| {
                if schema.contains(v) {
                    out.insert(v.clone());
                }
            });
        }
        out
    };
    let r = rhs_schema_vars(irr);
    let Some(r_min) = r.iter().map(|v| v.idx).min() else {
        return unify(irr).map(|_| ());
    };
    let i_max = irr
        .iter()
        .filter_map(|e| e.lhs.as_var().map(|v| v.idx))
        .max()
        .unwrap_or(0);
    let gap = (i_max + 1).saturating_sub(r_min);
    let mut cur = irr.clone();
    for _ in 0..gap {
        let step: Substitution = rhs_schema_vars(&cur)
            .into_iter()
            .filter_map(|x| schema.binding(&x).map(|b| (x, b)))
            .collect();
        cur = step.apply_set(&cur);
    }
    unify(&cur).map(|_| ())
}

/// Variables of the irrelevant set that are neither schema variables nor
/// mentioned by the store.
pub fn irrelevant_vars(
    irr: &BTreeSet<Equation>,
    store: &BTreeSet<Equation>,
    schema: &Schema,
) -> BTreeSet<Var> {
    let in_store = vars_of(store);
    vars_of(irr)
        .into_iter()
        .filter(|x| !schema.contains(x) && !in_store.contains(x))
        .collect()
}

/// The collapsing substitution for variable-equality classes of the store,
/// and the future-relevant variables.
pub fn compute_eq_fr(
    store: &BTreeSet<Equation>,
    step_sub: &Substitution,
    schema: &Schema,
) -> (Substitution, BTreeSet<Var>) {
    // Union of symmetric pairs x = y, y = x.
    let mut adj: BTreeMap<Var, BTreeSet<Var>> = BTreeMap::new();
    for e in store {
        if let (Term::Var(x), Term::Var(y)) = (&e.lhs, &e.rhs) {
            if store.contains(&e.flip()) {
                adj.entry(x.clone()).or_default().insert(y.clone());
                adj.entry(y.clone()).or_default().insert(x.clone());
            }
        }
    }
    let mut eq_sub = Substitution::new();
    let mut done: BTreeSet<Var> = BTreeSet::new();
    for start in adj.keys() {
        if done.contains(start) {
            continue;
        }
        let mut class = BTreeSet::from([start.clone()]);
        let mut todo = vec![start.clone()];
        while let Some(v) = todo.pop() {
            for w in &adj[&v] {
                if class.insert(w.clone()) {
                    todo.push(w.clone());
                }
            }
        }
        let rep = class
            .iter()
            .max_by(|a, b| a.idx.cmp(&b.idx).then_with(|| b.sym.cmp(&a.sym)))
            .expect("nonempty class")
            .clone();
        for v in &class {
            eq_sub.insert(v.clone(), Term::Var(rep.clone()));
        }
        done.extend(class);
    }

    let reach: Vec<(usize, BTreeSet<Symbol>)> = step_sub
        .dom()
        .map(|y| {
            let syms = schema
                .base(&y.sym)
                .map(|b| b.var_sets().0)
                .unwrap_or_default();
            (y.idx, syms)
        })
        .collect();
    let fr = vars_of(store)
        .into_iter()
        .filter(|x| !schema.contains(x))
        .filter(|x| reach.iter().any(|(i, syms)| x.idx >= *i && syms.contains(&x.sym)))
        .collect();
    (eq_sub, fr)
}

/// `max(maxI, depth)` over instance 0 under its step substitution.
pub fn stab_index(eqs: &BTreeSet<Equation>, step0: &Substitution) -> usize {
    let applied = step0.apply_set(eqs);
    max_index_of(&applied).unwrap_or(0).max(max_depth_of(&applied))
}

/// Searches for a symbol-preserving variable map `μ` with `ns1 μ = ns2`,
/// sending future-relevant variables to future-relevant variables and
/// fixing shared variables. Variables are assigned in `(symbol, index)`
/// order; the first complete map found is returned.
pub fn check_for_map(
    fr1: &BTreeSet<Var>,
    ns1: &BTreeSet<Equation>,
    fr2: &BTreeSet<Var>,
    ns2: &BTreeSet<Equation>,
) -> Option<Substitution> {
    if ns1.len() < ns2.len() {
        return None;
    }
    let v1: Vec<Var> = vars_of(ns1).into_iter().collect();
    let v2 = vars_of(ns2);
    let pos: BTreeMap<&Var, usize> = v1.iter().enumerate().map(|(k, v)| (v, k)).collect();

    // Each equation is checked as soon as its last variable is assigned.
    let mut ready: Vec<Vec<&Equation>> = vec![Vec::new(); v1.len()];
    for e in ns1 {
        let mut last = None;
        e.for_each_var(&mut |v| last = last.max(Some(pos[v])));
        match last {
            Some(k) => ready[k].push(e),
            None if !ns2.contains(e) => return None,
            None => {}
        }
    }

    let candidates: Vec<Vec<Var>> = v1
        .iter()
        .map(|x| {
            let fr_ok = |y: &Var| !fr1.contains(x) || fr2.contains(y);
            if v2.contains(x) {
                if fr_ok(x) {
                    vec![x.clone()]
                } else {
                    Vec::new()
                }
            } else {
                v2.iter()
                    .filter(|y| y.sym == x.sym && fr_ok(y))
                    .cloned()
                    .collect()
            }
        })
        .collect();

    let mut search = MapSearch {
        v1: &v1,
        candidates: &candidates,
        ready: &ready,
        ns1,
        ns2,
        assignment: BTreeMap::new(),
    };
    search
        .go(0)
        .then(|| search.assignment.into_iter().collect())
}

struct MapSearch<'a> {
    v1: &'a [Var],
    candidates: &'a [Vec<Var>],
    ready: &'a [Vec<&'a Equation>],
    ns1: &'a BTreeSet<Equation>,
    ns2: &'a BTreeSet<Equation>,
    assignment: BTreeMap<Var, Term>,
}

impl MapSearch<'_> {
    fn image(&self, e: &Equation) -> Equation {
        e.map(|t| {
            t.map_vars(&mut |v| {
                self.assignment
                    .get(v)
                    .cloned()
                    .unwrap_or_else(|| Term::Var(v.clone()))
            })
        })
    }

    // Every assigned equation already lands in ns2; at the leaf the images
    // must also cover it.
    fn go(&mut self, k: usize) -> bool {
        if k == self.v1.len() {
            let images: BTreeSet<Equation> = self.ns1.iter().map(|e| self.image(e)).collect();
            return &images == self.ns2;
        }
        let candidates = self.candidates;
        for y in &candidates[k] {
            self.assignment
                .insert(self.v1[k].clone(), Term::Var(y.clone()));
            if self.ready[k].iter().all(|e| self.ns2.contains(&self.image(e))) && self.go(k + 1) {
                return true;
            }
        }
        self.assignment.remove(&self.v1[k]);
        false
    }
}

/// Per-variable disjointness: no shared variable is future relevant on either
/// side, and the future-relevant sets are disjoint.
pub fn var_disjoint(
    fr1: &BTreeSet<Var>,
    ns1: &BTreeSet<Equation>,
    fr2: &BTreeSet<Var>,
    ns2: &BTreeSet<Equation>,
) -> bool {
    let v2 = vars_of(ns2);
    let shared_fr = vars_of(ns1)
        .into_iter()
        .any(|x| v2.contains(&x) && (fr1.contains(&x) || fr2.contains(&x)));
    !shared_fr && fr1.is_disjoint(fr2)
}

fn not_unifiable(instance: usize, err: UnifyError) -> Outcome {
    Outcome::NotUnifiable {
        instance,
        cause: match err.kind {
            FailureKind::Clash => Cause::Clash,
            FailureKind::Cycle => Cause::Cycle,
        },
        equation: err.equation,
    }
}

fn record(
    i: usize,
    fc: FinalConfiguration,
    irr: BTreeSet<Equation>,
    instance_vars: usize,
    schema: &Schema,
) -> InstanceRecord {
    let step_sub = step_substitution(&fc.store, schema);
    let (eq_sub, fr) = compute_eq_fr(&fc.store, &step_sub, schema);
    let normalized_store: BTreeSet<Equation> =
        fc.store.iter().map(|e| schema.normalize_eq(e)).collect();
    let reduced_store: BTreeSet<Equation> = eq_sub
        .apply_set(&normalized_store)
        .into_iter()
        .filter(|e| !e.is_reflexive())
        .collect();
    let irr_vars = irrelevant_vars(&irr, &fc.store, schema);
    let metric = vars_of(&reduced_store).len() as i64 - irr_vars.len() as i64;
    let listed_metric = instance_vars as i64 - eq_sub.len() as i64 - irr_vars.len() as i64;
    InstanceRecord {
        i,
        store: fc.store,
        active: fc.active,
        normalized_store,
        reduced_store,
        irr,
        irr_vars,
        step_sub,
        eq_sub,
        fr,
        metric,
        listed_metric,
        stab_ratio: None,
        listed_ratio: None,
    }
}

/// Decides a uniform schematic unification problem.
pub fn u_sch_unif(
    problem: &SchematicProblem,
    opts: SolveOptions,
) -> Result<SolveReport, SchemaError> {
    let primitive = make_primitive(&problem.equations, &problem.schema)?;
    let schema = &primitive.schema;
    let mut records: Vec<InstanceRecord> = Vec::new();
    let finish = |outcome, records, stab_index, primitive| {
        Ok(SolveReport {
            outcome,
            records,
            stab_index,
            primitive,
        })
    };

    let fc = th_unif(&primitive.equations, schema);
    if let Some(err) = fc.failure() {
        let outcome = not_unifiable(0, err.clone());
        return finish(outcome, records, None, primitive.clone());
    }
    let irr0 = irrelevant_set(&fc.store, &fc.active, schema);
    let mut instance = primitive.equations.clone();
    records.push(record(0, fc, irr0, vars_of(&instance).len(), schema));
    let s = stab_index(&primitive.equations, &records[0].step_sub);
    let cap = opts
        .max_iterations
        .unwrap_or(10 * (s + schema.rules().len() + primitive.equations.len()));

    let mut i = 0;
    loop {
        i += 1;
        if i > cap {
            return finish(Outcome::Exhausted { cap }, records, Some(s), primitive.clone());
        }
        let prev = &records[i - 1];
        let input = prev.step_sub.apply_set(&prev.store);
        let fc = th_unif(&input, schema);
        if let Some(err) = fc.failure() {
            let outcome = not_unifiable(i, err.clone());
            return finish(outcome, records, Some(s), primitive.clone());
        }
        let mut irr = prev.step_sub.apply_set(&prev.irr);
        irr.extend(irrelevant_set(&fc.store, &fc.active, schema));
        if let Err(err) = cycle_check(&irr, schema) {
            let outcome = Outcome::NotUnifiable {
                instance: i,
                cause: Cause::IrrCycle,
                equation: err.equation,
            };
            return finish(outcome, records, Some(s), primitive.clone());
        }
        instance = instance.iter().map(|e| e.map(|t| schema.unfold(t))).collect();
        let mut rec = record(i, fc, irr, vars_of(&instance).len(), schema);

        if i >= s {
            let prefix = &records[..s.min(records.len())];
            let (stable, ratio) = stability(prefix.iter().map(|r| r.metric), rec.metric, i == s);
            rec.stab_ratio = ratio;
            rec.listed_ratio =
                stability(prefix.iter().map(|r| r.listed_metric), rec.listed_metric, i == s).1;
            records.push(rec);
            if !stable {
                return finish(
                    Outcome::StabilityViolation { instance: i },
                    records,
                    Some(s),
                    primitive.clone(),
                );
            }
            let cur = &records[i];
            for j in 0..i {
                let old = &records[j];
                let Some(mapping) =
                    check_for_map(&cur.fr, &cur.reduced_store, &old.fr, &old.reduced_store)
                else {
                    continue;
                };
                if cycle_disjoint(cur, old) {
                    let outcome = Outcome::Cycle {
                        i,
                        j,
                        mapping,
                        store_i: cur.store.clone(),
                        eq_sub_i: cur.eq_sub.clone(),
                        store_j: old.store.clone(),
                        eq_sub_j: old.eq_sub.clone(),
                        irr_i: cur.irr.clone(),
                    };
                    return finish(outcome, records, Some(s), primitive.clone());
                }
            }
        } else {
            records.push(rec);
        }
    }
}

/// `min_k value / m_k` over the metrics `m_k` of the instances up to the
/// stability index (including the current one when it is that index);
/// zero denominators are skipped. If every denominator is zero the
/// instance is stable iff its own value is non-positive.
fn stability(prefix: impl Iterator<Item = i64>, value: i64, include_self: bool) -> (bool, Option<f64>) {
    let ratio = prefix
        .chain(include_self.then_some(value))
        .filter(|&m| m != 0)
        .map(|m| value as f64 / m as f64)
        .min_by(f64::total_cmp);
    match ratio {
        Some(r) => (r <= 1.0, Some(r)),
        None => (value <= 0, None),
    }
}

/// Besides the set conditions on the reduced stores, the stores themselves
/// must share no variable: a shared variable links the two instances, so
/// the later one is not a fresh repetition of the earlier one.
fn cycle_disjoint(a: &InstanceRecord, b: &InstanceRecord) -> bool {
    var_disjoint(&a.fr, &a.reduced_store, &b.fr, &b.reduced_store)
        && vars_of(&a.store).is_disjoint(&vars_of(&b.store))
}
