//! Substitution schemas over indexed variables.
//!
//! A schema maps a symbol `X` to a base term; the binding for `X[j]` is the
//! base shifted by `j`. Bases are stored at shift 0, so a surface rule
//! `L[i] -> f(X[i+1], L[i+1])` is stored as `L -> f(X[1], L[1])`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::subst::Substitution;
use crate::term::{Equation, Symbol, Term, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemaClass {
    NotSimple,
    Simple,
    Uniform,
    Primitive,
}

impl SchemaClass {
    pub fn is_uniform(self) -> bool {
        self >= SchemaClass::Uniform
    }
}

impl fmt::Display for SchemaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemaClass::NotSimple => "not simple",
            SchemaClass::Simple => "simple",
            SchemaClass::Uniform => "uniform",
            SchemaClass::Primitive => "primitive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("symbol {0} is not in the domain of the schema")]
    UnknownSymbol(Symbol),
    #[error("schema is {0}; only uniform schemas are supported")]
    NotUniform(SchemaClass),
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Schema {
    rules: BTreeMap<Symbol, Term>,
}

impl Schema {
    pub fn new(rules: impl IntoIterator<Item = (Symbol, Term)>) -> Self {
        Schema {
            rules: rules.into_iter().collect(),
        }
    }

    pub fn rules(&self) -> &BTreeMap<Symbol, Term> {
        &self.rules
    }

    pub fn base(&self, sym: &str) -> Option<&Term> {
        self.rules.get(sym)
    }

    pub fn in_domain(&self, sym: &str) -> bool {
        self.rules.contains_key(sym)
    }

    /// `x ∈ Θ`: the variable's symbol is a domain symbol.
    pub fn contains(&self, x: &Var) -> bool {
        self.in_domain(&x.sym)
    }

    pub fn is_schema_term(&self, t: &Term) -> bool {
        t.as_var().is_some_and(|v| self.contains(v))
    }

    pub fn domain(&self) -> impl Iterator<Item = &Symbol> {
        self.rules.keys()
    }

    /// The image of `x` when `x` is in the domain.
    pub fn binding(&self, x: &Var) -> Option<Term> {
        self.rules.get(&x.sym).map(|b| b.shift(x.idx))
    }

    /// Every variable symbol occurring in some base term.
    pub fn base_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for b in self.rules.values() {
            b.for_each_var(&mut |v| {
                out.insert(v.sym.clone());
            });
        }
        out
    }

    /// Symbols occurring in bases that are not themselves domain symbols.
    pub fn parameter_symbols(&self) -> BTreeSet<Symbol> {
        self.base_symbols()
            .into_iter()
            .filter(|s| !self.in_domain(s))
            .collect()
    }

    pub fn recursion_offsets(&self, sym: &str) -> Result<BTreeSet<usize>, SchemaError> {
        let base = self
            .rules
            .get(sym)
            .ok_or_else(|| SchemaError::UnknownSymbol(sym.into()))?;
        let mut out = BTreeSet::new();
        base.for_each_var(&mut |v| {
            if &*v.sym == sym {
                out.insert(v.idx);
            }
        });
        Ok(out)
    }

    pub fn classify(&self) -> SchemaClass {
        let simple = self.rules.values().all(|b| {
            let mut dom_syms = BTreeSet::new();
            b.for_each_var(&mut |v| {
                if self.in_domain(&v.sym) {
                    dom_syms.insert(v.sym.clone());
                }
            });
            dom_syms.len() <= 1
        });
        if !simple {
            return SchemaClass::NotSimple;
        }
        let offsets: Vec<BTreeSet<usize>> = self
            .rules
            .keys()
            .map(|s| self.recursion_offsets(s).expect("domain symbol"))
            .collect();
        if offsets.iter().any(|r| r.len() > 1) {
            return SchemaClass::Simple;
        }
        if offsets.iter().any(|r| r.iter().any(|&i| i > 1)) {
            return SchemaClass::Uniform;
        }
        SchemaClass::Primitive
    }

    /// Restriction of the schema to the domain variables occurring in `t`.
    pub fn t_substitution(&self, t: &Term) -> Substitution {
        t.vars()
            .into_iter()
            .filter_map(|x| self.binding(&x).map(|b| (x, b)))
            .collect()
    }

    /// One unfolding step: every domain variable replaced by its binding.
    pub fn unfold(&self, t: &Term) -> Term {
        t.map_vars(&mut |v| self.binding(v).unwrap_or_else(|| Term::Var(v.clone())))
    }

    /// The `i`-th instance of `t`.
    pub fn instance(&self, t: &Term, i: usize) -> Term {
        let mut cur = t.clone();
        for _ in 0..i {
            cur = self.unfold(&cur);
        }
        cur
    }

    /// Parameter variables (non-domain) reachable from `start` by unfolding,
    /// restricted to indices `<= bound`. Domain variables only generate
    /// variables with indices at least their own, so the search is finite and
    /// exact for every parameter up to `bound`.
    pub fn reachable_parameters(&self, start: &Var, bound: usize) -> BTreeSet<Var> {
        let mut params = BTreeSet::new();
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(z) = queue.pop_front() {
            if z.idx > bound || !seen.insert(z.clone()) {
                continue;
            }
            let Some(b) = self.binding(&z) else { continue };
            b.for_each_var(&mut |v| {
                if self.contains(v) {
                    queue.push_back(v.clone());
                } else if v.idx <= bound {
                    params.insert(v.clone());
                }
            });
        }
        params
    }

    /// Folds unfoldings of domain variables back into the variable,
    /// innermost first.
    pub fn normalize(&self, t: &Term) -> Term {
        match t {
            Term::Var(_) => t.clone(),
            Term::App(h, args) => {
                let node = if args.is_empty() {
                    t.clone()
                } else {
                    Term::App(h.clone(), args.iter().map(|a| self.normalize(a)).collect())
                };
                for (sym, base) in &self.rules {
                    if let Some(d) = shift_match(base, &node) {
                        return Term::var(sym.clone(), d);
                    }
                }
                node
            }
        }
    }

    pub fn normalize_eq(&self, e: &Equation) -> Equation {
        Equation::new(e.lhs.clone(), self.normalize(&e.rhs))
    }
}

/// The `d` with `shift(d, base) == t`, if any. Ground and variable bases are
/// never matched: the shift is undetermined for the former and the latter
/// would fold every variable of that symbol.
fn shift_match(base: &Term, t: &Term) -> Option<usize> {
    fn go(b: &Term, t: &Term, d: &mut Option<usize>) -> bool {
        match (b, t) {
            (Term::Var(x), Term::Var(y)) => {
                if x.sym != y.sym || y.idx < x.idx {
                    return false;
                }
                let k = y.idx - x.idx;
                match d {
                    Some(prev) => *prev == k,
                    None => {
                        *d = Some(k);
                        true
                    }
                }
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                f == g && fa.len() == ga.len() && fa.iter().zip(ga.iter()).all(|(a, b)| go(a, b, d))
            }
            _ => false,
        }
    }
    if base.is_var() {
        return None;
    }
    let mut d = None;
    if go(base, t, &mut d) {
        d
    } else {
        None
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (sym, base) in &self.rules {
            writeln!(f, "{sym}[i] -> {};", crate::io::render_base(base))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Result of turning a uniform problem into a primitive one.
#[derive(Debug, Clone)]
pub struct Primitivized {
    pub equations: BTreeSet<Equation>,
    pub schema: Schema,
    /// The composed renaming without its domain bindings.
    pub sigma: Substitution,
}

/// Rewrites a uniform schema so every recursion offset is at most 1.
///
/// For a symbol `X` recurring at offset `m > 1`, `X[m]` becomes `X[1]` and
/// each parameter occurrence `Z[m*l + k]` (across all bases) becomes
/// `Z@k[l]`. Symbols are processed largest offset first, ties broken by
/// symbol order.
pub fn make_primitive(
    eqs: &BTreeSet<Equation>,
    xi: &Schema,
) -> Result<Primitivized, SchemaError> {
    let class = xi.classify();
    if !class.is_uniform() {
        return Err(SchemaError::NotUniform(class));
    }
    let mut used: BTreeSet<Symbol> = xi.base_symbols();
    used.extend(xi.domain().cloned());
    for e in eqs {
        e.for_each_var(&mut |v| {
            used.insert(v.sym.clone());
        });
    }

    let mut schema = xi.clone();
    let mut total = Substitution::new();
    loop {
        let mut pick: Option<(usize, Symbol)> = None;
        for sym in schema.domain() {
            let r = schema.recursion_offsets(sym)?;
            if let Some(&m) = r.iter().next() {
                if r.len() == 1 && m > 1 && pick.as_ref().is_none_or(|(pm, _)| m > *pm) {
                    pick = Some((m, sym.clone()));
                }
            }
        }
        let Some((m, x)) = pick else { break };

        let base_x = schema.base(&x).expect("picked from domain");
        let params: BTreeSet<Symbol> = base_x
            .vars()
            .into_iter()
            .map(|v| v.sym)
            .filter(|s| *s != x)
            .collect();

        let mut sigma = Substitution::new();
        sigma.insert(Var::new(x.clone(), m), Term::var(x.clone(), 1));
        let mut fresh: BTreeMap<(Symbol, usize), Symbol> = BTreeMap::new();
        let all_vars: BTreeSet<Var> = schema.rules.values().flat_map(|b| b.vars()).collect();
        for v in all_vars.iter().filter(|v| params.contains(&v.sym)) {
            let (l, k) = (v.idx / m, v.idx % m);
            let name = fresh
                .entry((v.sym.clone(), k))
                .or_insert_with(|| fresh_symbol(&v.sym, k, &mut used))
                .clone();
            sigma.insert(v.clone(), Term::var(name, l));
        }

        schema = Schema::new(
            schema
                .rules
                .iter()
                .map(|(s, b)| (s.clone(), sigma.apply(b))),
        );
        total = total.compose(&sigma);
    }

    let sigma = total.restrict(|x| !xi.contains(x));
    let equations = eqs.iter().map(|e| sigma.apply_eq(e)).collect();
    Ok(Primitivized {
        equations,
        schema,
        sigma,
    })
}

fn fresh_symbol(sym: &str, k: usize, used: &mut BTreeSet<Symbol>) -> Symbol {
    let mut name: Symbol = format!("{sym}@{k}").into();
    let mut c = 1;
    while used.contains(&name) {
        name = format!("{sym}@{k}_{c}").into();
        c += 1;
    }
    used.insert(name.clone());
    name
}
