//! Substitutions and syntactic unification with occurs check.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::term::{Equation, Term, Var};

/// A finite substitution. Self-bindings are never stored.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    map: BTreeMap<Var, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, x: Var, t: Term) {
        if t.as_var() == Some(&x) {
            self.map.remove(&x);
        } else {
            self.map.insert(x, t);
        }
    }

    pub fn get(&self, x: &Var) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn contains(&self, x: &Var) -> bool {
        self.map.contains_key(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn dom(&self) -> impl Iterator<Item = &Var> {
        self.map.keys()
    }

    pub fn ran(&self) -> impl Iterator<Item = &Term> {
        self.map.values()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.map.iter()
    }

    /// Simultaneous replacement.
    pub fn apply(&self, t: &Term) -> Term {
        if self.map.is_empty() {
            return t.clone();
        }
        t.map_vars(&mut |v| self.map.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone())))
    }

    pub fn apply_eq(&self, e: &Equation) -> Equation {
        e.map(|t| self.apply(t))
    }

    pub fn apply_set(&self, eqs: &BTreeSet<Equation>) -> BTreeSet<Equation> {
        eqs.iter().map(|e| self.apply_eq(e)).collect()
    }

    /// `x(self·other) = (x self) other` for every variable `x`.
    pub fn compose(&self, other: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (x, t) in &self.map {
            out.insert(x.clone(), other.apply(t));
        }
        for (x, t) in &other.map {
            if !self.map.contains_key(x) {
                out.insert(x.clone(), t.clone());
            }
        }
        out
    }

    pub fn restrict(&self, keep: impl Fn(&Var) -> bool) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(x, _)| keep(x))
                .map(|(x, t)| (x.clone(), t.clone()))
                .collect(),
        }
    }

    pub fn to_string_map(&self) -> BTreeMap<String, String> {
        self.map
            .iter()
            .map(|(x, t)| (x.to_string(), t.to_string()))
            .collect()
    }
}

impl FromIterator<(Var, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Var, Term)>>(iter: I) -> Self {
        let mut s = Substitution::new();
        for (x, t) in iter {
            s.insert(x, t);
        }
        s
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (x, t)) in self.map.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x} -> {t}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Clash,
    Cycle,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailureKind::Clash => "clash",
            FailureKind::Cycle => "cycle",
        })
    }
}

/// Why unification failed, with the equation that exposed it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at {equation}")]
pub struct UnifyError {
    pub kind: FailureKind,
    pub equation: Equation,
}

/// Most general unifier of a set of equations, or the reason none exists.
///
/// Martelli–Montanari style: equations are processed in the given order and
/// solved bindings are kept in triangular form until the end, when they are
/// resolved into an idempotent substitution.
pub fn unify<'a>(eqs: impl IntoIterator<Item = &'a Equation>) -> Result<Substitution, UnifyError> {
    let mut solver = Solver::default();
    let mut stack: Vec<(Term, Term)> = eqs
        .into_iter()
        .map(|e| (e.lhs.clone(), e.rhs.clone()))
        .collect();
    stack.reverse();
    while let Some((s, t)) = stack.pop() {
        let s = solver.walk(&s);
        let t = solver.walk(&t);
        match (&s, &t) {
            _ if s == t => {}
            (Term::Var(x), _) => solver.bind(x, &t)?,
            (_, Term::Var(y)) => solver.bind(y, &s)?,
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g || fa.len() != ga.len() {
                    return Err(UnifyError {
                        kind: FailureKind::Clash,
                        equation: Equation::new(s.clone(), t.clone()),
                    });
                }
                for (a, b) in fa.iter().zip(ga.iter()).rev() {
                    stack.push((a.clone(), b.clone()));
                }
            }
        }
    }
    Ok(solver.resolve_all())
}

pub fn unifiable<'a>(eqs: impl IntoIterator<Item = &'a Equation>) -> bool {
    unify(eqs).is_ok()
}

#[derive(Default)]
struct Solver {
    bound: HashMap<Var, Term>,
    order: Vec<Var>,
}

impl Solver {
    fn walk(&self, t: &Term) -> Term {
        let mut cur = t;
        while let Term::Var(v) = cur {
            match self.bound.get(v) {
                Some(next) => cur = next,
                None => break,
            }
        }
        cur.clone()
    }

    fn bind(&mut self, x: &Var, t: &Term) -> Result<(), UnifyError> {
        let mut seen = BTreeSet::new();
        if self.occurs(x, t, &mut seen) {
            return Err(UnifyError {
                kind: FailureKind::Cycle,
                equation: Equation::new(Term::Var(x.clone()), t.clone()),
            });
        }
        self.bound.insert(x.clone(), t.clone());
        self.order.push(x.clone());
        Ok(())
    }

    // `seen` holds bound variables already explored, so shared bindings are
    // walked once.
    fn occurs(&self, x: &Var, t: &Term, seen: &mut BTreeSet<Var>) -> bool {
        match t {
            Term::Var(v) if v == x => true,
            Term::Var(v) => match self.bound.get(v) {
                Some(next) if seen.insert(v.clone()) => self.occurs(x, next, seen),
                _ => false,
            },
            Term::App(_, args) => args.iter().any(|a| self.occurs(x, a, seen)),
        }
    }

    fn resolve_all(&self) -> Substitution {
        let mut memo: HashMap<Var, Term> = HashMap::new();
        let mut out = Substitution::new();
        for x in &self.order {
            let t = self.resolve(&Term::Var(x.clone()), &mut memo);
            out.insert(x.clone(), t);
        }
        out
    }

    fn resolve(&self, t: &Term, memo: &mut HashMap<Var, Term>) -> Term {
        match t {
            Term::Var(v) => {
                if let Some(r) = memo.get(v) {
                    return r.clone();
                }
                let r = match self.bound.get(v) {
                    Some(next) => self.resolve(next, memo),
                    None => t.clone(),
                };
                memo.insert(v.clone(), r.clone());
                r
            }
            Term::App(h, args) if args.is_empty() => Term::App(h.clone(), args.clone()),
            Term::App(h, args) => {
                Term::App(h.clone(), args.iter().map(|a| self.resolve(a, memo)).collect())
            }
        }
    }
}
