//! Indexed first-order terms.
//!
//! Variables carry a symbol and a natural-number index (`X[3]`); function
//! applications carry a head symbol and an argument list. Constants are
//! applications with no arguments.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub type Symbol = Arc<str>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub sym: Symbol,
    pub idx: usize,
}

impl Var {
    pub fn new(sym: impl Into<Symbol>, idx: usize) -> Self {
        Var {
            sym: sym.into(),
            idx,
        }
    }

    pub fn shift(&self, d: usize) -> Var {
        Var {
            sym: self.sym.clone(),
            idx: self.idx + d,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.sym, self.idx)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A term. The derived ordering is the canonical order used for every
/// set of terms and equations in the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    App(Symbol, Arc<[Term]>),
}

/// A position: a path of 1-based argument numbers from the root.
pub type Position = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("position {position:?} is not a position of {term}")]
pub struct InvalidPosition {
    pub position: Position,
    pub term: Term,
}

impl Term {
    pub fn var(sym: impl Into<Symbol>, idx: usize) -> Term {
        Term::Var(Var::new(sym, idx))
    }

    pub fn app(head: impl Into<Symbol>, args: Vec<Term>) -> Term {
        Term::App(head.into(), args.into())
    }

    pub fn constant(name: impl Into<Symbol>) -> Term {
        Term::App(name.into(), Arc::from(Vec::new()))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    /// Head symbol and arity of an application.
    pub fn head(&self) -> Option<(&Symbol, usize)> {
        match self {
            Term::Var(_) => None,
            Term::App(f, args) => Some((f, args.len())),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// Adds `d` to the index of every variable.
    pub fn shift(&self, d: usize) -> Term {
        if d == 0 {
            return self.clone();
        }
        self.map_vars(&mut |v| Term::Var(v.shift(d)))
    }

    /// Rebuilds the term with every variable leaf replaced by `f(var)`.
    pub fn map_vars(&self, f: &mut impl FnMut(&Var) -> Term) -> Term {
        match self {
            Term::Var(v) => f(v),
            Term::App(h, args) if args.is_empty() => Term::App(h.clone(), args.clone()),
            Term::App(h, args) => {
                Term::App(h.clone(), args.iter().map(|a| a.map_vars(f)).collect())
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Number of nodes, i.e. `|pos(t)|`.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Node count that gives up once it passes `cap`; returns `None` then.
    pub fn size_capped(&self, cap: usize) -> Option<usize> {
        fn go(t: &Term, budget: &mut usize) -> bool {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            t.args().iter().all(|a| go(a, budget))
        }
        let mut budget = cap;
        go(self, &mut budget).then(|| cap - budget)
    }

    pub fn subterm_at(&self, p: &[usize]) -> Result<&Term, InvalidPosition> {
        let mut cur = self;
        for &i in p {
            match cur {
                Term::App(_, args) if i >= 1 && i <= args.len() => cur = &args[i - 1],
                _ => {
                    return Err(InvalidPosition {
                        position: p.to_vec(),
                        term: self.clone(),
                    })
                }
            }
        }
        Ok(cur)
    }

    /// All positions in pre-order, starting with the root.
    pub fn positions(&self) -> Vec<Position> {
        fn go(t: &Term, prefix: &mut Position, out: &mut Vec<Position>) {
            out.push(prefix.clone());
            for (i, a) in t.args().iter().enumerate() {
                prefix.push(i + 1);
                go(a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn subterms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_subterms(&mut out);
        out
    }

    fn collect_subterms(&self, out: &mut BTreeSet<Term>) {
        if out.insert(self.clone()) {
            for a in self.args() {
                a.collect_subterms(out);
            }
        }
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::App(_, args) => args.iter().for_each(|a| a.for_each_var(f)),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.for_each_var(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    pub fn contains_var(&self, x: &Var) -> bool {
        match self {
            Term::Var(v) => v == x,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    /// The symbols, indices and variables occurring in the term.
    pub fn var_sets(&self) -> (BTreeSet<Symbol>, BTreeSet<usize>, BTreeSet<Var>) {
        let vars = self.vars();
        let cls = vars.iter().map(|v| v.sym.clone()).collect();
        let idx = vars.iter().map(|v| v.idx).collect();
        (cls, idx, vars)
    }

    pub fn max_index(&self) -> Option<usize> {
        let mut m = None;
        self.for_each_var(&mut |v| m = m.max(Some(v.idx)));
        m
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(h, args) if args.is_empty() => write!(f, "{h}"),
            Term::App(h, args) => {
                write!(f, "{h}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A unification equation `lhs = rhs`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn flip(&self) -> Equation {
        Equation::new(self.rhs.clone(), self.lhs.clone())
    }

    pub fn is_reflexive(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn is_binding(&self) -> bool {
        self.lhs.is_var()
    }

    pub fn map(&self, mut f: impl FnMut(&Term) -> Term) -> Equation {
        Equation::new(f(&self.lhs), f(&self.rhs))
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&Var)) {
        self.lhs.for_each_var(f);
        self.rhs.for_each_var(f);
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn vars_of<'a>(eqs: impl IntoIterator<Item = &'a Equation>) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for e in eqs {
        e.for_each_var(&mut |v| {
            out.insert(v.clone());
        });
    }
    out
}

/// Largest variable index over a set of equations.
pub fn max_index_of<'a>(eqs: impl IntoIterator<Item = &'a Equation>) -> Option<usize> {
    eqs.into_iter()
        .flat_map(|e| [e.lhs.max_index(), e.rhs.max_index()])
        .max()
        .flatten()
}

/// Largest term depth over a set of equations.
pub fn max_depth_of<'a>(eqs: impl IntoIterator<Item = &'a Equation>) -> usize {
    eqs.into_iter()
        .map(|e| e.lhs.depth().max(e.rhs.depth()))
        .max()
        .unwrap_or(0)
}
