//! Core term syntax: sorts, terms, contexts, and the three primitive
//! operations everything else is built from — free variables, capture-avoiding
//! substitution, and alpha-equivalence.
//!
//! Terms use named binders. Equality of terms (`PartialEq`) is
//! alpha-equivalence, so two terms that differ only in bound names compare
//! equal everywhere in the crate.

use std::collections::BTreeSet;
use std::fmt;

/// An identifier: a non-empty string of letters, digits, underscores, and the
/// reserved marker character `'`. The marker is only ever introduced by
/// machine-generated names (fresh variants and derived translation names);
/// hand-written files stick to letters, digits, and underscores.
pub type Ident = String;

/// The two sorts of the framework. `Kind` classifies `Type` and the function
/// kinds built over it; `Kind` itself has no type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sort {
    Type,
    Kind,
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Type => write!(f, "TYPE"),
            Sort::Kind => write!(f, "KIND"),
        }
    }
}

/// A term of the framework.
///
/// `Hole` is a dedicated metavariable used only by the translation machinery
/// (the placeholder inside a translated kind); it must never reach the
/// typechecker or appear in any value returned to callers outside the
/// translation module.
#[derive(Debug, Clone)]
pub enum Term {
    Sort(Sort),
    Var(Ident),
    Const(Ident),
    App(Box<Term>, Box<Term>),
    /// `Lam(x, ann, body)` is `\ (x : ann). body`.
    Lam(Ident, Box<Term>, Box<Term>),
    /// `Pi(x, dom, cod)` is `(x : dom) -> cod`; when `x` does not occur in
    /// `cod` this is the plain arrow `dom -> cod`.
    Pi(Ident, Box<Term>, Box<Term>),
    Hole,
}

/// Term equality is alpha-equivalence.
impl PartialEq for Term {
    fn eq(&self, other: &Self) -> bool {
        alpha_equal(self, other)
    }
}

impl Eq for Term {}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

/// `TYPE`.
pub fn ty() -> Term {
    Term::Sort(Sort::Type)
}

/// `KIND`.
pub fn kind() -> Term {
    Term::Sort(Sort::Kind)
}

pub fn var(x: impl Into<Ident>) -> Term {
    Term::Var(x.into())
}

pub fn cst(c: impl Into<Ident>) -> Term {
    Term::Const(c.into())
}

pub fn app(f: Term, a: Term) -> Term {
    Term::App(Box::new(f), Box::new(a))
}

/// Left-nested application of `head` to all of `args`.
pub fn apps(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
    args.into_iter().fold(head, app)
}

pub fn lam(x: impl Into<Ident>, ann: Term, body: Term) -> Term {
    Term::Lam(x.into(), Box::new(ann), Box::new(body))
}

pub fn pi(x: impl Into<Ident>, dom: Term, cod: Term) -> Term {
    Term::Pi(x.into(), Box::new(dom), Box::new(cod))
}

/// Non-dependent function type `dom -> cod`: a product whose binder is chosen
/// fresh so that it cannot occur in `cod`.
pub fn arrow(dom: Term, cod: Term) -> Term {
    let avoid = free_variables(&cod);
    let x = fresh_name("_x", &avoid);
    pi(x, dom, cod)
}

impl Term {
    /// Decompose an application spine: `f a b c` yields `(f, [a, b, c])`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut head = self;
        let mut args = Vec::new();
        while let Term::App(f, a) = head {
            args.push(a.as_ref());
            head = f.as_ref();
        }
        args.reverse();
        (head, args)
    }

    /// True if any subterm is the translation placeholder `Hole`.
    pub fn contains_hole(&self) -> bool {
        match self {
            Term::Hole => true,
            Term::Sort(_) | Term::Var(_) | Term::Const(_) => false,
            Term::App(f, a) => f.contains_hole() || a.contains_hole(),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => a.contains_hole() || b.contains_hole(),
        }
    }

    /// True if any subterm is a sort (`TYPE` or `KIND`).
    pub fn contains_sort(&self) -> bool {
        match self {
            Term::Sort(_) => true,
            Term::Var(_) | Term::Const(_) | Term::Hole => false,
            Term::App(f, a) => f.contains_sort() || a.contains_sort(),
            Term::Lam(_, a, b) | Term::Pi(_, a, b) => a.contains_sort() || b.contains_sort(),
        }
    }

    /// Every identifier that occurs anywhere in the term: variables (free or
    /// bound, including binder names) and constants alike. Used for collision
    /// checks by the translation.
    pub fn identifiers(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Term::Sort(_) | Term::Hole => {}
            Term::Var(x) | Term::Const(x) => {
                out.insert(x.clone());
            }
            Term::App(f, a) => {
                f.identifiers(out);
                a.identifiers(out);
            }
            Term::Lam(x, a, b) | Term::Pi(x, a, b) => {
                out.insert(x.clone());
                a.identifiers(out);
                b.identifiers(out);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

/// The set of variables occurring free in `t`.
pub fn free_variables(t: &Term) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

fn collect_free(t: &Term, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
    match t {
        Term::Sort(_) | Term::Const(_) | Term::Hole => {}
        Term::Var(x) => {
            if !bound.iter().any(|b| b == x) {
                out.insert(x.clone());
            }
        }
        Term::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Term::Lam(x, a, b) | Term::Pi(x, a, b) => {
            collect_free(a, bound, out);
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
    }
}

/// Number of free occurrences of the variable `x` in `t`.
pub fn count_free_occurrences(t: &Term, x: &str) -> usize {
    fn go(t: &Term, x: &str, depth_shadowed: bool) -> usize {
        match t {
            Term::Var(y) => usize::from(!depth_shadowed && y == x),
            Term::Sort(_) | Term::Const(_) | Term::Hole => 0,
            Term::App(f, a) => go(f, x, depth_shadowed) + go(a, x, depth_shadowed),
            Term::Lam(y, a, b) | Term::Pi(y, a, b) => {
                go(a, x, depth_shadowed) + go(b, x, depth_shadowed || y == x)
            }
        }
    }
    go(t, x, false)
}

/// True if `x` occurs free anywhere under a binder in `t` (any binder, not
/// only binders over `x`). Used to keep rewrite patterns first-order.
pub fn occurs_free_under_binder(t: &Term, x: &str) -> bool {
    fn inside(t: &Term, x: &str, under: bool, shadowed: bool) -> bool {
        match t {
            Term::Var(y) => under && !shadowed && y == x,
            Term::Sort(_) | Term::Const(_) | Term::Hole => false,
            Term::App(f, a) => inside(f, x, under, shadowed) || inside(a, x, under, shadowed),
            Term::Lam(y, a, b) | Term::Pi(y, a, b) => {
                inside(a, x, true, shadowed) || inside(b, x, true, shadowed || y == x)
            }
        }
    }
    inside(t, x, false, false)
}

// ---------------------------------------------------------------------------
// Fresh names
// ---------------------------------------------------------------------------

/// Deterministic fresh-name generation: the smallest prime-suffixed variant of
/// `base` (that is, `base`, `base'`, `base''`, ...) that is not in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Ident>) -> Ident {
    if !avoid.contains(base) {
        return base.to_string();
    }
    let mut candidate = String::from(base);
    loop {
        candidate.push('\'');
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
}

// ---------------------------------------------------------------------------
// Alpha-equivalence
// ---------------------------------------------------------------------------

/// Structural equality up to renaming of bound variables. Sorts, constants,
/// free variables, and `Hole` must match exactly.
pub fn alpha_equal(t: &Term, u: &Term) -> bool {
    fn go(t: &Term, u: &Term, pairs: &mut Vec<(Ident, Ident)>) -> bool {
        match (t, u) {
            (Term::Sort(a), Term::Sort(b)) => a == b,
            (Term::Hole, Term::Hole) => true,
            (Term::Const(c), Term::Const(d)) => c == d,
            (Term::Var(x), Term::Var(y)) => {
                // Find the innermost binding of either side; both must be
                // bound at the same position, or both free with equal names.
                for (l, r) in pairs.iter().rev() {
                    let lhit = l == x;
                    let rhit = r == y;
                    if lhit || rhit {
                        return lhit && rhit;
                    }
                }
                x == y
            }
            (Term::App(f1, a1), Term::App(f2, a2)) => go(f1, f2, pairs) && go(a1, a2, pairs),
            (Term::Lam(x, a1, b1), Term::Lam(y, a2, b2))
            | (Term::Pi(x, a1, b1), Term::Pi(y, a2, b2)) => {
                if !go(a1, a2, pairs) {
                    return false;
                }
                pairs.push((x.clone(), y.clone()));
                let ok = go(b1, b2, pairs);
                pairs.pop();
                ok
            }
            _ => false,
        }
    }
    go(t, u, &mut Vec::new())
}

// ---------------------------------------------------------------------------
// Substitution
// ---------------------------------------------------------------------------

/// A simultaneous substitution of terms for free variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: std::collections::BTreeMap<Ident, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(x: impl Into<Ident>, t: Term) -> Self {
        let mut s = Self::new();
        s.insert(x.into(), t);
        s
    }

    pub fn insert(&mut self, x: Ident, t: Term) {
        self.map.insert(x, t);
    }

    pub fn get(&self, x: &str) -> Option<&Term> {
        self.map.get(x)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Ident> {
        self.map.keys()
    }

    /// The substitution with `x` removed from the domain (what applies under
    /// a binder over `x`).
    fn without(&self, x: &str) -> Substitution {
        let mut s = self.clone();
        s.map.remove(x);
        s
    }
}

impl FromIterator<(Ident, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Ident, Term)>>(iter: I) -> Self {
        Substitution {
            map: iter.into_iter().collect(),
        }
    }
}

/// Capture-avoiding simultaneous substitution. Binders that would capture a
/// free variable of the substituted terms are renamed to the smallest
/// prime-suffixed variant not already in use; the choice is deterministic, so
/// equal inputs always produce identical (not merely alpha-equal) outputs.
pub fn substitute(t: &Term, s: &Substitution) -> Term {
    if s.is_empty() {
        return t.clone();
    }
    match t {
        Term::Sort(_) | Term::Const(_) | Term::Hole => t.clone(),
        Term::Var(x) => s.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::App(f, a) => app(substitute(f, s), substitute(a, s)),
        Term::Lam(x, ann, body) => {
            let ann = substitute(ann, s);
            let (x, body) = substitute_under_binder(x, body, s);
            Term::Lam(x, Box::new(ann), Box::new(body))
        }
        Term::Pi(x, dom, cod) => {
            let dom = substitute(dom, s);
            let (x, cod) = substitute_under_binder(x, cod, s);
            Term::Pi(x, Box::new(dom), Box::new(cod))
        }
    }
}

fn substitute_under_binder(x: &Ident, body: &Term, s: &Substitution) -> (Ident, Term) {
    let inner = s.without(x);
    // Only entries whose variable actually occurs in the body matter, both
    // for the capture check and for the result.
    let body_free = free_variables(body);
    let relevant: Vec<(&Ident, &Term)> = inner
        .iter()
        .filter(|(v, _)| body_free.contains(*v))
        .collect();
    if relevant.is_empty() {
        return (x.clone(), body.clone());
    }
    let mut range_free = BTreeSet::new();
    for (_, t) in &relevant {
        range_free.extend(free_variables(t));
    }
    if !range_free.contains(x) {
        return (x.clone(), substitute(body, &inner));
    }
    // The binder would capture a free variable of an incoming term: rename it
    // away from everything in sight before substituting.
    let mut avoid = range_free;
    avoid.extend(body_free);
    avoid.extend(relevant.iter().map(|(v, _)| (*v).clone()));
    avoid.insert(x.clone());
    let fresh = fresh_name(x, &avoid);
    let mut renamed = inner;
    renamed.insert(x.clone(), var(fresh.clone()));
    (fresh, substitute(body, &renamed))
}

// ---------------------------------------------------------------------------
// Contexts
// ---------------------------------------------------------------------------

/// An ordered typing context `x1 : A1, ..., xn : An`. Later entries may refer
/// to earlier variables; names are pairwise distinct once checked.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Context {
    entries: Vec<(Ident, Term)>,
}

impl Context {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<(Ident, Term)>) -> Self {
        Context { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Ident, Term)> {
        self.entries.iter()
    }

    pub fn binds(&self, x: &str) -> bool {
        self.entries.iter().any(|(n, _)| n == x)
    }

    /// The type of `x`, if bound.
    pub fn lookup(&self, x: &str) -> Option<&Term> {
        self.entries
            .iter()
            .rev()
            .find(|(n, _)| n == x)
            .map(|(_, t)| t)
    }

    pub fn push(&mut self, x: Ident, ty: Term) {
        self.entries.push((x, ty));
    }

    /// A copy of the context extended with one entry.
    pub fn extended(&self, x: Ident, ty: Term) -> Context {
        let mut c = self.clone();
        c.push(x, ty);
        c
    }

    /// All names bound by the context.
    pub fn names(&self) -> BTreeSet<Ident> {
        self.entries.iter().map(|(n, _)| n.clone()).collect()
    }
}

impl FromIterator<(Ident, Term)> for Context {
    fn from_iter<I: IntoIterator<Item = (Ident, Term)>>(iter: I) -> Self {
        Context {
            entries: iter.into_iter().collect(),
        }
    }
}
