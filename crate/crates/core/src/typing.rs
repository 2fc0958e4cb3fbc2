//! Theories and the bidirectional typechecker.
//!
//! A [`Theory`] is an ordered list of constant declarations and rewrite
//! rules, elaborated one entry at a time: each entry may refer only to
//! constants declared before it, constant types are closed and well-sorted,
//! and rules are validated (constant-headed, left-linear, first-order,
//! sort-free, type-preserving under the annotated rule context) before they
//! are allowed to participate in conversion.
//!
//! When a theory is built on top of the built-in base signature, every user
//! constant must live in `TYPE` — object-level types are introduced through
//! the base signature's type codes instead of new `TYPE`-level constants, and
//! elaboration enforces that shape.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::rewrite::{
    convertible_fuel, whnf_fuel, Fuel, ReductionBudget, RewriteError, RewriteRule,
};
use crate::term::{
    count_free_occurrences, free_variables, fresh_name, occurs_free_under_binder, substitute,
    var, Context, Ident, Sort, Substitution, Term,
};

/// One entry of a theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    Const { name: Ident, ty: Term },
    Rule(RewriteRule),
}

/// A judgment `context |- subject : ty`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub context: Context,
    pub subject: Term,
    pub ty: Term,
}

/// An elaborated theory: checked entries plus lookup indices. Immutable once
/// built; construct one through [`Elaborator`].
#[derive(Debug, Clone, Default)]
pub struct Theory {
    entries: Vec<Entry>,
    /// Number of leading entries that belong to the built-in base signature
    /// (0 when the theory was elaborated raw).
    prelude_len: usize,
    const_index: BTreeMap<Ident, usize>,
    /// Rule entry indices grouped by head constant, in declaration order.
    head_rules: BTreeMap<Ident, Vec<usize>>,
}

impl Theory {
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Entries after the built-in base signature — the theory's own part.
    /// For a raw theory this is all entries.
    pub fn user_entries(&self) -> &[Entry] {
        &self.entries[self.prelude_len..]
    }

    pub fn prelude_included(&self) -> bool {
        self.prelude_len > 0
    }

    pub fn declares(&self, name: &str) -> bool {
        self.const_index.contains_key(name)
    }

    pub fn const_type(&self, name: &str) -> Option<&Term> {
        self.const_index.get(name).map(|&i| match &self.entries[i] {
            Entry::Const { ty, .. } => ty,
            Entry::Rule(_) => unreachable!("const_index points at a constant"),
        })
    }

    /// All declared constant names.
    pub fn const_names(&self) -> impl Iterator<Item = &Ident> {
        self.const_index.keys()
    }

    /// Rules whose left-hand side is headed by `name`, in declaration order.
    pub fn rules_for_head(&self, name: &str) -> impl Iterator<Item = &RewriteRule> {
        self.head_rules
            .get(name)
            .into_iter()
            .flatten()
            .map(|&i| match &self.entries[i] {
                Entry::Rule(r) => r,
                Entry::Const { .. } => unreachable!("head_rules points at a rule"),
            })
    }

    pub fn rules(&self) -> impl Iterator<Item = &RewriteRule> {
        self.entries.iter().filter_map(|e| match e {
            Entry::Rule(r) => Some(r),
            Entry::Const { .. } => None,
        })
    }

    /// If `name` was introduced by a definition (a constant accompanied by a
    /// closed rule `name --> body`), the body.
    pub fn definition_of(&self, name: &str) -> Option<&Term> {
        self.rules_for_head(name).find_map(|r| {
            if r.context.is_empty() && matches!(&r.lhs, Term::Const(c) if c == name) {
                Some(&r.rhs)
            } else {
                None
            }
        })
    }

    /// A copy of this theory with the base-signature marker cleared, so its
    /// every entry counts as user content (used when the base signature
    /// itself is the object of study).
    pub fn as_raw(&self) -> Theory {
        let mut t = self.clone();
        t.prelude_len = 0;
        t
    }

    /// Mark every entry elaborated so far as base-signature content; entries
    /// pushed afterwards count as user content.
    pub(crate) fn mark_prelude_boundary(&mut self) {
        self.prelude_len = self.entries.len();
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Typechecking failure.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Ident),
    #[error("unknown constant `{0}`")]
    UnknownConstant(Ident),
    #[error("term is applied but has no function type: `{applied}` has type `{ty}`")]
    NotAFunction { applied: String, ty: String },
    #[error("sort error: {0}")]
    SortError(String),
    #[error("type mismatch: expected `{expected}`, found `{found}`")]
    TypeMismatch { expected: String, found: String },
    #[error("the sort KIND has no type")]
    KindHasNoType,
    #[error("ill-formed context at `{name}`: {cause}")]
    IllFormedContext { name: Ident, cause: String },
    #[error("placeholder term reached the typechecker")]
    UnexpectedHole,
    #[error(transparent)]
    Budget(#[from] RewriteError),
}

/// Elaboration failure (entry-level structure on top of typechecking).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElabError {
    #[error("duplicate constant `{0}`")]
    DuplicateConstant(Ident),
    #[error("type of `{name}` is not closed: `{var}` occurs free")]
    NonClosedType { name: Ident, var: Ident },
    #[error("constant `{name}` declared after the base signature must inhabit TYPE, but its type lives in KIND")]
    PreludeViolation { name: Ident },
    #[error("rewrite rule head is not a constant")]
    HeadNotConstant,
    #[error("rule variable `{0}` occurs more than once in the pattern")]
    NonLinearPattern(Ident),
    #[error("rule variable `{0}` does not occur in the pattern")]
    UnusedRuleVariable(Ident),
    #[error("rule variable `{0}` occurs under a binder in the pattern (patterns are first-order)")]
    HigherOrderPattern(Ident),
    #[error("rewrite rule mentions a sort in its pattern or replacement")]
    RuleContainsSort,
    #[error("rule does not preserve types: pattern has type `{lhs_ty}`, replacement has type `{rhs_ty}`")]
    TypePreservationFailure { lhs_ty: String, rhs_ty: String },
    #[error("conversion assertion failed: `{lhs}` and `{rhs}` are not convertible")]
    AssertConvFailed { lhs: String, rhs: String },
    #[error("typing assertion failed: {0}")]
    AssertTypeFailed(TypeError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

fn show(t: &Term) -> String {
    crate::surface::print_term(t)
}

// ---------------------------------------------------------------------------
// The checker
// ---------------------------------------------------------------------------

/// Check that a context is well-formed over `sig`: names pairwise distinct,
/// every entry type a `TYPE`-sorted type in the preceding prefix.
pub fn check_context(sig: &Theory, ctx: &Context, budget: ReductionBudget) -> Result<(), TypeError> {
    let mut fuel = budget.fuel();
    check_context_fuel(sig, ctx, &mut fuel)
}

pub(crate) fn check_context_fuel(
    sig: &Theory,
    ctx: &Context,
    fuel: &mut Fuel,
) -> Result<(), TypeError> {
    let mut prefix = Context::new();
    for (name, ty) in ctx.iter() {
        if prefix.binds(name) {
            return Err(TypeError::IllFormedContext {
                name: name.clone(),
                cause: "name already bound".into(),
            });
        }
        check_type_fuel(sig, &prefix, ty, &Term::Sort(Sort::Type), fuel).map_err(|e| {
            TypeError::IllFormedContext {
                name: name.clone(),
                cause: e.to_string(),
            }
        })?;
        prefix.push(name.clone(), ty.clone());
    }
    Ok(())
}

/// Infer the type of `t` in `ctx` over `sig`.
pub fn infer_type(
    sig: &Theory,
    ctx: &Context,
    t: &Term,
    budget: ReductionBudget,
) -> Result<Term, TypeError> {
    let mut fuel = budget.fuel();
    infer_fuel(sig, ctx, t, &mut fuel)
}

pub(crate) fn infer_fuel(
    sig: &Theory,
    ctx: &Context,
    t: &Term,
    fuel: &mut Fuel,
) -> Result<Term, TypeError> {
    match t {
        Term::Sort(Sort::Type) => Ok(Term::Sort(Sort::Kind)),
        Term::Sort(Sort::Kind) => Err(TypeError::KindHasNoType),
        Term::Hole => Err(TypeError::UnexpectedHole),
        Term::Var(x) => ctx
            .lookup(x)
            .cloned()
            .ok_or_else(|| TypeError::UnboundVariable(x.clone())),
        Term::Const(c) => sig
            .const_type(c)
            .cloned()
            .ok_or_else(|| TypeError::UnknownConstant(c.clone())),
        Term::App(f, a) => {
            let fty = infer_fuel(sig, ctx, f, fuel)?;
            let fty = whnf_fuel(sig, &fty, fuel)?;
            match fty {
                Term::Pi(x, dom, cod) => {
                    check_type_fuel(sig, ctx, a, &dom, fuel)?;
                    Ok(substitute(&cod, &Substitution::singleton(x, (**a).clone())))
                }
                other => Err(TypeError::NotAFunction {
                    applied: show(f),
                    ty: show(&other),
                }),
            }
        }
        Term::Lam(x, ann, body) => {
            check_type_fuel(sig, ctx, ann, &Term::Sort(Sort::Type), fuel).map_err(|_| {
                TypeError::SortError(format!(
                    "abstraction annotation `{}` is not a type",
                    show(ann)
                ))
            })?;
            let (x, body) = freshen_binder(ctx, x, body);
            let inner = ctx.extended(x.clone(), (**ann).clone());
            let body_ty = infer_fuel(sig, &inner, &body, fuel)?;
            if matches!(body_ty, Term::Sort(Sort::Kind)) {
                return Err(TypeError::SortError(
                    "abstraction body is a kind; kinds cannot be abstracted".into(),
                ));
            }
            Ok(Term::Pi(x, ann.clone(), Box::new(body_ty)))
        }
        Term::Pi(x, dom, cod) => {
            check_type_fuel(sig, ctx, dom, &Term::Sort(Sort::Type), fuel).map_err(|_| {
                TypeError::SortError(format!("product domain `{}` is not a type", show(dom)))
            })?;
            let (x, cod) = freshen_binder(ctx, x, cod);
            let inner = ctx.extended(x, (**dom).clone());
            let cod_sort = infer_fuel(sig, &inner, &cod, fuel)?;
            match whnf_fuel(sig, &cod_sort, fuel)? {
                s @ Term::Sort(_) => Ok(s),
                other => Err(TypeError::SortError(format!(
                    "product codomain has type `{}`, which is not a sort",
                    show(&other)
                ))),
            }
        }
    }
}

/// Rename a binder away from the ambient context if its name is already
/// bound, so context names stay pairwise distinct.
fn freshen_binder(ctx: &Context, x: &Ident, body: &Term) -> (Ident, Term) {
    if !ctx.binds(x) {
        return (x.clone(), body.clone());
    }
    let mut avoid = ctx.names();
    avoid.extend(free_variables(body));
    avoid.insert(x.clone());
    let fx = fresh_name(x, &avoid);
    let body = substitute(body, &Substitution::singleton(x.clone(), var(fx.clone())));
    (fx, body)
}

/// Check `t` against `expected` in `ctx` over `sig`. The expected type must
/// itself be a sort or well-sorted; callers maintain that.
pub fn check_type(
    sig: &Theory,
    ctx: &Context,
    t: &Term,
    expected: &Term,
    budget: ReductionBudget,
) -> Result<(), TypeError> {
    let mut fuel = budget.fuel();
    check_type_fuel(sig, ctx, t, expected, &mut fuel)
}

pub(crate) fn check_type_fuel(
    sig: &Theory,
    ctx: &Context,
    t: &Term,
    expected: &Term,
    fuel: &mut Fuel,
) -> Result<(), TypeError> {
    // Abstractions check directly against a product, so their annotations
    // only need to be convertible with (not identical to) the domain.
    if let Term::Lam(x, ann, body) = t {
        let exp = whnf_fuel(sig, expected, fuel)?;
        if let Term::Pi(y, dom, cod) = exp {
            check_type_fuel(sig, ctx, ann, &Term::Sort(Sort::Type), fuel).map_err(|_| {
                TypeError::SortError(format!(
                    "abstraction annotation `{}` is not a type",
                    show(ann)
                ))
            })?;
            if !convertible_fuel(sig, ann, &dom, fuel)? {
                return Err(TypeError::TypeMismatch {
                    expected: show(&dom),
                    found: show(ann),
                });
            }
            let (x, body) = freshen_binder(ctx, x, body);
            let cod = substitute(&cod, &Substitution::singleton(y, var(x.clone())));
            let inner = ctx.extended(x, (**ann).clone());
            return check_type_fuel(sig, &inner, &body, &cod, fuel);
        }
    }
    let found = infer_fuel(sig, ctx, t, fuel)?;
    if convertible_fuel(sig, &found, expected, fuel)? {
        Ok(())
    } else {
        let expected_whnf = whnf_fuel(sig, expected, fuel)?;
        let found_whnf = whnf_fuel(sig, &found, fuel)?;
        Err(TypeError::TypeMismatch {
            expected: show(&expected_whnf),
            found: show(&found_whnf),
        })
    }
}

// ---------------------------------------------------------------------------
// Elaboration
// ---------------------------------------------------------------------------

/// Pre-elaboration entries, as produced by the surface syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawEntry {
    Const {
        name: Ident,
        ty: Term,
    },
    Rule {
        context: Context,
        lhs: Term,
        rhs: Term,
    },
    /// `def name : ty := body` — a constant plus the closed rule
    /// `name --> body`, checked before either is added.
    Def {
        name: Ident,
        ty: Term,
        body: Term,
    },
    /// `assert lhs == rhs` — conversion check, adds nothing.
    AssertConv(Term, Term),
    /// `assert t : ty` — typing check, adds nothing.
    AssertType(Term, Term),
}

/// Incremental theory builder: push entries one at a time, each fully checked
/// against what came before.
#[derive(Debug, Clone)]
pub struct Elaborator {
    theory: Theory,
    budget: ReductionBudget,
}

impl Elaborator {
    pub fn new(budget: ReductionBudget) -> Self {
        Elaborator {
            theory: Theory::default(),
            budget,
        }
    }

    /// Resume elaboration on top of an existing theory.
    pub fn from_theory(theory: Theory, budget: ReductionBudget) -> Self {
        Elaborator { theory, budget }
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn finish(self) -> Theory {
        self.theory
    }

    /// Append the already-elaborated base signature and mark everything after
    /// it as user content. Only valid while the theory is empty.
    pub fn include_prelude(&mut self) -> Result<(), ElabError> {
        assert!(
            self.theory.entries.is_empty(),
            "base signature must come before all other entries"
        );
        let prelude = crate::prelude::prelude_signature();
        self.theory = prelude.clone();
        self.theory.prelude_len = prelude.entries.len();
        Ok(())
    }

    pub fn push(&mut self, entry: RawEntry) -> Result<(), ElabError> {
        match entry {
            RawEntry::Const { name, ty } => self.push_const(name, ty),
            RawEntry::Rule { context, lhs, rhs } => self.push_rule(context, lhs, rhs),
            RawEntry::Def { name, ty, body } => self.push_def(name, ty, body),
            RawEntry::AssertConv(lhs, rhs) => self.check_assert_conv(&lhs, &rhs),
            RawEntry::AssertType(t, ty) => self.check_assert_type(&t, &ty),
        }
    }

    /// Declare `name : ty` after checking the declaration.
    pub fn push_const(&mut self, name: Ident, ty: Term) -> Result<(), ElabError> {
        if self.theory.declares(&name) {
            return Err(ElabError::DuplicateConstant(name));
        }
        if let Some(v) = free_variables(&ty).into_iter().next() {
            return Err(ElabError::NonClosedType { name, var: v });
        }
        let mut fuel = self.budget.fuel();
        let sort = infer_fuel(&self.theory, &Context::new(), &ty, &mut fuel)?;
        let sort = whnf_fuel(&self.theory, &sort, &mut fuel).map_err(TypeError::from)?;
        match sort {
            Term::Sort(Sort::Type) => {}
            Term::Sort(Sort::Kind) => {
                if self.theory.prelude_included() {
                    return Err(ElabError::PreludeViolation { name });
                }
            }
            other => {
                return Err(TypeError::SortError(format!(
                    "declared type of `{name}` has type `{}`, which is not a sort",
                    show(&other)
                ))
                .into())
            }
        }
        let idx = self.theory.entries.len();
        self.theory.entries.push(Entry::Const {
            name: name.clone(),
            ty,
        });
        self.theory.const_index.insert(name, idx);
        Ok(())
    }

    /// Validate and append a rewrite rule.
    pub fn push_rule(&mut self, context: Context, lhs: Term, rhs: Term) -> Result<(), ElabError> {
        let mut fuel = self.budget.fuel();
        check_context_fuel(&self.theory, &context, &mut fuel)?;
        let head = match lhs.spine().0 {
            Term::Const(c) => c.clone(),
            _ => return Err(ElabError::HeadNotConstant),
        };
        if lhs.contains_sort() || rhs.contains_sort() {
            return Err(ElabError::RuleContainsSort);
        }
        for (v, _) in context.iter() {
            match count_free_occurrences(&lhs, v) {
                0 => return Err(ElabError::UnusedRuleVariable(v.clone())),
                1 => {}
                _ => return Err(ElabError::NonLinearPattern(v.clone())),
            }
            if occurs_free_under_binder(&lhs, v) {
                return Err(ElabError::HigherOrderPattern(v.clone()));
            }
        }
        // A rule variable in head position (applied or bare at the head of a
        // sub-spine) would make matching higher-order.
        if let Some(v) = applied_rule_var(&lhs, &context) {
            return Err(ElabError::HigherOrderPattern(v));
        }
        let lhs_ty = infer_fuel(&self.theory, &context, &lhs, &mut fuel)?;
        let rhs_ty = infer_fuel(&self.theory, &context, &rhs, &mut fuel)?;
        if !convertible_fuel(&self.theory, &lhs_ty, &rhs_ty, &mut fuel).map_err(TypeError::from)? {
            return Err(ElabError::TypePreservationFailure {
                lhs_ty: show(&lhs_ty),
                rhs_ty: show(&rhs_ty),
            });
        }
        self.append_rule(RewriteRule { context, lhs, rhs }, head);
        Ok(())
    }

    /// `def name : ty := body`: the body is checked against the declared type
    /// before the constant exists (definitions cannot be recursive), then the
    /// constant and its unfolding rule are installed together.
    pub fn push_def(&mut self, name: Ident, ty: Term, body: Term) -> Result<(), ElabError> {
        if self.theory.declares(&name) {
            return Err(ElabError::DuplicateConstant(name));
        }
        if let Some(v) = free_variables(&body).into_iter().next() {
            return Err(ElabError::NonClosedType {
                name: name.clone(),
                var: v,
            });
        }
        if body.contains_sort() {
            // The body becomes a rewrite replacement, which must stay
            // sort-free.
            return Err(ElabError::RuleContainsSort);
        }
        if let Some(v) = free_variables(&ty).into_iter().next() {
            return Err(ElabError::NonClosedType { name, var: v });
        }
        let mut fuel = self.budget.fuel();
        // Validate the declared type before checking the body against it, so
        // an ill-formed annotation reports as such rather than as a mismatch.
        infer_fuel(&self.theory, &Context::new(), &ty, &mut fuel)?;
        check_type_fuel(&self.theory, &Context::new(), &body, &ty, &mut fuel)?;
        self.push_const(name.clone(), ty)?;
        self.append_rule(
            RewriteRule {
                context: Context::new(),
                lhs: Term::Const(name.clone()),
                rhs: body,
            },
            name,
        );
        Ok(())
    }

    fn append_rule(&mut self, rule: RewriteRule, head: Ident) {
        let idx = self.theory.entries.len();
        self.theory.entries.push(Entry::Rule(rule));
        self.theory.head_rules.entry(head).or_default().push(idx);
    }

    fn check_assert_conv(&self, lhs: &Term, rhs: &Term) -> Result<(), ElabError> {
        let mut fuel = self.budget.fuel();
        infer_fuel(&self.theory, &Context::new(), lhs, &mut fuel)?;
        infer_fuel(&self.theory, &Context::new(), rhs, &mut fuel)?;
        if convertible_fuel(&self.theory, lhs, rhs, &mut fuel).map_err(TypeError::from)? {
            Ok(())
        } else {
            Err(ElabError::AssertConvFailed {
                lhs: show(lhs),
                rhs: show(rhs),
            })
        }
    }

    fn check_assert_type(&self, t: &Term, ty: &Term) -> Result<(), ElabError> {
        let mut fuel = self.budget.fuel();
        if !matches!(ty, Term::Sort(_)) {
            let sort = infer_fuel(&self.theory, &Context::new(), ty, &mut fuel)?;
            let sort = whnf_fuel(&self.theory, &sort, &mut fuel).map_err(TypeError::from)?;
            if !matches!(sort, Term::Sort(_)) {
                return Err(TypeError::SortError(format!(
                    "assertion target `{}` is not a type or kind",
                    show(ty)
                ))
                .into());
            }
        }
        check_type_fuel(&self.theory, &Context::new(), t, ty, &mut fuel)
            .map_err(ElabError::AssertTypeFailed)
    }
}

/// Does any sub-spine of the pattern have a rule variable at its head with
/// arguments applied to it? Binders inside the pattern shadow rule variables.
fn applied_rule_var(pat: &Term, ctx: &Context) -> Option<Ident> {
    fn go(pat: &Term, ctx: &Context, shadowed: &mut Vec<Ident>) -> Option<Ident> {
        match pat {
            Term::App(f, a) => {
                let (head, _) = pat.spine();
                if let Term::Var(v) = head {
                    if ctx.binds(v) && !shadowed.contains(v) {
                        return Some(v.clone());
                    }
                }
                go(f, ctx, shadowed).or_else(|| go(a, ctx, shadowed))
            }
            Term::Lam(x, a, b) | Term::Pi(x, a, b) => {
                if let Some(v) = go(a, ctx, shadowed) {
                    return Some(v);
                }
                shadowed.push(x.clone());
                let r = go(b, ctx, shadowed);
                shadowed.pop();
                r
            }
            _ => None,
        }
    }
    go(pat, ctx, &mut Vec::new())
}

/// Elaborate a full list of entries into a theory. `with_prelude` prepends
/// the built-in base signature first.
pub fn elaborate_theory(
    entries: Vec<RawEntry>,
    with_prelude: bool,
    budget: ReductionBudget,
) -> Result<Theory, ElabError> {
    let mut elab = Elaborator::new(budget);
    if with_prelude {
        elab.include_prelude()?;
    }
    for e in entries {
        elab.push(e)?;
    }
    Ok(elab.finish())
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, t) in self.context.iter() {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{n} : {}", show(t))?;
            first = false;
        }
        if !self.context.is_empty() {
            write!(f, " ")?;
        }
        write!(f, "|- {} : {}", show(&self.subject), show(&self.ty))
    }
}
