//! The doubling translation between theories and its proof obligations.
//!
//! An interpretation sends each constant `c` of a source theory to two terms
//! of a target theory: a carrier `c'star` and a witness `c'plus` over it.
//! The translation extends this to all terms: every variable `x` splits into
//! `x'star` and `x'plus`, an application feeds both halves of its argument to
//! the function's halves, and a binder doubles into a carrier binder and a
//! witness binder. A context doubles entrywise.
//!
//! The `'star` half of a term is again a term; the `'plus` half of a *kind*
//! is a kind with a distinguished placeholder ([`Term::Hole`]) standing for
//! the carrier it classifies, which gets filled in when the kind is used at a
//! concrete carrier.
//!
//! [`check_interpretation`] generates and checks the obligations that make a
//! parameter map a correct interpretation: each constant's halves must
//! typecheck at the translated type, and both halves of every rewrite rule
//! must be convertible in the target. [`transfer_judgment`] and
//! [`transfer_theory`] then move individual judgments, or a whole file of
//! definitions, across a checked interpretation. [`consistency_transform`]
//! turns a transferred inconsistency witness back into a direct one.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::rewrite::{convertible_fuel, ReductionBudget, RewriteRule};
use crate::surface::{print_term, Item, ParamEntry, ParamSide};
use crate::term::{
    app, apps, arrow, cst, free_variables, lam, pi, substitute, var, Context, Ident, Sort,
    Substitution, Term,
};
use crate::typing::{
    check_type_fuel, infer_fuel, ElabError, Elaborator, Entry, Judgment, RawEntry, Theory,
    TypeError,
};

/// The carrier-half name of an identifier.
pub fn star_name(x: &str) -> Ident {
    format!("{x}'star")
}

/// The witness-half name of an identifier.
pub fn plus_name(x: &str) -> Ident {
    format!("{x}'plus")
}

fn side_str(side: ParamSide) -> &'static str {
    match side {
        ParamSide::Star => "star",
        ParamSide::Plus => "plus",
    }
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("duplicate parameter `{name}.{side}`")]
    DuplicateParameter { name: Ident, side: &'static str },
    #[error("missing parameter `{name}.{side}`")]
    MissingParameter { name: Ident, side: &'static str },
    #[error("derived name `{derived}` already occurs in the input; rename `{base}` or `{derived}`")]
    DerivedNameClash { base: Ident, derived: Ident },
    #[error("the sort KIND has no witness form")]
    KindWitnessUnsupported,
    #[error("a kind occurs where a term is required")]
    KindInTermPosition,
    #[error("input contains a placeholder")]
    PlaceholderInput,
    #[error(transparent)]
    Type(#[from] TypeError),
}

// ---------------------------------------------------------------------------
// Parameter maps
// ---------------------------------------------------------------------------

/// Assignment of carrier and witness terms to source constants. Parameter
/// terms are closed terms of the target theory.
#[derive(Debug, Clone, Default)]
pub struct ParamMap {
    star: BTreeMap<Ident, Term>,
    plus: BTreeMap<Ident, Term>,
}

impl ParamMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(entries: Vec<ParamEntry>) -> Result<Self, InterpError> {
        let mut map = Self::new();
        for e in entries {
            map.insert(e.name, e.side, e.term)?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, name: Ident, side: ParamSide, term: Term) -> Result<(), InterpError> {
        let table = match side {
            ParamSide::Star => &mut self.star,
            ParamSide::Plus => &mut self.plus,
        };
        if table.contains_key(&name) {
            return Err(InterpError::DuplicateParameter {
                name,
                side: side_str(side),
            });
        }
        table.insert(name, term);
        Ok(())
    }

    pub fn star(&self, name: &str) -> Option<&Term> {
        self.star.get(name)
    }

    pub fn plus(&self, name: &str) -> Option<&Term> {
        self.plus.get(name)
    }

    /// Constants that have at least one half assigned.
    pub fn names(&self) -> BTreeSet<&Ident> {
        self.star.keys().chain(self.plus.keys()).collect()
    }

    pub fn len(&self) -> usize {
        self.star.len() + self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.star.is_empty() && self.plus.is_empty()
    }

    /// Union of two maps; assigning the same half of the same constant twice
    /// is an error.
    pub fn merged(&self, other: &ParamMap) -> Result<ParamMap, InterpError> {
        let mut out = self.clone();
        for (n, t) in &other.star {
            out.insert(n.clone(), ParamSide::Star, t.clone())?;
        }
        for (n, t) in &other.plus {
            out.insert(n.clone(), ParamSide::Plus, t.clone())?;
        }
        Ok(out)
    }
}

/// The parameter map actually used for a source theory: when the theory is
/// built on the base signature, the built-in parameters of that signature are
/// merged in automatically.
pub fn effective_params(src: &Theory, user: &ParamMap) -> Result<ParamMap, InterpError> {
    if src.prelude_included() {
        crate::prelude::prelude_param_map().merged(user)
    } else {
        Ok(user.clone())
    }
}

// ---------------------------------------------------------------------------
// The translation
// ---------------------------------------------------------------------------

/// The witness half of a translated term: a plain term, or — when the input
/// was a kind — a kind with a placeholder for the carrier it classifies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlusResult {
    Plain(Term),
    KindWithHole(Term),
}

impl PlusResult {
    pub fn plain(self) -> Option<Term> {
        match self {
            PlusResult::Plain(t) => Some(t),
            PlusResult::KindWithHole(_) => None,
        }
    }

    /// The type classifying the witness of a subject whose carrier is
    /// `subject_star`: apply a plain witness family, or fill a kind's
    /// placeholder.
    pub fn witness_type(&self, subject_star: &Term) -> Term {
        match self {
            PlusResult::Plain(family) => app(family.clone(), subject_star.clone()),
            PlusResult::KindWithHole(k) => fill_hole(k, subject_star),
        }
    }
}

/// Replace every placeholder in `t` by `filler`.
fn fill_hole(t: &Term, filler: &Term) -> Term {
    match t {
        Term::Hole => filler.clone(),
        Term::Sort(_) | Term::Var(_) | Term::Const(_) => t.clone(),
        Term::App(f, a) => app(fill_hole(f, filler), fill_hole(a, filler)),
        Term::Lam(x, a, b) => lam(x.clone(), fill_hole(a, filler), fill_hole(b, filler)),
        Term::Pi(x, a, b) => pi(x.clone(), fill_hole(a, filler), fill_hole(b, filler)),
    }
}

/// Variable-like names of a term: free variables plus every binder name.
/// These are the names the translation doubles.
fn collect_var_names(t: &Term, out: &mut BTreeSet<Ident>) {
    match t {
        Term::Sort(_) | Term::Const(_) | Term::Hole => {}
        Term::Var(x) => {
            out.insert(x.clone());
        }
        Term::App(f, a) => {
            collect_var_names(f, out);
            collect_var_names(a, out);
        }
        Term::Lam(x, a, b) | Term::Pi(x, a, b) => {
            out.insert(x.clone());
            collect_var_names(a, out);
            collect_var_names(b, out);
        }
    }
}

/// Refuse inputs whose identifiers already use a derived name of one of their
/// own variables — translating them would conflate distinct names.
fn check_derived_clashes(
    all_ids: &BTreeSet<Ident>,
    var_names: &BTreeSet<Ident>,
) -> Result<(), InterpError> {
    for v in var_names {
        for derived in [star_name(v), plus_name(v)] {
            if all_ids.contains(&derived) {
                return Err(InterpError::DerivedNameClash {
                    base: v.clone(),
                    derived,
                });
            }
        }
    }
    Ok(())
}

/// The translator for one source theory under one parameter map.
///
/// Defined constants (those with an unfolding rule) need no explicit
/// parameters: their halves are derived from the definition body on demand.
pub struct Interp<'a> {
    src: &'a Theory,
    params: &'a ParamMap,
    derived_star: RefCell<BTreeMap<Ident, Term>>,
    derived_plus: RefCell<BTreeMap<Ident, Term>>,
}

impl<'a> Interp<'a> {
    pub fn new(src: &'a Theory, params: &'a ParamMap) -> Self {
        Interp {
            src,
            params,
            derived_star: RefCell::new(BTreeMap::new()),
            derived_plus: RefCell::new(BTreeMap::new()),
        }
    }

    /// Carrier half of a term, after checking it is safe to translate.
    pub fn star_term(&self, t: &Term) -> Result<Term, InterpError> {
        self.precheck(t, &Context::new())?;
        self.star(t)
    }

    /// Witness half of a term, after checking it is safe to translate.
    pub fn plus_term(&self, t: &Term) -> Result<PlusResult, InterpError> {
        self.precheck(t, &Context::new())?;
        self.plus(t)
    }

    fn precheck(&self, t: &Term, ctx: &Context) -> Result<(), InterpError> {
        if t.contains_hole() || ctx.iter().any(|(_, a)| a.contains_hole()) {
            return Err(InterpError::PlaceholderInput);
        }
        let mut all = BTreeSet::new();
        let mut vars = BTreeSet::new();
        t.identifiers(&mut all);
        collect_var_names(t, &mut vars);
        for (x, a) in ctx.iter() {
            all.insert(x.clone());
            vars.insert(x.clone());
            a.identifiers(&mut all);
            collect_var_names(a, &mut vars);
        }
        check_derived_clashes(&all, &vars)
    }

    fn const_star(&self, c: &str) -> Result<Term, InterpError> {
        if let Some(t) = self.params.star(c) {
            return Ok(t.clone());
        }
        if let Some(t) = self.derived_star.borrow().get(c) {
            return Ok(t.clone());
        }
        if let Some(body) = self.src.definition_of(c) {
            let body = body.clone();
            let t = self.star(&body)?;
            self.derived_star
                .borrow_mut()
                .insert(c.to_string(), t.clone());
            return Ok(t);
        }
        Err(InterpError::MissingParameter {
            name: c.to_string(),
            side: "star",
        })
    }

    fn const_plus(&self, c: &str) -> Result<Term, InterpError> {
        if let Some(t) = self.params.plus(c) {
            return Ok(t.clone());
        }
        if let Some(t) = self.derived_plus.borrow().get(c) {
            return Ok(t.clone());
        }
        if let Some(body) = self.src.definition_of(c) {
            let body = body.clone();
            let t = self
                .plus(&body)?
                .plain()
                .ok_or(InterpError::KindInTermPosition)?;
            self.derived_plus
                .borrow_mut()
                .insert(c.to_string(), t.clone());
            return Ok(t);
        }
        Err(InterpError::MissingParameter {
            name: c.to_string(),
            side: "plus",
        })
    }

    /// Carrier half. Sorts are fixed; an application hands both halves of the
    /// argument over; a binder doubles.
    pub fn star(&self, t: &Term) -> Result<Term, InterpError> {
        match t {
            Term::Sort(s) => Ok(Term::Sort(*s)),
            Term::Hole => Err(InterpError::PlaceholderInput),
            Term::Var(x) => Ok(var(star_name(x))),
            Term::Const(c) => self.const_star(c),
            Term::App(f, a) => {
                let fs = self.star(f)?;
                let as_ = self.star(a)?;
                let ap = self
                    .plus(a)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                Ok(apps(fs, [as_, ap]))
            }
            Term::Lam(x, ann, body) => {
                let (sx, px) = (star_name(x), plus_name(x));
                let ann_star = self.star(ann)?;
                let ann_plus = self
                    .plus(ann)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                let body_star = self.star(body)?;
                Ok(lam(
                    sx.clone(),
                    ann_star,
                    lam(px, app(ann_plus, var(sx)), body_star),
                ))
            }
            Term::Pi(x, dom, cod) => {
                let (sx, px) = (star_name(x), plus_name(x));
                let dom_star = self.star(dom)?;
                let dom_plus = self
                    .plus(dom)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                let cod_star = self.star(cod)?;
                Ok(pi(
                    sx.clone(),
                    dom_star,
                    pi(px, app(dom_plus, var(sx)), cod_star),
                ))
            }
        }
    }

    /// Witness half. `TYPE` becomes the family kind over a placeholder
    /// carrier; a product over a kind keeps a placeholder, while a product
    /// over a type becomes the pointwise witness family of its carriers.
    pub fn plus(&self, t: &Term) -> Result<PlusResult, InterpError> {
        match t {
            Term::Sort(Sort::Type) => Ok(PlusResult::KindWithHole(arrow(Term::Hole, Term::Sort(Sort::Type)))),
            Term::Sort(Sort::Kind) => Err(InterpError::KindWitnessUnsupported),
            Term::Hole => Err(InterpError::PlaceholderInput),
            Term::Var(x) => Ok(PlusResult::Plain(var(plus_name(x)))),
            Term::Const(c) => Ok(PlusResult::Plain(self.const_plus(c)?)),
            Term::App(f, a) => {
                let fp = self
                    .plus(f)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                let as_ = self.star(a)?;
                let ap = self
                    .plus(a)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                Ok(PlusResult::Plain(apps(fp, [as_, ap])))
            }
            Term::Lam(x, ann, body) => {
                let (sx, px) = (star_name(x), plus_name(x));
                let ann_star = self.star(ann)?;
                let ann_plus = self
                    .plus(ann)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                let body_plus = self
                    .plus(body)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                Ok(PlusResult::Plain(lam(
                    sx.clone(),
                    ann_star,
                    lam(px, app(ann_plus, var(sx)), body_plus),
                )))
            }
            Term::Pi(x, dom, cod) => {
                let (sx, px) = (star_name(x), plus_name(x));
                let dom_star = self.star(dom)?;
                let dom_plus = self
                    .plus(dom)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                match self.plus(cod)? {
                    PlusResult::KindWithHole(k) => {
                        // The product is a kind: its witness kind doubles the
                        // binder and pushes the (applied) placeholder inward.
                        let inner =
                            fill_hole(&k, &apps(Term::Hole, [var(sx.clone()), var(px.clone())]));
                        Ok(PlusResult::KindWithHole(pi(
                            sx.clone(),
                            dom_star,
                            pi(px, app(dom_plus, var(sx)), inner),
                        )))
                    }
                    PlusResult::Plain(cod_plus) => {
                        // The product is a type: its witness family says a
                        // function respects witnesses pointwise.
                        let pi_star = self.star(t)?;
                        let mut avoid = free_variables(&cod_plus);
                        avoid.extend(free_variables(&pi_star));
                        avoid.extend(free_variables(&dom_star));
                        avoid.insert(sx.clone());
                        avoid.insert(px.clone());
                        let f = crate::term::fresh_name("f", &avoid);
                        Ok(PlusResult::Plain(lam(
                            f.clone(),
                            pi_star,
                            pi(
                                sx.clone(),
                                dom_star,
                                pi(
                                    px.clone(),
                                    app(dom_plus, var(sx.clone())),
                                    app(cod_plus, apps(var(f), [var(sx), var(px)])),
                                ),
                            ),
                        )))
                    }
                }
            }
        }
    }

    /// Double a context entrywise: `x : A` becomes `x'star : A'star` and
    /// `x'plus : A'plus x'star`.
    pub fn translate_context(&self, ctx: &Context) -> Result<Context, InterpError> {
        self.precheck(&Term::Sort(Sort::Type), ctx)?;
        self.translate_context_unchecked(ctx)
    }

    fn translate_context_unchecked(&self, ctx: &Context) -> Result<Context, InterpError> {
        let mut out = Context::new();
        for (x, a) in ctx.iter() {
            let a_star = self.star(a)?;
            let a_plus = self
                .plus(a)?
                .plain()
                .ok_or(InterpError::KindInTermPosition)?;
            let sx = star_name(x);
            out.push(sx.clone(), a_star);
            out.push(plus_name(x), app(a_plus, var(sx)));
        }
        Ok(out)
    }

    /// Both halves of a judgment: the carrier judgment, and — unless the
    /// subject is itself a kind — the witness judgment.
    pub fn translate_judgment(
        &self,
        j: &Judgment,
    ) -> Result<(Judgment, Option<Judgment>), InterpError> {
        self.precheck(&j.subject, &j.context)?;
        self.precheck(&j.ty, &j.context)?;
        let dctx = self.translate_context_unchecked(&j.context)?;
        let subject_star = self.star(&j.subject)?;
        let ty_star = self.star(&j.ty)?;
        let star_judgment = Judgment {
            context: dctx.clone(),
            subject: subject_star.clone(),
            ty: ty_star,
        };
        let plus_judgment = match self.plus(&j.subject)? {
            PlusResult::KindWithHole(_) => None,
            PlusResult::Plain(subject_plus) => {
                let ty_plus = self.plus(&j.ty)?.witness_type(&subject_star);
                Some(Judgment {
                    context: dctx,
                    subject: subject_plus,
                    ty: ty_plus,
                })
            }
        };
        Ok((star_judgment, plus_judgment))
    }
}

// ---------------------------------------------------------------------------
// Obligations
// ---------------------------------------------------------------------------

/// The four obligation shapes: the two halves of a constant must typecheck,
/// and the two halves of a rewrite rule must be convertible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObligationKind {
    StarTyping,
    PlusTyping,
    StarRuleConv,
    PlusRuleConv,
}

impl fmt::Display for ObligationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObligationKind::StarTyping => write!(f, "star"),
            ObligationKind::PlusTyping => write!(f, "plus"),
            ObligationKind::StarRuleConv => write!(f, "rule-star"),
            ObligationKind::PlusRuleConv => write!(f, "rule-plus"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObligationStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone)]
pub struct Obligation {
    pub kind: ObligationKind,
    /// Constant name, or head constant of the rule.
    pub subject: Ident,
    /// The judgment or equation that was checked, in source syntax.
    pub statement: String,
    pub status: ObligationStatus,
}

impl Obligation {
    pub fn ok(&self) -> bool {
        self.status == ObligationStatus::Ok
    }
}

/// Generate and check every obligation for interpreting `src` into `tgt`
/// under `user_params`. Obligations cover the entries `src` adds on top of
/// the base signature (or all entries if `src` is raw). Failed typechecks and
/// failed conversions are reported per obligation; a structurally unusable
/// input (missing parameter, derived-name clash, placeholder) aborts instead.
pub fn check_interpretation(
    src: &Theory,
    tgt: &Theory,
    user_params: &ParamMap,
    budget: ReductionBudget,
) -> Result<Vec<Obligation>, InterpError> {
    let params = effective_params(src, user_params)?;
    let interp = Interp::new(src, &params);
    let mut out = Vec::new();
    for entry in src.user_entries() {
        match entry {
            Entry::Const { name, ty } => {
                check_constant_obligations(&interp, tgt, name, ty, budget, &mut out)?;
            }
            Entry::Rule(rule) => {
                check_rule_obligations(&interp, tgt, rule, budget, &mut out)?;
            }
        }
    }
    Ok(out)
}

fn type_check_status(
    tgt: &Theory,
    subject: &Term,
    expected: &Term,
    budget: ReductionBudget,
) -> ObligationStatus {
    let mut fuel = budget.fuel();
    match check_type_fuel(tgt, &Context::new(), subject, expected, &mut fuel) {
        Ok(()) => ObligationStatus::Ok,
        Err(e) => ObligationStatus::Failed(e.to_string()),
    }
}

fn check_constant_obligations(
    interp: &Interp<'_>,
    tgt: &Theory,
    name: &str,
    ty: &Term,
    budget: ReductionBudget,
    out: &mut Vec<Obligation>,
) -> Result<(), InterpError> {
    interp.precheck(ty, &Context::new())?;
    let c_star = interp.const_star(name)?;
    let ty_star = interp.star(ty)?;
    out.push(Obligation {
        kind: ObligationKind::StarTyping,
        subject: name.to_string(),
        statement: format!("{} : {}", print_term(&c_star), print_term(&ty_star)),
        status: type_check_status(tgt, &c_star, &ty_star, budget),
    });
    let c_plus = interp.const_plus(name)?;
    let ty_plus = interp.plus(ty)?.witness_type(&c_star);
    out.push(Obligation {
        kind: ObligationKind::PlusTyping,
        subject: name.to_string(),
        statement: format!("{} : {}", print_term(&c_plus), print_term(&ty_plus)),
        status: type_check_status(tgt, &c_plus, &ty_plus, budget),
    });
    Ok(())
}

/// Names for the rule's variables such that neither the name nor its derived
/// halves collide with target constants or anything in the rule.
fn rename_rule_apart(
    rule: &RewriteRule,
    tgt: &Theory,
) -> (Context, Term, Term) {
    let mut avoid: BTreeSet<Ident> = tgt.const_names().cloned().collect();
    rule.lhs.identifiers(&mut avoid);
    rule.rhs.identifiers(&mut avoid);
    for (x, a) in rule.context.iter() {
        avoid.insert(x.clone());
        a.identifiers(&mut avoid);
    }
    let mut renaming = Substitution::new();
    let mut ctx = Context::new();
    for (x, a) in rule.context.iter() {
        let a = substitute(a, &renaming);
        let mut candidate = x.clone();
        loop {
            let fine = !avoid.contains(&candidate)
                && !avoid.contains(&star_name(&candidate))
                && !avoid.contains(&plus_name(&candidate));
            if fine {
                break;
            }
            candidate.push('\'');
        }
        avoid.insert(candidate.clone());
        avoid.insert(star_name(&candidate));
        avoid.insert(plus_name(&candidate));
        if candidate != *x {
            renaming.insert(x.clone(), var(candidate.clone()));
        }
        ctx.push(candidate, a);
    }
    let lhs = substitute(&rule.lhs, &renaming);
    let rhs = substitute(&rule.rhs, &renaming);
    (ctx, lhs, rhs)
}

fn check_rule_obligations(
    interp: &Interp<'_>,
    tgt: &Theory,
    rule: &RewriteRule,
    budget: ReductionBudget,
    out: &mut Vec<Obligation>,
) -> Result<(), InterpError> {
    let head = rule.head().cloned().unwrap_or_else(|| "<rule>".into());
    let (ctx, lhs, rhs) = rename_rule_apart(rule, tgt);
    let doubled = interp.translate_context_unchecked(&ctx)?;
    let lhs_star = interp.star(&lhs)?;
    let rhs_star = interp.star(&rhs)?;
    let lhs_plus = interp
        .plus(&lhs)?
        .plain()
        .ok_or(InterpError::KindInTermPosition)?;
    let rhs_plus = interp
        .plus(&rhs)?
        .plain()
        .ok_or(InterpError::KindInTermPosition)?;

    // Close the doubled context: declare each entry as a scratch constant of
    // the target, rewriting earlier entries' variables to those constants.
    let mut ext = Elaborator::from_theory(tgt.clone(), budget);
    let mut to_const = Substitution::new();
    let mut failure: Option<String> = None;
    for (z, a) in doubled.iter() {
        let a = substitute(a, &to_const);
        if let Err(e) = ext.push_const(z.clone(), a) {
            failure = Some(format!("scratch context entry `{z}` is ill-typed: {e}"));
            break;
        }
        to_const.insert(z.clone(), cst(z.clone()));
    }
    let lhs_star = substitute(&lhs_star, &to_const);
    let rhs_star = substitute(&rhs_star, &to_const);
    let lhs_plus = substitute(&lhs_plus, &to_const);
    let rhs_plus = substitute(&rhs_plus, &to_const);
    let ext = ext.finish();

    let push = |kind: ObligationKind, l: &Term, r: &Term, out: &mut Vec<Obligation>| {
        let statement = format!("{} == {}", print_term(l), print_term(r));
        let status = if let Some(cause) = &failure {
            ObligationStatus::Failed(cause.clone())
        } else {
            let mut fuel = budget.fuel();
            match convertible_fuel(&ext, l, r, &mut fuel) {
                Ok(true) => ObligationStatus::Ok,
                Ok(false) => ObligationStatus::Failed("sides are not convertible".into()),
                Err(e) => ObligationStatus::Failed(e.to_string()),
            }
        };
        out.push(Obligation {
            kind,
            subject: head.clone(),
            statement,
            status,
        });
    };
    push(ObligationKind::StarRuleConv, &lhs_star, &rhs_star, out);
    push(ObligationKind::PlusRuleConv, &lhs_plus, &rhs_plus, out);
    Ok(())
}

// ---------------------------------------------------------------------------
// Judgment transfer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Error)]
pub enum TransferError {
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("transferred `{name}` does not check in the target: {cause}")]
    Recheck { name: Ident, cause: ElabError },
    #[error("cannot transfer {kind} items")]
    UnsupportedItem { kind: &'static str },
}

/// Translate a source judgment and check both halves in the target. Returns
/// the checked judgments.
pub fn transfer_judgment(
    src: &Theory,
    tgt: &Theory,
    user_params: &ParamMap,
    judgment: &Judgment,
    budget: ReductionBudget,
) -> Result<(Judgment, Option<Judgment>), TransferError> {
    let params = effective_params(src, user_params)?;
    let interp = Interp::new(src, &params);
    let (star_j, plus_j) = interp.translate_judgment(judgment)?;
    check_judgment(tgt, &star_j, budget).map_err(|e| TransferError::Recheck {
        name: "star half".into(),
        cause: e.into(),
    })?;
    if let Some(pj) = &plus_j {
        check_judgment(tgt, pj, budget).map_err(|e| TransferError::Recheck {
            name: "plus half".into(),
            cause: e.into(),
        })?;
    }
    Ok((star_j, plus_j))
}

/// Check a judgment wholesale: context well-formed, subject checks against
/// the stated type (or the stated kind `KIND`, for subjects that are kinds).
pub fn check_judgment(
    sig: &Theory,
    j: &Judgment,
    budget: ReductionBudget,
) -> Result<(), TypeError> {
    let mut fuel = budget.fuel();
    crate::typing::check_context_fuel(sig, &j.context, &mut fuel)?;
    if matches!(j.ty, Term::Sort(Sort::Kind)) {
        let inferred = infer_fuel(sig, &j.context, &j.subject, &mut fuel)?;
        let got = crate::rewrite::whnf_fuel(sig, &inferred, &mut fuel)?;
        if matches!(got, Term::Sort(Sort::Kind)) {
            Ok(())
        } else {
            Err(TypeError::TypeMismatch {
                expected: "KIND".into(),
                found: print_term(&got),
            })
        }
    } else {
        check_type_fuel(sig, &j.context, &j.subject, &j.ty, &mut fuel)
    }
}

// ---------------------------------------------------------------------------
// Theory transfer
// ---------------------------------------------------------------------------

/// Result of transferring a file of declarations and definitions.
#[derive(Debug, Clone)]
pub struct TransferOutput {
    /// The emitted target-side items (starting with a `require` of the
    /// target theory).
    pub items: Vec<Item>,
    /// Names of the source constants that were transferred, in order.
    pub transferred: Vec<Ident>,
    /// The target theory extended with the emitted items — already checked.
    pub theory: Theory,
}

/// Transfer the `items` (declarations and definitions of a theorem file,
/// already elaborated as part of `src`) across the interpretation into `tgt`.
///
/// Every constant `c : A` yields target entries `c'star` and `c'plus` whose
/// types are the two halves of `A`; definitions carry their translated bodies
/// along. Later items see earlier ones through the growing parameter map, so
/// emitted bodies reference the new constants rather than inlining them. All
/// emitted entries are checked by elaborating them into the target — that
/// check succeeding is precisely what makes the transferred theorems valid.
pub fn transfer_theory(
    src: &Theory,
    tgt: &Theory,
    user_params: &ParamMap,
    items: &[Item],
    target_require: &str,
    budget: ReductionBudget,
) -> Result<TransferOutput, TransferError> {
    let mut work = effective_params(src, user_params)?;
    let mut ext = Elaborator::from_theory(tgt.clone(), budget);
    let mut emitted = vec![Item::Require(target_require.to_string())];
    let mut transferred = Vec::new();

    for item in items {
        let (name, ty, body) = match item {
            Item::Const { name, ty } => (name, ty, None),
            Item::Def { name, ty, body } => (name, ty, Some(body)),
            Item::Require(_) | Item::AssertConv(..) | Item::AssertType(..) => continue,
            Item::Rule { .. } => {
                return Err(TransferError::UnsupportedItem { kind: "rule" });
            }
        };
        let interp = Interp::new(src, &work);
        interp.precheck(ty, &Context::new())?;
        if let Some(b) = body {
            interp.precheck(b, &Context::new())?;
        }

        let sname = star_name(name);
        let pname = plus_name(name);
        let ty_star = interp.star(ty)?;
        // The witness type refers to the carrier by its new name, so the
        // emitted file stays readable and later items can share it.
        let ty_plus = interp.plus(ty)?.witness_type(&cst(sname.clone()));

        let (star_item, plus_item) = match body {
            Some(b) => {
                let body_star = interp.star(b)?;
                let body_plus = interp
                    .plus(b)?
                    .plain()
                    .ok_or(InterpError::KindInTermPosition)?;
                (
                    Item::Def {
                        name: sname.clone(),
                        ty: ty_star,
                        body: body_star,
                    },
                    Item::Def {
                        name: pname.clone(),
                        ty: ty_plus,
                        body: body_plus,
                    },
                )
            }
            None => (
                Item::Const {
                    name: sname.clone(),
                    ty: ty_star,
                },
                Item::Const {
                    name: pname.clone(),
                    ty: ty_plus,
                },
            ),
        };

        for it in [&star_item, &plus_item] {
            let raw = match it {
                Item::Const { name, ty } => RawEntry::Const {
                    name: name.clone(),
                    ty: ty.clone(),
                },
                Item::Def { name, ty, body } => RawEntry::Def {
                    name: name.clone(),
                    ty: ty.clone(),
                    body: body.clone(),
                },
                _ => unreachable!("only declarations and definitions are emitted"),
            };
            ext.push(raw).map_err(|cause| TransferError::Recheck {
                name: name.clone(),
                cause,
            })?;
        }
        emitted.push(star_item);
        emitted.push(plus_item);

        work.insert(name.clone(), ParamSide::Star, cst(sname))?;
        work.insert(name.clone(), ParamSide::Plus, cst(pname))?;
        transferred.push(name.clone());
    }

    Ok(TransferOutput {
        items: emitted,
        transferred,
        theory: ext.finish(),
    })
}

// ---------------------------------------------------------------------------
// Consistency transfer
// ---------------------------------------------------------------------------

/// Given the transferred carrier half `w` of a source proof of
/// `(P : El o) -> Prf P` (so `w` has the doubled type
/// `(P : El o) -> (Prf P -> Prf P) -> Prf P` in the target), build a direct
/// target proof of `(P : El o) -> Prf P` by instantiating every witness
/// argument with the identity.
pub fn consistency_transform(
    tgt: &Theory,
    star_half: &Term,
    budget: ReductionBudget,
) -> Result<Term, TransferError> {
    let mut avoid: BTreeSet<Ident> = tgt.const_names().cloned().collect();
    star_half.identifiers(&mut avoid);
    let p = crate::term::fresh_name("P", &avoid);
    avoid.insert(p.clone());
    let h = crate::term::fresh_name("h", &avoid);

    let el_o = app(cst("El"), cst("o"));
    let prf_p = app(cst("Prf"), var(p.clone()));
    let doubled_ty = pi(
        p.clone(),
        el_o.clone(),
        arrow(arrow(prf_p.clone(), prf_p.clone()), prf_p.clone()),
    );
    let mut fuel = budget.fuel();
    let inferred = infer_fuel(tgt, &Context::new(), star_half, &mut fuel)
        .map_err(|e| TransferError::Interp(e.into()))?;
    if !convertible_fuel(tgt, &inferred, &doubled_ty, &mut fuel)
        .map_err(|e| TransferError::Interp(InterpError::Type(e.into())))?
    {
        return Err(TransferError::Recheck {
            name: "consistency witness".into(),
            cause: ElabError::Type(TypeError::TypeMismatch {
                expected: print_term(&doubled_ty),
                found: print_term(&inferred),
            }),
        });
    }

    let identity = lam(h.clone(), prf_p.clone(), var(h));
    let witness = lam(
        p.clone(),
        el_o.clone(),
        apps(star_half.clone(), [var(p.clone()), identity]),
    );
    let target_ty = pi(p, el_o, prf_p);
    check_type_fuel(tgt, &Context::new(), &witness, &target_ty, &mut fuel).map_err(|e| {
        TransferError::Recheck {
            name: "consistency witness".into(),
            cause: e.into(),
        }
    })?;
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelude::prelude_signature;
    use crate::rewrite::convertible;
    use crate::surface::{elaborate_items, load_embedded, parse_param_entries, parse_term_src};
    use crate::term::{apps, arrow, kind, lam, pi, ty, var};
    use crate::typing::Elaborator;

    fn theory(src: &str) -> Theory {
        let loaded = load_embedded("t", &[("t", src)]).expect("load");
        let (_, built) = elaborate_items(&loaded, ReductionBudget::default());
        built.expect("elaborate")
    }

    fn params(src: &str) -> ParamMap {
        ParamMap::from_entries(parse_param_entries(src).expect("parse")).expect("params")
    }

    fn term(src: &str) -> Term {
        parse_term_src(src).expect("term")
    }

    fn budget() -> ReductionBudget {
        ReductionBudget::default()
    }

    const SRC: &str = "A : TYPE.\nf : A -> A.\nc : A.\n";
    const TGT: &str = "A : TYPE.\n\
                       Aw : A -> TYPE.\n\
                       f : A -> A.\n\
                       fw : (x : A) -> Aw x -> Aw (f x).\n\
                       c : A.\n\
                       cw : Aw c.\n";
    const MAP: &str = "A.star := A.\n\
                       A.plus := Aw.\n\
                       f.star := \\ (x'star : A). \\ (x'plus : Aw x'star). f x'star.\n\
                       f.plus := \\ (x'star : A). \\ (x'plus : Aw x'star). fw x'star x'plus.\n\
                       c.star := c.\n\
                       c.plus := cw.\n";

    #[test]
    fn derived_names_are_fixed_suffixes() {
        assert_eq!(star_name("x"), "x'star");
        assert_eq!(plus_name("x"), "x'plus");
    }

    #[test]
    fn param_maps_reject_duplicates_on_insert_and_merge() {
        let mut map = params("c.star := c.\n");
        let err = map.insert("c".to_string(), ParamSide::Star, cst("c"));
        assert!(matches!(
            err,
            Err(InterpError::DuplicateParameter { name, side }) if name == "c" && side == "star"
        ));
        map.insert("c".to_string(), ParamSide::Plus, cst("cw"))
            .expect("other side is free");
        let err = map.merged(&params("c.star := cw.\n"));
        assert!(matches!(err, Err(InterpError::DuplicateParameter { .. })));
        let merged = map.merged(&params("d.star := c.\n")).expect("disjoint");
        assert_eq!(merged.len(), 3);
    }

    #[test]
    fn variables_and_constants_translate_to_their_two_halves() {
        let src = theory(SRC);
        let map = params(MAP);
        let interp = Interp::new(&src, &map);
        let x = var("x".to_string());
        assert_eq!(interp.star(&x).unwrap(), var("x'star".to_string()));
        assert_eq!(
            interp.plus(&x).unwrap(),
            PlusResult::Plain(var("x'plus".to_string()))
        );
        assert_eq!(interp.star(&cst("c")).unwrap(), cst("c"));
        assert_eq!(interp.plus(&cst("c")).unwrap().plain(), Some(cst("cw")));
        assert_eq!(interp.star(&cst("A")).unwrap(), cst("A"));
        assert_eq!(interp.plus(&cst("A")).unwrap().plain(), Some(cst("Aw")));
    }

    #[test]
    fn sorts_translate_to_a_fixed_carrier_and_a_holed_witness_kind() {
        let src = theory(SRC);
        let map = params(MAP);
        let interp = Interp::new(&src, &map);
        assert_eq!(interp.star(&ty()).unwrap(), ty());
        let w = interp.plus(&ty()).unwrap();
        assert_eq!(w, PlusResult::KindWithHole(arrow(Term::Hole, ty())));
        // Filling the placeholder with a carrier yields the witness kind.
        assert_eq!(w.witness_type(&cst("A")), arrow(cst("A"), ty()));
        assert!(matches!(
            interp.plus(&kind()),
            Err(InterpError::KindWitnessUnsupported)
        ));
    }

    #[test]
    fn applications_pass_both_halves_of_the_argument() {
        let src = theory(SRC);
        let map = params(MAP);
        let interp = Interp::new(&src, &map);
        let t = app(cst("f"), cst("c"));
        let star = interp.star(&t).unwrap();
        assert_eq!(
            star,
            apps(map.star("f").unwrap().clone(), [cst("c"), cst("cw")])
        );
        let plus = interp.plus(&t).unwrap().plain().expect("term level");
        assert_eq!(
            plus,
            apps(map.plus("f").unwrap().clone(), [cst("c"), cst("cw")])
        );
    }

    #[test]
    fn binders_double_and_products_build_witness_families() {
        let src = theory(SRC);
        let map = params(MAP);
        let interp = Interp::new(&src, &map);

        let identity = lam("x", cst("A"), var("x".to_string()));
        let star = interp.star(&identity).unwrap();
        let expected = lam(
            "x'star",
            cst("A"),
            lam("x'plus", app(cst("Aw"), var("x'star".to_string())), var("x'star".to_string())),
        );
        assert_eq!(star, expected);

        let arr = pi("x", cst("A"), cst("A"));
        let star_pi = interp.star(&arr).unwrap();
        let expected_pi = pi(
            "x'star",
            cst("A"),
            pi("x'plus", app(cst("Aw"), var("x'star".to_string())), cst("A")),
        );
        assert_eq!(star_pi, expected_pi);

        // The witness family of A -> A, applied to a function, classifies
        // pointwise witnesses.
        let tgt = theory(TGT);
        let family = interp.plus(&arr).unwrap().plain().expect("type level");
        let applied = app(family, map.star("f").unwrap().clone());
        let expected_family = term(
            "(x'star : A) -> (x'plus : Aw x'star) -> Aw (f x'star)",
        );
        assert!(convertible(&tgt, &applied, &expected_family, budget()).unwrap());
    }

    #[test]
    fn products_into_kinds_keep_the_placeholder_open() {
        let src = theory(SRC);
        let map = params(MAP);
        let interp = Interp::new(&src, &map);
        let fam_kind = pi("x", cst("A"), ty());
        match interp.plus(&fam_kind).unwrap() {
            PlusResult::KindWithHole(k) => {
                let filled = PlusResult::KindWithHole(k).witness_type(&cst("G"));
                assert!(!filled.contains_hole());
                let expected = pi(
                    "x'star",
                    cst("A"),
                    pi(
                        "x'plus",
                        app(cst("Aw"), var("x'star".to_string())),
                        arrow(
                            apps(cst("G"), [var("x'star".to_string()), var("x'plus".to_string())]),
                            ty(),
                        ),
                    ),
                );
                assert_eq!(filled, expected);
            }
            PlusResult::Plain(t) => panic!("expected an open witness kind, got {t:?}"),
        }
    }

    #[test]
    fn translation_rejects_placeholders_and_reserved_names() {
        let src = theory(SRC);
        let map = params(MAP);
        let interp = Interp::new(&src, &map);
        assert!(matches!(
            interp.star_term(&Term::Hole),
            Err(InterpError::PlaceholderInput)
        ));
        let clash = lam("x", cst("A"), lam("x'star", cst("A"), var("x".to_string())));
        assert!(matches!(
            interp.star_term(&clash),
            Err(InterpError::DerivedNameClash { base, derived })
                if base == "x" && derived == "x'star"
        ));
    }

    #[test]
    fn definitions_translate_through_their_bodies() {
        let src = theory("A : TYPE.\nc : A.\ndef d : A := c.\n");
        let map = params("A.star := A.\nA.plus := Aw.\nc.star := c.\nc.plus := cw.\n");
        let interp = Interp::new(&src, &map);
        assert_eq!(interp.star(&cst("d")).unwrap(), cst("c"));
        assert_eq!(interp.plus(&cst("d")).unwrap().plain(), Some(cst("cw")));
    }

    #[test]
    fn missing_parameters_are_reported_by_name_and_side() {
        let src = theory(SRC);
        let map = params("A.star := A.\nA.plus := Aw.\nf.star := f.\nf.plus := fw.\nc.star := c.\n");
        let interp = Interp::new(&src, &map);
        assert!(matches!(
            interp.plus(&cst("c")),
            Err(InterpError::MissingParameter { name, side }) if name == "c" && side == "plus"
        ));
        let tgt = theory(TGT);
        assert!(matches!(
            check_interpretation(&src, &tgt, &map, budget()),
            Err(InterpError::MissingParameter { .. })
        ));
    }

    #[test]
    fn contexts_double_each_binding() {
        let src = theory(SRC);
        let map = params(MAP);
        let interp = Interp::new(&src, &map);
        let ctx = Context::from_entries(vec![("x".to_string(), cst("A"))]);
        let doubled = interp.translate_context(&ctx).unwrap();
        let entries: Vec<_> = doubled.iter().cloned().collect();
        assert_eq!(
            entries,
            vec![
                ("x'star".to_string(), cst("A")),
                ("x'plus".to_string(), app(cst("Aw"), var("x'star".to_string()))),
            ]
        );
    }

    #[test]
    fn every_declaration_yields_two_passing_obligations() {
        let src = theory(SRC);
        let tgt = theory(TGT);
        let obligations = check_interpretation(&src, &tgt, &params(MAP), budget()).unwrap();
        assert_eq!(obligations.len(), 6);
        assert!(obligations.iter().all(|o| o.ok()));
        let stars = obligations.iter().filter(|o| o.kind == ObligationKind::StarTyping).count();
        let pluses = obligations.iter().filter(|o| o.kind == ObligationKind::PlusTyping).count();
        assert_eq!((stars, pluses), (3, 3));
        assert!(obligations.iter().any(|o| o.subject == "A"));
    }

    #[test]
    fn a_wrong_witness_fails_its_obligation_without_aborting() {
        let src = theory(SRC);
        let tgt = theory(TGT);
        let bad = params(
            "A.star := A.\n\
             A.plus := Aw.\n\
             f.star := \\ (x'star : A). \\ (x'plus : Aw x'star). f x'star.\n\
             f.plus := \\ (x'star : A). \\ (x'plus : Aw x'star). fw x'star x'plus.\n\
             c.star := c.\n\
             c.plus := c.\n",
        );
        let obligations = check_interpretation(&src, &tgt, &bad, budget()).unwrap();
        let failed: Vec<_> = obligations.iter().filter(|o| !o.ok()).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].subject, "c");
        assert_eq!(failed[0].kind, ObligationKind::PlusTyping);
    }

    #[test]
    fn rewrite_rules_yield_conversion_obligations_for_both_halves() {
        let src = theory(
            "T : TYPE.\nu : T.\nv : T.\nrule [] u --> v.\n",
        );
        let tgt = theory("T : TYPE.\nTw : T -> TYPE.\nw : T.\nww : Tw w.\n");
        let map = params(
            "T.star := T.\nT.plus := Tw.\n\
             u.star := w.\nu.plus := ww.\n\
             v.star := w.\nv.plus := ww.\n",
        );
        let obligations = check_interpretation(&src, &tgt, &map, budget()).unwrap();
        assert_eq!(obligations.len(), 8);
        assert!(obligations.iter().all(|o| o.ok()));
        assert_eq!(
            obligations
                .iter()
                .filter(|o| matches!(o.kind, ObligationKind::StarRuleConv | ObligationKind::PlusRuleConv))
                .count(),
            2
        );

        // Mapping the two sides to different constants breaks the rule
        // conversions but nothing else.
        let split = params(
            "T.star := T.\nT.plus := Tw.\n\
             u.star := w.\nu.plus := ww.\n\
             v.star := w2.\nv.plus := ww2.\n",
        );
        let tgt2 = theory(
            "T : TYPE.\nTw : T -> TYPE.\nw : T.\nww : Tw w.\nw2 : T.\nww2 : Tw w2.\n",
        );
        let obligations = check_interpretation(&src, &tgt2, &split, budget()).unwrap();
        let failed: Vec<_> = obligations.iter().filter(|o| !o.ok()).collect();
        assert_eq!(failed.len(), 2);
        assert!(failed
            .iter()
            .all(|o| matches!(o.kind, ObligationKind::StarRuleConv | ObligationKind::PlusRuleConv)));
    }

    #[test]
    fn judgments_transfer_as_a_carrier_half_and_a_witness_half() {
        let src = theory(SRC);
        let tgt = theory(TGT);
        let j = Judgment {
            context: Context::new(),
            subject: app(cst("f"), cst("c")),
            ty: cst("A"),
        };
        let (star_j, plus_j) = transfer_judgment(&src, &tgt, &params(MAP), &j, budget()).unwrap();
        assert!(convertible(&tgt, &star_j.subject, &app(cst("f"), cst("c")), budget()).unwrap());
        assert_eq!(star_j.ty, cst("A"));
        let plus_j = plus_j.expect("term-level subject has a witness judgment");
        assert!(convertible(
            &tgt,
            &plus_j.ty,
            &app(cst("Aw"), app(cst("f"), cst("c"))),
            budget()
        )
        .unwrap());

        // A type-constant subject still has a witness judgment: its family.
        let jk = Judgment {
            context: Context::new(),
            subject: cst("A"),
            ty: ty(),
        };
        let (_, plus_j) = transfer_judgment(&src, &tgt, &params(MAP), &jk, budget()).unwrap();
        let plus_j = plus_j.expect("family witness");
        assert_eq!(plus_j.subject, cst("Aw"));
        assert_eq!(plus_j.ty, arrow(cst("A"), ty()));

        // Only a subject that is itself a kind has no witness judgment.
        let js = Judgment {
            context: Context::new(),
            subject: ty(),
            ty: kind(),
        };
        let (star_j, plus_j) = transfer_judgment(&src, &tgt, &params(MAP), &js, budget()).unwrap();
        assert_eq!(star_j.subject, ty());
        assert!(plus_j.is_none());
    }

    #[test]
    fn transfer_rechecks_in_the_target_and_reports_failures() {
        let src = theory(SRC);
        // Target lacking `cw` makes the witness half fail its recheck.
        let tgt = theory(
            "A : TYPE.\nAw : A -> TYPE.\nf : A -> A.\nfw : (x : A) -> Aw x -> Aw (f x).\nc : A.\n",
        );
        let j = Judgment {
            context: Context::new(),
            subject: cst("c"),
            ty: cst("A"),
        };
        let err = transfer_judgment(&src, &tgt, &params(MAP), &j, budget());
        assert!(matches!(err, Err(TransferError::Recheck { .. })));
    }

    #[test]
    fn consistency_witness_comes_from_the_doubled_hypothesis() {
        let mut elab = Elaborator::from_theory(prelude_signature().clone(), budget());
        elab.push_const(
            "hyp".to_string(),
            term("(P'star : El o) -> ((h : Prf P'star) -> Prf P'star) -> Prf P'star"),
        )
        .expect("doubled hypothesis");
        let tgt = elab.finish();
        let witness = consistency_transform(&tgt, &cst("hyp"), budget()).unwrap();
        crate::typing::check_type(
            &tgt,
            &Context::new(),
            &witness,
            &term("(P : El o) -> Prf P"),
            budget(),
        )
        .expect("the witness proves every proposition");
    }

    #[test]
    fn consistency_transform_rejects_a_hypothesis_of_the_wrong_shape() {
        let mut elab = Elaborator::from_theory(prelude_signature().clone(), budget());
        elab.push_const("hyp".to_string(), term("El o")).expect("const");
        let tgt = elab.finish();
        let err = consistency_transform(&tgt, &cst("hyp"), budget());
        assert!(matches!(err, Err(TransferError::Recheck { .. })));
    }
}
