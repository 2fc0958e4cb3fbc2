//! Rewriting and conversion: first-order rule matching, weak-head
//! normalization under beta plus the signature's rewrite rules, and the
//! conversion check used by the typechecker.
//!
//! All reduction is metered by a [`ReductionBudget`]: every beta step and
//! every rule step decrements a counter, and exhaustion surfaces as
//! [`RewriteError::BudgetExhausted`] rather than a hang. The budget is a
//! per-call value — each top-level `whnf`/`convertible` call gets a fresh
//! counter threaded through all the reduction it performs internally.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::term::{
    alpha_equal, free_variables, fresh_name, substitute, var, Context, Ident, Substitution, Term,
};
use crate::typing::Theory;

/// A rewrite rule `lhs --> rhs` with its annotated rule context. The rule
/// variables are exactly the context's names; the left-hand side is a
/// first-order, left-linear pattern headed by a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub context: Context,
    pub lhs: Term,
    pub rhs: Term,
}

impl RewriteRule {
    /// The constant heading the left-hand side, if there is one.
    pub fn head(&self) -> Option<&Ident> {
        match self.lhs.spine().0 {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Number of arguments the pattern consumes.
    pub fn arity(&self) -> usize {
        self.lhs.spine().1.len()
    }
}

/// Cap on the number of head reduction steps a single operation may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionBudget {
    pub max_steps: u64,
}

impl ReductionBudget {
    pub const fn new(max_steps: u64) -> Self {
        ReductionBudget { max_steps }
    }

    pub(crate) fn fuel(self) -> Fuel {
        Fuel {
            remaining: self.max_steps,
        }
    }
}

impl Default for ReductionBudget {
    /// 100 000 steps; override from the command line for stubborn inputs.
    fn default() -> Self {
        ReductionBudget::new(100_000)
    }
}

/// Mutable step counter threaded through one top-level operation.
#[derive(Debug)]
pub(crate) struct Fuel {
    remaining: u64,
}

impl Fuel {
    pub(crate) fn tick(&mut self) -> Result<(), RewriteError> {
        if self.remaining == 0 {
            return Err(RewriteError::BudgetExhausted);
        }
        self.remaining -= 1;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("reduction budget exhausted")]
    BudgetExhausted,
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

/// First-order syntactic matching of a rule's left-hand side against `t`.
///
/// Returns the substitution over the rule variables such that instantiating
/// the pattern reproduces `t` up to alpha, or `None` if the pattern does not
/// match as-is (no reduction of `t` is attempted here).
pub fn match_rule(rule: &RewriteRule, t: &Term) -> Option<Substitution> {
    let rule_vars: BTreeSet<&Ident> = rule.context.iter().map(|(n, _)| n).collect();
    let mut theta = Substitution::new();
    let mut target = t.clone();
    let matched = match_pattern(
        None,
        &mut Fuel { remaining: 0 },
        &rule_vars,
        &rule.lhs,
        &mut target,
        &mut Vec::new(),
        &mut theta,
    )
    .unwrap_or(false);
    if matched {
        debug_assert!(alpha_equal(&substitute(&rule.lhs, &theta), t));
        Some(theta)
    } else {
        None
    }
}

/// Core matcher. When `sig` is present, target subterms at rigid pattern
/// positions are brought to weak head normal form before comparison, making
/// the match complete up to conversion of arguments; with `sig` absent the
/// match is purely syntactic. `binders` tracks paired binder names crossed by
/// structural descent (pattern name, target name).
fn match_pattern(
    sig: Option<&Theory>,
    fuel: &mut Fuel,
    rule_vars: &BTreeSet<&Ident>,
    pat: &Term,
    target: &mut Term,
    binders: &mut Vec<(Ident, Ident)>,
    theta: &mut Substitution,
) -> Result<bool, RewriteError> {
    // A rule variable matches whatever stands in the target, provided no
    // target-side binder crossed so far would escape its scope.
    if let Term::Var(v) = pat {
        if !binders.iter().any(|(p, _)| p == v) && rule_vars.contains(v) {
            let fv = free_variables(target);
            if binders.iter().any(|(_, tname)| fv.contains(tname)) {
                return Ok(false);
            }
            // Left-linearity makes a second binding impossible; keep the
            // check as a guard against unvalidated rules.
            return Ok(match theta.get(v) {
                Some(prev) => alpha_equal(prev, target),
                None => {
                    theta.insert(v.clone(), target.clone());
                    true
                }
            });
        }
    }
    // Rigid pattern position: normalize the target first when allowed.
    if let Some(theory) = sig {
        if !matches!(
            (&*target, pat),
            (Term::Var(_), _) | (Term::Const(_), Term::Const(_)) | (Term::Sort(_), _)
        ) {
            *target = whnf_fuel(theory, target, fuel)?;
        }
    }
    match (pat, &mut *target) {
        (Term::Sort(a), Term::Sort(b)) => Ok(a == b),
        (Term::Const(c), Term::Const(d)) => Ok(c == d),
        (Term::Var(x), Term::Var(y)) => {
            for (p, t) in binders.iter().rev() {
                let ph = p == x;
                let th = t == y;
                if ph || th {
                    return Ok(ph && th);
                }
            }
            Ok(x == y)
        }
        (Term::App(pf, pa), Term::App(tf, ta)) => {
            Ok(match_pattern(sig, fuel, rule_vars, pf, tf, binders, theta)?
                && match_pattern(sig, fuel, rule_vars, pa, ta, binders, theta)?)
        }
        (Term::Lam(px, pa, pb), Term::Lam(tx, ta, tb))
        | (Term::Pi(px, pa, pb), Term::Pi(tx, ta, tb)) => {
            if !match_pattern(sig, fuel, rule_vars, pa, ta, binders, theta)? {
                return Ok(false);
            }
            binders.push((px.clone(), tx.clone()));
            let ok = match_pattern(sig, fuel, rule_vars, pb, tb, binders, theta)?;
            binders.pop();
            Ok(ok)
        }
        _ => Ok(false),
    }
}

// ---------------------------------------------------------------------------
// Weak head normalization
// ---------------------------------------------------------------------------

/// Weak head normal form of `t` under beta and the signature's rewrite rules.
///
/// Reduction is leftmost-outermost at the head: beta steps fire first, then
/// the rules are tried in signature declaration order against the head spine
/// (normalizing argument subterms on demand so matches that hold up to
/// conversion are found). The result has no head beta-redex and no rule
/// applies at its head.
pub fn whnf(sig: &Theory, t: &Term, budget: ReductionBudget) -> Result<Term, RewriteError> {
    let mut fuel = budget.fuel();
    whnf_fuel(sig, t, &mut fuel)
}

pub(crate) fn whnf_fuel(sig: &Theory, t: &Term, fuel: &mut Fuel) -> Result<Term, RewriteError> {
    // Maintain the term as head + argument queue (application spine).
    let mut head = t.clone();
    let mut args: VecDeque<Term> = VecDeque::new();
    loop {
        // Flatten nested applications into the queue.
        while let Term::App(f, a) = head {
            args.push_front(*a);
            head = *f;
        }
        match &head {
            Term::Lam(x, _, body) if !args.is_empty() => {
                fuel.tick()?;
                let arg = args.pop_front().expect("nonempty");
                let body = (**body).clone();
                head = substitute(&body, &Substitution::singleton(x.clone(), arg));
            }
            Term::Const(c) => {
                let mut stepped = false;
                for rule in sig.rules_for_head(c) {
                    let arity = rule.arity();
                    if args.len() < arity {
                        continue;
                    }
                    let rule_vars: BTreeSet<&Ident> =
                        rule.context.iter().map(|(n, _)| n).collect();
                    let (_, pat_args) = rule.lhs.spine();
                    let mut theta = Substitution::new();
                    let mut ok = true;
                    for (i, pat) in pat_args.iter().enumerate() {
                        // Normalization progress made while matching is kept
                        // in the argument queue even if this rule fails.
                        if !match_pattern(
                            Some(sig),
                            fuel,
                            &rule_vars,
                            pat,
                            &mut args[i],
                            &mut Vec::new(),
                            &mut theta,
                        )? {
                            ok = false;
                            break;
                        }
                    }
                    if ok {
                        fuel.tick()?;
                        for _ in 0..arity {
                            args.pop_front();
                        }
                        head = substitute(&rule.rhs, &theta);
                        stepped = true;
                        break;
                    }
                }
                if !stepped {
                    break;
                }
            }
            _ => break,
        }
    }
    Ok(args.into_iter().fold(head, crate::term::app))
}

// ---------------------------------------------------------------------------
// Conversion
// ---------------------------------------------------------------------------

/// Conversion check: are `t` and `u` equal modulo beta, the signature's
/// rewrite rules, and alpha?
///
/// Both sides are brought to weak head normal form, heads are compared, and
/// the check recurses on subterms; under binders the codomains are compared
/// with a shared fresh variable. Sound always; complete relative to the
/// budget on signatures that are confluent and terminating at the uses the
/// checker makes of them.
pub fn convertible(
    sig: &Theory,
    t: &Term,
    u: &Term,
    budget: ReductionBudget,
) -> Result<bool, RewriteError> {
    let mut fuel = budget.fuel();
    convertible_fuel(sig, t, u, &mut fuel)
}

pub(crate) fn convertible_fuel(
    sig: &Theory,
    t: &Term,
    u: &Term,
    fuel: &mut Fuel,
) -> Result<bool, RewriteError> {
    if alpha_equal(t, u) {
        return Ok(true);
    }
    let t = whnf_fuel(sig, t, fuel)?;
    let u = whnf_fuel(sig, u, fuel)?;
    match (&t, &u) {
        (Term::Sort(a), Term::Sort(b)) => Ok(a == b),
        (Term::Var(x), Term::Var(y)) => Ok(x == y),
        (Term::Const(c), Term::Const(d)) => Ok(c == d),
        (Term::Hole, Term::Hole) => Ok(true),
        (Term::App(f1, a1), Term::App(f2, a2)) => Ok(convertible_fuel(sig, f1, f2, fuel)?
            && convertible_fuel(sig, a1, a2, fuel)?),
        (Term::Lam(x, a1, b1), Term::Lam(y, a2, b2))
        | (Term::Pi(x, a1, b1), Term::Pi(y, a2, b2)) => {
            if !convertible_fuel(sig, a1, a2, fuel)? {
                return Ok(false);
            }
            let mut avoid = free_variables(b1);
            avoid.extend(free_variables(b2));
            avoid.insert(x.clone());
            avoid.insert(y.clone());
            let z = fresh_name(x, &avoid);
            let b1 = substitute(b1, &Substitution::singleton(x.clone(), var(z.clone())));
            let b2 = substitute(b2, &Substitution::singleton(y.clone(), var(z)));
            convertible_fuel(sig, &b1, &b2, fuel)
        }
        _ => Ok(false),
    }
}

// ---------------------------------------------------------------------------
// Redex enumeration (test and property support)
// ---------------------------------------------------------------------------

/// All single-step reducts of `t`: one entry per beta-redex or rule-matching
/// subterm position, each the whole term with exactly that position reduced.
/// Matching here is the plain syntactic [`match_rule`]. Used by property
/// suites; not part of normalization.
pub fn single_step_reducts(sig: &Theory, t: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    // Reduce at the root.
    if let Term::App(f, a) = t {
        if let Term::Lam(x, _, body) = f.as_ref() {
            out.push(substitute(
                body,
                &Substitution::singleton(x.clone(), (**a).clone()),
            ));
        }
    }
    if let (Term::Const(c), _) = t.spine() {
        for rule in sig.rules_for_head(c) {
            if let Some(theta) = match_rule(rule, t) {
                out.push(substitute(&rule.rhs, &theta));
            }
        }
    }
    // Reduce inside one subterm, keeping the surrounding structure.
    match t {
        Term::Sort(_) | Term::Var(_) | Term::Const(_) | Term::Hole => {}
        Term::App(f, a) => {
            for rf in single_step_reducts(sig, f) {
                out.push(Term::App(Box::new(rf), a.clone()));
            }
            for ra in single_step_reducts(sig, a) {
                out.push(Term::App(f.clone(), Box::new(ra)));
            }
        }
        Term::Lam(x, ann, body) => {
            for ra in single_step_reducts(sig, ann) {
                out.push(Term::Lam(x.clone(), Box::new(ra), body.clone()));
            }
            for rb in single_step_reducts(sig, body) {
                out.push(Term::Lam(x.clone(), ann.clone(), Box::new(rb)));
            }
        }
        Term::Pi(x, dom, cod) => {
            for rd in single_step_reducts(sig, dom) {
                out.push(Term::Pi(x.clone(), Box::new(rd), cod.clone()));
            }
            for rc in single_step_reducts(sig, cod) {
                out.push(Term::Pi(x.clone(), dom.clone(), Box::new(rc)));
            }
        }
    }
    out
}
