//! Seeded random generation of well-typed terms, substitution instances,
//! single-step reducts, and judgments over the embedded theory of natural
//! numbers. The property suites (and the command-line `prop` command) draw
//! their inputs from here.
//!
//! Generation is typing-directed: a pool of `(term, type)` pairs — all
//! well-typed in a fixed context over the naturals — is grown by applying
//! functions to compatible arguments, abstracting over fresh variables,
//! eta-expanding functions, and forming products. Every grown entry is
//! produced from already-checked entries, so the pool never needs re-checking
//! (the kernel property tests re-check it anyway).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::nat_theory;
use crate::rewrite::{convertible, single_step_reducts, whnf, ReductionBudget};
use crate::term::{app, apps, cst, lam, pi, var, Context, Ident, Sort, Term};
use crate::typing::{Judgment, Theory};

/// Hard cap on the node count of generated terms, keeping translation and
/// re-checking fast.
const MAX_NODES: usize = 120;

/// A seeded generator over the theory of natural numbers.
pub struct TermGen {
    theory: Theory,
    context: Context,
    pool: Vec<(Term, Term)>,
    types: Vec<Term>,
    rng: ChaCha8Rng,
    budget: ReductionBudget,
    fresh: u32,
}

fn nodes(t: &Term) -> usize {
    match t {
        Term::Sort(_) | Term::Var(_) | Term::Const(_) | Term::Hole => 1,
        Term::App(f, a) => 1 + nodes(f) + nodes(a),
        Term::Lam(_, a, b) | Term::Pi(_, a, b) => 1 + nodes(a) + nodes(b),
    }
}

impl TermGen {
    /// Build a generator and grow its pool deterministically from `seed`.
    pub fn new(seed: u64) -> Self {
        let theory = nat_theory();
        let mut context = Context::new();
        context.push("v0".to_string(), app(cst("El"), cst("nat")));
        context.push("p0".to_string(), app(cst("El"), cst("o")));
        context.push("h0".to_string(), app(cst("Prf"), var("p0")));

        let mut pool: Vec<(Term, Term)> = vec![
            (var("v0"), app(cst("El"), cst("nat"))),
            (var("p0"), app(cst("El"), cst("o"))),
            (var("h0"), app(cst("Prf"), var("p0"))),
            (Term::Sort(Sort::Type), Term::Sort(Sort::Kind)),
        ];
        for name in [
            "Set", "o", "El", "Prf", "arrd", "impd", "pi_", "forall_", "nat", "z0_n", "succ_n",
            "geq_n", "ax1_n", "ax2_n", "ax3_n", "rec_n",
        ] {
            let ty = theory
                .const_type(name)
                .expect("embedded constant present")
                .clone();
            pool.push((cst(name), ty));
        }

        let types = vec![
            cst("Set"),
            app(cst("El"), cst("nat")),
            app(cst("El"), cst("o")),
            app(cst("Prf"), var("p0")),
            app(cst("Prf"), apps(cst("geq_n"), [cst("z0_n"), cst("z0_n")])),
        ];

        let mut gen = TermGen {
            theory,
            context,
            pool,
            types,
            rng: ChaCha8Rng::seed_from_u64(seed),
            budget: ReductionBudget::default(),
            fresh: 0,
        };
        for _ in 0..400 {
            gen.grow();
        }
        gen
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    pub fn context(&self) -> &Context {
        &self.context
    }

    pub fn pool_len(&self) -> usize {
        self.pool.len()
    }

    fn fresh_binder(&mut self) -> Ident {
        self.fresh += 1;
        format!("x{}", self.fresh)
    }

    fn pick(&mut self) -> (Term, Term) {
        let i = self.rng.random_range(0..self.pool.len());
        self.pool[i].clone()
    }

    fn pick_type(&mut self) -> Term {
        let i = self.rng.random_range(0..self.types.len());
        self.types[i].clone()
    }

    fn push_pool(&mut self, t: Term, ty: Term) {
        if nodes(&t) <= MAX_NODES {
            // Decode fresh propositions and sort codes into inhabitable
            // types, so binder annotations keep diversifying.
            if ty == app(cst("El"), cst("o")) && self.types.len() < 40 {
                self.types.push(app(cst("Prf"), t.clone()));
            }
            if ty == cst("Set") && self.types.len() < 40 {
                self.types.push(app(cst("El"), t.clone()));
            }
            self.pool.push((t, ty));
        }
    }

    /// Attempt one growth step; do nothing when the dice land on an
    /// inapplicable move.
    fn grow(&mut self) {
        match self.rng.random_range(0..10u32) {
            // Apply a function to a fitting argument.
            0..=4 => {
                let (f, ft) = self.pick();
                let Ok(w) = whnf(&self.theory, &ft, self.budget) else {
                    return;
                };
                let Term::Pi(x, dom, cod) = w else { return };
                let (a, at) = self.pick();
                if at == *dom
                    || convertible(&self.theory, &at, &dom, self.budget).unwrap_or(false)
                {
                    let ty = crate::term::substitute(
                        &cod,
                        &crate::term::Substitution::singleton(x, a.clone()),
                    );
                    self.push_pool(app(f, a), ty);
                }
            }
            // Abstract a constant function over a fresh variable.
            5..=6 => {
                let (t, tt) = self.pick();
                if matches!(tt, Term::Sort(Sort::Kind)) {
                    return;
                }
                let ann = self.pick_type();
                let x = self.fresh_binder();
                self.push_pool(lam(x.clone(), ann.clone(), t), pi(x, ann, tt));
            }
            // Eta-expand a function, producing a dependent body.
            7..=8 => {
                let (f, ft) = self.pick();
                let Ok(w) = whnf(&self.theory, &ft, self.budget) else {
                    return;
                };
                let Term::Pi(x, dom, cod) = w else { return };
                let z = self.fresh_binder();
                let body = app(f, var(z.clone()));
                let ty = pi(
                    z.clone(),
                    (*dom).clone(),
                    crate::term::substitute(
                        &cod,
                        &crate::term::Substitution::singleton(x, var(z.clone())),
                    ),
                );
                self.push_pool(lam(z, (*dom).clone(), body), ty);
            }
            // Form a product of two small types.
            _ => {
                let a = self.pick_type();
                let b = self.pick_type();
                let x = self.fresh_binder();
                self.push_pool(pi(x, a, b), Term::Sort(Sort::Type));
            }
        }
    }

    /// A random well-typed `(term, type)` pair.
    pub fn sample_term(&mut self) -> (Term, Term) {
        self.pick()
    }

    /// A random judgment `context ⊢ term : type`, valid over the naturals.
    pub fn sample_judgment(&mut self) -> Judgment {
        let (subject, ty) = self.pick();
        Judgment {
            context: self.context.clone(),
            subject,
            ty,
        }
    }

    /// A substitution instance for the commutation property: a term `t`, the
    /// context variable `z` it mentions, and a closed replacement `w` of the
    /// same type.
    pub fn sample_substitution(&mut self) -> (Term, Ident, Term) {
        let z: Ident = "v0".into();
        let mut t = var(&z);
        for _ in 0..40 {
            let (cand, _) = self.pick();
            if crate::term::count_free_occurrences(&cand, &z) > 0 {
                t = cand;
                break;
            }
        }
        let nat_ty = app(cst("El"), cst("nat"));
        let mut w = cst("z0_n");
        for _ in 0..40 {
            let (cand, ty) = self.pick();
            if ty == nat_ty && crate::term::free_variables(&cand).is_empty() {
                w = cand;
                break;
            }
        }
        (t, z, w)
    }

    /// A pair `(a, b)` where `b` is a single reduction step away from `a`,
    /// both well-typed. Synthesizes a beta redex when the pool offers no
    /// reducible term.
    pub fn sample_reduct(&mut self) -> (Term, Term) {
        for _ in 0..40 {
            let (a, _) = self.pick();
            let reducts = single_step_reducts(&self.theory, &a);
            if !reducts.is_empty() {
                let i = self.rng.random_range(0..reducts.len());
                return (a, reducts[i].clone());
            }
        }
        let (t, _) = self.pick();
        let ann = self.pick_type();
        let x = self.fresh_binder();
        let mut w = None;
        for _ in 0..40 {
            let (cand, ty) = self.pick();
            if convertible(&self.theory, &ty, &ann, self.budget).unwrap_or(false) {
                w = Some(cand);
                break;
            }
        }
        let w = match w {
            Some(w) => w,
            None => {
                // `El nat` is always in the annotation rotation.
                return (
                    app(lam(x, app(cst("El"), cst("nat")), t.clone()), cst("z0_n")),
                    t,
                );
            }
        };
        let redex = app(lam(x, ann, t.clone()), w);
        (redex, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::check_type;

    #[test]
    fn pool_grows_and_stays_well_typed() {
        let mut gen = TermGen::new(7);
        assert!(gen.pool_len() > 40, "pool failed to grow: {}", gen.pool_len());
        // Spot-check a sample of pool entries against the typechecker.
        for _ in 0..60 {
            let (t, ty) = gen.sample_term();
            if matches!(ty, Term::Sort(Sort::Kind)) {
                continue;
            }
            let theory = gen.theory().clone();
            let ctx = gen.context().clone();
            check_type(&theory, &ctx, &t, &ty, ReductionBudget::default()).unwrap_or_else(|e| {
                panic!(
                    "pool entry ill-typed: {} : {} ({e})",
                    crate::surface::print_term(&t),
                    crate::surface::print_term(&ty)
                )
            });
        }
    }

    #[test]
    fn same_seed_same_pool() {
        let mut a = TermGen::new(42);
        let mut b = TermGen::new(42);
        for _ in 0..20 {
            assert_eq!(a.sample_term(), b.sample_term());
        }
    }

    #[test]
    fn reducts_are_single_steps() {
        let mut gen = TermGen::new(3);
        for _ in 0..30 {
            let (a, b) = gen.sample_reduct();
            assert!(
                single_step_reducts(gen.theory(), &a).contains(&b),
                "not a reduct"
            );
        }
    }

    #[test]
    fn substitution_samples_mention_the_variable_or_default() {
        let mut gen = TermGen::new(11);
        let (_, z, w) = gen.sample_substitution();
        assert_eq!(z, "v0");
        assert!(crate::term::free_variables(&w).is_empty());
    }
}
