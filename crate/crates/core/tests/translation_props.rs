//! Properties of the doubling translation, exercised across the packaged
//! naturals-to-integers interpretation: substitution commutes with both
//! halves exactly, single reduction steps stay convertible after
//! translation, translated judgments re-check in the target, and the
//! consistency witness construction produces a checked proof.

use pfk_core::corpus::{int_theory, nat_theory, nat_to_int_params};
use pfk_core::interp::{
    consistency_transform, effective_params, plus_name, star_name, transfer_judgment, Interp,
    PlusResult,
};
use pfk_core::prelude::prelude_signature;
use pfk_core::rewrite::{convertible, ReductionBudget};
use pfk_core::surface::parse_term_src;
use pfk_core::term::{alpha_equal, cst, substitute, Context, Substitution, Term};
use pfk_core::testgen::TermGen;
use pfk_core::typing::{check_type, Elaborator};

fn budget() -> ReductionBudget {
    ReductionBudget::default()
}

fn term(src: &str) -> Term {
    parse_term_src(src).expect("term")
}

fn plus_halves_alpha_equal(a: &PlusResult, b: &PlusResult) -> bool {
    match (a, b) {
        (PlusResult::Plain(a), PlusResult::Plain(b)) => alpha_equal(a, b),
        (PlusResult::KindWithHole(a), PlusResult::KindWithHole(b)) => alpha_equal(a, b),
        _ => false,
    }
}

#[test]
fn substitution_commutes_with_both_halves_exactly() {
    let src = nat_theory();
    let user = nat_to_int_params();
    let params = effective_params(&src, &user).expect("params");
    let interp = Interp::new(&src, &params);
    let mut gen = TermGen::new(0x5EED);
    for round in 0..1000 {
        let (t, z, w) = gen.sample_substitution();
        let direct = substitute(&t, &Substitution::singleton(z.clone(), w.clone()));

        let mut doubled = Substitution::new();
        doubled.insert(star_name(&z), interp.star(&w).expect("closed star"));
        doubled.insert(
            plus_name(&z),
            interp
                .plus(&w)
                .expect("closed plus")
                .plain()
                .expect("replacement is term-level"),
        );

        let lhs_star = interp.star(&direct).expect("star of instance");
        let rhs_star = substitute(&interp.star(&t).expect("star of template"), &doubled);
        assert!(
            alpha_equal(&lhs_star, &rhs_star),
            "carrier halves differ in round {round}"
        );

        let lhs_plus = interp.plus(&direct).expect("plus of instance");
        let rhs_plus = match interp.plus(&t).expect("plus of template") {
            PlusResult::Plain(u) => PlusResult::Plain(substitute(&u, &doubled)),
            PlusResult::KindWithHole(u) => PlusResult::KindWithHole(substitute(&u, &doubled)),
        };
        assert!(
            plus_halves_alpha_equal(&lhs_plus, &rhs_plus),
            "witness halves differ in round {round}"
        );
    }
}

#[test]
fn translation_respects_single_reduction_steps_up_to_conversion() {
    let src = nat_theory();
    let tgt = int_theory();
    let user = nat_to_int_params();
    let params = effective_params(&src, &user).expect("params");
    let interp = Interp::new(&src, &params);
    let mut gen = TermGen::new(0xD1CE);
    for round in 0..500 {
        let (a, b) = gen.sample_reduct();
        let a_star = interp.star(&a).expect("star");
        let b_star = interp.star(&b).expect("star");
        assert!(
            convertible(&tgt, &a_star, &b_star, budget()).expect("conversion terminates"),
            "carrier halves diverge in round {round}"
        );
        let a_plus = interp.plus(&a).expect("plus").witness_type(&a_star);
        let b_plus = interp.plus(&b).expect("plus").witness_type(&a_star);
        assert!(
            convertible(&tgt, &a_plus, &b_plus, budget()).expect("conversion terminates"),
            "witness halves diverge in round {round}"
        );
    }
}

#[test]
fn translated_judgments_recheck_in_the_target() {
    let src = nat_theory();
    let tgt = int_theory();
    let params = nat_to_int_params();
    let mut gen = TermGen::new(0xABCD);
    for round in 0..100 {
        let j = gen.sample_judgment();
        let (star_j, plus_j) = transfer_judgment(&src, &tgt, &params, &j, budget())
            .unwrap_or_else(|e| panic!("round {round}: {e}"));
        // transfer_judgment has already re-checked both halves; spot-check
        // the shape it promised.
        assert!(star_j.context.binds(&star_name("v0")));
        assert!(star_j.context.binds(&plus_name("v0")));
        if let Some(plus_j) = &plus_j {
            assert_eq!(plus_j.context, star_j.context);
        }
    }
}

#[test]
fn the_consistency_witness_checks_and_applies() {
    // Extend the base signature with a constant of the doubled shape of
    // `all propositions hold`, then transform it into a direct proof.
    let mut elab = Elaborator::from_theory(prelude_signature().clone(), budget());
    elab.push_const(
        "contradiction".to_string(),
        term("(P'star : El o) -> ((h : Prf P'star) -> Prf P'star) -> Prf P'star"),
    )
    .expect("doubled hypothesis");
    let tgt = elab.finish();

    let witness = consistency_transform(&tgt, &cst("contradiction"), budget()).expect("witness");
    let goal = term("(P : El o) -> Prf P");
    check_type(&tgt, &Context::new(), &witness, &goal, budget()).expect("proves the goal");

    // The witness is a genuine function: applied to a proposition it yields
    // a proof of that proposition.
    let mut ext = Elaborator::from_theory(tgt.clone(), budget());
    ext.push_const("q".to_string(), term("El o")).expect("proposition");
    let ext = ext.finish();
    let applied = pfk_core::term::app(witness, cst("q"));
    check_type(
        &ext,
        &Context::new(),
        &applied,
        &term("Prf q"),
        budget(),
    )
    .expect("instantiates at any proposition");
}

#[test]
fn the_consistency_witness_rejects_an_unrelated_hypothesis() {
    let mut elab = Elaborator::from_theory(prelude_signature().clone(), budget());
    elab.push_const("noise".to_string(), term("(x : El o) -> El o"))
        .expect("const");
    let tgt = elab.finish();
    assert!(consistency_transform(&tgt, &cst("noise"), budget()).is_err());
}
