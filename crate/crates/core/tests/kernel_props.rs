//! Kernel-level properties over randomly generated well-typed terms: the
//! printer and parser agree, head normalization is idempotent and total
//! under a budget, and conversion behaves like an equivalence on the
//! fragments it decides.

use pfk_core::rewrite::{convertible, single_step_reducts, whnf, ReductionBudget, RewriteError};
use pfk_core::surface::{
    elaborate_items, load_embedded, parse_items, parse_term_with, print_item, print_term,
};
use pfk_core::term::{alpha_equal, cst, Term};
use pfk_core::testgen::TermGen;

fn budget() -> ReductionBudget {
    ReductionBudget::default()
}

#[test]
fn printed_corpus_items_reparse_to_themselves() {
    let sources = [
        include_str!("../../../corpus/prelude.pfk"),
        include_str!("../../../corpus/nat.pfk"),
        include_str!("../../../corpus/int.pfk"),
        include_str!("../../../corpus/thm_nat.pfk"),
    ];
    let mut checked = 0usize;
    for src in sources {
        let items = parse_items(src).expect("corpus parses");
        for item in items {
            let printed = print_item(&item);
            let reparsed = parse_items(&printed).expect("printed item parses");
            assert_eq!(reparsed.len(), 1, "one item in: {printed}");
            assert_eq!(reparsed[0], item, "round trip changed: {printed}");
            checked += 1;
        }
    }
    assert!(checked > 30, "corpus should not be trivial ({checked} items)");
}

#[test]
fn printed_random_terms_reparse_to_themselves() {
    let mut gen = TermGen::new(0xC0FFEE);
    let vars: Vec<String> = gen.context().iter().map(|(x, _)| x.clone()).collect();
    let vars: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
    for _ in 0..1000 {
        let (t, ty) = gen.sample_term();
        for u in [&t, &ty] {
            // The topmost sort is internal-only and has no written form.
            if mentions_kind(u) {
                continue;
            }
            let printed = print_term(u);
            let reparsed = parse_term_with(&printed, &vars).expect("printed term parses");
            assert_eq!(&reparsed, u, "round trip changed: {printed}");
        }
    }
}

fn mentions_kind(t: &Term) -> bool {
    match t {
        Term::Sort(pfk_core::term::Sort::Kind) => true,
        Term::Sort(_) | Term::Var(_) | Term::Const(_) | Term::Hole => false,
        Term::App(f, a) => mentions_kind(f) || mentions_kind(a),
        Term::Lam(_, a, b) | Term::Pi(_, a, b) => mentions_kind(a) || mentions_kind(b),
    }
}

#[test]
fn head_normalization_is_idempotent_on_samples() {
    let mut gen = TermGen::new(42);
    for _ in 0..200 {
        let (t, _) = gen.sample_term();
        let once = whnf(gen.theory(), &t, budget()).expect("normalizes");
        let twice = whnf(gen.theory(), &once, budget()).expect("normalizes");
        assert!(
            alpha_equal(&once, &twice),
            "needed a second pass: {}",
            print_term(&t)
        );
    }
}

#[test]
fn conversion_is_reflexive_and_symmetric_on_samples() {
    let mut gen = TermGen::new(7);
    for _ in 0..100 {
        let (t, ty) = gen.sample_term();
        assert!(convertible(gen.theory(), &t, &t, budget()).unwrap());
        assert!(convertible(gen.theory(), &ty, &ty, budget()).unwrap());
    }
    for _ in 0..100 {
        let (a, b) = gen.sample_reduct();
        assert!(convertible(gen.theory(), &a, &b, budget()).unwrap());
        assert!(convertible(gen.theory(), &b, &a, budget()).unwrap());
    }
}

#[test]
fn single_step_reducts_stay_well_typed() {
    let mut gen = TermGen::new(99);
    let mut seen = 0usize;
    for _ in 0..200 {
        let (t, ty) = gen.sample_term();
        for r in single_step_reducts(gen.theory(), &t) {
            pfk_core::typing::check_type(
                gen.theory(),
                gen.context(),
                &r,
                &ty,
                budget(),
            )
            .expect("reduct keeps its type");
            seen += 1;
        }
    }
    assert!(seen > 0, "the pool never produced a redex");
}

#[test]
fn a_self_looping_rule_exhausts_its_budget_promptly() {
    let loaded = load_embedded("t", &[("t", "T : TYPE.\nc : T.\nrule [] c --> c.\n")])
        .expect("load");
    let (_, built) = elaborate_items(&loaded, budget());
    let sig = built.expect("elaborate");
    let t0 = std::time::Instant::now();
    let err = whnf(&sig, &cst("c"), ReductionBudget { max_steps: 100_000 });
    assert!(matches!(err, Err(RewriteError::BudgetExhausted)));
    let err = convertible(
        &sig,
        &cst("c"),
        &Term::Sort(pfk_core::term::Sort::Type),
        ReductionBudget { max_steps: 100_000 },
    );
    assert!(matches!(err, Err(RewriteError::BudgetExhausted)));
    assert!(
        t0.elapsed() < std::time::Duration::from_secs(10),
        "budget exhaustion must be prompt"
    );
}
