//! Seeded property suites runnable from the command line. Each suite
//! returns `Ok(rounds)` or a description of the first failing case.

use pfk_core::corpus::{int_theory, nat_theory, nat_to_int_params};
use pfk_core::interp::{
    consistency_transform, effective_params, plus_name, star_name, transfer_judgment, Interp,
    PlusResult,
};
use pfk_core::prelude::prelude_signature;
use pfk_core::rewrite::{convertible, ReductionBudget};
use pfk_core::surface::{parse_term_src, print_term};
use pfk_core::term::{alpha_equal, cst, substitute, Context, Substitution};
use pfk_core::testgen::TermGen;
use pfk_core::typing::Elaborator;

pub struct Suite {
    pub name: &'static str,
    pub run: fn(u64, ReductionBudget) -> Result<usize, String>,
}

pub const SUITES: &[Suite] = &[
    Suite {
        name: "substitution-commutation",
        run: substitution_commutation,
    },
    Suite {
        name: "reduction-compatibility",
        run: reduction_compatibility,
    },
    Suite {
        name: "judgment-transfer",
        run: judgment_transfer,
    },
    Suite {
        name: "consistency-witness",
        run: consistency_witness,
    },
];

/// Both halves of a substitution instance agree with substituting the
/// translated replacement into the translated template, up to renaming.
fn substitution_commutation(seed: u64, budget: ReductionBudget) -> Result<usize, String> {
    let _ = budget;
    let src = nat_theory();
    let user = nat_to_int_params();
    let params = effective_params(&src, &user).map_err(|e| e.to_string())?;
    let interp = Interp::new(&src, &params);
    let mut gen = TermGen::new(seed);
    let rounds = 1000;
    for round in 0..rounds {
        let (t, z, w) = gen.sample_substitution();
        let direct = substitute(&t, &Substitution::singleton(z.clone(), w.clone()));
        let mut doubled = Substitution::new();
        let err = |e| format!("round {round}: {e}");
        doubled.insert(star_name(&z), interp.star(&w).map_err(err)?);
        let w_plus = interp
            .plus(&w)
            .map_err(err)?
            .plain()
            .ok_or_else(|| format!("round {round}: replacement is not term-level"))?;
        doubled.insert(plus_name(&z), w_plus);

        let lhs = interp.star(&direct).map_err(err)?;
        let rhs = substitute(&interp.star(&t).map_err(err)?, &doubled);
        if !alpha_equal(&lhs, &rhs) {
            return Err(format!(
                "round {round}: carrier halves differ on {}",
                print_term(&t)
            ));
        }
        let lhs = interp.plus(&direct).map_err(err)?;
        let rhs = interp.plus(&t).map_err(err)?;
        let agree = match (&lhs, &rhs) {
            (PlusResult::Plain(a), PlusResult::Plain(b)) => {
                alpha_equal(a, &substitute(b, &doubled))
            }
            (PlusResult::KindWithHole(a), PlusResult::KindWithHole(b)) => {
                alpha_equal(a, &substitute(b, &doubled))
            }
            _ => false,
        };
        if !agree {
            return Err(format!(
                "round {round}: witness halves differ on {}",
                print_term(&t)
            ));
        }
    }
    Ok(rounds)
}

/// A single reduction step in the source maps to convertible carrier and
/// witness halves in the target.
fn reduction_compatibility(seed: u64, budget: ReductionBudget) -> Result<usize, String> {
    let src = nat_theory();
    let tgt = int_theory();
    let user = nat_to_int_params();
    let params = effective_params(&src, &user).map_err(|e| e.to_string())?;
    let interp = Interp::new(&src, &params);
    let mut gen = TermGen::new(seed);
    let rounds = 500;
    for round in 0..rounds {
        let (a, b) = gen.sample_reduct();
        let err = |e| format!("round {round}: {e}");
        let a_star = interp.star(&a).map_err(err)?;
        let b_star = interp.star(&b).map_err(err)?;
        if !convertible(&tgt, &a_star, &b_star, budget)
            .map_err(|e| format!("round {round}: {e}"))?
        {
            return Err(format!(
                "round {round}: carriers diverge on {}",
                print_term(&a)
            ));
        }
        let a_plus = interp.plus(&a).map_err(err)?.witness_type(&a_star);
        let b_plus = interp.plus(&b).map_err(err)?.witness_type(&a_star);
        if !convertible(&tgt, &a_plus, &b_plus, budget)
            .map_err(|e| format!("round {round}: {e}"))?
        {
            return Err(format!(
                "round {round}: witnesses diverge on {}",
                print_term(&a)
            ));
        }
    }
    Ok(rounds)
}

/// Random well-typed judgments transfer and re-check in the target.
fn judgment_transfer(seed: u64, budget: ReductionBudget) -> Result<usize, String> {
    let src = nat_theory();
    let tgt = int_theory();
    let params = nat_to_int_params();
    let mut gen = TermGen::new(seed);
    let rounds = 100;
    for round in 0..rounds {
        let j = gen.sample_judgment();
        transfer_judgment(&src, &tgt, &params, &j, budget)
            .map_err(|e| format!("round {round}: {e} (judgment {j})"))?;
    }
    Ok(rounds)
}

/// The inconsistency-transport construction produces a checked proof of
/// `every proposition holds` from a doubled hypothesis of the same.
fn consistency_witness(_seed: u64, budget: ReductionBudget) -> Result<usize, String> {
    let mut elab = Elaborator::from_theory(prelude_signature().clone(), budget);
    let hyp_ty = parse_term_src(
        "(P'star : El o) -> ((h : Prf P'star) -> Prf P'star) -> Prf P'star",
    )
    .expect("hypothesis type parses");
    elab.push_const("contradiction".to_string(), hyp_ty)
        .map_err(|e| e.to_string())?;
    let tgt = elab.finish();
    let witness =
        consistency_transform(&tgt, &cst("contradiction"), budget).map_err(|e| e.to_string())?;
    let goal = parse_term_src("(P : El o) -> Prf P").expect("goal parses");
    pfk_core::typing::check_type(&tgt, &Context::new(), &witness, &goal, budget)
        .map_err(|e| e.to_string())?;
    Ok(1)
}
