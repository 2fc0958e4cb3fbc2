//! The built-in base signature, embedded at compile time, together with its
//! self-interpretation parameters and a self-check over both.
//!
//! The signature declares object-level sorts (`Set`, decoded by `El`) and
//! propositions (`o`, decoded by `Prf`), four code constructors for dependent
//! function spaces, and the four rewrite rules unfolding their decodings.
//! Theories start from this signature via `require prelude.`; elaboration
//! then restricts user declarations to types (never kinds), which is what
//! makes the doubling translation of [`crate::interp`] total on user content.

use once_cell::sync::Lazy;

use crate::interp::{check_interpretation, InterpError, Obligation, ParamMap};
use crate::rewrite::ReductionBudget;
use crate::surface::{elaborate_items, load_embedded, parse_param_entries};
use crate::typing::Theory;

/// Source text of the base signature (mirrors `corpus/prelude.pfk`).
pub const PRELUDE_SRC: &str = include_str!("../../../corpus/prelude.pfk");

/// Source text of the base signature's self-interpretation parameters
/// (mirrors `corpus/prelude.pfm`).
pub const PRELUDE_PARAMS_SRC: &str = include_str!("../../../corpus/prelude.pfm");

static PRELUDE: Lazy<Theory> = Lazy::new(|| {
    let load =
        load_embedded("base", &[("base", PRELUDE_SRC)]).expect("built-in signature parses");
    let (records, theory) = elaborate_items(&load, ReductionBudget::default());
    if let Some(r) = records.iter().find(|r| r.error.is_some()) {
        panic!(
            "built-in signature entry `{}` is broken: {}",
            r.name,
            r.error.as_deref().unwrap_or("")
        );
    }
    let mut theory = theory.expect("built-in signature elaborates");
    theory.mark_prelude_boundary();
    theory
});

static PRELUDE_PARAMS: Lazy<ParamMap> = Lazy::new(|| {
    let entries = parse_param_entries(PRELUDE_PARAMS_SRC).expect("built-in parameter map parses");
    ParamMap::from_entries(entries).expect("built-in parameter map is well-formed")
});

/// The elaborated base signature. Every entry in it is marked as base
/// content: theories built on top report only their own entries as user
/// content, and their constants are restricted to types.
pub fn prelude_signature() -> &'static Theory {
    &PRELUDE
}

/// Carrier/witness parameter pairs for every base constant, interpreting the
/// base signature into itself. Interpretations of user theories extend this
/// map with parameters for their own constants.
pub fn prelude_param_map() -> &'static ParamMap {
    &PRELUDE_PARAMS
}

/// Check the interpretation of the base signature into itself: two typing
/// obligations per constant and two conversion obligations per rewrite rule,
/// 24 in total. All of them passing is what licenses building interpretations
/// of user theories on top of the built-in parameter map.
pub fn verify_prelude(budget: ReductionBudget) -> Result<Vec<Obligation>, InterpError> {
    let raw = prelude_signature().as_raw();
    check_interpretation(&raw, prelude_signature(), prelude_param_map(), budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::ObligationKind;
    use crate::surface::ParamSide;
    use crate::term::cst;

    #[test]
    fn signature_shape() {
        let sig = prelude_signature();
        assert!(sig.prelude_included());
        assert!(sig.user_entries().is_empty());
        assert_eq!(sig.entries().len(), 12);
        assert_eq!(sig.rules().count(), 4);
        for name in ["Set", "o", "El", "Prf", "arrd", "impd", "pi_", "forall_"] {
            assert!(sig.declares(name), "missing {name}");
        }
    }

    #[test]
    fn param_map_shape() {
        let map = prelude_param_map();
        let names: Vec<&str> = map.names().into_iter().map(|s| s.as_str()).collect();
        assert_eq!(
            names,
            ["El", "Prf", "Set", "arrd", "forall_", "impd", "o", "pi_"]
        );
        for n in &names {
            assert!(map.star(n).is_some(), "{n} lacks a carrier half");
            assert!(map.plus(n).is_some(), "{n} lacks a witness half");
        }
        assert_eq!(map.star("Set"), Some(&cst("Set")));
        assert_eq!(map.star("o"), Some(&cst("o")));
    }

    #[test]
    fn self_check_passes_with_24_obligations() {
        let obs = verify_prelude(ReductionBudget::default()).expect("self-check runs");
        assert_eq!(obs.len(), 24);
        let count = |k: ObligationKind| obs.iter().filter(|o| o.kind == k).count();
        assert_eq!(count(ObligationKind::StarTyping), 8);
        assert_eq!(count(ObligationKind::PlusTyping), 8);
        assert_eq!(count(ObligationKind::StarRuleConv), 4);
        assert_eq!(count(ObligationKind::PlusRuleConv), 4);
        for o in &obs {
            assert!(o.ok(), "{} {} failed: {:?}", o.kind, o.subject, o.status);
        }
    }

    #[test]
    fn corrupting_one_witness_half_is_caught() {
        // Degrade o's witness half to the identity. It still typechecks on
        // its own, but every parameter whose type mentions it (the witness
        // halves of propositions) stops checking.
        let mut entries = parse_param_entries(PRELUDE_PARAMS_SRC).unwrap();
        for e in &mut entries {
            if e.name == "o" && e.side == ParamSide::Plus {
                e.term = crate::surface::parse_term_src("\\ (z : El o). z").unwrap();
            }
        }
        let map = ParamMap::from_entries(entries).unwrap();
        let raw = prelude_signature().as_raw();
        let obs = check_interpretation(
            &raw,
            prelude_signature(),
            &map,
            ReductionBudget::default(),
        )
        .expect("self-check still runs");
        assert_eq!(obs.len(), 24);
        let failed: Vec<String> = obs
            .iter()
            .filter(|o| !o.ok())
            .map(|o| format!("{} {}", o.kind, o.subject))
            .collect();
        assert!(
            failed.contains(&"star Prf".to_string()),
            "expected Prf's carrier obligation to fail, failures: {failed:?}"
        );
        assert!(!failed.is_empty());
    }

    #[test]
    fn starved_budget_reports_exhaustion_per_obligation() {
        let obs = verify_prelude(ReductionBudget { max_steps: 1 }).expect("runs");
        assert_eq!(obs.len(), 24);
        let exhausted = obs
            .iter()
            .filter(|o| matches!(&o.status, crate::interp::ObligationStatus::Failed(m) if m.contains("budget")))
            .count();
        assert!(exhausted > 0, "no obligation reported budget exhaustion");
    }
}
