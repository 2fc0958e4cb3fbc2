//! Embedded example theories: natural numbers, integers, the interpretation
//! of the former in the latter, and a file of transferred theorems.
//!
//! These mirror the files under `corpus/` at the repository root and are
//! compiled in so the library and the command-line `selftest` work without a
//! checkout. Accessors panic on malformed embedded data — the test suite
//! elaborates all of it, so a panic here means the build itself is broken.

use crate::interp::ParamMap;
use crate::rewrite::ReductionBudget;
use crate::surface::{elaborate_items, load_embedded, parse_param_entries, Item};
use crate::typing::Theory;

/// Natural numbers: zero, successor, an order, and induction.
pub const NAT_SRC: &str = include_str!("../../../corpus/nat.pfk");

/// Integers: zero, successor, predecessor, an order, generalized induction,
/// and proof irrelevance.
pub const INT_SRC: &str = include_str!("../../../corpus/int.pfk");

/// Parameter map interpreting the natural numbers in the integers.
pub const NAT_TO_INT_SRC: &str = include_str!("../../../corpus/nat_to_int.pfm");

/// Two theorems over the natural numbers, proved by induction.
pub const THM_NAT_SRC: &str = include_str!("../../../corpus/thm_nat.pfk");

/// The embedded sources, addressable by `require` name.
pub const EMBEDDED: &[(&str, &str)] = &[
    ("nat", NAT_SRC),
    ("int", INT_SRC),
    ("thm_nat", THM_NAT_SRC),
];

fn load_theory(name: &str) -> Theory {
    let load = load_embedded(name, EMBEDDED)
        .unwrap_or_else(|e| panic!("embedded theory `{name}` fails to load: {e}"));
    let (_, theory) = elaborate_items(&load, ReductionBudget::default());
    theory.unwrap_or_else(|e| panic!("embedded theory `{name}` fails to elaborate: {e}"))
}

/// The theory of natural numbers, elaborated over the base signature.
pub fn nat_theory() -> Theory {
    load_theory("nat")
}

/// The theory of integers (with proof irrelevance), elaborated over the base
/// signature.
pub fn int_theory() -> Theory {
    load_theory("int")
}

/// The full parameter map for interpreting the naturals in the integers.
pub fn nat_to_int_params() -> ParamMap {
    let entries = parse_param_entries(NAT_TO_INT_SRC).expect("embedded parameter map parses");
    ParamMap::from_entries(entries).expect("embedded parameter map is well-formed")
}

/// The theorem file over the naturals: the theory it elaborates to (the
/// naturals plus two proved definitions) and the items stated in the file
/// itself, in order — the part a transfer carries across.
pub fn nat_theorems() -> (Theory, Vec<Item>) {
    let load = load_embedded("thm_nat", EMBEDDED).expect("embedded theorem file loads");
    let (_, theory) = elaborate_items(&load, ReductionBudget::default());
    let theory = theory.unwrap_or_else(|e| panic!("embedded theorem file fails to check: {e}"));
    let own = load
        .items
        .iter()
        .filter(|li| li.from_root)
        .map(|li| li.item.clone())
        .collect();
    (theory, own)
}
