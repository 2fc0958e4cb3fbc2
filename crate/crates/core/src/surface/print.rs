//! Term and item printer. Output re-parses to the same term (up to renaming
//! of binders that do not occur), with parentheses only where the grammar
//! needs them.

use std::fmt::Write;

use crate::rewrite::RewriteRule;
use crate::term::{count_free_occurrences, Sort, Term};

use super::parse::Item;

/// Precedence levels, loosest to tightest: products and abstractions bind
/// loosest, application tighter, atoms tightest.
const LEVEL_TERM: u8 = 0;
const LEVEL_APP: u8 = 1;
const LEVEL_ATOM: u8 = 2;

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    fmt_term(t, LEVEL_TERM, &mut out);
    out
}

fn fmt_term(t: &Term, level: u8, out: &mut String) {
    match t {
        Term::Sort(Sort::Type) => out.push_str("TYPE"),
        Term::Sort(Sort::Kind) => out.push_str("KIND"),
        Term::Var(x) | Term::Const(x) => out.push_str(x),
        // Placeholders occur only in diagnostics, never in emitted theories.
        Term::Hole => out.push('?'),
        Term::App(f, a) => {
            let parens = level > LEVEL_APP;
            if parens {
                out.push('(');
            }
            fmt_term(f, LEVEL_APP, out);
            out.push(' ');
            fmt_term(a, LEVEL_ATOM, out);
            if parens {
                out.push(')');
            }
        }
        Term::Lam(x, ann, body) => {
            let parens = level > LEVEL_TERM;
            if parens {
                out.push('(');
            }
            let _ = write!(out, "\\ ({x} : ");
            fmt_term(ann, LEVEL_TERM, out);
            out.push_str("). ");
            fmt_term(body, LEVEL_TERM, out);
            if parens {
                out.push(')');
            }
        }
        Term::Pi(x, dom, cod) => {
            let parens = level > LEVEL_TERM;
            if parens {
                out.push('(');
            }
            if count_free_occurrences(cod, x) == 0 {
                fmt_term(dom, LEVEL_APP, out);
                out.push_str(" -> ");
            } else {
                let _ = write!(out, "({x} : ");
                fmt_term(dom, LEVEL_TERM, out);
                out.push_str(") -> ");
            }
            fmt_term(cod, LEVEL_TERM, out);
            if parens {
                out.push(')');
            }
        }
    }
}

pub fn print_item(item: &Item) -> String {
    match item {
        Item::Const { name, ty } => format!("{name} : {}.", print_term(ty)),
        Item::Rule { context, lhs, rhs } => {
            let mut out = String::from("rule [");
            let mut first = true;
            for (x, ty) in context.iter() {
                if !first {
                    out.push_str(", ");
                }
                let _ = write!(out, "{x} : {}", print_term(ty));
                first = false;
            }
            let _ = write!(out, "] {} --> {}.", print_term(lhs), print_term(rhs));
            out
        }
        Item::Def { name, ty, body } => {
            format!("def {name} : {} := {}.", print_term(ty), print_term(body))
        }
        Item::AssertConv(a, b) => format!("assert {} == {}.", print_term(a), print_term(b)),
        Item::AssertType(t, ty) => format!("assert {} : {}.", print_term(t), print_term(ty)),
        Item::Require(name) => format!("require {name}."),
    }
}

/// Display a rewrite rule in source syntax (diagnostics).
pub fn print_rule(rule: &RewriteRule) -> String {
    print_item(&Item::Rule {
        context: rule.context.clone(),
        lhs: rule.lhs.clone(),
        rhs: rule.rhs.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::super::parse::{parse_items, parse_term_src, parse_term_with};
    use super::*;
    use crate::term::{app, apps, cst, lam, pi, var};

    fn roundtrip(src: &str) {
        let t = parse_term_src(src).unwrap();
        let printed = print_term(&t);
        let back = parse_term_src(&printed).unwrap();
        assert_eq!(t, back, "printed form `{printed}` changed the term");
    }

    #[test]
    fn atoms_print_bare() {
        assert_eq!(print_term(&cst("o")), "o");
        assert_eq!(print_term(&var("x")), "x");
        assert_eq!(print_term(&crate::term::ty()), "TYPE");
    }

    #[test]
    fn application_spacing_and_parens() {
        assert_eq!(
            print_term(&apps(cst("geq"), [var("x"), cst("z0")])),
            "geq x z0"
        );
        assert_eq!(
            print_term(&app(cst("El"), app(cst("succ"), cst("z0")))),
            "El (succ z0)"
        );
    }

    #[test]
    fn dependent_product_shows_binder() {
        let t = pi(
            "x",
            app(cst("El"), cst("nat")),
            app(cst("Prf"), apps(cst("geq"), [var("x"), var("x")])),
        );
        assert_eq!(print_term(&t), "(x : El nat) -> Prf (geq x x)");
    }

    #[test]
    fn vacuous_product_prints_as_arrow() {
        let t = pi("unused", cst("Set"), cst("Set"));
        assert_eq!(print_term(&t), "Set -> Set");
    }

    #[test]
    fn arrow_domain_parenthesized_when_nested() {
        let t = parse_term_src("(a -> b) -> c").unwrap();
        assert_eq!(print_term(&t), "(a -> b) -> c");
        let u = parse_term_src("a -> b -> c").unwrap();
        assert_eq!(print_term(&u), "a -> b -> c");
    }

    #[test]
    fn lambda_prints_with_annotation() {
        let t = lam("x", app(cst("El"), cst("nat")), var("x"));
        assert_eq!(print_term(&t), "\\ (x : El nat). x");
    }

    #[test]
    fn lambda_as_argument_is_parenthesized() {
        let t = app(cst("rec"), lam("x", cst("a"), var("x")));
        assert_eq!(print_term(&t), "rec (\\ (x : a). x)");
    }

    #[test]
    fn roundtrips() {
        roundtrip("o");
        roundtrip("geq x z0");
        roundtrip("(x : El nat) -> Prf (geq x x)");
        roundtrip("El o -> Set");
        roundtrip("(a -> b) -> a -> b");
        roundtrip("\\ (p : El o). impd p (\\ (h : Prf p). p)");
        roundtrip("f (\\ (x : a). x) ((y : b) -> c y)");
        roundtrip("pi_ x (\\ (h : Prf x). y h)");
    }

    #[test]
    fn item_roundtrips() {
        let srcs = [
            "nat : Set.",
            "def one : El nat := succ z0.",
            "rule [x : Set, y : El x -> Set] El (arrd x y) --> (z : El x) -> El (y z).",
            "rule [] c --> d.",
            "assert succ z0 == succ z0.",
            "assert z0 : El nat.",
            "require prelude.",
        ];
        for src in srcs {
            let items = parse_items(src).unwrap();
            let printed = print_item(&items[0]);
            let back = parse_items(&printed).unwrap();
            assert_eq!(items, back, "printed item `{printed}` changed meaning");
        }
    }

    #[test]
    fn printed_variables_reparse_as_variables() {
        let t = parse_term_with("geq x z0", &["x"]).unwrap();
        let printed = print_term(&t);
        assert_eq!(printed, "geq x z0");
        let back = parse_term_with(&printed, &["x"]).unwrap();
        assert_eq!(t, back);
    }
}
