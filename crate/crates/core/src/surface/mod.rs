//! Concrete syntax: lexer, parser, printer, and file loader.
//!
//! Theory files (`.pfk`) hold declarations, rewrite rules, definitions,
//! assertions, and `require` imports. Parameter-map files (`.pfm`) assign the
//! two translation witnesses of each constant. The printer emits terms in the
//! same syntax the parser reads, so generated files round-trip.

mod lex;
mod load;
mod parse;
mod print;

use std::fmt;

pub use load::{
    elaborate_items, item_label, load_embedded, load_file, ItemRecord, LoadError, LoadResult,
    LoadedItem, BUILTIN_PRELUDE_NAME,
};
pub use parse::{
    parse_items, parse_param_entries, parse_term_src, parse_term_with, Item, ParamEntry,
    ParamSide,
};
pub use print::{print_item, print_rule, print_term};

/// A syntax error with its 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    pub fn new(line: u32, col: u32, message: String) -> Self {
        ParseError { line, col, message }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}
