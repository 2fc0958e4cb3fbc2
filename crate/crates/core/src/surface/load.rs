//! Theory file loading: `require` resolution, import deduplication, cycle
//! detection, and the item-by-item elaboration driver used by the CLI.
//!
//! `require prelude` always refers to the built-in base signature, which is
//! placed before everything else no matter where the `require` appears. Any
//! other `require NAME` resolves to `NAME.pfk`, searched first in the
//! requiring file's directory and then in each `:`-separated entry of the
//! `PFK_PATH` environment variable. A file is loaded at most once; a `require`
//! cycle is an error.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::rewrite::ReductionBudget;
use crate::term::Term;
use crate::typing::{ElabError, Elaborator, RawEntry, Theory};

use super::parse::{parse_items, Item};
use super::print::print_term;
use super::ParseError;

/// The reserved theory name that resolves to the built-in base signature.
pub const BUILTIN_PRELUDE_NAME: &str = "prelude";

/// An item together with where it came from.
#[derive(Debug, Clone)]
pub struct LoadedItem {
    pub item: Item,
    /// Path (or embedded name) of the file that contained the item.
    pub origin: String,
    /// True when the item is written in the file that was asked for, rather
    /// than pulled in through a `require`.
    pub from_root: bool,
}

/// Fully resolved contents of a theory file and its imports, in elaboration
/// order.
#[derive(Debug, Clone)]
pub struct LoadResult {
    /// True when any file in the closure requires the base signature.
    pub prelude: bool,
    pub items: Vec<LoadedItem>,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{err}")]
    Parse { path: String, err: ParseError },
    #[error("circular require: {0}")]
    Cycle(String),
    #[error("required theory `{name}` not found (searched: {searched})")]
    NotFound { name: String, searched: String },
}

/// Load a theory file and everything it requires.
pub fn load_file(path: &Path) -> Result<LoadResult, LoadError> {
    let mut state = Loader {
        provider: Provider::Files,
        done: BTreeSet::new(),
        stack: Vec::new(),
        prelude: false,
        items: Vec::new(),
    };
    let (key, display, src, dir) = read_source(path)?;
    state.load_source(key, display, &src, dir, true)?;
    Ok(LoadResult {
        prelude: state.prelude,
        items: state.items,
    })
}

/// Load one of a fixed set of named sources (used for the built-in theories),
/// resolving `require` against the same set.
pub fn load_embedded(root: &str, sources: &[(&str, &str)]) -> Result<LoadResult, LoadError> {
    let mut state = Loader {
        provider: Provider::Embedded(sources),
        done: BTreeSet::new(),
        stack: Vec::new(),
        prelude: false,
        items: Vec::new(),
    };
    let src = lookup_embedded(sources, root)?;
    state.load_source(root.to_string(), root.to_string(), src, None, true)?;
    Ok(LoadResult {
        prelude: state.prelude,
        items: state.items,
    })
}

#[derive(Clone, Copy)]
enum Provider<'a> {
    Files,
    Embedded(&'a [(&'a str, &'a str)]),
}

struct Loader<'a> {
    provider: Provider<'a>,
    done: BTreeSet<String>,
    stack: Vec<String>,
    prelude: bool,
    items: Vec<LoadedItem>,
}

fn read_source(path: &Path) -> Result<(String, String, String, Option<PathBuf>), LoadError> {
    let display = path.display().to_string();
    let src = fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: display.clone(),
        source,
    })?;
    let key = fs::canonicalize(path)
        .map(|p| p.display().to_string())
        .unwrap_or_else(|_| display.clone());
    let dir = path.parent().map(|p| p.to_path_buf());
    Ok((key, display, src, dir))
}

fn lookup_embedded<'a>(sources: &[(&'a str, &'a str)], name: &str) -> Result<&'a str, LoadError> {
    sources
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| LoadError::NotFound {
            name: name.to_string(),
            searched: "built-in theories".to_string(),
        })
}

fn resolve_require(dir: Option<&Path>, name: &str) -> Result<PathBuf, LoadError> {
    let file = format!("{name}.pfk");
    let mut searched = Vec::new();
    if let Some(d) = dir {
        let candidate = d.join(&file);
        if candidate.is_file() {
            return Ok(candidate);
        }
        searched.push(candidate);
    }
    if let Ok(path_var) = std::env::var("PFK_PATH") {
        for entry in path_var.split(':').filter(|s| !s.is_empty()) {
            let candidate = Path::new(entry).join(&file);
            if candidate.is_file() {
                return Ok(candidate);
            }
            searched.push(candidate);
        }
    }
    Err(LoadError::NotFound {
        name: name.to_string(),
        searched: searched
            .iter()
            .map(|p| p.display().to_string())
            .collect::<Vec<_>>()
            .join(", "),
    })
}

impl<'a> Loader<'a> {
    fn load_source(
        &mut self,
        key: String,
        display: String,
        src: &str,
        dir: Option<PathBuf>,
        from_root: bool,
    ) -> Result<(), LoadError> {
        if self.done.contains(&key) {
            return Ok(());
        }
        if self.stack.contains(&key) {
            let mut chain = self.stack.clone();
            chain.push(key);
            return Err(LoadError::Cycle(chain.join(" -> ")));
        }
        self.stack.push(key.clone());
        let items = parse_items(src).map_err(|err| LoadError::Parse {
            path: display.clone(),
            err,
        })?;
        let provider = self.provider;
        for item in items {
            if let Item::Require(name) = &item {
                let name = name.clone();
                self.items.push(LoadedItem {
                    item,
                    origin: display.clone(),
                    from_root,
                });
                if name == BUILTIN_PRELUDE_NAME {
                    self.prelude = true;
                    continue;
                }
                match provider {
                    Provider::Files => {
                        let resolved = resolve_require(dir.as_deref(), &name)?;
                        let (key, disp, src, subdir) = read_source(&resolved)?;
                        self.load_source(key, disp, &src, subdir, false)?;
                    }
                    Provider::Embedded(sources) => {
                        let src = lookup_embedded(sources, &name)?;
                        self.load_source(name.clone(), name.clone(), src, None, false)?;
                    }
                }
            } else {
                self.items.push(LoadedItem {
                    item,
                    origin: display.clone(),
                    from_root,
                });
            }
        }
        self.stack.pop();
        self.done.insert(key);
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Elaboration driver
// ---------------------------------------------------------------------------

/// Result line for one processed item.
#[derive(Debug, Clone)]
pub struct ItemRecord {
    pub kind: &'static str,
    pub name: String,
    pub error: Option<String>,
}

/// A short report label for an item: its kind and the name it is best known
/// by (constants and definitions by their name, rules by their head constant,
/// assertions by their statement).
pub fn item_label(item: &Item) -> (&'static str, String) {
    match item {
        Item::Const { name, .. } => ("const", name.clone()),
        Item::Rule { lhs, .. } => (
            "rule",
            match lhs.spine().0 {
                Term::Const(c) => c.clone(),
                _ => "<rule>".to_string(),
            },
        ),
        Item::Def { name, .. } => ("def", name.clone()),
        Item::AssertConv(a, b) => ("assert", format!("{} == {}", print_term(a), print_term(b))),
        Item::AssertType(t, ty) => ("assert", format!("{} : {}", print_term(t), print_term(ty))),
        Item::Require(name) => ("require", name.clone()),
    }
}

fn to_raw(item: &Item) -> Option<RawEntry> {
    match item {
        Item::Const { name, ty } => Some(RawEntry::Const {
            name: name.clone(),
            ty: ty.clone(),
        }),
        Item::Rule { context, lhs, rhs } => Some(RawEntry::Rule {
            context: context.clone(),
            lhs: lhs.clone(),
            rhs: rhs.clone(),
        }),
        Item::Def { name, ty, body } => Some(RawEntry::Def {
            name: name.clone(),
            ty: ty.clone(),
            body: body.clone(),
        }),
        Item::AssertConv(a, b) => Some(RawEntry::AssertConv(a.clone(), b.clone())),
        Item::AssertType(t, ty) => Some(RawEntry::AssertType(t.clone(), ty.clone())),
        Item::Require(_) => None,
    }
}

/// Elaborate loaded items in order, producing one record per item. Stops at
/// the first failing item (the theory is unusable past it); the failing item
/// gets a record carrying the error.
pub fn elaborate_items(
    load: &LoadResult,
    budget: ReductionBudget,
) -> (Vec<ItemRecord>, Result<Theory, ElabError>) {
    let mut elab = Elaborator::new(budget);
    let mut records = Vec::new();
    if load.prelude {
        if let Err(e) = elab.include_prelude() {
            return (records, Err(e));
        }
    }
    for loaded in &load.items {
        let (kind, name) = item_label(&loaded.item);
        let outcome = match to_raw(&loaded.item) {
            Some(entry) => elab.push(entry),
            None => Ok(()),
        };
        match outcome {
            Ok(()) => records.push(ItemRecord {
                kind,
                name,
                error: None,
            }),
            Err(e) => {
                records.push(ItemRecord {
                    kind,
                    name,
                    error: Some(e.to_string()),
                });
                return (records, Err(e));
            }
        }
    }
    (records, Ok(elab.finish()))
}
