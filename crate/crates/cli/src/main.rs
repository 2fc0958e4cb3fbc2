//! `pfk` — batch driver for the kernel: check theory files, verify that a
//! parameter map makes one theory interpret another, transfer theorems
//! across a verified interpretation, self-check the built-in base
//! signature, and run the randomized property suites.
//!
//! Exit codes: 0 when everything passed, 1 on semantic failures (failed
//! items, obligations, or re-checks), 2 on usage, file, parse, or
//! elaboration-of-input errors.

mod props;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pfk_core::interp::{check_interpretation, transfer_theory, ParamMap, TransferError};
use pfk_core::prelude::{verify_prelude, PRELUDE_SRC};
use pfk_core::rewrite::ReductionBudget;
use pfk_core::surface::{
    elaborate_items, load_file, parse_param_entries, print_item, Item, LoadResult,
};
use pfk_core::typing::Theory;

use report::{Format, Record, Report};

/// Typecheck theories, verify interpretations, and transfer proofs.
#[derive(Parser)]
#[command(name = "pfk", version)]
struct Cli {
    /// Maximum head-reduction steps for any single kernel operation.
    #[arg(long, global = true, default_value_t = 100_000)]
    budget: u64,
    /// Report rendering on standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, elaborate, and check theory files, assertions included.
    Check {
        /// Theory files; each is loaded with its `require` closure.
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Verify that a parameter map interprets a source theory in a target.
    Interp {
        /// Source theory file.
        source: PathBuf,
        /// Target theory file.
        target: PathBuf,
        /// Parameter map assigning both halves of every source constant.
        #[arg(long)]
        map: PathBuf,
    },
    /// Translate a theorem file across an interpretation and re-check it.
    Transfer {
        /// Theorem file; the theories it requires form the source.
        theorems: PathBuf,
        /// Target theory file.
        target: PathBuf,
        /// Parameter map for the background interpretation.
        #[arg(long)]
        map: PathBuf,
        /// Write the translated theorems to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Trust the interpretation instead of re-verifying its obligations.
        #[arg(long)]
        assume_checked: bool,
    },
    /// Verify the built-in base signature against its own interpretation.
    Selftest {
        /// Also write the built-in signature's source text to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the seeded property suites.
    Prop {
        /// Random seed shared by all suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = ReductionBudget {
        max_steps: cli.budget,
    };
    let report = match &cli.command {
        Command::Check { files } => cmd_check(files, budget),
        Command::Interp {
            source,
            target,
            map,
        } => cmd_interp(source, target, map, budget),
        Command::Transfer {
            theorems,
            target,
            map,
            out,
            assume_checked,
        } => cmd_transfer(theorems, target, map, out.as_deref(), *assume_checked, budget),
        Command::Selftest { out } => cmd_selftest(out.as_deref(), budget),
        Command::Prop { seed } => cmd_prop(*seed, budget),
    };
    print!("{}", report.render(cli.format));
    ExitCode::from(report.exit_code as u8)
}

fn show(path: &Path) -> String {
    path.display().to_string()
}

/// Load a file and elaborate its closure, treating any failure as fatal
/// (for the commands whose inputs must already be good).
fn load_theory(command: &str, path: &Path, budget: ReductionBudget) -> Result<Theory, Report> {
    let loaded = load_file(path)
        .map_err(|e| Report::fatal(command.to_string(), show(path), e.to_string()))?;
    let (records, built) = elaborate_items(&loaded, budget);
    built.map_err(|e| {
        let at = records
            .iter()
            .find(|r| r.error.is_some())
            .map(|r| format!("{} {}", r.kind, r.name))
            .unwrap_or_else(|| show(path));
        Report::fatal(command.to_string(), at, e.to_string())
    })
}

fn load_params(command: &str, path: &Path) -> Result<ParamMap, Report> {
    let src = fs::read_to_string(path)
        .map_err(|e| Report::fatal(command.to_string(), show(path), e.to_string()))?;
    let entries = parse_param_entries(&src)
        .map_err(|e| Report::fatal(command.to_string(), show(path), e.to_string()))?;
    ParamMap::from_entries(entries)
        .map_err(|e| Report::fatal(command.to_string(), show(path), e.to_string()))
}

fn cmd_check(files: &[PathBuf], budget: ReductionBudget) -> Report {
    let command = format!(
        "check {}",
        files.iter().map(|p| show(p)).collect::<Vec<_>>().join(" ")
    );
    let mut records = Vec::new();
    let mut fatal = false;
    for file in files {
        match load_file(file) {
            Err(e) => {
                records.push(Record::failed("error", show(file), e.to_string()));
                fatal = true;
            }
            Ok(loaded) => {
                let (items, _) = elaborate_items(&loaded, budget);
                records.extend(items.iter().map(Record::from_item));
            }
        }
    }
    Report::new(command, records, fatal)
}

fn cmd_interp(source: &Path, target: &Path, map: &Path, budget: ReductionBudget) -> Report {
    let command = format!(
        "interp {} {} --map {}",
        show(source),
        show(target),
        show(map)
    );
    let (src, tgt, params) = match (
        load_theory(&command, source, budget),
        load_theory(&command, target, budget),
        load_params(&command, map),
    ) {
        (Ok(s), Ok(t), Ok(p)) => (s, t, p),
        (Err(r), _, _) | (_, Err(r), _) | (_, _, Err(r)) => return r,
    };
    match check_interpretation(&src, &tgt, &params, budget) {
        Ok(obligations) => {
            let records = obligations.iter().map(Record::from_obligation).collect();
            Report::new(command, records, false)
        }
        // An incomplete map or an untranslatable entry is a usage error, not
        // a failed obligation.
        Err(e) => Report::fatal(command, show(map), e.to_string()),
    }
}

fn cmd_transfer(
    theorems: &Path,
    target: &Path,
    map: &Path,
    out: Option<&Path>,
    assume_checked: bool,
    budget: ReductionBudget,
) -> Report {
    let mut command = format!(
        "transfer {} {} --map {}",
        show(theorems),
        show(target),
        show(map)
    );
    if let Some(out) = out {
        command.push_str(&format!(" --out {}", show(out)));
    }
    if assume_checked {
        command.push_str(" --assume-checked");
    }

    let loaded = match load_file(theorems) {
        Ok(l) => l,
        Err(e) => return Report::fatal(command, show(theorems), e.to_string()),
    };
    let (records_src, built) = elaborate_items(&loaded, budget);
    let src = match built {
        Ok(t) => t,
        Err(e) => {
            let at = records_src
                .iter()
                .find(|r| r.error.is_some())
                .map(|r| format!("{} {}", r.kind, r.name))
                .unwrap_or_else(|| show(theorems));
            return Report::fatal(command, at, e.to_string());
        }
    };
    let tgt = match load_theory(&command, target, budget) {
        Ok(t) => t,
        Err(r) => return r,
    };
    let params = match load_params(&command, map) {
        Ok(p) => p,
        Err(r) => return r,
    };

    let mut records = Vec::new();
    if !assume_checked {
        // The interpretation is of the background theory — everything the
        // theorem file requires, nothing it states itself.
        let background = LoadResult {
            prelude: loaded.prelude,
            items: loaded
                .items
                .iter()
                .filter(|it| !it.from_root)
                .cloned()
                .collect(),
        };
        let (_, built) = elaborate_items(&background, budget);
        let background = match built {
            Ok(t) => t,
            Err(e) => return Report::fatal(command, show(theorems), e.to_string()),
        };
        match check_interpretation(&background, &tgt, &params, budget) {
            Ok(obligations) => {
                records.extend(obligations.iter().map(Record::from_obligation));
                if obligations.iter().any(|o| !o.ok()) {
                    return Report::new(command, records, false);
                }
            }
            Err(e) => return Report::fatal(command, show(map), e.to_string()),
        }
    }

    let from_root: Vec<Item> = loaded
        .items
        .iter()
        .filter(|it| it.from_root)
        .map(|it| it.item.clone())
        .collect();
    let target_stem = target
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| show(target));

    match transfer_theory(&src, &tgt, &params, &from_root, &target_stem, budget) {
        Ok(output) => {
            for name in &output.transferred {
                records.push(Record::ok("transfer", name));
            }
            if let Some(path) = out {
                let text: String = output
                    .items
                    .iter()
                    .map(|it| format!("{}\n", print_item(it)))
                    .collect();
                if let Err(e) = fs::write(path, text) {
                    records.push(Record::failed("error", show(path), e.to_string()));
                    return Report::new(command, records, true);
                }
            }
            Report::new(command, records, false)
        }
        Err(TransferError::Recheck { name, cause }) => {
            records.push(Record::failed("transfer", name, cause.to_string()));
            Report::new(command, records, false)
        }
        Err(e) => {
            records.push(Record::failed("error", show(theorems), e.to_string()));
            Report::new(command, records, true)
        }
    }
}

fn cmd_selftest(out: Option<&Path>, budget: ReductionBudget) -> Report {
    let mut command = "selftest".to_string();
    if let Some(out) = out {
        command.push_str(&format!(" --out {}", show(out)));
    }
    if let Some(path) = out {
        if let Err(e) = fs::write(path, PRELUDE_SRC) {
            return Report::fatal(command, show(path), e.to_string());
        }
    }
    match verify_prelude(budget) {
        Ok(obligations) => {
            let records = obligations.iter().map(Record::from_obligation).collect();
            Report::new(command, records, false)
        }
        Err(e) => Report::fatal(command, "base signature", e.to_string()),
    }
}

fn cmd_prop(seed: u64, budget: ReductionBudget) -> Report {
    let command = format!("prop --seed {seed}");
    let records = props::SUITES
        .iter()
        .map(|suite| match (suite.run)(seed, budget) {
            Ok(rounds) => {
                let unit = if rounds == 1 { "round" } else { "rounds" };
                Record::ok("prop", format!("{} ({rounds} {unit})", suite.name))
            }
            Err(cause) => Record::failed("prop", suite.name, cause),
        })
        .collect();
    Report::new(command, records, false)
}
