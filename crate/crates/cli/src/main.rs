//! `ontb`: compile domain-model chains to B System text and sync B-side
//! additions back.

mod diag;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ontb_core::bsystem::{emit_chain, load_canonical, save_canonical, BSystemComponent, EmitMode};
use ontb_core::domain_model::{parse_dsl_with_spans, serialize_dsl, validate, DomainModel, SourceMap};
use ontb_core::sync_back::{apply_delta, ModelDelta, SyncError};
use ontb_core::translator::{check_store, translate, CorrespondenceStore, TranslateError};

use diag::Diag;

/// Exit status per diagnostic class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok = 0,
    Input = 1,
    Invalid = 2,
    Collision = 3,
    Unsyncable = 4,
    InconsistentStore = 5,
    CheckFailed = 6,
}

type Outcome = Result<(), Status>;

#[derive(Parser)]
#[command(name = "ontb", version, about = "Domain-model ontology to B System compiler")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate a domain-model file into B System components.
    Translate {
        dsl: PathBuf,
        /// Output directory for `<component>.sys`, components.json and the store.
        #[arg(short = 'o', long = "out")]
        out: PathBuf,
        /// Store path; defaults to `<out>/store.json`.
        #[arg(long)]
        store: Option<PathBuf>,
        /// Emit mathematical symbols instead of ASCII notation.
        #[arg(long)]
        unicode: bool,
        /// Treat warnings as validation failures.
        #[arg(long)]
        strict: bool,
    },
    /// Validate a domain-model file.
    Validate {
        dsl: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Apply B-side additions to the domain model, store and components.
    SyncBack {
        delta: PathBuf,
        dsl: PathBuf,
        components: PathBuf,
        #[arg(long)]
        store: PathBuf,
    },
    /// Check a store against its domain model and components.
    Check {
        components: PathBuf,
        dsl: PathBuf,
        #[arg(long)]
        store: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let diag = Diag::from_env();
    let result = match cli.command {
        Command::Translate { dsl, out, store, unicode, strict } => {
            let store = store.unwrap_or_else(|| out.join("store.json"));
            let mode = if unicode { EmitMode::Unicode } else { EmitMode::Ascii };
            cmd_translate(&diag, &dsl, &out, &store, mode, strict)
        }
        Command::Validate { dsl, strict } => cmd_validate(&diag, &dsl, strict).map(|_| ()),
        Command::SyncBack { delta, dsl, components, store } => cmd_sync_back(&diag, &delta, &dsl, &components, &store),
        Command::Check { components, dsl, store } => cmd_check(&diag, &components, &dsl, &store),
    };
    ExitCode::from(result.err().unwrap_or(Status::Ok) as u8)
}

fn load_dsl(diag: &Diag, path: &Path) -> Result<(Vec<DomainModel>, SourceMap), Status> {
    let text = io::read(diag, path)?;
    parse_dsl_with_spans(&text).map_err(|e| {
        diag.at(path, Some((e.line, e.column)), diag::Level::Error, &e.message);
        Status::Input
    })
}

fn load_components(diag: &Diag, path: &Path) -> Result<Vec<BSystemComponent>, Status> {
    let text = io::read(diag, path)?;
    load_canonical(&text).map_err(|e| {
        diag.at(path, None, diag::Level::Error, &e.to_string());
        Status::Input
    })
}

fn load_store(diag: &Diag, path: &Path) -> Result<CorrespondenceStore, Status> {
    let text = io::read(diag, path)?;
    CorrespondenceStore::from_json(&text).map_err(|e| {
        diag.at(path, None, diag::Level::Error, &e.to_string());
        Status::Input
    })
}

/// Parse and validate, printing every diagnostic against the source.
fn cmd_validate(diag: &Diag, path: &Path, strict: bool) -> Result<Vec<DomainModel>, Status> {
    let (chain, spans) = load_dsl(diag, path)?;
    let report = validate(&chain);
    for d in report.iter() {
        diag.domain(path, &spans, d);
    }
    if !report.is_empty() || (strict && !report.warnings.is_empty()) {
        return Err(Status::Invalid);
    }
    Ok(chain)
}

fn cmd_translate(diag: &Diag, dsl: &Path, out: &Path, store_path: &Path, mode: EmitMode, strict: bool) -> Outcome {
    let chain = cmd_validate(diag, dsl, strict)?;
    let (components, store) = translate(&chain).map_err(|e| {
        match &e {
            TranslateError::Invalid(report) => {
                for d in report.iter() {
                    diag.at(dsl, None, d.severity.into(), &d.to_string());
                }
                return Status::Invalid;
            }
            TranslateError::Collision { .. } => diag.at(dsl, None, diag::Level::Error, &e.to_string()),
        }
        Status::Collision
    })?;
    let texts = emit_chain(&components, mode).map_err(|e| {
        diag.at(dsl, None, diag::Level::Error, &e.to_string());
        Status::Input
    })?;

    // Everything is rendered before the first write.
    let mut files: Vec<(PathBuf, String)> = texts.into_iter().map(|(name, text)| (out.join(format!("{name}.sys")), text)).collect();
    files.push((out.join("components.json"), save_canonical(&components)));
    files.push((store_path.to_path_buf(), store.to_json()));
    io::write_all(diag, &files)?;
    for (path, _) in &files {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_sync_back(diag: &Diag, delta_path: &Path, dsl: &Path, components_path: &Path, store_path: &Path) -> Outcome {
    let delta_text = io::read(diag, delta_path)?;
    let delta = ModelDelta::from_json(&delta_text).map_err(|e| {
        diag.at(delta_path, None, diag::Level::Error, &e.to_string());
        Status::Input
    })?;
    let (chain, _) = load_dsl(diag, dsl)?;
    let components = load_components(diag, components_path)?;
    let store = load_store(diag, store_path)?;

    let out = match apply_delta(&delta, &chain, &components, &store) {
        Ok(out) => out,
        Err(SyncError::InconsistentStore(report)) => {
            for d in report.iter() {
                diag.at(store_path, None, d.severity.into(), &format!("{}: {}: {}", d.code, d.path, d.message));
            }
            return Err(Status::InconsistentStore);
        }
        Err(e) => {
            diag.at(delta_path, None, diag::Level::Error, &e.to_string());
            return Err(Status::Input);
        }
    };

    for w in &out.report.warnings {
        diag.at(delta_path, None, diag::Level::Warning, w);
    }
    for s in &out.report.synced {
        println!("synced #{} {} via {}", s.index, s.element, s.rule);
    }
    for u in &out.report.unsyncable {
        println!("UNSYNCABLE #{} {}: {}", u.index, u.element, u.reason);
    }
    // Untouched inputs stay byte-identical.
    if !out.report.synced.is_empty() {
        io::write_all(
            diag,
            &[
                (dsl.to_path_buf(), serialize_dsl(&out.chain)),
                (components_path.to_path_buf(), save_canonical(&out.components)),
                (store_path.to_path_buf(), out.store.to_json()),
            ],
        )?;
    }
    if out.report.all_synced() {
        Ok(())
    } else {
        Err(Status::Unsyncable)
    }
}

fn cmd_check(diag: &Diag, components_path: &Path, dsl: &Path, store_path: &Path) -> Outcome {
    let (chain, _) = load_dsl(diag, dsl)?;
    let components = load_components(diag, components_path)?;
    let store = load_store(diag, store_path)?;
    let report = check_store(&store, &chain, &components);
    for d in report.iter() {
        diag.at(store_path, None, d.severity.into(), &format!("{}: {}: {}", d.code, d.path, d.message));
    }
    if report.is_empty() {
        println!("store consistent");
        Ok(())
    } else {
        Err(Status::CheckFailed)
    }
}
