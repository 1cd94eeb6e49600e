use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dolce_kernel::engine::query::query;
use dolce_kernel::engine::registry::{self, check_all};
use dolce_kernel::engine::report::{render_json, render_text};
use dolce_kernel::surface::{self, fixtures::FIXTURES};
use dolce_kernel::{close, KnowledgeBase};

#[derive(Parser)]
#[command(name = "dolce", version, about = "Check knowledge bases against the DOLCE axioms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Close the KB and report axiom violations.
    Check {
        file: PathBuf,
        /// Report only these labels (comma separated).
        #[arg(long, value_delimiter = ',')]
        strict_labels: Option<Vec<String>>,
        /// Suppress these labels.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        disable: Vec<String>,
        #[arg(long)]
        add_life_events: bool,
        #[arg(long)]
        skolemize_sums: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Test hook: `drop-REL-arg...`, `drop:(lit)` or `add:(form)`.
        #[arg(long, hide = true)]
        mutate: Vec<String>,
    },
    /// Print bindings for a pattern such as "(K ?w T t)".
    Query {
        file: PathBuf,
        pattern: String,
        #[arg(long)]
        skolemize_sums: bool,
    },
    /// Print an axiom's formula.
    Explain {
        /// KB file; accepted for symmetry with the other commands.
        file: Option<PathBuf>,
        label: Option<String>,
    },
    /// List the bundled case fixtures.
    Fixtures {
        /// Print the source of one fixture.
        #[arg(long)]
        show: Option<String>,
    },
}

fn load(file: &Path) -> Result<KnowledgeBase, String> {
    let tax = surface::taxonomy_from_env().map_err(|e| e.to_string())?;
    // `cases/case1_table.dkb` and friends resolve to the bundled copies
    // when no such file exists on disk
    if !file.exists() {
        let bundled = file.file_name().and_then(|n| n.to_str()).and_then(surface::fixtures::fixture);
        if let Some(f) = bundled.filter(|f| f.file == file.file_name().unwrap()) {
            return surface::load_str_with(f.source, tax).map_err(|e| format!("{}: {e}", file.display()));
        }
    }
    surface::load_file(file, tax).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Check { file, strict_labels, disable, add_life_events, skolemize_sums, format, mutate } => {
            let mut kb = load(&file)?;
            for m in &mutate {
                surface::mutate(&mut kb, m).map_err(|e| e.to_string())?;
            }
            kb.options.add_life_events |= add_life_events;
            kb.options.skolemize_sums |= skolemize_sums;
            kb.options.disabled.extend(disable);
            if let Some(only) = strict_labels {
                kb.options.only = Some(only.into_iter().collect());
            }
            let ckb = close(&kb).map_err(|e| format!("{}: {e}", file.display()))?;
            for w in ckb.warnings() {
                eprintln!("warning: {w}");
            }
            let reports = check_all(&ckb);
            match format {
                Format::Text => print!("{}", render_text(&reports, ckb.kb())),
                Format::Json => print!("{}", render_json(&reports, ckb.kb())),
            }
            Ok(if reports.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Query { file, pattern, skolemize_sums } => {
            let mut kb = load(&file)?;
            kb.options.skolemize_sums |= skolemize_sums;
            let ckb = close(&kb).map_err(|e| format!("{}: {e}", file.display()))?;
            let res = query(&ckb, &pattern).map_err(|e| e.to_string())?;
            print!("{}", res.render(&ckb));
            Ok(ExitCode::SUCCESS)
        }
        Command::Explain { file, label } => {
            // `explain LABEL` and `explain FILE LABEL` both work
            let (file, label) = match (file, label) {
                (Some(f), None) => (None, f.to_string_lossy().into_owned()),
                (f, Some(l)) => (f, l),
                (None, None) => return Err("explain needs an axiom label".into()),
            };
            if let Some(f) = &file {
                load(f)?;
            }
            let text = registry::explain(&label).ok_or_else(|| format!("unknown axiom label `{label}`"))?;
            print!("{text}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Fixtures { show } => {
            match show {
                Some(name) => {
                    let f = surface::fixtures::fixture(&name).ok_or_else(|| format!("no fixture `{name}`"))?;
                    print!("{}", f.source);
                }
                None => {
                    for f in FIXTURES {
                        println!("{:<8} {:<20} {}", f.name, f.file, f.summary);
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
