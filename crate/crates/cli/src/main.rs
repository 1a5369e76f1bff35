//! `litonto`: batch lenticular transforms, ISCN compilation and ontology
//! output.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 domain error (validation,
//! parse or compile failure).

mod config;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use litonto::iscn::{parse_checked, IscnError, ParseOptions};
use litonto::karyotype::{build_example_ontology, classify_sex, compile_karyotype, example_skeleton, KaryotypeError};
use litonto::lentic::{self, Diagnostic, LiterateSource, Severity, ViewKind};
use litonto::owl::{emit_frame, emit_manchester};
use serde_json::json;

use crate::config::{CliConfig, FileConfig, FlagConfig, OutputFormat};

#[derive(Parser)]
#[command(name = "litonto", version, about = "Lenticular literate sources and ISCN karyotype ontologies")]
struct Cli {
    #[command(flatten)]
    global: GlobalFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalFlags {
    /// Comment prefix for documentation lines in the code view, e.g. ";; ".
    #[arg(long, global = true, allow_hyphen_values = true)]
    prefix: Option<String>,
    /// Line that opens a code block.
    #[arg(long, global = true, allow_hyphen_values = true)]
    begin: Option<String>,
    /// Line that closes a code block.
    #[arg(long, global = true, allow_hyphen_values = true)]
    end: Option<String>,
    /// Reject unprefixed documentation lines (default).
    #[arg(long, global = true, conflicts_with = "lenient")]
    strict: bool,
    /// Downgrade unprefixed documentation lines to warnings.
    #[arg(long, global = true)]
    lenient: bool,
    /// Accept N in ISCN sex fields.
    #[arg(long, global = true)]
    allow_n: bool,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Config file (TOML).
    #[arg(long, global = true, env = "LITONTO_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a literate file into the document or code view.
    View {
        direction: Direction,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Validate a literate file and check that it round-trips.
    Check {
        input: PathBuf,
        /// View the file is written in.
        #[arg(long, value_enum)]
        view: Direction,
    },
    /// Parse, compile or classify an ISCN karyotype string.
    Iscn {
        action: IscnAction,
        #[arg(allow_hyphen_values = true)]
        karyotype: String,
        /// rdfs:comment for `build`.
        #[arg(long)]
        comment: Option<String>,
    },
    /// Write the example karyotype ontology in Manchester syntax.
    Examples {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Doc,
    Code,
}

impl Direction {
    fn view(self) -> ViewKind {
        match self {
            Direction::Doc => ViewKind::DocumentCentric,
            Direction::Code => ViewKind::CodeCentric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum IscnAction {
    Parse,
    Build,
    Classify,
}

enum Failure {
    Io(String),
    Domain(String),
    /// Diagnostics were already reported.
    Reported,
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Domain(_) | Failure::Reported => 2,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_flag = cli.global.json;
    let config = match load_config(cli.global) {
        Ok(config) => config,
        Err(failure) => return report_failure(failure, json_flag),
    };
    let result = match cli.command {
        Command::View { direction, input, output } => cmd_view(&config, direction, &input, output.as_deref()),
        Command::Check { input, view } => cmd_check(&config, &input, view.view()),
        Command::Iscn {
            action,
            karyotype,
            comment,
        } => cmd_iscn(&config, action, &karyotype, comment.as_deref()),
        Command::Examples { output } => cmd_examples(output.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => report_failure(failure, config.format == OutputFormat::Json),
    }
}

fn load_config(global: GlobalFlags) -> Result<CliConfig, Failure> {
    let file = match &global.config {
        Some(path) => FileConfig::load(path).map_err(Failure::Io)?,
        None => FileConfig::default(),
    };
    let strict = if global.lenient {
        Some(false)
    } else if global.strict {
        Some(true)
    } else {
        None
    };
    let flags = FlagConfig {
        prefix: global.prefix,
        begin: global.begin,
        end: global.end,
        strict,
        allow_n: global.allow_n,
        json: global.json,
    };
    CliConfig::resolve(flags, file).map_err(|e| Failure::Domain(format!("invalid configuration: {e}")))
}

fn report_failure(failure: Failure, json: bool) -> ExitCode {
    let code = failure.exit_code();
    match &failure {
        Failure::Io(message) | Failure::Domain(message) => {
            if json {
                eprintln!("{}", json!({ "error": message }));
            } else {
                eprintln!("error: {message}");
            }
        }
        Failure::Reported => {}
    }
    ExitCode::from(code)
}

fn read_source(path: &Path, view: ViewKind) -> Result<(LiterateSource, Vec<Diagnostic>), Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes).map_err(|e| Failure::Domain(format!("{} is not UTF-8: {e}", path.display())))?;
    Ok(LiterateSource::from_text(&text, view))
}

fn severity_str(severity: Severity) -> &'static str {
    match severity {
        Severity::Error => "error",
        Severity::Warning => "warning",
    }
}

fn print_diagnostics(config: &CliConfig, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        match config.format {
            OutputFormat::Human => eprintln!("{d}"),
            OutputFormat::Json => eprintln!(
                "{}",
                json!({
                    "line": d.line_number,
                    "severity": severity_str(d.severity),
                    "code": d.code.as_str(),
                    "message": d.message,
                })
            ),
        }
    }
}

fn write_output(output: Option<&Path>, text: &str) -> CmdResult {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| Failure::Io(format!("cannot write to standard output: {e}")))
        }
    }
}

fn cmd_view(config: &CliConfig, direction: Direction, input: &Path, output: Option<&Path>) -> CmdResult {
    let target = direction.view();
    let (src, mut diagnostics) = read_source(input, target.counterpart())?;
    diagnostics.extend(lentic::validate(&src, &config.literate));
    print_diagnostics(config, &diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(Failure::Reported);
    }
    let converted = lentic::propagate(&src, &config.literate).map_err(|e| Failure::Domain(e.to_string()))?;
    write_output(output, &converted.to_text())
}

fn first_difference(a: &LiterateSource, b: &LiterateSource) -> String {
    let at = a.lines().iter().zip(b.lines()).position(|(x, y)| x != y);
    match at {
        Some(i) => format!("line {} reads {:?} after the round trip, was {:?}", i + 1, b.lines()[i], a.lines()[i]),
        None if a.len() != b.len() => format!("line count changed from {} to {}", a.len(), b.len()),
        None => "trailing newline changed".to_owned(),
    }
}

fn cmd_check(config: &CliConfig, input: &Path, view: ViewKind) -> CmdResult {
    let (src, mut diagnostics) = read_source(input, view)?;
    diagnostics.extend(lentic::validate(&src, &config.literate));
    print_diagnostics(config, &diagnostics);
    if diagnostics.iter().any(Diagnostic::is_error) {
        return Err(Failure::Reported);
    }
    let lit = &config.literate;
    let round_trip = lentic::propagate(&src, lit).and_then(|other| lentic::propagate(&other, lit));
    let back = round_trip.map_err(|e| Failure::Domain(e.to_string()))?;
    if back != src {
        return Err(Failure::Domain(format!(
            "round-trip mismatch in {}: {}",
            input.display(),
            first_difference(&src, &back)
        )));
    }
    match config.format {
        OutputFormat::Human => println!("{}: ok ({} view, {} lines)", input.display(), view, src.len()),
        OutputFormat::Json => println!(
            "{}",
            json!({ "file": input.display().to_string(), "ok": true, "warnings": diagnostics.len() })
        ),
    }
    Ok(())
}

fn iscn_failure(err: KaryotypeError) -> Failure {
    Failure::Domain(err.to_string())
}

fn cmd_iscn(config: &CliConfig, action: IscnAction, karyotype: &str, comment: Option<&str>) -> CmdResult {
    let options = ParseOptions { allow_n: config.allow_n };
    let parsed = parse_checked(karyotype, options).map_err(|e: IscnError| Failure::Domain(e.to_string()))?;
    match action {
        IscnAction::Parse => {
            let json = parsed.to_json();
            let text = match config.format {
                OutputFormat::Json => json.to_string(),
                OutputFormat::Human => serde_json::to_string_pretty(&json).expect("JSON values serialize"),
            };
            println!("{text}");
        }
        IscnAction::Build => {
            let definition = compile_karyotype(&parsed).map_err(iscn_failure)?;
            let mut ontology = example_skeleton().map_err(|e| iscn_failure(e.into()))?;
            definition
                .add_to(&mut ontology, comment)
                .map_err(|e| iscn_failure(e.into()))?;
            let frame = emit_frame(&ontology, &definition.id).map_err(|e| iscn_failure(e.into()))?;
            match config.format {
                OutputFormat::Human => print!("{frame}"),
                OutputFormat::Json => println!("{}", json!({ "iscn": karyotype, "class": definition.id.to_string(), "manchester": frame })),
            }
        }
        IscnAction::Classify => {
            let definition = compile_karyotype(&parsed).map_err(iscn_failure)?;
            let sex = classify_sex(&definition).map_err(iscn_failure)?;
            match config.format {
                OutputFormat::Human => println!("{sex}"),
                OutputFormat::Json => println!("{}", json!({ "iscn": karyotype, "sex": sex.as_str() })),
            }
        }
    }
    Ok(())
}

fn cmd_examples(output: Option<&Path>) -> CmdResult {
    let ontology = build_example_ontology().map_err(iscn_failure)?;
    let text = emit_manchester(&ontology).map_err(|e| iscn_failure(e.into()))?;
    write_output(output, &text)
}
