//! The `weil` command: identity lab, Weil-étale reports, zeta checks and
//! example documents.

mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use weil_core::chainlab::verifier::{self, VerifierConfig};
use weil_core::document::Document;
use weil_core::frobmod::FrobError;
use weil_core::weilcoh::{conjecture_verdicts, descent, rational_splitting_check, WeilError};
use weil_core::zetaval::{
    example_elliptic, example_projective_space, projective_motivic_dims, regulator_check, verify_zeta_formula,
    HodgeTable, ZetaError,
};
use weil_core::IntMatrix;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Failed = 1,
    Invalid = 2,
    Unsupported = 3,
}

#[derive(Parser, Debug)]
#[command(name = "weil", version, about = "Weil-étale cohomology and zeta special values at desk scale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the randomized chain-level identity suite.
    Lab(LabArgs),
    /// Print the Weil-étale report for a document.
    Weil {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Check the special-value formula for a document.
    ZetaCheck {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Write an example document.
    #[command(subcommand)]
    Example(ExampleKind),
}

#[derive(Args, Debug)]
struct LabArgs {
    #[arg(long, default_value_t = VerifierConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = VerifierConfig::default().cases)]
    cases: usize,
    #[arg(long, default_value_t = VerifierConfig::default().max_order)]
    max_order: u64,
    #[arg(long, default_value_t = VerifierConfig::default().max_level)]
    max_level: usize,
    #[arg(long, default_value_t = VerifierConfig::default().max_n)]
    max_n: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum ExampleKind {
    /// Projective space P^d.
    Pd {
        #[arg(long)]
        q: BigInt,
        #[arg(long)]
        d: usize,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Elliptic curve with Frobenius trace a, weight 1.
    Elliptic {
        #[arg(long)]
        q: BigInt,
        #[arg(long, allow_negative_numbers = true)]
        a: BigInt,
        #[arg(long)]
        p_part: Option<BigInt>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Invalid } else { Exit::Ok };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code as i32;
        }
    };
    let result = match cli.command {
        Command::Lab(a) => cmd_lab(&a, out),
        Command::Weil { file, json } => cmd_weil(&file, json, out),
        Command::ZetaCheck { file, json } => cmd_zeta_check(&file, json, out),
        Command::Example(kind) => cmd_example(kind, out),
    };
    match result {
        Ok(code) => code as i32,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code as i32
        }
    }
}

type CmdResult = Result<Exit, (Exit, String)>;

fn io_err(e: std::io::Error) -> (Exit, String) {
    (Exit::Invalid, e.to_string())
}

fn weil_exit(e: &WeilError) -> Exit {
    match e {
        WeilError::Module {
            source: FrobError::DegenerateDivisible(_),
            ..
        }
        | WeilError::NotSemisimple(_) => Exit::Unsupported,
        _ => Exit::Invalid,
    }
}

fn zeta_exit(e: &ZetaError) -> Exit {
    match e {
        ZetaError::Weil(w) => weil_exit(w),
        ZetaError::SeriesMismatch { .. } => Exit::Failed,
        ZetaError::AmbiguousTorsion(_) => Exit::Unsupported,
        _ => Exit::Invalid,
    }
}

fn load(file: &PathBuf) -> Result<Document, (Exit, String)> {
    let text = fs::read_to_string(file).map_err(|e| (Exit::Invalid, format!("{}: {e}", file.display())))?;
    Document::parse(&text).map_err(|e| (Exit::Invalid, e.to_string()))
}

fn cmd_lab(a: &LabArgs, out: &mut dyn Write) -> CmdResult {
    let config = VerifierConfig {
        seed: a.seed,
        cases: a.cases,
        max_order: a.max_order,
        max_level: a.max_level,
        max_n: a.max_n,
    };
    if config.max_order < 2 || config.max_level < 1 {
        return Err((Exit::Invalid, "max-order must be at least 2 and max-level at least 1".into()));
    }
    let report = verifier::run(&config);
    if a.json {
        writeln!(out, "{}", render::lab_json(&report)).map_err(io_err)?;
    } else {
        render::lab_text(&report, out).map_err(io_err)?;
    }
    Ok(if report.passed() { Exit::Ok } else { Exit::Failed })
}

fn cmd_weil(file: &PathBuf, json: bool, out: &mut dyn Write) -> CmdResult {
    let doc = load(file)?;
    let data = doc.etale_data();
    let report = descent(&data).map_err(|e| (weil_exit(&e), e.to_string()))?;
    let verdicts = conjecture_verdicts(&report);
    let splitting = doc.motivic_q_dims.as_ref().map(|m| rational_splitting_check(&report, m));
    if json {
        writeln!(out, "{}", render::weil_json(&report, &verdicts, splitting.as_ref())).map_err(io_err)?;
    } else {
        render::weil_text(&report, &verdicts, splitting.as_ref(), out).map_err(io_err)?;
    }
    Ok(Exit::Ok)
}

fn cmd_zeta_check(file: &PathBuf, json: bool, out: &mut dyn Write) -> CmdResult {
    let doc = load(file)?;
    let zeta = doc
        .zeta_input()
        .ok_or_else(|| (Exit::Invalid, "document has no zeta factors".to_string()))?;
    let data = doc.etale_data();
    let mut notes = Vec::new();
    let hodge = doc.hodge.clone().unwrap_or_else(|| {
        notes.push("no Hodge table: exponent taken as 0".to_string());
        HodgeTable::default()
    });
    let mut report = verify_zeta_formula(&zeta, &data, &hodge).map_err(|e| (zeta_exit(&e), e.to_string()))?;
    report.warnings.extend(notes);
    let regulator = match &doc.pairing {
        Some(pairing) => {
            let w = descent(&data).map_err(|e| (weil_exit(&e), e.to_string()))?;
            Some(regulator_check(&w, pairing, data.d, data.n).map_err(|e| (zeta_exit(&e), e.to_string()))?)
        }
        None => None,
    };
    let passed = report.passed() && regulator.as_ref().is_none_or(|r| r.passed);
    if json {
        writeln!(out, "{}", render::zeta_json(&report, regulator.as_ref(), passed)).map_err(io_err)?;
    } else {
        render::zeta_text(&report, regulator.as_ref(), passed, out).map_err(io_err)?;
    }
    Ok(if passed { Exit::Ok } else { Exit::Failed })
}

fn cmd_example(kind: ExampleKind, out: &mut dyn Write) -> CmdResult {
    let (doc, output) = match kind {
        ExampleKind::Pd { q, d, n, output } => {
            let ex = example_projective_space(&q, d, n).map_err(|e| (zeta_exit(&e), e.to_string()))?;
            let mut doc = Document::from_example(&ex);
            if (0..=d as i64).contains(&n) {
                doc.pairing = Some(IntMatrix::identity(1));
                doc.motivic_q_dims = Some(projective_motivic_dims(d, n));
            }
            (doc, output)
        }
        ExampleKind::Elliptic { q, a, p_part, output } => {
            let ex = example_elliptic(&q, &a, p_part.as_ref()).map_err(|e| (zeta_exit(&e), e.to_string()))?;
            (Document::from_example(&ex), output)
        }
    };
    let text = doc.to_json_string();
    match output {
        Some(path) => fs::write(&path, text).map_err(|e| (Exit::Invalid, format!("{}: {e}", path.display())))?,
        None => out.write_all(text.as_bytes()).map_err(io_err)?,
    }
    Ok(Exit::Ok)
}
