//! Batch front end: potential DSL and quiver JSON in, deterministic JSON or
//! text reports out.
//!
//! Exit codes: 0 = all checks passed, 1 = a mathematical check failed,
//! 2 = parse or validation error.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use necklace::algebra::{check_cy_pairing, check_unit_assoc, extract_algebra};
use necklace::bracket::{cyclic_derivative, necklace_bracket, Potential};
use necklace::complex::{Complex, Selector};
use necklace::conventions::conventions_report;
use necklace::dsl::{doc_of, parse_potential, print_potential, PotentialDoc};
use necklace::quiver::{
    canonical_potential_in, ext_of, phi_from_ext, shifted_alphabet, validate_quiver, ExtData,
    RawQuiver,
};
use necklace::{master_residual, EngineError};

#[derive(Parser)]
#[command(name = "necklace", version, about = "cyclic-word engine for quiver potentials")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the master equation {W, W} = 0 for a potential document
    CheckMaster { file: String },
    /// Cyclic derivative of the series by one variable
    Derive {
        file: String,
        #[arg(long)]
        var: String,
    },
    /// Necklace bracket of two series over the same declared alphabet
    Bracket { file_f: String, file_g: String },
    /// Canonical potential of a symmetric quiver (JSON in, DSL out)
    Canonical { file: String },
    /// Cohomology dimensions of the deformation complex of the canonical
    /// potential
    Cohomology {
        file: String,
        #[arg(long, default_value = "gcan")]
        selector: String,
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 2)]
        w_min: i64,
        #[arg(long)]
        w_max: i64,
    },
    /// Extract the algebra of a cubic potential and run unit/associativity
    /// and pairing checks
    Algebra { file: String },
    /// Classify Ext data into a quiver (or validate a quiver and report its
    /// Ext data)
    Classify { file: String },
    /// Print the resolved sign conventions document
    Conventions,
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| e.to_string())?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

/// Parse/validation failures exit 2; mathematical failures exit 1.
fn error_class(e: &EngineError) -> u8 {
    match e {
        EngineError::Parse { .. }
        | EngineError::UnknownVariable(_)
        | EngineError::MissingDual(_)
        | EngineError::AlphabetMismatch(_)
        | EngineError::NotComposable(_) => 2,
        _ => 1,
    }
}

struct Outcome {
    report: Value,
    text: String,
    failures: Vec<String>,
}

fn finish(cli_format: Format, out: Outcome) -> ExitCode {
    let code = if out.failures.is_empty() { 0 } else { 1 };
    match cli_format {
        Format::Json => {
            let mut report = out.report;
            if let Value::Object(map) = &mut report {
                map.insert(
                    "failures".into(),
                    Value::Array(out.failures.iter().map(|f| json!(f)).collect()),
                );
            }
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        Format::Text => {
            println!("{}", out.text);
            for f in &out.failures {
                println!("FAIL: {f}");
            }
        }
    }
    ExitCode::from(code)
}

fn bail(cli_format: Format, command: &str, code: u8, message: String) -> ExitCode {
    match cli_format {
        Format::Json => {
            let report = json!({
                "command": command,
                "error": message,
                "failures": [message],
            });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
        Format::Text => {
            eprintln!("error: {message}");
        }
    }
    ExitCode::from(code)
}

fn load_doc(path: &str) -> Result<PotentialDoc, (u8, String)> {
    let text = read_input(path).map_err(|e| (2, e))?;
    parse_potential(&text).map_err(|e| (error_class(&e), e.to_string()))
}

fn load_json<T: serde::de::DeserializeOwned>(path: &str) -> Result<T, (u8, String)> {
    let text = read_input(path).map_err(|e| (2, e))?;
    serde_json::from_str(&text).map_err(|e| (2, e.to_string()))
}

fn math<T>(r: necklace::Result<T>) -> Result<T, (u8, String)> {
    r.map_err(|e| (error_class(&e), e.to_string()))
}

fn run(cli: &Cli) -> Result<Outcome, (u8, String)> {
    match &cli.cmd {
        Cmd::CheckMaster { file } => {
            let doc = load_doc(file)?;
            let residual = math(master_residual(&doc.alphabet, &doc.series))?;
            let terms = residual.num_terms();
            let failures = if terms == 0 {
                vec![]
            } else {
                vec![format!(
                    "master equation: residual {}",
                    residual.display(&doc.alphabet)
                )]
            };
            Ok(Outcome {
                report: json!({
                    "command": "check-master",
                    "residual_terms": terms,
                    "residual": residual.display(&doc.alphabet),
                }),
                text: if terms == 0 {
                    "OK: {W,W} = 0".to_string()
                } else {
                    format!("{{W,W}} = {}", residual.display(&doc.alphabet))
                },
                failures,
            })
        }
        Cmd::Derive { file, var } => {
            let doc = load_doc(file)?;
            let z = math(doc.alphabet.lookup(var))?;
            let partial = cyclic_derivative(&doc.alphabet, &doc.series, z);
            let shown = partial.display(&doc.alphabet);
            Ok(Outcome {
                report: json!({
                    "command": "derive",
                    "var": var,
                    "partial": shown,
                }),
                text: shown,
                failures: vec![],
            })
        }
        Cmd::Bracket { file_f, file_g } => {
            let f = load_doc(file_f)?;
            let g = load_doc(file_g)?;
            let decls = |d: &PotentialDoc| {
                print_potential(d)
                    .lines()
                    .filter(|l| l.starts_with("var "))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            if decls(&f) != decls(&g) {
                return Err((
                    2,
                    "the two documents declare different alphabets".to_string(),
                ));
            }
            let b = math(necklace_bracket(&f.alphabet, &f.series, &g.series))?;
            let shown = b.display(&f.alphabet);
            Ok(Outcome {
                report: json!({
                    "command": "bracket",
                    "bracket": shown,
                }),
                text: shown,
                failures: vec![],
            })
        }
        Cmd::Canonical { file } => {
            let raw: RawQuiver = load_json(file)?;
            let q = math(validate_quiver(&raw))?;
            let alpha = math(shifted_alphabet(&q))?;
            let w = math(canonical_potential_in(&q, &alpha))?;
            let doc_text = print_potential(&doc_of(&alpha, &w));
            Ok(Outcome {
                report: json!({
                    "command": "canonical",
                    "potential": doc_text,
                }),
                text: doc_text,
                failures: vec![],
            })
        }
        Cmd::Cohomology {
            file,
            selector,
            n,
            w_min,
            w_max,
        } => {
            let sel = Selector::parse(selector)
                .ok_or_else(|| (2u8, format!("unknown selector {selector:?}")))?;
            if let Ok(threads) = std::env::var("NECKLACE_THREADS") {
                let threads: usize = threads
                    .parse()
                    .map_err(|_| (2u8, "NECKLACE_THREADS must be an integer".to_string()))?;
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global()
                    .ok();
            }
            let raw: RawQuiver = load_json(file)?;
            let q = math(validate_quiver(&raw))?;
            let alpha = math(shifted_alphabet(&q))?;
            let w = math(canonical_potential_in(&q, &alpha))?;
            let cx = Complex::new(math(Potential::new(alpha, w))?);
            let report = math(cx.cohomology_scan(sel, (*n, *n), *w_min, *w_max))?;
            let mut text = String::new();
            for b in &report.blocks {
                text.push_str(&format!(
                    "H^{}_w={}: dim {} (domain {}, ker {}, im {})\n",
                    b.n, b.w, b.dim_h, b.dim_domain, b.dim_ker, b.rank_in
                ));
            }
            Ok(Outcome {
                report: serde_json::to_value(&report).unwrap(),
                text: text.trim_end().to_string(),
                failures: vec![],
            })
        }
        Cmd::Algebra { file } => {
            let doc = load_doc(file)?;
            let table = math(extract_algebra(&doc.alphabet, &doc.series))?;
            let unit = check_unit_assoc(&table);
            let pairing = check_cy_pairing(&table);
            let mut failures = Vec::new();
            for r in [&unit, &pairing] {
                for f in &r.failures {
                    failures.push(format!("{}: {}", r.name, f));
                }
            }
            let labels: Vec<&str> = table.basis.iter().map(|b| b.label.as_str()).collect();
            Ok(Outcome {
                report: json!({
                    "command": "algebra",
                    "basis": labels,
                    "checks": [unit, pairing],
                }),
                text: format!(
                    "basis: {}\nunit/associativity: {}\npairing: {}",
                    labels.join(", "),
                    if unit.pass() { "pass" } else { "FAIL" },
                    if pairing.pass() { "pass" } else { "FAIL" },
                ),
                failures,
            })
        }
        Cmd::Classify { file } => {
            let value: Value = load_json(file)?;
            if value.get("ext1_dim").is_some() {
                let ext: ExtData =
                    serde_json::from_value(value).map_err(|e| (2u8, e.to_string()))?;
                match phi_from_ext(&ext) {
                    Ok(q) => {
                        let back = ext_of(&q);
                        let mut failures = vec![];
                        if back != ext {
                            failures.push("round trip ext_of(phi(E)) != E".to_string());
                        }
                        let raw = q.to_raw();
                        Ok(Outcome {
                            report: json!({
                                "command": "classify",
                                "quiver": serde_json::to_value(&raw).unwrap(),
                            }),
                            text: serde_json::to_string_pretty(&raw).unwrap(),
                            failures,
                        })
                    }
                    Err(EngineError::InvalidQuiver { code, message }) => Ok(Outcome {
                        report: json!({ "command": "classify" }),
                        text: "not classifiable".to_string(),
                        failures: vec![format!("{code}: {message}")],
                    }),
                    Err(e) => Err((error_class(&e), e.to_string())),
                }
            } else {
                let raw: RawQuiver =
                    serde_json::from_value(value).map_err(|e| (2u8, e.to_string()))?;
                match validate_quiver(&raw) {
                    Ok(q) => {
                        let ext = ext_of(&q);
                        Ok(Outcome {
                            report: json!({
                                "command": "classify",
                                "ext": serde_json::to_value(&ext).unwrap(),
                            }),
                            text: serde_json::to_string_pretty(&ext).unwrap(),
                            failures: vec![],
                        })
                    }
                    Err(EngineError::InvalidQuiver { code, message }) => Ok(Outcome {
                        report: json!({ "command": "classify" }),
                        text: "invalid quiver".to_string(),
                        failures: vec![format!("{code}: {message}")],
                    }),
                    Err(e) => Err((error_class(&e), e.to_string())),
                }
            }
        }
        Cmd::Conventions => {
            let doc = conventions_report();
            Ok(Outcome {
                report: json!({
                    "command": "conventions",
                    "document": doc,
                }),
                text: doc.trim_end().to_string(),
                failures: vec![],
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match &cli.cmd {
        Cmd::CheckMaster { .. } => "check-master",
        Cmd::Derive { .. } => "derive",
        Cmd::Bracket { .. } => "bracket",
        Cmd::Canonical { .. } => "canonical",
        Cmd::Cohomology { .. } => "cohomology",
        Cmd::Algebra { .. } => "algebra",
        Cmd::Classify { .. } => "classify",
        Cmd::Conventions => "conventions",
    };
    match run(&cli) {
        Ok(outcome) => finish(cli.format, outcome),
        Err((code, message)) => bail(cli.format, command, code, message),
    }
}
