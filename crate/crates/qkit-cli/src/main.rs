//! `qkit` command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | input could not be parsed (QASM or JSON file) |
//! | 3 | execution error |
//! | 4 | unknown algorithm (subcommand) |
//! | 5 | invalid parameters |

mod args;
mod commands;

use args::{Cli, Command, Output};
use clap::error::ErrorKind;
use clap::Parser;
use commands::Failure;
use serde_json::{json, Value};
use std::io::Write;
use std::process::ExitCode;

fn dispatch(cli: &Cli) -> Result<(Value, Value), Failure> {
    let s = cli.seed;
    let p = |v: &dyn erased::Ser| v.value();
    Ok(match &cli.command {
        Command::Run(a) => (commands::run(a, s)?, p(a)),
        Command::Grover(a) => (commands::grover(a, s)?, p(a)),
        Command::Bv(a) => (commands::bv(a, s)?, p(a)),
        Command::Qft(a) => (commands::qft(a)?, p(a)),
        Command::Shor(a) => (commands::shor(a, s)?, p(a)),
        Command::Hhl(a) => (commands::hhl(a, s)?, p(a)),
        Command::Qaoa(a) => (commands::qaoa(a, s)?, p(a)),
        Command::Walk(a) => (commands::walk(a, s)?, p(a)),
        Command::Vqe(a) => (commands::vqe(a, s)?, p(a)),
        Command::Pca(a) => (commands::pca(a, s)?, p(a)),
        Command::Potts(a) => (commands::potts(a, s)?, p(a)),
        Command::Schrodinger(a) => (commands::schrodinger(a)?, p(a)),
        Command::Minfind(a) => (commands::minfind(a, s)?, p(a)),
        Command::Layered(a) => (commands::layered(a, s)?, p(a)),
        Command::Group(a) => (commands::group(a, s)?, p(a)),
        Command::Prep(a) => (commands::prep(a)?, p(a)),
        Command::Synth(a) => (commands::synth(a)?, p(a)),
        Command::Tomography(a) => (commands::tomography(a, s)?, p(a)),
        Command::Qec(a) => (commands::qec(a, s)?, p(a)),
    })
}

/// Object-safe access to `serde_json::to_value` for the argument structs.
mod erased {
    pub trait Ser {
        fn value(&self) -> serde_json::Value;
    }
    impl<T: serde::Serialize> Ser for T {
        fn value(&self) -> serde_json::Value {
            serde_json::to_value(self).expect("arguments serialize")
        }
    }
}

/// Indented `key: value` listing of a JSON value.
fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Object(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(x, indent + 1, out);
                    }
                    Value::String(s) if s.contains('\n') => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for line in s.lines() {
                            out.push_str(&format!("{pad}  {line}\n"));
                        }
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar_text(x))),
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Writes to stdout, ignoring a closed pipe (for example `qkit … | head`).
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                ErrorKind::InvalidSubcommand => 4,
                _ => 5,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok((result, params)) => {
            match cli.output {
                Output::Json => {
                    let report = json!({
                        "tool": "qkit",
                        "version": qkit::VERSION,
                        "command": cli.command.name(),
                        "config": { "seed": cli.seed, "output": cli.output, "params": params },
                        "result": result,
                    });
                    emit(&format!("{}\n", serde_json::to_string_pretty(&report).expect("JSON values serialize")));
                }
                Output::Text => {
                    let mut out = format!("qkit {} {} (seed {})\n", qkit::VERSION, cli.command.name(), cli.seed);
                    render_text(&result, 0, &mut out);
                    emit(&out);
                }
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
