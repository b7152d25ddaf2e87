mod args;
mod render;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use num_bigint::BigUint;
use serde::Serialize;

use args::{Cli, Command, Common, Format, Source, Which};
use qhe_toolkit::localiser::{self, LeakageCheck, LocalisationProblem};
use qhe_toolkit::qhe::{self, audit, QheScheme, Report, Verdict};
use qhe_toolkit::schemes::{self, Params};
use qhe_toolkit::tensor::Ket;
use qhe_toolkit::{Error, Tolerances};

const EXIT_FAIL: u8 = 2;
const EXIT_INAPPLICABLE: u8 = 3;
const EXIT_ERROR: u8 = 1;

type CliResult<T> = std::result::Result<T, String>;

#[derive(Serialize)]
struct Refusal {
    refused: bool,
    leakage: LeakageCheck,
    tolerance: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn run(cli: &Cli) -> CliResult<u8> {
    let tol = tolerances(&cli.common)?;
    match &cli.command {
        Command::Check { source, which } => check(&cli.common, source, *which, tol.equality),
        Command::Localise { source } => localise(&cli.common, source),
        Command::Audit { n, set_size } => {
            let a = match (n, set_size) {
                (Some(n), _) => audit::audit_reversible_classical(*n),
                (None, Some(expr)) => {
                    let size: BigUint = audit::parse_set_size(expr).map_err(|e| e.to_string())?;
                    audit::audit_dimension(&size).map(|mut a| {
                        a.expression = expr.trim().to_string();
                        a
                    })
                }
                (None, None) => unreachable!("clap requires one of --n, --set-size"),
            }
            .map_err(|e| e.to_string())?;
            emit(&cli.common, &a, || render::audit(&a))?;
            Ok(0)
        }
        Command::ExportScheme { builder, params } => {
            let params = parse_params(params)?;
            let json = if schemes::PROBLEM_BUILDERS.contains(&builder.as_str()) {
                let p = schemes::build_problem(builder, &params, cli.common.seed).map_err(|e| e.to_string())?;
                to_json(&p)?
            } else {
                to_json(&schemes::build_scheme(builder, &params).map_err(|e| e.to_string())?)?
            };
            write_out(&cli.common, &json)?;
            Ok(0)
        }
        Command::ListCatalog { verify } => {
            let entries = schemes::catalog();
            if !verify {
                emit(&cli.common, &entries, || render::catalog(&entries))?;
                return Ok(0);
            }
            let outs = entries
                .iter()
                .map(schemes::verify_entry)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            emit(&cli.common, &outs, || render::outcomes(&outs))?;
            Ok(if outs.iter().all(|o| o.matches) { 0 } else { EXIT_FAIL })
        }
    }
}

fn tolerances(common: &Common) -> CliResult<Tolerances> {
    let mut t = Tolerances::default();
    for item in &common.tol {
        let (name, value) = item.split_once('=').ok_or_else(|| format!("--tol expects NAME=VAL, got `{item}`"))?;
        let value: f64 = value.trim().parse().map_err(|_| format!("tolerance `{name}` is not a number"))?;
        t.set(name.trim(), value).map_err(|e| e.to_string())?;
    }
    Ok(t)
}

fn parse_params(items: &[String]) -> CliResult<Params> {
    let mut p = Params::new();
    for item in items {
        let (k, v) = match item.split_once('=') {
            Some((k, v)) => (k.trim().to_string(), v.trim().to_string()),
            None if item.contains(',') && item.chars().all(|c| c.is_ascii_digit() || c == ',') => {
                ("dims".to_string(), item.clone())
            }
            None => return Err(format!("--params expects K=V, got `{item}`")),
        };
        if p.insert(k.clone(), v).is_some() {
            return Err(format!("parameter `{k}` given twice"));
        }
    }
    Ok(p)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_scheme(source: &Source) -> CliResult<QheScheme> {
    match (&source.scheme, &source.builder) {
        (Some(path), _) => read_json(path),
        (None, Some(name)) => schemes::build_scheme(name, &parse_params(&source.params)?).map_err(|e| e.to_string()),
        (None, None) => Err("give --scheme FILE or --builder NAME".into()),
    }
}

fn load_problem(source: &Source, seed: u64) -> CliResult<LocalisationProblem> {
    match (&source.scheme, &source.builder) {
        (Some(path), _) => read_json(path),
        (None, Some(name)) => {
            schemes::build_problem(name, &parse_params(&source.params)?, seed).map_err(|e| e.to_string())
        }
        (None, None) => Err("give --problem FILE or --builder NAME".into()),
    }
}

fn check(common: &Common, source: &Source, which: Which, tol: f64) -> CliResult<u8> {
    let s = load_scheme(source)?;
    let psi = Ket::basis(s.plaintext_dim(), 0);
    let run = |w: Which| -> CliResult<Report> {
        match w {
            Which::Security => qhe::check_security(&s, tol),
            Which::Completeness => qhe::check_completeness(&s, tol),
            Which::Theorem1 => qhe::check_theorem1(&s, &psi, tol),
            Which::All => unreachable!(),
        }
        .map_err(|e| e.to_string())
    };
    let reports: Vec<Report> = match which {
        Which::All => [Which::Security, Which::Completeness, Which::Theorem1]
            .into_iter()
            .map(run)
            .collect::<CliResult<_>>()?,
        w => vec![run(w)?],
    };
    let text = || reports.iter().map(render::report).collect::<Vec<_>>().join("\n");
    match reports.as_slice() {
        [one] => emit(common, one, text)?,
        many => emit(common, &many, text)?,
    }
    let verdicts: Vec<Verdict> = reports.iter().map(|r| r.verdict).collect();
    Ok(if verdicts.contains(&Verdict::Fail) {
        EXIT_FAIL
    } else if verdicts.contains(&Verdict::Inapplicable) {
        EXIT_INAPPLICABLE
    } else {
        0
    })
}

fn localise(common: &Common, source: &Source) -> CliResult<u8> {
    let p = load_problem(source, common.seed)?;
    match localiser::localise(&p) {
        Ok(r) => {
            emit(common, &r, || render::localisation(&r))?;
            Ok(0)
        }
        Err(Error::Leakage { deviation, tolerance }) => {
            let refusal = Refusal {
                refused: true,
                leakage: LeakageCheck {
                    passed: false,
                    max_deviation: deviation,
                },
                tolerance,
            };
            emit(common, &refusal, || render::refusal(&refusal.leakage))?;
            Ok(EXIT_FAIL)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> CliResult<String> {
    serde_json::to_string_pretty(value).map(|mut s| {
        s.push('\n');
        s
    })
    .map_err(|e| e.to_string())
}

fn emit<T: Serialize + ?Sized>(common: &Common, value: &T, text: impl FnOnce() -> String) -> CliResult<()> {
    let body = match common.format {
        Format::Json => to_json(value)?,
        Format::Text => text(),
    };
    write_out(common, &body)
}

fn write_out(common: &Common, body: &str) -> CliResult<()> {
    match &common.out {
        Some(path) => fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}
