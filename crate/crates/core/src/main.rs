use std::collections::BTreeMap;
use std::io::{Read as _, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cyglue::scenario::report::{oguiso_ample_report, wehler_ample_report, ErrorRecord};
use cyglue::scenario::{
    load_scenario, parse_binding, parse_center_override, presets::DEFAULT_Z_BOUND, run, sweep, Binding, Report,
    Stage, SweepResult,
};
use cyglue::Error;

#[derive(Parser)]
#[command(name = "cyglue", version, about = "Exact checks for glued normal-crossing Calabi-Yau threefolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeArg {
    Wehler,
    Oguiso,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (preset name or TOML file).
    Verify {
        target: String,
        /// NAME=VALUE bindings, e.g. `--param a=1 c=3`.
        #[arg(long = "param", num_args = 1..)]
        params: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values = ["hypotheses", "invariants", "ample", "projectivity"])]
        checks: Vec<Stage>,
        /// Replace a center class, e.g. `x1:1=2,2,2`.
        #[arg(long = "center")]
        centers: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a preset over an inclusive parameter range, e.g. `--param a=1..50`.
    Sweep {
        preset: String,
        #[arg(long = "param", num_args = 1.., required = true)]
        params: Vec<String>,
        #[arg(long, value_delimiter = ',', default_values = ["hypotheses", "invariants", "ample", "projectivity"])]
        checks: Vec<Stage>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Embed the full report of every item in JSON output.
        #[arg(long)]
        full: bool,
    },
    /// Re-render a saved JSON report (file or stdin).
    Report {
        path: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Certify an ample class outside any scenario.
    CertifyAmple {
        #[arg(long, value_enum)]
        lattice: LatticeArg,
        #[arg(long)]
        a: Option<i64>,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_Z_BOUND)]
        zbound: i64,
        /// Wehler class as x,y,z.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        class: Vec<i64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

enum Outcome {
    Pass,
    Fail,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 3,
        _ => 2,
    }
}

fn bindings(raw: &[String]) -> cyglue::Result<(BTreeMap<String, i64>, Vec<(String, i64, i64)>)> {
    let mut fixed = BTreeMap::new();
    let mut ranges = Vec::new();
    for b in raw {
        match parse_binding(b)? {
            Binding::Single(k, v) => {
                fixed.insert(k, v);
            }
            Binding::Range(k, lo, hi) => ranges.push((k, lo, hi)),
        }
    }
    Ok((fixed, ranges))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

/// Writes to stdout; a closed pipe is not an error.
fn out(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{}", text.trim_end());
}

fn emit(text: &str, output: Option<&PathBuf>) -> cyglue::Result<()> {
    match output {
        Some(p) => std::fs::write(p, text)?,
        None => out(text),
    }
    Ok(())
}

fn verify(
    target: &str,
    params: &[String],
    checks: &[Stage],
    centers: &[String],
    format: Format,
    output: Option<&PathBuf>,
) -> cyglue::Result<Outcome> {
    let (fixed, ranges) = bindings(params)?;
    if let Some((k, _, _)) = ranges.first() {
        return Err(Error::InvalidArgument(format!("range for `{k}` given to verify; use sweep")));
    }
    let mut s = load_scenario(target, &fixed)?;
    for c in centers {
        let (slot, index, class) = parse_center_override(c)?;
        s.override_center(slot, index, class)?;
    }
    let r = run(&s, checks)?;
    let text = match format {
        Format::Json => r.to_json(),
        Format::Text => r.render_text(),
    };
    emit(&text, output)?;
    for e in r.expectations.iter().filter(|e| !e.pass) {
        let actual = e.actual.as_ref().map_or("missing".to_string(), |v| v.to_string());
        eprintln!("expectation failed: {} expected {} got {}", e.name, e.expected, actual);
    }
    Ok(if r.passed { Outcome::Pass } else { Outcome::Fail })
}

fn sweep_cmd(preset: &str, params: &[String], checks: &[Stage], format: Format, full: bool) -> Result<Outcome, u8> {
    let (fixed, ranges) = bindings(params).map_err(report_error)?;
    let [(name, lo, hi)] = ranges.as_slice() else {
        return Err(report_error(Error::InvalidArgument("sweep needs exactly one NAME=LO..HI range".into())));
    };
    let result: SweepResult = sweep(preset, &fixed, name, *lo, *hi, checks, full).map_err(report_error)?;
    match format {
        Format::Json => out(&to_json(&result)),
        Format::Text => out(&result.render_text()),
    }
    let errors: Vec<&ErrorRecord> = result.items.iter().filter_map(|i| i.error.as_ref()).collect();
    if errors.iter().any(|e| e.kind == "resource") {
        Err(3)
    } else if !errors.is_empty() {
        Err(2)
    } else if result.failed > 0 {
        Ok(Outcome::Fail)
    } else {
        Ok(Outcome::Pass)
    }
}

fn report_cmd(path: Option<&PathBuf>, format: Format) -> cyglue::Result<Outcome> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p)?,
        None => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    let r = Report::from_json(&text)?;
    match format {
        Format::Json => out(&r.to_json()),
        Format::Text => out(&r.render_text()),
    }
    Ok(if r.passed { Outcome::Pass } else { Outcome::Fail })
}

fn certify(
    lattice: LatticeArg,
    a: Option<i64>,
    k: Option<i64>,
    zbound: i64,
    class: &[i64],
    format: Format,
) -> cyglue::Result<Outcome> {
    let missing = |f: &str| Error::InvalidArgument(format!("--{f} is required for this lattice"));
    match lattice {
        LatticeArg::Oguiso => {
            let a = a.ok_or_else(|| missing("a"))?;
            let c = oguiso_ample_report(a, k.unwrap_or(a), zbound)?;
            match format {
                Format::Json => out(&to_json(&c)),
                Format::Text => out(&format!("{} {}: ample = {}", c.lattice, fmt_class(&c.class), c.ample)),
            }
            Ok(if c.ample { Outcome::Pass } else { Outcome::Fail })
        }
        LatticeArg::Wehler => {
            if class.is_empty() {
                return Err(missing("class"));
            }
            let (amp, free) = wehler_ample_report(class)?;
            match format {
                Format::Json => out(&to_json(&serde_json::json!({ "ample": amp, "free": free }))),
                Format::Text => out(&format!("{} {}: ample = {}, free = {}", amp.lattice, fmt_class(&amp.class), amp.ample, free.free)),
            }
            Ok(if amp.ample && free.free { Outcome::Pass } else { Outcome::Fail })
        }
    }
}

fn fmt_class(v: &[cyglue::linalg::Int]) -> String {
    let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn report_error(e: Error) -> u8 {
    eprintln!("error: {e}");
    exit_code(&e)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result: Result<Outcome, u8> = match &cli.command {
        Command::Verify { target, params, checks, centers, format, output } => {
            verify(target, params, checks, centers, *format, output.as_ref()).map_err(report_error)
        }
        Command::Sweep { preset, params, checks, format, full } => sweep_cmd(preset, params, checks, *format, *full),
        Command::Report { path, format } => report_cmd(path.as_ref(), *format).map_err(report_error),
        Command::CertifyAmple { lattice, a, k, zbound, class, format } => {
            certify(*lattice, *a, *k, *zbound, class, *format).map_err(report_error)
        }
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(code) => ExitCode::from(code),
    }
}
