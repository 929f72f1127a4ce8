//! The `leibniz` command-line front end.
//!
//! [`run`] does all the work and returns the process exit code, so the
//! binary is a thin wrapper and tests can drive the CLI in-process.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::calculus::{self, CalculusError};
use crate::dsl::expr::is_valid_variable;
use crate::dsl::transfer::TransferOptions;
use crate::dsl::{
    evaluate, identities_transfer_check, parse_str, Bindings, CanonError, EvalError, SyntaxError, TransferReport,
};
use crate::gallery::{self, GalleryError};
use crate::lc::{LcError, LcNumber};
use crate::rational;
use crate::report::ExampleId;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_EVAL: i32 = 3;
pub const EXIT_FAILED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "leibniz", version, about = "Exact arithmetic with infinitesimals and infinite numbers")]
pub struct Cli {
    /// Relative truncation order of series arithmetic.
    #[arg(short = 'T', long, default_value_t = crate::lc::DEFAULT_PRECISION, value_parser = parse_precision, global = true)]
    pub precision: u32,
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Seed for the transfer sampler.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Binds a variable, `name=expr`. Later bindings may use earlier ones.
    #[arg(short = 'b', long = "bind", value_name = "NAME=EXPR", global = true)]
    pub bindings: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluates an expression and prints its series, class and shadow.
    Eval { expr: String },
    /// Differentiates with an infinitesimal increment at a rational point.
    Diff { expr: String, var: String, point: String },
    /// Runs one of the worked examples.
    Gallery {
        #[arg(value_parser = example_parser())]
        example: ExampleId,
        /// Writes the parabola rows `x0,y0,st_of_lhs` (ellipse_parabola only).
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Checks a file of `lhs == rhs` identities.
    Transfer {
        file: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Reads expressions and `name = expr` bindings from standard input.
    Repl,
}

fn parse_precision(s: &str) -> Result<u32, String> {
    let t: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if t < 2 {
        return Err("precision must be at least 2".into());
    }
    Ok(t)
}

fn example_parser() -> impl TypedValueParser<Value = ExampleId> {
    PossibleValuesParser::new(ExampleId::ALL.map(ExampleId::as_str))
        .map(|s: String| ExampleId::parse(&s).expect("restricted to known ids"))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn eval(message: impl Into<String>) -> Self {
        Failure { code: EXIT_EVAL, message: message.into() }
    }

    fn syntax(src: &str, e: &SyntaxError) -> Self {
        Failure::usage(format!("{e}\n  {src}\n  {}^", " ".repeat(src[..e.position().min(src.len())].chars().count())))
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e.arithmetic() {
            Some(source) => {
                Failure::eval(format!("{} ({}) at position {}", source, lc_error_name(source), e.position()))
            }
            None => Failure::eval(e.to_string()),
        }
    }
}

impl From<CalculusError> for Failure {
    fn from(e: CalculusError) -> Self {
        match e {
            CalculusError::Eval(inner) => inner.into(),
            CalculusError::Arithmetic(source) => Failure::eval(format!("{source} ({})", lc_error_name(&source))),
            other => Failure::eval(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

fn lc_error_name(e: &LcError) -> &'static str {
    match e {
        LcError::DivisionByZero => "DivisionByZero",
        LcError::NegativeLeadingCoefficient => "NegativeLeadingCoefficient",
        LcError::IrrationalSquareRoot(_) => "IrrationalSquareRoot",
        LcError::InfiniteOperand => "InfiniteOperand",
        LcError::PrecisionExhausted(_) => "PrecisionExhausted",
    }
}

type Outcome = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(&cli, input, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let env = bindings(cli)?;
    match &cli.command {
        Command::Eval { expr } => cmd_eval(expr, &env, cli.format, out),
        Command::Diff { expr, var, point } => cmd_diff(expr, var, point, &env, cli.format, out),
        Command::Gallery { example, csv } => cmd_gallery(*example, csv.as_deref(), cli.precision, cli.format, out),
        Command::Transfer { file, trials } => {
            let options = TransferOptions { trials: *trials, seed: cli.seed, precision: cli.precision };
            cmd_transfer(file, &options, cli.format, out)
        }
        Command::Repl => cmd_repl(env, cli.format, input, out, err),
    }
}

fn bindings(cli: &Cli) -> Result<Bindings, Failure> {
    let mut env = Bindings::new(cli.precision);
    for spec in &cli.bindings {
        let (name, src) = spec
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("binding `{spec}` is not of the form name=expr")))?;
        bind(&mut env, name.trim(), src)?;
    }
    Ok(env)
}

fn bind(env: &mut Bindings, name: &str, src: &str) -> Result<LcNumber, Failure> {
    if !is_valid_variable(name) {
        return Err(Failure::usage(format!("`{name}` cannot be bound")));
    }
    let e = parse_str(src).map_err(|e| Failure::syntax(src, &e))?;
    let value = evaluate(&e, env)?;
    env.insert(name, value.clone());
    Ok(value)
}

fn shadow_of(value: &LcNumber) -> Option<String> {
    value.classify().is_finite().then(|| value.standard_part().ok()).flatten().map(|q| rational::format(&q))
}

fn eval_json(src: &str, value: &LcNumber) -> serde_json::Value {
    json!({
        "expression": src,
        "value": value.to_json(),
        "display": value.to_string(),
        "classification": value.classify(),
        "shadow": shadow_of(value),
    })
}

fn write_eval(src: &str, value: &LcNumber, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => writeln!(out, "{}", eval_json(src, value)),
        Format::Text => {
            writeln!(out, "{value} ({})", value.classify())?;
            if let Some(s) = shadow_of(value) {
                writeln!(out, "shadow: {s}")?;
            }
            Ok(())
        }
    }
}

fn cmd_eval(src: &str, env: &Bindings, format: Format, out: &mut dyn Write) -> Outcome {
    let e = parse_str(src).map_err(|e| Failure::syntax(src, &e))?;
    let value = evaluate(&e, env)?;
    write_eval(src, &value, format, out)?;
    Ok(EXIT_OK)
}

fn cmd_diff(src: &str, var: &str, point: &str, env: &Bindings, format: Format, out: &mut dyn Write) -> Outcome {
    let e = parse_str(src).map_err(|e| Failure::syntax(src, &e))?;
    if !is_valid_variable(var) {
        return Err(Failure::usage(format!("`{var}` is not a variable name")));
    }
    let at = rational::parse(point).ok_or_else(|| Failure::usage(format!("`{point}` is not a rational number")))?;
    let d = calculus::derivative_at(&e, var, &at, env)?;
    let shadow = rational::format(&d.shadow);
    match format {
        Format::Json => writeln!(
            out,
            "{}",
            json!({
                "expression": src,
                "variable": var,
                "point": rational::format(&at),
                "quotient": d.quotient.to_json(),
                "shadow": shadow,
                "superfluous": d.discarded.to_json(),
            })
        )?,
        Format::Text => {
            writeln!(out, "quotient: {}", d.quotient)?;
            writeln!(out, "shadow: {shadow}")?;
            writeln!(out, "superfluous: {}", d.discarded)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_gallery(id: ExampleId, csv: Option<&Path>, precision: u32, format: Format, out: &mut dyn Write) -> Outcome {
    if csv.is_some() && id != ExampleId::EllipseParabola {
        return Err(Failure::usage("--csv is only available for ellipse_parabola"));
    }
    let report = match gallery::run_example(id, precision) {
        Ok(r) => r,
        Err(GalleryError::Calculus(e)) => return Err(e.into()),
        Err(e @ GalleryError::ChainBroken { .. }) => return Err(Failure { code: EXIT_FAILED, message: e.to_string() }),
    };
    if let Some(path) = csv {
        fs::write(path, gallery::parabola_csv(&gallery::default_grid(), precision))
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    match format {
        Format::Json => writeln!(out, "{}", report.to_json())?,
        Format::Text => writeln!(out, "{report}")?,
    }
    Ok(if report.pass { EXIT_OK } else { EXIT_FAILED })
}

struct Identity {
    line: usize,
    lhs: String,
    rhs: String,
}

fn read_corpus(path: &Path) -> Result<Vec<Identity>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let mut items = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (lhs, rhs) =
            content.split_once("==").ok_or_else(|| Failure::usage(format!("line {line}: expected `lhs == rhs`")))?;
        for side in [lhs, rhs] {
            parse_str(side.trim()).map_err(|e| Failure::usage(format!("line {line}: {e}")))?;
        }
        items.push(Identity { line, lhs: lhs.trim().to_string(), rhs: rhs.trim().to_string() });
    }
    Ok(items)
}

fn cmd_transfer(path: &Path, options: &TransferOptions, format: Format, out: &mut dyn Write) -> Outcome {
    let corpus = read_corpus(path)?;
    let mut results: Vec<(&Identity, TransferReport)> = Vec::with_capacity(corpus.len());
    for item in &corpus {
        let lhs = parse_str(&item.lhs).expect("checked while reading");
        let rhs = parse_str(&item.rhs).expect("checked while reading");
        let report = identities_transfer_check(&lhs, &rhs, options).map_err(|e| {
            let code = if matches!(e, CanonError::DivisionByZero { .. }) { EXIT_EVAL } else { EXIT_USAGE };
            Failure { code, message: format!("line {}: {e}", item.line) }
        })?;
        results.push((item, report));
    }
    let passed = results.iter().filter(|(_, r)| r.passed()).count();
    match format {
        Format::Json => {
            let items: Vec<_> = results
                .iter()
                .map(|(item, r)| json!({ "line": item.line, "lhs": item.lhs, "rhs": item.rhs, "pass": r.passed(), "report": r }))
                .collect();
            let doc = json!({ "identities": items, "passed": passed, "total": results.len(), "seed": options.seed });
            writeln!(out, "{doc}")?;
        }
        Format::Text => {
            for (item, r) in &results {
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                write!(out, "line {}: {} == {}: {verdict}", item.line, item.lhs, item.rhs)?;
                if r.identity {
                    write!(
                        out,
                        " (identity; {}/{} inassignable samples agree)",
                        r.agreeing_infinite_samples(),
                        r.infinite_samples.len()
                    )?;
                } else {
                    write!(out, " (not an identity")?;
                    if let Some(point) = &r.counterexample {
                        let shown: Vec<String> = point.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                        write!(out, "; counterexample {}", shown.join(", "))?;
                    }
                    write!(out, ")")?;
                }
                writeln!(out)?;
            }
            writeln!(out, "summary: {passed} of {} identities pass (seed {})", results.len(), options.seed)?;
        }
    }
    Ok(if passed == results.len() { EXIT_OK } else { EXIT_FAILED })
}

// A line is either `name = expr` or an expression. Errors are reported and
// the session continues.
fn cmd_repl(
    mut env: Bindings,
    format: Format,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Outcome {
    let mut line = String::new();
    loop {
        line.clear();
        if input.read_line(&mut line)? == 0 {
            return Ok(EXIT_OK);
        }
        let src = line.trim();
        if src.is_empty() {
            continue;
        }
        if matches!(src, "quit" | "exit" | ":q") {
            return Ok(EXIT_OK);
        }
        let step = match src.split_once('=') {
            Some((name, rhs)) if is_valid_variable(name.trim()) => {
                bind(&mut env, name.trim(), rhs.trim()).and_then(|v| Ok(write_eval(rhs.trim(), &v, format, out)?))
            }
            _ => parse_str(src)
                .map_err(|e| Failure::syntax(src, &e))
                .and_then(|e| Ok(evaluate(&e, &env)?))
                .and_then(|v| Ok(write_eval(src, &v, format, out)?)),
        };
        if let Err(f) = step {
            writeln!(err, "error: {}", f.message)?;
        }
        out.flush()?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(args: &[&str]) -> (i32, String, String) {
        cli_with_input(args, "")
    }

    fn cli_with_input(args: &[&str], stdin: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("leibniz").chain(args.iter().copied());
        let code = run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_shadow_with_binding() {
        let (code, out, err) = cli(&["eval", "st(2*x + eps)", "-b", "x=3"]);
        assert_eq!(code, 0);
        assert_eq!(out, "6 (appreciable)\nshadow: 6\n");
        assert!(err.is_empty());
    }

    #[test]
    fn eval_eps_times_h() {
        let (code, out, _) = cli(&["eval", "eps*H"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("1 (appreciable)\n"));
    }

    #[test]
    fn eval_infinite_has_no_shadow() {
        let (code, out, _) = cli(&["eval", "H + 1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "eps^-1 + 1 (infinite)\n");
    }

    #[test]
    fn eval_errors() {
        let (code, _, err) = cli(&["eval", "1/(x-x)", "-b", "x=1"]);
        assert_eq!(code, 3);
        assert!(err.contains("DivisionByZero"), "{err}");
        let (code, _, err) = cli(&["eval", "1 + * 2"]);
        assert_eq!(code, 2);
        assert!(err.contains("position 4"), "{err}");
        let (code, _, _) = cli(&["eval", "y"]);
        assert_eq!(code, 3);
    }

    #[test]
    fn bindings_chain_left_to_right() {
        let (code, out, _) = cli(&["eval", "y", "-b", "x=2", "-b", "y=x*H"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("2·eps^-1 (infinite)"), "{out}");
        let (code, _, _) = cli(&["eval", "y", "-b", "y=x*H", "-b", "x=2"]);
        assert_eq!(code, 3);
        let (code, _, _) = cli(&["eval", "1", "-b", "eps=2"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn precision_must_be_at_least_two() {
        assert_eq!(cli(&["-T", "1", "eval", "1"]).0, 2);
        assert_eq!(cli(&["-T", "2", "eval", "1"]).0, 0);
    }

    #[test]
    fn diff_square() {
        let (code, out, _) = cli(&["diff", "x^2", "x", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out, "quotient: 6 + eps\nshadow: 6\nsuperfluous: eps\n");
        let (_, out, _) = cli(&["diff", "c", "x", "0", "-b", "c=5"]);
        assert!(out.contains("shadow: 0\n"));
        assert_eq!(cli(&["diff", "x", "x", "abc"]).0, 2);
        assert_eq!(cli(&["diff", "x*H", "x", "1"]).0, 3);
    }

    #[test]
    fn gallery_exit_codes() {
        let (code, out, err) = cli(&["gallery", "parallel_lines"]);
        assert_eq!(code, 0, "{out}");
        assert!(err.is_empty());
        let (code, _, err) = cli(&["gallery", "bogus_id"]);
        assert_eq!(code, 2);
        assert!(err.contains("bogus_id"));
    }

    #[test]
    fn json_eval_agrees_with_text() {
        let (_, out, _) = cli(&["--format", "json", "eval", "1 - 4*eps"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["display"], "1 - 4·eps");
        assert_eq!(v["classification"], "appreciable");
        assert_eq!(v["shadow"], "1");
        assert_eq!(v["value"]["terms"][1]["coef"], "-4");
    }

    #[test]
    fn repl_keeps_bindings() {
        let (code, out, err) = cli_with_input(&["repl"], "x = 3\nst(2*x + eps)\n1/(x-3)\nquit\n");
        assert_eq!(code, 0);
        assert_eq!(out, "3 (appreciable)\nshadow: 3\n6 (appreciable)\nshadow: 6\n");
        assert!(err.contains("DivisionByZero"));
    }
}
