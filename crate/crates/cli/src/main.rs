//! `semifourier`: compute, verify and use semi-Fourier sequences from the
//! command line.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 parse error, 3 failed
//! verification (or a fixture mismatch), 4 work budget exceeded, 5 numeric
//! evaluation error.

mod fixtures;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_traits::FromPrimitive;
use serde_json::json;

use semifourier::json::sequence_to_json;
use semifourier::print::{self, Style};
use semifourier::sequence::DEFAULT_BUDGET;
use semifourier::verify::{
    root_count_bound, root_count_bound_exact, verify_numeric, verify_symbolic, EvalConfig, Parity,
    RootBound, VerificationReport, VerifyError,
};
use semifourier::{eisf_with, parse, EtsfOptions, Expr, RatSequence, Rational, SfError};

#[derive(Parser)]
#[command(
    name = "semifourier",
    version,
    about = "Semi-Fourier sequences of Exp-Int expressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the sequence and print it as a table or as JSON.
    Compute {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
        /// Also print the nested call trace.
        #[arg(long)]
        trace: bool,
        /// Compute every bundled fixture and compare with its golden table.
        #[arg(long, conflicts_with_all = ["expr", "file"])]
        fixtures: bool,
    },
    /// Check the sequence exactly, and numerically when an interval is given.
    Verify {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        eval: EvalArgs,
        #[command(flatten)]
        output: Output,
        /// Verify every bundled fixture symbolically (and numerically when an
        /// interval is given).
        #[arg(long, conflicts_with_all = ["expr", "file"])]
        fixtures: bool,
    },
    /// Print the sign-change bound on the number of roots in (A, B].
    CountRoots {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        eval: EvalArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Print the nested call trace of the computation.
    Trace {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args)]
struct Input {
    /// Expression, e.g. "exp(x*int(exp(-x^2))) - int(exp(-x^2)) - 3".
    #[arg(allow_hyphen_values = true)]
    expr: Option<String>,
    /// Read the expression from a file (lines starting with '#' are skipped).
    #[arg(long, short, conflicts_with = "expr")]
    file: Option<PathBuf>,
    /// Work budget for the computation.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct Output {
    /// Emit JSON.
    #[arg(long, conflicts_with = "table")]
    json: bool,
    /// Emit a plain-text table (the default).
    #[arg(long)]
    table: bool,
    /// Use Unicode minus signs and superscripts in tables.
    #[arg(long)]
    unicode: bool,
}

impl Output {
    fn style(&self) -> Style {
        if self.unicode {
            Style::Unicode
        } else {
            Style::Ascii
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    /// Interval endpoints A B.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_hyphen_values = true)]
    interval: Option<Vec<f64>>,
    /// Number of sample points.
    #[arg(long, default_value_t = 20)]
    points: usize,
    /// Relative tolerance of the numeric check.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Point where integration constants are fixed (default 0 when it lies in
    /// the interval, else A).
    #[arg(long, allow_hyphen_values = true)]
    base_point: Option<f64>,
    /// Value of the integral generator fK at the base point, as K=V
    /// (default 0). May be repeated.
    #[arg(long = "constant", value_name = "K=V", value_parser = parse_constant)]
    constants: Vec<(usize, f64)>,
}

fn parse_constant(s: &str) -> Result<(usize, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected K=V")?;
    let k = k
        .trim()
        .trim_start_matches('f')
        .parse()
        .map_err(|_| format!("bad generator index {k:?}"))?;
    let v = v.trim().parse().map_err(|_| format!("bad value {v:?}"))?;
    Ok((k, v))
}

impl EvalArgs {
    fn config(&self) -> Option<EvalConfig> {
        let iv = self.interval.as_ref()?;
        Some(EvalConfig {
            base_point: self.base_point,
            constants: self.constants.iter().copied().collect::<BTreeMap<_, _>>(),
            samples: self.points,
            rel_tol: self.tol,
            ..EvalConfig::with_interval(iv[0], iv[1])
        })
    }
}

/// A failed run, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(String),
    Verify(String),
    Budget(String),
    Eval(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Verify(_) => 3,
            Failure::Budget(_) => 4,
            Failure::Eval(_) => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m)
            | Failure::Parse(m)
            | Failure::Verify(m)
            | Failure::Budget(m)
            | Failure::Eval(m) => m,
        }
    }
}

impl From<SfError> for Failure {
    fn from(e: SfError) -> Self {
        match e {
            SfError::Budget { .. } => Failure::Budget(e.to_string()),
            SfError::Tower(_) => Failure::Parse(format!("expression is not well formed: {e}")),
            SfError::Descent { .. } => Failure::Verify(format!("internal error: {e}")),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Config(_) => Failure::Usage(e.to_string()),
            VerifyError::AllDiscarded => {
                Failure::Eval(format!("{e} (try a --base-point away from singularities)"))
            }
            _ => Failure::Eval(e.to_string()),
        }
    }
}

fn read_expr(input: &Input) -> Result<Expr, Failure> {
    let text = match (&input.expr, &input.file) {
        (Some(e), _) => e.clone(),
        (None, Some(path)) => {
            let raw = fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            fixtures::strip_comments(&raw)
        }
        (None, None) => return Err(Failure::Usage("give an expression or --file".into())),
    };
    parse(&text).map_err(|e| {
        let caret = format!(
            "{}{}",
            " ".repeat(e.span.start),
            "^".repeat((e.span.end - e.span.start).max(1))
        );
        Failure::Parse(format!("{e}\n  {text}\n  {caret}"))
    })
}

fn compute(expr: &Expr, budget: u64) -> Result<RatSequence, Failure> {
    let opts = EtsfOptions {
        budget,
        trace: false,
    };
    Ok(eisf_with(expr, &opts)?.0)
}

fn cmd_compute(input: &Input, out: &Output, trace: bool) -> Result<(), Failure> {
    let expr = read_expr(input)?;
    let opts = EtsfOptions {
        budget: input.budget,
        trace,
    };
    let (seq, run) = eisf_with(&expr, &opts)?;
    let trace_text = print::trace_to_string(&run.trace, out.style());
    if out.json {
        let mut v = sequence_to_json(&seq);
        if trace {
            v["trace"] = json!(trace_text);
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("JSON values serialize")
        );
    } else {
        if trace {
            print!("{trace_text}");
            println!();
        }
        print!("{}", print::sequence_table(&seq, out.style()));
    }
    Ok(())
}

fn cmd_trace(input: &Input, out: &Output) -> Result<(), Failure> {
    let expr = read_expr(input)?;
    let opts = EtsfOptions {
        budget: input.budget,
        trace: true,
    };
    let (_, run) = eisf_with(&expr, &opts)?;
    let text = print::trace_to_string(&run.trace, out.style());
    if out.json {
        println!("{}", json!({ "trace": text }));
    } else {
        print!("{text}");
    }
    Ok(())
}

fn report_lines(label: &str, r: &VerificationReport) -> Vec<String> {
    let mut lines = vec![format!(
        "{label}: {} ({} conditions, max abs residual {:.3e}, max rel residual {:.3e})",
        if r.pass { "pass" } else { "FAIL" },
        r.conditions.len(),
        r.max_abs_residual,
        r.max_rel_residual
    )];
    for c in r.conditions.iter().filter(|c| !c.pass) {
        let at = c
            .failed_at
            .map(|x| format!(" at x = {x}"))
            .unwrap_or_default();
        lines.push(format!("  condition {} failed{at}", c.name));
    }
    for d in &r.discarded_samples {
        lines.push(format!("  discarded sample x = {}: {}", d.x, d.reason));
    }
    for s in &r.singularities {
        lines.push(format!("  singularity near x = {s}"));
    }
    lines
}

fn verify_one(
    expr: &Expr,
    budget: u64,
    cfg: Option<&EvalConfig>,
) -> Result<(RatSequence, VerificationReport, Option<VerificationReport>), Failure> {
    let seq = compute(expr, budget)?;
    let symbolic = verify_symbolic(&seq);
    let numeric = cfg.map(|c| verify_numeric(&seq, c)).transpose()?;
    Ok((seq, symbolic, numeric))
}

fn cmd_verify(input: &Input, eval: &EvalArgs, out: &Output) -> Result<(), Failure> {
    let expr = read_expr(input)?;
    let cfg = eval.config();
    let (seq, symbolic, numeric) = verify_one(&expr, input.budget, cfg.as_ref())?;
    let pass = symbolic.pass && numeric.as_ref().is_none_or(|r| r.pass);
    if out.json {
        let v = json!({
            "pass": pass,
            "length": seq.len(),
            "symbolic": symbolic.to_json(),
            "numeric": numeric.as_ref().map(VerificationReport::to_json),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&v).expect("JSON values serialize")
        );
    } else {
        println!("sequence length: {}", seq.len());
        for l in report_lines("symbolic", &symbolic) {
            println!("{l}");
        }
        if let (Some(r), Some(c)) = (&numeric, &cfg) {
            let (a, b) = c.interval;
            let label = format!(
                "numeric on [{a}, {b}], {} samples, base point {}",
                c.samples,
                c.base()
            );
            for l in report_lines(&label, r) {
                println!("{l}");
            }
        }
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify("verification failed".into()))
    }
}

fn bound_for(seq: &RatSequence, a: f64, b: f64, cfg: &EvalConfig) -> Result<RootBound, Failure> {
    if seq.tower.is_empty() {
        let ra =
            Rational::from_f64(a).ok_or_else(|| Failure::Usage(format!("bad endpoint {a}")))?;
        let rb =
            Rational::from_f64(b).ok_or_else(|| Failure::Usage(format!("bad endpoint {b}")))?;
        return root_count_bound_exact(seq, &ra, &rb)
            .ok_or_else(|| Failure::Usage(format!("need A < B, got {a} and {b}")));
    }
    Ok(root_count_bound(seq, a, b, cfg)?)
}

fn cmd_count_roots(input: &Input, eval: &EvalArgs, out: &Output) -> Result<(), Failure> {
    let expr = read_expr(input)?;
    let cfg = eval
        .config()
        .ok_or_else(|| Failure::Usage("count-roots needs --interval A B".into()))?;
    let (a, b) = cfg.interval;
    let seq = compute(&expr, input.budget)?;
    let r = bound_for(&seq, a, b, &cfg)?;
    let parity = match r.parity {
        Parity::Even => "even",
        Parity::Odd => "odd",
    };
    if out.json {
        println!(
            "{}",
            json!({"a": a, "b": b, "nu_a": r.nu_a, "nu_b": r.nu_b, "bound": r.bound, "parity": parity})
        );
    } else {
        println!("nu({a}) = {}", r.nu_a);
        println!("nu({b}) = {}", r.nu_b);
        println!("bound = {} ({parity})", r.bound);
        println!(
            "at most {} roots in ({a}, {b}], counted with multiplicity; the count is {parity}",
            r.bound
        );
    }
    Ok(())
}

fn cmd_fixture_tables(input: &Input, out: &Output) -> Result<(), Failure> {
    let mut mismatches = Vec::new();
    for fx in fixtures::ALL {
        let expr = parse(&fixtures::strip_comments(fx.expr))
            .map_err(|e| Failure::Parse(format!("{}: {e}", fx.name)))?;
        let seq = compute(&expr, input.budget)?;
        let table = print::sequence_table(&seq, out.style());
        let ok = out.unicode || table == fx.table;
        if !ok {
            mismatches.push(fx.name);
        }
        println!(
            "{:<10} {:>3} rows  {}",
            fx.name,
            seq.len(),
            if ok { "ok" } else { "MISMATCH" }
        );
    }
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "golden table mismatch: {}",
            mismatches.join(", ")
        )))
    }
}

fn cmd_fixture_verify(input: &Input, eval: &EvalArgs) -> Result<(), Failure> {
    let cfg = eval.config();
    let mut failed = Vec::new();
    for fx in fixtures::ALL {
        let expr = parse(&fixtures::strip_comments(fx.expr))
            .map_err(|e| Failure::Parse(format!("{}: {e}", fx.name)))?;
        let (seq, symbolic, numeric) = verify_one(&expr, input.budget, cfg.as_ref())?;
        let pass = symbolic.pass && numeric.as_ref().is_none_or(|r| r.pass);
        if !pass {
            failed.push(fx.name);
        }
        println!(
            "{:<10} {:>3} rows  {}",
            fx.name,
            seq.len(),
            if pass { "pass" } else { "FAIL" }
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!(
            "verification failed: {}",
            failed.join(", ")
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Compute {
            input,
            output,
            fixtures: true,
            ..
        } => cmd_fixture_tables(input, output),
        Command::Compute {
            input,
            output,
            trace,
            ..
        } => cmd_compute(input, output, *trace),
        Command::Verify {
            input,
            eval,
            fixtures: true,
            ..
        } => cmd_fixture_verify(input, eval),
        Command::Verify {
            input,
            eval,
            output,
            ..
        } => cmd_verify(input, eval, output),
        Command::CountRoots {
            input,
            eval,
            output,
        } => cmd_count_roots(input, eval, output),
        Command::Trace { input, output } => cmd_trace(input, output),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
