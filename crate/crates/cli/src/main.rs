use std::fmt::{Debug, Display, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gndk_core::analysis::{bars, derivation_to_tree, tree_to_derivation};
use gndk_core::batch::check_all;
use gndk_core::calculus::{load_calculus, CalculusSpec};
use gndk_core::derivation::{parse_proof, print_proof, CheckReport, Derivation, NodePath};
use gndk_core::operators::{decompose_tree, recompose_tree, wdoi_immediate, wdoi_tree};
use gndk_core::rewrite::{find_redexes, normalize, reduce_redex, RewriteError, TraceStep};
use gndk_core::syntax::{parse_formula, tree_occurrences, EntrySel, Formula};
use serde_json::json;

#[derive(Parser)]
#[command(name = "gndk", version, about = "Proof kernel for grounding calculi")]
struct Cli {
    #[command(flatten)]
    shared: Shared,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    /// Calculus file (JSON rule set)
    #[arg(long, global = true, value_name = "PATH")]
    calculus: Option<PathBuf>,
    /// Print one tab-separated line per reduction step
    #[arg(long, global = true)]
    trace: bool,
    /// Also reduce mediate-grounding detours
    #[arg(long, global = true)]
    with_mediate: bool,
    /// Maximum number of reduction steps
    #[arg(long, global = true, default_value_t = 10_000)]
    budget: usize,
    /// Structured output
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check proof files against the calculus
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Normalize a proof
    Normalize { file: PathBuf },
    /// List the bars of a grounding derivation
    Bars { file: PathBuf },
    /// Grounding tree of a grounding derivation
    ToTree { file: PathBuf },
    /// Grounding derivation of a grounding tree
    FromTree { claim: String },
    /// Witness of weak deducibility of identicals for a claim
    Wdoi {
        claim: String,
        /// Tree entry to eliminate, e.g. g0 or c1
        #[arg(long)]
        entry: Option<String>,
    },
    /// Split a grounding tree into immediate claims
    Decompose { claim: String },
    /// Rebuild a grounding tree from its immediate claims
    Recompose {
        target: String,
        #[arg(required = true)]
        parts: Vec<String>,
    },
    /// List redexes, or reduce the one at a node path
    Reduce {
        file: PathBuf,
        #[arg(long, value_name = "PATH")]
        at: Option<String>,
    },
}

struct Failure {
    code: String,
    message: String,
    output: String,
}

impl Failure {
    fn new(code: impl Into<String>, message: impl Display) -> Failure {
        Failure { code: code.into(), message: message.to_string(), output: String::new() }
    }

    fn with_output(mut self, output: String) -> Failure {
        self.output = output;
        self
    }
}

/// Variant name of an error enum, used as the machine-readable code.
fn code_of<E: Debug>(e: &E) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn domain<E: Debug + Display>(e: E) -> Failure {
    Failure::new(code_of(&e), e)
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new("Io", format!("{}: {e}", path.display())))
}

fn formula(text: &str) -> Result<Formula, Failure> {
    parse_formula(text).map_err(domain)
}

fn proof(path: &Path, spec: &CalculusSpec) -> Result<Derivation, Failure> {
    parse_proof(&read(path)?, spec).map_err(|e| Failure::new(code_of(&e), format!("{}: {e}", path.display())))
}

fn json_line(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn report_lines(report: &CheckReport, prefix: &str, out: &mut String) {
    if report.ok {
        writeln!(out, "{prefix}OK").unwrap();
    }
    for f in &report.failures {
        writeln!(out, "{prefix}FAIL {} {}: {}", f.path, f.rule, f.message).unwrap();
    }
    for w in &report.warnings {
        writeln!(out, "{prefix}WARN {w}").unwrap();
    }
}

fn trace_lines(trace: &[TraceStep], out: &mut String) {
    for (i, s) in trace.iter().enumerate() {
        writeln!(out, "{}\t{}\t{}\t{}\t{}", i + 1, s.redex.kind, s.redex.location, s.before, s.after).unwrap();
    }
}

fn trace_json(trace: &[TraceStep]) -> serde_json::Value {
    trace
        .iter()
        .enumerate()
        .map(|(i, s)| {
            json!({
                "step": i + 1,
                "kind": s.redex.kind,
                "path": s.redex.location.to_string(),
                "complexity": s.redex.complexity,
                "before": [s.before.m, s.before.n, s.before.u],
                "after": [s.after.m, s.after.n, s.after.u],
            })
        })
        .collect()
}

fn entry_sel(text: &str) -> Result<EntrySel, Failure> {
    let bad = || Failure::new("BadEntry", format!("expected g<N> or c<N>, found `{text}`"));
    let index = text.get(1..).and_then(|n| n.parse().ok()).ok_or_else(bad)?;
    match text.as_bytes().first() {
        Some(b'g') => Ok(EntrySel::ground(index)),
        Some(b'c') => Ok(EntrySel::condition(index)),
        _ => Err(bad()),
    }
}

fn run(cli: Cli, spec: &CalculusSpec) -> Result<String, Failure> {
    let opts = &cli.shared;
    let mut out = String::new();
    match cli.command {
        Command::Check { files } => {
            let ds = files.iter().map(|f| proof(f, spec)).collect::<Result<Vec<_>, _>>()?;
            let reports = check_all(&ds, spec);
            let bad = reports.iter().filter(|r| !r.ok).count();
            if opts.json {
                let items: Vec<_> = files
                    .iter()
                    .zip(&reports)
                    .map(|(f, r)| json!({ "file": f.display().to_string(), "report": r }))
                    .collect();
                out = json_line(json!(items));
            } else {
                for (f, r) in files.iter().zip(&reports) {
                    let prefix = if files.len() > 1 { format!("{}: ", f.display()) } else { String::new() };
                    report_lines(r, &prefix, &mut out);
                }
            }
            if bad > 0 {
                return Err(
                    Failure::new("CheckFailed", format!("{bad} of {} proofs rejected", files.len())).with_output(out)
                );
            }
        }
        Command::Normalize { file } => {
            let d = proof(&file, spec)?;
            match normalize(&d, opts.with_mediate, opts.budget) {
                Ok(n) => {
                    if opts.json {
                        out = json_line(json!({
                            "steps": n.trace.len(),
                            "trace": trace_json(&n.trace),
                            "proof": print_proof(&n.derivation),
                        }));
                    } else {
                        if opts.trace {
                            trace_lines(&n.trace, &mut out);
                        }
                        out.push_str(&print_proof(&n.derivation));
                    }
                }
                Err(RewriteError::BudgetExhausted { budget, steps, partial, trace }) => {
                    if opts.json {
                        out = json_line(json!({
                            "steps": steps,
                            "trace": trace_json(&trace),
                            "partial": print_proof(&partial),
                        }));
                    } else {
                        if opts.trace {
                            trace_lines(&trace, &mut out);
                        }
                        out.push_str(&print_proof(&partial));
                    }
                    let message = format!("step budget of {budget} exhausted after {steps} reductions");
                    return Err(Failure::new("BudgetExhausted", message).with_output(out));
                }
                Err(e) => return Err(domain(e)),
            }
        }
        Command::Bars { file } => {
            let d = proof(&file, spec)?;
            let found = bars(&d).map_err(domain)?;
            if opts.json {
                let items: Vec<_> = found
                    .iter()
                    .map(|b| {
                        let members: Vec<_> = b
                            .members
                            .iter()
                            .map(|m| {
                                json!({
                                    "path": m.path.to_string(),
                                    "formula": m.formula.to_string(),
                                    "side": m.side,
                                    "effective": m.effective,
                                })
                            })
                            .collect();
                        json!({ "bar": b.to_string(), "crosses_condition": b.crosses_condition(), "members": members })
                    })
                    .collect();
                out = json_line(json!(items));
            } else {
                for b in &found {
                    writeln!(out, "{b}").unwrap();
                }
            }
        }
        Command::ToTree { file } => {
            let d = proof(&file, spec)?;
            writeln!(out, "{}", derivation_to_tree(&d).map_err(domain)?).unwrap();
        }
        Command::FromTree { claim } => {
            let d = tree_to_derivation(&formula(&claim)?, spec).map_err(domain)?;
            out.push_str(&print_proof(&d));
        }
        Command::Wdoi { claim, entry } => {
            let claim = formula(&claim)?;
            let sel = entry.as_deref().map(entry_sel).transpose()?;
            let w = if sel.is_some() || !tree_occurrences(&claim).is_empty() {
                wdoi_tree(&claim, sel)
            } else {
                wdoi_immediate(&claim, spec)
            }
            .map_err(domain)?;
            if opts.json {
                out = json_line(json!({ "eliminations": w.elim_count, "proof": print_proof(&w.derivation) }));
            } else {
                out.push_str(&print_proof(&w.derivation));
            }
        }
        Command::Decompose { claim } => {
            let parts = decompose_tree(&formula(&claim)?).map_err(domain)?;
            if opts.json {
                let items: Vec<_> = parts
                    .iter()
                    .map(|c| json!({ "claim": c.claim.to_string(), "proof": print_proof(&c.derivation) }))
                    .collect();
                out = json_line(json!(items));
            } else {
                for c in &parts {
                    writeln!(out, "{}", c.claim).unwrap();
                }
            }
        }
        Command::Recompose { target, parts } => {
            let target = formula(&target)?;
            let parts = parts.iter().map(|p| formula(p)).collect::<Result<Vec<_>, _>>()?;
            out.push_str(&print_proof(&recompose_tree(&parts, &target).map_err(domain)?));
        }
        Command::Reduce { file, at } => {
            let d = proof(&file, spec)?;
            let redexes = find_redexes(&d);
            match at {
                None if opts.json => {
                    let items: Vec<_> = redexes
                        .iter()
                        .map(|r| json!({ "path": r.location.to_string(), "kind": r.kind, "complexity": r.complexity }))
                        .collect();
                    out = json_line(json!(items));
                }
                None => {
                    for r in &redexes {
                        writeln!(out, "{}\t{}\t{}", r.location, r.kind, r.complexity).unwrap();
                    }
                }
                Some(at) => {
                    let location: NodePath = at.parse().map_err(|e| Failure::new("BadPath", e))?;
                    let redex = redexes
                        .into_iter()
                        .find(|r| r.location == location)
                        .ok_or_else(|| Failure::new("NoRedex", format!("no redex at {location}")))?;
                    out.push_str(&print_proof(&reduce_redex(&d, &redex).map_err(domain)?));
                }
            }
        }
    }
    Ok(out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let Some(path) = cli.shared.calculus.clone() else {
        eprintln!("error: --calculus PATH is required");
        return ExitCode::from(2);
    };
    let spec = match read(&path).and_then(|text| load_calculus(&text).map_err(domain)) {
        Ok(spec) => spec,
        Err(f) => {
            eprintln!("ERROR {}: {}", f.code, f.message);
            return ExitCode::from(1);
        }
    };
    match run(cli, &spec) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            print!("{}", f.output);
            eprintln!("ERROR {}: {}", f.code, f.message);
            ExitCode::from(1)
        }
    }
}
