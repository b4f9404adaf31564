use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use chromatic_core::chromatic::{
    chromatic_based, presentation_family, standard_tests, verify_chromatic, ChromaticMap, KindRegistry,
};
use chromatic_core::diagrams::DiagramFile;
use chromatic_core::hopf::{AlgebraRegistry, HopfAlgebra, HopfData};
use chromatic_core::mtrace::TraceContext;
use chromatic_core::rep::{regular, tensor, trivial};
use chromatic_core::scalars::{Field, Matrix};
use chromatic_core::suite::{all_builtins, SuiteEntry, SuiteOptions, SuiteRegistry, SuiteRun};
use chromatic_core::tqft::{skein_spanning_dim, ProgramRegistry, Tqft, DEFAULT_SIZE_CAP};

#[derive(Parser)]
#[command(name = "chromatic", version, about = "Exact Hopf algebra checks, chromatic maps and 3-manifold invariants")]
struct Cli {
    /// Built-in algebra name or structure-constant file (repeatable for `suite` and `verify`).
    #[arg(long, global = true)]
    algebra: Vec<String>,
    /// Write the structured JSON report here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest vector-space dimension a handle operation may build.
    #[arg(long, global = true, default_value_t = DEFAULT_SIZE_CAP)]
    size_cap: usize,
    /// Reinterpret the structure constants over another field (`Q`, `F_5`, `Q(zeta_8)`).
    #[arg(long, global = true)]
    field_override: Option<Field>,
    /// Random instances per m-trace property.
    #[arg(long, global = true, default_value_t = 50)]
    instances: usize,
    /// Add wall-clock timings to the structured report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Hopf axioms and solve the integrals.
    Verify {
        /// Algebras to check; defaults to `--algebra`, then to every built-in.
        algebras: Vec<String>,
    },
    /// Evaluate a diagram file: the matrix of an open diagram, or the plain
    /// scalar and F′ of a closed one.
    Evaluate {
        diagram: PathBuf,
        /// Level to cut a closed diagram at; defaults to the file's `cut`, then to the cheapest projective level.
        #[arg(long)]
        level: Option<usize>,
    },
    /// Build a chromatic map and optionally verify its defining identity.
    Chromatic {
        #[arg(long, default_value = "two_sided")]
        kind: String,
        /// Base object of a two-sided map.
        #[arg(long, value_enum, default_value_t = Base::Regular)]
        base: Base,
        #[arg(long)]
        verify: bool,
        /// Include the full matrix in the report.
        #[arg(long)]
        matrix: bool,
    },
    /// Compute the invariant of a surgery program.
    Invariant {
        /// Built-in program name or program file.
        program: String,
    },
    /// Run named check suites (`all` for every suite).
    Suite {
        #[arg(required = true)]
        names: Vec<String>,
    },
    /// Upper bound for the skein module of the genus-g surface.
    SpanningDim {
        #[arg(long, default_value_t = 1)]
        genus: usize,
    },
    /// List built-in algebras, programs and suites.
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum Base {
    Regular,
    RegularSquared,
}

/// Failures before any computation: bad arguments or unreadable input.
struct UsageError(String);

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

#[derive(Serialize)]
struct AlgebraMeta {
    name: String,
    field: String,
    dimension: usize,
    fingerprint: String,
    normalization: &'static str,
    pivot: Option<Vec<Value>>,
    unimodular: Option<bool>,
    unibalanced: Option<bool>,
    semisimple: Option<bool>,
}

impl AlgebraMeta {
    fn new(data: &HopfData, solved: Option<&HopfAlgebra>) -> Self {
        let s = solved.map(|h| h.summary());
        AlgebraMeta {
            name: data.name.clone(),
            field: data.field.to_string(),
            dimension: data.dim,
            fingerprint: data.fingerprint(),
            normalization: "lambda(Lambda) = 1",
            pivot: s.as_ref().and_then(|s| s.pivot.clone()),
            unimodular: s.as_ref().map(|s| s.unimodular),
            unibalanced: s.as_ref().map(|s| s.unibalanced),
            semisimple: s.as_ref().map(|s| s.semisimple),
        }
    }
}

#[derive(Serialize)]
struct RunReport {
    command: Vec<String>,
    algebras: Vec<AlgebraMeta>,
    checks: Vec<SuiteRun>,
    #[serde(skip_serializing_if = "Value::is_null")]
    result: Value,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing_ms: Option<BTreeMap<String, u128>>,
}

struct Context {
    cli: Cli,
    registry: AlgebraRegistry,
    report: RunReport,
    timings: BTreeMap<String, u128>,
}

impl Context {
    fn data(&self, name: &str) -> Result<HopfData, UsageError> {
        self.registry.load_data(name, self.cli.field_override).map_err(|e| UsageError(e.to_string()))
    }

    fn one_algebra(&self) -> Result<String, UsageError> {
        match self.cli.algebra.as_slice() {
            [a] => Ok(a.clone()),
            [] => Err(UsageError("this command needs --algebra".into())),
            _ => Err(UsageError("this command takes a single --algebra".into())),
        }
    }

    /// Loads and solves the single `--algebra`, recording its metadata.
    fn solved(&mut self) -> Result<Arc<HopfAlgebra>, Failure> {
        let name = self.one_algebra()?;
        let data = self.data(&name)?;
        match HopfAlgebra::new(data.clone()) {
            Ok(h) => {
                self.report.algebras.push(AlgebraMeta::new(&data, Some(&h)));
                Ok(h)
            }
            Err(e) => {
                self.report.algebras.push(AlgebraMeta::new(&data, None));
                Err(Failure::Compute(e.to_string()))
            }
        }
    }

    fn options(&self) -> SuiteOptions {
        SuiteOptions { seed: self.cli.seed, instances: self.cli.instances, size_cap: self.cli.size_cap }
    }

    fn timed<T>(&mut self, label: String, f: impl FnOnce(&mut Self) -> T) -> T {
        let start = Instant::now();
        let out = f(self);
        self.timings.insert(label, start.elapsed().as_millis());
        out
    }
}

fn print_run(run: &SuiteRun) {
    if let Some(why) = &run.skipped {
        println!("[{}] {}: skipped ({why})", run.suite, run.algebra);
        return;
    }
    let failed: Vec<&SuiteEntry> = run.entries.iter().filter(|e| !e.passed).collect();
    let status = if failed.is_empty() { "ok" } else { "FAILED" };
    println!("[{}] {}: {status} ({} checks)", run.suite, run.algebra, run.entries.len());
    for e in failed {
        println!("    fail: {}: {}", e.check, e.detail);
    }
}

fn run_suites(ctx: &mut Context, names: &[String], algebras: &[String]) -> Result<(), Failure> {
    let suites = SuiteRegistry::default();
    let names: Vec<String> = if names.iter().any(|n| n == "all") {
        suites.names().map(String::from).collect()
    } else {
        names.to_vec()
    };
    for n in &names {
        if suites.get(n).is_none() {
            let known = suites.names().collect::<Vec<_>>().join(", ");
            return Err(Failure::Usage(format!("unknown suite {n:?}; known: {known}")));
        }
    }
    let mut seen = BTreeMap::new();
    let opts = ctx.options();
    for n in &names {
        let suite = suites.get(n).expect("checked above");
        let list = if algebras.is_empty() { suite.default_algebras() } else { algebras.to_vec() };
        for a in list {
            let data = ctx.data(&a)?;
            if !seen.contains_key(&a) {
                let solved = HopfAlgebra::new(data.clone()).ok();
                ctx.report.algebras.push(AlgebraMeta::new(&data, solved.as_deref()));
                seen.insert(a.clone(), ());
            }
            let run = ctx.timed(format!("{n}/{a}"), |_| suite.run(&data, &opts));
            print_run(&run);
            ctx.report.checks.push(run);
        }
    }
    Ok(())
}

fn matrix_digest(m: &Matrix) -> String {
    let mut hasher = Sha256::new();
    for c in 0..m.cols() {
        for (r, x) in m.column(c) {
            hasher.update(format!("{r},{c}={x};").as_bytes());
        }
    }
    hex::encode(hasher.finalize())
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["0".to_string(); m.cols()]; m.rows()];
    for c in 0..m.cols() {
        for (r, x) in m.column(c) {
            rows[*r][c] = x.to_string();
        }
    }
    rows
}

fn describe_map(c: &ChromaticMap, with_matrix: bool) -> Value {
    let mut v = json!({
        "kind": c.kind.as_str(),
        "base": c.base.key(),
        "generator": c.generator.key(),
        "rows": c.matrix.rows(),
        "cols": c.matrix.cols(),
        "nonzeros": (0..c.matrix.cols()).map(|k| c.matrix.column(k).len()).sum::<usize>(),
        "sha256": matrix_digest(&c.matrix),
        "provenance": format!("{:?}", c.provenance).to_lowercase(),
    });
    if with_matrix {
        v["matrix"] = json!(matrix_rows(&c.matrix));
    }
    v
}

fn execute(ctx: &mut Context) -> Result<(), Failure> {
    let command = std::mem::replace(&mut ctx.cli.command, Command::List);
    match command {
        Command::List => {
            let algebras = AlgebraRegistry::builtin();
            let listing = json!({
                "algebras": algebras.names().map(|n| json!({"name": n, "summary": algebras.get(n).map(|s| s.summary())})).collect::<Vec<_>>(),
                "programs": ProgramRegistry::default().names().collect::<Vec<_>>(),
                "suites": SuiteRegistry::default().names().collect::<Vec<_>>(),
                "chromatic_kinds": KindRegistry::default().names().collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&listing).expect("json"));
            ctx.report.result = listing;
        }
        Command::Verify { algebras } => {
            let list = match (algebras.is_empty(), ctx.cli.algebra.is_empty()) {
                (false, _) => algebras,
                (true, false) => ctx.cli.algebra.clone(),
                (true, true) => all_builtins(),
            };
            run_suites(ctx, &["hopf".to_string()], &list)?;
        }
        Command::Suite { names } => {
            let algebras = ctx.cli.algebra.clone();
            run_suites(ctx, &names, &algebras)?;
        }
        Command::Evaluate { diagram, level } => {
            let h = ctx.solved()?;
            let file = DiagramFile::load(&diagram, &h).map_err(|e| Failure::Usage(e.to_string()))?;
            let d = &file.diagram;
            if d.is_closed() {
                let scalar = d.scalar().map_err(|e| Failure::Compute(e.to_string()))?;
                println!("plain evaluation: {scalar}");
                let mut result = json!({"closed": true, "scalar": scalar.to_string()});
                match TraceContext::new(&h) {
                    Ok(tc) => {
                        let level = match level.or(file.cut) {
                            Some(l) => l,
                            None => d.projective_level().map_err(|e| Failure::Compute(e.to_string()))?,
                        };
                        let fp = d.fprime_at_level(&tc, level).map_err(|e| Failure::Compute(e.to_string()))?;
                        println!("F′ cut at level {level}: {fp}");
                        result["level"] = json!(level);
                        result["fprime"] = json!(fp.to_string());
                    }
                    Err(e) => println!("F′ unavailable: {e}"),
                }
                ctx.report.result = result;
            } else {
                let m = d.evaluate().map_err(|e| Failure::Compute(e.to_string()))?;
                let rows = matrix_rows(&m);
                for r in &rows {
                    println!("{}", r.join(" "));
                }
                ctx.report.result = json!({"closed": false, "rows": m.rows(), "cols": m.cols(), "matrix": rows});
            }
        }
        Command::Chromatic { kind, base, verify, matrix } => {
            let h = ctx.solved()?;
            let kinds = KindRegistry::default();
            let k = kinds.get(&kind).map_err(|e| Failure::Usage(e.to_string()))?;
            let compute = |e: chromatic_core::chromatic::ChromaticError| Failure::Compute(e.to_string());
            let mut c = k.construct(&h).map_err(compute)?;
            let g = regular(&h);
            if let Base::RegularSquared = base {
                if kind != "two_sided" {
                    return Err(Failure::Usage("--base regular-squared needs --kind two_sided".into()));
                }
                let hh = tensor(&g, &g).map_err(|e| Failure::Compute(e.to_string()))?;
                c = chromatic_based(&c, &hh, &presentation_family(&hh).map_err(compute)?).map_err(compute)?;
            }
            let desc = describe_map(&c, matrix);
            println!(
                "{} chromatic map on {}: {}x{}, sha256 {}",
                kind,
                c.base.key(),
                c.matrix.rows(),
                c.matrix.cols(),
                desc["sha256"].as_str().unwrap_or("")
            );
            ctx.report.result = desc;
            if verify {
                let tests = if k.needs_trace() {
                    standard_tests(&g).map_err(compute)?
                } else {
                    vec![trivial(&h), g.clone(), tensor(&g, &g).map_err(|e| Failure::Compute(e.to_string()))?]
                };
                let tc = if k.needs_trace() {
                    Some(TraceContext::new(&h).map_err(|e| Failure::Compute(e.to_string()))?)
                } else {
                    None
                };
                let report = ctx.timed("verify".into(), |_| verify_chromatic(&c, &tests, tc.as_ref()));
                let mut run = SuiteRun {
                    suite: "chromatic".into(),
                    algebra: h.name().into(),
                    skipped: None,
                    entries: Vec::new(),
                };
                for e in report.entries {
                    let detail = e.witness.unwrap_or_else(|| format!("{} evaluation", e.method));
                    run.entries.push(SuiteEntry::new(format!("{kind} on {}", e.test), e.passed, detail));
                }
                print_run(&run);
                ctx.report.checks.push(run);
            }
        }
        Command::Invariant { program } => {
            let h = ctx.solved()?;
            let p = ProgramRegistry::default().load(&program).map_err(|e| Failure::Usage(e.to_string()))?;
            let t = Tqft::new(&h).map_err(|e| Failure::Compute(e.to_string()))?.with_size_cap(ctx.cli.size_cap);
            let run = ctx.timed("invariant".into(), |_| t.run(&p)).map_err(|e| Failure::Compute(e.to_string()))?;
            println!("{}", run.value);
            ctx.report.result = serde_json::to_value(&run).expect("json");
        }
        Command::SpanningDim { genus } => {
            let h = ctx.solved()?;
            let n = skein_spanning_dim(&h, genus, ctx.cli.size_cap).map_err(|e| Failure::Compute(e.to_string()))?;
            println!("{n}");
            ctx.report.result = json!({"genus": genus, "dimension": n});
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = RunReport {
        command: std::env::args().skip(1).collect(),
        algebras: Vec::new(),
        checks: Vec::new(),
        result: Value::Null,
        passed: false,
        timing_ms: None,
    };
    let mut ctx = Context { cli, registry: AlgebraRegistry::builtin(), report, timings: BTreeMap::new() };
    let start = Instant::now();
    let outcome = execute(&mut ctx);
    ctx.timings.insert("total".into(), start.elapsed().as_millis());
    let code = match &outcome {
        Ok(()) if ctx.report.checks.iter().all(SuiteRun::passed) => 0,
        Ok(()) => 1,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("failed: {msg}");
            ctx.report.result = json!({"error": msg});
            1
        }
    };
    ctx.report.passed = code == 0;
    eprintln!("elapsed {} ms", ctx.timings["total"]);
    if ctx.cli.timing {
        ctx.report.timing_ms = Some(std::mem::take(&mut ctx.timings));
    }
    if let Some(path) = &ctx.cli.out {
        let text = serde_json::to_string_pretty(&ctx.report).expect("json") + "\n";
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
