use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use chromatic_core::hopf::{AlgebraRegistry, HopfAlgebra};
use chromatic_core::rep::{dual_left, hom_space_dense, regular, tensor, trivial};
use chromatic_core::suite::{all_builtins, SuiteOptions, SuiteRegistry, SuiteRun};
use chromatic_core::tqft::{
    attach_zero_cap, builtin_programs, connected_sum, pants_obstruction, skein_spanning_dim, stabilize,
    zero_cap_check, SurgeryProgram, Tqft, TqftError, DEFAULT_SIZE_CAP,
};

type Outcome = Result<String, String>;

fn load(name: &str) -> Arc<HopfAlgebra> {
    AlgebraRegistry::builtin().load(name, None).expect("built-in algebra")
}

fn chromatic_algebras() -> Vec<String> {
    all_builtins().into_iter().filter(|n| {
        let h = load(n);
        h.is_unimodular() && h.is_unibalanced()
    }).collect()
}

fn suite(name: &str, algebras: &[String], opts: &SuiteOptions) -> Vec<(SuiteRun, Duration)> {
    let registry = SuiteRegistry::default();
    let s = registry.get(name).expect("registered suite");
    algebras
        .iter()
        .map(|a| {
            let data = AlgebraRegistry::builtin().load_data(a, None).expect("built-in data");
            let start = Instant::now();
            let run = s.run(&data, opts);
            (run, start.elapsed())
        })
        .collect()
}

fn failures(runs: &[(SuiteRun, Duration)], keep: impl Fn(&str) -> bool) -> Vec<String> {
    let mut out = Vec::new();
    for (run, _) in runs {
        if let Some(why) = &run.skipped {
            out.push(format!("{}: skipped ({why})", run.algebra));
        }
        for e in run.entries.iter().filter(|e| keep(&e.check) && !e.passed) {
            out.push(format!("{}: {}: {}", run.algebra, e.check, e.detail));
        }
    }
    out
}

fn checked(runs: &[(SuiteRun, Duration)], keep: impl Fn(&str) -> bool) -> usize {
    runs.iter().map(|(r, _)| r.entries.iter().filter(|e| keep(&e.check)).count()).sum()
}

fn verdict(fails: Vec<String>, ok: String) -> Outcome {
    if fails.is_empty() {
        Ok(ok)
    } else {
        Err(fails.join("; "))
    }
}

fn hopf_axioms() -> Outcome {
    let start = Instant::now();
    let algebras = all_builtins();
    let runs = suite("hopf", &algebras, &SuiteOptions::default());
    let mut fails = failures(&runs, |_| true);
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        fails.push(format!("took {elapsed:?}"));
    }
    verdict(fails, format!("{} algebras, {} checks", algebras.len(), checked(&runs, |_| true)))
}

fn chromatic_identity() -> Outcome {
    let algebras = chromatic_algebras();
    let runs = suite("chromatic", &algebras, &SuiteOptions::default());
    let two_sided = |c: &str| c.starts_with("c_H ") || c.starts_with("c_(H⊗H) ");
    let mut fails = failures(&runs, two_sided);
    for (run, t) in &runs {
        if t > &Duration::from_secs(60) {
            fails.push(format!("{} took {t:?}", run.algebra));
        }
        let n = run.entries.iter().filter(|e| two_sided(&e.check)).count();
        if n != 8 {
            fails.push(format!("{}: {n} two-sided entries", run.algebra));
        }
    }
    verdict(fails, format!("{} algebras, {} identities", algebras.len(), checked(&runs, two_sided)))
}

fn sided_identities() -> Outcome {
    let h = load("sweedler");
    let mut fails = Vec::new();
    if h.is_unimodular() || !h.modulus().iter().any(|a| *a == -h.field().one()) {
        fails.push("modulus does not take the value -1".to_string());
    }
    let runs = suite("chromatic", &["sweedler".to_string()], &SuiteOptions::default());
    let sided = |c: &str| c.starts_with("c^l_H") || c.starts_with("c^r_H");
    fails.extend(failures(&runs, sided));
    let n = checked(&runs, sided);
    if n != 6 {
        fails.push(format!("{n} sided entries"));
    }
    verdict(fails, format!("{n} identities over 1, G, G⊗G"))
}

fn trace_battery() -> Outcome {
    let registry = SuiteRegistry::default();
    let algebras = registry.get("mtrace").expect("registered suite").default_algebras();
    let runs = suite("mtrace", &algebras, &SuiteOptions { seed: 0, instances: 50, ..Default::default() });
    let mut fails = failures(&runs, |_| true);
    for (run, _) in &runs {
        for name in ["cyclicity", "right partial trace", "left partial trace"] {
            let count = run
                .entries
                .iter()
                .find(|e| e.check == name && e.passed)
                .and_then(|e| e.detail.strip_suffix(" instances"))
                .and_then(|n| n.parse::<usize>().ok());
            if !count.is_some_and(|n| n >= 50) {
                fails.push(format!("{}: {name} ran {count:?} instances", run.algebra));
            }
        }
        for name in ["copairing naturality", "copairing duality", "copairing rotation", "lambda_t equals sided cointegral maps"] {
            if !run.entries.iter().any(|e| e.check == name) {
                fails.push(format!("{}: {name} missing", run.algebra));
            }
        }
    }
    verdict(fails, format!("{} algebras, seed 0, 50 instances each", algebras.len()))
}

fn cut_independence() -> Outcome {
    let algebras = ["z2", "z3_f3", "s3", "small_quantum_sl2"].map(String::from).to_vec();
    let runs = suite("diagrams", &algebras, &SuiteOptions::default());
    let mut fails = failures(&runs, |_| true);
    for (run, _) in &runs {
        let graphs: Vec<_> = run.entries.iter().filter(|e| e.check != "corpus size").collect();
        if graphs.len() < 10 {
            fails.push(format!("{}: {} graphs", run.algebra, graphs.len()));
        }
    }
    verdict(fails, format!("{} graphs over {} algebras", checked(&runs, |c| c != "corpus size"), algebras.len()))
}

fn relation_battery() -> Outcome {
    let algebras = chromatic_algebras();
    let runs = suite("tqft", &algebras, &SuiteOptions::default());
    let relation = |c: &str| c.starts_with('R') || c == "sliding" || c == "multiplicativity";
    let mut fails = failures(&runs, |_| true);
    for (run, _) in &runs {
        if run.entries.iter().filter(|e| relation(&e.check)).count() != 7 {
            fails.push(format!("{}: relation checks missing", run.algebra));
        }
    }
    verdict(fails, format!("{} algebras, {} relation checks", algebras.len(), checked(&runs, relation)))
}

fn oracle_value() -> Result<String, String> {
    let script = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/oracle/s1xs2_z2.py");
    let out = Command::new("python3").arg(script).output().map_err(|e| format!("cannot run oracle: {e}"))?;
    if !out.status.success() {
        return Err(format!("oracle failed: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn invariant_values() -> Outcome {
    let programs = builtin_programs().map_err(|e| e.to_string())?;
    let mut fails = Vec::new();
    let mut note = |ok: bool, msg: String| {
        if !ok {
            fails.push(msg);
        }
    };
    for name in ["trivial", "z2", "z3", "z2_f2", "s3", "small_quantum_sl2"] {
        let t = Tqft::new(&load(name)).map_err(|e| e.to_string())?;
        let k = |p: &SurgeryProgram| t.k_invariant(p).map_err(|e| format!("{name} {}: {e}", p.name));
        let ks = programs.iter().map(&k).collect::<Result<Vec<_>, _>>()?;
        for (p, v) in programs.iter().zip(&ks) {
            if p.name.starts_with("S3") {
                note(v.is_one(), format!("{name}: K({}) = {v}", p.name));
            }
            if name == "trivial" {
                note(v.is_one(), format!("trivial: K({}) = {v}", p.name));
            }
            for at in [0, p.instructions.len() - 1] {
                let s = stabilize(p, at).map_err(|e| e.to_string())?;
                let w = k(&s)?;
                note(w == *v, format!("{name}: K({}) = {v}, stabilized at {at}: {w}", p.name));
            }
        }
        // the quantum algebra skips sums with the largest lens space, which exceed the time budget
        let heavy = |p: &SurgeryProgram| name == "small_quantum_sl2" && p.name == "L(4,1)";
        for (i, p) in programs.iter().enumerate() {
            for (j, q) in programs.iter().enumerate().skip(i) {
                if heavy(p) || heavy(q) {
                    continue;
                }
                let sum = connected_sum(p, q).map_err(|e| e.to_string())?;
                let w = k(&sum)?;
                let want = &ks[i] * &ks[j];
                note(w == want, format!("{name}: K({}) = {w}, expected {want}", sum.name));
            }
        }
    }
    let oracle = oracle_value()?;
    let t = Tqft::new(&load("z2")).map_err(|e| e.to_string())?;
    let s1xs2 = programs.iter().find(|p| p.name == "S1xS2").ok_or("no S1xS2 program")?;
    let k = t.k_invariant(s1xs2).map_err(|e| e.to_string())?;
    note(k.to_string() == oracle, format!("K(S1xS2) over Q[Z2] is {k}, oracle {oracle}"));
    verdict(fails, format!("K(S1xS2) over Q[Z2] = {k} = oracle"))
}

fn extendability() -> Outcome {
    let mut fails = Vec::new();
    let mut note = |ok: bool, msg: String| {
        if !ok {
            fails.push(msg);
        }
    };
    for name in ["z2_f2", "small_quantum_sl2"] {
        let t = Tqft::new(&load(name)).map_err(|e| e.to_string())?;
        let p = pants_obstruction(&t).map_err(|e| e.to_string())?;
        note(p.value.is_zero(), format!("{name}: obstruction {}", p.value));
        let rejected = matches!(zero_cap_check(&t), Err(TqftError::NotSemisimple(_)))
            && matches!(t.circle_vector().and_then(|v| attach_zero_cap(&t, &v)), Err(TqftError::NotSemisimple(_)));
        note(rejected, format!("{name}: zero cap not rejected"));
    }
    let semisimple = ["trivial", "z1", "z2", "z3", "z4", "z5", "z6", "s3"];
    for name in semisimple {
        let t = Tqft::new(&load(name)).map_err(|e| e.to_string())?;
        let p = pants_obstruction(&t).map_err(|e| e.to_string())?;
        note(!p.value.is_zero(), format!("{name}: obstruction vanishes"));
        match zero_cap_check(&t) {
            Ok(x) => note(x.is_one(), format!("{name}: 0-1 cancellation gives {x}")),
            Err(e) => note(false, format!("{name}: {e}")),
        }
    }
    verdict(fails, format!("zero for 2 non-semisimple algebras, nonzero and cancelling for {}", semisimple.len()))
}

fn spanning_bound() -> Outcome {
    let start = Instant::now();
    let mut fails = Vec::new();
    let names = all_builtins();
    for name in &names {
        let h = load(name);
        match skein_spanning_dim(&h, 0, DEFAULT_SIZE_CAP) {
            Ok(1) => {}
            other => fails.push(format!("{name}: genus 0 gives {other:?}")),
        }
        let reg = regular(&h);
        let dense = tensor(&reg, &dual_left(&reg))
            .and_then(|m| hom_space_dense(&trivial(&h), &m))
            .map(|b| b.len())
            .map_err(|e| e.to_string());
        let sparse = skein_spanning_dim(&h, 1, DEFAULT_SIZE_CAP).map_err(|e| e.to_string());
        if sparse != dense {
            fails.push(format!("{name}: genus 1 gives {sparse:?}, dense solver {dense:?}"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        fails.push(format!("took {elapsed:?}"));
    }
    verdict(fails, format!("{} algebras", names.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Hopf axiom suite", hopf_axioms),
        ("chromatic identity for c_H and c_(H⊗H)", chromatic_identity),
        ("sided chromatic identities on Sweedler's algebra", sided_identities),
        ("m-trace battery", trace_battery),
        ("F′ cutting-path independence", cut_independence),
        ("handle-move relation battery", relation_battery),
        ("invariant values", invariant_values),
        ("extendability dichotomy", extendability),
        ("spanning bound", spanning_bound),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} ({secs:.1} s)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} ({secs:.1} s)", k + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
