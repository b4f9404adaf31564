//! Named check suites over built-in or user-supplied algebras, shared by the
//! command-line tool and the acceptance run.

use std::sync::Arc;

use indexmap::IndexMap;
use serde::Serialize;

use crate::chromatic::{
    chromatic_based, chromatic_left, chromatic_right, chromatic_two_sided, presentation_family, standard_tests,
    verify_chromatic, ChromaticReport,
};
use crate::diagrams::corpus::closed_graphs;
use crate::hopf::{check_hopf_axioms, HopfAlgebra, HopfData};
use crate::mtrace::{run_battery, TraceContext};
use crate::rep::{dual_left, hom_space_dense, regular, tensor, trivial};
use crate::tqft::{
    attach_zero_cap, builtin_programs, pants_obstruction, run_relations, skein_spanning_dim, zero_cap_check, Tqft,
    TqftError,
};

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Random instances per m-trace property.
    pub instances: usize,
    pub size_cap: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, instances: 50, size_cap: crate::tqft::DEFAULT_SIZE_CAP }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SuiteEntry {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

impl SuiteEntry {
    pub fn new(check: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        SuiteEntry { check: check.into(), passed, detail: detail.into() }
    }
}

/// One suite on one algebra. `skipped` says why the suite does not apply.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteRun {
    pub suite: String,
    pub algebra: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteRun {
    fn new(suite: &str, algebra: &str) -> Self {
        SuiteRun { suite: suite.into(), algebra: algebra.into(), skipped: None, entries: Vec::new() }
    }

    fn skip(mut self, why: impl Into<String>) -> Self {
        self.skipped = Some(why.into());
        self
    }

    fn push(&mut self, check: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.entries.push(SuiteEntry::new(check, passed, detail));
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Built-in algebras used when none is named.
    fn default_algebras(&self) -> Vec<String> {
        all_builtins()
    }
    fn run(&self, data: &HopfData, opts: &SuiteOptions) -> SuiteRun;
}

/// Every built-in algebra meant to be valid.
pub fn all_builtins() -> Vec<String> {
    crate::hopf::AlgebraRegistry::builtin().names().filter(|n| *n != "corrupted_z2").map(String::from).collect()
}

fn solve(run: SuiteRun, data: &HopfData) -> Result<(SuiteRun, Arc<HopfAlgebra>), SuiteRun> {
    match HopfAlgebra::new(data.clone()) {
        Ok(h) => Ok((run, h)),
        Err(e) => {
            let mut run = run;
            run.push("solve integrals", false, e.to_string());
            Err(run)
        }
    }
}

fn trace_context(run: SuiteRun, h: &Arc<HopfAlgebra>) -> Result<(SuiteRun, TraceContext), SuiteRun> {
    match TraceContext::new(h) {
        Ok(ctx) => Ok((run, ctx)),
        Err(e) => Err(run.skip(e.to_string())),
    }
}

struct HopfSuite;

impl Suite for HopfSuite {
    fn name(&self) -> &'static str {
        "hopf"
    }

    fn summary(&self) -> &'static str {
        "Hopf axioms, one-dimensional integral spaces, lambda(Lambda) = 1"
    }

    fn run(&self, data: &HopfData, _: &SuiteOptions) -> SuiteRun {
        let mut run = SuiteRun::new(self.name(), &data.name);
        let report = check_hopf_axioms(data);
        for c in &report.checks {
            let detail = c.witness.as_ref().map(|w| format!("fails at basis indices {w:?}")).unwrap_or_default();
            run.push(format!("axiom {}", c.axiom), c.passed, detail);
        }
        if !report.all_passed() {
            return run;
        }
        let (mut run, h) = match solve(run, data) {
            Ok(x) => x,
            Err(run) => return run,
        };
        run.push("integral spaces are one-dimensional", true, "");
        let norm = h.eval_integral(h.cointegral());
        run.push("lambda(Lambda) = 1", norm.is_one(), format!("lambda(Lambda) = {norm}"));
        run
    }
}

struct TraceSuite;

impl Suite for TraceSuite {
    fn name(&self) -> &'static str {
        "mtrace"
    }

    fn summary(&self) -> &'static str {
        "m-trace cyclicity, partial traces, copairing identities, Lambda comparison"
    }

    fn default_algebras(&self) -> Vec<String> {
        ["trivial", "z2", "z3", "z2_f2", "z3_f3", "z4_f2", "s3", "small_quantum_sl2"].map(String::from).to_vec()
    }

    fn run(&self, data: &HopfData, opts: &SuiteOptions) -> SuiteRun {
        let run = SuiteRun::new(self.name(), &data.name);
        let (run, h) = match solve(run, data) {
            Ok(x) => x,
            Err(run) => return run,
        };
        let (mut run, ctx) = match trace_context(run, &h) {
            Ok(x) => x,
            Err(run) => return run,
        };
        match run_battery(&ctx, opts.seed, opts.instances, &[]) {
            Ok(checks) => {
                for c in checks {
                    let detail = match c.failures.first() {
                        Some(w) => format!("{} of {} fail, first: {w}", c.failures.len(), c.instances),
                        None => format!("{} instances", c.instances),
                    };
                    let ok = c.passed();
                    run.push(c.name, ok, detail);
                }
            }
            Err(e) => run.push("battery", false, e.to_string()),
        }
        run
    }
}

struct ChromaticSuite;

fn push_report(run: &mut SuiteRun, label: &str, r: ChromaticReport) {
    for e in r.entries {
        let detail = match &e.witness {
            Some(w) => format!("{} evaluation: {w}", e.method),
            None => format!("{} evaluation", e.method),
        };
        run.push(format!("{label} on {}", e.test), e.passed, detail);
    }
}

impl Suite for ChromaticSuite {
    fn name(&self) -> &'static str {
        "chromatic"
    }

    fn summary(&self) -> &'static str {
        "chromatic identity for c_H and c_(H⊗H), sided identities for the left and right maps"
    }

    fn run(&self, data: &HopfData, _: &SuiteOptions) -> SuiteRun {
        let run = SuiteRun::new(self.name(), &data.name);
        let (mut run, h) = match solve(run, data) {
            Ok(x) => x,
            Err(run) => return run,
        };
        let g = regular(&h);
        if h.is_unimodular() && h.is_unibalanced() {
            let ctx = match TraceContext::new(&h) {
                Ok(c) => c,
                Err(e) => {
                    run.push("trace context", false, e.to_string());
                    return run;
                }
            };
            let built = chromatic_two_sided(&h).and_then(|c| {
                let hh = tensor(&g, &g)?;
                let chh = chromatic_based(&c, &hh, &presentation_family(&hh)?)?;
                Ok((c, chh, standard_tests(&g)?))
            });
            match built {
                Ok((c, chh, tests)) => {
                    push_report(&mut run, "c_H", verify_chromatic(&c, &tests, Some(&ctx)));
                    push_report(&mut run, "c_(H⊗H)", verify_chromatic(&chh, &tests, Some(&ctx)));
                }
                Err(e) => run.push("construct c_H", false, e.to_string()),
            }
        }
        let sided_tests = match tensor(&g, &g) {
            Ok(gg) => vec![trivial(&h), g.clone(), gg],
            Err(e) => {
                run.push("sided test objects", false, e.to_string());
                return run;
            }
        };
        for (label, c) in [("c^l_H", chromatic_left(&h)), ("c^r_H", chromatic_right(&h))] {
            match c {
                Ok(c) => push_report(&mut run, label, verify_chromatic(&c, &sided_tests, None)),
                Err(e) if run.entries.is_empty() => return run.skip(e.to_string()),
                Err(e) => run.push(format!("construct {label}"), false, e.to_string()),
            }
        }
        run
    }
}

struct DiagramSuite;

impl Suite for DiagramSuite {
    fn name(&self) -> &'static str {
        "diagrams"
    }

    fn summary(&self) -> &'static str {
        "F′ of curated closed graphs agrees across cuts and slicings"
    }

    fn default_algebras(&self) -> Vec<String> {
        ["z2", "z3_f3", "s3", "small_quantum_sl2"].map(String::from).to_vec()
    }

    fn run(&self, data: &HopfData, _: &SuiteOptions) -> SuiteRun {
        let run = SuiteRun::new(self.name(), &data.name);
        let (run, h) = match solve(run, data) {
            Ok(x) => x,
            Err(run) => return run,
        };
        let (mut run, ctx) = match trace_context(run, &h) {
            Ok(x) => x,
            Err(run) => return run,
        };
        let graphs = match closed_graphs(&h) {
            Ok(g) => g,
            Err(e) => {
                run.push("build corpus", false, e.to_string());
                return run;
            }
        };
        run.push("corpus size", graphs.len() >= 10, format!("{} graphs", graphs.len()));
        for g in graphs {
            match g.values(&ctx) {
                Ok(vs) => {
                    let ok = vs.len() >= 2 && vs.windows(2).all(|w| w[0].1 == w[1].1);
                    let detail = format!("{} presentations, value {}", vs.len(), vs[0].1);
                    run.push(g.name, ok, detail);
                }
                Err(e) => run.push(g.name, false, e.to_string()),
            }
        }
        run
    }
}

struct TqftSuite;

impl Suite for TqftSuite {
    fn name(&self) -> &'static str {
        "tqft"
    }

    fn summary(&self) -> &'static str {
        "handle-move relations, stabilization, multiplicativity, values on the program corpus"
    }

    fn run(&self, data: &HopfData, opts: &SuiteOptions) -> SuiteRun {
        let run = SuiteRun::new(self.name(), &data.name);
        let (run, h) = match solve(run, data) {
            Ok(x) => x,
            Err(run) => return run,
        };
        let mut run = run;
        let t = match Tqft::new(&h) {
            Ok(t) => t.with_size_cap(opts.size_cap),
            Err(e @ TqftError::Trace(_)) | Err(e @ TqftError::Chromatic(_)) => return run.skip(e.to_string()),
            Err(e) => {
                run.push("set up", false, e.to_string());
                return run;
            }
        };
        let programs = match builtin_programs() {
            Ok(p) => p,
            Err(e) => {
                run.push("load programs", false, e.to_string());
                return run;
            }
        };
        for p in &programs {
            match t.k_invariant(p) {
                Ok(k) => {
                    let ok = !(p.name.starts_with("S3") || h.dim() == 1) || k.is_one();
                    run.push(format!("K({})", p.name), ok, k.to_string());
                }
                Err(e) => run.push(format!("K({})", p.name), false, e.to_string()),
            }
        }
        // the relations square the corpus; the largest lens space is left out above dimension 6
        let corpus: Vec<_> = programs.into_iter().filter(|p| h.dim() <= 6 || p.name != "L(4,1)").collect();
        for r in run_relations(&t, &corpus) {
            run.push(r.name, r.passed, r.detail);
        }
        run
    }
}

struct ExtendSuite;

impl Suite for ExtendSuite {
    fn name(&self) -> &'static str {
        "extend"
    }

    fn summary(&self) -> &'static str {
        "pants obstruction, 0-1 cancellation, skein spanning bounds"
    }

    fn run(&self, data: &HopfData, opts: &SuiteOptions) -> SuiteRun {
        let run = SuiteRun::new(self.name(), &data.name);
        let (mut run, h) = match solve(run, data) {
            Ok(x) => x,
            Err(run) => return run,
        };
        match skein_spanning_dim(&h, 0, opts.size_cap) {
            Ok(n) => run.push("spanning dim, genus 0", n == 1, n.to_string()),
            Err(e) => run.push("spanning dim, genus 0", false, e.to_string()),
        }
        let reg = regular(&h);
        let dense = tensor(&reg, &dual_left(&reg)).and_then(|m| hom_space_dense(&trivial(&h), &m));
        match (skein_spanning_dim(&h, 1, opts.size_cap), dense) {
            (Ok(n), Ok(d)) => run.push("spanning dim, genus 1", n == d.len(), format!("{n} against {}", d.len())),
            (Err(e), _) => run.push("spanning dim, genus 1", false, e.to_string()),
            (_, Err(e)) => run.push("spanning dim, genus 1", false, e.to_string()),
        }
        let t = match Tqft::new(&h) {
            Ok(t) => t.with_size_cap(opts.size_cap),
            Err(e) => {
                run.push("pants obstruction", true, format!("not applicable: {e}"));
                return run;
            }
        };
        let semisimple = h.is_semisimple();
        match pants_obstruction(&t) {
            Ok(p) => {
                let ok = p.value.is_zero() != semisimple;
                run.push("pants obstruction", ok, format!("{} via {}", p.value, p.method));
            }
            Err(e) => run.push("pants obstruction", false, e.to_string()),
        }
        let check = zero_cap_check(&t);
        let capped = t.circle_vector().and_then(|v| attach_zero_cap(&t, &v));
        match (semisimple, check, capped) {
            (true, Ok(x), Ok(z)) => {
                run.push("0-1 cancellation", x.is_one(), format!("ringed unit graph gives {x}, weight {}", z.weight))
            }
            (true, Err(e), _) | (true, _, Err(e)) => run.push("0-1 cancellation", false, e.to_string()),
            (false, Err(TqftError::NotSemisimple(_)), Err(TqftError::NotSemisimple(_))) => {
                run.push("0-1 cancellation", true, "rejected: not semisimple")
            }
            (false, a, b) => run.push(
                "0-1 cancellation",
                false,
                format!("expected a rejection, got {:?} and {:?}", a.map(|x| x.to_string()), b.map(|z| z.weight.to_string())),
            ),
        }
        run
    }
}

/// Suites selectable by name.
pub struct SuiteRegistry {
    suites: IndexMap<&'static str, Box<dyn Suite>>,
}

impl Default for SuiteRegistry {
    fn default() -> Self {
        let mut r = SuiteRegistry { suites: IndexMap::new() };
        r.register(Box::new(HopfSuite));
        r.register(Box::new(TraceSuite));
        r.register(Box::new(ChromaticSuite));
        r.register(Box::new(DiagramSuite));
        r.register(Box::new(TqftSuite));
        r.register(Box::new(ExtendSuite));
        r
    }
}

impl SuiteRegistry {
    pub fn register(&mut self, s: Box<dyn Suite>) {
        self.suites.insert(s.name(), s);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.suites.keys().copied()
    }

    pub fn get(&self, name: &str) -> Option<&dyn Suite> {
        self.suites.get(name).map(|s| s.as_ref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::AlgebraRegistry;

    fn data(name: &str) -> HopfData {
        AlgebraRegistry::builtin().load_data(name, None).unwrap()
    }

    #[test]
    fn registry_lists_every_suite() {
        let r = SuiteRegistry::default();
        assert_eq!(r.names().collect::<Vec<_>>(), ["hopf", "mtrace", "chromatic", "diagrams", "tqft", "extend"]);
        assert!(r.get("nope").is_none());
    }

    #[test]
    fn corrupted_algebra_fails_the_hopf_suite() {
        let run = HopfSuite.run(&data("corrupted_z2"), &SuiteOptions::default());
        assert!(!run.passed());
        assert!(run.entries.iter().any(|e| !e.passed && e.detail.contains("basis indices")));
    }

    #[test]
    fn non_unimodular_algebra_is_skipped_where_needed() {
        let opts = SuiteOptions::default();
        let d = data("sweedler");
        assert!(TraceSuite.run(&d, &opts).skipped.is_some());
        assert!(TqftSuite.run(&d, &opts).skipped.is_some());
        let c = ChromaticSuite.run(&d, &opts);
        assert!(c.skipped.is_none() && c.passed() && c.entries.len() == 6);
    }

    #[test]
    fn small_suites_pass() {
        let opts = SuiteOptions { instances: 5, ..Default::default() };
        let r = SuiteRegistry::default();
        for s in ["hopf", "mtrace", "chromatic", "diagrams", "tqft", "extend"] {
            let run = r.get(s).unwrap().run(&data("z2"), &opts);
            assert!(run.passed() && !run.entries.is_empty(), "{s}: {:?}", run.entries);
        }
    }
}
