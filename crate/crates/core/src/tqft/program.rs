use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::diagrams::DiagramFile;
use crate::scalars::FieldElement;

use super::{CutOptions, GateDiagram, SkeinVector, StrandRef, Tqft, TqftError};

fn one() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum Instruction {
    #[serde(rename = "attach0")]
    Attach0 {
        gate: usize,
        #[serde(default)]
        base: StrandRef,
        #[serde(default = "one")]
        turns: usize,
    },
    #[serde(rename = "attach1")]
    Attach1 {
        gate: usize,
        #[serde(default)]
        basepoint: usize,
        #[serde(default)]
        reversed: bool,
    },
    #[serde(rename = "stabilize")]
    Stabilize {
        #[serde(default)]
        base: StrandRef,
    },
    #[serde(rename = "cap")]
    Cap,
}

impl Instruction {
    fn gate(&self) -> Option<usize> {
        match self {
            Instruction::Attach0 { gate, .. } | Instruction::Attach1 { gate, .. } => Some(*gate),
            _ => None,
        }
    }

    fn label(&self) -> String {
        match self {
            Instruction::Attach0 { gate, turns, .. } => format!("attach0 gate {gate} turns {turns}"),
            Instruction::Attach1 { gate, .. } => format!("attach1 gate {gate}"),
            Instruction::Stabilize { .. } => "stabilize".into(),
            Instruction::Cap => "cap".into(),
        }
    }
}

/// A closed 3-manifold as a sequence of handle operations applied to the
/// normalized circle, ending with a sphere cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurgeryProgram {
    pub name: String,
    /// A closed diagram file (with an extra `anchors` map) replacing the
    /// normalized circle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Value>,
    pub instructions: Vec<Instruction>,
}

impl SurgeryProgram {
    pub fn parse(text: &str) -> Result<Self, TqftError> {
        serde_json::from_str(text).map_err(|e| TqftError::InvalidProgram(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, TqftError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| TqftError::InvalidProgram(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn max_gate(&self) -> usize {
        self.instructions.iter().filter_map(Instruction::gate).max().unwrap_or(0)
    }

    /// Gates open when referenced, closed before the cap, and one cap at the end.
    pub fn validate(&self) -> Result<(), TqftError> {
        let bad = |s: String| Err(TqftError::InvalidProgram(format!("{}: {s}", self.name)));
        let mut open = BTreeSet::new();
        let n = self.instructions.len();
        if n == 0 || self.instructions[n - 1] != Instruction::Cap {
            return bad("the last instruction must be a cap".into());
        }
        for (k, ins) in self.instructions.iter().enumerate() {
            match ins {
                Instruction::Attach0 { gate, .. } => {
                    if !open.insert(*gate) {
                        return bad(format!("step {k}: gate {gate} is already open"));
                    }
                }
                Instruction::Attach1 { gate, .. } => {
                    if !open.remove(gate) {
                        return bad(format!("step {k}: gate {gate} is not open"));
                    }
                }
                Instruction::Stabilize { .. } => {}
                Instruction::Cap => {
                    if k + 1 != n {
                        return bad(format!("step {k}: cap before the end"));
                    }
                    if !open.is_empty() {
                        return bad(format!("cap with gates {open:?} still open"));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub op: String,
    pub genus: usize,
    pub terms: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProgramRun {
    pub name: String,
    #[serde(serialize_with = "ser_element")]
    pub value: FieldElement,
    pub steps: Vec<Step>,
}

pub(crate) fn ser_element<S: serde::Serializer>(x: &FieldElement, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl Tqft {
    /// The starting vector of a program.
    pub fn initial(&self, p: &SurgeryProgram) -> Result<SkeinVector, TqftError> {
        let Some(v) = &p.initial else { return self.circle_vector() };
        let file = DiagramFile::parse(&v.to_string(), self.algebra())?;
        let anchors: BTreeMap<String, (usize, usize)> = match v.get("anchors") {
            Some(a) => serde_json::from_value(a.clone()).map_err(|e| TqftError::InvalidProgram(format!("anchors: {e}")))?,
            None => BTreeMap::new(),
        };
        let d = GateDiagram::new(file.diagram, BTreeMap::new(), anchors)?;
        Ok(SkeinVector::single(self.algebra(), d))
    }

    /// Applies instructions other than the cap.
    pub fn apply(&self, v: &SkeinVector, instructions: &[Instruction]) -> Result<SkeinVector, TqftError> {
        let mut steps = Vec::new();
        self.apply_logged(v.clone(), instructions, &mut steps)
    }

    fn apply_logged(&self, mut v: SkeinVector, instructions: &[Instruction], steps: &mut Vec<Step>) -> Result<SkeinVector, TqftError> {
        let mut fresh = instructions.iter().filter_map(Instruction::gate).max().unwrap_or(0) + 1;
        for ins in instructions {
            v = match ins {
                Instruction::Attach0 { gate, base, turns } => self.attach0(&v, *gate, base, *turns)?,
                Instruction::Attach1 { gate, basepoint, reversed } => {
                    self.attach1(&v, *gate, CutOptions { basepoint: *basepoint, reversed: *reversed })?
                }
                Instruction::Stabilize { base } => {
                    while v.terms.iter().any(|(_, d)| d.shifts.contains_key(&fresh)) {
                        fresh += 1;
                    }
                    let w = self.attach0(&v, fresh, base, 1)?;
                    self.attach1(&w, fresh, CutOptions::default())?
                }
                Instruction::Cap => return Err(TqftError::InvalidProgram("cap inside an instruction block".into())),
            };
            steps.push(Step { op: ins.label(), genus: v.genus().unwrap_or(0), terms: v.terms.len() });
        }
        Ok(v)
    }

    /// The invariant of the manifold a program describes.
    pub fn run(&self, p: &SurgeryProgram) -> Result<ProgramRun, TqftError> {
        p.validate()?;
        let mut steps = Vec::new();
        let v = self.initial(p)?;
        let body = &p.instructions[..p.instructions.len() - 1];
        let v = self.apply_logged(v, body, &mut steps)?;
        let value = self.cap_sphere(&v)?;
        steps.push(Step { op: "cap".into(), genus: 0, terms: v.terms.len() });
        Ok(ProgramRun { name: p.name.clone(), value, steps })
    }

    pub fn k_invariant(&self, p: &SurgeryProgram) -> Result<FieldElement, TqftError> {
        Ok(self.run(p)?.value)
    }
}

fn body(p: &SurgeryProgram) -> &[Instruction] {
    &p.instructions[..p.instructions.len() - 1]
}

/// Both programs on the same base strand, the second with its gates moved
/// past the first's.
pub fn connected_sum(p1: &SurgeryProgram, p2: &SurgeryProgram) -> Result<SurgeryProgram, TqftError> {
    p1.validate()?;
    p2.validate()?;
    if p2.initial.is_some() {
        return Err(TqftError::InvalidProgram(format!("{} has its own initial diagram", p2.name)));
    }
    let offset = p1.max_gate();
    let mut instructions = body(p1).to_vec();
    instructions.extend(body(p2).iter().map(|ins| match ins.clone() {
        Instruction::Attach0 { gate, base, turns } => Instruction::Attach0 { gate: gate + offset, base, turns },
        Instruction::Attach1 { gate, basepoint, reversed } => {
            Instruction::Attach1 { gate: gate + offset, basepoint, reversed }
        }
        other => other,
    }));
    instructions.push(Instruction::Cap);
    Ok(SurgeryProgram { name: format!("{} # {}", p1.name, p2.name), initial: p1.initial.clone(), instructions })
}

/// Inserts a cancelling handle pair on the base strand before step `position`.
pub fn stabilize(p: &SurgeryProgram, position: usize) -> Result<SurgeryProgram, TqftError> {
    p.validate()?;
    if position >= p.instructions.len() {
        return Err(TqftError::InvalidProgram(format!("position {position} is at or past the cap")));
    }
    let gate = p.max_gate() + 1;
    let mut instructions = p.instructions.clone();
    instructions.splice(
        position..position,
        [
            Instruction::Attach0 { gate, base: StrandRef::default(), turns: 1 },
            Instruction::Attach1 { gate, basepoint: 0, reversed: false },
        ],
    );
    Ok(SurgeryProgram { name: format!("{} (stabilized)", p.name), initial: p.initial.clone(), instructions })
}

pub trait ProgramSource: Send + Sync {
    fn name(&self) -> &str;
    fn program(&self) -> Result<SurgeryProgram, TqftError>;
}

struct Embedded {
    name: &'static str,
    text: &'static str,
}

impl ProgramSource for Embedded {
    fn name(&self) -> &str {
        self.name
    }

    fn program(&self) -> Result<SurgeryProgram, TqftError> {
        SurgeryProgram::parse(self.text)
    }
}

/// Programs selectable by name.
pub struct ProgramRegistry {
    sources: IndexMap<String, Box<dyn ProgramSource>>,
}

impl Default for ProgramRegistry {
    fn default() -> Self {
        let mut r = ProgramRegistry { sources: IndexMap::new() };
        for (name, text) in [
            ("s3", include_str!("../../data/programs/s3.json")),
            ("s3_genus1", include_str!("../../data/programs/s3_genus1.json")),
            ("s1xs2", include_str!("../../data/programs/s1xs2.json")),
            ("l2_1", include_str!("../../data/programs/l2_1.json")),
            ("l3_1", include_str!("../../data/programs/l3_1.json")),
            ("l4_1", include_str!("../../data/programs/l4_1.json")),
        ] {
            r.register(Box::new(Embedded { name, text }));
        }
        r
    }
}

impl ProgramRegistry {
    pub fn register(&mut self, source: Box<dyn ProgramSource>) {
        self.sources.insert(source.name().to_string(), source);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sources.keys().map(String::as_str)
    }

    /// A registered name or a path to a program file.
    pub fn load(&self, name_or_path: &str) -> Result<SurgeryProgram, TqftError> {
        match self.sources.get(name_or_path) {
            Some(s) => s.program(),
            None => SurgeryProgram::load(std::path::Path::new(name_or_path)),
        }
    }
}

/// Every registered program, in registration order.
pub fn builtin_programs() -> Result<Vec<SurgeryProgram>, TqftError> {
    let r = ProgramRegistry::default();
    r.sources.values().map(|s| s.program()).collect()
}
