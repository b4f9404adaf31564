//! Surfaces as disks with paired gates, skein vectors on them, and the handle
//! operators that reduce a surgery program to a scalar.

mod extend;
mod legs;
mod program;
mod relations;
#[cfg(test)]
mod tests;

pub use extend::{attach_zero_cap, pants_obstruction, skein_spanning_dim, zero_cap_check, PantsValue, ZeroCapped};
pub use program::{builtin_programs, connected_sum, stabilize, Instruction, ProgramRegistry, ProgramRun, SurgeryProgram};
pub use relations::{run_relations, RelationCheck};

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chromatic::{chromatic_based, chromatic_two_sided, presentation_family, ChromaticError, ChromaticMap};
use crate::diagrams::{
    right_mult, signature_dim, signature_module, Atom, CouponDef, DiagramError, GateSide, Orientation, Signature,
    SliceDiagram, Strand,
};
use crate::hopf::HopfAlgebra;
use crate::mtrace::{TraceContext, TraceError};
use crate::rep::{regular, Module, RepError};
use crate::scalars::{FieldElement, Matrix, ScalarError, SparseVec};

use legs::{flip, LegMaps};

pub const DEFAULT_SIZE_CAP: usize = 4096;

#[derive(Debug, Error)]
pub enum TqftError {
    #[error("no projective upward strand at {0}")]
    NoProjectiveStrand(String),
    #[error("inadmissible cut at gate {gate}: {detail}")]
    InadmissibleCut { gate: usize, detail: String },
    #[error("color through the gate has dimension {dim}, above the cap {cap}")]
    SizeCap { dim: usize, cap: usize },
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("invalid gate diagram: {0}")]
    InvalidDiagram(String),
    #[error("{0} is not semisimple")]
    NotSemisimple(String),
    #[error("the category has dimension zero")]
    ZeroDimension,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Chromatic(#[from] ChromaticError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A strand named by anchor or by `(level, position)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrandRef {
    Anchor(String),
    At { level: usize, position: usize },
}

impl Default for StrandRef {
    fn default() -> Self {
        StrandRef::Anchor("o".into())
    }
}

/// Where the dual bases are read off when a gate is cut.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutOptions {
    /// Which strand through the gate comes first in the cut color.
    #[serde(default)]
    pub basepoint: usize,
    /// Cut along the reversed curve, using dual bases of the dual color.
    #[serde(default)]
    pub reversed: bool,
}

/// A closed diagram in a disk whose gate atoms pair up into handles.
///
/// The strand entering gate `k` at `In` position `j` leaves it at `Out`
/// position `(j + shift) % m`.
#[derive(Clone)]
pub struct GateDiagram {
    pub diagram: SliceDiagram,
    pub shifts: BTreeMap<usize, usize>,
    pub anchors: BTreeMap<String, (usize, usize)>,
}

/// The contiguous run of gate atoms for one side of a gate.
#[derive(Clone, Debug)]
struct Span {
    layer: usize,
    first: usize,
    strands: Signature,
}

impl GateDiagram {
    pub fn new(
        diagram: SliceDiagram,
        shifts: BTreeMap<usize, usize>,
        anchors: BTreeMap<String, (usize, usize)>,
    ) -> Result<Self, TqftError> {
        let d = GateDiagram { diagram, shifts, anchors };
        d.validate()?;
        Ok(d)
    }

    pub fn genus(&self) -> usize {
        self.shifts.len()
    }

    pub fn validate(&self) -> Result<(), TqftError> {
        if !self.diagram.is_closed() {
            return Err(TqftError::InvalidDiagram("gate diagrams are closed".into()));
        }
        let levels = self.diagram.levels()?;
        for (k, layer) in self.diagram.layers.iter().enumerate() {
            for a in layer {
                if let Atom::Gate { gate, .. } = a {
                    if !self.shifts.contains_key(gate) {
                        return Err(TqftError::InvalidDiagram(format!("layer {k} uses undeclared gate {gate}")));
                    }
                }
            }
        }
        for &gate in self.shifts.keys() {
            self.spans(gate)?;
        }
        for (name, &(level, pos)) in &self.anchors {
            if levels.get(level).and_then(|s| s.get(pos)).is_none() {
                return Err(TqftError::InvalidDiagram(format!("anchor {name} at ({level}, {pos}) is off the diagram")));
            }
        }
        Ok(())
    }

    fn span(&self, gate: usize, side: GateSide) -> Result<Option<Span>, TqftError> {
        let mut found: Option<(usize, Vec<usize>, Signature)> = None;
        for (k, layer) in self.diagram.layers.iter().enumerate() {
            for (i, a) in layer.iter().enumerate() {
                if let Atom::Gate { gate: g, strand, side: s } = a {
                    if *g != gate || *s != side {
                        continue;
                    }
                    let entry = found.get_or_insert_with(|| (k, Vec::new(), Vec::new()));
                    if entry.0 != k {
                        return Err(TqftError::InvalidDiagram(format!("gate {gate} {side:?} spans several layers")));
                    }
                    entry.1.push(i);
                    entry.2.push(strand.clone());
                }
            }
        }
        let Some((layer, idx, strands)) = found else { return Ok(None) };
        if idx.windows(2).any(|w| w[1] != w[0] + 1) {
            return Err(TqftError::InvalidDiagram(format!("gate {gate} {side:?} atoms are not adjacent")));
        }
        Ok(Some(Span { layer, first: idx[0], strands }))
    }

    /// `(in, out)` spans of a gate; `None` when nothing passes through it.
    fn spans(&self, gate: usize) -> Result<Option<(Span, Span)>, TqftError> {
        let shift = *self.shifts.get(&gate).ok_or_else(|| TqftError::InvalidDiagram(format!("no gate {gate}")))?;
        match (self.span(gate, GateSide::In)?, self.span(gate, GateSide::Out)?) {
            (None, None) => Ok(None),
            (Some(i), Some(o)) => {
                let m = i.strands.len();
                if o.strands.len() != m {
                    return Err(TqftError::InvalidDiagram(format!("gate {gate} has {m} in and {} out", o.strands.len())));
                }
                for j in 0..m {
                    if !o.strands[(j + shift) % m].matches(&i.strands[j]) {
                        return Err(TqftError::InvalidDiagram(format!(
                            "gate {gate}: in {j} is {:?} but its exit is {:?}",
                            i.strands[j],
                            o.strands[(j + shift) % m]
                        )));
                    }
                }
                Ok(Some((i, o)))
            }
            _ => Err(TqftError::InvalidDiagram(format!("gate {gate} is used on one side only"))),
        }
    }

    pub fn resolve(&self, r: &StrandRef) -> Result<(usize, usize), TqftError> {
        match r {
            StrandRef::Anchor(name) => {
                self.anchors.get(name).copied().ok_or_else(|| TqftError::InvalidProgram(format!("no anchor '{name}'")))
            }
            StrandRef::At { level, position } => Ok((*level, *position)),
        }
    }

    /// Inserts layers acting on level `level`; the block must end on the
    /// same signature it starts from.
    fn insert_block(&self, level: usize, block: Vec<Vec<Atom>>, gate: usize, shift: usize) -> Result<Self, TqftError> {
        let n = block.len();
        let mut layers = self.diagram.layers[..level].to_vec();
        layers.extend(block);
        layers.extend(self.diagram.layers[level..].iter().cloned());
        let diagram = SliceDiagram::new(Vec::new(), Vec::new(), layers)?;
        let anchors = self
            .anchors
            .iter()
            .map(|(k, &(l, p))| (k.clone(), (if l > level { l + n } else { l }, p)))
            .collect();
        let mut shifts = self.shifts.clone();
        shifts.insert(gate, shift);
        GateDiagram::new(diagram, shifts, anchors)
    }
}

/// A formal combination of gate diagrams on a common genus.
#[derive(Clone)]
pub struct SkeinVector {
    pub algebra: Arc<HopfAlgebra>,
    pub terms: Vec<(FieldElement, GateDiagram)>,
}

impl SkeinVector {
    pub fn zero(h: &Arc<HopfAlgebra>) -> Self {
        SkeinVector { algebra: h.clone(), terms: Vec::new() }
    }

    pub fn single(h: &Arc<HopfAlgebra>, d: GateDiagram) -> Self {
        SkeinVector { algebra: h.clone(), terms: vec![(h.field().one(), d)] }
    }

    /// `None` for the zero vector.
    pub fn genus(&self) -> Option<usize> {
        self.terms.first().map(|(_, d)| d.genus())
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        let terms = self.terms.iter().map(|(x, d)| (x * c, d.clone())).collect();
        SkeinVector { algebra: self.algebra.clone(), terms }
    }

    pub fn add(&self, other: &SkeinVector) -> Result<Self, TqftError> {
        if let (Some(a), Some(b)) = (self.genus(), other.genus()) {
            if a != b {
                return Err(TqftError::InvalidDiagram(format!("adding vectors of genus {a} and {b}")));
            }
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(SkeinVector { algebra: self.algebra.clone(), terms })
    }
}

fn around(sig: &[Strand], pos: usize, width: usize, mid: Vec<Atom>) -> Vec<Atom> {
    let mut row: Vec<Atom> = sig[..pos].iter().cloned().map(Atom::Id).collect();
    row.extend(mid);
    row.extend(sig[pos + width..].iter().cloned().map(Atom::Id));
    row
}

fn splice(sig: &[Strand], pos: usize, width: usize, mid: &[Strand]) -> Signature {
    let mut out = sig[..pos].to_vec();
    out.extend(mid.iter().cloned());
    out.extend(sig[pos + width..].iter().cloned());
    out
}

/// A generator loop born left of the strand at `pos`, crossing it through
/// the coupon `c` and dying again.
fn ring_block(sig: &[Strand], pos: usize, g: &Module, c: Atom) -> Vec<Vec<Atom>> {
    let with_loop = splice(sig, pos, 0, &[Strand::down(g), Strand::up(g)]);
    vec![
        around(sig, pos, 0, vec![Atom::CoevR(g.clone())]),
        around(&with_loop, pos + 1, 2, vec![c]),
        around(&with_loop, pos, 2, vec![Atom::EvL(g.clone())]),
    ]
}

fn gate_atoms(gate: usize, strands: &[Strand], side: GateSide) -> Vec<Atom> {
    strands.iter().map(|s| Atom::Gate { gate, strand: s.clone(), side }).collect()
}

fn rotate_left<T: Clone>(v: &[T], k: usize) -> Vec<T> {
    if v.is_empty() {
        return Vec::new();
    }
    let k = k % v.len();
    v[k..].iter().chain(&v[..k]).cloned().collect()
}

/// The handle operators over one algebra, with the chromatic map on the
/// regular module and caches of its based versions.
pub struct Tqft {
    ctx: TraceContext,
    chromatic: ChromaticMap,
    based: RwLock<HashMap<String, Arc<CouponDef>>>,
    legs: LegMaps,
    size_cap: usize,
}

impl Tqft {
    pub fn new(h: &Arc<HopfAlgebra>) -> Result<Self, TqftError> {
        let ctx = TraceContext::new(h)?;
        let chromatic = chromatic_two_sided(h)?;
        Ok(Tqft { ctx, chromatic, based: RwLock::new(HashMap::new()), legs: LegMaps::default(), size_cap: DEFAULT_SIZE_CAP })
    }

    pub fn with_size_cap(mut self, cap: usize) -> Self {
        self.size_cap = cap;
        self
    }

    pub fn size_cap(&self) -> usize {
        self.size_cap
    }

    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        self.ctx.algebra()
    }

    pub fn ctx(&self) -> &TraceContext {
        &self.ctx
    }

    pub fn chromatic(&self) -> &ChromaticMap {
        &self.chromatic
    }

    pub fn generator(&self) -> &Module {
        &self.chromatic.generator
    }

    /// `a = e_j / λ(g e_j)` for the first basis element with `λ(g e_j) ≠ 0`,
    /// so that right multiplication by `a` has trace one.
    pub fn normalizer(&self) -> Result<SparseVec, TqftError> {
        let h = self.algebra();
        let (g, _) = h.require_pivot().map_err(ChromaticError::from)?;
        for j in 0..h.dim() {
            let w = h.eval_integral(&h.multiply(g, &h.basis_vec(j)));
            if !w.is_zero() {
                return Ok(vec![(j, w.inv()?)]);
            }
        }
        Err(TqftError::Trace(TraceError::DegenerateTrace("H".into())))
    }

    /// The circle `o_G` carrying the normalizing coupon, anchored at `o`.
    pub fn circle(&self) -> Result<GateDiagram, TqftError> {
        let h = self.algebra();
        let g = self.generator().clone();
        let up = Strand::up(&g);
        let coupon = CouponDef::new("h", vec![up.clone()], vec![up], right_mult(h, &self.normalizer()?))?;
        let diagram = SliceDiagram::new(
            Vec::new(),
            Vec::new(),
            vec![
                vec![Atom::CoevR(g.clone())],
                vec![Atom::Id(Strand::down(&g)), Atom::Coupon(coupon)],
                vec![Atom::EvL(g)],
            ],
        )?;
        GateDiagram::new(diagram, BTreeMap::new(), BTreeMap::from([("o".to_string(), (1, 1))]))
    }

    pub fn circle_vector(&self) -> Result<SkeinVector, TqftError> {
        Ok(SkeinVector::single(self.algebra(), self.circle()?))
    }

    /// `c_P` as a coupon on `(G↑, P↑)`.
    pub fn based_coupon(&self, p: &Module) -> Result<Arc<CouponDef>, TqftError> {
        if let Some(c) = self.based.read().expect("lock").get(p.key()) {
            return Ok(c.clone());
        }
        let c = if *p == regular(self.algebra()) {
            self.chromatic.clone()
        } else {
            chromatic_based(&self.chromatic, p, &presentation_family(p)?)?
        };
        let coupon = CouponDef::new(format!("c_{}", p.key()), c.input, c.output, c.matrix)?;
        self.based.write().expect("lock").insert(p.key().to_string(), coupon.clone());
        Ok(coupon)
    }

    /// Adds a handle with gate `gate`. With `turns ≥ 1` a generator loop
    /// crosses the gate `turns` times and meets the base strand once through
    /// `c_P`; with `turns = 0` the loop stays in the disk and a finger of the
    /// base strand runs through the gate instead.
    pub fn attach0(&self, v: &SkeinVector, gate: usize, base: &StrandRef, turns: usize) -> Result<SkeinVector, TqftError> {
        let terms = v
            .terms
            .iter()
            .map(|(c, d)| Ok((c.clone(), self.attach0_one(d, gate, base, turns)?)))
            .collect::<Result<Vec<_>, TqftError>>()?;
        Ok(SkeinVector { algebra: v.algebra.clone(), terms })
    }

    fn attach0_one(&self, d: &GateDiagram, gate: usize, base: &StrandRef, turns: usize) -> Result<GateDiagram, TqftError> {
        if d.shifts.contains_key(&gate) {
            return Err(TqftError::InvalidProgram(format!("gate {gate} is already open")));
        }
        let (level, pos) = d.resolve(base)?;
        let levels = d.diagram.levels()?;
        let sig = levels
            .get(level)
            .filter(|s| pos < s.len())
            .ok_or_else(|| TqftError::NoProjectiveStrand(format!("({level}, {pos}) is off the diagram")))?
            .clone();
        let p = &sig[pos];
        if p.orientation != Orientation::Up || !p.module.is_projective() {
            return Err(TqftError::NoProjectiveStrand(format!("({level}, {pos}) is {p:?}")));
        }
        let pm = p.module.clone();
        let c = Atom::Coupon(self.based_coupon(&pm)?);
        let g = self.generator().clone();
        let gu = Strand::up(&g);
        let (block, shift) = if turns == 0 {
            let pu = Strand::up(&pm);
            let pd = Strand::down(&pm);
            let finger = splice(&sig, pos + 1, 0, &[pd.clone(), pu.clone()]);
            let tip = splice(&sig, pos, 0, &[pu.clone(), pd.clone()]);
            let pair = [pu, pd];
            let mut block = ring_block(&sig, pos, &g, c);
            block.extend([
                around(&sig, pos + 1, 0, vec![Atom::CoevR(pm.clone())]),
                around(&finger, pos, 2, gate_atoms(gate, &pair, GateSide::In)),
                around(&sig, pos, 0, gate_atoms(gate, &pair, GateSide::Out)),
                around(&tip, pos, 2, vec![Atom::EvR(pm)]),
            ]);
            (block, 0)
        } else {
            let loops = vec![gu; turns];
            let wide = splice(&sig, pos, 0, &loops);
            let block = vec![
                around(&sig, pos, 0, gate_atoms(gate, &loops, GateSide::Out)),
                around(&wide, pos + turns - 1, 2, vec![c]),
                around(&wide, pos, turns, gate_atoms(gate, &loops, GateSide::In)),
            ];
            (block, usize::from(turns > 1))
        };
        d.insert_block(level, block, gate, shift)
    }

    /// Puts a contractible generator loop around the strand at `base`,
    /// meeting it through `c_P`.
    pub fn ring(&self, d: &GateDiagram, base: &StrandRef) -> Result<GateDiagram, TqftError> {
        let (level, pos) = d.resolve(base)?;
        let sig = d.diagram.levels()?.get(level).cloned().unwrap_or_default();
        let p = sig.get(pos).ok_or_else(|| TqftError::NoProjectiveStrand(format!("({level}, {pos}) is off the diagram")))?;
        if p.orientation != Orientation::Up || !p.module.is_projective() {
            return Err(TqftError::NoProjectiveStrand(format!("({level}, {pos}) is {p:?}")));
        }
        let c = Atom::Coupon(self.based_coupon(&p.module)?);
        let block = ring_block(&sig, pos, self.generator(), c);
        let n = block.len();
        let mut layers = d.diagram.layers[..level].to_vec();
        layers.extend(block);
        layers.extend(d.diagram.layers[level..].iter().cloned());
        let anchors = d.anchors.iter().map(|(k, &(l, q))| (k.clone(), (if l > level { l + n } else { l }, q))).collect();
        GateDiagram::new(SliceDiagram::new(Vec::new(), Vec::new(), layers)?, d.shifts.clone(), anchors)
    }

    /// Closes gate `gate`, replacing the strands through it by the dual-basis
    /// sum for the color they carry.
    pub fn attach1(&self, v: &SkeinVector, gate: usize, opts: CutOptions) -> Result<SkeinVector, TqftError> {
        let mut cuts: HashMap<String, Arc<Vec<(Arc<CouponDef>, Arc<CouponDef>)>>> = HashMap::new();
        let mut jobs = Vec::new();
        for (coef, d) in &v.terms {
            if !d.shifts.contains_key(&gate) {
                return Err(TqftError::InvalidProgram(format!("gate {gate} is not open")));
            }
            let (i, o) = d.spans(gate)?.ok_or_else(|| TqftError::InadmissibleCut {
                gate,
                detail: "no strand passes through the gate".into(),
            })?;
            let shift = d.shifts[&gate];
            let key = format!("{}|{}|{shift}", crate::diagrams::signature_key(&i.strands), crate::diagrams::signature_key(&o.strands));
            let pairs = match cuts.get(&key) {
                Some(p) => p.clone(),
                None => {
                    let p = Arc::new(self.cut_pairs(gate, &i.strands, &o.strands, shift, opts)?);
                    cuts.insert(key, p.clone());
                    p
                }
            };
            jobs.push((coef, d, i, o, pairs));
        }
        let terms: Vec<(FieldElement, GateDiagram)> = jobs
            .par_iter()
            .flat_map_iter(|(coef, d, i, o, pairs)| {
                pairs.iter().map(move |(vec_c, cov_c)| {
                    let mut layers = d.diagram.layers.clone();
                    let m = o.strands.len();
                    layers[o.layer].splice(o.first..o.first + m, [Atom::Coupon(vec_c.clone())]);
                    layers[i.layer].splice(i.first..i.first + m, [Atom::Coupon(cov_c.clone())]);
                    let mut shifts = d.shifts.clone();
                    shifts.remove(&gate);
                    let diagram = SliceDiagram { bottom: Vec::new(), top: Vec::new(), layers };
                    ((*coef).clone(), GateDiagram { diagram, shifts, anchors: d.anchors.clone() })
                })
            })
            .collect();
        for (_, d) in &terms {
            d.validate()?;
        }
        Ok(SkeinVector { algebra: v.algebra.clone(), terms })
    }

    /// Coupon pairs `(x_i: 1 -> Out, x^i: In -> 1)` for one gate shape.
    fn cut_pairs(
        &self,
        gate: usize,
        ins: &[Strand],
        outs: &[Strand],
        shift: usize,
        opts: CutOptions,
    ) -> Result<Vec<(Arc<CouponDef>, Arc<CouponDef>)>, TqftError> {
        let f = self.algebra().field();
        let m = outs.len();
        let b = opts.basepoint % m;
        let xs = rotate_left(outs, b);
        let cut_sig: Signature = if opts.reversed { xs.iter().rev().map(flip).collect() } else { xs.clone() };
        let dim = signature_dim(&cut_sig);
        if dim > self.size_cap {
            return Err(TqftError::SizeCap { dim, cap: self.size_cap });
        }
        let x = signature_module(&cut_sig)?;
        if !x.is_projective() {
            return Err(TqftError::InadmissibleCut { gate, detail: format!("{} is not projective", x.key()) });
        }
        let omega = self.ctx.omega(&x)?;
        let n_out = signature_dim(outs);
        let n_in = signature_dim(ins);
        omega
            .up
            .par_iter()
            .zip(omega.down.par_iter())
            .enumerate()
            .map(|(k, (up, down))| {
                // vector and covector on the basepoint-rotated color
                let (vec_x, cov_x) = if opts.reversed {
                    (self.legs.bend_cups(down, &xs)?, self.legs.bend_caps(up, &xs)?)
                } else {
                    (up.clone(), down.clone())
                };
                let vec_o = self.legs.rotate(&vec_x, &xs, (m - b) % m)?;
                let cov_i = self.legs.rotate(&cov_x, &xs, (shift + m - b) % m)?;
                let vc = CouponDef::new(format!("x_{k}"), Vec::new(), outs.to_vec(), Matrix::from_columns(f, n_out, vec![vec_o]))?;
                let mut cols: Vec<SparseVec> = vec![Vec::new(); n_in];
                for (j, x) in cov_i {
                    cols[j].push((0, x));
                }
                let cc = CouponDef::new(format!("x^{k}"), ins.to_vec(), Vec::new(), Matrix::from_columns(f, 1, cols))?;
                Ok((vc, cc))
            })
            .collect()
    }

    /// `F′` of a gate-free diagram, cut at its cheapest projective level.
    pub fn fprime(&self, d: &GateDiagram) -> Result<FieldElement, TqftError> {
        if d.genus() != 0 || d.diagram.has_gates() {
            return Err(TqftError::InvalidProgram("only genus 0 diagrams close up".into()));
        }
        let level = d.diagram.projective_level()?;
        Ok(d.diagram.fprime_at_level(&self.ctx, level)?)
    }

    /// The scalar of a genus 0 vector.
    pub fn cap_sphere(&self, v: &SkeinVector) -> Result<FieldElement, TqftError> {
        let f = self.algebra().field();
        let parts = v
            .terms
            .par_iter()
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, d)| Ok(c * &self.fprime(d)?))
            .collect::<Result<Vec<_>, TqftError>>()?;
        Ok(parts.into_iter().fold(f.zero(), |acc, x| &acc + &x))
    }
}
