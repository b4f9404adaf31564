//! Planar diagrams read bottom to top as words of slices, their evaluation
//! to matrices, and the renormalized invariant of closed graphs.

mod bridge;
pub mod corpus;
mod file;
#[cfg(test)]
mod tests;

pub use bridge::{Bond, BridgedDiagram, KronSum};
pub use file::{right_mult, DiagramFile, Registry};

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::mtrace::{TraceContext, TraceError};
use crate::rep::{
    copairing_matrix, dual_left, dual_left_key, pairing_matrix, pivotal_coev_matrix, pivotal_ev_matrix, tensor_all,
    tensor_key, Module, RepError,
};
use crate::scalars::{FieldElement, Matrix, ScalarError, SparseVec};

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("signature mismatch at layer {layer}: {detail}")]
    SignatureMismatch { layer: usize, detail: String },
    #[error("gate atoms cannot be evaluated in a plain diagram (layer {0})")]
    GateInPlainDiagram(usize),
    #[error("not an open presentation: {0}")]
    NotOpen(String),
    #[error("cut level {0} is not projective")]
    NotProjectiveCut(usize),
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },
    #[error("bad diagram file: {0}")]
    Format(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "up" => Some(Orientation::Up),
            "down" => Some(Orientation::Down),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Up => "up",
            Orientation::Down => "down",
        }
    }
}

/// A colored strand. A down strand colored `M` carries the left dual `M*`.
#[derive(Clone)]
pub struct Strand {
    pub module: Module,
    pub orientation: Orientation,
}

impl Strand {
    pub fn up(m: &Module) -> Self {
        Strand { module: m.clone(), orientation: Orientation::Up }
    }

    pub fn down(m: &Module) -> Self {
        Strand { module: m.clone(), orientation: Orientation::Down }
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// Key of the module the strand carries.
    pub fn carrier_key(&self) -> String {
        match self.orientation {
            Orientation::Up => self.module.key().to_string(),
            Orientation::Down => dual_left_key(&self.module),
        }
    }

    /// The carried module, building the dual when needed.
    pub fn carrier(&self) -> Module {
        match self.orientation {
            Orientation::Up => self.module.clone(),
            Orientation::Down => dual_left(&self.module),
        }
    }

    pub fn matches(&self, other: &Strand) -> bool {
        self.dim() == other.dim() && self.carrier_key() == other.carrier_key()
    }
}

impl fmt::Debug for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.module.key(), if self.orientation == Orientation::Up { "↑" } else { "↓" })
    }
}

pub type Signature = Vec<Strand>;

pub fn signature_dim(s: &[Strand]) -> usize {
    s.iter().map(Strand::dim).product()
}

pub fn signature_key(s: &[Strand]) -> String {
    let keys: Vec<String> = s.iter().map(Strand::carrier_key).collect();
    tensor_key(keys.iter().map(String::as_str))
}

fn signatures_match(a: &[Strand], b: &[Strand]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.matches(y))
}

/// The tensor product of the carried modules.
pub fn signature_module(s: &[Strand]) -> Result<Module, RepError> {
    let carriers: Vec<Module> = s.iter().map(Strand::carrier).collect();
    tensor_all(&carriers)
}

/// A named morphism between signatures.
pub struct CouponDef {
    pub name: String,
    pub inputs: Signature,
    pub outputs: Signature,
    pub matrix: Matrix,
}

impl CouponDef {
    pub fn new(
        name: impl Into<String>,
        inputs: Signature,
        outputs: Signature,
        matrix: Matrix,
    ) -> Result<Arc<Self>, DiagramError> {
        let name = name.into();
        if matrix.rows() != signature_dim(&outputs) || matrix.cols() != signature_dim(&inputs) {
            return Err(DiagramError::Format(format!(
                "coupon {name}: {}x{} matrix for {} -> {}",
                matrix.rows(),
                matrix.cols(),
                signature_dim(&inputs),
                signature_dim(&outputs)
            )));
        }
        Ok(Arc::new(CouponDef { name, inputs, outputs, matrix }))
    }

    /// Same, also checking that the matrix intertwines the actions.
    pub fn checked(
        name: impl Into<String>,
        inputs: Signature,
        outputs: Signature,
        matrix: Matrix,
        algebra: &Arc<crate::hopf::HopfAlgebra>,
    ) -> Result<Arc<Self>, DiagramError> {
        let c = Self::new(name, inputs, outputs, matrix)?;
        let side = |s: &[Strand]| -> Result<Module, RepError> {
            if s.is_empty() {
                Ok(crate::rep::trivial(algebra))
            } else {
                signature_module(s)
            }
        };
        crate::rep::Morphism::new(side(&c.inputs)?, side(&c.outputs)?, c.matrix.clone())?;
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateSide {
    In,
    Out,
}

#[derive(Clone)]
pub enum Atom {
    Id(Strand),
    Coupon(Arc<CouponDef>),
    /// `M* ⊗ M -> 1`, inputs `[M↓, M↑]`.
    EvL(Module),
    /// `1 -> M ⊗ M*`, outputs `[M↑, M↓]`.
    CoevL(Module),
    /// `M ⊗ M* -> 1` through the pivot, inputs `[M↑, M↓]`.
    EvR(Module),
    /// `1 -> M* ⊗ M` through the pivot, outputs `[M↓, M↑]`.
    CoevR(Module),
    /// A strand entering (`In`) or leaving (`Out`) the disk through a gate.
    Gate { gate: usize, strand: Strand, side: GateSide },
}

impl Atom {
    pub fn id(m: &Module) -> Self {
        Atom::Id(Strand::up(m))
    }

    pub fn inputs(&self) -> Signature {
        match self {
            Atom::Id(s) => vec![s.clone()],
            Atom::Coupon(c) => c.inputs.clone(),
            Atom::EvL(m) => vec![Strand::down(m), Strand::up(m)],
            Atom::EvR(m) => vec![Strand::up(m), Strand::down(m)],
            Atom::CoevL(_) | Atom::CoevR(_) => Vec::new(),
            Atom::Gate { strand, side: GateSide::In, .. } => vec![strand.clone()],
            Atom::Gate { side: GateSide::Out, .. } => Vec::new(),
        }
    }

    pub fn outputs(&self) -> Signature {
        match self {
            Atom::Id(s) => vec![s.clone()],
            Atom::Coupon(c) => c.outputs.clone(),
            Atom::CoevL(m) => vec![Strand::up(m), Strand::down(m)],
            Atom::CoevR(m) => vec![Strand::down(m), Strand::up(m)],
            Atom::EvL(_) | Atom::EvR(_) => Vec::new(),
            Atom::Gate { strand, side: GateSide::Out, .. } => vec![strand.clone()],
            Atom::Gate { side: GateSide::In, .. } => Vec::new(),
        }
    }

    /// `None` for identities, which the engine skips.
    fn matrix(&self) -> Result<Option<Matrix>, DiagramError> {
        Ok(match self {
            Atom::Id(_) => None,
            Atom::Coupon(c) => Some(c.matrix.clone()),
            Atom::EvL(m) => Some(pairing_matrix(m.algebra().field(), m.dim())),
            Atom::CoevL(m) => Some(copairing_matrix(m.algebra().field(), m.dim())),
            Atom::EvR(m) => Some(pivotal_ev_matrix(m)?),
            Atom::CoevR(m) => Some(pivotal_coev_matrix(m)?),
            Atom::Gate { .. } => unreachable!("gates are rejected before evaluation"),
        })
    }

    pub fn label(&self) -> String {
        match self {
            Atom::Id(s) => format!("id {s:?}"),
            Atom::Coupon(c) => format!("coupon {}", c.name),
            Atom::EvL(m) => format!("ev_l {}", m.key()),
            Atom::CoevL(m) => format!("coev_l {}", m.key()),
            Atom::EvR(m) => format!("ev_r {}", m.key()),
            Atom::CoevR(m) => format!("coev_r {}", m.key()),
            Atom::Gate { gate, strand, side } => format!("gate {gate} {side:?} {strand:?}"),
        }
    }
}

/// Layers of atoms between a bottom and a top signature.
#[derive(Clone)]
pub struct SliceDiagram {
    pub bottom: Signature,
    pub top: Signature,
    pub layers: Vec<Vec<Atom>>,
}

/// A non-identity atom placed at a strand offset.
struct Placed {
    offset: usize,
    inputs: usize,
    outputs: usize,
    matrix: Matrix,
}

impl SliceDiagram {
    pub fn new(bottom: Signature, top: Signature, layers: Vec<Vec<Atom>>) -> Result<Self, DiagramError> {
        let d = SliceDiagram { bottom, top, layers };
        d.validate()?;
        Ok(d)
    }

    /// The identity on a signature, with no layers.
    pub fn identity(sig: Signature) -> Self {
        SliceDiagram { bottom: sig.clone(), top: sig, layers: Vec::new() }
    }

    /// A one-layer diagram.
    pub fn layer(atoms: Vec<Atom>) -> Self {
        let bottom = atoms.iter().flat_map(Atom::inputs).collect();
        let top = atoms.iter().flat_map(Atom::outputs).collect();
        SliceDiagram { bottom, top, layers: vec![atoms] }
    }

    pub fn is_closed(&self) -> bool {
        self.bottom.is_empty() && self.top.is_empty()
    }

    pub fn has_gates(&self) -> bool {
        self.layers.iter().flatten().any(|a| matches!(a, Atom::Gate { .. }))
    }

    /// Signatures at every level, bottom first (`layers.len() + 1` entries).
    pub fn levels(&self) -> Result<Vec<Signature>, DiagramError> {
        let mut out = vec![self.bottom.clone()];
        for (k, layer) in self.layers.iter().enumerate() {
            let current = out.last().expect("nonempty");
            let inputs: Signature = layer.iter().flat_map(Atom::inputs).collect();
            if !signatures_match(current, &inputs) {
                return Err(DiagramError::SignatureMismatch {
                    layer: k,
                    detail: format!("expected {current:?}, atoms consume {inputs:?}"),
                });
            }
            out.push(layer.iter().flat_map(Atom::outputs).collect());
        }
        let last = out.last().expect("nonempty");
        if !signatures_match(last, &self.top) {
            return Err(DiagramError::SignatureMismatch {
                layer: self.layers.len(),
                detail: format!("declared top {:?}, layers produce {last:?}", self.top),
            });
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        self.levels().map(|_| ())
    }

    /// `other` on top of `self`.
    pub fn stack(&self, other: &SliceDiagram) -> Result<SliceDiagram, DiagramError> {
        if !signatures_match(&self.top, &other.bottom) {
            return Err(DiagramError::SignatureMismatch {
                layer: self.layers.len(),
                detail: format!("{:?} below {:?}", self.top, other.bottom),
            });
        }
        let mut layers = self.layers.clone();
        layers.extend(other.layers.iter().cloned());
        Ok(SliceDiagram { bottom: self.bottom.clone(), top: other.top.clone(), layers })
    }

    /// Side by side, `self` on the left; shorter word padded with identities.
    pub fn beside(&self, other: &SliceDiagram) -> Result<SliceDiagram, DiagramError> {
        let a = self.levels()?;
        let b = other.levels()?;
        let n = self.layers.len().max(other.layers.len());
        let mut layers = Vec::with_capacity(n);
        for k in 0..n {
            let mut row = pick_layer(&self.layers, &a, k);
            row.extend(pick_layer(&other.layers, &b, k));
            layers.push(row);
        }
        let mut bottom = self.bottom.clone();
        bottom.extend(other.bottom.iter().cloned());
        let mut top = self.top.clone();
        top.extend(other.top.iter().cloned());
        Ok(SliceDiagram { bottom, top, layers })
    }

    /// Wraps with identity strands on either side.
    pub fn padded(&self, left: &[Strand], right: &[Strand]) -> Result<SliceDiagram, DiagramError> {
        SliceDiagram::identity(left.to_vec()).beside(self)?.beside(&SliceDiagram::identity(right.to_vec()))
    }

    fn placed_layers(&self) -> Result<(Vec<Vec<Placed>>, Vec<Vec<usize>>), DiagramError> {
        let levels = self.levels()?;
        let mut placed = Vec::with_capacity(self.layers.len());
        for (k, layer) in self.layers.iter().enumerate() {
            let mut row = Vec::new();
            let mut offset = 0;
            for atom in layer {
                if matches!(atom, Atom::Gate { .. }) {
                    return Err(DiagramError::GateInPlainDiagram(k));
                }
                let (ni, no) = (atom.inputs().len(), atom.outputs().len());
                if let Some(matrix) = atom.matrix()? {
                    row.push(Placed { offset, inputs: ni, outputs: no, matrix });
                }
                offset += no;
            }
            placed.push(row);
        }
        let dims = levels.iter().map(|s| s.iter().map(Strand::dim).collect()).collect();
        Ok((placed, dims))
    }

    /// Pushes the given input vectors through the diagram.
    pub fn evaluate_on(&self, inputs: &[SparseVec]) -> Result<Vec<SparseVec>, DiagramError> {
        let (placed, dims) = self.placed_layers()?;
        Ok(inputs
            .par_iter()
            .map(|v| {
                let mut state = v.clone();
                for (k, row) in placed.iter().enumerate() {
                    // atoms to the left have already been applied, so strands
                    // left of `offset` are in output form
                    let mut cur: Vec<usize> = dims[k].clone();
                    for p in row {
                        let start = p.offset;
                        state = apply_atom(&state, &cur, start, p);
                        let out_dims: Vec<usize> = (0..p.outputs).map(|i| dims[k + 1][start + i]).collect();
                        cur.splice(start..start + p.inputs, out_dims);
                    }
                }
                state
            })
            .collect())
    }

    /// The matrix of the diagram; a closed diagram gives a 1x1 matrix.
    pub fn evaluate(&self) -> Result<Matrix, DiagramError> {
        let f = self.field();
        let n = signature_dim(&self.bottom);
        let basis: Vec<SparseVec> = (0..n).map(|i| vec![(i, f.one())]).collect();
        let cols = self.evaluate_on(&basis)?;
        Ok(Matrix::from_columns(f, signature_dim(&self.top), cols))
    }

    /// The value of a closed diagram.
    pub fn scalar(&self) -> Result<FieldElement, DiagramError> {
        if !self.is_closed() {
            return Err(DiagramError::NotOpen("scalar of a diagram with boundary".into()));
        }
        Ok(self.evaluate()?.get(0, 0))
    }

    fn field(&self) -> crate::scalars::Field {
        self.any_module().map(|m| m.algebra().field()).expect("diagram with no colored strand")
    }

    fn any_module(&self) -> Option<Module> {
        if let Some(s) = self.bottom.first().or(self.top.first()) {
            return Some(s.module.clone());
        }
        self.layers.iter().flatten().find_map(|a| match a {
            Atom::Id(s) | Atom::Gate { strand: s, .. } => Some(s.module.clone()),
            Atom::EvL(m) | Atom::EvR(m) | Atom::CoevL(m) | Atom::CoevR(m) => Some(m.clone()),
            Atom::Coupon(c) => c.inputs.first().or(c.outputs.first()).map(|s| s.module.clone()),
        })
    }

    /// All strand colors appearing anywhere in the diagram.
    pub fn colors(&self) -> Vec<Module> {
        let mut seen: HashMap<String, Module> = HashMap::new();
        let mut push = |s: &Strand| {
            seen.entry(s.module.key().to_string()).or_insert_with(|| s.module.clone());
        };
        self.bottom.iter().chain(&self.top).for_each(&mut push);
        for a in self.layers.iter().flatten() {
            for s in a.inputs().iter().chain(&a.outputs()) {
                push(s);
            }
        }
        let mut out: Vec<Module> = seen.into_values().collect();
        out.sort_by(|a, b| a.key().cmp(b.key()));
        out
    }

    /// The cheapest level carrying a projective strand.
    pub fn projective_level(&self) -> Result<usize, DiagramError> {
        let levels = self.levels()?;
        levels
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|x| x.module.is_projective()))
            .min_by_key(|(k, s)| (signature_dim(s), *k))
            .map(|(k, _)| k)
            .ok_or(DiagramError::NotProjectiveCut(0))
    }

    /// `F′` of a closed diagram cut at `level`: `w Θ_Y u` with `u` the part
    /// below the level and `w` the part above.
    pub fn fprime_at_level(&self, ctx: &TraceContext, level: usize) -> Result<FieldElement, DiagramError> {
        if !self.is_closed() {
            return Err(DiagramError::NotOpen("level cut of a diagram with boundary".into()));
        }
        let levels = self.levels()?;
        let sig = levels.get(level).ok_or(DiagramError::NotProjectiveCut(level))?.clone();
        if sig.is_empty() || !sig.iter().any(|s| s.module.is_projective()) {
            return Err(DiagramError::NotProjectiveCut(level));
        }
        let below = SliceDiagram { bottom: Vec::new(), top: sig.clone(), layers: self.layers[..level].to_vec() };
        let above = SliceDiagram { bottom: sig.clone(), top: Vec::new(), layers: self.layers[level..].to_vec() };
        let u = below.evaluate_on(&[vec![(0, self.field().one())]])?.remove(0);
        let y = signature_module(&sig)?;
        let tu = ctx.theta(&y)?.apply(&u);
        let out = above.evaluate_on(&[tu])?.remove(0);
        Ok(out.into_iter().find(|(i, _)| *i == 0).map(|(_, x)| x).unwrap_or_else(|| self.field().zero()))
    }
}

fn pick_layer(layers: &[Vec<Atom>], levels: &[Signature], k: usize) -> Vec<Atom> {
    match layers.get(k) {
        Some(l) => l.clone(),
        None => levels.last().expect("nonempty").iter().cloned().map(Atom::Id).collect(),
    }
}

/// Applies one atom occupying strands `start..start+inputs` of a vector
/// whose strand dimensions are `dims`.
fn apply_atom(v: &SparseVec, dims: &[usize], start: usize, p: &Placed) -> SparseVec {
    let post: usize = dims[start + p.inputs..].iter().product();
    let mid_in: usize = dims[start..start + p.inputs].iter().product();
    let mid_out = p.matrix.rows();
    let mut acc: HashMap<usize, FieldElement> = HashMap::with_capacity(v.len() * 2);
    for (idx, x) in v {
        let pre = idx / (mid_in * post);
        let mid = (idx / post) % mid_in;
        let tail = idx % post;
        for (o, y) in p.matrix.column(mid) {
            let out = (pre * mid_out + o) * post + tail;
            let t = x * y;
            match acc.get_mut(&out) {
                Some(a) => *a += &t,
                None => {
                    acc.insert(out, t);
                }
            }
        }
    }
    let mut out: SparseVec = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
    out.sort_unstable_by_key(|(i, _)| *i);
    out
}

/// A 1-1 tangle on a projective color, cut from a closed graph.
#[derive(Clone)]
pub struct OpenPresentation {
    pub diagram: SliceDiagram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RotateMode {
    ConjugateLeft,
    ConjugateRight,
}

impl OpenPresentation {
    pub fn new(diagram: SliceDiagram) -> Result<Self, DiagramError> {
        diagram.validate()?;
        let ok = diagram.bottom.len() == 1
            && diagram.top.len() == 1
            && diagram.bottom[0].orientation == Orientation::Up
            && diagram.top[0].orientation == Orientation::Up
            && diagram.bottom[0].matches(&diagram.top[0]);
        if !ok {
            return Err(DiagramError::NotOpen(format!("{:?} -> {:?}", diagram.bottom, diagram.top)));
        }
        if !diagram.bottom[0].module.is_projective() {
            return Err(DiagramError::NotOpen(format!("{} is not projective", diagram.bottom[0].module.key())));
        }
        Ok(OpenPresentation { diagram })
    }

    pub fn color(&self) -> &Module {
        &self.diagram.bottom[0].module
    }

    /// `t_X(F(T))`.
    pub fn fprime(&self, ctx: &TraceContext) -> Result<FieldElement, DiagramError> {
        let m = self.diagram.evaluate()?;
        Ok(ctx.trace_matrix(self.color(), &m)?)
    }

    /// The same closed graph cut along a path moved past the cut point, as
    /// the dual tangle on `X*`.
    pub fn rotate_cut(&self, mode: RotateMode) -> Result<OpenPresentation, DiagramError> {
        let x = self.color().clone();
        let xd = dual_left(&x);
        let star = Strand::up(&xd);
        let d = match mode {
            RotateMode::ConjugateLeft => {
                // (ev_l ⊗ id)(id ⊗ T ⊗ id)(id ⊗ coev_l)
                let open = SliceDiagram::layer(vec![Atom::Id(star.clone()), Atom::CoevL(x.clone())]);
                let mid = self.diagram.padded(&[star.clone()], &[Strand::down(&x)])?;
                let close = SliceDiagram::layer(vec![Atom::EvL(x.clone()), Atom::Id(Strand::down(&x))]);
                open.stack(&mid)?.stack(&close)?
            }
            RotateMode::ConjugateRight => {
                // (id ⊗ ev_r)(id ⊗ T ⊗ id)(coev_r ⊗ id)
                let open = SliceDiagram::layer(vec![Atom::CoevR(x.clone()), Atom::Id(star.clone())]);
                let mid = self.diagram.padded(&[Strand::down(&x)], &[star.clone()])?;
                let close = SliceDiagram::layer(vec![Atom::Id(Strand::down(&x)), Atom::EvR(x.clone())]);
                open.stack(&mid)?.stack(&close)?
            }
        };
        OpenPresentation::new(SliceDiagram { bottom: vec![star.clone()], top: vec![star], layers: d.layers })
    }
}

/// True iff some strand is colored by a projective module. Gate diagrams
/// model a connected surface, so one check covers them too.
pub fn admissibility_check(d: &SliceDiagram) -> bool {
    d.colors().iter().any(|m| m.is_projective())
}
