use std::sync::Arc;

use serde::Serialize;

use crate::chromatic::{chromatic_based, presentation_family};
use crate::diagrams::{Atom, CouponDef, SliceDiagram, Strand};
use crate::hopf::HopfAlgebra;
use crate::rep::{dual_left, hom_space, regular, tensor_all, trivial};
use crate::scalars::{FieldElement, Matrix};

use super::program::ser_element;
use super::{GateDiagram, SkeinVector, StrandRef, Tqft, TqftError};

#[derive(Clone, Debug, Serialize)]
pub struct PantsValue {
    pub semisimple: bool,
    /// `trace of c_1` or `closed graph`.
    pub method: &'static str,
    #[serde(serialize_with = "ser_element")]
    pub value: FieldElement,
}

/// In the semisimple case the trace of the chromatic map based at the unit,
/// which is the dimension of the category. Otherwise `F′` of a ringed circle
/// beside a second circle, which factors through the plain evaluation of a
/// closed projective graph.
pub fn pants_obstruction(t: &Tqft) -> Result<PantsValue, TqftError> {
    let h = t.algebra();
    if h.is_semisimple() {
        let one = trivial(h);
        let c1 = chromatic_based(t.chromatic(), &one, &presentation_family(&one)?)?;
        return Ok(PantsValue { semisimple: true, method: "trace of c_1", value: c1.matrix.trace() });
    }
    let circle = t.circle()?;
    let ringed = t.ring(&circle, &StrandRef::default())?;
    let both = GateDiagram::new(ringed.diagram.beside(&circle.diagram)?, Default::default(), Default::default())?;
    Ok(PantsValue { semisimple: false, method: "closed graph", value: t.fprime(&both)? })
}

/// A vector with an extra sphere carrying the two-coupon unit graph.
pub struct ZeroCapped {
    pub vector: SkeinVector,
    pub sphere: SliceDiagram,
    pub weight: FieldElement,
}

fn unit_graph(h: &Arc<HopfAlgebra>) -> Result<(Arc<CouponDef>, Arc<CouponDef>), TqftError> {
    let one = trivial(h);
    let f = h.field();
    let up = Strand::up(&one);
    let m = Matrix::identity(f, 1);
    Ok((CouponDef::new("unit", Vec::new(), vec![up.clone()], m.clone())?, CouponDef::new("counit", vec![up], Vec::new(), m)?))
}

fn dimension(t: &Tqft) -> Result<FieldElement, TqftError> {
    let h = t.algebra();
    if !h.is_semisimple() {
        return Err(TqftError::NotSemisimple(h.name().into()));
    }
    let dim = pants_obstruction(t)?.value;
    if dim.is_zero() {
        return Err(TqftError::ZeroDimension);
    }
    Ok(dim)
}

/// Adjoins the unit graph on a new sphere, weighted by `1/dim`.
pub fn attach_zero_cap(t: &Tqft, v: &SkeinVector) -> Result<ZeroCapped, TqftError> {
    let weight = dimension(t)?.inv()?;
    let (unit, counit) = unit_graph(t.algebra())?;
    let sphere = SliceDiagram::new(Vec::new(), Vec::new(), vec![vec![Atom::Coupon(unit)], vec![Atom::Coupon(counit)]])?;
    Ok(ZeroCapped { vector: v.scale(&weight), sphere, weight })
}

/// The unit graph ringed by a generator loop through `c_1`, evaluated and
/// weighted by `1/dim`; the cancellation asks for exactly one.
pub fn zero_cap_check(t: &Tqft) -> Result<FieldElement, TqftError> {
    let weight = dimension(t)?.inv()?;
    let h = t.algebra();
    let g = t.generator().clone();
    let c1 = t.based_coupon(&trivial(h))?;
    let (unit, counit) = unit_graph(h)?;
    let d = SliceDiagram::new(
        Vec::new(),
        Vec::new(),
        vec![
            vec![Atom::CoevR(g.clone()), Atom::Coupon(unit)],
            vec![Atom::Id(Strand::down(&g)), Atom::Coupon(c1)],
            vec![Atom::EvL(g), Atom::Coupon(counit)],
        ],
    )?;
    Ok(&d.scalar()? * &weight)
}

/// `dim Hom(1, (H ⊗ H*)^{⊗g})`, an upper bound for the skein module of the
/// genus `g` surface.
pub fn skein_spanning_dim(h: &Arc<HopfAlgebra>, genus: usize, cap: usize) -> Result<usize, TqftError> {
    if genus == 0 {
        return Ok(1);
    }
    let d = h.dim();
    let dim = d.saturating_pow(2 * genus as u32);
    if dim > cap {
        return Err(TqftError::SizeCap { dim, cap });
    }
    let reg = regular(h);
    let handle = [reg.clone(), dual_left(&reg)];
    let factors: Vec<_> = (0..genus).flat_map(|_| handle.iter().cloned()).collect();
    let m = tensor_all(&factors)?;
    Ok(hom_space(&trivial(h), &m)?.len())
}
