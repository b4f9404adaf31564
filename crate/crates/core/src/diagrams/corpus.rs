//! Closed graphs, each given by several cuts, for cutting-path tests.

use std::sync::Arc;

use crate::hopf::HopfAlgebra;
use crate::mtrace::TraceContext;
use crate::rep::{coinvariants, dual_left, hom_space, invariants, regular, tensor, Module};
use crate::scalars::{FieldElement, Matrix, SparseVec};

use super::file::right_mult;
use super::{Atom, CouponDef, DiagramError, OpenPresentation, RotateMode, SliceDiagram, Strand};

/// One closed graph: open presentations plus closed slicings with the
/// levels at which they may be cut.
pub struct ClosedGraph {
    pub name: String,
    pub presentations: Vec<OpenPresentation>,
    pub level_cuts: Vec<(SliceDiagram, usize)>,
}

impl ClosedGraph {
    /// Every way of computing the invariant, labelled.
    pub fn values(&self, ctx: &TraceContext) -> Result<Vec<(String, FieldElement)>, DiagramError> {
        let mut out = Vec::new();
        for (k, p) in self.presentations.iter().enumerate() {
            out.push((format!("cut {k} on {}", p.color().key()), p.fprime(ctx)?));
        }
        for (k, (d, level)) in self.level_cuts.iter().enumerate() {
            out.push((format!("slicing {k} at level {level}"), d.fprime_at_level(ctx, *level)?));
        }
        Ok(out)
    }
}

fn element(h: &HopfAlgebra, weights: &[(usize, i64)]) -> SparseVec {
    let f = h.field();
    let d = h.dim();
    crate::scalars::collect_sparse(weights.iter().map(|&(i, w)| (i % d, f.from_int(w))))
}

/// `Σ (k+1) φ_k` over a basis of `Hom(a, b)`.
fn hom_combo(a: &Module, b: &Module) -> Result<Matrix, DiagramError> {
    let f = a.algebra().field();
    let mut m = Matrix::zeros(f, b.dim(), a.dim());
    for (k, phi) in hom_space(a, b)?.into_iter().enumerate() {
        m = m.add(&phi.matrix.scale(&f.from_int(k as i64 + 1)))?;
    }
    Ok(m)
}

struct Kit {
    h: Arc<HopfAlgebra>,
    reg: Module,
    regd: Module,
}

impl Kit {
    fn up(&self) -> Strand {
        Strand::up(&self.reg)
    }

    fn down(&self) -> Strand {
        Strand::down(&self.reg)
    }

    fn coupon(&self, name: &str, i: Vec<Strand>, o: Vec<Strand>, m: Matrix) -> Result<Atom, DiagramError> {
        Ok(Atom::Coupon(CouponDef::checked(name, i, o, m, &self.h)?))
    }

    fn rm(&self, name: &str, a: &SparseVec) -> Result<Atom, DiagramError> {
        self.coupon(name, vec![self.up()], vec![self.up()], right_mult(&self.h, a))
    }

    /// `z ↦ z1 a ⊗ z2 b`.
    fn split(&self, a: &SparseVec, b: &SparseVec) -> Result<Atom, DiagramError> {
        let h = &self.h;
        let d = h.dim();
        let cols = (0..d)
            .map(|e| {
                crate::scalars::collect_sparse(h.coproduct_basis(e).iter().flat_map(|(j, k, c)| {
                    let l = h.multiply(&h.basis_vec(*j), a);
                    let r = h.multiply(&h.basis_vec(*k), b);
                    l.into_iter()
                        .flat_map(move |(x, p)| r.clone().into_iter().map(move |(y, q)| (x * d + y, &(c * &p) * &q)))
                        .collect::<Vec<_>>()
                }))
            })
            .collect();
        self.coupon("split", vec![self.up()], vec![self.up(), self.up()], Matrix::from_columns(h.field(), d * d, cols))
    }

    /// `x ⊗ y ↦ x1 c · φ(S(x2) y)`.
    fn merge(&self, phi: &[FieldElement], c: &SparseVec) -> Result<Atom, DiagramError> {
        let h = &self.h;
        let f = h.field();
        let d = h.dim();
        let mut cols = Vec::with_capacity(d * d);
        for x in 0..d {
            for y in 0..d {
                let mut acc = Vec::new();
                for (j, k, coef) in h.coproduct_basis(x) {
                    let s = h.multiply(h.antipode().column(*k), &h.basis_vec(y));
                    let val = s.iter().fold(f.zero(), |a, (i, v)| &a + &(v * &phi[*i]));
                    if val.is_zero() {
                        continue;
                    }
                    let w = &val * coef;
                    for (i, v) in h.multiply(&h.basis_vec(*j), c) {
                        acc.push((i, &v * &w));
                    }
                }
                cols.push(crate::scalars::collect_sparse(acc));
            }
        }
        self.coupon("merge", vec![self.up(), self.up()], vec![self.up()], Matrix::from_columns(f, d, cols))
    }

    fn open(&self, layers: Vec<Vec<Atom>>) -> Result<OpenPresentation, DiagramError> {
        OpenPresentation::new(SliceDiagram::new(vec![self.up()], vec![self.up()], layers)?)
    }

    fn open_on(&self, x: &Module, layers: Vec<Vec<Atom>>) -> Result<OpenPresentation, DiagramError> {
        OpenPresentation::new(SliceDiagram::new(vec![Strand::up(x)], vec![Strand::up(x)], layers)?)
    }

    fn closed(&self, layers: Vec<Vec<Atom>>) -> Result<SliceDiagram, DiagramError> {
        SliceDiagram::new(Vec::new(), Vec::new(), layers)
    }

    fn with_rotations(&self, mut ps: Vec<OpenPresentation>) -> Result<Vec<OpenPresentation>, DiagramError> {
        let first = ps[0].clone();
        ps.push(first.rotate_cut(RotateMode::ConjugateLeft)?);
        ps.push(first.rotate_cut(RotateMode::ConjugateRight)?);
        Ok(ps)
    }
}

/// Closed graphs over `h`, colored by the regular module, its dual and
/// `α`, with coupons built from the algebra.
pub fn closed_graphs(h: &Arc<HopfAlgebra>) -> Result<Vec<ClosedGraph>, DiagramError> {
    let reg = regular(h);
    let k = Kit { h: h.clone(), regd: dual_left(&reg), reg: reg.clone() };
    let f = h.field();
    let d = h.dim();
    let (up, down) = (k.up(), k.down());
    let id = || Atom::Id(k.up());
    let idd = || Atom::Id(k.down());
    let u = element(h, &[(0, 1), (d - 1, 2)]);
    let v = element(h, &[(1, 3), (0, -1)]);
    let w = element(h, &[(d / 2, 1), (1, 1)]);
    let mut out = Vec::new();

    // a single coupon on a loop
    let ru = k.rm("ru", &u)?;
    out.push(ClosedGraph {
        name: "loop".into(),
        presentations: k.with_rotations(vec![k.open(vec![vec![ru.clone()]])?])?,
        level_cuts: {
            let c = k.closed(vec![vec![Atom::CoevL(reg.clone())], vec![ru.clone(), idd()], vec![Atom::EvR(reg.clone())]])?;
            vec![(c.clone(), 1), (c, 2)]
        },
    });

    // two coupons, cut before and after each
    let rv = k.rm("rv", &v)?;
    out.push(ClosedGraph {
        name: "loop with two coupons".into(),
        presentations: k.with_rotations(vec![
            k.open(vec![vec![ru.clone()], vec![rv.clone()]])?,
            k.open(vec![vec![rv.clone()], vec![ru.clone()]])?,
        ])?,
        level_cuts: {
            let c = k.closed(vec![
                vec![Atom::CoevL(reg.clone())],
                vec![ru.clone(), idd()],
                vec![rv.clone(), idd()],
                vec![Atom::EvR(reg.clone())],
            ])?;
            vec![(c.clone(), 1), (c.clone(), 2), (c, 3)]
        },
    });

    // three coupons, all cyclic cuts
    let rw = k.rm("rw", &w)?;
    out.push(ClosedGraph {
        name: "loop with three coupons".into(),
        presentations: vec![
            k.open(vec![vec![ru.clone()], vec![rv.clone()], vec![rw.clone()]])?,
            k.open(vec![vec![rv.clone()], vec![rw.clone()], vec![ru.clone()]])?,
            k.open(vec![vec![rw.clone()], vec![ru.clone()], vec![rv.clone()]])?,
        ],
        level_cuts: Vec::new(),
    });

    // theta graph: split then merge, cut on each of its three edges
    let phi: Vec<FieldElement> = (0..d).map(|i| &h.integral()[i] + &h.counit()[i]).collect();
    let split = k.split(&u, &v)?;
    let merge = k.merge(&phi, &w)?;
    let theta = |a: &Atom, b: &Atom| -> Result<Vec<OpenPresentation>, DiagramError> {
        let main = k.open(vec![vec![a.clone()], vec![b.clone()]])?;
        let right = k.open(vec![
            vec![id(), Atom::CoevL(reg.clone())],
            vec![b.clone(), idd()],
            vec![a.clone(), idd()],
            vec![id(), Atom::EvR(reg.clone())],
        ])?;
        let left = k.open(vec![
            vec![Atom::CoevR(reg.clone()), id()],
            vec![idd(), b.clone()],
            vec![idd(), a.clone()],
            vec![Atom::EvL(reg.clone()), id()],
        ])?;
        k.with_rotations(vec![main, right, left])
    };
    out.push(ClosedGraph {
        name: "theta".into(),
        presentations: theta(&split, &merge)?,
        level_cuts: {
            let c = k.closed(vec![
                vec![Atom::CoevL(reg.clone())],
                vec![split.clone(), idd()],
                vec![merge.clone(), idd()],
                vec![Atom::EvR(reg.clone())],
            ])?;
            vec![(c.clone(), 1), (c.clone(), 2), (c, 3)]
        },
    });

    // theta graph with generic intertwiners through H ⊗ H
    let hh = tensor(&reg, &reg)?;
    let a2 = k.coupon("a2", vec![up.clone()], vec![up.clone(), up.clone()], hom_combo(&reg, &hh)?)?;
    let b2 = k.coupon("b2", vec![up.clone(), up.clone()], vec![up.clone()], hom_combo(&hh, &reg)?)?;
    out.push(ClosedGraph { name: "theta, generic coupons".into(), presentations: theta(&a2, &b2)?, level_cuts: Vec::new() });

    // theta graph whose middle edges are H and H*
    let hhd = tensor(&reg, &k.regd)?;
    let a3 = k.coupon("a3", vec![up.clone()], vec![up.clone(), down.clone()], hom_combo(&reg, &hhd)?)?;
    let b3 = k.coupon("b3", vec![up.clone(), down.clone()], vec![up.clone()], hom_combo(&hhd, &reg)?)?;
    let regd = k.regd.clone();
    out.push(ClosedGraph {
        name: "theta through a dual edge".into(),
        presentations: vec![
            k.open(vec![vec![a3.clone()], vec![b3.clone()]])?,
            k.open(vec![
                vec![id(), Atom::CoevL(regd.clone())],
                vec![b3.clone(), Atom::Id(Strand::down(&regd))],
                vec![a3.clone(), Atom::Id(Strand::down(&regd))],
                vec![id(), Atom::EvR(regd.clone())],
            ])?,
            k.open_on(
                &regd,
                vec![
                    vec![Atom::CoevR(reg.clone()), Atom::Id(Strand::up(&regd))],
                    vec![idd(), b3.clone()],
                    vec![idd(), a3.clone()],
                    vec![Atom::EvL(reg.clone()), idd()],
                ],
            )?,
        ],
        level_cuts: Vec::new(),
    });

    // a vector and a covector joined into a loop
    let inv = invariants(&reg)?;
    let coinv = coinvariants(&reg)?;
    if let (Some(iv), Some(cv)) = (inv.first(), coinv.first()) {
        let vec_at = k.coupon("x", Vec::new(), vec![up.clone()], Matrix::from_columns(f, d, vec![iv.clone()]))?;
        let mut cv_cols = vec![Vec::new(); d];
        for (i, x) in cv {
            cv_cols[*i] = vec![(0, x.clone())];
        }
        let covec = k.coupon("y", vec![up.clone()], Vec::new(), Matrix::from_columns(f, 1, cv_cols))?;
        out.push(ClosedGraph {
            name: "vector and covector".into(),
            presentations: k.with_rotations(vec![k.open(vec![vec![covec.clone()], vec![vec_at.clone()]])?])?,
            level_cuts: vec![(k.closed(vec![vec![vec_at.clone()], vec![covec.clone()]])?, 1)],
        });
    }

    // two disjoint loops, cut on either
    let loop_v = k.closed(vec![vec![Atom::CoevL(reg.clone())], vec![rv.clone(), idd()], vec![Atom::EvR(reg.clone())]])?;
    let loop_u = k.closed(vec![vec![Atom::CoevL(reg.clone())], vec![ru.clone(), idd()], vec![Atom::EvR(reg.clone())]])?;
    let t_u = SliceDiagram::layer(vec![ru.clone()]);
    let t_v = SliceDiagram::layer(vec![rv.clone()]);
    out.push(ClosedGraph {
        name: "two disjoint loops".into(),
        presentations: vec![
            OpenPresentation::new(t_u.beside(&loop_v)?)?,
            OpenPresentation::new(loop_u.beside(&t_v)?)?,
        ],
        level_cuts: vec![(loop_u.beside(&loop_v)?, 1), (loop_u.beside(&loop_v)?, 2)],
    });

    // a loop running downwards, carrying the dual coupon
    let rut = k.coupon("ru*", vec![down.clone()], vec![down.clone()], right_mult(h, &u).transpose())?;
    let down_open = k.open_on(&k.regd, vec![vec![rut.clone()]])?;
    out.push(ClosedGraph {
        name: "downward loop".into(),
        presentations: k.with_rotations(vec![down_open, k.open(vec![vec![ru.clone()]])?])?,
        level_cuts: {
            let c = k.closed(vec![vec![Atom::CoevR(reg.clone())], vec![rut.clone(), id()], vec![Atom::EvL(reg.clone())]])?;
            vec![(c.clone(), 1), (c, 2)]
        },
    });

    // an H strand beside an α strand, joined by an intertwiner of H ⊗ α
    let alpha = crate::rep::alpha(h);
    let ha = tensor(&reg, &alpha)?;
    let e = k.coupon("e", vec![up.clone(), Strand::up(&alpha)], vec![up.clone(), Strand::up(&alpha)], hom_combo(&ha, &ha)?)?;
    let idad = || Atom::Id(Strand::down(&alpha));
    out.push(ClosedGraph {
        name: "loop with an α companion".into(),
        presentations: k.with_rotations(vec![k.open(vec![
            vec![id(), Atom::CoevL(alpha.clone())],
            vec![e.clone(), idad()],
            vec![id(), Atom::EvR(alpha.clone())],
        ])?])?,
        level_cuts: {
            let c = k.closed(vec![
                vec![Atom::CoevL(reg.clone())],
                vec![id(), Atom::CoevL(alpha.clone()), idd()],
                vec![e.clone(), idad(), idd()],
                vec![id(), Atom::EvR(alpha.clone()), idd()],
                vec![Atom::EvR(reg.clone())],
            ])?;
            vec![(c.clone(), 1), (c.clone(), 2), (c, 3)]
        },
    });

    Ok(out)
}
