//! Moving legs of vectors and covectors around with cups and caps, leg by leg.

use std::collections::HashMap;
use std::sync::RwLock;

use crate::diagrams::{Atom, DiagramError, Orientation, SliceDiagram, Strand};
use crate::scalars::{collect_sparse, FieldElement, Matrix, SparseVec};

pub(super) fn flip(s: &Strand) -> Strand {
    let orientation = match s.orientation {
        Orientation::Up => Orientation::Down,
        Orientation::Down => Orientation::Up,
    };
    Strand { module: s.module.clone(), orientation }
}

fn strand_key(s: &Strand) -> String {
    format!("{}{}", s.module.key(), s.orientation.as_str())
}

/// Coefficients of a closed-off pair of legs as an `n x n` matrix indexed
/// by (first leg, second leg).
fn pair_matrix(atom: Atom, n: usize) -> Result<Matrix, DiagramError> {
    let m = SliceDiagram::layer(vec![atom]).evaluate()?;
    let f = m.field();
    let flat: Vec<(usize, FieldElement)> = if m.cols() == 1 {
        m.column(0).clone()
    } else {
        (0..m.cols()).filter_map(|c| m.column(c).first().map(|(_, x)| (c, x.clone()))).collect()
    };
    let mut cols = vec![Vec::new(); n];
    for (i, x) in flat {
        cols[i % n].push((i / n, x));
    }
    Ok(Matrix::from_columns(f, n, cols))
}

/// Cached per-strand matrices.
#[derive(Default)]
pub(super) struct LegMaps {
    twists: RwLock<HashMap<String, Matrix>>,
    cups: RwLock<HashMap<String, Matrix>>,
    caps: RwLock<HashMap<String, Matrix>>,
}

impl LegMaps {
    /// `T[l, a]`: what a leg `a` becomes after being carried once around
    /// the far side of everything else.
    fn twist(&self, s: &Strand) -> Result<Matrix, DiagramError> {
        let key = strand_key(s);
        if let Some(t) = self.twists.read().expect("lock").get(&key) {
            return Ok(t.clone());
        }
        let m = s.module.clone();
        let n = m.dim();
        let (cup, cap) = match s.orientation {
            Orientation::Up => (pair_matrix(Atom::CoevR(m.clone()), n)?, pair_matrix(Atom::EvL(m), n)?),
            Orientation::Down => (pair_matrix(Atom::CoevL(m.clone()), n)?, pair_matrix(Atom::EvR(m), n)?),
        };
        // T[l, a] = Σ_k cup[k, l] cap[k, a]
        let t = cup.transpose().mul(&cap)?;
        self.twists.write().expect("lock").insert(key, t.clone());
        Ok(t)
    }

    /// `C[x, x']` of the cup producing `(s, flip s)`.
    fn cup(&self, s: &Strand) -> Result<Matrix, DiagramError> {
        let key = strand_key(s);
        if let Some(t) = self.cups.read().expect("lock").get(&key) {
            return Ok(t.clone());
        }
        let m = s.module.clone();
        let n = m.dim();
        let c = match s.orientation {
            Orientation::Up => pair_matrix(Atom::CoevL(m), n)?,
            Orientation::Down => pair_matrix(Atom::CoevR(m), n)?,
        };
        self.cups.write().expect("lock").insert(key, c.clone());
        Ok(c)
    }

    /// `K[x, x']` of the cap consuming `(s, flip s)`.
    fn cap(&self, s: &Strand) -> Result<Matrix, DiagramError> {
        let key = strand_key(s);
        if let Some(t) = self.caps.read().expect("lock").get(&key) {
            return Ok(t.clone());
        }
        let m = s.module.clone();
        let n = m.dim();
        let c = match s.orientation {
            Orientation::Up => pair_matrix(Atom::EvR(m), n)?,
            Orientation::Down => pair_matrix(Atom::EvL(m), n)?,
        };
        self.caps.write().expect("lock").insert(key, c.clone());
        Ok(c)
    }

    /// Moves the first leg of a vector (or covector) on `sig` to the back,
    /// `times` times.
    pub(super) fn rotate(&self, v: &SparseVec, sig: &[Strand], times: usize) -> Result<SparseVec, DiagramError> {
        let m = sig.len();
        let mut sig = sig.to_vec();
        let mut v = v.clone();
        for _ in 0..times {
            let dims: Vec<usize> = sig.iter().map(Strand::dim).collect();
            let perm: Vec<usize> = (1..m).chain([0]).collect();
            let t = self.twist(&sig[0])?;
            let mut mats: Vec<Option<&Matrix>> = vec![None; m];
            mats[m - 1] = Some(&t);
            v = transform_legs(&v, &dims, &perm, &mats);
            sig.rotate_left(1);
        }
        Ok(v)
    }

    /// A covector on the reversed dual of `xs` bent into a vector on `xs`
    /// with nested cups.
    pub(super) fn bend_cups(&self, y: &SparseVec, xs: &[Strand]) -> Result<SparseVec, DiagramError> {
        let mats = xs.iter().map(|s| self.cup(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.bend(y, xs, &mats))
    }

    /// A vector on the reversed dual of `xs` bent into a covector on `xs`
    /// with nested caps.
    pub(super) fn bend_caps(&self, u: &SparseVec, xs: &[Strand]) -> Result<SparseVec, DiagramError> {
        let mats = xs.iter().map(|s| self.cap(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(self.bend(u, xs, &mats))
    }

    fn bend(&self, v: &SparseVec, xs: &[Strand], mats: &[Matrix]) -> SparseVec {
        let m = xs.len();
        let dims: Vec<usize> = xs.iter().rev().map(Strand::dim).collect();
        let perm: Vec<usize> = (0..m).map(|j| m - 1 - j).collect();
        let refs: Vec<Option<&Matrix>> = mats.iter().map(Some).collect();
        transform_legs(v, &dims, &perm, &refs)
    }
}

/// Output leg `j` is input leg `perm[j]`, passed through `mats[j]` when
/// given. Indices are big-endian in the legs.
fn transform_legs(v: &SparseVec, dims: &[usize], perm: &[usize], mats: &[Option<&Matrix>]) -> SparseVec {
    let out_dims: Vec<usize> =
        perm.iter().zip(mats).map(|(&p, m)| m.map(|m| m.rows()).unwrap_or(dims[p])).collect();
    let mut acc: HashMap<usize, FieldElement> = HashMap::new();
    let mut digits = vec![0usize; dims.len()];
    for (idx, x) in v {
        let mut r = *idx;
        for k in (0..dims.len()).rev() {
            digits[k] = r % dims[k];
            r /= dims[k];
        }
        // partial products over output legs
        let mut partial: Vec<(usize, FieldElement)> = vec![(0, x.clone())];
        for (j, &p) in perm.iter().enumerate() {
            let d = digits[p];
            let mut next = Vec::new();
            match mats[j] {
                Some(m) => {
                    for (o, c) in m.column(d) {
                        for (base, y) in &partial {
                            next.push((base * out_dims[j] + o, y * c));
                        }
                    }
                }
                None => {
                    for (base, y) in &partial {
                        next.push((base * out_dims[j] + d, y.clone()));
                    }
                }
            }
            partial = next;
        }
        for (i, y) in partial {
            match acc.get_mut(&i) {
                Some(a) => *a += &y,
                None => {
                    acc.insert(i, y);
                }
            }
        }
    }
    collect_sparse(acc)
}
