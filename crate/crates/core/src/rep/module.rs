use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Deserialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::hopf::{parse_constant, HopfAlgebra};
use crate::scalars::{FieldElement, Matrix, SparseVec};

use super::present::{self, Presentation};
use super::RepError;

pub type Module = Arc<HModule>;

/// How a module was built. Module equality is equality of this tree.
#[derive(Clone)]
pub enum Construction {
    Trivial,
    Regular,
    /// The one-dimensional module given by the distinguished grouplike form.
    Alpha,
    Tensor(Module, Module),
    DualLeft(Module),
    DualRight(Module),
    DirectSum(Module, Module),
    Custom(String),
}

/// A finite-dimensional left module, stored as one action matrix per basis
/// element of the algebra.
pub struct HModule {
    algebra: Arc<HopfAlgebra>,
    dim: usize,
    action: Vec<Matrix>,
    construction: Construction,
    key: String,
    asserted: Option<Presentation>,
    presentation: OnceLock<Option<Arc<Presentation>>>,
}

impl fmt::Debug for HModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (dim {})", self.key, self.dim)
    }
}

impl PartialEq for HModule {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.algebra.fingerprint() == other.algebra.fingerprint()
    }
}

impl Eq for HModule {}

impl HModule {
    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Action of the basis element `e_i`.
    pub fn action(&self, i: usize) -> &Matrix {
        &self.action[i]
    }

    pub fn actions(&self) -> &[Matrix] {
        &self.action
    }

    /// Action of an arbitrary algebra element.
    pub fn act(&self, h: &SparseVec) -> Matrix {
        let f = self.algebra.field();
        let mut acc = Matrix::zeros(f, self.dim, self.dim);
        for (i, c) in h {
            acc = acc.add(&self.action[*i].scale(c)).expect("square actions");
        }
        acc
    }

    pub fn construction(&self) -> &Construction {
        &self.construction
    }

    /// Canonical name; equal keys mean equal modules.
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn label(&self) -> &str {
        &self.key
    }

    pub fn same_algebra(&self, other: &HModule) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra.fingerprint() == other.algebra.fingerprint()
    }

    /// Projective by construction: contains a regular tensor factor, carries
    /// an asserted retract, or the algebra is semisimple.
    pub fn is_projective(&self) -> bool {
        if self.algebra.is_semisimple() || self.asserted.is_some() {
            return true;
        }
        match &self.construction {
            Construction::Regular => true,
            Construction::Tensor(a, b) => a.is_projective() || b.is_projective(),
            Construction::DualLeft(a) | Construction::DualRight(a) => a.is_projective(),
            Construction::DirectSum(a, b) => a.is_projective() && b.is_projective(),
            _ => false,
        }
    }

    /// A retract onto a free module, built from the construction tree.
    pub fn presentation(self: &Arc<Self>) -> Result<Arc<Presentation>, RepError> {
        self.presentation
            .get_or_init(|| present::build(self).map(Arc::new))
            .clone()
            .ok_or_else(|| RepError::NotProjective(self.key.clone()))
    }

    pub(crate) fn asserted_presentation(&self) -> Option<&Presentation> {
        self.asserted.as_ref()
    }

    fn new(algebra: Arc<HopfAlgebra>, action: Vec<Matrix>, construction: Construction, key: String) -> Module {
        let dim = action.first().map(|m| m.rows()).unwrap_or(0);
        Arc::new(HModule {
            algebra,
            dim,
            action,
            construction,
            key,
            asserted: None,
            presentation: OnceLock::new(),
        })
    }

    /// A user-supplied module. The action is checked to be a representation
    /// and any retract presentation is checked for `r i = id` and linearity.
    pub fn custom(
        algebra: &Arc<HopfAlgebra>,
        label: &str,
        action: Vec<Matrix>,
        presentation: Option<Presentation>,
    ) -> Result<Module, RepError> {
        let d = algebra.dim();
        if action.len() != d {
            return Err(RepError::InvalidModule(format!("{label}: need {d} action matrices")));
        }
        let n = action[0].rows();
        if action.iter().any(|m| m.rows() != n || m.cols() != n) {
            return Err(RepError::InvalidModule(format!("{label}: action matrices must be {n}x{n}")));
        }
        check_representation(algebra, &action).map_err(|w| RepError::InvalidModule(format!("{label}: {w}")))?;
        let mut hasher = Sha256::new();
        for m in &action {
            hasher.update(serde_json::to_vec(&m.to_json()).expect("serializable"));
        }
        let key = format!("{label}#{}", &hex::encode(hasher.finalize())[..12]);
        let mut module = HModule {
            algebra: algebra.clone(),
            dim: n,
            action,
            construction: Construction::Custom(label.to_string()),
            key,
            asserted: None,
            presentation: OnceLock::new(),
        };
        if let Some(p) = presentation {
            p.check(&module)?;
            module.asserted = Some(p);
        }
        Ok(Arc::new(module))
    }

    /// Checks `ρ(1) = id` and `ρ(e_i e_j) = ρ(e_i) ρ(e_j)`.
    pub fn check_action(&self) -> Result<(), RepError> {
        check_representation(&self.algebra, &self.action).map_err(RepError::InvalidModule)
    }
}

fn check_representation(h: &HopfAlgebra, action: &[Matrix]) -> Result<(), String> {
    let n = action[0].rows();
    let act = |v: &SparseVec| {
        let mut acc = Matrix::zeros(h.field(), n, n);
        for (i, c) in v {
            acc = acc.add(&action[*i].scale(c)).expect("square");
        }
        acc
    };
    if act(h.unit()) != Matrix::identity(h.field(), n) {
        return Err("unit does not act as the identity".into());
    }
    for i in 0..h.dim() {
        for j in 0..h.dim() {
            let prod = h.multiply(&h.basis_vec(i), &h.basis_vec(j));
            if act(&prod) != action[i].mul(&action[j]).expect("square") {
                return Err(format!("action is not multiplicative at ({i}, {j})"));
            }
        }
    }
    Ok(())
}

pub fn regular(h: &Arc<HopfAlgebra>) -> Module {
    let action = (0..h.dim()).map(|i| h.left_mult(i).clone()).collect();
    HModule::new(h.clone(), action, Construction::Regular, "H".into())
}

pub fn trivial(h: &Arc<HopfAlgebra>) -> Module {
    let f = h.field();
    let action = h.counit().iter().map(|c| Matrix::from_columns(f, 1, vec![vec![(0, c.clone())]])).collect();
    HModule::new(h.clone(), action, Construction::Trivial, "1".into())
}

pub fn alpha(h: &Arc<HopfAlgebra>) -> Module {
    let f = h.field();
    let action = h.modulus().iter().map(|c| Matrix::from_columns(f, 1, vec![vec![(0, c.clone())]])).collect();
    HModule::new(h.clone(), action, Construction::Alpha, "α".into())
}

fn check_same(a: &HModule, b: &HModule) -> Result<(), RepError> {
    if a.same_algebra(b) {
        Ok(())
    } else {
        Err(RepError::AlgebraMismatch)
    }
}

/// Tensor product with the action expanded through the coproduct.
pub fn tensor(a: &Module, b: &Module) -> Result<Module, RepError> {
    check_same(a, b)?;
    let h = a.algebra();
    let f = h.field();
    let n = a.dim * b.dim;
    let action = (0..h.dim())
        .map(|i| {
            let mut acc = Matrix::zeros(f, n, n);
            for (j, k, c) in h.coproduct_basis(i) {
                acc = acc.add(&a.action[*j].kron(&b.action[*k]).scale(c)).expect("shapes agree");
            }
            acc
        })
        .collect();
    Ok(HModule::new(
        h.clone(),
        action,
        Construction::Tensor(a.clone(), b.clone()),
        format!("({}⊗{})", a.key, b.key),
    ))
}

/// Left-nested tensor product of a nonempty list.
pub fn tensor_all(ms: &[Module]) -> Result<Module, RepError> {
    let (first, rest) = ms.split_first().ok_or_else(|| RepError::Shape("empty tensor product".into()))?;
    rest.iter().try_fold(first.clone(), |acc, m| tensor(&acc, m))
}

fn transpose_twisted(m: &HModule, twist: &Matrix) -> Vec<Matrix> {
    // column j of `twist` is the image of e_j
    (0..m.algebra.dim()).map(|j| m.act(twist.column(j)).transpose()).collect()
}

/// Left dual: `h` acts as the transpose of `S(h)`. The left dual of a right
/// dual is the original module on the nose.
pub fn dual_left(m: &Module) -> Module {
    if let Construction::DualRight(inner) = &m.construction {
        return inner.clone();
    }
    let action = transpose_twisted(m, m.algebra.antipode());
    HModule::new(m.algebra.clone(), action, Construction::DualLeft(m.clone()), format!("{}*", m.key))
}

/// Key of `dual_left(m)` without building it.
pub fn dual_left_key(m: &HModule) -> String {
    match &m.construction {
        Construction::DualRight(inner) => inner.key.clone(),
        _ => format!("{}*", m.key),
    }
}

/// Key of the left-nested tensor product of modules with these keys.
pub fn tensor_key<'a>(keys: impl IntoIterator<Item = &'a str>) -> String {
    let mut it = keys.into_iter();
    let first = it.next().map(str::to_string).unwrap_or_else(|| "1".into());
    it.fold(first, |acc, k| format!("({acc}⊗{k})"))
}

/// Right dual: `h` acts as the transpose of `S^{-1}(h)`.
pub fn dual_right(m: &Module) -> Module {
    if let Construction::DualLeft(inner) = &m.construction {
        return inner.clone();
    }
    let action = transpose_twisted(m, m.algebra.antipode_inv());
    HModule::new(m.algebra.clone(), action, Construction::DualRight(m.clone()), format!("*{}", m.key))
}

pub fn direct_sum(a: &Module, b: &Module) -> Result<Module, RepError> {
    check_same(a, b)?;
    let action = a.action.iter().zip(&b.action).map(|(x, y)| x.direct_sum(y)).collect();
    Ok(HModule::new(
        a.algebra.clone(),
        action,
        Construction::DirectSum(a.clone(), b.clone()),
        format!("({}⊕{})", a.key, b.key),
    ))
}

/// Custom module file: `{"label", "dimension", "action", "retract"?}`.
#[derive(Deserialize)]
pub struct ModuleFile {
    #[serde(default)]
    pub label: Option<String>,
    pub dimension: usize,
    pub action: Vec<Vec<Vec<Value>>>,
    #[serde(default)]
    pub retract: Option<RetractFile>,
}

#[derive(Deserialize)]
pub struct RetractFile {
    pub copies: usize,
    pub inclusion: Vec<Vec<Value>>,
    pub retraction: Vec<Vec<Value>>,
}

pub fn parse_rows(h: &HopfAlgebra, rows: &[Vec<Value>]) -> Result<Matrix, RepError> {
    let parsed: Vec<Vec<FieldElement>> = rows
        .iter()
        .map(|r| r.iter().map(|v| parse_constant(h.field(), v)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    Ok(Matrix::from_rows(h.field(), &parsed)?)
}

impl ModuleFile {
    pub fn build(&self, h: &Arc<HopfAlgebra>) -> Result<Module, RepError> {
        let action = self.action.iter().map(|rows| parse_rows(h, rows)).collect::<Result<Vec<_>, _>>()?;
        if action.iter().any(|m| m.rows() != self.dimension) {
            return Err(RepError::InvalidModule("action size differs from dimension".into()));
        }
        let presentation = match &self.retract {
            Some(r) => Some(Presentation::new(
                r.copies,
                parse_rows(h, &r.inclusion)?,
                parse_rows(h, &r.retraction)?,
            )),
            None => None,
        };
        HModule::custom(h, self.label.as_deref().unwrap_or("M"), action, presentation)
    }
}
