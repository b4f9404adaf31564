use crate::scalars::{FieldElement, Matrix};

use super::module::{dual_left, tensor, Module};
use super::RepError;

/// An H-linear map between modules.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub source: Module,
    pub target: Module,
    pub matrix: Matrix,
}

impl Morphism {
    /// Checks shape and `ρ_N(x) f = f ρ_M(x)` on algebra generators.
    pub fn new(source: Module, target: Module, matrix: Matrix) -> Result<Self, RepError> {
        let m = Self::unchecked(source, target, matrix)?;
        m.check_linear()?;
        Ok(m)
    }

    /// Shape-checked only; used where linearity holds by construction.
    pub fn unchecked(source: Module, target: Module, matrix: Matrix) -> Result<Self, RepError> {
        if !source.same_algebra(&target) {
            return Err(RepError::AlgebraMismatch);
        }
        if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
            return Err(RepError::Shape(format!(
                "{}x{} matrix for {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source.key(),
                target.key()
            )));
        }
        Ok(Morphism { source, target, matrix })
    }

    pub fn check_linear(&self) -> Result<(), RepError> {
        for &x in self.source.algebra().generators() {
            let l = self.target.action(x).mul(&self.matrix)?;
            let r = self.matrix.mul(self.source.action(x))?;
            if l != r {
                return Err(RepError::Intertwiner(format!(
                    "{} -> {} fails at basis element {x}",
                    self.source.key(),
                    self.target.key()
                )));
            }
        }
        Ok(())
    }

    pub fn identity(m: &Module) -> Self {
        let f = m.algebra().field();
        Morphism { source: m.clone(), target: m.clone(), matrix: Matrix::identity(f, m.dim()) }
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Morphism) -> Result<Self, RepError> {
        if self.target != other.source {
            return Err(RepError::Shape(format!("cannot compose through {} and {}", self.target.key(), other.source.key())));
        }
        Ok(Morphism {
            source: self.source.clone(),
            target: other.target.clone(),
            matrix: other.matrix.mul(&self.matrix)?,
        })
    }

    pub fn tensor(&self, other: &Morphism) -> Result<Self, RepError> {
        Ok(Morphism {
            source: tensor(&self.source, &other.source)?,
            target: tensor(&self.target, &other.target)?,
            matrix: self.matrix.kron(&other.matrix),
        })
    }

    pub fn add(&self, other: &Morphism) -> Result<Self, RepError> {
        if self.source != other.source || self.target != other.target {
            return Err(RepError::Shape("sum of morphisms with different ends".into()));
        }
        Ok(Morphism { matrix: self.matrix.add(&other.matrix)?, ..self.clone() })
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        Morphism { matrix: self.matrix.scale(c), ..self.clone() }
    }

    /// Left dual map `N* -> M*`, the transpose in dual bases.
    pub fn dual(&self) -> Self {
        Morphism {
            source: dual_left(&self.target),
            target: dual_left(&self.source),
            matrix: self.matrix.transpose(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }
}
