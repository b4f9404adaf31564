use std::sync::Arc;

use indexmap::IndexMap;
use serde_json::Value;

use crate::hopf::{parse_constant, HopfAlgebra};
use crate::rep::{alpha, direct_sum, dual_left, dual_right, parse_rows, regular, tensor_all, trivial, Module, ModuleFile};
use crate::scalars::Matrix;

use super::{Atom, CouponDef, DiagramError, Orientation, SliceDiagram, Strand};

/// Named modules and morphisms that diagram files refer to.
pub struct Registry {
    algebra: Arc<HopfAlgebra>,
    pub modules: IndexMap<String, Module>,
    pub morphisms: IndexMap<String, Arc<CouponDef>>,
}

impl Registry {
    /// Starts with `H` (regular), `1` (trivial) and `alpha`.
    pub fn new(h: &Arc<HopfAlgebra>) -> Self {
        let mut modules = IndexMap::new();
        modules.insert("H".to_string(), regular(h));
        modules.insert("1".to_string(), trivial(h));
        modules.insert("alpha".to_string(), alpha(h));
        Registry { algebra: h.clone(), modules, morphisms: IndexMap::new() }
    }

    pub fn algebra(&self) -> &Arc<HopfAlgebra> {
        &self.algebra
    }

    pub fn module(&self, name: &str) -> Result<Module, DiagramError> {
        self.modules.get(name).cloned().ok_or_else(|| DiagramError::Unknown { kind: "module", name: name.into() })
    }

    pub fn morphism(&self, name: &str) -> Result<Arc<CouponDef>, DiagramError> {
        self.morphisms.get(name).cloned().ok_or_else(|| DiagramError::Unknown { kind: "morphism", name: name.into() })
    }

    fn module_expr(&self, v: &Value) -> Result<Module, DiagramError> {
        let h = &self.algebra;
        let name_of = |v: &Value| v.as_str().map(str::to_string).ok_or_else(|| fmt_err("module reference must be a string"));
        match v {
            Value::String(s) => match s.as_str() {
                "regular" => Ok(regular(h)),
                "trivial" => Ok(trivial(h)),
                "alpha" => Ok(alpha(h)),
                other => self.module(other),
            },
            Value::Object(o) if o.len() == 1 => {
                let (k, arg) = o.iter().next().expect("one entry");
                match k.as_str() {
                    "tensor" => {
                        let parts = arg
                            .as_array()
                            .ok_or_else(|| fmt_err("tensor expects a list"))?
                            .iter()
                            .map(|p| self.module_expr(p))
                            .collect::<Result<Vec<_>, _>>()?;
                        Ok(tensor_all(&parts)?)
                    }
                    "direct_sum" => {
                        let parts = arg.as_array().ok_or_else(|| fmt_err("direct_sum expects a list"))?;
                        let mut it = parts.iter().map(|p| self.module_expr(p));
                        let first = it.next().ok_or_else(|| fmt_err("empty direct_sum"))??;
                        it.try_fold(first, |acc, m| Ok(direct_sum(&acc, &m?)?))
                    }
                    "dual_left" => Ok(dual_left(&self.module(&name_of(arg)?)?)),
                    "dual_right" => Ok(dual_right(&self.module(&name_of(arg)?)?)),
                    "custom" => {
                        let mf: ModuleFile =
                            serde_json::from_value(arg.clone()).map_err(|e| fmt_err(&format!("custom module: {e}")))?;
                        Ok(mf.build(h)?)
                    }
                    other => Err(fmt_err(&format!("unknown module constructor '{other}'"))),
                }
            }
            _ => Err(fmt_err("module entry must be a name or a one-key object")),
        }
    }

    fn strand(&self, v: &Value) -> Result<Strand, DiagramError> {
        let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| fmt_err("strand must be [module, orientation]"))?;
        let name = pair[0].as_str().ok_or_else(|| fmt_err("strand module must be a string"))?;
        let o = pair[1]
            .as_str()
            .and_then(Orientation::parse)
            .ok_or_else(|| fmt_err("orientation must be \"up\" or \"down\""))?;
        Ok(Strand { module: self.module(name)?, orientation: o })
    }

    fn signature(&self, v: Option<&Value>) -> Result<Vec<Strand>, DiagramError> {
        match v {
            None => Ok(Vec::new()),
            Some(v) => v
                .as_array()
                .ok_or_else(|| fmt_err("signature must be a list"))?
                .iter()
                .map(|s| self.strand(s))
                .collect(),
        }
    }

    fn morphism_entry(&self, name: &str, v: &Value) -> Result<Arc<CouponDef>, DiagramError> {
        let h = &self.algebra;
        let inputs = self.signature(v.get("in"))?;
        let outputs = self.signature(v.get("out"))?;
        let matrix = if let Some(rows) = v.get("matrix") {
            let rows: Vec<Vec<Value>> =
                serde_json::from_value(rows.clone()).map_err(|e| fmt_err(&format!("morphism {name}: {e}")))?;
            if rows.is_empty() {
                Matrix::zeros(h.field(), 0, 0)
            } else {
                parse_rows(h, &rows)?
            }
        } else if let Some(coeffs) = v.get("right_mult") {
            let a = coeffs
                .as_array()
                .ok_or_else(|| fmt_err("right_mult expects a coefficient list"))?
                .iter()
                .map(|c| parse_constant(h.field(), c).map_err(|e| fmt_err(&e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            right_mult(h, &crate::scalars::dense_to_sparse(&a))
        } else {
            return Err(fmt_err(&format!("morphism {name} needs \"matrix\" or \"right_mult\"")));
        };
        CouponDef::checked(name, inputs, outputs, matrix, h)
    }

    fn atom(&self, v: &Value) -> Result<Atom, DiagramError> {
        let o = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| fmt_err("atom must be a one-key object"))?;
        let (k, arg) = o.iter().next().expect("one entry");
        let module_arg = || -> Result<Module, DiagramError> {
            self.module(arg.as_str().ok_or_else(|| fmt_err("atom argument must be a module name"))?)
        };
        match k.as_str() {
            "id" => Ok(Atom::Id(self.strand(arg)?)),
            "coupon" => Ok(Atom::Coupon(self.morphism(arg.as_str().ok_or_else(|| fmt_err("coupon expects a name"))?)?)),
            "ev_l" => Ok(Atom::EvL(module_arg()?)),
            "coev_l" => Ok(Atom::CoevL(module_arg()?)),
            "ev_r" => Ok(Atom::EvR(module_arg()?)),
            "coev_r" => Ok(Atom::CoevR(module_arg()?)),
            "gate" => Err(fmt_err("gate atoms belong to gate diagrams")),
            other => Err(fmt_err(&format!("unknown atom '{other}'"))),
        }
    }
}

/// Right multiplication `z ↦ z·a` on the regular module.
pub fn right_mult(h: &HopfAlgebra, a: &crate::scalars::SparseVec) -> Matrix {
    Matrix::from_columns(h.field(), h.dim(), (0..h.dim()).map(|e| h.multiply(&h.basis_vec(e), a)).collect())
}

fn fmt_err(s: &str) -> DiagramError {
    DiagramError::Format(s.to_string())
}

/// A parsed diagram file: registries, the diagram, and an optional cut level
/// for closed diagrams.
pub struct DiagramFile {
    pub registry: Registry,
    pub diagram: SliceDiagram,
    pub cut: Option<usize>,
}

impl DiagramFile {
    pub fn parse(text: &str, h: &Arc<HopfAlgebra>) -> Result<Self, DiagramError> {
        let v: Value = serde_json::from_str(text).map_err(|e| fmt_err(&e.to_string()))?;
        let mut registry = Registry::new(h);
        if let Some(ms) = v.get("modules") {
            for (name, expr) in ms.as_object().ok_or_else(|| fmt_err("modules must be an object"))? {
                let m = registry.module_expr(expr)?;
                registry.modules.insert(name.clone(), m);
            }
        }
        if let Some(ms) = v.get("morphisms") {
            for (name, entry) in ms.as_object().ok_or_else(|| fmt_err("morphisms must be an object"))? {
                let c = registry.morphism_entry(name, entry)?;
                registry.morphisms.insert(name.clone(), c);
            }
        }
        let bottom = registry.signature(v.get("bottom"))?;
        let top = registry.signature(v.get("top"))?;
        let layers = v
            .get("layers")
            .and_then(Value::as_array)
            .ok_or_else(|| fmt_err("missing layers"))?
            .iter()
            .map(|l| {
                l.as_array()
                    .ok_or_else(|| fmt_err("layer must be a list"))?
                    .iter()
                    .map(|a| registry.atom(a))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let cut = v.get("cut").and_then(Value::as_u64).map(|c| c as usize);
        let diagram = SliceDiagram::new(bottom, top, layers)?;
        Ok(DiagramFile { registry, diagram, cut })
    }

    pub fn load(path: &std::path::Path, h: &Arc<HopfAlgebra>) -> Result<Self, DiagramError> {
        let text = std::fs::read_to_string(path).map_err(|e| fmt_err(&format!("{}: {e}", path.display())))?;
        Self::parse(&text, h)
    }
}
