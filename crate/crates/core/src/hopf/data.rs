use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::scalars::{collect_sparse, Field, FieldElement, Matrix, Rational, SparseVec};

use super::HopfError;

/// A term `c * e_j ⊗ e_k` of a coproduct.
pub type CoproductTerm = (usize, usize, FieldElement);

/// Structure constants of a finite-dimensional Hopf algebra.
///
/// `mul[i][j]` is the product `e_i e_j`, `comul[i]` lists the terms of
/// `Δ(e_i)`, and column `j` of `antipode` is `S(e_j)`.
#[derive(Clone, Debug)]
pub struct HopfData {
    pub name: String,
    pub field: Field,
    pub dim: usize,
    pub basis: Vec<String>,
    pub mul: Vec<Vec<SparseVec>>,
    pub unit: SparseVec,
    pub comul: Vec<Vec<CoproductTerm>>,
    pub counit: Vec<FieldElement>,
    pub antipode: Matrix,
    pub pivot: Option<SparseVec>,
}

#[derive(Serialize, Deserialize)]
struct RawHopf {
    #[serde(default)]
    name: Option<String>,
    dimension: usize,
    field: Field,
    #[serde(default)]
    basis: Option<Vec<String>>,
    mul: Vec<Vec<Vec<Value>>>,
    unit: Vec<Value>,
    comul: Vec<Vec<Vec<Value>>>,
    counit: Vec<Value>,
    antipode: Vec<Vec<Value>>,
    #[serde(default)]
    pivot: Option<Vec<Value>>,
}

/// Parses one constant: `"p/q"`, `"n mod p"`, an integer, or a cyclotomic
/// coefficient list.
pub fn parse_constant(field: Field, v: &Value) -> Result<FieldElement, HopfError> {
    match v {
        Value::String(s) => Ok(field.parse(s)?),
        Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| HopfError::Parse(format!("non-integer number {n}")))?;
            Ok(field.from_int(i))
        }
        Value::Array(items) => {
            let mut cs = Vec::with_capacity(items.len());
            for it in items {
                let r = match it {
                    Value::String(s) => Rational::parse(s),
                    Value::Number(n) => n.as_i64().map(Rational::from_int),
                    _ => None,
                }
                .ok_or_else(|| HopfError::Parse(format!("bad coefficient {it}")))?;
                cs.push(r);
            }
            Ok(field.from_coefficients(&cs)?)
        }
        other => Err(HopfError::Parse(format!("unsupported constant {other}"))),
    }
}

fn parse_vec(field: Field, v: &[Value], d: usize, what: &str) -> Result<Vec<FieldElement>, HopfError> {
    if v.len() != d {
        return Err(HopfError::Shape(format!("{what}: expected length {d}, got {}", v.len())));
    }
    v.iter().map(|x| parse_constant(field, x)).collect()
}

fn sparse(v: Vec<FieldElement>) -> SparseVec {
    collect_sparse(v.into_iter().enumerate())
}

impl HopfData {
    /// Parses the structured-text format. `field_override` reinterprets every
    /// constant in another field (for example reducing a rational table mod p).
    pub fn from_json(text: &str, field_override: Option<Field>) -> Result<HopfData, HopfError> {
        let raw: RawHopf = serde_json::from_str(text).map_err(|e| HopfError::Parse(e.to_string()))?;
        let field = field_override.unwrap_or(raw.field);
        if let Field::Prime(p) = field {
            Field::prime(p)?;
        }
        let d = raw.dimension;
        if d == 0 {
            return Err(HopfError::Shape("dimension must be positive".into()));
        }
        if raw.mul.len() != d || raw.mul.iter().any(|r| r.len() != d) {
            return Err(HopfError::Shape("mul must be a d x d array of d-vectors".into()));
        }
        let mut mul = Vec::with_capacity(d);
        for (i, row) in raw.mul.iter().enumerate() {
            let mut out = Vec::with_capacity(d);
            for (j, v) in row.iter().enumerate() {
                out.push(sparse(parse_vec(field, v, d, &format!("mul[{i}][{j}]"))?));
            }
            mul.push(out);
        }
        if raw.comul.len() != d {
            return Err(HopfError::Shape("comul must have d entries".into()));
        }
        let mut comul = Vec::with_capacity(d);
        for (i, m) in raw.comul.iter().enumerate() {
            if m.len() != d {
                return Err(HopfError::Shape(format!("comul[{i}] must be d x d")));
            }
            let mut terms = Vec::new();
            for (j, row) in m.iter().enumerate() {
                for (k, x) in parse_vec(field, row, d, &format!("comul[{i}][{j}]"))?.into_iter().enumerate() {
                    if !x.is_zero() {
                        terms.push((j, k, x));
                    }
                }
            }
            comul.push(terms);
        }
        if raw.antipode.len() != d {
            return Err(HopfError::Shape("antipode must be d x d".into()));
        }
        let rows: Vec<Vec<FieldElement>> = raw
            .antipode
            .iter()
            .enumerate()
            .map(|(i, r)| parse_vec(field, r, d, &format!("antipode[{i}]")))
            .collect::<Result<_, _>>()?;
        let antipode = Matrix::from_rows(field, &rows)?;
        let basis = match raw.basis {
            Some(b) if b.len() == d => b,
            Some(_) => return Err(HopfError::Shape("basis names must have length d".into())),
            None => (0..d).map(|i| format!("e{i}")).collect(),
        };
        let pivot = match raw.pivot {
            Some(p) => Some(sparse(parse_vec(field, &p, d, "pivot")?)),
            None => None,
        };
        Ok(HopfData {
            name: raw.name.unwrap_or_else(|| "unnamed".into()),
            field,
            dim: d,
            basis,
            mul,
            unit: sparse(parse_vec(field, &raw.unit, d, "unit")?),
            comul,
            counit: parse_vec(field, &raw.counit, d, "counit")?,
            antipode,
            pivot,
        })
    }

    /// Dense JSON document in the input format.
    pub fn to_json(&self) -> Value {
        let d = self.dim;
        let dense = |v: &SparseVec| -> Vec<Value> {
            crate::scalars::sparse_to_dense(v, d, self.field).iter().map(|x| x.to_json()).collect()
        };
        let mul: Vec<Vec<Vec<Value>>> = self.mul.iter().map(|r| r.iter().map(dense).collect()).collect();
        let comul: Vec<Value> = self
            .comul
            .iter()
            .map(|terms| {
                let mut m = vec![vec![self.field.zero(); d]; d];
                for (j, k, c) in terms {
                    m[*j][*k] += c;
                }
                Value::Array(
                    m.iter()
                        .map(|r| Value::Array(r.iter().map(|x| x.to_json()).collect()))
                        .collect(),
                )
            })
            .collect();
        let mut doc = serde_json::json!({
            "name": self.name,
            "dimension": d,
            "field": self.field,
            "basis": self.basis,
            "mul": mul,
            "unit": dense(&self.unit),
            "comul": comul,
            "counit": self.counit.iter().map(|x| x.to_json()).collect::<Vec<_>>(),
            "antipode": self.antipode.to_json(),
        });
        if let Some(p) = &self.pivot {
            doc["pivot"] = Value::Array(dense(p));
        }
        doc
    }

    /// SHA-256 of the canonical JSON form of the structure constants.
    pub fn fingerprint(&self) -> String {
        let mut doc = self.to_json();
        if let Value::Object(m) = &mut doc {
            m.remove("name");
            m.remove("basis");
        }
        let bytes = serde_json::to_vec(&doc).expect("serializable");
        hex::encode(Sha256::digest(bytes))
    }

    // Element-level operations on sparse vectors.

    pub fn multiply(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        collect_sparse(a.iter().flat_map(|(i, x)| {
            b.iter().flat_map(move |(j, y)| {
                let xy = x * y;
                self.mul[*i][*j].iter().map(move |(k, c)| (*k, &xy * c))
            })
        }))
    }

    pub fn coproduct(&self, a: &SparseVec) -> Vec<CoproductTerm> {
        let mut acc: std::collections::BTreeMap<(usize, usize), FieldElement> = Default::default();
        for (i, x) in a {
            for (j, k, c) in &self.comul[*i] {
                let t = x * c;
                acc.entry((*j, *k)).and_modify(|v| *v += &t).or_insert(t);
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((j, k), v)| (j, k, v)).collect()
    }

    pub fn counit_of(&self, a: &SparseVec) -> FieldElement {
        let mut acc = self.field.zero();
        for (i, x) in a {
            acc += &(x * &self.counit[*i]);
        }
        acc
    }

    pub fn basis_vec(&self, i: usize) -> SparseVec {
        vec![(i, self.field.one())]
    }
}
