use std::sync::Arc;

use indexmap::IndexMap;

use crate::scalars::{Field, Matrix, SparseVec};

use super::{HopfAlgebra, HopfData, HopfError};

const SMALL_QUANTUM_SL2: &str = include_str!("../../data/algebras/small_quantum_sl2.json");
const CORRUPTED_Z2: &str = include_str!("../../data/algebras/corrupted_z2.json");

/// A named way of producing structure constants.
pub trait AlgebraSource: Send + Sync {
    fn name(&self) -> &str;
    fn summary(&self) -> &str;
    fn load(&self, field_override: Option<Field>) -> Result<HopfData, HopfError>;
}

struct Constructed {
    name: String,
    summary: String,
    field: Field,
    build: Box<dyn Fn(Field) -> HopfData + Send + Sync>,
}

impl AlgebraSource for Constructed {
    fn name(&self) -> &str {
        &self.name
    }

    fn summary(&self) -> &str {
        &self.summary
    }

    fn load(&self, field_override: Option<Field>) -> Result<HopfData, HopfError> {
        let mut h = (self.build)(field_override.unwrap_or(self.field));
        h.name = self.name.clone();
        Ok(h)
    }
}

struct Embedded {
    name: &'static str,
    summary: &'static str,
    text: &'static str,
}

impl AlgebraSource for Embedded {
    fn name(&self) -> &str {
        self.name
    }

    fn summary(&self) -> &str {
        self.summary
    }

    fn load(&self, field_override: Option<Field>) -> Result<HopfData, HopfError> {
        let mut h = HopfData::from_json(self.text, field_override)?;
        h.name = self.name.to_string();
        Ok(h)
    }
}

/// Algebra sources selectable by name.
pub struct AlgebraRegistry {
    sources: IndexMap<String, Box<dyn AlgebraSource>>,
}

impl Default for AlgebraRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl AlgebraRegistry {
    pub fn empty() -> Self {
        AlgebraRegistry { sources: IndexMap::new() }
    }

    pub fn register(&mut self, source: Box<dyn AlgebraSource>) {
        self.sources.insert(source.name().to_string(), source);
    }

    pub fn builtin() -> Self {
        let mut reg = Self::empty();
        let mut constructed = |name: String, summary: String, field: Field, build: Box<dyn Fn(Field) -> HopfData + Send + Sync>| {
            reg.register(Box::new(Constructed { name, summary, field, build }));
        };
        constructed("trivial".into(), "the ground field".into(), Field::Rational, Box::new(trivial));
        for n in 1..=6usize {
            constructed(
                format!("z{n}"),
                format!("group algebra of Z_{n} over Q"),
                Field::Rational,
                Box::new(move |f| cyclic_group_algebra(n, f)),
            );
            for p in [2u64, 3, 5] {
                constructed(
                    format!("z{n}_f{p}"),
                    format!("group algebra of Z_{n} over F_{p}"),
                    Field::Prime(p),
                    Box::new(move |f| cyclic_group_algebra(n, f)),
                );
            }
        }
        constructed("s3".into(), "group algebra of S_3 over Q".into(), Field::Rational, Box::new(symmetric_group_s3));
        constructed("sweedler".into(), "Sweedler's 4-dimensional algebra over Q".into(), Field::Rational, Box::new(sweedler));
        reg.register(Box::new(Embedded {
            name: "small_quantum_sl2",
            summary: "small quantum sl2 at q = i with K^2 = 1, 8-dimensional",
            text: SMALL_QUANTUM_SL2,
        }));
        reg.register(Box::new(Embedded {
            name: "corrupted_z2",
            summary: "Z_2 with the antipode replaced by zero",
            text: CORRUPTED_Z2,
        }));
        reg
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sources.keys().map(|s| s.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&dyn AlgebraSource> {
        self.sources.get(name).map(|b| b.as_ref())
    }

    /// Structure constants for a registered name or, failing that, a file path.
    pub fn load_data(&self, name_or_path: &str, field_override: Option<Field>) -> Result<HopfData, HopfError> {
        if let Some(src) = self.get(name_or_path) {
            return src.load(field_override);
        }
        let path = std::path::Path::new(name_or_path);
        if !path.exists() {
            return Err(HopfError::Unknown(name_or_path.to_string()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| HopfError::Io(format!("{name_or_path}: {e}")))?;
        let mut h = HopfData::from_json(&text, field_override)?;
        if h.name == "unnamed" {
            h.name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("unnamed").to_string();
        }
        Ok(h)
    }

    pub fn load(&self, name_or_path: &str, field_override: Option<Field>) -> Result<Arc<HopfAlgebra>, HopfError> {
        HopfAlgebra::new(self.load_data(name_or_path, field_override)?)
    }
}

fn basis(f: Field, i: usize) -> SparseVec {
    vec![(i, f.one())]
}

/// Group algebra from a multiplication table and inverse map.
pub fn group_algebra(
    name: &str,
    field: Field,
    elements: Vec<String>,
    product: impl Fn(usize, usize) -> usize,
    inverse: impl Fn(usize) -> usize,
) -> HopfData {
    let d = elements.len();
    let mul = (0..d).map(|i| (0..d).map(|j| basis(field, product(i, j))).collect()).collect();
    let comul = (0..d).map(|i| vec![(i, i, field.one())]).collect();
    let antipode = Matrix::from_columns(field, d, (0..d).map(|i| basis(field, inverse(i))).collect());
    HopfData {
        name: name.to_string(),
        field,
        dim: d,
        basis: elements,
        mul,
        unit: basis(field, 0),
        comul,
        counit: vec![field.one(); d],
        antipode,
        pivot: None,
    }
}

pub fn trivial(field: Field) -> HopfData {
    group_algebra("trivial", field, vec!["1".into()], |_, _| 0, |_| 0)
}

/// k[Z_n] with basis u^0, ..., u^(n-1).
pub fn cyclic_group_algebra(n: usize, field: Field) -> HopfData {
    let names = (0..n).map(|k| if k == 0 { "1".to_string() } else { format!("u^{k}") }).collect();
    group_algebra(&format!("z{n}"), field, names, |a, b| (a + b) % n, |a| (n - a) % n)
}

/// k[S_3] with the permutations of {0,1,2} in lexicographic order.
pub fn symmetric_group_s3(field: Field) -> HopfData {
    let perms: Vec<[usize; 3]> =
        vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
    // (p q)(x) = p(q(x))
    let compose = |a: usize, b: usize| {
        let (p, q) = (perms[a], perms[b]);
        index([p[q[0]], p[q[1]], p[q[2]]])
    };
    let invert = |a: usize| {
        let p = perms[a];
        let mut inv = [0; 3];
        for (i, &v) in p.iter().enumerate() {
            inv[v] = i;
        }
        index(inv)
    };
    let names = perms.iter().map(|p| format!("{}{}{}", p[0], p[1], p[2])).collect();
    group_algebra("s3", field, names, compose, invert)
}

/// Sweedler's algebra on the basis 1, w, x, wx.
pub fn sweedler(field: Field) -> HopfData {
    // basis index = a + 2b for w^a x^b
    let idx = |a: usize, b: usize| a + 2 * b;
    let sign = |s: bool| if s { field.from_int(-1) } else { field.one() };
    let mut mul = vec![vec![Vec::new(); 4]; 4];
    for (a, b, c, d) in bits4() {
        // (w^a x^b)(w^c x^d) = (-1)^(bc) w^(a+c) x^(b+d)
        if b + d < 2 {
            mul[idx(a, b)][idx(c, d)] = vec![(idx((a + c) % 2, b + d), sign(b * c == 1))];
        }
    }
    let one = || field.one();
    let comul = vec![
        vec![(0, 0, one())],
        vec![(1, 1, one())],
        vec![(1, 2, one()), (2, 0, one())],
        vec![(0, 3, one()), (3, 1, one())],
    ];
    let minus = field.from_int(-1);
    let antipode = Matrix::from_columns(
        field,
        4,
        vec![vec![(0, one())], vec![(1, one())], vec![(3, minus)], vec![(2, one())]],
    );
    HopfData {
        name: "sweedler".into(),
        field,
        dim: 4,
        basis: vec!["1".into(), "w".into(), "x".into(), "wx".into()],
        mul,
        unit: vec![(0, one())],
        comul,
        counit: vec![one(), one(), field.zero(), field.zero()],
        antipode,
        pivot: None,
    }
}

fn bits4() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|n| (n & 1, (n >> 1) & 1, (n >> 2) & 1, (n >> 3) & 1))
}

pub fn small_quantum_sl2() -> Result<HopfData, HopfError> {
    AlgebraRegistry::builtin().load_data("small_quantum_sl2", None)
}

pub fn corrupted_z2() -> Result<HopfData, HopfError> {
    AlgebraRegistry::builtin().load_data("corrupted_z2", None)
}
