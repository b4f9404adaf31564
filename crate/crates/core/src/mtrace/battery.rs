use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::check::CheckResult;
use crate::rep::{
    dual_left, dual_right, ev_coev, hom_space, pivotal_ev_right, regular, tensor, trivial, HModule, Module,
    Morphism, Presentation, Side,
};
use crate::scalars::{Matrix, SparseVec};

use super::{lambda_left, lambda_right, ptr_left, ptr_right, TraceContext, TraceError};

struct Homs<'a> {
    ctx: &'a TraceContext,
    cache: HashMap<(String, String), Vec<Morphism>>,
}

impl Homs<'_> {
    fn get(&mut self, a: &Module, b: &Module) -> Result<&[Morphism], TraceError> {
        let key = (a.key().to_string(), b.key().to_string());
        if !self.cache.contains_key(&key) {
            self.cache.insert(key.clone(), hom_space(a, b)?);
        }
        Ok(&self.cache[&key])
    }

    fn random(&mut self, a: &Module, b: &Module, rng: &mut ChaCha8Rng) -> Result<Morphism, TraceError> {
        let f = self.ctx.algebra().field();
        let basis = self.get(a, b)?;
        let mut m = Matrix::zeros(f, b.dim(), a.dim());
        for phi in basis {
            let c = f.from_int(rng.gen_range(-3..=3));
            m = m.add(&phi.matrix.scale(&c))?;
        }
        Ok(Morphism::unchecked(a.clone(), b.clone(), m)?)
    }
}

fn row(v: &SparseVec, n: usize, f: crate::scalars::Field) -> Matrix {
    let mut cols = vec![Vec::new(); n];
    for (i, x) in v {
        cols[*i] = vec![(0, x.clone())];
    }
    Matrix::from_columns(f, 1, cols)
}

fn kron3(a: &Matrix, b: &Matrix, c: &Matrix) -> Matrix {
    a.kron(b).kron(c)
}

/// The m-trace property battery: cyclicity, both partial-trace properties,
/// the three copairing identities, the comparison of `Λ^t` with the sided
/// cointegral maps, and independence of the retract presentation.
///
/// `extra` adds non-projective modules to the pool used as `Y` and `Z`.
pub fn run_battery(
    ctx: &TraceContext,
    seed: u64,
    instances: usize,
    extra: &[Module],
) -> Result<Vec<CheckResult>, TraceError> {
    let h = ctx.algebra().clone();
    let f = h.field();
    let reg = regular(&h);
    let one = trivial(&h);
    let projectives = vec![reg.clone(), dual_left(&reg), dual_right(&reg)];
    let mut others = vec![one.clone(), reg.clone()];
    others.extend(extra.iter().cloned());
    let mut homs = Homs { ctx, cache: HashMap::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng, pool: &[Module]| pool[rng.gen_range(0..pool.len())].clone();

    let mut cyclic = CheckResult::new("cyclicity");
    let mut right = CheckResult::new("right partial trace");
    let mut left = CheckResult::new("left partial trace");
    let mut natural = CheckResult::new("copairing naturality");
    for k in 0..instances {
        let (x, y) = (pick(&mut rng, &projectives), pick(&mut rng, &projectives));
        let a = homs.random(&x, &y, &mut rng)?;
        let b = homs.random(&y, &x, &mut rng)?;
        let lhs = ctx.mtrace(&a.then(&b)?)?;
        let rhs = ctx.mtrace(&b.then(&a)?)?;
        cyclic.record(lhs == rhs, || format!("#{k} {} / {}: {lhs} vs {rhs}", x.key(), y.key()));

        let (x, y) = (pick(&mut rng, &projectives), pick(&mut rng, &others));
        let xy = tensor(&x, &y)?;
        let e = homs.random(&xy, &xy, &mut rng)?;
        let lhs = ctx.mtrace(&e)?;
        let rhs = ctx.mtrace(&ptr_right(&e, &x, &y)?)?;
        right.record(lhs == rhs, || format!("#{k} {}: {lhs} vs {rhs}", xy.key()));

        let yx = tensor(&y, &x)?;
        let e = homs.random(&yx, &yx, &mut rng)?;
        let lhs = ctx.mtrace(&e)?;
        let rhs = ctx.mtrace(&ptr_left(&e, &y, &x)?)?;
        left.record(lhs == rhs, || format!("#{k} {}: {lhs} vs {rhs}", yx.key()));

        let (x, y) = (pick(&mut rng, &projectives), pick(&mut rng, &projectives));
        let m = homs.random(&x, &y, &mut rng)?;
        let lhs = m.matrix.mul(&ctx.lambda_t(&x)?.matrix)?;
        let rhs = ctx.lambda_t(&y)?.matrix.mul(&m.matrix)?;
        natural.record(lhs == rhs, || format!("#{k} {} -> {}", x.key(), y.key()));
    }

    let mut duality = CheckResult::new("copairing duality");
    let mut rotation = CheckResult::new("copairing rotation");
    for x in &projectives {
        for d in [dual_left(x), dual_right(x)] {
            let ok = ctx.lambda_t(&d)?.matrix == ctx.lambda_t(x)?.matrix.transpose();
            duality.record(ok, || format!("{} vs {}", d.key(), x.key()));
        }
        for z in &others {
            let ok = rotated_lambda(ctx, x, z)? == ctx.lambda_t(&tensor(z, x)?)?.matrix;
            rotation.record(ok, || format!("{} past {}", x.key(), z.key()));
        }
    }

    let mut sided = CheckResult::new("lambda_t equals sided cointegral maps");
    let gg = tensor(&reg, &reg)?;
    for p in [&reg, &gg] {
        let t = ctx.lambda_t(p)?.matrix;
        let l = lambda_left(p)?.matrix;
        let r = lambda_right(p)?.matrix;
        sided.record(t == l && t == r, || p.key().to_string());
    }

    let mut presentations = CheckResult::new("presentation independence");
    let twist = h
        .grouplikes()
        .iter()
        .find(|g| *g != h.unit())
        .cloned()
        .unwrap_or_else(|| h.unit().clone());
    let twist_inv = h.apply_antipode(&twist);
    let right_mult = |a: &SparseVec| {
        Matrix::from_columns(f, h.dim(), (0..h.dim()).map(|e| h.multiply(&h.basis_vec(e), a)).collect())
    };
    let (ra, rai) = (right_mult(&twist), right_mult(&twist_inv));
    for p in projectives.iter().chain(std::iter::once(&tensor(&reg, &pick(&mut rng, &others))?)) {
        let pres = p.presentation()?;
        let n = pres.copies;
        // reverse the copies and twist each by right multiplication
        let rev = Matrix::from_columns(
            f,
            n,
            (0..n).map(|k| vec![(n - 1 - k, f.one())]).collect(),
        );
        let fwd = rev.kron(&ra);
        let back = rev.kron(&rai);
        let alt = Presentation::new(n, fwd.mul(&pres.inclusion)?, pres.retraction.mul(&back)?);
        let twin = HModule::custom(&h, "twin", p.actions().to_vec(), Some(alt))?;
        for _ in 0..3 {
            let e = homs.random(p, p, &mut rng)?;
            let lhs = ctx.mtrace(&e)?;
            let rhs = ctx.trace_matrix(&twin, &e.matrix)?;
            presentations.record(lhs == rhs, || format!("{}: {lhs} vs {rhs}", p.key()));
        }
    }

    Ok(vec![cyclic, right, left, natural, duality, rotation, sided, presentations])
}

/// `Σ z̃_i ∘ z̃^i` for `Z ⊗ X`, built from the copairing of `X ⊗ Z`.
fn rotated_lambda(ctx: &TraceContext, x: &Module, z: &Module) -> Result<Matrix, TraceError> {
    let f = ctx.algebra().field();
    let xz = tensor(x, z)?;
    let o = ctx.omega(&xz)?;
    let (_, coev) = ev_coev(z, Side::Left)?;
    let ev = pivotal_ev_right(z)?;
    let (nx, nz) = (x.dim(), z.dim());
    let iz = Matrix::identity(f, nz);
    let izx = Matrix::identity(f, nz * nx);
    let mut acc = Matrix::zeros(f, nz * nx, nz * nx);
    for (up, down) in o.up.iter().zip(&o.down) {
        let up_m = Matrix::from_columns(f, nx * nz, vec![up.clone()]);
        let down_m = row(down, nx * nz, f);
        // Z⊗X -> Z⊗X⊗Z⊗Z* -> Z⊗Z* -> 1
        let new_down = ev
            .matrix
            .mul(&kron3(&iz, &down_m, &iz))?
            .mul(&izx.kron(&coev.matrix))?;
        // 1 -> Z⊗Z* -> Z⊗X⊗Z⊗Z* -> Z⊗X
        let new_up = izx
            .kron(&ev.matrix)
            .mul(&kron3(&iz, &up_m, &iz))?
            .mul(&coev.matrix)?;
        acc = acc.add(&new_up.mul(&new_down)?)?;
    }
    Ok(acc)
}
