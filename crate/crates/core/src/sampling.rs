//! Random inputs and a deterministic parallel trial runner.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cocycle::BasedTriple;
use crate::field::{FieldCtx, Sign};
use crate::forms::FormMatrix;
use crate::lagrange::{random_unitary, BasedLagrangian, HyperbolicSpace, Lagrangian};
use crate::matrix::Matrix;

/// `m + ε m^J` for a random `m`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, ctx: FieldCtx, eps: Sign, n: usize, bound: i64) -> FormMatrix {
    let m = Matrix::random(ctx, rng, n, n, bound.max(1));
    let e = ctx.from_int(eps.value());
    FormMatrix::new(m.add(&m.conj_transpose().scale(&e)), eps).expect("ε-hermitian by construction")
}

/// An invertible ε-hermitian matrix, or `None` when none turned up (for
/// instance odd-size skew forms under the identity involution).
pub fn random_invertible_hermitian<R: Rng + ?Sized>(
    rng: &mut R,
    ctx: FieldCtx,
    eps: Sign,
    n: usize,
    bound: i64,
) -> Option<FormMatrix> {
    if eps == Sign::Minus && ctx.involution_is_identity() && n % 2 == 1 {
        return None;
    }
    (0..200).map(|_| random_hermitian(rng, ctx, eps, n, bound)).find(FormMatrix::is_nondegenerate)
}

pub fn random_invertible_small<R: Rng + ?Sized>(rng: &mut R, ctx: FieldCtx, n: usize, bound: i64) -> Matrix {
    Matrix::random_invertible(ctx, rng, n, bound.max(1))
}

/// A pairwise opposite triple `g(X_0), g(Y_0), g(u_t Y_0)` for a random
/// word `g` and random invertible `t`.
pub fn random_opposite_triple<R: Rng + ?Sized>(
    rng: &mut R,
    space: &HyperbolicSpace,
    length: usize,
    bound: i64,
) -> Option<(Lagrangian, Lagrangian, Lagrangian)> {
    let t = random_invertible_hermitian(rng, space.ctx, space.eps(), space.n, bound)?;
    let g = random_unitary(rng, space, length, bound);
    let (x0, y0) = space.standard_pair();
    let z0 = space.graph(&t).expect("matching size");
    Some((g.apply(&x0), g.apply(&y0), g.apply(&z0)))
}

/// `g(X_0), g(Y_0), g(u_t Y_0), g(u_{t'} Y_0)` with `t`, `t'`, `t' - t` and
/// `t^{-1} - t'^{-1}` invertible, so that all six pairs are opposite.
pub fn random_quadruple<R: Rng + ?Sized>(
    rng: &mut R,
    space: &HyperbolicSpace,
    length: usize,
    bound: i64,
) -> Option<[Lagrangian; 4]> {
    let (ctx, eps, n) = (space.ctx, space.eps(), space.n);
    for _ in 0..200 {
        let t = random_invertible_hermitian(rng, ctx, eps, n, bound)?;
        let t1 = random_invertible_hermitian(rng, ctx, eps, n, bound)?;
        let diff = t1.matrix().sub(t.matrix());
        if !diff.is_invertible() {
            continue;
        }
        let inv_diff = t.matrix().inverse().ok()?.sub(&t1.matrix().inverse().ok()?);
        if !inv_diff.is_invertible() {
            continue;
        }
        let g = random_unitary(rng, space, length, bound);
        let (x0, y0) = space.standard_pair();
        let z = space.graph(&t).expect("matching size");
        let z1 = space.graph(&t1).expect("matching size");
        return Some([g.apply(&x0), g.apply(&y0), g.apply(&z), g.apply(&z1)]);
    }
    None
}

/// A random opposite triple with each Lagrangian based by a random basis.
pub fn random_based_triple<R: Rng + ?Sized>(
    rng: &mut R,
    space: &HyperbolicSpace,
    length: usize,
    bound: i64,
) -> Option<BasedTriple> {
    let (x, y, z) = random_opposite_triple(rng, space, length, bound)?;
    let mut base = |l: Lagrangian| {
        let a = random_invertible_small(rng, space.ctx, space.n, bound);
        let basis = l.basis().mul(&a);
        BasedLagrangian::new(l, basis).expect("rebased basis spans")
    };
    let (x, y, z) = (base(x), base(y), base(z));
    Some(BasedTriple::new(x, y, z).expect("same space"))
}

/// A random Lagrangian `g(X_0)`.
pub fn random_lagrangian<R: Rng + ?Sized>(rng: &mut R, space: &HyperbolicSpace, length: usize, bound: i64) -> Lagrangian {
    random_unitary(rng, space, length, bound).apply(&space.standard_pair().0)
}

/// Generator for trial `index` of a run seeded with `seed`; independent of
/// scheduling.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `trials` independent trials in parallel; results come back in trial
/// order.
pub fn run_trials<T, F>(trials: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            f(&mut rng, i)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trials_are_reproducible() {
        let draw = |rng: &mut ChaCha8Rng, _| rng.gen::<u64>();
        assert_eq!(run_trials(64, 9, draw), run_trials(64, 9, draw));
        assert_ne!(run_trials(4, 9, draw), run_trials(4, 10, draw));
    }

    #[test]
    fn skew_odd_rank_has_no_invertible_form() {
        let mut rng = trial_rng(1, 0);
        let ctx = FieldCtx::symplectic_q().with_eps(Sign::Minus);
        assert!(random_invertible_hermitian(&mut rng, ctx, Sign::Minus, 3, 2).is_none());
        assert!(random_invertible_hermitian(&mut rng, ctx, Sign::Minus, 2, 2).is_some());
    }
}
